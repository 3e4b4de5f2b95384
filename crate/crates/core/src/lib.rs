pub mod analysis;
pub mod cli;
pub mod config;
pub mod data;
pub mod engine;
pub mod error;
pub mod numerics;
pub mod optimizers;
pub mod output;
pub mod problems;
pub mod topology;
pub mod verify;

pub use error::{Error, Result};
