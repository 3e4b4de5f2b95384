//! Dense linear algebra, seeded random streams and spectral estimation.

mod matrix;
mod rng;
mod spectral;
mod vector;

pub use matrix::SymmetricMatrix;
pub use rng::{Purpose, RngStream};
pub use spectral::{power_iteration, second_eigenvalue_magnitude, Eigenpair, DEFAULT_SEED};
pub use vector::{axpy, DenseVector};
