//! Run artifacts: `records.csv`, `summary.json`, and `sweep.csv`.
//!
//! Floats in CSV and text output use 17 significant digits (`{:.16e}`), which
//! round-trips every `f64`.

use std::io::{self, Read, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::config::RunConfig;
use crate::engine::{RoundRecord, VerificationSummary};
use crate::error::{Error, Result};

pub const RECORD_COLUMNS: [&str; 7] = [
    "round",
    "train_loss",
    "grad_norm_z_sq",
    "consensus",
    "test_accuracy",
    "psi_round",
    "elapsed_ms",
];

pub const SWEEP_COLUMNS: [&str; 6] = ["axis_value", "seed", "rounds_to_threshold", "final_metric", "psi", "status"];

/// 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_records(writer: impl Write, records: &[RoundRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(RECORD_COLUMNS)?;
    for r in records {
        w.write_record([
            r.round.to_string(),
            fmt_f64(r.train_loss),
            fmt_f64(r.grad_norm_z_sq),
            fmt_f64(r.consensus),
            r.test_accuracy.map(fmt_f64).unwrap_or_default(),
            fmt_f64(r.psi_round),
            fmt_f64(r.elapsed_ms),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_records(reader: impl Read) -> Result<Vec<RoundRecord>> {
    let mut r = csv::Reader::from_reader(reader);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != RECORD_COLUMNS {
        return Err(Error::Data(format!(
            "unexpected records header {header:?}, expected {RECORD_COLUMNS:?}"
        )));
    }
    let float = |s: &str, col: &str| {
        s.parse::<f64>()
            .map_err(|_| Error::Data(format!("bad value '{s}' in column {col}")))
    };
    let mut out = Vec::new();
    for row in r.records() {
        let row = row?;
        let round = row[0]
            .parse::<usize>()
            .map_err(|_| Error::Data(format!("bad round '{}'", &row[0])))?;
        out.push(RoundRecord {
            round,
            train_loss: float(&row[1], "train_loss")?,
            grad_norm_z_sq: float(&row[2], "grad_norm_z_sq")?,
            consensus: float(&row[3], "consensus")?,
            test_accuracy: if row[4].is_empty() {
                None
            } else {
                Some(float(&row[4], "test_accuracy")?)
            },
            psi_round: float(&row[5], "psi_round")?,
            elapsed_ms: float(&row[6], "elapsed_ms")?,
        });
    }
    Ok(out)
}

pub fn load_records(path: &Path) -> Result<Vec<RoundRecord>> {
    read_records(std::fs::File::open(path)?)
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub rounds_completed: usize,
    pub records: usize,
    pub psi: f64,
    pub disconnected_rounds: usize,
    pub final_record: Option<RoundRecord>,
    pub verification: Option<VerificationSummary>,
}

/// `summary.json`: the fully resolved configuration plus run results. It is
/// accepted back as a config file (see [`RunConfig::load`]).
#[derive(Debug, Clone, Serialize)]
pub struct SummaryFile<'a> {
    pub resolved_config: &'a RunConfig,
    pub summary: RunSummary,
}

/// Pretty JSON whose floats carry 17 significant digits. Non-finite floats
/// become `null`.
pub fn to_json(value: &impl Serialize) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Fmt17(PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("JSON is UTF-8"))
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    std::fs::write(path, to_json(value)?)?;
    Ok(())
}

struct Fmt17<'a>(PrettyFormatter<'a>);

impl Formatter for Fmt17<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(fmt_f64(value).as_bytes())
    }
    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, f64::from(value))
    }
    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}
