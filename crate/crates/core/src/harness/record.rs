//! JSONL run records.

use std::fs::OpenOptions;
use std::io::{self, Write};
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::Result;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// One line of output: what was run, with which seed and parameters, and
/// what came out.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub command: String,
    pub seed: Option<u64>,
    pub spec: Value,
    pub outputs: Value,
    /// Seconds since the Unix epoch. Not part of reproducibility.
    pub timestamp: f64,
    pub version: String,
}

impl RunRecord {
    pub fn new(command: &str, seed: Option<u64>, spec: Value, outputs: Value) -> Self {
        let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0.0, |d| d.as_secs_f64());
        Self { command: command.into(), seed, spec, outputs, timestamp, version: VERSION.into() }
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("records serialize")
    }

    pub fn from_line(line: &str) -> Result<Self> {
        Ok(serde_json::from_str(line)?)
    }

    /// Equal in everything but the timestamp.
    pub fn reproduces(&self, other: &RunRecord) -> bool {
        self.command == other.command
            && self.seed == other.seed
            && self.spec == other.spec
            && self.outputs == other.outputs
            && self.version == other.version
    }
}

/// The single writer for a run: appends records to a file, or to stdout.
pub struct RecordWriter {
    sink: Box<dyn Write>,
}

impl RecordWriter {
    pub fn open(path: Option<&Path>) -> Result<Self> {
        let sink: Box<dyn Write> = match path {
            Some(p) => Box::new(io::BufWriter::new(OpenOptions::new().create(true).append(true).open(p)?)),
            None => Box::new(io::stdout()),
        };
        Ok(Self { sink })
    }

    pub fn write(&mut self, record: &RunRecord) -> Result<()> {
        writeln!(self.sink, "{}", record.to_line())?;
        self.sink.flush()?;
        Ok(())
    }
}

/// Read every record of a JSONL file.
pub fn read_records(path: &Path) -> Result<Vec<RunRecord>> {
    let text = std::fs::read_to_string(path)?;
    text.lines().filter(|l| !l.trim().is_empty()).map(RunRecord::from_line).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn round_trip_ignores_timestamp() {
        let a = RunRecord::new("sample", Some(7), json!({"p": 0.3}), json!({"x": "01|10"}));
        let mut b = RunRecord::from_line(&a.to_line()).unwrap();
        assert_eq!(a, b);
        b.timestamp += 5.0;
        assert!(a.reproduces(&b));
        b.outputs = json!({"x": "01|11"});
        assert!(!a.reproduces(&b));
    }
}
