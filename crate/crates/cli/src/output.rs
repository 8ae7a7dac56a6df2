use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::CliError;

/// One artifact of a run, held in memory until written.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputFile {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl OutputFile {
    pub fn sha256(&self) -> String {
        sha256_hex(&self.bytes)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// 17 significant digits, '.' decimal separator.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV table with a header row.
pub struct Table {
    writer: csv::Writer<Vec<u8>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
        writer.write_record(header).expect("in-memory write");
        Table { writer }
    }

    pub fn row<I, S>(&mut self, fields: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields).expect("in-memory write");
    }

    pub fn floats(&mut self, values: &[f64]) {
        self.row(values.iter().map(|x| fmt_f64(*x)));
    }

    pub fn finish(self, name: impl Into<String>) -> OutputFile {
        let bytes = self.writer.into_inner().expect("in-memory flush");
        OutputFile { name: name.into(), bytes }
    }
}

pub fn json_file(name: impl Into<String>, value: &serde_json::Value) -> OutputFile {
    let mut bytes = serde_json::to_vec_pretty(value).expect("serializable JSON value");
    bytes.push(b'\n');
    OutputFile { name: name.into(), bytes }
}

pub fn write_all(dir: &Path, files: &[OutputFile]) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    for f in files {
        let path = dir.join(&f.name);
        fs::write(&path, &f.bytes).map_err(|e| CliError::io(&path, e))?;
    }
    Ok(())
}
