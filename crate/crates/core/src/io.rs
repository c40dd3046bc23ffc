//! JSONL records shared by the pipelines.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::align::AlignmentResult;
use crate::error::{Error, Result};
use crate::text::{CompoundEntry, Word};

/// `{"word","lang","constituents":[…]}`
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryRecord {
    pub word: String,
    pub lang: String,
    pub constituents: Vec<String>,
}

impl EntryRecord {
    pub fn to_entry(&self) -> Result<CompoundEntry> {
        CompoundEntry::new(Word::new(&self.word, &self.lang)?, self.constituents.clone())
    }
}

impl From<&CompoundEntry> for EntryRecord {
    fn from(e: &CompoundEntry) -> Self {
        EntryRecord {
            word: e.word().text().to_owned(),
            lang: e.word().lang().to_owned(),
            constituents: e.constituents().to_vec(),
        }
    }
}

/// An [`EntryRecord`] extended with its alignment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignedRecord {
    pub word: String,
    pub lang: String,
    pub constituents: Vec<String>,
    pub boundaries: Vec<usize>,
    pub segments: Vec<String>,
    pub cost: usize,
}

impl AlignedRecord {
    pub fn new(entry: &CompoundEntry, result: &AlignmentResult) -> Self {
        AlignedRecord {
            word: entry.word().text().to_owned(),
            lang: entry.word().lang().to_owned(),
            constituents: entry.constituents().to_vec(),
            boundaries: result.boundaries().indices().to_vec(),
            segments: result.segments().to_vec(),
            cost: result.total_cost(),
        }
    }
}

pub fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| Error::io(path, e))
}

pub fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

/// Parse one JSON value per non-blank line.
pub fn read_jsonl_from<T: DeserializeOwned>(reader: impl BufRead, name: &str) -> Result<Vec<T>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::data(name, i + 1, e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let value = serde_json::from_str(&line).map_err(|e| Error::data(name, i + 1, e.to_string()))?;
        out.push(value);
    }
    Ok(out)
}

pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    read_jsonl_from(open(path)?, &path.display().to_string())
}

/// Read entry records and validate them into [`CompoundEntry`]s.
pub fn read_entries(path: &Path) -> Result<Vec<CompoundEntry>> {
    let name = path.display().to_string();
    let records: Vec<EntryRecord> = read_jsonl(path)?;
    records
        .iter()
        .enumerate()
        .map(|(i, r)| r.to_entry().map_err(|e| Error::data(&name, i + 1, e.to_string())))
        .collect()
}

pub fn write_jsonl_to<'a, T: Serialize + 'a>(mut writer: impl Write, items: impl IntoIterator<Item = &'a T>) -> Result<()> {
    for item in items {
        serde_json::to_writer(&mut writer, item)?;
        writer.write_all(b"\n").map_err(|e| Error::io("<output>", e))?;
    }
    writer.flush().map_err(|e| Error::io("<output>", e))
}

pub fn write_jsonl<'a, T: Serialize + 'a>(path: &Path, items: impl IntoIterator<Item = &'a T>) -> Result<()> {
    write_jsonl_to(create(path)?, items).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })
}
