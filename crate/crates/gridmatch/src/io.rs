//! Line-delimited JSON datasets.
//!
//! One record per line:
//!
//! ```text
//! {"id": "a", "points": [[0.1, 0.2], [0.5, 0.5]]}
//! {"id": "q-a", "points": [[0.11, 0.2], [0.5, 0.49]], "source": "a"}
//! ```
//!
//! `source` is optional and names the stored set a generated query was
//! derived from. Blank lines are skipped.

use std::collections::HashSet;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use gridmatch_core::geometry::{Point, PointSet};
use serde::{Deserialize, Serialize};

use crate::Error;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Record {
    pub id: String,
    pub points: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

impl Record {
    pub fn from_set(set: &PointSet, source: Option<String>) -> Self {
        Record {
            id: set.id().to_string(),
            points: set.points().iter().map(|p| [p.x(), p.y()]).collect(),
            source,
        }
    }

    pub fn to_set(&self) -> Result<PointSet, gridmatch_core::Error> {
        let points = self
            .points
            .iter()
            .map(|&[x, y]| Point::new(x, y))
            .collect::<Result<Vec<_>, _>>()?;
        PointSet::new(self.id.clone(), points)
    }
}

/// Parses and validates a dataset: well-formed records, non-empty sets,
/// coordinates in the unit box, unique ids.
pub fn parse_dataset(text: &str, origin: &str) -> Result<Vec<Record>, Error> {
    read_records(text.as_bytes(), origin)
}

pub fn read_dataset(path: &Path) -> Result<Vec<Record>, Error> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_records(BufReader::new(file), &path.display().to_string())
}

fn read_records(reader: impl BufRead, origin: &str) -> Result<Vec<Record>, Error> {
    let mut records = Vec::new();
    let mut ids = HashSet::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(origin, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let invalid = |message: String| Error::Invalid {
            origin: origin.to_string(),
            line: i + 1,
            message,
        };
        let record: Record = serde_json::from_str(&line).map_err(|e| invalid(e.to_string()))?;
        record.to_set().map_err(|e| invalid(e.to_string()))?;
        if !ids.insert(record.id.clone()) {
            return Err(invalid(format!("duplicate id {:?}", record.id)));
        }
        records.push(record);
    }
    Ok(records)
}

pub fn to_sets(records: &[Record]) -> Vec<PointSet> {
    records
        .iter()
        .map(|r| r.to_set().expect("records are validated on read"))
        .collect()
}

pub fn format_dataset(records: &[Record]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("records serialize"));
        out.push('\n');
    }
    out
}

pub fn write_dataset(path: &Path, records: &[Record]) -> Result<(), Error> {
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(format_dataset(records).as_bytes())
        .map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let text = "{\"id\":\"a\",\"points\":[[0.1,0.2],[1.0,0.0]]}\n\n{\"id\":\"q\",\"points\":[[0.5,0.5]],\"source\":\"a\"}\n";
        let records = parse_dataset(text, "t").unwrap();
        assert_eq!(records.len(), 2);
        assert_eq!(records[1].source.as_deref(), Some("a"));
        assert_eq!(format_dataset(&records), text.replace("\n\n", "\n"));
        let sets = to_sets(&records);
        assert_eq!(sets[0].len(), 2);
    }

    #[test]
    fn rejects_bad_records() {
        let out_of_box = "{\"id\":\"a\",\"points\":[[1.2,0.0]]}";
        let err = parse_dataset(out_of_box, "t").unwrap_err();
        assert!(matches!(err, Error::Invalid { line: 1, .. }));

        let dup = "{\"id\":\"a\",\"points\":[[0.1,0.0]]}\n{\"id\":\"a\",\"points\":[[0.2,0.0]]}";
        assert!(matches!(
            parse_dataset(dup, "t"),
            Err(Error::Invalid { line: 2, .. })
        ));

        assert!(parse_dataset("{\"id\":\"a\",\"points\":[]}", "t").is_err());
        assert!(parse_dataset("{\"id\":\"a\"}", "t").is_err());
        assert!(parse_dataset("{\"id\":\"a\",\"points\":[[0.1,0.1]],\"extra\":1}", "t").is_err());
        assert!(parse_dataset("not json", "t").is_err());
    }
}
