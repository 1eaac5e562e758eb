//! CSV readers and writers for grades, responses, keys, scores and counts.
//!
//! Row numbers in errors count the header as row 1.

use std::collections::BTreeMap;

use csv::{ReaderBuilder, StringRecord, Trim};
use thiserror::Error;

use crate::model::{AnswerKey, GradeRecord, Group, Letter, LetterBucket, ResponseSheet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CsvError {
    #[error("row {row}, column {column:?}: {message}")]
    Schema {
        row: usize,
        column: String,
        message: String,
    },
    #[error("row {row}: unknown grade letter {value:?} (expected A+, A, B, C, D, E or F)")]
    Letter { row: usize, value: String },
    #[error("unreadable CSV: {0}")]
    Read(String),
}

fn schema(row: usize, column: &str, message: impl Into<String>) -> CsvError {
    CsvError::Schema {
        row,
        column: column.to_string(),
        message: message.into(),
    }
}

type Rows = (Vec<String>, Vec<(usize, StringRecord)>);

/// Header plus data rows as `(row number, record)`.
fn read_rows(text: &str) -> Result<Rows, CsvError> {
    let mut reader = ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(Trim::All)
        .from_reader(text.as_bytes());
    let mut records = reader.records();
    let header: Vec<String> = match records.next() {
        Some(r) => r
            .map_err(|e| CsvError::Read(e.to_string()))?
            .iter()
            .map(|s| s.trim_start_matches('\u{feff}').to_string())
            .collect(),
        None => return Err(schema(1, "", "missing header row")),
    };
    let mut rows = Vec::new();
    for (i, r) in records.enumerate() {
        let r = r.map_err(|e| CsvError::Read(e.to_string()))?;
        if r.iter().all(str::is_empty) {
            continue;
        }
        let row = i + 2;
        if r.len() != header.len() {
            return Err(schema(
                row,
                "",
                format!("expected {} fields, found {}", header.len(), r.len()),
            ));
        }
        rows.push((row, r));
    }
    Ok((header, rows))
}

fn column(header: &[String], name: &str) -> Result<usize, CsvError> {
    header
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| schema(1, name, "missing column"))
}

fn require_header(header: &[String], expected: &[&str]) -> Result<(), CsvError> {
    if header.len() != expected.len() || header.iter().zip(expected).any(|(h, e)| h != e) {
        return Err(schema(
            1,
            "",
            format!("expected header {:?}, found {:?}", expected.join(","), header.join(",")),
        ));
    }
    Ok(())
}

/// `student,group,points` with points 0..=4, or `student,group,letter`.
pub fn parse_grades_csv(text: &str) -> Result<Vec<GradeRecord>, CsvError> {
    let (header, rows) = read_rows(text)?;
    let by_letter = match header.get(2).map(String::as_str) {
        Some("points") => false,
        Some("letter") => true,
        _ => {
            return Err(schema(
                1,
                "",
                "expected header student,group,points or student,group,letter",
            ))
        }
    };
    require_header(&header, &["student", "group", if by_letter { "letter" } else { "points" }])?;
    let mut out = Vec::with_capacity(rows.len());
    for (row, r) in rows {
        let student = &r[0];
        if student.is_empty() {
            return Err(schema(row, "student", "empty student id"));
        }
        if r[1].is_empty() {
            return Err(schema(row, "group", "empty group label"));
        }
        let group = Group::from(&r[1]);
        let record = if by_letter {
            let bucket = LetterBucket::from_letter(&r[2]).ok_or_else(|| CsvError::Letter {
                row,
                value: r[2].to_string(),
            })?;
            GradeRecord::from_bucket(student, group, bucket)
        } else {
            let points = r[2]
                .parse::<u8>()
                .ok()
                .filter(|p| *p <= 4)
                .ok_or_else(|| schema(row, "points", format!("expected an integer 0..=4, got {:?}", &r[2])))?;
            GradeRecord::from_points(student, group, points).expect("points checked above")
        };
        out.push(record);
    }
    Ok(out)
}

/// Writes the `points` form.
pub fn render_grades_csv(records: &[GradeRecord]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["student", "group", "points"]).expect("in-memory write");
    for r in records {
        w.write_record([r.student(), r.group().label(), &r.points().to_string()])
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

/// `student,test_id,p1,p2,...` with a letter or an empty cell per position.
pub fn parse_responses_csv(text: &str) -> Result<Vec<ResponseSheet>, CsvError> {
    let (header, rows) = read_rows(text)?;
    if header.len() < 2 || header[0] != "student" || header[1] != "test_id" {
        return Err(schema(1, "", "expected header student,test_id,p1,p2,..."));
    }
    for (i, name) in header.iter().enumerate().skip(2) {
        if *name != format!("p{}", i - 1) {
            return Err(schema(1, name, format!("expected column p{}", i - 1)));
        }
    }
    let mut out = Vec::with_capacity(rows.len());
    for (row, r) in rows {
        let mut answers = BTreeMap::new();
        for (i, cell) in r.iter().enumerate().skip(2) {
            let answer = if cell.is_empty() {
                None
            } else {
                Some(cell.parse::<Letter>().map_err(|_| {
                    schema(row, &header[i], format!("expected a letter a-z or an empty cell, got {cell:?}"))
                })?)
            };
            answers.insert(i - 1, answer);
        }
        out.push(ResponseSheet {
            student: r[0].to_string(),
            test_id: r[1].to_string(),
            answers,
        });
    }
    Ok(out)
}

/// `position,letter`, positions 1..n in order.
pub fn parse_key_csv(text: &str) -> Result<AnswerKey, CsvError> {
    let (header, rows) = read_rows(text)?;
    require_header(&header, &["position", "letter"])?;
    let mut key = AnswerKey::default();
    for (row, r) in rows {
        let position: usize = r[0]
            .parse()
            .map_err(|_| schema(row, "position", format!("not a position: {:?}", &r[0])))?;
        if position != key.len() + 1 {
            return Err(schema(row, "position", format!("expected position {}, got {position}", key.len() + 1)));
        }
        let letter = r[1]
            .parse::<Letter>()
            .map_err(|_| schema(row, "letter", format!("not a letter: {:?}", &r[1])))?;
        key.entries.insert(position, letter);
    }
    Ok(key)
}

pub fn render_key_csv(key: &AnswerKey) -> String {
    let mut out = String::from("position,letter\n");
    for (p, l) in &key.entries {
        out.push_str(&format!("{p},{l}\n"));
    }
    out
}

/// `(student, percentage)` pairs from any CSV with those two columns.
pub fn parse_percentages_csv(text: &str) -> Result<Vec<(String, f64)>, CsvError> {
    let (header, rows) = read_rows(text)?;
    let student = column(&header, "student")?;
    let pct = column(&header, "percentage")?;
    rows.into_iter()
        .map(|(row, r)| {
            let value: f64 = r[pct]
                .parse()
                .ok()
                .filter(|v: &f64| (0.0..=100.0).contains(v))
                .ok_or_else(|| schema(row, "percentage", format!("expected a number in [0, 100], got {:?}", &r[pct])))?;
            Ok((r[student].to_string(), value))
        })
        .collect()
}

/// Question counts from `student,count`.
pub fn parse_counts_csv(text: &str) -> Result<Vec<u32>, CsvError> {
    let (header, rows) = read_rows(text)?;
    require_header(&header, &["student", "count"])?;
    rows.into_iter()
        .map(|(row, r)| {
            r[1].parse::<u32>()
                .map_err(|_| schema(row, "count", format!("expected a non-negative integer, got {:?}", &r[1])))
        })
        .collect()
}
