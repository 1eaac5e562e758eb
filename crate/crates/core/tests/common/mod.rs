#![allow(dead_code)]

use std::collections::HashMap;

use proptest::prelude::*;
use quizforge::model::{Alternative, GradeRecord, Group, LetterBucket, Question, QuestionBank};
use quizforge::stats::expand_mark_distribution;

/// Mark counts per group in A+, A, B/C, D, E/F order.
pub const TABLE4: [(&str, [usize; 5]); 4] = [
    ("CG", [2, 4, 46, 60, 110]),
    ("TG", [6, 15, 32, 69, 88]),
    ("MG-P", [7, 15, 22, 37, 31]),
    ("MG-I", [18, 45, 49, 57, 56]),
];

pub fn table4_records() -> Vec<GradeRecord> {
    TABLE4
        .iter()
        .flat_map(|(label, counts)| {
            let group = Group::from(*label);
            expand_mark_distribution(LetterBucket::ALL.iter().copied().zip(counts.iter().copied()), &group)
        })
        .collect()
}

pub fn table4_csv() -> String {
    quizforge::cli::render_grades_csv(&table4_records())
}

/// A bank of `n` four-option questions; question `i` has its correct
/// option at index `i % 4`.
pub fn synthetic_bank(n: usize) -> QuestionBank {
    QuestionBank {
        title: "Synthetic pool".into(),
        questions: (1..=n)
            .map(|i| {
                let alts = (0..4)
                    .map(|j| Alternative::new(format!("q{i} option {j}"), j == i % 4))
                    .collect();
                Question::new(format!("q{i}"), format!("Question number {i}?"), alts)
            })
            .collect(),
        sources: vec!["input".into()],
    }
}

// --- random banks ---------------------------------------------------------

fn text_char() -> impl Strategy<Value = char> {
    prop_oneof![
        6 => proptest::char::range('a', 'z'),
        2 => proptest::char::range('A', 'Z'),
        2 => Just(' '),
        1 => proptest::sample::select(vec![
            '<', '>', '&', '"', '\'', '\t', '\n', '\r', '~', '=', '#', '{', '}', ':', '\\', '(', ')',
            '\u{e9}', '\u{f1}', '\u{20ac}', '\u{4e2d}', '\u{1f600}', '\u{7}',
        ]),
    ]
}

pub fn text(max: usize) -> impl Strategy<Value = String> {
    (proptest::char::range('a', 'z'), proptest::collection::vec(text_char(), 0..max))
        .prop_map(|(first, rest)| std::iter::once(first).chain(rest).collect())
}

fn alternatives() -> impl Strategy<Value = Vec<Alternative>> {
    (2usize..=6)
        .prop_flat_map(|n| {
            (
                proptest::collection::vec((text(12), proptest::option::of(text(10))), n),
                0..n,
            )
        })
        .prop_map(|(alts, correct)| {
            alts.into_iter()
                .enumerate()
                .map(|(i, (t, fb))| Alternative {
                    text: t,
                    correct: i == correct,
                    feedback: fb,
                })
                .collect()
        })
}

fn question() -> impl Strategy<Value = Question> {
    (
        text(30),
        alternatives(),
        proptest::option::of(text(8)),
        proptest::option::of(text(8)),
        proptest::option::of(any::<i64>()),
    )
        .prop_map(|(stem, alternatives, author, topic, created)| Question {
            id: String::new(),
            stem,
            alternatives,
            author,
            topic,
            created,
        })
}

/// Valid banks with unique ids and the single source `input`.
pub fn bank(max_questions: usize) -> impl Strategy<Value = QuestionBank> {
    (
        proptest::collection::vec(text_char(), 0..15),
        proptest::collection::vec(question(), 0..=max_questions),
    )
        .prop_map(|(title, mut questions)| {
            for (i, q) in questions.iter_mut().enumerate() {
                q.id = format!("id-{i}");
            }
            QuestionBank {
                title: title.into_iter().collect(),
                questions,
                sources: vec!["input".into()],
            }
        })
}

// --- GIFT -----------------------------------------------------------------

pub fn gift_unescape(s: &str) -> String {
    let mut out = String::new();
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c == '\\' {
            match chars.next() {
                Some('n') => out.push('\n'),
                Some(other) => out.push(other),
                None => out.push('\\'),
            }
        } else {
            out.push(c);
        }
    }
    out
}

/// Splits on the first unescaped `delim`.
pub fn split_unescaped(s: &str, delim: char) -> Option<(&str, &str)> {
    let mut escaped = false;
    for (i, c) in s.char_indices() {
        if escaped {
            escaped = false;
        } else if c == '\\' {
            escaped = true;
        } else if c == delim {
            return Some((&s[..i], &s[i + c.len_utf8()..]));
        }
    }
    None
}

// --- PDF ------------------------------------------------------------------

fn find(hay: &[u8], needle: &[u8], from: usize) -> Option<usize> {
    hay.get(from..)?
        .windows(needle.len())
        .position(|w| w == needle)
        .map(|p| p + from)
}

fn rfind(hay: &[u8], needle: &[u8]) -> Option<usize> {
    hay.windows(needle.len()).rposition(|w| w == needle)
}

/// Checks that `startxref` points at an xref table whose in-use entries
/// each point at the matching `N 0 obj` header.
pub fn check_xref(pdf: &[u8]) -> Result<usize, String> {
    let tail = rfind(pdf, b"startxref").ok_or("no startxref")?;
    let rest = std::str::from_utf8(&pdf[tail + 9..]).map_err(|e| e.to_string())?;
    let mut lines = rest.split_whitespace();
    let offset: usize = lines.next().ok_or("no offset")?.parse().map_err(|_| "bad offset")?;
    if lines.next() != Some("%%EOF") {
        return Err("missing %%EOF".into());
    }
    if !pdf[offset..].starts_with(b"xref") {
        return Err(format!("startxref {offset} does not point at xref"));
    }
    let table = std::str::from_utf8(&pdf[offset..tail]).map_err(|e| e.to_string())?;
    let mut lines = table.lines().skip(1);
    let header = lines.next().ok_or("no subsection header")?;
    let (first, count) = header.split_once(' ').ok_or("bad subsection header")?;
    let first: usize = first.parse().map_err(|_| "bad first object")?;
    let count: usize = count.trim().parse().map_err(|_| "bad count")?;
    let mut in_use = 0;
    for i in 0..count {
        let line = lines.next().ok_or("short xref table")?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 || line.len() != 19 {
            return Err(format!("malformed xref entry {line:?}"));
        }
        if fields[2] == "n" {
            let at: usize = fields[0].parse().map_err(|_| "bad entry offset")?;
            let want = format!("{} 0 obj", first + i);
            if !pdf[at..].starts_with(want.as_bytes()) {
                return Err(format!("entry for object {} points at byte {at}, which is not its header", first + i));
            }
            in_use += 1;
        }
    }
    Ok(in_use)
}

fn objects(pdf: &[u8]) -> HashMap<u32, &[u8]> {
    let mut out = HashMap::new();
    let mut pos = 0;
    while let Some(at) = find(pdf, b" 0 obj", pos) {
        let start = pdf[..at].iter().rposition(|b| !b.is_ascii_digit()).map_or(0, |p| p + 1);
        let num: u32 = std::str::from_utf8(&pdf[start..at]).unwrap().parse().unwrap();
        let end = find(pdf, b"endobj", at).expect("unterminated object");
        out.insert(num, &pdf[at + 6..end]);
        pos = end;
    }
    out
}

fn reference_after(body: &[u8], key: &str) -> Vec<u32> {
    let text = String::from_utf8_lossy(body);
    let Some(i) = text.find(key) else { return Vec::new() };
    let after = &text[i + key.len()..];
    let after = after.trim_start();
    let slice = if let Some(inner) = after.strip_prefix('[') {
        &inner[..inner.find(']').unwrap()]
    } else {
        let end = after.find('R').unwrap() + 1;
        &after[..end]
    };
    let tokens: Vec<&str> = slice.split_whitespace().collect();
    tokens.chunks(3).map(|t| t[0].parse().unwrap()).collect()
}

fn stream_of(body: &[u8]) -> &[u8] {
    let text = String::from_utf8_lossy(body);
    let len_at = text.find("/Length").expect("stream without /Length");
    let len: usize = text[len_at + 7..]
        .split_whitespace()
        .next()
        .unwrap()
        .trim_end_matches(">>")
        .parse()
        .unwrap();
    let start = find(body, b"stream\n", 0).expect("no stream keyword") + 7;
    &body[start..start + len]
}

fn literal_strings(content: &[u8]) -> Vec<String> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < content.len() {
        if content[i] != b'(' {
            i += 1;
            continue;
        }
        i += 1;
        let mut bytes = Vec::new();
        let mut depth = 1;
        while i < content.len() {
            let b = content[i];
            match b {
                b'\\' => {
                    i += 1;
                    let e = content[i];
                    match e {
                        b'n' => bytes.push(b'\n'),
                        b'r' => bytes.push(b'\r'),
                        b't' => bytes.push(b'\t'),
                        b'b' => bytes.push(8),
                        b'f' => bytes.push(12),
                        b'0'..=b'7' => {
                            let mut v = 0u32;
                            let mut n = 0;
                            while n < 3 && i < content.len() && (b'0'..=b'7').contains(&content[i]) {
                                v = v * 8 + (content[i] - b'0') as u32;
                                i += 1;
                                n += 1;
                            }
                            i -= 1;
                            bytes.push(v as u8);
                        }
                        other => bytes.push(other),
                    }
                }
                b'(' => {
                    depth += 1;
                    bytes.push(b);
                }
                b')' => {
                    depth -= 1;
                    if depth == 0 {
                        break;
                    }
                    bytes.push(b);
                }
                _ => bytes.push(b),
            }
            i += 1;
        }
        i += 1;
        // Latin-1 view of the WinAnsi bytes
        out.push(bytes.iter().map(|&b| b as char).collect());
    }
    out
}

/// Text runs of each page, in page order.
pub fn pdf_pages_text(pdf: &[u8]) -> Vec<Vec<String>> {
    let objs = objects(pdf);
    let trailer = &pdf[rfind(pdf, b"trailer").expect("no trailer")..];
    let root = reference_after(trailer, "/Root")[0];
    let pages = reference_after(objs[&root], "/Pages")[0];
    reference_after(objs[&pages], "/Kids")
        .into_iter()
        .map(|page| {
            reference_after(objs[&page], "/Contents")
                .into_iter()
                .flat_map(|c| literal_strings(stream_of(objs[&c])))
                .collect()
        })
        .collect()
}

// --- jqz fixture ----------------------------------------------------------

/// Valid document with one question; its first answer carries feedback.
pub const FIXTURE: &str = r#"<?xml version="1.0" encoding="UTF-8"?>
<hotpot-jquiz-file>
  <data>
    <title>Digital Systems, test 3</title>
    <question-record id="s04-1" author="s04">
      <question>How many flip-flops does a mod-8 counter need?</question>
      <answers>
        <answer>
          <text>3</text>
          <correct>1</correct>
          <feedback>2^3 = 8 states</feedback>
        </answer>
        <answer>
          <text>8</text>
          <correct>0</correct>
        </answer>
      </answers>
    </question-record>
  </data>
</hotpot-jquiz-file>
"#;

/// Byte spans of every element, outermost first.
pub fn element_spans(doc: &str) -> Vec<(String, usize, usize)> {
    let bytes = doc.as_bytes();
    let mut spans = Vec::new();
    for (start, _) in doc.match_indices('<') {
        let rest = &doc[start + 1..];
        if rest.starts_with(['/', '?', '!']) {
            continue;
        }
        let name_len = rest.find(['>', ' ']).unwrap();
        let name = &rest[..name_len];
        let close = format!("</{name}>");
        let end = start + doc[start..].find(&close).unwrap() + close.len();
        assert!(end <= bytes.len());
        spans.push((name.to_string(), start, end));
    }
    spans
}
