//! Reader and writer for the JQuiz-style XML question format.
//!
//! Accepted documents follow this layout (elements in this order, nothing
//! else allowed):
//!
//! ```text
//! <hotpot-jquiz-file>
//!   <data>
//!     <title>..</title>
//!     <question-record id=".." author=".." topic=".." created="..">   0..N, attributes optional
//!       <question>..</question>
//!       <answers>
//!         <answer>                                                     2..26
//!           <text>..</text>
//!           <correct>0|1</correct>
//!           <feedback>..</feedback>                                    optional
//!         </answer>
//!       </answers>
//!     </question-record>
//!   </data>
//! </hotpot-jquiz-file>
//! ```
//!
//! Unknown elements or attributes are rejected rather than skipped.

use std::fmt::Write as _;

use quick_xml::events::{BytesRef, Event};
use quick_xml::Reader;
use thiserror::Error;

use crate::model::{validate_question, Alternative, Issue, Question, QuestionBank, MAX_ALTERNATIVES};

pub const ROOT: &str = "hotpot-jquiz-file";

const RECORD_ATTRS: [&str; 4] = ["id", "author", "topic", "created"];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum JqzError {
    #[error("malformed XML: {0}")]
    MalformedXml(String),
    #[error("schema violation at {path}: {message}")]
    SchemaViolation { path: String, message: String },
    #[error("question {question} has more than one correct answer")]
    MultipleCorrect { question: usize },
    #[error("question {question} has no correct answer")]
    NoCorrect { question: usize },
    #[error("question {question} has an empty statement")]
    EmptyStem { question: usize },
    #[error("question {question}, answer {answer} has empty text")]
    EmptyAlternative { question: usize, answer: usize },
    #[error("duplicate question id {id:?}")]
    DuplicateId { id: String },
}

fn schema(path: &str, message: impl Into<String>) -> JqzError {
    JqzError::SchemaViolation {
        path: path.to_string(),
        message: message.into(),
    }
}

#[derive(Debug)]
struct Element {
    name: String,
    attrs: Vec<(String, String)>,
    children: Vec<Node>,
}

#[derive(Debug)]
enum Node {
    Element(Element),
    Text(String),
}

impl Element {
    fn elements(&self) -> impl Iterator<Item = &Element> {
        self.children.iter().filter_map(|n| match n {
            Node::Element(e) => Some(e),
            Node::Text(_) => None,
        })
    }

    /// Text content of a leaf element.
    fn leaf_text(&self, path: &str) -> Result<String, JqzError> {
        let mut out = String::new();
        for child in &self.children {
            match child {
                Node::Text(t) => out.push_str(t),
                Node::Element(e) => {
                    return Err(schema(path, format!("unexpected element <{}>", e.name)))
                }
            }
        }
        Ok(out)
    }

    /// Rejects non-whitespace text inside a container element.
    fn check_container(&self, path: &str) -> Result<(), JqzError> {
        for child in &self.children {
            if let Node::Text(t) = child {
                if !t.chars().all(is_xml_space) {
                    return Err(schema(path, "unexpected text content"));
                }
            }
        }
        Ok(())
    }

    fn check_no_attrs(&self, path: &str) -> Result<(), JqzError> {
        match self.attrs.first() {
            Some((name, _)) => Err(schema(path, format!("unexpected attribute {name:?}"))),
            None => Ok(()),
        }
    }
}

fn is_xml_space(c: char) -> bool {
    matches!(c, ' ' | '\t' | '\n' | '\r')
}

fn xml_err(e: impl std::fmt::Display) -> JqzError {
    JqzError::MalformedXml(e.to_string())
}

fn resolve_ref(r: &BytesRef<'_>) -> Result<char, JqzError> {
    if let Some(c) = r.resolve_char_ref().map_err(xml_err)? {
        return Ok(c);
    }
    let name = r.decode().map_err(xml_err)?;
    match name.as_ref() {
        "lt" => Ok('<'),
        "gt" => Ok('>'),
        "amp" => Ok('&'),
        "apos" => Ok('\''),
        "quot" => Ok('"'),
        other => Err(JqzError::MalformedXml(format!("unknown entity &{other};"))),
    }
}

fn push_text(stack: &mut [Element], text: &str) -> Result<(), JqzError> {
    match stack.last_mut() {
        Some(top) => {
            if let Some(Node::Text(prev)) = top.children.last_mut() {
                prev.push_str(text);
            } else {
                top.children.push(Node::Text(text.to_string()));
            }
            Ok(())
        }
        None if text.chars().all(is_xml_space) => Ok(()),
        None => Err(JqzError::MalformedXml("text outside the root element".into())),
    }
}

fn read_tree(text: &str) -> Result<Element, JqzError> {
    let mut reader = Reader::from_str(text);
    let config = reader.config_mut();
    config.expand_empty_elements = true;
    config.check_end_names = true;
    config.check_comments = true;

    let mut stack: Vec<Element> = Vec::new();
    let mut root: Option<Element> = None;
    loop {
        let event = reader.read_event().map_err(|e| {
            JqzError::MalformedXml(format!("{e} (at byte {})", reader.error_position()))
        })?;
        match event {
            Event::Decl(decl) => {
                if let Some(enc) = decl.encoding() {
                    let enc = enc.map_err(xml_err)?;
                    if !enc.eq_ignore_ascii_case(b"utf-8") {
                        return Err(JqzError::MalformedXml(format!(
                            "unsupported encoding {:?}, only UTF-8 is accepted",
                            String::from_utf8_lossy(&enc)
                        )));
                    }
                }
            }
            Event::Start(start) => {
                if root.is_some() {
                    return Err(JqzError::MalformedXml("content after the root element".into()));
                }
                let name = std::str::from_utf8(start.name().as_ref())
                    .map_err(xml_err)?
                    .to_string();
                let mut attrs = Vec::new();
                for attr in start.attributes() {
                    let attr = attr.map_err(xml_err)?;
                    let key = std::str::from_utf8(attr.key.as_ref())
                        .map_err(xml_err)?
                        .to_string();
                    let value = attr.unescape_value().map_err(xml_err)?.into_owned();
                    attrs.push((key, value));
                }
                stack.push(Element {
                    name,
                    attrs,
                    children: Vec::new(),
                });
            }
            Event::End(_) => {
                let done = stack
                    .pop()
                    .ok_or_else(|| JqzError::MalformedXml("unbalanced end tag".into()))?;
                match stack.last_mut() {
                    Some(parent) => parent.children.push(Node::Element(done)),
                    None => root = Some(done),
                }
            }
            Event::Text(t) => {
                let s = t.xml10_content().map_err(xml_err)?;
                if root.is_some() && !s.chars().all(is_xml_space) {
                    return Err(JqzError::MalformedXml("text after the root element".into()));
                }
                push_text(&mut stack, &s)?;
            }
            Event::CData(c) => {
                let s = c.decode().map_err(xml_err)?;
                if stack.is_empty() {
                    return Err(JqzError::MalformedXml("CDATA outside the root element".into()));
                }
                push_text(&mut stack, &s)?;
            }
            Event::GeneralRef(r) => {
                let c = resolve_ref(&r)?;
                if stack.is_empty() {
                    return Err(JqzError::MalformedXml("reference outside the root element".into()));
                }
                push_text(&mut stack, c.encode_utf8(&mut [0; 4]))?;
            }
            Event::DocType(_) => return Err(schema("/", "DOCTYPE declarations are not accepted")),
            Event::Comment(_) | Event::PI(_) => {}
            // expand_empty_elements turns these into Start/End pairs.
            Event::Empty(_) => unreachable!("empty elements are expanded"),
            Event::Eof => break,
        }
    }
    if !stack.is_empty() {
        return Err(JqzError::MalformedXml(format!(
            "unexpected end of input inside <{}>",
            stack.last().map(|e| e.name.as_str()).unwrap_or_default()
        )));
    }
    root.ok_or_else(|| JqzError::MalformedXml("document has no root element".into()))
}

/// Walks the children of a container element in schema order.
struct Children<'a> {
    items: Vec<&'a Element>,
    next: usize,
    path: &'a str,
}

impl<'a> Children<'a> {
    fn new(parent: &'a Element, path: &'a str) -> Result<Self, JqzError> {
        parent.check_container(path)?;
        Ok(Self {
            items: parent.elements().collect(),
            next: 0,
            path,
        })
    }

    fn peek_is(&self, name: &str) -> bool {
        self.items.get(self.next).is_some_and(|e| e.name == name)
    }

    fn required(&mut self, name: &str) -> Result<&'a Element, JqzError> {
        match self.items.get(self.next) {
            Some(e) if e.name == name => {
                self.next += 1;
                Ok(e)
            }
            Some(e) => Err(schema(
                self.path,
                format!("expected <{name}>, found <{}>", e.name),
            )),
            None => Err(schema(self.path, format!("missing required element <{name}>"))),
        }
    }

    fn optional(&mut self, name: &str) -> Option<&'a Element> {
        if self.peek_is(name) {
            self.next += 1;
            Some(self.items[self.next - 1])
        } else {
            None
        }
    }

    fn finish(self) -> Result<(), JqzError> {
        match self.items.get(self.next) {
            Some(e) => Err(schema(self.path, format!("unexpected element <{}>", e.name))),
            None => Ok(()),
        }
    }
}

/// Parses a document, naming synthesized ids after `source`.
pub fn parse_bank_from(doc: &[u8], source: &str) -> Result<QuestionBank, JqzError> {
    let doc = doc.strip_prefix(b"\xEF\xBB\xBF").unwrap_or(doc);
    let text = std::str::from_utf8(doc)
        .map_err(|e| JqzError::MalformedXml(format!("input is not valid UTF-8: {e}")))?;
    let root = read_tree(text)?;

    let root_path = format!("/{}", root.name);
    if root.name != ROOT {
        return Err(schema(&root_path, format!("root element must be <{ROOT}>")));
    }
    root.check_no_attrs(&root_path)?;
    let mut top = Children::new(&root, &root_path)?;
    let data = top.required("data")?;
    top.finish()?;

    let data_path = format!("{root_path}/data");
    data.check_no_attrs(&data_path)?;
    let mut items = Children::new(data, &data_path)?;
    let title_el = items.required("title")?;
    let title_path = format!("{data_path}/title");
    title_el.check_no_attrs(&title_path)?;
    let title = title_el.leaf_text(&title_path)?;

    let mut questions: Vec<Question> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    while let Some(record) = items.optional("question-record") {
        let ordinal = questions.len() + 1;
        let path = format!("{data_path}/question-record[{ordinal}]");
        let q = parse_record(record, &path, ordinal, source)?;
        if !seen.insert(q.id.clone()) {
            return Err(JqzError::DuplicateId { id: q.id });
        }
        questions.push(q);
    }
    items.finish()?;

    Ok(QuestionBank {
        title,
        questions,
        sources: vec![source.to_string()],
    })
}

/// Parses a document with the anonymous source name `input`.
pub fn parse_bank(doc: &[u8]) -> Result<QuestionBank, JqzError> {
    parse_bank_from(doc, "input")
}

fn parse_record(
    record: &Element,
    path: &str,
    ordinal: usize,
    source: &str,
) -> Result<Question, JqzError> {
    let mut id = None;
    let mut author = None;
    let mut topic = None;
    let mut created = None;
    for (key, value) in &record.attrs {
        match key.as_str() {
            "id" => id = Some(value.clone()),
            "author" => author = Some(value.clone()),
            "topic" => topic = Some(value.clone()),
            "created" => {
                let secs = value
                    .trim()
                    .parse::<i64>()
                    .map_err(|_| schema(path, format!("created must be an integer, got {value:?}")))?;
                created = Some(secs);
            }
            other => {
                return Err(schema(
                    path,
                    format!("unexpected attribute {other:?} (allowed: {})", RECORD_ATTRS.join(", ")),
                ))
            }
        }
    }

    let mut parts = Children::new(record, path)?;
    let stem_el = parts.required("question")?;
    let answers_el = parts.required("answers")?;
    parts.finish()?;

    let stem_path = format!("{path}/question");
    stem_el.check_no_attrs(&stem_path)?;
    let stem = stem_el.leaf_text(&stem_path)?;

    let answers_path = format!("{path}/answers");
    answers_el.check_no_attrs(&answers_path)?;
    let mut answer_items = Children::new(answers_el, &answers_path)?;
    let mut alternatives = Vec::new();
    while let Some(answer) = answer_items.optional("answer") {
        let apath = format!("{answers_path}/answer[{}]", alternatives.len() + 1);
        alternatives.push(parse_answer(answer, &apath)?);
    }
    answer_items.finish()?;
    if !(2..=MAX_ALTERNATIVES).contains(&alternatives.len()) {
        return Err(schema(
            &answers_path,
            format!(
                "expected 2 to {MAX_ALTERNATIVES} <answer> elements, found {}",
                alternatives.len()
            ),
        ));
    }

    let question = Question {
        id: id.unwrap_or_else(|| format!("{source}#{ordinal}")),
        stem,
        alternatives,
        author,
        topic,
        created,
    };
    if let Some(issue) = validate_question(&question).into_iter().next() {
        return Err(match issue {
            Issue::EmptyStem => JqzError::EmptyStem { question: ordinal },
            Issue::MultipleCorrect { .. } => JqzError::MultipleCorrect { question: ordinal },
            Issue::NoCorrect => JqzError::NoCorrect { question: ordinal },
            Issue::EmptyAlternative { index } => JqzError::EmptyAlternative {
                question: ordinal,
                answer: index + 1,
            },
            // Cardinality was checked above.
            Issue::TooFewAlternatives { .. } | Issue::TooManyAlternatives { .. } => {
                schema(&answers_path, issue.to_string())
            }
        });
    }
    Ok(question)
}

fn parse_answer(answer: &Element, path: &str) -> Result<Alternative, JqzError> {
    answer.check_no_attrs(path)?;
    let mut parts = Children::new(answer, path)?;
    let text_el = parts.required("text")?;
    let correct_el = parts.required("correct")?;
    let feedback_el = parts.optional("feedback");
    parts.finish()?;

    let text_path = format!("{path}/text");
    text_el.check_no_attrs(&text_path)?;
    let text = text_el.leaf_text(&text_path)?;

    let correct_path = format!("{path}/correct");
    correct_el.check_no_attrs(&correct_path)?;
    let correct = match correct_el.leaf_text(&correct_path)?.trim() {
        "1" => true,
        "0" => false,
        other => return Err(schema(&correct_path, format!("expected 0 or 1, got {other:?}"))),
    };

    let feedback = match feedback_el {
        Some(el) => {
            let fpath = format!("{path}/feedback");
            el.check_no_attrs(&fpath)?;
            Some(el.leaf_text(&fpath)?)
        }
        None => None,
    };
    Ok(Alternative {
        text,
        correct,
        feedback,
    })
}

fn escape_into(out: &mut String, s: &str, attribute: bool) {
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' if attribute => out.push_str("&quot;"),
            '\n' | '\t' if attribute => {
                let _ = write!(out, "&#{};", c as u32);
            }
            '\n' | '\t' => out.push(c),
            c if c.is_control() => {
                let _ = write!(out, "&#{};", c as u32);
            }
            c => out.push(c),
        }
    }
}

fn leaf(out: &mut String, indent: usize, name: &str, text: &str) {
    out.push_str(&" ".repeat(indent));
    let _ = write!(out, "<{name}>");
    escape_into(out, text, false);
    let _ = writeln!(out, "</{name}>");
}

/// Writes the canonical form: fixed element and attribute order, two-space
/// indentation, UTF-8, LF line endings.
pub fn serialize_bank(bank: &QuestionBank) -> Vec<u8> {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(out, "<{ROOT}>");
    out.push_str("  <data>\n");
    leaf(&mut out, 4, "title", &bank.title);
    for q in &bank.questions {
        out.push_str("    <question-record");
        let created = q.created.map(|c| c.to_string());
        let attrs = [
            ("id", Some(q.id.as_str())),
            ("author", q.author.as_deref()),
            ("topic", q.topic.as_deref()),
            ("created", created.as_deref()),
        ];
        for (name, value) in attrs {
            if let Some(value) = value {
                let _ = write!(out, " {name}=\"");
                escape_into(&mut out, value, true);
                out.push('"');
            }
        }
        out.push_str(">\n");
        leaf(&mut out, 6, "question", &q.stem);
        out.push_str("      <answers>\n");
        for alt in &q.alternatives {
            out.push_str("        <answer>\n");
            leaf(&mut out, 10, "text", &alt.text);
            leaf(&mut out, 10, "correct", if alt.correct { "1" } else { "0" });
            if let Some(feedback) = &alt.feedback {
                leaf(&mut out, 10, "feedback", feedback);
            }
            out.push_str("        </answer>\n");
        }
        out.push_str("      </answers>\n");
        out.push_str("    </question-record>\n");
    }
    out.push_str("  </data>\n");
    let _ = writeln!(out, "</{ROOT}>");
    out.into_bytes()
}
