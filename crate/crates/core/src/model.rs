//! Domain types shared by the whole pipeline.
//!
//! Everything here is plain data. Validation of question-level invariants is
//! exposed through [`validate_question`], which reports every violation
//! instead of stopping at the first one.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// One answer option of a multiple-choice question.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alternative {
    pub text: String,
    pub correct: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feedback: Option<String>,
}

impl Alternative {
    pub fn new(text: impl Into<String>, correct: bool) -> Self {
        Self {
            text: text.into(),
            correct,
            feedback: None,
        }
    }

    pub fn with_feedback(mut self, feedback: impl Into<String>) -> Self {
        self.feedback = Some(feedback.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Question {
    pub id: String,
    pub stem: String,
    pub alternatives: Vec<Alternative>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub author: Option<String>,
    /// Teaching-module tag.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub topic: Option<String>,
    /// Creation time in UTC seconds.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub created: Option<i64>,
}

impl Question {
    pub fn new(
        id: impl Into<String>,
        stem: impl Into<String>,
        alternatives: Vec<Alternative>,
    ) -> Self {
        Self {
            id: id.into(),
            stem: stem.into(),
            alternatives,
            author: None,
            topic: None,
            created: None,
        }
    }

    /// Index of the first alternative flagged correct.
    pub fn correct_index(&self) -> Option<usize> {
        self.alternatives.iter().position(|a| a.correct)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuestionBank {
    pub title: String,
    pub questions: Vec<Question>,
    /// Identifiers of the input files the questions came from.
    pub sources: Vec<String>,
}

impl QuestionBank {
    pub fn new(title: impl Into<String>) -> Self {
        Self {
            title: title.into(),
            ..Self::default()
        }
    }

    pub fn len(&self) -> usize {
        self.questions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.questions.is_empty()
    }

    /// Returns the first id that occurs more than once, if any.
    pub fn duplicate_id(&self) -> Option<&str> {
        let mut seen = std::collections::HashSet::new();
        self.questions
            .iter()
            .map(|q| q.id.as_str())
            .find(|id| !seen.insert(*id))
    }
}

/// A violated question invariant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Issue {
    EmptyStem,
    TooFewAlternatives { found: usize },
    TooManyAlternatives { found: usize },
    EmptyAlternative { index: usize },
    MultipleCorrect { indices: Vec<usize> },
    NoCorrect,
}

impl Issue {
    /// Name of the offending field.
    pub fn field(&self) -> &'static str {
        match self {
            Issue::EmptyStem => "stem",
            Issue::EmptyAlternative { .. } => "alternatives[].text",
            _ => "alternatives",
        }
    }
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Issue::EmptyStem => write!(f, "stem is empty"),
            Issue::TooFewAlternatives { found } => {
                write!(f, "needs at least 2 alternatives, found {found}")
            }
            Issue::TooManyAlternatives { found } => {
                write!(f, "at most {MAX_ALTERNATIVES} alternatives allowed, found {found}")
            }
            Issue::EmptyAlternative { index } => {
                write!(f, "alternative {} has empty text", Letter::new(*index))
            }
            Issue::MultipleCorrect { indices } => {
                let letters: Vec<String> =
                    indices.iter().map(|i| Letter::new(*i).to_string()).collect();
                write!(f, "more than one correct alternative ({})", letters.join(", "))
            }
            Issue::NoCorrect => write!(f, "no alternative is marked correct"),
        }
    }
}

/// Upper bound on alternatives, one per letter a..z.
pub const MAX_ALTERNATIVES: usize = 26;

pub fn validate_question(q: &Question) -> Vec<Issue> {
    let mut issues = Vec::new();
    if q.stem.trim().is_empty() {
        issues.push(Issue::EmptyStem);
    }
    let n = q.alternatives.len();
    if n < 2 {
        issues.push(Issue::TooFewAlternatives { found: n });
    }
    if n > MAX_ALTERNATIVES {
        issues.push(Issue::TooManyAlternatives { found: n });
    }
    for (index, alt) in q.alternatives.iter().enumerate() {
        if alt.text.trim().is_empty() {
            issues.push(Issue::EmptyAlternative { index });
        }
    }
    let correct: Vec<usize> = q
        .alternatives
        .iter()
        .enumerate()
        .filter(|(_, a)| a.correct)
        .map(|(i, _)| i)
        .collect();
    match correct.len() {
        0 => issues.push(Issue::NoCorrect),
        1 => {}
        _ => issues.push(Issue::MultipleCorrect { indices: correct }),
    }
    issues
}

/// Answer letter; `a` is the first presented alternative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter(u8);

impl Letter {
    /// Panics if `index` is not below 26.
    pub fn new(index: usize) -> Self {
        assert!(index < MAX_ALTERNATIVES, "letter index {index} out of range");
        Letter(index as u8)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn as_char(self) -> char {
        (b'a' + self.0) as char
    }

    pub fn from_char(c: char) -> Option<Self> {
        let c = c.to_ascii_lowercase();
        c.is_ascii_lowercase().then(|| Letter(c as u8 - b'a'))
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

impl FromStr for Letter {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut chars = s.trim().chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => Letter::from_char(c).ok_or_else(|| ModelError::BadLetter(s.into())),
            _ => Err(ModelError::BadLetter(s.into())),
        }
    }
}

impl Serialize for Letter {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_char(self.as_char())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AssemblyConfig {
    pub seed: u64,
    /// `None` keeps every question.
    pub subset_size: Option<usize>,
    pub shuffle_questions: bool,
    pub shuffle_answers: bool,
    pub title: String,
    pub subtitle: String,
    pub instructions: String,
    pub answer_table: bool,
}

impl AssemblyConfig {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            subset_size: None,
            shuffle_questions: false,
            shuffle_answers: false,
            title: String::new(),
            subtitle: String::new(),
            instructions: String::new(),
            answer_table: false,
        }
    }
}

/// Position (1-based) to letter of the correct alternative.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct AnswerKey {
    pub entries: BTreeMap<usize, Letter>,
}

impl AnswerKey {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, position: usize) -> Option<Letter> {
        self.entries.get(&position).copied()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TestItem {
    pub position: usize,
    /// Alternatives are stored in presented order.
    pub question: Question,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AssembledTest {
    pub config: AssemblyConfig,
    pub items: Vec<TestItem>,
    pub key: AnswerKey,
}

impl AssembledTest {
    /// The presented questions as a bank, in test order.
    pub fn to_bank(&self) -> QuestionBank {
        QuestionBank {
            title: self.config.title.clone(),
            questions: self.items.iter().map(|i| i.question.clone()).collect(),
            sources: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResponseSheet {
    pub student: String,
    pub test_id: String,
    /// `None` means the position was left blank.
    pub answers: BTreeMap<usize, Option<Letter>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TestScore {
    pub correct: usize,
    pub wrong: usize,
    pub blank: usize,
    pub percentage: f64,
}

/// Cohort a grade belongs to.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Group {
    /// Control group: final exam only.
    Cg,
    /// Teacher-made tests.
    Tg,
    /// Took part in the method without posting questions.
    MgP,
    /// Took part and posted questions.
    MgI,
    Other(String),
}

impl Group {
    pub fn label(&self) -> &str {
        match self {
            Group::Cg => "CG",
            Group::Tg => "TG",
            Group::MgP => "MG-P",
            Group::MgI => "MG-I",
            Group::Other(s) => s,
        }
    }
}

impl From<&str> for Group {
    fn from(s: &str) -> Self {
        match s.trim() {
            "CG" => Group::Cg,
            "TG" => Group::Tg,
            "MG-P" => Group::MgP,
            "MG-I" => Group::MgI,
            other => Group::Other(other.to_string()),
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl Serialize for Group {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

/// ECTS letter bucket used for grade points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LetterBucket {
    APlus,
    A,
    BC,
    D,
    EF,
}

impl LetterBucket {
    /// Highest bucket first.
    pub const ALL: [LetterBucket; 5] = [
        LetterBucket::APlus,
        LetterBucket::A,
        LetterBucket::BC,
        LetterBucket::D,
        LetterBucket::EF,
    ];

    pub fn points(self) -> u8 {
        match self {
            LetterBucket::APlus => 4,
            LetterBucket::A => 3,
            LetterBucket::BC => 2,
            LetterBucket::D => 1,
            LetterBucket::EF => 0,
        }
    }

    pub fn from_points(points: u8) -> Option<Self> {
        match points {
            4 => Some(LetterBucket::APlus),
            3 => Some(LetterBucket::A),
            2 => Some(LetterBucket::BC),
            1 => Some(LetterBucket::D),
            0 => Some(LetterBucket::EF),
            _ => None,
        }
    }

    /// Accepts single ECTS letters (`B`, `F`, ...) and the combined labels.
    pub fn from_letter(s: &str) -> Option<Self> {
        match s.trim() {
            "A+" => Some(LetterBucket::APlus),
            "A" => Some(LetterBucket::A),
            "B" | "C" | "B/C" => Some(LetterBucket::BC),
            "D" => Some(LetterBucket::D),
            "E" | "F" | "E/F" => Some(LetterBucket::EF),
            _ => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            LetterBucket::APlus => "A+",
            LetterBucket::A => "A",
            LetterBucket::BC => "B/C",
            LetterBucket::D => "D",
            LetterBucket::EF => "E/F",
        }
    }
}

impl fmt::Display for LetterBucket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl Serialize for LetterBucket {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GradeRecord {
    student: String,
    group: Group,
    points: u8,
    letter_bucket: LetterBucket,
}

impl GradeRecord {
    /// Rejects a `points`/`bucket` pair that disagrees with the fixed mapping.
    pub fn new(
        student: impl Into<String>,
        group: Group,
        points: u8,
        letter_bucket: LetterBucket,
    ) -> Result<Self, ModelError> {
        if LetterBucket::from_points(points) != Some(letter_bucket) {
            return Err(ModelError::InconsistentGrade {
                points,
                bucket: letter_bucket,
            });
        }
        Ok(Self {
            student: student.into(),
            group,
            points,
            letter_bucket,
        })
    }

    pub fn from_points(
        student: impl Into<String>,
        group: Group,
        points: u8,
    ) -> Result<Self, ModelError> {
        let bucket = LetterBucket::from_points(points).ok_or(ModelError::PointsOutOfRange(points))?;
        Self::new(student, group, points, bucket)
    }

    pub fn from_bucket(student: impl Into<String>, group: Group, bucket: LetterBucket) -> Self {
        Self {
            student: student.into(),
            group,
            points: bucket.points(),
            letter_bucket: bucket,
        }
    }

    pub fn student(&self) -> &str {
        &self.student
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn points(&self) -> u8 {
        self.points
    }

    pub fn letter_bucket(&self) -> LetterBucket {
        self.letter_bucket
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupSummary {
    pub group: String,
    pub n: usize,
    pub mean: f64,
    /// Population standard deviation (divisor n).
    pub std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnovaResult {
    pub k: usize,
    pub n_total: usize,
    pub ss_between: f64,
    pub ss_within: f64,
    pub df_between: usize,
    pub df_within: usize,
    pub ms_between: f64,
    pub ms_within: f64,
    pub f: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TukeyContrast {
    pub pair: (String, String),
    pub difference: f64,
    pub se: f64,
    pub standardized: f64,
    pub critical: f64,
    pub p: f64,
    pub significant: bool,
}

/// Question-count buckets: exactly 1, 2 to 4, 5 to 9, 10 or more.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContributionBuckets {
    pub one: f64,
    pub two_to_four: f64,
    pub five_to_nine: f64,
    pub ten_or_more: f64,
}

impl ContributionBuckets {
    pub fn total(&self) -> f64 {
        self.one + self.two_to_four + self.five_to_nine + self.ten_or_more
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContributionStats {
    pub counts: Vec<u32>,
    pub buckets: ContributionBuckets,
    pub mean: f64,
    pub std: f64,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("grade points {points} do not match letter bucket {bucket}")]
    InconsistentGrade { points: u8, bucket: LetterBucket },
    #[error("grade points must be 0..=4, got {0}")]
    PointsOutOfRange(u8),
    #[error("not an answer letter: {0:?}")]
    BadLetter(String),
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(stem: &str, alts: &[(&str, bool)]) -> Question {
        Question::new(
            "q1",
            stem,
            alts.iter().map(|(t, c)| Alternative::new(*t, *c)).collect(),
        )
    }

    #[test]
    fn well_formed_question_has_no_issues() {
        let q = q("2+2?", &[("4", true), ("3", false), ("5", false)]);
        assert!(validate_question(&q).is_empty());
    }

    #[test]
    fn two_correct_flags() {
        let q = q("2+2?", &[("4", true), ("four", true), ("5", false)]);
        assert_eq!(
            validate_question(&q),
            vec![Issue::MultipleCorrect { indices: vec![0, 1] }]
        );
    }

    #[test]
    fn empty_stem_and_single_alternative_reported_together() {
        let q = q("  ", &[("4", true)]);
        assert_eq!(
            validate_question(&q),
            vec![Issue::EmptyStem, Issue::TooFewAlternatives { found: 1 }]
        );
        assert_eq!(Issue::EmptyStem.field(), "stem");
    }

    #[test]
    fn letter_points_bijection() {
        let mut seen = std::collections::HashSet::new();
        for b in LetterBucket::ALL {
            assert_eq!(LetterBucket::from_points(b.points()), Some(b));
            assert!(seen.insert(b.points()));
        }
        assert_eq!(LetterBucket::from_points(5), None);
    }

    #[test]
    fn inconsistent_grade_rejected() {
        assert!(GradeRecord::new("s", Group::Cg, 4, LetterBucket::A).is_err());
        assert!(GradeRecord::new("s", Group::Cg, 3, LetterBucket::A).is_ok());
        assert_eq!(
            GradeRecord::from_points("s", Group::Cg, 7),
            Err(ModelError::PointsOutOfRange(7))
        );
    }

    #[test]
    fn letters() {
        assert_eq!(Letter::new(0).to_string(), "a");
        assert_eq!("C".parse::<Letter>().unwrap().index(), 2);
        assert!("ab".parse::<Letter>().is_err());
        assert!("1".parse::<Letter>().is_err());
    }

    #[test]
    fn group_labels_round_trip() {
        for label in ["CG", "TG", "MG-P", "MG-I", "night-shift"] {
            assert_eq!(Group::from(label).label(), label);
        }
    }
}
