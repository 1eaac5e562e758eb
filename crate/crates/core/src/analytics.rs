//! Scoring, best-k aggregation, course blending and the ECTS grade table.

use serde::Serialize;
use thiserror::Error;

use crate::model::{AnswerKey, ResponseSheet, TestScore};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalyticsError {
    #[error("response for position {position} has no entry in the answer key")]
    PositionMismatch { position: usize },
    #[error("no test results to aggregate")]
    EmptyList,
    #[error("{what} = {value} is outside {range}")]
    RangeError {
        what: &'static str,
        value: f64,
        range: &'static str,
    },
}

fn check_range(what: &'static str, value: f64, lo: f64, hi: f64, range: &'static str) -> Result<(), AnalyticsError> {
    if value.is_nan() || value < lo || value > hi {
        return Err(AnalyticsError::RangeError { what, value, range });
    }
    Ok(())
}

/// Blank answers always score zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScoringPolicy {
    pub points_per_correct: f64,
    pub penalty_per_wrong: f64,
}

impl Default for ScoringPolicy {
    fn default() -> Self {
        Self {
            points_per_correct: 1.0,
            penalty_per_wrong: 0.0,
        }
    }
}

impl ScoringPolicy {
    pub fn with_penalty(penalty_per_wrong: f64) -> Result<Self, AnalyticsError> {
        check_range("penalty", penalty_per_wrong, 0.0, f64::INFINITY, "[0, inf)")?;
        Ok(Self {
            penalty_per_wrong,
            ..Self::default()
        })
    }
}

/// Percentage is `100 * max(0, correct*ppc - wrong*penalty) / (n*ppc)` over
/// the `n` keyed positions.
pub fn score_response(
    sheet: &ResponseSheet,
    key: &AnswerKey,
    policy: &ScoringPolicy,
) -> Result<TestScore, AnalyticsError> {
    if let Some(&position) = sheet.answers.keys().find(|p| !key.entries.contains_key(p)) {
        return Err(AnalyticsError::PositionMismatch { position });
    }
    let (mut correct, mut wrong, mut blank) = (0, 0, 0);
    for (position, expected) in &key.entries {
        match sheet.answers.get(position).copied().flatten() {
            None => blank += 1,
            Some(given) if given == *expected => correct += 1,
            Some(_) => wrong += 1,
        }
    }
    let n = key.len();
    let raw = (correct as f64 * policy.points_per_correct - wrong as f64 * policy.penalty_per_wrong).max(0.0);
    let percentage = if n == 0 {
        0.0
    } else {
        100.0 * raw / (n as f64 * policy.points_per_correct)
    };
    Ok(TestScore {
        correct,
        wrong,
        blank,
        percentage,
    })
}

/// Mean of the `k` best results, or of all results when fewer than `k`
/// exist.
pub fn aggregate_best_k(test_pcts: &[f64], k: usize) -> Result<f64, AnalyticsError> {
    if test_pcts.is_empty() {
        return Err(AnalyticsError::EmptyList);
    }
    if k == 0 {
        return Err(AnalyticsError::RangeError {
            what: "k",
            value: 0.0,
            range: "[1, inf)",
        });
    }
    let mut sorted = test_pcts.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let best = &sorted[..k.min(sorted.len())];
    Ok(best.iter().sum::<f64>() / best.len() as f64)
}

/// Default share of the course grade carried by class tests.
pub const DEFAULT_TEST_WEIGHT: f64 = 0.15;

pub fn course_percentage(test_component: f64, exam_component: f64, weight: f64) -> Result<f64, AnalyticsError> {
    check_range("test component", test_component, 0.0, 100.0, "[0, 100]")?;
    check_range("exam component", exam_component, 0.0, 100.0, "[0, 100]")?;
    check_range("weight", weight, 0.0, 1.0, "[0, 1]")?;
    Ok(weight * test_component + (1.0 - weight) * exam_component)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EctsBand {
    /// Inclusive lower bound in percent.
    pub lower: f64,
    /// Exclusive upper bound, except for the top band which is closed.
    pub upper: f64,
    pub spanish: &'static str,
    pub letter: &'static str,
    pub points: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EctsScale {
    /// Highest band first.
    pub bands: Vec<EctsBand>,
}

impl Default for EctsScale {
    fn default() -> Self {
        let band = |lower, upper, spanish, letter, points| EctsBand {
            lower,
            upper,
            spanish,
            letter,
            points,
        };
        Self {
            bands: vec![
                band(95.0, 100.0, "MH", "A+", 4),
                band(85.0, 95.0, "SB", "A", 3),
                band(65.0, 85.0, "NT", "B/C", 2),
                band(50.0, 65.0, "AP", "D", 1),
                band(0.0, 50.0, "SS", "E/F", 0),
            ],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EctsGrade {
    pub spanish: &'static str,
    pub letter: &'static str,
    pub points: u8,
}

pub fn pct_to_grade(pct: f64, scale: &EctsScale) -> Result<EctsGrade, AnalyticsError> {
    check_range("percentage", pct, 0.0, 100.0, "[0, 100]")?;
    let top = scale.bands.first().map(|b| b.upper);
    scale
        .bands
        .iter()
        .find(|b| pct >= b.lower && (pct < b.upper || Some(b.upper) == top && pct <= b.upper))
        .map(|b| EctsGrade {
            spanish: b.spanish,
            letter: b.letter,
            points: b.points,
        })
        .ok_or(AnalyticsError::RangeError {
            what: "percentage",
            value: pct,
            range: "scale bands",
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Letter;
    use std::collections::BTreeMap;

    fn key(n: usize) -> AnswerKey {
        AnswerKey {
            entries: (1..=n).map(|p| (p, Letter::new(p % 4))).collect(),
        }
    }

    fn sheet(answers: BTreeMap<usize, Option<Letter>>) -> ResponseSheet {
        ResponseSheet {
            student: "s1".into(),
            test_id: "t1".into(),
            answers,
        }
    }

    #[test]
    fn perfect_sheet() {
        let k = key(30);
        let s = sheet(k.entries.iter().map(|(p, l)| (*p, Some(*l))).collect());
        let score = score_response(&s, &k, &ScoringPolicy::default()).unwrap();
        assert_eq!(score.percentage, 100.0);
        assert_eq!((score.correct, score.wrong, score.blank), (30, 0, 0));
    }

    #[test]
    fn blank_sheet() {
        let score = score_response(&sheet(BTreeMap::new()), &key(30), &ScoringPolicy::default()).unwrap();
        assert_eq!(score.percentage, 0.0);
        assert_eq!(score.blank, 30);
    }

    #[test]
    fn penalty_quarter() {
        let k = key(30);
        let s = sheet(
            k.entries
                .iter()
                .map(|(p, l)| {
                    let given = if *p <= 20 { *l } else { Letter::new((l.index() + 1) % 4) };
                    (*p, Some(given))
                })
                .collect(),
        );
        let score = score_response(&s, &k, &ScoringPolicy::with_penalty(0.25).unwrap()).unwrap();
        assert_eq!((score.correct, score.wrong), (20, 10));
        // (20 - 10 * 0.25) / 30
        assert!((score.percentage - 58.333_333).abs() < 1e-4);
    }

    #[test]
    fn raw_score_floors_at_zero() {
        let k = key(4);
        let s = sheet((1..=4).map(|p| (p, Some(Letter::new((p + 1) % 4)))).collect());
        let score = score_response(&s, &k, &ScoringPolicy::with_penalty(1.0).unwrap()).unwrap();
        assert_eq!(score.percentage, 0.0);
    }

    #[test]
    fn unknown_position() {
        let s = sheet([(31, Some(Letter::new(0)))].into_iter().collect());
        assert_eq!(
            score_response(&s, &key(30), &ScoringPolicy::default()),
            Err(AnalyticsError::PositionMismatch { position: 31 })
        );
    }

    #[test]
    fn best_three_of_five() {
        assert_eq!(aggregate_best_k(&[40.0, 70.0, 90.0, 55.0, 80.0], 3).unwrap(), 80.0);
        assert_eq!(aggregate_best_k(&[60.0], 3).unwrap(), 60.0);
        assert_eq!(aggregate_best_k(&[50.0; 5], 3).unwrap(), 50.0);
        assert_eq!(aggregate_best_k(&[], 3), Err(AnalyticsError::EmptyList));
    }

    #[test]
    fn blend() {
        assert!((course_percentage(80.0, 60.0, 0.15).unwrap() - 63.0).abs() < 1e-12);
        assert_eq!(course_percentage(80.0, 60.0, 0.0).unwrap(), 60.0);
        assert_eq!(course_percentage(80.0, 60.0, 1.0).unwrap(), 80.0);
        assert!(course_percentage(101.0, 60.0, 0.15).is_err());
        assert!(course_percentage(80.0, 60.0, 1.5).is_err());
    }

    #[test]
    fn ects_table() {
        let scale = EctsScale::default();
        let g = |p| pct_to_grade(p, &scale).unwrap();
        assert_eq!((g(96.0).spanish, g(96.0).letter, g(96.0).points), ("MH", "A+", 4));
        assert_eq!((g(50.0).spanish, g(50.0).letter, g(50.0).points), ("AP", "D", 1));
        assert_eq!((g(0.0).spanish, g(0.0).letter, g(0.0).points), ("SS", "E/F", 0));
        assert_eq!(g(85.0).letter, "A");
        assert_eq!(g(100.0).points, 4);
        assert_eq!(g(94.999).points, 3);
        assert!(pct_to_grade(-0.1, &scale).is_err());
        assert!(pct_to_grade(100.1, &scale).is_err());
        assert!(pct_to_grade(f64::NAN, &scale).is_err());
    }

    #[test]
    fn bands_partition_and_points_decrease() {
        let scale = EctsScale::default();
        for pair in scale.bands.windows(2) {
            assert_eq!(pair[0].lower, pair[1].upper);
            assert!(pair[0].points > pair[1].points);
        }
        assert_eq!(scale.bands.first().unwrap().upper, 100.0);
        assert_eq!(scale.bands.last().unwrap().lower, 0.0);
    }
}
