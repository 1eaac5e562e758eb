//! Seeded test assembly.
//!
//! One generator seeded from the config is consumed in a fixed order:
//!
//! 1. subset selection (partial Fisher-Yates over question indices), only
//!    when a subset size is given; the chosen questions keep bank order;
//! 2. question shuffle, only when enabled;
//! 3. alternative shuffle for each question in output order, only when
//!    enabled.
//!
//! A disabled stage draws nothing, so toggling a later stage never changes
//! the outcome of an earlier one.

mod rng;

pub use rng::RngState;

use thiserror::Error;

use crate::model::{AnswerKey, AssembledTest, AssemblyConfig, Letter, QuestionBank, TestItem};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AssembleError {
    #[error("cannot assemble a test from an empty bank")]
    EmptyBank,
    #[error("subset of {requested} questions requested from a bank of {available}")]
    SubsetTooLarge { requested: usize, available: usize },
    #[error("question {id:?} does not have exactly one correct alternative")]
    InvalidQuestion { id: String },
}

/// Picks `m` distinct indices out of `0..n`, returned in ascending order.
pub fn select_subset(n: usize, m: usize, rng: &mut RngState) -> Vec<usize> {
    let mut indices: Vec<usize> = (0..n).collect();
    for i in 0..m {
        let j = i + rng.bounded((n - i) as u64) as usize;
        indices.swap(i, j);
    }
    let mut chosen = indices[..m].to_vec();
    chosen.sort_unstable();
    chosen
}

pub fn assemble_test(bank: &QuestionBank, cfg: &AssemblyConfig) -> Result<AssembledTest, AssembleError> {
    if bank.is_empty() {
        return Err(AssembleError::EmptyBank);
    }
    let mut rng = RngState::new(cfg.seed);

    let mut order: Vec<usize> = match cfg.subset_size {
        Some(m) if m == 0 || m > bank.len() => {
            return Err(AssembleError::SubsetTooLarge {
                requested: m,
                available: bank.len(),
            })
        }
        Some(m) => select_subset(bank.len(), m, &mut rng),
        None => (0..bank.len()).collect(),
    };

    if cfg.shuffle_questions {
        rng.shuffle(&mut order);
    }

    let mut items = Vec::with_capacity(order.len());
    let mut key = AnswerKey::default();
    for (slot, &index) in order.iter().enumerate() {
        let mut question = bank.questions[index].clone();
        if cfg.shuffle_answers {
            rng.shuffle(&mut question.alternatives);
        }
        let mut correct = question.alternatives.iter().enumerate().filter(|(_, a)| a.correct);
        let letter = match (correct.next(), correct.next()) {
            (Some((i, _)), None) if i < crate::model::MAX_ALTERNATIVES => Letter::new(i),
            _ => return Err(AssembleError::InvalidQuestion { id: question.id }),
        };
        let position = slot + 1;
        key.entries.insert(position, letter);
        items.push(TestItem { position, question });
    }

    Ok(AssembledTest {
        config: cfg.clone(),
        items,
        key,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Alternative, Question};

    fn bank(n: usize) -> QuestionBank {
        QuestionBank {
            title: "pool".into(),
            questions: (0..n)
                .map(|i| {
                    let correct = i % 3;
                    Question::new(
                        format!("q{i}"),
                        format!("stem {i}"),
                        (0..3)
                            .map(|a| Alternative::new(format!("q{i} alt {a}"), a == correct))
                            .collect(),
                    )
                })
                .collect(),
            sources: vec![],
        }
    }

    #[test]
    fn no_shuffling_keeps_bank_order() {
        let b = bank(7);
        let t = assemble_test(&b, &AssemblyConfig::new(1)).unwrap();
        for (item, q) in t.items.iter().zip(&b.questions) {
            assert_eq!(&item.question, q);
            assert_eq!(t.key.get(item.position).unwrap().index(), q.correct_index().unwrap());
        }
        let positions: Vec<usize> = t.items.iter().map(|i| i.position).collect();
        assert_eq!(positions, (1..=7).collect::<Vec<_>>());
    }

    #[test]
    fn thirty_of_213() {
        let b = bank(213);
        let mut cfg = AssemblyConfig::new(42);
        cfg.subset_size = Some(30);
        cfg.shuffle_questions = true;
        cfg.shuffle_answers = true;
        let t = assemble_test(&b, &cfg).unwrap();
        assert_eq!(t.items.len(), 30);
        let ids: std::collections::HashSet<_> = t.items.iter().map(|i| &i.question.id).collect();
        assert_eq!(ids.len(), 30);
        for item in &t.items {
            let letter = t.key.get(item.position).unwrap();
            assert!(item.question.alternatives[letter.index()].correct);
        }
        assert_eq!(assemble_test(&b, &cfg).unwrap(), t);
    }

    #[test]
    fn errors() {
        let mut cfg = AssemblyConfig::new(0);
        assert_eq!(assemble_test(&bank(0), &cfg), Err(AssembleError::EmptyBank));
        cfg.subset_size = Some(4);
        assert_eq!(
            assemble_test(&bank(3), &cfg),
            Err(AssembleError::SubsetTooLarge { requested: 4, available: 3 })
        );
        cfg.subset_size = Some(0);
        assert!(assemble_test(&bank(3), &cfg).is_err());
    }

    #[test]
    fn later_stage_does_not_disturb_earlier_ones() {
        let b = bank(40);
        let mut cfg = AssemblyConfig::new(7);
        cfg.subset_size = Some(10);
        cfg.shuffle_questions = true;
        let plain = assemble_test(&b, &cfg).unwrap();
        cfg.shuffle_answers = true;
        let shuffled = assemble_test(&b, &cfg).unwrap();
        let ids = |t: &AssembledTest| t.items.iter().map(|i| i.question.id.clone()).collect::<Vec<_>>();
        assert_eq!(ids(&plain), ids(&shuffled));
    }

    #[test]
    fn subset_is_sorted_and_distinct() {
        let mut rng = RngState::new(11);
        let s = select_subset(20, 5, &mut rng);
        assert_eq!(s.len(), 5);
        assert!(s.windows(2).all(|w| w[0] < w[1]));
        assert!(s.iter().all(|&i| i < 20));
    }
}
