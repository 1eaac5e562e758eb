//! Bank-level operations: merging submissions and contribution statistics.

use std::collections::HashSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::model::{ContributionBuckets, ContributionStats, QuestionBank};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BankError {
    #[error("no student posted any question")]
    EmptyInput,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Dedup {
    #[default]
    Off,
    /// Drop later questions whose normalized stem and alternative texts
    /// match an earlier one.
    NormalizedText,
}

/// Trim, collapse whitespace runs to one space, lowercase.
pub fn normalize_text(s: &str) -> String {
    s.split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .to_lowercase()
}

fn dedup_key(q: &crate::model::Question) -> (String, Vec<String>) {
    let mut alts: Vec<String> = q.alternatives.iter().map(|a| normalize_text(&a.text)).collect();
    alts.sort();
    (normalize_text(&q.stem), alts)
}

/// Concatenates banks in order. The title is taken from the first bank.
///
/// Ids are kept when unique; a colliding id gets the smallest free `~N`
/// suffix (N ≥ 2).
pub fn merge_banks(banks: &[QuestionBank], dedup: Dedup) -> QuestionBank {
    let mut out = QuestionBank::new(banks.first().map(|b| b.title.clone()).unwrap_or_default());
    let mut used_ids: HashSet<String> = HashSet::new();
    let mut seen_keys = HashSet::new();

    for bank in banks {
        out.sources.extend(bank.sources.iter().cloned());
        for q in &bank.questions {
            if dedup == Dedup::NormalizedText && !seen_keys.insert(dedup_key(q)) {
                continue;
            }
            let mut q = q.clone();
            if used_ids.contains(&q.id) {
                let base = q.id.clone();
                q.id = (2..)
                    .map(|n| format!("{base}~{n}"))
                    .find(|candidate| !used_ids.contains(candidate))
                    .expect("unbounded suffix search");
            }
            used_ids.insert(q.id.clone());
            out.questions.push(q);
        }
    }
    out
}

/// Statistics over per-student question counts. Students with zero posts
/// are left out.
pub fn contribution_stats(counts: &[u32]) -> Result<ContributionStats, BankError> {
    let included: Vec<u32> = counts.iter().copied().filter(|&c| c >= 1).collect();
    if included.is_empty() {
        return Err(BankError::EmptyInput);
    }
    let n = included.len() as f64;
    let pct = |pred: fn(u32) -> bool| 100.0 * included.iter().filter(|&&c| pred(c)).count() as f64 / n;
    let buckets = ContributionBuckets {
        one: pct(|c| c == 1),
        two_to_four: pct(|c| (2..=4).contains(&c)),
        five_to_nine: pct(|c| (5..=9).contains(&c)),
        ten_or_more: pct(|c| c >= 10),
    };
    let mean = included.iter().map(|&c| c as f64).sum::<f64>() / n;
    let var = included
        .iter()
        .map(|&c| (c as f64 - mean).powi(2))
        .sum::<f64>()
        / n;
    Ok(ContributionStats {
        counts: included,
        buckets,
        mean,
        std: var.sqrt(),
    })
}

/// Two-column table: questions per student and share of students.
pub fn render_contribution_table(stats: &ContributionStats) -> String {
    let rows = [
        ("One", format!("{:.2}%", stats.buckets.one)),
        ("[2-4]", format!("{:.2}%", stats.buckets.two_to_four)),
        ("[5-9]", format!("{:.2}%", stats.buckets.five_to_nine)),
        ("10 or more", format!("{:.2}%", stats.buckets.ten_or_more)),
        ("Mean", format!("{:.2}", stats.mean)),
        ("Standard Deviation", format!("{:.2}", stats.std)),
    ];
    let mut out = String::new();
    let _ = writeln!(out, "{:<28} {:>22}", "#Questions uploaded per test", "Percentage of students");
    for (label, value) in rows {
        let _ = writeln!(out, "{label:<28} {value:>22}");
    }
    out
}
