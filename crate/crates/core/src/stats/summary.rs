use crate::model::{GradeRecord, Group, GroupSummary, LetterBucket};

use super::StatsError;

/// Expands per-bucket counts into individual records with synthetic ids
/// (`<group>-0001`, ...), in the order the buckets are given.
pub fn expand_mark_distribution(
    counts: impl IntoIterator<Item = (LetterBucket, usize)>,
    group: &Group,
) -> Vec<GradeRecord> {
    let mut out = Vec::new();
    for (bucket, count) in counts {
        for _ in 0..count {
            let id = format!("{}-{:04}", group.label(), out.len() + 1);
            out.push(GradeRecord::from_bucket(id, group.clone(), bucket));
        }
    }
    out
}

/// Mean and population standard deviation of grade points. The group label
/// is taken from the first record.
pub fn group_summary(records: &[GradeRecord]) -> Result<GroupSummary, StatsError> {
    let first = records.first().ok_or(StatsError::EmptyGroup)?;
    let n = records.len() as f64;
    let mean = records.iter().map(|r| r.points() as f64).sum::<f64>() / n;
    let var = records
        .iter()
        .map(|r| (r.points() as f64 - mean).powi(2))
        .sum::<f64>()
        / n;
    Ok(GroupSummary {
        group: first.group().label().to_string(),
        n: records.len(),
        mean,
        std: var.sqrt(),
    })
}

/// Grade points per group, groups in order of first appearance.
pub fn group_points(records: &[GradeRecord]) -> Vec<(String, Vec<f64>)> {
    let mut out: Vec<(String, Vec<f64>)> = Vec::new();
    for r in records {
        let label = r.group().label();
        match out.iter_mut().find(|(g, _)| g == label) {
            Some((_, pts)) => pts.push(r.points() as f64),
            None => out.push((label.to_string(), vec![r.points() as f64])),
        }
    }
    out
}

pub fn summarize_groups(records: &[GradeRecord]) -> Vec<GroupSummary> {
    let mut groups: Vec<(String, Vec<GradeRecord>)> = Vec::new();
    for r in records {
        let label = r.group().label();
        match groups.iter_mut().find(|(g, _)| g == label) {
            Some((_, rs)) => rs.push(r.clone()),
            None => groups.push((label.to_string(), vec![r.clone()])),
        }
    }
    groups
        .iter()
        .map(|(_, rs)| group_summary(rs).expect("groups are non-empty"))
        .collect()
}
