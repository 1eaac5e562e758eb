//! Plain-text tables for the stats and grading reports.

use serde::Serialize;

use crate::model::{AnovaResult, GradeRecord, GroupSummary, LetterBucket, TukeyContrast};

/// Aligned table: first column left-aligned, the rest right-aligned.
pub fn render_table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let cols = headers.len();
    let mut widths: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &mut dyn Iterator<Item = &str>| {
        let mut out = String::new();
        for (i, cell) in cells.enumerate().take(cols) {
            let pad = widths[i].saturating_sub(cell.chars().count());
            if i == 0 {
                out.push_str(cell);
                out.push_str(&" ".repeat(pad));
            } else {
                out.push_str("  ");
                out.push_str(&" ".repeat(pad));
                out.push_str(cell);
            }
        }
        out.truncate(out.trim_end().len());
        out.push('\n');
        out
    };
    let mut out = line(&mut headers.iter().copied());
    let total = widths.iter().sum::<usize>() + 2 * cols.saturating_sub(1);
    out.push_str(&"-".repeat(total));
    out.push('\n');
    for row in rows {
        out.push_str(&line(&mut row.iter().map(String::as_str)));
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct MarkCount {
    pub letter: &'static str,
    pub count: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SummaryRow {
    #[serde(flatten)]
    pub summary: GroupSummary,
    pub marks: Vec<MarkCount>,
}

/// Summaries plus mark distributions, groups in first-appearance order.
pub fn summary_rows(records: &[GradeRecord], summaries: Vec<GroupSummary>) -> Vec<SummaryRow> {
    summaries
        .into_iter()
        .map(|summary| {
            let marks = LetterBucket::ALL
                .iter()
                .map(|&b| MarkCount {
                    letter: b.label(),
                    count: records
                        .iter()
                        .filter(|r| r.group().label() == summary.group && r.letter_bucket() == b)
                        .count(),
                })
                .collect();
            SummaryRow { summary, marks }
        })
        .collect()
}

/// One column per group; a row per mark bucket, then means and stds.
pub fn render_summary(rows: &[SummaryRow]) -> String {
    let mut headers = vec!["Marks"];
    headers.extend(rows.iter().map(|r| r.summary.group.as_str()));
    let mut body = Vec::new();
    for (i, bucket) in LetterBucket::ALL.iter().enumerate() {
        let mut line = vec![bucket.label().to_string()];
        for r in rows {
            let count = r.marks[i].count;
            let pct = 100.0 * count as f64 / r.summary.n as f64;
            line.push(format!("{count} ({pct:.2}%)"));
        }
        body.push(line);
    }
    let mut n = vec!["n".to_string()];
    n.extend(rows.iter().map(|r| r.summary.n.to_string()));
    let mut means = vec!["Means".to_string()];
    means.extend(rows.iter().map(|r| format!("{:.2}", r.summary.mean)));
    let mut stds = vec!["Standard Deviations".to_string()];
    stds.extend(rows.iter().map(|r| format!("{:.2}", r.summary.std)));
    body.extend([n, means, stds]);
    render_table(&headers, &body)
}

pub fn render_anova(a: &AnovaResult) -> String {
    let total_ss = a.ss_between + a.ss_within;
    let rows = vec![
        vec![
            "Between groups".to_string(),
            a.df_between.to_string(),
            format!("{:.4}", a.ss_between),
            format!("{:.4}", a.ms_between),
            format!("{:.4}", a.f),
        ],
        vec![
            "Within groups".to_string(),
            a.df_within.to_string(),
            format!("{:.4}", a.ss_within),
            format!("{:.4}", a.ms_within),
            String::new(),
        ],
        vec![
            "Total".to_string(),
            (a.n_total - 1).to_string(),
            format!("{total_ss:.4}"),
            String::new(),
            String::new(),
        ],
    ];
    render_table(&["Source", "DF", "Sum of Squares", "Mean Square", "F Value"], &rows)
}

pub fn format_p(p: f64) -> String {
    if p < 1e-4 {
        "< 0.0001".to_string()
    } else {
        format!("{p:.4}")
    }
}

pub fn render_tukey(contrasts: &[TukeyContrast], alpha: f64) -> String {
    let rows: Vec<Vec<String>> = contrasts
        .iter()
        .map(|c| {
            vec![
                format!("{} vs {}", c.pair.0, c.pair.1),
                format!("{:.3}", c.difference),
                format!("{:.3}", c.standardized),
                format!("{:.3}", c.critical),
                format_p(c.p),
                if c.significant { "Yes" } else { "No" }.to_string(),
            ]
        })
        .collect();
    let mut out = format!(
        "Tukey HSD, family-wise confidence {:.0}%\n",
        100.0 * (1.0 - alpha)
    );
    out.push_str(&render_table(
        &["Contrast", "Difference", "Standardized Difference", "Critical Value", "Pr > Diff", "Significant"],
        &rows,
    ));
    out
}
