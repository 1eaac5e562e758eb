use crate::model::AnovaResult;

use super::StatsError;

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sum of squared deviations from the grand mean.
pub fn total_sum_of_squares<G: AsRef<[f64]>>(groups: &[G]) -> f64 {
    let all: Vec<f64> = groups.iter().flat_map(|g| g.as_ref().iter().copied()).collect();
    let m = mean(&all);
    all.iter().map(|x| (x - m).powi(2)).sum()
}

pub fn one_way_anova<G: AsRef<[f64]>>(groups: &[G]) -> Result<AnovaResult, StatsError> {
    let k = groups.len();
    if k < 2 {
        return Err(StatsError::DegenerateInput(format!("need at least 2 groups, got {k}")));
    }
    if groups.iter().any(|g| g.as_ref().is_empty()) {
        return Err(StatsError::EmptyGroup);
    }
    let n_total: usize = groups.iter().map(|g| g.as_ref().len()).sum();
    if n_total <= k {
        return Err(StatsError::DegenerateInput(format!(
            "{n_total} observations leave no within-group degrees of freedom for {k} groups"
        )));
    }
    let grand = groups.iter().flat_map(|g| g.as_ref().iter()).sum::<f64>() / n_total as f64;

    let mut ss_between = 0.0;
    let mut ss_within = 0.0;
    for g in groups {
        let g = g.as_ref();
        let m = mean(g);
        ss_between += g.len() as f64 * (m - grand).powi(2);
        ss_within += g.iter().map(|x| (x - m).powi(2)).sum::<f64>();
    }
    let df_between = k - 1;
    let df_within = n_total - k;
    let ms_between = ss_between / df_between as f64;
    let ms_within = ss_within / df_within as f64;
    if ms_within == 0.0 {
        return Err(StatsError::DegenerateInput(
            "zero within-group variance, F is undefined".into(),
        ));
    }
    Ok(AnovaResult {
        k,
        n_total,
        ss_between,
        ss_within,
        df_between,
        df_within,
        ms_between,
        ms_within,
        f: ms_between / ms_within,
    })
}
