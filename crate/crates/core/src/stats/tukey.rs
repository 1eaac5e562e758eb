//! Tukey HSD after a one-way ANOVA.

use std::f64::consts::SQRT_2;

use crate::model::TukeyContrast;

use super::{one_way_anova, srange_cdf, srange_quantile, Df, StatsError};

pub const DEFAULT_ALPHA: f64 = 0.05;

/// All pairwise contrasts using the pooled within-group variance.
///
/// Groups are ranked by descending mean; each group is then compared with
/// every lower-ranked one, lowest mean first, which lists contrasts as
/// "best vs worst, best vs next-worst, ...". Within a contrast the higher
/// mean comes first.
pub fn tukey_hsd<G: AsRef<[f64]>>(
    groups: &[(String, G)],
    alpha: f64,
) -> Result<Vec<TukeyContrast>, StatsError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(StatsError::InvalidArgument(format!("alpha must be in (0, 1), got {alpha}")));
    }
    let samples: Vec<&[f64]> = groups.iter().map(|(_, g)| g.as_ref()).collect();
    let anova = one_way_anova(&samples)?;
    let k = groups.len() as u32;
    let df = Df::from(anova.df_within);
    let mse = anova.ms_within;
    let critical = srange_quantile(1.0 - alpha, k, df)? / SQRT_2;

    let stats: Vec<(f64, f64)> = samples
        .iter()
        .map(|g| (g.iter().sum::<f64>() / g.len() as f64, g.len() as f64))
        .collect();
    let mut rank: Vec<usize> = (0..groups.len()).collect();
    rank.sort_by(|&a, &b| stats[b].0.total_cmp(&stats[a].0));

    let mut out = Vec::new();
    for (ri, &i) in rank.iter().enumerate() {
        for &j in rank[ri + 1..].iter().rev() {
            let (mi, ni) = stats[i];
            let (mj, nj) = stats[j];
            let difference = (mi - mj).abs();
            let se = (mse * (1.0 / ni + 1.0 / nj)).sqrt();
            let standardized = difference / se;
            let p = (1.0 - srange_cdf(standardized * SQRT_2, k, df)?).clamp(0.0, 1.0);
            out.push(TukeyContrast {
                pair: (groups[i].0.clone(), groups[j].0.clone()),
                difference,
                se,
                standardized,
                critical,
                p,
                significant: standardized > critical,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_groups_are_not_different() {
        let g = vec![1.0, 2.0, 3.0, 4.0];
        let out = tukey_hsd(&[("a".to_string(), g.clone()), ("b".to_string(), g)], 0.05).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].difference, 0.0);
        assert_eq!(out[0].p, 1.0);
        assert!(!out[0].significant);
    }

    #[test]
    fn ordering_and_pair_orientation() {
        let groups = vec![
            ("low".to_string(), vec![0.0, 1.0, 0.5]),
            ("high".to_string(), vec![5.0, 6.0, 5.5]),
            ("mid".to_string(), vec![2.0, 3.0, 2.5]),
        ];
        let out = tukey_hsd(&groups, 0.05).unwrap();
        let pairs: Vec<(&str, &str)> = out.iter().map(|c| (c.pair.0.as_str(), c.pair.1.as_str())).collect();
        assert_eq!(pairs, [("high", "low"), ("high", "mid"), ("mid", "low")]);
        for c in &out {
            assert_eq!(c.significant, c.standardized > c.critical);
            assert!((0.0..=1.0).contains(&c.p));
        }
    }

    #[test]
    fn alpha_is_checked() {
        let g = vec![("a".to_string(), vec![1.0, 2.0]), ("b".to_string(), vec![2.0, 3.0])];
        assert!(tukey_hsd(&g, 0.0).is_err());
        assert!(tukey_hsd(&g, 1.0).is_err());
    }
}
