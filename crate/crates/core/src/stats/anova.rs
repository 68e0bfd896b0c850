use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;

use crate::error::{Error, Result};

/// Upper tail `P(F > f)` of the F distribution with `(d1, d2)` degrees of
/// freedom, via the regularized incomplete beta function.
pub fn f_upper_tail(f: f64, d1: f64, d2: f64) -> f64 {
    if f.is_nan() || d1 <= 0.0 || d2 <= 0.0 {
        return f64::NAN;
    }
    if f <= 0.0 {
        return 1.0;
    }
    if f.is_infinite() {
        return 0.0;
    }
    beta_reg(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * f)).clamp(0.0, 1.0)
}

/// Lower tail `P(F <= f)`.
pub fn f_cdf(f: f64, d1: f64, d2: f64) -> f64 {
    1.0 - f_upper_tail(f, d1, d2)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnovaResult {
    pub means: Vec<f64>,
    pub counts: Vec<usize>,
    pub ss_between: f64,
    pub ss_within: f64,
    pub f: f64,
    pub df_between: usize,
    pub df_within: usize,
    pub p: f64,
}

/// One-way ANOVA over raw values. Each group needs at least two values.
pub fn one_way_anova(groups: &[&[f64]]) -> Result<AnovaResult> {
    if groups.len() < 2 {
        return Err(Error::InsufficientData("ANOVA needs at least two groups".to_string()));
    }
    if let Some(i) = groups.iter().position(|g| g.len() < 2) {
        return Err(Error::InsufficientData(format!(
            "group {i} has {} value(s); at least 2 required",
            groups[i].len()
        )));
    }
    let total_n: usize = groups.iter().map(|g| g.len()).sum();
    let grand = groups.iter().flat_map(|g| g.iter()).sum::<f64>() / total_n as f64;
    let means: Vec<f64> = groups
        .iter()
        .map(|g| g.iter().sum::<f64>() / g.len() as f64)
        .collect();
    let ss_between: f64 = groups
        .iter()
        .zip(&means)
        .map(|(g, m)| g.len() as f64 * (m - grand).powi(2))
        .sum();
    let ss_within: f64 = groups
        .iter()
        .zip(&means)
        .map(|(g, m)| g.iter().map(|x| (x - m).powi(2)).sum::<f64>())
        .sum();
    let df_between = groups.len() - 1;
    let df_within = total_n - groups.len();

    // Between-group variation below rounding noise counts as none.
    let scale = groups
        .iter()
        .flat_map(|g| g.iter())
        .map(|x| (x - grand).powi(2))
        .sum::<f64>();
    let f = if ss_between <= 1e-14 * scale {
        0.0
    } else if ss_within == 0.0 {
        f64::INFINITY
    } else {
        (ss_between / df_between as f64) / (ss_within / df_within as f64)
    };
    Ok(AnovaResult {
        counts: groups.iter().map(|g| g.len()).collect(),
        means,
        ss_between,
        ss_within,
        f,
        df_between,
        df_within,
        p: f_upper_tail(f, df_between as f64, df_within as f64),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_two_groups() {
        let r = one_way_anova(&[&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]]).unwrap();
        assert!((r.f - 13.5).abs() < 1e-9);
        assert_eq!((r.df_between, r.df_within), (1, 4));
        assert!(r.p > 0.0 && r.p < 0.05);
    }

    #[test]
    fn identical_groups() {
        let r = one_way_anova(&[&[5.0, 5.0], &[5.0, 5.0]]).unwrap();
        assert_eq!(r.f, 0.0);
        assert_eq!(r.p, 1.0);
    }

    #[test]
    fn too_few_values() {
        assert!(matches!(
            one_way_anova(&[&[1.0], &[2.0, 3.0]]),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn tail_limits() {
        assert_eq!(f_upper_tail(0.0, 3.0, 7.0), 1.0);
        assert_eq!(f_upper_tail(f64::INFINITY, 3.0, 7.0), 0.0);
        // F(1, d2) at t^2 equals the two-sided t tail; t = 2.0, d2 = 10 -> 0.07339
        assert!((f_upper_tail(4.0, 1.0, 10.0) - 0.073_388_7).abs() < 1e-6);
    }
}
