//! Forward stepwise ordinary least squares on standardized variables.

use serde::{Deserialize, Serialize};

use super::anova::f_upper_tail;
use crate::error::{Error, Result};

/// Predictors whose residual (after projecting out already selected
/// predictors) keeps less than this share of their variance are skipped.
const COLLINEARITY_TOL: f64 = 1e-10;
/// Residual variance share below which the fit counts as perfect.
const PERFECT_FIT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionStep {
    pub variable: String,
    /// Standardized coefficient in the final model.
    pub standardized_beta: f64,
    pub incremental_r2: f64,
    /// p-value of the partial F test when the variable entered.
    pub p: f64,
    /// Zero-order correlation with the outcome.
    pub bivariate_r: f64,
}

impl RegressionStep {
    /// The partial coefficient points the other way from the plain
    /// correlation (a suppressor pattern).
    pub fn reversed(&self) -> bool {
        self.standardized_beta * self.bivariate_r < 0.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionReport {
    pub steps: Vec<RegressionStep>,
    pub total_r2: f64,
    pub n: usize,
    pub entry_p: f64,
    pub warnings: Vec<String>,
}

impl RegressionReport {
    pub fn selection_order(&self) -> Vec<&str> {
        self.steps.iter().map(|s| s.variable.as_str()).collect()
    }

    pub fn step(&self, variable: &str) -> Option<&RegressionStep> {
        self.steps.iter().find(|s| s.variable == variable)
    }
}

fn standardize(x: &[f64]) -> Option<Vec<f64>> {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let ss = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>();
    if ss <= 0.0 || !ss.is_finite() {
        return None;
    }
    let sd = (ss / (n - 1.0)).sqrt();
    Some(x.iter().map(|v| (v - mean) / sd).collect())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Least squares of `y` on the columns (all centered), by modified
/// Gram-Schmidt. Returns `(coefficients, R^2)`, or `None` when a column is
/// numerically dependent on the ones before it.
fn least_squares(cols: &[&[f64]], y: &[f64]) -> Option<(Vec<f64>, f64)> {
    let k = cols.len();
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut r = vec![vec![0.0; k]; k];
    for (j, col) in cols.iter().enumerate() {
        let mut v = col.to_vec();
        let norm0 = dot(&v, &v);
        for (i, qi) in q.iter().enumerate() {
            let c = dot(qi, &v);
            r[i][j] = c;
            for (vv, qq) in v.iter_mut().zip(qi) {
                *vv -= c * qq;
            }
        }
        let norm = dot(&v, &v);
        if norm <= COLLINEARITY_TOL * norm0 {
            return None;
        }
        let norm = norm.sqrt();
        r[j][j] = norm;
        q.push(v.into_iter().map(|x| x / norm).collect());
    }
    let qty: Vec<f64> = q.iter().map(|qi| dot(qi, y)).collect();
    let mut beta = vec![0.0; k];
    for j in (0..k).rev() {
        let s: f64 = (j + 1..k).map(|l| r[j][l] * beta[l]).sum();
        beta[j] = (qty[j] - s) / r[j][j];
    }
    let explained: f64 = qty.iter().map(|c| c * c).sum();
    let total = dot(y, y);
    Some((beta, (explained / total).clamp(0.0, 1.0)))
}

/// Forward selection: at each step the candidate with the largest gain in
/// R^2 enters if its partial F test gives `p <= entry_p`. All variables are
/// standardized first, so the reported coefficients are standardized betas.
///
/// `predictors` pairs a name with one value per observation of `y`.
pub fn stepwise_ols(
    y: &[f64],
    predictors: &[(String, Vec<f64>)],
    entry_p: f64,
) -> Result<RegressionReport> {
    let n = y.len();
    if n < 10 {
        return Err(Error::InsufficientData(format!(
            "stepwise regression needs at least 10 complete rows, found {n}"
        )));
    }
    if let Some((name, _)) = predictors.iter().find(|(_, x)| x.len() != n) {
        return Err(Error::Precondition(format!(
            "predictor {name} has a different length than the outcome"
        )));
    }
    let zy = standardize(y).ok_or_else(|| {
        Error::InsufficientData("outcome has no variance".to_string())
    })?;

    let mut warnings = Vec::new();
    let mut candidates: Vec<(usize, Vec<f64>)> = Vec::new();
    for (i, (name, x)) in predictors.iter().enumerate() {
        match standardize(x) {
            Some(z) => candidates.push((i, z)),
            None => warnings.push(format!("{name}: no variance; skipped")),
        }
    }
    let bivariate: Vec<f64> = predictors
        .iter()
        .map(|(_, x)| match standardize(x) {
            Some(z) => dot(&z, &zy) / (n as f64 - 1.0),
            None => 0.0,
        })
        .collect();

    let mut selected: Vec<(usize, Vec<f64>)> = Vec::new();
    let mut entries: Vec<(usize, f64, f64)> = Vec::new(); // (predictor, delta r2, p)
    let mut r2 = 0.0;

    while !candidates.is_empty() && 1.0 - r2 > PERFECT_FIT_TOL {
        let mut best: Option<(usize, f64)> = None; // (candidate position, new r2)
        let mut collinear = Vec::new();
        for (pos, (_, z)) in candidates.iter().enumerate() {
            let mut cols: Vec<&[f64]> = selected.iter().map(|(_, c)| c.as_slice()).collect();
            cols.push(z);
            match least_squares(&cols, &zy) {
                Some((_, new_r2)) => {
                    if best.is_none_or(|(_, b)| new_r2 > b) {
                        best = Some((pos, new_r2));
                    }
                }
                None => collinear.push(pos),
            }
        }
        for &pos in collinear.iter().rev() {
            let (i, _) = candidates.remove(pos);
            warnings.push(format!(
                "{}: collinear with selected predictors; skipped",
                predictors[i].0
            ));
            if let Some((b, _)) = best.as_mut() {
                if *b > pos {
                    *b -= 1;
                }
            }
        }
        let Some((pos, new_r2)) = best else { break };
        let k_new = selected.len() + 1;
        if n <= k_new + 1 {
            break;
        }
        let df2 = (n - k_new - 1) as f64;
        let delta = (new_r2 - r2).max(0.0);
        let resid = 1.0 - new_r2;
        let f = if resid <= PERFECT_FIT_TOL {
            f64::INFINITY
        } else {
            delta / (resid / df2)
        };
        let p = f_upper_tail(f, 1.0, df2);
        if p > entry_p {
            break;
        }
        let (i, z) = candidates.remove(pos);
        selected.push((i, z));
        entries.push((i, delta, p));
        r2 = new_r2;
    }

    let cols: Vec<&[f64]> = selected.iter().map(|(_, c)| c.as_slice()).collect();
    let betas = if cols.is_empty() {
        Vec::new()
    } else {
        least_squares(&cols, &zy)
            .ok_or_else(|| Error::Invariant("selected predictors became collinear".to_string()))?
            .0
    };
    let steps = entries
        .iter()
        .zip(&betas)
        .map(|(&(i, delta, p), &beta)| RegressionStep {
            variable: predictors[i].0.clone(),
            standardized_beta: beta,
            incremental_r2: delta,
            p,
            bivariate_r: bivariate[i],
        })
        .collect::<Vec<_>>();
    let total_r2 = steps.iter().map(|s| s.incremental_r2).sum();
    Ok(RegressionReport {
        steps,
        total_r2,
        n,
        entry_p,
        warnings,
    })
}
