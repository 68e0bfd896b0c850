//! Psycholinguistic comparisons of the structural layers: two-group ANOVAs,
//! inter-correlations of the norm variables, and forward stepwise regression
//! of layer membership on the norms.
//!
//! Missing values are handled by listwise deletion within each analysis.

mod anova;
mod regression;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use anova::{f_cdf, f_upper_tail, one_way_anova, AnovaResult};
pub use regression::{stepwise_ols, RegressionReport, RegressionStep};

use crate::decomposition::{Decomposition, Label};
use crate::error::{Error, Result};
use crate::mgs::GroundingSet;
use crate::norms::{NormValues, NormsTable, Variable};

pub const DEFAULT_ENTRY_P: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameRow {
    pub word: String,
    pub label: Label,
    pub in_mgs: bool,
    pub norms: NormValues,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisFrame {
    pub rows: Vec<FrameRow>,
    /// Fraction of dictionary words with at least one norm value.
    pub coverage: f64,
    pub has_mgs: bool,
    pub warnings: Vec<String>,
}

/// Joins decomposition labels, optional MGS membership and norms into one
/// row per dictionary word. Norms for words outside the dictionary are
/// ignored with a warning.
pub fn attach_norms(d: &Decomposition, norms: &NormsTable, mgs: Option<&GroundingSet>) -> AnalysisFrame {
    let mut warnings = Vec::new();
    let rows: Vec<FrameRow> = d
        .labels()
        .iter()
        .map(|(w, &label)| FrameRow {
            word: w.clone(),
            label,
            in_mgs: mgs.is_some_and(|s| s.contains(w)),
            norms: norms.get(w).copied().unwrap_or_default(),
        })
        .collect();
    let extra: Vec<&str> = norms
        .iter()
        .map(|(w, _)| w)
        .filter(|w| d.label(w).is_none())
        .collect();
    if !extra.is_empty() {
        warnings.push(format!(
            "{} norms row(s) name words outside the dictionary and were ignored (first: {:?})",
            extra.len(),
            extra[0]
        ));
    }
    if let Some(s) = mgs {
        let missing = s.words.iter().filter(|w| d.label(w).is_none()).count();
        if missing > 0 {
            warnings.push(format!("{missing} grounding-set word(s) are not in the dictionary"));
        }
    }
    let covered = rows.iter().filter(|r| r.norms.any()).count();
    let coverage = if rows.is_empty() {
        0.0
    } else {
        covered as f64 / rows.len() as f64
    };
    AnalysisFrame {
        rows,
        coverage,
        has_mgs: mgs.is_some(),
        warnings,
    }
}

/// Named two-group splits of the dictionary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    KernelVsRest,
    CoreVsRest,
    MgsVsRest,
    CoreVsSatellites,
    MgsVsRestOfKernel,
}

impl Comparison {
    pub const ALL: [Comparison; 5] = [
        Comparison::KernelVsRest,
        Comparison::CoreVsRest,
        Comparison::MgsVsRest,
        Comparison::CoreVsSatellites,
        Comparison::MgsVsRestOfKernel,
    ];

    pub fn needs_mgs(self) -> bool {
        matches!(self, Comparison::MgsVsRest | Comparison::MgsVsRestOfKernel)
    }

    pub fn group_names(self) -> (&'static str, &'static str) {
        match self {
            Comparison::KernelVsRest => ("K", "D-K"),
            Comparison::CoreVsRest => ("C", "D-C"),
            Comparison::MgsVsRest => ("MGS", "D-MGS"),
            Comparison::CoreVsSatellites => ("C", "S"),
            Comparison::MgsVsRestOfKernel => ("MGS", "K-MGS"),
        }
    }

    /// `Some(true)` for the focal group, `Some(false)` for the reference
    /// group, `None` when the row takes no part.
    pub fn membership(self, row: &FrameRow) -> Option<bool> {
        match self {
            Comparison::KernelVsRest => Some(row.label.in_kernel()),
            Comparison::CoreVsRest => Some(row.label == Label::Core),
            Comparison::MgsVsRest => Some(row.in_mgs),
            Comparison::CoreVsSatellites => match row.label {
                Label::Core => Some(true),
                Label::Satellite => Some(false),
                Label::Outside => None,
            },
            Comparison::MgsVsRestOfKernel => row.label.in_kernel().then_some(row.in_mgs),
        }
    }
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = self.group_names();
        write!(f, "{a} vs {b}")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupComparison {
    pub comparison: Comparison,
    pub variable: Variable,
    /// Focal group first.
    pub means: [f64; 2],
    pub counts: [usize; 2],
    pub f: f64,
    pub df_between: usize,
    pub df_within: usize,
    pub p: f64,
}

fn require_mgs(frame: &AnalysisFrame, comparison: Comparison) -> Result<()> {
    if comparison.needs_mgs() && !frame.has_mgs {
        return Err(Error::InsufficientData(format!(
            "{comparison} needs a grounding set"
        )));
    }
    Ok(())
}

/// Two-group one-way ANOVA of `variable` across the split.
pub fn anova_compare(frame: &AnalysisFrame, comparison: Comparison, variable: Variable) -> Result<GroupComparison> {
    require_mgs(frame, comparison)?;
    let mut focal = Vec::new();
    let mut reference = Vec::new();
    for row in &frame.rows {
        if let (Some(side), Some(x)) = (comparison.membership(row), row.norms.get(variable)) {
            if side {
                focal.push(x);
            } else {
                reference.push(x);
            }
        }
    }
    let (a, b) = comparison.group_names();
    for (name, g) in [(a, &focal), (b, &reference)] {
        if g.len() < 2 {
            return Err(Error::InsufficientData(format!(
                "group {name} has {} {variable} value(s); at least 2 required",
                g.len()
            )));
        }
    }
    let r = one_way_anova(&[&focal, &reference])?;
    Ok(GroupComparison {
        comparison,
        variable,
        means: [r.means[0], r.means[1]],
        counts: [r.counts[0], r.counts[1]],
        f: r.f,
        df_between: r.df_between,
        df_within: r.df_within,
        p: r.p,
    })
}

/// Pearson correlation, or `None` with fewer than 3 pairs or no variance.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len();
    if n < 3 || y.len() != n {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Pairwise-complete correlations of the five norm variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    /// `None` marks a cell with too few complete pairs.
    pub r: [[Option<f64>; 5]; 5],
    pub pairs: [[usize; 5]; 5],
}

impl CorrelationMatrix {
    pub fn get(&self, a: Variable, b: Variable) -> Option<f64> {
        self.r[a.index()][b.index()]
    }
}

pub fn correlation_matrix(frame: &AnalysisFrame) -> CorrelationMatrix {
    let mut r = [[None; 5]; 5];
    let mut pairs = [[0; 5]; 5];
    for a in Variable::ALL {
        for b in Variable::ALL {
            if b < a {
                continue;
            }
            let (xs, ys): (Vec<f64>, Vec<f64>) = frame
                .rows
                .iter()
                .filter_map(|row| Some((row.norms.get(a)?, row.norms.get(b)?)))
                .unzip();
            let cell = if a == b {
                pearson(&xs, &ys).map(|_| 1.0)
            } else {
                pearson(&xs, &ys)
            };
            r[a.index()][b.index()] = cell;
            r[b.index()][a.index()] = cell;
            pairs[a.index()][b.index()] = xs.len();
            pairs[b.index()][a.index()] = xs.len();
        }
    }
    CorrelationMatrix { r, pairs }
}

/// Stepwise regression of split membership (1 focal, 0 reference) on the
/// given norm variables, a linear probability model fitted by least squares.
pub fn stepwise_regression(
    frame: &AnalysisFrame,
    comparison: Comparison,
    predictors: &[Variable],
    entry_p: f64,
) -> Result<RegressionReport> {
    require_mgs(frame, comparison)?;
    let mut y = Vec::new();
    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); predictors.len()];
    let mut dropped = 0usize;
    for row in &frame.rows {
        let Some(side) = comparison.membership(row) else { continue };
        let values: Option<Vec<f64>> = predictors.iter().map(|&v| row.norms.get(v)).collect();
        match values {
            Some(values) => {
                y.push(if side { 1.0 } else { 0.0 });
                for (c, x) in cols.iter_mut().zip(values) {
                    c.push(x);
                }
            }
            None => dropped += 1,
        }
    }
    let named: Vec<(String, Vec<f64>)> = predictors
        .iter()
        .zip(cols)
        .map(|(v, c)| (v.as_str().to_string(), c))
        .collect();
    let mut report = stepwise_ols(&y, &named, entry_p)?;
    if dropped > 0 {
        report
            .warnings
            .push(format!("{dropped} row(s) with a missing predictor removed (listwise)"));
    }
    Ok(report)
}

/// Expected direction of each variable for "inner" layers: learned younger
/// (lower age of acquisition), everything else higher.
pub fn inward_sign(v: Variable) -> f64 {
    match v {
        Variable::Aoa => -1.0,
        _ => 1.0,
    }
}

/// The layers reported in the means table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Layer {
    Mgs,
    Core,
    Satellites,
    Kernel,
    RestOfDictionary,
}

impl Layer {
    pub const ALL: [Layer; 5] = [
        Layer::Mgs,
        Layer::Core,
        Layer::Satellites,
        Layer::Kernel,
        Layer::RestOfDictionary,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Layer::Mgs => "MGS",
            Layer::Core => "C",
            Layer::Satellites => "S",
            Layer::Kernel => "K",
            Layer::RestOfDictionary => "D-K",
        }
    }

    fn contains(self, row: &FrameRow) -> bool {
        match self {
            Layer::Mgs => row.in_mgs,
            Layer::Core => row.label == Label::Core,
            Layer::Satellites => row.label == Label::Satellite,
            Layer::Kernel => row.label.in_kernel(),
            Layer::RestOfDictionary => row.label == Label::Outside,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeansTable {
    /// `means[layer][variable]`, `None` when no value is available.
    pub means: Vec<[Option<f64>; 5]>,
    pub counts: Vec<[usize; 5]>,
}

impl MeansTable {
    pub fn mean(&self, layer: Layer, v: Variable) -> Option<f64> {
        self.means[layer as usize][v.index()]
    }

    /// Whether the means of `v` follow the layer ordering MGS > C > S > D-K
    /// and C > K > D-K in the variable's inward direction. K pools C and S,
    /// so its mean always lies between theirs and is not ranked against S.
    pub fn inward_order_holds(&self, v: Variable) -> bool {
        let s = inward_sign(v);
        let m = |l: Layer| self.mean(l, v).map(|x| s * x);
        let chain = |ls: &[Layer]| {
            ls.windows(2).all(|w| match (m(w[0]), m(w[1])) {
                (Some(a), Some(b)) => a > b,
                _ => false,
            })
        };
        chain(&[Layer::Mgs, Layer::Core, Layer::Satellites, Layer::RestOfDictionary])
            && chain(&[Layer::Core, Layer::Kernel, Layer::RestOfDictionary])
    }
}

pub fn layer_means(frame: &AnalysisFrame) -> MeansTable {
    let mut means = Vec::new();
    let mut counts = Vec::new();
    for layer in Layer::ALL {
        let mut m = [None; 5];
        let mut c = [0; 5];
        for v in Variable::ALL {
            let xs: Vec<f64> = frame
                .rows
                .iter()
                .filter(|r| layer.contains(r))
                .filter_map(|r| r.norms.get(v))
                .collect();
            c[v.index()] = xs.len();
            if !xs.is_empty() {
                m[v.index()] = Some(xs.iter().sum::<f64>() / xs.len() as f64);
            }
        }
        means.push(m);
        counts.push(c);
    }
    MeansTable { means, counts }
}

/// Every comparison the inputs allow: ANOVAs per variable, stepwise
/// regression per split, layer means and inter-correlations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub coverage: f64,
    pub means: MeansTable,
    pub correlations: CorrelationMatrix,
    pub anovas: Vec<GroupComparison>,
    pub regressions: Vec<(Comparison, RegressionReport)>,
    pub warnings: Vec<String>,
}

pub fn run_all(frame: &AnalysisFrame, entry_p: f64) -> Result<StatsReport> {
    if frame.coverage == 0.0 {
        return Err(Error::InsufficientData(
            "no dictionary word has norms".to_string(),
        ));
    }
    let mut warnings = frame.warnings.clone();
    let mut anovas = Vec::new();
    let mut regressions = Vec::new();
    for cmp in Comparison::ALL {
        if cmp.needs_mgs() && !frame.has_mgs {
            continue;
        }
        for v in Variable::ALL {
            match anova_compare(frame, cmp, v) {
                Ok(r) => anovas.push(r),
                Err(e) => warnings.push(format!("ANOVA {cmp}, {v}: {e}")),
            }
        }
        match stepwise_regression(frame, cmp, &Variable::ALL, entry_p) {
            Ok(r) => regressions.push((cmp, r)),
            Err(e) => warnings.push(format!("stepwise {cmp}: {e}")),
        }
    }
    Ok(StatsReport {
        coverage: frame.coverage,
        means: layer_means(frame),
        correlations: correlation_matrix(frame),
        anovas,
        regressions,
        warnings,
    })
}

fn fmt_p(p: f64) -> String {
    if p < 0.001 {
        "<.001".to_string()
    } else {
        format!("{p:.3}")
    }
}

impl fmt::Display for MeansTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:<8}", "layer")?;
        for v in Variable::ALL {
            write!(f, "{:>15}", v.as_str())?;
        }
        writeln!(f)?;
        for layer in Layer::ALL {
            write!(f, "{:<8}", layer.name())?;
            for v in Variable::ALL {
                match self.mean(layer, v) {
                    Some(m) => write!(f, "{:>15.3}", m)?,
                    None => write!(f, "{:>15}", "-")?,
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl fmt::Display for RegressionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<14}{:>10}{:>10}{:>10}{:>9}{:>10}",
            "variable", "direction", "beta", "R2 step", "p", "r"
        )?;
        for s in &self.steps {
            let dir = if s.standardized_beta >= 0.0 { "+" } else { "-" };
            let flag = if s.reversed() { "  (reversed)" } else { "" };
            writeln!(
                f,
                "{:<14}{:>10}{:>10.3}{:>10.3}{:>9}{:>10.3}{}",
                s.variable,
                dir,
                s.standardized_beta,
                s.incremental_r2,
                fmt_p(s.p),
                s.bivariate_r,
                flag
            )?;
        }
        write!(f, "total R2 = {:.3}  (n = {})", self.total_r2, self.n)
    }
}

impl fmt::Display for StatsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "norms coverage: {:.1}% of dictionary words", 100.0 * self.coverage)?;
        writeln!(f)?;
        writeln!(f, "Layer means")?;
        writeln!(f, "{}", self.means)?;
        writeln!(f, "ANOVA (two groups)")?;
        writeln!(
            f,
            "{:<14}{:<15}{:>12}{:>12}{:>12}{:>10}{:>8}",
            "comparison", "variable", "mean(in)", "mean(out)", "F", "df", "p"
        )?;
        for a in &self.anovas {
            writeln!(
                f,
                "{:<14}{:<15}{:>12.3}{:>12.3}{:>12.3}{:>10}{:>8}",
                a.comparison.to_string(),
                a.variable.as_str(),
                a.means[0],
                a.means[1],
                a.f,
                format!("{},{}", a.df_between, a.df_within),
                fmt_p(a.p)
            )?;
        }
        for (cmp, r) in &self.regressions {
            writeln!(f)?;
            writeln!(f, "Stepwise regression: {cmp}")?;
            writeln!(f, "{r}")?;
        }
        if !self.warnings.is_empty() {
            writeln!(f)?;
            for w in &self.warnings {
                writeln!(f, "warning: {w}")?;
            }
        }
        Ok(())
    }
}
