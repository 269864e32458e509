//! Cohort statistics across the three conditions.
//!
//! Pipeline per feature: median imputation within each condition, a
//! Shapiro-Wilk gate (parametric iff every condition has p > 0.05), a
//! repeated-measures ANOVA or Friedman omnibus test, Benjamini-Hochberg
//! adjustment across features, then paired t-tests (Cohen's d_z) or Wilcoxon
//! signed-rank tests (Cliff's delta) for features whose adjusted omnibus p
//! is below 0.05, adjusted again within each feature's three comparisons.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF, FisherSnedecor, Normal, StudentsT};

use crate::error::StatsError;
use crate::model::{feature_names, Condition, FeatureVector, N_FEATURES};

pub const ALPHA: f64 = 0.05;
pub const MIN_SUBJECTS: usize = 5;
/// Wilcoxon uses the exact null distribution up to this many non-zero pairs.
pub const WILCOXON_EXACT_MAX: usize = 25;

/// Replaces missing cells with the median of the observed cells.
pub fn impute_median(column: &[Option<f64>]) -> Result<Vec<f64>, StatsError> {
    let observed: Vec<f64> = column.iter().flatten().copied().collect();
    let med = crate::summary::median(&observed)
        .ok_or_else(|| StatsError::AllMissingFeature(String::new()))?;
    Ok(column.iter().map(|v| v.unwrap_or(med)).collect())
}

fn poly(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, ci| acc * x + ci)
}

fn std_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("unit normal")
}

/// Shapiro-Wilk W and p-value using Royston's AS R94 approximation.
pub fn shapiro_wilk(sample: &[f64]) -> Result<(f64, f64), StatsError> {
    let n = sample.len();
    if !(3..=5000).contains(&n) {
        return Err(StatsError::SampleTooSmall(n));
    }
    let mut x = sample.to_vec();
    x.sort_unstable_by(f64::total_cmp);
    if x[n - 1] - x[0] <= 0.0 {
        return Err(StatsError::ZeroVariance);
    }
    let nn2 = n / 2;
    let an = n as f64;
    let norm = std_normal();

    // Coefficients a[0..nn2] for the upper half, in AS R94 order.
    let mut a = vec![0.0; nn2];
    if n == 3 {
        a[0] = 0.5f64.sqrt();
    } else {
        const C1: [f64; 6] = [0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056];
        const C2: [f64; 6] = [0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633];
        let an25 = an + 0.25;
        let m: Vec<f64> = (1..=nn2)
            .map(|i| norm.inverse_cdf((i as f64 - 0.375) / an25))
            .collect();
        let summ2 = 2.0 * m.iter().map(|v| v * v).sum::<f64>();
        let ssumm2 = summ2.sqrt();
        let rsn = 1.0 / an.sqrt();
        let a1 = poly(&C1, rsn) - m[0] / ssumm2;
        let (i1, fac) = if n > 5 {
            let a2 = -m[1] / ssumm2 + poly(&C2, rsn);
            a[1] = a2;
            let fac = ((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1])
                / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2))
                .sqrt();
            (2, fac)
        } else {
            let fac = ((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1)).sqrt();
            (1, fac)
        };
        a[0] = a1;
        for i in i1..nn2 {
            a[i] = -m[i] / fac;
        }
    }

    let mean = x.iter().sum::<f64>() / an;
    let ss: f64 = x.iter().map(|v| (v - mean) * (v - mean)).sum();
    let num: f64 = (0..nn2).map(|i| a[i] * (x[n - 1 - i] - x[i])).sum();
    let w = ((num * num) / ss).min(1.0);

    if n == 3 {
        use std::f64::consts::{FRAC_PI_3, PI};
        let p = (6.0 / PI * (w.sqrt().asin() - FRAC_PI_3)).max(0.0);
        return Ok((w, p.min(1.0)));
    }
    let w1 = (1.0 - w).ln();
    let p = if n <= 11 {
        let gamma = poly(&[-2.273, 0.459], an);
        if gamma - w1 <= 0.0 {
            return Ok((w, 0.0));
        }
        let y = -(gamma - w1).ln();
        let m = poly(&[0.5440, -0.39978, 0.025054, -6.714e-4], an);
        let s = poly(&[1.3822, -0.77857, 0.062767, -0.0020322], an).exp();
        norm.sf((y - m) / s)
    } else {
        let xx = an.ln();
        let m = poly(&[-1.5861, -0.31082, -0.083751, 0.0038915], xx);
        let s = poly(&[-0.4803, -0.082676, 0.0030302], xx).exp();
        norm.sf((w1 - m) / s)
    };
    Ok((w, p.clamp(0.0, 1.0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OmnibusTest {
    #[serde(rename = "RM-ANOVA")]
    RmAnova,
    Friedman,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OmnibusResult {
    pub test: OmnibusTest,
    pub statistic: f64,
    pub df: (f64, f64),
    pub p: f64,
}

fn check_equal_n(samples: &[&[f64]]) -> Result<usize, StatsError> {
    let n = samples.first().map_or(0, |s| s.len());
    if samples.iter().any(|s| s.len() != n) {
        return Err(StatsError::UnequalN);
    }
    Ok(n)
}

/// One-way repeated-measures ANOVA; `samples[j][i]` is subject `i` under condition `j`.
pub fn rm_anova(samples: &[&[f64]]) -> Result<OmnibusResult, StatsError> {
    let n = check_equal_n(samples)?;
    let k = samples.len();
    if n < 2 || k < 2 {
        return Err(StatsError::SampleTooSmall(n));
    }
    let (nf, kf) = (n as f64, k as f64);
    let grand = samples.iter().flat_map(|s| s.iter()).sum::<f64>() / (nf * kf);
    let ss_total: f64 = samples
        .iter()
        .flat_map(|s| s.iter())
        .map(|v| (v - grand).powi(2))
        .sum();
    let ss_cond: f64 = samples
        .iter()
        .map(|s| nf * (s.iter().sum::<f64>() / nf - grand).powi(2))
        .sum();
    let ss_subj: f64 = (0..n)
        .map(|i| {
            let m = samples.iter().map(|s| s[i]).sum::<f64>() / kf;
            kf * (m - grand).powi(2)
        })
        .sum();
    let ss_err = (ss_total - ss_cond - ss_subj).max(0.0);
    let df1 = kf - 1.0;
    let df2 = (kf - 1.0) * (nf - 1.0);
    let scale = ss_total.max(f64::MIN_POSITIVE);
    let (f, p) = if ss_cond <= 1e-12 * scale {
        (0.0, 1.0)
    } else if ss_err <= 1e-12 * scale {
        (f64::INFINITY, 0.0)
    } else {
        let f = (ss_cond / df1) / (ss_err / df2);
        let dist = FisherSnedecor::new(df1, df2).expect("positive df");
        (f, dist.sf(f))
    };
    Ok(OmnibusResult {
        test: OmnibusTest::RmAnova,
        statistic: f,
        df: (df1, df2),
        p,
    })
}

/// Mid-ranks (1-based) of `v`, plus the tie groups' sizes.
pub fn midranks(v: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut ranks = vec![0.0; v.len()];
    let mut ties = Vec::new();
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = r;
        }
        ties.push(j - i + 1);
        i = j + 1;
    }
    (ranks, ties)
}

/// Friedman chi-square statistic with the tie correction; `samples[j][i]` is
/// subject `i` under condition `j`.
pub fn friedman_statistic(samples: &[&[f64]]) -> Result<f64, StatsError> {
    let n = check_equal_n(samples)?;
    let k = samples.len();
    if n < 1 || k < 2 {
        return Err(StatsError::SampleTooSmall(n));
    }
    let (nf, kf) = (n as f64, k as f64);
    let mut rank_sums = vec![0.0; k];
    let mut tie_term = 0.0;
    let mut row = vec![0.0; k];
    for i in 0..n {
        for j in 0..k {
            row[j] = samples[j][i];
        }
        let (r, ties) = midranks(&row);
        for j in 0..k {
            rank_sums[j] += r[j];
        }
        tie_term += ties.iter().map(|&t| (t * t * t - t) as f64).sum::<f64>();
    }
    let denom = 1.0 - tie_term / (nf * (kf * kf * kf - kf));
    if denom <= 1e-12 {
        return Ok(0.0);
    }
    let ssr: f64 = rank_sums.iter().map(|r| r * r).sum();
    let q = 12.0 / (nf * kf * (kf + 1.0)) * ssr - 3.0 * nf * (kf + 1.0);
    Ok((q / denom).max(0.0))
}

pub fn friedman(samples: &[&[f64]]) -> Result<OmnibusResult, StatsError> {
    let q = friedman_statistic(samples)?;
    let df = (samples.len() - 1) as f64;
    let p = if q == 0.0 {
        1.0
    } else {
        ChiSquared::new(df).expect("positive df").sf(q)
    };
    Ok(OmnibusResult {
        test: OmnibusTest::Friedman,
        statistic: q,
        df: (df, 0.0),
        p,
    })
}

/// Omnibus test over three paired conditions.
pub fn omnibus(samples: &[&[f64]], parametric: bool) -> Result<OmnibusResult, StatsError> {
    let n = check_equal_n(samples)?;
    if n < MIN_SUBJECTS {
        return Err(StatsError::SampleTooSmall(n));
    }
    if parametric {
        rm_anova(samples)
    } else {
        friedman(samples)
    }
}

/// Benjamini-Hochberg step-up adjustment, returned in input order.
pub fn bh_fdr(p: &[f64]) -> Vec<f64> {
    let m = p.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| p[a].total_cmp(&p[b]));
    let mut adj = vec![0.0; m];
    let mut running = 1.0f64;
    for rank in (0..m).rev() {
        let i = order[rank];
        let v = p[i] * m as f64 / (rank + 1) as f64;
        running = running.min(v).min(1.0);
        adj[i] = running;
    }
    adj
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PairedTest {
    PairedT,
    Wilcoxon,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EffectKind {
    #[serde(rename = "Cohen's d")]
    CohensD,
    #[serde(rename = "Cliff's delta")]
    CliffsDelta,
}

impl fmt::Display for EffectKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EffectKind::CohensD => "Cohen's d",
            EffectKind::CliffsDelta => "Cliff's delta",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EffectLabel {
    Negligible,
    Small,
    Medium,
    Large,
    VeryLarge,
    Huge,
}

impl fmt::Display for EffectLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EffectLabel::Negligible => "negligible",
            EffectLabel::Small => "small",
            EffectLabel::Medium => "medium",
            EffectLabel::Large => "large",
            EffectLabel::VeryLarge => "very large",
            EffectLabel::Huge => "huge",
        })
    }
}

/// Upper bounds of the Cohen's |d| bands: negligible, small, medium, large,
/// very large; anything at or above the last is huge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DBands(pub [f64; 5]);

impl Default for DBands {
    fn default() -> Self {
        DBands([0.2, 0.5, 0.8, 1.2, 2.0])
    }
}

impl FromStr for DBands {
    type Err = StatsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let vals: Vec<f64> = s
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| StatsError::InvalidBands(s.to_string()))?;
        let arr: [f64; 5] = vals
            .try_into()
            .map_err(|_| StatsError::InvalidBands(s.to_string()))?;
        let increasing = arr.windows(2).all(|w| w[0] < w[1]) && arr[0] > 0.0;
        if !increasing {
            return Err(StatsError::InvalidBands(s.to_string()));
        }
        Ok(DBands(arr))
    }
}

pub const CLIFF_BANDS: [f64; 4] = [0.147, 0.33, 0.474, 0.714];

pub fn label_effect(kind: EffectKind, value: f64, d_bands: &DBands) -> Result<EffectLabel, StatsError> {
    use EffectLabel::*;
    if value.is_nan() {
        return Err(StatsError::OutOfRange(value));
    }
    let v = value.abs();
    match kind {
        EffectKind::CliffsDelta => {
            if v > 1.0 {
                return Err(StatsError::OutOfRange(value));
            }
            let labels = [Negligible, Small, Medium, Large];
            Ok(CLIFF_BANDS
                .iter()
                .zip(labels)
                .find(|(b, _)| v < **b)
                .map_or(VeryLarge, |(_, l)| l))
        }
        EffectKind::CohensD => {
            let labels = [Negligible, Small, Medium, Large, VeryLarge];
            Ok(d_bands
                .0
                .iter()
                .zip(labels)
                .find(|(b, _)| v < **b)
                .map_or(Huge, |(_, l)| l))
        }
    }
}

/// Dominance effect size over all cross pairs: `(#(a > b) - #(a < b)) / (n_a n_b)`.
pub fn cliffs_delta(a: &[f64], b: &[f64]) -> f64 {
    let mut s: i64 = 0;
    for x in a {
        for y in b {
            if x > y {
                s += 1;
            } else if x < y {
                s -= 1;
            }
        }
    }
    s as f64 / (a.len() * b.len()) as f64
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestOutcome {
    pub statistic: f64,
    pub p: f64,
}

/// Paired t-test on `a - b`; returns the outcome and Cohen's d_z.
pub fn paired_t(a: &[f64], b: &[f64]) -> Result<(TestOutcome, f64), StatsError> {
    if a.len() != b.len() {
        return Err(StatsError::LengthMismatch);
    }
    let n = a.len();
    if n < 2 {
        return Err(StatsError::SampleTooSmall(n));
    }
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let mean = d.iter().sum::<f64>() / n as f64;
    let sd = crate::summary::sample_sd(&d).unwrap_or(0.0);
    let scale = d.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if sd <= 1e-12 * scale.max(f64::MIN_POSITIVE) {
        return Ok(if mean == 0.0 {
            (TestOutcome { statistic: 0.0, p: 1.0 }, 0.0)
        } else {
            let inf = f64::INFINITY.copysign(mean);
            (TestOutcome { statistic: inf, p: 0.0 }, inf)
        });
    }
    let t = mean / (sd / (n as f64).sqrt());
    let dist = StudentsT::new(0.0, 1.0, (n - 1) as f64).expect("positive df");
    let p = (2.0 * dist.sf(t.abs())).min(1.0);
    Ok((TestOutcome { statistic: t, p }, mean / sd))
}

/// Exact null distribution of the positive-rank sum, indexed by twice the sum.
/// Counts are exact in f64 up to 2^53 sign assignments.
fn signed_rank_distribution(doubled_ranks: &[usize]) -> Vec<f64> {
    let total: usize = doubled_ranks.iter().sum();
    let mut dist = vec![0.0; total + 1];
    dist[0] = 1.0;
    let mut reach = 0;
    for &r in doubled_ranks {
        for s in (0..=reach).rev() {
            if dist[s] != 0.0 {
                dist[s + r] += dist[s];
            }
        }
        reach += r;
    }
    dist
}

/// Wilcoxon signed-rank test on `a - b` with zero differences dropped.
/// The statistic is `min(W+, W-)`; the p-value is two-sided, exact for up to
/// 25 non-zero pairs and from the tie- and continuity-corrected normal
/// approximation above that.
pub fn wilcoxon(a: &[f64], b: &[f64]) -> Result<TestOutcome, StatsError> {
    if a.len() != b.len() {
        return Err(StatsError::LengthMismatch);
    }
    let d: Vec<f64> = a
        .iter()
        .zip(b)
        .map(|(x, y)| x - y)
        .filter(|v| *v != 0.0)
        .collect();
    let n = d.len();
    if n == 0 {
        return Err(StatsError::AllZeroDifferences);
    }
    let abs: Vec<f64> = d.iter().map(|v| v.abs()).collect();
    let (ranks, ties) = midranks(&abs);
    let w_plus: f64 = d
        .iter()
        .zip(&ranks)
        .filter(|(v, _)| **v > 0.0)
        .map(|(_, r)| r)
        .sum();
    let nf = n as f64;
    let total = nf * (nf + 1.0) / 2.0;
    let statistic = w_plus.min(total - w_plus);

    let p = if n <= WILCOXON_EXACT_MAX {
        let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
        let dist = signed_rank_distribution(&doubled);
        let all: f64 = dist.iter().sum();
        let w2 = (2.0 * w_plus).round() as usize;
        let lower: f64 = dist[..=w2].iter().sum::<f64>() / all;
        let upper: f64 = dist[w2..].iter().sum::<f64>() / all;
        (2.0 * lower.min(upper)).min(1.0)
    } else {
        let mean = total / 2.0;
        let tie_adj: f64 = ties.iter().map(|&t| (t * t * t - t) as f64).sum::<f64>() / 48.0;
        let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_adj;
        if var <= 0.0 {
            1.0
        } else {
            let diff = w_plus - mean;
            let corrected = (diff.abs() - 0.5).max(0.0);
            let z = corrected / var.sqrt();
            (2.0 * std_normal().sf(z)).min(1.0)
        }
    };
    Ok(TestOutcome { statistic, p })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairwiseResult {
    pub feature: String,
    pub pair: (Condition, Condition),
    pub test: PairedTest,
    pub statistic: f64,
    pub p_raw: f64,
    pub p_adj: f64,
    pub effect: EffectKind,
    pub effect_value: f64,
    pub label: EffectLabel,
}

/// One paired comparison with its effect size; `p_adj` is left equal to `p_raw`.
pub fn pairwise(
    feature: &str,
    pair: (Condition, Condition),
    a: &[f64],
    b: &[f64],
    parametric: bool,
    d_bands: &DBands,
) -> Result<PairwiseResult, StatsError> {
    if a.len() != b.len() {
        return Err(StatsError::LengthMismatch);
    }
    if a.len() < MIN_SUBJECTS {
        return Err(StatsError::SampleTooSmall(a.len()));
    }
    let (test, outcome, effect, value) = if parametric {
        let (o, d) = paired_t(a, b)?;
        (PairedTest::PairedT, o, EffectKind::CohensD, d)
    } else {
        let o = wilcoxon(a, b)?;
        (PairedTest::Wilcoxon, o, EffectKind::CliffsDelta, cliffs_delta(a, b))
    };
    Ok(PairwiseResult {
        feature: feature.to_string(),
        pair,
        test,
        statistic: outcome.statistic,
        p_raw: outcome.p,
        p_adj: outcome.p,
        effect,
        effect_value: value,
        label: label_effect(effect, value, d_bands)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalityResult {
    pub condition: Condition,
    pub w: Option<f64>,
    pub p: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OmnibusEntry {
    pub test: OmnibusTest,
    pub statistic: f64,
    pub df: (f64, f64),
    pub p_raw: f64,
    pub p_adj: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureReport {
    pub name: String,
    pub unit: String,
    pub normality: Vec<NormalityResult>,
    pub parametric: bool,
    pub omnibus: Option<OmnibusEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
    pub pairwise: Vec<PairwiseResult>,
}

/// One row of the significant post-hoc table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PosthocRow {
    pub parameter: String,
    pub condition: String,
    pub p_value: f64,
    pub effect: EffectKind,
    pub effect_size: f64,
    pub interpretation: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatReport {
    pub n_subjects: usize,
    pub subjects: Vec<String>,
    pub alpha: f64,
    pub d_bands: DBands,
    pub features: Vec<FeatureReport>,
    pub posthoc: Vec<PosthocRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StatsConfig {
    pub d_bands: DBands,
}

/// Subject-by-condition values of every feature for subjects seen under all
/// three conditions. `values[c][s][f]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CohortMatrix {
    pub subjects: Vec<String>,
    pub values: [Vec<Vec<Option<f64>>>; 3],
}

impl CohortMatrix {
    pub fn from_rows(rows: &[FeatureVector]) -> Self {
        let mut by_subject: BTreeMap<&str, [Option<&FeatureVector>; 3]> = BTreeMap::new();
        for r in rows {
            by_subject.entry(&r.subject_id).or_default()[r.condition.index()] = Some(r);
        }
        let mut subjects = Vec::new();
        let mut values: [Vec<Vec<Option<f64>>>; 3] = Default::default();
        for (s, conds) in by_subject {
            if let [Some(a), Some(b), Some(c)] = conds {
                subjects.push(s.to_string());
                values[0].push(a.values.clone());
                values[1].push(b.values.clone());
                values[2].push(c.values.clone());
            }
        }
        Self { subjects, values }
    }

    pub fn column(&self, cond: usize, feature: usize) -> Vec<Option<f64>> {
        self.values[cond].iter().map(|row| row[feature]).collect()
    }
}

const PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

/// Runs the full statistics pipeline over a cohort feature table.
pub fn run_report(rows: &[FeatureVector], cfg: &StatsConfig) -> Result<StatReport, StatsError> {
    let cohort = CohortMatrix::from_rows(rows);
    let n = cohort.subjects.len();
    if n < MIN_SUBJECTS {
        return Err(StatsError::TooFewSubjects {
            found: n,
            needed: MIN_SUBJECTS,
        });
    }

    let mut features = Vec::with_capacity(N_FEATURES);
    let mut imputed: Vec<Option<[Vec<f64>; 3]>> = Vec::with_capacity(N_FEATURES);
    for (f, def) in feature_names().iter().enumerate() {
        let mut report = FeatureReport {
            name: def.name.to_string(),
            unit: def.unit.symbol().to_string(),
            normality: Vec::new(),
            parametric: false,
            omnibus: None,
            skipped: None,
            pairwise: Vec::new(),
        };
        let cols: Result<Vec<Vec<f64>>, _> = (0..3)
            .map(|c| impute_median(&cohort.column(c, f)))
            .collect();
        let cols = match cols {
            Ok(c) => c,
            Err(_) => {
                report.skipped = Some("no observed value in at least one condition".into());
                features.push(report);
                imputed.push(None);
                continue;
            }
        };
        let mut all_normal = true;
        for (c, col) in cols.iter().enumerate() {
            let (w, p) = match shapiro_wilk(col) {
                Ok((w, p)) => (Some(w), Some(p)),
                Err(_) => (None, None),
            };
            all_normal &= p.is_some_and(|p| p > ALPHA);
            report.normality.push(NormalityResult {
                condition: Condition::ALL[c],
                w,
                p,
            });
        }
        report.parametric = all_normal;
        let refs: Vec<&[f64]> = cols.iter().map(Vec::as_slice).collect();
        let omni = omnibus(&refs, all_normal)?;
        report.omnibus = Some(OmnibusEntry {
            test: omni.test,
            statistic: omni.statistic,
            df: omni.df,
            p_raw: omni.p,
            p_adj: omni.p,
        });
        features.push(report);
        imputed.push(Some([cols[0].clone(), cols[1].clone(), cols[2].clone()]));
    }

    let tested: Vec<usize> = (0..N_FEATURES)
        .filter(|&f| features[f].omnibus.is_some())
        .collect();
    let raw: Vec<f64> = tested
        .iter()
        .map(|&f| features[f].omnibus.unwrap().p_raw)
        .collect();
    for (&f, adj) in tested.iter().zip(bh_fdr(&raw)) {
        if let Some(o) = features[f].omnibus.as_mut() {
            o.p_adj = adj;
        }
    }

    let mut posthoc = Vec::new();
    for &f in &tested {
        let omni = features[f].omnibus.unwrap();
        if omni.p_adj >= ALPHA {
            continue;
        }
        let cols = imputed[f].as_ref().expect("tested features are imputed");
        let parametric = features[f].parametric;
        let name = features[f].name.clone();
        let mut results = Vec::with_capacity(3);
        for (i, j) in PAIRS {
            let pair = (Condition::ALL[i], Condition::ALL[j]);
            let r = match pairwise(&name, pair, &cols[i], &cols[j], parametric, &cfg.d_bands) {
                Ok(r) => r,
                Err(StatsError::AllZeroDifferences) => PairwiseResult {
                    feature: name.clone(),
                    pair,
                    test: PairedTest::Wilcoxon,
                    statistic: 0.0,
                    p_raw: 1.0,
                    p_adj: 1.0,
                    effect: EffectKind::CliffsDelta,
                    effect_value: 0.0,
                    label: EffectLabel::Negligible,
                },
                Err(e) => return Err(e),
            };
            results.push(r);
        }
        let raw: Vec<f64> = results.iter().map(|r| r.p_raw).collect();
        for (r, adj) in results.iter_mut().zip(bh_fdr(&raw)) {
            r.p_adj = adj;
        }
        for r in &results {
            if r.p_adj < ALPHA {
                posthoc.push(PosthocRow {
                    parameter: name.clone(),
                    condition: format!("{} vs {}", r.pair.0, r.pair.1),
                    p_value: r.p_adj,
                    effect: r.effect,
                    effect_size: r.effect_value,
                    interpretation: r.label.to_string(),
                });
            }
        }
        features[f].pairwise = results;
    }

    Ok(StatReport {
        n_subjects: n,
        subjects: cohort.subjects,
        alpha: ALPHA,
        d_bands: cfg.d_bands,
        features,
        posthoc,
    })
}
