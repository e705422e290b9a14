//! Monte Carlo estimates of the expected number of k-facets.
//!
//! Two estimators are provided. The direct one samples point sets and counts.
//! The formula one samples pairs and averages the integrand of the
//! one-dimensional integral representation
//! `2 C(n,2) C(n-2,k) E[T^k (1-T)^(n-2-k)]`, where `T` is the measure of the
//! halfplane above the line through the pair. The leading factor 2 relies on
//! `T` and `1 - T` having the same law, which holds for centrally symmetric
//! distributions; [`Integrand::TwoSided`] drops that assumption.

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dist::{cell_index, equiprob_vertical_lines, halfplane_measure, sample, DistError, DistributionSpec, OrientedLine};
use crate::kfacet::{count_k_facets, k_edge_table, KFacetError};
use crate::scalar::{format_f64, rational_from_f64};
use crate::Point;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EstimatorError {
    #[error("k = {k} is outside the admissible range for n = {n}")]
    KOutOfRange { n: usize, k: usize },
    #[error("k = {k} is not the halving level of n = {n}")]
    KMismatch { n: usize, k: usize },
    #[error("at least one trial is required")]
    NoTrials,
    #[error("envelope inequality failed at n = {n}, k = {k}")]
    EnvelopeViolated { n: usize, k: usize },
    #[error("no pair landed in a common cell after {0} draws")]
    NoAcceptedPairs(u64),
    #[error(transparent)]
    Dist(#[from] DistError),
    #[error(transparent)]
    KFacet(#[from] KFacetError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Direct,
    Formula,
    FormulaConditional,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Direct => "direct",
            Method::Formula => "formula",
            Method::FormulaConditional => "formula-conditional",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateRecord {
    pub spec_id: String,
    pub method: Method,
    pub n: usize,
    pub k: usize,
    /// Point sets for the direct method, pairs for the formula methods.
    pub trials: usize,
    pub mean: f64,
    pub stderr: f64,
    pub seed: u64,
    /// Direct: degenerate samples that were perturbed. Formula: pairs redrawn.
    pub repaired: usize,
    /// Acceptance rate of the same-cell rejection step, when used.
    pub acceptance: Option<f64>,
}

impl EstimateRecord {
    pub const CSV_HEADER: &'static str = "spec_id,method,n,k,trials,mean,stderr,seed,bound_54,satisfied";

    pub fn csv_row(&self) -> String {
        let report = bound_check_54(self);
        let mut row = String::new();
        let _ = write!(
            row,
            "{},{},{},{},{},{},{},{},{},{}",
            self.spec_id,
            self.method.as_str(),
            self.n,
            self.k,
            self.trials,
            format_f64(self.mean),
            format_f64(self.stderr),
            self.seed,
            format_f64(report.bound),
            report.satisfied
        );
        row
    }
}

/// Mean and standard error with compensated sums, two passes.
pub fn summarize(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = neumaier(values.iter().copied()) / n as f64;
    if n < 2 {
        return (mean, f64::NAN);
    }
    let ss = neumaier(values.iter().map(|v| (v - mean) * (v - mean)));
    (mean, (ss / (n - 1) as f64 / n as f64).sqrt())
}

fn neumaier(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

fn check_k(n: usize, k: usize) -> Result<(), EstimatorError> {
    if n < 2 || k + 2 > n {
        Err(EstimatorError::KOutOfRange { n, k })
    } else {
        Ok(())
    }
}

/// Per-trial k-facet counts for every requested `k`, one sample per trial.
///
/// Trial `i` samples with seed `seed + i`; results are collected in trial
/// order, so the output does not depend on the thread pool.
fn direct_counts(
    spec: &DistributionSpec,
    n: usize,
    ks: &[usize],
    trials: usize,
    seed: u64,
) -> Result<(Vec<Vec<f64>>, usize), EstimatorError> {
    let per_trial: Vec<Result<(Vec<f64>, bool), EstimatorError>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let s = sample(spec, n, seed.wrapping_add(i as u64))?;
            let table = k_edge_table(&s.points)?;
            let counts = ks
                .iter()
                .map(|&k| count_k_facets(&table, k).map(|c| c as f64))
                .collect::<Result<Vec<_>, _>>()?;
            Ok((counts, s.perturbed))
        })
        .collect();
    let mut by_k = vec![Vec::with_capacity(trials); ks.len()];
    let mut repaired = 0;
    for r in per_trial {
        let (counts, perturbed) = r?;
        repaired += perturbed as usize;
        for (slot, c) in by_k.iter_mut().zip(counts) {
            slot.push(c);
        }
    }
    Ok((by_k, repaired))
}

/// Direct estimate of `E_P(k, n)`.
pub fn direct_expected_k_edges(
    spec: &DistributionSpec,
    n: usize,
    k: usize,
    trials: usize,
    seed: u64,
) -> Result<EstimateRecord, EstimatorError> {
    Ok(direct_expected_k_edges_multi(spec, n, &[k], trials, seed)?.remove(0))
}

/// Direct estimates for several `k` from the same sampled sets.
pub fn direct_expected_k_edges_multi(
    spec: &DistributionSpec,
    n: usize,
    ks: &[usize],
    trials: usize,
    seed: u64,
) -> Result<Vec<EstimateRecord>, EstimatorError> {
    if trials == 0 {
        return Err(EstimatorError::NoTrials);
    }
    for &k in ks {
        check_k(n, k)?;
    }
    let (by_k, repaired) = direct_counts(spec, n, ks, trials, seed)?;
    Ok(ks
        .iter()
        .zip(by_k)
        .map(|(&k, values)| {
            let (mean, stderr) = summarize(&values);
            EstimateRecord {
                spec_id: spec.id(),
                method: Method::Direct,
                n,
                k,
                trials,
                mean,
                stderr,
                seed,
                repaired,
                acceptance: None,
            }
        })
        .collect())
}

/// Which integrand the formula estimator averages.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Integrand {
    /// `2 C(n,2) C(n-2,k) T^k (1-T)^(n-2-k)`, factor 1 at the halving level.
    #[default]
    Symmetric,
    /// `C(n,2) C(n-2,k) [T^k (1-T)^m + (1-T)^k T^m]`, `m = n-2-k`, one term
    /// at the halving level. Valid without central symmetry.
    TwoSided,
}

pub fn ln_choose(n: usize, k: usize) -> f64 {
    libm::lgamma(n as f64 + 1.0) - libm::lgamma(k as f64 + 1.0) - libm::lgamma((n - k) as f64 + 1.0)
}

/// `e * ln(t)` with the convention `0 * ln 0 = 0`.
fn ln_pow(t: f64, e: usize) -> f64 {
    if e == 0 {
        0.0
    } else {
        e as f64 * t.ln()
    }
}

/// The formula integrand at one value of `T`, evaluated in log space.
pub fn integrand(n: usize, k: usize, t: f64, kind: Integrand) -> f64 {
    let m = n - 2 - k;
    let base = ln_choose(n, 2) + ln_choose(n - 2, k);
    let one_side = |a: f64, b: f64| (base + ln_pow(a, k) + ln_pow(b, m)).exp();
    match kind {
        Integrand::Symmetric if k == m => one_side(t, 1.0 - t),
        Integrand::Symmetric => 2.0 * one_side(t, 1.0 - t),
        Integrand::TwoSided if k == m => one_side(t, 1.0 - t),
        Integrand::TwoSided => one_side(t, 1.0 - t) + one_side(1.0 - t, t),
    }
}

const PAIR_CHUNK: usize = 4096;

/// Up to `count` pairs drawn from chunk `chunk`'s own stream, with the
/// number of redraws of vertical or coincident pairs.
fn draw_pairs(spec: &DistributionSpec, seed: u64, chunk: usize, count: usize) -> (Vec<(Point, Point)>, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk as u64 + 1);
    let mut out = Vec::with_capacity(count);
    let mut redraws = 0;
    while out.len() < count {
        let (ax, ay) = spec.draw(&mut rng);
        let (bx, by) = spec.draw(&mut rng);
        if ax == bx {
            redraws += 1;
            continue;
        }
        let p = |x: f64, y: f64| crate::geom::Point2::new(rational_from_f64(x).expect("finite"), rational_from_f64(y).expect("finite"));
        out.push((p(ax, ay), p(bx, by)));
    }
    (out, redraws)
}

/// Formula estimate with an explicit measure, so that `T` can be stubbed.
pub fn formula_with_measure<F>(
    spec: &DistributionSpec,
    n: usize,
    k: usize,
    pair_samples: usize,
    seed: u64,
    kind: Integrand,
    measure: F,
) -> Result<EstimateRecord, EstimatorError>
where
    F: Fn(&OrientedLine) -> Result<f64, DistError> + Sync,
{
    check_k(n, k)?;
    if pair_samples == 0 {
        return Err(EstimatorError::NoTrials);
    }
    let chunks = pair_samples.div_ceil(PAIR_CHUNK);
    let parts: Vec<Result<(Vec<f64>, usize), EstimatorError>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let count = PAIR_CHUNK.min(pair_samples - c * PAIR_CHUNK);
            let (pairs, redraws) = draw_pairs(spec, seed, c, count);
            let vals = pairs
                .iter()
                .map(|(p, q)| Ok(integrand(n, k, measure(&OrientedLine::above(p, q))?, kind)))
                .collect::<Result<Vec<_>, EstimatorError>>()?;
            Ok((vals, redraws))
        })
        .collect();
    let mut values = Vec::with_capacity(pair_samples);
    let mut repaired = 0;
    for p in parts {
        let (v, r) = p?;
        values.extend(v);
        repaired += r;
    }
    let (mean, stderr) = summarize(&values);
    Ok(EstimateRecord {
        spec_id: spec.id(),
        method: Method::Formula,
        n,
        k,
        trials: pair_samples,
        mean,
        stderr,
        seed,
        repaired,
        acceptance: None,
    })
}

/// Formula estimate of `E_P(k, n)` using the closed-form halfplane measure.
pub fn formula_expected_k_edges(
    spec: &DistributionSpec,
    n: usize,
    k: usize,
    pair_samples: usize,
    seed: u64,
) -> Result<EstimateRecord, EstimatorError> {
    if !spec.has_closed_form() {
        return Err(DistError::MeasureUnavailable(spec.id()).into());
    }
    formula_with_measure(spec, n, k, pair_samples, seed, Integrand::Symmetric, |l| halfplane_measure(spec, l))
}

/// Mean of the symmetric integrand over pairs conditioned to fall in the
/// same of `m + 1` equal-mass vertical slabs, by rejection.
///
/// The record's `acceptance` is the fraction of drawn pairs that were kept.
pub fn formula_conditional_same_cell(
    spec: &DistributionSpec,
    n: usize,
    k: usize,
    m: usize,
    pair_samples: usize,
    seed: u64,
) -> Result<EstimateRecord, EstimatorError> {
    check_k(n, k)?;
    if pair_samples == 0 {
        return Err(EstimatorError::NoTrials);
    }
    let lines = equiprob_vertical_lines(spec, m)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = Vec::with_capacity(pair_samples);
    let (mut drawn, mut redraws) = (0u64, 0usize);
    let limit = 1000 * (pair_samples as u64) * (m as u64 + 1);
    while values.len() < pair_samples {
        if drawn >= limit {
            return Err(EstimatorError::NoAcceptedPairs(drawn));
        }
        let (ax, ay) = spec.draw(&mut rng);
        let (bx, by) = spec.draw(&mut rng);
        drawn += 1;
        if ax == bx {
            redraws += 1;
            continue;
        }
        let p = crate::geom::Point2::new(rational_from_f64(ax).expect("finite"), rational_from_f64(ay).expect("finite"));
        let q = crate::geom::Point2::new(rational_from_f64(bx).expect("finite"), rational_from_f64(by).expect("finite"));
        match (cell_index(&lines, &p), cell_index(&lines, &q)) {
            (Ok(a), Ok(b)) if a == b => {
                let t = halfplane_measure(spec, &OrientedLine::above(&p, &q))?;
                values.push(integrand(n, k, t, Integrand::Symmetric));
            }
            _ => {}
        }
    }
    let (mean, stderr) = summarize(&values);
    Ok(EstimateRecord {
        spec_id: spec.id(),
        method: Method::FormulaConditional,
        n,
        k,
        trials: pair_samples,
        mean,
        stderr,
        seed,
        repaired: redraws,
        acceptance: Some(pair_samples as f64 / (drawn as f64 - redraws as f64)),
    })
}

/// Sorted sample of `T`-values for pairs drawn from `spec`.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalCdf {
    values: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(mut values: Vec<f64>) -> Self {
        values.sort_by(|a, b| a.total_cmp(b));
        EmpiricalCdf { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Fraction of sampled values `<= t`.
    pub fn eval(&self, t: f64) -> f64 {
        self.values.partition_point(|&v| v <= t) as f64 / self.values.len() as f64
    }
}

pub fn empirical_t_cdf(spec: &DistributionSpec, pairs: usize, seed: u64) -> Result<EmpiricalCdf, EstimatorError> {
    let (pts, _) = draw_pairs(spec, seed, 0, pairs);
    let values = pts
        .iter()
        .map(|(p, q)| halfplane_measure(spec, &OrientedLine::above(p, q)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(EmpiricalCdf::new(values))
}

/// `sqrt(n-2) / (sqrt(k) sqrt(n-2-k))`, after checking in log space that it
/// dominates `2 C(n-2,k) (k/(n-2))^k ((n-2-k)/(n-2))^(n-2-k)`.
pub fn stirling_envelope(n: usize, k: usize) -> Result<f64, EstimatorError> {
    if k < 1 || n < 4 || k > n - 3 {
        return Err(EstimatorError::KOutOfRange { n, k });
    }
    let m = (n - 2) as f64;
    let kf = k as f64;
    let rest = m - kf;
    let envelope = m.sqrt() / (kf.sqrt() * rest.sqrt());
    let lhs = std::f64::consts::LN_2 + ln_choose(n - 2, k) + kf * (kf / m).ln() + rest * (rest / m).ln();
    if lhs > envelope.ln() + 1e-12 {
        return Err(EstimatorError::EnvelopeViolated { n, k });
    }
    Ok(envelope)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub bound: f64,
    /// `mean + 3 stderr <= bound`.
    pub satisfied: bool,
    /// `mean - 3 stderr > bound`: a violation noise cannot explain.
    pub violation: bool,
}

pub fn bound_54(n: usize, k: usize) -> f64 {
    10.0 * n as f64 * ((k + 1) as f64).powf(0.25)
}

/// Compares an estimate with `10 n (k+1)^(1/4)`.
pub fn bound_check_54(record: &EstimateRecord) -> BoundReport {
    let bound = bound_54(record.n, record.k);
    let se = if record.stderr.is_finite() { record.stderr } else { 0.0 };
    BoundReport {
        bound,
        satisfied: record.mean + 3.0 * se <= bound,
        violation: record.mean - 3.0 * se > bound,
    }
}

/// `mean / n^(3/2)` for a halving-level estimate.
pub fn bound_report_basic(record: &EstimateRecord) -> Result<f64, EstimatorError> {
    let (n, k) = (record.n, record.k);
    if n % 2 == 1 || n < 2 || k != (n - 2) / 2 {
        return Err(EstimatorError::KMismatch { n, k });
    }
    Ok(record.mean / (n as f64).powf(1.5))
}
