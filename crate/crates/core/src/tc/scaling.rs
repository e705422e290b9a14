//! Growth of the expected number of T_C-k-sets (or T_C-k-edges) with `n`
//! for uniform points in a square `A = [-h, h]^2` and a disk `C` of radius
//! `rho` with `2C ⊆ A`.

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::family::region_set_counts;
use super::{tc_edge_table, BodySpec, TcError};
use crate::geom::{Point2, PointSet};
use crate::scalar::format_f64;
use crate::{Points, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScalingStatistic {
    /// `a'_k`: boundary-free subsets induced by translates inside `A`.
    Sets,
    /// `e_k`: T_C-k-edges.
    Edges,
}

impl ScalingStatistic {
    pub fn as_str(self) -> &'static str {
        match self {
            ScalingStatistic::Sets => "sets",
            ScalingStatistic::Edges => "edges",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingConfig {
    pub rho: Rational,
    pub half_side: Rational,
    pub ns: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub statistic: ScalingStatistic,
    /// Points are drawn on the grid `h 2^-grid_bits`.
    pub grid_bits: u32,
}

impl ScalingConfig {
    pub fn new(ns: Vec<usize>, trials: usize, seed: u64, statistic: ScalingStatistic) -> ScalingConfig {
        ScalingConfig {
            rho: Rational::from_integer(1.into()),
            half_side: Rational::from_integer(2.into()),
            ns,
            trials,
            seed,
            statistic,
            grid_bits: 16,
        }
    }

    /// `area(C) / area(A)`.
    pub fn p(&self) -> f64 {
        let rho = self.rho.to_f64().unwrap_or(f64::NAN);
        let h = self.half_side.to_f64().unwrap_or(f64::NAN);
        std::f64::consts::PI * rho * rho / (4.0 * h * h)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingRecord {
    pub n: usize,
    pub trials: usize,
    pub argmax_k: usize,
    pub max_mean: f64,
    pub max_stderr: f64,
    pub p: f64,
    pub pn: f64,
    pub window: f64,
    pub within_window: bool,
    pub redraws: usize,
    pub means: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingResult {
    pub statistic: ScalingStatistic,
    pub records: Vec<ScalingRecord>,
    /// Least-squares slope of `ln max_k mean` against `ln n`.
    pub slope: f64,
}

impl ScalingResult {
    pub const CSV_HEADER: &'static str = "statistic,n,trials,argmax_k,max_mean,max_stderr,p,pn,window,within_window,slope";

    pub fn to_csv(&self) -> String {
        let mut out = format!("{}\n", Self::CSV_HEADER);
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{}\n",
                self.statistic.as_str(),
                r.n,
                r.trials,
                r.argmax_k,
                format_f64(r.max_mean),
                format_f64(r.max_stderr),
                format_f64(r.p),
                format_f64(r.pn),
                format_f64(r.window),
                r.within_window,
                format_f64(self.slope)
            ));
        }
        out
    }
}

/// `n` distinct points uniform on the grid `h 2^-bits` inside `[-h, h]^2`.
pub fn uniform_square_points(n: usize, half_side: &Rational, bits: u32, rng: &mut ChaCha8Rng) -> Points {
    let m = 1i64 << bits;
    loop {
        let pts: Vec<_> = (0..n)
            .map(|_| {
                let x = rng.random_range(-m..=m);
                let y = rng.random_range(-m..=m);
                Point2::new(
                    half_side * Rational::new(x.into(), m.into()),
                    half_side * Rational::new(y.into(), m.into()),
                )
            })
            .collect();
        if let Ok(s) = PointSet::new(pts) {
            return s;
        }
    }
}

/// Per-k counts for one trial, redrawing degenerate samples. Trial `t` uses
/// seed `seed + t` on stream `n`.
pub fn scaling_trial(cfg: &ScalingConfig, n: usize, trial: usize) -> Result<(Vec<usize>, usize), TcError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(trial as u64));
    rng.set_stream(n as u64);
    let body = BodySpec::disk(cfg.rho.clone());
    for redraws in 0..64 {
        let s = uniform_square_points(n, &cfg.half_side, cfg.grid_bits, &mut rng);
        let counts = match cfg.statistic {
            ScalingStatistic::Sets => region_set_counts(&s, &cfg.rho, &cfg.half_side),
            ScalingStatistic::Edges => tc_edge_table(&body, &s).map(|t| t.counts()),
        };
        match counts {
            Ok(mut c) => {
                c.resize(n + 1, 0);
                return Ok((c, redraws));
            }
            Err(TcError::NotGeneralPositionRelativeToC(_)) | Err(TcError::Degenerate(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(TcError::Degenerate(format!("no usable sample for n = {n}, trial {trial}")))
}

pub fn tc_scaling_experiment(cfg: &ScalingConfig) -> Result<ScalingResult, TcError> {
    let two_rho = &cfg.rho * Rational::from_integer(2.into());
    if two_rho > cfg.half_side {
        return Err(TcError::BodyNotContained);
    }
    if cfg.trials == 0 || cfg.ns.is_empty() {
        return Err(TcError::InvalidParameter("need trials >= 1 and a non-empty n grid".into()));
    }
    let p = cfg.p();
    let mut records = Vec::new();
    for &n in &cfg.ns {
        let results: Vec<Result<(Vec<usize>, usize), TcError>> =
            (0..cfg.trials).into_par_iter().map(|t| scaling_trial(cfg, n, t)).collect();
        let mut sums = vec![0.0f64; n + 1];
        let mut squares = vec![0.0f64; n + 1];
        let mut redraws = 0;
        for r in results {
            let (c, d) = r?;
            redraws += d;
            for (k, &v) in c.iter().enumerate() {
                sums[k] += v as f64;
                squares[k] += (v * v) as f64;
            }
        }
        let t = cfg.trials as f64;
        let means: Vec<f64> = sums.iter().map(|s| s / t).collect();
        let argmax_k = (0..=n).fold(0, |best, k| if means[k] > means[best] { k } else { best });
        let var = if cfg.trials > 1 {
            (squares[argmax_k] - t * means[argmax_k] * means[argmax_k]) / (t - 1.0)
        } else {
            0.0
        };
        let pn = p * n as f64;
        let window = 4.0 * (n as f64 * (n as f64).ln()).sqrt();
        records.push(ScalingRecord {
            n,
            trials: cfg.trials,
            argmax_k,
            max_mean: means[argmax_k],
            max_stderr: (var.max(0.0) / t).sqrt(),
            p,
            pn,
            window,
            within_window: (argmax_k as f64 - pn).abs() <= window,
            redraws,
            means,
        });
    }
    let slope = log_log_slope(&records);
    Ok(ScalingResult { statistic: cfg.statistic, records, slope })
}

fn log_log_slope(records: &[ScalingRecord]) -> f64 {
    if records.len() < 2 || records.iter().any(|r| r.max_mean <= 0.0) {
        return f64::NAN;
    }
    let xs: Vec<f64> = records.iter().map(|r| (r.n as f64).ln()).collect();
    let ys: Vec<f64> = records.iter().map(|r| r.max_mean.ln()).collect();
    let mx = xs.iter().sum::<f64>() / xs.len() as f64;
    let my = ys.iter().sum::<f64>() / ys.len() as f64;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
