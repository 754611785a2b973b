use std::collections::BTreeMap;

use super::ExperimentRecord;
use crate::error::{Error, Result};
use crate::stats::least_squares;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateKind {
    /// `error ≈ C ρ^t`; reports `ρ`.
    Geometric,
    /// `error ≈ C t^s`; reports `s`.
    LogLog,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    ConsensusError,
    Mse,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateFit {
    pub method: String,
    pub window: (usize, usize),
    pub kind: RateKind,
    /// Per-step ratio for [`RateKind::Geometric`], slope for [`RateKind::LogLog`].
    pub value: f64,
    /// RMS residual of the underlying line fit in log space.
    pub residual: f64,
}

/// Mean of `metric` over repetitions at each `t`, for one method.
/// Records lacking the metric are skipped.
pub fn mean_curve(records: &[ExperimentRecord], method: &str, metric: Metric) -> Vec<(usize, f64)> {
    let mut acc: BTreeMap<usize, (f64, usize)> = BTreeMap::new();
    for r in records.iter().filter(|r| r.method == method) {
        let v = match metric {
            Metric::ConsensusError => Some(r.consensus_error),
            Metric::Mse => r.mse,
        };
        if let Some(v) = v {
            let e = acc.entry(r.t).or_insert((0.0, 0));
            e.0 += v;
            e.1 += 1;
        }
    }
    acc.into_iter()
        .map(|(t, (s, c))| (t, s / c as f64))
        .collect()
}

/// Fits the repetition-averaged consensus error of `method` over
/// `t ∈ [window.0, window.1]`.
pub fn fit_rate(
    records: &[ExperimentRecord],
    method: &str,
    window: (usize, usize),
    kind: RateKind,
) -> Result<RateFit> {
    fit_rate_of(records, method, window, kind, Metric::ConsensusError)
}

pub fn fit_rate_of(
    records: &[ExperimentRecord],
    method: &str,
    window: (usize, usize),
    kind: RateKind,
    metric: Metric,
) -> Result<RateFit> {
    let (lo, hi) = window;
    let curve: Vec<(usize, f64)> = mean_curve(records, method, metric)
        .into_iter()
        .filter(|&(t, _)| t >= lo && t <= hi)
        .collect();
    if curve.len() < 5 {
        return Err(Error::Estimation(format!(
            "{method}: {} points in window [{lo}, {hi}], need at least 5",
            curve.len()
        )));
    }
    if let Some(&(t, v)) = curve.iter().find(|&&(_, v)| !(v > 0.0) || !v.is_finite()) {
        return Err(Error::Estimation(format!(
            "{method}: non-positive value {v} at t = {t}; shrink the window"
        )));
    }
    if kind == RateKind::LogLog && lo == 0 {
        return Err(Error::Estimation("log-log fit needs t >= 1".into()));
    }
    let xs: Vec<f64> = curve
        .iter()
        .map(|&(t, _)| match kind {
            RateKind::Geometric => t as f64,
            RateKind::LogLog => (t as f64).ln(),
        })
        .collect();
    let ys: Vec<f64> = curve.iter().map(|&(_, v)| v.ln()).collect();
    let fit =
        least_squares(&xs, &ys).ok_or_else(|| Error::Estimation("degenerate window".into()))?;
    Ok(RateFit {
        method: method.to_string(),
        window,
        kind,
        value: match kind {
            RateKind::Geometric => fit.slope.exp(),
            RateKind::LogLog => fit.slope,
        },
        residual: fit.residual,
    })
}
