//! Dense spectral analysis of gossip matrices.
//!
//! Only meant for verification and tuning at moderate sizes: everything here
//! goes through a dense symmetric eigendecomposition.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::matrix::GossipMatrix;
use crate::stats::{geometric_grid, least_squares, mean};

/// Largest `n` accepted by the dense code paths unless overridden.
pub const DEFAULT_DENSE_LIMIT: usize = 4096;

/// Points closer than this are merged by [`DiscreteMeasure::aggregated`].
pub const AGGREGATION_TOLERANCE: f64 = 1e-9;

/// Eigenvalues in descending order with matching orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct SpectralSummary {
    n: usize,
    eigenvalues: Vec<f64>,
    /// Column-major: eigenvector `i` occupies `vectors[i * n..(i + 1) * n]`.
    vectors: Vec<f64>,
}

impl SpectralSummary {
    pub fn n(&self) -> usize {
        self.n
    }

    /// `λ_1 ≥ λ_2 ≥ … ≥ λ_n`, clamped to `[-1, 1]`.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Unit eigenvector for `eigenvalues()[i]`.
    pub fn eigenvector(&self, i: usize) -> &[f64] {
        &self.vectors[i * self.n..(i + 1) * self.n]
    }

    /// `γ = 1 - λ_2`; 1 on a single vertex, where there is nothing to average.
    pub fn gap(&self) -> f64 {
        gap_of(&self.eigenvalues)
    }

    /// `γ̃ = min(1 - λ_2, 1 + λ_n)`.
    pub fn absolute_gap(&self) -> f64 {
        absolute_gap_of(&self.eigenvalues)
    }

    /// Number of distinct eigenvalues other than 1 (after merging within
    /// `tol`). This bounds the rounds needed by the optimal polynomial.
    pub fn distinct_nonunit_eigenvalues(&self, tol: f64) -> usize {
        let mut count = 0;
        let mut last: Option<f64> = None;
        for &l in &self.eigenvalues {
            if (1.0 - l).abs() <= tol {
                continue;
            }
            if last.is_none_or(|p| (p - l).abs() > tol) {
                count += 1;
            }
            last = Some(l);
        }
        count
    }

    /// Coordinates `⟨x, u^i⟩` of `x` in the eigenbasis.
    pub fn coordinates(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        Ok((0..self.n)
            .map(|i| self.eigenvector(i).iter().zip(x).map(|(u, v)| u * v).sum())
            .collect())
    }

    /// `Σ_i f(λ_i) ⟨x, u^i⟩ u^i`, i.e. `f(W) x`.
    pub fn apply_function(&self, x: &[f64], f: impl Fn(f64) -> f64) -> Result<Vec<f64>> {
        let coords = self.coordinates(x)?;
        let mut out = vec![0.0; self.n];
        for (i, c) in coords.iter().enumerate() {
            let s = c * f(self.eigenvalues[i]);
            for (o, u) in out.iter_mut().zip(self.eigenvector(i)) {
                *o += s * u;
            }
        }
        Ok(out)
    }
}

fn gap_of(eigenvalues: &[f64]) -> f64 {
    match eigenvalues.get(1) {
        Some(l2) => 1.0 - l2,
        None => 1.0,
    }
}

fn absolute_gap_of(eigenvalues: &[f64]) -> f64 {
    match (eigenvalues.get(1), eigenvalues.last()) {
        (Some(l2), Some(ln)) => (1.0 - l2).min(1.0 + ln),
        _ => 1.0,
    }
}

fn dense_matrix(w: &GossipMatrix, limit: usize) -> Result<DMatrix<f64>> {
    let n = w.n();
    if n > limit {
        return Err(Error::Capability(format!(
            "dense eigendecomposition limited to n <= {limit} (got n = {n}); \
             run iterations without spectral verification instead"
        )));
    }
    Ok(DMatrix::from_row_slice(n, n, &w.to_dense()))
}

/// Full eigendecomposition with the default size limit.
pub fn eigendecompose(w: &GossipMatrix) -> Result<SpectralSummary> {
    eigendecompose_with_limit(w, DEFAULT_DENSE_LIMIT)
}

pub fn eigendecompose_with_limit(w: &GossipMatrix, limit: usize) -> Result<SpectralSummary> {
    let n = w.n();
    let m = dense_matrix(w, limit)?;
    if n == 0 {
        return Ok(SpectralSummary {
            n,
            eigenvalues: Vec::new(),
            vectors: Vec::new(),
        });
    }
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let mut eigenvalues = Vec::with_capacity(n);
    let mut vectors = Vec::with_capacity(n * n);
    for &i in &order {
        eigenvalues.push(eig.eigenvalues[i].clamp(-1.0, 1.0));
        let col = eig.eigenvectors.column(i);
        // Fix the sign so that the largest entry is positive.
        let pivot =
            col.iter().copied().fold(
                0.0f64,
                |acc, x| if x.abs() > acc.abs() + 1e-12 { x } else { acc },
            );
        let sign = if pivot < 0.0 { -1.0 } else { 1.0 };
        vectors.extend(col.iter().map(|x| sign * x));
    }
    Ok(SpectralSummary {
        n,
        eigenvalues,
        vectors,
    })
}

/// Descending, clamped eigenvalues without eigenvectors. Cheaper than
/// [`eigendecompose`] when only gaps are needed.
pub fn eigenvalues(w: &GossipMatrix) -> Result<Vec<f64>> {
    let m = dense_matrix(w, DEFAULT_DENSE_LIMIT)?;
    let mut values: Vec<f64> = m
        .symmetric_eigenvalues()
        .iter()
        .map(|l| l.clamp(-1.0, 1.0))
        .collect();
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}

/// `(γ, γ̃)` from the eigenvalues alone.
pub fn gaps(w: &GossipMatrix) -> Result<(f64, f64)> {
    let values = eigenvalues(w)?;
    Ok((gap_of(&values), absolute_gap_of(&values)))
}

/// A finite measure `Σ_i w_i δ_{λ_i}` on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn new(points: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if points.len() != weights.len() {
            return Err(Error::DimensionMismatch {
                expected: points.len(),
                got: weights.len(),
            });
        }
        if let Some(w) = weights.iter().find(|w| !(**w >= 0.0)) {
            return Err(Error::Domain(format!("measure weight {w} is negative")));
        }
        if let Some(p) = points.iter().find(|p| !(p.abs() <= 1.0 + 1e-9)) {
            return Err(Error::Domain(format!(
                "support point {p} lies outside [-1, 1]"
            )));
        }
        Ok(DiscreteMeasure { points, weights })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `∫ f dσ`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(&l, &w)| w * f(l))
            .sum()
    }

    /// `σ([lo, hi])`.
    pub fn mass_in(&self, lo: f64, hi: f64) -> f64 {
        self.integrate(|l| if l >= lo && l <= hi { 1.0 } else { 0.0 })
    }

    /// Sorted by point, with points closer than `tol` merged and their
    /// weights added. Zero-weight points are dropped.
    pub fn aggregated(&self, tol: f64) -> DiscreteMeasure {
        let mut pairs: Vec<(f64, f64)> = self
            .points
            .iter()
            .copied()
            .zip(self.weights.iter().copied())
            .filter(|&(_, w)| w > 0.0)
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut points: Vec<f64> = Vec::new();
        let mut weights: Vec<f64> = Vec::new();
        let mut anchor = f64::NEG_INFINITY;
        for (p, w) in pairs {
            if p - anchor <= tol {
                *weights.last_mut().unwrap() += w;
            } else {
                anchor = p;
                points.push(p);
                weights.push(w);
            }
        }
        DiscreteMeasure { points, weights }
    }
}

/// `σ(G, W, v) = Σ_i (u^i_v)² δ_{λ_i}`.
pub fn spectral_measure_at_vertex(s: &SpectralSummary, v: usize) -> Result<DiscreteMeasure> {
    if v >= s.n() {
        return Err(Error::Precondition(format!(
            "vertex {v} out of range for n = {}",
            s.n()
        )));
    }
    let weights = (0..s.n()).map(|i| s.eigenvector(i)[v].powi(2)).collect();
    Ok(DiscreteMeasure {
        points: s.eigenvalues.clone(),
        weights,
    })
}

/// The error measure of a signal: weights `⟨ξ - ξ̄1, u^i⟩²` at `λ_i`.
///
/// The mean is projected out before taking coordinates, so the total mass is
/// the squared consensus error `‖ξ - ξ̄1‖²` even when `λ = 1` is degenerate.
/// For a connected graph the weight at `λ_1` vanishes and the remaining
/// weights are exactly `⟨ξ, u^i⟩²`, `i ≥ 2`.
pub fn spectral_measure_of_signal(s: &SpectralSummary, xi: &[f64]) -> Result<DiscreteMeasure> {
    if xi.len() != s.n() {
        return Err(Error::DimensionMismatch {
            expected: s.n(),
            got: xi.len(),
        });
    }
    let m = mean(xi);
    let centered: Vec<f64> = xi.iter().map(|x| x - m).collect();
    let weights = s
        .coordinates(&centered)?
        .into_iter()
        .map(|c| c * c)
        .collect();
    Ok(DiscreteMeasure {
        points: s.eigenvalues.clone(),
        weights,
    })
}

/// Number of E samples used by [`spectral_dimension_estimate`].
pub const DIMENSION_GRID_POINTS: usize = 12;

/// Estimates the spectral dimension as twice the log-log slope of
/// `E ↦ σ([1 - E, 1])` over a geometric grid on `[e_lo, e_hi]`.
///
/// The range should sit between the spectral gap and 1; it is left to the
/// caller since finite graphs have no canonical choice.
pub fn spectral_dimension_estimate(m: &DiscreteMeasure, e_lo: f64, e_hi: f64) -> Result<f64> {
    if !(e_lo > 0.0 && e_hi > e_lo) {
        return Err(Error::Domain(format!(
            "E range [{e_lo}, {e_hi}] must satisfy 0 < lo < hi"
        )));
    }
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for e in geometric_grid(e_lo, e_hi, DIMENSION_GRID_POINTS) {
        let mass = m.mass_in(1.0 - e, f64::INFINITY);
        if mass > 0.0 {
            xs.push(e.ln());
            ys.push(mass.ln());
        }
    }
    if xs.len() < 3 {
        return Err(Error::Estimation(format!(
            "only {} E samples carry mass in [{e_lo}, {e_hi}]",
            xs.len()
        )));
    }
    let fit =
        least_squares(&xs, &ys).ok_or_else(|| Error::Estimation("degenerate E grid".into()))?;
    Ok(2.0 * fit.slope)
}

/// Lazy-walk return probability `p_t = Σ_i w_i ((1 + λ_i)/2)^t`.
pub fn return_probability(m: &DiscreteMeasure, t: u32) -> f64 {
    m.integrate(|l| ((1.0 + l) / 2.0).powi(t as i32))
}
