use super::{Coeffs, TabulatedRecurrence};
use crate::error::{Error, Result};
use crate::spectral::DiscreteMeasure;

/// Orthogonal polynomials for `τ = (1-λ)σ`, normalized to `π_t(1) = 1`,
/// built by brute-force Gram–Schmidt on a discrete measure `σ`.
///
/// Each `π_{t+1}` is obtained by orthogonalizing `λ π_t` against all lower
/// degrees (modified Gram–Schmidt with one reorthogonalization pass), which
/// spans the same space as the monomials but is far better conditioned.
/// The full expansion is kept so polynomials can be evaluated stably
/// anywhere; monomial coefficients are derived from it.
#[derive(Debug, Clone)]
pub struct OraclePolynomials {
    measure: DiscreteMeasure,
    /// `π_{t+1} = scale_t (λ π_t - Σ_{s ≤ t} h_{t,s} π_s)`.
    expansion: Vec<(f64, Vec<f64>)>,
    monomials: Vec<Vec<f64>>,
    coeffs: Vec<Coeffs>,
}

/// Builds `π_0, …, π_T` with `T = min(t_max, K)`, where `K` is the number of
/// support points carrying `τ`-mass. `π_K` vanishes on the whole support.
pub fn oracle_from_measure(sigma: &DiscreteMeasure, t_max: usize) -> Result<OraclePolynomials> {
    let (points, tau): (Vec<f64>, Vec<f64>) = sigma
        .points()
        .iter()
        .zip(sigma.weights())
        .map(|(&l, &w)| (l, (1.0 - l) * w))
        .filter(|&(_, w)| w > 0.0)
        .unzip();
    if points.is_empty() {
        return Err(Error::DegenerateMeasure(
            "all mass sits at lambda = 1; no error to fit".into(),
        ));
    }
    let support = distinct_count(&points);
    let degree = t_max.min(support);
    let inner = |p: &[f64], q: &[f64]| -> f64 {
        tau.iter().zip(p).zip(q).map(|((w, a), b)| w * a * b).sum()
    };

    let mut values: Vec<Vec<f64>> = vec![vec![1.0; points.len()]];
    let mut norms = vec![inner(&values[0], &values[0])];
    let mut expansion = Vec::with_capacity(degree);
    for t in 0..degree {
        let mut r: Vec<f64> = values[t].iter().zip(&points).map(|(v, l)| v * l).collect();
        let mut h = vec![0.0; t + 1];
        for _pass in 0..2 {
            for s in (0..=t).rev() {
                if norms[s] == 0.0 {
                    continue;
                }
                let coef = inner(&r, &values[s]) / norms[s];
                h[s] += coef;
                for (ri, vi) in r.iter_mut().zip(&values[s]) {
                    *ri -= coef * vi;
                }
            }
        }
        // λπ_t - Σ h_s π_s evaluated at λ = 1, using π_s(1) = 1.
        let at_one = 1.0 - h.iter().sum::<f64>();
        let scale = 1.0 / at_one;
        for ri in r.iter_mut() {
            *ri *= scale;
        }
        norms.push(inner(&r, &r));
        values.push(r);
        expansion.push((scale, h));
    }

    let monomials = monomial_coefficients(&expansion);
    let mut coeffs = Vec::new();
    for t in 0..degree {
        let next_norm = norms[t + 1];
        if next_norm <= 0.0 || t + 1 >= support {
            break;
        }
        let lp: Vec<f64> = values[t].iter().zip(&points).map(|(v, l)| v * l).collect();
        let cross = inner(&lp, &values[t + 1]);
        let a = next_norm / cross;
        let b = -next_norm * inner(&lp, &values[t]) / (cross * norms[t]);
        let c = if t == 0 {
            0.0
        } else {
            next_norm * inner(&lp, &values[t - 1]) / (cross * norms[t - 1])
        };
        coeffs.push(Coeffs { a, b, c });
    }

    Ok(OraclePolynomials {
        measure: sigma.clone(),
        expansion,
        monomials,
        coeffs,
    })
}

fn distinct_count(points: &[f64]) -> usize {
    let mut sorted = points.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);
    sorted.len()
}

fn monomial_coefficients(expansion: &[(f64, Vec<f64>)]) -> Vec<Vec<f64>> {
    let mut polys: Vec<Vec<f64>> = vec![vec![1.0]];
    for (t, (scale, h)) in expansion.iter().enumerate() {
        let mut next = vec![0.0; t + 2];
        for (k, c) in polys[t].iter().enumerate() {
            next[k + 1] += c;
        }
        for (s, hs) in h.iter().enumerate() {
            for (k, c) in polys[s].iter().enumerate() {
                next[k] -= hs * c;
            }
        }
        for c in next.iter_mut() {
            *c *= scale;
        }
        polys.push(next);
    }
    polys
}

impl OraclePolynomials {
    /// Highest degree available.
    pub fn degree(&self) -> usize {
        self.expansion.len()
    }

    pub fn measure(&self) -> &DiscreteMeasure {
        &self.measure
    }

    /// Coefficients of `π_t` in the monomial basis, lowest degree first.
    pub fn monomial_coefficients(&self, t: usize) -> &[f64] {
        &self.monomials[t]
    }

    /// Recurrence coefficients `(a_t, b_t, c_t)` from the inner-product
    /// formulas, for every `t` with `π_{t+1}` of nonzero norm.
    pub fn recurrence_coefficients(&self) -> &[Coeffs] {
        &self.coeffs
    }

    pub fn as_recurrence(&self, label: &str) -> TabulatedRecurrence {
        TabulatedRecurrence {
            label: label.to_string(),
            table: self.coeffs.clone(),
        }
    }

    /// `π_0(λ), …, π_t(λ)`.
    pub fn evaluate_all(&self, t: usize, lambda: f64) -> Vec<f64> {
        let mut vals = vec![1.0];
        for (scale, h) in &self.expansion[..t] {
            let s = vals.len() - 1;
            let mut next = lambda * vals[s];
            for (k, hk) in h.iter().enumerate() {
                next -= hk * vals[k];
            }
            vals.push(scale * next);
        }
        vals
    }

    pub fn evaluate(&self, t: usize, lambda: f64) -> f64 {
        *self.evaluate_all(t, lambda).last().unwrap()
    }

    /// `∫ π_s π_t dτ`.
    pub fn tau_inner(&self, s: usize, t: usize) -> f64 {
        let m = s.max(t);
        self.measure.integrate(|l| {
            let v = self.evaluate_all(m, l);
            (1.0 - l) * v[s] * v[t]
        })
    }

    /// `∫ π_t² dσ`, the squared error left by the optimal degree-`t` polynomial.
    pub fn sigma_norm_sq(&self, t: usize) -> f64 {
        self.measure.integrate(|l| self.evaluate(t, l).powi(2))
    }

    /// Real roots of `π_t`, located by sign changes on a fine grid over
    /// `[-2, 2]` and refined by bisection.
    pub fn roots(&self, t: usize) -> Vec<f64> {
        let grid = 20_000 * (t.max(1));
        let f = |x: f64| self.evaluate(t, x);
        let mut roots = Vec::new();
        let mut x0 = -2.0;
        let mut f0 = f(x0);
        for k in 1..=grid {
            let x1 = -2.0 + 4.0 * k as f64 / grid as f64;
            let f1 = f(x1);
            if f0 == 0.0 {
                roots.push(x0);
            } else if f0 * f1 < 0.0 {
                let (mut lo, mut hi, mut flo) = (x0, x1, f0);
                for _ in 0..100 {
                    let mid = 0.5 * (lo + hi);
                    let fm = f(mid);
                    if fm == 0.0 {
                        lo = mid;
                        hi = mid;
                        break;
                    }
                    if (fm < 0.0) == (flo < 0.0) {
                        lo = mid;
                        flo = fm;
                    } else {
                        hi = mid;
                    }
                }
                roots.push(0.5 * (lo + hi));
            }
            x0 = x1;
            f0 = f1;
        }
        roots
    }
}
