use super::{check_len, GossipIteration};
use crate::error::Result;
use crate::matrix::GossipMatrix;
use crate::stats::{dot, mean, norm_sq};

/// Relative size of `⟨x, x - Wx⟩` (against `‖ξ‖²`) below which the remaining
/// error is treated as exhausted.
pub const PARAMETER_FREE_TOLERANCE: f64 = 1e-13;

/// The optimal polynomial iteration, with recurrence coefficients computed
/// on the fly from inner products of the iterates.
///
/// With `r^t = x^t - W x^t`:
/// `b̃_t = -⟨r^t, W x^t⟩ / ⟨x^t, r^t⟩`,
/// `c̃_t = ⟨W x^t, r^{t-1}⟩ / ⟨x^{t-1}, r^{t-1}⟩`,
/// `x^{t+1} = (W x^t + b̃_t x^t - c̃_t x^{t-1}) / (1 + b̃_t - c̃_t)`.
///
/// Needs global inner products, so it is a centralized baseline rather than
/// a gossip protocol. Like Lanczos, the bare recurrence loses orthogonality
/// in floating point; each new error vector `x^{t+1} - ξ̄ 1` is therefore
/// reorthogonalized (two passes) against all earlier ones in the inner
/// product `⟨u, (I - W) v⟩`, which leaves the exact-arithmetic iterates
/// unchanged. Once `⟨x^t, r^t⟩` drops below the tolerance the estimate is
/// set to the exact average and held there.
pub struct ParameterFree<'a> {
    w: &'a GossipMatrix,
    t: usize,
    average: f64,
    threshold: f64,
    finished: bool,
    /// Error vectors `x^s - ξ̄ 1`, `s = 0..=t`.
    errors: Vec<Vec<f64>>,
    /// `r^s = (I - W) x^s`.
    residuals: Vec<Vec<f64>>,
    /// `⟨x^s, r^s⟩`.
    dens: Vec<f64>,
    x: Vec<f64>,
    scratch: Vec<f64>,
}

impl<'a> ParameterFree<'a> {
    pub fn new(w: &'a GossipMatrix, xi: &[f64]) -> Result<Self> {
        check_len(w.n(), xi)?;
        let average = mean(xi);
        let mut it = ParameterFree {
            w,
            t: 0,
            average,
            threshold: PARAMETER_FREE_TOLERANCE * norm_sq(xi),
            finished: false,
            errors: Vec::new(),
            residuals: Vec::new(),
            dens: Vec::new(),
            x: xi.to_vec(),
            scratch: vec![0.0; xi.len()],
        };
        it.push(xi.iter().map(|x| x - average).collect());
        Ok(it)
    }

    /// Whether the error mass ran out and the estimate was set to the average.
    pub fn finished(&self) -> bool {
        self.finished
    }

    /// Records `e = x^t - ξ̄ 1` with its residual and sets the estimate.
    fn push(&mut self, e: Vec<f64>) {
        self.w.apply_into(&e, &mut self.scratch);
        let r: Vec<f64> = e.iter().zip(&self.scratch).map(|(e, we)| e - we).collect();
        self.dens.push(dot(&e, &r));
        for (x, e) in self.x.iter_mut().zip(&e) {
            *x = self.average + e;
        }
        self.errors.push(e);
        self.residuals.push(r);
    }
}

impl GossipIteration for ParameterFree<'_> {
    fn label(&self) -> String {
        "parameter_free".into()
    }

    fn round(&self) -> usize {
        self.t
    }

    fn estimate(&self) -> &[f64] {
        &self.x
    }

    fn step(&mut self) {
        self.t += 1;
        if self.finished {
            return;
        }
        let cur = self.errors.len() - 1;
        let (e, r, den) = (&self.errors[cur], &self.residuals[cur], self.dens[cur]);
        if den <= self.threshold {
            self.finished = true;
            self.x.iter_mut().for_each(|x| *x = self.average);
            return;
        }
        // W x^t = x^t - r^t; on error vectors the constant part cancels.
        let we: Vec<f64> = e.iter().zip(r).map(|(e, r)| e - r).collect();
        let b = -dot(r, &we) / den;
        let c = if cur == 0 {
            0.0
        } else {
            dot(&we, &self.residuals[cur - 1]) / self.dens[cur - 1]
        };
        let norm = 1.0 / (1.0 + b - c);
        let mut next: Vec<f64> = if cur == 0 {
            we.iter()
                .zip(e)
                .map(|(we, e)| norm * (we + b * e))
                .collect()
        } else {
            let prev = &self.errors[cur - 1];
            we.iter()
                .zip(e)
                .zip(prev)
                .map(|((we, e), p)| norm * (we + b * e - c * p))
                .collect()
        };
        for _ in 0..2 {
            for ((es, rs), &ds) in self.errors.iter().zip(&self.residuals).zip(&self.dens) {
                if ds > 0.0 {
                    let coef = dot(rs, &next) / ds;
                    next.iter_mut().zip(es).for_each(|(n, e)| *n -= coef * e);
                }
            }
        }
        self.push(next);
    }
}
