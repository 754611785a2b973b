use num::{BigRational, FromPrimitive, Num, One};

use super::{Coeffs, ExactCoeffs, Recurrence};
use crate::error::{Error, Result};

/// Jacobi polynomials `π_t^{(α,β)}`, orthogonal for `(1-λ)^α (1+λ)^β` on
/// `[-1, 1]` and normalized so that `π_t(1) = 1`.
///
/// Parameters are held as exact rationals (a finite `f64` is a dyadic
/// rational), so coefficients can be produced exactly and rounded once.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiRecurrence {
    alpha: BigRational,
    beta: BigRational,
    label: String,
}

impl JacobiRecurrence {
    /// General `(α, β)` with `α, β > -1`.
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        let to_q = |x: f64, name: &str| {
            BigRational::from_float(x)
                .ok_or_else(|| Error::Domain(format!("{name} = {x} is not finite")))
        };
        let label = format!("jacobi_general(alpha={alpha};beta={beta})");
        Self::rational(to_q(alpha, "alpha")?, to_q(beta, "beta")?, label)
    }

    /// The iteration tuned for spectral dimension `d`: `α = d/2`, `β = 0`.
    pub fn from_dimension(d: f64) -> Result<Self> {
        if !(d > 0.0) {
            return Err(Error::Domain(format!("dimension d = {d} must be positive")));
        }
        let mut rec = Self::new(d / 2.0, 0.0)?;
        rec.label = format!("jacobi(d={d})");
        Ok(rec)
    }

    /// Exact rational parameters.
    pub fn rational(alpha: BigRational, beta: BigRational, label: String) -> Result<Self> {
        let minus_one = -BigRational::one();
        if alpha <= minus_one || beta <= minus_one {
            return Err(Error::Domain(format!(
                "Jacobi parameters must exceed -1 (alpha = {alpha}, beta = {beta})"
            )));
        }
        Ok(JacobiRecurrence { alpha, beta, label })
    }

    pub fn alpha(&self) -> f64 {
        num::ToPrimitive::to_f64(&self.alpha).unwrap_or(f64::NAN)
    }

    pub fn beta(&self) -> f64 {
        num::ToPrimitive::to_f64(&self.beta).unwrap_or(f64::NAN)
    }

    pub fn coeffs_exact(&self, t: usize) -> ExactCoeffs {
        let (a, b, c) = jacobi_coeffs(&self.alpha, &self.beta, t);
        ExactCoeffs { a, b, c }
    }
}

impl Recurrence for JacobiRecurrence {
    fn coeffs(&self, t: usize) -> Coeffs {
        self.coeffs_exact(t).to_f64()
    }

    fn label(&self) -> String {
        self.label.clone()
    }
}

/// Jacobi coefficients in any field (exact rationals or floats).
fn jacobi_coeffs<F>(alpha: &F, beta: &F, t: usize) -> (F, F, F)
where
    F: Num + Clone + FromPrimitive,
{
    let k = |x: u64| F::from_u64(x).expect("small integer is representable");
    let one = F::one();
    let two = k(2);
    let s = alpha.clone() + beta.clone();
    let diff = alpha.clone() - beta.clone();
    if t == 0 {
        let den = two * (one + alpha.clone());
        return ((s + k(2)) / den.clone(), diff / den, F::zero());
    }
    let tf = k(t as u64);
    let two_t_s = k(2 * t as u64) + s.clone();
    let p = tf.clone() + one.clone() + s.clone();
    let q = tf.clone() + one + alpha.clone();
    let a =
        (two_t_s.clone() + k(1)) * (two_t_s.clone() + k(2)) / (two.clone() * p.clone() * q.clone());
    let b = (two_t_s.clone() + k(1)) * s * diff / (two * p.clone() * q.clone() * two_t_s.clone());
    let c = tf.clone() * (tf + beta.clone()) * (two_t_s.clone() + k(2)) / (p * two_t_s * q);
    (a, b, c)
}

/// The spectral-gap variant: Jacobi polynomials of dimension `d` in the
/// rescaled variable `(λ + γ/2) / (1 - γ/2)`, which maps `1 - γ` to 1.
///
/// The rescaled polynomials no longer equal 1 at `λ = 1`; the normalizing
/// constants `δ_t` follow the same recurrence and are tracked by
/// [`DeltaTracker`].
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiGapRecurrence {
    base: JacobiRecurrence,
    d: f64,
    gamma: f64,
}

impl JacobiGapRecurrence {
    pub fn new(d: f64, gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma < 2.0) {
            return Err(Error::Domain(format!(
                "gap gamma = {gamma} must lie in (0, 2)"
            )));
        }
        Ok(JacobiGapRecurrence {
            base: JacobiRecurrence::from_dimension(d)?,
            d,
            gamma,
        })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn base(&self) -> &JacobiRecurrence {
        &self.base
    }

    /// `δ_0, …, δ_{t_max}` without renormalization.
    pub fn deltas(&self, t_max: usize) -> Vec<f64> {
        let mut tracker = DeltaTracker::new();
        let mut out = vec![tracker.current()];
        for t in 0..t_max {
            tracker.advance_raw(&self.coeffs(t));
            out.push(tracker.current());
        }
        out
    }

    /// The normalized polynomial `π_t^{(d,γ)}(λ) / δ_t`, which equals 1 at 1.
    pub fn normalized_value(&self, lambda: f64, t: usize) -> f64 {
        let (mut prev, mut curr) = (0.0, 1.0);
        let mut delta = DeltaTracker::new();
        for s in 0..t {
            let k = self.coeffs(s);
            let next = (k.a * lambda + k.b) * curr - k.c * prev;
            prev = curr;
            curr = next;
            let scale = delta.advance(&k);
            prev /= scale;
            curr /= scale;
        }
        curr / delta.current()
    }
}

impl Recurrence for JacobiGapRecurrence {
    fn coeffs(&self, t: usize) -> Coeffs {
        let k = self.base.coeffs(t);
        let shrink = 1.0 - self.gamma / 2.0;
        Coeffs {
            a: k.a / shrink,
            b: k.b + (self.gamma / 2.0) * k.a / shrink,
            c: k.c,
        }
    }

    fn label(&self) -> String {
        format!("jacobi_gap(d={};gamma={})", self.d, self.gamma)
    }

    fn is_normalized(&self) -> bool {
        false
    }
}

/// Tracks `δ_{t+1} = (a_t + b_t) δ_t - c_t δ_{t-1}` with `δ_0 = 1`, the
/// value at `λ = 1` of a non-normalized recurrence.
///
/// [`DeltaTracker::advance`] renormalizes so the current value is 1 and
/// returns the factor it divided by; the caller applies the same factor to
/// its own state so that ratios are preserved and nothing overflows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaTracker {
    prev: f64,
    curr: f64,
}

impl Default for DeltaTracker {
    fn default() -> Self {
        Self::new()
    }
}

impl DeltaTracker {
    pub fn new() -> Self {
        DeltaTracker {
            prev: 0.0,
            curr: 1.0,
        }
    }

    pub fn current(&self) -> f64 {
        self.curr
    }

    /// Advances one step and rescales; returns the new (pre-rescaling) `δ`
    /// relative to the old one.
    pub fn advance(&mut self, k: &Coeffs) -> f64 {
        let next = (k.a + k.b) * self.curr - k.c * self.prev;
        self.prev = self.curr / next;
        self.curr = 1.0;
        next
    }

    /// Advances without rescaling, for reading off raw `δ_t`.
    pub fn advance_raw(&mut self, k: &Coeffs) {
        let next = (k.a + k.b) * self.curr - k.c * self.prev;
        self.prev = self.curr;
        self.curr = next;
    }
}

/// Asymptotic per-step rate guaranteed for the gap variant with gap `γ`:
/// `(1 - γ/2) / (1 + √(γ/2))²`.
pub fn jacobi_gap_rate(gamma: f64) -> f64 {
    (1.0 - gamma / 2.0) / (1.0 + (gamma / 2.0).sqrt()).powi(2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orthopoly::evaluate_recurrence;
    use num::{BigInt, Zero};

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn dimension_two_values() {
        let rec = JacobiRecurrence::from_dimension(2.0).unwrap();
        let k0 = rec.coeffs_exact(0);
        assert_eq!((k0.a, k0.b), (q(3, 4), q(1, 4)));
        let k1 = rec.coeffs_exact(1);
        assert_eq!((k1.a, k1.b, k1.c), (q(10, 9), q(2, 27), q(5, 27)));
    }

    #[test]
    fn dimension_three_values() {
        let k0 = JacobiRecurrence::from_dimension(3.0)
            .unwrap()
            .coeffs_exact(0);
        assert_eq!((k0.a, k0.b), (q(7, 10), q(3, 10)));
    }

    #[test]
    fn symmetric_parameters_have_zero_b0() {
        for a in [-0.5, 0.0, 0.75, 4.0] {
            assert!(JacobiRecurrence::new(a, a)
                .unwrap()
                .coeffs_exact(0)
                .b
                .is_zero());
        }
    }

    #[test]
    fn normalization_is_exact() {
        for (a, b) in [(1.0, 0.0), (0.2, 0.8), (-0.5, 3.25), (7.5, -0.75)] {
            let rec = JacobiRecurrence::new(a, b).unwrap();
            let k0 = rec.coeffs_exact(0);
            assert!((k0.a + k0.b).is_one());
            for t in 1..=60 {
                let k = rec.coeffs_exact(t);
                assert!((k.a + k.b - k.c).is_one(), "alpha={a} beta={b} t={t}");
            }
        }
    }

    #[test]
    fn float_and_exact_formulas_agree() {
        let rec = JacobiRecurrence::new(1.3, 0.4).unwrap();
        for t in 0..30 {
            let (a, b, c) = jacobi_coeffs(&1.3f64, &0.4f64, t);
            let k = rec.coeffs(t);
            assert!((a - k.a).abs() < 1e-14 && (b - k.b).abs() < 1e-14 && (c - k.c).abs() < 1e-14);
        }
    }

    #[test]
    fn domain_errors() {
        assert!(JacobiRecurrence::new(-1.0, 0.0).is_err());
        assert!(JacobiRecurrence::new(0.0, -1.5).is_err());
        assert!(JacobiRecurrence::from_dimension(0.0).is_err());
        assert!(JacobiGapRecurrence::new(2.0, 0.0).is_err());
        assert!(JacobiGapRecurrence::new(2.0, 2.0).is_err());
    }

    #[test]
    fn legendre_case_matches_closed_form() {
        // α = β = 0 gives Legendre polynomials, already equal to 1 at 1.
        let rec = JacobiRecurrence::new(0.0, 0.0).unwrap();
        let x: f64 = 0.37;
        let p3 = 0.5 * (5.0 * x.powi(3) - 3.0 * x);
        assert!((evaluate_recurrence(&rec, x, 3) - p3).abs() < 1e-14);
    }

    #[test]
    fn gap_variant_values() {
        let rec = JacobiGapRecurrence::new(2.0, 0.5).unwrap();
        let k0 = rec.coeffs(0);
        assert!((k0.a - 1.0).abs() < 1e-15);
        assert!((k0.b - 0.5).abs() < 1e-15);
        let deltas = rec.deltas(3);
        assert!((deltas[1] - 1.5).abs() < 1e-15);
        assert!((rec.coeffs(1).c - 5.0 / 27.0).abs() < 1e-15);
    }

    #[test]
    fn vanishing_gap_recovers_plain_jacobi() {
        let gap = JacobiGapRecurrence::new(2.0, 1e-14).unwrap();
        let plain = JacobiRecurrence::from_dimension(2.0).unwrap();
        for (d, t) in gap.deltas(40).iter().zip(0..) {
            assert!((d - 1.0).abs() < 1e-10, "delta_{t} = {d}");
        }
        for t in 0..40 {
            let v = gap.normalized_value(0.3, t);
            assert!((v - evaluate_recurrence(&plain, 0.3, t)).abs() < 1e-10);
        }
    }

    #[test]
    fn gap_polynomial_is_rescaled_jacobi() {
        let (d, gamma) = (3.0, 0.3);
        let gap = JacobiGapRecurrence::new(d, gamma).unwrap();
        let plain = JacobiRecurrence::from_dimension(d).unwrap();
        let mu = |l: f64| (l + gamma / 2.0) / (1.0 - gamma / 2.0);
        let deltas = gap.deltas(12);
        for t in 0..12 {
            let lambda = -0.4;
            let expected = evaluate_recurrence(&plain, mu(lambda), t)
                / evaluate_recurrence(&plain, mu(1.0), t);
            assert!((gap.normalized_value(lambda, t) - expected).abs() < 1e-12);
            assert!((deltas[t] - evaluate_recurrence(&plain, mu(1.0), t)).abs() < 1e-9 * deltas[t]);
        }
        assert!((gap.normalized_value(1.0, 30) - 1.0).abs() < 1e-12);
    }
}
