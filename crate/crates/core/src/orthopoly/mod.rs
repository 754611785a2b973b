//! Three-term recurrences for normalized orthogonal polynomials.
//!
//! A recurrence encodes `π_0 = 1`, `π_1 = a_0 λ + b_0` and
//! `π_{t+1} = (a_t λ + b_t) π_t - c_t π_{t-1}`. When the polynomials satisfy
//! `π_t(1) = 1` this is equivalent to `a_0 + b_0 = 1` and
//! `a_t + b_t - c_t = 1`, which is what makes the matching gossip iteration
//! preserve the average.

mod chebyshev;
mod jacobi;
mod kesten_mckay;
mod oracle;
pub mod quadrature;

pub use chebyshev::{
    chebyshev, shift_register_modulus, shift_register_omega, shift_register_poly,
    shift_register_rate, ChebyshevKind, ShiftRegisterRecurrence,
};
pub use jacobi::{jacobi_gap_rate, DeltaTracker, JacobiGapRecurrence, JacobiRecurrence};
pub use kesten_mckay::{kesten_mckay_density, kesten_mckay_support, KestenMcKayRecurrence};
pub use oracle::{oracle_from_measure, OraclePolynomials};

use num::{BigRational, ToPrimitive};

/// Coefficients of one recurrence step. `c` is zero at `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coeffs {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

/// Exact counterpart of [`Coeffs`].
#[derive(Debug, Clone, PartialEq)]
pub struct ExactCoeffs {
    pub a: BigRational,
    pub b: BigRational,
    pub c: BigRational,
}

impl ExactCoeffs {
    pub fn to_f64(&self) -> Coeffs {
        let f = |x: &BigRational| x.to_f64().unwrap_or(f64::NAN);
        Coeffs {
            a: f(&self.a),
            b: f(&self.b),
            c: f(&self.c),
        }
    }
}

/// Per-step coefficients of a second-order polynomial iteration.
pub trait Recurrence: Send + Sync {
    /// Coefficients for step `t` (producing `π_{t+1}`).
    fn coeffs(&self, t: usize) -> Coeffs;

    /// Name used in tables and experiment output. Contains no commas.
    fn label(&self) -> String;

    /// Whether the encoded polynomials satisfy `π_t(1) = 1`.
    fn is_normalized(&self) -> bool {
        true
    }

    /// Coefficients for steps `0..steps`.
    fn tabulate(&self, steps: usize) -> Vec<Coeffs> {
        (0..steps).map(|t| self.coeffs(t)).collect()
    }
}

/// `π_t(λ)` for the recurrence.
pub fn evaluate_recurrence(rec: &dyn Recurrence, lambda: f64, t: usize) -> f64 {
    evaluate_table(&rec.tabulate(t), lambda)
}

/// `π_t(λ)` where `t = table.len()`.
pub fn evaluate_table(table: &[Coeffs], lambda: f64) -> f64 {
    let (mut prev, mut curr) = (0.0, 1.0);
    for k in table {
        let next = (k.a * lambda + k.b) * curr - k.c * prev;
        prev = curr;
        curr = next;
    }
    curr
}

/// A recurrence given by an explicit coefficient table; steps past the end
/// repeat the last entry.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedRecurrence {
    pub label: String,
    pub table: Vec<Coeffs>,
}

impl Recurrence for TabulatedRecurrence {
    fn coeffs(&self, t: usize) -> Coeffs {
        let last = self.table.len().saturating_sub(1);
        self.table[t.min(last)]
    }

    fn label(&self) -> String {
        self.label.clone()
    }
}

/// Simple gossip, `π_t(λ) = λ^t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PowerRecurrence;

impl Recurrence for PowerRecurrence {
    fn coeffs(&self, _t: usize) -> Coeffs {
        Coeffs {
            a: 1.0,
            b: 0.0,
            c: 0.0,
        }
    }

    fn label(&self) -> String {
        "simple".into()
    }
}

/// Simple gossip with the lazy matrix `(I + W)/2`, `π_t(λ) = ((1 + λ)/2)^t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LazyPowerRecurrence;

impl Recurrence for LazyPowerRecurrence {
    fn coeffs(&self, _t: usize) -> Coeffs {
        Coeffs {
            a: 0.5,
            b: 0.5,
            c: 0.0,
        }
    }

    fn label(&self) -> String {
        "lazy_simple".into()
    }
}
