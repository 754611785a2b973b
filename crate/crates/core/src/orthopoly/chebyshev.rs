use super::{Coeffs, Recurrence};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChebyshevKind {
    /// `T_t(cos θ) = cos(tθ)`.
    First,
    /// `U_t(cos θ) = sin((t+1)θ) / sin θ`.
    Second,
}

/// `T_t(λ)` or `U_t(λ)` by the three-term recurrence; valid for any real `λ`.
pub fn chebyshev(t: usize, lambda: f64, kind: ChebyshevKind) -> f64 {
    let first = match kind {
        ChebyshevKind::First => lambda,
        ChebyshevKind::Second => 2.0 * lambda,
    };
    if t == 0 {
        return 1.0;
    }
    let (mut prev, mut curr) = (1.0, first);
    for _ in 1..t {
        let next = 2.0 * lambda * curr - prev;
        prev = curr;
        curr = next;
    }
    curr
}

/// Tuned shift-register parameter `ω = 2(1 - √(γ(1 - γ/4))) / (1 - γ/2)²`.
///
/// Evaluated as the equivalent `2 / (1 + √(γ(1 - γ/4)))`, which has no
/// removable singularity at `γ = 2`.
pub fn shift_register_omega(gamma: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma < 2.0) {
        return Err(Error::Domain(format!(
            "gap gamma = {gamma} must lie in (0, 2)"
        )));
    }
    Ok(2.0 / (1.0 + (gamma * (1.0 - gamma / 4.0)).sqrt()))
}

/// Rate bound quoted for the tuned shift register:
/// `1 - 2(√(γ(1 - γ/4)) - γ/2) / (1 - γ)`, for `0 < γ < 1`.
///
/// The iteration itself contracts like [`shift_register_modulus`] whenever
/// `ωλ₂ < 2√(ω-1)`, which holds for the tuned `ω`.
pub fn shift_register_rate(gamma: f64) -> f64 {
    1.0 - 2.0 * ((gamma * (1.0 - gamma / 4.0)).sqrt() - gamma / 2.0) / (1.0 - gamma)
}

/// Modulus `√(ω - 1)` of the complex characteristic roots of the shift
/// register on eigenvalues with `|ωλ| < 2√(ω - 1)`.
pub fn shift_register_modulus(omega: f64) -> f64 {
    (omega - 1.0).max(0.0).sqrt()
}

/// Shift-register polynomial in closed form,
/// `P_t(λ) = (ω-1)^{t/2} [(2 - 2/ω) T_t(z) + (2/ω - 1) U_t(z)]` with
/// `z = ωλ / (2√(ω-1))`. Falls back to `λ^t` for `ω ≤ 1`.
pub fn shift_register_poly(omega: f64, t: usize, lambda: f64) -> f64 {
    if omega <= 1.0 {
        return lambda.powi(t as i32);
    }
    let root = (omega - 1.0).sqrt();
    let z = omega * lambda / (2.0 * root);
    root.powi(t as i32)
        * ((2.0 - 2.0 / omega) * chebyshev(t, z, ChebyshevKind::First)
            + (2.0 / omega - 1.0) * chebyshev(t, z, ChebyshevKind::Second))
}

/// `P_0 = 1`, `P_1 = λ`, `P_{t+1} = ωλ P_t + (1-ω) P_{t-1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftRegisterRecurrence {
    omega: f64,
}

impl ShiftRegisterRecurrence {
    pub fn new(omega: f64) -> Result<Self> {
        if !(1.0..=2.0).contains(&omega) {
            return Err(Error::Domain(format!(
                "shift-register omega = {omega} must lie in [1, 2]"
            )));
        }
        Ok(ShiftRegisterRecurrence { omega })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }
}

impl Recurrence for ShiftRegisterRecurrence {
    fn coeffs(&self, t: usize) -> Coeffs {
        if t == 0 {
            Coeffs {
                a: 1.0,
                b: 0.0,
                c: 0.0,
            }
        } else {
            Coeffs {
                a: self.omega,
                b: 0.0,
                c: self.omega - 1.0,
            }
        }
    }

    fn label(&self) -> String {
        format!("shift_register(omega={})", self.omega)
    }
}
