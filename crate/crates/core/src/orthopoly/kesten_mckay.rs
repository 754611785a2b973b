use num::{BigInt, BigRational, One, Zero};

use super::{Coeffs, ExactCoeffs, Recurrence};
use crate::error::{Error, Result};

/// Orthogonal polynomials for `(1-λ)` times the Kesten–McKay measure of the
/// infinite `d`-regular tree, normalized to 1 at `λ = 1`.
///
/// These are the polynomials realized by message passing on `d`-regular
/// graphs. For `d ≥ 3` the coefficients come from the closed form in powers
/// of `(d-1)^{-1}`; for `d = 2` that form is `0/0` and the equivalent
/// ratio form `a_t = d L_t / L_{t+1}`, `c_t = (d-1) L_{t-1} / L_{t+1}` with
/// `L_{t+1} = 2 + (d-1) L_t`, `L_0 = 1` is used instead.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KestenMcKayRecurrence {
    d: u32,
}

impl KestenMcKayRecurrence {
    pub fn new(d: u32) -> Result<Self> {
        if d < 2 {
            return Err(Error::Domain(format!(
                "Kesten-McKay recurrence needs d >= 2 (got {d})"
            )));
        }
        Ok(KestenMcKayRecurrence { d })
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn coeffs_exact(&self, t: usize) -> ExactCoeffs {
        let d = BigRational::from_integer(BigInt::from(self.d));
        let one = BigRational::one();
        if t == 0 {
            let den = d.clone() + one.clone();
            return ExactCoeffs {
                a: d / den.clone(),
                b: one / den,
                c: BigRational::zero(),
            };
        }
        if self.d == 2 {
            return self.coeffs_exact_ratio_form(t);
        }
        let dm1 = d.clone() - one.clone();
        let inv_pow = |k: usize| one.clone() / num::pow(dm1.clone(), k);
        let (e_t, e_t1) = (inv_pow(t), inv_pow(t + 1));
        let two = BigRational::from_integer(BigInt::from(2));
        let den = one.clone() - two.clone() / d.clone() * e_t1.clone();
        let a = (d.clone() / dm1.clone() - two.clone() * e_t1) / den.clone();
        let c = (one.clone() / dm1.clone() - two / d * e_t) / den;
        ExactCoeffs {
            a,
            b: BigRational::zero(),
            c,
        }
    }

    /// Coefficients from the message counts `L_t`, valid for every `d ≥ 2`.
    pub fn coeffs_exact_ratio_form(&self, t: usize) -> ExactCoeffs {
        let l = message_counts(self.d, t + 1);
        let d = BigRational::from_integer(BigInt::from(self.d));
        let dm1 = d.clone() - BigRational::one();
        let q = |x: &BigInt| BigRational::from_integer(x.clone());
        if t == 0 {
            let a = d * q(&l[0]) / q(&l[1]);
            return ExactCoeffs {
                b: BigRational::one() - a.clone(),
                a,
                c: BigRational::zero(),
            };
        }
        ExactCoeffs {
            a: d * q(&l[t]) / q(&l[t + 1]),
            b: BigRational::zero(),
            c: dm1 * q(&l[t - 1]) / q(&l[t + 1]),
        }
    }
}

/// `L_0, …, L_{t_max}` with `L_{t+1} = 2 + (d-1) L_t`, `L_0 = 1`: the size of
/// a radius-`t` ball in the `d`-regular tree.
pub(crate) fn message_counts(d: u32, t_max: usize) -> Vec<BigInt> {
    let mut l = vec![BigInt::one()];
    for t in 0..t_max {
        let next = BigInt::from(2) + BigInt::from(d - 1) * &l[t];
        l.push(next);
    }
    l
}

impl Recurrence for KestenMcKayRecurrence {
    fn coeffs(&self, t: usize) -> Coeffs {
        if t > 60 && self.d >= 3 {
            // The correction terms are below f64 resolution; skip the big integers.
            let d = self.d as f64;
            let e = (d - 1.0).powi(-(t as i32 + 1));
            let den = 1.0 - 2.0 / d * e;
            return Coeffs {
                a: (d / (d - 1.0) - 2.0 * e) / den,
                b: 0.0,
                c: (1.0 / (d - 1.0) - 2.0 / d * e * (d - 1.0)) / den,
            };
        }
        self.coeffs_exact(t).to_f64()
    }

    fn label(&self) -> String {
        format!("kesten_mckay(d={})", self.d)
    }
}

/// Half-width `2√(d-1)/d` of the Kesten–McKay support.
pub fn kesten_mckay_support(d: u32) -> f64 {
    let d = d as f64;
    2.0 * (d - 1.0).sqrt() / d
}

/// Density of the Kesten–McKay measure for `d ≥ 3`:
/// `d / (2π(1-λ²)) · √(4(d-1)/d² - λ²)` on its support, 0 elsewhere.
pub fn kesten_mckay_density(d: u32, lambda: f64) -> Result<f64> {
    if d < 3 {
        return Err(Error::Domain(format!(
            "Kesten-McKay density needs d >= 3 (got {d})"
        )));
    }
    let r = kesten_mckay_support(d);
    if lambda.abs() >= r {
        return Ok(0.0);
    }
    let df = d as f64;
    Ok(df / (2.0 * std::f64::consts::PI * (1.0 - lambda * lambda))
        * (r * r - lambda * lambda).sqrt())
}
