use super::{check_len, GossipIteration};
use crate::error::Result;
use crate::matrix::GossipMatrix;
use crate::orthopoly::{
    DeltaTracker, JacobiGapRecurrence, JacobiRecurrence, KestenMcKayRecurrence,
    LazyPowerRecurrence, PowerRecurrence, Recurrence, ShiftRegisterRecurrence,
};

/// `x^t = π_t(W) ξ` for a normalized three-term recurrence:
/// `x^1 = a_0 W ξ + b_0 ξ`, `x^{t+1} = a_t W x^t + b_t x^t - c_t x^{t-1}`.
pub struct PolynomialIteration<'a> {
    w: &'a GossipMatrix,
    rec: Box<dyn Recurrence>,
    t: usize,
    x_prev: Vec<f64>,
    x_curr: Vec<f64>,
    scratch: Vec<f64>,
}

impl<'a> PolynomialIteration<'a> {
    pub fn new(w: &'a GossipMatrix, xi: &[f64], rec: Box<dyn Recurrence>) -> Result<Self> {
        check_len(w.n(), xi)?;
        Ok(PolynomialIteration {
            w,
            rec,
            t: 0,
            x_prev: vec![0.0; xi.len()],
            x_curr: xi.to_vec(),
            scratch: vec![0.0; xi.len()],
        })
    }

    /// `x^{t+1} = W x^t`.
    pub fn simple(w: &'a GossipMatrix, xi: &[f64]) -> Result<Self> {
        Self::new(w, xi, Box::new(PowerRecurrence))
    }

    /// `x^{t+1} = ((I + W)/2) x^t`.
    pub fn lazy_simple(w: &'a GossipMatrix, xi: &[f64]) -> Result<Self> {
        Self::new(w, xi, Box::new(LazyPowerRecurrence))
    }

    /// `x^{t+1} = ω W x^t + (1 - ω) x^{t-1}`, `ω ∈ [1, 2]`.
    pub fn shift_register(w: &'a GossipMatrix, xi: &[f64], omega: f64) -> Result<Self> {
        Self::new(w, xi, Box::new(ShiftRegisterRecurrence::new(omega)?))
    }

    /// Jacobi iteration tuned for spectral dimension `d`.
    pub fn jacobi(w: &'a GossipMatrix, xi: &[f64], d: f64) -> Result<Self> {
        Self::new(w, xi, Box::new(JacobiRecurrence::from_dimension(d)?))
    }

    pub fn jacobi_general(w: &'a GossipMatrix, xi: &[f64], alpha: f64, beta: f64) -> Result<Self> {
        Self::new(w, xi, Box::new(JacobiRecurrence::new(alpha, beta)?))
    }

    /// Polynomials of the `d`-regular tree; with `W = A/d` on a `d`-regular
    /// graph this reproduces message passing.
    pub fn kesten_mckay(w: &'a GossipMatrix, xi: &[f64], d: u32) -> Result<Self> {
        Self::new(w, xi, Box::new(KestenMcKayRecurrence::new(d)?))
    }

    pub fn recurrence(&self) -> &dyn Recurrence {
        self.rec.as_ref()
    }
}

impl GossipIteration for PolynomialIteration<'_> {
    fn label(&self) -> String {
        self.rec.label()
    }

    fn round(&self) -> usize {
        self.t
    }

    fn estimate(&self) -> &[f64] {
        &self.x_curr
    }

    fn step(&mut self) {
        let k = self.rec.coeffs(self.t);
        self.w.apply_into(&self.x_curr, &mut self.scratch);
        for ((s, &x), &p) in self.scratch.iter_mut().zip(&self.x_curr).zip(&self.x_prev) {
            *s = k.a * *s + k.b * x - k.c * p;
        }
        std::mem::swap(&mut self.x_prev, &mut self.x_curr);
        std::mem::swap(&mut self.x_curr, &mut self.scratch);
        self.t += 1;
    }
}

/// Jacobi iteration with a known spectral gap `γ`.
///
/// Runs the rescaled recurrence on `y^t` and reports `x^t = y^t / δ_t`.
/// After every step `y^t`, `y^{t-1}`, `δ_t`, `δ_{t-1}` are divided by `δ_t`,
/// so `δ_t` stays 1 and the stored `y^t` is the estimate itself.
pub struct JacobiGapIteration<'a> {
    w: &'a GossipMatrix,
    rec: JacobiGapRecurrence,
    delta: DeltaTracker,
    t: usize,
    y_prev: Vec<f64>,
    y_curr: Vec<f64>,
    scratch: Vec<f64>,
}

impl<'a> JacobiGapIteration<'a> {
    pub fn new(w: &'a GossipMatrix, xi: &[f64], d: f64, gamma: f64) -> Result<Self> {
        check_len(w.n(), xi)?;
        Ok(JacobiGapIteration {
            w,
            rec: JacobiGapRecurrence::new(d, gamma)?,
            delta: DeltaTracker::new(),
            t: 0,
            y_prev: vec![0.0; xi.len()],
            y_curr: xi.to_vec(),
            scratch: vec![0.0; xi.len()],
        })
    }

    pub fn recurrence(&self) -> &JacobiGapRecurrence {
        &self.rec
    }
}

impl GossipIteration for JacobiGapIteration<'_> {
    fn label(&self) -> String {
        self.rec.label()
    }

    fn round(&self) -> usize {
        self.t
    }

    fn estimate(&self) -> &[f64] {
        &self.y_curr
    }

    fn step(&mut self) {
        let k = self.rec.coeffs(self.t);
        self.w.apply_into(&self.y_curr, &mut self.scratch);
        let scale = self.delta.advance(&k);
        for ((s, y), p) in self
            .scratch
            .iter_mut()
            .zip(self.y_curr.iter_mut())
            .zip(&self.y_prev)
        {
            *s = (k.a * *s + k.b * *y - k.c * p) / scale;
            *y /= scale;
        }
        std::mem::swap(&mut self.y_prev, &mut self.y_curr);
        std::mem::swap(&mut self.y_curr, &mut self.scratch);
        self.t += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gossip::trajectory;
    use crate::graph::GraphSpec;
    use crate::matrix::{build_gossip_matrix, MatrixKind};
    use crate::stats::mean;

    fn matrix(spec: GraphSpec) -> GossipMatrix {
        let g = spec.generate().unwrap();
        build_gossip_matrix(&g, MatrixKind::UniformDegree { d_max: None }).unwrap()
    }

    #[test]
    fn simple_gossip_by_hand() {
        let w = matrix(GraphSpec::Path { n: 3 });
        let mut it = PolynomialIteration::simple(&w, &[1.0, 0.0, 0.0]).unwrap();
        it.step();
        assert_eq!(it.estimate(), &[0.5, 0.5, 0.0]);

        // On K_2 the uniform-degree matrix swaps the two values; averaging in
        // one round needs d_max = 2.
        let k2 = GraphSpec::Complete { n: 2 }.generate().unwrap();
        let swap = build_gossip_matrix(&k2, MatrixKind::UniformDegree { d_max: None }).unwrap();
        let mut it = PolynomialIteration::simple(&swap, &[3.0, -1.0]).unwrap();
        it.step();
        assert_eq!(it.estimate(), &[-1.0, 3.0]);
        let avg = build_gossip_matrix(&k2, MatrixKind::UniformDegree { d_max: Some(2) }).unwrap();
        let mut it = PolynomialIteration::simple(&avg, &[3.0, -1.0]).unwrap();
        it.step();
        assert_eq!(it.estimate(), &[1.0, 1.0]);
    }

    #[test]
    fn dimension_mismatch() {
        let w = matrix(GraphSpec::Path { n: 3 });
        assert!(PolynomialIteration::simple(&w, &[1.0]).is_err());
    }

    #[test]
    fn omega_one_matches_simple() {
        let w = matrix(GraphSpec::Cycle { n: 9 });
        let xi: Vec<f64> = (0..9).map(|i| (i as f64).sin()).collect();
        let a = trajectory(&mut PolynomialIteration::simple(&w, &xi).unwrap(), 20);
        let b = trajectory(
            &mut PolynomialIteration::shift_register(&w, &xi, 1.0).unwrap(),
            20,
        );
        assert_eq!(a, b);
    }

    #[test]
    fn consensus_is_a_fixed_point() {
        let w = matrix(GraphSpec::Grid { dims: vec![4, 5] });
        let xi = vec![2.5; 20];
        let mut iters: Vec<Box<dyn GossipIteration>> = vec![
            Box::new(PolynomialIteration::simple(&w, &xi).unwrap()),
            Box::new(PolynomialIteration::shift_register(&w, &xi, 1.7).unwrap()),
            Box::new(PolynomialIteration::jacobi(&w, &xi, 2.0).unwrap()),
            Box::new(PolynomialIteration::jacobi_general(&w, &xi, 0.3, 2.0).unwrap()),
            Box::new(JacobiGapIteration::new(&w, &xi, 2.0, 0.1).unwrap()),
        ];
        for it in iters.iter_mut() {
            it.advance(40);
            assert!(
                it.estimate().iter().all(|x| (x - 2.5).abs() < 1e-12),
                "{}",
                it.label()
            );
        }
    }

    #[test]
    fn mean_is_preserved() {
        let w = matrix(GraphSpec::RandomGeometric {
            n: 80,
            dim: 2,
            radius: 0.25,
            seed: 1,
        });
        let xi: Vec<f64> = (0..80).map(|i| ((i * 37 % 17) as f64) - 8.0).collect();
        let xbar = mean(&xi);
        let mut it = PolynomialIteration::jacobi(&w, &xi, 2.0).unwrap();
        for _ in 0..60 {
            it.step();
            assert!((mean(it.estimate()) - xbar).abs() < 1e-10);
        }
    }

    #[test]
    fn jacobi_general_equals_jacobi() {
        let w = matrix(GraphSpec::Torus { dims: vec![6, 6] });
        let xi: Vec<f64> = (0..36).map(|i| (i as f64 * 0.3).cos()).collect();
        let a = trajectory(&mut PolynomialIteration::jacobi(&w, &xi, 2.0).unwrap(), 30);
        let b = trajectory(
            &mut PolynomialIteration::jacobi_general(&w, &xi, 1.0, 0.0).unwrap(),
            30,
        );
        assert_eq!(a, b);
    }

    #[test]
    fn tiny_gap_matches_jacobi() {
        let w = matrix(GraphSpec::Grid { dims: vec![5, 5] });
        let xi: Vec<f64> = (0..25).map(|i| (i as f64 * 1.3).sin()).collect();
        let a = trajectory(&mut PolynomialIteration::jacobi(&w, &xi, 2.0).unwrap(), 50);
        let b = trajectory(
            &mut JacobiGapIteration::new(&w, &xi, 2.0, 1e-14).unwrap(),
            50,
        );
        for (u, v) in a.iter().zip(&b) {
            for (p, q) in u.iter().zip(v) {
                assert!((p - q).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn gap_iteration_survives_long_runs() {
        let w = matrix(GraphSpec::Cycle { n: 200 });
        let xi: Vec<f64> = (0..200).map(|i| if i < 100 { 1.0 } else { -1.0 }).collect();
        let mut it = JacobiGapIteration::new(&w, &xi, 1.0, 1e-4).unwrap();
        it.advance(3000);
        assert!(it.estimate().iter().all(|x| x.is_finite()));
        assert!(mean(it.estimate()).abs() < 1e-10);
    }

    #[test]
    fn lazy_simple_matches_lazy_matrix() {
        let w = matrix(GraphSpec::Cycle { n: 7 });
        let lazy = w.lazy();
        let xi: Vec<f64> = (0..7).map(|i| i as f64).collect();
        let a = trajectory(&mut PolynomialIteration::lazy_simple(&w, &xi).unwrap(), 15);
        let b = trajectory(&mut PolynomialIteration::simple(&lazy, &xi).unwrap(), 15);
        for (u, v) in a.iter().zip(&b) {
            for (p, q) in u.iter().zip(v) {
                assert!((p - q).abs() < 1e-14);
            }
        }
    }
}
