use super::{check_len, GossipIteration};
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Counts above `2^600` are multiplied by `2^-600`. Powers of two keep the
/// rescaling exact.
const RESCALE_ABOVE: f64 = f64::from_bits((1023 + 600) << 52);
const RESCALE_BY: f64 = f64::from_bits((1023 - 600) << 52);

/// Message passing on the directed edges of an unweighted graph.
///
/// Each directed edge `v → w` carries a count `K_vw` and an average `M_vw`:
/// `K_vw ← 1 + Σ_{u ∈ N(v), u ≠ w} K_uv` and
/// `M_vw ← (ξ_v + Σ_{u ≠ w} K_uv M_uv) / K_vw`.
/// The output is `x_v = (ξ_v + Σ_u K_uv M_uv) / (1 + Σ_u K_uv)`.
///
/// Counts are stored relative to a common power-of-two scale so they cannot
/// overflow on long runs; all outputs are ratios and do not see the scale.
pub struct MessagePassing<'a> {
    g: &'a Graph,
    xi: Vec<f64>,
    /// Half-edge index of `w → v` for each half-edge `v → w`.
    reverse: Vec<usize>,
    k: Vec<f64>,
    m: Vec<f64>,
    k_next: Vec<f64>,
    m_next: Vec<f64>,
    /// The true count is `k / inv_scale`.
    inv_scale: f64,
    x: Vec<f64>,
    t: usize,
}

impl<'a> MessagePassing<'a> {
    pub fn new(g: &'a Graph, xi: &[f64]) -> Result<Self> {
        check_len(g.n(), xi)?;
        let mut reverse = vec![0; g.half_edge_count()];
        for v in 0..g.n() {
            for (k, &w) in g.neighbors(v).iter().enumerate() {
                let pos = g
                    .neighbors(w)
                    .binary_search(&v)
                    .expect("adjacency is symmetric");
                reverse[g.half_edge_offset(v) + k] = g.half_edge_offset(w) + pos;
            }
        }
        let h = g.half_edge_count();
        Ok(MessagePassing {
            g,
            xi: xi.to_vec(),
            reverse,
            k: vec![0.0; h],
            m: vec![0.0; h],
            k_next: vec![0.0; h],
            m_next: vec![0.0; h],
            inv_scale: 1.0,
            x: xi.to_vec(),
            t: 0,
        })
    }

    /// Current `K_vw` for the directed edge `v → w`, if it exists.
    pub fn message_count(&self, v: usize, w: usize) -> Option<f64> {
        let pos = self.g.neighbors(v).binary_search(&w).ok()?;
        Some(self.k[self.g.half_edge_offset(v) + pos] / self.inv_scale)
    }

    /// Current `M_vw` for the directed edge `v → w`, if it exists.
    pub fn message_average(&self, v: usize, w: usize) -> Option<f64> {
        let pos = self.g.neighbors(v).binary_search(&w).ok()?;
        Some(self.m[self.g.half_edge_offset(v) + pos])
    }
}

impl GossipIteration for MessagePassing<'_> {
    fn label(&self) -> String {
        "message_passing".into()
    }

    fn round(&self) -> usize {
        self.t
    }

    fn estimate(&self) -> &[f64] {
        &self.x
    }

    fn step(&mut self) {
        let g = self.g;
        let mut largest: f64 = 0.0;
        for v in 0..g.n() {
            let base = g.half_edge_offset(v);
            let deg = g.degree(v);
            let xi_v = self.inv_scale * self.xi[v];
            for out in 0..deg {
                let (mut kk, mut km) = (self.inv_scale, xi_v);
                for inc in 0..deg {
                    if inc == out {
                        continue;
                    }
                    let e = self.reverse[base + inc];
                    kk += self.k[e];
                    km += self.k[e] * self.m[e];
                }
                self.k_next[base + out] = kk;
                self.m_next[base + out] = km / kk;
                largest = largest.max(kk);
            }
        }
        std::mem::swap(&mut self.k, &mut self.k_next);
        std::mem::swap(&mut self.m, &mut self.m_next);
        if largest > RESCALE_ABOVE {
            self.k.iter_mut().for_each(|k| *k *= RESCALE_BY);
            self.inv_scale *= RESCALE_BY;
        }
        for v in 0..g.n() {
            let base = g.half_edge_offset(v);
            let (mut kk, mut km) = (self.inv_scale, self.inv_scale * self.xi[v]);
            for inc in 0..g.degree(v) {
                let e = self.reverse[base + inc];
                kk += self.k[e];
                km += self.k[e] * self.m[e];
            }
            self.x[v] = km / kk;
        }
        self.t += 1;
    }
}

/// Message passing on a `d`-regular graph in vertex form:
/// `L_0 = 1`, `L_{t+1} = 2 + (d-1) L_t`; `S^0 = ξ`, `S^1 = ξ + A ξ`,
/// `S^{t+1} = A S^t - (d-1) S^{t-1}`; `x^t = S^t / L_t`.
pub struct MessagePassingRegular<'a> {
    g: &'a Graph,
    d: usize,
    s_prev: Vec<f64>,
    s_curr: Vec<f64>,
    scratch: Vec<f64>,
    /// Scaled `L_t`; `S` carries the same scale.
    l: f64,
    inv_scale: f64,
    x: Vec<f64>,
    t: usize,
}

impl<'a> MessagePassingRegular<'a> {
    pub fn new(g: &'a Graph, xi: &[f64]) -> Result<Self> {
        check_len(g.n(), xi)?;
        let d = g.regular_degree().filter(|&d| d >= 2).ok_or_else(|| {
            Error::Precondition(
                "vertex-form message passing needs a d-regular graph with d >= 2".into(),
            )
        })?;
        Ok(MessagePassingRegular {
            g,
            d,
            s_prev: vec![0.0; xi.len()],
            s_curr: xi.to_vec(),
            scratch: vec![0.0; xi.len()],
            l: 1.0,
            inv_scale: 1.0,
            x: xi.to_vec(),
            t: 0,
        })
    }
}

impl GossipIteration for MessagePassingRegular<'_> {
    fn label(&self) -> String {
        "message_passing_regular".into()
    }

    fn round(&self) -> usize {
        self.t
    }

    fn estimate(&self) -> &[f64] {
        &self.x
    }

    fn step(&mut self) {
        let dm1 = (self.d - 1) as f64;
        let first = self.t == 0;
        for v in 0..self.g.n() {
            let sum: f64 = self.g.neighbors(v).iter().map(|&u| self.s_curr[u]).sum();
            self.scratch[v] = if first {
                self.s_curr[v] + sum
            } else {
                sum - dm1 * self.s_prev[v]
            };
        }
        std::mem::swap(&mut self.s_prev, &mut self.s_curr);
        std::mem::swap(&mut self.s_curr, &mut self.scratch);
        self.l = 2.0 * self.inv_scale + dm1 * self.l;
        if self.l > RESCALE_ABOVE {
            for s in self.s_curr.iter_mut().chain(self.s_prev.iter_mut()) {
                *s *= RESCALE_BY;
            }
            self.l *= RESCALE_BY;
            self.inv_scale *= RESCALE_BY;
        }
        for (x, s) in self.x.iter_mut().zip(&self.s_curr) {
            *x = s / self.l;
        }
        self.t += 1;
    }
}
