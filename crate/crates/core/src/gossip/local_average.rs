use super::{check_len, GossipIteration};
use crate::error::Result;
use crate::graph::{bfs_distances, Graph};

/// Exact ball averages `x^t_v = |B_t(v)|^{-1} Σ_{w ∈ B_t(v)} ξ_w`.
pub fn local_average_oracle(g: &Graph, xi: &[f64], t: usize) -> Vec<f64> {
    (0..g.n())
        .map(|v| {
            let dist = bfs_distances(g, v, Some(t));
            let (mut count, mut sum) = (0usize, 0.0);
            for (w, &d) in dist.iter().enumerate() {
                if d <= t {
                    count += 1;
                    sum += xi[w];
                }
            }
            sum / count as f64
        })
        .collect()
}

/// Local averaging as a round-by-round baseline: after `t` rounds each
/// vertex reports the mean of `ξ` over its radius-`t` ball.
///
/// Not a gossip method (a vertex would need to store every value it has
/// heard of); it serves as the reference lower envelope. Per-vertex
/// cumulative sums by distance are precomputed with one BFS per vertex.
pub struct LocalAverage {
    /// `layers[v][r] = (|B_r(v)|, Σ_{B_r(v)} ξ)`, up to the eccentricity.
    layers: Vec<Vec<(usize, f64)>>,
    x: Vec<f64>,
    t: usize,
}

impl LocalAverage {
    pub fn new(g: &Graph, xi: &[f64]) -> Result<Self> {
        check_len(g.n(), xi)?;
        let layers = (0..g.n())
            .map(|v| {
                let dist = bfs_distances(g, v, None);
                let ecc = dist
                    .iter()
                    .copied()
                    .filter(|&d| d != usize::MAX)
                    .max()
                    .unwrap_or(0);
                let mut per = vec![(0usize, 0.0); ecc + 1];
                for (w, &d) in dist.iter().enumerate() {
                    if d != usize::MAX {
                        per[d].0 += 1;
                        per[d].1 += xi[w];
                    }
                }
                for r in 1..per.len() {
                    per[r].0 += per[r - 1].0;
                    per[r].1 += per[r - 1].1;
                }
                per
            })
            .collect();
        Ok(LocalAverage {
            layers,
            x: xi.to_vec(),
            t: 0,
        })
    }
}

impl GossipIteration for LocalAverage {
    fn label(&self) -> String {
        "local_average".into()
    }

    fn round(&self) -> usize {
        self.t
    }

    fn estimate(&self) -> &[f64] {
        &self.x
    }

    fn step(&mut self) {
        self.t += 1;
        for (x, per) in self.x.iter_mut().zip(&self.layers) {
            let (count, sum) = per[self.t.min(per.len() - 1)];
            *x = sum / count as f64;
        }
    }
}
