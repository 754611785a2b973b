//! Experiment harness: repeated runs of several methods on shared
//! `(graph, ξ)` instances, rate fitting and CSV export.

mod csv_io;
mod fit;
mod method;
mod presets;

pub use csv_io::{export_csv, import_csv, read_csv, write_csv};
pub use fit::{fit_rate, fit_rate_of, mean_curve, Metric, RateFit, RateKind};
pub use method::{parse_methods, MethodSpec};
pub use presets::{preset, DEFAULT_REPETITIONS, DEFAULT_T_MAX, PRESETS};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gossip::GossipIteration;
use crate::graph::{largest_component, Graph, GraphSpec};
use crate::matrix::{build_gossip_matrix, GossipMatrix, MatrixKind};
use crate::spectral::gaps;
use crate::stats::{consensus_error_sq, mean, splitmix64};

/// Distribution of the initial values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Signal {
    /// `ξ_v` i.i.d. normal.
    Gaussian { mean: f64, variance: f64 },
    /// Every `ξ_v` equal to the given value.
    Constant(f64),
}

impl Signal {
    pub fn mean(&self) -> f64 {
        match *self {
            Signal::Gaussian { mean, .. } => mean,
            Signal::Constant(c) => c,
        }
    }

    pub fn sample(&self, n: usize, seed: u64) -> Result<Vec<f64>> {
        match *self {
            Signal::Gaussian { mean, variance } => {
                let normal = Normal::new(mean, variance.sqrt())
                    .map_err(|e| Error::Domain(format!("gaussian signal: {e}")))?;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                Ok((0..n).map(|_| normal.sample(&mut rng)).collect())
            }
            Signal::Constant(c) => Ok(vec![c; n]),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// For random families the seed stored here is ignored; each repetition
    /// draws its own from `seed`.
    pub graph: GraphSpec,
    pub matrix: MatrixKind,
    pub methods: Vec<MethodSpec>,
    pub t_max: usize,
    pub repetitions: usize,
    pub seed: u64,
    pub signal: Signal,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.t_max < 1 {
            return Err(Error::Spec("t_max must be at least 1".into()));
        }
        if self.repetitions < 1 {
            return Err(Error::Spec("repetitions must be at least 1".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::Spec("no methods given".into()));
        }
        for (i, m) in self.methods.iter().enumerate() {
            m.validate()?;
            if self.methods[..i].contains(m) {
                return Err(Error::Spec(format!("method {m} listed twice")));
            }
        }
        if let Signal::Gaussian { mean, variance } = self.signal {
            if !mean.is_finite() || !(variance >= 0.0) || !variance.is_finite() {
                return Err(Error::Domain(format!(
                    "gaussian signal N({mean}, {variance})"
                )));
            }
        }
        self.graph.validate()
    }

    /// Seed of repetition `rep`; independent of how many repetitions run.
    pub fn repetition_seed(&self, rep: usize) -> u64 {
        self.seed ^ splitmix64(rep as u64)
    }
}

/// One row of experiment output.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub method: String,
    pub rep: usize,
    pub t: usize,
    /// `‖x^t - ξ̄ 1‖₂ / √n`.
    pub consensus_error: f64,
    /// Mean over vertices of `(x^t_v - μ)²`, `μ` the signal mean.
    pub mse: Option<f64>,
}

/// Graph (largest component), gossip matrix and, when needed, its gap.
pub struct Instance {
    pub graph: Graph,
    pub matrix: GossipMatrix,
    pub gap: Option<f64>,
}

impl Instance {
    pub fn build(spec: &GraphSpec, kind: MatrixKind, with_gap: bool) -> Result<Instance> {
        let graph = largest_component(&spec.generate()?).graph;
        let matrix = build_gossip_matrix(&graph, kind)?;
        let gap = if with_gap {
            Some(gaps(&matrix)?.0)
        } else {
            None
        };
        Ok(Instance { graph, matrix, gap })
    }
}

/// Runs `it` for `t_max` rounds and records the error at every `t`,
/// including `t = 0`.
pub fn record_run(
    it: &mut dyn GossipIteration,
    method: &str,
    rep: usize,
    t_max: usize,
    average: f64,
    signal_mean: Option<f64>,
) -> Vec<ExperimentRecord> {
    let n = it.estimate().len() as f64;
    let mut out = Vec::with_capacity(t_max + 1);
    for t in 0..=t_max {
        if t > 0 {
            it.step();
        }
        let x = it.estimate();
        out.push(ExperimentRecord {
            method: method.to_string(),
            rep,
            t,
            consensus_error: (consensus_error_sq(x, average) / n).sqrt(),
            mse: signal_mean.map(|mu| consensus_error_sq(x, mu) / n),
        });
    }
    out
}

fn run(cfg: &ExperimentConfig, with_mse: bool) -> Result<Vec<ExperimentRecord>> {
    cfg.validate()?;
    let need_gap = cfg.methods.iter().any(MethodSpec::needs_gap);
    let shared = if cfg.graph.is_random() {
        None
    } else {
        Some(Instance::build(&cfg.graph, cfg.matrix, need_gap)?)
    };
    let per_rep = (0..cfg.repetitions)
        .into_par_iter()
        .map(|rep| -> Result<Vec<ExperimentRecord>> {
            let seed = cfg.repetition_seed(rep);
            let owned;
            let inst = match &shared {
                Some(inst) => inst,
                None => {
                    owned = Instance::build(&cfg.graph.with_seed(seed), cfg.matrix, need_gap)?;
                    &owned
                }
            };
            let xi = cfg.signal.sample(inst.graph.n(), splitmix64(seed))?;
            let average = mean(&xi);
            let mu = with_mse.then(|| cfg.signal.mean());
            let mut out = Vec::new();
            for m in &cfg.methods {
                let mut it = m.build(&inst.graph, &inst.matrix, &xi, inst.gap)?;
                out.extend(record_run(
                    it.as_mut(),
                    &m.to_string(),
                    rep,
                    cfg.t_max,
                    average,
                    mu,
                ));
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut records: Vec<ExperimentRecord> = per_rep.into_iter().flatten().collect();
    records.sort_by(|a, b| (&a.method, a.rep, a.t).cmp(&(&b.method, b.rep, b.t)));
    Ok(records)
}

/// Consensus error of every method, every repetition, every round.
/// All methods of a repetition share the same graph and initial values.
pub fn run_consensus_experiment(cfg: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    run(cfg, false)
}

/// As [`run_consensus_experiment`], additionally recording the mean squared
/// distance to the signal mean (averaged over vertices; average over
/// repetitions with [`mean_curve`]).
pub fn run_mse_experiment(cfg: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    run(cfg, true)
}

/// Sufficient condition for the Jacobi parameters `(α, β)` to reach the
/// optimal polynomial rate on a measure with lower dimension `d_left` at `-1`
/// and `d_right` at `1`.
pub fn in_optimal_region(alpha: f64, beta: f64, d_left: f64, d_right: f64) -> bool {
    const EPS: f64 = 1e-12;
    alpha + EPS >= (d_right - 1.0) / 2.0 && beta <= alpha + (d_left - d_right) / 2.0 + EPS
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub alpha: f64,
    pub beta: f64,
    pub in_region: bool,
    /// Method label of this pair in the records.
    pub method: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TuningSweep {
    pub points: Vec<SweepPoint>,
    pub records: Vec<ExperimentRecord>,
}

/// Runs `jacobi-general:α:β` for every pair alongside the base methods.
pub fn run_tuning_sweep(
    base: &ExperimentConfig,
    pairs: &[(f64, f64)],
    d_left: f64,
    d_right: f64,
) -> Result<TuningSweep> {
    let mut cfg = base.clone();
    let mut points = Vec::with_capacity(pairs.len());
    for &(alpha, beta) in pairs {
        let m = MethodSpec::JacobiGeneral { alpha, beta };
        m.validate()?;
        points.push(SweepPoint {
            alpha,
            beta,
            in_region: in_optimal_region(alpha, beta, d_left, d_right),
            method: m.to_string(),
        });
        if !cfg.methods.contains(&m) {
            cfg.methods.push(m);
        }
    }
    let records = run_consensus_experiment(&cfg)?;
    Ok(TuningSweep { points, records })
}
