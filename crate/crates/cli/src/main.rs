use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use polygossip::experiment::{
    self, parse_methods, preset, run_consensus_experiment, run_mse_experiment, run_tuning_sweep,
    write_csv, ExperimentConfig, ExperimentRecord, MethodSpec, Signal, PRESETS,
};
use polygossip::graph::{largest_component, load_edge_list, write_edge_list};
use polygossip::spectral::{eigendecompose, spectral_measure_at_vertex, AGGREGATION_TOLERANCE};
use polygossip::{build_gossip_matrix, Error, Graph, GraphSpec, MatrixKind, Result};

#[derive(Parser)]
#[command(name = "polygossip", version, about = "Polynomial gossip simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a graph as an edge list ("n m", then "u v" lines).
    Generate {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Eigenvalue summary and the spectral measure at a vertex (`lambda,weight`).
    Spectrum {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value = "uniform_degree")]
        matrix: MatrixKind,
        /// Read the graph from an edge list instead of generating it.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        vertex: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recurrence coefficients `t,a,b,c` of a polynomial method.
    Coeffs {
        /// e.g. `jacobi:2`, `jacobi-general:1:0`, `kesten-mckay:3`, `shift-register:1.8`.
        #[arg(long)]
        recurrence: MethodSpec,
        #[arg(long, default_value_t = 20)]
        tmax: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Consensus-error experiment.
    Run(ExperimentArgs),
    /// Statistical experiment: also records the MSE against the signal mean.
    Mse {
        #[command(flatten)]
        exp: ExperimentArgs,
        #[arg(long, default_value_t = 0.0)]
        mean: f64,
        #[arg(long, default_value_t = 1.0)]
        variance: f64,
    },
    /// Jacobi `(α, β)` grid next to the given methods.
    Sweep {
        #[command(flatten)]
        exp: ExperimentArgs,
        /// Comma-separated `alpha:beta` pairs.
        #[arg(long)]
        pairs: String,
        #[arg(long, default_value_t = 2.0)]
        d_left: f64,
        #[arg(long, default_value_t = 2.0)]
        d_right: f64,
    },
    /// Figure presets.
    Reproduce {
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(PRESETS))]
        figure: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        tmax: Option<usize>,
        #[arg(long)]
        reps: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct GraphArgs {
    /// grid, torus, percolation, rgg, regular, tree, path, cycle, complete.
    #[arg(long, default_value = "grid")]
    graph: String,
    /// Lattice side lengths, comma-separated.
    #[arg(long, value_delimiter = ',', default_value = "40,40")]
    dims: Vec<usize>,
    #[arg(long)]
    n: Option<usize>,
    /// Degree (regular) or ambient dimension (rgg).
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ExperimentArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long, default_value = "uniform_degree")]
    matrix: MatrixKind,
    #[arg(long, default_value = "simple,shift-register,jacobi:2,local-average")]
    methods: String,
    #[arg(long, default_value_t = experiment::DEFAULT_T_MAX)]
    tmax: usize,
    #[arg(long, default_value_t = experiment::DEFAULT_REPETITIONS)]
    reps: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl GraphArgs {
    fn spec(&self) -> Result<GraphSpec> {
        let need = |v: Option<usize>, flag: &str| {
            v.ok_or_else(|| Error::Spec(format!("--graph {} needs --{flag}", self.graph)))
        };
        let needf = |v: Option<f64>, flag: &str| {
            v.ok_or_else(|| Error::Spec(format!("--graph {} needs --{flag}", self.graph)))
        };
        let dims = self.dims.clone();
        let seed = self.seed;
        let spec = match self.graph.as_str() {
            "grid" => GraphSpec::Grid { dims },
            "torus" => GraphSpec::Torus { dims },
            "percolation" => GraphSpec::PercolationBond {
                dims,
                p: needf(self.p, "p")?,
                seed,
            },
            "rgg" => GraphSpec::RandomGeometric {
                n: need(self.n, "n")?,
                dim: self.d.unwrap_or(2),
                radius: needf(self.radius, "radius")?,
                seed,
            },
            "regular" => GraphSpec::RandomRegular {
                n: need(self.n, "n")?,
                d: need(self.d, "d")?,
                seed,
            },
            "tree" => GraphSpec::RandomTree {
                n: need(self.n, "n")?,
                seed,
            },
            "path" => GraphSpec::Path {
                n: need(self.n, "n")?,
            },
            "cycle" => GraphSpec::Cycle {
                n: need(self.n, "n")?,
            },
            "complete" => GraphSpec::Complete {
                n: need(self.n, "n")?,
            },
            other => return Err(Error::Spec(format!("unknown graph family {other:?}"))),
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl ExperimentArgs {
    fn config(&self, signal: Signal) -> Result<ExperimentConfig> {
        let cfg = ExperimentConfig {
            graph: self.graph.spec()?,
            matrix: self.matrix,
            methods: parse_methods(&self.methods)?,
            t_max: self.tmax,
            repetitions: self.reps,
            seed: self.graph.seed,
            signal,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Runs `f` against `--out` or stdout.
fn with_output(out: Option<&Path>, f: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<()> {
    match out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path).map_err(io_err(path))?);
            f(&mut w).and_then(|_| w.flush()).map_err(io_err(path))
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            f(&mut lock)
                .and_then(|_| lock.flush())
                .map_err(io_err(Path::new("<stdout>")))
        }
    }
}

fn emit_records(records: &[ExperimentRecord], out: Option<&Path>) -> Result<()> {
    with_output(out, |w| write_csv(records, w).map_err(io::Error::other))
}

fn spectrum(graph: Graph, matrix: MatrixKind, vertex: usize, out: Option<&Path>) -> Result<()> {
    let graph = largest_component(&graph).graph;
    let w = build_gossip_matrix(&graph, matrix)?;
    if vertex >= graph.n() {
        return Err(Error::Spec(format!(
            "vertex {vertex} out of range (n = {})",
            graph.n()
        )));
    }
    let s = eigendecompose(&w)?;
    let values = s.eigenvalues();
    eprintln!("n = {}", s.n());
    eprintln!(
        "lambda_max_nonunit = {:.12}",
        values.get(1).copied().unwrap_or(1.0)
    );
    eprintln!("lambda_min = {:.12}", values.last().copied().unwrap_or(1.0));
    eprintln!("gamma = {:.12}", s.gap());
    eprintln!("gamma_tilde = {:.12}", s.absolute_gap());
    let m = spectral_measure_at_vertex(&s, vertex)?.aggregated(AGGREGATION_TOLERANCE);
    with_output(out, |w| {
        writeln!(w, "lambda,weight")?;
        for (l, p) in m.points().iter().zip(m.weights()) {
            writeln!(w, "{l:.16e},{p:.16e}")?;
        }
        Ok(())
    })
}

fn parse_pairs(s: &str) -> Result<Vec<(f64, f64)>> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let (a, b) = p
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("pair {p:?} is not alpha:beta")))?;
            let num = |x: &str| {
                x.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad number {x:?}")))
            };
            Ok((num(a)?, num(b)?))
        })
        .collect()
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate { graph, out } => {
            let g = graph.spec()?.generate()?;
            with_output(out.as_deref(), |w| write_edge_list(&g, w))
        }
        Command::Spectrum {
            graph,
            matrix,
            input,
            vertex,
            out,
        } => {
            let g = match &input {
                Some(path) => load_edge_list(path)?,
                None => graph.spec()?.generate()?,
            };
            spectrum(g, matrix, vertex, out.as_deref())
        }
        Command::Coeffs {
            recurrence,
            tmax,
            out,
        } => {
            let rec = recurrence.recurrence().ok_or_else(|| {
                Error::Spec(format!(
                    "{recurrence} has no fixed recurrence; give explicit parameters"
                ))
            })??;
            with_output(out.as_deref(), |w| {
                writeln!(w, "t,a,b,c")?;
                for (t, k) in rec.tabulate(tmax + 1).iter().enumerate() {
                    writeln!(w, "{t},{:.16e},{:.16e},{:.16e}", k.a, k.b, k.c)?;
                }
                Ok(())
            })
        }
        Command::Run(exp) => {
            let cfg = exp.config(Signal::Gaussian {
                mean: 0.0,
                variance: 1.0,
            })?;
            emit_records(&run_consensus_experiment(&cfg)?, exp.out.as_deref())
        }
        Command::Mse {
            exp,
            mean,
            variance,
        } => {
            let cfg = exp.config(Signal::Gaussian { mean, variance })?;
            emit_records(&run_mse_experiment(&cfg)?, exp.out.as_deref())
        }
        Command::Sweep {
            exp,
            pairs,
            d_left,
            d_right,
        } => {
            let cfg = exp.config(Signal::Gaussian {
                mean: 0.0,
                variance: 1.0,
            })?;
            let sweep = run_tuning_sweep(&cfg, &parse_pairs(&pairs)?, d_left, d_right)?;
            for p in &sweep.points {
                eprintln!("{} in_region={}", p.method, p.in_region);
            }
            emit_records(&sweep.records, exp.out.as_deref())
        }
        Command::Reproduce {
            figure,
            seed,
            tmax,
            reps,
            out,
        } => {
            let mut cfg = preset(&figure, seed)?;
            if let Some(t) = tmax {
                cfg.t_max = t;
            }
            if let Some(r) = reps {
                cfg.repetitions = r;
            }
            emit_records(&run_consensus_experiment(&cfg)?, out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config_error() { 2 } else { 1 })
        }
    }
}
