use super::{ExperimentConfig, MethodSpec, Signal};
use crate::error::{Error, Result};
use crate::graph::GraphSpec;
use crate::matrix::MatrixKind;

/// Names accepted by [`preset`].
pub const PRESETS: [&str; 8] = [
    "grid2d",
    "grid3d",
    "perc2d",
    "perc3d",
    "rgg2d",
    "rgg3d",
    "grid2d-log",
    "regular3",
];

pub const DEFAULT_REPETITIONS: usize = 10;
pub const DEFAULT_T_MAX: usize = 200;

fn methods(d: f64) -> Vec<MethodSpec> {
    vec![
        MethodSpec::Simple,
        MethodSpec::ShiftRegister { omega: None },
        MethodSpec::Jacobi { d },
        MethodSpec::LocalAverage,
    ]
}

/// Desk-scale figure setups: 10 repetitions, `ξ ~ N(0, 1)`, 200 rounds,
/// shift-register tuned from the true spectral gap.
pub fn preset(name: &str, seed: u64) -> Result<ExperimentConfig> {
    let grid = |dims: Vec<usize>, d_max| {
        (
            GraphSpec::Grid { dims },
            MatrixKind::UniformDegree { d_max: Some(d_max) },
        )
    };
    let (graph, matrix, methods) = match name {
        "grid2d" => {
            let (g, m) = grid(vec![40, 40], 4);
            (g, m, methods(2.0))
        }
        "grid3d" => {
            let (g, m) = grid(vec![12, 12, 12], 6);
            (g, m, methods(3.0))
        }
        "perc2d" => (
            GraphSpec::PercolationBond {
                dims: vec![40, 40],
                p: 0.6,
                seed,
            },
            MatrixKind::UniformDegree { d_max: Some(4) },
            methods(2.0),
        ),
        "perc3d" => (
            GraphSpec::PercolationBond {
                dims: vec![12, 12, 12],
                p: 0.4,
                seed,
            },
            MatrixKind::UniformDegree { d_max: Some(6) },
            methods(3.0),
        ),
        "rgg2d" => (
            GraphSpec::RandomGeometric {
                n: 1600,
                dim: 2,
                radius: 0.0375,
                seed,
            },
            MatrixKind::MaxNeighborDegree,
            methods(2.0),
        ),
        "rgg3d" => (
            GraphSpec::RandomGeometric {
                n: 1728,
                dim: 3,
                radius: 0.125,
                seed,
            },
            MatrixKind::MaxNeighborDegree,
            methods(3.0),
        ),
        "grid2d-log" => {
            let (g, m) = grid(vec![40, 40], 4);
            let mut ms = methods(2.0);
            ms.push(MethodSpec::JacobiGap {
                d: 2.0,
                gamma: None,
            });
            ms.push(MethodSpec::MessagePassing);
            (g, m, ms)
        }
        "regular3" => (
            GraphSpec::RandomRegular {
                n: 2000,
                d: 3,
                seed,
            },
            MatrixKind::AdjacencyOverDegree,
            vec![
                MethodSpec::Simple,
                MethodSpec::ShiftRegister { omega: None },
                MethodSpec::MessagePassing,
                MethodSpec::KestenMcKay { d: None },
                MethodSpec::ParameterFree,
            ],
        ),
        _ => {
            return Err(Error::Spec(format!(
                "unknown figure {name:?}; expected one of {}",
                PRESETS.join(", ")
            )))
        }
    };
    Ok(ExperimentConfig {
        graph,
        matrix,
        methods,
        t_max: DEFAULT_T_MAX,
        repetitions: DEFAULT_REPETITIONS,
        seed,
        signal: Signal::Gaussian {
            mean: 0.0,
            variance: 1.0,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_presets_validate() {
        for name in PRESETS {
            let cfg = preset(name, 1).unwrap();
            cfg.validate().unwrap();
            assert_eq!(cfg.repetitions, 10);
        }
        assert!(preset("grid4d", 1).is_err());
    }
}
