use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::gossip::{
    GossipIteration, JacobiGapIteration, LocalAverage, MessagePassing, MessagePassingRegular,
    ParameterFree, PolynomialIteration,
};
use crate::graph::Graph;
use crate::matrix::GossipMatrix;
use crate::orthopoly::{
    shift_register_omega, JacobiGapRecurrence, JacobiRecurrence, KestenMcKayRecurrence,
    LazyPowerRecurrence, PowerRecurrence, Recurrence, ShiftRegisterRecurrence,
};

/// A gossip method plus its parameters, as named on the command line and in
/// CSV output.
///
/// Grammar (parameters separated by `:`):
/// `simple`, `lazy-simple`, `shift-register[:ω]`, `jacobi:d`,
/// `jacobi-general:α:β`, `jacobi-gap:d[:γ]`, `parameter-free`, `mp`,
/// `mp-regular`, `kesten-mckay[:d]`, `local-average`.
/// An omitted `ω` or `γ` is tuned from the measured spectral gap; an omitted
/// Kesten–McKay degree is read from the (regular) graph.
#[derive(Debug, Clone, PartialEq)]
pub enum MethodSpec {
    Simple,
    LazySimple,
    ShiftRegister { omega: Option<f64> },
    Jacobi { d: f64 },
    JacobiGeneral { alpha: f64, beta: f64 },
    JacobiGap { d: f64, gamma: Option<f64> },
    ParameterFree,
    MessagePassing,
    MessagePassingRegular,
    KestenMcKay { d: Option<u32> },
    LocalAverage,
}

impl MethodSpec {
    /// Whether building this method requires the spectral gap of `W`.
    pub fn needs_gap(&self) -> bool {
        matches!(
            self,
            MethodSpec::ShiftRegister { omega: None } | MethodSpec::JacobiGap { gamma: None, .. }
        )
    }

    /// Checks parameters that do not depend on the graph.
    pub fn validate(&self) -> Result<()> {
        let finite = |name: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::Domain(format!("{name} must be finite")))
            }
        };
        match *self {
            MethodSpec::ShiftRegister { omega: Some(w) } if !(1.0..=2.0).contains(&w) => Err(
                Error::Domain(format!("shift-register omega {w} outside [1, 2]")),
            ),
            MethodSpec::Jacobi { d } | MethodSpec::JacobiGap { d, .. }
                if !(d > 0.0) || !d.is_finite() =>
            {
                Err(Error::Domain(format!(
                    "spectral dimension {d} must be positive"
                )))
            }
            MethodSpec::JacobiGeneral { alpha, beta } => {
                finite("alpha", alpha)?;
                finite("beta", beta)?;
                if alpha <= -1.0 || beta <= -1.0 {
                    return Err(Error::Domain(format!(
                        "jacobi parameters ({alpha}, {beta}) must exceed -1"
                    )));
                }
                Ok(())
            }
            MethodSpec::JacobiGap { gamma: Some(g), .. } if !(g > 0.0 && g < 2.0) => {
                Err(Error::Domain(format!("spectral gap {g} outside (0, 2)")))
            }
            MethodSpec::KestenMcKay { d: Some(d) } if d < 2 => Err(Error::Domain(format!(
                "kesten-mckay degree {d} must be at least 2"
            ))),
            _ => Ok(()),
        }
    }

    /// The three-term recurrence behind a polynomial method. `None` for
    /// methods that are not a fixed recurrence, or whose parameters are
    /// tuned from a graph.
    pub fn recurrence(&self) -> Option<Result<Box<dyn Recurrence>>> {
        fn boxed<R: Recurrence + 'static>(r: Result<R>) -> Option<Result<Box<dyn Recurrence>>> {
            Some(r.map(|r| Box::new(r) as Box<dyn Recurrence>))
        }
        match *self {
            MethodSpec::Simple => boxed(Ok(PowerRecurrence)),
            MethodSpec::LazySimple => boxed(Ok(LazyPowerRecurrence)),
            MethodSpec::ShiftRegister { omega: Some(w) } => boxed(ShiftRegisterRecurrence::new(w)),
            MethodSpec::Jacobi { d } => boxed(JacobiRecurrence::from_dimension(d)),
            MethodSpec::JacobiGeneral { alpha, beta } => boxed(JacobiRecurrence::new(alpha, beta)),
            MethodSpec::JacobiGap { d, gamma: Some(g) } => boxed(JacobiGapRecurrence::new(d, g)),
            MethodSpec::KestenMcKay { d: Some(d) } => boxed(KestenMcKayRecurrence::new(d)),
            _ => None,
        }
    }

    /// Builds the iteration on `(g, w)` started from `xi`. `gap` must be
    /// provided when [`MethodSpec::needs_gap`] holds.
    pub fn build<'a>(
        &self,
        g: &'a Graph,
        w: &'a GossipMatrix,
        xi: &[f64],
        gap: Option<f64>,
    ) -> Result<Box<dyn GossipIteration + 'a>> {
        let need_gap =
            || gap.ok_or_else(|| Error::Precondition(format!("{self} needs the spectral gap")));
        Ok(match *self {
            MethodSpec::Simple => Box::new(PolynomialIteration::simple(w, xi)?),
            MethodSpec::LazySimple => Box::new(PolynomialIteration::lazy_simple(w, xi)?),
            MethodSpec::ShiftRegister { omega } => {
                let omega = match omega {
                    Some(o) => o,
                    None => shift_register_omega(need_gap()?)?,
                };
                Box::new(PolynomialIteration::shift_register(w, xi, omega)?)
            }
            MethodSpec::Jacobi { d } => Box::new(PolynomialIteration::jacobi(w, xi, d)?),
            MethodSpec::JacobiGeneral { alpha, beta } => {
                Box::new(PolynomialIteration::jacobi_general(w, xi, alpha, beta)?)
            }
            MethodSpec::JacobiGap { d, gamma } => {
                let gamma = match gamma {
                    Some(g) => g,
                    None => need_gap()?,
                };
                Box::new(JacobiGapIteration::new(w, xi, d, gamma)?)
            }
            MethodSpec::ParameterFree => Box::new(ParameterFree::new(w, xi)?),
            MethodSpec::MessagePassing => Box::new(MessagePassing::new(g, xi)?),
            MethodSpec::MessagePassingRegular => Box::new(MessagePassingRegular::new(g, xi)?),
            MethodSpec::KestenMcKay { d } => {
                let d = match d {
                    Some(d) => d,
                    None => g
                        .regular_degree()
                        .and_then(|d| u32::try_from(d).ok())
                        .ok_or_else(|| {
                            Error::Precondition(
                                "kesten-mckay without a degree needs a regular graph".into(),
                            )
                        })?,
                };
                Box::new(PolynomialIteration::kesten_mckay(w, xi, d)?)
            }
            MethodSpec::LocalAverage => Box::new(LocalAverage::new(g, xi)?),
        })
    }
}

impl fmt::Display for MethodSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MethodSpec::Simple => write!(f, "simple"),
            MethodSpec::LazySimple => write!(f, "lazy-simple"),
            MethodSpec::ShiftRegister { omega: None } => write!(f, "shift-register"),
            MethodSpec::ShiftRegister { omega: Some(w) } => write!(f, "shift-register:{w}"),
            MethodSpec::Jacobi { d } => write!(f, "jacobi:{d}"),
            MethodSpec::JacobiGeneral { alpha, beta } => write!(f, "jacobi-general:{alpha}:{beta}"),
            MethodSpec::JacobiGap { d, gamma: None } => write!(f, "jacobi-gap:{d}"),
            MethodSpec::JacobiGap { d, gamma: Some(g) } => write!(f, "jacobi-gap:{d}:{g}"),
            MethodSpec::ParameterFree => write!(f, "parameter-free"),
            MethodSpec::MessagePassing => write!(f, "mp"),
            MethodSpec::MessagePassingRegular => write!(f, "mp-regular"),
            MethodSpec::KestenMcKay { d: None } => write!(f, "kesten-mckay"),
            MethodSpec::KestenMcKay { d: Some(d) } => write!(f, "kesten-mckay:{d}"),
            MethodSpec::LocalAverage => write!(f, "local-average"),
        }
    }
}

impl FromStr for MethodSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut parts = s.split(':');
        let name = parts.next().unwrap_or_default().replace('_', "-");
        let args: Vec<&str> = parts.collect();
        let num = |i: usize| -> Result<f64> {
            args[i]
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad number {:?} in method {s:?}", args[i])))
        };
        let arity = |lo: usize, hi: usize| -> Result<()> {
            if (lo..=hi).contains(&args.len()) {
                Ok(())
            } else {
                Err(Error::Parse(format!(
                    "method {s:?}: wrong number of parameters"
                )))
            }
        };
        let spec = match name.as_str() {
            "simple" => {
                arity(0, 0)?;
                MethodSpec::Simple
            }
            "lazy-simple" => {
                arity(0, 0)?;
                MethodSpec::LazySimple
            }
            "shift-register" => {
                arity(0, 1)?;
                MethodSpec::ShiftRegister {
                    omega: if args.is_empty() { None } else { Some(num(0)?) },
                }
            }
            "jacobi" => {
                arity(1, 1)?;
                MethodSpec::Jacobi { d: num(0)? }
            }
            "jacobi-general" => {
                arity(2, 2)?;
                MethodSpec::JacobiGeneral {
                    alpha: num(0)?,
                    beta: num(1)?,
                }
            }
            "jacobi-gap" => {
                arity(1, 2)?;
                MethodSpec::JacobiGap {
                    d: num(0)?,
                    gamma: if args.len() == 2 { Some(num(1)?) } else { None },
                }
            }
            "parameter-free" => {
                arity(0, 0)?;
                MethodSpec::ParameterFree
            }
            "mp" | "message-passing" => {
                arity(0, 0)?;
                MethodSpec::MessagePassing
            }
            "mp-regular" => {
                arity(0, 0)?;
                MethodSpec::MessagePassingRegular
            }
            "kesten-mckay" => {
                arity(0, 1)?;
                let d = match args.first() {
                    Some(a) => Some(
                        a.trim()
                            .parse()
                            .map_err(|_| Error::Parse(format!("bad degree {a:?}")))?,
                    ),
                    None => None,
                };
                MethodSpec::KestenMcKay { d }
            }
            "local-average" => {
                arity(0, 0)?;
                MethodSpec::LocalAverage
            }
            _ => return Err(Error::Parse(format!("unknown method {s:?}"))),
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Parses a comma-separated method list.
pub fn parse_methods(list: &str) -> Result<Vec<MethodSpec>> {
    let methods: Vec<MethodSpec> = list
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(str::parse)
        .collect::<Result<_>>()?;
    if methods.is_empty() {
        return Err(Error::Parse("empty method list".into()));
    }
    Ok(methods)
}
