//! Synchronous gossip iterations behind one step-wise interface.
//!
//! Every method is constructed from its inputs (a gossip matrix or a graph,
//! plus the initial values `ξ`), starts at round 0 with estimate `ξ`, and
//! advances one communication round per [`GossipIteration::step`].

mod local_average;
mod message_passing;
mod parameter_free;
mod polynomial;

pub use local_average::{local_average_oracle, LocalAverage};
pub use message_passing::{MessagePassing, MessagePassingRegular};
pub use parameter_free::{ParameterFree, PARAMETER_FREE_TOLERANCE};
pub use polynomial::{JacobiGapIteration, PolynomialIteration};

use crate::error::{Error, Result};

pub trait GossipIteration: Send {
    /// Method name used in experiment output. Contains no commas.
    fn label(&self) -> String;

    /// Rounds performed so far.
    fn round(&self) -> usize;

    /// Current estimate `x^t`, one value per vertex.
    fn estimate(&self) -> &[f64];

    /// Performs one synchronous round.
    fn step(&mut self);

    fn advance(&mut self, rounds: usize) {
        for _ in 0..rounds {
            self.step();
        }
    }
}

/// Runs `rounds` steps and returns `x^0, …, x^rounds`.
pub fn trajectory(it: &mut dyn GossipIteration, rounds: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(rounds + 1);
    out.push(it.estimate().to_vec());
    for _ in 0..rounds {
        it.step();
        out.push(it.estimate().to_vec());
    }
    out
}

fn check_len(expected: usize, xi: &[f64]) -> Result<()> {
    if xi.len() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            got: xi.len(),
        });
    }
    Ok(())
}
