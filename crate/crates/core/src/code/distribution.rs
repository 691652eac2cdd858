use std::fmt;
use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::Pauli;

/// Relative gap below which two probabilities are reported as tied.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// A probability vector over the four logical classes, indexed `I, X, Y, Z`.
///
/// Used for channel priors, block posteriors and the upward messages of the
/// tree decoder alike.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogicalDistribution {
    pub(crate) probs: [f64; 4],
}

impl LogicalDistribution {
    /// Normalizes non-negative weights. Fails if any weight is negative or
    /// non-finite, or if all weights are zero.
    pub fn from_weights(weights: [f64; 4]) -> Option<Self> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return None;
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return None;
        }
        Some(Self {
            probs: weights.map(|w| w / total),
        })
    }

    /// `(1 - p, p/3, p/3, p/3)`.
    pub fn depolarizing(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidProbability(p));
        }
        let q = p / 3.0;
        Ok(Self {
            probs: [1.0 - p, q, q, q],
        })
    }

    pub fn deterministic(class: Pauli) -> Self {
        let mut probs = [0.0; 4];
        probs[class.index()] = 1.0;
        Self { probs }
    }

    pub fn probabilities(&self) -> [f64; 4] {
        self.probs
    }

    pub fn get(&self, class: Pauli) -> f64 {
        self.probs[class.index()]
    }

    /// Most likely class, ties broken towards `I < X < Y < Z`, and whether
    /// another class was within [`TIE_TOLERANCE`] of the maximum.
    pub fn argmax(&self) -> (Pauli, bool) {
        argmax_with_tie(&self.probs)
    }

    pub fn max_probability(&self) -> f64 {
        self.probs.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Largest absolute componentwise difference.
    pub fn max_deviation(&self, other: &Self) -> f64 {
        self.probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

pub(crate) fn argmax_with_tie(values: &[f64; 4]) -> (Pauli, bool) {
    let mut best = 0;
    for k in 1..4 {
        if values[k] > values[best] {
            best = k;
        }
    }
    let top = values[best];
    let tie = (0..4).any(|k| k != best && top - values[k] <= TIE_TOLERANCE * top.abs());
    (Pauli::from_index(best as u8), tie)
}

impl Index<Pauli> for LogicalDistribution {
    type Output = f64;

    fn index(&self, class: Pauli) -> &f64 {
        &self.probs[class.index()]
    }
}

impl fmt::Display for LogicalDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [i, x, y, z] = self.probs;
        write!(f, "(I: {i}, X: {x}, Y: {y}, Z: {z})")
    }
}
