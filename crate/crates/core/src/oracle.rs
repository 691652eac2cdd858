//! Brute-force reference for the message-passing posterior.
//!
//! Enumerates every Pauli pattern on the physical register, extracts its
//! syndromes and top-level class with the plain operator routines, and
//! accumulates the pattern probabilities per syndrome set. Feasible only for
//! tiny registers.

use std::collections::BTreeMap;

use crate::bp::BpDecoder;
use crate::code::{LogicalDistribution, StabilizerCode, Syndrome};
use crate::concat::{ConcatenatedCode, SyndromeSet};
use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliOperator};

/// Largest register enumerated (`4^10` patterns).
pub const MAX_ORACLE_QUBITS: usize = 10;

#[derive(Clone, Debug)]
pub struct EnumerationOracle {
    cc: ConcatenatedCode,
    prior: LogicalDistribution,
    weights: BTreeMap<Vec<u16>, [f64; 4]>,
}

/// Outcome of comparing the decoder against the enumeration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleReport {
    pub compared: usize,
    pub max_deviation: f64,
}

/// Syndromes (layer 1 first, flattened) and top class of a physical pattern,
/// computed layer by layer on explicit operators.
pub fn reference_extract(code: &StabilizerCode, physical: &[Pauli]) -> Result<(Vec<u16>, Pauli)> {
    let n = code.n();
    let mut current = physical.to_vec();
    let mut layers: Vec<Vec<u16>> = Vec::new();
    loop {
        let mut syndromes = Vec::with_capacity(current.len() / n);
        let mut classes = Vec::with_capacity(current.len() / n);
        for block in current.chunks(n) {
            let op = PauliOperator::from_factors(block);
            syndromes.push(code.syndrome(&op)?.bits());
            classes.push(code.logical_class(&op)?);
        }
        layers.push(syndromes);
        current = classes;
        if current.len() == 1 {
            break;
        }
    }
    layers.reverse();
    Ok((layers.concat(), current[0]))
}

fn key_of(syndromes: &SyndromeSet) -> Vec<u16> {
    (1..=syndromes.levels())
        .flat_map(|m| syndromes.layer(m).iter().copied())
        .collect()
}

impl EnumerationOracle {
    pub fn build(cc: ConcatenatedCode, prior: LogicalDistribution) -> Result<Self> {
        let qubits = cc.physical_qubits();
        if qubits > MAX_ORACLE_QUBITS {
            return Err(Error::InvalidConfig(format!(
                "enumeration needs at most {MAX_ORACLE_QUBITS} physical qubits, got {qubits}"
            )));
        }
        let mut weights: BTreeMap<Vec<u16>, [f64; 4]> = BTreeMap::new();
        let mut pattern = vec![Pauli::I; qubits];
        loop {
            let prob: f64 = pattern.iter().map(|&f| prior[f]).product();
            if prob > 0.0 {
                let (key, top) = reference_extract(cc.base(), &pattern)?;
                weights.entry(key).or_insert([0.0; 4])[top.index()] += prob;
            }
            // Odometer over {I, X, Y, Z}^qubits.
            let mut i = 0;
            while i < qubits {
                let next = (pattern[i].index() + 1) % 4;
                pattern[i] = Pauli::from_index(next as u8);
                if next != 0 {
                    break;
                }
                i += 1;
            }
            if i == qubits {
                break;
            }
        }
        Ok(Self { cc, prior, weights })
    }

    pub fn code(&self) -> &ConcatenatedCode {
        &self.cc
    }

    /// Number of syndrome sets with non-zero probability.
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `P(syndromes)`, the total probability of the patterns producing them.
    pub fn syndrome_probability(&self, syndromes: &SyndromeSet) -> f64 {
        self.weights
            .get(&key_of(syndromes))
            .map_or(0.0, |w| w.iter().sum())
    }

    /// `P(L_1 | syndromes)`, or `None` if the syndromes are impossible.
    pub fn posterior(&self, syndromes: &SyndromeSet) -> Option<LogicalDistribution> {
        self.weights
            .get(&key_of(syndromes))
            .and_then(|w| LogicalDistribution::from_weights(*w))
    }

    /// Every possible syndrome set, in lexicographic order.
    pub fn syndrome_sets(&self) -> impl Iterator<Item = SyndromeSet> + '_ {
        let u = self.cc.base().u();
        self.weights.keys().map(move |key| {
            let mut set = SyndromeSet::empty(&self.cc);
            let mut bits = key.iter();
            for m in 1..=self.cc.levels() {
                for j in 1..=self.cc.blocks_at_layer(m) {
                    let s = Syndrome::from_raw(*bits.next().expect("key length"), u);
                    set.set(m, j, s).expect("in range");
                }
            }
            set
        })
    }

    /// Compares the decoder on the given syndrome sets.
    pub fn compare<'a, I>(&self, decoder: &BpDecoder, sets: I) -> Result<OracleReport>
    where
        I: IntoIterator<Item = &'a SyndromeSet>,
    {
        let mut report = OracleReport {
            compared: 0,
            max_deviation: 0.0,
        };
        for set in sets {
            let expected = self
                .posterior(set)
                .ok_or_else(|| Error::ImpossibleSyndrome {
                    syndrome: set.to_string(),
                })?;
            let got = decoder.decode(set)?.posterior;
            report.compared += 1;
            report.max_deviation = report.max_deviation.max(got.max_deviation(&expected));
        }
        Ok(report)
    }

    /// Compares the decoder on every possible syndrome set.
    pub fn check_all(&self) -> Result<OracleReport> {
        let decoder = BpDecoder::new(self.cc.clone(), self.prior);
        let sets: Vec<SyndromeSet> = self.syndrome_sets().collect();
        self.compare(&decoder, &sets)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::{five_qubit, repetition3};

    #[test]
    fn probabilities_sum_to_one() {
        let cc = ConcatenatedCode::new(repetition3(), 2).unwrap();
        let oracle =
            EnumerationOracle::build(cc, LogicalDistribution::depolarizing(0.2).unwrap()).unwrap();
        let total: f64 = oracle
            .syndrome_sets()
            .map(|s| oracle.syndrome_probability(&s))
            .sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert_eq!(oracle.len(), 1 << 8);
    }

    #[test]
    fn reference_matches_fast_extraction() {
        let cc = ConcatenatedCode::new(five_qubit(), 2).unwrap();
        let e: PauliOperator = "XIZIYIIZZXYYIIIZXIIIZZIYX".parse().unwrap();
        let (syndromes, classes) = cc.extract(&e).unwrap();
        let (key, top) = reference_extract(cc.base(), &e.to_factors()).unwrap();
        assert_eq!(key, key_of(&syndromes));
        assert_eq!(top, classes.top());
    }

    #[test]
    fn level_one_five_qubit() {
        for p in [0.05, 0.1, 0.2] {
            let cc = ConcatenatedCode::new(five_qubit(), 1).unwrap();
            let oracle =
                EnumerationOracle::build(cc, LogicalDistribution::depolarizing(p).unwrap())
                    .unwrap();
            let report = oracle.check_all().unwrap();
            assert_eq!(report.compared, 16);
            assert!(report.max_deviation <= 1e-12, "{report:?}");
        }
    }

    #[test]
    fn register_cap() {
        let cc = ConcatenatedCode::new(five_qubit(), 2).unwrap();
        assert!(
            EnumerationOracle::build(cc, LogicalDistribution::depolarizing(0.1).unwrap()).is_err()
        );
    }
}
