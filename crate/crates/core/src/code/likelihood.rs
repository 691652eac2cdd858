//! Coset likelihoods of a single block.
//!
//! For a syndrome `s` and logical class `L`, the coset `L T(s) G` ranges over
//! the `2^u` stabilizer-group elements `G`. Its probability under a product
//! prior is a sum of `2^u` products of per-qubit factors. Because the
//! phaseless single-qubit product is XOR on factor indices, every coset
//! element's factors are `rep(s, L)[i] ^ group[g][i]`.

use std::fmt;

use serde::Serialize;

use super::distribution::argmax_with_tie;
use super::{LogicalClass, LogicalDistribution, StabilizerCode, Syndrome, MAX_BLOCK_LEN};
use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliOperator};

/// Precomputed per-code data shared by every likelihood evaluation.
#[derive(Clone, Debug)]
pub(crate) struct Kernel {
    n: usize,
    u: usize,
    /// `2^u` rows of `n` factor indices, one per stabilizer-group element.
    group: Vec<u8>,
    /// `2^u * 4` rows of `n` factor indices: the coset representative
    /// `L T(s)` for syndrome `s` and class `L` at row `4 s + L`.
    reps: Vec<u8>,
    /// Per qubit and factor: its syndrome bits, with its logical class
    /// shifted into bits 16 and 17. Both maps are linear, so the signature
    /// of a block is the XOR of its qubits' entries.
    signature: Vec<[u32; 4]>,
}

pub(crate) const CLASS_SHIFT: u32 = 16;

impl Kernel {
    pub(crate) fn build(code: &StabilizerCode) -> Self {
        let n = code.n();
        let u = code.u();
        let factor_row = |op: &PauliOperator| op.factors().map(|f| f as u8).collect::<Vec<u8>>();

        let group: Vec<u8> = code
            .stabilizer_group()
            .iter()
            .flat_map(factor_row)
            .collect();

        let mut reps = Vec::with_capacity((4 << u) * n);
        for s in Syndrome::all(u) {
            let t = code
                .pure_error_for(s)
                .unwrap_or_else(|_| PauliOperator::identity(n));
            for class in Pauli::ALL {
                let rep = code
                    .logical_operator(class)
                    .multiply(&t)
                    .expect("equal lengths");
                reps.extend(factor_row(&rep));
            }
        }

        let signature = (0..n)
            .map(|i| {
                Pauli::ALL.map(|f| {
                    let e = PauliOperator::single(n, i, f).expect("index in range");
                    let s = code.syndrome(&e).map(|s| s.bits() as u32).unwrap_or(0);
                    let class = code.logical_class(&e).map(|c| c as u32).unwrap_or(0);
                    s | class << CLASS_SHIFT
                })
            })
            .collect();

        Self {
            n,
            u,
            group,
            reps,
            signature,
        }
    }

    #[inline]
    pub(crate) fn n(&self) -> usize {
        self.n
    }

    /// Packed syndrome and class of a block given as factor indices.
    #[inline]
    pub(crate) fn signature_of(&self, block: &[Pauli]) -> (u16, Pauli) {
        let packed = block
            .iter()
            .zip(&self.signature)
            .fold(0u32, |acc, (&f, row)| acc ^ row[f as usize]);
        (
            (packed & 0xffff) as u16,
            Pauli::from_index((packed >> CLASS_SHIFT) as u8),
        )
    }

    /// Per-class factor tables with the coset representative folded in.
    #[inline]
    fn shifted_priors(
        &self,
        priors: &[LogicalDistribution],
        s: usize,
        class: usize,
    ) -> [[f64; 4]; MAX_BLOCK_LEN] {
        let n = self.n;
        let rep = &self.reps[(4 * s + class) * n..(4 * s + class + 1) * n];
        let mut shifted = [[0.0; 4]; MAX_BLOCK_LEN];
        for ((row, &r), prior) in shifted.iter_mut().zip(rep).zip(priors) {
            let p = &prior.probs;
            let r = r as usize;
            *row = [p[r], p[r ^ 1], p[r ^ 2], p[r ^ 3]];
        }
        shifted
    }

    /// Unnormalized joint masses `P(L, s)`, indexed by class.
    pub(crate) fn masses(&self, priors: &[LogicalDistribution], s: usize) -> [f64; 4] {
        let n = self.n;
        let mut out = [0.0; 4];
        for (class, mass) in out.iter_mut().enumerate() {
            let shifted = self.shifted_priors(priors, s, class);
            let shifted = &shifted[..n];
            *mass = self
                .group
                .chunks_exact(n)
                .map(|g| {
                    g.iter()
                        .zip(shifted)
                        .fold(1.0, |prod, (&f, row)| prod * row[f as usize])
                })
                .sum();
        }
        out
    }

    /// Natural logarithms of [`masses`](Kernel::masses), immune to underflow.
    pub(crate) fn log_masses(&self, priors: &[LogicalDistribution], s: usize) -> [f64; 4] {
        let n = self.n;
        let mut out = [f64::NEG_INFINITY; 4];
        let mut terms = Vec::with_capacity(1 << self.u);
        for (class, mass) in out.iter_mut().enumerate() {
            let shifted = self.shifted_priors(priors, s, class);
            let logs: Vec<[f64; 4]> = shifted[..n].iter().map(|row| row.map(f64::ln)).collect();
            terms.clear();
            terms.extend(self.group.chunks_exact(n).map(|g| {
                g.iter()
                    .zip(&logs)
                    .map(|(&f, row)| row[f as usize])
                    .sum::<f64>()
            }));
            *mass = log_sum_exp(&terms);
        }
        out
    }

    /// Normalized posterior over classes and `ln P(s)`, or `None` when every
    /// coset has zero probability.
    pub(crate) fn posterior(
        &self,
        priors: &[LogicalDistribution],
        s: usize,
    ) -> Option<(LogicalDistribution, f64)> {
        let masses = self.masses(priors, s);
        let total: f64 = masses.iter().sum();
        if total.is_finite() && total >= f64::MIN_POSITIVE {
            return Some((
                LogicalDistribution {
                    probs: masses.map(|m| m / total),
                },
                total.ln(),
            ));
        }
        // Linear-domain sums underflowed; redo in the log domain and rescale
        // by the largest component.
        let logs = self.log_masses(priors, s);
        let ln_total = log_sum_exp(&logs);
        if ln_total == f64::NEG_INFINITY || ln_total.is_nan() {
            return None;
        }
        Some((
            LogicalDistribution {
                probs: logs.map(|l| (l - ln_total).exp()),
            },
            ln_total,
        ))
    }
}

fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// A block posterior together with the probability of the observed syndrome.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlockPosterior {
    pub distribution: LogicalDistribution,
    /// `ln P(s)` under the prior: the normalization constant before division.
    pub ln_normalizer: f64,
}

impl BlockPosterior {
    pub fn normalizer(&self) -> f64 {
        self.ln_normalizer.exp()
    }
}

impl StabilizerCode {
    fn check_block_inputs(&self, priors: &[LogicalDistribution], s: Syndrome) -> Result<()> {
        if priors.len() != self.n() {
            return Err(Error::LengthMismatch {
                expected: self.n(),
                found: priors.len(),
            });
        }
        if s.len() != self.u() {
            return Err(Error::LengthMismatch {
                expected: self.u(),
                found: s.len(),
            });
        }
        Ok(())
    }

    /// Unnormalized joint probabilities `P(L, s) = sum_G prod_i priors[i][(L T(s) G)_i]`,
    /// indexed `I, X, Y, Z`.
    pub fn block_masses(&self, priors: &[LogicalDistribution], s: Syndrome) -> Result<[f64; 4]> {
        self.check_block_inputs(priors, s)?;
        Ok(self.kernel().masses(priors, s.index()))
    }

    /// The posterior `P(L | s)` of one block under independent per-qubit priors.
    pub fn block_likelihood(
        &self,
        priors: &[LogicalDistribution],
        s: Syndrome,
    ) -> Result<BlockPosterior> {
        self.check_block_inputs(priors, s)?;
        self.kernel()
            .posterior(priors, s.index())
            .map(|(distribution, ln_normalizer)| BlockPosterior {
                distribution,
                ln_normalizer,
            })
            .ok_or_else(|| Error::ImpossibleSyndrome {
                syndrome: s.to_string(),
            })
    }

    /// The maximum-likelihood lookup table for a uniform depolarizing prior.
    pub fn hard_table(&self, p: f64) -> Result<HardTable> {
        let prior = vec![LogicalDistribution::depolarizing(p)?; self.n()];
        let kernel = self.kernel();
        let (entries, ties) = Syndrome::all(self.u())
            .map(|s| argmax_with_tie(&kernel.masses(&prior, s.index())))
            .unzip();
        Ok(HardTable {
            u: self.u(),
            rule: TableRule::MaxLikelihood,
            p: Some(p),
            entries,
            ties,
        })
    }

    /// Standard CSS decoding: the X part of the error is a minimum-weight
    /// X-only operator matching the Z-type syndrome bits, the Z part likewise,
    /// and the table holds the class of their product. Ties among
    /// minimum-weight candidates keep the lowest qubit mask and are flagged.
    pub fn css_table(&self) -> Result<HardTable> {
        let n = self.n();
        let is_type = |g: &PauliOperator, f: Pauli| g.factors().all(|q| q == Pauli::I || q == f);
        if !self
            .generators()
            .iter()
            .all(|g| is_type(g, Pauli::X) || is_type(g, Pauli::Z))
        {
            return Err(Error::InvalidConfig(format!(
                "{} has generators mixing X and Z; CSS decoding needs a CSS code",
                self.name()
            )));
        }
        // Minimum-weight leader (qubit mask, tied) per partial syndrome, plus
        // the syndrome bits such errors can reach.
        type Leaders = (u16, Vec<Option<(u32, bool)>>);
        let leaders = |f: Pauli| -> Result<Leaders> {
            let mut masks: Vec<u32> = (0..1u32 << n).collect();
            masks.sort_by_key(|m| (m.count_ones(), *m));
            let mut best: Vec<Option<(u32, u32, bool)>> = vec![None; 1 << self.u()];
            let mut covered = 0u16;
            for mask in masks {
                let factors: Vec<Pauli> = (0..n)
                    .map(|i| if mask >> i & 1 == 1 { f } else { Pauli::I })
                    .collect();
                let bits = self
                    .syndrome(&PauliOperator::from_factors(&factors))?
                    .bits();
                covered |= bits;
                match &mut best[bits as usize] {
                    slot @ None => *slot = Some((mask, mask.count_ones(), false)),
                    Some((_, w, tie)) if *w == mask.count_ones() => *tie = true,
                    Some(_) => {}
                }
            }
            Ok((
                covered,
                best.into_iter()
                    .map(|b| b.map(|(m, _, t)| (m, t)))
                    .collect(),
            ))
        };
        let (z_bits, x_leaders) = leaders(Pauli::X)?;
        let (x_bits, z_leaders) = leaders(Pauli::Z)?;
        let mut entries = Vec::with_capacity(1 << self.u());
        let mut ties = Vec::with_capacity(1 << self.u());
        for s in Syndrome::all(self.u()) {
            let (Some((xm, xt)), Some((zm, zt))) = (
                x_leaders[(s.bits() & z_bits) as usize],
                z_leaders[(s.bits() & x_bits) as usize],
            ) else {
                return Err(Error::InvalidConfig(format!(
                    "no CSS correction for syndrome {s}"
                )));
            };
            let factors: Vec<Pauli> = (0..n)
                .map(|i| Pauli::from_bits(xm >> i & 1 == 1, zm >> i & 1 == 1))
                .collect();
            entries.push(self.logical_class(&PauliOperator::from_factors(&factors))?);
            ties.push(xt || zt);
        }
        Ok(HardTable {
            u: self.u(),
            rule: TableRule::Css,
            p: None,
            entries,
            ties,
        })
    }

    /// Builds the table selected by `rule`; `p` is used only by
    /// [`TableRule::MaxLikelihood`].
    pub fn table(&self, rule: TableRule, p: f64) -> Result<HardTable> {
        match rule {
            TableRule::MaxLikelihood => self.hard_table(p),
            TableRule::Css => self.css_table(),
        }
    }
}

/// How the blockwise decoder's lookup table is built.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TableRule {
    /// Argmax of the single-block coset likelihood at the channel rate.
    #[default]
    #[serde(rename = "ml")]
    MaxLikelihood,
    /// Independent minimum-weight X and Z correction (CSS codes only).
    Css,
}

impl fmt::Display for TableRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TableRule::MaxLikelihood => "ml",
            TableRule::Css => "css",
        })
    }
}

/// Maps every syndrome to its most likely logical class.
#[derive(Clone, Debug, PartialEq)]
pub struct HardTable {
    u: usize,
    rule: TableRule,
    p: Option<f64>,
    entries: Vec<LogicalClass>,
    ties: Vec<bool>,
}

impl HardTable {
    #[inline]
    pub fn get(&self, s: Syndrome) -> LogicalClass {
        self.entries[s.index()]
    }

    #[inline]
    pub(crate) fn lookup(&self, bits: u16) -> LogicalClass {
        self.entries[bits as usize]
    }

    /// Whether the argmax for `s` was tied and resolved by the `I < X < Y < Z` order.
    pub fn is_tie(&self, s: Syndrome) -> bool {
        self.ties[s.index()]
    }

    pub fn has_ties(&self) -> bool {
        self.ties.iter().any(|&t| t)
    }

    pub fn rule(&self) -> TableRule {
        self.rule
    }

    /// Rate the table was built for, if it depends on one.
    pub fn depolarizing_rate(&self) -> Option<f64> {
        self.p
    }

    pub fn syndrome_len(&self) -> usize {
        self.u
    }

    pub fn iter(&self) -> impl Iterator<Item = (Syndrome, LogicalClass, bool)> + '_ {
        Syndrome::all(self.u)
            .zip(&self.entries)
            .zip(&self.ties)
            .map(|((s, &c), &t)| (s, c, t))
    }
}

impl fmt::Display for HardTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (s, class, tie) in self.iter() {
            write!(f, "{s} -> {class}")?;
            if tie {
                write!(f, " (tie)")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
