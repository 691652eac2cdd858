//! Layer-by-layer hard decoding with a fixed lookup table.
//!
//! Every block is corrected independently from its syndrome, and only the
//! hard decision is passed to the layer above. Upper-layer syndromes are
//! read relative to the corrections already chosen below, so the decoder
//! needs nothing but the measured [`SyndromeSet`].

use crate::code::{
    HardTable, LogicalClass, LogicalDistribution, StabilizerCode, Syndrome, TableRule,
};
use crate::concat::{ConcatenatedCode, LayerClasses, SyndromeSet};
use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliOperator};

/// The accumulated corrections of every block, layer 1 first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockwiseEstimate {
    corrections: Vec<Vec<LogicalClass>>,
}

impl BlockwiseEstimate {
    pub fn empty(cc: &ConcatenatedCode) -> Self {
        Self {
            corrections: (1..=cc.levels())
                .map(|m| vec![Pauli::I; cc.blocks_at_layer(m)])
                .collect(),
        }
    }

    /// The decoder's estimate of the top-level logical class.
    pub fn estimate(&self) -> LogicalClass {
        self.corrections[0][0]
    }

    /// Accumulated correction classes of layer `m`, 1-based.
    pub fn layer(&self, m: usize) -> &[LogicalClass] {
        &self.corrections[m - 1]
    }
}

/// Result of decoding a known physical error.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockwiseOutcome {
    pub estimate: LogicalClass,
    pub truth: LogicalClass,
    pub success: bool,
    /// Residual effective error after correction at each layer, layer 1 first.
    pub residuals: Vec<PauliOperator>,
}

fn check_table(cc: &ConcatenatedCode, table: &HardTable) -> Result<()> {
    if table.syndrome_len() != cc.base().u() {
        return Err(Error::LengthMismatch {
            expected: cc.base().u(),
            found: table.syndrome_len(),
        });
    }
    Ok(())
}

/// Decodes from syndromes alone.
pub fn decode_syndromes(
    cc: &ConcatenatedCode,
    syndromes: &SyndromeSet,
    table: &HardTable,
) -> Result<BlockwiseEstimate> {
    cc.check_syndromes(syndromes)?;
    check_table(cc, table)?;
    let mut estimate = BlockwiseEstimate::empty(cc);
    estimate_into(cc, syndromes, table, &mut estimate);
    Ok(estimate)
}

pub(crate) fn estimate_into(
    cc: &ConcatenatedCode,
    syndromes: &SyndromeSet,
    table: &HardTable,
    out: &mut BlockwiseEstimate,
) -> LogicalClass {
    let kernel = cc.base().kernel();
    let n = kernel.n();
    let levels = cc.levels();
    for (c, &s) in out.corrections[levels - 1]
        .iter_mut()
        .zip(syndromes.layer(levels))
    {
        *c = table.lookup(s);
    }
    for m in (1..levels).rev() {
        let (upper, lower) = out.corrections.split_at_mut(m);
        let children = &lower[0];
        for ((c, &s), block) in upper[m - 1]
            .iter_mut()
            .zip(syndromes.layer(m))
            .zip(children.chunks_exact(n))
        {
            // The lower corrections shift this block's syndrome and class.
            let (shift, class) = kernel.signature_of(block);
            *c = class ^ table.lookup(s ^ shift);
        }
    }
    out.estimate()
}

/// Decodes a physical error, reporting the residual left at every layer.
pub fn decode(
    cc: &ConcatenatedCode,
    error: &PauliOperator,
    table: &HardTable,
) -> Result<BlockwiseOutcome> {
    let (syndromes, classes) = cc.extract(error)?;
    let estimate = decode_syndromes(cc, &syndromes, table)?;
    Ok(outcome(cc, &classes, &estimate))
}

fn outcome(
    cc: &ConcatenatedCode,
    truth: &LayerClasses,
    estimate: &BlockwiseEstimate,
) -> BlockwiseOutcome {
    let residuals = (1..=cc.levels())
        .map(|m| {
            let r: Vec<Pauli> = truth
                .layer(m)
                .iter()
                .zip(estimate.layer(m))
                .map(|(&t, &e)| t ^ e)
                .collect();
            PauliOperator::from_factors(&r)
        })
        .collect();
    BlockwiseOutcome {
        estimate: estimate.estimate(),
        truth: truth.top(),
        success: estimate.estimate() == truth.top(),
        residuals,
    }
}

/// The exact effective channel after each level of blockwise decoding.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LevelChannel {
    pub level: usize,
    pub channel: LogicalDistribution,
    /// Probability that the top-level correction is wrong.
    pub p_e: f64,
}

/// Propagates the depolarizing channel through `levels` rounds of blockwise
/// decoding with a fixed table. Every qubit of a layer sees the same
/// effective channel, because blocks are disjoint and the table is shared.
pub fn exact_blockwise_recursion(
    code: &StabilizerCode,
    p: f64,
    levels: usize,
    table: &HardTable,
) -> Result<Vec<LevelChannel>> {
    if table.syndrome_len() != code.u() {
        return Err(Error::LengthMismatch {
            expected: code.u(),
            found: table.syndrome_len(),
        });
    }
    let mut channel = LogicalDistribution::depolarizing(p)?;
    let mut out = Vec::with_capacity(levels);
    for level in 1..=levels {
        channel = next_channel(code, &channel, table);
        out.push(LevelChannel {
            level,
            channel,
            p_e: channel.probs[1] + channel.probs[2] + channel.probs[3],
        });
    }
    Ok(out)
}

fn next_channel(
    code: &StabilizerCode,
    channel: &LogicalDistribution,
    table: &HardTable,
) -> LogicalDistribution {
    let priors = vec![*channel; code.n()];
    let kernel = code.kernel();
    let mut next = [0.0; 4];
    for s in Syndrome::all(code.u()) {
        let correction = table.get(s);
        let masses = kernel.masses(&priors, s.index());
        for class in Pauli::ALL {
            next[(class ^ correction).index()] += masses[class.index()];
        }
    }
    // Exact total is 1; rounding drift would otherwise grow n-fold per level.
    LogicalDistribution::from_weights(next).expect("non-negative masses")
}

/// Whether repeated blockwise decoding at rate `p` drives the logical error
/// probability below `1e-9` within `max_levels` levels.
pub fn below_threshold(
    code: &StabilizerCode,
    rule: TableRule,
    p: f64,
    max_levels: usize,
) -> Result<bool> {
    let table = code.table(rule, p)?;
    let mut channel = LogicalDistribution::depolarizing(p)?;
    for _ in 0..max_levels {
        channel = next_channel(code, &channel, &table);
        if channel.probs[1] + channel.probs[2] + channel.probs[3] < 1e-9 {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Bisects the blockwise threshold within `[low, high]` to width `tol`.
/// Expects `low` below and `high` above threshold.
pub fn bisect_threshold(
    code: &StabilizerCode,
    rule: TableRule,
    mut low: f64,
    mut high: f64,
    tol: f64,
) -> Result<f64> {
    const MAX_LEVELS: usize = 200;
    if !below_threshold(code, rule, low, MAX_LEVELS)?
        || below_threshold(code, rule, high, MAX_LEVELS)?
    {
        return Err(Error::InvalidConfig(format!(
            "threshold not bracketed by [{low}, {high}]"
        )));
    }
    while high - low > tol {
        let mid = 0.5 * (low + high);
        if below_threshold(code, rule, mid, MAX_LEVELS)? {
            low = mid;
        } else {
            high = mid;
        }
    }
    Ok(0.5 * (low + high))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::{five_qubit, repetition3, steane};
    use proptest::prelude::*;

    /// The literal procedure: correct each block of the current residual
    /// string, and pass the residual classes upward.
    fn simulate_residuals(
        cc: &ConcatenatedCode,
        e: &PauliOperator,
        table: &HardTable,
    ) -> Vec<PauliOperator> {
        let code = cc.base();
        let n = code.n();
        let mut current = e.clone();
        let mut residuals = vec![PauliOperator::identity(1); cc.levels()];
        for m in (1..=cc.levels()).rev() {
            let next: Vec<Pauli> = (0..current.len() / n)
                .map(|b| {
                    let block = current.slice(b * n, n).unwrap();
                    code.logical_class(&block).unwrap() ^ table.get(code.syndrome(&block).unwrap())
                })
                .collect();
            current = PauliOperator::from_factors(&next);
            residuals[m - 1] = current.clone();
        }
        residuals
    }

    fn arb_error(qubits: usize) -> impl Strategy<Value = PauliOperator> {
        prop::collection::vec(prop::sample::select(vec![0u8, 0, 0, 1, 2, 3]), qubits).prop_map(
            |v| {
                let f: Vec<Pauli> = v.into_iter().map(Pauli::from_index).collect();
                PauliOperator::from_factors(&f)
            },
        )
    }

    #[test]
    fn identity_is_decoded() {
        let cc = ConcatenatedCode::new(five_qubit(), 3).unwrap();
        let table = cc.base().hard_table(0.1).unwrap();
        let out = decode(&cc, &PauliOperator::identity(125), &table).unwrap();
        assert!(out.success);
        assert_eq!(out.estimate, Pauli::I);
        assert!(out.residuals.iter().all(|r| r.is_identity()));
    }

    #[test]
    fn single_qubit_errors_are_corrected() {
        for code in [five_qubit(), steane()] {
            let table = code.hard_table(0.1).unwrap();
            for levels in 1..=3 {
                let cc = ConcatenatedCode::new(code.clone(), levels).unwrap();
                let q = cc.physical_qubits();
                for i in (0..q).step_by(q / 20 + 1) {
                    for f in [Pauli::X, Pauli::Y, Pauli::Z] {
                        let e = PauliOperator::single(q, i, f).unwrap();
                        let out = decode(&cc, &e, &table).unwrap();
                        assert!(out.success, "{} level {levels} {f} on {i}", code.name());
                        assert!(out.residuals.iter().all(|r| r.is_identity()));
                    }
                }
            }
        }
    }

    #[test]
    fn level_one_is_table_lookup() {
        let cc = ConcatenatedCode::new(five_qubit(), 1).unwrap();
        let code = cc.base();
        let table = code.hard_table(0.1).unwrap();
        for k in 0..1024u32 {
            let f: Vec<Pauli> = (0..5)
                .map(|i| Pauli::from_index(((k >> (2 * i)) & 3) as u8))
                .collect();
            let e = PauliOperator::from_factors(&f);
            let out = decode(&cc, &e, &table).unwrap();
            let s = code.syndrome(&e).unwrap();
            assert_eq!(out.estimate, table.get(s));
            assert_eq!(out.success, table.get(s) == code.logical_class(&e).unwrap());
        }
    }

    #[test]
    fn mismatched_inputs_rejected() {
        let cc = ConcatenatedCode::new(five_qubit(), 2).unwrap();
        let table = cc.base().hard_table(0.1).unwrap();
        assert!(decode(&cc, &PauliOperator::identity(5), &table).is_err());
        let other = steane().hard_table(0.1).unwrap();
        assert!(decode(&cc, &PauliOperator::identity(25), &other).is_err());
    }

    proptest! {
        #[test]
        fn syndrome_only_decoding_matches_residual_simulation(e in arb_error(125)) {
            let cc = ConcatenatedCode::new(five_qubit(), 3).unwrap();
            let table = cc.base().hard_table(0.1).unwrap();
            let out = decode(&cc, &e, &table).unwrap();
            let literal = simulate_residuals(&cc, &e, &table);
            prop_assert_eq!(&out.residuals, &literal);
            prop_assert_eq!(out.success, literal[0].is_identity());
        }

        #[test]
        fn bottom_stabilizers_do_not_change_success(e in arb_error(49), block in 0usize..7, g in 1usize..64) {
            let cc = ConcatenatedCode::new(steane(), 2).unwrap();
            let table = cc.base().hard_table(0.1).unwrap();
            let element = &cc.base().stabilizer_group()[g];
            let mut shifted = e.clone();
            for (i, f) in element.factors().enumerate() {
                let idx = block * 7 + i;
                shifted.set(idx, e.factor_at(idx).unwrap() ^ f).unwrap();
            }
            prop_assert_eq!(
                decode(&cc, &shifted, &table).unwrap().success,
                decode(&cc, &e, &table).unwrap().success
            );
        }
    }

    #[test]
    fn noiseless_recursion() {
        let code = five_qubit();
        let table = code.hard_table(0.1).unwrap();
        for level in exact_blockwise_recursion(&code, 0.0, 5, &table).unwrap() {
            assert_eq!(level.channel.probabilities(), [1.0, 0.0, 0.0, 0.0]);
            assert_eq!(level.p_e, 0.0);
        }
    }

    #[test]
    fn recursion_preserves_normalization() {
        for code in [five_qubit(), steane(), repetition3()] {
            for &p in &[0.01, 0.1, 0.2, 0.5] {
                let table = code.hard_table(p).unwrap();
                for level in exact_blockwise_recursion(&code, p, 8, &table).unwrap() {
                    assert!((level.channel.total() - 1.0).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn repetition_recursion_matches_closed_form() {
        // Bit flips (X, Y) are corrected by majority vote; phase errors pass
        // through with parity. One level by hand:
        let code = repetition3();
        let p = 0.1;
        let table = code.hard_table(p).unwrap();
        let level = exact_blockwise_recursion(&code, p, 1, &table).unwrap()[0];
        // Per qubit: flip f = 2p/3, phase component z-bit with prob 2p/3.
        // Residual logical X-bit: majority of three flips fails.
        let f = 2.0 * p / 3.0;
        let logical_flip = 3.0 * f * f * (1.0 - f) + f.powi(3);
        let x_bit = level.channel.get(Pauli::X) + level.channel.get(Pauli::Y);
        assert!(
            (x_bit - logical_flip).abs() < 1e-15,
            "{x_bit} vs {logical_flip}"
        );
    }

    #[test]
    fn below_threshold_decreases_strictly() {
        let code = five_qubit();
        for &p in &[0.05, 0.1, 0.13] {
            let table = code.hard_table(p).unwrap();
            let levels = exact_blockwise_recursion(&code, p, 6, &table).unwrap();
            for pair in levels.windows(2) {
                assert!(pair[1].p_e < pair[0].p_e, "p={p}: {pair:?}");
            }
        }
    }
}
