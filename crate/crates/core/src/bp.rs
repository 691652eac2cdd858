//! Exact maximum-likelihood decoding by upward message passing.
//!
//! Conditioning on the logical classes of each layer turns the posterior of
//! the top-level class into a sum-product over a tree: each block is a factor
//! tying its class and syndrome to the classes of its `n` children. Only the
//! top marginal is needed, so messages flow strictly upward. A block's
//! message is the coset likelihood of its syndrome with the children's
//! messages used as per-qubit priors; at the bottom layer the priors are the
//! physical channel itself.

use crate::code::{LogicalClass, LogicalDistribution, StabilizerCode, Syndrome};
use crate::concat::{ConcatenatedCode, SyndromeSet};
use crate::error::{Error, Result};

/// Combines the children's messages with the block syndrome into the block's
/// posterior over its own logical class.
pub fn block_combine(
    code: &StabilizerCode,
    s: Syndrome,
    children: &[LogicalDistribution],
) -> Result<LogicalDistribution> {
    Ok(code.block_likelihood(children, s)?.distribution)
}

/// The decoded top-level class and its soft output.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BpDecision {
    pub estimate: LogicalClass,
    /// `P(L_1 | all syndromes)`.
    pub posterior: LogicalDistribution,
    /// Posterior probability of the estimate.
    pub confidence: f64,
    /// Set when another class came within the tie tolerance of the maximum.
    pub tie: bool,
}

impl BpDecision {
    fn from_posterior(posterior: LogicalDistribution) -> Self {
        let (estimate, tie) = posterior.argmax();
        Self {
            estimate,
            posterior,
            confidence: posterior.max_probability(),
            tie,
        }
    }
}

/// Every upward message of one decoding pass, layer 1 first.
#[derive(Clone, Debug, PartialEq)]
pub struct MessageTree {
    layers: Vec<Vec<LogicalDistribution>>,
}

impl MessageTree {
    fn empty(cc: &ConcatenatedCode) -> Self {
        let placeholder = LogicalDistribution::deterministic(LogicalClass::I);
        Self {
            layers: (1..=cc.levels())
                .map(|m| vec![placeholder; cc.blocks_at_layer(m)])
                .collect(),
        }
    }

    /// Message leaving block `(m, j)`, 1-based.
    pub fn message(&self, m: usize, j: usize) -> Option<&LogicalDistribution> {
        self.layers.get(m.checked_sub(1)?)?.get(j.checked_sub(1)?)
    }

    pub fn layer(&self, m: usize) -> &[LogicalDistribution] {
        &self.layers[m - 1]
    }

    pub fn top(&self) -> LogicalDistribution {
        self.layers[0][0]
    }
}

/// Tree decoder for a fixed concatenated code and i.i.d. physical channel.
#[derive(Clone, Debug)]
pub struct BpDecoder {
    cc: ConcatenatedCode,
    prior: LogicalDistribution,
    /// Bottom-layer messages per syndrome; `None` when the syndrome is
    /// impossible under the prior.
    leaves: Vec<Option<LogicalDistribution>>,
}

impl BpDecoder {
    pub fn new(cc: ConcatenatedCode, prior: LogicalDistribution) -> Self {
        let code = cc.base();
        let priors = vec![prior; code.n()];
        let kernel = code.kernel();
        let leaves = Syndrome::all(code.u())
            .map(|s| kernel.posterior(&priors, s.index()).map(|(d, _)| d))
            .collect();
        Self { cc, prior, leaves }
    }

    pub fn code(&self) -> &ConcatenatedCode {
        &self.cc
    }

    pub fn prior(&self) -> LogicalDistribution {
        self.prior
    }

    pub fn decode(&self, syndromes: &SyndromeSet) -> Result<BpDecision> {
        self.cc.check_syndromes(syndromes)?;
        let mut tree = MessageTree::empty(&self.cc);
        let top = self.pass(syndromes, &mut tree)?;
        Ok(BpDecision::from_posterior(top))
    }

    /// Decodes and returns every intermediate message.
    pub fn messages(&self, syndromes: &SyndromeSet) -> Result<MessageTree> {
        self.cc.check_syndromes(syndromes)?;
        let mut tree = MessageTree::empty(&self.cc);
        self.pass(syndromes, &mut tree)?;
        Ok(tree)
    }

    /// Decodes into caller-owned scratch space shaped for this code.
    pub(crate) fn decode_into(
        &self,
        syndromes: &SyndromeSet,
        scratch: &mut MessageScratch,
    ) -> Result<BpDecision> {
        let top = self.pass(syndromes, &mut scratch.0)?;
        Ok(BpDecision::from_posterior(top))
    }

    fn pass(&self, syndromes: &SyndromeSet, tree: &mut MessageTree) -> Result<LogicalDistribution> {
        let code = self.cc.base();
        let kernel = code.kernel();
        let n = kernel.n();
        let levels = self.cc.levels();
        let impossible = |bits: u16| Error::ImpossibleSyndrome {
            syndrome: Syndrome::from_raw(bits, code.u()).to_string(),
        };

        for (msg, &s) in tree.layers[levels - 1]
            .iter_mut()
            .zip(syndromes.layer(levels))
        {
            *msg = self.leaves[s as usize].ok_or_else(|| impossible(s))?;
        }
        for m in (1..levels).rev() {
            let (upper, lower) = tree.layers.split_at_mut(m);
            for ((msg, &s), children) in upper[m - 1]
                .iter_mut()
                .zip(syndromes.layer(m))
                .zip(lower[0].chunks_exact(n))
            {
                *msg = kernel
                    .posterior(children, s as usize)
                    .ok_or_else(|| impossible(s))?
                    .0;
            }
        }
        Ok(tree.top())
    }
}

/// Reusable message storage for [`BpDecoder`].
pub(crate) struct MessageScratch(MessageTree);

impl MessageScratch {
    pub(crate) fn new(cc: &ConcatenatedCode) -> Self {
        Self(MessageTree::empty(cc))
    }
}

/// Decodes one syndrome set with a fresh decoder.
pub fn decode(
    cc: &ConcatenatedCode,
    syndromes: &SyndromeSet,
    prior: LogicalDistribution,
) -> Result<BpDecision> {
    BpDecoder::new(cc.clone(), prior).decode(syndromes)
}

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &CompensatedSum) {
        self.add(other.sum);
        self.add(other.compensation);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Confidence statistics split by decoding outcome.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SoftReport {
    successes: u64,
    failures: u64,
    success_confidence: CompensatedSum,
    failure_confidence: CompensatedSum,
}

impl SoftReport {
    pub fn record(&mut self, confidence: f64, success: bool) {
        if success {
            self.successes += 1;
            self.success_confidence.add(confidence);
        } else {
            self.failures += 1;
            self.failure_confidence.add(confidence);
        }
    }

    pub fn merge(&mut self, other: &SoftReport) {
        self.successes += other.successes;
        self.failures += other.failures;
        self.success_confidence.merge(&other.success_confidence);
        self.failure_confidence.merge(&other.failure_confidence);
    }

    /// Mean confidence over successful trials; `None` if there were none.
    pub fn mean_confidence_success(&self) -> Option<f64> {
        (self.successes > 0).then(|| self.success_confidence.value() / self.successes as f64)
    }

    /// Mean confidence over failed trials; `None` if there were none.
    pub fn mean_confidence_failure(&self) -> Option<f64> {
        (self.failures > 0).then(|| self.failure_confidence.value() / self.failures as f64)
    }
}

/// Conditional mean confidences of `(confidence, success)` trials.
pub fn soft_report<I>(trials: I) -> SoftReport
where
    I: IntoIterator<Item = (f64, bool)>,
{
    let mut report = SoftReport::default();
    for (confidence, success) in trials {
        report.record(confidence, success);
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::{five_qubit, repetition3, steane};
    use crate::pauli::{Pauli, PauliOperator};

    fn dep(p: f64) -> LogicalDistribution {
        LogicalDistribution::depolarizing(p).unwrap()
    }

    #[test]
    fn noiseless_children() {
        for code in [five_qubit(), steane()] {
            let children = vec![LogicalDistribution::deterministic(Pauli::I); code.n()];
            let out = block_combine(&code, Syndrome::zero(code.u()), &children).unwrap();
            assert_eq!(out.probabilities(), [1.0, 0.0, 0.0, 0.0]);
        }
    }

    #[test]
    fn combine_is_block_likelihood() {
        let code = five_qubit();
        let children = vec![dep(0.12); 5];
        for s in Syndrome::all(4) {
            let a = block_combine(&code, s, &children).unwrap();
            let b = code.block_likelihood(&children, s).unwrap().distribution;
            assert_eq!(a, b);
        }
    }

    #[test]
    fn repetition_combine_argmax() {
        let code = repetition3();
        let out = block_combine(&code, "11".parse().unwrap(), &[dep(0.1); 3]).unwrap();
        let ixi: PauliOperator = "IXI".parse().unwrap();
        assert_eq!(out.argmax().0, code.logical_class(&ixi).unwrap());
    }

    #[test]
    fn level_one_equals_block_likelihood() {
        let cc = ConcatenatedCode::new(five_qubit(), 1).unwrap();
        let decoder = BpDecoder::new(cc.clone(), dep(0.1));
        for s in Syndrome::all(4) {
            let mut set = SyndromeSet::empty(&cc);
            set.set(1, 1, s).unwrap();
            let got = decoder.decode(&set).unwrap().posterior;
            let want = cc
                .base()
                .block_likelihood(&[dep(0.1); 5], s)
                .unwrap()
                .distribution;
            assert_eq!(got, want);
        }
    }

    #[test]
    fn quiet_syndromes_decode_to_identity() {
        for levels in 1..=4 {
            let cc = ConcatenatedCode::new(five_qubit(), levels).unwrap();
            let d = decode(&cc, &SyndromeSet::empty(&cc), dep(0.01)).unwrap();
            assert_eq!(d.estimate, Pauli::I);
            assert!(d.confidence > 0.99);
            assert!(!d.tie);
        }
    }

    #[test]
    fn messages_are_normalized() {
        let cc = ConcatenatedCode::new(steane(), 3).unwrap();
        let mut e = PauliOperator::identity(343);
        for (k, i) in [3usize, 17, 40, 41, 42, 100, 200, 201, 300]
            .iter()
            .enumerate()
        {
            e.set(*i, Pauli::from_index((k % 3 + 1) as u8)).unwrap();
        }
        let (s, _) = cc.extract(&e).unwrap();
        let tree = BpDecoder::new(cc.clone(), dep(0.08)).messages(&s).unwrap();
        for m in 1..=3 {
            assert_eq!(tree.layer(m).len(), cc.blocks_at_layer(m));
            for msg in tree.layer(m) {
                assert!((msg.total() - 1.0).abs() < 1e-9);
                assert!(msg.probabilities().iter().all(|&x| x >= 0.0));
            }
        }
        assert_eq!(tree.message(1, 1), Some(&tree.top()));
        assert!(tree.message(4, 1).is_none());
    }

    #[test]
    fn impossible_and_misshapen_inputs() {
        let cc = ConcatenatedCode::new(five_qubit(), 2).unwrap();
        let mut set = SyndromeSet::empty(&cc);
        set.set(2, 3, Syndrome::new(0b0101, 4).unwrap()).unwrap();
        let noiseless = LogicalDistribution::deterministic(Pauli::I);
        assert!(matches!(
            decode(&cc, &set, noiseless),
            Err(Error::ImpossibleSyndrome { .. })
        ));
        let other = ConcatenatedCode::new(five_qubit(), 3).unwrap();
        assert!(decode(&other, &set, dep(0.1)).is_err());
    }

    #[test]
    fn soft_reports() {
        let r = soft_report([(1.0, true), (1.0, true)]);
        assert_eq!(r.mean_confidence_success(), Some(1.0));
        assert_eq!(r.mean_confidence_failure(), None);
        let r = soft_report([(0.9, true), (0.7, false)]);
        assert_eq!(r.mean_confidence_success(), Some(0.9));
        assert_eq!(r.mean_confidence_failure(), Some(0.7));
        let mut a = soft_report([(0.5, true)]);
        a.merge(&soft_report([(0.7, true), (0.25, false)]));
        assert!((a.mean_confidence_success().unwrap() - 0.6).abs() < 1e-15);
        assert_eq!(a.mean_confidence_failure(), Some(0.25));
    }

    #[test]
    fn compensated_sum_is_accurate() {
        let mut s = CompensatedSum::default();
        s.add(1.0);
        for _ in 0..1000 {
            s.add(1e-16);
        }
        assert!((s.value() - (1.0 + 1e-13)).abs() < 1e-20);
    }
}
