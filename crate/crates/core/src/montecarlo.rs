//! Seeded, paired Monte Carlo comparison of the two decoders on the
//! depolarizing channel.
//!
//! Every trial samples one physical error, extracts its syndromes and true
//! top-level class, and hands the same syndromes to each selected decoder.
//! A decoder fails when its estimate differs from the true class.
//!
//! # Reproducibility
//!
//! Trial `t` of the cell `(p, level)` draws from ChaCha8 with stream id `t`
//! and a 256-bit key expanded by SplitMix64 from `(seed, p.to_bits(), level)`.
//! Trials are grouped in fixed chunks of [`CHUNK_TRIALS`] whose partial counts
//! are merged in chunk order, so results do not depend on the worker count.

use std::fmt;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::blockwise::{self, BlockwiseEstimate};
use crate::bp::{BpDecoder, MessageScratch, SoftReport};
use crate::code::{HardTable, LogicalDistribution, StabilizerCode, TableRule};
use crate::concat::{ConcatenatedCode, LayerClasses, SyndromeSet};
use crate::error::{Error, Result};
use crate::format::probability;
use crate::pauli::{Pauli, PauliOperator};

pub const CHUNK_TRIALS: u64 = 1024;

/// Largest physical register a single trial may use.
pub const MAX_PHYSICAL_QUBITS: usize = 1 << 24;

/// Each qubit independently suffers X, Y or Z with probability `p / 3` each.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelModel {
    p: f64,
    prior: LogicalDistribution,
}

impl ChannelModel {
    pub fn depolarizing(p: f64) -> Result<Self> {
        Ok(Self {
            p,
            prior: LogicalDistribution::depolarizing(p)?,
        })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn prior(&self) -> LogicalDistribution {
        self.prior
    }

    /// Overwrites `out` with i.i.d. single-qubit errors.
    #[inline]
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [Pauli]) {
        let p = self.p;
        let third = p / 3.0;
        for slot in out.iter_mut() {
            let u: f64 = rng.random();
            *slot = if u >= p {
                Pauli::I
            } else if u < third {
                Pauli::X
            } else if u < 2.0 * third {
                Pauli::Y
            } else {
                Pauli::Z
            };
        }
    }
}

/// Samples an `n`-qubit depolarizing error.
pub fn sample_error<R: Rng + ?Sized>(rng: &mut R, n: usize, p: f64) -> Result<PauliOperator> {
    let channel = ChannelModel::depolarizing(p)?;
    let mut factors = vec![Pauli::I; n];
    channel.sample_into(rng, &mut factors);
    Ok(PauliOperator::from_factors(&factors))
}

/// Standard Wilson score interval for a binomial proportion.
pub fn wilson_interval(failures: u64, trials: u64, z: f64) -> (f64, f64) {
    assert!(
        trials > 0 && failures <= trials,
        "need 0 <= failures <= trials, trials >= 1"
    );
    let n = trials as f64;
    let phat = failures as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (phat + z2 / (2.0 * n)) / denom;
    let half = z / denom * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt();
    let low = if failures == 0 {
        0.0
    } else {
        (center - half).clamp(0.0, phat)
    };
    let high = if failures == trials {
        1.0
    } else {
        (center + half).clamp(phat, 1.0)
    };
    (low, high)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DecoderKind {
    Bp,
    Blockwise,
}

impl fmt::Display for DecoderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DecoderKind::Bp => "bp",
            DecoderKind::Blockwise => "blockwise",
        })
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub code: StabilizerCode,
    pub ps: Vec<f64>,
    pub levels: Vec<usize>,
    pub trials: u64,
    pub seed: u64,
    pub decoders: Vec<DecoderKind>,
    /// Lookup-table rule of the blockwise decoder.
    pub table: TableRule,
    /// Worker cap; `None` uses the global pool. Never affects results.
    pub threads: Option<usize>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let invalid = |msg: String| Err(Error::InvalidConfig(msg));
        if let Some(&p) = self.ps.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::InvalidProbability(p));
        }
        if self.ps.is_empty() {
            return invalid("no depolarizing rates".into());
        }
        if self.levels.is_empty() || self.levels.contains(&0) {
            return invalid("levels must be a non-empty list of positive integers".into());
        }
        if self.trials == 0 {
            return invalid("trials must be at least 1".into());
        }
        if self.decoders.is_empty() {
            return invalid("no decoders selected".into());
        }
        if self.threads == Some(0) {
            return invalid("threads must be at least 1".into());
        }
        let violations = self.code.validate();
        if !violations.is_empty() {
            return Err(Error::InvalidCode(violations));
        }
        if self.table == TableRule::Css && self.decoders.contains(&DecoderKind::Blockwise) {
            self.code.css_table()?;
        }
        for &level in &self.levels {
            let cc = ConcatenatedCode::new(self.code.clone(), level)?;
            if cc.physical_qubits() > MAX_PHYSICAL_QUBITS {
                return invalid(format!(
                    "level {level} needs {} physical qubits (limit {MAX_PHYSICAL_QUBITS})",
                    cc.physical_qubits()
                ));
            }
        }
        Ok(())
    }
}

/// Aggregated outcome of one decoder in one `(p, level)` cell.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialStats {
    pub code: String,
    pub p: f64,
    pub level: usize,
    pub decoder: DecoderKind,
    pub trials: u64,
    pub failures: u64,
    pub p_e: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub mean_conf_success: Option<f64>,
    pub mean_conf_failure: Option<f64>,
    pub seed: u64,
}

/// Joint outcome counts of both decoders on the same trials.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PairedCounts {
    pub trials: u64,
    pub bp_failures: u64,
    pub blockwise_failures: u64,
    /// Trials where only the message-passing decoder failed.
    pub bp_only: u64,
    /// Trials where only the blockwise decoder failed.
    pub blockwise_only: u64,
}

impl PairedCounts {
    /// Standard deviation of `bp_failures - blockwise_failures` estimated
    /// from the discordant pairs.
    pub fn difference_sigma(&self) -> f64 {
        ((self.bp_only + self.blockwise_only) as f64).sqrt()
    }

    fn merge(&mut self, other: &PairedCounts) {
        self.trials += other.trials;
        self.bp_failures += other.bp_failures;
        self.blockwise_failures += other.blockwise_failures;
        self.bp_only += other.bp_only;
        self.blockwise_only += other.blockwise_only;
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellPairing {
    pub p: f64,
    pub level: usize,
    pub counts: PairedCounts,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Experiment {
    /// One row per `(p, level, decoder)`, in configuration order.
    pub rows: Vec<TrialStats>,
    /// Present for every cell when both decoders ran.
    pub pairings: Vec<CellPairing>,
}

impl Experiment {
    pub fn row(&self, p: f64, level: usize, decoder: DecoderKind) -> Option<&TrialStats> {
        self.rows
            .iter()
            .find(|r| r.p == p && r.level == level && r.decoder == decoder)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(
            out,
            "code,p,level,decoder,trials,failures,p_e,ci_low,ci_high,mean_conf_success,mean_conf_failure,seed"
        )?;
        for r in &self.rows {
            let opt = |v: Option<f64>| v.map(probability).unwrap_or_default();
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{}",
                r.code,
                r.p,
                r.level,
                r.decoder,
                r.trials,
                r.failures,
                probability(r.p_e),
                probability(r.ci_low),
                probability(r.ci_high),
                opt(r.mean_conf_success),
                opt(r.mean_conf_failure),
                r.seed
            )?;
        }
        Ok(())
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        serde_json::to_writer_pretty(&mut out, &self.rows)?;
        writeln!(out)
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// ChaCha8 key for one `(p, level)` cell.
pub fn cell_key(seed: u64, p: f64, level: usize) -> [u8; 32] {
    let mut state = seed;
    splitmix64(&mut state);
    state ^= p.to_bits();
    splitmix64(&mut state);
    state ^= level as u64;
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    key
}

/// The generator used for trial `trial` of a cell.
pub fn trial_rng(key: [u8; 32], trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(trial);
    rng
}

#[derive(Default)]
struct ChunkResult {
    paired: PairedCounts,
    soft: SoftReport,
}

struct Cell {
    cc: ConcatenatedCode,
    channel: ChannelModel,
    key: [u8; 32],
    bp: Option<BpDecoder>,
    table: Option<HardTable>,
}

impl Cell {
    fn run_chunk(&self, chunk: u64, total: u64) -> Result<ChunkResult> {
        let start = chunk * CHUNK_TRIALS;
        let end = (start + CHUNK_TRIALS).min(total);
        let mut physical = vec![Pauli::I; self.cc.physical_qubits()];
        let mut syndromes = SyndromeSet::empty(&self.cc);
        let mut classes = LayerClasses::empty(&self.cc);
        let mut scratch = MessageScratch::new(&self.cc);
        let mut estimate = BlockwiseEstimate::empty(&self.cc);
        let mut out = ChunkResult::default();

        for trial in start..end {
            let mut rng = trial_rng(self.key, trial);
            self.channel.sample_into(&mut rng, &mut physical);
            let truth = self
                .cc
                .extract_into(&physical, &mut syndromes, &mut classes);

            let bp_failed = match &self.bp {
                Some(decoder) => {
                    let decision = decoder.decode_into(&syndromes, &mut scratch)?;
                    let failed = decision.estimate != truth;
                    out.soft.record(decision.confidence, !failed);
                    failed
                }
                None => false,
            };
            let bw_failed = match &self.table {
                Some(table) => {
                    blockwise::estimate_into(&self.cc, &syndromes, table, &mut estimate) != truth
                }
                None => false,
            };
            let p = &mut out.paired;
            p.trials += 1;
            p.bp_failures += bp_failed as u64;
            p.blockwise_failures += bw_failed as u64;
            p.bp_only += (bp_failed && !bw_failed) as u64;
            p.blockwise_only += (bw_failed && !bp_failed) as u64;
        }
        Ok(out)
    }
}

/// Runs every `(p, level)` cell of the configuration.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Experiment> {
    config.validate()?;
    match config.threads {
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::InvalidConfig(e.to_string()))?
            .install(|| run_cells(config)),
        None => run_cells(config),
    }
}

fn run_cells(config: &ExperimentConfig) -> Result<Experiment> {
    let mut experiment = Experiment::default();
    let wants = |kind| config.decoders.contains(&kind);
    for &p in &config.ps {
        let channel = ChannelModel::depolarizing(p)?;
        let table = if wants(DecoderKind::Blockwise) {
            Some(config.code.table(config.table, p)?)
        } else {
            None
        };
        for &level in &config.levels {
            let cc = ConcatenatedCode::new(config.code.clone(), level)?;
            let cell = Cell {
                bp: wants(DecoderKind::Bp).then(|| BpDecoder::new(cc.clone(), channel.prior())),
                table: table.clone(),
                cc,
                channel,
                key: cell_key(config.seed, p, level),
            };
            let chunks = config.trials.div_ceil(CHUNK_TRIALS);
            let partials: Vec<ChunkResult> = (0..chunks)
                .into_par_iter()
                .map(|chunk| cell.run_chunk(chunk, config.trials))
                .collect::<Result<_>>()?;
            let mut total = ChunkResult::default();
            for part in &partials {
                total.paired.merge(&part.paired);
                total.soft.merge(&part.soft);
            }

            for kind in [DecoderKind::Bp, DecoderKind::Blockwise] {
                if !wants(kind) {
                    continue;
                }
                let failures = match kind {
                    DecoderKind::Bp => total.paired.bp_failures,
                    DecoderKind::Blockwise => total.paired.blockwise_failures,
                };
                let (ci_low, ci_high) = wilson_interval(failures, config.trials, 1.96);
                let (mean_conf_success, mean_conf_failure) = match kind {
                    DecoderKind::Bp => (
                        total.soft.mean_confidence_success(),
                        total.soft.mean_confidence_failure(),
                    ),
                    DecoderKind::Blockwise => (None, None),
                };
                experiment.rows.push(TrialStats {
                    code: config.code.name().to_string(),
                    p,
                    level,
                    decoder: kind,
                    trials: config.trials,
                    failures,
                    p_e: failures as f64 / config.trials as f64,
                    ci_low,
                    ci_high,
                    mean_conf_success,
                    mean_conf_failure,
                    seed: config.seed,
                });
            }
            if wants(DecoderKind::Bp) && wants(DecoderKind::Blockwise) {
                experiment.pairings.push(CellPairing {
                    p,
                    level,
                    counts: total.paired,
                });
            }
        }
    }
    Ok(experiment)
}
