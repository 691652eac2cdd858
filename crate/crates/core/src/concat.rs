//! Concatenation-tree bookkeeping.
//!
//! Layers are numbered `m = 1..=levels` from the top; layer `m` holds
//! `n^(m-1)` blocks, numbered `j = 1..=n^(m-1)`. The children of block
//! `(m, j)` are blocks `(j-1)n + 1 ..= jn` of layer `m + 1`, and the blocks of
//! the bottom layer `levels` act on consecutive runs of `n` physical qubits.

use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use crate::code::{LogicalClass, StabilizerCode, Syndrome};
use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliOperator};

/// A code concatenated with itself `levels` times.
#[derive(Clone, Debug)]
pub struct ConcatenatedCode {
    base: StabilizerCode,
    levels: usize,
}

impl ConcatenatedCode {
    pub fn new(base: StabilizerCode, levels: usize) -> Result<Self> {
        if levels == 0 {
            return Err(Error::InvalidConfig(
                "concatenation needs at least one level".into(),
            ));
        }
        let n = base.n();
        let qubits = (n as u128).checked_pow(levels as u32);
        if qubits.is_none_or(|q| q > (1u128 << 40)) {
            return Err(Error::InvalidConfig(format!(
                "{n}^{levels} physical qubits is too many"
            )));
        }
        Ok(Self { base, levels })
    }

    pub fn base(&self) -> &StabilizerCode {
        &self.base
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn physical_qubits(&self) -> usize {
        self.base.n().pow(self.levels as u32)
    }

    /// `n^(m-1)` for `1 <= m <= levels`.
    pub fn blocks_at_layer(&self, m: usize) -> usize {
        self.base.n().pow((m - 1) as u32)
    }

    pub fn total_blocks(&self) -> usize {
        (1..=self.levels).map(|m| self.blocks_at_layer(m)).sum()
    }

    /// 1-based indices of the children of block `(m, j)` in layer `m + 1`.
    pub fn block_children(&self, m: usize, j: usize) -> Result<RangeInclusive<usize>> {
        if m == 0 || m >= self.levels || j == 0 || j > self.blocks_at_layer(m) {
            return Err(Error::BlockOutOfRange { layer: m, block: j });
        }
        let n = self.base.n();
        Ok((j - 1) * n + 1..=j * n)
    }

    pub(crate) fn check_physical(&self, len: usize) -> Result<()> {
        if len != self.physical_qubits() {
            return Err(Error::LengthMismatch {
                expected: self.physical_qubits(),
                found: len,
            });
        }
        Ok(())
    }

    /// Checks that a syndrome set has this tree's shape.
    pub fn check_syndromes(&self, syndromes: &SyndromeSet) -> Result<()> {
        if syndromes.u != self.base.u() {
            return Err(Error::LengthMismatch {
                expected: self.base.u(),
                found: syndromes.u,
            });
        }
        if syndromes.layers.len() != self.levels {
            return Err(Error::LengthMismatch {
                expected: self.levels,
                found: syndromes.layers.len(),
            });
        }
        for (idx, layer) in syndromes.layers.iter().enumerate() {
            let expected = self.blocks_at_layer(idx + 1);
            if layer.len() != expected {
                return Err(Error::LengthMismatch {
                    expected,
                    found: layer.len(),
                });
            }
        }
        Ok(())
    }

    /// Computes every block syndrome and every layer's logical classes for a
    /// physical error.
    pub fn extract(&self, error: &PauliOperator) -> Result<(SyndromeSet, LayerClasses)> {
        self.check_physical(error.len())?;
        let mut syndromes = SyndromeSet::empty(self);
        let mut classes = LayerClasses::empty(self);
        self.extract_into(&error.to_factors(), &mut syndromes, &mut classes);
        Ok((syndromes, classes))
    }

    /// Allocation-free form of [`extract`](Self::extract) for buffers shaped
    /// by [`SyndromeSet::empty`] and [`LayerClasses::empty`]. Returns the
    /// top-level class.
    pub(crate) fn extract_into(
        &self,
        physical: &[Pauli],
        syndromes: &mut SyndromeSet,
        classes: &mut LayerClasses,
    ) -> LogicalClass {
        let kernel = self.base.kernel();
        let n = kernel.n();
        for m in (1..=self.levels).rev() {
            let idx = m - 1;
            let (upper, lower) = classes.layers.split_at_mut(idx + 1);
            let input: &[Pauli] = if m == self.levels {
                physical
            } else {
                &lower[0]
            };
            let out = &mut upper[idx];
            let synd = &mut syndromes.layers[idx];
            for ((block, s), c) in input
                .chunks_exact(n)
                .zip(synd.iter_mut())
                .zip(out.iter_mut())
            {
                let (bits, class) = kernel.signature_of(block);
                *s = bits;
                *c = class;
            }
        }
        classes.layers[0][0]
    }
}

/// All block syndromes of a concatenated code, layer 1 first.
#[derive(Clone, PartialEq, Eq)]
pub struct SyndromeSet {
    u: usize,
    layers: Vec<Vec<u16>>,
}

impl SyndromeSet {
    /// All-zero syndromes shaped for `cc`.
    pub fn empty(cc: &ConcatenatedCode) -> Self {
        Self {
            u: cc.base.u(),
            layers: (1..=cc.levels)
                .map(|m| vec![0; cc.blocks_at_layer(m)])
                .collect(),
        }
    }

    pub fn syndrome_len(&self) -> usize {
        self.u
    }

    pub fn levels(&self) -> usize {
        self.layers.len()
    }

    /// Syndrome of block `(m, j)`, 1-based.
    pub fn get(&self, m: usize, j: usize) -> Result<Syndrome> {
        self.layers
            .get(m.wrapping_sub(1))
            .and_then(|layer| layer.get(j.wrapping_sub(1)))
            .map(|&bits| Syndrome::from_raw(bits, self.u))
            .ok_or(Error::BlockOutOfRange { layer: m, block: j })
    }

    pub fn set(&mut self, m: usize, j: usize, s: Syndrome) -> Result<()> {
        if s.len() != self.u {
            return Err(Error::LengthMismatch {
                expected: self.u,
                found: s.len(),
            });
        }
        let slot = self
            .layers
            .get_mut(m.wrapping_sub(1))
            .and_then(|layer| layer.get_mut(j.wrapping_sub(1)))
            .ok_or(Error::BlockOutOfRange { layer: m, block: j })?;
        *slot = s.bits();
        Ok(())
    }

    /// Raw syndrome bits of layer `m`, 1-based.
    pub fn layer(&self, m: usize) -> &[u16] {
        &self.layers[m - 1]
    }

    pub fn is_trivial(&self) -> bool {
        self.layers.iter().flatten().all(|&b| b == 0)
    }

    pub fn total_bits(&self) -> usize {
        self.u * self.layers.iter().map(Vec::len).sum::<usize>()
    }
}

impl fmt::Display for SyndromeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for layer in &self.layers {
            for (j, &bits) in layer.iter().enumerate() {
                if j > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{}", Syndrome::from_raw(bits, self.u))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl fmt::Debug for SyndromeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "SyndromeSet {{ u: {}, layers: {:?} }}",
            self.u,
            self.to_string()
        )
    }
}

impl FromStr for SyndromeSet {
    type Err = Error;

    /// Parses one line per layer with space-separated bit strings. Blank
    /// lines and `#` comments are skipped. Shape against a particular code is
    /// checked by [`ConcatenatedCode::check_syndromes`].
    fn from_str(text: &str) -> Result<Self> {
        let mut u = None;
        let mut layers = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut layer = Vec::new();
            for token in line.split_whitespace() {
                let s: Syndrome = token.parse().map_err(|e| Error::Parse {
                    line: idx + 1,
                    message: format!("{e}"),
                })?;
                match u {
                    None => u = Some(s.len()),
                    Some(len) if len != s.len() => {
                        return Err(Error::Parse {
                            line: idx + 1,
                            message: format!(
                                "syndrome {token} has {} bits, expected {len}",
                                s.len()
                            ),
                        })
                    }
                    _ => {}
                }
                layer.push(s.bits());
            }
            layers.push(layer);
        }
        let u = u.ok_or(Error::Parse {
            line: 1,
            message: "no syndromes".into(),
        })?;
        Ok(Self { u, layers })
    }
}

/// Logical classes of every block, layer 1 first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayerClasses {
    layers: Vec<Vec<LogicalClass>>,
}

impl LayerClasses {
    pub fn empty(cc: &ConcatenatedCode) -> Self {
        Self {
            layers: (1..=cc.levels)
                .map(|m| vec![Pauli::I; cc.blocks_at_layer(m)])
                .collect(),
        }
    }

    /// The ground-truth top-level class `L_1`.
    pub fn top(&self) -> LogicalClass {
        self.layers[0][0]
    }

    /// Classes of layer `m`, 1-based.
    pub fn layer(&self, m: usize) -> &[LogicalClass] {
        &self.layers[m - 1]
    }

    /// Layer `m` as an effective Pauli error on `n^(m-1)` qubits.
    pub fn layer_operator(&self, m: usize) -> PauliOperator {
        PauliOperator::from_factors(self.layer(m))
    }
}
