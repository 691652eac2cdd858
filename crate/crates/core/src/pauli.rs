//! Phaseless n-qubit Pauli operators in binary symplectic form.
//!
//! An operator is stored as two packed bit vectors: bit `i` of the X part is
//! set when qubit `i` carries an X or Y factor, bit `i` of the Z part when it
//! carries a Z or Y factor. Global phases are dropped, so the group product is
//! a componentwise XOR and the representation is abelian.

use std::fmt;
use std::ops::{BitXor, BitXorAssign};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const WORD_BITS: usize = 64;

/// A single-qubit Pauli factor, modulo phase.
///
/// The discriminants are chosen so that the phaseless product is the XOR of
/// the discriminants and the natural order is `I < X < Y < Z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[repr(u8)]
pub enum Pauli {
    I = 0,
    X = 1,
    Y = 2,
    Z = 3,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    #[inline]
    pub fn from_index(index: u8) -> Pauli {
        match index & 3 {
            0 => Pauli::I,
            1 => Pauli::X,
            2 => Pauli::Y,
            _ => Pauli::Z,
        }
    }

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    #[inline]
    pub fn from_bits(x: bool, z: bool) -> Pauli {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    #[inline]
    pub fn x_bit(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    #[inline]
    pub fn z_bit(self) -> bool {
        matches!(self, Pauli::Y | Pauli::Z)
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Pauli> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    /// Single-qubit commutation test.
    #[inline]
    pub fn commutes_with(self, other: Pauli) -> bool {
        self == Pauli::I || other == Pauli::I || self == other
    }
}

impl BitXor for Pauli {
    type Output = Pauli;

    #[inline]
    fn bitxor(self, rhs: Pauli) -> Pauli {
        Pauli::from_index(self as u8 ^ rhs as u8)
    }
}

impl BitXorAssign for Pauli {
    #[inline]
    fn bitxor_assign(&mut self, rhs: Pauli) {
        *self = *self ^ rhs;
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// A phaseless n-qubit Pauli operator.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliOperator {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
}

impl PauliOperator {
    /// The identity on `n` qubits.
    pub fn identity(n: usize) -> Self {
        let words = n.div_ceil(WORD_BITS);
        Self {
            n,
            x: vec![0; words],
            z: vec![0; words],
        }
    }

    pub fn from_factors(factors: &[Pauli]) -> Self {
        let mut op = Self::identity(factors.len());
        for (i, &f) in factors.iter().enumerate() {
            op.set_unchecked(i, f);
        }
        op
    }

    /// Builds an operator from explicit X and Z bit slices.
    pub fn from_bits(x_part: &[bool], z_part: &[bool]) -> Result<Self> {
        if x_part.len() != z_part.len() {
            return Err(Error::LengthMismatch {
                expected: x_part.len(),
                found: z_part.len(),
            });
        }
        let factors: Vec<Pauli> = x_part
            .iter()
            .zip(z_part)
            .map(|(&x, &z)| Pauli::from_bits(x, z))
            .collect();
        Ok(Self::from_factors(&factors))
    }

    /// Places `pauli` on qubit `index` of an otherwise trivial operator.
    pub fn single(n: usize, index: usize, pauli: Pauli) -> Result<Self> {
        let mut op = Self::identity(n);
        op.set(index, pauli)?;
        Ok(op)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&w| w == 0)
    }

    pub fn x_part(&self) -> Vec<bool> {
        (0..self.n).map(|i| self.factor(i).x_bit()).collect()
    }

    pub fn z_part(&self) -> Vec<bool> {
        (0..self.n).map(|i| self.factor(i).z_bit()).collect()
    }

    fn check_len(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(())
    }

    /// Phaseless group product.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_len(other)?;
        let mut out = self.clone();
        out.xor_words(other);
        Ok(out)
    }

    /// In-place product, `self <- self * other`.
    pub fn multiply_assign(&mut self, other: &Self) -> Result<()> {
        self.check_len(other)?;
        self.xor_words(other);
        Ok(())
    }

    fn xor_words(&mut self, other: &Self) {
        for (a, b) in self.x.iter_mut().zip(&other.x) {
            *a ^= b;
        }
        for (a, b) in self.z.iter_mut().zip(&other.z) {
            *a ^= b;
        }
    }

    /// True when the symplectic product with `other` vanishes.
    pub fn commutes(&self, other: &Self) -> Result<bool> {
        self.check_len(other)?;
        let parity = self
            .x
            .iter()
            .zip(&other.z)
            .chain(self.z.iter().zip(&other.x))
            .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones());
        Ok(parity & 1 == 0)
    }

    /// Number of qubits with a non-identity factor.
    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(x, z)| (x | z).count_ones() as usize)
            .sum()
    }

    pub fn factor_at(&self, index: usize) -> Result<Pauli> {
        if index >= self.n {
            return Err(Error::IndexOutOfRange { index, n: self.n });
        }
        Ok(self.factor(index))
    }

    #[inline]
    pub(crate) fn factor(&self, index: usize) -> Pauli {
        let (w, b) = (index / WORD_BITS, index % WORD_BITS);
        Pauli::from_bits((self.x[w] >> b) & 1 == 1, (self.z[w] >> b) & 1 == 1)
    }

    pub fn set(&mut self, index: usize, pauli: Pauli) -> Result<()> {
        if index >= self.n {
            return Err(Error::IndexOutOfRange { index, n: self.n });
        }
        self.set_unchecked(index, pauli);
        Ok(())
    }

    fn set_unchecked(&mut self, index: usize, pauli: Pauli) {
        let (w, b) = (index / WORD_BITS, index % WORD_BITS);
        let mask = 1u64 << b;
        self.x[w] = (self.x[w] & !mask) | if pauli.x_bit() { mask } else { 0 };
        self.z[w] = (self.z[w] & !mask) | if pauli.z_bit() { mask } else { 0 };
    }

    pub fn factors(&self) -> impl Iterator<Item = Pauli> + '_ {
        (0..self.n).map(|i| self.factor(i))
    }

    pub fn to_factors(&self) -> Vec<Pauli> {
        self.factors().collect()
    }

    /// The sub-operator on qubits `start..start + len`.
    pub fn slice(&self, start: usize, len: usize) -> Result<Self> {
        if start + len > self.n {
            return Err(Error::IndexOutOfRange {
                index: start + len,
                n: self.n,
            });
        }
        let factors: Vec<Pauli> = (start..start + len).map(|i| self.factor(i)).collect();
        Ok(Self::from_factors(&factors))
    }
}

impl FromStr for PauliOperator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let factors = s
            .chars()
            .enumerate()
            .map(|(position, c)| {
                Pauli::from_char(c).ok_or(Error::InvalidPauliChar { position, found: c })
            })
            .collect::<Result<Vec<_>>>()?;
        if factors.is_empty() {
            return Err(Error::EmptyPauli);
        }
        Ok(Self::from_factors(&factors))
    }
}

impl fmt::Display for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in self.factors() {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliOperator({self})")
    }
}
