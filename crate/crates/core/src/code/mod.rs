//! `[[n, 1]]` stabilizer codes: syndromes, logical classes, pure errors and
//! single-block coset likelihoods.

mod builtin;
mod distribution;
mod file;
mod likelihood;
mod symplectic;

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

pub use builtin::{builtin, five_qubit, repetition3, steane, BUILTIN_NAMES};
pub use distribution::{LogicalDistribution, TIE_TOLERANCE};
pub use file::CodeDefinition;
pub(crate) use likelihood::Kernel;
pub use likelihood::{BlockPosterior, HardTable, TableRule};

use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliOperator};

/// The logical error enacted on the encoded qubit.
pub type LogicalClass = Pauli;

/// Largest supported block length. Keeps syndromes within 15 bits and the
/// stabilizer group small enough to enumerate.
pub const MAX_BLOCK_LEN: usize = 16;

/// Syndrome bits of one block. Bit `j` is set when the error anticommutes
/// with generator `S_j`; the trivial syndrome is all zeros.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Syndrome {
    bits: u16,
    len: u8,
}

impl Syndrome {
    pub fn new(bits: u16, len: usize) -> Result<Self> {
        if len > 15 || (bits as u32) >> len != 0 {
            return Err(Error::LengthMismatch {
                expected: len,
                found: 16 - bits.leading_zeros() as usize,
            });
        }
        Ok(Self {
            bits,
            len: len as u8,
        })
    }

    pub fn zero(len: usize) -> Self {
        Self {
            bits: 0,
            len: len as u8,
        }
    }

    pub(crate) fn from_raw(bits: u16, len: usize) -> Self {
        Self {
            bits,
            len: len as u8,
        }
    }

    #[inline]
    pub fn bits(&self) -> u16 {
        self.bits
    }

    #[inline]
    pub fn index(&self) -> usize {
        self.bits as usize
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_trivial(&self) -> bool {
        self.bits == 0
    }

    pub fn bit(&self, j: usize) -> bool {
        (self.bits >> j) & 1 == 1
    }

    /// Every syndrome of length `len`, in increasing bit-pattern order.
    pub fn all(len: usize) -> impl Iterator<Item = Syndrome> {
        (0..1u32 << len).map(move |b| Syndrome::from_raw(b as u16, len))
    }
}

impl FromStr for Syndrome {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut bits = 0u16;
        let mut len = 0;
        for (position, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' if position < 15 => bits |= 1 << position,
                '1' => {
                    return Err(Error::LengthMismatch {
                        expected: 15,
                        found: s.chars().count(),
                    })
                }
                other => {
                    return Err(Error::InvalidSyndromeChar {
                        position,
                        found: other,
                    })
                }
            }
            len += 1;
        }
        if len > 15 {
            return Err(Error::LengthMismatch {
                expected: 15,
                found: len,
            });
        }
        Ok(Self::from_raw(bits, len))
    }
}

impl fmt::Display for Syndrome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in 0..self.len() {
            f.write_str(if self.bit(j) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Syndrome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Syndrome({self})")
    }
}

/// A broken stabilizer-code invariant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    UnsupportedLength(usize),
    OperatorLength { what: String, found: usize },
    GeneratorCount { expected: usize, found: usize },
    PureErrorCount { expected: usize, found: usize },
    GeneratorsAnticommute(usize, usize),
    DependentGenerators { rank: usize },
    LogicalAnticommutesWithGenerator { logical: char, generator: usize },
    LogicalsCommute,
    PureErrorSyndrome { pure_error: usize, generator: usize },
    PureErrorAnticommutesWithLogical { pure_error: usize, logical: char },
    PureErrorsAnticommute(usize, usize),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnsupportedLength(n) => {
                write!(f, "block length {n} outside 2..={MAX_BLOCK_LEN}")
            }
            Violation::OperatorLength { what, found } => {
                write!(f, "{what} has length {found}, expected the block length")
            }
            Violation::GeneratorCount { expected, found } => {
                write!(f, "expected {expected} generators, found {found}")
            }
            Violation::PureErrorCount { expected, found } => {
                write!(f, "expected {expected} pure errors, found {found}")
            }
            Violation::GeneratorsAnticommute(i, j) => {
                write!(f, "generators S{} and S{} anticommute", i + 1, j + 1)
            }
            Violation::DependentGenerators { rank } => {
                write!(f, "generators are not independent (rank {rank})")
            }
            Violation::LogicalAnticommutesWithGenerator { logical, generator } => write!(
                f,
                "logical {logical} anticommutes with generator S{}",
                generator + 1
            ),
            Violation::LogicalsCommute => write!(f, "logical X and logical Z commute"),
            Violation::PureErrorSyndrome {
                pure_error,
                generator,
            } => write!(
                f,
                "pure error T{} has the wrong commutation with S{}",
                pure_error + 1,
                generator + 1
            ),
            Violation::PureErrorAnticommutesWithLogical {
                pure_error,
                logical,
            } => write!(
                f,
                "pure error T{} anticommutes with logical {logical}",
                pure_error + 1
            ),
            Violation::PureErrorsAnticommute(i, j) => {
                write!(f, "pure errors T{} and T{} anticommute", i + 1, j + 1)
            }
        }
    }
}

/// An `[[n, 1]]` stabilizer code with `u = n - 1` generators, logical
/// representatives and canonical pure errors.
#[derive(Clone)]
pub struct StabilizerCode {
    name: String,
    n: usize,
    generators: Vec<PauliOperator>,
    logical_x: PauliOperator,
    logical_z: PauliOperator,
    pure_errors: Vec<PauliOperator>,
    kernel: OnceLock<Kernel>,
}

impl fmt::Debug for StabilizerCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StabilizerCode")
            .field("name", &self.name)
            .field("n", &self.n)
            .field("generators", &self.generators)
            .field("logical_x", &self.logical_x)
            .field("logical_z", &self.logical_z)
            .field("pure_errors", &self.pure_errors)
            .finish()
    }
}

impl StabilizerCode {
    /// Builds a validated code, solving for canonical pure errors.
    pub fn new(
        name: impl Into<String>,
        generators: Vec<PauliOperator>,
        logical_x: PauliOperator,
        logical_z: PauliOperator,
    ) -> Result<Self> {
        let pure_errors = compute_pure_errors(&generators, &logical_x, &logical_z)?;
        Self::with_pure_errors(name, generators, logical_x, logical_z, pure_errors)
    }

    /// Builds a validated code from explicitly supplied pure errors.
    pub fn with_pure_errors(
        name: impl Into<String>,
        generators: Vec<PauliOperator>,
        logical_x: PauliOperator,
        logical_z: PauliOperator,
        pure_errors: Vec<PauliOperator>,
    ) -> Result<Self> {
        let code = Self::from_parts(name, generators, logical_x, logical_z, pure_errors);
        let violations = code.validate();
        if violations.is_empty() {
            Ok(code)
        } else {
            Err(Error::InvalidCode(violations))
        }
    }

    /// Assembles a code without checking any invariant. Use [`validate`]
    /// before decoding with it.
    ///
    /// [`validate`]: StabilizerCode::validate
    pub fn from_parts(
        name: impl Into<String>,
        generators: Vec<PauliOperator>,
        logical_x: PauliOperator,
        logical_z: PauliOperator,
        pure_errors: Vec<PauliOperator>,
    ) -> Self {
        Self {
            name: name.into(),
            n: logical_x.len(),
            generators,
            logical_x,
            logical_z,
            pure_errors,
            kernel: OnceLock::new(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Block length.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of generators, `n - 1`.
    pub fn u(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[PauliOperator] {
        &self.generators
    }

    pub fn logical_x(&self) -> &PauliOperator {
        &self.logical_x
    }

    pub fn logical_z(&self) -> &PauliOperator {
        &self.logical_z
    }

    pub fn pure_errors(&self) -> &[PauliOperator] {
        &self.pure_errors
    }

    /// Every invariant the code breaks; empty when the code is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut violations =
            structural_violations(&self.generators, &self.logical_x, &self.logical_z);
        if violations.iter().any(|v| {
            matches!(
                v,
                Violation::UnsupportedLength(_) | Violation::OperatorLength { .. }
            )
        }) {
            return violations;
        }
        let u = self.generators.len();
        if self.pure_errors.len() != u {
            violations.push(Violation::PureErrorCount {
                expected: u,
                found: self.pure_errors.len(),
            });
        }
        for (j, t) in self.pure_errors.iter().enumerate() {
            if t.len() != self.n {
                violations.push(Violation::OperatorLength {
                    what: format!("T{}", j + 1),
                    found: t.len(),
                });
                continue;
            }
            for (i, s) in self.generators.iter().enumerate() {
                if commutes(t, s) == (i == j) {
                    violations.push(Violation::PureErrorSyndrome {
                        pure_error: j,
                        generator: i,
                    });
                }
            }
            for (label, l) in [('X', &self.logical_x), ('Z', &self.logical_z)] {
                if !commutes(t, l) {
                    violations.push(Violation::PureErrorAnticommutesWithLogical {
                        pure_error: j,
                        logical: label,
                    });
                }
            }
            for (i, other) in self.pure_errors.iter().enumerate().skip(j + 1) {
                if other.len() == self.n && !commutes(t, other) {
                    violations.push(Violation::PureErrorsAnticommute(j, i));
                }
            }
        }
        violations
    }

    fn check_len(&self, e: &PauliOperator) -> Result<()> {
        if e.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                found: e.len(),
            });
        }
        Ok(())
    }

    pub fn syndrome(&self, e: &PauliOperator) -> Result<Syndrome> {
        self.check_len(e)?;
        let bits = self
            .generators
            .iter()
            .enumerate()
            .fold(0u16, |acc, (j, s)| acc | (!commutes(e, s) as u16) << j);
        Ok(Syndrome::from_raw(bits, self.u()))
    }

    /// `T(s)`, the product of the pure errors selected by the syndrome bits.
    pub fn pure_error_for(&self, s: Syndrome) -> Result<PauliOperator> {
        if s.len() != self.u() {
            return Err(Error::LengthMismatch {
                expected: self.u(),
                found: s.len(),
            });
        }
        let mut t = PauliOperator::identity(self.n);
        for (j, tj) in self.pure_errors.iter().enumerate() {
            if s.bit(j) {
                t.multiply_assign(tj)?;
            }
        }
        Ok(t)
    }

    /// The logical class `L(E)` of an error once its pure-error component
    /// `T(syndrome(E))` is removed.
    pub fn logical_class(&self, e: &PauliOperator) -> Result<LogicalClass> {
        let residual = e.multiply(&self.pure_error_for(self.syndrome(e)?)?)?;
        Ok(Pauli::from_bits(
            !commutes(&residual, &self.logical_z),
            !commutes(&residual, &self.logical_x),
        ))
    }

    /// The representative operator of a logical class.
    pub fn logical_operator(&self, class: LogicalClass) -> PauliOperator {
        match class {
            Pauli::I => PauliOperator::identity(self.n),
            Pauli::X => self.logical_x.clone(),
            Pauli::Z => self.logical_z.clone(),
            Pauli::Y => self
                .logical_x
                .multiply(&self.logical_z)
                .expect("equal lengths"),
        }
    }

    /// All `2^u` elements of the stabilizer group, identity first.
    pub fn stabilizer_group(&self) -> Vec<PauliOperator> {
        let u = self.u();
        let mut group = Vec::with_capacity(1 << u);
        group.push(PauliOperator::identity(self.n));
        for mask in 1usize..1 << u {
            let low = mask.trailing_zeros() as usize;
            let element = group[mask & (mask - 1)]
                .multiply(&self.generators[low])
                .expect("equal lengths");
            group.push(element);
        }
        group
    }

    pub(crate) fn kernel(&self) -> &Kernel {
        self.kernel.get_or_init(|| Kernel::build(self))
    }
}

fn commutes(a: &PauliOperator, b: &PauliOperator) -> bool {
    a.commutes(b).unwrap_or(false)
}

/// Invariants that do not involve pure errors.
fn structural_violations(
    generators: &[PauliOperator],
    logical_x: &PauliOperator,
    logical_z: &PauliOperator,
) -> Vec<Violation> {
    let n = logical_x.len();
    let mut violations = Vec::new();
    if !(2..=MAX_BLOCK_LEN).contains(&n) {
        violations.push(Violation::UnsupportedLength(n));
        return violations;
    }
    let named = generators
        .iter()
        .enumerate()
        .map(|(j, s)| (format!("S{}", j + 1), s))
        .chain([("LZ".to_string(), logical_z)]);
    for (what, op) in named {
        if op.len() != n {
            violations.push(Violation::OperatorLength {
                what,
                found: op.len(),
            });
        }
    }
    if !violations.is_empty() {
        return violations;
    }
    if generators.len() != n - 1 {
        violations.push(Violation::GeneratorCount {
            expected: n - 1,
            found: generators.len(),
        });
    }
    for (i, a) in generators.iter().enumerate() {
        for (j, b) in generators.iter().enumerate().skip(i + 1) {
            if !commutes(a, b) {
                violations.push(Violation::GeneratorsAnticommute(i, j));
            }
        }
    }
    let packed: Vec<u64> = generators.iter().map(symplectic::pack).collect();
    let rank = symplectic::rank(&packed);
    if rank != generators.len() {
        violations.push(Violation::DependentGenerators { rank });
    }
    for (label, l) in [('X', logical_x), ('Z', logical_z)] {
        for (j, s) in generators.iter().enumerate() {
            if !commutes(l, s) {
                violations.push(Violation::LogicalAnticommutesWithGenerator {
                    logical: label,
                    generator: j,
                });
            }
        }
    }
    if commutes(logical_x, logical_z) {
        violations.push(Violation::LogicalsCommute);
    }
    violations
}

/// Solves for canonical pure errors: `T_j` anticommutes with `S_j` only,
/// commutes with both logical representatives and with every other `T_i`.
pub fn compute_pure_errors(
    generators: &[PauliOperator],
    logical_x: &PauliOperator,
    logical_z: &PauliOperator,
) -> Result<Vec<PauliOperator>> {
    let violations = structural_violations(generators, logical_x, logical_z);
    if let Some(first) = violations.first() {
        return Err(Error::NoPureError(first.to_string()));
    }
    let n = logical_x.len();
    let gens: Vec<u64> = generators.iter().map(symplectic::pack).collect();
    let lx = symplectic::pack(logical_x);
    let lz = symplectic::pack(logical_z);

    let mut solutions = Vec::with_capacity(gens.len());
    for j in 0..gens.len() {
        let constraints: Vec<(u64, bool)> = gens
            .iter()
            .enumerate()
            .map(|(i, &s)| (s, i == j))
            .chain([(lx, false), (lz, false)])
            .collect();
        let t = symplectic::solve_symplectic(&constraints, n).ok_or_else(|| {
            Error::NoPureError(format!("T{} against generators and logicals", j + 1))
        })?;
        solutions.push(symplectic::unpack(t, n));
    }

    // Multiplying T_j by S_i flips only its commutation with T_i.
    for j in 0..solutions.len() {
        for i in 0..j {
            if !commutes(&solutions[j], &solutions[i]) {
                solutions[j] = solutions[j].multiply(&generators[i])?;
            }
        }
    }
    Ok(solutions)
}
