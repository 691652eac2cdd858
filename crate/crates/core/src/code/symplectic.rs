//! GF(2) linear algebra on symplectic vectors packed into a `u64`.
//!
//! Bits `0..n` hold the X part and bits `n..2n` the Z part; bit `2n` is used
//! as the augmented column when solving.

use crate::pauli::PauliOperator;

pub(crate) fn pack(op: &PauliOperator) -> u64 {
    let n = op.len();
    op.factors().enumerate().fold(0u64, |acc, (i, f)| {
        acc | (f.x_bit() as u64) << i | (f.z_bit() as u64) << (n + i)
    })
}

pub(crate) fn unpack(v: u64, n: usize) -> PauliOperator {
    let x: Vec<bool> = (0..n).map(|i| (v >> i) & 1 == 1).collect();
    let z: Vec<bool> = (0..n).map(|i| (v >> (n + i)) & 1 == 1).collect();
    PauliOperator::from_bits(&x, &z).expect("equal lengths")
}

/// Swaps the X and Z halves, so that `swap(a) . b` (ordinary dot product)
/// is the symplectic product of `a` and `b`.
fn swap_halves(v: u64, n: usize) -> u64 {
    let mask = (1u64 << n) - 1;
    ((v & mask) << n) | ((v >> n) & mask)
}

pub(crate) fn rank(rows: &[u64]) -> usize {
    let mut rows = rows.to_vec();
    let mut rank = 0;
    for bit in 0..64 {
        let pivot = match (rank..rows.len()).find(|&r| (rows[r] >> bit) & 1 == 1) {
            Some(p) => p,
            None => continue,
        };
        rows.swap(rank, pivot);
        let pivot_row = rows[rank];
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && (*row >> bit) & 1 == 1 {
                *row ^= pivot_row;
            }
        }
        rank += 1;
    }
    rank
}

/// Finds `t` with `<c_k, t> = b_k` for every constraint, or `None` when the
/// system is inconsistent. Free variables are set to zero.
pub(crate) fn solve_symplectic(constraints: &[(u64, bool)], n: usize) -> Option<u64> {
    let aug = 2 * n;
    let mut rows: Vec<u64> = constraints
        .iter()
        .map(|&(c, b)| swap_halves(c, n) | (b as u64) << aug)
        .collect();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for bit in 0..aug {
        let Some(p) = (rank..rows.len()).find(|&r| (rows[r] >> bit) & 1 == 1) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot_row = rows[rank];
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && (*row >> bit) & 1 == 1 {
                *row ^= pivot_row;
            }
        }
        pivots.push(bit);
        rank += 1;
    }
    let coeff_mask = (1u64 << aug) - 1;
    if rows[rank..]
        .iter()
        .any(|r| r & coeff_mask == 0 && (r >> aug) & 1 == 1)
    {
        return None;
    }
    Some(
        pivots
            .iter()
            .enumerate()
            .fold(0u64, |t, (r, &bit)| t | ((rows[r] >> aug) & 1) << bit),
    )
}
