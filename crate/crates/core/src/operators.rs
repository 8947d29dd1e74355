//! Pauli operators embedded into the `2^n`-dimensional chain Hilbert space.
//!
//! Site 1 is the leftmost (most-significant) Kronecker factor, so basis state
//! `|s_1 s_2 ... s_n>` has index `sum_r s_r 2^(n-r)`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

/// Largest chain length accepted anywhere in the crate (4096 x 4096 dense matrices).
pub const MAX_SITES: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        })
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x" | "X" => Ok(Axis::X),
            "y" | "Y" => Ok(Axis::Y),
            "z" | "Z" => Ok(Axis::Z),
            other => Err(Error::argument("axis", format!("expected x, y or z, got {other:?}"))),
        }
    }
}

/// 1-based site index on a chain of `n` spins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SiteIndex(usize);

impl SiteIndex {
    pub fn new(r: usize, n: usize) -> Result<Self> {
        check_chain_length(n)?;
        if r < 1 || r > n {
            return Err(Error::argument("r", format!("site {r} outside [1, {n}]")));
        }
        Ok(SiteIndex(r))
    }

    pub fn get(self) -> usize {
        self.0
    }
}

pub(crate) fn check_chain_length(n: usize) -> Result<()> {
    if !(1..=MAX_SITES).contains(&n) {
        return Err(Error::argument(
            "n",
            format!("chain length {n} outside [1, {MAX_SITES}]"),
        ));
    }
    Ok(())
}

/// The 2x2 Pauli matrix for `axis`.
pub fn pauli(axis: Axis) -> ComplexMatrix {
    let o = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let entries = match axis {
        Axis::X => [o, one, one, o],
        Axis::Y => [o, -i, i, o],
        Axis::Z => [one, o, o, -one],
    };
    ComplexMatrix::from_row_major(2, &entries)
}

/// `I ⊗ ... ⊗ σ^axis ⊗ ... ⊗ I` with the Pauli factor at site `r` of an `n`-site chain.
pub fn site_operator(axis: Axis, r: usize, n: usize) -> Result<ComplexMatrix> {
    let site = SiteIndex::new(r, n)?;
    Ok(embed(&pauli(axis), site.get(), n))
}

/// `σ^a_k σ^b_{k+1}` on an `n`-site chain; requires `1 <= k <= n - 1`.
pub fn two_site_term(axis_a: Axis, axis_b: Axis, k: usize, n: usize) -> Result<ComplexMatrix> {
    check_chain_length(n)?;
    if k < 1 || k >= n {
        return Err(Error::argument(
            "k",
            format!("bond {k} outside [1, {}]", n.saturating_sub(1)),
        ));
    }
    let pair = pauli(axis_a).kron(&pauli(axis_b));
    let left = ComplexMatrix::identity(1 << (k - 1));
    let right = ComplexMatrix::identity(1 << (n - k - 1));
    Ok(left.kron(&pair).kron(&right))
}

fn embed(local: &ComplexMatrix, r: usize, n: usize) -> ComplexMatrix {
    let left = ComplexMatrix::identity(1 << (r - 1));
    let right = ComplexMatrix::identity(1 << (n - r));
    left.kron(local).kron(&right)
}
