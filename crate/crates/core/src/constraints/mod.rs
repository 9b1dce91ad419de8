//! Exact integer linear systems over flattened multi-index tensors.
//!
//! A tensor of order `r` on `R^n` is stored as `n^r` rational
//! coefficients, with the last index varying fastest:
//! `index(i, j, k, l) = l + n·k + n²·j + n³·i`. Constraint rows are sparse
//! integer functionals on that flat vector. Each row is a positive rational
//! multiple of the functional it encodes, so the row space over `Q` (and
//! hence the nullity) is unaffected by the scaling.

mod curvature;
mod multilinear;
#[cfg(test)]
mod testing;
mod torsion;

use std::io::{self, Write};
use std::ops::Range;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::exact::Rational;
use crate::frames::FrameKind;

pub use curvature::{ac_rows, cr1_rows_g2, cr1_rows_spin7, r_id, restrict_curvature_8to7, AC_BLOCK, CR1_BLOCK};
pub use torsion::{
    cr2_row_g2, cr2_row_spin7, cr2_rows_g2, cr2_rows_g2_appendix, cr2_rows_spin7, restrict_torsion_w_to_t,
    torsion_antisymmetry_rows, torsion_rows_g2, torsion_sample_rows, w_antisymmetry_rows, w_rows_spin7, w_sample_rows,
    CR2_BLOCK, TORSION_ANTISYMMETRY_BLOCK, TORSION_SAMPLE_BLOCK, W_ANTISYMMETRY_BLOCK, W_SAMPLE_BLOCK,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstraintError {
    #[error("expected a {expected:?} frame, got {got:?}")]
    InvalidFrame { expected: FrameKind, got: FrameKind },
    #[error("vectors are not orthonormal")]
    NotOrthonormal,
    #[error("tensor has shape {got:?}, system expects {expected:?}")]
    ShapeMismatch { expected: (usize, usize), got: (usize, usize) },
    #[error("vector is not a unit vector")]
    NotUnit,
    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),
}

/// How a sampled row is written down.
///
/// `Full` expands the defining multilinear expression over every variable.
/// `Reduced` first rewrites it modulo the symmetry rows that always
/// accompany it, so it only touches one representative per symmetry class.
/// Both give the same combined row space; `Reduced` rows are an order of
/// magnitude sparser.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum RowForm {
    Full,
    #[default]
    Reduced,
}

/// Coefficients of a tensor of order `order` on `R^dim`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tensor {
    dim: usize,
    order: usize,
    coeffs: Vec<Rational>,
}

/// A tensor with a name, used as a known solution of a system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessTensor {
    pub name: String,
    pub tensor: Tensor,
}

impl Tensor {
    pub fn zeros(dim: usize, order: usize) -> Self {
        Tensor { dim, order, coeffs: vec![Rational::zero(); dim.pow(order as u32)] }
    }

    pub fn from_coeffs(dim: usize, order: usize, coeffs: Vec<Rational>) -> Self {
        assert_eq!(coeffs.len(), dim.pow(order as u32), "coefficient count");
        Tensor { dim, order, coeffs }
    }

    pub fn from_ints(dim: usize, order: usize, coeffs: &[i64]) -> Self {
        Self::from_coeffs(dim, order, coeffs.iter().map(|&c| Rational::from_integer(c.into())).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn index_of(&self, idx: &[usize]) -> usize {
        flat_index(self.dim, idx)
    }

    pub fn get(&self, idx: &[usize]) -> &Rational {
        assert_eq!(idx.len(), self.order);
        &self.coeffs[flat_index(self.dim, idx)]
    }

    pub fn set(&mut self, idx: &[usize], value: Rational) {
        assert_eq!(idx.len(), self.order);
        let f = flat_index(self.dim, idx);
        self.coeffs[f] = value;
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, s: &Rational) -> Tensor {
        Tensor { dim: self.dim, order: self.order, coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    pub fn add(&self, other: &Tensor) -> Tensor {
        assert_eq!((self.dim, self.order), (other.dim, other.order));
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Tensor { dim: self.dim, order: self.order, coeffs }
    }
}

/// Row-major flat index with the last index varying fastest.
pub fn flat_index(n: usize, idx: &[usize]) -> usize {
    idx.iter().fold(0, |acc, &i| {
        debug_assert!(i < n);
        acc * n + i
    })
}

/// Inverse of [`flat_index`].
pub fn multi_index(n: usize, order: usize, mut flat: usize) -> Vec<usize> {
    let mut idx = vec![0; order];
    for slot in idx.iter_mut().rev() {
        *slot = flat % n;
        flat /= n;
    }
    idx
}

/// A sparse integer functional: sorted, distinct columns, nonzero
/// coefficients, primitive (coefficients have gcd 1).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SparseRow {
    entries: Vec<(u32, BigInt)>,
}

impl SparseRow {
    /// Merges duplicate columns, drops zeros and divides by the positive
    /// gcd, so a row and its negation stay exact negatives.
    pub fn from_terms(terms: Vec<(usize, BigInt)>) -> Self {
        let SparseRow { mut entries } = Self::from_raw_terms(terms);
        let g = entries.iter().fold(BigInt::zero(), |g, (_, v)| g.gcd(v));
        if !g.is_zero() && !g.is_one() {
            for (_, v) in entries.iter_mut() {
                *v /= &g;
            }
        }
        SparseRow { entries }
    }

    /// Merges duplicate columns and drops zeros, keeping the coefficients
    /// as given.
    pub fn from_raw_terms(mut terms: Vec<(usize, BigInt)>) -> Self {
        terms.sort_unstable_by_key(|t| t.0);
        let mut entries: Vec<(u32, BigInt)> = Vec::with_capacity(terms.len());
        for (c, v) in terms {
            match entries.last_mut() {
                Some((last, acc)) if *last as usize == c => *acc += v,
                _ => entries.push((c as u32, v)),
            }
        }
        entries.retain(|(_, v)| !v.is_zero());
        SparseRow { entries }
    }

    /// Integer row from a dense coefficient vector.
    pub fn from_dense(dense: Vec<BigInt>) -> Self {
        let terms = dense.into_iter().enumerate().filter(|(_, v)| !v.is_zero()).collect();
        Self::from_terms(terms)
    }

    /// Clears denominators of a rational functional.
    pub fn from_rational_terms(terms: Vec<(usize, Rational)>) -> Self {
        let lcm = terms.iter().fold(BigInt::one(), |acc, (_, x)| acc.lcm(x.denom()));
        let ints = terms.into_iter().map(|(c, x)| (c, x.numer() * (&lcm / x.denom()))).collect();
        Self::from_terms(ints)
    }

    pub fn entries(&self) -> &[(u32, BigInt)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn neg(&self) -> SparseRow {
        SparseRow { entries: self.entries.iter().map(|(c, v)| (*c, -v)).collect() }
    }

    pub fn max_col(&self) -> Option<usize> {
        self.entries.last().map(|(c, _)| *c as usize)
    }

    pub fn coeff(&self, col: usize) -> BigInt {
        match self.entries.binary_search_by_key(&(col as u32), |e| e.0) {
            Ok(pos) => self.entries[pos].1.clone(),
            Err(_) => BigInt::zero(),
        }
    }

    /// Exact value of the functional on a rational coefficient vector.
    pub fn pair(&self, x: &[Rational]) -> Rational {
        // Integer entries accumulate without normalizing fractions.
        let mut whole = BigInt::zero();
        let mut frac = Rational::zero();
        for (c, v) in &self.entries {
            let xc = &x[*c as usize];
            if xc.is_zero() {
                continue;
            }
            if xc.is_integer() {
                whole += xc.numer() * v;
            } else {
                frac += xc * Rational::from_integer(v.clone());
            }
        }
        frac + Rational::from_integer(whole)
    }

    /// Exact value on an integer vector.
    pub fn pair_int(&self, x: &[BigInt]) -> BigInt {
        self.entries.iter().fold(BigInt::zero(), |acc, (c, v)| {
            let xc = &x[*c as usize];
            if xc.is_zero() {
                acc
            } else {
                acc + xc * v
            }
        })
    }

    /// Residues modulo `p` as `(column, value)` with values in `[0, p)`.
    pub fn reduce_mod(&self, p: u64) -> Vec<(u32, u64)> {
        let pb = BigInt::from(p);
        self.entries
            .iter()
            .filter_map(|(c, v)| {
                let r = match v.to_i64() {
                    Some(small) => small.rem_euclid(p as i64) as u64,
                    None => v.mod_floor(&pb).to_u64().expect("residue fits"),
                };
                (r != 0).then_some((*c, r))
            })
            .collect()
    }

    pub fn max_bits(&self) -> u64 {
        self.entries.iter().map(|(_, v)| v.abs().bits()).max().unwrap_or(0)
    }
}

/// Provenance of a contiguous range of rows.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct Block {
    pub label: String,
    pub rows: Range<usize>,
}

impl Block {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Stacked constraint rows over `ncols` variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintSystem {
    ncols: usize,
    rows: Vec<SparseRow>,
    blocks: Vec<Block>,
}

impl ConstraintSystem {
    pub fn new(ncols: usize) -> Self {
        ConstraintSystem { ncols, rows: Vec::new(), blocks: Vec::new() }
    }

    /// System for tensors of the given shape.
    pub fn for_tensors(dim: usize, order: usize) -> Self {
        Self::new(dim.pow(order as u32))
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[SparseRow] {
        &self.rows
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(SparseRow::nnz).sum()
    }

    /// Appends a labelled block, dropping identically zero rows.
    pub fn push_block(&mut self, label: impl Into<String>, rows: impl IntoIterator<Item = SparseRow>) {
        let start = self.rows.len();
        for row in rows {
            if row.is_zero() {
                continue;
            }
            assert!(row.max_col().unwrap() < self.ncols, "row column out of range");
            self.rows.push(row);
        }
        self.blocks.push(Block { label: label.into(), rows: start..self.rows.len() });
    }

    /// Stacks `other` below `self`, keeping its block labels.
    pub fn append(&mut self, other: ConstraintSystem) {
        assert_eq!(self.ncols, other.ncols, "column counts differ");
        let offset = self.rows.len();
        self.rows.extend(other.rows);
        self.blocks.extend(
            other
                .blocks
                .into_iter()
                .map(|b| Block { label: b.label, rows: b.rows.start + offset..b.rows.end + offset }),
        );
    }

    pub fn block_rows(&self, block: &Block) -> &[SparseRow] {
        &self.rows[block.rows.clone()]
    }

    /// Row counts per label, merging blocks that share a label.
    pub fn block_summary(&self) -> Vec<(String, usize)> {
        let mut out: Vec<(String, usize)> = Vec::new();
        for b in &self.blocks {
            match out.iter_mut().find(|(l, _)| *l == b.label) {
                Some((_, n)) => *n += b.len(),
                None => out.push((b.label.clone(), b.len())),
            }
        }
        out
    }

    pub fn residuals(&self, t: &Tensor) -> Result<Vec<Rational>, ConstraintError> {
        if t.len() != self.ncols {
            return Err(ConstraintError::ShapeMismatch { expected: (self.ncols, 1), got: (t.dim(), t.order()) });
        }
        Ok(self.rows.iter().map(|r| r.pair(t.coeffs())).collect())
    }

    pub fn is_satisfied_by(&self, t: &Tensor) -> bool {
        t.len() == self.ncols && self.rows.iter().all(|r| r.pair(t.coeffs()).is_zero())
    }

    /// Writes the system as MatrixMarket coordinate text with 1-based
    /// indices. Block labels and row ranges appear as `%` comments.
    pub fn dump(&self, mut w: impl Write) -> io::Result<()> {
        writeln!(w, "%%MatrixMarket matrix coordinate integer general")?;
        writeln!(w, "% columns index flattened tensors, last index fastest")?;
        for b in &self.blocks {
            if !b.is_empty() {
                writeln!(w, "% block {} rows {}-{}", b.label, b.rows.start + 1, b.rows.end)?;
            }
        }
        writeln!(w, "{} {} {}", self.nrows(), self.ncols, self.nnz())?;
        for (i, row) in self.rows.iter().enumerate() {
            for (c, v) in row.entries() {
                writeln!(w, "{} {} {}", i + 1, c + 1, v)?;
            }
        }
        Ok(())
    }
}
