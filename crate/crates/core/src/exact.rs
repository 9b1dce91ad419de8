//! Exact rational scalars and the small dense linear algebra used to build
//! orthonormal frames: stereographic lifts, hyperplane reflections,
//! complement projectors and denominator clearing.
//!
//! Nothing in here ever rounds. `Rational` is a normalized
//! arbitrary-precision fraction, so every identity checked by the tests
//! (orthogonality, idempotence, unit norm) holds with zero tolerance.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Arbitrary-precision rational, always kept in lowest terms with a
/// positive denominator.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("cannot reflect through the hyperplane orthogonal to the zero vector")]
    ZeroVector,
    #[error("vectors are not orthonormal")]
    NotOrthonormal,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("exact determinant is only supported up to 8x8, got {0}x{0}")]
    TooLarge(usize),
}

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DenseVector(Vec<Rational>);

impl DenseVector {
    pub fn new(entries: Vec<Rational>) -> Self {
        DenseVector(entries)
    }

    pub fn zeros(dim: usize) -> Self {
        DenseVector(vec![Rational::zero(); dim])
    }

    /// Standard basis vector `e_i` (0-based).
    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.0[i] = Rational::one();
        v
    }

    pub fn from_ints(entries: &[i64]) -> Self {
        DenseVector(entries.iter().map(|&x| rat(x)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[Rational] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<Rational> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Rational> {
        self.0.iter()
    }

    pub fn dot(&self, other: &DenseVector) -> Rational {
        assert_eq!(self.dim(), other.dim(), "dot product of mismatched dimensions");
        self.0
            .iter()
            .zip(&other.0)
            .filter(|(a, b)| !a.is_zero() && !b.is_zero())
            .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
    }

    pub fn norm_sq(&self) -> Rational {
        self.dot(self)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, s: &Rational) -> DenseVector {
        DenseVector(self.0.iter().map(|x| x * s).collect())
    }

    pub fn add(&self, other: &DenseVector) -> DenseVector {
        assert_eq!(self.dim(), other.dim());
        DenseVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &DenseVector) -> DenseVector {
        assert_eq!(self.dim(), other.dim());
        DenseVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> DenseVector {
        DenseVector(self.0.iter().map(|a| -a).collect())
    }
}

impl Index<usize> for DenseVector {
    type Output = Rational;
    fn index(&self, i: usize) -> &Rational {
        &self.0[i]
    }
}

impl IndexMut<usize> for DenseVector {
    fn index_mut(&mut self, i: usize) -> &mut Rational {
        &mut self.0[i]
    }
}

impl fmt::Debug for DenseVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct DenseMatrix {
    rows: Vec<DenseVector>,
    ncols: usize,
}

impl DenseMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        DenseMatrix { rows: vec![DenseVector::zeros(ncols); nrows], ncols }
    }

    pub fn identity(n: usize) -> Self {
        DenseMatrix { rows: (0..n).map(|i| DenseVector::unit(n, i)).collect(), ncols: n }
    }

    /// Builds a matrix from rows; all rows must share one dimension.
    pub fn from_rows(rows: Vec<DenseVector>) -> Result<Self, ExactError> {
        let ncols = rows.first().map_or(0, DenseVector::dim);
        if let Some(bad) = rows.iter().find(|r| r.dim() != ncols) {
            return Err(ExactError::DimensionMismatch { expected: ncols, got: bad.dim() });
        }
        Ok(DenseMatrix { rows, ncols })
    }

    pub fn from_ints(rows: &[&[i64]]) -> Result<Self, ExactError> {
        Self::from_rows(rows.iter().map(|r| DenseVector::from_ints(r)).collect())
    }

    /// `u vᵀ`.
    pub fn outer(u: &DenseVector, v: &DenseVector) -> Self {
        DenseMatrix { rows: u.iter().map(|a| v.scale(a)).collect(), ncols: v.dim() }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn row(&self, i: usize) -> &DenseVector {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[DenseVector] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<DenseVector> {
        self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.rows[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Rational) {
        self.rows[i][j] = value;
    }

    pub fn is_square(&self) -> bool {
        self.nrows() == self.ncols
    }

    pub fn transpose(&self) -> DenseMatrix {
        let rows =
            (0..self.ncols).map(|j| DenseVector::new(self.rows.iter().map(|r| r[j].clone()).collect())).collect();
        DenseMatrix { rows, ncols: self.nrows() }
    }

    pub fn mul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.ncols, other.nrows(), "matrix product of mismatched shapes");
        let mut out = DenseMatrix::zeros(self.nrows(), other.ncols);
        for (i, row) in self.rows.iter().enumerate() {
            for (k, a) in row.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for (j, b) in other.rows[k].iter().enumerate() {
                    if !b.is_zero() {
                        out.rows[i][j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &DenseVector) -> DenseVector {
        assert_eq!(self.ncols, v.dim());
        DenseVector::new(self.rows.iter().map(|r| r.dot(v)).collect())
    }

    pub fn add(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!((self.nrows(), self.ncols), (other.nrows(), other.ncols));
        let rows = self.rows.iter().zip(&other.rows).map(|(a, b)| a.add(b)).collect();
        DenseMatrix { rows, ncols: self.ncols }
    }

    pub fn sub(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!((self.nrows(), self.ncols), (other.nrows(), other.ncols));
        let rows = self.rows.iter().zip(&other.rows).map(|(a, b)| a.sub(b)).collect();
        DenseMatrix { rows, ncols: self.ncols }
    }

    pub fn scale(&self, s: &Rational) -> DenseMatrix {
        DenseMatrix { rows: self.rows.iter().map(|r| r.scale(s)).collect(), ncols: self.ncols }
    }

    pub fn trace(&self) -> Rational {
        (0..self.nrows().min(self.ncols)).fold(Rational::zero(), |acc, i| acc + &self.rows[i][i])
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(DenseVector::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == DenseMatrix::identity(self.ncols)
    }

    pub fn is_symmetric(&self) -> bool {
        *self == self.transpose()
    }

    pub fn is_skew(&self) -> bool {
        self.add(&self.transpose()).is_zero()
    }

    /// Exact determinant via fraction-free (Bareiss) elimination.
    /// Restricted to square matrices of size at most 8.
    pub fn determinant(&self) -> Result<Rational, ExactError> {
        let n = self.nrows();
        if !self.is_square() {
            return Err(ExactError::DimensionMismatch { expected: n, got: self.ncols });
        }
        if n > 8 {
            return Err(ExactError::TooLarge(n));
        }
        if n == 0 {
            return Ok(Rational::one());
        }
        // Scale each row to integers, run Bareiss over Z, then undo the scaling.
        let mut scale = Rational::one();
        let mut a: Vec<Vec<BigInt>> = Vec::with_capacity(n);
        for row in &self.rows {
            let (ints, lcm) = integer_scaled(row);
            scale /= Rational::from_integer(lcm);
            a.push(ints);
        }
        let mut sign = 1i32;
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return Ok(Rational::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        let det = Rational::from_integer(a[n - 1][n - 1].clone()) * scale;
        Ok(if sign < 0 { -det } else { det })
    }
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for r in &self.rows {
            writeln!(f, "  {r:?}")?;
        }
        write!(f, "]")
    }
}

/// Inverse stereographic projection of an integer point of `R^{n-1}` onto
/// the unit sphere in `R^n`. The south pole (last coordinate −1) is the
/// image of the origin.
pub fn stereographic(s: &[i64]) -> DenseVector {
    let sum: BigInt = s.iter().map(|&x| BigInt::from(x) * BigInt::from(x)).sum();
    let denom = BigInt::one() + &sum;
    let mut v: Vec<Rational> = s.iter().map(|&x| Rational::new(BigInt::from(2 * x), denom.clone())).collect();
    v.push(Rational::new(sum - BigInt::one(), denom));
    DenseVector::new(v)
}

/// Householder reflection `I − (2/⟨z,z⟩) z zᵀ` through the hyperplane
/// orthogonal to `z`. `z` need not be a unit vector.
pub fn reflection(z: &DenseVector) -> Result<DenseMatrix, ExactError> {
    let nsq = z.norm_sq();
    if nsq.is_zero() {
        return Err(ExactError::ZeroVector);
    }
    let factor = rat(2) / nsq;
    Ok(DenseMatrix::identity(z.dim()).sub(&DenseMatrix::outer(z, z).scale(&factor)))
}

/// Like [`reflection`], but returns the identity for the zero vector. Used
/// when a frame vector is already where a reflection is meant to send it.
pub fn reflection_or_identity(z: &DenseVector) -> DenseMatrix {
    reflection(z).unwrap_or_else(|_| DenseMatrix::identity(z.dim()))
}

pub fn gram(vs: &[DenseVector]) -> DenseMatrix {
    let rows = vs.iter().map(|a| DenseVector::new(vs.iter().map(|b| a.dot(b)).collect())).collect();
    DenseMatrix { rows, ncols: vs.len() }
}

pub fn is_orthonormal(vs: &[DenseVector]) -> bool {
    gram(vs).is_identity()
}

/// Orthogonal projector `I − Σ vᵢvᵢᵀ` onto the complement of an orthonormal
/// family in `R^dim`.
pub fn projection_complement(dim: usize, vs: &[DenseVector]) -> Result<DenseMatrix, ExactError> {
    if let Some(bad) = vs.iter().find(|v| v.dim() != dim) {
        return Err(ExactError::DimensionMismatch { expected: dim, got: bad.dim() });
    }
    if !is_orthonormal(vs) {
        return Err(ExactError::NotOrthonormal);
    }
    Ok(vs.iter().fold(DenseMatrix::identity(dim), |p, v| p.sub(&DenseMatrix::outer(v, v))))
}

/// Least common multiple of the entry denominators (1 for integer input).
pub fn denominator_lcm(row: &DenseVector) -> BigInt {
    row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

/// Multiplies a rational row through by the lcm of its denominators.
pub fn clear_denominators(row: &DenseVector) -> Vec<BigInt> {
    integer_scaled(row).0
}

/// `(clear_denominators(row), lcm)`.
pub fn integer_scaled(row: &DenseVector) -> (Vec<BigInt>, BigInt) {
    let lcm = denominator_lcm(row);
    let ints = row.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
    (ints, lcm)
}

/// Divides an integer row by the (positive) gcd of its entries.
pub fn primitive_part(row: &mut [BigInt]) {
    let g = row.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in row.iter_mut() {
            *x /= &g;
        }
    }
}

pub fn abs_max_bits(row: &[BigInt]) -> u64 {
    row.iter().map(|x| x.abs().bits()).max().unwrap_or(0)
}
