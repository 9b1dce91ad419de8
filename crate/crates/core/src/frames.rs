//! Seeded generation of exactly orthonormal rational frames.
//!
//! Random orthogonal matrices are products of reflections through the
//! hyperplanes orthogonal to stereographic lifts of small random integer
//! points, so every entry stays rational. The frames are not Haar
//! distributed; the constraint systems only need them to be generic.
//!
//! Randomness comes from ChaCha20 (`rand_chacha`), seeded with
//! `seed_from_u64(seed)` and then moved to a caller-chosen stream with
//! `set_stream`. Integer coordinates are drawn uniformly from
//! `0..=range` with `random_range`. The same `(seed, stream, range)` always
//! produces the same frames.

use num_traits::One;
use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha20Rng;
use thiserror::Error;

use crate::exact::{is_orthonormal, reflection, reflection_or_identity, stereographic, DenseMatrix, DenseVector};
use crate::vcp::{cross7, cross8, jay7, jay8};

pub const RNG_ALGORITHM: &str = "chacha20";
pub const DEFAULT_RNG_RANGE: u32 = 3;
/// Coordinate range `{0, 1}` of the legacy frame construction.
pub const APPENDIX_RNG_RANGE: u32 = 1;

const MAX_REDRAWS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrameError {
    #[error("frame of kind {kind:?} failed validation: {reason}")]
    Invalid { kind: FrameKind, reason: &'static str },
    #[error("gave up after {0} degenerate draws")]
    RetriesExhausted(usize),
    #[error("vector is not a unit vector")]
    NotUnit,
    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),
}

/// Seedable generator for frame sampling.
#[derive(Debug, Clone)]
pub struct Rng {
    inner: ChaCha20Rng,
    range: u32,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Self::for_stream(seed, 0)
    }

    /// Independent generator for one consumer of a shared seed.
    pub fn for_stream(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha20Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Rng { inner, range: DEFAULT_RNG_RANGE }
    }

    pub fn with_range(mut self, range: u32) -> Self {
        assert!(range >= 1, "coordinate range must contain at least {{0, 1}}");
        self.range = range;
        self
    }

    pub fn range(&self) -> u32 {
        self.range
    }

    pub fn integer_point(&mut self, len: usize) -> Vec<i64> {
        (0..len).map(|_| self.inner.random_range(0..=self.range) as i64).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FrameKind {
    /// Orthonormal pair in `R^7`.
    Pair7,
    /// Orthonormal triple in `R^7`.
    Triple7,
    /// Orthonormal triple in `R^8`.
    Triple8,
    /// Orthonormal quadruple in `R^8`.
    Quadruple8,
    /// `(v, w1, ..., w6)` with `w_{3+k} = v × w_k`.
    Hermitian7,
    /// `(v1, v2, w1, ..., w6)` with `w_{3+k} = χ(v1, v2, w_k)`.
    Hermitian8,
}

impl FrameKind {
    pub fn dim(self) -> usize {
        match self {
            FrameKind::Pair7 | FrameKind::Triple7 | FrameKind::Hermitian7 => 7,
            _ => 8,
        }
    }

    /// Number of vectors in a frame of this kind.
    pub fn vector_count(self) -> usize {
        match self {
            FrameKind::Pair7 => 2,
            FrameKind::Triple7 | FrameKind::Triple8 => 3,
            FrameKind::Quadruple8 => 4,
            FrameKind::Hermitian7 => 7,
            FrameKind::Hermitian8 => 8,
        }
    }
}

/// An ordered, exactly orthonormal family of rational vectors.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Frame {
    kind: FrameKind,
    vectors: Vec<DenseVector>,
}

impl Frame {
    /// Validates orthonormality and, for Hermitian kinds, the adaptation
    /// `w_{3+k} = J w_k`.
    pub fn new(kind: FrameKind, vectors: Vec<DenseVector>) -> Result<Self, FrameError> {
        let invalid = |reason| FrameError::Invalid { kind, reason };
        if vectors.len() != kind.vector_count() {
            return Err(invalid("wrong number of vectors"));
        }
        if vectors.iter().any(|v| v.dim() != kind.dim()) {
            return Err(invalid("wrong vector dimension"));
        }
        if !is_orthonormal(&vectors) {
            return Err(invalid("Gram matrix is not the identity"));
        }
        let frame = Frame { kind, vectors };
        if let Some(j) = frame.complex_structure() {
            let ws = frame.hermitian_part();
            for k in 0..3 {
                if j.mul_vec(&ws[k]) != ws[k + 3] {
                    return Err(invalid("w_{3+k} != J w_k"));
                }
            }
        }
        Ok(frame)
    }

    pub fn kind(&self) -> FrameKind {
        self.kind
    }

    pub fn vectors(&self) -> &[DenseVector] {
        &self.vectors
    }

    pub fn dim(&self) -> usize {
        self.kind.dim()
    }

    /// The plane-defining part of a Hermitian frame: `[v]` or `[v1, v2]`.
    pub fn base(&self) -> &[DenseVector] {
        match self.kind {
            FrameKind::Hermitian7 => &self.vectors[..1],
            FrameKind::Hermitian8 => &self.vectors[..2],
            _ => &self.vectors,
        }
    }

    /// `w1..w6` of a Hermitian frame; empty for other kinds.
    pub fn hermitian_part(&self) -> &[DenseVector] {
        match self.kind {
            FrameKind::Hermitian7 => &self.vectors[1..],
            FrameKind::Hermitian8 => &self.vectors[2..],
            _ => &[],
        }
    }

    /// `J = v × ·` or `χ(v1, v2, ·)` for Hermitian frames.
    pub fn complex_structure(&self) -> Option<DenseMatrix> {
        match self.kind {
            FrameKind::Hermitian7 => Some(jay7(&self.vectors[0])),
            FrameKind::Hermitian8 => Some(jay8(&self.vectors[0], &self.vectors[1])),
            _ => None,
        }
    }
}

/// Product of `k` reflections through hyperplanes orthogonal to random unit
/// vectors obtained by stereographic projection.
pub fn random_orthogonal(n: usize, k: usize, rng: &mut Rng) -> Result<DenseMatrix, FrameError> {
    if !(7..=8).contains(&n) {
        return Err(FrameError::UnsupportedDimension(n));
    }
    assert!(k >= 1, "need at least one reflection");
    let mut q = DenseMatrix::identity(n);
    for _ in 0..k {
        let t = stereographic(&rng.integer_point(n - 1));
        // Unit vectors are never zero.
        q = q.mul(&reflection(&t).expect("stereographic image is a unit vector"));
    }
    Ok(q)
}

fn leading_rows(kind: FrameKind, reflections: usize, rng: &mut Rng) -> Result<Frame, FrameError> {
    let q = random_orthogonal(kind.dim(), reflections, rng)?;
    Frame::new(kind, q.into_rows().into_iter().take(kind.vector_count()).collect())
}

pub fn random_pair7(rng: &mut Rng) -> Result<Frame, FrameError> {
    leading_rows(FrameKind::Pair7, 2, rng)
}

pub fn random_triple7(rng: &mut Rng) -> Result<Frame, FrameError> {
    leading_rows(FrameKind::Triple7, 3, rng)
}

pub fn random_triple8(rng: &mut Rng) -> Result<Frame, FrameError> {
    leading_rows(FrameKind::Triple8, 3, rng)
}

pub fn random_quadruple8(rng: &mut Rng) -> Result<Frame, FrameError> {
    leading_rows(FrameKind::Quadruple8, 4, rng)
}

fn apply_to_tail(rows: &mut [DenseVector], from: usize, h: &DenseMatrix) {
    for r in rows.iter_mut().skip(from) {
        *r = h.mul_vec(r);
    }
}

/// Reflection-correction construction of an adapted frame. `base` vectors
/// occupy the first rows of an orthonormal basis; the remaining rows are
/// corrected by reflections so that rows `base+1`, `base+3` and `base+5`
/// become `J` of rows `base`, `base+2` and `base+4`.
fn hermitian_from_basis(kind: FrameKind, mut rows: Vec<DenseVector>, j: &DenseMatrix) -> Result<Frame, FrameError> {
    let b = kind.vector_count() - 6;
    let mut ws = Vec::with_capacity(6);
    for step in 0..3 {
        let w = rows[b + 2 * step].clone();
        let jw = j.mul_vec(&w);
        // Reflecting by jw − row sends the row onto jw and fixes everything
        // orthogonal to both, in particular all earlier frame vectors.
        let target = b + 2 * step + 1;
        let h = reflection_or_identity(&jw.sub(&rows[target]));
        apply_to_tail(&mut rows, target, &h);
        rows[target] = jw.clone();
        ws.push((w, jw));
    }
    let mut vectors: Vec<DenseVector> = rows[..b].to_vec();
    vectors.extend(ws.iter().map(|(w, _)| w.clone()));
    vectors.extend(ws.into_iter().map(|(_, jw)| jw));
    Frame::new(kind, vectors)
}

fn with_redraws(
    rng: &mut Rng,
    mut attempt: impl FnMut(&mut Rng) -> Result<Frame, FrameError>,
) -> Result<Frame, FrameError> {
    for _ in 0..MAX_REDRAWS {
        match attempt(rng) {
            Ok(f) => return Ok(f),
            Err(FrameError::Invalid { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(FrameError::RetriesExhausted(MAX_REDRAWS))
}

/// `(v, w1, ..., w6)` with `(w1, w2, w3)` a Hermitian basis of
/// `(v⊥, v × ·)` and `w_{3+k} = v × w_k`.
pub fn hermitian_frame7(rng: &mut Rng) -> Result<Frame, FrameError> {
    with_redraws(rng, |rng| {
        let rows = random_orthogonal(7, 2, rng)?.into_rows();
        let j = jay7(&rows[0]);
        hermitian_from_basis(FrameKind::Hermitian7, rows, &j)
    })
}

/// `(v1, v2, w1, ..., w6)` with `w_{3+k} = χ(v1, v2, w_k)`.
pub fn hermitian_frame8(rng: &mut Rng) -> Result<Frame, FrameError> {
    with_redraws(rng, |rng| {
        let rows = random_orthogonal(8, 3, rng)?.into_rows();
        let j = jay8(&rows[0], &rows[1]);
        hermitian_from_basis(FrameKind::Hermitian8, rows, &j)
    })
}

/// Seven rows of the legacy second-condition frames: `v` is read from row 0 although the adaptation was built around
/// row 6, so these are generally neither orthonormal nor Hermitian.
#[derive(Debug, Clone)]
pub struct AppendixFrame7 {
    pub rows: Vec<DenseVector>,
}

/// `w ↦ J(v) w` in the legacy convention, which equals `−v × w`.
pub fn appendix_jay7(v: &DenseVector) -> DenseMatrix {
    jay7(v).scale(&-crate::exact::rat(1))
}

pub fn appendix_frame7(rng: &mut Rng) -> Result<AppendixFrame7, FrameError> {
    let a = random_orthogonal(7, 3, rng)?;
    let at = a.transpose();
    let (u1, u2, u3) = (at.row(0), at.row(1), at.row(2));
    let u3good = appendix_jay7(u1).mul_vec(u2);
    let b = reflection_or_identity(&u3good.sub(u3));
    let mut d = b.mul(&a).transpose().into_rows();
    let v = d[6].clone();
    let jv = appendix_jay7(&v);
    for k in 0..3 {
        d[3 + k] = jv.mul_vec(&d[k]);
    }
    Ok(AppendixFrame7 { rows: d })
}

/// Rational orthonormal basis of `ξ⊥` for a unit vector `ξ`: the images of
/// `e1, ..., e_{n-1}` under the reflection exchanging `e0` and `ξ`.
pub fn complement_basis(xi: &DenseVector) -> Result<Vec<DenseVector>, FrameError> {
    if !xi.norm_sq().is_one() {
        return Err(FrameError::NotUnit);
    }
    let n = xi.dim();
    let e0 = DenseVector::unit(n, 0);
    let h = reflection_or_identity(&xi.sub(&e0));
    Ok((1..n).map(|i| h.mul_vec(&DenseVector::unit(n, i))).collect())
}

/// Orthonormal basis `(b1, ..., b7)` of `ξ⊥` in which the induced cross
/// product `χ(ξ, ·, ·)` has the standard structure constants, so
/// `χ(ξ, b_i, b_j) = Σ_k eps3(i, j, k) b_k`.
///
/// Starting from [`complement_basis`], `b3` is forced to `χ(ξ, b1, b2)` by
/// one reflection and `b5, b6, b7` are generated from `b1, b2, b3, b4`,
/// following the standard relations `e5 = e1×e4`, `e6 = e2×e4`,
/// `e7 = −e3×e4`.
pub fn adapted_complement_basis(xi: &DenseVector) -> Result<Vec<DenseVector>, FrameError> {
    if xi.dim() != 8 {
        return Err(FrameError::UnsupportedDimension(xi.dim()));
    }
    let mut rows = complement_basis(xi)?;
    let b3 = cross8(xi, &rows[0], &rows[1]);
    let h = reflection_or_identity(&b3.sub(&rows[2]));
    apply_to_tail(&mut rows, 2, &h);
    rows[2] = b3;
    let b4 = rows[3].clone();
    let basis = vec![
        rows[0].clone(),
        rows[1].clone(),
        rows[2].clone(),
        b4.clone(),
        cross8(xi, &rows[0], &b4),
        cross8(xi, &rows[1], &b4),
        cross8(xi, &rows[2], &b4).neg(),
    ];
    let g2 = crate::vcp::g2();
    let adapted = (0..7).all(|i| {
        (0..7).all(|j| {
            let mut rhs = DenseVector::zeros(8);
            for (k, b) in basis.iter().enumerate() {
                match g2.eps(i, j, k) {
                    1 => rhs = rhs.add(b),
                    -1 => rhs = rhs.sub(b),
                    _ => {}
                }
            }
            cross8(xi, &basis[i], &basis[j]) == rhs
        })
    });
    if !adapted || !is_orthonormal(&basis) {
        return Err(FrameError::Invalid { kind: FrameKind::Hermitian8, reason: "complement basis is not adapted" });
    }
    Ok(basis)
}

/// Adds `cross7`/`cross8` consistency checks that `Frame::new` cannot see
/// (it only checks `J w_k = w_{3+k}`).
pub fn check_adaptation(frame: &Frame) -> bool {
    let ws = frame.hermitian_part();
    match frame.kind() {
        FrameKind::Hermitian7 => {
            let v = &frame.vectors()[0];
            (0..3).all(|k| cross7(v, &ws[k]) == ws[k + 3] && cross7(v, &ws[k + 3]) == ws[k].neg())
        }
        FrameKind::Hermitian8 => {
            let (v1, v2) = (&frame.vectors()[0], &frame.vectors()[1]);
            (0..3).all(|k| cross8(v1, v2, &ws[k]) == ws[k + 3] && cross8(v1, v2, &ws[k + 3]) == ws[k].neg())
        }
        _ => true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::gram;
    use num_traits::Zero;
    use std::collections::HashSet;

    #[test]
    fn orthogonal_matrices_are_exact_and_reproducible() {
        let mut a = Rng::new(11);
        let mut b = Rng::new(11);
        let qa = random_orthogonal(7, 2, &mut a).unwrap();
        let qb = random_orthogonal(7, 2, &mut b).unwrap();
        assert_eq!(qa, qb);
        assert!(qa.transpose().mul(&qa).is_identity());
        let qt = qa.transpose();
        assert!(gram(&[qt.row(0).clone(), qt.row(1).clone()]).is_identity());
        let q8 = random_orthogonal(8, 3, &mut a).unwrap();
        assert!(q8.mul(&q8.transpose()).is_identity());
        assert_eq!(random_orthogonal(6, 2, &mut a), Err(FrameError::UnsupportedDimension(6)));
    }

    #[test]
    fn streams_are_independent() {
        let mut a = Rng::for_stream(0, 1);
        let mut b = Rng::for_stream(0, 2);
        let pa: Vec<_> = (0..4).map(|_| a.integer_point(6)).collect();
        let pb: Vec<_> = (0..4).map(|_| b.integer_point(6)).collect();
        assert_ne!(pa, pb);
        let mut c = Rng::new(0).with_range(APPENDIX_RNG_RANGE);
        assert!(c.integer_point(64).iter().all(|&x| x == 0 || x == 1));
    }

    #[test]
    fn pairs_and_triples() {
        let mut rng = Rng::new(3);
        let p = random_pair7(&mut rng).unwrap();
        assert_eq!(p.kind(), FrameKind::Pair7);
        assert!(gram(p.vectors()).is_identity());
        let t = random_triple8(&mut rng).unwrap();
        assert!(gram(t.vectors()).is_identity());
        let t = random_triple7(&mut rng).unwrap();
        assert!(gram(t.vectors()).is_identity());
        let q = random_quadruple8(&mut rng).unwrap();
        assert!(gram(q.vectors()).is_identity());
    }

    #[test]
    fn fixed_seed_reproduces_pairs() {
        let draw = |seed| {
            let mut rng = Rng::new(seed);
            (0..5).map(|_| random_pair7(&mut rng).unwrap()).collect::<Vec<_>>()
        };
        assert_eq!(draw(42), draw(42));
        assert_ne!(draw(42), draw(43));
    }

    #[test]
    fn hundred_pairs_are_mostly_distinct() {
        let mut rng = Rng::new(0);
        let frames: HashSet<Frame> = (0..100).map(|_| random_pair7(&mut rng).unwrap()).collect();
        // Duplicates are allowed; with 4^6 points per reflection there are essentially none.
        assert!(frames.len() >= 95, "only {} distinct pairs", frames.len());
    }

    #[test]
    fn hermitian7_frames() {
        let mut rng = Rng::new(5);
        for _ in 0..10 {
            let f = hermitian_frame7(&mut rng).unwrap();
            assert!(gram(f.vectors()).is_identity());
            assert!(check_adaptation(&f));
            let v = &f.vectors()[0];
            let ws = f.hermitian_part();
            for k in 0..3 {
                assert_eq!(cross7(v, &ws[k]), ws[k + 3]);
            }
            assert!(cross7(v, &ws[0]).dot(&ws[1]).is_zero());
            let j = jay7(v);
            for k in 0..3 {
                assert_eq!(j.mul_vec(&ws[k + 3]), ws[k].neg());
            }
        }
    }

    #[test]
    fn hermitian8_frames() {
        let mut a = Rng::new(9);
        let mut b = Rng::new(9);
        for _ in 0..5 {
            let f = hermitian_frame8(&mut a).unwrap();
            assert_eq!(f, hermitian_frame8(&mut b).unwrap());
            assert!(gram(f.vectors()).is_identity());
            assert!(check_adaptation(&f));
        }
    }

    #[test]
    fn frame_validation() {
        let e = |i| DenseVector::unit(7, i);
        assert!(Frame::new(FrameKind::Pair7, vec![e(0), e(1)]).is_ok());
        assert!(Frame::new(FrameKind::Pair7, vec![e(0), e(0)]).is_err());
        assert!(Frame::new(FrameKind::Pair7, vec![e(0)]).is_err());
        // v = e1, w = (e2, e4, e6) and e1×e2 = e3, e1×e4 = e5, e1×e6 = e7.
        let good = vec![e(0), e(1), e(3), e(5), e(2), e(4), e(6)];
        assert!(Frame::new(FrameKind::Hermitian7, good).is_ok());
        let swapped = vec![e(0), e(1), e(3), e(5), e(4), e(2), e(6)];
        assert!(Frame::new(FrameKind::Hermitian7, swapped).is_err());
    }

    #[test]
    fn complement_basis_is_orthonormal() {
        let xi = stereographic(&[1, 2, 0, 1, 3, 0, 1]);
        let basis = complement_basis(&xi).unwrap();
        let mut all = vec![xi.clone()];
        all.extend(basis);
        assert!(gram(&all).is_identity());
        let e0 = DenseVector::unit(8, 0);
        assert_eq!(complement_basis(&e0).unwrap()[0], DenseVector::unit(8, 1));
        assert_eq!(complement_basis(&DenseVector::from_ints(&[1, 1, 0, 0, 0, 0, 0, 0])), Err(FrameError::NotUnit));
    }

    #[test]
    fn adapted_complement_bases() {
        let mut rng = Rng::new(2);
        for _ in 0..5 {
            let xi = random_orthogonal(8, 2, &mut rng).unwrap().row(0).clone();
            let b = adapted_complement_basis(&xi).unwrap();
            let mut all = vec![xi.clone()];
            all.extend(b.iter().cloned());
            assert!(gram(&all).is_identity());
        }
        let e0 = DenseVector::unit(8, 0);
        let b = adapted_complement_basis(&e0).unwrap();
        for (i, v) in b.iter().enumerate() {
            assert_eq!(v, &DenseVector::unit(8, i + 1));
        }
    }

    #[test]
    fn appendix_frames_are_reproducible() {
        let a = appendix_frame7(&mut Rng::new(1).with_range(1)).unwrap();
        let b = appendix_frame7(&mut Rng::new(1).with_range(1)).unwrap();
        assert_eq!(a.rows, b.rows);
        assert_eq!(a.rows.len(), 7);
    }
}
