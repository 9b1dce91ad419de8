//! Intrinsic torsion spaces and the second CR condition.
//!
//! A torsion tensor `A ∈ V*⊗Λ^r V*` is stored with all `n^(r+1)`
//! coefficients `A_{i j...}` and evaluated as
//! `A(η1; η2, ..., η_{r+1}) = Σ η1_i η2_j ... A_{ij...}`. Antisymmetry in the
//! trailing slots is imposed by explicit rows.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::exact::{DenseVector, Rational};
use crate::frames::{adapted_complement_basis, appendix_jay7, AppendixFrame7, Frame, FrameKind};
use crate::vcp::{cross7, cross8};

use super::multilinear::{common_scale, contract_folded, contract_full, wedge, IntVec};
use super::{flat_index, multi_index, ConstraintError, ConstraintSystem, RowForm, SparseRow, Tensor};

pub const TORSION_ANTISYMMETRY_BLOCK: &str = "torsion-antisymmetry";
pub const TORSION_SAMPLE_BLOCK: &str = "torsion-samples";
pub const W_ANTISYMMETRY_BLOCK: &str = "w-antisymmetry";
pub const W_SAMPLE_BLOCK: &str = "w-samples";
pub const CR2_BLOCK: &str = "cr2";

/// One signed term `±A(η1; η2, ..., η_{r+1})`.
struct Term<'a> {
    negate: bool,
    eta: &'a IntVec,
    rest: Vec<&'a IntVec>,
}

fn functional_row(n: usize, terms: &[Term<'_>], form: RowForm) -> SparseRow {
    match form {
        RowForm::Reduced => {
            let mut out = Vec::new();
            for t in terms {
                contract_folded(&mut out, n, t.eta, &wedge(&t.rest), t.negate);
            }
            SparseRow::from_terms(out)
        }
        RowForm::Full => {
            let order = terms[0].rest.len() + 1;
            let mut acc = vec![BigInt::zero(); n.pow(order as u32)];
            for t in terms {
                let mut vs = vec![t.eta];
                vs.extend(t.rest.iter().copied());
                contract_full(&mut acc, n, &vs, t.negate);
            }
            SparseRow::from_dense(acc)
        }
    }
}

/// `A + A∘τ` for each adjacent transposition `τ` of the trailing slots,
/// over every index tuple.
fn antisymmetry_rows(n: usize, order: usize) -> Vec<SparseRow> {
    let total = n.pow(order as u32);
    let mut rows = Vec::with_capacity(total * (order - 2));
    for f in 0..total {
        let idx = multi_index(n, order, f);
        for s in 1..order - 1 {
            let mut swapped = idx.clone();
            swapped.swap(s, s + 1);
            rows.push(SparseRow::from_terms(vec![(f, BigInt::one()), (flat_index(n, &swapped), BigInt::one())]));
        }
    }
    rows
}

fn expect_kind(frame: &Frame, kind: FrameKind) -> Result<(), ConstraintError> {
    if frame.kind() == kind {
        Ok(())
    } else {
        Err(ConstraintError::InvalidFrame { expected: kind, got: frame.kind() })
    }
}

/// `A_ijkl + A_ikjl = 0` and `A_ijkl + A_ijlk = 0` on `R^7`. Nullity
/// `7·C(7,3) = 245`.
pub fn torsion_antisymmetry_rows() -> ConstraintSystem {
    let mut sys = ConstraintSystem::for_tensors(7, 4);
    sys.push_block(TORSION_ANTISYMMETRY_BLOCK, antisymmetry_rows(7, 4));
    sys
}

/// `A(x; y ∧ z ∧ (y × z)) = 0` for each orthonormal triple `(x, y, z)`.
pub fn torsion_sample_rows(triples: &[Frame], form: RowForm) -> Result<ConstraintSystem, ConstraintError> {
    triples.iter().try_for_each(|f| expect_kind(f, FrameKind::Triple7))?;
    let rows: Vec<SparseRow> = triples
        .par_iter()
        .map(|f| {
            let [x, y, z] = [&f.vectors()[0], &f.vectors()[1], &f.vectors()[2]];
            let yz = cross7(y, z);
            let s = common_scale(&[x, y, z, &yz]);
            functional_row(7, &[Term { negate: false, eta: &s[0], rest: vec![&s[1], &s[2], &s[3]] }], form)
        })
        .collect();
    let mut sys = ConstraintSystem::for_tensors(7, 4);
    sys.push_block(TORSION_SAMPLE_BLOCK, rows);
    Ok(sys)
}

/// Antisymmetry rows stacked with sampled annihilation rows; cuts out the
/// algebraic intrinsic torsions `𝒯(R^7)` once enough triples are used.
pub fn torsion_rows_g2(triples: &[Frame], form: RowForm) -> Result<ConstraintSystem, ConstraintError> {
    let mut sys = torsion_antisymmetry_rows();
    sys.append(torsion_sample_rows(triples, form)?);
    Ok(sys)
}

/// Full antisymmetry of the last four slots of `A ∈ V*⊗Λ⁴V*`, `V = R^8`.
/// Nullity `8·C(8,4) = 560`.
pub fn w_antisymmetry_rows() -> ConstraintSystem {
    let mut sys = ConstraintSystem::for_tensors(8, 5);
    sys.push_block(W_ANTISYMMETRY_BLOCK, antisymmetry_rows(8, 5));
    sys
}

/// `A(e_a; η2 ∧ η3 ∧ η4 ∧ χ(η2, η3, η4)) = 0` for each orthonormal triple
/// and each basis vector `e_a`, which by linearity covers every `η1`.
pub fn w_sample_rows(triples: &[Frame], form: RowForm) -> Result<ConstraintSystem, ConstraintError> {
    triples.iter().try_for_each(|f| expect_kind(f, FrameKind::Triple8))?;
    let units: Vec<IntVec> =
        (0..8).map(|a| (0..8).map(|b| if a == b { BigInt::one() } else { BigInt::zero() }).collect()).collect();
    let blocks: Vec<Vec<SparseRow>> = triples
        .par_iter()
        .map(|f| {
            let v = f.vectors();
            let chi = cross8(&v[0], &v[1], &v[2]);
            let s = common_scale(&[&v[0], &v[1], &v[2], &chi]);
            units
                .iter()
                .map(|e| {
                    let term = Term { negate: false, eta: e, rest: vec![&s[0], &s[1], &s[2], &s[3]] };
                    functional_row(8, &[term], form)
                })
                .collect()
        })
        .collect();
    let mut sys = ConstraintSystem::for_tensors(8, 5);
    sys.push_block(W_SAMPLE_BLOCK, blocks.into_iter().flatten());
    Ok(sys)
}

/// Antisymmetry plus sampled rows; cuts out `𝒲(R^8)`.
pub fn w_rows_spin7(triples: &[Frame], form: RowForm) -> Result<ConstraintSystem, ConstraintError> {
    let mut sys = w_antisymmetry_rows();
    sys.append(w_sample_rows(triples, form)?);
    Ok(sys)
}

/// Integer-scaled `(base, w, Jw)` of a Hermitian frame, where
/// `J w_k = w_{k+3}` and `J w_{k+3} = −w_k`.
fn hermitian_parts(frame: &Frame) -> (Vec<IntVec>, Vec<IntVec>, Vec<IntVec>) {
    let all: Vec<&DenseVector> = frame.vectors().iter().collect();
    let mut s = common_scale(&all);
    let b = frame.base().len();
    let w = s.split_off(b);
    let jw = (0..6).map(|k| if k < 3 { w[k + 3].clone() } else { w[k - 3].iter().map(|x| -x).collect() }).collect();
    (s, w, jw)
}

/// The four-term functional
/// `A(Jw_q; v, w_j, w_p) − A(Jw_p; v, w_j, w_q) + A(w_q; v, Jw_j, w_p) − A(w_p; v, Jw_j, w_q)`
/// with 0-based `j, p, q`; `v` stands for all base vectors.
#[allow(clippy::too_many_arguments)]
fn cr2_row(
    n: usize,
    base: &[IntVec],
    w: &[IntVec],
    jw: &[IntVec],
    j: usize,
    p: usize,
    q: usize,
    form: RowForm,
) -> SparseRow {
    fn rest<'a>(base: &'a [IntVec], mid: &'a IntVec, last: &'a IntVec) -> Vec<&'a IntVec> {
        let mut r: Vec<&IntVec> = base.iter().collect();
        r.push(mid);
        r.push(last);
        r
    }
    let terms = [
        Term { negate: false, eta: &jw[q], rest: rest(base, &w[j], &w[p]) },
        Term { negate: true, eta: &jw[p], rest: rest(base, &w[j], &w[q]) },
        Term { negate: false, eta: &w[q], rest: rest(base, &jw[j], &w[p]) },
        Term { negate: true, eta: &w[p], rest: rest(base, &jw[j], &w[q]) },
    ];
    functional_row(n, &terms, form)
}

fn check_index(k: usize) -> usize {
    assert!((1..=6).contains(&k), "frame index {k} outside 1..=6");
    k - 1
}

/// Second CR row on `R^7` for 1-based `j, p, q ∈ [1, 6]`.
pub fn cr2_row_g2(frame: &Frame, j: usize, p: usize, q: usize, form: RowForm) -> Result<SparseRow, ConstraintError> {
    expect_kind(frame, FrameKind::Hermitian7)?;
    let (base, w, jw) = hermitian_parts(frame);
    Ok(cr2_row(7, &base, &w, &jw, check_index(j), check_index(p), check_index(q), form))
}

/// Second CR row on `R^8`; the 4-form slots take `v1 ∧ v2 ∧ · ∧ ·`.
pub fn cr2_row_spin7(frame: &Frame, j: usize, p: usize, q: usize, form: RowForm) -> Result<SparseRow, ConstraintError> {
    expect_kind(frame, FrameKind::Hermitian8)?;
    let (base, w, jw) = hermitian_parts(frame);
    Ok(cr2_row(8, &base, &w, &jw, check_index(j), check_index(p), check_index(q), form))
}

fn cr2_rows(
    n: usize,
    order: usize,
    frames: &[Frame],
    kind: FrameKind,
    form: RowForm,
) -> Result<ConstraintSystem, ConstraintError> {
    frames.iter().try_for_each(|f| expect_kind(f, kind))?;
    let blocks: Vec<Vec<SparseRow>> = frames
        .par_iter()
        .map(|f| {
            let (base, w, jw) = hermitian_parts(f);
            let mut rows = Vec::with_capacity(216);
            for j in 0..6 {
                for p in 0..6 {
                    for q in 0..6 {
                        rows.push(cr2_row(n, &base, &w, &jw, j, p, q, form));
                    }
                }
            }
            rows
        })
        .collect();
    let mut sys = ConstraintSystem::for_tensors(n, order);
    sys.push_block(CR2_BLOCK, blocks.into_iter().flatten());
    Ok(sys)
}

/// All `(j, p, q) ∈ [1,6]³` rows for each Hermitian 7-frame, zero rows
/// dropped.
pub fn cr2_rows_g2(frames: &[Frame], form: RowForm) -> Result<ConstraintSystem, ConstraintError> {
    cr2_rows(7, 4, frames, FrameKind::Hermitian7, form)
}

/// All `(j, p, q)` rows for each Hermitian 8-frame over `V*⊗Λ⁴V*`.
pub fn cr2_rows_spin7(frames: &[Frame], form: RowForm) -> Result<ConstraintSystem, ConstraintError> {
    cr2_rows(8, 5, frames, FrameKind::Hermitian8, form)
}

/// Second CR rows built by the legacy frame construction: `v` is
/// row 0, the six remaining rows play `w_1..w_6`, and `J` is applied as a
/// matrix rather than read off the frame. Such frames need not be adapted,
/// so these rows are not guaranteed to be valid constraints.
pub fn cr2_rows_g2_appendix(frames: &[AppendixFrame7], form: RowForm) -> ConstraintSystem {
    let blocks: Vec<Vec<SparseRow>> = frames
        .par_iter()
        .map(|f| {
            let v = &f.rows[0];
            let jv = appendix_jay7(v);
            let jw: Vec<DenseVector> = f.rows[1..].iter().map(|w| jv.mul_vec(w)).collect();
            let mut all: Vec<&DenseVector> = vec![v];
            all.extend(f.rows[1..].iter());
            all.extend(jw.iter());
            let mut s = common_scale(&all);
            let jw = s.split_off(7);
            let w = s.split_off(1);
            let mut rows = Vec::with_capacity(216);
            for q in 0..6 {
                for j in 0..6 {
                    for p in 0..6 {
                        rows.push(cr2_row(7, &s, &w, &jw, j, p, q, form));
                    }
                }
            }
            rows
        })
        .collect();
    let mut sys = ConstraintSystem::for_tensors(7, 4);
    sys.push_block(CR2_BLOCK, blocks.into_iter().flatten());
    sys
}

/// Contracts slot `slot` of a tensor of the given shape with `m`, where
/// `m[new][old]`.
fn contract_slot(data: &[Rational], shape: &[usize], slot: usize, m: &[Vec<Rational>]) -> (Vec<Rational>, Vec<usize>) {
    let mut new_shape = shape.to_vec();
    new_shape[slot] = m.len();
    let inner: usize = shape[slot + 1..].iter().product();
    let outer: usize = shape[..slot].iter().product();
    let (old, new) = (shape[slot], m.len());
    let mut out = vec![Rational::zero(); outer * new * inner];
    for o in 0..outer {
        for a in 0..old {
            for x in 0..inner {
                let v = &data[(o * old + a) * inner + x];
                if v.is_zero() {
                    continue;
                }
                for (b, row) in m.iter().enumerate() {
                    if !row[a].is_zero() {
                        out[(o * new + b) * inner + x] += v * &row[a];
                    }
                }
            }
        }
    }
    (out, new_shape)
}

/// `A|ξ⊥(η1; η2 ∧ η3 ∧ η4) = A(η1; ξ ∧ η2 ∧ η3 ∧ η4)` for a unit `ξ`, in the
/// adapted basis of `ξ⊥` from [`adapted_complement_basis`], so that
/// the induced cross product has the standard structure constants.
pub fn restrict_torsion_w_to_t(a: &Tensor, xi: &DenseVector) -> Result<Tensor, ConstraintError> {
    if (a.dim(), a.order()) != (8, 5) {
        return Err(ConstraintError::ShapeMismatch { expected: (8, 5), got: (a.dim(), a.order()) });
    }
    let basis = adapted_complement_basis(xi).map_err(|e| match e {
        crate::frames::FrameError::NotUnit => ConstraintError::NotUnit,
        _ => ConstraintError::UnsupportedDimension(xi.dim()),
    })?;
    let b: Vec<Vec<Rational>> = basis.iter().map(|v| v.entries().to_vec()).collect();
    let xi_row = vec![xi.entries().to_vec()];
    let (mut data, mut shape) = contract_slot(a.coeffs(), &[8; 5], 1, &xi_row);
    // Drop the now-trivial slot.
    shape.remove(1);
    for slot in 0..4 {
        (data, shape) = contract_slot(&data, &shape, slot, &b);
    }
    Ok(Tensor::from_coeffs(7, 4, data))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::testing::{assert_rows_match, IntTensor};
    use crate::frames::{
        appendix_frame7, hermitian_frame7, hermitian_frame8, random_orthogonal, random_triple7, random_triple8, Rng,
    };
    use rand::{Rng as _, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn samples(n: usize, order: usize, count: u64, seed: u64) -> (Vec<IntTensor>, Vec<IntTensor>) {
        let raw: Vec<IntTensor> = (0..count).map(|s| IntTensor::random(n, order, seed + s)).collect();
        let anti = raw.iter().map(IntTensor::antisymmetrize_tail).collect();
        (raw, anti)
    }

    fn brute_cr2(t: &IntTensor, frame: &Frame, j: usize, p: usize, q: usize) -> Rational {
        let base = frame.base();
        let w = frame.hermitian_part();
        let jmat = frame.complex_structure().unwrap();
        let jw: Vec<DenseVector> = w.iter().map(|x| jmat.mul_vec(x)).collect();
        let term = |eta: &DenseVector, mid: &DenseVector, last: &DenseVector| {
            let mut vs: Vec<&DenseVector> = vec![eta];
            vs.extend(base.iter());
            vs.push(mid);
            vs.push(last);
            t.evaluate(&vs)
        };
        term(&jw[q], &w[j], &w[p]) - term(&jw[p], &w[j], &w[q]) + term(&w[q], &jw[j], &w[p])
            - term(&w[p], &jw[j], &w[q])
    }

    #[test]
    fn antisymmetry_blocks() {
        let sys = torsion_antisymmetry_rows();
        assert_eq!(sys.nrows(), 2 * 2401);
        let t = IntTensor::random(7, 4, 1);
        assert!(sys.is_satisfied_by(&t.antisymmetrize_tail().tensor()));
        assert!(!sys.is_satisfied_by(&t.tensor()));
        let w = w_antisymmetry_rows();
        assert_eq!(w.ncols(), 32768);
        assert_eq!(w.nrows(), 3 * 32768);
        assert!(w.is_satisfied_by(&IntTensor::random(8, 5, 2).antisymmetrize_tail().tensor()));
    }

    #[test]
    fn torsion_sample_rows_match_contraction() {
        let mut rng = Rng::new(4);
        let triples: Vec<Frame> = (0..5).map(|_| random_triple7(&mut rng).unwrap()).collect();
        let full = torsion_sample_rows(&triples, RowForm::Full).unwrap();
        let red = torsion_sample_rows(&triples, RowForm::Reduced).unwrap();
        assert_eq!((full.nrows(), red.nrows()), (5, 5));
        let brute = |t: &IntTensor| {
            triples
                .iter()
                .map(|f| {
                    let v = f.vectors();
                    t.evaluate(&[&v[0], &v[1], &v[2], &cross7(&v[1], &v[2])])
                })
                .collect()
        };
        let (raw, anti) = samples(7, 4, 20, 10);
        assert_rows_match(full.rows(), &raw, brute);
        assert_rows_match(red.rows(), &anti, brute);
        assert!(torsion_rows_g2(&triples, RowForm::Reduced).unwrap().is_satisfied_by(&Tensor::zeros(7, 4)));
    }

    #[test]
    fn cr2_g2_rows_match_contraction() {
        let mut rng = Rng::new(6);
        let frame = hermitian_frame7(&mut rng).unwrap();
        let (raw, anti) = samples(7, 4, 20, 40);
        let picks = [(1, 2, 3), (4, 1, 6), (2, 5, 5), (6, 3, 1), (3, 3, 4), (5, 6, 2)];
        let brute = |t: &IntTensor| picks.iter().map(|&(j, p, q)| brute_cr2(t, &frame, j - 1, p - 1, q - 1)).collect();
        let rows = |form| picks.iter().map(|&(j, p, q)| cr2_row_g2(&frame, j, p, q, form).unwrap()).collect::<Vec<_>>();
        assert_rows_match(&rows(RowForm::Full), &raw, brute);
        assert_rows_match(&rows(RowForm::Reduced), &anti, brute);
    }

    #[test]
    fn cr2_g2_row_symmetries() {
        let mut rng = Rng::new(8);
        let frame = hermitian_frame7(&mut rng).unwrap();
        for form in [RowForm::Full, RowForm::Reduced] {
            for j in 1..=6 {
                assert!(cr2_row_g2(&frame, j, j, j, form).unwrap().is_zero());
                for p in 1..=6 {
                    for q in 1..=6 {
                        let a = cr2_row_g2(&frame, j, p, q, form).unwrap();
                        let b = cr2_row_g2(&frame, j, q, p, form).unwrap();
                        assert_eq!(a, b.neg());
                    }
                }
            }
        }
        let sys = cr2_rows_g2(&[frame], RowForm::Reduced).unwrap();
        assert!(sys.nrows() <= 180);
        assert!(sys.is_satisfied_by(&Tensor::zeros(7, 4)));
    }

    #[test]
    fn cr2_spin7_rows_match_contraction() {
        let mut rng = Rng::new(12);
        let frame = hermitian_frame8(&mut rng).unwrap();
        let (raw, anti) = samples(8, 5, 5, 70);
        let picks = [(1, 2, 3), (5, 1, 6), (2, 4, 1)];
        let brute = |t: &IntTensor| picks.iter().map(|&(j, p, q)| brute_cr2(t, &frame, j - 1, p - 1, q - 1)).collect();
        let rows =
            |form| picks.iter().map(|&(j, p, q)| cr2_row_spin7(&frame, j, p, q, form).unwrap()).collect::<Vec<_>>();
        assert_rows_match(&rows(RowForm::Full), &raw, brute);
        assert_rows_match(&rows(RowForm::Reduced), &anti, brute);
        assert!(cr2_row_spin7(&frame, 1, 1, 1, RowForm::Reduced).unwrap().is_zero());
        assert_eq!(
            cr2_row_spin7(&frame, 2, 3, 5, RowForm::Reduced).unwrap(),
            cr2_row_spin7(&frame, 2, 5, 3, RowForm::Reduced).unwrap().neg()
        );
    }

    /// `α ⊗ X·Φ` for skew `X`. Cayley planes maximize the Cayley form, so
    /// its first variation `X·Φ` vanishes on all of them.
    fn w_element(alpha: &[i64], x: &[[i64; 8]; 8]) -> IntTensor {
        let s7 = crate::vcp::spin7();
        let mut form = vec![0i64; 4096];
        for (f, slot_value) in form.iter_mut().enumerate() {
            let idx: [usize; 4] = multi_index(8, 4, f).try_into().unwrap();
            for slot in 0..4 {
                for m in 0..8 {
                    let mut j = idx;
                    j[slot] = m;
                    *slot_value -= x[m][idx[slot]] * s7.eps(j[0], j[1], j[2], j[3]) as i64;
                }
            }
        }
        let c = alpha.iter().flat_map(|&a| form.iter().map(move |&v| a * v)).collect();
        IntTensor { n: 8, order: 5, c }
    }

    fn random_skew(seed: u64) -> [[i64; 8]; 8] {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut x = [[0i64; 8]; 8];
        for i in 0..8 {
            for j in i + 1..8 {
                let v = rng.random_range(-3..=3);
                x[i][j] = v;
                x[j][i] = -v;
            }
        }
        x
    }

    #[test]
    fn w_rows_match_contraction_and_admit_derivatives_of_the_cayley_form() {
        let mut rng = Rng::new(13);
        let triples: Vec<Frame> = (0..3).map(|_| random_triple8(&mut rng).unwrap()).collect();
        let full = w_sample_rows(&triples, RowForm::Full).unwrap();
        let red = w_sample_rows(&triples, RowForm::Reduced).unwrap();
        assert_eq!(red.nrows(), 24);
        let brute = |t: &IntTensor| {
            let mut out = Vec::new();
            for f in &triples {
                let v = f.vectors();
                let chi = cross8(&v[0], &v[1], &v[2]);
                for a in 0..8 {
                    out.push(t.evaluate(&[&DenseVector::unit(8, a), &v[0], &v[1], &v[2], &chi]));
                }
            }
            out
        };
        let (raw, anti) = samples(8, 5, 3, 90);
        assert_rows_match(full.rows(), &raw, brute);
        assert_rows_match(red.rows(), &anti, brute);

        let a = w_element(&[1, 0, -2, 0, 0, 3, 0, 1], &random_skew(5)).tensor();
        assert!(!a.is_zero());
        assert!(w_rows_spin7(&triples, RowForm::Reduced).unwrap().is_satisfied_by(&a));
        assert!(full.is_satisfied_by(&a));
        assert!(w_rows_spin7(&triples, RowForm::Reduced).unwrap().is_satisfied_by(&Tensor::zeros(8, 5)));
    }

    #[test]
    fn restriction_lands_in_torsion_space() {
        let a = w_element(&[2, 1, 0, -1, 0, 0, 1, 3], &random_skew(9));
        let mut rng = Rng::new(21);
        let xi = random_orthogonal(8, 2, &mut rng).unwrap().row(0).clone();
        let t = restrict_torsion_w_to_t(&a.tensor(), &xi).unwrap();
        assert!(!t.is_zero());
        let triples: Vec<Frame> = (0..10).map(|_| random_triple7(&mut rng).unwrap()).collect();
        assert!(torsion_rows_g2(&triples, RowForm::Full).unwrap().is_satisfied_by(&t));
        // The same statement in ambient coordinates, for one triple in ξ⊥.
        let basis = adapted_complement_basis(&xi).unwrap();
        let (y, z) = (&basis[1], &basis[4]);
        let x = basis[0].add(&basis[6]);
        assert!(a.evaluate(&[&x, &xi, y, z, &cross8(&xi, y, z)]).is_zero());

        assert!(restrict_torsion_w_to_t(&Tensor::zeros(8, 5), &xi).unwrap().is_zero());
        let not_unit = DenseVector::from_ints(&[1, 1, 0, 0, 0, 0, 0, 0]);
        assert_eq!(restrict_torsion_w_to_t(&a.tensor(), &not_unit), Err(ConstraintError::NotUnit));
    }

    #[test]
    fn appendix_rows_are_reproducible() {
        let f = appendix_frame7(&mut Rng::new(0).with_range(1)).unwrap();
        let a = cr2_rows_g2_appendix(std::slice::from_ref(&f), RowForm::Reduced);
        let b = cr2_rows_g2_appendix(&[f], RowForm::Reduced);
        assert_eq!(a, b);
    }
}
