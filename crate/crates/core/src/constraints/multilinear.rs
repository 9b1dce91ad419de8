//! Integer multilinear algebra used to assemble rows.
//!
//! Sampled vectors are rational. Each row builder first scales every vector
//! it needs by one common denominator, so every term of a multilinear
//! expression of fixed degree picks up the same positive factor and the
//! row can be assembled over the integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::exact::{DenseMatrix, DenseVector};

use super::flat_index;

pub(crate) type IntVec = Vec<BigInt>;

/// Scales all vectors by the lcm of all their denominators.
pub(crate) fn common_scale(vs: &[&DenseVector]) -> Vec<IntVec> {
    let lcm = vs.iter().flat_map(|v| v.iter()).fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    vs.iter().map(|v| v.iter().map(|x| x.numer() * (&lcm / x.denom())).collect()).collect()
}

/// Square integer matrices sharing one scale, row-major.
pub(crate) fn common_scale_matrices(ms: &[&DenseMatrix]) -> Vec<Vec<IntVec>> {
    let lcm =
        ms.iter().flat_map(|m| m.rows().iter().flat_map(|r| r.iter())).fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    ms.iter()
        .map(|m| m.rows().iter().map(|r| r.iter().map(|x| x.numer() * (&lcm / x.denom())).collect()).collect())
        .collect()
}

/// Components of `v_1 ∧ ... ∧ v_r` on `e_S`, keyed by the bitmask of the
/// increasing index set `S`.
pub(crate) fn wedge(vs: &[&IntVec]) -> Vec<(u16, BigInt)> {
    let mut current: Vec<(u16, BigInt)> = vec![(0, BigInt::one())];
    for v in vs {
        let n = v.len();
        let mut acc: Vec<BigInt> = vec![BigInt::zero(); 1 << n];
        let mut touched: Vec<u16> = Vec::new();
        for (mask, c) in &current {
            for (t, vt) in v.iter().enumerate() {
                if vt.is_zero() || mask & (1 << t) != 0 {
                    continue;
                }
                let m = mask | (1 << t);
                let term = c * vt;
                // Moving e_t into sorted position passes the larger elements of S.
                if (mask >> (t + 1)).count_ones() % 2 == 1 {
                    acc[m as usize] -= term;
                } else {
                    acc[m as usize] += term;
                }
                touched.push(m);
            }
        }
        touched.sort_unstable();
        touched.dedup();
        current = touched
            .into_iter()
            .map(|m| (m, std::mem::take(&mut acc[m as usize])))
            .filter(|(_, c)| !c.is_zero())
            .collect();
    }
    current
}

pub(crate) fn mask_elements(mask: u16) -> impl Iterator<Item = usize> {
    (0..16).filter(move |t| mask & (1 << t) != 0)
}

/// Column of `(i; S)` with `S` increasing.
pub(crate) fn column_of(n: usize, first: usize, mask: u16) -> usize {
    let mut idx = vec![first];
    idx.extend(mask_elements(mask));
    flat_index(n, &idx)
}

/// Folded form of `A(η; w)` for a decomposable multivector `w`, modulo
/// antisymmetry of the trailing slots: coefficient `η_i w_S` on `(i; S)`.
pub(crate) fn contract_folded(
    terms: &mut Vec<(usize, BigInt)>,
    n: usize,
    eta: &IntVec,
    w: &[(u16, BigInt)],
    negate: bool,
) {
    for (i, ei) in eta.iter().enumerate() {
        if ei.is_zero() {
            continue;
        }
        for (mask, c) in w {
            let v = ei * c;
            terms.push((column_of(n, i, *mask), if negate { -v } else { v }));
        }
    }
}

/// Full expansion of `Σ v1_i v2_j ... A_{ij...}` into a dense accumulator.
pub(crate) fn contract_full(acc: &mut [BigInt], n: usize, vs: &[&IntVec], negate: bool) {
    fn rec(acc: &mut [BigInt], n: usize, vs: &[&IntVec], prefix: usize, coeff: BigInt, negate: bool) {
        match vs.split_first() {
            None => {
                if negate {
                    acc[prefix] -= coeff;
                } else {
                    acc[prefix] += coeff;
                }
            }
            Some((v, rest)) => {
                for (i, x) in v.iter().enumerate() {
                    if !x.is_zero() {
                        rec(acc, n, rest, prefix * n + i, &coeff * x, negate);
                    }
                }
            }
        }
    }
    rec(acc, n, vs, 0, BigInt::one(), negate);
}

/// Increasing pairs `(a, b)`, `a < b`.
pub(crate) fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect()
}
