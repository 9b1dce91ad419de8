//! Vector cross products: the 2-fold product on `R^7` from the associative
//! 3-form and the 3-fold product on `R^8` from the Cayley 4-form.
//!
//! Index conventions. On `R^7` the coordinates `0..7` stand for
//! `e1..e7`; on `R^8` they stand for `e0..e7`, with `e0 = 1` the real
//! octonion unit and `e1..e7` the imaginary units carrying the 7-dimensional
//! product. So `eps4(0, a, b, c) == eps3(a - 1, b - 1, c - 1)`.
//!
//! `(u × v)_k = Σ eps3(i,j,k) u_i v_j` and
//! `χ(u,v,w)_d = Σ eps4(a,b,c,d) u_a v_b w_c`, i.e. `⟨u × v, w⟩ = φ(u,v,w)`
//! and `⟨χ(u,v,w), x⟩ = Φ(u,v,w,x)`.

use std::sync::LazyLock;

use num_traits::Zero;
use thiserror::Error;

use crate::exact::{rat, DenseMatrix, DenseVector, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VcpError {
    #[error("epsilon embedding needs orthogonal arguments, got ⟨ξ,w⟩ = {0}")]
    NotOrthogonal(Rational),
    #[error("matrix is not skew-symmetric")]
    NotSkew,
    #[error("expected a vector of dimension {expected}, got {got}")]
    WrongDimension { expected: usize, got: usize },
}

/// `e123 + e145 + e167 + e246 − e257 − e347 − e356` (1-based labels).
const PHI_TERMS: [([usize; 3], i8); 7] =
    [([1, 2, 3], 1), ([1, 4, 5], 1), ([1, 6, 7], 1), ([2, 4, 6], 1), ([2, 5, 7], -1), ([3, 4, 7], -1), ([3, 5, 6], -1)];

/// The Cayley 4-form `e^0 ∧ φ + e4567 + e2367 + e2345 + e1357 − e1346 − e1256 − e1247`.
const CAYLEY_TERMS: [([usize; 4], i8); 14] = [
    ([0, 1, 2, 3], 1),
    ([0, 1, 4, 5], 1),
    ([0, 1, 6, 7], 1),
    ([0, 2, 4, 6], 1),
    ([0, 2, 5, 7], -1),
    ([0, 3, 4, 7], -1),
    ([0, 3, 5, 6], -1),
    ([4, 5, 6, 7], 1),
    ([2, 3, 6, 7], 1),
    ([2, 3, 4, 5], 1),
    ([1, 3, 5, 7], 1),
    ([1, 3, 4, 6], -1),
    ([1, 2, 5, 6], -1),
    ([1, 2, 4, 7], -1),
];

/// `cross8 == HARVEY_LAWSON_SIGN * triple_cross_harvey_lawson` on all of
/// `R^8`. Found by exhaustive comparison over basis triples: the
/// Harvey–Lawson expression `½((u v̄)w − (w v̄)u)` satisfies
/// `⟨x, HL(u,v,w)⟩ = Φ(x,u,v,w)`, while `cross8` puts the output slot last,
/// `Φ(u,v,w,x) = −Φ(x,u,v,w)`.
pub const HARVEY_LAWSON_SIGN: i8 = -1;

fn permutation_sign(p: &[usize]) -> i8 {
    let mut sign = 1;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                sign = -sign;
            }
        }
    }
    sign
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Fully expanded sign table of the associative 3-form.
pub struct CrossProductStructure7 {
    eps3: [i8; 343],
    nonzero: Vec<(usize, usize, usize, i8)>,
}

impl CrossProductStructure7 {
    fn build() -> Self {
        let mut eps3 = [0i8; 343];
        for (t, s) in PHI_TERMS {
            for p in permutations(3) {
                let (i, j, k) = (t[p[0]] - 1, t[p[1]] - 1, t[p[2]] - 1);
                eps3[i * 49 + j * 7 + k] = s * permutation_sign(&p);
            }
        }
        let nonzero = (0..343).filter(|&x| eps3[x] != 0).map(|x| (x / 49, (x / 7) % 7, x % 7, eps3[x])).collect();
        CrossProductStructure7 { eps3, nonzero }
    }

    /// Coefficient of `e^i ∧ e^j ∧ e^k` (0-based, `0 ↦ e1`).
    #[inline]
    pub fn eps(&self, i: usize, j: usize, k: usize) -> i8 {
        self.eps3[i * 49 + j * 7 + k]
    }

    /// All `(i, j, k, sign)` with nonzero sign; 42 entries.
    pub fn nonzero(&self) -> &[(usize, usize, usize, i8)] {
        &self.nonzero
    }
}

/// Fully expanded sign table of the Cayley 4-form.
pub struct CrossProductStructure8 {
    eps4: [i8; 4096],
    nonzero: Vec<(usize, usize, usize, usize, i8)>,
}

impl CrossProductStructure8 {
    fn build() -> Self {
        let mut eps4 = [0i8; 4096];
        for (t, s) in CAYLEY_TERMS {
            for p in permutations(4) {
                let idx = t[p[0]] * 512 + t[p[1]] * 64 + t[p[2]] * 8 + t[p[3]];
                eps4[idx] = s * permutation_sign(&p);
            }
        }
        let nonzero =
            (0..4096).filter(|&x| eps4[x] != 0).map(|x| (x / 512, (x / 64) % 8, (x / 8) % 8, x % 8, eps4[x])).collect();
        CrossProductStructure8 { eps4, nonzero }
    }

    #[inline]
    pub fn eps(&self, a: usize, b: usize, c: usize, d: usize) -> i8 {
        self.eps4[a * 512 + b * 64 + c * 8 + d]
    }

    /// All `(a, b, c, d, sign)` with nonzero sign; 336 entries.
    pub fn nonzero(&self) -> &[(usize, usize, usize, usize, i8)] {
        &self.nonzero
    }
}

static G2: LazyLock<CrossProductStructure7> = LazyLock::new(CrossProductStructure7::build);
static SPIN7: LazyLock<CrossProductStructure8> = LazyLock::new(CrossProductStructure8::build);

pub fn g2() -> &'static CrossProductStructure7 {
    &G2
}

pub fn spin7() -> &'static CrossProductStructure8 {
    &SPIN7
}

fn sign_mul(sign: i8, x: Rational) -> Rational {
    if sign > 0 {
        x
    } else {
        -x
    }
}

pub fn cross7(u: &DenseVector, v: &DenseVector) -> DenseVector {
    assert_eq!((u.dim(), v.dim()), (7, 7));
    let mut out = DenseVector::zeros(7);
    for &(i, j, k, s) in g2().nonzero() {
        if u[i].is_zero() || v[j].is_zero() {
            continue;
        }
        out[k] += sign_mul(s, &u[i] * &v[j]);
    }
    out
}

/// Matrix of `w ↦ v × w`.
pub fn jay7(v: &DenseVector) -> DenseMatrix {
    assert_eq!(v.dim(), 7);
    let mut m = DenseMatrix::zeros(7, 7);
    for &(i, j, k, s) in g2().nonzero() {
        if !v[i].is_zero() {
            let cur = m.get(k, j).clone();
            m.set(k, j, cur + sign_mul(s, v[i].clone()));
        }
    }
    m
}

pub fn cross8(u: &DenseVector, v: &DenseVector, w: &DenseVector) -> DenseVector {
    assert_eq!((u.dim(), v.dim(), w.dim()), (8, 8, 8));
    let mut out = DenseVector::zeros(8);
    for &(a, b, c, d, s) in spin7().nonzero() {
        if u[a].is_zero() || v[b].is_zero() || w[c].is_zero() {
            continue;
        }
        out[d] += sign_mul(s, &u[a] * &v[b] * &w[c]);
    }
    out
}

/// Matrix of `w ↦ χ(v1, v2, w)`.
pub fn jay8(v1: &DenseVector, v2: &DenseVector) -> DenseMatrix {
    assert_eq!((v1.dim(), v2.dim()), (8, 8));
    let mut m = DenseMatrix::zeros(8, 8);
    for &(a, b, c, d, s) in spin7().nonzero() {
        if v1[a].is_zero() || v2[b].is_zero() {
            continue;
        }
        let cur = m.get(d, c).clone();
        m.set(d, c, cur + sign_mul(s, &v1[a] * &v2[b]));
    }
    m
}

fn imaginary_part(x: &DenseVector) -> DenseVector {
    DenseVector::new(x.entries()[1..].to_vec())
}

/// Octonion product on `R^8 = R ⊕ Im O`, determined by the associative
/// 3-form: `x y = x₀y + y₀x − x₀y₀ − ⟨Im x, Im y⟩ + Im x × Im y`.
pub fn octonion_multiply(x: &DenseVector, y: &DenseVector) -> DenseVector {
    assert_eq!((x.dim(), y.dim()), (8, 8));
    let (xi, yi) = (imaginary_part(x), imaginary_part(y));
    let cross = cross7(&xi, &yi);
    let mut out = y.scale(&x[0]).add(&x.scale(&y[0]));
    out[0] = &x[0] * &y[0] - xi.dot(&yi);
    for k in 0..7 {
        out[k + 1] += &cross[k];
    }
    out
}

pub fn octonion_conjugate(x: &DenseVector) -> DenseVector {
    let mut out = x.neg();
    out[0] = x[0].clone();
    out
}

/// `½((u v̄) w − (w v̄) u)`, an independent route to the 3-fold product.
pub fn triple_cross_harvey_lawson(u: &DenseVector, v: &DenseVector, w: &DenseVector) -> DenseVector {
    let vbar = octonion_conjugate(v);
    let a = octonion_multiply(&octonion_multiply(u, &vbar), w);
    let b = octonion_multiply(&octonion_multiply(w, &vbar), u);
    a.sub(&b).scale(&crate::exact::ratio(1, 2))
}

/// An element of `so(n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkewOperator(DenseMatrix);

impl SkewOperator {
    pub fn new(m: DenseMatrix) -> Result<Self, VcpError> {
        if m.is_square() && m.is_skew() {
            Ok(SkewOperator(m))
        } else {
            Err(VcpError::NotSkew)
        }
    }

    pub fn zero(n: usize) -> Self {
        SkewOperator(DenseMatrix::zeros(n, n))
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// Killing metric `⟨X, Y⟩ = −½ Tr(XY)`.
    pub fn killing(&self, other: &SkewOperator) -> Rational {
        -self.0.mul(&other.0).trace() / rat(2)
    }

    pub fn add(&self, other: &SkewOperator) -> SkewOperator {
        SkewOperator(self.0.add(&other.0))
    }

    pub fn sub(&self, other: &SkewOperator) -> SkewOperator {
        SkewOperator(self.0.sub(&other.0))
    }

    pub fn scale(&self, s: &Rational) -> SkewOperator {
        SkewOperator(self.0.scale(s))
    }

    /// `[self, other]`; the bracket of skew operators is skew.
    pub fn commutator(&self, other: &SkewOperator) -> SkewOperator {
        SkewOperator(self.0.mul(&other.0).sub(&other.0.mul(&self.0)))
    }
}

/// `ε(ξ♯ ⊗ w)(X) = ⟨ξ,X⟩ w − ⟨w,X⟩ ξ`, i.e. the operator `w ξᵀ − ξ wᵀ`.
pub fn epsilon_embed(xi: &DenseVector, w: &DenseVector) -> Result<SkewOperator, VcpError> {
    if xi.dim() != w.dim() {
        return Err(VcpError::WrongDimension { expected: xi.dim(), got: w.dim() });
    }
    let ip = xi.dot(w);
    if !ip.is_zero() {
        return Err(VcpError::NotOrthogonal(ip));
    }
    Ok(SkewOperator(DenseMatrix::outer(w, xi).sub(&DenseMatrix::outer(xi, w))))
}

/// Names for the standard octonion basis as used in the reduction argument
/// for Spin(7): `{1, i, j, k, ℓ, ℓi, ℓj, ℓk} = {e0, ..., e7}`. This is a
/// labelling of coordinates; it is not derived from the product.
pub mod octonion_basis {
    pub const ONE: usize = 0;
    pub const I: usize = 1;
    pub const J: usize = 2;
    pub const K: usize = 3;
    pub const L: usize = 4;
    pub const LI: usize = 5;
    pub const LJ: usize = 6;
    pub const LK: usize = 7;
}

fn e8(i: usize) -> DenseVector {
    DenseVector::unit(8, i)
}

fn eps_basis(xi: usize, w: usize) -> SkewOperator {
    epsilon_embed(&e8(xi), &e8(w)).expect("distinct basis vectors are orthogonal")
}

/// `[J_{E⊥(j∧ℓ)}, a_i ε(1♯⊗i) + a_k ε(1♯⊗k)]` with `J = jay8(j, ℓ)`.
pub fn red2_commutator(a_i: &Rational, a_k: &Rational) -> SkewOperator {
    use octonion_basis::*;
    let j_op = SkewOperator::new(jay8(&e8(J), &e8(L))).expect("jay8 is skew");
    let x = eps_basis(ONE, I).scale(a_i).add(&eps_basis(ONE, K).scale(a_k));
    j_op.commutator(&x)
}

/// `a_i ε((ℓj)♯⊗i) + a_k ε((ℓj)♯⊗k) − a_i ε(1♯⊗ℓk) − a_k ε(1♯⊗ℓi)`.
pub fn red2_closed_form(a_i: &Rational, a_k: &Rational) -> SkewOperator {
    use octonion_basis::*;
    eps_basis(LJ, I)
        .scale(a_i)
        .add(&eps_basis(LJ, K).scale(a_k))
        .sub(&eps_basis(ONE, LK).scale(a_i))
        .sub(&eps_basis(ONE, LI).scale(a_k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{gram, projection_complement, stereographic};
    use num_traits::One;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn e7(i: usize) -> DenseVector {
        DenseVector::unit(7, i)
    }

    #[test]
    fn table_sizes() {
        let g = g2();
        assert_eq!(g.nonzero().len(), 42);
        assert_eq!(g.eps(0, 1, 2), 1);
        let s = spin7();
        assert_eq!(s.nonzero().len(), 14 * 24);
        assert_eq!(s.eps(0, 1, 2, 3), 1);
    }

    #[test]
    fn tables_are_totally_antisymmetric() {
        let g = g2();
        for i in 0..7 {
            for j in 0..7 {
                for k in 0..7 {
                    assert_eq!(g.eps(i, j, k), -g.eps(j, i, k));
                    assert_eq!(g.eps(i, j, k), -g.eps(i, k, j));
                }
            }
        }
        let s = spin7();
        for (a, b, c, d, sign) in s.nonzero().iter().copied() {
            assert_eq!(s.eps(b, a, c, d), -sign);
            assert_eq!(s.eps(a, c, b, d), -sign);
            assert_eq!(s.eps(a, b, d, c), -sign);
        }
    }

    #[test]
    fn cayley_form_contains_e0_wedge_phi() {
        for a in 0..7 {
            for b in 0..7 {
                for c in 0..7 {
                    assert_eq!(spin7().eps(0, a + 1, b + 1, c + 1), g2().eps(a, b, c));
                }
            }
        }
    }

    #[test]
    fn cross7_examples() {
        assert_eq!(cross7(&e7(0), &e7(1)), e7(2));
        assert_eq!(cross7(&e7(1), &e7(4)), e7(6).neg());
        let v = DenseVector::from_ints(&[1, -2, 3, 0, 5, 1, 1]);
        assert!(cross7(&v, &v).is_zero());
    }

    #[test]
    fn jay7_examples() {
        assert_eq!(jay7(&e7(0)).mul_vec(&e7(1)), e7(2));
        let v = DenseVector::from_ints(&[2, 0, -1, 3, 0, 0, 4]);
        assert!(jay7(&v).mul_vec(&v).is_zero());
        let v = stereographic(&[1, 1, 0, 0, 0, 0]);
        let j = jay7(&v);
        let p = projection_complement(7, std::slice::from_ref(&v)).unwrap();
        assert!(j.mul(&j).add(&p).is_zero());
    }

    #[test]
    fn cross8_examples() {
        assert_eq!(cross8(&e8(0), &e8(1), &e8(2)), e8(3));
        assert_eq!(cross8(&e8(4), &e8(5), &e8(6)), e8(7));
        let u = DenseVector::from_ints(&[1, 2, 0, 0, -1, 0, 3, 0]);
        let w = DenseVector::from_ints(&[0, 1, 1, 1, 0, 2, 0, 1]);
        assert!(cross8(&u, &u, &w).is_zero());
    }

    #[test]
    fn jay8_examples() {
        assert_eq!(jay8(&e8(0), &e8(1)).mul_vec(&e8(2)), e8(3));
        let v1 = stereographic(&[1, 0, 2, 0, 0, 1, 0]);
        let v2 = DenseVector::from_ints(&[0, 0, 0, 0, 1, 0, 0, 0]);
        // Make v2 orthogonal to v1 by reflecting a basis vector.
        let h = crate::exact::reflection(&v1.sub(&e8(0))).unwrap();
        let v1 = h.mul_vec(&e8(0));
        let v2 = h.mul_vec(&v2);
        assert!(gram(&[v1.clone(), v2.clone()]).is_identity());
        let j = jay8(&v1, &v2);
        assert!(j.mul_vec(&v1).is_zero());
        let p = projection_complement(8, &[v1.clone(), v2.clone()]).unwrap();
        assert!(j.mul(&j).add(&p).is_zero());
    }

    #[test]
    fn octonion_examples() {
        let x = DenseVector::from_ints(&[3, -1, 2, 0, 4, 1, 0, 7]);
        assert_eq!(octonion_multiply(&e8(0), &x), x);
        assert_eq!(octonion_multiply(&x, &e8(0)), x);
        assert_eq!(octonion_multiply(&e8(1), &e8(1)), e8(0).neg());
        assert_eq!(octonion_multiply(&e8(1), &e8(2)), e8(3));
    }

    #[test]
    fn harvey_lawson_examples() {
        assert_eq!(triple_cross_harvey_lawson(&e8(0), &e8(1), &e8(2)), e8(3).neg());
        let u = DenseVector::from_ints(&[1, 0, 2, 0, 0, 1, 0, 3]);
        let w = DenseVector::from_ints(&[0, 5, 0, 1, 1, 0, 2, 0]);
        assert!(triple_cross_harvey_lawson(&u, &u, &w).is_zero());
    }

    #[test]
    fn harvey_lawson_agrees_with_cayley_form_on_all_basis_triples() {
        let sign = rat(HARVEY_LAWSON_SIGN as i64);
        for a in 0..8 {
            for b in 0..8 {
                for c in 0..8 {
                    let hl = triple_cross_harvey_lawson(&e8(a), &e8(b), &e8(c));
                    assert_eq!(cross8(&e8(a), &e8(b), &e8(c)), hl.scale(&sign), "({a},{b},{c})");
                }
            }
        }
    }

    #[test]
    fn epsilon_embedding() {
        let op = epsilon_embed(&e7(0), &e7(1)).unwrap();
        assert_eq!(op.matrix().mul_vec(&e7(0)), e7(1));
        assert_eq!(op.matrix().mul_vec(&e7(1)), e7(0).neg());
        assert!(op.matrix().mul_vec(&e7(4)).is_zero());
        assert!(op.matrix().is_skew());
        assert_eq!(op.killing(&op), Rational::one());
        let xi = DenseVector::from_ints(&[1, 1, 0, 0, 0, 0, 0]);
        assert!(matches!(epsilon_embed(&xi, &e7(0)), Err(VcpError::NotOrthogonal(_))));
        // |ξ|²|w|² for non-unit orthogonal arguments.
        let w = DenseVector::from_ints(&[0, 0, 2, 0, 0, 0, 0]);
        assert_eq!(epsilon_embed(&xi, &w).unwrap().killing(&epsilon_embed(&xi, &w).unwrap()), rat(8));
    }

    #[test]
    fn red2_matches_closed_form() {
        assert!(red2_commutator(&rat(0), &rat(0)).is_zero());
        for (ai, ak) in [(1, 0), (0, 1), (1, 1), (-3, 7)] {
            let (ai, ak) = (rat(ai), rat(ak));
            assert_eq!(red2_commutator(&ai, &ak), red2_closed_form(&ai, &ak));
        }
        let c = red2_commutator(&rat(1), &rat(0));
        assert!(!c.is_zero());
        assert_eq!(c.killing(&c), rat(2));
    }

    fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> DenseVector {
        DenseVector::new(
            (0..n).map(|_| crate::exact::ratio(rng.random_range(-9..=9), rng.random_range(1..=5))).collect(),
        )
    }

    fn gram_det(vs: &[DenseVector]) -> Rational {
        gram(vs).determinant().unwrap()
    }

    #[test]
    fn vcp_axioms_on_random_rational_vectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let (u, v) = (random_vector(&mut rng, 7), random_vector(&mut rng, 7));
            let x = cross7(&u, &v);
            assert!(x.dot(&u).is_zero() && x.dot(&v).is_zero());
            assert_eq!(x.norm_sq(), gram_det(&[u.clone(), v.clone()]));
            assert!(jay7(&u).is_skew());

            let (a, b, c) = (random_vector(&mut rng, 8), random_vector(&mut rng, 8), random_vector(&mut rng, 8));
            let y = cross8(&a, &b, &c);
            assert!(y.dot(&a).is_zero() && y.dot(&b).is_zero() && y.dot(&c).is_zero());
            assert_eq!(y.norm_sq(), gram_det(&[a.clone(), b.clone(), c.clone()]));
            assert!(jay8(&a, &b).is_skew());
            let hl = triple_cross_harvey_lawson(&a, &b, &c);
            assert_eq!(y, hl.scale(&rat(HARVEY_LAWSON_SIGN as i64)));

            let p = octonion_multiply(&a, &b);
            assert_eq!(p.norm_sq(), a.norm_sq() * b.norm_sq());
        }
    }
}
