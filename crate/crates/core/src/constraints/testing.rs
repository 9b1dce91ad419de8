//! Integer test tensors and brute-force evaluation for the row oracles.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exact::{DenseVector, Rational};

use super::{flat_index, multi_index, SparseRow, Tensor};

/// Integer tensor with the same flattening as [`Tensor`].
#[derive(Debug, Clone)]
pub(crate) struct IntTensor {
    pub n: usize,
    pub order: usize,
    pub c: Vec<i64>,
}

impl IntTensor {
    pub fn random(n: usize, order: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = (0..n.pow(order as u32)).map(|_| rng.random_range(-5..=5)).collect();
        IntTensor { n, order, c }
    }

    fn get(&self, idx: &[usize]) -> i64 {
        self.c[flat_index(self.n, idx)]
    }

    /// Projection (up to a factor) onto pair-antisymmetric, pair-symmetric
    /// order-4 tensors.
    pub fn symmetrize_pairs(&self) -> Self {
        let n = self.n;
        let c = (0..self.c.len())
            .map(|f| {
                let [i, j, k, l]: [usize; 4] = multi_index(n, 4, f).try_into().unwrap();
                let g = |a, b, c, d| self.get(&[a, b, c, d]);
                g(i, j, k, l) - g(j, i, k, l) - g(i, j, l, k) + g(j, i, l, k) + g(k, l, i, j)
                    - g(l, k, i, j)
                    - g(k, l, j, i)
                    + g(l, k, j, i)
            })
            .collect();
        IntTensor { n, order: 4, c }
    }

    /// Antisymmetrization of all slots after the first.
    pub fn antisymmetrize_tail(&self) -> Self {
        let (n, order) = (self.n, self.order);
        let perms = signed_permutations(order - 1);
        let c = (0..self.c.len())
            .map(|f| {
                let idx = multi_index(n, order, f);
                perms
                    .iter()
                    .map(|(p, s)| {
                        let mut j = vec![idx[0]];
                        j.extend(p.iter().map(|&k| idx[k + 1]));
                        s * self.get(&j)
                    })
                    .sum()
            })
            .collect();
        IntTensor { n, order, c }
    }

    pub fn big(&self) -> Vec<BigInt> {
        self.c.iter().map(|&x| BigInt::from(x)).collect()
    }

    pub fn tensor(&self) -> Tensor {
        Tensor::from_ints(self.n, self.order, &self.c)
    }

    /// Exact `Σ v1_i v2_j ... t_{ij...}`.
    pub fn evaluate(&self, vs: &[&DenseVector]) -> Rational {
        assert_eq!(vs.len(), self.order);
        let (scaled, lcm) = scale_with_lcm(vs);
        let mut level: Vec<BigInt> = self.big();
        for v in scaled.iter().rev() {
            level = level
                .chunks(self.n)
                .map(|chunk| chunk.iter().zip(v).filter(|(a, _)| !a.is_zero()).map(|(a, b)| a * b).sum())
                .collect();
        }
        Rational::new(level.remove(0), lcm.pow(self.order as u32))
    }
}

fn scale_with_lcm(vs: &[&DenseVector]) -> (Vec<Vec<BigInt>>, BigInt) {
    use num_integer::Integer;
    let lcm = vs.iter().flat_map(|v| v.iter()).fold(BigInt::one(), |a, x| a.lcm(x.denom()));
    let scaled = vs.iter().map(|v| v.iter().map(|x| x.numer() * (&lcm / x.denom())).collect()).collect();
    (scaled, lcm)
}

pub(crate) fn signed_permutations(k: usize) -> Vec<(Vec<usize>, i64)> {
    fn rec(k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in rec(k - 1) {
            for pos in 0..k {
                let mut q = p.clone();
                q.insert(pos, k - 1);
                out.push(q);
            }
        }
        out
    }
    rec(k)
        .into_iter()
        .map(|p| {
            let inversions = (0..p.len()).flat_map(|i| (i + 1..p.len()).map(move |j| (i, j)));
            let s = inversions.filter(|&(i, j)| p[i] > p[j]).count();
            let sign = if s % 2 == 0 { 1 } else { -1 };
            (p, sign)
        })
        .collect()
}

/// Each row is one fixed positive multiple of its brute-force value across
/// all sample tensors; rows and values vanish together.
pub(crate) fn assert_rows_match(
    rows: &[SparseRow],
    tensors: &[IntTensor],
    brute: impl Fn(&IntTensor) -> Vec<Rational>,
) {
    let mut scale: Vec<Option<Rational>> = vec![None; rows.len()];
    for t in tensors {
        let expected = brute(t);
        assert_eq!(expected.len(), rows.len());
        let x = t.big();
        for (r, (row, e)) in rows.iter().zip(&expected).enumerate() {
            let v = Rational::from_integer(row.pair_int(&x));
            if row.is_zero() || e.is_zero() {
                assert!(v.is_zero() && e.is_zero(), "row {r}: {v} vs {e}");
                continue;
            }
            let ratio = v / e;
            assert!(ratio > Rational::zero(), "row {r} has the wrong sign");
            match &scale[r] {
                Some(s) => assert_eq!(s, &ratio, "row {r} scale drifts"),
                None => scale[r] = Some(ratio),
            }
        }
    }
}
