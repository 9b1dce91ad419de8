//! Fraction-free Gaussian elimination over the integers.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::constraints::ConstraintSystem;

/// Exact rank over the rationals by Bareiss elimination on the dense
/// matrix. Intermediate entries are minors of the input, so this is only
/// meant for small systems.
pub fn exact_rank(system: &ConstraintSystem) -> usize {
    let ncols = system.ncols();
    let mut m: Vec<Vec<BigInt>> = system
        .rows()
        .iter()
        .map(|r| {
            let mut dense = vec![BigInt::zero(); ncols];
            for (c, v) in r.entries() {
                dense[*c as usize] = v.clone();
            }
            dense
        })
        .collect();
    let mut rank = 0;
    let mut prev = BigInt::one();
    for col in 0..ncols {
        let Some(pivot) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot);
        let (top, bottom) = m.split_at_mut(rank + 1);
        let p = &top[rank];
        for row in bottom.iter_mut() {
            let factor = row[col].clone();
            for c in col + 1..ncols {
                row[c] = (&p[col] * &row[c] - &factor * &p[c]) / &prev;
            }
            row[col] = BigInt::zero();
        }
        prev = top[rank][col].clone();
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::SparseRow;
    use crate::rank::{modular_rank, PrimeField, PRIMES};
    use proptest::prelude::*;

    fn system(ncols: usize, dense: &[Vec<i64>]) -> ConstraintSystem {
        let mut s = ConstraintSystem::new(ncols);
        s.push_block("rows", dense.iter().map(|r| SparseRow::from_dense(r.iter().map(|&x| BigInt::from(x)).collect())));
        s
    }

    #[test]
    fn small_examples() {
        assert_eq!(exact_rank(&system(1, &[vec![3], vec![6]])), 1);
        assert_eq!(exact_rank(&system(3, &[vec![1, 2, 3], vec![2, 4, 6], vec![1, 0, 1]])), 2);
        assert_eq!(exact_rank(&system(3, &[vec![0, 0, 0]])), 0);
    }

    proptest! {
        #[test]
        fn modular_rank_agrees_with_exact_rank(
            rows in prop::collection::vec(prop::collection::vec(-4i64..=4, 6), 0..9)
        ) {
            let s = system(6, &rows);
            let exact = exact_rank(&s);
            for &p in &PRIMES[..3] {
                prop_assert_eq!(modular_rank(&s, PrimeField::new(p).unwrap()), exact);
            }
            // Small primes never overshoot.
            prop_assert!(modular_rank(&s, PrimeField::new(3).unwrap()) <= exact);
        }
    }
}
