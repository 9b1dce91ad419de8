//! Incremental sparse Gaussian elimination modulo one prime.
//!
//! Rows arrive in batches and are reduced against the pivots found so far,
//! column by column in increasing order, using a dense accumulator and a
//! min-heap of touched columns. The first surviving column becomes the
//! pivot of the residual, which is stored normalized to a leading one.
//! Processing the sparsest rows of a batch first lets the two- and
//! three-term symmetry rows claim most columns with near-singleton pivots,
//! so the later dense rows only ever meet short pivot tails plus a small
//! core of free columns.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::field::PrimeField;

const NO_PIVOT: u32 = u32::MAX;

#[derive(Debug, Clone)]
struct PivotRow {
    lead: u32,
    /// Entries right of the lead; the lead coefficient is one.
    tail: Vec<(u32, u64)>,
}

/// Row echelon state of a growing matrix modulo `p`.
#[derive(Debug, Clone)]
pub struct ModularEliminator {
    field: PrimeField,
    ncols: usize,
    pivot_of: Vec<u32>,
    pivots: Vec<PivotRow>,
    acc: Vec<u64>,
    queued: Vec<bool>,
    heap: BinaryHeap<Reverse<u32>>,
    rows_seen: usize,
}

impl ModularEliminator {
    pub fn new(field: PrimeField, ncols: usize) -> Self {
        assert!(ncols < NO_PIVOT as usize, "too many columns");
        ModularEliminator {
            field,
            ncols,
            pivot_of: vec![NO_PIVOT; ncols],
            pivots: Vec::new(),
            acc: vec![0; ncols],
            queued: vec![false; ncols],
            heap: BinaryHeap::new(),
            rows_seen: 0,
        }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn nullity(&self) -> usize {
        self.ncols - self.pivots.len()
    }

    pub fn rows_seen(&self) -> usize {
        self.rows_seen
    }

    pub fn is_full_rank(&self) -> bool {
        self.pivots.len() == self.ncols
    }

    /// Columns without a pivot, increasing.
    pub fn free_columns(&self) -> Vec<usize> {
        (0..self.ncols).filter(|&c| self.pivot_of[c] == NO_PIVOT).collect()
    }

    /// Reduces a batch, sparsest rows first. Entries are `(column, residue)`
    /// with residues in `[0, p)`; a column may repeat.
    pub fn push_batch(&mut self, mut rows: Vec<Vec<(u32, u64)>>) {
        rows.sort_by_key(Vec::len);
        for row in &rows {
            self.push_row(row);
        }
    }

    /// Reduces one row and adds its residual as a pivot. Returns whether
    /// the rank grew.
    pub fn push_row(&mut self, row: &[(u32, u64)]) -> bool {
        self.rows_seen += 1;
        if self.is_full_rank() {
            return false;
        }
        let f = self.field;
        for &(c, v) in row {
            let c = c as usize;
            assert!(c < self.ncols, "column {c} out of range");
            self.acc[c] = f.add(self.acc[c], v % f.modulus());
            if !self.queued[c] {
                self.queued[c] = true;
                self.heap.push(Reverse(c as u32));
            }
        }
        let mut residual: Vec<(u32, u64)> = Vec::new();
        while let Some(Reverse(c)) = self.heap.pop() {
            let cu = c as usize;
            self.queued[cu] = false;
            let value = std::mem::take(&mut self.acc[cu]);
            if value == 0 {
                continue;
            }
            let pivot = self.pivot_of[cu];
            if pivot == NO_PIVOT {
                residual.push((c, value));
                continue;
            }
            let m = f.neg(value);
            for &(t, v) in &self.pivots[pivot as usize].tail {
                let tu = t as usize;
                self.acc[tu] = f.mul_add(self.acc[tu], m, v);
                if !self.queued[tu] {
                    self.queued[tu] = true;
                    self.heap.push(Reverse(t));
                }
            }
        }
        let Some(&(lead, lead_value)) = residual.first() else {
            return false;
        };
        let inv = f.inv(lead_value);
        let tail = residual[1..].iter().map(|&(c, v)| (c, f.mul(v, inv))).collect();
        self.pivot_of[lead as usize] = self.pivots.len() as u32;
        self.pivots.push(PivotRow { lead, tail });
        true
    }

    /// The nullspace basis normalized to the identity on the free columns:
    /// vector `k` has a one at the `k`-th free column and zeros at the
    /// others. Over the rationals this basis is unique given the free
    /// columns, which is what makes residues from several primes combinable.
    pub fn nullspace(&self) -> Vec<Vec<u64>> {
        let free = self.free_columns();
        let d = free.len();
        let f = self.field;
        // Row-major ncols × d, filled from the right so every tail column is
        // final before it is read.
        let mut x = vec![0u64; self.ncols * d];
        for (k, &c) in free.iter().enumerate() {
            x[c * d + k] = 1;
        }
        let mut order: Vec<&PivotRow> = self.pivots.iter().collect();
        order.sort_unstable_by_key(|r| Reverse(r.lead));
        let mut row = vec![0u64; d];
        for pivot in order {
            row.iter_mut().for_each(|r| *r = 0);
            for &(t, v) in &pivot.tail {
                let src = &x[t as usize * d..(t as usize + 1) * d];
                let m = f.neg(v);
                for (r, &s) in row.iter_mut().zip(src) {
                    if s != 0 {
                        *r = f.mul_add(*r, m, s);
                    }
                }
            }
            let lead = pivot.lead as usize;
            x[lead * d..(lead + 1) * d].copy_from_slice(&row);
        }
        (0..d).map(|k| (0..self.ncols).map(|c| x[c * d + k]).collect()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn elim(p: u64, ncols: usize, rows: &[&[(u32, u64)]]) -> ModularEliminator {
        let mut e = ModularEliminator::new(PrimeField::new(p).unwrap(), ncols);
        e.push_batch(rows.iter().map(|r| r.to_vec()).collect());
        e
    }

    #[test]
    fn identity_has_full_rank() {
        let e = elim(5, 3, &[&[(0, 1)], &[(1, 1)], &[(2, 1)]]);
        assert_eq!(e.rank(), 3);
        assert!(e.nullspace().is_empty());
    }

    #[test]
    fn small_prime_drops_rank() {
        assert_eq!(elim(3, 1, &[&[(0, 3 % 3)], &[(0, 6 % 3)]]).rank(), 0);
        assert_eq!(elim(5, 1, &[&[(0, 3)], &[(0, 1)]]).rank(), 1);
    }

    #[test]
    fn dependent_rows_do_not_count() {
        // x0 + x1, x1 + x2, x0 − x2 = first − second.
        let e = elim(7, 3, &[&[(0, 1), (1, 1)], &[(1, 1), (2, 1)], &[(0, 1), (2, 6)]]);
        assert_eq!(e.rank(), 2);
        assert_eq!(e.free_columns(), vec![2]);
        assert_eq!(e.nullspace(), vec![vec![1, 6, 1]]);
    }

    #[test]
    fn nullspace_vectors_annihilate_rows() {
        let rows: &[&[(u32, u64)]] =
            &[&[(0, 2), (3, 5), (4, 1)], &[(1, 3), (3, 1)], &[(0, 1), (1, 1), (2, 4), (5, 9)], &[(2, 7), (4, 3)]];
        let p = 11;
        let e = elim(p, 6, rows);
        assert_eq!(e.rank(), 4);
        for v in e.nullspace() {
            for row in rows {
                let s: u64 = row.iter().map(|&(c, a)| a * v[c as usize]).sum();
                assert_eq!(s % p, 0);
            }
        }
    }

    #[test]
    fn stops_at_full_rank() {
        let mut e = elim(7, 2, &[&[(0, 1)], &[(1, 1)]]);
        assert!(!e.push_row(&[(0, 3), (1, 2)]));
        assert_eq!(e.rows_seen(), 3);
    }
}
