//! Multi-prime ranks and their upgrade to exact nullity certificates.
//!
//! Reducing an integer matrix modulo `p` can only lose rank, so
//! `ncols − max_p rank_p` bounds the rational nullity from above. A lower
//! bound comes from exact solutions: either known ones supplied by the
//! caller or a modular nullspace basis lifted to the rationals by Chinese
//! remaindering and rational reconstruction, then checked against every
//! row in exact arithmetic.

use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::constraints::{ConstraintSystem, SparseRow, Tensor, WitnessTensor};
use crate::exact::Rational;

use super::elim::ModularEliminator;
use super::field::{PrimeField, DEFAULT_PRIME_COUNT, PRIMES};
use super::RankError;

/// Most primes a lifting attempt may use before giving up.
pub const MAX_LIFT_PRIMES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificationLevel {
    /// Only the modular upper bound is known.
    Heuristic,
    /// Caller-supplied solutions, verified exactly and independent, match
    /// the upper bound.
    WitnessCertified,
    /// The engine proved the bound itself: full column rank, or its own
    /// lifted nullspace basis verified exactly.
    FullyCertified,
}

impl CertificationLevel {
    pub fn as_str(&self) -> &'static str {
        match self {
            CertificationLevel::Heuristic => "heuristic",
            CertificationLevel::WitnessCertified => "witness-certified",
            CertificationLevel::FullyCertified => "fully-certified",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PrimeRank {
    pub prime: u64,
    pub rank: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct RankTimings {
    pub elimination_ms: u128,
    pub certification_ms: u128,
}

/// Where the exact solutions in a certificate came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessSource {
    None,
    Lifted { primes: usize },
    Supplied { names: Vec<String> },
}

/// Bounds on the nullity of one system.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankCertificate {
    pub ncols: usize,
    pub nrows: usize,
    pub ranks: Vec<PrimeRank>,
    /// `ncols − max rank`, an upper bound on the rational nullity.
    pub claimed_nullity: usize,
    /// Number of exactly verified independent solutions.
    pub lower_bound: usize,
    pub level: CertificationLevel,
    pub witness_source: WitnessSource,
    #[serde(skip)]
    pub witnesses: Vec<Vec<Rational>>,
    #[serde(skip)]
    pub timings: RankTimings,
}

impl RankCertificate {
    pub fn primes(&self) -> Vec<u64> {
        self.ranks.iter().map(|r| r.prime).collect()
    }

    pub fn max_rank(&self) -> usize {
        self.ranks.iter().map(|r| r.rank).max().unwrap_or(0)
    }

    pub fn primes_agree(&self) -> bool {
        self.ranks.windows(2).all(|w| w[0].rank == w[1].rank)
    }

    pub fn is_certified(&self) -> bool {
        self.level >= CertificationLevel::WitnessCertified
    }

    /// Witnesses as tensors of the given shape.
    pub fn witness_tensors(&self, dim: usize, order: usize) -> Vec<Tensor> {
        self.witnesses.iter().map(|w| Tensor::from_coeffs(dim, order, w.clone())).collect()
    }
}

/// Independent modular eliminations of one growing system.
#[derive(Debug, Clone)]
pub struct RankEngine {
    ncols: usize,
    elims: Vec<ModularEliminator>,
    elimination_ms: u128,
}

impl RankEngine {
    /// Engine over the first `k` primes of [`PRIMES`].
    pub fn new(ncols: usize, k: usize) -> Result<Self, RankError> {
        if k == 0 || k > PRIMES.len() {
            return Err(RankError::InvalidPrimeCount(k));
        }
        Self::with_primes(ncols, &PRIMES[..k])
    }

    pub fn with_default_primes(ncols: usize) -> Self {
        Self::new(ncols, DEFAULT_PRIME_COUNT).expect("default prime count is valid")
    }

    pub fn with_primes(ncols: usize, primes: &[u64]) -> Result<Self, RankError> {
        if primes.is_empty() {
            return Err(RankError::InvalidPrimeCount(0));
        }
        let mut elims = Vec::with_capacity(primes.len());
        for (i, &p) in primes.iter().enumerate() {
            if primes[..i].contains(&p) {
                return Err(RankError::DuplicatePrime(p));
            }
            elims.push(ModularEliminator::new(PrimeField::new(p)?, ncols));
        }
        Ok(RankEngine { ncols, elims, elimination_ms: 0 })
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn primes(&self) -> Vec<u64> {
        self.elims.iter().map(|e| e.field().modulus()).collect()
    }

    pub fn rows_seen(&self) -> usize {
        self.elims[0].rows_seen()
    }

    /// Reduces another batch of rows modulo every prime.
    pub fn push_rows(&mut self, rows: &[SparseRow]) {
        let start = Instant::now();
        self.elims.par_iter_mut().for_each(|e| push_reduced(e, rows));
        self.elimination_ms += start.elapsed().as_millis();
    }

    pub fn push_system(&mut self, system: &ConstraintSystem) {
        assert_eq!(system.ncols(), self.ncols, "column counts differ");
        self.push_rows(system.rows());
    }

    pub fn ranks(&self) -> Vec<PrimeRank> {
        self.elims.iter().map(|e| PrimeRank { prime: e.field().modulus(), rank: e.rank() }).collect()
    }

    pub fn claimed_nullity(&self) -> usize {
        self.ncols - self.elims.iter().map(ModularEliminator::rank).max().unwrap_or(0)
    }

    pub fn certificate(&self) -> RankCertificate {
        let ranks = self.ranks();
        let claimed_nullity = self.claimed_nullity();
        RankCertificate {
            ncols: self.ncols,
            nrows: self.rows_seen(),
            ranks,
            claimed_nullity,
            lower_bound: 0,
            level: CertificationLevel::Heuristic,
            witness_source: WitnessSource::None,
            witnesses: Vec::new(),
            timings: RankTimings { elimination_ms: self.elimination_ms, certification_ms: 0 },
        }
    }

    /// Upgrades the current bound to a certificate by lifting a nullspace
    /// basis. `system` must hold exactly the rows pushed so far; it is used
    /// for exact verification and, when lifting needs more primes, to
    /// eliminate modulo the added primes.
    pub fn certify(&mut self, system: &ConstraintSystem) -> Result<RankCertificate, RankError> {
        if system.nrows() != self.rows_seen() || system.ncols() != self.ncols {
            return Err(RankError::SystemMismatch);
        }
        let start = Instant::now();
        let mut cert = self.certificate();
        if cert.claimed_nullity == 0 {
            cert.level = CertificationLevel::FullyCertified;
            cert.timings.certification_ms = start.elapsed().as_millis();
            return Ok(cert);
        }
        let witnesses = loop {
            let primes = self.lifting_eliminators().len();
            let attempt = self.lift().and_then(|w| {
                verify_solutions(system, &w)?;
                Ok(w)
            });
            match attempt {
                Ok(w) => break w,
                // A basis lifted from too few primes reconstructs to wrong
                // values; either way more primes are the remedy.
                Err(RankError::LiftFailed { .. } | RankError::WitnessMismatch { .. })
                    if self.elims.len() < MAX_LIFT_PRIMES =>
                {
                    let count = (2 * self.elims.len()).min(MAX_LIFT_PRIMES) - self.elims.len();
                    self.add_primes(count, system)?;
                }
                Err(RankError::WitnessMismatch { .. }) => return Err(RankError::LiftFailed { primes }),
                Err(e) => return Err(e),
            }
        };
        let lifted_with = self.lifting_eliminators().len();
        check_independent(&witnesses, self.elims[0].field())?;
        // More primes may have been added; they can only confirm or raise
        // the maximal rank, and the lifted basis has the claimed size.
        let mut cert = self.certificate();
        if witnesses.len() != cert.claimed_nullity {
            return Err(RankError::LiftFailed { primes: lifted_with });
        }
        cert.lower_bound = witnesses.len();
        cert.level = CertificationLevel::FullyCertified;
        cert.witness_source = WitnessSource::Lifted { primes: lifted_with };
        cert.witnesses = witnesses;
        cert.timings.certification_ms = start.elapsed().as_millis();
        Ok(cert)
    }

    /// Eliminators of maximal rank sharing the free columns of the first
    /// such one. Only those reduce the same rational basis.
    fn lifting_eliminators(&self) -> Vec<&ModularEliminator> {
        let best = self.elims.iter().map(ModularEliminator::rank).max().unwrap_or(0);
        let top: Vec<&ModularEliminator> = self.elims.iter().filter(|e| e.rank() == best).collect();
        let free = top[0].free_columns();
        top.into_iter().filter(|e| e.free_columns() == free).collect()
    }

    fn lift(&self) -> Result<Vec<Vec<Rational>>, RankError> {
        let elims = self.lifting_eliminators();
        let primes: Vec<u64> = elims.iter().map(|e| e.field().modulus()).collect();
        let bases: Vec<Vec<Vec<u64>>> = elims.par_iter().map(|e| e.nullspace()).collect();
        let crt = Crt::new(&primes);
        let d = bases[0].len();
        (0..d)
            .into_par_iter()
            .map(|k| {
                let residues: Vec<&[u64]> = bases.iter().map(|b| b[k].as_slice()).collect();
                crt.lift_vector(&residues)
            })
            .collect::<Option<Vec<_>>>()
            .ok_or(RankError::LiftFailed { primes: primes.len() })
    }

    fn add_primes(&mut self, count: usize, system: &ConstraintSystem) -> Result<(), RankError> {
        let used = self.primes();
        let fresh: Vec<u64> = PRIMES.iter().copied().filter(|p| !used.contains(p)).take(count).collect();
        if fresh.len() < count {
            return Err(RankError::LiftFailed { primes: used.len() });
        }
        let start = Instant::now();
        let mut added: Vec<ModularEliminator> = fresh
            .iter()
            .map(|&p| PrimeField::new(p).map(|f| ModularEliminator::new(f, self.ncols)))
            .collect::<Result<_, _>>()?;
        added.par_iter_mut().for_each(|e| push_reduced(e, system.rows()));
        self.elims.extend(added);
        self.elimination_ms += start.elapsed().as_millis();
        Ok(())
    }
}

fn push_reduced(e: &mut ModularEliminator, rows: &[SparseRow]) {
    let p = e.field().modulus();
    e.push_batch(rows.iter().map(|r| r.reduce_mod(p)).collect());
}

/// Chinese remaindering over a fixed prime set with rational
/// reconstruction at the half-modulus bound `sqrt(M / 2)`.
struct Crt {
    primes: Vec<u64>,
    /// `prefix[i] = p_0 ⋯ p_{i−1}`.
    prefix: Vec<BigInt>,
    /// `prefix[i]^{-1} mod p_i`.
    prefix_inv: Vec<u64>,
    modulus: BigInt,
    bound: BigInt,
}

impl Crt {
    fn new(primes: &[u64]) -> Self {
        let mut prefix = vec![BigInt::one()];
        let mut prefix_inv = vec![1];
        for (i, &p) in primes.iter().enumerate().skip(1) {
            let m = &prefix[i - 1] * BigInt::from(primes[i - 1]);
            let f = PrimeField::new(p).expect("prime");
            prefix_inv.push(f.inv((&m % p).to_u64().unwrap()));
            prefix.push(m);
        }
        let modulus = &prefix[primes.len() - 1] * BigInt::from(primes[primes.len() - 1]);
        let bound = (&modulus / 2u32).sqrt();
        Crt { primes: primes.to_vec(), prefix, prefix_inv, modulus, bound }
    }

    /// The residue in `[0, M)` congruent to `r_i` modulo each `p_i`.
    fn combine(&self, residues: &[u64]) -> BigInt {
        let mut x = BigInt::from(residues[0]);
        for i in 1..self.primes.len() {
            let p = self.primes[i];
            let f = PrimeField::new(p).expect("prime");
            let xi = (&x % p).to_u64().unwrap();
            let t = f.mul(f.sub(residues[i], xi), self.prefix_inv[i]);
            if t != 0 {
                x += &self.prefix[i] * t;
            }
        }
        x
    }

    /// Lifts one vector given its residues per prime. Entries share a
    /// running denominator, so most only need a multiplication.
    fn lift_vector(&self, residues: &[&[u64]]) -> Option<Vec<Rational>> {
        let n = residues[0].len();
        let mut denom = BigInt::one();
        let mut out = Vec::with_capacity(n);
        let mut column = vec![0u64; residues.len()];
        for c in 0..n {
            for (slot, r) in column.iter_mut().zip(residues) {
                *slot = r[c];
            }
            if column.iter().all(|&r| r == 0) {
                out.push(Rational::zero());
                continue;
            }
            let x = self.combine(&column);
            let y = (x * &denom).mod_floor(&self.modulus);
            let value = match self.small_integer(&y) {
                Some(num) => Rational::new(num, denom.clone()),
                None => {
                    let (num, den) = rational_reconstruction(&y, &self.modulus, &self.bound)?;
                    denom *= &den;
                    Rational::new(num, denom.clone())
                }
            };
            out.push(value);
        }
        // The running denominator must stay within the bound for every
        // reconstructed entry to be the unique one.
        (denom <= self.bound).then_some(out)
    }

    fn small_integer(&self, y: &BigInt) -> Option<BigInt> {
        if y <= &self.bound {
            Some(y.clone())
        } else {
            let neg = &self.modulus - y;
            (neg <= self.bound).then(|| -neg)
        }
    }
}

/// `n / d ≡ a (mod m)` with `|n| ≤ bound` and `0 < d ≤ bound`, if one exists.
pub fn rational_reconstruction(a: &BigInt, m: &BigInt, bound: &BigInt) -> Option<(BigInt, BigInt)> {
    let (mut r0, mut r1) = (m.clone(), a.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while &r1 > bound {
        let (q, r) = r0.div_rem(&r1);
        r0 = std::mem::replace(&mut r1, r);
        let t = &t0 - &q * &t1;
        t0 = std::mem::replace(&mut t1, t);
    }
    if t1.is_zero() || &t1.abs() > bound {
        return None;
    }
    let (n, d) = if t1.is_negative() { (-r1, -t1) } else { (r1, t1) };
    n.gcd(&d).is_one().then_some((n, d))
}

/// Clears denominators: the integer vector `L·v`, `L` the lcm.
fn integer_multiple(v: &[Rational]) -> Vec<BigInt> {
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    v.iter().map(|x| x.numer() * (&lcm / x.denom())).collect()
}

/// Row with 64-bit coefficients, when all of them fit.
fn small_row(row: &SparseRow) -> Option<Vec<(u32, i64)>> {
    row.entries().iter().map(|(c, v)| v.to_i64().map(|v| (*c, v))).collect()
}

fn pair_small(row: &[(u32, i64)], x: &[i64]) -> Option<i128> {
    row.iter().try_fold(0i128, |acc, &(c, v)| acc.checked_add(v as i128 * x[c as usize] as i128))
}

/// Checks `row · v = 0` exactly for every row and every vector. Returns the
/// first failing `(vector, row)` as an error.
pub fn verify_solutions(system: &ConstraintSystem, vectors: &[Vec<Rational>]) -> Result<(), RankError> {
    for v in vectors {
        if v.len() != system.ncols() {
            return Err(RankError::ShapeMismatch { expected: system.ncols(), got: v.len() });
        }
    }
    let small: Vec<Option<Vec<(u32, i64)>>> = system.rows().par_iter().map(small_row).collect();
    let failure = vectors
        .par_iter()
        .enumerate()
        .filter_map(|(index, v)| {
            let x = integer_multiple(v);
            let x_small: Option<Vec<i64>> = x.iter().map(ToPrimitive::to_i64).collect();
            let bad = system.rows().iter().zip(&small).position(|(row, s)| {
                let fast = match (s, &x_small) {
                    (Some(s), Some(xs)) => pair_small(s, xs),
                    _ => None,
                };
                match fast {
                    Some(value) => value != 0,
                    None => !row.pair_int(&x).is_zero(),
                }
            });
            bad.map(|row| RankError::WitnessMismatch { index, row })
        })
        .min_by_key(|e| match e {
            RankError::WitnessMismatch { index, row } => (*index, *row),
            _ => unreachable!(),
        });
    failure.map_or(Ok(()), Err)
}

/// Linear independence of exact vectors, shown by their rank modulo `f`.
pub fn check_independent(vectors: &[Vec<Rational>], f: PrimeField) -> Result<(), RankError> {
    let Some(first) = vectors.first() else { return Ok(()) };
    let mut e = ModularEliminator::new(f, first.len());
    let p = BigInt::from(f.modulus());
    for v in vectors {
        let x = integer_multiple(v);
        let row: Vec<(u32, u64)> = x
            .iter()
            .enumerate()
            .filter(|(_, a)| !a.is_zero())
            .map(|(c, a)| (c as u32, a.mod_floor(&p).to_u64().unwrap()))
            .filter(|&(_, r)| r != 0)
            .collect();
        if !e.push_row(&row) {
            return Err(RankError::DependentWitnesses);
        }
    }
    Ok(())
}

/// Rank of `system` modulo `field`.
pub fn modular_rank(system: &ConstraintSystem, field: PrimeField) -> usize {
    let mut e = ModularEliminator::new(field, system.ncols());
    push_reduced(&mut e, system.rows());
    e.rank()
}

/// Heuristic certificate from the first `k` primes of [`PRIMES`].
pub fn multi_prime_nullity(system: &ConstraintSystem, k: usize) -> Result<RankCertificate, RankError> {
    let mut engine = RankEngine::new(system.ncols(), k)?;
    engine.push_system(system);
    Ok(engine.certificate())
}

/// Upgrades a heuristic certificate of `system` by lifting a nullspace
/// basis, eliminating again modulo the certificate's primes.
pub fn certify_nullity(system: &ConstraintSystem, cert: &RankCertificate) -> Result<RankCertificate, RankError> {
    let mut engine = RankEngine::with_primes(system.ncols(), &cert.primes())?;
    engine.push_system(system);
    if engine.ranks() != cert.ranks {
        return Err(RankError::SystemMismatch);
    }
    engine.certify(system)
}

/// Upgrades `cert` with known exact solutions. When they are independent
/// and as many as the claimed nullity, the certificate becomes
/// witness-certified; otherwise it records them as a lower bound.
pub fn certify_with_witnesses(
    system: &ConstraintSystem,
    cert: &RankCertificate,
    named: &[WitnessTensor],
) -> Result<RankCertificate, RankError> {
    let start = Instant::now();
    let vectors: Vec<Vec<Rational>> = named.iter().map(|w| w.tensor.coeffs().to_vec()).collect();
    verify_solutions(system, &vectors)?;
    let field = PrimeField::new(cert.ranks.first().map_or(PRIMES[0], |r| r.prime))?;
    check_independent(&vectors, field)?;
    let mut out = cert.clone();
    if vectors.len() > out.claimed_nullity {
        // More independent exact solutions than the modular bound allows
        // cannot happen for a correct system and bound.
        return Err(RankError::SystemMismatch);
    }
    if out.level == CertificationLevel::FullyCertified {
        return Ok(out);
    }
    out.lower_bound = vectors.len();
    if vectors.len() == out.claimed_nullity {
        out.level = CertificationLevel::WitnessCertified;
    }
    out.witness_source = WitnessSource::Supplied { names: named.iter().map(|w| w.name.clone()).collect() };
    out.witnesses = vectors;
    out.timings.certification_ms += start.elapsed().as_millis();
    Ok(out)
}
