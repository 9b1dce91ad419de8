//! Rank and nullity of large sparse integer systems.
//!
//! Ranks are computed modulo several word-size primes by sparse
//! elimination and upgraded to exact statements by [`RankEngine::certify`]
//! or [`certify_with_witnesses`]. A dense fraction-free elimination over
//! the integers is kept for cross-checking small systems.

mod bareiss;
mod certificate;
mod elim;
mod field;

use thiserror::Error;

pub use bareiss::exact_rank;
pub use certificate::{
    certify_nullity, certify_with_witnesses, check_independent, modular_rank, multi_prime_nullity,
    rational_reconstruction, verify_solutions, CertificationLevel, PrimeRank, RankCertificate, RankEngine, RankTimings,
    WitnessSource, MAX_LIFT_PRIMES,
};
pub use elim::ModularEliminator;
pub use field::{is_prime, PrimeField, DEFAULT_PRIME_COUNT, PRIMES};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RankError {
    #[error("{0} is not an odd prime below 2^62")]
    NotPrime(u64),
    #[error("prime count {0} is outside 1..=32")]
    InvalidPrimeCount(usize),
    #[error("prime {0} is listed twice")]
    DuplicatePrime(u64),
    #[error("rational reconstruction failed with {primes} primes")]
    LiftFailed { primes: usize },
    #[error("solution {index} does not satisfy row {row}")]
    WitnessMismatch { index: usize, row: usize },
    #[error("solutions are not linearly independent")]
    DependentWitnesses,
    #[error("vector has {got} entries, system has {expected} columns")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("certificate does not describe this system")]
    SystemMismatch,
}
