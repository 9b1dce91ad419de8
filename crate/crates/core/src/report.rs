//! Verification reports and their text and JSON renderings.

use std::fmt::Write as _;

use serde::Serialize;

use crate::rank::{CertificationLevel, RankCertificate, WitnessSource};

pub const SCHEMA_VERSION: u32 = 1;

/// Process exit status of a verification run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Mismatch,
    CertificationFailed,
    InvalidConfig,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Mismatch => 2,
            Status::CertificationFailed => 3,
            Status::InvalidConfig => 4,
        }
    }
}

/// The configuration a report was produced with.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConfigEcho {
    pub seed: u64,
    pub samples: Option<usize>,
    pub aux_samples: Option<usize>,
    pub primes: usize,
    pub rng_range: u32,
    pub certify: bool,
    pub frames: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    pub max_extra_batches: usize,
}

/// How many random samples went into one sampled block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SamplingSummary {
    pub label: String,
    pub requested: usize,
    pub used: usize,
    pub batches: usize,
    /// Claimed nullity before the first batch and after each batch.
    pub nullity_history: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockSummary {
    pub label: String,
    pub rows: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CertificateSummary {
    pub level: CertificationLevel,
    pub nullity: usize,
    pub lower_bound: usize,
    pub primes: Vec<u64>,
    pub ranks: Vec<usize>,
    pub primes_agree: bool,
    pub witness_source: WitnessSource,
    pub ncols: usize,
    pub nrows: usize,
}

impl From<&RankCertificate> for CertificateSummary {
    fn from(c: &RankCertificate) -> Self {
        CertificateSummary {
            level: c.level,
            nullity: c.claimed_nullity,
            lower_bound: c.lower_bound,
            primes: c.primes(),
            ranks: c.ranks.iter().map(|r| r.rank).collect(),
            primes_agree: c.primes_agree(),
            witness_source: c.witness_source.clone(),
            ncols: c.ncols,
            nrows: c.nrows,
        }
    }
}

/// A known closed-form solution checked against the final system.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KnownWitness {
    pub name: String,
    pub exact_residual_zero: bool,
}

/// A dimension computed along the way and recorded in the report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RecordedDimension {
    pub name: String,
    pub value: usize,
    pub certificate: CertificateSummary,
}

/// One exact check of the operator identity behind `red2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OperatorCheck {
    pub a_i: i64,
    pub a_k: i64,
    pub matches_closed_form: bool,
    pub is_zero: bool,
    /// Killing norm squared, as an exact rational string.
    pub norm_sq: String,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Timings {
    pub assembly_ms: u128,
    pub elimination_ms: u128,
    pub certification_ms: u128,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub schema: u32,
    pub command: String,
    pub config: ConfigEcho,
    pub sampling: Vec<SamplingSummary>,
    pub blocks: Vec<BlockSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateSummary>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<KnownWitness>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub recorded: Vec<RecordedDimension>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<OperatorCheck>,
    pub expected: Option<usize>,
    #[serde(rename = "match")]
    pub matched: bool,
    pub certified: bool,
    pub status: Status,
    pub exit_code: i32,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub timings: Timings,
}

impl VerificationReport {
    pub fn nullity(&self) -> Option<usize> {
        self.certificate.as_ref().map(|c| c.nullity)
    }

    pub fn level(&self) -> Option<CertificationLevel> {
        self.certificate.as_ref().map(|c| c.level)
    }

    /// The JSON value without timings, which is what reproducibility is
    /// judged on.
    pub fn comparable_json(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("report serializes");
        v.as_object_mut().expect("report is an object").remove("timings");
        v
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let verdict = match self.status {
            Status::Pass => "pass",
            Status::Mismatch => "MISMATCH",
            Status::CertificationFailed => "NOT CERTIFIED",
            Status::InvalidConfig => "INVALID CONFIG",
        };
        match (&self.certificate, self.expected) {
            (Some(c), Some(e)) => {
                let _ = writeln!(
                    s,
                    "{}: nullity {} (expected {}), {}, {}",
                    self.command,
                    c.nullity,
                    e,
                    if c.level > CertificationLevel::Heuristic && !self.certified {
                        "non-certified"
                    } else {
                        c.level.as_str()
                    },
                    verdict
                );
            }
            _ => {
                let _ = writeln!(s, "{}: {}", self.command, verdict);
            }
        }
        let _ = writeln!(
            s,
            "  seed {}, rng range {}, frames {}",
            self.config.seed, self.config.rng_range, self.config.frames
        );
        for b in &self.sampling {
            let history: Vec<String> = b.nullity_history.iter().map(usize::to_string).collect();
            let _ = writeln!(
                s,
                "  {}: {} samples ({} requested) in {} batches, nullity {}",
                b.label,
                b.used,
                b.requested,
                b.batches,
                history.join(" -> ")
            );
        }
        if !self.blocks.is_empty() {
            let blocks: Vec<String> = self.blocks.iter().map(|b| format!("{} {}", b.label, b.rows)).collect();
            let _ = writeln!(s, "  rows: {}", blocks.join(", "));
        }
        if let Some(c) = &self.certificate {
            let ranks: Vec<String> = c.primes.iter().zip(&c.ranks).map(|(p, r)| format!("{r} mod {p}")).collect();
            let agree = if c.primes_agree { "agree" } else { "DISAGREE" };
            let _ = writeln!(s, "  {} columns, ranks {} ({agree})", c.ncols, ranks.join(", "));
            match &c.witness_source {
                WitnessSource::None => {}
                WitnessSource::Lifted { primes } => {
                    let noun = if c.lower_bound == 1 { "solution" } else { "solutions" };
                    let _ = writeln!(s, "  {} exact {noun} lifted from {primes} primes, residual 0", c.lower_bound);
                }
                WitnessSource::Supplied { names } => {
                    let _ = writeln!(s, "  known solutions {} verified, residual 0", names.join(", "));
                }
            }
        }
        for w in &self.witnesses {
            let r = if w.exact_residual_zero { "exact residual 0" } else { "NONZERO residual" };
            let _ = writeln!(s, "  witness {}: {r}", w.name);
        }
        for r in &self.recorded {
            let _ = writeln!(s, "  recorded {} = {} ({})", r.name, r.value, r.certificate.level.as_str());
        }
        for c in &self.checks {
            let _ = writeln!(
                s,
                "  (a_i, a_k) = ({}, {}): closed form {}, {}, norm² {}",
                c.a_i,
                c.a_k,
                if c.matches_closed_form { "matches" } else { "DIFFERS" },
                if c.is_zero { "zero" } else { "nonzero" },
                c.norm_sq
            );
        }
        for n in &self.notes {
            let _ = writeln!(s, "  note: {n}");
        }
        let t = &self.timings;
        let _ = writeln!(
            s,
            "  timings: assembly {} ms, elimination {} ms, certification {} ms",
            t.assembly_ms, t.elimination_ms, t.certification_ms
        );
        s
    }
}

/// Several reports run in sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AggregateReport {
    pub schema: u32,
    pub command: String,
    pub reports: Vec<VerificationReport>,
    #[serde(rename = "match")]
    pub matched: bool,
    pub status: Status,
    pub exit_code: i32,
}

impl AggregateReport {
    pub fn new(reports: Vec<VerificationReport>) -> Self {
        let failing = reports.iter().map(|r| r.status).find(|s| *s != Status::Pass);
        let status = failing.unwrap_or(Status::Pass);
        AggregateReport {
            schema: SCHEMA_VERSION,
            command: "all".into(),
            matched: reports.iter().all(|r| r.matched),
            reports,
            status,
            exit_code: status.exit_code(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut s: String = self.reports.iter().map(VerificationReport::to_text).collect();
        let passed = self.reports.iter().filter(|r| r.status == Status::Pass).count();
        let _ = writeln!(s, "all: {passed}/{} suites pass", self.reports.len());
        s
    }
}
