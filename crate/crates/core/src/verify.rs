//! Named claims, their eligible primes, and ordered parallel campaigns.

use std::fmt;
use std::str::FromStr;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::Serialize;

use crate::curves::{
    check_tables, genus2_involution_check, named_curve_traces, verify_gauss_edwards, verify_j_relations, NamedCurve,
    QuarticVariant,
};
use crate::error::{Error, Result};
use crate::k3;
use crate::modarith::{build_context, cm_decompose, primes_in, FieldContext, ResidueFilter};
use crate::oracle;
use crate::patterns::{count_pattern, count_pattern_charsum, weil_deviation, PatternWord};
use crate::quadgraphs::{count_graph_classes, goncharova_k4, GraphClass};
use crate::record::VerificationRecord;

/// Longest pattern checked by the character-sum consistency claim.
pub const CHARSUM_MAX_LEN: usize = 5;

/// Point budget for the genus-2 involution check within a campaign.
pub const INVOLUTION_SAMPLE: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Claim {
    Formula2,
    Identity5,
    Goncharova1,
    ClassesTotal,
    Tables,
    Fibration,
    Xprime,
    GaussEdwards,
    JRelations,
    Bookkeeping,
    CharsumConsistency,
    WeilBound,
    CmStructure,
    Involution,
}

impl Claim {
    pub const ALL: [Claim; 14] = [
        Claim::Formula2,
        Claim::Identity5,
        Claim::Goncharova1,
        Claim::ClassesTotal,
        Claim::Tables,
        Claim::Fibration,
        Claim::Xprime,
        Claim::GaussEdwards,
        Claim::JRelations,
        Claim::Bookkeeping,
        Claim::CharsumConsistency,
        Claim::WeilBound,
        Claim::CmStructure,
        Claim::Involution,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Claim::Formula2 => "formula2",
            Claim::Identity5 => "identity5",
            Claim::Goncharova1 => "goncharova1",
            Claim::ClassesTotal => "classes_total",
            Claim::Tables => "tables",
            Claim::Fibration => "fibration",
            Claim::Xprime => "xprime",
            Claim::GaussEdwards => "gauss_edwards",
            Claim::JRelations => "j_relations",
            Claim::Bookkeeping => "bookkeeping",
            Claim::CharsumConsistency => "charsum_consistency",
            Claim::WeilBound => "weil_bound",
            Claim::CmStructure => "cm_structure",
            Claim::Involution => "involution",
        }
    }

    /// Residue class the claim is stated for.
    pub fn residue_class(self) -> ResidueFilter {
        match self {
            Claim::Formula2
            | Claim::Goncharova1
            | Claim::ClassesTotal
            | Claim::Fibration
            | Claim::GaussEdwards
            | Claim::JRelations
            | Claim::Bookkeeping
            | Claim::Involution => ResidueFilter::OneMod4,
            Claim::Identity5
            | Claim::Tables
            | Claim::Xprime
            | Claim::CharsumConsistency
            | Claim::WeilBound
            | Claim::CmStructure => ResidueFilter::None,
        }
    }

    /// Smallest prime the claim applies to.
    pub fn min_prime(self) -> u64 {
        match self {
            Claim::WeilBound | Claim::CmStructure | Claim::Tables => 5,
            _ => 3,
        }
    }

    pub fn is_eligible(self, p: u64) -> bool {
        p >= self.min_prime() && self.residue_class().admits(p)
    }

    /// Eligible primes in [lo, hi], further restricted by `user`.
    pub fn eligible_primes(self, lo: u64, hi: u64, user: ResidueFilter) -> Vec<u64> {
        primes_in(lo.max(self.min_prime()), hi, None)
            .into_iter()
            .filter(|&p| self.is_eligible(p) && user.admits(p))
            .collect()
    }

    /// Evaluate the claim at one prime; `oracle` swaps in brute-force counts.
    pub fn run(self, ctx: &FieldContext, oracle: bool) -> Result<VerificationRecord> {
        let p = ctx.p();
        if !self.is_eligible(p) {
            return Err(match self.residue_class() {
                ResidueFilter::OneMod4 if p % 4 != 1 => Error::WrongResidueClass { p },
                _ => Error::BoundTooSmall {
                    bound: p,
                    min: self.min_prime(),
                },
            });
        }
        let start = Instant::now();
        let mut record = match (self, oracle) {
            (Claim::Formula2, false) => k3::verify_formula2(ctx)?,
            (Claim::Formula2, true) => formula2_oracle(ctx),
            (Claim::Identity5, false) => k3::verify_identity5(ctx),
            (Claim::Identity5, true) => identity5_oracle(ctx),
            (Claim::Goncharova1, _) => {
                let census = count_graph_classes(ctx)?;
                VerificationRecord::new(p, self.id(), goncharova_k4(ctx)?, census.get(GraphClass::K4))
            }
            (Claim::ClassesTotal, _) => {
                let census = count_graph_classes(ctx)?;
                VerificationRecord::new(p, self.id(), (p - 1) * (p - 2) * (p - 3) / 24, census.total())
            }
            (Claim::Tables, _) => tables_record(ctx),
            (Claim::Fibration, _) => k3::verify_fibration(ctx)?,
            (Claim::Xprime, false) => k3::verify_xprime(ctx),
            (Claim::Xprime, true) => xprime_oracle(ctx),
            (Claim::GaussEdwards, false) => verify_gauss_edwards(ctx)?,
            (Claim::GaussEdwards, true) => gauss_edwards_oracle(ctx)?,
            (Claim::JRelations, false) => verify_j_relations(ctx)?,
            (Claim::JRelations, true) => j_relations_oracle(ctx)?,
            (Claim::Bookkeeping, _) => k3::verify_lemma_bookkeeping(ctx)?,
            (Claim::CharsumConsistency, _) => charsum_record(ctx)?,
            (Claim::WeilBound, _) => weil_record(ctx)?,
            (Claim::CmStructure, _) => cm_structure_record(ctx)?,
            (Claim::Involution, _) => genus2_involution_check(ctx, INVOLUTION_SAMPLE)?,
        };
        if oracle {
            record = record.with_detail("oracle", true);
        }
        record.elapsed = start.elapsed();
        Ok(record)
    }
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Claim {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.to_ascii_lowercase().replace('-', "_");
        Claim::ALL
            .into_iter()
            .find(|c| c.id() == s)
            .ok_or_else(|| Error::UnknownClaim(s.to_string()))
    }
}

fn formula2_oracle(ctx: &FieldContext) -> VerificationRecord {
    let p = ctx.p() as i64;
    let j = oracle::jacobsthal(ctx);
    let expected = (p - 1) * (p - 1) + j * j + 4;
    VerificationRecord::new(ctx.p(), "formula2", expected, oracle::count_s(ctx) as i64).with_detail("j", j)
}

fn identity5_oracle(ctx: &FieldContext) -> VerificationRecord {
    let p = ctx.p() as i64;
    let n = oracle::count_np(ctx) as i64;
    let rhs = (p + 1) * (p + 1) + (n - p) * (n - p) + 1;
    VerificationRecord::new(ctx.p(), "identity5", rhs, oracle::count_mp(ctx) as i64).with_detail("n_p", n)
}

fn xprime_oracle(ctx: &FieldContext) -> VerificationRecord {
    let p = ctx.p() as i64;
    let m = oracle::count_mp(ctx) as i64;
    VerificationRecord::new(ctx.p(), "xprime", vec![m - p], vec![oracle::count_xprime(ctx) as i64])
}

fn gauss_edwards_oracle(ctx: &FieldContext) -> Result<VerificationRecord> {
    let g = cm_decompose(ctx)?.gauss;
    let affine = oracle::edwards_affine(ctx);
    Ok(VerificationRecord::new(
        ctx.p(),
        "gauss_edwards",
        (g.a - 1) * (g.a - 1) + g.b * g.b,
        affine as i64 + 4,
    )
    .with_detail("a", g.a)
    .with_detail("b", g.b)
    .with_detail("edwards_affine", affine))
}

fn j_relations_oracle(ctx: &FieldContext) -> Result<VerificationRecord> {
    let p = ctx.p() as i64;
    let j = oracle::jacobsthal(ctx);
    let projective = oracle::count_np(ctx) as i64 + 1;
    let cm = cm_decompose(ctx)?;
    Ok(VerificationRecord::new(
        ctx.p(),
        "j_relations",
        vec![j, j.abs()],
        vec![projective - p - 1, (2 * cm.gauss.a).abs()],
    ))
}

/// Flattened rows (∞, zero locus, sum, trace).
fn tables_record(ctx: &FieldContext) -> VerificationRecord {
    let p = ctx.p();
    let check = check_tables(ctx);
    let a = check.rows[0].trace;
    let mut expected = Vec::with_capacity(16);
    let mut actual = Vec::with_capacity(16);
    for ((v, row), e) in QuarticVariant::ALL.iter().zip(&check.rows).zip(&check.expected) {
        let sign = v.table_row(p).1;
        expected.extend([e.0 as i64, e.1 as i64, e.2 as i64, sign * a]);
        actual.extend([
            row.infinity_count as i64,
            row.zero_locus_count as i64,
            (row.infinity_count + row.zero_locus_count) as i64,
            row.trace,
        ]);
    }
    let mismatched: Vec<i64> = check.mismatched_rows().into_iter().map(i64::from).collect();
    VerificationRecord::new(p, "tables", expected, actual)
        .with_detail("p_mod_8", p % 8)
        .with_detail("mismatched_rows", mismatched)
}

/// Patterns of length ≤ 5 (and ≤ p − 1) whose two counts agree.
fn charsum_record(ctx: &FieldContext) -> Result<VerificationRecord> {
    let max_len = CHARSUM_MAX_LEN.min(ctx.p() as usize - 1);
    let mut checked = 0u64;
    let mut agree = 0u64;
    for len in 1..=max_len {
        for w in PatternWord::all_of_length(len) {
            checked += 1;
            if count_pattern(ctx, &w)? == count_pattern_charsum(ctx, &w)? {
                agree += 1;
            }
        }
    }
    Ok(VerificationRecord::new(ctx.p(), "charsum_consistency", checked, agree))
}

/// Length-4 patterns within the Weil-type bound.
fn weil_record(ctx: &FieldContext) -> Result<VerificationRecord> {
    let mut within = 0u64;
    let mut worst = 0i64;
    for w in PatternWord::all_of_length(4) {
        let d = weil_deviation(ctx, &w)?;
        if d.within_bound(ctx.p()) {
            within += 1;
        }
        worst = worst.max(d.sixteenths.abs());
    }
    Ok(VerificationRecord::new(ctx.p(), "weil_bound", 16u64, within).with_detail("max_abs_sixteenths", worst))
}

/// [a = 0 ⇔ p ≡ 3 mod 4, trace(a) = trace(d), |trace(b)| = |trace(c)|].
fn cm_structure_record(ctx: &FieldContext) -> Result<VerificationRecord> {
    let p = ctx.p();
    let t = named_curve_traces(ctx)?;
    let w = NamedCurve::Weierstrass.trace(ctx)?;
    Ok(VerificationRecord::new(
        p,
        "cm_structure",
        vec![(p % 4 == 3) as i64, t.a, t.b.abs()],
        vec![(t.a == 0) as i64, t.d, t.c.abs()],
    )
    .with_detail("weierstrass", w)
    .with_detail("a", t.a)
    .with_detail("b", t.b)
    .with_detail("c", t.c)
    .with_detail("d", t.d)
    .with_detail("e", t.e))
}

/// Run `claim` over `primes` on `jobs` workers; records come back in input order.
pub fn run_campaign(claim: Claim, primes: &[u64], jobs: usize, oracle: bool) -> Result<Vec<VerificationRecord>> {
    with_workers(jobs, || {
        primes
            .par_iter()
            .map(|&p| claim.run(&build_context(p)?, oracle))
            .collect()
    })
}

/// Run `f` with every parallel kernel confined to `jobs` worker threads.
pub fn with_workers<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .expect("thread pool")
        .install(f)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub records: usize,
    pub passed: usize,
    pub failed: usize,
    pub failing_primes: Vec<u64>,
}

impl Tally {
    pub fn of(records: &[VerificationRecord]) -> Self {
        let failing_primes: Vec<u64> = records.iter().filter(|r| !r.pass).map(|r| r.p).collect();
        Tally {
            records: records.len(),
            passed: records.len() - failing_primes.len(),
            failed: failing_primes.len(),
            failing_primes,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub command_line: Vec<String>,
    pub claim: String,
    pub min_p: u64,
    pub max_p: u64,
    pub claim_filter: ResidueFilter,
    pub user_filter: ResidueFilter,
    pub oracle: bool,
    pub workers: usize,
    /// seconds since the Unix epoch
    pub started: f64,
    pub finished: f64,
    pub tally: Tally,
}

pub fn unix_seconds(t: SystemTime) -> f64 {
    t.duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
}
