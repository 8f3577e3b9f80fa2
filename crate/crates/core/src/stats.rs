//! Normalized Frobenius traces over prime ranges and their empirical laws.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::curves::NamedCurve;
use crate::error::{Error, Result};
use crate::modarith::{build_context, primes_in, ResidueFilter};
use crate::patterns::{weil_deviation, Letter, PatternWord};

pub const HISTOGRAM_BINS: usize = 40;

/// Smallest prime included in trace collections.
pub const FIRST_SAMPLED_PRIME: u64 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceSample {
    pub p: u64,
    pub trace: i64,
    /// trace / (2√p)
    pub t: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceCollection {
    pub curve: NamedCurve,
    pub samples: Vec<TraceSample>,
    /// bad-reduction primes
    pub skipped: Vec<u64>,
}

impl TraceCollection {
    pub fn normalized(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }
}

pub fn collect_traces(curve: NamedCurve, bound: u64, filter: ResidueFilter) -> Result<TraceCollection> {
    if curve == NamedCurve::Genus2 {
        return Err(Error::UnknownCurve(curve.id().to_string()));
    }
    if bound < FIRST_SAMPLED_PRIME {
        return Err(Error::BoundTooSmall {
            bound,
            min: FIRST_SAMPLED_PRIME,
        });
    }
    let primes = primes_in(FIRST_SAMPLED_PRIME, bound, filter.as_pair());
    let outcomes: Vec<(u64, Option<i64>)> = primes
        .par_iter()
        .map(|&p| {
            let ctx = build_context(p).expect("primes_in yields odd primes");
            (p, curve.trace(&ctx).ok())
        })
        .collect();

    let mut samples = Vec::with_capacity(outcomes.len());
    let mut skipped = Vec::new();
    for (p, trace) in outcomes {
        match trace {
            Some(trace) => samples.push(TraceSample {
                p,
                trace,
                t: trace as f64 / (2.0 * (p as f64).sqrt()),
            }),
            None => skipped.push(p),
        }
    }
    Ok(TraceCollection {
        curve,
        samples,
        skipped,
    })
}

/// CDF of the semicircle law (2/π)√(1 − t²) dt on [−1, 1].
pub fn semicircle_cdf(t: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&t) {
        return Err(Error::OutOfDomain(t));
    }
    if t == 1.0 {
        return Ok(1.0);
    }
    if t == -1.0 {
        return Ok(0.0);
    }
    Ok(0.5 + (t * (1.0 - t * t).sqrt() + t.asin()) / PI)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Law {
    Uniform,
    Semicircle,
    /// law of cos θ for θ uniform; reported for comparison only
    Arcsine,
}

impl Law {
    pub fn cdf(self, t: f64) -> Result<f64> {
        if !(-1.0..=1.0).contains(&t) {
            return Err(Error::OutOfDomain(t));
        }
        Ok(match self {
            Law::Uniform => (t + 1.0) / 2.0,
            Law::Semicircle => semicircle_cdf(t)?,
            Law::Arcsine => {
                if t.abs() == 1.0 {
                    (t + 1.0) / 2.0
                } else {
                    0.5 + t.asin() / PI
                }
            }
        })
    }
}

/// One-sample two-sided Kolmogorov–Smirnov distance.
pub fn ks_distance(samples: &[f64], law: Law) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = law.cdf(x)?;
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    Ok(d)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    pub count: u64,
}

/// Equal-width bins on [−1, 1]; half-open except the last.
pub fn histogram(samples: &[f64], bins: usize) -> Vec<HistogramBin> {
    let width = 2.0 / bins as f64;
    let mut out: Vec<HistogramBin> = (0..bins)
        .map(|i| HistogramBin {
            lo: -1.0 + i as f64 * width,
            hi: if i + 1 == bins {
                1.0
            } else {
                -1.0 + (i + 1) as f64 * width
            },
            count: 0,
        })
        .collect();
    for &t in samples {
        let idx = (((t + 1.0) / width).floor() as isize).clamp(0, bins as isize - 1) as usize;
        out[idx].count += 1;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistributionReport {
    pub curve: String,
    pub prime_bound: u64,
    pub filter: ResidueFilter,
    pub sample_count: usize,
    pub skipped: Vec<u64>,
    pub ks_uniform: f64,
    pub ks_semicircle: f64,
    pub ks_arcsine: f64,
    pub histogram: Vec<HistogramBin>,
}

impl DistributionReport {
    fn from_samples(curve: String, bound: u64, filter: ResidueFilter, skipped: Vec<u64>, t: &[f64]) -> Result<Self> {
        Ok(DistributionReport {
            curve,
            prime_bound: bound,
            filter,
            sample_count: t.len(),
            skipped,
            ks_uniform: ks_distance(t, Law::Uniform)?,
            ks_semicircle: ks_distance(t, Law::Semicircle)?,
            ks_arcsine: ks_distance(t, Law::Arcsine)?,
            histogram: histogram(t, HISTOGRAM_BINS),
        })
    }

    /// count / (samples · bin width), per bin.
    pub fn densities(&self) -> Vec<f64> {
        self.histogram
            .iter()
            .map(|b| b.count as f64 / (self.sample_count as f64 * (b.hi - b.lo)))
            .collect()
    }
}

pub fn st_report(curve: NamedCurve, bound: u64, filter: ResidueFilter) -> Result<DistributionReport> {
    if bound < 100 {
        return Err(Error::BoundTooSmall { bound, min: 100 });
    }
    let traces = collect_traces(curve, bound, filter)?;
    DistributionReport::from_samples(
        curve.id().to_string(),
        bound,
        filter,
        traces.skipped.clone(),
        &traces.normalized(),
    )
}

/// ξ_p = (n_p(XXXX) − (p − 1)/16)/(2√p) for every prime 5 ≤ p ≤ bound.
pub fn residual_samples(bound: u64) -> Result<Vec<(u64, f64)>> {
    let xxxx = PatternWord::repeat(Letter::X, 4)?;
    primes_in(FIRST_SAMPLED_PRIME, bound, None)
        .par_iter()
        .map(|&p| {
            let ctx = build_context(p)?;
            let d = weil_deviation(&ctx, &xxxx)?;
            Ok((p, d.sixteenths as f64 / (32.0 * (p as f64).sqrt())))
        })
        .collect()
}

/// Histogram of the XXXX residuals; exploratory only.
pub fn residual_histogram(bound: u64) -> Result<DistributionReport> {
    if bound < 100 {
        return Err(Error::BoundTooSmall { bound, min: 100 });
    }
    let xi: Vec<f64> = residual_samples(bound)?.into_iter().map(|(_, x)| x).collect();
    DistributionReport::from_samples("residual_xxxx".into(), bound, ResidueFilter::None, Vec::new(), &xi)
}
