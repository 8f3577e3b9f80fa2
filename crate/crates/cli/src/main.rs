use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::SystemTime;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use residue_lab::curves::{affine_count, check_tables, edwards_affine, NamedCurve, QuarticVariant};
use residue_lab::k3::{self, Surface};
use residue_lab::modarith::cm_decompose;
use residue_lab::patterns::{
    count_pattern, count_pattern_charsum, jacobsthal, pattern_curve_count, residue_word, PatternWord,
};
use residue_lab::quadgraphs::{count_graph_classes, GraphClass};
use residue_lab::stats::{residual_histogram, st_report, DistributionReport};
use residue_lab::verify::unix_seconds;
use residue_lab::{
    build_context, oracle, primes_in, run_campaign, with_workers, Claim, FieldContext, ResidueFilter, RunManifest,
    Tally, VerificationRecord,
};

#[derive(Parser)]
#[command(
    name = "residue-lab",
    version,
    about = "Quadratic residue patterns and point-count identities over prime fields"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the residue word W_p
    Word {
        #[arg(short = 'p')]
        p: u64,
    },
    /// Count one object at a single prime
    Count(CountArgs),
    /// Check a named identity over a range of primes
    Verify(VerifyArgs),
    /// Normalized trace statistics for a named curve
    Satotate(SatoTateArgs),
    /// Both normalizations of p = a² + b²
    Cm {
        #[arg(short = 'p')]
        p: u64,
    },
    /// Quartic point counts against the table for p mod 8
    QuarticTables(QuarticArgs),
}

#[derive(Args)]
struct Workers {
    /// Worker threads
    #[arg(long, env = "RESIDUE_LAB_JOBS")]
    jobs: Option<usize>,
}

impl Workers {
    fn count(&self) -> usize {
        self.jobs
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
            .max(1)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Jsonl,
    Csv,
}

#[derive(Args)]
struct CountArgs {
    /// pattern, pattern-charsum, jacobsthal, graph, curve, edwards, k3-M, k3-N,
    /// k3-S, k3-Xprime, k3-Xprime0, k3-D, k3-D1, pattern-curve, quartic
    object: String,
    #[arg(short = 'p')]
    p: u64,
    /// Pattern word over {X, Y}
    #[arg(short = 'S', long = "pattern")]
    pattern: Option<PatternWord>,
    /// Graph class name
    #[arg(long)]
    class: Option<GraphClass>,
    /// Named curve
    #[arg(long)]
    curve: Option<NamedCurve>,
    /// Chain length for pattern-curve
    #[arg(long)]
    ell: Option<usize>,
    /// Quartic variant 1..4
    #[arg(long)]
    variant: Option<u8>,
    /// Recompute by brute force where available
    #[arg(long)]
    oracle: bool,
}

#[derive(Args)]
struct VerifyArgs {
    claim: Claim,
    #[arg(long, default_value_t = 3)]
    min_p: u64,
    #[arg(long)]
    max_p: u64,
    #[command(flatten)]
    workers: Workers,
    #[arg(long, value_enum, default_value_t = Format::Jsonl)]
    format: Format,
    /// Write records here; the run manifest goes to <PATH>.manifest.json
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "none")]
    filter: ResidueFilter,
    /// Recompute by brute force where available
    #[arg(long)]
    oracle: bool,
    /// Include per-record elapsed time (output is then not reproducible)
    #[arg(long)]
    timings: bool,
}

#[derive(Args)]
struct SatoTateArgs {
    /// weierstrass, a, b, c, d, e, or residual
    curve: String,
    #[arg(long, default_value_t = 100_000)]
    max_p: u64,
    #[arg(long, default_value = "none")]
    filter: ResidueFilter,
    /// Write the JSON report here; the histogram goes to --csv or <PATH>.csv
    #[arg(long)]
    out: Option<PathBuf>,
    /// Histogram CSV path
    #[arg(long)]
    csv: Option<PathBuf>,
    #[command(flatten)]
    workers: Workers,
}

#[derive(Args)]
struct QuarticArgs {
    #[arg(short = 'p', conflicts_with_all = ["min_p", "max_p"])]
    p: Option<u64>,
    #[arg(long, default_value_t = 5)]
    min_p: u64,
    #[arg(long)]
    max_p: Option<u64>,
}

/// A run that completed but found at least one failing check.
struct ChecksFailed;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(ChecksFailed)) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<std::result::Result<(), ChecksFailed>> {
    match command {
        Command::Word { p } => {
            let ctx = build_context(p)?;
            println!("{}", residue_word(&ctx));
        }
        Command::Count(args) => cmd_count(args)?,
        Command::Verify(args) => return cmd_verify(args),
        Command::Satotate(args) => cmd_satotate(args)?,
        Command::Cm { p } => {
            let ctx = build_context(p)?;
            let cm = cm_decompose(&ctx)?;
            #[derive(Serialize)]
            struct Out<'a> {
                p: u64,
                #[serde(flatten)]
                cm: &'a residue_lab::modarith::CmDecomposition,
            }
            println!("{}", serde_json::to_string(&Out { p, cm: &cm })?);
        }
        Command::QuarticTables(args) => return cmd_quartic_tables(args),
    }
    Ok(Ok(()))
}

fn require<T>(value: Option<T>, flag: &str, object: &str) -> Result<T> {
    value.with_context(|| format!("object {object} needs {flag}"))
}

fn cmd_count(args: CountArgs) -> Result<()> {
    let ctx = build_context(args.p)?;
    let object = args.object.as_str();
    let pattern = || require(args.pattern.clone(), "-S <WORD>", object);
    let count: i64 = match object {
        "pattern" => count_pattern(&ctx, &pattern()?)? as i64,
        "pattern-charsum" => count_pattern_charsum(&ctx, &pattern()?)? as i64,
        "jacobsthal" if args.oracle => {
            ctx.require_one_mod_four()?;
            oracle::jacobsthal(&ctx)
        }
        "jacobsthal" => jacobsthal(&ctx)?,
        "graph" => {
            let class = require(args.class, "--class <CLASS>", object)?;
            count_graph_classes(&ctx)?.get(class) as i64
        }
        "curve" => {
            let curve = require(args.curve, "--curve <NAME>", object)?;
            affine_count(&ctx, &curve.spec()) as i64
        }
        "edwards" if args.oracle => {
            ctx.require_one_mod_four()?;
            oracle::edwards_affine(&ctx) as i64
        }
        "edwards" => edwards_affine(&ctx)? as i64,
        "pattern-curve" => pattern_curve_count(&ctx, require(args.ell, "--ell <N>", object)?)? as i64,
        "quartic" => {
            if args.p < 5 {
                bail!("BoundTooSmall: quartic models need p >= 5");
            }
            let v = require(args.variant, "--variant <1..4>", object)?;
            let variant = QuarticVariant::from_index(v).with_context(|| format!("variant {v} is not in 1..4"))?;
            affine_count(&ctx, &variant.spec(&ctx)) as i64
        }
        k3_object if k3_object.starts_with("k3-") => k3_count(&ctx, &k3_object[3..], args.oracle)? as i64,
        other => bail!("UnknownObject: {other}"),
    };
    #[derive(Serialize)]
    struct Out<'a> {
        p: u64,
        object: &'a str,
        count: i64,
    }
    println!(
        "{}",
        serde_json::to_string(&Out {
            p: args.p,
            object,
            count
        })?
    );
    Ok(())
}

fn k3_count(ctx: &FieldContext, name: &str, brute: bool) -> Result<u64> {
    Ok(match (name, brute) {
        ("M", true) | ("X", true) => oracle::count_mp(ctx),
        ("M", false) | ("X", false) => k3::count_mp(ctx),
        ("N", true) => oracle::count_np(ctx),
        ("N", false) => k3::count_np(ctx),
        ("S", true) => oracle::count_s(ctx),
        ("S", false) => k3::count_s(ctx),
        ("Xprime", true) => oracle::count_xprime(ctx),
        ("Xprime", false) => k3::surface_count(ctx, Surface::Xprime).count,
        ("Xprime0", _) => k3::surface_count(ctx, Surface::Xprime0).count,
        ("D", _) => k3::surface_count(ctx, Surface::D).count,
        ("D1", _) => k3::surface_count(ctx, Surface::D1).count,
        _ => bail!("UnknownObject: k3-{name}"),
    })
}

fn output(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("cannot create {}", path.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn write_records(w: &mut dyn Write, records: &[VerificationRecord], format: Format, timings: bool) -> Result<()> {
    match format {
        Format::Jsonl => {
            for r in records {
                serde_json::to_writer(&mut *w, &r.view(timings))?;
                writeln!(w)?;
            }
        }
        Format::Csv => {
            let mut csv = csv::Writer::from_writer(&mut *w);
            let mut header = vec!["p", "claim", "expected", "actual", "pass", "detail"];
            if timings {
                header.push("elapsed_ms");
            }
            csv.write_record(&header)?;
            for r in records {
                let detail: Vec<String> = r.detail.iter().map(|(k, v)| format!("{k}={v}")).collect();
                let mut row = vec![
                    r.p.to_string(),
                    r.claim.clone(),
                    r.expected.to_string(),
                    r.actual.to_string(),
                    r.pass.to_string(),
                    detail.join(" "),
                ];
                if timings {
                    row.push(format!("{:.3}", r.elapsed.as_secs_f64() * 1e3));
                }
                csv.write_record(&row)?;
            }
            csv.flush()?;
        }
    }
    w.flush()?;
    Ok(())
}

fn cmd_verify(args: VerifyArgs) -> Result<std::result::Result<(), ChecksFailed>> {
    if args.min_p > args.max_p {
        bail!("EmptyRange: --min-p {} exceeds --max-p {}", args.min_p, args.max_p);
    }
    let primes = args.claim.eligible_primes(args.min_p, args.max_p, args.filter);
    if primes.is_empty() {
        bail!(
            "EmptyRange: no primes in [{}, {}] are eligible for {}",
            args.min_p,
            args.max_p,
            args.claim
        );
    }
    let workers = args.workers.count();
    let started = SystemTime::now();
    let records = run_campaign(args.claim, &primes, workers, args.oracle)?;
    let finished = SystemTime::now();

    let mut w = output(args.out.as_deref())?;
    write_records(&mut *w, &records, args.format, args.timings)?;
    drop(w);

    let tally = Tally::of(&records);
    let manifest = RunManifest {
        command_line: std::env::args().collect(),
        claim: args.claim.id().to_string(),
        min_p: args.min_p,
        max_p: args.max_p,
        claim_filter: args.claim.residue_class(),
        user_filter: args.filter,
        oracle: args.oracle,
        workers,
        started: unix_seconds(started),
        finished: unix_seconds(finished),
        tally: tally.clone(),
    };
    let manifest_json = serde_json::to_string(&manifest)?;
    match &args.out {
        Some(path) => std::fs::write(sibling(path, ".manifest.json"), manifest_json + "\n")?,
        None => eprintln!("{manifest_json}"),
    }

    if tally.failed > 0 {
        for p in &tally.failing_primes {
            eprintln!("FAIL {} p={p}", args.claim);
        }
        eprintln!("{} of {} records failed", tally.failed, tally.records);
        return Ok(Err(ChecksFailed));
    }
    Ok(Ok(()))
}

fn cmd_satotate(args: SatoTateArgs) -> Result<()> {
    let jobs = args.workers.count();
    let report: DistributionReport = if args.curve.eq_ignore_ascii_case("residual") {
        with_workers(jobs, || residual_histogram(args.max_p))?
    } else {
        let curve: NamedCurve = args.curve.parse()?;
        with_workers(jobs, || st_report(curve, args.max_p, args.filter))?
    };

    let mut w = output(args.out.as_deref())?;
    serde_json::to_writer(&mut w, &report)?;
    writeln!(w)?;
    w.flush()?;
    drop(w);

    let csv_path = args
        .csv
        .clone()
        .or_else(|| args.out.as_deref().map(|p| sibling(p, ".csv")));
    if let Some(path) = csv_path {
        let mut csv = csv::Writer::from_path(&path).with_context(|| format!("cannot create {}", path.display()))?;
        csv.write_record(["bin_lo", "bin_hi", "count", "density"])?;
        for (bin, density) in report.histogram.iter().zip(report.densities()) {
            csv.write_record([
                bin.lo.to_string(),
                bin.hi.to_string(),
                bin.count.to_string(),
                density.to_string(),
            ])?;
        }
        csv.flush()?;
    }
    Ok(())
}

fn cmd_quartic_tables(args: QuarticArgs) -> Result<std::result::Result<(), ChecksFailed>> {
    let primes = match (args.p, args.max_p) {
        (Some(p), _) => {
            build_context(p)?;
            if p < 5 {
                bail!("BoundTooSmall: quartic tables need p >= 5");
            }
            vec![p]
        }
        (None, Some(hi)) => primes_in(args.min_p.max(5), hi, None),
        (None, None) => bail!("quartic-tables needs -p or --max-p"),
    };
    if primes.is_empty() {
        bail!("EmptyRange: no primes >= 5 in range");
    }
    #[derive(Serialize)]
    struct Out {
        p: u64,
        p_mod_8: u64,
        #[serde(flatten)]
        check: residue_lab::curves::TableCheck,
        pass: bool,
    }
    let mut all = true;
    let mut w = output(None)?;
    for p in primes {
        let check = check_tables(&build_context(p)?);
        let pass = check.passes();
        all &= pass;
        serde_json::to_writer(
            &mut w,
            &Out {
                p,
                p_mod_8: p % 8,
                check,
                pass,
            },
        )?;
        writeln!(w)?;
    }
    w.flush()?;
    Ok(if all { Ok(()) } else { Err(ChecksFailed) })
}
