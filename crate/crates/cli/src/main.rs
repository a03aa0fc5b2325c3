//! `lseries`: special values of the Hecke L-series attached to the cubic
//! twists `y^2 = x^3 + D^3` over `Q(sqrt(-3))`.
//!
//! Subcommands:
//! * `find-primes`: enumerate normalized split primes of `Z[tau]`.
//! * `l1`: evaluate `L_S(psi-bar, 1)` by the character-sum formula, with an
//!   optional independent oracle cross-check.
//! * `verify`: run the special-value, identity, or symbol suites.
//! * `valuation`: emit the exact 2-adic valuation certificate.
//!
//! Exit codes: 0 success, 1 computational failure, 2 verification or oracle
//! mismatch, 64 usage error.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use lseries_core::eisenstein::{self, CongruenceClass, SquarefreeD, SubsetSelector};
use lseries_core::numerics::BigReal;
use lseries_core::weierstrass::{self, LatticeContext};
use lseries_core::{hecke, valuation, CheckRow, Error, OracleMethod, REPORT_SCHEMA};
use serde::Serialize;

const EXIT_VERIFY: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(
    name = "lseries",
    version,
    about = "Special values of cubic-twist Hecke L-series over Q(sqrt(-3))",
    after_help = "Exit codes: 0 success, 1 computational failure, \
                  2 verification or oracle mismatch, 64 usage error."
)]
struct Cli {
    /// Decimal digits of working precision (minimum 20; falls back to the
    /// LSERIES_PRECISION environment variable, then 50).
    #[arg(long, global = true)]
    precision: Option<u32>,
    /// Number of worker threads (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Write the JSON report to this file.
    #[arg(long, global = true, value_name = "FILE")]
    json: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, Debug, ValueEnum)]
enum ClassArg {
    /// a = 1 (mod 12), b = 0 (mod 12).
    Mod12,
    /// x = 1 (mod 4 sqrt(-3)).
    Mod4sqrtm3,
}

impl From<ClassArg> for CongruenceClass {
    fn from(c: ClassArg) -> Self {
        match c {
            ClassArg::Mod12 => CongruenceClass::Mod12,
            ClassArg::Mod4sqrtm3 => CongruenceClass::Mod4SqrtM3,
        }
    }
}

/// Parses a subset bitmask written in decimal, binary (`0b11`), or hex (`0x3`).
fn parse_mask(s: &str) -> std::result::Result<u32, String> {
    let parsed = if let Some(bits) = s.strip_prefix("0b").or_else(|| s.strip_prefix("0B")) {
        u32::from_str_radix(bits, 2)
    } else if let Some(hex) = s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        u32::from_str_radix(hex, 16)
    } else {
        s.parse()
    };
    parsed.map_err(|_| format!("invalid subset mask {s:?}"))
}

#[derive(Subcommand)]
enum Command {
    /// List normalized split primes of Z[tau] with norm up to a bound.
    FindPrimes {
        /// Upper bound on the norm.
        #[arg(long)]
        norm_bound: i64,
        /// Normalization the listed primes satisfy.
        #[arg(long, value_enum, default_value_t = ClassArg::Mod12)]
        class: ClassArg,
    },
    /// Evaluate L_S(psi-bar, 1) by the character-sum formula.
    L1 {
        /// Comma-separated prime list defining D, e.g. "13+12*t".
        #[arg(long)]
        primes: String,
        /// Bitmask selecting the subset T of the prime list (decimal, 0b, or 0x).
        #[arg(long = "subset", alias = "subset-mask", value_parser = parse_mask, default_value = "0")]
        subset_mask: u32,
        /// Cross-check oracle: closed-form, curve-q, or afe.
        #[arg(long)]
        oracle: Option<String>,
        /// Tolerance for the oracle comparison (defaults depend on the oracle).
        #[arg(long)]
        tolerance: Option<f64>,
        /// Normalization of the prime list.
        #[arg(long, value_enum, default_value_t = ClassArg::Mod12)]
        class: ClassArg,
    },
    /// Run a verification suite.
    Verify {
        #[command(subcommand)]
        suite: VerifySuite,
    },
    /// Emit the exact 2-adic valuation certificate for D.
    Valuation {
        /// Comma-separated prime list defining D.
        #[arg(long)]
        primes: String,
        /// Normalization of the prime list.
        #[arg(long, value_enum, default_value_t = ClassArg::Mod12)]
        class: ClassArg,
    },
}

#[derive(Subcommand)]
enum VerifySuite {
    /// Exact special values of wp, wp', zeta at division points.
    SpecialValues,
    /// Character-sum identities over the residue system of D.
    Identities {
        /// Comma-separated prime list defining D.
        #[arg(long)]
        primes: String,
        /// Bitmask selecting the subset T (decimal, 0b, or 0x).
        #[arg(long = "subset", alias = "subset-mask", value_parser = parse_mask, default_value = "0")]
        subset_mask: u32,
        /// Normalization of the prime list.
        #[arg(long, value_enum, default_value_t = ClassArg::Mod12)]
        class: ClassArg,
    },
    /// Quadratic symbol identities over the residue system of D.
    Symbols {
        /// Comma-separated prime list defining D.
        #[arg(long)]
        primes: String,
        /// Normalization of the prime list.
        #[arg(long, value_enum, default_value_t = ClassArg::Mod12)]
        class: ClassArg,
    },
}

#[derive(Serialize)]
struct FindPrimesReport {
    schema: u32,
    norm_bound: i64,
    class: String,
    count: usize,
    primes: Vec<String>,
}

#[derive(Serialize)]
struct SuiteReport {
    schema: u32,
    precision: u32,
    suite: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    d: Option<String>,
    rows: Vec<CheckRow>,
    all_pass: bool,
}

/// Failures carry the exit code they map to.
enum Failure {
    Usage(String),
    Compute(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Compute(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. }
            | Error::CongruenceViolation { .. }
            | Error::DuplicatePrime { .. }
            | Error::NotPrime { .. }
            | Error::SubsetMaskOutOfRange { .. }
            | Error::CertificateRequiresPrimes { .. } => Failure::Usage(e.to_string()),
            other => Failure::Compute(other.into()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let run = || dispatch(&cli);
    let outcome = match cli.workers {
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(w).build();
            match pool {
                Ok(pool) => pool.install(run),
                Err(e) => Err(Failure::Usage(format!("cannot build worker pool: {e}"))),
            }
        }
        None => run(),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Compute(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn resolve_precision(cli: &Cli) -> Result<u32, Failure> {
    let p = match cli.precision {
        Some(p) => p,
        None => match std::env::var("LSERIES_PRECISION") {
            Ok(s) => s.parse::<u32>().map_err(|_| {
                Failure::Usage(format!("LSERIES_PRECISION is not a valid digit count: {s:?}"))
            })?,
            Err(_) => 50,
        },
    };
    if p < 20 {
        return Err(Failure::Usage(format!(
            "precision must be at least 20 digits, got {p}"
        )));
    }
    Ok(p)
}

fn write_json<T: Serialize>(path: &Option<PathBuf>, value: &T) -> Result<(), Failure> {
    if let Some(path) = path {
        let body = serde_json::to_string_pretty(value)
            .context("serializing report")
            .map_err(Failure::Compute)?;
        std::fs::write(path, body + "\n")
            .with_context(|| format!("writing {}", path.display()))
            .map_err(Failure::Compute)?;
    }
    Ok(())
}

fn parse_d(primes: &str, class: ClassArg) -> Result<SquarefreeD, Failure> {
    Ok(SquarefreeD::parse_list(primes, class.into())?)
}

fn print_rows(rows: &[CheckRow]) {
    for row in rows {
        let verdict = if row.pass { "pass" } else { "FAIL" };
        println!("[{verdict}] {:<44} error {:<14} tol {}", row.name, row.error, row.tolerance);
        if let Some(w) = &row.witness {
            println!("       worst witness: {w}");
        }
    }
}

fn suite_outcome(
    json: &Option<PathBuf>,
    precision: u32,
    suite: &str,
    d: Option<String>,
    rows: Vec<CheckRow>,
    started: Instant,
) -> Result<u8, Failure> {
    let all_pass = CheckRow::all_pass(&rows);
    let report = SuiteReport {
        schema: REPORT_SCHEMA,
        precision,
        suite: suite.into(),
        d,
        rows,
        all_pass,
    };
    write_json(json, &report)?;
    print_rows(&report.rows);
    println!(
        "{}: {} of {} checks passed in {:.2}s",
        suite,
        report.rows.iter().filter(|r| r.pass).count(),
        report.rows.len(),
        started.elapsed().as_secs_f64()
    );
    Ok(if all_pass { 0 } else { EXIT_VERIFY })
}

fn dispatch(cli: &Cli) -> Result<u8, Failure> {
    match &cli.command {
        Command::FindPrimes { norm_bound, class } => {
            if !(1..=10_000_000).contains(norm_bound) {
                return Err(Failure::Usage(format!(
                    "--norm-bound must be between 1 and 10^7, got {norm_bound}"
                )));
            }
            let primes = eisenstein::find_primes(*norm_bound as i128, (*class).into());
            let report = FindPrimesReport {
                schema: REPORT_SCHEMA,
                norm_bound: *norm_bound,
                class: format!("{:?}", CongruenceClass::from(*class)),
                count: primes.len(),
                primes: primes.iter().map(|p| p.to_string()).collect(),
            };
            write_json(&cli.json, &report)?;
            for (p, s) in primes.iter().zip(&report.primes) {
                println!("{s}  (norm {})", p.norm());
            }
            println!("{} primes with norm <= {}", report.count, norm_bound);
            Ok(0)
        }
        Command::L1 {
            primes,
            subset_mask,
            oracle,
            tolerance,
            class,
        } => {
            let precision = resolve_precision(cli)?;
            let d = parse_d(primes, *class)?;
            let t = SubsetSelector::new(*subset_mask, d.n())?;
            let started = Instant::now();
            let mut report = hecke::formula_l1_checked(&d, &t, precision)?;
            let mut exit = 0u8;
            let mut oracle_line = String::new();
            if let Some(name) = oracle {
                let method: OracleMethod = name.parse()?;
                let ctx = LatticeContext::new(precision)?;
                let result = hecke::oracle_l1(&d, &t, method, &ctx)?;
                let diff = (&report.l_s_formula - &result.l_s).abs();
                let tol = match tolerance {
                    Some(t) => BigReal::from_f64(*t, ctx.prec()),
                    None => match method {
                        OracleMethod::ClosedForm => {
                            BigReal::pow10(15 - precision as i64, ctx.prec())
                        }
                        _ => BigReal::from_f64(1e-8, ctx.prec()),
                    },
                };
                let ok = diff <= tol;
                write!(
                    oracle_line,
                    "oracle {:<12} |formula - oracle| = {}  tol {}  [{}]",
                    method.name(),
                    diff.to_decimal(6),
                    tol.to_decimal(3),
                    if ok { "pass" } else { "FAIL" }
                )
                .expect("write to string");
                if let Some(w) = &result.root_number {
                    write!(oracle_line, "\nroot number {:.12}", w).expect("write to string");
                }
                report.oracle_method = Some(method.name().into());
                report.oracle_value = Some(result.l_s.clone());
                report.abs_diff = Some(diff.to_decimal_full());
                if !ok {
                    exit = EXIT_VERIFY;
                }
            }
            report.wall_time = Some(started.elapsed().as_secs_f64());
            write_json(&cli.json, &report)?;
            println!("D        = {}", report.d);
            println!("D_T      = {}  (mask {:#b})", report.d_t, report.subset_mask);
            println!("residues = {}", report.term_count);
            println!("sum2     = {}", report.sum2);
            println!("L_S(psi-bar, 1) = {:.*}", precision.min(40) as usize, report.l_s_formula);
            println!("L(psi-bar, 1)   = {:.*}", precision.min(40) as usize, report.l_adjusted);
            if !oracle_line.is_empty() {
                println!("{oracle_line}");
            }
            println!(
                "computed at {} digits (escalation check passed) in {:.2}s",
                precision,
                report.wall_time.unwrap_or(0.0)
            );
            Ok(exit)
        }
        Command::Verify { suite } => match suite {
            VerifySuite::SpecialValues => {
                let precision = resolve_precision(cli)?;
                let started = Instant::now();
                let ctx = LatticeContext::new(precision)?;
                let rows = weierstrass::special_value_suite(&ctx)?;
                suite_outcome(&cli.json, precision, "special-values", None, rows, started)
            }
            VerifySuite::Identities {
                primes,
                subset_mask,
                class,
            } => {
                let precision = resolve_precision(cli)?;
                let d = parse_d(primes, *class)?;
                let t = SubsetSelector::new(*subset_mask, d.n())?;
                let started = Instant::now();
                let ctx = LatticeContext::new(precision)?;
                let report = hecke::identity_checks(&d, &t, &ctx)?;
                let all_pass = CheckRow::all_pass(&report.rows);
                write_json(&cli.json, &report)?;
                print_rows(&report.rows);
                println!(
                    "identities over {} residues: {} in {:.2}s",
                    report.term_count,
                    if all_pass { "all pass" } else { "FAILURES" },
                    started.elapsed().as_secs_f64()
                );
                Ok(if all_pass { 0 } else { EXIT_VERIFY })
            }
            VerifySuite::Symbols { primes, class } => {
                let precision = resolve_precision(cli)?;
                let d = parse_d(primes, *class)?;
                let started = Instant::now();
                let rows = eisenstein::symbol_suite(&d)?;
                suite_outcome(
                    &cli.json,
                    precision,
                    "symbols",
                    Some(d.d().to_string()),
                    rows,
                    started,
                )
            }
        },
        Command::Valuation { primes, class } => {
            let d = parse_d(primes, *class)?;
            let started = Instant::now();
            let cert = valuation::certificate(&d)?;
            write_json(&cli.json, &cert)?;
            println!("D = {}  ({} primes)", d.d(), cert.n);
            println!(
                "residues = {}  (subset sums: {} zero, {} full)",
                cert.residue_count, cert.subset_zero_count, cert.subset_full_count
            );
            for line in &cert.lines {
                let tag = match line.status {
                    valuation::CertStatus::Proved => "PROVED ",
                    valuation::CertStatus::Assumed => "ASSUMED",
                };
                println!("[{tag}] {}", line.claim);
                println!("          {}", line.evidence);
            }
            println!(
                "certified bound: v2 >= {}  ({} proved, {} assumed lines) in {:.2}s",
                cert.bound,
                cert.proved_count(),
                cert.assumed_count(),
                started.elapsed().as_secs_f64()
            );
            Ok(0)
        }
    }
}
