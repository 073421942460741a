//! `fpt`: F-pure thresholds of quasi-homogeneous polynomials over F_p.

mod report;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fpt_core::basep::is_prime;
use fpt_core::candidates::{
    digit_minimality_filter, format_candidate_table, lambda_of, lambda_parts, main_candidates,
    two_variable_candidates,
};
use fpt_core::corpus::{cases, run_case, Report, Suite};
use fpt_core::fptengine::{
    filtered_candidates, fpt_exact, nu_sequence_graded, perturbation_report, FptOptions,
};
use fpt_core::gradedpoly::{check_homogeneous, GradedPolynomial, Grading, Polynomial};
use fpt_core::lct::{
    bad_density_lower_bound, density_csv, density_row, difference_bounds, is_certified_bad_prime,
    lct_of, primes_in_range, LctShape,
};
use fpt_core::rational::parse_rational;
use fpt_core::FptError;
use rayon::prelude::*;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "fpt",
    version,
    about = "F-pure thresholds of quasi-homogeneous polynomials over F_p"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact F-pure threshold, or the surviving candidates.
    Fpt {
        #[command(flatten)]
        poly: PolyArgs,
        /// Deepest level of nu_e computed before giving up.
        #[arg(long, default_value_t = 12)]
        e_cap: u32,
        #[arg(long)]
        json: bool,
    },
    /// nu_1, ..., nu_e.
    Nu {
        #[command(flatten)]
        poly: PolyArgs,
        #[arg(long, short = 'e', default_value_t = 3)]
        depth: u32,
        #[arg(long)]
        json: bool,
    },
    /// Candidate list for fpt given n and lambda.
    Candidates {
        #[arg(short = 'p', long = "prime")]
        primes: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        lambda: String,
        /// Apply only the digit-minimality filter to this depth instead of
        /// the full filter chain.
        #[arg(long)]
        depth: Option<u64>,
        #[arg(long)]
        json: bool,
    },
    /// Log canonical threshold and the bounds on lct - fpt.
    Lct {
        #[arg(long, value_delimiter = ',', required = true)]
        weights: Vec<u64>,
        #[arg(long)]
        deg: u64,
        #[arg(short = 'p', long = "prime")]
        primes: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Sweep a prime range for certified bad primes.
    BadPrimes {
        #[arg(short = 'p', long = "prime")]
        primes: String,
        /// lct as a/b; derived from the polynomial when omitted.
        #[arg(long)]
        lambda: Option<String>,
        #[arg(long, value_delimiter = ',')]
        weights: Option<Vec<u64>>,
        #[arg(long)]
        n: Option<usize>,
        /// Use the 1 - 1/d density bound.
        #[arg(long)]
        almost_cy: bool,
        #[arg(long, default_value_t = 12)]
        e_cap: u32,
        #[arg(long)]
        json: bool,
        /// Polynomial whose fpt is computed at every prime.
        poly: Option<String>,
    },
    /// Compare fpt(f) with fpt(f + g).
    Perturb {
        #[command(flatten)]
        poly: PolyArgs,
        #[arg(long)]
        g: String,
        #[arg(long, default_value_t = 12)]
        e_cap: u32,
        #[arg(long)]
        json: bool,
    },
    /// Run the built-in reproduction corpus.
    VerifyPaper {
        #[arg(long, value_enum, default_value_t = SuiteArg::Fast)]
        suite: SuiteArg,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct PolyArgs {
    /// A prime, or a range `lo..hi` / `lo-hi`.
    #[arg(short = 'p', long = "prime")]
    primes: String,
    #[arg(long, value_delimiter = ',')]
    weights: Option<Vec<u64>>,
    #[arg(long)]
    n: Option<usize>,
    poly: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Fast,
    Full,
}

impl SuiteArg {
    fn suite(self) -> Suite {
        match self {
            SuiteArg::Fast => Suite::Fast,
            SuiteArg::Full => Suite::Full,
        }
    }

    fn name(self) -> &'static str {
        match self {
            SuiteArg::Fast => "fast",
            SuiteArg::Full => "full",
        }
    }
}

enum Failure {
    Error(FptError),
    Mismatch,
}

impl From<FptError> for Failure {
    fn from(e: FptError) -> Self {
        Failure::Error(e)
    }
}

fn exit_code(e: &FptError) -> u8 {
    match e {
        FptError::Parse(_) => 2,
        FptError::Capacity(_) | FptError::InvariantViolation(_) => 1,
        _ => 3,
    }
}

/// Parses `p`, `lo..hi` or `lo-hi`. A single composite is rejected; ranges
/// expand to the primes they contain.
fn parse_primes(text: &str) -> Result<Vec<u64>, FptError> {
    let num = |s: &str| {
        s.trim()
            .parse::<u64>()
            .map_err(|_| FptError::Parse(format!("bad prime or range '{text}'")))
    };
    let split = text.split_once("..").or_else(|| text.split_once('-'));
    match split {
        Some((lo, hi)) => {
            let (lo, hi) = (num(lo)?, num(hi)?);
            if lo > hi {
                return Err(FptError::Parse(format!("empty range '{text}'")));
            }
            let primes = primes_in_range(lo, hi)?;
            if primes.is_empty() {
                return Err(FptError::Precondition(format!("no primes in {lo}..{hi}")));
            }
            Ok(primes)
        }
        None => {
            let p = num(text)?;
            if !is_prime(p) {
                return Err(FptError::NotPrime(p));
            }
            Ok(vec![p])
        }
    }
}

/// Number of variables implied by the names used: `x1 .. xn`, else `x, y, z`.
fn infer_nvars(text: &str) -> usize {
    let bytes = text.as_bytes();
    let mut indexed = 0usize;
    let mut letters = 0usize;
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'x' if bytes.get(i + 1).is_some_and(u8::is_ascii_digit) => {
                let start = i + 1;
                i = start;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                indexed = indexed.max(text[start..i].parse().unwrap_or(0));
                continue;
            }
            b'x' => letters = letters.max(1),
            b'y' => letters = letters.max(2),
            b'z' => letters = letters.max(3),
            _ => {}
        }
        i += 1;
    }
    if indexed > 0 {
        indexed.max(4)
    } else {
        letters.max(1)
    }
}

fn resolve_nvars(weights: Option<&[u64]>, n: Option<usize>, poly: &str) -> Result<usize, FptError> {
    match (weights, n) {
        (Some(w), Some(n)) if w.len() != n => Err(FptError::Dimension {
            expected: n,
            got: w.len(),
        }),
        (Some(w), _) => Ok(w.len()),
        (None, Some(n)) => Ok(n),
        (None, None) => Ok(infer_nvars(poly)),
    }
}

fn grading(weights: Option<&[u64]>, n: usize) -> Result<Grading, FptError> {
    match weights {
        Some(w) => Grading::new(w.to_vec()),
        None => Ok(Grading::standard(n)),
    }
}

struct PolyJob {
    text: String,
    n: usize,
    grading: Grading,
}

impl PolyJob {
    fn new(args: &PolyArgs) -> Result<Self, FptError> {
        let n = resolve_nvars(args.weights.as_deref(), args.n, &args.poly)?;
        let grading = grading(args.weights.as_deref(), n)?;
        Ok(PolyJob {
            text: args.poly.clone(),
            n,
            grading,
        })
    }

    fn at(&self, p: u64) -> Result<GradedPolynomial, FptError> {
        check_homogeneous(&Polynomial::parse(&self.text, p, self.n)?, &self.grading)
    }
}

/// Runs one job per prime in order, prints each result, and reports the
/// first failure.
fn per_prime<T: Send>(
    primes: &[u64],
    json: bool,
    job: impl Fn(u64) -> Result<T, FptError> + Sync,
    text: impl Fn(&T) -> String,
    to_json: impl Fn(&T) -> Value,
) -> Result<(), Failure> {
    let results: Vec<Result<T, FptError>> = primes.par_iter().map(|&p| job(p)).collect();
    let mut first_err = None;
    let mut values = Vec::new();
    for (p, r) in primes.iter().zip(results) {
        match r {
            Ok(v) if json => values.push(to_json(&v)),
            Ok(v) => println!("{}", text(&v)),
            Err(e) => {
                if primes.len() > 1 {
                    eprintln!("error at p = {p}: {e}");
                }
                if json {
                    values.push(json!({ "prime": p.to_string(), "error": e.to_string() }));
                }
                first_err.get_or_insert(e);
            }
        }
    }
    if json {
        let out = if primes.len() == 1 && values.len() == 1 {
            values.remove(0)
        } else {
            Value::Array(values)
        };
        println!(
            "{}",
            serde_json::to_string_pretty(&out).expect("serializable")
        );
    }
    match first_err {
        Some(e) => Err(e.into()),
        None => Ok(()),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Fpt { poly, e_cap, json } => {
            let job = PolyJob::new(&poly)?;
            let primes = parse_primes(&poly.primes)?;
            let opts = FptOptions {
                e_cap,
                ..FptOptions::default()
            };
            let weights = job.grading.weights().to_vec();
            per_prime(
                &primes,
                json,
                |p| fpt_exact(&job.at(p)?, &opts),
                report::fpt_text,
                |r| report::fpt_json(&job.text, &weights, r),
            )
        }
        Command::Nu { poly, depth, json } => {
            let job = PolyJob::new(&poly)?;
            let primes = parse_primes(&poly.primes)?;
            let weights = job.grading.weights().to_vec();
            per_prime(
                &primes,
                json,
                |p| {
                    let seq = nu_sequence_graded(&job.at(p)?, depth)?;
                    Ok((p, seq.iter().map(|r| r.nu()).collect::<Vec<_>>()))
                },
                |(p, nu)| report::nu_text(*p, nu),
                |(p, nu)| report::nu_json_obj(&job.text, &weights, *p, nu),
            )
        }
        Command::Candidates {
            primes,
            n,
            lambda,
            depth,
            json,
        } => {
            let lam = parse_rational(&lambda)?;
            let (a, b) = lambda_parts(&lam)?;
            let primes = parse_primes(&primes)?;
            per_prime(
                &primes,
                json,
                |p| {
                    let cands = match depth {
                        None => filtered_candidates(n, &lam, p)?,
                        Some(d) => {
                            let raw = if n == 2 {
                                two_variable_candidates(a, b, p)?
                            } else {
                                main_candidates(n, a, b, p)?
                            };
                            digit_minimality_filter(raw, p, d)?
                        }
                    };
                    Ok((p, cands))
                },
                |(p, c)| {
                    format!(
                        "p = {p}  n = {n}  lambda = {lam}\n{}",
                        format_candidate_table(c)
                    )
                },
                |(p, c)| {
                    json!({
                        "prime": p.to_string(),
                        "n": n.to_string(),
                        "lambda": report::frac(&lam),
                        "candidates": c.iter().map(report::candidate_json).collect::<Vec<_>>(),
                    })
                },
            )
        }
        Command::Lct {
            weights,
            deg,
            primes,
            json,
        } => {
            let g = Grading::new(weights.clone())?;
            let lct = lct_of(&g, deg)?;
            let (a, b) = lambda_parts(&lct)?;
            let n = weights.len();
            let Some(primes) = primes else {
                if json {
                    let out = json!({ "weights": report::weights_json(&weights), "deg": deg.to_string(), "lct": report::frac(&lct) });
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&out).expect("serializable")
                    );
                } else {
                    println!("lct = {lct}");
                }
                return Ok(());
            };
            let primes = parse_primes(&primes)?;
            per_prime(
                &primes,
                json,
                |p| {
                    if b % p == 0 {
                        return Ok((p, None, None));
                    }
                    let bounds = difference_bounds(n, a, b, p)?;
                    let bad = if a >= 2 {
                        Some(is_certified_bad_prime(a, b, p)?)
                    } else {
                        None
                    };
                    Ok((p, Some(bounds), bad))
                },
                |(p, bounds, bad)| {
                    let mut s = format!("p = {p}  lct = {lct}");
                    match bounds {
                        Some(bd) if bd.admits_difference() => s.push_str(&format!(
                            "  {} <= lct - fpt <= {} when fpt != lct",
                            bd.lower, bd.upper
                        )),
                        Some(_) => s.push_str("  fpt = lct"),
                        None => s.push_str("  p divides the denominator of lct"),
                    }
                    if let Some(bad) = bad {
                        s.push_str(&format!("  certified bad: {bad}"));
                    }
                    s
                },
                |(p, bounds, bad)| {
                    json!({
                        "prime": p.to_string(),
                        "weights": report::weights_json(&weights),
                        "deg": deg.to_string(),
                        "lct": report::frac(&lct),
                        "bounds": bounds.as_ref().map(report::bounds_json),
                        "certified_bad": bad,
                    })
                },
            )
        }
        Command::BadPrimes {
            primes,
            lambda,
            weights,
            n,
            almost_cy,
            e_cap,
            json,
            poly,
        } => {
            let primes = parse_primes(&primes)?;
            let job = match &poly {
                Some(text) => {
                    let n = resolve_nvars(weights.as_deref(), n, text)?;
                    let grading = grading(weights.as_deref(), n)?;
                    Some(PolyJob {
                        text: text.clone(),
                        n,
                        grading,
                    })
                }
                None => None,
            };
            let (lct, from_poly) = match (&lambda, &job) {
                (Some(l), _) => (parse_rational(l)?, None),
                (None, Some(job)) => {
                    let f = job.at(primes[0])?;
                    let standard = job.grading.weights().iter().all(|&w| w == 1);
                    (
                        lambda_of(f.grading(), f.degree())?,
                        Some((standard, f.nvars() as u64, f.degree())),
                    )
                }
                (None, None) => {
                    return Err(
                        FptError::Parse("bad-primes needs --lambda or a polynomial".into()).into(),
                    )
                }
            };
            let (a, b) = lambda_parts(&lct)?;
            let shape = match from_poly {
                _ if almost_cy => LctShape::AlmostCalabiYau,
                Some((true, n, d)) if n + 1 == d => LctShape::AlmostCalabiYau,
                _ => LctShape::General,
            };
            let opts = FptOptions {
                e_cap,
                ..FptOptions::default()
            };
            let rows: Vec<_> = primes
                .par_iter()
                .map(|&p| {
                    let fpt = match &job {
                        Some(job) => match job.at(p).and_then(|f| fpt_exact(&f, &opts)) {
                            Ok(r) => r.exact_value().cloned(),
                            Err(FptError::Precondition(msg)) => {
                                eprintln!("skipping fpt at p = {p}: {msg}");
                                None
                            }
                            Err(e) => return Err(e),
                        },
                        None => None,
                    };
                    density_row(a, b, p, fpt)
                })
                .collect::<Result<_, _>>()?;
            let bound = bad_density_lower_bound(a, b, shape)?;
            let certified = rows
                .iter()
                .filter(|r| r.certified_bad == Some(true))
                .count();
            let eligible = rows.iter().filter(|r| r.certified_bad.is_some()).count();
            if json {
                let out = json!({
                    "lct": report::frac(&lct),
                    "rows": rows.iter().map(|r| json!({
                        "prime": r.prime.to_string(),
                        "residue": r.residue.to_string(),
                        "certified_bad": r.certified_bad,
                        "fpt": r.fpt.as_ref().map(report::frac),
                        "difference": r.difference.as_ref().map(report::frac),
                    })).collect::<Vec<_>>(),
                    "certified": certified.to_string(),
                    "eligible": eligible.to_string(),
                    "density_lower_bound": report::frac(&bound),
                });
                println!(
                    "{}",
                    serde_json::to_string_pretty(&out).expect("serializable")
                );
            } else {
                print!("{}", density_csv(&rows));
                let frac = if eligible > 0 {
                    format!("{:.4}", certified as f64 / eligible as f64)
                } else {
                    "-".into()
                };
                println!("# certified bad: {certified} of {eligible} primes ({frac}); density lower bound {bound}");
            }
            Ok(())
        }
        Command::Perturb {
            poly,
            g,
            e_cap,
            json,
        } => {
            let job = PolyJob::new(&poly)?;
            let primes = parse_primes(&poly.primes)?;
            let opts = FptOptions {
                e_cap,
                ..FptOptions::default()
            };
            per_prime(
                &primes,
                json,
                |p| {
                    let gp = Polynomial::parse(&g, p, job.n)?;
                    Ok((p, perturbation_report(&job.at(p)?, &gp, &opts)?))
                },
                |(p, r)| report::perturb_text(*p, r),
                |(p, r)| report::perturb_json(&job.text, &g, *p, r),
            )
        }
        Command::VerifyPaper { suite, json } => {
            let checks: Vec<_> = cases(suite.suite())
                .par_iter()
                .flat_map_iter(run_case)
                .collect();
            let report = Report { checks };
            if json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&report::verify_json(suite.name(), &report))
                        .expect("serializable")
                );
            } else {
                print!("{report}");
            }
            if report.passed() {
                Ok(())
            } else {
                Err(Failure::Mismatch)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = std::env::var("FPT_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&t| t > 0);
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t);
    }
    let pool = builder.build().expect("thread pool");
    match pool.install(|| run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Mismatch) => ExitCode::from(1),
        Err(Failure::Error(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
