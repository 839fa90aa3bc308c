//! Command-line front end: parameter scans, curve tables, formal-group
//! integrality reports, store export, and coefficient-hypothesis windows.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use supercong::congruence::dwork_hypotheses_check;
use supercong::curves::{count_points, unit_root, CurveId};
use supercong::formal::{group_law, hypergeometric_logarithm, integrality_report};
use supercong::scan::{
    odd_primes, parse_lambdas, parse_prime_range, parse_rational, run_scan, ScanSpec,
    ALL_CHECKERS,
};
use supercong::store::{ExportFormat, Store};
use supercong::ENGINE_VERSION;

/// Environment variable overriding the default store path.
const STORE_ENV: &str = "SUPERCONG_STORE";
const STORE_DEFAULT: &str = "supercong-records.txt";

#[derive(Parser)]
#[command(
    name = "supercong",
    version,
    about = "Exact verification of congruences for truncated hypergeometric series"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct StoreArgs {
    /// Record store path (falls back to $SUPERCONG_STORE, then ./supercong-records.txt).
    #[arg(long)]
    store: Option<PathBuf>,
}

impl StoreArgs {
    fn path(&self) -> PathBuf {
        self.store
            .clone()
            .or_else(|| std::env::var_os(STORE_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(STORE_DEFAULT))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run checkers over a (lambda, p, m, s) grid and persist the records.
    Verify {
        /// Checker names, or "all".
        #[arg(long = "checker", default_value = "all")]
        checkers: Vec<String>,
        /// Parameter values as exact "num/den" strings, or "cm-catalog".
        #[arg(long = "lambda", allow_hyphen_values = true)]
        lambdas: Vec<String>,
        /// Inclusive prime range "A..B" (sieved to odd primes).
        #[arg(long)]
        primes: String,
        /// Index multipliers m.
        #[arg(long = "m", default_value = "1")]
        ms: Vec<u64>,
        /// Largest prime-power level s.
        #[arg(long = "s-max", default_value_t = 1)]
        s_max: u32,
        /// Guard digits carried past each claimed exponent (default: per checker).
        #[arg(long)]
        precision: Option<u32>,
        /// Worker-pool size.
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Overwrite existing records even on the same engine version.
        #[arg(long)]
        force: bool,
        #[command(flatten)]
        store: StoreArgs,
    },
    /// Print point counts, traces, and unit roots for a curve family member.
    Curve {
        /// Parameter value as an exact "num/den" string.
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        /// Inclusive prime range "A..B".
        #[arg(long)]
        primes: String,
        /// Use the CM family y^2 = (x-1)(x^2 - 1/(1-lambda)) instead of the
        /// Legendre curve.
        #[arg(long)]
        cm: bool,
        /// Unit-root precision (digits of p).
        #[arg(long, default_value_t = 2)]
        precision: u32,
    },
    /// Build a formal group law from the hypergeometric logarithm and report
    /// coefficient integrality per prime.
    Formal {
        #[arg(long)]
        r: u32,
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        /// Total-degree cap for the group law.
        #[arg(long, default_value_t = 12)]
        degree: usize,
        #[arg(long)]
        primes: String,
    },
    /// Export stored records (sorted by key, timestamp excluded).
    Export {
        /// Output format: "csv" or "tabular".
        #[arg(long, default_value = "tabular")]
        format: String,
        /// Field filters "key=value" (checker, lambda, p, m, s, ...).
        #[arg(long = "where", allow_hyphen_values = true)]
        filters: Vec<String>,
        /// Print a defect-valuation histogram instead of rows.
        #[arg(long)]
        histogram: bool,
        #[command(flatten)]
        store: StoreArgs,
    },
    /// Check the three coefficient hypotheses behind the ratio argument on a
    /// finite window.
    Hypotheses {
        #[arg(long = "r", default_value = "2,3", value_delimiter = ',')]
        rs: Vec<u32>,
        #[arg(long)]
        primes: String,
        #[arg(long = "n-max", default_value_t = 60)]
        n_max: u64,
        #[arg(long = "m-max", default_value_t = 3)]
        m_max: u64,
        #[arg(long = "s-max", default_value_t = 2)]
        s_max: u32,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Verify {
            checkers,
            lambdas,
            primes,
            ms,
            s_max,
            precision,
            workers,
            force,
            store,
        } => cmd_verify(
            checkers, lambdas, primes, ms, s_max, precision, workers, force, &store,
        ),
        Command::Curve {
            lambda,
            primes,
            cm,
            precision,
        } => cmd_curve(&lambda, &primes, cm, precision),
        Command::Formal {
            r,
            lambda,
            degree,
            primes,
        } => cmd_formal(r, &lambda, degree, &primes),
        Command::Export {
            format,
            filters,
            histogram,
            store,
        } => cmd_export(&format, &filters, histogram, &store),
        Command::Hypotheses {
            rs,
            primes,
            n_max,
            m_max,
            s_max,
        } => cmd_hypotheses(&rs, &primes, n_max, m_max, s_max),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    checkers: Vec<String>,
    lambdas: Vec<String>,
    primes: String,
    ms: Vec<u64>,
    s_max: u32,
    precision: Option<u32>,
    workers: usize,
    force: bool,
    store_args: &StoreArgs,
) -> Result<ExitCode, String> {
    for name in &checkers {
        if name != "all" && !ALL_CHECKERS.contains(&name.as_str()) {
            return Err(format!(
                "unknown checker {name:?}; known: all, {}",
                ALL_CHECKERS.join(", ")
            ));
        }
    }
    let spec = ScanSpec {
        checkers,
        lambdas: parse_lambdas(&lambdas)?,
        prime_range: parse_prime_range(&primes)?,
        ms,
        s_max,
        precision,
        workers,
    };
    let outcome = run_scan(&spec)?;
    let store_path = store_args.path();
    let mut store = Store::open(&store_path).map_err(|e| e.to_string())?;
    let mut written = 0usize;
    for record in &outcome.records {
        if !record.report.pass || record.report.skipped.is_some() {
            println!("{}", record.report);
        }
        if store.insert(record.clone(), force) {
            written += 1;
        }
    }
    store.save().map_err(|e| e.to_string())?;
    println!(
        "verify: {} checked, {} passed, {} skipped, {} failed, {} conjecture evidence-failures",
        outcome.records.len(),
        outcome.passes,
        outcome.skips,
        outcome.hard_failures,
        outcome.conjectural_failures
    );
    println!(
        "store: {} of {} records written to {} (engine {})",
        written,
        outcome.records.len(),
        store_path.display(),
        ENGINE_VERSION
    );
    if outcome.conjectural_failures > 0 {
        println!(
            "CONJECTURE EVIDENCE: {} instance(s) fell short of the conjectured exponent (exit stays 0)",
            outcome.conjectural_failures
        );
    }
    if outcome.hard_failures > 0 {
        println!("FAILURE: {} theorem-backed check(s) failed", outcome.hard_failures);
        return Ok(ExitCode::FAILURE);
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_curve(lambda: &str, primes: &str, cm: bool, precision: u32) -> Result<ExitCode, String> {
    let lam = parse_rational(lambda)?;
    let (lo, hi) = parse_prime_range(primes)?;
    let curve = if cm {
        CurveId::cm(lam.clone())
    } else {
        CurveId::legendre(lam.clone())
    };
    println!("p  count  trace  type  unit_root (mod p^{precision})");
    for p in odd_primes(lo, hi) {
        match count_points(&curve, p) {
            Ok(data) => {
                let kind = if data.ordinary { "ordinary" } else { "supersingular" };
                let root = if data.ordinary {
                    unit_root(&curve, p, precision)
                        .map(|u| u.residue().to_string())
                        .unwrap_or_else(|_| "-".to_string())
                } else {
                    "-".to_string()
                };
                println!("{p}  {}  {}  {kind}  {root}", data.count, data.trace);
            }
            Err(_) => println!("{p}  -  -  bad-reduction  -"),
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_formal(r: u32, lambda: &str, degree: usize, primes: &str) -> Result<ExitCode, String> {
    let lam = parse_rational(lambda)?;
    let (lo, hi) = parse_prime_range(primes)?;
    let log = hypergeometric_logarithm(r, &lam, degree);
    let law = group_law(&log, degree).map_err(|e| format!("group law: {e:?}"))?;
    println!("r={r} lambda={lam} degree<={degree}");
    println!("p  min_valuation  verdict");
    let mut failures = 0usize;
    for p in odd_primes(lo, hi) {
        let report = integrality_report(&law, p);
        let verdict = if report.pass() {
            "integral".to_string()
        } else {
            failures += 1;
            match report.offending {
                Some((i, j)) => format!("NOT integral at x^{i} y^{j}"),
                None => "NOT integral".to_string(),
            }
        };
        println!("{p}  {}  {verdict}", report.min_valuation);
    }
    if failures > 0 {
        return Ok(ExitCode::FAILURE);
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_export(
    format: &str,
    filters: &[String],
    histogram: bool,
    store_args: &StoreArgs,
) -> Result<ExitCode, String> {
    let format = match format {
        "csv" => ExportFormat::CommaSeparated,
        "tabular" => ExportFormat::TabularText,
        other => return Err(format!("unknown format {other:?} (csv, tabular)")),
    };
    let mut parsed = Vec::new();
    for filter in filters {
        let (k, v) = filter
            .split_once('=')
            .ok_or_else(|| format!("filter must be key=value, got {filter:?}"))?;
        parsed.push((k.to_string(), v.to_string()));
    }
    let store = Store::open(&store_args.path()).map_err(|e| e.to_string())?;
    if histogram {
        println!("defect,count");
        for (defect, count) in store.defect_histogram(&parsed) {
            println!("{defect},{count}");
        }
    } else {
        print!("{}", store.export(&parsed, format));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_hypotheses(
    rs: &[u32],
    primes: &str,
    n_max: u64,
    m_max: u64,
    s_max: u32,
) -> Result<ExitCode, String> {
    let (lo, hi) = parse_prime_range(primes)?;
    let mut failures = 0usize;
    println!("r  p  a  b  c");
    for &r in rs {
        for p in odd_primes(lo, hi) {
            let report = dwork_hypotheses_check(r, p, n_max, m_max, s_max);
            if !report.pass() {
                failures += 1;
            }
            println!(
                "{r}  {p}  {}  {}  {}",
                report.hyp_a, report.hyp_b, report.hyp_c
            );
        }
    }
    if failures > 0 {
        println!("FAILURE: {failures} window(s) violated a hypothesis");
        return Ok(ExitCode::FAILURE);
    }
    Ok(ExitCode::SUCCESS)
}
