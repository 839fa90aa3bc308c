//! Parameter-scan driver.
//!
//! A [`ScanSpec`] names checkers and a (lambda, p, m, s) grid; the driver
//! expands it into independent jobs, runs them on a bounded worker pool
//! (checkers are pure, so any worker count yields the same record set), and
//! returns flattened [`ResultRecord`]s for the store.

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::congruence::{
    asd_check, aux_half_vanishing_check, beukers_kilbourn_check, cvh_check,
    deuring_check, dwork_fullsum_check, dwork_fullsum_m_independence_check, dwork_ratio_check,
    dwork_ratio_m_independence_check, f3_cm_check, f3_cm_conjecture_check, f3_ratio_check,
    harmonic_weighted_sum_check, hecke_recursion_check, partial_sum_product_check,
    set_guard_digits, sun_target_check, three_f2_cm_check, two_f1_supercong_check,
    twofone_ratio_check,
};
use crate::curves::cm_catalog;
use crate::hyperseries::{eta_2z4_4z4, eta_4z_6, eta_z3_7z3, EtaProductSpec};
use crate::padic::legendre_symbol_i64;
use crate::rational::Rational;
use crate::report::CongruenceReport;
use crate::store::ResultRecord;
use crate::ENGINE_VERSION;

/// Every checker the verify scan can drive.
pub const ALL_CHECKERS: &[&str] = &[
    "asd",
    "hecke_recursion",
    "dwork_ratio",
    "dwork_ratio_m",
    "dwork_fullsum",
    "dwork_fullsum_m",
    "twofone_ratio",
    "two_f1_supercong",
    "cvh",
    "three_f2_cm",
    "f3_cm",
    "f3_ratio",
    "f3_cm_conjecture",
    "sun_target",
    "partial_sum_product",
    "aux_half_vanishing",
    "harmonic_weighted_sum",
    "beukers_kilbourn",
    "deuring",
];

/// Hard cap on eta q-expansion length in scans.
const ETA_INDEX_CAP: u64 = 100_000;

#[derive(Clone, Debug)]
pub struct ScanSpec {
    pub checkers: Vec<String>,
    pub lambdas: Vec<Rational>,
    /// Inclusive prime range; only odd primes are kept after sieving.
    pub prime_range: (u64, u64),
    pub ms: Vec<u64>,
    pub s_max: u32,
    /// Guard-digit override past each claimed exponent.
    pub precision: Option<u32>,
    pub workers: usize,
}

impl Default for ScanSpec {
    fn default() -> Self {
        ScanSpec {
            checkers: vec!["all".to_string()],
            lambdas: Vec::new(),
            prime_range: (3, 3),
            ms: vec![1],
            s_max: 1,
            precision: None,
            workers: 1,
        }
    }
}

/// How a checker consumes the grid.
enum Grid {
    /// One job per (lambda, p).
    LambdaP,
    /// One job per (lambda, p, m, s); `odd_m` filters even m silently.
    LambdaPms { odd_m: bool },
    /// One job per p.
    POnly,
    /// One job per (p, m, s).
    Pms,
    /// One job per (lambda, p, s) with an (m1, m2) pair; needs two m values.
    MPair,
}

fn grid_of(checker: &str) -> Result<Grid, String> {
    Ok(match checker {
        "f3_cm" | "sun_target" | "aux_half_vanishing" | "partial_sum_product" | "deuring" => {
            Grid::LambdaP
        }
        "asd" => Grid::LambdaPms { odd_m: false },
        "dwork_fullsum" => Grid::LambdaPms { odd_m: false },
        "dwork_ratio" | "twofone_ratio" | "two_f1_supercong" | "cvh" | "three_f2_cm"
        | "f3_ratio" | "f3_cm_conjecture" => Grid::LambdaPms { odd_m: true },
        "dwork_ratio_m" | "dwork_fullsum_m" => Grid::MPair,
        "harmonic_weighted_sum" | "beukers_kilbourn" => Grid::POnly,
        "hecke_recursion" => Grid::Pms,
        other => return Err(format!("unknown checker: {other}")),
    })
}

#[derive(Clone)]
struct Job {
    checker: String,
    lambda: Option<Rational>,
    p: u64,
    m: u64,
    m2: Option<u64>,
    s: u32,
}

/// The eta products driven by the recursion checker, with their weights and
/// nebentypus values at p.
fn eta_forms() -> Vec<(&'static str, EtaProductSpec, u32, fn(u64) -> i64)> {
    fn chi_minus_four(p: u64) -> i64 {
        legendre_symbol_i64(-1, p) as i64
    }
    fn chi_seven(p: u64) -> i64 {
        if p % 7 == 0 {
            0
        } else {
            legendre_symbol_i64(p as i64, 7) as i64
        }
    }
    fn chi_trivial(p: u64) -> i64 {
        if p % 2 == 0 {
            0
        } else {
            1
        }
    }
    vec![
        ("eta_4z_6", eta_4z_6(), 3, chi_minus_four as fn(u64) -> i64),
        ("eta_z3_7z3", eta_z3_7z3(), 3, chi_seven),
        ("eta_2z4_4z4", eta_2z4_4z4(), 4, chi_trivial),
    ]
}

fn execute(job: &Job) -> Vec<CongruenceReport> {
    let lam = job.lambda.as_ref();
    match job.checker.as_str() {
        "asd" => vec![asd_check(lam.unwrap(), job.p, job.m, job.s)],
        "hecke_recursion" => {
            let needed = (job.m * job.p.pow(job.s + 1)).min(ETA_INDEX_CAP);
            eta_forms()
                .into_iter()
                .map(|(name, spec, weight, chi)| {
                    let coeffs: Vec<BigInt> = spec.coefficients(needed);
                    let mut report = hecke_recursion_check(
                        &coeffs,
                        job.p,
                        job.m,
                        job.s,
                        weight,
                        chi(job.p),
                    );
                    report.params.push(("form".to_string(), name.to_string()));
                    report
                })
                .collect()
        }
        "dwork_ratio" => [2u32, 3]
            .iter()
            .map(|&r| dwork_ratio_check(r, lam.unwrap(), job.p, job.m, job.s))
            .collect(),
        "dwork_ratio_m" => [2u32, 3]
            .iter()
            .map(|&r| {
                dwork_ratio_m_independence_check(
                    r,
                    lam.unwrap(),
                    job.p,
                    job.m,
                    job.m2.unwrap(),
                    job.s,
                )
            })
            .collect(),
        "dwork_fullsum" => [2u32, 3]
            .iter()
            .map(|&r| dwork_fullsum_check(r, lam.unwrap(), job.p, job.m, job.s))
            .collect(),
        "dwork_fullsum_m" => [2u32, 3]
            .iter()
            .map(|&r| {
                dwork_fullsum_m_independence_check(
                    r,
                    lam.unwrap(),
                    job.p,
                    job.m,
                    job.m2.unwrap(),
                    job.s,
                )
            })
            .collect(),
        "twofone_ratio" => [false, true]
            .iter()
            .map(|&plus| twofone_ratio_check(lam.unwrap(), job.p, job.m, job.s, plus))
            .collect(),
        "two_f1_supercong" => [false, true]
            .iter()
            .map(|&plus| two_f1_supercong_check(lam.unwrap(), job.p, job.m, job.s, plus))
            .collect(),
        "cvh" => vec![cvh_check(lam.unwrap(), job.p, job.m, job.s)],
        "three_f2_cm" => vec![three_f2_cm_check(lam.unwrap(), job.p, job.m, job.s)],
        "f3_cm" => vec![f3_cm_check(lam.unwrap(), job.p)],
        "f3_ratio" => vec![f3_ratio_check(lam.unwrap(), job.p, job.m, job.s)],
        "f3_cm_conjecture" => {
            vec![f3_cm_conjecture_check(lam.unwrap(), job.p, job.m, job.s)]
        }
        "sun_target" => vec![sun_target_check(lam.unwrap(), job.p)],
        "partial_sum_product" => [(job.p - 1) / 2, job.p - 1]
            .iter()
            .map(|&k| partial_sum_product_check(lam.unwrap(), job.p, k, job.m))
            .collect(),
        "aux_half_vanishing" => vec![aux_half_vanishing_check(lam.unwrap(), job.p)],
        "harmonic_weighted_sum" => vec![harmonic_weighted_sum_check(job.p)],
        "beukers_kilbourn" => [2u32, 3]
            .iter()
            .map(|&depth| beukers_kilbourn_check(job.p, depth))
            .collect(),
        "deuring" => [2u32, 3]
            .iter()
            .map(|&r| deuring_check(r, lam.unwrap(), job.p))
            .collect(),
        other => unreachable!("unknown checker {other}"),
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Odd primes in the inclusive range.
pub fn odd_primes(lo: u64, hi: u64) -> Vec<u64> {
    (lo.max(3)..=hi).filter(|&n| n % 2 == 1 && is_prime(n)).collect()
}

/// Parse an exact rational from a "num/den" (or plain integer) string.
pub fn parse_rational(text: &str) -> Result<Rational, String> {
    let parse_int = |part: &str, what: &str| -> Result<BigInt, String> {
        part.parse::<BigInt>()
            .map_err(|_| format!("invalid {what} in rational {text:?}: {part:?}"))
    };
    match text.split_once('/') {
        Some((num, den)) => {
            let num = parse_int(num, "numerator")?;
            let den = parse_int(den, "denominator")?;
            if den == BigInt::from(0) {
                return Err(format!("zero denominator in rational {text:?}"));
            }
            Ok(Rational::new(num, den))
        }
        None => Ok(Rational::from_integer(parse_int(text, "integer")?)),
    }
}

/// Expand a lambda argument list: each entry is a "num/den" string or the
/// literal "cm-catalog".
pub fn parse_lambdas(entries: &[String]) -> Result<Vec<Rational>, String> {
    let mut out = Vec::new();
    for entry in entries {
        if entry == "cm-catalog" {
            for member in cm_catalog() {
                if !out.contains(&member.lambda) {
                    out.push(member.lambda);
                }
            }
        } else {
            let lam = parse_rational(entry)?;
            if !out.contains(&lam) {
                out.push(lam);
            }
        }
    }
    Ok(out)
}

/// Parse an inclusive "A..B" prime range.
pub fn parse_prime_range(text: &str) -> Result<(u64, u64), String> {
    let (lo, hi) = text
        .split_once("..")
        .ok_or_else(|| format!("prime range must be A..B, got {text:?}"))?;
    let lo: u64 = lo
        .parse()
        .map_err(|_| format!("invalid range start {lo:?}"))?;
    let hi: u64 = hi
        .parse()
        .map_err(|_| format!("invalid range end {hi:?}"))?;
    Ok((lo, hi))
}

#[derive(Debug, Default)]
pub struct ScanOutcome {
    pub records: Vec<ResultRecord>,
    pub passes: usize,
    pub hard_failures: usize,
    pub conjectural_failures: usize,
    pub skips: usize,
}

fn expand_jobs(spec: &ScanSpec) -> Result<Vec<Job>, String> {
    let mut names: Vec<String> = Vec::new();
    for name in &spec.checkers {
        if name == "all" {
            names.extend(ALL_CHECKERS.iter().map(|s| s.to_string()));
        } else {
            names.push(name.clone());
        }
    }
    names.dedup();
    let primes = odd_primes(spec.prime_range.0, spec.prime_range.1);
    let mut jobs = Vec::new();
    for name in &names {
        let grid = grid_of(name)?;
        let needs_lambda = !matches!(grid, Grid::POnly | Grid::Pms);
        if needs_lambda && spec.lambdas.is_empty() {
            return Err(format!("checker {name} needs --lambda values"));
        }
        for &p in &primes {
            match grid {
                Grid::POnly => jobs.push(Job {
                    checker: name.clone(),
                    lambda: None,
                    p,
                    m: 1,
                    m2: None,
                    s: 1,
                }),
                Grid::Pms => {
                    for &m in &spec.ms {
                        for s in 1..=spec.s_max {
                            jobs.push(Job {
                                checker: name.clone(),
                                lambda: None,
                                p,
                                m,
                                m2: None,
                                s,
                            });
                        }
                    }
                }
                Grid::LambdaP => {
                    for lam in &spec.lambdas {
                        jobs.push(Job {
                            checker: name.clone(),
                            lambda: Some(lam.clone()),
                            p,
                            m: spec.ms.first().copied().unwrap_or(1),
                            m2: None,
                            s: 1,
                        });
                    }
                }
                Grid::LambdaPms { odd_m } => {
                    for lam in &spec.lambdas {
                        for &m in &spec.ms {
                            if odd_m && m % 2 == 0 {
                                continue;
                            }
                            for s in 1..=spec.s_max {
                                jobs.push(Job {
                                    checker: name.clone(),
                                    lambda: Some(lam.clone()),
                                    p,
                                    m,
                                    m2: None,
                                    s,
                                });
                            }
                        }
                    }
                }
                Grid::MPair => {
                    let odd: Vec<u64> =
                        spec.ms.iter().copied().filter(|m| m % 2 == 1).collect();
                    if odd.len() < 2 {
                        continue;
                    }
                    let (m1, m2) = (odd[0], odd[odd.len() - 1]);
                    for lam in &spec.lambdas {
                        for s in 1..=spec.s_max {
                            jobs.push(Job {
                                checker: name.clone(),
                                lambda: Some(lam.clone()),
                                p,
                                m: m1,
                                m2: Some(m2),
                                s,
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(jobs)
}

/// Run the scan; the returned record list is independent of the worker
/// count (jobs are pure and results are flattened in job order).
pub fn run_scan(spec: &ScanSpec) -> Result<ScanOutcome, String> {
    set_guard_digits(spec.precision);
    let jobs = expand_jobs(spec)?;
    let reports: Vec<Vec<CongruenceReport>> = if spec.workers <= 1 {
        jobs.iter().map(execute).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(spec.workers)
            .build()
            .map_err(|e| e.to_string())?;
        pool.install(|| jobs.par_iter().map(execute).collect())
    };
    set_guard_digits(None);
    let mut outcome = ScanOutcome::default();
    for report in reports.into_iter().flatten() {
        if report.skipped.is_some() {
            outcome.skips += 1;
        } else if report.pass {
            outcome.passes += 1;
        } else if report.conjectural {
            outcome.conjectural_failures += 1;
        } else {
            outcome.hard_failures += 1;
        }
        outcome.records.push(ResultRecord::new(report, ENGINE_VERSION));
    }
    Ok(outcome)
}
