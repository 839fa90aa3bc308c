//! Outcome records shared by every checker.

use std::fmt;

/// A p-adic valuation that may be infinite (the valuation of zero).
///
/// When a value is only known modulo `p^C`, a residue of zero is reported as
/// `Infinite` and the working precision `C` is recorded alongside in the
/// surrounding report; the honest reading is "at least C".
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ValuationResult {
    Finite(i64),
    Infinite,
}

impl ValuationResult {
    pub fn is_at_least(self, bound: i64) -> bool {
        match self {
            ValuationResult::Infinite => true,
            ValuationResult::Finite(v) => v >= bound,
        }
    }

    pub fn finite(self) -> Option<i64> {
        match self {
            ValuationResult::Finite(v) => Some(v),
            ValuationResult::Infinite => None,
        }
    }

    /// min of two valuations (Infinite is the top element).
    pub fn min(self, other: ValuationResult) -> ValuationResult {
        match (self, other) {
            (ValuationResult::Infinite, o) => o,
            (s, ValuationResult::Infinite) => s,
            (ValuationResult::Finite(a), ValuationResult::Finite(b)) => {
                ValuationResult::Finite(a.min(b))
            }
        }
    }

    pub fn plus(self, delta: i64) -> ValuationResult {
        match self {
            ValuationResult::Infinite => ValuationResult::Infinite,
            ValuationResult::Finite(v) => ValuationResult::Finite(v + delta),
        }
    }
}

impl fmt::Display for ValuationResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValuationResult::Infinite => write!(f, "inf"),
            ValuationResult::Finite(v) => write!(f, "{v}"),
        }
    }
}

/// What a checker claims about the defect.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Claim {
    /// Defect must vanish modulo `p^k`.
    ModPk(u32),
    /// Defect must be exactly zero (integer recursions).
    Exact,
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Claim::ModPk(k) => write!(f, "{k}"),
            Claim::Exact => write!(f, "exact"),
        }
    }
}

/// Why a checker declined to run on a parameter tuple.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SkipReason {
    BadReduction,
    Supersingular,
    DegenerateLambda,
    NotAUnit,
    NotOrdinary,
    NotPIntegral,
    PTooSmall,
    TooLarge,
    IndexOutOfRange,
}

impl fmt::Display for SkipReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SkipReason::BadReduction => "BadReduction",
            SkipReason::Supersingular => "Supersingular",
            SkipReason::DegenerateLambda => "DegenerateLambda",
            SkipReason::NotAUnit => "NotAUnit",
            SkipReason::NotOrdinary => "NotOrdinary",
            SkipReason::NotPIntegral => "NotPIntegral",
            SkipReason::PTooSmall => "PTooSmall",
            SkipReason::TooLarge => "TooLarge",
            SkipReason::IndexOutOfRange => "IndexOutOfRange",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for SkipReason {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        Ok(match s {
            "BadReduction" => SkipReason::BadReduction,
            "Supersingular" => SkipReason::Supersingular,
            "DegenerateLambda" => SkipReason::DegenerateLambda,
            "NotAUnit" => SkipReason::NotAUnit,
            "NotOrdinary" => SkipReason::NotOrdinary,
            "NotPIntegral" => SkipReason::NotPIntegral,
            "PTooSmall" => SkipReason::PTooSmall,
            "TooLarge" => SkipReason::TooLarge,
            "IndexOutOfRange" => SkipReason::IndexOutOfRange,
            _ => return Err(()),
        })
    }
}

/// One checker outcome: claimed modulus exponent, observed defect valuation,
/// pass/fail, and the parameter context.
#[derive(Clone, Debug)]
pub struct CongruenceReport {
    pub checker: String,
    /// Ordered (key, value) context: lambda, p, m, s, r, ...
    pub params: Vec<(String, String)>,
    pub claim: Claim,
    pub observed_defect: ValuationResult,
    /// Working precision when the defect was measured modularly.
    pub working_precision: Option<u32>,
    pub pass: bool,
    pub skipped: Option<SkipReason>,
    /// Conjecture-backed claims are evidence, never test failures.
    pub conjectural: bool,
}

impl CongruenceReport {
    /// A concluded (non-skipped) report; `pass` is derived, never hand-set.
    pub fn concluded(
        checker: &str,
        params: Vec<(String, String)>,
        claim: Claim,
        observed: ValuationResult,
        working_precision: Option<u32>,
    ) -> Self {
        let pass = match claim {
            Claim::ModPk(k) => observed.is_at_least(k as i64),
            Claim::Exact => observed == ValuationResult::Infinite && working_precision.is_none(),
        };
        CongruenceReport {
            checker: checker.to_string(),
            params,
            claim,
            observed_defect: observed,
            working_precision,
            pass,
            skipped: None,
            conjectural: false,
        }
    }

    pub fn skipped(checker: &str, params: Vec<(String, String)>, reason: SkipReason) -> Self {
        CongruenceReport {
            checker: checker.to_string(),
            params,
            claim: Claim::ModPk(0),
            observed_defect: ValuationResult::Infinite,
            working_precision: None,
            pass: true,
            skipped: Some(reason),
            conjectural: false,
        }
    }

    pub fn conjectural(mut self) -> Self {
        self.conjectural = true;
        self
    }

    pub fn param(&self, key: &str) -> Option<&str> {
        self.params
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    /// True when this report should make a verification run fail.
    pub fn is_hard_failure(&self) -> bool {
        !self.pass && self.skipped.is_none() && !self.conjectural
    }
}

impl fmt::Display for CongruenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.checker)?;
        for (k, v) in &self.params {
            write!(f, " {k}={v}")?;
        }
        if let Some(reason) = self.skipped {
            return write!(f, " skipped={reason}");
        }
        write!(
            f,
            " claimed={} observed={} {}",
            self.claim,
            self.observed_defect,
            if self.pass { "pass" } else { "FAIL" }
        )
    }
}

pub fn param_list(pairs: &[(&str, String)]) -> Vec<(String, String)> {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect()
}
