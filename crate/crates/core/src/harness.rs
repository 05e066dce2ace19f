//! Verdict tables, sharp-constant search and report output.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bvfunction::{crossing_points, CumulativeFunction};
use crate::catalog::{make_weight, CatalogError, FunctionalSpec};
use crate::convex_order::{classify, levin_stechkin_compare, ohlin_compare, witness_functions, OhlinDirection, OrderError, RelationKind, Verdict, WitnessPair};
use crate::polynomial::Sign;
use crate::quadrature::{random_convex, stieltjes_numeric, QuadratureError};
use crate::rational::{format_rational, int, parse_rational, rat, simplest_between, to_f64, Rational};

/// Number of points in a sampled `G(x)` curve.
pub const GAP_SAMPLES: usize = 1024;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("no bracket: predicate is {holds} at both {lo} and {hi}")]
    NoBracket { lo: Rational, hi: Rational, holds: bool },
    #[error("invalid search interval [{lo}, {hi}] with tolerance {tol}")]
    InvalidInterval { lo: Rational, hi: Rational, tol: Rational },
    #[error("tolerance must be positive and finite, got {0}")]
    Tolerance(f64),
    #[error("invalid number: {0}")]
    Number(String),
    #[error("invalid family '{0}'")]
    Family(String),
    #[error("grid must be non-empty and strictly increasing")]
    Grid,
    #[error("unknown direction '{0}', expected LE or GE")]
    Direction(String),
    #[error("unknown format '{0}', expected text, csv or json")]
    Format(String),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Order(#[from] OrderError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Which side of the comparison must hold for all convex `f`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    /// `family ≤ target`
    #[serde(rename = "LE")]
    Le,
    /// `family ≥ target`
    #[serde(rename = "GE")]
    Ge,
}

impl Direction {
    pub fn holds(self, verdict: &Verdict) -> bool {
        self.holds_kind(verdict.kind())
    }

    pub fn holds_kind(self, kind: RelationKind) -> bool {
        match (self, kind) {
            (_, RelationKind::Equal) => true,
            (Direction::Le, RelationKind::LessOrEqual) | (Direction::Ge, RelationKind::GreaterOrEqual) => true,
            _ => false,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Le => "LE",
            Direction::Ge => "GE",
        })
    }
}

impl FromStr for Direction {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "LE" | "<=" => Ok(Direction::Le),
            "GE" | ">=" => Ok(Direction::Ge),
            _ => Err(HarnessError::Direction(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" => Ok(Format::Text),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(HarnessError::Format(s.to_string())),
        }
    }
}

/// A one-parameter family of functionals.
///
/// Named families: `T`, `S1`, `S2`, `evalat`, `endpoints`, `lambda-mix`
/// (`λ·davg + (1-λ)·trap`), `gamma-mix` (`γ·uniform + (1-γ)·mid`) and
/// `three-point` (`2a·trap + (1-2a)·mid`). Anything else is a spec template
/// where `1-$` and `$` are replaced by the parameter.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Family(String);

impl Family {
    pub fn new(text: &str) -> Result<Self, HarnessError> {
        let fam = Family(text.trim().to_string());
        // a constant target is a template without `$`; check it parses
        if !fam.is_named() && !fam.0.contains('$') {
            fam.0
                .parse::<FunctionalSpec>()
                .map_err(|_| HarnessError::Family(text.to_string()))?;
        }
        Ok(fam)
    }

    pub fn constant(spec: &FunctionalSpec) -> Self {
        Family(spec.to_string())
    }

    fn is_named(&self) -> bool {
        matches!(
            self.0.as_str(),
            "T" | "S1" | "S2" | "evalat" | "endpoints" | "lambda-mix" | "gamma-mix" | "three-point"
        )
    }

    pub fn at(&self, p: &Rational) -> Result<FunctionalSpec, HarnessError> {
        let one = Rational::one();
        let spec = match self.0.as_str() {
            "T" => FunctionalSpec::T { a: p.clone() },
            "S1" => FunctionalSpec::S1 { alpha: p.clone() },
            "S2" => FunctionalSpec::S2 { alpha: p.clone() },
            "evalat" => FunctionalSpec::EvalAt { alpha: p.clone() },
            "endpoints" => FunctionalSpec::Endpoints { alpha: p.clone() },
            "lambda-mix" => FunctionalSpec::mixture(vec![
                (p.clone(), FunctionalSpec::DoubleAverage),
                (&one - p, FunctionalSpec::Trapezoid),
            ]),
            "gamma-mix" => FunctionalSpec::mixture(vec![
                (p.clone(), FunctionalSpec::Uniform),
                (&one - p, FunctionalSpec::Midpoint),
            ]),
            "three-point" => {
                let two_a = p * int(2);
                FunctionalSpec::mixture(vec![
                    (two_a.clone(), FunctionalSpec::Trapezoid),
                    (&one - two_a, FunctionalSpec::Midpoint),
                ])
            }
            template => {
                let text = template
                    .replace("1-$", &format_rational(&(&one - p)))
                    .replace('$', &format_rational(p));
                text.parse::<FunctionalSpec>()
                    .map_err(|e| HarnessError::Family(format!("{template}: {e}")))?
            }
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for Family {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Family::new(s)
    }
}

/// Weights for two specs and the exact verdict between them.
pub fn compare_specs(left: &FunctionalSpec, right: &FunctionalSpec) -> Result<(CumulativeFunction, CumulativeFunction, Verdict), HarnessError> {
    let f1 = make_weight(left)?;
    let f2 = make_weight(right)?;
    let v = levin_stechkin_compare(&f1, &f2);
    Ok((f1, f2, v))
}

/// Full comparison of two functionals, as printed by the `compare` command.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Comparison {
    pub left: String,
    pub right: String,
    pub verdict: Verdict,
    pub crossings: usize,
    /// Single-crossing verdict, when both weights are distribution functions
    /// with equal means and cross exactly once.
    pub single_crossing: Option<OhlinDirection>,
    pub witnesses: Option<WitnessPair>,
}

pub fn compare(left: &FunctionalSpec, right: &FunctionalSpec) -> Result<Comparison, HarnessError> {
    let (f1, f2, verdict) = compare_specs(left, right)?;
    let witnesses = match verdict.kind() {
        RelationKind::Incomparable => Some(witness_functions(&f1, &f2, &verdict)?),
        _ => None,
    };
    let single_crossing = ohlin_compare(&f1, &f2).ok().flatten();
    Ok(Comparison {
        left: left.to_string(),
        right: right.to_string(),
        crossings: crossing_points(&f1, &f2).len(),
        single_crossing,
        verdict,
        witnesses,
    })
}

/// Outcome of a flip search on `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bracket {
    #[serde(with = "crate::rational::serde_rational")]
    pub lo: Rational,
    #[serde(with = "crate::rational::serde_rational")]
    pub hi: Rational,
    /// Predicate value at `lo`; the opposite value holds at `hi`.
    pub holds_at_lo: bool,
    /// The flip point, when it was identified as a simple rational.
    #[serde(with = "crate::rational::serde_rational::option")]
    pub exact: Option<Rational>,
}

impl Bracket {
    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }
}

fn simplest_in_closed(lo: &Rational, hi: &Rational) -> Rational {
    let mut best = if lo < hi { simplest_between(lo, hi) } else { lo.clone() };
    for end in [lo, hi] {
        let better = end.denom() < best.denom() || (end.denom() == best.denom() && end.numer().abs() < best.numer().abs());
        if better {
            best = end.clone();
        }
    }
    best
}

/// Bisects a predicate that holds at one endpoint and fails at the other
/// down to a bracket of width `≤ tol`.
///
/// The simplest rational `r` in the final bracket is reported as exact when
/// its denominator is at most `width^(-1/4)` and the predicate flips between
/// `r` and a point `tol·2^-20` away; the bracket then has `r` as an endpoint.
/// Both bracket endpoints are evaluated directly, never inferred.
pub fn bisect_flip<P>(mut pred: P, lo: &Rational, hi: &Rational, tol: &Rational) -> Result<Bracket, HarnessError>
where
    P: FnMut(&Rational) -> Result<bool, HarnessError>,
{
    if lo >= hi || !tol.is_positive() {
        return Err(HarnessError::InvalidInterval {
            lo: lo.clone(),
            hi: hi.clone(),
            tol: tol.clone(),
        });
    }
    let at_lo = pred(lo)?;
    let at_hi = pred(hi)?;
    if at_lo == at_hi {
        return Err(HarnessError::NoBracket {
            lo: lo.clone(),
            hi: hi.clone(),
            holds: at_lo,
        });
    }
    let (mut a, mut b) = (lo.clone(), hi.clone());
    while &b - &a > *tol {
        let m = (&a + &b) / int(2);
        if pred(&m)? == at_lo {
            a = m;
        } else {
            b = m;
        }
    }
    let width = &b - &a;
    let r = simplest_in_closed(&a, &b);
    let limit = to_f64(&width).powf(-0.25);
    if (r.denom().bits() as f64) < 64.0 && to_f64(&Rational::from(r.denom().clone())) <= limit {
        let eta = tol / Rational::from_integer(num_bigint::BigInt::from(1u64 << 20));
        let at_r = pred(&r)?;
        let (nlo, nhi) = if at_r == at_lo { (r.clone(), &r + &eta) } else { (&r - &eta, r.clone()) };
        let inside = &nlo >= lo && &nhi <= hi;
        if inside && pred(&nlo)? == at_lo && pred(&nhi)? != at_lo {
            return Ok(Bracket {
                lo: nlo,
                hi: nhi,
                holds_at_lo: at_lo,
                exact: Some(r),
            });
        }
    }
    Ok(Bracket {
        lo: a,
        hi: b,
        holds_at_lo: at_lo,
        exact: None,
    })
}

/// A threshold search on exact verdicts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdResult {
    pub family: String,
    pub target: String,
    pub direction: Direction,
    pub bracket: Bracket,
    pub verdict_lo: RelationKind,
    pub verdict_hi: RelationKind,
}

/// Finds where `family(p) <direction> target(p)` switches between holding
/// for all convex `f` and failing. The target may itself depend on `p`.
pub fn find_threshold(
    family: &Family,
    target: &Family,
    direction: Direction,
    lo: &Rational,
    hi: &Rational,
    tol: &Rational,
) -> Result<ThresholdResult, HarnessError> {
    let kind = |p: &Rational| -> Result<RelationKind, HarnessError> {
        Ok(classify(&make_weight(&family.at(p)?)?, &make_weight(&target.at(p)?)?))
    };
    let bracket = bisect_flip(|p| Ok(direction.holds_kind(kind(p)?)), lo, hi, tol)?;
    // re-verify both ends with the full comparison
    let (_, _, verdict_lo) = compare_specs(&family.at(&bracket.lo)?, &target.at(&bracket.lo)?)?;
    let (_, _, verdict_hi) = compare_specs(&family.at(&bracket.hi)?, &target.at(&bracket.hi)?)?;
    debug_assert_ne!(direction.holds(&verdict_lo), direction.holds(&verdict_hi));
    Ok(ThresholdResult {
        family: family.to_string(),
        target: target.to_string(),
        direction,
        verdict_lo: verdict_lo.kind(),
        verdict_hi: verdict_hi.kind(),
        bracket,
    })
}

/// Sign change of the second-moment gap `∫t² dS2_α - ∫t² dEvalAt_α`.
pub fn moment_flip(lo: &Rational, hi: &Rational, tol: &Rational) -> Result<Bracket, HarnessError> {
    bisect_flip(
        |a| {
            let s2 = make_weight(&FunctionalSpec::S2 { alpha: a.clone() })?;
            let ev = make_weight(&FunctionalSpec::EvalAt { alpha: a.clone() })?;
            Ok(s2.moment(2) >= ev.moment(2))
        },
        lo,
        hi,
        tol,
    )
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegimeRow {
    #[serde(with = "crate::rational::serde_rational")]
    pub parameter: Rational,
    pub target: String,
    pub verdict: Verdict,
    pub witnesses: Option<WitnessPair>,
}

/// Adjacent grid points where the verdict against `target` changes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegimeChange {
    pub target: String,
    #[serde(with = "crate::rational::serde_rational")]
    pub lo: Rational,
    #[serde(with = "crate::rational::serde_rational")]
    pub hi: Rational,
    pub verdict_lo: RelationKind,
    pub verdict_hi: RelationKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub family: String,
    #[serde(with = "crate::rational::serde_rational::vec")]
    pub grid: Vec<Rational>,
    pub targets: Vec<String>,
    /// Grid-major, targets in the given order.
    pub rows: Vec<RegimeRow>,
    pub changes: Vec<RegimeChange>,
}

pub fn regime_report(family: &Family, grid: &[Rational], targets: &[FunctionalSpec]) -> Result<RegimeReport, HarnessError> {
    if grid.is_empty() || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(HarnessError::Grid);
    }
    let mut rows = Vec::with_capacity(grid.len() * targets.len());
    for p in grid {
        let spec = family.at(p)?;
        for target in targets {
            let c = compare(&spec, target)?;
            rows.push(RegimeRow {
                parameter: p.clone(),
                target: target.to_string(),
                verdict: c.verdict,
                witnesses: c.witnesses,
            });
        }
    }
    let mut changes = Vec::new();
    for (j, target) in targets.iter().enumerate() {
        for i in 1..grid.len() {
            let a = &rows[(i - 1) * targets.len() + j];
            let b = &rows[i * targets.len() + j];
            if a.verdict.kind() != b.verdict.kind() {
                changes.push(RegimeChange {
                    target: target.to_string(),
                    lo: a.parameter.clone(),
                    hi: b.parameter.clone(),
                    verdict_lo: a.verdict.kind(),
                    verdict_hi: b.verdict.kind(),
                });
            }
        }
    }
    Ok(RegimeReport {
        family: family.to_string(),
        grid: grid.to_vec(),
        targets: targets.iter().map(|t| t.to_string()).collect(),
        rows,
        changes,
    })
}

/// The grid and targets of the `T_a` table.
pub fn t_family_table() -> Result<RegimeReport, HarnessError> {
    let grid: Vec<Rational> = [-10, -6, -2, 0, 1, 2, 4, 6, 8].iter().map(|&a| int(a)).collect();
    let targets = [FunctionalSpec::Uniform, FunctionalSpec::Midpoint, FunctionalSpec::Trapezoid];
    regime_report(&Family("T".into()), &grid, &targets)
}

/// One verdict claim: `left` relates to `right` as `expected`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClaimResult {
    pub id: String,
    pub left: String,
    pub right: String,
    pub expected: RelationKind,
    pub computed: RelationKind,
    pub gap_sign: Sign,
    pub pass: bool,
    pub witnesses: Option<WitnessPair>,
}

/// One sharp-constant claim.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdClaim {
    pub id: String,
    #[serde(with = "crate::rational::serde_rational")]
    pub expected: Rational,
    pub result: ThresholdResult,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub claims: Vec<ClaimResult>,
    pub thresholds: Vec<ThresholdClaim>,
}

impl SuiteResult {
    pub fn all_pass(&self) -> bool {
        self.claims.iter().all(|c| c.pass) && self.thresholds.iter().all(|t| t.pass)
    }

    pub fn failures(&self) -> usize {
        self.claims.iter().filter(|c| !c.pass).count() + self.thresholds.iter().filter(|t| !t.pass).count()
    }
}

struct ClaimSpec {
    id: String,
    left: FunctionalSpec,
    right: FunctionalSpec,
    expected: RelationKind,
}

fn claim_list() -> Vec<ClaimSpec> {
    use FunctionalSpec as S;
    use RelationKind::*;
    let mut out = Vec::new();
    let mut push = |id: String, left: S, right: S, expected: RelationKind| {
        out.push(ClaimSpec {
            id,
            left,
            right,
            expected,
        })
    };

    for a in [-10, -6, -2, 0, 1, 2, 4, 6, 8] {
        let t = S::T { a: int(a) };
        let mean = match a {
            0 => Equal,
            a if a > 0 => LessOrEqual,
            _ => GreaterOrEqual,
        };
        let mid = match a {
            a if a <= 2 => GreaterOrEqual,
            a if a >= 6 => LessOrEqual,
            _ => Incomparable,
        };
        let trap = if a >= -6 { LessOrEqual } else { Incomparable };
        push(format!("T-family/uniform/a={a}"), t.clone(), S::Uniform, mean);
        push(format!("T-family/midpoint/a={a}"), t.clone(), S::Midpoint, mid);
        push(format!("T-family/trapezoid/a={a}"), t, S::Trapezoid, trap);
    }

    push("classic/midpoint-uniform".into(), S::Midpoint, S::Uniform, LessOrEqual);
    push("classic/uniform-trapezoid".into(), S::Uniform, S::Trapezoid, LessOrEqual);
    push("double-average/uniform".into(), S::DoubleAverage, S::Uniform, LessOrEqual);
    push("double-average/midpoint".into(), S::DoubleAverage, S::Midpoint, GreaterOrEqual);
    push(
        "critical/lower".into(),
        S::DoubleAverage,
        S::mixture(vec![(rat(2, 3), S::Uniform), (rat(1, 3), S::Midpoint)]),
        LessOrEqual,
    );
    push(
        "critical/upper".into(),
        S::Uniform,
        S::mixture(vec![(rat(3, 4), S::DoubleAverage), (rat(1, 4), S::Trapezoid)]),
        LessOrEqual,
    );
    push("three-point/simpson".into(), S::DoubleAverage, S::SimpsonLike, LessOrEqual);
    push("composite-quarter/uniform".into(), S::CompositeQuarter, S::Uniform, LessOrEqual);

    let tenths: Vec<Rational> = (1..=9).map(|k| rat(k, 10)).collect();
    for alpha in [rat(1, 10), rat(1, 4), rat(1, 2), rat(3, 4), rat(9, 10)] {
        let s = format_rational(&alpha);
        let s1 = S::S1 { alpha: alpha.clone() };
        push(format!("S1/evalat/alpha={s}"), S::EvalAt { alpha: alpha.clone() }, s1.clone(), LessOrEqual);
        push(format!("S1/endpoints/alpha={s}"), s1, S::Endpoints { alpha }, LessOrEqual);
    }
    for alpha in &tenths {
        push(
            format!("S2/endpoints/alpha={}", format_rational(alpha)),
            S::S2 { alpha: alpha.clone() },
            S::Endpoints { alpha: alpha.clone() },
            LessOrEqual,
        );
    }
    let inside = [rat(1, 3), rat(2, 5), rat(1, 2), rat(3, 5), rat(2, 3)];
    let outside = [rat(1, 10), rat(1, 5), rat(4, 5), rat(9, 10)];
    for (alphas, expected) in [(&inside[..], LessOrEqual), (&outside[..], Incomparable)] {
        for alpha in alphas {
            push(
                format!("S2/evalat/alpha={}", format_rational(alpha)),
                S::EvalAt { alpha: alpha.clone() },
                S::S2 { alpha: alpha.clone() },
                expected,
            );
        }
    }
    let comparable = [rat(1, 10), rat(1, 3), rat(2, 3), rat(9, 10)];
    let incomparable = [rat(2, 5), rat(3, 5)];
    for (alphas, expected) in [(&comparable[..], LessOrEqual), (&incomparable[..], Incomparable)] {
        for alpha in alphas {
            push(
                format!("S2/S1/alpha={}", format_rational(alpha)),
                S::S2 { alpha: alpha.clone() },
                S::S1 { alpha: alpha.clone() },
                expected,
            );
        }
    }
    out
}

struct ThresholdSpec {
    id: &'static str,
    family: &'static str,
    target: &'static str,
    direction: Direction,
    lo: Rational,
    hi: Rational,
    expected: Rational,
}

fn threshold_list() -> Vec<ThresholdSpec> {
    let t = |id, family, target, direction, lo: Rational, hi: Rational, expected: Rational| ThresholdSpec {
        id,
        family,
        target,
        direction,
        lo,
        hi,
        expected,
    };
    vec![
        t("T-family/midpoint/lower", "T", "midpoint", Direction::Ge, int(0), int(4), int(2)),
        t("T-family/midpoint/upper", "T", "midpoint", Direction::Le, int(4), int(8), int(6)),
        t("T-family/trapezoid", "T", "trapezoid", Direction::Le, int(-10), int(0), int(-6)),
        t("lambda-mix/uniform", "lambda-mix", "uniform", Direction::Ge, rat(1, 2), int(1), rat(3, 4)),
        t("gamma-mix/double-average", "gamma-mix", "davg", Direction::Ge, int(0), int(1), rat(2, 3)),
        t("three-point/double-average", "three-point", "davg", Direction::Ge, int(0), rat(1, 2), rat(1, 6)),
        t("S2/evalat/lower", "S2", "evalat:alpha=$", Direction::Ge, rat(1, 10), rat(1, 2), rat(1, 3)),
        t("S2/evalat/upper", "S2", "evalat:alpha=$", Direction::Ge, rat(1, 2), rat(9, 10), rat(2, 3)),
    ]
}

/// Default bracket width for threshold searches, `10^-9`.
pub fn default_threshold_tol() -> Rational {
    rat(1, 1_000_000_000)
}

/// Evaluates every verdict and threshold claim. Deterministic.
pub fn run_theorem_suite() -> SuiteResult {
    let claims = claim_list()
        .into_iter()
        .map(|c| match compare(&c.left, &c.right) {
            Ok(cmp) => ClaimResult {
                pass: cmp.verdict.kind() == c.expected,
                computed: cmp.verdict.kind(),
                gap_sign: cmp.verdict.gap_sign,
                witnesses: cmp.witnesses,
                id: c.id,
                left: cmp.left,
                right: cmp.right,
                expected: c.expected,
            },
            // a witness that fails re-verification counts as a failed claim
            Err(_) => {
                let (_, _, v) = compare_specs(&c.left, &c.right).expect("catalog specs are valid");
                ClaimResult {
                    id: c.id,
                    left: c.left.to_string(),
                    right: c.right.to_string(),
                    expected: c.expected,
                    computed: v.kind(),
                    gap_sign: v.gap_sign,
                    pass: false,
                    witnesses: None,
                }
            }
        })
        .collect();
    let tol = default_threshold_tol();
    let thresholds = threshold_list()
        .into_iter()
        .filter_map(|t| {
            let family = Family::new(t.family).ok()?;
            let target = Family::new(t.target).ok()?;
            let result = find_threshold(&family, &target, t.direction, &t.lo, &t.hi, &tol).ok()?;
            Some(ThresholdClaim {
                id: t.id.to_string(),
                pass: result.bracket.exact.as_ref() == Some(&t.expected),
                expected: t.expected,
                result,
            })
        })
        .collect();
    SuiteResult { claims, thresholds }
}

/// `G(x) = ∫_0^x (F2 - F1)` on `GAP_SAMPLES` equally spaced points of `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapSamples {
    pub left: String,
    pub right: String,
    pub points: Vec<(f64, f64)>,
}

pub fn sample_gap(left: &FunctionalSpec, right: &FunctionalSpec) -> Result<GapSamples, HarnessError> {
    let (f1, f2, _) = compare_specs(left, right)?;
    let g = f2.difference(&f1).primitive();
    let n = GAP_SAMPLES as i64 - 1;
    let points = (0..=n)
        .map(|i| {
            let x = rat(i, n);
            (to_f64(&x), to_f64(&g.eval(&x)))
        })
        .collect();
    Ok(GapSamples {
        left: left.to_string(),
        right: right.to_string(),
        points,
    })
}

/// Numeric gaps `∫ f dF2 - ∫ f dF1` over seeded random convex
/// piecewise-linear `f`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpotCheck {
    pub left: String,
    pub right: String,
    pub relation: RelationKind,
    pub seed: u64,
    pub count: usize,
    pub min_gap: f64,
    pub max_gap: f64,
    /// Samples contradicting the exact verdict by more than `slack`.
    pub violations: usize,
    pub slack: f64,
}

/// Knot count of the `i`-th random function in a spot check.
pub fn spot_knots(i: usize) -> usize {
    1 + i % 8
}

pub fn spot_check(
    left: &FunctionalSpec,
    right: &FunctionalSpec,
    count: usize,
    seed: u64,
    tol: f64,
) -> Result<SpotCheck, HarnessError> {
    let (f1, f2, verdict) = compare_specs(left, right)?;
    let slack = 1e-12_f64.max(10.0 * tol);
    let (mut min_gap, mut max_gap, mut violations) = (f64::INFINITY, f64::NEG_INFINITY, 0);
    for i in 0..count {
        let f = random_convex(seed.wrapping_add(i as u64), spot_knots(i));
        let gap = stieltjes_numeric(&f, &f2, tol)?.value - stieltjes_numeric(&f, &f1, tol)?.value;
        min_gap = min_gap.min(gap);
        max_gap = max_gap.max(gap);
        let bad = match verdict.kind() {
            RelationKind::LessOrEqual => gap < -slack,
            RelationKind::GreaterOrEqual => gap > slack,
            RelationKind::Equal => gap.abs() > slack,
            _ => false,
        };
        violations += usize::from(bad);
    }
    Ok(SpotCheck {
        left: left.to_string(),
        right: right.to_string(),
        relation: verdict.kind(),
        seed,
        count,
        min_gap,
        max_gap,
        violations,
        slack,
    })
}

impl Render for SpotCheck {
    fn text(&self) -> String {
        format!(
            "{} {} {}
{} random convex functions from seed {}: gap in [{}, {}], {} violations (slack {})\n",
            self.left,
            self.relation.symbol(),
            self.right,
            self.count,
            self.seed,
            fmt_float(self.min_gap),
            fmt_float(self.max_gap),
            self.violations,
            fmt_float(self.slack)
        )
    }

    fn csv(&self) -> String {
        let mut out = String::from("left,right,relation,seed,count,min_gap,max_gap,violations,slack\n");
        out.push_str(&csv_line(&[
            self.left.clone(),
            self.right.clone(),
            self.relation.to_string(),
            self.seed.to_string(),
            self.count.to_string(),
            fmt_float(self.min_gap),
            fmt_float(self.max_gap),
            self.violations.to_string(),
            fmt_float(self.slack),
        ]));
        out
    }
}

/// Float formatting with 15 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.14e}")
}

fn opt_rational(r: Option<&Rational>) -> String {
    r.map(format_rational).unwrap_or_default()
}

fn witness_cells(w: Option<&WitnessPair>) -> [String; 4] {
    match w {
        Some(w) => [
            format_rational(&w.plus.knot),
            format_rational(&w.plus_gap),
            format_rational(&w.minus.knot),
            format_rational(&w.minus_gap),
        ],
        None => Default::default(),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn csv_line(cells: &[String]) -> String {
    let mut line = cells.iter().map(|c| csv_field(c)).collect::<Vec<_>>().join(",");
    line.push('\n');
    line
}

fn sign_name(s: Sign) -> &'static str {
    match s {
        Sign::Nonnegative => "nonnegative",
        Sign::Nonpositive => "nonpositive",
        Sign::IdenticallyZero => "zero",
        Sign::Mixed => "mixed",
    }
}

/// Text, CSV and JSON renderings.
pub trait Render: Serialize {
    fn text(&self) -> String;
    fn csv(&self) -> String;

    fn render(&self, format: Format) -> Result<String, HarnessError> {
        Ok(match format {
            Format::Text => self.text(),
            Format::Csv => self.csv(),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self)?;
                s.push('\n');
                s
            }
        })
    }
}

/// Writes a report to `path`, or to stdout when `path` is `None`.
pub fn emit_report<R: Render>(report: &R, format: Format, path: Option<&Path>) -> Result<(), HarnessError> {
    let body = report.render(format)?;
    match path {
        Some(p) => std::fs::write(p, body)?,
        None => std::io::stdout().lock().write_all(body.as_bytes())?,
    }
    Ok(())
}

impl Render for SuiteResult {
    fn text(&self) -> String {
        let mut out = String::new();
        for c in &self.claims {
            out.push_str(&format!(
                "{:4}  {:<28} {} {} {}   (expected {})\n",
                if c.pass { "PASS" } else { "FAIL" },
                c.id,
                c.left,
                c.computed.symbol(),
                c.right,
                c.expected.symbol()
            ));
            if let Some(w) = &c.witnesses {
                out.push_str(&format!(
                    "      witnesses: c={} gap={}, c={} gap={}\n",
                    format_rational(&w.plus.knot),
                    format_rational(&w.plus_gap),
                    format_rational(&w.minus.knot),
                    format_rational(&w.minus_gap)
                ));
            }
        }
        for t in &self.thresholds {
            out.push_str(&format!(
                "{:4}  {:<28} {} {} {}: flip at {}   (expected {})\n",
                if t.pass { "PASS" } else { "FAIL" },
                t.id,
                t.result.family,
                t.result.direction,
                t.result.target,
                t.result
                    .bracket
                    .exact
                    .as_ref()
                    .map(format_rational)
                    .unwrap_or_else(|| format!("[{}, {}]", t.result.bracket.lo, t.result.bracket.hi)),
                format_rational(&t.expected)
            ));
        }
        out.push_str(&format!(
            "{} claims, {} failed\n",
            self.claims.len() + self.thresholds.len(),
            self.failures()
        ));
        out
    }

    fn csv(&self) -> String {
        let mut out = String::from("kind,id,left,right,expected,computed,pass,witness_plus,plus_gap,witness_minus,minus_gap\n");
        for c in &self.claims {
            let [wp, gp, wm, gm] = witness_cells(c.witnesses.as_ref());
            out.push_str(&csv_line(&[
                "verdict".into(),
                c.id.clone(),
                c.left.clone(),
                c.right.clone(),
                c.expected.to_string(),
                c.computed.to_string(),
                c.pass.to_string(),
                wp,
                gp,
                wm,
                gm,
            ]));
        }
        for t in &self.thresholds {
            out.push_str(&csv_line(&[
                "threshold".into(),
                t.id.clone(),
                t.result.family.clone(),
                t.result.target.clone(),
                format_rational(&t.expected),
                opt_rational(t.result.bracket.exact.as_ref()),
                t.pass.to_string(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
            ]));
        }
        out
    }
}

impl Render for RegimeReport {
    fn text(&self) -> String {
        let mut out = format!("family {}\n", self.family);
        for r in &self.rows {
            out.push_str(&format!(
                "{:>8}  {:<10} {}\n",
                format_rational(&r.parameter),
                r.target,
                r.verdict.kind().symbol()
            ));
        }
        for c in &self.changes {
            out.push_str(&format!(
                "change vs {} in [{}, {}]: {} -> {}\n",
                c.target, c.lo, c.hi, c.verdict_lo, c.verdict_hi
            ));
        }
        out
    }

    fn csv(&self) -> String {
        let mut out = String::from(
            "parameter,target,relation,endpoint_check,mean_check,gap_sign,witness_plus,plus_gap,witness_minus,minus_gap\n",
        );
        for r in &self.rows {
            let [wp, gp, wm, gm] = witness_cells(r.witnesses.as_ref());
            out.push_str(&csv_line(&[
                format_rational(&r.parameter),
                r.target.clone(),
                r.verdict.kind().to_string(),
                r.verdict.endpoint_check.to_string(),
                r.verdict.mean_check.to_string(),
                sign_name(r.verdict.gap_sign).into(),
                wp,
                gp,
                wm,
                gm,
            ]));
        }
        out
    }
}

impl Render for ThresholdResult {
    fn text(&self) -> String {
        let b = &self.bracket;
        let head = match &b.exact {
            Some(r) => format!("threshold {}", format_rational(r)),
            None => format!("threshold in [{}, {}]", b.lo, b.hi),
        };
        format!(
            "{head}\n{} {} {}: {} at {}, {} at {}\n",
            self.family, self.direction, self.target, self.verdict_lo, b.lo, self.verdict_hi, b.hi
        )
    }

    fn csv(&self) -> String {
        let b = &self.bracket;
        let mut out = String::from("family,target,direction,lo,hi,exact,holds_at_lo,verdict_lo,verdict_hi\n");
        out.push_str(&csv_line(&[
            self.family.clone(),
            self.target.clone(),
            self.direction.to_string(),
            format_rational(&b.lo),
            format_rational(&b.hi),
            opt_rational(b.exact.as_ref()),
            b.holds_at_lo.to_string(),
            self.verdict_lo.to_string(),
            self.verdict_hi.to_string(),
        ]));
        out
    }
}

impl Render for Comparison {
    fn text(&self) -> String {
        let v = &self.verdict;
        let mut out = format!(
            "{} {} {}\nendpoint_check={} mean_check={} gap_sign={} crossings={}\n",
            self.left,
            v.kind().symbol(),
            self.right,
            v.endpoint_check,
            v.mean_check,
            sign_name(v.gap_sign),
            self.crossings
        );
        if let Some(w) = &self.witnesses {
            out.push_str(&format!(
                "witness max(t-{}, 0): gap {}\nwitness max(t-{}, 0): gap {}\n",
                w.plus.knot, w.plus_gap, w.minus.knot, w.minus_gap
            ));
        }
        out
    }

    fn csv(&self) -> String {
        let v = &self.verdict;
        let [wp, gp, wm, gm] = witness_cells(self.witnesses.as_ref());
        let mut out = String::from(
            "left,right,relation,endpoint_check,mean_check,gap_sign,crossings,witness_plus,plus_gap,witness_minus,minus_gap\n",
        );
        out.push_str(&csv_line(&[
            self.left.clone(),
            self.right.clone(),
            v.kind().to_string(),
            v.endpoint_check.to_string(),
            v.mean_check.to_string(),
            sign_name(v.gap_sign).into(),
            self.crossings.to_string(),
            wp,
            gp,
            wm,
            gm,
        ]));
        out
    }
}

impl Render for GapSamples {
    fn text(&self) -> String {
        self.csv()
    }

    fn csv(&self) -> String {
        let mut out = String::from("x,G\n");
        for (x, g) in &self.points {
            out.push_str(&format!("{},{}\n", fmt_float(*x), fmt_float(*g)));
        }
        out
    }
}

/// Parses a comma-separated list of rationals, e.g. `-10,-6,1/2`.
pub fn parse_grid(text: &str) -> Result<Vec<Rational>, HarnessError> {
    text.split(',')
        .map(|s| parse_rational(s.trim()).map_err(|e| HarnessError::Number(e.to_string())))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn families() {
        let f = Family::new("lambda-mix").unwrap();
        assert_eq!(f.at(&rat(3, 4)).unwrap().to_string(), "mix:3/4*davg+1/4*trapezoid");
        let t = Family::new("mix:$*davg+1-$*trap").unwrap();
        assert_eq!(t.at(&rat(1, 3)).unwrap(), Family::new("lambda-mix").unwrap().at(&rat(1, 3)).unwrap());
        assert!(Family::new("nonsense").is_err());
        assert!(Family::new("S1").unwrap().at(&int(1)).is_err());
        assert_eq!(Family::new("midpoint").unwrap().at(&int(7)).unwrap(), FunctionalSpec::Midpoint);
    }

    #[test]
    fn thresholds_are_exact() {
        let tol = default_threshold_tol();
        let r = find_threshold(
            &Family::new("T").unwrap(),
            &Family::new("midpoint").unwrap(),
            Direction::Ge,
            &int(0),
            &int(4),
            &tol,
        )
        .unwrap();
        assert_eq!(r.bracket.exact, Some(int(2)));
        assert_eq!(r.bracket.lo, int(2));
        assert_eq!(r.verdict_lo, RelationKind::GreaterOrEqual);
        assert_eq!(r.verdict_hi, RelationKind::Incomparable);
        let r = find_threshold(
            &Family::new("T").unwrap(),
            &Family::new("trapezoid").unwrap(),
            Direction::Le,
            &int(-10),
            &int(0),
            &tol,
        )
        .unwrap();
        assert_eq!(r.bracket.exact, Some(int(-6)));
        assert_eq!(r.bracket.hi, int(-6));
    }

    #[test]
    fn no_bracket() {
        let r = find_threshold(
            &Family::new("T").unwrap(),
            &Family::new("uniform").unwrap(),
            Direction::Le,
            &int(1),
            &int(5),
            &default_threshold_tol(),
        );
        assert!(matches!(r, Err(HarnessError::NoBracket { holds: true, .. })));
        assert!(matches!(
            bisect_flip(|_| Ok(true), &int(1), &int(0), &rat(1, 10)),
            Err(HarnessError::InvalidInterval { .. })
        ));
    }

    #[test]
    fn irrational_flip_is_bracketed() {
        let b = moment_flip(&rat(1, 10), &rat(1, 2), &default_threshold_tol()).unwrap();
        assert!(b.exact.is_none());
        assert!(b.width() <= default_threshold_tol());
        let s = (3.0 - 3f64.sqrt()) / 6.0;
        assert!(to_f64(&b.lo) <= s && s <= to_f64(&b.hi));
    }

    #[test]
    fn t_table_shape() {
        let r = t_family_table().unwrap();
        assert_eq!(r.rows.len(), 27);
        assert_eq!(r.csv().lines().count(), 28);
        // mean: GE..Equal..LE, midpoint: GE..Inc..LE, trapezoid: Inc..LE
        assert_eq!(r.changes.len(), 2 + 2 + 1);
    }

    #[test]
    fn gap_samples() {
        let g = sample_gap(&FunctionalSpec::T { a: int(4) }, &FunctionalSpec::Midpoint).unwrap();
        assert_eq!(g.points.len(), GAP_SAMPLES);
        assert_eq!(g.points[0], (0.0, 0.0));
        assert_eq!(g.points[GAP_SAMPLES - 1].0, 1.0);
        assert!(g.points[GAP_SAMPLES - 1].1.abs() < 1e-15);
        let csv = g.csv();
        assert!(csv.starts_with("x,G\n"));
        assert_eq!(csv.lines().count(), GAP_SAMPLES + 1);
    }

    #[test]
    fn float_format() {
        assert_eq!(fmt_float(0.5), "5.00000000000000e-1");
        assert_eq!(fmt_float(1.0 / 3.0), "3.33333333333333e-1");
    }

    #[test]
    fn csv_quoting() {
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("plain"), "plain");
    }
}
