//! Convex-order decisions between two weights.
//!
//! For weights `F1`, `F2` on `[0, 1]` with `F1(0) = F2(0)`, the inequality
//! `∫ f dF1 ≤ ∫ f dF2` holds for every continuous convex `f` exactly when
//!
//! * `F1(1) = F2(1)`,
//! * `∫_0^1 F1 = ∫_0^1 F2`, and
//! * `G(x) = ∫_0^x (F2 - F1) ≥ 0` on `(0, 1)`.
//!
//! `G` is a continuous piecewise polynomial, so the last condition is decided
//! exactly by polynomial sign analysis. When `G` changes sign, the hinges
//! `t ↦ max(t - c, 0)` at a positive and a negative point of `G` separate the
//! two functionals in opposite directions, since the gap of the hinge at `c`
//! equals `G(c)`.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bvfunction::{crossing_points, CrossingDirection, CumulativeFunction};
use crate::polynomial::{Poly, Sign};
use crate::rational::{to_f64, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrderError {
    #[error("weights differ on affine functions (endpoint check {endpoint_check}, mean check {mean_check})")]
    NotNormalized { endpoint_check: bool, mean_check: bool },
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("hinge knot {0} is not inside (0, 1)")]
    KnotOutOfRange(Rational),
    #[error("verdict is not Incomparable")]
    NotIncomparable,
    #[error("stored witnesses do not separate the two weights")]
    WitnessMismatch,
}

/// The relation between `∫ f dF1` and `∫ f dF2` over convex `f`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "relation")]
pub enum Relation {
    LessOrEqual,
    GreaterOrEqual,
    Equal,
    Incomparable {
        #[serde(with = "crate::rational::serde_rational")]
        witness_plus: Rational,
        #[serde(with = "crate::rational::serde_rational")]
        witness_minus: Rational,
    },
    /// The weights already disagree on some affine function.
    NotNormalized,
}

/// Payload-free view of [`Relation`], used for expectations and tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RelationKind {
    LessOrEqual,
    GreaterOrEqual,
    Equal,
    Incomparable,
    NotNormalized,
}

impl RelationKind {
    pub fn symbol(self) -> &'static str {
        match self {
            RelationKind::LessOrEqual => "<=",
            RelationKind::GreaterOrEqual => ">=",
            RelationKind::Equal => "==",
            RelationKind::Incomparable => "incomparable",
            RelationKind::NotNormalized => "not-normalized",
        }
    }

    pub fn reversed(self) -> Self {
        match self {
            RelationKind::LessOrEqual => RelationKind::GreaterOrEqual,
            RelationKind::GreaterOrEqual => RelationKind::LessOrEqual,
            other => other,
        }
    }
}

impl std::fmt::Display for RelationKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RelationKind::LessOrEqual => "LessOrEqual",
            RelationKind::GreaterOrEqual => "GreaterOrEqual",
            RelationKind::Equal => "Equal",
            RelationKind::Incomparable => "Incomparable",
            RelationKind::NotNormalized => "NotNormalized",
        })
    }
}

impl Relation {
    pub fn kind(&self) -> RelationKind {
        match self {
            Relation::LessOrEqual => RelationKind::LessOrEqual,
            Relation::GreaterOrEqual => RelationKind::GreaterOrEqual,
            Relation::Equal => RelationKind::Equal,
            Relation::Incomparable { .. } => RelationKind::Incomparable,
            Relation::NotNormalized => RelationKind::NotNormalized,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Verdict {
    pub relation: Relation,
    /// `F1(1) = F2(1)`
    pub endpoint_check: bool,
    /// `∫ F1 = ∫ F2`
    pub mean_check: bool,
    /// Sign of `G = ∫_0^x (F2 - F1)` on `[0, 1]`.
    pub gap_sign: Sign,
}

impl Verdict {
    pub fn kind(&self) -> RelationKind {
        self.relation.kind()
    }

    /// `∫ f dF1 ≤ ∫ f dF2` for all convex `f` (equality included).
    pub fn holds_le(&self) -> bool {
        matches!(self.relation, Relation::LessOrEqual | Relation::Equal)
    }

    pub fn holds_ge(&self) -> bool {
        matches!(self.relation, Relation::GreaterOrEqual | Relation::Equal)
    }
}

/// The relation kind alone, without locating witnesses.
pub fn classify(f1: &CumulativeFunction, f2: &CumulativeFunction) -> RelationKind {
    if f1.end_value() != f2.end_value() {
        return RelationKind::NotNormalized;
    }
    let gap = f2.difference(f1).primitive();
    if !gap.eval(&Rational::one()).is_zero() {
        return RelationKind::NotNormalized;
    }
    match gap.sign() {
        Sign::IdenticallyZero => RelationKind::Equal,
        Sign::Nonnegative => RelationKind::LessOrEqual,
        Sign::Nonpositive => RelationKind::GreaterOrEqual,
        Sign::Mixed => RelationKind::Incomparable,
    }
}

/// Decides the convex-order relation between `∫ f dF1` and `∫ f dF2`.
pub fn levin_stechkin_compare(f1: &CumulativeFunction, f2: &CumulativeFunction) -> Verdict {
    let endpoint_check = f1.end_value() == f2.end_value();
    let gap = f2.difference(f1).primitive();
    let mean_check = gap.eval(&Rational::one()).is_zero();
    let gap_sign = gap.sign();
    let relation = if !(endpoint_check && mean_check) {
        Relation::NotNormalized
    } else {
        match gap_sign {
            Sign::IdenticallyZero => Relation::Equal,
            Sign::Nonnegative => Relation::LessOrEqual,
            Sign::Nonpositive => Relation::GreaterOrEqual,
            Sign::Mixed => {
                // leftmost point of largest |G| on each side
                let samples = gap.nonzero_samples();
                let extreme = |better: fn(&Rational, &Rational) -> bool| {
                    samples
                        .iter()
                        .fold(None::<&(Rational, Rational)>, |best, s| match best {
                            Some(b) if !better(&s.1, &b.1) => Some(b),
                            _ => Some(s),
                        })
                        .map(|(t, _)| t.clone())
                        .expect("mixed sign has samples")
                };
                Relation::Incomparable {
                    witness_plus: extreme(|a, b| a > b),
                    witness_minus: extreme(|a, b| a < b),
                }
            }
        }
    };
    Verdict {
        relation,
        endpoint_check,
        mean_check,
        gap_sign,
    }
}

/// Which expectation the single-crossing argument bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OhlinDirection {
    /// `E f(X1) ≤ E f(X2)`
    FirstLeSecond,
    /// `E f(X2) ≤ E f(X1)`
    SecondLeFirst,
}

/// Single-crossing comparison of two distribution functions with equal
/// means. `None` when the functions do not cross exactly once.
pub fn ohlin_compare(f1: &CumulativeFunction, f2: &CumulativeFunction) -> Result<Option<OhlinDirection>, OrderError> {
    if !f1.is_cdf() || !f2.is_cdf() {
        return Err(OrderError::PreconditionFailed(
            "both weights must be distribution functions".into(),
        ));
    }
    if f1.moment(1) != f2.moment(1) {
        return Err(OrderError::PreconditionFailed("means differ".into()));
    }
    let crossings = crossing_points(f1, f2);
    Ok(match crossings.as_slice() {
        // F1 below F2 first, above after
        [c] if c.direction == CrossingDirection::NegativeToPositive => Some(OhlinDirection::FirstLeSecond),
        [_] => Some(OhlinDirection::SecondLeFirst),
        _ => None,
    })
}

/// `h_c(t) = max(t - c, 0)`
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HingeWitness {
    #[serde(with = "crate::rational::serde_rational")]
    pub knot: Rational,
}

impl HingeWitness {
    pub fn new(knot: Rational) -> Result<Self, OrderError> {
        if knot <= Rational::zero() || knot >= Rational::one() {
            return Err(OrderError::KnotOutOfRange(knot));
        }
        Ok(HingeWitness { knot })
    }

    pub fn eval(&self, t: f64) -> f64 {
        (t - to_f64(&self.knot)).max(0.0)
    }
}

/// `∫ h_c dF2 - ∫ h_c dF1`, computed by exact Stieltjes integration of the
/// hinge. Positive values mean the hinge at `c` has `∫ h_c dF1 < ∫ h_c dF2`.
pub fn hinge_gap(f1: &CumulativeFunction, f2: &CumulativeFunction, c: &Rational) -> Result<Rational, OrderError> {
    if c <= &Rational::zero() || c >= &Rational::one() {
        return Err(OrderError::KnotOutOfRange(c.clone()));
    }
    let endpoint_check = f1.end_value() == f2.end_value();
    let mean_check = f1.integral() == f2.integral();
    if !(endpoint_check && mean_check) {
        return Err(OrderError::NotNormalized {
            endpoint_check,
            mean_check,
        });
    }
    let hinge = Poly::new(vec![-c.clone(), Rational::one()]);
    Ok(f2.stieltjes_from(&hinge, c) - f1.stieltjes_from(&hinge, c))
}

/// Two hinges that separate an incomparable pair, with their exact gaps.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WitnessPair {
    pub plus: HingeWitness,
    #[serde(with = "crate::rational::serde_rational")]
    pub plus_gap: Rational,
    pub minus: HingeWitness,
    #[serde(with = "crate::rational::serde_rational")]
    pub minus_gap: Rational,
}

/// Materializes the witnesses of an `Incomparable` verdict for `(F1, F2)`
/// and re-checks that their hinge gaps have strictly opposite signs.
pub fn witness_functions(
    f1: &CumulativeFunction,
    f2: &CumulativeFunction,
    verdict: &Verdict,
) -> Result<WitnessPair, OrderError> {
    let Relation::Incomparable {
        witness_plus,
        witness_minus,
    } = &verdict.relation
    else {
        return Err(OrderError::NotIncomparable);
    };
    let plus = HingeWitness::new(witness_plus.clone())?;
    let minus = HingeWitness::new(witness_minus.clone())?;
    let plus_gap = hinge_gap(f1, f2, &plus.knot)?;
    let minus_gap = hinge_gap(f1, f2, &minus.knot)?;
    if !(plus_gap.is_positive() && minus_gap.is_negative()) {
        return Err(OrderError::WitnessMismatch);
    }
    Ok(WitnessPair {
        plus,
        plus_gap,
        minus,
        minus_gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{make_weight, FunctionalSpec};
    use crate::rational::{int, rat};

    fn w(s: &str) -> CumulativeFunction {
        make_weight(&s.parse::<FunctionalSpec>().unwrap()).unwrap()
    }

    #[test]
    fn documented_verdicts() {
        assert_eq!(levin_stechkin_compare(&w("T:a=1"), &w("uniform")).kind(), RelationKind::LessOrEqual);
        assert_eq!(levin_stechkin_compare(&w("T:a=0"), &w("uniform")).kind(), RelationKind::Equal);
        assert_eq!(
            levin_stechkin_compare(&w("S2:alpha=1/4"), &w("endpoints:alpha=1/4")).kind(),
            RelationKind::LessOrEqual
        );
        let v = levin_stechkin_compare(&w("T:a=4"), &w("midpoint"));
        let Relation::Incomparable { witness_plus, witness_minus } = &v.relation else {
            panic!("expected incomparable, got {v:?}");
        };
        assert!(witness_plus > &int(0) && witness_plus <= &rat(1, 4));
        assert_eq!(witness_minus, &rat(1, 2));
        assert_eq!(v.gap_sign, Sign::Mixed);
    }

    #[test]
    fn not_normalized_is_reported() {
        let v = levin_stechkin_compare(&w("evalat:alpha=1/4"), &w("uniform"));
        assert_eq!(v.relation, Relation::NotNormalized);
        assert!(v.endpoint_check);
        assert!(!v.mean_check);
        assert_eq!(
            hinge_gap(&w("evalat:alpha=1/4"), &w("uniform"), &rat(1, 2)),
            Err(OrderError::NotNormalized {
                endpoint_check: true,
                mean_check: false
            })
        );
    }

    #[test]
    fn ohlin_single_crossing() {
        assert_eq!(
            ohlin_compare(&w("midpoint"), &w("uniform")).unwrap(),
            Some(OhlinDirection::FirstLeSecond)
        );
        assert_eq!(
            ohlin_compare(&w("uniform"), &w("trapezoid")).unwrap(),
            Some(OhlinDirection::FirstLeSecond)
        );
        assert_eq!(
            ohlin_compare(&w("trapezoid"), &w("uniform")).unwrap(),
            Some(OhlinDirection::SecondLeFirst)
        );
        assert!(matches!(
            ohlin_compare(&w("S2:alpha=1/5"), &w("uniform")),
            Err(OrderError::PreconditionFailed(_))
        ));
        assert!(matches!(
            ohlin_compare(&w("evalat:alpha=1/4"), &w("uniform")),
            Err(OrderError::PreconditionFailed(_))
        ));
        // three crossings: the lemma says nothing
        assert_eq!(ohlin_compare(&w("simpson"), &w("davg")).unwrap(), None);
    }

    #[test]
    fn hinge_gaps() {
        assert_eq!(hinge_gap(&w("midpoint"), &w("uniform"), &rat(1, 2)).unwrap(), rat(1, 8));
        assert_eq!(hinge_gap(&w("davg"), &w("davg"), &rat(1, 3)).unwrap(), int(0));
        assert!(hinge_gap(&w("T:a=4"), &w("midpoint"), &rat(1, 2)).unwrap().is_negative());
        assert_eq!(
            hinge_gap(&w("midpoint"), &w("uniform"), &int(1)),
            Err(OrderError::KnotOutOfRange(int(1)))
        );
    }

    #[test]
    fn hinge_gap_matches_primitive_gap() {
        let pairs = [("T:a=4", "midpoint"), ("S2:alpha=2/5", "S1:alpha=2/5"), ("davg", "simpson")];
        for (a, b) in pairs {
            let (f1, f2) = (w(a), w(b));
            let g = f2.difference(&f1).primitive();
            for k in 1..40 {
                let c = rat(k, 40);
                assert_eq!(hinge_gap(&f1, &f2, &c).unwrap(), g.eval(&c), "{a} vs {b} at {c}");
            }
        }
    }

    #[test]
    fn witnesses() {
        let (f1, f2) = (w("T:a=4"), w("midpoint"));
        let v = levin_stechkin_compare(&f1, &f2);
        let pair = witness_functions(&f1, &f2, &v).unwrap();
        assert!(pair.plus_gap.is_positive() && pair.minus_gap.is_negative());

        let (s2, s1) = (w("S2:alpha=2/5"), w("S1:alpha=2/5"));
        let v = levin_stechkin_compare(&s2, &s1);
        assert_eq!(v.kind(), RelationKind::Incomparable);
        assert!(witness_functions(&s2, &s1, &v).is_ok());

        let eq = levin_stechkin_compare(&w("uniform"), &w("T:a=0"));
        assert_eq!(witness_functions(&f1, &f2, &eq), Err(OrderError::NotIncomparable));
    }
}
