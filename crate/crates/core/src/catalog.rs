//! Weight functions of the quadrature-type functionals, all on `[0, 1]`.
//!
//! Every functional `L` here has a weight `F` with `L f = ∫_0^1 f dF`. The
//! functional is also evaluated from its closed form in terms of the
//! antiderivatives `F' = f`, `Φ' = F` ([`functional_value_exact`]), so the two
//! descriptions can be checked against each other.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::bvfunction::{Atom, BvError, CumulativeFunction};
use crate::polynomial::Poly;
use crate::rational::{int, parse_rational, rat, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("cannot parse functional {input:?}: {reason}")]
    Parse { input: String, reason: String },
    #[error(transparent)]
    Weight(#[from] BvError),
}

/// A functional from the catalog, with exact parameters.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FunctionalSpec {
    /// `∫_0^1 f`
    Uniform,
    /// `f(1/2)`
    Midpoint,
    /// `(f(0) + f(1)) / 2`
    Trapezoid,
    /// `∫∫ f((s+t)/2) ds dt = 4(Φ(0) - 2Φ(1/2) + Φ(1))`
    DoubleAverage,
    /// `f(0)/6 + 2f(1/2)/3 + f(1)/6`
    SimpsonLike,
    /// `8Φ(0) - 16Φ(1/4) + 16Φ(1/2) - 16Φ(3/4) + 8Φ(1)`
    CompositeQuarter,
    /// `(1 - a/2)(F(1) - F(0)) + 2a(Φ(0) - 2Φ(1/2) + Φ(1))`
    T { a: Rational },
    /// `f(1 - α)`, i.e. `f(αx + (1-α)y)` on `[x, y]`
    EvalAt { alpha: Rational },
    /// `α f(0) + (1 - α) f(1)`
    Endpoints { alpha: Rational },
    /// Non-symmetric Hermite-Hadamard middle term built from `F`.
    S1 { alpha: Rational },
    /// Non-symmetric middle term built from `F` and `Φ`.
    S2 { alpha: Rational },
    Mixture { terms: Vec<(Rational, FunctionalSpec)> },
}

impl FunctionalSpec {
    pub fn mixture(terms: Vec<(Rational, FunctionalSpec)>) -> Self {
        FunctionalSpec::Mixture { terms }
    }

    pub fn validate(&self) -> Result<(), CatalogError> {
        let unit = |name: &str, alpha: &Rational| {
            if alpha < &Rational::zero() || alpha > &Rational::one() {
                Err(CatalogError::InvalidParameter(format!(
                    "{name} needs alpha in [0, 1], got {alpha}"
                )))
            } else {
                Ok(())
            }
        };
        match self {
            FunctionalSpec::EvalAt { alpha } => unit("evalat", alpha),
            FunctionalSpec::Endpoints { alpha } => unit("endpoints", alpha),
            FunctionalSpec::S2 { alpha } => unit("S2", alpha),
            FunctionalSpec::S1 { alpha } => {
                if alpha <= &Rational::zero() || alpha >= &Rational::one() {
                    Err(CatalogError::InvalidParameter(format!(
                        "S1 needs alpha in (0, 1), got {alpha}"
                    )))
                } else {
                    Ok(())
                }
            }
            FunctionalSpec::Mixture { terms } => {
                if terms.is_empty() {
                    return Err(CatalogError::InvalidParameter("empty mixture".into()));
                }
                let total: Rational = terms.iter().map(|(c, _)| c.clone()).sum();
                if !total.is_one() {
                    return Err(CatalogError::InvalidParameter(format!(
                        "mixture coefficients sum to {total}, not 1"
                    )));
                }
                terms.iter().try_for_each(|(_, s)| s.validate())
            }
            _ => Ok(()),
        }
    }

    /// Mixture terms with nested mixtures distributed out.
    fn flat_terms(&self) -> Vec<(Rational, FunctionalSpec)> {
        match self {
            FunctionalSpec::Mixture { terms } => terms
                .iter()
                .flat_map(|(c, s)| {
                    s.flat_terms()
                        .into_iter()
                        .map(move |(c2, s2)| (c * c2, s2))
                })
                .collect(),
            other => vec![(Rational::one(), other.clone())],
        }
    }
}

impl fmt::Display for FunctionalSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionalSpec::Uniform => f.write_str("uniform"),
            FunctionalSpec::Midpoint => f.write_str("midpoint"),
            FunctionalSpec::Trapezoid => f.write_str("trapezoid"),
            FunctionalSpec::DoubleAverage => f.write_str("davg"),
            FunctionalSpec::SimpsonLike => f.write_str("simpson"),
            FunctionalSpec::CompositeQuarter => f.write_str("cquarter"),
            FunctionalSpec::T { a } => write!(f, "T:a={a}"),
            FunctionalSpec::EvalAt { alpha } => write!(f, "evalat:alpha={alpha}"),
            FunctionalSpec::Endpoints { alpha } => write!(f, "endpoints:alpha={alpha}"),
            FunctionalSpec::S1 { alpha } => write!(f, "S1:alpha={alpha}"),
            FunctionalSpec::S2 { alpha } => write!(f, "S2:alpha={alpha}"),
            FunctionalSpec::Mixture { .. } => {
                f.write_str("mix:")?;
                for (i, (c, s)) in self.flat_terms().iter().enumerate() {
                    if i > 0 {
                        f.write_str("+")?;
                    }
                    write!(f, "{c}*{s}")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for FunctionalSpec {
    type Err = CatalogError;

    /// Grammar: `uniform`, `midpoint`, `trapezoid`, `davg`, `simpson`,
    /// `cquarter`, `T:a=<q>`, `evalat:alpha=<q>`, `endpoints:alpha=<q>`,
    /// `S1:alpha=<q>`, `S2:alpha=<q>`, `mix:<q>*<spec>+<q>*<spec>...`, where
    /// `<q>` is an exact fraction.
    fn from_str(input: &str) -> Result<Self, CatalogError> {
        let fail = |reason: &str| CatalogError::Parse {
            input: input.to_string(),
            reason: reason.to_string(),
        };
        let text = input.trim();
        let (name, rest) = match text.split_once(':') {
            Some((n, r)) => (n.trim().to_ascii_lowercase(), Some(r.trim())),
            None => (text.to_ascii_lowercase(), None),
        };
        let param = |key: &str| -> Result<Rational, CatalogError> {
            let rest = rest.ok_or_else(|| fail(&format!("missing parameter {key}=")))?;
            let (k, v) = rest
                .split_once('=')
                .ok_or_else(|| fail("expected key=value"))?;
            if !k.trim().eq_ignore_ascii_case(key) {
                return Err(fail(&format!("expected parameter {key}")));
            }
            parse_rational(v).map_err(|e| fail(&e.to_string()))
        };
        let simple = |spec: FunctionalSpec| {
            if rest.is_some() {
                Err(fail("takes no parameters"))
            } else {
                Ok(spec)
            }
        };
        let spec = match name.as_str() {
            "uniform" | "mean" => simple(FunctionalSpec::Uniform)?,
            "midpoint" | "mid" => simple(FunctionalSpec::Midpoint)?,
            "trapezoid" | "trap" => simple(FunctionalSpec::Trapezoid)?,
            "davg" | "double-average" => simple(FunctionalSpec::DoubleAverage)?,
            "simpson" => simple(FunctionalSpec::SimpsonLike)?,
            "cquarter" | "composite-quarter" => simple(FunctionalSpec::CompositeQuarter)?,
            "t" => FunctionalSpec::T { a: param("a")? },
            "evalat" | "eval-at" => FunctionalSpec::EvalAt { alpha: param("alpha")? },
            "endpoints" => FunctionalSpec::Endpoints { alpha: param("alpha")? },
            "s1" => FunctionalSpec::S1 { alpha: param("alpha")? },
            "s2" => FunctionalSpec::S2 { alpha: param("alpha")? },
            "mix" => {
                let body = rest.ok_or_else(|| fail("empty mixture"))?;
                let mut terms = Vec::new();
                for term in body.split('+') {
                    let (c, s) = term
                        .split_once('*')
                        .ok_or_else(|| fail("mixture terms look like <coeff>*<spec>"))?;
                    let c = parse_rational(c).map_err(|e| fail(&e.to_string()))?;
                    let s: FunctionalSpec = s.parse()?;
                    terms.push((c, s));
                }
                FunctionalSpec::Mixture { terms }
            }
            _ => return Err(fail("unknown functional")),
        };
        spec.validate()?;
        Ok(spec)
    }
}

fn poly(coeffs: Vec<Rational>) -> Poly {
    Poly::new(coeffs)
}

fn zero() -> Rational {
    Rational::zero()
}

fn one() -> Rational {
    Rational::one()
}

/// The weight `F` with `L f = ∫_0^1 f dF`.
pub fn make_weight(spec: &FunctionalSpec) -> Result<CumulativeFunction, CatalogError> {
    spec.validate()?;
    let half = rat(1, 2);
    let w = match spec {
        FunctionalSpec::Uniform => {
            CumulativeFunction::from_pieces(vec![zero(), one()], vec![Poly::identity()], one())?
        }
        FunctionalSpec::Midpoint => CumulativeFunction::step(vec![Atom::new(half, one())])?,
        FunctionalSpec::Trapezoid => CumulativeFunction::step(vec![
            Atom::new(zero(), half.clone()),
            Atom::new(one(), half),
        ])?,
        FunctionalSpec::DoubleAverage => CumulativeFunction::from_pieces(
            vec![zero(), half, one()],
            vec![Poly::from_ints(&[0, 0, 2]), Poly::from_ints(&[-1, 4, -2])],
            one(),
        )?,
        FunctionalSpec::SimpsonLike => CumulativeFunction::step(vec![
            Atom::new(zero(), rat(1, 6)),
            Atom::new(half, rat(2, 3)),
            Atom::new(one(), rat(1, 6)),
        ])?,
        FunctionalSpec::CompositeQuarter => CumulativeFunction::from_pieces(
            vec![zero(), rat(1, 4), half, rat(3, 4), one()],
            vec![
                Poly::from_ints(&[0, 0, 4]),
                poly(vec![rat(-1, 2), int(4), int(-4)]),
                poly(vec![rat(3, 2), int(-4), int(4)]),
                Poly::from_ints(&[-3, 8, -4]),
            ],
            one(),
        )?,
        FunctionalSpec::T { a } => CumulativeFunction::from_pieces(
            vec![zero(), half.clone(), one()],
            vec![
                poly(vec![zero(), one() - a * &half, a.clone()]),
                poly(vec![-(a * &half), one() + a * rat(3, 2), -a.clone()]),
            ],
            one(),
        )?,
        FunctionalSpec::EvalAt { alpha } => {
            CumulativeFunction::step(vec![Atom::new(one() - alpha, one())])?
        }
        FunctionalSpec::Endpoints { alpha } => CumulativeFunction::step(vec![
            Atom::new(zero(), alpha.clone()),
            Atom::new(one(), one() - alpha),
        ])?,
        FunctionalSpec::S1 { alpha } => {
            let beta = one() - alpha;
            CumulativeFunction::from_pieces(
                vec![zero(), beta.clone(), one()],
                vec![
                    poly(vec![zero(), alpha / &beta]),
                    poly(vec![(alpha * int(2) - one()) / alpha, &beta / alpha]),
                ],
                one(),
            )?
        }
        FunctionalSpec::S2 { alpha } => CumulativeFunction::from_pieces(
            vec![zero(), one()],
            vec![poly(vec![
                zero(),
                alpha * int(6) - int(2),
                int(3) - alpha * int(6),
            ])],
            one(),
        )?,
        FunctionalSpec::Mixture { terms } => {
            let weights = terms
                .iter()
                .map(|(c, s)| Ok((c.clone(), make_weight(s)?)))
                .collect::<Result<Vec<_>, CatalogError>>()?;
            let refs: Vec<(Rational, &CumulativeFunction)> =
                weights.iter().map(|(c, w)| (c.clone(), w)).collect();
            CumulativeFunction::linear_combination(&refs)?
        }
    };
    Ok(w)
}

/// Weight for second differences of `Φ` with an off-centre middle node:
/// `lead·t² + (1-α)t` on `[0, α)` and `c t² + (1 - cα - c)t + cα` on `[α, 1]`
/// with `c = (-α/(1-α))³`. A jump at `alpha` becomes an atom.
pub fn two_piece_quadratic(lead: &Rational, alpha: &Rational) -> Result<CumulativeFunction, CatalogError> {
    if alpha <= &zero() || alpha >= &one() {
        return Err(CatalogError::InvalidParameter(format!(
            "two-piece quadratic needs alpha in (0, 1), got {alpha}"
        )));
    }
    let ratio = -(alpha / (one() - alpha));
    let c = &ratio * &ratio * &ratio;
    let w = CumulativeFunction::from_pieces(
        vec![zero(), alpha.clone(), one()],
        vec![
            poly(vec![zero(), one() - alpha, lead.clone()]),
            poly(vec![&c * alpha, one() - &c * alpha - &c, c.clone()]),
        ],
        one(),
    )?;
    Ok(w)
}

/// The functional evaluated on a polynomial `f` through its closed form in
/// `f`, `F` and `Φ` (with `F(0) = Φ(0) = 0`). Independent of [`make_weight`].
pub fn functional_value_exact(spec: &FunctionalSpec, f: &Poly) -> Result<Rational, CatalogError> {
    spec.validate()?;
    let big_f = f.antiderivative();
    let phi = big_f.antiderivative();
    let (z, h, o) = (zero(), rat(1, 2), one());
    let ff = |t: &Rational| f.eval(t);
    let fa = |t: &Rational| big_f.eval(t);
    let ph = |t: &Rational| phi.eval(t);
    let second_difference = ph(&z) - ph(&h) * int(2) + ph(&o);
    let v = match spec {
        FunctionalSpec::Uniform => fa(&o) - fa(&z),
        FunctionalSpec::Midpoint => ff(&h),
        FunctionalSpec::Trapezoid => (ff(&z) + ff(&o)) / int(2),
        FunctionalSpec::DoubleAverage => second_difference * int(4),
        FunctionalSpec::SimpsonLike => ff(&z) / int(6) + ff(&h) * rat(2, 3) + ff(&o) / int(6),
        FunctionalSpec::CompositeQuarter => {
            ph(&z) * int(8) - ph(&rat(1, 4)) * int(16) + ph(&h) * int(16)
                - ph(&rat(3, 4)) * int(16)
                + ph(&o) * int(8)
        }
        FunctionalSpec::T { a } => {
            (one() - a / int(2)) * (fa(&o) - fa(&z)) + a * int(2) * second_difference
        }
        FunctionalSpec::EvalAt { alpha } => ff(&(one() - alpha)),
        FunctionalSpec::Endpoints { alpha } => alpha * ff(&z) + (one() - alpha) * ff(&o),
        FunctionalSpec::S1 { alpha } => {
            let beta = one() - alpha;
            -(alpha / &beta) * fa(&z)
                + (alpha * int(2) - one()) / (alpha * &beta) * fa(&beta)
                + (&beta / alpha) * fa(&o)
        }
        FunctionalSpec::S2 { alpha } => {
            (int(4) - alpha * int(6)) * fa(&o) + (int(2) - alpha * int(6)) * fa(&z)
                - (int(6) - alpha * int(12)) * (ph(&o) - ph(&z))
        }
        FunctionalSpec::Mixture { terms } => {
            let mut acc = Rational::zero();
            for (c, s) in terms {
                acc += c * functional_value_exact(s, f)?;
            }
            acc
        }
    };
    Ok(v)
}
