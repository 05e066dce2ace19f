//! Piecewise-polynomial weight functions of bounded variation on `[0, 1]`.
//!
//! A [`CumulativeFunction`] stores the polynomial value on the open interior of
//! every piece, plus point masses (atoms) for its jumps. `F(0) = 0` always: an
//! atom at 0 is a jump immediately to the right of 0, and an atom at 1 is the
//! jump from the left limit at 1 to `F(1)`.

use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::polynomial::{isolate_roots, sign_of, sign_on_interval, sign_samples, Poly, RootInterval, Sign};
use crate::rational::{midpoint, Rational};
#[cfg(test)]
use crate::rational::int;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BvError {
    #[error("breakpoints must increase strictly from 0 to 1")]
    InvalidBreakpoints,
    #[error("{pieces} pieces for {breakpoints} breakpoints")]
    PieceCount { pieces: usize, breakpoints: usize },
    #[error("atom at {0} is outside [0, 1] or not at a breakpoint")]
    AtomOffBreakpoint(Rational),
    #[error("jump of {jump} at {at} does not match the atom mass {mass}")]
    JumpMismatch {
        at: Rational,
        jump: Rational,
        mass: Rational,
    },
    #[error("{0} is outside [0, 1]")]
    OutOfDomain(Rational),
    #[error("linear combination of no terms")]
    EmptyCombination,
}

/// Which one-sided limit to take at a jump.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Point mass of the measure `dF`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Atom {
    #[serde(rename = "at", with = "crate::rational::serde_rational")]
    pub location: Rational,
    #[serde(with = "crate::rational::serde_rational")]
    pub mass: Rational,
}

impl Atom {
    pub fn new(location: Rational, mass: Rational) -> Self {
        Atom { location, mass }
    }
}

#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawCumulative", into = "RawCumulative")]
pub struct CumulativeFunction {
    breakpoints: Vec<Rational>,
    pieces: Vec<Poly>,
    atoms: Vec<Atom>,
}

#[derive(Serialize, Deserialize)]
struct RawCumulative {
    #[serde(with = "crate::rational::serde_rational::vec")]
    breakpoints: Vec<Rational>,
    pieces: Vec<Poly>,
    atoms: Vec<Atom>,
}

impl TryFrom<RawCumulative> for CumulativeFunction {
    type Error = BvError;
    fn try_from(raw: RawCumulative) -> Result<Self, BvError> {
        CumulativeFunction::new(raw.breakpoints, raw.pieces, raw.atoms)
    }
}

impl From<CumulativeFunction> for RawCumulative {
    fn from(f: CumulativeFunction) -> Self {
        RawCumulative {
            breakpoints: f.breakpoints,
            pieces: f.pieces,
            atoms: f.atoms,
        }
    }
}

impl CumulativeFunction {
    /// Validates and canonicalizes: atoms merged by location, zero masses
    /// dropped, redundant breakpoints removed.
    pub fn new(breakpoints: Vec<Rational>, pieces: Vec<Poly>, atoms: Vec<Atom>) -> Result<Self, BvError> {
        check_breakpoints(&breakpoints)?;
        if pieces.len() + 1 != breakpoints.len() {
            return Err(BvError::PieceCount {
                pieces: pieces.len(),
                breakpoints: breakpoints.len(),
            });
        }
        let atoms = merge_atoms(atoms);
        for a in &atoms {
            if breakpoints.binary_search(&a.location).is_err() {
                return Err(BvError::AtomOffBreakpoint(a.location.clone()));
            }
        }
        let mass_at = |t: &Rational| {
            atoms
                .iter()
                .find(|a| &a.location == t)
                .map(|a| a.mass.clone())
                .unwrap_or_else(Rational::zero)
        };
        let zero = Rational::zero();
        // F(0) = 0, so the right limit at 0 is the atom mass there
        let start = pieces[0].eval(&zero);
        if start != mass_at(&zero) {
            return Err(BvError::JumpMismatch {
                at: zero.clone(),
                jump: start,
                mass: mass_at(&zero),
            });
        }
        for i in 1..pieces.len() {
            let b = &breakpoints[i];
            let jump = pieces[i].eval(b) - pieces[i - 1].eval(b);
            let mass = mass_at(b);
            if jump != mass {
                return Err(BvError::JumpMismatch {
                    at: b.clone(),
                    jump,
                    mass,
                });
            }
        }
        let mut f = CumulativeFunction {
            breakpoints,
            pieces,
            atoms,
        };
        f.drop_redundant_breakpoints();
        Ok(f)
    }

    /// Builds the function from its interior pieces and its value at 1; the
    /// atoms are read off the jumps.
    pub fn from_pieces(breakpoints: Vec<Rational>, pieces: Vec<Poly>, value_at_one: Rational) -> Result<Self, BvError> {
        check_breakpoints(&breakpoints)?;
        if pieces.len() + 1 != breakpoints.len() {
            return Err(BvError::PieceCount {
                pieces: pieces.len(),
                breakpoints: breakpoints.len(),
            });
        }
        let mut atoms = vec![Atom::new(Rational::zero(), pieces[0].eval(&Rational::zero()))];
        for i in 1..pieces.len() {
            let b = &breakpoints[i];
            atoms.push(Atom::new(b.clone(), pieces[i].eval(b) - pieces[i - 1].eval(b)));
        }
        let last = pieces.last().expect("at least one piece").eval(&Rational::one());
        atoms.push(Atom::new(Rational::one(), value_at_one - last));
        CumulativeFunction::new(breakpoints, pieces, atoms)
    }

    /// Pure-jump function with the given point masses.
    pub fn step(atoms: Vec<Atom>) -> Result<Self, BvError> {
        let atoms = merge_atoms(atoms);
        let mut breakpoints = vec![Rational::zero()];
        for a in &atoms {
            if a.location < Rational::zero() || a.location > Rational::one() {
                return Err(BvError::AtomOffBreakpoint(a.location.clone()));
            }
            if a.location > Rational::zero() && a.location < Rational::one() {
                breakpoints.push(a.location.clone());
            }
        }
        breakpoints.push(Rational::one());
        let mut level = Rational::zero();
        let mut pieces = Vec::with_capacity(breakpoints.len() - 1);
        for b in &breakpoints[..breakpoints.len() - 1] {
            if let Some(a) = atoms.iter().find(|a| &a.location == b) {
                level += &a.mass;
            }
            pieces.push(Poly::constant(level.clone()));
        }
        CumulativeFunction::new(breakpoints, pieces, atoms)
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Poly] {
        &self.pieces
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// `(lo, hi, poly)` for every piece.
    pub fn segments(&self) -> impl Iterator<Item = (&Rational, &Rational, &Poly)> {
        self.breakpoints
            .windows(2)
            .zip(&self.pieces)
            .map(|(w, p)| (&w[0], &w[1], p))
    }

    pub fn atom_mass(&self, t: &Rational) -> Rational {
        self.atoms
            .iter()
            .find(|a| &a.location == t)
            .map(|a| a.mass.clone())
            .unwrap_or_else(Rational::zero)
    }

    /// One-sided limit at `t`. `Right` counts an atom located at `t`, `Left`
    /// does not; `F(0)` and `F(1)` are the left value at 0 and the right value
    /// at 1.
    pub fn eval(&self, t: &Rational, side: Side) -> Result<Rational, BvError> {
        let zero = Rational::zero();
        let one = Rational::one();
        if t < &zero || t > &one {
            return Err(BvError::OutOfDomain(t.clone()));
        }
        let n = self.pieces.len();
        Ok(match side {
            Side::Left => {
                if t.is_zero() {
                    zero
                } else {
                    // piece i covers (b_i, b_{i+1}]
                    let i = self.breakpoints[1..].partition_point(|b| b < t);
                    self.pieces[i].eval(t)
                }
            }
            Side::Right => {
                if t == &one {
                    self.pieces[n - 1].eval(t) + self.atom_mass(t)
                } else {
                    // piece i covers [b_i, b_{i+1})
                    let i = self.breakpoints.partition_point(|b| b <= t) - 1;
                    self.pieces[i].eval(t)
                }
            }
        })
    }

    /// `F(1)`
    pub fn end_value(&self) -> Rational {
        self.eval(&Rational::one(), Side::Right).expect("1 is in the domain")
    }

    /// `Σ coeff_k F_k`, on the union of the breakpoints.
    pub fn linear_combination(terms: &[(Rational, &CumulativeFunction)]) -> Result<Self, BvError> {
        if terms.is_empty() {
            return Err(BvError::EmptyCombination);
        }
        let mut breakpoints: Vec<Rational> = terms
            .iter()
            .flat_map(|(_, f)| f.breakpoints.iter().cloned())
            .collect();
        breakpoints.sort();
        breakpoints.dedup();
        let pieces = breakpoints
            .windows(2)
            .map(|w| {
                terms.iter().fold(Poly::zero(), |acc, (c, f)| {
                    &acc + &f.piece_covering(&w[0], &w[1]).scale(c)
                })
            })
            .collect();
        let atoms = terms
            .iter()
            .flat_map(|(c, f)| {
                f.atoms
                    .iter()
                    .map(move |a| Atom::new(a.location.clone(), &a.mass * c))
            })
            .collect();
        CumulativeFunction::new(breakpoints, pieces, atoms)
    }

    /// `self - other`
    pub fn difference(&self, other: &CumulativeFunction) -> CumulativeFunction {
        CumulativeFunction::linear_combination(&[(Rational::one(), self), (-Rational::one(), other)])
            .expect("difference of valid weights is valid")
    }

    fn piece_covering(&self, lo: &Rational, hi: &Rational) -> &Poly {
        let i = self.breakpoints.partition_point(|b| b <= lo) - 1;
        debug_assert!(hi <= &self.breakpoints[i + 1]);
        &self.pieces[i]
    }

    /// `G(x) = ∫_0^x F(t) dt`.
    pub fn primitive(&self) -> PiecewiseFunction {
        let mut acc = Rational::zero();
        let mut pieces = Vec::with_capacity(self.pieces.len());
        for (lo, hi, p) in self.segments() {
            let anti = p.antiderivative();
            let offset = &acc - anti.eval(lo);
            let g = &anti + &Poly::constant(offset);
            acc = g.eval(hi);
            pieces.push(g);
        }
        PiecewiseFunction {
            breakpoints: self.breakpoints.clone(),
            pieces,
        }
    }

    /// `∫_0^1 F(t) dt`
    pub fn integral(&self) -> Rational {
        self.segments().map(|(lo, hi, p)| p.integrate(lo, hi)).sum()
    }

    /// Exact Stieltjes integral `∫_[0,1] f dF` of a polynomial.
    pub fn stieltjes(&self, f: &Poly) -> Rational {
        let smooth: Rational = self
            .segments()
            .map(|(lo, hi, p)| (f * &p.derivative()).integrate(lo, hi))
            .sum();
        let jumps: Rational = self.atoms.iter().map(|a| f.eval(&a.location) * &a.mass).sum();
        smooth + jumps
    }

    /// `∫_(from,1] f dF`; atoms at `from` are excluded.
    pub fn stieltjes_from(&self, f: &Poly, from: &Rational) -> Rational {
        let smooth: Rational = self
            .segments()
            .filter(|(_, hi, _)| *hi > from)
            .map(|(lo, hi, p)| {
                let lo = if lo < from { from } else { lo };
                (f * &p.derivative()).integrate(lo, hi)
            })
            .sum();
        let jumps: Rational = self
            .atoms
            .iter()
            .filter(|a| &a.location > from)
            .map(|a| f.eval(&a.location) * &a.mass)
            .sum();
        smooth + jumps
    }

    /// `∫_0^1 t^k dF(t)`
    pub fn moment(&self, k: usize) -> Rational {
        self.stieltjes(&Poly::monomial(Rational::one(), k))
    }

    /// Nondecreasing, nonnegative jumps, total mass one.
    pub fn is_cdf(&self) -> bool {
        self.atoms.iter().all(|a| a.mass >= Rational::zero())
            && self
                .segments()
                .all(|(lo, hi, p)| sign_on_interval(&p.derivative(), lo, hi).is_nonnegative())
            && self.end_value().is_one()
    }

    fn drop_redundant_breakpoints(&mut self) {
        let mut i = 1;
        while i < self.pieces.len() {
            let b = &self.breakpoints[i];
            let has_atom = self.atoms.iter().any(|a| &a.location == b);
            if !has_atom && self.pieces[i] == self.pieces[i - 1] {
                self.pieces.remove(i);
                self.breakpoints.remove(i);
            } else {
                i += 1;
            }
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

impl fmt::Debug for CumulativeFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CumulativeFunction {}", self.to_json())
    }
}

impl fmt::Display for CumulativeFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (lo, hi, p) in self.segments() {
            writeln!(f, "  ({lo}, {hi}): {p}")?;
        }
        for a in &self.atoms {
            writeln!(f, "  atom {} at {}", a.mass, a.location)?;
        }
        Ok(())
    }
}

fn check_breakpoints(b: &[Rational]) -> Result<(), BvError> {
    let ok = b.len() >= 2
        && b[0].is_zero()
        && b[b.len() - 1].is_one()
        && b.windows(2).all(|w| w[0] < w[1]);
    if ok {
        Ok(())
    } else {
        Err(BvError::InvalidBreakpoints)
    }
}

fn merge_atoms(mut atoms: Vec<Atom>) -> Vec<Atom> {
    atoms.sort_by(|a, b| a.location.cmp(&b.location));
    let mut out: Vec<Atom> = Vec::with_capacity(atoms.len());
    for a in atoms {
        match out.last_mut() {
            Some(last) if last.location == a.location => last.mass += a.mass,
            _ => out.push(a),
        }
    }
    out.retain(|a| !a.mass.is_zero());
    out
}

/// Continuous piecewise polynomial on `[0, 1]`, e.g. a primitive `G`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiecewiseFunction {
    breakpoints: Vec<Rational>,
    pieces: Vec<Poly>,
}

impl PiecewiseFunction {
    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Poly] {
        &self.pieces
    }

    pub fn segments(&self) -> impl Iterator<Item = (&Rational, &Rational, &Poly)> {
        self.breakpoints
            .windows(2)
            .zip(&self.pieces)
            .map(|(w, p)| (&w[0], &w[1], p))
    }

    /// Value at `x`, clamped to `[0, 1]`.
    pub fn eval(&self, x: &Rational) -> Rational {
        let i = self.breakpoints[1..self.breakpoints.len() - 1].partition_point(|b| b < x);
        self.pieces[i].eval(x)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let i = self.breakpoints[1..self.breakpoints.len() - 1]
            .partition_point(|b| crate::rational::to_f64(b) < x);
        self.pieces[i].eval_f64(x)
    }

    /// Sign on all of `[0, 1]`.
    pub fn sign(&self) -> Sign {
        self.segments()
            .map(|(lo, hi, p)| sign_on_interval(p, lo, hi))
            .fold(Sign::IdenticallyZero, Sign::join)
    }

    /// Points where the function is nonzero, covering every strict-sign region,
    /// together with the critical points of each piece. Values included.
    pub fn nonzero_samples(&self) -> Vec<(Rational, Rational)> {
        let mut pts: Vec<Rational> = Vec::new();
        for (lo, hi, p) in self.segments() {
            pts.extend(sign_samples(p, lo, hi));
            let d = p.derivative();
            if !d.is_zero() {
                for r in isolate_roots(&d, lo, hi).expect("proper interval") {
                    let r = crate::polynomial::refine_root(&d, &r, 32);
                    pts.push(r.midpoint());
                }
            }
        }
        pts.sort();
        pts.dedup();
        pts.into_iter()
            .map(|t| {
                let v = self.eval(&t);
                (t, v)
            })
            .filter(|(_, v)| !v.is_zero())
            .collect()
    }
}

/// Direction in which `F1 - F2` changes sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CrossingDirection {
    NegativeToPositive,
    PositiveToNegative,
}

impl CrossingDirection {
    pub fn reversed(self) -> Self {
        match self {
            CrossingDirection::NegativeToPositive => CrossingDirection::PositiveToNegative,
            CrossingDirection::PositiveToNegative => CrossingDirection::NegativeToPositive,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Crossing {
    pub location: RootInterval,
    pub direction: CrossingDirection,
}

// Maximal stretch of one piece where F1 - F2 keeps a sign.
struct SignStretch {
    left: RootInterval,
    right: RootInterval,
    sign: i8,
}

/// Sign changes of `F1 - F2` on `(0, 1)`, in order. A touch without a sign
/// change is not reported; a stretch where the two functions coincide is
/// reported as one crossing spanning it when the sign differs on both sides.
pub fn crossing_points(f1: &CumulativeFunction, f2: &CumulativeFunction) -> Vec<Crossing> {
    let diff = f1.difference(f2);
    let mut stretches = Vec::new();
    for (lo, hi, d) in diff.segments() {
        if d.is_zero() {
            stretches.push(SignStretch {
                left: RootInterval::exact(lo.clone()),
                right: RootInterval::exact(hi.clone()),
                sign: 0,
            });
            continue;
        }
        let mut bounds = vec![RootInterval::exact(lo.clone())];
        bounds.extend(
            isolate_roots(d, lo, hi)
                .expect("nonzero piece on a proper interval")
                .into_iter()
                .filter(|r| !(r.is_exact() && (&r.lo == lo || &r.lo == hi))),
        );
        bounds.push(RootInterval::exact(hi.clone()));
        for w in bounds.windows(2) {
            let probe = if w[0].hi < w[1].lo {
                midpoint(&w[0].hi, &w[1].lo)
            } else {
                w[0].hi.clone()
            };
            stretches.push(SignStretch {
                left: w[0].clone(),
                right: w[1].clone(),
                sign: sign_of(&d.eval(&probe)),
            });
        }
    }
    let mut out = Vec::new();
    let mut last: Option<(i8, &RootInterval)> = None;
    for s in stretches.iter().filter(|s| s.sign != 0) {
        if let Some((sign, right)) = last {
            if sign != s.sign {
                let direction = if sign < 0 {
                    CrossingDirection::NegativeToPositive
                } else {
                    CrossingDirection::PositiveToNegative
                };
                out.push(Crossing {
                    location: RootInterval {
                        lo: right.lo.clone(),
                        hi: s.left.hi.clone(),
                    },
                    direction,
                });
            }
        }
        last = Some((s.sign, &s.right));
    }
    out
}
