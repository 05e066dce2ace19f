//! Exact univariate polynomials over the rationals, with Sturm-sequence root
//! isolation and sign classification on closed intervals.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::{common_denominator, int, midpoint, simplest_between, to_f64, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("root isolation of the zero polynomial")]
    ZeroPolynomial,
    #[error("empty interval [{lo}, {hi}]")]
    EmptyInterval { lo: Rational, hi: Rational },
}

/// Polynomial with rational coefficients, lowest degree first.
///
/// Trailing zeros are trimmed on construction, so the zero polynomial has no
/// coefficients and equality is structural.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Poly {
    #[serde(with = "crate::rational::serde_rational::vec")]
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Poly::new(vec![c])
    }

    /// `c * t^k`
    pub fn monomial(c: Rational, k: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); k + 1];
        coeffs[k] = c;
        Poly::new(coeffs)
    }

    /// The identity polynomial `t`.
    pub fn identity() -> Self {
        Poly::monomial(Rational::one(), 1)
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| int(c)).collect())
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    /// Coefficient of `t^k`, zero past the degree.
    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * t + c)
    }

    pub fn eval_f64(&self, t: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * t + to_f64(c))
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        Poly::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * int(k as i64))
                .collect(),
        )
    }

    /// The antiderivative vanishing at 0.
    pub fn antiderivative(&self) -> Poly {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(Rational::zero());
        coeffs.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c / int(k as i64 + 1)),
        );
        Poly::new(coeffs)
    }

    /// `∫_lo^hi p(t) dt`
    pub fn integrate(&self, lo: &Rational, hi: &Rational) -> Rational {
        let prim = self.antiderivative();
        prim.eval(hi) - prim.eval(lo)
    }

    /// `p(t + shift)`, by Horner in the shifted variable.
    pub fn shift(&self, shift: &Rational) -> Poly {
        let lin = Poly::new(vec![shift.clone(), Rational::one()]);
        self.coeffs
            .iter()
            .rev()
            .fold(Poly::zero(), |acc, c| &(&acc * &lin) + &Poly::constant(c.clone()))
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        let lead = divisor.leading().expect("division by the zero polynomial");
        let dd = divisor.coeffs.len() - 1;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![Rational::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] / lead;
            if !c.is_zero() {
                for (j, d) in divisor.coeffs.iter().enumerate() {
                    rem[k + j] -= &c * d;
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Poly::new(quot), Poly::new(rem))
    }

    pub fn monic(&self) -> Poly {
        match self.leading() {
            Some(lead) => self.scale(&lead.recip()),
            None => Poly::zero(),
        }
    }

    /// Monic greatest common divisor.
    pub fn gcd(a: &Poly, b: &Poly) -> Poly {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Product of the distinct irreducible factors: same roots, all simple.
    pub fn square_free_part(&self) -> Poly {
        if self.degree().unwrap_or(0) == 0 {
            return self.clone();
        }
        let g = Poly::gcd(self, &self.derivative());
        self.div_rem(&g).0
    }

    /// Scaled to coprime integer coefficients (as rationals).
    fn primitive_integer(&self) -> Vec<BigInt> {
        let den = common_denominator(self.coeffs.iter());
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c * Rational::from_integer(den.clone())).to_integer())
            .collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        if g.is_zero() {
            return ints;
        }
        ints.into_iter().map(|c| c / &g).collect()
    }

    fn sign_at(&self, t: &Rational) -> i8 {
        let v = self.eval(t);
        if v.is_positive() {
            1
        } else if v.is_negative() {
            -1
        } else {
            0
        }
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
            }
            first = false;
            match k {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{mag}*")?;
                    }
                    if k == 1 {
                        f.write_str("t")?;
                    } else {
                        write!(f, "t^{k}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

/// Closed rational interval isolating one real root; `lo == hi` when the
/// root is known exactly.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RootInterval {
    #[serde(with = "crate::rational::serde_rational")]
    pub lo: Rational,
    #[serde(with = "crate::rational::serde_rational")]
    pub hi: Rational,
}

impl RootInterval {
    pub fn exact(r: Rational) -> Self {
        RootInterval { lo: r.clone(), hi: r }
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn midpoint(&self) -> Rational {
        midpoint(&self.lo, &self.hi)
    }

    pub fn contains(&self, t: &Rational) -> bool {
        &self.lo <= t && t <= &self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }
}

impl fmt::Display for RootInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact() {
            write!(f, "{}", self.lo)
        } else {
            write!(f, "[{}, {}]", self.lo, self.hi)
        }
    }
}

/// Sign of a polynomial (or piecewise function) over an interval. Isolated
/// zeros do not make a function `Mixed`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Nonnegative,
    Nonpositive,
    IdenticallyZero,
    Mixed,
}

impl Sign {
    /// `≥ 0` everywhere, which includes the zero function.
    pub fn is_nonnegative(self) -> bool {
        matches!(self, Sign::Nonnegative | Sign::IdenticallyZero)
    }

    pub fn is_nonpositive(self) -> bool {
        matches!(self, Sign::Nonpositive | Sign::IdenticallyZero)
    }

    /// Combines the classifications of two pieces of one function.
    pub fn join(self, other: Sign) -> Sign {
        use Sign::*;
        match (self, other) {
            (IdenticallyZero, s) | (s, IdenticallyZero) => s,
            (Mixed, _) | (_, Mixed) => Mixed,
            (a, b) if a == b => a,
            _ => Mixed,
        }
    }

    pub fn from_signs<I: IntoIterator<Item = i8>>(signs: I) -> Sign {
        let (mut pos, mut neg) = (false, false);
        for s in signs {
            pos |= s > 0;
            neg |= s < 0;
        }
        match (pos, neg) {
            (false, false) => Sign::IdenticallyZero,
            (true, false) => Sign::Nonnegative,
            (false, true) => Sign::Nonpositive,
            (true, true) => Sign::Mixed,
        }
    }
}

/// Sturm sequence of a square-free polynomial.
struct Sturm {
    seq: Vec<Poly>,
}

impl Sturm {
    fn new(p: &Poly) -> Self {
        let mut seq = vec![p.clone()];
        let d = p.derivative();
        if !d.is_zero() {
            seq.push(d);
            loop {
                let n = seq.len();
                let (_, r) = seq[n - 2].div_rem(&seq[n - 1]);
                if r.is_zero() {
                    break;
                }
                seq.push(-r);
            }
        }
        Sturm { seq }
    }

    fn variations(&self, t: &Rational) -> usize {
        let mut last = 0i8;
        let mut count = 0;
        for p in &self.seq {
            let s = p.sign_at(t);
            if s == 0 {
                continue;
            }
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }

    /// Number of distinct roots in `(a, b]`.
    fn count(&self, a: &Rational, b: &Rational) -> usize {
        self.variations(a) - self.variations(b)
    }
}

/// Isolates every real root of `p` in the closed interval `[lo, hi]`.
///
/// The result is sorted and pairwise disjoint. Each interval holds exactly one
/// distinct root; non-degenerate intervals have endpoints where `p` does not
/// vanish. Rational roots are always reported as degenerate intervals.
pub fn isolate_roots(p: &Poly, lo: &Rational, hi: &Rational) -> Result<Vec<RootInterval>, PolyError> {
    isolate(p, lo, hi, true)
}

// `snap = false` skips the exact rational-root search, which is all sign
// classification needs.
fn isolate(p: &Poly, lo: &Rational, hi: &Rational, snap: bool) -> Result<Vec<RootInterval>, PolyError> {
    if p.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    if lo >= hi {
        return Err(PolyError::EmptyInterval {
            lo: lo.clone(),
            hi: hi.clone(),
        });
    }
    let q = p.square_free_part();
    let sturm = Sturm::new(&q);
    let mut out = Vec::new();
    if q.sign_at(lo) == 0 {
        out.push(RootInterval::exact(lo.clone()));
    }
    let n = sturm.count(lo, hi);
    isolate_rec(&q, &sturm, lo.clone(), hi.clone(), n, snap, &mut out);
    Ok(out)
}

fn isolate_rec(
    q: &Poly,
    sturm: &Sturm,
    a: Rational,
    b: Rational,
    n: usize,
    snap: bool,
    out: &mut Vec<RootInterval>,
) {
    if n == 0 {
        return;
    }
    if n == 1 {
        if q.sign_at(&b) == 0 {
            out.push(RootInterval::exact(b));
            return;
        }
        if q.sign_at(&a) != 0 {
            out.push(if snap { snap_rational_root(q, a, b) } else { RootInterval { lo: a, hi: b } });
            return;
        }
        // `a` is the (excluded) root of a neighbouring interval: shrink
    }
    let m = midpoint(&a, &b);
    let left = sturm.count(&a, &m);
    isolate_rec(q, sturm, a, m.clone(), left, snap, out);
    isolate_rec(q, sturm, m, b, n - left, snap, out);
}

/// Given a sign-changing bracket `(a, b)` of a simple root of `q`, returns the
/// exact root when it is rational and the bracket otherwise.
///
/// A rational root of the primitive integer form has denominator dividing the
/// leading coefficient `L`; once the bracket is narrower than `1/L²` at most one
/// such fraction fits, and it is the simplest rational in the bracket.
fn snap_rational_root(q: &Poly, mut a: Rational, mut b: Rational) -> RootInterval {
    let ints = q.primitive_integer();
    let lead = ints.last().expect("nonzero polynomial").abs();
    let limit = Rational::new(BigInt::one(), &lead * &lead);
    let sa = q.sign_at(&a);
    while &b - &a >= limit {
        let m = midpoint(&a, &b);
        match q.sign_at(&m) {
            0 => return RootInterval::exact(m),
            s if s == sa => a = m,
            _ => b = m,
        }
    }
    let cand = simplest_between(&a, &b);
    if cand.denom() <= &lead && q.sign_at(&cand) == 0 {
        return RootInterval::exact(cand);
    }
    RootInterval { lo: a, hi: b }
}

/// Shrinks an isolating interval of a root of `p` by `steps` bisections.
pub fn refine_root(p: &Poly, interval: &RootInterval, steps: usize) -> RootInterval {
    if interval.is_exact() {
        return interval.clone();
    }
    let q = p.square_free_part();
    let (mut a, mut b) = (interval.lo.clone(), interval.hi.clone());
    let sa = q.sign_at(&a);
    for _ in 0..steps {
        let m = midpoint(&a, &b);
        match q.sign_at(&m) {
            0 => return RootInterval::exact(m),
            s if s == sa => a = m,
            _ => b = m,
        }
    }
    RootInterval { lo: a, hi: b }
}

/// Points of `[lo, hi]` where `p` is nonzero, at least one inside every
/// maximal subinterval on which `p` keeps a strict sign. Sorted ascending.
pub fn sign_samples(p: &Poly, lo: &Rational, hi: &Rational) -> Vec<Rational> {
    if p.is_zero() || lo > hi {
        return Vec::new();
    }
    if lo == hi {
        return if p.sign_at(lo) != 0 {
            vec![lo.clone()]
        } else {
            Vec::new()
        };
    }
    let roots = isolate(p, lo, hi, false).expect("nonzero polynomial, proper interval");
    let mut cands: Vec<Rational> = vec![lo.clone(), hi.clone()];
    for r in &roots {
        cands.push(r.lo.clone());
        cands.push(r.hi.clone());
    }
    cands.sort();
    cands.dedup();
    let mids: Vec<Rational> = cands.windows(2).map(|w| midpoint(&w[0], &w[1])).collect();
    cands.extend(mids);
    cands.sort();
    cands.retain(|t| p.sign_at(t) != 0);
    cands
}

/// Exact sign classification of `p` on `[lo, hi]`.
pub fn sign_on_interval(p: &Poly, lo: &Rational, hi: &Rational) -> Sign {
    if p.is_zero() {
        return Sign::IdenticallyZero;
    }
    let samples = sign_samples(p, lo, hi);
    Sign::from_signs(samples.iter().map(|t| p.sign_at(t)))
}

pub(crate) fn sign_of(v: &Rational) -> i8 {
    if v.is_positive() {
        1
    } else if v.is_negative() {
        -1
    } else {
        0
    }
}
