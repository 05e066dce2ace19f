//! Floating-point evaluation of the functionals on arbitrary test functions.
//!
//! This is the numeric cross-check of the exact engine: adaptive
//! Gauss-Kronrod quadrature whose initial partition is seeded with every known
//! kink of the integrand (hinge knots, piecewise-linear knots, weight
//! breakpoints), so piecewise-smooth integrands converge at full speed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bvfunction::CumulativeFunction;
use crate::catalog::{make_weight, CatalogError, FunctionalSpec};
use crate::rational::{to_f64, Rational};

pub const DEFAULT_TOL: f64 = 1e-12;
const MAX_SUBDIVISIONS: usize = 4000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error("tolerance {tol:e} not met after {subdivisions} subdivisions (error estimate {error_estimate:e})")]
    ToleranceNotMet {
        tol: f64,
        error_estimate: f64,
        subdivisions: usize,
    },
    #[error("invalid integration request: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub subdivisions: usize,
}

impl QuadratureResult {
    fn exact(value: f64) -> Self {
        QuadratureResult {
            value,
            error_estimate: 0.0,
            subdivisions: 0,
        }
    }

    fn combine(self, other: QuadratureResult) -> QuadratureResult {
        QuadratureResult {
            value: self.value + other.value,
            error_estimate: self.error_estimate + other.error_estimate,
            subdivisions: self.subdivisions + other.subdivisions,
        }
    }
}

/// Scalar test function used to probe the quantifier "for all convex f".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TestFunction {
    /// `max(t - c, 0)`
    Hinge { c: f64 },
    /// `t^p`
    Power { p: i32 },
    /// `exp(λ t)`
    Exponential { lambda: f64 },
    /// Continuous, piecewise linear: `value_at_zero` at 0, slope `slopes[i]`
    /// between `knots[i-1]` and `knots[i]`, extended linearly past the ends.
    PiecewiseLinearConvex {
        knots: Vec<f64>,
        slopes: Vec<f64>,
        value_at_zero: f64,
    },
    /// `β t + δ`
    Affine { beta: f64, delta: f64 },
    /// `Σ c_k t^k`
    Polynomial { coeffs: Vec<f64> },
    /// `t ↦ inner(offset + scale·t)`
    Rescaled {
        inner: Box<TestFunction>,
        offset: f64,
        scale: f64,
    },
}

impl TestFunction {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            TestFunction::Hinge { c } => (t - c).max(0.0),
            TestFunction::Power { p } => t.powi(*p),
            TestFunction::Exponential { lambda } => (lambda * t).exp(),
            TestFunction::PiecewiseLinearConvex {
                knots,
                slopes,
                value_at_zero,
            } => {
                // value at the knot preceding t, walking from 0
                let mut v = *value_at_zero;
                let mut prev = 0.0;
                for (i, &k) in knots.iter().enumerate() {
                    if t <= k {
                        return v + slopes[i] * (t - prev);
                    }
                    v += slopes[i] * (k - prev);
                    prev = k;
                }
                v + slopes[knots.len()] * (t - prev)
            }
            TestFunction::Affine { beta, delta } => beta * t + delta,
            TestFunction::Polynomial { coeffs } => coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c),
            TestFunction::Rescaled {
                inner,
                offset,
                scale,
            } => inner.eval(offset + scale * t),
        }
    }

    /// Points where the function is not smooth.
    pub fn kinks(&self) -> Vec<f64> {
        match self {
            TestFunction::Hinge { c } => vec![*c],
            TestFunction::PiecewiseLinearConvex { knots, .. } => knots.clone(),
            TestFunction::Rescaled {
                inner,
                offset,
                scale,
            } => inner.kinks().iter().map(|k| (k - offset) / scale).collect(),
            _ => Vec::new(),
        }
    }

    /// Convexity by construction, checked from the parameters.
    pub fn is_convex(&self) -> bool {
        match self {
            TestFunction::Hinge { .. }
            | TestFunction::Exponential { .. }
            | TestFunction::Affine { .. } => true,
            TestFunction::Power { p } => *p == 0 || *p == 1 || (*p > 0 && p % 2 == 0),
            TestFunction::PiecewiseLinearConvex { knots, slopes, .. } => {
                slopes.len() == knots.len() + 1
                    && slopes.windows(2).all(|w| w[0] <= w[1])
                    && knots.windows(2).all(|w| w[0] < w[1])
            }
            TestFunction::Polynomial { coeffs } => coeffs.len() <= 2,
            TestFunction::Rescaled { inner, .. } => inner.is_convex(),
        }
    }

    pub fn is_affine(&self) -> bool {
        match self {
            TestFunction::Affine { .. } => true,
            TestFunction::PiecewiseLinearConvex { knots, .. } => knots.is_empty(),
            TestFunction::Polynomial { coeffs } => coeffs.len() <= 2,
            TestFunction::Rescaled { inner, .. } => inner.is_affine(),
            _ => false,
        }
    }

    /// `φ(t) = f(x + t(y - x))`, the same function seen on `[0, 1]`.
    pub fn rescaled(&self, x: f64, y: f64) -> TestFunction {
        TestFunction::Rescaled {
            inner: Box::new(self.clone()),
            offset: x,
            scale: y - x,
        }
    }
}

// 15-point Kronrod nodes (positive half) and weights, with the embedded
// 7-point Gauss weights.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
    // error below which the estimate is dominated by rounding
    floor: f64,
}

fn gk15<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Panel {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs = kronrod.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let (a, b) = (f(center - dx), f(center + dx));
        fv1[j] = a;
        fv2[j] = b;
        kronrod += WGK[j] * (a + b);
        abs += WGK[j] * (a.abs() + b.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (a + b);
        }
    }
    let mean = kronrod * 0.5;
    let mut asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let width = half.abs();
    let (value, abs, asc) = (kronrod * half, abs * width, asc * width);
    let mut error = ((kronrod - gauss) * half).abs();
    if asc != 0.0 && error != 0.0 {
        error = asc * (200.0 * error / asc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * abs;
    Panel {
        lo,
        hi,
        value,
        error: error.max(floor),
        floor,
    }
}

/// Adaptive Gauss-Kronrod integration of a closure over `[lo, hi]`. `seeds`
/// are split points of the initial partition; points outside `(lo, hi)` are
/// ignored.
pub fn integrate_with<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    seeds: &[f64],
    tol: f64,
) -> Result<QuadratureResult, QuadratureError> {
    if !(lo < hi) || !(tol > 0.0) {
        return Err(QuadratureError::InvalidInput(format!(
            "need lo < hi and tol > 0, got [{lo}, {hi}] tol {tol}"
        )));
    }
    let mut cuts: Vec<f64> = seeds.iter().copied().filter(|s| *s > lo && *s < hi).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut edges = vec![lo];
    edges.extend(cuts);
    edges.push(hi);
    let mut panels: Vec<Panel> = edges.windows(2).map(|w| gk15(&f, w[0], w[1])).collect();
    let mut subdivisions = 0;
    loop {
        let error: f64 = panels.iter().map(|p| p.error).sum();
        // panels at their rounding floor cannot improve by splitting
        let refinable = panels
            .iter()
            .enumerate()
            .filter(|(_, p)| p.error > p.floor && (p.hi - p.lo) > 1e-15 * (hi - lo))
            .max_by(|a, b| a.1.error.total_cmp(&b.1.error))
            .map(|(i, _)| i);
        let stuck = refinable.is_none() && panels.iter().any(|p| p.error > p.floor);
        if error <= tol || (refinable.is_none() && !stuck) {
            return Ok(QuadratureResult {
                value: panels.iter().map(|p| p.value).sum(),
                error_estimate: error,
                subdivisions,
            });
        }
        if stuck || subdivisions >= MAX_SUBDIVISIONS {
            return Err(QuadratureError::ToleranceNotMet {
                tol,
                error_estimate: error,
                subdivisions,
            });
        }
        let i = refinable.expect("checked above");
        let p = panels.swap_remove(i);
        let mid = 0.5 * (p.lo + p.hi);
        panels.push(gk15(&f, p.lo, mid));
        panels.push(gk15(&f, mid, p.hi));
        subdivisions += 1;
    }
}

/// `∫_lo^hi f`, with the kinks of `f` as initial split points.
pub fn integrate(f: &TestFunction, lo: f64, hi: f64, tol: f64) -> Result<QuadratureResult, QuadratureError> {
    integrate_with(|t| f.eval(t), lo, hi, &f.kinks(), tol)
}

/// `∫_[0,1] f dF`: each piece against its density, plus the atoms.
pub fn stieltjes_numeric(f: &TestFunction, weight: &CumulativeFunction, tol: f64) -> Result<QuadratureResult, QuadratureError> {
    if !(tol > 0.0) {
        return Err(QuadratureError::InvalidInput(format!("tol {tol}")));
    }
    let kinks = f.kinks();
    let smooth: Vec<_> = weight
        .segments()
        .map(|(lo, hi, p)| (to_f64(lo), to_f64(hi), p.derivative()))
        .filter(|(_, _, d)| !d.is_zero())
        .collect();
    let piece_tol = tol / smooth.len().max(1) as f64;
    let mut total = QuadratureResult::exact(0.0);
    for (lo, hi, density) in &smooth {
        let r = integrate_with(|t| f.eval(t) * density.eval_f64(t), *lo, *hi, &kinks, piece_tol)?;
        total = total.combine(r);
    }
    let jumps: f64 = weight
        .atoms()
        .iter()
        .map(|a| f.eval(to_f64(&a.location)) * to_f64(&a.mass))
        .sum();
    Ok(total.combine(QuadratureResult::exact(jumps)))
}

/// How [`double_average_direct`] evaluates the double integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DoubleAverageMethod {
    /// One-dimensional integral against the triangular density of `(s+t)/2`.
    #[default]
    Tent,
    /// Nested quadrature over the square.
    Tensor,
}

/// `(1/(y-x)²) ∫_x^y ∫_x^y f((s+t)/2) ds dt`, evaluated without `Φ`.
pub fn double_average_direct(
    f: &TestFunction,
    x: f64,
    y: f64,
    tol: f64,
    method: DoubleAverageMethod,
) -> Result<QuadratureResult, QuadratureError> {
    if !(x < y) {
        return Err(QuadratureError::InvalidInput(format!("need x < y, got [{x}, {y}]")));
    }
    let phi = f.rescaled(x, y);
    let kinks = phi.kinks();
    match method {
        DoubleAverageMethod::Tent => {
            let mut seeds = kinks.clone();
            seeds.push(0.5);
            integrate_with(
                |u| phi.eval(u) * 4.0 * u.min(1.0 - u),
                0.0,
                1.0,
                &seeds,
                tol,
            )
        }
        DoubleAverageMethod::Tensor => {
            // inner kinks at s = 2k - t; the outer integrand bends where
            // those cross the ends of [0, 1]
            let outer_seeds: Vec<f64> = kinks.iter().flat_map(|k| [2.0 * k, 2.0 * k - 1.0]).collect();
            let inner_tol = tol / 10.0;
            let failure = std::cell::Cell::new(None);
            let outer = integrate_with(
                |t| {
                    let seeds: Vec<f64> = kinks.iter().map(|k| 2.0 * k - t).collect();
                    match integrate_with(|s| phi.eval(0.5 * (s + t)), 0.0, 1.0, &seeds, inner_tol) {
                        Ok(r) => r.value,
                        Err(e) => {
                            failure.set(Some(e));
                            f64::NAN
                        }
                    }
                },
                0.0,
                1.0,
                &outer_seeds,
                tol / 2.0,
            );
            if let Some(e) = failure.into_inner() {
                return Err(e);
            }
            let r = outer?;
            Ok(QuadratureResult {
                error_estimate: r.error_estimate + inner_tol,
                ..r
            })
        }
    }
}

/// `∫_x^t f` (order 1) or `∫_x^t ∫_x^s f` (order 2), by nested quadrature.
pub fn iterated_antiderivative(f: &TestFunction, x: f64, t: f64, order: u32, tol: f64) -> Result<f64, QuadratureError> {
    if t == x {
        return Ok(0.0);
    }
    match order {
        0 => Ok(f.eval(t)),
        1 => Ok(integrate(f, x, t, tol)?.value),
        2 => {
            let kinks = f.kinks();
            let failure = std::cell::Cell::new(None);
            let r = integrate_with(
                |s| match iterated_antiderivative(f, x, s, 1, tol / 10.0) {
                    Ok(v) => v,
                    Err(e) => {
                        failure.set(Some(e));
                        f64::NAN
                    }
                },
                x,
                t,
                &kinks,
                tol,
            );
            if let Some(e) = failure.into_inner() {
                return Err(e);
            }
            Ok(r?.value)
        }
        _ => Err(QuadratureError::InvalidInput(format!("antiderivative order {order}"))),
    }
}

/// A functional evaluated on `[x, y]`, with the closed-form route in terms of
/// numerically computed `F` and `Φ` kept as a second estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionalEstimate {
    pub value: f64,
    pub error_estimate: f64,
    pub subdivisions: usize,
    pub antiderivative_route: Option<f64>,
}

/// Evaluates `spec` on `f` over `[x, y]` by normalizing to `[0, 1]` and
/// integrating against the weight.
pub fn functional_numeric(
    spec: &FunctionalSpec,
    f: &TestFunction,
    x: f64,
    y: f64,
    tol: f64,
) -> Result<FunctionalEstimate, QuadratureError> {
    if !(x < y) {
        return Err(QuadratureError::InvalidInput(format!("need x < y, got [{x}, {y}]")));
    }
    let weight = make_weight(spec)?;
    let r = stieltjes_numeric(&f.rescaled(x, y), &weight, tol)?;
    let route = antiderivative_route(spec, f, x, y, tol)?;
    Ok(FunctionalEstimate {
        value: r.value,
        error_estimate: r.error_estimate,
        subdivisions: r.subdivisions,
        antiderivative_route: Some(route),
    })
}

/// The defining formula of `spec` on `[x, y]`, with `F' = f`, `Φ' = F`,
/// `F(x) = Φ(x) = 0` computed by quadrature.
pub fn antiderivative_route(spec: &FunctionalSpec, f: &TestFunction, x: f64, y: f64, tol: f64) -> Result<f64, QuadratureError> {
    spec.validate()?;
    let h = y - x;
    let at = |s: f64| x + s * h;
    let big_f = |s: f64| iterated_antiderivative(f, x, at(s), 1, tol);
    let phi = |s: f64| iterated_antiderivative(f, x, at(s), 2, tol);
    let val = |s: f64| f.eval(at(s));
    let second_diff = || -> Result<f64, QuadratureError> { Ok((phi(0.0)? - 2.0 * phi(0.5)? + phi(1.0)?) / (h * h)) };
    let r = |q: &Rational| to_f64(q);
    Ok(match spec {
        FunctionalSpec::Uniform => (big_f(1.0)? - big_f(0.0)?) / h,
        FunctionalSpec::Midpoint => val(0.5),
        FunctionalSpec::Trapezoid => 0.5 * (val(0.0) + val(1.0)),
        FunctionalSpec::DoubleAverage => 4.0 * second_diff()?,
        FunctionalSpec::SimpsonLike => val(0.0) / 6.0 + 2.0 * val(0.5) / 3.0 + val(1.0) / 6.0,
        FunctionalSpec::CompositeQuarter => {
            (8.0 * phi(0.0)? - 16.0 * phi(0.25)? + 16.0 * phi(0.5)? - 16.0 * phi(0.75)? + 8.0 * phi(1.0)?) / (h * h)
        }
        FunctionalSpec::T { a } => {
            let a = r(a);
            (1.0 - a / 2.0) * (big_f(1.0)? - big_f(0.0)?) / h + 2.0 * a * second_diff()?
        }
        FunctionalSpec::EvalAt { alpha } => val(1.0 - r(alpha)),
        FunctionalSpec::Endpoints { alpha } => {
            let a = r(alpha);
            a * val(0.0) + (1.0 - a) * val(1.0)
        }
        FunctionalSpec::S1 { alpha } => {
            let a = r(alpha);
            let b = 1.0 - a;
            (-(a / b) * big_f(0.0)? + (2.0 * a - 1.0) / (a * b) * big_f(b)? + (b / a) * big_f(1.0)?) / h
        }
        FunctionalSpec::S2 { alpha } => {
            let a = r(alpha);
            ((4.0 - 6.0 * a) * big_f(1.0)? + (2.0 - 6.0 * a) * big_f(0.0)?) / h
                - (6.0 - 12.0 * a) * (phi(1.0)? - phi(0.0)?) / (h * h)
        }
        FunctionalSpec::Mixture { terms } => {
            let mut acc = 0.0;
            for (c, s) in terms {
                acc += r(c) * antiderivative_route(s, f, x, y, tol)?;
            }
            acc
        }
    })
}

/// Random convex piecewise-linear function on `[0, 1]`, deterministic per
/// seed: knots uniform in `(0, 1)` and sorted, slopes uniform in `[-2, 2]` and
/// sorted ascending, value at 0 uniform in `[-1, 1]`.
pub fn random_convex(seed: u64, knot_count: usize) -> TestFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut knots: Vec<f64> = Vec::with_capacity(knot_count);
    while knots.len() < knot_count {
        let k: f64 = rng.gen();
        if k > 0.0 && !knots.contains(&k) {
            knots.push(k);
        }
    }
    knots.sort_by(f64::total_cmp);
    let mut slopes: Vec<f64> = (0..=knot_count).map(|_| rng.gen_range(-2.0..=2.0)).collect();
    slopes.sort_by(f64::total_cmp);
    let value_at_zero = rng.gen_range(-1.0..=1.0);
    TestFunction::PiecewiseLinearConvex {
        knots,
        slopes,
        value_at_zero,
    }
}
