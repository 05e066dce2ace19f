//! Acceptance criteria, one line per criterion. Runs without the libtest
//! harness so the lines are always printed; exits non-zero on any failure.

use std::process::ExitCode;
use std::time::Instant;

use hhorder::bvfunction::{crossing_points, CumulativeFunction};
use hhorder::catalog::{make_weight, FunctionalSpec};
use hhorder::convex_order::{levin_stechkin_compare, witness_functions, RelationKind};
use hhorder::harness::{find_threshold, moment_flip, Direction, Family};
use hhorder::quadrature::{functional_numeric, iterated_antiderivative, random_convex, stieltjes_numeric, TestFunction};
use hhorder::rational::{int, rat, to_f64, Rational};
use num_traits::{One, Signed};

use RelationKind::{Equal, GreaterOrEqual, Incomparable, LessOrEqual};

type Outcome = Result<String, String>;

fn weight(s: &FunctionalSpec) -> CumulativeFunction {
    make_weight(s).expect("valid spec")
}

fn kind(a: &FunctionalSpec, b: &FunctionalSpec) -> RelationKind {
    levin_stechkin_compare(&weight(a), &weight(b)).kind()
}

fn check_all(cases: &[(FunctionalSpec, FunctionalSpec, RelationKind)]) -> Outcome {
    let bad: Vec<String> = cases
        .iter()
        .filter_map(|(a, b, want)| {
            let got = kind(a, b);
            (got != *want).then(|| format!("{a} vs {b}: got {got}, want {want}"))
        })
        .collect();
    if bad.is_empty() {
        Ok(format!("{} exact verdict{}", cases.len(), if cases.len() == 1 { "" } else { "s" }))
    } else {
        Err(bad.join("; "))
    }
}

fn t_table() -> Vec<(FunctionalSpec, FunctionalSpec, RelationKind)> {
    let mut out = Vec::new();
    for a in [-10, -6, -2, 0, 1, 2, 4, 6, 8] {
        let t = FunctionalSpec::T { a: int(a) };
        let mean = if a == 0 {
            Equal
        } else if a > 0 {
            LessOrEqual
        } else {
            GreaterOrEqual
        };
        let mid = if a <= 2 {
            GreaterOrEqual
        } else if a >= 6 {
            LessOrEqual
        } else {
            Incomparable
        };
        let trap = if a >= -6 { LessOrEqual } else { Incomparable };
        out.push((t.clone(), FunctionalSpec::Uniform, mean));
        out.push((t.clone(), FunctionalSpec::Midpoint, mid));
        out.push((t, FunctionalSpec::Trapezoid, trap));
    }
    out
}

fn alpha_tables() -> Vec<(FunctionalSpec, FunctionalSpec, RelationKind)> {
    use FunctionalSpec::{EvalAt, Endpoints, S1, S2};
    let mut out = Vec::new();
    for k in 1..=9 {
        let alpha = rat(k, 10);
        out.push((S2 { alpha: alpha.clone() }, Endpoints { alpha }, LessOrEqual));
    }
    for alpha in [rat(1, 3), rat(2, 5), rat(1, 2), rat(3, 5), rat(2, 3)] {
        out.push((EvalAt { alpha: alpha.clone() }, S2 { alpha }, LessOrEqual));
    }
    for alpha in [rat(1, 10), rat(1, 5), rat(4, 5), rat(9, 10)] {
        out.push((EvalAt { alpha: alpha.clone() }, S2 { alpha }, Incomparable));
    }
    for alpha in [rat(1, 10), rat(1, 3), rat(2, 3), rat(9, 10)] {
        out.push((S2 { alpha: alpha.clone() }, S1 { alpha }, LessOrEqual));
    }
    for alpha in [rat(2, 5), rat(3, 5)] {
        out.push((S2 { alpha: alpha.clone() }, S1 { alpha }, Incomparable));
    }
    out
}

fn hhal_chain() -> Vec<(FunctionalSpec, FunctionalSpec, RelationKind)> {
    use FunctionalSpec::{EvalAt, Endpoints, S1};
    let mut out = Vec::new();
    for alpha in [rat(1, 10), rat(1, 4), rat(1, 2), rat(3, 4), rat(9, 10)] {
        out.push((EvalAt { alpha: alpha.clone() }, S1 { alpha: alpha.clone() }, LessOrEqual));
        out.push((S1 { alpha: alpha.clone() }, Endpoints { alpha }, LessOrEqual));
    }
    out
}

fn criterion_1() -> Outcome {
    check_all(&t_table())
}

fn criterion_2() -> Outcome {
    let tol = rat(1, 1_000_000_000);
    let cases: [(&str, &str, Direction, Rational, Rational, Rational); 8] = [
        ("T", "midpoint", Direction::Ge, int(0), int(4), int(2)),
        ("T", "midpoint", Direction::Le, int(4), int(8), int(6)),
        ("T", "trapezoid", Direction::Le, int(-10), int(0), int(-6)),
        ("lambda-mix", "uniform", Direction::Ge, rat(1, 2), int(1), rat(3, 4)),
        ("gamma-mix", "davg", Direction::Ge, int(0), int(1), rat(2, 3)),
        ("three-point", "davg", Direction::Ge, int(0), rat(1, 2), rat(1, 6)),
        ("S2", "evalat:alpha=$", Direction::Ge, rat(1, 10), rat(1, 2), rat(1, 3)),
        ("S2", "evalat:alpha=$", Direction::Ge, rat(1, 2), rat(9, 10), rat(2, 3)),
    ];
    let mut found = Vec::new();
    for (fam, target, dir, lo, hi, want) in cases {
        let r = find_threshold(&Family::new(fam).unwrap(), &Family::new(target).unwrap(), dir, &lo, &hi, &tol)
            .map_err(|e| format!("{fam} {dir} {target}: {e}"))?;
        if r.bracket.exact.as_ref() != Some(&want) {
            return Err(format!("{fam} {dir} {target}: got {:?}, want {want}", r.bracket.exact));
        }
        // bracket endpoints must disagree
        if dir.holds_kind(r.verdict_lo) == dir.holds_kind(r.verdict_hi) {
            return Err(format!("{fam} {dir} {target}: bracket endpoints agree"));
        }
        found.push(want.to_string());
    }
    Ok(format!("exact thresholds {}", found.join(", ")))
}

fn criterion_3() -> Outcome {
    // exact integrals of t² on [0, 1]
    let uniform = 1.0 / 3.0;
    let midpoint = 0.25;
    let trapezoid = 0.5;
    // ((s+t)/2)² averaged: (E s² + 2 E s E t + E t²)/4
    let davg = (1.0 / 3.0 + 2.0 * 0.25 + 1.0 / 3.0) / 4.0;
    let f = TestFunction::Power { p: 2 };
    let num = |s: FunctionalSpec| functional_numeric(&s, &f, 0.0, 1.0, 1e-13).map(|r| r.value).map_err(|e| e.to_string());
    let sides = [
        ("3*davg", 3.0 * num(FunctionalSpec::DoubleAverage)?, 3.0 * davg, 7.0 / 8.0),
        ("2*mean+mid", 2.0 * num(FunctionalSpec::Uniform)? + num(FunctionalSpec::Midpoint)?, 2.0 * uniform + midpoint, 11.0 / 12.0),
        ("4*mean", 4.0 * num(FunctionalSpec::Uniform)?, 4.0 * uniform, 4.0 / 3.0),
        ("3*davg+trap", 3.0 * num(FunctionalSpec::DoubleAverage)? + num(FunctionalSpec::Trapezoid)?, 3.0 * davg + trapezoid, 11.0 / 8.0),
    ];
    for (name, numeric, oracle, stated) in sides {
        if (numeric - oracle).abs() > 1e-10 || (oracle - stated).abs() > 1e-15 {
            return Err(format!("{name}: numeric {numeric}, oracle {oracle}, stated {stated}"));
        }
    }
    if !(sides[0].1 <= sides[1].1 && sides[2].1 <= sides[3].1) {
        return Err("inequality direction".into());
    }
    Ok(format!("(i) {:.12} <= {:.12}, (ii) {:.12} <= {:.12}", sides[0].1, sides[1].1, sides[2].1, sides[3].1))
}

fn criterion_4() -> Outcome {
    let davg = weight(&FunctionalSpec::DoubleAverage);
    let exp_closed = 4.0 * (0.5f64.exp() - 1.0).powi(2);
    let mut worst: f64 = 0.0;
    for f in [
        TestFunction::Exponential { lambda: 1.0 },
        TestFunction::Power { p: 4 },
        TestFunction::Hinge { c: 1.0 / 3.0 },
    ] {
        let lhs = stieltjes_numeric(&f, &davg, 1e-13).map_err(|e| e.to_string())?.value;
        let phi = |t: f64| iterated_antiderivative(&f, 0.0, t, 2, 1e-13).map_err(|e| e.to_string());
        let rhs = 4.0 * (phi(0.0)? - 2.0 * phi(0.5)? + phi(1.0)?);
        let err = (lhs - rhs).abs();
        worst = worst.max(err);
        if err > 1e-10 {
            return Err(format!("{f:?}: {lhs} vs {rhs}"));
        }
        if matches!(f, TestFunction::Exponential { .. }) && (lhs - exp_closed).abs() > 1e-10 {
            return Err(format!("exp: {lhs} vs closed form {exp_closed}"));
        }
    }
    Ok(format!("max deviation {worst:.3e}, exp value {exp_closed:.12}"))
}

fn criterion_5() -> Outcome {
    check_all(&hhal_chain())
}

fn criterion_6() -> Outcome {
    check_all(&alpha_tables())
}

fn criterion_7() -> Outcome {
    check_all(&[(FunctionalSpec::CompositeQuarter, FunctionalSpec::Uniform, LessOrEqual)])
}

fn criterion_8() -> Outcome {
    check_all(&[(FunctionalSpec::DoubleAverage, FunctionalSpec::SimpsonLike, LessOrEqual)])
}

fn criterion_9() -> Outcome {
    for k in 1..=19 {
        let alpha = rat(k, 20);
        let s2 = weight(&FunctionalSpec::S2 { alpha: alpha.clone() });
        let ev = weight(&FunctionalSpec::EvalAt { alpha: alpha.clone() });
        let one = Rational::one();
        if s2.moment(2) != rat(5, 6) - &alpha {
            return Err(format!("S2 second moment at {alpha}"));
        }
        if ev.moment(2) != (&one - &alpha) * (&one - &alpha) {
            return Err(format!("evalat second moment at {alpha}"));
        }
    }
    for n in [21131, 21132, 21133] {
        let alpha = rat(n, 100_000);
        let count = crossing_points(
            &weight(&FunctionalSpec::S2 { alpha: alpha.clone() }),
            &weight(&FunctionalSpec::EvalAt { alpha: alpha.clone() }),
        )
        .len();
        if count != 2 {
            return Err(format!("{count} crossings at {alpha}"));
        }
    }
    let b = moment_flip(&rat(1, 10), &rat(1, 2), &rat(1, 1_000_000_000)).map_err(|e| e.to_string())?;
    let root = (3.0 - 3f64.sqrt()) / 6.0;
    if b.exact.is_some() || to_f64(&b.lo) > root || to_f64(&b.hi) < root || b.width() > rat(1, 1_000_000_000) {
        return Err(format!("moment flip bracket [{}, {}]", b.lo, b.hi));
    }
    Ok(format!(
        "moments on 19 points, 2 crossings near 0.21132, flip in [{:.12}, {:.12}]",
        to_f64(&b.lo),
        to_f64(&b.hi)
    ))
}

fn criterion_10() -> Outcome {
    let mut checked = 0;
    for (a, b, _) in t_table().into_iter().chain(alpha_tables()) {
        let (fa, fb) = (weight(&a), weight(&b));
        let v = levin_stechkin_compare(&fa, &fb);
        if v.kind() != Incomparable {
            continue;
        }
        let w = witness_functions(&fa, &fb, &v).map_err(|e| format!("{a} vs {b}: {e}"))?;
        if !(w.plus_gap.is_positive() && w.minus_gap.is_negative()) {
            return Err(format!("{a} vs {b}: exact gaps {} {}", w.plus_gap, w.minus_gap));
        }
        for (knot, gap) in [(&w.plus.knot, &w.plus_gap), (&w.minus.knot, &w.minus_gap)] {
            let h = TestFunction::Hinge { c: to_f64(knot) };
            let numeric = stieltjes_numeric(&h, &fb, 1e-13).map_err(|e| e.to_string())?.value
                - stieltjes_numeric(&h, &fa, 1e-13).map_err(|e| e.to_string())?.value;
            if numeric.signum() != to_f64(gap).signum() {
                return Err(format!("{a} vs {b}: hinge at {knot}: numeric {numeric}, exact {gap}"));
            }
        }
        checked += 1;
    }
    Ok(format!("{checked} incomparable pairs, witnesses agree exactly and numerically"))
}

fn criterion_11() -> Outcome {
    let mut pairs: Vec<(FunctionalSpec, FunctionalSpec)> = Vec::new();
    let all = t_table()
        .into_iter()
        .chain(hhal_chain())
        .chain(alpha_tables())
        .chain([
            (FunctionalSpec::CompositeQuarter, FunctionalSpec::Uniform, LessOrEqual),
            (FunctionalSpec::DoubleAverage, FunctionalSpec::SimpsonLike, LessOrEqual),
        ]);
    for (a, b, _) in all {
        match kind(&a, &b) {
            LessOrEqual => pairs.push((a, b)),
            GreaterOrEqual => pairs.push((b, a)),
            _ => {}
        }
    }
    let weights: Vec<(CumulativeFunction, CumulativeFunction)> = pairs.iter().map(|(a, b)| (weight(a), weight(b))).collect();
    let mut min_gap = f64::INFINITY;
    for i in 0..200usize {
        let f = random_convex(i as u64, 1 + i % 8);
        for ((a, b), (fa, fb)) in pairs.iter().zip(&weights) {
            let gap = stieltjes_numeric(&f, fb, 1e-13).map_err(|e| e.to_string())?.value
                - stieltjes_numeric(&f, fa, 1e-13).map_err(|e| e.to_string())?.value;
            min_gap = min_gap.min(gap);
            if gap < -1e-12 {
                return Err(format!("seed {i}: {a} <= {b} violated by {gap}"));
            }
        }
    }
    // the normalized route and the defining formula on [-3, 5] agree
    let specs = [
        "uniform",
        "midpoint",
        "trapezoid",
        "davg",
        "simpson",
        "cquarter",
        "T:a=6",
        "T:a=-6",
        "evalat:alpha=1/3",
        "endpoints:alpha=1/4",
        "S1:alpha=2/5",
        "S2:alpha=1/10",
        "mix:3/4*davg+1/4*trap",
    ];
    let functions = [
        TestFunction::Exponential { lambda: 0.5 },
        TestFunction::Power { p: 2 },
        TestFunction::Hinge { c: 1.0 },
        random_convex(11, 4),
    ];
    let mut worst: f64 = 0.0;
    for s in specs {
        let spec: FunctionalSpec = s.parse().unwrap();
        for f in &functions {
            let r = functional_numeric(&spec, f, -3.0, 5.0, 1e-13).map_err(|e| e.to_string())?;
            let direct = r.antiderivative_route.expect("route is computed");
            let err = (r.value - direct).abs();
            worst = worst.max(err);
            if err > 1e-10 {
                return Err(format!("{s} on {f:?}: normalized {} vs direct {direct}", r.value));
            }
        }
    }
    Ok(format!(
        "{} ordered pairs x 200 functions, min gap {min_gap:.3e}; invariance max deviation {worst:.3e}",
        pairs.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("T_a regime table", criterion_1),
        ("threshold recovery", criterion_2),
        ("critical inequalities on t^2", criterion_3),
        ("double average through the second antiderivative", criterion_4),
        ("asymmetric chain evalat <= S1 <= endpoints", criterion_5),
        ("S2 comparisons", criterion_6),
        ("composite quarter rule <= mean", criterion_7),
        ("double average <= three-point rule", criterion_8),
        ("second moments and crossings", criterion_9),
        ("witness validity", criterion_10),
        ("random convex functions and rescaling", criterion_11),
    ];
    let start = Instant::now();
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:2} PASS  {name}: {detail} ({secs:.2}s)", i + 1),
            Err(why) => {
                failures += 1;
                println!("criterion {:2} FAIL  {name}: {why} ({secs:.2}s)", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failures} failed in {:.2}s",
        criteria.len() - failures,
        start.elapsed().as_secs_f64()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
