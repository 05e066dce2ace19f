//! Exact convex-order decisions for Hermite-Hadamard type quadrature
//! functionals.
//!
//! Every functional in [`catalog`] is written as a Stieltjes integral
//! `∫_0^1 f dF` against a piecewise-polynomial weight of bounded variation
//! ([`bvfunction`]). Whether one functional dominates another on all convex
//! functions is then decided exactly in [`convex_order`] by the sign of the
//! primitive gap `∫_0^x (F2 - F1)`. The [`quadrature`] module evaluates the
//! same functionals numerically on arbitrary test functions and serves as an
//! independent cross-check; [`harness`] reproduces the verdict tables and
//! searches for sharp constants.

pub mod bvfunction;
pub mod catalog;
pub mod convex_order;
pub mod harness;
pub mod polynomial;
pub mod quadrature;
pub mod rational;

pub use bvfunction::{crossing_points, Atom, Crossing, CrossingDirection, CumulativeFunction, PiecewiseFunction, Side};
pub use catalog::{functional_value_exact, make_weight, FunctionalSpec};
pub use convex_order::{classify, hinge_gap, levin_stechkin_compare, ohlin_compare, witness_functions, Relation, RelationKind, Verdict};
pub use polynomial::{isolate_roots, sign_on_interval, Poly, RootInterval, Sign};
pub use rational::Rational;
pub use quadrature::{functional_numeric, stieltjes_numeric, QuadratureResult, TestFunction};
