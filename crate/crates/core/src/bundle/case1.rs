//! Case 1 (`pb <= min(q1, q2)`), where demand is `1 - pb^2 / (2 q1 q2)`.
//!
//! Zero gradient in `(pb, n1, n2)` gives
//!
//! ```text
//! pb^2 = (2/3) q1 q2
//! (M pb / 3) q1'(n1) / q1 = c1
//! (M pb / 3) q2'(n2) / q2 = c2
//! ```
//!
//! With `u = a2 exp(-a3 n)` the second and third equations solve for
//! `u = 3 c a1 / (M pb a3 + 3 c)`, capped at `a2` where the `n >= 0`
//! constraint binds. That leaves `h(pb) = 1 - (2/3)(q1/pb)(q2/pb) = 0`,
//! and since each `q/pb` is decreasing in `pb`, `h` is increasing and its
//! root is unique.

use super::{BundleMarket, BundleSolution, CaseOutcome, DemandCase, Infeasibility};
use crate::numopt::{bisect, Bracket};
use crate::quality::QualityCurve;

const FEE_FLOOR: f64 = 1e-9;
const FEE_TOL: f64 = 1e-10;

/// Data size and quality that satisfy the marginal condition for one
/// service at fee `pb`.
fn best_response(curve: &QualityCurve, cost: f64, m: f64, pb: f64) -> (f64, f64) {
    let (a1, a2, a3) = (curve.alpha1(), curve.alpha2(), curve.alpha3());
    let u_star = 3.0 * cost * a1 / (m * pb * a3 + 3.0 * cost);
    if u_star >= a2 {
        (0.0, a1 - a2)
    } else {
        ((a2 / u_star).ln() / a3, a1 - u_star)
    }
}

/// Solves case 1 by bisection on the reduced fee equation.
pub fn solve_case1(market: &BundleMarket) -> CaseOutcome {
    let m = market.m();
    let [s1, s2] = &market.services;
    let responses = |pb: f64| {
        (
            best_response(&s1.curve, s1.cost, m, pb),
            best_response(&s2.curve, s2.cost, m, pb),
        )
    };
    let h = |pb: f64| {
        let ((_, q1), (_, q2)) = responses(pb);
        1.0 - (2.0 / 3.0) * (q1 / pb) * (q2 / pb)
    };

    let hi = (2.0 / 3.0 * s1.curve.alpha1() * s2.curve.alpha1()).sqrt();
    let Ok(bracket) = Bracket::new(FEE_FLOOR, hi) else {
        return CaseOutcome::Infeasible(Infeasibility::NoRoot);
    };
    let Ok(pb) = bisect(h, bracket, FEE_TOL) else {
        return CaseOutcome::Infeasible(Infeasibility::NoRoot);
    };

    let ((n1, _), (n2, _)) = responses(pb);
    let sol = BundleSolution::at(market, DemandCase::One, pb, n1, n2);
    if pb <= sol.q1.min(sol.q2) {
        CaseOutcome::Solved(sol)
    } else {
        CaseOutcome::Infeasible(Infeasibility::OutsideRegion(sol))
    }
}
