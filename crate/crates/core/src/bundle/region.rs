//! Cases 2 to 4, solved as profit maximization restricted to the case's
//! region of `(pb, n1, n2)`.
//!
//! For fixed data sizes the restricted fee problem is one-dimensional with
//! a closed-form answer: revenue is concave in `pb` within cases 2 and 3
//! (peak at `q_hi / 2 + q_lo / 4`) and decreasing throughout case 4 (peak
//! at `(q1 + q2) / 3`, always below `max(q1, q2)`), so the optimal fee is
//! the peak clamped to the region. That leaves a two-dimensional search
//! over `(n1, n2)`, seeded by a grid and finished by coordinate ascent on
//! the marginal-profit conditions.

use super::{
    case1::solve_case1, kkt_residual, profit_gradient, profit_unchecked, BundleMarket, BundleSolution, CaseOutcome,
    DemandCase, Infeasibility, MAX_DATA_UNITS,
};
use crate::numopt::{bisect, grid_polish_maximize, Axis, Bracket, Grid};

const SEED_POINTS: usize = 101;
const SEED_POLISH: usize = 200;
const MAX_SWEEPS: usize = 500;
const TARGET_RESIDUAL: f64 = 1e-10;
const SIZE_TOL: f64 = 1e-12;

/// Region-restricted optimal fee for given qualities, and whether it sits
/// on the region's boundary. `None` if the region is empty.
fn restricted_fee(case: DemandCase, q1: f64, q2: f64) -> Option<(f64, bool)> {
    let (lo, hi, peak) = match case {
        DemandCase::One => {
            // Revenue pb (1 - pb^2 / 2 q1 q2) peaks at sqrt(2 q1 q2 / 3).
            (0.0, q1.min(q2), (2.0 * q1 * q2 / 3.0).sqrt())
        }
        DemandCase::Two => (q2, q1, 0.5 * q1 + 0.25 * q2),
        DemandCase::Three => (q1, q2, 0.5 * q2 + 0.25 * q1),
        DemandCase::Four => (q1.max(q2), q1 + q2, (q1 + q2) / 3.0),
    };
    if lo > hi {
        return None;
    }
    if peak <= lo {
        Some((lo, true))
    } else if peak >= hi {
        Some((hi, true))
    } else {
        Some((peak, false))
    }
}

/// Maximizes profit over the closure of `case`'s region.
///
/// Returns `Solved` only for an optimum strictly inside the fee bounds;
/// an optimum on a fee boundary shared with a neighbouring case is
/// reported as [`Infeasibility::SharedBoundary`] carrying that point.
pub fn solve_case(market: &BundleMarket, case: DemandCase) -> CaseOutcome {
    if case == DemandCase::One {
        return solve_case1(market);
    }

    let fee_at = |n1: f64, n2: f64| {
        let (q1, q2) = market.qualities(n1, n2);
        restricted_fee(case, q1, q2)
    };
    let reduced = |n: &[f64]| match fee_at(n[0], n[1]) {
        Some((pb, _)) => profit_unchecked(market, pb, n[0], n[1]),
        None => f64::NEG_INFINITY,
    };

    let axis = Axis::new(0.0, MAX_DATA_UNITS, SEED_POINTS).expect("static axis");
    let grid = Grid::new(vec![axis, axis]).expect("static grid");
    let seed = grid_polish_maximize(reduced, &grid, SEED_POLISH);
    if seed.value == f64::NEG_INFINITY {
        return CaseOutcome::Infeasible(Infeasibility::RegionEmpty);
    }

    let mut n = [seed.argmax[0], seed.argmax[1]];
    let (_, on_boundary) = fee_at(n[0], n[1]).expect("seed lies in region");
    if !on_boundary {
        refine(market, case, &mut n);
    }

    let (pb, on_boundary) = fee_at(n[0], n[1]).expect("refinement stays in region");
    let sol = BundleSolution::at(market, case, pb, n[0], n[1]);
    if on_boundary {
        CaseOutcome::Infeasible(Infeasibility::SharedBoundary(sol))
    } else {
        CaseOutcome::Solved(sol)
    }
}

/// Projected coordinate ascent on `(n1, n2)` with the fee held at its
/// interior optimum. Each coordinate step solves its marginal-profit
/// condition by bisection; steps that would lower profit or leave the
/// interior are rejected.
fn refine(market: &BundleMarket, case: DemandCase, n: &mut [f64; 2]) {
    let interior_fee = |n1: f64, n2: f64| {
        let (q1, q2) = market.qualities(n1, n2);
        match restricted_fee(case, q1, q2) {
            Some((pb, false)) => Some(pb),
            _ => None,
        }
    };
    let value =
        |n1: f64, n2: f64| interior_fee(n1, n2).map_or(f64::NEG_INFINITY, |pb| profit_unchecked(market, pb, n1, n2));
    let residual =
        |n: &[f64; 2]| interior_fee(n[0], n[1]).map_or(f64::INFINITY, |pb| kkt_residual(market, pb, n[0], n[1]));

    for _ in 0..MAX_SWEEPS {
        if residual(n) <= TARGET_RESIDUAL {
            break;
        }
        let before = *n;
        for i in 0..2 {
            let with = |t: f64| {
                let mut m = *n;
                m[i] = t;
                m
            };
            // Envelope theorem: with the fee at its interior optimum, dG/dn_i
            // equals the partial of profit in n_i.
            let slope = |t: f64| {
                let m = with(t);
                match interior_fee(m[0], m[1]) {
                    Some(pb) => profit_gradient(market, pb, m[0], m[1])[i + 1],
                    None => f64::NAN,
                }
            };
            if let Some(t) = coordinate_root(&slope, n[i]) {
                let cand = with(t);
                let (old, new) = (value(n[0], n[1]), value(cand[0], cand[1]));
                if new >= old - 1e-13 * old.abs() {
                    *n = cand;
                }
            }
        }
        if *n == before {
            break;
        }
    }
}

/// Zero of a decreasing `slope` near `start` on `[0, MAX_DATA_UNITS]`,
/// projected to an end when the slope does not change sign.
fn coordinate_root(slope: &dyn Fn(f64) -> f64, start: f64) -> Option<f64> {
    let s0 = slope(start);
    if s0.is_nan() {
        return None;
    }
    if s0 == 0.0 {
        return Some(start);
    }
    let mut step = 0.5;
    let (mut lo, mut hi) = (start, start);
    if s0 > 0.0 {
        loop {
            hi = (hi + step).min(MAX_DATA_UNITS);
            let s = slope(hi);
            if s.is_nan() {
                return None;
            }
            if s <= 0.0 {
                break;
            }
            if hi >= MAX_DATA_UNITS {
                return Some(MAX_DATA_UNITS);
            }
            lo = hi;
            step *= 2.0;
        }
    } else {
        loop {
            lo = (lo - step).max(0.0);
            let s = slope(lo);
            if s.is_nan() {
                return None;
            }
            if s >= 0.0 {
                break;
            }
            if lo <= 0.0 {
                return Some(0.0);
            }
            hi = lo;
            step *= 2.0;
        }
    }
    let bracket = Bracket::new(lo, hi).ok()?;
    bisect(slope, bracket, SIZE_TOL).ok()
}
