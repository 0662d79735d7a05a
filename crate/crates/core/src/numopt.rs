//! Deterministic numerical primitives: bracketed bisection, golden-section
//! line search, brute-force grid maximization with coordinate polish, and
//! central finite differences.
//!
//! These routines are the independent oracles used to check every analytic
//! optimum produced elsewhere in the crate, so they deliberately know
//! nothing about the pricing models.

use rayon::prelude::*;

use crate::error::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Closed interval `[lo, hi]` with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    lo: f64,
    hi: f64,
}

impl Bracket {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_finite() && hi.is_finite() && lo < hi {
            Ok(Self { lo, hi })
        } else {
            Err(Error::InvalidParameter(format!(
                "bracket requires finite lo < hi, got [{lo}, {hi}]"
            )))
        }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Outcome of a bisection run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bisection {
    pub root: f64,
    pub iterations: u32,
}

/// Finds a root of `f` inside `bracket`, halving until the bracket is no
/// wider than `tol`. Returns the midpoint of the final bracket (or an exact
/// zero if one is hit).
pub fn bisect<F: Fn(f64) -> f64>(f: F, bracket: Bracket, tol: f64) -> Result<f64> {
    bisect_detailed(f, bracket, tol).map(|b| b.root)
}

#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn bisect_detailed<F: Fn(f64) -> f64>(f: F, bracket: Bracket, tol: f64) -> Result<Bisection> {
    if !(tol > 0.0) {
        return Err(Error::Domain {
            name: "tol",
            value: tol,
            expected: "> 0",
        });
    }
    let (mut lo, mut hi) = (bracket.lo, bracket.hi);
    let (flo, fhi) = (f(lo), f(hi));
    if flo == 0.0 {
        return Ok(Bisection {
            root: lo,
            iterations: 0,
        });
    }
    if fhi == 0.0 {
        return Ok(Bisection {
            root: hi,
            iterations: 0,
        });
    }
    if !(flo.signum() * fhi.signum() < 0.0) {
        return Err(Error::NoSignChange { lo, hi });
    }
    let lo_negative = flo < 0.0;
    let mut iterations = 0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // Bracket is a single ulp wide.
            break;
        }
        iterations += 1;
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(Bisection { root: mid, iterations });
        }
        if (fm < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Bisection {
        root: 0.5 * (lo + hi),
        iterations,
    })
}

/// Golden-section search for the maximum of a unimodal `f` on `[lo, hi]`.
///
/// Returns `(x, f(x))` for the best point evaluated, endpoints included.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn golden_section_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let eval = |x: f64| {
        let v = f(x);
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    };
    let (mut a, mut b) = (lo, hi);
    let mut best = (a, eval(a));
    let fb = eval(b);
    if fb > best.1 {
        best = (b, fb);
    }
    if !(b > a) {
        return best;
    }
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = eval(x1);
    let mut f2 = eval(x2);
    // 200 iterations shrink any finite interval below f64 resolution.
    for _ in 0..200 {
        if b - a <= tol {
            break;
        }
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = eval(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = eval(x2);
        }
    }
    for (x, v) in [(x1, f1), (x2, f2)] {
        if v > best.1 {
            best = (x, v);
        }
    }
    best
}

/// One grid dimension: `points` evenly spaced values from `lo` to `hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl Axis {
    pub fn new(lo: f64, hi: f64, points: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) || points < 2 {
            return Err(Error::InvalidParameter(format!(
                "axis requires lo < hi and at least 2 points, got [{lo}, {hi}] x {points}"
            )));
        }
        Ok(Self { lo, hi, points })
    }

    pub fn spacing(&self) -> f64 {
        (self.hi - self.lo) / (self.points - 1) as f64
    }

    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.points {
            self.hi
        } else {
            self.lo + i as f64 * self.spacing()
        }
    }
}

/// Rectangular evaluation grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    axes: Vec<Axis>,
}

impl Grid {
    pub fn new(axes: Vec<Axis>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::InvalidParameter("grid needs at least one axis".into()));
        }
        Ok(Self { axes })
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.points).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row-major decode: the first axis varies slowest.
    fn point(&self, mut flat: usize, out: &mut [f64]) {
        for (d, axis) in self.axes.iter().enumerate().rev() {
            out[d] = axis.value(flat % axis.points);
            flat /= axis.points;
        }
    }
}

/// Result of [`grid_polish_maximize`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridMax {
    pub argmax: Vec<f64>,
    pub value: f64,
    /// Best value seen on the raw grid, before polishing.
    pub grid_value: f64,
}

/// Evaluates `f` on every grid point, then runs up to `polish_iters`
/// sweeps of coordinate-wise golden-section search around the best point,
/// each coordinate confined to one grid spacing either side and to the
/// grid box.
///
/// Grid ties go to the lowest row-major index. NaN counts as `-inf`.
pub fn grid_polish_maximize<F>(f: F, grid: &Grid, polish_iters: usize) -> GridMax
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let dim = grid.dim();
    let eval = |x: &[f64]| {
        let v = f(x);
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    };

    let (best_idx, grid_value) = (0..grid.len())
        .into_par_iter()
        .map_init(
            || vec![0.0; dim],
            |buf, i| {
                grid.point(i, buf);
                (i, eval(buf))
            },
        )
        .reduce(
            || (usize::MAX, f64::NEG_INFINITY),
            |a, b| {
                if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) {
                    b
                } else {
                    a
                }
            },
        );

    let mut x = vec![0.0; dim];
    grid.point(best_idx.min(grid.len() - 1), &mut x);
    let mut fx = grid_value;
    if fx == f64::NEG_INFINITY {
        return GridMax {
            argmax: x,
            value: fx,
            grid_value,
        };
    }

    let mut probe = x.clone();
    for _ in 0..polish_iters {
        let mut moved = 0.0_f64;
        for (d, axis) in grid.axes().iter().enumerate() {
            let w = axis.spacing();
            let lo = (x[d] - w).max(axis.lo);
            let hi = (x[d] + w).min(axis.hi);
            probe.copy_from_slice(&x);
            let (xd, fd) = golden_section_max(
                |t| {
                    let mut p = probe.clone();
                    p[d] = t;
                    eval(&p)
                },
                lo,
                hi,
                1e-12 * (1.0 + w),
            );
            if fd > fx {
                moved = moved.max((xd - x[d]).abs());
                x[d] = xd;
                fx = fd;
            }
        }
        if moved == 0.0 {
            break;
        }
    }

    GridMax {
        argmax: x,
        value: fx,
        grid_value,
    }
}

/// Central-difference gradient of `f` at `x` with step `h`.
pub fn finite_diff_grad<F: Fn(&[f64]) -> f64>(f: F, x: &[f64], h: f64) -> Vec<f64> {
    let mut p = x.to_vec();
    (0..x.len())
        .map(|i| {
            p[i] = x[i] + h;
            let up = f(&p);
            p[i] = x[i] - h;
            let down = f(&p);
            p[i] = x[i];
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// Central-difference Hessian of `f` at `x` with step `h`, symmetrized.
pub fn finite_diff_hessian<F: Fn(&[f64]) -> f64>(f: F, x: &[f64], h: f64) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut p = x.to_vec();
    let mut at = |shifts: &[(usize, f64)]| {
        p.copy_from_slice(x);
        for &(i, s) in shifts {
            p[i] += s;
        }
        f(&p)
    };
    let f0 = at(&[]);
    let mut hess = vec![vec![0.0; n]; n];
    #[allow(clippy::needless_range_loop)]
    for i in 0..n {
        hess[i][i] = (at(&[(i, h)]) - 2.0 * f0 + at(&[(i, -h)])) / (h * h);
        for j in 0..i {
            let v = (at(&[(i, h), (j, h)]) - at(&[(i, h), (j, -h)]) - at(&[(i, -h), (j, h)]) + at(&[(i, -h), (j, -h)]))
                / (4.0 * h * h);
            hess[i][j] = v;
            hess[j][i] = v;
        }
    }
    hess
}

/// Max-norm of a vector.
pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Euclidean norm of a vector.
pub fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
