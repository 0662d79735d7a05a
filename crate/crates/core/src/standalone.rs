//! A monopolist provider selling one service to `M` customers whose
//! willingness-to-pay `theta` is uniform on `[0, 1]`. A customer subscribes
//! when `theta * q >= p_s`.

use crate::error::{ensure_nonnegative, Error, Result};
use crate::quality::QualityCurve;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StandaloneMarket {
    customers: u32,
    cost: f64,
    curve: QualityCurve,
}

impl StandaloneMarket {
    pub fn new(customers: u32, cost: f64, curve: QualityCurve) -> Result<Self> {
        if customers == 0 {
            return Err(Error::InvalidParameter("customer count must be at least 1".into()));
        }
        if !(cost > 0.0 && cost.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "data unit cost must be positive, got {cost}"
            )));
        }
        Ok(Self { customers, cost, curve })
    }

    pub fn customers(&self) -> u32 {
        self.customers
    }

    pub fn cost(&self) -> f64 {
        self.cost
    }

    pub fn curve(&self) -> &QualityCurve {
        &self.curve
    }

    fn m(&self) -> f64 {
        f64::from(self.customers)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StandaloneSolution {
    pub n_star: f64,
    pub ps_star: f64,
    pub profit: f64,
    /// False when the positivity conditions fail and the boundary point
    /// `n = 0, p_s = q(0)/2` is returned instead.
    pub interior: bool,
}

/// Probability that a uniform-`[0, 1]` customer accepts fee `ps` at quality `q`.
pub fn subscribe_probability(q: f64, ps: f64) -> f64 {
    if q <= 0.0 {
        return if ps <= 0.0 { 1.0 } else { 0.0 };
    }
    (1.0 - ps / q).clamp(0.0, 1.0)
}

/// `M * p_s * P(theta q >= p_s) - n c`.
pub fn profit(market: &StandaloneMarket, ps: f64, n: f64) -> Result<f64> {
    ensure_nonnegative("ps", ps)?;
    ensure_nonnegative("n", n)?;
    Ok(profit_unchecked(market, ps, n))
}

pub(crate) fn profit_unchecked(market: &StandaloneMarket, ps: f64, n: f64) -> f64 {
    let q = market.curve.value(n);
    market.m() * ps * subscribe_probability(q, ps) - n * market.cost
}

/// Largest data cost for which the interior optimum exists:
/// `min(M a1 a3, M a2 a3) / 4`.
pub fn feasibility_threshold(market: &StandaloneMarket) -> f64 {
    let c = market.curve;
    market.m() * c.alpha3() * c.alpha1().min(c.alpha2()) / 4.0
}

/// Closed-form KKT optimum.
///
/// Interior when `M a1 a3 > 4c` and `M a2 a3 > 4c`:
/// `n* = ln(M a2 a3 / 4c) / a3`, `p_s* = (M a1 a3 - 4c) / (2 M a3)`.
/// Otherwise the boundary optimum `n = 0, p_s = q(0)/2`.
pub fn optimize_closed_form(market: &StandaloneMarket) -> StandaloneSolution {
    let m = market.m();
    let c = market.cost;
    let q = market.curve;
    let four_c = 4.0 * c;
    if m * q.alpha1() * q.alpha3() > four_c && m * q.alpha2() * q.alpha3() > four_c {
        let n_star = (m * q.alpha2() * q.alpha3() / four_c).ln() / q.alpha3();
        let ps_star = (m * q.alpha1() * q.alpha3() - four_c) / (2.0 * m * q.alpha3());
        StandaloneSolution {
            n_star,
            ps_star,
            profit: profit_unchecked(market, ps_star, n_star),
            interior: true,
        }
    } else {
        let ps_star = q.value(0.0) / 2.0;
        StandaloneSolution {
            n_star: 0.0,
            ps_star,
            profit: profit_unchecked(market, ps_star, 0.0),
            interior: false,
        }
    }
}
