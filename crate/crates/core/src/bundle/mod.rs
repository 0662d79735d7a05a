//! Two providers selling their services as one bundle at fee `pb`.
//!
//! Profit is `M pb P(theta1 q1 + theta2 q2 >= pb) - n1 c1 - n2 c2`. The
//! demand term changes shape across four regions of `(pb, q1, q2)` (see
//! [`DemandCase`]); each region is solved on its own and the most
//! profitable feasible result wins.

mod case1;
mod demand;
pub mod printed;
mod region;

pub use case1::solve_case1;
pub use demand::{demand_probability, DemandCase, ReservationPricePair};
pub use region::solve_case;

pub(crate) use demand::{demand, demand_partials};

use crate::error::{ensure_nonnegative, Error, Result};
use crate::quality::QualityCurve;
use crate::standalone::StandaloneMarket;

/// Upper bound on data purchases searched by the numeric case solvers.
pub const MAX_DATA_UNITS: f64 = 200.0;

/// Relative profit margin below which two cases count as tied.
const TIE_TOLERANCE: f64 = 1e-12;

/// One provider's side of the bundle: data unit cost and quality curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ServiceOffer {
    cost: f64,
    curve: QualityCurve,
}

impl ServiceOffer {
    pub fn new(cost: f64, curve: QualityCurve) -> Result<Self> {
        if !(cost > 0.0 && cost.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "data unit cost must be positive, got {cost}"
            )));
        }
        Ok(Self { cost, curve })
    }

    pub fn cost(&self) -> f64 {
        self.cost
    }

    pub fn curve(&self) -> &QualityCurve {
        &self.curve
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BundleMarket {
    customers: u32,
    services: [ServiceOffer; 2],
}

impl BundleMarket {
    pub fn new(customers: u32, service1: ServiceOffer, service2: ServiceOffer) -> Result<Self> {
        if customers == 0 {
            return Err(Error::InvalidParameter("customer count must be at least 1".into()));
        }
        Ok(Self {
            customers,
            services: [service1, service2],
        })
    }

    pub fn customers(&self) -> u32 {
        self.customers
    }

    /// Service `index` (0 or 1).
    pub fn service(&self, index: usize) -> &ServiceOffer {
        &self.services[index]
    }

    /// The same market with the two services relabeled.
    pub fn swapped(&self) -> Self {
        Self {
            customers: self.customers,
            services: [self.services[1], self.services[0]],
        }
    }

    /// Market faced by service `index` selling on its own.
    pub fn standalone(&self, index: usize) -> StandaloneMarket {
        let s = &self.services[index];
        StandaloneMarket::new(self.customers, s.cost, s.curve).expect("validated on construction")
    }

    pub(crate) fn m(&self) -> f64 {
        f64::from(self.customers)
    }

    pub(crate) fn qualities(&self, n1: f64, n2: f64) -> (f64, f64) {
        (self.services[0].curve.value(n1), self.services[1].curve.value(n2))
    }
}

/// Optimal bundle decision within one demand case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BundleSolution {
    pub case: DemandCase,
    pub pb_star: f64,
    pub n1_star: f64,
    pub n2_star: f64,
    /// Quality of each service at the chosen data sizes.
    pub q1: f64,
    pub q2: f64,
    pub profit: f64,
    /// Projected stationarity residual, see [`kkt_residual`].
    pub kkt_residual: f64,
}

impl BundleSolution {
    pub(crate) fn at(market: &BundleMarket, case: DemandCase, pb: f64, n1: f64, n2: f64) -> Self {
        let (q1, q2) = market.qualities(n1, n2);
        Self {
            case,
            pb_star: pb,
            n1_star: n1,
            n2_star: n2,
            q1,
            q2,
            profit: profit_unchecked(market, pb, n1, n2),
            kkt_residual: kkt_residual(market, pb, n1, n2),
        }
    }

    /// The solution for [`BundleMarket::swapped`].
    pub fn swapped(&self) -> Self {
        let case = match self.case {
            DemandCase::Two => DemandCase::Three,
            DemandCase::Three => DemandCase::Two,
            c => c,
        };
        Self {
            case,
            n1_star: self.n2_star,
            n2_star: self.n1_star,
            q1: self.q2,
            q2: self.q1,
            ..*self
        }
    }
}

/// Why a demand case produced no optimum of its own.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Infeasibility {
    /// The stationarity system has no root with positive fee.
    NoRoot,
    /// The stationary point exists but its fee leaves the case region.
    OutsideRegion(BundleSolution),
    /// No data sizes make the case region nonempty.
    RegionEmpty,
    /// The restricted maximum sits on a boundary shared with another case.
    SharedBoundary(BundleSolution),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CaseOutcome {
    Solved(BundleSolution),
    Infeasible(Infeasibility),
}

impl CaseOutcome {
    pub fn solution(&self) -> Option<&BundleSolution> {
        match self {
            Self::Solved(s) => Some(s),
            Self::Infeasible(_) => None,
        }
    }
}

/// Every case's outcome plus the selected optimum.
#[derive(Debug, Clone, PartialEq)]
pub struct BundleReport {
    pub cases: [CaseOutcome; 4],
    pub best: BundleSolution,
}

/// `M pb P(theta1 q1 + theta2 q2 >= pb) - n1 c1 - n2 c2`.
pub fn profit(market: &BundleMarket, pb: f64, n1: f64, n2: f64) -> Result<f64> {
    ensure_nonnegative("pb", pb)?;
    ensure_nonnegative("n1", n1)?;
    ensure_nonnegative("n2", n2)?;
    Ok(profit_unchecked(market, pb, n1, n2))
}

pub(crate) fn profit_unchecked(market: &BundleMarket, pb: f64, n1: f64, n2: f64) -> f64 {
    let (q1, q2) = market.qualities(n1, n2);
    market.m() * pb * demand(q1, q2, pb) - n1 * market.services[0].cost - n2 * market.services[1].cost
}

/// Analytic gradient of profit in `(pb, n1, n2)`. Profit is continuously
/// differentiable across case boundaries, so this is valid everywhere
/// with `0 < pb < q1 + q2`.
pub fn profit_gradient(market: &BundleMarket, pb: f64, n1: f64, n2: f64) -> [f64; 3] {
    let [s1, s2] = &market.services;
    let (q1, q2) = market.qualities(n1, n2);
    let d = demand_partials(q1, q2, pb);
    let m = market.m();
    [
        m * (d.value + pb * d.d_pb),
        m * pb * d.d_q1 * s1.curve.slope(n1) - s1.cost,
        m * pb * d.d_q2 * s2.curve.slope(n2) - s2.cost,
    ]
}

/// Max-norm of the projected gradient, scaled to be dimensionless: the fee
/// component by `M`, each data component by its unit cost. Components
/// pushing against `pb >= 0` or `n >= 0` at the bound count as zero.
pub fn kkt_residual(market: &BundleMarket, pb: f64, n1: f64, n2: f64) -> f64 {
    let g = profit_gradient(market, pb, n1, n2);
    let project = |g: f64, x: f64| if x <= 0.0 { g.max(0.0) } else { g.abs() };
    let scaled = [
        project(g[0], pb) / market.m(),
        project(g[1], n1) / market.services[0].cost,
        project(g[2], n2) / market.services[1].cost,
    ];
    scaled.into_iter().fold(0.0, f64::max)
}

/// Solves all four cases and keeps the most profitable solved one (lowest
/// case id on ties).
pub fn optimize(market: &BundleMarket) -> Result<BundleSolution> {
    optimize_report(market).map(|r| r.best)
}

pub fn optimize_report(market: &BundleMarket) -> Result<BundleReport> {
    let cases = DemandCase::ALL.map(|case| solve_case(market, case));

    let pick = |candidates: &mut dyn Iterator<Item = &BundleSolution>| {
        candidates.fold(None::<BundleSolution>, |best, s| match best {
            Some(b) if s.profit <= b.profit + TIE_TOLERANCE * b.profit.abs() => Some(b),
            _ => Some(*s),
        })
    };

    let solved = pick(&mut cases.iter().filter_map(CaseOutcome::solution));
    // When every case optimum sits on a shared boundary the global optimum
    // is one of those boundary points.
    let best = solved
        .or_else(|| {
            pick(&mut cases.iter().filter_map(|o| match o {
                CaseOutcome::Infeasible(Infeasibility::SharedBoundary(s)) => Some(s),
                _ => None,
            }))
        })
        .ok_or(Error::DegenerateMarket)?;
    Ok(BundleReport { cases, best })
}
