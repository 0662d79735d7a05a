//! Bundle demand as an area in the unit square of reservation prices.
//!
//! A customer with `(theta1, theta2)` buys the bundle when
//! `theta1 q1 + theta2 q2 >= pb`. The accepted region is the part of the
//! square above that line, and its area falls into one of four shapes
//! depending on where `pb` sits relative to `q1` and `q2`.

use std::fmt;

use crate::error::{ensure_nonnegative, Error, Result};

/// Geometry of the accepted region.
///
/// - `One`: `pb <= min(q1, q2)`; the line cuts off a corner triangle.
/// - `Two`: `q2 <= pb <= q1`; the line crosses the two horizontal edges.
/// - `Three`: `q1 <= pb <= q2`; the line crosses the two vertical edges.
/// - `Four`: `max(q1, q2) <= pb <= q1 + q2`; only a corner triangle remains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DemandCase {
    One,
    Two,
    Three,
    Four,
}

impl DemandCase {
    pub const ALL: [DemandCase; 4] = [Self::One, Self::Two, Self::Three, Self::Four];

    pub fn id(self) -> u8 {
        match self {
            Self::One => 1,
            Self::Two => 2,
            Self::Three => 3,
            Self::Four => 4,
        }
    }

    pub fn from_id(id: u8) -> Option<Self> {
        match id {
            1 => Some(Self::One),
            2 => Some(Self::Two),
            3 => Some(Self::Three),
            4 => Some(Self::Four),
            _ => None,
        }
    }

    /// Case containing `pb`, lowest id on shared boundaries. `None` once
    /// `pb` exceeds `q1 + q2`.
    pub fn classify(q1: f64, q2: f64, pb: f64) -> Option<Self> {
        if pb <= q1.min(q2) {
            Some(Self::One)
        } else if pb <= q1 && q2 <= pb {
            Some(Self::Two)
        } else if pb <= q2 && q1 <= pb {
            Some(Self::Three)
        } else if pb <= q1 + q2 {
            Some(Self::Four)
        } else {
            None
        }
    }

    /// Whether `pb` lies in this case's closed region.
    pub fn contains(self, q1: f64, q2: f64, pb: f64) -> bool {
        match self {
            Self::One => pb <= q1.min(q2),
            Self::Two => q2 <= pb && pb <= q1,
            Self::Three => q1 <= pb && pb <= q2,
            Self::Four => q1.max(q2) <= pb && pb <= q1 + q2,
        }
    }
}

impl fmt::Display for DemandCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.id())
    }
}

/// A customer's reservation prices for the two services.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReservationPricePair {
    theta1: f64,
    theta2: f64,
}

impl ReservationPricePair {
    pub fn new(theta1: f64, theta2: f64) -> Result<Self> {
        for (name, v) in [("theta1", theta1), ("theta2", theta2)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Domain {
                    name,
                    value: v,
                    expected: "[0, 1]",
                });
            }
        }
        Ok(Self { theta1, theta2 })
    }

    pub fn theta1(&self) -> f64 {
        self.theta1
    }

    pub fn theta2(&self) -> f64 {
        self.theta2
    }

    /// Subscription rule `theta1 q1 + theta2 q2 >= pb`.
    pub fn subscribes(&self, q1: f64, q2: f64, pb: f64) -> bool {
        self.theta1 * q1 + self.theta2 * q2 >= pb
    }
}

/// `P(theta1 q1 + theta2 q2 >= pb)` for independent uniform thetas.
pub fn demand_probability(q1: f64, q2: f64, pb: f64) -> Result<f64> {
    for (name, q) in [("q1", q1), ("q2", q2)] {
        if !(q > 0.0 && q <= 1.0) {
            return Err(Error::Domain {
                name,
                value: q,
                expected: "(0, 1]",
            });
        }
    }
    ensure_nonnegative("pb", pb)?;
    Ok(demand(q1, q2, pb))
}

/// Demand with its partial derivatives in `pb`, `q1` and `q2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct DemandPartials {
    pub value: f64,
    pub d_pb: f64,
    pub d_q1: f64,
    pub d_q2: f64,
}

/// Unchecked demand. A zero quality collapses to the one-service rule.
pub(crate) fn demand(q1: f64, q2: f64, pb: f64) -> f64 {
    demand_partials(q1, q2, pb).value
}

pub(crate) fn demand_partials(q1: f64, q2: f64, pb: f64) -> DemandPartials {
    let zero = DemandPartials {
        value: 0.0,
        d_pb: 0.0,
        d_q1: 0.0,
        d_q2: 0.0,
    };
    if pb <= 0.0 {
        return DemandPartials { value: 1.0, ..zero };
    }
    if q1 <= 0.0 || q2 <= 0.0 {
        let q = q1.max(q2).max(0.0);
        if q <= 0.0 || pb >= q {
            return zero;
        }
        return DemandPartials {
            value: 1.0 - pb / q,
            d_pb: -1.0 / q,
            ..zero
        };
    }
    let s = q1 + q2;
    match DemandCase::classify(q1, q2, pb) {
        Some(DemandCase::One) => {
            let prod = q1 * q2;
            DemandPartials {
                value: 1.0 - pb * pb / (2.0 * prod),
                d_pb: -pb / prod,
                d_q1: pb * pb / (2.0 * q1 * prod),
                d_q2: pb * pb / (2.0 * q2 * prod),
            }
        }
        Some(DemandCase::Two) => DemandPartials {
            value: 1.0 - (2.0 * pb - q2) / (2.0 * q1),
            d_pb: -1.0 / q1,
            d_q1: (2.0 * pb - q2) / (2.0 * q1 * q1),
            d_q2: 1.0 / (2.0 * q1),
        },
        Some(DemandCase::Three) => DemandPartials {
            value: 1.0 - (2.0 * pb - q1) / (2.0 * q2),
            d_pb: -1.0 / q2,
            d_q1: 1.0 / (2.0 * q2),
            d_q2: (2.0 * pb - q1) / (2.0 * q2 * q2),
        },
        Some(DemandCase::Four) => {
            let prod = q1 * q2;
            let gap = s - pb;
            DemandPartials {
                value: gap * gap / (2.0 * prod),
                d_pb: -gap / prod,
                d_q1: gap / prod - gap * gap / (2.0 * q1 * prod),
                d_q2: gap / prod - gap * gap / (2.0 * q2 * prod),
            }
        }
        None => zero,
    }
}
