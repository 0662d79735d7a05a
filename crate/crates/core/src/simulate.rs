//! Monte Carlo estimates of subscription probabilities, drawing customer
//! reservation prices uniformly from `[0, 1]`.
//!
//! The generator is ChaCha8 seeded with `seed_from_u64`; a given seed gives
//! the same stream on every platform and build.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bundle::ReservationPricePair;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimulationConfig {
    sample_count: u64,
    seed: u64,
}

impl SimulationConfig {
    pub fn new(sample_count: u64, seed: u64) -> Result<Self> {
        if sample_count == 0 {
            return Err(Error::InvalidParameter("sample_count must be at least 1".into()));
        }
        Ok(Self { sample_count, seed })
    }

    pub fn sample_count(&self) -> u64 {
        self.sample_count
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Sample proportion with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
}

impl Estimate {
    fn from_hits(hits: u64, n: u64) -> Self {
        let n = n as f64;
        let mean = hits as f64 / n;
        Self {
            mean,
            std_error: (mean * (1.0 - mean) / n).sqrt(),
        }
    }

    /// Whether `value` lies within `sigmas` standard errors of the mean.
    pub fn agrees_with(&self, value: f64, sigmas: f64) -> bool {
        (self.mean - value).abs() <= sigmas * self.std_error
    }
}

fn check_quality(name: &'static str, q: f64) -> Result<()> {
    if q > 0.0 && q <= 1.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value: q,
            expected: "(0, 1]",
        })
    }
}

fn check_fee(name: &'static str, fee: f64) -> Result<()> {
    crate::error::ensure_nonnegative(name, fee)
}

/// Fraction of draws with `theta q >= ps`.
pub fn mc_standalone_demand(q: f64, ps: f64, config: &SimulationConfig) -> Result<Estimate> {
    check_quality("q", q)?;
    check_fee("ps", ps)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let hits = (0..config.sample_count)
        .filter(|_| rng.random::<f64>() * q >= ps)
        .count() as u64;
    Ok(Estimate::from_hits(hits, config.sample_count))
}

/// Fraction of draws with `theta1 q1 + theta2 q2 >= pb`.
pub fn mc_bundle_demand(q1: f64, q2: f64, pb: f64, config: &SimulationConfig) -> Result<Estimate> {
    check_quality("q1", q1)?;
    check_quality("q2", q2)?;
    check_fee("pb", pb)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut hits = 0u64;
    for _ in 0..config.sample_count {
        let pair = ReservationPricePair::new(rng.random(), rng.random())?;
        if pair.subscribes(q1, q2, pb) {
            hits += 1;
        }
    }
    Ok(Estimate::from_hits(hits, config.sample_count))
}
