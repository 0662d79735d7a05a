//! Fixtures shared by the benchmarks.

use iotprice_core::quality::generate_synthetic;
use iotprice_core::{AccuracySample, BundleMarket, QualityCurve, ServiceOffer, StandaloneMarket};

pub fn service1_curve() -> QualityCurve {
    QualityCurve::new(0.884, 0.59, 0.114).expect("valid curve")
}

pub fn service2_curve() -> QualityCurve {
    QualityCurve::new(0.82, 0.069, 0.142).expect("valid curve")
}

pub fn standalone_market() -> StandaloneMarket {
    StandaloneMarket::new(50, 0.1, service1_curve()).expect("valid market")
}

pub fn bundle_market() -> BundleMarket {
    BundleMarket::new(
        50,
        ServiceOffer::new(0.1, service1_curve()).expect("valid offer"),
        ServiceOffer::new(0.05, service2_curve()).expect("valid offer"),
    )
    .expect("valid market")
}

/// Bundle market whose optimum lies outside case 1, exercising the
/// grid-seeded region solver.
pub fn lopsided_bundle_market() -> BundleMarket {
    BundleMarket::new(
        50,
        ServiceOffer::new(0.1, service1_curve()).expect("valid offer"),
        ServiceOffer::new(0.5, QualityCurve::new(0.05, 0.04, 0.142).expect("valid curve")).expect("valid offer"),
    )
    .expect("valid market")
}

pub fn noisy_samples(count: usize) -> Vec<AccuracySample> {
    let sizes: Vec<f64> = (1..=count).map(|n| n as f64).collect();
    generate_synthetic(&service2_curve(), &sizes, 0.005, 1).expect("valid samples")
}
