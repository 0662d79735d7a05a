//! Market configuration files.
//!
//! The format is a flat subset of TOML; see `docs/config.md` for the
//! grammar. Sample paths are resolved against the config file's directory.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use iotprice_core::quality::{fit, read_samples_csv};
use iotprice_core::{BundleMarket, QualityCurve, ServiceOffer, StandaloneMarket};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    customers: i64,
    #[serde(default)]
    service: BTreeMap<String, RawService>,
    sweep: Option<SweepPlan>,
    #[serde(default)]
    simulate: SimulateOptions,
    #[serde(default)]
    sharing: SharingOverrides,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawService {
    cost: f64,
    alpha1: Option<f64>,
    alpha2: Option<f64>,
    alpha3: Option<f64>,
    samples: Option<String>,
}

/// Parameter varied by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub enum SweepParameter {
    /// Data cost of the only service.
    #[serde(rename = "c")]
    Cost,
    #[serde(rename = "M")]
    Customers,
    /// Decay rate of the only service.
    #[serde(rename = "alpha3")]
    Alpha3,
    #[serde(rename = "c1")]
    Cost1,
    #[serde(rename = "c2")]
    Cost2,
    /// Decay rate of service 1 in a bundle.
    #[serde(rename = "alpha31")]
    Alpha31,
}

impl SweepParameter {
    pub fn name(self) -> &'static str {
        match self {
            Self::Cost => "c",
            Self::Customers => "M",
            Self::Alpha3 => "alpha3",
            Self::Cost1 => "c1",
            Self::Cost2 => "c2",
            Self::Alpha31 => "alpha31",
        }
    }

    /// Whether the parameter applies to single-service markets.
    pub fn standalone(self) -> bool {
        matches!(self, Self::Cost | Self::Customers | Self::Alpha3)
    }

    pub fn bundle(self) -> bool {
        matches!(self, Self::Cost1 | Self::Cost2 | Self::Customers | Self::Alpha31)
    }
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepPlan {
    pub parameter: SweepParameter,
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
    #[serde(default)]
    pub sharing: bool,
}

impl SweepPlan {
    /// Evenly spaced values from `lo` to `hi` inclusive.
    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.lo];
        }
        let step = (self.hi - self.lo) / (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                if i + 1 == self.steps {
                    self.hi
                } else {
                    self.lo + step * i as f64
                }
            })
            .collect()
    }
}

/// Overrides for the operating point of `simulate`. Missing values come
/// from the optimizer.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateOptions {
    pub fee: Option<f64>,
    pub n: Option<f64>,
    pub n1: Option<f64>,
    pub n2: Option<f64>,
}

/// Outside options for profit sharing. By default each provider's outside
/// option is its own standalone optimum.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SharingOverrides {
    pub standalone1_profit: Option<f64>,
    pub standalone2_profit: Option<f64>,
}

/// A validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct MarketConfig {
    pub customers: u32,
    pub services: Vec<ServiceOffer>,
    pub sweep: Option<SweepPlan>,
    pub simulate: SimulateOptions,
    pub sharing: SharingOverrides,
}

impl MarketConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base).map_err(|e| CliError {
            message: format!("{}: {}", path.display(), e.message),
            ..e
        })
    }

    /// Parses config text, resolving sample paths against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self, CliError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| CliError::input(e.to_string().trim_end().to_owned()))?;

        let customers = u32::try_from(raw.customers)
            .ok()
            .filter(|&m| m >= 1)
            .ok_or_else(|| CliError::input(format!("customers must be a positive integer, got {}", raw.customers)))?;

        let mut services = Vec::new();
        for (i, (key, block)) in raw.service.iter().enumerate() {
            let expected = (i + 1).to_string();
            if *key != expected {
                return Err(CliError::input(format!(
                    "service blocks must be numbered 1, 2; found [service.{key}] where [service.{expected}] was expected"
                )));
            }
            services.push(service_offer(key, block, base)?);
        }
        if services.len() > 2 {
            return Err(CliError::input("at most two service blocks are supported"));
        }

        if let Some(sweep) = &raw.sweep {
            if !(sweep.lo.is_finite() && sweep.hi.is_finite() && sweep.lo <= sweep.hi) {
                return Err(CliError::input(format!(
                    "sweep needs finite lo <= hi, got [{}, {}]",
                    sweep.lo, sweep.hi
                )));
            }
            if sweep.steps == 0 {
                return Err(CliError::input("sweep steps must be at least 1"));
            }
        }

        let outside = [raw.sharing.standalone1_profit, raw.sharing.standalone2_profit];
        if let Some(v) = outside.into_iter().flatten().find(|v| !v.is_finite()) {
            return Err(CliError::input(format!("outside-option profit {v} is not finite")));
        }

        Ok(Self {
            customers,
            services,
            sweep: raw.sweep,
            simulate: raw.simulate,
            sharing: raw.sharing,
        })
    }

    pub fn standalone_market(&self, index: usize) -> Result<StandaloneMarket, CliError> {
        let offer = self
            .services
            .get(index)
            .ok_or_else(|| CliError::input(format!("config has no [service.{}] block", index + 1)))?;
        Ok(StandaloneMarket::new(self.customers, offer.cost(), *offer.curve())?)
    }

    pub fn bundle_market(&self) -> Result<BundleMarket, CliError> {
        match self.services.as_slice() {
            [s1, s2] => Ok(BundleMarket::new(self.customers, *s1, *s2)?),
            other => Err(CliError::input(format!(
                "bundling needs two service blocks, config has {}",
                other.len()
            ))),
        }
    }
}

fn service_offer(key: &str, block: &RawService, base: &Path) -> Result<ServiceOffer, CliError> {
    let context = |e: CliError| CliError {
        message: format!("[service.{key}]: {}", e.message),
        ..e
    };
    let curve = match (block.alpha1, block.alpha2, block.alpha3, &block.samples) {
        (Some(a1), Some(a2), Some(a3), None) => QualityCurve::new(a1, a2, a3).map_err(|e| context(e.into()))?,
        (None, None, None, Some(samples)) => {
            let path = base.join(samples);
            let samples = read_samples_csv(&path).map_err(|e| {
                context(CliError {
                    message: format!("{}: {e}", path.display()),
                    ..e.into()
                })
            })?;
            fit(&samples).map_err(|e| context(e.into()))?.curve
        }
        _ => {
            return Err(context(CliError::input(
                "give either all of alpha1, alpha2, alpha3 or a samples path",
            )))
        }
    };
    ServiceOffer::new(block.cost, curve).map_err(|e| context(e.into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::ExitKind;

    const REFERENCE: &str = "
customers = 50

[service.1]
cost = 0.1
alpha1 = 0.884
alpha2 = 0.59
alpha3 = 0.114

[service.2]
cost = 0.05
alpha1 = 0.82
alpha2 = 0.069
alpha3 = 0.142
";

    fn parse(text: &str) -> Result<MarketConfig, CliError> {
        MarketConfig::parse(text, Path::new("."))
    }

    #[test]
    fn parses_reference_config() {
        let c = parse(REFERENCE).unwrap();
        assert_eq!(c.customers, 50);
        assert_eq!(c.services.len(), 2);
        assert_eq!(c.services[1].cost(), 0.05);
        assert!(c.sweep.is_none());
        assert!(c.bundle_market().is_ok());
    }

    #[test]
    fn parses_sweep_block() {
        let text =
            format!("{REFERENCE}\n[sweep]\nparameter = \"c1\"\nlo = 0.02\nhi = 0.9\nsteps = 45\nsharing = true\n");
        let s = parse(&text).unwrap().sweep.unwrap();
        assert_eq!(s.parameter, SweepParameter::Cost1);
        assert!(s.sharing);
        let v = s.values();
        assert_eq!(v.len(), 45);
        assert_eq!((v[0], v[44]), (0.02, 0.9));
        assert!((v[1] - 0.04).abs() < 1e-15);
    }

    #[test]
    fn parses_sharing_overrides() {
        let c = parse(&format!("{REFERENCE}\n[sharing]\nstandalone2_profit = 12.5\n")).unwrap();
        assert_eq!(c.sharing.standalone1_profit, None);
        assert_eq!(c.sharing.standalone2_profit, Some(12.5));
        assert!(parse(&format!("{REFERENCE}\n[sharing]\nstandalone3_profit = 1\n")).is_err());
    }

    #[test]
    fn one_step_sweep_is_lo() {
        let s = SweepPlan {
            parameter: SweepParameter::Customers,
            lo: 10.0,
            hi: 200.0,
            steps: 1,
            sharing: false,
        };
        assert_eq!(s.values(), vec![10.0]);
    }

    #[test]
    fn rejects_bad_configs() {
        let cases = [
            REFERENCE.replace("customers = 50", "customers = 0"),
            REFERENCE.replace("customers = 50", "customers = -3"),
            REFERENCE.replace("cost = 0.1", "cost = 0"),
            REFERENCE.replace("alpha2 = 0.59", "alpha2 = 0.95"),
            REFERENCE.replace("alpha3 = 0.114", ""),
            REFERENCE.replace("[service.2]", "[service.3]"),
            REFERENCE.replace("cost = 0.1", "cost = 0.1\ncolour = 1"),
            format!("{REFERENCE}\n[sweep]\nparameter = \"zeta\"\nlo = 0\nhi = 1\nsteps = 3\n"),
            format!("{REFERENCE}\n[sweep]\nparameter = \"c1\"\nlo = 1\nhi = 0\nsteps = 3\n"),
            format!("{REFERENCE}\n[sweep]\nparameter = \"c1\"\nlo = 0\nhi = 1\nsteps = 0\n"),
            "customers = ".to_owned(),
        ];
        for text in cases {
            let err = parse(&text).unwrap_err();
            assert_eq!(err.kind, ExitKind::Input, "{text}");
        }
    }

    #[test]
    fn missing_sample_file_is_input_error() {
        let text = "customers = 5\n[service.1]\ncost = 0.1\nsamples = \"does-not-exist.csv\"\n";
        let err = parse(text).unwrap_err();
        assert_eq!(err.kind, ExitKind::Input);
        assert!(err.message.contains("does-not-exist.csv"));
    }

    #[test]
    fn single_service_cannot_bundle() {
        let text = REFERENCE.split("[service.2]").next().unwrap();
        let c = parse(text).unwrap();
        assert!(c.standalone_market(0).is_ok());
        assert_eq!(c.bundle_market().unwrap_err().kind, ExitKind::Input);
    }

    #[test]
    fn parameter_applicability() {
        assert!(SweepParameter::Cost.standalone() && !SweepParameter::Cost.bundle());
        assert!(SweepParameter::Customers.standalone() && SweepParameter::Customers.bundle());
        assert!(!SweepParameter::Alpha31.standalone());
    }
}
