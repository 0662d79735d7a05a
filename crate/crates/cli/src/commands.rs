//! Subcommand implementations. Each writes its report to `out` and maps
//! failures to [`CliError`].

use std::io::Write;
use std::path::Path;

use iotprice_core::bundle::printed::diagnose;
use iotprice_core::coalition::{build_game, core_interval_2p, shapley, CoreInterval};
use iotprice_core::numfmt::sig9;
use iotprice_core::quality::{fit, read_samples_csv};
use iotprice_core::simulate::{mc_bundle_demand, mc_standalone_demand, SimulationConfig};
use iotprice_core::standalone::{feasibility_threshold, optimize_closed_form, subscribe_probability};
use iotprice_core::{bundle, BundleMarket, BundleSolution, QualityCurve, ServiceOffer, StandaloneMarket};

use crate::config::{MarketConfig, SharingOverrides, SweepParameter, SweepPlan};
use crate::error::CliError;
use crate::report::Report;

/// Agreement band for `simulate`, in standard errors.
pub const SIMULATE_SIGMAS: f64 = 4.0;

pub fn fit_command(samples: &Path, out_path: Option<&Path>, out: &mut dyn Write) -> Result<(), CliError> {
    let samples = read_samples_csv(samples).map_err(|e| CliError {
        message: format!("{}: {e}", samples.display()),
        ..e.into()
    })?;
    let r = fit(&samples)?;
    let mut report = Report::new();
    report
        .float("alpha1", r.curve.alpha1())
        .float("alpha2", r.curve.alpha2())
        .float("alpha3", r.curve.alpha3())
        .float("residual", r.residual)
        .text("degenerate", r.degenerate);
    match out_path {
        Some(path) => report.write_to(&mut std::fs::File::create(path)?)?,
        None => report.write_to(out)?,
    }
    Ok(())
}

pub fn standalone_report(market: &StandaloneMarket) -> Report {
    let s = optimize_closed_form(market);
    let mut report = Report::new();
    report
        .float("n_star", s.n_star)
        .float("ps_star", s.ps_star)
        .float("profit", s.profit)
        .text("interior", s.interior)
        .float("threshold", feasibility_threshold(market));
    report
}

pub fn standalone_command(config: &MarketConfig, service: usize, out: &mut dyn Write) -> Result<(), CliError> {
    standalone_report(&config.standalone_market(service)?).write_to(out)?;
    Ok(())
}

/// Profit split of a bundle against its members' standalone optima.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sharing {
    pub standalone_profits: [f64; 2],
    pub shapley: [f64; 2],
    pub core: CoreInterval,
}

/// Outside options default to each provider's standalone optimum unless
/// `overrides` fixes them.
pub fn sharing(
    market: &BundleMarket,
    solution: &BundleSolution,
    overrides: &SharingOverrides,
) -> Result<Sharing, CliError> {
    let given = [overrides.standalone1_profit, overrides.standalone2_profit];
    let standalone_profits =
        [0, 1].map(|i| given[i].unwrap_or_else(|| optimize_closed_form(&market.standalone(i)).profit));
    let game = build_game(standalone_profits, solution.profit)?;
    let phi = shapley(&game)?;
    Ok(Sharing {
        standalone_profits,
        shapley: [phi.payoffs[0], phi.payoffs[1]],
        core: core_interval_2p(&game)?,
    })
}

pub fn bundle_report(market: &BundleMarket, overrides: &SharingOverrides) -> Result<Report, CliError> {
    let s = bundle::optimize(market)?;
    let share = sharing(market, &s, overrides)?;
    let mut report = Report::new();
    report
        .text("case", s.case.id())
        .float("pb_star", s.pb_star)
        .float("n1_star", s.n1_star)
        .float("n2_star", s.n2_star)
        .float("q1", s.q1)
        .float("q2", s.q2)
        .float("profit", s.profit)
        .float("kkt_residual", s.kkt_residual)
        .float("standalone1_profit", share.standalone_profits[0])
        .float("standalone2_profit", share.standalone_profits[1])
        .text("core_empty", share.core.empty);
    if !share.core.empty {
        report.float("core_lo", share.core.lo).float("core_hi", share.core.hi);
    }
    report
        .float("shapley1", share.shapley[0])
        .float("shapley2", share.shapley[1]);
    Ok(report)
}

pub fn bundle_command(config: &MarketConfig, diagnose_printed: bool, out: &mut dyn Write) -> Result<(), CliError> {
    let market = config.bundle_market()?;
    bundle_report(&market, &config.sharing)?.write_to(out)?;
    if diagnose_printed {
        out.write_all(diagnose(&market)?.render().as_bytes())?;
    }
    Ok(())
}

/// Header and rows of a sweep table, formatted for CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

pub fn sweep_table(config: &MarketConfig) -> Result<SweepTable, CliError> {
    let plan = config
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::input("config has no [sweep] block"))?;
    match config.services.len() {
        1 => standalone_sweep(config, plan),
        2 => bundle_sweep(config, plan),
        n => Err(CliError::input(format!(
            "sweep needs one or two service blocks, config has {n}"
        ))),
    }
}

fn customers_at(value: f64) -> Result<u32, CliError> {
    let m = value.round();
    if m >= 1.0 && m <= f64::from(u32::MAX) {
        Ok(m as u32)
    } else {
        Err(CliError::input(format!(
            "swept M = {value} is not a positive customer count"
        )))
    }
}

/// Value written in the parameter column: `M` is rounded to the count used.
fn parameter_cell(parameter: SweepParameter, value: f64) -> Result<String, CliError> {
    Ok(match parameter {
        SweepParameter::Customers => customers_at(value)?.to_string(),
        _ => sig9(value),
    })
}

fn with_decay(curve: &QualityCurve, alpha3: f64) -> Result<QualityCurve, CliError> {
    Ok(QualityCurve::new(curve.alpha1(), curve.alpha2(), alpha3)?)
}

fn standalone_sweep(config: &MarketConfig, plan: &SweepPlan) -> Result<SweepTable, CliError> {
    if !plan.parameter.standalone() {
        return Err(CliError::input(format!(
            "parameter {} needs two services; single-service sweeps take c, M or alpha3",
            plan.parameter
        )));
    }
    if plan.sharing {
        return Err(CliError::input("sharing needs two service blocks"));
    }
    let base = config.standalone_market(0)?;
    let mut rows = Vec::new();
    for v in plan.values() {
        let market = match plan.parameter {
            SweepParameter::Cost => StandaloneMarket::new(base.customers(), v, *base.curve())?,
            SweepParameter::Customers => StandaloneMarket::new(customers_at(v)?, base.cost(), *base.curve())?,
            SweepParameter::Alpha3 => {
                StandaloneMarket::new(base.customers(), base.cost(), with_decay(base.curve(), v)?)?
            }
            _ => unreachable!("checked above"),
        };
        let s = optimize_closed_form(&market);
        rows.push(vec![
            parameter_cell(plan.parameter, v)?,
            sig9(s.n_star),
            sig9(s.ps_star),
            sig9(s.profit),
            s.interior.to_string(),
        ]);
    }
    let header = [plan.parameter.name(), "n_star", "ps_star", "profit", "interior"];
    Ok(SweepTable {
        header: header.map(str::to_owned).to_vec(),
        rows,
    })
}

fn bundle_sweep(config: &MarketConfig, plan: &SweepPlan) -> Result<SweepTable, CliError> {
    if !plan.parameter.bundle() {
        return Err(CliError::input(format!(
            "parameter {} needs a single service; bundle sweeps take c1, c2, M or alpha31",
            plan.parameter
        )));
    }
    let base = config.bundle_market()?;
    let (s1, s2) = (*base.service(0), *base.service(1));
    let mut rows = Vec::new();
    for v in plan.values() {
        let market = match plan.parameter {
            SweepParameter::Cost1 => BundleMarket::new(base.customers(), ServiceOffer::new(v, *s1.curve())?, s2)?,
            SweepParameter::Cost2 => BundleMarket::new(base.customers(), s1, ServiceOffer::new(v, *s2.curve())?)?,
            SweepParameter::Customers => BundleMarket::new(customers_at(v)?, s1, s2)?,
            SweepParameter::Alpha31 => BundleMarket::new(
                base.customers(),
                ServiceOffer::new(s1.cost(), with_decay(s1.curve(), v)?)?,
                s2,
            )?,
            _ => unreachable!("checked above"),
        };
        let s = bundle::optimize(&market)?;
        let mut row = vec![
            parameter_cell(plan.parameter, v)?,
            sig9(s.n1_star),
            sig9(s.n2_star),
            sig9(s.pb_star),
            s.case.id().to_string(),
            sig9(s.profit),
        ];
        if plan.sharing {
            let share = sharing(&market, &s, &config.sharing)?;
            row.extend([
                sig9(share.standalone_profits[0]),
                sig9(share.standalone_profits[1]),
                sig9(share.shapley[0]),
                sig9(share.shapley[1]),
                sig9(share.core.lo),
                sig9(share.core.hi),
                share.core.empty.to_string(),
            ]);
        }
        rows.push(row);
    }
    let mut header = vec![plan.parameter.name(), "n1_star", "n2_star", "pb_star", "case", "profit"];
    if plan.sharing {
        header.extend([
            "standalone1_profit",
            "standalone2_profit",
            "shapley1",
            "shapley2",
            "core_lo",
            "core_hi",
            "core_empty",
        ]);
    }
    Ok(SweepTable {
        header: header.into_iter().map(str::to_owned).collect(),
        rows,
    })
}

pub fn write_table(table: &SweepTable, out: &mut dyn Write) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&table.header)?;
    for row in &table.rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn sweep_command(config: &MarketConfig, out_path: Option<&Path>, out: &mut dyn Write) -> Result<(), CliError> {
    let table = sweep_table(config)?;
    match out_path {
        Some(path) => {
            write_table(&table, &mut std::fs::File::create(path)?)?;
            writeln!(out, "rows={}", table.rows.len())?;
        }
        None => write_table(&table, out)?,
    }
    Ok(())
}

pub fn simulate_report(config: &MarketConfig, samples: u64, seed: u64) -> Result<Report, CliError> {
    let sim = SimulationConfig::new(samples, seed)?;
    let over = &config.simulate;
    let mut report = Report::new();
    let (analytic, est) = match config.services.len() {
        1 => {
            let market = config.standalone_market(0)?;
            let opt = optimize_closed_form(&market);
            let n = over.n.unwrap_or(opt.n_star);
            let fee = over.fee.unwrap_or(opt.ps_star);
            let q = market.curve().evaluate(n)?;
            report
                .text("market", "standalone")
                .float("n", n)
                .float("q", q)
                .float("fee", fee);
            (subscribe_probability(q, fee), mc_standalone_demand(q, fee, &sim)?)
        }
        2 => {
            let market = config.bundle_market()?;
            let opt = bundle::optimize(&market)?;
            let n1 = over.n1.unwrap_or(opt.n1_star);
            let n2 = over.n2.unwrap_or(opt.n2_star);
            let fee = over.fee.unwrap_or(opt.pb_star);
            let q1 = market.service(0).curve().evaluate(n1)?;
            let q2 = market.service(1).curve().evaluate(n2)?;
            report
                .text("market", "bundle")
                .float("n1", n1)
                .float("n2", n2)
                .float("q1", q1)
                .float("q2", q2)
                .float("fee", fee);
            (
                bundle::demand_probability(q1, q2, fee)?,
                mc_bundle_demand(q1, q2, fee, &sim)?,
            )
        }
        n => {
            return Err(CliError::input(format!(
                "simulate needs one or two service blocks, config has {n}"
            )))
        }
    };
    let pass = est.agrees_with(analytic, SIMULATE_SIGMAS);
    report
        .text("samples", samples)
        .text("seed", seed)
        .float("analytic", analytic)
        .float("mc_mean", est.mean)
        .float("std_error", est.std_error)
        .text("result", if pass { "PASS" } else { "FAIL" });
    Ok(report)
}

pub fn simulate_command(config: &MarketConfig, samples: u64, seed: u64, out: &mut dyn Write) -> Result<(), CliError> {
    simulate_report(config, samples, seed)?.write_to(out)?;
    Ok(())
}
