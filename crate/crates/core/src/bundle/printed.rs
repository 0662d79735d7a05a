//! Alternative closed-form bundle optima, evaluated verbatim.
//!
//! These expressions do not satisfy the stationarity conditions. At the
//! reference market the case-1 fee evaluates to about 0.81 against a
//! stationary fee of about 0.658. Diagnostic use only; the solvers never
//! call into this module. A lowercase `m` in the expressions is read as
//! the customer count.

use super::{optimize_report, BundleMarket, BundleSolution, CaseOutcome, DemandCase, Infeasibility};
use crate::error::Result;
use crate::numfmt::sig9;

/// Fee gap above which a printed closed form is flagged.
pub const FEE_MISMATCH_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrintedClosedForm {
    pub case: DemandCase,
    /// The auxiliary constant (A3 for case 1, A4..A6 for cases 2..4).
    pub constant: f64,
    pub pb: f64,
    pub n1: f64,
    pub n2: f64,
}

/// Evaluates the published closed form for `case`.
pub fn printed_closed_form(market: &BundleMarket, case: DemandCase) -> PrintedClosedForm {
    let m = market.m();
    let (s1, s2) = (market.service(0), market.service(1));
    let (c1, c2) = (s1.cost(), s2.cost());
    let (a11, a21, a31) = (s1.curve().alpha1(), s1.curve().alpha2(), s1.curve().alpha3());
    let (a12, a22, a32) = (s2.curve().alpha1(), s2.curve().alpha2(), s2.curve().alpha3());

    match case {
        DemandCase::One => {
            let a3 = 3.0 * a31 * c2 + 3.0 * a32 * c1
                - ((8.0 / 2.0) * a11 * a12 * m * m * a31 * a31 * a32 * a32 + 9.0 * a31 * a31 * c2 * c2
                    - 18.0 * a31 * a32 * c1 * c2
                    + 9.0 * a32 * a32 * c1 * c1)
                    .sqrt();
            PrintedClosedForm {
                case,
                constant: a3,
                n1: (a21 / a11 - (a21 * a3 / 6.0) / (a11 * a32 * c1)).ln() / a31,
                n2: (a22 / a12 - (a22 * a3 / 6.0) / (a12 * a31 * c2)).ln() / a32,
                pb: -0.5 * a3 / (m * a31 * a32),
            }
        }
        DemandCase::Two | DemandCase::Three => {
            let radicand = 0.25 * m * m * a11 * a11 * a31 * a31 * a32 * a32
                - 0.5 * m * m * a11 * a12 * a31 * a31 * a32 * a32
                + 0.25 * m * m * a12 * a12 * a31 * a31 * a32 * a32
                + m * a11 * a31 * a31 * a32 * c2
                - m * a11 * a31 * a32 * a32 * c1
                - m * a12 * a31 * a31 * a32 * c2
                + m * a12 * a31 * a32 * a32 * c1
                + a31 * a31 * c2 * c2
                + 2.0 * a31 * a32 * c1 * c2
                + a32 * a32 * c1 * c1;
            let a = 2.0 * a31 * c2 + 2.0 * a32 * c1 + m * a11 * a31 * a32 - m * a12 * a31 * a32 - 2.0 * radicand.sqrt();
            let gap = a11 - a12;
            PrintedClosedForm {
                case,
                constant: a,
                n1: (0.25 * a21 * a / (a32 * c1 * gap)).ln() / a31,
                n2: ((0.5 / c2) * (m * a22 * a32 - 0.5 * a22 * a / (a31 * gap))).ln() / a32,
                pb: 0.5 * a / (m * a31 * a32)
                    - (2.0 * a31 * c2 + 2.0 * a32 * c1 - m * a12 * a31 * a32) / (m * a31 * a32),
            }
        }
        DemandCase::Four => {
            let radicand = m * m * a11 * a11 * a31 * a31 * a32 * a32 - 2.0 * m * m * a11 * a12 * a31 * a31 * a32 * a32
                + m * m * a12 * a12 * a31 * a31 * a32 * a32
                + 4.0 * m * a11 * a31 * a31 * a32 * c2
                - 4.0 * m * a11 * a31 * a32 * a32 * c1
                - 4.0 * m * a12 * a31 * a31 * a32 * c2
                + 4.0 * m * a12 * a31 * a32 * a32 * c1
                + 4.0 * a31 * a31 * c2 * c2
                + 8.0 * a31 * a32 * c1 * c2
                + 4.0 * a32 * a32 * c1 * c1;
            let a6 = 2.0 * a31 * c2 + 2.0 * a32 * c1 + m * a11 * a31 * a32 - m * a12 * a31 * a32 - radicand.sqrt();
            let d = a11 * a31 * a32 - a12 * a31 * a32;
            PrintedClosedForm {
                case,
                constant: a6,
                n1: (0.25 * a21 * a31 * a6 / (c1 * d)).ln() / a31,
                n2: ((0.5 / c2) * (m * a22 * a32 - 0.5 * a22 * a32 * a6 / d)).ln() / a32,
                pb: a11 - a21 * c1 * d / (0.25 * a21 * a31 * a6),
            }
        }
    }
}

/// Printed form next to the solver's answer for one case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaseDiscrepancy {
    pub printed: PrintedClosedForm,
    /// Stationary point found by the solver, when the case has one.
    pub solved: Option<BundleSolution>,
}

impl CaseDiscrepancy {
    pub fn fee_gap(&self) -> Option<f64> {
        self.solved.map(|s| self.printed.pb - s.pb_star)
    }

    /// True when the printed fee is not finite or misses the solved fee by
    /// more than [`FEE_MISMATCH_TOL`].
    pub fn mismatch(&self) -> bool {
        if !self.printed.pb.is_finite() {
            return true;
        }
        self.fee_gap().is_some_and(|g| g.is_nan() || g.abs() > FEE_MISMATCH_TOL)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormDiagnostic {
    pub cases: Vec<CaseDiscrepancy>,
}

impl ClosedFormDiagnostic {
    pub fn case(&self, case: DemandCase) -> &CaseDiscrepancy {
        &self.cases[usize::from(case.id() - 1)]
    }

    pub fn any_mismatch(&self) -> bool {
        self.cases.iter().any(CaseDiscrepancy::mismatch)
    }

    /// `key=value` lines, one block per case.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for d in &self.cases {
            let id = d.printed.case.id();
            let mut line = |k: &str, v: String| out.push_str(&format!("diagnostic.case{id}.{k}={v}\n"));
            line("printed_constant", sig9(d.printed.constant));
            line("printed_pb", sig9(d.printed.pb));
            line("printed_n1", sig9(d.printed.n1));
            line("printed_n2", sig9(d.printed.n2));
            match d.solved {
                Some(s) => {
                    line("solved_pb", sig9(s.pb_star));
                    line("solved_n1", sig9(s.n1_star));
                    line("solved_n2", sig9(s.n2_star));
                    line("pb_gap", sig9(d.fee_gap().unwrap_or(f64::NAN)));
                }
                None => line("solved_pb", "none".into()),
            }
            let status = if d.mismatch() {
                "MISMATCH"
            } else if d.solved.is_some() {
                "ok"
            } else {
                "unverified"
            };
            line("status", status.into());
        }
        out
    }
}

/// Compares every printed closed form against the solvers.
pub fn diagnose(market: &BundleMarket) -> Result<ClosedFormDiagnostic> {
    let report = optimize_report(market)?;
    let cases = DemandCase::ALL
        .iter()
        .zip(report.cases.iter())
        .map(|(&case, outcome)| CaseDiscrepancy {
            printed: printed_closed_form(market, case),
            solved: match outcome {
                CaseOutcome::Solved(s) => Some(*s),
                CaseOutcome::Infeasible(Infeasibility::OutsideRegion(s)) if case == DemandCase::One => Some(*s),
                _ => None,
            },
        })
        .collect();
    Ok(ClosedFormDiagnostic { cases })
}
