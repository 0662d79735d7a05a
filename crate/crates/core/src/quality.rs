//! Service-quality curves `q(n) = alpha1 - alpha2 * exp(-alpha3 * n)` and
//! their least-squares fit to measured (data size, accuracy) points.
//!
//! `n` counts data units (one unit is one percent of a dataset) and is
//! treated as a continuous quantity throughout.

use std::io::{Read, Write};
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{ensure_nonnegative, Error, Result};
use crate::numopt::golden_section_max;

/// Lower end of the decay-rate search interval used by [`fit`].
pub const FIT_ALPHA3_MIN: f64 = 1e-3;
/// Upper end of the decay-rate search interval used by [`fit`].
pub const FIT_ALPHA3_MAX: f64 = 2.0;
const FIT_GRID_POINTS: usize = 1000;
const FIT_REFINE_TOL: f64 = 1e-8;

/// Accuracy as a function of purchased data units.
///
/// Invariants: `0 < alpha1 <= 1`, `0 <= alpha2 <= alpha1`, `alpha3 > 0`.
/// The curve is nondecreasing and concave on `n >= 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QualityCurve {
    alpha1: f64,
    alpha2: f64,
    alpha3: f64,
}

impl QualityCurve {
    pub fn new(alpha1: f64, alpha2: f64, alpha3: f64) -> Result<Self> {
        if !(alpha1 > 0.0 && alpha1 <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha1 must lie in (0, 1], got {alpha1}"
            )));
        }
        if !(alpha2 >= 0.0 && alpha2 <= alpha1) {
            return Err(Error::InvalidParameter(format!(
                "alpha2 must lie in [0, alpha1 = {alpha1}], got {alpha2}"
            )));
        }
        if !(alpha3 > 0.0 && alpha3.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "alpha3 must be positive and finite, got {alpha3}"
            )));
        }
        Ok(Self { alpha1, alpha2, alpha3 })
    }

    /// Accuracy asymptote.
    pub fn alpha1(&self) -> f64 {
        self.alpha1
    }

    /// Accuracy gap at `n = 0`.
    pub fn alpha2(&self) -> f64 {
        self.alpha2
    }

    /// Decay rate per data unit.
    pub fn alpha3(&self) -> f64 {
        self.alpha3
    }

    /// Quality at `n` data units.
    pub fn evaluate(&self, n: f64) -> Result<f64> {
        ensure_nonnegative("n", n)?;
        Ok(self.value(n))
    }

    /// Derivative `dq/dn` at `n` data units.
    pub fn marginal(&self, n: f64) -> Result<f64> {
        ensure_nonnegative("n", n)?;
        Ok(self.slope(n))
    }

    /// Smallest `n >= 0` with `q(n) >= quality`, or `None` when the curve
    /// never reaches it.
    pub fn data_for_quality(&self, quality: f64) -> Option<f64> {
        if quality <= self.value(0.0) {
            return Some(0.0);
        }
        if quality >= self.alpha1 {
            return None;
        }
        Some(((self.alpha2) / (self.alpha1 - quality)).ln() / self.alpha3)
    }

    // Unchecked forms for the solvers, which keep n >= 0 themselves.
    pub(crate) fn value(&self, n: f64) -> f64 {
        self.alpha1 - self.alpha2 * (-self.alpha3 * n).exp()
    }

    pub(crate) fn slope(&self, n: f64) -> f64 {
        self.alpha2 * self.alpha3 * (-self.alpha3 * n).exp()
    }
}

/// One measured (data size, accuracy) point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccuracySample {
    n: f64,
    accuracy: f64,
}

impl AccuracySample {
    pub fn new(n: f64, accuracy: f64) -> Result<Self> {
        ensure_nonnegative("n", n)?;
        if !(0.0..=1.0).contains(&accuracy) {
            return Err(Error::Domain {
                name: "accuracy",
                value: accuracy,
                expected: "[0, 1]",
            });
        }
        Ok(Self { n, accuracy })
    }

    pub fn n(&self) -> f64 {
        self.n
    }

    pub fn accuracy(&self) -> f64 {
        self.accuracy
    }
}

/// Output of [`fit`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitReport {
    pub curve: QualityCurve,
    /// Mean squared residual at `curve`.
    pub residual: f64,
    /// Set when every sample has the same accuracy; the curve is then flat.
    pub degenerate: bool,
}

/// Least-squares fit of a [`QualityCurve`] to `samples`.
///
/// For a fixed decay rate the model is linear in `(alpha1, alpha2)`, so
/// those two are solved exactly (restricted to the feasible triangle) and
/// only `alpha3` is searched: first on a log-spaced grid over
/// `[FIT_ALPHA3_MIN, FIT_ALPHA3_MAX]`, then by golden section between the
/// neighbours of the best grid point.
pub fn fit(samples: &[AccuracySample]) -> Result<FitReport> {
    let mut sizes: Vec<f64> = samples.iter().map(|s| s.n).collect();
    sizes.sort_by(f64::total_cmp);
    sizes.dedup();
    if sizes.len() < 3 {
        return Err(Error::Underdetermined { distinct: sizes.len() });
    }

    let first = samples[0].accuracy;
    if samples.iter().all(|s| s.accuracy == first) {
        if first == 0.0 {
            return Err(Error::InvalidParameter(
                "all accuracies are zero; no quality curve has alpha1 = 0".into(),
            ));
        }
        return Ok(FitReport {
            curve: QualityCurve::new(first, 0.0, FIT_ALPHA3_MIN)?,
            residual: 0.0,
            degenerate: true,
        });
    }

    let ratio = FIT_ALPHA3_MAX / FIT_ALPHA3_MIN;
    let grid: Vec<f64> = (0..FIT_GRID_POINTS)
        .map(|k| FIT_ALPHA3_MIN * ratio.powf(k as f64 / (FIT_GRID_POINTS - 1) as f64))
        .collect();

    let mut best_k = 0;
    let mut best = LinearFit::solve(samples, grid[0]);
    for (k, &a3) in grid.iter().enumerate().skip(1) {
        let cand = LinearFit::solve(samples, a3);
        if cand.mse < best.mse {
            best = cand;
            best_k = k;
        }
    }

    let lo = grid[best_k.saturating_sub(1)];
    let hi = grid[(best_k + 1).min(FIT_GRID_POINTS - 1)];
    let (a3, _) = golden_section_max(|a3| -LinearFit::solve(samples, a3).mse, lo, hi, FIT_REFINE_TOL);
    let refined = LinearFit::solve(samples, a3);
    let chosen = if refined.mse <= best.mse { refined } else { best };

    Ok(FitReport {
        curve: QualityCurve::new(chosen.alpha1, chosen.alpha2, chosen.alpha3)?,
        residual: chosen.mse,
        degenerate: false,
    })
}

/// Best `(alpha1, alpha2)` for a fixed `alpha3`.
#[derive(Debug, Clone, Copy)]
struct LinearFit {
    alpha1: f64,
    alpha2: f64,
    alpha3: f64,
    mse: f64,
}

impl LinearFit {
    // Model: y = a1 + b x with x = exp(-a3 n) and b = -alpha2. The feasible
    // set is the triangle 0 <= a1 <= 1, -a1 <= b <= 0.
    fn solve(samples: &[AccuracySample], alpha3: f64) -> Self {
        let count = samples.len() as f64;
        let xs: Vec<f64> = samples.iter().map(|s| (-alpha3 * s.n).exp()).collect();
        let sse = |a1: f64, b: f64| -> f64 {
            samples
                .iter()
                .zip(&xs)
                .map(|(s, x)| {
                    let r = s.accuracy - a1 - b * x;
                    r * r
                })
                .sum()
        };
        let feasible = |a1: f64, b: f64| a1 > 0.0 && a1 <= 1.0 && b <= 0.0 && -b <= a1;

        let x_mean = xs.iter().sum::<f64>() / count;
        let y_mean = samples.iter().map(|s| s.accuracy).sum::<f64>() / count;
        let (mut sxx, mut sxy) = (0.0, 0.0);
        for (s, x) in samples.iter().zip(&xs) {
            sxx += (x - x_mean) * (x - x_mean);
            sxy += (x - x_mean) * (s.accuracy - y_mean);
        }

        let mut candidates: Vec<(f64, f64)> = Vec::with_capacity(4);
        if sxx > 0.0 {
            let b = sxy / sxx;
            let a1 = y_mean - b * x_mean;
            if feasible(a1, b) {
                candidates.push((a1, b));
            }
        }
        if candidates.is_empty() {
            // Edge b = 0: flat curve.
            candidates.push((y_mean.clamp(0.0, 1.0), 0.0));
            // Edge a1 = 1.
            let (num, den) = samples
                .iter()
                .zip(&xs)
                .fold((0.0, 0.0), |(n, d), (s, x)| (n + x * (s.accuracy - 1.0), d + x * x));
            candidates.push((1.0, (num / den).clamp(-1.0, 0.0)));
            // Edge b = -a1: curve through the origin.
            let (num, den) = samples.iter().zip(&xs).fold((0.0, 0.0), |(n, d), (s, x)| {
                (n + (1.0 - x) * s.accuracy, d + (1.0 - x) * (1.0 - x))
            });
            let a1 = if den > 0.0 { (num / den).clamp(0.0, 1.0) } else { 0.0 };
            candidates.push((a1, -a1));
        }

        let (a1, b, total) = candidates
            .into_iter()
            .map(|(a1, b)| {
                // alpha1 must stay strictly positive.
                let a1 = a1.max(f64::MIN_POSITIVE);
                let b = b.max(-a1);
                (a1, b, sse(a1, b))
            })
            .fold((0.0, 0.0, f64::INFINITY), |best, c| if c.2 < best.2 { c } else { best });

        Self {
            alpha1: a1,
            alpha2: -b,
            alpha3,
            mse: total / count,
        }
    }
}

/// Samples `curve` at each of `sizes` with additive Gaussian noise of
/// standard deviation `noise_sd`, clamped to `[0, 1]`. The stream is
/// ChaCha8 seeded from `seed`, so output is reproducible everywhere.
pub fn generate_synthetic(
    curve: &QualityCurve,
    sizes: &[f64],
    noise_sd: f64,
    seed: u64,
) -> Result<Vec<AccuracySample>> {
    ensure_nonnegative("noise_sd", noise_sd)?;
    if sizes.is_empty() {
        return Err(Error::InvalidParameter("sizes must be nonempty".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sizes
        .iter()
        .map(|&n| {
            let z: f64 = StandardNormal.sample(&mut rng);
            let acc = (curve.evaluate(n)? + noise_sd * z).clamp(0.0, 1.0);
            AccuracySample::new(n, acc)
        })
        .collect()
}

const CSV_HEADER: [&str; 2] = ["n", "accuracy"];

/// Parses samples from CSV text with header `n,accuracy`.
pub fn parse_samples_csv<R: Read>(reader: R) -> Result<Vec<AccuracySample>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = rdr.headers().map_err(|e| csv_error(&e, 1))?.clone();
    if header.is_empty() || header.len() == 1 && header[0].is_empty() {
        return Err(Error::Parse {
            line: 1,
            message: "empty input, expected header `n,accuracy`".into(),
        });
    }
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::Parse {
            line: 1,
            message: format!(
                "expected header `n,accuracy`, found `{}`",
                header.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }

    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| csv_error(&e, 0))?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != 2 {
            return Err(Error::Parse {
                line,
                message: format!("expected 2 fields, found {}", record.len()),
            });
        }
        let field = |i: usize| -> Result<f64> {
            record[i].parse::<f64>().map_err(|_| Error::Parse {
                line,
                message: format!("`{}` is not a number", &record[i]),
            })
        };
        let sample = AccuracySample::new(field(0)?, field(1)?).map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })?;
        out.push(sample);
    }
    Ok(out)
}

pub fn read_samples_csv(path: &Path) -> Result<Vec<AccuracySample>> {
    let file = std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_samples_csv(file)
}

pub fn write_samples_csv<W: Write>(mut writer: W, samples: &[AccuracySample]) -> Result<()> {
    let io = |e: std::io::Error| Error::Io(e.to_string());
    writer.write_all(b"n,accuracy\n").map_err(io)?;
    for s in samples {
        writeln!(writer, "{},{}", s.n, s.accuracy).map_err(io)?;
    }
    Ok(())
}

fn csv_error(e: &csv::Error, fallback_line: usize) -> Error {
    let line = e.position().map_or(fallback_line, |p| p.line() as usize);
    Error::Parse {
        line,
        message: e.to_string(),
    }
}
