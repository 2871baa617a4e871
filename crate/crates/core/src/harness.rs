//! Experiment drivers: order studies, growth fits, error profiles, timing.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{param, Error, Result};
use crate::pde::{run_pde, PdeConfig, PdeProblem};
use crate::scalar::{run, DelayMode, RunResult, ScalarDelayProblem, Scheme, SchemeConfig};

/// Two scheme realizations compared against each other.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SchemePair {
    pub first: (Scheme, DelayMode),
    pub second: (Scheme, DelayMode),
}

impl SchemePair {
    /// Grid-mode implicit Euler against grid-mode Lie-Trotter.
    pub fn ie_vs_lt() -> Self {
        Self {
            first: (Scheme::ImplicitEuler, DelayMode::Grid),
            second: (Scheme::LieTrotter, DelayMode::Grid),
        }
    }

    pub fn kernel_vs_grid(scheme: Scheme) -> Self {
        Self {
            first: (scheme, DelayMode::Kernel),
            second: (scheme, DelayMode::Grid),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub h: Vec<f64>,
    pub error: Vec<f64>,
    /// `None` when some error vanishes and no log-log fit exists.
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
}

impl ConvergenceReport {
    pub fn is_degenerate(&self) -> bool {
        self.slope.is_none()
    }

    /// `error[k] / error[k + 1]` for adjacent step sizes.
    pub fn ratios(&self) -> Vec<f64> {
        self.error.windows(2).map(|w| w[0] / w[1]).collect()
    }
}

/// Least-squares line `y = slope x + intercept`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return Err(Error::Fit(format!(
            "need at least two paired samples, got {n}"
        )));
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// Sup-norm difference of the two realizations on the coarsest time grid.
pub fn convergence_study(
    problem: &ScalarDelayProblem,
    pair: SchemePair,
    h_list: &[f64],
    horizon: f64,
) -> Result<ConvergenceReport> {
    if h_list.len() < 3 {
        return param("a convergence study needs at least three step sizes");
    }
    if h_list.windows(2).any(|w| !(w[1] < w[0])) {
        return param("step sizes must be strictly decreasing");
    }
    let coarse = h_list[0];
    let mut error = Vec::with_capacity(h_list.len());
    for &h in h_list {
        let stride = (coarse / h).round();
        if (stride * h - coarse).abs() > 1e-9 * coarse {
            return param(format!(
                "h = {h} does not divide the coarsest step {coarse}"
            ));
        }
        let stride = stride as usize;
        let cfg = |(scheme, mode)| SchemeConfig::new(scheme, mode, h, horizon);
        let a = run(problem, &cfg(pair.first))?;
        let b = run(problem, &cfg(pair.second))?;
        let e = a
            .values
            .iter()
            .zip(&b.values)
            .step_by(stride)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        error.push(e);
    }
    let (slope, intercept) = if error.iter().all(|&e| e > 0.0) {
        let lx: Vec<f64> = h_list.iter().map(|h| h.ln()).collect();
        let ly: Vec<f64> = error.iter().map(|e| e.ln()).collect();
        let (s, c) = linear_fit(&lx, &ly)?;
        (Some(s), Some(c))
    } else {
        (None, None)
    };
    Ok(ConvergenceReport {
        h: h_list.to_vec(),
        error,
        slope,
        intercept,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthFit {
    #[serde(rename = "logM")]
    pub log_m: f64,
    pub omega: f64,
    pub window: (f64, f64),
    pub samples: usize,
}

/// Fits `log |u(t)| ~ log M + omega t` over `t >= t_start`.
pub fn exp_growth_fit(series: &RunResult, t_start: f64) -> Result<GrowthFit> {
    let (x, y): (Vec<f64>, Vec<f64>) = series
        .times
        .iter()
        .zip(&series.values)
        .filter(|(t, u)| **t >= t_start && u.abs() > 1e-300)
        .map(|(t, u)| (*t, u.abs().ln()))
        .unzip();
    if x.len() < 3 {
        return Err(Error::Fit(format!(
            "only {} usable samples after t = {t_start}",
            x.len()
        )));
    }
    let (omega, log_m) = linear_fit(&x, &y)?;
    Ok(GrowthFit {
        log_m,
        omega,
        window: (t_start, *series.times.last().unwrap_or(&t_start)),
        samples: x.len(),
    })
}

/// Rightmost solution of `lambda = a + b e^{lambda tau}` found by Newton from
/// a seed grid on `Re in [-1, 1]`, `Im in [0, 20]`.
pub fn rightmost_characteristic_root(a: f64, b: f64, tau: f64) -> Result<Complex64> {
    if !(tau < 0.0 && tau.is_finite()) {
        return param(format!("delay must be negative, got {tau}"));
    }
    let f = |z: Complex64| z - a - b * (z * tau).exp();
    let df = |z: Complex64| 1.0 - b * tau * (z * tau).exp();
    let mut best: Option<Complex64> = None;
    for i in 0..=20 {
        for j in 0..=80 {
            let mut z = Complex64::new(-1.0 + 0.1 * i as f64, 0.25 * j as f64);
            let mut ok = false;
            for _ in 0..60 {
                let step = f(z) / df(z);
                if !step.is_finite() {
                    break;
                }
                z -= step;
                if step.norm() < 1e-14 * z.norm().max(1.0) {
                    ok = true;
                    break;
                }
            }
            if ok && f(z).norm() < 1e-10 && z.re.abs() < 50.0 {
                let z = Complex64::new(z.re, z.im.abs());
                if best.is_none_or(|w| z.re > w.re + 1e-12) {
                    best = Some(z);
                }
            }
        }
    }
    best.ok_or(Error::NonConvergence {
        iterations: 60,
        residual: f64::NAN,
    })
}

/// Pointwise `|s1 - s2|` on a shared time grid.
pub fn error_profile(s1: &RunResult, s2: &RunResult) -> Result<Vec<f64>> {
    if s1.times.len() != s2.times.len()
        || s1
            .times
            .iter()
            .zip(&s2.times)
            .any(|(a, b)| (a - b).abs() > 1e-12 * a.abs().max(1.0))
    {
        return param("series live on different time grids");
    }
    Ok(s1
        .values
        .iter()
        .zip(&s2.values)
        .map(|(a, b)| (a - b).abs())
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RuntimeReport {
    /// Median step-loop seconds of implicit Euler.
    pub ie: f64,
    /// Median step-loop seconds of Lie-Trotter.
    pub lt: f64,
    /// `ie / lt`.
    pub ratio: f64,
    pub repetitions: usize,
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn timed<F: FnMut() -> Result<f64>>(mut run_once: F, repetitions: usize) -> Result<f64> {
    run_once()?;
    let samples = (0..repetitions)
        .map(|_| run_once())
        .collect::<Result<Vec<_>>>()?;
    Ok(median(samples))
}

fn report(ie: f64, lt: f64, repetitions: usize) -> RuntimeReport {
    RuntimeReport {
        ie,
        lt,
        ratio: ie / lt.max(f64::MIN_POSITIVE),
        repetitions,
    }
}

/// Median wall clock of both PDE schemes after one warm-up run each.
pub fn compare_pde_runtime(
    problem: &PdeProblem,
    h: f64,
    horizon: f64,
    repetitions: usize,
) -> Result<RuntimeReport> {
    if repetitions < 3 {
        return param("timing needs at least three repetitions");
    }
    let cfg = |s| PdeConfig::new(s, h, horizon);
    let ie = timed(
        || Ok(run_pde(problem, &cfg(Scheme::ImplicitEuler))?.wall_clock),
        repetitions,
    )?;
    let lt = timed(
        || Ok(run_pde(problem, &cfg(Scheme::LieTrotter))?.wall_clock),
        repetitions,
    )?;
    Ok(report(ie, lt, repetitions))
}

/// Scalar counterpart in the given delay mode.
pub fn compare_scalar_runtime(
    problem: &ScalarDelayProblem,
    mode: DelayMode,
    h: f64,
    horizon: f64,
    repetitions: usize,
) -> Result<RuntimeReport> {
    if repetitions < 3 {
        return param("timing needs at least three repetitions");
    }
    let cfg = |s| SchemeConfig::new(s, mode, h, horizon);
    let ie = timed(
        || Ok(run(problem, &cfg(Scheme::ImplicitEuler))?.wall_clock),
        repetitions,
    )?;
    let lt = timed(
        || Ok(run(problem, &cfg(Scheme::LieTrotter))?.wall_clock),
        repetitions,
    )?;
    Ok(report(ie, lt, repetitions))
}
