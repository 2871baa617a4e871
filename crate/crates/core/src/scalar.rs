//! Scalar delay equation `u'(t) = a(t) u(t) + b u(t + tau)`.
//!
//! Grid mode carries the history in a [`RingBuffer`]; kernel mode carries a
//! sampled [`HistorySegment`] through the exponential transport resolvent.
//!
//! Buffer conventions on the grid:
//!
//! * implicit Euler reads `u_{n+1-m}`: the buffer holds `u_{n+1-m}..u_n`
//!   (after the shift that writes `u_n`), frozen coefficient `a(t_{n+1})`;
//! * Lie-Trotter reads `u_{n-m}`: the buffer holds `u_{n-m}..u_{n-1}` and the
//!   present value is carried separately, frozen coefficient `a(t_n)`.

use std::fmt;
use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;

use crate::error::{param, Error, Result};
use crate::history::{
    exp_weighted_integral, seed_from_history, transport_resolvent_apply, DelayGrid, HistorySegment,
};
use crate::EPS_DENOMINATOR;

/// The instantaneous coefficient `a(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "mode", content = "a", rename_all = "kebab-case")]
pub enum Coefficient {
    Constant(f64),
    /// `a(t) = slope * t`.
    LinearInTime(f64),
}

impl Coefficient {
    #[inline]
    pub fn at(&self, t: f64) -> f64 {
        match *self {
            Coefficient::Constant(a) => a,
            Coefficient::LinearInTime(slope) => slope * t,
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Coefficient::Constant(_))
    }

    pub fn value(&self) -> f64 {
        match *self {
            Coefficient::Constant(a) | Coefficient::LinearInTime(a) => a,
        }
    }
}

/// History mapping on `[tau, 0]`.
#[derive(Clone)]
pub struct ScalarHistory {
    label: String,
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl ScalarHistory {
    pub fn from_fn<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            label: label.into(),
            f: Arc::new(f),
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::from_fn(format!("constant({c})"), move |_| c)
    }

    /// The degree-10 polynomial fit of the benchmark history.
    pub fn poly10() -> Self {
        Self::from_fn("poly10", crate::oracle::poly_history)
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        (self.f)(t)
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

impl fmt::Debug for ScalarHistory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("ScalarHistory").field(&self.label).finish()
    }
}

#[derive(Debug, Clone)]
pub struct ScalarDelayProblem {
    pub a: Coefficient,
    pub b: f64,
    pub tau: f64,
    pub history: ScalarHistory,
}

impl ScalarDelayProblem {
    pub fn new(a: Coefficient, b: f64, tau: f64, history: ScalarHistory) -> Result<Self> {
        let p = Self { a, b, tau, history };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau.is_finite() && self.tau < 0.0) {
            return param(format!("delay must be negative, got {}", self.tau));
        }
        if !(self.a.value().is_finite() && self.b.is_finite()) {
            return param("coefficients must be finite");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    ImplicitEuler,
    LieTrotter,
}

impl Scheme {
    pub fn short(&self) -> &'static str {
        match self {
            Scheme::ImplicitEuler => "ie",
            Scheme::LieTrotter => "lt",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DelayMode {
    Grid,
    Kernel,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SchemeConfig {
    pub h: f64,
    pub horizon: f64,
    pub scheme: Scheme,
    pub delay_mode: DelayMode,
}

impl SchemeConfig {
    pub fn new(scheme: Scheme, delay_mode: DelayMode, h: f64, horizon: f64) -> Self {
        Self {
            h,
            horizon,
            scheme,
            delay_mode,
        }
    }

    /// Number of steps `N` with `N h` the horizon.
    pub fn steps(&self) -> Result<usize> {
        if !(self.h.is_finite() && self.h > 0.0) {
            return param(format!("step size must be positive, got {}", self.h));
        }
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return param(format!("horizon must be positive, got {}", self.horizon));
        }
        if self.h > self.horizon {
            return param("step size exceeds the horizon");
        }
        let n = (self.horizon / self.h * (1.0 + 1e-12)).floor();
        if n >= u32::MAX as f64 {
            return param("too many steps");
        }
        Ok(n as usize)
    }

    pub fn tag(&self) -> String {
        let mode = match self.delay_mode {
            DelayMode::Grid => "grid",
            DelayMode::Kernel => "kernel",
        };
        format!("{}-{}", self.scheme.short(), mode)
    }
}

/// `alpha = 1 / (1 - h a)` and `beta = h b / (1 - h a)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepCoefficients {
    pub alpha: f64,
    pub beta: f64,
}

impl StepCoefficients {
    pub fn new(h: f64, a: f64, b: f64) -> Result<Self> {
        let den = checked_denominator(1.0 - h * a)?;
        Ok(Self {
            alpha: 1.0 / den,
            beta: h * b / den,
        })
    }
}

#[inline]
fn checked_denominator(den: f64) -> Result<f64> {
    if den.abs() <= EPS_DENOMINATOR || !den.is_finite() {
        return Err(Error::SingularStep { denominator: den });
    }
    Ok(den)
}

/// Lie-Trotter step: forward Euler on the delay, backward Euler on `a`.
#[inline]
pub fn lt_step(u_n: f64, u_delay: f64, a_frozen: f64, b: f64, h: f64) -> Result<f64> {
    let den = checked_denominator(1.0 - h * a_frozen)?;
    Ok((u_n + h * b * u_delay) / den)
}

/// Implicit Euler step with the delayed value taken from the shifted buffer.
#[inline]
pub fn ie_step(u_n: f64, u_delay_new: f64, a_at_new: f64, b: f64, h: f64) -> Result<f64> {
    let den = checked_denominator(1.0 - h * a_at_new)?;
    Ok((u_n + h * b * u_delay_new) / den)
}

/// Implicit Euler with the exact transport resolvent on the history segment.
pub fn ie_step_kernel(
    u_prev: f64,
    rho_prev: &HistorySegment,
    a_at_new: f64,
    b: f64,
    h: f64,
) -> Result<(f64, HistorySegment)> {
    let coupling = (rho_prev.tau() / h).exp();
    let den = checked_denominator(1.0 - h * a_at_new - h * b * coupling)?;
    let u = (u_prev + b * exp_weighted_integral(rho_prev, h)?) / den;
    let rho = transport_resolvent_apply(u, rho_prev, h)?;
    Ok((u, rho))
}

/// Sequential splitting: delay resolvent for `w`, then the reaction solve.
///
/// The transported segment carries `w` as inflow.
pub fn lt_step_kernel(
    u_prev: f64,
    rho_prev: &HistorySegment,
    a_frozen: f64,
    b: f64,
    h: f64,
) -> Result<(f64, HistorySegment)> {
    let coupling = (rho_prev.tau() / h).exp();
    let den_delay = checked_denominator(1.0 - h * b * coupling)?;
    let den_reaction = checked_denominator(1.0 - h * a_frozen)?;
    let w = (u_prev + b * exp_weighted_integral(rho_prev, h)?) / den_delay;
    let rho = transport_resolvent_apply(w, rho_prev, h)?;
    Ok((w / den_reaction, rho))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunResult {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub scheme: String,
    /// Seconds spent in the step loop.
    pub wall_clock: f64,
}

impl RunResult {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Integrates the problem on `t = 0, h, ..., N h`.
pub fn run(problem: &ScalarDelayProblem, config: &SchemeConfig) -> Result<RunResult> {
    problem.validate()?;
    let steps = config.steps()?;
    let grid = DelayGrid::new(config.h, problem.tau)?;
    let start = Instant::now();
    let values = match config.delay_mode {
        DelayMode::Grid => run_grid(problem, config.scheme, &grid, steps)?,
        DelayMode::Kernel => run_kernel(problem, config.scheme, &grid, steps)?,
    };
    let wall_clock = start.elapsed().as_secs_f64();
    let times = (0..=steps).map(|n| n as f64 * config.h).collect();
    Ok(RunResult {
        times,
        values,
        scheme: config.tag(),
        wall_clock,
    })
}

#[inline]
fn finite(v: f64, step: usize) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Divergence { step })
    }
}

fn run_grid(
    p: &ScalarDelayProblem,
    scheme: Scheme,
    grid: &DelayGrid,
    steps: usize,
) -> Result<Vec<f64>> {
    let h = grid.h();
    let cap = grid.required_capacity();
    let hist = |t: f64| p.history.eval(t);
    let mut out = Vec::with_capacity(steps + 1);
    let mut u = finite(hist(0.0), 0)?;
    out.push(u);
    match scheme {
        Scheme::ImplicitEuler => {
            let mut buf = seed_from_history(hist, grid, cap, 0.0)?;
            for n in 0..steps {
                let delayed = buf.delayed_value(grid)?;
                let t_new = (n + 1) as f64 * h;
                u = finite(ie_step(u, delayed, p.a.at(t_new), p.b, h)?, n + 1)?;
                buf.push(u);
                out.push(u);
            }
        }
        Scheme::LieTrotter => {
            let mut buf = seed_from_history(hist, grid, cap, -h)?;
            for n in 0..steps {
                let delayed = buf.delayed_value(grid)?;
                let next = finite(lt_step(u, delayed, p.a.at(n as f64 * h), p.b, h)?, n + 1)?;
                buf.push(u);
                u = next;
                out.push(u);
            }
        }
    }
    Ok(out)
}

fn run_kernel(
    p: &ScalarDelayProblem,
    scheme: Scheme,
    grid: &DelayGrid,
    steps: usize,
) -> Result<Vec<f64>> {
    let h = grid.h();
    let mut rho = HistorySegment::sample(|t| p.history.eval(t), p.tau, grid.m())?;
    let mut u = finite(rho.inflow(), 0)?;
    let mut out = Vec::with_capacity(steps + 1);
    out.push(u);
    for n in 0..steps {
        let (next, seg) = match scheme {
            Scheme::ImplicitEuler => ie_step_kernel(u, &rho, p.a.at((n + 1) as f64 * h), p.b, h)?,
            Scheme::LieTrotter => lt_step_kernel(u, &rho, p.a.at(n as f64 * h), p.b, h)?,
        };
        u = finite(next, n + 1)?;
        rho = seg;
        out.push(u);
    }
    Ok(out)
}
