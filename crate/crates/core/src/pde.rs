//! Reaction-diffusion equation with a discrete delay on `(0, L)`:
//!
//! `u_t = kappa u_xx + lambda(t) u + b u(t + tau)`, `u = 0` at `x = 0, L`,
//!
//! with `lambda(t) = lambda0 + lambda1 sin(2 pi t / T_lambda)`. Space uses the
//! three-point Laplacian on `Nx` interior points, `dx = L / (Nx + 1)`.
//!
//! Both schemes keep the delayed fields in a [`FieldRingBuffer`] holding
//! `u_{n+1-m}..u_n` and read the oldest slot. Implicit Euler solves
//! `(I - h kappa Lap - h lambda(t_{n+1})) u_{n+1} = u_n + h b u_{n+1-m}`;
//! Lie-Trotter does a cached diffusion solve followed by the pointwise
//! reaction/delay update frozen at `t_n`.

use std::fmt;
use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;

use crate::error::{param, Error, Result};
use crate::history::{seed_times, DelayGrid, FieldRingBuffer};
use crate::scalar::Scheme;
use crate::EPS_DENOMINATOR;

/// History `u(t, x)` on `[tau, 0] x [0, L]`.
#[derive(Clone)]
pub struct FieldHistory {
    label: String,
    f: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
}

impl FieldHistory {
    pub fn from_fn<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            label: label.into(),
            f: Arc::new(f),
        }
    }

    /// `0.3 + 0.2 sin(2 pi x) cos(2 pi t)`.
    pub fn standard() -> Self {
        use std::f64::consts::TAU;
        Self::from_fn("standard", |t, x| {
            0.3 + 0.2 * (TAU * x).sin() * (TAU * t).cos()
        })
    }

    pub fn zero() -> Self {
        Self::from_fn("zero", |_, _| 0.0)
    }

    #[inline]
    pub fn eval(&self, t: f64, x: f64) -> f64 {
        (self.f)(t, x)
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

impl fmt::Debug for FieldHistory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("FieldHistory").field(&self.label).finish()
    }
}

#[derive(Debug, Clone)]
pub struct PdeProblem {
    pub kappa: f64,
    pub lambda0: f64,
    pub lambda1: f64,
    pub t_lambda: f64,
    pub b: f64,
    pub tau: f64,
    pub length: f64,
    pub nx: usize,
    pub history: FieldHistory,
}

impl PdeProblem {
    /// `kappa = 0.02`, `lambda = -0.8`, `b = -0.8`, `tau = -0.6`, `L = 1`, `Nx = 300`.
    pub fn paper_autonomous() -> Self {
        Self {
            kappa: 0.02,
            lambda0: -0.8,
            lambda1: 0.0,
            t_lambda: 4.0,
            b: -0.8,
            tau: -0.6,
            length: 1.0,
            nx: 300,
            history: FieldHistory::standard(),
        }
    }

    /// As [`PdeProblem::paper_autonomous`] with `lambda1 = 0.2`, `T_lambda = 4`.
    pub fn paper_nonautonomous() -> Self {
        Self {
            lambda1: 0.2,
            ..Self::paper_autonomous()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa.is_finite() && self.kappa >= 0.0) {
            return param(format!(
                "diffusion coefficient must be nonnegative, got {}",
                self.kappa
            ));
        }
        if !(self.tau.is_finite() && self.tau < 0.0) {
            return param(format!("delay must be negative, got {}", self.tau));
        }
        if !(self.length.is_finite() && self.length > 0.0) {
            return param(format!(
                "domain length must be positive, got {}",
                self.length
            ));
        }
        if self.nx == 0 {
            return param("need at least one interior grid point");
        }
        if !(self.lambda0.is_finite() && self.lambda1.is_finite() && self.b.is_finite()) {
            return param("reaction and delay coefficients must be finite");
        }
        if self.lambda1 != 0.0 && !(self.t_lambda.is_finite() && self.t_lambda > 0.0) {
            return param(format!(
                "reaction period must be positive, got {}",
                self.t_lambda
            ));
        }
        Ok(())
    }

    pub fn is_autonomous(&self) -> bool {
        self.lambda1 == 0.0
    }

    pub fn dx(&self) -> f64 {
        self.length / (self.nx + 1) as f64
    }

    /// Interior abscissae `x_i = i dx`, `i = 1..=Nx`.
    pub fn nodes(&self) -> Vec<f64> {
        let dx = self.dx();
        (1..=self.nx).map(|i| i as f64 * dx).collect()
    }

    #[inline]
    pub fn lambda(&self, t: f64) -> f64 {
        if self.lambda1 == 0.0 {
            self.lambda0
        } else {
            self.lambda0 + self.lambda1 * (std::f64::consts::TAU * t / self.t_lambda).sin()
        }
    }

    /// Value at `x = L / 2`, averaging the two middle points for even `Nx`.
    pub fn center(&self, u: &[f64]) -> f64 {
        let n = u.len();
        if n % 2 == 1 {
            u[n / 2]
        } else {
            0.5 * (u[n / 2 - 1] + u[n / 2])
        }
    }

    /// `sqrt(dx sum u_i^2)`.
    pub fn l2(&self, u: &[f64]) -> f64 {
        (self.dx() * u.iter().map(|v| v * v).sum::<f64>()).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Factorization {
    c_prime: Vec<f64>,
    inv_den: Vec<f64>,
}

/// Tridiagonal system; `sub[0]` and `sup[n-1]` are unused.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiag {
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    pub sup: Vec<f64>,
    factor: Option<Factorization>,
}

impl Tridiag {
    pub fn new(sub: Vec<f64>, diag: Vec<f64>, sup: Vec<f64>) -> Result<Self> {
        let n = diag.len();
        if n == 0 || sub.len() != n || sup.len() != n {
            return param("tridiagonal bands must have equal nonzero length");
        }
        Ok(Self {
            sub,
            diag,
            sup,
            factor: None,
        })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn is_factored(&self) -> bool {
        self.factor.is_some()
    }

    fn compute_factor(&self) -> Result<Factorization> {
        let n = self.len();
        let mut c_prime = vec![0.0; n];
        let mut inv_den = vec![0.0; n];
        let mut prev_c = 0.0;
        for i in 0..n {
            let den = if i == 0 {
                self.diag[0]
            } else {
                self.diag[i] - self.sub[i] * prev_c
            };
            if den == 0.0 || !den.is_finite() {
                return Err(Error::SingularSystem { row: i });
            }
            let inv = 1.0 / den;
            inv_den[i] = inv;
            prev_c = self.sup[i] * inv;
            c_prime[i] = prev_c;
        }
        Ok(Factorization { c_prime, inv_den })
    }

    /// Caches the forward-elimination multipliers.
    pub fn factorize(&mut self) -> Result<()> {
        if self.factor.is_none() {
            self.factor = Some(self.compute_factor()?);
        }
        Ok(())
    }

    pub fn factored(mut self) -> Result<Self> {
        self.factorize()?;
        Ok(self)
    }

    /// Solves into `out`; factors on the fly when no factorization is cached.
    pub fn solve_into(&self, rhs: &[f64], out: &mut [f64]) -> Result<()> {
        let n = self.len();
        if rhs.len() != n || out.len() != n {
            return param(format!(
                "right-hand side has length {}, expected {n}",
                rhs.len()
            ));
        }
        match &self.factor {
            Some(f) => {
                apply_factor(self, f, rhs, out);
            }
            None => {
                let f = self.compute_factor()?;
                apply_factor(self, &f, rhs, out);
            }
        }
        Ok(())
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.len()];
        self.solve_into(rhs, &mut out)?;
        Ok(out)
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut v = self.diag[i] * x[i];
                if i > 0 {
                    v += self.sub[i] * x[i - 1];
                }
                if i + 1 < n {
                    v += self.sup[i] * x[i + 1];
                }
                v
            })
            .collect()
    }
}

#[inline]
fn apply_factor(sys: &Tridiag, f: &Factorization, rhs: &[f64], out: &mut [f64]) {
    let n = sys.len();
    let mut prev = 0.0;
    for i in 0..n {
        prev = if i == 0 {
            rhs[0] * f.inv_den[0]
        } else {
            (rhs[i] - sys.sub[i] * prev) * f.inv_den[i]
        };
        out[i] = prev;
    }
    for i in (0..n - 1).rev() {
        out[i] -= f.c_prime[i] * out[i + 1];
    }
}

/// Thomas algorithm, using the cached factorization when present.
pub fn thomas_solve(sys: &Tridiag, rhs: &[f64]) -> Result<Vec<f64>> {
    sys.solve(rhs)
}

/// `I - h kappa Lap - h lambda(t) I`, or `I - h kappa Lap` without reaction.
pub fn assemble_system(
    problem: &PdeProblem,
    h: f64,
    t: f64,
    include_reaction: bool,
) -> Result<Tridiag> {
    if !(h.is_finite() && h > 0.0) {
        return param(format!("step size must be positive, got {h}"));
    }
    let n = problem.nx;
    let dx = problem.dx();
    let r = h * problem.kappa / (dx * dx);
    let reaction = if include_reaction {
        h * problem.lambda(t)
    } else {
        0.0
    };
    let off = if r == 0.0 { 0.0 } else { -r };
    Tridiag::new(
        vec![off; n],
        vec![1.0 + 2.0 * r - reaction; n],
        vec![off; n],
    )
}

fn checked_denominator(den: f64) -> Result<f64> {
    if den.abs() <= EPS_DENOMINATOR || !den.is_finite() {
        return Err(Error::SingularStep { denominator: den });
    }
    Ok(den)
}

/// Implicit Euler step. `factored` is a reusable factorization of the
/// step matrix; without one the system is assembled and factored at `t_new`.
pub fn ie_pde_step(
    u_n: &[f64],
    buffer: &FieldRingBuffer,
    grid: &DelayGrid,
    t_new: f64,
    problem: &PdeProblem,
    factored: Option<&Tridiag>,
) -> Result<Vec<f64>> {
    let h = grid.h();
    let mut rhs = vec![0.0; u_n.len()];
    buffer.delayed_value_into(grid, &mut rhs)?;
    for (r, &u) in rhs.iter_mut().zip(u_n) {
        *r = u + h * problem.b * *r;
    }
    let mut out = vec![0.0; u_n.len()];
    match factored {
        Some(sys) => sys.solve_into(&rhs, &mut out)?,
        None => assemble_system(problem, h, t_new, true)?
            .factored()?
            .solve_into(&rhs, &mut out)?,
    }
    Ok(out)
}

/// Lie-Trotter step: diffusion solve with the cached `I - h kappa Lap`, then
/// the pointwise reaction/delay update frozen at `t_n`.
pub fn lt_pde_step(
    u_n: &[f64],
    buffer: &FieldRingBuffer,
    grid: &DelayGrid,
    t_n: f64,
    problem: &PdeProblem,
    cache: &Tridiag,
) -> Result<Vec<f64>> {
    let h = grid.h();
    let mut star = vec![0.0; u_n.len()];
    cache.solve_into(u_n, &mut star)?;
    let den = checked_denominator(1.0 - h * problem.lambda(t_n))?;
    let hb = h * problem.b;
    match buffer.delayed_slice(grid) {
        Some(delayed) => {
            for (s, &d) in star.iter_mut().zip(delayed) {
                *s = (*s + hb * d) / den;
            }
        }
        None => {
            let mut delayed = vec![0.0; u_n.len()];
            buffer.delayed_value_into(grid, &mut delayed)?;
            for (s, &d) in star.iter_mut().zip(&delayed) {
                *s = (*s + hb * d) / den;
            }
        }
    }
    Ok(star)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PdeConfig {
    pub h: f64,
    pub horizon: f64,
    pub scheme: Scheme,
    /// Times at which full fields are recorded (nearest grid step).
    pub snapshots: Vec<f64>,
    /// Re-factor the diffusion matrix every Lie-Trotter step.
    pub refactor_each_step: bool,
}

impl PdeConfig {
    pub fn new(scheme: Scheme, h: f64, horizon: f64) -> Self {
        Self {
            h,
            horizon,
            scheme,
            snapshots: Vec::new(),
            refactor_each_step: false,
        }
    }

    /// `h = 0.002`, `T = 8`.
    pub fn paper(scheme: Scheme) -> Self {
        Self::new(scheme, 0.002, 8.0)
    }

    fn steps(&self) -> Result<usize> {
        crate::scalar::SchemeConfig::new(
            self.scheme,
            crate::scalar::DelayMode::Grid,
            self.h,
            self.horizon,
        )
        .steps()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Snapshot {
    pub t: f64,
    pub field: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PdeRunResult {
    pub times: Vec<f64>,
    pub center: Vec<f64>,
    pub l2: Vec<f64>,
    pub snapshots: Vec<Snapshot>,
    pub scheme: String,
    pub wall_clock: f64,
}

impl PdeRunResult {
    /// Center value at the grid time nearest to `t`.
    pub fn center_at(&self, t: f64) -> Option<f64> {
        let h = self.times.get(1)? - self.times[0];
        let k = (t / h).round();
        if k < 0.0 {
            return None;
        }
        self.center.get(k as usize).copied()
    }
}

fn seed_buffer(problem: &PdeProblem, grid: &DelayGrid) -> Result<FieldRingBuffer> {
    let xs = problem.nodes();
    let times = seed_times(grid, grid.required_capacity(), 0.0)?;
    let fields: Vec<Vec<f64>> = times
        .iter()
        .map(|&t| xs.iter().map(|&x| problem.history.eval(t, x)).collect())
        .collect();
    FieldRingBuffer::from_fields(&fields)
}

pub fn run_pde(problem: &PdeProblem, config: &PdeConfig) -> Result<PdeRunResult> {
    problem.validate()?;
    let steps = config.steps()?;
    let h = config.h;
    let grid = DelayGrid::new(h, problem.tau)?;
    let xs = problem.nodes();
    let mut buffer = seed_buffer(problem, &grid)?;
    let mut u: Vec<f64> = xs.iter().map(|&x| problem.history.eval(0.0, x)).collect();
    let snapshot_steps: Vec<usize> = config
        .snapshots
        .iter()
        .filter(|t| t.is_finite() && **t >= 0.0)
        .map(|t| (t / h).round() as usize)
        .collect();

    let mut times = Vec::with_capacity(steps + 1);
    let mut center = Vec::with_capacity(steps + 1);
    let mut l2 = Vec::with_capacity(steps + 1);
    let mut snapshots = Vec::new();
    let mut record = |n: usize, u: &[f64]| -> Result<()> {
        let c = problem.center(u);
        let norm = problem.l2(u);
        if !(c.is_finite() && norm.is_finite()) {
            return Err(Error::Divergence { step: n });
        }
        times.push(n as f64 * h);
        center.push(c);
        l2.push(norm);
        if snapshot_steps.contains(&n) {
            snapshots.push(Snapshot {
                t: n as f64 * h,
                field: u.to_vec(),
            });
        }
        Ok(())
    };

    let start = Instant::now();
    record(0, &u)?;
    match config.scheme {
        Scheme::ImplicitEuler => {
            let fixed = if problem.is_autonomous() {
                Some(assemble_system(problem, h, 0.0, true)?.factored()?)
            } else {
                None
            };
            for n in 0..steps {
                let t_new = (n + 1) as f64 * h;
                let next = ie_pde_step(&u, &buffer, &grid, t_new, problem, fixed.as_ref())?;
                buffer.push(&next);
                u = next;
                record(n + 1, &u)?;
            }
        }
        Scheme::LieTrotter => {
            let cache = assemble_system(problem, h, 0.0, false)?.factored()?;
            for n in 0..steps {
                let t_n = n as f64 * h;
                let next = if config.refactor_each_step {
                    let fresh = assemble_system(problem, h, t_n, false)?.factored()?;
                    lt_pde_step(&u, &buffer, &grid, t_n, problem, &fresh)?
                } else {
                    lt_pde_step(&u, &buffer, &grid, t_n, problem, &cache)?
                };
                buffer.push(&next);
                u = next;
                record(n + 1, &u)?;
            }
        }
    }
    let wall_clock = start.elapsed().as_secs_f64();
    Ok(PdeRunResult {
        times,
        center,
        l2,
        snapshots,
        scheme: config.scheme.short().to_string(),
        wall_clock,
    })
}
