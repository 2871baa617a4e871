//! Delay-history storage and the transport resolvent.
//!
//! Two realizations of the history transport live here:
//!
//! * [`RingBuffer`] / [`FieldRingBuffer`]: the exact shift on a uniform time
//!   grid. Pushing a value discards the oldest entry; the delayed value is
//!   read from a fixed depth, with one linear interpolation when the delay is
//!   not a multiple of the step.
//! * [`transport_resolvent_apply`]: the continuum resolvent of `d/dsigma` with
//!   inflow condition `rho(0) = f`, evaluated exactly for the piecewise-linear
//!   interpolant of a sampled segment.

use crate::error::{param, Error, Result};

/// Relative tolerance used to decide that `-tau / h` is an integer.
const INTEGER_LAG_TOL: f64 = 1e-9;

/// Uniform time grid relative to a delay: `-tau = m h + delta`, `0 <= delta < h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayGrid {
    h: f64,
    tau: f64,
    m: usize,
    delta: f64,
}

impl DelayGrid {
    pub fn new(h: f64, tau: f64) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return param(format!("step size must be positive, got {h}"));
        }
        if !(tau.is_finite() && tau < 0.0) {
            return param(format!("delay must be negative, got {tau}"));
        }
        let ratio = -tau / h;
        let nearest = ratio.round();
        let (m, delta) = if (ratio - nearest).abs() <= INTEGER_LAG_TOL * nearest.max(1.0) {
            (nearest, 0.0)
        } else {
            let m = ratio.floor();
            (m, (-tau - m * h).clamp(0.0, h * (1.0 - f64::EPSILON)))
        };
        if m < 1.0 {
            return Err(Error::Unsupported(format!(
                "delay {tau} is shorter than one step h = {h}"
            )));
        }
        Ok(Self {
            h,
            tau,
            m: m as usize,
            delta,
        })
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Integer delay depth `floor(-tau / h)`.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Fractional offset `-tau - m h`.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn is_integer_lag(&self) -> bool {
        self.delta == 0.0
    }

    /// Smallest buffer capacity that can serve [`RingBuffer::delayed_value`].
    pub fn required_capacity(&self) -> usize {
        if self.is_integer_lag() {
            self.m
        } else {
            self.m + 1
        }
    }
}

/// Slot position and interpolation weight for a depth-`m` read.
///
/// Entries are indexed oldest first. The newest entry sits one step before the
/// evaluation time, so the depth-`m` entry is `capacity - m`.
fn delayed_slots(capacity: usize, grid: &DelayGrid) -> Result<(usize, f64)> {
    let required = grid.required_capacity();
    if capacity < required {
        return Err(Error::InsufficientHistory { capacity, required });
    }
    Ok((capacity - grid.m(), grid.delta() / grid.h()))
}

/// Fixed-capacity FIFO of scalar states.
#[derive(Debug, Clone, PartialEq)]
pub struct RingBuffer {
    slots: Vec<f64>,
    head: usize,
}

impl RingBuffer {
    /// Builds a full buffer from samples given oldest first.
    pub fn from_samples(samples: &[f64]) -> Result<Self> {
        if samples.is_empty() {
            return param("ring buffer needs at least one slot");
        }
        Ok(Self {
            slots: samples.to_vec(),
            head: 0,
        })
    }

    pub fn filled(capacity: usize, value: f64) -> Result<Self> {
        Self::from_samples(&vec![value; capacity])
    }

    pub fn capacity(&self) -> usize {
        self.slots.len()
    }

    /// Discards the oldest entry and appends `value` as the newest.
    #[inline]
    pub fn push(&mut self, value: f64) {
        self.slots[self.head] = value;
        self.head += 1;
        if self.head == self.slots.len() {
            self.head = 0;
        }
    }

    #[inline]
    pub fn oldest(&self) -> f64 {
        self.slots[self.head]
    }

    #[inline]
    pub fn newest(&self) -> f64 {
        self.get(self.slots.len() - 1)
    }

    /// Entry `i`, counted from the oldest (`i = 0`).
    #[inline]
    pub fn get(&self, i: usize) -> f64 {
        let cap = self.slots.len();
        let mut idx = self.head + i;
        if idx >= cap {
            idx -= cap;
        }
        self.slots[idx]
    }

    /// Contents, oldest first.
    pub fn to_vec(&self) -> Vec<f64> {
        (0..self.capacity()).map(|i| self.get(i)).collect()
    }

    /// State at lag `m h + delta` behind the slot following the newest entry.
    ///
    /// With an integer lag and capacity `m` this is the oldest entry. Otherwise
    /// the two bracketing entries are blended linearly.
    pub fn delayed_value(&self, grid: &DelayGrid) -> Result<f64> {
        let (idx, w) = delayed_slots(self.capacity(), grid)?;
        let at_depth = self.get(idx);
        if w == 0.0 {
            return Ok(at_depth);
        }
        Ok(w * self.get(idx - 1) + (1.0 - w) * at_depth)
    }
}

/// Samples `history(tau + j h)` for `j = 0..capacity`, oldest first.
pub fn init_from_history<F>(history: F, grid: &DelayGrid, capacity: usize) -> Result<RingBuffer>
where
    F: Fn(f64) -> f64,
{
    let mut samples = Vec::with_capacity(capacity);
    for j in 0..capacity {
        let t = grid.tau() + j as f64 * grid.h();
        check_history_time(t, grid.tau())?;
        samples.push(history(t));
    }
    RingBuffer::from_samples(&samples)
}

/// Samples the history on the time grid ending at `newest_time`.
///
/// Slot `j` holds `history(newest_time - (capacity - 1 - j) h)`. Grid times
/// that fall before `tau` by less than one step are clamped to `tau`; this
/// only happens for the oldest slot when the lag is fractional.
pub fn seed_from_history<F>(
    history: F,
    grid: &DelayGrid,
    capacity: usize,
    newest_time: f64,
) -> Result<RingBuffer>
where
    F: Fn(f64) -> f64,
{
    let times = seed_times(grid, capacity, newest_time)?;
    RingBuffer::from_samples(&times.iter().map(|&t| history(t)).collect::<Vec<_>>())
}

pub(crate) fn seed_times(grid: &DelayGrid, capacity: usize, newest_time: f64) -> Result<Vec<f64>> {
    let h = grid.h();
    let tau = grid.tau();
    (0..capacity)
        .map(|j| {
            let t = newest_time - (capacity - 1 - j) as f64 * h;
            if t < tau - h * (1.0 + 1e-9) {
                return Err(Error::Domain { t, tau });
            }
            let t = t.max(tau);
            check_history_time(t, tau)?;
            Ok(t)
        })
        .collect()
}

fn check_history_time(t: f64, tau: f64) -> Result<()> {
    let slack = 1e-12 * tau.abs().max(1.0);
    if t < tau - slack || t > slack {
        return Err(Error::Domain { t, tau });
    }
    Ok(())
}

/// Fixed-capacity FIFO of spatial fields, stored contiguously.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldRingBuffer {
    data: Vec<f64>,
    width: usize,
    capacity: usize,
    head: usize,
}

impl FieldRingBuffer {
    /// Builds a full buffer from fields given oldest first.
    pub fn from_fields(fields: &[Vec<f64>]) -> Result<Self> {
        let Some(first) = fields.first() else {
            return param("field buffer needs at least one slot");
        };
        let width = first.len();
        if fields.iter().any(|f| f.len() != width) {
            return param("all buffered fields must have the same length");
        }
        Ok(Self {
            data: fields.concat(),
            width,
            capacity: fields.len(),
            head: 0,
        })
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn push(&mut self, field: &[f64]) {
        debug_assert_eq!(field.len(), self.width);
        let start = self.head * self.width;
        self.data[start..start + self.width].copy_from_slice(field);
        self.head = (self.head + 1) % self.capacity;
    }

    /// Field `i`, counted from the oldest.
    #[inline]
    pub fn get(&self, i: usize) -> &[f64] {
        let idx = (self.head + i) % self.capacity;
        &self.data[idx * self.width..(idx + 1) * self.width]
    }

    #[inline]
    pub fn oldest(&self) -> &[f64] {
        self.get(0)
    }

    pub fn newest(&self) -> &[f64] {
        self.get(self.capacity - 1)
    }

    /// Componentwise [`RingBuffer::delayed_value`], written into `out`.
    pub fn delayed_value_into(&self, grid: &DelayGrid, out: &mut [f64]) -> Result<()> {
        let (idx, w) = delayed_slots(self.capacity, grid)?;
        let at_depth = self.get(idx);
        if w == 0.0 {
            out.copy_from_slice(at_depth);
        } else {
            let older = self.get(idx - 1);
            for ((o, &x0), &x1) in out.iter_mut().zip(older).zip(at_depth) {
                *o = w * x0 + (1.0 - w) * x1;
            }
        }
        Ok(())
    }

    /// Slice view of the delayed field when no interpolation is needed.
    pub fn delayed_slice(&self, grid: &DelayGrid) -> Option<&[f64]> {
        match delayed_slots(self.capacity, grid) {
            Ok((idx, w)) if w == 0.0 => Some(self.get(idx)),
            _ => None,
        }
    }
}

/// Samples of a history segment on the uniform grid `tau = s_0 < ... < s_n = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct HistorySegment {
    tau: f64,
    values: Vec<f64>,
}

impl HistorySegment {
    pub fn new(tau: f64, values: Vec<f64>) -> Result<Self> {
        if !(tau.is_finite() && tau < 0.0) {
            return param(format!("segment delay must be negative, got {tau}"));
        }
        if values.len() < 2 {
            return param("segment needs at least two grid values");
        }
        Ok(Self { tau, values })
    }

    /// Samples `history` at `intervals + 1` equispaced points of `[tau, 0]`.
    pub fn sample<F: Fn(f64) -> f64>(history: F, tau: f64, intervals: usize) -> Result<Self> {
        if intervals == 0 {
            return param("segment needs at least one interval");
        }
        let values = (0..=intervals)
            .map(|j| {
                if j == intervals {
                    history(0.0)
                } else {
                    history(tau + j as f64 * (-tau / intervals as f64))
                }
            })
            .collect();
        Self::new(tau, values)
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn spacing(&self) -> f64 {
        -self.tau / (self.values.len() - 1) as f64
    }

    /// Grid abscissae `s_j`.
    pub fn nodes(&self) -> Vec<f64> {
        let d = self.spacing();
        let n = self.values.len() - 1;
        (0..=n)
            .map(|j| if j == n { 0.0 } else { self.tau + j as f64 * d })
            .collect()
    }

    /// Value at `sigma = 0`, the inflow of the segment.
    pub fn inflow(&self) -> f64 {
        *self.values.last().expect("segment is non-empty")
    }

    /// Trapezoidal L2 norm of the sampled values over `[tau, 0]`.
    pub fn l2_norm(&self) -> f64 {
        let sq: f64 = self.values.iter().map(|v| v * v).sum();
        let ends = self.values[0].powi(2) + self.inflow().powi(2);
        (self.spacing() * (sq - 0.5 * ends)).max(0.0).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }
}

/// Per-cell weights of the exponential transport kernel for spacing `d`.
///
/// Over one cell, `rho(s_j) = decay * rho(s_{j+1}) + w_left * g_j + w_right * g_{j+1}`;
/// the three weights are nonnegative and sum to one.
#[derive(Debug, Clone, Copy)]
struct CellWeights {
    decay: f64,
    w_left: f64,
    w_right: f64,
}

impl CellWeights {
    fn new(d: f64, h: f64) -> Self {
        let x = d / h;
        let one_minus_decay = -(-x).exp_m1();
        let decay = 1.0 - one_minus_decay;
        let mean = one_minus_decay / x;
        Self {
            decay,
            w_left: 1.0 - mean,
            w_right: mean - decay,
        }
    }
}

/// Transport resolvent `(I - h d/dsigma)^{-1}` with inflow `rho(0) = f`:
///
/// `rho(sigma) = e^{sigma/h} f + (1/h) int_sigma^0 e^{(sigma - s)/h} g(s) ds`,
///
/// with the integral taken exactly against the piecewise-linear interpolant of
/// `g`. The result lives on the same grid as `g`.
pub fn transport_resolvent_apply(f: f64, g: &HistorySegment, h: f64) -> Result<HistorySegment> {
    if !(h.is_finite() && h > 0.0) {
        return param(format!("resolvent step must be positive, got {h}"));
    }
    let w = CellWeights::new(g.spacing(), h);
    let gv = g.values();
    let n = gv.len();
    let mut rho = vec![0.0; n];
    rho[n - 1] = f;
    for j in (0..n - 1).rev() {
        rho[j] = w.decay * rho[j + 1] + w.w_left * gv[j] + w.w_right * gv[j + 1];
    }
    Ok(HistorySegment {
        tau: g.tau,
        values: rho,
    })
}

/// `int_tau^0 e^{(tau - s)/h} g(s) ds` for the piecewise-linear interpolant of `g`.
pub fn exp_weighted_integral(g: &HistorySegment, h: f64) -> Result<f64> {
    if !(h.is_finite() && h > 0.0) {
        return param(format!("resolvent step must be positive, got {h}"));
    }
    let w = CellWeights::new(g.spacing(), h);
    let gv = g.values();
    let mut acc = 0.0;
    for j in (0..gv.len() - 1).rev() {
        acc = w.decay * acc + w.w_left * gv[j] + w.w_right * gv[j + 1];
    }
    Ok(h * acc)
}

/// Evaluation at `sigma = tau`.
pub fn trace_at_tau(rho: &HistorySegment) -> f64 {
    rho.values[0]
}
