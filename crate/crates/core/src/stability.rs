//! Finite-dimensional propagators of the scalar schemes and their diagnostics.
//!
//! The state is `x = (u_n, u_{n-1}, ..., u_{n-m})`, so every matrix here has
//! dimension `m + 1`. Norms are induced infinity norms (max absolute row sum).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{param, Error, Result};
use crate::history::DelayGrid;
use crate::scalar::{Coefficient, ScalarDelayProblem, StepCoefficients};

/// Default Durand-Kerner tolerance.
pub const ROOT_TOL: f64 = 1e-12;

/// Max absolute row sum.
pub fn inf_norm(a: &DMatrix<f64>) -> f64 {
    a.row_iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn max_abs(a: &DMatrix<f64>) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Companion map `x -> (alpha x_0 + beta x_m, x_0, ..., x_{m-1})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CompanionOperator {
    pub m: usize,
    pub alpha: f64,
    pub beta: f64,
}

impl CompanionOperator {
    pub fn new(m: usize, alpha: f64, beta: f64) -> Result<Self> {
        if m == 0 {
            return param("companion operator needs delay depth m >= 1");
        }
        if !(alpha.is_finite() && beta.is_finite()) {
            return param("companion coefficients must be finite");
        }
        Ok(Self { m, alpha, beta })
    }

    /// Lie-Trotter companion of `u' = a u + b u(t + tau)` on step `h`.
    pub fn from_problem(a: f64, b: f64, tau: f64, h: f64) -> Result<Self> {
        let grid = integer_grid(h, tau)?;
        let c = StepCoefficients::new(h, a, b)?;
        Self::new(grid.m(), c.alpha, c.beta)
    }

    pub fn dim(&self) -> usize {
        self.m + 1
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim() {
            return param(format!(
                "state has length {}, expected {}",
                x.len(),
                self.dim()
            ));
        }
        let mut y = Vec::with_capacity(self.dim());
        y.push(self.alpha * x[0] + self.beta * x[self.m]);
        y.extend_from_slice(&x[..self.m]);
        Ok(y)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut a = DMatrix::zeros(n, n);
        a[(0, 0)] = self.alpha;
        a[(0, self.m)] += self.beta;
        for i in 1..n {
            a[(i, i - 1)] = 1.0;
        }
        a
    }

    /// Roots of `lambda^{m+1} - alpha lambda^m - beta`.
    pub fn characteristic_roots(&self, tol: f64) -> Result<Vec<Complex64>> {
        durand_kerner(self, tol)
    }

    /// Summability, Ritt and power profiles in `O(N m)`, exploiting that row
    /// `i` of `M^k` is row 0 of `M^{k-i}` (or a unit row when `k < i`).
    pub fn profiles(&self, n: usize) -> Result<StabilityProfiles> {
        structured_profiles(self, n)
    }
}

/// Spectral radius by Durand-Kerner, see [`CompanionOperator::characteristic_roots`].
pub fn spectral_radius(op: &CompanionOperator, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return param(format!("tolerance must be positive, got {tol}"));
    }
    if op.beta == 0.0 {
        return Ok(op.alpha.abs());
    }
    Ok(durand_kerner(op, tol)?
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max))
}

fn durand_kerner(op: &CompanionOperator, tol: f64) -> Result<Vec<Complex64>> {
    let deg = op.dim();
    let (m, alpha, beta) = (op.m as i32, op.alpha, op.beta);
    let p = |z: Complex64| z.powi(m) * (z - alpha) - beta;
    let radius = (alpha.abs() + beta.abs()).max(1.0).powf(1.0 / deg as f64);
    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| {
            let phase = 2.0 * std::f64::consts::PI * k as f64 / deg as f64 + 0.4;
            Complex64::from_polar(radius, phase)
        })
        .collect();
    let cap = 10 * deg;
    let mut last = f64::INFINITY;
    for _ in 0..cap {
        let mut worst = 0.0f64;
        for k in 0..deg {
            let zk = z[k];
            let mut den = Complex64::new(1.0, 0.0);
            for (j, zj) in z.iter().enumerate() {
                if j != k {
                    den *= zk - zj;
                }
            }
            if den.norm() == 0.0 {
                den = Complex64::new(f64::EPSILON, 0.0);
            }
            let step = p(zk) / den;
            z[k] = zk - step;
            worst = worst.max(step.norm() / zk.norm().max(1.0));
        }
        if !worst.is_finite() {
            break;
        }
        last = worst;
        if worst <= tol {
            return Ok(z);
        }
    }
    let residual = z.iter().map(|&zk| p(zk).norm()).fold(0.0, f64::max);
    Err(Error::NonConvergence {
        iterations: cap,
        residual: if residual.is_finite() { residual } else { last },
    })
}

/// `summability[k-1] = ||sum_{j<k} M^j||`, `ritt[n-1] = n ||M^n - M^{n-1}||`,
/// `power[n-1] = ||M^n||`, for `k, n = 1..N`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityProfiles {
    pub summability: Vec<f64>,
    pub ritt: Vec<f64>,
    pub power: Vec<f64>,
}

impl StabilityProfiles {
    pub fn last_summability(&self) -> f64 {
        *self.summability.last().unwrap_or(&0.0)
    }

    pub fn ritt_sup(&self) -> f64 {
        self.ritt.iter().fold(0.0, |m, v| m.max(*v))
    }

    pub fn power_sup(&self) -> f64 {
        self.power.iter().fold(0.0, |m, v| m.max(*v))
    }
}

/// Profiles of an arbitrary square matrix by repeated multiplication.
pub fn stability_profiles(op: &DMatrix<f64>, n: usize) -> Result<StabilityProfiles> {
    if n == 0 {
        return param("profile length must be at least 1");
    }
    if !op.is_square() {
        return param("profile operator must be square");
    }
    let d = op.nrows();
    let mut prev = DMatrix::<f64>::identity(d, d);
    let mut sum = DMatrix::<f64>::zeros(d, d);
    let mut out = StabilityProfiles {
        summability: Vec::with_capacity(n),
        ritt: Vec::with_capacity(n),
        power: Vec::with_capacity(n),
    };
    for k in 1..=n {
        sum += &prev;
        let next = op * &prev;
        let s = inf_norm(&sum);
        let r = k as f64 * inf_norm(&(&next - &prev));
        let pw = inf_norm(&next);
        if !(s.is_finite() && r.is_finite() && pw.is_finite()) {
            return Err(Error::Divergence { step: k });
        }
        out.summability.push(s);
        out.ritt.push(r);
        out.power.push(pw);
        prev = next;
    }
    Ok(out)
}

fn structured_profiles(op: &CompanionOperator, n: usize) -> Result<StabilityProfiles> {
    if n == 0 {
        return param("profile length must be at least 1");
    }
    let m = op.m;
    let d = m + 1;
    // r: row 0 of M^k; q: sum_{j<K} r_j.
    let mut r = vec![0.0f64; d];
    r[0] = 1.0;
    let mut q = vec![0.0f64; d];
    // Ring of the last d values of, for J = K - i, the row abs sums
    // G(J, i) = |q_J[0]| + sum_{1<=c<=i} |1 + q_J[c]| + sum_{c>i} |q_J[c]|.
    let mut g_ring = vec![vec![0.0f64; d]; d];
    let mut d_ring = vec![0.0f64; d];
    let mut l1_ring = vec![0.0f64; d];
    let mut tmp = vec![0.0f64; d];
    let mut out = StabilityProfiles {
        summability: Vec::with_capacity(n),
        ritt: Vec::with_capacity(n),
        power: Vec::with_capacity(n),
    };
    l1_ring[0] = 1.0;
    for k in 1..=n {
        // q_k = q_{k-1} + r_{k-1}
        for c in 0..d {
            q[c] += r[c];
        }
        {
            let g = &mut g_ring[k % d];
            let mut tail: f64 = q[1..].iter().map(|v| v.abs()).sum();
            let mut head = q[0].abs();
            g[0] = head + tail;
            for i in 1..d {
                tail -= q[i].abs();
                head += (1.0 + q[i]).abs();
                g[i] = head + tail.max(0.0);
            }
        }
        // r_k = r_{k-1} M
        let r0 = r[0];
        for c in 0..m {
            tmp[c] = r[c + 1];
        }
        tmp[m] = 0.0;
        tmp[0] += op.alpha * r0;
        tmp[m] += op.beta * r0;
        let diff: f64 = tmp.iter().zip(&r).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut r, &mut tmp);
        d_ring[k % d] = diff;
        l1_ring[k % d] = r.iter().map(|v| v.abs()).sum();

        let upper = m.min(k - 1);
        let mut s = if k <= m { k as f64 } else { 0.0 };
        let mut ritt: f64 = if k <= m { 2.0 } else { 0.0 };
        let mut pw: f64 = if k <= m { 1.0 } else { 0.0 };
        for i in 0..=upper {
            let j = k - i;
            s = s.max(g_ring[j % d][i]);
            ritt = ritt.max(d_ring[j % d]);
            pw = pw.max(l1_ring[j % d]);
        }
        let ritt = k as f64 * ritt;
        if !(s.is_finite() && ritt.is_finite() && pw.is_finite()) {
            return Err(Error::Divergence { step: k });
        }
        out.summability.push(s);
        out.ritt.push(ritt);
        out.power.push(pw);
    }
    Ok(out)
}

/// Matrices of one step on the `(m + 1)`-dimensional grid realization.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretePropagators {
    pub m: usize,
    pub h: f64,
    /// Exact shift with inflow: `x -> (x_0, x_0, ..., x_{m-1})`.
    pub sigma: DMatrix<f64>,
    /// Row map `x -> (a x_0 + b x_m, 0, ...)`.
    pub d: DMatrix<f64>,
    /// `h D Sigma`.
    pub hmat: DMatrix<f64>,
    /// Splitting step (grid LT recurrence).
    pub p: DMatrix<f64>,
    /// Implicit Euler step (grid IE recurrence).
    pub r: DMatrix<f64>,
    /// `R - P`.
    pub e: DMatrix<f64>,
}

fn integer_grid(h: f64, tau: f64) -> Result<DelayGrid> {
    let grid = DelayGrid::new(h, tau)?;
    if !grid.is_integer_lag() {
        return Err(Error::Unsupported(format!(
            "matrix diagnostics need tau / h integral, got tau = {tau}, h = {h}"
        )));
    }
    Ok(grid)
}

fn shift_with_inflow(m: usize) -> DMatrix<f64> {
    let mut s = DMatrix::zeros(m + 1, m + 1);
    s[(0, 0)] = 1.0;
    for i in 1..=m {
        s[(i, i - 1)] = 1.0;
    }
    s
}

/// The shift with its state row replaced by `row`.
fn with_state_row(m: usize, row: &[(usize, f64)]) -> DMatrix<f64> {
    let mut s = shift_with_inflow(m);
    s[(0, 0)] = 0.0;
    for &(c, v) in row {
        s[(0, c)] += v;
    }
    s
}

/// Propagators with separately frozen coefficients: `a_ie` for the implicit
/// Euler step, `a_lt` for the splitting step.
pub fn build_frozen_propagators(
    m: usize,
    h: f64,
    a_ie: f64,
    a_lt: f64,
    b: f64,
) -> Result<DiscretePropagators> {
    if m == 0 {
        return param("delay depth must be at least 1");
    }
    let ie = StepCoefficients::new(h, a_ie, b)?;
    let lt = StepCoefficients::new(h, a_lt, b)?;
    let sigma = shift_with_inflow(m);
    let mut d = DMatrix::zeros(m + 1, m + 1);
    d[(0, 0)] = a_lt;
    d[(0, m)] += b;
    let hmat = (&d * &sigma) * h;
    // The reaction/delay resolvent (I - hD)^{-1} only changes the state row,
    // so the splitting step is the shift with that row substituted.
    let p = with_state_row(m, &[(0, lt.alpha), (m, lt.beta)]);
    let r = with_state_row(m, &[(0, ie.alpha), (m - 1, ie.beta)]);
    let e = &r - &p;
    Ok(DiscretePropagators {
        m,
        h,
        sigma,
        d,
        hmat,
        p,
        r,
        e,
    })
}

/// Propagators of a constant-coefficient problem with integer lag.
pub fn build_discrete_propagators(
    problem: &ScalarDelayProblem,
    h: f64,
) -> Result<DiscretePropagators> {
    let a = match problem.a {
        Coefficient::Constant(a) => a,
        Coefficient::LinearInTime(_) => {
            return Err(Error::Unsupported(
                "use build_time_ordered_propagators for time-dependent a".into(),
            ))
        }
    };
    let grid = integer_grid(h, problem.tau)?;
    let props = build_frozen_propagators(grid.m(), h, a, a, problem.b)?;
    check_against_schemes(&props, a, a, problem.b)?;
    Ok(props)
}

/// Propagator pairs `(R_k, P_k)` for `k = 0..n`, frozen at `t_{k+1}` for the
/// implicit Euler step and at `t_k` for the splitting step.
pub fn build_time_ordered_propagators(
    problem: &ScalarDelayProblem,
    h: f64,
    n: usize,
) -> Result<Vec<DiscretePropagators>> {
    let grid = integer_grid(h, problem.tau)?;
    (0..n)
        .map(|k| {
            let a_ie = problem.a.at((k + 1) as f64 * h);
            let a_lt = problem.a.at(k as f64 * h);
            let props = build_frozen_propagators(grid.m(), h, a_ie, a_lt, problem.b)?;
            Ok(props)
        })
        .collect()
}

fn check_against_schemes(props: &DiscretePropagators, a_ie: f64, a_lt: f64, b: f64) -> Result<()> {
    let m = props.m;
    let h = props.h;
    let x = DVector::from_fn(m + 1, |i, _| 1.0 / (i as f64 + 1.0) - 0.3 * (i % 3) as f64);
    let px = &props.p * &x;
    let rx = &props.r * &x;
    let lt = crate::scalar::lt_step(x[0], x[m], a_lt, b, h)?;
    let ie = crate::scalar::ie_step(x[0], x[m - 1], a_ie, b, h)?;
    let tol = 1e-13 * (1.0 + lt.abs().max(ie.abs()));
    let shifted = (1..=m).all(|i| px[i] == x[i - 1] && rx[i] == x[i - 1]);
    if (px[0] - lt).abs() > tol || (rx[0] - ie).abs() > tol || !shifted {
        return Err(Error::Unsupported(
            "propagators disagree with the scalar steps".into(),
        ));
    }
    Ok(())
}

/// `||R - P||`; equals `2 |beta|` for the grid realization.
pub fn defect_norm(props: &DiscretePropagators) -> f64 {
    inf_norm(&props.e)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OsNorm {
    pub value: f64,
    pub satisfied: bool,
}

/// `||h D Sigma||` for a constant-coefficient problem, flagged against 1.
pub fn estimate_os_norm(problem: &ScalarDelayProblem, h: f64) -> Result<OsNorm> {
    let a = match problem.a {
        Coefficient::Constant(a) => a,
        Coefficient::LinearInTime(_) => {
            return Err(Error::Unsupported(
                "operational smallness needs constant a".into(),
            ))
        }
    };
    let grid = integer_grid(h, problem.tau)?;
    let m = grid.m();
    let mut d = DMatrix::zeros(m + 1, m + 1);
    d[(0, 0)] = a;
    d[(0, m)] += problem.b;
    let value = inf_norm(&((d * shift_with_inflow(m)) * h));
    Ok(OsNorm {
        value,
        satisfied: value < 1.0,
    })
}

/// Residual of an exact identity with the magnitude it should be judged against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityResidual {
    pub residual: f64,
    pub scale: f64,
}

impl IdentityResidual {
    pub fn relative(&self) -> f64 {
        self.residual / self.scale.max(1.0)
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.residual <= tol * self.scale.max(1.0)
    }
}

fn check_square_list(list: &[DMatrix<f64>], dim: usize) -> Result<()> {
    for (k, a) in list.iter().enumerate() {
        if a.nrows() != dim || a.ncols() != dim {
            return param(format!(
                "matrix {k} is {}x{}, expected {dim}x{dim}",
                a.nrows(),
                a.ncols()
            ));
        }
    }
    Ok(())
}

/// Residual of `R_{n-1:0} - P_{n-1:0} - sum_k R_{n-1:k+1} (R_k - P_k) P_{k-1:0}`,
/// products ordered with later indices on the left.
pub fn verify_telescoping(
    r_list: &[DMatrix<f64>],
    p_list: &[DMatrix<f64>],
) -> Result<IdentityResidual> {
    let n = r_list.len();
    if n == 0 || p_list.len() != n {
        return param(format!(
            "telescoping needs equal nonempty lists, got {n} and {}",
            p_list.len()
        ));
    }
    let dim = r_list[0].nrows();
    check_square_list(r_list, dim)?;
    check_square_list(p_list, dim)?;
    let id = DMatrix::<f64>::identity(dim, dim);
    let mut scale = 1.0f64;
    // prefix[k] = P_{k-1} ... P_0
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(id.clone());
    for k in 0..n {
        let next = &p_list[k] * &prefix[k];
        scale = scale.max(max_abs(&next));
        prefix.push(next);
    }
    // suffix[k] = R_{n-1} ... R_k
    let mut suffix = vec![id; n + 1];
    for k in (0..n).rev() {
        suffix[k] = &suffix[k + 1] * &r_list[k];
        scale = scale.max(max_abs(&suffix[k]));
    }
    let mut res = &suffix[0] - &prefix[n];
    for k in 0..n {
        let term = &suffix[k + 1] * (&r_list[k] - &p_list[k]) * &prefix[k];
        scale = scale.max(max_abs(&term));
        res -= term;
    }
    Ok(IdentityResidual {
        residual: max_abs(&res),
        scale,
    })
}

fn abel_check(t: &DMatrix<f64>, taus: &[DVector<f64>]) -> Result<()> {
    if !t.is_square() {
        return param("Abel operator must be square");
    }
    if taus.is_empty() {
        return param("Abel identity needs at least one increment");
    }
    for (k, v) in taus.iter().enumerate() {
        if v.len() != t.nrows() {
            return param(format!(
                "increment {k} has length {}, expected {}",
                v.len(),
                t.nrows()
            ));
        }
    }
    Ok(())
}

fn vmax(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Residual of `sum_{k<n} T^{n-1-k} tau_k = A_{n-1} - sum_{j=1}^{n-1} (T^{j-1} - T^j) A_{n-1-j}`
/// with `A_k = tau_0 + ... + tau_k`.
pub fn verify_abel(t: &DMatrix<f64>, taus: &[DVector<f64>]) -> Result<IdentityResidual> {
    abel_check(t, taus)?;
    let n = taus.len();
    let dim = t.nrows();
    let mut scale = 1.0f64;
    let mut powers = Vec::with_capacity(n);
    powers.push(DMatrix::<f64>::identity(dim, dim));
    for j in 1..n {
        let next = t * &powers[j - 1];
        scale = scale.max(max_abs(&next));
        powers.push(next);
    }
    let mut partial = Vec::with_capacity(n);
    let mut acc = DVector::zeros(dim);
    for v in taus {
        acc += v;
        scale = scale.max(vmax(&acc));
        partial.push(acc.clone());
    }
    let mut lhs = DVector::zeros(dim);
    for (k, v) in taus.iter().enumerate() {
        let term = &powers[n - 1 - k] * v;
        scale = scale.max(vmax(&term));
        lhs += term;
    }
    let mut rhs = partial[n - 1].clone();
    for j in 1..n {
        let term = (&powers[j - 1] - &powers[j]) * &partial[n - 1 - j];
        scale = scale.max(vmax(&term));
        rhs -= term;
    }
    Ok(IdentityResidual {
        residual: vmax(&(lhs - rhs)),
        scale,
    })
}

/// Left side of the Abel identity and its power-bounded estimate
/// `(M + 1 + sum_j ||T^{j-1} - T^j||) max_k ||A_k||`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AbelEstimate {
    pub lhs: f64,
    pub bound: f64,
}

pub fn abel_estimate(t: &DMatrix<f64>, taus: &[DVector<f64>]) -> Result<AbelEstimate> {
    abel_check(t, taus)?;
    let n = taus.len();
    let dim = t.nrows();
    let mut power = DMatrix::<f64>::identity(dim, dim);
    let mut sup_power = 1.0f64;
    let mut variation = 0.0;
    for _ in 1..n {
        let next = t * &power;
        variation += inf_norm(&(&power - &next));
        sup_power = sup_power.max(inf_norm(&next));
        power = next;
    }
    let mut lhs = DVector::zeros(dim);
    let mut acc = DVector::zeros(dim);
    let mut sup_partial = 0.0f64;
    for v in taus {
        lhs = t * lhs + v;
        acc += v;
        sup_partial = sup_partial.max(vmax(&acc));
    }
    Ok(AbelEstimate {
        lhs: vmax(&lhs),
        bound: (sup_power + 1.0 + variation) * sup_partial,
    })
}
