//! Semi-analytical reference solution of `u'(t) = a t u(t) + b u(t + tau)`.
//!
//! The solution is the inverse Fourier transform of
//! `exp(w^2 / (2a) + b e^{i w tau} / (a tau))` with unit normalization. Its
//! real form is even in `w`, so the integral is taken over `[0, omega_max]`
//! by composite Simpson and doubled.

use serde::Serialize;

use crate::error::{param, Result};

/// Minimal decay (in exponent units) the integrand must reach at the cut-off.
pub const TRUNCATION_EXPONENT: f64 = -40.0;

/// Printed coefficients of the degree-10 history fit, constant term first.
pub const POLY10_COEFFS: [f64; 11] = [
    0.14815, -0.00765, -0.01580, -0.00145, 0.000035, -0.00011, -0.000039, -5.17e-6, -3.14e-7,
    -6.89e-9, 3.76e-11,
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OhiraParams {
    pub a: f64,
    pub b: f64,
    pub tau: f64,
    pub omega_max: f64,
    pub n_nodes: usize,
}

impl OhiraParams {
    /// `a = -0.15, b = -6, tau = -8` with the default quadrature.
    pub fn paper() -> Self {
        Self::new(-0.15, -6.0, -8.0)
    }

    /// Default quadrature: `omega_max = 4`, 2001 nodes.
    pub fn new(a: f64, b: f64, tau: f64) -> Self {
        Self {
            a,
            b,
            tau,
            omega_max: 4.0,
            n_nodes: 2001,
        }
    }

    pub fn with_quadrature(mut self, omega_max: f64, n_nodes: usize) -> Self {
        self.omega_max = omega_max;
        self.n_nodes = n_nodes;
        self
    }

    /// Largest exponent of the integrand envelope at `omega_max`.
    pub fn cutoff_exponent(&self) -> f64 {
        let w = self.omega_max;
        w * w / (2.0 * self.a) + (self.b / (self.a * self.tau)).abs()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a < 0.0) {
            return param(format!("benchmark requires a < 0, got {}", self.a));
        }
        if !(self.tau < 0.0) {
            return param(format!("benchmark requires tau < 0, got {}", self.tau));
        }
        if !self.b.is_finite() {
            return param("benchmark coefficient b must be finite");
        }
        if self.n_nodes < 3 || self.n_nodes.is_multiple_of(2) {
            return param(format!(
                "Simpson rule needs an odd node count >= 3, got {}",
                self.n_nodes
            ));
        }
        if !(self.omega_max > 0.0) || self.cutoff_exponent() > TRUNCATION_EXPONENT {
            return param(format!(
                "omega_max = {} leaves exponent {:.2} above the truncation threshold {}",
                self.omega_max,
                self.cutoff_exponent(),
                TRUNCATION_EXPONENT
            ));
        }
        Ok(())
    }
}

/// Smallest cut-off whose envelope exponent reaches [`TRUNCATION_EXPONENT`].
pub fn omega_max_for(a: f64, b: f64, tau: f64) -> f64 {
    let shift = (b / (a * tau)).abs();
    (2.0 * a.abs() * (-TRUNCATION_EXPONENT + shift)).sqrt()
}

pub fn oo_integrand(omega: f64, t: f64, p: &OhiraParams) -> f64 {
    let k = p.b / (p.a * p.tau);
    let phase = omega * p.tau;
    (omega * omega / (2.0 * p.a) + k * phase.cos()).exp() * (k * phase.sin() + omega * t).cos()
}

/// Benchmark value `u(t)`.
pub fn oo_solution(t: f64, p: &OhiraParams) -> Result<f64> {
    p.validate()?;
    Ok(simpson(|w| oo_integrand(w, t, p), 0.0, p.omega_max, p.n_nodes) / std::f64::consts::PI)
}

/// Same integral over the full line `[-omega_max, omega_max]`.
pub fn oo_solution_full_line(t: f64, p: &OhiraParams) -> Result<f64> {
    p.validate()?;
    let nodes = 2 * p.n_nodes - 1;
    let s = simpson(|w| oo_integrand(w, t, p), -p.omega_max, p.omega_max, nodes);
    Ok(s / (2.0 * std::f64::consts::PI))
}

/// Central-difference residual of the benchmark in its own equation.
pub fn oo_residual(t: f64, p: &OhiraParams, dt: f64) -> Result<f64> {
    if !(dt > 0.0) {
        return param(format!("difference step must be positive, got {dt}"));
    }
    let du = (oo_solution(t + dt, p)? - oo_solution(t - dt, p)?) / (2.0 * dt);
    let u = oo_solution(t, p)?;
    let delayed = oo_solution(t + p.tau, p)?;
    Ok((du - p.a * t * u - p.b * delayed).abs())
}

fn simpson<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, nodes: usize) -> f64 {
    let intervals = nodes - 1;
    let dw = (hi - lo) / intervals as f64;
    let mut odd = 0.0;
    let mut even = 0.0;
    for j in 1..intervals {
        let v = f(lo + j as f64 * dw);
        if j % 2 == 1 {
            odd += v;
        } else {
            even += v;
        }
    }
    dw / 3.0 * (f(lo) + f(hi) + 4.0 * odd + 2.0 * even)
}

/// Degree-10 history polynomial, Horner form. Intended for `t` in `[-8, 0]`.
pub fn poly_history(t: f64) -> f64 {
    POLY10_COEFFS.iter().rev().fold(0.0, |acc, c| acc * t + c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian(a: f64, t: f64) -> f64 {
        (a.abs() / (2.0 * std::f64::consts::PI)).sqrt() * (a * t * t / 2.0).exp()
    }

    #[test]
    fn integrand_at_origin() {
        let p = OhiraParams::new(-0.15, -6.0, -8.0);
        assert!((oo_integrand(0.0, 0.0, &p) - (-5.0f64).exp()).abs() < 1e-16);
        assert!((oo_integrand(0.0, 0.0, &p) - 0.006_737_946_999_085_467).abs() < 1e-15);
    }

    #[test]
    fn integrand_without_delay_is_gaussian() {
        let p = OhiraParams::new(-0.15, 0.0, -8.0);
        for w in [0.0, 0.3, 1.7, 3.2] {
            let g = (w * w / (2.0 * p.a)).exp();
            assert!((oo_integrand(w, 0.0, &p) - g).abs() < 1e-15);
        }
    }

    #[test]
    fn integrand_is_even() {
        let p = OhiraParams::paper();
        for t in [-3.0, 0.0, 1.5, 7.0] {
            for w in [0.1, 0.77, 2.3, 3.9] {
                let l = oo_integrand(w, t, &p);
                let r = oo_integrand(-w, t, &p);
                assert!((l - r).abs() <= 1e-15 * l.abs().max(1e-300), "{w} {t}");
            }
        }
    }

    #[test]
    fn closed_form_without_delay() {
        let p = OhiraParams::new(-0.15, 0.0, -8.0);
        assert!((oo_solution(0.0, &p).unwrap() - 0.154_509_680_809_275_8).abs() < 1e-10);
        for t in [0.0, 0.5, 2.0, 5.0] {
            let u = oo_solution(t, &p).unwrap();
            assert!((u - gaussian(p.a, t)).abs() < 1e-12, "{t}");
        }
    }

    #[test]
    fn benchmark_matches_polynomial_constant() {
        let u0 = oo_solution(0.0, &OhiraParams::paper()).unwrap();
        assert!((u0 - 0.14815).abs() < 2e-3, "{u0}");
    }

    #[test]
    fn doubling_nodes_is_converged() {
        let p = OhiraParams::paper();
        let fine = p.with_quadrature(4.0, 4001);
        for t in [0.0, 1.0, 4.0, 10.0] {
            let d = (oo_solution(t, &p).unwrap() - oo_solution(t, &fine).unwrap()).abs();
            assert!(d < 1e-10, "{t}: {d}");
        }
    }

    #[test]
    fn half_line_equals_full_line() {
        let p = OhiraParams::paper();
        for t in [-5.0, 0.0, 3.0] {
            let h = oo_solution(t, &p).unwrap();
            let f = oo_solution_full_line(t, &p).unwrap();
            assert!((h - f).abs() < 1e-14, "{t}: {h} vs {f}");
        }
    }

    #[test]
    fn simpson_order_four() {
        // Over the full cut-off the even, decayed integrand converges faster
        // than any power; a cut at omega = 1.5 exposes the h^4 term.
        let p = OhiraParams::new(-0.15, 0.0, -8.0);
        let f = |w: f64| oo_integrand(w, 1.0, &p);
        let exact = simpson(f, 0.0, 1.5, 20001);
        let err = |n: usize| (simpson(f, 0.0, 1.5, n) - exact).abs();
        let (e1, e2, e3) = (err(17), err(33), err(65));
        assert!((12.0..=20.0).contains(&(e1 / e2)), "{}", e1 / e2);
        assert!((12.0..=20.0).contains(&(e2 / e3)), "{}", e2 / e3);
    }

    #[test]
    fn residual_is_second_order_in_dt_without_delay() {
        let p = OhiraParams::new(-0.15, 0.0, -8.0);
        let r: Vec<f64> = [1e-2, 5e-3, 2.5e-3]
            .iter()
            .map(|&dt| oo_residual(1.3, &p, dt).unwrap())
            .collect();
        for w in r.windows(2) {
            let ratio = w[0] / w[1];
            assert!((3.5..=4.5).contains(&ratio), "{ratio}");
        }
    }

    #[test]
    fn residual_small_for_reference_params() {
        let r = oo_residual(1.0, &OhiraParams::paper(), 1e-3).unwrap();
        assert!(r <= 1e-5, "{r}");
    }

    #[test]
    fn residual_improves_with_quadrature_until_dt_limits() {
        let t = 2.0;
        let coarse = OhiraParams::paper().with_quadrature(4.0, 201);
        let fine = OhiraParams::paper();
        let rc = oo_residual(t, &coarse, 1e-3).unwrap();
        let rf = oo_residual(t, &fine, 1e-3).unwrap();
        let rf_big_dt = oo_residual(t, &fine, 1e-2).unwrap();
        assert!(rf < rc, "{rf} !< {rc}");
        assert!(rf < rf_big_dt);
    }

    #[test]
    fn validation() {
        assert!(OhiraParams::new(0.1, -6.0, -8.0).validate().is_err());
        assert!(OhiraParams::paper()
            .with_quadrature(4.0, 2000)
            .validate()
            .is_err());
        assert!(OhiraParams::paper()
            .with_quadrature(2.0, 2001)
            .validate()
            .is_err());
        assert!(OhiraParams::paper().validate().is_ok());
        let w = omega_max_for(-0.15, -6.0, -8.0);
        assert!(OhiraParams::paper()
            .with_quadrature(w * 1.0001, 2001)
            .validate()
            .is_ok());
        assert!(w < 4.0);
    }

    #[test]
    fn polynomial_values() {
        assert_eq!(poly_history(0.0), 0.14815);
        assert!((poly_history(-1.0) - 0.141_560_862_927_6).abs() < 1e-12);
        for t in [-8.0f64, -5.5, -2.25, -0.1] {
            let naive: f64 = POLY10_COEFFS
                .iter()
                .enumerate()
                .map(|(i, c)| c * t.powi(i as i32))
                .sum();
            let horner = poly_history(t);
            // Relative to the term magnitudes: at t = -8 the sum cancels by four digits.
            let scale: f64 = POLY10_COEFFS
                .iter()
                .enumerate()
                .map(|(i, c)| (c * t.powi(i as i32)).abs())
                .sum();
            assert!((naive - horner).abs() <= 1e-15 * scale * 10.0, "{t}");
        }
    }

    #[test]
    fn polynomial_tracks_benchmark_on_history_window() {
        // Fit deviation measured once over [-8, 0] at 161 points: 2.87e-3 (largest at t = -8).
        let p = OhiraParams::paper();
        let worst = (0..=160)
            .map(|k| -8.0 + k as f64 * 0.05)
            .map(|t| (oo_solution(t, &p).unwrap() - poly_history(t)).abs())
            .fold(0.0, f64::max);
        assert!(worst <= 3.0e-3, "{worst}");
    }
}
