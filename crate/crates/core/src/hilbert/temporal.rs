//! Temporal detection densities of spectral modes.

use num_complex::Complex64;

use super::ModeFunction;
use crate::error::{Error, Result};

/// Uniform time grid; samples sit at bin centers like the frequency grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeWindow {
    t_min: f64,
    t_max: f64,
    num_points: usize,
}

impl TimeWindow {
    pub fn new(t_min: f64, t_max: f64, num_points: usize) -> Result<Self> {
        if !t_min.is_finite() || !t_max.is_finite() || t_max <= t_min {
            return Err(Error::InvalidWindow(format!(
                "require finite t_max > t_min, got [{t_min}, {t_max}]"
            )));
        }
        if num_points == 0 {
            return Err(Error::InvalidWindow("num_points must be positive".into()));
        }
        Ok(Self {
            t_min,
            t_max,
            num_points,
        })
    }

    pub fn t_min(&self) -> f64 {
        self.t_min
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn len(&self) -> usize {
        self.num_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        (self.t_max - self.t_min) / self.num_points as f64
    }

    pub fn point(&self, g: usize) -> f64 {
        self.t_min + (g as f64 + 0.5) * self.spacing()
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.num_points).map(|g| self.point(g))
    }
}

/// Ideal single-photon detection rate P(t) (units 1/s) sampled on a window.
///
/// Over an infinite window P(t) integrates to 1; the finite-window integral
/// is exposed so truncation error can be reported rather than hidden.
#[derive(Debug, Clone)]
pub struct TemporalDensity {
    window: TimeWindow,
    values: Vec<f64>,
}

impl TemporalDensity {
    pub fn window(&self) -> &TimeWindow {
        &self.window
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Riemann integral of the density over the window.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.window.spacing()
    }
}

/// Evaluates P(t) = (1/2π) |Σ_g φ(ω_g) e^{−iω_g t} dω|² on the window.
pub fn temporal_density(mode: &ModeFunction, window: TimeWindow) -> Result<TemporalDensity> {
    let d_omega = mode.grid().spacing();
    let omegas: Vec<f64> = mode.grid().points().collect();
    let values = window
        .points()
        .map(|t| {
            let amp: Complex64 = omegas
                .iter()
                .zip(mode.amplitudes())
                .map(|(&omega, a)| a * Complex64::from_polar(1.0, -omega * t))
                .sum();
            (amp * d_omega).norm_sqr() / (2.0 * std::f64::consts::PI)
        })
        .collect();
    Ok(TemporalDensity { window, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::FrequencyGrid;
    use approx::assert_abs_diff_eq;

    fn gaussian_mode(sigma: f64) -> ModeFunction {
        let grid = FrequencyGrid::new(0.0, 16.0, 1024).unwrap();
        let samples: Vec<Complex64> = grid
            .points()
            .map(|w| Complex64::new((-((w - 8.0) / (2.0 * sigma)).powi(2)).exp(), 0.0))
            .collect();
        ModeFunction::from_samples(grid, samples)
            .unwrap()
            .normalized()
            .unwrap()
    }

    #[test]
    fn gaussian_density_matches_analytic_fourier_transform() {
        // spectral intensity std σ ⇒ temporal density (2σ/√(2π))·exp(−2σ²t²),
        // i.e. a Gaussian centered at t = 0 with temporal std 1/(2σ).
        let sigma = 1.0;
        let mode = gaussian_mode(sigma);
        let window = TimeWindow::new(-6.0, 6.0, 1200).unwrap();
        let density = temporal_density(&mode, window).unwrap();
        for (t, &p) in window.points().zip(density.values()) {
            let expected = (2.0 * sigma / (2.0 * std::f64::consts::PI).sqrt())
                * (-2.0 * (sigma * t).powi(2)).exp();
            assert_abs_diff_eq!(p, expected, epsilon = 1e-6);
        }
    }

    #[test]
    fn density_integrates_to_one_over_a_covering_window() {
        let mode = gaussian_mode(1.0);
        let window = TimeWindow::new(-8.0, 8.0, 2000).unwrap();
        let density = temporal_density(&mode, window).unwrap();
        assert_abs_diff_eq!(density.integral(), 1.0, epsilon = 1e-3);
    }

    #[test]
    fn time_translation_shifts_the_density() {
        // With the e^{−iωt} kernel the translated mode's density obeys
        // P_τ(t) = P(t + τ): translation by τ moves it to t − τ.
        let mode = gaussian_mode(1.0);
        let tau = 1.5;
        let shifted = mode.time_translate(tau);
        let window = TimeWindow::new(-6.0, 6.0, 600).unwrap();
        let base = temporal_density(&mode, window).unwrap();
        let moved_window = TimeWindow::new(-6.0 - tau, 6.0 - tau, 600).unwrap();
        let moved = temporal_density(&shifted, moved_window).unwrap();
        for (a, b) in base.values().iter().zip(moved.values()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-10);
        }
    }

    #[test]
    fn density_is_invariant_under_global_phase() {
        let mode = gaussian_mode(1.0);
        let phased = ModeFunction::from_samples(
            *mode.grid(),
            mode.amplitudes()
                .iter()
                .map(|a| a * Complex64::from_polar(1.0, 1.234))
                .collect(),
        )
        .unwrap();
        let window = TimeWindow::new(-4.0, 4.0, 400).unwrap();
        let a = temporal_density(&mode, window).unwrap();
        let b = temporal_density(&phased, window).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-14);
        }
    }

    #[test]
    fn empty_window_is_rejected() {
        assert!(TimeWindow::new(1.0, 1.0, 100).is_err());
        assert!(TimeWindow::new(0.0, 1.0, 0).is_err());
    }
}
