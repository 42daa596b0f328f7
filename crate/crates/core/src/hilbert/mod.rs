//! Truncated single-photon and multimode Fock Hilbert space.
//!
//! The field is restricted to the spectral/temporal degree of freedom: a
//! uniform grid of positive angular frequencies carries complex mode
//! functions φ_i(ω), orthonormal under the midpoint quadrature
//! Σ_g φ_i(ω_g) φ_j*(ω_g) dω = δ_ij. Multimode Fock states are occupation
//! vectors over those modes, truncated by total photon number.

mod fock;
mod temporal;

pub use fock::{
    enumerate_fock, enumerate_fock_capped, fock_dimension, FockBasis, Ladder, OccupationVector,
};
pub use temporal::{temporal_density, TemporalDensity, TimeWindow};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerances;

/// Uniform discretization of positive angular frequencies (rad/s).
///
/// Sample points sit at bin centers: ω_g = ω_min + (g + ½)·dω.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyGrid {
    omega_min: f64,
    omega_max: f64,
    num_points: usize,
}

impl FrequencyGrid {
    pub fn new(omega_min: f64, omega_max: f64, num_points: usize) -> Result<Self> {
        if !omega_min.is_finite() || !omega_max.is_finite() {
            return Err(Error::InvalidGrid("non-finite bounds".into()));
        }
        if omega_min < 0.0 {
            return Err(Error::InvalidGrid(format!(
                "omega_min = {omega_min} is negative; only positive frequencies carry modes"
            )));
        }
        if omega_max <= omega_min {
            return Err(Error::InvalidGrid(format!(
                "omega_max = {omega_max} must exceed omega_min = {omega_min}"
            )));
        }
        if num_points == 0 {
            return Err(Error::InvalidGrid("num_points must be positive".into()));
        }
        Ok(Self {
            omega_min,
            omega_max,
            num_points,
        })
    }

    pub fn omega_min(&self) -> f64 {
        self.omega_min
    }

    pub fn omega_max(&self) -> f64 {
        self.omega_max
    }

    pub fn len(&self) -> usize {
        self.num_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Bin width dω (also the quadrature weight).
    pub fn spacing(&self) -> f64 {
        (self.omega_max - self.omega_min) / self.num_points as f64
    }

    /// Center of bin `g`.
    pub fn point(&self, g: usize) -> f64 {
        self.omega_min + (g as f64 + 0.5) * self.spacing()
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.num_points).map(|g| self.point(g))
    }
}

/// A complex spectral amplitude φ(ω) sampled on a [`FrequencyGrid`].
///
/// Units are 1/√(rad/s); a normalized mode has Σ_g |φ(ω_g)|² dω = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeFunction {
    grid: FrequencyGrid,
    amplitudes: Vec<Complex64>,
}

impl ModeFunction {
    /// Builds a mode and checks normalization within [`tolerances::MODE_NORM`].
    pub fn new(grid: FrequencyGrid, amplitudes: Vec<Complex64>) -> Result<Self> {
        let mode = Self::from_samples(grid, amplitudes)?;
        let norm_sq = mode.norm_sq();
        if (norm_sq - 1.0).abs() > tolerances::MODE_NORM {
            return Err(Error::NumericalInconsistency(format!(
                "mode norm² = {norm_sq:.12} deviates from 1 beyond tolerance"
            )));
        }
        Ok(mode)
    }

    /// Builds a mode without the normalization check (raw input for
    /// [`orthonormalize`]).
    pub fn from_samples(grid: FrequencyGrid, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                got: amplitudes.len(),
                context: "mode samples vs grid points".into(),
            });
        }
        Ok(Self { grid, amplitudes })
    }

    /// Rescales to unit norm.
    pub fn normalized(mut self) -> Result<Self> {
        let norm = self.norm_sq().sqrt();
        if norm < tolerances::GRAM_SCHMIDT_RANK {
            return Err(Error::DegenerateModeSet { index: 0, norm });
        }
        for a in &mut self.amplitudes {
            *a /= norm;
        }
        Ok(self)
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Quadrature inner product Σ_g f(ω_g) g*(ω_g) dω.
    pub fn inner_product(&self, other: &ModeFunction) -> Result<Complex64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(
                "inner product of modes on different grids".into(),
            ));
        }
        let d_omega = self.grid.spacing();
        let sum: Complex64 = self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(f, g)| f * g.conj())
            .sum();
        Ok(sum * d_omega)
    }

    pub fn norm_sq(&self) -> f64 {
        let d_omega = self.grid.spacing();
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * d_omega
    }

    /// Free evolution over `tau` seconds: φ(ω) ↦ φ(ω)·e^{−iωτ}.
    ///
    /// Exactly norm-preserving since each sample is multiplied by a phase.
    pub fn time_translate(&self, tau: f64) -> ModeFunction {
        let amplitudes = self
            .grid
            .points()
            .zip(&self.amplitudes)
            .map(|(omega, a)| a * Complex64::from_polar(1.0, -omega * tau))
            .collect();
        ModeFunction {
            grid: self.grid,
            amplitudes,
        }
    }

    /// Standard deviation of the spectral intensity |φ(ω)|² (assumes the
    /// mode is normalized).
    pub fn spectral_std(&self) -> f64 {
        let d_omega = self.grid.spacing();
        let mut mean = 0.0;
        let mut total = 0.0;
        for (omega, a) in self.grid.points().zip(&self.amplitudes) {
            let w = a.norm_sqr() * d_omega;
            mean += w * omega;
            total += w;
        }
        mean /= total;
        let mut var = 0.0;
        for (omega, a) in self.grid.points().zip(&self.amplitudes) {
            var += a.norm_sqr() * d_omega * (omega - mean).powi(2);
        }
        (var / total).sqrt()
    }
}

/// Free-function form of [`ModeFunction::inner_product`].
pub fn inner_product(f: &ModeFunction, g: &ModeFunction) -> Result<Complex64> {
    f.inner_product(g)
}

/// An ordered set of M orthonormal mode functions on one grid.
#[derive(Debug, Clone)]
pub struct ModeBasis {
    modes: Vec<ModeFunction>,
}

impl ModeBasis {
    /// Builds a basis from already-orthonormal modes, checking the Gram
    /// matrix against the identity within [`tolerances::MODE_ORTHOGONALITY`].
    pub fn new(modes: Vec<ModeFunction>) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::DegenerateModeSet {
                index: 0,
                norm: 0.0,
            });
        }
        let grid = modes[0].grid;
        for m in &modes[1..] {
            if m.grid != grid {
                return Err(Error::GridMismatch("basis modes on differing grids".into()));
            }
        }
        let basis = Self { modes };
        let defect = basis.gram_defect()?;
        if defect > tolerances::MODE_ORTHOGONALITY {
            return Err(Error::NumericalInconsistency(format!(
                "mode basis Gram defect {defect:.3e} exceeds tolerance"
            )));
        }
        Ok(basis)
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn grid(&self) -> &FrequencyGrid {
        self.modes[0].grid()
    }

    pub fn mode(&self, i: usize) -> &ModeFunction {
        &self.modes[i]
    }

    pub fn modes(&self) -> &[ModeFunction] {
        &self.modes
    }

    /// Largest |⟨φ_i, φ_j⟩ − δ_ij| over all pairs.
    pub fn gram_defect(&self) -> Result<f64> {
        let mut defect: f64 = 0.0;
        for (i, f) in self.modes.iter().enumerate() {
            for (j, g) in self.modes.iter().enumerate() {
                let expected = if i == j { 1.0 } else { 0.0 };
                let p = f.inner_product(g)?;
                defect = defect.max((p - expected).norm());
            }
        }
        Ok(defect)
    }

    /// Expands a grid function in this basis: c_i = ⟨φ, φ_i⟩.
    ///
    /// Returns the coefficients and the projection deficit 1 − Σ|c_i|²
    /// (for a normalized input).
    pub fn project(&self, mode: &ModeFunction) -> Result<(Vec<Complex64>, f64)> {
        let coeffs: Vec<Complex64> = self
            .modes
            .iter()
            .map(|basis_mode| mode.inner_product(basis_mode))
            .collect::<Result<_>>()?;
        let captured: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
        Ok((coeffs, mode.norm_sq() - captured))
    }

    /// Synthesizes the grid function Σ_j coeffs[j]·φ_j(ω).
    pub fn synthesize(&self, coeffs: &[Complex64]) -> Result<ModeFunction> {
        if coeffs.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: coeffs.len(),
                context: "coefficients vs basis size".into(),
            });
        }
        let grid = *self.grid();
        let mut amplitudes = vec![Complex64::default(); grid.len()];
        for (c, mode) in coeffs.iter().zip(&self.modes) {
            for (out, a) in amplitudes.iter_mut().zip(&mode.amplitudes) {
                *out += c * a;
            }
        }
        ModeFunction::from_samples(grid, amplitudes)
    }
}

/// Modified Gram-Schmidt on the quadrature inner product.
///
/// The span is preserved and the first mode keeps its phase. Rank
/// deficiency (post-projection norm below
/// [`tolerances::GRAM_SCHMIDT_RANK`]) is an error.
pub fn orthonormalize(raw_modes: &[ModeFunction]) -> Result<ModeBasis> {
    if raw_modes.is_empty() {
        return Err(Error::DegenerateModeSet {
            index: 0,
            norm: 0.0,
        });
    }
    let grid = raw_modes[0].grid;
    let mut out: Vec<ModeFunction> = Vec::with_capacity(raw_modes.len());
    for (index, raw) in raw_modes.iter().enumerate() {
        if raw.grid != grid {
            return Err(Error::GridMismatch(
                "orthonormalize requires a shared grid".into(),
            ));
        }
        let mut work = raw.clone();
        for prev in &out {
            let overlap = work.inner_product(prev)?;
            for (w, p) in work.amplitudes.iter_mut().zip(&prev.amplitudes) {
                *w -= overlap * p;
            }
        }
        let norm = work.norm_sq().sqrt();
        if norm < tolerances::GRAM_SCHMIDT_RANK {
            return Err(Error::DegenerateModeSet { index, norm });
        }
        for w in &mut work.amplitudes {
            *w /= norm;
        }
        out.push(work);
    }
    ModeBasis::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn test_grid() -> FrequencyGrid {
        FrequencyGrid::new(0.0, 16.0, 256).unwrap()
    }

    /// Unnormalized Gaussian amplitude samples centered at `center`,
    /// with intensity standard deviation `sigma`.
    fn gaussian_samples(grid: &FrequencyGrid, center: f64, sigma: f64) -> Vec<Complex64> {
        grid.points()
            .map(|w| Complex64::new((-((w - center) / (2.0 * sigma)).powi(2)).exp(), 0.0))
            .collect()
    }

    #[test]
    fn grid_rejects_bad_bounds() {
        assert!(FrequencyGrid::new(-1.0, 1.0, 8).is_err());
        assert!(FrequencyGrid::new(2.0, 2.0, 8).is_err());
        assert!(FrequencyGrid::new(0.0, 1.0, 0).is_err());
    }

    #[test]
    fn grid_points_increase() {
        let grid = test_grid();
        let pts: Vec<f64> = grid.points().collect();
        assert!(pts.windows(2).all(|w| w[1] > w[0]));
        assert!(pts[0] > grid.omega_min());
        assert!(*pts.last().unwrap() < grid.omega_max());
    }

    #[test]
    fn inner_product_of_normalized_mode_is_one() {
        let grid = test_grid();
        let mode = ModeFunction::from_samples(grid, gaussian_samples(&grid, 8.0, 1.0))
            .unwrap()
            .normalized()
            .unwrap();
        let p = mode.inner_product(&mode).unwrap();
        assert_abs_diff_eq!(p.re, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.im, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn inner_product_of_disjoint_supports_is_zero() {
        let grid = test_grid();
        let mut a = vec![Complex64::default(); grid.len()];
        let mut b = vec![Complex64::default(); grid.len()];
        a[10] = Complex64::new(1.0, 0.0);
        b[200] = Complex64::new(0.0, 1.0);
        let f = ModeFunction::from_samples(grid, a)
            .unwrap()
            .normalized()
            .unwrap();
        let g = ModeFunction::from_samples(grid, b)
            .unwrap()
            .normalized()
            .unwrap();
        assert_eq!(f.inner_product(&g).unwrap(), Complex64::default());
    }

    #[test]
    fn inner_product_rejects_grid_mismatch() {
        let f =
            ModeFunction::from_samples(test_grid(), vec![Complex64::new(1.0, 0.0); 256]).unwrap();
        let other = FrequencyGrid::new(0.0, 8.0, 256).unwrap();
        let g = ModeFunction::from_samples(other, vec![Complex64::new(1.0, 0.0); 256]).unwrap();
        assert!(matches!(f.inner_product(&g), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn hermite_gauss_pair_is_orthogonal_after_gram_schmidt() {
        // First two Hermite-Gauss shapes constructed via the Gram-Schmidt
        // oracle from {gaussian, (ω-ω₀)·gaussian}.
        let grid = test_grid();
        let g0 = gaussian_samples(&grid, 8.0, 1.0);
        let g1: Vec<Complex64> = grid.points().zip(&g0).map(|(w, a)| a * (w - 8.0)).collect();
        let raw = vec![
            ModeFunction::from_samples(grid, g0).unwrap(),
            ModeFunction::from_samples(grid, g1).unwrap(),
        ];
        let basis = orthonormalize(&raw).unwrap();
        let p = basis.mode(0).inner_product(basis.mode(1)).unwrap();
        assert!(p.norm() < 1e-8, "overlap {p}");
    }

    #[test]
    fn orthonormalize_is_idempotent_on_a_normalized_mode() {
        let grid = test_grid();
        // complex phase to check it is preserved
        let samples: Vec<Complex64> = gaussian_samples(&grid, 8.0, 1.0)
            .into_iter()
            .map(|a| a * Complex64::from_polar(1.0, 0.7))
            .collect();
        let mode = ModeFunction::from_samples(grid, samples)
            .unwrap()
            .normalized()
            .unwrap();
        let basis = orthonormalize(std::slice::from_ref(&mode)).unwrap();
        let diff: f64 = basis
            .mode(0)
            .amplitudes()
            .iter()
            .zip(mode.amplitudes())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(diff < 1e-12, "phase or shape changed by {diff}");
    }

    #[test]
    fn orthonormalize_rejects_identical_modes() {
        let grid = test_grid();
        let mode = ModeFunction::from_samples(grid, gaussian_samples(&grid, 8.0, 1.0)).unwrap();
        let err = orthonormalize(&[mode.clone(), mode]).unwrap_err();
        assert!(matches!(err, Error::DegenerateModeSet { index: 1, .. }));
    }

    #[test]
    fn orthonormalize_three_random_smooth_modes() {
        let grid = test_grid();
        let raw: Vec<ModeFunction> = (0..3)
            .map(|k| {
                let samples = grid
                    .points()
                    .map(|w| {
                        Complex64::new(
                            (-((w - 8.0) / 2.0).powi(2)).exp() * (0.3 * (k as f64 + 1.0) * w).sin(),
                            (-((w - 8.0) / 2.0).powi(2)).exp()
                                * (0.17 * (k as f64 + 2.0) * w).cos(),
                        )
                    })
                    .collect();
                ModeFunction::from_samples(grid, samples).unwrap()
            })
            .collect();
        let basis = orthonormalize(&raw).unwrap();
        assert!(basis.gram_defect().unwrap() < 1e-10);
    }

    #[test]
    fn time_translate_preserves_norm_and_composes() {
        let grid = test_grid();
        let mode = ModeFunction::from_samples(grid, gaussian_samples(&grid, 8.0, 1.0))
            .unwrap()
            .normalized()
            .unwrap();
        let t0 = mode.time_translate(0.0);
        assert_eq!(t0, mode);

        let shifted = mode.time_translate(2.3);
        assert_abs_diff_eq!(shifted.norm_sq(), 1.0, epsilon = 1e-14);

        let two_step = mode.time_translate(1.1).time_translate(1.2);
        let direct = mode.time_translate(2.3);
        let diff: f64 = two_step
            .amplitudes()
            .iter()
            .zip(direct.amplitudes())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(diff < 1e-12);
    }

    #[test]
    fn gaussian_time_translate_overlap_matches_analytic_decay() {
        // |⟨φ, φ_τ⟩| = exp(−σ²τ²/2) for intensity std σ.
        let grid = FrequencyGrid::new(0.0, 16.0, 2048).unwrap();
        let sigma = 0.8;
        let samples: Vec<Complex64> = grid
            .points()
            .map(|w| Complex64::new((-((w - 8.0).powi(2)) / (4.0 * sigma * sigma)).exp(), 0.0))
            .collect();
        let mode = ModeFunction::from_samples(grid, samples)
            .unwrap()
            .normalized()
            .unwrap();
        for tau in [0.3, 0.9, 1.7] {
            let overlap = mode.inner_product(&mode.time_translate(tau)).unwrap();
            let expected = (-(sigma * tau).powi(2) / 2.0).exp();
            assert_abs_diff_eq!(overlap.norm(), expected, epsilon = 1e-6);
        }
    }

    #[test]
    fn projection_roundtrip_through_basis() {
        let grid = test_grid();
        let raw: Vec<ModeFunction> = [(8.0, 1.0), (6.0, 1.3)]
            .iter()
            .map(|&(c, s)| ModeFunction::from_samples(grid, gaussian_samples(&grid, c, s)).unwrap())
            .collect();
        let basis = orthonormalize(&raw).unwrap();
        let coeffs = [Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)];
        let mode = basis.synthesize(&coeffs).unwrap();
        let (recovered, deficit) = basis.project(&mode).unwrap();
        assert!(deficit.abs() < 1e-10);
        for (c, r) in coeffs.iter().zip(&recovered) {
            assert!((c - r).norm() < 1e-10);
        }
    }
}
