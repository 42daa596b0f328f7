//! Built-in POVM generators with closed-form properties, used as oracles
//! in tests and as ready-made example detectors for the CLI.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{orthonormalize, FockBasis, FrequencyGrid, ModeBasis, ModeFunction};
use crate::povm::{Povm, PovmElement};
use crate::tolerances;

/// Parameters of one on/off pixel watching a single mode.
#[derive(Debug, Clone, Copy)]
pub struct PixelSpec {
    pub mode: usize,
    pub eta: f64,
    pub p_dark: f64,
}

/// Which built-in detector to generate, with its parameters.
#[derive(Debug, Clone)]
pub enum ModelSpec {
    /// Projectors |n⟩_i⟨n| for every mode i and n ≥ 1.
    IdealPnr,
    /// Two-outcome click/no-click detector on one mode.
    OnOff { mode: usize, eta: f64, p_dark: f64 },
    /// Coherent-state POVM (Δx·Δy/π)|α⟩⟨α| on a square α lattice.
    Heterodyne {
        mode: usize,
        alpha_max: f64,
        alpha_step: f64,
    },
    /// Parallel saturating pixels with per-tuple click outcomes.
    PixelArray {
        pixels: Vec<PixelSpec>,
        max_clicks: u32,
    },
}

impl ModelSpec {
    /// Builds the model on the given basis. The second return value
    /// carries human-readable warnings (currently only heterodyne
    /// truncation).
    pub fn build(&self, basis: FockBasis) -> Result<(Povm, Vec<String>)> {
        match self {
            ModelSpec::IdealPnr => Ok((ideal_pnr(basis)?, vec![])),
            ModelSpec::OnOff { mode, eta, p_dark } => {
                Ok((on_off(basis, *mode, *eta, *p_dark)?, vec![]))
            }
            ModelSpec::Heterodyne {
                mode,
                alpha_max,
                alpha_step,
            } => {
                let het = heterodyne(basis, *mode, *alpha_max, *alpha_step)?;
                let mut warnings = vec![];
                if het.truncation_warning() {
                    warnings.push(format!(
                        "heterodyne truncation defect {:.3} exceeds {} on the protected number sector; increase N_max or the α radius",
                        het.truncation_defect,
                        tolerances::HETERODYNE_TRUNCATION_WARN
                    ));
                }
                Ok((het.povm, warnings))
            }
            ModelSpec::PixelArray { pixels, max_clicks } => {
                Ok((pixel_array(basis, pixels, *max_clicks)?, vec![]))
            }
        }
    }
}

fn check_unit_interval(name: &str, value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::InvalidParameter(format!(
            "{name} = {value} outside [0, 1]"
        )));
    }
    Ok(())
}

/// The perfectly number-resolving POVM: one element |n⟩_i⟨n| per mode i
/// and photon number 1 ≤ n ≤ N_max, each meaning "n photons in mode i and
/// vacuum elsewhere". Zero dark counts by construction.
pub fn ideal_pnr(basis: FockBasis) -> Result<Povm> {
    if basis.n_max() < 1 {
        return Err(Error::NoSinglePhotonSector);
    }
    let d = basis.dim();
    let mut elements = Vec::new();
    for mode in 0..basis.modes() {
        for n in 1..=basis.n_max() {
            let idx = basis
                .index_of_number_state(mode, n)
                .expect("n within cutoff");
            let mut m = DMatrix::<Complex64>::zeros(d, d);
            m[(idx, idx)] = Complex64::new(1.0, 0.0);
            elements.push(PovmElement::new(format!("pnr_m{mode}_n{n}"), 1, m)?);
        }
    }
    Povm::new(basis, elements)
}

/// Click probability of a saturating pixel given n photons in its mode:
/// registered photons are Bin(n, η) and each of the `max_clicks` click
/// slots can dark-fire with probability p_dark; the total saturates at
/// `max_clicks`.
fn pixel_click_distribution(n: u32, eta: f64, p_dark: f64, max_clicks: u32) -> Vec<f64> {
    let c = max_clicks as usize;
    let mut dist = vec![0.0; c + 1];
    for a in 0..=n {
        let pa = binomial_pmf(n, a, eta);
        for b in 0..=max_clicks {
            let pb = binomial_pmf(max_clicks, b, p_dark);
            let clicks = ((a + b) as usize).min(c);
            dist[clicks] += pa * pb;
        }
    }
    dist
}

fn binomial_pmf(n: u32, k: u32, p: f64) -> f64 {
    if k > n {
        return 0.0;
    }
    // exact for the small n used here
    let mut coeff = 1.0;
    for i in 0..k {
        coeff = coeff * (n - i) as f64 / (i + 1) as f64;
    }
    coeff * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32)
}

/// Two-outcome on/off detector on one mode with binomial loss and a dark
/// count: Π_click = 1 − (1−p_dark) Σ_n (1−η)^n P_n^(i). Diagonal in
/// photon number, complete by construction.
pub fn on_off(basis: FockBasis, mode: usize, eta: f64, p_dark: f64) -> Result<Povm> {
    check_unit_interval("eta", eta)?;
    check_unit_interval("p_dark", p_dark)?;
    if mode >= basis.modes() {
        return Err(Error::InvalidParameter(format!(
            "mode {mode} out of range for {} modes",
            basis.modes()
        )));
    }
    let d = basis.dim();
    let mut m = DMatrix::<Complex64>::zeros(d, d);
    for (s, state) in basis.states().iter().enumerate() {
        let n = state.counts()[mode];
        let no_click = (1.0 - p_dark) * (1.0 - eta).powi(n as i32);
        m[(s, s)] = Complex64::new(1.0 - no_click, 0.0);
    }
    let click = PovmElement::new("click", 1, m)?;
    Povm::new(basis, vec![click])
}

/// Heterodyne model plus its truncation diagnostic.
#[derive(Debug, Clone)]
pub struct HeterodynePovm {
    pub povm: Povm,
    /// Max deviation of ⟨n|ΣΠ_α|n⟩ from 1 over the protected sector
    /// n ≤ N_max/2.
    pub truncation_defect: f64,
}

impl HeterodynePovm {
    pub fn truncation_warning(&self) -> bool {
        self.truncation_defect > tolerances::HETERODYNE_TRUNCATION_WARN
    }
}

/// Coherent-state POVM {(Δx·Δy/π)|α⟩⟨α|} of mode `mode` on the square
/// lattice α = (j + i·k)·alpha_step, |Re α|, |Im α| ≤ alpha_max, with the
/// coherent states truncated at the Fock cutoff. A residual element
/// restores completeness exactly.
pub fn heterodyne(
    basis: FockBasis,
    mode: usize,
    alpha_max: f64,
    alpha_step: f64,
) -> Result<HeterodynePovm> {
    if !(alpha_step.is_finite() && alpha_step > 0.0 && alpha_max.is_finite() && alpha_max > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha grid requires positive extent and spacing, got max {alpha_max}, step {alpha_step}"
        )));
    }
    if mode >= basis.modes() {
        return Err(Error::InvalidParameter(format!(
            "mode {mode} out of range for {} modes",
            basis.modes()
        )));
    }
    let d = basis.dim();
    let weight = alpha_step * alpha_step / std::f64::consts::PI;
    let half = (alpha_max / alpha_step).floor() as i64;
    let mut elements = Vec::new();
    let mut sum = DMatrix::<Complex64>::zeros(d, d);
    for jx in -half..=half {
        for jy in -half..=half {
            let alpha = Complex64::new(jx as f64 * alpha_step, jy as f64 * alpha_step);
            let ket = truncated_coherent(&basis, mode, alpha);
            let m = DMatrix::from_fn(d, d, |r, c| ket[r] * ket[c].conj() * weight);
            sum += &m;
            elements.push(PovmElement::new(
                format!("alpha_{:+.4}_{:+.4}", alpha.re, alpha.im),
                1,
                m,
            )?);
        }
    }

    let mut truncation_defect = 0.0_f64;
    for n in 0..=(basis.n_max() / 2) {
        let idx = basis.index_of_number_state(mode, n).expect("within cutoff");
        truncation_defect = truncation_defect.max((1.0 - sum[(idx, idx)].re).abs());
    }

    let residual = DMatrix::<Complex64>::identity(d, d) - sum;
    elements.push(PovmElement::new("residual", 1, residual)?);
    Ok(HeterodynePovm {
        povm: Povm::new(basis, elements)?,
        truncation_defect,
    })
}

/// |α⟩ of one mode, truncated at the cutoff (norm < 1; the lost tail goes
/// to the residual element).
fn truncated_coherent(basis: &FockBasis, mode: usize, alpha: Complex64) -> Vec<Complex64> {
    let mut ket = vec![Complex64::default(); basis.dim()];
    let gauss = (-alpha.norm_sqr() / 2.0).exp();
    let mut coeff = Complex64::new(gauss, 0.0);
    for n in 0..=basis.n_max() {
        if n > 0 {
            coeff = coeff * alpha / Complex64::new((n as f64).sqrt(), 0.0);
        }
        let idx = basis.index_of_number_state(mode, n).expect("within cutoff");
        ket[idx] = coeff;
    }
    ket
}

/// Array of saturating pixels on distinct modes. One outcome per tuple of
/// per-pixel click counts (0..=max_clicks each); the all-zero tuple is
/// the no-click outcome and is left to the derived null element, so a
/// P-pixel array yields (max_clicks+1)^P − 1 click elements.
pub fn pixel_array(basis: FockBasis, pixels: &[PixelSpec], max_clicks: u32) -> Result<Povm> {
    if pixels.is_empty() {
        return Err(Error::InvalidParameter("no pixels given".into()));
    }
    if max_clicks == 0 {
        return Err(Error::InvalidParameter("max_clicks must be ≥ 1".into()));
    }
    for pixel in pixels {
        check_unit_interval("eta", pixel.eta)?;
        check_unit_interval("p_dark", pixel.p_dark)?;
        if pixel.mode >= basis.modes() {
            return Err(Error::InvalidParameter(format!(
                "pixel mode {} out of range for {} modes",
                pixel.mode,
                basis.modes()
            )));
        }
    }
    for (a, pa) in pixels.iter().enumerate() {
        for pb in &pixels[a + 1..] {
            if pa.mode == pb.mode {
                return Err(Error::UnsupportedComposition(format!(
                    "two pixels watch mode {}; their elements would not be independent",
                    pa.mode
                )));
            }
        }
    }

    let d = basis.dim();
    // f[p][n][c]: pixel p fires c times given n photons in its mode
    let tables: Vec<Vec<Vec<f64>>> = pixels
        .iter()
        .map(|p| {
            (0..=basis.n_max())
                .map(|n| pixel_click_distribution(n, p.eta, p.p_dark, max_clicks))
                .collect()
        })
        .collect();

    let outcomes = (max_clicks as usize + 1).pow(pixels.len() as u32);
    let mut elements = Vec::with_capacity(outcomes - 1);
    let mut tuple = vec![0u32; pixels.len()];
    for flat in 1..outcomes {
        // decode the click tuple (pixel 0 is the fastest-varying digit)
        let mut rem = flat;
        for c in tuple.iter_mut() {
            *c = (rem % (max_clicks as usize + 1)) as u32;
            rem /= max_clicks as usize + 1;
        }
        let mut m = DMatrix::<Complex64>::zeros(d, d);
        for (s, state) in basis.states().iter().enumerate() {
            let mut prob = 1.0;
            for (p, &clicks) in tuple.iter().enumerate() {
                let n = state.counts()[pixels[p].mode] as usize;
                prob *= tables[p][n][clicks as usize];
            }
            m[(s, s)] = Complex64::new(prob, 0.0);
        }
        let label = format!(
            "px_{}",
            tuple
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join("_")
        );
        let total_clicks: u32 = tuple.iter().sum();
        elements.push(PovmElement::new(label, total_clicks as u64, m)?);
    }
    Povm::new(basis, elements)
}

/// First M Hermite-Gauss mode functions centered at `center` with
/// intensity standard deviation `width`, re-orthonormalized on the grid.
pub fn gaussian_basis(
    grid: FrequencyGrid,
    modes: usize,
    center: f64,
    width: f64,
) -> Result<ModeBasis> {
    if !(width.is_finite() && width > 0.0) || modes == 0 {
        return Err(Error::InvalidParameter(format!(
            "gaussian basis requires positive width and at least one mode, got width {width}, modes {modes}"
        )));
    }
    if center - grid.omega_min() <= 6.0 * width || grid.omega_max() - center <= 6.0 * width {
        return Err(Error::SpectralLeakage(format!(
            "Gaussian at {center} ± 6·{width} does not fit inside [{}, {}]",
            grid.omega_min(),
            grid.omega_max()
        )));
    }
    let raw: Vec<ModeFunction> = (0..modes)
        .map(|m| {
            let samples = grid
                .points()
                .map(|w| {
                    let x = (w - center) / (width * std::f64::consts::SQRT_2);
                    Complex64::new(hermite(m, x) * (-x * x / 2.0).exp(), 0.0)
                })
                .collect();
            ModeFunction::from_samples(grid, samples)
        })
        .collect::<Result<_>>()?;
    orthonormalize(&raw)
}

fn hermite(m: usize, x: f64) -> f64 {
    let mut h_prev = 1.0;
    if m == 0 {
        return h_prev;
    }
    let mut h = 2.0 * x;
    for k in 1..m {
        let next = 2.0 * x * h - 2.0 * k as f64 * h_prev;
        h_prev = h;
        h = next;
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{single_photon_block, total_bandwidth};
    use crate::hilbert::enumerate_fock;
    use crate::linalg;
    use crate::povm::purity;
    use crate::quantum::{dark_counts, number_entropy, number_weights};
    use crate::testkit;
    use approx::assert_abs_diff_eq;

    #[test]
    fn ideal_pnr_elements_are_pure_dark_free_number_resolving() {
        let basis = testkit::fock(2, 3);
        let povm = ideal_pnr(basis.clone()).unwrap();
        assert_eq!(povm.elements().len(), 2 * 3);
        assert!(povm.validate().passed());
        for d in dark_counts(&povm) {
            assert_abs_diff_eq!(d, 0.0, epsilon = 1e-15);
        }
        for (idx, element) in povm.elements().iter().enumerate() {
            assert_abs_diff_eq!(purity(element).unwrap(), 1.0, epsilon = 1e-14);
            let mode = idx / 3;
            let w = number_weights(element, &basis, mode).unwrap();
            assert_abs_diff_eq!(number_entropy(&w).unwrap(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn ideal_pnr_blocks_of_distinct_modes_are_orthogonal() {
        let basis = testkit::fock(2, 2);
        let povm = ideal_pnr(basis.clone()).unwrap();
        let blocks: Vec<_> = povm
            .elements()
            .iter()
            .map(|e| single_photon_block(e, &basis).unwrap())
            .collect();
        // elements are ordered (mode 0: n=1,2), (mode 1: n=1,2)
        let b0 = &blocks[0];
        let b1 = &blocks[2];
        let cross = linalg::trace_product(b0.matrix(), b1.matrix());
        assert_abs_diff_eq!(cross.norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn on_off_matches_the_closed_form_and_is_diagonal() {
        let basis = testkit::fock(1, 4);
        for (eta, p_dark) in [(1.0, 0.0), (0.8, 0.0), (0.0, 0.02), (0.37, 0.05)] {
            let povm = on_off(basis.clone(), 0, eta, p_dark).unwrap();
            assert!(povm.validate().passed());
            let click = &povm.elements()[0];
            for (s, state) in basis.states().iter().enumerate() {
                let n = state.counts()[0];
                let expected = 1.0 - (1.0 - p_dark) * (1.0 - eta).powi(n as i32);
                assert_abs_diff_eq!(click.matrix()[(s, s)].re, expected, epsilon = 1e-15);
                for c in 0..basis.dim() {
                    if c != s {
                        assert_eq!(click.matrix()[(s, c)], Complex64::default());
                    }
                }
            }
        }
    }

    #[test]
    fn on_off_single_photon_efficiency_examples() {
        let basis = testkit::fock(1, 2);
        let one = basis.index_of_number_state(0, 1).unwrap();

        let perfect = on_off(basis.clone(), 0, 1.0, 0.0).unwrap();
        assert_abs_diff_eq!(
            perfect.elements()[0].matrix()[(one, one)].re,
            1.0,
            epsilon = 1e-15
        );

        let lossy = on_off(basis.clone(), 0, 0.8, 0.0).unwrap();
        assert_abs_diff_eq!(
            lossy.elements()[0].matrix()[(one, one)].re,
            0.8,
            epsilon = 1e-15
        );

        let dark_only = on_off(basis.clone(), 0, 0.0, 0.02).unwrap();
        assert_abs_diff_eq!(
            dark_only.elements()[0].matrix()[(one, one)].re,
            0.02,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(dark_counts(&dark_only)[0], 0.02, epsilon = 1e-15);
    }

    #[test]
    fn on_off_rejects_unphysical_parameters() {
        let basis = testkit::fock(1, 1);
        assert!(matches!(
            on_off(basis.clone(), 0, 1.2, 0.0),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            on_off(basis, 0, 0.5, -0.1),
            Err(Error::InvalidParameter(_))
        ));
    }

    fn heterodyne_fixture() -> HeterodynePovm {
        let basis = enumerate_fock(testkit::gaussian_basis(1), 6).unwrap();
        heterodyne(basis, 0, 3.0, 0.5).unwrap()
    }

    #[test]
    fn heterodyne_is_valid_with_small_truncation_defect() {
        let het = heterodyne_fixture();
        assert!(het.povm.validate().passed());
        assert!(
            het.truncation_defect < tolerances::HETERODYNE_TRUNCATION_WARN,
            "defect {}",
            het.truncation_defect
        );
        assert!(!het.truncation_warning());
    }

    #[test]
    fn heterodyne_elements_are_pure_and_overlapping() {
        let het = heterodyne_fixture();
        let coherent: Vec<_> = het
            .povm
            .elements()
            .iter()
            .filter(|e| e.label() != "residual")
            .collect();
        for element in &coherent {
            assert_abs_diff_eq!(purity(element).unwrap(), 1.0, epsilon = 1e-12);
        }
        // neighboring coherent elements are never orthogonal
        let a = het.povm.element_by_label("alpha_+0.0000_+0.0000").unwrap();
        let b = het.povm.element_by_label("alpha_+0.5000_+0.0000").unwrap();
        let cross = linalg::trace_product(a.matrix(), b.matrix()).re;
        assert!(cross > 0.0, "neighbors should overlap, got {cross}");
    }

    #[test]
    fn heterodyne_vacuum_expectation_of_origin_element() {
        let het = heterodyne_fixture();
        let origin = het.povm.element_by_label("alpha_+0.0000_+0.0000").unwrap();
        let expected = 0.5 * 0.5 / std::f64::consts::PI;
        assert_abs_diff_eq!(origin.matrix()[(0, 0)].re, expected, epsilon = 1e-15);
    }

    #[test]
    fn pixel_array_two_by_two_gives_eight_click_outcomes() {
        let basis = testkit::fock(2, 2);
        let pixels = [
            PixelSpec {
                mode: 0,
                eta: 0.8,
                p_dark: 0.01,
            },
            PixelSpec {
                mode: 1,
                eta: 0.6,
                p_dark: 0.02,
            },
        ];
        let povm = pixel_array(basis, &pixels, 2).unwrap();
        assert_eq!(povm.elements().len(), 8);
        assert!(povm.validate().passed());
        // completeness is exact by construction
        let defect = (povm.click_sum() + povm.null_element().matrix()
            - DMatrix::<Complex64>::identity(povm.dim(), povm.dim()))
        .norm();
        assert!(defect < 1e-15);

        // click bookkeeping: outcome "both pixels clicked twice" has N(k) = 4
        let both_twice = povm.element_by_label("px_2_2").unwrap();
        assert_eq!(both_twice.clicks(), 4);
        // and a nonzero dark-count probability (two dark slots per pixel)
        assert!(both_twice.matrix()[(0, 0)].re > 0.0);
    }

    #[test]
    fn single_pixel_single_click_reduces_to_on_off() {
        let basis = testkit::fock(1, 3);
        let pixels = [PixelSpec {
            mode: 0,
            eta: 0.7,
            p_dark: 0.03,
        }];
        let array = pixel_array(basis.clone(), &pixels, 1).unwrap();
        let reference = on_off(basis, 0, 0.7, 0.03).unwrap();
        assert_eq!(array.elements().len(), 1);
        let diff = (array.elements()[0].matrix() - reference.elements()[0].matrix()).norm();
        assert!(diff < 1e-14, "pixel array deviates from on/off by {diff}");
    }

    #[test]
    fn pixel_array_rejects_shared_modes() {
        let basis = testkit::fock(2, 2);
        let pixels = [
            PixelSpec {
                mode: 0,
                eta: 0.8,
                p_dark: 0.0,
            },
            PixelSpec {
                mode: 0,
                eta: 0.6,
                p_dark: 0.0,
            },
        ];
        assert!(matches!(
            pixel_array(basis, &pixels, 2),
            Err(Error::UnsupportedComposition(_))
        ));
    }

    #[test]
    fn gaussian_basis_is_orthonormal() {
        let grid = testkit::grid();
        let single = gaussian_basis(grid, 1, 8.0, 1.0).unwrap();
        assert_abs_diff_eq!(single.mode(0).norm_sq(), 1.0, epsilon = 1e-12);

        let four = gaussian_basis(grid, 4, 8.0, 1.0).unwrap();
        assert!(four.gram_defect().unwrap() < 1e-8);
    }

    #[test]
    fn gaussian_basis_rejects_leaking_placement() {
        let grid = testkit::grid();
        assert!(matches!(
            gaussian_basis(grid, 1, 2.0, 1.0),
            Err(Error::SpectralLeakage(_))
        ));
    }

    #[test]
    fn every_generated_model_validates() {
        let basis = testkit::fock(2, 2);
        let specs = [
            ModelSpec::IdealPnr,
            ModelSpec::OnOff {
                mode: 0,
                eta: 0.8,
                p_dark: 0.02,
            },
            ModelSpec::Heterodyne {
                mode: 0,
                alpha_max: 1.0,
                alpha_step: 0.5,
            },
            ModelSpec::PixelArray {
                pixels: vec![
                    PixelSpec {
                        mode: 0,
                        eta: 0.9,
                        p_dark: 0.01,
                    },
                    PixelSpec {
                        mode: 1,
                        eta: 0.5,
                        p_dark: 0.0,
                    },
                ],
                max_clicks: 2,
            },
        ];
        for spec in specs {
            let (povm, _) = spec.build(basis.clone()).unwrap();
            let report = povm.validate();
            assert!(report.passed(), "{spec:?} failed validation:\n{report}");
        }
    }

    #[test]
    fn on_off_total_bandwidth_is_its_efficiency() {
        let basis = testkit::fock(1, 3);
        let povm = on_off(basis, 0, 0.8, 0.0).unwrap();
        assert_abs_diff_eq!(total_bandwidth(&povm).unwrap(), 0.8, epsilon = 1e-14);
    }

    #[test]
    fn ideal_pnr_total_bandwidth_counts_modes() {
        let basis = testkit::fock(3, 2);
        let povm = ideal_pnr(basis).unwrap();
        assert_abs_diff_eq!(total_bandwidth(&povm).unwrap(), 3.0, epsilon = 1e-12);
    }
}
