//! Figures of merit tied to photon statistics: photon-number resolution,
//! mode efficiencies, dark counts, response time and detection rate.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::classical::{block_of_matrix, eigenmodes, entropy_bits, EigenmodeDecomposition};
use crate::error::{Error, Result};
use crate::hilbert::{FockBasis, Ladder, ModeFunction};
use crate::povm::{Povm, PovmElement};
use crate::tolerances;

/// Photon-number weights Ω_{k,i}^(n) = ⟨n_i|Π_k|n_i⟩ for one outcome and
/// one mode, n = 0..N_max.
#[derive(Debug, Clone)]
pub struct NumberWeights {
    label: String,
    mode: usize,
    weights: Vec<f64>,
}

impl NumberWeights {
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn mode(&self) -> usize {
        self.mode
    }

    /// Weight for photon number n.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Normalizer W_{k,i} = Σ_n Ω^(n).
    pub fn normalizer(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// True when every weight is negligible (the outcome carries no
    /// photon-number support in this mode).
    pub fn empty_support(&self) -> bool {
        self.weights.iter().all(|w| w.abs() < 1e-15)
    }
}

/// Computes the number weights of `element` for photons in mode `i` via
/// ladder operators: the n-photon probe state is built by repeated
/// application of a_i† to the vacuum.
pub fn number_weights(
    element: &PovmElement,
    basis: &FockBasis,
    mode: usize,
) -> Result<NumberWeights> {
    if mode >= basis.modes() {
        return Err(Error::DimensionMismatch {
            expected: basis.modes(),
            got: mode,
            context: "mode index out of range".into(),
        });
    }
    let raising = basis.ladder_matrix(mode, Ladder::Raising);
    let mut probe = DVector::<Complex64>::zeros(basis.dim());
    probe[0] = Complex64::new(1.0, 0.0);
    let mut weights = Vec::with_capacity(basis.n_max() as usize + 1);
    for n in 0..=basis.n_max() {
        if n > 0 {
            // a_i†|n−1⟩_i = √n |n⟩_i inside the truncation
            probe = (&raising * &probe) / Complex64::new((n as f64).sqrt(), 0.0);
        }
        let expectation = (probe.adjoint() * element.matrix() * &probe)[(0, 0)].re;
        weights.push(expectation);
    }
    Ok(NumberWeights {
        label: element.label().to_string(),
        mode,
        weights,
    })
}

/// Shannon entropy of the posterior photon-number distribution
/// Pr(n|k,i) = Ω^(n)/W, in bits, under a uniform prior over the
/// truncation range.
pub fn number_entropy(weights: &NumberWeights) -> Result<f64> {
    if weights.normalizer() <= tolerances::ZERO_TRACE {
        return Err(Error::EmptyNumberSupport {
            label: weights.label.clone(),
            mode: weights.mode,
        });
    }
    Ok(entropy_bits(&weights.weights))
}

/// Dephases an element in the photon number of mode `i`:
/// Σ_n P_n Π_k P_n, with P_n the projector onto exactly n photons in mode
/// i and anything elsewhere. Coherences between different n_i are zeroed;
/// hermiticity and positivity are preserved.
pub fn mode_restricted_element(
    element: &PovmElement,
    basis: &FockBasis,
    mode: usize,
) -> Result<PovmElement> {
    if mode >= basis.modes() {
        return Err(Error::DimensionMismatch {
            expected: basis.modes(),
            got: mode,
            context: "mode index out of range".into(),
        });
    }
    if element.dim() != basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.dim(),
            got: element.dim(),
            context: format!("element '{}' vs basis", element.label()),
        });
    }
    let d = basis.dim();
    let matrix = DMatrix::from_fn(d, d, |r, c| {
        if basis.state(r).counts()[mode] == basis.state(c).counts()[mode] {
            element.matrix()[(r, c)]
        } else {
            Complex64::default()
        }
    });
    PovmElement::new(element.label().to_string(), element.clicks(), matrix)
}

/// Collision entropy −log₂ Pur(Π_k^(i)) of the mode-restricted element:
/// how specific the outcome is about the photon number in mode `i`.
pub fn number_collision_entropy(
    element: &PovmElement,
    basis: &FockBasis,
    mode: usize,
) -> Result<f64> {
    let restricted = mode_restricted_element(element, basis, mode)?;
    Ok(-crate::povm::purity(&restricted)?.log2())
}

/// Mode efficiencies: the eigendecomposition of the summed single-photon
/// block Σ_k Π_k^(1). Weight w_i is the probability that one photon in
/// eigenmode i causes any click; η_max is the best of them.
#[derive(Debug, Clone)]
pub struct EfficiencySpectrum {
    decomposition: EigenmodeDecomposition,
    eta_max: f64,
}

impl EfficiencySpectrum {
    /// Efficiencies sorted descending.
    pub fn weights(&self) -> &[f64] {
        self.decomposition.weights()
    }

    pub fn eigenmodes(&self) -> &[ModeFunction] {
        self.decomposition.eigenmodes()
    }

    /// Efficiency of the detector at its most sensitive point.
    pub fn eta_max(&self) -> f64 {
        self.eta_max
    }
}

/// Diagonalizes Σ_{k=1..N} Π_k^(1) into per-mode efficiencies.
pub fn efficiency_spectrum(povm: &Povm) -> Result<EfficiencySpectrum> {
    let block = block_of_matrix("Σ".into(), &povm.click_sum(), povm.basis())?;
    let decomposition = eigenmodes(&block, povm.basis().mode_basis())?;
    let eta_max = decomposition
        .weights()
        .iter()
        .copied()
        .fold(0.0_f64, f64::max);
    Ok(EfficiencySpectrum {
        decomposition,
        eta_max,
    })
}

/// Single-photon detection efficiency η = ⟨φ|Π|φ⟩ of an arbitrary mode
/// (not necessarily an eigenmode of the summed block).
pub fn mode_efficiency(povm: &Povm, mode: &ModeFunction) -> Result<f64> {
    let (coeffs, deficit) = povm.basis().mode_basis().project(mode)?;
    if deficit.abs() > tolerances::SPAN_DEFICIT {
        return Err(Error::ModeOutsideSpan(deficit));
    }
    let block = block_of_matrix("Σ".into(), &povm.click_sum(), povm.basis())?;
    let mut eta = Complex64::default();
    for (i, ci) in coeffs.iter().enumerate() {
        for (j, cj) in coeffs.iter().enumerate() {
            eta += ci.conj() * block.matrix()[(i, j)] * cj;
        }
    }
    let eta = eta.re;
    if !(tolerances::PSD_FLOOR..=tolerances::EIGENVALUE_CEILING).contains(&eta) {
        return Err(Error::NumericalInconsistency(format!(
            "mode efficiency {eta} outside [0, 1] beyond tolerance"
        )));
    }
    Ok(eta.clamp(0.0, 1.0))
}

/// Dark-count probabilities d_k = ⟨vac|Π_k|vac⟩, one per click outcome,
/// in element order.
pub fn dark_counts(povm: &Povm) -> Vec<f64> {
    povm.elements()
        .iter()
        .map(|e| e.matrix()[(0, 0)].re)
        .collect()
}

/// Dark-count rate d = Σ_k d_k N(k) / T for a detector switched on for
/// `duration` seconds.
pub fn dark_count_rate(povm: &Povm, duration: f64) -> Result<f64> {
    if !duration.is_finite() || duration <= 0.0 {
        return Err(Error::InvalidDuration(duration));
    }
    let expected: f64 = povm
        .elements()
        .iter()
        .zip(dark_counts(povm))
        .map(|(e, d)| d * e.clicks() as f64)
        .sum();
    Ok(expected / duration)
}

/// Joint two-photon detection data at separation τ.
#[derive(Debug, Clone, Copy)]
pub struct JointDetection {
    /// ⟨Π⟩ in the normalized two-photon state.
    pub probability: f64,
    /// Expectation before dividing out the normalization.
    pub raw_expectation: f64,
    /// |⟨φ|φ_τ⟩|² of the underlying modes on the grid.
    pub overlap_sq: f64,
}

/// P(0,τ): probability of any click from the photon pair
/// a†[φ] a†[φ_τ] |vac⟩, with the state normalization 1 + |⟨φ|φ_τ⟩|²
/// divided out.
pub fn joint_detection(povm: &Povm, phi: &ModeFunction, tau: f64) -> Result<f64> {
    Ok(joint_detection_full(povm, phi, tau)?.probability)
}

pub fn joint_detection_full(povm: &Povm, phi: &ModeFunction, tau: f64) -> Result<JointDetection> {
    let basis = povm.basis();
    if basis.n_max() < 2 {
        return Err(Error::NoTwoPhotonSector(basis.n_max() as usize));
    }
    let mode_basis = basis.mode_basis();
    let (c, deficit) = mode_basis.project(phi)?;
    if deficit.abs() > tolerances::SPAN_DEFICIT {
        return Err(Error::ModeOutsideSpan(deficit));
    }
    let translated = phi.time_translate(tau);
    let (c_tau, _) = mode_basis.project(&translated)?;
    let overlap_sq = phi.inner_product(&translated)?.norm_sqr();

    let psi = two_photon_vector(basis, &c, &c_tau);
    let raw = (psi.adjoint() * povm.click_sum() * &psi)[(0, 0)].re;
    Ok(JointDetection {
        probability: raw / (1.0 + overlap_sq),
        raw_expectation: raw,
        overlap_sq,
    })
}

/// a†[c] a†[c'] |vac⟩ on the truncated basis.
fn two_photon_vector(
    basis: &FockBasis,
    c: &[Complex64],
    c_tau: &[Complex64],
) -> DVector<Complex64> {
    let m = basis.modes();
    let mut psi = DVector::<Complex64>::zeros(basis.dim());
    let sqrt2 = Complex64::new(std::f64::consts::SQRT_2, 0.0);
    for i in 0..m {
        for j in 0..m {
            let amp = c[i] * c_tau[j];
            if amp.norm_sqr() == 0.0 {
                continue;
            }
            let mut counts = vec![0u32; m];
            counts[i] += 1;
            counts[j] += 1;
            let idx = basis
                .index_of(&counts)
                .expect("two-photon state within cutoff");
            // a_i† a_i† |vac⟩ = √2 |2_i⟩; distinct modes give |1_i 1_j⟩
            psi[idx] += if i == j { amp * sqrt2 } else { amp };
        }
    }
    psi
}

/// Response profile of one mode: the P(0,τ) curve with its 10%/90%
/// crossings.
#[derive(Debug, Clone)]
pub struct ResponseProfile {
    pub mode_index: usize,
    /// Smallest τ with P(0,τ) ≥ 0.1·P(0)².
    pub tau_10: f64,
    /// Smallest τ ≥ τ_10 with P(0,τ) ≥ 0.9·P(0)²; +∞ when never reached.
    pub tau_90: f64,
    /// Response time θ = τ_90 − τ_10.
    pub theta: f64,
    /// P(0) of the scanned mode.
    pub p0: f64,
    /// Whether the sampled curve was non-decreasing along the scan; the
    /// 10→90 reading presumes a rising curve, so a false value flags that
    /// the first-crossing convention was applied to a non-rising curve.
    pub monotone_increasing: bool,
    /// Sampled (τ, P(0,τ)) pairs along the scan.
    pub curve: Vec<(f64, f64)>,
}

impl ResponseProfile {
    /// P(0,τ)/(P(0)·P(0)) at the sampled points, the ratio the response
    /// time is read from.
    pub fn normalized_curve(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let p0_sq = self.p0 * self.p0;
        self.curve.iter().map(move |&(t, p)| (t, p / p0_sq))
    }
}

/// Extracts τ_10, τ_90 and θ from an arbitrary P(0,τ) curve by first
/// crossings along `scan`, refined by bisection between scan points to
/// [`tolerances::RESPONSE_TAU_REL`] relative accuracy.
pub fn response_profile_from_curve<F>(
    mode_index: usize,
    p0: f64,
    scan: &[f64],
    mut curve: F,
) -> Result<ResponseProfile>
where
    F: FnMut(f64) -> Result<f64>,
{
    if scan.len() < 2 || scan.windows(2).any(|w| w[1] <= w[0]) || scan[0] < 0.0 {
        return Err(Error::InvalidWindow(
            "response scan must be strictly increasing and nonnegative".into(),
        ));
    }
    if p0 < tolerances::RESPONSE_P0_MIN {
        return Err(Error::InsensitiveMode(p0));
    }
    let p0_squared = p0 * p0;
    let mut samples = Vec::with_capacity(scan.len());
    for &tau in scan {
        samples.push((tau, curve(tau)?));
    }
    let monotone_increasing = samples
        .windows(2)
        .all(|w| w[1].1 >= w[0].1 - 1e-9 * p0_squared);

    let t10 = 0.1 * p0_squared;
    let t90 = 0.9 * p0_squared;

    let tau_10 = match first_crossing(&samples, t10, 0, &mut curve)? {
        Some(tau) => tau,
        None => {
            // never reaches 10%: no response either way
            return Ok(ResponseProfile {
                mode_index,
                tau_10: f64::INFINITY,
                tau_90: f64::INFINITY,
                theta: f64::INFINITY,
                p0,
                monotone_increasing,
                curve: samples,
            });
        }
    };
    let from = samples.iter().position(|&(t, _)| t >= tau_10).unwrap_or(0);
    let tau_90 = match first_crossing(&samples, t90, from, &mut curve)? {
        Some(tau) => tau.max(tau_10),
        None => f64::INFINITY,
    };

    Ok(ResponseProfile {
        mode_index,
        tau_10,
        tau_90,
        theta: tau_90 - tau_10,
        p0,
        monotone_increasing,
        curve: samples,
    })
}

fn first_crossing<F>(
    samples: &[(f64, f64)],
    threshold: f64,
    from: usize,
    curve: &mut F,
) -> Result<Option<f64>>
where
    F: FnMut(f64) -> Result<f64>,
{
    let hit = samples[from..].iter().position(|&(_, p)| p >= threshold);
    let Some(offset) = hit else {
        return Ok(None);
    };
    let i = from + offset;
    if i == 0 {
        return Ok(Some(samples[0].0));
    }
    let (mut lo, mut hi) = (samples[i - 1].0, samples[i].0);
    while hi - lo > tolerances::RESPONSE_TAU_REL * hi.max(f64::MIN_POSITIVE) {
        let mid = 0.5 * (lo + hi);
        if curve(mid)? >= threshold {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

/// Scans P(0,τ) for one mode of the detector and reads off the response
/// time. `scan` must be strictly increasing, starting at τ ≥ 0.
pub fn response_time(povm: &Povm, phi: &ModeFunction, scan: &[f64]) -> Result<ResponseProfile> {
    response_time_indexed(povm, phi, 0, scan)
}

pub fn response_time_indexed(
    povm: &Povm,
    phi: &ModeFunction,
    mode_index: usize,
    scan: &[f64],
) -> Result<ResponseProfile> {
    let p0 = mode_efficiency(povm, phi)?;
    if p0 < tolerances::RESPONSE_P0_MIN {
        return Err(Error::InsensitiveMode(p0));
    }
    response_profile_from_curve(mode_index, p0, scan, |tau| joint_detection(povm, phi, tau))
}

/// Default response scan: τ = 0 followed by 200 logarithmically spaced
/// points from 1e−3 to 1e3 pulse durations.
pub fn default_tau_scan(pulse_duration: f64) -> Vec<f64> {
    let mut scan = Vec::with_capacity(201);
    scan.push(0.0);
    let (lo, hi) = (1e-3 * pulse_duration, 1e3 * pulse_duration);
    let ratio = (hi / lo).ln();
    for k in 0..200 {
        scan.push(lo * (ratio * k as f64 / 199.0).exp());
    }
    scan
}

/// Total detection rate R = Σ_i 1/θ_i; infinite response times
/// contribute nothing.
pub fn detection_rate(profiles: &[ResponseProfile]) -> f64 {
    profiles
        .iter()
        .map(|p| {
            if p.theta.is_infinite() {
                0.0
            } else {
                1.0 / p.theta
            }
        })
        .sum()
}
