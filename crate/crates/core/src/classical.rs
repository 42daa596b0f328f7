//! Figures of merit carried by the classical mode functions: single-photon
//! bandwidth, outcome entropies, posterior frequency/time distributions,
//! binned entropies, the entropic uncertainty relation, and the
//! dimensionful resolutions Δω and Δt.

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{temporal_density, FockBasis, ModeBasis, ModeFunction, TimeWindow};
use crate::linalg;
use crate::povm::{Povm, PovmElement};
use crate::tolerances;

/// Restriction of a POVM element to the one-photon sector, expressed in
/// the mode-basis ordering: entries ⟨φ_i|Π_k|φ_j⟩.
#[derive(Debug, Clone)]
pub struct SinglePhotonBlock {
    label: String,
    matrix: DMatrix<Complex64>,
}

impl SinglePhotonBlock {
    /// Wraps an M×M one-photon matrix directly (mainly for composing
    /// blocks that do not come from a single element, e.g. the click sum).
    pub fn from_matrix(label: impl Into<String>, matrix: DMatrix<Complex64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                got: matrix.ncols(),
                context: "single-photon block must be square".into(),
            });
        }
        Ok(Self {
            label: label.into(),
            matrix,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn modes(&self) -> usize {
        self.matrix.nrows()
    }
}

/// Extracts the single-photon block of one element.
pub fn single_photon_block(element: &PovmElement, basis: &FockBasis) -> Result<SinglePhotonBlock> {
    if element.dim() != basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.dim(),
            got: element.dim(),
            context: format!("element '{}' vs basis", element.label()),
        });
    }
    block_of_matrix(element.label().to_string(), element.matrix(), basis)
}

pub(crate) fn block_of_matrix(
    label: String,
    matrix: &DMatrix<Complex64>,
    basis: &FockBasis,
) -> Result<SinglePhotonBlock> {
    let indices = basis.single_photon_indices()?;
    let m = indices.len();
    let block = DMatrix::from_fn(m, m, |i, j| matrix[(indices[i], indices[j])]);
    Ok(SinglePhotonBlock {
        label,
        matrix: block,
    })
}

/// Single-photon bandwidth Ω_k^(1) = Tr(Π_k^(1)): the effective size of
/// the one-photon Hilbert space covered by the outcome. Dimensionless.
pub fn bandwidth(block: &SinglePhotonBlock) -> f64 {
    linalg::trace_re(&block.matrix)
}

/// Detector-wide bandwidth Ω^(1) = Σ_k Ω_k^(1) over the click outcomes.
pub fn total_bandwidth(povm: &Povm) -> Result<f64> {
    povm.basis().single_photon_indices()?;
    let mut total = 0.0;
    for element in povm.elements() {
        total += bandwidth(&single_photon_block(element, povm.basis())?);
    }
    Ok(total)
}

/// Diagonal form of a single-photon block: weights w_i^(k) with the
/// eigenmodes as grid functions, sorted by descending weight.
///
/// Each weight is the conditional probability of outcome k given one
/// photon in the matching eigenmode; their sum is the bandwidth.
#[derive(Debug, Clone)]
pub struct EigenmodeDecomposition {
    label: String,
    weights: Vec<f64>,
    eigenmodes: Vec<ModeFunction>,
}

impl EigenmodeDecomposition {
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn eigenmodes(&self) -> &[ModeFunction] {
        &self.eigenmodes
    }

    /// Σ_i w_i^(k) = Ω_k^(1).
    pub fn bandwidth(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Diagonalizes a block over the given mode basis.
pub fn eigenmodes(block: &SinglePhotonBlock, basis: &ModeBasis) -> Result<EigenmodeDecomposition> {
    if block.modes() != basis.len() {
        return Err(Error::DimensionMismatch {
            expected: basis.len(),
            got: block.modes(),
            context: "block size vs mode basis".into(),
        });
    }
    let (weights, vectors) = linalg::eigh_desc(&block.matrix);
    let eigenmodes = (0..basis.len())
        .map(|i| {
            let coeffs: Vec<Complex64> = vectors.column(i).iter().copied().collect();
            basis.synthesize(&coeffs)
        })
        .collect::<Result<_>>()?;
    Ok(EigenmodeDecomposition {
        label: block.label.clone(),
        weights,
        eigenmodes,
    })
}

/// Shannon entropy −Σ p log₂ p in bits of nonnegative masses `values`,
/// normalized by their total. Masses below
/// [`tolerances::ENTROPY_WEIGHT_DROP`] relative to the total are dropped
/// (0·log 0 ≡ 0).
pub(crate) fn entropy_bits(values: &[f64]) -> f64 {
    let total: f64 = values.iter().filter(|v| **v > 0.0).sum();
    if total <= 0.0 {
        return 0.0;
    }
    let floor = tolerances::ENTROPY_WEIGHT_DROP * total;
    let mut h = 0.0;
    for &v in values {
        if v > floor {
            let p = v / total;
            h -= p * p.log2();
        }
    }
    h
}

/// Input-independent Shannon entropy H^(k) of ρ_k = Π_k^(1)/Tr, in bits.
pub fn outcome_shannon_entropy(block: &SinglePhotonBlock) -> Result<f64> {
    let trace = bandwidth(block);
    if trace <= tolerances::ZERO_TRACE {
        return Err(Error::ZeroTraceElement(block.label.clone()));
    }
    Ok(entropy_bits(&linalg::eigvalsh(&block.matrix)))
}

/// Collision (order-2 Rényi) entropy −log₂ Pur(Π_k^(1)) in bits.
pub fn outcome_collision_entropy(block: &SinglePhotonBlock) -> Result<f64> {
    let trace = bandwidth(block);
    if trace <= tolerances::ZERO_TRACE {
        return Err(Error::ZeroTraceElement(block.label.clone()));
    }
    let trace_sq: f64 = block.matrix.iter().map(|z| z.norm_sqr()).sum();
    Ok(-(trace_sq / (trace * trace)).log2())
}

/// A density sampled at the centers of a uniform grid of cells.
#[derive(Debug, Clone)]
pub struct SampledDistribution {
    start: f64,
    spacing: f64,
    values: Vec<f64>,
}

impl SampledDistribution {
    pub fn new(start: f64, spacing: f64, values: Vec<f64>) -> Result<Self> {
        if !spacing.is_finite() || spacing <= 0.0 {
            return Err(Error::InvalidWindow(format!(
                "non-positive sample spacing {spacing}"
            )));
        }
        Ok(Self {
            start,
            spacing,
            values,
        })
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Center of cell g.
    pub fn point(&self, g: usize) -> f64 {
        self.start + (g as f64 + 0.5) * self.spacing
    }

    /// Riemann mass Σ_g v_g · spacing.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.spacing
    }
}

/// Posterior frequency distribution Pr(ω|k) = Σ_i Pr(i|k)|φ_i^(k)(ω)|²
/// under the flat-prior convention Pr(i|k) = w_i^(k)/Ω_k^(1).
pub fn posterior_frequency(decomp: &EigenmodeDecomposition) -> Result<SampledDistribution> {
    let total = decomp.bandwidth();
    if total <= tolerances::ZERO_TRACE {
        return Err(Error::ZeroBandwidth(decomp.label.clone()));
    }
    let grid = *decomp.eigenmodes[0].grid();
    let mut values = vec![0.0; grid.len()];
    for (w, mode) in decomp.weights.iter().zip(&decomp.eigenmodes) {
        if *w <= tolerances::ENTROPY_WEIGHT_DROP * total {
            continue;
        }
        let p = w / total;
        for (out, a) in values.iter_mut().zip(mode.amplitudes()) {
            *out += p * a.norm_sqr();
        }
    }
    SampledDistribution::new(grid.omega_min(), grid.spacing(), values)
}

/// Posterior detection-time distribution Pr(t|k) = Σ_i Pr(i|k) P_i(t)
/// with P_i the temporal density of eigenmode i, sampled on `window`.
pub fn posterior_time(
    decomp: &EigenmodeDecomposition,
    window: TimeWindow,
) -> Result<SampledDistribution> {
    let total = decomp.bandwidth();
    if total <= tolerances::ZERO_TRACE {
        return Err(Error::ZeroBandwidth(decomp.label.clone()));
    }
    let mut values = vec![0.0; window.len()];
    for (w, mode) in decomp.weights.iter().zip(&decomp.eigenmodes) {
        if *w <= tolerances::ENTROPY_WEIGHT_DROP * total {
            continue;
        }
        let p = w / total;
        let density = temporal_density(mode, window)?;
        for (out, v) in values.iter_mut().zip(density.values()) {
            *out += p * v;
        }
    }
    SampledDistribution::new(window.t_min(), window.spacing(), values)
}

/// Probabilities over equal-sized bins of width δ anchored at `origin`;
/// bin j covers [origin + jδ, origin + (j+1)δ).
#[derive(Debug, Clone)]
pub struct BinnedDistribution {
    bin_size: f64,
    origin: f64,
    first_index: i64,
    probabilities: Vec<f64>,
}

impl BinnedDistribution {
    pub fn bin_size(&self) -> f64 {
        self.bin_size
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    /// Total accumulated mass (1 for a normalized, fully covered density).
    pub fn total_mass(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    /// Iterates (bin index, bin start, probability).
    pub fn iter(&self) -> impl Iterator<Item = (i64, f64, f64)> + '_ {
        self.probabilities.iter().enumerate().map(move |(i, &p)| {
            let j = self.first_index + i as i64;
            (j, self.origin + j as f64 * self.bin_size, p)
        })
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }
}

/// Accumulates a sampled density into bins of width `bin_size` by
/// grid-cell accumulation (each cell's mass lands in the bin containing
/// its center). Mass is conserved exactly.
pub fn bin(dist: &SampledDistribution, bin_size: f64, origin: f64) -> Result<BinnedDistribution> {
    if bin_size < 2.0 * dist.spacing {
        return Err(Error::BinTooFine {
            bin: bin_size,
            spacing: dist.spacing,
        });
    }
    let mut masses: HashMap<i64, f64> = HashMap::new();
    for (g, &v) in dist.values.iter().enumerate() {
        if v == 0.0 {
            continue;
        }
        let j = ((dist.point(g) - origin) / bin_size).floor() as i64;
        *masses.entry(j).or_insert(0.0) += v * dist.spacing;
    }
    let first_index = masses.keys().copied().min().unwrap_or(0);
    let last_index = masses.keys().copied().max().unwrap_or(0);
    let probabilities = (first_index..=last_index)
        .map(|j| masses.get(&j).copied().unwrap_or(0.0))
        .collect();
    Ok(BinnedDistribution {
        bin_size,
        origin,
        first_index,
        probabilities,
    })
}

/// Shannon entropy of a binned distribution, in bits. The masses are
/// normalized by their total first, so a window that clips a small tail
/// yields the entropy of the conditional distribution.
pub fn binned_entropy(binned: &BinnedDistribution) -> f64 {
    entropy_bits(&binned.probabilities)
}

/// Per-outcome posterior data reused across bin sizes.
#[derive(Debug, Clone)]
pub struct OutcomePosteriors {
    pub label: String,
    pub bandwidth: f64,
    pub frequency: SampledDistribution,
    pub time: SampledDistribution,
}

/// Computes the posteriors of every click outcome with nonzero bandwidth.
pub fn outcome_posteriors(povm: &Povm, window: TimeWindow) -> Result<Vec<OutcomePosteriors>> {
    let mode_basis = povm.basis().mode_basis();
    let mut out = Vec::new();
    for element in povm.elements() {
        let block = single_photon_block(element, povm.basis())?;
        let omega_k = bandwidth(&block);
        if omega_k <= tolerances::ZERO_TRACE {
            continue;
        }
        let decomp = eigenmodes(&block, mode_basis)?;
        out.push(OutcomePosteriors {
            label: element.label().to_string(),
            bandwidth: omega_k,
            frequency: posterior_frequency(&decomp)?,
            time: posterior_time(&decomp, window)?,
        });
    }
    Ok(out)
}

/// Per-outcome binned entropies at fixed bin sizes.
#[derive(Debug, Clone)]
pub struct OutcomeEntropies {
    pub label: String,
    pub bandwidth: f64,
    pub h_omega: f64,
    pub h_t: f64,
}

fn entropies_at(
    posteriors: &[OutcomePosteriors],
    delta_omega: f64,
    delta_t: f64,
) -> Result<Vec<OutcomeEntropies>> {
    posteriors
        .iter()
        .map(|p| {
            let freq = bin(&p.frequency, delta_omega, p.frequency.start())?;
            let time = bin(&p.time, delta_t, p.time.start())?;
            Ok(OutcomeEntropies {
                label: p.label.clone(),
                bandwidth: p.bandwidth,
                h_omega: binned_entropy(&freq),
                h_t: binned_entropy(&time),
            })
        })
        .collect()
}

/// Binned frequency/time entropies of every outcome with nonzero
/// bandwidth, at the given bin sizes. Bin origins default to the grid
/// start and window start.
pub fn outcome_binned_entropies(
    povm: &Povm,
    delta_omega: f64,
    delta_t: f64,
    window: TimeWindow,
) -> Result<Vec<OutcomeEntropies>> {
    let posteriors = outcome_posteriors(povm, window)?;
    entropies_at(&posteriors, delta_omega, delta_t)
}

fn weighted_average(entropies: &[OutcomeEntropies]) -> Result<(f64, f64)> {
    let total: f64 = entropies.iter().map(|e| e.bandwidth).sum();
    if total <= tolerances::ZERO_TRACE {
        return Err(Error::ZeroBandwidth("detector-wide average".into()));
    }
    let h_omega = entropies
        .iter()
        .map(|e| e.bandwidth / total * e.h_omega)
        .sum();
    let h_t = entropies.iter().map(|e| e.bandwidth / total * e.h_t).sum();
    Ok((h_omega, h_t))
}

/// Bandwidth-weighted averages (H̄_ω, H̄_t) = Σ_k (Ω_k/Ω) H^(k) over the
/// click outcomes.
pub fn averaged_entropies(
    povm: &Povm,
    delta_omega: f64,
    delta_t: f64,
    window: TimeWindow,
) -> Result<(f64, f64)> {
    let entropies = outcome_binned_entropies(povm, delta_omega, delta_t, window)?;
    weighted_average(&entropies)
}

/// Result of checking the binned entropic uncertainty relation.
#[derive(Debug, Clone, Copy)]
pub struct UncertaintyCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
}

/// H_ω + H_t > log₂ e − 1 − log₂(δω δt / 2π), with numerical slack 1e−9.
pub fn uncertainty_check(
    h_omega: f64,
    h_t: f64,
    delta_omega: f64,
    delta_t: f64,
) -> UncertaintyCheck {
    let lhs = h_omega + h_t;
    let rhs = std::f64::consts::E.log2()
        - 1.0
        - (delta_omega * delta_t / (2.0 * std::f64::consts::PI)).log2();
    UncertaintyCheck {
        lhs,
        rhs,
        satisfied: lhs > rhs - 1e-9,
    }
}

/// Dimensionful frequency/timing resolutions at matched entropy targets.
#[derive(Debug, Clone, Copy)]
pub struct ResolutionResult {
    /// Frequency bin size δω the entropy target was met at (rad/s).
    pub delta_omega_bin: f64,
    /// Time bin size δt the entropy target was met at (s).
    pub delta_t_bin: f64,
    /// Achieved average frequency entropy H̄_ω (bits).
    pub h_omega: f64,
    /// Achieved average time entropy H̄_t (bits).
    pub h_t: f64,
    /// Δω = 2^{H̄_ω} δω (rad/s).
    pub delta_omega: f64,
    /// Δt = 2^{H̄_t} δt (s).
    pub delta_t: f64,
    /// Δω·Δt, bounded below by eπ ≈ 8.54.
    pub product: f64,
}

/// Searches (by bisection on log₂ δ) for bin sizes where the averaged
/// entropies equal `target_bits` within 0.01 bits, and forms the
/// bin-size-independent resolutions Δω = 2^{H̄_ω} δω, Δt = 2^{H̄_t} δt.
pub fn resolutions(povm: &Povm, target_bits: f64, window: TimeWindow) -> Result<ResolutionResult> {
    let posteriors = outcome_posteriors(povm, window)?;
    resolutions_from_posteriors(&posteriors, target_bits, window)
}

/// Same as [`resolutions`], reusing posteriors already in hand.
pub fn resolutions_from_posteriors(
    posteriors: &[OutcomePosteriors],
    target_bits: f64,
    window: TimeWindow,
) -> Result<ResolutionResult> {
    if !target_bits.is_finite() || target_bits <= 0.0 {
        return Err(Error::ResolutionUnresolvable(format!(
            "target of {target_bits} bits is not positive"
        )));
    }
    if posteriors.is_empty() {
        return Err(Error::ZeroBandwidth("no outcome has bandwidth".into()));
    }

    let freq_spacing = posteriors[0].frequency.spacing();
    let freq_span = posteriors[0].frequency.values().len() as f64 * freq_spacing;
    let time_spacing = posteriors[0].time.spacing();
    let time_span = window.t_max() - window.t_min();

    let average_of = |delta: f64, time_domain: bool| -> Result<f64> {
        let mut h = 0.0;
        let mut total = 0.0;
        for p in posteriors {
            let dist = if time_domain { &p.time } else { &p.frequency };
            let b = bin(dist, delta, dist.start())?;
            h += p.bandwidth * binned_entropy(&b);
            total += p.bandwidth;
        }
        Ok(h / total)
    };

    let (delta_omega_bin, h_omega) = bisect_bin_size(
        &|d| average_of(d, false),
        2.0 * freq_spacing,
        freq_span,
        target_bits,
        "frequency",
    )?;
    let (delta_t_bin, h_t) = bisect_bin_size(
        &|d| average_of(d, true),
        2.0 * time_spacing,
        time_span,
        target_bits,
        "time",
    )?;

    let delta_omega = h_omega.exp2() * delta_omega_bin;
    let delta_t = h_t.exp2() * delta_t_bin;
    Ok(ResolutionResult {
        delta_omega_bin,
        delta_t_bin,
        h_omega,
        h_t,
        delta_omega,
        delta_t,
        product: delta_omega * delta_t,
    })
}

/// Bisects log₂ δ over [δ_min, δ_max] for H(δ) = target. H is monotone
/// non-increasing in δ up to discretization steps, so the best candidate
/// seen is kept rather than the final midpoint.
fn bisect_bin_size(
    h_of: &dyn Fn(f64) -> Result<f64>,
    delta_min: f64,
    delta_max: f64,
    target: f64,
    domain: &str,
) -> Result<(f64, f64)> {
    let h_fine = h_of(delta_min)?;
    if h_fine < target - tolerances::RESOLUTION_BITS {
        return Err(Error::ResolutionUnresolvable(format!(
            "{domain}: finest bin {delta_min:.6e} reaches only {h_fine:.3} of {target} bits"
        )));
    }
    let mut lo = delta_min.log2();
    let mut hi = delta_max.log2();
    let mut best = (delta_min, h_fine);
    for _ in 0..tolerances::RESOLUTION_MAX_ITERS {
        let mid = 0.5 * (lo + hi);
        let delta = mid.exp2();
        let h = h_of(delta)?;
        if (h - target).abs() < (best.1 - target).abs() {
            best = (delta, h);
        }
        if (h - target).abs() <= 0.5 * tolerances::RESOLUTION_BITS {
            break;
        }
        if h > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if (best.1 - target).abs() > tolerances::RESOLUTION_BITS {
        return Err(Error::ResolutionUnresolvable(format!(
            "{domain}: closest achievable entropy {:.4} bits misses target {target} (grid too coarse for the requested precision)",
            best.1
        )));
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::enumerate_fock;
    use crate::povm::Povm;
    use crate::testkit;
    use approx::assert_abs_diff_eq;

    fn projector_element(
        label: &str,
        basis: &FockBasis,
        state_idx: usize,
        scale: f64,
    ) -> PovmElement {
        let d = basis.dim();
        let mut m = DMatrix::<Complex64>::zeros(d, d);
        m[(state_idx, state_idx)] = Complex64::new(scale, 0.0);
        PovmElement::new(label, 1, m).unwrap()
    }

    #[test]
    fn block_of_single_photon_projector() {
        let basis = testkit::fock(2, 2);
        let idx = basis.index_of_number_state(1, 1).unwrap();
        let element = projector_element("p", &basis, idx, 1.0);
        let block = single_photon_block(&element, &basis).unwrap();
        assert_eq!(block.modes(), 2);
        assert_abs_diff_eq!(block.matrix()[(1, 1)].re, 1.0, epsilon = 1e-14);
        assert!(block.matrix()[(0, 0)].norm() < 1e-14);
        assert!(block.matrix()[(0, 1)].norm() < 1e-14);
    }

    #[test]
    fn block_of_identity_is_identity() {
        let basis = testkit::fock(3, 2);
        let d = basis.dim();
        let element = PovmElement::new("i", 1, DMatrix::identity(d, d)).unwrap();
        let block = single_photon_block(&element, &basis).unwrap();
        assert!((block.matrix() - DMatrix::<Complex64>::identity(3, 3)).norm() < 1e-14);
        assert_abs_diff_eq!(bandwidth(&block), 3.0, epsilon = 1e-14);
    }

    #[test]
    fn vacuum_term_does_not_touch_the_block() {
        // η |1_0⟩⟨1_0| plus a dark-count vacuum term
        let basis = testkit::fock(2, 1);
        let one = basis.index_of_number_state(0, 1).unwrap();
        let d = basis.dim();
        let mut m = DMatrix::<Complex64>::zeros(d, d);
        m[(one, one)] = Complex64::new(0.7, 0.0);
        m[(0, 0)] = Complex64::new(0.02, 0.0);
        let element = PovmElement::new("noisy", 1, m).unwrap();
        let block = single_photon_block(&element, &basis).unwrap();
        assert_abs_diff_eq!(block.matrix()[(0, 0)].re, 0.7, epsilon = 1e-14);
        assert_abs_diff_eq!(bandwidth(&block), 0.7, epsilon = 1e-14);
    }

    #[test]
    fn no_single_photon_sector_is_an_error() {
        let basis = testkit::fock(2, 0);
        let element = PovmElement::new("x", 1, DMatrix::identity(1, 1)).unwrap();
        assert!(matches!(
            single_photon_block(&element, &basis),
            Err(Error::NoSinglePhotonSector)
        ));
    }

    #[test]
    fn bandwidth_of_weighted_pixel_and_trace_additivity() {
        let basis = testkit::fock(2, 1);
        let i0 = basis.index_of_number_state(0, 1).unwrap();
        let i1 = basis.index_of_number_state(1, 1).unwrap();
        let d = basis.dim();
        let mut m = DMatrix::<Complex64>::zeros(d, d);
        m[(i0, i0)] = Complex64::new(0.9, 0.0);
        m[(i1, i1)] = Complex64::new(0.4, 0.0);
        let element = PovmElement::new("two", 1, m).unwrap();
        let block = single_photon_block(&element, &basis).unwrap();
        assert_abs_diff_eq!(bandwidth(&block), 1.3, epsilon = 1e-14);

        // single-wavelength pixel with detection probability p
        let pixel = projector_element("pix", &basis, i0, 0.35);
        let pixel_block = single_photon_block(&pixel, &basis).unwrap();
        assert_abs_diff_eq!(bandwidth(&pixel_block), 0.35, epsilon = 1e-14);
    }

    #[test]
    fn total_bandwidth_of_empty_povm_is_zero() {
        let basis = testkit::fock(2, 1);
        let povm = Povm::new(basis, vec![]).unwrap();
        assert_abs_diff_eq!(total_bandwidth(&povm).unwrap(), 0.0);
    }

    #[test]
    fn eigenmodes_of_diagonal_block_are_basis_modes() {
        let basis = testkit::gaussian_basis(2);
        let block = SinglePhotonBlock::from_matrix(
            "d",
            DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
                Complex64::new(0.5, 0.0),
                Complex64::new(0.2, 0.0),
            ])),
        )
        .unwrap();
        let decomp = eigenmodes(&block, &basis).unwrap();
        assert_abs_diff_eq!(decomp.weights()[0], 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(decomp.weights()[1], 0.2, epsilon = 1e-14);
        // eigenmode 0 is basis mode 0 up to a phase
        let overlap = decomp.eigenmodes()[0].inner_product(basis.mode(0)).unwrap();
        assert_abs_diff_eq!(overlap.norm(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn rank_one_block_recovers_its_mode() {
        let basis = testkit::gaussian_basis(2);
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        let c = [
            Complex64::new(inv_sqrt2, 0.0),
            Complex64::new(inv_sqrt2, 0.0),
        ];
        let m = DMatrix::from_fn(2, 2, |i, j| c[i] * c[j].conj() * 0.5);
        let block = SinglePhotonBlock::from_matrix("plus", m).unwrap();
        let decomp = eigenmodes(&block, &basis).unwrap();
        assert_abs_diff_eq!(decomp.weights()[0], 0.5, epsilon = 1e-12);
        assert!(decomp.weights()[1].abs() < 1e-12);
        let plus = basis.synthesize(&c).unwrap();
        let overlap = decomp.eigenmodes()[0].inner_product(&plus).unwrap();
        assert_abs_diff_eq!(overlap.norm(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn weights_sum_to_bandwidth_for_random_psd_blocks() {
        let basis = testkit::gaussian_basis(4);
        for seed in 0..5u64 {
            let raw = DMatrix::from_fn(4, 4, |i, j| {
                let x = ((i as u64 * 31 + j as u64 * 17 + seed * 101) % 13) as f64 / 13.0;
                let y = ((i as u64 * 7 + j as u64 * 41 + seed * 59) % 11) as f64 / 11.0 - 0.5;
                Complex64::new(x, y)
            });
            let psd = &raw * raw.adjoint() * Complex64::new(0.05, 0.0);
            let block = SinglePhotonBlock::from_matrix("rand", psd).unwrap();
            let decomp = eigenmodes(&block, &basis).unwrap();
            assert_abs_diff_eq!(decomp.bandwidth(), bandwidth(&block), epsilon = 1e-10);
            for w in decomp.weights() {
                assert!(*w > -1e-9);
            }
        }
    }

    #[test]
    fn shannon_entropy_examples() {
        let rank1 = SinglePhotonBlock::from_matrix(
            "r1",
            DMatrix::from_fn(3, 3, |i, j| {
                if i == 0 && j == 0 {
                    Complex64::new(0.4, 0.0)
                } else {
                    Complex64::default()
                }
            }),
        )
        .unwrap();
        assert_abs_diff_eq!(
            outcome_shannon_entropy(&rank1).unwrap(),
            0.0,
            epsilon = 1e-12
        );

        let flat2 = SinglePhotonBlock::from_matrix(
            "f2",
            DMatrix::<Complex64>::identity(2, 2) * Complex64::new(0.3, 0.0),
        )
        .unwrap();
        assert_abs_diff_eq!(
            outcome_shannon_entropy(&flat2).unwrap(),
            1.0,
            epsilon = 1e-12
        );

        let weights = SinglePhotonBlock::from_matrix(
            "w",
            DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
                Complex64::new(0.5, 0.0),
                Complex64::new(0.25, 0.0),
                Complex64::new(0.25, 0.0),
            ])),
        )
        .unwrap();
        assert_abs_diff_eq!(
            outcome_shannon_entropy(&weights).unwrap(),
            1.5,
            epsilon = 1e-12
        );
    }

    #[test]
    fn collision_entropy_examples_and_renyi_order() {
        let flat4 = SinglePhotonBlock::from_matrix(
            "f4",
            DMatrix::<Complex64>::identity(4, 4) * Complex64::new(0.9, 0.0),
        )
        .unwrap();
        assert_abs_diff_eq!(
            outcome_collision_entropy(&flat4).unwrap(),
            2.0,
            epsilon = 1e-12
        );

        // collision entropy never exceeds the Shannon entropy
        for seed in 0..6u64 {
            let raw = DMatrix::from_fn(5, 5, |i, j| {
                Complex64::new(
                    ((i as u64 * 13 + j as u64 * 29 + seed * 37) % 17) as f64 / 17.0,
                    ((i as u64 * 3 + j as u64 * 23 + seed * 7) % 19) as f64 / 19.0 - 0.5,
                )
            });
            let block = SinglePhotonBlock::from_matrix("r", &raw * raw.adjoint()).unwrap();
            let shannon = outcome_shannon_entropy(&block).unwrap();
            let collision = outcome_collision_entropy(&block).unwrap();
            assert!(collision <= shannon + 1e-9, "{collision} > {shannon}");
        }
    }

    #[test]
    fn zero_trace_block_is_rejected() {
        let zero = SinglePhotonBlock::from_matrix("z", DMatrix::<Complex64>::zeros(2, 2)).unwrap();
        assert!(matches!(
            outcome_shannon_entropy(&zero),
            Err(Error::ZeroTraceElement(_))
        ));
        assert!(matches!(
            outcome_collision_entropy(&zero),
            Err(Error::ZeroTraceElement(_))
        ));
    }

    #[test]
    fn posterior_frequency_of_single_eigenmode_is_its_intensity() {
        let basis = testkit::gaussian_basis(1);
        let block = SinglePhotonBlock::from_matrix(
            "g",
            DMatrix::from_element(1, 1, Complex64::new(0.8, 0.0)),
        )
        .unwrap();
        let decomp = eigenmodes(&block, &basis).unwrap();
        let dist = posterior_frequency(&decomp).unwrap();
        assert_abs_diff_eq!(dist.integral(), 1.0, epsilon = 1e-6);
        for (v, a) in dist.values().iter().zip(basis.mode(0).amplitudes()) {
            assert_abs_diff_eq!(*v, a.norm_sqr(), epsilon = 1e-10);
        }
    }

    #[test]
    fn posterior_frequency_mixes_disjoint_spectra_evenly() {
        let grid = testkit::grid();
        let mut a = vec![Complex64::default(); grid.len()];
        let mut b = vec![Complex64::default(); grid.len()];
        a[50..60].fill(Complex64::new(1.0, 0.0));
        b[300..310].fill(Complex64::new(1.0, 0.0));
        let modes = vec![
            ModeFunction::from_samples(grid, a)
                .unwrap()
                .normalized()
                .unwrap(),
            ModeFunction::from_samples(grid, b)
                .unwrap()
                .normalized()
                .unwrap(),
        ];
        let basis = ModeBasis::new(modes).unwrap();
        let block = SinglePhotonBlock::from_matrix(
            "even",
            DMatrix::<Complex64>::identity(2, 2) * Complex64::new(0.5, 0.0),
        )
        .unwrap();
        let decomp = eigenmodes(&block, &basis).unwrap();
        let dist = posterior_frequency(&decomp).unwrap();
        // each support carries half the probability
        let mass_a: f64 = dist.values()[50..60].iter().sum::<f64>() * dist.spacing();
        let mass_b: f64 = dist.values()[300..310].iter().sum::<f64>() * dist.spacing();
        assert_abs_diff_eq!(mass_a, 0.5, epsilon = 1e-10);
        assert_abs_diff_eq!(mass_b, 0.5, epsilon = 1e-10);
    }

    #[test]
    fn posterior_time_of_gaussian_mode_is_gaussian() {
        let basis = testkit::gaussian_basis(1);
        let block = SinglePhotonBlock::from_matrix(
            "g",
            DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0)),
        )
        .unwrap();
        let decomp = eigenmodes(&block, &basis).unwrap();
        let window = TimeWindow::new(-8.0, 8.0, 1600).unwrap();
        let dist = posterior_time(&decomp, window).unwrap();
        assert!(dist.integral() >= 0.999);
        // temporal std should be 1/(2σ) = 0.5
        let mean: f64 = (0..dist.values().len())
            .map(|g| dist.point(g) * dist.values()[g] * dist.spacing())
            .sum();
        let var: f64 = (0..dist.values().len())
            .map(|g| (dist.point(g) - mean).powi(2) * dist.values()[g] * dist.spacing())
            .sum();
        assert_abs_diff_eq!(var.sqrt(), 0.5, epsilon = 1e-3);
    }

    #[test]
    fn zero_bandwidth_posterior_is_an_error() {
        let basis = testkit::gaussian_basis(1);
        let block = SinglePhotonBlock::from_matrix("z", DMatrix::<Complex64>::zeros(1, 1)).unwrap();
        let decomp = eigenmodes(&block, &basis).unwrap();
        assert!(matches!(
            posterior_frequency(&decomp),
            Err(Error::ZeroBandwidth(_))
        ));
    }

    #[test]
    fn binning_uniform_density_over_four_bins() {
        let dist = SampledDistribution::new(0.0, 0.25, vec![0.25; 16]).unwrap();
        // mass 1 spread over [0, 4); four bins of width 1
        let binned = bin(&dist, 1.0, 0.0).unwrap();
        assert_eq!(binned.probabilities().len(), 4);
        for (_, _, p) in binned.iter() {
            assert_abs_diff_eq!(p, 0.25, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(binned_entropy(&binned), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn binning_point_mass_lands_in_one_bin() {
        let mut values = vec![0.0; 64];
        values[20] = 8.0;
        let dist = SampledDistribution::new(0.0, 0.125, values).unwrap();
        let binned = bin(&dist, 4.0, 0.0).unwrap();
        assert_eq!(binned.probabilities().len(), 1);
        assert_abs_diff_eq!(binned.total_mass(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(binned_entropy(&binned), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn binning_conserves_mass_for_arbitrary_bin_sizes() {
        let values: Vec<f64> = (0..257).map(|g| ((g as f64) * 0.07).sin().abs()).collect();
        let dist = SampledDistribution::new(-3.0, 0.05, values).unwrap();
        let total = dist.integral();
        for delta in [0.11, 0.3, 1.7, 4.0] {
            let binned = bin(&dist, delta, -3.0).unwrap();
            assert_abs_diff_eq!(binned.total_mass(), total, epsilon = 1e-12);
        }
    }

    #[test]
    fn bin_too_fine_is_rejected() {
        let dist = SampledDistribution::new(0.0, 0.1, vec![1.0; 10]).unwrap();
        assert!(matches!(
            bin(&dist, 0.15, 0.0),
            Err(Error::BinTooFine { .. })
        ));
    }

    #[test]
    fn halving_bins_gains_at_most_one_bit() {
        let values: Vec<f64> = (0..400)
            .map(|g| {
                (-((g as f64 - 170.0) / 60.0).powi(2)).exp() + 0.3 * ((g as f64) * 0.11).cos().abs()
            })
            .collect();
        let dist = SampledDistribution::new(0.0, 0.04, values).unwrap();
        let mut delta = 3.2;
        let mut prev = binned_entropy(&bin(&dist, delta, 0.0).unwrap());
        while delta / 2.0 >= 2.0 * dist.spacing() {
            delta /= 2.0;
            let h = binned_entropy(&bin(&dist, delta, 0.0).unwrap());
            assert!(h >= prev - 1e-12, "refinement decreased entropy");
            assert!(h <= prev + 1.0 + 1e-9, "refinement gained more than 1 bit");
            prev = h;
        }
    }

    #[test]
    fn averaged_entropies_weight_by_bandwidth() {
        let entropies = vec![
            OutcomeEntropies {
                label: "a".into(),
                bandwidth: 0.5,
                h_omega: 1.0,
                h_t: 2.0,
            },
            OutcomeEntropies {
                label: "b".into(),
                bandwidth: 0.5,
                h_omega: 3.0,
                h_t: 4.0,
            },
        ];
        let (h_omega, h_t) = weighted_average(&entropies).unwrap();
        assert_abs_diff_eq!(h_omega, 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(h_t, 3.0, epsilon = 1e-14);
    }

    #[test]
    fn uncertainty_check_constant_and_scaling() {
        let tau = 2.0 * std::f64::consts::PI;
        let check = uncertainty_check(1.0, 1.0, tau, 1.0);
        assert_abs_diff_eq!(check.rhs, std::f64::consts::E.log2() - 1.0, epsilon = 1e-12);
        assert!((check.rhs - 0.4427).abs() < 1e-4);

        let doubled = uncertainty_check(1.0, 1.0, 2.0 * tau, 2.0);
        assert_abs_diff_eq!(check.rhs - doubled.rhs, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn gaussian_outcome_satisfies_uncertainty_with_small_margin() {
        let basis = testkit::gaussian_basis(1);
        let fock = enumerate_fock(basis, 1).unwrap();
        let idx = fock.index_of_number_state(0, 1).unwrap();
        let element = projector_element("g", &fock, idx, 1.0);
        let povm = Povm::new(fock, vec![element]).unwrap();
        let window = TimeWindow::new(-8.0, 8.0, 2048).unwrap();
        let delta_omega = 0.25;
        let delta_t = 0.125;
        let entropies = outcome_binned_entropies(&povm, delta_omega, delta_t, window).unwrap();
        assert_eq!(entropies.len(), 1);
        let check = uncertainty_check(entropies[0].h_omega, entropies[0].h_t, delta_omega, delta_t);
        assert!(check.satisfied);
        // minimum-uncertainty mode with fine bins: small positive margin
        let margin = check.lhs - check.rhs;
        assert!(margin > 0.0 && margin < 0.2, "margin {margin}");
    }

    #[test]
    fn posteriors_invariant_under_basis_rotation() {
        // rotate a 2-mode basis by a unitary and conjugate the block;
        // the posteriors must not move
        let basis = testkit::gaussian_basis(2);
        let theta: f64 = 0.6;
        let phase = Complex64::from_polar(1.0, 0.9);
        let u = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(theta.cos(), 0.0),
                -Complex64::new(theta.sin(), 0.0) * phase.conj(),
                Complex64::new(theta.sin(), 0.0),
                Complex64::new(theta.cos(), 0.0) * phase.conj(),
            ],
        );
        let rotated_modes: Vec<ModeFunction> = (0..2)
            .map(|i| {
                let coeffs: Vec<Complex64> = (0..2).map(|j| u[(j, i)]).collect();
                basis.synthesize(&coeffs).unwrap()
            })
            .collect();
        let rotated = ModeBasis::new(rotated_modes).unwrap();

        let block_m = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(0.7, 0.0),
                Complex64::new(0.1, 0.2),
                Complex64::new(0.1, -0.2),
                Complex64::new(0.4, 0.0),
            ],
        );
        let block = SinglePhotonBlock::from_matrix("b", block_m.clone()).unwrap();
        let conjugated = SinglePhotonBlock::from_matrix("b'", u.adjoint() * block_m * &u).unwrap();

        let d1 = eigenmodes(&block, &basis).unwrap();
        let d2 = eigenmodes(&conjugated, &rotated).unwrap();
        assert_abs_diff_eq!(d1.bandwidth(), d2.bandwidth(), epsilon = 1e-12);

        let p1 = posterior_frequency(&d1).unwrap();
        let p2 = posterior_frequency(&d2).unwrap();
        for (a, b) in p1.values().iter().zip(p2.values()) {
            assert_abs_diff_eq!(*a, *b, epsilon = 1e-9);
        }

        let window = TimeWindow::new(-6.0, 6.0, 512).unwrap();
        let t1 = posterior_time(&d1, window).unwrap();
        let t2 = posterior_time(&d2, window).unwrap();
        for (a, b) in t1.values().iter().zip(t2.values()) {
            assert_abs_diff_eq!(*a, *b, epsilon = 1e-9);
        }
    }

    #[test]
    fn resolution_target_doubling_moves_delta_omega_weakly() {
        // fine grids so that 8 bits stay reachable in both domains
        let grid = crate::hilbert::FrequencyGrid::new(0.0, 16.0, 8192).unwrap();
        let basis = testkit::gaussian_basis_on(grid, 1);
        let fock = enumerate_fock(basis, 1).unwrap();
        let idx = fock.index_of_number_state(0, 1).unwrap();
        let element = projector_element("g", &fock, idx, 1.0);
        let povm = Povm::new(fock, vec![element]).unwrap();
        let window = TimeWindow::new(-6.0, 6.0, 8192).unwrap();
        let r4 = resolutions(&povm, 4.0, window).unwrap();
        let r8 = resolutions(&povm, 8.0, window).unwrap();
        let rel = (r8.delta_omega - r4.delta_omega).abs() / r4.delta_omega;
        assert!(rel < 0.10, "Δω moved by {rel:.3} when the target doubled");
        let rel_t = (r8.delta_t - r4.delta_t).abs() / r4.delta_t;
        assert!(rel_t < 0.10, "Δt moved by {rel_t:.3} when the target doubled");
    }
}
