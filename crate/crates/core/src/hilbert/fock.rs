//! Occupation-vector enumeration and ladder-operator matrices.

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::ModeBasis;
use crate::error::{Error, Result};
use crate::tolerances;

/// Photons per mode, Σ_i n_i bounded by the owning basis cutoff.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OccupationVector(pub Vec<u32>);

impl OccupationVector {
    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn counts(&self) -> &[u32] {
        &self.0
    }
}

impl std::fmt::Display for OccupationVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "|")?;
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, "⟩")
    }
}

/// Which ladder operator to materialize.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ladder {
    Raising,
    Lowering,
}

/// Multimode Fock basis truncated by total photon number.
///
/// States are ordered graded-lexicographically: ascending total photon
/// number first, then ascending lexicographic order of the counts.
/// State 0 is always the vacuum.
#[derive(Debug, Clone)]
pub struct FockBasis {
    mode_basis: ModeBasis,
    n_max: u32,
    states: Vec<OccupationVector>,
    index: HashMap<Vec<u32>, usize>,
}

/// Number of occupation vectors over `modes` modes with total ≤ `n_max`,
/// i.e. C(modes + n_max, modes). Saturates at `usize::MAX` on overflow.
pub fn fock_dimension(modes: usize, n_max: u32) -> usize {
    let mut result: u128 = 1;
    let n = modes as u128 + n_max as u128;
    let k = (modes as u128).min(n_max as u128);
    for i in 0..k {
        result = match result.checked_mul(n - i) {
            Some(v) => v / (i + 1),
            None => return usize::MAX,
        };
    }
    usize::try_from(result).unwrap_or(usize::MAX)
}

/// Enumerates the truncated basis with the default dimension cap
/// [`tolerances::DIMENSION_CAP`].
pub fn enumerate_fock(mode_basis: ModeBasis, n_max: u32) -> Result<FockBasis> {
    enumerate_fock_capped(mode_basis, n_max, tolerances::DIMENSION_CAP)
}

/// Enumerates the truncated basis, failing with [`Error::DimensionCap`]
/// when the dimension would exceed `cap`.
pub fn enumerate_fock_capped(mode_basis: ModeBasis, n_max: u32, cap: usize) -> Result<FockBasis> {
    let modes = mode_basis.len();
    let dim = fock_dimension(modes, n_max);
    if dim > cap {
        return Err(Error::DimensionCap { dim, cap });
    }
    let mut states = Vec::with_capacity(dim);
    let mut current = vec![0u32; modes];
    for total in 0..=n_max {
        push_compositions(&mut states, &mut current, 0, total);
    }
    debug_assert_eq!(states.len(), dim);
    let index = states
        .iter()
        .enumerate()
        .map(|(i, s)| (s.0.clone(), i))
        .collect();
    Ok(FockBasis {
        mode_basis,
        n_max,
        states,
        index,
    })
}

fn push_compositions(
    states: &mut Vec<OccupationVector>,
    current: &mut Vec<u32>,
    mode: usize,
    remaining: u32,
) {
    if mode + 1 == current.len() {
        current[mode] = remaining;
        states.push(OccupationVector(current.clone()));
        return;
    }
    for n in 0..=remaining {
        current[mode] = n;
        push_compositions(states, current, mode + 1, remaining - n);
    }
    current[mode] = 0;
}

impl FockBasis {
    pub fn mode_basis(&self) -> &ModeBasis {
        &self.mode_basis
    }

    /// Number of modes M.
    pub fn modes(&self) -> usize {
        self.mode_basis.len()
    }

    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    /// Hilbert-space dimension D.
    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[OccupationVector] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &OccupationVector {
        &self.states[i]
    }

    /// Basis index of an occupation vector, if within the truncation.
    pub fn index_of(&self, counts: &[u32]) -> Option<usize> {
        self.index.get(counts).copied()
    }

    /// Index of the state with `n` photons in mode `i` and vacuum elsewhere.
    pub fn index_of_number_state(&self, mode: usize, n: u32) -> Option<usize> {
        if mode >= self.modes() || n > self.n_max {
            return None;
        }
        let mut counts = vec![0u32; self.modes()];
        counts[mode] = n;
        self.index_of(&counts)
    }

    /// Indices of the one-photon states, ordered by mode index.
    pub fn single_photon_indices(&self) -> Result<Vec<usize>> {
        if self.n_max < 1 {
            return Err(Error::NoSinglePhotonSector);
        }
        Ok((0..self.modes())
            .map(|i| self.index_of_number_state(i, 1).expect("n_max >= 1"))
            .collect())
    }

    /// Dense matrix of a_i (lowering) or a_i† (raising) for mode `i`.
    ///
    /// Lowering maps |…,n_i,…⟩ ↦ √n_i |…,n_i−1,…⟩. Raising is returned as
    /// the exact conjugate transpose of lowering, so transitions out of
    /// the cutoff shell are dropped.
    pub fn ladder_matrix(&self, mode: usize, kind: Ladder) -> DMatrix<Complex64> {
        assert!(mode < self.modes(), "mode index {mode} out of range");
        let d = self.dim();
        let mut lowering = DMatrix::<Complex64>::zeros(d, d);
        for (col, state) in self.states.iter().enumerate() {
            let n = state.0[mode];
            if n == 0 {
                continue;
            }
            let mut target = state.0.clone();
            target[mode] = n - 1;
            let row = self.index_of(&target).expect("lowering stays in basis");
            lowering[(row, col)] = Complex64::new((n as f64).sqrt(), 0.0);
        }
        match kind {
            Ladder::Lowering => lowering,
            Ladder::Raising => lowering.adjoint(),
        }
    }

    /// Squared norm lost when a_i† pushes the cutoff shell out of the
    /// basis, for the uniform superposition of shell states. A truncation
    /// diagnostic, zero for operators that never touch the shell.
    pub fn raising_leakage(&self, mode: usize) -> f64 {
        let shell: Vec<&OccupationVector> = self
            .states
            .iter()
            .filter(|s| s.total() == self.n_max)
            .collect();
        if shell.is_empty() {
            return 0.0;
        }
        let lost: f64 = shell.iter().map(|s| (s.0[mode] + 1) as f64).sum();
        lost / shell.len() as f64
    }
}
