//! POVM elements and validation, Born-rule probabilities, outcome purity
//! and effective dimension.
//!
//! A detector outcome is a positive Hermitian operator on the truncated
//! Fock space; the no-click outcome is never supplied by the caller but
//! always derived from completeness as 1 − ΣΠ_k.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::FockBasis;
use crate::linalg;
use crate::tolerances;

/// Label reserved for the derived no-click element.
pub const NULL_LABEL: &str = "null";

/// One measurement outcome: a labeled Hermitian PSD matrix together with
/// the number of detector clicks the outcome consists of.
#[derive(Debug, Clone)]
pub struct PovmElement {
    label: String,
    clicks: u64,
    matrix: DMatrix<Complex64>,
}

impl PovmElement {
    /// Builds an element, checking squareness and hermiticity.
    ///
    /// Positivity is checked at [`Povm`] construction where the
    /// eigendecomposition is already needed.
    pub fn new(label: impl Into<String>, clicks: u64, matrix: DMatrix<Complex64>) -> Result<Self> {
        let label = label.into();
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                got: matrix.ncols(),
                context: format!("element '{label}' is not square"),
            });
        }
        let element = Self {
            label,
            clicks,
            matrix,
        };
        let defect = element.hermiticity_defect();
        if defect > tolerances::HERMITICITY {
            return Err(Error::ValidationFailed {
                label: element.label,
                reason: format!("hermiticity defect {defect:.3e} exceeds tolerance"),
            });
        }
        Ok(element)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Total number of clicks N(k) recorded in this outcome.
    pub fn clicks(&self) -> u64 {
        self.clicks
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Max |Π − Π†| entry.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut defect = 0.0_f64;
        for i in 0..self.matrix.nrows() {
            for j in 0..=i {
                defect = defect.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        defect
    }

    pub fn trace(&self) -> f64 {
        linalg::trace_re(&self.matrix)
    }
}

/// Purity Tr(Π²)/[Tr(Π)]² of an outcome; 1 for rank-1 projectors, 1/D for
/// the maximally mixed element.
pub fn purity(element: &PovmElement) -> Result<f64> {
    let trace = element.trace();
    if trace.abs() <= tolerances::ZERO_TRACE {
        return Err(Error::ZeroTraceElement(element.label.clone()));
    }
    // Tr(Π²) = Σ|Π_ij|² for Hermitian Π
    let trace_sq: f64 = element.matrix.iter().map(|z| z.norm_sqr()).sum();
    Ok(trace_sq / (trace * trace))
}

/// Effective Hilbert-space dimension 1/Pur(Π): how many orthogonal input
/// states (at least) feed the outcome.
pub fn effective_dimension(element: &PovmElement) -> Result<f64> {
    Ok(1.0 / purity(element)?)
}

/// A full POVM: the click outcomes plus the derived null element.
#[derive(Debug, Clone)]
pub struct Povm {
    basis: FockBasis,
    elements: Vec<PovmElement>,
    null_element: PovmElement,
}

impl Povm {
    /// Builds and fully validates a POVM. The null element is derived from
    /// completeness; callers never supply it.
    pub fn new(basis: FockBasis, elements: Vec<PovmElement>) -> Result<Self> {
        let povm = Self::new_unchecked(basis, elements)?;
        let report = povm.validate();
        match report.first_failure() {
            None => Ok(povm),
            Some((label, reason)) => Err(Error::ValidationFailed {
                label: label.to_string(),
                reason: reason.to_string(),
            }),
        }
    }

    /// Builds the POVM and derives the null element without the (costly)
    /// spectral checks. Dimension checks still apply. Used by loaders that
    /// want to produce a diagnostic report for invalid files.
    pub fn new_unchecked(basis: FockBasis, elements: Vec<PovmElement>) -> Result<Self> {
        let dim = basis.dim();
        for element in &elements {
            if element.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: element.dim(),
                    context: format!("element '{}' vs Fock basis", element.label),
                });
            }
            if element.label == NULL_LABEL {
                return Err(Error::ValidationFailed {
                    label: element.label.clone(),
                    reason: "the null outcome is derived, never supplied".into(),
                });
            }
        }
        let mut sum = DMatrix::<Complex64>::zeros(dim, dim);
        for element in &elements {
            sum += &element.matrix;
        }
        let null_matrix = DMatrix::<Complex64>::identity(dim, dim) - sum;
        let null_element = PovmElement {
            label: NULL_LABEL.to_string(),
            clicks: 0,
            matrix: null_matrix,
        };
        Ok(Self {
            basis,
            elements,
            null_element,
        })
    }

    pub fn basis(&self) -> &FockBasis {
        &self.basis
    }

    /// The click outcomes (the null element is excluded).
    pub fn elements(&self) -> &[PovmElement] {
        &self.elements
    }

    pub fn null_element(&self) -> &PovmElement {
        &self.null_element
    }

    pub fn element_by_label(&self, label: &str) -> Option<&PovmElement> {
        if label == NULL_LABEL {
            return Some(&self.null_element);
        }
        self.elements.iter().find(|e| e.label == label)
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// Σ_{k=1..N} Π_k, the operator representing "any click".
    pub fn click_sum(&self) -> DMatrix<Complex64> {
        let dim = self.dim();
        let mut sum = DMatrix::<Complex64>::zeros(dim, dim);
        for element in &self.elements {
            sum += &element.matrix;
        }
        sum
    }

    /// Runs all invariant checks and reports per-element diagnostics.
    ///
    /// Individual eigenvalues are checked against 1 as well: completeness
    /// makes 1 − Π_k the sum of the remaining elements and the null
    /// element, all PSD, so no eigenvalue of a valid Π_k can exceed 1.
    pub fn validate(&self) -> ValidationReport {
        let mut elements = Vec::with_capacity(self.elements.len());
        let mut failures = Vec::new();
        for element in &self.elements {
            let defect = element.hermiticity_defect();
            let eigenvalues = linalg::eigvalsh(&element.matrix);
            let max = eigenvalues.first().copied().unwrap_or(0.0);
            let min = eigenvalues.last().copied().unwrap_or(0.0);
            if defect > tolerances::HERMITICITY {
                failures.push((
                    element.label.clone(),
                    format!("hermiticity defect {defect:.3e}"),
                ));
            }
            if min < tolerances::PSD_FLOOR {
                failures.push((
                    element.label.clone(),
                    format!("minimum eigenvalue {min:.3e} below PSD tolerance"),
                ));
            }
            if max > tolerances::EIGENVALUE_CEILING {
                failures.push((
                    element.label.clone(),
                    format!("maximum eigenvalue {max:.6} exceeds 1"),
                ));
            }
            elements.push(ElementDiagnostics {
                label: element.label.clone(),
                clicks: element.clicks,
                hermiticity_defect: defect,
                min_eigenvalue: min,
                max_eigenvalue: max,
            });
        }

        let sum = self.click_sum();
        let sum_eigenvalues = linalg::eigvalsh(&sum);
        let sum_max = sum_eigenvalues.first().copied().unwrap_or(0.0);
        let sum_min = sum_eigenvalues.last().copied().unwrap_or(0.0);
        if sum_min < tolerances::PSD_FLOOR {
            failures.push((
                "Σ".into(),
                format!("click sum minimum eigenvalue {sum_min:.3e}"),
            ));
        }
        if sum_max > tolerances::EIGENVALUE_CEILING {
            failures.push((
                "Σ".into(),
                format!(
                    "click sum maximum eigenvalue {sum_max:.6} exceeds 1 (completeness violated)"
                ),
            ));
        }
        // null = 1 − Σ, so its spectrum is 1 − spectrum(Σ); reuse it.
        let null_min = 1.0 - sum_max;
        if null_min < tolerances::PSD_FLOOR {
            failures.push((
                NULL_LABEL.into(),
                format!("null element minimum eigenvalue {null_min:.3e}"),
            ));
        }

        ValidationReport {
            dimension: self.dim(),
            elements,
            sum_min_eigenvalue: sum_min,
            sum_max_eigenvalue: sum_max,
            null_min_eigenvalue: null_min,
            failures,
        }
    }
}

/// Per-element spectral diagnostics produced by [`Povm::validate`].
#[derive(Debug, Clone)]
pub struct ElementDiagnostics {
    pub label: String,
    pub clicks: u64,
    pub hermiticity_defect: f64,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
}

/// Outcome of validating a POVM against all invariants.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub dimension: usize,
    pub elements: Vec<ElementDiagnostics>,
    pub sum_min_eigenvalue: f64,
    pub sum_max_eigenvalue: f64,
    pub null_min_eigenvalue: f64,
    failures: Vec<(String, String)>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn first_failure(&self) -> Option<(&str, &str)> {
        self.failures.first().map(|(l, r)| (l.as_str(), r.as_str()))
    }

    pub fn failures(&self) -> impl Iterator<Item = (&str, &str)> {
        self.failures.iter().map(|(l, r)| (l.as_str(), r.as_str()))
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(
            f,
            "POVM on D = {} : {}",
            self.dimension,
            if self.passed() { "VALID" } else { "INVALID" }
        )?;
        writeln!(
            f,
            "click sum spectrum: [{:.6e}, {:.6e}], null min eigenvalue {:.6e}",
            self.sum_min_eigenvalue, self.sum_max_eigenvalue, self.null_min_eigenvalue
        )?;
        for e in &self.elements {
            writeln!(
                f,
                "  {:<24} clicks {:>3}  herm defect {:.3e}  eigenvalues [{:.6e}, {:.6e}]",
                e.label, e.clicks, e.hermiticity_defect, e.min_eigenvalue, e.max_eigenvalue
            )?;
        }
        for (label, reason) in &self.failures {
            writeln!(f, "  FAIL [{label}]: {reason}")?;
        }
        Ok(())
    }
}

/// Density matrix of the incoming field on the truncated Fock space.
#[derive(Debug, Clone)]
pub struct QuantumState {
    matrix: DMatrix<Complex64>,
}

impl QuantumState {
    /// Validates hermiticity, unit trace and positivity.
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                got: matrix.ncols(),
                context: "density matrix must be square".into(),
            });
        }
        let mut defect = 0.0_f64;
        for i in 0..matrix.nrows() {
            for j in 0..=i {
                defect = defect.max((matrix[(i, j)] - matrix[(j, i)].conj()).norm());
            }
        }
        if defect > tolerances::HERMITICITY {
            return Err(Error::NumericalInconsistency(format!(
                "density matrix hermiticity defect {defect:.3e}"
            )));
        }
        let trace = linalg::trace_re(&matrix);
        if (trace - 1.0).abs() > tolerances::STATE_TRACE {
            return Err(Error::NumericalInconsistency(format!(
                "density matrix trace {trace} deviates from 1"
            )));
        }
        let min = linalg::eigvalsh(&matrix).last().copied().unwrap_or(0.0);
        if min < tolerances::PSD_FLOOR {
            return Err(Error::NumericalInconsistency(format!(
                "density matrix minimum eigenvalue {min:.3e}"
            )));
        }
        Ok(Self { matrix })
    }

    /// Pure state |ψ⟩⟨ψ| from a (not necessarily normalized) vector.
    pub fn pure(amplitudes: &[Complex64]) -> Result<Self> {
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if norm_sq <= tolerances::ZERO_TRACE {
            return Err(Error::NumericalInconsistency(
                "cannot build a pure state from the zero vector".into(),
            ));
        }
        let d = amplitudes.len();
        let matrix = DMatrix::from_fn(d, d, |i, j| amplitudes[i] * amplitudes[j].conj() / norm_sq);
        Ok(Self { matrix })
    }

    /// The vacuum projector |vac⟩⟨vac| (state 0 of the graded-lex basis).
    pub fn vacuum(dim: usize) -> Self {
        let mut matrix = DMatrix::<Complex64>::zeros(dim, dim);
        matrix[(0, 0)] = Complex64::new(1.0, 0.0);
        Self { matrix }
    }

    /// Maximally mixed state 1/D.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: DMatrix::<Complex64>::identity(dim, dim) / Complex64::new(dim as f64, 0.0),
        }
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

/// Born rule p_k = Tr(ρ Π_k), clamped to [0, 1] only within tolerance of
/// the bounds.
pub fn born_probability(state: &QuantumState, element: &PovmElement) -> Result<f64> {
    if state.dim() != element.dim() {
        return Err(Error::DimensionMismatch {
            expected: element.dim(),
            got: state.dim(),
            context: format!("state vs element '{}'", element.label),
        });
    }
    let p = linalg::trace_product(state.matrix(), element.matrix()).re;
    if !(tolerances::PSD_FLOOR..=tolerances::EIGENVALUE_CEILING).contains(&p) {
        return Err(Error::NumericalInconsistency(format!(
            "Born probability {p} for '{}' outside [0, 1] beyond tolerance",
            element.label
        )));
    }
    Ok(p.clamp(0.0, 1.0))
}
