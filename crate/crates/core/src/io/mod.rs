//! POVM file format, report assembly and serialization.
//!
//! A detector is stored as a JSON manifest (grid, mode functions,
//! elements) with matrices either inline or in a binary sidecar next to
//! the manifest. Loading rebuilds the full object graph and revalidates
//! every invariant.

pub mod jsonfmt;
pub mod report;
mod sidecar;

pub use report::{MeritReport, ReportOptions};
pub use sidecar::{read_sidecar, write_sidecar, SidecarElement};

use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::hilbert::{
    enumerate_fock, fock_dimension, FockBasis, FrequencyGrid, ModeBasis, ModeFunction, TimeWindow,
};
use crate::povm::{Povm, PovmElement};

/// Matrices with D at or below this go inline in the manifest.
pub const INLINE_DIM_LIMIT: usize = 64;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    format_version: u32,
    m: usize,
    n_max: u32,
    frequency_grid: GridSpec,
    /// Per mode: G complex samples as [re, im] pairs.
    mode_functions: Vec<Vec<[f64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    sidecar: Option<String>,
    elements: Vec<ElementSpec>,
}

#[derive(Debug, Serialize, Deserialize)]
struct GridSpec {
    omega_min: f64,
    omega_max: f64,
    num_points: usize,
}

#[derive(Debug, Serialize, Deserialize)]
struct ElementSpec {
    label: String,
    /// Total clicks N(k) in the outcome; 1 when omitted.
    #[serde(default = "one")]
    clicks: u64,
    matrix_ref: MatrixRef,
}

fn one() -> u64 {
    1
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum MatrixRef {
    /// Row-major D×D complex matrix as [re, im] pairs, graded-lex order.
    Inline(Vec<Vec<[f64; 2]>>),
    /// Matrix stored in the manifest's binary sidecar, keyed by label.
    Sidecar,
}

/// Where a save landed: manifest plus optional sidecar.
#[derive(Debug, Clone)]
pub struct SavedFiles {
    pub manifest: PathBuf,
    pub sidecar: Option<PathBuf>,
}

/// Writes a POVM to `path` (JSON manifest). Matrices go inline up to
/// D = [`INLINE_DIM_LIMIT`], else into `<path stem>.bin` next to it.
pub fn save(povm: &Povm, path: &Path) -> Result<SavedFiles> {
    let basis = povm.basis();
    let grid = basis.mode_basis().grid();
    let dim = basis.dim();
    let inline = dim <= INLINE_DIM_LIMIT;

    let sidecar_name = if inline {
        None
    } else {
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "povm".into());
        Some(format!("{stem}.bin"))
    };

    let elements = povm
        .elements()
        .iter()
        .map(|e| ElementSpec {
            label: e.label().to_string(),
            clicks: e.clicks(),
            matrix_ref: if inline {
                MatrixRef::Inline(matrix_to_rows(e.matrix()))
            } else {
                MatrixRef::Sidecar
            },
        })
        .collect();

    let manifest = Manifest {
        format_version: FORMAT_VERSION,
        m: basis.modes(),
        n_max: basis.n_max(),
        frequency_grid: GridSpec {
            omega_min: grid.omega_min(),
            omega_max: grid.omega_max(),
            num_points: grid.len(),
        },
        mode_functions: basis
            .mode_basis()
            .modes()
            .iter()
            .map(|m| m.amplitudes().iter().map(|z| [z.re, z.im]).collect())
            .collect(),
        sidecar: sidecar_name.clone(),
        elements,
    };

    let mut text = serde_json::to_string_pretty(&manifest).map_err(|e| Error::ParseError {
        offset: 0,
        message: format!("manifest serialization failed: {e}"),
    })?;
    text.push('\n');
    std::fs::write(path, text)?;

    let sidecar_path = match sidecar_name {
        None => None,
        Some(name) => {
            let sidecar_path = path.with_file_name(name);
            let entries: Vec<SidecarElement> = povm
                .elements()
                .iter()
                .map(|e| SidecarElement {
                    label: e.label().to_string(),
                    clicks: e.clicks(),
                    matrix: e.matrix().clone(),
                })
                .collect();
            let file = std::fs::File::create(&sidecar_path)?;
            write_sidecar(std::io::BufWriter::new(file), dim, &entries)?;
            Some(sidecar_path)
        }
    };

    Ok(SavedFiles {
        manifest: path.to_path_buf(),
        sidecar: sidecar_path,
    })
}

fn matrix_to_rows(m: &DMatrix<Complex64>) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|r| {
            (0..m.ncols())
                .map(|c| [m[(r, c)].re, m[(r, c)].im])
                .collect()
        })
        .collect()
}

/// Loads and fully validates a POVM file.
pub fn load(path: &Path) -> Result<Povm> {
    let povm = load_unvalidated(path)?;
    let report = povm.validate();
    match report.first_failure() {
        None => Ok(povm),
        Some((label, reason)) => Err(Error::ValidationFailed {
            label: label.to_string(),
            reason: reason.to_string(),
        }),
    }
}

/// Loads a POVM, checking structure and hermiticity but skipping the
/// spectral checks, so callers can print a full
/// [`crate::povm::ValidationReport`] for invalid files.
pub fn load_unvalidated(path: &Path) -> Result<Povm> {
    let text = std::fs::read_to_string(path)?;
    let manifest: Manifest = serde_json::from_str(&text).map_err(|e| Error::ParseError {
        offset: byte_offset(&text, e.line(), e.column()),
        message: format!("manifest: {e}"),
    })?;
    if manifest.format_version != FORMAT_VERSION {
        return Err(Error::ParseError {
            offset: 0,
            message: format!(
                "unsupported format_version {}, expected {FORMAT_VERSION}",
                manifest.format_version
            ),
        });
    }
    if manifest.mode_functions.len() != manifest.m {
        return Err(Error::DimensionMismatch {
            expected: manifest.m,
            got: manifest.mode_functions.len(),
            context: "mode_functions vs declared M".into(),
        });
    }

    let grid = FrequencyGrid::new(
        manifest.frequency_grid.omega_min,
        manifest.frequency_grid.omega_max,
        manifest.frequency_grid.num_points,
    )?;
    let modes: Vec<ModeFunction> = manifest
        .mode_functions
        .iter()
        .map(|samples| {
            let amplitudes = samples
                .iter()
                .map(|[re, im]| Complex64::new(*re, *im))
                .collect();
            ModeFunction::from_samples(grid, amplitudes)
        })
        .collect::<Result<_>>()?;
    let mode_basis = ModeBasis::new(modes)?;
    let basis = enumerate_fock(mode_basis, manifest.n_max)?;
    let dim = basis.dim();
    debug_assert_eq!(dim, fock_dimension(manifest.m, manifest.n_max));

    let sidecar_elements = match &manifest.sidecar {
        None => Vec::new(),
        Some(name) => {
            let sidecar_path = path.with_file_name(name);
            let file = std::fs::File::open(&sidecar_path)?;
            let (sidecar_dim, entries) = read_sidecar(std::io::BufReader::new(file))?;
            if sidecar_dim != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: sidecar_dim,
                    context: "sidecar dimension vs manifest".into(),
                });
            }
            entries
        }
    };

    let mut elements = Vec::with_capacity(manifest.elements.len());
    for spec in &manifest.elements {
        let matrix = match &spec.matrix_ref {
            MatrixRef::Inline(rows) => {
                if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        got: rows.len(),
                        context: format!("inline matrix of element '{}'", spec.label),
                    });
                }
                DMatrix::from_fn(dim, dim, |r, c| {
                    Complex64::new(rows[r][c][0], rows[r][c][1])
                })
            }
            MatrixRef::Sidecar => sidecar_elements
                .iter()
                .find(|e| e.label == spec.label)
                .map(|e| e.matrix.clone())
                .ok_or_else(|| Error::ParseError {
                    offset: 0,
                    message: format!("element '{}' not found in sidecar", spec.label),
                })?,
        };
        elements.push(PovmElement::new(spec.label.clone(), spec.clicks, matrix)?);
    }
    Povm::new_unchecked(basis, elements)
}

fn byte_offset(text: &str, line: usize, column: usize) -> u64 {
    if line == 0 {
        return 0;
    }
    let mut offset = 0usize;
    for (i, l) in text.split('\n').enumerate() {
        if i + 1 == line {
            return (offset + column.saturating_sub(1)) as u64;
        }
        offset += l.len() + 1;
    }
    offset as u64
}

/// SHA-256 over the manifest bytes followed by the sidecar bytes (when
/// present), as a lowercase hex string. Stored in report provenance.
pub fn input_digest(path: &Path) -> Result<String> {
    let mut hasher = Sha256::new();
    let text = std::fs::read(path)?;
    hasher.update(&text);
    if let Ok(manifest) = serde_json::from_slice::<Manifest>(&text) {
        if let Some(name) = manifest.sidecar {
            let bytes = std::fs::read(path.with_file_name(name))?;
            hasher.update(&bytes);
        }
    }
    Ok(hex_string(&hasher.finalize()))
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// A time window wide enough for the temporal densities of every basis
/// mode, used when the caller does not pin one. Spread scales with the
/// narrowest spectral width and the basis size.
pub fn default_time_window(basis: &FockBasis) -> Result<TimeWindow> {
    let min_sigma = basis
        .mode_basis()
        .modes()
        .iter()
        .map(|m| m.spectral_std())
        .fold(f64::INFINITY, f64::min);
    if !min_sigma.is_finite() || min_sigma <= 0.0 {
        return Err(Error::InvalidWindow(
            "cannot derive a time window from the mode spectra".into(),
        ));
    }
    let scale = 1.0 / (2.0 * min_sigma);
    let m = basis.modes() as f64;
    let half = scale * (2.0 * (2.0 * m + 1.0).sqrt() + 6.0);
    TimeWindow::new(-half, half, 4096)
}

/// Writes a binned distribution as CSV with columns
/// `bin_index,bin_start,probability`. '.' is always the decimal
/// separator and lines end with '\n'.
pub fn write_binned_csv<W: std::io::Write>(
    mut out: W,
    binned: &crate::classical::BinnedDistribution,
) -> Result<()> {
    out.write_all(b"bin_index,bin_start,probability\n")?;
    for (j, start, p) in binned.iter() {
        writeln!(out, "{j},{},{}", fmt_csv(start), fmt_csv(p))?;
    }
    Ok(())
}

fn fmt_csv(x: f64) -> String {
    format!("{x:.17e}")
}

/// Worker-thread cap: POVM_MERIT_THREADS when set (≥ 1), else the
/// available parallelism.
pub fn thread_cap() -> usize {
    match std::env::var("POVM_MERIT_THREADS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n >= 1)
            .unwrap_or(1),
        Err(_) => std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1),
    }
}
