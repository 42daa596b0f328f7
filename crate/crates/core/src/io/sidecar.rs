//! Binary sidecar for POVM matrices too large to inline in the manifest.
//!
//! Layout (all integers little-endian u64, all floats little-endian f64):
//!
//! ```text
//! 16 bytes  magic "POVMBIN1" padded with zeros
//!  8 bytes  dimension D
//! repeated per element until EOF:
//!    8 bytes      label length L
//!    L bytes      label (UTF-8)
//!    8 bytes      clicks
//!    D·D·2 f64    matrix, row-major, re then im interleaved
//! ```

use std::io::{Read, Write};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub const MAGIC: [u8; 16] = *b"POVMBIN1\0\0\0\0\0\0\0\0";

/// One element as stored in the sidecar.
#[derive(Debug, Clone)]
pub struct SidecarElement {
    pub label: String,
    pub clicks: u64,
    pub matrix: DMatrix<Complex64>,
}

fn parse_err(offset: u64, message: impl Into<String>) -> Error {
    Error::ParseError {
        offset,
        message: message.into(),
    }
}

pub fn write_sidecar<W: Write>(mut out: W, dim: usize, elements: &[SidecarElement]) -> Result<()> {
    out.write_all(&MAGIC)?;
    out.write_all(&(dim as u64).to_le_bytes())?;
    for element in elements {
        let label = element.label.as_bytes();
        out.write_all(&(label.len() as u64).to_le_bytes())?;
        out.write_all(label)?;
        out.write_all(&element.clicks.to_le_bytes())?;
        for r in 0..dim {
            for c in 0..dim {
                let z = element.matrix[(r, c)];
                out.write_all(&z.re.to_le_bytes())?;
                out.write_all(&z.im.to_le_bytes())?;
            }
        }
    }
    Ok(())
}

/// Reads the whole sidecar; any truncation is reported with the byte
/// offset the reader stopped at.
pub fn read_sidecar<R: Read>(mut input: R) -> Result<(usize, Vec<SidecarElement>)> {
    let mut data = Vec::new();
    input.read_to_end(&mut data)?;
    let mut cursor = Cursor {
        data: &data,
        pos: 0,
    };

    let magic = cursor.take(16, "magic")?;
    if magic != MAGIC {
        return Err(parse_err(0, "bad magic; not a POVM sidecar"));
    }
    let dim = cursor.u64("dimension")? as usize;
    if dim == 0 {
        return Err(parse_err(16, "sidecar declares dimension 0"));
    }

    let mut elements = Vec::new();
    while cursor.pos < cursor.data.len() {
        let label_len = cursor.u64("label length")? as usize;
        let label_bytes = cursor.take(label_len, "label")?;
        let label = std::str::from_utf8(label_bytes)
            .map_err(|_| parse_err(cursor.pos as u64, "label is not UTF-8"))?
            .to_string();
        let clicks = cursor.u64("clicks")?;
        let mut matrix = DMatrix::<Complex64>::zeros(dim, dim);
        for r in 0..dim {
            for c in 0..dim {
                let re = cursor.f64("matrix entry")?;
                let im = cursor.f64("matrix entry")?;
                matrix[(r, c)] = Complex64::new(re, im);
            }
        }
        elements.push(SidecarElement {
            label,
            clicks,
            matrix,
        });
    }
    Ok((dim, elements))
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, len: usize, what: &str) -> Result<&'a [u8]> {
        if self.pos + len > self.data.len() {
            return Err(parse_err(
                self.pos as u64,
                format!(
                    "truncated sidecar: needed {len} bytes for {what}, {} left",
                    self.data.len() - self.pos
                ),
            ));
        }
        let slice = &self.data[self.pos..self.pos + len];
        self.pos += len;
        Ok(slice)
    }

    fn u64(&mut self, what: &str) -> Result<u64> {
        let bytes = self.take(8, what)?;
        Ok(u64::from_le_bytes(bytes.try_into().unwrap()))
    }

    fn f64(&mut self, what: &str) -> Result<f64> {
        let bytes = self.take(8, what)?;
        Ok(f64::from_le_bytes(bytes.try_into().unwrap()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_elements(dim: usize) -> Vec<SidecarElement> {
        (0..3)
            .map(|k| SidecarElement {
                label: format!("el{k}"),
                clicks: k as u64 + 1,
                matrix: DMatrix::from_fn(dim, dim, |i, j| {
                    Complex64::new(
                        (i * dim + j) as f64 + k as f64 * 0.5,
                        -((j + k) as f64) / 3.0,
                    )
                }),
            })
            .collect()
    }

    #[test]
    fn roundtrip_is_bit_exact() {
        let elements = sample_elements(4);
        let mut buf = Vec::new();
        write_sidecar(&mut buf, 4, &elements).unwrap();
        let (dim, back) = read_sidecar(buf.as_slice()).unwrap();
        assert_eq!(dim, 4);
        assert_eq!(back.len(), 3);
        for (a, b) in elements.iter().zip(&back) {
            assert_eq!(a.label, b.label);
            assert_eq!(a.clicks, b.clicks);
            for (x, y) in a.matrix.iter().zip(b.matrix.iter()) {
                assert_eq!(x.re.to_bits(), y.re.to_bits());
                assert_eq!(x.im.to_bits(), y.im.to_bits());
            }
        }
    }

    #[test]
    fn truncated_file_reports_the_offset() {
        let elements = sample_elements(4);
        let mut buf = Vec::new();
        write_sidecar(&mut buf, 4, &elements).unwrap();
        buf.truncate(buf.len() - 5);
        let err = read_sidecar(buf.as_slice()).unwrap_err();
        match err {
            Error::ParseError { offset, .. } => assert!(offset > 0),
            other => panic!("expected ParseError, got {other:?}"),
        }
    }

    #[test]
    fn bad_magic_is_rejected() {
        let mut buf = vec![0u8; 32];
        buf[..4].copy_from_slice(b"nope");
        assert!(matches!(
            read_sidecar(buf.as_slice()),
            Err(Error::ParseError { offset: 0, .. })
        ));
    }
}
