//! Gate files: a JSON default and a compact little-endian binary format.
//!
//! JSON: `{"dims": [d₁, …], "matrix": [[[re, im], …], …]}`, row-major.
//! Binary: the 8-byte magic `EPGATE01` padded with zeros to 16 bytes, `u32`
//! party count, `u32` dimensions, then interleaved `f64` real and imaginary
//! parts in row-major order.

use std::path::Path;

use epower_core::tensor::{CMatrix, Gate, Shape, C64};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// File magic of the binary format, zero-padded to 16 bytes on disk.
pub const BINARY_MAGIC: &[u8; 8] = b"EPGATE01";
const HEADER_LEN: usize = 16;

/// Unitarity tolerance applied when loading gates.
pub const LOAD_UNITARY_TOL: f64 = 1e-8;

/// Serialized form of a gate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateFile {
    pub dims: Vec<usize>,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

impl GateFile {
    pub fn from_gate(gate: &Gate) -> Self {
        let m = gate.matrix();
        Self {
            dims: gate.shape().dims().to_vec(),
            matrix: (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
                .collect(),
        }
    }

    pub fn into_gate(self, tolerance: f64) -> epower_core::Result<Gate> {
        let shape = Shape::new(self.dims)?;
        let n = shape.total();
        if self.matrix.len() != n || self.matrix.iter().any(|row| row.len() != n) {
            return Err(epower_core::Error::InvalidShape(format!(
                "matrix must be {n}x{n} for shape {shape}"
            )));
        }
        let m = CMatrix::from_fn(n, n, |i, j| C64::new(self.matrix[i][j][0], self.matrix[i][j][1]));
        Gate::with_tolerance(m, shape, tolerance)
    }
}

/// Parses `"3x4"` or `"2x2x2"`.
pub fn parse_dims(s: &str) -> Result<Vec<usize>, String> {
    let dims: Result<Vec<usize>, _> = s.split(['x', 'X']).map(|p| p.trim().parse::<usize>()).collect();
    match dims {
        Ok(d) if d.len() >= 2 && d.iter().all(|&x| x >= 2) => Ok(d),
        Ok(_) => Err(format!("'{s}' needs at least two dimensions, each at least 2")),
        Err(e) => Err(format!("'{s}': {e}")),
    }
}

/// Dimensions parsed from `"3x4"`-style arguments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dims(pub Vec<usize>);

impl std::str::FromStr for Dims {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_dims(s).map(Dims)
    }
}

/// Formats dimensions as `"3x4"`.
pub fn format_dims(dims: &[usize]) -> String {
    dims.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("x")
}

pub fn to_json(gate: &Gate) -> CliResult<String> {
    Ok(serde_json::to_string(&GateFile::from_gate(gate))?)
}

pub fn to_binary(gate: &Gate) -> Vec<u8> {
    let dims = gate.shape().dims();
    let m = gate.matrix();
    let mut out = Vec::with_capacity(HEADER_LEN + 4 * (dims.len() + 1) + 16 * m.len());
    out.extend_from_slice(BINARY_MAGIC);
    out.resize(HEADER_LEN, 0);
    out.extend_from_slice(&(dims.len() as u32).to_le_bytes());
    for &d in dims {
        out.extend_from_slice(&(d as u32).to_le_bytes());
    }
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.extend_from_slice(&m[(i, j)].re.to_le_bytes());
            out.extend_from_slice(&m[(i, j)].im.to_le_bytes());
        }
    }
    out
}

fn take<'a>(bytes: &'a [u8], at: &mut usize, n: usize) -> Option<&'a [u8]> {
    let s = bytes.get(*at..*at + n)?;
    *at += n;
    Some(s)
}

fn read_u32(bytes: &[u8], at: &mut usize) -> Option<u32> {
    take(bytes, at, 4).map(|s| u32::from_le_bytes(s.try_into().expect("4 bytes")))
}

fn read_f64(bytes: &[u8], at: &mut usize) -> Option<f64> {
    take(bytes, at, 8).map(|s| f64::from_le_bytes(s.try_into().expect("8 bytes")))
}

/// Decodes the binary format into a [`GateFile`].
pub fn from_binary(bytes: &[u8]) -> Result<GateFile, String> {
    if bytes.len() < HEADER_LEN || &bytes[..8] != BINARY_MAGIC {
        return Err(String::from("missing EPGATE01 header"));
    }
    let mut at = HEADER_LEN;
    let truncated = || String::from("truncated gate file");
    let n = read_u32(bytes, &mut at).ok_or_else(truncated)? as usize;
    if n > 64 {
        return Err(format!("implausible party count {n}"));
    }
    let dims = (0..n)
        .map(|_| read_u32(bytes, &mut at).map(|d| d as usize))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(truncated)?;
    let total = dims
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .filter(|&t| t <= 1 << 16)
        .ok_or_else(|| format!("gate dimension {dims:?} too large"))?;
    let mut matrix = Vec::with_capacity(total);
    for _ in 0..total {
        let mut row = Vec::with_capacity(total);
        for _ in 0..total {
            let re = read_f64(bytes, &mut at).ok_or_else(truncated)?;
            let im = read_f64(bytes, &mut at).ok_or_else(truncated)?;
            row.push([re, im]);
        }
        matrix.push(row);
    }
    if at != bytes.len() {
        return Err(format!("{} trailing bytes", bytes.len() - at));
    }
    Ok(GateFile { dims, matrix })
}

/// Reads a gate, detecting the format from the header.
pub fn read_gate(path: &Path) -> CliResult<Gate> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    let file = if bytes.starts_with(BINARY_MAGIC) {
        from_binary(&bytes).map_err(|m| CliError::parse(path, m))?
    } else {
        serde_json::from_slice::<GateFile>(&bytes).map_err(|e| CliError::parse(path, e.to_string()))?
    };
    Ok(file.into_gate(LOAD_UNITARY_TOL)?)
}

/// Writes JSON, or the binary format when `binary` is set.
pub fn write_gate(gate: &Gate, path: &Path, binary: bool) -> CliResult<()> {
    let bytes = if binary {
        to_binary(gate)
    } else {
        let mut s = to_json(gate)?;
        s.push('\n');
        s.into_bytes()
    };
    std::fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}
