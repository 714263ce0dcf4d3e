//! Pure states, gates and bipartite entanglement measures.
//!
//! Amplitudes are stored flat in row-major multi-index order with party 0
//! slowest. A [`Cut`] selects a bipartition Γ | Γᶜ of the parties; the
//! matricization places the Γ multi-index on rows and the Γᶜ multi-index on
//! columns, both in increasing party order.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Complex scalar used everywhere.
pub type C64 = Complex<f64>;
/// Dense complex matrix.
pub type CMatrix = DMatrix<C64>;
/// Dense complex vector.
pub type CVector = DVector<C64>;

/// Default relative tolerance for [`schmidt_rank`].
pub const DEFAULT_RANK_TOL: f64 = 1e-8;
/// Unitarity tolerance enforced by [`Gate::new`].
pub const UNITARY_TOL: f64 = 1e-10;
/// Normalization tolerance enforced by [`PureState::new`].
pub const NORM_TOL: f64 = 1e-12;

/// Local dimensions `(d_1, ..., d_N)` of a multipartite system.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Shape {
    dims: Vec<usize>,
}

impl Shape {
    /// Builds a shape with `N >= 2` parties, each of dimension at least 2.
    pub fn new(dims: impl Into<Vec<usize>>) -> Result<Self> {
        let dims = dims.into();
        if dims.len() < 2 {
            return Err(Error::InvalidShape(format!(
                "need at least two parties, got {}",
                dims.len()
            )));
        }
        if let Some(d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidShape(format!(
                "every local dimension must be at least 2, got {d}"
            )));
        }
        dims.iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .ok_or_else(|| Error::InvalidShape(String::from("total dimension overflows")))?;
        Ok(Self { dims })
    }

    /// Two-party shape `a ⊗ b`.
    pub fn bipartite(a: usize, b: usize) -> Result<Self> {
        Self::new(vec![a, b])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn parties(&self) -> usize {
        self.dims.len()
    }

    /// Ambient dimension `∏ d_i`.
    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    /// Row-major strides, party 0 slowest.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1usize; self.dims.len()];
        for i in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.dims[i + 1];
        }
        strides
    }

    /// Product of the dimensions of the listed parties.
    pub fn product_of(&self, parties: &[usize]) -> usize {
        parties.iter().map(|&i| self.dims[i]).product()
    }
}

impl core::fmt::Display for Shape {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        for (i, d) in self.dims.iter().enumerate() {
            if i > 0 {
                f.write_str("x")?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

/// A bipartition Γ | Γᶜ of `parties` parties (0-based indices).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cut {
    gamma: Vec<usize>,
    parties: usize,
}

impl Cut {
    /// Validates Γ as a nonempty proper subset of `0..parties`.
    pub fn new(parties: usize, gamma: &[usize]) -> Result<Self> {
        let mut g = gamma.to_vec();
        g.sort_unstable();
        g.dedup();
        if g.is_empty() {
            return Err(Error::InvalidCut(String::from("empty side")));
        }
        if let Some(&i) = g.iter().find(|&&i| i >= parties) {
            return Err(Error::InvalidCut(format!(
                "party {i} out of range for {parties} parties"
            )));
        }
        if g.len() == parties {
            return Err(Error::InvalidCut(String::from("Γ contains every party")));
        }
        Ok(Self { gamma: g, parties })
    }

    /// Orients the cut so that Γ has the smaller dimension product; ties go
    /// to the lexicographically smaller index set.
    pub fn canonical(shape: &Shape, gamma: &[usize]) -> Result<Self> {
        let cut = Self::new(shape.parties(), gamma)?;
        let comp = cut.complement();
        let pg = shape.product_of(&cut.gamma);
        let pc = shape.product_of(&comp);
        if pc < pg || (pc == pg && comp < cut.gamma) {
            Ok(Self {
                gamma: comp,
                parties: cut.parties,
            })
        } else {
            Ok(cut)
        }
    }

    /// Canonical cut of a two-party shape.
    pub fn canonical_bipartite(shape: &Shape) -> Result<Self> {
        if shape.parties() != 2 {
            return Err(Error::InvalidShape(format!(
                "expected a bipartite shape, got {} parties",
                shape.parties()
            )));
        }
        Self::canonical(shape, &[0])
    }

    pub fn gamma(&self) -> &[usize] {
        &self.gamma
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    /// Sorted Γᶜ.
    pub fn complement(&self) -> Vec<usize> {
        (0..self.parties)
            .filter(|i| self.gamma.binary_search(i).is_err())
            .collect()
    }

    /// Row and column dimensions of the matricization.
    pub fn matrix_dims(&self, shape: &Shape) -> (usize, usize) {
        (shape.product_of(&self.gamma), shape.product_of(&self.complement()))
    }

    fn check(&self, shape: &Shape) -> Result<()> {
        if self.parties != shape.parties() {
            return Err(Error::InvalidCut(format!(
                "cut over {} parties applied to a {}-party shape",
                self.parties,
                shape.parties()
            )));
        }
        Ok(())
    }
}

impl core::fmt::Display for Cut {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        let side = |f: &mut core::fmt::Formatter<'_>, s: &[usize]| -> core::fmt::Result {
            f.write_str("{")?;
            for (i, p) in s.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{p}")?;
            }
            f.write_str("}")
        };
        side(f, &self.gamma)?;
        f.write_str("|")?;
        side(f, &self.complement())
    }
}

/// Precomputed index map between flat amplitudes and a cut's matricization.
#[derive(Debug, Clone)]
pub struct CutLayout {
    rows: usize,
    cols: usize,
    row_of: Vec<usize>,
    col_of: Vec<usize>,
}

impl CutLayout {
    pub fn new(shape: &Shape, cut: &Cut) -> Result<Self> {
        cut.check(shape)?;
        let (rows, cols) = cut.matrix_dims(shape);
        let dims = shape.dims();
        let comp = cut.complement();
        let side_strides = |side: &[usize]| -> Vec<(usize, usize)> {
            let mut out = Vec::with_capacity(side.len());
            let mut stride = 1;
            for &p in side.iter().rev() {
                out.push((p, stride));
                stride *= dims[p];
            }
            out
        };
        let gs = side_strides(cut.gamma());
        let cs = side_strides(&comp);
        let n = shape.total();
        let strides = shape.strides();
        let mut row_of = vec![0; n];
        let mut col_of = vec![0; n];
        for f in 0..n {
            let digit = |p: usize| (f / strides[p]) % dims[p];
            row_of[f] = gs.iter().map(|&(p, s)| digit(p) * s).sum();
            col_of[f] = cs.iter().map(|&(p, s)| digit(p) * s).sum();
        }
        Ok(Self {
            rows,
            cols,
            row_of,
            col_of,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Rearranges a flat amplitude vector into the cut matrix.
    pub fn matricize(&self, amplitudes: &CVector) -> CMatrix {
        let mut m = CMatrix::zeros(self.rows, self.cols);
        for (f, a) in amplitudes.iter().enumerate() {
            m[(self.row_of[f], self.col_of[f])] = *a;
        }
        m
    }

    /// Inverse of [`CutLayout::matricize`].
    pub fn flatten(&self, m: &CMatrix) -> CVector {
        CVector::from_iterator(
            self.row_of.len(),
            (0..self.row_of.len()).map(|f| m[(self.row_of[f], self.col_of[f])]),
        )
    }
}

/// Normalized pure state with its factor shape.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: CVector,
    shape: Shape,
}

impl PureState {
    /// Wraps amplitudes whose norm is already 1 within [`NORM_TOL`].
    pub fn new(amplitudes: CVector, shape: Shape) -> Result<Self> {
        check_len(amplitudes.len(), &shape)?;
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { amplitudes, shape })
    }

    /// Divides by the Euclidean norm; fails on a zero vector.
    pub fn normalize(amplitudes: CVector, shape: Shape) -> Result<Self> {
        check_len(amplitudes.len(), &shape)?;
        let norm = amplitudes.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self {
            amplitudes: amplitudes / C64::new(norm, 0.0),
            shape,
        })
    }

    /// Product state `⊗ factors[i]`; each factor must be a unit vector.
    pub fn product(factors: &[CVector]) -> Result<Self> {
        let dims: Vec<usize> = factors.iter().map(|v| v.len()).collect();
        let shape = Shape::new(dims)?;
        for v in factors {
            let n = v.norm();
            if (n - 1.0).abs() > NORM_TOL {
                return Err(Error::NotNormalized(n));
            }
        }
        Self::new(kron_vectors(factors), shape)
    }

    /// Computational basis state `|i_1 ... i_N⟩`.
    pub fn basis(shape: Shape, indices: &[usize]) -> Result<Self> {
        if indices.len() != shape.parties() {
            return Err(Error::InvalidShape(format!(
                "{} indices for {} parties",
                indices.len(),
                shape.parties()
            )));
        }
        let strides = shape.strides();
        let mut flat = 0;
        for (p, &i) in indices.iter().enumerate() {
            if i >= shape.dims()[p] {
                return Err(Error::InvalidDimension(format!("index {i} out of range for party {p}")));
            }
            flat += i * strides[p];
        }
        let mut amps = CVector::zeros(shape.total());
        amps[flat] = C64::new(1.0, 0.0);
        Ok(Self {
            amplitudes: amps,
            shape,
        })
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn into_amplitudes(self) -> CVector {
        self.amplitudes
    }

    pub(crate) fn from_parts_unchecked(amplitudes: CVector, shape: Shape) -> Self {
        Self { amplitudes, shape }
    }
}

fn check_len(len: usize, shape: &Shape) -> Result<()> {
    if len != shape.total() {
        return Err(Error::InvalidShape(format!(
            "length {len} does not match shape {shape}"
        )));
    }
    Ok(())
}

/// Unitary gate acting on a multipartite system.
#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    matrix: CMatrix,
    shape: Shape,
}

impl Gate {
    /// Checks `‖U†U − I‖_F ≤ 1e-10`.
    pub fn new(matrix: CMatrix, shape: Shape) -> Result<Self> {
        Self::with_tolerance(matrix, shape, UNITARY_TOL)
    }

    /// As [`Gate::new`] with a caller-chosen unitarity tolerance.
    pub fn with_tolerance(matrix: CMatrix, shape: Shape, tolerance: f64) -> Result<Self> {
        let n = shape.total();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::InvalidShape(format!(
                "matrix is {}x{}, shape {shape} needs {n}x{n}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let residual = unitarity_residual(&matrix);
        if !(residual <= tolerance) {
            return Err(Error::NotUnitary { residual, tolerance });
        }
        Ok(Self { matrix, shape })
    }

    pub fn identity(shape: Shape) -> Self {
        let n = shape.total();
        Self {
            matrix: CMatrix::identity(n, n),
            shape,
        }
    }

    /// SWAP on `d ⊗ d`.
    pub fn swap(d: usize) -> Result<Self> {
        let shape = Shape::bipartite(d, d)?;
        let mut m = CMatrix::zeros(d * d, d * d);
        for i in 0..d {
            for j in 0..d {
                m[(j * d + i, i * d + j)] = C64::new(1.0, 0.0);
            }
        }
        Ok(Self { matrix: m, shape })
    }

    /// Local gate `V_1 ⊗ ... ⊗ V_N`.
    pub fn local(factors: &[CMatrix]) -> Result<Self> {
        let dims: Vec<usize> = factors.iter().map(|m| m.nrows()).collect();
        let shape = Shape::new(dims)?;
        let mut m = CMatrix::identity(1, 1);
        for f in factors {
            if f.nrows() != f.ncols() {
                return Err(Error::InvalidShape(String::from("local factor is not square")));
            }
            m = m.kronecker(f);
        }
        Self::new(m, shape)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// Global phase `e^{iθ} U`.
    pub fn with_phase(&self, theta: f64) -> Self {
        Self {
            matrix: &self.matrix * C64::new(theta.cos(), theta.sin()),
            shape: self.shape.clone(),
        }
    }

    /// `U|ψ⟩`, renormalized to absorb the gate's unitarity defect.
    pub fn apply(&self, state: &PureState) -> Result<PureState> {
        if state.shape() != &self.shape {
            return Err(Error::InvalidShape(format!(
                "state shape {} does not match gate shape {}",
                state.shape(),
                self.shape
            )));
        }
        PureState::normalize(&self.matrix * state.amplitudes(), self.shape.clone())
    }
}

/// `‖M†M − I‖_F`.
pub fn unitarity_residual(m: &CMatrix) -> f64 {
    let n = m.ncols();
    (m.adjoint() * m - CMatrix::identity(n, n)).norm()
}

/// Kronecker product of vectors, first factor slowest.
pub fn kron_vectors(factors: &[CVector]) -> CVector {
    let mut out = CVector::from_element(1, C64::new(1.0, 0.0));
    for f in factors {
        out = out.kronecker(f);
    }
    out
}

/// Schmidt decomposition across a cut.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtData {
    /// Nonincreasing Schmidt coefficients.
    pub coefficients: Vec<f64>,
    /// Orthonormal columns on the Γ side.
    pub left_basis: CMatrix,
    /// Orthonormal columns on the Γᶜ side; the state is `Σ λ_i u_i ⊗ v_i`.
    pub right_basis: CMatrix,
}

/// Cut matrix of a state.
pub fn matricize(state: &PureState, cut: &Cut) -> Result<CMatrix> {
    Ok(CutLayout::new(state.shape(), cut)?.matricize(state.amplitudes()))
}

/// Full Schmidt decomposition via the SVD of the cut matrix.
pub fn schmidt(state: &PureState, cut: &Cut) -> Result<SchmidtData> {
    let m = matricize(state, cut)?;
    let svd = m.svd(true, true);
    let (u, v_t) = match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => (u, v_t),
        _ => {
            return Err(Error::InternalInconsistency(String::from(
                "SVD did not return singular vectors",
            )))
        }
    };
    let s = svd.singular_values;
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&i, &j| s[j].total_cmp(&s[i]).then(i.cmp(&j)));
    let coefficients = order.iter().map(|&i| s[i].max(0.0)).collect();
    let left_basis = CMatrix::from_fn(u.nrows(), order.len(), |r, c| u[(r, order[c])]);
    let right_basis = CMatrix::from_fn(v_t.ncols(), order.len(), |r, c| v_t[(order[c], r)]);
    Ok(SchmidtData {
        coefficients,
        left_basis,
        right_basis,
    })
}

/// Singular values of a matrix, sorted nonincreasing.
pub fn sorted_singular_values(m: &CMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = m.singular_values().iter().map(|x| x.max(0.0)).collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Schmidt coefficients only.
pub fn schmidt_coefficients(state: &PureState, cut: &Cut) -> Result<Vec<f64>> {
    Ok(sorted_singular_values(&matricize(state, cut)?))
}

/// `−Σ p log₂ p` over `p = λ²`, with `0 log 0 = 0`.
pub fn entropy_from_coefficients(coefficients: &[f64]) -> f64 {
    let s: f64 = coefficients
        .iter()
        .map(|l| l * l)
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.log2())
        .sum();
    s.max(0.0)
}

/// `((Σλ)² − 1)/2`.
pub fn negativity_from_coefficients(coefficients: &[f64]) -> f64 {
    let s: f64 = coefficients.iter().sum();
    ((s * s - 1.0) / 2.0).max(0.0)
}

/// `Σ_{i>k} λ_i²`.
pub fn tail_from_coefficients(coefficients: &[f64], k: usize) -> f64 {
    coefficients.iter().skip(k).map(|l| l * l).sum()
}

/// Entanglement entropy in bits.
pub fn entropy_of_entanglement(state: &PureState, cut: &Cut) -> Result<f64> {
    Ok(entropy_from_coefficients(&schmidt_coefficients(state, cut)?))
}

/// Number of coefficients above `tol_rel · λ_1`.
pub fn schmidt_rank(state: &PureState, cut: &Cut, tol_rel: f64) -> Result<usize> {
    if !(tol_rel > 0.0 && tol_rel < 1.0) {
        return Err(Error::DomainError(format!(
            "relative tolerance {tol_rel} outside (0, 1)"
        )));
    }
    let c = schmidt_coefficients(state, cut)?;
    let lead = c.first().copied().unwrap_or(0.0);
    Ok(c.iter().filter(|&&l| l > tol_rel * lead).count())
}

/// Negativity `(‖ρ^{T_B}‖₁ − 1)/2`, cross-checked against the Schmidt form.
pub fn negativity(state: &PureState, cut: &Cut) -> Result<f64> {
    let m = matricize(state, cut)?;
    let trace_form = negativity_partial_transpose(&m);
    let schmidt_form = negativity_from_coefficients(&sorted_singular_values(&m));
    if (trace_form - schmidt_form).abs() > 1e-6 {
        return Err(Error::InternalInconsistency(format!(
            "negativity forms disagree: trace norm {trace_form}, Schmidt {schmidt_form}"
        )));
    }
    Ok(trace_form)
}

/// Trace-norm negativity of `|ψ⟩⟨ψ|` given the cut matrix of `ψ`.
pub fn negativity_partial_transpose(m: &CMatrix) -> f64 {
    let (r, c) = m.shape();
    let n = r * c;
    // ρ^{T_B}[(i,j),(k,l)] = M[i,l] conj(M[k,j])
    let pt = CMatrix::from_fn(n, n, |row, col| {
        let (i, j) = (row / c, row % c);
        let (k, l) = (col / c, col % c);
        m[(i, l)] * m[(k, j)].conj()
    });
    let trace_norm: f64 = pt.symmetric_eigenvalues().iter().map(|e| e.abs()).sum();
    ((trace_norm - 1.0) / 2.0).max(0.0)
}

/// `Σ_{i>k} λ_i²` across the cut.
pub fn tail_energy(state: &PureState, cut: &Cut, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidRank {
            rank: k,
            reason: String::from("tail index must be at least 1"),
        });
    }
    Ok(tail_from_coefficients(&schmidt_coefficients(state, cut)?, k))
}
