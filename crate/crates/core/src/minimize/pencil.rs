//! Exact-structure count of rank-deficient members of a two-dimensional
//! subspace of `C^d ⊗ C^d`.
//!
//! For a subspace spanned by `ψ₁, ψ₂`, the members `ψ₁ + tψ₂` with singular
//! cut matrix are the roots of the degree-`d` polynomial `det(M₁ + tM₂)`; the
//! member `ψ₂` itself is added when `det M₂ = 0`. On qubit pairs these are
//! exactly the product states in the subspace.

use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::sampling::Subspace;
use crate::tensor::{CMatrix, Cut, CutLayout, C64};

/// Coefficients below this (relative to the largest) are treated as zero.
pub const COEFFICIENT_TOL: f64 = 1e-10;
/// Roots closer than this (relative) are merged.
pub const ROOT_MERGE_TOL: f64 = 1e-6;

/// Number of singular members of the pencil.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PencilCount {
    Finite(usize),
    /// The determinant vanishes identically.
    Infinite,
}

/// Counts projectively distinct members of the pencil with singular cut
/// matrix.
pub fn pencil_product_count(subspace: &Subspace) -> Result<PencilCount> {
    if subspace.dim() != 2 {
        return Err(Error::InvalidDimension(format!(
            "pencil count needs a 2-dimensional subspace, got {}",
            subspace.dim()
        )));
    }
    let shape = subspace.shape();
    if shape.parties() != 2 || shape.dims()[0] != shape.dims()[1] {
        return Err(Error::InvalidDimension(format!(
            "pencil count needs a d⊗d shape, got {shape}"
        )));
    }
    let d = shape.dims()[0];
    let layout = CutLayout::new(shape, &Cut::new(2, &[0])?)?;
    let q = subspace.isometry();
    let m1 = layout.matricize(&q.column(0).into_owned());
    let m2 = layout.matricize(&q.column(1).into_owned());
    let coeffs = det_polynomial(&m1, &m2, d);

    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if scale < COEFFICIENT_TOL {
        return Ok(PencilCount::Infinite);
    }
    let zero = |c: &C64| c.norm() <= COEFFICIENT_TOL * scale.max(1.0);
    let degree = (0..=d).rev().find(|&j| !zero(&coeffs[j])).unwrap_or(0);
    let at_infinity = usize::from(zero(&coeffs[d]));
    let roots = polynomial_roots(&coeffs[..=degree])?;
    Ok(PencilCount::Finite(distinct(&roots) + at_infinity))
}

/// Coefficients `c_0..c_d` of `det(M₁ + t M₂)` by interpolation at the
/// `(d+1)`-th roots of unity.
fn det_polynomial(m1: &CMatrix, m2: &CMatrix, d: usize) -> Vec<C64> {
    let n = d + 1;
    let omega = |k: usize| {
        let a = core::f64::consts::TAU * k as f64 / n as f64;
        C64::new(a.cos(), a.sin())
    };
    let values: Vec<C64> = (0..n).map(|k| (m1 + m2 * omega(k)).determinant()).collect();
    (0..n)
        .map(|j| {
            let s: C64 = (0..n).map(|k| values[k] * omega((j * k) % n).conj()).sum();
            s / C64::new(n as f64, 0.0)
        })
        .collect()
}

/// Roots of `Σ c_j t^j` (leading coefficient nonzero) via the companion matrix.
fn polynomial_roots(coeffs: &[C64]) -> Result<Vec<C64>> {
    let m = coeffs.len() - 1;
    if m == 0 {
        return Ok(Vec::new());
    }
    let lead = coeffs[m];
    let mut companion = CMatrix::zeros(m, m);
    for i in 1..m {
        companion[(i, i - 1)] = C64::new(1.0, 0.0);
    }
    for i in 0..m {
        companion[(i, m - 1)] = -coeffs[i] / lead;
    }
    companion
        .schur()
        .eigenvalues()
        .map(|e| e.iter().copied().collect())
        .ok_or_else(|| Error::InternalInconsistency("companion eigenvalues did not converge".into()))
}

fn distinct(roots: &[C64]) -> usize {
    let mut kept: Vec<C64> = Vec::new();
    for r in roots {
        let dup = kept
            .iter()
            .any(|k| (k - r).norm() <= ROOT_MERGE_TOL * r.norm().max(1.0));
        if !dup {
            kept.push(*r);
        }
    }
    kept.len()
}
