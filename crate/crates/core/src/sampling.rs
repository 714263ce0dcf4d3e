//! Seeded Haar sampling.
//!
//! The generator is xoshiro256++ (`rand_xoshiro` 0.6) seeded through its
//! SplitMix64 expansion of a 64-bit seed. Uniforms are drawn on the open
//! interval `(0, 1)` as `((x >> 11) + 0.5) / 2^53` and Gaussians come from the
//! Box–Muller transform, consuming two uniforms per pair of normals. Child
//! streams are derived with [`Seed::derive`], so parallel work is independent
//! of scheduling.

use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::error::{Error, Result};
use crate::tensor::{CMatrix, CVector, PureState, Shape, C64};

/// 64-bit seed identifying a deterministic random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Seed(pub u64);

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl Seed {
    /// Child seed for task `index`.
    pub fn derive(self, index: u64) -> Seed {
        Seed(mix64(self.0 ^ mix64(index.wrapping_add(1).wrapping_mul(GOLDEN))))
    }

    /// Fresh generator for this seed.
    pub fn rng(self) -> Rng {
        Rng::new(self)
    }
}

impl From<u64> for Seed {
    fn from(v: u64) -> Self {
        Seed(v)
    }
}

/// Random stream with uniform and Gaussian draws.
#[derive(Debug, Clone)]
pub struct Rng {
    inner: Xoshiro256PlusPlus,
    spare: Option<f64>,
}

impl Rng {
    pub fn new(seed: Seed) -> Self {
        Self {
            inner: Xoshiro256PlusPlus::seed_from_u64(seed.0),
            spare: None,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on the open interval `(0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        ((self.inner.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal.
    pub fn gaussian(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let (z0, z1) = box_muller(self.uniform(), self.uniform());
        self.spare = Some(z1);
        z0
    }

    /// Standard complex normal, `E|z|² = 1`.
    pub fn complex_gaussian(&mut self) -> C64 {
        let s = core::f64::consts::FRAC_1_SQRT_2;
        C64::new(self.gaussian() * s, self.gaussian() * s)
    }

    /// Vector of independent complex normals.
    pub fn complex_gaussian_vector(&mut self, n: usize) -> CVector {
        CVector::from_iterator(n, (0..n).map(|_| self.complex_gaussian()))
    }

    /// Uniform unit vector in `C^n`.
    pub fn unit_vector(&mut self, n: usize) -> CVector {
        loop {
            let v = self.complex_gaussian_vector(n);
            let norm = v.norm();
            if norm > 1e-300 {
                return v / C64::new(norm, 0.0);
            }
        }
    }
}

/// Box–Muller transform of two open-interval uniforms.
pub fn box_muller(u1: f64, u2: f64) -> (f64, f64) {
    let r = (-2.0 * u1.ln()).sqrt();
    let t = core::f64::consts::TAU * u2;
    (r * t.cos(), r * t.sin())
}

/// Haar-random `n × n` unitary.
///
/// Entries of a complex Ginibre matrix are drawn row by row; the QR factor
/// `Q` is multiplied by the phases of `diag(R)` so the result is exactly Haar.
pub fn haar_unitary(n: usize, seed: Seed) -> CMatrix {
    let mut rng = seed.rng();
    haar_unitary_from(n, &mut rng)
}

pub(crate) fn haar_unitary_from(n: usize, rng: &mut Rng) -> CMatrix {
    let n = n.max(1);
    let mut z = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            z[(i, j)] = rng.complex_gaussian();
        }
    }
    let qr = z.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        let d = r[(j, j)];
        let a = d.norm();
        let phase = if a > 0.0 {
            d / C64::new(a, 0.0)
        } else {
            C64::new(1.0, 0.0)
        };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    q
}

/// Haar-random pure state on `shape`.
pub fn haar_state(shape: &Shape, seed: Seed) -> PureState {
    let mut rng = seed.rng();
    let v = rng.unit_vector(shape.total());
    PureState::from_parts_unchecked(v, shape.clone())
}

/// Haar-random product of per-party unit vectors.
pub fn haar_product(dims: &[usize], rng: &mut Rng) -> Vec<CVector> {
    dims.iter().map(|&d| rng.unit_vector(d)).collect()
}

/// Subspace of `C^{∏d}` given by an isometry with orthonormal columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    isometry: CMatrix,
    shape: Shape,
}

impl Subspace {
    /// Accepts an `n × k` isometry with columns orthonormal within 1e-10.
    pub fn new(isometry: CMatrix, shape: Shape) -> Result<Self> {
        let (n, k) = isometry.shape();
        if n != shape.total() || k == 0 || k > n {
            return Err(Error::InvalidDimension(format!(
                "isometry {n}x{k} incompatible with shape {shape}"
            )));
        }
        let residual = (isometry.adjoint() * &isometry - CMatrix::identity(k, k)).norm();
        if !(residual <= 1e-10) {
            return Err(Error::InvalidDimension(format!(
                "columns are not orthonormal (residual {residual:e})"
            )));
        }
        Ok(Self { isometry, shape })
    }

    /// Span of the given vectors, orthonormalized in order.
    pub fn span(vectors: &[CVector], shape: Shape) -> Result<Self> {
        let n = shape.total();
        let mut cols: Vec<CVector> = Vec::new();
        for v in vectors {
            if v.len() != n {
                return Err(Error::InvalidDimension(format!(
                    "vector of length {} in ambient dimension {n}",
                    v.len()
                )));
            }
            let mut w = v.clone();
            for _ in 0..2 {
                for c in &cols {
                    let p = c.dotc(&w);
                    w -= c * p;
                }
            }
            let norm = w.norm();
            if norm < 1e-12 * v.norm().max(1e-300) || norm == 0.0 {
                return Err(Error::InvalidDimension(
                    "spanning vectors are linearly dependent".into(),
                ));
            }
            cols.push(w / C64::new(norm, 0.0));
        }
        Self::new(CMatrix::from_columns(&cols), shape)
    }

    pub fn isometry(&self) -> &CMatrix {
        &self.isometry
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.isometry.ncols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.isometry.nrows()
    }

    /// Orthogonal projector `P = Q Q†`.
    pub fn projector(&self) -> CMatrix {
        &self.isometry * self.isometry.adjoint()
    }

    /// Orthogonal complement, or `None` when the subspace is the full space.
    pub fn complement(&self) -> Option<Subspace> {
        let n = self.ambient_dim();
        let k = self.dim();
        if k == n {
            return None;
        }
        let q = CMatrix::identity(n, n) - self.projector();
        let eig = q.symmetric_eigen();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let cols: Vec<CVector> = order[..n - k]
            .iter()
            .map(|&i| eig.eigenvectors.column(i).into_owned())
            .collect();
        Subspace::span(&cols, self.shape.clone()).ok()
    }
}

/// First `k` columns of a Haar unitary on `shape`.
pub fn random_subspace(shape: &Shape, k: usize, seed: Seed) -> Result<Subspace> {
    let n = shape.total();
    if k == 0 || k > n {
        return Err(Error::InvalidDimension(format!(
            "subspace dimension {k} outside 1..={n}"
        )));
    }
    let u = haar_unitary(n, seed);
    Ok(Subspace {
        isometry: u.columns(0, k).into_owned(),
        shape: shape.clone(),
    })
}
