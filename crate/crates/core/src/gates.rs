//! Explicit gates: the order-12 Hadamard example, Householder-type
//! entanglers, ancilla extension and the ancilla slice.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::minimize::estimate::{min_over_subspace, EstimateReport};
use crate::sampling::{random_subspace, Seed, Subspace};
use crate::tensor::{CMatrix, CVector, Cut, Gate, PureState, Shape, C64};
use crate::varieties::BipartiteDims;

/// Sign pattern of the order-12 Hadamard gate on `3 ⊗ 4`.
pub const HADAMARD12_SIGNS: [[i8; 12]; 12] = [
    [1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1],
    [1, 1, -1, 1, -1, -1, -1, 1, 1, 1, -1, 1],
    [1, 1, 1, -1, 1, -1, -1, -1, 1, 1, 1, -1],
    [1, -1, 1, 1, -1, 1, -1, -1, -1, 1, 1, 1],
    [1, 1, -1, 1, 1, -1, 1, -1, -1, -1, 1, 1],
    [1, 1, 1, -1, 1, 1, -1, 1, -1, -1, -1, 1],
    [1, 1, 1, 1, -1, 1, 1, -1, 1, -1, -1, -1],
    [1, -1, 1, 1, 1, -1, 1, 1, -1, 1, -1, -1],
    [1, -1, -1, 1, 1, 1, -1, 1, 1, -1, 1, -1],
    [1, -1, -1, -1, 1, 1, 1, -1, 1, 1, -1, 1],
    [1, 1, -1, -1, -1, 1, 1, 1, -1, 1, 1, -1],
    [1, -1, 1, -1, -1, -1, 1, 1, 1, -1, 1, 1],
];

/// Verification margins below this count as numerically zero.
pub const HOUSEHOLDER_MARGIN: f64 = 1e-6;
/// Subspace draws tried before giving up.
pub const HOUSEHOLDER_MAX_ATTEMPTS: usize = 16;
/// Slices with norm below this are rejected.
pub const SLICE_NORM_FLOOR: f64 = 1e-14;

/// `H / √12` on `3 ⊗ 4`.
pub fn hadamard12() -> Gate {
    let scale = 1.0 / 12f64.sqrt();
    let m = CMatrix::from_fn(12, 12, |i, j| C64::new(f64::from(HADAMARD12_SIGNS[i][j]) * scale, 0.0));
    Gate::new(m, Shape::bipartite(3, 4).expect("valid shape")).expect("Hadamard matrix is unitary")
}

/// Parameters of a Householder-type entangler `U = I − 2P`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HouseholderSpec {
    pub d: BipartiteDims,
    /// Every output should have Schmidt rank at least `r`.
    pub r: usize,
    /// Dimension `k` of the reflected subspace.
    pub subspace_dim: usize,
}

impl HouseholderSpec {
    /// Uses `k = d_A d_B − (d_A − 1)(d_B − 1)`; requires the existence
    /// inequality and `r ≥ 2`.
    pub fn new(d: BipartiteDims, r: usize) -> Result<Self> {
        if !householder_exists(d, r)? {
            return Err(Error::InvalidRank {
                rank: r,
                reason: format!("no Householder entangler for {}x{}", d.d_a(), d.d_b()),
            });
        }
        if r < 2 {
            return Err(Error::InvalidRank {
                rank: r,
                reason: String::from("the guarantee is vacuous for r = 1"),
            });
        }
        let (a, b) = (d.d_a(), d.d_b());
        Ok(Self {
            d,
            r,
            subspace_dim: a * b - (a - 1) * (b - 1),
        })
    }
}

/// `d_A d_B − (d_A − r)(d_B − r) ≤ (d_A − 1)(d_B − 1)`.
pub fn householder_exists(d: BipartiteDims, r: usize) -> Result<bool> {
    let (a, b) = (d.d_a(), d.d_b());
    if r < 1 || r > a {
        return Err(Error::InvalidRank {
            rank: r,
            reason: format!("must lie in 1..={a}"),
        });
    }
    Ok(a * b - (a - r) * (b - r) <= (a - 1) * (b - 1))
}

/// A verified Householder entangler.
#[derive(Debug, Clone)]
pub struct HouseholderBuild {
    pub gate: Gate,
    pub spec: HouseholderSpec,
    pub subspace: Subspace,
    pub complement: Subspace,
    /// Minimum of `tail_energy(r)` over the reflected subspace.
    pub subspace_margin: f64,
    /// Minimum of `tail_energy(1)` over its complement.
    pub complement_margin: f64,
    /// Seed of the accepted subspace draw.
    pub seed: Seed,
    pub attempts: usize,
}

/// Builds `U = I − 2P` with the default sequential verifier.
pub fn build_householder(d: BipartiteDims, r: usize, seed: Seed, verify_restarts: usize) -> Result<HouseholderBuild> {
    build_householder_with(d, r, seed, |s, cut, k, vseed| {
        min_over_subspace(s, cut, k, verify_restarts, vseed)
    })
}

/// Builds `U = I − 2P`, verifying each candidate with `verify(subspace, cut,
/// k, seed)`, which must return the minimum of `tail_energy(k)` over the
/// subspace.
pub fn build_householder_with<F>(d: BipartiteDims, r: usize, seed: Seed, verify: F) -> Result<HouseholderBuild>
where
    F: Fn(&Subspace, &Cut, usize, Seed) -> Result<EstimateReport>,
{
    let spec = HouseholderSpec::new(d, r)?;
    let shape = Shape::bipartite(d.d_a(), d.d_b())?;
    let cut = Cut::new(2, &[0])?;
    let mut best = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for attempt in 0..HOUSEHOLDER_MAX_ATTEMPTS {
        let draw = seed.derive(attempt as u64);
        let subspace = random_subspace(&shape, spec.subspace_dim, draw)?;
        let complement = subspace
            .complement()
            .ok_or_else(|| Error::InternalInconsistency(String::from("reflected subspace is the whole space")))?;
        let inner = verify(&subspace, &cut, r, draw.derive(0))?.value;
        let outer = verify(&complement, &cut, 1, draw.derive(1))?.value;
        if inner.min(outer) > best.0.min(best.1) {
            best = (inner, outer);
        }
        if inner > HOUSEHOLDER_MARGIN && outer > HOUSEHOLDER_MARGIN {
            let p = subspace.projector();
            let n = p.nrows();
            let u = CMatrix::identity(n, n) - p * C64::new(2.0, 0.0);
            let gate = Gate::new(u, shape)?;
            return Ok(HouseholderBuild {
                gate,
                spec,
                subspace,
                complement,
                subspace_margin: inner,
                complement_margin: outer,
                seed: draw,
                attempts: attempt + 1,
            });
        }
    }
    Err(Error::ConstructionFailed {
        attempts: HOUSEHOLDER_MAX_ATTEMPTS,
        best_subspace_margin: best.0,
        best_complement_margin: best.1,
    })
}

/// Ancilla dimensions `(d_A′, d_B′)`; a dimension of 1 means no ancilla.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AncillaDims {
    pub a: usize,
    pub b: usize,
}

impl AncillaDims {
    pub fn new(a: usize, b: usize) -> Result<Self> {
        if a == 0 || b == 0 {
            return Err(Error::InvalidDimension(String::from(
                "ancilla dimensions must be at least 1",
            )));
        }
        Ok(Self { a, b })
    }

    /// Parties `(A′, A, B, B′)` with trivial ancillas dropped.
    pub fn extended_dims(self, d_a: usize, d_b: usize) -> Vec<usize> {
        let mut dims = Vec::with_capacity(4);
        if self.a > 1 {
            dims.push(self.a);
        }
        dims.push(d_a);
        dims.push(d_b);
        if self.b > 1 {
            dims.push(self.b);
        }
        dims
    }

    /// The `(A′A : BB′)` cut of the extended shape.
    pub fn system_cut(self) -> Result<Cut> {
        let parties = 2 + usize::from(self.a > 1) + usize::from(self.b > 1);
        if self.a > 1 {
            Cut::new(parties, &[0, 1])
        } else {
            Cut::new(parties, &[0])
        }
    }
}

/// `I_{A′} ⊗ U ⊗ I_{B′}` on parties ordered `(A′, A, B, B′)`.
pub fn extend_with_ancilla(gate: &Gate, ancilla: AncillaDims) -> Result<Gate> {
    let dims = gate.shape().dims();
    if dims.len() != 2 {
        return Err(Error::InvalidShape(format!(
            "ancilla extension needs a bipartite gate, got {}",
            gate.shape()
        )));
    }
    let u = gate.matrix();
    let ia = CMatrix::identity(ancilla.a, ancilla.a);
    let ib = CMatrix::identity(ancilla.b, ancilla.b);
    let m = ia.kronecker(u).kronecker(&ib);
    let shape = Shape::new(ancilla.extended_dims(dims[0], dims[1]))?;
    Gate::new(m, shape)
}

/// A normalized slice together with its norm before normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct Slice {
    pub state: PureState,
    pub norm: f64,
}

/// `(⟨i′| ⊗ I ⊗ I ⊗ ⟨j′|)|ψ⟩` for `ψ` on `(A′, A, B, B′)`.
pub fn ancilla_slice(state: &PureState, ancilla: AncillaDims, i: usize, j: usize) -> Result<Slice> {
    let dims = state.shape().dims();
    let expected = 2 + usize::from(ancilla.a > 1) + usize::from(ancilla.b > 1);
    if dims.len() != expected {
        return Err(Error::InvalidShape(format!(
            "expected {expected} parties for ancillas {}x{}, got {}",
            ancilla.a,
            ancilla.b,
            state.shape()
        )));
    }
    if i >= ancilla.a || j >= ancilla.b {
        return Err(Error::InvalidDimension(format!(
            "slice ({i}, {j}) outside ancilla dimensions {}x{}",
            ancilla.a, ancilla.b
        )));
    }
    let offset = usize::from(ancilla.a > 1);
    let (d_a, d_b) = (dims[offset], dims[offset + 1]);
    if (ancilla.a > 1 && dims[0] != ancilla.a) || (ancilla.b > 1 && dims[offset + 2] != ancilla.b) {
        return Err(Error::InvalidShape(format!(
            "ancilla dimensions do not match {}",
            state.shape()
        )));
    }
    let amps = state.amplitudes();
    let slice = CVector::from_fn(d_a * d_b, |xy, _| amps[(i * d_a * d_b + xy) * ancilla.b + j]);
    let norm = slice.norm();
    if norm < SLICE_NORM_FLOOR {
        return Err(Error::ZeroSlice { norm });
    }
    let state = PureState::normalize(slice, Shape::bipartite(d_a, d_b)?)?;
    Ok(Slice { state, norm })
}
