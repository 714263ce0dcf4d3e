//! Riemannian gradient descent on a product of unit spheres.
//!
//! A point is a list of unit vectors, one per block. The Euclidean gradient of
//! each block is projected onto the tangent space, `g − Re⟨x, g⟩ x`, and the
//! retraction is `x ↦ (x − t g)/‖x − t g‖`. Steps follow Armijo backtracking.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::tensor::{kron_vectors, CMatrix, CVector, CutLayout, C64};

use super::objective::{value_and_gradient, value_of, ObjectiveKind};

/// Optimization direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Minimize,
    Maximize,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Direction::Minimize => 1.0,
            Direction::Maximize => -1.0,
        }
    }
}

/// Stopping and line-search parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DescentOptions {
    pub max_iterations: usize,
    pub gradient_tolerance: f64,
    pub armijo: f64,
    pub shrink: f64,
    pub initial_step: f64,
    /// A minimization whose value falls to this level counts as converged.
    pub value_floor: f64,
    /// Smallest trial step before the line search gives up.
    pub min_step: f64,
}

impl Default for DescentOptions {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            gradient_tolerance: 1e-9,
            armijo: 1e-4,
            shrink: 0.5,
            initial_step: 1.0,
            value_floor: 1e-14,
            min_step: 1e-20,
        }
    }
}

/// Smooth map from a product of spheres to a state vector.
pub trait Parametrization {
    /// Dimension of each sphere block.
    fn block_dims(&self) -> &[usize];
    /// State produced by the point.
    fn state(&self, point: &[CVector]) -> CVector;
    /// Euclidean gradient per block, given the gradient at the state.
    fn pullback(&self, point: &[CVector], grad_state: &CVector) -> Vec<CVector>;
}

/// `⊗ x_i ↦ U (⊗ x_i)`, or the bare product when `gate` is `None`.
#[derive(Debug, Clone)]
pub struct ProductMap {
    gate: Option<CMatrix>,
    adjoint: Option<CMatrix>,
    dims: Vec<usize>,
}

impl ProductMap {
    pub fn new(gate: Option<CMatrix>, dims: Vec<usize>) -> Self {
        let adjoint = gate.as_ref().map(|g| g.adjoint());
        Self { gate, adjoint, dims }
    }
}

impl Parametrization for ProductMap {
    fn block_dims(&self) -> &[usize] {
        &self.dims
    }

    fn state(&self, point: &[CVector]) -> CVector {
        let x = kron_vectors(point);
        match &self.gate {
            Some(u) => u * x,
            None => x,
        }
    }

    fn pullback(&self, point: &[CVector], grad_state: &CVector) -> Vec<CVector> {
        let gx = match &self.adjoint {
            Some(ua) => ua * grad_state,
            None => grad_state.clone(),
        };
        product_pullback(&self.dims, point, &gx)
    }
}

/// `h_i[a] = Σ_{I : I_i = a} g[I] Π_{j≠i} conj(x_j[I_j])`.
pub(crate) fn product_pullback(dims: &[usize], point: &[CVector], g: &CVector) -> Vec<CVector> {
    let n = dims.len();
    let mut strides = alloc::vec![1usize; n];
    for i in (0..n.saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    let mut out: Vec<CVector> = dims.iter().map(|&d| CVector::zeros(d)).collect();
    for i in 0..n {
        // Contract all other parties one at a time, keeping party i.
        let mut t: Vec<C64> = g.iter().copied().collect();
        let mut shape: Vec<usize> = dims.to_vec();
        for j in (0..n).rev() {
            if j == i {
                continue;
            }
            let inner: usize = shape[j + 1..].iter().product();
            let outer: usize = shape[..j].iter().product();
            let dj = shape[j];
            let mut next = alloc::vec![C64::new(0.0, 0.0); outer * inner];
            for o in 0..outer {
                for a in 0..dj {
                    let w = point[j][a].conj();
                    let base = (o * dj + a) * inner;
                    for r in 0..inner {
                        next[o * inner + r] += t[base + r] * w;
                    }
                }
            }
            t = next;
            shape[j] = 1;
        }
        out[i] = CVector::from_vec(t);
    }
    out
}

/// `c ↦ Q c` for an isometry `Q`; a single sphere block.
#[derive(Debug, Clone)]
pub struct SubspaceMap {
    isometry: CMatrix,
    adjoint: CMatrix,
    dims: [usize; 1],
}

impl SubspaceMap {
    pub fn new(isometry: CMatrix) -> Self {
        let k = isometry.ncols();
        Self {
            adjoint: isometry.adjoint(),
            isometry,
            dims: [k],
        }
    }
}

impl Parametrization for SubspaceMap {
    fn block_dims(&self) -> &[usize] {
        &self.dims
    }

    fn state(&self, point: &[CVector]) -> CVector {
        &self.isometry * &point[0]
    }

    fn pullback(&self, _point: &[CVector], grad_state: &CVector) -> Vec<CVector> {
        alloc::vec![&self.adjoint * grad_state]
    }
}

/// Result of one descent run.
#[derive(Debug, Clone, PartialEq)]
pub struct DescentOutcome {
    /// Objective value (not sign-flipped) at `point`.
    pub value: f64,
    pub point: Vec<CVector>,
    pub iterations: usize,
    pub converged: bool,
}

/// Objective composed with a parametrization and a cut layout.
pub struct Problem<'a, P: Parametrization> {
    pub map: &'a P,
    pub layout: &'a CutLayout,
    pub kind: ObjectiveKind,
}

impl<P: Parametrization> Problem<'_, P> {
    /// Objective value at a point.
    pub fn value(&self, point: &[CVector]) -> f64 {
        let m = self.layout.matricize(&self.map.state(point));
        value_of(self.kind, &crate::tensor::sorted_singular_values(&m))
    }

    fn value_and_riemannian_gradient(&self, point: &[CVector], sign: f64) -> (f64, Vec<CVector>) {
        let m = self.layout.matricize(&self.map.state(point));
        let (value, g) = value_and_gradient(self.kind, &m);
        let gs = self.layout.flatten(&g) * C64::new(sign, 0.0);
        let mut blocks = self.map.pullback(point, &gs);
        for (h, x) in blocks.iter_mut().zip(point) {
            let radial = x.dotc(h).re;
            *h -= x * C64::new(radial, 0.0);
        }
        (value, blocks)
    }

    /// Runs descent from `start` (blocks must be unit vectors).
    ///
    /// Returns `None` as soon as a non-finite objective value appears.
    pub fn descend(&self, start: Vec<CVector>, direction: Direction, opts: &DescentOptions) -> Option<DescentOutcome> {
        let sign = direction.sign();
        let mut x = start;
        let (mut value, mut grad) = self.value_and_riemannian_gradient(&x, sign);
        if !value.is_finite() {
            return None;
        }
        let mut iterations = 0;
        let mut converged = false;
        loop {
            let gnorm2: f64 = grad.iter().map(|g| g.norm_squared()).sum();
            if !gnorm2.is_finite() {
                return None;
            }
            if gnorm2.sqrt() <= opts.gradient_tolerance
                || (direction == Direction::Minimize && value <= opts.value_floor)
            {
                converged = true;
                break;
            }
            if iterations >= opts.max_iterations {
                break;
            }
            iterations += 1;
            let f0 = sign * value;
            let mut t = opts.initial_step;
            let mut accepted = None;
            while t >= opts.min_step {
                let trial: Vec<CVector> = x
                    .iter()
                    .zip(&grad)
                    .map(|(xi, gi)| {
                        let y = xi - gi * C64::new(t, 0.0);
                        let n = y.norm();
                        y / C64::new(n, 0.0)
                    })
                    .collect();
                let ft = self.value(&trial);
                if !ft.is_finite() {
                    return None;
                }
                if sign * ft <= f0 - opts.armijo * t * gnorm2 {
                    accepted = Some(trial);
                    break;
                }
                t *= opts.shrink;
            }
            match accepted {
                Some(trial) => {
                    x = trial;
                    let (v, g) = self.value_and_riemannian_gradient(&x, sign);
                    if !v.is_finite() {
                        return None;
                    }
                    value = v;
                    grad = g;
                }
                None => {
                    // No step decreases the objective at machine precision.
                    converged = true;
                    break;
                }
            }
        }
        Some(DescentOutcome {
            value,
            point: x,
            iterations,
            converged,
        })
    }
}
