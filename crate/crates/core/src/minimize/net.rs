//! Certified lower bound on the minimum entropy via product ε-nets.
//!
//! Each party gets a deterministic low-discrepancy point set (a spherical
//! Fibonacci lattice on the Bloch sphere for qubits, a Kronecker sequence
//! pushed through Box–Muller otherwise), grown by doubling until every probe
//! state lies within `ε/4` of a point up to a global phase. Tensor products of
//! such points then approximate any product input within `ε/2`, and the
//! entropy Lipschitz constant `√8 log₂ d_A` turns the net minimum into a bound
//! after subtracting `√2 ε log₂ d_A`.

use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::bounds::net_size_product;
use crate::error::{Error, Result};
use crate::sampling::{box_muller, Seed};
use crate::tensor::{sorted_singular_values, CMatrix, CVector, Gate, C64};

/// Default refusal budget for the theoretical net size.
pub const DEFAULT_NET_BUDGET: f64 = 1e15;

/// Construction parameters for [`certified_lower_bound_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetConfig {
    /// Refuse when `(10/ε)^{2(d_A+d_B)}` exceeds this.
    pub budget: f64,
    /// Random probe states used to validate each party net.
    pub probes: usize,
    /// Initial number of points per party.
    pub initial_points: usize,
    /// Give up growing a party net beyond this many points.
    pub max_points: usize,
}

impl Default for NetConfig {
    fn default() -> Self {
        Self {
            budget: DEFAULT_NET_BUDGET,
            probes: 10_000,
            initial_points: 64,
            max_points: 1 << 16,
        }
    }
}

/// Point set covering one party's projective state space.
#[derive(Debug, Clone, PartialEq)]
pub struct PartyNet {
    pub dim: usize,
    pub points: Vec<CVector>,
    /// Requested covering radius (distance modulo phase).
    pub radius: f64,
    /// Largest probe distance to the nearest point.
    pub probe_worst: f64,
}

/// Summary of the nets used for a certified bound.
#[derive(Debug, Clone, PartialEq)]
pub struct NetSpec {
    pub epsilon: f64,
    pub points_per_party: Vec<usize>,
    /// `(10/ε)^{2(d_A+d_B)}`.
    pub theoretical_size: f64,
    /// Largest probe distance over parties (each at most `ε/4`).
    pub probe_worst: Vec<f64>,
}

/// Certified lower bound and its ingredients.
#[derive(Debug, Clone, PartialEq)]
pub struct CertifiedBound {
    /// `max(0, raw_min − correction)`.
    pub value: f64,
    /// Minimum entropy over the product net.
    pub raw_min: f64,
    /// `√2 ε log₂ d_A`.
    pub correction: f64,
    pub net: NetSpec,
}

/// `min_θ ‖a − e^{iθ} b‖ = √(2 − 2|⟨a, b⟩|)` for unit vectors.
pub fn phase_distance(a: &CVector, b: &CVector) -> f64 {
    (2.0 - 2.0 * a.dotc(b).norm()).max(0.0).sqrt()
}

fn frac(x: f64) -> f64 {
    x - x.floor()
}

/// First `count` points of a low-discrepancy set of unit vectors in `C^dim`,
/// rotated by `shift`.
pub fn low_discrepancy_states(dim: usize, count: usize, shift: &[f64]) -> Vec<CVector> {
    if dim == 2 {
        return fibonacci_bloch(count, shift.first().copied().unwrap_or(0.0));
    }
    let m = 2 * dim;
    // Generalized golden ratio: the root of x^{m+1} = x + 1.
    let mut phi = 2.0f64;
    for _ in 0..64 {
        phi = (1.0 + phi).powf(1.0 / (m as f64 + 1.0));
    }
    let alphas: Vec<f64> = (1..=m).map(|j| frac(1.0 / phi.powi(j as i32))).collect();
    (0..count)
        .map(|i| {
            let u: Vec<f64> = alphas
                .iter()
                .enumerate()
                .map(|(j, a)| {
                    let s = shift.get(j).copied().unwrap_or(0.0);
                    frac(0.5 + s + (i as f64 + 1.0) * a).clamp(1e-300, 1.0 - 1e-16)
                })
                .collect();
            let v = CVector::from_iterator(
                dim,
                (0..dim).map(|k| {
                    let (re, im) = box_muller(u[2 * k], u[2 * k + 1]);
                    C64::new(re, im)
                }),
            );
            let n = v.norm();
            v / C64::new(n, 0.0)
        })
        .collect()
}

fn fibonacci_bloch(count: usize, shift: f64) -> Vec<CVector> {
    let golden = (1.0 + 5.0f64.sqrt()) / 2.0;
    (0..count)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / count as f64;
            let theta = z.clamp(-1.0, 1.0).acos();
            let phi = core::f64::consts::TAU * frac(i as f64 / golden + shift);
            let (s, c) = (theta / 2.0).sin_cos();
            CVector::from_vec(alloc::vec![C64::new(c, 0.0), C64::new(s * phi.cos(), s * phi.sin())])
        })
        .collect()
}

/// Grows a party net by doubling until `probes` random states are covered.
pub fn build_party_net(dim: usize, radius: f64, seed: Seed, config: &NetConfig) -> Result<PartyNet> {
    let mut rng = seed.rng();
    let shift: Vec<f64> = (0..2 * dim).map(|_| rng.uniform()).collect();
    let probes: Vec<CVector> = (0..config.probes).map(|_| rng.unit_vector(dim)).collect();
    let mut count = config.initial_points.max(1);
    loop {
        let points = low_discrepancy_states(dim, count, &shift);
        let worst = probes
            .iter()
            .map(|p| {
                points
                    .iter()
                    .map(|q| phase_distance(p, q))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max);
        if worst <= radius {
            return Ok(PartyNet {
                dim,
                points,
                radius,
                probe_worst: worst,
            });
        }
        if count >= config.max_points {
            return Err(Error::BudgetExceeded {
                net_size: count as f64,
                budget: config.max_points as f64,
            });
        }
        count = (count * 2).min(config.max_points);
    }
}

/// Certified lower bound with default settings.
pub fn certified_lower_bound(gate: &Gate, epsilon: f64, seed: Seed) -> Result<CertifiedBound> {
    certified_lower_bound_with(gate, epsilon, seed, &NetConfig::default())
}

/// `max(0, min_{net} S(U x) − √2 ε log₂ d_A)` over a product ε-net.
pub fn certified_lower_bound_with(gate: &Gate, epsilon: f64, seed: Seed, config: &NetConfig) -> Result<CertifiedBound> {
    let shape = gate.shape();
    if shape.parties() != 2 {
        return Err(Error::InvalidShape(format!(
            "certified bound needs a bipartite gate, got {} parties",
            shape.parties()
        )));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::DomainError(format!("epsilon {epsilon} outside (0, 1)")));
    }
    let (da, db) = (shape.dims()[0], shape.dims()[1]);
    let d_small = da.min(db);
    let size = net_size_product(d_small, da.max(db), epsilon)?;
    let theoretical_size = size.to_f64();
    if size.ln() > config.budget.ln() {
        return Err(Error::BudgetExceeded {
            net_size: theoretical_size,
            budget: config.budget,
        });
    }
    let radius = epsilon / 4.0;
    let net_a = build_party_net(da, radius, seed.derive(0), config)?;
    let net_b = build_party_net(db, radius, seed.derive(1), config)?;

    let u = gate.matrix();
    let mut raw_min = f64::INFINITY;
    for a in &net_a.points {
        // W = U (a ⊗ I_B), so U (a ⊗ b) = W b.
        let w = CMatrix::from_fn(u.nrows(), db, |row, j| {
            (0..da).map(|i| u[(row, i * db + j)] * a[i]).sum()
        });
        for b in &net_b.points {
            let phi = &w * b;
            let s = entropy_of_flat(&phi, da, db);
            if s < raw_min {
                raw_min = s;
            }
        }
    }
    if !raw_min.is_finite() {
        return Err(Error::NumericalFailure { restart: 0 });
    }
    let correction = 2.0f64.sqrt() * epsilon * (d_small as f64).log2();
    Ok(CertifiedBound {
        value: (raw_min - correction).max(0.0),
        raw_min,
        correction,
        net: NetSpec {
            epsilon,
            points_per_party: alloc::vec![net_a.points.len(), net_b.points.len()],
            theoretical_size,
            probe_worst: alloc::vec![net_a.probe_worst, net_b.probe_worst],
        },
    })
}

/// Entanglement entropy of a flat `da ⊗ db` vector, normalized on the fly.
fn entropy_of_flat(phi: &CVector, da: usize, db: usize) -> f64 {
    let norm2 = phi.norm_squared();
    let m = CMatrix::from_fn(da, db, |i, j| phi[i * db + j]);
    if da == 2 || db == 2 {
        // On a qubit side p(1 − p) = det ρ.
        let rho = if da == 2 { &m * m.adjoint() } else { m.adjoint() * &m };
        let det = (rho[(0, 0)] * rho[(1, 1)] - rho[(0, 1)] * rho[(1, 0)]).re / (norm2 * norm2);
        let disc = (1.0 - 4.0 * det.max(0.0)).max(0.0).sqrt();
        return binary_entropy((1.0 - disc) / 2.0);
    }
    let m = m / C64::new(norm2.sqrt(), 0.0);
    crate::tensor::entropy_from_coefficients(&sorted_singular_values(&m))
}

fn binary_entropy(p: f64) -> f64 {
    let h = |x: f64| if x > 0.0 { -x * x.log2() } else { 0.0 };
    h(p) + h(1.0 - p)
}
