//! Rank-`r` CP fits `ψ ≈ Σ_t ⊗_i a_i^t` by alternating least squares
//! followed by Levenberg–Marquardt refinement.

use alloc::string::String;
use alloc::vec::Vec;

use nalgebra::DMatrix;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::sampling::{Rng, Seed};
use crate::tensor::{CMatrix, CVector, PureState, Shape, C64};

/// Fit settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CpOptions {
    pub restarts: usize,
    /// Maximum ALS sweeps.
    pub als_sweeps: usize,
    /// ALS stops once a sweep improves the residual by less than this.
    pub improvement_tol: f64,
    /// Maximum Levenberg–Marquardt steps after ALS.
    pub lm_steps: usize,
    /// Relative ridge added to a singular normal matrix.
    pub ridge: f64,
}

impl Default for CpOptions {
    fn default() -> Self {
        Self {
            restarts: 8,
            als_sweeps: 500,
            improvement_tol: 1e-12,
            lm_steps: 4000,
            ridge: 1e-10,
        }
    }
}

/// A rank-`r` CP model of a state.
#[derive(Debug, Clone, PartialEq)]
pub struct CPModel {
    pub rank: usize,
    /// One `d_i × r` factor matrix per party; column `t` belongs to term `t`.
    pub factors: Vec<CMatrix>,
    /// `‖ψ − Σ_t ⊗_i a_i^t‖₂`.
    pub residual: f64,
    /// Largest norm `∏_i ‖a_i^t‖` of a single term.
    pub max_term_norm: f64,
    pub als_sweeps: usize,
    pub lm_steps: usize,
    /// ALS updates that needed the ridge.
    pub regularized_updates: usize,
    /// Restart that produced the model; `None` for a warm start.
    pub restart: Option<usize>,
}

impl CPModel {
    /// `Σ_t ⊗_i a_i^t` as a flat vector.
    pub fn reconstruct(&self) -> CVector {
        reconstruct(&self.factors, self.rank)
    }

    /// Norms `∏_i ‖a_i^t‖` of each term.
    pub fn term_norms(&self) -> Vec<f64> {
        term_norms(&self.factors, self.rank)
    }
}

fn term_norms(factors: &[CMatrix], r: usize) -> Vec<f64> {
    (0..r)
        .map(|t| factors.iter().map(|a| a.column(t).norm()).product())
        .collect()
}

fn dims_of(factors: &[CMatrix]) -> Vec<usize> {
    factors.iter().map(|a| a.nrows()).collect()
}

/// Calls `f(flat, multi_index)` for every index in row-major order.
fn for_each_index(dims: &[usize], mut f: impl FnMut(usize, &[usize])) {
    let total: usize = dims.iter().product();
    let mut idx = alloc::vec![0usize; dims.len()];
    for flat in 0..total {
        f(flat, &idx);
        for p in (0..dims.len()).rev() {
            idx[p] += 1;
            if idx[p] < dims[p] {
                break;
            }
            idx[p] = 0;
        }
    }
}

fn reconstruct(factors: &[CMatrix], r: usize) -> CVector {
    let dims = dims_of(factors);
    let mut out = CVector::zeros(dims.iter().product());
    for_each_index(&dims, |flat, idx| {
        out[flat] = (0..r)
            .map(|t| {
                idx.iter()
                    .enumerate()
                    .fold(C64::new(1.0, 0.0), |acc, (i, &k)| acc * factors[i][(k, t)])
            })
            .sum();
    });
    out
}

fn residual(psi: &CVector, factors: &[CMatrix], r: usize) -> f64 {
    (psi - reconstruct(factors, r)).norm()
}

fn random_factors(dims: &[usize], r: usize, rng: &mut Rng) -> Vec<CMatrix> {
    let scale = 1.0 / (r as f64).sqrt();
    dims.iter()
        .enumerate()
        .map(|(i, &d)| {
            let w = C64::new(if i == 0 { scale } else { 1.0 }, 0.0);
            let mut m = CMatrix::zeros(d, r);
            for t in 0..r {
                m.set_column(t, &(rng.unit_vector(d) * w));
            }
            m
        })
        .collect()
}

/// Outcome of one ALS update of party `i`.
fn als_update(psi: &CVector, factors: &mut [CMatrix], i: usize, r: usize, ridge: f64) -> Result<bool> {
    let dims = dims_of(factors);
    let mut gram = CMatrix::from_element(r, r, C64::new(1.0, 0.0));
    for (j, a) in factors.iter().enumerate() {
        if j != i {
            gram.component_mul_assign(&(a.adjoint() * a));
        }
    }
    let mut b = CMatrix::zeros(dims[i], r);
    for_each_index(&dims, |flat, idx| {
        let amp = psi[flat];
        if amp == C64::new(0.0, 0.0) {
            return;
        }
        for t in 0..r {
            let mut c = amp;
            for (j, &k) in idx.iter().enumerate() {
                if j != i {
                    c *= factors[j][(k, t)].conj();
                }
            }
            b[(idx[i], t)] += c;
        }
    });
    let rhs = b.transpose();
    let (solution, regularized) = match gram.clone().cholesky() {
        Some(ch) => (ch.solve(&rhs), false),
        None => {
            let tr: f64 = (0..r).map(|t| gram[(t, t)].re).sum::<f64>() / r as f64;
            let shift = ridge * tr.max(f64::MIN_POSITIVE);
            let reg = gram + CMatrix::identity(r, r) * C64::new(shift, 0.0);
            let ch = reg.cholesky().ok_or(Error::SingularUpdate { party: i })?;
            (ch.solve(&rhs), true)
        }
    };
    if solution.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::SingularUpdate { party: i });
    }
    factors[i] = solution.transpose();
    Ok(regularized)
}

struct AlsOutcome {
    factors: Vec<CMatrix>,
    residual: f64,
    sweeps: usize,
    regularized: usize,
}

fn run_als(psi: &CVector, mut factors: Vec<CMatrix>, r: usize, opts: &CpOptions) -> Result<AlsOutcome> {
    let mut current = residual(psi, &factors, r);
    let mut regularized = 0;
    let mut sweeps = 0;
    while sweeps < opts.als_sweeps {
        let saved = factors.clone();
        for i in 0..factors.len() {
            regularized += usize::from(als_update(psi, &mut factors, i, r, opts.ridge)?);
        }
        sweeps += 1;
        let next = residual(psi, &factors, r);
        if !(next <= current + opts.improvement_tol) {
            factors = saved;
            break;
        }
        let gain = current - next;
        current = next.min(current);
        if gain < opts.improvement_tol {
            break;
        }
    }
    Ok(AlsOutcome {
        factors,
        residual: current,
        sweeps,
        regularized,
    })
}

fn pack(factors: &[CMatrix]) -> Vec<f64> {
    let p: usize = factors.iter().map(|a| a.len()).sum();
    let mut x = alloc::vec![0.0; 2 * p];
    let mut o = 0;
    for a in factors {
        for k in 0..a.nrows() {
            for t in 0..a.ncols() {
                x[o] = a[(k, t)].re;
                x[p + o] = a[(k, t)].im;
                o += 1;
            }
        }
    }
    x
}

fn unpack(x: &[f64], dims: &[usize], r: usize) -> Vec<CMatrix> {
    let p = x.len() / 2;
    let mut o = 0;
    dims.iter()
        .map(|&d| {
            let mut a = CMatrix::zeros(d, r);
            for k in 0..d {
                for t in 0..r {
                    a[(k, t)] = C64::new(x[o], x[p + o]);
                    o += 1;
                }
            }
            a
        })
        .collect()
}

/// Real Jacobian of `[Re ψ̂; Im ψ̂]` with respect to `[Re a; Im a]`.
fn jacobian(factors: &[CMatrix], r: usize) -> DMatrix<f64> {
    let dims = dims_of(factors);
    let m: usize = dims.iter().product();
    let p: usize = factors.iter().map(|a| a.len()).sum();
    let offsets: Vec<usize> = dims
        .iter()
        .scan(0, |acc, &d| {
            let o = *acc;
            *acc += d * r;
            Some(o)
        })
        .collect();
    let mut jac = DMatrix::<f64>::zeros(2 * m, 2 * p);
    for_each_index(&dims, |flat, idx| {
        for (i, &ki) in idx.iter().enumerate() {
            for t in 0..r {
                let mut c = C64::new(1.0, 0.0);
                for (j, &k) in idx.iter().enumerate() {
                    if j != i {
                        c *= factors[j][(k, t)];
                    }
                }
                let col = offsets[i] + ki * r + t;
                jac[(flat, col)] = c.re;
                jac[(m + flat, col)] = c.im;
                jac[(flat, p + col)] = -c.im;
                jac[(m + flat, p + col)] = c.re;
            }
        }
    });
    jac
}

fn stacked(v: &CVector) -> Vec<f64> {
    v.iter().map(|z| z.re).chain(v.iter().map(|z| z.im)).collect()
}

struct LmOutcome {
    factors: Vec<CMatrix>,
    residual: f64,
    steps: usize,
}

fn run_lm(psi: &CVector, factors: Vec<CMatrix>, r: usize, max_steps: usize) -> LmOutcome {
    let dims = dims_of(&factors);
    let mut x = pack(&factors);
    let mut cur = factors;
    let mut f = stacked(&(reconstruct(&cur, r) - psi));
    let mut cost: f64 = f.iter().map(|v| v * v).sum();
    let mut lambda = 1e-3;
    let mut steps = 0;
    while steps < max_steps && lambda < 1e16 && cost > 1e-30 {
        steps += 1;
        let jac = jacobian(&cur, r);
        let jt = jac.transpose();
        let fv = DMatrix::from_column_slice(f.len(), 1, &f);
        let g = &jt * &fv;
        let mut h = &jt * &jac;
        let dmax = (0..h.nrows())
            .map(|i| h[(i, i)])
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE);
        let diag: Vec<f64> = (0..h.nrows()).map(|i| h[(i, i)].max(1e-12 * dmax)).collect();
        loop {
            for (i, d) in diag.iter().enumerate() {
                h[(i, i)] = jac.column(i).norm_squared() + lambda * d;
            }
            let step = h.clone().cholesky().map(|ch| ch.solve(&(-&g)));
            let accepted = step.and_then(|dx| {
                let trial: Vec<f64> = x.iter().zip(dx.iter()).map(|(a, b)| a + b).collect();
                let tf = unpack(&trial, &dims, r);
                let tres = stacked(&(reconstruct(&tf, r) - psi));
                let tcost: f64 = tres.iter().map(|v| v * v).sum();
                (tcost.is_finite() && tcost < cost).then_some((trial, tf, tres, tcost))
            });
            match accepted {
                Some((trial, tf, tres, tcost)) => {
                    x = trial;
                    cur = tf;
                    f = tres;
                    cost = tcost;
                    lambda = (lambda / 3.0).max(1e-15);
                    break;
                }
                None => {
                    lambda *= 4.0;
                    if lambda >= 1e16 {
                        break;
                    }
                }
            }
        }
    }
    LmOutcome {
        factors: cur,
        residual: cost.sqrt(),
        steps,
    }
}

fn validate(r: usize, opts: &CpOptions) -> Result<()> {
    if r == 0 {
        return Err(Error::InvalidRank {
            rank: r,
            reason: String::from("CP rank must be positive"),
        });
    }
    if opts.restarts == 0 {
        return Err(Error::DomainError(String::from("at least one restart is required")));
    }
    Ok(())
}

fn refine(psi: &CVector, start: Vec<CMatrix>, r: usize, opts: &CpOptions, restart: Option<usize>) -> Result<CPModel> {
    let als = run_als(psi, start, r, opts)?;
    let lm = run_lm(psi, als.factors.clone(), r, opts.lm_steps);
    let (factors, lm_steps) = if lm.residual < als.residual {
        (lm.factors, lm.steps)
    } else {
        (als.factors, lm.steps)
    };
    Ok(finish(psi, factors, r, als.sweeps, lm_steps, als.regularized, restart))
}

fn finish(
    psi: &CVector,
    factors: Vec<CMatrix>,
    r: usize,
    als_sweeps: usize,
    lm_steps: usize,
    regularized_updates: usize,
    restart: Option<usize>,
) -> CPModel {
    let residual = residual(psi, &factors, r);
    let max_term_norm = term_norms(&factors, r).into_iter().fold(0.0, f64::max);
    CPModel {
        rank: r,
        factors,
        residual,
        max_term_norm,
        als_sweeps,
        lm_steps,
        regularized_updates,
        restart,
    }
}

fn better(a: CPModel, b: CPModel) -> CPModel {
    if b.residual < a.residual {
        b
    } else {
        a
    }
}

fn restart_seed(seed: Seed, r: usize, index: usize) -> Seed {
    seed.derive(r as u64).derive(index as u64)
}

/// Best of `opts.restarts` independent fits; restart `i` at rank `r` uses
/// `seed.derive(r).derive(i)`.
pub fn cp_fit_with(state: &PureState, r: usize, seed: Seed, opts: &CpOptions) -> Result<CPModel> {
    validate(r, opts)?;
    let psi = state.amplitudes();
    let dims = state.shape().dims();
    let mut best: Option<CPModel> = None;
    for i in 0..opts.restarts {
        let mut rng = restart_seed(seed, r, i).rng();
        let model = refine(psi, random_factors(dims, r, &mut rng), r, opts, Some(i))?;
        best = Some(match best {
            None => model,
            Some(b) => better(b, model),
        });
    }
    Ok(best.expect("at least one restart"))
}

/// [`cp_fit_with`] with `iterations` ALS sweeps.
pub fn cp_fit(state: &PureState, r: usize, restarts: usize, iterations: usize, seed: Seed) -> Result<CPModel> {
    let opts = CpOptions {
        restarts,
        als_sweeps: iterations,
        ..CpOptions::default()
    };
    cp_fit_with(state, r, seed, &opts)
}

fn padded(model: &CPModel) -> Vec<CMatrix> {
    model
        .factors
        .iter()
        .map(|a| a.clone().insert_column(a.ncols(), C64::new(0.0, 0.0)))
        .collect()
}

/// Fits for `r = 1..=r_max`; each rank also tries the previous model
/// extended by one term, so the residual never increases with `r`.
pub fn cp_fit_curve(state: &PureState, r_max: usize, seed: Seed, opts: &CpOptions) -> Result<Vec<CPModel>> {
    validate(r_max, opts)?;
    let psi = state.amplitudes();
    let dims = state.shape().dims();
    let mut curve: Vec<CPModel> = Vec::with_capacity(r_max);
    for r in 1..=r_max {
        let mut best = cp_fit_with(state, r, seed, opts)?;
        if let Some(prev) = curve.last() {
            let kept = finish(psi, padded(prev), r, 0, 0, 0, None);
            let mut rng = seed.derive(r as u64).derive(u64::MAX).rng();
            let mut start = padded(prev);
            for (i, a) in start.iter_mut().enumerate() {
                let w = if i == 0 { 1e-3 } else { 1.0 };
                let v = rng.unit_vector(dims[i]) * C64::new(w, 0.0);
                a.set_column(r - 1, &v);
            }
            let warm = refine(psi, start, r, opts, None)?;
            best = better(better(best, warm), kept);
        }
        curve.push(best);
    }
    Ok(curve)
}

/// Smallest rank whose fit residual is below the tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct BorderRankEstimate {
    /// `None` when no rank up to `r_max` reaches the tolerance.
    pub estimate: Option<usize>,
    /// `(r, residual, max_term_norm)` for `r = 1..=r_max`.
    pub curve: Vec<(usize, f64, f64)>,
}

/// Border-rank estimate from the residual curve alone.
pub fn estimate_border_rank(state: &PureState, r_max: usize, tol: f64, seed: Seed) -> Result<BorderRankEstimate> {
    estimate_border_rank_with(state, r_max, tol, seed, &CpOptions::default())
}

pub fn estimate_border_rank_with(
    state: &PureState,
    r_max: usize,
    tol: f64,
    seed: Seed,
    opts: &CpOptions,
) -> Result<BorderRankEstimate> {
    let curve: Vec<(usize, f64, f64)> = cp_fit_curve(state, r_max, seed, opts)?
        .into_iter()
        .map(|m| (m.rank, m.residual, m.max_term_norm))
        .collect();
    let estimate = curve.iter().find(|(_, res, _)| *res < tol).map(|(r, _, _)| *r);
    Ok(BorderRankEstimate { estimate, curve })
}

/// The `2 × 2 × 2` state `(|000⟩ + |001⟩ + |010⟩ + |100⟩)/2`.
pub fn phi_state() -> PureState {
    let mut v = CVector::zeros(8);
    for i in [0, 1, 2, 4] {
        v[i] = C64::new(0.5, 0.0);
    }
    PureState::new(v, Shape::new(alloc::vec![2, 2, 2]).expect("valid shape")).expect("normalized")
}

/// `(|0…0⟩ + |1…1⟩)/√2` on `n` qubits.
pub fn ghz_state(n: usize) -> Result<PureState> {
    let shape = Shape::new(alloc::vec![2; n])?;
    let mut v = CVector::zeros(shape.total());
    let h = C64::new(0.5f64.sqrt(), 0.0);
    v[0] = h;
    v[shape.total() - 1] = h;
    PureState::new(v, shape)
}
