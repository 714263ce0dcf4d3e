//! Multistart estimators of the minimum, average and maximum entangling power.
//!
//! Each restart is an independent task seeded with `seed.derive(index)`, so
//! callers may run restarts in any order or in parallel and combine them with
//! [`reduce`].

use alloc::string::String;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::sampling::{haar_product, Seed, Subspace};
use crate::tensor::{CVector, Cut, CutLayout, Gate, Shape};

use super::descent::{DescentOptions, Direction, Parametrization, Problem, ProductMap, SubspaceMap};
use super::objective::{Objective, ObjectiveKind};

/// Two restart values closer than this are tied; the lower index wins.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Outcome of a multistart optimization.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateReport {
    /// Best objective value found.
    pub value: f64,
    /// Unit vectors attaining `value`: one per party for gate problems, the
    /// subspace coordinates for subspace problems.
    pub witness: Vec<CVector>,
    pub restarts: usize,
    pub converged_fraction: f64,
    pub iterations_total: usize,
    /// Index of the winning restart.
    pub best_restart: usize,
}

/// Outcome of a single restart.
#[derive(Debug, Clone, PartialEq)]
pub struct RestartOutcome {
    pub index: usize,
    pub value: f64,
    pub point: Vec<CVector>,
    pub iterations: usize,
    pub converged: bool,
}

/// Monte Carlo average over Haar-random product inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AverageReport {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// Combines restart outcomes; independent of their order.
pub fn reduce(mut outcomes: Vec<RestartOutcome>, direction: Direction) -> Result<EstimateReport> {
    if outcomes.is_empty() {
        return Err(Error::DomainError(String::from("at least one restart is required")));
    }
    outcomes.sort_by_key(|o| o.index);
    let better = |a: f64, b: f64| match direction {
        Direction::Minimize => a < b - TIE_TOLERANCE,
        Direction::Maximize => a > b + TIE_TOLERANCE,
    };
    let mut best = 0;
    for (i, o) in outcomes.iter().enumerate().skip(1) {
        if better(o.value, outcomes[best].value) {
            best = i;
        }
    }
    let restarts = outcomes.len();
    let converged = outcomes.iter().filter(|o| o.converged).count();
    let iterations_total = outcomes.iter().map(|o| o.iterations).sum();
    let winner = outcomes.swap_remove(best);
    Ok(EstimateReport {
        value: winner.value,
        witness: winner.point,
        restarts,
        converged_fraction: converged as f64 / restarts as f64,
        iterations_total,
        best_restart: winner.index,
    })
}

/// Objective of `U (⊗ x_i)` over product inputs, prepared once per gate.
#[derive(Debug, Clone)]
pub struct ProductProblem {
    map: ProductMap,
    layout: CutLayout,
    kind: ObjectiveKind,
    shape: Shape,
    options: DescentOptions,
}

impl ProductProblem {
    pub fn new(gate: &Gate, objective: &Objective) -> Result<Self> {
        Self::from_parts(Some(gate), gate.shape(), objective)
    }

    /// Objective of the product input itself, without a gate.
    pub fn identity(shape: &Shape, objective: &Objective) -> Result<Self> {
        Self::from_parts(None, shape, objective)
    }

    fn from_parts(gate: Option<&Gate>, shape: &Shape, objective: &Objective) -> Result<Self> {
        let layout = CutLayout::new(shape, objective.cut())?;
        Ok(Self {
            map: ProductMap::new(gate.map(|g| g.matrix().clone()), shape.dims().to_vec()),
            layout,
            kind: objective.kind(),
            shape: shape.clone(),
            options: DescentOptions::default(),
        })
    }

    pub fn with_options(mut self, options: DescentOptions) -> Self {
        self.options = options;
        self
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    fn problem(&self) -> Problem<'_, ProductMap> {
        Problem {
            map: &self.map,
            layout: &self.layout,
            kind: self.kind,
        }
    }

    /// Objective value at a product input.
    pub fn evaluate(&self, point: &[CVector]) -> f64 {
        self.problem().value(point)
    }

    /// One descent (or ascent) run from the Haar-random start of `index`.
    pub fn run_restart(&self, seed: Seed, index: usize, direction: Direction) -> Result<RestartOutcome> {
        let mut rng = seed.derive(index as u64).rng();
        let start = haar_product(self.shape.dims(), &mut rng);
        run(&self.problem(), start, index, direction, &self.options)
    }

    /// Objective at the Haar-random product input of `index`.
    pub fn sample(&self, seed: Seed, index: usize) -> Result<f64> {
        let mut rng = seed.derive(index as u64).rng();
        let point = haar_product(self.shape.dims(), &mut rng);
        let v = self.evaluate(&point);
        if !v.is_finite() {
            return Err(Error::NumericalFailure { restart: index });
        }
        Ok(v)
    }
}

fn run<P: Parametrization>(
    problem: &Problem<'_, P>,
    start: Vec<CVector>,
    index: usize,
    direction: Direction,
    options: &DescentOptions,
) -> Result<RestartOutcome> {
    let out = problem
        .descend(start, direction, options)
        .ok_or(Error::NumericalFailure { restart: index })?;
    Ok(RestartOutcome {
        index,
        value: out.value,
        point: out.point,
        iterations: out.iterations,
        converged: out.converged,
    })
}

fn check_restarts(restarts: usize) -> Result<()> {
    if restarts == 0 {
        return Err(Error::DomainError(String::from("at least one restart is required")));
    }
    Ok(())
}

/// Multistart estimate of the minimum over product inputs.
pub fn estimate_pmin(gate: &Gate, objective: &Objective, restarts: usize, seed: Seed) -> Result<EstimateReport> {
    check_restarts(restarts)?;
    let p = ProductProblem::new(gate, objective)?;
    let outcomes = (0..restarts)
        .map(|i| p.run_restart(seed, i, Direction::Minimize))
        .collect::<Result<Vec<_>>>()?;
    reduce(outcomes, Direction::Minimize)
}

/// Multistart estimate of the maximum over product inputs.
pub fn estimate_pmax(gate: &Gate, objective: &Objective, restarts: usize, seed: Seed) -> Result<EstimateReport> {
    check_restarts(restarts)?;
    let p = ProductProblem::new(gate, objective)?;
    let outcomes = (0..restarts)
        .map(|i| p.run_restart(seed, i, Direction::Maximize))
        .collect::<Result<Vec<_>>>()?;
    reduce(outcomes, Direction::Maximize)
}

/// Mean over Haar-random product inputs.
pub fn estimate_pavg(gate: &Gate, objective: &Objective, samples: usize, seed: Seed) -> Result<AverageReport> {
    check_restarts(samples)?;
    let p = ProductProblem::new(gate, objective)?;
    let values = (0..samples).map(|i| p.sample(seed, i)).collect::<Result<Vec<_>>>()?;
    Ok(average(&values))
}

/// Mean and standard error of the mean.
pub fn average(values: &[f64]) -> AverageReport {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let std_error = if n > 1 {
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
        (var / n as f64).sqrt()
    } else {
        0.0
    };
    AverageReport {
        mean,
        std_error,
        samples: n,
    }
}

/// `tail_energy(k)` over unit vectors of a subspace, prepared once.
#[derive(Debug, Clone)]
pub struct SubspaceProblem {
    map: SubspaceMap,
    layout: CutLayout,
    kind: ObjectiveKind,
    dim: usize,
    options: DescentOptions,
}

impl SubspaceProblem {
    pub fn new(subspace: &Subspace, cut: &Cut, k: usize) -> Result<Self> {
        let objective = Objective::tail_energy(k, cut.clone())?;
        Ok(Self {
            map: SubspaceMap::new(subspace.isometry().clone()),
            layout: CutLayout::new(subspace.shape(), cut)?,
            kind: objective.kind(),
            dim: subspace.dim(),
            options: DescentOptions::default(),
        })
    }

    pub fn with_options(mut self, options: DescentOptions) -> Self {
        self.options = options;
        self
    }

    pub fn run_restart(&self, seed: Seed, index: usize) -> Result<RestartOutcome> {
        let mut rng = seed.derive(index as u64).rng();
        let start = alloc::vec![rng.unit_vector(self.dim)];
        let problem = Problem {
            map: &self.map,
            layout: &self.layout,
            kind: self.kind,
        };
        run(&problem, start, index, Direction::Minimize, &self.options)
    }
}

/// Minimum of `tail_energy(k)` over unit vectors in a subspace.
pub fn min_over_subspace(
    subspace: &Subspace,
    cut: &Cut,
    k: usize,
    restarts: usize,
    seed: Seed,
) -> Result<EstimateReport> {
    check_restarts(restarts)?;
    let p = SubspaceProblem::new(subspace, cut, k)?;
    let outcomes = (0..restarts)
        .map(|i| p.run_restart(seed, i))
        .collect::<Result<Vec<_>>>()?;
    reduce(outcomes, Direction::Minimize)
}
