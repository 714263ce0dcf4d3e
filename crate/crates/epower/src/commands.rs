//! Command implementations. Each returns a serializable report; the binary
//! only parses arguments and writes the output.

use std::io::Write;

use epower_core::bounds;
use epower_core::gates::{build_householder_with, hadamard12, HouseholderSpec};
use epower_core::minimize::{certified_lower_bound, EstimateReport, Objective, ObjectiveKind};
use epower_core::multipartite::cp::{ghz_state, phi_state};
use epower_core::multipartite::{estimate_border_rank, generic_multipartite_sr};
use epower_core::sampling::{haar_unitary, Seed};
use epower_core::tensor::{CVector, Cut, Gate, PureState, Shape};
use epower_core::varieties::{generic_min_sr, BipartiteDims};
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::gate_io::format_dims;
use crate::parallel;

/// Minima below this count as zero.
pub const VANISHING_TOL: f64 = 1e-6;
/// Minima above this count as bounded away from zero.
pub const ENTANGLING_TOL: f64 = 1e-3;
/// Per-cut entanglement threshold of the multipartite survey.
pub const CUT_ENTANGLED_TOL: f64 = 1e-4;

/// Floats in CSV output: 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Haar-random gate number `index` of a survey.
pub fn survey_gate(dims: &[usize], seed: Seed, index: usize) -> CliResult<(Gate, Seed)> {
    let gate_seed = seed.derive(index as u64);
    let shape = Shape::new(dims.to_vec())?;
    let gate = Gate::new(haar_unitary(shape.total(), gate_seed), shape)?;
    Ok((gate, gate_seed))
}

/// Seed of the `tail_energy(k)` minimization for a gate.
pub fn tail_seed(gate_seed: Seed, k: usize) -> Seed {
    gate_seed.derive(k as u64)
}

fn bipartite_cut(gate: &Gate) -> CliResult<(Cut, BipartiteDims)> {
    let cut = Cut::canonical_bipartite(gate.shape())?;
    let d = gate.shape().dims();
    Ok((cut, BipartiteDims::new(d[0], d[1])?))
}

/// Minimum of `tail_energy(k)` for one gate.
pub fn min_tail(gate: &Gate, cut: &Cut, k: usize, restarts: usize, gate_seed: Seed) -> CliResult<EstimateReport> {
    let obj = Objective::tail_energy(k, cut.clone())?;
    Ok(parallel::estimate_pmin(gate, &obj, restarts, tail_seed(gate_seed, k))?)
}

/// Schmidt-rank floor implied by `tails[k−1] = min tail_energy(k)`: the
/// first `k` whose minimum vanishes, provided every earlier minimum is
/// clearly positive.
pub fn infer_sr(tails: &[f64]) -> Option<usize> {
    for (i, &t) in tails.iter().enumerate() {
        if t < VANISHING_TOL {
            return Some(i + 1);
        }
        if t <= ENTANGLING_TOL {
            return None;
        }
    }
    None
}

/// One row of the rank survey.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurveyRow {
    pub gate_id: usize,
    pub seed: u64,
    /// `min tail_energy(k)` for `k = 1..=r₀`.
    pub tails: Vec<f64>,
    pub inferred_sr: Option<usize>,
    pub generic_sr: usize,
    pub matches: bool,
}

pub fn rank_survey(dims: &[usize], gates: usize, restarts: usize, seed: Seed) -> CliResult<Vec<SurveyRow>> {
    if dims.len() != 2 {
        return Err(CliError::Argument(format!(
            "rank survey needs two dimensions, got {}",
            format_dims(dims)
        )));
    }
    let r0 = generic_min_sr(BipartiteDims::new(dims[0], dims[1])?);
    (0..gates)
        .map(|g| {
            let (gate, gate_seed) = survey_gate(dims, seed, g)?;
            let (cut, _) = bipartite_cut(&gate)?;
            let tails = (1..=r0)
                .map(|k| Ok(min_tail(&gate, &cut, k, restarts, gate_seed)?.value))
                .collect::<CliResult<Vec<_>>>()?;
            let inferred_sr = infer_sr(&tails);
            Ok(SurveyRow {
                gate_id: g,
                seed: gate_seed.0,
                tails,
                inferred_sr,
                generic_sr: r0,
                matches: inferred_sr == Some(r0),
            })
        })
        .collect()
}

/// Columns: `gate_id, seed, tail_1..tail_{r₀}, inferred_sr, generic_sr, match`;
/// an empty `inferred_sr` means inconclusive.
pub fn write_survey_csv<W: Write>(rows: &[SurveyRow], generic_sr: usize, out: W) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec![String::from("gate_id"), String::from("seed")];
    header.extend((1..=generic_sr).map(|k| format!("tail_{k}")));
    header.extend(["inferred_sr", "generic_sr", "match"].map(String::from));
    w.write_record(&header)?;
    for r in rows {
        let mut rec = vec![r.gate_id.to_string(), r.seed.to_string()];
        rec.extend(r.tails.iter().map(|&t| fmt_float(t)));
        rec.push(r.inferred_sr.map_or_else(String::new, |s| s.to_string()));
        rec.push(r.generic_sr.to_string());
        rec.push(r.matches.to_string());
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| CliError::io("<csv>", e))?;
    Ok(())
}

/// `[[re, im], …]` per party.
pub type WitnessJson = Vec<Vec<[f64; 2]>>;

fn witness_json(w: &[CVector]) -> WitnessJson {
    w.iter().map(|v| v.iter().map(|z| [z.re, z.im]).collect()).collect()
}

/// An estimated minimum with its witness input.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinimumJson {
    pub objective: String,
    pub value: f64,
    pub converged_fraction: f64,
    pub witness: WitnessJson,
}

impl MinimumJson {
    fn new(kind: ObjectiveKind, r: &EstimateReport) -> Self {
        Self {
            objective: kind.to_string(),
            value: r.value,
            converged_fraction: r.converged_fraction,
            witness: witness_json(&r.witness),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thresholds {
    pub vanishing: f64,
    pub entangling: f64,
}

/// Verdict of `verify-gate`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub dims: Vec<usize>,
    pub restarts: usize,
    pub seed: u64,
    /// `min tail_energy(k)` for increasing `k` until one vanishes.
    pub tails: Vec<MinimumJson>,
    pub objectives: Vec<MinimumJson>,
    pub thresholds: Thresholds,
    pub sr_floor: Option<usize>,
    /// `vanishing`, `entangling(k)` or `inconclusive`.
    pub verdict: String,
}

pub fn verify_gate(gate: &Gate, extra: &[ObjectiveKind], restarts: usize, seed: Seed) -> CliResult<VerifyReport> {
    let (cut, d) = bipartite_cut(gate)?;
    let mut tails = Vec::new();
    for k in 1..d.d_a() {
        let r = min_tail(gate, &cut, k, restarts, seed)?;
        let stop = r.value <= ENTANGLING_TOL;
        tails.push(MinimumJson::new(ObjectiveKind::TailEnergy(k), &r));
        if stop {
            break;
        }
    }
    let values: Vec<f64> = tails.iter().map(|t| t.value).collect();
    let sr_floor = if values.len() == d.d_a() - 1 && values.iter().all(|&t| t > ENTANGLING_TOL) {
        Some(d.d_a())
    } else {
        infer_sr(&values)
    };
    let verdict = match sr_floor {
        Some(1) => String::from("vanishing"),
        Some(k) => format!("entangling({k})"),
        None => String::from("inconclusive"),
    };
    let objectives = extra
        .iter()
        .enumerate()
        .map(|(i, &kind)| {
            let obj = Objective::new(kind, cut.clone())?;
            let r = parallel::estimate_pmin(gate, &obj, restarts, seed.derive(1000 + i as u64))?;
            Ok(MinimumJson::new(kind, &r))
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(VerifyReport {
        dims: gate.shape().dims().to_vec(),
        restarts,
        seed: seed.0,
        tails,
        objectives,
        thresholds: Thresholds {
            vanishing: VANISHING_TOL,
            entangling: ENTANGLING_TOL,
        },
        sr_floor,
        verdict,
    })
}

/// Built-in gates.
pub fn builtin_gate(name: &str, dims: Option<&[usize]>, seed: Seed) -> CliResult<Gate> {
    let need_dims = || dims.ok_or_else(|| CliError::Argument(format!("builtin '{name}' needs --dims")));
    match name {
        "hadamard12" => Ok(hadamard12()),
        "identity" => Ok(Gate::identity(Shape::new(need_dims()?.to_vec())?)),
        "swap" => {
            let d = need_dims()?;
            if d.len() != 2 || d[0] != d[1] {
                return Err(CliError::Argument(String::from("swap needs dims dxd")));
            }
            Ok(Gate::swap(d[0])?)
        }
        "haar" => {
            let shape = Shape::new(need_dims()?.to_vec())?;
            Ok(Gate::new(haar_unitary(shape.total(), seed), shape)?)
        }
        other => Err(CliError::Argument(format!(
            "unknown builtin '{other}' (expected hadamard12, identity, swap or haar)"
        ))),
    }
}

/// Result of `householder`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HouseholderReport {
    pub dims: Vec<usize>,
    pub r: usize,
    pub subspace_dim: usize,
    pub seed: u64,
    pub attempts: usize,
    pub subspace_margin: f64,
    pub complement_margin: f64,
    /// `‖U² − I‖_F`.
    pub involution_residual: f64,
    /// `min tail_energy(1)` of the gate when checked.
    pub min_tail1: Option<f64>,
    pub check_threshold: f64,
    pub pass: bool,
}

pub fn householder(
    dims: &[usize],
    r: usize,
    seed: Seed,
    verify_restarts: usize,
    check_restarts: usize,
) -> CliResult<(Gate, HouseholderReport)> {
    if dims.len() != 2 {
        return Err(CliError::Argument(String::from("householder needs two dimensions")));
    }
    let d = BipartiteDims::new(dims[0], dims[1])?;
    HouseholderSpec::new(d, r)?;
    let build = build_householder_with(d, r, seed, |s, cut, k, vs| {
        parallel::min_over_subspace(s, cut, k, verify_restarts, vs)
    })?;
    let u = build.gate.matrix();
    let n = u.nrows();
    let involution_residual = (u * u - epower_core::tensor::CMatrix::identity(n, n)).norm();
    let min_tail1 = if check_restarts > 0 {
        let cut = Cut::new(2, &[0])?;
        Some(min_tail(&build.gate, &cut, 1, check_restarts, build.seed.derive(2))?.value)
    } else {
        None
    };
    let pass = involution_residual < 1e-10 && min_tail1.map_or(true, |t| t > CUT_ENTANGLED_TOL);
    let report = HouseholderReport {
        dims: vec![d.d_a(), d.d_b()],
        r,
        subspace_dim: build.spec.subspace_dim,
        seed: build.seed.0,
        attempts: build.attempts,
        subspace_margin: build.subspace_margin,
        complement_margin: build.complement_margin,
        involution_residual,
        min_tail1,
        check_threshold: CUT_ENTANGLED_TOL,
        pass,
    };
    Ok((build.gate, report))
}

/// One (gate, cut) row of the multipartite survey.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutRow {
    pub gate_id: usize,
    pub seed: u64,
    pub cut: String,
    pub rows: usize,
    pub cols: usize,
    pub cut_generic_sr: usize,
    pub min_value: f64,
    pub is_overall_min: bool,
}

pub fn multipartite(
    dims: &[usize],
    gates: usize,
    kind: ObjectiveKind,
    restarts: usize,
    seed: Seed,
) -> CliResult<(usize, Vec<CutRow>)> {
    let generic = generic_multipartite_sr(dims)?;
    let shape = Shape::new(dims.to_vec())?;
    let mut rows = Vec::new();
    for g in 0..gates {
        let (gate, gate_seed) = survey_gate(dims, seed, g)?;
        let rep = parallel::multipartite_pmin(&gate, kind, restarts, gate_seed)?;
        for (i, (cut, r)) in rep.per_cut.iter().enumerate() {
            let (a, b) = cut.matrix_dims(&shape);
            rows.push(CutRow {
                gate_id: g,
                seed: gate_seed.0,
                cut: cut.to_string(),
                rows: a,
                cols: b,
                cut_generic_sr: generic_min_sr(BipartiteDims::new(a, b)?),
                min_value: r.value,
                is_overall_min: i == rep.argmin,
            });
        }
    }
    Ok((generic, rows))
}

/// Columns: `gate_id, seed, cut, rows, cols, cut_generic_sr, min_value, is_overall_min`.
pub fn write_cut_csv<W: Write>(rows: &[CutRow], out: W) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "gate_id",
        "seed",
        "cut",
        "rows",
        "cols",
        "cut_generic_sr",
        "min_value",
        "is_overall_min",
    ])?;
    for r in rows {
        w.write_record([
            r.gate_id.to_string(),
            r.seed.to_string(),
            r.cut.clone(),
            r.rows.to_string(),
            r.cols.to_string(),
            r.cut_generic_sr.to_string(),
            fmt_float(r.min_value),
            r.is_overall_min.to_string(),
        ])?;
    }
    w.flush().map_err(|e| CliError::io("<csv>", e))?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePoint {
    pub r: usize,
    pub residual: f64,
    pub max_term_norm: f64,
}

/// Result of `tensor`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TensorReport {
    pub state: String,
    pub dims: Vec<usize>,
    pub r_max: usize,
    pub tol: f64,
    pub seed: u64,
    pub border_rank_estimate: Option<usize>,
    pub curve: Vec<CurvePoint>,
}

/// Named states: `w-like` (alias `phi`), `ghz`, `product`.
pub fn named_state(name: &str) -> CliResult<PureState> {
    match name {
        "w-like" | "phi" => Ok(phi_state()),
        "ghz" => Ok(ghz_state(3)?),
        "product" => Ok(PureState::basis(Shape::new(vec![2, 2, 2])?, &[0, 0, 0])?),
        other => Err(CliError::Argument(format!(
            "unknown state '{other}' (expected w-like, ghz or product)"
        ))),
    }
}

pub fn tensor(name: &str, r_max: usize, tol: f64, seed: Seed) -> CliResult<TensorReport> {
    let state = named_state(name)?;
    let est = estimate_border_rank(&state, r_max, tol, seed)?;
    Ok(TensorReport {
        state: name.to_string(),
        dims: state.shape().dims().to_vec(),
        r_max,
        tol,
        seed: seed.0,
        border_rank_estimate: est.estimate,
        curve: est
            .curve
            .into_iter()
            .map(|(r, residual, max_term_norm)| CurvePoint {
                r,
                residual,
                max_term_norm,
            })
            .collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanJson {
    pub d_a: usize,
    pub d_b: usize,
    pub value: f64,
    pub raw: f64,
    pub vacuous: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailJson {
    pub d_a: usize,
    pub d_b: usize,
    pub alpha: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PminTailJson {
    pub d_a: usize,
    pub d_b: usize,
    pub alpha: f64,
    pub log10_value: f64,
    pub below_one: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EpsilonJson {
    pub d_a: usize,
    pub d_b: usize,
    pub epsilon: f64,
}

/// Result of `bounds`; only requested entries are present.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct BoundsReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_lower: Option<MeanJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail: Option<TailJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pmin_tail: Option<PminTailJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimal_epsilon: Option<EpsilonJson>,
}

/// Requested evaluations for `bounds`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BoundsRequest {
    pub scan: Option<usize>,
    pub mean_lower: Option<(usize, usize)>,
    pub tail: Option<(usize, usize, f64)>,
    pub pmin_tail: Option<(usize, usize, f64)>,
    pub optimal_epsilon: Option<(usize, usize)>,
}

pub fn bounds(req: &BoundsRequest) -> CliResult<BoundsReport> {
    let mut rep = BoundsReport::default();
    if let Some(n) = req.scan {
        rep.threshold = Some(bounds::min_dim_for_nontrivial_alpha_with(n));
        rep.grid_points = Some(n);
    }
    if let Some((d_a, d_b)) = req.mean_lower {
        let m = bounds::mean_pmin_lower_bound(d_a, d_b)?;
        rep.mean_lower = Some(MeanJson {
            d_a,
            d_b,
            value: m.value,
            raw: m.raw,
            vacuous: m.vacuous,
        });
    }
    if let Some((d_a, d_b, alpha)) = req.tail {
        rep.tail = Some(TailJson {
            d_a,
            d_b,
            alpha,
            value: bounds::hayden_entropy_tail(d_a, d_b, alpha)?,
        });
    }
    if let Some((d_a, d_b, alpha)) = req.pmin_tail {
        let t = bounds::pmin_entropy_tail(d_a, d_b, alpha)?;
        rep.pmin_tail = Some(PminTailJson {
            d_a,
            d_b,
            alpha,
            log10_value: t.log10(),
            below_one: t.is_below_one(),
        });
    }
    if let Some((d_a, d_b)) = req.optimal_epsilon {
        rep.optimal_epsilon = Some(EpsilonJson {
            d_a,
            d_b,
            epsilon: bounds::optimal_epsilon(d_a, d_b)?,
        });
    }
    Ok(rep)
}

/// Result of `certify`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertifyReport {
    pub dims: Vec<usize>,
    pub epsilon: f64,
    pub seed: u64,
    pub value: f64,
    pub raw_min: f64,
    pub correction: f64,
    pub points_per_party: Vec<usize>,
    pub theoretical_size: f64,
    pub probe_worst: Vec<f64>,
}

pub fn certify(gate: &Gate, epsilon: f64, seed: Seed) -> CliResult<CertifyReport> {
    let b = certified_lower_bound(gate, epsilon, seed)?;
    Ok(CertifyReport {
        dims: gate.shape().dims().to_vec(),
        epsilon,
        seed: seed.0,
        value: b.value,
        raw_min: b.raw_min,
        correction: b.correction,
        points_per_party: b.net.points_per_party,
        theoretical_size: b.net.theoretical_size,
        probe_worst: b.net.probe_worst,
    })
}
