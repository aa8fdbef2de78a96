//! Distance measures and one-step P-divisibility probes.
//!
//! Two metrics are first-class: the trace-norm distance
//! `1/2 ||rho1 - rho2||_1` (what the six-distance tables use) and the
//! Hilbert-Schmidt surrogate `1/2 Tr[(rho1 - rho2)^dag (rho1 - rho2)]`
//! (what the divisibility inequalities manipulate). They coincide only for
//! single qubits. A step is flagged P-indivisible when the chosen distance
//! grows past the tie tolerance between input and output.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::channels::{KrausChannel, MixedUnitarySpec, UnitaryDilation};
use crate::error::{Error, Result};
use crate::matkernel::c64;
use crate::random::random_pure;
use crate::states::{DensityMatrix, PureState, Subsystem};

/// Default tie tolerance for step verdicts.
pub const VERDICT_TOL: f64 = 1e-9;

/// Roundoff guard when classifying inequality slacks that can be exactly
/// tight (e.g. orthogonal pure inputs).
pub const SLACK_TOL: f64 = 1e-12;

/// Distance choice for step probes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    TraceNorm,
    HilbertSchmidt,
}

/// One-step verdict: did the distance grow past the tolerance?
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StepVerdict {
    PDivisibleStep,
    PIndivisibleStep,
}

fn verdict(d_in: f64, d_out: f64, tol: f64) -> StepVerdict {
    if d_out > d_in + tol {
        StepVerdict::PIndivisibleStep
    } else {
        StepVerdict::PDivisibleStep
    }
}

/// Trace-norm distance `1/2 sum |eigvals(r1 - r2)|`, in `[0, 1]`.
pub fn trace_distance(r1: &DensityMatrix, r2: &DensityMatrix) -> Result<f64> {
    let delta = r1.mat().sub(r2.mat())?;
    let eig = delta.hermitian_eigvals(crate::states::HERMITICITY_TOL)?;
    Ok(0.5 * eig.iter().map(|l| l.abs()).sum::<f64>())
}

/// Hilbert-Schmidt surrogate `1/2 Tr[(r1 - r2)^dag (r1 - r2)]`, in `[0, 1]`.
pub fn hs_distance_sq(r1: &DensityMatrix, r2: &DensityMatrix) -> Result<f64> {
    let delta = r1.mat().sub(r2.mat())?;
    let f = delta.frobenius_norm();
    Ok(0.5 * f * f)
}

/// Distance under the requested metric.
pub fn distance(metric: Metric, r1: &DensityMatrix, r2: &DensityMatrix) -> Result<f64> {
    match metric {
        Metric::TraceNorm => trace_distance(r1, r2),
        Metric::HilbertSchmidt => hs_distance_sq(r1, r2),
    }
}

/// Six distances and three verdicts for one evolution step.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct StepReport {
    pub metric: Metric,
    pub d_sys_in: f64,
    pub d_sys_out: f64,
    pub d_env_in: f64,
    pub d_env_out: f64,
    pub d_full_in: f64,
    pub d_full_out: f64,
    pub sys_verdict: StepVerdict,
    pub env_verdict: StepVerdict,
    pub full_verdict: StepVerdict,
    pub tolerance: f64,
}

/// Probes one step with the default tie tolerance.
pub fn probe_step(
    d: &UnitaryDilation,
    s1: &DensityMatrix,
    s2: &DensityMatrix,
    metric: Metric,
) -> Result<StepReport> {
    probe_step_with(d, s1, s2, metric, VERDICT_TOL)
}

/// Probes one step: evolves the (possibly correlated) joint inputs, reduces
/// to system and environment, and compares distances at input and output.
pub fn probe_step_with(
    d: &UnitaryDilation,
    s1: &DensityMatrix,
    s2: &DensityMatrix,
    metric: Metric,
    tolerance: f64,
) -> Result<StepReport> {
    let split = d.split();
    let r1 = d.joint_evolve(s1)?;
    let r2 = d.joint_evolve(s2)?;

    let reduce = |rho: &DensityMatrix, keep| rho.partial_trace(split, keep);

    let d_full_in = distance(metric, s1, s2)?;
    let d_full_out = distance(metric, &r1, &r2)?;
    let d_sys_in = distance(
        metric,
        &reduce(s1, Subsystem::System)?,
        &reduce(s2, Subsystem::System)?,
    )?;
    let d_sys_out = distance(
        metric,
        &reduce(&r1, Subsystem::System)?,
        &reduce(&r2, Subsystem::System)?,
    )?;
    let d_env_in = distance(
        metric,
        &reduce(s1, Subsystem::Environment)?,
        &reduce(s2, Subsystem::Environment)?,
    )?;
    let d_env_out = distance(
        metric,
        &reduce(&r1, Subsystem::Environment)?,
        &reduce(&r2, Subsystem::Environment)?,
    )?;

    Ok(StepReport {
        metric,
        d_sys_in,
        d_sys_out,
        d_env_in,
        d_env_out,
        d_full_in,
        d_full_out,
        sys_verdict: verdict(d_sys_in, d_sys_out, tolerance),
        env_verdict: verdict(d_env_in, d_env_out, tolerance),
        full_verdict: verdict(d_full_in, d_full_out, tolerance),
        tolerance,
    })
}

/// Full quantity ledger for the joint/marginal distance inequalities,
/// evaluated with the Hilbert-Schmidt surrogate throughout.
///
/// `gamma` is the joint-space surrogate of the input pair; it equals the
/// output-pair value (`gamma_out`, also reported as `t_se`) whenever the
/// evolution is genuinely unitary. `alpha`/`beta` are the marginal values
/// at input/output; `t_s`, `t_e` mirror `beta_s`, `beta_e` in the
/// output-side product bound `T_S * T_E <= T_SE`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Theorem2Report {
    pub gamma: f64,
    pub gamma_out: f64,
    pub alpha_s: f64,
    pub alpha_e: f64,
    pub beta_s: f64,
    pub beta_e: f64,
    pub t_se: f64,
    pub t_s: f64,
    pub t_e: f64,
    /// `beta_S beta_E - alpha_S alpha_E` (claimed <= 0).
    pub eq6_lhs: f64,
    /// `(beta_S - alpha_S) beta_E + (beta_E - alpha_E) alpha_S` (claimed <= 0).
    pub eq7_lhs: f64,
    /// `(beta_S - alpha_S) alpha_E + (beta_E - alpha_E) beta_S` (reported only).
    pub eq8_lhs: f64,
    pub product_bound_in: bool,
    pub product_bound_in_slack: f64,
    pub product_bound_out: bool,
    pub product_bound_out_slack: f64,
    pub ts_te_bound: bool,
    pub ts_te_slack: f64,
}

/// Computes the ledger. Errors if the joint-space surrogate drifts between
/// input and output beyond what the dilation's unitarity tolerance allows.
pub fn theorem2_report(
    d: &UnitaryDilation,
    s1: &DensityMatrix,
    s2: &DensityMatrix,
) -> Result<Theorem2Report> {
    let split = d.split();
    let r1 = d.joint_evolve(s1)?;
    let r2 = d.joint_evolve(s2)?;

    let gamma = hs_distance_sq(s1, s2)?;
    let gamma_out = hs_distance_sq(&r1, &r2)?;
    let gamma_tol = f64::max(1e-10, d.unitary_tol());
    if (gamma - gamma_out).abs() > gamma_tol {
        return Err(Error::GammaDrift { gamma_in: gamma, gamma_out });
    }

    let reduce = |rho: &DensityMatrix, keep| rho.partial_trace(split, keep);
    let alpha_s = hs_distance_sq(
        &reduce(s1, Subsystem::System)?,
        &reduce(s2, Subsystem::System)?,
    )?;
    let alpha_e = hs_distance_sq(
        &reduce(s1, Subsystem::Environment)?,
        &reduce(s2, Subsystem::Environment)?,
    )?;
    let beta_s = hs_distance_sq(
        &reduce(&r1, Subsystem::System)?,
        &reduce(&r2, Subsystem::System)?,
    )?;
    let beta_e = hs_distance_sq(
        &reduce(&r1, Subsystem::Environment)?,
        &reduce(&r2, Subsystem::Environment)?,
    )?;

    let (t_se, t_s, t_e) = (gamma_out, beta_s, beta_e);
    let product_bound_in_slack = gamma - alpha_s * alpha_e;
    let product_bound_out_slack = gamma - beta_s * beta_e;
    let ts_te_slack = t_se - t_s * t_e;

    Ok(Theorem2Report {
        gamma,
        gamma_out,
        alpha_s,
        alpha_e,
        beta_s,
        beta_e,
        t_se,
        t_s,
        t_e,
        eq6_lhs: beta_s * beta_e - alpha_s * alpha_e,
        eq7_lhs: (beta_s - alpha_s) * beta_e + (beta_e - alpha_e) * alpha_s,
        eq8_lhs: (beta_s - alpha_s) * alpha_e + (beta_e - alpha_e) * beta_s,
        product_bound_in: product_bound_in_slack >= -SLACK_TOL,
        product_bound_in_slack,
        product_bound_out: product_bound_out_slack >= -SLACK_TOL,
        product_bound_out_slack,
        ts_te_bound: ts_te_slack >= -SLACK_TOL,
        ts_te_slack,
    })
}

/// Trace-distance slack `d(in) - d(out)` of a channel application;
/// nonnegative (within roundoff) for every valid CPTP channel.
pub fn contraction_check(
    k: &KrausChannel,
    r1: &DensityMatrix,
    r2: &DensityMatrix,
) -> Result<f64> {
    let dev = k.completeness_deviation();
    if dev > k.tolerance() {
        return Err(Error::KrausIncomplete { deviation: dev, tolerance: k.tolerance() });
    }
    let before = trace_distance(r1, r2)?;
    let after = trace_distance(&k.apply(r1)?, &k.apply(r2)?)?;
    Ok(before - after)
}

/// Purity identity of mixed-unitary evolutions, evaluated through two
/// independent routes.
///
/// `lhs`: build the block dilation `sum_i U_i ⊗ |i><i|`, evolve
/// `sigma ⊗ env` through it, and take the purity of the joint output
/// (the cross terms cancel against the orthogonal environment projectors).
/// `rhs`: the closed form `(sum_i p_i^2) Tr[sigma^2]`.
pub fn theorem1_identity(spec: &MixedUnitarySpec, sigma: &DensityMatrix) -> Result<(f64, f64)> {
    let d = spec.to_dilation()?;
    let joint_in = d.product_input(sigma)?;
    let joint_out = d.joint_evolve(&joint_in)?;
    let lhs = joint_out.purity();
    let rhs = spec.weights().iter().map(|p| p * p).sum::<f64>() * sigma.purity();
    Ok((lhs, rhs))
}

/// Search configuration for the step-growth witness.
#[derive(Debug, Clone)]
pub struct WitnessConfig {
    pub restarts: u32,
    pub iters: u32,
    pub step: f64,
    pub seed: u64,
    /// `true`: optimize over joint pure inputs on the full space.
    /// `false`: optimize over pure system inputs paired with the
    /// dilation's fixed environment state (product form).
    pub correlated: bool,
    /// Pairs consumed as the starting points of the first restarts.
    pub init_pairs: Vec<(PureState, PureState)>,
}

impl Default for WitnessConfig {
    fn default() -> Self {
        Self { restarts: 16, iters: 400, step: 0.25, seed: 0, correlated: false, init_pairs: Vec::new() }
    }
}

/// Best pair found by the witness search.
#[derive(Debug, Clone)]
pub struct WitnessResult {
    pub state1: DensityMatrix,
    pub state2: DensityMatrix,
    /// `d_sys_out - d_sys_in` at the returned pair (trace-norm metric).
    pub growth: f64,
    pub iterations: u64,
    pub seed: u64,
    /// Index of the restart that produced the winner.
    pub restart: u32,
}

/// System-distance growth of a candidate pure pair.
fn witness_objective(
    d: &UnitaryDilation,
    correlated: bool,
    v1: &PureState,
    v2: &PureState,
) -> Result<(f64, DensityMatrix, DensityMatrix)> {
    let (j1, j2) = if correlated {
        (v1.to_density(), v2.to_density())
    } else {
        (d.product_input(&v1.to_density())?, d.product_input(&v2.to_density())?)
    };
    let split = d.split();
    let d_in = trace_distance(
        &j1.partial_trace(split, Subsystem::System)?,
        &j2.partial_trace(split, Subsystem::System)?,
    )?;
    let o1 = d.joint_evolve(&j1)?;
    let o2 = d.joint_evolve(&j2)?;
    let d_out = trace_distance(
        &o1.partial_trace(split, Subsystem::System)?,
        &o2.partial_trace(split, Subsystem::System)?,
    )?;
    Ok((d_out - d_in, j1, j2))
}

fn perturb(state: &PureState, coord: usize, re_part: bool, delta: f64) -> PureState {
    let mut amps = state.amps().to_vec();
    if re_part {
        amps[coord] += c64(delta, 0.0);
    } else {
        amps[coord] += c64(0.0, delta);
    }
    let norm: f64 = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm < 1e-12 {
        return state.clone();
    }
    for z in amps.iter_mut() {
        *z /= norm;
    }
    PureState::new(state.qubits(), amps).expect("renormalized")
}

/// Multi-restart coordinate hill climbing for a pair whose system distance
/// grows across the step. Deterministic for a fixed seed: restart `r` draws
/// from sub-seed `seed + r`, and ties resolve to the lowest restart index.
pub fn witness_search(d: &UnitaryDilation, cfg: &WitnessConfig) -> Result<WitnessResult> {
    let qubits = if cfg.correlated {
        d.split().total_qubits()
    } else {
        d.split().system_qubits()
    };
    const MAX_FAILS: u32 = 64;

    let mut best: Option<(f64, DensityMatrix, DensityMatrix, u32)> = None;
    let mut evals: u64 = 0;

    for restart in 0..cfg.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(restart as u64));
        let (mut v1, mut v2) = match cfg.init_pairs.get(restart as usize) {
            Some((a, b)) => (a.clone(), b.clone()),
            None => (random_pure(qubits, &mut rng), random_pure(qubits, &mut rng)),
        };
        let (mut local, _, _) = witness_objective(d, cfg.correlated, &v1, &v2)?;
        evals += 1;

        let mut step = cfg.step;
        let mut fails = 0u32;
        for _ in 0..cfg.iters {
            let target_first: bool = rng.gen();
            let coord = rng.gen_range(0..1usize << qubits);
            let re_part: bool = rng.gen();
            let delta = step * rng.gen_range(-1.0..1.0);
            let (c1, c2) = if target_first {
                (perturb(&v1, coord, re_part, delta), v2.clone())
            } else {
                (v1.clone(), perturb(&v2, coord, re_part, delta))
            };
            let (g, _, _) = witness_objective(d, cfg.correlated, &c1, &c2)?;
            evals += 1;
            if g > local {
                local = g;
                v1 = c1;
                v2 = c2;
                fails = 0;
                step = cfg.step;
            } else {
                fails += 1;
                step *= 0.5;
                if fails >= MAX_FAILS {
                    break;
                }
            }
        }

        let (g, j1, j2) = witness_objective(d, cfg.correlated, &v1, &v2)?;
        evals += 1;
        let improves = match &best {
            None => true,
            Some((bg, ..)) => g > *bg,
        };
        if improves {
            best = Some((g, j1, j2, restart));
        }
    }

    let (growth, state1, state2, restart) = best.expect("at least one restart");
    Ok(WitnessResult { state1, state2, growth, iterations: evals, seed: cfg.seed, restart })
}
