//! Canonical builders for the three bundled experiments (Bell, GHZ, W),
//! in exact-constant and truncated-constant modes, plus a runner that
//! produces the six-distance table, the inequality ledger and unitality
//! classifications of the induced channels.
//!
//! Truncated mode rebuilds each unitary from its printed three-decimal
//! entries (0.707, 0.577, 0.408) without renormalizing; the input states
//! keep their exact closed forms. That combination reproduces every
//! published six-decimal table entry. Expect unitarity deviations of order
//! 1e-3 there, which is why the runner switches to lenient validation and
//! a looser tie tolerance.

use serde::Serialize;
use std::str::FromStr;

use crate::channels::{UnitalityReport, UnitaryDilation};
use crate::divisibility::{
    probe_step_with, theorem2_report, Metric, StepReport, Theorem2Report,
};
use crate::error::{Error, Result};
use crate::matkernel::{c64, ComplexMatrix};
use crate::states::{Bipartition, DensityMatrix, PureState};

/// Tie tolerance for verdicts in truncated mode; printed-constant noise is
/// of order 1e-4 and must not flip a verdict.
pub const PAPER_VERDICT_TOL: f64 = 1e-6;
/// Unitarity band accepted for truncated-constant unitaries.
pub const PAPER_UNITARY_TOL: f64 = 2e-3;
/// Acceptance band when comparing truncated-mode output against the
/// published tables.
pub const PAPER_TABLE_TOL: f64 = 2e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioName {
    Bell,
    Ghz,
    W,
}

impl ScenarioName {
    pub const ALL: [ScenarioName; 3] = [ScenarioName::Bell, ScenarioName::Ghz, ScenarioName::W];

    pub fn as_str(&self) -> &'static str {
        match self {
            ScenarioName::Bell => "bell",
            ScenarioName::Ghz => "ghz",
            ScenarioName::W => "w",
        }
    }
}

impl FromStr for ScenarioName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bell" => Ok(ScenarioName::Bell),
            "ghz" => Ok(ScenarioName::Ghz),
            "w" => Ok(ScenarioName::W),
            other => Err(Error::UnknownScenario { name: other.to_string() }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exact,
    PaperTruncated,
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "exact" => Ok(Mode::Exact),
            "paper" | "truncated" | "paper_truncated" => Ok(Mode::PaperTruncated),
            other => Err(Error::UnknownScenario { name: format!("mode {other}") }),
        }
    }
}

/// A bundled experiment: unitary, bipartition, joint input pair, and the
/// basis states the target was originally prepared from (used to induce
/// the system and environment channels).
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: ScenarioName,
    pub mode: Mode,
    pub u: ComplexMatrix,
    pub split: Bipartition,
    pub s1: DensityMatrix,
    pub s2: DensityMatrix,
    /// Pure amplitude forms of `s1`, `s2` (all bundled inputs are pure).
    pub s1_pure: PureState,
    pub s2_pure: PureState,
    pub sys_init: PureState,
    pub env_init: PureState,
}

/// Coefficient classes appearing in the bundled unitaries.
#[derive(Clone, Copy)]
enum Coeff {
    One,
    InvSqrt2,
    NegInvSqrt2,
    InvSqrt3,
    NegInvSqrt3,
    InvSqrt6,
}

impl Coeff {
    fn value(self, mode: Mode) -> f64 {
        let (s2, s3, s6) = match mode {
            Mode::Exact => (1.0 / 2f64.sqrt(), 1.0 / 3f64.sqrt(), 1.0 / 6f64.sqrt()),
            Mode::PaperTruncated => (0.707, 0.577, 0.408),
        };
        match self {
            Coeff::One => 1.0,
            Coeff::InvSqrt2 => s2,
            Coeff::NegInvSqrt2 => -s2,
            Coeff::InvSqrt3 => s3,
            Coeff::NegInvSqrt3 => -s3,
            Coeff::InvSqrt6 => s6,
        }
    }
}

/// `sum coeff |ket><bra|` over bit-string labelled terms.
fn from_terms(qubits: usize, mode: Mode, terms: &[(&str, &str, Coeff)]) -> ComplexMatrix {
    let dim = 1usize << qubits;
    let mut m = ComplexMatrix::zeros(dim, dim);
    for (ket, bra, coeff) in terms {
        let row = usize::from_str_radix(ket, 2).expect("bits");
        let col = usize::from_str_radix(bra, 2).expect("bits");
        m[(row, col)] += c64(coeff.value(mode), 0.0);
    }
    m
}

fn bell_unitary(mode: Mode) -> ComplexMatrix {
    use Coeff::*;
    // CNOT (H ⊗ I)
    from_terms(
        2,
        mode,
        &[
            ("00", "00", InvSqrt2),
            ("00", "10", InvSqrt2),
            ("01", "01", InvSqrt2),
            ("01", "11", InvSqrt2),
            ("10", "01", InvSqrt2),
            ("10", "11", NegInvSqrt2),
            ("11", "00", InvSqrt2),
            ("11", "10", NegInvSqrt2),
        ],
    )
}

fn ghz_unitary(mode: Mode) -> ComplexMatrix {
    use Coeff::*;
    // (I ⊗ CNOT)(CNOT ⊗ I)(H ⊗ I ⊗ I)
    from_terms(
        3,
        mode,
        &[
            ("000", "000", InvSqrt2),
            ("000", "100", InvSqrt2),
            ("001", "001", InvSqrt2),
            ("001", "101", InvSqrt2),
            ("010", "011", InvSqrt2),
            ("010", "111", InvSqrt2),
            ("011", "010", InvSqrt2),
            ("011", "110", InvSqrt2),
            ("100", "010", InvSqrt2),
            ("100", "110", NegInvSqrt2),
            ("101", "011", InvSqrt2),
            ("101", "111", NegInvSqrt2),
            ("110", "001", InvSqrt2),
            ("110", "101", NegInvSqrt2),
            ("111", "000", InvSqrt2),
            ("111", "100", NegInvSqrt2),
        ],
    )
}

/// The W-preparation unitary.
///
/// The published operator carries a spurious `(1/sqrt(3))|000><100|` term
/// that inflates the `|100>` column norm to 4/3; dropping it restores that
/// column to the intended W target. Orthonormality then forces column
/// `|001>` to gain `(1/sqrt(3))|001><001|` (the completion is unique up to
/// phase). All published output matrices depend only on the `|011>` and
/// `|100>` columns and are reproduced by this operator.
fn w_unitary(mode: Mode) -> ComplexMatrix {
    use Coeff::*;
    from_terms(
        3,
        mode,
        &[
            ("000", "000", One),
            ("001", "001", InvSqrt3),
            ("001", "010", NegInvSqrt3),
            ("001", "100", InvSqrt3),
            ("010", "001", NegInvSqrt3),
            ("010", "011", InvSqrt3),
            ("010", "100", InvSqrt3),
            ("011", "101", One),
            ("100", "010", InvSqrt3),
            ("100", "011", NegInvSqrt3),
            ("100", "100", InvSqrt3),
            ("101", "110", One),
            ("110", "001", InvSqrt6),
            ("110", "010", InvSqrt6),
            ("110", "011", InvSqrt6),
            ("110", "111", InvSqrt2),
            ("111", "001", InvSqrt6),
            ("111", "010", InvSqrt6),
            ("111", "011", InvSqrt6),
            ("111", "111", NegInvSqrt2),
        ],
    )
}

/// Builds one of the bundled experiments.
pub fn build_scenario(name: ScenarioName, mode: Mode) -> Scenario {
    let (u, split, s1_pure, s2_pure, sys_init) = match name {
        ScenarioName::Bell => (
            bell_unitary(mode),
            Bipartition::contiguous(1, 1).expect("valid"),
            PureState::uniform_superposition(2, &[0b00, 0b11]),
            PureState::uniform_superposition(2, &[0, 1, 2, 3]),
            PureState::from_bits("0"),
        ),
        ScenarioName::Ghz => (
            ghz_unitary(mode),
            Bipartition::contiguous(2, 1).expect("valid"),
            PureState::from_bits("100"),
            PureState::from_bits("011"),
            PureState::from_bits("00"),
        ),
        ScenarioName::W => (
            w_unitary(mode),
            Bipartition::contiguous(2, 1).expect("valid"),
            PureState::from_bits("100"),
            PureState::uniform_superposition(3, &[0b100, 0b011]),
            PureState::from_bits("10"),
        ),
    };
    Scenario {
        name,
        mode,
        u,
        split,
        s1: s1_pure.to_density(),
        s2: s2_pure.to_density(),
        s1_pure,
        s2_pure,
        sys_init,
        env_init: PureState::from_bits("0"),
    }
}

impl Scenario {
    pub fn unitary_tolerance(&self) -> f64 {
        match self.mode {
            Mode::Exact => crate::channels::CHANNEL_TOL,
            Mode::PaperTruncated => PAPER_UNITARY_TOL,
        }
    }

    pub fn verdict_tolerance(&self) -> f64 {
        match self.mode {
            Mode::Exact => crate::divisibility::VERDICT_TOL,
            Mode::PaperTruncated => PAPER_VERDICT_TOL,
        }
    }

    /// Dilation with the scenario's fixed environment input.
    pub fn dilation(&self) -> Result<UnitaryDilation> {
        UnitaryDilation::with_tolerance(
            self.u.clone(),
            self.split.clone(),
            self.env_init.to_density(),
            self.unitary_tolerance(),
        )
    }
}

/// Published six-distance table for a scenario, in the order: system in,
/// system out, environment in, environment out, full in, full out.
/// These are the six-decimal figures as printed, not closed forms.
#[allow(clippy::approx_constant)]
pub fn reference_distances(name: ScenarioName) -> [f64; 6] {
    match name {
        ScenarioName::Bell => [0.500000, 0.499849, 0.500000, 0.499849, 0.707107, 0.706893],
        ScenarioName::Ghz => [1.000000, 0.999698, 1.000000, 0.000000, 1.000000, 0.999698],
        ScenarioName::W => [0.500000, 0.693130, 0.500000, 0.117708, 0.707107, 0.706249],
    }
}

/// Everything the runner computes for one scenario.
#[derive(Debug, Clone, Serialize)]
pub struct ScenarioReport {
    pub name: ScenarioName,
    pub mode: Mode,
    pub step: StepReport,
    pub theorem2: Theorem2Report,
    pub system_channel: UnitalityReport,
    pub environment_channel: UnitalityReport,
    /// Deviations from the published tables beyond the acceptance band
    /// (truncated mode only); surfaced as warnings, never as errors.
    pub warnings: Vec<String>,
}

/// Runs a scenario: six distances, verdicts, inequality ledger, and
/// unitality of the induced system and environment channels.
pub fn run_scenario(scenario: &Scenario, metric: Metric) -> Result<ScenarioReport> {
    let dilation = scenario.dilation()?;
    let verdict_tol = scenario.verdict_tolerance();
    let step = probe_step_with(&dilation, &scenario.s1, &scenario.s2, metric, verdict_tol)?;
    let theorem2 = theorem2_report(&dilation, &scenario.s1, &scenario.s2)?;

    let unital_tol = scenario.unitary_tolerance();
    let system_channel = dilation.to_kraus()?.is_unital(unital_tol)?;
    let environment_channel = dilation
        .complementary(&scenario.sys_init.to_density())?
        .to_kraus()?
        .is_unital(unital_tol)?;

    let mut warnings = Vec::new();
    if scenario.mode == Mode::PaperTruncated && metric == Metric::TraceNorm {
        let reference = reference_distances(scenario.name);
        let got = [
            step.d_sys_in,
            step.d_sys_out,
            step.d_env_in,
            step.d_env_out,
            step.d_full_in,
            step.d_full_out,
        ];
        let labels = ["system in", "system out", "environment in", "environment out", "full in", "full out"];
        for ((have, want), label) in got.iter().zip(reference).zip(labels) {
            if (have - want).abs() > PAPER_TABLE_TOL {
                warnings.push(format!(
                    "{label} distance {have:.6} deviates from the published {want:.6} by more than {PAPER_TABLE_TOL:.0e}"
                ));
            }
        }
    }

    Ok(ScenarioReport {
        name: scenario.name,
        mode: scenario.mode,
        step,
        theorem2,
        system_channel,
        environment_channel,
        warnings,
    })
}
