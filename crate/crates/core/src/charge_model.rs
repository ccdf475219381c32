//! Evaluation semantics of a single crosstalk gate.
//!
//! Rising transitions on the aggressor nets induce charge on a floating victim
//! net. The victim level is the coupled charge divided by the total capacitance
//! seen by the victim, and a thresholding inverter turns that level into a
//! logic value. Capacitances are normalized: one unit of a gate family's
//! coupling capacitance is the integer `1`.
//!
//! All threshold decisions are made on integers (`active ≥ theta`) or exact
//! rationals; nothing here compares floats on a decision boundary.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Exact normalized voltage or capacitance.
pub type Level = Ratio<i64>;

/// Upper bound on a single coupling weight unless a caller asks otherwise.
pub const DEFAULT_MAX_WEIGHT: u32 = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("expected {expected} data inputs, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("at least one data weight must be positive")]
    NoActiveCoupling,
    #[error("coupling weight {weight} exceeds the maximum of {max}")]
    WeightTooLarge { weight: u32, max: u32 },
    #[error("threshold {theta} outside 1..={total}")]
    ThresholdOutOfRange { theta: u32, total: u32 },
    #[error("stage count {0} is not 1 or 2")]
    InvalidStages(u8),
    #[error("inverter switching level must lie strictly between 0 and 1")]
    InvalidSwitchingLevel,
    #[error("parasitic capacitance must be nonnegative")]
    NegativeParasitic,
    #[error("victim must be discharged before evaluation")]
    NotDischarged,
}

/// Normalized coupling capacitances of the data aggressors and the optional
/// control aggressor of one gate.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CouplingWeights {
    data: Vec<u32>,
    ctrl: u32,
}

impl CouplingWeights {
    pub fn new(data: Vec<u32>, ctrl: u32) -> Result<Self, ModelError> {
        Self::with_max_weight(data, ctrl, DEFAULT_MAX_WEIGHT)
    }

    pub fn with_max_weight(data: Vec<u32>, ctrl: u32, max: u32) -> Result<Self, ModelError> {
        if !data.iter().any(|&w| w > 0) {
            return Err(ModelError::NoActiveCoupling);
        }
        if let Some(&weight) = data
            .iter()
            .chain(std::iter::once(&ctrl))
            .find(|&&w| w > max)
        {
            return Err(ModelError::WeightTooLarge { weight, max });
        }
        Ok(Self { data, ctrl })
    }

    pub fn data(&self) -> &[u32] {
        &self.data
    }

    pub fn ctrl(&self) -> u32 {
        self.ctrl
    }

    pub fn arity(&self) -> usize {
        self.data.len()
    }

    pub fn has_ctrl(&self) -> bool {
        self.ctrl > 0
    }

    /// Sum of every coupling, control included.
    pub fn total(&self) -> u32 {
        self.data.iter().sum::<u32>() + self.ctrl
    }

    /// Coupling contributed by the aggressors that rise in this evaluation.
    pub fn active(&self, inputs: &[bool], ctrl: bool) -> Result<u32, ModelError> {
        if inputs.len() != self.data.len() {
            return Err(ModelError::DimensionMismatch {
                expected: self.data.len(),
                got: inputs.len(),
            });
        }
        let data: u32 = self
            .data
            .iter()
            .zip(inputs)
            .filter(|(_, &x)| x)
            .map(|(&w, _)| w)
            .sum();
        Ok(data + if ctrl { self.ctrl } else { 0 })
    }
}

/// The CT-margin: minimum active coupling that flips the first-stage inverter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Margin {
    theta: u32,
}

impl Margin {
    pub fn new(theta: u32, weights: &CouplingWeights) -> Result<Self, ModelError> {
        let total = weights.total();
        if theta == 0 || theta > total {
            return Err(ModelError::ThresholdOutOfRange { theta, total });
        }
        Ok(Self { theta })
    }

    pub fn theta(self) -> u32 {
        self.theta
    }
}

/// Number of inverter stages behind the victim.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Stages {
    /// `F_I`: a single inverter, inverting output (NAND, NOR, AOI).
    Inverting,
    /// `F`: two inverters, non-inverting output (AND, OR, AO).
    NonInverting,
}

impl Stages {
    pub fn from_count(n: u8) -> Result<Self, ModelError> {
        match n {
            1 => Ok(Stages::Inverting),
            2 => Ok(Stages::NonInverting),
            other => Err(ModelError::InvalidStages(other)),
        }
    }

    pub fn count(self) -> u8 {
        match self {
            Stages::Inverting => 1,
            Stages::NonInverting => 2,
        }
    }

    pub fn apply(self, fire: bool) -> bool {
        match self {
            Stages::Inverting => !fire,
            Stages::NonInverting => fire,
        }
    }
}

/// Parameters that turn charge sharing into a numeric victim level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AnalogParams {
    c_parasitic: Level,
    v_threshold: Level,
}

impl AnalogParams {
    pub fn new(c_parasitic: Level, v_threshold: Level) -> Result<Self, ModelError> {
        if c_parasitic < Level::from_integer(0) {
            return Err(ModelError::NegativeParasitic);
        }
        if v_threshold <= Level::from_integer(0) || v_threshold >= Level::from_integer(1) {
            return Err(ModelError::InvalidSwitchingLevel);
        }
        Ok(Self {
            c_parasitic,
            v_threshold,
        })
    }

    /// No parasitic load and a switching level halfway between the highest
    /// non-firing level and the lowest firing level: `(theta - 1/2) / W`.
    pub fn centered(weights: &CouplingWeights, margin: Margin) -> Self {
        let total = i64::from(weights.total());
        let theta = i64::from(margin.theta());
        Self {
            c_parasitic: Level::from_integer(0),
            v_threshold: Level::new(2 * theta - 1, 2 * total),
        }
    }

    pub fn c_parasitic(&self) -> Level {
        self.c_parasitic
    }

    pub fn v_threshold(&self) -> Level {
        self.v_threshold
    }
}

/// Normalized victim voltage after the evaluation transitions:
/// active coupling over total coupling plus parasitic load.
pub fn induced_level(
    weights: &CouplingWeights,
    inputs: &[bool],
    ctrl: bool,
    analog: &AnalogParams,
) -> Result<Level, ModelError> {
    let active = weights.active(inputs, ctrl)?;
    Ok(level_of(active, weights.total(), analog.c_parasitic))
}

fn level_of(active: u32, total: u32, c_parasitic: Level) -> Level {
    Level::from_integer(i64::from(active)) / (Level::from_integer(i64::from(total)) + c_parasitic)
}

/// Discrete CT-margin decision: fires iff active coupling ≥ theta.
pub fn fires(
    weights: &CouplingWeights,
    margin: Margin,
    inputs: &[bool],
    ctrl: bool,
) -> Result<bool, ModelError> {
    Ok(weights.active(inputs, ctrl)? >= margin.theta())
}

pub fn stage_output(fire: bool, n_stages: u8) -> Result<bool, ModelError> {
    Ok(Stages::from_count(n_stages)?.apply(fire))
}

/// Analog decision: fires iff the victim level reaches the switching level.
pub fn analog_fires(
    weights: &CouplingWeights,
    inputs: &[bool],
    ctrl: bool,
    analog: &AnalogParams,
) -> Result<bool, ModelError> {
    Ok(induced_level(weights, inputs, ctrl, analog)? >= analog.v_threshold)
}

/// Distance of the worst-case levels from the switching level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NoiseMargins {
    /// `v_threshold` minus the highest level that must not fire.
    pub low: Level,
    /// Lowest level that must fire minus `v_threshold`.
    pub high: Level,
}

impl NoiseMargins {
    /// An exact hit on the switching level still fires, so `high` may be zero.
    pub fn is_valid(&self) -> bool {
        self.low > Level::from_integer(0) && self.high >= Level::from_integer(0)
    }
}

/// Enumerates every active-coupling value reachable from (inputs, ctrl) and
/// measures how far the levels on each side of theta sit from `v_threshold`.
pub fn noise_margins(
    weights: &CouplingWeights,
    margin: Margin,
    analog: &AnalogParams,
) -> NoiseMargins {
    let total = weights.total();
    let mut lowest_firing: Option<u32> = None;
    let mut highest_quiet: Option<u32> = None;
    for active in reachable_sums(weights) {
        if active >= margin.theta() {
            lowest_firing = Some(lowest_firing.map_or(active, |m| m.min(active)));
        } else {
            highest_quiet = Some(highest_quiet.map_or(active, |m| m.max(active)));
        }
    }
    // theta ∈ 1..=total, so all-high always fires and all-low never does.
    let lowest_firing = lowest_firing.expect("all-high vector fires");
    let highest_quiet = highest_quiet.expect("all-low vector is quiet");
    NoiseMargins {
        low: analog.v_threshold - level_of(highest_quiet, total, analog.c_parasitic),
        high: level_of(lowest_firing, total, analog.c_parasitic) - analog.v_threshold,
    }
}

fn reachable_sums(weights: &CouplingWeights) -> Vec<u32> {
    let mut sums = vec![0u32];
    for &w in weights
        .data()
        .iter()
        .chain(std::iter::once(&weights.ctrl()))
    {
        let shifted: Vec<u32> = sums.iter().map(|s| s + w).collect();
        sums.extend(shifted);
        sums.sort_unstable();
        sums.dedup();
    }
    sums
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase {
    Discharge,
    Evaluation,
}

/// The floating victim net across the two-phase protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VictimState {
    level: Level,
    phase: Phase,
}

impl Default for VictimState {
    fn default() -> Self {
        Self {
            level: Level::from_integer(0),
            phase: Phase::Discharge,
        }
    }
}

impl VictimState {
    pub fn level(&self) -> Level {
        self.level
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    /// Shorts the victim to ground.
    pub fn discharge(&mut self) {
        self.level = Level::from_integer(0);
        self.phase = Phase::Discharge;
    }

    pub fn evaluate(
        &mut self,
        weights: &CouplingWeights,
        inputs: &[bool],
        ctrl: bool,
        analog: &AnalogParams,
    ) -> Result<Level, ModelError> {
        if self.phase != Phase::Discharge {
            return Err(ModelError::NotDischarged);
        }
        self.level = induced_level(weights, inputs, ctrl, analog)?;
        self.phase = Phase::Evaluation;
        Ok(self.level)
    }
}
