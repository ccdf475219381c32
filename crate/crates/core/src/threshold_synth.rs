//! Integer weight search for crosstalk gates.
//!
//! Given a boolean function (or a pair of functions selected by a control
//! aggressor) this finds nonnegative integer couplings and a CT-margin that
//! realize it on a single victim net. The search is exhaustive inside the
//! weight box `1..=max_weight`, so an `Infeasible` answer is exact for that
//! bound.
//!
//! Solutions are ordered by total coupling (control included) and then
//! lexicographically by `(data weights.., ctrl weight)`; the first solution in
//! that order is returned, with the smallest admissible theta.

use serde::Serialize;
use thiserror::Error;

use crate::charge_model::{CouplingWeights, DEFAULT_MAX_WEIGHT};
use crate::gate_library::{GateError, GateSpec};
use crate::truth_table::TruthTable;

pub const MAX_SYNTH_ARITY: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynthError {
    #[error("arity {0} exceeds the synthesis limit of {MAX_SYNTH_ARITY}")]
    TooWide(usize),
    #[error("f0 has arity {f0} but f1 has arity {f1}")]
    ArityMismatch { f0: usize, f1: usize },
    #[error("f0 and f1 are identical; the control aggressor would have no effect")]
    IdenticalFunctions,
    #[error("constant function needs no crosstalk gate")]
    Degenerate,
    #[error("max weight must be at least 1")]
    ZeroMaxWeight,
    #[error("no single-victim realization with weights ≤ {max_weight}")]
    Infeasible { max_weight: u32 },
    #[error("solution could not be instantiated: {0}")]
    Gate(#[from] GateError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthProblem {
    f0: TruthTable,
    f1: Option<TruthTable>,
    max_weight: u32,
}

impl SynthProblem {
    pub fn new(
        f0: TruthTable,
        f1: Option<TruthTable>,
        max_weight: u32,
    ) -> Result<Self, SynthError> {
        if f0.arity() > MAX_SYNTH_ARITY {
            return Err(SynthError::TooWide(f0.arity()));
        }
        if max_weight == 0 {
            return Err(SynthError::ZeroMaxWeight);
        }
        if let Some(f1) = &f1 {
            if f1.arity() != f0.arity() {
                return Err(SynthError::ArityMismatch {
                    f0: f0.arity(),
                    f1: f1.arity(),
                });
            }
            if *f1 == f0 {
                return Err(SynthError::IdenticalFunctions);
            }
        }
        Ok(Self { f0, f1, max_weight })
    }

    pub fn single(f0: TruthTable) -> Result<Self, SynthError> {
        Self::new(f0, None, DEFAULT_MAX_WEIGHT)
    }

    pub fn polymorphic(f0: TruthTable, f1: TruthTable) -> Result<Self, SynthError> {
        Self::new(f0, Some(f1), DEFAULT_MAX_WEIGHT)
    }

    pub fn f0(&self) -> &TruthTable {
        &self.f0
    }

    pub fn f1(&self) -> Option<&TruthTable> {
        self.f1.as_ref()
    }

    pub fn max_weight(&self) -> u32 {
        self.max_weight
    }

    pub fn arity(&self) -> usize {
        self.f0.arity()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ThresholdSolution {
    pub weights: Vec<u32>,
    pub theta: u32,
}

/// Finds `(weights, theta)` with `[Σ w·x ≥ theta] = f0`.
pub fn solve_threshold(problem: &SynthProblem) -> Result<ThresholdSolution, SynthError> {
    let f0 = &problem.f0;
    if f0.is_constant() {
        return Err(SynthError::Degenerate);
    }
    let infeasible = SynthError::Infeasible {
        max_weight: problem.max_weight,
    };
    // Nonnegative weights can only realize monotone functions.
    if !f0.is_monotone() {
        return Err(infeasible);
    }
    let n = problem.arity();
    search(n, problem.max_weight, |w| {
        theta_window(f0, w, 0).and_then(|(lo, hi)| (lo <= hi.min(w.iter().sum())).then_some(lo))
    })
    .map(|(weights, theta)| ThresholdSolution { weights, theta })
    .ok_or(infeasible)
}

/// Finds a generic two-stage gate whose control aggressor switches it from
/// `f0` to `f1`.
pub fn solve_polymorphic(problem: &SynthProblem) -> Result<GateSpec, SynthError> {
    let f0 = &problem.f0;
    let Some(f1) = problem.f1.as_ref() else {
        let sol = solve_threshold(problem)?;
        let weights = CouplingWeights::with_max_weight(sol.weights, 0, problem.max_weight)
            .map_err(GateError::from)?;
        return Ok(GateSpec::generic(weights, sol.theta, 2)?);
    };
    let infeasible = SynthError::Infeasible {
        max_weight: problem.max_weight,
    };
    // The control only adds charge, so f1 must dominate f0; both sides are
    // threshold functions of nonnegative weights and hence monotone.
    if !f0.implies(f1) || !f0.is_monotone() || !f1.is_monotone() {
        return Err(infeasible);
    }
    let n = problem.arity();
    let found = search(n + 1, problem.max_weight, |w| {
        let (data, ctrl) = w.split_at(n);
        let ctrl = ctrl[0];
        let (lo0, hi0) = theta_window(f0, data, 0)?;
        let (lo1, hi1) = theta_window(f1, data, ctrl)?;
        let total: u32 = w.iter().sum();
        let lo = lo0.max(lo1);
        (lo <= hi0.min(hi1).min(total)).then_some(lo)
    });
    let (w, theta) = found.ok_or(infeasible)?;
    let weights = CouplingWeights::with_max_weight(w[..n].to_vec(), w[n], problem.max_weight)
        .map_err(GateError::from)?;
    Ok(GateSpec::generic(weights, theta, 2)?)
}

/// Admissible theta range `lo..=hi` for `[Σ w·x + shift ≥ theta] = f`, before
/// clipping to the total coupling. `None` when the range is empty.
fn theta_window(f: &TruthTable, weights: &[u32], shift: u32) -> Option<(u32, u32)> {
    let mut lo = 1u32;
    let mut hi = u32::MAX;
    for k in 0..f.len() {
        let s = shift
            + weights
                .iter()
                .enumerate()
                .filter(|(i, _)| k >> i & 1 == 1)
                .map(|(_, &w)| w)
                .sum::<u32>();
        if f.get(k) {
            hi = hi.min(s);
        } else {
            lo = lo.max(s + 1);
        }
    }
    (lo <= hi).then_some((lo, hi))
}

/// Visits weight vectors of length `len` in `1..=max` ordered by sum, then
/// lexicographically, returning the first one `accept` maps to a theta.
fn search(
    len: usize,
    max: u32,
    mut accept: impl FnMut(&[u32]) -> Option<u32>,
) -> Option<(Vec<u32>, u32)> {
    let len_u32 = len as u32;
    let mut buf = vec![0u32; len];
    for total in len_u32..=len_u32 * max {
        if let Some(theta) = compositions(&mut buf, 0, total, max, &mut accept) {
            return Some((buf, theta));
        }
    }
    None
}

fn compositions(
    buf: &mut [u32],
    pos: usize,
    remaining: u32,
    max: u32,
    accept: &mut impl FnMut(&[u32]) -> Option<u32>,
) -> Option<u32> {
    let slots_after = (buf.len() - pos - 1) as u32;
    if slots_after == 0 {
        if (1..=max).contains(&remaining) {
            buf[pos] = remaining;
            return accept(buf);
        }
        return None;
    }
    let lo = remaining.saturating_sub(slots_after * max).max(1);
    let hi = remaining.saturating_sub(slots_after).min(max);
    for w in lo..=hi {
        buf[pos] = w;
        if let Some(theta) = compositions(buf, pos + 1, remaining - w, max, accept) {
            return Some(theta);
        }
    }
    None
}

/// Outcome of checking a gate against the functions it should realize.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Realization {
    Pass,
    Fail {
        index: usize,
        ctrl: bool,
        expected: bool,
        actual: bool,
    },
}

impl Realization {
    pub fn passed(&self) -> bool {
        matches!(self, Realization::Pass)
    }
}

/// Exhaustively compares `spec` against `f0` (ctrl low) and `f1` (ctrl high),
/// reporting the first mismatch in ascending input order with ctrl=0 first.
/// Without `f1`, the gate must compute `f0` regardless of ctrl.
pub fn validate_realization(
    spec: &GateSpec,
    f0: &TruthTable,
    f1: Option<&TruthTable>,
) -> Realization {
    assert_eq!(
        spec.arity(),
        f0.arity(),
        "gate arity must match the function"
    );
    let f1 = f1.unwrap_or(f0);
    for (ctrl, f) in [(false, f0), (true, f1)] {
        let table = spec.truth_table(ctrl);
        if let Some(index) = (0..f.len()).find(|&k| table.get(k) != f.get(k)) {
            return Realization::Fail {
                index,
                ctrl,
                expected: f.get(index),
                actual: table.get(index),
            };
        }
    }
    Realization::Pass
}
