//! Canonical crosstalk gates.
//!
//! Every named kind is fully determined by its normalized couplings, CT-margin
//! and stage count. Polymorphic kinds carry a control aggressor whose charge
//! biases the victim toward the second function.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::charge_model::{self, AnalogParams, CouplingWeights, Level, Margin, ModelError, Stages};
use crate::truth_table::TruthTable;

/// Widest generic gate whose two truth tables are still checked at construction.
pub const MAX_GENERIC_ARITY: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GateError {
    #[error("GENERIC_CT needs explicit weights, theta and stages")]
    MissingParameters,
    #[error("unknown gate kind {0:?}")]
    UnknownKind(String),
    #[error("generic gate arity {0} exceeds {MAX_GENERIC_ARITY}")]
    TooWide(usize),
    #[error("control aggressor does not change the gate's function")]
    IneffectiveControl,
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GateKind {
    CtNand,
    CtNor,
    CtAnd,
    CtOr,
    CtAoi21,
    CtAo21,
    PolyAndOr,
    PolyOa21Ao21,
    PolyAnd3Ao21,
    PolyAo21Or3,
    Inv,
    GenericCt,
}

impl GateKind {
    pub const ALL: [GateKind; 12] = [
        GateKind::CtNand,
        GateKind::CtNor,
        GateKind::CtAnd,
        GateKind::CtOr,
        GateKind::CtAoi21,
        GateKind::CtAo21,
        GateKind::PolyAndOr,
        GateKind::PolyOa21Ao21,
        GateKind::PolyAnd3Ao21,
        GateKind::PolyAo21Or3,
        GateKind::Inv,
        GateKind::GenericCt,
    ];

    pub const POLYMORPHIC: [GateKind; 4] = [
        GateKind::PolyAndOr,
        GateKind::PolyOa21Ao21,
        GateKind::PolyAnd3Ao21,
        GateKind::PolyAo21Or3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GateKind::CtNand => "CT_NAND",
            GateKind::CtNor => "CT_NOR",
            GateKind::CtAnd => "CT_AND",
            GateKind::CtOr => "CT_OR",
            GateKind::CtAoi21 => "CT_AOI21",
            GateKind::CtAo21 => "CT_AO21",
            GateKind::PolyAndOr => "POLY_AND_OR",
            GateKind::PolyOa21Ao21 => "POLY_OA21_AO21",
            GateKind::PolyAnd3Ao21 => "POLY_AND3_AO21",
            GateKind::PolyAo21Or3 => "POLY_AO21_OR3",
            GateKind::Inv => "INV",
            GateKind::GenericCt => "GENERIC_CT",
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GateKind {
    type Err = GateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GateKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| GateError::UnknownKind(s.to_string()))
    }
}

/// A fully parametrized gate.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GateSpec {
    kind: GateKind,
    weights: CouplingWeights,
    margin: Margin,
    stages: Stages,
}

impl GateSpec {
    fn canonical(kind: GateKind, data: &[u32], ctrl: u32, theta: u32, stages: Stages) -> Self {
        let weights = CouplingWeights::new(data.to_vec(), ctrl).expect("library weights are valid");
        let margin = Margin::new(theta, &weights).expect("library margin is valid");
        Self {
            kind,
            weights,
            margin,
            stages,
        }
    }

    /// A crosstalk gate with arbitrary couplings. When a control aggressor is
    /// present it must switch the gate between two distinct functions.
    pub fn generic(weights: CouplingWeights, theta: u32, n_stages: u8) -> Result<Self, GateError> {
        if weights.arity() > MAX_GENERIC_ARITY {
            return Err(GateError::TooWide(weights.arity()));
        }
        let margin = Margin::new(theta, &weights)?;
        let stages = Stages::from_count(n_stages)?;
        let spec = Self {
            kind: GateKind::GenericCt,
            weights,
            margin,
            stages,
        };
        if spec.has_ctrl() && spec.truth_table(false) == spec.truth_table(true) {
            return Err(GateError::IneffectiveControl);
        }
        Ok(spec)
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn weights(&self) -> &CouplingWeights {
        &self.weights
    }

    pub fn margin(&self) -> Margin {
        self.margin
    }

    pub fn theta(&self) -> u32 {
        self.margin.theta()
    }

    pub fn stages(&self) -> Stages {
        self.stages
    }

    pub fn arity(&self) -> usize {
        self.weights.arity()
    }

    pub fn has_ctrl(&self) -> bool {
        self.weights.has_ctrl()
    }

    pub fn is_inverter(&self) -> bool {
        self.kind == GateKind::Inv
    }

    /// Discrete evaluation through the CT-margin and the inverter stages.
    pub fn evaluate(&self, inputs: &[bool], ctrl: bool) -> Result<bool, ModelError> {
        Ok(self.stages.apply(charge_model::fires(
            &self.weights,
            self.margin,
            inputs,
            ctrl,
        )?))
    }

    /// Analog evaluation: returns the victim level and the gate output.
    pub fn evaluate_analog(
        &self,
        inputs: &[bool],
        ctrl: bool,
        analog: &AnalogParams,
    ) -> Result<(Level, bool), ModelError> {
        let level = charge_model::induced_level(&self.weights, inputs, ctrl, analog)?;
        Ok((level, self.stages.apply(level >= analog.v_threshold())))
    }

    pub fn default_analog(&self) -> AnalogParams {
        AnalogParams::centered(&self.weights, self.margin)
    }

    pub fn truth_table(&self, ctrl: bool) -> TruthTable {
        TruthTable::from_fn(self.arity(), |x| {
            self.evaluate(x, ctrl)
                .expect("arity matches by construction")
        })
    }

    /// One transistor pair per inverter stage plus the discharge transistor;
    /// a standalone inverter is a single complementary pair.
    pub fn transistor_count(&self) -> u32 {
        if self.is_inverter() {
            2
        } else {
            2 * u32::from(self.stages.count()) + 1
        }
    }
}

pub fn build_gate(kind: GateKind) -> Result<GateSpec, GateError> {
    use GateKind::*;
    use Stages::{Inverting as One, NonInverting as Two};
    Ok(match kind {
        CtNand => GateSpec::canonical(kind, &[1, 1], 0, 2, One),
        CtAnd => GateSpec::canonical(kind, &[1, 1], 0, 2, Two),
        CtNor => GateSpec::canonical(kind, &[1, 1], 0, 1, One),
        CtOr => GateSpec::canonical(kind, &[1, 1], 0, 1, Two),
        CtAoi21 => GateSpec::canonical(kind, &[1, 1, 2], 0, 2, One),
        CtAo21 => GateSpec::canonical(kind, &[1, 1, 2], 0, 2, Two),
        PolyAndOr => GateSpec::canonical(kind, &[1, 1], 1, 2, Two),
        PolyOa21Ao21 => GateSpec::canonical(kind, &[1, 1, 2], 1, 3, Two),
        PolyAnd3Ao21 => GateSpec::canonical(kind, &[1, 1, 2], 2, 4, Two),
        PolyAo21Or3 => GateSpec::canonical(kind, &[1, 1, 2], 1, 2, Two),
        Inv => GateSpec::canonical(kind, &[1], 0, 1, One),
        GenericCt => return Err(GateError::MissingParameters),
    })
}

pub fn gate_truth_table(spec: &GateSpec, ctrl: bool) -> TruthTable {
    spec.truth_table(ctrl)
}

pub fn transistor_count(spec: &GateSpec) -> u32 {
    spec.transistor_count()
}

/// Reference boolean functions used to check the library, LSB-first.
pub mod reference {
    use crate::truth_table::TruthTable;

    pub fn and2() -> TruthTable {
        TruthTable::from_fn(2, |x| x[0] && x[1])
    }
    pub fn or2() -> TruthTable {
        TruthTable::from_fn(2, |x| x[0] || x[1])
    }
    pub fn nand2() -> TruthTable {
        TruthTable::from_fn(2, |x| !(x[0] && x[1]))
    }
    pub fn nor2() -> TruthTable {
        TruthTable::from_fn(2, |x| !(x[0] || x[1]))
    }
    pub fn xor2() -> TruthTable {
        TruthTable::from_fn(2, |x| x[0] ^ x[1])
    }
    pub fn and3() -> TruthTable {
        TruthTable::from_fn(3, |x| x[0] && x[1] && x[2])
    }
    pub fn or3() -> TruthTable {
        TruthTable::from_fn(3, |x| x[0] || x[1] || x[2])
    }
    /// A·B + C
    pub fn ao21() -> TruthTable {
        TruthTable::from_fn(3, |x| (x[0] && x[1]) || x[2])
    }
    /// (A + B)·C
    pub fn oa21() -> TruthTable {
        TruthTable::from_fn(3, |x| (x[0] || x[1]) && x[2])
    }
    /// (A·B + C)'
    pub fn aoi21() -> TruthTable {
        TruthTable::from_fn(3, |x| !((x[0] && x[1]) || x[2]))
    }
    pub fn inv() -> TruthTable {
        TruthTable::from_fn(1, |x| !x[0])
    }

    pub fn by_name(name: &str) -> Option<TruthTable> {
        Some(match name {
            "and2" => and2(),
            "or2" => or2(),
            "nand2" => nand2(),
            "nor2" => nor2(),
            "xor2" => xor2(),
            "and3" => and3(),
            "or3" => or3(),
            "ao21" => ao21(),
            "oa21" => oa21(),
            "aoi21" => aoi21(),
            "inv" => inv(),
            _ => return None,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::reference::*;
    use super::*;
    use crate::charge_model::analog_fires;

    fn gate(kind: GateKind) -> GateSpec {
        build_gate(kind).unwrap()
    }

    #[test]
    fn canonical_parameters() {
        let g = gate(GateKind::PolyAndOr);
        assert_eq!(g.theta(), 2);
        assert_eq!(g.weights().data(), &[1, 1]);
        assert_eq!(g.weights().ctrl(), 1);

        let g = gate(GateKind::PolyOa21Ao21);
        assert_eq!(g.theta(), 3);
        assert_eq!(g.weights().data()[2], 2);

        let g = gate(GateKind::PolyAnd3Ao21);
        assert_eq!(g.theta(), 4);
        assert_eq!(g.weights().data()[2], 2);
        assert_eq!(g.weights().ctrl(), 2);
    }

    #[test]
    fn generic_requires_parameters() {
        assert_eq!(
            build_gate(GateKind::GenericCt),
            Err(GateError::MissingParameters)
        );
    }

    #[test]
    fn polymorphic_pairs_realize_named_functions() {
        let cases = [
            (GateKind::PolyAndOr, and2(), or2()),
            (GateKind::PolyOa21Ao21, oa21(), ao21()),
            (GateKind::PolyAnd3Ao21, and3(), ao21()),
            (GateKind::PolyAo21Or3, ao21(), or3()),
        ];
        for (kind, f0, f1) in cases {
            let g = gate(kind);
            assert_eq!(gate_truth_table(&g, false), f0, "{kind} ctrl=0");
            assert_eq!(gate_truth_table(&g, true), f1, "{kind} ctrl=1");
        }
        assert_eq!(
            gate(GateKind::PolyAndOr).truth_table(false).to_string(),
            "0001"
        );
        assert_eq!(
            gate(GateKind::PolyAndOr).truth_table(true).to_string(),
            "0111"
        );
        assert_eq!(
            gate(GateKind::PolyAo21Or3).truth_table(true).to_string(),
            "01111111"
        );
    }

    #[test]
    fn fixed_gates_match_definitions() {
        let cases = [
            (GateKind::CtNand, nand2()),
            (GateKind::CtNor, nor2()),
            (GateKind::CtAnd, and2()),
            (GateKind::CtOr, or2()),
            (GateKind::CtAoi21, aoi21()),
            (GateKind::CtAo21, ao21()),
            (GateKind::Inv, inv()),
        ];
        for (kind, f) in cases {
            let g = gate(kind);
            assert!(!g.has_ctrl());
            assert_eq!(g.truth_table(false), f, "{kind}");
            assert_eq!(g.truth_table(true), f, "{kind}");
        }
    }

    #[test]
    fn tables_differ_iff_polymorphic() {
        for kind in GateKind::ALL
            .into_iter()
            .filter(|&k| k != GateKind::GenericCt)
        {
            let g = gate(kind);
            assert_eq!(
                g.truth_table(false) != g.truth_table(true),
                g.has_ctrl(),
                "{kind}"
            );
        }
    }

    #[test]
    fn library_modes_agree() {
        for kind in GateKind::ALL
            .into_iter()
            .filter(|&k| k != GateKind::GenericCt)
        {
            let g = gate(kind);
            let analog = g.default_analog();
            for k in 0..1usize << g.arity() {
                let x = crate::truth_table::index_to_inputs(k, g.arity());
                for ctrl in [false, true] {
                    let discrete = charge_model::fires(g.weights(), g.margin(), &x, ctrl).unwrap();
                    let analog = analog_fires(g.weights(), &x, ctrl, &analog).unwrap();
                    assert_eq!(discrete, analog, "{kind} {x:?} ctrl={ctrl}");
                }
            }
        }
    }

    #[test]
    fn transistor_counts() {
        for kind in GateKind::POLYMORPHIC {
            assert_eq!(transistor_count(&gate(kind)), 5, "{kind}");
        }
        assert_eq!(transistor_count(&gate(GateKind::Inv)), 2);
        assert_eq!(transistor_count(&gate(GateKind::CtNand)), 3);
    }

    #[test]
    fn generic_rejects_ineffective_control() {
        let w = CouplingWeights::new(vec![2, 2], 1).unwrap();
        assert_eq!(
            GateSpec::generic(w, 4, 2),
            Err(GateError::IneffectiveControl)
        );
        let w = CouplingWeights::new(vec![2, 2], 2).unwrap();
        let g = GateSpec::generic(w, 4, 2).unwrap();
        assert_eq!(g.truth_table(false), and2());
        assert_eq!(g.truth_table(true), or2());
    }

    #[test]
    fn kind_names_round_trip() {
        for kind in GateKind::ALL {
            assert_eq!(kind.name().parse::<GateKind>().unwrap(), kind);
        }
        assert!("CT_XOR".parse::<GateKind>().is_err());
    }
}
