//! Two-phase simulation of crosstalk netlists.
//!
//! Every cycle starts with a global discharge that grounds all victims, so
//! cycles share no state. The evaluation phase then applies the input and
//! control assignment and settles gates in topological order. Faults are
//! persistent for a run and act at net granularity after the driving gate
//! has been evaluated, so downstream gates see the faulty value.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::charge_model::{AnalogParams, Level, ModelError, VictimState};
use crate::netlist::{Driver, Netlist};

/// Net name to logic value.
pub type Assignment = BTreeMap<String, bool>;

/// Input assignments above this width are not enumerated.
pub const MAX_EXHAUSTIVE_INPUTS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("no value assigned to {0:?}")]
    MissingAssignment(String),
    #[error("{0:?} is not a declared input or control net")]
    UnknownSignal(String),
    #[error("fault references unknown {kind} {name:?}")]
    UnknownFaultTarget { kind: &'static str, name: String },
    #[error("cannot parse fault {0:?}; expected stuck:<net>=<0|1>, dead_gate:<gate> or dead_block:<block>")]
    BadFault(String),
    #[error("line {line}: {message}")]
    BadVector { line: usize, message: String },
    #[error("{0} inputs is too many to enumerate (limit {MAX_EXHAUSTIVE_INPUTS})")]
    TooManyInputs(usize),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// How gates turn coupled charge into logic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimMode {
    /// Integer CT-margin comparison.
    Discrete,
    /// Victim level against an inverter switching level.
    Analog(AnalogSetting),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnalogSetting {
    /// Each gate uses its centered switching level and no parasitic load.
    PerGateDefault,
    /// Every gate uses the same parameters.
    Fixed(AnalogParams),
}

impl SimMode {
    pub fn analog() -> Self {
        SimMode::Analog(AnalogSetting::PerGateDefault)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Fault {
    StuckAt {
        net: String,
        value: bool,
    },
    /// Victim shorted to ground: the gate output reads 0.
    DeadGate(String),
    /// Every gate of the block is dead.
    DeadBlock(String),
}

impl fmt::Display for Fault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fault::StuckAt { net, value } => write!(f, "stuck:{net}={}", u8::from(*value)),
            Fault::DeadGate(g) => write!(f, "dead_gate:{g}"),
            Fault::DeadBlock(b) => write!(f, "dead_block:{b}"),
        }
    }
}

impl FromStr for Fault {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SimError::BadFault(s.to_string());
        let (kind, arg) = s.split_once(':').ok_or_else(bad)?;
        if arg.is_empty() {
            return Err(bad());
        }
        match kind {
            "stuck" => {
                let (net, v) = arg.split_once('=').ok_or_else(bad)?;
                let value = parse_bit(v).ok_or_else(bad)?;
                Ok(Fault::StuckAt {
                    net: net.to_string(),
                    value,
                })
            }
            "dead_gate" => Ok(Fault::DeadGate(arg.to_string())),
            "dead_block" => Ok(Fault::DeadBlock(arg.to_string())),
            _ => Err(bad()),
        }
    }
}

fn parse_bit(s: &str) -> Option<bool> {
    match s {
        "0" => Some(false),
        "1" => Some(true),
        _ => None,
    }
}

/// A set of faults applied to one netlist.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct FaultMap {
    faults: Vec<Fault>,
}

impl FaultMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Every block of the netlist dead.
    pub fn kill_all(netlist: &Netlist) -> Self {
        netlist
            .blocks()
            .into_iter()
            .map(|b| Fault::DeadBlock(b.to_string()))
            .collect()
    }

    pub fn insert(&mut self, fault: Fault) {
        if !self.faults.contains(&fault) {
            self.faults.push(fault);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &Fault> {
        self.faults.iter()
    }

    pub fn len(&self) -> usize {
        self.faults.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faults.is_empty()
    }

    pub fn validate(&self, netlist: &Netlist) -> Result<(), SimError> {
        for fault in &self.faults {
            let (kind, name, ok) = match fault {
                Fault::StuckAt { net, .. } => ("net", net, netlist.net_index(net).is_some()),
                Fault::DeadGate(g) => ("gate", g, netlist.gate(g).is_some()),
                Fault::DeadBlock(b) => ("block", b, netlist.has_block(b)),
            };
            if !ok {
                return Err(SimError::UnknownFaultTarget {
                    kind,
                    name: name.clone(),
                });
            }
        }
        Ok(())
    }

    fn compile(&self, netlist: &Netlist) -> Result<CompiledFaults, SimError> {
        self.validate(netlist)?;
        let mut dead = vec![false; netlist.gates().len()];
        let mut stuck = HashMap::new();
        for fault in &self.faults {
            match fault {
                Fault::StuckAt { net, value } => {
                    stuck.insert(netlist.net_index(net).expect("validated"), *value);
                }
                Fault::DeadGate(name) => {
                    let i = netlist
                        .gates()
                        .iter()
                        .position(|g| &g.name == name)
                        .expect("validated");
                    dead[i] = true;
                }
                Fault::DeadBlock(block) => {
                    for (i, g) in netlist.gates().iter().enumerate() {
                        if &g.block == block {
                            dead[i] = true;
                        }
                    }
                }
            }
        }
        Ok(CompiledFaults { dead, stuck })
    }
}

impl FromIterator<Fault> for FaultMap {
    fn from_iter<I: IntoIterator<Item = Fault>>(iter: I) -> Self {
        let mut map = FaultMap::new();
        for f in iter {
            map.insert(f);
        }
        map
    }
}

struct CompiledFaults {
    dead: Vec<bool>,
    stuck: HashMap<usize, bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GateLevel {
    pub gate: String,
    /// `None` for standalone inverters, which have no victim net.
    #[serde(serialize_with = "ser_level")]
    pub level: Option<Level>,
}

fn ser_level<S: Serializer>(level: &Option<Level>, s: S) -> Result<S::Ok, S::Error> {
    match level {
        Some(l) => s.serialize_str(&l.to_string()),
        None => s.serialize_none(),
    }
}

/// Everything observed in one discharge/evaluate cycle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CycleRecord {
    pub inputs: Assignment,
    pub ctrls: Assignment,
    /// Victim levels in topological evaluation order.
    pub victims: Vec<GateLevel>,
    pub nets: Assignment,
    /// Output port values in declaration order.
    pub outputs: Vec<(String, bool)>,
}

impl CycleRecord {
    pub fn output_bits(&self) -> Vec<bool> {
        self.outputs.iter().map(|(_, v)| *v).collect()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SimTrace {
    pub cycles: Vec<CycleRecord>,
}

fn collect_assignment(declared: &[String], given: &Assignment) -> Result<Vec<bool>, SimError> {
    declared
        .iter()
        .map(|n| {
            given
                .get(n)
                .copied()
                .ok_or_else(|| SimError::MissingAssignment(n.clone()))
        })
        .collect()
}

pub fn run_cycle(
    netlist: &Netlist,
    inputs: &Assignment,
    ctrls: &Assignment,
    mode: SimMode,
    faults: &FaultMap,
) -> Result<CycleRecord, SimError> {
    for name in inputs.keys() {
        if !netlist.inputs().contains(name) {
            return Err(SimError::UnknownSignal(name.clone()));
        }
    }
    for name in ctrls.keys() {
        if !netlist.ctrls().contains(name) {
            return Err(SimError::UnknownSignal(name.clone()));
        }
    }
    let input_values = collect_assignment(netlist.inputs(), inputs)?;
    let ctrl_values = collect_assignment(netlist.ctrls(), ctrls)?;
    let faults = faults.compile(netlist)?;
    let (values, victims) = evaluate(netlist, &input_values, &ctrl_values, mode, &faults)?;

    Ok(CycleRecord {
        inputs: inputs.clone(),
        ctrls: ctrls.clone(),
        victims,
        nets: netlist
            .nets()
            .iter()
            .cloned()
            .zip(values.iter().copied())
            .collect(),
        outputs: netlist
            .outputs()
            .iter()
            .map(|o| {
                (
                    o.port.clone(),
                    values[netlist.net_index(&o.net).expect("validated")],
                )
            })
            .collect(),
    })
}

/// Discharge, then evaluate every gate once in topological order.
fn evaluate(
    netlist: &Netlist,
    inputs: &[bool],
    ctrls: &[bool],
    mode: SimMode,
    faults: &CompiledFaults,
) -> Result<(Vec<bool>, Vec<GateLevel>), SimError> {
    let nets = netlist.nets();
    let mut values = vec![false; nets.len()];
    for (i, net) in nets.iter().enumerate() {
        match netlist.driver(net).expect("every net has a driver") {
            Driver::Input(k) => values[i] = inputs[k],
            Driver::Ctrl(k) => values[i] = ctrls[k],
            Driver::Gate(_) => {}
        }
        if let Some(&v) = faults.stuck.get(&i) {
            values[i] = v;
        }
    }

    let gates = netlist.gates();
    let mut victims = Vec::with_capacity(gates.len());
    let mut data = Vec::new();
    for &gi in netlist.topo_indices() {
        let gate = &gates[gi];
        let mut victim = VictimState::default();
        victim.discharge();
        let out_idx = netlist.net_index(&gate.output).expect("validated");

        let out = if faults.dead[gi] {
            false
        } else {
            data.clear();
            data.extend(
                gate.inputs
                    .iter()
                    .map(|n| values[netlist.net_index(n).expect("validated")]),
            );
            let ctrl = gate
                .ctrl
                .as_ref()
                .is_some_and(|n| values[netlist.net_index(n).expect("validated")]);
            let analog = match mode {
                SimMode::Analog(AnalogSetting::Fixed(p)) => p,
                _ => gate.spec.default_analog(),
            };
            let level = victim.evaluate(gate.spec.weights(), &data, ctrl, &analog)?;
            match mode {
                SimMode::Discrete => gate.spec.evaluate(&data, ctrl)?,
                SimMode::Analog(_) => gate.spec.stages().apply(level >= analog.v_threshold()),
            }
        };
        values[out_idx] = faults.stuck.get(&out_idx).copied().unwrap_or(out);
        victims.push(GateLevel {
            gate: gate.name.clone(),
            level: (!gate.spec.is_inverter()).then_some(victim.level()),
        });
    }
    Ok((values, victims))
}

/// Runs each vector as an independent cycle. Each vector assigns every
/// declared input and control net.
pub fn run_sequence(
    netlist: &Netlist,
    vectors: &[Assignment],
    mode: SimMode,
    faults: &FaultMap,
) -> Result<SimTrace, SimError> {
    let cycles = vectors
        .iter()
        .map(|v| {
            let (ctrls, inputs): (Assignment, Assignment) = v
                .iter()
                .map(|(k, &b)| (k.clone(), b))
                .partition(|(k, _)| netlist.ctrls().contains(k));
            run_cycle(netlist, &inputs, &ctrls, mode, faults)
        })
        .collect::<Result<_, _>>()?;
    Ok(SimTrace { cycles })
}

/// Parses vector-file text: one cycle per line of `name=bit` pairs.
pub fn parse_vectors(text: &str) -> Result<Vec<Assignment>, SimError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut v = Assignment::new();
        for pair in content.split_whitespace() {
            let bad = |message: String| SimError::BadVector { line, message };
            let (name, bit) = pair
                .split_once('=')
                .ok_or_else(|| bad(format!("expected name=bit, got {pair:?}")))?;
            let bit = parse_bit(bit).ok_or_else(|| bad(format!("bad bit in {pair:?}")))?;
            if v.insert(name.to_string(), bit).is_some() {
                return Err(bad(format!("{name:?} assigned twice")));
            }
        }
        out.push(v);
    }
    Ok(out)
}

pub fn bits_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

fn ser_bits<S: Serializer>(bits: &[bool], s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&bits_string(bits))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub inputs: Assignment,
    /// Output bits in port declaration order.
    #[serde(serialize_with = "ser_bits")]
    pub expected: Vec<bool>,
    #[serde(serialize_with = "ser_bits")]
    pub actual: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub total: usize,
    pub passed: usize,
    pub failures: Vec<Mismatch>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Enumerates every input assignment (input `i` is bit `i` of the counter)
/// under fixed controls and compares outputs with `oracle`, which receives
/// input values in declaration order and returns output values in port order.
pub fn exhaustive_verify(
    netlist: &Netlist,
    ctrls: &Assignment,
    oracle: &dyn Fn(&[bool]) -> Vec<bool>,
    mode: SimMode,
    faults: &FaultMap,
) -> Result<VerifyReport, SimError> {
    let n = netlist.inputs().len();
    if n > MAX_EXHAUSTIVE_INPUTS {
        return Err(SimError::TooManyInputs(n));
    }
    for name in ctrls.keys() {
        if !netlist.ctrls().contains(name) {
            return Err(SimError::UnknownSignal(name.clone()));
        }
    }
    let ctrl_values = collect_assignment(netlist.ctrls(), ctrls)?;
    let compiled = faults.compile(netlist)?;
    let mut failures = Vec::new();
    let total = 1usize << n;
    for k in 0..total {
        let x: Vec<bool> = (0..n).map(|i| k >> i & 1 == 1).collect();
        let (values, _) = evaluate(netlist, &x, &ctrl_values, mode, &compiled)?;
        let actual: Vec<bool> = netlist
            .outputs()
            .iter()
            .map(|o| values[netlist.net_index(&o.net).expect("validated")])
            .collect();
        let expected = oracle(&x);
        if actual != expected {
            failures.push(Mismatch {
                inputs: netlist.inputs().iter().cloned().zip(x).collect(),
                expected,
                actual,
            });
        }
    }
    Ok(VerifyReport {
        total,
        passed: total - failures.len(),
        failures,
    })
}
