//! Gate-level circuits over named nets.
//!
//! Text format, one statement per line, `#` starts a comment:
//!
//! ```text
//! input <net>
//! ctrl <net>
//! output <port>=<net>
//! gate <name> kind=<KIND> in=<net>(,<net>)* [ctrl=<net>] out=<net>
//!      [weights=<int>(,<int>)* theta=<int> ctrl_weight=<int> stages=<1|2>]
//! block <name> {
//!   <gate lines>
//! }
//! ```
//!
//! The bracketed parameter group is mandatory for `GENERIC_CT` and forbidden
//! for every named kind (`ctrl_weight` defaults to 0). Gates outside any block
//! belong to the implicit block `_top`. The discharge clock is not a net; the
//! simulator applies it globally.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashMap};
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::charge_model::CouplingWeights;
use crate::gate_library::{build_gate, GateError, GateKind, GateSpec};

pub const TOP_BLOCK: &str = "_top";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetlistError {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("invalid identifier {0:?}")]
    InvalidName(String),
    #[error("net {net:?} is used but never driven")]
    UndefinedNet { net: String },
    #[error("net {net:?} has more than one driver")]
    MultipleDrivers { net: String },
    #[error("combinational cycle through gates {}", .gates.join(", "))]
    Cycle { gates: Vec<String> },
    #[error("gate {gate:?} expects {expected} data inputs, got {got}")]
    ArityMismatch {
        gate: String,
        expected: usize,
        got: usize,
    },
    #[error(
        "gate {gate:?}: control net must be present exactly when the gate has a control aggressor"
    )]
    CtrlMismatch { gate: String },
    #[error("gate {gate:?} is missing parameter {param}")]
    MissingParameter { gate: String, param: &'static str },
    #[error("gate {gate:?}: parameter {param} is only allowed on GENERIC_CT")]
    UnexpectedParameter { gate: String, param: String },
    #[error("duplicate gate name {0:?}")]
    DuplicateGate(String),
    #[error("duplicate output port {0:?}")]
    DuplicatePort(String),
    #[error("gate {gate:?}: {source}")]
    Gate { gate: String, source: GateError },
}

/// A netlist error, with the source line when it came from text.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct Diagnostic {
    pub line: Option<usize>,
    pub error: NetlistError,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}", self.error),
            None => write!(f, "{}", self.error),
        }
    }
}

impl From<NetlistError> for Diagnostic {
    fn from(error: NetlistError) -> Self {
        Self { line: None, error }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GateInstance {
    pub name: String,
    pub spec: GateSpec,
    pub inputs: Vec<String>,
    pub ctrl: Option<String>,
    pub output: String,
    pub block: String,
}

impl GateInstance {
    pub fn new(
        name: impl Into<String>,
        spec: GateSpec,
        inputs: &[&str],
        ctrl: Option<&str>,
        output: impl Into<String>,
    ) -> Self {
        Self {
            name: name.into(),
            spec,
            inputs: inputs.iter().map(|s| s.to_string()).collect(),
            ctrl: ctrl.map(str::to_string),
            output: output.into(),
            block: TOP_BLOCK.to_string(),
        }
    }

    pub fn in_block(mut self, block: impl Into<String>) -> Self {
        self.block = block.into();
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputPort {
    pub port: String,
    pub net: String,
}

/// What drives a net.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Driver {
    Input(usize),
    Ctrl(usize),
    Gate(usize),
}

/// A validated, acyclic, single-driver circuit. Immutable once built.
#[derive(Debug, Clone)]
pub struct Netlist {
    inputs: Vec<String>,
    ctrls: Vec<String>,
    outputs: Vec<OutputPort>,
    gates: Vec<GateInstance>,
    nets: Vec<String>,
    net_index: HashMap<String, usize>,
    drivers: Vec<Driver>,
    order: Vec<usize>,
}

impl PartialEq for Netlist {
    fn eq(&self, other: &Self) -> bool {
        self.inputs == other.inputs
            && self.ctrls == other.ctrls
            && self.outputs == other.outputs
            && self.gates == other.gates
    }
}

impl Eq for Netlist {}

#[derive(Debug, Default, Clone)]
pub struct NetlistBuilder {
    inputs: Vec<(String, Option<usize>)>,
    ctrls: Vec<(String, Option<usize>)>,
    outputs: Vec<(OutputPort, Option<usize>)>,
    gates: Vec<(GateInstance, Option<usize>)>,
    line: Option<usize>,
}

impl NetlistBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Tags subsequently added items with a source line.
    fn at_line(&mut self, line: usize) -> &mut Self {
        self.line = Some(line);
        self
    }

    pub fn input(&mut self, net: impl Into<String>) -> &mut Self {
        self.inputs.push((net.into(), self.line));
        self
    }

    pub fn ctrl(&mut self, net: impl Into<String>) -> &mut Self {
        self.ctrls.push((net.into(), self.line));
        self
    }

    pub fn output(&mut self, port: impl Into<String>, net: impl Into<String>) -> &mut Self {
        let port = OutputPort {
            port: port.into(),
            net: net.into(),
        };
        self.outputs.push((port, self.line));
        self
    }

    pub fn gate(&mut self, gate: GateInstance) -> &mut Self {
        self.gates.push((gate, self.line));
        self
    }

    pub fn build(self) -> Result<Netlist, Diagnostic> {
        let at = |line: Option<usize>| move |error: NetlistError| Diagnostic { line, error };

        for (name, line) in self.inputs.iter().chain(&self.ctrls) {
            check_ident(name).map_err(at(*line))?;
        }
        let mut ports = BTreeSet::new();
        for (out, line) in &self.outputs {
            check_ident(&out.port).map_err(at(*line))?;
            check_ident(&out.net).map_err(at(*line))?;
            if !ports.insert(out.port.as_str()) {
                return Err(at(*line)(NetlistError::DuplicatePort(out.port.clone())));
            }
        }
        let mut names = BTreeSet::new();
        for (g, line) in &self.gates {
            let err = at(*line);
            check_ident(&g.name).map_err(err)?;
            if g.block != TOP_BLOCK {
                check_ident(&g.block).map_err(err)?;
            }
            for net in g
                .inputs
                .iter()
                .chain(&g.ctrl)
                .chain(std::iter::once(&g.output))
            {
                check_ident(net).map_err(err)?;
            }
            if !names.insert(g.name.as_str()) {
                return Err(err(NetlistError::DuplicateGate(g.name.clone())));
            }
            if g.inputs.len() != g.spec.arity() {
                return Err(err(NetlistError::ArityMismatch {
                    gate: g.name.clone(),
                    expected: g.spec.arity(),
                    got: g.inputs.len(),
                }));
            }
            if g.ctrl.is_some() != g.spec.has_ctrl() {
                return Err(err(NetlistError::CtrlMismatch {
                    gate: g.name.clone(),
                }));
            }
        }

        let mut nets = Vec::new();
        let mut net_index = HashMap::new();
        let mut drivers = Vec::new();
        let driven = self
            .inputs
            .iter()
            .enumerate()
            .map(|(i, (n, l))| (n, *l, Driver::Input(i)))
            .chain(
                self.ctrls
                    .iter()
                    .enumerate()
                    .map(|(i, (n, l))| (n, *l, Driver::Ctrl(i))),
            )
            .chain(
                self.gates
                    .iter()
                    .enumerate()
                    .map(|(i, (g, l))| (&g.output, *l, Driver::Gate(i))),
            );
        for (net, line, driver) in driven {
            if net_index.contains_key(net) {
                return Err(at(line)(NetlistError::MultipleDrivers { net: net.clone() }));
            }
            net_index.insert(net.clone(), nets.len());
            nets.push(net.clone());
            drivers.push(driver);
        }

        for (g, line) in &self.gates {
            if let Some(net) = g
                .inputs
                .iter()
                .chain(&g.ctrl)
                .find(|n| !net_index.contains_key(*n))
            {
                return Err(at(*line)(NetlistError::UndefinedNet { net: net.clone() }));
            }
        }
        for (out, line) in &self.outputs {
            if !net_index.contains_key(&out.net) {
                return Err(at(*line)(NetlistError::UndefinedNet {
                    net: out.net.clone(),
                }));
            }
        }

        let gates: Vec<GateInstance> = self.gates.into_iter().map(|(g, _)| g).collect();
        let order = topo_sort(&gates, &net_index, &drivers)?;

        Ok(Netlist {
            inputs: self.inputs.into_iter().map(|(n, _)| n).collect(),
            ctrls: self.ctrls.into_iter().map(|(n, _)| n).collect(),
            outputs: self.outputs.into_iter().map(|(o, _)| o).collect(),
            gates,
            nets,
            net_index,
            drivers,
            order,
        })
    }
}

/// Kahn's algorithm, always releasing the lowest-indexed ready gate so the
/// order is deterministic.
fn topo_sort(
    gates: &[GateInstance],
    net_index: &HashMap<String, usize>,
    drivers: &[Driver],
) -> Result<Vec<usize>, Diagnostic> {
    let mut pending = vec![0usize; gates.len()];
    let mut fanout: Vec<Vec<usize>> = vec![Vec::new(); gates.len()];
    for (i, g) in gates.iter().enumerate() {
        for net in g.inputs.iter().chain(&g.ctrl) {
            if let Driver::Gate(src) = drivers[net_index[net]] {
                pending[i] += 1;
                fanout[src].push(i);
            }
        }
    }
    let mut ready: BinaryHeap<Reverse<usize>> = (0..gates.len())
        .filter(|&i| pending[i] == 0)
        .map(Reverse)
        .collect();
    let mut order = Vec::with_capacity(gates.len());
    while let Some(Reverse(i)) = ready.pop() {
        order.push(i);
        for &j in &fanout[i] {
            pending[j] -= 1;
            if pending[j] == 0 {
                ready.push(Reverse(j));
            }
        }
    }
    if order.len() != gates.len() {
        let stuck = (0..gates.len())
            .filter(|&i| pending[i] > 0)
            .map(|i| gates[i].name.clone())
            .collect();
        return Err(NetlistError::Cycle { gates: stuck }.into());
    }
    Ok(order)
}

fn check_ident(name: &str) -> Result<(), NetlistError> {
    let mut chars = name.chars();
    let ok = matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
    if ok {
        Ok(())
    } else {
        Err(NetlistError::InvalidName(name.to_string()))
    }
}

impl Netlist {
    pub fn builder() -> NetlistBuilder {
        NetlistBuilder::new()
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn ctrls(&self) -> &[String] {
        &self.ctrls
    }

    pub fn outputs(&self) -> &[OutputPort] {
        &self.outputs
    }

    pub fn gates(&self) -> &[GateInstance] {
        &self.gates
    }

    pub fn gate(&self, name: &str) -> Option<&GateInstance> {
        self.gates.iter().find(|g| g.name == name)
    }

    /// All nets: inputs, then ctrls, then gate outputs in gate order.
    pub fn nets(&self) -> &[String] {
        &self.nets
    }

    pub fn net_index(&self, net: &str) -> Option<usize> {
        self.net_index.get(net).copied()
    }

    pub fn driver(&self, net: &str) -> Option<Driver> {
        self.net_index(net).map(|i| self.drivers[i])
    }

    pub fn has_block(&self, block: &str) -> bool {
        self.gates.iter().any(|g| g.block == block)
    }

    /// Distinct block names in order of first appearance.
    pub fn blocks(&self) -> Vec<&str> {
        let mut seen = Vec::new();
        for g in &self.gates {
            if !seen.contains(&g.block.as_str()) {
                seen.push(g.block.as_str());
            }
        }
        seen
    }

    /// Gate indices such that every gate follows the drivers of its inputs.
    pub fn topo_indices(&self) -> &[usize] {
        &self.order
    }

    pub fn topo_order(&self) -> Vec<&GateInstance> {
        self.order.iter().map(|&i| &self.gates[i]).collect()
    }

    pub fn total_transistors(&self) -> u32 {
        self.gates.iter().map(|g| g.spec.transistor_count()).sum()
    }

    pub fn transistors_by_block(&self) -> BTreeMap<String, u32> {
        let mut out = BTreeMap::new();
        for g in &self.gates {
            *out.entry(g.block.clone()).or_insert(0) += g.spec.transistor_count();
        }
        out
    }

    /// Every net in the transitive fan-in of `roots`, the roots included.
    pub fn fanin_cone<'a>(&self, roots: impl IntoIterator<Item = &'a str>) -> BTreeSet<String> {
        let mut cone = BTreeSet::new();
        let mut stack: Vec<String> = roots.into_iter().map(str::to_string).collect();
        while let Some(net) = stack.pop() {
            if !cone.insert(net.clone()) {
                continue;
            }
            if let Some(Driver::Gate(g)) = self.driver(&net) {
                let g = &self.gates[g];
                stack.extend(g.inputs.iter().chain(&g.ctrl).cloned());
            }
        }
        cone
    }

    /// Nets observable at some output port.
    pub fn output_cone(&self) -> BTreeSet<String> {
        self.fanin_cone(self.outputs.iter().map(|o| o.net.as_str()))
    }

    pub fn parse(text: &str) -> Result<Self, Diagnostic> {
        parse(text)
    }

    pub fn serialize(&self) -> String {
        serialize(self)
    }
}

pub fn topo_order(netlist: &Netlist) -> Vec<&GateInstance> {
    netlist.topo_order()
}

pub fn total_transistors(netlist: &Netlist) -> u32 {
    netlist.total_transistors()
}

pub fn parse(text: &str) -> Result<Netlist, Diagnostic> {
    let mut b = NetlistBuilder::new();
    let mut block: Option<String> = None;
    let mut block_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let syntax = |msg: String| Diagnostic {
            line: Some(line),
            error: NetlistError::Syntax(msg),
        };
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        b.at_line(line);
        let mut words = content.split_whitespace();
        let keyword = words.next().expect("nonempty line");
        let rest: Vec<&str> = words.collect();
        match keyword {
            "input" | "ctrl" => {
                if block.is_some() {
                    return Err(syntax(format!("{keyword} declaration inside a block")));
                }
                let [net] = rest[..] else {
                    return Err(syntax(format!("expected `{keyword} <net>`")));
                };
                if keyword == "input" {
                    b.input(net);
                } else {
                    b.ctrl(net);
                }
            }
            "output" => {
                if block.is_some() {
                    return Err(syntax("output declaration inside a block".into()));
                }
                let [decl] = rest[..] else {
                    return Err(syntax("expected `output <port>=<net>`".into()));
                };
                let Some((port, net)) = decl.split_once('=') else {
                    return Err(syntax("expected `output <port>=<net>`".into()));
                };
                b.output(port, net);
            }
            "block" => {
                if block.is_some() {
                    return Err(syntax("nested blocks are not supported".into()));
                }
                let [name, "{"] = rest[..] else {
                    return Err(syntax("expected `block <name> {`".into()));
                };
                if name == TOP_BLOCK {
                    return Err(syntax(format!("block name {TOP_BLOCK} is reserved")));
                }
                block = Some(name.to_string());
                block_line = line;
            }
            "}" => {
                if !rest.is_empty() || block.take().is_none() {
                    return Err(syntax("unexpected `}`".into()));
                }
            }
            "gate" => {
                let gate =
                    parse_gate(&rest, block.as_deref().unwrap_or(TOP_BLOCK)).map_err(|error| {
                        Diagnostic {
                            line: Some(line),
                            error,
                        }
                    })?;
                b.gate(gate);
            }
            other => return Err(syntax(format!("unknown statement {other:?}"))),
        }
    }
    if block.is_some() {
        return Err(Diagnostic {
            line: Some(block_line),
            error: NetlistError::Syntax("block is never closed".into()),
        });
    }
    b.build()
}

const GENERIC_PARAMS: [&str; 4] = ["weights", "theta", "ctrl_weight", "stages"];

fn parse_gate(words: &[&str], block: &str) -> Result<GateInstance, NetlistError> {
    let syntax = |m: &str| NetlistError::Syntax(m.to_string());
    let (name, attrs) = words
        .split_first()
        .ok_or_else(|| syntax("gate needs a name"))?;
    let mut kv: BTreeMap<&str, &str> = BTreeMap::new();
    for attr in attrs {
        let (k, v) = attr
            .split_once('=')
            .ok_or_else(|| NetlistError::Syntax(format!("expected key=value, got {attr:?}")))?;
        if !matches!(k, "kind" | "in" | "ctrl" | "out") && !GENERIC_PARAMS.contains(&k) {
            return Err(NetlistError::Syntax(format!(
                "unknown gate attribute {k:?}"
            )));
        }
        if kv.insert(k, v).is_some() {
            return Err(NetlistError::Syntax(format!("attribute {k:?} given twice")));
        }
    }
    let missing = |param| NetlistError::MissingParameter {
        gate: name.to_string(),
        param,
    };
    let kind: GateKind = kv
        .get("kind")
        .ok_or_else(|| missing("kind"))?
        .parse()
        .map_err(|source| NetlistError::Gate {
            gate: name.to_string(),
            source,
        })?;
    let inputs: Vec<&str> = kv
        .get("in")
        .ok_or_else(|| missing("in"))?
        .split(',')
        .collect();
    let output = *kv.get("out").ok_or_else(|| missing("out"))?;
    let ctrl = kv.get("ctrl").copied();

    let gate_err = |source| NetlistError::Gate {
        gate: name.to_string(),
        source,
    };
    let spec = if kind == GateKind::GenericCt {
        let int = |key: &'static str| -> Result<u32, NetlistError> {
            kv.get(key)
                .ok_or_else(|| missing(key))?
                .parse()
                .map_err(|_| NetlistError::Syntax(format!("{key} must be a nonnegative integer")))
        };
        let weights = kv
            .get("weights")
            .ok_or_else(|| missing("weights"))?
            .split(',')
            .map(|w| {
                w.parse::<u32>()
                    .map_err(|_| NetlistError::Syntax(format!("bad weight {w:?}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let theta = int("theta")?;
        let stages = u8::try_from(int("stages")?)
            .map_err(|_| NetlistError::Syntax("stages must be 1 or 2".into()))?;
        let ctrl_weight = if kv.contains_key("ctrl_weight") {
            int("ctrl_weight")?
        } else {
            0
        };
        let weights = CouplingWeights::new(weights, ctrl_weight).map_err(|e| gate_err(e.into()))?;
        GateSpec::generic(weights, theta, stages).map_err(gate_err)?
    } else {
        if let Some(param) = GENERIC_PARAMS.iter().find(|p| kv.contains_key(*p)) {
            return Err(NetlistError::UnexpectedParameter {
                gate: name.to_string(),
                param: param.to_string(),
            });
        }
        build_gate(kind).map_err(gate_err)?
    };
    Ok(GateInstance::new(*name, spec, &inputs, ctrl, output).in_block(block))
}

pub fn serialize(netlist: &Netlist) -> String {
    let mut out = String::new();
    for net in &netlist.inputs {
        writeln!(out, "input {net}").unwrap();
    }
    for net in &netlist.ctrls {
        writeln!(out, "ctrl {net}").unwrap();
    }
    let mut open: Option<&str> = None;
    for g in &netlist.gates {
        if open != Some(g.block.as_str()) {
            if open.is_some_and(|b| b != TOP_BLOCK) {
                out.push_str("}\n");
            }
            if g.block != TOP_BLOCK {
                writeln!(out, "block {} {{", g.block).unwrap();
            }
            open = Some(&g.block);
        }
        let indent = if g.block == TOP_BLOCK { "" } else { "  " };
        writeln!(out, "{indent}{}", gate_line(g)).unwrap();
    }
    if open.is_some_and(|b| b != TOP_BLOCK) {
        out.push_str("}\n");
    }
    for o in &netlist.outputs {
        writeln!(out, "output {}={}", o.port, o.net).unwrap();
    }
    out
}

fn gate_line(g: &GateInstance) -> String {
    let mut line = format!(
        "gate {} kind={} in={}",
        g.name,
        g.spec.kind(),
        g.inputs.join(",")
    );
    if let Some(c) = &g.ctrl {
        write!(line, " ctrl={c}").unwrap();
    }
    write!(line, " out={}", g.output).unwrap();
    if g.spec.kind() == GateKind::GenericCt {
        let w = g.spec.weights();
        let data: Vec<String> = w.data().iter().map(u32::to_string).collect();
        write!(
            line,
            " weights={} theta={} ctrl_weight={} stages={}",
            data.join(","),
            g.spec.theta(),
            w.ctrl(),
            g.spec.stages().count()
        )
        .unwrap();
    }
    line
}
