//! The polymorphic 2-bit Multiplier/Sorter/Adder block.
//!
//! Two external controls select the operation: `(C1, C2)` = `01` multiply,
//! `11` sort, `10` add. `00` is undefined. The control subcircuit derives
//! three internal one-hot mode flags:
//!
//! - `C3 = ¬C1` (multiplier)
//! - `C4 = ¬C2` (adder)
//! - `C5 = C1·C2` (sorter)
//!
//! The aligned input pairs go through AND/OR polymorphic cells driven by `C1`:
//! in multiplier mode they produce the partial products `A0·B0` and `A1·B1`,
//! in sorter and adder modes the pair sums `A0+B0` and `A1+B1`. Each output
//! bit is an OR of mode-gated terms, where the gating is a control aggressor
//! heavy enough that the term can only fire with its mode flag high.
//!
//! The sorter sorts the four operand bits in descending order, so its output
//! is the thermometer code of their popcount.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::charge_model::CouplingWeights;
use crate::gate_library::{build_gate, GateKind, GateSpec};
use crate::netlist::{GateInstance, Netlist};
use crate::simulator::{Assignment, CycleRecord};

pub const INPUTS: [&str; 4] = ["A1", "A0", "B1", "B0"];
pub const CTRLS: [&str; 2] = ["C1", "C2"];
pub const OUTPUTS: [&str; 4] = ["Y3", "Y2", "Y1", "Y0"];

/// Gate census reported for the block in the literature.
pub const REPORTED_GATES: u32 = 31;
pub const REPORTED_CROSSTALK_GATES: u32 = 25;
pub const REPORTED_POLYMORPHIC_GATES: u32 = 16;
pub const REPORTED_INVERTERS: u32 = 6;
pub const REPORTED_TRANSISTORS: u32 = 155;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MsaMode {
    Multiplier,
    Sorter,
    Adder,
}

impl MsaMode {
    pub const ALL: [MsaMode; 3] = [MsaMode::Multiplier, MsaMode::Sorter, MsaMode::Adder];

    /// `(C1, C2)`.
    pub fn controls(self) -> (bool, bool) {
        match self {
            MsaMode::Multiplier => (false, true),
            MsaMode::Sorter => (true, true),
            MsaMode::Adder => (true, false),
        }
    }

    pub fn oracle(self, a: u8, b: u8) -> u8 {
        match self {
            MsaMode::Multiplier => oracle_multiply(a, b),
            MsaMode::Sorter => oracle_sort(a, b),
            MsaMode::Adder => oracle_add(a, b),
        }
    }

    pub fn letter(self) -> char {
        match self {
            MsaMode::Multiplier => 'M',
            MsaMode::Sorter => 'S',
            MsaMode::Adder => 'A',
        }
    }
}

impl fmt::Display for MsaMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

impl FromStr for MsaMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "m" | "mul" | "mult" | "multiply" | "multiplier" => Ok(MsaMode::Multiplier),
            "s" | "sort" | "sorter" => Ok(MsaMode::Sorter),
            "a" | "add" | "adder" => Ok(MsaMode::Adder),
            _ => Err(format!("unknown operation {s:?}; expected M, S or A")),
        }
    }
}

pub fn mode_controls(mode: MsaMode) -> (bool, bool) {
    mode.controls()
}

pub fn oracle_multiply(a: u8, b: u8) -> u8 {
    (a & 3) * (b & 3)
}

/// Descending sort of the bits `{a1, a0, b1, b0}`.
pub fn oracle_sort(a: u8, b: u8) -> u8 {
    let ones = (a & 3).count_ones() + (b & 3).count_ones();
    (0b1111_0000u8 >> ones) & 0b1111
}

pub fn oracle_add(a: u8, b: u8) -> u8 {
    (a & 3) + (b & 3)
}

pub fn operand_assignment(a: u8, b: u8) -> Assignment {
    [
        ("A1", a >> 1 & 1),
        ("A0", a & 1),
        ("B1", b >> 1 & 1),
        ("B0", b & 1),
    ]
    .into_iter()
    .map(|(n, v)| (n.to_string(), v == 1))
    .collect()
}

pub fn mode_assignment(mode: MsaMode) -> Assignment {
    let (c1, c2) = mode.controls();
    [("C1".to_string(), c1), ("C2".to_string(), c2)]
        .into_iter()
        .collect()
}

/// `(a, b)` from input values in `A1, A0, B1, B0` order.
pub fn operands_from_bits(x: &[bool]) -> (u8, u8) {
    let b = |i: usize| u8::from(x[i]);
    (b(0) << 1 | b(1), b(2) << 1 | b(3))
}

/// `Y3..Y0` as a 4-bit value.
pub fn value_from_bits(bits: &[bool]) -> u8 {
    bits.iter().fold(0, |acc, &b| acc << 1 | u8::from(b))
}

pub fn bits_from_value(y: u8) -> Vec<bool> {
    (0..4).rev().map(|i| y >> i & 1 == 1).collect()
}

pub fn record_value(record: &CycleRecord) -> u8 {
    value_from_bits(&record.output_bits())
}

/// Oracle in the simulator's calling convention for one mode.
pub fn mode_oracle(mode: MsaMode) -> impl Fn(&[bool]) -> Vec<bool> {
    move |x| {
        let (a, b) = operands_from_bits(x);
        bits_from_value(mode.oracle(a, b))
    }
}

fn lib(kind: GateKind) -> GateSpec {
    build_gate(kind).expect("named kind")
}

fn generic(data: &[u32], ctrl: u32, theta: u32) -> GateSpec {
    GateSpec::generic(
        CouplingWeights::new(data.to_vec(), ctrl).expect("valid weights"),
        theta,
        2,
    )
    .expect("valid generic gate")
}

fn gate(block: &str, name: &str, spec: GateSpec, ins: &[&str], ctrl: Option<&str>) -> GateInstance {
    GateInstance::new(name, spec, ins, ctrl, name).in_block(block)
}

pub fn build_msa() -> Netlist {
    use GateKind::*;
    let mut b = Netlist::builder();
    for n in INPUTS {
        b.input(n);
    }
    for n in CTRLS {
        b.ctrl(n);
    }

    let or3 = || generic(&[1, 1, 1], 0, 1);
    let gates = [
        // mode flags
        gate("control", "C3", lib(Inv), &["C1"], None),
        gate("control", "C4", lib(Inv), &["C2"], None),
        gate("control", "C5", lib(CtAnd), &["C1", "C2"], None),
        // pair products (multiplier) / pair sums (sorter, adder)
        gate("pairs", "h00", lib(PolyAndOr), &["A0", "B0"], Some("C1")),
        gate("pairs", "h11", lib(PolyAndOr), &["A1", "B1"], Some("C1")),
        gate("pairs", "p00", lib(CtAnd), &["A0", "B0"], None),
        gate("pairs", "p11", lib(CtAnd), &["A1", "B1"], None),
        gate("pairs", "p10", lib(CtAnd), &["A1", "B0"], None),
        gate("pairs", "p01", lib(CtAnd), &["A0", "B1"], None),
        gate("pairs", "n00", lib(Inv), &["p00"], None),
        gate("pairs", "q", lib(CtOr), &["p00", "p11"], None),
        // Y3: AND4 when multiplying, OR4 when sorting, low when adding
        gate(
            "bit3",
            "Y3",
            generic(&[1, 1, 2], 1, 4),
            &["h00", "h11", "C2"],
            Some("C1"),
        ),
        gate("bit3", "nY3", lib(Inv), &["Y3"], None),
        // Y0: p00 (M), popcount ≥ 4 (S), A0 ⊕ B0 (A)
        gate(
            "bit0",
            "u0",
            generic(&[2, 1, 1], 1, 4),
            &["p00", "p11", "C3"],
            Some("C2"),
        ),
        gate(
            "bit0",
            "x0",
            generic(&[1, 1], 1, 3),
            &["h00", "n00"],
            Some("C4"),
        ),
        gate("bit0", "Y0", lib(CtOr), &["u0", "x0"], None),
        // Y1: p10 ⊕ p01 (M), popcount ≥ 3 (S), A1 ⊕ B1 ⊕ carry (A)
        gate(
            "bit1",
            "m1",
            generic(&[1, 1, 2], 3, 6),
            &["p10", "p01", "nY3"],
            Some("C3"),
        ),
        gate(
            "bit1",
            "s1",
            generic(&[1, 1, 1], 3, 6),
            &["h00", "h11", "q"],
            Some("C5"),
        ),
        gate(
            "bit1",
            "maj",
            generic(&[1, 1, 1], 0, 2),
            &["A1", "B1", "p00"],
            None,
        ),
        gate("bit1", "nmaj", lib(Inv), &["maj"], None),
        gate("bit1", "r1", lib(CtOr), &["h11", "p00"], None),
        gate("bit1", "w1", lib(CtAnd), &["p11", "p00"], None),
        gate(
            "bit1",
            "a1",
            generic(&[1, 1, 2], 3, 5),
            &["r1", "nmaj", "w1"],
            Some("C4"),
        ),
        gate("bit1", "Y1", or3(), &["m1", "s1", "a1"], None),
        // Y2: p11·¬p00 (M), popcount ≥ 2 (S), carry out (A)
        gate(
            "bit2",
            "m2",
            generic(&[1, 1], 1, 3),
            &["h11", "n00"],
            Some("C3"),
        ),
        gate(
            "bit2",
            "s2",
            generic(&[1, 1, 2], 3, 5),
            &["h00", "h11", "q"],
            Some("C5"),
        ),
        gate("bit2", "a2", lib(CtAnd), &["maj", "C4"], None),
        gate("bit2", "Y2", or3(), &["m2", "s2", "a2"], None),
    ];
    for g in gates {
        b.gate(g);
    }
    for n in OUTPUTS {
        b.output(n, n);
    }
    b.build().expect("block netlist is well formed")
}

/// Three fixed-function circuits and a one-hot output multiplexer, built from
/// the same gate library without control aggressors. This is the redundancy
/// baseline the polymorphic block replaces.
pub fn build_mux_baseline() -> Netlist {
    use GateKind::*;
    let mut b = Netlist::builder();
    for n in INPUTS {
        b.input(n);
    }
    for n in CTRLS {
        b.ctrl(n);
    }
    let oa21 = || generic(&[1, 1, 2], 0, 3);
    let gates = [
        // multiplier
        gate("mult", "m_p00", lib(CtAnd), &["A0", "B0"], None),
        gate("mult", "m_p10", lib(CtAnd), &["A1", "B0"], None),
        gate("mult", "m_p01", lib(CtAnd), &["A0", "B1"], None),
        gate("mult", "m_p11", lib(CtAnd), &["A1", "B1"], None),
        gate("mult", "m_y3", lib(CtAnd), &["m_p10", "m_p01"], None),
        gate("mult", "m_ny3", lib(Inv), &["m_y3"], None),
        gate("mult", "m_y1", oa21(), &["m_p10", "m_p01", "m_ny3"], None),
        gate("mult", "m_n00", lib(Inv), &["m_p00"], None),
        gate("mult", "m_y2", lib(CtAnd), &["m_p11", "m_n00"], None),
        // sorter
        gate("sort", "s_y3", generic(&[1, 1, 1, 1], 0, 1), &INPUTS, None),
        gate("sort", "s_y2", generic(&[1, 1, 1, 1], 0, 2), &INPUTS, None),
        gate("sort", "s_y1", generic(&[1, 1, 1, 1], 0, 3), &INPUTS, None),
        gate("sort", "s_y0", generic(&[1, 1, 1, 1], 0, 4), &INPUTS, None),
        // adder (its Y3 is always low and is not routed)
        gate("add", "a_c0", lib(CtAnd), &["A0", "B0"], None),
        gate("add", "a_nc0", lib(Inv), &["a_c0"], None),
        gate("add", "a_y0", oa21(), &["A0", "B0", "a_nc0"], None),
        gate(
            "add",
            "a_y2",
            generic(&[1, 1, 1], 0, 2),
            &["A1", "B1", "a_c0"],
            None,
        ),
        gate("add", "a_ny2", lib(Inv), &["a_y2"], None),
        gate(
            "add",
            "a_y1",
            generic(&[1, 1, 1, 2], 0, 3),
            &["A1", "B1", "a_c0", "a_ny2"],
            None,
        ),
        // select decode and output mux
        gate("mux", "sel_m", lib(Inv), &["C1"], None),
        gate("mux", "sel_a", lib(Inv), &["C2"], None),
        gate("mux", "sel_s", lib(CtAnd), &["C1", "C2"], None),
    ];
    for g in gates {
        b.gate(g);
    }
    let sources: [(&str, &[(&str, &str)]); 4] = [
        ("Y3", &[("m_y3", "sel_m"), ("s_y3", "sel_s")]),
        (
            "Y2",
            &[("m_y2", "sel_m"), ("s_y2", "sel_s"), ("a_y2", "sel_a")],
        ),
        (
            "Y1",
            &[("m_y1", "sel_m"), ("s_y1", "sel_s"), ("a_y1", "sel_a")],
        ),
        (
            "Y0",
            &[("m_p00", "sel_m"), ("s_y0", "sel_s"), ("a_y0", "sel_a")],
        ),
    ];
    for (port, legs) in sources {
        let mut gated = Vec::new();
        for (src, sel) in legs {
            let name = format!("g_{src}");
            b.gate(
                GateInstance::new(&name, lib(CtAnd), &[*src, *sel], None, &name).in_block("mux"),
            );
            gated.push(name);
        }
        let refs: Vec<&str> = gated.iter().map(String::as_str).collect();
        let or = generic(&vec![1; refs.len()], 0, 1);
        b.gate(GateInstance::new(port, or, &refs, None, port).in_block("mux"));
        b.output(port, port);
    }
    b.build().expect("baseline netlist is well formed")
}

/// Gate and transistor census of a block netlist.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Census {
    pub gates: u32,
    pub crosstalk_gates: u32,
    pub polymorphic_gates: u32,
    pub inverters: u32,
    pub transistors: u32,
    pub control_transistors: u32,
    pub datapath_transistors: u32,
    pub transistors_by_block: std::collections::BTreeMap<String, u32>,
}

pub fn census(netlist: &Netlist) -> Census {
    let gates = netlist.gates();
    let inverters = gates.iter().filter(|g| g.spec.is_inverter()).count() as u32;
    let polymorphic = gates.iter().filter(|g| g.spec.has_ctrl()).count() as u32;
    let by_block = netlist.transistors_by_block();
    let control = by_block.get("control").copied().unwrap_or(0);
    let total = netlist.total_transistors();
    Census {
        gates: gates.len() as u32,
        crosstalk_gates: gates.len() as u32 - inverters,
        polymorphic_gates: polymorphic,
        inverters,
        transistors: total,
        control_transistors: control,
        datapath_transistors: total - control,
        transistors_by_block: by_block,
    }
}
