//! Strategies and property checks, run by `properties` through `proptest!`
//! and by `acceptance` through an explicit runner.

use crosstalk::charge_model::{fires, induced_level, AnalogParams, CouplingWeights, Level, Margin};
use crosstalk::gate_library::{build_gate, GateKind, GateSpec};
use crosstalk::msa_block::{build_msa, mode_assignment, operand_assignment, record_value, MsaMode};
use crosstalk::netlist::{GateInstance, Netlist, TOP_BLOCK};
use crosstalk::simulator::{
    run_cycle, run_sequence, Assignment, Fault, FaultMap, SimMode, SimTrace,
};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

type Check = Result<(), TestCaseError>;

/// `(data weights, ctrl weight, data inputs, ctrl)`.
pub type ModelCase = (Vec<u32>, u32, Vec<bool>, bool);

pub fn model_case() -> impl Strategy<Value = ModelCase> {
    (1usize..=5).prop_flat_map(|n| {
        (
            prop::collection::vec(0u32..=8, n),
            0u32..=8,
            prop::collection::vec(any::<bool>(), n),
            any::<bool>(),
        )
            .prop_filter("some data weight must be positive", |(w, ..)| {
                w.iter().any(|&x| x > 0)
            })
    })
}

pub fn parasitic() -> impl Strategy<Value = Level> {
    (0i64..=20, 1i64..=4).prop_map(|(n, d)| Level::new(n, d))
}

/// Raising any one aggressor never lowers the level or un-fires the gate.
pub fn check_monotone((w, c, x, ct): ModelCase, cp: Level, flip: usize, theta_seed: u32) -> Check {
    let weights = CouplingWeights::new(w, c).unwrap();
    let analog = AnalogParams::new(cp, Level::new(1, 2)).unwrap();
    let theta = 1 + theta_seed % weights.total();
    let margin = Margin::new(theta, &weights).unwrap();
    // the control is raised when `flip` points past the data
    let (mut hx, mut hct) = (x.clone(), ct);
    if flip < x.len() {
        hx[flip] = true
    } else {
        hct = true
    }
    let lo = induced_level(&weights, &x, ct, &analog).unwrap();
    let hi = induced_level(&weights, &hx, hct, &analog).unwrap();
    prop_assert!(hi >= lo);
    let f_lo = fires(&weights, margin, &x, ct).unwrap();
    let f_hi = fires(&weights, margin, &hx, hct).unwrap();
    prop_assert!(!f_lo || f_hi);
    Ok(())
}

/// Level lies in `[0, W/(W+cp)]` and hits the bound exactly when every
/// weighted aggressor is active.
pub fn check_bounded((w, c, x, ct): ModelCase, cp: Level) -> Check {
    let weights = CouplingWeights::new(w, c).unwrap();
    let analog = AnalogParams::new(cp, Level::new(1, 2)).unwrap();
    let total = Level::from_integer(i64::from(weights.total()));
    let bound = total / (total + cp);
    let level = induced_level(&weights, &x, ct, &analog).unwrap();
    prop_assert!(level >= Level::from_integer(0));
    prop_assert!(level <= bound);
    let all_on = vec![true; x.len()];
    let top = induced_level(&weights, &all_on, weights.has_ctrl(), &analog).unwrap();
    prop_assert_eq!(top, bound);
    prop_assert_eq!(
        level == bound,
        weights.active(&x, ct).unwrap() == weights.total()
    );
    Ok(())
}

pub fn check_scale_invariant((w, c, x, ct): ModelCase, k: u32, theta_seed: u32) -> Check {
    let base = CouplingWeights::with_max_weight(w.clone(), c, 64).unwrap();
    let theta = 1 + theta_seed % base.total();
    let scaled =
        CouplingWeights::with_max_weight(w.iter().map(|v| v * k).collect(), c * k, 64).unwrap();
    let a = fires(&base, Margin::new(theta, &base).unwrap(), &x, ct).unwrap();
    let b = fires(&scaled, Margin::new(theta * k, &scaled).unwrap(), &x, ct).unwrap();
    prop_assert_eq!(a, b);
    Ok(())
}

/// One gate of a random netlist. Inputs are indices into the nets available
/// so far, reduced modulo their count, which keeps the result acyclic.
#[derive(Debug, Clone)]
pub struct GateRecipe {
    kind: usize,
    picks: Vec<usize>,
    ctrl_pick: usize,
    weights: Vec<u32>,
    ctrl_weight: u32,
    theta_seed: u32,
    block: usize,
}

#[derive(Debug, Clone)]
pub struct NetlistRecipe {
    n_inputs: usize,
    n_ctrls: usize,
    gates: Vec<GateRecipe>,
    extra_outputs: Vec<usize>,
}

const KINDS: [GateKind; 9] = [
    GateKind::CtAnd,
    GateKind::CtOr,
    GateKind::CtNand,
    GateKind::CtNor,
    GateKind::CtAo21,
    GateKind::CtAoi21,
    GateKind::Inv,
    GateKind::PolyAndOr,
    GateKind::GenericCt,
];
const BLOCKS: [&str; 3] = [TOP_BLOCK, "left", "right"];

pub fn recipe() -> impl Strategy<Value = NetlistRecipe> {
    let gate = (
        0..KINDS.len(),
        prop::collection::vec(any::<usize>(), 3),
        any::<usize>(),
        prop::collection::vec(1u32..=4, 1..=3),
        0u32..=3,
        any::<u32>(),
        0..BLOCKS.len(),
    )
        .prop_map(
            |(kind, picks, ctrl_pick, weights, ctrl_weight, theta_seed, block)| GateRecipe {
                kind,
                picks,
                ctrl_pick,
                weights,
                ctrl_weight,
                theta_seed,
                block,
            },
        );
    (
        1usize..=4,
        1usize..=2,
        prop::collection::vec(gate, 1..=10),
        prop::collection::vec(any::<usize>(), 0..=2),
    )
        .prop_map(|(n_inputs, n_ctrls, gates, extra_outputs)| NetlistRecipe {
            n_inputs,
            n_ctrls,
            gates,
            extra_outputs,
        })
}

fn generic_from(r: &GateRecipe) -> GateSpec {
    let weights = CouplingWeights::new(r.weights.clone(), r.ctrl_weight).unwrap();
    let data: u32 = r.weights.iter().sum();
    // theta above the control weight so the control can matter; falls back
    // to a control-free gate when it still would not
    let lo = r.ctrl_weight + 1;
    let hi = data.max(lo);
    let theta = lo + r.theta_seed % (hi - lo + 1);
    GateSpec::generic(weights, theta, 1 + (r.theta_seed % 2) as u8)
        .or_else(|_| {
            GateSpec::generic(
                CouplingWeights::new(r.weights.clone(), 0).unwrap(),
                1 + r.theta_seed % data,
                2,
            )
        })
        .unwrap()
}

pub fn build(recipe: &NetlistRecipe) -> Netlist {
    let mut b = Netlist::builder();
    let mut nets: Vec<String> = (0..recipe.n_inputs).map(|i| format!("in{i}")).collect();
    let ctrls: Vec<String> = (0..recipe.n_ctrls).map(|i| format!("ct{i}")).collect();
    for n in &nets {
        b.input(n.clone());
    }
    for c in &ctrls {
        b.ctrl(c.clone());
    }
    for (gi, r) in recipe.gates.iter().enumerate() {
        let kind = KINDS[r.kind];
        let spec = if kind == GateKind::GenericCt {
            generic_from(r)
        } else {
            build_gate(kind).unwrap()
        };
        let inputs: Vec<&str> = (0..spec.arity())
            .map(|k| nets[r.picks[k % r.picks.len()].wrapping_add(k) % nets.len()].as_str())
            .collect();
        let ctrl = spec
            .has_ctrl()
            .then(|| ctrls[r.ctrl_pick % ctrls.len()].as_str());
        let out = format!("n{gi}");
        let g = GateInstance::new(format!("g{gi}"), spec, &inputs, ctrl, out.clone())
            .in_block(BLOCKS[r.block]);
        b.gate(g);
        nets.push(out);
    }
    b.output("OUT", format!("n{}", recipe.gates.len() - 1));
    for (i, pick) in recipe.extra_outputs.iter().enumerate() {
        b.output(format!("X{i}"), nets[pick % nets.len()].clone());
    }
    b.build().unwrap()
}

fn all_assignments(n: &Netlist) -> Vec<Assignment> {
    let names: Vec<&String> = n.inputs().iter().chain(n.ctrls()).collect();
    (0..1usize << names.len())
        .map(|k| {
            names
                .iter()
                .enumerate()
                .map(|(i, n)| (n.to_string(), k >> i & 1 == 1))
                .collect()
        })
        .collect()
}

pub fn check_round_trip(r: NetlistRecipe) -> Check {
    let n = build(&r);
    let text = n.serialize();
    let back = Netlist::parse(&text).unwrap();
    prop_assert!(
        n.inputs() == back.inputs()
            && n.ctrls() == back.ctrls()
            && n.outputs() == back.outputs()
            && n.gates() == back.gates(),
        "{}",
        text
    );
    prop_assert_eq!(back.serialize(), text);
    let by_block: u32 = n.transistors_by_block().values().sum();
    prop_assert_eq!(by_block, n.total_transistors());
    prop_assert_eq!(back.total_transistors(), n.total_transistors());
    Ok(())
}

/// Feeds a gate's own output, or the output of a gate downstream of it,
/// back into its first input.
pub fn check_cycle_rejected(r: NetlistRecipe, src: usize, dst: usize) -> Check {
    let n = build(&r);
    let gates = n.gates();
    let i = src % gates.len();
    let downstream: Vec<usize> = (0..gates.len())
        .filter(|&k| {
            n.fanin_cone([gates[k].output.as_str()])
                .contains(&gates[i].output)
        })
        .collect();
    let j = downstream[dst % downstream.len()];
    let prefix = format!("gate {} ", gates[i].name);
    let mut text = String::new();
    for line in n.serialize().lines() {
        if line.trim_start().starts_with(&prefix) {
            let from = format!("in={}", gates[i].inputs.join(","));
            let mut rewired = gates[i].inputs.clone();
            rewired[0] = gates[j].output.clone();
            text.push_str(&line.replacen(&from, &format!("in={}", rewired.join(",")), 1));
        } else {
            text.push_str(line);
        }
        text.push('\n');
    }
    prop_assert!(Netlist::parse(&text).is_err(), "{}", text);
    Ok(())
}

pub fn check_second_driver_rejected(r: NetlistRecipe, pick: usize) -> Check {
    let n = build(&r);
    let victim = &n.nets()[pick % n.nets().len()];
    let text = format!(
        "{}gate extra kind=INV in={} out={victim}\n",
        n.serialize(),
        n.inputs()[0]
    );
    prop_assert!(Netlist::parse(&text).is_err());
    Ok(())
}

fn output_bits(t: &SimTrace) -> Vec<Vec<bool>> {
    t.cycles.iter().map(|c| c.output_bits()).collect()
}

/// Repeat runs agree, rotating the cycle order rotates the records, and
/// discrete and analog evaluation agree.
pub fn check_deterministic(r: NetlistRecipe, seed: u64, discrete: bool) -> Check {
    let n = build(&r);
    let mode = if discrete {
        SimMode::Discrete
    } else {
        SimMode::analog()
    };
    let vectors = all_assignments(&n);
    let none = FaultMap::new();
    let a = run_sequence(&n, &vectors, mode, &none).unwrap();
    let b = run_sequence(&n, &vectors, mode, &none).unwrap();
    prop_assert_eq!(&a, &b);

    let k = (seed % vectors.len() as u64) as usize;
    let mut rotated = vectors.clone();
    rotated.rotate_left(k);
    let c = run_sequence(&n, &rotated, mode, &none).unwrap();
    let mut expected = a.cycles.clone();
    expected.rotate_left(k);
    prop_assert_eq!(c.cycles, expected);

    let other = if discrete {
        SimMode::analog()
    } else {
        SimMode::Discrete
    };
    let d = run_sequence(&n, &vectors, other, &none).unwrap();
    prop_assert_eq!(output_bits(&a), output_bits(&d));
    Ok(())
}

/// A stuck-at outside every output's fan-in cone changes nothing.
pub fn check_fault_locality(r: NetlistRecipe, pick: usize, value: bool) -> Check {
    let n = build(&r);
    let cone = n.output_cone();
    let outside: Vec<&String> = n.nets().iter().filter(|net| !cone.contains(*net)).collect();
    if outside.is_empty() {
        return Ok(());
    }
    let net = outside[pick % outside.len()].clone();
    let faults: FaultMap = [Fault::StuckAt { net, value }].into_iter().collect();
    let vectors = all_assignments(&n);
    let clean = run_sequence(&n, &vectors, SimMode::Discrete, &FaultMap::new()).unwrap();
    let faulty = run_sequence(&n, &vectors, SimMode::Discrete, &faults).unwrap();
    prop_assert_eq!(output_bits(&clean), output_bits(&faulty));
    Ok(())
}

/// Sorter output is `Y3 ≥ Y2 ≥ Y1 ≥ Y0` with as many ones as the operands.
pub fn check_sorter_thermometer() -> Result<(), String> {
    let n = build_msa();
    for a in 0..4u8 {
        for b in 0..4u8 {
            let r = run_cycle(
                &n,
                &operand_assignment(a, b),
                &mode_assignment(MsaMode::Sorter),
                SimMode::Discrete,
                &FaultMap::new(),
            )
            .map_err(|e| e.to_string())?;
            let y = record_value(&r);
            let bits: Vec<bool> = (0..4).rev().map(|i| y >> i & 1 == 1).collect();
            let ones = (a.count_ones() + b.count_ones()) as usize;
            if !bits.windows(2).all(|w| w[0] >= w[1]) || bits.iter().filter(|&&v| v).count() != ones
            {
                return Err(format!("sort {a:02b} {b:02b} -> {y:04b}"));
            }
        }
    }
    Ok(())
}
