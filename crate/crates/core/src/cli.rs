//! Command implementations for the `crosstalk` binary.
//!
//! [`run`] parses arguments, executes one command and returns the rendered
//! output with an exit code: 0 when everything passed, 1 on a functional
//! failure (mismatch, infeasible synthesis, unrecoverable or wrong result)
//! and 2 on usage or I/O errors. Output never depends on timing or hash
//! order, so identical invocations produce identical bytes.
//!
//! Truth tables on the command line and in files are LSB-first strings: the
//! character at index `k` is the output for the input vector whose bit `i` is
//! input `i`. `0111` is OR2 and `0001` is AND2.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::charge_model::DEFAULT_MAX_WEIGHT;
use crate::ft_runtime::{
    parse_program, parse_schedule, run_workload, BlockBank, Outcome, Rediscover, TestVectors,
    Workload,
};
use crate::gate_library::{build_gate, reference, GateKind};
use crate::msa_block::{self, build_msa, build_mux_baseline, census, MsaMode};
use crate::netlist::Netlist;
use crate::simulator::{
    bits_string, exhaustive_verify, run_cycle, Assignment, Fault, FaultMap, SimError, SimMode,
};
use crate::threshold_synth::{
    solve_polymorphic, solve_threshold, validate_realization, SynthError, SynthProblem,
};
use crate::truth_table::TruthTable;

const LSB_HELP: &str = "Truth tables are LSB-first strings of 0/1: character k is the output \
for the input vector whose bit i is input i (0001 = AND2, 0111 = OR2).";

#[derive(Debug, Parser)]
#[command(name = "crosstalk", version, about = "Crosstalk polymorphic logic toolkit", after_help = LSB_HELP)]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the report to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Machine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Discrete,
    Analog,
}

impl ModeArg {
    fn sim(self) -> SimMode {
        match self {
            ModeArg::Discrete => SimMode::Discrete,
            ModeArg::Analog => SimMode::analog(),
        }
    }

    fn name(self) -> &'static str {
        match self {
            ModeArg::Discrete => "discrete",
            ModeArg::Analog => "analog",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MsaAction {
    Export,
    Verify,
    Census,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exhaustively compare a netlist against a reference function.
    #[command(after_help = LSB_HELP)]
    Verify {
        netlist: PathBuf,
        /// Builtin name (and2, or2, nand2, nor2, xor2, and3, or3, ao21, oa21,
        /// aoi21, inv) or a file with one truth table per output port.
        #[arg(long)]
        oracle: String,
        /// Control value, e.g. `Ct=0`. Repeatable or comma-separated.
        #[arg(long = "ctrl", value_delimiter = ',')]
        ctrls: Vec<String>,
        #[arg(long, value_enum, default_value_t = ModeArg::Discrete)]
        mode: ModeArg,
        /// stuck:<net>=<0|1>, dead_gate:<gate> or dead_block:<block>.
        #[arg(long = "fault")]
        faults: Vec<String>,
    },
    /// Find coupling weights and threshold for one function or a pair.
    #[command(after_help = LSB_HELP)]
    Synth {
        f0: String,
        /// Function selected when the control aggressor is high.
        f1: Option<String>,
        #[arg(long, default_value_t = DEFAULT_MAX_WEIGHT)]
        max_weight: u32,
    },
    /// Work with the multiplier/sorter/adder block.
    Msa {
        #[arg(value_enum)]
        action: MsaAction,
        #[arg(long, value_enum, default_value_t = ModeArg::Discrete)]
        mode: ModeArg,
        #[arg(long = "fault")]
        faults: Vec<String>,
    },
    /// Run a workload on a bank of blocks with scheduled faults.
    Faults {
        #[arg(long, default_value_t = 3)]
        blocks: usize,
        /// One `<op> <a> <b>` per line, operands as 2-bit binary.
        #[arg(long)]
        program: PathBuf,
        /// One `<instr-id> <dead|fault-spec> <block>` per line.
        #[arg(long)]
        schedule: Option<PathBuf>,
        /// Discovery cadence in instructions, or `never` (discover once up front).
        #[arg(long, default_value = "never")]
        rediscover_every: String,
    },
    /// Transistor count comparison with reported CMOS and NWFET figures.
    Table2,
}

/// Everything a command produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Invocation {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: Vec<String>,
    pub config: Value,
    pub results: Value,
    pub exit_status: i32,
}

/// A usage or I/O problem; always exit status 2.
#[derive(Debug)]
struct UsageError(String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

struct Done {
    code: i32,
    config: Value,
    results: Value,
    text: String,
}

pub fn run<I, T>(args: I) -> Invocation
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let echo: Vec<String> = args
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            return if code == 0 {
                Invocation {
                    code,
                    stdout: rendered,
                    stderr: String::new(),
                }
            } else {
                Invocation {
                    code,
                    stdout: String::new(),
                    stderr: rendered,
                }
            };
        }
    };

    let (code, body, stderr) = match execute(&cli.command) {
        Ok(done) => {
            let body = match cli.format {
                Format::Text => done.text,
                Format::Machine => machine(echo, done.config, done.results, done.code),
            };
            (done.code, body, String::new())
        }
        Err(UsageError(msg)) => {
            let body = match cli.format {
                Format::Text => String::new(),
                Format::Machine => machine(echo, Value::Null, json!({ "error": msg }), 2),
            };
            (2, body, format!("error: {msg}\n"))
        }
    };

    match &cli.out {
        Some(path) => match fs::write(path, &body) {
            Ok(()) => Invocation {
                code,
                stdout: String::new(),
                stderr,
            },
            Err(e) => Invocation {
                code: 2,
                stdout: String::new(),
                stderr: format!("{stderr}error: cannot write {}: {e}\n", path.display()),
            },
        },
        None => Invocation {
            code,
            stdout: body,
            stderr,
        },
    }
}

fn machine(command: Vec<String>, config: Value, results: Value, exit_status: i32) -> String {
    let report = RunReport {
        command,
        config,
        results,
        exit_status,
    };
    let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
    s.push('\n');
    s
}

fn execute(command: &Command) -> Result<Done, UsageError> {
    match command {
        Command::Verify {
            netlist,
            oracle,
            ctrls,
            mode,
            faults,
        } => cmd_verify(netlist, oracle, ctrls, *mode, faults),
        Command::Synth { f0, f1, max_weight } => cmd_synth(f0, f1.as_deref(), *max_weight),
        Command::Msa {
            action,
            mode,
            faults,
        } => cmd_msa(*action, *mode, faults),
        Command::Faults {
            blocks,
            program,
            schedule,
            rediscover_every,
        } => cmd_faults(*blocks, program, schedule.as_deref(), rediscover_every),
        Command::Table2 => Ok(cmd_table2()),
    }
}

fn read(path: &Path) -> Result<String, UsageError> {
    fs::read_to_string(path).map_err(|e| UsageError(format!("cannot read {}: {e}", path.display())))
}

fn parse_faults(specs: &[String]) -> Result<FaultMap, UsageError> {
    Ok(specs
        .iter()
        .map(|s| s.parse::<Fault>())
        .collect::<Result<FaultMap, SimError>>()?)
}

fn parse_ctrls(specs: &[String]) -> Result<Assignment, UsageError> {
    let mut out = Assignment::new();
    for spec in specs {
        let (name, value) = spec.split_once('=').ok_or_else(|| {
            UsageError(format!("control {spec:?} must look like NAME=0 or NAME=1"))
        })?;
        let value = match value {
            "0" => false,
            "1" => true,
            _ => return Err(UsageError(format!("control {spec:?} must be 0 or 1"))),
        };
        out.insert(name.to_string(), value);
    }
    Ok(out)
}

fn load_oracle(name: &str) -> Result<Vec<TruthTable>, UsageError> {
    if let Some(t) = reference::by_name(name) {
        return Ok(vec![t]);
    }
    let text = read(Path::new(name))
        .map_err(|e| UsageError(format!("{} (and not a builtin function)", e.0)))?;
    let mut tables = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        tables.push(
            line.parse::<TruthTable>()
                .map_err(|e| UsageError(format!("{name} line {}: {e}", i + 1)))?,
        );
    }
    if tables.is_empty() {
        return Err(UsageError(format!("{name} contains no truth table")));
    }
    Ok(tables)
}

fn assignment_text(a: &Assignment) -> String {
    a.iter()
        .map(|(k, v)| format!("{k}={}", u8::from(*v)))
        .collect::<Vec<_>>()
        .join(" ")
}

fn cmd_verify(
    path: &Path,
    oracle: &str,
    ctrls: &[String],
    mode: ModeArg,
    faults: &[String],
) -> Result<Done, UsageError> {
    let netlist =
        Netlist::parse(&read(path)?).map_err(|d| UsageError(format!("{}: {d}", path.display())))?;
    let tables = load_oracle(oracle)?;
    let n_in = netlist.inputs().len();
    if tables.len() != netlist.outputs().len() {
        return Err(UsageError(format!(
            "oracle has {} output function(s) but the netlist has {} output port(s)",
            tables.len(),
            netlist.outputs().len()
        )));
    }
    if let Some(t) = tables.iter().find(|t| t.arity() != n_in) {
        return Err(UsageError(format!(
            "oracle function has arity {} but the netlist has {n_in} input(s)",
            t.arity()
        )));
    }
    let ctrl_values = parse_ctrls(ctrls)?;
    let fault_map = parse_faults(faults)?;
    let f = |x: &[bool]| tables.iter().map(|t| t.eval(x)).collect::<Vec<bool>>();
    let report = exhaustive_verify(&netlist, &ctrl_values, &f, mode.sim(), &fault_map)?;

    let code = if report.all_passed() { 0 } else { 1 };
    let mut text = format!(
        "verify {} against {oracle} ({}): {}/{} cases pass\n",
        path.display(),
        mode.name(),
        report.passed,
        report.total
    );
    for m in &report.failures {
        writeln!(
            text,
            "  FAIL {}: expected {} got {}",
            assignment_text(&m.inputs),
            bits_string(&m.expected),
            bits_string(&m.actual)
        )
        .unwrap();
    }
    Ok(Done {
        code,
        config: json!({
            "netlist": path.display().to_string(),
            "oracle": oracle,
            "ctrl": ctrl_values,
            "mode": mode.name(),
            "faults": fault_map.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
        }),
        results: serde_json::to_value(&report).expect("serializable"),
        text,
    })
}

fn join(ws: &[u32]) -> String {
    ws.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
}

fn cmd_synth(f0: &str, f1: Option<&str>, max_weight: u32) -> Result<Done, UsageError> {
    let t0: TruthTable = f0.parse().map_err(|e| UsageError(format!("f0: {e}")))?;
    let t1: Option<TruthTable> = f1
        .map(|s| s.parse().map_err(|e| UsageError(format!("f1: {e}"))))
        .transpose()?;
    let config = json!({ "f0": f0, "f1": f1, "max_weight": max_weight });
    let problem = SynthProblem::new(t0.clone(), t1.clone(), max_weight)?;

    let solved = match &t1 {
        None => solve_threshold(&problem).map(|s| {
            (
                json!({ "status": "solved", "weights": s.weights, "theta": s.theta }),
                format!("weights {} theta {}\n", join(&s.weights), s.theta),
            )
        }),
        Some(t1) => solve_polymorphic(&problem).map(|spec| {
            let check = validate_realization(&spec, &t0, Some(t1));
            let w = spec.weights();
            (
                json!({
                    "status": "solved",
                    "weights": w.data(),
                    "ctrl_weight": w.ctrl(),
                    "theta": spec.theta(),
                    "stages": spec.stages().count(),
                    "transistors": spec.transistor_count(),
                    "validation": check,
                }),
                format!(
                    "weights {} ctrl {} theta {}\ntransistors {}\nvalidation {}\n",
                    join(w.data()),
                    w.ctrl(),
                    spec.theta(),
                    spec.transistor_count(),
                    if check.passed() { "pass" } else { "FAIL" }
                ),
            )
        }),
    };
    match solved {
        Ok((results, text)) => Ok(Done {
            code: 0,
            config,
            results,
            text,
        }),
        Err(e @ (SynthError::Infeasible { .. } | SynthError::Degenerate)) => {
            let status = if matches!(e, SynthError::Degenerate) {
                "degenerate"
            } else {
                "infeasible"
            };
            Ok(Done {
                code: 1,
                config,
                results: json!({ "status": status, "reason": e.to_string() }),
                text: format!("{status}: {e}\n"),
            })
        }
        Err(e) => Err(e.into()),
    }
}

#[derive(Serialize)]
struct MsaCase {
    mode: MsaMode,
    a: String,
    b: String,
    expected: String,
    actual: String,
}

fn bits4(v: u8) -> String {
    format!("{v:04b}")
}

fn bits2(v: u8) -> String {
    format!("{v:02b}")
}

fn cmd_msa(action: MsaAction, mode: ModeArg, faults: &[String]) -> Result<Done, UsageError> {
    let netlist = build_msa();
    match action {
        MsaAction::Export => {
            let text = netlist.serialize();
            Ok(Done {
                code: 0,
                config: json!({ "action": "export" }),
                results: json!({ "netlist": text }),
                text,
            })
        }
        MsaAction::Verify => {
            let fault_map = parse_faults(faults)?;
            fault_map.validate(&netlist)?;
            let mut per_mode = Vec::new();
            let mut failures = Vec::new();
            let mut text = String::new();
            for m in MsaMode::ALL {
                let mut passed = 0;
                for a in 0..4u8 {
                    for b in 0..4u8 {
                        let r = run_cycle(
                            &netlist,
                            &msa_block::operand_assignment(a, b),
                            &msa_block::mode_assignment(m),
                            mode.sim(),
                            &fault_map,
                        )?;
                        let actual = msa_block::record_value(&r);
                        let expected = m.oracle(a, b);
                        if actual == expected {
                            passed += 1;
                        } else {
                            failures.push(MsaCase {
                                mode: m,
                                a: bits2(a),
                                b: bits2(b),
                                expected: bits4(expected),
                                actual: bits4(actual),
                            });
                        }
                    }
                }
                writeln!(text, "{m}: {passed}/16 pass").unwrap();
                per_mode.push(json!({ "mode": m, "passed": passed, "total": 16 }));
            }
            let passed: usize = 48 - failures.len();
            writeln!(text, "total: {passed}/48 pass").unwrap();
            for f in &failures {
                writeln!(
                    text,
                    "  FAIL {} {} {}: expected {} got {}",
                    f.mode, f.a, f.b, f.expected, f.actual
                )
                .unwrap();
            }
            Ok(Done {
                code: if failures.is_empty() { 0 } else { 1 },
                config: json!({
                    "action": "verify",
                    "mode": mode.name(),
                    "faults": fault_map.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
                }),
                results: json!({ "total": 48, "passed": passed, "modes": per_mode, "failures": failures }),
                text,
            })
        }
        MsaAction::Census => {
            let c = census(&netlist);
            let base = census(&build_mux_baseline());
            let deviation = (f64::from(c.transistors) - f64::from(msa_block::REPORTED_TRANSISTORS))
                / f64::from(msa_block::REPORTED_TRANSISTORS)
                * 100.0;
            let economy = c.transistors < base.transistors;
            let mut text = String::new();
            writeln!(text, "{:<22}{:>10}{:>10}", "", "computed", "reported").unwrap();
            for (label, got, rep) in [
                ("gates", c.gates, msa_block::REPORTED_GATES),
                (
                    "crosstalk gates",
                    c.crosstalk_gates,
                    msa_block::REPORTED_CROSSTALK_GATES,
                ),
                (
                    "polymorphic gates",
                    c.polymorphic_gates,
                    msa_block::REPORTED_POLYMORPHIC_GATES,
                ),
                ("inverters", c.inverters, msa_block::REPORTED_INVERTERS),
                (
                    "transistors",
                    c.transistors,
                    msa_block::REPORTED_TRANSISTORS,
                ),
            ] {
                writeln!(text, "{label:<22}{got:>10}{rep:>10}").unwrap();
            }
            writeln!(text, "transistors by block:").unwrap();
            for (block, t) in &c.transistors_by_block {
                writeln!(text, "  {block:<20}{t:>10}").unwrap();
            }
            writeln!(text, "datapath transistors{:>12}", c.datapath_transistors).unwrap();
            writeln!(text, "control transistors{:>13}", c.control_transistors).unwrap();
            writeln!(text, "deviation from reported: {deviation:+.1}%").unwrap();
            writeln!(
                text,
                "fixed-function + mux baseline: {} transistors; polymorphic block is {}",
                base.transistors,
                if economy { "cheaper" } else { "NOT cheaper" }
            )
            .unwrap();
            Ok(Done {
                code: 0,
                config: json!({ "action": "census" }),
                results: json!({
                    "census": c,
                    "reported": {
                        "gates": msa_block::REPORTED_GATES,
                        "crosstalk_gates": msa_block::REPORTED_CROSSTALK_GATES,
                        "polymorphic_gates": msa_block::REPORTED_POLYMORPHIC_GATES,
                        "inverters": msa_block::REPORTED_INVERTERS,
                        "transistors": msa_block::REPORTED_TRANSISTORS,
                    },
                    "deviation_percent": (deviation * 10.0).round() / 10.0,
                    "baseline": base,
                    "economy_holds": economy,
                }),
                text,
            })
        }
    }
}

pub fn parse_cadence(s: &str) -> Result<Rediscover, String> {
    if s == "never" {
        return Ok(Rediscover::Never);
    }
    match s.parse::<usize>() {
        Ok(n) if n > 0 => Ok(Rediscover::Every(n)),
        _ => Err(format!(
            "--rediscover-every expects a positive integer or `never`, got {s:?}"
        )),
    }
}

fn cmd_faults(
    blocks: usize,
    program: &Path,
    schedule: Option<&Path>,
    cadence: &str,
) -> Result<Done, UsageError> {
    if blocks == 0 {
        return Err(UsageError("--blocks must be at least 1".into()));
    }
    let cadence_v = parse_cadence(cadence)?;
    let prog = parse_program(&read(program)?)
        .map_err(|e| UsageError(format!("{}: {e}", program.display())))?;
    let sched = match schedule {
        Some(p) => {
            parse_schedule(&read(p)?).map_err(|e| UsageError(format!("{}: {e}", p.display())))?
        }
        None => Vec::new(),
    };
    let bank = BlockBank::msa(blocks);
    let w: Workload = run_workload(&prog, &bank, cadence_v, &sched, &TestVectors::exhaustive())?;

    let mut text = String::new();
    let (mut correct, mut wrong, mut unrecoverable) = (0, 0, 0);
    for r in &w.results {
        let tail = match &r.outcome {
            Outcome::Served {
                block,
                value,
                correct: ok,
            } => {
                if *ok {
                    correct += 1;
                } else {
                    wrong += 1;
                }
                format!(
                    "{} via {block} {}",
                    bits4(*value),
                    if *ok { "ok" } else { "WRONG" }
                )
            }
            Outcome::Unrecoverable => {
                unrecoverable += 1;
                "UNRECOVERABLE".to_string()
            }
        };
        writeln!(
            text,
            "{:>3} {} {} {} expected {} -> {tail}",
            r.id,
            r.op,
            bits2(r.a),
            bits2(r.b),
            bits4(r.expected)
        )
        .unwrap();
    }
    writeln!(
        text,
        "summary: {} instructions, {correct} correct, {wrong} wrong, {unrecoverable} unrecoverable",
        w.results.len()
    )
    .unwrap();
    writeln!(text, "event log:").unwrap();
    for e in &w.log {
        writeln!(text, "{}", serde_json::to_string(e).expect("serializable")).unwrap();
    }

    Ok(Done {
        code: if w.all_correct() { 0 } else { 1 },
        config: json!({
            "blocks": blocks,
            "program": program.display().to_string(),
            "schedule": schedule.map(|p| p.display().to_string()),
            "rediscover_every": cadence,
            "vectors": "exhaustive",
        }),
        results: json!({
            "summary": {
                "instructions": w.results.len(),
                "correct": correct,
                "wrong": wrong,
                "unrecoverable": unrecoverable,
            },
            "results": w.results,
            "log": w.log,
        }),
        text,
    })
}

/// A row of the transistor comparison.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Table2Row {
    pub circuit: &'static str,
    pub computed: u32,
    pub reported_crosstalk: u32,
    pub reported_cmos: u32,
    pub reported_nwfet: u32,
}

/// Percent reduction of `ours` relative to `theirs`, rounded to the nearest
/// integer.
pub fn reduction_percent(ours: u32, theirs: u32) -> u32 {
    ((1.0 - f64::from(ours) / f64::from(theirs)) * 100.0).round() as u32
}

pub fn table2_rows() -> Vec<Table2Row> {
    let gate = |kind: GateKind| build_gate(kind).expect("library gate").transistor_count();
    vec![
        Table2Row {
            circuit: "AND2-OR2",
            computed: gate(GateKind::PolyAndOr),
            reported_crosstalk: 5,
            reported_cmos: 18,
            reported_nwfet: 6,
        },
        Table2Row {
            circuit: "AO21-OA21",
            computed: gate(GateKind::PolyOa21Ao21),
            reported_crosstalk: 5,
            reported_cmos: 22,
            reported_nwfet: 8,
        },
        Table2Row {
            circuit: "AND3-AO21",
            computed: gate(GateKind::PolyAnd3Ao21),
            reported_crosstalk: 5,
            reported_cmos: 22,
            reported_nwfet: 12,
        },
        Table2Row {
            circuit: "AO21-OR3",
            computed: gate(GateKind::PolyAo21Or3),
            reported_crosstalk: 5,
            reported_cmos: 22,
            reported_nwfet: 12,
        },
        Table2Row {
            circuit: "Multiplier-Sorter-Adder",
            computed: build_msa().total_transistors(),
            reported_crosstalk: msa_block::REPORTED_TRANSISTORS,
            reported_cmos: 408,
            reported_nwfet: 216,
        },
    ]
}

fn cmd_table2() -> Done {
    let rows = table2_rows();
    let msa = rows.last().expect("msa row");
    let reductions = json!({
        "reported_vs_cmos": reduction_percent(msa.reported_crosstalk, msa.reported_cmos),
        "reported_vs_nwfet": reduction_percent(msa.reported_crosstalk, msa.reported_nwfet),
        "computed_vs_cmos": reduction_percent(msa.computed, msa.reported_cmos),
        "computed_vs_nwfet": reduction_percent(msa.computed, msa.reported_nwfet),
    });
    let mut text = String::new();
    writeln!(
        text,
        "{:<25}{:>10}{:>12}{:>12}{:>12}",
        "circuit", "computed", "reported", "CMOS", "NWFET"
    )
    .unwrap();
    writeln!(
        text,
        "{:<25}{:>10}{:>12}{:>12}{:>12}",
        "", "crosstalk", "crosstalk", "reported", "reported"
    )
    .unwrap();
    for r in &rows {
        writeln!(
            text,
            "{:<25}{:>10}{:>12}{:>12}{:>12}",
            r.circuit, r.computed, r.reported_crosstalk, r.reported_cmos, r.reported_nwfet
        )
        .unwrap();
    }
    writeln!(
        text,
        "MSA reduction from reported figures: {}% vs CMOS, {}% vs NWFET",
        reductions["reported_vs_cmos"], reductions["reported_vs_nwfet"]
    )
    .unwrap();
    writeln!(
        text,
        "MSA reduction with computed count:   {}% vs CMOS, {}% vs NWFET",
        reductions["computed_vs_cmos"], reductions["computed_vs_nwfet"]
    )
    .unwrap();
    writeln!(
        text,
        "CMOS and NWFET columns are reported constants, not modeled."
    )
    .unwrap();
    Done {
        code: 0,
        config: json!({}),
        results: json!({ "rows": rows, "msa_reduction_percent": reductions }),
        text,
    }
}
