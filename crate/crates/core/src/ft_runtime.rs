//! Fault discovery and recovery over a bank of polymorphic blocks.
//!
//! Discovery configures every block for every functionality, drives known
//! operand pairs and records whether the outputs matched the reference, which
//! fills the health table. Recovery decodes each instruction into control bits
//! for the lowest-indexed block that is healthy for the requested operation.
//! Discovery is stop-the-world: it runs between instructions.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::msa_block::{self, build_msa, mode_assignment, operand_assignment, MsaMode};
use crate::netlist::Netlist;
use crate::simulator::{run_cycle, Fault, FaultMap, SimError, SimMode};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuntimeError {
    #[error("no healthy block can perform {0}")]
    Unrecoverable(MsaMode),
    #[error("unknown block {0:?}")]
    UnknownBlock(String),
    #[error("duplicate block name {0:?}")]
    DuplicateBlock(String),
    #[error("block {0:?} does not expose the A1,A0,B1,B0 / C1,C2 / Y3..Y0 interface")]
    BadInterface(String),
    #[error("empty test vector set for {0}")]
    EmptyVectors(MsaMode),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Sim(#[from] SimError),
}

#[derive(Debug, Clone)]
pub struct BankBlock {
    pub name: String,
    pub netlist: Arc<Netlist>,
    pub faults: FaultMap,
}

/// Independent blocks sharing the {Multiplier, Sorter, Adder} universe.
#[derive(Debug, Clone)]
pub struct BlockBank {
    blocks: Vec<BankBlock>,
}

impl BlockBank {
    pub fn new(blocks: Vec<(String, Arc<Netlist>)>) -> Result<Self, RuntimeError> {
        let mut out: Vec<BankBlock> = Vec::with_capacity(blocks.len());
        for (name, netlist) in blocks {
            if out.iter().any(|b| b.name == name) {
                return Err(RuntimeError::DuplicateBlock(name));
            }
            let ports: Vec<&str> = netlist.outputs().iter().map(|o| o.port.as_str()).collect();
            if netlist.inputs() != msa_block::INPUTS
                || netlist.ctrls() != msa_block::CTRLS
                || ports != msa_block::OUTPUTS
            {
                return Err(RuntimeError::BadInterface(name));
            }
            out.push(BankBlock {
                name,
                netlist,
                faults: FaultMap::new(),
            });
        }
        Ok(Self { blocks: out })
    }

    /// `n` fault-free copies of the multiplier/sorter/adder block, named
    /// `block1..blockn`.
    pub fn msa(n: usize) -> Self {
        let netlist = Arc::new(build_msa());
        let blocks = (1..=n)
            .map(|i| (format!("block{i}"), Arc::clone(&netlist)))
            .collect();
        Self::new(blocks).expect("distinct names over the reference block")
    }

    pub fn blocks(&self) -> &[BankBlock] {
        &self.blocks
    }

    pub fn block(&self, name: &str) -> Option<&BankBlock> {
        self.blocks.iter().find(|b| b.name == name)
    }

    fn block_mut(&mut self, name: &str) -> Result<&mut BankBlock, RuntimeError> {
        self.blocks
            .iter_mut()
            .find(|b| b.name == name)
            .ok_or_else(|| RuntimeError::UnknownBlock(name.to_string()))
    }

    pub fn inject(&mut self, block: &str, fault: &BlockFault) -> Result<(), RuntimeError> {
        let b = self.block_mut(block)?;
        let added: FaultMap = match fault {
            BlockFault::Kill => FaultMap::kill_all(&b.netlist),
            BlockFault::Net(f) => [f.clone()].into_iter().collect(),
        };
        added.validate(&b.netlist)?;
        for f in added.iter() {
            b.faults.insert(f.clone());
        }
        Ok(())
    }

    /// Configures `block` for `mode` and runs one evaluation.
    pub fn execute(
        &self,
        block: &BankBlock,
        mode: MsaMode,
        a: u8,
        b: u8,
    ) -> Result<u8, RuntimeError> {
        let record = run_cycle(
            &block.netlist,
            &operand_assignment(a, b),
            &mode_assignment(mode),
            SimMode::Discrete,
            &block.faults,
        )?;
        Ok(msa_block::record_value(&record))
    }
}

/// A fault applied to one block of the bank.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum BlockFault {
    /// The whole block is dead.
    Kill,
    Net(Fault),
}

impl fmt::Display for BlockFault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BlockFault::Kill => f.write_str("dead"),
            BlockFault::Net(fault) => write!(f, "{fault}"),
        }
    }
}

impl std::str::FromStr for BlockFault {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "dead" {
            Ok(BlockFault::Kill)
        } else {
            s.parse().map(BlockFault::Net)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Health {
    Correct,
    Incorrect,
    Untested,
}

/// `(block, functionality)` → verified status, blocks in bank order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HealthTable {
    blocks: Vec<String>,
    entries: Vec<[Health; 3]>,
}

fn mode_slot(mode: MsaMode) -> usize {
    MsaMode::ALL
        .iter()
        .position(|&m| m == mode)
        .expect("listed")
}

impl HealthTable {
    pub fn untested(bank: &BlockBank) -> Self {
        Self {
            blocks: bank.blocks.iter().map(|b| b.name.clone()).collect(),
            entries: vec![[Health::Untested; 3]; bank.blocks.len()],
        }
    }

    pub fn get(&self, block: &str, mode: MsaMode) -> Option<Health> {
        let i = self.blocks.iter().position(|b| b == block)?;
        Some(self.entries[i][mode_slot(mode)])
    }

    pub fn is_complete(&self) -> bool {
        self.entries
            .iter()
            .flatten()
            .all(|&h| h != Health::Untested)
    }

    /// Blocks verified for `mode`, in bank order.
    pub fn correct_blocks(&self, mode: MsaMode) -> Vec<&str> {
        self.blocks
            .iter()
            .zip(&self.entries)
            .filter(|(_, e)| e[mode_slot(mode)] == Health::Correct)
            .map(|(b, _)| b.as_str())
            .collect()
    }

    pub fn correct_count(&self) -> usize {
        self.entries
            .iter()
            .flatten()
            .filter(|&&h| h == Health::Correct)
            .count()
    }

    /// `block1:M+S+A- block2:...` style summary.
    pub fn summary(&self) -> String {
        self.blocks
            .iter()
            .zip(&self.entries)
            .map(|(b, e)| {
                let marks: String = MsaMode::ALL
                    .iter()
                    .zip(e)
                    .map(|(m, h)| {
                        let mark = match h {
                            Health::Correct => '+',
                            Health::Incorrect => '-',
                            Health::Untested => '?',
                        };
                        format!("{m}{mark}")
                    })
                    .collect();
                format!("{b}:{marks}")
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Operand pairs driven during discovery, per functionality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestVectors {
    sets: [Vec<(u8, u8)>; 3],
}

impl TestVectors {
    /// All 16 operand pairs for every functionality; discovery with these is
    /// sound.
    pub fn exhaustive() -> Self {
        let all: Vec<(u8, u8)> = (0..4).flat_map(|a| (0..4).map(move |b| (a, b))).collect();
        Self {
            sets: [all.clone(), all.clone(), all],
        }
    }

    /// The same subset for every functionality. Faults that only show on
    /// untested pairs go unnoticed.
    pub fn reduced(pairs: Vec<(u8, u8)>) -> Self {
        Self {
            sets: [pairs.clone(), pairs.clone(), pairs],
        }
    }

    pub fn with(mut self, mode: MsaMode, pairs: Vec<(u8, u8)>) -> Self {
        self.sets[mode_slot(mode)] = pairs;
        self
    }

    pub fn get(&self, mode: MsaMode) -> &[(u8, u8)] {
        &self.sets[mode_slot(mode)]
    }
}

pub fn discover(bank: &BlockBank, vectors: &TestVectors) -> Result<HealthTable, RuntimeError> {
    if let Some(&mode) = MsaMode::ALL.iter().find(|&&m| vectors.get(m).is_empty()) {
        return Err(RuntimeError::EmptyVectors(mode));
    }
    let mut table = HealthTable::untested(bank);
    for (bi, block) in bank.blocks.iter().enumerate() {
        for mode in MsaMode::ALL {
            let mut ok = true;
            for &(a, b) in vectors.get(mode) {
                if bank.execute(block, mode, a, b)? != mode.oracle(a, b) {
                    ok = false;
                    break;
                }
            }
            table.entries[bi][mode_slot(mode)] = if ok {
                Health::Correct
            } else {
                Health::Incorrect
            };
        }
    }
    Ok(table)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Instruction {
    pub id: usize,
    pub op: MsaMode,
    pub a: u8,
    pub b: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Dispatched {
    pub block: String,
    pub value: u8,
}

pub fn dispatch(
    instr: &Instruction,
    table: &HealthTable,
    bank: &BlockBank,
) -> Result<Dispatched, RuntimeError> {
    let name = *table
        .correct_blocks(instr.op)
        .first()
        .ok_or(RuntimeError::Unrecoverable(instr.op))?;
    let block = bank
        .block(name)
        .ok_or_else(|| RuntimeError::UnknownBlock(name.to_string()))?;
    let value = bank.execute(block, instr.op, instr.a, instr.b)?;
    Ok(Dispatched {
        block: name.to_string(),
        value,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Rediscover {
    /// Discover before instruction ids divisible by `n` (and always before
    /// the first instruction).
    Every(usize),
    Never,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScheduledFault {
    /// Injected just before the instruction with this id.
    pub before: usize,
    pub block: String,
    pub fault: BlockFault,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Outcome {
    Served {
        block: String,
        value: u8,
        correct: bool,
    },
    Unrecoverable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InstrResult {
    pub id: usize,
    pub op: MsaMode,
    pub a: u8,
    pub b: u8,
    pub expected: u8,
    pub outcome: Outcome,
}

impl InstrResult {
    pub fn is_correct(&self) -> bool {
        matches!(self.outcome, Outcome::Served { correct: true, .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    FaultInjected,
    Discovery,
    Route,
    Reroute,
    StaleRoute,
    WrongResult,
    Unrecoverable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Event {
    /// Id of the instruction the event precedes or belongs to.
    pub time: usize,
    pub kind: EventKind,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Workload {
    pub results: Vec<InstrResult>,
    pub log: Vec<Event>,
}

impl Workload {
    pub fn count(&self, kind: EventKind) -> usize {
        self.log.iter().filter(|e| e.kind == kind).count()
    }

    pub fn all_correct(&self) -> bool {
        self.results.iter().all(InstrResult::is_correct)
    }
}

/// Executes `program` in order on a copy of `bank`, injecting scheduled
/// faults and re-running discovery at the requested cadence. An instruction
/// with no healthy block is recorded as unrecoverable and the run continues.
pub fn run_workload(
    program: &[Instruction],
    bank: &BlockBank,
    cadence: Rediscover,
    schedule: &[ScheduledFault],
    vectors: &TestVectors,
) -> Result<Workload, RuntimeError> {
    let mut bank = bank.clone();
    for s in schedule {
        let b = bank
            .block(&s.block)
            .ok_or_else(|| RuntimeError::UnknownBlock(s.block.clone()))?;
        if let BlockFault::Net(f) = &s.fault {
            [f.clone()]
                .into_iter()
                .collect::<FaultMap>()
                .validate(&b.netlist)?;
        }
    }
    let preferred = bank.blocks.first().map(|b| b.name.clone());
    let mut log = Vec::new();
    let mut results = Vec::with_capacity(program.len());
    let mut table: Option<HealthTable> = None;
    // blocks whose faults changed since the table was built
    let mut stale: Vec<String> = Vec::new();

    for (step, instr) in program.iter().enumerate() {
        for s in schedule.iter().filter(|s| s.before == instr.id) {
            bank.inject(&s.block, &s.fault)?;
            if !stale.contains(&s.block) {
                stale.push(s.block.clone());
            }
            log.push(Event {
                time: instr.id,
                kind: EventKind::FaultInjected,
                detail: format!("{} {}", s.block, s.fault),
            });
        }
        let due = match cadence {
            Rediscover::Every(n) => step % n.max(1) == 0,
            Rediscover::Never => false,
        };
        if table.is_none() || due {
            let t = discover(&bank, vectors)?;
            log.push(Event {
                time: instr.id,
                kind: EventKind::Discovery,
                detail: t.summary(),
            });
            table = Some(t);
            stale.clear();
        }
        let t = table.as_ref().expect("discovered above");
        let expected = instr.op.oracle(instr.a, instr.b);
        let outcome = match dispatch(instr, t, &bank) {
            Ok(d) => {
                let kind = if Some(&d.block) == preferred.as_ref() {
                    EventKind::Route
                } else {
                    EventKind::Reroute
                };
                log.push(Event {
                    time: instr.id,
                    kind,
                    detail: format!("{}{} -> {}", instr.op, instr.id, d.block),
                });
                if stale.contains(&d.block) {
                    log.push(Event {
                        time: instr.id,
                        kind: EventKind::StaleRoute,
                        detail: format!("{} changed since last discovery", d.block),
                    });
                }
                let correct = d.value == expected;
                if !correct {
                    log.push(Event {
                        time: instr.id,
                        kind: EventKind::WrongResult,
                        detail: format!("{:04b} expected {:04b}", d.value, expected),
                    });
                }
                Outcome::Served {
                    block: d.block,
                    value: d.value,
                    correct,
                }
            }
            Err(RuntimeError::Unrecoverable(op)) => {
                log.push(Event {
                    time: instr.id,
                    kind: EventKind::Unrecoverable,
                    detail: format!("no healthy block for {op}"),
                });
                Outcome::Unrecoverable
            }
            Err(other) => return Err(other),
        };
        results.push(InstrResult {
            id: instr.id,
            op: instr.op,
            a: instr.a,
            b: instr.b,
            expected,
            outcome,
        });
    }
    Ok(Workload { results, log })
}

fn parse_operand(s: &str) -> Option<u8> {
    if s.len() != 2 {
        return None;
    }
    u8::from_str_radix(s, 2).ok()
}

/// One instruction per line: `<op> <a:2 bits> <b:2 bits>`, e.g. `M 11 10`.
pub fn parse_program(text: &str) -> Result<Vec<Instruction>, RuntimeError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |message: String| RuntimeError::Parse { line, message };
        let words: Vec<&str> = content.split_whitespace().collect();
        let [op, a, b] = words[..] else {
            return Err(err("expected `<op> <a> <b>`".into()));
        };
        let op: MsaMode = op.parse().map_err(err)?;
        let a = parse_operand(a).ok_or_else(|| err(format!("bad operand {a:?}")))?;
        let b = parse_operand(b).ok_or_else(|| err(format!("bad operand {b:?}")))?;
        out.push(Instruction {
            id: out.len(),
            op,
            a,
            b,
        });
    }
    Ok(out)
}

/// One fault per line: `<instr-id> <fault-spec> <block>`, where the spec is
/// `dead` or a netlist fault such as `stuck:p10=0`.
pub fn parse_schedule(text: &str) -> Result<Vec<ScheduledFault>, RuntimeError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |message: String| RuntimeError::Parse { line, message };
        let words: Vec<&str> = content.split_whitespace().collect();
        let [id, fault, block] = words[..] else {
            return Err(err("expected `<instr-id> <fault-spec> <block>`".into()));
        };
        out.push(ScheduledFault {
            before: id
                .parse()
                .map_err(|_| err(format!("bad instruction id {id:?}")))?,
            fault: fault.parse().map_err(|e: SimError| err(e.to_string()))?,
            block: block.to_string(),
        });
    }
    Ok(out)
}
