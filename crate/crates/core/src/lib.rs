//! Behavioral simulation and synthesis for crosstalk threshold logic.
//!
//! A crosstalk gate computes by summing charge induced on a floating victim
//! net by its aggressor nets and thresholding the result with an inverter.
//! A control aggressor can bias the victim so one gate realizes two functions.
//!
//! - [`charge_model`]: victim level, CT-margin decision, stage parity.
//! - [`gate_library`]: canonical fixed and polymorphic gates.
//! - [`threshold_synth`]: exhaustive integer weight search.
//! - [`netlist`]: circuits over named nets, text format, transistor accounting.
//! - [`simulator`]: two-phase discharge/evaluate simulation with faults.
//! - [`msa_block`]: the polymorphic 2-bit multiplier/sorter/adder.
//! - [`ft_runtime`]: fault discovery, health table and recovery routing.
//! - [`cli`]: command implementations behind the `crosstalk` binary.

pub mod charge_model;
pub mod cli;
pub mod ft_runtime;
pub mod gate_library;
pub mod msa_block;
pub mod netlist;
pub mod simulator;
pub mod threshold_synth;
pub mod truth_table;
