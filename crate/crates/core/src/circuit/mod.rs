//! Minimal nonlinear circuit solver: modified nodal analysis with
//! Newton-Raphson for DC operating points and fixed-step transient
//! integration for periodic rectifier waveforms.
//!
//! A [`Netlist`] is immutable once built and carries no solver state, so
//! independent solves over the same netlist may run in parallel freely.

mod diode;
mod mna;
mod netlist;
mod text;
mod transient;
mod waveform;

pub use diode::{
    diode_current, DiodeModel, DiodeModelError, EXP_CLAMP, JACOBIAN_GMIN, THERMAL_VOLTAGE_300K,
};
pub use mna::{
    solve_dc, solve_dc_with, CircuitError, DcSolution, Integration, MnaSystem, NewtonStats,
    SolverConfig,
};
pub use netlist::{Component, ComponentKind, Netlist, NetlistError, NodeId, SineParams};
pub use text::{netlist_to_text, parse_netlist, NetlistParseError};
pub use transient::{
    run_to_steady_state, run_transient, run_transient_with, SteadyRunConfig, SteadyRunResult,
    TransientRunner, MIN_STEPS_PER_PERIOD,
};
pub use waveform::{
    extract_steady_state, extract_steady_state_with_tol, SteadyState, Waveform,
    STEADY_SETTLE_REL_TOL,
};
