//! Minority processes on graphs.
//!
//! In a minority process every node holds a color and a node may *switch* to
//! the color that is least frequent among its neighbors. This crate provides
//!
//! * [`graph`] and [`state`]: graphs, colorings, and the local switching
//!   semantics (balance, switchability, minority color, conflicts);
//! * [`engine`]: the run loop for the seven scheduler models A–G, with
//!   deterministic, seeded and injected node-choice policies;
//! * [`gadgets`]: the building blocks used to assemble slow instances
//!   (groups, fixed attachments, relays, recharging systems, AND gates,
//!   join and fork), each certified against its expected balances;
//! * [`constructions`]: the adversarial quadratic family with its explicit
//!   schedule, the benevolent family driven by rechargeable relays, and its
//!   multi-level recursive variant;
//! * [`io`], [`audit`] and [`stats`]: graph and trace files, invariant
//!   audits, and growth statistics used by the `minproc` command-line tool.

pub mod audit;
pub mod cli;
pub mod constructions;
pub mod engine;
pub mod error;
pub mod gadgets;
pub mod graph;
pub mod io;
pub mod state;
pub mod stats;

pub use engine::{
    replay_schedule, run, run_observed, run_with_policy, Frontier, Model, Observer, Outcome, Policy,
    PolicyKind, RunLimits, RunResult, ScheduleModel, StepEvent, StepLog, Trace,
};
pub use error::{BuildError, EngineError, GraphError, ReplayError, StepError};
pub use graph::{Color, Graph, NodeId, SizeSummary, BLACK, WHITE};
pub use state::DynamicState;
