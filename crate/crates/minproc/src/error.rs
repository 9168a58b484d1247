//! Error types.

use thiserror::Error;

use crate::graph::{Color, NodeId};

/// Errors raised while assembling or querying a graph.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    /// Per-node arrays disagree in length.
    #[error("per-node arrays have inconsistent lengths")]
    LengthMismatch,
    /// A palette needs at least two colors.
    #[error("a palette needs at least 2 colors, got {0}")]
    TooFewColors(u8),
    /// A node refers to a color outside the palette.
    #[error("node {node} has color {color}, outside the palette of {k} colors")]
    ColorOutOfRange {
        /// Offending node.
        node: NodeId,
        /// Its color.
        color: Color,
        /// Palette size.
        k: u8,
    },
    /// A node id is not below the node count.
    #[error("node {node} is out of range (node count {node_count})")]
    NodeOutOfRange {
        /// Offending node.
        node: NodeId,
        /// Number of nodes.
        node_count: usize,
    },
    /// An edge joins a node to itself.
    #[error("self-loop on node {0}")]
    SelfLoop(NodeId),
    /// An edge appears more than once.
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(NodeId, NodeId),
    /// An operation that needs the two-color balance cache ran in k-color mode.
    #[error("operation requires two-color mode")]
    NotTwoColor,
}

/// Errors raised when a step cannot be applied.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StepError {
    /// A node in the step is not switchable in the current state.
    #[error("node {0} is not switchable")]
    NotSwitchable(NodeId),
    /// A node appears twice in one step.
    #[error("node {0} appears twice in one step")]
    Repeated(NodeId),
    /// The step violates the shape constraint of the scheduler model.
    #[error("model {model} does not allow this step: {reason}")]
    ModelConstraint {
        /// Scheduler model letter.
        model: char,
        /// What was violated.
        reason: String,
    },
    /// The step refers to a node that does not exist.
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Errors raised by the run loop.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    /// A policy returned an invalid step.
    #[error("policy produced an invalid step {index}: {source}")]
    InvalidStep {
        /// Zero-based step index.
        index: u64,
        /// Underlying validation failure.
        #[source]
        source: StepError,
    },
    /// A policy returned no node although the state is not stable.
    #[error("policy returned an empty step at index {0}")]
    EmptyStep(u64),
    /// The model parameters are inconsistent.
    #[error("invalid model parameters: {0}")]
    BadModel(String),
    /// The run limits are inconsistent.
    #[error("invalid run limits: {0}")]
    BadLimits(String),
}

/// Errors raised while replaying a recorded schedule.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("step {index} is invalid: {source}")]
pub struct ReplayError {
    /// Zero-based index of the first invalid step.
    pub index: usize,
    /// Why the step is invalid.
    #[source]
    pub source: StepError,
}

/// Errors raised by gadget builders and constructions.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError {
    /// A parameter is outside its domain.
    #[error("invalid parameter: {0}")]
    Domain(String),
    /// A fixed-attachment budget would be exceeded.
    #[error("node {node}: {count} fixed attachments of color {color} exceed the budget of {budget}")]
    AttachmentBudget {
        /// Node receiving the attachments.
        node: NodeId,
        /// Attachment color.
        color: Color,
        /// Requested total.
        count: u32,
        /// Allowed total.
        budget: u32,
    },
    /// A recharging system cannot serve a demand.
    #[error("recharging demand {demand} exceeds the {available} lower nodes available")]
    Demand {
        /// Requested demand of one target.
        demand: u32,
        /// Lower-level nodes available.
        available: u32,
    },
    /// A gadget's balances disagree with its certificate.
    #[error("{gadget}: role {role} has balance {actual}, certified {expected}")]
    Certification {
        /// Gadget kind.
        gadget: &'static str,
        /// Role within the gadget.
        role: String,
        /// Certified balance.
        expected: i64,
        /// Observed balance.
        actual: i64,
    },
    /// The assembled graph is not simple.
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Errors raised while reading or writing graph, trace and statistics files.
#[derive(Debug, Error)]
pub enum IoError {
    /// The underlying reader or writer failed.
    #[error(transparent)]
    Io(#[from] std::io::Error),
    /// A file is not valid JSON for its format.
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    /// A CSV file could not be written or read.
    #[error(transparent)]
    Csv(#[from] csv::Error),
    /// A file is well-formed but violates its format's rules.
    #[error("invalid file: {0}")]
    Format(String),
    /// The described graph is invalid.
    #[error(transparent)]
    Graph(#[from] GraphError),
    /// A recorded trace does not replay.
    #[error(transparent)]
    Replay(#[from] ReplayError),
}
