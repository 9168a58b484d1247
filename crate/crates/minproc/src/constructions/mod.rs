//! The slow instance families and a uniform size report.

pub mod adversarial;
pub mod benevolent;

pub use adversarial::{build_adversarial, AdversarialInstance};
pub use benevolent::{
    build_benevolent, build_recursive, BenevolentInstance, BenevolentParams, Branch, Bundle, Level,
    RecursiveInstance,
};

use std::collections::BTreeMap;

use serde::Serialize;

use crate::gadgets::Built;
use crate::graph::SizeSummary;

/// Size and inventory of a built instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceReport {
    /// Construction kind: `adversarial`, `benevolent` or `recursive`.
    pub kind: String,
    /// Construction parameters.
    pub params: BTreeMap<String, u64>,
    /// Nodes that are not pinned (fixed attachments are not nodes).
    pub nodes: usize,
    /// Pinned nodes (starters).
    pub pinned_nodes: usize,
    /// Fixed attachments.
    pub attachments: u64,
    /// Node count of the literal graph with two shared fixed sets, `3n + 2`.
    pub materialized_nodes: usize,
    /// Explicit edges.
    pub edges: usize,
    /// Largest degree, attachments included.
    pub max_degree: usize,
    /// Number of gadgets of each kind.
    pub gadgets: BTreeMap<String, usize>,
    /// Number of nodes of each role.
    pub roles: BTreeMap<String, usize>,
}

/// Summarizes a built instance.
pub fn instance_report(kind: &str, params: &[(&str, u64)], built: &Built) -> InstanceReport {
    let size = SizeSummary::of(&built.graph);
    let mut gadgets = BTreeMap::new();
    for c in &built.certs {
        *gadgets.entry(c.kind.to_string()).or_insert(0) += 1;
    }
    let mut roles = BTreeMap::new();
    for r in &built.roles {
        *roles.entry(r.name().to_string()).or_insert(0) += 1;
    }
    InstanceReport {
        kind: kind.to_string(),
        params: params.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
        nodes: size.nodes,
        pinned_nodes: size.pinned_nodes,
        attachments: size.attachments,
        materialized_nodes: size.materialized_nodes,
        edges: size.edges,
        max_degree: size.max_degree,
        gadgets,
        roles,
    }
}
