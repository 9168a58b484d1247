//! Graph files (JSON), trace files (line-delimited JSON) and DOT export.
//!
//! A graph file is one JSON object with sorted keys. Nodes and edges are
//! written one per line so that files diff well; ids are dense, every edge
//! appears once as `[u, v]` with `u < v`, in increasing order. Reading a file
//! and writing it back reproduces it byte for byte.
//!
//! A trace file has a header line, one line per step with the sorted
//! switched nodes, and a footer line with the outcome and counts. Replaying
//! the steps on the graph reproduces the footer.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::engine::{replay_schedule, Model, Outcome, RunLimits, ScheduleModel, StepLog, Trace};
use crate::error::IoError;
use crate::gadgets::Role;
use crate::graph::{Attachments, Color, Graph, NodeId};
use crate::state::DynamicState;

/// Format tag of graph files.
pub const GRAPH_FORMAT: &str = "minproc-graph";
/// Format tag of trace files.
pub const TRACE_FORMAT: &str = "minproc-trace";
/// Current version of both formats.
pub const FORMAT_VERSION: u32 = 1;

/// One node of a graph file. Fields are declared in key order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeRecord {
    /// Fixed attachments `[white, black]`.
    pub attachments: Attachments,
    /// Initial color.
    pub color: Color,
    /// Dense node id.
    pub id: NodeId,
    /// Whether the color can never change.
    pub pinned: bool,
    /// Structural role, as a provenance tag.
    pub role: Role,
}

/// Construction metadata of a graph file.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphMeta {
    /// Construction kind, e.g. `benevolent`.
    pub kind: String,
    /// Construction parameters.
    pub params: BTreeMap<String, u64>,
}

/// In-memory form of a graph file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    /// Edges `[u, v]` with `u < v`, sorted.
    pub edges: Vec<[NodeId; 2]>,
    /// Always [`GRAPH_FORMAT`].
    pub format: String,
    /// Construction metadata.
    pub metadata: GraphMeta,
    /// Node records in id order.
    pub nodes: Vec<NodeRecord>,
    /// Palette size.
    pub num_colors: u8,
    /// Format version.
    pub version: u32,
}

impl GraphFile {
    /// Describes `g`; nodes without a known role are tagged `plain`.
    pub fn from_graph(g: &Graph, roles: Option<&[Role]>, meta: GraphMeta) -> Self {
        let nodes = (0..g.node_count() as NodeId)
            .map(|v| NodeRecord {
                attachments: g.attachments(v),
                color: g.init_color(v),
                id: v,
                pinned: g.is_pinned(v),
                role: roles.and_then(|r| r.get(v as usize).copied()).unwrap_or(Role::Plain),
            })
            .collect();
        GraphFile {
            edges: g.edges().map(|(u, v)| [u, v]).collect(),
            format: GRAPH_FORMAT.to_string(),
            metadata: meta,
            nodes,
            num_colors: g.num_colors(),
            version: FORMAT_VERSION,
        }
    }

    /// Checks the format rules and builds the graph.
    pub fn to_graph(&self) -> Result<Graph, IoError> {
        if self.format != GRAPH_FORMAT || self.version != FORMAT_VERSION {
            return Err(IoError::Format(format!(
                "expected {GRAPH_FORMAT} version {FORMAT_VERSION}, got {} version {}",
                self.format, self.version
            )));
        }
        if let Some((i, n)) = self.nodes.iter().enumerate().find(|(i, n)| n.id as usize != *i) {
            return Err(IoError::Format(format!("node ids must be dense: record {i} has id {}", n.id)));
        }
        if let Some(w) = self.edges.windows(2).find(|w| w[0] >= w[1]) {
            return Err(IoError::Format(format!("edges must be sorted and unique: {:?} before {:?}", w[0], w[1])));
        }
        if let Some(e) = self.edges.iter().find(|e| e[0] >= e[1]) {
            return Err(IoError::Format(format!("edge {:?} must be written with u < v", e)));
        }
        let edges: Vec<(NodeId, NodeId)> = self.edges.iter().map(|e| (e[0], e[1])).collect();
        Ok(Graph::from_edges(
            self.nodes.iter().map(|n| n.color).collect(),
            self.nodes.iter().map(|n| n.pinned).collect(),
            self.nodes.iter().map(|n| n.attachments).collect(),
            &edges,
            self.num_colors,
        )?)
    }

    /// Node roles in id order.
    pub fn roles(&self) -> Vec<Role> {
        self.nodes.iter().map(|n| n.role).collect()
    }

    /// Canonical text: sorted keys, one node or edge per line, final newline.
    pub fn to_json_string(&self) -> Result<String, IoError> {
        let mut out = String::new();
        out.push_str("{\n\"edges\": [");
        push_lines(&mut out, &self.edges)?;
        out.push_str("],\n\"format\": ");
        out.push_str(&serde_json::to_string(&self.format)?);
        out.push_str(",\n\"metadata\": ");
        out.push_str(&serde_json::to_string(&self.metadata)?);
        out.push_str(",\n\"nodes\": [");
        push_lines(&mut out, &self.nodes)?;
        let _ = write!(out, "],\n\"num_colors\": {},\n\"version\": {}\n}}\n", self.num_colors, self.version);
        Ok(out)
    }

    /// Parses a graph file.
    pub fn from_json_str(s: &str) -> Result<Self, IoError> {
        Ok(serde_json::from_str(s)?)
    }

    /// Writes the canonical text.
    pub fn write_to(&self, mut w: impl Write) -> Result<(), IoError> {
        w.write_all(self.to_json_string()?.as_bytes())?;
        Ok(())
    }

    /// Reads a graph file.
    pub fn read_from(mut r: impl std::io::Read) -> Result<Self, IoError> {
        let mut s = String::new();
        r.read_to_string(&mut s)?;
        Self::from_json_str(&s)
    }
}

fn push_lines<T: Serialize>(out: &mut String, items: &[T]) -> Result<(), IoError> {
    for (i, item) in items.iter().enumerate() {
        out.push_str(if i == 0 { "\n" } else { ",\n" });
        out.push_str(&serde_json::to_string(item)?);
    }
    if !items.is_empty() {
        out.push('\n');
    }
    Ok(())
}

/// SHA-256 of the graph's structure (colors, pinned flags, attachments,
/// edges), as lowercase hex. Roles and metadata do not contribute.
pub fn graph_hash(g: &Graph) -> String {
    let mut h = Sha256::new();
    h.update((g.node_count() as u64).to_le_bytes());
    h.update([g.num_colors()]);
    for v in 0..g.node_count() as NodeId {
        let a = g.attachments(v);
        h.update([g.init_color(v), g.is_pinned(v) as u8]);
        h.update(a[0].to_le_bytes());
        h.update(a[1].to_le_bytes());
    }
    for (u, v) in g.edges() {
        h.update(u.to_le_bytes());
        h.update(v.to_le_bytes());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// First line of a trace file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceHeader {
    /// Always [`TRACE_FORMAT`].
    pub format: String,
    /// Format version.
    pub version: u32,
    /// [`graph_hash`] of the graph the trace belongs to.
    pub graph_hash: String,
    /// The scheduler model and its parameters.
    pub schedule: ScheduleModel,
    /// The limits of the run.
    pub limits: RunLimits,
    /// How model G handles draws that select nobody.
    pub empty_draws: String,
}

impl TraceHeader {
    /// Header for a run of `schedule` on `g`.
    pub fn new(g: &Graph, schedule: ScheduleModel, limits: RunLimits) -> Self {
        TraceHeader {
            format: TRACE_FORMAT.to_string(),
            version: FORMAT_VERSION,
            graph_hash: graph_hash(g),
            schedule,
            limits,
            empty_draws: "redraw".to_string(),
        }
    }
}

/// Last line of a trace file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceFooter {
    /// How the run ended.
    pub outcome: Outcome,
    /// Number of steps.
    pub step_count: u64,
    /// Number of node switches.
    pub switch_count: u64,
    /// Switches whose minority color was a tie.
    pub ties: u64,
}

impl From<&Trace> for TraceFooter {
    fn from(t: &Trace) -> Self {
        TraceFooter {
            outcome: t.outcome,
            step_count: t.step_count,
            switch_count: t.switch_count,
            ties: t.ties,
        }
    }
}

/// One line of a trace file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "snake_case")]
pub enum TraceRecord {
    /// The header.
    Header(TraceHeader),
    /// One step.
    Step {
        /// Zero-based step index.
        index: u64,
        /// Switched nodes, sorted.
        nodes: Vec<NodeId>,
    },
    /// The footer.
    Footer(TraceFooter),
}

/// A parsed trace file.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceFile {
    /// The header.
    pub header: TraceHeader,
    /// All steps.
    pub steps: StepLog,
    /// The footer.
    pub footer: TraceFooter,
}

/// Writes a trace file. `trace` must have been recorded with
/// [`RunLimits::record_steps`].
pub fn write_trace(mut w: impl Write, header: &TraceHeader, trace: &Trace) -> Result<(), IoError> {
    let steps = trace
        .steps
        .as_ref()
        .ok_or_else(|| IoError::Format("the trace has no recorded steps".into()))?;
    serde_json::to_writer(&mut w, &TraceRecord::Header(header.clone()))?;
    w.write_all(b"\n")?;
    for (index, step) in steps.iter().enumerate() {
        // Written by hand: a step line is the hot path for long runs.
        write!(w, "{{\"record\":\"step\",\"index\":{index},\"nodes\":[")?;
        for (i, v) in step.iter().enumerate() {
            if i > 0 {
                w.write_all(b",")?;
            }
            write!(w, "{v}")?;
        }
        w.write_all(b"]}\n")?;
    }
    serde_json::to_writer(&mut w, &TraceRecord::Footer(TraceFooter::from(trace)))?;
    w.write_all(b"\n")?;
    Ok(())
}

/// Reads a trace file.
pub fn read_trace(r: impl BufRead) -> Result<TraceFile, IoError> {
    let mut header = None;
    let mut footer = None;
    let mut steps = StepLog::new();
    for (lineno, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        if footer.is_some() {
            return Err(IoError::Format(format!("line {}: content after the footer", lineno + 1)));
        }
        match serde_json::from_str::<TraceRecord>(&line)? {
            TraceRecord::Header(h) if header.is_none() && lineno == 0 => header = Some(h),
            TraceRecord::Step { index, nodes } if header.is_some() => {
                if index != steps.len() as u64 {
                    return Err(IoError::Format(format!(
                        "line {}: step index {index}, expected {}",
                        lineno + 1,
                        steps.len()
                    )));
                }
                steps.push(&nodes);
            }
            TraceRecord::Footer(f) if header.is_some() => footer = Some(f),
            _ => return Err(IoError::Format(format!("line {}: unexpected record", lineno + 1))),
        }
    }
    let header = header.ok_or_else(|| IoError::Format("missing header".into()))?;
    if header.format != TRACE_FORMAT || header.version != FORMAT_VERSION {
        return Err(IoError::Format(format!(
            "expected {TRACE_FORMAT} version {FORMAT_VERSION}, got {} version {}",
            header.format, header.version
        )));
    }
    let footer = footer.ok_or_else(|| IoError::Format("missing footer".into()))?;
    Ok(TraceFile { header, steps, footer })
}

/// Replays a trace file on `g` from the initial coloring and checks that the
/// footer is reproduced. Cycle and step-limit outcomes are accepted when the
/// replay does not end stable.
pub fn verify_trace(g: &Graph, file: &TraceFile) -> Result<DynamicState, IoError> {
    if file.header.graph_hash != graph_hash(g) {
        return Err(IoError::Format("the trace belongs to a different graph".into()));
    }
    let model: Model = file.header.schedule.model;
    let shape = (model != Model::E).then_some(model);
    let res = replay_schedule(g, DynamicState::initial(g), file.steps.iter(), shape)?;
    let t = &res.trace;
    let outcome_ok = match file.footer.outcome {
        Outcome::Stable => t.outcome == Outcome::Stable,
        _ => t.outcome == Outcome::Unfinished,
    };
    if !outcome_ok || t.step_count != file.footer.step_count || t.switch_count != file.footer.switch_count {
        return Err(IoError::Format(format!(
            "replay gives {:?} after {} steps and {} switches, footer says {:?}, {} and {}",
            t.outcome, t.step_count, t.switch_count, file.footer.outcome, file.footer.step_count, file.footer.switch_count
        )));
    }
    Ok(res.state)
}

/// Writes a schedule, one JSON array of node ids per line.
pub fn write_schedule<'a>(mut w: impl Write, steps: impl IntoIterator<Item = &'a [NodeId]>) -> Result<(), IoError> {
    for step in steps {
        serde_json::to_writer(&mut w, step)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

/// Reads a schedule written by [`write_schedule`].
pub fn read_schedule(r: impl BufRead) -> Result<Vec<Vec<NodeId>>, IoError> {
    r.lines()
        .filter(|l| l.as_ref().map_or(true, |l| !l.trim().is_empty()))
        .map(|l| Ok(serde_json::from_str(&l?)?))
        .collect()
}

/// Writes `g` in Graphviz DOT. Nodes are filled with their initial color
/// and labelled with id, role and fixed attachments; pinned nodes are boxes.
pub fn write_dot(mut w: impl Write, g: &Graph, roles: Option<&[Role]>) -> Result<(), IoError> {
    const FILL: [&str; 6] = ["white", "gray25", "lightblue", "lightpink", "palegreen", "khaki"];
    writeln!(w, "graph minproc {{")?;
    writeln!(w, "  node [style=filled, fontsize=10];")?;
    for v in 0..g.node_count() as NodeId {
        let c = g.init_color(v);
        let mut label = v.to_string();
        if let Some(r) = roles.and_then(|r| r.get(v as usize)) {
            label.push_str("\\n");
            label.push_str(r.name());
        }
        let a = g.attachments(v);
        if a != [0, 0] {
            let _ = write!(label, "\\nfixed w{} b{}", a[0], a[1]);
        }
        let fill = FILL.get(c as usize).copied().unwrap_or("gray75");
        let font = if c == 1 { "white" } else { "black" };
        let shape = if g.is_pinned(v) { "box" } else { "ellipse" };
        writeln!(
            w,
            "  {v} [label=\"{label}\", fillcolor={fill}, fontcolor={font}, shape={shape}];"
        )?;
    }
    for (u, v) in g.edges() {
        writeln!(w, "  {u} -- {v};")?;
    }
    writeln!(w, "}}")?;
    Ok(())
}
