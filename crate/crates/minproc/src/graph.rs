//! Immutable graph representation.
//!
//! A [`Graph`] is a simple undirected graph stored in compressed sparse row
//! form. Every node carries an initial color and a `pinned` flag. Nodes may
//! additionally carry *fixed attachments*: pinned degree-1 leaves of a given
//! color that only ever contribute to the balance of the node they hang off.
//! Attachments are stored as per-node counts rather than as explicit nodes,
//! which keeps the large constructions compact; [`Graph::expand_attachments`]
//! turns them into explicit pinned leaves when a literal graph is needed.

use serde::{Deserialize, Serialize};

use crate::error::GraphError;

/// Node identifier. Ids are dense, `0..node_count`.
pub type NodeId = u32;

/// A color index in `0..k`.
pub type Color = u8;

/// Color index 0.
pub const WHITE: Color = 0;
/// Color index 1.
pub const BLACK: Color = 1;

/// Returns the other color of the two-color palette.
#[inline]
pub fn flip(c: Color) -> Color {
    debug_assert!(c < 2);
    c ^ 1
}

/// Pinned leaf attachments of a node: `[white, black]` counts.
pub type Attachments = [u32; 2];

/// A simple undirected graph with initial coloring and pinned flags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    neighbors: Vec<NodeId>,
    init_color: Vec<Color>,
    pinned: Vec<bool>,
    attachments: Vec<Attachments>,
    num_colors: u8,
}

impl Graph {
    /// Builds a graph from an edge list.
    ///
    /// Edges may be given in either orientation; self-loops and duplicate
    /// edges are rejected so that the result is always a simple graph.
    pub fn from_edges(
        init_color: Vec<Color>,
        pinned: Vec<bool>,
        attachments: Vec<Attachments>,
        edges: &[(NodeId, NodeId)],
        num_colors: u8,
    ) -> Result<Self, GraphError> {
        let n = init_color.len();
        if pinned.len() != n || attachments.len() != n {
            return Err(GraphError::LengthMismatch);
        }
        if num_colors < 2 {
            return Err(GraphError::TooFewColors(num_colors));
        }
        if let Some(v) = init_color.iter().position(|&c| c >= num_colors) {
            return Err(GraphError::ColorOutOfRange {
                node: v as NodeId,
                color: init_color[v],
                k: num_colors,
            });
        }
        let mut degree = vec![0usize; n];
        for &(u, v) in edges {
            if u as usize >= n || v as usize >= n {
                return Err(GraphError::NodeOutOfRange {
                    node: u.max(v),
                    node_count: n,
                });
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0usize);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets.clone();
        let mut neighbors = vec![0 as NodeId; offsets[n]];
        for &(u, v) in edges {
            neighbors[fill[u as usize]] = v;
            fill[u as usize] += 1;
            neighbors[fill[v as usize]] = u;
            fill[v as usize] += 1;
        }
        for v in 0..n {
            let list = &mut neighbors[offsets[v]..offsets[v + 1]];
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return Err(GraphError::DuplicateEdge(v as NodeId, w[0]));
            }
        }
        Ok(Graph {
            offsets,
            neighbors,
            init_color,
            pinned,
            attachments,
            num_colors,
        })
    }

    /// Number of explicit nodes (attachments are not counted).
    #[inline]
    pub fn node_count(&self) -> usize {
        self.init_color.len()
    }

    /// Number of explicit edges (attachment edges are not counted).
    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    /// Number of colors in the palette.
    pub fn num_colors(&self) -> u8 {
        self.num_colors
    }

    /// Sorted neighbor list of `v`.
    #[inline]
    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        let v = v as usize;
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    /// Explicit degree of `v`.
    #[inline]
    pub fn explicit_degree(&self, v: NodeId) -> usize {
        let v = v as usize;
        self.offsets[v + 1] - self.offsets[v]
    }

    /// Degree of `v` including its fixed attachments.
    pub fn degree(&self, v: NodeId) -> usize {
        let a = self.attachments[v as usize];
        self.explicit_degree(v) + (a[0] + a[1]) as usize
    }

    /// Maximum degree over all explicit nodes, attachments included.
    pub fn max_degree(&self) -> usize {
        (0..self.node_count() as NodeId)
            .map(|v| self.degree(v))
            .max()
            .unwrap_or(0)
    }

    /// Initial color of `v`.
    #[inline]
    pub fn init_color(&self, v: NodeId) -> Color {
        self.init_color[v as usize]
    }

    /// All initial colors.
    pub fn init_colors(&self) -> &[Color] {
        &self.init_color
    }

    /// Whether `v` is pinned (never switches).
    #[inline]
    pub fn is_pinned(&self, v: NodeId) -> bool {
        self.pinned[v as usize]
    }

    /// Fixed leaf attachments of `v` as `[white, black]`.
    #[inline]
    pub fn attachments(&self, v: NodeId) -> Attachments {
        self.attachments[v as usize]
    }

    /// Whether any node carries fixed attachments.
    pub fn has_attachments(&self) -> bool {
        self.attachments.iter().any(|a| a[0] + a[1] > 0)
    }

    /// Total number of fixed attachments.
    pub fn attachment_count(&self) -> u64 {
        self.attachments
            .iter()
            .map(|a| (a[0] + a[1]) as u64)
            .sum()
    }

    /// Number of non-pinned explicit nodes.
    pub fn unpinned_count(&self) -> usize {
        self.pinned.iter().filter(|&&p| !p).count()
    }

    /// Whether `u` and `v` are adjacent.
    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Every edge once, as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        (0..self.node_count() as NodeId).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| u < v)
                .map(move |v| (u, v))
        })
    }

    /// Replaces every fixed attachment by an explicit pinned leaf node.
    ///
    /// The original nodes keep their ids; leaves are appended in node order,
    /// white leaves before black leaves.
    pub fn expand_attachments(&self) -> Graph {
        let mut colors = self.init_color.clone();
        let mut pinned = self.pinned.clone();
        let mut edges: Vec<(NodeId, NodeId)> = self.edges().collect();
        for v in 0..self.node_count() as NodeId {
            for (c, &count) in self.attachments(v).iter().enumerate() {
                for _ in 0..count {
                    let leaf = colors.len() as NodeId;
                    colors.push(c as Color);
                    pinned.push(true);
                    edges.push((v, leaf));
                }
            }
        }
        let n = colors.len();
        Graph::from_edges(colors, pinned, vec![[0, 0]; n], &edges, self.num_colors)
            .expect("expanding attachments preserves simplicity")
    }
}

/// Summary of a graph's size under both counting conventions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeSummary {
    /// Non-pinned explicit nodes: the usual `n`.
    pub nodes: usize,
    /// Explicit pinned nodes.
    pub pinned_nodes: usize,
    /// Fixed leaf attachments.
    pub attachments: u64,
    /// Explicit edges.
    pub edges: usize,
    /// Maximum degree including attachments.
    pub max_degree: usize,
    /// Node count of the literal form with two shared fixed sets: `3n + 2`.
    pub materialized_nodes: usize,
}

impl SizeSummary {
    /// Computes the summary of `g`.
    pub fn of(g: &Graph) -> Self {
        let nodes = g.unpinned_count();
        SizeSummary {
            nodes,
            pinned_nodes: g.node_count() - nodes,
            attachments: g.attachment_count(),
            edges: g.edge_count(),
            max_degree: g.max_degree(),
            materialized_nodes: 3 * nodes + 2,
        }
    }
}
