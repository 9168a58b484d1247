//! Growth tables of the benevolent family and their log-log slope.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::constructions::build_recursive;
use crate::engine::{run, Outcome, PolicyKind, RunLimits, ScheduleModel};
use crate::error::{BuildError, EngineError, IoError};
use crate::state::DynamicState;

/// One row of a growth table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthRow {
    /// Construction parameter `r`.
    pub r: u32,
    /// Number of recharging levels.
    pub depth: u32,
    /// Non-fixed node count.
    pub n: usize,
    /// Model-B steps to stabilization (every step is one switch).
    pub steps: u64,
}

/// Errors of [`growth_table`].
#[derive(Debug, thiserror::Error)]
pub enum StatsError {
    /// An instance could not be built.
    #[error(transparent)]
    Build(#[from] BuildError),
    /// A run failed.
    #[error(transparent)]
    Engine(#[from] EngineError),
    /// A run did not stabilize.
    #[error("r = {r}: run ended {outcome:?}")]
    Unstable {
        /// The parameter.
        r: u32,
        /// How the run ended.
        outcome: Outcome,
    },
}

/// Builds the instance for every `r` and runs it under model B with the
/// lowest-id policy. Rows come out in the order of `rs`.
pub fn growth_table(rs: &[u32], depth: u32) -> Result<Vec<GrowthRow>, StatsError> {
    rs.iter().map(|&r| growth_row(r, depth)).collect()
}

/// One row of [`growth_table`].
pub fn growth_row(r: u32, depth: u32) -> Result<GrowthRow, StatsError> {
    let inst = build_recursive(r, depth)?;
    let g = &inst.built.graph;
    let res = run(
        g,
        DynamicState::initial(g),
        &ScheduleModel::benevolent(PolicyKind::LowestId),
        &RunLimits::default(),
    )?;
    if res.trace.outcome != Outcome::Stable {
        return Err(StatsError::Unstable {
            r,
            outcome: res.trace.outcome,
        });
    }
    Ok(GrowthRow {
        r,
        depth: inst.depth,
        n: g.unpinned_count(),
        steps: res.trace.switch_count,
    })
}

/// Least-squares slope of `ln y` against `ln x`; `None` with fewer than two
/// distinct `x` values or any non-positive value.
pub fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0)) {
        return None;
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let k = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / k;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (logs.len() >= 2 && sxx > 0.0).then(|| sxy / sxx)
}

/// Slope of steps against nodes over `rows`.
pub fn growth_slope(rows: &[GrowthRow]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.n as f64, r.steps as f64)).collect();
    log_log_slope(&pts)
}

/// Writes `rows` as CSV with header `r,depth,n,steps`.
pub fn write_csv(w: impl Write, rows: &[GrowthRow]) -> Result<(), IoError> {
    let mut wr = csv::Writer::from_writer(w);
    for row in rows {
        wr.serialize(row)?;
    }
    wr.flush()?;
    Ok(())
}

/// Reads rows written by [`write_csv`].
pub fn read_csv(r: impl std::io::Read) -> Result<Vec<GrowthRow>, IoError> {
    csv::Reader::from_reader(r)
        .deserialize()
        .map(|row| row.map_err(IoError::from))
        .collect()
}
