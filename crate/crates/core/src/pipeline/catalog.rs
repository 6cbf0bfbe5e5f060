//! Catalog records: one JSON line per graph.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::colouring::{candidate_filter, is_k_colourable, solve_101, FilterResult, RejectReason};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::graph6;
use crate::grid::{grid_embed, GridDirection, GridEmbedding, GridSystem, DEFAULT_EMBED_NODE_LIMIT};
use crate::interval::{decide_embeddability, SolverOptions, Verdict};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Flags {
    pub square_free: bool,
    pub connected: bool,
    pub min_degree_3: bool,
    pub every_vertex_in_triangle: bool,
    pub three_colourable: bool,
    pub four_colourable: bool,
    pub colourable_101: bool,
}

impl Flags {
    pub fn of(g: &Graph) -> Self {
        let three = is_k_colourable(g, 3);
        Flags {
            square_free: g.is_square_free(),
            connected: g.is_connected(),
            min_degree_3: g.min_degree() >= 3,
            every_vertex_in_triangle: g.every_vertex_in_triangle(),
            three_colourable: three,
            four_colourable: three || is_k_colourable(g, 4),
            colourable_101: three || solve_101(g).is_colourable(),
        }
    }

    /// Implications that hold for every graph.
    pub fn consistent(&self) -> bool {
        !self.three_colourable || (self.four_colourable && self.colourable_101)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum GridResult {
    Embedded {
        grid_n: u32,
        map: Vec<[i32; 3]>,
    },
    /// No embedding on any grid of the ladder up to `grid_n`.
    NoneUpTo {
        grid_n: u32,
    },
    /// The node limit was hit on grid `grid_n`.
    Undecided {
        grid_n: u32,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalSummary {
    pub verdict: String,
    pub delta: f64,
    pub budget: u64,
    pub contraction_steps: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual_boxes: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogRecord {
    pub graph6: String,
    pub n: usize,
    pub flags: Flags,
    /// `pass` or the first failed candidate condition.
    pub filter: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interval: Option<IntervalSummary>,
    /// Seconds since the epoch; dropped by compaction.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
    pub tool_version: String,
}

/// What happens to graphs that are not 101-colourable.
#[derive(Debug, Clone)]
pub struct StagePlan<'a> {
    pub grids: &'a [GridSystem],
    pub interval: SolverOptions,
}

fn now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

/// Runs every stage on `g`.
pub fn classify(g: &Graph, plan: &StagePlan) -> Result<CatalogRecord> {
    let flags = Flags::of(g);
    let filter = match candidate_filter(g) {
        FilterResult::Pass => "pass".to_string(),
        FilterResult::Reject(r) => r.to_string(),
    };
    let mut rec = CatalogRecord {
        graph6: graph6::encode(g),
        n: g.n(),
        flags,
        filter,
        grid: None,
        interval: None,
        timestamp: Some(now()),
        tool_version: TOOL_VERSION.to_string(),
    };
    if flags.colourable_101 {
        return Ok(rec);
    }
    let mut grid = None;
    for sys in plan.grids {
        match grid_embed(g, sys, DEFAULT_EMBED_NODE_LIMIT) {
            Ok(out) => {
                if let Some(e) = out.embedding() {
                    grid = Some(GridResult::Embedded {
                        grid_n: e.grid_n,
                        map: e.map.iter().map(|d| d.to_array()).collect(),
                    });
                    break;
                }
                grid = Some(GridResult::NoneUpTo { grid_n: sys.n() });
            }
            Err(Error::BudgetExceeded { .. }) => {
                grid = Some(GridResult::Undecided { grid_n: sys.n() });
                break;
            }
            Err(e) => return Err(e),
        }
    }
    let embedded = matches!(grid, Some(GridResult::Embedded { .. }));
    rec.grid = grid;
    if !embedded && g.is_square_free() {
        let v = decide_embeddability(g, &plan.interval)?;
        rec.interval = Some(IntervalSummary {
            verdict: v.name().to_string(),
            delta: plan.interval.delta,
            budget: plan.interval.budget,
            contraction_steps: v.stats().contraction_steps,
            residual_boxes: match &v {
                Verdict::Inconclusive { residual, .. } => Some(residual.len()),
                _ => None,
            },
        });
    }
    Ok(rec)
}

/// Re-derives everything a record claims. Returns the first discrepancy.
pub fn validate_record(rec: &CatalogRecord) -> std::result::Result<(), String> {
    let g = graph6::decode(&rec.graph6).map_err(|e| format!("{}: {e}", rec.graph6))?;
    if g.n() != rec.n {
        return Err(format!("{}: n is {} not {}", rec.graph6, g.n(), rec.n));
    }
    if !rec.flags.consistent() {
        return Err(format!("{}: inconsistent flags", rec.graph6));
    }
    let fresh = Flags::of(&g);
    if fresh != rec.flags {
        return Err(format!("{}: flags {:?} do not re-validate", rec.graph6, rec.flags));
    }
    if let Some(GridResult::Embedded { grid_n, map }) = &rec.grid {
        let e =
            GridEmbedding { grid_n: *grid_n, map: map.iter().map(|a| GridDirection::new(a[0], a[1], a[2])).collect() };
        if !e.validate(&g) {
            return Err(format!("{}: grid witness does not validate", rec.graph6));
        }
        if !fresh.four_colourable {
            return Err(format!("{}: embedded but not 4-colourable", rec.graph6));
        }
    }
    Ok(())
}

pub fn reject_reason(rec: &CatalogRecord) -> Option<RejectReason> {
    [
        RejectReason::Square,
        RejectReason::MinDegree,
        RejectReason::VertexNotInTriangle,
        RejectReason::ThreeColourable,
        RejectReason::NotFourColourable,
    ]
    .into_iter()
    .find(|r| r.to_string() == rec.filter)
}

pub fn write_records(path: &Path, records: &[CatalogRecord]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut w = BufWriter::new(File::create(&tmp)?);
        for r in records {
            serde_json::to_writer(&mut w, r)?;
            w.write_all(b"\n")?;
        }
        w.into_inner().map_err(|e| e.into_error())?.sync_all()?;
    }
    std::fs::rename(tmp, path)?;
    Ok(())
}

pub fn read_records(path: &Path) -> Result<Vec<CatalogRecord>> {
    let mut out = Vec::new();
    for line in BufReader::new(File::open(path)?).lines() {
        let line = line?;
        if !line.trim().is_empty() {
            out.push(serde_json::from_str(&line)?);
        }
    }
    Ok(out)
}

/// Sorted by graph6, one record per graph, timestamps removed.
pub fn compact_records(mut records: Vec<CatalogRecord>) -> Vec<CatalogRecord> {
    for r in &mut records {
        r.timestamp = None;
    }
    records.sort_by(|a, b| a.graph6.cmp(&b.graph6));
    records.dedup_by(|a, b| a.graph6 == b.graph6);
    records
}
