//! Enumerate, filter, colour and embed, with a resumable on-disk catalog.
//!
//! Layout of an output directory:
//!
//! ```text
//! job.json        the JobSpec
//! shards/         one JSON-lines shard per finished ticket
//! done.log        one JSON line per finished ticket (written after its shard)
//! catalog.jsonl   compacted records, sorted by graph6, no timestamps
//! summary.json    per-n counts
//! ```
//!
//! A ticket counts as finished only once its line is in `done.log`; shards
//! are written to a temporary name and renamed, so an interrupted run leaves
//! no partial shard behind and resuming redoes only unfinished tickets.

pub mod catalog;
pub mod random;
pub mod report;
pub mod verify;

use std::collections::{BTreeMap, HashSet};
use std::fs::{self, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use catalog::{classify, validate_record, CatalogRecord, Flags, GridResult, IntervalSummary, StagePlan};
pub use report::report_counts;
pub use verify::{verify_known, BundleReport, BUNDLES};

use crate::enumerate::{enumerate_with, tickets, Filters, DEFAULT_SPLIT_DEPTH};
use crate::error::{Error, Result};
use crate::graph::MAX_VERTICES;
use crate::grid::{generate_grid, MAX_GRID_N};
use crate::interval::{SolverOptions, DEFAULT_DELTA};

pub const DEFAULT_GRID_LADDER: [u32; 6] = [1, 2, 3, 4, 5, 8];
pub const DEFAULT_INTERVAL_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobSpec {
    pub n_min: usize,
    pub n_max: usize,
    pub filters: Filters,
    pub grid_ladder: Vec<u32>,
    pub interval_budget: u64,
    pub delta: f64,
    pub tickets_depth: usize,
    pub workers: usize,
    pub out_dir: PathBuf,
}

impl JobSpec {
    pub fn new(n_min: usize, n_max: usize, out_dir: impl Into<PathBuf>) -> Self {
        JobSpec {
            n_min,
            n_max,
            filters: Filters::CONNECTED_SQUARE_FREE,
            grid_ladder: DEFAULT_GRID_LADDER.to_vec(),
            interval_budget: DEFAULT_INTERVAL_BUDGET,
            delta: DEFAULT_DELTA,
            tickets_depth: DEFAULT_SPLIT_DEPTH,
            workers: 0,
            out_dir: out_dir.into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpec(m));
        if self.n_min == 0 || self.n_min > self.n_max || self.n_max > MAX_VERTICES {
            return bad(format!("vertex range {}..={} not within 1..={MAX_VERTICES}", self.n_min, self.n_max));
        }
        if self.grid_ladder.is_empty() || self.grid_ladder.windows(2).any(|w| w[0] >= w[1]) {
            return bad("grid ladder must be nonempty and strictly increasing".into());
        }
        if self.grid_ladder.iter().any(|&n| n == 0 || n > MAX_GRID_N) {
            return bad(format!("grid parameters must lie in 1..={MAX_GRID_N}"));
        }
        if !(self.delta > 0.0 && self.delta < 2.0) {
            return bad(format!("delta {} outside (0, 2)", self.delta));
        }
        if self.interval_budget == 0 {
            return bad("interval budget must be positive".into());
        }
        if self.tickets_depth == 0 {
            return bad("ticket depth must be positive".into());
        }
        Ok(())
    }

    /// Everything that determines the catalog contents.
    fn same_job(&self, o: &JobSpec) -> bool {
        JobSpec { workers: 0, out_dir: PathBuf::new(), ..self.clone() }
            == JobSpec { workers: 0, out_dir: PathBuf::new(), ..o.clone() }
    }

    fn interval_options(&self) -> SolverOptions {
        SolverOptions { budget: self.interval_budget, delta: self.delta, ..SolverOptions::default() }
    }
}

/// Limits for partial runs.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunControl {
    /// Stop after this many tickets have been started in this invocation.
    pub max_tickets: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct DoneEntry {
    n: usize,
    ticket: String,
    count: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountRow {
    pub count: u64,
    pub not_101_colourable: u64,
    pub candidates: u64,
    pub grid_embedded: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunSummary {
    pub complete: bool,
    pub tickets_total: usize,
    pub tickets_done: usize,
    /// Tickets that failed in this invocation, with their errors.
    pub failed: Vec<(String, String)>,
    /// Sum of per-ticket counts from the done log.
    pub ticket_count_sum: u64,
    pub per_n: BTreeMap<usize, CountRow>,
    /// graph6 of every record that is not 101-colourable.
    pub uncolourable: Vec<String>,
    /// Graphs certified embeddable by the interval stage that no grid on the
    /// ladder embeds. Reported only; expected to stay empty.
    pub grid_gap: Vec<String>,
}

fn shard_name(n: usize, ticket: &str) -> String {
    format!("n{n:02}-{}.jsonl", ticket.replace(':', "-"))
}

fn read_done(path: &Path) -> Result<Vec<DoneEntry>> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for line in BufReader::new(fs::File::open(path)?).lines() {
        // A torn final line from a crash is ignored; its ticket is redone.
        if let Ok(e) = serde_json::from_str::<DoneEntry>(&line?) {
            out.push(e);
        }
    }
    Ok(out)
}

/// Runs (or resumes) a job and compacts the catalog when every ticket is
/// done.
pub fn run_search(spec: &JobSpec, resume: bool, control: RunControl) -> Result<RunSummary> {
    spec.validate()?;
    let dir = &spec.out_dir;
    let job_path = dir.join("job.json");
    if job_path.exists() {
        if !resume {
            return Err(Error::InvalidSpec(format!(
                "{} already holds a job; resume it or pick another directory",
                dir.display()
            )));
        }
        let old: JobSpec = serde_json::from_str(&fs::read_to_string(&job_path)?)?;
        if !spec.same_job(&old) {
            return Err(Error::InvalidSpec("resumed job differs from the stored job.json".into()));
        }
    } else {
        fs::create_dir_all(dir)?;
        fs::write(&job_path, serde_json::to_string_pretty(spec)? + "\n")?;
    }
    let shards = dir.join("shards");
    fs::create_dir_all(&shards)?;
    let done_path = dir.join("done.log");
    let done: HashSet<(usize, String)> = read_done(&done_path)?.into_iter().map(|e| (e.n, e.ticket)).collect();

    let mut work = Vec::new();
    let mut total = 0;
    for n in spec.n_min..=spec.n_max {
        for t in tickets(n, spec.tickets_depth, spec.filters) {
            total += 1;
            if !done.contains(&(n, t.id())) {
                work.push((n, t));
            }
        }
    }

    let grids = spec.grid_ladder.iter().map(|&n| generate_grid(n)).collect::<Result<Vec<_>>>()?;
    let plan = StagePlan { grids: &grids, interval: spec.interval_options() };
    let done_log = Mutex::new(OpenOptions::new().create(true).append(true).open(&done_path)?);
    let started = AtomicUsize::new(0);
    let failed = Mutex::new(Vec::new());

    let run_ticket = |n: usize, t: &crate::enumerate::SubtreeTicket| -> Result<()> {
        let mut records = Vec::new();
        let mut err = None;
        enumerate_with(n, spec.filters, Some(t), |g| {
            if err.is_none() {
                match classify(g, &plan) {
                    Ok(r) => records.push(r),
                    Err(e) => err = Some(e),
                }
            }
        })?;
        if let Some(e) = err {
            return Err(e);
        }
        catalog::write_records(&shards.join(shard_name(n, &t.id())), &records)?;
        let entry = DoneEntry { n, ticket: t.id(), count: records.len() as u64 };
        let mut f = done_log.lock().expect("done log lock");
        writeln!(f, "{}", serde_json::to_string(&entry)?)?;
        f.sync_data()?;
        Ok(())
    };
    let body = || {
        work.par_iter().for_each(|(n, t)| {
            let k = started.fetch_add(1, Ordering::SeqCst);
            if control.max_tickets.is_some_and(|m| k >= m) {
                return;
            }
            if let Err(e) = run_ticket(*n, t) {
                failed.lock().expect("failure list lock").push((format!("{n}/{}", t.id()), e.to_string()));
            }
        })
    };
    if spec.workers > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(spec.workers)
            .build()
            .map_err(|e| Error::InvalidSpec(e.to_string()))?
            .install(body);
    } else {
        body();
    }

    let mut failed = failed.into_inner().expect("failure list lock");
    failed.sort();
    let entries = read_done(&done_path)?;
    let finished: HashSet<(usize, String)> = entries.iter().map(|e| (e.n, e.ticket.clone())).collect();
    let mut summary = RunSummary {
        complete: finished.len() == total,
        tickets_total: total,
        tickets_done: finished.len(),
        failed,
        ticket_count_sum: 0,
        per_n: BTreeMap::new(),
        uncolourable: Vec::new(),
        grid_gap: Vec::new(),
    };
    if summary.complete {
        let mut seen = HashSet::new();
        summary.ticket_count_sum =
            entries.iter().filter(|e| seen.insert((e.n, e.ticket.clone()))).map(|e| e.count).sum();
        let records = compact(dir, &entries)?;
        fill_counts(&mut summary, &records);
        fs::write(dir.join("summary.json"), serde_json::to_string_pretty(&summary)? + "\n")?;
    }
    Ok(summary)
}

fn compact(dir: &Path, entries: &[DoneEntry]) -> Result<Vec<CatalogRecord>> {
    let mut records = Vec::new();
    let mut seen = HashSet::new();
    for e in entries {
        if seen.insert((e.n, e.ticket.clone())) {
            records.extend(catalog::read_records(&dir.join("shards").join(shard_name(e.n, &e.ticket)))?);
        }
    }
    let records = catalog::compact_records(records);
    catalog::write_records(&dir.join("catalog.jsonl"), &records)?;
    Ok(records)
}

fn fill_counts(summary: &mut RunSummary, records: &[CatalogRecord]) {
    for r in records {
        let row = summary.per_n.entry(r.n).or_default();
        row.count += 1;
        if r.filter == "pass" {
            row.candidates += 1;
        }
        if !r.flags.colourable_101 {
            row.not_101_colourable += 1;
            summary.uncolourable.push(r.graph6.clone());
        }
        if matches!(r.grid, Some(GridResult::Embedded { .. })) {
            row.grid_embedded += 1;
        } else if r.interval.as_ref().is_some_and(|i| i.verdict == "proved-embeddable") {
            summary.grid_gap.push(r.graph6.clone());
        }
    }
}

/// The compacted catalog of a finished job.
pub fn load_catalog(dir: &Path) -> Result<Vec<CatalogRecord>> {
    let path = if dir.is_dir() { dir.join("catalog.jsonl") } else { dir.to_path_buf() };
    catalog::read_records(&path)
}
