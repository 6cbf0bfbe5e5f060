//! Branch-and-prune over interval boxes.
//!
//! Live boxes are kept best-first by volume (largest first, then creation
//! order). Work proceeds in synchronous rounds of a fixed number of boxes;
//! the boxes of one round are processed in parallel and their results
//! merged in pop order, so verdicts and residual sets do not depend on the
//! number of worker threads.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{Read, Seek, SeekFrom, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::arith::Interval;
use super::contract::{bisect, contract, Contraction, Refutation};
use super::newton::{prove_root_near, Certificate, Existence};
use super::shadow::{shadow_check, ShadowResult};
use super::system::{build_constraint_system, ConstraintSystem, IntervalBox, DEFAULT_DELTA};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::graph6;

pub const CHECKPOINT_VERSION: u32 = 1;

/// Existence is tried once per box lineage each time the box width drops
/// below the next threshold in this ladder (the root box always tries).
const EXISTENCE_LADDER: [f64; 4] = [f64::INFINITY, 1.0, 1e-3, 1e-6];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Maximum number of contraction steps (one per processed box).
    pub budget: u64,
    pub delta: f64,
    /// Worker threads; 0 uses the global pool.
    pub workers: usize,
    /// Boxes per synchronous round.
    pub round: usize,
    /// Scale of the existence-test ladder; 1 keeps the defaults.
    pub existence_scale: f64,
    pub prove_existence: bool,
    /// Live boxes kept in memory before the worst half is spilled to disk.
    pub memory_boxes: usize,
    /// Re-check every refutation with exact rational arithmetic.
    pub shadow_check: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            budget: 1_000_000,
            delta: DEFAULT_DELTA,
            workers: 0,
            round: 32,
            existence_scale: 1.0,
            prove_existence: true,
            memory_boxes: 1 << 20,
            shadow_check: false,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub contraction_steps: u64,
    pub refuted: u64,
    pub bisections: u64,
    pub existence_attempts: u64,
    pub peak_live: u64,
    pub spilled: u64,
    pub shadow_checks: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    /// No embedding keeps every pair of non-adjacent vertices `delta` apart
    /// (up to sign).
    ProvedUnembeddable {
        delta: f64,
        stats: SearchStats,
    },
    ProvedEmbeddable {
        certificate: Certificate,
        stats: SearchStats,
    },
    Inconclusive {
        residual: Vec<IntervalBox>,
        stats: SearchStats,
    },
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::ProvedUnembeddable { .. } => "proved-unembeddable",
            Verdict::ProvedEmbeddable { .. } => "proved-embeddable",
            Verdict::Inconclusive { .. } => "inconclusive",
        }
    }

    pub fn stats(&self) -> &SearchStats {
        match self {
            Verdict::ProvedUnembeddable { stats, .. }
            | Verdict::ProvedEmbeddable { stats, .. }
            | Verdict::Inconclusive { stats, .. } => stats,
        }
    }

    pub fn to_json(&self, opts: &SolverOptions) -> serde_json::Value {
        let mut v = serde_json::json!({
            "verdict": self.name(),
            "delta": opts.delta,
            "budget": opts.budget,
            "stats": self.stats(),
        });
        match self {
            Verdict::ProvedEmbeddable { certificate, .. } => v["certificate"] = serde_json::json!(certificate),
            Verdict::Inconclusive { residual, .. } => v["residual_boxes"] = residual.len().into(),
            Verdict::ProvedUnembeddable { .. } => {}
        }
        v
    }
}

/// Residual boxes of an unfinished search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    pub graph6: String,
    pub delta: f64,
    pub stats: SearchStats,
    pub boxes: Vec<IntervalBox>,
}

/// Order-preserving map from `f64` to `i64`.
fn ord_key(x: f64) -> i64 {
    let b = x.to_bits() as i64;
    b ^ (((b >> 63) as u64) >> 1) as i64
}

type Key = (i64, u64);

struct Spill {
    file: File,
    count: u64,
}

impl Spill {
    fn write(&mut self, key: Key, tier: u8, b: &IntervalBox) -> Result<()> {
        let mut buf = Vec::with_capacity(21 + 16 * b.dim());
        buf.extend(key.0.to_le_bytes());
        buf.extend(key.1.to_le_bytes());
        buf.push(tier);
        buf.extend((b.dim() as u32).to_le_bytes());
        for iv in &b.0 {
            buf.extend(iv.lo.to_le_bytes());
            buf.extend(iv.hi.to_le_bytes());
        }
        self.file.write_all(&buf)?;
        self.count += 1;
        Ok(())
    }

    fn drain(&mut self) -> Result<Vec<(Key, u8, IntervalBox)>> {
        self.file.seek(SeekFrom::Start(0))?;
        let mut bytes = Vec::new();
        self.file.read_to_end(&mut bytes)?;
        self.file.set_len(0)?;
        self.file.seek(SeekFrom::Start(0))?;
        self.count = 0;
        let mut out = Vec::new();
        let mut at = 0;
        let take = |at: &mut usize, k: usize| {
            let s = &bytes[*at..*at + k];
            *at += k;
            s
        };
        while at < bytes.len() {
            let k0 = i64::from_le_bytes(take(&mut at, 8).try_into().expect("8 bytes"));
            let k1 = u64::from_le_bytes(take(&mut at, 8).try_into().expect("8 bytes"));
            let tier = take(&mut at, 1)[0];
            let dim = u32::from_le_bytes(take(&mut at, 4).try_into().expect("4 bytes")) as usize;
            let mut v = Vec::with_capacity(dim);
            for _ in 0..dim {
                let lo = f64::from_le_bytes(take(&mut at, 8).try_into().expect("8 bytes"));
                let hi = f64::from_le_bytes(take(&mut at, 8).try_into().expect("8 bytes"));
                v.push(Interval::new(lo, hi));
            }
            out.push(((k0, k1), tier, IntervalBox(v)));
        }
        Ok(out)
    }
}

enum Processed {
    Refuted(Refutation),
    Certified(Certificate),
    Split(u8, IntervalBox, IntervalBox),
    Stuck(IntervalBox),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoundOutcome {
    Continue,
    /// Every box was refuted or is stuck.
    Exhausted,
    Certified,
    BudgetSpent,
}

/// Resumable branch-and-prune state.
pub struct BranchAndPrune<'a> {
    cs: &'a ConstraintSystem,
    opts: SolverOptions,
    live: BTreeMap<Key, (u8, IntervalBox)>,
    spill: Option<Spill>,
    stuck: Vec<IntervalBox>,
    seq: u64,
    steps_this_run: u64,
    pub stats: SearchStats,
    certificate: Option<Certificate>,
    pool: Option<rayon::ThreadPool>,
}

impl<'a> BranchAndPrune<'a> {
    pub fn new(cs: &'a ConstraintSystem, opts: SolverOptions) -> Result<Self> {
        Self::from_boxes(cs, opts, vec![(0, cs.domain.clone())], SearchStats::default())
    }

    fn from_boxes(
        cs: &'a ConstraintSystem,
        opts: SolverOptions,
        boxes: Vec<(u8, IntervalBox)>,
        stats: SearchStats,
    ) -> Result<Self> {
        if opts.round == 0 {
            return Err(Error::InvalidSpec("round size must be positive".into()));
        }
        let pool = if opts.workers > 0 {
            Some(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(opts.workers)
                    .build()
                    .map_err(|e| Error::InvalidSpec(e.to_string()))?,
            )
        } else {
            None
        };
        let mut s = BranchAndPrune {
            cs,
            opts,
            live: BTreeMap::new(),
            spill: None,
            stuck: Vec::new(),
            seq: 0,
            steps_this_run: 0,
            stats,
            certificate: None,
            pool,
        };
        for (tier, b) in boxes {
            s.push(tier, b)?;
        }
        Ok(s)
    }

    fn push(&mut self, tier: u8, b: IntervalBox) -> Result<()> {
        let key = (ord_key(-b.log_volume()), self.seq);
        self.seq += 1;
        self.live.insert(key, (tier, b));
        self.stats.peak_live = self.stats.peak_live.max(self.live.len() as u64);
        if self.live.len() > self.opts.memory_boxes.max(2) {
            if self.spill.is_none() {
                self.spill = Some(Spill { file: tempfile::tempfile()?, count: 0 });
            }
            let spill = self.spill.as_mut().expect("created above");
            while self.live.len() > self.opts.memory_boxes.max(2) / 2 {
                let (k, (t, b)) = self.live.pop_last().expect("nonempty");
                spill.write(k, t, &b)?;
                self.stats.spilled += 1;
            }
        }
        Ok(())
    }

    fn refill(&mut self) -> Result<()> {
        if self.live.is_empty() {
            if let Some(spill) = self.spill.as_mut() {
                if spill.count > 0 {
                    for (k, t, b) in spill.drain()? {
                        self.live.insert(k, (t, b));
                    }
                }
            }
        }
        Ok(())
    }

    /// Boxes still to be processed, in memory, in processing order.
    pub fn live_boxes(&self) -> impl Iterator<Item = &IntervalBox> {
        self.live.values().map(|(_, b)| b)
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        self.certificate.as_ref()
    }

    fn process(
        cs: &ConstraintSystem,
        opts: &SolverOptions,
        whole: &IntervalBox,
        tier: u8,
        b: &IntervalBox,
    ) -> (Processed, bool) {
        let nb = match contract(b, cs) {
            Contraction::Empty(r) => return (Processed::Refuted(r), false),
            Contraction::Narrowed(nb) => nb,
        };
        let mut tier = tier;
        let mut attempted = false;
        if opts.prove_existence && (tier as usize) < EXISTENCE_LADDER.len() {
            let threshold = EXISTENCE_LADDER[tier as usize] * opts.existence_scale;
            if nb.max_width() <= threshold {
                attempted = true;
                tier += 1;
                let starts = if tier == 1 { 16 } else { 2 };
                if let Existence::Certified(c) = prove_root_near(&nb, whole, cs, starts) {
                    return (Processed::Certified(c), true);
                }
            }
        }
        match bisect(&nb) {
            Ok((l, r)) => (Processed::Split(tier, l, r), attempted),
            Err(_) => (Processed::Stuck(nb), attempted),
        }
    }

    /// Processes up to one round of boxes.
    pub fn step_round(&mut self) -> Result<RoundOutcome> {
        if self.certificate.is_some() {
            return Ok(RoundOutcome::Certified);
        }
        self.refill()?;
        if self.live.is_empty() {
            return Ok(RoundOutcome::Exhausted);
        }
        let left = self.opts.budget.saturating_sub(self.steps_this_run);
        if left == 0 {
            return Ok(RoundOutcome::BudgetSpent);
        }
        let take = (self.opts.round as u64).min(left) as usize;
        let mut batch = Vec::with_capacity(take);
        while batch.len() < take {
            match self.live.pop_first() {
                Some((_, tb)) => batch.push(tb),
                None => break,
            }
        }
        let (cs, opts) = (self.cs, &self.opts);
        // The hemisphere domain is a symmetry reduction only: a root anywhere
        // that meets every constraint is an embedding.
        let whole = IntervalBox(vec![Interval::ENTIRE; cs.num_vars()]);
        let run = || -> Vec<(Processed, bool)> {
            batch.par_iter().map(|(t, b)| Self::process(cs, opts, &whole, *t, b)).collect()
        };
        let results = match &self.pool {
            Some(p) => p.install(run),
            None => run(),
        };
        self.stats.contraction_steps += batch.len() as u64;
        self.steps_this_run += batch.len() as u64;
        for (res, attempted) in results {
            if attempted {
                self.stats.existence_attempts += 1;
            }
            match res {
                Processed::Refuted(r) => {
                    self.stats.refuted += 1;
                    if self.opts.shadow_check {
                        self.stats.shadow_checks += 1;
                        if shadow_check(self.cs, &r, 64, self.stats.refuted) == ShadowResult::Contradicted {
                            return Err(Error::ShadowMismatch { constraint: r.constraint });
                        }
                    }
                }
                Processed::Certified(c) => {
                    if self.certificate.is_none() {
                        self.certificate = Some(c);
                    }
                }
                Processed::Split(t, l, r) => {
                    self.stats.bisections += 1;
                    self.push(t, l)?;
                    self.push(t, r)?;
                }
                Processed::Stuck(b) => self.stuck.push(b),
            }
        }
        if self.certificate.is_some() {
            return Ok(RoundOutcome::Certified);
        }
        self.refill()?;
        Ok(if self.live.is_empty() { RoundOutcome::Exhausted } else { RoundOutcome::Continue })
    }

    /// Runs rounds until a verdict or the budget is reached.
    pub fn run(mut self) -> Result<Verdict> {
        loop {
            match self.step_round()? {
                RoundOutcome::Continue => {}
                RoundOutcome::Certified => {
                    let certificate = self.certificate.take().expect("certified");
                    return Ok(Verdict::ProvedEmbeddable { certificate, stats: self.stats });
                }
                RoundOutcome::Exhausted if self.stuck.is_empty() => {
                    return Ok(Verdict::ProvedUnembeddable { delta: self.cs.delta, stats: self.stats });
                }
                RoundOutcome::Exhausted | RoundOutcome::BudgetSpent => {
                    let mut residual: Vec<IntervalBox> =
                        std::mem::take(&mut self.live).into_values().map(|(_, b)| b).collect();
                    if let Some(spill) = self.spill.as_mut() {
                        residual.extend(spill.drain()?.into_iter().map(|(_, _, b)| b));
                    }
                    residual.append(&mut self.stuck);
                    return Ok(Verdict::Inconclusive { residual, stats: self.stats });
                }
            }
        }
    }
}

/// Runs branch-and-prune on a prepared system.
pub fn decide_system(cs: &ConstraintSystem, opts: &SolverOptions) -> Result<Verdict> {
    if !cs.pinned_violations.is_empty() {
        return Ok(Verdict::ProvedUnembeddable { delta: cs.delta, stats: SearchStats::default() });
    }
    BranchAndPrune::new(cs, opts.clone())?.run()
}

fn trivial_certificate() -> Certificate {
    Certificate {
        enclosure: IntervalBox(Vec::new()),
        root_box: IntervalBox(Vec::new()),
        pivots: Vec::new(),
        equations: Vec::new(),
    }
}

/// Decides whether `g` embeds as unit vectors with adjacent vertices
/// orthogonal and non-adjacent vertices at least `opts.delta` apart up to
/// sign.
pub fn decide_embeddability(g: &Graph, opts: &SolverOptions) -> Result<Verdict> {
    if g.edge_count() == 0 {
        return Ok(Verdict::ProvedEmbeddable { certificate: trivial_certificate(), stats: SearchStats::default() });
    }
    let cs = build_constraint_system(g, opts.delta)?;
    decide_system(&cs, opts)
}

impl Checkpoint {
    pub fn new(g: &Graph, opts: &SolverOptions, verdict: &Verdict) -> Option<Self> {
        match verdict {
            Verdict::Inconclusive { residual, stats } => Some(Checkpoint {
                version: CHECKPOINT_VERSION,
                graph6: graph6::encode(g),
                delta: opts.delta,
                stats: stats.clone(),
                boxes: residual.clone(),
            }),
            _ => None,
        }
    }
}

/// Continues an inconclusive search from its residual boxes; `opts.budget`
/// counts the new steps only.
pub fn resume_embeddability(g: &Graph, checkpoint: &Checkpoint, opts: &SolverOptions) -> Result<Verdict> {
    if checkpoint.version != CHECKPOINT_VERSION {
        return Err(Error::InvalidSpec(format!("checkpoint version {} unsupported", checkpoint.version)));
    }
    if checkpoint.graph6 != graph6::encode(g) || checkpoint.delta != opts.delta {
        return Err(Error::InvalidSpec("checkpoint belongs to a different graph or separation".into()));
    }
    let cs = build_constraint_system(g, opts.delta)?;
    if checkpoint.boxes.iter().any(|b| b.dim() != cs.num_vars()) {
        return Err(Error::InvalidSpec("checkpoint box dimension mismatch".into()));
    }
    let boxes = checkpoint.boxes.iter().map(|b| (1u8, b.clone())).collect();
    BranchAndPrune::from_boxes(&cs, opts.clone(), boxes, checkpoint.stats.clone())?.run()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_order() {
        let xs = [-3.5, -1.0, -0.0, 0.0, 1e-300, 2.0, 7.5];
        for w in xs.windows(2) {
            assert!(ord_key(w[0]) <= ord_key(w[1]));
        }
    }

    #[test]
    fn square_refuted() {
        let v = decide_embeddability(&Graph::cycle(4).unwrap(), &SolverOptions::default()).unwrap();
        assert!(matches!(v, Verdict::ProvedUnembeddable { .. }), "{v:?}");
    }

    #[test]
    fn triangle_embeds() {
        let v = decide_embeddability(&Graph::complete(3).unwrap(), &SolverOptions::default()).unwrap();
        assert!(matches!(v, Verdict::ProvedEmbeddable { .. }));
    }

    #[test]
    fn spill_keeps_every_box() {
        let g = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let cs = build_constraint_system(&g, DEFAULT_DELTA).unwrap();
        for memory_boxes in [4, 1 << 20] {
            let opts =
                SolverOptions { memory_boxes, round: 4, prove_existence: false, budget: 200, ..Default::default() };
            let Verdict::Inconclusive { residual, stats } = BranchAndPrune::new(&cs, opts).unwrap().run().unwrap()
            else {
                panic!("no existence proofs were allowed")
            };
            assert_eq!(residual.len() as u64, 1 + stats.bisections - stats.refuted);
            assert_eq!(stats.spilled > 0, memory_boxes == 4);
        }
    }
}
