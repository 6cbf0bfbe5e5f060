//! Named bundles of known results, each a list of pass/fail checks.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::canon::{canonical_label, is_canonical, DEFAULT_NODE_LIMIT};
use crate::colouring::{solve_101_problem, Outcome101};
use crate::enumerate::{enumerate, enumerate_with, Filters};
use crate::error::{Error, Result};
use crate::graph6;
use crate::grid::{
    direction_count, generate_grid, grid_embed, is_critical, minimize_uncolourable_with_order, DEFAULT_EMBED_NODE_LIMIT,
};
use crate::oracle::{brute_force_canonical_code, brute_force_classes};

pub const BUNDLES: [&str; 5] =
    ["grid-counts", "odd-grid-colourability", "n2-critical-31", "counts-vs-oracle", "connected-prefixes"];

/// Isomorphism classes of all graphs on `n` vertices, `n = 1..=8`.
const GRAPH_COUNTS: [u64; 8] = [1, 2, 4, 11, 34, 156, 1044, 12346];

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct BundleReport {
    pub name: String,
    pub checks: Vec<Check>,
    pub artifacts: serde_json::Value,
    pub seconds: f64,
}

impl BundleReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

struct Checks(Vec<Check>);

impl Checks {
    fn add(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.0.push(Check { name: name.into(), passed, detail: detail.into() });
    }
}

pub fn verify_known(name: &str) -> Result<BundleReport> {
    let start = Instant::now();
    let mut checks = Checks(Vec::new());
    let artifacts = match name {
        "grid-counts" => grid_counts(&mut checks)?,
        "odd-grid-colourability" => odd_grids(&mut checks)?,
        "n2-critical-31" => n2_critical(&mut checks)?,
        "counts-vs-oracle" => counts_vs_oracle(&mut checks)?,
        "connected-prefixes" => connected_prefixes(&mut checks)?,
        other => return Err(Error::UnknownBundle(other.to_string())),
    };
    Ok(BundleReport { name: name.to_string(), checks: checks.0, artifacts, seconds: start.elapsed().as_secs_f64() })
}

fn raw_direction_count(n: i32) -> usize {
    let mut surface = 0;
    for x in -n..=n {
        for y in -n..=n {
            for z in -n..=n {
                if x.abs().max(y.abs()).max(z.abs()) == n {
                    surface += 1;
                }
            }
        }
    }
    surface / 2
}

fn grid_counts(c: &mut Checks) -> Result<serde_json::Value> {
    let mut counts = Vec::new();
    for n in 1..=12u32 {
        let k = 2 * n as usize;
        let formula = ((k + 1).pow(3) - (k - 1).pow(3)) / 2;
        let got = generate_grid(n)?.len();
        c.add(format!("N={n} formula"), got == formula && direction_count(n) == formula, format!("{got} vs {formula}"));
        if n <= 4 {
            let raw = raw_direction_count(n as i32);
            c.add(format!("N={n} raw points"), got == raw, format!("{got} vs {raw}"));
        }
        counts.push(got);
    }
    for (n, want) in [(1, 13), (2, 49), (4, 193)] {
        c.add(format!("N={n} is {want}"), counts[n - 1] == want, counts[n - 1].to_string());
    }
    Ok(serde_json::json!({ "counts": counts }))
}

fn odd_grids(c: &mut Checks) -> Result<serde_json::Value> {
    let mut witnesses = serde_json::Map::new();
    for n in (1..=15u32).step_by(2) {
        let sys = generate_grid(n)?;
        let p = sys.problem();
        let (out, _) = solve_101_problem(&p);
        match (&out, n) {
            (Outcome101::Colourable(w), 1..=13) => {
                c.add(format!("N={n} colourable"), w.validate(&p), format!("{} directions", sys.len()));
                let bits: String = w.assignment.iter().map(|&b| char::from(b'0' + b)).collect();
                witnesses.insert(n.to_string(), bits.into());
            }
            (Outcome101::Uncolourable, 15) => c.add("N=15 uncolourable", true, format!("{} directions", sys.len())),
            (o, _) => c.add(format!("N={n}"), false, format!("unexpected outcome, colourable = {}", o.is_colourable())),
        }
    }
    Ok(serde_json::json!({ "witnesses": witnesses }))
}

/// Scan orders for the critical-subsystem check: index order, reversed, and
/// three seeded shuffles.
pub fn scan_orders(len: usize) -> Vec<Vec<u32>> {
    let id: Vec<u32> = (0..len as u32).collect();
    let mut out = vec![id.clone(), id.iter().rev().copied().collect()];
    for seed in 1..=3u64 {
        let mut o = id.clone();
        o.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        out.push(o);
    }
    out
}

fn n2_critical(c: &mut Checks) -> Result<serde_json::Value> {
    let sys = generate_grid(2)?;
    let p = sys.problem();
    c.add("N=2 grid uncolourable", !solve_101_problem(&p).0.is_colourable(), format!("{} directions", sys.len()));
    let mut sizes = Vec::new();
    let mut labels = BTreeSet::new();
    let mut smallest = None;
    for (i, order) in scan_orders(sys.len()).iter().enumerate() {
        let kept = minimize_uncolourable_with_order(&sys, order)?;
        let as_usize: Vec<usize> = kept.iter().map(|&v| v as usize).collect();
        let critical = is_critical(&p, &as_usize);
        c.add(format!("order {i} critical, size >= 31"), critical && kept.len() >= 31, format!("size {}", kept.len()));
        sizes.push(kept.len());
        if kept.len() == 31 {
            let g = sys.subgraph(&kept)?;
            let canon = canonical_label(&g, DEFAULT_NODE_LIMIT)?;
            labels.insert(graph6::encode(&canon));
            smallest.get_or_insert(canon);
        }
    }
    c.add("size-31 outcomes share one label", labels.len() <= 1, format!("{} distinct", labels.len()));
    let mut timing = None;
    if let Some(g) = &smallest {
        let t = Instant::now();
        let out = grid_embed(g, &sys, DEFAULT_EMBED_NODE_LIMIT)?;
        let took = t.elapsed();
        let ok = out.embedding().is_some_and(|e| e.validate(g));
        c.add("31-vertex graph embeds on N=2 in < 1 s", ok && took < Duration::from_secs(1), format!("{took:?}"));
        timing = Some(took.as_secs_f64());
    } else {
        c.add("some order reached size 31", false, format!("sizes {sizes:?}"));
    }
    Ok(serde_json::json!({ "sizes": sizes, "labels": labels, "embed_seconds_n2": timing }))
}

fn counts_vs_oracle(c: &mut Checks) -> Result<serde_json::Value> {
    let f = Filters::CONNECTED_SQUARE_FREE;
    let mut counts = Vec::new();
    for n in 1..=7 {
        let ours: BTreeSet<Vec<bool>> =
            enumerate(n, f, None)?.iter().map(|g| g.upper_triangle().bits().to_vec()).collect();
        let classes = brute_force_classes(n, f);
        let theirs: BTreeSet<Vec<bool>> = classes.iter().map(brute_force_canonical_code).collect();
        c.add(
            format!("n={n}"),
            ours == theirs && theirs.len() == classes.len(),
            format!("{} vs {}", ours.len(), classes.len()),
        );
        counts.push(ours.len());
    }
    Ok(serde_json::json!({ "counts": counts }))
}

fn connected_prefixes(c: &mut Checks) -> Result<serde_json::Value> {
    let mut counts = Vec::new();
    for n in 1..=8 {
        let (mut total, mut bad_canon, mut bad_conn) = (0u64, 0u64, 0u64);
        enumerate_with(n, Filters::NONE, None, |g| {
            total += 1;
            if n > 1 {
                let p = g.without_last().expect("n > 1");
                if !is_canonical(&p) {
                    bad_canon += 1;
                }
                if g.is_connected() && !p.is_connected() {
                    bad_conn += 1;
                }
            }
        })?;
        let want = GRAPH_COUNTS[n - 1];
        c.add(format!("n={n} class count"), total == want, format!("{total} vs {want}"));
        c.add(format!("n={n} prefixes canonical"), bad_canon == 0, format!("{bad_canon} failures"));
        c.add(format!("n={n} connected prefixes"), bad_conn == 0, format!("{bad_conn} failures"));
        counts.push(total);
    }
    Ok(serde_json::json!({ "counts": counts }))
}
