//! Seeded random graphs.
//!
//! Graph `i` of a batch uses its own ChaCha stream and edge density
//! `DENSITY_LADDER[i % 5]`, so batches are reproducible and any prefix of a
//! batch is the same regardless of its length.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, MAX_VERTICES};

pub const DENSITY_LADDER: [f64; 5] = [0.1, 0.2, 0.3, 0.4, 0.5];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RandomModel {
    /// Every pair is an edge independently with the ladder density.
    Gnp,
    /// Pairs in random order, each added unless it closes a 4-cycle, until
    /// the ladder density of all pairs is reached or no pair fits.
    SquareFree,
}

fn closes_square(g: &Graph, u: usize, v: usize) -> bool {
    // a 4-cycle through u-v is a path u-a-b-v
    g.neighbours(u).any(|a| a != v && g.neighbours(a).any(|b| b != u && b != v && g.has_edge(b, v)))
}

fn one(n: usize, p: f64, model: RandomModel, rng: &mut ChaCha8Rng) -> Result<Graph> {
    let mut g = Graph::empty(n)?;
    let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    match model {
        RandomModel::Gnp => {
            for (u, v) in pairs {
                if rng.gen_bool(p) {
                    g.add_edge(u, v);
                }
            }
        }
        RandomModel::SquareFree => {
            let target = (p * pairs.len() as f64).round() as usize;
            pairs.shuffle(rng);
            let mut m = 0;
            for (u, v) in pairs {
                if m == target {
                    break;
                }
                if !closes_square(&g, u, v) {
                    g.add_edge(u, v);
                    m += 1;
                }
            }
        }
    }
    Ok(g)
}

pub fn random_graphs(n: usize, count: usize, seed: u64, model: RandomModel) -> Result<Vec<Graph>> {
    if n == 0 || n > MAX_VERTICES {
        return Err(Error::VertexCount(n));
    }
    (0..count)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            one(n, DENSITY_LADDER[i % DENSITY_LADDER.len()], model, &mut rng)
        })
        .collect()
}
