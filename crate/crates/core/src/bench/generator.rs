use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Arc, Instance, Node, NodeId};
use crate::metaheuristics::rng_from;

/// Attempts before generation gives up.
pub const GENERATION_ATTEMPTS: usize = 100;

/// Below this arc count three quarters of the arcs are required; from it on
/// the required count is drawn from 60..=70.
pub const LARGE_GRAPH_ARCS: usize = 80;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneratorKind {
    #[default]
    SyntheticPlanar,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenSpec {
    pub num_arcs: usize,
    pub num_vehicles: usize,
    pub num_classes: usize,
    pub seed: u64,
    pub generator: GeneratorKind,
    /// Overrides the required-arc count rule, for small test suites.
    pub num_required: Option<usize>,
}

impl Default for GenSpec {
    fn default() -> Self {
        Self {
            num_arcs: 40,
            num_vehicles: 2,
            num_classes: 3,
            seed: 0,
            generator: GeneratorKind::SyntheticPlanar,
            num_required: None,
        }
    }
}

impl GenSpec {
    pub fn new(num_arcs: usize, num_vehicles: usize, seed: u64) -> Self {
        Self {
            num_arcs,
            num_vehicles,
            seed,
            ..Self::default()
        }
    }

    pub fn id(&self) -> String {
        format!("gen-a{}-m{}-p{}-s{}", self.num_arcs, self.num_vehicles, self.num_classes, self.seed)
    }

    fn validate(&self) -> Result<()> {
        if self.num_arcs < 4 {
            return Err(Error::InvalidSpec(format!("need at least 4 arcs, got {}", self.num_arcs)));
        }
        if self.num_vehicles == 0 || self.num_classes == 0 {
            return Err(Error::InvalidSpec("vehicles and classes must be positive".into()));
        }
        if self.num_required.is_some_and(|r| r == 0 || r > self.num_arcs) {
            return Err(Error::InvalidSpec("required-arc count must lie in 1..=num_arcs".into()));
        }
        Ok(())
    }
}

/// `|A_r|` for `num_arcs` arcs: 75% (rounded down) below 80 arcs, otherwise
/// uniform in 60..=70.
pub fn required_count<R: Rng + ?Sized>(num_arcs: usize, rng: &mut R) -> usize {
    if num_arcs < LARGE_GRAPH_ARCS {
        num_arcs * 3 / 4
    } else {
        rng.gen_range(60..=70)
    }
}

pub fn num_nodes_for(num_arcs: usize) -> usize {
    num_arcs.div_ceil(2).max(3)
}

/// Random planar digraph on `ceil(|A|/2)` points of the unit square, made
/// strongly connected by an out- and an in-arborescence rooted at the depot
/// (node 0) and padded with random extra arcs. Traversal times are Euclidean
/// lengths divided by the longest arc; required arcs get `s = 2d`,
/// `q = 0.5 d + 0.5` and a uniform class, and `Q = Σ (q / 3 + 0.5)`.
///
/// An attempt that produces a repeated or zero-length arc is retried with a
/// derived seed.
pub fn generate_instance(spec: &GenSpec) -> Result<Instance> {
    spec.validate()?;
    for attempt in 0..GENERATION_ATTEMPTS as u64 {
        let seed = spec.seed ^ attempt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
        if let Some(inst) = attempt_generate(spec, seed) {
            return Ok(inst);
        }
    }
    Err(Error::GenerationFailed(GENERATION_ATTEMPTS))
}

fn attempt_generate(spec: &GenSpec, seed: u64) -> Option<Instance> {
    let mut rng = rng_from(seed);
    let n = num_nodes_for(spec.num_arcs);
    let nodes: Vec<Node> = (0..n)
        .map(|id| Node {
            id,
            x: rng.gen(),
            y: rng.gen(),
        })
        .collect();

    let mut pairs: Vec<(NodeId, NodeId)> = Vec::with_capacity(spec.num_arcs);
    let mut seen: HashSet<(NodeId, NodeId)> = HashSet::new();
    let mut others: Vec<NodeId> = (1..n).collect();

    // Out-arborescence: each node hangs below a node placed before it.
    others.shuffle(&mut rng);
    let mut placed = vec![0];
    for &v in &others {
        let parent = placed[rng.gen_range(0..placed.len())];
        seen.insert((parent, v));
        pairs.push((parent, v));
        placed.push(v);
    }
    // In-arborescence: each node points at a node placed before it.
    others.shuffle(&mut rng);
    let mut placed = vec![0];
    for &v in &others {
        let free: Vec<NodeId> = placed.iter().copied().filter(|&u| !seen.contains(&(v, u))).collect();
        if free.is_empty() {
            return None;
        }
        let parent = free[rng.gen_range(0..free.len())];
        seen.insert((v, parent));
        pairs.push((v, parent));
        placed.push(v);
    }
    while pairs.len() < spec.num_arcs {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u != v && seen.insert((u, v)) {
            pairs.push((u, v));
        }
    }
    pairs.shuffle(&mut rng);

    let lengths: Vec<f64> = pairs
        .iter()
        .map(|&(u, v)| (nodes[u].x - nodes[v].x).hypot(nodes[u].y - nodes[v].y))
        .collect();
    if lengths.iter().any(|&l| !(l > 0.0)) {
        return None;
    }
    let d_max = lengths.iter().copied().fold(0.0f64, f64::max);

    let num_required = spec.num_required.unwrap_or_else(|| required_count(spec.num_arcs, &mut rng));
    let mut ids: Vec<usize> = (0..pairs.len()).collect();
    ids.shuffle(&mut rng);
    let mut required = vec![false; pairs.len()];
    for &i in &ids[..num_required] {
        required[i] = true;
    }

    let mut capacity = 0.0;
    let arcs: Vec<Arc> = pairs
        .iter()
        .zip(&lengths)
        .enumerate()
        .map(|(id, (&(tail, head), &len))| {
            let d = len / d_max;
            if required[id] {
                let q = d * 0.5 + 0.5;
                capacity += q / 3.0 + 0.5;
                Arc {
                    id,
                    tail,
                    head,
                    d,
                    required: true,
                    q,
                    s: 2.0 * d,
                    p: rng.gen_range(1..=spec.num_classes),
                }
            } else {
                Arc {
                    id,
                    tail,
                    head,
                    d,
                    required: false,
                    q: 0.0,
                    s: 0.0,
                    p: 0,
                }
            }
        })
        .collect();

    Some(Instance {
        depot: 0,
        num_vehicles: spec.num_vehicles,
        capacity,
        num_classes: spec.num_classes,
        nodes,
        arcs,
    })
}
