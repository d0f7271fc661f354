//! Metaheuristics built on construction and local search, plus a single
//! seeded entry point for every heuristic algorithm.

mod aco;
mod ea;
mod ils;

pub use aco::{aco, aco_run, AcoParams, AcoRun, PheromoneMatrix};
pub use ea::{crossover, ea, ea_run, EaParams, EaRun, Member};
pub use ils::{ils, ils_trace, perturb};

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::constructive::{construct_retrying, InsertionMode};
use crate::deadhead::DeadheadMatrix;
use crate::error::Result;
use crate::graph::Instance;
use crate::local_search::local_search;
use crate::solution::{Solution, Variant};

/// Construction attempts before a capacity fault is propagated.
pub const CONSTRUCTION_ATTEMPTS: usize = 100;

pub(crate) fn rng_from(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Draws one sub-seed per worker up front so results do not depend on how
/// work is scheduled.
pub(crate) fn worker_seeds<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<u64> {
    (0..n).map(|_| rng.gen()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Greedy,
    Ls,
    Ils,
    Ea,
    Aco,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Greedy,
        Algorithm::Ls,
        Algorithm::Ils,
        Algorithm::Ea,
        Algorithm::Aco,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Greedy => "greedy",
            Algorithm::Ls => "ls",
            Algorithm::Ils => "ils",
            Algorithm::Ea => "ea",
            Algorithm::Aco => "aco",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| format!("unknown algorithm `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverParams {
    pub ils_k_max: usize,
    pub ea: EaParams,
    pub aco: AcoParams,
    #[serde(skip)]
    pub insertion: InsertionMode,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            ils_k_max: 10,
            ea: EaParams::default(),
            aco: AcoParams::default(),
            insertion: InsertionMode::Append,
        }
    }
}

/// Runs `algo` with a ChaCha8 stream seeded from `seed`.
pub fn solve(
    inst: &Instance,
    mat: &DeadheadMatrix,
    algo: Algorithm,
    variant: Variant,
    params: &SolverParams,
    seed: u64,
) -> Result<Solution> {
    let mut rng = rng_from(seed);
    match algo {
        Algorithm::Greedy => construct_retrying(
            inst,
            mat,
            variant,
            params.insertion,
            &mut rng,
            CONSTRUCTION_ATTEMPTS,
        ),
        Algorithm::Ls => {
            let sol = construct_retrying(
                inst,
                mat,
                variant,
                params.insertion,
                &mut rng,
                CONSTRUCTION_ATTEMPTS,
            )?;
            Ok(local_search(inst, mat, &sol, variant))
        }
        Algorithm::Ils => ils(inst, mat, variant, params.ils_k_max, params.insertion, &mut rng),
        Algorithm::Ea => ea(inst, mat, variant, &params.ea, params.insertion, &mut rng),
        Algorithm::Aco => aco(inst, mat, variant, &params.aco, &mut rng),
    }
}
