//! Synthetic instance generation and batch experiments with CSV reporting.

mod generator;

pub use generator::{
    generate_instance, num_nodes_for, required_count, GenSpec, GeneratorKind, GENERATION_ATTEMPTS, LARGE_GRAPH_ARCS,
};

use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::deadhead::DeadheadMatrix;
use crate::error::{Error, Result};
use crate::exact::{brute_force_oracle, OracleLimits};
use crate::graph::Instance;
use crate::metaheuristics::{solve, Algorithm, SolverParams};
use crate::solution::{evaluate, HierarchicalObjective, Variant};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reference {
    /// Exhaustive optimum (small instances only).
    Oracle,
    /// Best objective any algorithm reached on the instance.
    BestKnown,
    /// Raw objectives only.
    #[default]
    None,
}

/// Where a bench instance comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InstanceSource {
    File { file: PathBuf },
    Generated(GenSpec),
}

/// Contents of a `bench.json` file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BenchSpec {
    pub instances: Vec<InstanceSource>,
    pub algorithms: Vec<Algorithm>,
    pub variant: Variant,
    pub reference: Reference,
    pub seed: u64,
    pub params: SolverParams,
}

impl Default for BenchSpec {
    fn default() -> Self {
        Self {
            instances: Vec::new(),
            algorithms: Algorithm::ALL.to_vec(),
            variant: Variant::P,
            reference: Reference::None,
            seed: 0,
            params: SolverParams::default(),
        }
    }
}

impl BenchSpec {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    /// Loads or generates every instance, paired with an id. Relative file
    /// paths resolve against `base`.
    pub fn materialize(&self, base: &Path) -> Result<Vec<(String, Instance)>> {
        self.instances
            .iter()
            .map(|src| match src {
                InstanceSource::File { file } => {
                    let path = if file.is_absolute() { file.clone() } else { base.join(file) };
                    let id = path
                        .file_stem()
                        .map(|s| s.to_string_lossy().into_owned())
                        .unwrap_or_else(|| path.display().to_string());
                    Ok((id, Instance::load(&path)?))
                }
                InstanceSource::Generated(spec) => Ok((spec.id(), generate_instance(spec)?)),
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub instance: String,
    pub algorithm: Algorithm,
    pub variant: Variant,
    /// `ok`, or the fault message.
    pub status: String,
    pub objective: Vec<f64>,
    /// Per-class gap to the reference; empty without one.
    pub gap_percent: Vec<f64>,
    pub time_s: f64,
    pub seed: u64,
}

impl BenchRow {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

pub const CSV_HEADER: [&str; 8] = [
    "instance",
    "algorithm",
    "variant",
    "status",
    "objective",
    "gap_percent",
    "time_s",
    "seed",
];

/// `100 (T_k - ref_k) / ref_k` per class, with `0 / 0` read as 0.
pub fn gap_percent(objective: &HierarchicalObjective, reference: &HierarchicalObjective) -> Vec<f64> {
    objective
        .0
        .iter()
        .zip(&reference.0)
        .map(|(&t, &r)| {
            if t == r {
                0.0
            } else {
                100.0 * (t - r) / r
            }
        })
        .collect()
}

fn join(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(";")
}

fn split(field: &str) -> Result<Vec<f64>> {
    if field.is_empty() {
        return Ok(Vec::new());
    }
    field
        .split(';')
        .map(|v| v.parse().map_err(|_| Error::CsvField(field.to_string())))
        .collect()
}

/// Writes rows as CSV; vector fields are `;`-joined.
pub fn write_rows<W: Write>(out: W, rows: &[BenchRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.instance.clone(),
            r.algorithm.to_string(),
            r.variant.to_string(),
            r.status.clone(),
            join(&r.objective),
            join(&r.gap_percent),
            r.time_s.to_string(),
            r.seed.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_rows<R: Read>(input: R) -> Result<Vec<BenchRow>> {
    let mut rd = csv::Reader::from_reader(input);
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let field = |i: usize| rec.get(i).ok_or_else(|| Error::CsvField(format!("missing column {}", CSV_HEADER[i])));
        rows.push(BenchRow {
            instance: field(0)?.to_string(),
            algorithm: field(1)?.parse().map_err(Error::CsvField)?,
            variant: field(2)?.parse().map_err(Error::CsvField)?,
            status: field(3)?.to_string(),
            objective: split(field(4)?)?,
            gap_percent: split(field(5)?)?,
            time_s: field(6)?.parse().map_err(|_| Error::CsvField(field(6).unwrap_or("").to_string()))?,
            seed: field(7)?.parse().map_err(|_| Error::CsvField(field(7).unwrap_or("").to_string()))?,
        });
    }
    Ok(rows)
}

/// Solves every (instance, algorithm) pair concurrently and reports
/// objectives, gaps to `reference` and wall times. Faults become rows with a
/// non-`ok` status. Rows come back in instance-major, algorithm-minor order.
pub fn run_bench(
    instances: &[(String, Instance)],
    algorithms: &[Algorithm],
    variant: Variant,
    reference: Reference,
    params: &SolverParams,
    seed: u64,
) -> Vec<BenchRow> {
    let mats: Vec<Result<DeadheadMatrix>> = instances.par_iter().map(|(_, inst)| DeadheadMatrix::new(inst)).collect();
    let jobs: Vec<(usize, Algorithm)> = (0..instances.len())
        .flat_map(|i| algorithms.iter().map(move |&a| (i, a)))
        .collect();
    let mut rows: Vec<(BenchRow, Option<HierarchicalObjective>)> = jobs
        .par_iter()
        .map(|&(i, algorithm)| {
            let (id, inst) = &instances[i];
            let started = Instant::now();
            let outcome = mats[i].as_ref().map_err(|e| e.to_string()).and_then(|mat| {
                solve(inst, mat, algorithm, variant, params, seed)
                    .and_then(|sol| evaluate(inst, mat, &sol, variant))
                    .map_err(|e| e.to_string())
            });
            let time_s = started.elapsed().as_secs_f64();
            let (status, objective) = match outcome {
                Ok(obj) => ("ok".to_string(), Some(obj)),
                Err(e) => (e, None),
            };
            let row = BenchRow {
                instance: id.clone(),
                algorithm,
                variant,
                status,
                objective: objective.as_ref().map(|o| o.0.clone()).unwrap_or_default(),
                gap_percent: Vec::new(),
                time_s,
                seed,
            };
            (row, objective)
        })
        .collect();

    let references: Vec<Option<HierarchicalObjective>> = match reference {
        Reference::None => vec![None; instances.len()],
        Reference::Oracle => instances
            .par_iter()
            .zip(&mats)
            .map(|((_, inst), mat)| {
                let mat = mat.as_ref().ok()?;
                brute_force_oracle(inst, mat, variant, OracleLimits::default()).ok().map(|(_, o)| o)
            })
            .collect(),
        Reference::BestKnown => (0..instances.len())
            .map(|i| {
                rows.iter()
                    .zip(&jobs)
                    .filter(|(_, (j, _))| *j == i)
                    .filter_map(|((_, obj), _)| obj.clone())
                    .min_by(|a, b| a.total_cmp(b))
            })
            .collect(),
    };
    for ((row, obj), &(i, _)) in rows.iter_mut().zip(&jobs) {
        if let (Some(obj), Some(r)) = (obj.as_ref(), references[i].as_ref()) {
            row.gap_percent = gap_percent(obj, r);
        }
    }
    rows.into_iter().map(|(row, _)| row).collect()
}
