use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use hdcarp::bench::{generate_instance, run_bench, write_rows, BenchSpec, GenSpec};
use hdcarp::constructive::InsertionMode;
use hdcarp::exact::{
    brute_force_oracle, emit_milp_p, emit_milp_u, encode_solution, stage_values, transform_graph, OracleLimits,
    SubtourMode,
};
use hdcarp::local_search::local_search;
use hdcarp::metaheuristics::{solve, AcoParams, Algorithm, EaParams, SolverParams};
use hdcarp::{check_feasible, evaluate, validate_instance, DeadheadMatrix, Instance, Solution, SolutionFile, Variant};

#[derive(Parser)]
#[command(name = "hdcarp", version, about = "Hierarchical directed capacitated arc routing solvers")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic instance.
    Gen {
        #[arg(long)]
        arcs: usize,
        #[arg(long)]
        vehicles: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        classes: usize,
        /// Override the required-arc count.
        #[arg(long)]
        required: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve an instance with a heuristic.
    Solve {
        #[arg(long)]
        algo: Algorithm,
        #[arg(long)]
        variant: Variant,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Check and evaluate a solution.
    Eval {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        sol: PathBuf,
        #[arg(long)]
        variant: Variant,
    },
    /// Exhaustive optimum for small instances.
    Oracle {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        variant: Variant,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit the MILP as one LP file per lexicographic stage.
    Milp {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        variant: Variant,
        #[arg(long, default_value = "deferred")]
        mode: SubtourMode,
        #[arg(long)]
        out_dir: PathBuf,
        /// Solution whose class completion times fix earlier stages
        /// (default: greedy construction plus local search).
        #[arg(long)]
        sol: Option<PathBuf>,
    },
    /// Improve a solution by local search.
    Refine {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        sol: PathBuf,
        #[arg(long)]
        variant: Variant,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a batch experiment and write CSV rows.
    Bench {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct ParamArgs {
    #[arg(long, default_value_t = 10)]
    ils_k_max: usize,
    #[arg(long, default_value_t = 100)]
    ea_k_max: usize,
    #[arg(long, default_value_t = 200)]
    ea_lambda: usize,
    #[arg(long, default_value_t = 50)]
    aco_ants: usize,
    #[arg(long, default_value_t = 100)]
    aco_k_max: usize,
    #[arg(long, default_value_t = 0.5)]
    aco_rho: f64,
    /// Insert each arc at its best position instead of appending.
    #[arg(long)]
    best_insertion: bool,
}

impl ParamArgs {
    fn params(&self) -> SolverParams {
        SolverParams {
            ils_k_max: self.ils_k_max,
            ea: EaParams {
                k_max: self.ea_k_max,
                lambda: self.ea_lambda,
            },
            aco: AcoParams {
                n_ant: self.aco_ants,
                k_max: self.aco_k_max,
                rho: self.aco_rho,
            },
            insertion: if self.best_insertion {
                InsertionMode::BestPosition
            } else {
                InsertionMode::Append
            },
        }
    }
}

enum Failure {
    /// Input violates a contract: exit code 2.
    Invalid(String),
    /// Anything else: exit code 1.
    Fault(String),
}

impl From<hdcarp::Error> for Failure {
    fn from(e: hdcarp::Error) -> Self {
        Failure::Fault(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Fault(e.to_string())
    }
}

type CliResult = Result<(), Failure>;

fn load_instance(path: &Path) -> Result<(Instance, DeadheadMatrix), Failure> {
    let inst = Instance::load(path).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))?;
    let violations = validate_instance(&inst);
    if !violations.is_empty() {
        let lines: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
        return Err(Failure::Invalid(format!("invalid instance {}:\n{}", path.display(), lines.join("\n"))));
    }
    let mat = DeadheadMatrix::new(&inst)?;
    Ok((inst, mat))
}

fn load_feasible(inst: &Instance, path: &Path, variant: Variant) -> Result<Solution, Failure> {
    let (_, sol) = SolutionFile::load(path)
        .map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))?
        .into_solution();
    let violations = check_feasible(inst, &sol, variant).map_err(|e| Failure::Invalid(e.to_string()))?;
    if !violations.is_empty() {
        let lines: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
        return Err(Failure::Invalid(format!("infeasible solution:\n{}", lines.join("\n"))));
    }
    Ok(sol)
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Gen {
            arcs,
            vehicles,
            seed,
            classes,
            required,
            out,
        } => {
            let spec = GenSpec {
                num_classes: classes,
                num_required: required,
                ..GenSpec::new(arcs, vehicles, seed)
            };
            let inst = generate_instance(&spec).map_err(|e| match e {
                hdcarp::Error::InvalidSpec(_) => Failure::Invalid(e.to_string()),
                e => Failure::Fault(e.to_string()),
            })?;
            inst.save(&out)?;
        }
        Command::Solve {
            algo,
            variant,
            input,
            out,
            seed,
            params,
        } => {
            let (inst, mat) = load_instance(&input)?;
            let sol = solve(&inst, &mat, algo, variant, &params.params(), seed)?;
            let obj = evaluate(&inst, &mat, &sol, variant)?;
            SolutionFile::new(variant, &sol).save(&out)?;
            println!("{}", json!({ "algorithm": algo, "variant": variant, "objective": obj }));
        }
        Command::Eval { input, sol, variant } => {
            let (inst, mat) = load_instance(&input)?;
            let (_, solution) = SolutionFile::load(&sol)
                .map_err(|e| Failure::Invalid(format!("{}: {e}", sol.display())))?
                .into_solution();
            let violations = check_feasible(&inst, &solution, variant).map_err(|e| Failure::Invalid(e.to_string()))?;
            if !violations.is_empty() {
                let lines: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
                println!("{}", json!({ "variant": variant, "feasible": false, "violations": lines }));
                return Err(Failure::Invalid(format!("infeasible solution:\n{}", lines.join("\n"))));
            }
            let obj = evaluate(&inst, &mat, &solution, variant)?;
            println!("{}", json!({ "variant": variant, "feasible": true, "objective": obj }));
        }
        Command::Oracle { input, variant, out } => {
            let (inst, mat) = load_instance(&input)?;
            let (sol, obj) = brute_force_oracle(&inst, &mat, variant, OracleLimits::default()).map_err(|e| match e {
                hdcarp::Error::LimitExceeded { .. } => Failure::Invalid(e.to_string()),
                e => Failure::Fault(e.to_string()),
            })?;
            if let Some(out) = out {
                SolutionFile::new(variant, &sol).save(out)?;
            }
            println!("{}", json!({ "variant": variant, "objective": obj, "routes": sol.routes }));
        }
        Command::Milp {
            input,
            variant,
            mode,
            out_dir,
            sol,
        } => {
            let (inst, mat) = load_instance(&input)?;
            let tg = transform_graph(&inst, variant);
            let model = match variant {
                Variant::P => emit_milp_p(&inst, &mat, &tg, mode),
                Variant::U => emit_milp_u(&inst, &mat, &tg, mode),
            }
            .map_err(|e| Failure::Invalid(e.to_string()))?;
            let reference = match sol {
                Some(path) => load_feasible(&inst, &path, variant)?,
                None => solve(&inst, &mat, Algorithm::Ls, variant, &SolverParams::default(), 0)?,
            };
            let assignment = encode_solution(&inst, &mat, &tg, &model, &reference)?;
            let fixed = stage_values(&model, &assignment);
            let stem = input
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "instance".into());
            for path in model.write_stage_files(&out_dir, &stem, &fixed)? {
                println!("{}", path.display());
            }
        }
        Command::Refine {
            input,
            sol,
            variant,
            out,
        } => {
            let (inst, mat) = load_instance(&input)?;
            let start = load_feasible(&inst, &sol, variant)?;
            let refined = local_search(&inst, &mat, &start, variant);
            let before = evaluate(&inst, &mat, &start, variant)?;
            let after = evaluate(&inst, &mat, &refined, variant)?;
            SolutionFile::new(variant, &refined).save(&out)?;
            println!("{}", json!({ "variant": variant, "before": before, "objective": after }));
        }
        Command::Bench { spec, out } => {
            let bench = BenchSpec::load(&spec).map_err(|e| Failure::Invalid(format!("{}: {e}", spec.display())))?;
            let base = spec.parent().unwrap_or(Path::new("."));
            let instances = bench.materialize(base)?;
            for (id, inst) in &instances {
                if !validate_instance(inst).is_empty() {
                    return Err(Failure::Invalid(format!("invalid instance {id}")));
                }
            }
            let rows = run_bench(&instances, &bench.algorithms, bench.variant, bench.reference, &bench.params, bench.seed);
            write_rows(BufWriter::new(File::create(&out)?), &rows)?;
            let failed = rows.iter().filter(|r| !r.is_ok()).count();
            eprintln!("{} rows written to {} ({failed} failed)", rows.len(), out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Fault(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
