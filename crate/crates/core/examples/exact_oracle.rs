//! Exhaustive optimum of a small instance for both variants, compared with
//! the heuristics.

use hdcarp::bench::{generate_instance, GenSpec};
use hdcarp::exact::{brute_force_oracle, OracleLimits};
use hdcarp::metaheuristics::{solve, Algorithm, SolverParams};
use hdcarp::{evaluate, DeadheadMatrix, Variant};

fn main() -> hdcarp::Result<()> {
    let spec = GenSpec {
        num_classes: 2,
        ..GenSpec::new(8, 2, 21)
    };
    let inst = generate_instance(&spec)?;
    let mat = DeadheadMatrix::new(&inst)?;
    for variant in [Variant::P, Variant::U] {
        let (sol, best) = brute_force_oracle(&inst, &mat, variant, OracleLimits::default())?;
        println!("{variant} optimum {best}  routes {:?}", sol.routes);
        for algo in Algorithm::ALL {
            let s = solve(&inst, &mat, algo, variant, &SolverParams::default(), 0)?;
            println!("  {algo:>6} {}", evaluate(&inst, &mat, &s, variant)?);
        }
    }
    Ok(())
}
