//! Generate an instance and solve it with every heuristic.
//!
//! cargo run --example solve_generated -- 40 2

use hdcarp::bench::{generate_instance, GenSpec};
use hdcarp::constructive::InsertionMode;
use hdcarp::metaheuristics::{solve, Algorithm, SolverParams};
use hdcarp::{evaluate, DeadheadMatrix, Variant};

fn main() -> hdcarp::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<usize>().expect("numeric argument"));
    let arcs = args.next().unwrap_or(30);
    let vehicles = args.next().unwrap_or(2);

    let inst = generate_instance(&GenSpec::new(arcs, vehicles, 7))?;
    let mat = DeadheadMatrix::new(&inst)?;
    println!(
        "{} nodes, {} arcs, {} required, Q = {:.3}",
        inst.num_nodes(),
        inst.arcs.len(),
        inst.required_arcs().len(),
        inst.capacity
    );

    // Appending keeps routes class-monotone, where U moves coincide with P
    // moves; inserting at the best position lets U interleave classes.
    let append = SolverParams::default();
    let best = SolverParams {
        insertion: InsertionMode::BestPosition,
        ..SolverParams::default()
    };
    for (variant, params, label) in [
        (Variant::P, &append, "append"),
        (Variant::U, &append, "append"),
        (Variant::U, &best, "best-position"),
    ] {
        for algo in Algorithm::ALL {
            let start = std::time::Instant::now();
            let sol = solve(&inst, &mat, algo, variant, params, 1)?;
            let obj = evaluate(&inst, &mat, &sol, variant)?;
            println!("{variant} {label:>13} {algo:>6}  {obj}  ({:.2}s)", start.elapsed().as_secs_f64());
        }
    }
    Ok(())
}
