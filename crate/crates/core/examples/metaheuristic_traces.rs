//! Convergence of ILS, EA and ACO on one instance.

use hdcarp::bench::{generate_instance, GenSpec};
use hdcarp::constructive::InsertionMode;
use hdcarp::metaheuristics::{aco_run, ea_run, ils_trace, AcoParams, EaParams};
use hdcarp::{DeadheadMatrix, Variant};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> hdcarp::Result<()> {
    let inst = generate_instance(&GenSpec::new(40, 3, 11))?;
    let mat = DeadheadMatrix::new(&inst)?;
    let variant = Variant::U;

    let (_, history) = ils_trace(&inst, &mat, variant, 10, InsertionMode::Append, &mut ChaCha8Rng::seed_from_u64(1))?;
    println!("ils: {} -> {}", history[0], history[history.len() - 1]);

    let params = EaParams { k_max: 20, lambda: 50 };
    let ea = ea_run(&inst, &mat, variant, &params, InsertionMode::Append, &mut ChaCha8Rng::seed_from_u64(1))?;
    for (k, best) in ea.history.iter().enumerate().step_by(5) {
        println!("ea generation {k:>2}: {best}");
    }

    let aco = aco_run(
        &inst,
        &mat,
        variant,
        &AcoParams {
            n_ant: 10,
            k_max: 20,
            rho: 0.5,
        },
        &mut ChaCha8Rng::seed_from_u64(1),
    )?;
    let reinforced = aco.pheromones.values().iter().filter(|&&t| t > 0.0).count();
    println!(
        "aco: {} ({} of {} pheromone entries nonzero, {:.3} deposited)",
        aco.objective,
        reinforced,
        aco.pheromones.side() * aco.pheromones.side(),
        aco.deposited
    );
    Ok(())
}
