//! Build both MILP formulations for a small instance, check a heuristic
//! solution against them, write the stage LP files to a temporary directory and
//! separate connectivity cuts on a broken point.

use hdcarp::bench::{generate_instance, GenSpec};
use hdcarp::exact::{
    check_model, emit_milp_p, emit_milp_u, encode_solution, separate_connectivity, stage_values, transform_graph,
    SubtourMode,
};
use hdcarp::metaheuristics::{solve, Algorithm, SolverParams};
use hdcarp::{DeadheadMatrix, Variant};

fn main() -> hdcarp::Result<()> {
    let inst = generate_instance(&GenSpec::new(10, 2, 5))?;
    let mat = DeadheadMatrix::new(&inst)?;
    let dir = std::env::temp_dir().join("hdcarp-milp-example");

    for variant in [Variant::P, Variant::U] {
        let tg = transform_graph(&inst, variant);
        let model = match variant {
            Variant::P => emit_milp_p(&inst, &mat, &tg, SubtourMode::Deferred)?,
            Variant::U => emit_milp_u(&inst, &mat, &tg, SubtourMode::Deferred)?,
        };
        println!(
            "{variant}: {} variables, {} constraints, big-N {:.2}",
            model.variables.len(),
            model.constraints.len(),
            model.big_n
        );

        let sol = solve(&inst, &mat, Algorithm::Ls, variant, &SolverParams::default(), 0)?;
        let mut point = encode_solution(&inst, &mat, &tg, &model, &sol)?;
        println!("  encoded heuristic solution violates {:?}", check_model(&model, &point)?);
        for path in model.write_stage_files(&dir, "example", &stage_values(&model, &point))? {
            println!("  wrote {}", path.display());
        }

        // Zero every dummy arc of vehicle 0: its routes lose their anchor.
        for (name, value) in point.iter_mut() {
            let dummy = name.starts_with("y_a")
                && name.ends_with("_m0")
                && name[3..].split('_').next().and_then(|id| id.parse::<usize>().ok()) >= Some(inst.arcs.len());
            if dummy {
                *value = 0.0;
            }
        }
        for cut in separate_connectivity(&inst, &tg, &point)? {
            println!("  cut {}", cut.to_json_line());
        }
    }
    Ok(())
}
