//! Small benchmark against the exhaustive optimum, printed as CSV.

use hdcarp::bench::{generate_instance, run_bench, write_rows, GenSpec, Reference};
use hdcarp::metaheuristics::{Algorithm, SolverParams};
use hdcarp::Variant;

fn main() -> hdcarp::Result<()> {
    let instances = (0..5)
        .map(|seed| {
            let spec = GenSpec {
                num_classes: 2,
                ..GenSpec::new(8, 2, seed)
            };
            Ok((spec.id(), generate_instance(&spec)?))
        })
        .collect::<hdcarp::Result<Vec<_>>>()?;
    let rows = run_bench(
        &instances,
        &Algorithm::ALL,
        Variant::P,
        Reference::Oracle,
        &SolverParams::default(),
        0,
    );
    write_rows(std::io::stdout().lock(), &rows)
}
