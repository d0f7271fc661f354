//! Improve a random construction by swap local search, showing the class
//! windows the moves are restricted to.

use hdcarp::bench::{generate_instance, GenSpec};
use hdcarp::constructive::construct;
use hdcarp::local_search::{best_swap_inter, best_swap_intra, get_subtour, local_search};
use hdcarp::solution::objective;
use hdcarp::{DeadheadMatrix, Variant};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> hdcarp::Result<()> {
    let inst = generate_instance(&GenSpec::new(24, 2, 3))?;
    let mat = DeadheadMatrix::new(&inst)?;
    let variant = Variant::P;
    let sol = construct(&inst, &mat, variant, &mut ChaCha8Rng::seed_from_u64(5))?;
    println!("construction: {}", objective(&inst, &mat, &sol));

    for (r, route) in sol.routes.iter().enumerate() {
        let classes: Vec<usize> = route.iter().map(|&a| inst.arcs[a].p).collect();
        println!("route {r} classes {classes:?}");
        for k in 1..=inst.num_classes {
            println!("  class {k} window {:?}", get_subtour(&inst, route, k, variant).positions());
        }
    }

    let view = get_subtour(&inst, &sol.routes[0], 1, variant);
    if let Some(m) = best_swap_intra(&inst, &mat, &sol, 0, view) {
        println!("best class-1 swap on route 0: {:?} -> {} (improving: {})", m.positions, m.after, m.improving());
    }
    let (va, vb) = (get_subtour(&inst, &sol.routes[0], 1, variant), get_subtour(&inst, &sol.routes[1], 1, variant));
    if let Some(m) = best_swap_inter(&inst, &mat, &sol, 0, 1, va, vb) {
        println!("best class-1 exchange between routes: {:?} -> {}", m.positions, m.after);
    }

    let improved = local_search(&inst, &mat, &sol, variant);
    println!("local optimum: {}", objective(&inst, &mat, &improved));
    Ok(())
}
