//! Solve a reachability problem from a transducer library, then evolve a
//! library level by level under a symbol collapse.

use netrw::checks::{evolution_seed, EVOLUTION_SCHEDULE};
use netrw::io::{parse_problem, parse_td};
use netrw::solver::{evolve, format_trace, solve};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let problem = parse_problem(include_str!("data/reach-e.prob"))?;
    let library = vec![
        parse_td(include_str!("data/p.td"))?,
        parse_td(include_str!("data/q.td"))?,
        parse_td(include_str!("data/r.td"))?,
    ];
    let result = solve(&problem, &library)?;
    println!("solved={} records={}", result.solved(), result.records.len());
    for s in result.solutions() {
        println!("solution path={:?} products={}", s.path, s.product.len());
    }

    let (state, trace) = evolve(evolution_seed(), 2, &EVOLUTION_SCHEDULE)?;
    print!("{}", format_trace(&trace));
    println!("library after evolution: {} transducers", state.library.len());
    Ok(())
}
