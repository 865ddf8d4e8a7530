//! Compile a block homomorphism into a renetting system and back, and check
//! that both agree on a sample.

use netrw::blocks::{compile_nbh_to_rns, compile_rns_to_nbh, equivalence_check};
use netrw::checks::sample;
use netrw::io::{parse_nbh, serialize_rns};
use netrw::rewrite::Budget;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let h = parse_nbh(include_str!("data/relabel.nbh"))?;
    let r = compile_nbh_to_rns(&h)?;
    print!("{}", serialize_rns(&r));

    let nets = sample(2);
    let report = equivalence_check(&h, &r, &nets, Budget::default())?;
    println!("nbh vs rns on {} nets: {}", nets.len(), if report.passes() { "agree" } else { "differ" });

    let back = compile_rns_to_nbh(&r)?;
    let report = equivalence_check(&back, &r, &nets, Budget::default())?;
    println!("round trip blocks={} agree={}", back.entries().len(), report.passes());
    Ok(())
}
