//! Rewrite step, closure and normal forms under a renetting system.

use netrw::io::{parse_jungle, parse_rns, serialize_jungle};
use netrw::rewrite::{closure, normal_forms, rewrite_step, Budget};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let nets = parse_jungle(include_str!("data/chain.nets"))?;
    let merge = parse_rns(include_str!("data/merge.rns"))?;
    let swap = parse_rns(include_str!("data/swap.rns"))?;

    let one = rewrite_step(&merge, &nets)?;
    println!("one merge step:");
    print!("{}", serialize_jungle(&one));

    let nf = normal_forms(&merge, &nets, Budget::default())?;
    println!("merge normal forms: {} (exhausted={})", nf.jungle.len(), nf.exhausted);

    // swap never terminates, so the budget cuts it off.
    let budget = Budget::new(8, 8, 64);
    let cl = closure(&swap, &nets, budget)?;
    let nf = normal_forms(&swap, &nets, budget)?;
    println!("swap closure: {} nets (exhausted={})", cl.jungle.len(), cl.exhausted);
    println!("swap normal forms: {} (exhausted={})", nf.jungle.len(), nf.exhausted);
    Ok(())
}
