//! Cross-check the rewriting engine against the brute-force oracle.

use netrw::checks::sym;
use netrw::io::parse_rns;
use netrw::oracle::{enumerate_nets, naive_normal_forms, naive_rewrite_closure, oracle_compare, EnumerationSpec};
use netrw::rewrite::{closure, normal_forms, Budget};
use netrw::Jungle;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let nets = enumerate_nets(&EnumerationSpec::new(vec![sym("a"), sym("b")]).vertices(2))?;
    println!("enumerated {} nets over a, b", nets.len());

    let merge = parse_rns(include_str!("data/merge.rns"))?;
    let budget = Budget::default();
    let mut agree = 0;
    for n in &nets {
        let j = Jungle::singleton(n.clone());
        let c = oracle_compare(&closure(&merge, &j, budget)?, &naive_rewrite_closure(&merge, &j, budget)?);
        let f = oracle_compare(&normal_forms(&merge, &j, budget)?, &naive_normal_forms(&merge, &j, budget)?);
        if c.is_pass() && f.is_pass() {
            agree += 1;
        }
    }
    println!("engine and oracle agree on {agree} of {} nets", nets.len());
    Ok(())
}
