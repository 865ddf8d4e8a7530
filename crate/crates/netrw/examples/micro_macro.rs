//! Lift a rule below two alphabetic abstractions of one origin net and
//! replay both commuting squares.

use netrw::blocks::micro_macro;
use netrw::checks::{lettered, lettered_chain};
use netrw::morphism::Nbh;
use netrw::rewrite::RulePreform;

fn relabeling(pairs: &[(&str, &str)]) -> Nbh {
    Nbh::new(pairs.iter().map(|(a, b)| (lettered(a), lettered(b))).collect()).expect("relabeling")
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let rule = RulePreform::simple("xyz", lettered_chain("x", "y"), lettered("z"))?;
    let origin = lettered_chain("a", "b");
    let w1 = relabeling(&[("a", "x"), ("b", "y")]);
    let w2 = relabeling(&[("a", "p"), ("b", "q")]);

    let mm = micro_macro(&rule, &origin, &w1, &w2)?;
    println!("redex region in the origin: {:?}", mm.region);
    println!("micro rule: {}", mm.micro.name);
    println!("macro rules: {} and {}", mm.macro_rules.0.name, mm.macro_rules.1.name);
    println!("refinement pieces: {}", mm.refinement.piece_nets().len());

    let sq = mm.squares()?;
    println!("first square: {} vs {} nets", sq.first.0.len(), sq.first.1.len());
    println!("second square: {} vs {} nets", sq.second.0.len(), sq.second.1.len());
    println!("both close: {}", sq.closes());
    Ok(())
}
