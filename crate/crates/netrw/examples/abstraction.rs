//! Abstraction relations: laws, partitions, sisters and a partially
//! quotient algebra.

use netrw::abstraction::{
    center_uniqueness, check_equivalence_laws, check_partially_quotient, sisters_check, td_op, AbstractionRelation, Kind,
    PartiallyQuotientAlgebra,
};
use netrw::checks::{lettered, sample};
use netrw::io::{parse_nbh, parse_td};
use netrw::rewrite::Budget;
use netrw::solver::SymbolCollapse;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let universe = sample(2);
    let h = parse_nbh(include_str!("data/relabel.nbh"))?;

    let by_image = AbstractionRelation::nbh_abstraction(&universe, &h, "relabel")?;
    let laws = check_equivalence_laws(&by_image);
    println!("relabel image relation: {} pairs, laws hold={}", by_image.pair_count(), laws.passes());

    let collapse = SymbolCollapse::new(&[("b", "a")]).relation(&universe);
    let part = collapse.partition()?;
    println!("collapse b=a: {} classes, centers unique={}", part.classes.len(), center_uniqueness(&part).passes());

    let witness = sisters_check(&lettered("a"), &lettered("b"), Kind::Nbh, &[], &[], Budget::default())?;
    println!("a and b are block sisters: {}", witness.is_some());

    let p = parse_td(include_str!("data/p.td"))?;
    let pqa = PartiallyQuotientAlgebra::induced(collapse, vec![("p".into(), td_op(p))])?;
    let report = check_partially_quotient(&pqa);
    for v in &report.lines {
        println!("{} {}", if v.pass { "PASS" } else { "FAIL" }, v.law);
    }
    Ok(())
}
