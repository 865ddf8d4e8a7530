//! Run the universally partitioning validator on a good and a bad system.

use netrw::io::{parse_jungle, parse_rns};
use netrw::rewrite::{classify_rns, validate_uprns, Budget};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let nets = parse_jungle(include_str!("data/chain.nets"))?;
    for (name, text) in [("relabel", include_str!("data/relabel.rns")), ("swap", include_str!("data/swap.rns"))] {
        let w = parse_rns(text)?;
        let report = validate_uprns(&w, &nets, Budget::new(8, 8, 64))?;
        println!("{name}: passes={} failing={:?}", report.passes(), report.failing());
        println!("{report}");
    }

    let merge = parse_rns(include_str!("data/merge.rns"))?;
    for n in &nets {
        println!("merge flags on a {}-vertex net:\n{}", n.len(), classify_rns(&merge, n)?);
    }
    Ok(())
}
