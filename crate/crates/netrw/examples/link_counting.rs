//! Boundary statistics of a sub-net and the links gained under a block
//! homomorphism with overlapping pieces.

use std::collections::BTreeSet;

use netrw::checks::{lettered, lettered_chain};
use netrw::io::parse_nets;
use netrw::morphism::{new_link_count, Nbh};
use netrw::net::{boundary_stats, positions_of};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let nets = parse_nets(include_str!("data/chain.nets"))?;
    let chain = &nets[0];

    for pos in positions_of(chain, &lettered("a")) {
        let vs = pos.vertices(chain);
        println!("a at {vs:?}: {:?}", boundary_stats(chain, &vs));
    }

    // Two pieces sharing vertex 1: the whole chain and the b on its own.
    let h = Nbh::new(vec![(lettered_chain("a", "b"), lettered_chain("x", "y")), (lettered("b"), lettered("y"))])?;
    let cover: Vec<BTreeSet<_>> = vec![[0, 1].into(), [1].into()];
    for q in [vec![0], vec![1], vec![0, 1]] {
        println!("new links for Q={q:?}: {}", new_link_count(&h, chain, &cover, &q)?);
    }
    Ok(())
}
