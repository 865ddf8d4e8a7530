//! Apply, classify and invert a net block homomorphism.

use netrw::io::{parse_jungle, parse_nbh, serialize_jungle, serialize_nbh};
use netrw::morphism::{classify_nbh, invert_anbh, nbh_image};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let h = parse_nbh(include_str!("data/relabel.nbh"))?;
    let nets = parse_jungle(include_str!("data/chain.nets"))?;

    for n in &nets {
        let img = nbh_image(&h, n)?;
        println!("image of a {}-vertex net:", n.len());
        print!("{}", serialize_jungle(&img));
    }

    let kinds = classify_nbh(&h, &nets)?;
    println!("types: {kinds:?}");

    let inv = invert_anbh(&h)?;
    println!("inverse:");
    print!("{}", serialize_nbh(&inv));
    Ok(())
}
