//! Run, compose and normalize transducers.

use netrw::io::{parse_jungle, parse_td, serialize_jungle, serialize_td};
use netrw::transducer::{parallel_td_check, run_td, td_compose, td_normal_form};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = parse_td(include_str!("data/p.td"))?;
    let q = parse_td(include_str!("data/q.td"))?;
    let r = parse_td(include_str!("data/r.td"))?;
    let nets = parse_jungle(include_str!("data/singles.nets"))?;

    let out = run_td(&p, &nets)?;
    println!("p on singles:");
    print!("{}", serialize_jungle(&out.jungle));

    let pr = td_compose(&p, &r)?;
    let out = run_td(&pr, &nets)?;
    println!("p then r gives {} nets (exhausted={})", out.jungle.len(), out.exhausted);

    println!("normal form of p then r:");
    print!("{}", serialize_td(&td_normal_form(&pr)));

    println!("p parallel to q: {}", parallel_td_check(&p, &q));
    println!("p parallel to r: {}", parallel_td_check(&p, &r));
    Ok(())
}
