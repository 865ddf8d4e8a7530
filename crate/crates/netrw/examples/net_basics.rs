//! Build a net by hand, inspect it, and round-trip it through the text format.

use netrw::io::{parse_net, serialize_net};
use netrw::net::{connected_subsets, enclosures};
use netrw::{is_isomorphic, NetBuilder, Port, RankedSymbol};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let a = RankedSymbol::simple("a", 1, 1);
    let b = RankedSymbol::simple("b", 1, 2);
    let net = NetBuilder::new()
        .vertex(0, a)
        .vertex(1, b)
        .edge(0, 1, 1, 1)
        .free(Port::inp(0, 1), "i")
        .free(Port::out(1, 1), "o1")
        .free(Port::out(1, 2), "o2")
        .build()?;

    println!("vertices={} edges={} free ports={} ports={}", net.len(), net.edges().len(), net.rank(), net.port_count());
    println!("symbols={:?} connected={}", net.symbols(), net.is_connected());
    println!("connected subsets={}", connected_subsets(&net, 1000)?.len());
    println!("enclosures={}", enclosures(&net)?.len());

    let text = serialize_net(&net);
    print!("{text}");
    let back = parse_net(&text)?;
    println!("round trip isomorphic: {}", is_isomorphic(&net, &back));
    Ok(())
}
