//! Port-graph rewriting over ranked alphabets.
//!
//! Nets, renetting systems, net block homomorphisms, abstraction relations,
//! transducers and a bounded problem solver, together with a brute-force
//! oracle used to cross-check the engine.

pub mod abstraction;
pub mod blocks;
pub mod checks;
pub mod cli;
pub mod io;
pub mod morphism;
pub mod net;
pub mod oracle;
pub mod rewrite;
pub mod solver;
pub mod transducer;

pub use net::{
    canonical_form, is_isomorphic, Dir, Edge, Jungle, Label, Net, NetBuilder, NetError, Port, Position,
    RankedSymbol, Slot, VertexId,
};
