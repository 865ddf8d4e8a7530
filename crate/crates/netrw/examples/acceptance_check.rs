//! Run a few of the built-in checks at a small bound.

use netrw::checks::run_check;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for id in ["link-formula", "universal-macro", "cardinality-bound", "evolution"] {
        println!("{}", run_check(id, 3)?);
    }
    Ok(())
}
