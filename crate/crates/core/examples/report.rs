//! Prints the bound table for each knot given on the command line.

use cp2slice::knotspec::parse;
use cp2slice::report::{compute_bounds, BoundsConfig};

fn main() {
    let knots: Vec<String> = std::env::args().skip(1).collect();
    for k in &knots {
        match parse(k).and_then(|e| compute_bounds(&e, &BoundsConfig::default())) {
            Ok(r) => println!("{}", r.table()),
            Err(e) => eprintln!("{k}: {e}"),
        }
    }
}
