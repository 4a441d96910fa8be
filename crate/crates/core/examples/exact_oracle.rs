//! Exact distance to monotonicity for a few classic functions, checked
//! against brute force where that is still cheap.
//!
//! cargo run --example exact_oracle

use monolab::func::{BitTableFunction, MidLayerSpec};
use monolab::oracle::{brute_force_distance, distance_report};

fn main() -> monolab::Result<()> {
    let n = 4;
    let spec = MidLayerSpec::clamped(n, 0.5)?;
    let functions = [
        ("majority", BitTableFunction::majority(n)?),
        ("parity", BitTableFunction::parity(n)?),
        ("anti-dictator", BitTableFunction::anti_dictator(n, 0)?),
        ("dictator", BitTableFunction::dictator(n, 2)?),
    ];
    println!(
        "{:<14} {:>8} {:>8} {:>8} {:>8}",
        "function", "dist", "brute", "v", "sigma"
    );
    for (name, f) in &functions {
        let r = distance_report(f, &spec)?;
        let brute = brute_force_distance(f)?;
        assert_eq!(r.distance, brute);
        println!(
            "{name:<14} {:>8} {:>8} {:>8} {:>8}",
            r.distance, brute, r.v, r.sigma
        );
    }
    Ok(())
}
