//! Draws from the two comparable-pair distributions and compares the layer
//! gaps they produce.

use std::collections::BTreeMap;

use monolab::func::MidLayerSpec;
use monolab::harness::streams::stream_rng;
use monolab::pairs::{sample_d, sample_d_prime};

fn main() -> monolab::Result<()> {
    let spec = MidLayerSpec::new(16, 0.25)?;
    println!("n = 16, band layers {:?}", spec.layer_list());
    let mut rng = stream_rng(1, "example/pairs", 0);
    for (name, draw) in [
        ("D", sample_d as fn(&_, &mut _) -> _),
        ("D'", sample_d_prime),
    ] {
        let mut gaps = BTreeMap::new();
        for _ in 0..100_000 {
            let p = draw(&spec, &mut rng);
            let gap = (p.y.count_ones() as i64 - p.x.count_ones() as i64).unsigned_abs();
            *gaps.entry(gap).or_insert(0u64) += 1;
        }
        let shown: Vec<String> = gaps
            .iter()
            .map(|(g, c)| format!("{g}:{:.3}", *c as f64 / 1e5))
            .collect();
        println!("{name:<3} gap frequencies {}", shown.join(" "));
    }
    Ok(())
}
