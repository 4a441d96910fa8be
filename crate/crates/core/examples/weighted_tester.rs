//! Rejection rates of the edge, baseline and weighted path testers on an
//! anti-dictator, next to the exact values.

use monolab::func::{BitTableFunction, MidLayerSpec};
use monolab::testers::{
    exact_baseline_rejection, exact_edge_rejection, exact_weighted_rejection,
    rejection_probability, TesterKind,
};
use num_traits::ToPrimitive;

fn main() -> monolab::Result<()> {
    let n = 10;
    let f = BitTableFunction::anti_dictator(n, 0)?;
    let spec = MidLayerSpec::new(n, 0.5)?;
    let exact = [
        (TesterKind::Edge, exact_edge_rejection(&f).to_f64().unwrap()),
        (
            TesterKind::Baseline,
            exact_baseline_rejection(&f, &spec)?.to_f64().unwrap(),
        ),
        (
            TesterKind::Weighted,
            exact_weighted_rejection(&f, &spec)?.to_f64().unwrap(),
        ),
    ];
    for (kind, p) in exact {
        let t = rejection_probability(
            &f,
            kind,
            0.5,
            500_000,
            3,
            monolab::harness::streams::default_workers(),
        )?;
        let r = t.rate();
        println!(
            "{:<9} exact {:.5}  sampled {:.5} +- {:.5}",
            kind.name(),
            p,
            r.p,
            r.stderr
        );
    }
    Ok(())
}
