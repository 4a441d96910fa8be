//! Degree-one Fourier coefficients of a threshold function, exact and
//! sampled, and the influence identity they satisfy for unate functions.

use monolab::func::{estimate_deg1, fourier_deg1, influence, parseval_holds, LtfSpec};
use monolab::harness::streams::stream_rng;

fn main() -> monolab::Result<()> {
    let ltf = LtfSpec::from_integers(&[3, 1, 1, -2, 1, 0], 1)?;
    let table = ltf.to_table()?;
    let exact = fourier_deg1(&table);
    let mut rng = stream_rng(7, "example/fourier", 0);
    let sampled = estimate_deg1(&ltf, 200_000, &mut rng)?;
    println!("parseval holds: {}", parseval_holds(&table)?);
    for (i, c) in exact.iter().enumerate() {
        let e = &sampled.first[i];
        println!(
            "i={i}  f^(i) = {c:>6}  |Inf_i| = {:>5}  sampled {:+.4} +- {:.4}",
            influence(&table, i)?,
            e.value,
            e.stderr
        );
    }
    Ok(())
}
