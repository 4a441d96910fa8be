//! Calibrates the repetition constant of the combined tester on a small
//! input and runs the resulting tester on larger ones.

use monolab::func::BitTableFunction;
use monolab::harness::streams::default_workers;
use monolab::testers::{
    calibrate_repetition_constant, combined_runs, default_repetitions, TesterConfig,
};

fn main() -> monolab::Result<()> {
    let c = calibrate_repetition_constant(
        &BitTableFunction::anti_dictator(8, 0)?,
        0.5,
        0.5,
        2.0 / 3.0,
    )?;
    println!("calibrated constant C = {c}");
    for n in [12, 16, 20] {
        let reps = default_repetitions(n, 0.5, c);
        let config = TesterConfig::new(0.5, reps, 11);
        for (name, f) in [
            ("anti-dictator", BitTableFunction::anti_dictator(n, 0)?),
            ("majority", BitTableFunction::majority(n)?),
        ] {
            let runs = combined_runs(&f, &config, 100, default_workers())?;
            let rejected = runs.iter().filter(|r| r.reject).count();
            let queries: u64 = runs.iter().map(|r| r.queries).sum();
            println!(
                "n={n:<3} reps={reps:<3} {name:<14} rejected {rejected:>3}/100, mean queries {:.1}",
                queries as f64 / 100.0
            );
        }
    }
    Ok(())
}
