//! Yes and no threshold ensembles: how they answer four fixed queries, how
//! far apart those answers are, and what the Fourier bound certifies.

use monolab::harness::streams::stream_rng;
use monolab::lower_bound::{
    fourier_distance_lower_bound, is_nice, response_distribution, sample_no, tv_estimate,
    BoundMode, EnsembleKind, QueryMatrix,
};

fn main() -> monolab::Result<()> {
    let mut rng = stream_rng(5, "example/ensembles", 0);
    for n in [100, 400, 1600] {
        let q = QueryMatrix::balanced(4, n, &mut rng)?;
        let yes = response_distribution(&q, EnsembleKind::Yes, 100_000, &mut rng)?;
        let no = response_distribution(&q, EnsembleKind::No, 100_000, &mut rng)?;
        let tv = tv_estimate(&yes, &no, &mut rng)?;
        println!(
            "n={n:<5} tv {:.4} [{:.4}, {:.4}]",
            tv.tv, tv.ci_low, tv.ci_high
        );
    }
    let draw = sample_no(400, &mut rng)?;
    let bound =
        fourier_distance_lower_bound(&draw, BoundMode::Sampled { samples: 1 << 17 }, &mut rng)?;
    println!(
        "no-draw at n=400: nice {}, {} negative coordinates, distance >= {:.5}",
        is_nice(&draw)?,
        bound.negative_coordinates,
        bound.bound
    );
    Ok(())
}
