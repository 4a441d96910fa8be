//! Values computed independently (brute force over all monotone functions,
//! or by hand) and frozen here.

use num_rational::Rational64;

use monolab::func::{band_width, BitTableFunction, LtfSpec};
use monolab::harness::streams::stream_rng;
use monolab::lower_bound::{fourier_distance_lower_bound, BoundMode};
use monolab::oracle::{exact_distance, MonotoneFamily};
use monolab::testers::exact_edge_rejection;

#[test]
fn monotone_function_counts() {
    // Dedekind numbers.
    let counts: Vec<usize> = (1..=4)
        .map(|n| MonotoneFamily::enumerate(n).unwrap().len())
        .collect();
    assert_eq!(counts, [3, 6, 20, 168]);
}

#[test]
fn parity_distances() {
    let expected = [(1, 0, 2), (2, 1, 4), (3, 3, 8), (4, 5, 16)];
    for (n, num, den) in expected {
        let d = exact_distance(&BitTableFunction::parity(n).unwrap())
            .unwrap()
            .distance;
        assert_eq!(d, Rational64::new(num, den), "n = {n}");
    }
}

#[test]
fn strict_minority_distances() {
    let expected = [(1, 1, 2), (2, 1, 4), (3, 4, 8), (4, 5, 16)];
    for (n, num, den) in expected {
        let f = BitTableFunction::from_fn(n, |x| 2 * x.count_ones() < n as u32).unwrap();
        assert_eq!(
            exact_distance(&f).unwrap().distance,
            Rational64::new(num, den),
            "n = {n}"
        );
    }
}

#[test]
fn band_widths() {
    assert_eq!(band_width(100, 0.5), 66);
    assert_eq!(band_width(400, 0.25), 140);
    assert_eq!(band_width(1600, 0.1), 298);
}

#[test]
fn anti_dictator_edge_rate_is_one_over_n() {
    for n in 2..=10 {
        let f = BitTableFunction::anti_dictator(n, n - 1).unwrap();
        assert_eq!(exact_edge_rejection(&f), Rational64::new(1, n as i64));
    }
}

#[test]
fn negated_majority_fourier_bound() {
    // Each f^(i) is -3/8, so the bound is 5 * (9/64) / 4.
    let ltf = LtfSpec::from_integers(&[-1; 5], 0).unwrap();
    let b = fourier_distance_lower_bound(&ltf, BoundMode::Exact, &mut stream_rng(0, "frozen", 0))
        .unwrap();
    assert_eq!(b.exact, Some(Rational64::new(45, 256)));
}
