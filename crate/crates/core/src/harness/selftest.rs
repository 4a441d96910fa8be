//! A fast invariant sweep behind `monolab selftest`.

use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use super::streams::{stream_rng, BlockPlan};
use crate::error::Result;
use crate::func::{BitTableFunction, LtfSpec, MidLayerSpec};
use crate::hypergrid::{grid_table_distance, phi_even, GridTable, OddGadget};
use crate::lower_bound::{
    fourier_distance_lower_bound, moment_match_check, sample_yes, BoundMode, QueryMatrix,
};
use crate::oracle::{brute_force_distance_with, dichotomy_scan, exact_distance, MonotoneFamily};
use crate::testers::{
    exact_weighted_rejection, rejection_probability, run_trials, EdgeTester, TesterKind,
    WeightedPathTester,
};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SelfTestReport {
    pub checks: Vec<Check>,
}

impl SelfTestReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn all_tables(n: usize) -> impl Iterator<Item = BitTableFunction> {
    (0..1u64 << (1 << n))
        .map(move |w| BitTableFunction::from_words(n, vec![w]).expect("fits one word"))
}

fn check(name: &'static str, f: impl FnOnce() -> Result<(bool, String)>) -> Check {
    match f() {
        Ok((passed, detail)) => Check {
            name,
            passed,
            detail,
        },
        Err(e) => Check {
            name,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

pub fn selftest(workers: usize) -> SelfTestReport {
    let checks = vec![
        check("oracle matches brute force, n <= 3", || {
            let mut bad = 0;
            for n in 1..=3 {
                let family = MonotoneFamily::enumerate(n)?;
                for f in all_tables(n) {
                    bad += (exact_distance(&f)?.distance != brute_force_distance_with(&family, &f)?)
                        as u32;
                }
            }
            Ok((bad == 0, format!("{bad} mismatches")))
        }),
        check("distance zero iff monotone, n <= 3", || {
            let mut bad = 0;
            for n in 1..=3 {
                for f in all_tables(n) {
                    bad += (exact_distance(&f)?.distance.is_zero() != f.is_monotone()) as u32;
                }
            }
            Ok((bad == 0, format!("{bad} mismatches")))
        }),
        check("dichotomy ratio positive, n = 3", || {
            let tables: Vec<BitTableFunction> = all_tables(3).collect();
            let scan = dichotomy_scan(tables.iter())?;
            let min = scan.min_ratio.unwrap_or(Rational64::zero());
            Ok((
                min > Rational64::zero(),
                format!("min v*sigma/eps^2 = {min}"),
            ))
        }),
        check("testers never reject monotone functions", || {
            let mut rejections = 0;
            for f in MonotoneFamily::enumerate(4)?.functions() {
                let plan = BlockPlan::new(1, "selftest/monotone", 500).with_workers(workers);
                rejections += run_trials(&EdgeTester::new(4)?, &f, &plan)?.violations;
                rejections += run_trials(&WeightedPathTester::new(4, 0.5)?, &f, &plan)?.violations;
            }
            Ok((rejections == 0, format!("{rejections} rejections")))
        }),
        check("weighted tester matches its exact rate", || {
            let f = BitTableFunction::anti_dictator(8, 0)?;
            let exact = exact_weighted_rejection(&f, &MidLayerSpec::new(8, 0.5)?)?
                .to_f64()
                .unwrap();
            let t = rejection_probability(&f, TesterKind::Weighted, 0.5, 200_000, 2, workers)?;
            Ok((
                t.rate().agrees_with(exact, 4.0),
                format!("exact {exact:.6}, sampled {:.6}", t.rate().p),
            ))
        }),
        check("yes-draws are monotone", || {
            let mut rng = stream_rng(3, "selftest/yes", 0);
            let mut bad = 0;
            for _ in 0..50 {
                bad += !sample_yes(10, &mut rng)?
                    .to_ltf()?
                    .to_table()?
                    .is_monotone() as u32;
            }
            Ok((bad == 0, format!("{bad} non-monotone draws")))
        }),
        check("Fourier bound below exact distance", || {
            let ltf = LtfSpec::from_integers(&[-1; 5], 0)?;
            let b = fourier_distance_lower_bound(
                &ltf,
                BoundMode::Exact,
                &mut stream_rng(0, "selftest/fourier", 0),
            )?;
            let d = exact_distance(&ltf.to_table()?)?.distance;
            let ok = b
                .exact
                .is_some_and(|e| e <= d && e == Rational64::new(45, 256));
            Ok((ok, format!("bound {:.6} <= distance {d}", b.bound)))
        }),
        check("moment identities", || {
            let mut rng = stream_rng(4, "selftest/moments", 0);
            let q = QueryMatrix::random(3, 40, &mut rng)?;
            let r = moment_match_check(&q, 20_000, &mut rng)?;
            Ok((
                r.analytic_match && r.yes.within(4.0) && r.no.within(4.0),
                format!("{:?} {:?}", r.yes, r.no),
            ))
        }),
        check("odd gadget invariants, m <= 7, k <= 3", || {
            let mut bad = 0;
            for m in [3, 5, 7] {
                for k in 1..=3 {
                    bad += !OddGadget::new(m, k)?.check().holds() as u32;
                }
            }
            Ok((bad == 0, format!("{bad} failing gadgets")))
        }),
        check(
            "even lift preserves monotonicity and distance, n = 2",
            || {
                let mut bad = 0;
                for f in all_tables(2) {
                    let g = GridTable::from_function(&phi_even(&f, 4)?)?;
                    bad += (g.is_monotone() != f.is_monotone()) as u32;
                    bad +=
                        (grid_table_distance(&g)?.distance < exact_distance(&f)?.distance) as u32;
                }
                Ok((bad == 0, format!("{bad} failures")))
            },
        ),
        check("seeded runs repeat exactly", || {
            let f = BitTableFunction::parity(6)?;
            let a = rejection_probability(&f, TesterKind::Weighted, 0.5, 50_000, 5, 1)?;
            let b =
                rejection_probability(&f, TesterKind::Weighted, 0.5, 50_000, 5, workers.max(2))?;
            Ok((
                a == b,
                format!("{} vs {} violations", a.violations, b.violations),
            ))
        }),
    ];
    SelfTestReport { checks }
}

#[cfg(test)]
mod tests {
    #[test]
    fn selftest_passes() {
        let r = super::selftest(2);
        assert!(
            r.passed(),
            "{:#?}",
            r.checks.iter().filter(|c| !c.passed).collect::<Vec<_>>()
        );
    }
}
