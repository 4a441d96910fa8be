//! Exact ground truth for monotonicity.
//!
//! A function is `ε`-far from monotone exactly when it has `ε 2^n` pairwise
//! disjoint violated comparable pairs, so the distance to monotonicity is the
//! size of a maximum matching in the graph of violated pairs divided by
//! `2^n`. The same matcher restricted to violated hypercube edges inside the
//! middle layers gives `σ`.

mod brute;

use num_rational::Rational64;
use rand::Rng;
use serde::Serialize;

use crate::error::{LabError, Result};
use crate::func::{full_mask, BitTableFunction, MidLayerSpec};
use crate::matching::BipartiteGraph;

pub use brute::{
    brute_force_distance, brute_force_distance_with, MonotoneFamily, BRUTE_FORCE_MAX_N,
};

/// Largest dimension accepted by [`exact_distance`].
pub const EXACT_DISTANCE_MAX_N: usize = 20;
/// Cap on materialised violated comparable pairs.
pub const PAIR_EDGE_BUDGET: u64 = 1 << 25;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphMode {
    AllComparablePairs,
    HypercubeEdgesOnly,
    MidlayerEdgesOnly,
}

/// Bipartite graph of violated pairs `(x, y)` with `x ≺ y`, `f(x) = 1`,
/// `f(y) = 0`. Left vertices are the 1-points, right vertices the 0-points.
#[derive(Clone, Debug)]
pub struct ViolationGraph {
    n: usize,
    mode: GraphMode,
    left: Vec<u64>,
    right: Vec<u64>,
    graph: BipartiteGraph,
}

/// Index of each point within its side of the bipartition.
fn side_indices(f: &BitTableFunction) -> (Vec<u64>, Vec<u64>, Vec<u32>) {
    let mut left = Vec::new();
    let mut right = Vec::new();
    let mut index = vec![0u32; f.size() as usize];
    for x in 0..f.size() {
        if f.value(x) {
            index[x as usize] = left.len() as u32;
            left.push(x);
        } else {
            index[x as usize] = right.len() as u32;
            right.push(x);
        }
    }
    (left, right, index)
}

impl ViolationGraph {
    /// All violated comparable pairs, found lazily by pruned superset search.
    pub fn all_comparable_pairs(f: &BitTableFunction) -> Result<Self> {
        let n = f.n();
        if n > EXACT_DISTANCE_MAX_N {
            return Err(LabError::BudgetExceeded(format!(
                "all-pairs violation graph supports n <= {EXACT_DISTANCE_MAX_N}, got {n}"
            )));
        }
        let zeros_above = zeros_above(f);
        let edges: u64 = (0..f.size())
            .filter(|&x| f.value(x))
            .map(|x| zeros_above[x as usize] as u64)
            .sum();
        if edges > PAIR_EDGE_BUDGET {
            return Err(LabError::BudgetExceeded(format!(
                "{edges} violated comparable pairs exceed the budget of {PAIR_EDGE_BUDGET}"
            )));
        }
        let (left, right, index) = side_indices(f);
        let full = full_mask(n);
        let mut stack = Vec::new();
        let adjacency = left.iter().map(|&x| {
            // DFS over supersets x | S where S only grows by higher free bits;
            // subtrees with no 0-point above them are cut.
            let mut out = Vec::with_capacity(zeros_above[x as usize] as usize);
            stack.clear();
            stack.push((x, 0usize));
            while let Some((s, from)) = stack.pop() {
                if zeros_above[s as usize] == 0 {
                    continue;
                }
                if s != x && !f.value(s) {
                    out.push(index[s as usize]);
                }
                let free = full & !s;
                for b in from..n {
                    if free >> b & 1 == 1 {
                        stack.push((s | 1 << b, b + 1));
                    }
                }
            }
            out.sort_unstable();
            out
        });
        let graph = BipartiteGraph::from_adjacency(right.len(), adjacency.collect::<Vec<_>>());
        Ok(Self {
            n,
            mode: GraphMode::AllComparablePairs,
            left,
            right,
            graph,
        })
    }

    /// Violated hypercube edges.
    pub fn hypercube_edges(f: &BitTableFunction) -> Self {
        Self::edges_filtered(f, GraphMode::HypercubeEdgesOnly, |_, _| true)
    }

    /// Violated edges with both endpoints in the middle layers.
    pub fn midlayer_edges(f: &BitTableFunction, spec: &MidLayerSpec) -> Result<Self> {
        if spec.n() != f.n() {
            return Err(LabError::DimensionMismatch {
                expected: f.n(),
                actual: spec.n(),
            });
        }
        Ok(Self::edges_filtered(
            f,
            GraphMode::MidlayerEdgesOnly,
            |x, y| spec.contains(x) && spec.contains(y),
        ))
    }

    fn edges_filtered(
        f: &BitTableFunction,
        mode: GraphMode,
        keep: impl Fn(u64, u64) -> bool,
    ) -> Self {
        let (left, right, index) = side_indices(f);
        let mut edges = Vec::new();
        for i in 0..f.n() {
            f.for_each_violated_edge_in_direction(i, |x| {
                let y = x | 1 << i;
                if keep(x, y) {
                    edges.push((index[x as usize], index[y as usize]));
                }
            });
        }
        let graph = BipartiteGraph::from_edges(left.len(), right.len(), &edges);
        Self {
            n: f.n(),
            mode,
            left,
            right,
            graph,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mode(&self) -> GraphMode {
        self.mode
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    /// Violated pairs as `(lower, upper)` masks.
    pub fn pairs(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        (0..self.left.len()).flat_map(move |u| {
            self.graph
                .neighbours(u)
                .iter()
                .map(move |&v| (self.left[u], self.right[v as usize]))
        })
    }

    /// Size of a maximum set of vertex-disjoint violated pairs, with the pairs.
    pub fn max_matching(&self) -> (usize, Vec<(u64, u64)>) {
        let m = self.graph.maximum_matching();
        let pairs = m
            .pairs()
            .map(|(u, v)| (self.left[u], self.right[v]))
            .collect();
        (m.size, pairs)
    }
}

/// `zeros_above[x] = #{y ⪰ x : f(y) = 0}`, by a superset-sum transform.
fn zeros_above(f: &BitTableFunction) -> Vec<u32> {
    let mut counts: Vec<u32> = (0..f.size()).map(|x| u32::from(!f.value(x))).collect();
    for i in 0..f.n() {
        let bit = 1usize << i;
        for x in 0..counts.len() {
            if x & bit == 0 {
                counts[x] += counts[x | bit];
            }
        }
    }
    counts
}

/// All violated hypercube edges `(lower, upper)`.
pub fn violated_edges(f: &BitTableFunction) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    for i in 0..f.n() {
        f.for_each_violated_edge_in_direction(i, |x| out.push((x, x | 1 << i)));
    }
    out.sort_unstable();
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MatchingDistance {
    pub matching_size: u64,
    #[serde(serialize_with = "crate::stats::ser_ratio")]
    pub distance: Rational64,
}

/// Exact distance to monotonicity via the violated-pair matching.
pub fn exact_distance(f: &BitTableFunction) -> Result<MatchingDistance> {
    let graph = ViolationGraph::all_comparable_pairs(f)?;
    let (size, _) = graph.max_matching();
    Ok(MatchingDistance {
        matching_size: size as u64,
        distance: Rational64::new(size as i64, f.size() as i64),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SigmaV {
    pub violated_edges: u64,
    pub midlayer_matching: u64,
    /// `|violated edges| / 2^n`.
    #[serde(serialize_with = "crate::stats::ser_ratio")]
    pub v: Rational64,
    /// Largest matching of violated middle-layer edges over `2^n`.
    #[serde(serialize_with = "crate::stats::ser_ratio")]
    pub sigma: Rational64,
}

pub fn sigma_v(f: &BitTableFunction, spec: &MidLayerSpec) -> Result<SigmaV> {
    let violated = f.violated_edge_count();
    let (matched, _) = ViolationGraph::midlayer_edges(f, spec)?.max_matching();
    let size = f.size() as i64;
    Ok(SigmaV {
        violated_edges: violated,
        midlayer_matching: matched as u64,
        v: Rational64::new(violated as i64, size),
        sigma: Rational64::new(matched as i64, size),
    })
}

/// Everything the oracle knows about one function.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistanceReport {
    pub n: usize,
    pub eps: f64,
    pub matching_size: u64,
    #[serde(serialize_with = "crate::stats::ser_ratio")]
    pub distance: Rational64,
    #[serde(serialize_with = "crate::stats::ser_ratio")]
    pub v: Rational64,
    #[serde(serialize_with = "crate::stats::ser_ratio")]
    pub sigma: Rational64,
    pub monotone: bool,
}

pub fn distance_report(f: &BitTableFunction, spec: &MidLayerSpec) -> Result<DistanceReport> {
    let dist = exact_distance(f)?;
    let sv = sigma_v(f, spec)?;
    Ok(DistanceReport {
        n: f.n(),
        eps: spec.eps(),
        matching_size: dist.matching_size,
        distance: dist.distance,
        v: sv.v,
        sigma: sv.sigma,
        monotone: f.is_monotone(),
    })
}

/// `v·σ / ε²` with `ε` the exact distance and the middle layers taken for
/// `ε` clamped into `[1/n, 1/2]`. `None` for monotone `f`.
pub fn dichotomy_ratio(f: &BitTableFunction) -> Result<Option<Rational64>> {
    let eps = exact_distance(f)?.distance;
    if eps == Rational64::from_integer(0) {
        return Ok(None);
    }
    let spec = MidLayerSpec::clamped(f.n(), num_traits::ToPrimitive::to_f64(&eps).unwrap())?;
    let sv = sigma_v(f, &spec)?;
    Ok(Some(sv.v * sv.sigma / (eps * eps)))
}

#[derive(Clone, Debug, Serialize)]
pub struct DichotomyScan {
    pub functions: u64,
    pub far_functions: u64,
    #[serde(serialize_with = "crate::stats::ser_opt_ratio")]
    pub min_ratio: Option<Rational64>,
    pub argmin_hex: Option<String>,
}

pub fn dichotomy_scan<'a>(
    functions: impl IntoIterator<Item = &'a BitTableFunction>,
) -> Result<DichotomyScan> {
    let mut scan = DichotomyScan {
        functions: 0,
        far_functions: 0,
        min_ratio: None,
        argmin_hex: None,
    };
    for f in functions {
        scan.functions += 1;
        if let Some(r) = dichotomy_ratio(f)? {
            scan.far_functions += 1;
            if scan.min_ratio.is_none_or(|m| r < m) {
                scan.min_ratio = Some(r);
                scan.argmin_hex = Some(f.to_hex());
            }
        }
    }
    Ok(scan)
}

/// Random monotone function: upward closure of a few random points.
pub fn random_monotone<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<BitTableFunction> {
    let generators = rng.random_range(0..=2 * n);
    let mut seeds = Vec::with_capacity(generators);
    for _ in 0..generators {
        let w = rng.random_range(0..=n);
        seeds.push(crate::func::random_layer_point(n, w, rng));
    }
    let base = BitTableFunction::from_fn(n, |x| seeds.contains(&x))?;
    Ok(base.upward_closure())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn r(p: i64, q: i64) -> Rational64 {
        Rational64::new(p, q)
    }

    #[test]
    fn violated_edge_examples() {
        let anti = BitTableFunction::anti_dictator(3, 0).unwrap();
        let e = violated_edges(&anti);
        assert_eq!(e.len(), 4);
        assert!(e.iter().all(|&(x, y)| y == x | 1 && x & 1 == 0));
        assert!(violated_edges(&BitTableFunction::or(3).unwrap()).is_empty());
        let par = BitTableFunction::parity(2).unwrap();
        assert_eq!(violated_edges(&par), vec![(0b01, 0b11), (0b10, 0b11)]);
    }

    #[test]
    fn distance_examples() {
        let par = BitTableFunction::parity(2).unwrap();
        let d = exact_distance(&par).unwrap();
        assert_eq!((d.matching_size, d.distance), (1, r(1, 4)));
        let anti = BitTableFunction::anti_dictator(3, 0).unwrap();
        let d = exact_distance(&anti).unwrap();
        assert_eq!((d.matching_size, d.distance), (4, r(1, 2)));
        let or = BitTableFunction::or(5).unwrap();
        assert_eq!(exact_distance(&or).unwrap().distance, r(0, 1));
    }

    #[test]
    fn all_pairs_graph_contains_exactly_violations() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for n in 1..=7 {
            let f = BitTableFunction::random(n, &mut rng).unwrap();
            let g = ViolationGraph::all_comparable_pairs(&f).unwrap();
            let mut got: Vec<_> = g.pairs().collect();
            got.sort_unstable();
            let mut want = Vec::new();
            for x in 0..f.size() {
                for y in 0..f.size() {
                    if x != y && x & y == x && f.value(x) && !f.value(y) {
                        want.push((x, y));
                    }
                }
            }
            assert_eq!(got, want, "n = {n}");
        }
    }

    #[test]
    fn matching_pairs_are_disjoint_violations() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let f = BitTableFunction::random(8, &mut rng).unwrap();
        let (size, pairs) = ViolationGraph::all_comparable_pairs(&f)
            .unwrap()
            .max_matching();
        assert_eq!(size, pairs.len());
        let mut used = std::collections::HashSet::new();
        for (x, y) in pairs {
            assert!(x & y == x && x != y && f.value(x) && !f.value(y));
            assert!(used.insert(x) && used.insert(y));
        }
    }

    #[test]
    fn sigma_v_examples() {
        let anti = BitTableFunction::anti_dictator(8, 0).unwrap();
        let spec = MidLayerSpec::new(8, 0.5).unwrap();
        let sv = sigma_v(&anti, &spec).unwrap();
        assert_eq!(sv.sigma, r(1, 2));
        assert_eq!(sv.v, r(1, 2));
        let or = BitTableFunction::or(6).unwrap();
        let sv = sigma_v(&or, &MidLayerSpec::new(6, 0.5).unwrap()).unwrap();
        assert_eq!((sv.v, sv.sigma), (r(0, 1), r(0, 1)));
    }

    #[test]
    fn midlayer_restriction_drops_outer_edges() {
        // n = 200 is out of table range; use a narrow band on n = 20 via a
        // hand-made spec where the band misses layer 0.
        let spec = MidLayerSpec::new(20, 0.5).unwrap();
        assert!(spec.covers_all_layers());
        let f = BitTableFunction::anti_dictator(10, 3).unwrap();
        let g = ViolationGraph::midlayer_edges(&f, &MidLayerSpec::new(10, 0.5).unwrap()).unwrap();
        assert_eq!(g.edge_count(), 512);
        assert_eq!(g.mode(), GraphMode::MidlayerEdgesOnly);
    }

    #[test]
    fn budget_enforced() {
        let f = BitTableFunction::constant(21.min(crate::func::EXACT_MAX_N), true).unwrap();
        assert!(matches!(
            exact_distance(&f),
            Err(LabError::BudgetExceeded(_))
        ));
    }

    #[test]
    fn zero_distance_iff_monotone_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..50 {
            let g = random_monotone(7, &mut rng).unwrap();
            assert!(g.is_monotone());
            assert_eq!(exact_distance(&g).unwrap().distance, r(0, 1));
        }
    }

    #[test]
    fn report_serialises_ratios_as_strings() {
        let par = BitTableFunction::parity(2).unwrap();
        let rep = distance_report(&par, &MidLayerSpec::new(2, 0.5).unwrap()).unwrap();
        let v = serde_json::to_value(&rep).unwrap();
        assert_eq!(v["distance"], "1/4");
        assert_eq!(v["v"], "1/2");
        assert_eq!(v["sigma"], "1/4");
    }
}
