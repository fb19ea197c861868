//! VS quadruplets, the augmented element `e_VS`, root-graph cycles, adapted
//! `h`, and the dense-orbit diagnostic.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::component::{integer_point, reduce};
use crate::diagram::{neighboring_pairs, Composition, Coord, Tableau};
use crate::error::Result;
use crate::invariant::MinorWindow;
use crate::lie::{
    jordan_type, jordan_type_from_chains, parabolic_basis, span_rank_exact, span_rank_mod_p,
    unit_point, JordanType, Point,
};
use crate::linalg::{small_primes, solve_rational, Fp};
use crate::section::{build_section, LineSet};
use crate::weyl::{u_pi, CoordSet};

pub const DEFAULT_SAMPLES: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Badness {
    HeuristicBad,
    HeuristicGood,
    VerifiedBad,
    VerifiedGood,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VsPair {
    /// `(i, j, k, l)` with `(i, j)` and `(k, l)` in the support of `e`.
    pub quad: [usize; 4],
    /// `(j, k)`.
    pub connecting: Coord,
    /// The connecting coordinate carries a STAR.
    pub star_connected: bool,
    pub badness: Badness,
}

impl VsPair {
    pub fn is_quadruplet(&self) -> bool {
        self.star_connected
    }

    /// `(j, l)`, the coordinate adjoined to `e`.
    pub fn right_coordinate(&self) -> Coord {
        (self.quad[1], self.quad[3])
    }

    pub fn left_coordinate(&self) -> Coord {
        (self.quad[0], self.quad[2])
    }
}

/// `(a, b)` is a root vector of the parabolic.
fn in_parabolic(t: &Tableau, (a, b): Coord) -> bool {
    a != b && (a < b || t.same_block(a, b))
}

/// All VS pairs, quadruplets marked; badness is the heuristic one.
pub fn vs_pairs(ls: &LineSet) -> Vec<VsPair> {
    let t = ls.tableau();
    let e = ls.e();
    let v = ls.v();
    let mut out = Vec::new();
    for &(i, j) in &e {
        for &(k, l) in &e {
            if j == k || (i, j) == (k, l) {
                continue;
            }
            if v.contains(&(i, k)) || v.contains(&(j, l)) || !in_parabolic(t, (j, k)) {
                continue;
            }
            let star_connected = v.contains(&(j, k));
            out.push(VsPair {
                quad: [i, j, k, l],
                connecting: (j, k),
                star_connected,
                badness: if star_connected {
                    Badness::HeuristicBad
                } else {
                    Badness::HeuristicGood
                },
            });
        }
    }
    out
}

/// Generic-rank oracle for `dim (p·x + span S)` with `x` ranging over
/// `span support`.
#[derive(Clone, Debug)]
pub struct OrbitSampler {
    t: Tableau,
    basis: Vec<Coord>,
    targets: Vec<Coord>,
    field: Fp,
    samples: usize,
    seed: u64,
}

/// Maximal sampled rank, with the maximising point and its exact rank.
#[derive(Clone, Debug)]
pub struct SampledRank {
    pub max: usize,
    pub exact: usize,
    pub point: Point<BigInt>,
}

impl OrbitSampler {
    pub fn new(comp: &Composition, samples: usize, seed: u64) -> OrbitSampler {
        let t = Tableau::new(comp);
        OrbitSampler {
            basis: parabolic_basis(&t),
            targets: t.nilradical(),
            t,
            field: Fp::default_prime(),
            samples: samples.max(1),
            seed,
        }
    }

    pub fn with_prime(mut self, f: Fp) -> OrbitSampler {
        self.field = f;
        self
    }

    pub fn tableau(&self) -> &Tableau {
        &self.t
    }

    /// `dim m - g`.
    pub fn component_dim(&self) -> usize {
        self.t.dim_nilradical() - neighboring_pairs(self.t.composition()).len()
    }

    pub fn exact_rank(&self, x: &Point<BigInt>, extra: &CoordSet) -> usize {
        let extra: Vec<Coord> = extra.iter().copied().collect();
        span_rank_exact(&self.basis, x, &extra, &self.targets)
    }

    /// `max_x dim (p·x + span extra)`, `x` random on `support`.
    pub fn max_rank(&self, support: &CoordSet, extra: &CoordSet) -> SampledRank {
        let extra_v: Vec<Coord> = extra.iter().copied().collect();
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut best: Option<(usize, Point<BigInt>)> = None;
        for _ in 0..self.samples {
            let x = integer_point(&mut rng, support);
            let r = span_rank_mod_p(
                self.field,
                &self.basis,
                &reduce(self.field, &x),
                &extra_v,
                &self.targets,
            );
            if best.as_ref().is_none_or(|(b, _)| r > *b) {
                best = Some((r, x));
            }
        }
        let (max, point) = best.expect("at least one sample");
        let exact = span_rank_exact(&self.basis, &point, &extra_v, &self.targets);
        SampledRank { max, exact, point }
    }

    /// `dim P·span(S)`: generic rank of `p·x + span S` for `x ∈ span S`.
    pub fn saturation_dim(&self, s: &CoordSet) -> usize {
        self.max_rank(s, s).max
    }
}

/// Replaces heuristic badness of quadruplets by the removal test: a
/// quadruplet is verified-bad iff dropping its right coordinate from the
/// fully augmented set lowers `dim P·span`.
pub fn verify_badness(ls: &LineSet, pairs: &mut [VsPair], sampler: &OrbitSampler) {
    let e = ls.e();
    let mut all = e.clone();
    all.extend(
        pairs
            .iter()
            .filter(|p| p.is_quadruplet())
            .map(VsPair::right_coordinate),
    );
    let full = sampler.saturation_dim(&all);
    let mut cache: BTreeMap<Coord, bool> = BTreeMap::new();
    for p in pairs.iter_mut().filter(|p| p.is_quadruplet()) {
        let c = p.right_coordinate();
        let bad = *cache.entry(c).or_insert_with(|| {
            if e.contains(&c) {
                return false;
            }
            let mut reduced = all.clone();
            reduced.remove(&c);
            sampler.saturation_dim(&reduced) < full
        });
        p.badness = if bad {
            Badness::VerifiedBad
        } else {
            Badness::VerifiedGood
        };
    }
}

pub fn vs_quadruplets(ls: &LineSet, sampler: &OrbitSampler) -> Vec<VsPair> {
    let mut pairs: Vec<VsPair> = vs_pairs(ls)
        .into_iter()
        .filter(VsPair::is_quadruplet)
        .collect();
    verify_badness(ls, &mut pairs, sampler);
    pairs
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvsPolicy {
    #[default]
    VerifiedBadOnly,
    AllQuadruplets,
}

#[derive(Clone, Debug, Serialize)]
pub struct Evs {
    pub support: CoordSet,
    pub added: CoordSet,
    pub policy: EvsPolicy,
    /// Added coordinates lying outside the common surviving subspace.
    pub outside_u: CoordSet,
}

pub fn build_e_vs(comp: &Composition, ls: &LineSet, quads: &[VsPair], policy: EvsPolicy) -> Evs {
    let added: CoordSet = quads
        .iter()
        .filter(|q| match policy {
            EvsPolicy::AllQuadruplets => q.is_quadruplet(),
            EvsPolicy::VerifiedBadOnly => q.badness == Badness::VerifiedBad,
        })
        .map(VsPair::right_coordinate)
        .collect();
    let mut support = ls.e();
    support.extend(added.iter().copied());
    let u = u_pi(comp).u;
    let outside_u = support.difference(&u).copied().collect();
    Evs {
        support,
        added,
        policy,
        outside_u,
    }
}

/// Graph on `1..=n` whose edges are the roots of a support.
#[derive(Clone, Debug)]
pub struct RootGraph {
    adj: BTreeMap<usize, BTreeSet<usize>>,
    edges: CoordSet,
}

impl RootGraph {
    pub fn new(support: &CoordSet) -> RootGraph {
        let mut adj: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
        for &(i, j) in support {
            adj.entry(i).or_default().insert(j);
            adj.entry(j).or_default().insert(i);
        }
        RootGraph {
            adj,
            edges: support.clone(),
        }
    }

    pub fn vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.adj.keys().copied()
    }

    /// One cycle per edge outside a BFS spanning forest, each written from
    /// its least vertex towards the smaller of that vertex's two neighbours
    /// on the cycle, and closed.
    pub fn fundamental_cycles(&self) -> Vec<Vec<usize>> {
        let mut parent: BTreeMap<usize, usize> = BTreeMap::new();
        let mut depth: BTreeMap<usize, usize> = BTreeMap::new();
        let mut tree: BTreeSet<(usize, usize)> = BTreeSet::new();
        for root in self.vertices() {
            if depth.contains_key(&root) {
                continue;
            }
            depth.insert(root, 0);
            let mut queue = VecDeque::from([root]);
            while let Some(v) = queue.pop_front() {
                for &w in &self.adj[&v] {
                    if !depth.contains_key(&w) {
                        depth.insert(w, depth[&v] + 1);
                        parent.insert(w, v);
                        tree.insert((v.min(w), v.max(w)));
                        queue.push_back(w);
                    }
                }
            }
        }
        let mut cycles: Vec<Vec<usize>> = self
            .edges
            .iter()
            .filter(|e| !tree.contains(e))
            .map(|&(a, b)| {
                let (mut x, mut y) = (a, b);
                let (mut left, mut right) = (vec![a], vec![b]);
                while x != y {
                    if depth[&x] >= depth[&y] {
                        x = parent[&x];
                        left.push(x);
                    } else {
                        y = parent[&y];
                        right.push(y);
                    }
                }
                right.pop();
                left.extend(right.into_iter().rev());
                normalize_cycle(&left)
            })
            .collect();
        cycles.sort();
        cycles
    }
}

/// Rotates and orients an open cycle `v0 .. vk` and closes it.
pub fn normalize_cycle(cycle: &[usize]) -> Vec<usize> {
    let len = cycle.len();
    let start = (0..len).min_by_key(|&i| cycle[i]).expect("nonempty cycle");
    let next = cycle[(start + 1) % len];
    let prev = cycle[(start + len - 1) % len];
    let mut out: Vec<usize> = if next <= prev {
        (0..len).map(|s| cycle[(start + s) % len]).collect()
    } else {
        (0..len).map(|s| cycle[(start + len - s) % len]).collect()
    };
    out.push(out[0]);
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CycleInfo {
    pub cycle: Vec<usize>,
    pub edges: usize,
    pub even: bool,
}

/// Trace-zero rational diagonal with `h_i - h_j = -1` on a support.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdaptedH(pub Vec<BigRational>);

impl AdaptedH {
    pub fn eigenvalue(&self, (i, j): Coord) -> BigRational {
        &self.0[i - 1] - &self.0[j - 1]
    }

    pub fn pair(&self, weight: &[i32]) -> BigRational {
        weight
            .iter()
            .zip(&self.0)
            .map(|(&w, h)| BigRational::from_integer(BigInt::from(w)) * h)
            .fold(BigRational::zero(), |a, b| a + b)
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.0.iter().map(ToString::to_string).collect()
    }
}

impl Serialize for AdaptedH {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_strings().serialize(s)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CycleReport {
    pub independent: bool,
    pub cycles: Vec<CycleInfo>,
    pub adapted_h: Option<AdaptedH>,
}

/// Solves `h_i - h_j = -1` on `support` with `Σ h = 0`; free parameters
/// take distinct small primes.
pub fn adapted_h(n: usize, support: &CoordSet) -> Option<AdaptedH> {
    let one = BigRational::one();
    let mut a: Vec<Vec<BigRational>> = support
        .iter()
        .map(|&(i, j)| {
            let mut row = vec![BigRational::zero(); n];
            row[i - 1] = one.clone();
            row[j - 1] = -one.clone();
            row
        })
        .collect();
    let mut b: Vec<BigRational> = vec![-one.clone(); support.len()];
    a.push(vec![one; n]);
    b.push(BigRational::zero());
    let free: Vec<BigRational> = small_primes(n)
        .into_iter()
        .map(|p| BigRational::from_integer(BigInt::from(p)))
        .collect();
    solve_rational(&a, &b, &free).map(AdaptedH)
}

pub fn cycle_analysis(n: usize, support: &CoordSet) -> CycleReport {
    let cycles: Vec<CycleInfo> = RootGraph::new(support)
        .fundamental_cycles()
        .into_iter()
        .map(|c| CycleInfo {
            edges: c.len() - 1,
            even: (c.len() - 1) % 2 == 0,
            cycle: c,
        })
        .collect();
    CycleReport {
        independent: cycles.is_empty(),
        cycles,
        adapted_h: adapted_h(n, support),
    }
}

/// No two support coordinates share a row, nor a column.
pub fn distinct_rows_and_columns(support: &CoordSet) -> bool {
    let rows: BTreeSet<usize> = support.iter().map(|c| c.0).collect();
    let cols: BTreeSet<usize> = support.iter().map(|c| c.1).collect();
    rows.len() == support.len() && cols.len() == support.len()
}

/// Jordan type of `e` by powers and by chains; `None` for the second when
/// the support is not a union of chains.
pub fn jordan_type_of_e(ls: &LineSet) -> (JordanType, Option<JordanType>) {
    let n = ls.tableau().n();
    let e = ls.e();
    let by_powers = jordan_type(n, &unit_point(e.iter().copied()));
    let coords: Vec<Coord> = e.into_iter().collect();
    (by_powers, jordan_type_from_chains(n, &coords))
}

/// Exact `dim p·x`.
pub fn dim_p_orbit(t: &Tableau, x: &Point<BigInt>) -> usize {
    span_rank_exact(&parabolic_basis(t), x, &[], &t.nilradical())
}

/// `p·e ∩ span V = 0`.
pub fn null_intersection_check(ls: &LineSet) -> bool {
    let t = ls.tableau();
    let x = unit_point(ls.e());
    let v: Vec<Coord> = ls.v().into_iter().collect();
    let basis = parabolic_basis(t);
    let targets = t.nilradical();
    span_rank_exact(&basis, &x, &v, &targets)
        == span_rank_exact(&basis, &x, &[], &targets) + v.len()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Regular,
    WeaklyRegularNoDenseOrbit,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Regular => "regular",
            Verdict::WeaklyRegularNoDenseOrbit => "weakly-regular-no-dense-orbit",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DenseOrbitReport {
    /// Generic `dim p·x`, `x ∈ E_VS`.
    pub d1: usize,
    /// Generic `dim (p·x + E_VS)`.
    pub d2: usize,
    /// `d1` recomputed exactly at the maximising sample.
    pub d1_exact: usize,
    pub d2_exact: usize,
    pub dim_component: usize,
    pub has_cycle: bool,
    pub verdict: Verdict,
    /// Jordan type at the maximising sample for `d1`.
    pub generic_jordan: JordanType,
}

pub fn dense_orbit_diagnostic(sampler: &OrbitSampler, e_vs: &CoordSet) -> DenseOrbitReport {
    let n = sampler.tableau().n();
    let d1 = sampler.max_rank(e_vs, &CoordSet::new());
    let d2 = sampler.max_rank(e_vs, e_vs);
    let target = sampler.component_dim();
    let has_cycle = !RootGraph::new(e_vs).fundamental_cycles().is_empty();
    let verdict = if d1.max == target {
        Verdict::Regular
    } else if d2.max == target && has_cycle {
        Verdict::WeaklyRegularNoDenseOrbit
    } else {
        Verdict::Inconclusive
    };
    DenseOrbitReport {
        d1: d1.max,
        d2: d2.max,
        d1_exact: d1.exact,
        d2_exact: d2.exact,
        dim_component: target,
        has_cycle,
        verdict,
        generic_jordan: jordan_type(n, &d1.point),
    }
}

/// `Σ (λ_u - λ_p - (d - 1))` over pairs: `λ_u` the `h`-eigenvalue of the
/// pair's STAR coordinate, `λ_p` the pairing of `h` with the invariant's
/// weight, `d` its degree.
pub fn eigenvalue_sum_rule(ls: &LineSet, h: &AdaptedH) -> BigRational {
    let comp = ls.tableau().composition();
    let mut total = BigRational::zero();
    for pair in neighboring_pairs(comp) {
        let Some(star) = ls.star_of(&pair) else {
            continue;
        };
        let win = MinorWindow::of_pair(comp, &pair);
        let lambda_u = h.eigenvalue(star.coord());
        let lambda_p = h.pair(&win.weight(comp.n()));
        let d = BigRational::from_integer(BigInt::from(win.degree as i64 - 1));
        total += lambda_u - lambda_p - d;
    }
    total
}

#[derive(Clone, Debug, Serialize)]
pub struct QuadEntry {
    pub quad: [usize; 4],
    pub badness: Badness,
}

#[derive(Clone, Debug, Serialize)]
pub struct RegularityReport {
    pub e: CoordSet,
    pub e_vs: CoordSet,
    pub quadruplets: Vec<QuadEntry>,
    pub jordan_e: JordanType,
    pub jordan_evs: JordanType,
    pub dim_p_e: usize,
    pub dim_p_evs: usize,
    pub dim_component: usize,
    pub verdict: Verdict,
    pub adapted_h: Option<AdaptedH>,
    pub policy: EvsPolicy,
    pub evs_outside_u: CoordSet,
    pub cycles: Vec<CycleInfo>,
    pub null_intersection: bool,
    pub e_regular: bool,
    pub diagnostic: DenseOrbitReport,
}

pub fn analyze_regularity(
    comp: &Composition,
    policy: EvsPolicy,
    samples: usize,
    seed: u64,
) -> Result<RegularityReport> {
    let ls = build_section(comp)?;
    Ok(regularity_report(
        comp,
        &ls,
        policy,
        &OrbitSampler::new(comp, samples, seed),
    ))
}

pub fn regularity_report(
    comp: &Composition,
    ls: &LineSet,
    policy: EvsPolicy,
    sampler: &OrbitSampler,
) -> RegularityReport {
    let t = ls.tableau();
    let n = t.n();
    let e = ls.e();
    let quads = vs_quadruplets(ls, sampler);
    let evs = build_e_vs(comp, ls, &quads, policy);
    let diagnostic = dense_orbit_diagnostic(sampler, &evs.support);
    let e_point = unit_point(e.iter().copied());
    let dim_p_e = dim_p_orbit(t, &e_point);
    let cycles = cycle_analysis(n, &evs.support);
    RegularityReport {
        quadruplets: quads
            .iter()
            .map(|q| QuadEntry {
                quad: q.quad,
                badness: q.badness,
            })
            .collect(),
        jordan_e: jordan_type(n, &e_point),
        jordan_evs: diagnostic.generic_jordan.clone(),
        dim_p_e,
        dim_p_evs: diagnostic.d1,
        dim_component: diagnostic.dim_component,
        verdict: diagnostic.verdict,
        adapted_h: cycles.adapted_h,
        policy,
        evs_outside_u: evs.outside_u,
        cycles: cycles.cycles,
        null_intersection: null_intersection_check(ls),
        e_regular: dim_p_e == diagnostic.dim_component,
        diagnostic,
        e,
        e_vs: evs.support,
    }
}
