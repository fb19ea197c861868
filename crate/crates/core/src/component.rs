//! Circles (excluded coordinates) against the section, the constructive
//! tangent frame, and the dimension of the `B`-saturation of the common
//! surviving subspace.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::diagram::{shape_orbit_dims, Composition, Coord, Tableau};
use crate::error::{Result, WlabError};
use crate::lie::{borel_basis, jordan_type, span_rank_exact, span_rank_mod_p, JordanType, Point};
use crate::linalg::Fp;
use crate::section::{build_section, LineSet};
use crate::weyl::{u_pi, CoordSet, UPi};

/// Overlay of the section on the excluded coordinates.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Markings {
    /// Excluded coordinates (circled).
    pub x: CoordSet,
    /// Circled coordinates carrying a STAR.
    pub y: CoordSet,
    /// `x` minus `y`.
    pub z: CoordSet,
    pub e: CoordSet,
    pub v: CoordSet,
    n: usize,
    #[serde(skip)]
    nilradical: CoordSet,
}

impl Markings {
    /// Cells of width 3: `1`, `*`, `0` on the nilradical, parenthesised when
    /// circled, blank elsewhere.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for i in 1..=self.n {
            let mut line = String::new();
            for j in 1..=self.n {
                let c = (i, j);
                let cell = if !self.nilradical.contains(&c) {
                    String::new()
                } else {
                    let mark = if self.e.contains(&c) {
                        "1"
                    } else if self.v.contains(&c) {
                        "*"
                    } else {
                        "0"
                    };
                    if self.x.contains(&c) {
                        format!("({mark})")
                    } else {
                        mark.to_string()
                    }
                };
                line.push_str(&format!("{cell:>4}"));
            }
            out.push_str(line.trim_end());
            out.push('\n');
        }
        out
    }
}

/// Builds the overlay; fails if a circle encloses a 1 or a STAR is not
/// circled.
pub fn markings(ls: &LineSet, up: &UPi) -> Result<Markings> {
    let e = ls.e();
    let v = ls.v();
    if let Some(&c) = e.intersection(&up.excluded).next() {
        return Err(WlabError::CircleOnOne(c));
    }
    if let Some(&c) = v.difference(&up.excluded).next() {
        return Err(WlabError::UnencircledStar(c));
    }
    let x = up.excluded.clone();
    let y: CoordSet = x.intersection(&v).copied().collect();
    let z: CoordSet = x.difference(&y).copied().collect();
    let t = ls.tableau();
    Ok(Markings {
        x,
        y,
        z,
        e,
        v,
        n: t.n(),
        nilradical: t.nilradical().into_iter().collect(),
    })
}

pub fn markings_of(comp: &Composition) -> Result<Markings> {
    markings(&build_section(comp)?, &u_pi(comp))
}

/// Every coordinate of `e` survives all pairs.
pub fn check_e_in_u(comp: &Composition) -> Result<bool> {
    let ls = build_section(comp)?;
    Ok(ls.e().is_subset(&u_pi(comp).u))
}

/// The coordinate of `e` in the row of `z` lying left of it.
pub fn right_going_witness(e: &CoordSet, (i, l): Coord) -> Result<Coord> {
    e.range((i, 0)..(i, l))
        .next()
        .copied()
        .ok_or(WlabError::NoWitness((i, l)))
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct FrameStep {
    /// Matrix unit `(k, l)` of the Borel.
    pub generator: Coord,
    /// Coordinate `(i, k)` of `e` it acts on.
    pub witness: Coord,
    /// Resulting circled coordinate `(i, l)`.
    pub produced: Coord,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct TangentFrame {
    pub steps: Vec<FrameStep>,
    /// The brackets of the generators with `e` span the `z` coordinates.
    pub spans: bool,
}

impl TangentFrame {
    /// Generators grouped by the matrix column they produce, left to right.
    pub fn batches(&self) -> Vec<Vec<Coord>> {
        let mut by_col: BTreeMap<usize, Vec<Coord>> = BTreeMap::new();
        for s in &self.steps {
            by_col.entry(s.produced.1).or_default().push(s.generator);
        }
        by_col
            .into_values()
            .map(|mut v| {
                v.sort();
                v
            })
            .collect()
    }
}

/// One generator per circled non-STAR coordinate, taken from the columns on
/// the right first.
pub fn tangent_frame(ls: &LineSet, marks: &Markings) -> Result<TangentFrame> {
    let e = ls.e();
    let mut order: Vec<Coord> = marks.z.iter().copied().collect();
    order.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    let mut steps = Vec::with_capacity(order.len());
    let mut used = CoordSet::new();
    for z in order {
        let witness = right_going_witness(&e, z)?;
        let generator = (witness.1, z.1);
        if !used.insert(generator) {
            return Err(WlabError::DuplicateGenerator(generator));
        }
        steps.push(FrameStep {
            generator,
            witness,
            produced: z,
        });
    }
    let targets: Vec<Coord> = marks.z.iter().copied().collect();
    let gens: Vec<Coord> = steps.iter().map(|s| s.generator).collect();
    let point: Point<BigInt> = e.iter().map(|&c| (c, BigInt::from(1))).collect();
    let spans = span_rank_exact(&gens, &point, &[], &targets) == targets.len();
    Ok(TangentFrame { steps, spans })
}

/// Dimension estimates at random points.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct RankOracleResult {
    pub samples: Vec<usize>,
    pub max: usize,
    pub sample_count: usize,
    pub seed: u64,
    /// The maximal sample recomputed over the integers.
    pub exact_max: usize,
    /// `dim m - g`, the expected value.
    pub expected: usize,
}

impl RankOracleResult {
    pub fn matches(&self) -> bool {
        self.max == self.expected && self.exact_max == self.max
    }

    pub fn bounded(&self) -> bool {
        self.samples.iter().all(|&s| s <= self.expected)
    }
}

/// Random integer point in `[1, 2^31]` on `support`.
pub fn integer_point(rng: &mut ChaCha8Rng, support: &CoordSet) -> Point<BigInt> {
    support
        .iter()
        .map(|&c| (c, BigInt::from(rng.gen_range(1u64..=1 << 31))))
        .collect()
}

pub fn reduce(f: Fp, x: &Point<BigInt>) -> Point<u64> {
    x.iter().map(|(&c, v)| (c, f.from_bigint(v))).collect()
}

/// `dim B·u`: `dim u` plus the rank of `y ↦ [y, x]` from the Borel into
/// the excluded coordinates, maximised over random `x ∈ u`.
pub fn dim_b_saturation(comp: &Composition, samples: usize, seed: u64) -> Result<RankOracleResult> {
    let t = Tableau::new(comp);
    let up = u_pi(comp);
    let g = crate::diagram::neighboring_pairs(comp).len();
    let f = Fp::default_prime();
    let basis = borel_basis(t.n());
    let targets: Vec<Coord> = up.excluded.iter().copied().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = Vec::with_capacity(samples);
    let mut best: Option<(usize, Point<BigInt>)> = None;
    for _ in 0..samples.max(1) {
        let x = integer_point(&mut rng, &up.u);
        let r = up.u.len() + span_rank_mod_p(f, &basis, &reduce(f, &x), &[], &targets);
        values.push(r);
        if best.as_ref().is_none_or(|(b, _)| r > *b) {
            best = Some((r, x));
        }
    }
    let (max, point) = best.expect("at least one sample");
    let exact_max = up.u.len() + span_rank_exact(&basis, &point, &[], &targets);
    Ok(RankOracleResult {
        samples: values,
        max,
        sample_count: samples.max(1),
        seed,
        exact_max,
        expected: t.dim_nilradical() - g,
    })
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct OrbitalVerdict {
    pub dim_b_u: usize,
    pub jordan_type: JordanType,
    /// Jordan types seen across samples; one entry when stable.
    pub jordan_types_seen: Vec<JordanType>,
    pub orbit_dim: usize,
    pub half_orbit_dim: usize,
    pub is_orbital_variety_closure: bool,
}

/// Compares `dim B·u` with half the dimension of the orbit of a generic
/// point of `u`.
pub fn orbital_closure_test(
    comp: &Composition,
    samples: usize,
    seed: u64,
) -> Result<OrbitalVerdict> {
    let oracle = dim_b_saturation(comp, samples, seed)?;
    let up = u_pi(comp);
    let n = comp.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9);
    let mut seen: Vec<JordanType> = Vec::new();
    for _ in 0..samples.max(1) {
        let jt = jordan_type(n, &integer_point(&mut rng, &up.u));
        if !seen.contains(&jt) {
            seen.push(jt);
        }
    }
    // The generic type dominates every specialisation.
    let generic = seen
        .iter()
        .max_by_key(|j| j.orbit_dim())
        .cloned()
        .expect("sampled");
    let heights = crate::diagram::conjugate(generic.parts());
    let dims = shape_orbit_dims(&heights);
    Ok(OrbitalVerdict {
        dim_b_u: oracle.max,
        jordan_type: generic,
        jordan_types_seen: seen,
        orbit_dim: dims.orbit,
        half_orbit_dim: dims.variety,
        is_orbital_variety_closure: oracle.max == dims.variety,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn comp(s: &str) -> Composition {
        s.parse().unwrap()
    }

    fn set(v: &[Coord]) -> CoordSet {
        v.iter().copied().collect()
    }

    #[test]
    fn marking_goldens() {
        let m = markings_of(&comp("1,3,3,1")).unwrap();
        assert_eq!(m.y, set(&[(4, 7), (5, 8)]));
        assert_eq!(m.z, set(&[(1, 3), (1, 4), (2, 6), (2, 7), (3, 7)]));
        let m = markings_of(&comp("1,3,2,1")).unwrap();
        assert_eq!(m.y, set(&[(5, 7)]));
        assert_eq!(m.z, set(&[(1, 3), (1, 4), (2, 6)]));
        let m = markings_of(&comp("4")).unwrap();
        assert!(m.x.is_empty() && m.y.is_empty() && m.z.is_empty());
    }

    #[test]
    fn witnesses() {
        let ls = build_section(&comp("1,3,3,1")).unwrap();
        assert_eq!(right_going_witness(&ls.e(), (3, 7)).unwrap(), (3, 6));
        assert_eq!(right_going_witness(&ls.e(), (1, 3)).unwrap(), (1, 2));
        let ls = build_section(&comp("1,3,2,1")).unwrap();
        assert_eq!(right_going_witness(&ls.e(), (2, 6)).unwrap(), (2, 5));
        assert_eq!(
            right_going_witness(&ls.e(), (5, 6)),
            Err(WlabError::NoWitness((5, 6)))
        );
    }

    #[test]
    fn frame_batches() {
        let c = comp("1,3,3,1");
        let ls = build_section(&c).unwrap();
        let m = markings(&ls, &u_pi(&c)).unwrap();
        let frame = tangent_frame(&ls, &m).unwrap();
        assert!(frame.spans);
        assert_eq!(
            frame.batches(),
            vec![
                vec![(2, 3)],
                vec![(2, 4)],
                vec![(5, 6)],
                vec![(5, 7), (6, 7)]
            ]
        );
    }

    #[test]
    fn saturation_dimensions() {
        let r = dim_b_saturation(&comp("1,1,1"), 4, 1).unwrap();
        assert_eq!((r.max, r.expected), (1, 1));
        let r = dim_b_saturation(&comp("3,2,1,1,2,3"), 4, 1).unwrap();
        assert_eq!(r.max, 55);
        assert!(r.matches());
    }

    #[test]
    fn orbital_closure() {
        let v = orbital_closure_test(&comp("1,2,2,1"), 8, 3).unwrap();
        assert_eq!((v.dim_b_u, v.half_orbit_dim), (11, 11));
        assert!(v.is_orbital_variety_closure);
        let v = orbital_closure_test(&comp("2,1,1,1,2"), 8, 3).unwrap();
        assert_eq!((v.dim_b_u, v.half_orbit_dim), (16, 17));
        assert!(!v.is_orbital_variety_closure);
        let v = orbital_closure_test(&comp("1,1,1"), 8, 3).unwrap();
        assert_eq!((v.dim_b_u, v.half_orbit_dim), (1, 2));
        assert_eq!(v.jordan_types_seen.len(), 1);
    }

    #[test]
    fn overlay() {
        let m = markings_of(&comp("1,1")).unwrap();
        assert_eq!(m.render(), "     (*)\n\n");
    }
}
