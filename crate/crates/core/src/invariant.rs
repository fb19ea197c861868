//! The invariant attached to a pair of equal-height columns: the leading
//! coefficient in `a` of a corner minor of `x + a·Id`, restricted to the
//! window of rows and columns between the two columns.
//!
//! Two independent routes are provided. The symbolic route expands the minor
//! row by row, keyed on the set of used columns. The modular route evaluates
//! the minor at a point for `N + 1` values of `a` and interpolates.

use std::collections::HashMap;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::diagram::{neighboring_pairs, Composition, Coord, NeighborPair, Tableau};
use crate::error::{Result, WlabError};
use crate::linalg::{det_mod_p, interpolate_mod_p, Fp};
use crate::poly::{Monomial, SparsePoly};
use crate::section::LineSet;
use crate::weyl::{excluded_direct, CoordSet};

pub const DEFAULT_TERM_BUDGET: usize = 5_000_000;
pub const DEFAULT_TRIALS: usize = 32;
pub const MIN_TRIALS: usize = 20;

/// Term budget from `WLAB_TERM_BUDGET`, else the default.
pub fn term_budget_from_env() -> usize {
    std::env::var("WLAB_TERM_BUDGET")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_TERM_BUDGET)
}

/// Geometry of the minor for two columns of equal height.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MinorWindow {
    pub height: usize,
    pub left: usize,
    pub right: usize,
    /// First matrix row of the minor; also the first entry of the left column.
    pub first: usize,
    /// Last matrix column of the minor; the bottom entry of the right column.
    pub last: usize,
    /// Side length of the minor.
    pub size: usize,
    /// Power of `a` carried by the leading coefficient.
    pub a_power: usize,
    /// Degree of the invariant in the `x` coordinates.
    pub degree: usize,
}

impl MinorWindow {
    pub fn new(comp: &Composition, left: usize, right: usize) -> Result<MinorWindow> {
        let parts = comp.parts();
        let k = parts.len();
        if left == 0 || right > k || left >= right || parts[left - 1] != parts[right - 1] {
            return Err(WlabError::NotNeighbors { left, right });
        }
        let t = Tableau::new(comp);
        let s = parts[left - 1];
        let first = t.column(left)[0];
        let last = t.bottom(right);
        let size = last + 1 - first - s;
        let a_power = (left + 1..right)
            .map(|c| parts[c - 1].saturating_sub(s))
            .sum();
        let degree = (left..right).map(|c| parts[c - 1].min(s)).sum();
        Ok(MinorWindow {
            height: s,
            left,
            right,
            first,
            last,
            size,
            a_power,
            degree,
        })
    }

    pub fn of_pair(comp: &Composition, pair: &NeighborPair) -> MinorWindow {
        MinorWindow::new(comp, pair.left, pair.right)
            .expect("a neighbouring pair has equal heights")
    }

    /// Matrix row of minor row `i`.
    pub fn row(&self, i: usize) -> usize {
        self.first + i
    }

    /// Matrix column of minor column `j`.
    pub fn col(&self, j: usize) -> usize {
        self.first + self.height + j
    }

    /// `+1` on the first `s` window entries, `-1` on the last `s`.
    pub fn weight(&self, n: usize) -> Vec<i32> {
        let mut w = vec![0; n];
        for e in self.first..self.first + self.height {
            w[e - 1] += 1;
        }
        for e in self.last + 1 - self.height..=self.last {
            w[e - 1] -= 1;
        }
        w
    }
}

/// One entry of the minor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Cell {
    Zero,
    One,
    A,
    Var(Coord),
}

fn cell_of_point(t: &Tableau, r: usize, c: usize) -> Cell {
    if r == c {
        Cell::A
    } else if t.in_nilradical((r, c)) {
        Cell::Var((r, c))
    } else {
        Cell::Zero
    }
}

/// Expands `det` of the minor whose cells are given by `cell`, keeping only
/// as many terms as the budget allows.
fn expand(
    win: &MinorWindow,
    cell: impl Fn(usize, usize) -> Cell,
    budget: usize,
) -> Result<SparsePoly> {
    type Key = (Vec<Coord>, u32);
    let n = win.size;
    let mut states: HashMap<u64, HashMap<Key, i64>> = HashMap::new();
    states.insert(0, HashMap::from([((Vec::new(), 0), 1)]));
    for i in 0..n {
        let mut next: HashMap<u64, HashMap<Key, i64>> = HashMap::new();
        let mut total = 0usize;
        for (mask, poly) in &states {
            for j in 0..n {
                if mask & (1 << j) != 0 {
                    continue;
                }
                let c = cell(win.row(i), win.col(j));
                if c == Cell::Zero {
                    continue;
                }
                let flips = (mask >> (j + 1)).count_ones();
                let sign = if flips % 2 == 0 { 1 } else { -1 };
                let target = next.entry(mask | (1 << j)).or_default();
                for ((vars, a), coeff) in poly {
                    let mut key = (vars.clone(), *a);
                    match c {
                        Cell::A => key.1 += 1,
                        Cell::Var(v) => {
                            let pos = key.0.partition_point(|&w| w < v);
                            key.0.insert(pos, v);
                        }
                        Cell::One | Cell::Zero => {}
                    }
                    let slot = target.entry(key).or_insert(0);
                    *slot += sign * coeff;
                }
            }
        }
        for poly in next.values_mut() {
            poly.retain(|_, c| *c != 0);
            total += poly.len();
        }
        if total > budget {
            return Err(WlabError::SymbolicBlowup { budget });
        }
        states = next;
    }
    let mut out = SparsePoly::new();
    if let Some(poly) = states.remove(&((1u64 << n) - 1)) {
        for ((vars, a), c) in poly {
            out.add_term(Monomial::from_coords(&vars, a), BigInt::from(c));
        }
    }
    Ok(out)
}

/// The minor as a polynomial in `x` and `a`.
pub fn minor_symbolic(comp: &Composition, win: &MinorWindow, budget: usize) -> Result<SparsePoly> {
    if win.size > 63 {
        return Err(WlabError::SymbolicBlowup { budget });
    }
    let t = Tableau::new(comp);
    expand(win, |r, c| cell_of_point(&t, r, c), budget)
}

/// Leading coefficient of the minor, checked to have no lower powers of `a`
/// and to be homogeneous of the expected degree.
pub fn bs_invariant(comp: &Composition, pair: &NeighborPair, budget: usize) -> Result<SparsePoly> {
    leading_symbolic(comp, &MinorWindow::of_pair(comp, pair), budget)
}

fn leading_symbolic(comp: &Composition, win: &MinorWindow, budget: usize) -> Result<SparsePoly> {
    let full = minor_symbolic(comp, win, budget)?;
    if full.min_a_exp().is_some_and(|m| (m as usize) < win.a_power) {
        return Err(WlabError::lemma(
            "leading power",
            format!(
                "columns {}-{}: a power below {}",
                win.left, win.right, win.a_power
            ),
        ));
    }
    let lead = full.a_coefficient(win.a_power as u32);
    if let Some(m) = lead
        .terms()
        .keys()
        .find(|m| m.degree() as usize != win.degree)
    {
        return Err(WlabError::lemma(
            "degree",
            format!(
                "columns {}-{}: monomial of degree {} expected {}",
                win.left,
                win.right,
                m.degree(),
                win.degree
            ),
        ));
    }
    Ok(lead)
}

/// Random sampling over a prime field, deterministic in its seed.
#[derive(Clone, Debug)]
pub struct ModularSampler {
    pub field: Fp,
    pub trials: usize,
    pub seed: u64,
    rng: ChaCha8Rng,
}

impl ModularSampler {
    pub fn new(prime: u64, seed: u64, trials: usize) -> Result<ModularSampler> {
        let field = Fp::new(prime).ok_or_else(|| {
            WlabError::InvalidConfig(format!("{prime} is not an odd prime below 2^63"))
        })?;
        if trials < MIN_TRIALS {
            return Err(WlabError::InvalidConfig(format!(
                "at least {MIN_TRIALS} trials are needed, got {trials}"
            )));
        }
        Ok(ModularSampler {
            field,
            trials,
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn with_defaults(seed: u64) -> ModularSampler {
        ModularSampler::new(crate::linalg::DEFAULT_PRIME, seed, DEFAULT_TRIALS)
            .expect("defaults are valid")
    }

    /// A nonzero residue.
    pub fn residue(&mut self) -> u64 {
        self.rng.gen_range(1..self.field.modulus())
    }

    /// A point with random entries on `support` and zero elsewhere.
    pub fn point(&mut self, support: impl IntoIterator<Item = Coord>) -> HashMap<Coord, u64> {
        support.into_iter().map(|c| (c, self.residue())).collect()
    }

    /// Upper bound on the chance that a nonzero polynomial of this degree
    /// vanished at every trial point.
    pub fn error_bound(&self, degree: usize) -> f64 {
        (degree as f64 / self.field.modulus() as f64).powi(self.trials as i32)
    }
}

/// Coefficients in `a` of the minor at the point `x`.
pub fn minor_a_coefficients(
    f: Fp,
    comp: &Composition,
    win: &MinorWindow,
    x: &dyn Fn(Coord) -> u64,
) -> Vec<u64> {
    let t = Tableau::new(comp);
    let n = win.size;
    let values: Vec<u64> = (0..=n as u64)
        .map(|a| {
            let m: Vec<Vec<u64>> = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| match cell_of_point(&t, win.row(i), win.col(j)) {
                            Cell::A => a,
                            Cell::Var(v) => x(v),
                            Cell::One => 1,
                            Cell::Zero => 0,
                        })
                        .collect()
                })
                .collect();
            det_mod_p(f, m)
        })
        .collect();
    interpolate_mod_p(f, &values)
}

fn leading_mod_p(
    f: Fp,
    comp: &Composition,
    win: &MinorWindow,
    x: &dyn Fn(Coord) -> u64,
) -> Result<u64> {
    let coeffs = minor_a_coefficients(f, comp, win, x);
    if coeffs[..win.a_power].iter().any(|&c| c != 0) {
        return Err(WlabError::lemma(
            "leading power",
            format!(
                "columns {}-{}: a power below {} at a sample point",
                win.left, win.right, win.a_power
            ),
        ));
    }
    Ok(coeffs[win.a_power])
}

/// Value of the invariant at `x` modulo the field's prime.
pub fn bs_invariant_mod_p(
    f: Fp,
    comp: &Composition,
    pair: &NeighborPair,
    x: &dyn Fn(Coord) -> u64,
) -> Result<u64> {
    leading_mod_p(f, comp, &MinorWindow::of_pair(comp, pair), x)
}

/// How the invariant of one pair restricts to `e + V`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Restriction {
    pub pair: NeighborPair,
    pub coordinate: Coord,
    pub sign: i8,
}

fn restriction_cell(e: &CoordSet, v: &CoordSet, r: usize, c: usize) -> Cell {
    if r == c {
        Cell::A
    } else if e.contains(&(r, c)) {
        Cell::One
    } else if v.contains(&(r, c)) {
        Cell::Var((r, c))
    } else {
        Cell::Zero
    }
}

/// Symbolic restriction: ONE coordinates set to 1, STAR coordinates kept as
/// variables, all others 0.
pub fn restrict_to_section(
    ls: &LineSet,
    pair: &NeighborPair,
    budget: usize,
) -> Result<Restriction> {
    let t = ls.tableau();
    let comp = t.composition();
    let win = MinorWindow::of_pair(comp, pair);
    let (e, v) = (ls.e(), ls.v());
    let full = expand(&win, |r, c| restriction_cell(&e, &v, r, c), budget)?;
    let name = pair.to_string();
    if full.min_a_exp().is_some_and(|m| (m as usize) < win.a_power) {
        return Err(WlabError::NotLinear(name));
    }
    let lead = full.a_coefficient(win.a_power as u32);
    if lead.terms().keys().any(|m| m.degree() != 1) {
        return Err(WlabError::NotLinear(name));
    }
    let (coordinate, sign) = lead
        .as_signed_coordinate()
        .ok_or(WlabError::NotSingleCoordinate(name))?;
    Ok(Restriction {
        pair: *pair,
        coordinate,
        sign,
    })
}

/// Modular restriction: the restricted invariant is sampled as a function of
/// the STAR coordinates, shown to be linear, and read off on unit vectors.
pub fn restrict_to_section_mod_p(
    ls: &LineSet,
    pair: &NeighborPair,
    sampler: &mut ModularSampler,
) -> Result<Restriction> {
    let f = sampler.field;
    let comp = ls.tableau().composition();
    let win = MinorWindow::of_pair(comp, pair);
    let (e, v) = (ls.e(), ls.v());
    let vs: Vec<Coord> = v.iter().copied().collect();
    let name = pair.to_string();
    let eval = |vals: &HashMap<Coord, u64>| -> Result<u64> {
        let x = |c: Coord| {
            if e.contains(&c) {
                1
            } else {
                vals.get(&c).copied().unwrap_or(0)
            }
        };
        leading_mod_p(f, comp, &win, &x).map_err(|_| WlabError::NotLinear(name.clone()))
    };
    if eval(&HashMap::new())? != 0 {
        return Err(WlabError::NotLinear(name));
    }
    let coeffs: Vec<u64> = vs
        .iter()
        .map(|&c| eval(&HashMap::from([(c, 1)])))
        .collect::<Result<_>>()?;
    for _ in 0..sampler.trials {
        let point = sampler.point(vs.iter().copied());
        let linear = vs
            .iter()
            .zip(&coeffs)
            .fold(0, |acc, (c, &k)| f.add(acc, f.mul(k, point[c])));
        if eval(&point)? != linear {
            return Err(WlabError::NotLinear(name));
        }
    }
    let nonzero: Vec<(Coord, i128)> = vs
        .iter()
        .zip(&coeffs)
        .filter(|(_, &k)| k != 0)
        .map(|(&c, &k)| (c, f.signed(k)))
        .collect();
    match nonzero.as_slice() {
        [(c, 1)] => Ok(Restriction {
            pair: *pair,
            coordinate: *c,
            sign: 1,
        }),
        [(c, -1)] => Ok(Restriction {
            pair: *pair,
            coordinate: *c,
            sign: -1,
        }),
        _ => Err(WlabError::NotSingleCoordinate(name)),
    }
}

/// Restrictions of every pair, checked to hit distinct STAR coordinates
/// covering all of `V`.
pub fn section_bijection(restrictions: &[Restriction], v: &CoordSet) -> bool {
    let hit: CoordSet = restrictions.iter().map(|r| r.coordinate).collect();
    hit.len() == restrictions.len() && &hit == v
}

/// Whether the invariant vanishes identically on the span of `subspace`,
/// tested at random points.
pub fn vanishes_on(
    comp: &Composition,
    pair: &NeighborPair,
    subspace: &CoordSet,
    sampler: &mut ModularSampler,
) -> Result<bool> {
    let f = sampler.field;
    for _ in 0..sampler.trials {
        let point = sampler.point(subspace.iter().copied());
        let x = |c: Coord| point.get(&c).copied().unwrap_or(0);
        if bs_invariant_mod_p(f, comp, pair, &x)? != 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// An excluded coordinate whose addition to the pair's surviving subspace
/// makes the invariant nonvanishing.
pub fn sharpness_witness(
    comp: &Composition,
    pair: &NeighborPair,
    sampler: &mut ModularSampler,
) -> Result<Option<Coord>> {
    let t = Tableau::new(comp);
    let excluded = excluded_direct(comp, pair);
    let base: CoordSet = t
        .nilradical()
        .into_iter()
        .filter(|c| !excluded.contains(c))
        .collect();
    for &c in &excluded {
        let mut grown = base.clone();
        grown.insert(c);
        if !vanishes_on(comp, pair, &grown, sampler)? {
            return Ok(Some(c));
        }
    }
    Ok(None)
}

/// Outcome of comparing the outer invariant with the product of the two
/// inner ones.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Factorisation {
    pub left: usize,
    pub middle: usize,
    pub right: usize,
    pub holds: bool,
    /// Ratio in the symmetric residue range.
    pub lambda: Option<i128>,
}

/// Checks `outer = λ · inner_left · inner_right` at random points.
pub fn factorisation_check(
    comp: &Composition,
    left: usize,
    middle: usize,
    right: usize,
    sampler: &mut ModularSampler,
) -> Result<Factorisation> {
    let f = sampler.field;
    let outer = MinorWindow::new(comp, left, right)?;
    let lw = MinorWindow::new(comp, left, middle)?;
    let rw = MinorWindow::new(comp, middle, right)?;
    let t = Tableau::new(comp);
    let support = t.nilradical();
    let mut lambda: Option<u64> = None;
    let mut holds = true;
    for _ in 0..sampler.trials {
        let point = sampler.point(support.iter().copied());
        let x = |c: Coord| point.get(&c).copied().unwrap_or(0);
        let o = leading_mod_p(f, comp, &outer, &x)?;
        let prod = f.mul(
            leading_mod_p(f, comp, &lw, &x)?,
            leading_mod_p(f, comp, &rw, &x)?,
        );
        match (lambda, prod) {
            (_, 0) => holds &= o == 0,
            (None, p) => lambda = Some(f.mul(o, f.inv(p))),
            (Some(l), p) => holds &= o == f.mul(l, p),
        }
    }
    holds &= lambda.is_some_and(|l| l != 0);
    Ok(Factorisation {
        left,
        middle,
        right,
        holds,
        lambda: lambda.map(|l| f.signed(l)),
    })
}

/// Consecutive triples of neighbouring columns sharing a height.
pub fn equal_height_triples(comp: &Composition) -> Vec<(usize, usize, usize)> {
    let pairs = neighboring_pairs(comp);
    let mut out = Vec::new();
    for p in &pairs {
        for q in &pairs {
            if q.height == p.height && q.left == p.right {
                out.push((p.left, p.right, q.right));
            }
        }
    }
    out
}

/// `ε`-weight of the pair's invariant.
pub fn invariant_weight(comp: &Composition, pair: &NeighborPair) -> Vec<i32> {
    MinorWindow::of_pair(comp, pair).weight(comp.n())
}

/// `ε`-weight of a monomial.
pub fn monomial_weight(m: &Monomial, n: usize) -> Vec<i32> {
    let mut w = vec![0; n];
    for &((i, j), e) in &m.vars {
        w[i - 1] += e as i32;
        w[j - 1] -= e as i32;
    }
    w
}

/// Scaling by a random torus element multiplies the invariant by the
/// character of its weight.
pub fn weight_homogeneity(
    comp: &Composition,
    pair: &NeighborPair,
    sampler: &mut ModularSampler,
) -> Result<bool> {
    let f = sampler.field;
    let n = comp.n();
    let weight = invariant_weight(comp, pair);
    let support = Tableau::new(comp).nilradical();
    for _ in 0..sampler.trials {
        let torus: Vec<u64> = (0..n).map(|_| sampler.residue()).collect();
        let point = sampler.point(support.iter().copied());
        let x = |c: Coord| point.get(&c).copied().unwrap_or(0);
        let scaled = |(i, j): Coord| {
            let v = point.get(&(i, j)).copied().unwrap_or(0);
            f.mul(f.mul(v, torus[i - 1]), f.inv(torus[j - 1]))
        };
        let base = bs_invariant_mod_p(f, comp, pair, &x)?;
        let moved = bs_invariant_mod_p(f, comp, pair, &scaled)?;
        let chi = weight.iter().zip(&torus).fold(1, |acc, (&w, &t)| {
            let tw = if w >= 0 {
                f.pow(t, w as u64)
            } else {
                f.inv(f.pow(t, (-w) as u64))
            };
            f.mul(acc, tw)
        });
        if moved != f.mul(chi, base) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Symbolic and modular values of the invariant agree at random points.
pub fn routes_agree(
    comp: &Composition,
    pair: &NeighborPair,
    budget: usize,
    sampler: &mut ModularSampler,
) -> Result<bool> {
    let f = sampler.field;
    let poly = bs_invariant(comp, pair, budget)?;
    let support = Tableau::new(comp).nilradical();
    for _ in 0..sampler.trials.min(8) {
        let point = sampler.point(support.iter().copied());
        let x = |c: Coord| point.get(&c).copied().unwrap_or(0);
        if poly.eval_mod_p(f, x, 0) != bs_invariant_mod_p(f, comp, pair, &x)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::section::build_section;

    fn comp(s: &str) -> Composition {
        s.parse().unwrap()
    }

    fn pair(c: &Composition, l: usize, r: usize) -> NeighborPair {
        NeighborPair::new(c, l, r).unwrap()
    }

    #[test]
    fn two_by_two() {
        let c = comp("2,2");
        let p = bs_invariant(&c, &pair(&c, 1, 2), DEFAULT_TERM_BUDGET).unwrap();
        assert_eq!(p.to_string(), "x1,3*x2,4 - x1,4*x2,3");
        assert_eq!(invariant_weight(&c, &pair(&c, 1, 2)), vec![1, 1, -1, -1]);
    }

    #[test]
    fn degrees() {
        let c = comp("3,2,1,1,2,3");
        let p = pair(&c, 1, 6);
        assert_eq!(MinorWindow::of_pair(&c, &p).degree, 9);
        let poly = bs_invariant(&c, &p, DEFAULT_TERM_BUDGET).unwrap();
        assert!(poly.terms().keys().all(|m| m.degree() == 9));
        let c = comp("1,3,2,1");
        let p = pair(&c, 1, 4);
        let w = MinorWindow::of_pair(&c, &p);
        assert_eq!((w.degree, w.a_power), (3, 3));
        let mut want = vec![0; 7];
        want[0] = 1;
        want[6] = -1;
        assert_eq!(invariant_weight(&c, &p), want);
    }

    #[test]
    fn restrictions() {
        let cases: [(&str, usize, usize, Coord); 5] = [
            ("1,3,2,1", 1, 4, (5, 7)),
            ("3,2,1,1,2,3", 1, 6, (6, 12)),
            ("3,2,1,1,2,3", 2, 5, (6, 9)),
            ("3,2,1,1,2,3", 3, 4, (6, 7)),
            ("2,2", 1, 2, (2, 4)),
        ];
        let mut sampler = ModularSampler::with_defaults(7);
        for (c, l, r, want) in cases {
            let c = comp(c);
            let ls = build_section(&c).unwrap();
            let p = pair(&c, l, r);
            let sym = restrict_to_section(&ls, &p, DEFAULT_TERM_BUDGET).unwrap();
            let modular = restrict_to_section_mod_p(&ls, &p, &mut sampler).unwrap();
            assert_eq!(sym.coordinate, want);
            assert_eq!(sym, modular);
        }
    }

    #[test]
    fn vanishing() {
        let c = comp("2,2");
        let p = pair(&c, 1, 2);
        let mut s = ModularSampler::with_defaults(1);
        let u: CoordSet = [(1, 3), (2, 3)].into_iter().collect();
        assert!(vanishes_on(&c, &p, &u, &mut s).unwrap());
        let all: CoordSet = Tableau::new(&c).nilradical().into_iter().collect();
        assert!(!vanishes_on(&c, &p, &all, &mut s).unwrap());
    }

    #[test]
    fn factorisation_of_borel_triple() {
        let c = comp("1,1,1");
        let mut s = ModularSampler::with_defaults(3);
        let r = factorisation_check(&c, 1, 2, 3, &mut s).unwrap();
        assert!(r.holds);
        assert_eq!(r.lambda, Some(1));
        let c = comp("2,2,2");
        let r = factorisation_check(&c, 1, 2, 3, &mut s).unwrap();
        assert!(r.holds);
    }

    #[test]
    fn budget_is_enforced() {
        let c = comp("3,2,1,1,2,3");
        let err = bs_invariant(&c, &pair(&c, 1, 6), 10).unwrap_err();
        assert_eq!(err, WlabError::SymbolicBlowup { budget: 10 });
    }

    #[test]
    fn sampler_rejects_bad_config() {
        assert!(ModularSampler::new(91, 0, 32).is_err());
        assert!(ModularSampler::new(crate::linalg::DEFAULT_PRIME, 0, 5).is_err());
    }
}
