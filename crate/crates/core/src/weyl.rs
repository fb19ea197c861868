//! Weyl words of tableaux, inversion sets, and the coordinates each
//! neighbouring pair removes from the nilradical.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::diagram::{column_shift, neighboring_pairs, Composition, Coord, NeighborPair, Tableau};

/// A set of matrix positions `(i, j)` with `i < j`.
pub type CoordSet = BTreeSet<Coord>;

/// Columns concatenated left to right, each read bottom to top.
pub fn word_of_columns(columns: &[Vec<usize>]) -> Vec<usize> {
    columns
        .iter()
        .flat_map(|c| c.iter().rev().copied())
        .collect()
}

pub fn word_of_tableau(t: &Tableau) -> Vec<usize> {
    word_of_columns(t.columns())
}

/// All `(i, j)` with `i < j` where `i` occurs after `j` in the word.
pub fn inversion_coordinates(word: &[usize]) -> CoordSet {
    let mut pos = vec![0; word.len() + 1];
    for (p, &x) in word.iter().enumerate() {
        pos[x] = p;
    }
    let n = word.len();
    let mut out = CoordSet::new();
    for i in 1..=n {
        for j in i + 1..=n {
            if pos[i] > pos[j] {
                out.insert((i, j));
            }
        }
    }
    out
}

/// Excluded coordinates of a pair, read off the inversions of its shifted
/// tableau and filtered to the nilradical.
pub fn excluded_via_word(comp: &Composition, pair: &NeighborPair) -> CoordSet {
    let t = Tableau::new(comp);
    let word = word_of_columns(&column_shift(comp, pair).columns);
    inversion_coordinates(&word)
        .into_iter()
        .filter(|&c| t.in_nilradical(c))
        .collect()
}

/// Excluded coordinates of a pair from the closed form.
///
/// Label the left column of the pair `D_0`, the columns strictly between it
/// and the right column that are taller than `s` as `D_1..D_u`, and the right
/// column `D_{u+1}`. For `j = 1..=u` the last `c_j - s` matrix columns of
/// block `D_j` are excluded, and for `j = u+1` the single last matrix column
/// of `D_{u+1}`. In each case the excluded rows run from the first row of
/// `D_{j-1}` down to the row just before `D_j`, skipping rows `s+1..=c_{j-1}`
/// of `D_{j-1}`.
pub fn excluded_direct(comp: &Composition, pair: &NeighborPair) -> CoordSet {
    let t = Tableau::new(comp);
    let s = pair.height;
    let mut chain = vec![pair.left];
    chain.extend((pair.left + 1..pair.right).filter(|&c| t.height(c) > s));
    chain.push(pair.right);

    let mut out = CoordSet::new();
    for (idx, w) in chain.windows(2).enumerate() {
        let (prev, cur) = (w[0], w[1]);
        let prev_start = t.column(prev)[0];
        let cur_start = t.column(cur)[0];
        let gap = prev_start + s..prev_start + t.height(prev);
        let cols: Vec<usize> = if idx + 2 < chain.len() {
            (cur_start + s..cur_start + t.height(cur)).collect()
        } else {
            vec![t.bottom(cur)]
        };
        for row in (prev_start..cur_start).filter(|r| !gap.contains(r)) {
            for &col in &cols {
                out.insert((row, col));
            }
        }
    }
    out
}

/// The common subspace cut out by all pairs, with its complement in the
/// nilradical.
#[derive(Clone, Debug, Serialize)]
pub struct UPi {
    /// Nilradical coordinates surviving every pair.
    pub u: CoordSet,
    /// Nilradical coordinates excluded by at least one pair.
    pub excluded: CoordSet,
}

pub fn u_pi(comp: &Composition) -> UPi {
    let t = Tableau::new(comp);
    let excluded: CoordSet = neighboring_pairs(comp)
        .iter()
        .flat_map(|p| excluded_direct(comp, p))
        .collect();
    let u = t
        .nilradical()
        .into_iter()
        .filter(|c| !excluded.contains(c))
        .collect();
    UPi { u, excluded }
}

/// `(i,j), (j,k) ∈ S ⇒ (i,k) ∈ S`.
pub fn is_bracket_closed(set: &CoordSet) -> bool {
    set.iter().all(|&(i, j)| {
        set.range((j, 0)..(j + 1, 0))
            .all(|&(_, k)| set.contains(&(i, k)))
    })
}

/// Outcome of [`structural_checks`].
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct StructuralReport {
    /// Each pair's surviving subspace is stable under negative Levi root vectors.
    pub levi_minus_stable: bool,
    /// No pair touches the last column block unless the pair ends there, and
    /// the whole block survives when the last column has no left neighbour.
    pub last_block_clear: bool,
    /// The surviving subspace is a subalgebra.
    pub u_closed: bool,
    /// Excluded coordinates together with the positive Levi coordinates form
    /// a subalgebra.
    pub complement_closed: bool,
}

impl StructuralReport {
    /// The three properties that hold for every composition.
    pub fn always_true_parts_hold(&self) -> bool {
        self.levi_minus_stable && self.last_block_clear && self.u_closed
    }
}

/// Whether `m ∖ excluded` is stable under `E_{b,a}` for `a < b` in one block.
pub fn levi_minus_stable(t: &Tableau, excluded: &CoordSet) -> bool {
    let keep = |c: Coord| t.in_nilradical(c) && !excluded.contains(&c);
    t.nilradical()
        .into_iter()
        .filter(|&c| keep(c))
        .all(|(i, j)| {
            let ci = t.col_of(i);
            let cj = t.col_of(j);
            let lower_row = t
                .column(ci)
                .iter()
                .filter(|&&b| b > i)
                .all(|&b| keep((b, j)));
            let left_col = t
                .column(cj)
                .iter()
                .filter(|&&a| a < j)
                .all(|&a| keep((i, a)));
            lower_row && left_col
        })
}

pub fn structural_checks(comp: &Composition) -> StructuralReport {
    let t = Tableau::new(comp);
    let pairs = neighboring_pairs(comp);
    let k = comp.k();
    let last_block: BTreeSet<usize> = t.column(k).iter().copied().collect();

    let mut levi = true;
    let mut last_clear = true;
    for p in &pairs {
        let ex = excluded_direct(comp, p);
        levi &= levi_minus_stable(&t, &ex);
        if p.right != k {
            last_clear &= ex.iter().all(|(_, j)| !last_block.contains(j));
        }
    }
    let up = u_pi(comp);
    if !pairs.iter().any(|p| p.right == k) {
        last_clear &= up.excluded.iter().all(|(_, j)| !last_block.contains(j));
    }

    let n = comp.n();
    let mut complement = up.excluded.clone();
    for i in 1..=n {
        for j in i + 1..=n {
            if t.same_block(i, j) {
                complement.insert((i, j));
            }
        }
    }
    StructuralReport {
        levi_minus_stable: levi,
        last_block_clear: last_clear,
        u_closed: is_bracket_closed(&up.u),
        complement_closed: is_bracket_closed(&complement),
    }
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
    fn words() {
        let c = comp("2,1,3,1,4,1,2");
        let p = NeighborPair::new(&c, 1, 7).unwrap();
        assert_eq!(
            word_of_columns(&column_shift(&c, &p).columns),
            vec![6, 2, 1, 3, 11, 10, 5, 4, 7, 14, 9, 8, 12, 13]
        );
        assert_eq!(
            word_of_tableau(&Tableau::new(&comp("2,2"))),
            vec![2, 1, 4, 3]
        );
        let c = comp("1,3,2,1");
        let p = NeighborPair::new(&c, 1, 4).unwrap();
        assert_eq!(
            word_of_columns(&column_shift(&c, &p).columns),
            vec![4, 3, 1, 6, 2, 7, 5]
        );
    }

    #[test]
    fn inversions() {
        assert!(inversion_coordinates(&[1, 2, 3]).is_empty());
        assert_eq!(inversion_coordinates(&[2, 1, 4, 3]), set(&[(1, 2), (3, 4)]));
    }

    #[test]
    fn excluded_goldens() {
        let c = comp("1,3,2,1");
        let p = NeighborPair::new(&c, 1, 4).unwrap();
        let want = set(&[(1, 3), (1, 4), (2, 6), (5, 7)]);
        assert_eq!(excluded_direct(&c, &p), want);
        assert_eq!(excluded_via_word(&c, &p), want);

        let c = comp("2,2");
        let p = NeighborPair::new(&c, 1, 2).unwrap();
        assert_eq!(excluded_direct(&c, &p), set(&[(1, 4), (2, 4)]));

        let c = comp("2,1,3,1,4,1,2");
        let p = NeighborPair::new(&c, 1, 7).unwrap();
        let mut want = CoordSet::new();
        for r in [1, 2, 3] {
            want.insert((r, 6));
        }
        for r in [4, 5, 7] {
            want.insert((r, 10));
            want.insert((r, 11));
        }
        for r in [8, 9, 12] {
            want.insert((r, 14));
        }
        assert_eq!(excluded_direct(&c, &p), want);
    }

    #[test]
    fn u_pi_goldens() {
        let mut want: CoordSet = (1..=9).map(|i| (i, 12)).collect();
        // The height-2 pair of (3,2,1,1,2,3) ends in matrix column 9.
        want.extend((4..=7).map(|j| (j, 9)));
        want.insert((6, 7));
        assert_eq!(u_pi(&comp("3,2,1,1,2,3")).excluded, want);

        assert_eq!(
            u_pi(&comp("1,2,2,1")).excluded,
            set(&[(1, 3), (2, 5), (4, 6), (3, 5)])
        );
        let single = u_pi(&comp("4"));
        assert!(single.u.is_empty() && single.excluded.is_empty());
    }

    #[test]
    fn complement_subalgebra() {
        assert!(structural_checks(&comp("3,2,1,1,2,3")).complement_closed);
        assert!(!structural_checks(&comp("2,1,1,1,2")).complement_closed);
        assert!(!structural_checks(&comp("1,2,2,1")).complement_closed);
    }

    #[test]
    fn closure_rule() {
        assert!(is_bracket_closed(&set(&[(1, 2), (2, 3), (1, 3)])));
        assert!(!is_bracket_closed(&set(&[(1, 2), (2, 3)])));
    }
}
