//! Adjoint action of matrix units on points of the nilradical, and Jordan
//! types of nilpotent matrices.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::diagram::{conjugate, Coord, Tableau};
use crate::linalg::{mat_mul, rank_exact, rank_mod_p, Fp};

/// Sparse matrix with entries indexed by `(row, column)`, 1-based.
pub type Point<T> = BTreeMap<Coord, T>;

/// Diagonal and strictly upper matrix units.
pub fn borel_basis(n: usize) -> Vec<Coord> {
    (1..=n).flat_map(|i| (i..=n).map(move |j| (i, j))).collect()
}

/// Borel basis plus the lower matrix units inside each block.
pub fn parabolic_basis(t: &Tableau) -> Vec<Coord> {
    let n = t.n();
    let mut out = borel_basis(n);
    for i in 1..=n {
        for j in 1..i {
            if t.same_block(i, j) {
                out.push((i, j));
            }
        }
    }
    out
}

/// `[E_{a,b}, x]` as a sparse matrix over `Z`.
pub fn bracket_exact((a, b): Coord, x: &Point<BigInt>) -> Point<BigInt> {
    let mut out: Point<BigInt> = BTreeMap::new();
    for (&(r, c), v) in x {
        if r == b {
            *out.entry((a, c)).or_insert_with(BigInt::zero) += v;
        }
        if c == a {
            *out.entry((r, b)).or_insert_with(BigInt::zero) -= v;
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

pub fn bracket_mod_p(f: Fp, (a, b): Coord, x: &Point<u64>) -> Point<u64> {
    let mut out: Point<u64> = BTreeMap::new();
    for (&(r, c), &v) in x {
        if r == b {
            let slot = out.entry((a, c)).or_insert(0);
            *slot = f.add(*slot, v);
        }
        if c == a {
            let slot = out.entry((r, b)).or_insert(0);
            *slot = f.sub(*slot, v);
        }
    }
    out.retain(|_, v| *v != 0);
    out
}

/// Rows `[y, x]` restricted to `targets`, one per `y` in `basis`.
pub fn action_rows_exact(
    basis: &[Coord],
    x: &Point<BigInt>,
    targets: &[Coord],
) -> Vec<Vec<BigInt>> {
    basis
        .iter()
        .map(|&y| {
            let br = bracket_exact(y, x);
            targets
                .iter()
                .map(|c| br.get(c).cloned().unwrap_or_else(BigInt::zero))
                .collect()
        })
        .collect()
}

pub fn action_rows_mod_p(
    f: Fp,
    basis: &[Coord],
    x: &Point<u64>,
    targets: &[Coord],
) -> Vec<Vec<u64>> {
    basis
        .iter()
        .map(|&y| {
            let br = bracket_mod_p(f, y, x);
            targets
                .iter()
                .map(|c| br.get(c).copied().unwrap_or(0))
                .collect()
        })
        .collect()
}

/// `dim (span of [y, x] for y in basis) + span of extra`, projected to
/// `targets`, over `Z/p`.
pub fn span_rank_mod_p(
    f: Fp,
    basis: &[Coord],
    x: &Point<u64>,
    extra: &[Coord],
    targets: &[Coord],
) -> usize {
    let mut rows = action_rows_mod_p(f, basis, x, targets);
    for e in extra {
        rows.push(targets.iter().map(|c| u64::from(c == e)).collect());
    }
    rank_mod_p(f, rows)
}

pub fn span_rank_exact(
    basis: &[Coord],
    x: &Point<BigInt>,
    extra: &[Coord],
    targets: &[Coord],
) -> usize {
    let mut rows = action_rows_exact(basis, x, targets);
    for e in extra {
        rows.push(
            targets
                .iter()
                .map(|c| {
                    if c == e {
                        BigInt::one()
                    } else {
                        BigInt::zero()
                    }
                })
                .collect(),
        );
    }
    rank_exact(rows)
}

/// Weakly decreasing partition of `n`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct JordanType(pub Vec<usize>);

impl JordanType {
    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    /// Dimension of the adjoint orbit in `gl_n`.
    pub fn orbit_dim(&self) -> usize {
        let n: usize = self.0.iter().sum();
        n * n - conjugate(&self.0).iter().map(|h| h * h).sum::<usize>()
    }
}

impl std::fmt::Display for JordanType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

fn dense(n: usize, x: &Point<BigInt>) -> Vec<Vec<BigInt>> {
    let mut m = vec![vec![BigInt::zero(); n]; n];
    for (&(r, c), v) in x {
        m[r - 1][c - 1] = v.clone();
    }
    m
}

/// Jordan type from the ranks of successive powers.
pub fn jordan_type(n: usize, x: &Point<BigInt>) -> JordanType {
    let base = dense(n, x);
    let mut ranks = vec![n];
    let mut power = base.clone();
    loop {
        let r = rank_exact(power.clone());
        ranks.push(r);
        if r == 0 {
            break;
        }
        assert!(ranks.len() <= n + 1, "matrix is not nilpotent");
        power = mat_mul(&power, &base);
    }
    // blocks of size >= k: ranks[k-1] - ranks[k]
    let at_least: Vec<usize> = ranks.windows(2).map(|w| w[0] - w[1]).collect();
    let mut parts = Vec::new();
    for k in (1..=at_least.len()).rev() {
        let exactly = at_least[k - 1] - at_least.get(k).copied().unwrap_or(0);
        parts.extend(std::iter::repeat_n(k, exactly));
    }
    JordanType(parts)
}

/// Jordan type of a sum of matrix units with distinct rows and distinct
/// columns, read off the chains it forms.
pub fn jordan_type_from_chains(n: usize, support: &[Coord]) -> Option<JordanType> {
    let mut next = vec![0usize; n + 1];
    let mut has_prev = vec![false; n + 1];
    for &(i, j) in support {
        if next[i] != 0 || has_prev[j] {
            return None;
        }
        next[i] = j;
        has_prev[j] = true;
    }
    let mut parts: Vec<usize> = (1..=n)
        .filter(|&i| !has_prev[i])
        .map(|start| {
            let mut len = 1;
            let mut cur = start;
            while next[cur] != 0 {
                cur = next[cur];
                len += 1;
            }
            len
        })
        .collect();
    parts.sort_unstable_by(|a, b| b.cmp(a));
    Some(JordanType(parts))
}

/// Unit point on a support.
pub fn unit_point(support: impl IntoIterator<Item = Coord>) -> Point<BigInt> {
    support.into_iter().map(|c| (c, BigInt::one())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bracket_of_units() {
        // [E12, E23] = E13
        let x = unit_point([(2, 3)]);
        let br = bracket_exact((1, 2), &x);
        assert_eq!(br, unit_point([(1, 3)]));
        // [E23, E12] = -E13
        let br = bracket_exact((2, 3), &unit_point([(1, 2)]));
        assert_eq!(br.get(&(1, 3)), Some(&BigInt::from(-1)));
        let f = Fp::default_prime();
        let xm: Point<u64> = [((1, 2), 5u64)].into_iter().collect();
        assert_eq!(
            bracket_mod_p(f, (2, 2), &xm).get(&(1, 2)),
            Some(&f.from_i64(-5))
        );
    }

    #[test]
    fn jordan_types() {
        let x = unit_point([(1, 2), (2, 3), (4, 5)]);
        assert_eq!(jordan_type(6, &x), JordanType(vec![3, 2, 1]));
        assert_eq!(
            jordan_type_from_chains(6, &[(1, 2), (2, 3), (4, 5)]),
            Some(JordanType(vec![3, 2, 1]))
        );
        assert_eq!(jordan_type_from_chains(3, &[(1, 2), (1, 3)]), None);
        assert_eq!(JordanType(vec![2, 1]).orbit_dim(), 4);
        assert_eq!(JordanType(vec![5, 3, 3, 1]).orbit_dim(), 108);
    }

    #[test]
    fn parabolic_dimension() {
        let t = Tableau::new(&"2,1".parse().unwrap());
        assert_eq!(parabolic_basis(&t).len(), 7);
        assert_eq!(borel_basis(3).len(), 6);
    }
}
