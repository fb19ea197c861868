//! Compositions, the column-numbered tableau, neighbouring columns and the
//! column-shifting construction.
//!
//! Everything that crosses the public interface is 1-based: columns are
//! numbered `1..=k`, rows `1..=height`, box entries `1..=n`, and a matrix
//! coordinate `(i, j)` names the entry in row `i`, column `j`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Result, WlabError};

/// A matrix position `(row, column)`, 1-based.
pub type Coord = (usize, usize);

/// Block sizes `(c_1, ..., c_k)` of a standard parabolic of `sl(n)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Composition {
    parts: Vec<usize>,
}

impl Composition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() {
            return Err(WlabError::InvalidComposition("no parts".into()));
        }
        if let Some(pos) = parts.iter().position(|&c| c == 0) {
            return Err(WlabError::InvalidComposition(format!(
                "part {} is zero",
                pos + 1
            )));
        }
        Ok(Composition { parts })
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn n(&self) -> usize {
        self.parts.iter().sum()
    }

    /// Number of columns.
    pub fn k(&self) -> usize {
        self.parts.len()
    }

    pub fn max_height(&self) -> usize {
        self.parts.iter().copied().max().unwrap_or(0)
    }

    /// All `2^(n-1)` compositions of `n`, ordered by the binary expansion of
    /// their cut set (so the output order is fixed).
    pub fn all_of(n: usize) -> Vec<Composition> {
        if n == 0 {
            return Vec::new();
        }
        (0u64..1 << (n - 1))
            .map(|cuts| {
                let mut parts = Vec::new();
                let mut run = 1;
                for bit in 0..n - 1 {
                    if cuts >> bit & 1 == 1 {
                        parts.push(run);
                        run = 1;
                    } else {
                        run += 1;
                    }
                }
                parts.push(run);
                Composition { parts }
            })
            .collect()
    }

    pub fn without_last(&self) -> Option<Composition> {
        (self.k() > 1).then(|| Composition {
            parts: self.parts[..self.k() - 1].to_vec(),
        })
    }

    pub fn without_first(&self) -> Option<Composition> {
        (self.k() > 1).then(|| Composition {
            parts: self.parts[1..].to_vec(),
        })
    }
}

impl TryFrom<Vec<usize>> for Composition {
    type Error = WlabError;

    fn try_from(parts: Vec<usize>) -> Result<Self> {
        Composition::new(parts)
    }
}

impl From<Composition> for Vec<usize> {
    fn from(c: Composition) -> Vec<usize> {
        c.parts
    }
}

impl FromStr for Composition {
    type Err = WlabError;

    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s.trim().trim_start_matches('(').trim_end_matches(')');
        let parts = trimmed
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|_| WlabError::InvalidComposition(format!("bad part {p:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Composition::new(parts)
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let strs: Vec<String> = self.parts.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", strs.join(","))
    }
}

/// The numbered diagram: column `i` holds the `c_i` integers following all
/// entries of earlier columns, top to bottom.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tableau {
    comp: Composition,
    columns: Vec<Vec<usize>>,
    col_of: Vec<usize>,
    row_of: Vec<usize>,
}

impl Tableau {
    pub fn new(comp: &Composition) -> Self {
        let n = comp.n();
        let mut columns = Vec::with_capacity(comp.k());
        let mut col_of = vec![0; n + 1];
        let mut row_of = vec![0; n + 1];
        let mut next = 1;
        for (c, &h) in comp.parts().iter().enumerate() {
            let col: Vec<usize> = (next..next + h).collect();
            for (r, &e) in col.iter().enumerate() {
                col_of[e] = c + 1;
                row_of[e] = r + 1;
            }
            next += h;
            columns.push(col);
        }
        Tableau {
            comp: comp.clone(),
            columns,
            col_of,
            row_of,
        }
    }

    pub fn composition(&self) -> &Composition {
        &self.comp
    }

    pub fn n(&self) -> usize {
        self.comp.n()
    }

    pub fn k(&self) -> usize {
        self.comp.k()
    }

    pub fn columns(&self) -> &[Vec<usize>] {
        &self.columns
    }

    /// Entries of column `c` (1-based), top to bottom.
    pub fn column(&self, c: usize) -> &[usize] {
        &self.columns[c - 1]
    }

    pub fn height(&self, c: usize) -> usize {
        self.comp.parts()[c - 1]
    }

    /// Entry at `(row, col)`, if the column is tall enough.
    pub fn entry(&self, row: usize, col: usize) -> Option<usize> {
        self.columns
            .get(col.wrapping_sub(1))
            .and_then(|c| c.get(row.wrapping_sub(1)))
            .copied()
    }

    pub fn col_of(&self, entry: usize) -> usize {
        self.col_of[entry]
    }

    pub fn row_of(&self, entry: usize) -> usize {
        self.row_of[entry]
    }

    /// Entries of row `r`, left to right.
    pub fn row(&self, r: usize) -> Vec<usize> {
        self.columns
            .iter()
            .filter_map(|c| c.get(r - 1).copied())
            .collect()
    }

    /// Bottom box of column `c`.
    pub fn bottom(&self, c: usize) -> usize {
        *self.columns[c - 1].last().expect("columns are non-empty")
    }

    /// Whether `(i, j)` is a coordinate of the nilradical: strictly upper
    /// triangular and outside the diagonal Levi blocks.
    pub fn in_nilradical(&self, (i, j): Coord) -> bool {
        i < j && j <= self.n() && self.col_of[i] != self.col_of[j]
    }

    /// Whether `i, j` lie in the same Levi block.
    pub fn same_block(&self, i: usize, j: usize) -> bool {
        self.col_of[i] == self.col_of[j]
    }

    /// Nilradical coordinates in lexicographic order.
    pub fn nilradical(&self) -> Vec<Coord> {
        let n = self.n();
        (1..=n)
            .flat_map(|i| (i + 1..=n).map(move |j| (i, j)))
            .filter(|&c| self.in_nilradical(c))
            .collect()
    }

    pub fn dim_nilradical(&self) -> usize {
        let n = self.n();
        n * (n - 1) / 2
            - self
                .comp
                .parts()
                .iter()
                .map(|c| c * (c - 1) / 2)
                .sum::<usize>()
    }

    /// Columns strictly between `a` and `b`.
    pub fn columns_between(&self, a: usize, b: usize) -> std::ops::Range<usize> {
        a + 1..b
    }

    /// Whether some column strictly between the columns of entries `from`
    /// and `to` has height at least `h`.
    pub fn crosses_height(&self, from: usize, to: usize, h: usize) -> bool {
        let (a, b) = (self.col_of(from), self.col_of(to));
        (a.min(b) + 1..a.max(b)).any(|c| self.height(c) >= h)
    }

    /// ASCII rendering, one bracketed cell per box, entries right-aligned.
    pub fn render(&self) -> String {
        render_columns(&self.columns)
    }
}

pub(crate) fn render_columns(columns: &[Vec<usize>]) -> String {
    let width = columns
        .iter()
        .flatten()
        .map(|e| e.to_string().len())
        .max()
        .unwrap_or(1);
    let rows = columns.iter().map(Vec::len).max().unwrap_or(0);
    let mut out = String::new();
    for r in 0..rows {
        let mut line = String::new();
        for col in columns {
            match col.get(r) {
                Some(e) => line.push_str(&format!("[{e:>width$}]")),
                None => line.push_str(&" ".repeat(width + 2)),
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

/// Two columns of equal height `height` with no column of that height
/// strictly between them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NeighborPair {
    pub height: usize,
    pub left: usize,
    pub right: usize,
}

impl NeighborPair {
    /// Validating constructor.
    pub fn new(comp: &Composition, left: usize, right: usize) -> Result<Self> {
        let parts = comp.parts();
        let bad = WlabError::NotNeighbors { left, right };
        if left == 0 || left >= right || right > parts.len() {
            return Err(bad);
        }
        let s = parts[left - 1];
        if parts[right - 1] != s || parts[left..right - 1].contains(&s) {
            return Err(bad);
        }
        Ok(NeighborPair {
            height: s,
            left,
            right,
        })
    }

    /// First entry of the left column through the last entry of the right
    /// column: the index window the pair's invariant lives on.
    pub fn window(&self, t: &Tableau) -> (usize, usize) {
        (t.column(self.left)[0], t.bottom(self.right))
    }
}

impl fmt::Display for NeighborPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C{}-C{} (height {})", self.left, self.right, self.height)
    }
}

/// All neighbouring pairs, ordered by height then by left column.
pub fn neighboring_pairs(comp: &Composition) -> Vec<NeighborPair> {
    let parts = comp.parts();
    let mut pairs = Vec::new();
    for s in 1..=comp.max_height() {
        let cols: Vec<usize> = (1..=parts.len()).filter(|&c| parts[c - 1] == s).collect();
        for w in cols.windows(2) {
            pairs.push(NeighborPair {
                height: s,
                left: w[0],
                right: w[1],
            });
        }
    }
    pairs
}

/// Dimensions attached to a column-height shape.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ShapeDims {
    /// Dimension of the orbital variety, `(n(n-1) - Σ c(c-1)) / 2`.
    pub variety: usize,
    /// Dimension of the nilpotent orbit with these column heights.
    pub orbit: usize,
}

/// Dimension formula for a shape given by column heights (zero heights allowed).
pub fn shape_orbit_dims(heights: &[usize]) -> ShapeDims {
    let n: usize = heights.iter().sum();
    let total = n * n.saturating_sub(1);
    let levi: usize = heights.iter().map(|&c| c * c.saturating_sub(1)).sum();
    let twice = total - levi;
    assert!(twice.is_multiple_of(2), "shape formula gave an odd value");
    ShapeDims {
        variety: twice / 2,
        orbit: twice,
    }
}

/// Conjugate of a partition (or of any multiset of column heights).
pub fn conjugate(parts: &[usize]) -> Vec<usize> {
    let max = parts.iter().copied().max().unwrap_or(0);
    (1..=max)
        .map(|r| parts.iter().filter(|&&c| c >= r).count())
        .collect()
}

/// Output of [`column_shift`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShiftedTableau {
    /// Columns after shifting; the right column of the pair may end up empty.
    pub columns: Vec<Vec<usize>>,
    /// Largest entry of the pair's right column before the shift.
    pub moved_entry: usize,
    /// Largest entry of the pair's left column after the shift.
    pub t_first: usize,
    /// Boxes strictly between the pair on rows below the pair's height.
    pub d_d: usize,
}

impl ShiftedTableau {
    pub fn heights(&self) -> Vec<usize> {
        self.columns.iter().map(Vec::len).collect()
    }

    pub fn render(&self) -> String {
        render_columns(&self.columns)
    }
}

/// Boxes strictly between the pair's columns lying below row `s`.
pub fn boxes_below(comp: &Composition, pair: &NeighborPair) -> usize {
    comp.parts()[pair.left..pair.right - 1]
        .iter()
        .map(|&c| c.saturating_sub(pair.height))
        .sum()
}

/// The hypersurface tableau of a neighbouring pair: the last entry of the
/// right column drops into the first row below `s` of the rightmost taller
/// column between the pair, and the parts of taller columns below row `s`
/// each move one taller column to the left. Columns outside the pair and
/// columns shorter than `s` are untouched.
pub fn column_shift(comp: &Composition, pair: &NeighborPair) -> ShiftedTableau {
    let t = Tableau::new(comp);
    let s = pair.height;
    let mut columns = t.columns().to_vec();
    let moved = t.bottom(pair.right);
    let tall: Vec<usize> = (pair.left + 1..pair.right)
        .filter(|&c| t.height(c) > s)
        .collect();
    let tail = |c: usize| t.column(c)[s..].to_vec();

    let mut chain = vec![pair.left];
    chain.extend(&tall);
    for w in chain.windows(2) {
        let (to, from) = (w[0], w[1]);
        columns[to - 1].truncate(s);
        columns[to - 1].extend(tail(from));
    }
    let last = *chain.last().unwrap();
    columns[last - 1].truncate(s);
    columns[last - 1].push(moved);
    columns[pair.right - 1].pop();

    ShiftedTableau {
        t_first: *columns[pair.left - 1].last().unwrap(),
        columns,
        moved_entry: moved,
        d_d: boxes_below(comp, pair),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn comp(s: &str) -> Composition {
        s.parse().unwrap()
    }

    #[test]
    fn numbering() {
        let t = Tableau::new(&comp("1,3,2,1"));
        assert_eq!(t.columns(), &[vec![1], vec![2, 3, 4], vec![5, 6], vec![7]]);
        let t = Tableau::new(&comp("2,1,3,1,4,1,2"));
        assert_eq!(t.column(5), &[8, 9, 10, 11]);
        assert_eq!(t.row(2), vec![2, 5, 9, 14]);
        assert_eq!(Tableau::new(&comp("1")).columns(), &[vec![1]]);
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(comp("3,2,1,1,2,3").to_string(), "3,2,1,1,2,3");
        assert_eq!(comp("(1, 2)").parts(), &[1, 2]);
        assert!("0,2".parse::<Composition>().is_err());
        assert!("".parse::<Composition>().is_err());
        assert!("1,x".parse::<Composition>().is_err());
    }

    #[test]
    fn enumerates_compositions() {
        assert_eq!(Composition::all_of(4).len(), 8);
        let mut all = Composition::all_of(6);
        all.sort();
        all.dedup();
        assert_eq!(all.len(), 32);
        assert!(all.iter().all(|c| c.n() == 6));
    }

    #[test]
    fn pair_counts() {
        assert_eq!(neighboring_pairs(&comp("2,1,1,2")).len(), 2);
        assert_eq!(neighboring_pairs(&comp("3,2,1,1,2,3")).len(), 3);
        assert_eq!(neighboring_pairs(&comp("5")).len(), 0);
        assert_eq!(neighboring_pairs(&comp("2,1,1,2,1,1,2,1")).len(), 6);
        let pairs = neighboring_pairs(&comp("3,2,1,1,2,3"));
        assert_eq!(
            pairs
                .iter()
                .map(|p| (p.height, p.left, p.right))
                .collect::<Vec<_>>(),
            vec![(1, 3, 4), (2, 2, 5), (3, 1, 6)]
        );
        assert!(NeighborPair::new(&comp("2,1,2,1,2"), 1, 5).is_err());
        assert!(NeighborPair::new(&comp("2,1,2,1,2"), 3, 5).is_ok());
    }

    #[test]
    fn shape_dims() {
        assert_eq!(shape_orbit_dims(&[3, 2, 1]).variety, 11);
        assert_eq!(shape_orbit_dims(&[1; 5]).variety, 10);
        // Jordan type (5,3,3,1) has column heights (4,3,3,1,1).
        let d = shape_orbit_dims(&conjugate(&[5, 3, 3, 1]));
        assert_eq!((d.orbit, d.variety), (108, 54));
    }

    #[test]
    fn shift_two_tall_columns() {
        let c = comp("2,1,3,1,4,1,2");
        let p = NeighborPair::new(&c, 1, 7).unwrap();
        let sh = column_shift(&c, &p);
        assert_eq!(
            sh.columns,
            vec![
                vec![1, 2, 6],
                vec![3],
                vec![4, 5, 10, 11],
                vec![7],
                vec![8, 9, 14],
                vec![12],
                vec![13]
            ]
        );
        assert_eq!(sh.t_first, 6);
        assert_eq!(sh.d_d, 3);
    }

    #[test]
    fn shift_without_tall_columns() {
        let c = comp("2,2");
        let sh = column_shift(&c, &NeighborPair::new(&c, 1, 2).unwrap());
        assert_eq!(sh.columns, vec![vec![1, 2, 4], vec![3]]);
        assert_eq!((sh.d_d, sh.t_first), (0, 4));
    }

    #[test]
    fn shift_boxes_below() {
        let c = comp("1,3,2,1");
        let sh = column_shift(&c, &NeighborPair::new(&c, 1, 4).unwrap());
        assert_eq!(sh.d_d, 3);
        assert_eq!(
            sh.columns,
            vec![vec![1, 3, 4], vec![2, 6], vec![5, 7], vec![]]
        );
    }

    #[test]
    fn render_grid() {
        let r = Tableau::new(&comp("2,1,2")).render();
        assert_eq!(r, "[1][3][4]\n[2]   [5]\n");
    }
}
