//! The labelled line construction that produces the section `e + V`.
//!
//! Lines join boxes of the tableau left to right. Lines labelled ONE give
//! the support of `e`; lines labelled STAR give the support of `V`. The
//! construction starts from the horizontal lines of each row, labels the
//! line entering the bottom box of every column that has a left neighbour,
//! and then runs one stage per row, gating every live STAR line of the rows
//! above, deleting selected horizontal lines of the current row and
//! rejoining the freed boxes.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::diagram::{neighboring_pairs, Composition, Coord, NeighborPair, Tableau};
use crate::error::{Result, WlabError};
use crate::weyl::CoordSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Label {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "*")]
    Star,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Active,
    Gated,
    Deleted,
}

/// Which rule created a line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Origin {
    /// Adjacent boxes of one row.
    Horizontal,
    /// Last live STAR left of the first labelled column, joined to it.
    LeftEdge,
    /// First labelled column after the last live STAR... mirrored on the right.
    RightEdge,
    /// Even labelled column joined back to the nearest free left end.
    EvenRejoin,
    /// Odd labelled column joined forward to the nearest free right end.
    OddRejoin,
    /// Leftover left end joined to the next leftover right end.
    LooseEnd,
}

impl Origin {
    /// Lines made by the primary rejoining rule, as opposed to loose ends.
    pub fn is_primary_rejoin(self) -> bool {
        matches!(
            self,
            Origin::LeftEdge | Origin::RightEdge | Origin::EvenRejoin | Origin::OddRejoin
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Line {
    pub from: usize,
    pub to: usize,
    pub label: Label,
    pub status: Status,
    /// Stage that created the line; 0 for the horizontal lines.
    pub stage: usize,
    pub gated_at: Option<usize>,
    pub deleted_at: Option<usize>,
    pub origin: Origin,
    /// For a line whose label was transferred from a deleted line.
    pub label_from: Option<Coord>,
}

impl Line {
    pub fn coord(&self) -> Coord {
        (self.from, self.to)
    }

    fn live_at(&self, stage: usize) -> bool {
        self.stage <= stage
            && self.deleted_at.is_none_or(|d| d > stage)
            && self.gated_at.is_none_or(|g| g > stage)
    }
}

/// What one stage did.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct StageRecord {
    pub stage: usize,
    /// Labelled columns `C_0 .. C_{2n+1}`.
    pub labelled_columns: Vec<usize>,
    pub gated: Vec<Coord>,
    pub deleted: Vec<Coord>,
    pub created: Vec<Coord>,
}

/// The evolving set of labelled lines on a tableau.
#[derive(Clone, Debug)]
pub struct LineSet {
    tableau: Tableau,
    lines: Vec<Line>,
    stage: usize,
    log: Vec<StageRecord>,
}

impl LineSet {
    pub fn tableau(&self) -> &Tableau {
        &self.tableau
    }

    pub fn lines(&self) -> &[Line] {
        &self.lines
    }

    /// Last completed stage.
    pub fn stage(&self) -> usize {
        self.stage
    }

    pub fn stage_log(&self) -> &[StageRecord] {
        &self.log
    }

    /// Lines that were not deleted.
    pub fn present(&self) -> impl Iterator<Item = &Line> {
        self.lines.iter().filter(|l| l.status != Status::Deleted)
    }

    /// Support of `e`.
    pub fn e(&self) -> CoordSet {
        self.present()
            .filter(|l| l.label == Label::One)
            .map(Line::coord)
            .collect()
    }

    /// Support of `V`.
    pub fn v(&self) -> CoordSet {
        self.present()
            .filter(|l| l.label == Label::Star)
            .map(Line::coord)
            .collect()
    }

    pub fn find(&self, from: usize, to: usize) -> Option<&Line> {
        self.present().find(|l| l.from == from && l.to == to)
    }

    /// The STAR line ending in the bottom box of the pair's right column.
    pub fn star_of(&self, pair: &NeighborPair) -> Option<&Line> {
        let b = self.tableau.bottom(pair.right);
        self.present().find(|l| l.label == Label::Star && l.to == b)
    }

    fn push(
        &mut self,
        from: usize,
        to: usize,
        label: Label,
        stage: usize,
        origin: Origin,
    ) -> Result<()> {
        if self.find(from, to).is_some() {
            return Err(WlabError::lemma(
                "rejoin",
                format!("stage {stage} re-creates line ({from},{to})"),
            ));
        }
        let (cf, ct) = (self.tableau.col_of(from), self.tableau.col_of(to));
        if cf >= ct {
            return Err(WlabError::lemma(
                "rejoin",
                format!("stage {stage} line ({from},{to}) does not go right"),
            ));
        }
        self.lines.push(Line {
            from,
            to,
            label,
            status: Status::Active,
            stage,
            gated_at: None,
            deleted_at: None,
            origin,
            label_from: None,
        });
        Ok(())
    }

    /// JSON-ready view: `{"e", "v", "lines"}`.
    pub fn to_json(&self) -> serde_json::Value {
        let mut lines: Vec<&Line> = self.lines.iter().collect();
        lines.sort_by_key(|l| (l.from, l.to, l.stage));
        serde_json::json!({
            "e": self.e(),
            "v": self.v(),
            "lines": lines.iter().map(|l| serde_json::json!({
                "from": l.from,
                "to": l.to,
                "label": l.label,
                "status": l.status,
                "stage": l.stage,
            })).collect::<Vec<_>>(),
        })
    }

    /// Tableau followed by the list of present lines.
    pub fn render(&self) -> String {
        let mut out = self.tableau.render();
        let mut lines: Vec<&Line> = self.present().collect();
        lines.sort_by_key(|l| (l.from, l.to));
        for l in lines {
            let mark = match (l.label, l.status) {
                (Label::One, _) => "1",
                (Label::Star, Status::Gated) => "* gated",
                (Label::Star, _) => "*",
            };
            out.push_str(&format!(
                "  ({},{}) {} [stage {}]\n",
                l.from, l.to, mark, l.stage
            ));
        }
        out
    }

    /// `n × n` grid with `1` on `e`, `*` on `V`, `.` on other nilradical
    /// cells and blanks elsewhere.
    pub fn render_matrix(&self) -> String {
        let e = self.e();
        let v = self.v();
        let t = &self.tableau;
        let n = t.n();
        let mut out = String::new();
        for i in 1..=n {
            let row: Vec<String> = (1..=n)
                .map(|j| {
                    let c = (i, j);
                    let s = if e.contains(&c) {
                        "1"
                    } else if v.contains(&c) {
                        "*"
                    } else if t.in_nilradical(c) {
                        "."
                    } else {
                        " "
                    };
                    format!("{s:>2}")
                })
                .collect();
            out.push_str(row.concat().trim_end());
            out.push('\n');
        }
        out
    }
}

/// Horizontal lines between adjacent boxes of each row, all labelled ONE.
pub fn step1(t: &Tableau) -> LineSet {
    let mut lines = Vec::new();
    let max = t.composition().max_height();
    for r in 1..=max {
        for w in t.row(r).windows(2) {
            lines.push(Line {
                from: w[0],
                to: w[1],
                label: Label::One,
                status: Status::Active,
                stage: 0,
                gated_at: None,
                deleted_at: None,
                origin: Origin::Horizontal,
                label_from: None,
            });
        }
    }
    LineSet {
        tableau: t.clone(),
        lines,
        stage: 0,
        log: Vec::new(),
    }
}

/// Rightmost labelling: the horizontal line entering the bottom box of a
/// column with a left neighbour becomes STAR, every other line ONE.
pub fn step2(mut ls: LineSet) -> LineSet {
    let t = ls.tableau.clone();
    let starred: BTreeSet<usize> = neighboring_pairs(t.composition())
        .iter()
        .map(|p| t.bottom(p.right))
        .collect();
    for l in &mut ls.lines {
        l.label = if starred.contains(&l.to) {
            Label::Star
        } else {
            Label::One
        };
    }
    ls
}

/// Runs stages with maximal gating. The stage after the tallest row has no
/// labelled columns; it only gates the remaining STAR lines and gathers loose
/// ends, after which nothing can change.
pub fn step3_maximal(mut ls: LineSet) -> Result<LineSet> {
    let max = ls.tableau.composition().max_height();
    for i in 1..=max + 1 {
        run_stage(&mut ls, i)?;
    }
    Ok(ls)
}

/// Steps 1 to 3 on a composition.
pub fn build_section(comp: &Composition) -> Result<LineSet> {
    step3_maximal(step2(step1(&Tableau::new(comp))))
}

fn run_stage(ls: &mut LineSet, i: usize) -> Result<()> {
    let t = ls.tableau.clone();
    let col = |e: usize| t.col_of(e);
    let row = |e: usize| t.row_of(e);
    let mut record = StageRecord {
        stage: i,
        ..Default::default()
    };

    let mut live: Vec<usize> = (0..ls.lines.len())
        .filter(|&x| {
            let l = &ls.lines[x];
            l.status == Status::Active && l.label == Label::Star && row(l.from) < i && row(l.to) < i
        })
        .collect();
    live.sort_by_key(|&x| (col(ls.lines[x].from), col(ls.lines[x].to)));
    let b: Vec<usize> = live.iter().map(|&x| ls.lines[x].from).collect();
    let bp: Vec<usize> = live.iter().map(|&x| ls.lines[x].to).collect();
    let u = live.len();

    for j in 0..u {
        if row(bp[j]) != i - 1 {
            return Err(WlabError::lemma(
                "up-going linkage",
                format!(
                    "stage {i}: live STAR ({},{}) ends off row {}",
                    b[j],
                    bp[j],
                    i - 1
                ),
            ));
        }
        if j + 1 < u && col(bp[j]) > col(b[j + 1]) {
            return Err(WlabError::lemma(
                "non-overlapping",
                format!(
                    "stage {i}: ({},{}) overlaps ({},{})",
                    b[j],
                    bp[j],
                    b[j + 1],
                    bp[j + 1]
                ),
            ));
        }
    }

    let tall: Vec<usize> = (1..=t.k()).filter(|&c| t.height(c) >= i).collect();
    for j in 0..u {
        if t.crosses_height(b[j], bp[j], i) {
            return Err(WlabError::lemma(
                "adjacency",
                format!(
                    "stage {i}: ({},{}) crosses a column of height >= {i}",
                    b[j], bp[j]
                ),
            ));
        }
    }

    let mut labelled = Vec::new();
    if let (Some(&first), Some(&end)) = (tall.first(), tall.last()) {
        labelled.push(first);
        for w in tall.windows(2) {
            if bp.iter().any(|&e| col(e) > w[0] && col(e) < w[1]) {
                labelled.push(w[0]);
                labelled.push(w[1]);
            }
        }
        labelled.push(end);
    }
    record.labelled_columns = labelled.clone();
    let last = labelled.len().saturating_sub(1);
    let low = |j: usize| {
        t.entry(i, labelled[j])
            .expect("labelled columns reach row i")
    };

    // Delete the row-i line between C_j and C_{j+1} for odd j.
    let mut deleted_label: BTreeMap<usize, (Label, Coord)> = BTreeMap::new();
    for j in (1..last).step_by(2) {
        let (x, y) = (low(j), low(j + 1));
        let idx = ls
            .lines
            .iter()
            .position(|l| l.status == Status::Active && l.from == x && l.to == y)
            .ok_or_else(|| {
                WlabError::lemma(
                    "deletion",
                    format!("stage {i}: no row-{i} line ({x},{y}) to delete"),
                )
            })?;
        let l = &mut ls.lines[idx];
        l.status = Status::Deleted;
        l.deleted_at = Some(i);
        deleted_label.insert(j + 1, (l.label, (x, y)));
        record.deleted.push((x, y));
    }

    for &x in &live {
        let l = &mut ls.lines[x];
        l.status = Status::Gated;
        l.gated_at = Some(i);
        record.gated.push(l.coord());
    }

    let mut right_used = vec![false; u];
    let mut left_used = vec![false; u];
    let claim = |used: &mut Vec<bool>, j: usize, what: &str| -> Result<()> {
        if used[j] {
            return Err(WlabError::lemma(
                "double join",
                format!("stage {i}: {what} end of live line {} joined twice", j + 1),
            ));
        }
        used[j] = true;
        Ok(())
    };
    let mut created: Vec<(usize, usize, Label, Origin, Option<Coord>)> = Vec::new();

    if !labelled.is_empty() {
        if let Some(j) = (0..u).rev().find(|&j| col(b[j]) < labelled[0]) {
            claim(&mut right_used, j, "left")?;
            created.push((b[j], low(0), Label::One, Origin::LeftEdge, None));
        }
        if let Some(j) = (0..u).find(|&j| col(bp[j]) > labelled[last]) {
            claim(&mut left_used, j, "right")?;
            created.push((low(last), bp[j], Label::One, Origin::RightEdge, None));
        }
    }
    for jj in 1..last {
        if jj % 2 == 0 {
            let j = (0..u)
                .rev()
                .find(|&j| col(b[j]) < labelled[jj])
                .ok_or_else(|| {
                    WlabError::lemma(
                        "rejoin",
                        format!("stage {i}: no free left end before C_{jj}"),
                    )
                })?;
            claim(&mut right_used, j, "left")?;
            let (label, src) = deleted_label[&jj];
            created.push((b[j], low(jj), label, Origin::EvenRejoin, Some(src)));
        } else {
            let j = (0..u).find(|&j| col(bp[j]) > labelled[jj]).ok_or_else(|| {
                WlabError::lemma(
                    "rejoin",
                    format!("stage {i}: no free right end after C_{jj}"),
                )
            })?;
            claim(&mut left_used, j, "right")?;
            created.push((low(jj), bp[j], Label::One, Origin::OddRejoin, None));
        }
    }
    for j in 0..u.saturating_sub(1) {
        if !right_used[j] {
            claim(&mut left_used, j + 1, "right")?;
            right_used[j] = true;
            created.push((b[j], bp[j + 1], Label::One, Origin::LooseEnd, None));
        }
    }

    for (from, to, label, origin, src) in created {
        ls.push(from, to, label, i, origin)?;
        ls.lines.last_mut().unwrap().label_from = src;
        record.created.push((from, to));
    }
    ls.stage = i;
    ls.log.push(record);
    Ok(())
}

/// The composite lines attached to one neighbouring pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairDecomposition {
    pub pair: NeighborPair,
    /// One box sequence per source box of the left column, top to bottom.
    pub composite_lines: Vec<Vec<usize>>,
    /// The STAR line used.
    pub star: Coord,
}

/// For each pair of height `s`, the unique set of `s` disjoint composite
/// lines from the left column to the right column covering every box of
/// rows `1..=s` between them, using the lines live at the end of stage `s`.
pub fn verify_p1_p2(ls: &LineSet) -> Result<Vec<PairDecomposition>> {
    neighboring_pairs(ls.tableau.composition())
        .iter()
        .map(|p| decompose_pair(ls, p))
        .collect()
}

pub fn decompose_pair(ls: &LineSet, pair: &NeighborPair) -> Result<PairDecomposition> {
    let t = &ls.tableau;
    let s = pair.height;
    let boxes: Vec<usize> = (pair.left..=pair.right)
        .flat_map(|c| t.column(c).iter().copied().take(s))
        .collect();
    let in_window: BTreeSet<usize> = boxes.iter().copied().collect();
    let sources: Vec<usize> = t.column(pair.left).to_vec();
    let sinks: BTreeSet<usize> = t.column(pair.right).iter().copied().collect();

    let mut out_edges: BTreeMap<usize, Vec<(usize, Label)>> = BTreeMap::new();
    for l in ls.lines.iter().filter(|l| l.live_at(s)) {
        if in_window.contains(&l.from)
            && in_window.contains(&l.to)
            && !t.crosses_height(l.from, l.to, s)
        {
            out_edges.entry(l.from).or_default().push((l.to, l.label));
        }
    }

    let movers: Vec<usize> = boxes
        .iter()
        .copied()
        .filter(|b| !sinks.contains(b))
        .collect();
    let mut chosen: Vec<Option<(usize, Label)>> = vec![None; movers.len()];
    let mut taken: BTreeSet<usize> = sources.iter().copied().collect();
    let mut found: Vec<Vec<(usize, Label)>> = Vec::new();
    search(&movers, 0, &out_edges, &mut taken, &mut chosen, &mut found);

    let name = pair.to_string();
    match found.len() {
        0 => return Err(WlabError::NoDecomposition(name)),
        1 => {}
        _ => return Err(WlabError::MultipleDecompositions(name)),
    }
    let next: BTreeMap<usize, (usize, Label)> = movers
        .iter()
        .copied()
        .zip(found[0].iter().copied())
        .collect();
    let stars: Vec<Coord> = next
        .iter()
        .filter(|(_, (_, l))| *l == Label::Star)
        .map(|(&a, &(b, _))| (a, b))
        .collect();
    if stars.len() != 1 {
        return Err(WlabError::WrongStarCount {
            pair: name,
            stars: stars.len(),
        });
    }
    let composite_lines = sources
        .iter()
        .map(|&src| {
            let mut path = vec![src];
            let mut cur = src;
            while let Some(&(nx, _)) = next.get(&cur) {
                path.push(nx);
                cur = nx;
            }
            path
        })
        .collect();
    Ok(PairDecomposition {
        pair: *pair,
        composite_lines,
        star: stars[0],
    })
}

fn search(
    movers: &[usize],
    pos: usize,
    edges: &BTreeMap<usize, Vec<(usize, Label)>>,
    taken: &mut BTreeSet<usize>,
    chosen: &mut Vec<Option<(usize, Label)>>,
    found: &mut Vec<Vec<(usize, Label)>>,
) {
    if found.len() > 1 {
        return;
    }
    if pos == movers.len() {
        found.push(chosen.iter().map(|c| c.unwrap()).collect());
        return;
    }
    let Some(options) = edges.get(&movers[pos]) else {
        return;
    };
    for &(to, label) in options {
        if taken.insert(to) {
            chosen[pos] = Some((to, label));
            search(movers, pos + 1, edges, taken, chosen, found);
            taken.remove(&to);
        }
    }
    chosen[pos] = None;
}

/// Joins the composite lines of consecutive pairs of one height that share
/// a column, giving lines from the first column of the chain to the last.
pub fn concatenate_chain(parts: &[PairDecomposition]) -> Vec<Vec<usize>> {
    let Some(first) = parts.first() else {
        return Vec::new();
    };
    let mut lines = first.composite_lines.clone();
    for d in &parts[1..] {
        for line in &mut lines {
            let end = *line.last().unwrap();
            if let Some(next) = d.composite_lines.iter().find(|c| c[0] == end) {
                line.extend_from_slice(&next[1..]);
            }
        }
    }
    lines
}

/// Set of `(from, to, label)` for present lines satisfying `keep`.
fn labelled_set(ls: &LineSet, keep: impl Fn(&Line) -> bool) -> BTreeSet<(usize, usize, Label)> {
    ls.present()
        .filter(|l| keep(l))
        .map(|l| (l.from, l.to, l.label))
        .collect()
}

/// Comparison of line sets after removing the first or last column.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct RemovalReport {
    /// Removing the last column only removes the lines into it.
    pub last_column_exact: bool,
    /// Lines of the first `c_1` rows agree after removing the first column,
    /// up to the flips listed in `first_column_flips`.
    pub first_column_restricted: bool,
    /// STAR lines that became ONE, in the numbering of the shorter tableau.
    pub first_column_flips: Vec<Coord>,
}

pub fn removal_stability(comp: &Composition) -> Result<RemovalReport> {
    let full = build_section(comp)?;
    let t = full.tableau().clone();
    let k = comp.k();
    let Some(without_last) = comp.without_last() else {
        return Ok(RemovalReport {
            last_column_exact: true,
            first_column_restricted: true,
            first_column_flips: Vec::new(),
        });
    };
    let short = build_section(&without_last)?;
    let last_col: BTreeSet<usize> = t.column(k).iter().copied().collect();
    let restricted = labelled_set(&full, |l| !last_col.contains(&l.to));
    let last_ok = restricted == labelled_set(&short, |_| true);

    let without_first = comp.without_first().unwrap();
    let rest = build_section(&without_first)?;
    let h = comp.parts()[0];
    let shift = h;
    let rt = rest.tableau().clone();
    // Compare the lines of rows 1..=h as they stand after stage h.
    let snapshot = |ls: &LineSet, tab: &Tableau| -> BTreeSet<(usize, usize, Label)> {
        ls.lines
            .iter()
            .filter(|l| {
                l.stage <= h
                    && l.deleted_at.is_none_or(|d| d > h)
                    && tab.row_of(l.from) <= h
                    && tab.row_of(l.to) <= h
            })
            .map(|l| (l.from, l.to, l.label))
            .collect()
    };
    let big: BTreeSet<(usize, usize, Label)> = snapshot(&full, &t)
        .into_iter()
        .filter(|&(a, _, _)| a > shift)
        .map(|(a, b, lab)| (a - shift, b - shift, lab))
        .collect();
    let small = snapshot(&rest, &rt);

    let expected_flip = (1..=rt.k())
        .find(|&c| rt.height(c) == h)
        .map(|c| rt.bottom(c));
    let mut flips = Vec::new();
    let mut ok = true;
    let only_big: Vec<_> = big.difference(&small).copied().collect();
    let only_small: Vec<_> = small.difference(&big).copied().collect();
    for &(a, b, lab) in &only_big {
        let flipped = lab == Label::Star
            && Some(b) == expected_flip
            && only_small.contains(&(a, b, Label::One));
        if flipped {
            flips.push((a, b));
        } else {
            ok = false;
        }
    }
    ok &= only_small.len() == flips.len();
    Ok(RemovalReport {
        last_column_exact: last_ok,
        first_column_restricted: ok,
        first_column_flips: flips,
    })
}

/// Outcome of the line-set property checks; each entry names a failed
/// property and the offending data.
#[derive(Clone, Debug, Default, Serialize, PartialEq, Eq)]
pub struct LemmaReport {
    pub failures: Vec<String>,
}

impl LemmaReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }

    fn fail(&mut self, what: &str, detail: String) {
        self.failures.push(format!("{what}: {detail}"));
    }
}

/// Checks the structural properties of a finished line set.
pub fn lemma_checks(ls: &LineSet) -> LemmaReport {
    let mut rep = LemmaReport::default();
    let t = ls.tableau();
    let comp = t.composition();
    let pairs = neighboring_pairs(comp);
    let row = |e: usize| t.row_of(e);
    let stars: Vec<&Line> = ls.present().filter(|l| l.label == Label::Star).collect();
    let ones: Vec<&Line> = ls.present().filter(|l| l.label == Label::One).collect();

    // Star lines at level <= j match pairs of height <= j.
    for j in 1..=comp.max_height() {
        let lines = stars.iter().filter(|l| row(l.to) <= j).count();
        let np = pairs.iter().filter(|p| p.height <= j).count();
        if lines != np {
            rep.fail(
                "star count by level",
                format!("level {j}: {lines} stars vs {np} pairs"),
            );
        }
    }

    let star_ends: BTreeSet<usize> = stars.iter().map(|l| l.to).collect();
    if star_ends.len() != stars.len() {
        rep.fail(
            "distinct star ends",
            "two STAR lines share a right end".into(),
        );
    }

    let has_left_neighbor = |c: usize| pairs.iter().any(|p| p.right == c);
    for l in &stars {
        let c = t.col_of(l.to);
        let bottom = t.bottom(c) == l.to;
        if !bottom || !has_left_neighbor(c) || row(l.to) < row(l.from) {
            rep.fail("star placement", format!("STAR ({},{})", l.from, l.to));
        }
    }

    let mut from_set = BTreeSet::new();
    let mut to_set = BTreeSet::new();
    for l in &ones {
        if !from_set.insert(l.from) || !to_set.insert(l.to) {
            rep.fail(
                "one-line ends",
                format!("ONE line ({},{}) shares an end", l.from, l.to),
            );
        }
    }

    for l in &ones {
        if row(l.to) + 1 < row(l.from) {
            rep.fail(
                "row drop",
                format!("ONE ({},{}) drops more than one row", l.from, l.to),
            );
        } else if row(l.to) + 1 == row(l.from) && !star_ends.contains(&l.to) {
            rep.fail(
                "row drop",
                format!(
                    "ONE ({},{}) drops a row without a shared STAR end",
                    l.from, l.to
                ),
            );
        }
    }

    // Once a box has a ONE line, no later STAR line may start there.
    for l in &ones {
        let since = l.stage.max(row(l.from)).max(row(l.to));
        for st in stars.iter().filter(|s| s.from == l.from) {
            if row(st.to) > since {
                rep.fail(
                    "one blocks later star",
                    format!(
                        "box {} has ONE ({},{}) and later STAR ({},{})",
                        l.from, l.from, l.to, st.from, st.to
                    ),
                );
            }
        }
    }

    for l in ls.present() {
        if l.stage == 0 {
            continue;
        }
        // Rejoined lines avoid columns reaching the stage row; loose ends
        // lie one row higher, so the same bound is one past their own row.
        let bound = l.stage;
        if t.crosses_height(l.from, l.to, bound) {
            rep.fail(
                "sandwiching",
                format!(
                    "({},{}) from stage {} crosses a column of height >= {bound}",
                    l.from, l.to, l.stage
                ),
            );
        }
    }

    // Every column carries a star exactly when it has a left neighbour, and
    // the starred rows run along surrounding pairs.
    for c in 1..=t.k() {
        let n_here = stars.iter().filter(|l| t.col_of(l.to) == c).count();
        if n_here != usize::from(has_left_neighbor(c)) {
            rep.fail(
                "star per column",
                format!("column {c} carries {n_here} stars"),
            );
        }
    }
    for p in &pairs {
        let Some(st) = ls.star_of(p) else {
            rep.fail("star strings", format!("pair {p} has no star"));
            continue;
        };
        let expected = match surrounded_by(comp, p, &pairs) {
            Some(inner) => ls.star_of(&inner).map(|l| l.from),
            None => t
                .row(p.height)
                .into_iter()
                .take_while(|&e| e != t.bottom(p.right))
                .last(),
        };
        if expected != Some(st.from) {
            rep.fail(
                "star strings",
                format!("pair {p}: STAR on row {} expected {:?}", st.from, expected),
            );
        }
    }

    check_v_property(ls, &pairs, &mut rep);
    check_lowest_box(ls, &mut rep);
    rep
}

/// The pair of height `s - 1` that `p` surrounds: its right column is the
/// last column of height at least `s - 1` before `p.right`.
pub fn surrounded_by(
    comp: &Composition,
    p: &NeighborPair,
    pairs: &[NeighborPair],
) -> Option<NeighborPair> {
    if p.height < 2 {
        return None;
    }
    let parts = comp.parts();
    let s = p.height - 1;
    let prev = (1..p.right).rev().find(|&c| parts[c - 1] >= s)?;
    if parts[prev - 1] != s {
        return None;
    }
    pairs
        .iter()
        .copied()
        .find(|q| q.height == s && q.right == prev)
}

/// At the end of stage `s`, between a pair of height `s`, every box of rows
/// `1..=s` has a live right-going ONE line except those in the right column
/// and the left end of the pair's STAR, and symmetrically on the left.
fn check_v_property(ls: &LineSet, pairs: &[NeighborPair], rep: &mut LemmaReport) {
    let t = ls.tableau();
    for p in pairs {
        let s = p.height;
        let live: Vec<&Line> = ls.lines.iter().filter(|l| l.live_at(s)).collect();
        let star = live
            .iter()
            .find(|l| l.label == Label::Star && l.to == t.bottom(p.right))
            .map(|l| l.coord());
        for c in p.left..=p.right {
            for &b in t.column(c).iter().take(s) {
                if c != p.right
                    && Some(b) != star.map(|x| x.0)
                    && !live.iter().any(|l| l.label == Label::One && l.from == b)
                {
                    rep.fail(
                        "pair coverage",
                        format!("pair {p}: box {b} lacks a right ONE line"),
                    );
                }
                if c != p.left
                    && Some(b) != star.map(|x| x.1)
                    && !live.iter().any(|l| l.label == Label::One && l.to == b)
                {
                    rep.fail(
                        "pair coverage",
                        format!("pair {p}: box {b} lacks a left ONE line"),
                    );
                }
            }
        }
    }
}

/// If the bottom box of a column has a left (right) ONE line, so does every
/// box of that column, except a box whose right STAR line shares its end with
/// the bottom box's line at the bottom of a column one shorter.
fn check_lowest_box(ls: &LineSet, rep: &mut LemmaReport) {
    let t = ls.tableau();
    let one_from = |b: usize| ls.present().find(|l| l.label == Label::One && l.from == b);
    let one_to = |b: usize| ls.present().any(|l| l.label == Label::One && l.to == b);
    for c in 1..=t.k() {
        let h = t.height(c);
        let bottom = t.bottom(c);
        if one_to(bottom) {
            for &b in &t.column(c)[..h - 1] {
                if !one_to(b) {
                    rep.fail(
                        "bottom box lines",
                        format!("box {b} of column {c} lacks a left ONE line"),
                    );
                }
            }
        }
        if let Some(l) = one_from(bottom) {
            for &b in &t.column(c)[..h - 1] {
                if one_from(b).is_some() {
                    continue;
                }
                let excused = ls.present().any(|st| {
                    st.label == Label::Star
                        && st.from == b
                        && st.to == l.to
                        && t.bottom(t.col_of(st.to)) == st.to
                        && t.height(t.col_of(st.to)) + 1 == h
                });
                if !excused {
                    rep.fail(
                        "bottom box lines",
                        format!("box {b} of column {c} lacks a right ONE line"),
                    );
                }
            }
        }
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
    fn horizontal_lines() {
        let t = Tableau::new(&comp("1,3,2,1"));
        let ls = step1(&t);
        let got: CoordSet = ls.lines().iter().map(Line::coord).collect();
        assert_eq!(got, set(&[(1, 2), (2, 5), (5, 7), (3, 6)]));
        let t = Tableau::new(&comp("2,2"));
        let got: CoordSet = step1(&t).lines().iter().map(Line::coord).collect();
        assert_eq!(got, set(&[(1, 3), (2, 4)]));
    }

    #[test]
    fn rightmost_labelling() {
        let ls = step2(step1(&Tableau::new(&comp("3,1,2,2,1,3"))));
        assert_eq!(ls.v(), set(&[(7, 9), (6, 8), (3, 12)]));
        let ls = step2(step1(&Tableau::new(&comp("2,2"))));
        assert_eq!(ls.v(), set(&[(2, 4)]));
        let ls = step2(step1(&Tableau::new(&comp("1,1"))));
        assert_eq!(ls.v(), set(&[(1, 2)]));
    }

    #[test]
    fn golden_sections() {
        let cases: [(&str, &[Coord], &[Coord]); 4] = [
            (
                "3,1,2,2,1,3",
                &[
                    (1, 4),
                    (4, 5),
                    (5, 7),
                    (9, 10),
                    (2, 6),
                    (8, 9),
                    (3, 8),
                    (7, 11),
                ],
                &[(7, 9), (6, 8), (6, 12)],
            ),
            (
                "3,2,1,1,2,3",
                &[
                    (1, 4),
                    (2, 5),
                    (3, 9),
                    (4, 6),
                    (5, 7),
                    (7, 8),
                    (8, 10),
                    (9, 11),
                ],
                &[(6, 7), (6, 9), (6, 12)],
            ),
            ("1,2,2,1", &[(1, 2), (2, 4), (5, 6)], &[(4, 6), (3, 5)]),
            ("1,3,2,1", &[(1, 2), (2, 5), (3, 6), (6, 7)], &[(5, 7)]),
        ];
        for (c, e, v) in cases {
            let ls = build_section(&comp(c)).unwrap();
            assert_eq!(ls.e(), set(e), "e for {c}");
            assert_eq!(ls.v(), set(v), "V for {c}");
        }
    }

    #[test]
    fn gating_stage() {
        let ls = build_section(&comp("3,1,2,2,1,3")).unwrap();
        assert_eq!(ls.find(7, 9).unwrap().gated_at, Some(2));
        assert_eq!(ls.find(6, 8).unwrap().gated_at, Some(3));
        assert_eq!(ls.find(6, 12).unwrap().label_from, Some((3, 12)));
    }

    #[test]
    fn decompositions() {
        let ls = build_section(&comp("1,2,1,1,1,1,1,2")).unwrap();
        let p = NeighborPair::new(ls.tableau().composition(), 2, 8).unwrap();
        let d = decompose_pair(&ls, &p).unwrap();
        assert_eq!(
            d.composite_lines,
            vec![vec![2, 5, 7, 10], vec![3, 4, 6, 8, 9]]
        );
        assert_eq!(d.star, (7, 10));

        let ls = build_section(&comp("2,2")).unwrap();
        let d = verify_p1_p2(&ls).unwrap();
        assert_eq!(d[0].composite_lines, vec![vec![1, 3], vec![2, 4]]);
        assert_eq!(d[0].star, (2, 4));
    }

    #[test]
    fn chained_composite_lines() {
        let c = comp("3,2,1,1,2,3,2,3");
        let ls = build_section(&c).unwrap();
        let parts: Vec<_> = verify_p1_p2(&ls)
            .unwrap()
            .into_iter()
            .filter(|d| d.pair.height == 3)
            .collect();
        let mut lines = concatenate_chain(&parts);
        lines.sort_by_key(|l| std::cmp::Reverse(l[0]));
        assert_eq!(
            lines,
            vec![
                vec![3, 9, 11, 17],
                vec![2, 5, 7, 8, 10, 13, 15],
                vec![1, 4, 6, 12, 14, 16]
            ]
        );
    }

    #[test]
    fn single_column_is_empty() {
        let ls = build_section(&comp("5")).unwrap();
        assert!(ls.e().is_empty() && ls.v().is_empty());
        assert!(verify_p1_p2(&ls).unwrap().is_empty());
        let r = removal_stability(&comp("5")).unwrap();
        assert!(r.last_column_exact && r.first_column_restricted);
    }
}
