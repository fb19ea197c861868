//! Acceptance suite: one line per criterion, then a single assertion over
//! all of them so that every criterion is reported even when one fails.

use std::time::{Duration, Instant};

use wlab::component::{check_e_in_u, dim_b_saturation, markings_of, orbital_closure_test};
use wlab::diagram::neighboring_pairs;
use wlab::lie::JordanType;
use wlab::regularity::{analyze_regularity, EvsPolicy, RegularityReport, Verdict};
use wlab::section::{build_section, concatenate_chain, verify_p1_p2, Origin};
use wlab::suites::{run_suites, Suite, SuiteConfig};
use wlab::weyl::{excluded_direct, CoordSet};
use wlab::{Composition, Coord, NeighborPair};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn comp(s: &str) -> Composition {
    s.parse().unwrap()
}

fn set(v: &[Coord]) -> CoordSet {
    v.iter().copied().collect()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Runs `suites` over all compositions of `1..=max_n`, returning the number
/// of compositions or the first few failures.
fn exhaustive(max_n: usize, suites: &[Suite], cfg: &SuiteConfig) -> Result<usize, String> {
    let mut count = 0;
    let mut failures = Vec::new();
    for n in 1..=max_n {
        for c in Composition::all_of(n) {
            let o = run_suites(&c, suites, cfg);
            count += 1;
            if !o.passed() {
                let names: Vec<String> = o
                    .failures()
                    .iter()
                    .map(|f| format!("{} ({})", f.name, f.detail))
                    .collect();
                failures.push(format!(
                    "{}: {:?} {}",
                    o.composition,
                    o.error,
                    names.join("; ")
                ));
            }
        }
    }
    if failures.is_empty() {
        Ok(count)
    } else {
        let shown: Vec<_> = failures.iter().take(3).cloned().collect();
        Err(format!(
            "{} failing compositions, e.g. {}",
            failures.len(),
            shown.join(" | ")
        ))
    }
}

fn golden_sections() -> Outcome {
    let cases: [(&str, &[Coord], &[Coord]); 4] = [
        (
            "3,1,2,2,1,3",
            &[
                (1, 4),
                (2, 6),
                (3, 8),
                (4, 5),
                (5, 7),
                (7, 11),
                (8, 9),
                (9, 10),
            ],
            &[(6, 8), (6, 12), (7, 9)],
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
        ("1,3,2,1", &[(1, 2), (2, 5), (3, 6), (6, 7)], &[(5, 7)]),
        ("1,2,2,1", &[(1, 2), (2, 4), (5, 6)], &[(3, 5), (4, 6)]),
    ];
    for (c, e, v) in cases {
        let start = Instant::now();
        let ls = build_section(&comp(c)).map_err(|err| format!("{c}: {err}"))?;
        ensure(ls.e() == set(e), || format!("{c}: e = {:?}", ls.e()))?;
        ensure(ls.v() == set(v), || format!("{c}: V = {:?}", ls.v()))?;
        ensure(start.elapsed() < Duration::from_secs(1), || {
            format!("{c}: too slow")
        })?;
    }
    Ok("4 sections exact".into())
}

fn excluded_goldens() -> Outcome {
    let c = comp("1,3,2,1");
    let p = NeighborPair::new(&c, 1, 4).unwrap();
    let got = excluded_direct(&c, &p);
    ensure(got == set(&[(1, 3), (1, 4), (2, 6), (5, 7)]), || {
        format!("(1,3,2,1): {got:?}")
    })?;

    let c = comp("2,1,3,1,4,1,2");
    let p = NeighborPair::new(&c, 1, 7).unwrap();
    let mut want = CoordSet::new();
    want.extend([1, 2, 3].map(|r| (r, 6)));
    for r in [4, 5, 7] {
        want.extend([(r, 10), (r, 11)]);
    }
    want.extend([8, 9, 12].map(|r| (r, 14)));
    let got = excluded_direct(&c, &p);
    ensure(got == want, || format!("(2,1,3,1,4,1,2) height 2: {got:?}"))?;
    Ok("both sets exact".into())
}

fn oracle_equivalence() -> Outcome {
    let n = exhaustive(9, &[Suite::Excluded], &SuiteConfig::default())?;
    Ok(format!("{n} compositions, every pair agrees"))
}

fn weierstrass_property() -> Outcome {
    let cfg = SuiteConfig {
        trials: 32,
        symbolic_max_n: 7,
        ..SuiteConfig::default()
    };
    ensure(cfg.prime >= 1 << 61, || "prime too small".into())?;
    let n = exhaustive(9, &[Suite::Invariant], &cfg)?;
    Ok(format!("{n} compositions; symbolic route through n = 7"))
}

fn saturation_dimension() -> Outcome {
    let cfg = SuiteConfig {
        samples: 8,
        ..SuiteConfig::default()
    };
    let n = exhaustive(9, &[Suite::Dimension, Suite::Markings], &cfg)?;
    Ok(format!("{n} compositions, frames span"))
}

fn markings_claims() -> Outcome {
    let mut count = 0;
    for n in 1..=9 {
        for c in Composition::all_of(n) {
            let m = markings_of(&c).map_err(|e| format!("{c}: {e}"))?;
            ensure(m.y.len() == neighboring_pairs(&c).len(), || {
                format!("{c}: |Y| = {}", m.y.len())
            })?;
            ensure(check_e_in_u(&c).unwrap(), || format!("{c}: e leaves u"))?;
            count += 1;
        }
    }
    Ok(format!("{count} compositions, no violations"))
}

fn regularity(c: &str) -> RegularityReport {
    analyze_regularity(&comp(c), EvsPolicy::VerifiedBadOnly, 16, 0).unwrap()
}

fn census_goldens() -> Outcome {
    let jt = |v: &[usize]| JordanType(v.to_vec());
    let r = regularity("3,2,1,1,2,3");
    ensure(r.jordan_e == jt(&[5, 3, 3, 1]), || {
        format!("e: {}", r.jordan_e)
    })?;
    ensure(r.jordan_evs == jt(&[5, 4, 2, 1]), || {
        format!("e_VS: {}", r.jordan_evs)
    })?;
    ensure(r.dim_p_evs == 55, || {
        format!("dim P.e_VS = {}", r.dim_p_evs)
    })?;
    ensure(r.diagnostic.d1_exact == 55, || {
        "exact rank disagrees".into()
    })?;
    let r = regularity("2,1,1,2,1,1,2,1");
    ensure(r.jordan_evs == jt(&[5, 4, 2]), || {
        format!("e_VS: {}", r.jordan_evs)
    })?;
    ensure(r.dim_p_evs == 45, || {
        format!("dim P.e_VS = {}", r.dim_p_evs)
    })?;
    let r = regularity("2,1,2,1,2");
    ensure(r.jordan_e == jt(&[3, 3, 2]), || {
        format!("e: {}", r.jordan_e)
    })?;
    ensure(r.jordan_evs == jt(&[4, 2, 2]), || {
        format!("e_VS: {}", r.jordan_evs)
    })?;
    Ok("Jordan types and orbit dimensions exact".into())
}

fn no_dense_orbit() -> Outcome {
    let start = Instant::now();
    let r = regularity("2,1,1,2,1,1,2,1");
    ensure(r.verdict == Verdict::WeaklyRegularNoDenseOrbit, || {
        format!("verdict {}", r.verdict)
    })?;
    let cycles: Vec<_> = r.cycles.iter().map(|c| c.cycle.clone()).collect();
    ensure(cycles == vec![vec![3, 7, 11, 10, 3]], || {
        format!("cycles {cycles:?}")
    })?;
    ensure(start.elapsed() < Duration::from_secs(30), || {
        "too slow".into()
    })?;

    let start = Instant::now();
    let r = regularity("3,1,1,3,1,2");
    ensure(r.verdict == Verdict::Regular && r.e_regular, || {
        format!("verdict {}", r.verdict)
    })?;
    let all = analyze_regularity(&comp("3,1,1,3,1,2"), EvsPolicy::AllQuadruplets, 16, 0).unwrap();
    let odd: Vec<_> = all
        .cycles
        .iter()
        .filter(|c| !c.even)
        .map(|c| c.cycle.clone())
        .collect();
    ensure(odd == vec![vec![4, 6, 10, 9, 7, 4]], || {
        format!("odd cycles {odd:?}")
    })?;
    ensure(all.adapted_h.is_none(), || "odd cycle admits h".into())?;
    ensure(start.elapsed() < Duration::from_secs(30), || {
        "too slow".into()
    })?;
    Ok("no dense orbit certified; odd cycle reported".into())
}

fn orbital_closures() -> Outcome {
    for (c, want) in [("1,2,2,1", true), ("2,1,1,1,2", false), ("1,1,1", false)] {
        let v = orbital_closure_test(&comp(c), 8, 0).unwrap();
        ensure(v.is_orbital_variety_closure == want, || {
            format!(
                "{c}: dim B.u {} vs half orbit {}",
                v.dim_b_u, v.half_orbit_dim
            )
        })?;
    }
    let c = comp("3,2,1,1,2,3");
    let r = regularity("3,2,1,1,2,3");
    let d = dim_b_saturation(&c, 8, 0).unwrap();
    let half = r.jordan_evs.orbit_dim() / 2;
    ensure(r.dim_p_evs == half && d.max == half, || {
        format!(
            "dim P.e_VS {} dim B.u {} half orbit {half}",
            r.dim_p_evs, d.max
        )
    })?;
    Ok("4 verdicts exact".into())
}

fn structural_suites() -> Outcome {
    let cfg = SuiteConfig::default();
    let n = exhaustive(9, &[Suite::Section, Suite::Structural], &cfg)?;
    for big in ["4,3,2,1,1,2,3,2,1,1,2,3,4", "3,2,1,1,2,3,2,3"] {
        let o = run_suites(&comp(big), &[Suite::Section, Suite::Structural], &cfg);
        ensure(o.passed(), || {
            format!("{big}: {:?} {:?}", o.error, o.failures())
        })?;
    }
    // Rejoined STAR line crossing a shorter column, and a late loose end.
    let ls = build_section(&comp("4,3,2,1,1,2,3,2,1,1,2,3,4")).unwrap();
    let l = ls.find(10, 16).ok_or("line (10,16) missing")?;
    ensure(l.origin == Origin::EvenRejoin && l.stage == 3, || {
        format!("{l:?}")
    })?;
    ensure(ls.tableau().crosses_height(10, 16, 2), || {
        "(10,16) does not cross height 2".into()
    })?;
    let l = ls.find(10, 25).ok_or("line (10,25) missing")?;
    ensure(l.origin == Origin::LooseEnd, || format!("{l:?}"))?;
    // Composite lines of the height-3 pairs chain into three full lines.
    let ls = build_section(&comp("3,2,1,1,2,3,2,3")).unwrap();
    let parts: Vec<_> = verify_p1_p2(&ls)
        .map_err(|e| e.to_string())?
        .into_iter()
        .filter(|d| d.pair.height == 3)
        .collect();
    let mut lines = concatenate_chain(&parts);
    lines.sort();
    let want = vec![
        vec![1, 4, 6, 12, 14, 16],
        vec![2, 5, 7, 8, 10, 13, 15],
        vec![3, 9, 11, 17],
    ];
    ensure(lines == want, || format!("chained lines {lines:?}"))?;
    Ok(format!("{n} compositions plus 2 large examples"))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 10] = [
        ("golden sections", golden_sections),
        ("excluded-root goldens", excluded_goldens),
        (
            "closed form vs inversion oracle, n <= 9",
            oracle_equivalence,
        ),
        (
            "section property of the invariants, n <= 9",
            weierstrass_property,
        ),
        (
            "saturation dimension and tangent frames, n <= 9",
            saturation_dimension,
        ),
        ("circles and e inside u, n <= 9", markings_claims),
        ("regularity census goldens", census_goldens),
        ("component without a dense orbit", no_dense_orbit),
        ("orbital variety closure verdicts", orbital_closures),
        (
            "structural suites, n <= 9 and large examples",
            structural_suites,
        ),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let r = f();
        let secs = start.elapsed().as_secs_f64();
        match &r {
            Ok(msg) => println!("criterion {:>2} PASS  {name}: {msg} [{secs:.2}s]", i + 1),
            Err(msg) => {
                println!("criterion {:>2} FAIL  {name}: {msg} [{secs:.2}s]", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
