//! Report bundles for single compositions and sweeps, as JSON values and
//! plain-text summaries.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::component::{dim_b_saturation, markings, orbital_closure_test, tangent_frame};
use crate::diagram::{neighboring_pairs, Composition, Tableau};
use crate::error::Result;
use crate::invariant::{restrict_to_section_mod_p, MinorWindow, ModularSampler, Restriction};
use crate::regularity::{
    eigenvalue_sum_rule, regularity_report, EvsPolicy, OrbitSampler, RegularityReport, Verdict,
};
use crate::section::build_section;
use crate::suites::{run_suites, Outcome, Suite, SuiteConfig};
use crate::weyl::{excluded_direct, u_pi};

pub const SCHEMA: u32 = 1;

/// Everything computed for one composition.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub json: Value,
    pub text: String,
    pub outcome: Outcome,
}

fn coords_text<'a>(it: impl IntoIterator<Item = &'a (usize, usize)>) -> String {
    let v: Vec<String> = it.into_iter().map(|(i, j)| format!("({i},{j})")).collect();
    if v.is_empty() {
        "-".into()
    } else {
        v.join(" ")
    }
}

/// Full pipeline: tableau, section, markings, dimensions, invariants,
/// regularity, then every property suite.
pub fn analyze(comp: &Composition, cfg: &SuiteConfig, policy: EvsPolicy) -> Result<Analysis> {
    let t = Tableau::new(comp);
    let pairs = neighboring_pairs(comp);
    let ls = build_section(comp)?;
    let up = u_pi(comp);
    let marks = markings(&ls, &up)?;
    let frame = tangent_frame(&ls, &marks)?;
    let dims = dim_b_saturation(comp, cfg.samples, cfg.seed)?;
    let orbital = orbital_closure_test(comp, cfg.samples, cfg.seed)?;
    let mut sampler = ModularSampler::new(cfg.prime, cfg.seed, cfg.trials)?;
    let restrictions: Vec<Restriction> = pairs
        .iter()
        .map(|p| restrict_to_section_mod_p(&ls, p, &mut sampler))
        .collect::<Result<_>>()?;
    let orbit_sampler = OrbitSampler::new(comp, cfg.samples, cfg.seed).with_prime(cfg.field()?);
    let reg = regularity_report(comp, &ls, policy, &orbit_sampler);
    let sum_rule = reg
        .adapted_h
        .as_ref()
        .map(|h| eigenvalue_sum_rule(&ls, h).to_string());
    let outcome = run_suites(comp, &Suite::ALL, cfg);

    let excluded: BTreeMap<String, Value> = pairs
        .iter()
        .map(|p| (p.to_string(), json!(excluded_direct(comp, p))))
        .collect();
    let invariants: Vec<Value> = pairs
        .iter()
        .zip(&restrictions)
        .map(|(p, r)| {
            let w = MinorWindow::of_pair(comp, p);
            json!({
                "pair": p.to_string(),
                "degree": w.degree,
                "a_power": w.a_power,
                "minor_size": w.size,
                "restricts_to": r.coordinate,
                "sign": r.sign,
            })
        })
        .collect();
    let json = json!({
        "schema": SCHEMA,
        "composition": comp.to_string(),
        "n": comp.n(),
        "k": comp.k(),
        "config": {
            "prime": cfg.prime,
            "trials": cfg.trials,
            "samples": cfg.samples,
            "seed": cfg.seed,
            "policy": policy,
        },
        "pairs": pairs.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "dim_m": t.dim_nilradical(),
        "g": pairs.len(),
        "section": ls.to_json(),
        "excluded": excluded,
        "u": up.u,
        "markings": {"x": marks.x, "y": marks.y, "z": marks.z},
        "tangent_frame": {"steps": frame.steps, "batches": frame.batches(), "spans": frame.spans},
        "invariants": invariants,
        "dim_b_u": dims,
        "orbital_closure": orbital,
        "regularity": reg,
        "eigenvalue_sum": sum_rule,
        "checks": outcome,
        "render": {"tableau": t.render(), "matrix": marks.render()},
    });
    let text = analysis_text(
        comp,
        &t,
        &ls,
        &marks,
        &reg,
        &dims,
        &orbital,
        &outcome,
        &restrictions,
    );
    Ok(Analysis {
        json,
        text,
        outcome,
    })
}

#[allow(clippy::too_many_arguments)]
fn analysis_text(
    comp: &Composition,
    t: &Tableau,
    ls: &crate::section::LineSet,
    marks: &crate::component::Markings,
    reg: &RegularityReport,
    dims: &crate::component::RankOracleResult,
    orbital: &crate::component::OrbitalVerdict,
    outcome: &Outcome,
    restrictions: &[Restriction],
) -> String {
    let mut s = String::new();
    s.push_str(&format!(
        "composition {comp}  n={}  dim m={}  g={}\n\n",
        comp.n(),
        t.dim_nilradical(),
        restrictions.len()
    ));
    s.push_str(&t.render());
    s.push('\n');
    s.push_str(&format!("e    {}\n", coords_text(&ls.e())));
    s.push_str(&format!("V    {}\n", coords_text(&ls.v())));
    s.push_str(&format!("Z    {}\n", coords_text(&marks.z)));
    s.push_str(&format!("e_VS {}\n\n", coords_text(&reg.e_vs)));
    s.push_str(&marks.render());
    s.push('\n');
    for r in restrictions {
        let sign = if r.sign < 0 { "-" } else { "" };
        s.push_str(&format!(
            "{}  restricts to {sign}x{},{}\n",
            r.pair, r.coordinate.0, r.coordinate.1
        ));
    }
    s.push_str(&format!(
        "\ndim B.u = {} (expected {}), generic Jordan type {}, half orbit {}, orbital variety closure: {}\n",
        dims.max,
        dims.expected,
        orbital.jordan_type,
        orbital.half_orbit_dim,
        if orbital.is_orbital_variety_closure { "yes" } else { "no" }
    ));
    s.push_str(&format!(
        "Jordan e {}  e_VS {}  dim P.e {}  dim P.e_VS {}  verdict {}\n",
        reg.jordan_e, reg.jordan_evs, reg.dim_p_e, reg.dim_p_evs, reg.verdict
    ));
    for q in &reg.quadruplets {
        s.push_str(&format!("quadruplet {:?} {:?}\n", q.quad, q.badness));
    }
    for c in &reg.cycles {
        s.push_str(&format!("cycle {:?} ({} edges)\n", c.cycle, c.edges));
    }
    let failed = outcome.failures();
    s.push_str(&format!(
        "\nchecks: {} run, {} failed{}\n",
        outcome.checks.len(),
        failed.len(),
        outcome
            .error
            .as_ref()
            .map(|e| format!(", aborted: {e}"))
            .unwrap_or_default()
    ));
    for c in failed {
        s.push_str(&format!("  FAIL [{}] {}: {}\n", c.suite, c.name, c.detail));
    }
    for n in &outcome.notes {
        s.push_str(&format!("  note: {n}\n"));
    }
    s
}

/// Census of one `n` in a sweep.
#[derive(Clone, Debug, Default, Serialize)]
pub struct CensusRow {
    pub n: usize,
    pub compositions: usize,
    pub passed: usize,
    pub failed: usize,
    pub assertions: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orbital_closures: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e_regular: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdicts: Option<BTreeMap<String, usize>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepReport {
    pub schema: u32,
    pub suites: Vec<Suite>,
    pub config: SuiteConfig,
    pub census: Vec<CensusRow>,
    /// Outcomes that failed or carry notes.
    pub findings: Vec<Outcome>,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.census.iter().all(|r| r.failed == 0)
    }

    pub fn has_assertion(&self) -> bool {
        self.census.iter().any(|r| r.assertions > 0)
    }

    pub fn text(&self) -> String {
        let mut s =
            String::from("   n  comps  pass  fail  assert  closures  e-regular  verdicts\n");
        for r in &self.census {
            let opt = |v: Option<usize>| v.map_or("-".to_string(), |x| x.to_string());
            let verdicts = r.verdicts.as_ref().map_or("-".to_string(), |m| {
                m.iter()
                    .map(|(k, v)| format!("{k}={v}"))
                    .collect::<Vec<_>>()
                    .join(" ")
            });
            s.push_str(&format!(
                "{:>4} {:>6} {:>5} {:>5} {:>7} {:>9} {:>10}  {}\n",
                r.n,
                r.compositions,
                r.passed,
                r.failed,
                r.assertions,
                opt(r.orbital_closures),
                opt(r.e_regular),
                verdicts
            ));
        }
        for o in &self.findings {
            s.push_str(&format!("{}:", o.composition));
            if let Some(e) = &o.error {
                s.push_str(&format!(" aborted: {e}"));
            }
            for c in o.failures() {
                s.push_str(&format!(" FAIL [{}] {};", c.suite, c.name));
            }
            for n in &o.notes {
                s.push_str(&format!(" note: {n};"));
            }
            s.push('\n');
        }
        s
    }
}

struct Row {
    outcome: Outcome,
    closure: Option<bool>,
    regularity: Option<(bool, Verdict)>,
}

fn sweep_one(comp: &Composition, suites: &[Suite], cfg: &SuiteConfig) -> Row {
    let outcome = run_suites(comp, suites, cfg);
    let closure = suites
        .contains(&Suite::Dimension)
        .then(|| {
            orbital_closure_test(comp, cfg.samples, cfg.seed)
                .ok()
                .map(|v| v.is_orbital_variety_closure)
        })
        .flatten();
    let regularity = suites
        .contains(&Suite::Regularity)
        .then(|| {
            let ls = build_section(comp).ok()?;
            let sampler =
                OrbitSampler::new(comp, cfg.samples, cfg.seed).with_prime(cfg.field().ok()?);
            let r = regularity_report(comp, &ls, EvsPolicy::VerifiedBadOnly, &sampler);
            Some((r.e_regular, r.verdict))
        })
        .flatten();
    Row {
        outcome,
        closure,
        regularity,
    }
}

/// Runs `suites` over every composition in `groups` (one group per `n`),
/// in parallel; the result does not depend on scheduling.
pub fn sweep(
    groups: &[(usize, Vec<Composition>)],
    suites: &[Suite],
    cfg: &SuiteConfig,
) -> SweepReport {
    let mut census = Vec::new();
    let mut findings = Vec::new();
    for (n, comps) in groups {
        let rows: Vec<Row> = comps
            .par_iter()
            .map(|c| sweep_one(c, suites, cfg))
            .collect();
        let mut row = CensusRow {
            n: *n,
            compositions: rows.len(),
            ..CensusRow::default()
        };
        if suites.contains(&Suite::Dimension) {
            row.orbital_closures = Some(rows.iter().filter(|r| r.closure == Some(true)).count());
        }
        if suites.contains(&Suite::Regularity) {
            row.e_regular = Some(
                rows.iter()
                    .filter(|r| matches!(r.regularity, Some((true, _))))
                    .count(),
            );
            let mut verdicts = BTreeMap::new();
            for (_, v) in rows.iter().filter_map(|r| r.regularity) {
                *verdicts.entry(v.to_string()).or_insert(0) += 1;
            }
            row.verdicts = Some(verdicts);
        }
        for r in rows {
            if r.outcome.passed() {
                row.passed += 1;
            } else {
                row.failed += 1;
            }
            row.assertions += usize::from(r.outcome.assertion);
            if !r.outcome.passed() || !r.outcome.notes.is_empty() {
                findings.push(r.outcome);
            }
        }
        census.push(row);
    }
    SweepReport {
        schema: SCHEMA,
        suites: suites.to_vec(),
        config: *cfg,
        census,
        findings,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analysis_bundle_shape() {
        let c: Composition = "1,3,2,1".parse().unwrap();
        let a = analyze(&c, &SuiteConfig::default(), EvsPolicy::default()).unwrap();
        assert_eq!(a.json["schema"], 1);
        assert_eq!(a.json["section"]["v"], json!([[5, 7]]));
        assert_eq!(a.json["regularity"]["verdict"], "regular");
        assert!(a.outcome.passed());
        assert!(a.text.contains("restricts to"));
    }

    #[test]
    fn sweep_is_deterministic() {
        let groups = vec![(4, Composition::all_of(4))];
        let cfg = SuiteConfig::default();
        let a = serde_json::to_string(&sweep(&groups, &Suite::ALL, &cfg)).unwrap();
        let b = serde_json::to_string(&sweep(&groups, &Suite::ALL, &cfg)).unwrap();
        assert_eq!(a, b);
        let r = sweep(&groups, &[Suite::Section], &cfg);
        assert_eq!(r.census[0].compositions, 8);
        assert!(r.passed());
    }
}
