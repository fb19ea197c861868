//! Per-composition property suites shared by the sweep driver and the
//! acceptance tests.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::component::{dim_b_saturation, markings, orbital_closure_test, tangent_frame};
use crate::diagram::{
    column_shift, neighboring_pairs, shape_orbit_dims, Composition, Coord, Tableau,
};
use crate::error::{Result, WlabError};
use crate::invariant::{
    bs_invariant_mod_p, equal_height_triples, factorisation_check, restrict_to_section,
    restrict_to_section_mod_p, section_bijection, sharpness_witness, vanishes_on,
    weight_homogeneity, ModularSampler, DEFAULT_TERM_BUDGET, DEFAULT_TRIALS,
};
use crate::lie::{unit_point, JordanType};
use crate::linalg::Fp;
use crate::regularity::{
    build_e_vs, cycle_analysis, dim_p_orbit, distinct_rows_and_columns, jordan_type_of_e,
    null_intersection_check, vs_quadruplets, EvsPolicy, OrbitSampler,
};
use crate::section::{build_section, lemma_checks, removal_stability, verify_p1_p2, LineSet};
use crate::weyl::{excluded_direct, excluded_via_word, structural_checks, u_pi, CoordSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Excluded,
    Section,
    Invariant,
    Markings,
    Dimension,
    Regularity,
    Structural,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Excluded,
        Suite::Section,
        Suite::Invariant,
        Suite::Markings,
        Suite::Dimension,
        Suite::Regularity,
        Suite::Structural,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Excluded => "excluded",
            Suite::Section => "section",
            Suite::Invariant => "invariant",
            Suite::Markings => "markings",
            Suite::Dimension => "dimension",
            Suite::Regularity => "regularity",
            Suite::Structural => "structural",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = WlabError;

    fn from_str(s: &str) -> Result<Suite> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s.trim())
            .ok_or_else(|| WlabError::InvalidConfig(format!("unknown suite '{s}'")))
    }
}

/// Parses `"all"` or a comma-separated list of suite names.
pub fn parse_suites(s: &str) -> Result<Vec<Suite>> {
    if s.trim() == "all" {
        return Ok(Suite::ALL.to_vec());
    }
    let mut out: Vec<Suite> = s.split(',').map(str::parse).collect::<Result<_>>()?;
    out.sort();
    out.dedup();
    Ok(out)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SuiteConfig {
    pub prime: u64,
    pub trials: usize,
    pub samples: usize,
    pub seed: u64,
    pub term_budget: usize,
    /// Largest `n` for which the symbolic invariant route also runs.
    pub symbolic_max_n: usize,
    /// Largest `n` for the vanishing and sharpness probes.
    pub probe_max_n: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            prime: Fp::default_prime().modulus(),
            trials: DEFAULT_TRIALS,
            samples: 8,
            seed: 0,
            term_budget: DEFAULT_TERM_BUDGET,
            symbolic_max_n: 7,
            probe_max_n: 7,
        }
    }
}

impl SuiteConfig {
    pub fn field(&self) -> Result<Fp> {
        Fp::new(self.prime).ok_or_else(|| {
            WlabError::InvalidConfig(format!("{} is not a prime below 2^63", self.prime))
        })
    }

    fn sampler(&self, salt: u64) -> Result<ModularSampler> {
        ModularSampler::new(
            self.prime,
            self.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ salt,
            self.trials,
        )
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Check {
    pub suite: Suite,
    pub name: String,
    pub ok: bool,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Outcome {
    pub composition: String,
    pub checks: Vec<Check>,
    /// Findings worth reporting that are not failures.
    pub notes: Vec<String>,
    /// Set when a suite aborted.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// The abort came from a failed lemma-level assertion.
    pub assertion: bool,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.checks.iter().all(|c| c.ok)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.ok).collect()
    }
}

struct Ctx<'a> {
    comp: &'a Composition,
    cfg: &'a SuiteConfig,
    out: Outcome,
    ls: Option<LineSet>,
}

impl Ctx<'_> {
    fn check(&mut self, suite: Suite, name: &str, ok: bool, detail: impl Into<String>) {
        let detail = if ok { String::new() } else { detail.into() };
        self.out.checks.push(Check {
            suite,
            name: name.to_string(),
            ok,
            detail,
        });
    }

    fn section(&mut self) -> Result<&LineSet> {
        if self.ls.is_none() {
            self.ls = Some(build_section(self.comp)?);
        }
        Ok(self.ls.as_ref().expect("just built"))
    }
}

/// Runs `suites` on one composition. Lemma-level errors abort the
/// remaining suites and are recorded in the outcome.
pub fn run_suites(comp: &Composition, suites: &[Suite], cfg: &SuiteConfig) -> Outcome {
    let mut ctx = Ctx {
        comp,
        cfg,
        out: Outcome {
            composition: comp.to_string(),
            ..Outcome::default()
        },
        ls: None,
    };
    for &s in suites {
        let r = match s {
            Suite::Excluded => excluded_suite(&mut ctx),
            Suite::Section => section_suite(&mut ctx),
            Suite::Invariant => invariant_suite(&mut ctx),
            Suite::Markings => markings_suite(&mut ctx),
            Suite::Dimension => dimension_suite(&mut ctx),
            Suite::Regularity => regularity_suite(&mut ctx),
            Suite::Structural => structural_suite(&mut ctx),
        };
        if let Err(e) = r {
            ctx.out.assertion = e.is_assertion();
            ctx.out.error = Some(format!("{s}: {e}"));
            break;
        }
    }
    ctx.out
}

fn excluded_suite(ctx: &mut Ctx) -> Result<()> {
    for p in neighboring_pairs(ctx.comp) {
        let direct = excluded_direct(ctx.comp, &p);
        let word = excluded_via_word(ctx.comp, &p);
        ctx.check(
            Suite::Excluded,
            &format!("closed form matches inversions [{p}]"),
            direct == word,
            format!("direct {direct:?} vs word {word:?}"),
        );
    }
    Ok(())
}

fn section_suite(ctx: &mut Ctx) -> Result<()> {
    let comp = ctx.comp;
    let ls = ctx.section()?.clone();
    let lemmas = lemma_checks(&ls);
    ctx.check(
        Suite::Section,
        "line-set lemmas",
        lemmas.ok(),
        lemmas.failures.join("; "),
    );
    let decomp = verify_p1_p2(&ls).map(|d| d.len());
    let g = neighboring_pairs(comp).len();
    ctx.check(
        Suite::Section,
        "one composite line and one star per pair",
        decomp.as_ref().is_ok_and(|&d| d == g),
        format!("{decomp:?}"),
    );
    let rem = removal_stability(comp)?;
    ctx.check(
        Suite::Section,
        "last column removal",
        rem.last_column_exact,
        "line sets differ",
    );
    ctx.check(
        Suite::Section,
        "first column removal",
        rem.first_column_restricted,
        format!("flips {:?}", rem.first_column_flips),
    );
    let up = u_pi(comp);
    let e = ls.e();
    let v = ls.v();
    ctx.check(
        Suite::Section,
        "e inside surviving subspace",
        e.is_subset(&up.u),
        format!("{:?}", e.difference(&up.u).collect::<Vec<_>>()),
    );
    ctx.check(
        Suite::Section,
        "stars excluded",
        v.is_subset(&up.excluded),
        format!("{:?}", v.difference(&up.excluded).collect::<Vec<_>>()),
    );
    ctx.check(
        Suite::Section,
        "star count",
        v.len() == g,
        format!("{} stars for {g} pairs", v.len()),
    );
    Ok(())
}

fn invariant_suite(ctx: &mut Ctx) -> Result<()> {
    let comp = ctx.comp;
    let cfg = *ctx.cfg;
    let ls = ctx.section()?.clone();
    let f = cfg.field()?;
    let mut sampler = cfg.sampler(1)?;
    let pairs = neighboring_pairs(comp);
    let e = ls.e();
    let mut restrictions = Vec::with_capacity(pairs.len());
    for p in &pairs {
        let r = restrict_to_section_mod_p(&ls, p, &mut sampler)?;
        if comp.n() <= cfg.symbolic_max_n {
            let sym = restrict_to_section(&ls, p, cfg.term_budget)?;
            ctx.check(
                Suite::Invariant,
                &format!("symbolic and modular restrictions agree [{p}]"),
                sym == r,
                format!("symbolic {sym:?} vs modular {r:?}"),
            );
        }
        restrictions.push(r);
        let at_e = bs_invariant_mod_p(f, comp, p, &|c: Coord| u64::from(e.contains(&c)))?;
        ctx.check(
            Suite::Invariant,
            &format!("vanishes at e [{p}]"),
            at_e == 0,
            format!("value {at_e}"),
        );
    }
    ctx.check(
        Suite::Invariant,
        "restriction is a bijection onto stars",
        section_bijection(&restrictions, &ls.v()),
        format!("{restrictions:?}"),
    );
    if comp.n() <= cfg.probe_max_n {
        let t = Tableau::new(comp);
        for p in &pairs {
            let excluded = excluded_direct(comp, p);
            let survivors: CoordSet = t
                .nilradical()
                .into_iter()
                .filter(|c| !excluded.contains(c))
                .collect();
            let vanish = vanishes_on(comp, p, &survivors, &mut sampler)?;
            ctx.check(
                Suite::Invariant,
                &format!("vanishes on surviving subspace [{p}]"),
                vanish,
                "nonzero value",
            );
            let witness = sharpness_witness(comp, p, &mut sampler)?;
            ctx.check(
                Suite::Invariant,
                &format!("one excluded coordinate breaks vanishing [{p}]"),
                witness.is_some(),
                "no witness",
            );
        }
        // Off the section the invariants detect every STAR direction.
        let v: Vec<Coord> = ls.v().into_iter().collect();
        if !v.is_empty() {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x51);
            for _ in 0..4 {
                let vals: Vec<u64> = v.iter().map(|_| rng.gen_range(0..3)).collect();
                if vals.iter().all(|&x| x == 0) {
                    continue;
                }
                let x = |c: Coord| {
                    if e.contains(&c) {
                        1
                    } else {
                        v.iter().position(|&w| w == c).map_or(0, |i| vals[i])
                    }
                };
                let mut hit = false;
                for p in &pairs {
                    hit |= bs_invariant_mod_p(f, comp, p, &x)? != 0;
                }
                ctx.check(
                    Suite::Invariant,
                    "some invariant nonzero at e + v",
                    hit,
                    format!("v = {vals:?}"),
                );
            }
        }
    }
    Ok(())
}

fn markings_suite(ctx: &mut Ctx) -> Result<()> {
    let comp = ctx.comp;
    let ls = ctx.section()?.clone();
    let up = u_pi(comp);
    let m = markings(&ls, &up)?;
    let g = neighboring_pairs(comp).len();
    ctx.check(
        Suite::Markings,
        "circled stars count pairs",
        m.y.len() == g,
        format!("|Y| = {}", m.y.len()),
    );
    let frame = tangent_frame(&ls, &m)?;
    ctx.check(
        Suite::Markings,
        "tangent frame spans unstarred circles",
        frame.spans,
        "rank deficit",
    );
    Ok(())
}

fn dimension_suite(ctx: &mut Ctx) -> Result<()> {
    let comp = ctx.comp;
    let cfg = *ctx.cfg;
    let r = dim_b_saturation(comp, cfg.samples, cfg.seed)?;
    ctx.check(
        Suite::Dimension,
        "saturation dimension equals dim m - g",
        r.matches(),
        format!(
            "max {} exact {} expected {}",
            r.max, r.exact_max, r.expected
        ),
    );
    ctx.check(
        Suite::Dimension,
        "every sample within the upper bound",
        r.bounded(),
        format!("{:?}", r.samples),
    );
    let v = orbital_closure_test(comp, cfg.samples, cfg.seed)?;
    if v.jordan_types_seen.len() > 1 {
        ctx.out.notes.push(format!(
            "generic Jordan type unstable: {}",
            v.jordan_types_seen
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(" ")
        ));
    }
    ctx.check(
        Suite::Dimension,
        "saturation at most half the generic orbit",
        v.dim_b_u <= v.half_orbit_dim,
        format!("{} > {}", v.dim_b_u, v.half_orbit_dim),
    );
    Ok(())
}

fn regularity_suite(ctx: &mut Ctx) -> Result<()> {
    let comp = ctx.comp;
    let cfg = *ctx.cfg;
    let ls = ctx.section()?.clone();
    let t = ls.tableau().clone();
    let e = ls.e();
    let n = comp.n();
    let g = neighboring_pairs(comp).len();
    let target = t.dim_nilradical() - g;
    ctx.check(
        Suite::Regularity,
        "e uses distinct rows and columns",
        distinct_rows_and_columns(&e),
        format!("{e:?}"),
    );
    let (by_powers, by_chains) = jordan_type_of_e(&ls);
    ctx.check(
        Suite::Regularity,
        "Jordan type of e by powers and by chains",
        by_chains.as_ref() == Some(&by_powers),
        format!("{by_powers} vs {by_chains:?}"),
    );
    ctx.check(
        Suite::Regularity,
        "roots of e independent",
        cycle_analysis(n, &e).independent,
        "cycle in the root graph of e",
    );
    let dim_p_e = dim_p_orbit(&t, &unit_point(e.iter().copied()));
    ctx.check(
        Suite::Regularity,
        "dim P.e at most dim m - g",
        dim_p_e <= target,
        format!("{dim_p_e} > {target}"),
    );
    ctx.check(
        Suite::Regularity,
        "dim P.e at most half dim G.e",
        2 * dim_p_e <= by_powers.orbit_dim(),
        format!("{dim_p_e} vs orbit {}", by_powers.orbit_dim()),
    );
    ctx.check(
        Suite::Regularity,
        "p.e meets span V trivially",
        null_intersection_check(&ls),
        "ranks do not add",
    );
    let sampler = OrbitSampler::new(comp, cfg.samples, cfg.seed).with_prime(cfg.field()?);
    let quads = vs_quadruplets(&ls, &sampler);
    let evs = build_e_vs(comp, &ls, &quads, EvsPolicy::VerifiedBadOnly);
    if !evs.outside_u.is_empty() {
        ctx.out.notes.push(format!(
            "e_VS leaves the surviving subspace at {:?}",
            evs.outside_u
        ));
    }
    let generic = sampler.max_rank(&evs.support, &CoordSet::new());
    let jt: JordanType = crate::lie::jordan_type(n, &generic.point);
    ctx.check(
        Suite::Regularity,
        "dim P.x at most half dim G.x on E_VS",
        2 * generic.exact <= jt.orbit_dim(),
        format!("{} vs orbit {}", generic.exact, jt.orbit_dim()),
    );
    Ok(())
}

fn structural_suite(ctx: &mut Ctx) -> Result<()> {
    let comp = ctx.comp;
    let cfg = *ctx.cfg;
    let rep = structural_checks(comp);
    ctx.check(
        Suite::Structural,
        "Levi-minus stability",
        rep.levi_minus_stable,
        "",
    );
    ctx.check(
        Suite::Structural,
        "last block clear",
        rep.last_block_clear,
        "",
    );
    ctx.check(
        Suite::Structural,
        "surviving subspace closed",
        rep.u_closed,
        "",
    );
    let t = Tableau::new(comp);
    let dim_m = t.dim_nilradical();
    let mut sampler = cfg.sampler(2)?;
    for p in neighboring_pairs(comp) {
        let shifted = column_shift(comp, &p);
        let mut got: Vec<usize> = shifted.heights().into_iter().filter(|&h| h > 0).collect();
        let mut want: Vec<usize> = comp.parts().to_vec();
        want[p.left - 1] += 1;
        want[p.right - 1] -= 1;
        want.retain(|&h| h > 0);
        got.sort_unstable();
        want.sort_unstable();
        ctx.check(
            Suite::Structural,
            &format!("shift shape [{p}]"),
            got == want,
            format!("{got:?} vs {want:?}"),
        );
        let dims = shape_orbit_dims(&shifted.heights());
        ctx.check(
            Suite::Structural,
            &format!("shift gives a hypersurface [{p}]"),
            dims.variety + 1 == dim_m,
            format!("{} vs {}", dims.variety, dim_m),
        );
        ctx.check(
            Suite::Structural,
            &format!("weight homogeneity [{p}]"),
            weight_homogeneity(comp, &p, &mut sampler)?,
            "character mismatch",
        );
    }
    for (l, m, r) in equal_height_triples(comp) {
        let fac = factorisation_check(comp, l, m, r, &mut sampler)?;
        ctx.check(
            Suite::Structural,
            &format!("factorisation C{l}-C{m}-C{r}"),
            fac.holds,
            format!("{fac:?}"),
        );
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert_eq!(
            parse_suites("section,excluded").unwrap(),
            vec![Suite::Excluded, Suite::Section]
        );
        assert!(parse_suites("bogus").is_err());
        assert_eq!(parse_suites("all").unwrap().len(), 7);
    }

    #[test]
    fn all_suites_small() {
        let cfg = SuiteConfig::default();
        for c in Composition::all_of(5) {
            let o = run_suites(&c, &Suite::ALL, &cfg);
            assert!(
                o.passed(),
                "{}: {:?} {:?}",
                o.composition,
                o.error,
                o.failures()
            );
        }
    }
}
