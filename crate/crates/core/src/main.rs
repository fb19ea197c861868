use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use wlab::component::markings_of;
use wlab::invariant::term_budget_from_env;
use wlab::regularity::{analyze_regularity, EvsPolicy, DEFAULT_SAMPLES};
use wlab::report::{analyze, sweep};
use wlab::suites::{parse_suites, SuiteConfig};
use wlab::{Composition, Tableau, WlabError};

const EXIT_PROPERTY: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_ASSERTION: u8 = 3;

#[derive(Parser)]
#[command(
    name = "wlab",
    version,
    about = "Sections, invariants and orbit diagnostics for parabolic adjoint actions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline on one composition.
    Analyze {
        #[arg(long)]
        comp: String,
        #[arg(long, value_enum, default_value_t = Policy::VerifiedBad)]
        policy: Policy,
        #[command(flatten)]
        common: Common,
    },
    /// Run property suites over all compositions of some sizes.
    Sweep {
        /// Size `N` or inclusive range `A..B`.
        #[arg(long, conflicts_with = "comp")]
        n: Option<String>,
        /// Explicit compositions instead of `--n`; repeatable.
        #[arg(long)]
        comp: Vec<String>,
        /// `all` or a comma-separated subset of
        /// excluded,section,invariant,markings,dimension,regularity,structural.
        #[arg(long, default_value = "all")]
        suites: String,
        /// Refuse exhaustive sweeps beyond this size.
        #[arg(long, default_value_t = 9)]
        max_n: usize,
        #[command(flatten)]
        common: Common,
    },
    /// ASCII picture of the tableau or of the section in matrix form.
    Render {
        target: Target,
        #[arg(long)]
        comp: String,
        /// Matrix only: also mark the coordinates that `e_VS` adds to `e`.
        #[arg(long)]
        with_evs: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    prime: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Symbolic determinant term budget; defaults to `WLAB_TERM_BUDGET`.
    #[arg(long)]
    term_budget: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Output directory; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Ascii,
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Tableau,
    Matrix,
}

#[derive(Clone, Copy, ValueEnum)]
enum Policy {
    VerifiedBad,
    All,
}

impl Common {
    fn config(&self) -> Result<SuiteConfig, WlabError> {
        let mut cfg = SuiteConfig {
            seed: self.seed,
            term_budget: self.term_budget.unwrap_or_else(term_budget_from_env),
            ..SuiteConfig::default()
        };
        if let Some(p) = self.prime {
            cfg.prime = p;
        }
        if let Some(t) = self.trials {
            cfg.trials = t;
        }
        if let Some(s) = self.samples {
            cfg.samples = s;
        }
        cfg.field()?;
        wlab::invariant::ModularSampler::new(cfg.prime, cfg.seed, cfg.trials)?;
        if cfg.samples == 0 {
            return Err(WlabError::InvalidConfig("samples must be positive".into()));
        }
        Ok(cfg)
    }
}

fn parse_range(s: &str) -> Result<(usize, usize), WlabError> {
    let bad = || WlabError::InvalidConfig(format!("bad size range '{s}'"));
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (
            a.trim().parse().map_err(|_| bad())?,
            b.trim().parse().map_err(|_| bad())?,
        ),
        None => {
            let v = s.trim().parse().map_err(|_| bad())?;
            (v, v)
        }
    };
    if a == 0 || a > b {
        return Err(bad());
    }
    Ok((a, b))
}

fn emit(out: Option<&Path>, file: &str, body: &str) -> std::io::Result<()> {
    match out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            fs::write(dir.join(file), body)
        }
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn to_json(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

enum Failure {
    Usage(String),
    Assertion(String),
    Property(String),
    Io(std::io::Error),
}

impl From<WlabError> for Failure {
    fn from(e: WlabError) -> Self {
        if e.is_assertion() {
            Failure::Assertion(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Analyze {
            comp,
            policy,
            common,
        } => {
            let comp: Composition = comp.parse()?;
            let cfg = common.config()?;
            let policy = match policy {
                Policy::VerifiedBad => EvsPolicy::VerifiedBadOnly,
                Policy::All => EvsPolicy::AllQuadruplets,
            };
            let a = analyze(&comp, &cfg, policy)?;
            let stem = comp.to_string().replace(',', "-");
            let out = common.out.as_deref();
            match common.format {
                Format::Json => emit(out, &format!("{stem}.json"), &to_json(&a.json))?,
                Format::Ascii => emit(out, &format!("{stem}.txt"), &a.text)?,
            }
            if a.outcome.assertion {
                return Err(Failure::Assertion(a.outcome.error.unwrap_or_default()));
            }
            if !a.outcome.passed() {
                return Err(Failure::Property(format!(
                    "{} check(s) failed",
                    a.outcome.failures().len()
                )));
            }
            Ok(())
        }
        Command::Sweep {
            n,
            comp,
            suites,
            max_n,
            common,
        } => {
            let cfg = common.config()?;
            let suites = parse_suites(&suites)?;
            let mut groups: BTreeMap<usize, Vec<Composition>> = BTreeMap::new();
            if comp.is_empty() {
                let (a, b) = parse_range(n.as_deref().unwrap_or("1..6"))?;
                if b > max_n {
                    return Err(Failure::Usage(format!("n = {b} exceeds --max-n {max_n}")));
                }
                for size in a..=b {
                    groups.insert(size, Composition::all_of(size));
                }
            } else {
                for c in comp {
                    let c: Composition = c.parse()?;
                    groups.entry(c.n()).or_default().push(c);
                }
            }
            let groups: Vec<(usize, Vec<Composition>)> = groups.into_iter().collect();
            let report = sweep(&groups, &suites, &cfg);
            let out = common.out.as_deref();
            match common.format {
                Format::Json => emit(out, "sweep.json", &to_json(&report))?,
                Format::Ascii => emit(out, "sweep.txt", &report.text())?,
            }
            if report.has_assertion() {
                return Err(Failure::Assertion("lemma assertion during sweep".into()));
            }
            if !report.passed() {
                return Err(Failure::Property("sweep found failures".into()));
            }
            Ok(())
        }
        Command::Render {
            target,
            comp,
            with_evs,
            seed,
            out,
        } => {
            let comp: Composition = comp.parse()?;
            let (file, body) = match target {
                Target::Tableau => ("tableau.txt", Tableau::new(&comp).render()),
                Target::Matrix => {
                    let mut m = markings_of(&comp)?;
                    if with_evs {
                        let r = analyze_regularity(
                            &comp,
                            EvsPolicy::VerifiedBadOnly,
                            DEFAULT_SAMPLES,
                            seed,
                        )?;
                        m.e.extend(r.e_vs);
                    }
                    ("matrix.txt", m.render())
                }
            };
            emit(out.as_deref(), file, &body)?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Assertion(m)) => {
            eprintln!("lemma assertion failed: {m}");
            ExitCode::from(EXIT_ASSERTION)
        }
        Err(Failure::Property(m)) => {
            eprintln!("property failure: {m}");
            ExitCode::from(EXIT_PROPERTY)
        }
        Err(Failure::Io(e)) => {
            eprintln!("i/o error: {e}");
            ExitCode::from(EXIT_PROPERTY)
        }
    }
}
