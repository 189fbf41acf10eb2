use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rmlab::codes::{Code, Family, Params};
use rmlab::equiv::{self, ShardPlan};
use rmlab::io::{load_code, save_code};
use rmlab::subspace::budget_from_env;
use rmlab::suite::{self, SuiteConfig};
use rmlab::verify::{self, ScanMode};
use rmlab::Setting;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "rmlab", version, about = "Restricted rank-metric code lab")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a code and write its JSON.
    Construct(ConstructArgs),
    /// Verify a code: dimension, membership, distance, maximality.
    Verify {
        code: PathBuf,
        #[arg(long, value_enum, default_value = "spectrum")]
        mode: VerifyMode,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print size bounds.
    Bounds {
        #[arg(long, value_enum)]
        setting: SettingArg,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        d: Option<u32>,
        #[arg(long)]
        non_additive: bool,
    },
    /// Census of monomial maps fixing a code.
    Aut {
        code: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search for a map sending one code onto another.
    EquivSearch {
        from: PathBuf,
        to: PathBuf,
        #[arg(long, value_enum, default_value = "monomial")]
        mode: SearchMode,
        /// Run only shard `i/N` of a full search.
        #[arg(long)]
        shard: Option<String>,
        #[arg(long, default_value_t = 81)]
        shards: usize,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Intersection characterization, or the clauses against a space `--space`.
    CharCheck {
        code: PathBuf,
        #[arg(long)]
        space: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the acceptance suite.
    Demo {
        /// Comma separated criteria, all by default.
        #[arg(long, value_delimiter = ',')]
        criteria: Vec<u32>,
        #[arg(long, default_value_t = suite::DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, default_value_t = 81)]
        shards: usize,
    },
}

#[derive(Args)]
struct ConstructArgs {
    #[arg(long)]
    family: Family,
    #[arg(long)]
    q: u64,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    d: Option<u32>,
    #[arg(long)]
    s: Option<u32>,
    #[arg(long)]
    k: Option<u32>,
    #[arg(long)]
    m: Option<u32>,
    /// η as an exponent of the field generator.
    #[arg(long)]
    eta: Option<usize>,
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyMode {
    Spectrum,
    AssertD,
}

#[derive(Clone, Copy, ValueEnum)]
enum SearchMode {
    Monomial,
    Full,
}

#[derive(Clone, Copy, ValueEnum)]
enum SettingArg {
    #[value(alias = "symmetric")]
    Sym,
    #[value(alias = "alternating")]
    Alt,
    #[value(alias = "hermitian")]
    Herm,
    Linear,
}

impl SettingArg {
    fn setting(self) -> Option<Setting> {
        match self {
            SettingArg::Sym => Some(Setting::Symmetric),
            SettingArg::Alt => Some(Setting::Alternating),
            SettingArg::Herm => Some(Setting::Hermitian),
            SettingArg::Linear => None,
        }
    }
}

enum Failure {
    Check,
    Usage(String),
}

impl From<rmlab::Error> for Failure {
    fn from(e: rmlab::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> Outcome {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Usage(e.to_string()))?;
    match out {
        Some(path) => std::fs::write(path, text + "\n").map_err(|e| Failure::Usage(format!("{}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn construct(a: ConstructArgs) -> Outcome {
    let n = match a.family {
        Family::Tz | Family::NewSym2 => 2 * a.m.ok_or_else(|| Failure::Usage(format!("{} needs --m", a.family)))?,
        _ => a.n.ok_or_else(|| Failure::Usage(format!("{} needs --n", a.family)))?,
    };
    let mut params = Params { q: a.q, n, d: a.d, s: a.s, k: a.k, m: a.m, eta: None };
    if let Some(exp) = a.eta {
        let field = Code::field_of(a.family, &params)?;
        params.eta = Some(field.gen_power(exp % (field.size() as usize - 1)).0);
    }
    let code = Code::build(a.family, &params)?;
    save_code(&code, &a.out)?;
    eprintln!("{} {:?}: dimension {} written to {}", code.family, code.params, code.dim(), a.out.display());
    Ok(())
}

fn check_result(pass: bool) -> Outcome {
    if pass {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Construct(a) => construct(a),
        Command::Verify { code, mode, out } => {
            let code = load_code(&code)?;
            let mode = match mode {
                VerifyMode::Spectrum => ScanMode::Spectrum,
                VerifyMode::AssertD => ScanMode::AssertAtLeast(0),
            };
            let report = verify::verify_code(&code, mode, budget_from_env())?;
            for c in &report.checks {
                eprintln!("{} {}: {}", if c.pass { "pass" } else { "FAIL" }, c.name, c.details);
            }
            emit(&report, out.as_deref())?;
            check_result(report.passed())
        }
        Command::Bounds { setting, q, n, d, non_additive } => {
            if let Some(d) = d {
                println!("{}", verify::bound_value(setting.setting(), q, n, d, !non_additive)?);
                return Ok(());
            }
            for d in 1..=n {
                match verify::bound_value(setting.setting(), q, n, d, !non_additive) {
                    Ok(b) => println!("d={d} {b}"),
                    Err(e) => println!("d={d} n/a ({e})"),
                }
            }
            Ok(())
        }
        Command::Aut { code, out } => {
            let code = load_code(&code)?;
            let census = equiv::monomial_aut_census(&code, budget_from_env())?;
            eprintln!(
                "{} tuples, {} fix the code, {} fixing outside the pattern",
                census.tuples,
                census.fixing,
                census.outside_pattern.len()
            );
            emit(&census, out.as_deref())
        }
        Command::EquivSearch { from, to, mode, shard, shards, jobs, out } => {
            let (c1, c2) = (load_code(&from)?, load_code(&to)?);
            match mode {
                SearchMode::Monomial => {
                    let start = std::time::Instant::now();
                    let r = equiv::monomial_search_counted(&c1, &c2)?;
                    #[derive(Serialize)]
                    struct Out {
                        found: bool,
                        #[serde(skip_serializing_if = "Option::is_none")]
                        map: Option<equiv::MapJson>,
                        candidates_scanned: u64,
                        elapsed_ms: u128,
                    }
                    let found = r.map.is_some();
                    emit(
                        &Out {
                            found,
                            map: r.map.map(|m| m.to_json()),
                            candidates_scanned: r.candidates_scanned,
                            elapsed_ms: start.elapsed().as_millis(),
                        },
                        out.as_deref(),
                    )
                }
                SearchMode::Full => {
                    let plan = match shard {
                        Some(s) => ShardPlan::parse(&s)?,
                        None => ShardPlan::all(shards),
                    };
                    let report = equiv::full_equiv_search_plan(&c1, &c2, plan, jobs, equiv::SEARCH_BUDGET)?;
                    eprintln!(
                        "found {}, {} candidates, rejection {:.4}, {} ms",
                        report.found, report.candidates_scanned, report.rejection_rate, report.elapsed_ms
                    );
                    emit(&report, out.as_deref())
                }
            }
        }
        Command::CharCheck { code, space, out } => {
            let code = load_code(&code)?;
            let checks = match space {
                Some(v) => verify::check_characterization(&code, &load_code(&v)?)?,
                None => verify::check_intersection_char(&code)?,
            };
            for c in &checks {
                eprintln!("{} {}: {}", if c.pass { "pass" } else { "FAIL" }, c.name, c.details);
            }
            emit(&checks, out.as_deref())?;
            check_result(checks.iter().all(|c| c.pass))
        }
        Command::Demo { criteria, seed, jobs, shards } => {
            let cfg = SuiteConfig { seed, jobs, shards, ..SuiteConfig::default() };
            let ids = if criteria.is_empty() { (1..=8).collect() } else { criteria };
            let mut pass = true;
            for id in ids {
                let outcome = suite::run(id, &cfg)?;
                println!("{}", outcome.line());
                pass &= outcome.pass();
            }
            check_result(pass)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
