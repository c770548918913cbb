mod bench;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;
use team_order::bounds::{audit_gap, max_weight_gap_bound};
use team_order::extensions::{
    normalize, reduce_hitting_set, solve_hitting_set_brute, solve_multi, verify_uniform_equilibrium,
    HittingSetInstance, MultiInstance, DEFAULT_EQUILIBRIUM_CAP, DEFAULT_MULTI_CAP,
};
use team_order::instance::{generate, GeneratorKind};
use team_order::pb::evaluate_lineup;
use team_order::solvers::ptas::DEFAULT_FAMILY_CAP;
use team_order::solvers::{
    solve_brute, solve_max_weight_baseline, solve_ptas, solve_three_value, solve_win_all,
    PtasConfig, DEFAULT_BRUTE_CAP,
};
use team_order::{Error, Instance, LineUp};

use bench::{Format, Suite};

#[derive(Parser)]
#[command(name = "team-order", version, about = "Choose a line-up that maximizes the chance of winning a team match")]
struct Cli {
    #[command(flatten)]
    caps: Caps,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Caps {
    /// Largest team size solved by exhaustive enumeration.
    #[arg(long = "brute-cap", global = true, env = "TEAM_ORDER_BRUTE_CAP", default_value_t = DEFAULT_BRUTE_CAP)]
    pub brute: usize,
    /// Largest number of fractional matchings the PTAS may enumerate.
    #[arg(long = "ptas-family-cap", global = true, env = "TEAM_ORDER_PTAS_FAMILY_CAP", default_value_t = DEFAULT_FAMILY_CAP)]
    pub ptas_family: u64,
    /// Largest team size for the multi-opponent search.
    #[arg(long = "multi-cap", global = true, env = "TEAM_ORDER_MULTI_CAP", default_value_t = DEFAULT_MULTI_CAP)]
    pub multi: usize,
    /// Largest team size for the equilibrium payoff table.
    #[arg(long = "equilibrium-cap", global = true, env = "TEAM_ORDER_EQUILIBRIUM_CAP", default_value_t = DEFAULT_EQUILIBRIUM_CAP)]
    pub equilibrium: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Exact win distribution of a line-up.
    Evaluate {
        instance: PathBuf,
        /// One-based opponent index for each player, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        lineup: Vec<usize>,
        #[arg(long)]
        target: Option<usize>,
    },
    /// Compute a line-up with the chosen method.
    Solve {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::Brute)]
        method: MethodArg,
        #[arg(long, default_value_t = 0.5)]
        epsilon: f64,
        #[arg(long)]
        target: Option<usize>,
    },
    /// Gap bound for the max-weight line-up, audited by brute force when small.
    Bound {
        instance: PathBuf,
        #[arg(long)]
        target: Option<usize>,
    },
    /// Run a benchmark suite and report pass counts.
    Bench {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        count: usize,
        /// Output file; records go to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Defaults to csv for a `.csv` output file and jsonl otherwise.
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Write a random instance as JSON.
    Generate {
        #[arg(long, value_enum, default_value_t = KindArg::UniformRandom)]
        kind: KindArg,
        #[arg(short, long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.8)]
        alpha: f64,
        #[arg(long, default_value_t = 0.3)]
        beta: f64,
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        /// Number of fractional entries for `fixed-fractional-count`.
        #[arg(long, default_value_t = 1)]
        fractional: usize,
    },
    /// Line-up beating the most opponents of a multi-opponent instance.
    Multi { instance: PathBuf },
    /// Reduce a hitting set instance and compare both answers.
    HittingSet { instance: PathBuf },
    /// Check that uniformly random line-ups form an equilibrium.
    Equilibrium {
        instance: PathBuf,
        #[arg(long)]
        target: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Brute,
    ThreeValue,
    Ptas,
    MaxWeight,
    WinAll,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindArg {
    UniformRandom,
    ThreeValue,
    Degenerate,
    FixedFractionalCount,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_instance(path: &Path, target: Option<usize>) -> Result<Instance> {
    let inst = Instance::from_json(&read(path)?)?;
    Ok(match target {
        Some(t) => inst.with_target(t)?,
        None => inst,
    })
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    writeln!(io::stdout().lock(), "{}", serde_json::to_string_pretty(value)?)?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let caps = cli.caps;
    match cli.command {
        Command::Evaluate {
            instance,
            lineup,
            target,
        } => {
            let inst = load_instance(&instance, target)?;
            let lineup = LineUp::from_one_based(&lineup)?;
            let report = evaluate_lineup(&inst, &lineup)?;
            print_json(&json!({ "lineup": lineup, "report": report }))
        }
        Command::Solve {
            instance,
            method,
            epsilon,
            target,
        } => {
            let inst = load_instance(&instance, target)?;
            let result = match method {
                MethodArg::Brute => solve_brute(&inst, caps.brute),
                MethodArg::ThreeValue => solve_three_value(&inst),
                MethodArg::Ptas => solve_ptas(
                    &inst,
                    epsilon,
                    &PtasConfig {
                        family_cap: caps.ptas_family,
                        ..PtasConfig::default()
                    },
                ),
                MethodArg::MaxWeight => solve_max_weight_baseline(&inst),
                MethodArg::WinAll => solve_win_all(&inst),
            }?;
            print_json(&result)
        }
        Command::Bound { instance, target } => {
            let inst = load_instance(&instance, target)?;
            let base = solve_max_weight_baseline(&inst)?;
            let bound = max_weight_gap_bound(&inst, &base.lineup)?;
            let audit = if inst.n() <= caps.brute {
                Some(audit_gap(&inst, caps.brute)?)
            } else {
                None
            };
            print_json(&json!({
                "regime": bound.regime,
                "bound": bound.bound,
                "baseline_lineup": base.lineup,
                "baseline_win_probability": base.win_probability(),
                "inputs": bound.inputs,
                "asymptotic": bound.asymptotic,
                "audit": audit.map(|a| json!({
                    "optimum": a.optimum,
                    "true_gap": a.true_gap,
                    "holds": a.holds,
                })),
            }))
        }
        Command::Bench {
            suite,
            seed,
            count,
            out,
            format,
        } => {
            let records = bench::run_suite(suite, seed, count, &caps)?;
            let format = format.unwrap_or(match &out {
                Some(p) if p.extension().is_some_and(|e| e == "csv") => Format::Csv,
                _ => Format::Jsonl,
            });
            match &out {
                Some(path) => {
                    let file = File::create(path)
                        .with_context(|| format!("creating {}", path.display()))?;
                    bench::write_records(&records, format, BufWriter::new(file))?;
                }
                None => bench::write_records(&records, format, io::stdout().lock())?,
            }
            let s = bench::summarize(&records);
            eprintln!(
                "summary: suite={} seed={seed} passed={}/{} failed={}",
                records.first().map_or("", |r| r.suite.as_str()),
                s.passed,
                s.total,
                s.total - s.passed
            );
            Ok(())
        }
        Command::Generate {
            kind,
            n,
            seed,
            alpha,
            beta,
            density,
            fractional,
        } => {
            let kind = match kind {
                KindArg::UniformRandom => GeneratorKind::UniformRandom,
                KindArg::ThreeValue => GeneratorKind::ThreeValue {
                    alpha,
                    beta,
                    density,
                },
                KindArg::Degenerate => GeneratorKind::Degenerate { density },
                KindArg::FixedFractionalCount => GeneratorKind::FixedFractionalCount { count: fractional },
            };
            writeln!(io::stdout().lock(), "{}", generate(kind, n, seed)?.to_json())?;
            Ok(())
        }
        Command::Multi { instance } => {
            let inst = MultiInstance::from_json(&read(&instance)?)?;
            print_json(&solve_multi(&inst, caps.multi)?)
        }
        Command::HittingSet { instance } => {
            let hs = HittingSetInstance::from_json(&read(&instance)?)?;
            let normal = normalize(&hs);
            let reduction = reduce_hitting_set(&normal)?;
            let sol = solve_multi(&reduction.instance, caps.multi)?;
            let direct = solve_hitting_set_brute(&hs);
            print_json(&json!({
                "normalized": normal,
                "reduced_n": reduction.instance.n(),
                "opponents": reduction.instance.m(),
                "selector_rows": reduction.selector_rows,
                "winning_rows": reduction.winning_rows,
                "losing_rows": reduction.losing_rows,
                "teams_beaten": sol.teams_beaten,
                "lineup": sol.lineup,
                "reduced_answer": sol.teams_beaten == reduction.instance.m(),
                "direct_answer": direct.is_some(),
                "hitting_set": direct,
            }))
        }
        Command::Equilibrium { instance, target } => {
            let inst = load_instance(&instance, target)?;
            print_json(&verify_uniform_equilibrium(&inst, caps.equilibrium)?)
        }
    }
}

fn is_broken_pipe(err: &anyhow::Error) -> bool {
    err.chain().any(|e| {
        e.downcast_ref::<io::Error>()
            .is_some_and(|io| io.kind() == io::ErrorKind::BrokenPipe)
    })
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::Infeasible(_) | Error::Inapplicable(_)) => 2,
        Some(Error::CapExceeded { .. }) => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) if is_broken_pipe(&err) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
