use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use shocklab::characteristics::{r_curve, Side};
use shocklab::lax_oleinik::LaxOleinik;
use shocklab::legendre::legendre_dual;
use shocklab::riemann::solve_riemann;
use shocklab::scenario::{
    load_dir, resolve_scenario, run_batch, run_scenario, FluxConfig, Scenario,
};
use shocklab::single_shock::{check_hypothesis_h, check_main_conditions, VerdictKind};
use shocklab::{Error, Flux, StepFunction};

const EXIT_CONFIG: u8 = 2;
const EXIT_VIOLATED: u8 = 3;

#[derive(Parser)]
#[command(
    name = "shocklab",
    version,
    about = "Front tracking and single-shock diagnostics for u_t + f(u)_x = 0"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Source {
    /// Scenario JSON file
    #[arg(long, conflicts_with = "preset")]
    scenario: Option<PathBuf>,
    /// Built-in scenario name
    #[arg(long)]
    preset: Option<String>,
}

impl Source {
    fn load(&self) -> Result<Scenario> {
        match (&self.scenario, &self.preset) {
            (Some(p), _) => Ok(shocklab::scenario::load_scenario(p)?),
            (None, Some(name)) => match shocklab::scenario::preset(name) {
                Some(s) => Ok(s?),
                None => bail!(
                    "unknown preset {name:?}; known: {}",
                    shocklab::scenario::PRESETS.join(", ")
                ),
            },
            (None, None) => bail!("one of --scenario or --preset is required"),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Plus,
    Minus,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a scenario and write profiles, events, trajectories and a report
    Solve {
        #[command(flatten)]
        src: Source,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Snapshot times, comma separated
        #[arg(long, value_delimiter = ',')]
        t: Vec<f64>,
    },
    /// Print the Riemann fan as JSON lines
    Riemann {
        #[arg(long)]
        flux: String,
        #[arg(long, allow_hyphen_values = true)]
        left: f64,
        #[arg(long, allow_hyphen_values = true)]
        right: f64,
    },
    /// Print the Legendre dual of a convex flux
    Dual {
        #[arg(long)]
        flux: String,
    },
    /// Print the value-function minimization data at each x as JSON lines
    Laxoleinik {
        #[arg(long)]
        flux: String,
        #[arg(long)]
        data: String,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x: Vec<f64>,
        #[arg(long)]
        t: f64,
    },
    /// Print a generalized characteristic as CSV `t,R`
    Rcurve {
        #[arg(long)]
        flux: String,
        #[arg(long)]
        data: String,
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, value_enum, default_value = "plus")]
        side: SideArg,
        #[arg(long, value_delimiter = ',')]
        t: Vec<f64>,
    },
    /// Check the hypothesis and the single-shock conditions
    Check {
        #[command(flatten)]
        src: Source,
    },
    /// Check, simulate and report whether a single shock emerges
    Certify {
        #[command(flatten)]
        src: Source,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every scenario in a directory
    Batch {
        /// Directory of scenario JSON files
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

/// A path to a JSON file, or the JSON itself.
fn read_json(arg: &str) -> Result<String> {
    if arg.trim_start().starts_with(['{', '[']) {
        return Ok(arg.to_string());
    }
    std::fs::read_to_string(arg).with_context(|| format!("reading {arg}"))
}

fn load_flux(arg: &str) -> Result<Flux> {
    let cfg: FluxConfig =
        serde_json::from_str(&read_json(arg)?).map_err(|e| Error::Parse(format!("flux: {e}")))?;
    Ok(cfg.build(&[])?)
}

fn load_data(arg: &str) -> Result<StepFunction> {
    let text = read_json(arg)?;
    if let Ok(v) = text.trim().parse::<f64>() {
        return Ok(StepFunction::constant(v));
    }
    Ok(serde_json::from_str(&text).map_err(|e| Error::Parse(format!("data: {e}")))?)
}

fn out_dir(explicit: Option<PathBuf>, s: &Scenario) -> PathBuf {
    explicit
        .or_else(|| s.run.output_dir.clone())
        .unwrap_or_else(|| Path::new("out").join(&s.name))
}

fn run(cli: Cli) -> Result<u8> {
    match cli.cmd {
        Cmd::Solve { src, out, t } => {
            let mut s = src.load()?;
            if !t.is_empty() {
                s.run.snapshots = t;
            }
            let dir = out_dir(out, &s);
            let r = run_scenario(&s, &dir)?;
            println!("{}", serde_json::to_string(&r)?);
            Ok(0)
        }
        Cmd::Riemann { flux, left, right } => {
            let fl = load_flux(&flux)?;
            for w in solve_riemann(&fl, left, right)? {
                println!("{}", serde_json::to_string(&w)?);
            }
            Ok(0)
        }
        Cmd::Dual { flux } => {
            let fl = load_flux(&flux)?;
            println!("{}", serde_json::to_string(&legendre_dual(&fl)?)?);
            Ok(0)
        }
        Cmd::Laxoleinik { flux, data, x, t } => {
            let lo = LaxOleinik::new(&load_flux(&flux)?, &load_data(&data)?)?;
            for xi in x {
                println!("{}", serde_json::to_string(&lo.value_function(xi, t)?)?);
            }
            Ok(0)
        }
        Cmd::Rcurve {
            flux,
            data,
            alpha,
            side,
            t,
        } => {
            let side = match side {
                SideArg::Plus => Side::Plus,
                SideArg::Minus => Side::Minus,
            };
            let c = r_curve(&load_flux(&flux)?, &load_data(&data)?, alpha, side, &t)?;
            print!("{}", c.to_csv());
            Ok(0)
        }
        Cmd::Check { src } => {
            let s = src.load()?;
            let Some(hp) = s.hypothesis else {
                bail!("scenario {:?} has no hypothesis parameters", s.name);
            };
            let fl = s.build_flux()?;
            let report = check_hypothesis_h(&fl, &hp)?;
            if !report.passed {
                println!("{}", serde_json::json!({ "hypothesis": report }));
                return Ok(EXIT_VIOLATED);
            }
            let verdict = check_main_conditions(&fl, &hp, &report)?;
            let code = if verdict.kind == VerdictKind::Violated {
                EXIT_VIOLATED
            } else {
                0
            };
            println!(
                "{}",
                serde_json::json!({ "hypothesis": report, "verdict": verdict })
            );
            Ok(code)
        }
        Cmd::Certify { src, out } => {
            let s = src.load()?;
            let dir = out_dir(out, &s);
            let r = run_scenario(&s, &dir)?;
            println!("{}", serde_json::to_string(&r)?);
            Ok(r.exit_code() as u8)
        }
        Cmd::Batch {
            scenario,
            out,
            jobs,
        } => {
            let list = if scenario.is_dir() {
                load_dir(&scenario)?
            } else {
                vec![resolve_scenario(&scenario.to_string_lossy())?]
            };
            let mut worst = 0u8;
            for (s, r) in list.iter().zip(run_batch(&list, &out, jobs)?) {
                match r {
                    Ok(r) => {
                        let code = r.exit_code() as u8;
                        worst = worst.max(code);
                        println!(
                            "{}",
                            serde_json::json!({ "name": s.name, "exit": code, "emerged": r.emergence.emerged, "T0": r.emergence.t0 })
                        );
                    }
                    Err(e) => {
                        worst = worst.max(EXIT_CONFIG);
                        println!(
                            "{}",
                            serde_json::json!({ "name": s.name, "error": e.to_string() })
                        );
                    }
                }
            }
            Ok(worst)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}
