use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use racetrack::branching_cost::{branching_cost, feasible_lengths};
use racetrack::branching_trajectory::construct;
use racetrack::instances::{gen_random, gen_slope};
use racetrack::kinematics::assemble;
use racetrack::multipoint::{solve_with, Instance, Solution, SolveOptions, SpeedBoundPolicy, WARM_START_SMAX};
use racetrack::Configuration;

mod bench;
mod check;
mod plot;

/// Exit code of an oracle comparison that found a mismatch.
const EXIT_MISMATCH: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;
const EXIT_RESOURCE: u8 = 4;

#[derive(Parser)]
#[command(name = "racetrack", version, about = "Shortest trajectories in the discrete acceleration model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Minimum trajectory length between two configurations.
    Cost {
        /// Start configuration, `x1,..,xd@v1,..,vd`.
        #[arg(allow_hyphen_values = true)]
        from: Configuration,
        #[arg(allow_hyphen_values = true)]
        to: Configuration,
        #[arg(long)]
        json: bool,
    },
    /// Witness trajectory between two configurations.
    Traj {
        #[arg(allow_hyphen_values = true)]
        from: Configuration,
        #[arg(allow_hyphen_values = true)]
        to: Configuration,
        /// Exact length; defaults to the minimum.
        #[arg(long)]
        length: Option<i64>,
        /// Also print every configuration.
        #[arg(long)]
        expand: bool,
        #[arg(long)]
        json: bool,
    },
    /// Solve an ordered multipoint instance and print the result as JSON.
    Multi {
        /// Instance JSON: {"d": .., "points": [[..], ..], "tour": false}.
        input: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        /// Write the result here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Generate an instance as JSON.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Runtime sweeps over city count and area size, as CSV.
    Bench(bench::BenchArgs),
    /// Render a 2D trajectory or multipoint result as SVG.
    Plot {
        /// Trajectory JSON, or the output of `multi`.
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Instance whose cities are drawn.
        #[arg(long)]
        instance: Option<PathBuf>,
    },
    /// Compare closed forms against exhaustive search.
    Oracle {
        #[command(subcommand)]
        subject: check::Subject,
    },
}

#[derive(Subcommand)]
enum GenKind {
    /// Uniform points on {0..L}^d.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long = "l")]
        l: i64,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Cities (i·δ, -i) for i = 0..=n.
    Slope {
        #[arg(long)]
        n: i64,
        #[arg(long, default_value_t = 7)]
        delta: i64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PolicyName {
    Conservative,
    Conjecture,
    Fixed,
}

impl PolicyName {
    pub fn label(self) -> &'static str {
        match self {
            PolicyName::Conservative => "conservative",
            PolicyName::Conjecture => "conjecture",
            PolicyName::Fixed => "fixed",
        }
    }
}

#[derive(Args, Clone, Debug)]
pub struct SolverArgs {
    /// How the candidate speed bound is chosen.
    #[arg(long, value_enum, default_value_t = PolicyName::Conservative)]
    policy: PolicyName,
    /// Speed bound for `--policy fixed`; implies it when given alone.
    #[arg(long)]
    smax: Option<i64>,
    /// Known upper bound S on the optimum, replacing the warm start.
    #[arg(long)]
    s_bound: Option<i64>,
    /// Keep the trajectory inside the cities' bounding box grown by this much.
    #[arg(long, allow_hyphen_values = true)]
    hull_margin: Option<i64>,
    /// Skip candidate filtering.
    #[arg(long)]
    no_filter: bool,
    /// Speed bound of the warm start.
    #[arg(long, default_value_t = WARM_START_SMAX)]
    warm_smax: i64,
}

impl SolverArgs {
    pub fn with_policy(policy: PolicyName) -> Self {
        SolverArgs {
            policy,
            smax: None,
            s_bound: None,
            hull_margin: None,
            no_filter: false,
            warm_smax: WARM_START_SMAX,
        }
    }

    pub fn options(&self) -> anyhow::Result<SolveOptions> {
        let mut policy = match (self.policy, self.smax) {
            (PolicyName::Fixed, None) => bail!("--policy fixed needs --smax"),
            (_, Some(smax)) => SpeedBoundPolicy::fixed(smax),
            (PolicyName::Conservative, None) => SpeedBoundPolicy::conservative(),
            (PolicyName::Conjecture, None) => SpeedBoundPolicy::conjecture(),
        };
        policy.s = self.s_bound;
        Ok(SolveOptions {
            policy,
            hull_margin: self.hull_margin,
            warm_start_smax: self.warm_smax,
            filter: !self.no_filter,
        })
    }
}

/// Result of `multi`: the instance next to its solution.
#[derive(Serialize, Deserialize)]
pub struct MultiOutput {
    pub instance: Instance,
    #[serde(flatten)]
    pub solution: Solution,
}

pub fn read_instance(path: &Path) -> anyhow::Result<Instance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(serde_json::from_str(&text).with_context(|| format!("parsing instance {}", path.display()))?)
}

fn print_json<T: Serialize>(value: &T) -> anyhow::Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn cmd_cost(from: &Configuration, to: &Configuration, json: bool) -> anyhow::Result<()> {
    let cost = branching_cost(from, to)?;
    let sets = feasible_lengths(from, to)?;
    if json {
        let sets: Vec<String> = sets.iter().map(ToString::to_string).collect();
        return print_json(&serde_json::json!({ "cost": cost, "intervals": sets }));
    }
    println!("{cost}");
    for (j, set) in sets.iter().enumerate() {
        println!("dim {}: {set}", j + 1);
    }
    Ok(())
}

fn cmd_traj(from: &Configuration, to: &Configuration, length: Option<i64>, expand_all: bool, json: bool) -> anyhow::Result<()> {
    let built = construct(from, to, length)?;
    if json {
        return print_json(&built);
    }
    println!("length {}", built.length);
    for (j, dim) in built.dims.iter().enumerate() {
        println!("dim {}: {dim}", j + 1);
    }
    if expand_all {
        for c in &assemble(&built.dims)?.configs {
            println!("{c}");
        }
    }
    Ok(())
}

fn cmd_multi(input: &Path, solver: &SolverArgs, output: Option<&Path>) -> anyhow::Result<()> {
    let instance = read_instance(input)?;
    let solution = solve_with(&instance, &solver.options()?)?;
    let result = MultiOutput { instance, solution };
    match output {
        Some(path) => fs::write(path, serde_json::to_string_pretty(&result)? + "\n")
            .with_context(|| format!("writing {}", path.display())),
        None => print_json(&result),
    }
}

fn cmd_gen(kind: &GenKind) -> anyhow::Result<()> {
    let inst = match *kind {
        GenKind::Random { n, l, d, seed } => gen_random(n, l, d, seed)?,
        GenKind::Slope { n, delta } => gen_slope(n, delta)?,
    };
    print_json(&inst)
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match &cli.command {
        Command::Cost { from, to, json } => cmd_cost(from, to, *json)?,
        Command::Traj { from, to, length, expand, json } => cmd_traj(from, to, *length, *expand, *json)?,
        Command::Multi { input, solver, output } => cmd_multi(input, solver, output.as_deref())?,
        Command::Gen { kind } => cmd_gen(kind)?,
        Command::Bench(args) => bench::run(args)?,
        Command::Plot { input, out, instance } => plot::run(input, out, instance.as_deref())?,
        Command::Oracle { subject } => return check::run(subject),
    }
    Ok(0)
}

fn exit_code(err: &anyhow::Error) -> u8 {
    use racetrack::Error;
    match err.downcast_ref::<Error>() {
        Some(Error::Infeasible(_)) => EXIT_INFEASIBLE,
        Some(Error::Resource(_)) => EXIT_RESOURCE,
        _ => EXIT_USAGE,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
