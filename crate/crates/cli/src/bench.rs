//! Runtime sweeps. Rows come out in sweep order whatever the thread count.

use std::io::Write;
use std::time::Instant;

use clap::{Args, ValueEnum};
use serde::Serialize;

use racetrack::instances::gen_random;
use racetrack::multipoint::solve_with;

use crate::{PolicyName, SolverArgs};

/// Version line leading every CSV.
pub const CSV_VERSION: &str = "# racetrack-bench v1";
pub const CSV_COLUMNS: &str = "n,L,d,policy,seed,candidate_count,runtime_ms,cost";
/// Worker count for sweeps; defaults to 1.
pub const THREADS_ENV: &str = "RACETRACK_THREADS";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Sweep {
    /// Vary n at fixed L.
    N,
    /// Vary L at fixed n.
    L,
    Both,
}

#[derive(Args, Clone, Debug)]
pub struct BenchArgs {
    #[arg(long, value_enum, default_value_t = Sweep::Both)]
    sweep: Sweep,
    /// City counts of the n sweep.
    #[arg(long, value_delimiter = ',', default_value = "5,10,15,20,25,30,35,40")]
    ns: Vec<usize>,
    /// Area sizes of the L sweep.
    #[arg(long = "ls", value_delimiter = ',', default_value = "20,40,60,80,100,120,140,160,180,200")]
    ls: Vec<i64>,
    /// L held fixed during the n sweep.
    #[arg(long = "fixed-l", default_value_t = 100)]
    fixed_l: i64,
    /// n held fixed during the L sweep.
    #[arg(long, default_value_t = 10)]
    fixed_n: usize,
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "conjecture,conservative")]
    policies: Vec<PolicyName>,
    /// Instances per sweep point; seeds run from `--seed` upwards.
    #[arg(long, default_value_t = 1)]
    repeats: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchRecord {
    pub n: usize,
    #[serde(rename = "L")]
    pub l: i64,
    pub d: usize,
    pub policy: &'static str,
    pub seed: u64,
    pub candidate_count: usize,
    pub runtime_ms: f64,
    pub cost: i64,
}

impl BenchRecord {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{:.3},{}",
            self.n, self.l, self.d, self.policy, self.seed, self.candidate_count, self.runtime_ms, self.cost
        )
    }
}

struct Job {
    n: usize,
    l: i64,
    policy: PolicyName,
    seed: u64,
}

fn jobs(args: &BenchArgs) -> Vec<Job> {
    let mut points: Vec<(usize, i64)> = Vec::new();
    if matches!(args.sweep, Sweep::N | Sweep::Both) {
        points.extend(args.ns.iter().map(|&n| (n, args.fixed_l)));
    }
    if matches!(args.sweep, Sweep::L | Sweep::Both) {
        points.extend(args.ls.iter().map(|&l| (args.fixed_n, l)));
    }
    let mut out = Vec::new();
    for &policy in &args.policies {
        for &(n, l) in &points {
            for r in 0..args.repeats {
                out.push(Job { n, l, policy, seed: args.seed + r });
            }
        }
    }
    out
}

fn run_job(job: &Job, d: usize) -> anyhow::Result<BenchRecord> {
    let inst = gen_random(job.n, job.l, d, job.seed)?;
    let opts = SolverArgs::with_policy(job.policy).options()?;
    let start = Instant::now();
    let sol = solve_with(&inst, &opts)?;
    Ok(BenchRecord {
        n: job.n,
        l: job.l,
        d,
        policy: job.policy.label(),
        seed: job.seed,
        candidate_count: sol.candidate_count,
        runtime_ms: start.elapsed().as_secs_f64() * 1e3,
        cost: sol.cost,
    })
}

fn thread_count() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&t| t >= 1)
        .unwrap_or(1)
}

pub fn records(args: &BenchArgs) -> anyhow::Result<Vec<BenchRecord>> {
    let jobs = jobs(args);
    let threads = thread_count().min(jobs.len().max(1));
    let mut slots: Vec<Option<anyhow::Result<BenchRecord>>> = (0..jobs.len()).map(|_| None).collect();
    std::thread::scope(|scope| {
        let chunks: Vec<_> = slots.chunks_mut(jobs.len().div_ceil(threads).max(1)).collect();
        let mut offset = 0;
        for chunk in chunks {
            let start = offset;
            offset += chunk.len();
            let jobs = &jobs;
            scope.spawn(move || {
                for (k, slot) in chunk.iter_mut().enumerate() {
                    *slot = Some(run_job(&jobs[start + k], args.d));
                }
            });
        }
    });
    slots.into_iter().map(|s| s.expect("every job ran")).collect()
}

pub fn run(args: &BenchArgs) -> anyhow::Result<()> {
    let records = records(args)?;
    let mut out = std::io::stdout().lock();
    writeln!(out, "{CSV_VERSION}")?;
    writeln!(out, "{CSV_COLUMNS}")?;
    for r in &records {
        writeln!(out, "{}", r.csv_row())?;
    }
    Ok(())
}
