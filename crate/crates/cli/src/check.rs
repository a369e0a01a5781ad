//! Closed form against exhaustive search. Any mismatch prints FAIL and
//! exits with status 1.

use std::path::PathBuf;

use clap::Subcommand;

use racetrack::branching_cost::{branching_cost, feasible_lengths_1d};
use racetrack::multipoint::solve_with;
use racetrack::oracle::{
    bfs_branching_with_budget, bfs_multipoint_with_budget, feasible_lengths_bfs, LengthTable1d,
    SearchBounds, DEFAULT_STATE_BUDGET,
};
use racetrack::{Config1d, Configuration, MultiInterval};

use crate::{read_instance, SolverArgs, EXIT_MISMATCH};

#[derive(Subcommand)]
pub enum Subject {
    /// Every 1D pair with |x|, |x'| ≤ box and |s|, |s'| ≤ speed, lengths ≤ t-max.
    Sweep {
        #[arg(long = "box", default_value_t = 30)]
        half_width: i64,
        #[arg(long, default_value_t = 6)]
        speed: i64,
        #[arg(long, default_value_t = 60)]
        t_max: i64,
        /// Perturb the closed form; the comparison must then fail.
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// One pair of configurations, axis by axis and in full.
    Pair {
        #[arg(allow_hyphen_values = true)]
        from: Configuration,
        #[arg(allow_hyphen_values = true)]
        to: Configuration,
        #[arg(long, default_value_t = 40)]
        t_max: i64,
        /// Largest number of states the full search may store.
        #[arg(long, default_value_t = DEFAULT_STATE_BUDGET)]
        budget: usize,
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// Multipoint dynamic program against search over the whole state space.
    Multi {
        input: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        /// Speed cap of the search.
        #[arg(long, default_value_t = 10)]
        cap: i64,
        #[arg(long, default_value_t = DEFAULT_STATE_BUDGET)]
        budget: usize,
    },
}

fn mask(set: &MultiInterval, t_max: i64) -> u64 {
    set.members_up_to(t_max).fold(0, |m, t| m | 1 << t)
}

fn lengths(m: u64) -> String {
    let ts: Vec<String> = (0..64).filter(|t| m >> t & 1 == 1).map(|t| t.to_string()).collect();
    if ts.is_empty() {
        "none".into()
    } else {
        ts.join(" ")
    }
}

/// Drops the smallest feasible length: a stand-in for a broken formula.
fn corrupt(m: u64, on: bool) -> u64 {
    if on {
        m & m.wrapping_sub(1)
    } else {
        m
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn sweep(half_width: i64, speed: i64, t_max: i64, fault: bool) -> anyhow::Result<bool> {
    if !(0..64).contains(&t_max) {
        anyhow::bail!(racetrack::Error::InvalidInput(format!("t-max {t_max} must lie in [0, 63]")));
    }
    let (radius, cap) = LengthTable1d::exact_bounds(speed, speed, t_max);
    let mut mismatches = 0u64;
    let mut pairs = 0u64;
    for s in -speed..=speed {
        let table = LengthTable1d::new(s, radius, cap, t_max)?;
        for sp in -speed..=speed {
            for dx in -2 * half_width..=2 * half_width {
                let closed = corrupt(
                    mask(&feasible_lengths_1d(Config1d::new(0, s), Config1d::new(dx, sp)), t_max),
                    fault,
                );
                let searched = table.mask(dx, sp);
                // pairs (x, x') sharing this offset
                let multiplicity = (2 * half_width + 1 - dx.abs()) as u64;
                pairs += multiplicity;
                if closed != searched {
                    if mismatches < 5 {
                        println!(
                            "mismatch (0,{s}) -> ({dx},{sp}): closed [{}] search [{}]",
                            lengths(closed),
                            lengths(searched)
                        );
                    }
                    mismatches += multiplicity;
                }
            }
        }
    }
    let ok = mismatches == 0;
    println!(
        "{} sweep |x| <= {half_width}, |s| <= {speed}, t <= {t_max}: {pairs} pairs, {mismatches} mismatched",
        verdict(ok)
    );
    Ok(ok)
}

fn pair(from: &Configuration, to: &Configuration, t_max: i64, budget: usize, fault: bool) -> anyhow::Result<bool> {
    if from.dim() != to.dim() {
        anyhow::bail!(racetrack::Error::InvalidInput("configurations differ in dimension".into()));
    }
    if !(0..64).contains(&t_max) {
        anyhow::bail!(racetrack::Error::InvalidInput(format!("t-max {t_max} must lie in [0, 63]")));
    }
    let mut ok = true;
    for j in 0..from.dim() {
        let (a, b) = (from.axis(j), to.axis(j));
        let set = feasible_lengths_1d(a, b);
        let closed = corrupt(mask(&set, t_max), fault);
        let speed = a.s.abs().max(b.s.abs());
        let (radius, cap) = LengthTable1d::exact_bounds(speed, speed, t_max);
        let ends = [vec![a.x], vec![b.x]];
        let bounds = SearchBounds::around(&ends, radius, cap, t_max);
        let searched = feasible_lengths_bfs(
            &Configuration { p: vec![a.x], v: vec![a.s] },
            &Configuration { p: vec![b.x], v: vec![b.s] },
            &bounds,
            t_max,
        )?
        .into_iter()
        .fold(0u64, |m, t| m | 1 << t);
        let same = closed == searched;
        ok &= same;
        println!("{} dim {}: closed {set}", verdict(same), j + 1);
        println!("       up to {t_max}: closed [{}]", lengths(closed));
        println!("       up to {t_max}: search [{}]", lengths(searched));
    }
    let cost = branching_cost(from, to)?;
    let margin = 40.max(cost * (cost + 1) / 2);
    let bounds = SearchBounds::around(&[&from.p, &to.p], margin, 4 + cost + from.v.iter().chain(&to.v).map(|v| v.abs()).max().unwrap_or(0), 1_000);
    let searched = bfs_branching_with_budget(from, to, &bounds, budget)?;
    let same = searched == Some(cost);
    ok &= same;
    println!(
        "{} cost: closed {cost}, search {}",
        verdict(same),
        searched.map_or("none".into(), |c| c.to_string())
    );
    Ok(ok)
}

fn multi(input: &std::path::Path, solver: &SolverArgs, cap: i64, budget: usize) -> anyhow::Result<bool> {
    let inst = read_instance(input)?;
    let sol = solve_with(&inst, &solver.options()?)?;
    let margin = match solver.options()?.hull_margin {
        Some(m) => m,
        None => cap * (cap + 1) / 2,
    };
    let bounds = SearchBounds::around(&inst.points, margin, cap, 1_000);
    let out = bfs_multipoint_with_budget(&inst, &bounds, budget)?;
    let ok = out.cost == sol.cost;
    println!("{} multipoint: dp {}, search {}", verdict(ok), sol.cost, out.cost);
    if out.touches_bound && solver.options()?.hull_margin.is_none() {
        println!("note: the search optimum touches its bounds; raise --cap to widen them");
    }
    Ok(ok)
}

pub fn run(subject: &Subject) -> anyhow::Result<u8> {
    let ok = match subject {
        Subject::Sweep { half_width, speed, t_max, inject_fault } => sweep(*half_width, *speed, *t_max, *inject_fault)?,
        Subject::Pair { from, to, t_max, budget, inject_fault } => pair(from, to, *t_max, *budget, *inject_fault)?,
        Subject::Multi { input, solver, cap, budget } => multi(input, solver, *cap, *budget)?,
    };
    println!("{}", verdict(ok));
    Ok(if ok { 0 } else { EXIT_MISMATCH })
}
