//! Brute-force searches over the explicit configuration graph.
//!
//! Every closed form in the crate is checked against these searches. They
//! are exact inside their [`SearchBounds`]; a result that touches a bound
//! is reported so that incompleteness is visible.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::branching_cost::braking_distance;
use crate::kinematics::{segment_index, Configuration};
use crate::multipoint::Instance;
use crate::{Error, Result};

/// Default cap on explored states.
pub const DEFAULT_STATE_BUDGET: usize = 50_000_000;

/// Box of allowed positions and speeds, plus a depth cap.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBounds {
    pub pos_lo: Vec<i64>,
    pub pos_hi: Vec<i64>,
    pub speed_cap: i64,
    pub step_cap: i64,
}

impl SearchBounds {
    /// Bounding box of `points` inflated by `margin` in every direction.
    pub fn around<P: AsRef<[i64]>>(points: &[P], margin: i64, speed_cap: i64, step_cap: i64) -> Self {
        let d = points.first().map_or(0, |p| p.as_ref().len());
        let mut lo = vec![i64::MAX; d];
        let mut hi = vec![i64::MIN; d];
        for p in points {
            for (j, &x) in p.as_ref().iter().enumerate() {
                lo[j] = lo[j].min(x);
                hi[j] = hi[j].max(x);
            }
        }
        SearchBounds {
            pos_lo: lo.into_iter().map(|x| x - margin).collect(),
            pos_hi: hi.into_iter().map(|x| x + margin).collect(),
            speed_cap,
            step_cap,
        }
    }

    /// Default box: margin `max(braking_distance(speed_cap), 10)`.
    pub fn default_for<P: AsRef<[i64]>>(points: &[P], speed_cap: i64) -> Self {
        let margin = braking_distance(speed_cap).max(10);
        Self::around(points, margin, speed_cap, 1_000)
    }

    pub fn dim(&self) -> usize {
        self.pos_lo.len()
    }

    pub fn contains(&self, c: &Configuration) -> bool {
        c.dim() == self.dim()
            && (0..self.dim()).all(|j| {
                (self.pos_lo[j]..=self.pos_hi[j]).contains(&c.p[j])
                    && c.v[j].abs() <= self.speed_cap
            })
    }

    fn check(&self, cs: &[&Configuration]) -> Result<()> {
        for c in cs {
            if c.dim() != self.dim() {
                return Err(Error::InvalidInput(format!(
                    "configuration {c} does not match the {}-dimensional bounds",
                    self.dim()
                )));
            }
            if !self.contains(c) {
                return Err(Error::Domain(format!("configuration {c} lies outside the search bounds")));
            }
        }
        Ok(())
    }

    fn grid(&self) -> Grid {
        let widths: Vec<i64> = (0..self.dim())
            .map(|j| self.pos_hi[j] - self.pos_lo[j] + 1)
            .collect();
        Grid {
            lo: self.pos_lo.clone(),
            widths,
            cap: self.speed_cap,
        }
    }
}

/// Mixed-radix encoding of configurations inside the bounds.
struct Grid {
    lo: Vec<i64>,
    widths: Vec<i64>,
    cap: i64,
}

impl Grid {
    fn axis_size(&self, j: usize) -> u64 {
        (self.widths[j] * (2 * self.cap + 1)) as u64
    }

    fn size(&self) -> Option<u64> {
        (0..self.widths.len()).try_fold(1u64, |acc, j| acc.checked_mul(self.axis_size(j)))
    }

    fn axis_code(&self, j: usize, x: i64, s: i64) -> Option<u64> {
        let px = x - self.lo[j];
        if px < 0 || px >= self.widths[j] || s.abs() > self.cap {
            return None;
        }
        Some((px * (2 * self.cap + 1) + s + self.cap) as u64)
    }

    fn axis_decode(&self, j: usize, code: u64) -> (i64, i64) {
        let base = (2 * self.cap + 1) as u64;
        let x = (code / base) as i64 + self.lo[j];
        let s = (code % base) as i64 - self.cap;
        (x, s)
    }

    fn encode(&self, p: &[i64], v: &[i64]) -> Option<u64> {
        let mut code = 0u64;
        for j in (0..p.len()).rev() {
            code = code * self.axis_size(j) + self.axis_code(j, p[j], v[j])?;
        }
        Some(code)
    }

    fn decode(&self, mut code: u64, p: &mut [i64], v: &mut [i64]) {
        for j in 0..p.len() {
            let size = self.axis_size(j);
            let (x, s) = self.axis_decode(j, code % size);
            p[j] = x;
            v[j] = s;
            code /= size;
        }
    }

    /// Steps from each 1D state to the target `(x, s)` along axis `j`.
    fn reverse_distances(&self, j: usize, x: i64, s: i64) -> Vec<u32> {
        let size = self.axis_size(j) as usize;
        let mut dist = vec![u32::MAX; size];
        let Some(start) = self.axis_code(j, x, s) else {
            return dist;
        };
        dist[start as usize] = 0;
        let mut queue = VecDeque::from([start]);
        while let Some(code) = queue.pop_front() {
            let (y, u) = self.axis_decode(j, code);
            let next = dist[code as usize] + 1;
            // predecessors (y - u, u - a) reach (y, u) with action a
            for a in -1..=1 {
                if let Some(pc) = self.axis_code(j, y - u, u - a) {
                    if dist[pc as usize] == u32::MAX {
                        dist[pc as usize] = next;
                        queue.push_back(pc);
                    }
                }
            }
        }
        dist
    }
}

/// Length of a shortest trajectory from `c` to `c'` inside `bounds`, or
/// `None` when no trajectory of at most `step_cap` steps exists there.
///
/// A* over the product graph. The heuristic is the largest exact 1D
/// distance to the target projection inside the same bounds; projections
/// of valid trajectories are valid, so it never overestimates, and each
/// 1D distance changes by at most one per step.
pub fn bfs_branching(c: &Configuration, c_prime: &Configuration, bounds: &SearchBounds) -> Result<Option<i64>> {
    bfs_branching_with_budget(c, c_prime, bounds, DEFAULT_STATE_BUDGET)
}

pub fn bfs_branching_with_budget(
    c: &Configuration,
    c_prime: &Configuration,
    bounds: &SearchBounds,
    budget: usize,
) -> Result<Option<i64>> {
    bounds.check(&[c, c_prime])?;
    let grid = bounds.grid();
    if grid.size().is_none() {
        return Err(Error::Resource("search bounds overflow a 64-bit state code".into()));
    }
    let d = bounds.dim();
    let tables: Vec<Vec<u32>> = (0..d)
        .map(|j| grid.reverse_distances(j, c_prime.p[j], c_prime.v[j]))
        .collect();
    let axis: Vec<u64> = (0..d).map(|j| grid.axis_size(j)).collect();
    let heuristic = |code: u64| -> Option<i64> {
        let mut rest = code;
        let mut h = 0u32;
        for j in 0..d {
            let t = tables[j][(rest % axis[j]) as usize];
            if t == u32::MAX {
                return None;
            }
            h = h.max(t);
            rest /= axis[j];
        }
        Some(h as i64)
    };

    let start = grid.encode(&c.p, &c.v).expect("checked above");
    let goal = grid.encode(&c_prime.p, &c_prime.v).expect("checked above");
    let Some(h0) = heuristic(start) else {
        return Ok(None);
    };
    let mut best: HashMap<u64, i64> = HashMap::from([(start, 0)]);
    let mut open = BinaryHeap::from([Reverse((h0, Reverse(0i64), start))]);
    let mut p = vec![0i64; d];
    let mut v = vec![0i64; d];
    let mut np = vec![0i64; d];
    let mut nv = vec![0i64; d];
    while let Some(Reverse((_, Reverse(g), code))) = open.pop() {
        if code == goal {
            return Ok(Some(g));
        }
        if best.get(&code).is_some_and(|&b| b < g) {
            continue;
        }
        if best.len() > budget {
            return Err(Error::Resource(format!(
                "branching search exceeded {budget} states"
            )));
        }
        grid.decode(code, &mut p, &mut v);
        for_each_successor(&p, &v, &mut np, &mut nv, |np, nv| {
            let Some(nc) = grid.encode(np, nv) else {
                return;
            };
            let ng = g + 1;
            if best.get(&nc).is_some_and(|&b| b <= ng) {
                return;
            }
            let Some(h) = heuristic(nc) else {
                return;
            };
            if ng + h > bounds.step_cap {
                return;
            }
            best.insert(nc, ng);
            open.push(Reverse((ng + h, Reverse(ng), nc)));
        });
    }
    Ok(None)
}

/// Calls `f` on each of the `3^d` successors of `(p, v)`.
fn for_each_successor(
    p: &[i64],
    v: &[i64],
    np: &mut [i64],
    nv: &mut [i64],
    mut f: impl FnMut(&[i64], &[i64]),
) {
    let d = p.len();
    let total = 3usize.pow(d as u32);
    for mut idx in 0..total {
        for j in 0..d {
            let a = (idx % 3) as i64 - 1;
            idx /= 3;
            nv[j] = v[j] + a;
            np[j] = p[j] + nv[j];
        }
        f(np, nv);
    }
}

/// All `t ≤ t_max` such that a trajectory of exactly `t` steps from `c` to
/// `c'` stays inside `bounds`.
pub fn feasible_lengths_bfs(
    c: &Configuration,
    c_prime: &Configuration,
    bounds: &SearchBounds,
    t_max: i64,
) -> Result<BTreeSet<i64>> {
    bounds.check(&[c, c_prime])?;
    let grid = bounds.grid();
    if grid.size().is_none() {
        return Err(Error::Resource("search bounds overflow a 64-bit state code".into()));
    }
    let d = bounds.dim();
    let tables: Vec<Vec<u32>> = (0..d)
        .map(|j| grid.reverse_distances(j, c_prime.p[j], c_prime.v[j]))
        .collect();
    let axis: Vec<u64> = (0..d).map(|j| grid.axis_size(j)).collect();
    let lower_bound = |code: u64| -> u32 {
        let mut rest = code;
        let mut h = 0u32;
        for j in 0..d {
            h = h.max(tables[j][(rest % axis[j]) as usize]);
            rest /= axis[j];
        }
        h
    };
    let goal = grid.encode(&c_prime.p, &c_prime.v).expect("checked above");
    let mut layer: HashSet<u64> = HashSet::from([grid.encode(&c.p, &c.v).expect("checked above")]);
    let mut out = BTreeSet::new();
    let (mut p, mut v, mut np, mut nv) = (vec![0; d], vec![0; d], vec![0; d], vec![0; d]);
    for t in 0..=t_max {
        if layer.contains(&goal) {
            out.insert(t);
        }
        if t == t_max {
            break;
        }
        let left = (t_max - t - 1) as u32;
        let mut next = HashSet::with_capacity(layer.len() * 2);
        for &code in &layer {
            grid.decode(code, &mut p, &mut v);
            for_each_successor(&p, &v, &mut np, &mut nv, |np, nv| {
                if let Some(nc) = grid.encode(np, nv) {
                    if lower_bound(nc) <= left {
                        next.insert(nc);
                    }
                }
            });
        }
        if next.len() > DEFAULT_STATE_BUDGET {
            return Err(Error::Resource("layered search exceeded the state budget".into()));
        }
        layer = next;
    }
    Ok(out)
}

/// Dense reachability table for 1D trajectories from `(0, s0)`.
///
/// `mask(x, s)` has bit `t` set iff `(x, s)` is reachable in exactly `t`
/// steps. Translation invariance turns it into a table for every start
/// position.
pub struct LengthTable1d {
    s0: i64,
    radius: i64,
    cap: i64,
    t_max: i64,
    masks: Vec<u64>,
}

impl LengthTable1d {
    /// Positions `|x| ≤ radius`, speeds `|s| ≤ cap`, lengths `t ≤ t_max < 64`.
    pub fn new(s0: i64, radius: i64, cap: i64, t_max: i64) -> Result<Self> {
        if !(0..64).contains(&t_max) {
            return Err(Error::InvalidInput(format!("t_max {t_max} must lie in [0, 63]")));
        }
        if s0.abs() > cap {
            return Err(Error::Domain(format!("start speed {s0} exceeds cap {cap}")));
        }
        let width = 2 * cap + 1;
        let idx = |x: i64, s: i64| ((x + radius) * width + s + cap) as usize;
        let cells = ((2 * radius + 1) * width) as usize;
        let mut masks = vec![0u64; cells];
        let mut layer = vec![(0i64, s0)];
        let mut seen = vec![u64::MAX; cells];
        masks[idx(0, s0)] |= 1;
        for t in 1..=t_max {
            let mut next = Vec::with_capacity(layer.len() * 2);
            for &(x, s) in &layer {
                for a in -1..=1 {
                    let ns = s + a;
                    let nx = x + ns;
                    if ns.abs() > cap || nx.abs() > radius {
                        continue;
                    }
                    let i = idx(nx, ns);
                    if seen[i] != t as u64 {
                        seen[i] = t as u64;
                        masks[i] |= 1 << t;
                        next.push((nx, ns));
                    }
                }
            }
            layer = next;
        }
        Ok(LengthTable1d {
            s0,
            radius,
            cap,
            t_max,
            masks,
        })
    }

    /// Bounds making the table exact for end speeds `|s'| ≤ end_cap`.
    pub fn exact_bounds(start_cap: i64, end_cap: i64, t_max: i64) -> (i64, i64) {
        let cap = start_cap.max(end_cap) + (t_max + 1) / 2;
        let radius = (1..=t_max)
            .map(|i| (start_cap + i).min(end_cap + t_max - i))
            .sum::<i64>()
            .max(cap);
        (radius, cap)
    }

    pub fn start_speed(&self) -> i64 {
        self.s0
    }

    /// Bit `t` set iff `(0, s0)` reaches `(dx, s')` in exactly `t` steps.
    pub fn mask(&self, dx: i64, s_prime: i64) -> u64 {
        if dx.abs() > self.radius || s_prime.abs() > self.cap {
            return 0;
        }
        self.masks[((dx + self.radius) * (2 * self.cap + 1) + s_prime + self.cap) as usize]
    }

    /// Lengths of trajectories from `(0, s0)` to `(dx, s')`.
    pub fn lengths(&self, dx: i64, s_prime: i64) -> Vec<i64> {
        let m = self.mask(dx, s_prime);
        (0..=self.t_max).filter(|t| m >> t & 1 == 1).collect()
    }
}

/// Optimal multipoint cost from `(x_1, 0)` to `(x_n, 0)` visiting every city
/// in order, by breadth-first search over (configuration, next city).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultipointOutcome {
    pub cost: i64,
    /// Whether some state on the optimal path lies on the edge of the
    /// bounds, in which case wider bounds might do better.
    pub touches_bound: bool,
}

pub fn bfs_multipoint(inst: &Instance, bounds: &SearchBounds) -> Result<i64> {
    bfs_multipoint_with_budget(inst, bounds, DEFAULT_STATE_BUDGET).map(|o| o.cost)
}

pub fn bfs_multipoint_with_budget(
    inst: &Instance,
    bounds: &SearchBounds,
    budget: usize,
) -> Result<MultipointOutcome> {
    let n = inst.points.len();
    if n == 1 {
        return Ok(MultipointOutcome {
            cost: 0,
            touches_bound: false,
        });
    }
    let d = inst.d;
    let start = Configuration::at_rest(inst.points[0].clone());
    let goal = Configuration::at_rest(inst.points[n - 1].clone());
    bounds.check(&[&start, &goal])?;
    let grid = bounds.grid();
    let configs = grid
        .size()
        .filter(|&s| s <= budget as u64)
        .ok_or_else(|| Error::Resource(format!("configuration space exceeds the budget of {budget}")))?;
    let layers = n as u64 + 1;
    let total = configs
        .checked_mul(layers)
        .filter(|&s| s <= budget as u64)
        .ok_or_else(|| {
            Error::Resource(format!(
                "{configs} configurations × {layers} city indices exceed the budget of {budget}"
            ))
        })? as usize;

    // city index k: cities 0..k have been visited
    let advance = |p: &[i64], v: &[i64], mut k: usize| -> usize {
        let tail: Vec<i64> = p.iter().zip(v).map(|(a, b)| a - b).collect();
        let mut last: Option<i64> = None;
        while k < n {
            let x = &inst.points[k];
            if segment_index(p, v, x).is_none() {
                break;
            }
            let dist: i64 = x.iter().zip(&tail).map(|(a, b)| (a - b) * (a - b)).sum();
            if last.is_some_and(|l| dist <= l) {
                break;
            }
            last = Some(dist);
            k += 1;
        }
        k
    };

    let state = |code: u64, k: usize| code as usize * (n + 1) + k;
    let mut parent = vec![u32::MAX; total];
    let k0 = advance(&start.p, &start.v, 0);
    let s0 = state(grid.encode(&start.p, &start.v).expect("checked"), k0);
    let goal_state = state(grid.encode(&goal.p, &goal.v).expect("checked"), n);
    parent[s0] = s0 as u32;
    let mut frontier = vec![s0 as u32];
    let (mut p, mut v, mut np, mut nv) = (vec![0; d], vec![0; d], vec![0; d], vec![0; d]);
    let mut depth = 0i64;
    while !frontier.is_empty() {
        if parent[goal_state] != u32::MAX {
            let touches_bound = path_touches_bound(&parent, goal_state, n, &grid, bounds);
            return Ok(MultipointOutcome {
                cost: depth,
                touches_bound,
            });
        }
        if depth >= bounds.step_cap {
            break;
        }
        let mut next = Vec::new();
        for &st in &frontier {
            let st = st as usize;
            let (code, k) = ((st / (n + 1)) as u64, st % (n + 1));
            grid.decode(code, &mut p, &mut v);
            for_each_successor(&p, &v, &mut np, &mut nv, |np, nv| {
                let Some(nc) = grid.encode(np, nv) else {
                    return;
                };
                let nk = advance(np, nv, k);
                let ns = state(nc, nk);
                if parent[ns] == u32::MAX {
                    parent[ns] = st as u32;
                    next.push(ns as u32);
                }
            });
        }
        frontier = next;
        depth += 1;
    }
    Err(Error::Infeasible(
        "no multipoint trajectory inside the search bounds".into(),
    ))
}

fn path_touches_bound(parent: &[u32], goal: usize, n: usize, grid: &Grid, bounds: &SearchBounds) -> bool {
    let d = bounds.dim();
    let (mut p, mut v) = (vec![0; d], vec![0; d]);
    let mut cur = goal;
    loop {
        grid.decode((cur / (n + 1)) as u64, &mut p, &mut v);
        let edge = (0..d).any(|j| {
            p[j] == bounds.pos_lo[j] || p[j] == bounds.pos_hi[j] || v[j].abs() == bounds.speed_cap
        });
        if edge {
            return true;
        }
        let up = parent[cur] as usize;
        if up == cur {
            return false;
        }
        cur = up;
    }
}
