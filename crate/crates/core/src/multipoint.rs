//! Ordered multipoint planning by dynamic programming over candidate
//! configurations.
//!
//! City `i` is visited by a configuration from its candidate set `C_i`:
//! every `(p, v)` with `|v_j| ≤ smax` whose last move crosses the city. The
//! first and last sets are the cities at rest. With
//! `cost(i, c) = min_{c' ∈ C_{i-1}} cost(i-1, c') + bc(c', c)` the optimum is
//! `cost(n, c_n)`; one configuration may serve two consecutive cities at
//! no cost when it crosses them in order.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::branching_cost::{branching_cost, ceil_sqrt, feasible_lengths_1d};
use crate::branching_trajectory::{construct_1d, construct_compact};
use crate::interval::MultiInterval;
use crate::kinematics::{
    assemble, lattice_points, visit_order_ok, Action, CompactTrajectory, Config1d, Configuration,
    ControlSegment, Trajectory,
};
use crate::{Error, Result};

/// Ordered cities in `Z^d`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawInstance")]
pub struct Instance {
    pub d: usize,
    pub points: Vec<Vec<i64>>,
    pub tour: bool,
}

#[derive(Deserialize)]
struct RawInstance {
    d: Option<usize>,
    points: Vec<Vec<i64>>,
    #[serde(default)]
    tour: bool,
}

impl TryFrom<RawInstance> for Instance {
    type Error = Error;

    fn try_from(raw: RawInstance) -> Result<Self> {
        let inst = Instance::new(raw.points, raw.tour)?;
        if let Some(d) = raw.d {
            if d != inst.d {
                return Err(Error::InvalidInput(format!(
                    "declared dimension {d} but points have dimension {}",
                    inst.d
                )));
            }
        }
        Ok(inst)
    }
}

impl Instance {
    pub fn new(points: Vec<Vec<i64>>, tour: bool) -> Result<Self> {
        let d = points
            .first()
            .ok_or_else(|| Error::InvalidInput("an instance needs at least one city".into()))?
            .len();
        if d == 0 {
            return Err(Error::InvalidInput("cities need dimension at least 1".into()));
        }
        if let Some(bad) = points.iter().find(|p| p.len() != d) {
            return Err(Error::InvalidInput(format!(
                "city {bad:?} does not have dimension {d}"
            )));
        }
        if tour && points.first() != points.last() {
            return Err(Error::InvalidInput("a tour must end at its first city".into()));
        }
        Ok(Instance { d, points, tour })
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    /// Largest per-dimension spread of the cities.
    pub fn spread(&self) -> i64 {
        (0..self.d)
            .map(|j| {
                let xs = self.points.iter().map(|p| p[j]);
                xs.clone().max().unwrap() - xs.min().unwrap()
            })
            .max()
            .unwrap_or(0)
    }

    /// Axis-aligned bounding box of the cities.
    pub fn bounding_box(&self) -> (Vec<i64>, Vec<i64>) {
        (0..self.d)
            .map(|j| {
                let xs = self.points.iter().map(|p| p[j]);
                (xs.clone().min().unwrap(), xs.max().unwrap())
            })
            .unzip()
    }
}

/// Configurations eligible to visit city `city_index` (1-based).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateSet {
    pub city_index: usize,
    pub configs: Vec<Configuration>,
}

impl CandidateSet {
    pub fn len(&self) -> usize {
        self.configs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }
}

/// Every `(p, v)` with `max_j |v_j| ≤ smax` visiting `x`.
pub fn candidate_configs(x: &[i64], smax: i64, d: usize) -> Result<CandidateSet> {
    if x.len() != d || d == 0 {
        return Err(Error::InvalidInput(format!(
            "point {x:?} does not have dimension {d}"
        )));
    }
    if smax < 0 {
        return Err(Error::Domain(format!("negative speed bound {smax}")));
    }
    let side = (2 * smax + 1) as usize;
    let mut configs = Vec::new();
    let mut v = vec![0i64; d];
    for mut idx in 0..side.pow(d as u32) {
        for vj in v.iter_mut() {
            *vj = (idx % side) as i64 - smax;
            idx /= side;
        }
        // q = x - k·v/g, so p = 2x - q puts x at offset k·v/g behind p
        for q in lattice_points(x, &v) {
            let p: Vec<i64> = x.iter().zip(&q).map(|(xi, qi)| 2 * xi - qi).collect();
            configs.push(Configuration { p, v: v.clone() });
        }
    }
    configs.sort_unstable();
    configs.dedup();
    Ok(CandidateSet {
        city_index: 0,
        configs,
    })
}

/// `C_1 … C_n` for `inst`; the end sets hold the cities at rest.
pub fn build_candidate_sets(inst: &Instance, smax: i64) -> Result<Vec<CandidateSet>> {
    let n = inst.n();
    (0..n)
        .map(|i| {
            let mut set = if i == 0 || i == n - 1 {
                CandidateSet {
                    city_index: 0,
                    configs: vec![Configuration::at_rest(inst.points[i].clone())],
                }
            } else {
                candidate_configs(&inst.points[i], smax, inst.d)?
            };
            set.city_index = i + 1;
            Ok(set)
        })
        .collect()
}

/// Axis-aligned box every configuration of a trajectory must stay in.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxRegion {
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
}

impl BoxRegion {
    /// The cities' bounding box inflated by `margin`.
    pub fn around(inst: &Instance, margin: i64) -> Self {
        let (lo, hi) = inst.bounding_box();
        BoxRegion {
            lo: lo.into_iter().map(|x| x - margin).collect(),
            hi: hi.into_iter().map(|x| x + margin).collect(),
        }
    }

    pub fn contains(&self, p: &[i64]) -> bool {
        p.iter()
            .enumerate()
            .all(|(j, &x)| self.lo[j] <= x && x <= self.hi[j])
    }
}

/// Drops candidates that no rest-to-rest trajectory inside `region` can
/// use: on each axis the vehicle must be able to brake inside the box both
/// forwards and backwards in time.
pub fn restrict_to_box(sets: &mut [CandidateSet], region: &BoxRegion) {
    for set in sets.iter_mut() {
        set.configs.retain(|c| {
            (0..c.dim()).all(|j| {
                let (x, v) = (c.p[j], c.v[j].abs());
                let ahead = v * (v - 1) / 2;
                let behind = v * (v + 1) / 2;
                let (fwd, back) = if c.v[j] >= 0 { (x + ahead, x - behind) } else { (x - ahead, x + behind) };
                let inside = |y: i64| region.lo[j] <= y && y <= region.hi[j];
                inside(x) && inside(fwd) && inside(back)
            })
        });
    }
}

/// Longest transition considered inside a region.
pub const MAX_BOXED_LENGTH: i64 = 63;

/// Layered search of 1D trajectories from `start` whose positions stay in
/// `[lo, hi]`. Layer `t` holds the sorted states reachable in exactly `t`
/// steps.
struct BoxedSearch {
    layers: Vec<Vec<(i64, i64)>>,
}

impl BoxedSearch {
    fn new(start: Config1d, lo: i64, hi: i64, depth: i64) -> Self {
        let mut layers = Vec::with_capacity(depth as usize + 1);
        let mut cur = if (lo..=hi).contains(&start.x) {
            vec![(start.x, start.s)]
        } else {
            Vec::new()
        };
        for _ in 0..depth {
            let mut next = Vec::with_capacity(cur.len() * 3);
            for &(x, v) in &cur {
                for w in v - 1..=v + 1 {
                    if (lo..=hi).contains(&(x + w)) {
                        next.push((x + w, w));
                    }
                }
            }
            next.sort_unstable();
            next.dedup();
            layers.push(cur);
            cur = next;
        }
        layers.push(cur);
        BoxedSearch { layers }
    }

    fn reached(&self, t: usize, x: i64, v: i64) -> bool {
        self.layers[t].binary_search(&(x, v)).is_ok()
    }

    fn mask(&self, end: Config1d) -> u64 {
        (0..self.layers.len())
            .filter(|&t| self.reached(t, end.x, end.s))
            .fold(0, |m, t| m | 1 << t)
    }

    fn path(&self, start: Config1d, end: Config1d, ell: usize) -> Option<CompactTrajectory> {
        if ell >= self.layers.len() || !self.reached(ell, end.x, end.s) {
            return None;
        }
        let (mut x, mut v) = (end.x, end.s);
        let mut actions = Vec::with_capacity(ell);
        for t in (0..ell).rev() {
            let u = (v - 1..=v + 1).find(|&u| self.reached(t, x - v, u))?;
            actions.push(ControlSegment {
                action: Action::from_delta(v - u)?,
                count: 1,
            });
            x -= v;
            v = u;
        }
        actions.reverse();
        Some(CompactTrajectory::new(start, actions))
    }
}

/// Transition lengths inside a region. Memoizes witness ranges (translation
/// invariant) and exact in-box masks.
struct BoxedTransitions<'r> {
    region: &'r BoxRegion,
    witness: HashMap<(i64, i64, i64, i64), (i64, i64)>,
    exact: HashMap<(usize, i64, i64, i64, i64), (i64, u64)>,
}

impl<'r> BoxedTransitions<'r> {
    fn new(region: &'r BoxRegion) -> Self {
        BoxedTransitions {
            region,
            witness: HashMap::new(),
            exact: HashMap::new(),
        }
    }

    /// Whether the constructed witness of length `ell` stays in the box.
    fn witness_fits(&mut self, j: usize, a: Config1d, b: Config1d, ell: i64) -> bool {
        let key = (b.x - a.x, a.s, b.s, ell);
        let (lo, hi) = *self.witness.entry(key).or_insert_with(|| {
            let w = construct_1d(Config1d::new(0, a.s), Config1d::new(key.0, b.s), ell)
                .expect("ell is feasible on this axis");
            w.position_range()
        });
        self.region.lo[j] <= a.x + lo && a.x + hi <= self.region.hi[j]
    }

    fn exact_mask(&mut self, j: usize, a: Config1d, b: Config1d, depth: i64) -> u64 {
        let key = (j, a.x, a.s, b.x, b.s);
        if let Some(&(d, m)) = self.exact.get(&key) {
            if d >= depth {
                return m;
            }
        }
        let m = BoxedSearch::new(a, self.region.lo[j], self.region.hi[j], depth).mask(b);
        self.exact.insert(key, (depth, m));
        m
    }

    /// Smallest in-box length `≥ from` and `≤ limit`, given the free sets.
    fn min_length(
        &mut self,
        a: &Configuration,
        b: &Configuration,
        sets: &[Compact],
        from: i64,
        limit: i64,
    ) -> Option<i64> {
        let limit = limit.min(MAX_BOXED_LENGTH);
        let d = sets.len();
        let mut masks: Vec<Option<u64>> = vec![None; d];
        let mut ell = min_common(sets, from as i32) as i64;
        while ell <= limit {
            let mut fits = true;
            for j in 0..d {
                let (aj, bj) = (a.axis(j), b.axis(j));
                if masks[j].is_none() && !self.witness_fits(j, aj, bj, ell) {
                    masks[j] = Some(self.exact_mask(j, aj, bj, limit));
                }
                if masks[j].is_some_and(|m| m >> ell & 1 == 0) {
                    fits = false;
                    break;
                }
            }
            if fits {
                return Some(ell);
            }
            ell = min_common(sets, ell as i32 + 1) as i64;
        }
        None
    }
}

/// One in-box witness per axis for a transition of length `ell`.
fn boxed_witness(
    a: &Configuration,
    b: &Configuration,
    ell: i64,
    region: &BoxRegion,
) -> Result<Vec<CompactTrajectory>> {
    (0..a.dim())
        .map(|j| {
            let (aj, bj) = (a.axis(j), b.axis(j));
            if let Ok(w) = construct_1d(aj, bj, ell) {
                let (lo, hi) = w.position_range();
                if region.lo[j] <= lo && hi <= region.hi[j] {
                    return Ok(w);
                }
            }
            BoxedSearch::new(aj, region.lo[j], region.hi[j], ell)
                .path(aj, bj, ell as usize)
                .ok_or_else(|| {
                    Error::Infeasible(format!(
                        "no in-box trajectory of length {ell} on dimension {j}"
                    ))
                })
        })
        .collect()
}

/// Algorithm 3: drops `c ∈ C_i`, `1 < i < n`, when no trajectory of length
/// at most `s_bound` can pass through it. Returns the number removed.
pub fn filter_candidates(
    sets: &mut [CandidateSet],
    c_1: &Configuration,
    c_n: &Configuration,
    s_bound: Option<i64>,
) -> Result<usize> {
    let Some(s_bound) = s_bound else {
        return Ok(0);
    };
    let n = sets.len();
    let mut removed = 0;
    for set in sets.iter_mut().take(n.saturating_sub(1)).skip(1) {
        let before = set.configs.len();
        let mut keep = Vec::with_capacity(before);
        for c in set.configs.drain(..) {
            if branching_cost(c_1, &c)? + branching_cost(&c, c_n)? <= s_bound {
                keep.push(c);
            }
        }
        removed += before - keep.len();
        set.configs = keep;
    }
    Ok(removed)
}

/// `cost(i, c)` and `pred(i, c)` for every stage, indexed like the sets.
#[derive(Clone, Debug, Default)]
pub struct DpTable {
    pub cost: Vec<Vec<i64>>,
    pub pred: Vec<Vec<Option<usize>>>,
    /// Length of the transition from `pred(i, c)` to `c`.
    pub step: Vec<Vec<i64>>,
}

/// Per-axis feasible set with at most one bounded component and a tail.
#[derive(Clone, Copy, Debug)]
struct Compact {
    lo: i32,
    hi: i32,
    tail: i32,
}

impl Compact {
    fn from_set(m: &MultiInterval) -> Self {
        debug_assert!(m.bounded().len() <= 1 && m.tail().is_some());
        let (lo, hi) = m.bounded().first().copied().unwrap_or((1, 0));
        Compact {
            lo: lo as i32,
            hi: hi as i32,
            tail: m.tail().expect("1D sets carry a tail") as i32,
        }
    }

    #[inline]
    fn next_at_or_after(&self, t: i32) -> i32 {
        if t >= self.lo && t <= self.hi {
            t
        } else if t < self.lo {
            self.lo
        } else {
            self.tail.max(t)
        }
    }
}

/// Smallest common member `≥ from` of the per-axis sets.
#[inline]
fn min_common(sets: &[Compact], from: i32) -> i32 {
    let mut t = from;
    loop {
        let mut moved = false;
        for s in sets {
            let next = s.next_at_or_after(t);
            if next != t {
                t = next;
                moved = true;
            }
        }
        if !moved {
            return t;
        }
    }
}

/// Translation-invariant table of 1D sets between two candidate sets,
/// keyed by `(p - p', s', s)`.
struct AxisTable {
    sets: Vec<Compact>,
}

struct StageTables {
    axes: Vec<AxisTable>,
    /// Per candidate of the previous stage: offset into each axis table.
    from_key: Vec<Vec<i64>>,
    /// Per candidate of the current stage.
    to_key: Vec<Vec<i64>>,
}

fn stage_tables(prev: &[Configuration], cur: &[Configuration], d: usize) -> StageTables {
    let mut axes = Vec::with_capacity(d);
    let mut from_key = vec![Vec::with_capacity(d); prev.len()];
    let mut to_key = vec![Vec::with_capacity(d); cur.len()];
    for j in 0..d {
        let span = |cs: &[Configuration], f: fn(&Configuration, usize) -> i64| {
            let it = cs.iter().map(|c| f(c, j));
            (it.clone().min().unwrap(), it.max().unwrap())
        };
        let (pp_lo, pp_hi) = span(prev, |c, j| c.p[j]);
        let (cp_lo, cp_hi) = span(cur, |c, j| c.p[j]);
        let (ps_lo, ps_hi) = span(prev, |c, j| c.v[j]);
        let (cs_lo, cs_hi) = span(cur, |c, j| c.v[j]);
        let dx_lo = cp_lo - pp_hi;
        let dx_n = cp_hi - pp_lo - dx_lo + 1;
        let ps_n = ps_hi - ps_lo + 1;
        let cs_n = cs_hi - cs_lo + 1;
        let mut sets = Vec::with_capacity((dx_n * ps_n * cs_n) as usize);
        for dx in dx_lo..dx_lo + dx_n {
            for sp in ps_lo..=ps_hi {
                for sc in cs_lo..=cs_hi {
                    let m = feasible_lengths_1d(Config1d::new(0, sp), Config1d::new(dx, sc));
                    sets.push(Compact::from_set(&m));
                }
            }
        }
        // index = (p - p' - dx_lo)·ps_n·cs_n + (s' - ps_lo)·cs_n + (s - cs_lo)
        for (k, c) in prev.iter().enumerate() {
            from_key[k].push(-c.p[j] * ps_n * cs_n + (c.v[j] - ps_lo) * cs_n);
        }
        for (k, c) in cur.iter().enumerate() {
            to_key[k].push((c.p[j] - dx_lo) * ps_n * cs_n + (c.v[j] - cs_lo));
        }
        axes.push(AxisTable { sets });
    }
    StageTables {
        axes,
        from_key,
        to_key,
    }
}

/// Algorithm 2. Returns the optimal cost and one optimal visiting sequence
/// (ties broken towards the lexicographically smallest predecessor).
pub fn dp_solve(inst: &Instance, sets: &[CandidateSet]) -> Result<(i64, Vec<Configuration>)> {
    dp_solve_in(inst, sets, None)
}

/// [`dp_solve`] with every transition confined to `region` when given.
pub fn dp_solve_in(
    inst: &Instance,
    sets: &[CandidateSet],
    region: Option<&BoxRegion>,
) -> Result<(i64, Vec<Configuration>)> {
    let table = dp_table(inst, sets, region)?;
    let seq = unfold(sets, &table);
    Ok((*table.cost.last().unwrap().first().unwrap(), seq))
}

pub fn dp_table(inst: &Instance, sets: &[CandidateSet], region: Option<&BoxRegion>) -> Result<DpTable> {
    let n = inst.n();
    if sets.len() != n {
        return Err(Error::InvalidInput(format!(
            "{} candidate sets for {n} cities",
            sets.len()
        )));
    }
    if let Some(empty) = sets.iter().find(|s| s.is_empty()) {
        return Err(Error::Infeasible(format!(
            "candidate set of city {} is empty",
            empty.city_index
        )));
    }
    let is_rest = |s: &CandidateSet, x: &Vec<i64>| {
        s.configs.len() == 1 && s.configs[0] == Configuration::at_rest(x.clone())
    };
    if !is_rest(&sets[0], &inst.points[0]) || !is_rest(&sets[n - 1], &inst.points[n - 1]) {
        return Err(Error::InvalidInput(
            "first and last candidate sets must hold the end cities at rest".into(),
        ));
    }
    let d = inst.d;
    let mut boxed = region.map(BoxedTransitions::new);
    let mut table = DpTable {
        cost: vec![vec![0]],
        pred: vec![vec![None]],
        step: vec![vec![0]],
    };
    for i in 1..n {
        let prev = &sets[i - 1].configs;
        let cur = &sets[i].configs;
        let tables = stage_tables(prev, cur, d);
        let prev_cost = &table.cost[i - 1];
        let mut order: Vec<usize> = (0..prev.len()).collect();
        order.sort_by_key(|&k| prev_cost[k]);
        let same: HashMap<&Configuration, usize> =
            prev.iter().enumerate().map(|(k, c)| (c, k)).collect();
        let pair = [inst.points[i - 1].as_slice(), inst.points[i].as_slice()];

        let mut cost = Vec::with_capacity(cur.len());
        let mut pred = Vec::with_capacity(cur.len());
        let mut step = Vec::with_capacity(cur.len());
        let mut scratch = vec![Compact { lo: 1, hi: 0, tail: 0 }; d];
        for (ci, c) in cur.iter().enumerate() {
            let twin = same.get(c).copied();
            let self_ok = twin.is_some() && visit_order_ok(c, &pair)?;
            let free = |k: usize, scratch: &mut [Compact]| -> i64 {
                if Some(k) == twin && self_ok {
                    return 0;
                }
                for (j, slot) in scratch.iter_mut().enumerate() {
                    let idx = tables.from_key[k][j] + tables.to_key[ci][j];
                    *slot = tables.axes[j].sets[idx as usize];
                }
                min_common(scratch, i32::from(Some(k) == twin)) as i64
            };
            let mut best = i64::MAX;
            let mut best_k = usize::MAX;
            let mut best_step = 0;
            for &k in &order {
                let base = prev_cost[k];
                if base == i64::MAX || base > best {
                    break;
                }
                let t = free(k, &mut scratch);
                let total = base + t;
                if total < best || (total == best && prev[k] < prev[best_k]) {
                    best = total;
                    best_k = k;
                    best_step = t;
                }
            }
            if let (Some(boxed), true) = (boxed.as_mut(), best < i64::MAX) {
                // the free optimum bounds the in-box one from below; raise the
                // target total until some predecessor meets it inside the box
                let floor = prev_cost[order[0]];
                let mut theta = best;
                (best, best_k, best_step) = (i64::MAX, usize::MAX, 0);
                while best == i64::MAX && theta - floor <= MAX_BOXED_LENGTH {
                    for &k in &order {
                        let base = prev_cost[k];
                        if base == i64::MAX || base > theta {
                            break;
                        }
                        let t = free(k, &mut scratch);
                        if base + t > theta {
                            continue;
                        }
                        let t = if t == 0 {
                            0
                        } else {
                            match boxed.min_length(&prev[k], c, &scratch, t, theta - base) {
                                Some(len) => len,
                                None => continue,
                            }
                        };
                        if base + t == theta && (best_k == usize::MAX || prev[k] < prev[best_k]) {
                            best = theta;
                            best_k = k;
                            best_step = t;
                        }
                    }
                    theta += 1;
                }
            }
            cost.push(best);
            pred.push((best_k != usize::MAX).then_some(best_k));
            step.push(best_step);
        }
        table.cost.push(cost);
        table.pred.push(pred);
        table.step.push(step);
    }
    if table.cost[n - 1][0] == i64::MAX {
        return Err(Error::Infeasible(
            "no trajectory through the candidate sets stays in the region".into(),
        ));
    }
    Ok(table)
}

fn unfold_indices(table: &DpTable) -> Vec<usize> {
    let n = table.cost.len();
    let mut idx = vec![0usize; n];
    for i in (1..n).rev() {
        idx[i - 1] = table.pred[i][idx[i]].expect("stages after the first have predecessors");
    }
    idx
}

fn unfold(sets: &[CandidateSet], table: &DpTable) -> Vec<Configuration> {
    unfold_indices(table)
        .into_iter()
        .enumerate()
        .map(|(i, k)| sets[i].configs[k].clone())
        .collect()
}

/// How the candidate speed bound is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpeedBoundMode {
    Fixed(i64),
    /// `⌊S/2⌋`, or `⌊S/4⌋` for tours, from a known trajectory length `S`.
    Conservative,
    /// `⌈√L⌉` for the largest per-dimension spread `L`; not proven exact.
    Conjecture,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpeedBoundPolicy {
    pub mode: SpeedBoundMode,
    pub s: Option<i64>,
    pub l: Option<i64>,
}

impl SpeedBoundPolicy {
    pub fn fixed(smax: i64) -> Self {
        SpeedBoundPolicy {
            mode: SpeedBoundMode::Fixed(smax),
            s: None,
            l: None,
        }
    }

    pub fn conservative() -> Self {
        SpeedBoundPolicy {
            mode: SpeedBoundMode::Conservative,
            s: None,
            l: None,
        }
    }

    pub fn conjecture() -> Self {
        SpeedBoundPolicy {
            mode: SpeedBoundMode::Conjecture,
            s: None,
            l: None,
        }
    }

    /// Whether the bound provably preserves the optimum.
    pub fn is_exact(&self) -> bool {
        !matches!(self.mode, SpeedBoundMode::Conjecture)
    }
}

/// Speed bound for `policy`; `s` and `l` override the policy's own values.
pub fn speed_bound(
    policy: &SpeedBoundPolicy,
    s: Option<i64>,
    l: Option<i64>,
    tour: bool,
) -> Result<i64> {
    match policy.mode {
        SpeedBoundMode::Fixed(smax) if smax >= 0 => Ok(smax),
        SpeedBoundMode::Fixed(smax) => Err(Error::Config(format!("negative speed bound {smax}"))),
        SpeedBoundMode::Conservative => {
            let s = s.or(policy.s).ok_or_else(|| {
                Error::Config("the conservative bound needs a trajectory length S".into())
            })?;
            Ok(if tour { s / 4 } else { s / 2 })
        }
        SpeedBoundMode::Conjecture => {
            let l = l.or(policy.l).ok_or_else(|| {
                Error::Config("the conjecture bound needs the city spread L".into())
            })?;
            Ok(ceil_sqrt(l))
        }
    }
}

/// Default speed bound of the warm start.
pub const WARM_START_SMAX: i64 = 5;

/// Length of an optimal trajectory under speed bound `smax`: a valid upper
/// bound `S` on the true optimum.
pub fn warm_start_s(inst: &Instance, smax: i64) -> Result<i64> {
    warm_start_in(inst, smax, None)
}

fn warm_start_in(inst: &Instance, smax: i64, region: Option<&BoxRegion>) -> Result<i64> {
    if inst.n() == 1 {
        return Ok(0);
    }
    let mut sets = build_candidate_sets(inst, smax)?;
    if let Some(region) = region {
        restrict_to_box(&mut sets, region);
    }
    dp_solve_in(inst, &sets, region).map(|(cost, _)| cost)
}

/// One stitched leg between consecutive visiting configurations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Leg {
    /// 1-based index of the city the leg arrives at.
    pub to_city: usize,
    pub length: i64,
    pub dims: Vec<CompactTrajectory>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Solution {
    pub cost: i64,
    pub smax: i64,
    /// False when the speed bound is conjectural.
    pub exact: bool,
    pub warm_start: Option<i64>,
    pub candidate_count: usize,
    pub removed: usize,
    pub visiting: Vec<Configuration>,
    pub legs: Vec<Leg>,
    pub trajectory: Trajectory,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub policy: SpeedBoundPolicy,
    pub hull_margin: Option<i64>,
    pub warm_start_smax: i64,
    pub filter: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            policy: SpeedBoundPolicy::conservative(),
            hull_margin: None,
            warm_start_smax: WARM_START_SMAX,
            filter: true,
        }
    }
}

/// Warm start, speed bound, candidates, filter, DP and stitching.
pub fn solve(inst: &Instance, policy: &SpeedBoundPolicy, hull_margin: Option<i64>) -> Result<Solution> {
    solve_with(
        inst,
        &SolveOptions {
            policy: *policy,
            hull_margin,
            ..SolveOptions::default()
        },
    )
}

pub fn solve_with(inst: &Instance, opts: &SolveOptions) -> Result<Solution> {
    let n = inst.n();
    let start = Configuration::at_rest(inst.points[0].clone());
    if n == 1 {
        return Ok(Solution {
            cost: 0,
            smax: 0,
            exact: true,
            warm_start: Some(0),
            candidate_count: 1,
            removed: 0,
            visiting: vec![start.clone()],
            legs: Vec::new(),
            trajectory: Trajectory::new(vec![start]),
        });
    }
    let region = opts.hull_margin.map(|m| BoxRegion::around(inst, m));
    let needs_s = opts.filter || matches!(opts.policy.mode, SpeedBoundMode::Conservative);
    let warm = match (opts.policy.s, needs_s) {
        (Some(s), _) => Some(s),
        (None, true) => Some(warm_start_in(inst, opts.warm_start_smax, region.as_ref())?),
        (None, false) => None,
    };
    let smax = speed_bound(&opts.policy, warm, Some(opts.policy.l.unwrap_or(inst.spread())), inst.tour)?;
    let mut sets = build_candidate_sets(inst, smax)?;
    if let Some(region) = &region {
        restrict_to_box(&mut sets, region);
    }
    let end = Configuration::at_rest(inst.points[n - 1].clone());
    let removed = if opts.filter {
        filter_candidates(&mut sets, &start, &end, warm)?
    } else {
        0
    };
    let candidate_count = sets.iter().map(CandidateSet::len).sum();
    let table = dp_table(inst, &sets, region.as_ref())?;
    let idx = unfold_indices(&table);
    let visiting: Vec<Configuration> = idx
        .iter()
        .enumerate()
        .map(|(i, &k)| sets[i].configs[k].clone())
        .collect();
    let (legs, trajectory) = stitch(&visiting, |i| table.step[i][idx[i]], region.as_ref())?;
    let cost = table.cost[n - 1][0];
    debug_assert_eq!(trajectory.len() as i64, cost);
    Ok(Solution {
        cost,
        smax,
        exact: opts.policy.is_exact(),
        warm_start: warm,
        candidate_count,
        removed,
        visiting,
        legs,
        trajectory,
    })
}

/// Joins consecutive visiting configurations with witnesses of the given
/// transition lengths.
pub fn stitch(
    visiting: &[Configuration],
    step: impl Fn(usize) -> i64,
    region: Option<&BoxRegion>,
) -> Result<(Vec<Leg>, Trajectory)> {
    let mut legs = Vec::new();
    let mut traj = Trajectory::new(vec![visiting[0].clone()]);
    for i in 1..visiting.len() {
        let length = step(i);
        if length == 0 {
            continue;
        }
        let dims = match region {
            Some(region) => boxed_witness(&visiting[i - 1], &visiting[i], length, region)?,
            None => construct_compact(&visiting[i - 1], &visiting[i], Some(length))?.1,
        };
        traj.append(assemble(&dims)?)?;
        legs.push(Leg {
            to_city: i + 1,
            length,
            dims,
        });
    }
    Ok((legs, traj))
}

/// Whether `t` visits the cities in order, with strictly increasing
/// distances among cities crossed by a single move.
pub fn visits_in_order(t: &Trajectory, cities: &[Vec<i64>]) -> Result<bool> {
    let mut k = 0;
    for c in &t.configs {
        let mut taken: Vec<&[i64]> = Vec::new();
        while k < cities.len() {
            let x = cities[k].as_slice();
            if !crate::kinematics::visits(c, x)? {
                break;
            }
            taken.push(x);
            if !visit_order_ok(c, &taken)? {
                taken.pop();
                break;
            }
            k += 1;
        }
    }
    Ok(k == cities.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::{validate_trajectory, visits};
    use proptest::prelude::*;

    fn line(xs: &[i64]) -> Instance {
        Instance::new(xs.iter().map(|&x| vec![x]).collect(), false).unwrap()
    }

    #[test]
    fn candidate_examples() {
        let set = candidate_configs(&[3, 4], 0, 2).unwrap();
        assert_eq!(set.configs, vec![Configuration::at_rest(vec![3, 4])]);
        let set = candidate_configs(&[0], 1, 1).unwrap();
        let mut expected = vec![
            Configuration { p: vec![0], v: vec![0] },
            Configuration { p: vec![0], v: vec![1] },
            Configuration { p: vec![1], v: vec![1] },
            Configuration { p: vec![0], v: vec![-1] },
            Configuration { p: vec![-1], v: vec![-1] },
        ];
        expected.sort();
        assert_eq!(set.configs, expected);
    }

    #[test]
    fn candidates_match_exhaustive_enumeration() {
        for smax in 0..=3i64 {
            let x = [1i64, -2];
            let set = candidate_configs(&x, smax, 2).unwrap();
            let mut expected = Vec::new();
            let r = 2 * smax + 1;
            for px in x[0] - r..=x[0] + r {
                for py in x[1] - r..=x[1] + r {
                    for vx in -smax..=smax {
                        for vy in -smax..=smax {
                            let c = Configuration { p: vec![px, py], v: vec![vx, vy] };
                            if visits(&c, &x).unwrap() {
                                expected.push(c);
                            }
                        }
                    }
                }
            }
            expected.sort();
            assert_eq!(set.configs, expected, "smax={smax}");
        }
    }

    #[test]
    fn dp_examples() {
        let one = line(&[5]);
        let sets = build_candidate_sets(&one, 3).unwrap();
        let (cost, seq) = dp_solve(&one, &sets).unwrap();
        assert_eq!((cost, seq.len()), (0, 1));
        let two = line(&[0, 4]);
        let sets = build_candidate_sets(&two, 3).unwrap();
        assert_eq!(dp_solve(&two, &sets).unwrap().0, 4);
        let mut sets = build_candidate_sets(&two, 3).unwrap();
        sets[1].configs.clear();
        assert!(matches!(dp_solve(&two, &sets), Err(Error::Infeasible(_))));
    }

    #[test]
    fn one_move_serves_two_cities() {
        // rest at 0, cross 2 and 3 with one move, stop at 6
        let inst = line(&[0, 2, 3, 6]);
        let sets = build_candidate_sets(&inst, 4).unwrap();
        let (cost, seq) = dp_solve(&inst, &sets).unwrap();
        assert_eq!(cost, feasible_lengths_1d(Config1d::new(0, 0), Config1d::new(6, 0)).min().unwrap());
        assert!(seq.windows(2).any(|w| w[0] == w[1]));
    }

    #[test]
    fn speed_bound_examples() {
        let c = SpeedBoundPolicy::conservative();
        assert_eq!(speed_bound(&c, Some(20), None, false).unwrap(), 10);
        assert_eq!(speed_bound(&c, Some(20), None, true).unwrap(), 5);
        assert_eq!(speed_bound(&SpeedBoundPolicy::conjecture(), None, Some(100), false).unwrap(), 10);
        assert_eq!(speed_bound(&SpeedBoundPolicy::conjecture(), None, Some(101), false).unwrap(), 11);
        assert!(matches!(speed_bound(&c, None, None, false), Err(Error::Config(_))));
        assert!(matches!(
            speed_bound(&SpeedBoundPolicy::conjecture(), Some(3), None, false),
            Err(Error::Config(_))
        ));
        assert_eq!(speed_bound(&SpeedBoundPolicy::fixed(7), None, None, false).unwrap(), 7);
    }

    #[test]
    fn warm_start_examples() {
        assert_eq!(warm_start_s(&line(&[3]), 5).unwrap(), 0);
        assert_eq!(warm_start_s(&line(&[0, 4]), 5).unwrap(), 4);
    }

    #[test]
    fn solve_examples() {
        let sol = solve(&line(&[0, 24]), &SpeedBoundPolicy::conservative(), None).unwrap();
        assert_eq!(sol.cost, 10);
        assert_eq!(sol.trajectory.len(), 10);
        assert!(validate_trajectory(&sol.trajectory).unwrap());
        let sol = solve(&line(&[7]), &SpeedBoundPolicy::conjecture(), None).unwrap();
        assert_eq!((sol.cost, sol.visiting.len()), (0, 1));
    }

    #[test]
    fn filter_with_no_bound_keeps_everything() {
        let inst = Instance::new(vec![vec![0, 0], vec![3, 1], vec![5, 5]], false).unwrap();
        let mut sets = build_candidate_sets(&inst, 3).unwrap();
        let before: usize = sets.iter().map(CandidateSet::len).sum();
        let (a, b) = (sets[0].configs[0].clone(), sets[2].configs[0].clone());
        assert_eq!(filter_candidates(&mut sets, &a, &b, None).unwrap(), 0);
        assert_eq!(sets.iter().map(CandidateSet::len).sum::<usize>(), before);
    }

    #[test]
    fn instance_json() {
        let inst: Instance = serde_json::from_str(r#"{"d":2,"points":[[0,0],[7,1]],"tour":false}"#).unwrap();
        assert_eq!(inst.n(), 2);
        assert!(serde_json::from_str::<Instance>(r#"{"d":3,"points":[[0,0]]}"#).is_err());
        assert!(serde_json::from_str::<Instance>(r#"{"points":[]}"#).is_err());
        assert!(Instance::new(vec![vec![0], vec![1]], true).is_err());
    }

    #[test]
    fn boxed_search_matches_oracle() {
        use crate::oracle::{feasible_lengths_bfs, SearchBounds};
        let (lo, hi) = (-3, 5);
        for x in lo..=hi {
            for s in -3..=3 {
                for x2 in lo..=hi {
                    for s2 in -3..=3 {
                        let (a, b) = (Config1d::new(x, s), Config1d::new(x2, s2));
                        let got = BoxedSearch::new(a, lo, hi, 12).mask(b);
                        let bounds = SearchBounds { pos_lo: vec![lo], pos_hi: vec![hi], speed_cap: 20, step_cap: 100 };
                        let want = feasible_lengths_bfs(
                            &Configuration { p: vec![x], v: vec![s] },
                            &Configuration { p: vec![x2], v: vec![s2] },
                            &bounds,
                            12,
                        )
                        .unwrap()
                        .into_iter()
                        .fold(0u64, |m, t| m | 1 << t);
                        assert_eq!(got, want, "{a:?} -> {b:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn boxed_paths_are_valid() {
        let region = BoxRegion { lo: vec![0, 0], hi: vec![6, 3] };
        let (a, b) = (Configuration { p: vec![1, 0], v: vec![1, 0] }, Configuration { p: vec![5, 3], v: vec![0, 1] });
        let (free, _) = construct_compact(&a, &b, None).unwrap();
        let dims = boxed_witness(&a, &b, free + 2, &region).unwrap();
        let t = assemble(&dims).unwrap();
        assert!(validate_trajectory(&t).unwrap());
        assert_eq!((t.first(), t.last()), (Some(&a), Some(&b)));
        assert!(t.configs.iter().all(|c| region.contains(&c.p)));
        // turning at speed 3 needs room below zero
        let (a, b) = (Configuration::at_rest(vec![0]), Configuration { p: vec![0], v: vec![3] });
        assert!(boxed_witness(&a, &b, 6, &BoxRegion { lo: vec![0], hi: vec![20] }).is_err());
    }

    #[test]
    fn hull_mode_exits_nothing() {
        let inst = Instance::new(vec![vec![0, 0], vec![7, -1], vec![14, -2], vec![21, -3]], false).unwrap();
        let sol = solve(&inst, &SpeedBoundPolicy::fixed(6), Some(0)).unwrap();
        let region = BoxRegion::around(&inst, 0);
        assert!(sol.trajectory.configs.iter().all(|c| region.contains(&c.p)));
        assert!(visits_in_order(&sol.trajectory, &inst.points).unwrap());
        assert!(sol.cost >= solve(&inst, &SpeedBoundPolicy::fixed(6), None).unwrap().cost);
    }

    fn arb_instance(n_max: usize, side: i64) -> impl Strategy<Value = Instance> {
        prop::collection::vec(prop::collection::vec(0..side, 2), 1..=n_max)
            .prop_map(|pts| Instance::new(pts, false).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn stitched_solution_is_consistent(inst in arb_instance(5, 10)) {
            let sol = solve(&inst, &SpeedBoundPolicy::fixed(4), None).unwrap();
            prop_assert!(validate_trajectory(&sol.trajectory).unwrap());
            prop_assert_eq!(sol.trajectory.len() as i64, sol.cost);
            prop_assert!(visits_in_order(&sol.trajectory, &inst.points).unwrap());
            prop_assert_eq!(sol.trajectory.first().unwrap(), &Configuration::at_rest(inst.points[0].clone()));
            prop_assert_eq!(sol.trajectory.last().unwrap(), &Configuration::at_rest(inst.points[inst.n() - 1].clone()));
            if let Some(s) = sol.warm_start {
                prop_assert!(sol.cost <= s);
            }
        }

        #[test]
        fn cost_does_not_grow_with_smax(inst in arb_instance(4, 8)) {
            let mut last = i64::MAX;
            for smax in 1..=4 {
                let sets = build_candidate_sets(&inst, smax).unwrap();
                let (cost, seq) = dp_solve(&inst, &sets).unwrap();
                prop_assert!(cost <= last);
                last = cost;
                let sum: i64 = seq.windows(2).enumerate().map(|(i, w)| {
                    if w[0] == w[1] && visit_order_ok(&w[0], &[&inst.points[i][..], &inst.points[i + 1][..]]).unwrap() {
                        0
                    } else if w[0] == w[1] {
                        let sets = crate::branching_cost::feasible_lengths(&w[0], &w[1]).unwrap();
                        let sets: Vec<_> = sets.iter().map(|s| s.intersection(&MultiInterval::from_tail(1))).collect();
                        let refs: Vec<_> = sets.iter().collect();
                        MultiInterval::min_common(&refs).unwrap()
                    } else {
                        branching_cost(&w[0], &w[1]).unwrap()
                    }
                }).sum();
                prop_assert_eq!(sum, cost);
            }
        }

        #[test]
        fn hull_mode_matches_boxed_oracle(inst in arb_instance(4, 6), margin in 0i64..=2) {
            use crate::oracle::{bfs_multipoint, SearchBounds};
            let opts = SolveOptions { policy: SpeedBoundPolicy::fixed(8), hull_margin: Some(margin), ..SolveOptions::default() };
            let sol = solve_with(&inst, &opts).unwrap();
            let bounds = SearchBounds::around(&inst.points, margin, 12, 1_000);
            prop_assert_eq!(sol.cost, bfs_multipoint(&inst, &bounds).unwrap());
            prop_assert_eq!(sol.trajectory.len() as i64, sol.cost);
            prop_assert!(validate_trajectory(&sol.trajectory).unwrap());
            let region = BoxRegion::around(&inst, margin);
            prop_assert!(sol.trajectory.configs.iter().all(|c| region.contains(&c.p)));
        }

        #[test]
        fn filter_is_sound(inst in arb_instance(5, 10)) {
            let s = warm_start_s(&inst, 3).unwrap();
            let mut sets = build_candidate_sets(&inst, 4).unwrap();
            let before = dp_solve(&inst, &sets).unwrap().0;
            let (a, b) = (sets[0].configs[0].clone(), sets[inst.n() - 1].configs[0].clone());
            filter_candidates(&mut sets, &a, &b, Some(s)).unwrap();
            prop_assert_eq!(dp_solve(&inst, &sets).unwrap().0, before);
        }
    }
}
