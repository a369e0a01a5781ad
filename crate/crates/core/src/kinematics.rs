//! Model types: configurations, trajectories, visits and compact control
//! sequences.
//!
//! A trajectory `c_0 … c_ℓ` is valid when, for every `i ∈ [1, ℓ]`,
//! `p_i = p_{i-1} + v_i` and every component of `v_i - v_{i-1}` lies in
//! `{-1, 0, 1}`.

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Position and last move vector, both in `Z^d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Configuration {
    pub p: Vec<i64>,
    pub v: Vec<i64>,
}

impl Configuration {
    pub fn new(p: Vec<i64>, v: Vec<i64>) -> Result<Self> {
        if p.is_empty() || p.len() != v.len() {
            return Err(Error::InvalidInput(format!(
                "position has dimension {} but velocity has dimension {}",
                p.len(),
                v.len()
            )));
        }
        Ok(Configuration { p, v })
    }

    /// The configuration at rest at `p`.
    pub fn at_rest(p: Vec<i64>) -> Self {
        let v = vec![0; p.len()];
        Configuration { p, v }
    }

    pub fn dim(&self) -> usize {
        self.p.len()
    }

    /// Projection on dimension `j`.
    pub fn axis(&self, j: usize) -> Config1d {
        Config1d::new(self.p[j], self.v[j])
    }

    /// Start of the last move, `p - v`.
    pub fn tail(&self) -> Vec<i64> {
        self.p.iter().zip(&self.v).map(|(p, v)| p - v).collect()
    }

    fn check_dim(&self) -> Result<()> {
        if self.p.is_empty() || self.p.len() != self.v.len() {
            return Err(Error::InvalidInput(format!(
                "configuration with |p| = {} and |v| = {}",
                self.p.len(),
                self.v.len()
            )));
        }
        Ok(())
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |xs: &[i64]| {
            xs.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(f, "{}@{}", join(&self.p), join(&self.v))
    }
}

/// Parses the `x1,..,xd@v1,..,vd` form produced by `Display`.
impl std::str::FromStr for Configuration {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("expected `x1,..,xd@v1,..,vd`, got `{text}`"));
        let (p, v) = text.split_once('@').ok_or_else(bad)?;
        let parse = |part: &str| {
            part.split(',')
                .map(|x| x.trim().parse::<i64>().map_err(|_| bad()))
                .collect::<Result<Vec<_>>>()
        };
        Configuration::new(parse(p)?, parse(v)?)
    }
}

/// One-dimensional configuration: position `x` and speed `s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Configuration", into = "Configuration")]
pub struct Config1d {
    pub x: i64,
    pub s: i64,
}

impl Config1d {
    pub const fn new(x: i64, s: i64) -> Self {
        Config1d { x, s }
    }

    /// Mirror through the origin.
    pub fn reflect(self) -> Self {
        Config1d::new(-self.x, -self.s)
    }
}

impl From<Config1d> for Configuration {
    fn from(c: Config1d) -> Self {
        Configuration {
            p: vec![c.x],
            v: vec![c.s],
        }
    }
}

impl TryFrom<Configuration> for Config1d {
    type Error = Error;

    fn try_from(c: Configuration) -> Result<Self> {
        c.check_dim()?;
        if c.dim() != 1 {
            return Err(Error::InvalidInput(format!(
                "expected a 1D configuration, got dimension {}",
                c.dim()
            )));
        }
        Ok(Config1d::new(c.p[0], c.v[0]))
    }
}

/// Sequence of configurations `c_0 … c_ℓ`.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Trajectory {
    pub configs: Vec<Configuration>,
}

impl Trajectory {
    pub fn new(configs: Vec<Configuration>) -> Self {
        Trajectory { configs }
    }

    /// Number of moves, `ℓ = count - 1`.
    pub fn len(&self) -> usize {
        self.configs.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn first(&self) -> Option<&Configuration> {
        self.configs.first()
    }

    pub fn last(&self) -> Option<&Configuration> {
        self.configs.last()
    }

    /// Appends `other`, whose first configuration must equal our last one.
    pub fn append(&mut self, other: Trajectory) -> Result<()> {
        let mut rest = other.configs.into_iter();
        match (self.configs.last(), rest.next()) {
            (None, Some(first)) => self.configs.push(first),
            (Some(last), Some(first)) if *last == first => {}
            (Some(_), Some(_)) => {
                return Err(Error::InvalidInput(
                    "appended trajectory does not start at our last configuration".into(),
                ))
            }
            (_, None) => return Ok(()),
        }
        self.configs.extend(rest);
        Ok(())
    }
}

/// Per-step velocity change in one dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Action {
    #[serde(rename = "-")]
    Decelerate,
    #[serde(rename = "0")]
    Hold,
    #[serde(rename = "+")]
    Accelerate,
}

impl Action {
    pub fn delta(self) -> i64 {
        match self {
            Action::Decelerate => -1,
            Action::Hold => 0,
            Action::Accelerate => 1,
        }
    }

    pub fn from_delta(d: i64) -> Option<Self> {
        match d {
            -1 => Some(Action::Decelerate),
            0 => Some(Action::Hold),
            1 => Some(Action::Accelerate),
            _ => None,
        }
    }

    /// The action seen after mirroring the axis.
    pub fn mirrored(self) -> Self {
        match self {
            Action::Decelerate => Action::Accelerate,
            Action::Hold => Action::Hold,
            Action::Accelerate => Action::Decelerate,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Action::Decelerate => "-",
            Action::Hold => "0",
            Action::Accelerate => "+",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Self> {
        match s {
            "-" => Some(Action::Decelerate),
            "0" => Some(Action::Hold),
            "+" => Some(Action::Accelerate),
            _ => None,
        }
    }
}

/// `count` repetitions of `action`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "(String, u64)", into = "(String, u64)")]
pub struct ControlSegment {
    pub action: Action,
    pub count: u64,
}

impl ControlSegment {
    pub const fn new(action: Action, count: u64) -> Self {
        ControlSegment { action, count }
    }

    /// State reached after applying the segment to `from`.
    pub fn apply(&self, from: Config1d) -> Config1d {
        let a = self.action.delta();
        let n = self.count as i64;
        Config1d::new(from.x + n * from.s + a * n * (n + 1) / 2, from.s + a * n)
    }
}

impl TryFrom<(String, u64)> for ControlSegment {
    type Error = String;

    fn try_from((sym, count): (String, u64)) -> std::result::Result<Self, String> {
        let action =
            Action::from_symbol(&sym).ok_or_else(|| format!("unknown action {sym:?}"))?;
        Ok(ControlSegment { action, count })
    }
}

impl From<ControlSegment> for (String, u64) {
    fn from(seg: ControlSegment) -> Self {
        (seg.action.symbol().to_string(), seg.count)
    }
}

impl fmt::Display for ControlSegment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.action.symbol(), self.count)
    }
}

/// Run-length encoded 1D trajectory: a start state and a list of control
/// segments. The implied length is the sum of the counts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompactTrajectory {
    pub start: Config1d,
    pub segments: Vec<ControlSegment>,
}

impl CompactTrajectory {
    /// Builds the canonical form: zero-count segments dropped, equal
    /// neighbours merged.
    pub fn new(start: Config1d, segments: impl IntoIterator<Item = ControlSegment>) -> Self {
        let mut out: Vec<ControlSegment> = Vec::new();
        for seg in segments {
            if seg.count == 0 {
                continue;
            }
            match out.last_mut() {
                Some(last) if last.action == seg.action => last.count += seg.count,
                _ => out.push(seg),
            }
        }
        CompactTrajectory {
            start,
            segments: out,
        }
    }

    pub fn len(&self) -> u64 {
        self.segments.iter().map(|s| s.count).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Final state, computed segment by segment without expansion.
    pub fn end(&self) -> Config1d {
        self.segments.iter().fold(self.start, |c, seg| seg.apply(c))
    }

    /// Every state `c_0 … c_ℓ` of the expansion.
    pub fn states(&self) -> Vec<Config1d> {
        let mut out = Vec::with_capacity(self.len() as usize + 1);
        let mut cur = self.start;
        out.push(cur);
        for seg in &self.segments {
            let a = seg.action.delta();
            for _ in 0..seg.count {
                cur.s += a;
                cur.x += cur.s;
                out.push(cur);
            }
        }
        out
    }

    /// Smallest and largest position reached, start included.
    pub fn position_range(&self) -> (i64, i64) {
        let mut lo = self.start.x;
        let mut hi = self.start.x;
        let mut cur = self.start;
        for seg in &self.segments {
            let next = seg.apply(cur);
            lo = lo.min(next.x);
            hi = hi.max(next.x);
            if seg.action != Action::Hold {
                // x(j) = x0 + j s0 + a j(j+1)/2 is extremal near j = -s0/a - 1/2
                let a = seg.action.delta();
                let j_star = -cur.s * a;
                for j in [j_star - 1, j_star, j_star + 1] {
                    if (1..seg.count as i64).contains(&j) {
                        let x = cur.x + j * cur.s + a * j * (j + 1) / 2;
                        lo = lo.min(x);
                        hi = hi.max(x);
                    }
                }
            }
            cur = next;
        }
        (lo, hi)
    }

    /// The same trajectory seen in the mirrored frame.
    pub fn mirrored(&self) -> Self {
        CompactTrajectory {
            start: self.start.reflect(),
            segments: self
                .segments
                .iter()
                .map(|s| ControlSegment::new(s.action.mirrored(), s.count))
                .collect(),
        }
    }
}

impl fmt::Display for CompactTrajectory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{} ", self.start.x, self.start.s)?;
        if self.segments.is_empty() {
            return write!(f, "()");
        }
        for seg in &self.segments {
            write!(f, "{seg}")?;
        }
        Ok(())
    }
}

fn check_uniform(configs: &[Configuration]) -> Result<usize> {
    let first = configs
        .first()
        .ok_or_else(|| Error::InvalidInput("empty trajectory".into()))?;
    first.check_dim()?;
    let d = first.dim();
    for c in configs {
        c.check_dim()?;
        if c.dim() != d {
            return Err(Error::InvalidInput(format!(
                "mixed dimensions {} and {}",
                d,
                c.dim()
            )));
        }
    }
    Ok(d)
}

/// True iff every consecutive pair respects position consistency and the
/// unit acceleration bound.
pub fn validate_trajectory(t: &Trajectory) -> Result<bool> {
    check_uniform(&t.configs)?;
    Ok(t.configs.windows(2).all(|w| {
        let (prev, cur) = (&w[0], &w[1]);
        (0..prev.dim()).all(|j| {
            cur.p[j] == prev.p[j] + cur.v[j] && (cur.v[j] - prev.v[j]).abs() <= 1
        })
    }))
}

/// Greatest common divisor of the absolute components (0 for the zero vector).
pub fn vector_gcd(v: &[i64]) -> i64 {
    v.iter().fold(0i64, |g, &x| g.gcd(&x))
}

/// Lattice points on the closed segment `[p - v, p]`, from `p - v` to `p`.
pub fn lattice_points(p: &[i64], v: &[i64]) -> Vec<Vec<i64>> {
    let g = vector_gcd(v);
    if g == 0 {
        return vec![p.to_vec()];
    }
    (0..=g)
        .map(|j| {
            p.iter()
                .zip(v)
                .map(|(&pk, &vk)| pk - vk + j * (vk / g))
                .collect()
        })
        .collect()
}

/// Index `j` such that `x = (p - v) + j · v/g`, if `x` lies on the segment.
pub(crate) fn segment_index(p: &[i64], v: &[i64], x: &[i64]) -> Option<i64> {
    let g = vector_gcd(v);
    if g == 0 {
        return (p == x).then_some(0);
    }
    let mut j: Option<i64> = None;
    for ((&pk, &vk), &xk) in p.iter().zip(v).zip(x) {
        let w = xk - (pk - vk);
        let step = vk / g;
        if step == 0 {
            if w != 0 {
                return None;
            }
            continue;
        }
        if w % step != 0 {
            return None;
        }
        let jk = w / step;
        match j {
            Some(prev) if prev != jk => return None,
            _ => j = Some(jk),
        }
    }
    j.filter(|j| (0..=g).contains(j))
}

fn check_point(c: &Configuration, x: &[i64]) -> Result<()> {
    c.check_dim()?;
    if x.len() != c.dim() {
        return Err(Error::InvalidInput(format!(
            "point has dimension {} but configuration has dimension {}",
            x.len(),
            c.dim()
        )));
    }
    Ok(())
}

/// True iff `x` is a lattice point of the closed segment from `p - v` to `p`.
pub fn visits(c: &Configuration, x: &[i64]) -> Result<bool> {
    check_point(c, x)?;
    Ok(segment_index(&c.p, &c.v, x).is_some())
}

fn squared_distance(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// True iff the points, all visited by `c`, lie at strictly increasing
/// distance from `p - v`.
pub fn visit_order_ok<P: AsRef<[i64]>>(c: &Configuration, xs: &[P]) -> Result<bool> {
    let origin = c.tail();
    let mut last: Option<i64> = None;
    let mut ok = true;
    for x in xs {
        let x = x.as_ref();
        if !visits(c, x)? {
            return Err(Error::InvalidInput(format!(
                "point {x:?} is not visited by {c}"
            )));
        }
        let d = squared_distance(&origin, x);
        if last.is_some_and(|l| d <= l) {
            ok = false;
        }
        last = Some(d);
    }
    Ok(ok)
}

/// Expands a compact 1D trajectory into its configurations.
pub fn expand(ct: &CompactTrajectory) -> Trajectory {
    Trajectory::new(ct.states().into_iter().map(Configuration::from).collect())
}

/// Combines per-dimension compact trajectories of equal length into one
/// d-dimensional trajectory.
pub fn assemble(dims: &[CompactTrajectory]) -> Result<Trajectory> {
    let first = dims
        .first()
        .ok_or_else(|| Error::InvalidInput("no dimensions to assemble".into()))?;
    let len = first.len();
    if let Some((j, other)) = dims.iter().enumerate().find(|(_, ct)| ct.len() != len) {
        return Err(Error::InvalidInput(format!(
            "dimension {j} has length {} but dimension 0 has length {len}",
            other.len()
        )));
    }
    let per_dim: Vec<Vec<Config1d>> = dims.iter().map(|ct| ct.states()).collect();
    let configs = (0..=len as usize)
        .map(|i| Configuration {
            p: per_dim.iter().map(|s| s[i].x).collect(),
            v: per_dim.iter().map(|s| s[i].s).collect(),
        })
        .collect();
    Ok(Trajectory::new(configs))
}
