//! Feasible trajectory lengths between two configurations.
//!
//! In one dimension the instance is translated to `x = 0`, mirrored so that
//! `x' ≥ 0`, and then either solved directly (both speeds zero) or reduced to
//! an instance with non-negative speeds by fixing a monotone prefix and/or
//! suffix. The reduced instance is answered by comparing `δ` with the two
//! quadratic curves `δ_min(t)` and `δ_max(t)`. In `d` dimensions the
//! per-axis sets are intersected.

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::interval::MultiInterval;
use crate::kinematics::{Action, Config1d, Configuration};
use crate::{Error, Result};

/// `|s|(|s|-1)/2`: distance needed to stop from speed `s`.
pub fn braking_distance(s: i64) -> i64 {
    let a = s.abs();
    a * (a - 1) / 2
}

/// `|s|(|s|+1)/2`: distance needed to reach speed `s` from rest.
pub fn accel_distance(s: i64) -> i64 {
    let a = s.abs();
    a * (a + 1) / 2
}

/// Smallest `r ≥ 0` with `r² ≥ n`.
pub(crate) fn ceil_sqrt(n: i64) -> i64 {
    if n <= 0 {
        return 0;
    }
    let r = (n as u64).isqrt() as i64;
    if r * r == n {
        r
    } else {
        r + 1
    }
}

/// Curves of Case-4 form: minimum and maximum distance coverable in `t`
/// steps when the speed goes from `s` to `s'`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeasibilityCurves {
    pub s: i64,
    pub s_prime: i64,
    pub delta: i64,
    /// `(s'+s+1)(s'-s)/2`.
    pub alpha: Ratio<i64>,
    /// `δ_min(t) ≤ δ ⇔ (t - s - s')² ≥ disc_min`.
    pub disc_min: i64,
    /// `δ_max(t) ≥ δ ⇔ (t + s + s')² ≥ disc_max`.
    pub disc_max: i64,
    pub t_min: i64,
}

/// Position of `δ` relative to the two curves.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Case4Type {
    /// `δ ≥ max δ_min`: `[t1, ∞)`.
    A,
    /// `[t1, t2] ∪ [t3, ∞)`.
    B,
    /// The first window holds no integer: `[t3, ∞)`.
    C,
    /// `δ < δ_min(t_min)`: `[t3, ∞)`.
    D,
}

/// Characteristic lengths of a Case-4 instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Case4Solution {
    pub kind: Case4Type,
    pub t1: i64,
    pub t2: Option<i64>,
    pub t3: Option<i64>,
}

fn curve_alpha_x2(s: i64, sp: i64) -> i64 {
    (sp + s + 1) * (sp - s)
}

fn check_t(s: i64, sp: i64, t: i64) -> Result<()> {
    let t_min = (sp - s).abs();
    if t < t_min {
        return Err(Error::Domain(format!(
            "length {t} is below the minimum {t_min} for speeds {s} -> {sp}"
        )));
    }
    Ok(())
}

/// `⌈(3s - t + s')(t - s' + s)/4 + α⌉`.
pub fn delta_min(s: i64, s_prime: i64, t: i64) -> Result<i64> {
    check_t(s, s_prime, t)?;
    Ok(delta_min_unchecked(s, s_prime, t))
}

/// `⌊(3s' + t + s)(t - s' + s)/4 + α⌋`.
pub fn delta_max(s: i64, s_prime: i64, t: i64) -> Result<i64> {
    check_t(s, s_prime, t)?;
    Ok(delta_max_unchecked(s, s_prime, t))
}

pub(crate) fn delta_min_unchecked(s: i64, sp: i64, t: i64) -> i64 {
    let num = (3 * s - t + sp) * (t - sp + s) + 2 * curve_alpha_x2(s, sp);
    Integer::div_ceil(&num, &4)
}

pub(crate) fn delta_max_unchecked(s: i64, sp: i64, t: i64) -> i64 {
    let num = (3 * sp + t + s) * (t - sp + s) + 2 * curve_alpha_x2(s, sp);
    Integer::div_floor(&num, &4)
}

impl FeasibilityCurves {
    pub fn new(s: i64, s_prime: i64, delta: i64) -> Self {
        let sp = s_prime;
        FeasibilityCurves {
            s,
            s_prime,
            delta,
            alpha: Ratio::new(curve_alpha_x2(s, sp), 2),
            disc_min: 2 * sp * sp + 2 * s * s + 2 * sp - 2 * s - 4 * delta,
            disc_max: 2 * sp * sp + 2 * s * s - 2 * sp + 2 * s + 4 * delta,
            t_min: (sp - s).abs(),
        }
    }

    pub fn delta_min(&self, t: i64) -> Result<i64> {
        delta_min(self.s, self.s_prime, t)
    }

    pub fn delta_max(&self, t: i64) -> Result<i64> {
        delta_max(self.s, self.s_prime, t)
    }

    fn min_ok(&self, t: i64) -> bool {
        let u = t - self.s - self.s_prime;
        u * u >= self.disc_min
    }

    fn max_ok(&self, t: i64) -> bool {
        t + self.s + self.s_prime >= 0 && {
            let u = t + self.s + self.s_prime;
            u * u >= self.disc_max
        }
    }

    /// Whether `t` is a feasible length.
    pub fn admits(&self, t: i64) -> bool {
        t >= self.t_min && self.min_ok(t) && self.max_ok(t)
    }

    /// Algorithm 1 on a Case-4 instance (`s, s', δ ≥ 0`).
    pub fn solve(&self) -> Result<Case4Solution> {
        let (s, sp, delta) = (self.s, self.s_prime, self.delta);
        if s < 0 || sp < 0 || delta < 0 {
            return Err(Error::Domain(format!(
                "reduced instance needs non-negative speeds and distance, got s={s}, s'={sp}, δ={delta}"
            )));
        }
        let peak = s + sp;
        // larger root of δ_max(t) = δ, clamped to t_min
        let mut t1 = (ceil_sqrt(self.disc_max) - peak).max(self.t_min);
        while !self.max_ok(t1) {
            t1 += 1;
        }
        while t1 > self.t_min && self.max_ok(t1 - 1) {
            t1 -= 1;
        }
        debug_assert!(delta_max_unchecked(s, sp, t1) >= delta);

        if self.disc_min <= 0 {
            return Ok(Case4Solution {
                kind: Case4Type::A,
                t1,
                t2: None,
                t3: None,
            });
        }
        let root = ceil_sqrt(self.disc_min);
        let t3 = peak + root;
        debug_assert!(delta_min_unchecked(s, sp, t3) <= delta);
        debug_assert!(delta_min_unchecked(s, sp, t3 - 1) > delta);
        if !self.min_ok(self.t_min) {
            return Ok(Case4Solution {
                kind: Case4Type::D,
                t1,
                t2: None,
                t3: Some(t3),
            });
        }
        let t2 = peak - root;
        debug_assert!(t2 >= self.t_min && delta_min_unchecked(s, sp, t2) <= delta);
        let kind = if t2 >= t1 { Case4Type::B } else { Case4Type::C };
        Ok(Case4Solution {
            kind,
            t1,
            t2: Some(t2),
            t3: Some(t3),
        })
    }
}

impl Case4Solution {
    pub fn intervals(&self) -> MultiInterval {
        match (self.kind, self.t2, self.t3) {
            (Case4Type::A, _, _) => MultiInterval::from_tail(self.t1),
            (Case4Type::B, Some(t2), Some(t3)) => {
                MultiInterval::from_parts([(self.t1, t2)], Some(t3.max(self.t1)))
            }
            (_, _, Some(t3)) => MultiInterval::from_tail(t3.max(self.t1)),
            _ => unreachable!("types B, C and D carry t3"),
        }
    }
}

/// Feasible lengths of a Case-4 instance `(0, s) → (δ, s')`.
pub fn case4_intervals(s: i64, s_prime: i64, delta: i64) -> Result<MultiInterval> {
    Ok(FeasibilityCurves::new(s, s_prime, delta).solve()?.intervals())
}

/// `[⌈2√δ⌉, ∞)`: lengths from rest to rest over distance `δ ≥ 0`.
pub fn case0_intervals(delta: i64) -> MultiInterval {
    MultiInterval::from_tail(ceil_sqrt(4 * delta))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Case {
    Case0,
    Case1,
    Case2,
    Case3,
    Case4,
}

/// A run of identical actions fixed by the reduction, in the normalized
/// frame.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonotoneRun {
    pub action: Action,
    pub steps: i64,
    pub distance: i64,
}

/// How the original instance maps onto the reduced core.
///
/// Original frame → normalized frame: translate by `-offset`, then mirror if
/// `reflected`. The normalized frame has `x = 0` and `x' ≥ 0`. Inside it the
/// trajectory is `prefix`, then the core, then `suffix`; the core is solved
/// in the mirrored frame when `core_reflected`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transform {
    pub offset: i64,
    pub reflected: bool,
    pub prefix: Option<MonotoneRun>,
    pub suffix: Option<MonotoneRun>,
    pub core_reflected: bool,
}

impl Transform {
    /// Steps added around the core.
    pub fn fixed_steps(&self) -> i64 {
        self.prefix.map_or(0, |r| r.steps) + self.suffix.map_or(0, |r| r.steps)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseTag {
    pub case: Case,
    pub transform: Transform,
}

/// A reduced instance: the core runs from `(0, s)` to `(δ, s')` with
/// `s, s', δ ≥ 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reduced {
    pub s: i64,
    pub s_prime: i64,
    pub delta: i64,
}

impl Reduced {
    pub fn start(&self) -> Config1d {
        Config1d::new(0, self.s)
    }

    pub fn end(&self) -> Config1d {
        Config1d::new(self.delta, self.s_prime)
    }

    pub fn is_rest_to_rest(&self) -> bool {
        self.s == 0 && self.s_prime == 0
    }

    /// Feasible lengths of the core alone.
    pub fn intervals(&self) -> MultiInterval {
        if self.is_rest_to_rest() {
            case0_intervals(self.delta)
        } else {
            case4_intervals(self.s, self.s_prime, self.delta)
                .expect("reduced instances are non-negative")
        }
    }
}

fn run(action: Action, from_speed: i64) -> Option<MonotoneRun> {
    let steps = from_speed.abs();
    (steps > 0).then(|| MonotoneRun {
        action,
        steps,
        distance: if from_speed < 0 {
            -braking_distance(from_speed)
        } else {
            braking_distance(from_speed)
        },
    })
}

/// Reduces a 1D instance to a core with non-negative speeds.
pub fn reduce(c: Config1d, c_prime: Config1d) -> (CaseTag, Reduced) {
    let offset = c.x;
    let reflected = c_prime.x < c.x;
    let sign = if reflected { -1 } else { 1 };
    let s = sign * c.s;
    let sp = sign * c_prime.s;
    let x = sign * (c_prime.x - c.x);

    let mut transform = Transform {
        offset,
        reflected,
        prefix: None,
        suffix: None,
        core_reflected: false,
    };
    let tagged = |case, transform, s, s_prime, delta| {
        (
            CaseTag { case, transform },
            Reduced {
                s,
                s_prime,
                delta,
            },
        )
    };

    if s == 0 && sp == 0 {
        return tagged(Case::Case0, transform, 0, 0, x);
    }
    if s <= 0 && sp <= 0 {
        // stop as early as possible, rest-to-rest core, restart backwards
        let p1 = -braking_distance(s);
        let p2 = x + accel_distance(sp);
        transform.prefix = run(Action::Accelerate, s);
        transform.suffix = (sp < 0).then(|| MonotoneRun {
            action: Action::Decelerate,
            steps: -sp,
            distance: -accel_distance(sp),
        });
        return tagged(Case::Case1, transform, 0, 0, p2 - p1);
    }
    if s < 0 && sp > 0 {
        let p1 = -braking_distance(s);
        let p2 = x - accel_distance(sp);
        if p1 <= p2 {
            transform.prefix = run(Action::Accelerate, s);
            return tagged(Case::Case2, transform, 0, sp, x - p1);
        }
        transform.core_reflected = true;
        transform.suffix = Some(MonotoneRun {
            action: Action::Accelerate,
            steps: sp,
            distance: accel_distance(sp),
        });
        return tagged(Case::Case2, transform, -s, 0, -p2);
    }
    if s > 0 && sp < 0 {
        let p1 = braking_distance(s);
        let p2 = x + accel_distance(sp);
        if p1 >= p2 {
            transform.prefix = run(Action::Decelerate, s);
            transform.core_reflected = true;
            return tagged(Case::Case3, transform, 0, -sp, p1 - x);
        }
        transform.suffix = Some(MonotoneRun {
            action: Action::Decelerate,
            steps: -sp,
            distance: -accel_distance(sp),
        });
        return tagged(Case::Case3, transform, s, 0, p2);
    }
    tagged(Case::Case4, transform, s, sp, x)
}

/// The full set `I(c, c')` of feasible lengths in one dimension. Length 0
/// belongs to the set exactly when `c = c'`.
pub fn feasible_lengths_1d(c: Config1d, c_prime: Config1d) -> MultiInterval {
    let (tag, core) = reduce(c, c_prime);
    let set = core.intervals().shift(tag.transform.fixed_steps());
    if c == c_prime && !set.contains(0) {
        set.union(&MultiInterval::closed(0, 0))
    } else {
        set
    }
}

fn check_dims(c: &Configuration, c_prime: &Configuration) -> Result<()> {
    if c.p.len() != c.v.len() || c_prime.p.len() != c_prime.v.len() {
        return Err(Error::InvalidInput("malformed configuration".into()));
    }
    if c.dim() != c_prime.dim() || c.dim() == 0 {
        return Err(Error::InvalidInput(format!(
            "dimension mismatch: {} vs {}",
            c.dim(),
            c_prime.dim()
        )));
    }
    Ok(())
}

/// Per-dimension feasible-length sets.
pub fn feasible_lengths(c: &Configuration, c_prime: &Configuration) -> Result<Vec<MultiInterval>> {
    check_dims(c, c_prime)?;
    Ok((0..c.dim())
        .map(|j| feasible_lengths_1d(c.axis(j), c_prime.axis(j)))
        .collect())
}

/// Length of a shortest trajectory from `c` to `c'`.
pub fn branching_cost(c: &Configuration, c_prime: &Configuration) -> Result<i64> {
    let sets = feasible_lengths(c, c_prime)?;
    let refs: Vec<&MultiInterval> = sets.iter().collect();
    Ok(MultiInterval::min_common(&refs).expect("every per-axis set has an unbounded tail"))
}
