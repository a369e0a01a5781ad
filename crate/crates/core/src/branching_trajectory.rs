//! Constant-size witnesses for a given feasible length.
//!
//! After the case reduction, the core instance runs from `(0, s)` to
//! `(δ, s')` with `s, s' ≥ 0`. Two ramp trajectories of length `ℓ` split the
//! distance axis into three regions:
//!
//! * A: `δ ≤ δ_rmin`: remove layers of area below the minimal ramp,
//! * B: `δ_rmin ≤ δ ≤ δ_rmax`: shift the ramp step between plateaus,
//! * C: `δ ≥ δ_rmax`: add layers of area above the maximal ramp.
//!
//! Each region/branch pair has one template realizing a whole number of
//! layers and one that additionally slices off an excess `E` with a single
//! unit step moved `E` positions. Templates are plain data in `TEMPLATES`.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::branching_cost::{
    ceil_sqrt, delta_max_unchecked, delta_min_unchecked, feasible_lengths_1d, reduce,
};
use crate::interval::MultiInterval;
use crate::kinematics::{
    assemble, Action, CompactTrajectory, Config1d, Configuration, ControlSegment, Trajectory,
};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    A,
    B,
    C,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionProfile {
    pub region: Region,
    pub d_rmin: i64,
    pub d_rmax: i64,
    pub alpha1: i64,
    pub alpha2: i64,
    /// Area gap to the reference ramp.
    pub deficit: i64,
    /// `(ℓ - |s' - s|)/2`.
    pub k_m: Ratio<i64>,
}

/// `k1` whole layers; `k2` is the end of the plateau for exact templates
/// and the excess slice otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoints {
    pub k1: i64,
    pub k2: i64,
    pub exact: bool,
}

/// Linear form `m·M + k·K + d·|s'-s| + e·E + c` for a segment count.
#[derive(Clone, Copy, Debug)]
struct Count {
    m: i64,
    k: i64,
    d: i64,
    e: i64,
    c: i64,
}

const fn n(m: i64, k: i64, d: i64, e: i64, c: i64) -> Count {
    Count { m, k, d, e, c }
}

const DEC: Action = Action::Decelerate;
const HOLD: Action = Action::Hold;
const ACC: Action = Action::Accelerate;

type Template = &'static [(Action, Count)];

/// Indexed by `[region][s > s'][excess > 0]`.
const TEMPLATES: [[[Template; 2]; 2]; 3] = [
    // A
    [
        [
            &[(DEC, n(0, 1, 0, 0, 0)), (HOLD, n(1, -2, 0, 0, 0)), (ACC, n(0, 1, 1, 0, 0))],
            &[
                (DEC, n(0, 1, 0, 0, 0)),
                (HOLD, n(1, -2, 0, -1, 0)),
                (ACC, n(0, 0, 0, 0, 1)),
                (HOLD, n(0, 0, 0, 1, 0)),
                (ACC, n(0, 1, 1, 0, -1)),
            ],
        ],
        [
            &[(DEC, n(0, 1, 1, 0, 0)), (HOLD, n(1, -2, 0, 0, 0)), (ACC, n(0, 1, 0, 0, 0))],
            &[
                (DEC, n(0, 1, 1, 0, 0)),
                (HOLD, n(1, -2, 0, -1, 0)),
                (ACC, n(0, 0, 0, 0, 1)),
                (HOLD, n(0, 0, 0, 1, 0)),
                (ACC, n(0, 1, 0, 0, -1)),
            ],
        ],
    ],
    // B
    [
        [
            &[(ACC, n(0, 1, 0, 0, 0)), (HOLD, n(1, 0, 0, 0, 0)), (ACC, n(0, -1, 1, 0, 0))],
            &[
                (ACC, n(0, 1, 0, 0, 0)),
                (HOLD, n(1, 0, 0, -1, 0)),
                (ACC, n(0, 0, 0, 0, 1)),
                (HOLD, n(0, 0, 0, 1, 0)),
                (ACC, n(0, -1, 1, 0, -1)),
            ],
        ],
        [
            &[(DEC, n(0, 1, 0, 0, 0)), (HOLD, n(1, 0, 0, 0, 0)), (DEC, n(0, -1, 1, 0, 0))],
            &[
                (DEC, n(0, 1, 0, 0, 0)),
                (HOLD, n(1, 0, 0, -1, 0)),
                (DEC, n(0, 0, 0, 0, 1)),
                (HOLD, n(0, 0, 0, 1, 0)),
                (DEC, n(0, -1, 1, 0, -1)),
            ],
        ],
    ],
    // C
    [
        [
            &[(ACC, n(0, 1, 1, 0, 0)), (HOLD, n(1, -2, 0, 0, 0)), (DEC, n(0, 1, 0, 0, 0))],
            &[
                (ACC, n(0, 1, 1, 0, 0)),
                (HOLD, n(1, -2, 0, -1, 0)),
                (DEC, n(0, 0, 0, 0, 1)),
                (HOLD, n(0, 0, 0, 1, 0)),
                (DEC, n(0, 1, 0, 0, -1)),
            ],
        ],
        [
            &[(ACC, n(0, 1, 0, 0, 0)), (HOLD, n(1, -2, 0, 0, 0)), (DEC, n(0, 1, 1, 0, 0))],
            &[
                (ACC, n(0, 1, 0, 0, 0)),
                (HOLD, n(1, -2, 0, -1, 0)),
                (DEC, n(0, 0, 0, 0, 1)),
                (HOLD, n(0, 0, 0, 1, 0)),
                (DEC, n(0, 1, 1, 0, -1)),
            ],
        ],
    ],
];

fn check_core(s: i64, s_prime: i64, ell: i64) -> Result<i64> {
    if s < 0 || s_prime < 0 {
        return Err(Error::Domain(format!(
            "reduced speeds must be non-negative, got {s} and {s_prime}"
        )));
    }
    let diff = (s_prime - s).abs();
    if ell < diff {
        return Err(Error::Domain(format!(
            "length {ell} is below the minimum {diff} for speeds {s} -> {s_prime}"
        )));
    }
    Ok(ell - diff)
}

/// Ramp distances at length `ℓ`. `region` and `deficit` are filled for
/// `δ = d_rmin`.
pub fn region_bounds(s: i64, s_prime: i64, ell: i64) -> Result<RegionProfile> {
    let m = check_core(s, s_prime, ell)?;
    let sp = s_prime;
    let alpha1 = (sp - s) * (s + sp + 1) / 2;
    let alpha2 = (s - sp) * (s + sp - 1) / 2;
    let (d_rmin, d_rmax) = if s < sp {
        (s * m + alpha1, sp * m + alpha1)
    } else {
        (sp * m + alpha2, s * m + alpha2)
    };
    Ok(RegionProfile {
        region: Region::A,
        d_rmin,
        d_rmax,
        alpha1,
        alpha2,
        deficit: 0,
        k_m: Ratio::new(m, 2),
    })
}

/// Area gained or removed by `k` whole layers.
pub fn layer_area(k: i64, ell: i64, s: i64, s_prime: i64, region: Region) -> Result<i64> {
    let m = check_core(s, s_prime, ell)?;
    match region {
        Region::A | Region::C => {
            if k < 0 || 2 * k > m {
                return Err(Error::Domain(format!(
                    "layer count {k} outside [0, {m}/2]"
                )));
            }
            Ok(k * m - k * k)
        }
        Region::B => {
            if k < 0 {
                return Err(Error::Domain(format!("negative layer count {k}")));
            }
            Ok(m * k)
        }
    }
}

/// Region, deficit and checkpoints for a core instance of length `ℓ`.
pub fn solve_checkpoints(
    delta: i64,
    ell: i64,
    s: i64,
    s_prime: i64,
) -> Result<(RegionProfile, Checkpoints)> {
    let m = check_core(s, s_prime, ell)?;
    let lo = delta_min_unchecked(s, s_prime, ell);
    let hi = delta_max_unchecked(s, s_prime, ell);
    if delta < lo || delta > hi {
        return Err(Error::Infeasible(format!(
            "distance {delta} is outside [{lo}, {hi}] for length {ell} and speeds {s} -> {s_prime}"
        )));
    }
    let mut profile = region_bounds(s, s_prime, ell)?;
    let (region, deficit) = if delta <= profile.d_rmin {
        (Region::A, profile.d_rmin - delta)
    } else if delta <= profile.d_rmax {
        let d = if s <= s_prime {
            delta - profile.d_rmin
        } else {
            profile.d_rmax - delta
        };
        (Region::B, d)
    } else {
        (Region::C, delta - profile.d_rmax)
    };
    profile.region = region;
    profile.deficit = deficit;

    let checkpoints = match region {
        Region::A | Region::C => {
            // smallest k with mk - k² ≥ D
            let disc = m * m - 4 * deficit;
            if disc < 0 {
                return Err(Error::Infeasible(format!(
                    "deficit {deficit} exceeds the largest layer area for plateau {m}"
                )));
            }
            let mut k = ((m - ceil_sqrt(disc)) / 2).max(0);
            while k * m - k * k < deficit {
                k += 1;
            }
            while k > 0 && (k - 1) * m - (k - 1) * (k - 1) >= deficit {
                k -= 1;
            }
            let excess = k * m - k * k - deficit;
            if excess == 0 {
                Checkpoints {
                    k1: k,
                    k2: m - k,
                    exact: true,
                }
            } else {
                Checkpoints {
                    k1: k,
                    k2: excess,
                    exact: false,
                }
            }
        }
        Region::B => {
            if m == 0 {
                Checkpoints {
                    k1: 0,
                    k2: 0,
                    exact: true,
                }
            } else if deficit % m == 0 {
                Checkpoints {
                    k1: deficit / m,
                    k2: m,
                    exact: true,
                }
            } else {
                Checkpoints {
                    k1: deficit / m,
                    k2: deficit % m,
                    exact: false,
                }
            }
        }
    };
    Ok((profile, checkpoints))
}

/// Control segments of the core `(0, s) → (δ, s')` with length `ℓ`.
pub fn construct_core(s: i64, s_prime: i64, delta: i64, ell: i64) -> Result<Vec<ControlSegment>> {
    let (profile, cp) = solve_checkpoints(delta, ell, s, s_prime)?;
    let m = ell - (s_prime - s).abs();
    let diff = (s_prime - s).abs();
    let excess = if cp.exact { 0 } else { cp.k2 };
    let region = match profile.region {
        Region::A => 0,
        Region::B => 1,
        Region::C => 2,
    };
    let template = TEMPLATES[region][usize::from(s > s_prime)][usize::from(!cp.exact)];
    template
        .iter()
        .map(|&(action, f)| {
            let count = f.m * m + f.k * cp.k1 + f.d * diff + f.e * excess + f.c;
            u64::try_from(count).map_err(|_| {
                Error::Infeasible(format!(
                    "negative segment count {count} in region {:?}",
                    profile.region
                ))
            })
            .map(|c| ControlSegment::new(action, c))
        })
        .collect()
}

fn mirror(segs: &mut [ControlSegment]) {
    for seg in segs {
        seg.action = seg.action.mirrored();
    }
}

/// A compact trajectory of exactly `ℓ` steps from `c` to `c'`.
pub fn construct_1d(c: Config1d, c_prime: Config1d, ell: i64) -> Result<CompactTrajectory> {
    let set = feasible_lengths_1d(c, c_prime);
    construct_1d_in(c, c_prime, ell, &set)
}

fn construct_1d_in(
    c: Config1d,
    c_prime: Config1d,
    ell: i64,
    feasible: &MultiInterval,
) -> Result<CompactTrajectory> {
    if !feasible.contains(ell) {
        return Err(Error::Infeasible(format!(
            "length {ell} from {}@{} to {}@{} is not in {feasible}",
            c.x, c.s, c_prime.x, c_prime.s
        )));
    }
    if ell == 0 {
        return Ok(CompactTrajectory::new(c, []));
    }
    let (tag, core) = reduce(c, c_prime);
    let tr = tag.transform;
    let core_len = ell - tr.fixed_steps();
    let mut core_segs = construct_core(core.s, core.s_prime, core.delta, core_len)?;
    if tr.core_reflected {
        mirror(&mut core_segs);
    }
    let mut segs: Vec<ControlSegment> = Vec::with_capacity(core_segs.len() + 2);
    if let Some(p) = tr.prefix {
        segs.push(ControlSegment::new(p.action, p.steps as u64));
    }
    segs.extend(core_segs);
    if let Some(q) = tr.suffix {
        segs.push(ControlSegment::new(q.action, q.steps as u64));
    }
    if tr.reflected {
        mirror(&mut segs);
    }
    let ct = CompactTrajectory::new(c, segs);
    debug_assert_eq!(ct.end(), c_prime);
    debug_assert_eq!(ct.len() as i64, ell);
    Ok(ct)
}

/// A branching trajectory with its per-dimension compact form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Construction {
    pub length: i64,
    pub dims: Vec<CompactTrajectory>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<Trajectory>,
}

/// Per-dimension witnesses of length `ℓ` (the branching cost when absent).
pub fn construct_compact(
    c: &Configuration,
    c_prime: &Configuration,
    ell: Option<i64>,
) -> Result<(i64, Vec<CompactTrajectory>)> {
    let sets = crate::branching_cost::feasible_lengths(c, c_prime)?;
    let ell = match ell {
        Some(l) => l,
        None => {
            let refs: Vec<&MultiInterval> = sets.iter().collect();
            MultiInterval::min_common(&refs).expect("unbounded tails intersect")
        }
    };
    let dims = sets
        .iter()
        .enumerate()
        .map(|(j, set)| {
            construct_1d_in(c.axis(j), c_prime.axis(j), ell, set).map_err(|e| match e {
                Error::Infeasible(msg) => {
                    Error::Infeasible(format!("dimension {j}: {msg}"))
                }
                other => other,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((ell, dims))
}

/// Witness trajectory in `d` dimensions, assembled from 1D witnesses.
pub fn construct(
    c: &Configuration,
    c_prime: &Configuration,
    ell: Option<i64>,
) -> Result<Construction> {
    let (length, dims) = construct_compact(c, c_prime, ell)?;
    let points = assemble(&dims)?;
    Ok(Construction {
        length,
        dims,
        points: Some(points),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::{expand, validate_trajectory};
    use proptest::prelude::*;

    fn speeds(ct: &CompactTrajectory) -> Vec<i64> {
        ct.states()[1..].iter().map(|c| c.s).collect()
    }

    /// Every speed sequence of length `t` from `s` ending at `sp`.
    fn sequences(s: i64, sp: i64, t: usize) -> Vec<Vec<i64>> {
        fn rec(cur: i64, left: usize, sp: i64, acc: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
            if left == 0 {
                if cur == sp {
                    out.push(acc.clone());
                }
                return;
            }
            if (cur - sp).unsigned_abs() as usize > left {
                return;
            }
            for d in -1..=1 {
                acc.push(cur + d);
                rec(cur + d, left - 1, sp, acc, out);
                acc.pop();
            }
        }
        let mut out = Vec::new();
        rec(s, t, sp, &mut Vec::new(), &mut out);
        out
    }

    #[test]
    fn region_bounds_examples() {
        let p = region_bounds(3, 3, 4).unwrap();
        assert_eq!((p.d_rmin, p.d_rmax, p.alpha2), (12, 12, 0));
        let p = region_bounds(0, 0, 7).unwrap();
        assert_eq!((p.d_rmin, p.d_rmax), (0, 0));
        assert!(matches!(region_bounds(0, 4, 3), Err(Error::Domain(_))));
    }

    #[test]
    fn region_bounds_against_ramp_enumeration() {
        // the two ramps are the sequences holding one end speed the longest
        for s in 0i64..=4 {
            for sp in 0i64..=4 {
                let diff = (sp - s).unsigned_abs() as usize;
                for t in diff..=8 {
                    let all = sequences(s, sp, t);
                    let step = (sp - s).signum();
                    let ramp: Vec<i64> = (1..=diff as i64).map(|i| s + step * i).collect();
                    let hold_first: Vec<i64> =
                        std::iter::repeat_n(s, t - diff).chain(ramp.iter().copied()).collect();
                    let hold_last: Vec<i64> =
                        ramp.iter().copied().chain(std::iter::repeat_n(sp, t - diff)).collect();
                    assert!(all.contains(&hold_first) && all.contains(&hold_last));
                    let (a, b) = (hold_first.iter().sum::<i64>(), hold_last.iter().sum::<i64>());
                    let p = region_bounds(s, sp, t as i64).unwrap();
                    assert_eq!((p.d_rmin, p.d_rmax), (a.min(b), a.max(b)), "{s}->{sp} t={t}");
                    let sums: Vec<i64> = all.iter().map(|q| q.iter().sum()).collect();
                    assert!(*sums.iter().min().unwrap() <= p.d_rmin);
                    assert!(p.d_rmax <= *sums.iter().max().unwrap());
                }
            }
        }
        let p = region_bounds(6, 5, 6).unwrap();
        assert_eq!((p.alpha2, p.d_rmin, p.d_rmax), (5, 30, 35));
    }

    #[test]
    fn layer_area_examples() {
        assert_eq!(layer_area(0, 16, 6, 5, Region::A).unwrap(), 0);
        assert_eq!(layer_area(3, 16, 6, 5, Region::A).unwrap(), 36);
        // m = 14 even: maximum at k = 7
        assert_eq!(layer_area(7, 15, 6, 5, Region::A).unwrap(), 14 * 14 / 4);
        assert_eq!(layer_area(2, 10, 2, 5, Region::B).unwrap(), 14);
        assert!(matches!(layer_area(9, 16, 6, 5, Region::C), Err(Error::Domain(_))));
    }

    #[test]
    fn checkpoints_examples() {
        let (p, cp) = solve_checkpoints(24, 16, 6, 5).unwrap();
        assert_eq!(p.region, Region::A);
        assert_eq!(p.deficit, 56);
        assert_eq!(cp, Checkpoints { k1: 7, k2: 8, exact: true });

        // δ = d_rmin: nothing removed
        let (p, cp) = solve_checkpoints(30, 6, 6, 5).unwrap();
        assert_eq!((p.region, p.deficit, cp.k1), (Region::A, 0, 0));
        let segs = construct_core(6, 5, 30, 6).unwrap();
        let ct = CompactTrajectory::new(Config1d::new(0, 6), segs);
        assert_eq!(
            ct.segments,
            vec![
                ControlSegment::new(Action::Decelerate, 1),
                ControlSegment::new(Action::Hold, 5)
            ]
        );

        // δ = δ_max: full plateau of whole layers
        let hi = delta_max_unchecked(2, 3, 9);
        let (p, cp) = solve_checkpoints(hi, 9, 2, 3).unwrap();
        assert_eq!(p.region, Region::C);
        assert_eq!(cp.k1, 4);
        assert!(matches!(solve_checkpoints(hi + 1, 9, 2, 3), Err(Error::Infeasible(_))));
    }

    #[test]
    fn checkpoints_match_exhaustive_witnesses() {
        // k1 is the least number of whole layers, so no witness with fewer
        // layers can exist in regions A and C
        for s in 0i64..=3 {
            for sp in 0i64..=3 {
                let diff = (sp - s).abs();
                for ell in diff..=9 {
                    let m = ell - diff;
                    for delta in delta_min_unchecked(s, sp, ell)..=delta_max_unchecked(s, sp, ell) {
                        if delta < 0 {
                            continue;
                        }
                        let (p, cp) = solve_checkpoints(delta, ell, s, sp).unwrap();
                        if p.region != Region::B {
                            assert!(cp.k1 * m - cp.k1 * cp.k1 >= p.deficit);
                            assert!(cp.k1 == 0 || (cp.k1 - 1) * m - (cp.k1 - 1).pow(2) < p.deficit);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn construct_1d_examples() {
        let ct = construct_1d(Config1d::new(0, 6), Config1d::new(24, 5), 6).unwrap();
        assert_eq!(speeds(&ct), vec![5, 4, 3, 3, 4, 5]);
        let ct = construct_1d(Config1d::new(0, 6), Config1d::new(24, 5), 16).unwrap();
        assert_eq!(
            speeds(&ct),
            vec![5, 4, 3, 2, 1, 0, -1, -2, -2, -1, 0, 1, 2, 3, 4, 5]
        );
        let ct = construct_1d(Config1d::new(0, 2), Config1d::new(6, 2), 3).unwrap();
        assert_eq!(ct.segments, vec![ControlSegment::new(Action::Hold, 3)]);
        let ct = construct_1d(Config1d::new(0, 0), Config1d::new(24, 0), 10).unwrap();
        assert_eq!(ct.len(), 10);
        assert_eq!(ct.end(), Config1d::new(24, 0));
        assert!(matches!(
            construct_1d(Config1d::new(0, 6), Config1d::new(24, 5), 7),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn construct_examples() {
        let c = Configuration::new(vec![1, 2], vec![1, 2]).unwrap();
        let cp = Configuration::new(vec![12, 3], vec![2, 1]).unwrap();
        let out = construct(&c, &cp, Some(5)).unwrap();
        let t = out.points.unwrap();
        assert_eq!(t.len(), 5);
        assert!(validate_trajectory(&t).unwrap());
        assert_eq!(t.last().unwrap(), &cp);

        let c = Configuration::new(vec![1, 3], vec![0, 3]).unwrap();
        let cp = Configuration::new(vec![7, 6], vec![0, 3]).unwrap();
        let out = construct(&c, &cp, None).unwrap();
        assert_eq!(out.length, 11);
        let t = out.points.unwrap();
        assert!(validate_trajectory(&t).unwrap());
        assert_eq!(t.first().unwrap(), &c);
        assert_eq!(t.last().unwrap(), &cp);

        let out = construct(&c, &c, Some(0)).unwrap();
        assert_eq!(out.points.unwrap().len(), 0);

        match construct(&c, &cp, Some(7)) {
            Err(Error::Infeasible(msg)) => assert!(msg.contains("dimension 1")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn completeness_in_a_small_box() {
        for x in -8i64..=8 {
            for s in -4i64..=4 {
                for sp in -4i64..=4 {
                    let (c, cp) = (Config1d::new(0, s), Config1d::new(x, sp));
                    for ell in feasible_lengths_1d(c, cp).members_up_to(30) {
                        let ct = construct_1d(c, cp, ell).unwrap();
                        assert!(ct.segments.len() <= 5, "{c:?}->{cp:?} ℓ={ell}: {ct}");
                        assert_eq!(ct.len() as i64, ell);
                        assert_eq!(ct.end(), cp);
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn witnesses_are_valid(
            x in -30i64..30, xp in -30i64..30, s in -6i64..6, sp in -6i64..6, extra in 0i64..30,
        ) {
            let (c, cp) = (Config1d::new(x, s), Config1d::new(xp, sp));
            let set = feasible_lengths_1d(c, cp);
            let ell = set.next_at_or_after(set.min().unwrap() + extra).unwrap();
            let ct = construct_1d(c, cp, ell).unwrap();
            prop_assert!(ct.segments.len() <= 5);
            let t = expand(&ct);
            prop_assert!(validate_trajectory(&t).unwrap());
            prop_assert_eq!(t.len() as i64, ell);
            let sum: i64 = speeds(&ct).iter().sum();
            prop_assert_eq!(sum, xp - x);
        }

        #[test]
        fn region_agrees_with_curves(s in 0i64..8, sp in 0i64..8, extra in 0i64..20, frac in 0.0f64..=1.0) {
            let ell = (sp - s).abs() + extra;
            let lo = delta_min_unchecked(s, sp, ell).max(0);
            let hi = delta_max_unchecked(s, sp, ell);
            prop_assume!(lo <= hi);
            let delta = lo + ((hi - lo) as f64 * frac) as i64;
            let (p, _) = solve_checkpoints(delta, ell, s, sp).unwrap();
            let expected = if delta <= p.d_rmin {
                Region::A
            } else if delta <= p.d_rmax {
                Region::B
            } else {
                Region::C
            };
            prop_assert_eq!(p.region, expected);
            prop_assert!(lo <= p.d_rmin.max(lo) && p.d_rmin <= p.d_rmax && p.d_rmax <= hi);
        }
    }
}
