//! Instance generators and the analytical costs of the slope family.
//!
//! `gen_random` draws from SplitMix64 seeded with `seed`. Each coordinate
//! takes one 64-bit output `z`, rejected while `z ≥ ⌊2^64 / (L+1)⌋·(L+1)`
//! and otherwise reduced as `z mod (L+1)`. Points are drawn in order,
//! coordinates of a point in axis order, so any language can replay them.

use num_integer::Integer;
use num_rational::Ratio;
use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::{Deserialize, Serialize};

use crate::branching_cost::ceil_sqrt;
use crate::multipoint::Instance;
use crate::{Error, Result};

/// Cities `(i·δ, -i)` for `i = 0..=n`, and the speed multiplier `k` of the
/// turning trajectories compared against them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlopeFamily {
    pub n: i64,
    pub delta: i64,
    pub k: i64,
}

impl SlopeFamily {
    /// `δ ≥ 7` is where non-turning trajectories cannot reach x-speed `δ`.
    pub fn new(n: i64, delta: i64, k: i64) -> Result<Self> {
        if delta < 7 || k < 1 || n < 0 {
            return Err(Error::Domain(format!(
                "slope family needs n ≥ 0, δ ≥ 7, k ≥ 1; got n={n}, δ={delta}, k={k}"
            )));
        }
        Ok(SlopeFamily { n, delta, k })
    }

    pub fn instance(&self) -> Instance {
        gen_slope(self.n, self.delta).expect("validated on construction")
    }

    pub fn turning_beats_non_turning(&self) -> bool {
        tu_cost(self.n, self.k, self.delta).unwrap() < ntu_lower_bound(self.n, self.delta).unwrap()
    }
}

fn uniform_below(rng: &mut SplitMix64, bound: u64) -> u64 {
    let zone = u64::MAX / bound * bound;
    loop {
        let z = rng.next_u64();
        if z < zone {
            return z % bound;
        }
    }
}

/// `n` points i.i.d. uniform on `{0..=l}^d`.
pub fn gen_random(n: usize, l: i64, d: usize, seed: u64) -> Result<Instance> {
    if n == 0 || l < 1 || d == 0 {
        return Err(Error::InvalidInput(format!(
            "random instances need n ≥ 1, L ≥ 1, d ≥ 1; got n={n}, L={l}, d={d}"
        )));
    }
    let mut rng = SplitMix64::seed_from_u64(seed);
    let points = (0..n)
        .map(|_| {
            (0..d)
                .map(|_| uniform_below(&mut rng, l as u64 + 1) as i64)
                .collect()
        })
        .collect();
    Instance::new(points, false)
}

pub fn gen_slope(n: i64, delta: i64) -> Result<Instance> {
    if delta < 1 || n < 0 {
        return Err(Error::Domain(format!("slope needs n ≥ 0 and δ ≥ 1; got n={n}, δ={delta}")));
    }
    Instance::new((0..=n).map(|i| vec![i * delta, -i]).collect(), false)
}

/// `δ/(δ-1)·n + δ - 2`, a lower bound on every non-turning trajectory.
pub fn ntu_lower_bound(n: i64, delta: i64) -> Result<Ratio<i64>> {
    if delta < 2 {
        return Err(Error::Domain(format!("δ = {delta} must be at least 2")));
    }
    Ok(Ratio::new(delta * n, delta - 1) + (delta - 2))
}

fn sqrt_term(k: i64, delta: i64) -> i64 {
    let kd = k * delta;
    ceil_sqrt(kd * (kd - 1) / 2)
}

/// `n/k + 2kδ + 4⌈√(kδ(kδ-1)/2)⌉ + 2`, the length of the turning
/// trajectory capped at x-speed `kδ`.
pub fn tu_cost(n: i64, k: i64, delta: i64) -> Result<Ratio<i64>> {
    if k < 1 || delta < 1 {
        return Err(Error::Domain(format!("need k ≥ 1 and δ ≥ 1; got k={k}, δ={delta}")));
    }
    Ok(Ratio::new(n, k) + 2 * k * delta + 4 * sqrt_term(k, delta) + 2)
}

/// Smallest `n` with `tu_cost(n, k, δ) < ntu_lower_bound(n, δ)`.
///
/// The inequality is linear in `n`:
/// `n·(kδ-δ+1)/(k(δ-1)) > 4⌈√(kδ(kδ-1)/2)⌉ + 4 + δ(2k-1)`.
pub fn crossover_n0(k: i64, delta: i64) -> Result<i64> {
    if k < 1 || delta < 2 {
        return Err(Error::Domain(format!("need k ≥ 1 and δ ≥ 2; got k={k}, δ={delta}")));
    }
    let rhs = 4 * sqrt_term(k, delta) + 4 + delta * (2 * k - 1);
    let num = rhs * k * (delta - 1);
    let den = k * delta - delta + 1;
    Ok(Integer::div_floor(&num, &den) + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> Ratio<i64> {
        Ratio::new(n, d)
    }

    #[test]
    fn slope_examples() {
        assert_eq!(gen_slope(2, 7).unwrap().points, vec![vec![0, 0], vec![7, -1], vec![14, -2]]);
        assert_eq!(gen_slope(0, 7).unwrap().points, vec![vec![0, 0]]);
        assert_eq!(gen_slope(60, 7).unwrap().n(), 61);
        assert!(SlopeFamily::new(10, 6, 1).is_err());
        assert_eq!(SlopeFamily::new(3, 7, 1).unwrap().instance(), gen_slope(3, 7).unwrap());
    }

    #[test]
    fn random_examples() {
        assert_eq!(gen_random(1, 5, 2, 0).unwrap().n(), 1);
        assert_eq!(gen_random(8, 30, 2, 9).unwrap(), gen_random(8, 30, 2, 9).unwrap());
        assert_ne!(gen_random(8, 30, 2, 9).unwrap(), gen_random(8, 30, 2, 10).unwrap());
        let inst = gen_random(10, 100, 2, 42).unwrap();
        assert_eq!(inst.n(), 10);
        assert!(inst.points.iter().flatten().all(|&x| (0..=100).contains(&x)));
        assert!(gen_random(0, 5, 2, 0).is_err());
    }

    #[test]
    fn random_stream_is_pinned() {
        // SplitMix64 reference outputs for seed 1234567
        let mut rng = SplitMix64::seed_from_u64(1234567);
        let outs: Vec<u64> = (0..3).map(|_| rand_core::RngCore::next_u64(&mut rng)).collect();
        assert_eq!(outs, vec![6457827717110365317, 3203168211198807973, 9817491932198370423]);
        let inst = gen_random(3, 99, 1, 1234567).unwrap();
        let expected: Vec<Vec<i64>> = outs.iter().map(|z| vec![(z % 100) as i64]).collect();
        assert_eq!(inst.points, expected);
    }

    #[test]
    fn analytical_examples() {
        assert_eq!(ntu_lower_bound(60, 7).unwrap(), r(75, 1));
        assert_eq!(ntu_lower_bound(0, 7).unwrap(), r(5, 1));
        assert_eq!(ntu_lower_bound(186, 7).unwrap(), r(222, 1));
        assert_eq!(ntu_lower_bound(187, 7).unwrap(), r(1339, 6));
        assert!(ntu_lower_bound(5, 1).is_err());
        assert_eq!(tu_cost(60, 1, 7).unwrap(), r(96, 1));
        assert_eq!(tu_cost(187, 1, 7).unwrap(), r(223, 1));
        assert_eq!(tu_cost(10, 1, 1).unwrap(), r(14, 1));
        assert_eq!(tu_cost(3, 2, 7).unwrap(), r(3, 2) + 28 + 4 * 10 + 2);
    }

    #[test]
    fn crossover_examples() {
        assert_eq!(crossover_n0(1, 7).unwrap(), 187);
        assert!(tu_cost(187, 1, 7).unwrap() < ntu_lower_bound(187, 7).unwrap());
        assert_eq!(tu_cost(186, 1, 7).unwrap(), ntu_lower_bound(186, 7).unwrap());
        assert!(crossover_n0(0, 7).is_err());
        assert!(crossover_n0(1, 1).is_err());
    }

    fn scan_n0(k: i64, delta: i64) -> i64 {
        (0..)
            .find(|&n| tu_cost(n, k, delta).unwrap() < ntu_lower_bound(n, delta).unwrap())
            .unwrap()
    }

    #[test]
    fn crossover_matches_scan() {
        for k in 1..=4 {
            for delta in 2..=20 {
                let n0 = crossover_n0(k, delta).unwrap();
                assert_eq!(n0, scan_n0(k, delta), "k={k} δ={delta}");
            }
        }
        assert_eq!(crossover_n0(2, 7).unwrap(), scan_n0(2, 7));
    }

    #[test]
    fn crossover_is_quadratic() {
        // calibrated over the range below: the largest ratio is 4.04 at k=1, δ=5
        const C: i64 = 5;
        for k in 1..=4 {
            for delta in 2..=20 {
                assert!(crossover_n0(k, delta).unwrap() <= C * k * k * delta * delta);
            }
        }
    }

    proptest! {
        #[test]
        fn turning_wins_beyond_crossover(k in 1i64..=4, delta in 2i64..=20, extra in 0i64..500) {
            let n0 = crossover_n0(k, delta).unwrap();
            let n = n0 + extra;
            prop_assert!(tu_cost(n, k, delta).unwrap() < ntu_lower_bound(n, delta).unwrap());
            prop_assert!(tu_cost(n0 - 1, k, delta).unwrap() >= ntu_lower_bound(n0 - 1, delta).unwrap());
        }

        #[test]
        fn random_points_stay_in_box(n in 1usize..20, l in 1i64..50, d in 1usize..4, seed in any::<u64>()) {
            let inst = gen_random(n, l, d, seed).unwrap();
            prop_assert_eq!(inst.d, d);
            prop_assert!(inst.points.iter().flatten().all(|&x| (0..=l).contains(&x)));
        }
    }
}
