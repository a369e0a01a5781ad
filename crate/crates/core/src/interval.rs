//! Sets of non-negative trajectory lengths.
//!
//! A [`MultiInterval`] is a finite union of closed integer intervals plus an
//! optional unbounded tail `[t, ∞)`. It is always kept in canonical form:
//! components are sorted, pairwise disjoint, and separated by gaps of at
//! least one missing integer (adjacent components are merged).

use std::fmt;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "RawMultiInterval", into = "RawMultiInterval")]
pub struct MultiInterval {
    bounded: SmallVec<[(i64, i64); 2]>,
    tail: Option<i64>,
}

#[derive(Serialize, Deserialize)]
struct RawMultiInterval {
    bounded: Vec<[i64; 2]>,
    tail: Option<i64>,
}

impl TryFrom<RawMultiInterval> for MultiInterval {
    type Error = String;

    fn try_from(raw: RawMultiInterval) -> Result<Self, Self::Error> {
        if let Some(&[lo, hi]) = raw.bounded.iter().find(|[lo, hi]| lo > hi) {
            return Err(format!("interval [{lo}, {hi}] is empty"));
        }
        Ok(MultiInterval::from_parts(
            raw.bounded.into_iter().map(|[lo, hi]| (lo, hi)),
            raw.tail,
        ))
    }
}

impl From<MultiInterval> for RawMultiInterval {
    fn from(m: MultiInterval) -> Self {
        RawMultiInterval {
            bounded: m.bounded.iter().map(|&(lo, hi)| [lo, hi]).collect(),
            tail: m.tail,
        }
    }
}

impl MultiInterval {
    pub fn empty() -> Self {
        Self::default()
    }

    /// `[from, ∞)`.
    pub fn from_tail(from: i64) -> Self {
        MultiInterval {
            bounded: SmallVec::new(),
            tail: Some(from),
        }
    }

    /// `[lo, hi]`, or the empty set when `lo > hi`.
    pub fn closed(lo: i64, hi: i64) -> Self {
        let mut bounded = SmallVec::new();
        if lo <= hi {
            bounded.push((lo, hi));
        }
        MultiInterval {
            bounded,
            tail: None,
        }
    }

    /// Builds the canonical form of an arbitrary union. Empty pieces
    /// (`lo > hi`) are ignored.
    pub fn from_parts<I>(pieces: I, tail: Option<i64>) -> Self
    where
        I: IntoIterator<Item = (i64, i64)>,
    {
        let mut pieces: SmallVec<[(i64, i64); 4]> =
            pieces.into_iter().filter(|(lo, hi)| lo <= hi).collect();
        pieces.sort_unstable();
        let mut bounded: SmallVec<[(i64, i64); 2]> = SmallVec::new();
        for (lo, hi) in pieces {
            match bounded.last_mut() {
                Some(last) if lo <= last.1.saturating_add(1) => last.1 = last.1.max(hi),
                _ => bounded.push((lo, hi)),
            }
        }
        let mut tail = tail;
        if let Some(mut t) = tail {
            while let Some(&(lo, hi)) = bounded.last() {
                if hi.saturating_add(1) >= t {
                    t = t.min(lo);
                    bounded.pop();
                } else {
                    break;
                }
            }
            tail = Some(t);
        }
        MultiInterval { bounded, tail }
    }

    pub fn bounded(&self) -> &[(i64, i64)] {
        &self.bounded
    }

    pub fn tail(&self) -> Option<i64> {
        self.tail
    }

    pub fn is_empty(&self) -> bool {
        self.bounded.is_empty() && self.tail.is_none()
    }

    /// Number of maximal components, counting the tail.
    pub fn component_count(&self) -> usize {
        self.bounded.len() + usize::from(self.tail.is_some())
    }

    pub fn contains(&self, t: i64) -> bool {
        self.tail.is_some_and(|tail| t >= tail)
            || self.bounded.iter().any(|&(lo, hi)| lo <= t && t <= hi)
    }

    pub fn min(&self) -> Option<i64> {
        self.bounded.first().map(|c| c.0).or(self.tail)
    }

    /// Smallest member `>= t`.
    pub fn next_at_or_after(&self, t: i64) -> Option<i64> {
        for &(lo, hi) in &self.bounded {
            if t <= hi {
                return Some(lo.max(t));
            }
        }
        self.tail.map(|tail| tail.max(t))
    }

    /// Smallest member strictly greater than zero.
    pub fn min_positive(&self) -> Option<i64> {
        self.next_at_or_after(1)
    }

    /// `I + k`: every bound moved by `k`.
    pub fn shift(&self, k: i64) -> Self {
        MultiInterval {
            bounded: self.bounded.iter().map(|&(lo, hi)| (lo + k, hi + k)).collect(),
            tail: self.tail.map(|t| t + k),
        }
    }

    pub fn union(&self, other: &Self) -> Self {
        let tail = match (self.tail, other.tail) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        Self::from_parts(
            self.bounded.iter().chain(other.bounded.iter()).copied(),
            tail,
        )
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let mut pieces: SmallVec<[(i64, i64); 4]> = SmallVec::new();
        for &(a_lo, a_hi) in &self.bounded {
            for &(b_lo, b_hi) in &other.bounded {
                pieces.push((a_lo.max(b_lo), a_hi.min(b_hi)));
            }
            if let Some(t) = other.tail {
                pieces.push((a_lo.max(t), a_hi));
            }
        }
        if let Some(t) = self.tail {
            for &(b_lo, b_hi) in &other.bounded {
                pieces.push((b_lo.max(t), b_hi));
            }
        }
        let tail = match (self.tail, other.tail) {
            (Some(a), Some(b)) => Some(a.max(b)),
            _ => None,
        };
        Self::from_parts(pieces, tail)
    }

    /// Intersection of many sets. An empty input yields the empty set.
    pub fn intersect_all<'a, I>(sets: I) -> Self
    where
        I: IntoIterator<Item = &'a MultiInterval>,
    {
        let mut iter = sets.into_iter();
        let Some(first) = iter.next() else {
            return Self::empty();
        };
        iter.fold(first.clone(), |acc, s| acc.intersection(s))
    }

    /// Minimum of the intersection of `sets` without materializing it.
    ///
    /// Endpoint scan: the candidate only ever moves forward to the next
    /// member of some set, so the loop ends after at most one visit per
    /// component.
    pub fn min_common(sets: &[&MultiInterval]) -> Option<i64> {
        let mut t = sets.iter().map(|s| s.min()).try_fold(i64::MIN, |acc, m| {
            m.map(|m| acc.max(m))
        })?;
        loop {
            let mut moved = false;
            for s in sets {
                let next = s.next_at_or_after(t)?;
                if next != t {
                    t = next;
                    moved = true;
                }
            }
            if !moved {
                return Some(t);
            }
        }
    }

    /// Members up to and including `limit`, in increasing order.
    pub fn members_up_to(&self, limit: i64) -> impl Iterator<Item = i64> + '_ {
        let bounded = self
            .bounded
            .iter()
            .flat_map(move |&(lo, hi)| lo..=hi.min(limit));
        let tail = self.tail.into_iter().flat_map(move |t| t..=limit);
        bounded.chain(tail)
    }
}

impl fmt::Display for MultiInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "∅");
        }
        let mut first = true;
        for &(lo, hi) in &self.bounded {
            if !first {
                write!(f, " ∪ ")?;
            }
            write!(f, "[{lo},{hi}]")?;
            first = false;
        }
        if let Some(t) = self.tail {
            if !first {
                write!(f, " ∪ ")?;
            }
            write!(f, "[{t},∞)")?;
        }
        Ok(())
    }
}

impl fmt::Debug for MultiInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
