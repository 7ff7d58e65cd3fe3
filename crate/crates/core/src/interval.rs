use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Finite union of disjoint, sorted intervals in `[0, ∞)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalSet<T> {
    intervals: Vec<(T, T)>,
}

impl<T: Scalar> IntervalSet<T> {
    pub fn empty() -> Self {
        Self { intervals: Vec::new() }
    }

    pub fn single(a: T, b: T) -> Result<Self> {
        Self::new(vec![(a, b)])
    }

    /// Validates `0 ≤ a_j < b_j < a_{j+1}`.
    pub fn new(intervals: Vec<(T, T)>) -> Result<Self> {
        for (j, (a, b)) in intervals.iter().enumerate() {
            if !(a.is_finite() && b.is_finite()) {
                return Err(Error::Data(format!("interval {j} has a non-finite endpoint")));
            }
            if *a < T::zero() || a >= b {
                return Err(Error::Data(format!("interval {j} = ({a}, {b}) is not 0 <= a < b")));
            }
            if j > 0 && intervals[j - 1].1 >= *a {
                return Err(Error::Data(format!("intervals {} and {j} overlap or are unsorted", j - 1)));
            }
        }
        Ok(Self { intervals })
    }

    /// Sorts and merges arbitrary intervals into a valid set.
    pub fn from_unsorted(mut raw: Vec<(T, T)>) -> Result<Self> {
        raw.retain(|(a, b)| b > a);
        raw.sort_by(|x, y| x.0.partial_cmp(&y.0).expect("finite endpoints"));
        let mut merged: Vec<(T, T)> = Vec::with_capacity(raw.len());
        for (a, b) in raw {
            match merged.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => merged.push((a, b)),
            }
        }
        Self::new(merged)
    }

    pub fn intervals(&self) -> &[(T, T)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn inf(&self) -> Option<T> {
        self.intervals.first().map(|iv| iv.0)
    }

    pub fn sup(&self) -> Option<T> {
        self.intervals.last().map(|iv| iv.1)
    }

    pub fn contains(&self, r: T) -> bool {
        self.intervals.iter().any(|(a, b)| r >= *a && r <= *b)
    }

    pub fn lebesgue_measure(&self) -> T {
        self.intervals.iter().map(|(a, b)| *b - *a).sum()
    }

    /// Measure with respect to `r^{d-1} dr`.
    pub fn weighted_measure(&self, d: u32) -> T {
        let di = d as i32;
        let dd = T::lit(f64::from(d));
        self.intervals
            .iter()
            .map(|(a, b)| (b.powi(di) - a.powi(di)) / dd)
            .sum()
    }

    /// Whether the set misses `[0, radius]`.
    pub fn avoids_ball(&self, radius: T) -> bool {
        self.inf().is_none_or(|a| a >= radius)
    }

    pub fn endpoints(&self) -> Vec<T> {
        self.intervals.iter().flat_map(|(a, b)| [*a, *b]).collect()
    }
}
