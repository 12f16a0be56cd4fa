use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite union of disjoint half-open intervals `[a, b)` inside `[0, 1]`.
///
/// The right end point 1 is treated as belonging to an interval ending at 1.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalSet {
    intervals: Vec<(f64, f64)>,
}

impl IntervalSet {
    pub fn new(mut intervals: Vec<(f64, f64)>) -> Result<Self> {
        for &(a, b) in &intervals {
            if !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&b) || !(a <= b) {
                return Err(Error::domain(format!(
                    "interval [{a}, {b}) is not inside [0, 1]"
                )));
            }
        }
        intervals.retain(|&(a, b)| b > a);
        intervals.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(intervals.len());
        for (a, b) in intervals {
            match merged.last_mut() {
                Some(last) if a < last.1 => {
                    return Err(Error::domain(format!("intervals overlap at {a}")));
                }
                Some(last) if a == last.1 => last.1 = b,
                _ => merged.push((a, b)),
            }
        }
        Ok(IntervalSet { intervals: merged })
    }

    pub fn unit() -> Self {
        IntervalSet {
            intervals: vec![(0.0, 1.0)],
        }
    }

    pub fn interval(a: f64, b: f64) -> Result<Self> {
        Self::new(vec![(a, b)])
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(|(a, b)| b - a).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals
            .iter()
            .any(|&(a, b)| (a <= x && x < b) || (x == 1.0 && b == 1.0))
    }

    /// Length of the overlap with `[lo, hi)`.
    pub fn overlap(&self, lo: f64, hi: f64) -> f64 {
        self.intervals
            .iter()
            .map(|&(a, b)| (b.min(hi) - a.max(lo)).max(0.0))
            .sum()
    }

    pub fn is_disjoint(&self, other: &IntervalSet) -> bool {
        other
            .intervals
            .iter()
            .all(|&(a, b)| self.overlap(a, b) == 0.0)
    }

    pub fn union(&self, other: &IntervalSet) -> Result<IntervalSet> {
        let mut all = self.intervals.clone();
        all.extend_from_slice(&other.intervals);
        IntervalSet::new(all)
    }

    /// The point sitting at fraction `q ∈ [0, 1)` of the set's measure.
    pub fn point_at_fraction(&self, q: f64) -> f64 {
        let mut target = q * self.measure();
        for &(a, b) in &self.intervals {
            let len = b - a;
            if target < len {
                return a + target;
            }
            target -= len;
        }
        self.intervals.last().map(|&(_, b)| b).unwrap_or(0.0)
    }
}

/// Partition of the label space into classes, each a finite union of intervals.
///
/// Built from breakpoints `0 = b0 < b1 < … < bn = 1` and a class id per
/// interval `[b_{i-1}, b_i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PartitionRepr", into = "PartitionRepr")]
pub struct LabelPartition {
    breakpoints: Vec<f64>,
    interval_class: Vec<usize>,
    #[serde(skip)]
    classes: Vec<IntervalSet>,
}

#[derive(Serialize, Deserialize)]
struct PartitionRepr {
    breakpoints: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    classes: Option<Vec<usize>>,
}

impl TryFrom<PartitionRepr> for LabelPartition {
    type Error = Error;
    fn try_from(r: PartitionRepr) -> Result<Self> {
        match r.classes {
            Some(c) => LabelPartition::with_classes(r.breakpoints, c),
            None => LabelPartition::from_breakpoints(r.breakpoints),
        }
    }
}

impl From<LabelPartition> for PartitionRepr {
    fn from(p: LabelPartition) -> Self {
        let identity = p.interval_class.iter().enumerate().all(|(i, &c)| i == c);
        PartitionRepr {
            breakpoints: p.breakpoints,
            classes: (!identity).then_some(p.interval_class),
        }
    }
}

pub(crate) fn validate_breakpoints(breaks: &[f64]) -> Result<()> {
    if breaks.len() < 2 {
        return Err(Error::Partition("need at least two breakpoints".into()));
    }
    if breaks[0] != 0.0 || *breaks.last().unwrap() != 1.0 {
        return Err(Error::Partition(format!(
            "breakpoints must start at 0 and end at 1, got {breaks:?}"
        )));
    }
    if breaks.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Partition(format!(
            "breakpoints not strictly increasing: {breaks:?}"
        )));
    }
    Ok(())
}

/// Index `i` with `breaks[i] <= x < breaks[i+1]`, the last interval closed at 1.
pub(crate) fn locate(breaks: &[f64], x: f64) -> usize {
    let n = breaks.len() - 1;
    let i = breaks.partition_point(|&b| b <= x);
    i.saturating_sub(1).min(n - 1)
}

impl LabelPartition {
    /// One class per interval.
    pub fn from_breakpoints(breakpoints: Vec<f64>) -> Result<Self> {
        let n = breakpoints.len().saturating_sub(1);
        Self::with_classes(breakpoints, (0..n).collect())
    }

    pub fn with_classes(breakpoints: Vec<f64>, interval_class: Vec<usize>) -> Result<Self> {
        validate_breakpoints(&breakpoints)?;
        if interval_class.len() + 1 != breakpoints.len() {
            return Err(Error::Partition(format!(
                "{} intervals but {} class ids",
                breakpoints.len() - 1,
                interval_class.len()
            )));
        }
        let n_classes = interval_class.iter().max().map_or(0, |m| m + 1);
        let mut members: Vec<Vec<(f64, f64)>> = vec![Vec::new(); n_classes];
        for (i, &c) in interval_class.iter().enumerate() {
            members[c].push((breakpoints[i], breakpoints[i + 1]));
        }
        let classes = members
            .into_iter()
            .enumerate()
            .map(|(c, m)| {
                if m.is_empty() {
                    Err(Error::Partition(format!("class {c} is empty")))
                } else {
                    IntervalSet::new(m)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(LabelPartition {
            breakpoints,
            interval_class,
            classes,
        })
    }

    /// The trivial partition `{[0, 1]}`.
    pub fn whole() -> Self {
        Self::from_breakpoints(vec![0.0, 1.0]).expect("valid")
    }

    pub fn uniform(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Partition("need at least one block".into()));
        }
        Self::from_breakpoints(equipartition(k))
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn interval_classes(&self) -> &[usize] {
        &self.interval_class
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn class(&self, c: usize) -> &IntervalSet {
        &self.classes[c]
    }

    pub fn classes(&self) -> &[IntervalSet] {
        &self.classes
    }

    pub fn class_of(&self, x: f64) -> usize {
        self.interval_class[locate(&self.breakpoints, x)]
    }

    /// Midpoint of the first interval of class `c`.
    pub fn representative(&self, c: usize) -> f64 {
        let (a, b) = self.classes[c].intervals()[0];
        0.5 * (a + b)
    }

    /// Relabels the intervals through a block permutation: the new interval
    /// `i` takes the class of old interval `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.interval_class.len() {
            return Err(Error::shape(
                "permutation length differs from interval count",
            ));
        }
        let classes = perm.iter().map(|&p| self.interval_class[p]).collect();
        Self::with_classes(self.breakpoints.clone(), classes)
    }
}

pub fn equipartition(k: usize) -> Vec<f64> {
    (0..=k).map(|i| i as f64 / k as f64).collect()
}
