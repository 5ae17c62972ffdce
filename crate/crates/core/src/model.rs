//! Data model for irregularly observed multivariate functional data.
//!
//! A [`MultiCurve`] is one subject observed on its own time grid; a
//! [`Dataset`] groups curves that share the dimension `p`. No common grid is
//! assumed anywhere in the crate.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};

/// One subject: strictly increasing observation times with a `p`-vector each.
///
/// Values are stored row-major, `values[k * p .. (k + 1) * p]` belongs to
/// `times[k]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiCurve {
    pub id: String,
    pub p: usize,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl MultiCurve {
    pub fn new(id: impl Into<String>, p: usize, times: Vec<f64>, values: Vec<f64>) -> Self {
        Self {
            id: id.into(),
            p,
            times,
            values,
        }
    }

    /// Build a curve from `(t, y)` pairs.
    pub fn from_obs(id: impl Into<String>, obs: &[(f64, Vec<f64>)]) -> Self {
        let p = obs.first().map_or(0, |o| o.1.len());
        let times = obs.iter().map(|o| o.0).collect();
        let values = obs.iter().flat_map(|o| o.1.iter().copied()).collect();
        Self::new(id, p, times, values)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Observation vector at index `k`.
    pub fn y(&self, k: usize) -> &[f64] {
        &self.values[k * self.p..(k + 1) * self.p]
    }

    /// Component `j` of the observation at index `k`.
    pub fn value(&self, k: usize, j: usize) -> f64 {
        self.values[k * self.p + j]
    }

    /// Interval length `max(t) - min(t)`; zero for a single observation.
    pub fn duration(&self) -> f64 {
        match (self.times.first(), self.times.last()) {
            (Some(a), Some(b)) => b - a,
            _ => 0.0,
        }
    }

    /// Keep only the observations whose index satisfies `keep`.
    pub fn retain_indices(&self, mut keep: impl FnMut(usize, f64) -> bool) -> MultiCurve {
        let mut times = Vec::new();
        let mut values = Vec::new();
        for (k, &t) in self.times.iter().enumerate() {
            if keep(k, t) {
                times.push(t);
                values.extend_from_slice(self.y(k));
            }
        }
        MultiCurve::new(self.id.clone(), self.p, times, values)
    }

    /// Apply `f` to every observation vector in place.
    pub fn map_values(&self, mut f: impl FnMut(f64, &mut [f64])) -> MultiCurve {
        let mut out = self.clone();
        let p = self.p;
        for (k, &t) in self.times.iter().enumerate() {
            f(t, &mut out.values[k * p..(k + 1) * p]);
        }
        out
    }
}

/// A collection of curves sharing the dimension `p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub p: usize,
    pub curves: Vec<MultiCurve>,
}

/// Which integrity rule a curve or dataset breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    EmptyDataset,
    ZeroDimension,
    EmptyCurve,
    DuplicateTime,
    DecreasingTime,
    NonFiniteTime,
    Dimension,
    NonFiniteValue,
    DuplicateId,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    /// `None` for dataset-level violations.
    pub curve_id: Option<String>,
    pub rule: Rule,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.curve_id {
            Some(id) => write!(f, "curve '{}': {:?}: {}", id, self.rule, self.detail),
            None => write!(f, "dataset: {:?}: {}", self.rule, self.detail),
        }
    }
}

/// Per-curve interval lengths and their logarithms (`None` where `I_i = 0`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DurationSummary {
    pub lengths: Vec<f64>,
    pub log_lengths: Vec<Option<f64>>,
}

/// One pooled observation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PooledObs<'a> {
    pub curve: usize,
    pub id: &'a str,
    pub t: f64,
    pub y: &'a [f64],
}

impl Dataset {
    /// Wrap curves without checking them; see [`Dataset::validate`].
    pub fn new(p: usize, curves: Vec<MultiCurve>) -> Self {
        Self { p, curves }
    }

    /// Wrap curves and fail on the first integrity violation.
    pub fn try_new(p: usize, curves: Vec<MultiCurve>) -> Result<Self> {
        let ds = Self::new(p, curves);
        let violations = ds.validate();
        if violations.is_empty() {
            Ok(ds)
        } else {
            let msg = violations
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join("; ");
            Err(Error::InvalidDataset(msg))
        }
    }

    pub fn n(&self) -> usize {
        self.curves.len()
    }

    pub fn total_obs(&self) -> usize {
        self.curves.iter().map(MultiCurve::len).sum()
    }

    pub fn mean_obs(&self) -> f64 {
        if self.curves.is_empty() {
            0.0
        } else {
            self.total_obs() as f64 / self.n() as f64
        }
    }

    /// `[min t, max t]` over every observation, `None` for an empty dataset.
    pub fn span(&self) -> Option<(f64, f64)> {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for c in &self.curves {
            if let (Some(&a), Some(&b)) = (c.times.first(), c.times.last()) {
                lo = lo.min(a);
                hi = hi.max(b);
            }
        }
        (lo <= hi).then_some((lo, hi))
    }

    /// Check every curve and dataset invariant. An empty list means valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let ds_violation = |rule, detail: String| Violation {
            curve_id: None,
            rule,
            detail,
        };
        if self.curves.is_empty() {
            out.push(ds_violation(Rule::EmptyDataset, "no curves".into()));
        }
        if self.p == 0 {
            out.push(ds_violation(Rule::ZeroDimension, "p must be positive".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for c in &self.curves {
            let mut push = |rule, detail: String| {
                out.push(Violation {
                    curve_id: Some(c.id.clone()),
                    rule,
                    detail,
                })
            };
            if !seen.insert(c.id.as_str()) {
                push(Rule::DuplicateId, "id appears more than once".into());
            }
            if c.times.is_empty() {
                push(Rule::EmptyCurve, "no observations".into());
            }
            if c.p != self.p || c.values.len() != c.times.len() * self.p {
                push(
                    Rule::Dimension,
                    format!(
                        "expected {} values per observation, curve has p={} and {} values for {} times",
                        self.p,
                        c.p,
                        c.values.len(),
                        c.times.len()
                    ),
                );
            }
            for (k, t) in c.times.iter().enumerate() {
                if !t.is_finite() {
                    push(Rule::NonFiniteTime, format!("time index {k} is {t}"));
                }
            }
            for (k, w) in c.times.windows(2).enumerate() {
                if w[1] == w[0] {
                    push(Rule::DuplicateTime, format!("times {k} and {} equal {}", k + 1, w[0]));
                } else if w[1] < w[0] {
                    push(
                        Rule::DecreasingTime,
                        format!("time {} follows {} at index {}", w[1], w[0], k + 1),
                    );
                }
            }
            if let Some(k) = c.values.iter().position(|v| !v.is_finite()) {
                push(Rule::NonFiniteValue, format!("value index {k} is not finite"));
            }
        }
        out
    }

    pub fn durations(&self) -> DurationSummary {
        let lengths: Vec<f64> = self.curves.iter().map(MultiCurve::duration).collect();
        let log_lengths = lengths
            .iter()
            .map(|&l| (l > 0.0).then(|| l.ln()))
            .collect();
        DurationSummary {
            lengths,
            log_lengths,
        }
    }

    /// Flatten into `(curve, t, y)` rows, ordered by curve then time.
    pub fn pool(&self) -> Vec<PooledObs<'_>> {
        let mut rows = Vec::with_capacity(self.total_obs());
        for (i, c) in self.curves.iter().enumerate() {
            for k in 0..c.len() {
                rows.push(PooledObs {
                    curve: i,
                    id: &c.id,
                    t: c.times[k],
                    y: c.y(k),
                });
            }
        }
        rows
    }

    /// Pooled observation times, sorted ascending.
    pub fn sorted_times(&self) -> Vec<f64> {
        let mut ts: Vec<f64> = self.curves.iter().flat_map(|c| c.times.iter().copied()).collect();
        ts.sort_by(f64::total_cmp);
        ts
    }

    /// Subset of curves by position, preserving order.
    pub fn select(&self, keep: &[usize]) -> Dataset {
        Dataset::new(self.p, keep.iter().map(|&i| self.curves[i].clone()).collect())
    }

    /// Positions of the curves whose index is *not* in `drop`.
    pub fn complement(&self, drop: &std::collections::BTreeSet<usize>) -> Vec<usize> {
        (0..self.n()).filter(|i| !drop.contains(i)).collect()
    }

    /// Apply an affine map `y -> A y + b(t)` to every observation.
    pub fn affine(&self, a: &[f64], shift: impl Fn(f64) -> Vec<f64>) -> Dataset {
        let p = self.p;
        assert_eq!(a.len(), p * p, "matrix must be p x p");
        let curves = self
            .curves
            .iter()
            .map(|c| {
                c.map_values(|t, y| {
                    let b = shift(t);
                    let src = y.to_vec();
                    for r in 0..p {
                        y[r] = (0..p).map(|s| a[r * p + s] * src[s]).sum::<f64>() + b[r];
                    }
                })
            })
            .collect();
        Dataset::new(p, curves)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(id: &str, times: &[f64], p: usize) -> MultiCurve {
        let values = times.iter().flat_map(|&t| (0..p).map(move |j| t + j as f64)).collect();
        MultiCurve::new(id, p, times.to_vec(), values)
    }

    #[test]
    fn valid_single_curve() {
        let ds = Dataset::new(2, vec![curve("a", &[0.1, 0.2, 0.3], 2)]);
        assert!(ds.validate().is_empty());
    }

    #[test]
    fn duplicate_time_is_reported() {
        let ds = Dataset::new(2, vec![curve("a", &[0.2, 0.2], 2)]);
        let v = ds.validate();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].rule, Rule::DuplicateTime);
        assert_eq!(v[0].curve_id.as_deref(), Some("a"));
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let ds = Dataset::new(2, vec![curve("a", &[0.0, 1.0], 3)]);
        let v = ds.validate();
        assert!(v.iter().any(|x| x.rule == Rule::Dimension));
    }

    #[test]
    fn other_violations() {
        let mut bad = curve("b", &[1.0, 0.5], 1);
        bad.values[0] = f64::NAN;
        let ds = Dataset::new(1, vec![bad, MultiCurve::new("c", 1, vec![], vec![]), curve("b", &[0.0], 1)]);
        let rules: Vec<Rule> = ds.validate().iter().map(|v| v.rule).collect();
        assert!(rules.contains(&Rule::DecreasingTime));
        assert!(rules.contains(&Rule::NonFiniteValue));
        assert!(rules.contains(&Rule::EmptyCurve));
        assert!(rules.contains(&Rule::DuplicateId));
        assert!(!Dataset::new(1, vec![]).validate().is_empty());
    }

    #[test]
    fn validate_is_idempotent() {
        let ds = Dataset::new(2, vec![curve("a", &[0.2, 0.2], 2), curve("b", &[0.0], 3)]);
        assert_eq!(ds.validate(), ds.validate());
    }

    #[test]
    fn durations_basic() {
        let ds = Dataset::new(
            1,
            vec![curve("a", &[0.0, 1.0], 1), curve("b", &[0.3], 1), curve("c", &(0..22).map(f64::from).collect::<Vec<_>>(), 1)],
        );
        let d = ds.durations();
        assert_eq!(d.lengths, vec![1.0, 0.0, 21.0]);
        assert_eq!(d.log_lengths[1], None);
        assert_eq!(d.log_lengths[0], Some(0.0));
    }

    #[test]
    fn durations_ignore_interior_points() {
        let a = curve("a", &[0.0, 1.0], 1);
        let b = curve("a", &[0.0, 0.4, 1.0], 1);
        let c = curve("a", &[0.0, 1.0, 1.5], 1);
        assert_eq!(a.duration(), b.duration());
        assert!(c.duration() >= a.duration());
    }

    #[test]
    fn pool_counts_and_order() {
        let ds = Dataset::new(1, vec![curve("a", &[0.0, 0.5], 1), curve("b", &[0.1, 0.6, 0.9], 1)]);
        let rows = ds.pool();
        assert_eq!(rows.len(), 5);
        assert_eq!(rows[2].id, "b");
        assert_eq!(rows[2].t, 0.1);
        // disjoint grids keep all rows
        let ds = Dataset::new(1, vec![curve("a", &[0.0], 1), curve("b", &[5.0], 1)]);
        assert_eq!(ds.pool().len(), 2);
    }

    #[test]
    fn span_and_try_new() {
        let ds = Dataset::new(1, vec![curve("a", &[0.2, 0.5], 1), curve("b", &[0.1, 0.3], 1)]);
        assert_eq!(ds.span(), Some((0.1, 0.5)));
        assert!(Dataset::try_new(1, vec![curve("a", &[0.2, 0.2], 1)]).is_err());
    }
}
