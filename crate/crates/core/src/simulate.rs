//! Bivariate simulation models, outlier contamination and time sparseness.
//!
//! Curves follow `Y(t) = μ(t) + Σ ρ_m φ_m(t) + ε(t)` on `[0, 1]`. The
//! bivariate Fourier basis splits one orthonormal Fourier basis on `[0, 2]`
//! across the two components: `φ_m(t) = (f_m(t), f_m(t + 1))`.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Dataset, MultiCurve};
use crate::seed;

/// Sparsification attempts per curve before giving up on an empty result.
pub const MAX_SPARSIFY_RETRIES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ModelId {
    I,
    II,
    III,
    IV,
}

impl ModelId {
    pub const ALL: [ModelId; 4] = [ModelId::I, ModelId::II, ModelId::III, ModelId::IV];

    pub fn number(self) -> usize {
        match self {
            ModelId::I => 1,
            ModelId::II => 2,
            ModelId::III => 3,
            ModelId::IV => 4,
        }
    }

    /// Number of basis terms `M`.
    pub fn n_terms(self) -> usize {
        match self {
            ModelId::I | ModelId::II => 8,
            ModelId::III => 2,
            ModelId::IV => 1,
        }
    }

    pub fn mean(self, t: f64) -> [f64; 2] {
        match self {
            ModelId::I => [5.0 * (2.0 * PI * t).cos(), 5.0 * (2.0 * PI * t).sin()],
            ModelId::II => [-4.0 * t, 5.0 * t],
            ModelId::III => [4.0 * t, 6.0 * (t - 0.5).powi(2)],
            ModelId::IV => [4.0 * t, 0.0],
        }
    }

    /// The `m`-th eigenfunction of this model (Model IV uses `(0, t² - t)`).
    pub fn eigenfunction(self, m: usize, t: f64) -> [f64; 2] {
        match self {
            ModelId::IV => [0.0, t * t - t],
            _ => fourier_basis(m, t),
        }
    }
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ModelId::I => "I",
            ModelId::II => "II",
            ModelId::III => "III",
            ModelId::IV => "IV",
        };
        f.write_str(s)
    }
}

impl FromStr for ModelId {
    type Err = Error;

    /// Accepts `I`..`IV`, `1`..`4`, optionally prefixed by `model`.
    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase();
        let key = key.trim_start_matches("model").trim_start_matches(['_', '-', ' ']);
        match key {
            "i" | "1" => Ok(ModelId::I),
            "ii" | "2" => Ok(ModelId::II),
            "iii" | "3" => Ok(ModelId::III),
            "iv" | "4" => Ok(ModelId::IV),
            _ => Err(Error::Unknown {
                kind: "model",
                value: s.to_string(),
            }),
        }
    }
}

/// Orthonormal Fourier basis on `[0, 2]`: `1/√2`, then `sin(πks)`, `cos(πks)`.
fn fourier_02(m: usize, s: f64) -> f64 {
    if m == 1 {
        return 1.0 / SQRT_2;
    }
    let k = (m / 2) as f64;
    if m % 2 == 0 {
        (PI * k * s).sin()
    } else {
        (PI * k * s).cos()
    }
}

/// `m`-th bivariate Fourier eigenfunction (`m >= 1`).
pub fn fourier_basis(m: usize, t: f64) -> [f64; 2] {
    assert!(m >= 1, "basis index starts at 1");
    [fourier_02(m, t), fourier_02(m, t + 1.0)]
}

/// Score variance `e^{-(m+1)/2}`.
pub fn score_variance(m: usize) -> f64 {
    (-(m as f64 + 1.0) / 2.0).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelSpec {
    pub model: ModelId,
    pub n: usize,
    /// Grid points per curve before sparsification.
    pub t: usize,
    /// Uniform jitter of each grid time, as a fraction of the spacing (< 0.5).
    pub jitter: f64,
}

impl Default for ModelSpec {
    fn default() -> Self {
        Self {
            model: ModelId::I,
            n: 200,
            t: 50,
            jitter: 0.0,
        }
    }
}

/// Scores `ρ_1..ρ_M` of one curve.
pub fn draw_scores(model: ModelId, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (1..=model.n_terms())
        .map(|m| match model {
            ModelId::IV => uniform(rng, -7.0, 7.0),
            _ => Normal::new(0.0, score_variance(m).sqrt()).unwrap().sample(rng),
        })
        .collect()
}

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

fn sign(rng: &mut ChaCha8Rng) -> f64 {
    if rng.random_bool(0.5) {
        1.0
    } else {
        -1.0
    }
}

pub fn base_times(spec: &ModelSpec, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let t = spec.t;
    if t == 1 {
        return vec![0.0];
    }
    let h = 1.0 / (t - 1) as f64;
    (0..t)
        .map(|k| {
            let base = k as f64 * h;
            if spec.jitter > 0.0 {
                (base + uniform(rng, -spec.jitter, spec.jitter) * h).clamp(0.0, 1.0)
            } else {
                base
            }
        })
        .collect()
}

pub fn curve_id(i: usize) -> String {
    format!("{:04}", i + 1)
}

/// Draw `spec.n` clean curves.
pub fn generate(spec: &ModelSpec, seed: u64) -> Result<Dataset> {
    if spec.n == 0 || spec.t == 0 {
        return Err(Error::InvalidParameter("model needs n >= 1 and t >= 1".into()));
    }
    if !(0.0..0.5).contains(&spec.jitter) {
        return Err(Error::InvalidParameter(format!("jitter must lie in [0, 0.5), got {}", spec.jitter)));
    }
    let curves = (0..spec.n)
        .map(|i| {
            let mut rng = seed::rng(seed::derive_indexed(seed, "curve", i as u64));
            let times = base_times(spec, &mut rng);
            let scores = draw_scores(spec.model, &mut rng);
            let sd = [uniform(&mut rng, 0.0, 0.1).sqrt(), uniform(&mut rng, 0.0, 0.1).sqrt()];
            let mut values = Vec::with_capacity(2 * times.len());
            for &t in &times {
                let mut y = spec.model.mean(t);
                for (m, rho) in scores.iter().enumerate() {
                    let phi = spec.model.eigenfunction(m + 1, t);
                    y[0] += rho * phi[0];
                    y[1] += rho * phi[1];
                }
                for (l, s) in sd.iter().enumerate() {
                    y[l] += s * rng.sample::<f64, _>(rand_distr::StandardNormal);
                }
                values.extend_from_slice(&y);
            }
            MultiCurve::new(curve_id(i), 2, times, values)
        })
        .collect();
    Ok(Dataset::new(2, curves))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutlierType {
    #[default]
    None,
    MagnitudeI,
    MagnitudeII,
    AmplitudeI,
    AmplitudeII,
    ShapeI,
    ShapeII,
}

impl OutlierType {
    pub const ALL: [OutlierType; 7] = [
        OutlierType::None,
        OutlierType::MagnitudeI,
        OutlierType::MagnitudeII,
        OutlierType::AmplitudeI,
        OutlierType::AmplitudeII,
        OutlierType::ShapeI,
        OutlierType::ShapeII,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OutlierType::None => "none",
            OutlierType::MagnitudeI => "magnitude_i",
            OutlierType::MagnitudeII => "magnitude_ii",
            OutlierType::AmplitudeI => "amplitude_i",
            OutlierType::AmplitudeII => "amplitude_ii",
            OutlierType::ShapeI => "shape_i",
            OutlierType::ShapeII => "shape_ii",
        }
    }
}

impl fmt::Display for OutlierType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OutlierType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        // accepts `shape_ii`, `Shape-II`, `shape2`, ...
        let mut key = s.trim().to_ascii_lowercase().replace(['-', ' ', '_'], "");
        if let Some(stem) = key.strip_suffix('2') {
            key = format!("{stem}ii");
        } else if let Some(stem) = key.strip_suffix('1') {
            key = format!("{stem}i");
        }
        OutlierType::ALL
            .into_iter()
            .find(|o| o.name().replace('_', "") == key)
            .ok_or_else(|| Error::Unknown {
                kind: "outlier type",
                value: s.to_string(),
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ContaminationSpec {
    pub kind: OutlierType,
    pub rate: f64,
}

impl Default for ContaminationSpec {
    fn default() -> Self {
        Self {
            kind: OutlierType::None,
            rate: 0.10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Contaminated {
    pub dataset: Dataset,
    /// Indices of contaminated curves, ascending.
    pub outliers: Vec<usize>,
}

/// Componentwise maximum and range of a dataset.
pub fn max_and_range(dataset: &Dataset) -> (Vec<f64>, Vec<f64>) {
    let p = dataset.p;
    let mut hi = vec![f64::NEG_INFINITY; p];
    let mut lo = vec![f64::INFINITY; p];
    for c in &dataset.curves {
        for y in c.values.chunks_exact(p) {
            for j in 0..p {
                hi[j] = hi[j].max(y[j]);
                lo[j] = lo[j].min(y[j]);
            }
        }
    }
    let range = hi.iter().zip(&lo).map(|(h, l)| h - l).collect();
    (hi, range)
}

fn contaminate_curve(c: &MultiCurve, kind: OutlierType, model: ModelId, m_bar: &[f64], r: &[f64], rng: &mut ChaCha8Rng) -> MultiCurve {
    match kind {
        OutlierType::None => c.clone(),
        OutlierType::MagnitudeI => {
            let (a, s) = (uniform(rng, 0.8, 1.0), sign(rng));
            c.map_values(|_, y| y.iter_mut().zip(r).for_each(|(v, rj)| *v += a * s * rj))
        }
        OutlierType::MagnitudeII => {
            let (a, s) = (uniform(rng, 0.8, 1.0), sign(rng));
            let t0 = uniform(rng, 0.0, 0.85);
            c.map_values(|t, y| {
                if (t0..=t0 + 0.1).contains(&t) {
                    y.iter_mut().zip(r).for_each(|(v, rj)| *v += a * s * rj);
                }
            })
        }
        OutlierType::AmplitudeI | OutlierType::AmplitudeII => {
            let (a, s) = (uniform(rng, 0.8, 1.0), sign(rng));
            let f = if kind == OutlierType::AmplitudeI { (1.0 + a) * s } else { (1.0 - a) * s };
            c.map_values(|_, y| y.iter_mut().for_each(|v| *v *= f))
        }
        OutlierType::ShapeI if model == ModelId::I => {
            let a1 = uniform(rng, 0.3, 0.5);
            c.map_values(|_, y| {
                y[0] *= a1;
                y[1] *= 2.0 * a1;
            })
        }
        OutlierType::ShapeII if model == ModelId::I => {
            let a2 = uniform(rng, 1.6, 1.8);
            c.map_values(|_, y| y[0] *= a2)
        }
        OutlierType::ShapeI => {
            let a = uniform(rng, 0.8, 1.0);
            c.map_values(|t, y| {
                let w = (2.0 * PI * t).sin() * a / 5.0;
                y.iter_mut().zip(m_bar).for_each(|(v, m)| *v += w * m);
            })
        }
        OutlierType::ShapeII => {
            let a = uniform(rng, 0.8, 1.0);
            c.map_values(|t, y| {
                y[0] = a * y[0] + a * (PI * t).cos();
                y[1] = a * y[1] + a * (PI * t).sin();
            })
        }
    }
}

/// Replace `round(rate * N)` uniformly chosen curves by outliers of `spec.kind`.
///
/// `m̄` and `r` are taken from `clean`, which must be the uncontaminated
/// sample of `model`.
pub fn contaminate(clean: &Dataset, model: ModelId, spec: &ContaminationSpec, seed: u64) -> Result<Contaminated> {
    if !(0.0..=0.5).contains(&spec.rate) {
        return Err(Error::InvalidParameter(format!("contamination rate must lie in [0, 0.5], got {}", spec.rate)));
    }
    if spec.kind == OutlierType::None {
        return Ok(Contaminated {
            dataset: clean.clone(),
            outliers: Vec::new(),
        });
    }
    if clean.p != 2 {
        return Err(Error::InvalidParameter("contamination rules are defined for bivariate data".into()));
    }
    let n = clean.n();
    let n_out = (spec.rate * n as f64).round() as usize;
    let mut rng = seed::rng(seed::derive(seed, "outlier-index"));
    let mut outliers = index::sample(&mut rng, n, n_out).into_vec();
    outliers.sort_unstable();
    let (m_bar, r) = max_and_range(clean);
    let mut curves = clean.curves.clone();
    for &i in &outliers {
        let mut crng = seed::rng(seed::derive_indexed(seed, "outlier", i as u64));
        curves[i] = contaminate_curve(&clean.curves[i], spec.kind, model, &m_bar, &r, &mut crng);
    }
    Ok(Contaminated {
        dataset: Dataset::new(clean.p, curves),
        outliers,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SparsenessType {
    #[default]
    None,
    Point,
    Peak,
    Partial,
}

impl SparsenessType {
    pub const ALL: [SparsenessType; 4] = [
        SparsenessType::None,
        SparsenessType::Point,
        SparsenessType::Peak,
        SparsenessType::Partial,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SparsenessType::None => "none",
            SparsenessType::Point => "point",
            SparsenessType::Peak => "peak",
            SparsenessType::Partial => "partial",
        }
    }
}

impl fmt::Display for SparsenessType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SparsenessType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase();
        SparsenessType::ALL
            .into_iter()
            .find(|o| o.name() == key)
            .ok_or_else(|| Error::Unknown {
                kind: "sparseness type",
                value: s.to_string(),
            })
    }
}

/// Distribution of the per-curve missing proportion `p_curve`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SparsityLevel {
    /// `p_curve = 0`.
    #[default]
    Dense,
    /// `U(0.1, 0.3)`.
    Medium,
    /// `U(0.4, 0.6)`.
    High,
    Fixed(f64),
}

impl SparsityLevel {
    pub fn name(self) -> String {
        match self {
            SparsityLevel::Dense => "dense".into(),
            SparsityLevel::Medium => "medium".into(),
            SparsityLevel::High => "high".into(),
            SparsityLevel::Fixed(p) => format!("{p}"),
        }
    }

    pub fn draw(self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            SparsityLevel::Dense => 0.0,
            SparsityLevel::Medium => uniform(rng, 0.1, 0.3),
            SparsityLevel::High => uniform(rng, 0.4, 0.6),
            SparsityLevel::Fixed(p) => p,
        }
    }
}

impl fmt::Display for SparsityLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for SparsityLevel {
    type Err = Error;

    /// `dense`, `medium`, `high`, or a fixed proportion such as `0.3`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "dense" | "none" | "0" => Ok(SparsityLevel::Dense),
            "medium" => Ok(SparsityLevel::Medium),
            "high" => Ok(SparsityLevel::High),
            other => other
                .parse::<f64>()
                .ok()
                .filter(|p| (0.0..1.0).contains(p))
                .map(SparsityLevel::Fixed)
                .ok_or_else(|| Error::Unknown {
                    kind: "sparsity level",
                    value: s.to_string(),
                }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SparsenessSpec {
    pub kind: SparsenessType,
    pub level: SparsityLevel,
    /// Share of curves that lose observations.
    pub p_s: f64,
}

impl Default for SparsenessSpec {
    fn default() -> Self {
        Self {
            kind: SparsenessType::None,
            level: SparsityLevel::Dense,
            p_s: 1.0,
        }
    }
}

fn sparsify_curve(c: &MultiCurve, kind: SparsenessType, p_curve: f64, rng: &mut ChaCha8Rng) -> MultiCurve {
    match kind {
        SparsenessType::None => c.clone(),
        SparsenessType::Point => c.retain_indices(|_, _| !rng.random_bool(p_curve)),
        SparsenessType::Peak => {
            let ts = uniform(rng, 0.0, (0.7 - p_curve).max(0.0));
            c.retain_indices(|_, t| t < ts || t > ts + p_curve)
        }
        SparsenessType::Partial => {
            let ts = uniform(rng, 0.0, 1.0 - p_curve);
            c.retain_indices(|_, t| t <= ts)
        }
    }
}

/// Delete observations of `round(p_s * N)` uniformly chosen curves.
pub fn sparsify(dataset: &Dataset, spec: &SparsenessSpec, seed: u64) -> Result<Dataset> {
    if !(0.0..=1.0).contains(&spec.p_s) {
        return Err(Error::InvalidParameter(format!("p_s must lie in [0, 1], got {}", spec.p_s)));
    }
    if let SparsityLevel::Fixed(p) = spec.level {
        if !(0.0..1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!("p_curve must lie in [0, 1), got {p}")));
        }
    }
    if spec.kind == SparsenessType::None || spec.level == SparsityLevel::Dense {
        return Ok(dataset.clone());
    }
    let n = dataset.n();
    let k = (spec.p_s * n as f64).round() as usize;
    let mut rng = seed::rng(seed::derive(seed, "sparse-index"));
    let chosen = index::sample(&mut rng, n, k).into_vec();
    let mut curves = dataset.curves.clone();
    for i in chosen {
        let mut crng = seed::rng(seed::derive_indexed(seed, "sparse", i as u64));
        let p_curve = spec.level.draw(&mut crng);
        let mut attempt = 0;
        curves[i] = loop {
            let out = sparsify_curve(&dataset.curves[i], spec.kind, p_curve, &mut crng);
            if !out.is_empty() {
                break out;
            }
            attempt += 1;
            if attempt >= MAX_SPARSIFY_RETRIES {
                return Err(Error::EmptyAfterSparsify(dataset.curves[i].id.clone()));
            }
        };
    }
    Ok(Dataset::new(dataset.p, curves))
}

/// One full simulation setting.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct Scenario {
    pub model: ModelSpec,
    pub contamination: ContaminationSpec,
    pub sparseness: SparsenessSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Simulated {
    /// Dense uncontaminated sample.
    pub clean: Dataset,
    /// Dense contaminated sample.
    pub contaminated: Dataset,
    /// Contaminated sample after sparsification.
    pub observed: Dataset,
    pub outliers: Vec<usize>,
}

/// Generate, contaminate and sparsify with independent sub-seeds.
pub fn simulate(scenario: &Scenario, seed: u64) -> Result<Simulated> {
    let clean = generate(&scenario.model, seed::derive(seed, "generate"))?;
    let c = contaminate(&clean, scenario.model.model, &scenario.contamination, seed::derive(seed, "contaminate"))?;
    let observed = sparsify(&c.dataset, &scenario.sparseness, seed::derive(seed, "sparsify"))?;
    Ok(Simulated {
        clean,
        contaminated: c.dataset,
        observed,
        outliers: c.outliers,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn means() {
        assert_eq!(ModelId::I.mean(0.0), [5.0, 0.0]);
        assert_eq!(ModelId::II.mean(1.0), [-4.0, 5.0]);
        assert_eq!(ModelId::III.mean(0.5), [2.0, 0.0]);
        for t in [0.0, 0.3, 1.0] {
            assert_eq!(ModelId::IV.mean(t)[1], 0.0);
        }
    }

    #[test]
    fn basis_is_orthonormal() {
        let t = 1000;
        let grid: Vec<f64> = (0..t).map(|k| (k as f64 + 0.5) / t as f64).collect();
        for a in 1..=8 {
            for b in 1..=8 {
                let ip: f64 = grid
                    .iter()
                    .map(|&s| {
                        let (x, y) = (fourier_basis(a, s), fourier_basis(b, s));
                        x[0] * y[0] + x[1] * y[1]
                    })
                    .sum::<f64>()
                    / t as f64;
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((ip - want).abs() < 1e-3, "<phi_{a}, phi_{b}> = {ip}");
            }
        }
    }

    #[test]
    fn generate_is_reproducible() {
        let spec = ModelSpec { n: 20, t: 15, ..Default::default() };
        let a = generate(&spec, 9).unwrap();
        assert_eq!(a, generate(&spec, 9).unwrap());
        assert_ne!(a, generate(&spec, 10).unwrap());
        assert_eq!(a.n(), 20);
        assert!(a.validate().is_empty());
    }

    #[test]
    fn contamination_counts_and_rules() {
        let spec = ModelSpec { n: 200, t: 20, ..Default::default() };
        let clean = generate(&spec, 1).unwrap();
        let c = contaminate(&clean, ModelId::I, &ContaminationSpec { kind: OutlierType::MagnitudeI, rate: 0.1 }, 2).unwrap();
        assert_eq!(c.outliers.len(), 20);
        let (_, r) = max_and_range(&clean);
        for &i in &c.outliers {
            let d0 = c.dataset.curves[i].values[0] - clean.curves[i].values[0];
            let d1 = c.dataset.curves[i].values[1] - clean.curves[i].values[1];
            // same a and s in both components
            assert!((d0 / r[0] - d1 / r[1]).abs() < 1e-12);
            assert!((0.8..=1.0).contains(&(d0 / r[0]).abs()));
        }
        let none = contaminate(&clean, ModelId::I, &ContaminationSpec::default(), 2).unwrap();
        assert!(none.outliers.is_empty());
        assert_eq!(none.dataset, clean);
    }

    #[test]
    fn sparseness_rules() {
        let spec = ModelSpec { n: 100, t: 50, ..Default::default() };
        let ds = generate(&spec, 3).unwrap();
        let dense = SparsenessSpec { kind: SparsenessType::Point, level: SparsityLevel::Dense, p_s: 1.0 };
        assert_eq!(sparsify(&ds, &dense, 4).unwrap(), ds);

        let point = SparsenessSpec { kind: SparsenessType::Point, level: SparsityLevel::Fixed(0.5), p_s: 1.0 };
        let sp = sparsify(&ds, &point, 4).unwrap();
        let mean = sp.mean_obs();
        assert!((mean - 25.0).abs() < 2.0, "mean retained {mean}");

        let partial = SparsenessSpec { kind: SparsenessType::Partial, level: SparsityLevel::High, p_s: 1.0 };
        let sp = sparsify(&ds, &partial, 5).unwrap();
        for c in &sp.curves {
            assert!(c.times.iter().all(|&t| t <= 0.6));
        }

        let peak = SparsenessSpec { kind: SparsenessType::Peak, level: SparsityLevel::Fixed(0.3), p_s: 0.5 };
        let sp = sparsify(&ds, &peak, 6).unwrap();
        let affected = sp.curves.iter().filter(|c| c.len() < 50).count();
        assert_eq!(affected, 50);
    }

    #[test]
    fn parse_names() {
        assert_eq!("3".parse::<ModelId>().unwrap(), ModelId::III);
        assert_eq!("model IV".parse::<ModelId>().unwrap(), ModelId::IV);
        assert_eq!("shape-i".parse::<OutlierType>().unwrap(), OutlierType::ShapeI);
        assert_eq!("magnitude2".parse::<OutlierType>().unwrap(), OutlierType::MagnitudeII);
        assert_eq!("Shape_II".parse::<OutlierType>().unwrap(), OutlierType::ShapeII);
        assert_eq!("high".parse::<SparsityLevel>().unwrap(), SparsityLevel::High);
        assert!("model5".parse::<ModelId>().is_err());
    }
}
