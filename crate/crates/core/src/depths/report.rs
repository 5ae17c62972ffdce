use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "GMFID_wt")]
    GmfidWt,
    #[serde(rename = "GMFID_wd")]
    GmfidWd,
    #[serde(rename = "GMFED")]
    Gmfed,
    #[serde(rename = "LMFID_wt")]
    LmfidWt,
    #[serde(rename = "LMFID_wd")]
    LmfidWd,
    #[serde(rename = "LMFED")]
    Lmfed,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::GmfidWt,
        Method::GmfidWd,
        Method::Gmfed,
        Method::LmfidWt,
        Method::LmfidWd,
        Method::Lmfed,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::GmfidWt => "GMFID_wt",
            Method::GmfidWd => "GMFID_wd",
            Method::Gmfed => "GMFED",
            Method::LmfidWt => "LMFID_wt",
            Method::LmfidWd => "LMFID_wd",
            Method::Lmfed => "LMFED",
        }
    }

    pub fn is_global(self) -> bool {
        matches!(self, Method::GmfidWt | Method::GmfidWd | Method::Gmfed)
    }

    pub fn is_extremal(self) -> bool {
        matches!(self, Method::Gmfed | Method::Lmfed)
    }

    pub fn uses_region_weights(self) -> bool {
        matches!(self, Method::GmfidWd | Method::LmfidWd)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    /// Case-insensitive; accepts `GMFID_wt`, `gmfid-wt`, `gmfidwt`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_ascii_lowercase();
        Method::ALL
            .into_iter()
            .find(|m| m.name().replace('_', "").to_ascii_lowercase() == key)
            .ok_or_else(|| Error::Unknown {
                kind: "method",
                value: s.to_string(),
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DepthReport {
    pub method: Method,
    /// Trimming level behind region weights, when used.
    pub beta: Option<f64>,
    pub ids: Vec<String>,
    pub depths: Vec<f64>,
    /// 1 = deepest; exact ties share their average rank.
    pub ranks: Vec<f64>,
    /// Curves without any weighted observation (integrated depths only).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub unrankable: Vec<usize>,
}

impl DepthReport {
    pub fn new(method: Method, beta: Option<f64>, ids: Vec<String>, depths: Vec<f64>, unrankable: Vec<usize>) -> Self {
        let ranks = rank(&depths);
        Self {
            method,
            beta,
            ids,
            depths,
            ranks,
            unrankable,
        }
    }

    pub fn n(&self) -> usize {
        self.depths.len()
    }

    /// Curve indices from shallowest to deepest; rank ties break by id.
    pub fn shallowest_first(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.n()).collect();
        idx.sort_by(|&a, &b| {
            self.ranks[b]
                .total_cmp(&self.ranks[a])
                .then_with(|| self.ids[a].cmp(&self.ids[b]))
        });
        idx
    }

    /// Curve indices from deepest to shallowest; rank ties break by id.
    pub fn deepest_first(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.n()).collect();
        idx.sort_by(|&a, &b| {
            self.ranks[a]
                .total_cmp(&self.ranks[b])
                .then_with(|| self.ids[a].cmp(&self.ids[b]))
        });
        idx
    }

    /// Index of the deepest curve.
    pub fn median(&self) -> usize {
        self.deepest_first()[0]
    }
}

/// Ranks with 1 for the largest value and averaged ties.
pub fn rank(depths: &[f64]) -> Vec<f64> {
    let n = depths.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| depths[b].total_cmp(&depths[a]));
    let mut ranks = vec![0.0; n];
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && depths[idx[end]] == depths[idx[start]] {
            end += 1;
        }
        // positions start+1 ..= end share their mean
        let r = (start + 1 + end) as f64 / 2.0;
        for &k in &idx[start..end] {
            ranks[k] = r;
        }
        start = end;
    }
    ranks
}
