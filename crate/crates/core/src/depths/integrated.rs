use super::pointwise::{PointDepth, PointwiseDepths};

/// Integrated depths of every curve plus the curves that could not be ranked.
#[derive(Debug, Clone, PartialEq)]
pub struct Integrated {
    pub depths: Vec<f64>,
    /// Curves whose observed bins all carry zero weight; their depth is 0.
    pub unrankable: Vec<usize>,
}

/// Mean pointwise depth of one curve in each bin it visits, in bin order.
pub(crate) fn bin_means(obs: &[PointDepth]) -> Vec<(usize, f64, usize)> {
    let mut out: Vec<(usize, f64, usize)> = Vec::new();
    let mut sorted: Vec<&PointDepth> = obs.iter().collect();
    sorted.sort_by_key(|d| d.bin);
    for d in sorted {
        match out.last_mut() {
            Some((b, s, c)) if *b == d.bin => {
                *s += d.depth;
                *c += 1;
            }
            _ => out.push((d.bin, d.depth, 1)),
        }
    }
    for (_, s, c) in &mut out {
        *s /= *c as f64;
    }
    out
}

/// Weighted time-average of one curve's pointwise depths, renormalized over
/// the bins the curve visits. `None` when those bins carry no weight.
pub fn curve_integrated(obs: &[PointDepth], weights: &[f64]) -> Option<f64> {
    let means = bin_means(obs);
    let total: f64 = means.iter().map(|&(b, _, _)| weights[b]).sum();
    if total <= 0.0 {
        return None;
    }
    let v: f64 = means.iter().map(|&(b, m, _)| m * weights[b]).sum::<f64>() / total;
    Some(v.clamp(0.0, 1.0))
}

pub fn integrated_depth(pw: &PointwiseDepths, weights: &[f64]) -> Integrated {
    let mut unrankable = Vec::new();
    let depths = pw
        .curves
        .iter()
        .enumerate()
        .map(|(i, obs)| {
            curve_integrated(obs, weights).unwrap_or_else(|| {
                unrankable.push(i);
                0.0
            })
        })
        .collect();
    Integrated { depths, unrankable }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::depths::pointwise::Mode;

    fn pd(bin: usize, depth: f64) -> PointDepth {
        PointDepth {
            t: bin as f64,
            bin,
            depth,
        }
    }

    #[test]
    fn constant_depth() {
        let obs: Vec<_> = (0..4).map(|b| pd(b, 0.3)).collect();
        for w in [vec![0.25; 4], vec![0.1, 0.2, 0.3, 0.4]] {
            assert!((curve_integrated(&obs, &w).unwrap() - 0.3).abs() < 1e-15);
        }
    }

    #[test]
    fn partial_copy_agrees() {
        let full: Vec<_> = (0..6).map(|b| pd(b, 0.4)).collect();
        let half: Vec<_> = (0..3).map(|b| pd(b, 0.4)).collect();
        let w = vec![1.0 / 6.0; 6];
        assert_eq!(curve_integrated(&full, &w), curve_integrated(&half, &w));
    }

    #[test]
    fn in_bin_average_and_unrankable() {
        let obs = vec![pd(0, 0.2), pd(0, 0.4), pd(1, 0.5)];
        let v = curve_integrated(&obs, &[0.5, 0.5]).unwrap();
        assert!((v - 0.4).abs() < 1e-15);
        let pw = PointwiseDepths {
            mode: Mode::Local,
            curves: vec![vec![pd(0, 0.5)], vec![pd(1, 0.2)]],
        };
        let r = integrated_depth(&pw, &[0.0, 1.0]);
        assert_eq!(r.unrankable, vec![0]);
        assert_eq!(r.depths, vec![0.0, 0.2]);
    }
}
