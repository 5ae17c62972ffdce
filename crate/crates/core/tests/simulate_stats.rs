use mfdepth::seed;
use mfdepth::simulate::{
    contaminate, draw_scores, generate, max_and_range, score_variance, simulate, ContaminationSpec, ModelId, ModelSpec,
    OutlierType, Scenario, SparsenessSpec, SparsenessType, SparsityLevel,
};

#[test]
fn clean_means_within_three_standard_errors() {
    for model in ModelId::ALL {
        let spec = ModelSpec { model, n: 500, t: 10, jitter: 0.0 };
        let ds = generate(&spec, 11).unwrap();
        for k in 0..spec.t {
            let t = ds.curves[0].times[k];
            let mu = model.mean(t);
            for j in 0..2 {
                let vals: Vec<f64> = ds.curves.iter().map(|c| c.value(k, j)).collect();
                let n = vals.len() as f64;
                let mean = vals.iter().sum::<f64>() / n;
                let sd = (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
                let se = sd / n.sqrt();
                assert!((mean - mu[j]).abs() <= 3.0 * se + 1e-12, "model {model}, t={t}, component {j}: {mean} vs {}", mu[j]);
            }
        }
    }
}

#[test]
fn score_variance_decay() {
    let mut rng = seed::rng(5);
    let draws: Vec<Vec<f64>> = (0..10_000).map(|_| draw_scores(ModelId::I, &mut rng)).collect();
    for m in 1..=8 {
        let v: Vec<f64> = draws.iter().map(|d| d[m - 1]).collect();
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (v.len() - 1) as f64;
        let want = score_variance(m);
        assert!((var / want - 1.0).abs() < 0.1, "m={m}: {var} vs {want}");
    }
    let v: Vec<f64> = (0..10_000).map(|_| draw_scores(ModelId::IV, &mut rng)[0]).collect();
    assert!(v.iter().all(|x| (-7.0..7.0).contains(x)));
}

#[test]
fn pipeline_is_bit_reproducible() {
    let sc = Scenario {
        model: ModelSpec { model: ModelId::III, n: 60, t: 20, jitter: 0.2 },
        contamination: ContaminationSpec { kind: OutlierType::ShapeI, rate: 0.1 },
        sparseness: SparsenessSpec { kind: SparsenessType::Peak, level: SparsityLevel::Medium, p_s: 0.5 },
    };
    let a = simulate(&sc, 123).unwrap();
    let b = simulate(&sc, 123).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.outliers.len(), 6);
    assert!(a.observed.validate().is_empty());
}

/// Replays each contamination rule on the affected curves.
#[test]
fn contamination_replay() {
    let clean_for = |model| generate(&ModelSpec { model, n: 100, t: 25, jitter: 0.0 }, 17).unwrap();
    let ratio_consts = |a: &[f64], b: &[f64]| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| x / y).collect() };

    for model in ModelId::ALL {
        let clean = clean_for(model);
        let (m_bar, r) = max_and_range(&clean);
        for kind in OutlierType::ALL.into_iter().skip(1) {
            let c = contaminate(&clean, model, &ContaminationSpec { kind, rate: 0.1 }, 4).unwrap();
            assert_eq!(c.outliers.len(), 10);
            for i in 0..clean.n() {
                let (src, out) = (&clean.curves[i], &c.dataset.curves[i]);
                if !c.outliers.contains(&i) {
                    assert_eq!(src, out);
                    continue;
                }
                assert_eq!(src.times, out.times);
                let diffs: Vec<[f64; 2]> = (0..src.len())
                    .map(|k| [out.value(k, 0) - src.value(k, 0), out.value(k, 1) - src.value(k, 1)])
                    .collect();
                match (kind, model) {
                    (OutlierType::MagnitudeI, _) => {
                        let a = diffs[0][0] / r[0];
                        assert!((0.8..=1.0).contains(&a.abs()));
                        for d in &diffs {
                            assert!((d[0] - a * r[0]).abs() < 1e-9 && (d[1] - a * r[1]).abs() < 1e-9);
                        }
                    }
                    (OutlierType::MagnitudeII, _) => {
                        let shifted: Vec<usize> = (0..src.len()).filter(|&k| diffs[k][0] != 0.0).collect();
                        assert!(!shifted.is_empty());
                        let span = src.times[*shifted.last().unwrap()] - src.times[shifted[0]];
                        assert!(span <= 0.1 + 1e-12);
                    }
                    (OutlierType::AmplitudeI | OutlierType::AmplitudeII, _) => {
                        let f = ratio_consts(&out.values, &src.values);
                        let f0 = f[0];
                        let a = if kind == OutlierType::AmplitudeI { f0.abs() - 1.0 } else { 1.0 - f0.abs() };
                        assert!((0.8 - 1e-9..=1.0 + 1e-9).contains(&a), "a = {a}");
                        assert!(f.iter().all(|x| (x - f0).abs() < 1e-9));
                    }
                    (OutlierType::ShapeI, ModelId::I) => {
                        let a1 = out.value(0, 0) / src.value(0, 0);
                        assert!((0.3..=0.5).contains(&a1));
                        for k in 0..src.len() {
                            assert!((out.value(k, 1) - 2.0 * a1 * src.value(k, 1)).abs() < 1e-9);
                        }
                    }
                    (OutlierType::ShapeII, ModelId::I) => {
                        let a2 = out.value(0, 0) / src.value(0, 0);
                        assert!((1.6..=1.8).contains(&a2));
                        assert!(diffs.iter().all(|d| d[1] == 0.0));
                    }
                    (OutlierType::ShapeI, _) => {
                        // difference is (a/5) m̄ sin(2πt) componentwise
                        let k = (0..src.len()).find(|&k| (2.0 * std::f64::consts::PI * src.times[k]).sin().abs() > 0.5).unwrap();
                        let a = diffs[k][0] * 5.0 / (m_bar[0] * (2.0 * std::f64::consts::PI * src.times[k]).sin());
                        assert!((0.8 - 1e-9..=1.0 + 1e-9).contains(&a));
                        for (kk, d) in diffs.iter().enumerate() {
                            let s = (2.0 * std::f64::consts::PI * src.times[kk]).sin();
                            assert!((d[1] - a / 5.0 * m_bar[1] * s).abs() < 1e-9);
                        }
                    }
                    (OutlierType::ShapeII, _) => {
                        // at t = 0: a * y + a * (1, 0)
                        let a = out.value(0, 1) / src.value(0, 1);
                        assert!((0.8 - 1e-9..=1.0 + 1e-9).contains(&a));
                        assert!((out.value(0, 0) - a * (src.value(0, 0) + 1.0)).abs() < 1e-9);
                    }
                    (OutlierType::None, _) => unreachable!(),
                }
            }
        }
    }
}

#[test]
fn point_sparseness_binomial_count() {
    use mfdepth::simulate::sparsify;
    let ds = generate(&ModelSpec { n: 400, t: 50, ..Default::default() }, 8).unwrap();
    let spec = SparsenessSpec { kind: SparsenessType::Point, level: SparsityLevel::Fixed(0.5), p_s: 1.0 };
    let sp = sparsify(&ds, &spec, 2).unwrap();
    let counts: Vec<f64> = sp.curves.iter().map(|c| c.len() as f64).collect();
    let mean = counts.iter().sum::<f64>() / counts.len() as f64;
    // Binomial(50, 0.5): mean 25, sd of the mean 3.54 / 20
    assert!((mean - 25.0).abs() < 4.0 * 3.54 / 20.0, "mean {mean}");
}
