use std::sync::Arc;

use corelens::analysis::{
    kmeans, pin_diff, pin_feature_vectors, AnalysisError, AnalysisResult, AnalysisTool, KMeansTool, Matrix,
    ParamKind, ParamSpec, ParamValue, Params, Registry,
};
use corelens::model::{AssemblyDef, AssemblyType, AssemblyView, DataEntry, Reactor, ReactorBuilder};
use corelens::samples;
use proptest::prelude::*;

const F: &str = "Axial Power";

/// One `n x n` fuel assembly whose pin `i` (row-major) holds `series[i]`,
/// scaled by `scale`. Empty series leave the pin without data.
fn assembly(n: usize, series: &[Vec<f64>], scale: f64) -> Reactor {
    let mut b = ReactorBuilder::pwr("t", 1, 21.5).unwrap();
    b.add_unit("W").unwrap();
    let rod = b.add_rod_def(samples::pwr_fuel_rod()).unwrap();
    let mut def = AssemblyDef::new("a", AssemblyType::Fuel, n, 1.26).unwrap();
    for i in 0..n * n {
        let (r, c) = (i / n, i % n);
        def.set_rod(r, c, Some(rod)).unwrap();
        for (k, &v) in series.get(i).map(Vec::as_slice).unwrap_or(&[]).iter().enumerate() {
            def.add_pin_data(r, c, F, DataEntry::new(v * scale, 0.0, 0, [0.0, 0.0, k as f64], 0.0))
                .unwrap();
        }
    }
    let d = b.add_assembly_def(def).unwrap();
    b.set_assembly(AssemblyType::Fuel, 0, 0, d).unwrap();
    b.freeze().unwrap()
}

fn view(r: &Reactor) -> AssemblyView<'_> {
    r.assembly_view(0).unwrap()
}

fn grid_series(n: usize, levels: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(0.1f64..10.0, levels), n * n)
}

fn points() -> impl Strategy<Value = Matrix> {
    (1usize..25, 1usize..4).prop_flat_map(|(n, d)| {
        prop::collection::vec(-100.0f64..100.0, n * d).prop_map(move |v| Matrix::new(n, d, v).unwrap())
    })
}

fn sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

proptest! {
    #[test]
    fn diff_of_identical_assemblies_is_zero(series in grid_series(3, 4)) {
        let r = assembly(3, &series, 1.0);
        let res = pin_diff(&view(&r), &view(&r), F, &[], 0.0).unwrap();
        let t = res.table("percent_difference").unwrap();
        prop_assert_eq!(t.values().rows(), 9);
        prop_assert!(t.values().as_slice().iter().all(|&d| d == 0.0));
    }

    #[test]
    fn diff_ignores_positive_scaling(
        a in grid_series(2, 5),
        b in grid_series(2, 5),
        c in 1e-3f64..1e3,
        d in 1e-3f64..1e3,
    ) {
        let (ra, rb) = (assembly(2, &a, 1.0), assembly(2, &b, 1.0));
        let (rca, rdb) = (assembly(2, &a, c), assembly(2, &b, d));
        let base = pin_diff(&view(&ra), &view(&rb), F, &[], 0.0).unwrap();
        let scaled = pin_diff(&view(&rca), &view(&rdb), F, &[], 0.0).unwrap();
        let x = base.table("percent_difference").unwrap().values().as_slice().to_vec();
        let y = scaled.table("percent_difference").unwrap().values().as_slice().to_vec();
        for (p, q) in x.iter().zip(&y) {
            prop_assert!((p - q).abs() <= 1e-12 * p.abs().max(1.0), "{} vs {}", p, q);
        }
    }

    #[test]
    fn kmeans_history_is_monotone_and_final_assignment_is_a_fixed_point(
        p in points(),
        k_frac in 0.0f64..1.0,
        seed in any::<u64>(),
    ) {
        let k = 1 + ((p.rows() - 1) as f64 * k_frac) as usize;
        let fit = kmeans(&p, k, seed, 100).unwrap();
        for w in fit.history.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-12 * w[0].abs().max(1.0), "{:?}", fit.history);
        }
        prop_assert_eq!(fit.inertia, *fit.history.last().unwrap());
        let mut counts = vec![0; k];
        let mut inertia = 0.0;
        for i in 0..p.rows() {
            counts[fit.assignments[i]] += 1;
            inertia += sq(p.row(i), fit.centroids.row(fit.assignments[i]));
            if fit.iterations < 100 {
                // nearest centroid, ties to the lowest index
                let best = (0..k)
                    .map(|j| sq(p.row(i), fit.centroids.row(j)))
                    .enumerate()
                    .fold((0, f64::INFINITY), |acc, (j, d)| if d < acc.1 { (j, d) } else { acc });
                prop_assert_eq!(fit.assignments[i], best.0);
            }
        }
        prop_assert!(counts.iter().all(|&c| c > 0));
        prop_assert!((inertia - fit.inertia).abs() <= 1e-9 * inertia.max(1.0));
        prop_assert_eq!(&fit, &kmeans(&p, k, seed, 100).unwrap());
    }

    #[test]
    fn registry_dispatch_matches_direct_call(series in grid_series(3, 3), k in 1i64..5, seed in 0i64..1000) {
        let r = assembly(3, &series, 1.0);
        let mut params = Params::new();
        params.insert("k".into(), ParamValue::Int(k));
        params.insert("seed".into(), ParamValue::Int(seed));
        let registry = Registry::with_builtins();
        let mut via = registry.run("kmeans", &[view(&r)], &params).unwrap();
        let resolved = registry.resolve_params("kmeans", &params).unwrap();
        let direct = KMeansTool.run(&[view(&r)], &resolved).unwrap();
        via.created_at = direct.created_at;
        prop_assert_eq!(via, direct);
    }
}

#[test]
fn diff_hand_case() {
    // [1, 3] normalizes to [0.5, 1.5]; [2, 2] to [1, 1]
    let input = assembly(1, &[vec![1.0, 3.0]], 1.0);
    let reference = assembly(1, &[vec![2.0, 2.0]], 1.0);
    let res = pin_diff(&view(&input), &view(&reference), F, &["A1".into()], 0.0).unwrap();
    assert_eq!(res.table("percent_difference").unwrap().values().row(0), &[-50.0, 50.0]);
    assert_eq!(res.series[0].points, vec![(0.0, -50.0), (1.0, 50.0)]);
    assert!(res.auto_plot);
}

#[test]
fn diff_zero_reference_is_a_gap() {
    let input = assembly(1, &[vec![1.0, 1.0]], 1.0);
    let reference = assembly(1, &[vec![0.0, 2.0]], 1.0);
    let res = pin_diff(&view(&input), &view(&reference), F, &[], 0.0).unwrap();
    assert_eq!(res.series[0].missing, vec![0.0]);
    // both normalize to mean 1: [1, 1] against [0, 2]
    assert_eq!(res.series[0].points, vec![(1.0, -50.0)]);
    assert!(res.table("percent_difference").unwrap().values().get(0, 0).is_nan());
}

#[test]
fn diff_errors() {
    let a = assembly(2, &vec![vec![1.0; 3]; 4], 1.0);
    let b = assembly(2, &vec![vec![1.0; 4]; 4], 1.0);
    let c = assembly(3, &vec![vec![1.0; 3]; 9], 1.0);
    assert!(matches!(pin_diff(&view(&a), &view(&b), F, &["A1".into()], 0.0), Err(AnalysisError::Shape(_))));
    assert!(matches!(pin_diff(&view(&a), &view(&c), F, &[], 0.0), Err(AnalysisError::Shape(_))));
    assert!(matches!(pin_diff(&view(&a), &view(&a), F, &["Z9".into()], 0.0), Err(AnalysisError::NotFound(_))));
}

#[test]
fn three_pins_over_49_levels() {
    let r = samples::pwr_3a();
    let p = samples::pwr_3a_perturbed(11);
    let v = r.assembly_view_at(AssemblyType::Fuel, 1, 1).unwrap();
    let w = p.assembly_view_at(AssemblyType::Fuel, 1, 1).unwrap();
    let pins: Vec<String> = ["B2", "E4", "H7"].map(String::from).to_vec();
    let res = pin_diff(&w, &v, F, &pins, 0.0).unwrap();
    assert_eq!(res.series.len(), 3);
    assert!(res.series.iter().all(|s| s.points.len() == 49));
    assert_eq!(res.series.iter().map(|s| s.name.as_str()).collect::<Vec<_>>(), ["B2", "E4", "H7"]);
    // two percent noise around a shared shape
    assert!(res.series.iter().flat_map(|s| &s.points).all(|p| p.1.abs() < 10.0));
}

#[test]
fn feature_vectors_shapes() {
    let r = assembly(2, &[vec![1.0; 49], vec![], vec![2.0; 49], vec![3.0; 49]], 1.0);
    let (labels, m) = pin_feature_vectors(&view(&r), F, 0.0).unwrap();
    assert_eq!(labels, ["A1", "B1", "B2"]);
    assert_eq!((m.rows(), m.cols()), (3, 49));

    let empty = assembly(2, &[], 1.0);
    let (labels, m) = pin_feature_vectors(&view(&empty), F, 0.0).unwrap();
    assert!(labels.is_empty());
    assert_eq!((m.rows(), m.cols()), (0, 0));

    let ragged = assembly(2, &[vec![1.0; 3], vec![1.0; 2]], 1.0);
    let err = pin_feature_vectors(&view(&ragged), F, 0.0).unwrap_err();
    assert!(matches!(&err, AnalysisError::Shape(m) if m.contains("A2")), "{err}");
}

#[test]
fn registry_listing_and_conflicts() {
    struct Echo;
    impl AnalysisTool for Echo {
        fn name(&self) -> &str {
            "echo"
        }
        fn description(&self) -> &str {
            "returns an empty result"
        }
        fn params(&self) -> Vec<ParamSpec> {
            vec![ParamSpec::new(
                "mode",
                ParamKind::Choice(vec!["a".into(), "b".into()]),
                ParamValue::Str("a".into()),
                "mode",
            )]
        }
        fn run(&self, _: &[AssemblyView<'_>], _: &Params) -> corelens::analysis::Result<AnalysisResult> {
            Ok(AnalysisResult::new("echo"))
        }
    }
    let mut reg = Registry::with_builtins();
    assert_eq!(reg.names(), ["kmeans", "pin_diff"]);
    let defaults: Vec<_> = reg.list().into_iter().map(|t| (t.name, t.is_default)).collect();
    assert_eq!(defaults, [("kmeans".to_string(), false), ("pin_diff".to_string(), true)]);
    assert!(matches!(reg.register(Arc::new(corelens::analysis::PinDiffTool)), Err(AnalysisError::Conflict(_))));
    reg.register(Arc::new(Echo)).unwrap();
    assert_eq!(reg.names(), ["echo", "kmeans", "pin_diff"]);
    let mut bad = Params::new();
    bad.insert("mode".into(), ParamValue::Str("c".into()));
    assert!(matches!(reg.run("echo", &[], &bad), Err(AnalysisError::InvalidArgument(_))));
    assert!(matches!(reg.run("nope", &[], &Params::new()), Err(AnalysisError::NotFound(_))));
}
