use super::*;
use crate::ratings::RatingScale;
use proptest::prelude::*;

fn cm(a: u64, b: u64, c: u64, d: u64) -> ConfusionMatrix {
    ConfusionMatrix {
        true_negative: a,
        false_positive: b,
        false_negative: c,
        true_positive: d,
    }
}

#[test]
fn single_item_classification() {
    let got = classify_top_n(&[(1, 4)], &[(1, 4.2)], 5, 3).unwrap();
    assert_eq!(got, cm(0, 0, 0, 1));
    let got = classify_top_n(&[(1, 2)], &[(1, 4.2)], 5, 3).unwrap();
    assert_eq!(got, cm(0, 1, 0, 0));
}

#[test]
fn four_item_classification() {
    let test = [(1, 5), (2, 2), (3, 4), (4, 1)];
    let preds = [(1, 4.5), (2, 4.0), (3, 3.5), (4, 2.0)];
    assert_eq!(classify_top_n(&test, &preds, 2, 3).unwrap(), cm(1, 1, 1, 1));
}

#[test]
fn low_predictions_inside_top_n_are_negative() {
    let got = classify_top_n(&[(1, 4), (2, 1)], &[(1, 2.9), (2, 1.0)], 5, 3).unwrap();
    assert_eq!(got, cm(1, 0, 1, 0));
}

#[test]
fn mismatched_items_are_protocol_errors() {
    assert!(matches!(
        classify_top_n(&[(1, 4)], &[(2, 4.0)], 1, 3),
        Err(Error::Protocol(_))
    ));
    assert!(matches!(
        classify_top_n(&[(1, 4), (2, 3)], &[(1, 4.0)], 1, 3),
        Err(Error::Protocol(_))
    ));
    assert!(matches!(
        classify_top_n(&[(1, 4), (2, 3)], &[(1, 4.0), (1, 3.0)], 1, 3),
        Err(Error::Protocol(_))
    ));
    assert!(matches!(
        classify_top_n(&[], &[], 1, 3),
        Err(Error::Protocol(_))
    ));
}

#[test]
fn mae_examples() {
    let (sum, count) = mae_over_top_n(
        &[(1, 4), (2, 2), (3, 1)],
        &[(1, 3.5), (2, 2.0), (3, 1.0)],
        2,
    )
    .unwrap();
    assert_eq!((sum, count), (0.5, 2));
    assert_eq!(sum / count as f64, 0.25);
    let (sum, count) = mae_over_top_n(&[(1, 4), (2, 2)], &[(1, 4.0), (2, 2.0)], 5).unwrap();
    assert_eq!((sum, count), (0.0, 2));
    let (sum, count) = mae_over_top_n(&[(7, 5)], &[(7, 1.0)], 5).unwrap();
    assert_eq!(sum / count as f64, 4.0);
}

#[test]
fn metric_substitution() {
    let m = compute_metrics(&cm(1, 1, 1, 1), 1.0, 4).unwrap();
    assert_eq!(
        (m.accuracy, m.precision, m.recall),
        (50.0, Some(50.0), Some(50.0))
    );
    assert_eq!(m.mae, 0.25);
    let m = compute_metrics(&cm(0, 1, 0, 9), 0.0, 1).unwrap();
    assert_eq!(m.precision, Some(90.0));
    let m = compute_metrics(&cm(3, 0, 0, 5), 0.0, 1).unwrap();
    assert_eq!(m.recall, Some(100.0));
    let m = compute_metrics(&cm(3, 0, 0, 0), 0.0, 1).unwrap();
    assert_eq!((m.precision, m.recall), (None, None));
    assert!(compute_metrics(&cm(0, 0, 0, 0), 0.0, 0).is_err());
}

#[test]
fn method_keys_parse() {
    for m in Method::ALL {
        assert_eq!(m.key().parse::<Method>().unwrap(), m);
        assert_eq!(m.label().parse::<Method>().unwrap(), m);
    }
    assert!("svd".parse::<Method>().is_err());
    assert!(Method::Fcnhsmra.config(50, true).predictor.use_reliability);
    assert!(!Method::Fnhsm.config(50, true).predictor.use_reliability);
}

#[test]
fn protocol_validation() {
    assert!(EvalProtocol::default().validate().is_ok());
    let mut p = EvalProtocol {
        top_n_values: vec![10, 5],
        ..EvalProtocol::default()
    };
    assert!(p.validate().is_err());
    p.top_n_values = vec![];
    assert!(p.validate().is_err());
    let p = EvalProtocol {
        folds: 1,
        ..EvalProtocol::default()
    };
    assert!(p.validate().is_err());
}

#[test]
fn fcm_seeds_differ_per_cell() {
    let mut seen = std::collections::HashSet::new();
    for fold in 0..5 {
        for rep in 0..5 {
            assert!(seen.insert(fcm_seed(42, fold, rep)));
        }
    }
}

fn synthetic_matrix() -> RatingsMatrix {
    let mut entries = Vec::new();
    for u in 0..8u32 {
        for p in 0..6u32 {
            if (u + p) % 3 != 0 {
                entries.push((u, p, 1 + ((u * 7 + p * 3) % 5) as u8));
            }
        }
    }
    RatingsMatrix::from_entries(RatingScale::default(), &entries).unwrap()
}

fn smoke_protocol() -> EvalProtocol {
    EvalProtocol {
        top_n_values: vec![1, 2, 3],
        folds: 2,
        repetitions: 2,
        seed: 9,
        clustering: FcmConfig {
            cluster_count: 2,
            ..FcmConfig::default()
        },
        ..EvalProtocol::default()
    }
}

#[test]
fn structural_smoke_run() {
    let m = synthetic_matrix();
    let protocol = smoke_protocol();
    let methods: Vec<MethodConfig> = Method::ALL.iter().map(|m| m.config(5, true)).collect();
    let reports = run_experiment(&m, &protocol, &methods).unwrap();
    assert_eq!(reports.len(), 6);
    for r in &reports {
        assert_eq!(r.records.len(), 2 * 2 * 3);
        assert_eq!(r.predictions, 2 * m.len() as u64);
        for rec in &r.records {
            let mt = rec.metrics;
            assert!(mt.mae >= 0.0 && mt.mae <= 4.0);
            assert!((0.0..=100.0).contains(&mt.accuracy));
            for v in [mt.precision, mt.recall].into_iter().flatten() {
                assert!((0.0..=100.0).contains(&v));
            }
        }
        let mean_acc: f64 =
            r.per_top_n.iter().map(|s| s.metrics.accuracy).sum::<f64>() / r.per_top_n.len() as f64;
        assert!((mean_acc - r.average.accuracy).abs() < 1e-9);
    }
}

#[test]
fn confusion_totals_cover_every_test_rating() {
    let m = synthetic_matrix();
    let protocol = smoke_protocol();
    let folds = prepare_folds(&m, &protocol).unwrap();
    let reports = run_experiment(&m, &protocol, &[Method::Fcnhsmra.config(5, true)]).unwrap();
    for rec in &reports[0].records {
        assert_eq!(rec.confusion.total() as usize, folds[rec.fold].test.len());
    }
}

#[test]
fn runs_are_reproducible() {
    let m = synthetic_matrix();
    let protocol = smoke_protocol();
    let methods = [
        Method::Fcnhsmra.config(5, true),
        Method::Pearson.config(5, true),
    ];
    let a = run_experiment(&m, &protocol, &methods).unwrap();
    let b = run_experiment(&m, &protocol, &methods).unwrap();
    assert_eq!(a, b);
}

#[test]
fn macro_averaging_runs() {
    let m = synthetic_matrix();
    let protocol = EvalProtocol {
        averaging: AveragingMode::Macro,
        ..smoke_protocol()
    };
    let reports = run_experiment(&m, &protocol, &[Method::Fnhsm.config(5, true)]).unwrap();
    assert!(reports[0].average.mae >= 0.0);
}

#[test]
fn report_rendering() {
    let m = synthetic_matrix();
    let protocol = smoke_protocol();
    let reports = run_experiment(
        &m,
        &protocol,
        &[
            Method::Fcnhsmra.config(5, true),
            Method::Cosine.config(5, true),
        ],
    )
    .unwrap();
    let header = ReportHeader::for_protocol(&protocol, &reports);
    let csv = render_csv(&header, &reports);
    let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "method,metric,top_n,value");
    // 2 methods × 4 metrics × (3 Top-N + average)
    assert_eq!(rows.len(), 1 + 2 * 4 * 4);
    assert!(csv.contains("# averaging=micro"));
    assert!(csv.contains("# clamp=on"));
    assert!(csv.contains("FCNHSMRA_HRS,MAE,average,"));
    let table = render_table(&header, &reports);
    assert!(table.contains("F_CF Cosine"));
    assert!(table.contains("Top 3"));
}

#[test]
fn recall_can_rise_with_threshold() {
    // a stricter threshold drops the missed positive (item 2) from the
    // denominator, so recall is not monotone in the threshold
    let test = [(1, 4), (2, 3)];
    let preds = [(1, 4.0), (2, 2.0)];
    let at = |t| {
        let c = classify_top_n(&test, &preds, 5, t).unwrap();
        compute_metrics(&c, 0.0, 1).unwrap().recall.unwrap()
    };
    assert_eq!(at(3), 50.0);
    assert_eq!(at(4), 100.0);
}

proptest! {
    #[test]
    fn true_positives_grow_with_n(
        ratings in prop::collection::vec((1u8..=5, 1.0f64..5.0), 1..20),
    ) {
        let test: Vec<(ItemId, Rating)> =
            ratings.iter().enumerate().map(|(i, r)| (i as ItemId, r.0)).collect();
        let preds: Vec<(ItemId, f64)> =
            ratings.iter().enumerate().map(|(i, r)| (i as ItemId, r.1)).collect();
        let mut prev = 0;
        for n in 1..=ratings.len() + 2 {
            let c = classify_top_n(&test, &preds, n, 3).unwrap();
            prop_assert!(c.true_positive >= prev);
            prop_assert_eq!(c.total() as usize, ratings.len());
            prev = c.true_positive;
        }
    }
}

#[test]
fn list_scope_classifies_only_the_top_n() {
    let test = [(1, 5), (2, 2), (3, 4), (4, 1)];
    let preds = [(1, 4.5), (2, 4.0), (3, 3.5), (4, 2.0)];
    assert_eq!(
        classify_top_n_list(&test, &preds, 2, 3).unwrap(),
        cm(0, 1, 0, 1)
    );
    assert_eq!(
        classify_top_n_list(&test, &preds, 9, 3).unwrap(),
        cm(1, 1, 0, 2)
    );
    assert_eq!(
        "top-n-list".parse::<EvaluationScope>().unwrap(),
        EvaluationScope::TopNList
    );
    assert!("users".parse::<EvaluationScope>().is_err());
}

#[test]
fn list_scope_totals_are_capped_by_n() {
    let m = synthetic_matrix();
    let protocol = EvalProtocol {
        scope: EvaluationScope::TopNList,
        ..smoke_protocol()
    };
    let reports = run_experiment(&m, &protocol, &[Method::Fnhsm.config(5, true)]).unwrap();
    let folds = prepare_folds(&m, &protocol).unwrap();
    for rec in &reports[0].records {
        let capped: usize = m
            .users()
            .iter()
            .map(|&u| {
                folds[rec.fold]
                    .test
                    .iter()
                    .filter(|e| e.0 == u)
                    .count()
                    .min(rec.top_n)
            })
            .sum();
        assert_eq!(rec.confusion.total() as usize, capped);
    }
}
