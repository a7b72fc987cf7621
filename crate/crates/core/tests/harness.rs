//! End-to-end harness behavior: protocol shape, determinism, scenario
//! equivalence, stage tagging, and null-data sanity.

use ropr_core::dataset::{generate_synthetic, RawRecord, VARIABLE_NAMES};
use ropr_core::error::Error;
use ropr_core::evaluation::{run_experiment, ExperimentConfig};

fn paper_sized_records(seed: u64) -> Vec<RawRecord> {
    generate_synthetic(174, 569, &[2, 5], 2.0, seed).unwrap()
}

#[test]
fn paper_shape_run_has_expected_grid() {
    let records = paper_sized_records(1);
    let config = ExperimentConfig {
        seed: 7,
        external_ranking: Some(VARIABLE_NAMES.iter().map(|s| s.to_string()).collect()),
        ..Default::default()
    };
    let artifacts = run_experiment(&records, &config).unwrap();
    let report = &artifacts.report;

    assert_eq!(report.dataset.train_total, 594);
    assert_eq!(report.dataset.train_positives, 139);
    assert_eq!(report.dataset.test_total, 149);
    assert_eq!(report.dataset.test_positives, 35);

    // three scenarios by two hyperparameters, for both model families
    assert_eq!(report.knn.rows.len(), 3);
    assert_eq!(report.knn.columns, vec!["k=2", "k=3"]);
    assert_eq!(report.bayes.rows.len(), 3);
    assert_eq!(report.bayes.columns, vec!["NED (3)", "NED (4)"]);
    let scenarios: Vec<&str> = report.knn.rows.iter().map(|r| r.scenario.as_str()).collect();
    assert_eq!(scenarios, vec!["All variables", "FP Tree", "External ranking"]);
    for row in report.knn.rows.iter().chain(&report.bayes.rows) {
        assert_eq!(row.cells.len(), 2);
        for cell in &row.cells {
            assert!((0.0..=1.0).contains(&cell.sensitivity));
            assert!((0.0..=1.0).contains(&cell.false_alarm_rate));
            assert_eq!(cell.confusion.total(), 149);
        }
    }

    // FP Tree scenario keeps 8 - drop_k variables
    assert_eq!(report.knn.rows[1].kept_variables.len(), 6);
    // models for every scenario-hyperparameter cell
    assert_eq!(artifacts.knn_models.len(), 6);
    assert_eq!(artifacts.bn_models.len(), 6);
}

#[test]
fn same_seed_gives_byte_identical_reports() {
    let records = paper_sized_records(3);
    let config = ExperimentConfig {
        seed: 11,
        ..Default::default()
    };
    let a = run_experiment(&records, &config).unwrap();
    let b = run_experiment(&records, &config).unwrap();
    assert_eq!(
        a.report.to_json().unwrap(),
        b.report.to_json().unwrap()
    );
    assert_eq!(a.report.render_text(), b.report.render_text());
}

#[test]
fn without_external_ranking_the_grid_has_two_scenarios() {
    let records = paper_sized_records(5);
    let artifacts = run_experiment(&records, &ExperimentConfig::default()).unwrap();
    assert_eq!(artifacts.report.knn.rows.len(), 2);
    assert_eq!(artifacts.report.bayes.rows.len(), 2);
}

#[test]
fn drop_zero_makes_selection_scenarios_identical() {
    let records = paper_sized_records(9);
    let config = ExperimentConfig {
        drop_k: 0,
        ..Default::default()
    };
    let report = run_experiment(&records, &config).unwrap().report;
    assert_eq!(report.knn.rows[0].cells, report.knn.rows[1].cells);
    assert_eq!(report.bayes.rows[0].cells, report.bayes.rows[1].cells);
}

#[test]
fn component_errors_carry_their_pipeline_stage() {
    // constant variables cannot be discretized
    let records: Vec<RawRecord> = (0..40)
        .map(|i| RawRecord::new([1.0; 8], i % 4 == 0))
        .collect();
    match run_experiment(&records, &ExperimentConfig::default()) {
        Err(Error::Stage { stage, .. }) => assert_eq!(stage, "discretize"),
        other => panic!("expected a stage-tagged error, got {other:?}"),
    }
}

#[test]
fn config_validation_happens_before_any_work() {
    let config = ExperimentConfig {
        threshold: 1.5,
        ..Default::default()
    };
    match run_experiment(&[], &config) {
        Err(Error::Stage { stage, source }) => {
            assert_eq!(stage, "config");
            assert!(matches!(*source, Error::InvalidConfig(_)));
        }
        other => panic!("expected config-stage error, got {other:?}"),
    }
}

#[test]
fn null_data_sensitivity_tracks_positive_prediction_rate() {
    // with effect size 0 the label is independent of every variable, so
    // P(predict 1 | label 1) should track P(predict 1) for each model; the
    // band is wide relative to the Monte-Carlo noise of the seed average
    let n_seeds = 12;
    let mut knn_gap = 0.0;
    let mut bn_gap = 0.0;
    for seed in 0..n_seeds {
        let records = generate_synthetic(174, 569, &[], 0.0, 1000 + seed).unwrap();
        let config = ExperimentConfig {
            seed,
            ..Default::default()
        };
        let report = run_experiment(&records, &config).unwrap().report;
        let knn_cell = &report.knn.rows[1].cells[0];
        let bn_cell = &report.bayes.rows[1].cells[0];
        for (cell, gap) in [(knn_cell, &mut knn_gap), (bn_cell, &mut bn_gap)] {
            let c = &cell.confusion;
            let predicted_positive_rate =
                (c.true_positives + c.false_positives) as f64 / c.total() as f64;
            *gap += cell.sensitivity - predicted_positive_rate;
        }
    }
    let knn_mean_gap = knn_gap / n_seeds as f64;
    let bn_mean_gap = bn_gap / n_seeds as f64;
    assert!(knn_mean_gap.abs() < 0.1, "knn gap {knn_mean_gap}");
    assert!(bn_mean_gap.abs() < 0.1, "bn gap {bn_mean_gap}");
}
