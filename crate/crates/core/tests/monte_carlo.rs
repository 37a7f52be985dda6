use sst_core::{exhaustive_stats, run_experiment, ExperimentConfig, IndexCache, DEFAULT_BUDGET};

fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[test]
fn monte_carlo_agrees_with_exact_statistics() {
    let exact = exhaustive_stats(3, 4, 1, DEFAULT_BUDGET).unwrap();
    let config = ExperimentConfig::new(3).with_len(4).with_history(50_000).with_seed(11);
    let run = run_experiment(&config, &IndexCache::new()).unwrap();

    let lc: Vec<f64> = run.trials.iter().map(|t| t.lc).collect();
    let tlc: Vec<f64> = run.trials.iter().map(|t| t.tlc).collect();
    let wins: Vec<f64> = run.trials.iter().map(|t| t.success as u8 as f64).collect();

    for (name, sample, truth) in [
        ("lc", &lc, exact.mean_lc_x),
        ("tlc", &tlc, exact.mean_lc_y),
        ("success", &wins, exact.success_fraction),
    ] {
        let (mean, se) = mean_and_se(sample);
        assert!(
            (mean - truth).abs() <= 3.0 * se,
            "{name}: sample {mean} vs exact {truth} (se {se})"
        );
    }
    assert!((run.report.pcs / 100.0 - mean_and_se(&wins).0).abs() < 1e-12);
}

#[test]
fn report_is_independent_of_thread_count() {
    let config = ExperimentConfig::new(5).with_history(500).with_seed(99);
    let single = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(|| run_experiment(&config, &IndexCache::new()).unwrap());
    let multi = rayon::ThreadPoolBuilder::new()
        .num_threads(4)
        .build()
        .unwrap()
        .install(|| run_experiment(&config, &IndexCache::new()).unwrap());
    assert_eq!(single, multi);
}
