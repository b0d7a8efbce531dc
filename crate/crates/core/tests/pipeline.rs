//! End-to-end library workflow at small scale: simulate, detect,
//! evaluate, summarize, compare, plot, and round-trip the files.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use mmcmc::io;
use mmcmc::*;

fn m_value_baseline(n: usize, samples: usize, seed: u64) -> MethylationMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = Vec::with_capacity(n * samples);
    for _ in 0..n {
        let low = rng.random::<f64>() < 0.6;
        let z: f64 = rng.sample(StandardNormal);
        let mu = if low { -2.0 + 0.6 * z } else { 2.0 + 0.6 * z };
        for _ in 0..samples {
            values.push(mu);
        }
    }
    MethylationMatrix::new(
        (0..n).map(|i| format!("cg{i:08}")).collect(),
        vec!["6".to_string(); n],
        (0..samples)
            .map(|j| format!("M_sample_{}", j + 1))
            .collect(),
        values,
    )
    .unwrap()
}

#[test]
fn simulate_detect_evaluate_roundtrip() {
    let baseline = m_value_baseline(600, 8, 42);
    let sim = SimConfig {
        n_dmrs: 3,
        lengths: vec![20, 30],
        shifts: vec![2.0],
        seed: 4,
        ..SimConfig::default()
    };
    let (cancer, normal, truth) = simulate_dataset(&baseline, &sim).unwrap();

    let config = DetectConfig {
        max_stages: 3,
        num_splits: 6,
        mcmc: McmcConfig {
            nburn: 300,
            niter: 600,
            thin: 1,
            seed: 0,
        },
        master_seed: 9,
        ..DetectConfig::default()
    };
    let table = mmcmc_detect(&cancer, &normal, &config).unwrap();

    // Every emitted record clears its stage threshold.
    for r in &table.records {
        assert!(r.decision_value > config.bf_thresholds[(r.stage - 1) as usize]);
        assert!(r.stage >= 1 && r.stage <= config.max_stages);
    }

    // Records survive a file round-trip bit-compatibly at 6 decimals.
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dmrs.csv");
    io::save_dmr_table(&table, &path).unwrap();
    let reloaded = io::load_dmr_table(&path).unwrap();
    assert_eq!(reloaded.len(), table.len());
    for (a, b) in reloaded.records.iter().zip(&table.records) {
        assert_eq!(a.start_cpg_id, b.start_cpg_id);
        assert!((a.decision_value - b.decision_value).abs() < 5e-7);
    }

    // Evaluation runs against the reloaded table and the truth file.
    let truth_path = dir.path().join("truth.csv");
    io::save_ground_truth(&truth, &truth_path).unwrap();
    let truth_back = io::load_ground_truth(&truth_path).unwrap();
    assert_eq!(truth_back, truth);
    let metrics = evaluate(&reloaded, &truth_back, &cancer).unwrap();
    assert!(metrics.sensitivity >= 0.0 && metrics.sensitivity <= 1.0);
    assert!(metrics.fdr >= 0.0 && metrics.fdr <= 1.0);
    assert_eq!(metrics.n_truth, 3);

    // Summaries and self-comparison served from the same table.
    let summary = summarize_dmrs(&reloaded);
    assert_eq!(summary.n_dmrs, reloaded.len());
    if !reloaded.is_empty() {
        let report = compare_dmrs(&reloaded, &reloaded, &cancer).unwrap();
        assert!(report
            .pairs
            .iter()
            .filter(|p| p.index_a == p.index_b)
            .all(|p| p.overlap_percent == 100.0));

        let plot = plot_dmr_region(&reloaded, &cancer, &normal, 1).unwrap();
        assert_eq!(plot.cancer.len(), reloaded.records[0].cpg_count);
        let svg = plot.to_svg();
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches("class=\"series\"").count(), 2);
    }
}

#[test]
fn detection_finds_strong_regions_and_is_reproducible() {
    let baseline = m_value_baseline(500, 10, 7);
    let sim = SimConfig {
        n_dmrs: 2,
        lengths: vec![50],
        shifts: vec![2.0],
        noise_sd: 0.3,
        seed: 21,
    };
    let (cancer, normal, truth) = simulate_dataset(&baseline, &sim).unwrap();
    let config = DetectConfig {
        max_stages: 2,
        num_splits: 10,
        mcmc: McmcConfig {
            nburn: 400,
            niter: 800,
            thin: 1,
            seed: 0,
        },
        master_seed: 3,
        ..DetectConfig::default()
    };
    let first = mmcmc_detect(&cancer, &normal, &config).unwrap();
    let second = mmcmc_detect(&cancer, &normal, &config).unwrap();
    assert_eq!(first, second);

    let metrics = evaluate(&first, &truth, &cancer).unwrap();
    assert!(
        metrics.sensitivity >= 0.5,
        "expected the strong injected regions to be found, sensitivity = {}",
        metrics.sensitivity
    );
}

#[test]
fn beta_input_pipeline() {
    // Beta-valued input converted at load produces a valid M-value
    // matrix for detection.
    let n = 60;
    let ids: Vec<String> = (0..n).map(|i| format!("cg{i:05}")).collect();
    let betas: Vec<f64> = (0..n * 4).map(|k| ((k % 10) as f64 + 0.5) / 11.0).collect();
    let mut matrix = MethylationMatrix::new(
        ids,
        vec!["6".into(); n],
        (0..4).map(|j| format!("s{j}")).collect(),
        betas,
    )
    .unwrap();
    io::convert_beta_matrix(&mut matrix, io::DEFAULT_BETA_OFFSET).unwrap();
    for row in 0..n {
        for col in 0..4 {
            assert!(matrix.value(row, col).is_finite());
        }
    }
    // beta = 0.5 maps to zero exactly; ordering is preserved.
    let config = DetectConfig {
        max_stages: 1,
        bf_thresholds: vec![f64::NEG_INFINITY],
        fit_stub: true,
        ..DetectConfig::default()
    };
    let table = mmcmc_detect(&matrix, &matrix, &config).unwrap();
    assert_eq!(table.len(), 1);
    assert_eq!(table.records[0].cpg_count, n);
}
