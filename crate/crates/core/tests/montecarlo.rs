use concat_decode::blockwise::exact_blockwise_recursion;
use concat_decode::code::{five_qubit, steane, TableRule};
use concat_decode::montecarlo::{run_experiment, DecoderKind, ExperimentConfig};

fn blockwise_config(p: f64, trials: u64) -> ExperimentConfig {
    ExperimentConfig {
        code: five_qubit(),
        ps: vec![p],
        levels: vec![1, 2, 3, 4],
        trials,
        seed: 11,
        decoders: vec![DecoderKind::Blockwise],
        table: TableRule::MaxLikelihood,
        threads: None,
    }
}

#[test]
fn sampled_blockwise_matches_exact_recursion() {
    let code = five_qubit();
    for p in [0.05, 0.1, 0.13] {
        let trials = 20_000;
        let exp = run_experiment(&blockwise_config(p, trials)).unwrap();
        let exact = exact_blockwise_recursion(&code, p, 4, &code.hard_table(p).unwrap()).unwrap();
        for row in &exact {
            let mc = exp.row(p, row.level, DecoderKind::Blockwise).unwrap();
            let sigma = (row.p_e * (1.0 - row.p_e) / trials as f64).sqrt();
            assert!(
                (mc.p_e - row.p_e).abs() <= 3.0 * sigma.max(1.0 / trials as f64),
                "p={p} level={}: sampled {} exact {}",
                row.level,
                mc.p_e,
                row.p_e
            );
        }
    }
}

#[test]
fn sampled_css_blockwise_matches_exact_recursion() {
    let code = steane();
    let p = 0.05;
    let trials = 20_000;
    let mut config = blockwise_config(p, trials);
    config.code = code.clone();
    config.levels = vec![1, 2, 3];
    config.table = TableRule::Css;
    let exp = run_experiment(&config).unwrap();
    let exact = exact_blockwise_recursion(&code, p, 3, &code.css_table().unwrap()).unwrap();
    for row in &exact {
        let mc = exp.row(p, row.level, DecoderKind::Blockwise).unwrap();
        let sigma = (row.p_e * (1.0 - row.p_e) / trials as f64).sqrt();
        assert!((mc.p_e - row.p_e).abs() <= 3.0 * sigma.max(1.0 / trials as f64));
    }
}

#[test]
fn message_passing_never_worse_than_blockwise() {
    let mut config = blockwise_config(0.16, 5_000);
    config.decoders = vec![DecoderKind::Bp, DecoderKind::Blockwise];
    let exp = run_experiment(&config).unwrap();
    assert_eq!(exp.pairings.len(), 4);
    for cell in &exp.pairings {
        let c = cell.counts;
        assert!(
            c.bp_failures as f64 <= c.blockwise_failures as f64 + 3.0 * c.difference_sigma(),
            "{cell:?}"
        );
        assert_eq!(
            c.bp_failures - c.bp_only,
            c.blockwise_failures - c.blockwise_only
        );
    }
}

#[test]
fn confidence_is_calibrated() {
    // For exact posteriors the mean confidence equals the success rate.
    let mut config = blockwise_config(0.15, 20_000);
    config.levels = vec![3];
    config.decoders = vec![DecoderKind::Bp];
    let exp = run_experiment(&config).unwrap();
    let row = &exp.rows[0];
    let success = 1.0 - row.p_e;
    let mean = success * row.mean_conf_success.unwrap() + row.p_e * row.mean_conf_failure.unwrap();
    let sigma = (success * row.p_e / row.trials as f64).sqrt();
    assert!(
        (mean - success).abs() < 4.0 * sigma,
        "mean {mean} success {success}"
    );
}
