use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::baselines::MdReading;

fn config(model: &ModelSpec, n: usize, reps: usize, methods: &[&str], seed: u64) -> ExperimentConfig {
    let methods = methods.iter().map(|m| m.parse().unwrap()).collect();
    ExperimentConfig::new(model, n, reps, methods, seed)
}

#[test]
fn method_names() {
    for name in ["stein", "stein:log", "stein:identity+one", "mle", "moment", "score_matching", "minimum_distance"] {
        let m: Method = name.parse().unwrap();
        assert_eq!(m.to_string(), name);
    }
    assert_eq!("SM".parse::<Method>().unwrap().to_string(), "score_matching");
    assert!("stein:".parse::<Method>().is_err());
    assert!("bayes".parse::<Method>().is_err());
}

#[test]
fn single_repetition_bias_is_the_error_of_that_draw() {
    let model = ModelSpec::logarithmic(0.5).unwrap();
    let cfg = config(&model, 50, 1, &["stein"], 77);
    let rows = run_experiment(&cfg).unwrap();
    let data = Sampler::new(&model).unwrap().sample(50, &mut stream_rng(77, 0));
    let est = stein_estimate(model.setting(), &data, &[TestFunction::KMinus1]).unwrap();
    let err = est.value().unwrap()[0] - 0.5;
    assert_eq!(rows[0].bias, err);
    assert_eq!(rows[0].mse, err * err);
    assert_eq!(rows[0].reps_used, 1);
    assert_eq!(rows[0].ne_percent, 0.0);
}

#[test]
fn rows_cover_components_and_methods() {
    let model = ModelSpec::beta_neg_binomial(9.0, 2.0, 3.0).unwrap();
    let cfg = config(&model, 40, 20, &["stein", "stein:identity+one", "mle"], 1);
    let rows = run_experiment(&cfg).unwrap();
    assert_eq!(rows.len(), 2 * 3);
    assert_eq!(rows[0].param, "alpha");
    assert_eq!(rows[1].param, "beta");
    assert_eq!(rows[2].method, "stein:identity+one");
    for r in &rows {
        assert!(r.reps_used == 0 || r.mse >= r.bias * r.bias, "{r:?}");
        let ne = 100.0 * (20 - r.reps_used) as f64 / 20.0;
        assert_eq!(r.ne_percent, ne);
        assert_eq!(r.wall_seconds, 0.0);
    }
}

#[test]
fn deterministic_across_worker_counts() {
    let model = ModelSpec::yule_simon(1.0).unwrap();
    let cfg = config(&model, 50, 60, &["stein", "mle", "score_matching"], 5);
    let one = format_report(&run_experiment_with_threads(&cfg, 1).unwrap()).unwrap();
    let four = format_report(&run_experiment_with_threads(&cfg, 4).unwrap()).unwrap();
    assert_eq!(one, four);
}

#[test]
fn dnm_moment_estimator_with_small_alpha0() {
    let model = ModelSpec::dirichlet_neg_multinomial(5.0, 0.5, &[2.0, 2.0, 2.0]).unwrap();
    let cfg = config(&model, 200, 40, &["stein", "moment"], 3);
    let rows = run_experiment(&cfg).unwrap();
    for r in &rows {
        match r.method.as_str() {
            "moment" => {
                assert_eq!(r.ne_percent, 100.0);
                assert!(r.bias.is_nan());
            }
            _ => assert_eq!(r.ne_percent, 0.0),
        }
    }
    let reasons = ne_breakdown(&cfg).unwrap();
    assert_eq!(reasons, vec![("moment".to_string(), NeReason::OutOfDomain, 40)]);
}

#[test]
fn invalid_pairings_are_config_errors() {
    let model = ModelSpec::poisson(2.0).unwrap();
    for m in ["moment", "score_matching", "minimum_distance", "stein:sqrt", "stein:identity+one"] {
        let err = run_experiment(&config(&model, 10, 5, &[m], 1)).unwrap_err();
        assert!(matches!(err, Error::Config(_)), "{m}: {err}");
    }
    let mut cfg = config(&model, 10, 5, &["stein"], 1);
    cfg.domain_mode = DomainMode::Estimated;
    assert!(matches!(run_experiment(&cfg), Err(Error::Config(_))));
    cfg.domain_mode = DomainMode::Known;
    cfg.reps = 0;
    assert!(matches!(run_experiment(&cfg), Err(Error::Config(_))));
}

#[test]
fn bnb_outlier_rule() {
    let model = ModelSpec::beta_neg_binomial(9.0, 2.0, 3.0).unwrap();
    let mut cfg = config(&model, 50, 30, &["stein"], 8);
    cfg.ne_policy.bnb_outlier_threshold = None;
    let eligible = run_experiment(&cfg).unwrap()[0].reps_used;
    assert!(eligible > 0);
    cfg.ne_policy.bnb_outlier_threshold = Some(1e-9);
    let rows = run_experiment(&cfg).unwrap();
    assert_eq!(rows[0].ne_percent, 100.0);
    // range violations keep their own reason; every other estimate is an outlier
    let reasons = ne_breakdown(&cfg).unwrap();
    assert!(reasons.contains(&("stein".to_string(), NeReason::OutlierTruncated, eligible)), "{reasons:?}");
    // the rule is specific to BNB
    let lg = ModelSpec::logarithmic(0.5).unwrap();
    let mut cfg = config(&lg, 50, 30, &["stein"], 8);
    cfg.ne_policy.bnb_outlier_threshold = Some(1e-9);
    assert_eq!(run_experiment(&cfg).unwrap()[0].ne_percent, 0.0);
}

#[test]
fn runtime_budget_marks_slow_calls() {
    let model = ModelSpec::logarithmic(0.5).unwrap();
    let mut cfg = config(&model, 50, 10, &["mle"], 8);
    cfg.ne_policy.runtime_seconds = Some(1e-12);
    let rows = run_experiment(&cfg).unwrap();
    assert_eq!(rows[0].ne_percent, 100.0);
}

#[test]
fn estimated_domain_mode() {
    let model = ModelSpec::trunc_poisson(2.0, 2, Some(40)).unwrap();
    let mut cfg = config(&model, 200, 50, &["stein", "mle"], 4);
    cfg.domain_mode = DomainMode::Estimated;
    let rows = run_experiment(&cfg).unwrap();
    for r in &rows {
        assert_eq!(r.ne_percent, 0.0, "{r:?}");
        assert!(r.bias.abs() < 0.2, "{r:?}");
    }
    let open = ModelSpec::trunc_poisson(0.9, 6, None).unwrap();
    let mut cfg = config(&open, 50, 30, &["stein"], 4);
    cfg.domain_mode = DomainMode::Estimated;
    assert!(run_experiment(&cfg).unwrap()[0].reps_used > 0);
}

#[test]
fn halving_reps_doubles_the_variance_of_the_bias() {
    let model = ModelSpec::poisson(2.0).unwrap();
    let batches = 200;
    let spread = |reps: usize| -> f64 {
        let biases: Vec<f64> = (0..batches)
            .map(|b| run_experiment(&config(&model, 20, reps, &["stein"], 1000 + b)).unwrap()[0].bias)
            .collect();
        let mean = biases.iter().sum::<f64>() / batches as f64;
        biases.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (batches - 1) as f64
    };
    let ratio = spread(50) / spread(100);
    // each variance has relative SE ≈ sqrt(2/199), so the ratio has SE ≈ 2·sqrt(4/199)
    let se = 2.0 * (2.0 * 2.0 / (batches - 1) as f64).sqrt();
    assert!((ratio - 2.0).abs() < 3.0 * se, "ratio {ratio}");
}

fn random_config(rng: &mut ChaCha8Rng) -> ExperimentConfig {
    let models = [
        ModelSpec::poisson(rng.random_range(0.1..10.0)).unwrap(),
        ModelSpec::yule_simon(rng.random_range(0.5..5.0)).unwrap(),
        ModelSpec::beta_neg_binomial(rng.random_range(2.0..9.0), rng.random_range(1.0..4.0), 3.0).unwrap(),
        ModelSpec::trunc_poisson(rng.random_range(0.5..4.0), 2, if rng.random() { Some(40) } else { None }).unwrap(),
        ModelSpec::trunc_neg_multinomial(5.0, &[0.2, rng.random_range(0.1..0.4)], &[0, 1], &[8, 9]).unwrap(),
        ModelSpec::dirichlet_neg_multinomial(5.0, rng.random_range(0.5..5.0), &[2.0, 2.0]).unwrap(),
    ];
    let model = &models[rng.random_range(0..models.len())];
    let mut methods = vec!["stein".to_string(), "mle".to_string()];
    match model.family() {
        Family::YuleSimon => methods.extend(["stein:log".into(), "score_matching".into(), "minimum_distance".into()]),
        Family::DirichletNegMultinomial => methods.push("moment".into()),
        _ => {}
    }
    let mut cfg = config(
        model,
        rng.random_range(1..500),
        rng.random_range(1..20_000),
        &methods.iter().map(String::as_str).collect::<Vec<_>>(),
        rng.random(),
    );
    if model.family().is_truncated() && rng.random() {
        cfg.domain_mode = DomainMode::Estimated;
    }
    cfg.ne_policy = NePolicy {
        bnb_outlier_threshold: rng.random::<bool>().then(|| rng.random_range(1.0..20.0)),
        runtime_seconds: rng.random::<bool>().then(|| rng.random_range(0.5..60.0)),
    };
    cfg.baseline.md_reading = [MdReading::InclusiveTail, MdReading::AsPrinted, MdReading::SquareInside][rng.random_range(0..3)];
    cfg.baseline.budget.max_iters = rng.random_range(10..10_000);
    cfg.timing = rng.random();
    cfg
}

#[test]
fn config_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let configs: Vec<ExperimentConfig> = (0..100).map(|_| random_config(&mut rng)).collect();
    for c in &configs {
        c.validate().unwrap();
        let back = parse_configs(&format_configs(std::slice::from_ref(c))).unwrap();
        assert_eq!(back, vec![c.clone()]);
    }
    assert_eq!(parse_configs(&format_configs(&configs)).unwrap(), configs);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("study.json");
    write_config(&configs[..3], &path).unwrap();
    assert_eq!(read_config(&path).unwrap(), configs[..3].to_vec());
}

#[test]
fn config_errors_point_at_the_problem() {
    let text = "{\n  \"model\": {\"family\": \"poisson\", \"params\": {\"lambda\": 2}},\n  \"n\": 50,\n  \"methods\": [\"stein\"],\n  \"seed\": 1,\n  \"colour\": 3\n}";
    let err = parse_configs(text).unwrap_err();
    match &err {
        Error::Parse { line, message, .. } => {
            assert_eq!(*line, 6);
            assert!(message.contains("colour"), "{message}");
        }
        other => panic!("{other}"),
    }
    assert!(matches!(parse_configs("{\"n\": "), Err(Error::Parse { .. })));
    assert!(parse_configs("[]").is_err());
    let bad_method = text.replace("\"stein\"", "\"magic\"").replace(",\n  \"colour\": 3", "");
    assert!(parse_configs(&bad_method).unwrap_err().to_string().contains("magic"));
    let minimal = text.replace(",\n  \"colour\": 3", "");
    let cfg = &parse_configs(&minimal).unwrap()[0];
    assert_eq!(cfg.reps, DEFAULT_REPS);
    assert_eq!(cfg.ne_policy, NePolicy::default());
}

#[test]
fn report_file_round_trip() {
    let model = ModelSpec::logarithmic(0.5).unwrap();
    let rows = run_experiment(&config(&model, 50, 30, &["stein", "mle"], 2)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.csv");
    write_report(&rows, &path).unwrap();
    let back = read_report(&path).unwrap();
    assert_eq!(back.len(), rows.len());
    for (a, b) in rows.iter().zip(&back) {
        assert!(((a.bias - b.bias) / a.bias).abs() < 5e-15);
        assert_eq!(a.method, b.method);
    }
}
