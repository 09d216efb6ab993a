use llhmm::experiments::*;

#[test]
fn parses_lists_and_scalars() {
    let c = parse_config(
        "experiment = \"micro-sweep\"\nworkers = 2\n[sweep]\nmu = [2.0, 3.0]\n[params]\nepsilon = 0.02\n",
    )
    .unwrap();
    assert_eq!(c.experiment, ExperimentKind::MicroSweep);
    assert_eq!(c.workers, Some(2));
    assert_eq!(c.sweep.mu, Some(vec![2.0, 3.0]));
    assert_eq!(c.params.epsilon, Some(0.02));
    assert!(!c.long);
}

#[test]
fn rejects_bad_configs() {
    let bad = [
        "experiment = \"cost\"\n[sweep]\nepsilon = []\n",
        "experiment = \"cost\"\n[sweep]\nepsilon = [1.5]\n",
        "experiment = \"cost\"\n[sweep]\neta = [-1.0]\n",
        "experiment = \"cost\"\nbogus = 1\n",
        "experiment = \"nope\"\n",
        "experiment = \"cost\"\npreset = \"ex9\"\n",
        "experiment = \"cost\"\nworkers = 0\n",
        "experiment = \"cost\"\n[params]\nmethod = \"euler\"\n",
    ];
    for text in bad {
        let e = parse_config(text).unwrap_err();
        assert_eq!(e.exit_code(), 2, "{text}");
    }
}

#[test]
fn experiment_key_is_optional_but_must_agree() {
    assert_eq!(
        parse_config_as(ExperimentKind::Cost, "")
            .unwrap()
            .experiment,
        ExperimentKind::Cost
    );
    assert!(parse_config_as(ExperimentKind::Cost, "experiment = \"cost\"").is_ok());
    assert!(matches!(
        parse_config_as(ExperimentKind::Cost, "experiment = \"stability\""),
        Err(ExperimentError::Config(_))
    ));
}

#[test]
fn csv_layout_and_metric_bytes() {
    let mut r = ExperimentResult::new(
        "demo",
        vec![
            Column::new("x", "1"),
            Column::new("name", "name"),
            Column::timing("t", "s"),
        ],
    );
    r.notes.push("note".into());
    r.push(vec![0.5.into(), "a".into(), 1.25.into()]);
    r.push(vec![Cell::Empty, "b".into(), 2.0.into()]);
    r.wall_time = 3.0;
    let full = r.to_csv();
    let lines: Vec<&str> = full.lines().collect();
    assert!(lines[0].starts_with(&format!(
        "# llhmm-csv v{CSV_SCHEMA_VERSION}; experiment=demo"
    )));
    assert!(lines[0].ends_with("note"));
    assert_eq!(lines[1], "# wall_time_s=3.000");
    assert_eq!(lines[2], "x[1],name[name],t[s]");
    assert_eq!(lines[3], "5.000000000000e-1,a,1.250000000000e0");
    assert_eq!(lines[4], ",b,2.000000000000e0");
    let metric = r.metric_csv();
    assert!(!metric.contains("wall_time"));
    assert!(metric.contains("x[1],name[name]\n"));
    assert!(!metric.contains("1.25"));
}

#[test]
fn library_errors_map_to_exit_codes() {
    // a spacing that does not divide the unit interval is the caller's fault
    let mut c = ExperimentConfig::new(ExperimentKind::Integrators);
    c.params.dx = Some(0.3);
    assert_eq!(run_experiment(&c).unwrap_err().exit_code(), 2);
    // micro box wider than the interpolation stencil
    let c = parse_config_as(
        ExperimentKind::MicroSweep,
        "[params]\nepsilon = 0.05\nmu_prime = 14.0\ndx = 0.0625\n",
    )
    .unwrap();
    assert_eq!(run_experiment(&c).unwrap_err().exit_code(), 2);
    assert_eq!(ExperimentError::Numerical("x".into()).exit_code(), 3);
    assert_eq!(ExperimentError::Io("x".into()).exit_code(), 3);
}

#[test]
fn homogenize_reports_every_entry() {
    let mut c = ExperimentConfig::new(ExperimentKind::Homogenize);
    c.sweep.presets = Some(vec!["ex1".into(), "ex3".into()]);
    c.params.resolution = Some(32);
    let r = run_experiment(&c).unwrap();
    assert_eq!(r.rows.len(), 1 + 4);
    assert!((r.num(0, "value").unwrap() - 0.75f64.sqrt()).abs() < 1e-12);
    c.sweep.presets = Some(vec!["loc1d".into()]);
    assert!(matches!(
        run_experiment(&c),
        Err(ExperimentError::Config(_))
    ));
}

#[test]
fn cost_rows_follow_the_sweep() {
    let c = parse_config_as(
        ExperimentKind::Cost,
        "preset = \"ex1\"\n[sweep]\nepsilon = [0.02, 0.01]\n[params]\nrepeats = 1\n",
    )
    .unwrap();
    let r = run_experiment(&c).unwrap();
    assert_eq!(r.rows.len(), 2);
    // fixed scaled parameters give identical micro problems
    assert_eq!(r.num(0, "nodes"), r.num(1, "nodes"));
    assert_eq!(r.num(0, "steps"), r.num(1, "steps"));
    assert_eq!(r.num(0, "time_ratio"), Some(1.0));
}

#[test]
fn showcase_2d_needs_long_mode() {
    let c = parse_config_as(ExperimentKind::Showcase, "[sweep]\ncases = [\"loc2d\"]\n").unwrap();
    assert!(matches!(
        run_experiment(&c),
        Err(ExperimentError::Config(_))
    ));
    let c = parse_config_as(ExperimentKind::Showcase, "[sweep]\ncases = [\"ex2\"]\n").unwrap();
    assert!(matches!(
        run_experiment(&c),
        Err(ExperimentError::Config(_))
    ));
}

#[test]
fn integrator_study_marks_unstable_steps() {
    let c = parse_config_as(
        ExperimentKind::Integrators,
        "[sweep]\npresets = [\"ex1\"]\nmethods = [\"heunp\", \"imp\"]\ndt = [2e-3, 1e-4, 5e-5]\n[params]\ndx = 0.05\nfinal_time = 0.05\n",
    )
    .unwrap();
    let r = run_experiment(&c).unwrap();
    let heun = r.rows_where("method", "HeunP");
    assert_eq!(r.num(heun[0], "stable"), Some(0.0));
    assert_eq!(r.num(heun[1], "stable"), Some(1.0));
    let k = r.num(heun[2], "observed_order").unwrap();
    assert!((k - 2.0).abs() < 0.1, "{k}");
    let imp = r.rows_where("method", "IMP");
    assert_eq!(r.num(imp[0], "stable"), Some(1.0));
}
