use rsplab::lab::{run_suite, run_trials, ExperimentConfig, LabError, SuiteId};

#[test]
fn config_text_round_trip_runs() {
    let text =
        "# ratio run\nsuite = ratio\nmodel = complete\nn = 8\ntrials = 20\nseed = 5\nkind = insertion:cheapest\n";
    let cfg = ExperimentConfig::parse(text, None).unwrap();
    let report = run_suite(&cfg).unwrap();
    assert_eq!(report.trials.records.len(), 20);
    assert!(report.passed());
}

#[test]
fn complete_graph_trials_are_all_connected() {
    let cfg = ExperimentConfig::parse("model = complete\nn = 20\ntrials = 100", Some(SuiteId::TwoOpt)).unwrap();
    let set = run_trials(&cfg).unwrap();
    assert_eq!(set.records.len(), 100);
    assert!(set.records.iter().all(|r| r.connected));
}

#[test]
fn single_trial_and_repeatability() {
    let cfg = ExperimentConfig::parse("model = er\np = 0.5\nn = 9\ntrials = 1", Some(SuiteId::Structure)).unwrap();
    let a = run_trials(&cfg).unwrap();
    assert_eq!(a.records.len(), 1);
    let b = run_trials(&cfg).unwrap();
    // NaN marks missing values, so compare bit patterns.
    let bits = |s: &rsplab::lab::TrialSet| -> Vec<u64> { s.records[0].values.iter().map(|v| v.to_bits()).collect() };
    assert_eq!(bits(&a), bits(&b));
}

#[test]
fn invalid_configs_are_rejected() {
    for text in ["trials = 0", "model = er", "n = 12\nk = 12\nkind = kmedian", "bogus = 1"] {
        let err = ExperimentConfig::parse(text, Some(SuiteId::Ratio)).and_then(|c| run_suite(&c).map(|_| ()));
        assert!(matches!(err, Err(LabError::ConfigInvalid(_))), "{text}: {err:?}");
    }
}
