use kv_harness::{parse_config, ExperimentId, ModelChoice};

#[test]
fn acceptance_config_is_valid() {
    let specs = parse_config(include_str!("../configs/acceptance.toml")).unwrap();
    let ids: std::collections::HashSet<_> = specs.iter().map(|s| s.id).collect();
    assert_eq!(ids.len(), ExperimentId::ALL.len(), "every experiment id is exercised");
    let h1 = specs.iter().find(|s| s.name == "h1_propagation").unwrap();
    assert_eq!(h1.params.model, ModelChoice::Builtin);
    assert_eq!(h1.params.model.models().len(), 4);
}

#[test]
fn galerkin_ladder_is_accepted() {
    let specs = parse_config("[g]\nid = \"galerkin_cauchy\"\nn_ladder = [8, 16, 32]\n").unwrap();
    assert_eq!(specs[0].params.n_ladder, vec![8, 16, 32]);
}

#[test]
fn record_interval_must_be_positive() {
    let err = parse_config("[e]\nid = \"energy_identity\"\nrecord_interval = -0.1\n").unwrap_err();
    assert_eq!(err.line, Some(3));
    assert!(err.message.contains("record_interval must be > 0"), "{err}");
}

#[test]
fn unknown_id_lists_the_known_ones() {
    let err = parse_config("[e]\nid = \"energy\"\n").unwrap_err();
    assert!(err.message.contains("dispersion") && err.message.contains("mms_convergence"), "{err}");
}

#[test]
fn seed_changes_the_hash() {
    let a = parse_config("[o]\nid = \"oscillation_oracle\"\nseed = 1\n").unwrap();
    let b = parse_config("[o]\nid = \"oscillation_oracle\"\nseed = 2\n").unwrap();
    assert_ne!(a[0].config_hash(), b[0].config_hash());
}
