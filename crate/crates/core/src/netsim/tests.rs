use super::*;
use proptest::prelude::*;

fn degenerate_config() -> GenerationConfig {
    GenerationConfig {
        n_hosts: 1,
        n_users: 1,
        n_subnets: 1,
        privilege_levels: 1,
        p_priv_escalation_exploit: 0.0,
        p_cred_harvest_exploit: 0.0,
        mean_history_per_user: 1.0,
        host_type_weights: vec![1.0, 0.0, 0.0, 0.0, 0.0],
        user_privilege_weights: vec![1.0],
        subnets_per_user_mean: 1.0,
    }
}

#[test]
fn degenerate_minimum_network() {
    let net = generate_network(&degenerate_config(), 7).unwrap();
    assert_eq!(net.hosts.len(), 1);
    assert_eq!(net.users.len(), 1);
    assert_eq!(net.subnets.len(), 1);
    let host = &net.hosts[0];
    assert_eq!(host.required_privilege, 0);
    assert!(host.exploits.is_empty());
    let user = &net.users[0];
    assert_eq!(user.privilege_level, 0);
    assert_eq!(user.accessed_hosts, BTreeSet::from([0]));
    assert_eq!(host.recent_users, vec![0]);
}

#[test]
fn seeded_generation_is_byte_identical() {
    let config = GenerationConfig::desk_scale();
    let a = generate_network(&config, 42).unwrap();
    let b = generate_network(&config, 42).unwrap();
    assert_eq!(save_network(&a), save_network(&b));
    let c = generate_network(&config, 43).unwrap();
    assert_ne!(save_network(&a), save_network(&c));
}

#[test]
fn exploit_frequency_matches_probability() {
    let config = GenerationConfig {
        n_hosts: 10_000,
        n_users: 1,
        p_priv_escalation_exploit: 0.3,
        ..GenerationConfig::desk_scale()
    };
    let net = generate_network(&config, 1).unwrap();
    let frac = net.hosts.iter().filter(|h| h.has_exploit(ExploitKind::PrivilegeEscalation)).count()
        as f64
        / net.hosts.len() as f64;
    assert!((frac - 0.3).abs() < 0.02, "observed fraction {frac}");
}

#[test]
fn exploit_frequency_within_five_sigma() {
    let config = GenerationConfig { n_hosts: 10_000, ..GenerationConfig::desk_scale() };
    let net = generate_network(&config, 99).unwrap();
    let n = net.hosts.len() as f64;
    for (kind, p) in [
        (ExploitKind::PrivilegeEscalation, config.p_priv_escalation_exploit),
        (ExploitKind::CredentialHarvest, config.p_cred_harvest_exploit),
    ] {
        let count = net.hosts.iter().filter(|h| h.has_exploit(kind)).count() as f64;
        let sigma = (n * p * (1.0 - p)).sqrt();
        assert!(
            (count - n * p).abs() < 5.0 * sigma,
            "{kind:?}: count {count} vs expectation {} (sigma {sigma})",
            n * p
        );
    }
}

#[test]
fn generated_networks_validate_clean() {
    for seed in 0..5 {
        let net = generate_network(&GenerationConfig::desk_scale(), seed).unwrap();
        assert_eq!(validate_network(&net), vec![]);
    }
}

#[test]
fn bipartite_mismatch_is_reported() {
    let mut net = generate_network(&degenerate_config(), 7).unwrap();
    // Host claims a history entry the user does not mirror.
    net.users[0].accessed_hosts.clear();
    let violations = validate_network(&net);
    assert_eq!(violations, vec![Violation::BipartiteMismatch { host: 0, user: 0 }]);
}

#[test]
fn illegal_history_is_reported() {
    let config = GenerationConfig {
        privilege_levels: 3,
        user_privilege_weights: vec![1.0, 0.0, 0.0],
        ..degenerate_config()
    };
    let mut net = generate_network(&config, 7).unwrap();
    net.hosts[0].required_privilege = 2;
    net.users[0].privilege_level = 1;
    let violations = validate_network(&net);
    assert_eq!(
        violations,
        vec![Violation::IllegalHistory { user: 0, host: 0, reason: "insufficient privilege" }]
    );
}

#[test]
fn save_load_round_trip() {
    let net = generate_network(&degenerate_config(), 7).unwrap();
    let doc = save_network(&net);
    let loaded = load_network(&doc).unwrap();
    assert_eq!(net, loaded);

    let big = generate_network(&GenerationConfig::desk_scale(), 5).unwrap();
    assert_eq!(big, load_network(&save_network(&big)).unwrap());
}

#[test]
fn parse_error_names_offending_host() {
    let net = generate_network(&degenerate_config(), 7).unwrap();
    let mut doc: serde_json::Value = serde_json::from_str(&save_network(&net)).unwrap();
    doc["hosts"][0].as_object_mut().unwrap().remove("subnet");
    let err = load_network(&doc.to_string()).unwrap_err();
    match err {
        NetsimError::Parse { ref path, .. } => {
            assert!(path.contains("hosts[0]"), "path was {path}");
        }
        other => panic!("expected ParseError, got {other}"),
    }
}

#[test]
fn dangling_reference_fails_validation() {
    let net = generate_network(&degenerate_config(), 7).unwrap();
    let mut doc: serde_json::Value = serde_json::from_str(&save_network(&net)).unwrap();
    doc["hosts"][0]["recent_users"] = serde_json::json!([5]);
    let err = load_network(&doc.to_string()).unwrap_err();
    match err {
        NetsimError::Validation(violations) => {
            assert!(violations.contains(&Violation::DanglingRecentUser { host: 0, user: 5 }));
            // The user side still thinks host 0 is mirrored, which it is; the
            // mismatch is only on the host side here.
            assert!(violations
                .iter()
                .all(|v| !matches!(v, Violation::IllegalHistory { .. })));
        }
        other => panic!("expected ValidationError, got {other}"),
    }
}

#[test]
fn invalid_config_names_field() {
    let mut config = GenerationConfig::desk_scale();
    config.p_cred_harvest_exploit = 1.5;
    let err = generate_network(&config, 0).unwrap_err();
    match err {
        NetsimError::InvalidConfig { field, .. } => assert_eq!(field, "p_cred_harvest_exploit"),
        other => panic!("unexpected error {other}"),
    }

    let mut config = GenerationConfig::desk_scale();
    config.user_privilege_weights = vec![0.5, 0.5];
    assert!(matches!(
        generate_network(&config, 0).unwrap_err(),
        NetsimError::InvalidConfig { field: "user_privilege_weights", .. }
    ));
}

#[test]
fn thousand_host_generation_is_fast() {
    let config = GenerationConfig::large_scale();
    let start = std::time::Instant::now();
    let net = generate_network(&config, 3).unwrap();
    let elapsed = start.elapsed();
    assert_eq!(net.hosts.len(), 1000);
    assert_eq!(net.users.len(), 1000);
    assert!(elapsed.as_secs_f64() < 1.0, "generation took {elapsed:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// History legality holds for every generated network across a spread of
    /// shapes and seeds.
    #[test]
    fn generated_networks_always_validate(
        n_hosts in 1u32..60,
        n_users in 1u32..40,
        n_subnets in 1u32..8,
        levels in 1u32..4,
        p_esc in 0.0f64..1.0,
        p_harvest in 0.0f64..1.0,
        seed in 0u64..1000,
    ) {
        let mut priv_weights = vec![0.0; levels as usize];
        priv_weights[0] = 1.0;
        if levels > 1 {
            priv_weights[0] = 0.6;
            priv_weights[levels as usize - 1] = 0.4;
        }
        let config = GenerationConfig {
            n_hosts,
            n_users,
            n_subnets,
            privilege_levels: levels,
            p_priv_escalation_exploit: p_esc,
            p_cred_harvest_exploit: p_harvest,
            mean_history_per_user: 2.0,
            host_type_weights: vec![0.55, 0.2, 0.05, 0.1, 0.1],
            user_privilege_weights: priv_weights,
            subnets_per_user_mean: 1.5,
        };
        match generate_network(&config, seed) {
            Ok(net) => prop_assert_eq!(validate_network(&net), vec![]),
            // Tight privilege configs can legitimately strand users.
            Err(NetsimError::Infeasible { .. }) => {}
            Err(other) => return Err(TestCaseError::fail(format!("unexpected error {other}"))),
        }
    }
}
