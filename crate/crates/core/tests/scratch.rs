// Temporary exploration harness; removed before release.
use lateralsim::adversary::*;
use lateralsim::netsim::*;

fn measure(name: &str, config: &GenerationConfig, n: u64) {
    let heuristic = run_campaigns(config, &HeuristicWeights::default(), n, 42, 0).unwrap();
    let uniform = run_campaigns(config, &HeuristicWeights::uniform(), n, 42, 0).unwrap();

    let lens: Vec<usize> = heuristic.iter().map(|e| e.steps.len()).collect();
    let mean_len = lens.iter().sum::<usize>() as f64 / lens.len() as f64;
    let mut sorted = lens.clone();
    sorted.sort();

    let mut h_wins = 0;
    let mut u_wins = 0;
    for (h, u) in heuristic.iter().zip(&uniform) {
        match (h.outcome, u.outcome) {
            (Outcome::GoalReached, Outcome::Blocked) => h_wins += 1,
            (Outcome::Blocked, Outcome::GoalReached) => u_wins += 1,
            _ => {}
        }
    }
    let total_transitions: usize = heuristic.iter().map(|e| e.steps.len() - 1).sum();
    println!(
        "{name}: h_reach={:.3} u_reach={:.3} disc=({h_wins}/{u_wins}) mean_len={mean_len:.1} p50={} p90={} transitions={total_transitions}",
        goal_reach_rate(&heuristic),
        goal_reach_rate(&uniform),
        sorted[sorted.len() / 2],
        sorted[sorted.len() * 9 / 10],
    );
}

#[test]
#[ignore]
fn explore_campaign_dynamics() {
    let base = GenerationConfig::desk_scale();

    // Scarce escalation exploits (at-most-once should bind) with heavy
    // privilege gating so closure differences decide many goals.
    let scarce1 = GenerationConfig {
        n_subnets: 12,
        subnets_per_user_mean: 1.3,
        mean_history_per_user: 2.0,
        p_priv_escalation_exploit: 0.06,
        p_cred_harvest_exploit: 0.25,
        host_type_weights: vec![0.3, 0.3, 0.15, 0.15, 0.1],
        user_privilege_weights: vec![0.9, 0.08, 0.02],
        ..base.clone()
    };
    measure("scarce1", &scarce1, 1000);

    let scarce2 = GenerationConfig {
        n_subnets: 8,
        p_priv_escalation_exploit: 0.04,
        ..scarce1.clone()
    };
    measure("scarce2", &scarce2, 1000);

    let scarce3 = GenerationConfig {
        n_subnets: 16,
        subnets_per_user_mean: 1.1,
        mean_history_per_user: 1.5,
        p_priv_escalation_exploit: 0.08,
        p_cred_harvest_exploit: 0.18,
        host_type_weights: vec![0.35, 0.3, 0.12, 0.13, 0.1],
        user_privilege_weights: vec![0.92, 0.06, 0.02],
        ..base.clone()
    };
    measure("scarce3", &scarce3, 1000);
}
