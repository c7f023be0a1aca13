//! Procedural network generation.

use std::collections::BTreeSet;

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use super::{
    ExploitKind, GenerationConfig, Host, HostType, NetsimError, Network, Subnet, User, UserId,
};
use crate::seeding::rng_for;

/// Attempts to place a user before reporting the network infeasible.
const USER_PLACEMENT_RETRIES: u32 = 100;

/// Generate a network from `(config, seed)`. The function is pure: identical
/// inputs produce identical networks, byte for byte once serialized.
///
/// Each host independently receives each exploit class with its configured
/// probability. Each user's history is sampled only from hosts the user can
/// legally access; users whose subnet draw strands them without any legal
/// host are redrawn up to a bounded retry count.
pub fn generate_network(config: &GenerationConfig, seed: u64) -> Result<Network, NetsimError> {
    config.validate()?;
    let mut rng = rng_for(seed);

    let subnets: Vec<Subnet> = (0..config.n_subnets)
        .map(|id| Subnet { id, name: format!("subnet-{id}") })
        .collect();

    let max_level = config.privilege_levels - 1;
    let mut hosts: Vec<Host> = Vec::with_capacity(config.n_hosts as usize);
    for id in 0..config.n_hosts {
        let subnet = rng.gen_range(0..config.n_subnets);
        let host_type = HostType::ALL[sample_categorical(&mut rng, &config.host_type_weights)];
        let required_privilege = host_type.base_required_privilege().min(max_level);
        let mut exploits = BTreeSet::new();
        if rng.gen_bool(config.p_priv_escalation_exploit) {
            exploits.insert(ExploitKind::PrivilegeEscalation);
        }
        if rng.gen_bool(config.p_cred_harvest_exploit) {
            exploits.insert(ExploitKind::CredentialHarvest);
        }
        hosts.push(Host { id, subnet, required_privilege, host_type, exploits, recent_users: Vec::new() });
    }

    let mut users: Vec<User> = Vec::with_capacity(config.n_users as usize);
    for id in 0..config.n_users {
        let user = place_user(&mut rng, config, &hosts, id)?;
        users.push(user);
    }

    // Mirror user histories onto hosts. Users are processed in id order, so
    // each recent_users list comes out ascending.
    for user in &users {
        for &host_id in &user.accessed_hosts {
            hosts[host_id as usize].recent_users.push(user.id);
        }
    }

    Ok(Network { seed, config: config.clone(), subnets, hosts, users })
}

fn place_user(
    rng: &mut impl Rng,
    config: &GenerationConfig,
    hosts: &[Host],
    id: UserId,
) -> Result<User, NetsimError> {
    for _ in 0..USER_PLACEMENT_RETRIES {
        let privilege_level = sample_categorical(rng, &config.user_privilege_weights) as u32;

        let n_accessible = (sample_poisson(rng, config.subnets_per_user_mean))
            .clamp(1, config.n_subnets as u64) as usize;
        let accessible_subnets: BTreeSet<u32> =
            rand::seq::index::sample(rng, config.n_subnets as usize, n_accessible)
                .into_iter()
                .map(|s| s as u32)
                .collect();

        let legal: Vec<u32> = hosts
            .iter()
            .filter(|h| {
                accessible_subnets.contains(&h.subnet) && privilege_level >= h.required_privilege
            })
            .map(|h| h.id)
            .collect();
        if legal.is_empty() {
            continue;
        }

        let history_len =
            (sample_poisson(rng, config.mean_history_per_user)).max(1).min(legal.len() as u64)
                as usize;
        let accessed_hosts: BTreeSet<u32> = rand::seq::index::sample(rng, legal.len(), history_len)
            .into_iter()
            .map(|i| legal[i])
            .collect();

        return Ok(User { id, privilege_level, accessible_subnets, accessed_hosts });
    }
    Err(NetsimError::Infeasible { user: id, attempts: USER_PLACEMENT_RETRIES })
}

/// Draw an index proportionally to `weights` (validated to sum to 1).
fn sample_categorical(rng: &mut impl Rng, weights: &[f64]) -> usize {
    let draw: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        acc += w;
        if draw < acc {
            return i;
        }
    }
    weights.len() - 1
}

fn sample_poisson(rng: &mut impl Rng, mean: f64) -> u64 {
    let dist = Poisson::new(mean).expect("validated positive mean");
    dist.sample(rng) as u64
}
