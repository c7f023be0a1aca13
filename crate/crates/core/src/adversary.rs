//! Goal-directed adversary simulation.
//!
//! An adversary starts on a foothold host with credentials for one user and
//! walks the network toward a goal host. Moves are drawn proportionally to a
//! weighted heuristic score over the currently accessible, not-yet-visited
//! hosts; when every heuristic term vanishes the walk degrades to a uniform
//! random search. Exploits fire automatically on each host as it is
//! compromised: privilege escalation raises the effective privilege of
//! credentials that can access the host (once per host/credential pair), and
//! credential harvest grants the credentials of users in the host's
//! recent-user list. An episode ends when the goal is compromised or no
//! accessible unvisited host remains.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::netsim::{
    generate_network, ExploitKind, GenerationConfig, Host, HostId, HostType, NetsimError, Network,
    NetworkRef, SubnetId, UserId,
};
use crate::seeding::{derive_seed, rng_for};

/// Attempts to sample a start host that at least one user can legally access.
const START_SAMPLING_RETRIES: u32 = 100;

/// A credential the adversary holds: a user identity plus the privilege it
/// currently operates at, which escalation exploits may push above the
/// user's base level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Credential {
    pub user: UserId,
    pub effective_privilege: u32,
}

/// Heuristic weights for move scoring. All terms combine linearly;
/// `w_random` is the fallback mass that keeps every accessible host in play.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeuristicWeights {
    pub w_higher_privilege: f64,
    pub w_unexplored_subnet: f64,
    pub w_toward_goal: f64,
    pub w_random: f64,
}

impl Default for HeuristicWeights {
    fn default() -> Self {
        HeuristicWeights {
            w_higher_privilege: 4.0,
            w_unexplored_subnet: 2.0,
            w_toward_goal: 8.0,
            w_random: 1.0,
        }
    }
}

impl HeuristicWeights {
    /// Pure random search: every accessible host scores 1.
    pub fn uniform() -> Self {
        HeuristicWeights {
            w_higher_privilege: 0.0,
            w_unexplored_subnet: 0.0,
            w_toward_goal: 0.0,
            w_random: 1.0,
        }
    }

    pub fn validate(&self) -> Result<(), AdversaryError> {
        let all = [
            self.w_higher_privilege,
            self.w_unexplored_subnet,
            self.w_toward_goal,
            self.w_random,
        ];
        if all.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(AdversaryError::InvalidWeights {
                reason: "weights must be finite and non-negative".into(),
            });
        }
        if all.iter().all(|w| *w == 0.0) {
            return Err(AdversaryError::InvalidWeights {
                reason: "at least one weight must be positive".into(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    GoalReached,
    Blocked,
}

/// Per-step snapshot recorded in an episode: the compromised host's metadata
/// and the credential set in force once the host is secured (arrival plus
/// that host's exploits). Downstream feature encoding reads these snapshots
/// instead of re-running the simulator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeStep {
    pub host: HostId,
    pub subnet: SubnetId,
    pub required_privilege: u32,
    pub host_type: HostType,
    pub exploits: BTreeSet<ExploitKind>,
    pub credentials: Vec<Credential>,
}

/// One adversary campaign on one network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Episode {
    pub id: u64,
    pub network_ref: NetworkRef,
    pub start_host: HostId,
    pub start_user: UserId,
    pub goal_host: HostId,
    pub steps: Vec<EpisodeStep>,
    pub outcome: Outcome,
    pub weights: HeuristicWeights,
    pub seed: u64,
}

impl Episode {
    pub fn hosts(&self) -> impl Iterator<Item = HostId> + '_ {
        self.steps.iter().map(|s| s.host)
    }
}

/// Mutable adversary knowledge during a walk.
#[derive(Debug, Clone)]
pub struct AdversaryState {
    /// Compromise order; first element is the initial foothold.
    pub compromised_hosts: Vec<HostId>,
    /// user id → effective privilege currently held.
    pub credentials: BTreeMap<UserId, u32>,
    /// Hosts already examined for routes or exploitable vulnerabilities.
    pub evaluated_hosts: BTreeSet<HostId>,
    pub goal_host: HostId,
    compromised_set: BTreeSet<HostId>,
    /// (host, user) escalation pairs already consumed; each privilege
    /// escalation exploit fires at most once per credential.
    escalations_applied: BTreeSet<(HostId, UserId)>,
}

impl AdversaryState {
    /// Foothold state: credentials for `start_user`, `start_host`
    /// compromised. Exploits on the foothold are NOT applied here; see
    /// [`run_episode`].
    pub fn initial(
        network: &Network,
        start_host: HostId,
        start_user: UserId,
        goal_host: HostId,
    ) -> Result<Self, AdversaryError> {
        let host = network.host(start_host).ok_or_else(|| AdversaryError::InvalidStart {
            reason: format!("start host {start_host} does not exist"),
        })?;
        let user = network.user(start_user).ok_or_else(|| AdversaryError::InvalidStart {
            reason: format!("start user {start_user} does not exist"),
        })?;
        if network.host(goal_host).is_none() {
            return Err(AdversaryError::InvalidStart {
                reason: format!("goal host {goal_host} does not exist"),
            });
        }
        if goal_host == start_host {
            return Err(AdversaryError::InvalidStart {
                reason: "goal host equals start host".into(),
            });
        }
        if !network.user_can_access(user, host) {
            return Err(AdversaryError::InvalidStart {
                reason: format!("user {start_user} cannot access host {start_host}"),
            });
        }
        Ok(AdversaryState {
            compromised_hosts: vec![start_host],
            credentials: BTreeMap::from([(start_user, user.privilege_level)]),
            evaluated_hosts: BTreeSet::from([start_host]),
            goal_host,
            compromised_set: BTreeSet::from([start_host]),
            escalations_applied: BTreeSet::new(),
        })
    }

    pub fn is_compromised(&self, host: HostId) -> bool {
        self.compromised_set.contains(&host)
    }

    /// Record a compromise without sampling; used by episode replay.
    pub fn mark_compromised(&mut self, host: HostId) {
        if self.compromised_set.insert(host) {
            self.compromised_hosts.push(host);
        }
        self.evaluated_hosts.insert(host);
    }

    /// Credential set as a sorted snapshot for episode records.
    pub fn credential_snapshot(&self) -> Vec<Credential> {
        self.credentials
            .iter()
            .map(|(&user, &effective_privilege)| Credential { user, effective_privilege })
            .collect()
    }

    /// Subnets containing at least one compromised host.
    pub fn touched_subnets(&self, network: &Network) -> BTreeSet<SubnetId> {
        self.compromised_hosts
            .iter()
            .filter_map(|&h| network.host(h))
            .map(|h| h.subnet)
            .collect()
    }
}

/// True iff some held credential reaches `host`: its user can see the
/// host's subnet and its effective privilege meets the requirement.
pub fn can_access(state: &AdversaryState, host: &Host, network: &Network) -> bool {
    credentials_can_access(&state.credentials, host, network)
}

/// [`can_access`] over a bare credential map, shared with feature encoding
/// and replay so every consumer applies the same reachability rule.
pub fn credentials_can_access(
    credentials: &BTreeMap<UserId, u32>,
    host: &Host,
    network: &Network,
) -> bool {
    credentials.iter().any(|(&user_id, &effective)| {
        effective >= host.required_privilege
            && network
                .user(user_id)
                .is_some_and(|u| u.accessible_subnets.contains(&host.subnet))
    })
}

/// Fire the exploits on a compromised host. Privilege escalation raises the
/// effective privilege of every credential whose user has access to the host
/// (at most once per host/credential pair, capped at the top level), then
/// credential harvest grants any recent user not already held, at base
/// privilege. Harvest is idempotent.
pub fn apply_exploits(state: &mut AdversaryState, host_id: HostId, network: &Network) {
    debug_assert!(state.is_compromised(host_id), "exploits fire only on compromised hosts");
    let Some(host) = network.host(host_id) else { return };
    let max_level = network.config.privilege_levels - 1;

    if host.has_exploit(ExploitKind::PrivilegeEscalation) {
        let eligible: Vec<UserId> = state
            .credentials
            .iter()
            .filter(|&(&user_id, &effective)| {
                effective >= host.required_privilege
                    && !state.escalations_applied.contains(&(host_id, user_id))
                    && network
                        .user(user_id)
                        .is_some_and(|u| u.accessible_subnets.contains(&host.subnet))
            })
            .map(|(&user_id, _)| user_id)
            .collect();
        for user_id in eligible {
            let effective = state.credentials.get_mut(&user_id).unwrap();
            *effective = (*effective + 1).min(max_level);
            state.escalations_applied.insert((host_id, user_id));
        }
    }

    if host.has_exploit(ExploitKind::CredentialHarvest) {
        for &user_id in &host.recent_users {
            if let Some(user) = network.user(user_id) {
                state.credentials.entry(user_id).or_insert(user.privilege_level);
            }
        }
    }
}

/// All hosts the adversary could move to now: accessible and not yet
/// compromised. Empty means the walk is blocked.
pub fn enumerate_moves(state: &AdversaryState, network: &Network) -> BTreeSet<HostId> {
    network
        .hosts
        .iter()
        .filter(|h| !state.is_compromised(h.id) && can_access(state, h, network))
        .map(|h| h.id)
        .collect()
}

/// Linear heuristic score for a candidate move. With all heuristic weights
/// zero and `w_random` positive every candidate scores the same, which the
/// sampler treats as a uniform random search.
pub fn score_move(
    state: &AdversaryState,
    candidate: &Host,
    network: &Network,
    weights: &HeuristicWeights,
) -> f64 {
    let levels = network.config.privilege_levels;
    let normalized_privilege = if levels > 1 {
        candidate.required_privilege as f64 / (levels - 1) as f64
    } else {
        0.0
    };
    let unexplored = !state.touched_subnets(network).contains(&candidate.subnet);
    let goal_subnet = network.host(state.goal_host).map(|g| g.subnet);
    let toward_goal = candidate.id == state.goal_host || goal_subnet == Some(candidate.subnet);

    weights.w_higher_privilege * normalized_privilege
        + weights.w_unexplored_subnet * f64::from(unexplored)
        + weights.w_toward_goal * f64::from(toward_goal)
        + weights.w_random
}

/// Advance one move: sample the next host proportionally to its score,
/// compromise it, and fire its exploits. Returns the chosen host, or `None`
/// when no move exists (blocked).
pub fn step(
    state: &mut AdversaryState,
    network: &Network,
    weights: &HeuristicWeights,
    rng: &mut impl Rng,
) -> Option<HostId> {
    let moves = enumerate_moves(state, network);
    if moves.is_empty() {
        return None;
    }
    let candidates: Vec<HostId> = moves.into_iter().collect();
    let scores: Vec<f64> = candidates
        .iter()
        .map(|&id| score_move(state, &network.hosts[id as usize], network, weights))
        .collect();

    let total: f64 = scores.iter().sum();
    let chosen = if total > 0.0 {
        let draw: f64 = rng.gen::<f64>() * total;
        let mut acc = 0.0;
        let mut pick = candidates.len() - 1;
        for (i, s) in scores.iter().enumerate() {
            acc += s;
            if draw < acc {
                pick = i;
                break;
            }
        }
        candidates[pick]
    } else {
        // All-zero scores are all-equal: fall back to a uniform draw.
        candidates[rng.gen_range(0..candidates.len())]
    };

    state.mark_compromised(chosen);
    apply_exploits(state, chosen, network);
    Some(chosen)
}

fn snapshot(state: &AdversaryState, host_id: HostId, network: &Network) -> EpisodeStep {
    let host = &network.hosts[host_id as usize];
    EpisodeStep {
        host: host_id,
        subnet: host.subnet,
        required_privilege: host.required_privilege,
        host_type: host.host_type,
        exploits: host.exploits.clone(),
        credentials: state.credential_snapshot(),
    }
}

/// Run one campaign to goal or blocked. Deterministic per seed.
pub fn run_episode(
    network: &Network,
    start_host: HostId,
    start_user: UserId,
    goal_host: HostId,
    weights: &HeuristicWeights,
    seed: u64,
) -> Result<Episode, AdversaryError> {
    weights.validate()?;
    let mut state = AdversaryState::initial(network, start_host, start_user, goal_host)?;
    apply_exploits(&mut state, start_host, network);

    let mut steps = vec![snapshot(&state, start_host, network)];
    let mut rng = rng_for(seed);
    let outcome = loop {
        match step(&mut state, network, weights, &mut rng) {
            None => break Outcome::Blocked,
            Some(host) => {
                steps.push(snapshot(&state, host, network));
                if host == goal_host {
                    break Outcome::GoalReached;
                }
            }
        }
        // No-revisit bounds the walk by the host count.
        assert!(steps.len() <= network.n_hosts(), "walk exceeded host count");
    };

    Ok(Episode {
        id: 0,
        network_ref: network.network_ref(),
        start_host,
        start_user,
        goal_host,
        steps,
        outcome,
        weights: weights.clone(),
        seed,
    })
}

/// Sample a goal uniformly among hosts of `host_type`, excluding the start
/// host. Supports "reach any host of this type" campaign goals; the walk
/// itself still targets the sampled exact host.
pub fn sample_goal_of_type(
    network: &Network,
    exclude: HostId,
    host_type: HostType,
    rng: &mut impl Rng,
) -> Option<HostId> {
    let candidates: Vec<HostId> = network
        .hosts
        .iter()
        .filter(|h| h.host_type == host_type && h.id != exclude)
        .map(|h| h.id)
        .collect();
    if candidates.is_empty() {
        None
    } else {
        Some(candidates[rng.gen_range(0..candidates.len())])
    }
}

/// Generate `n_episodes` independent campaigns, each on a freshly generated
/// network, with uniformly sampled start host, start user (among users with
/// legal access), and goal host. Episode `i` gets id `start_index + i` and
/// derives every random stream from `(master_seed, id)`, so results are
/// reproducible regardless of worker count.
pub fn run_campaigns(
    gen_config: &GenerationConfig,
    weights: &HeuristicWeights,
    n_episodes: u64,
    master_seed: u64,
    start_index: u64,
) -> Result<Vec<Episode>, AdversaryError> {
    gen_config.validate()?;
    weights.validate()?;
    (0..n_episodes)
        .into_par_iter()
        .map(|i| run_campaign_episode(gen_config, weights, master_seed, start_index + i))
        .collect()
}

fn run_campaign_episode(
    gen_config: &GenerationConfig,
    weights: &HeuristicWeights,
    master_seed: u64,
    id: u64,
) -> Result<Episode, AdversaryError> {
    let base = derive_seed(master_seed, id);
    let net_seed = derive_seed(base, 0);
    let setup_seed = derive_seed(base, 1);
    let walk_seed = derive_seed(base, 2);

    let network = generate_network(gen_config, net_seed)?;
    if network.n_hosts() < 2 {
        return Err(AdversaryError::InvalidStart {
            reason: "campaigns need at least two hosts".into(),
        });
    }

    let mut rng = rng_for(setup_seed);
    let mut picked = None;
    for _ in 0..START_SAMPLING_RETRIES {
        let start_host = rng.gen_range(0..network.n_hosts() as u32);
        let host = &network.hosts[start_host as usize];
        let eligible: Vec<UserId> = network
            .users
            .iter()
            .filter(|u| network.user_can_access(u, host))
            .map(|u| u.id)
            .collect();
        if !eligible.is_empty() {
            let start_user = eligible[rng.gen_range(0..eligible.len())];
            picked = Some((start_host, start_user));
            break;
        }
    }
    let Some((start_host, start_user)) = picked else {
        return Err(AdversaryError::InfeasibleStart { episode: id });
    };

    let goal_host = loop {
        let g = rng.gen_range(0..network.n_hosts() as u32);
        if g != start_host {
            break g;
        }
    };

    let mut episode = run_episode(&network, start_host, start_user, goal_host, weights, walk_seed)?;
    episode.id = id;
    Ok(episode)
}

/// Fraction of episodes that reached their goal.
pub fn goal_reach_rate(episodes: &[Episode]) -> f64 {
    if episodes.is_empty() {
        return 0.0;
    }
    episodes.iter().filter(|e| e.outcome == Outcome::GoalReached).count() as f64
        / episodes.len() as f64
}

// ---------------------------------------------------------------------------
// Episode stream files (JSON Lines, one episode per line)

#[derive(Debug, Error)]
pub enum AdversaryError {
    #[error("invalid start: {reason}")]
    InvalidStart { reason: String },
    #[error("invalid heuristic weights: {reason}")]
    InvalidWeights { reason: String },
    #[error("episode {episode}: no sampled start host is accessible to any user")]
    InfeasibleStart { episode: u64 },
    #[error(transparent)]
    Netsim(#[from] NetsimError),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl AdversaryError {
    pub fn code(&self) -> &'static str {
        match self {
            AdversaryError::InvalidStart { .. } => "InvalidStart",
            AdversaryError::InvalidWeights { .. } => "InvalidWeights",
            AdversaryError::InfeasibleStart { .. } => "Infeasible",
            AdversaryError::Netsim(e) => e.code(),
            AdversaryError::Parse { .. } => "ParseError",
            AdversaryError::Io { .. } => "IoError",
        }
    }
}

pub fn write_episodes(path: &Path, episodes: &[Episode]) -> Result<(), AdversaryError> {
    let file = std::fs::File::create(path)
        .map_err(|source| AdversaryError::Io { path: path.display().to_string(), source })?;
    let mut writer = BufWriter::new(file);
    for episode in episodes {
        let line = serde_json::to_string(episode).expect("episode serializes");
        writeln!(writer, "{line}")
            .map_err(|source| AdversaryError::Io { path: path.display().to_string(), source })?;
    }
    writer
        .flush()
        .map_err(|source| AdversaryError::Io { path: path.display().to_string(), source })
}

pub fn read_episodes(path: &Path) -> Result<Vec<Episode>, AdversaryError> {
    let file = std::fs::File::open(path)
        .map_err(|source| AdversaryError::Io { path: path.display().to_string(), source })?;
    let reader = BufReader::new(file);
    let mut episodes = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line
            .map_err(|source| AdversaryError::Io { path: path.display().to_string(), source })?;
        if line.trim().is_empty() {
            continue;
        }
        let episode = serde_json::from_str(&line)
            .map_err(|e| AdversaryError::Parse { line: idx + 1, message: e.to_string() })?;
        episodes.push(episode);
    }
    Ok(episodes)
}
