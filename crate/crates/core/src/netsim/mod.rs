//! Simulated enterprise networks.
//!
//! A [`Network`] is a bipartite user↔host access graph partitioned into
//! subnets. Hosts gate access by an integer privilege level, carry a recent
//! user history, and probabilistically contain one exploit per class
//! (privilege escalation, credential harvest). Users hold a privilege level,
//! a set of reachable subnets, and the host history mirroring the hosts'
//! recent-user lists.
//!
//! Networks are generated deterministically from `(config, seed)` by
//! [`generate_network`], validated structurally by [`validate_network`], and
//! round-tripped through a JSON document whose field names are a stable
//! contract (hand-written files in the same format drive replay evaluation).

mod generate;

pub use generate::generate_network;

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub type SubnetId = u32;
pub type HostId = u32;
pub type UserId = u32;

/// A network segment. Reachability is governed by user subnet-access sets,
/// not by links between subnets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subnet {
    pub id: SubnetId,
    pub name: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum HostType {
    Workstation,
    Server,
    DomainController,
    FileServer,
    Database,
}

impl HostType {
    pub const ALL: [HostType; 5] = [
        HostType::Workstation,
        HostType::Server,
        HostType::DomainController,
        HostType::FileServer,
        HostType::Database,
    ];

    pub fn index(self) -> usize {
        Self::ALL.iter().position(|t| *t == self).unwrap()
    }

    /// Privilege a host of this type requires, before clamping to the
    /// network's configured range. Workstations sit at the base level,
    /// servers one above, domain controllers at the top.
    pub fn base_required_privilege(self) -> u32 {
        match self {
            HostType::Workstation => 0,
            HostType::Server | HostType::FileServer | HostType::Database => 1,
            HostType::DomainController => 2,
        }
    }
}

impl fmt::Display for HostType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            HostType::Workstation => "Workstation",
            HostType::Server => "Server",
            HostType::DomainController => "DomainController",
            HostType::FileServer => "FileServer",
            HostType::Database => "Database",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ExploitKind {
    /// Raises the effective privilege of users with access to the host.
    PrivilegeEscalation,
    /// Exposes credentials of users on the host's recent-user list.
    CredentialHarvest,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Host {
    pub id: HostId,
    pub subnet: SubnetId,
    pub required_privilege: u32,
    pub host_type: HostType,
    pub exploits: BTreeSet<ExploitKind>,
    /// Users with a recorded access history on this host, ascending by id.
    pub recent_users: Vec<UserId>,
}

impl Host {
    pub fn has_exploit(&self, kind: ExploitKind) -> bool {
        self.exploits.contains(&kind)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct User {
    pub id: UserId,
    pub privilege_level: u32,
    pub accessible_subnets: BTreeSet<SubnetId>,
    pub accessed_hosts: BTreeSet<HostId>,
}

/// Parameters for [`generate_network`]. The config travels with every
/// generated network (`config` key in the document) so downstream stages can
/// re-derive dimensions and regenerate networks from `(config, seed)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationConfig {
    pub n_hosts: u32,
    pub n_users: u32,
    pub n_subnets: u32,
    /// Count of privilege levels; 3 means levels {0, 1, 2}.
    pub privilege_levels: u32,
    pub p_priv_escalation_exploit: f64,
    pub p_cred_harvest_exploit: f64,
    /// Mean size of a user's accessed-host history (Poisson, clamped ≥ 1).
    pub mean_history_per_user: f64,
    /// Weight per host type, in [`HostType::ALL`] order.
    pub host_type_weights: Vec<f64>,
    /// Weight per privilege level, length `privilege_levels`.
    pub user_privilege_weights: Vec<f64>,
    pub subnets_per_user_mean: f64,
}

impl GenerationConfig {
    /// Desk-scale defaults: ~200 hosts and users across 10 subnets with
    /// three privilege levels.
    pub fn desk_scale() -> Self {
        GenerationConfig {
            n_hosts: 200,
            n_users: 200,
            n_subnets: 10,
            privilege_levels: 3,
            p_priv_escalation_exploit: 0.15,
            p_cred_harvest_exploit: 0.3,
            mean_history_per_user: 3.0,
            host_type_weights: vec![0.55, 0.2, 0.05, 0.1, 0.1],
            user_privilege_weights: vec![0.7, 0.25, 0.05],
            subnets_per_user_mean: 2.0,
        }
    }

    /// Scaled-up variant with ~1,000 hosts and users.
    pub fn large_scale() -> Self {
        GenerationConfig {
            n_hosts: 1000,
            n_users: 1000,
            n_subnets: 25,
            ..Self::desk_scale()
        }
    }

    pub fn validate(&self) -> Result<(), NetsimError> {
        fn invalid(field: &'static str, reason: impl Into<String>) -> NetsimError {
            NetsimError::InvalidConfig { field, reason: reason.into() }
        }
        fn check_count(field: &'static str, v: u32) -> Result<(), NetsimError> {
            if v < 1 {
                return Err(invalid(field, "must be >= 1"));
            }
            Ok(())
        }
        fn check_prob(field: &'static str, p: f64) -> Result<(), NetsimError> {
            if !(0.0..=1.0).contains(&p) || !p.is_finite() {
                return Err(invalid(field, format!("probability {p} outside [0, 1]")));
            }
            Ok(())
        }
        fn check_mean(field: &'static str, m: f64) -> Result<(), NetsimError> {
            if !(m > 0.0) || !m.is_finite() {
                return Err(invalid(field, format!("mean {m} must be positive")));
            }
            Ok(())
        }
        fn check_weights(field: &'static str, w: &[f64], expected_len: usize) -> Result<(), NetsimError> {
            if w.len() != expected_len {
                return Err(invalid(field, format!("expected {expected_len} weights, got {}", w.len())));
            }
            if w.iter().any(|x| !x.is_finite() || *x < 0.0) {
                return Err(invalid(field, "weights must be finite and non-negative"));
            }
            let sum: f64 = w.iter().sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(invalid(field, format!("weights sum to {sum}, expected 1 within 1e-9")));
            }
            Ok(())
        }

        check_count("n_hosts", self.n_hosts)?;
        check_count("n_users", self.n_users)?;
        check_count("n_subnets", self.n_subnets)?;
        check_count("privilege_levels", self.privilege_levels)?;
        check_prob("p_priv_escalation_exploit", self.p_priv_escalation_exploit)?;
        check_prob("p_cred_harvest_exploit", self.p_cred_harvest_exploit)?;
        check_mean("mean_history_per_user", self.mean_history_per_user)?;
        check_mean("subnets_per_user_mean", self.subnets_per_user_mean)?;
        check_weights("host_type_weights", &self.host_type_weights, HostType::ALL.len())?;
        check_weights(
            "user_privilege_weights",
            &self.user_privilege_weights,
            self.privilege_levels as usize,
        )?;
        Ok(())
    }

    /// Stable hash of the config document, used in network references.
    pub fn fingerprint(&self) -> String {
        let doc = serde_json::to_string(self).expect("config serializes");
        let mut hasher = Sha256::new();
        hasher.update(doc.as_bytes());
        hex::encode(&hasher.finalize()[..8])
    }
}

/// Identifies a generated network by its seed and config hash, so consumers
/// can regenerate it instead of embedding the whole network in every episode.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkRef {
    pub seed: u64,
    pub config_fingerprint: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Network {
    pub seed: u64,
    #[serde(rename = "config")]
    pub config: GenerationConfig,
    pub subnets: Vec<Subnet>,
    pub hosts: Vec<Host>,
    pub users: Vec<User>,
}

impl Network {
    pub fn n_hosts(&self) -> usize {
        self.hosts.len()
    }

    pub fn n_users(&self) -> usize {
        self.users.len()
    }

    pub fn n_subnets(&self) -> usize {
        self.subnets.len()
    }

    /// Hosts and users are indexed by id; validation rejects documents where
    /// ids are not contiguous from 0.
    pub fn host(&self, id: HostId) -> Option<&Host> {
        self.hosts.get(id as usize)
    }

    pub fn user(&self, id: UserId) -> Option<&User> {
        self.users.get(id as usize)
    }

    pub fn network_ref(&self) -> NetworkRef {
        NetworkRef { seed: self.seed, config_fingerprint: self.config.fingerprint() }
    }

    /// True iff `user` may legitimately access `host` (subnet and privilege).
    pub fn user_can_access(&self, user: &User, host: &Host) -> bool {
        user.accessible_subnets.contains(&host.subnet)
            && user.privilege_level >= host.required_privilege
    }
}

// ---------------------------------------------------------------------------
// Validation

/// A structural invariant violation, naming the entity and the invariant.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    EmptyNetwork { what: &'static str },
    NonContiguousSubnetId { index: usize, id: SubnetId },
    NonContiguousHostId { index: usize, id: HostId },
    NonContiguousUserId { index: usize, id: UserId },
    DanglingSubnet { host: HostId, subnet: SubnetId },
    HostPrivilegeOutOfRange { host: HostId, privilege: u32, levels: u32 },
    UserPrivilegeOutOfRange { user: UserId, privilege: u32, levels: u32 },
    DanglingRecentUser { host: HostId, user: UserId },
    DanglingAccessedHost { user: UserId, host: HostId },
    DanglingAccessibleSubnet { user: UserId, subnet: SubnetId },
    BipartiteMismatch { host: HostId, user: UserId },
    IllegalHistory { user: UserId, host: HostId, reason: &'static str },
    InvalidConfigEcho { reason: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyNetwork { what } => write!(f, "network has no {what}"),
            Violation::NonContiguousSubnetId { index, id } => {
                write!(f, "subnet at index {index} has id {id}; ids must be contiguous from 0")
            }
            Violation::NonContiguousHostId { index, id } => {
                write!(f, "host at index {index} has id {id}; ids must be contiguous from 0")
            }
            Violation::NonContiguousUserId { index, id } => {
                write!(f, "user at index {index} has id {id}; ids must be contiguous from 0")
            }
            Violation::DanglingSubnet { host, subnet } => {
                write!(f, "host {host} references missing subnet {subnet}")
            }
            Violation::HostPrivilegeOutOfRange { host, privilege, levels } => {
                write!(f, "host {host} requires privilege {privilege} outside configured range 0..{levels}")
            }
            Violation::UserPrivilegeOutOfRange { user, privilege, levels } => {
                write!(f, "user {user} holds privilege {privilege} outside configured range 0..{levels}")
            }
            Violation::DanglingRecentUser { host, user } => {
                write!(f, "host {host} lists missing user {user} in recent_users")
            }
            Violation::DanglingAccessedHost { user, host } => {
                write!(f, "user {user} lists missing host {host} in accessed_hosts")
            }
            Violation::DanglingAccessibleSubnet { user, subnet } => {
                write!(f, "user {user} lists missing subnet {subnet} in accessible_subnets")
            }
            Violation::BipartiteMismatch { host, user } => {
                write!(f, "bipartite mismatch between host {host} and user {user}: recent_users and accessed_hosts disagree")
            }
            Violation::IllegalHistory { user, host, reason } => {
                write!(f, "user {user} has accessed host {host} it could not legally reach ({reason})")
            }
            Violation::InvalidConfigEcho { reason } => {
                write!(f, "embedded config is invalid: {reason}")
            }
        }
    }
}

/// Check every structural invariant; an empty result means the network is
/// well formed. Violations are reported, not raised, so callers can show all
/// of them at once.
pub fn validate_network(network: &Network) -> Vec<Violation> {
    let mut out = Vec::new();

    if network.subnets.is_empty() {
        out.push(Violation::EmptyNetwork { what: "subnets" });
    }
    if network.hosts.is_empty() {
        out.push(Violation::EmptyNetwork { what: "hosts" });
    }
    if network.users.is_empty() {
        out.push(Violation::EmptyNetwork { what: "users" });
    }
    if let Err(e) = network.config.validate() {
        out.push(Violation::InvalidConfigEcho { reason: e.to_string() });
    }

    for (index, subnet) in network.subnets.iter().enumerate() {
        if subnet.id as usize != index {
            out.push(Violation::NonContiguousSubnetId { index, id: subnet.id });
        }
    }
    for (index, host) in network.hosts.iter().enumerate() {
        if host.id as usize != index {
            out.push(Violation::NonContiguousHostId { index, id: host.id });
        }
    }
    for (index, user) in network.users.iter().enumerate() {
        if user.id as usize != index {
            out.push(Violation::NonContiguousUserId { index, id: user.id });
        }
    }

    let n_subnets = network.subnets.len() as u32;
    let n_hosts = network.hosts.len() as u32;
    let n_users = network.users.len() as u32;
    let levels = network.config.privilege_levels;

    for host in &network.hosts {
        if host.subnet >= n_subnets {
            out.push(Violation::DanglingSubnet { host: host.id, subnet: host.subnet });
        }
        if host.required_privilege >= levels {
            out.push(Violation::HostPrivilegeOutOfRange {
                host: host.id,
                privilege: host.required_privilege,
                levels,
            });
        }
        for &user_id in &host.recent_users {
            if user_id >= n_users {
                out.push(Violation::DanglingRecentUser { host: host.id, user: user_id });
            } else if !network.users[user_id as usize].accessed_hosts.contains(&host.id) {
                out.push(Violation::BipartiteMismatch { host: host.id, user: user_id });
            }
        }
    }

    for user in &network.users {
        if user.privilege_level >= levels {
            out.push(Violation::UserPrivilegeOutOfRange {
                user: user.id,
                privilege: user.privilege_level,
                levels,
            });
        }
        for &subnet in &user.accessible_subnets {
            if subnet >= n_subnets {
                out.push(Violation::DanglingAccessibleSubnet { user: user.id, subnet });
            }
        }
        for &host_id in &user.accessed_hosts {
            if host_id >= n_hosts {
                out.push(Violation::DanglingAccessedHost { user: user.id, host: host_id });
                continue;
            }
            let host = &network.hosts[host_id as usize];
            if !host.recent_users.contains(&user.id) {
                out.push(Violation::BipartiteMismatch { host: host_id, user: user.id });
            }
            if !user.accessible_subnets.contains(&host.subnet) {
                out.push(Violation::IllegalHistory {
                    user: user.id,
                    host: host_id,
                    reason: "subnet not accessible",
                });
            }
            if user.privilege_level < host.required_privilege {
                out.push(Violation::IllegalHistory {
                    user: user.id,
                    host: host_id,
                    reason: "insufficient privilege",
                });
            }
        }
    }

    out
}

// ---------------------------------------------------------------------------
// Serialization

#[derive(Debug, Error)]
pub enum NetsimError {
    #[error("invalid config: {field}: {reason}")]
    InvalidConfig { field: &'static str, reason: String },
    #[error("infeasible placement for user {user} after {attempts} attempts (no legally accessible host)")]
    Infeasible { user: UserId, attempts: u32 },
    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },
    #[error("network document violates invariants: {}", format_violations(.0))]
    Validation(Vec<Violation>),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl NetsimError {
    /// Short machine-parsable code for CLI error lines.
    pub fn code(&self) -> &'static str {
        match self {
            NetsimError::InvalidConfig { .. } => "InvalidConfig",
            NetsimError::Infeasible { .. } => "Infeasible",
            NetsimError::Parse { .. } => "ParseError",
            NetsimError::Validation(_) => "ValidationError",
            NetsimError::Io { .. } => "IoError",
        }
    }
}

fn format_violations(violations: &[Violation]) -> String {
    let mut parts: Vec<String> = violations.iter().take(5).map(|v| v.to_string()).collect();
    if violations.len() > 5 {
        parts.push(format!("... and {} more", violations.len() - 5));
    }
    parts.join("; ")
}

/// Serialize a network to the documented JSON format.
pub fn save_network(network: &Network) -> String {
    serde_json::to_string_pretty(network).expect("network serializes")
}

/// Parse and validate a network document. Parse failures carry the document
/// path to the offending field (e.g. `hosts[3].subnet`); structurally broken
/// networks are rejected with the full violation list.
pub fn load_network(doc: &str) -> Result<Network, NetsimError> {
    let deserializer = &mut serde_json::Deserializer::from_str(doc);
    let network: Network = serde_path_to_error::deserialize(deserializer).map_err(|e| {
        NetsimError::Parse { path: e.path().to_string(), message: e.inner().to_string() }
    })?;
    let violations = validate_network(&network);
    if !violations.is_empty() {
        return Err(NetsimError::Validation(violations));
    }
    Ok(network)
}

pub fn save_network_file(network: &Network, path: &Path) -> Result<(), NetsimError> {
    std::fs::write(path, save_network(network))
        .map_err(|source| NetsimError::Io { path: path.display().to_string(), source })
}

pub fn load_network_file(path: &Path) -> Result<Network, NetsimError> {
    let doc = std::fs::read_to_string(path)
        .map_err(|source| NetsimError::Io { path: path.display().to_string(), source })?;
    load_network(&doc)
}

#[cfg(test)]
mod tests;
