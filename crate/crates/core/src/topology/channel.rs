//! Shared-medium capacity model for the Wi-Fi access cell and the WiMAX uplink.
//!
//! Each active member gets `aggregate / n` scaled by a contention efficiency
//! `η(n) = 1 / (1 + c·(n − 1))`. CSMA channels are point-to-point here and
//! return their link rate unchanged.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::SimError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tier {
    ReliefCenterLan,
    WifiClient,
    WimaxSs,
    Server,
    Bts,
    Ap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId {
    pub index: usize,
    pub tier: Tier,
}

impl NodeId {
    pub fn new(index: usize, tier: Tier) -> Self {
        Self { index, tier }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelKind {
    Csma,
    Wifi,
    Wimax,
}

#[derive(Debug, Clone)]
pub struct SharedChannel {
    pub kind: ChannelKind,
    pub aggregate_rate_bps: f64,
    pub contention: f64,
    pub modulation_label: String,
    active_members: BTreeSet<NodeId>,
}

impl SharedChannel {
    pub fn new(kind: ChannelKind, aggregate_rate_bps: f64, contention: f64) -> Result<Self, SimError> {
        if !(aggregate_rate_bps > 0.0) {
            return Err(SimError::InvalidConfig(format!(
                "channel aggregate rate must be positive, got {aggregate_rate_bps}"
            )));
        }
        if !(contention >= 0.0) {
            return Err(SimError::InvalidConfig(format!(
                "contention coefficient must be nonnegative, got {contention}"
            )));
        }
        let modulation_label = match kind {
            ChannelKind::Wimax => "OFDM 16-QAM",
            ChannelKind::Wifi => "802.11n 5GHz",
            ChannelKind::Csma => "CSMA",
        }
        .to_string();
        Ok(Self {
            kind,
            aggregate_rate_bps,
            contention,
            modulation_label,
            active_members: BTreeSet::new(),
        })
    }

    pub fn join(&mut self, node: NodeId) -> bool {
        self.active_members.insert(node)
    }

    pub fn leave(&mut self, node: NodeId) -> bool {
        self.active_members.remove(&node)
    }

    pub fn members(&self) -> impl Iterator<Item = &NodeId> {
        self.active_members.iter()
    }

    pub fn member_count(&self) -> usize {
        self.active_members.len()
    }

    pub fn efficiency(&self, n: usize) -> f64 {
        contention_efficiency(n, self.contention)
    }

    pub fn effective_rate(&self, member: NodeId) -> Result<f64, SimError> {
        if !self.active_members.contains(&member) {
            return Err(SimError::MemberNotActive(member.index));
        }
        Ok(match self.kind {
            ChannelKind::Csma => self.aggregate_rate_bps,
            ChannelKind::Wifi | ChannelKind::Wimax => {
                per_member_rate(self.aggregate_rate_bps, self.active_members.len(), self.contention)
            }
        })
    }
}

pub fn contention_efficiency(n: usize, c: f64) -> f64 {
    1.0 / (1.0 + c * (n.max(1) - 1) as f64)
}

pub fn per_member_rate(aggregate_bps: f64, n: usize, c: f64) -> f64 {
    let n = n.max(1);
    aggregate_bps / n as f64 * contention_efficiency(n, c)
}
