//! Hop-count routing and per-node interface selection.
//!
//! Routes are breadth-first hop distances over the union of WiFi adjacency,
//! explicit wired links and the backbone (all backbone members one hop from
//! each other). Packets only move to neighbours one hop closer to the
//! destination, so every forward strictly decreases the remaining distance.

use std::collections::{HashMap, VecDeque};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::topology::HetNetTopology;

/// Hop distance marking an unreachable pair.
pub const UNREACHABLE: u32 = u32::MAX;

/// How a hop is carried.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinkKind {
    Wifi,
    /// Explicit point-to-point link; the value indexes the topology's wired links.
    Wired(usize),
    Backbone,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Hop {
    pub node: usize,
    pub kind: LinkKind,
}

/// Every hop leaving `node` in the routing graph.
pub fn neighbors<S: Real>(topology: &HetNetTopology<S>, node: usize) -> Vec<Hop> {
    let mut out: Vec<Hop> = topology
        .wifi_neighbors(node)
        .iter()
        .map(|&n| Hop {
            node: n,
            kind: LinkKind::Wifi,
        })
        .collect();
    for (i, l) in topology.wired_links().iter().enumerate() {
        let other = if l.a == node {
            l.b
        } else if l.b == node {
            l.a
        } else {
            continue;
        };
        out.push(Hop {
            node: other,
            kind: LinkKind::Wired(i),
        });
    }
    if topology.node(node).has_backbone {
        out.extend(topology.backbone_nodes().iter().filter(|&&b| b != node).map(|&b| Hop {
            node: b,
            kind: LinkKind::Backbone,
        }));
    }
    out
}

/// Hop distances from `root` to every node. The backbone clique is expanded
/// once, when its first member is dequeued.
pub fn bfs<S: Real>(topology: &HetNetTopology<S>, root: usize, wifi_only: bool) -> Vec<u32> {
    let n = topology.len();
    let mut dist = vec![UNREACHABLE; n];
    let mut queue = VecDeque::new();
    dist[root] = 0;
    queue.push_back(root);
    let mut backbone_done = wifi_only;
    let mut adj_wired: Vec<Vec<usize>> = Vec::new();
    if !wifi_only && !topology.wired_links().is_empty() {
        adj_wired = vec![Vec::new(); n];
        for l in topology.wired_links() {
            adj_wired[l.a].push(l.b);
            adj_wired[l.b].push(l.a);
        }
    }
    while let Some(u) = queue.pop_front() {
        let d = dist[u] + 1;
        let mut visit = |v: usize, queue: &mut VecDeque<usize>| {
            if dist[v] == UNREACHABLE {
                dist[v] = d;
                queue.push_back(v);
            }
        };
        for &v in topology.wifi_neighbors(u) {
            visit(v, &mut queue);
        }
        if let Some(w) = adj_wired.get(u) {
            for &v in w {
                visit(v, &mut queue);
            }
        }
        if !backbone_done && topology.node(u).has_backbone {
            backbone_done = true;
            for &v in topology.backbone_nodes() {
                visit(v, &mut queue);
            }
        }
    }
    dist
}

/// Hop distances toward a set of destinations.
#[derive(Clone, Debug, Default)]
pub struct RouteTable {
    trees: HashMap<usize, Vec<u32>>,
}

/// Routes toward every node.
pub fn build_routes<S: Real>(topology: &HetNetTopology<S>) -> RouteTable {
    build_routes_for(topology, &(0..topology.len()).collect::<Vec<_>>())
}

/// Routes toward the given destinations only.
pub fn build_routes_for<S: Real>(topology: &HetNetTopology<S>, destinations: &[usize]) -> RouteTable {
    RouteTable {
        trees: destinations.iter().map(|&d| (d, bfs(topology, d, false))).collect(),
    }
}

impl RouteTable {
    pub fn has_tree(&self, dst: usize) -> bool {
        self.trees.contains_key(&dst)
    }

    /// Hop distance between `a` and `b`, or `None` when unreachable or when
    /// neither endpoint has a tree.
    pub fn distance(&self, a: usize, b: usize) -> Option<u32> {
        let d = match (self.trees.get(&b), self.trees.get(&a)) {
            (Some(t), _) => t[a],
            (None, Some(t)) => t[b],
            (None, None) => return None,
        };
        (d != UNREACHABLE).then_some(d)
    }

    /// Neighbours of `node` exactly one hop closer to `dst`.
    pub fn next_hops<S: Real>(&self, topology: &HetNetTopology<S>, node: usize, dst: usize) -> Vec<Hop> {
        let Some(tree) = self.trees.get(&dst) else {
            return Vec::new();
        };
        let d = tree[node];
        if d == UNREACHABLE || d == 0 {
            return Vec::new();
        }
        neighbors(topology, node)
            .into_iter()
            .filter(|h| tree[h.node] == d - 1)
            .collect()
    }

    /// True if `node` lies on some shortest `src`-`dst` path.
    pub fn on_route(&self, node: usize, src: usize, dst: usize) -> bool {
        match (
            self.distance(src, node),
            self.distance(node, dst),
            self.distance(src, dst),
        ) {
            (Some(a), Some(b), Some(total)) => a + b == total,
            _ => false,
        }
    }
}

/// Radio interface of a node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Interface {
    Cellular,
    /// The ad-hoc path: WiFi hops plus any wired or backbone hops on it.
    Wifi,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct InterfaceSet {
    pub cellular: bool,
    pub wifi: bool,
}

impl InterfaceSet {
    pub const CELLULAR: InterfaceSet = InterfaceSet {
        cellular: true,
        wifi: false,
    };
    pub const WIFI: InterfaceSet = InterfaceSet {
        cellular: false,
        wifi: true,
    };
    pub const BOTH: InterfaceSet = InterfaceSet {
        cellular: true,
        wifi: true,
    };

    pub fn contains(&self, i: Interface) -> bool {
        match i {
            Interface::Cellular => self.cellular,
            Interface::Wifi => self.wifi,
        }
    }
}

/// Scheduling rule when a relay uses both interfaces.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "p")]
pub enum BothScheduling {
    RoundRobin,
    Duplicate,
    /// Cellular with probability `p`, WiFi otherwise.
    Probabilistic(f64),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode", content = "scheduling")]
pub enum ForwardPolicy {
    CellularOnly,
    #[default]
    WifiOnly,
    Both(BothScheduling),
}

impl ForwardPolicy {
    pub fn validate(&self) -> Result<()> {
        if let ForwardPolicy::Both(BothScheduling::Probabilistic(p)) = self {
            if !(0.0..=1.0).contains(p) {
                return Err(Error::Config(format!("probability {p} outside [0, 1]")));
            }
        }
        Ok(())
    }

    pub fn uses(&self, i: Interface) -> bool {
        matches!(
            (self, i),
            (ForwardPolicy::Both(_), _)
                | (ForwardPolicy::CellularOnly, Interface::Cellular)
                | (ForwardPolicy::WifiOnly, Interface::Wifi)
        )
    }
}

/// Per-node interface selection; owns the round-robin counter.
#[derive(Clone, Debug)]
pub struct InterfaceSelector {
    policy: ForwardPolicy,
    available: InterfaceSet,
    next_cellular: bool,
}

impl InterfaceSelector {
    /// Fails when the policy needs an interface the node does not have.
    pub fn new(policy: ForwardPolicy, available: InterfaceSet) -> Result<Self> {
        policy.validate()?;
        for i in [Interface::Cellular, Interface::Wifi] {
            if policy.uses(i) && !available.contains(i) {
                return Err(Error::Config(format!(
                    "policy {policy:?} needs {i:?}, which the node lacks"
                )));
            }
        }
        Ok(InterfaceSelector {
            policy,
            available,
            next_cellular: false,
        })
    }

    pub fn policy(&self) -> ForwardPolicy {
        self.policy
    }

    pub fn available(&self) -> InterfaceSet {
        self.available
    }

    /// Interfaces to use for the next outgoing packet.
    pub fn select<R: Rng + ?Sized>(&mut self, rng: &mut R) -> InterfaceSet {
        match self.policy {
            ForwardPolicy::CellularOnly => InterfaceSet::CELLULAR,
            ForwardPolicy::WifiOnly => InterfaceSet::WIFI,
            ForwardPolicy::Both(BothScheduling::Duplicate) => InterfaceSet::BOTH,
            ForwardPolicy::Both(BothScheduling::RoundRobin) => {
                let pick = if self.next_cellular {
                    InterfaceSet::CELLULAR
                } else {
                    InterfaceSet::WIFI
                };
                self.next_cellular = !self.next_cellular;
                pick
            }
            ForwardPolicy::Both(BothScheduling::Probabilistic(p)) => {
                if rng.random_bool(p) {
                    InterfaceSet::CELLULAR
                } else {
                    InterfaceSet::WIFI
                }
            }
        }
    }
}

/// One-shot form of [`InterfaceSelector::select`].
pub fn select_interfaces<R: Rng + ?Sized>(selector: &mut InterfaceSelector, rng: &mut R) -> InterfaceSet {
    selector.select(rng)
}
