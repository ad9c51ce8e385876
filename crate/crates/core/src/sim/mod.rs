//! Slotted packet-level simulation of one source-destination session.
//!
//! One slot is the airtime of one WiFi packet at `R_WiFi`. Every slot:
//!
//! 1. ACKs due at this slot reach the source, which moves on to the next block.
//! 2. Relays absorb packets whose processing delay has elapsed. Innovative
//!    packets are buffered and earn one forwarding credit on the interfaces
//!    chosen by the forwarding policy.
//! 3. The cellular pipe releases whole packets from fractional per-slot credit
//!    (source uplink and destination downlink are both rate limited).
//! 4. Wired and backbone hops move packets at their configured rates.
//! 5. A greedy protocol-model schedule picks the WiFi transmissions.
//! 6. Everything sent in the slot is delivered; the destination decodes and
//!    schedules an ACK when its rank reaches `M`.
//!
//! Relays hear about a new block only when a packet of that block reaches
//! them, at which point they drop the old one.

pub mod loading;
pub mod schedule;
pub mod trace;

use std::collections::{BTreeMap, HashMap, VecDeque};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rlnc::{self, BlockId, CodedPacket, DecoderState, RecodeBuffer, SourceBlock};
use crate::routing::{self, ForwardPolicy, Interface, InterfaceSelector, InterfaceSet, LinkKind, RouteTable};
use crate::scalar::Real;
use crate::topology::{HetNetTopology, TopologyParams};

pub use loading::{loaded_cellular_rate, LoadingMode};
pub use schedule::{schedule_wifi_slot, PendingTx};
pub use trace::{replay_destination, BlockReplay, Channel, EventTrace, TraceRecord};

/// Everything that parameterizes a session.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, bound = "S: Real")]
pub struct ScenarioConfig<S> {
    pub topology: TopologyParams<S>,
    /// Nodes placed over the seven cells.
    pub node_count: usize,
    /// Block size `M`.
    pub block_size: usize,
    /// Simulated payload bytes per packet.
    pub packet_size: usize,
    /// `R_WiFi`, in rate units; one WiFi packet per slot.
    pub wifi_rate: S,
    /// Cellular users per cell, `U`.
    pub users_per_cell: usize,
    pub loading: LoadingMode,
    /// Slots a relay holds a packet before it can recode with it.
    pub processing_delay: u64,
    /// Slots between decoding and the ACK reaching the source.
    pub ack_delay: u64,
    /// Relay forwarding policy.
    pub policy: ForwardPolicy,
    /// Minimum WiFi hop count between source and destination.
    pub min_hops: u32,
    pub slot_budget: u64,
    /// Stop early after this many decoded blocks.
    pub block_target: Option<u64>,
    pub seed: u64,
    pub wifi_enabled: bool,
    pub cellular_enabled: bool,
    pub record_trace: bool,
}

impl<S: Real> Default for ScenarioConfig<S> {
    fn default() -> Self {
        ScenarioConfig {
            topology: TopologyParams::default(),
            node_count: 5250,
            block_size: rlnc::DEFAULT_BLOCK_SIZE,
            packet_size: 32,
            wifi_rate: S::one(),
            users_per_cell: 1,
            loading: LoadingMode::EqualRate,
            processing_delay: 0,
            ack_delay: 1,
            policy: ForwardPolicy::WifiOnly,
            min_hops: 2,
            slot_budget: 4000,
            block_target: None,
            seed: 1,
            wifi_enabled: true,
            cellular_enabled: true,
            record_trace: false,
        }
    }
}

impl<S: Real> ScenarioConfig<S> {
    pub fn validate(&self) -> Result<()> {
        self.topology.validate()?;
        self.policy.validate()?;
        if self.block_size == 0 {
            return Err(Error::Config("block_size must be at least 1".into()));
        }
        if self.block_size > u16::MAX as usize {
            return Err(Error::Config("block_size too large".into()));
        }
        if self.packet_size == 0 {
            return Err(Error::Config("packet_size must be positive".into()));
        }
        if !(self.wifi_rate > S::zero()) {
            return Err(Error::Config("wifi_rate must be positive".into()));
        }
        if self.users_per_cell == 0 {
            return Err(Error::Config("users_per_cell must be at least 1".into()));
        }
        if self.slot_budget == 0 {
            return Err(Error::Config("slot_budget must be at least 1".into()));
        }
        if self.node_count == 0 {
            return Err(Error::Config("node_count must be positive".into()));
        }
        if self.policy.uses(Interface::Cellular) && !self.cellular_enabled && self.wifi_enabled {
            return Err(Error::Config(
                "relay policy uses cellular but cellular is disabled".into(),
            ));
        }
        Ok(())
    }
}

/// Packets put on each medium.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PacketCounts {
    pub cellular: u64,
    pub wifi: u64,
    pub wired: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Real")]
pub struct SessionStats<S> {
    pub src: usize,
    pub dst: usize,
    pub blocks_delivered: u64,
    pub slots_elapsed: u64,
    pub packets_sent: PacketCounts,
    pub innovative_at_destination: u64,
    pub redundant_at_destination: u64,
    pub stale_at_destination: u64,
    /// Decoded blocks that differed from what the source sent.
    pub corrupt_blocks: u64,
    pub payload_bytes_delivered: u64,
    /// End-to-end throughput in rate units.
    pub throughput: S,
    /// Throughput divided by `R_WiFi`.
    pub relative_throughput: S,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SessionOutcome<S> {
    pub stats: SessionStats<S>,
    pub trace: EventTrace,
    /// Admitted WiFi `(tx, rx)` pairs per slot, kept with the trace.
    pub wifi_schedule: Vec<(u64, Vec<(usize, usize)>)>,
}

/// Source and destination of a session.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionPair {
    pub src: usize,
    pub dst: usize,
}

/// Picks a random pair at least `min_hops` WiFi hops apart.
pub fn pick_pair<S: Real, R: Rng + ?Sized>(
    topology: &HetNetTopology<S>,
    min_hops: u32,
    rng: &mut R,
) -> Result<SessionPair> {
    if topology.len() < 2 {
        return Err(Error::Config("need at least two nodes for a session".into()));
    }
    for _ in 0..1000 {
        let src = rng.random_range(0..topology.len());
        let dist = routing::bfs(topology, src, true);
        let candidates: Vec<usize> = (0..topology.len())
            .filter(|&v| v != src && dist[v] != routing::UNREACHABLE && dist[v] >= min_hops.max(1))
            .collect();
        if let Some(&dst) = candidates.choose(rng) {
            return Ok(SessionPair { src, dst });
        }
    }
    Err(Error::Config(format!(
        "no node pair is {min_hops} or more WiFi hops apart"
    )))
}

/// Adds one slot of credit, keeping at most one slot's worth beyond a whole
/// packet in reserve.
#[inline]
fn accrue<S: Real>(credit: &mut S, rate: S) {
    *credit = (*credit + rate).min(rate + S::one());
}

/// Whole packets covered by `credit`, forgiving accumulated rounding error
/// (ten additions of 0.1 must make one packet).
#[inline]
fn whole<S: Real>(credit: S) -> usize {
    (credit + S::epsilon().sqrt()).floor().to_usize().unwrap_or(0)
}

#[derive(Clone, Debug, Default)]
struct NextHops {
    wifi: Vec<usize>,
    wired: Vec<(usize, usize)>,
    backbone: Vec<usize>,
    distance: u32,
}

struct Relay<S> {
    buffer: RecodeBuffer,
    fwd_credit: usize,
    cell_credit: usize,
    selector: InterfaceSelector,
    arrivals: VecDeque<(u64, Channel, CodedPacket)>,
    cell_uplink: S,
    cell_rate: S,
    backbone_egress: S,
}

struct Engine<'a, S: Real> {
    cfg: &'a ScenarioConfig<S>,
    topo: &'a HetNetTopology<S>,
    routes: &'a RouteTable,
    pair: SessionPair,
    rng: ChaCha8Rng,

    block: SourceBlock,
    src_cell_uplink: S,
    src_cell_rate: S,
    src_backbone_egress: S,
    dst_downlink: S,
    dst_cell_rate: S,
    backbone_rate: S,
    /// Per wired link, credit in the `a -> b` and `b -> a` directions.
    wired_credit: Vec<[S; 2]>,

    relays: BTreeMap<usize, Relay<S>>,
    hops: HashMap<usize, NextHops>,
    decoder: DecoderState,
    acks: VecDeque<(u64, BlockId)>,

    stats: SessionStats<S>,
    trace: EventTrace,
    wifi_schedule: Vec<(u64, Vec<(usize, usize)>)>,
}

impl<'a, S: Real> Engine<'a, S> {
    fn next_hops(&mut self, node: usize) -> &NextHops {
        let (topo, routes, dst) = (self.topo, self.routes, self.pair.dst);
        self.hops.entry(node).or_insert_with(|| {
            let mut h = NextHops {
                distance: routes.distance(node, dst).unwrap_or(routing::UNREACHABLE),
                ..Default::default()
            };
            for hop in routes.next_hops(topo, node, dst) {
                match hop.kind {
                    LinkKind::Wifi => h.wifi.push(hop.node),
                    LinkKind::Wired(i) => h.wired.push((i, hop.node)),
                    LinkKind::Backbone => h.backbone.push(hop.node),
                }
            }
            h
        })
    }

    fn loaded_rate(&self, node: usize) -> Result<S> {
        let own = self.topo.node(node).cellular_rate;
        let r = loaded_cellular_rate(
            own,
            self.topo.params().cell_rate,
            self.cfg.users_per_cell,
            self.cfg.loading,
        )?;
        Ok(r / self.cfg.wifi_rate)
    }

    fn new_relay(&self, node: usize) -> Result<Relay<S>> {
        let available = InterfaceSet {
            cellular: self.cfg.cellular_enabled && self.topo.node(node).cellular_rate > S::zero(),
            wifi: true,
        };
        Ok(Relay {
            buffer: RecodeBuffer::new(self.topo.params().buffer_capacity),
            fwd_credit: 0,
            cell_credit: 0,
            selector: InterfaceSelector::new(self.cfg.policy, available)?,
            arrivals: VecDeque::new(),
            cell_uplink: S::zero(),
            cell_rate: self.loaded_rate(node)?,
            backbone_egress: S::zero(),
        })
    }

    fn record(&mut self, slot: u64, node: usize, channel: Channel, block: BlockId, innovative: bool) {
        if self.cfg.record_trace {
            self.trace.push(TraceRecord {
                slot,
                node_id: node,
                interface: channel,
                block_id: block.0,
                innovative,
            });
        }
    }

    fn source_packet(&mut self) -> CodedPacket {
        rlnc::encode(&self.block, &mut self.rng)
    }

    fn relay_packet(&mut self, node: usize) -> CodedPacket {
        let relay = self.relays.get(&node).expect("relay exists");
        rlnc::recode(&relay.buffer, &mut self.rng).expect("relay with credit holds packets")
    }

    fn deliver_acks(&mut self, slot: u64) {
        while self.acks.front().is_some_and(|&(due, _)| due <= slot) {
            let (_, block) = self.acks.pop_front().expect("checked non-empty");
            if block == self.block.block_id() {
                let next = block.next();
                self.block = SourceBlock::random(next, self.cfg.block_size, self.cfg.packet_size, &mut self.rng);
            }
        }
    }

    fn absorb_arrivals(&mut self, slot: u64) {
        let ids: Vec<usize> = self.relays.keys().copied().collect();
        let cap = self.topo.params().buffer_capacity;
        let (src, dst) = (self.pair.src, self.pair.dst);
        for id in ids {
            loop {
                let relay = self.relays.get_mut(&id).expect("listed relay");
                if !relay.arrivals.front().is_some_and(|&(ready, _, _)| ready <= slot) {
                    break;
                }
                let (_, channel, p) = relay.arrivals.pop_front().expect("checked non-empty");
                if let Some(current) = relay.buffer.block_id() {
                    if p.block_id.is_newer_than(current) {
                        relay.buffer.purge();
                        relay.fwd_credit = 0;
                        relay.cell_credit = 0;
                    } else if p.block_id != current {
                        self.record(slot, id, channel, p.block_id, false);
                        continue;
                    }
                }
                let block = p.block_id;
                let keep = self.routes.on_route(id, src, dst) && relay.buffer.is_innovative(&p);
                if keep {
                    relay.buffer.insert(p).expect("buffer holds this block");
                    let use_if = relay.selector.select(&mut self.rng);
                    if use_if.wifi {
                        relay.fwd_credit = (relay.fwd_credit + 1).min(cap);
                    }
                    if use_if.cellular {
                        relay.cell_credit = (relay.cell_credit + 1).min(cap);
                    }
                }
                self.record(slot, id, channel, block, keep);
            }
        }
    }

    fn cellular_phase(&mut self, out: &mut Vec<(usize, usize, Channel, CodedPacket)>) {
        if !self.cfg.cellular_enabled {
            return;
        }
        let dst = self.pair.dst;
        accrue(&mut self.dst_downlink, self.dst_cell_rate);
        accrue(&mut self.src_cell_uplink, self.src_cell_rate);
        let mut senders = vec![self.pair.src];
        for (&id, r) in self.relays.iter_mut() {
            if r.selector.policy().uses(Interface::Cellular) && r.selector.available().cellular {
                accrue(&mut r.cell_uplink, r.cell_rate);
                if r.cell_credit > 0 {
                    senders.push(id);
                }
            }
        }
        loop {
            let mut progressed = false;
            for &s in &senders {
                if whole(self.dst_downlink) == 0 {
                    return;
                }
                let p = if s == self.pair.src {
                    if whole(self.src_cell_uplink) == 0 {
                        continue;
                    }
                    self.src_cell_uplink = self.src_cell_uplink - S::one();
                    self.source_packet()
                } else {
                    let r = self.relays.get_mut(&s).expect("sender relay");
                    if r.cell_credit == 0 || whole(r.cell_uplink) == 0 {
                        continue;
                    }
                    r.cell_uplink = r.cell_uplink - S::one();
                    r.cell_credit -= 1;
                    self.relay_packet(s)
                };
                self.dst_downlink = self.dst_downlink - S::one();
                out.push((s, dst, Channel::Cellular, p));
                progressed = true;
            }
            if !progressed {
                return;
            }
        }
    }

    /// Packets `node` may still forward this slot; the source is unlimited.
    fn credit(&self, node: usize) -> usize {
        if node == self.pair.src {
            usize::MAX
        } else {
            self.relays.get(&node).map_or(0, |r| r.fwd_credit)
        }
    }

    fn spend(&mut self, node: usize) -> CodedPacket {
        if node == self.pair.src {
            self.source_packet()
        } else {
            let p = self.relay_packet(node);
            self.relays.get_mut(&node).expect("relay").fwd_credit -= 1;
            p
        }
    }

    fn senders(&self) -> Vec<usize> {
        let mut v = vec![self.pair.src];
        v.extend(self.relays.iter().filter(|(_, r)| r.fwd_credit > 0).map(|(&id, _)| id));
        v
    }

    /// Wired and backbone links are token buckets: credit builds every slot
    /// whether or not anything is queued.
    fn wired_phase(&mut self, out: &mut Vec<(usize, usize, Channel, CodedPacket)>) {
        let links = self.topo.wired_links();
        for (credit, link) in self.wired_credit.iter_mut().zip(links) {
            let rate = link.rate / self.cfg.wifi_rate;
            accrue(&mut credit[0], rate);
            accrue(&mut credit[1], rate);
        }
        let rate = self.backbone_rate;
        if self.topo.node(self.pair.src).has_backbone {
            accrue(&mut self.src_backbone_egress, rate);
        }
        for (&id, r) in self.relays.iter_mut() {
            if self.topo.node(id).has_backbone {
                accrue(&mut r.backbone_egress, rate);
            }
        }

        for u in self.senders() {
            let hops = self.next_hops(u).clone();
            if !hops.backbone.is_empty() {
                let egress = if u == self.pair.src {
                    self.src_backbone_egress
                } else {
                    self.relays[&u].backbone_egress
                };
                let n = whole(egress).min(self.credit(u));
                for _ in 0..n {
                    let to = *hops.backbone.choose(&mut self.rng).expect("non-empty");
                    let p = self.spend(u);
                    out.push((u, to, Channel::Wired, p));
                }
                let left = egress - S::from_count(n);
                if u == self.pair.src {
                    self.src_backbone_egress = left;
                } else {
                    self.relays.get_mut(&u).expect("relay").backbone_egress = left;
                }
            }
            for &(link, to) in &hops.wired {
                let dir = usize::from(links[link].a != u);
                let n = whole(self.wired_credit[link][dir]).min(self.credit(u));
                self.wired_credit[link][dir] = self.wired_credit[link][dir] - S::from_count(n);
                for _ in 0..n {
                    let p = self.spend(u);
                    out.push((u, to, Channel::Wired, p));
                }
            }
        }
    }

    fn wifi_phase(&mut self, slot: u64, out: &mut Vec<(usize, usize, Channel, CodedPacket)>) {
        let mut pending = Vec::new();
        for u in self.senders() {
            if self.credit(u) == 0 {
                continue;
            }
            let hops = self.next_hops(u);
            if hops.wifi.is_empty() {
                continue;
            }
            let (distance, choices) = (hops.distance, hops.wifi.clone());
            let rx = *choices.choose(&mut self.rng).expect("non-empty");
            pending.push(PendingTx {
                tx: u,
                rx,
                priority: distance,
            });
        }
        if pending.is_empty() {
            return;
        }
        let admitted = schedule_wifi_slot(&pending, self.topo, &mut self.rng);
        if self.cfg.record_trace {
            self.wifi_schedule
                .push((slot, admitted.iter().map(|&i| (pending[i].tx, pending[i].rx)).collect()));
        }
        for i in admitted {
            let PendingTx { tx, rx, .. } = pending[i];
            let p = self.spend(tx);
            out.push((tx, rx, Channel::Wifi, p));
        }
    }

    fn at_destination(&mut self, slot: u64, channel: Channel, p: CodedPacket) -> Result<()> {
        let current = self.decoder.block_id();
        if p.block_id.is_newer_than(current) {
            // cannot happen with block-by-block ACKs, but a newer block wins
            self.decoder = DecoderState::new(p.block_id, self.cfg.block_size, self.cfg.packet_size);
        } else if p.block_id != current {
            self.stats.stale_at_destination += 1;
            self.record(slot, self.pair.dst, channel, p.block_id, false);
            return Ok(());
        }
        let block = p.block_id;
        let innovative = self.decoder.receive(p)?;
        if innovative {
            self.stats.innovative_at_destination += 1;
        } else {
            self.stats.redundant_at_destination += 1;
        }
        self.record(slot, self.pair.dst, channel, block, innovative);
        if self.decoder.is_complete() {
            let decoded = self.decoder.decode()?;
            if block != self.block.block_id() || decoded.packets() != self.block.packets() {
                self.stats.corrupt_blocks += 1;
            }
            self.stats.blocks_delivered += 1;
            self.acks.push_back((slot + 1 + self.cfg.ack_delay, block));
            self.decoder = DecoderState::new(block.next(), self.cfg.block_size, self.cfg.packet_size);
        }
        Ok(())
    }

    fn deliver(&mut self, slot: u64, sent: Vec<(usize, usize, Channel, CodedPacket)>) -> Result<()> {
        for (_, to, channel, p) in sent {
            match channel {
                Channel::Cellular => self.stats.packets_sent.cellular += 1,
                Channel::Wifi => self.stats.packets_sent.wifi += 1,
                Channel::Wired => self.stats.packets_sent.wired += 1,
            }
            if to == self.pair.dst {
                self.at_destination(slot, channel, p)?;
            } else {
                if !self.relays.contains_key(&to) {
                    let r = self.new_relay(to)?;
                    self.relays.insert(to, r);
                }
                let ready = slot + 1 + self.cfg.processing_delay;
                self.relays
                    .get_mut(&to)
                    .expect("inserted")
                    .arrivals
                    .push_back((ready, channel, p));
            }
        }
        Ok(())
    }

    fn run(mut self) -> Result<SessionOutcome<S>> {
        let mut slot = 0;
        while slot < self.cfg.slot_budget {
            self.deliver_acks(slot);
            self.absorb_arrivals(slot);
            let mut sent = Vec::new();
            self.cellular_phase(&mut sent);
            if self.cfg.wifi_enabled {
                self.wired_phase(&mut sent);
                self.wifi_phase(slot, &mut sent);
            }
            self.deliver(slot, sent)?;
            slot += 1;
            if self.cfg.block_target.is_some_and(|t| self.stats.blocks_delivered >= t) {
                break;
            }
        }
        let m = self.cfg.block_size as u64;
        self.stats.slots_elapsed = slot;
        self.stats.payload_bytes_delivered = self.stats.blocks_delivered * m * self.cfg.packet_size as u64;
        let rel = S::from_u64(self.stats.blocks_delivered * m).unwrap_or_else(S::zero)
            / S::from_u64(slot).unwrap_or_else(S::one);
        self.stats.relative_throughput = rel;
        self.stats.throughput = rel * self.cfg.wifi_rate;
        Ok(SessionOutcome {
            stats: self.stats,
            trace: self.trace,
            wifi_schedule: self.wifi_schedule,
        })
    }
}

/// Runs one session between `pair.src` and `pair.dst`. `routes` must hold
/// trees for both endpoints.
pub fn run_session<S: Real>(
    config: &ScenarioConfig<S>,
    topology: &HetNetTopology<S>,
    routes: &RouteTable,
    pair: SessionPair,
) -> Result<SessionOutcome<S>> {
    config.validate()?;
    let SessionPair { src, dst } = pair;
    if src >= topology.len() || dst >= topology.len() || src == dst {
        return Err(Error::Config(format!("invalid session pair {src} -> {dst}")));
    }
    if !routes.has_tree(src) || !routes.has_tree(dst) {
        return Err(Error::Config(
            "route table lacks trees for the session endpoints".into(),
        ));
    }
    let path = routes.distance(src, dst);
    let wifi_hops = routing::bfs(topology, dst, true)[src];
    if config.wifi_enabled && wifi_hops != routing::UNREACHABLE && wifi_hops < config.min_hops {
        return Err(Error::Config(format!(
            "pair is {wifi_hops} WiFi hops apart, below the minimum of {}",
            config.min_hops
        )));
    }
    let cell_link = topology.cellular_link_rate(src, dst);
    let wifi_path = config.wifi_enabled && path.is_some();
    let cell_path = config.cellular_enabled && cell_link > S::zero();
    if !wifi_path && !cell_path {
        return Err(Error::NoPath { src, dst });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let block = SourceBlock::random(BlockId(0), config.block_size, config.packet_size, &mut rng);
    let mut engine = Engine {
        cfg: config,
        topo: topology,
        routes,
        pair,
        rng,
        block,
        src_cell_uplink: S::zero(),
        src_cell_rate: S::zero(),
        src_backbone_egress: S::zero(),
        dst_downlink: S::zero(),
        dst_cell_rate: S::zero(),
        backbone_rate: topology.params().backbone_rate,
        wired_credit: vec![[S::zero(); 2]; topology.wired_links().len()],
        relays: BTreeMap::new(),
        hops: HashMap::new(),
        decoder: DecoderState::new(BlockId(0), config.block_size, config.packet_size),
        acks: VecDeque::new(),
        stats: SessionStats {
            src,
            dst,
            ..Default::default()
        },
        trace: EventTrace::default(),
        wifi_schedule: Vec::new(),
    };
    engine.src_cell_rate = engine.loaded_rate(src)?;
    engine.dst_cell_rate = engine.loaded_rate(dst)?;
    engine.run()
}

/// Cellular-only and combined relative throughput for the same session.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeComparison<S> {
    pub cellular_only: SessionStats<S>,
    pub combined: SessionStats<S>,
}

/// Runs the session twice with the same seed: WiFi off, then both paths on.
pub fn compare_modes<S: Real>(
    config: &ScenarioConfig<S>,
    topology: &HetNetTopology<S>,
    routes: &RouteTable,
    pair: SessionPair,
) -> Result<ModeComparison<S>> {
    let cellular_cfg = ScenarioConfig {
        wifi_enabled: false,
        cellular_enabled: true,
        ..config.clone()
    };
    let combined_cfg = ScenarioConfig {
        wifi_enabled: true,
        cellular_enabled: true,
        ..config.clone()
    };
    Ok(ModeComparison {
        cellular_only: run_session(&cellular_cfg, topology, routes, pair)?.stats,
        combined: run_session(&combined_cfg, topology, routes, pair)?.stats,
    })
}
