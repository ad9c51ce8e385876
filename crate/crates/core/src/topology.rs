//! Seven-cell hexagonal HetNet geometry.
//!
//! Cells are flat-topped hexagons of circumradius `R` around base stations at
//! the origin and its six neighbours. Nodes are placed uniformly over the
//! union, attached to the nearest base station, and given a tiered cellular
//! rate by normalized distance from it. WiFi adjacency is the unit-disk graph
//! of radius `r`; concurrent WiFi transmissions follow the protocol model
//! with guard factor `delta`.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::BufRead;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

pub const CELL_COUNT: usize = 7;

/// Planar position in meters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point<S> {
    pub x: S,
    pub y: S,
}

impl<S: Real> Point<S> {
    pub fn new(x: S, y: S) -> Self {
        Point { x, y }
    }

    #[inline]
    pub fn distance(&self, other: &Point<S>) -> S {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// One distance band of the cellular rate map: nodes with normalized distance
/// `d / R` below `upper` get `factor * cell_rate`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateTier<S> {
    pub upper: S,
    pub factor: S,
}

/// Parameters of the geometric model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, bound = "S: Real")]
pub struct TopologyParams<S> {
    /// Hexagon circumradius `R` in meters.
    pub cell_radius: S,
    /// WiFi transmission range `r` in meters.
    pub wifi_range: S,
    /// Protocol-model guard factor.
    pub delta: S,
    /// Cell maximum rate `R_cell`, in rate units.
    pub cell_rate: S,
    /// Rate tiers ordered by increasing `upper`; the last tier covers the
    /// rest of the cell.
    pub rate_tiers: Vec<RateTier<S>>,
    /// Fraction `k/n` of each cell's nodes with wired backbone access.
    pub backbone_fraction: S,
    /// Backbone throughput as a multiple of `R_WiFi`.
    pub backbone_rate: S,
    /// Relay buffer size `N_buf` in packets.
    pub buffer_capacity: usize,
}

impl<S: Real> Default for TopologyParams<S> {
    fn default() -> Self {
        TopologyParams {
            cell_radius: S::lit(1000.0),
            wifi_range: S::lit(100.0),
            delta: S::lit(0.2),
            cell_rate: S::one(),
            rate_tiers: default_tiers(),
            backbone_fraction: S::zero(),
            backbone_rate: S::lit(100.0),
            buffer_capacity: 8,
        }
    }
}

fn default_tiers<S: Real>() -> Vec<RateTier<S>> {
    [(0.25, 1.0), (0.5, 0.5), (0.75, 0.25), (1.0, 0.125)]
        .iter()
        .map(|&(upper, factor)| RateTier {
            upper: S::lit(upper),
            factor: S::lit(factor),
        })
        .collect()
}

impl<S: Real> TopologyParams<S> {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("cell_radius", self.cell_radius),
            ("wifi_range", self.wifi_range),
            ("cell_rate", self.cell_rate),
            ("backbone_rate", self.backbone_rate),
        ];
        for (name, v) in positive {
            if !(v > S::zero()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if self.delta < S::zero() {
            return Err(Error::Config(format!("delta must be non-negative, got {}", self.delta)));
        }
        if !(self.backbone_fraction >= S::zero() && self.backbone_fraction <= S::one()) {
            return Err(Error::Config(format!(
                "backbone_fraction must lie in [0, 1], got {}",
                self.backbone_fraction
            )));
        }
        if self.buffer_capacity == 0 {
            return Err(Error::Config("buffer_capacity must be positive".into()));
        }
        if self.rate_tiers.is_empty() {
            return Err(Error::Config("rate_tiers must not be empty".into()));
        }
        let mut prev_upper = S::zero();
        let mut prev_factor = S::infinity();
        for t in &self.rate_tiers {
            if t.upper <= prev_upper || t.factor <= S::zero() || t.factor > S::one() || t.factor > prev_factor {
                return Err(Error::Config(
                    "rate_tiers need increasing bounds and non-increasing factors in (0, 1]".into(),
                ));
            }
            prev_upper = t.upper;
            prev_factor = t.factor;
        }
        Ok(())
    }

    /// Rate factor for normalized distance `d / R`.
    pub fn tier_factor(&self, normalized: S) -> S {
        self.rate_tiers
            .iter()
            .find(|t| normalized < t.upper)
            .or(self.rate_tiers.last())
            .map(|t| t.factor)
            .expect("validated tiers are non-empty")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Real")]
pub struct Node<S> {
    pub id: usize,
    pub position: Point<S>,
    pub cell: usize,
    /// Supported cellular rate `R_cell,node`, in rate units.
    pub cellular_rate: S,
    pub has_backbone: bool,
}

/// Dedicated point-to-point wired/access link, usable in both directions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WiredLink<S> {
    pub a: usize,
    pub b: usize,
    /// Capacity in rate units.
    pub rate: S,
}

#[derive(Clone, Debug)]
pub struct HetNetTopology<S> {
    params: TopologyParams<S>,
    centers: [Point<S>; CELL_COUNT],
    nodes: Vec<Node<S>>,
    wifi_adj: Vec<Vec<usize>>,
    backbone: Vec<usize>,
    wired: Vec<WiredLink<S>>,
    // per-cell random order used to pick backbone members
    backbone_order: Vec<Vec<usize>>,
}

/// Base-station centers of the seven flat-topped hexagons.
pub fn cell_centers<S: Real>(radius: S) -> [Point<S>; CELL_COUNT] {
    let h = S::lit(1.5) * radius;
    let v = S::lit(3.0).sqrt() * radius;
    let half_v = v / S::lit(2.0);
    let z = S::zero();
    [
        Point::new(z, z),
        Point::new(z, v),
        Point::new(h, half_v),
        Point::new(h, -half_v),
        Point::new(z, -v),
        Point::new(-h, -half_v),
        Point::new(-h, half_v),
    ]
}

/// Point-in-hexagon test for a flat-topped hexagon of circumradius `radius`.
pub fn in_hexagon<S: Real>(p: &Point<S>, center: &Point<S>, radius: S) -> bool {
    let s3 = S::lit(3.0).sqrt();
    let dx = (p.x - center.x).abs();
    let dy = (p.y - center.y).abs();
    dy <= s3 / S::lit(2.0) * radius && s3 * dx + dy <= s3 * radius
}

/// Index of the nearest center; ties go to the lowest index.
pub fn nearest_cell<S: Real>(p: &Point<S>, centers: &[Point<S>]) -> usize {
    let mut best = 0;
    let mut best_d = p.distance(&centers[0]);
    for (i, c) in centers.iter().enumerate().skip(1) {
        let d = p.distance(c);
        if d < best_d {
            best = i;
            best_d = d;
        }
    }
    best
}

impl<S: Real> HetNetTopology<S> {
    /// Places `node_count` nodes uniformly over the seven cells.
    pub fn generate<R: Rng + ?Sized>(node_count: usize, rng: &mut R, params: TopologyParams<S>) -> Result<Self> {
        if node_count == 0 {
            return Err(Error::Config("node_count must be positive".into()));
        }
        params.validate()?;
        let radius = params.cell_radius;
        let centers = cell_centers(radius);
        let half_w = S::lit(2.5) * radius;
        let half_h = S::lit(1.5) * S::lit(3.0).sqrt() * radius;
        let (xw, yh) = (half_w.as_f64(), half_h.as_f64());

        let mut positions = Vec::with_capacity(node_count);
        while positions.len() < node_count {
            let p = Point::new(S::lit(rng.random_range(-xw..=xw)), S::lit(rng.random_range(-yh..=yh)));
            if centers.iter().any(|c| in_hexagon(&p, c, radius)) {
                positions.push(p);
            }
        }

        let mut topo = Self::assemble(params, centers, positions, None, Vec::new());
        // Backbone membership: a fixed random order per cell, of which the first
        // round(fraction * cell size) members are wired. Drawn even at fraction
        // zero so that positions and orders are independent of the fraction.
        topo.backbone_order = (0..CELL_COUNT)
            .map(|c| {
                let mut ids: Vec<usize> = topo.nodes.iter().filter(|n| n.cell == c).map(|n| n.id).collect();
                ids.shuffle(rng);
                ids
            })
            .collect();
        topo.apply_backbone_fraction(topo.params.backbone_fraction);
        Ok(topo)
    }

    /// Builds a topology from explicit positions. `cellular_rates` overrides
    /// the tiered rate map when given.
    pub fn from_positions(
        params: TopologyParams<S>,
        positions: Vec<Point<S>>,
        cellular_rates: Option<Vec<S>>,
        backbone: &[usize],
        wired: Vec<WiredLink<S>>,
    ) -> Result<Self> {
        params.validate()?;
        if let Some(r) = &cellular_rates {
            if r.len() != positions.len() {
                return Err(Error::Config("one cellular rate per node required".into()));
            }
            if r.iter().any(|&x| x < S::zero()) {
                return Err(Error::Config("cellular rates must be non-negative".into()));
            }
        }
        for l in &wired {
            if l.a >= positions.len() || l.b >= positions.len() || l.a == l.b || !(l.rate > S::zero()) {
                return Err(Error::Config(format!("invalid wired link {}-{}", l.a, l.b)));
            }
        }
        let centers = cell_centers(params.cell_radius);
        let mut topo = Self::assemble(params, centers, positions, cellular_rates, wired);
        for &b in backbone {
            if b >= topo.nodes.len() {
                return Err(Error::Config(format!("backbone node {b} does not exist")));
            }
            topo.nodes[b].has_backbone = true;
        }
        topo.backbone = backbone.to_vec();
        topo.backbone.sort_unstable();
        topo.backbone.dedup();
        topo.backbone_order = (0..CELL_COUNT)
            .map(|c| topo.nodes.iter().filter(|n| n.cell == c).map(|n| n.id).collect())
            .collect();
        Ok(topo)
    }

    fn assemble(
        params: TopologyParams<S>,
        centers: [Point<S>; CELL_COUNT],
        positions: Vec<Point<S>>,
        cellular_rates: Option<Vec<S>>,
        wired: Vec<WiredLink<S>>,
    ) -> Self {
        let nodes: Vec<Node<S>> = positions
            .into_iter()
            .enumerate()
            .map(|(id, position)| {
                let cell = nearest_cell(&position, &centers);
                let rate = match &cellular_rates {
                    Some(r) => r[id],
                    None => {
                        let d = position.distance(&centers[cell]) / params.cell_radius;
                        params.tier_factor(d) * params.cell_rate
                    }
                };
                Node {
                    id,
                    position,
                    cell,
                    cellular_rate: rate,
                    has_backbone: false,
                }
            })
            .collect();
        let wifi_adj = unit_disk_adjacency(&nodes, params.wifi_range);
        HetNetTopology {
            params,
            centers,
            nodes,
            wifi_adj,
            backbone: Vec::new(),
            wired,
            backbone_order: Vec::new(),
        }
    }

    fn apply_backbone_fraction(&mut self, fraction: S) {
        for n in &mut self.nodes {
            n.has_backbone = false;
        }
        self.backbone.clear();
        for ids in &self.backbone_order {
            let k = (fraction * S::from_count(ids.len())).round().to_usize().unwrap_or(0);
            for &id in ids.iter().take(k.min(ids.len())) {
                self.nodes[id].has_backbone = true;
                self.backbone.push(id);
            }
        }
        self.backbone.sort_unstable();
        self.params.backbone_fraction = fraction;
    }

    /// Same placement with a different backbone fraction. Members at a smaller
    /// fraction stay members at a larger one.
    pub fn with_backbone_fraction(&self, fraction: S) -> Result<Self> {
        if !(fraction >= S::zero() && fraction <= S::one()) {
            return Err(Error::Config(format!("backbone fraction {fraction} outside [0, 1]")));
        }
        let mut t = self.clone();
        t.apply_backbone_fraction(fraction);
        Ok(t)
    }

    /// Same placement with every cellular rate rescaled to a new cell maximum.
    pub fn with_cell_rate(&self, cell_rate: S) -> Result<Self> {
        if !(cell_rate > S::zero()) {
            return Err(Error::Config(format!("cell rate must be positive, got {cell_rate}")));
        }
        let mut t = self.clone();
        let scale = cell_rate / self.params.cell_rate;
        for n in &mut t.nodes {
            n.cellular_rate = n.cellular_rate * scale;
        }
        t.params.cell_rate = cell_rate;
        Ok(t)
    }

    #[inline]
    pub fn params(&self) -> &TopologyParams<S> {
        &self.params
    }

    #[inline]
    pub fn centers(&self) -> &[Point<S>; CELL_COUNT] {
        &self.centers
    }

    #[inline]
    pub fn nodes(&self) -> &[Node<S>] {
        &self.nodes
    }

    #[inline]
    pub fn node(&self, id: usize) -> &Node<S> {
        &self.nodes[id]
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    #[inline]
    pub fn backbone_nodes(&self) -> &[usize] {
        &self.backbone
    }

    #[inline]
    pub fn wired_links(&self) -> &[WiredLink<S>] {
        &self.wired
    }

    #[inline]
    pub fn distance(&self, a: usize, b: usize) -> S {
        self.nodes[a].position.distance(&self.nodes[b].position)
    }

    /// WiFi neighbours of `node`, sorted by id.
    #[inline]
    pub fn wifi_neighbors(&self, node: usize) -> &[usize] {
        &self.wifi_adj[node]
    }

    /// Cellular S-D link rate: the worse of the two access links.
    pub fn cellular_link_rate(&self, src: usize, dst: usize) -> S {
        cellular_link_rate(&self.nodes[src], &self.nodes[dst])
    }

    /// Protocol-model check for `tx -> rx` against the other concurrent
    /// transmitters.
    pub fn protocol_model_ok(&self, tx: usize, rx: usize, concurrent: &[usize]) -> Result<bool> {
        let link = self.distance(tx, rx);
        if link > self.params.wifi_range || tx == rx {
            return Err(Error::OutOfRange { tx, rx });
        }
        let guard = (S::one() + self.params.delta) * link;
        Ok(concurrent
            .iter()
            .filter(|&&k| k != tx)
            .all(|&k| self.distance(rx, k) >= guard))
    }

    /// Writes one line per node: `id x y cell rate backbone`.
    pub fn to_dump(&self) -> String {
        let mut out = String::new();
        let p = &self.params;
        let _ = writeln!(
            out,
            "# hetnet topology v1 cell_radius={} wifi_range={} delta={} cell_rate={} backbone_rate={} buffer_capacity={}",
            p.cell_radius, p.wifi_range, p.delta, p.cell_rate, p.backbone_rate, p.buffer_capacity
        );
        let _ = writeln!(out, "# id x y cell rate backbone");
        for n in &self.nodes {
            let _ = writeln!(
                out,
                "{} {} {} {} {} {}",
                n.id,
                n.position.x,
                n.position.y,
                n.cell,
                n.cellular_rate,
                u8::from(n.has_backbone)
            );
        }
        for l in &self.wired {
            let _ = writeln!(out, "link {} {} {}", l.a, l.b, l.rate);
        }
        out
    }

    /// Reads a dump written by [`to_dump`](Self::to_dump).
    pub fn from_dump<B: BufRead>(reader: B) -> Result<Self> {
        let mut params = TopologyParams::<S>::default();
        let mut positions = Vec::new();
        let mut rates = Vec::new();
        let mut backbone = Vec::new();
        let mut wired = Vec::new();
        let parse = |s: &str| -> Result<S> {
            s.parse::<f64>()
                .map(S::lit)
                .map_err(|e| Error::Parse(format!("bad number {s:?}: {e}")))
        };
        for (lineno, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::Parse(e.to_string()))?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(header) = line.strip_prefix("# hetnet topology v1") {
                for kv in header.split_whitespace() {
                    let Some((k, v)) = kv.split_once('=') else { continue };
                    match k {
                        "cell_radius" => params.cell_radius = parse(v)?,
                        "wifi_range" => params.wifi_range = parse(v)?,
                        "delta" => params.delta = parse(v)?,
                        "cell_rate" => params.cell_rate = parse(v)?,
                        "backbone_rate" => params.backbone_rate = parse(v)?,
                        "buffer_capacity" => {
                            params.buffer_capacity =
                                v.parse().map_err(|e| Error::Parse(format!("buffer_capacity: {e}")))?
                        }
                        _ => {}
                    }
                }
                continue;
            }
            if line.starts_with('#') {
                continue;
            }
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.first() == Some(&"link") {
                if f.len() != 4 {
                    return Err(Error::Parse(format!("line {}: expected `link a b rate`", lineno + 1)));
                }
                let idx = |s: &str| {
                    s.parse::<usize>()
                        .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))
                };
                wired.push(WiredLink {
                    a: idx(f[1])?,
                    b: idx(f[2])?,
                    rate: parse(f[3])?,
                });
                continue;
            }
            if f.len() != 6 {
                return Err(Error::Parse(format!(
                    "line {}: expected 6 fields, got {}",
                    lineno + 1,
                    f.len()
                )));
            }
            let id: usize = f[0]
                .parse()
                .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
            if id != positions.len() {
                return Err(Error::Parse(format!(
                    "line {}: node ids must be consecutive",
                    lineno + 1
                )));
            }
            positions.push(Point::new(parse(f[1])?, parse(f[2])?));
            rates.push(parse(f[4])?);
            if f[5] == "1" {
                backbone.push(id);
            }
        }
        Self::from_positions(params, positions, Some(rates), &backbone, wired)
    }
}

/// `min(R_cell,S, R_cell,D)`.
pub fn cellular_link_rate<S: Real>(src: &Node<S>, dst: &Node<S>) -> S {
    src.cellular_rate.min(dst.cellular_rate)
}

/// All pairs within `range` (inclusive), via a uniform grid of cell size
/// `range`.
fn unit_disk_adjacency<S: Real>(nodes: &[Node<S>], range: S) -> Vec<Vec<usize>> {
    let cell_of = |p: &Point<S>| -> (i64, i64) {
        (
            (p.x / range).floor().to_i64().unwrap_or(0),
            (p.y / range).floor().to_i64().unwrap_or(0),
        )
    };
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for n in nodes {
        grid.entry(cell_of(&n.position)).or_default().push(n.id);
    }
    nodes
        .iter()
        .map(|n| {
            let (cx, cy) = cell_of(&n.position);
            let mut adj = Vec::new();
            for dx in -1..=1 {
                for dy in -1..=1 {
                    if let Some(ids) = grid.get(&(cx + dx, cy + dy)) {
                        adj.extend(
                            ids.iter()
                                .copied()
                                .filter(|&j| j != n.id && n.position.distance(&nodes[j].position) <= range),
                        );
                    }
                }
            }
            adj.sort_unstable();
            adj
        })
        .collect()
}
