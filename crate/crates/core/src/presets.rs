//! Parameter sweeps and the two fixed testbed topologies.
//!
//! Every preset is a pure function of its [`SweepSpec`] and base
//! [`ScenarioConfig`]: trial `t` derives its own seed from `spec.seed`, and
//! the same trial seed is reused at every sweep point so that points differ
//! only in the swept parameter. Trials run on the rayon pool; rows are
//! assembled in sweep order afterwards.

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::routing::build_routes_for;
use crate::scalar::Real;
use crate::sim::{compare_modes, pick_pair, run_session, ScenarioConfig, SessionOutcome, SessionPair};
use crate::topology::{HetNetTopology, Point, WiredLink};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    /// `min, min + step, ...`
    #[default]
    Linear,
    /// `min, min * step, ...`; needs `min > 0` and `step > 1`.
    Log,
}

/// What to sweep and how often to repeat each point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Real")]
pub struct SweepSpec<S> {
    pub preset: String,
    pub parameter: String,
    pub min: S,
    pub max: S,
    pub step: S,
    #[serde(default)]
    pub scale: Scale,
    pub trials: usize,
    pub seed: u64,
    #[serde(default)]
    pub output: Option<std::path::PathBuf>,
}

pub const DEFAULT_TRIALS: usize = 50;

impl<S: Real> SweepSpec<S> {
    pub fn new(preset: &str, parameter: &str, min: S, max: S, step: S, scale: Scale) -> Self {
        SweepSpec {
            preset: preset.into(),
            parameter: parameter.into(),
            min,
            max,
            step,
            scale,
            trials: DEFAULT_TRIALS,
            seed: 1,
            output: None,
        }
    }

    /// Rate ratios 0.05 to 2.0.
    pub fn rate_sweep() -> Self {
        Self::new(
            "rate-sweep",
            "rate_ratio",
            S::lit(0.05),
            S::lit(2.0),
            S::lit(0.05),
            Scale::Linear,
        )
    }

    /// Users per cell 8 to 64.
    pub fn load_sweep() -> Self {
        Self::new(
            "load-sweep",
            "users_per_cell",
            S::lit(8.0),
            S::lit(64.0),
            S::lit(8.0),
            Scale::Linear,
        )
    }

    /// `k/n` from 0.0001, doubling up to 1. The low end leaves cells of a
    /// few hundred nodes without any backbone node.
    pub fn infra_sweep() -> Self {
        Self::new(
            "infra-sweep",
            "k_over_n",
            S::lit(0.0001),
            S::one(),
            S::lit(2.0),
            Scale::Log,
        )
    }

    /// WiMAX/WiFi rate ratios 0.1 to 1.0 on the seven-hop chain.
    pub fn topo1() -> Self {
        Self::new("topo1", "rate_ratio", S::lit(0.1), S::one(), S::lit(0.1), Scale::Linear)
    }

    /// Relay counts 1 to 6.
    pub fn topo2() -> Self {
        Self::new("topo2", "relays", S::one(), S::lit(6.0), S::one(), Scale::Linear)
    }

    pub fn with_trials(mut self, trials: usize) -> Self {
        self.trials = trials;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite() && self.step.is_finite()) {
            return Err(Error::Config("sweep bounds must be finite".into()));
        }
        if self.min > self.max {
            return Err(Error::Config(format!(
                "sweep min {} exceeds max {}",
                self.min, self.max
            )));
        }
        if !(self.step > S::zero()) {
            return Err(Error::Config("sweep step must be positive".into()));
        }
        if self.scale == Scale::Log && !(self.min > S::zero() && self.step > S::one()) {
            return Err(Error::Config("log sweep needs min > 0 and step > 1".into()));
        }
        if self.trials == 0 {
            return Err(Error::Config("at least one trial per point".into()));
        }
        Ok(())
    }

    /// Sweep points in increasing order. The last point is clamped to `max`
    /// when a log sweep would overshoot it.
    pub fn points(&self) -> Result<Vec<S>> {
        self.validate()?;
        let tol = S::lit(1e-9) * (S::one() + self.max.abs());
        let mut pts = Vec::new();
        match self.scale {
            Scale::Linear => {
                let mut i = 0usize;
                loop {
                    let x = self.min + S::from_count(i) * self.step;
                    if x > self.max + tol {
                        break;
                    }
                    pts.push(x.min(self.max));
                    i += 1;
                }
            }
            Scale::Log => {
                let mut x = self.min;
                while x < self.max - tol {
                    pts.push(x);
                    x = x * self.step;
                }
                pts.push(self.max);
            }
        }
        Ok(pts)
    }
}

/// Seed of trial `t`; distinct trials get well separated streams.
pub fn trial_seed(seed: u64, trial: usize) -> u64 {
    let mut z = seed ^ (trial as u64).wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A CSV-serializable result row.
pub trait CsvRow {
    const HEADER: &'static [&'static str];
    fn fields(&self) -> Vec<String>;
}

fn num<S: Real>(x: S) -> String {
    format!("{:.6}", x.as_f64())
}

/// Writes a header plus one line per row.
pub fn write_csv<R: CsvRow, W: Write>(rows: &[R], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    let io = |e: csv::Error| Error::Parse(e.to_string());
    wr.write_record(R::HEADER).map_err(io)?;
    for r in rows {
        wr.write_record(r.fields()).map_err(io)?;
    }
    wr.flush().map_err(|e| Error::Parse(e.to_string()))
}

pub fn to_csv_string<R: CsvRow>(rows: &[R]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf)?;
    String::from_utf8(buf).map_err(|e| Error::Parse(e.to_string()))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Real")]
pub struct RateRow<S> {
    pub rate_ratio: S,
    pub rel_tput_cellular: S,
    pub rel_tput_combined: S,
    /// Standard error of the combined mean.
    pub stderr: S,
}

impl<S: Real> CsvRow for RateRow<S> {
    const HEADER: &'static [&'static str] = &["rate_ratio", "rel_tput_cellular", "rel_tput_combined", "stderr"];
    fn fields(&self) -> Vec<String> {
        vec![
            num(self.rate_ratio),
            num(self.rel_tput_cellular),
            num(self.rel_tput_combined),
            num(self.stderr),
        ]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Real")]
pub struct LoadRow<S> {
    pub users_per_cell: usize,
    pub rel_tput_cellular: S,
    pub rel_tput_combined: S,
}

impl<S: Real> CsvRow for LoadRow<S> {
    const HEADER: &'static [&'static str] = &["users_per_cell", "rel_tput_cellular", "rel_tput_combined"];
    fn fields(&self) -> Vec<String> {
        vec![
            self.users_per_cell.to_string(),
            num(self.rel_tput_cellular),
            num(self.rel_tput_combined),
        ]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Real")]
pub struct InfraRow<S> {
    pub k_over_n: S,
    pub rel_tput: S,
}

impl<S: Real> CsvRow for InfraRow<S> {
    const HEADER: &'static [&'static str] = &["k_over_n", "rel_tput"];
    fn fields(&self) -> Vec<String> {
        vec![num(self.k_over_n), num(self.rel_tput)]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Real")]
pub struct Topo1Row<S> {
    pub rate_ratio: S,
    pub rel_tput_wimax: S,
    pub rel_tput_combined: S,
}

impl<S: Real> CsvRow for Topo1Row<S> {
    const HEADER: &'static [&'static str] = &["rate_ratio", "rel_tput_wimax", "rel_tput_combined"];
    fn fields(&self) -> Vec<String> {
        vec![
            num(self.rate_ratio),
            num(self.rel_tput_wimax),
            num(self.rel_tput_combined),
        ]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Real")]
pub struct Topo2Row<S> {
    pub link_rate: S,
    pub relays: usize,
    /// Session throughput in rate units.
    pub throughput: S,
}

impl<S: Real> CsvRow for Topo2Row<S> {
    const HEADER: &'static [&'static str] = &["link_rate", "relays", "throughput"];
    fn fields(&self) -> Vec<String> {
        vec![num(self.link_rate), self.relays.to_string(), num(self.throughput)]
    }
}

fn mean<S: Real>(xs: &[S]) -> S {
    xs.iter().copied().sum::<S>() / S::from_count(xs.len())
}

fn std_err<S: Real>(xs: &[S]) -> S {
    if xs.len() < 2 {
        return S::zero();
    }
    let m = mean(xs);
    let var = xs.iter().map(|&x| (x - m) * (x - m)).sum::<S>() / S::from_count(xs.len() - 1);
    (var / S::from_count(xs.len())).sqrt()
}

/// A random topology and session pair for one trial.
struct Trial<S: Real> {
    seed: u64,
    topology: HetNetTopology<S>,
    pair: SessionPair,
}

fn random_trial<S: Real>(base: &ScenarioConfig<S>, seed: u64) -> Result<Trial<S>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut params = base.topology.clone();
    params.backbone_fraction = S::zero();
    let topology = HetNetTopology::generate(base.node_count, &mut rng, params)?;
    let pair = pick_pair(&topology, base.min_hops, &mut rng)?;
    Ok(Trial { seed, topology, pair })
}

/// Runs `per_trial` for every trial in parallel and returns the per-trial
/// results in trial order.
fn run_trials<S: Real, T: Send>(spec: &SweepSpec<S>, per_trial: impl Fn(u64) -> Result<T> + Sync) -> Result<Vec<T>> {
    (0..spec.trials)
        .into_par_iter()
        .map(|t| per_trial(trial_seed(spec.seed, t)))
        .collect()
}

/// Cellular-only vs combined relative throughput over cellular/WiFi rate
/// ratios, on random topologies and pairs.
pub fn preset_rate_sweep<S: Real>(spec: &SweepSpec<S>, base: &ScenarioConfig<S>) -> Result<Vec<RateRow<S>>> {
    let ratios = spec.points()?;
    base.validate()?;
    let per_trial = run_trials(spec, |seed| {
        let trial = random_trial(base, seed)?;
        let routes = build_routes_for(&trial.topology, &[trial.pair.src, trial.pair.dst]);
        let cfg = ScenarioConfig {
            seed: trial.seed,
            ..base.clone()
        };
        ratios
            .iter()
            .map(|&r| {
                let topo = trial.topology.with_cell_rate(r * base.wifi_rate)?;
                let cmp = compare_modes(&cfg, &topo, &routes, trial.pair)?;
                let combined = if base.wifi_enabled {
                    cmp.combined.relative_throughput
                } else {
                    cmp.cellular_only.relative_throughput
                };
                Ok((cmp.cellular_only.relative_throughput, combined))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(ratios
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            let cell: Vec<S> = per_trial.iter().map(|v| v[i].0).collect();
            let comb: Vec<S> = per_trial.iter().map(|v| v[i].1).collect();
            RateRow {
                rate_ratio: r,
                rel_tput_cellular: mean(&cell),
                rel_tput_combined: mean(&comb),
                stderr: std_err(&comb),
            }
        })
        .collect())
}

/// Cellular-only vs combined relative throughput as users per cell grow.
/// The cellular/WiFi rate ratio is `base.topology.cell_rate / base.wifi_rate`.
pub fn preset_load_sweep<S: Real>(spec: &SweepSpec<S>, base: &ScenarioConfig<S>) -> Result<Vec<LoadRow<S>>> {
    let users: Vec<usize> = spec
        .points()?
        .iter()
        .map(|u| u.round().to_usize().filter(|&u| u >= 1))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| Error::Config("users per cell must be at least 1".into()))?;
    base.validate()?;
    let per_trial = run_trials(spec, |seed| {
        let trial = random_trial(base, seed)?;
        let routes = build_routes_for(&trial.topology, &[trial.pair.src, trial.pair.dst]);
        users
            .iter()
            .map(|&u| {
                let cfg = ScenarioConfig {
                    seed: trial.seed,
                    users_per_cell: u,
                    ..base.clone()
                };
                let cmp = compare_modes(&cfg, &trial.topology, &routes, trial.pair)?;
                Ok((cmp.cellular_only.relative_throughput, cmp.combined.relative_throughput))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(users
        .iter()
        .enumerate()
        .map(|(i, &u)| LoadRow {
            users_per_cell: u,
            rel_tput_cellular: mean(&per_trial.iter().map(|v| v[i].0).collect::<Vec<_>>()),
            rel_tput_combined: mean(&per_trial.iter().map(|v| v[i].1).collect::<Vec<_>>()),
        })
        .collect())
}

/// Per-trial infra curves: `result[t][i]` is trial `t` at the `i`-th `k/n`.
pub fn infra_sweep_per_trial<S: Real>(spec: &SweepSpec<S>, base: &ScenarioConfig<S>) -> Result<(Vec<S>, Vec<Vec<S>>)> {
    let fractions = spec.points()?;
    if fractions.iter().any(|&k| !(k > S::zero() && k <= S::one())) {
        return Err(Error::Config("k/n must lie in (0, 1]".into()));
    }
    base.validate()?;
    let per_trial = run_trials(spec, |seed| {
        let trial = random_trial(base, seed)?;
        let cfg = ScenarioConfig {
            seed: trial.seed,
            ..base.clone()
        };
        fractions
            .iter()
            .map(|&k| {
                let topo = trial.topology.with_backbone_fraction(k)?;
                let routes = build_routes_for(&topo, &[trial.pair.src, trial.pair.dst]);
                Ok(run_session(&cfg, &topo, &routes, trial.pair)?.stats.relative_throughput)
            })
            .collect::<Result<Vec<_>>>()
    })?;
    Ok((fractions, per_trial))
}

/// Relative throughput as a growing fraction `k/n` of each cell's nodes
/// gets backbone access. Cellular and WiFi both stay on.
pub fn preset_infra_sweep<S: Real>(spec: &SweepSpec<S>, base: &ScenarioConfig<S>) -> Result<Vec<InfraRow<S>>> {
    let (fractions, per_trial) = infra_sweep_per_trial(spec, base)?;
    Ok(fractions
        .iter()
        .enumerate()
        .map(|(i, &k)| InfraRow {
            k_over_n: k,
            rel_tput: mean(&per_trial.iter().map(|v| v[i]).collect::<Vec<_>>()),
        })
        .collect())
}

/// Hops in the first testbed topology.
pub const TOPO1_HOPS: usize = 7;
/// Node spacing on the testbed chain, in meters.
pub const TOPO1_SPACING: f64 = 100.0;

/// The seven-hop chain. Every node gets the same WiMAX rate; the chain
/// sits in the middle cell.
pub fn topo1_topology<S: Real>(base: &ScenarioConfig<S>, wimax_rate: S) -> Result<HetNetTopology<S>> {
    let mut params = base.topology.clone();
    params.cell_rate = wimax_rate;
    params.backbone_fraction = S::zero();
    let positions = (0..=TOPO1_HOPS)
        .map(|i| Point::new(S::lit(TOPO1_SPACING) * S::from_count(i), S::zero()))
        .collect();
    HetNetTopology::from_positions(
        params,
        positions,
        Some(vec![wimax_rate; TOPO1_HOPS + 1]),
        &[],
        Vec::new(),
    )
}

/// WiMAX-only vs combined relative throughput on the seven-hop chain over
/// WiMAX/WiFi rate ratios. `base.processing_delay` sets the per-hop delay.
pub fn preset_topo1<S: Real>(spec: &SweepSpec<S>, base: &ScenarioConfig<S>) -> Result<Vec<Topo1Row<S>>> {
    let ratios = spec.points()?;
    if ratios.iter().any(|&r| !(r > S::zero())) {
        return Err(Error::Config("WiMAX rate ratio must be positive".into()));
    }
    base.validate()?;
    let pair = SessionPair {
        src: 0,
        dst: TOPO1_HOPS,
    };
    let per_trial = run_trials(spec, |seed| {
        let cfg = ScenarioConfig {
            seed,
            min_hops: base.min_hops.min(TOPO1_HOPS as u32),
            ..base.clone()
        };
        ratios
            .iter()
            .map(|&r| {
                let topo = topo1_topology(base, r * base.wifi_rate)?;
                let routes = build_routes_for(&topo, &[pair.src, pair.dst]);
                let cmp = compare_modes(&cfg, &topo, &routes, pair)?;
                Ok((cmp.cellular_only.relative_throughput, cmp.combined.relative_throughput))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(ratios
        .iter()
        .enumerate()
        .map(|(i, &r)| Topo1Row {
            rate_ratio: r,
            rel_tput_wimax: mean(&per_trial.iter().map(|v| v[i].0).collect::<Vec<_>>()),
            rel_tput_combined: mean(&per_trial.iter().map(|v| v[i].1).collect::<Vec<_>>()),
        })
        .collect())
}

/// Per-link rates of the second testbed topology, in rate units.
pub const TOPO2_LINK_RATES: [f64; 6] = [12.0, 18.0, 24.0, 36.0, 48.0, 54.0];
/// Slot rate for the second testbed topology: ten slots per packet on the
/// fastest link.
pub const TOPO2_SLOT_RATE: f64 = 540.0;

/// Source `0`, relays `1..=relays`, destination `relays + 1`. Each relay
/// has two access links at `link_rate`, one towards the source and one
/// towards the destination; the end points' own access is not the
/// bottleneck. Nodes are too far apart for ad-hoc WiFi.
pub fn topo2_topology<S: Real>(base: &ScenarioConfig<S>, relays: usize, link_rate: S) -> Result<HetNetTopology<S>> {
    if relays == 0 {
        return Err(Error::Config("topo2 needs at least one relay".into()));
    }
    if !(link_rate > S::zero()) {
        return Err(Error::Config(format!("invalid topo2 link rate {link_rate}")));
    }
    let spacing = base.topology.wifi_range * S::lit(3.0);
    let dst = relays + 1;
    let positions = (0..=dst)
        .map(|i| Point::new(spacing * S::from_count(i), S::zero()))
        .collect();
    let wired = (1..=relays)
        .flat_map(|r| {
            [
                WiredLink {
                    a: 0,
                    b: r,
                    rate: link_rate,
                },
                WiredLink {
                    a: r,
                    b: dst,
                    rate: link_rate,
                },
            ]
        })
        .collect();
    let mut params = base.topology.clone();
    params.backbone_fraction = S::zero();
    HetNetTopology::from_positions(params, positions, None, &[], wired)
}

/// Blocks per topo2 session unless the base config sets a target.
pub const TOPO2_BLOCKS: u64 = 20;

/// Scenario used by topo2: wired relays only, slot rate [`TOPO2_SLOT_RATE`].
/// Sessions run for a fixed number of blocks so that slow links are not
/// penalized by a half-finished block at the end of the budget.
pub fn topo2_config<S: Real>(base: &ScenarioConfig<S>, seed: u64) -> ScenarioConfig<S> {
    ScenarioConfig {
        seed,
        block_target: Some(base.block_target.unwrap_or(TOPO2_BLOCKS)),
        slot_budget: base.slot_budget.max(1_000_000),
        wifi_rate: S::lit(TOPO2_SLOT_RATE),
        cellular_enabled: false,
        wifi_enabled: true,
        min_hops: 1,
        ..base.clone()
    }
}

/// One topo2 session.
pub fn run_topo2<S: Real>(
    base: &ScenarioConfig<S>,
    relays: usize,
    link_rate: S,
    seed: u64,
) -> Result<SessionOutcome<S>> {
    let topo = topo2_topology(base, relays, link_rate)?;
    let pair = SessionPair {
        src: 0,
        dst: relays + 1,
    };
    let routes = build_routes_for(&topo, &[pair.src, pair.dst]);
    run_session(&topo2_config(base, seed), &topo, &routes, pair)
}

/// Throughput against relay count for every rate in `rates`.
pub fn preset_topo2<S: Real>(spec: &SweepSpec<S>, base: &ScenarioConfig<S>, rates: &[S]) -> Result<Vec<Topo2Row<S>>> {
    let relays: Vec<usize> = spec
        .points()?
        .iter()
        .map(|n| n.round().to_usize().filter(|&n| n >= 1))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| Error::Config("relay count must be at least 1".into()))?;
    if rates.is_empty() || rates.iter().any(|&r| !(r > S::zero())) {
        return Err(Error::Config("topo2 link rates must be positive".into()));
    }
    base.validate()?;
    let per_trial = run_trials(spec, |seed| {
        let mut out = Vec::with_capacity(rates.len() * relays.len());
        for &rate in rates {
            for &n in &relays {
                out.push(run_topo2(base, n, rate, seed)?.stats.throughput);
            }
        }
        Ok(out)
    })?;
    let mut rows = Vec::new();
    for (ri, &rate) in rates.iter().enumerate() {
        for (ni, &n) in relays.iter().enumerate() {
            let i = ri * relays.len() + ni;
            rows.push(Topo2Row {
                link_rate: rate,
                relays: n,
                throughput: mean(&per_trial.iter().map(|v| v[i]).collect::<Vec<_>>()),
            });
        }
    }
    Ok(rows)
}
