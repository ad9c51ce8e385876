//! `hetnet` command-line front end: sweep presets, topology dumps and trace
//! replay.

use std::fs::{self, File};
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use hetnet::presets::{self, CsvRow, Scale, SweepSpec, TOPO2_LINK_RATES};
use hetnet::sim::{replay_destination, EventTrace};
use hetnet::{build_routes_for, pick_pair, run_session, Scenario, SessionPair, Topology};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

#[derive(Parser)]
#[command(name = "hetnet", version, about = "Cellular + WiFi network-coding simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cellular-only vs combined throughput over cellular/WiFi rate ratios.
    RateSweep(Common),
    /// Cellular-only vs combined throughput over users per cell.
    LoadSweep(Common),
    /// Throughput over the fraction of nodes with backbone access.
    InfraSweep(Common),
    /// WiMAX-only vs combined throughput on the seven-hop chain.
    Topo1(Common),
    /// Throughput against relay count on the wired-relay topology.
    Topo2(Common),
    /// Write a random topology dump.
    GenTopology(Common),
    /// Run one session and write its reception trace as CSV.
    Session {
        #[command(flatten)]
        common: Common,
        /// Topology dump to use instead of a random one.
        #[arg(long)]
        topology: Option<PathBuf>,
        /// Source node; picked at random with the destination when omitted.
        #[arg(long, requires = "dst")]
        src: Option<usize>,
        #[arg(long, requires = "src")]
        dst: Option<usize>,
    },
    /// Summarize a destination's blocks from a trace CSV.
    ReplayTrace {
        /// Trace CSV as written by `session`.
        trace: PathBuf,
        /// Destination node to replay.
        #[arg(long)]
        dst: usize,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// TOML scenario file; an optional [sweep] table sets the sweep range.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Trials (random topologies) per sweep point.
    #[arg(long)]
    trials: Option<usize>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// `[sweep]` table of a config file. Unset fields keep the preset default.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepFile {
    min: Option<f64>,
    max: Option<f64>,
    step: Option<f64>,
    scale: Option<Scale>,
    trials: Option<usize>,
    seed: Option<u64>,
    /// topo2 link rates.
    rates: Option<Vec<f64>>,
}

struct Loaded {
    scenario: Scenario,
    sweep: SweepFile,
}

fn load(common: &Common) -> Result<Loaded> {
    let (mut scenario, mut sweep) = match &common.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            parse_config(&text).with_context(|| format!("in {}", path.display()))?
        }
        None => (Scenario::default(), SweepFile::default()),
    };
    if let Some(seed) = common.seed {
        scenario.seed = seed;
        sweep.seed = Some(seed);
    }
    if let Some(trials) = common.trials {
        sweep.trials = Some(trials);
    }
    scenario.validate()?;
    Ok(Loaded { scenario, sweep })
}

fn parse_config(text: &str) -> Result<(Scenario, SweepFile)> {
    let mut table: toml::Table = text.parse()?;
    let sweep = match table.remove("sweep") {
        Some(v) => v.try_into().context("[sweep]")?,
        None => SweepFile::default(),
    };
    check_keys(&table)?;
    let scenario: Scenario = table.try_into()?;
    Ok((scenario, sweep))
}

/// Rejects keys that the scenario would silently ignore.
fn check_keys(table: &toml::Table) -> Result<()> {
    let reference = toml::Table::try_from(Scenario {
        block_target: Some(1),
        ..Scenario::default()
    })?;
    for (key, value) in table {
        let Some(known) = reference.get(key) else {
            bail!("unknown config key `{key}`");
        };
        if let (toml::Value::Table(inner), "topology") = (value, key.as_str()) {
            let known = known.as_table().expect("topology serializes as a table");
            if let Some(k) = inner.keys().find(|k| !known.contains_key(*k)) {
                bail!("unknown config key `topology.{k}`");
            }
        }
    }
    Ok(())
}

fn sweep_spec(default: SweepSpec<f64>, file: &SweepFile) -> Result<SweepSpec<f64>> {
    let spec = SweepSpec {
        min: file.min.unwrap_or(default.min),
        max: file.max.unwrap_or(default.max),
        step: file.step.unwrap_or(default.step),
        scale: file.scale.unwrap_or(default.scale),
        trials: file.trials.unwrap_or(default.trials),
        seed: file.seed.unwrap_or(default.seed),
        ..default
    };
    spec.validate()?;
    Ok(spec)
}

fn write_out(out: Option<&Path>, body: &[u8]) -> Result<()> {
    match out {
        Some(path) => fs::write(path, body).with_context(|| format!("writing {}", path.display())),
        None => match io::stdout().write_all(body) {
            // a closed pipe (`| head`) is not an error
            Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
            r => r.context("writing stdout"),
        },
    }
}

fn emit<R: CsvRow>(common: &Common, rows: &[R]) -> Result<()> {
    write_out(common.out.as_deref(), presets::to_csv_string(rows)?.as_bytes())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::RateSweep(c) => {
            let l = load(&c)?;
            let spec = sweep_spec(SweepSpec::rate_sweep(), &l.sweep)?;
            emit(&c, &presets::preset_rate_sweep(&spec, &l.scenario)?)
        }
        Command::LoadSweep(c) => {
            let l = load(&c)?;
            let spec = sweep_spec(SweepSpec::load_sweep(), &l.sweep)?;
            emit(&c, &presets::preset_load_sweep(&spec, &l.scenario)?)
        }
        Command::InfraSweep(c) => {
            let l = load(&c)?;
            let spec = sweep_spec(SweepSpec::infra_sweep(), &l.sweep)?;
            emit(&c, &presets::preset_infra_sweep(&spec, &l.scenario)?)
        }
        Command::Topo1(c) => {
            let l = load(&c)?;
            let spec = sweep_spec(SweepSpec::topo1(), &l.sweep)?;
            emit(&c, &presets::preset_topo1(&spec, &l.scenario)?)
        }
        Command::Topo2(c) => {
            let l = load(&c)?;
            let spec = sweep_spec(SweepSpec::topo2(), &l.sweep)?;
            let rates = l.sweep.rates.clone().unwrap_or_else(|| TOPO2_LINK_RATES.to_vec());
            emit(&c, &presets::preset_topo2(&spec, &l.scenario, &rates)?)
        }
        Command::GenTopology(c) => {
            let l = load(&c)?;
            let mut rng = ChaCha8Rng::seed_from_u64(l.scenario.seed);
            let topo = Topology::generate(l.scenario.node_count, &mut rng, l.scenario.topology.clone())?;
            write_out(c.out.as_deref(), topo.to_dump().as_bytes())
        }
        Command::Session {
            common,
            topology,
            src,
            dst,
        } => {
            let mut l = load(&common)?;
            l.scenario.record_trace = true;
            let mut rng = ChaCha8Rng::seed_from_u64(l.scenario.seed);
            let topo = match &topology {
                Some(path) => {
                    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
                    Topology::from_dump(BufReader::new(f)).with_context(|| format!("in {}", path.display()))?
                }
                None => Topology::generate(l.scenario.node_count, &mut rng, l.scenario.topology.clone())?,
            };
            let pair = match (src, dst) {
                (Some(src), Some(dst)) => SessionPair { src, dst },
                _ => pick_pair(&topo, l.scenario.min_hops, &mut rng)?,
            };
            let routes = build_routes_for(&topo, &[pair.src, pair.dst]);
            let outcome = run_session(&l.scenario, &topo, &routes, pair)?;
            let s = &outcome.stats;
            eprintln!(
                "src {} dst {}: {} blocks in {} slots, throughput {:.6}, relative {:.6}",
                s.src, s.dst, s.blocks_delivered, s.slots_elapsed, s.throughput, s.relative_throughput
            );
            write_out(common.out.as_deref(), outcome.trace.to_csv_string().as_bytes())
        }
        Command::ReplayTrace { trace, dst, common } => {
            let l = load(&common)?;
            let f = File::open(&trace).with_context(|| format!("opening {}", trace.display()))?;
            let trace = EventTrace::read_csv(BufReader::new(f)).with_context(|| format!("in {}", trace.display()))?;
            let replay = replay_destination(&trace, dst, l.scenario.block_size);
            let mut out = String::from("block_id,innovative,stale_after\n");
            for (i, (block, innovative)) in replay.innovative_per_block.iter().enumerate() {
                let stale = replay.stale_per_transition.get(i).copied().unwrap_or(0);
                out.push_str(&format!("{block},{innovative},{stale}\n"));
            }
            eprintln!(
                "{} blocks decoded, {} redundant arrivals",
                replay.innovative_per_block.len(),
                replay.redundant
            );
            write_out(common.out.as_deref(), out.as_bytes())
        }
    }
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
