//! Network-coded multipath sessions over a cellular + WiFi hybrid network.
//!
//! The crate is organized bottom-up:
//!
//! - [`gf256`]: GF(2^8) arithmetic and small matrix elimination.
//! - [`rlnc`]: block encoding, relay recoding and decoding.
//! - [`topology`]: seven-cell hexagonal layout, rate tiers, WiFi adjacency.
//! - [`routing`]: shortest-path next hops and per-relay interface choice.
//! - [`sim`]: the slotted session engine.
//! - [`presets`]: parameter sweeps and the two small fixed topologies.
//!
//! Geometry, rates and the simulator are generic over [`Real`] (`f32` or
//! `f64`); the aliases below fix `f64`.

// `!(x > 0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod gf256;
pub mod presets;
pub mod rlnc;
pub mod routing;
pub mod scalar;
pub mod sim;
pub mod topology;

pub use error::{Error, Result};
pub use gf256::{CoefMatrix, Gf256};
pub use rlnc::{BlockId, CodedPacket, DecoderState, RecodeBuffer, SourceBlock};
pub use routing::{build_routes, build_routes_for, ForwardPolicy, RouteTable};
pub use scalar::Real;
pub use sim::{compare_modes, pick_pair, run_session, ScenarioConfig, SessionOutcome, SessionPair, SessionStats};
pub use topology::{HetNetTopology, TopologyParams};

pub type Topology = HetNetTopology<f64>;
pub type Params = TopologyParams<f64>;
pub type Scenario = ScenarioConfig<f64>;
pub type Stats = SessionStats<f64>;
pub type Outcome = SessionOutcome<f64>;
