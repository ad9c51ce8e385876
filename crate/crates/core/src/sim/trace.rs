//! Per-packet reception log and its CSV form.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Column order of the trace CSV.
pub const TRACE_HEADER: [&str; 5] = ["slot", "node_id", "interface", "block_id", "innovative"];

/// Medium a packet arrived on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    Cellular,
    Wifi,
    Wired,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub slot: u64,
    pub node_id: usize,
    pub interface: Channel,
    pub block_id: u16,
    /// Whether the packet raised the receiver's rank.
    pub innovative: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EventTrace {
    pub records: Vec<TraceRecord>,
}

impl EventTrace {
    pub fn push(&mut self, r: TraceRecord) {
        debug_assert!(self.records.last().is_none_or(|l| l.slot <= r.slot));
        self.records.push(r);
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Records received by one node, in order.
    pub fn at(&self, node: usize) -> impl Iterator<Item = &TraceRecord> {
        self.records.iter().filter(move |r| r.node_id == node)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(TRACE_HEADER).map_err(csv_err)?;
        for r in &self.records {
            wr.write_record([
                r.slot.to_string(),
                r.node_id.to_string(),
                match r.interface {
                    Channel::Cellular => "cellular",
                    Channel::Wifi => "wifi",
                    Channel::Wired => "wired",
                }
                .to_string(),
                r.block_id.to_string(),
                u8::from(r.innovative).to_string(),
            ])
            .map_err(csv_err)?;
        }
        wr.flush().map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("csv output is utf-8")
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(r);
        let headers = rd.headers().map_err(csv_err)?.clone();
        if headers.iter().ne(TRACE_HEADER.iter().copied()) {
            return Err(Error::Parse(format!("unexpected trace header {headers:?}")));
        }
        let mut trace = EventTrace::default();
        for row in rd.records() {
            let row = row.map_err(csv_err)?;
            let field = |i: usize| row.get(i).unwrap_or_default();
            let num = |i: usize| -> Result<u64> {
                field(i)
                    .parse()
                    .map_err(|e| Error::Parse(format!("column {}: {e}", TRACE_HEADER[i])))
            };
            let interface = match field(2) {
                "cellular" => Channel::Cellular,
                "wifi" => Channel::Wifi,
                "wired" => Channel::Wired,
                other => return Err(Error::Parse(format!("unknown interface {other:?}"))),
            };
            let innovative = match field(4) {
                "1" | "true" => true,
                "0" | "false" => false,
                other => return Err(Error::Parse(format!("bad innovative flag {other:?}"))),
            };
            let block_id = u16::try_from(num(3)?).map_err(|e| Error::Parse(e.to_string()))?;
            trace.records.push(TraceRecord {
                slot: num(0)?,
                node_id: num(1)? as usize,
                interface,
                block_id,
                innovative,
            });
        }
        if trace.records.windows(2).any(|w| w[0].slot > w[1].slot) {
            return Err(Error::Parse("trace slots must be non-decreasing".into()));
        }
        Ok(trace)
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

/// Destination-side view of a trace.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BlockReplay {
    /// Innovative arrivals per completed block, in completion order.
    pub innovative_per_block: Vec<(u16, usize)>,
    /// Stale arrivals (for an already completed block) counted between
    /// consecutive completions; entry `i` belongs to the transition after
    /// block `i`.
    pub stale_per_transition: Vec<usize>,
    /// Arrivals for the current block that were not innovative.
    pub redundant: usize,
}

/// Replays the records of node `dst`, assuming a block completes after
/// `block_size` innovative arrivals.
pub fn replay_destination(trace: &EventTrace, dst: usize, block_size: usize) -> BlockReplay {
    let mut out = BlockReplay::default();
    let mut current: Option<u16> = None;
    let mut innovative = 0usize;
    let mut completed: Option<u16> = None;
    let mut stale = 0usize;
    for r in trace.at(dst) {
        if Some(r.block_id) == completed && current != Some(r.block_id) {
            stale += 1;
            continue;
        }
        if current != Some(r.block_id) {
            if current.is_some() && completed != current {
                // block abandoned without completing; start over on the new one
                innovative = 0;
            }
            current = Some(r.block_id);
        }
        if r.innovative {
            innovative += 1;
            if innovative == block_size {
                if completed.is_some() {
                    out.stale_per_transition.push(stale);
                }
                out.innovative_per_block.push((r.block_id, innovative));
                completed = Some(r.block_id);
                current = None;
                innovative = 0;
                stale = 0;
            }
        } else {
            out.redundant += 1;
        }
    }
    out
}
