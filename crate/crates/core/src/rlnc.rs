//! Block-based random linear network coding.
//!
//! A source block holds `M` equal-length payloads. Every coded packet carries
//! the block id, `M` coefficients and the matching linear combination of the
//! source payloads. Relays recode from a bounded buffer without decoding, and
//! the destination reduces each arrival against its pivots so it can report
//! whether the packet was innovative.
//!
//! Wire layout of a coded packet:
//!
//! ```text
//! +----------------+------------------------+-----------------+
//! | block id (2 B) | coefficients c_1..c_M  | payload (k B)   |
//! | big-endian     | one byte each          |                 |
//! +----------------+------------------------+-----------------+
//! ```

use std::collections::VecDeque;
use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::gf256::{self, axpy, axpy_elems, CoefMatrix, Gf256};

/// Default number of source packets per block.
pub const DEFAULT_BLOCK_SIZE: usize = 20;

/// Length in bytes of the block id field.
pub const BLOCK_ID_LEN: usize = 2;

/// 16-bit block identifier with wrap-around ordering.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlockId(pub u16);

impl BlockId {
    #[inline]
    pub fn next(self) -> BlockId {
        BlockId(self.0.wrapping_add(1))
    }

    /// True if `self` is ahead of `other` within half the id space.
    #[inline]
    pub fn is_newer_than(self, other: BlockId) -> bool {
        let d = self.0.wrapping_sub(other.0);
        d != 0 && d < 0x8000
    }
}

impl fmt::Debug for BlockId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BlockId({})", self.0)
    }
}

impl fmt::Display for BlockId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// `M` uncoded payloads of `k` bytes each.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceBlock {
    block_id: BlockId,
    packets: Vec<Vec<u8>>,
}

impl SourceBlock {
    pub fn new(block_id: BlockId, packets: Vec<Vec<u8>>) -> Result<Self> {
        if packets.is_empty() {
            return Err(Error::Config("a block needs at least one packet".into()));
        }
        let k = packets[0].len();
        if let Some(i) = packets.iter().position(|p| p.len() != k) {
            return Err(Error::Dimension(format!(
                "packet {i} has {} bytes, block uses {k}",
                packets[i].len()
            )));
        }
        Ok(SourceBlock { block_id, packets })
    }

    /// A block of `m` payloads of `k` random bytes.
    pub fn random<R: Rng + ?Sized>(block_id: BlockId, m: usize, k: usize, rng: &mut R) -> Self {
        assert!(m > 0, "block size must be positive");
        let packets = (0..m)
            .map(|_| {
                let mut p = vec![0u8; k];
                rng.fill(p.as_mut_slice());
                p
            })
            .collect();
        SourceBlock { block_id, packets }
    }

    #[inline]
    pub fn block_id(&self) -> BlockId {
        self.block_id
    }

    /// Block size `M`.
    #[inline]
    pub fn size(&self) -> usize {
        self.packets.len()
    }

    /// Payload length `k`.
    #[inline]
    pub fn payload_len(&self) -> usize {
        self.packets[0].len()
    }

    #[inline]
    pub fn packets(&self) -> &[Vec<u8>] {
        &self.packets
    }

    /// Coded packet for the given coefficient vector.
    pub fn combine(&self, coefficients: Vec<Gf256>) -> Result<CodedPacket> {
        if coefficients.len() != self.size() {
            return Err(Error::Dimension(format!(
                "{} coefficients for a block of {}",
                coefficients.len(),
                self.size()
            )));
        }
        let payload = gf256::combine(&coefficients, &self.packets, self.payload_len());
        Ok(CodedPacket {
            block_id: self.block_id,
            coefficients,
            payload,
        })
    }
}

/// The unit carried on every link.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CodedPacket {
    pub block_id: BlockId,
    pub coefficients: Vec<Gf256>,
    pub payload: Vec<u8>,
}

impl CodedPacket {
    /// Block size the packet was coded for.
    #[inline]
    pub fn block_size(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.iter().all(|c| c.0 == 0)
    }
}

/// Draws `m` uniform coefficients, redrawing the all-zero vector.
pub fn random_coefficients<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Vec<Gf256> {
    let mut bytes = vec![0u8; m];
    loop {
        rng.fill(bytes.as_mut_slice());
        if bytes.iter().any(|&b| b != 0) {
            return bytes.into_iter().map(Gf256).collect();
        }
    }
}

/// Encodes one packet at the source.
pub fn encode<R: Rng + ?Sized>(block: &SourceBlock, rng: &mut R) -> CodedPacket {
    let coefficients = random_coefficients(block.size(), rng);
    block
        .combine(coefficients)
        .expect("coefficient count matches block size")
}

/// Bounded per-block store of coded packets held by a relay.
#[derive(Clone, Debug)]
pub struct RecodeBuffer {
    capacity: usize,
    block_id: Option<BlockId>,
    stored: VecDeque<CodedPacket>,
}

impl RecodeBuffer {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "recode buffer needs positive capacity");
        RecodeBuffer {
            capacity,
            block_id: None,
            stored: VecDeque::with_capacity(capacity),
        }
    }

    #[inline]
    pub fn capacity(&self) -> usize {
        self.capacity
    }

    #[inline]
    pub fn block_id(&self) -> Option<BlockId> {
        self.block_id
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.stored.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.stored.is_empty()
    }

    pub fn packets(&self) -> impl Iterator<Item = &CodedPacket> {
        self.stored.iter()
    }

    /// Drops everything and forgets the block.
    pub fn purge(&mut self) {
        self.stored.clear();
        self.block_id = None;
    }

    /// Rank of the stored coefficient vectors.
    pub fn rank(&self) -> usize {
        if self.stored.is_empty() {
            return 0;
        }
        let rows: Vec<&[Gf256]> = self.stored.iter().map(|p| p.coefficients.as_slice()).collect();
        CoefMatrix::from_rows(&rows).map_or(0, |m| m.rank())
    }

    /// True if `p` would raise the rank of the stored packets.
    pub fn is_innovative(&self, p: &CodedPacket) -> bool {
        if p.is_zero() {
            return false;
        }
        let mut basis = Basis::new(p.block_size());
        for q in &self.stored {
            basis.insert(q.coefficients.clone());
        }
        basis.insert(p.coefficients.clone())
    }

    /// Stores `p`, evicting the oldest packet when full. A packet from another
    /// block is rejected; callers purge first when a newer block shows up.
    pub fn insert(&mut self, p: CodedPacket) -> Result<()> {
        match self.block_id {
            Some(b) if b != p.block_id => {
                return Err(Error::BlockMismatch {
                    expected: b.0,
                    got: p.block_id.0,
                })
            }
            _ => self.block_id = Some(p.block_id),
        }
        if let Some(first) = self.stored.front() {
            if first.block_size() != p.block_size() || first.payload.len() != p.payload.len() {
                return Err(Error::Dimension("packet shape differs from buffer".into()));
            }
        }
        if self.stored.len() == self.capacity {
            self.stored.pop_front();
        }
        self.stored.push_back(p);
        Ok(())
    }
}

/// Recodes a fresh random combination of everything in `buffer`.
pub fn recode<R: Rng + ?Sized>(buffer: &RecodeBuffer, rng: &mut R) -> Result<CodedPacket> {
    let weights = random_coefficients(buffer.len().max(1), rng);
    recode_with(buffer, &weights)
}

/// Recodes with explicit per-packet weights.
pub fn recode_with(buffer: &RecodeBuffer, weights: &[Gf256]) -> Result<CodedPacket> {
    let first = buffer.stored.front().ok_or(Error::EmptyBuffer)?;
    if weights.len() != buffer.len() {
        return Err(Error::Dimension(format!(
            "{} weights for {} buffered packets",
            weights.len(),
            buffer.len()
        )));
    }
    let mut coefficients = vec![Gf256::ZERO; first.block_size()];
    let mut payload = vec![0u8; first.payload.len()];
    for (w, p) in weights.iter().zip(&buffer.stored) {
        axpy_elems(&mut coefficients, *w, &p.coefficients);
        axpy(&mut payload, *w, &p.payload);
    }
    Ok(CodedPacket {
        block_id: first.block_id,
        coefficients,
        payload,
    })
}

/// Reduced row-echelon basis of coefficient vectors, kept incrementally.
#[derive(Clone, Debug)]
struct Basis {
    width: usize,
    // (pivot column, normalized row)
    rows: Vec<(usize, Vec<Gf256>)>,
}

impl Basis {
    fn new(width: usize) -> Self {
        Basis {
            width,
            rows: Vec::with_capacity(width),
        }
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the basis; keeps it and returns true if a nonzero
    /// remainder is left.
    fn insert(&mut self, mut v: Vec<Gf256>) -> bool {
        debug_assert_eq!(v.len(), self.width);
        for (pivot, row) in &self.rows {
            let f = v[*pivot];
            if f.0 != 0 {
                axpy_elems(&mut v, f, row);
            }
        }
        let Some(pivot) = v.iter().position(|c| c.0 != 0) else {
            return false;
        };
        let inv = v[pivot].inverse().expect("pivot is nonzero");
        gf256::scale_elems(&mut v, inv);
        for (_, row) in &mut self.rows {
            let f = row[pivot];
            if f.0 != 0 {
                axpy_elems(row, f, &v);
            }
        }
        self.rows.push((pivot, v));
        true
    }
}

/// Destination-side state for one block.
#[derive(Clone, Debug)]
pub struct DecoderState {
    block_id: BlockId,
    block_size: usize,
    payload_len: usize,
    basis: Basis,
    received: Vec<CodedPacket>,
}

impl DecoderState {
    pub fn new(block_id: BlockId, block_size: usize, payload_len: usize) -> Self {
        assert!(block_size > 0, "block size must be positive");
        DecoderState {
            block_id,
            block_size,
            payload_len,
            basis: Basis::new(block_size),
            received: Vec::with_capacity(block_size),
        }
    }

    #[inline]
    pub fn block_id(&self) -> BlockId {
        self.block_id
    }

    #[inline]
    pub fn block_size(&self) -> usize {
        self.block_size
    }

    #[inline]
    pub fn rank(&self) -> usize {
        self.basis.rank()
    }

    #[inline]
    pub fn is_complete(&self) -> bool {
        self.rank() == self.block_size
    }

    /// Stored (innovative) packets, in arrival order.
    pub fn received(&self) -> &[CodedPacket] {
        &self.received
    }

    /// Offers a packet; returns whether it was innovative and kept.
    pub fn receive(&mut self, p: CodedPacket) -> Result<bool> {
        if p.block_id != self.block_id {
            return Err(Error::BlockMismatch {
                expected: self.block_id.0,
                got: p.block_id.0,
            });
        }
        if p.coefficients.len() != self.block_size || p.payload.len() != self.payload_len {
            return Err(Error::Dimension(format!(
                "packet is {}x{}, decoder expects {}x{}",
                p.coefficients.len(),
                p.payload.len(),
                self.block_size,
                self.payload_len
            )));
        }
        if self.is_complete() {
            return Ok(false);
        }
        if self.basis.insert(p.coefficients.clone()) {
            self.received.push(p);
            Ok(true)
        } else {
            Ok(false)
        }
    }

    /// Recovers the source block once the rank reaches `M`.
    pub fn decode(&self) -> Result<SourceBlock> {
        if !self.is_complete() {
            return Err(Error::NotDecodable {
                rank: self.rank(),
                needed: self.block_size,
            });
        }
        let rows: Vec<&[Gf256]> = self.received.iter().map(|p| p.coefficients.as_slice()).collect();
        let c = CoefMatrix::from_rows(&rows)?;
        let rhs: Vec<&[u8]> = self.received.iter().map(|p| p.payload.as_slice()).collect();
        let packets = c.solve(&rhs)?;
        SourceBlock::new(self.block_id, packets)
    }
}

/// Serializes `[block id BE][coefficients][payload]`.
pub fn serialize_header(p: &CodedPacket) -> Vec<u8> {
    let mut out = Vec::with_capacity(BLOCK_ID_LEN + p.coefficients.len() + p.payload.len());
    out.extend_from_slice(&p.block_id.0.to_be_bytes());
    out.extend(p.coefficients.iter().map(|c| c.0));
    out.extend_from_slice(&p.payload);
    out
}

/// Parses a packet coded for blocks of `block_size`; the payload is the rest
/// of the buffer.
pub fn parse_header(bytes: &[u8], block_size: usize) -> Result<CodedPacket> {
    let needed = BLOCK_ID_LEN + block_size;
    if bytes.len() < needed {
        return Err(Error::Truncated {
            needed,
            got: bytes.len(),
        });
    }
    let block_id = BlockId(u16::from_be_bytes([bytes[0], bytes[1]]));
    let coefficients = bytes[BLOCK_ID_LEN..needed].iter().copied().map(Gf256).collect();
    Ok(CodedPacket {
        block_id,
        coefficients,
        payload: bytes[needed..].to_vec(),
    })
}

/// Coefficient bytes as a percentage of the packet size.
pub fn header_overhead(block_size: usize, packet_size: usize) -> f64 {
    assert!(packet_size > 0, "packet size must be positive");
    100.0 * block_size as f64 / packet_size as f64
}
