//! Encode / recode / decode properties.

use hetnet::gf256::{self, Gf256};
use hetnet::rlnc::{self, parse_header, serialize_header, BlockId, DecoderState, RecodeBuffer, SourceBlock};
use hetnet::{CodedPacket, Error};
use proptest::prelude::*;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Payload implied by a coefficient vector, by direct forward multiplication.
fn implied_payload(block: &SourceBlock, coefs: &[Gf256]) -> Vec<u8> {
    let mut out = vec![0u8; block.payload_len()];
    for (c, src) in coefs.iter().zip(block.packets()) {
        for (o, &s) in out.iter_mut().zip(src) {
            *o ^= gf256::mul(*c, Gf256(s)).0;
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn any_mix_of_source_and_relay_packets_decodes(
        m in 1usize..24,
        k in 1usize..64,
        depth in 0usize..4,
        cap in 1usize..10,
        seed in any::<u64>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let block = SourceBlock::random(BlockId(rng.random()), m, k, &mut rng);
        let mut pool: Vec<CodedPacket> = Vec::new();
        // relay chain of `depth` buffers, each fed by the previous one
        for _ in 0..3 * m {
            let mut p = rlnc::encode(&block, &mut rng);
            let mut buffers: Vec<RecodeBuffer> = (0..depth).map(|_| RecodeBuffer::new(cap)).collect();
            for b in buffers.iter_mut() {
                b.insert(p.clone()).unwrap();
                p = rlnc::recode(b, &mut rng).unwrap();
            }
            pool.push(p);
        }
        pool.shuffle(&mut rng);
        let mut dec = DecoderState::new(block.block_id(), m, k);
        for p in pool {
            prop_assert_eq!(implied_payload(&block, &p.coefficients), p.payload.clone());
            dec.receive(p).unwrap();
            if dec.is_complete() {
                break;
            }
        }
        if dec.is_complete() {
            prop_assert_eq!(dec.decode().unwrap(), block);
        } else {
            let is_not_decodable = matches!(dec.decode(), Err(Error::NotDecodable { .. }));
            prop_assert!(is_not_decodable);
        }
    }

    #[test]
    fn recoding_stays_in_span_at_any_depth(
        m in 1usize..16,
        k in 1usize..32,
        seed in any::<u64>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let block = SourceBlock::random(BlockId(0), m, k, &mut rng);
        let mut layer: Vec<CodedPacket> = (0..m).map(|_| rlnc::encode(&block, &mut rng)).collect();
        for _ in 0..5 {
            let mut buf = RecodeBuffer::new(8);
            for p in layer.choose_multiple(&mut rng, 8) {
                buf.insert(p.clone()).unwrap();
            }
            let buffer_rank = buf.rank();
            layer = (0..m).map(|_| rlnc::recode(&buf, &mut rng).unwrap()).collect();
            let mut dec = DecoderState::new(BlockId(0), m, k);
            for p in &layer {
                prop_assert_eq!(implied_payload(&block, &p.coefficients), p.payload.clone());
                dec.receive(p.clone()).unwrap();
            }
            prop_assert!(dec.rank() <= buffer_rank);
        }
    }

    #[test]
    fn header_round_trip(m in 1usize..40, k in 0usize..100, id in any::<u16>(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = CodedPacket {
            block_id: BlockId(id),
            coefficients: (0..m).map(|_| Gf256(rng.random())).collect(),
            payload: (0..k).map(|_| rng.random()).collect(),
        };
        let bytes = serialize_header(&p);
        prop_assert_eq!(bytes.len(), 2 + m + k);
        prop_assert_eq!(parse_header(&bytes, m).unwrap(), p);
        let truncated = matches!(parse_header(&bytes[..1 + m], m), Err(Error::Truncated { .. }));
        prop_assert!(truncated);
    }

    #[test]
    fn decoder_rank_counts_innovative_arrivals(seed in any::<u64>(), m in 1usize..12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let block = SourceBlock::random(BlockId(3), m, 4, &mut rng);
        let mut dec = DecoderState::new(BlockId(3), m, 4);
        let mut innovative = 0;
        for _ in 0..2 * m {
            // half the time resend an old packet
            let p = if !dec.received().is_empty() && rng.random_bool(0.5) {
                dec.received().choose(&mut rng).unwrap().clone()
            } else {
                rlnc::encode(&block, &mut rng)
            };
            innovative += dec.receive(p).unwrap() as usize;
            prop_assert_eq!(dec.rank(), innovative);
        }
    }
}

#[test]
fn header_layout_example() {
    let mut coefficients = vec![Gf256::ZERO; 20];
    coefficients[0] = Gf256::ONE;
    let p = CodedPacket {
        block_id: BlockId(1),
        coefficients,
        payload: Vec::new(),
    };
    let bytes = serialize_header(&p);
    let mut want = vec![0u8; 22];
    want[1] = 0x01;
    want[2] = 0x01;
    assert_eq!(bytes, want);
}

#[test]
fn overhead_examples() {
    assert!((rlnc::header_overhead(20, 1400) - 1.428).abs() < 1e-3);
    assert!((rlnc::header_overhead(20, 1200) - 1.667).abs() < 1e-3);
}

#[test]
fn independent_encodings_rarely_collide() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let block = SourceBlock::random(BlockId(0), 20, 1, &mut rng);
    let same = (0..10_000)
        .filter(|_| rlnc::encode(&block, &mut rng).coefficients == rlnc::encode(&block, &mut rng).coefficients)
        .count();
    assert_eq!(same, 0);
}
