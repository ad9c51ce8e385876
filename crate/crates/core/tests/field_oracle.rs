//! GF(2^8) arithmetic and elimination checked against slow reference code.

use hetnet::gf256::{self, CoefMatrix, Gf256};
use hetnet::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn slow_mul(mut a: u8, mut b: u8) -> u8 {
    let mut p = 0u8;
    while b != 0 {
        if b & 1 != 0 {
            p ^= a;
        }
        let hi = a & 0x80 != 0;
        a <<= 1;
        if hi {
            a ^= 0x1B;
        }
        b >>= 1;
    }
    p
}

fn slow_inv(a: u8) -> u8 {
    (1..=255u8).find(|&x| slow_mul(a, x) == 1).unwrap()
}

/// Rank by elimination that walks columns right to left, pivots on the
/// bottom-most non-zero entry and never normalizes rows.
fn oracle_rank(rows: &[Vec<u8>]) -> usize {
    let mut live: Vec<Vec<u8>> = rows.to_vec();
    let cols = live.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in (0..cols).rev() {
        let Some(p) = live.iter().rposition(|r| r[c] != 0) else {
            continue;
        };
        let pivot = live.remove(p);
        for r in live.iter_mut().filter(|r| r[c] != 0) {
            // r <- pivot[c] * r + r[c] * pivot
            let (x, y) = (pivot[c], r[c]);
            for (e, &q) in r.iter_mut().zip(&pivot) {
                *e = slow_mul(x, *e) ^ slow_mul(y, q);
            }
        }
        rank += 1;
    }
    rank
}

fn to_matrix(rows: &[Vec<u8>]) -> CoefMatrix {
    let cols = rows[0].len();
    let flat: Vec<u8> = rows.concat();
    CoefMatrix::from_bytes(rows.len(), cols, &flat).unwrap()
}

#[test]
fn field_axioms_exhaustive() {
    for a in 0..=255u8 {
        for b in 0..=255u8 {
            let (x, y) = (Gf256(a), Gf256(b));
            assert_eq!(x * y, y * x);
            assert_eq!(x + y, y + x);
            assert_eq!((x * y).0, slow_mul(a, b));
        }
        if a != 0 {
            assert_eq!(Gf256(a).inverse().unwrap().0, slow_inv(a));
            assert_eq!(Gf256(a) / Gf256(a), Gf256::ONE);
        }
        assert_eq!(Gf256(a) + Gf256(a), Gf256::ZERO);
        assert_eq!(Gf256(a) * Gf256::ONE, Gf256(a));
    }
    assert_eq!(gf256::inverse(Gf256::ZERO), Err(Error::ZeroInverse));
}

#[test]
fn associativity_and_distributivity_exhaustive_over_a_sample_of_c() {
    for c in [0u8, 1, 2, 3, 0x1B, 0x53, 0x80, 0xCA, 0xFF] {
        let z = Gf256(c);
        for a in 0..=255u8 {
            for b in 0..=255u8 {
                let (x, y) = (Gf256(a), Gf256(b));
                assert_eq!((x * y) * z, x * (y * z));
                assert_eq!(x * (y + z), x * y + x * z);
            }
        }
    }
}

#[test]
fn known_products_and_inverses() {
    assert_eq!(gf256::mul(Gf256(0x80), Gf256(0x02)), Gf256(0x1B));
    assert_eq!(gf256::inverse(Gf256(0x02)).unwrap(), Gf256(0x8D));
    assert_eq!(slow_inv(0x02), 0x8D);
}

#[test]
fn small_matrices_exhaustive_rank() {
    // every 3x3 matrix over {0, 1, 2, 3}
    let vals = [0u8, 1, 2, 3];
    for code in 0..4usize.pow(9) {
        let mut c = code;
        let rows: Vec<Vec<u8>> = (0..3)
            .map(|_| {
                (0..3)
                    .map(|_| {
                        let v = vals[c % 4];
                        c /= 4;
                        v
                    })
                    .collect()
            })
            .collect();
        assert_eq!(to_matrix(&rows).rank(), oracle_rank(&rows), "{rows:?}");
    }
}

#[test]
fn random_square_and_rectangular_ranks() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..300 {
        let r = rng.random_range(1..=20);
        let c = rng.random_range(1..=20);
        // sparse entries make deficient ranks common
        let rows: Vec<Vec<u8>> = (0..r)
            .map(|_| {
                (0..c)
                    .map(|_| if rng.random_bool(0.3) { rng.random() } else { 0 })
                    .collect()
            })
            .collect();
        assert_eq!(to_matrix(&rows).rank(), oracle_rank(&rows));
    }
    for _ in 0..50 {
        let rows: Vec<Vec<u8>> = (0..20).map(|_| (0..20).map(|_| rng.random()).collect()).collect();
        assert_eq!(to_matrix(&rows).rank(), oracle_rank(&rows));
    }
}

proptest! {
    #[test]
    fn solve_inverts_forward_multiplication(
        n in 1usize..12,
        k in 1usize..40,
        seed in any::<u64>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a: Vec<Vec<u8>> = (0..n).map(|_| (0..k).map(|_| rng.random()).collect()).collect();
        let c: Vec<Vec<u8>> = (0..n).map(|_| (0..n).map(|_| rng.random()).collect()).collect();
        // forward multiply with the slow oracle
        let y: Vec<Vec<u8>> = c
            .iter()
            .map(|row| {
                (0..k)
                    .map(|j| row.iter().zip(&a).fold(0u8, |acc, (&cij, aj)| acc ^ slow_mul(cij, aj[j])))
                    .collect()
            })
            .collect();
        let m = to_matrix(&c);
        match m.solve(&y) {
            Ok(x) => {
                prop_assert_eq!(oracle_rank(&c), n);
                prop_assert_eq!(x, a);
            }
            Err(Error::RankDeficient { .. }) => prop_assert!(oracle_rank(&c) < n),
            Err(e) => return Err(TestCaseError::fail(format!("{e}"))),
        }
    }

    #[test]
    fn rank_is_invariant_under_row_operations(
        seed in any::<u64>(),
        r in 1usize..10,
        c in 1usize..10,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows: Vec<Vec<u8>> = (0..r).map(|_| (0..c).map(|_| rng.random_range(0..4u8)).collect()).collect();
        let before = to_matrix(&rows).rank();
        let mut moved = rows.clone();
        let (i, j) = (rng.random_range(0..r), rng.random_range(0..r));
        let f: u8 = rng.random_range(1..=255);
        if i != j {
            let src = moved[j].clone();
            for (e, &s) in moved[i].iter_mut().zip(&src) {
                *e ^= slow_mul(f, s);
            }
        }
        moved.reverse();
        prop_assert_eq!(to_matrix(&moved).rank(), before);
    }
}
