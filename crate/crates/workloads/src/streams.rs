//! Seeded operation streams, shared verbatim by the monitor and lock-based
//! drivers so that every implementation sees bitwise-identical inputs for
//! the same seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Integers handled by the list workload stay in this half-open range.
pub const LIST_VALUE_RANGE: i64 = 10_000;

fn rng_for(seed: u64, thread: u64, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(
        seed.wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .wrapping_add(thread.wrapping_mul(0x85EB_CA6B))
            .wrapping_add(salt),
    )
}

/// Values a bounded-buffer producer inserts.
pub fn buffer_values(seed: u64, thread: u64, ops: usize) -> Vec<i64> {
    let mut rng = rng_for(seed, thread, 1);
    (0..ops).map(|_| rng.gen_range(0..1_000_000)).collect()
}

/// One list operation: insert or remove with equal probability.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ListOp {
    Insert(i64),
    Remove(i64),
}

pub fn list_ops(seed: u64, thread: u64, ops: usize) -> Vec<ListOp> {
    let mut rng = rng_for(seed, thread, 2);
    (0..ops)
        .map(|_| {
            let v = rng.gen_range(0..LIST_VALUE_RANGE);
            if rng.gen_bool(0.5) {
                ListOp::Insert(v)
            } else {
                ListOp::Remove(v)
            }
        })
        .collect()
}

/// The list's initial contents (independent of thread streams).
pub fn prepopulated_list_values(seed: u64, count: usize) -> Vec<i64> {
    let mut rng = rng_for(seed, u64::MAX, 3);
    (0..count).map(|_| rng.gen_range(0..LIST_VALUE_RANGE)).collect()
}

/// Batch sizes for the parametrized buffer. Bounded by half the buffer so
/// that a pending put and a pending take can never block each other
/// permanently, and consumers replay their paired producer's sizes so the
/// run drains exactly.
pub fn batch_sizes(seed: u64, pair: u64, ops: usize, buffer_size: usize) -> Vec<usize> {
    let cap = buffer_size / 2;
    let upper = cap.clamp(1, 8);
    let mut rng = rng_for(seed, pair, 4);
    (0..ops).map(|_| rng.gen_range(1..=upper)).collect()
}

/// Values put by the parametrized-buffer producer `pair`, batched according
/// to `batch_sizes` with the same (seed, pair).
pub fn batch_values(seed: u64, pair: u64, sizes: &[usize]) -> Vec<Vec<i64>> {
    let mut rng = rng_for(seed, pair, 5);
    sizes
        .iter()
        .map(|&n| (0..n).map(|_| rng.gen_range(0..1_000_000)).collect())
        .collect()
}
