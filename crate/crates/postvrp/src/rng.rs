//! Seed derivation for reproducible parallel runs.
//!
//! Every random decision in the solver is made by an RNG seeded from
//! `(master seed, stream, index)`, where the stream tags the kind of decision
//! and the index identifies the task (individual, pair, generation slot).
//! Task seeds therefore depend only on their position in the computation,
//! never on worker scheduling, so sequential and parallel execution produce
//! bit-identical results.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// One round of the splitmix64 output function.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a child seed from a master seed, a stream tag, and a task index.
pub fn derive(master: u64, stream: u64, index: u64) -> u64 {
    mix(mix(master ^ mix(stream)) ^ index)
}

/// A ChaCha RNG for one task, keyed by position rather than by draw order.
pub fn task_rng(master: u64, stream: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive(master, stream, index))
}
