//! Counter-based per-shot random streams and order-fixed parallel reduction.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Shots per reduction chunk. Chunk boundaries are fixed so the floating
/// point summation order does not depend on the thread count.
pub const CHUNK: usize = 1024;

/// Independent stream for shot `shot` under master seed `seed`.
pub fn shot_rng(seed: u64, shot: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shot);
    rng
}

/// Runs `shot(acc, index, rng)` for every shot, in parallel over chunks of
/// [`CHUNK`], and merges chunk accumulators left to right.
pub fn fold_shots<A, I, S, M>(seed: u64, shots: usize, init: I, shot: S, merge: M) -> A
where
    A: Send,
    I: Fn() -> A + Sync,
    S: Fn(&mut A, u64, &mut ChaCha8Rng) + Sync,
    M: Fn(A, A) -> A,
{
    let chunks = shots.div_ceil(CHUNK);
    let partial: Vec<A> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = init();
            for k in c * CHUNK..((c + 1) * CHUNK).min(shots) {
                let mut rng = shot_rng(seed, k as u64);
                shot(&mut acc, k as u64, &mut rng);
            }
            acc
        })
        .collect();
    partial.into_iter().fold(init(), merge)
}
