//! Reproducible random streams for the Monte-Carlo oracles.
//!
//! Every unit of work (a particle, a block of link trials) draws from its own
//! ChaCha8 stream selected by `(master seed, index)`, so the output does not
//! depend on how work is scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Maps `f` over `0..n` in parallel and returns results in index order.
/// `threads = None` uses the global rayon pool.
pub fn par_map<T, F>(n: usize, threads: Option<usize>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match threads {
        None => (0..n).into_par_iter().map(f).collect(),
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build()
            .expect("thread pool")
            .install(|| (0..n).into_par_iter().map(f).collect()),
    }
}
