//! Small shared helpers: thread-pool sizing and splittable RNG streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Runs `f` inside a rayon pool with `jobs` threads when given, otherwise
/// on the global pool. All reductions in this crate are order-independent,
/// so results do not depend on the thread count.
pub fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("thread pool")
            .install(f),
        None => f(),
    }
}

/// Counter-based per-trial generator: stream `index` of a ChaCha cipher
/// keyed by the master seed. Identical regardless of how trials are
/// partitioned across workers.
pub fn trial_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}
