//! Thread-pool plumbing. `GYBE_FORGE_THREADS` caps the number of workers.

pub const THREADS_ENV: &str = "GYBE_FORGE_THREADS";

pub fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|&n| n > 0)
}

/// Runs `f` inside a pool sized by the environment cap, or the global pool.
pub fn install<R: Send>(f: impl FnOnce() -> R + Send) -> R {
    match thread_cap().and_then(|n| rayon::ThreadPoolBuilder::new().num_threads(n).build().ok()) {
        Some(pool) => pool.install(f),
        None => f(),
    }
}
