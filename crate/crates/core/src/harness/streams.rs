//! Seeded random streams and a block-parallel runner.
//!
//! Every experiment draws from ChaCha8 keyed by `(seed, experiment id)`.
//! Trials are cut into fixed-size blocks and block `b` always uses stream `b`,
//! so the result of a run depends on the seed and the block size but not on
//! how many workers execute the blocks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{LabError, Result};

/// Trials per block unless a caller asks otherwise.
pub const DEFAULT_BLOCK: u64 = 1 << 14;

/// Environment variable read for the default worker count.
pub const WORKERS_ENV: &str = "MONOLAB_WORKERS";

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// FNV-1a, used only to turn experiment names into stable 64-bit tags.
fn fnv1a(text: &str) -> u64 {
    text.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
    })
}

/// The 256-bit ChaCha key for `(seed, experiment)`.
pub fn stream_key(seed: u64, experiment: &str) -> [u8; 32] {
    let mut state = seed ^ fnv1a(experiment).rotate_left(17);
    let mut key = [0u8; 32];
    for chunk in key.chunks_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    key
}

/// Generator for stream `index` of `(seed, experiment)`.
pub fn stream_rng(seed: u64, experiment: &str, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::from_seed(stream_key(seed, experiment));
    rng.set_stream(index);
    rng
}

/// Worker count from `MONOLAB_WORKERS`, else the available parallelism.
pub fn default_workers() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&w| w >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|p| p.get())
                .unwrap_or(1)
        })
}

/// How a batch of trials is split and executed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockPlan {
    pub seed: u64,
    pub experiment: String,
    pub trials: u64,
    pub block: u64,
    pub workers: usize,
}

impl BlockPlan {
    pub fn new(seed: u64, experiment: impl Into<String>, trials: u64) -> Self {
        Self {
            seed,
            experiment: experiment.into(),
            trials,
            block: DEFAULT_BLOCK,
            workers: default_workers(),
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers.max(1);
        self
    }

    pub fn with_block(mut self, block: u64) -> Self {
        self.block = block.max(1);
        self
    }

    pub fn blocks(&self) -> u64 {
        self.trials.div_ceil(self.block)
    }

    /// Runs `work(rng, trials_in_block)` on every block and folds the results
    /// in block order.
    pub fn run<A, W, M>(&self, work: W, identity: A, merge: M) -> Result<A>
    where
        A: Send,
        W: Fn(&mut ChaCha8Rng, u64) -> A + Sync,
        M: Fn(A, A) -> A,
    {
        let blocks = self.blocks();
        let job = |b: u64| {
            let mut rng = stream_rng(self.seed, &self.experiment, b);
            let len = self.block.min(self.trials - b * self.block);
            work(&mut rng, len)
        };
        let parts: Vec<A> = if self.workers <= 1 {
            (0..blocks).map(job).collect()
        } else {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(self.workers)
                .build()
                .map_err(|e| LabError::InvalidArgument(format!("thread pool: {e}")))?;
            pool.install(|| (0..blocks).into_par_iter().map(job).collect())
        };
        Ok(parts.into_iter().fold(identity, merge))
    }
}
