use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent random streams used inside one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Data = 0,
    Bits = 1,
    Learner = 2,
    Aux = 3,
}

const STREAMS_PER_TRIAL: u64 = 16;

/// Generator keyed by `(seed, trial, stream)`; independent of execution order.
pub fn trial_rng(seed: u64, trial: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial.wrapping_mul(STREAMS_PER_TRIAL).wrapping_add(stream as u64));
    rng
}
