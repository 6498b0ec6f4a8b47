//! Counter-based random streams.
//!
//! Every draw is addressed by `(seed, trajectory, index)`: ChaCha8 keyed by
//! the seed, the trajectory selecting the stream, the index selecting the
//! word position. Results therefore do not depend on the order in which
//! trajectories are scheduled.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// High stream bit separating initial-condition draws from branch decisions.
const INIT_STREAM: u64 = 1 << 63;

fn unit(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// The uniform in `[0, 1)` used for branch decision `decision` of
/// `trajectory`.
pub fn decision_uniform(seed: u64, trajectory: u64, decision: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trajectory & !INIT_STREAM);
    rng.set_word_pos(2 * decision as u128);
    unit(rng.next_u64())
}

/// Sequential uniforms for sampling a trajectory's initial condition.
pub struct InitStream {
    rng: ChaCha8Rng,
}

impl InitStream {
    pub fn new(seed: u64, trajectory: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trajectory | INIT_STREAM);
        Self { rng }
    }

    pub fn uniform(&mut self) -> f64 {
        unit(self.rng.next_u64())
    }
}
