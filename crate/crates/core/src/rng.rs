//! Seeded random streams.
//!
//! Every consumer of randomness gets its own ChaCha stream derived from the
//! master seed. Streams are keyed by role, so adding schedulers never shifts
//! the draws seen by the workload generator or by other schedulers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::model::SchedulerId;

pub type SimRng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamRole {
    Capacities,
    Workload,
    Agent(SchedulerId),
}

impl StreamRole {
    fn stream_index(self) -> u64 {
        match self {
            StreamRole::Capacities => 0,
            StreamRole::Workload => 1,
            StreamRole::Agent(SchedulerId(i)) => 2 + i as u64,
        }
    }
}

pub fn stream(seed: u64, role: StreamRole) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(role.stream_index());
    rng
}
