use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent random sub-streams of one run, keyed by phase.
///
/// Every phase draws from its own ChaCha stream of the run seed, so the
/// numbers one phase sees never depend on how many another phase consumed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub(crate) enum Phase {
    Init = 1,
    Motion = 2,
    Breeding = 3,
    Employed = 4,
    Onlooker = 5,
    Scout = 6,
}

pub(crate) fn stream(seed: u64, phase: Phase) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(phase as u64);
    rng
}
