//! Fixtures shared by the amplikit benchmarks.

use amplikit::statevector::{SearchInstance, UnitarySpec};
use amplikit::verify::random_configs;
use amplikit::PhaseConfig;

/// Seed for every generated fixture.
pub const SEED: u64 = 0xbe4c;

/// A fixed batch of nondegenerate configurations.
pub fn configs(count: usize) -> Vec<PhaseConfig> {
    random_configs(SEED, count)
}

/// Search over `n` qubits with the Walsh–Hadamard transform as U.
pub fn hadamard_instance(n: u32) -> SearchInstance {
    let dim = 1usize << n;
    SearchInstance::new(n, 0, dim - 1, UnitarySpec::WalshHadamard, 0.3, -0.7).expect("valid instance")
}

/// Search over `n` qubits with a dense Haar-like U.
pub fn random_instance(n: u32) -> SearchInstance {
    let dim = 1usize << n;
    SearchInstance::new(n, 1, dim / 2, UnitarySpec::Random { seed: SEED }, 0.3, -0.7).expect("valid instance")
}
