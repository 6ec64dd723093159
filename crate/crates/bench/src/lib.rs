//! Shared fixtures for the criterion benches.

use encctl_core::modarith::RngHandle;
use encctl_core::schemes::{KeyPair, SchemeId, SchemeSetup, SecurityParameter};

/// Modulus sizes the benches sweep.
pub const BENCH_LAMBDAS: [u32; 3] = [128, 256, 512];

/// Deterministic setup and key pair for a scheme at `lambda` bits.
pub fn fixture(scheme: SchemeId, lambda: u32) -> (SchemeSetup, KeyPair) {
    let mut rng = RngHandle::from_u64(u64::from(lambda)).child(scheme.name(), 0);
    let setup = SchemeSetup::new(scheme, SecurityParameter::new(lambda).expect("valid λ"), &mut rng)
        .expect("setup");
    let keys = setup.keygen(&mut rng).expect("keygen");
    (setup, keys)
}
