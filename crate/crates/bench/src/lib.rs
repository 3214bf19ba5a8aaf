//! Fixture construction shared by the criterion benchmarks.
//!
//! The instrumented size-sweep harness lives in `lgs_core::bench`; this
//! crate only times individual algorithms on a fixed group.

use rand::{CryptoRng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use lgs_core::lgs::{
    join_ra_issue, join_user_finish, join_user_start, setup, GroupParams, MemberKey, RaSecret,
    SaSecret, SECURITY_LEVEL,
};
use lgs_core::registry::InMemoryRegistry;

/// A ready-to-sign group: parameters, both authority keys, a populated
/// registry, and one key per member.
pub struct Fixture {
    pub gpk: GroupParams,
    pub ra: RaSecret,
    pub sa: SaSecret,
    pub registry: InMemoryRegistry,
    pub members: Vec<MemberKey>,
}

/// One full three-message enrollment against a live registry.
pub fn enroll<R: RngCore + CryptoRng>(
    gpk: &GroupParams,
    ra: &RaSecret,
    registry: &mut InMemoryRegistry,
    rng: &mut R,
) -> MemberKey {
    let (y, req) = join_user_start(gpk, rng);
    let cert = join_ra_issue(gpk, ra, &req, registry, rng).expect("fresh member");
    join_user_finish(gpk, y, cert).expect("honestly issued certificate")
}

/// Builds a deterministic group of `size` members.
pub fn fixture(size: usize, seed: u64) -> Fixture {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let (gpk, ra, sa) = setup(SECURITY_LEVEL, &mut rng).expect("supported level");
    let mut registry = InMemoryRegistry::new();
    let members = (0..size)
        .map(|_| enroll(&gpk, &ra, &mut registry, &mut rng))
        .collect();
    Fixture {
        gpk,
        ra,
        sa,
        registry,
        members,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use lgs_core::lgs::{sign, trace, verify};

    #[test]
    fn fixture_supports_the_full_protocol() {
        let mut rng = ChaCha20Rng::seed_from_u64(9);
        let fx = fixture(3, 1);
        assert_eq!(fx.members.len(), 3);
        let sig = sign(&fx.gpk, &fx.members[1], b"m", b"5", &mut rng);
        assert!(verify(&fx.gpk, b"m", b"5", &sig));
        let row = trace(&fx.gpk, &fx.sa, b"m", b"5", &sig, &fx.registry).unwrap();
        assert_eq!(row.index, 2);
    }
}
