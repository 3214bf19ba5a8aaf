//! Unit-test helpers: a seeded rng and exponentiation by repeated
//! multiplication, used as an oracle independent of the pow code path.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::groups::{G1Elem, G2Elem, GtElem};

pub(crate) fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

pub(crate) fn slow_pow_g1(base: &G1Elem, e: u64) -> G1Elem {
    let mut acc = G1Elem::identity();
    for _ in 0..e {
        acc = acc * *base;
    }
    acc
}

pub(crate) fn slow_pow_g2(base: &G2Elem, e: u64) -> G2Elem {
    let mut acc = G2Elem::identity();
    for _ in 0..e {
        acc = acc * *base;
    }
    acc
}

pub(crate) fn slow_pow_gt(base: &GtElem, e: u64) -> GtElem {
    let mut acc = GtElem::identity();
    for _ in 0..e {
        acc = acc * *base;
    }
    acc
}
