//! Linear encryption over G1: a two-generator ElGamal variant.
//!
//! A ciphertext (c1, c2, c3) = (v1^a, v2^b, m * u^(a+b)) hides m under the
//! Decision Linear assumption. The scheme uses it to escrow the signer's
//! certificate inside every signature, so the supervision authority holding
//! (k1, k2) can trace. Encryption is CPA only; authenticity comes from the
//! enclosing signature of knowledge.

use rand::{CryptoRng, RngCore};

use crate::groups::{hash_to_g1, DecodeError, G1Elem, Scalar, G1_LEN};

/// Domain tag under which the keygen base point u is derived from a fresh
/// random seed, so u has unknown discrete log relative to all fixed
/// generators.
const U_TAG: &[u8] = b"LGS-U-v1";

/// Encryption key (v1, v2, u) with v1^k1 = v2^k2 = u for the paired secret.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LinearPublicKey {
    pub v1: G1Elem,
    pub v2: G1Elem,
    pub u: G1Elem,
}

/// Decryption key (k1, k2), both nonzero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearSecretKey {
    pub k1: Scalar,
    pub k2: Scalar,
}

impl LinearSecretKey {
    /// Checks the defining relation v1^k1 = v2^k2 = u against a public key.
    pub fn consistent_with(&self, pk: &LinearPublicKey) -> bool {
        pk.v1.pow(&self.k1) == pk.u && pk.v2.pow(&self.k2) == pk.u
    }
}

/// Ciphertext (c1, c2, c3); unauthenticated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LinearCiphertext {
    pub c1: G1Elem,
    pub c2: G1Elem,
    pub c3: G1Elem,
}

impl LinearCiphertext {
    pub const LEN: usize = 3 * G1_LEN;

    /// c1 || c2 || c3, each compressed fixed width.
    pub fn to_bytes(&self) -> [u8; Self::LEN] {
        let mut out = [0u8; Self::LEN];
        out[..G1_LEN].copy_from_slice(&self.c1.to_bytes());
        out[G1_LEN..2 * G1_LEN].copy_from_slice(&self.c2.to_bytes());
        out[2 * G1_LEN..].copy_from_slice(&self.c3.to_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<LinearCiphertext, DecodeError> {
        if bytes.len() != Self::LEN {
            return Err(DecodeError::MalformedEncoding("ciphertext length"));
        }
        Ok(LinearCiphertext {
            c1: G1Elem::from_bytes(&bytes[..G1_LEN])?,
            c2: G1Elem::from_bytes(&bytes[G1_LEN..2 * G1_LEN])?,
            c3: G1Elem::from_bytes(&bytes[2 * G1_LEN..])?,
        })
    }
}

/// The (alpha, beta) used to form a ciphertext. Signing reuses them as
/// witnesses in the signature of knowledge, so encryption hands them back
/// explicitly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncRandomness {
    pub alpha: Scalar,
    pub beta: Scalar,
}

/// Samples (k1, k2) nonzero, derives u from a fresh seed, and sets
/// v1 = u^(1/k1), v2 = u^(1/k2), so v1^k1 = v2^k2 = u holds by construction
/// and the generators carry no known relation to anything else.
pub fn lin_keygen<R: RngCore + CryptoRng>(rng: &mut R) -> (LinearPublicKey, LinearSecretKey) {
    let u = loop {
        let mut seed = [0u8; 32];
        rng.fill_bytes(&mut seed);
        let u = hash_to_g1(U_TAG, &seed);
        if !u.is_identity() {
            break u;
        }
    };
    let k1 = Scalar::random_nonzero(rng);
    let k2 = Scalar::random_nonzero(rng);
    let v1 = u.pow(&k1.inverse().expect("nonzero by construction"));
    let v2 = u.pow(&k2.inverse().expect("nonzero by construction"));
    (LinearPublicKey { v1, v2, u }, LinearSecretKey { k1, k2 })
}

/// Encrypts with fresh (alpha, beta) and returns them alongside the
/// ciphertext.
pub fn lin_enc<R: RngCore + CryptoRng>(
    pk: &LinearPublicKey,
    msg: &G1Elem,
    rng: &mut R,
) -> (LinearCiphertext, EncRandomness) {
    let r = EncRandomness {
        alpha: Scalar::random(rng),
        beta: Scalar::random(rng),
    };
    (lin_enc_with_randomness(pk, msg, &r), r)
}

/// Deterministic encryption core: (v1^alpha, v2^beta, msg * u^(alpha+beta)).
pub fn lin_enc_with_randomness(
    pk: &LinearPublicKey,
    msg: &G1Elem,
    r: &EncRandomness,
) -> LinearCiphertext {
    LinearCiphertext {
        c1: pk.v1.pow(&r.alpha),
        c2: pk.v2.pow(&r.beta),
        c3: *msg * pk.u.pow(&(r.alpha + r.beta)),
    }
}

/// Recovers c3 / (c1^k1 * c2^k2). No authentication: a mangled ciphertext
/// decrypts to garbage rather than an error.
pub fn lin_dec(sk: &LinearSecretKey, ct: &LinearCiphertext) -> G1Elem {
    ct.c3 * (ct.c1.pow(&sk.k1) * ct.c2.pow(&sk.k2)).inv()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{rng, slow_pow_g1};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn keys_satisfy_defining_relation() {
        let (pk, sk) = lin_keygen(&mut rng(1));
        assert!(sk.consistent_with(&pk));
        assert!(!pk.v1.is_identity() && !pk.v2.is_identity() && !pk.u.is_identity());
    }

    #[test]
    fn keygens_are_independent() {
        let mut rng = rng(2);
        let (pk_a, _) = lin_keygen(&mut rng);
        let (pk_b, _) = lin_keygen(&mut rng);
        assert_ne!(pk_a.u, pk_b.u);
    }

    #[test]
    fn mismatched_keys_fail_consistency() {
        let mut rng = rng(3);
        let (pk, _) = lin_keygen(&mut rng);
        let (_, other_sk) = lin_keygen(&mut rng);
        assert!(!other_sk.consistent_with(&pk));
    }

    #[test]
    fn zero_randomness_gives_identity_components() {
        let (pk, _) = lin_keygen(&mut rng(4));
        let msg = hash_to_g1(b"test-linenc", b"m");
        let r = EncRandomness {
            alpha: Scalar::ZERO,
            beta: Scalar::ZERO,
        };
        let ct = lin_enc_with_randomness(&pk, &msg, &r);
        assert!(ct.c1.is_identity());
        assert!(ct.c2.is_identity());
        assert_eq!(ct.c3, msg);
    }

    #[test]
    fn identity_message_leaves_only_masking_term() {
        let mut rng = rng(5);
        let (pk, _) = lin_keygen(&mut rng);
        let r = EncRandomness {
            alpha: Scalar::random(&mut rng),
            beta: Scalar::random(&mut rng),
        };
        let ct = lin_enc_with_randomness(&pk, &G1Elem::identity(), &r);
        assert_eq!(ct.c3, pk.u.pow(&(r.alpha + r.beta)));
    }

    #[test]
    fn reencryption_changes_every_component() {
        let mut rng = rng(6);
        let (pk, _) = lin_keygen(&mut rng);
        let msg = hash_to_g1(b"test-linenc", b"m");
        let (ct_a, _) = lin_enc(&pk, &msg, &mut rng);
        let (ct_b, _) = lin_enc(&pk, &msg, &mut rng);
        assert_ne!(ct_a.c1, ct_b.c1);
        assert_ne!(ct_a.c2, ct_b.c2);
        assert_ne!(ct_a.c3, ct_b.c3);
    }

    #[test]
    fn small_exponent_vector_matches_independent_oracle() {
        // Hand-built key with k1 = 2, k2 = 3: take w, set v1 = w^3, v2 = w^2,
        // u = w^6, so v1^2 = v2^3 = u. Every expected value is computed by
        // repeated multiplication only.
        let w = hash_to_g1(b"test-linenc", b"vector");
        let v1 = slow_pow_g1(&w, 3);
        let v2 = slow_pow_g1(&w, 2);
        let u = slow_pow_g1(&w, 6);
        let pk = LinearPublicKey { v1, v2, u };
        let sk = LinearSecretKey {
            k1: Scalar::from_u64(2),
            k2: Scalar::from_u64(3),
        };
        assert!(sk.consistent_with(&pk));

        let msg = hash_to_g1(b"test-linenc", b"message");
        let r = EncRandomness {
            alpha: Scalar::ONE,
            beta: Scalar::ONE,
        };
        let ct = lin_enc_with_randomness(&pk, &msg, &r);
        // alpha = beta = 1: c1 = v1, c2 = v2, c3 = msg * u^2 = msg * w^12.
        assert_eq!(ct.c1, v1);
        assert_eq!(ct.c2, v2);
        assert_eq!(ct.c3, msg * slow_pow_g1(&w, 12));

        assert_eq!(lin_dec(&sk, &ct), msg);
        // Oracle decryption: c3 / (c1^2 * c2^3), repeated multiplication.
        let mask = slow_pow_g1(&ct.c1, 2) * slow_pow_g1(&ct.c2, 3);
        assert_eq!(ct.c3 * mask.inv(), msg);
    }

    #[test]
    fn ciphertext_codec_roundtrips_and_rejects() {
        let mut rng = rng(8);
        let (pk, _) = lin_keygen(&mut rng);
        let msg = hash_to_g1(b"test-linenc", b"m");
        let (ct, _) = lin_enc(&pk, &msg, &mut rng);
        let bytes = ct.to_bytes();
        assert_eq!(LinearCiphertext::from_bytes(&bytes), Ok(ct));
        assert!(LinearCiphertext::from_bytes(&bytes[1..]).is_err());
        let mut zeroed = bytes;
        zeroed[..G1_LEN].copy_from_slice(&[0u8; G1_LEN]);
        assert!(LinearCiphertext::from_bytes(&zeroed).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn decryption_inverts_encryption(seed in any::<u64>()) {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let (pk, sk) = lin_keygen(&mut rng);
            let msg = hash_to_g1(b"test-linenc", b"m").pow(&Scalar::random(&mut rng));
            let (ct, _) = lin_enc(&pk, &msg, &mut rng);
            prop_assert_eq!(lin_dec(&sk, &ct), msg);
        }
    }
}
