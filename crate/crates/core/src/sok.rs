//! Non-interactive zero-knowledge proofs via Fiat-Shamir: the Schnorr
//! discrete-log proof used during enrollment, and the six-relation
//! membership signature of knowledge inside every group signature.
//!
//! The membership proof shows knowledge of (alpha, beta, x, y, delta1,
//! delta2) with delta1 = x*alpha, delta2 = x*beta such that
//!
//!   l1 = v1^alpha            l2 = v2^beta
//!   1  = l1^x * v1^-delta1   1  = l2^x * v2^-delta2
//!   l4 = u0^x
//!   e(g1,g2) / e(l3,omega)
//!      = e(u,omega)^(-alpha-beta) * e(l3,g2)^x * e(u,g2)^(-delta1-delta2) * e(h,g2)^y
//!
//! which together say: (l1,l2,l3) is a linear encryption, under randomness
//! (alpha,beta), of a certificate A satisfying A^(gamma+x) * h^y = g1, and
//! l4 is that same x applied to the tag base u0.

use rand::{CryptoRng, RngCore};

use crate::groups::{
    hash_to_scalar, pairing, DecodeError, G1Elem, G2Elem, GtElem, Scalar, SCALAR_LEN,
};

/// Challenge domain tag for the membership signature of knowledge.
const SOK_TAG: &[u8] = b"LGS-SOK-v1";
/// Challenge domain tag for the enrollment discrete-log proof.
const DLOG_TAG: &[u8] = b"LGS-DLOG-v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum SokError {
    /// The supplied witness does not satisfy the statement's relations.
    #[error("witness inconsistent with statement")]
    WitnessMismatch,
}

/// Schnorr proof of knowledge of y with Y = base^y.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DlogProof {
    pub c: Scalar,
    pub z: Scalar,
}

impl DlogProof {
    pub const LEN: usize = 2 * SCALAR_LEN;

    /// c || z.
    pub fn to_bytes(&self) -> [u8; Self::LEN] {
        let mut out = [0u8; Self::LEN];
        out[..SCALAR_LEN].copy_from_slice(&self.c.to_bytes());
        out[SCALAR_LEN..].copy_from_slice(&self.z.to_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<DlogProof, DecodeError> {
        if bytes.len() != Self::LEN {
            return Err(DecodeError::MalformedEncoding("dlog proof length"));
        }
        Ok(DlogProof {
            c: Scalar::from_bytes(&bytes[..SCALAR_LEN])?,
            z: Scalar::from_bytes(&bytes[SCALAR_LEN..])?,
        })
    }
}

/// The membership proof (c, z_alpha, z_beta, z_x, z_y, z_delta1, z_delta2).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MembershipProof {
    pub c: Scalar,
    pub z_alpha: Scalar,
    pub z_beta: Scalar,
    pub z_x: Scalar,
    pub z_y: Scalar,
    pub z_delta1: Scalar,
    pub z_delta2: Scalar,
}

impl MembershipProof {
    pub const LEN: usize = 7 * SCALAR_LEN;

    /// c || z_alpha || z_beta || z_x || z_y || z_delta1 || z_delta2.
    pub fn to_bytes(&self) -> [u8; Self::LEN] {
        let mut out = [0u8; Self::LEN];
        for (i, s) in [
            self.c,
            self.z_alpha,
            self.z_beta,
            self.z_x,
            self.z_y,
            self.z_delta1,
            self.z_delta2,
        ]
        .iter()
        .enumerate()
        {
            out[i * SCALAR_LEN..(i + 1) * SCALAR_LEN].copy_from_slice(&s.to_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<MembershipProof, DecodeError> {
        if bytes.len() != Self::LEN {
            return Err(DecodeError::MalformedEncoding("membership proof length"));
        }
        let s = |i: usize| Scalar::from_bytes(&bytes[i * SCALAR_LEN..(i + 1) * SCALAR_LEN]);
        Ok(MembershipProof {
            c: s(0)?,
            z_alpha: s(1)?,
            z_beta: s(2)?,
            z_x: s(3)?,
            z_y: s(4)?,
            z_delta1: s(5)?,
            z_delta2: s(6)?,
        })
    }
}

/// Public side of the membership relation: the shared group bases, the tag
/// base u0 derived from the amount, and the signature components l1..l4.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SokStatement {
    pub g1: G1Elem,
    pub h: G1Elem,
    pub u: G1Elem,
    pub v1: G1Elem,
    pub v2: G1Elem,
    pub g2: G2Elem,
    pub omega: G2Elem,
    pub u0: G1Elem,
    pub l1: G1Elem,
    pub l2: G1Elem,
    pub l3: G1Elem,
    pub l4: G1Elem,
}

/// Secret side of the membership relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SokWitness {
    pub alpha: Scalar,
    pub beta: Scalar,
    pub x: Scalar,
    pub y: Scalar,
    pub delta1: Scalar,
    pub delta2: Scalar,
}

impl SokWitness {
    /// The checkable part of the witness invariants: the delta products and
    /// the exponent relations for l1, l2, l4.
    fn satisfies(&self, stmt: &SokStatement) -> bool {
        self.delta1 == self.x * self.alpha
            && self.delta2 == self.x * self.beta
            && stmt.l1 == stmt.v1.pow(&self.alpha)
            && stmt.l2 == stmt.v2.pow(&self.beta)
            && stmt.l4 == stmt.u0.pow(&self.x)
    }
}

/// Prover commitments (a1..a6); also the verifier's recomputed values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Commitments {
    pub a1: G1Elem,
    pub a2: G1Elem,
    pub a3: GtElem,
    pub a4: G1Elem,
    pub a5: G1Elem,
    pub a6: G1Elem,
}

fn dlog_challenge(base: &G1Elem, y_pub: &G1Elem, a: &G1Elem, context: &[u8]) -> Scalar {
    let mut input = Vec::with_capacity(8 + context.len() + 3 * 48);
    input.extend_from_slice(&(context.len() as u64).to_be_bytes());
    input.extend_from_slice(context);
    input.extend_from_slice(&base.to_bytes());
    input.extend_from_slice(&y_pub.to_bytes());
    input.extend_from_slice(&a.to_bytes());
    hash_to_scalar(DLOG_TAG, &input)
}

/// Schnorr prove for Y = base^y. The context string separates uses (for
/// example enrollment) so a proof cannot be replayed elsewhere.
pub fn dlog_prove<R: RngCore + CryptoRng>(
    base: &G1Elem,
    y_pub: &G1Elem,
    y: &Scalar,
    context: &[u8],
    rng: &mut R,
) -> DlogProof {
    let r = Scalar::random(rng);
    let a = base.pow(&r);
    let c = dlog_challenge(base, y_pub, &a, context);
    DlogProof { c, z: r - c * *y }
}

/// Accepts iff the proof demonstrates knowledge of y with Y = base^y under
/// the same context.
pub fn dlog_verify(base: &G1Elem, y_pub: &G1Elem, proof: &DlogProof, context: &[u8]) -> bool {
    let a = base.pow(&proof.z) * y_pub.pow(&proof.c);
    dlog_challenge(base, y_pub, &a, context) == proof.c
}

/// Canonical challenge transcript: tag, 8-byte big-endian message length,
/// message, then l1..l4 and a1..a6 in fixed-width encodings.
fn sok_challenge(stmt: &SokStatement, message: &[u8], a: &Commitments) -> Scalar {
    let mut input = Vec::with_capacity(8 + message.len() + 9 * 48 + 576);
    input.extend_from_slice(&(message.len() as u64).to_be_bytes());
    input.extend_from_slice(message);
    for elem in [&stmt.l1, &stmt.l2, &stmt.l3, &stmt.l4, &a.a1, &a.a2] {
        input.extend_from_slice(&elem.to_bytes());
    }
    input.extend_from_slice(&a.a3.to_bytes());
    for elem in [&a.a4, &a.a5, &a.a6] {
        input.extend_from_slice(&elem.to_bytes());
    }
    hash_to_scalar(SOK_TAG, &input)
}

/// Proves the membership relation over `message` with fresh random nonces.
pub fn membership_prove<R: RngCore + CryptoRng>(
    stmt: &SokStatement,
    wit: &SokWitness,
    message: &[u8],
    rng: &mut R,
) -> Result<MembershipProof, SokError> {
    membership_prove_with_commitments(stmt, wit, message, rng).map(|(proof, _)| proof)
}

/// Like [`membership_prove`] but also returns the prover's commitments, so
/// tests can compare them against the verifier's recomputation.
pub fn membership_prove_with_commitments<R: RngCore + CryptoRng>(
    stmt: &SokStatement,
    wit: &SokWitness,
    message: &[u8],
    rng: &mut R,
) -> Result<(MembershipProof, Commitments), SokError> {
    if !wit.satisfies(stmt) {
        return Err(SokError::WitnessMismatch);
    }
    let r_alpha = Scalar::random(rng);
    let r_beta = Scalar::random(rng);
    let r_x = Scalar::random(rng);
    let r_y = Scalar::random(rng);
    let r_delta1 = Scalar::random(rng);
    let r_delta2 = Scalar::random(rng);

    let a = Commitments {
        a1: stmt.v1.pow(&r_alpha),
        a2: stmt.v2.pow(&r_beta),
        a3: pairing(&stmt.u, &stmt.omega).pow(&-(r_alpha + r_beta))
            * pairing(&stmt.l3, &stmt.g2).pow(&r_x)
            * pairing(&stmt.u, &stmt.g2).pow(&-(r_delta1 + r_delta2))
            * pairing(&stmt.h, &stmt.g2).pow(&r_y),
        a4: stmt.l1.pow(&r_x) * stmt.v1.pow(&-r_delta1),
        a5: stmt.l2.pow(&r_x) * stmt.v2.pow(&-r_delta2),
        a6: stmt.u0.pow(&r_x),
    };
    let c = sok_challenge(stmt, message, &a);
    let proof = MembershipProof {
        c,
        z_alpha: r_alpha - c * wit.alpha,
        z_beta: r_beta - c * wit.beta,
        z_x: r_x - c * wit.x,
        z_y: r_y - c * wit.y,
        z_delta1: r_delta1 - c * wit.delta1,
        z_delta2: r_delta2 - c * wit.delta2,
    };
    Ok((proof, a))
}

/// The verifier's recomputation of the commitments from responses and
/// challenge. For an honest transcript this equals the prover's a1..a6.
pub fn membership_recompute(stmt: &SokStatement, proof: &MembershipProof) -> Commitments {
    let c = proof.c;
    Commitments {
        a1: stmt.v1.pow(&proof.z_alpha) * stmt.l1.pow(&c),
        a2: stmt.v2.pow(&proof.z_beta) * stmt.l2.pow(&c),
        a3: pairing(&stmt.u, &stmt.omega).pow(&-(proof.z_alpha + proof.z_beta))
            * pairing(&stmt.l3, &stmt.g2).pow(&proof.z_x)
            * pairing(&stmt.u, &stmt.g2).pow(&-(proof.z_delta1 + proof.z_delta2))
            * pairing(&stmt.h, &stmt.g2).pow(&proof.z_y)
            * (pairing(&stmt.g1, &stmt.g2) * pairing(&stmt.l3, &stmt.omega).inv()).pow(&c),
        a4: stmt.l1.pow(&proof.z_x) * stmt.v1.pow(&-proof.z_delta1),
        a5: stmt.l2.pow(&proof.z_x) * stmt.v2.pow(&-proof.z_delta2),
        a6: stmt.u0.pow(&proof.z_x) * stmt.l4.pow(&c),
    }
}

/// Accepts iff the challenge recomputed from the proof matches, binding the
/// message, the signature components, and every statement base.
pub fn membership_verify(stmt: &SokStatement, message: &[u8], proof: &MembershipProof) -> bool {
    let a = membership_recompute(stmt, proof);
    sok_challenge(stmt, message, &a) == proof.c
}
