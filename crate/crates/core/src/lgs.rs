//! The six-algorithm protocol: Setup, the three-message Join, Sign, Verify,
//! Link, and Trace.
//!
//! Roles: the registration authority (RA) holds gamma and issues
//! certificates A = (g1 * Y^-1)^(1/(gamma+x)); the supervision authority
//! (SA) holds the linear decryption key and can trace; members hold
//! (A, x, y) and sign. A signature encrypts A as (l1, l2, l3), exposes the
//! link tag l4 = H0(amount)^x, and proves everything consistent in a
//! signature of knowledge over the message.
//!
//! Two signatures by the same member on the same amount share l4 and are
//! publicly linkable; across different amounts or members the tags are
//! unrelated.

use std::time::{SystemTime, UNIX_EPOCH};

use rand::{CryptoRng, RngCore};

use crate::groups::{
    hash_to_g1, pairing, DecodeError, G1Elem, G2Elem, Scalar, G1_LEN, G2_LEN, SCALAR_LEN,
};
use crate::linenc::{
    lin_dec, lin_enc, lin_keygen, LinearCiphertext, LinearPublicKey, LinearSecretKey,
};
use crate::registry::{RegistryEntry, RegistryError, RegistryStore};
use crate::sok::{
    dlog_prove, dlog_verify, membership_prove, membership_verify, DlogProof, MembershipProof,
    SokStatement, SokWitness,
};

/// Domain tag for the fixed generator g1.
const G1_TAG: &[u8] = b"LGS-GEN-G1-v1";
/// Domain tag for the fixed generator h.
const H_TAG: &[u8] = b"LGS-GEN-H-v1";
/// Domain tag for the per-amount link tag base u0 = H0(amount).
const H0_TAG: &[u8] = b"LGS-H0-v1";
/// Discrete-log proof context for enrollment.
const JOIN_CONTEXT: &[u8] = b"LGS-JOIN-v1";

/// Version byte carried by every wire format in this module.
const WIRE_VERSION: u8 = 1;

const MAGIC_LEN: usize = 4;
const HEADER_LEN: usize = MAGIC_LEN + 1;

#[derive(Debug, thiserror::Error)]
pub enum LgsError {
    #[error("unsupported security level: {0}")]
    UnsupportedSecurityLevel(u32),
    #[error("join request proof is invalid")]
    InvalidJoinProof,
    #[error("member already enrolled")]
    DuplicateMember,
    #[error("certificate check failed")]
    CertificateCheckFailed,
    #[error("signature is invalid")]
    SignatureInvalid,
    #[error("traced certificate not in registry")]
    MemberNotFound,
    #[error(transparent)]
    Registry(#[from] RegistryError),
}

/// Cipher suite identifier carried in serialized group parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Suite {
    /// BLS12-381; hashing to G1 per the standard simplified-SWU suite over
    /// SHA-256, scalars from SHA-512 wide reduction.
    Bls12381V1 = 1,
}

impl Suite {
    fn from_byte(b: u8) -> Result<Suite, DecodeError> {
        match b {
            1 => Ok(Suite::Bls12381V1),
            _ => Err(DecodeError::MalformedEncoding("unknown suite")),
        }
    }
}

/// The public tuple every party shares: fixed generators g1, h, the SA
/// encryption bases u, v1, v2, and the RA verification key omega = g2^gamma.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupParams {
    pub suite: Suite,
    pub g1: G1Elem,
    pub h: G1Elem,
    pub u: G1Elem,
    pub v1: G1Elem,
    pub v2: G1Elem,
    pub g2: G2Elem,
    pub omega: G2Elem,
}

/// Registration authority secret: omega = g2^gamma.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RaSecret {
    pub gamma: Scalar,
}

/// Supervision authority secret: the linear decryption key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SaSecret {
    pub linear: LinearSecretKey,
}

/// Membership certificate: A = (g1 * Y^-1)^(1/(gamma+x)).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cert {
    pub a: G1Elem,
    pub x: Scalar,
}

/// A member's full key: the certificate plus the self-chosen secret y,
/// together satisfying A^(gamma+x) * h^y = g1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MemberKey {
    pub cert: Cert,
    pub y: Scalar,
}

/// First Join message: Y = h^y plus a proof of knowledge of y.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JoinRequest {
    pub y_pub: G1Elem,
    pub proof: DlogProof,
}

/// A group signature: the linear encryption (l1, l2, l3) of the signer's
/// certificate, the link tag l4, and the membership proof.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    pub l1: G1Elem,
    pub l2: G1Elem,
    pub l3: G1Elem,
    pub l4: G1Elem,
    pub proof: MembershipProof,
}

/// A (message, amount, signature) triple as fed to [`link`].
#[derive(Debug, Clone, Copy)]
pub struct SignedMessage<'a> {
    pub message: &'a [u8],
    pub amount: &'a [u8],
    pub signature: &'a Signature,
}

/// Outcome of [`link`]: `Invalid` if either signature fails verification,
/// otherwise whether the two are by the same member on the same amount.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkResult {
    Linked,
    Unlinked,
    Invalid,
}

impl GroupParams {
    /// The SA encryption key embedded in the parameters.
    pub fn linear_pk(&self) -> LinearPublicKey {
        LinearPublicKey {
            v1: self.v1,
            v2: self.v2,
            u: self.u,
        }
    }

    fn sok_statement(&self, u0: G1Elem, sig: &Signature) -> SokStatement {
        SokStatement {
            g1: self.g1,
            h: self.h,
            u: self.u,
            v1: self.v1,
            v2: self.v2,
            g2: self.g2,
            omega: self.omega,
            u0,
            l1: sig.l1,
            l2: sig.l2,
            l3: sig.l3,
            l4: sig.l4,
        }
    }
}

impl RaSecret {
    /// Checks omega = g2^gamma against a parameter set.
    pub fn consistent_with(&self, gpk: &GroupParams) -> bool {
        gpk.g2.pow(&self.gamma) == gpk.omega
    }
}

impl SaSecret {
    /// Checks v1^k1 = v2^k2 = u against a parameter set.
    pub fn consistent_with(&self, gpk: &GroupParams) -> bool {
        self.linear.consistent_with(&gpk.linear_pk())
    }
}

/// The security level the compiled-in curve provides.
pub const SECURITY_LEVEL: u32 = 128;

/// Creates a group: fixed generators from their domain tags, a fresh RA key
/// gamma with omega = g2^gamma, and a fresh SA linear key giving u, v1, v2.
///
/// Only [`SECURITY_LEVEL`] is supported; the curve is fixed at compile
/// time.
pub fn setup<R: RngCore + CryptoRng>(
    security_level: u32,
    rng: &mut R,
) -> Result<(GroupParams, RaSecret, SaSecret), LgsError> {
    if security_level != SECURITY_LEVEL {
        return Err(LgsError::UnsupportedSecurityLevel(security_level));
    }
    let g1 = hash_to_g1(G1_TAG, b"");
    let h = hash_to_g1(H_TAG, b"");
    let g2 = G2Elem::generator();
    let gamma = Scalar::random_nonzero(rng);
    let omega = g2.pow(&gamma);
    let (lin_pk, lin_sk) = lin_keygen(rng);
    let gpk = GroupParams {
        suite: Suite::Bls12381V1,
        g1,
        h,
        u: lin_pk.u,
        v1: lin_pk.v1,
        v2: lin_pk.v2,
        g2,
        omega,
    };
    Ok((gpk, RaSecret { gamma }, SaSecret { linear: lin_sk }))
}

/// Member side, first Join message: picks the secret y and sends Y = h^y
/// with a proof of knowledge. The returned y never leaves the member.
pub fn join_user_start<R: RngCore + CryptoRng>(
    gpk: &GroupParams,
    rng: &mut R,
) -> (Scalar, JoinRequest) {
    let y = Scalar::random_nonzero(rng);
    let y_pub = gpk.h.pow(&y);
    let proof = dlog_prove(&gpk.h, &y_pub, &y, JOIN_CONTEXT, rng);
    (y, JoinRequest { y_pub, proof })
}

/// RA side, second Join message: verifies the request, picks a fresh x, and
/// issues A = (g1 * Y^-1)^(1/(gamma+x)), recording (A, x, Y) in the
/// registry.
///
/// x is resampled while gamma + x = 0 or x collides with an enrolled
/// member; a duplicate x would make two members share every link tag.
/// One certificate per Y: re-submission is refused.
pub fn join_ra_issue<R: RngCore + CryptoRng, S: RegistryStore>(
    gpk: &GroupParams,
    ra: &RaSecret,
    req: &JoinRequest,
    registry: &mut S,
    rng: &mut R,
) -> Result<Cert, LgsError> {
    if !dlog_verify(&gpk.h, &req.y_pub, &req.proof, JOIN_CONTEXT) {
        return Err(LgsError::InvalidJoinProof);
    }
    if registry.contains_y(&req.y_pub) {
        return Err(LgsError::DuplicateMember);
    }
    let (x, exponent) = loop {
        let x = Scalar::random_nonzero(rng);
        if registry.contains_x(&x) {
            continue;
        }
        if let Some(inv) = (ra.gamma + x).inverse() {
            break (x, inv);
        }
    };
    let a = (gpk.g1 * req.y_pub.inv()).pow(&exponent);
    let issued_at = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    match registry.append(&a, &x, &req.y_pub, issued_at) {
        Ok(_) => Ok(Cert { a, x }),
        Err(RegistryError::DuplicateY) => Err(LgsError::DuplicateMember),
        Err(e) => Err(e.into()),
    }
}

/// Member side, final Join step: accepts the certificate only if
/// e(A, omega * g2^x) = e(g1 * h^-y, g2), which is the credential identity
/// A^(gamma+x) * h^y = g1 moved under the pairing.
pub fn join_user_finish(gpk: &GroupParams, y: Scalar, cert: Cert) -> Result<MemberKey, LgsError> {
    let lhs = pairing(&cert.a, &(gpk.omega * gpk.g2.pow(&cert.x)));
    let rhs = pairing(&(gpk.g1 * gpk.h.pow(&(-y))), &gpk.g2);
    if lhs != rhs {
        return Err(LgsError::CertificateCheckFailed);
    }
    Ok(MemberKey { cert, y })
}

/// Signs `message` in the context of `amount`: encrypts the certificate as
/// (l1, l2, l3), computes the link tag l4 = H0(amount)^x, and proves the
/// whole statement over the message.
pub fn sign<R: RngCore + CryptoRng>(
    gpk: &GroupParams,
    mk: &MemberKey,
    message: &[u8],
    amount: &[u8],
    rng: &mut R,
) -> Signature {
    let u0 = hash_to_g1(H0_TAG, amount);
    let (ct, r) = lin_enc(&gpk.linear_pk(), &mk.cert.a, rng);
    let mut sig = Signature {
        l1: ct.c1,
        l2: ct.c2,
        l3: ct.c3,
        l4: u0.pow(&mk.cert.x),
        proof: MembershipProof {
            c: Scalar::ZERO,
            z_alpha: Scalar::ZERO,
            z_beta: Scalar::ZERO,
            z_x: Scalar::ZERO,
            z_y: Scalar::ZERO,
            z_delta1: Scalar::ZERO,
            z_delta2: Scalar::ZERO,
        },
    };
    let wit = SokWitness {
        alpha: r.alpha,
        beta: r.beta,
        x: mk.cert.x,
        y: mk.y,
        delta1: mk.cert.x * r.alpha,
        delta2: mk.cert.x * r.beta,
    };
    sig.proof = membership_prove(&gpk.sok_statement(u0, &sig), &wit, message, rng)
        .expect("witness is consistent by construction");
    sig
}

/// Accepts iff the membership proof verifies for (message, amount, l1..l4)
/// under these parameters.
pub fn verify(gpk: &GroupParams, message: &[u8], amount: &[u8], sig: &Signature) -> bool {
    let u0 = hash_to_g1(H0_TAG, amount);
    membership_verify(&gpk.sok_statement(u0, sig), message, &sig.proof)
}

/// Publicly decides whether two signatures were made by the same member on
/// the same amount. Tags under different amounts are incomparable, so
/// distinct amounts are `Unlinked` without a tag comparison.
pub fn link(gpk: &GroupParams, a: &SignedMessage, b: &SignedMessage) -> LinkResult {
    if !verify(gpk, a.message, a.amount, a.signature)
        || !verify(gpk, b.message, b.amount, b.signature)
    {
        return LinkResult::Invalid;
    }
    if a.amount == b.amount && a.signature.l4 == b.signature.l4 {
        LinkResult::Linked
    } else {
        LinkResult::Unlinked
    }
}

/// SA-only: decrypts the certificate escrowed in a valid signature and
/// returns the signer's registration row. Refuses invalid signatures rather
/// than decrypting garbage; a valid signature whose certificate is unknown
/// signals a foreign group or a soundness break.
pub fn trace<S: RegistryStore>(
    gpk: &GroupParams,
    sa: &SaSecret,
    message: &[u8],
    amount: &[u8],
    sig: &Signature,
    registry: &S,
) -> Result<RegistryEntry, LgsError> {
    if !verify(gpk, message, amount, sig) {
        return Err(LgsError::SignatureInvalid);
    }
    let ct = LinearCiphertext {
        c1: sig.l1,
        c2: sig.l2,
        c3: sig.l3,
    };
    let a = lin_dec(&sa.linear, &ct);
    registry
        .lookup_by_a(&a)
        .cloned()
        .ok_or(LgsError::MemberNotFound)
}

/// Checks magic, version, and total length; returns the payload.
fn check_frame<'a>(
    bytes: &'a [u8],
    magic: &[u8; MAGIC_LEN],
    payload_len: usize,
) -> Result<&'a [u8], DecodeError> {
    if bytes.len() != HEADER_LEN + payload_len {
        return Err(DecodeError::MalformedEncoding("frame length"));
    }
    if &bytes[..MAGIC_LEN] != magic {
        return Err(DecodeError::MalformedEncoding("magic mismatch"));
    }
    if bytes[MAGIC_LEN] != WIRE_VERSION {
        return Err(DecodeError::MalformedEncoding("unsupported version"));
    }
    Ok(&bytes[HEADER_LEN..])
}

fn frame(magic: &[u8; MAGIC_LEN], payload_len: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + payload_len);
    out.extend_from_slice(magic);
    out.push(WIRE_VERSION);
    out
}

impl GroupParams {
    pub const MAGIC: &'static [u8; MAGIC_LEN] = b"LGSG";
    /// suite (1) || g1 h u v1 v2 (5 x 48) || g2 omega (2 x 96).
    pub const LEN: usize = HEADER_LEN + 1 + 5 * G1_LEN + 2 * G2_LEN;

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = frame(Self::MAGIC, Self::LEN - HEADER_LEN);
        out.push(self.suite as u8);
        for elem in [&self.g1, &self.h, &self.u, &self.v1, &self.v2] {
            out.extend_from_slice(&elem.to_bytes());
        }
        out.extend_from_slice(&self.g2.to_bytes());
        out.extend_from_slice(&self.omega.to_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<GroupParams, DecodeError> {
        let p = check_frame(bytes, Self::MAGIC, Self::LEN - HEADER_LEN)?;
        let suite = Suite::from_byte(p[0])?;
        let g1_at = |i: usize| G1Elem::from_bytes(&p[1 + i * G1_LEN..1 + (i + 1) * G1_LEN]);
        let g2_start = 1 + 5 * G1_LEN;
        let gpk = GroupParams {
            suite,
            g1: g1_at(0)?,
            h: g1_at(1)?,
            u: g1_at(2)?,
            v1: g1_at(3)?,
            v2: g1_at(4)?,
            g2: G2Elem::from_bytes(&p[g2_start..g2_start + G2_LEN])?,
            omega: G2Elem::from_bytes(&p[g2_start + G2_LEN..])?,
        };
        let bases = [&gpk.g1, &gpk.h, &gpk.u, &gpk.v1, &gpk.v2];
        if bases.iter().any(|e| e.is_identity()) || gpk.g2.is_identity() || gpk.omega.is_identity()
        {
            return Err(DecodeError::MalformedEncoding("identity generator"));
        }
        Ok(gpk)
    }
}

impl RaSecret {
    pub const MAGIC: &'static [u8; MAGIC_LEN] = b"LGSR";
    pub const LEN: usize = HEADER_LEN + SCALAR_LEN;

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = frame(Self::MAGIC, SCALAR_LEN);
        out.extend_from_slice(&self.gamma.to_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<RaSecret, DecodeError> {
        let p = check_frame(bytes, Self::MAGIC, SCALAR_LEN)?;
        Ok(RaSecret {
            gamma: Scalar::from_bytes(p)?,
        })
    }
}

impl SaSecret {
    pub const MAGIC: &'static [u8; MAGIC_LEN] = b"LGSS";
    pub const LEN: usize = HEADER_LEN + 2 * SCALAR_LEN;

    /// k1 || k2.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = frame(Self::MAGIC, 2 * SCALAR_LEN);
        out.extend_from_slice(&self.linear.k1.to_bytes());
        out.extend_from_slice(&self.linear.k2.to_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<SaSecret, DecodeError> {
        let p = check_frame(bytes, Self::MAGIC, 2 * SCALAR_LEN)?;
        Ok(SaSecret {
            linear: LinearSecretKey {
                k1: Scalar::from_bytes(&p[..SCALAR_LEN])?,
                k2: Scalar::from_bytes(&p[SCALAR_LEN..])?,
            },
        })
    }
}

impl Cert {
    pub const MAGIC: &'static [u8; MAGIC_LEN] = b"LGSC";
    pub const LEN: usize = HEADER_LEN + G1_LEN + SCALAR_LEN;

    /// A || x.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = frame(Self::MAGIC, G1_LEN + SCALAR_LEN);
        out.extend_from_slice(&self.a.to_bytes());
        out.extend_from_slice(&self.x.to_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Cert, DecodeError> {
        let p = check_frame(bytes, Self::MAGIC, G1_LEN + SCALAR_LEN)?;
        Ok(Cert {
            a: G1Elem::from_bytes(&p[..G1_LEN])?,
            x: Scalar::from_bytes(&p[G1_LEN..])?,
        })
    }
}

impl MemberKey {
    pub const MAGIC: &'static [u8; MAGIC_LEN] = b"LGSM";
    pub const LEN: usize = HEADER_LEN + G1_LEN + 2 * SCALAR_LEN;

    /// A || x || y.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = frame(Self::MAGIC, G1_LEN + 2 * SCALAR_LEN);
        out.extend_from_slice(&self.cert.a.to_bytes());
        out.extend_from_slice(&self.cert.x.to_bytes());
        out.extend_from_slice(&self.y.to_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<MemberKey, DecodeError> {
        let p = check_frame(bytes, Self::MAGIC, G1_LEN + 2 * SCALAR_LEN)?;
        Ok(MemberKey {
            cert: Cert {
                a: G1Elem::from_bytes(&p[..G1_LEN])?,
                x: Scalar::from_bytes(&p[G1_LEN..G1_LEN + SCALAR_LEN])?,
            },
            y: Scalar::from_bytes(&p[G1_LEN + SCALAR_LEN..])?,
        })
    }
}

impl JoinRequest {
    pub const MAGIC: &'static [u8; MAGIC_LEN] = b"LGSJ";
    pub const LEN: usize = HEADER_LEN + G1_LEN + DlogProof::LEN;

    /// Y || proof.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = frame(Self::MAGIC, G1_LEN + DlogProof::LEN);
        out.extend_from_slice(&self.y_pub.to_bytes());
        out.extend_from_slice(&self.proof.to_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<JoinRequest, DecodeError> {
        let p = check_frame(bytes, Self::MAGIC, G1_LEN + DlogProof::LEN)?;
        Ok(JoinRequest {
            y_pub: G1Elem::from_bytes(&p[..G1_LEN])?,
            proof: DlogProof::from_bytes(&p[G1_LEN..])?,
        })
    }
}

/// Wraps the member's enrollment secret y for storage between the request
/// and finish steps of Join.
pub fn encode_enrollment_secret(y: &Scalar) -> Vec<u8> {
    let mut out = frame(b"LGSP", SCALAR_LEN);
    out.extend_from_slice(&y.to_bytes());
    out
}

/// Inverse of [`encode_enrollment_secret`].
pub fn decode_enrollment_secret(bytes: &[u8]) -> Result<Scalar, DecodeError> {
    let p = check_frame(bytes, b"LGSP", SCALAR_LEN)?;
    Scalar::from_bytes(p)
}

impl Signature {
    pub const MAGIC: &'static [u8; MAGIC_LEN] = b"LGS1";
    pub const LEN: usize = HEADER_LEN + 4 * G1_LEN + MembershipProof::LEN;

    /// l1 || l2 || l3 || l4 || proof.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = frame(Self::MAGIC, 4 * G1_LEN + MembershipProof::LEN);
        for elem in [&self.l1, &self.l2, &self.l3, &self.l4] {
            out.extend_from_slice(&elem.to_bytes());
        }
        out.extend_from_slice(&self.proof.to_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Signature, DecodeError> {
        let p = check_frame(bytes, Self::MAGIC, 4 * G1_LEN + MembershipProof::LEN)?;
        let l_at = |i: usize| G1Elem::from_bytes(&p[i * G1_LEN..(i + 1) * G1_LEN]);
        Ok(Signature {
            l1: l_at(0)?,
            l2: l_at(1)?,
            l3: l_at(2)?,
            l4: l_at(3)?,
            proof: MembershipProof::from_bytes(&p[4 * G1_LEN..])?,
        })
    }
}
