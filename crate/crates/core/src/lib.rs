//! Linkable group signatures over a pairing-friendly curve.
//!
//! A registration authority enrolls members and can be audited through its
//! registration list, members sign anonymously, anyone can verify and can
//! link two signatures made by the same member on the same amount, and a
//! supervision authority can trace a valid signature back to the signer's
//! registration row.
//!
//! Layering, bottom up: [`groups`] wraps the curve backend, [`linenc`] is
//! the linear encryption used as the tracing escrow, [`sok`] holds the
//! Fiat-Shamir proofs, [`lgs`] composes them into the six-algorithm
//! protocol, [`registry`] stores enrollment rows, and [`bench`] measures
//! the protocol algorithms.

pub mod bench;
pub mod groups;
pub mod lgs;
pub mod linenc;
pub mod registry;
pub mod sok;

#[cfg(test)]
pub(crate) mod testutil;

pub use bench::{run_bench, BenchConfig, BenchReport, BenchRow};
pub use groups::{pairing, G1Elem, G2Elem, GtElem, Scalar};
pub use lgs::{
    link, setup, sign, trace, verify, Cert, GroupParams, JoinRequest, LgsError, LinkResult,
    MemberKey, RaSecret, SaSecret, Signature, SignedMessage, Suite,
};
pub use linenc::{LinearCiphertext, LinearPublicKey, LinearSecretKey};
pub use registry::{FileRegistry, InMemoryRegistry, RegistryEntry, RegistryError, RegistryStore};
pub use sok::{DlogProof, MembershipProof};
