//! Multi-member protocol runs against the public API, with the registry on
//! disk and every artifact passed between roles as bytes.

use rand::{CryptoRng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use lgs_core::lgs::{
    self, join_ra_issue, join_user_finish, join_user_start, setup, Cert, GroupParams, JoinRequest,
    LgsError, LinkResult, MemberKey, RaSecret, SaSecret, Signature, SignedMessage, SECURITY_LEVEL,
};
use lgs_core::registry::{FileRegistry, RegistryStore};

fn enroll<R: RngCore + CryptoRng, S: RegistryStore>(
    gpk: &GroupParams,
    ra: &RaSecret,
    registry: &mut S,
    rng: &mut R,
) -> MemberKey {
    let (y, req) = join_user_start(gpk, rng);
    let cert = join_ra_issue(gpk, ra, &req, registry, rng).unwrap();
    join_user_finish(gpk, y, cert).unwrap()
}

#[test]
fn protocol_runs_end_to_end_over_a_file_registry() {
    let mut rng = ChaCha20Rng::seed_from_u64(101);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("registry.bin");

    let (gpk, ra, sa) = setup(SECURITY_LEVEL, &mut rng).unwrap();
    let mut registry = FileRegistry::create(&path).unwrap();
    let members: Vec<MemberKey> = (0..3)
        .map(|_| enroll(&gpk, &ra, &mut registry, &mut rng))
        .collect();

    let sigs: Vec<Signature> = members
        .iter()
        .map(|mk| lgs::sign(&gpk, mk, b"pay the vendor", b"250", &mut rng))
        .collect();
    for sig in &sigs {
        assert!(lgs::verify(&gpk, b"pay the vendor", b"250", sig));
    }

    // Different members on the same amount stay unlinked.
    assert_eq!(
        lgs::link(
            &gpk,
            &SignedMessage {
                message: b"pay the vendor",
                amount: b"250",
                signature: &sigs[0],
            },
            &SignedMessage {
                message: b"pay the vendor",
                amount: b"250",
                signature: &sigs[1],
            },
        ),
        LinkResult::Unlinked
    );

    for (i, sig) in sigs.iter().enumerate() {
        let row = lgs::trace(&gpk, &sa, b"pay the vendor", b"250", sig, &registry).unwrap();
        assert_eq!(row.index, i as u64 + 1);
    }

    // The registry read back from disk traces identically.
    drop(registry);
    let reopened = FileRegistry::open(&path).unwrap();
    let row = lgs::trace(&gpk, &sa, b"pay the vendor", b"250", &sigs[2], &reopened).unwrap();
    assert_eq!(row.index, 3);
    assert_eq!(row.a, members[2].cert.a);
}

#[test]
fn artifacts_survive_wire_transport_between_roles() {
    let mut rng = ChaCha20Rng::seed_from_u64(102);
    let dir = tempfile::tempdir().unwrap();
    let mut registry = FileRegistry::create(dir.path().join("registry.bin")).unwrap();

    // Every hand-off below goes through bytes, as the file-based roles do.
    let (gpk, ra, sa) = setup(SECURITY_LEVEL, &mut rng).unwrap();
    let gpk = GroupParams::from_bytes(&gpk.to_bytes()).unwrap();
    let ra = RaSecret::from_bytes(&ra.to_bytes()).unwrap();
    let sa = SaSecret::from_bytes(&sa.to_bytes()).unwrap();

    let (y, req) = join_user_start(&gpk, &mut rng);
    let req = JoinRequest::from_bytes(&req.to_bytes()).unwrap();
    let cert = join_ra_issue(&gpk, &ra, &req, &mut registry, &mut rng).unwrap();
    let cert = Cert::from_bytes(&cert.to_bytes()).unwrap();
    let member = join_user_finish(&gpk, y, cert).unwrap();
    let member = MemberKey::from_bytes(&member.to_bytes()).unwrap();

    let sig = lgs::sign(&gpk, &member, b"wire", b"1", &mut rng);
    let sig = Signature::from_bytes(&sig.to_bytes()).unwrap();
    assert!(lgs::verify(&gpk, b"wire", b"1", &sig));
    let row = lgs::trace(&gpk, &sa, b"wire", b"1", &sig, &registry).unwrap();
    assert_eq!(row.index, 1);
}

#[test]
fn foreign_group_signatures_are_rejected() {
    let mut rng = ChaCha20Rng::seed_from_u64(103);
    let dir = tempfile::tempdir().unwrap();

    let (gpk_a, ra_a, _) = setup(SECURITY_LEVEL, &mut rng).unwrap();
    let (gpk_b, ra_b, _) = setup(SECURITY_LEVEL, &mut rng).unwrap();
    let mut reg_a = FileRegistry::create(dir.path().join("a.bin")).unwrap();
    let mut reg_b = FileRegistry::create(dir.path().join("b.bin")).unwrap();
    let _member_a = enroll(&gpk_a, &ra_a, &mut reg_a, &mut rng);
    let member_b = enroll(&gpk_b, &ra_b, &mut reg_b, &mut rng);

    let sig = lgs::sign(&gpk_b, &member_b, b"m", b"1", &mut rng);
    assert!(lgs::verify(&gpk_b, b"m", b"1", &sig));
    assert!(!lgs::verify(&gpk_a, b"m", b"1", &sig));

    // A certificate from group B fails the member-side check in group A.
    let (y, req) = join_user_start(&gpk_a, &mut rng);
    let cert = join_ra_issue(&gpk_b, &ra_b, &req, &mut reg_b, &mut rng).unwrap();
    assert!(matches!(
        join_user_finish(&gpk_a, y, cert),
        Err(LgsError::CertificateCheckFailed)
    ));
}

#[test]
fn replayed_join_requests_are_refused() {
    let mut rng = ChaCha20Rng::seed_from_u64(104);
    let dir = tempfile::tempdir().unwrap();
    let (gpk, ra, _) = setup(SECURITY_LEVEL, &mut rng).unwrap();
    let mut registry = FileRegistry::create(dir.path().join("registry.bin")).unwrap();

    let (_, req) = join_user_start(&gpk, &mut rng);
    join_ra_issue(&gpk, &ra, &req, &mut registry, &mut rng).unwrap();
    assert!(matches!(
        join_ra_issue(&gpk, &ra, &req, &mut registry, &mut rng),
        Err(LgsError::DuplicateMember)
    ));
    assert_eq!(registry.entries().len(), 1);
}
