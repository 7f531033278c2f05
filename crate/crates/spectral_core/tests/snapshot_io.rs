//! Snapshot read/write roundtrips and format validation.

mod common;

use common::seeded_samples;
use spectral_core::{forward_transform, read_snapshot, write_snapshot, SpectralError};

#[test]
fn roundtrip_is_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("state.bin");
    let n = 8;
    let a = forward_transform(&seeded_samples(n, 1), n).unwrap();
    let b = forward_transform(&seeded_samples(n, 2), n).unwrap();
    let meta = serde_json::json!({ "t": 0.25, "kind": "test" });
    write_snapshot(&path, &[&a, &b], &meta).unwrap();

    let (fields, sidecar) = read_snapshot(&path).unwrap();
    assert_eq!(fields.len(), 2);
    assert_eq!(fields[0].coeffs(), a.coeffs());
    assert_eq!(fields[1].coeffs(), b.coeffs());
    assert_eq!(sidecar["n"], 8);
    assert_eq!(sidecar["components"], 2);
    assert_eq!(sidecar["meta"]["t"], 0.25);
}

#[test]
fn rejects_bad_magic() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("state.bin");
    let n = 4;
    let a = forward_transform(&seeded_samples(n, 3), n).unwrap();
    write_snapshot(&path, &[&a], &serde_json::Value::Null).unwrap();

    let mut bytes = std::fs::read(&path).unwrap();
    bytes[0] ^= 0xff;
    std::fs::write(&path, &bytes).unwrap();
    assert!(matches!(
        read_snapshot(&path),
        Err(SpectralError::BadSnapshot(_))
    ));
}

#[test]
fn rejects_truncated_and_padded_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("state.bin");
    let n = 4;
    let a = forward_transform(&seeded_samples(n, 4), n).unwrap();
    write_snapshot(&path, &[&a], &serde_json::Value::Null).unwrap();

    let bytes = std::fs::read(&path).unwrap();
    std::fs::write(&path, &bytes[..bytes.len() - 8]).unwrap();
    assert!(read_snapshot(&path).is_err());

    let mut padded = bytes.clone();
    padded.extend_from_slice(&[0u8; 4]);
    std::fs::write(&path, &padded).unwrap();
    assert!(matches!(
        read_snapshot(&path),
        Err(SpectralError::BadSnapshot(_))
    ));
}

#[test]
fn rejects_mixed_grids() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("state.bin");
    let a = forward_transform(&seeded_samples(4, 5), 4).unwrap();
    let b = forward_transform(&seeded_samples(6, 6), 6).unwrap();
    assert!(matches!(
        write_snapshot(&path, &[&a, &b], &serde_json::Value::Null),
        Err(SpectralError::GridMismatch { .. })
    ));
}
