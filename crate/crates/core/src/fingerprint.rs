//! Stable digests of canonical (JSON) serialisations.

use serde::Serialize;
use sha2::{Digest, Sha256};

/// First 16 hex digits of the SHA-256 of the canonical JSON encoding of `value`.
pub fn digest<S: Serialize + ?Sized>(value: &S) -> String {
    let canonical = serde_json::to_vec(value).expect("in-memory serialisation cannot fail");
    digest_bytes(&canonical)
}

pub fn digest_bytes(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .take(8)
        .map(|b| format!("{b:02x}"))
        .collect()
}
