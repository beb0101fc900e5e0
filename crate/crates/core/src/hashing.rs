//! Content hashes of instance files.

use sha2::{Digest, Sha256};

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Hash of the compact serialization of a JSON value. Object keys are sorted by serde_json's map,
/// so formatting differences in the source file do not change the hash.
pub fn json_hash(v: &serde_json::Value) -> String {
    sha256_hex(serde_json::to_string(v).expect("json value serializes").as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_digest() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn formatting_independent() {
        let a: serde_json::Value = serde_json::from_str(r#"{"b":1,"a":[1,2]}"#).unwrap();
        let b: serde_json::Value = serde_json::from_str("{ \"a\": [1, 2],\n \"b\": 1 }").unwrap();
        assert_eq!(json_hash(&a), json_hash(&b));
    }
}
