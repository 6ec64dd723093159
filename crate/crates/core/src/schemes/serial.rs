//! Bit-exact serialization of big integers, keys and ciphertexts.
//!
//! Every integer is written as a 4-byte big-endian length followed by the
//! big-endian magnitude (zero has length 0), hex encoded. Envelopes carry a
//! top-level `version` so files can be migrated.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::SchemeId;
use crate::error::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;

pub fn encode_part(value: &BigUint) -> String {
    let body = if value == &BigUint::default() {
        Vec::new()
    } else {
        value.to_bytes_be()
    };
    let mut out = Vec::with_capacity(4 + body.len());
    out.extend_from_slice(&(body.len() as u32).to_be_bytes());
    out.extend_from_slice(&body);
    hex::encode(out)
}

pub fn decode_part(text: &str) -> Result<BigUint> {
    let bytes = hex::decode(text).map_err(|e| Error::Decode(format!("bad hex: {e}")))?;
    if bytes.len() < 4 {
        return Err(Error::Decode("part shorter than its length prefix".into()));
    }
    let (prefix, body) = bytes.split_at(4);
    let len = u32::from_be_bytes(prefix.try_into().expect("4 bytes")) as usize;
    if len != body.len() {
        return Err(Error::Decode(format!(
            "length prefix {len} does not match body of {} bytes",
            body.len()
        )));
    }
    if body.first() == Some(&0) {
        return Err(Error::Decode("non-canonical leading zero byte".into()));
    }
    Ok(BigUint::from_bytes_be(body))
}

pub fn encode_parts(values: &[BigUint]) -> Vec<String> {
    values.iter().map(encode_part).collect()
}

pub fn decode_parts(texts: &[String]) -> Result<Vec<BigUint>> {
    texts.iter().map(|t| decode_part(t)).collect()
}

/// What an [`Envelope`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnvelopeKind {
    PublicKey,
    Ciphertext,
}

/// Versioned JSON wrapper for a public key or a single ciphertext.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Envelope {
    pub version: u32,
    pub kind: EnvelopeKind,
    pub scheme_id: SchemeId,
    pub lambda: u32,
    pub parts: Vec<String>,
}

/// On-disk form of a key pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyFile {
    pub version: u32,
    pub kind: String,
    pub scheme_id: SchemeId,
    pub lambda: u32,
    pub public: Vec<String>,
    pub secret: Vec<String>,
}

pub(crate) mod part_hex {
    use num_bigint::BigUint;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::encode_part(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let text = String::deserialize(d)?;
        super::decode_part(&text).map_err(D::Error::custom)
    }
}

pub(crate) mod part_hex_vec {
    use num_bigint::BigUint;
    use serde::{de::Error as _, Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(values: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
        super::encode_parts(values).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigUint>, D::Error> {
        let texts = Vec::<String>::deserialize(d)?;
        super::decode_parts(&texts).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn known_encodings() {
        assert_eq!(encode_part(&BigUint::from(0u32)), "00000000");
        assert_eq!(encode_part(&BigUint::from(1u32)), "0000000101");
        assert_eq!(encode_part(&BigUint::from(0x1234u32)), "000000021234");
        assert_eq!(encode_part(&(BigUint::from(1u32) << 64u32)), "00000009010000000000000000");
    }

    #[test]
    fn rejects_malformed_parts() {
        assert!(decode_part("zz").is_err());
        assert!(decode_part("000000").is_err());
        assert!(decode_part("0000000201").is_err());
        assert!(decode_part("000000020001").is_err());
    }

    proptest! {
        #[test]
        fn roundtrip(bytes in proptest::collection::vec(any::<u8>(), 0..80)) {
            let v = BigUint::from_bytes_be(&bytes);
            prop_assert_eq!(decode_part(&encode_part(&v)).unwrap(), v);
        }
    }
}
