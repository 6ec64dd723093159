//! Fixed-point encoding of real numbers into plaintext spaces.
//!
//! Reals are scaled by a power of two, rounded half-to-even, and negative
//! values wrap to the top of the space (`space - |x|·scale`), so additive
//! homomorphism stays sign-correct without any correction term.
//!
//! The group schemes need one more step: the encoded integer `k ∈ [1, q]` is
//! embedded into the order-q subgroup as `k² mod p` ([`SubgroupEmbedding`]).
//! Since `p ≡ 3 (mod 4)` the square root `x^((p+1)/4)` inverts it, choosing
//! the root that lies in `[1, q]`. Squaring is multiplicative, so a product of
//! embedded values extracts to the integer product as long as that product
//! stays at or below `q`. Each multiplication of encoded operands adds one
//! factor of `scale` that the decoder must remove.

use num_bigint::BigUint;
use num_traits::{FromPrimitive, ToPrimitive, Zero};

use crate::error::{domain, Error, Result};
use crate::schemes::{GroupParams, Plaintext, PublicKey};

pub const DEFAULT_SCALE: u64 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Encoder {
    scale: u64,
    space: BigUint,
    half: BigUint,
}

impl Encoder {
    pub fn new(scale: u64, space: BigUint) -> Result<Self> {
        if scale < 2 || !scale.is_power_of_two() {
            return Err(domain(format!("scale must be a power of two ≥ 2, got {scale}")));
        }
        if space <= BigUint::from(2 * scale) {
            return Err(domain("plaintext space too small for this scale"));
        }
        let half = &space >> 1u32;
        Ok(Self { scale, space, half })
    }

    /// Encoder over the integers a key's encryption path accepts: `[0, n)` for
    /// the additive schemes and `[0, q)` (before embedding) for the group schemes.
    pub fn for_key(scale: u64, pk: &PublicKey) -> Result<Self> {
        let space = match pk.group() {
            Some(group) => group.q.clone(),
            None => pk.plaintext_modulus().clone(),
        };
        Self::new(scale, space)
    }

    pub fn scale(&self) -> u64 {
        self.scale
    }

    pub fn space(&self) -> &BigUint {
        &self.space
    }

    /// Largest representable magnitude (exclusive): `space / (2·scale)`.
    pub fn limit(&self) -> f64 {
        self.space.to_f64().unwrap_or(f64::INFINITY) / (2.0 * self.scale as f64)
    }

    pub fn encode(&self, x: f64) -> Result<Plaintext> {
        if !x.is_finite() {
            return Err(Error::Overflow(format!("{x} is not finite")));
        }
        if x.abs() >= self.limit() {
            return Err(Error::Overflow(format!(
                "|{x}| is outside the representable range ±{}",
                self.limit()
            )));
        }
        let magnitude = (x.abs() * self.scale as f64).round_ties_even();
        let magnitude = BigUint::from_f64(magnitude)
            .ok_or_else(|| Error::Overflow(format!("cannot represent {x}")))?;
        let value = if x < 0.0 && !magnitude.is_zero() {
            if magnitude > &self.space - &self.half {
                return Err(Error::Overflow(format!("{x} rounds past the negative limit")));
            }
            &self.space - magnitude
        } else {
            if magnitude >= self.half {
                return Err(Error::Overflow(format!("{x} rounds past the positive limit")));
            }
            magnitude
        };
        Ok(Plaintext {
            value,
            modulus: self.space.clone(),
        })
    }

    pub fn decode(&self, m: &Plaintext) -> f64 {
        self.decode_scaled(&m.value, 1)
    }

    /// Decodes an integer that carries `depth` factors of `scale`, as produced
    /// by multiplying `depth` encoded operands.
    pub fn decode_scaled(&self, value: &BigUint, depth: u32) -> f64 {
        let divisor = (self.scale as f64).powi(depth as i32);
        if value < &self.half {
            value.to_f64().unwrap_or(f64::INFINITY) / divisor
        } else {
            -(&self.space - value).to_f64().unwrap_or(f64::INFINITY) / divisor
        }
    }
}

/// Bijection between `[1, q]` and the order-q subgroup of Z*_p by squaring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgroupEmbedding {
    group: GroupParams,
    root_exponent: BigUint,
}

impl SubgroupEmbedding {
    pub fn new(group: GroupParams) -> Self {
        let root_exponent = (&group.p + 1u32) >> 2u32;
        Self {
            group,
            root_exponent,
        }
    }

    pub fn embed(&self, k: &BigUint) -> Result<Plaintext> {
        if k.is_zero() || k > &self.group.q {
            return Err(domain("only integers in [1, q] can be embedded"));
        }
        Ok(Plaintext {
            value: k * k % &self.group.p,
            modulus: self.group.p.clone(),
        })
    }

    pub fn extract(&self, m: &Plaintext) -> Result<BigUint> {
        if m.modulus != self.group.p || !self.group.contains(&m.value) {
            return Err(domain("value is not an element of the subgroup"));
        }
        let root = m.value.modpow(&self.root_exponent, &self.group.p);
        debug_assert_eq!(&root * &root % &self.group.p, m.value);
        Ok(if root <= self.group.q {
            root
        } else {
            &self.group.p - root
        })
    }
}

/// Encoder for the group schemes: fixed-point encode, then embed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupEncoder {
    encoder: Encoder,
    embedding: SubgroupEmbedding,
}

impl GroupEncoder {
    pub fn new(scale: u64, group: GroupParams) -> Result<Self> {
        Ok(Self {
            encoder: Encoder::new(scale, group.q.clone())?,
            embedding: SubgroupEmbedding::new(group),
        })
    }

    pub fn encoder(&self) -> &Encoder {
        &self.encoder
    }

    /// Zero has no image in the subgroup and is rejected.
    pub fn encode(&self, x: f64) -> Result<Plaintext> {
        let fixed = self.encoder.encode(x)?;
        self.embedding.embed(&fixed.value)
    }

    pub fn decode(&self, m: &Plaintext) -> Result<f64> {
        self.decode_scaled(m, 1)
    }

    /// Decodes a product of `depth` encoded non-negative operands.
    pub fn decode_scaled(&self, m: &Plaintext, depth: u32) -> Result<f64> {
        let k = self.embedding.extract(m)?;
        Ok(self.encoder.decode_scaled(&k, depth))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn default_encoder() -> Encoder {
        // a 64-bit odd space, as an additive modulus would be
        Encoder::new(DEFAULT_SCALE, big(0xC000_0000_0000_0001)).unwrap()
    }

    #[test]
    fn encode_examples() {
        let e = default_encoder();
        assert_eq!(e.encode(0.0).unwrap().value, big(0));
        assert_eq!(e.encode(-0.0).unwrap().value, big(0));
        assert_eq!(e.encode(1.5).unwrap().value, big(98304));
        assert_eq!(e.encode(-1.5).unwrap().value, e.space() - 98304u32);
        assert_eq!(e.decode(&e.encode(0.0).unwrap()), 0.0);
    }

    #[test]
    fn rounding_is_half_to_even() {
        let e = Encoder::new(2, big(1001)).unwrap();
        // 0.25·2 = 0.5 → 0, 0.75·2 = 1.5 → 2, 1.25·2 = 2.5 → 2
        assert_eq!(e.encode(0.25).unwrap().value, big(0));
        assert_eq!(e.encode(0.75).unwrap().value, big(2));
        assert_eq!(e.encode(1.25).unwrap().value, big(2));
        assert_eq!(e.encode(-1.25).unwrap().value, big(999));
    }

    #[test]
    fn out_of_range_is_an_overflow_error() {
        let e = Encoder::new(4, big(1000)).unwrap();
        assert_eq!(e.limit(), 125.0);
        assert!(matches!(e.encode(125.0), Err(Error::Overflow(_))));
        assert!(matches!(e.encode(-125.0), Err(Error::Overflow(_))));
        assert!(matches!(e.encode(f64::NAN), Err(Error::Overflow(_))));
        assert!(matches!(e.encode(f64::INFINITY), Err(Error::Overflow(_))));
        // 124.9 → 499.6 → 500 = half: would decode negative
        assert!(matches!(e.encode(124.9), Err(Error::Overflow(_))));
        assert_eq!(e.decode(&e.encode(124.75).unwrap()), 124.75);
        // -124.9 → 500 below the space top, exactly the negative limit
        assert_eq!(e.encode(-124.9).unwrap().value, big(500));
        assert_eq!(e.decode(&e.encode(-124.9).unwrap()), -125.0);
    }

    #[test]
    fn invalid_encoders_are_rejected() {
        assert!(Encoder::new(3, big(1000)).is_err());
        assert!(Encoder::new(1, big(1000)).is_err());
        assert!(Encoder::new(1 << 10, big(1000)).is_err());
    }

    #[test]
    fn additive_compatibility_examples() {
        let e = default_encoder();
        let sum = |a: f64, b: f64| {
            let v = (e.encode(a).unwrap().value + e.encode(b).unwrap().value) % e.space();
            e.decode_scaled(&v, 1)
        };
        assert_eq!(sum(1.5, -2.25), -0.75);
        assert_eq!(sum(-3.0, -4.5), -7.5);
        assert_eq!(sum(10.0, 0.0), 10.0);
    }

    #[test]
    fn subgroup_embedding_is_a_bijection_on_tiny_group() {
        let group = GroupParams::new(big(23), big(11), big(4)).unwrap();
        let emb = SubgroupEmbedding::new(group.clone());
        let mut images = std::collections::BTreeSet::new();
        for k in 1..=11u64 {
            let m = emb.embed(&big(k)).unwrap();
            assert!(group.contains(&m.value));
            assert_eq!(emb.extract(&m).unwrap(), big(k));
            images.insert(m.value);
        }
        assert_eq!(images.len(), 11);
        assert!(emb.embed(&big(0)).is_err());
        assert!(emb.embed(&big(12)).is_err());
        assert!(emb.extract(&Plaintext::new(5u32, 23u32).unwrap()).is_err());
    }

    #[test]
    fn multiplicative_compatibility_at_integers() {
        let mut rng = crate::modarith::RngHandle::from_u64(4);
        let group = GroupParams::generate(128, &mut rng).unwrap();
        let enc = GroupEncoder::new(DEFAULT_SCALE, group.clone()).unwrap();
        for (x, y) in [(1.0, 1.0), (2.0, 3.0), (7.0, 12.0), (250.0, 400.0), (0.5, 8.0)] {
            let a = enc.encode(x).unwrap();
            let b = enc.encode(y).unwrap();
            assert_eq!(enc.decode(&a).unwrap(), x);
            let product = Plaintext {
                value: &a.value * &b.value % &group.p,
                modulus: group.p.clone(),
            };
            assert_eq!(enc.decode_scaled(&product, 2).unwrap(), x * y);
        }
        assert!(enc.encode(0.0).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]
        #[test]
        fn grid_points_roundtrip_exactly(k in -(1i64 << 40)..(1i64 << 40)) {
            let e = default_encoder();
            let x = k as f64 / DEFAULT_SCALE as f64;
            prop_assert_eq!(e.decode(&e.encode(x).unwrap()), x);
        }
    }

    proptest! {
        #[test]
        fn rounding_error_is_bounded(x in -1.0e6f64..1.0e6) {
            let e = default_encoder();
            let err = (e.decode(&e.encode(x).unwrap()) - x).abs();
            prop_assert!(err <= 0.5 / DEFAULT_SCALE as f64);
        }

        #[test]
        fn additive_compatibility(a in -(1i64 << 40)..(1i64 << 40), b in -(1i64 << 40)..(1i64 << 40)) {
            let e = default_encoder();
            let (x, y) = (a as f64 / 65536.0, b as f64 / 65536.0);
            let v = (e.encode(x).unwrap().value + e.encode(y).unwrap().value) % e.space();
            prop_assert_eq!(e.decode_scaled(&v, 1), x + y);
        }
    }
}
