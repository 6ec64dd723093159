//! Big-integer modular arithmetic, primality testing and seeded randomness.
//!
//! Every scheme in the workbench sits on top of these functions. Values are
//! plain [`BigUint`]s; all functions are pure apart from the explicit
//! [`RngHandle`] argument.

mod prime;
mod rng;

pub use num_bigint::BigUint;
pub use prime::{gen_prime, gen_safe_prime, is_probable_prime, MILLER_RABIN_ROUNDS};
pub use rng::RngHandle;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{domain, Error, Result};

/// `base^exp mod modulus`.
pub fn mod_pow(base: &BigUint, exp: &BigUint, modulus: &BigUint) -> Result<BigUint> {
    if modulus < &BigUint::from(2u32) {
        return Err(domain("mod_pow modulus must be at least 2"));
    }
    Ok(base.modpow(exp, modulus))
}

/// Inverse of `a` modulo `modulus` by the extended Euclidean algorithm.
pub fn mod_inv(a: &BigUint, modulus: &BigUint) -> Result<BigUint> {
    if modulus < &BigUint::from(2u32) {
        return Err(domain("mod_inv modulus must be at least 2"));
    }
    let m = BigInt::from_biguint(Sign::Plus, modulus.clone());
    let (mut old_r, mut r) = (BigInt::from_biguint(Sign::Plus, a % modulus), m.clone());
    let (mut old_s, mut s) = (BigInt::one(), BigInt::zero());
    while !r.is_zero() {
        let quotient = &old_r / &r;
        let next_r = &old_r - &quotient * &r;
        old_r = std::mem::replace(&mut r, next_r);
        let next_s = &old_s - &quotient * &s;
        old_s = std::mem::replace(&mut s, next_s);
    }
    if !old_r.is_one() {
        return Err(Error::NotInvertible);
    }
    let inv = old_s.mod_floor(&m);
    debug_assert!(!inv.is_negative());
    Ok(inv.to_biguint().expect("non-negative after mod_floor"))
}

pub fn gcd(a: &BigUint, b: &BigUint) -> BigUint {
    a.gcd(b)
}

pub fn lcm(a: &BigUint, b: &BigUint) -> BigUint {
    a.lcm(b)
}

/// Uniform integer with exactly `bits` random bits (the top bit may be zero).
pub fn random_bits(bits: u64, rng: &mut RngHandle) -> BigUint {
    if bits == 0 {
        return BigUint::zero();
    }
    let nbytes = bits.div_ceil(8) as usize;
    let mut buf = vec![0u8; nbytes];
    rng.fill_bytes(&mut buf);
    let excess = nbytes as u64 * 8 - bits;
    buf[0] &= 0xffu8 >> excess;
    BigUint::from_bytes_be(&buf)
}

/// Uniform integer in `[0, bound)` by rejection sampling. `bound` must be positive.
pub fn random_below(bound: &BigUint, rng: &mut RngHandle) -> BigUint {
    assert!(!bound.is_zero(), "random_below requires a positive bound");
    let bits = bound.bits();
    loop {
        let candidate = random_bits(bits, rng);
        if &candidate < bound {
            return candidate;
        }
    }
}

/// Uniform integer in `[low, high]`.
pub fn random_range_inclusive(low: &BigUint, high: &BigUint, rng: &mut RngHandle) -> BigUint {
    assert!(low <= high, "empty range");
    low + random_below(&(high - low + 1u32), rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn naive_pow(base: u64, exp: u64, m: u64) -> u64 {
        let mut acc = 1u128 % m as u128;
        for _ in 0..exp {
            acc = acc * (base as u128 % m as u128) % m as u128;
        }
        acc as u64
    }

    #[test]
    fn mod_pow_examples() {
        assert_eq!(mod_pow(&big(2), &big(10), &big(1000)).unwrap(), big(24));
        assert_eq!(mod_pow(&big(5), &big(3), &big(7)).unwrap(), big(6));
        assert_eq!(naive_pow(2, 10, 1000), 24);
        assert_eq!(naive_pow(5, 3, 7), 6);
        for m in [2u64, 3, 97, 1 << 40] {
            assert_eq!(mod_pow(&big(12345), &big(0), &big(m)).unwrap(), big(1));
        }
    }

    #[test]
    fn mod_pow_rejects_small_modulus() {
        assert!(matches!(mod_pow(&big(2), &big(2), &big(1)), Err(Error::Domain(_))));
        assert!(matches!(mod_pow(&big(2), &big(2), &big(0)), Err(Error::Domain(_))));
    }

    #[test]
    fn mod_pow_matches_repeated_multiplication() {
        let mut rng = RngHandle::from_u64(11);
        for _ in 0..200 {
            let m = 2 + rng.next_u64() % 1_000_000_007;
            let b = rng.next_u64();
            for exp in 0..=256u64 {
                assert_eq!(
                    mod_pow(&big(b), &big(exp), &big(m)).unwrap(),
                    big(naive_pow(b, exp, m)),
                    "b={b} e={exp} m={m}"
                );
            }
        }
    }

    #[test]
    fn mod_inv_examples() {
        // exhaustive search over 0..6 finds 3*5 = 15 = 1 mod 7
        let found: Vec<u64> = (0..7).filter(|x| 3 * x % 7 == 1).collect();
        assert_eq!(found, vec![5]);
        assert_eq!(mod_inv(&big(3), &big(7)).unwrap(), big(5));
        for m in [2u64, 9, 1 << 33] {
            assert_eq!(mod_inv(&big(1), &big(m)).unwrap(), big(1));
        }
        assert_eq!(mod_inv(&big(4), &big(8)), Err(Error::NotInvertible));
        assert_eq!(mod_inv(&big(0), &big(8)), Err(Error::NotInvertible));
    }

    #[test]
    fn mod_inv_random_64_bit() {
        let mut rng = RngHandle::from_u64(64);
        let mut checked = 0;
        while checked < 10_000 {
            let m = random_bits(64, &mut rng) | big(2);
            let a = random_below(&m, &mut rng);
            if gcd(&a, &m) != big(1) {
                assert_eq!(mod_inv(&a, &m), Err(Error::NotInvertible));
                continue;
            }
            let inv = mod_inv(&a, &m).unwrap();
            assert!(inv < m);
            assert_eq!(&a * &inv % &m, big(1));
            checked += 1;
        }
    }

    #[test]
    fn random_below_stays_in_range() {
        let mut rng = RngHandle::from_u64(5);
        let bound = big(1000);
        let mut seen = std::collections::HashSet::new();
        for _ in 0..20_000 {
            let v = random_below(&bound, &mut rng);
            assert!(v < bound);
            seen.insert(v);
        }
        assert_eq!(seen.len(), 1000);
    }

    proptest! {
        #[test]
        fn prop_inverse_roundtrip(a in 1u64.., m in 2u64..) {
            let (a, m) = (big(a), big(m));
            match mod_inv(&a, &m) {
                Ok(inv) => prop_assert_eq!(&a * inv % &m, big(1) % &m),
                Err(e) => {
                    prop_assert_eq!(e, Error::NotInvertible);
                    prop_assert!(gcd(&a, &m) != big(1));
                }
            }
        }
    }
}
