//! ElGamal over the order-q subgroup of Z*_p for a safe prime p = 2q + 1.

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::modarith::{gen_safe_prime, mod_inv, random_range_inclusive, RngHandle};
use crate::schemes::serial::part_hex;

/// Public group description shared by every key generated in it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupParams {
    #[serde(with = "part_hex")]
    pub p: BigUint,
    #[serde(with = "part_hex")]
    pub q: BigUint,
    #[serde(with = "part_hex")]
    pub g: BigUint,
}

impl GroupParams {
    /// Validates `p = 2q + 1` and that `g` generates the order-q subgroup.
    /// Primality of `p` and `q` is the caller's responsibility.
    pub fn new(p: BigUint, q: BigUint, g: BigUint) -> Result<Self> {
        if p != &q * 2u32 + 1u32 {
            return Err(domain("group modulus must satisfy p = 2q + 1"));
        }
        if q < BigUint::from(3u32) {
            return Err(domain("subgroup order must be at least 3"));
        }
        let params = Self { p, q, g };
        if params.g.is_one() || !params.contains(&params.g) {
            return Err(domain("g must be a non-identity element of the order-q subgroup"));
        }
        Ok(params)
    }

    pub fn generate(bits: u32, rng: &mut RngHandle) -> Result<Self> {
        let (p, q) = gen_safe_prime(u64::from(bits), rng)?;
        let two = BigUint::from(2u32);
        let high = &p - 2u32;
        loop {
            let a = random_range_inclusive(&two, &high, rng);
            let g = &a * &a % &p;
            if !g.is_one() {
                return Ok(Self { p, q, g });
            }
        }
    }

    /// Membership in the order-q subgroup (the quadratic residues mod p).
    pub fn contains(&self, x: &BigUint) -> bool {
        x > &BigUint::default() && x < &self.p && x.modpow(&self.q, &self.p).is_one()
    }

    pub fn sample_exponent(&self, rng: &mut RngHandle) -> BigUint {
        random_range_inclusive(&BigUint::one(), &(&self.q - 1u32), rng)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElGamalPublic {
    pub group: GroupParams,
    pub h: BigUint,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElGamalSecret {
    pub group: GroupParams,
    pub x: BigUint,
}

pub fn keys_from_secret(group: GroupParams, x: BigUint) -> Result<(ElGamalPublic, ElGamalSecret)> {
    if x < BigUint::one() || x >= group.q {
        return Err(domain("secret exponent must lie in [1, q-1]"));
    }
    let h = group.g.modpow(&x, &group.p);
    Ok((
        ElGamalPublic {
            group: group.clone(),
            h,
        },
        ElGamalSecret { group, x },
    ))
}

pub fn generate_in(group: &GroupParams, rng: &mut RngHandle) -> Result<(ElGamalPublic, ElGamalSecret)> {
    let x = group.sample_exponent(rng);
    keys_from_secret(group.clone(), x)
}

/// `(g^ρ, m·h^ρ) mod p`.
pub fn encrypt_with(pk: &ElGamalPublic, m: &BigUint, rho: &BigUint) -> Result<[BigUint; 2]> {
    let grp = &pk.group;
    if !grp.contains(m) {
        return Err(domain("plaintext is not an element of the order-q subgroup"));
    }
    if rho < &BigUint::one() || rho >= &grp.q {
        return Err(domain("ElGamal randomness must lie in [1, q-1]"));
    }
    let c1 = grp.g.modpow(rho, &grp.p);
    let c2 = m * pk.h.modpow(rho, &grp.p) % &grp.p;
    Ok([c1, c2])
}

pub fn decrypt(sk: &ElGamalSecret, c1: &BigUint, c2: &BigUint) -> Result<BigUint> {
    let p = &sk.group.p;
    for part in [c1, c2] {
        if part == &BigUint::default() || part >= p {
            return Err(Error::Decode("ciphertext component outside [1, p)".into()));
        }
    }
    let shared = c1.modpow(&sk.x, p);
    let m = c2 * mod_inv(&shared, p)? % p;
    if !sk.group.contains(&m) {
        return Err(Error::Decode("decrypted value is not a subgroup element".into()));
    }
    Ok(m)
}

pub fn combine(pk: &ElGamalPublic, a: &[BigUint], b: &[BigUint]) -> Vec<BigUint> {
    a.iter().zip(b).map(|(x, y)| x * y % &pk.group.p).collect()
}

pub fn invert(pk: &ElGamalPublic, c: &[BigUint]) -> Result<Vec<BigUint>> {
    c.iter()
        .map(|x| mod_inv(x, &pk.group.p).map_err(|_| Error::Decode("component not invertible mod p".into())))
        .collect()
}
