//! Paillier-style additively homomorphic scheme with generator `n + 1`.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{domain, Error, Result};
use crate::modarith::{gcd, gen_prime, lcm, mod_inv, random_below, RngHandle};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PaillierPublic {
    pub n: BigUint,
    pub n_squared: BigUint,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PaillierSecret {
    pub n: BigUint,
    pub n_squared: BigUint,
    /// lcm(p - 1, q - 1)
    pub carmichael: BigUint,
    pub mu: BigUint,
}

pub fn keys_from_primes(p: &BigUint, q: &BigUint) -> Result<(PaillierPublic, PaillierSecret)> {
    if p == q {
        return Err(domain("Paillier primes must be distinct"));
    }
    let n = p * q;
    let p1 = p - 1u32;
    let q1 = q - 1u32;
    if !gcd(&n, &(&p1 * &q1)).is_one() {
        return Err(domain("gcd(n, (p-1)(q-1)) must be 1"));
    }
    let n_squared = &n * &n;
    let carmichael = lcm(&p1, &q1);
    // With g = n + 1, L(g^λ mod n²) = λ mod n.
    let mu = mod_inv(&(&carmichael % &n), &n)?;
    Ok((
        PaillierPublic {
            n: n.clone(),
            n_squared: n_squared.clone(),
        },
        PaillierSecret {
            n,
            n_squared,
            carmichael,
            mu,
        },
    ))
}

pub fn generate(lambda: u32, rng: &mut RngHandle) -> Result<(PaillierPublic, PaillierSecret)> {
    let p_bits = u64::from(lambda).div_ceil(2);
    let q_bits = u64::from(lambda) - p_bits;
    loop {
        let p = gen_prime(p_bits, rng)?;
        let q = gen_prime(q_bits, rng)?;
        if (&p * &q).bits() != u64::from(lambda) {
            continue;
        }
        match keys_from_primes(&p, &q) {
            Ok(keys) => return Ok(keys),
            Err(Error::Domain(_)) => continue,
            Err(e) => return Err(e),
        }
    }
}

/// Samples ρ uniformly from Z*_n.
pub fn sample_randomness(pk: &PaillierPublic, rng: &mut RngHandle) -> BigUint {
    loop {
        let rho = random_below(&pk.n, rng);
        if !rho.is_zero() && gcd(&rho, &pk.n).is_one() {
            return rho;
        }
    }
}

/// `(n + 1)^m · ρ^n mod n²`, using `(n + 1)^m = 1 + m·n (mod n²)`.
pub fn encrypt_with(pk: &PaillierPublic, m: &BigUint, rho: &BigUint) -> Result<BigUint> {
    if m >= &pk.n {
        return Err(domain("plaintext must be below n"));
    }
    if rho.is_zero() || rho >= &pk.n || !gcd(rho, &pk.n).is_one() {
        return Err(domain("Paillier randomness must lie in Z*_n"));
    }
    let gm = (BigUint::one() + m * &pk.n) % &pk.n_squared;
    Ok(gm * rho.modpow(&pk.n, &pk.n_squared) % &pk.n_squared)
}

pub fn decrypt(sk: &PaillierSecret, c: &BigUint) -> Result<BigUint> {
    if c.is_zero() || c >= &sk.n_squared {
        return Err(Error::Decode("ciphertext outside [1, n²)".into()));
    }
    let x = c.modpow(&sk.carmichael, &sk.n_squared);
    if x.is_zero() {
        return Err(Error::Decode("ciphertext is not a unit modulo n²".into()));
    }
    let (l, rem) = (x - 1u32).div_rem(&sk.n);
    if !rem.is_zero() {
        return Err(Error::Decode("ciphertext is not a unit modulo n²".into()));
    }
    Ok(l * &sk.mu % &sk.n)
}

pub fn combine(pk: &PaillierPublic, a: &BigUint, b: &BigUint) -> BigUint {
    a * b % &pk.n_squared
}

/// Exact group inverse modulo n²; decrypts to `-m mod n`.
pub fn invert(pk: &PaillierPublic, c: &BigUint) -> Result<BigUint> {
    mod_inv(c, &pk.n_squared).map_err(|_| Error::Decode("ciphertext is not a unit modulo n²".into()))
}
