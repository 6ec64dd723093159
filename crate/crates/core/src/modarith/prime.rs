use std::sync::OnceLock;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use super::{random_bits, random_range_inclusive, RngHandle};
use crate::error::{domain, Result};

/// Rounds of Miller–Rabin per accepted candidate; error probability ≤ 4^-40 = 2^-80.
pub const MILLER_RABIN_ROUNDS: usize = 40;

const SIEVE_LIMIT: u32 = 4096;

/// Candidates at or below this size skip the sieve (which would reject the
/// sieve primes themselves) and go straight to Miller–Rabin.
const SIEVE_MIN_BITS: u64 = 16;

fn small_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let n = SIEVE_LIMIT as usize;
        let mut composite = vec![false; n];
        let mut out = Vec::new();
        for i in 2..n {
            if !composite[i] {
                out.push(i as u32);
                let mut j = i * i;
                while j < n {
                    composite[j] = true;
                    j += i;
                }
            }
        }
        out
    })
}

/// Miller–Rabin with `rounds` random bases drawn from `rng`.
pub fn is_probable_prime(n: &BigUint, rounds: usize, rng: &mut RngHandle) -> bool {
    let two = BigUint::from(2u32);
    if n < &two {
        return false;
    }
    if let Some(small) = n.to_u32() {
        if small < 4 {
            return true;
        }
    }
    if n.is_even() {
        return false;
    }
    let n_minus_one = n - 1u32;
    let shift = n_minus_one.trailing_zeros().expect("n - 1 > 0");
    let odd_part = &n_minus_one >> shift;
    let high = n - 2u32;

    'witness: for _ in 0..rounds {
        let a = random_range_inclusive(&two, &high, rng);
        let mut x = a.modpow(&odd_part, n);
        if x.is_one() || x == n_minus_one {
            continue;
        }
        for _ in 1..shift {
            x = &x * &x % n;
            if x == n_minus_one {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn fermat_base_two(n: &BigUint) -> bool {
    BigUint::from(2u32).modpow(&(n - 1u32), n).is_one()
}

fn residues(n: &BigUint) -> Vec<u32> {
    small_primes()
        .iter()
        .map(|&p| (n % p).to_u32().expect("residue below p"))
        .collect()
}

/// Random prime of exactly `bits` bits.
pub fn gen_prime(bits: u64, rng: &mut RngHandle) -> Result<BigUint> {
    if bits < 8 {
        return Err(domain(format!("gen_prime needs at least 8 bits, got {bits}")));
    }
    let top = BigUint::one() << (bits - 1);
    loop {
        let start = random_bits(bits, rng) | &top | BigUint::one();
        if bits <= SIEVE_MIN_BITS {
            if is_probable_prime(&start, MILLER_RABIN_ROUNDS, rng) {
                return Ok(start);
            }
            continue;
        }
        // Incremental search from a random odd start, stepping by 2 and
        // sieving with cached residues.
        let res = residues(&start);
        let mut delta: u32 = 0;
        while delta < 1 << 20 {
            let passes = small_primes()
                .iter()
                .zip(&res)
                .all(|(&p, &r)| (r + delta % p) % p != 0);
            if passes {
                let candidate = &start + delta;
                if candidate.bits() != bits {
                    break;
                }
                if fermat_base_two(&candidate)
                    && is_probable_prime(&candidate, MILLER_RABIN_ROUNDS, rng)
                {
                    return Ok(candidate);
                }
            }
            delta += 2;
        }
    }
}

/// Random safe prime `p = 2q + 1` of exactly `bits` bits, returned as `(p, q)`.
pub fn gen_safe_prime(bits: u64, rng: &mut RngHandle) -> Result<(BigUint, BigUint)> {
    if bits < 8 {
        return Err(domain(format!("gen_safe_prime needs at least 8 bits, got {bits}")));
    }
    let q_bits = bits - 1;
    let top = BigUint::one() << (q_bits - 1);
    loop {
        let start = random_bits(q_bits, rng) | &top | BigUint::one();
        if bits <= SIEVE_MIN_BITS {
            let p = (&start << 1u32) + 1u32;
            if is_probable_prime(&start, MILLER_RABIN_ROUNDS, rng)
                && is_probable_prime(&p, MILLER_RABIN_ROUNDS, rng)
            {
                return Ok((p, start));
            }
            continue;
        }
        let res = residues(&start);
        let mut delta: u32 = 0;
        while delta < 1 << 24 {
            // q and 2q + 1 must both avoid every small prime factor.
            let passes = small_primes().iter().zip(&res).all(|(&p, &r)| {
                let rq = ((r as u64 + delta as u64) % p as u64) as u32;
                rq != 0 && ((2 * rq as u64 + 1) % p as u64) != 0
            });
            if passes {
                let q = &start + delta;
                if q.bits() != q_bits {
                    break;
                }
                let p = (&q << 1u32) + 1u32;
                if fermat_base_two(&q)
                    && fermat_base_two(&p)
                    && is_probable_prime(&q, MILLER_RABIN_ROUNDS, rng)
                    && is_probable_prime(&p, MILLER_RABIN_ROUNDS, rng)
                {
                    return Ok((p, q));
                }
            }
            delta += 2;
        }
    }
}
