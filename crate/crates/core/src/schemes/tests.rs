use std::collections::HashSet;

use num_bigint::BigUint;

use super::*;
use crate::modarith::RngHandle;

fn big(v: u64) -> BigUint {
    BigUint::from(v)
}

fn lam(bits: u32) -> SecurityParameter {
    SecurityParameter::new(bits).unwrap()
}

/// p = 23 = 2·11 + 1; the quadratic residues are {1, 2, 3, 4, 6, 8, 9, 12, 13, 16, 18}.
fn tiny_group() -> GroupParams {
    GroupParams::new(big(23), big(11), big(4)).unwrap()
}

fn key(scheme: SchemeId, bits: u32, seed: u64) -> KeyPair {
    keygen(scheme, lam(bits), &mut RngHandle::from_u64(seed)).unwrap()
}

#[test]
fn tiny_paillier_matches_direct_computation() {
    let keys = KeyPair::paillier_from_primes(SchemeId::Additive, &big(3), &big(5)).unwrap();
    let m = keys.pk.plaintext(7u32).unwrap();
    let c = keys.pk.encrypt_with(&m, &big(2)).unwrap();
    // 16^7 · 2^15 mod 225 by repeated multiplication
    let mut expected = 1u64;
    for _ in 0..7 {
        expected = expected * 16 % 225;
    }
    for _ in 0..15 {
        expected = expected * 2 % 225;
    }
    assert_eq!(c.parts, vec![big(expected)]);
    assert_eq!(keys.sk.decrypt(&c).unwrap().value, big(7));
}

#[test]
fn additive_16_bit_exhaustive_roundtrip() {
    let keys = key(SchemeId::Additive, 16, 7);
    let n = keys.pk.plaintext_modulus().clone();
    assert_eq!(n.bits(), 16);
    let factors = keys.sk.parts();
    assert_eq!(factors[0], n);
    let mut rng = RngHandle::from_u64(70);
    let n_u64: u64 = n.try_into().unwrap();
    for m in 0..n_u64 {
        let pt = keys.pk.plaintext(m).unwrap();
        let c = keys.pk.encrypt(&pt, &mut rng).unwrap();
        assert_eq!(keys.sk.decrypt(&c).unwrap(), pt, "m = {m}");
    }
}

#[test]
fn additive_primes_have_half_length() {
    // n = p·q with both factors 8 bits: check by trial factoring n.
    let keys = key(SchemeId::Additive, 16, 7);
    let n: u64 = keys.pk.plaintext_modulus().try_into().unwrap();
    let p = (2..n).find(|d| n % d == 0).unwrap();
    let q = n / p;
    assert!((128..256).contains(&p) && (128..256).contains(&q), "{p} {q}");
}

#[test]
fn multiplicative_public_key_is_g_to_the_x() {
    let keys = key(SchemeId::Multiplicative, 16, 7);
    let pk = keys.pk.parts();
    let sk = keys.sk.parts();
    let (p, g, h) = (&pk[0], &pk[2], &pk[3]);
    assert_eq!(&g.modpow(&sk[3], p), h);
    assert_eq!(pk[..3], sk[..3]);
}

#[test]
fn keygen_is_deterministic_per_seed() {
    for scheme in SchemeId::ALL {
        assert_eq!(key(scheme, 64, 3), key(scheme, 64, 3));
        assert_ne!(key(scheme, 64, 3), key(scheme, 64, 4));
    }
}

#[test]
fn too_small_lambda_is_rejected() {
    assert!(SecurityParameter::new(8).is_err());
    assert!(SecurityParameter::new(15).is_err());
    assert!(SecurityParameter::new(16).is_ok());
}

#[test]
fn roundtrip_random_plaintexts() {
    for scheme in SchemeId::ALL {
        let keys = key(scheme, 64, 11);
        let mut rng = RngHandle::from_u64(12);
        for _ in 0..1000 {
            let m = keys.pk.random_plaintext(&mut rng);
            let c = keys.pk.encrypt(&m, &mut rng).unwrap();
            assert_eq!(keys.sk.decrypt(&c).unwrap(), m, "{scheme}");
        }
    }
}

#[test]
fn homomorphism_examples() {
    let add = key(SchemeId::Additive, 64, 1);
    let mut rng = RngHandle::from_u64(2);
    let enc = |keys: &KeyPair, v: u64, rng: &mut RngHandle| {
        keys.pk.encrypt(&keys.pk.plaintext(v).unwrap(), rng).unwrap()
    };
    let c = add.pk.hom_op(&enc(&add, 2, &mut rng), &enc(&add, 3, &mut rng)).unwrap();
    assert_eq!(add.sk.decrypt(&c).unwrap().value, big(5));
    let zero = add.pk.hom_op(&enc(&add, 0, &mut rng), &enc(&add, 0, &mut rng)).unwrap();
    assert_eq!(add.sk.decrypt(&zero).unwrap().value, big(0));
    let same = add.pk.hom_op(&enc(&add, 41, &mut rng), &enc(&add, 0, &mut rng)).unwrap();
    assert_eq!(add.sk.decrypt(&same).unwrap().value, big(41));

    for scheme in [SchemeId::Multiplicative, SchemeId::BrokenDeterministic] {
        let mul = KeyPair::elgamal_from_secret(scheme, tiny_group(), big(7)).unwrap();
        let c = mul.pk.hom_op(&enc(&mul, 2, &mut rng), &enc(&mul, 3, &mut rng)).unwrap();
        assert_eq!(mul.sk.decrypt(&c).unwrap().value, big(6));
    }
}

#[test]
fn homomorphism_random_pairs() {
    for scheme in SchemeId::ALL {
        let keys = key(scheme, 64, 21);
        let n = keys.pk.plaintext_modulus().clone();
        let mut rng = RngHandle::from_u64(22);
        for _ in 0..500 {
            let a = keys.pk.random_plaintext(&mut rng);
            let b = keys.pk.random_plaintext(&mut rng);
            let ca = keys.pk.encrypt(&a, &mut rng).unwrap();
            let cb = keys.pk.encrypt(&b, &mut rng).unwrap();
            let got = keys.sk.decrypt(&keys.pk.hom_op(&ca, &cb).unwrap()).unwrap().value;
            let want = match scheme.homomorphism() {
                Homomorphism::Additive => (&a.value + &b.value) % &n,
                Homomorphism::Multiplicative => &a.value * &b.value % &n,
            };
            assert_eq!(got, want, "{scheme}");
        }
    }
}

#[test]
fn inverse_cancels() {
    for scheme in SchemeId::ALL {
        let keys = key(scheme, 64, 31);
        let mut rng = RngHandle::from_u64(32);
        for _ in 0..100 {
            let m = keys.pk.random_plaintext(&mut rng);
            let c = keys.pk.encrypt(&m, &mut rng).unwrap();
            let inv = keys.pk.hom_inv(&c).unwrap();
            let cancel = keys.sk.decrypt(&keys.pk.hom_op(&c, &inv).unwrap()).unwrap();
            assert_eq!(cancel, keys.pk.plaintext_identity());
            let back = keys.pk.hom_inv(&inv).unwrap();
            assert_eq!(keys.sk.decrypt(&back).unwrap(), m);
            assert_eq!(back, c);
        }
    }
}

#[test]
fn additive_inverse_decrypts_to_negation() {
    let keys = key(SchemeId::Additive, 64, 5);
    let n = keys.pk.plaintext_modulus().clone();
    let mut rng = RngHandle::from_u64(6);
    let m = keys.pk.plaintext(12345u32).unwrap();
    let inv = keys.pk.hom_inv(&keys.pk.encrypt(&m, &mut rng).unwrap()).unwrap();
    assert_eq!(keys.sk.decrypt(&inv).unwrap().value, n - 12345u32);
}

#[test]
fn broken_schemes_are_deterministic() {
    for scheme in [SchemeId::BrokenDeterministic, SchemeId::BrokenAdditive] {
        let keys = key(scheme, 64, 9);
        let mut rng = RngHandle::from_u64(10);
        let m = keys.pk.random_plaintext(&mut rng);
        let distinct: HashSet<_> = (0..100)
            .map(|_| keys.pk.encrypt(&m, &mut rng).unwrap())
            .collect();
        assert_eq!(distinct.len(), 1);
    }
}

#[test]
fn randomized_schemes_rerandomize() {
    for scheme in [SchemeId::Additive, SchemeId::Multiplicative] {
        let keys = key(scheme, 64, 9);
        let mut rng = RngHandle::from_u64(10);
        let m = keys.pk.random_plaintext(&mut rng);
        let distinct: HashSet<_> = (0..100)
            .map(|_| keys.pk.encrypt(&m, &mut rng).unwrap())
            .collect();
        assert!(distinct.len() >= 99, "{scheme}: {}", distinct.len());
    }
}

#[test]
fn out_of_space_plaintexts_are_rejected() {
    let add = key(SchemeId::Additive, 64, 1);
    let n = add.pk.plaintext_modulus().clone();
    assert!(add.pk.plaintext(n.clone()).is_err());
    let forged = Plaintext {
        value: n.clone(),
        modulus: n,
    };
    assert!(add.pk.encrypt(&forged, &mut RngHandle::from_u64(0)).is_err());

    let mul = KeyPair::elgamal_from_secret(SchemeId::Multiplicative, tiny_group(), big(3)).unwrap();
    // 5 is a non-residue mod 23
    assert!(mul.pk.plaintext(5u32).is_err());
    assert!(mul.pk.plaintext(0u32).is_err());
    assert!(mul.pk.plaintext(9u32).is_ok());
}

#[test]
fn malformed_ciphertexts_fail_to_decrypt() {
    let add = key(SchemeId::Additive, 64, 1);
    let n2 = add.pk.ciphertext_modulus().clone();
    for bad in [vec![big(0)], vec![n2.clone()], vec![big(1), big(1)]] {
        let c = Ciphertext {
            scheme_id: SchemeId::Additive,
            parts: bad,
        };
        assert!(add.sk.decrypt(&c).is_err());
    }
    let p = add.pk.plaintext_modulus().clone();
    // n itself is not a unit mod n²
    let c = Ciphertext {
        scheme_id: SchemeId::Additive,
        parts: vec![p],
    };
    assert!(matches!(add.sk.decrypt(&c), Err(Error::Decode(_))));

    let mul = key(SchemeId::Multiplicative, 64, 1);
    let c = Ciphertext {
        scheme_id: SchemeId::Multiplicative,
        parts: vec![big(1)],
    };
    assert!(matches!(mul.sk.decrypt(&c), Err(Error::Decode(_))));
}

#[test]
fn hom_op_rejects_mixed_schemes() {
    let a = key(SchemeId::Multiplicative, 64, 1);
    let b = KeyPair::elgamal_from_secret(
        SchemeId::BrokenDeterministic,
        a.pk.group().unwrap().clone(),
        big(5),
    )
    .unwrap();
    let mut rng = RngHandle::from_u64(1);
    let ca = a.pk.encrypt(&a.pk.plaintext_identity(), &mut rng).unwrap();
    let cb = b.pk.encrypt(&b.pk.plaintext_identity(), &mut rng).unwrap();
    assert!(matches!(a.pk.hom_op(&ca, &cb), Err(Error::SchemeMismatch { .. })));
    assert!(matches!(b.sk.decrypt(&ca), Err(Error::SchemeMismatch { .. })));
}

#[test]
fn key_files_and_envelopes_roundtrip() {
    for scheme in SchemeId::ALL {
        let keys = key(scheme, 64, 17);
        let json = serde_json::to_string(&keys).unwrap();
        let back: KeyPair = serde_json::from_str(&json).unwrap();
        assert_eq!(back, keys);

        let mut rng = RngHandle::from_u64(1);
        let c = keys.pk.encrypt(&keys.pk.random_plaintext(&mut rng), &mut rng).unwrap();
        let env = keys.pk.ciphertext_envelope(&c).unwrap();
        assert_eq!(env.lambda, 64);
        assert_eq!(keys.pk.ciphertext_from_envelope(&env).unwrap(), c);
    }
}

#[test]
fn key_file_layout_is_stable() {
    let keys = KeyPair::paillier_from_primes(SchemeId::Additive, &big(3), &big(5)).unwrap();
    let json = serde_json::to_string(&keys).unwrap();
    // n = 15, lcm(2, 4) = 4, μ = 4⁻¹ mod 15 = 4
    assert_eq!(
        json,
        r#"{"version":1,"kind":"keypair","scheme_id":"additive","lambda":4,"public":["000000010f"],"secret":["000000010f","0000000104","0000000104"]}"#
    );
}

#[test]
fn tampered_key_file_is_rejected() {
    let keys = key(SchemeId::Multiplicative, 64, 2);
    let mut file = keys.to_key_file();
    file.public[3] = serial::encode_part(&big(4));
    assert!(KeyPair::from_key_file(&file).is_err());
}

#[test]
fn fingerprint_is_stable() {
    let a = key(SchemeId::Additive, 64, 8);
    assert_eq!(a.pk.fingerprint(), key(SchemeId::Additive, 64, 8).pk.fingerprint());
    assert_eq!(a.pk.fingerprint().len(), 32);
}

#[test]
fn scheme_names_parse() {
    for scheme in SchemeId::ALL {
        assert_eq!(scheme.name().parse::<SchemeId>().unwrap(), scheme);
    }
    assert!("rsa".parse::<SchemeId>().is_err());
}
