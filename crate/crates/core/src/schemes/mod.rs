//! The cryptosystem abstraction and its concrete instances.
//!
//! * [`SchemeId::Additive`]: Paillier-style, `Dec(c·c') = m + m' mod n`.
//! * [`SchemeId::Multiplicative`]: ElGamal over the quadratic residues of a
//!   safe prime, `Dec(c⊙c') = m·m' mod p`.
//! * [`SchemeId::BrokenDeterministic`]: the multiplicative scheme with the
//!   encryption randomness pinned to the public constant 1.
//! * [`SchemeId::BrokenAdditive`]: the additive scheme with ρ pinned to 1.
//!
//! The two broken variants keep correctness and homomorphism but make
//! encryption a deterministic function of the plaintext, so they are not
//! IND-CPA secure. They exist as negative controls for the games.

mod elgamal;
mod paillier;
pub mod serial;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub use elgamal::GroupParams;
use elgamal::{ElGamalPublic, ElGamalSecret};
use paillier::{PaillierPublic, PaillierSecret};
use serial::{part_hex, part_hex_vec, Envelope, EnvelopeKind, KeyFile, FORMAT_VERSION};

use crate::error::{domain, Error, Result};
use crate::modarith::RngHandle;

/// Modulus size used when none is given.
pub const DEFAULT_LAMBDA: u32 = 512;

/// Modulus sizes the experiments are calibrated for.
pub const EXPERIMENT_LAMBDAS: [u32; 6] = [64, 128, 256, 512, 1024, 2048];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeId {
    Additive,
    Multiplicative,
    BrokenDeterministic,
    BrokenAdditive,
}

/// Which plaintext operation the ciphertext operation realizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Homomorphism {
    Additive,
    Multiplicative,
}

impl SchemeId {
    pub const ALL: [SchemeId; 4] = [
        SchemeId::Additive,
        SchemeId::Multiplicative,
        SchemeId::BrokenDeterministic,
        SchemeId::BrokenAdditive,
    ];

    pub fn homomorphism(self) -> Homomorphism {
        match self {
            SchemeId::Additive | SchemeId::BrokenAdditive => Homomorphism::Additive,
            SchemeId::Multiplicative | SchemeId::BrokenDeterministic => Homomorphism::Multiplicative,
        }
    }

    /// True when encryption uses the fixed public randomness ρ = 1.
    pub fn is_deterministic(self) -> bool {
        matches!(self, SchemeId::BrokenDeterministic | SchemeId::BrokenAdditive)
    }

    pub fn uses_group(self) -> bool {
        self.homomorphism() == Homomorphism::Multiplicative
    }

    pub fn name(self) -> &'static str {
        match self {
            SchemeId::Additive => "additive",
            SchemeId::Multiplicative => "multiplicative",
            SchemeId::BrokenDeterministic => "broken-deterministic",
            SchemeId::BrokenAdditive => "broken-additive",
        }
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "additive" | "paillier" => Ok(SchemeId::Additive),
            "multiplicative" | "elgamal" => Ok(SchemeId::Multiplicative),
            "broken" | "broken-deterministic" => Ok(SchemeId::BrokenDeterministic),
            "broken-additive" => Ok(SchemeId::BrokenAdditive),
            other => Err(domain(format!("unknown scheme `{other}`"))),
        }
    }
}

/// Modulus bit length λ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SecurityParameter(u32);

impl SecurityParameter {
    pub const MIN: u32 = 16;

    pub fn new(lambda: u32) -> Result<Self> {
        if lambda < Self::MIN {
            return Err(domain(format!(
                "security parameter must be at least {} bits, got {lambda}",
                Self::MIN
            )));
        }
        Ok(Self(lambda))
    }

    pub fn bits(self) -> u32 {
        self.0
    }
}

impl Default for SecurityParameter {
    fn default() -> Self {
        Self(DEFAULT_LAMBDA)
    }
}

/// An element of a scheme's plaintext space `[0, modulus)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Plaintext {
    #[serde(with = "part_hex")]
    pub value: BigUint,
    #[serde(with = "part_hex")]
    pub modulus: BigUint,
}

impl Plaintext {
    pub fn new(value: impl Into<BigUint>, modulus: impl Into<BigUint>) -> Result<Self> {
        let (value, modulus) = (value.into(), modulus.into());
        if value >= modulus {
            return Err(domain("plaintext value must be below its modulus"));
        }
        Ok(Self { value, modulus })
    }

    /// Bit length of the canonical encoding; challenge pairs must agree on it.
    pub fn bit_len(&self) -> u64 {
        self.value.bits()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ciphertext {
    pub scheme_id: SchemeId,
    #[serde(with = "part_hex_vec")]
    pub parts: Vec<BigUint>,
}

impl Ciphertext {
    fn expected_parts(scheme: SchemeId) -> usize {
        match scheme.homomorphism() {
            Homomorphism::Additive => 1,
            Homomorphism::Multiplicative => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum PublicInner {
    Paillier(PaillierPublic),
    ElGamal(ElGamalPublic),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum SecretInner {
    Paillier(PaillierSecret),
    ElGamal(ElGamalSecret),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PublicKey {
    scheme_id: SchemeId,
    lambda: u32,
    inner: PublicInner,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SecretKey {
    scheme_id: SchemeId,
    lambda: u32,
    inner: SecretInner,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyPair {
    pub pk: PublicKey,
    pub sk: SecretKey,
}

/// Public parameters fixed before key generation.
///
/// For the group-based schemes this is the safe-prime group, which is
/// expensive to find and is shared by all keys drawn from one setup. The
/// additive schemes have no shared parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemeSetup {
    scheme_id: SchemeId,
    lambda: SecurityParameter,
    group: Option<GroupParams>,
}

impl SchemeSetup {
    pub fn new(scheme_id: SchemeId, lambda: SecurityParameter, rng: &mut RngHandle) -> Result<Self> {
        let group = if scheme_id.uses_group() {
            Some(GroupParams::generate(lambda.bits(), rng)?)
        } else {
            None
        };
        Ok(Self {
            scheme_id,
            lambda,
            group,
        })
    }

    /// Setup over an explicit group (useful for tiny exhaustive checks).
    pub fn with_group(scheme_id: SchemeId, group: GroupParams) -> Result<Self> {
        if !scheme_id.uses_group() {
            return Err(domain(format!("{scheme_id} does not use a group")));
        }
        let lambda = SecurityParameter(group.p.bits() as u32);
        Ok(Self {
            scheme_id,
            lambda,
            group: Some(group),
        })
    }

    pub fn scheme_id(&self) -> SchemeId {
        self.scheme_id
    }

    pub fn lambda(&self) -> SecurityParameter {
        self.lambda
    }

    pub fn group(&self) -> Option<&GroupParams> {
        self.group.as_ref()
    }

    pub fn keygen(&self, rng: &mut RngHandle) -> Result<KeyPair> {
        match &self.group {
            Some(group) => {
                let (pk, sk) = elgamal::generate_in(group, rng)?;
                Ok(KeyPair::from_elgamal(self.scheme_id, self.lambda.bits(), pk, sk))
            }
            None => {
                let (pk, sk) = paillier::generate(self.lambda.bits(), rng)?;
                Ok(KeyPair::from_paillier(self.scheme_id, self.lambda.bits(), pk, sk))
            }
        }
    }
}

/// Generates a key pair, including fresh group parameters where the scheme needs them.
pub fn keygen(scheme_id: SchemeId, lambda: SecurityParameter, rng: &mut RngHandle) -> Result<KeyPair> {
    SchemeSetup::new(scheme_id, lambda, rng)?.keygen(rng)
}

impl KeyPair {
    fn from_paillier(scheme_id: SchemeId, lambda: u32, pk: PaillierPublic, sk: PaillierSecret) -> Self {
        Self {
            pk: PublicKey {
                scheme_id,
                lambda,
                inner: PublicInner::Paillier(pk),
            },
            sk: SecretKey {
                scheme_id,
                lambda,
                inner: SecretInner::Paillier(sk),
            },
        }
    }

    fn from_elgamal(scheme_id: SchemeId, lambda: u32, pk: ElGamalPublic, sk: ElGamalSecret) -> Self {
        Self {
            pk: PublicKey {
                scheme_id,
                lambda,
                inner: PublicInner::ElGamal(pk),
            },
            sk: SecretKey {
                scheme_id,
                lambda,
                inner: SecretInner::ElGamal(sk),
            },
        }
    }

    /// Additive-family key pair from explicit primes.
    pub fn paillier_from_primes(scheme_id: SchemeId, p: &BigUint, q: &BigUint) -> Result<Self> {
        if scheme_id.homomorphism() != Homomorphism::Additive {
            return Err(domain(format!("{scheme_id} is not an additive scheme")));
        }
        let (pk, sk) = paillier::keys_from_primes(p, q)?;
        let lambda = pk.n.bits() as u32;
        Ok(Self::from_paillier(scheme_id, lambda, pk, sk))
    }

    /// Group-family key pair from an explicit group and secret exponent.
    pub fn elgamal_from_secret(scheme_id: SchemeId, group: GroupParams, x: BigUint) -> Result<Self> {
        if !scheme_id.uses_group() {
            return Err(domain(format!("{scheme_id} is not a group scheme")));
        }
        let lambda = group.p.bits() as u32;
        let (pk, sk) = elgamal::keys_from_secret(group, x)?;
        Ok(Self::from_elgamal(scheme_id, lambda, pk, sk))
    }

    pub fn scheme_id(&self) -> SchemeId {
        self.pk.scheme_id
    }

    pub fn to_key_file(&self) -> KeyFile {
        KeyFile {
            version: FORMAT_VERSION,
            kind: "keypair".into(),
            scheme_id: self.pk.scheme_id,
            lambda: self.pk.lambda,
            public: serial::encode_parts(&self.pk.parts()),
            secret: serial::encode_parts(&self.sk.parts()),
        }
    }

    pub fn from_key_file(file: &KeyFile) -> Result<Self> {
        if file.version != FORMAT_VERSION || file.kind != "keypair" {
            return Err(Error::Decode(format!(
                "unsupported key file (version {}, kind {})",
                file.version, file.kind
            )));
        }
        let public = serial::decode_parts(&file.public)?;
        let secret = serial::decode_parts(&file.secret)?;
        let pair = if file.scheme_id.uses_group() {
            let [p, q, g, x] = <[BigUint; 4]>::try_from(secret)
                .map_err(|_| Error::Decode("group secret key needs 4 parts".into()))?;
            Self::elgamal_from_secret(file.scheme_id, GroupParams::new(p, q, g)?, x)?
        } else {
            let [n, carmichael, mu] = <[BigUint; 3]>::try_from(secret)
                .map_err(|_| Error::Decode("additive secret key needs 3 parts".into()))?;
            let n_squared = &n * &n;
            let pk = PaillierPublic {
                n: n.clone(),
                n_squared: n_squared.clone(),
            };
            let sk = PaillierSecret {
                n,
                n_squared,
                carmichael,
                mu,
            };
            Self::from_paillier(file.scheme_id, file.lambda, pk, sk)
        };
        if pair.pk.parts() != public || pair.pk.lambda != file.lambda {
            return Err(Error::Decode("public key does not match secret key".into()));
        }
        Ok(pair)
    }
}

impl Serialize for KeyPair {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_key_file().serialize(s)
    }
}

impl<'de> Deserialize<'de> for KeyPair {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let file = KeyFile::deserialize(d)?;
        KeyPair::from_key_file(&file).map_err(serde::de::Error::custom)
    }
}

impl PublicKey {
    pub fn scheme_id(&self) -> SchemeId {
        self.scheme_id
    }

    pub fn lambda(&self) -> u32 {
        self.lambda
    }

    /// Size of the plaintext space: `n` or `p`.
    pub fn plaintext_modulus(&self) -> &BigUint {
        match &self.inner {
            PublicInner::Paillier(pk) => &pk.n,
            PublicInner::ElGamal(pk) => &pk.group.p,
        }
    }

    pub fn group(&self) -> Option<&GroupParams> {
        match &self.inner {
            PublicInner::ElGamal(pk) => Some(&pk.group),
            PublicInner::Paillier(_) => None,
        }
    }

    /// Modulus of the ciphertext group: `n²` or `p`.
    pub fn ciphertext_modulus(&self) -> &BigUint {
        match &self.inner {
            PublicInner::Paillier(pk) => &pk.n_squared,
            PublicInner::ElGamal(pk) => &pk.group.p,
        }
    }

    /// Public integers: `[n]` or `[p, q, g, h]`.
    pub fn parts(&self) -> Vec<BigUint> {
        match &self.inner {
            PublicInner::Paillier(pk) => vec![pk.n.clone()],
            PublicInner::ElGamal(pk) => vec![
                pk.group.p.clone(),
                pk.group.q.clone(),
                pk.group.g.clone(),
                pk.h.clone(),
            ],
        }
    }

    /// Whether `value` belongs to this key's plaintext space.
    pub fn is_plaintext(&self, value: &BigUint) -> bool {
        match &self.inner {
            PublicInner::Paillier(pk) => value < &pk.n,
            PublicInner::ElGamal(pk) => pk.group.contains(value),
        }
    }

    pub fn plaintext(&self, value: impl Into<BigUint>) -> Result<Plaintext> {
        let value = value.into();
        if !self.is_plaintext(&value) {
            return Err(domain("value is outside this key's plaintext space"));
        }
        Ok(Plaintext {
            value,
            modulus: self.plaintext_modulus().clone(),
        })
    }

    pub fn check_plaintext(&self, m: &Plaintext) -> Result<()> {
        if &m.modulus != self.plaintext_modulus() || !self.is_plaintext(&m.value) {
            return Err(domain("plaintext is outside this key's plaintext space"));
        }
        Ok(())
    }

    /// The group identity of the plaintext operation: 0 or 1.
    pub fn plaintext_identity(&self) -> Plaintext {
        let value = match self.scheme_id.homomorphism() {
            Homomorphism::Additive => BigUint::default(),
            Homomorphism::Multiplicative => BigUint::one(),
        };
        Plaintext {
            value,
            modulus: self.plaintext_modulus().clone(),
        }
    }

    /// Uniform element of the plaintext space.
    pub fn random_plaintext(&self, rng: &mut RngHandle) -> Plaintext {
        let value = match &self.inner {
            PublicInner::Paillier(pk) => crate::modarith::random_below(&pk.n, rng),
            PublicInner::ElGamal(pk) => {
                let k = crate::modarith::random_below(&pk.group.q, rng);
                pk.group.g.modpow(&k, &pk.group.p)
            }
        };
        Plaintext {
            value,
            modulus: self.plaintext_modulus().clone(),
        }
    }

    /// Samples encryption randomness from the scheme's randomness space.
    pub fn sample_randomness(&self, rng: &mut RngHandle) -> BigUint {
        match &self.inner {
            PublicInner::Paillier(pk) => paillier::sample_randomness(pk, rng),
            PublicInner::ElGamal(pk) => pk.group.sample_exponent(rng),
        }
    }

    /// Encrypts `m`. Deterministic schemes ignore `rng` and use ρ = 1.
    pub fn encrypt(&self, m: &Plaintext, rng: &mut RngHandle) -> Result<Ciphertext> {
        if self.scheme_id.is_deterministic() {
            return self.encrypt_fixed(m);
        }
        let rho = self.sample_randomness(rng);
        self.encrypt_with(m, &rho)
    }

    /// Encrypts with the constant public randomness ρ = 1.
    pub fn encrypt_fixed(&self, m: &Plaintext) -> Result<Ciphertext> {
        self.encrypt_with(m, &BigUint::one())
    }

    /// Encrypts with caller-chosen randomness ρ.
    pub fn encrypt_with(&self, m: &Plaintext, rho: &BigUint) -> Result<Ciphertext> {
        self.check_plaintext(m)?;
        let parts = match &self.inner {
            PublicInner::Paillier(pk) => vec![paillier::encrypt_with(pk, &m.value, rho)?],
            PublicInner::ElGamal(pk) => elgamal::encrypt_with(pk, &m.value, rho)?.to_vec(),
        };
        Ok(Ciphertext {
            scheme_id: self.scheme_id,
            parts,
        })
    }

    /// Checks that `c` is a ciphertext of this key's scheme with in-range parts.
    pub fn check_ciphertext(&self, c: &Ciphertext) -> Result<()> {
        if c.scheme_id != self.scheme_id {
            return Err(Error::SchemeMismatch {
                expected: self.scheme_id.to_string(),
                found: c.scheme_id.to_string(),
            });
        }
        if c.parts.len() != Ciphertext::expected_parts(self.scheme_id) {
            return Err(domain("wrong number of ciphertext components"));
        }
        let modulus = self.ciphertext_modulus();
        if c.parts.iter().any(|x| x == &BigUint::default() || x >= modulus) {
            return Err(domain("ciphertext component outside the ciphertext group"));
        }
        Ok(())
    }

    /// Ciphertext operation: product in the ciphertext group.
    pub fn hom_op(&self, a: &Ciphertext, b: &Ciphertext) -> Result<Ciphertext> {
        self.check_ciphertext(a)?;
        self.check_ciphertext(b)?;
        let parts = match &self.inner {
            PublicInner::Paillier(pk) => vec![paillier::combine(pk, &a.parts[0], &b.parts[0])],
            PublicInner::ElGamal(pk) => elgamal::combine(pk, &a.parts, &b.parts),
        };
        Ok(Ciphertext {
            scheme_id: self.scheme_id,
            parts,
        })
    }

    /// Group inverse of a ciphertext: decrypts to `-m mod n` or `m⁻¹ mod p`.
    pub fn hom_inv(&self, c: &Ciphertext) -> Result<Ciphertext> {
        self.check_ciphertext(c)?;
        let parts = match &self.inner {
            PublicInner::Paillier(pk) => vec![paillier::invert(pk, &c.parts[0])?],
            PublicInner::ElGamal(pk) => elgamal::invert(pk, &c.parts)?,
        };
        Ok(Ciphertext {
            scheme_id: self.scheme_id,
            parts,
        })
    }

    pub fn to_envelope(&self) -> Envelope {
        Envelope {
            version: FORMAT_VERSION,
            kind: EnvelopeKind::PublicKey,
            scheme_id: self.scheme_id,
            lambda: self.lambda,
            parts: serial::encode_parts(&self.parts()),
        }
    }

    pub fn ciphertext_envelope(&self, c: &Ciphertext) -> Result<Envelope> {
        self.check_ciphertext(c)?;
        Ok(Envelope {
            version: FORMAT_VERSION,
            kind: EnvelopeKind::Ciphertext,
            scheme_id: c.scheme_id,
            lambda: self.lambda,
            parts: serial::encode_parts(&c.parts),
        })
    }

    pub fn ciphertext_from_envelope(&self, env: &Envelope) -> Result<Ciphertext> {
        if env.version != FORMAT_VERSION || env.kind != EnvelopeKind::Ciphertext {
            return Err(Error::Decode("not a version-1 ciphertext envelope".into()));
        }
        let c = Ciphertext {
            scheme_id: env.scheme_id,
            parts: serial::decode_parts(&env.parts)?,
        };
        self.check_ciphertext(&c).map_err(|e| Error::Decode(e.to_string()))?;
        Ok(c)
    }

    /// Hex SHA-256 of the canonical public-key envelope, truncated to 16 bytes.
    pub fn fingerprint(&self) -> String {
        let json = serde_json::to_vec(&self.to_envelope()).expect("envelope serializes");
        hex::encode(&Sha256::digest(&json)[..16])
    }
}

impl SecretKey {
    pub fn scheme_id(&self) -> SchemeId {
        self.scheme_id
    }

    /// Secret integers: `[n, lcm(p-1, q-1), μ]` or `[p, q, g, x]`.
    pub fn parts(&self) -> Vec<BigUint> {
        match &self.inner {
            SecretInner::Paillier(sk) => vec![sk.n.clone(), sk.carmichael.clone(), sk.mu.clone()],
            SecretInner::ElGamal(sk) => vec![
                sk.group.p.clone(),
                sk.group.q.clone(),
                sk.group.g.clone(),
                sk.x.clone(),
            ],
        }
    }

    fn plaintext_modulus(&self) -> &BigUint {
        match &self.inner {
            SecretInner::Paillier(sk) => &sk.n,
            SecretInner::ElGamal(sk) => &sk.group.p,
        }
    }

    pub fn decrypt(&self, c: &Ciphertext) -> Result<Plaintext> {
        if c.scheme_id != self.scheme_id {
            return Err(Error::SchemeMismatch {
                expected: self.scheme_id.to_string(),
                found: c.scheme_id.to_string(),
            });
        }
        if c.parts.len() != Ciphertext::expected_parts(self.scheme_id) {
            return Err(Error::Decode("wrong number of ciphertext components".into()));
        }
        let value = match &self.inner {
            SecretInner::Paillier(sk) => paillier::decrypt(sk, &c.parts[0])?,
            SecretInner::ElGamal(sk) => elgamal::decrypt(sk, &c.parts[0], &c.parts[1])?,
        };
        Ok(Plaintext {
            value,
            modulus: self.plaintext_modulus().clone(),
        })
    }
}

#[cfg(test)]
mod tests;
