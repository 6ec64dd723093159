//! Static control laws `u = f(y; K)` over a plaintext space and their
//! ciphertext-domain counterparts.
//!
//! | family              | law                  | dims            | scheme family  |
//! |---------------------|----------------------|-----------------|----------------|
//! | `AdditiveBias`      | `uᵢ = yᵢ + Kᵢ`       | q = ℓ = r       | additive       |
//! | `MultiplicativeGain`| `uᵢ = Kᵢ · yᵢ`       | q = ℓ = r       | multiplicative |
//! | `StaticFeedback`    | `uᵢ = Σⱼ Fᵢⱼ yⱼ`     | r = q·ℓ         | multiplicative |
//!
//! `StaticFeedback` stores `F` row-major in the parameter vector. Its encrypted
//! form returns the `q×ℓ` grid of products `Enc(Fᵢⱼ)·Enc(yⱼ)` and leaves the
//! row sums to the decrypting side ([`decrypt_and_aggregate`]), so it emits
//! `q·ℓ` ciphertexts rather than `q`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::modarith::{mod_inv, RngHandle};
use crate::schemes::{Ciphertext, Homomorphism, Plaintext, PublicKey, SchemeId, SecretKey};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LawFamily {
    AdditiveBias,
    MultiplicativeGain,
    StaticFeedback,
}

impl LawFamily {
    pub fn name(self) -> &'static str {
        match self {
            LawFamily::AdditiveBias => "additive-bias",
            LawFamily::MultiplicativeGain => "multiplicative-gain",
            LawFamily::StaticFeedback => "static-feedback",
        }
    }
}

impl fmt::Display for LawFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LawFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "additive-bias" => Ok(LawFamily::AdditiveBias),
            "multiplicative-gain" => Ok(LawFamily::MultiplicativeGain),
            "static-feedback" => Ok(LawFamily::StaticFeedback),
            other => Err(domain(format!("unknown law family `{other}`"))),
        }
    }
}

/// A control law family with dimensions `u ∈ M^q`, `y ∈ M^ℓ`, `K ∈ M^r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ControlLaw {
    pub family: LawFamily,
    pub q: usize,
    pub l: usize,
    pub r: usize,
}

impl ControlLaw {
    pub fn new(family: LawFamily, q: usize, l: usize, r: usize) -> Result<Self> {
        if q == 0 || l == 0 || r == 0 {
            return Err(domain("law dimensions must be positive"));
        }
        let consistent = match family {
            LawFamily::AdditiveBias | LawFamily::MultiplicativeGain => q == l && l == r,
            LawFamily::StaticFeedback => r == q * l,
        };
        if !consistent {
            return Err(domain(format!(
                "dimensions q={q}, ℓ={l}, r={r} are inconsistent with {family}"
            )));
        }
        Ok(Self { family, q, l, r })
    }

    pub fn additive_bias(dim: usize) -> Result<Self> {
        Self::new(LawFamily::AdditiveBias, dim, dim, dim)
    }

    pub fn multiplicative_gain(dim: usize) -> Result<Self> {
        Self::new(LawFamily::MultiplicativeGain, dim, dim, dim)
    }

    pub fn static_feedback(q: usize, l: usize) -> Result<Self> {
        Self::new(LawFamily::StaticFeedback, q, l, q * l)
    }

    /// Homomorphism the encrypted law is built from.
    pub fn homomorphism(&self) -> Homomorphism {
        match self.family {
            LawFamily::AdditiveBias => Homomorphism::Additive,
            LawFamily::MultiplicativeGain | LawFamily::StaticFeedback => Homomorphism::Multiplicative,
        }
    }

    pub fn check_scheme(&self, scheme: SchemeId) -> Result<()> {
        if scheme.homomorphism() != self.homomorphism() {
            return Err(domain(format!(
                "{} needs a {:?} scheme but {scheme} is {:?}",
                self.family,
                self.homomorphism(),
                scheme.homomorphism()
            )));
        }
        Ok(())
    }

    /// Ciphertexts emitted by the encrypted law per evaluation.
    pub fn encrypted_output_len(&self) -> usize {
        match self.family {
            LawFamily::StaticFeedback => self.q * self.l,
            _ => self.q,
        }
    }

    /// Whether `K ↦ f(y; K)` is a bijection for a fixed `y`. For static
    /// feedback that holds exactly when q = r, i.e. ℓ = 1.
    pub fn check_bijective(&self) -> Result<()> {
        match self.family {
            LawFamily::AdditiveBias | LawFamily::MultiplicativeGain => Ok(()),
            LawFamily::StaticFeedback if self.l == 1 => Ok(()),
            LawFamily::StaticFeedback => Err(Error::NotBijective(format!(
                "static feedback u = F·y has an inverse in F only when q=r (ℓ = 1); got q={}, ℓ={}, r={}",
                self.q, self.l, self.r
            ))),
        }
    }
}

/// Controller parameter `K ∈ M^r`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParameterVector(pub Vec<Plaintext>);

impl ParameterVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn elements(&self) -> &[Plaintext] {
        &self.0
    }

    /// `[value; r]`, the broadcast used by the reduction wrappers.
    pub fn broadcast(value: Plaintext, r: usize) -> Self {
        Self(vec![value; r])
    }
}

impl From<Vec<Plaintext>> for ParameterVector {
    fn from(v: Vec<Plaintext>) -> Self {
        Self(v)
    }
}

/// The encrypted controller: `c_K` installed behind a law.
///
/// Fields are private; the only way to use `c_K` is [`eval_encrypted`].
#[derive(Debug, Clone)]
pub struct EncryptedControllerState {
    law: ControlLaw,
    pk: PublicKey,
    ck: Vec<Ciphertext>,
}

impl EncryptedControllerState {
    pub fn new(law: ControlLaw, pk: PublicKey, ck: Vec<Ciphertext>) -> Result<Self> {
        law.check_scheme(pk.scheme_id())?;
        if ck.len() != law.r {
            return Err(domain(format!("expected {} parameter ciphertexts, got {}", law.r, ck.len())));
        }
        for c in &ck {
            pk.check_ciphertext(c)?;
        }
        Ok(Self { law, pk, ck })
    }

    /// Elementwise `Enc(K)`.
    pub fn encrypt(law: ControlLaw, pk: &PublicKey, k: &ParameterVector, rng: &mut RngHandle) -> Result<Self> {
        let ck = k
            .elements()
            .iter()
            .map(|ki| pk.encrypt(ki, rng))
            .collect::<Result<Vec<_>>>()?;
        Self::new(law, pk.clone(), ck)
    }

    pub fn law(&self) -> &ControlLaw {
        &self.law
    }

    pub fn public_key(&self) -> &PublicKey {
        &self.pk
    }

    pub(crate) fn ciphertexts(&self) -> &[Ciphertext] {
        &self.ck
    }
}

fn common_modulus<'a>(values: impl IntoIterator<Item = &'a Plaintext>) -> Result<BigUint> {
    let mut modulus: Option<&BigUint> = None;
    for v in values {
        match modulus {
            None => modulus = Some(&v.modulus),
            Some(m) if m != &v.modulus => return Err(domain("plaintexts come from different spaces")),
            _ => {}
        }
    }
    modulus.cloned().ok_or_else(|| domain("empty input"))
}

fn pt(value: BigUint, modulus: &BigUint) -> Plaintext {
    Plaintext {
        value,
        modulus: modulus.clone(),
    }
}

/// `u = f(y; K)` over the plaintext space.
pub fn eval_plain(law: &ControlLaw, y: &[Plaintext], k: &ParameterVector) -> Result<Vec<Plaintext>> {
    if y.len() != law.l || k.len() != law.r {
        return Err(domain(format!(
            "expected ℓ={} outputs and r={} parameters, got {} and {}",
            law.l,
            law.r,
            y.len(),
            k.len()
        )));
    }
    let n = common_modulus(y.iter().chain(k.elements()))?;
    let k = k.elements();
    let u = match law.family {
        LawFamily::AdditiveBias => y
            .iter()
            .zip(k)
            .map(|(yi, ki)| pt((&yi.value + &ki.value) % &n, &n))
            .collect(),
        LawFamily::MultiplicativeGain => y
            .iter()
            .zip(k)
            .map(|(yi, ki)| pt(&ki.value * &yi.value % &n, &n))
            .collect(),
        LawFamily::StaticFeedback => k
            .chunks(law.l)
            .map(|row| {
                let sum = row
                    .iter()
                    .zip(y)
                    .fold(BigUint::zero(), |acc, (f, yj)| (acc + &f.value * &yj.value) % &n);
                pt(sum, &n)
            })
            .collect(),
    };
    Ok(u)
}

/// `f_Π(c_y; c_K)`.
pub fn eval_encrypted(state: &EncryptedControllerState, cy: &[Ciphertext]) -> Result<Vec<Ciphertext>> {
    let law = &state.law;
    if cy.len() != law.l {
        return Err(domain(format!("expected {} input ciphertexts, got {}", law.l, cy.len())));
    }
    let pk = &state.pk;
    match law.family {
        LawFamily::AdditiveBias => cy.iter().zip(&state.ck).map(|(c, k)| pk.hom_op(c, k)).collect(),
        LawFamily::MultiplicativeGain => cy.iter().zip(&state.ck).map(|(c, k)| pk.hom_op(k, c)).collect(),
        LawFamily::StaticFeedback => state
            .ck
            .chunks(law.l)
            .flat_map(|row| row.iter().zip(cy).map(|(f, c)| pk.hom_op(f, c)))
            .collect(),
    }
}

/// `K = f⁻¹(y; u)` for a law that is bijective in `K`.
pub fn eval_inverse_plain(law: &ControlLaw, y: &[Plaintext], u: &[Plaintext]) -> Result<ParameterVector> {
    law.check_bijective()?;
    if y.len() != law.l || u.len() != law.q {
        return Err(domain("dimension mismatch in inverse law"));
    }
    let n = common_modulus(y.iter().chain(u))?;
    let k = match law.family {
        LawFamily::AdditiveBias => y
            .iter()
            .zip(u)
            .map(|(yi, ui)| pt((&ui.value + &n - &yi.value) % &n, &n))
            .collect(),
        LawFamily::MultiplicativeGain => y
            .iter()
            .zip(u)
            .map(|(yi, ui)| Ok(pt(&ui.value * mod_inv(&yi.value, &n)? % &n, &n)))
            .collect::<Result<_>>()?,
        LawFamily::StaticFeedback => {
            let inv = mod_inv(&y[0].value, &n)?;
            u.iter().map(|ui| pt(&ui.value * &inv % &n, &n)).collect()
        }
    };
    Ok(ParameterVector(k))
}

/// `f⁻¹_Π(c_y; c_u)`, computed from public material only.
///
/// Every output is `c_u · c_y⁻¹` in the ciphertext group, so for
/// `c_u = f_Π(c_y; c_K)` the result equals `c_K` as ciphertexts, not only
/// after decryption.
pub fn eval_inverse_encrypted(
    law: &ControlLaw,
    pk: &PublicKey,
    cy: &[Ciphertext],
    cu: &[Ciphertext],
) -> Result<Vec<Ciphertext>> {
    law.check_bijective()?;
    law.check_scheme(pk.scheme_id())?;
    if cy.len() != law.l || cu.len() != law.q {
        return Err(domain("dimension mismatch in encrypted inverse law"));
    }
    match law.family {
        LawFamily::AdditiveBias | LawFamily::MultiplicativeGain => cu
            .iter()
            .zip(cy)
            .map(|(u, y)| pk.hom_op(u, &pk.hom_inv(y)?))
            .collect(),
        LawFamily::StaticFeedback => {
            let y_inv = pk.hom_inv(&cy[0])?;
            cu.iter().map(|u| pk.hom_op(u, &y_inv)).collect()
        }
    }
}

/// Decrypts the encrypted law's outputs and sums each row of products.
pub fn decrypt_and_aggregate(sk: &SecretKey, law: &ControlLaw, products: &[Ciphertext]) -> Result<Vec<Plaintext>> {
    if products.len() != law.encrypted_output_len() {
        return Err(domain(format!(
            "expected {} ciphertexts, got {}",
            law.encrypted_output_len(),
            products.len()
        )));
    }
    let width = products.len() / law.q;
    let decrypted = products.iter().map(|c| sk.decrypt(c)).collect::<Result<Vec<_>>>()?;
    let n = common_modulus(&decrypted)?;
    Ok(decrypted
        .chunks(width)
        .map(|row| {
            let sum = row.iter().fold(BigUint::zero(), |acc, v| (acc + &v.value) % &n);
            pt(sum, &n)
        })
        .collect())
}

/// Elementwise `Dec`.
pub fn decrypt_vector(sk: &SecretKey, cs: &[Ciphertext]) -> Result<Vec<Plaintext>> {
    cs.iter().map(|c| sk.decrypt(c)).collect()
}

/// Elementwise `Enc`.
pub fn encrypt_vector(pk: &PublicKey, ms: &[Plaintext], rng: &mut RngHandle) -> Result<Vec<Ciphertext>> {
    ms.iter().map(|m| pk.encrypt(m, rng)).collect()
}
