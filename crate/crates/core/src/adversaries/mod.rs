//! Concrete attackers, the two reduction wrappers and the least-squares
//! eavesdropper.
//!
//! Registry ids: `random-guesser` (both games), `det-cpa` (IND-CPA only),
//! `det-pea` (IND-PEA only).

mod eavesdrop;
mod reductions;

use num_bigint::BigUint;

use crate::controllers::{eval_encrypted, ControlLaw, EncryptedControllerState, ParameterVector};
use crate::error::{domain, Result};
use crate::games::{CpaAdversary, CpaFactory, OracleHandle, PeaAdversary, PeaFactory};
use crate::modarith::RngHandle;
use crate::schemes::{Ciphertext, Homomorphism, Plaintext, PublicKey};

pub use eavesdrop::{
    ciphertext_number, eavesdrop_demo, least_squares_estimation, relative_error, EavesdropConfig, EavesdropReport,
};
pub use reductions::{
    reduce_cpa_to_pea, reduce_pea_to_cpa, run_reduction, CollapseRule, CpaToPea, PeaToCpa, ReductionDirection,
    ReductionReport, ReductionSpec,
};

pub const RANDOM_GUESSER: &str = "random-guesser";
pub const DET_CPA: &str = "det-cpa";
pub const DET_PEA: &str = "det-pea";
pub const ADVERSARY_IDS: [&str; 3] = [RANDOM_GUESSER, DET_CPA, DET_PEA];

/// Two distinct plaintexts of equal bit length that are valid under every
/// key of the scheme family: `(2, 3)` for the additive schemes and the
/// squares `(16, 25)` for the group schemes (squares are always residues).
pub fn challenge_pair(pk: &PublicKey) -> (Plaintext, Plaintext) {
    let (a, b) = match pk.scheme_id().homomorphism() {
        Homomorphism::Additive => (2u32, 3u32),
        Homomorphism::Multiplicative => (16, 25),
    };
    let modulus = pk.plaintext_modulus();
    let pt = |v: u32| Plaintext {
        value: BigUint::from(v),
        modulus: modulus.clone(),
    };
    (pt(a), pt(b))
}

fn broadcast_pair(pk: &PublicKey, law: &ControlLaw) -> (ParameterVector, ParameterVector) {
    let (a, b) = challenge_pair(pk);
    (ParameterVector::broadcast(a, law.r), ParameterVector::broadcast(b, law.r))
}

/// Fixed distinct challenges, fair-coin guesses, no oracle queries.
#[derive(Debug, Clone, Default)]
pub struct RandomGuesser;

impl CpaAdversary for RandomGuesser {
    fn challenge(&mut self, pk: &PublicKey, _rng: &mut RngHandle) -> (Plaintext, Plaintext) {
        challenge_pair(pk)
    }

    fn guess(&mut self, _c: &Ciphertext, rng: &mut RngHandle) -> bool {
        rng.coin()
    }
}

impl PeaAdversary for RandomGuesser {
    fn challenge(
        &mut self,
        pk: &PublicKey,
        law: &ControlLaw,
        _rng: &mut RngHandle,
    ) -> (ParameterVector, ParameterVector) {
        broadcast_pair(pk, law)
    }

    fn guess(&mut self, _oracle: &mut OracleHandle, rng: &mut RngHandle) -> bool {
        rng.coin()
    }
}

/// Re-encrypts `m₀` with the fixed public randomness and compares.
#[derive(Debug, Clone, Default)]
pub struct DetCpaDistinguisher {
    sigma: Option<(PublicKey, Plaintext)>,
}

impl CpaAdversary for DetCpaDistinguisher {
    fn challenge(&mut self, pk: &PublicKey, _rng: &mut RngHandle) -> (Plaintext, Plaintext) {
        let (m0, m1) = challenge_pair(pk);
        self.sigma = Some((pk.clone(), m0.clone()));
        (m0, m1)
    }

    fn guess(&mut self, c: &Ciphertext, _rng: &mut RngHandle) -> bool {
        let (pk, m0) = self.sigma.as_ref().expect("challenge phase ran");
        match pk.encrypt_fixed(m0) {
            Ok(c0) => c0 != *c,
            Err(_) => true,
        }
    }
}

/// Queries the oracle once and recomputes both candidate responses locally
/// with the fixed randomness.
#[derive(Debug, Clone, Default)]
pub struct DetPeaDistinguisher {
    sigma: Option<(PublicKey, ControlLaw, ParameterVector, ParameterVector)>,
    notes: Vec<String>,
}

impl DetPeaDistinguisher {
    fn candidate(pk: &PublicKey, law: &ControlLaw, k: &ParameterVector, cy: &[Ciphertext]) -> Result<Vec<Ciphertext>> {
        let ck = k.elements().iter().map(|ki| pk.encrypt_fixed(ki)).collect::<Result<Vec<_>>>()?;
        eval_encrypted(&EncryptedControllerState::new(*law, pk.clone(), ck)?, cy)
    }
}

impl PeaAdversary for DetPeaDistinguisher {
    fn challenge(
        &mut self,
        pk: &PublicKey,
        law: &ControlLaw,
        _rng: &mut RngHandle,
    ) -> (ParameterVector, ParameterVector) {
        let (k0, k1) = broadcast_pair(pk, law);
        self.sigma = Some((pk.clone(), *law, k0.clone(), k1.clone()));
        (k0, k1)
    }

    fn guess(&mut self, oracle: &mut OracleHandle, rng: &mut RngHandle) -> bool {
        let (pk, law, k0, k1) = self.sigma.as_ref().expect("challenge phase ran");
        let y: Vec<Plaintext> = (0..law.l).map(|_| pk.random_plaintext(rng)).collect();
        let attempt = (|| -> Result<Option<bool>> {
            let cy = y.iter().map(|v| pk.encrypt_fixed(v)).collect::<Result<Vec<_>>>()?;
            let response = oracle.query(&cy)?;
            if response == Self::candidate(pk, law, k0, &cy)? {
                Ok(Some(false))
            } else if response == Self::candidate(pk, law, k1, &cy)? {
                Ok(Some(true))
            } else {
                Ok(None)
            }
        })();
        match attempt {
            Ok(Some(guess)) => guess,
            Ok(None) => {
                self.notes.push("oracle response matched neither candidate; guessing 0".into());
                false
            }
            Err(e) => {
                self.notes.push(format!("oracle interaction failed: {e}; guessing 0"));
                false
            }
        }
    }

    fn notes(&self) -> Vec<String> {
        self.notes.clone()
    }
}

pub fn random_guesser_cpa() -> CpaFactory {
    CpaFactory::new(RANDOM_GUESSER, || Box::new(RandomGuesser))
}

pub fn random_guesser_pea() -> PeaFactory {
    PeaFactory::new(RANDOM_GUESSER, || Box::new(RandomGuesser))
}

pub fn det_cpa_distinguisher() -> CpaFactory {
    CpaFactory::new(DET_CPA, || Box::<DetCpaDistinguisher>::default())
}

pub fn det_pea_distinguisher() -> PeaFactory {
    PeaFactory::new(DET_PEA, || Box::<DetPeaDistinguisher>::default())
}

/// Looks up an IND-CPA adversary by id.
pub fn cpa_adversary(id: &str) -> Result<CpaFactory> {
    match id {
        RANDOM_GUESSER => Ok(random_guesser_cpa()),
        DET_CPA => Ok(det_cpa_distinguisher()),
        DET_PEA => Err(domain("det-pea plays only the IND-PEA game")),
        other => Err(unknown(other)),
    }
}

/// Looks up an IND-PEA adversary by id.
pub fn pea_adversary(id: &str) -> Result<PeaFactory> {
    match id {
        RANDOM_GUESSER => Ok(random_guesser_pea()),
        DET_PEA => Ok(det_pea_distinguisher()),
        DET_CPA => Err(domain("det-cpa plays only the IND-CPA game")),
        other => Err(unknown(other)),
    }
}

fn unknown(id: &str) -> crate::Error {
    domain(format!("unknown adversary `{id}` (known: {})", ADVERSARY_IDS.join(", ")))
}

#[cfg(test)]
mod tests;
