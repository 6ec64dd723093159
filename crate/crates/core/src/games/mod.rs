//! IND-CPA and IND-PEA games, the encrypted-control oracle and Monte-Carlo
//! advantage estimation.
//!
//! Every game is driven by one 256-bit seed. Key generation, the challenger
//! and the adversary each draw from their own child stream, so changing what
//! an adversary does with its coins never shifts the challenger's bit.
//! Estimates derive one child seed per trial and share the (expensive)
//! scheme setup across all trials of a run.

mod stats;

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::controllers::{eval_encrypted, ControlLaw, EncryptedControllerState, ParameterVector};
use crate::error::{domain, Error, Result};
use crate::modarith::RngHandle;
use crate::schemes::{Ciphertext, KeyPair, Plaintext, PublicKey, SchemeId, SchemeSetup, SecurityParameter};

pub use stats::{clopper_pearson, AdvantageEstimate, Verdict, CONFIDENCE};

/// Transcript and summary format version.
pub const TRANSCRIPT_VERSION: u32 = 1;

/// Oracle budget used when none is configured: λ queries.
pub fn default_budget(lambda: SecurityParameter) -> usize {
    lambda.bits() as usize
}

/// Attacker `A = (A₁, A₂)` against IND-CPA. One instance plays one game;
/// anything kept between the two phases is the adversary's state σ.
pub trait CpaAdversary: Send {
    fn challenge(&mut self, pk: &PublicKey, rng: &mut RngHandle) -> (Plaintext, Plaintext);

    /// Guess for the hidden bit, `false` = 0.
    fn guess(&mut self, c: &Ciphertext, rng: &mut RngHandle) -> bool;

    /// Anomalies worth recording in the transcript.
    fn notes(&self) -> Vec<String> {
        Vec::new()
    }
}

/// Attacker `B = (B₁, B₂)` against IND-PEA. The second phase only sees the
/// oracle, never a ciphertext of the chosen parameter.
pub trait PeaAdversary: Send {
    fn challenge(
        &mut self,
        pk: &PublicKey,
        law: &ControlLaw,
        rng: &mut RngHandle,
    ) -> (ParameterVector, ParameterVector);

    fn guess(&mut self, oracle: &mut OracleHandle, rng: &mut RngHandle) -> bool;

    fn notes(&self) -> Vec<String> {
        Vec::new()
    }
}

type CpaSpawn = dyn Fn() -> Box<dyn CpaAdversary> + Send + Sync;
type PeaSpawn = dyn Fn() -> Box<dyn PeaAdversary> + Send + Sync;

/// Named source of fresh per-game CPA adversaries.
#[derive(Clone)]
pub struct CpaFactory {
    id: String,
    spawn: Arc<CpaSpawn>,
}

impl CpaFactory {
    pub fn new<F>(id: impl Into<String>, spawn: F) -> Self
    where
        F: Fn() -> Box<dyn CpaAdversary> + Send + Sync + 'static,
    {
        Self {
            id: id.into(),
            spawn: Arc::new(spawn),
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn spawn(&self) -> Box<dyn CpaAdversary> {
        (self.spawn)()
    }
}

/// Named source of fresh per-game PEA adversaries.
#[derive(Clone)]
pub struct PeaFactory {
    id: String,
    spawn: Arc<PeaSpawn>,
}

impl PeaFactory {
    pub fn new<F>(id: impl Into<String>, spawn: F) -> Self
    where
        F: Fn() -> Box<dyn PeaAdversary> + Send + Sync + 'static,
    {
        Self {
            id: id.into(),
            spawn: Arc::new(spawn),
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn spawn(&self) -> Box<dyn PeaAdversary> {
        (self.spawn)()
    }
}

impl std::fmt::Debug for CpaFactory {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CpaFactory").field("id", &self.id).finish()
    }
}

impl std::fmt::Debug for PeaFactory {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PeaFactory").field("id", &self.id).finish()
    }
}

#[derive(Debug, Clone)]
pub enum Adversary {
    Cpa(CpaFactory),
    Pea(PeaFactory),
}

impl Adversary {
    pub fn id(&self) -> &str {
        match self {
            Adversary::Cpa(f) => f.id(),
            Adversary::Pea(f) => f.id(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleQuery {
    pub input: Vec<Ciphertext>,
    pub output: Vec<Ciphertext>,
}

/// Query access to `f_Π(·; c_K)` for a hidden `c_K`.
///
/// The surface is deliberately small: [`query`](Self::query), the counters,
/// and the public context (law and public key). There is no accessor for
/// `c_K`, and no secret key is ever stored.
pub struct OracleHandle {
    state: EncryptedControllerState,
    budget: usize,
    log: Vec<OracleQuery>,
}

impl OracleHandle {
    pub fn new(state: EncryptedControllerState, budget: usize) -> Self {
        Self {
            state,
            budget,
            log: Vec::new(),
        }
    }

    /// Answers `f_Π(c_y; c_K)`. Once the budget is spent every further query
    /// fails with [`Error::BudgetExhausted`]; malformed queries fail without
    /// consuming budget.
    pub fn query(&mut self, cy: &[Ciphertext]) -> Result<Vec<Ciphertext>> {
        if self.log.len() >= self.budget {
            return Err(Error::BudgetExhausted(self.budget));
        }
        let output = eval_encrypted(&self.state, cy)?;
        self.log.push(OracleQuery {
            input: cy.to_vec(),
            output: output.clone(),
        });
        Ok(output)
    }

    pub fn queries_used(&self) -> usize {
        self.log.len()
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn law(&self) -> &ControlLaw {
        self.state.law()
    }

    pub fn public_key(&self) -> &PublicKey {
        self.state.public_key()
    }

    pub fn into_log(self) -> Vec<OracleQuery> {
        self.log
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GameKind {
    Cpa,
    Pea,
}

/// Everything a game did, sufficient to replay and audit it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameTranscript {
    pub version: u32,
    pub game: GameKind,
    /// Hex of the trial's 256-bit seed.
    pub seed: String,
    pub scheme_id: SchemeId,
    pub lambda: u32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub law: Option<ControlLaw>,
    pub keys: KeyPair,
    /// `(m₀, m₁)`, or `(K₀, K₁)` for the parameter game.
    pub challenge: [Vec<Plaintext>; 2],
    pub b: u8,
    /// Ciphertext handed to a CPA adversary, or `c_K` installed in the oracle.
    pub challenge_ciphertexts: Vec<Ciphertext>,
    pub queries: Vec<OracleQuery>,
    pub guess: Option<u8>,
    pub win: bool,
    /// Set when the adversary's challenge was malformed; the challenger wins.
    pub forfeit: Option<String>,
    pub notes: Vec<String>,
}

impl GameTranscript {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("transcript serializes")
    }

    /// SHA-256 of the compact JSON form, hex encoded.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_json().as_bytes()))
    }
}

/// Why a challenge pair cannot be played, if it cannot.
fn challenge_violation(pk: &PublicKey, m0: &[Plaintext], m1: &[Plaintext], dim: usize) -> Option<String> {
    if m0.len() != dim || m1.len() != dim {
        return Some(format!(
            "challenge dimensions {} and {} differ from the required {dim}",
            m0.len(),
            m1.len()
        ));
    }
    if m0 == m1 {
        return Some("challenge messages are equal".into());
    }
    for (a, b) in m0.iter().zip(m1) {
        if pk.check_plaintext(a).is_err() || pk.check_plaintext(b).is_err() {
            return Some("challenge message is outside the plaintext space".into());
        }
        if a.bit_len() != b.bit_len() {
            return Some(format!(
                "challenge messages differ in size ({} vs {} bits)",
                a.bit_len(),
                b.bit_len()
            ));
        }
    }
    None
}

fn bit(b: bool) -> u8 {
    u8::from(b)
}

fn setup_for(scheme_id: SchemeId, lambda: SecurityParameter, root: &RngHandle) -> Result<SchemeSetup> {
    SchemeSetup::new(scheme_id, lambda, &mut root.child("setup", 0))
}

/// One IND-CPA game over an existing setup.
pub fn play_cpa(setup: &SchemeSetup, adversary: &mut dyn CpaAdversary, trial: &RngHandle) -> Result<GameTranscript> {
    let keys = setup.keygen(&mut trial.child("keygen", 0))?;
    let mut challenger = trial.child("challenger", 0);
    let mut coins = trial.child("adversary", 0);

    let (m0, m1) = adversary.challenge(&keys.pk, &mut coins);
    let b = challenger.coin();
    let forfeit = challenge_violation(&keys.pk, std::slice::from_ref(&m0), std::slice::from_ref(&m1), 1);

    let (guess, challenge_ciphertexts) = if forfeit.is_some() {
        (None, Vec::new())
    } else {
        let c = keys.pk.encrypt(if b { &m1 } else { &m0 }, &mut challenger)?;
        (Some(adversary.guess(&c, &mut coins)), vec![c])
    };
    Ok(GameTranscript {
        version: TRANSCRIPT_VERSION,
        game: GameKind::Cpa,
        seed: trial.seed_hex(),
        scheme_id: setup.scheme_id(),
        lambda: setup.lambda().bits(),
        law: None,
        challenge: [vec![m0], vec![m1]],
        b: bit(b),
        challenge_ciphertexts,
        queries: Vec::new(),
        guess: guess.map(bit),
        win: guess == Some(b),
        forfeit,
        notes: adversary.notes(),
        keys,
    })
}

/// One IND-PEA game over an existing setup.
pub fn play_pea(
    setup: &SchemeSetup,
    law: &ControlLaw,
    budget: usize,
    adversary: &mut dyn PeaAdversary,
    trial: &RngHandle,
) -> Result<GameTranscript> {
    law.check_scheme(setup.scheme_id())?;
    if budget == 0 {
        return Err(domain("oracle budget must be at least 1"));
    }
    let keys = setup.keygen(&mut trial.child("keygen", 0))?;
    let mut challenger = trial.child("challenger", 0);
    let mut coins = trial.child("adversary", 0);

    let (k0, k1) = adversary.challenge(&keys.pk, law, &mut coins);
    let b = challenger.coin();
    let forfeit = challenge_violation(&keys.pk, k0.elements(), k1.elements(), law.r);

    let (guess, installed, queries) = if forfeit.is_some() {
        (None, Vec::new(), Vec::new())
    } else {
        let kb = if b { &k1 } else { &k0 };
        let state = EncryptedControllerState::encrypt(*law, &keys.pk, kb, &mut challenger)?;
        let installed = state.ciphertexts().to_vec();
        let mut oracle = OracleHandle::new(state, budget);
        let guess = adversary.guess(&mut oracle, &mut coins);
        (Some(guess), installed, oracle.into_log())
    };
    Ok(GameTranscript {
        version: TRANSCRIPT_VERSION,
        game: GameKind::Pea,
        seed: trial.seed_hex(),
        scheme_id: setup.scheme_id(),
        lambda: setup.lambda().bits(),
        law: Some(*law),
        challenge: [k0.0, k1.0],
        b: bit(b),
        challenge_ciphertexts: installed,
        queries,
        guess: guess.map(bit),
        win: guess == Some(b),
        forfeit,
        notes: adversary.notes(),
        keys,
    })
}

/// Runs a single IND-CPA game from a seed; identical to trial 0 of
/// [`estimate_advantage`] with the same seed.
pub fn run_cpa_game(
    scheme_id: SchemeId,
    lambda: SecurityParameter,
    adversary: &mut dyn CpaAdversary,
    seed: u64,
) -> Result<GameTranscript> {
    let root = RngHandle::from_u64(seed);
    let setup = setup_for(scheme_id, lambda, &root)?;
    play_cpa(&setup, adversary, &root.child("trial", 0))
}

/// Runs a single IND-PEA game from a seed.
pub fn run_pea_game(
    scheme_id: SchemeId,
    law: &ControlLaw,
    lambda: SecurityParameter,
    adversary: &mut dyn PeaAdversary,
    oracle_budget: usize,
    seed: u64,
) -> Result<GameTranscript> {
    law.check_scheme(scheme_id)?;
    let root = RngHandle::from_u64(seed);
    let setup = setup_for(scheme_id, lambda, &root)?;
    play_pea(&setup, law, oracle_budget, adversary, &root.child("trial", 0))
}

/// Which game an estimate repeats.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "game", rename_all = "kebab-case")]
pub enum GameSpec {
    Cpa {
        scheme_id: SchemeId,
        lambda: SecurityParameter,
    },
    Pea {
        scheme_id: SchemeId,
        lambda: SecurityParameter,
        law: ControlLaw,
        budget: usize,
    },
}

impl GameSpec {
    pub fn scheme_id(&self) -> SchemeId {
        match *self {
            GameSpec::Cpa { scheme_id, .. } | GameSpec::Pea { scheme_id, .. } => scheme_id,
        }
    }

    pub fn lambda(&self) -> SecurityParameter {
        match *self {
            GameSpec::Cpa { lambda, .. } | GameSpec::Pea { lambda, .. } => lambda,
        }
    }

    pub fn kind(&self) -> GameKind {
        match self {
            GameSpec::Cpa { .. } => GameKind::Cpa,
            GameSpec::Pea { .. } => GameKind::Pea,
        }
    }
}

/// Per-trial summary row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRow {
    pub trial: usize,
    pub b: u8,
    pub guess: Option<u8>,
    pub win: bool,
    pub queries: usize,
    pub forfeit: bool,
    pub anomalies: usize,
    pub transcript_hash: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdvantageRun {
    pub game: GameSpec,
    pub adversary: String,
    pub seed: u64,
    pub estimate: AdvantageEstimate,
    /// SHA-256 over the per-trial transcript hashes in trial order.
    pub transcript_digest: String,
    pub rows: Vec<TrialRow>,
}

impl AdvantageRun {
    pub fn forfeits(&self) -> usize {
        self.rows.iter().filter(|r| r.forfeit).count()
    }

    /// Smallest and largest oracle query counts over all trials.
    pub fn query_range(&self) -> (usize, usize) {
        let min = self.rows.iter().map(|r| r.queries).min().unwrap_or(0);
        let max = self.rows.iter().map(|r| r.queries).max().unwrap_or(0);
        (min, max)
    }
}

/// Plays `trials` independent games and summarizes the win rate.
///
/// Trial `i` uses the child seed `("trial", i)` of `seed`, so results do
/// not depend on how rayon schedules the trials.
pub fn estimate_advantage(game: &GameSpec, adversary: &Adversary, trials: usize, seed: u64) -> Result<AdvantageRun> {
    if trials == 0 {
        return Err(domain("at least one trial is required"));
    }
    let root = RngHandle::from_u64(seed);
    if let GameSpec::Pea { scheme_id, law, budget, .. } = game {
        law.check_scheme(*scheme_id)?;
        if *budget == 0 {
            return Err(domain("oracle budget must be at least 1"));
        }
    }
    let setup = setup_for(game.scheme_id(), game.lambda(), &root)?;

    let play = |i: usize| -> Result<GameTranscript> {
        let trial = root.child("trial", i as u64);
        match (game, adversary) {
            (GameSpec::Cpa { .. }, Adversary::Cpa(f)) => play_cpa(&setup, f.spawn().as_mut(), &trial),
            (GameSpec::Pea { law, budget, .. }, Adversary::Pea(f)) => {
                play_pea(&setup, law, *budget, f.spawn().as_mut(), &trial)
            }
            _ => Err(domain(format!(
                "adversary `{}` does not play the {:?} game",
                adversary.id(),
                game.kind()
            ))),
        }
    };
    let rows = (0..trials)
        .into_par_iter()
        .map(|i| {
            let t = play(i)?;
            Ok(TrialRow {
                trial: i,
                b: t.b,
                guess: t.guess,
                win: t.win,
                queries: t.queries.len(),
                forfeit: t.forfeit.is_some(),
                anomalies: t.notes.len(),
                transcript_hash: t.hash(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let wins = rows.iter().filter(|r| r.win).count();
    let mut digest = Sha256::new();
    for row in &rows {
        digest.update(row.transcript_hash.as_bytes());
    }
    Ok(AdvantageRun {
        game: *game,
        adversary: adversary.id().to_string(),
        seed,
        estimate: AdvantageEstimate::from_counts(wins, trials),
        transcript_digest: hex::encode(digest.finalize()),
        rows,
    })
}
