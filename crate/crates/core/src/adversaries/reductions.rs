//! Wrappers that turn an attacker on one game into an attacker on the other.
//!
//! * [`PeaToCpa`]: the CPA challenge ciphertext `c` is installed as
//!   `c_K = [c; r]` in a locally simulated oracle that the inner PEA
//!   attacker queries. Exact for `r = 1`; for `r > 1` the inner challenge
//!   vectors are collapsed to their first component (opt-in).
//! * [`CpaToPea`]: the scalar challenge is broadcast to `r`-vectors, `y` is
//!   fixed to the identity, one oracle query is made and the encrypted
//!   inverse law recovers `ĉ_K`; its first element goes to the inner CPA
//!   attacker.

use serde::{Deserialize, Serialize};

use crate::controllers::{
    encrypt_vector, eval_inverse_encrypted, ControlLaw, EncryptedControllerState, ParameterVector,
};
use crate::error::{domain, Result};
use crate::games::{
    default_budget, estimate_advantage, Adversary, AdvantageEstimate, AdvantageRun, CpaAdversary, CpaFactory,
    GameKind, GameSpec, OracleHandle, OracleQuery, PeaAdversary, PeaFactory, TRANSCRIPT_VERSION,
};
use crate::modarith::RngHandle;
use crate::schemes::{Ciphertext, Plaintext, PublicKey, SchemeId, SecurityParameter};

/// How [`PeaToCpa`] maps vector challenges to scalars when `r > 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CollapseRule {
    /// Only `r = 1` laws are accepted.
    #[default]
    Strict,
    /// Use the first component of each challenge vector.
    FirstComponent,
}

fn check_collapse(law: &ControlLaw, rule: CollapseRule) -> Result<()> {
    if law.r > 1 && rule == CollapseRule::Strict {
        return Err(domain(format!(
            "wrapping an IND-PEA attacker needs r = 1 (got r={}) unless a collapse rule is chosen",
            law.r
        )));
    }
    Ok(())
}

/// IND-CPA attacker built from an IND-PEA attacker.
pub struct PeaToCpa {
    inner: Box<dyn PeaAdversary>,
    law: ControlLaw,
    budget: Option<usize>,
    pk: Option<PublicKey>,
    simulated: Vec<OracleQuery>,
    notes: Vec<String>,
}

impl PeaToCpa {
    pub fn new(inner: Box<dyn PeaAdversary>, law: ControlLaw, rule: CollapseRule) -> Result<Self> {
        check_collapse(&law, rule)?;
        Ok(Self {
            inner,
            law,
            budget: None,
            pk: None,
            simulated: Vec::new(),
            notes: Vec::new(),
        })
    }

    /// Budget of the simulated oracle; λ when unset.
    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = Some(budget);
        self
    }

    /// Queries the inner attacker made against the simulated oracle.
    pub fn simulated_queries(&self) -> &[OracleQuery] {
        &self.simulated
    }
}

impl CpaAdversary for PeaToCpa {
    fn challenge(&mut self, pk: &PublicKey, rng: &mut RngHandle) -> (Plaintext, Plaintext) {
        let (k0, k1) = self.inner.challenge(pk, &self.law, rng);
        self.pk = Some(pk.clone());
        let first = |k: &ParameterVector| {
            k.elements()
                .first()
                .cloned()
                .unwrap_or_else(|| pk.plaintext_identity())
        };
        (first(&k0), first(&k1))
    }

    fn guess(&mut self, c: &Ciphertext, rng: &mut RngHandle) -> bool {
        let pk = self.pk.clone().expect("challenge phase ran");
        let budget = self
            .budget
            .unwrap_or_else(|| pk.lambda() as usize)
            .max(1);
        match EncryptedControllerState::new(self.law, pk, vec![c.clone(); self.law.r]) {
            Ok(state) => {
                let mut oracle = OracleHandle::new(state, budget);
                let guess = self.inner.guess(&mut oracle, rng);
                self.simulated = oracle.into_log();
                guess
            }
            Err(e) => {
                self.notes.push(format!("cannot install the challenge ciphertext: {e}"));
                rng.coin()
            }
        }
    }

    fn notes(&self) -> Vec<String> {
        let mut notes = self.inner.notes();
        notes.extend(self.notes.iter().cloned());
        notes
    }
}

/// IND-PEA attacker built from an IND-CPA attacker.
pub struct CpaToPea {
    inner: Box<dyn CpaAdversary>,
    sigma: Option<(PublicKey, ControlLaw, Vec<Plaintext>)>,
    recovered: Vec<Ciphertext>,
    notes: Vec<String>,
}

impl CpaToPea {
    pub fn new(inner: Box<dyn CpaAdversary>, law: &ControlLaw) -> Result<Self> {
        law.check_bijective()?;
        Ok(Self::unchecked(inner))
    }

    fn unchecked(inner: Box<dyn CpaAdversary>) -> Self {
        Self {
            inner,
            sigma: None,
            recovered: Vec::new(),
            notes: Vec::new(),
        }
    }

    /// `ĉ_K` as recovered through the encrypted inverse law.
    pub fn recovered(&self) -> &[Ciphertext] {
        &self.recovered
    }
}

impl PeaAdversary for CpaToPea {
    fn challenge(
        &mut self,
        pk: &PublicKey,
        law: &ControlLaw,
        rng: &mut RngHandle,
    ) -> (ParameterVector, ParameterVector) {
        let (m0, m1) = self.inner.challenge(pk, rng);
        let y = vec![pk.plaintext_identity(); law.l];
        self.sigma = Some((pk.clone(), *law, y));
        (ParameterVector::broadcast(m0, law.r), ParameterVector::broadcast(m1, law.r))
    }

    fn guess(&mut self, oracle: &mut OracleHandle, rng: &mut RngHandle) -> bool {
        let (pk, law, y) = self.sigma.clone().expect("challenge phase ran");
        let recovered = (|| -> Result<Vec<Ciphertext>> {
            let cy = encrypt_vector(&pk, &y, rng)?;
            let cu = oracle.query(&cy)?;
            eval_inverse_encrypted(&law, &pk, &cy, &cu)
        })();
        match recovered {
            Ok(ck) => {
                self.recovered = ck;
                let first = self.recovered[0].clone();
                self.inner.guess(&first, rng)
            }
            Err(e) => {
                self.notes.push(format!("could not recover the parameter ciphertext: {e}"));
                rng.coin()
            }
        }
    }

    fn notes(&self) -> Vec<String> {
        let mut notes = self.inner.notes();
        notes.extend(self.notes.iter().cloned());
        notes
    }
}

/// Wraps every adversary the factory produces as an IND-CPA attacker.
pub fn reduce_pea_to_cpa(
    inner: &PeaFactory,
    law: ControlLaw,
    scheme_id: SchemeId,
    rule: CollapseRule,
) -> Result<CpaFactory> {
    law.check_scheme(scheme_id)?;
    check_collapse(&law, rule)?;
    let factory = inner.clone();
    Ok(CpaFactory::new(format!("pea-to-cpa({})", inner.id()), move || {
        Box::new(PeaToCpa::new(factory.spawn(), law, rule).expect("validated"))
    }))
}

/// Wraps every adversary the factory produces as an IND-PEA attacker.
///
/// Fails unless the law is bijective in its parameter; for static feedback
/// the error names the q=r condition.
pub fn reduce_cpa_to_pea(inner: &CpaFactory, law: ControlLaw, scheme_id: SchemeId) -> Result<PeaFactory> {
    law.check_bijective()?;
    law.check_scheme(scheme_id)?;
    let factory = inner.clone();
    Ok(PeaFactory::new(format!("cpa-to-pea({})", inner.id()), move || {
        Box::new(CpaToPea::unchecked(factory.spawn()))
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReductionDirection {
    PeaToCpa,
    CpaToPea,
}

impl std::str::FromStr for ReductionDirection {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pea-to-cpa" => Ok(Self::PeaToCpa),
            "cpa-to-pea" => Ok(Self::CpaToPea),
            other => Err(domain(format!("unknown reduction direction `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionSpec {
    pub direction: ReductionDirection,
    pub scheme_id: SchemeId,
    pub lambda: SecurityParameter,
    pub law: ControlLaw,
    pub trials: usize,
    /// Oracle budget for both the real and the simulated oracle.
    pub budget: Option<usize>,
    pub seed: u64,
    pub collapse: CollapseRule,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionReport {
    pub version: u32,
    pub direction: ReductionDirection,
    pub inner_adversary: String,
    pub inner_game: GameKind,
    pub outer_game: GameKind,
    pub scheme_id: SchemeId,
    pub lambda: SecurityParameter,
    pub law: ControlLaw,
    pub trials: usize,
    pub seed: u64,
    pub advantage_inner: AdvantageEstimate,
    pub advantage_outer: AdvantageEstimate,
    /// `|adv_inner − adv_outer|`
    pub gap: f64,
    pub ci_overlap: bool,
    /// Fewest and most oracle queries per game in the IND-PEA run.
    pub pea_queries: [usize; 2],
    pub inner_digest: String,
    pub outer_digest: String,
}

/// Runs the inner attacker directly and through the wrapper, with
/// independent child seeds, and compares the two advantages.
pub fn run_reduction(spec: &ReductionSpec, inner: &Adversary) -> Result<ReductionReport> {
    let root = RngHandle::from_u64(spec.seed);
    let inner_seed = root.child("inner", 0).next_u64();
    let outer_seed = root.child("outer", 0).next_u64();
    let budget = spec.budget.unwrap_or_else(|| default_budget(spec.lambda));
    let cpa = GameSpec::Cpa {
        scheme_id: spec.scheme_id,
        lambda: spec.lambda,
    };
    let pea = GameSpec::Pea {
        scheme_id: spec.scheme_id,
        lambda: spec.lambda,
        law: spec.law,
        budget,
    };

    let (inner_run, outer_run, inner_game, outer_game): (AdvantageRun, AdvantageRun, _, _) =
        match (spec.direction, inner) {
            (ReductionDirection::PeaToCpa, Adversary::Pea(b)) => {
                check_collapse(&spec.law, spec.collapse)?;
                spec.law.check_scheme(spec.scheme_id)?;
                let factory = b.clone();
                let (law, rule) = (spec.law, spec.collapse);
                let wrapped = CpaFactory::new(format!("pea-to-cpa({})", b.id()), move || {
                    Box::new(
                        PeaToCpa::new(factory.spawn(), law, rule)
                            .expect("validated")
                            .with_budget(budget),
                    )
                });
                let direct = estimate_advantage(&pea, inner, spec.trials, inner_seed)?;
                let outer = estimate_advantage(&cpa, &Adversary::Cpa(wrapped), spec.trials, outer_seed)?;
                (direct, outer, GameKind::Pea, GameKind::Cpa)
            }
            (ReductionDirection::CpaToPea, Adversary::Cpa(a)) => {
                let wrapped = reduce_cpa_to_pea(a, spec.law, spec.scheme_id)?;
                let direct = estimate_advantage(&cpa, inner, spec.trials, inner_seed)?;
                let outer = estimate_advantage(&pea, &Adversary::Pea(wrapped), spec.trials, outer_seed)?;
                (direct, outer, GameKind::Cpa, GameKind::Pea)
            }
            (ReductionDirection::PeaToCpa, _) => {
                return Err(domain(format!("`{}` is not an IND-PEA attacker", inner.id())))
            }
            (ReductionDirection::CpaToPea, _) => {
                return Err(domain(format!("`{}` is not an IND-CPA attacker", inner.id())))
            }
        };

    let pea_run = if inner_game == GameKind::Pea { &inner_run } else { &outer_run };
    let (qmin, qmax) = pea_run.query_range();
    Ok(ReductionReport {
        version: TRANSCRIPT_VERSION,
        direction: spec.direction,
        inner_adversary: inner.id().to_string(),
        inner_game,
        outer_game,
        scheme_id: spec.scheme_id,
        lambda: spec.lambda,
        law: spec.law,
        trials: spec.trials,
        seed: spec.seed,
        gap: (inner_run.estimate.advantage - outer_run.estimate.advantage).abs(),
        ci_overlap: inner_run.estimate.ci_overlaps(&outer_run.estimate),
        advantage_inner: inner_run.estimate,
        advantage_outer: outer_run.estimate,
        pea_queries: [qmin, qmax],
        inner_digest: inner_run.transcript_digest,
        outer_digest: outer_run.transcript_digest,
    })
}
