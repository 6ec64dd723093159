use num_bigint::BigUint;

use super::*;
use crate::controllers::{decrypt_vector, eval_plain};
use crate::error::Error;
use crate::games::{
    estimate_advantage, play_pea, run_cpa_game, run_pea_game, Adversary, GameSpec, Verdict,
};
use crate::schemes::{GroupParams, SchemeId, SchemeSetup, SecurityParameter};

fn lam(bits: u32) -> SecurityParameter {
    SecurityParameter::new(bits).unwrap()
}

fn cpa(scheme_id: SchemeId) -> GameSpec {
    GameSpec::Cpa {
        scheme_id,
        lambda: lam(64),
    }
}

fn pea(scheme_id: SchemeId, law: ControlLaw) -> GameSpec {
    GameSpec::Pea {
        scheme_id,
        lambda: lam(64),
        law,
        budget: 64,
    }
}

#[test]
fn challenge_pairs_are_valid_and_same_size() {
    for scheme in SchemeId::ALL {
        let keys = crate::schemes::keygen(scheme, lam(32), &mut RngHandle::from_u64(1)).unwrap();
        let (a, b) = challenge_pair(&keys.pk);
        assert_ne!(a, b);
        assert_eq!(a.bit_len(), b.bit_len());
        keys.pk.check_plaintext(&a).unwrap();
        keys.pk.check_plaintext(&b).unwrap();
    }
}

#[test]
fn random_guesser_has_no_advantage_in_either_game() {
    let run = estimate_advantage(&cpa(SchemeId::Multiplicative), &Adversary::Cpa(random_guesser_cpa()), 2000, 2).unwrap();
    assert_eq!(run.estimate.verdict, Verdict::ConsistentWithNegligible);
    let law = ControlLaw::additive_bias(1).unwrap();
    let run = estimate_advantage(&pea(SchemeId::Additive, law), &Adversary::Pea(random_guesser_pea()), 2000, 3).unwrap();
    assert_eq!(run.estimate.verdict, Verdict::ConsistentWithNegligible);
    assert_eq!(run.query_range(), (0, 0));
}

#[test]
fn det_cpa_fails_against_randomized_schemes() {
    for (scheme, seed) in [(SchemeId::Multiplicative, 4), (SchemeId::Additive, 5)] {
        let run = estimate_advantage(&cpa(scheme), &Adversary::Cpa(det_cpa_distinguisher()), 2000, seed).unwrap();
        assert_eq!(run.estimate.verdict, Verdict::ConsistentWithNegligible, "{scheme}");
    }
}

#[test]
fn det_cpa_wins_against_both_broken_schemes() {
    for scheme in [SchemeId::BrokenDeterministic, SchemeId::BrokenAdditive] {
        let run = estimate_advantage(&cpa(scheme), &Adversary::Cpa(det_cpa_distinguisher()), 200, 6).unwrap();
        assert_eq!(run.estimate.wins, 200, "{scheme}");
    }
}

#[test]
fn det_pea_distinguishes_every_pair_in_tiny_group() {
    let group = GroupParams::new(BigUint::from(23u32), BigUint::from(11u32), BigUint::from(4u32)).unwrap();
    let setup = SchemeSetup::with_group(SchemeId::BrokenDeterministic, group.clone()).unwrap();
    let law = ControlLaw::multiplicative_gain(1).unwrap();
    let members: Vec<u32> = (1..23).filter(|&v| group.contains(&BigUint::from(v))).collect();
    let mut rng = RngHandle::from_u64(7);
    let keys = setup.keygen(&mut rng).unwrap();
    for &k0 in &members {
        for &k1 in &members {
            if k0 == k1 {
                continue;
            }
            for b in [false, true] {
                let kv = |v: u32| ParameterVector(vec![keys.pk.plaintext(v).unwrap()]);
                let mut adv = DetPeaDistinguisher {
                    sigma: Some((keys.pk.clone(), law, kv(k0), kv(k1))),
                    notes: Vec::new(),
                };
                let installed = if b { kv(k1) } else { kv(k0) };
                let state = EncryptedControllerState::encrypt(law, &keys.pk, &installed, &mut rng).unwrap();
                let mut oracle = OracleHandle::new(state, 1);
                assert_eq!(adv.guess(&mut oracle, &mut rng), b, "K0={k0} K1={k1} b={b}");
                assert_eq!(oracle.queries_used(), 1);
                assert!(adv.notes.is_empty());
            }
        }
    }
}

#[test]
fn det_pea_fails_against_randomized_scheme() {
    let law = ControlLaw::multiplicative_gain(1).unwrap();
    let run = estimate_advantage(&pea(SchemeId::Multiplicative, law), &Adversary::Pea(det_pea_distinguisher()), 2000, 8).unwrap();
    assert_eq!(run.estimate.verdict, Verdict::ConsistentWithNegligible);
    assert_eq!(run.query_range(), (1, 1));
    // no candidate ever matches, and every miss is recorded
    assert!(run.rows.iter().all(|r| r.anomalies == 1));
}

#[test]
fn pea_to_cpa_needs_a_collapse_rule_for_vectors() {
    let law = ControlLaw::multiplicative_gain(3).unwrap();
    let err = reduce_pea_to_cpa(&det_pea_distinguisher(), law, SchemeId::BrokenDeterministic, CollapseRule::Strict).unwrap_err();
    assert!(matches!(err, Error::Domain(_)));
    assert!(reduce_pea_to_cpa(&det_pea_distinguisher(), law, SchemeId::BrokenDeterministic, CollapseRule::FirstComponent).is_ok());
    let scalar = ControlLaw::multiplicative_gain(1).unwrap();
    assert!(reduce_pea_to_cpa(&det_pea_distinguisher(), scalar, SchemeId::Additive, CollapseRule::Strict).is_err());
}

#[test]
fn pea_to_cpa_simulates_the_oracle_faithfully() {
    let law = ControlLaw::multiplicative_gain(1).unwrap();
    for seed in 0..20 {
        let mut adv = PeaToCpa::new(Box::<DetPeaDistinguisher>::default(), law, CollapseRule::Strict).unwrap();
        let t = run_cpa_game(SchemeId::Multiplicative, lam(64), &mut adv, seed).unwrap();
        let mb = ParameterVector(t.challenge[t.b as usize].clone());
        assert_eq!(adv.simulated_queries().len(), 1);
        for query in adv.simulated_queries() {
            let y = decrypt_vector(&t.keys.sk, &query.input).unwrap();
            let u = decrypt_vector(&t.keys.sk, &query.output).unwrap();
            assert_eq!(u, eval_plain(&law, &y, &mb).unwrap());
        }
    }
}

#[test]
fn pea_to_cpa_preserves_advantage() {
    let law = ControlLaw::multiplicative_gain(1).unwrap();
    let wrapped = reduce_pea_to_cpa(&det_pea_distinguisher(), law, SchemeId::BrokenDeterministic, CollapseRule::Strict).unwrap();
    let outer = estimate_advantage(&cpa(SchemeId::BrokenDeterministic), &Adversary::Cpa(wrapped), 300, 9).unwrap();
    assert_eq!(outer.estimate.wins, 300);

    let wrapped = reduce_pea_to_cpa(&random_guesser_pea(), law, SchemeId::Multiplicative, CollapseRule::Strict).unwrap();
    let outer = estimate_advantage(&cpa(SchemeId::Multiplicative), &Adversary::Cpa(wrapped), 1000, 10).unwrap();
    assert_eq!(outer.estimate.verdict, Verdict::ConsistentWithNegligible);
}

#[test]
fn cpa_to_pea_rejects_non_bijective_laws() {
    let wide = ControlLaw::static_feedback(1, 2).unwrap();
    let err = reduce_cpa_to_pea(&det_cpa_distinguisher(), wide, SchemeId::BrokenDeterministic).unwrap_err();
    assert!(matches!(&err, Error::NotBijective(msg) if msg.contains("q=r")));
    assert!(err.to_string().contains("q=r"));
    assert!(CpaToPea::new(Box::<DetCpaDistinguisher>::default(), &wide).is_err());

    let column = ControlLaw::static_feedback(2, 1).unwrap();
    assert!(reduce_cpa_to_pea(&det_cpa_distinguisher(), column, SchemeId::BrokenDeterministic).is_ok());
    let add = ControlLaw::additive_bias(1).unwrap();
    assert!(reduce_cpa_to_pea(&det_cpa_distinguisher(), add, SchemeId::BrokenDeterministic).is_err());
}

#[test]
fn cpa_to_pea_recovers_installed_ciphertexts_exactly() {
    let cases = [
        (SchemeId::BrokenDeterministic, ControlLaw::multiplicative_gain(2).unwrap()),
        (SchemeId::BrokenAdditive, ControlLaw::additive_bias(3).unwrap()),
        (SchemeId::BrokenDeterministic, ControlLaw::static_feedback(2, 1).unwrap()),
    ];
    for (scheme, law) in cases {
        for seed in 0..10 {
            let mut adv = CpaToPea::new(Box::<DetCpaDistinguisher>::default(), &law).unwrap();
            let t = run_pea_game(scheme, &law, lam(64), &mut adv, 64, seed).unwrap();
            assert_eq!(adv.recovered(), t.challenge_ciphertexts.as_slice());
            assert_eq!(t.queries.len(), 1);
            assert!(t.win);
        }
    }
}

#[test]
fn cpa_to_pea_recovery_decrypts_under_randomized_scheme() {
    let law = ControlLaw::multiplicative_gain(2).unwrap();
    let mut rng = RngHandle::from_u64(11);
    let setup = SchemeSetup::new(SchemeId::Multiplicative, lam(64), &mut rng).unwrap();
    for i in 0..50 {
        let mut adv = CpaToPea::new(Box::new(RandomGuesser), &law).unwrap();
        let t = play_pea(&setup, &law, 64, &mut adv, &rng.child("trial", i)).unwrap();
        let kb = &t.challenge[t.b as usize];
        assert_eq!(t.keys.sk.decrypt(&adv.recovered()[0]).unwrap(), kb[0]);
        assert_eq!(t.queries.len(), 1);
    }
}

#[test]
fn reduction_reports_agree_on_small_runs() {
    let law = ControlLaw::multiplicative_gain(1).unwrap();
    let spec = ReductionSpec {
        direction: ReductionDirection::PeaToCpa,
        scheme_id: SchemeId::BrokenDeterministic,
        lambda: lam(64),
        law,
        trials: 300,
        budget: None,
        seed: 12,
        collapse: CollapseRule::Strict,
    };
    let report = run_reduction(&spec, &Adversary::Pea(det_pea_distinguisher())).unwrap();
    assert_eq!(report.gap, 0.0);
    assert!(report.ci_overlap);
    assert_eq!(report.pea_queries, [1, 1]);

    let spec = ReductionSpec {
        direction: ReductionDirection::CpaToPea,
        scheme_id: SchemeId::BrokenAdditive,
        law: ControlLaw::additive_bias(2).unwrap(),
        ..spec
    };
    let report = run_reduction(&spec, &Adversary::Cpa(det_cpa_distinguisher())).unwrap();
    assert_eq!(report.advantage_inner.advantage, 0.5);
    assert_eq!(report.advantage_outer.advantage, 0.5);
    assert_eq!(report.pea_queries, [1, 1]);
    assert_eq!(run_reduction(&spec, &Adversary::Cpa(det_cpa_distinguisher())).unwrap(), report);

    let spec = ReductionSpec {
        direction: ReductionDirection::CpaToPea,
        scheme_id: SchemeId::Multiplicative,
        law: ControlLaw::multiplicative_gain(1).unwrap(),
        trials: 1000,
        ..spec
    };
    let report = run_reduction(&spec, &Adversary::Cpa(random_guesser_cpa())).unwrap();
    assert_eq!(report.advantage_inner.verdict, Verdict::ConsistentWithNegligible);
    assert_eq!(report.advantage_outer.verdict, Verdict::ConsistentWithNegligible);

    assert!(run_reduction(&spec, &Adversary::Pea(random_guesser_pea())).is_err());
}

#[test]
fn registry_lookup() {
    assert_eq!(cpa_adversary("det-cpa").unwrap().id(), "det-cpa");
    assert_eq!(pea_adversary("det-pea").unwrap().id(), "det-pea");
    assert_eq!(cpa_adversary("random-guesser").unwrap().id(), "random-guesser");
    assert_eq!(pea_adversary("random-guesser").unwrap().id(), "random-guesser");
    assert!(cpa_adversary("det-pea").is_err());
    assert!(pea_adversary("det-cpa").is_err());
    assert!(cpa_adversary("oracle").unwrap_err().to_string().contains("known"));
}
