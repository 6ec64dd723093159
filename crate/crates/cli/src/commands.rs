use std::io::Write;
use std::path::Path;

use serde::Serialize;

use encctl_core::adversaries::{
    cpa_adversary, eavesdrop_demo, pea_adversary, run_reduction, EavesdropConfig, ReductionDirection, ReductionSpec,
    DET_CPA, DET_PEA,
};
use encctl_core::games::{default_budget, estimate_advantage, Adversary, AdvantageRun, GameSpec, TRANSCRIPT_VERSION};
use encctl_core::modarith::RngHandle;
use encctl_core::schemes::{keygen as core_keygen, SchemeId};

use crate::config::Settings;
use crate::CliError;

fn usage(field: &str, e: impl std::fmt::Display) -> CliError {
    CliError::Usage(format!("invalid value for `{field}`: {e}"))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

/// Prints `json` on stdout when asked, the human text otherwise, and writes
/// `json` to `--out` when given.
fn emit(settings: &Settings, json: &str, human: &str) -> Result<(), CliError> {
    if let Some(path) = &settings.file.out {
        write_file(path, json)?;
    }
    let mut stdout = std::io::stdout().lock();
    let text = if settings.json { json } else { human };
    stdout
        .write_all(text.as_bytes())
        .map_err(|e| CliError::Runtime(format!("cannot write to stdout: {e}")))
}

#[derive(Serialize)]
struct KeygenSummary<'a> {
    version: u32,
    command: &'static str,
    scheme_id: SchemeId,
    lambda: u32,
    seed: u64,
    fingerprint: String,
    out: Option<&'a Path>,
}

pub fn keygen(settings: &Settings) -> Result<(), CliError> {
    let scheme = settings.scheme(SchemeId::Additive)?;
    let lambda = settings.lambda()?;
    let seed = settings.seed();
    let keys = core_keygen(scheme, lambda, &mut RngHandle::from_u64(seed).child("keygen", 0))?;
    let key_json = to_json(&keys);
    let fingerprint = keys.pk.fingerprint();

    let Some(path) = &settings.file.out else {
        // no file: the key file itself goes to stdout
        print!("{key_json}");
        eprintln!("public key fingerprint {fingerprint}");
        return Ok(());
    };
    write_file(path, &key_json)?;
    let summary = KeygenSummary {
        version: TRANSCRIPT_VERSION,
        command: "keygen",
        scheme_id: scheme,
        lambda: lambda.bits(),
        seed,
        fingerprint: fingerprint.clone(),
        out: Some(path),
    };
    if settings.json {
        print!("{}", to_json(&summary));
    } else {
        println!("wrote {} ({scheme}, λ={}) fingerprint {fingerprint}", path.display(), lambda.bits());
    }
    Ok(())
}

#[derive(Serialize)]
struct RunSummary<'a> {
    version: u32,
    command: &'static str,
    game: &'a GameSpec,
    adversary: &'a str,
    seed: u64,
    trials: usize,
    wins: usize,
    rate: f64,
    advantage: f64,
    ci: [f64; 2],
    verdict: &'static str,
    forfeits: usize,
    transcript_digest: &'a str,
}

fn write_csv(path: &Path, run: &AdvantageRun) -> Result<(), CliError> {
    let err = |e: csv::Error| CliError::Runtime(format!("cannot write {}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(err)?;
    w.write_record(["trial", "b", "guess", "win", "queries", "forfeit", "transcript_hash"])
        .map_err(err)?;
    for row in &run.rows {
        w.write_record([
            row.trial.to_string(),
            row.b.to_string(),
            row.guess.map_or_else(String::new, |g| g.to_string()),
            u8::from(row.win).to_string(),
            row.queries.to_string(),
            u8::from(row.forfeit).to_string(),
            row.transcript_hash.clone(),
        ])
        .map_err(err)?;
    }
    w.flush()
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}

fn report_run(settings: &Settings, command: &'static str, run: &AdvantageRun) -> Result<(), CliError> {
    if let Some(path) = &settings.file.csv {
        write_csv(path, run)?;
    }
    let e = &run.estimate;
    let summary = RunSummary {
        version: TRANSCRIPT_VERSION,
        command,
        game: &run.game,
        adversary: &run.adversary,
        seed: run.seed,
        trials: e.trials,
        wins: e.wins,
        rate: e.rate,
        advantage: e.advantage,
        ci: e.ci,
        verdict: e.verdict.as_str(),
        forfeits: run.forfeits(),
        transcript_digest: &run.transcript_digest,
    };
    let human = format!(
        "{command}: {} vs {}, λ={}, {} trials\n  win rate  {:.4}  (95% CI [{:.4}, {:.4}])\n  advantage {:.4}\n  verdict   {}\n  digest    {}\n",
        run.adversary,
        run.game.scheme_id(),
        run.game.lambda().bits(),
        e.trials,
        e.rate,
        e.ci[0],
        e.ci[1],
        e.advantage,
        e.verdict.as_str(),
        run.transcript_digest,
    );
    emit(settings, &to_json(&summary), &human)
}

pub fn run_cpa(settings: &Settings) -> Result<(), CliError> {
    let scheme = settings.scheme(SchemeId::Additive)?;
    let game = GameSpec::Cpa {
        scheme_id: scheme,
        lambda: settings.lambda()?,
    };
    let adversary = cpa_adversary(&settings.adversary(DET_CPA)).map_err(|e| usage("adversary", e))?;
    let trials = settings.trials(1000)?;
    let run = estimate_advantage(&game, &Adversary::Cpa(adversary), trials, settings.seed())?;
    report_run(settings, "run-cpa", &run)
}

pub fn run_pea(settings: &Settings) -> Result<(), CliError> {
    let scheme = settings.scheme(SchemeId::Additive)?;
    let lambda = settings.lambda()?;
    let game = GameSpec::Pea {
        scheme_id: scheme,
        lambda,
        law: settings.law(scheme)?,
        budget: settings.budget()?.unwrap_or_else(|| default_budget(lambda)),
    };
    let adversary = pea_adversary(&settings.adversary(DET_PEA)).map_err(|e| usage("adversary", e))?;
    let trials = settings.trials(1000)?;
    let run = estimate_advantage(&game, &Adversary::Pea(adversary), trials, settings.seed())?;
    report_run(settings, "run-pea", &run)
}

pub fn reduce(settings: &Settings) -> Result<(), CliError> {
    let direction = settings.direction()?;
    let scheme = settings.scheme(SchemeId::BrokenDeterministic)?;
    let law = settings.law(scheme)?;
    let spec = ReductionSpec {
        direction,
        scheme_id: scheme,
        lambda: settings.lambda()?,
        law,
        trials: settings.trials(1000)?,
        budget: settings.budget()?,
        seed: settings.seed(),
        collapse: settings.collapse()?,
    };
    let inner = match direction {
        ReductionDirection::PeaToCpa => {
            if law.r > 1 && spec.collapse == encctl_core::adversaries::CollapseRule::Strict {
                return Err(usage(
                    "collapse",
                    format!("r={} needs --collapse first-component for pea-to-cpa", law.r),
                ));
            }
            Adversary::Pea(pea_adversary(&settings.adversary(DET_PEA)).map_err(|e| usage("adversary", e))?)
        }
        ReductionDirection::CpaToPea => {
            // the wrapper needs an encrypted inverse law
            law.check_bijective().map_err(|e| usage("law", e))?;
            Adversary::Cpa(cpa_adversary(&settings.adversary(DET_CPA)).map_err(|e| usage("adversary", e))?)
        }
    };
    let report = run_reduction(&spec, &inner)?;
    let human = format!(
        "reduce {}: {} ({:?} game) vs wrapped ({:?} game), {} on {}, λ={}, {} trials\n  inner advantage {:.4}  (rate CI [{:.4}, {:.4}])\n  outer advantage {:.4}  (rate CI [{:.4}, {:.4}])\n  gap             {:.4}  CIs overlap: {}\n  PEA queries/game {}..={}\n",
        match direction {
            ReductionDirection::PeaToCpa => "pea-to-cpa",
            ReductionDirection::CpaToPea => "cpa-to-pea",
        },
        report.inner_adversary,
        report.inner_game,
        report.outer_game,
        law.family,
        scheme,
        spec.lambda.bits(),
        spec.trials,
        report.advantage_inner.advantage,
        report.advantage_inner.ci[0],
        report.advantage_inner.ci[1],
        report.advantage_outer.advantage,
        report.advantage_outer.ci[0],
        report.advantage_outer.ci[1],
        report.gap,
        report.ci_overlap,
        report.pea_queries[0],
        report.pea_queries[1],
    );
    emit(settings, &to_json(&report), &human)
}

pub fn demo_eavesdrop(settings: &Settings) -> Result<(), CliError> {
    let defaults = EavesdropConfig::default();
    let config = EavesdropConfig {
        scheme_id: settings.scheme(defaults.scheme_id)?,
        lambda: settings.lambda()?,
        gains: settings.gains()?.unwrap_or(defaults.gains),
        samples: settings.samples()?,
        scale: settings.scale()?,
        seed: settings.seed(),
    };
    let report = eavesdrop_demo(&config).map_err(|e| match e {
        encctl_core::Error::Domain(msg) => usage("gains/scheme", msg),
        other => other.into(),
    })?;
    let human = format!(
        "eavesdropper least-squares recovery of F ({}×{}) from {} samples\n  plaintext traffic   relative error {:.3e}\n  ciphertext traffic  relative error {:.3}\n  (plant-side decryption error {:.2e})\n",
        report.gains.len(),
        report.gains[0].len(),
        report.samples,
        report.plaintext_error,
        report.ciphertext_error,
        report.decrypted_max_error,
    );
    emit(settings, &to_json(&report), &human)
}
