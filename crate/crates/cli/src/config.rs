//! Flag and config-file merging.
//!
//! The config file is flat TOML whose keys mirror the long flag names
//! (`scheme`, `lambda`, `law`, `q`, `l`, `gains`, …). Flags win over file
//! values; anything unset falls back to a per-command default.

use std::path::{Path, PathBuf};

use clap::Args;
use serde::Deserialize;

use encctl_core::adversaries::{CollapseRule, ReductionDirection};
use encctl_core::controllers::{ControlLaw, LawFamily};
use encctl_core::encoding::DEFAULT_SCALE;
use encctl_core::schemes::{Homomorphism, SchemeId, SecurityParameter};

use crate::CliError;

/// Flags shared by every command. Commands ignore the ones they do not use.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Flat TOML file with default values for any of these flags.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// additive | multiplicative | broken-deterministic | broken-additive
    #[arg(long)]
    pub scheme: Option<String>,
    /// Modulus size in bits.
    #[arg(long)]
    pub lambda: Option<u32>,
    /// additive-bias | multiplicative-gain | static-feedback
    #[arg(long)]
    pub law: Option<String>,
    /// Output dimension of the law.
    #[arg(long)]
    pub q: Option<usize>,
    /// Input dimension of the law.
    #[arg(long)]
    pub l: Option<usize>,
    /// Gain matrix, rows separated by `;`, entries by `,` (e.g. "2,0.5;0.25,1.5").
    #[arg(long, allow_hyphen_values = true)]
    pub gains: Option<String>,
    /// random-guesser | det-cpa | det-pea
    #[arg(long)]
    pub adversary: Option<String>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Oracle query budget (default: λ).
    #[arg(long)]
    pub budget: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Fixed-point scale (power of two).
    #[arg(long)]
    pub scale: Option<u64>,
    /// Print machine-readable JSON on stdout.
    #[arg(long)]
    pub json: bool,
    /// Write the result (key file or JSON summary) to this path.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Write one CSV row per trial to this path.
    #[arg(long, value_name = "PATH")]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub scheme: Option<String>,
    pub lambda: Option<u32>,
    pub law: Option<String>,
    pub q: Option<usize>,
    pub l: Option<usize>,
    pub gains: Option<String>,
    pub adversary: Option<String>,
    pub trials: Option<usize>,
    pub budget: Option<usize>,
    pub seed: Option<u64>,
    pub scale: Option<u64>,
    pub out: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub direction: Option<String>,
    pub collapse: Option<String>,
    pub samples: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
    }
}

/// Flags merged over the config file, before defaults.
#[derive(Debug, Clone, Default)]
pub struct Settings {
    pub file: FileConfig,
    pub json: bool,
}

fn usage(field: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Usage(format!("invalid value for `{field}`: {msg}"))
}

impl Settings {
    pub fn merge(args: &CommonArgs, extra: FileConfig) -> Result<Self, CliError> {
        let mut file = match &args.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        macro_rules! over {
            ($($field:ident),*) => {$(
                if args.$field.is_some() {
                    file.$field = args.$field.clone();
                }
            )*};
        }
        over!(scheme, lambda, law, q, l, gains, adversary, trials, budget, seed, scale, out, csv);
        macro_rules! over_extra {
            ($($field:ident),*) => {$(
                if extra.$field.is_some() {
                    file.$field = extra.$field;
                }
            )*};
        }
        over_extra!(direction, collapse, samples);
        Ok(Self { file, json: args.json })
    }

    pub fn scheme(&self, default: SchemeId) -> Result<SchemeId, CliError> {
        match &self.file.scheme {
            Some(s) => s.parse().map_err(|e| usage("scheme", e)),
            None => Ok(default),
        }
    }

    pub fn lambda(&self) -> Result<SecurityParameter, CliError> {
        SecurityParameter::new(self.file.lambda.unwrap_or(encctl_core::schemes::DEFAULT_LAMBDA))
            .map_err(|e| usage("lambda", e))
    }

    pub fn seed(&self) -> u64 {
        self.file.seed.unwrap_or(0)
    }

    pub fn trials(&self, default: usize) -> Result<usize, CliError> {
        match self.file.trials.unwrap_or(default) {
            0 => Err(usage("trials", "must be at least 1")),
            n => Ok(n),
        }
    }

    pub fn budget(&self) -> Result<Option<usize>, CliError> {
        match self.file.budget {
            Some(0) => Err(usage("budget", "must be at least 1")),
            b => Ok(b),
        }
    }

    pub fn scale(&self) -> Result<u64, CliError> {
        let scale = self.file.scale.unwrap_or(DEFAULT_SCALE);
        if scale < 2 || !scale.is_power_of_two() {
            return Err(usage("scale", "must be a power of two ≥ 2"));
        }
        Ok(scale)
    }

    pub fn adversary(&self, default: &str) -> String {
        self.file.adversary.clone().unwrap_or_else(|| default.to_string())
    }

    /// The law, defaulting to the bijective family that matches the scheme.
    pub fn law(&self, scheme: SchemeId) -> Result<ControlLaw, CliError> {
        let family = match &self.file.law {
            Some(name) => name.parse::<LawFamily>().map_err(|e| usage("law", e))?,
            None => match scheme.homomorphism() {
                Homomorphism::Additive => LawFamily::AdditiveBias,
                Homomorphism::Multiplicative => LawFamily::MultiplicativeGain,
            },
        };
        let q = self.file.q.unwrap_or(1);
        let law = match family {
            LawFamily::StaticFeedback => ControlLaw::static_feedback(q, self.file.l.unwrap_or(1)),
            _ => {
                let l = self.file.l.unwrap_or(q);
                ControlLaw::new(family, q, l, q)
            }
        };
        let law = law.map_err(|e| usage("q/l", e))?;
        law.check_scheme(scheme).map_err(|e| usage("law", e))?;
        Ok(law)
    }

    pub fn gains(&self) -> Result<Option<Vec<Vec<f64>>>, CliError> {
        self.file.gains.as_deref().map(parse_gains).transpose()
    }

    pub fn direction(&self) -> Result<ReductionDirection, CliError> {
        self.file
            .direction
            .as_deref()
            .ok_or_else(|| usage("direction", "required (pea-to-cpa or cpa-to-pea)"))?
            .parse()
            .map_err(|e| usage("direction", e))
    }

    pub fn collapse(&self) -> Result<CollapseRule, CliError> {
        match self.file.collapse.as_deref() {
            None | Some("strict") => Ok(CollapseRule::Strict),
            Some("first-component") => Ok(CollapseRule::FirstComponent),
            Some(other) => Err(usage("collapse", format!("`{other}` (strict or first-component)"))),
        }
    }

    pub fn samples(&self) -> Result<usize, CliError> {
        match self.file.samples.unwrap_or(50) {
            0 => Err(usage("samples", "must be at least 1")),
            n => Ok(n),
        }
    }
}

pub fn parse_gains(text: &str) -> Result<Vec<Vec<f64>>, CliError> {
    let rows = text
        .split(';')
        .map(|row| {
            row.split(',')
                .map(|v| v.trim().parse::<f64>().map_err(|e| usage("gains", format!("`{}`: {e}", v.trim()))))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let width = rows.first().map_or(0, Vec::len);
    if width == 0 || rows.iter().any(|r| r.len() != width) {
        return Err(usage("gains", "rows must be non-empty and equally long"));
    }
    Ok(rows)
}
