//! Flat `key = value` experiment configs. `#` starts a comment, lists are
//! comma-separated, unknown or repeated keys are rejected.

use std::fmt;
use std::str::FromStr;

use rabisqueeze::hilbert::DEFAULT_FOCK_DIM;
use rabisqueeze::openquantum::{JitterMode, DEFAULT_ENSEMBLE_SIZE, DEFAULT_GAMMA_DT_PLUS, DEFAULT_STEPS_PER_INTERVAL};
use rabisqueeze::Variant;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, clap::ValueEnum)]
pub enum Experiment {
    Spectrum,
    GroundSqueezing,
    Protocol,
    NoisyProtocol,
    JitterEnsemble,
}

impl Experiment {
    pub fn as_str(self) -> &'static str {
        match self {
            Experiment::Spectrum => "spectrum",
            Experiment::GroundSqueezing => "ground-squeezing",
            Experiment::Protocol => "protocol",
            Experiment::NoisyProtocol => "noisy-protocol",
            Experiment::JitterEnsemble => "jitter-ensemble",
        }
    }

    fn is_open(self) -> bool {
        matches!(self, Experiment::NoisyProtocol | Experiment::JitterEnsemble)
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub const KEYS: [&str; 12] = [
    "g",
    "delta",
    "cycles",
    "levels",
    "variant",
    "gamma",
    "jitter_rel",
    "jitter_mode",
    "ensemble_size",
    "seed",
    "fock_dim",
    "steps_per_interval",
];

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    /// Coupling sweep `g / omega`.
    pub g: Vec<f64>,
    /// Detuning sweep `Delta / omega`.
    pub delta: Vec<f64>,
    pub cycles: usize,
    /// Spectrum levels compared per detuning.
    pub levels: usize,
    pub variants: Vec<Variant>,
    /// Loss rate in units of `1 / dt_plus`.
    pub gamma: f64,
    pub jitter_rel: Vec<f64>,
    pub jitter_mode: JitterMode,
    pub ensemble_size: usize,
    pub seed: u64,
    pub fock_dim: usize,
    pub steps_per_interval: usize,
}

impl ExperimentConfig {
    pub fn defaults(experiment: Experiment) -> Self {
        let (g, delta) = match experiment {
            Experiment::Spectrum => (vec![0.1], vec![0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0]),
            Experiment::GroundSqueezing => ((1..=10).map(|k| k as f64 / 100.0).collect(), vec![2.0, 5.0, 10.0]),
            _ => (vec![0.1], vec![2.0]),
        };
        let variants = match experiment {
            Experiment::Protocol => vec![Variant::DispersiveAnalytic, Variant::RabiNumeric],
            _ => vec![Variant::RabiNumeric],
        };
        let jitter_rel = match experiment {
            Experiment::JitterEnsemble => vec![0.0, 0.01, 0.1],
            _ => vec![0.0],
        };
        Self {
            experiment,
            g,
            delta,
            cycles: 10,
            levels: 4,
            variants,
            gamma: if experiment.is_open() {
                DEFAULT_GAMMA_DT_PLUS
            } else {
                0.0
            },
            jitter_rel,
            jitter_mode: JitterMode::PerInterval,
            ensemble_size: DEFAULT_ENSEMBLE_SIZE,
            seed: 0,
            fock_dim: DEFAULT_FOCK_DIM,
            steps_per_interval: DEFAULT_STEPS_PER_INTERVAL,
        }
    }

    /// Defaults, then the config text, then `--set` overrides, then validation.
    pub fn load(experiment: Experiment, text: Option<(&str, &str)>, overrides: &[String]) -> CliResult<Self> {
        let mut cfg = Self::defaults(experiment);
        if let Some((name, body)) = text {
            cfg.apply_text(name, body)?;
        }
        for (i, item) in overrides.iter().enumerate() {
            let (key, value) = item.split_once('=').ok_or_else(|| CliError::ConfigLine {
                source_name: "--set".into(),
                line: i + 1,
                message: format!("expected key=value, got {item:?}"),
            })?;
            cfg.set(key.trim(), value.trim())
                .map_err(|message| CliError::ConfigLine {
                    source_name: "--set".into(),
                    line: i + 1,
                    message,
                })?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn apply_text(&mut self, source_name: &str, body: &str) -> CliResult<()> {
        let mut seen = Vec::new();
        for (idx, raw) in body.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| CliError::ConfigLine {
                source_name: source_name.into(),
                line: idx + 1,
                message,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected key = value, got {line:?}")))?;
            let key = key.trim();
            if seen.contains(&key) {
                return Err(err(format!("duplicate key {key:?}")));
            }
            self.set(key, value.trim()).map_err(err)?;
            seen.push(key);
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        match key {
            "g" => self.g = parse_list(value)?,
            "delta" => self.delta = parse_list(value)?,
            "cycles" => self.cycles = parse_one(value)?,
            "levels" => self.levels = parse_one(value)?,
            "variant" => {
                self.variants = split(value)
                    .map(|s| Variant::parse(s).ok_or_else(|| format!("unknown variant {s:?}")))
                    .collect::<Result<_, _>>()?
            }
            "gamma" => self.gamma = parse_one(value)?,
            "jitter_rel" => self.jitter_rel = parse_list(value)?,
            "jitter_mode" => {
                self.jitter_mode = JitterMode::parse(value).ok_or_else(|| format!("unknown jitter mode {value:?}"))?
            }
            "ensemble_size" => self.ensemble_size = parse_one(value)?,
            "seed" => self.seed = parse_one(value)?,
            "fock_dim" => self.fock_dim = parse_one(value)?,
            "steps_per_interval" => self.steps_per_interval = parse_one(value)?,
            _ => return Err(format!("unknown key {key:?} (known: {})", KEYS.join(", "))),
        }
        Ok(())
    }

    pub fn validate(&self) -> CliResult<()> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.g.is_empty() || self.delta.is_empty() || self.variants.is_empty() || self.jitter_rel.is_empty() {
            return bad("g, delta, variant and jitter_rel must be non-empty".into());
        }
        if let Some(g) = self.g.iter().find(|g| !(g.is_finite() && **g >= 0.0)) {
            return bad(format!("g must be finite and >= 0, got {g}"));
        }
        if let Some(d) = self.delta.iter().find(|d| !(d.is_finite() && **d > 0.0)) {
            return bad(format!("delta must be finite and > 0, got {d}"));
        }
        if let Some(j) = self.jitter_rel.iter().find(|j| !(j.is_finite() && **j >= 0.0)) {
            return bad(format!("jitter_rel must be finite and >= 0, got {j}"));
        }
        if !(self.gamma.is_finite() && self.gamma >= 0.0) {
            return bad(format!("gamma must be finite and >= 0, got {}", self.gamma));
        }
        if self.fock_dim < 2 {
            return bad(format!("fock_dim must be at least 2, got {}", self.fock_dim));
        }
        if self.ensemble_size == 0 || self.steps_per_interval == 0 {
            return bad("ensemble_size and steps_per_interval must be at least 1".into());
        }
        if self.levels == 0 || self.levels > 2 * self.fock_dim {
            return bad(format!("levels must lie in 1..={}", 2 * self.fock_dim));
        }
        match self.experiment {
            Experiment::Spectrum if self.g.len() != 1 => bad("spectrum takes a single g".into()),
            Experiment::Protocol | Experiment::NoisyProtocol | Experiment::JitterEnsemble
                if self.g.len() != 1 || self.delta.len() != 1 =>
            {
                bad(format!("{} takes a single g and a single delta", self.experiment))
            }
            Experiment::NoisyProtocol | Experiment::JitterEnsemble
                if self.variants.contains(&Variant::DispersiveAnalytic) =>
            {
                bad(format!("{} needs numeric variants", self.experiment))
            }
            Experiment::NoisyProtocol if self.jitter_rel.len() != 1 => {
                bad("noisy-protocol takes a single jitter_rel".into())
            }
            _ => Ok(()),
        }
    }

    /// Canonical text form; parsing it reproduces `self`.
    pub fn to_text(&self) -> String {
        self.entries()
            .into_iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }

    /// All keys with their canonical values, in [`KEYS`] order.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let variants = self.variants.iter().map(|v| v.as_str()).collect::<Vec<_>>().join(",");
        vec![
            ("g", join(&self.g)),
            ("delta", join(&self.delta)),
            ("cycles", self.cycles.to_string()),
            ("levels", self.levels.to_string()),
            ("variant", variants),
            ("gamma", self.gamma.to_string()),
            ("jitter_rel", join(&self.jitter_rel)),
            ("jitter_mode", self.jitter_mode.as_str().to_string()),
            ("ensemble_size", self.ensemble_size.to_string()),
            ("seed", self.seed.to_string()),
            ("fock_dim", self.fock_dim.to_string()),
            ("steps_per_interval", self.steps_per_interval.to_string()),
        ]
    }
}

fn split(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty())
}

fn parse_one<T: FromStr>(value: &str) -> Result<T, String> {
    value.parse().map_err(|_| format!("cannot parse {value:?}"))
}

fn parse_list(value: &str) -> Result<Vec<f64>, String> {
    split(value).map(parse_one).collect()
}

// `Display` for f64 is the shortest exact round-trip form.
fn join(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}
