//! Run configuration: one JSON document with a top-level `"command"`.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use spinphoton_core::cavity::{PhaseSign, RootSelection};
use spinphoton_core::entanglement::EntanglementMode;
use spinphoton_core::quantum::PauliChannel;
use spinphoton_core::surface_code::{Geometry, StabilizerChoice, StabilizerKind};
use spinphoton_core::syndrome::{ProtocolOptions, SpinInit};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Config {
    SolveDetuning(SolveDetuningConfig),
    ConfidenceSweep(ConfidenceSweepConfig),
    EntangleSweep(EntangleSweepConfig),
    SyndromeSim(SyndromeSimConfig),
}

impl Config {
    pub fn name(&self) -> &'static str {
        match self {
            Config::SolveDetuning(_) => "solve-detuning",
            Config::ConfidenceSweep(_) => "confidence-sweep",
            Config::EntangleSweep(_) => "entangle-sweep",
            Config::SyndromeSim(_) => "syndrome-sim",
        }
    }

    pub fn output(&self) -> OutputFields {
        let (out, format) = match self {
            Config::SolveDetuning(c) => (&c.out, c.format),
            Config::ConfidenceSweep(c) => (&c.out, c.format),
            Config::EntangleSweep(c) => (&c.out, c.format),
            Config::SyndromeSim(c) => (&c.out, c.format),
        };
        OutputFields {
            out: out.clone(),
            format,
        }
    }

    pub fn default_format(&self) -> Format {
        match self {
            Config::SyndromeSim(_) => Format::Json,
            _ => Format::Csv,
        }
    }

    /// Parses `text`; `origin` names the source in diagnostics.
    ///
    /// The document is read twice: once for the command name, then straight
    /// into the command's own type so that field errors keep their position.
    pub fn parse(text: &str, origin: &str) -> Result<Config, CliError> {
        #[derive(Deserialize)]
        struct Head {
            command: String,
        }
        let head: Head = serde_json::from_str(text).map_err(|e| parse_error(origin, "", &e))?;
        let config = match head.command.as_str() {
            "solve-detuning" => Config::SolveDetuning(parse_as(text, origin)?),
            "confidence-sweep" => Config::ConfidenceSweep(parse_as(text, origin)?),
            "entangle-sweep" => Config::EntangleSweep(parse_as(text, origin)?),
            "syndrome-sim" => Config::SyndromeSim(parse_as(text, origin)?),
            other => {
                return Err(CliError::invalid(
                    "command",
                    format!(
                        "unknown command `{other}`, expected one of solve-detuning, \
                         confidence-sweep, entangle-sweep, syndrome-sim"
                    ),
                ))
            }
        };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), CliError> {
        match self {
            Config::SolveDetuning(c) => {
                if let Some([lo, hi]) = c.bracket {
                    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                        return Err(CliError::invalid(
                            "bracket",
                            "lower end must be below upper end",
                        ));
                    }
                }
                if c.scan_points == Some(0) {
                    return Err(CliError::invalid("scan_points", "must be positive"));
                }
            }
            Config::ConfidenceSweep(c) => {
                c.g.values("g")?;
                c.delta.values("delta")?;
                c.p_star.values("p_star")?;
                if c.readouts.is_empty() {
                    return Err(CliError::invalid("readouts", "must not be empty"));
                }
            }
            Config::EntangleSweep(c) => {
                c.delta_energy.values("delta_energy")?;
                if c.gamma_ratios.is_empty() {
                    return Err(CliError::invalid("gamma_ratios", "must not be empty"));
                }
                if c.kappa_s.is_empty() {
                    return Err(CliError::invalid("kappa_s", "must not be empty"));
                }
            }
            Config::SyndromeSim(c) => {
                if c.shots == 0 {
                    return Err(CliError::invalid("shots", "must be at least 1"));
                }
            }
        }
        Ok(())
    }
}

fn parse_as<T: serde::de::DeserializeOwned>(text: &str, origin: &str) -> Result<T, CliError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let value = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let field = e.path().to_string();
        parse_error(origin, &field, e.inner())
    })?;
    de.end().map_err(|e| parse_error(origin, "", &e))?;
    Ok(value)
}

fn parse_error(origin: &str, field: &str, e: &serde_json::Error) -> CliError {
    // serde_json appends the position to its message; it is reported separately.
    let text = e.to_string();
    let message = match text.rsplit_once(" at line ") {
        Some((m, _)) => m.to_string(),
        None => text,
    };
    CliError::ConfigParse {
        path: origin.to_string(),
        line: e.line(),
        column: e.column(),
        field: if field == "." {
            String::new()
        } else {
            field.to_string()
        },
        message,
    }
}

/// Output settings shared by every command; command-line flags override them.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct OutputFields {
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

/// A parameter axis: a single value, an explicit list, or an evenly spaced
/// range with both ends included.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    Value(f64),
    List(Vec<f64>),
    Range {
        start: f64,
        stop: f64,
        points: usize,
    },
}

impl Grid {
    pub fn values(&self, field: &str) -> Result<Vec<f64>, CliError> {
        let v = match self {
            Grid::Value(x) => vec![*x],
            Grid::List(xs) => xs.clone(),
            Grid::Range {
                start,
                stop,
                points,
            } => match *points {
                0 => Vec::new(),
                1 => vec![*start],
                n => {
                    let step = (stop - start) / (n - 1) as f64;
                    (0..n)
                        .map(|i| {
                            if i == n - 1 {
                                *stop
                            } else {
                                start + i as f64 * step
                            }
                        })
                        .collect()
                }
            },
        };
        if v.is_empty() {
            return Err(CliError::invalid(field, "grid must not be empty"));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(CliError::invalid(field, "grid values must be finite"));
        }
        Ok(v)
    }
}

fn default_gamma() -> f64 {
    0.1
}

fn default_distance() -> usize {
    2
}

fn default_true() -> bool {
    true
}

fn default_minus() -> PhaseSign {
    PhaseSign::Minus
}

fn default_geometry() -> Geometry {
    Geometry::Planar
}

fn default_kind() -> StabilizerKind {
    StabilizerKind::Plaquette
}

fn default_readouts() -> Vec<Readout> {
    vec![Readout::Plus, Readout::Minus]
}

fn default_gamma_ratios() -> Vec<f64> {
    vec![0.3, 1.0, 1.5]
}

fn default_kappa_s_grid() -> Vec<f64> {
    vec![0.0, 0.2, 0.5]
}

/// Roots of the conditional-phase condition for one resonant system.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveDetuningConfig {
    #[allow(dead_code)]
    command: String,
    pub g: f64,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default)]
    pub kappa_s: f64,
    /// Both quarter-wave targets when absent.
    pub sign: Option<PhaseSign>,
    pub bracket: Option<[f64; 2]>,
    pub scan_points: Option<usize>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Readout {
    Plus,
    Minus,
}

/// Readout confidence over `g x p_star x delta`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfidenceSweepConfig {
    #[allow(dead_code)]
    command: String,
    pub g: Grid,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default)]
    pub kappa_s: f64,
    pub delta: Grid,
    pub p_star: Grid,
    #[serde(default = "default_kind")]
    pub kind: StabilizerKind,
    #[serde(default = "default_geometry")]
    pub geometry: Geometry,
    #[serde(default = "default_distance")]
    pub distance: usize,
    #[serde(default)]
    pub stabilizer: StabilizerChoice,
    /// Quarter-wave target the readout basis is built for.
    #[serde(default = "default_minus")]
    pub sign: PhaseSign,
    #[serde(default = "default_readouts")]
    pub readouts: Vec<Readout>,
    #[serde(default)]
    pub spin_init: SpinInit,
    #[serde(default = "default_true")]
    pub phase_correction: bool,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub format: Option<Format>,
}

/// Heralded efficiency and fidelity against the QD energy splitting.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntangleSweepConfig {
    #[allow(dead_code)]
    command: String,
    pub g: f64,
    #[serde(default = "default_gamma")]
    pub gamma1: f64,
    /// `gamma2 / gamma1` values.
    #[serde(default = "default_gamma_ratios")]
    pub gamma_ratios: Vec<f64>,
    #[serde(default = "default_kappa_s_grid")]
    pub kappa_s: Vec<f64>,
    pub delta_energy: Grid,
    #[serde(default)]
    pub mode: EntanglementMode,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ChannelSpec {
    Depolarizing(f64),
    Pauli { x: f64, y: f64, z: f64 },
}

impl ChannelSpec {
    pub fn channel(&self) -> Result<PauliChannel, CliError> {
        let ch = match *self {
            ChannelSpec::Depolarizing(p) => PauliChannel::depolarizing(p),
            ChannelSpec::Pauli { x, y, z } => PauliChannel::new(x, y, z),
        };
        ch.map_err(|e| CliError::invalid("channel", e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    Ideal {
        #[serde(default)]
        sign: PhaseSign,
    },
    /// Resonant cavity system; when `delta` is absent it is solved for the
    /// quarter-wave `sign` and picked with `root`.
    Physical {
        g: f64,
        #[serde(default = "default_gamma")]
        gamma: f64,
        #[serde(default)]
        kappa_s: f64,
        delta: Option<f64>,
        #[serde(default = "default_minus")]
        sign: PhaseSign,
        #[serde(default)]
        root: RootSelection,
    },
}

/// Monte Carlo syndrome extraction over a whole lattice.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyndromeSimConfig {
    #[allow(dead_code)]
    command: String,
    #[serde(default = "default_geometry")]
    pub geometry: Geometry,
    #[serde(default = "default_distance")]
    pub distance: usize,
    pub channel: ChannelSpec,
    pub model: ModelSpec,
    pub shots: u64,
    pub seed: Option<u64>,
    #[serde(default)]
    pub spin_init: SpinInit,
    #[serde(default = "default_true")]
    pub phase_correction: bool,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub format: Option<Format>,
}

impl SyndromeSimConfig {
    pub fn protocol(&self) -> ProtocolOptions {
        ProtocolOptions {
            spin_init: self.spin_init,
            phase_correction: self.phase_correction,
        }
    }
}

impl ConfidenceSweepConfig {
    pub fn protocol(&self) -> ProtocolOptions {
        ProtocolOptions {
            spin_init: self.spin_init,
            phase_correction: self.phase_correction,
        }
    }
}
