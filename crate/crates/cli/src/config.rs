//! Run configuration: JSON file merged with command-line flags.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use robin_spectra::curve::CurveSpec;
use robin_spectra::fem::LongitudinalEnds;
use robin_spectra::strip::StripMesh;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::Failure;

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    CurveCheck,
    Spectrum,
    Bracket,
    Sweep,
    Disc,
    Waveguide,
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SideName {
    Interior,
    Exterior,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Ends {
    Dirichlet,
    Neumann,
}

/// A single β or a list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Betas {
    One(f64),
    Many(Vec<f64>),
}

/// Explicit strip width or `"paper"` for `3 log β / β`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Width {
    Explicit(f64),
    Rule(WidthRule),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WidthRule {
    /// `3 log β / β`.
    #[serde(rename = "paper")]
    ThreeLogBeta,
}

/// Contents of a config file; every field is optional.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub schema: Option<u32>,
    pub command: Option<Command>,
    pub curve: Option<CurveSpec>,
    pub side: Option<SideName>,
    pub beta: Option<Betas>,
    pub a: Option<Width>,
    pub mesh: Option<StripMesh>,
    pub s_trunc: Option<f64>,
    pub ends: Option<Ends>,
    pub k: Option<usize>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
    pub seed: Option<u64>,
    #[serde(rename = "R")]
    pub radius: Option<f64>,
    pub m: Option<Vec<usize>>,
    pub d: Option<f64>,
    pub tol: Option<f64>,
    pub checks: Option<Vec<u8>>,
}

/// Flags; each one overrides the matching config file value.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// JSON config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Curve as inline JSON, e.g. '{"family":"circle","radius":1}'.
    #[arg(long)]
    pub curve: Option<String>,
    #[arg(long, value_enum)]
    pub side: Option<SideName>,
    /// Comma-separated coupling constants.
    #[arg(long, value_delimiter = ',')]
    pub beta: Option<Vec<f64>>,
    /// Strip width, or "paper" for 3 log(beta)/beta.
    #[arg(long)]
    pub a: Option<String>,
    #[arg(long)]
    pub n_s: Option<usize>,
    #[arg(long)]
    pub n_u: Option<usize>,
    #[arg(long)]
    pub degree_s: Option<usize>,
    #[arg(long)]
    pub degree_u: Option<usize>,
    #[arg(long)]
    pub stretch: Option<f64>,
    #[arg(long)]
    pub s_trunc: Option<f64>,
    #[arg(long, value_enum)]
    pub ends: Option<Ends>,
    /// Number of eigenvalues.
    #[arg(long)]
    pub k: Option<usize>,
    /// Report path; stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Disc radius.
    #[arg(long = "R")]
    pub radius: Option<f64>,
    /// Comma-separated angular indices.
    #[arg(long, value_delimiter = ',')]
    pub m: Option<Vec<usize>>,
    /// Waveguide width.
    #[arg(long)]
    pub d: Option<f64>,
    /// Eigensolver residual tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Comma-separated acceptance check ids (verify only).
    #[arg(long, value_delimiter = ',')]
    pub checks: Option<Vec<u8>>,
}

/// Fully resolved configuration; its JSON form is hashed into every row.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub schema: u32,
    pub command: Command,
    pub curve: Option<CurveSpec>,
    pub side: SideName,
    pub beta: Vec<f64>,
    pub a: Width,
    pub mesh: StripMesh,
    pub s_trunc: f64,
    pub ends: Ends,
    pub k: usize,
    #[serde(skip)]
    pub output: Option<PathBuf>,
    pub format: Format,
    pub seed: u64,
    #[serde(rename = "R")]
    pub radius: f64,
    pub m: Vec<usize>,
    pub d: f64,
    pub tol: f64,
    pub checks: Vec<u8>,
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure::Validation(msg.into())
}

fn parse_width(s: &str) -> Result<Width, Failure> {
    if s == "paper" {
        return Ok(Width::Rule(WidthRule::ThreeLogBeta));
    }
    s.parse().map(Width::Explicit).map_err(|_| invalid(format!("--a expects a number or \"paper\", got {s:?}")))
}

impl RunConfig {
    pub fn resolve(command: Option<Command>, flags: &Flags) -> Result<Self, Failure> {
        let file = match &flags.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
                let cfg: FileConfig = serde_json::from_str(&text).map_err(|e| invalid(format!("config {}: {e}", path.display())))?;
                if cfg.schema != Some(SCHEMA) {
                    return Err(invalid(format!("config {}: \"schema\" must be {SCHEMA}", path.display())));
                }
                cfg
            }
            None => FileConfig::default(),
        };
        let command = command.or(file.command).ok_or_else(|| invalid("no command given"))?;
        let curve = match &flags.curve {
            Some(json) => Some(serde_json::from_str(json).map_err(|e| invalid(format!("--curve: {e}")))?),
            None => file.curve,
        };
        let beta = match (&flags.beta, file.beta) {
            (Some(b), _) => b.clone(),
            (None, Some(Betas::One(b))) => vec![b],
            (None, Some(Betas::Many(b))) => b,
            (None, None) => vec![10.0],
        };
        let a = match &flags.a {
            Some(s) => parse_width(s)?,
            None => file.a.unwrap_or(Width::Rule(WidthRule::ThreeLogBeta)),
        };
        let mut mesh = file.mesh.unwrap_or_default();
        mesh.n_s = flags.n_s.unwrap_or(mesh.n_s);
        mesh.n_u = flags.n_u.unwrap_or(mesh.n_u);
        mesh.degree_s = flags.degree_s.unwrap_or(mesh.degree_s);
        mesh.degree_u = flags.degree_u.unwrap_or(mesh.degree_u);
        mesh.stretch = flags.stretch.unwrap_or(mesh.stretch);
        let cfg = RunConfig {
            schema: SCHEMA,
            command,
            curve,
            side: flags.side.or(file.side).unwrap_or(SideName::Interior),
            beta,
            a,
            mesh,
            s_trunc: flags.s_trunc.or(file.s_trunc).unwrap_or(12.0),
            ends: flags.ends.or(file.ends).unwrap_or(Ends::Dirichlet),
            k: flags.k.or(file.k).unwrap_or(3),
            output: flags.output.clone().or(file.output),
            format: flags.format.or(file.format).unwrap_or(Format::Csv),
            seed: flags.seed.or(file.seed).unwrap_or(0),
            radius: flags.radius.or(file.radius).unwrap_or(1.0),
            m: flags.m.clone().or(file.m).unwrap_or_else(|| vec![0]),
            d: flags.d.or(file.d).unwrap_or(1.0),
            tol: flags.tol.or(file.tol).unwrap_or(1e-9),
            checks: flags.checks.clone().or(file.checks).unwrap_or_default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), Failure> {
        let positive = |name: &str, v: f64| if v > 0.0 && v.is_finite() { Ok(()) } else { Err(invalid(format!("{name} must be positive, got {v}"))) };
        if self.beta.is_empty() {
            return Err(invalid("at least one beta is required"));
        }
        for b in &self.beta {
            positive("beta", *b)?;
        }
        if self.beta.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("beta values must be strictly increasing"));
        }
        if let Width::Explicit(a) = self.a {
            positive("a", a)?;
        }
        positive("s_trunc", self.s_trunc)?;
        positive("R", self.radius)?;
        positive("d", self.d)?;
        positive("tol", self.tol)?;
        if self.mesh.stretch.is_nan() || self.mesh.stretch < 0.0 {
            return Err(invalid("mesh stretch must be non-negative"));
        }
        if self.k == 0 {
            return Err(invalid("k must be at least 1"));
        }
        if matches!(self.command, Command::CurveCheck | Command::Spectrum | Command::Bracket | Command::Sweep) && self.curve.is_none() {
            return Err(invalid("this command needs a curve"));
        }
        Ok(())
    }

    pub fn width(&self, beta: f64) -> f64 {
        match self.a {
            Width::Explicit(a) => a,
            Width::Rule(WidthRule::ThreeLogBeta) => robin_spectra::strip::default_width(beta),
        }
    }

    pub fn ends(&self) -> LongitudinalEnds {
        match self.ends {
            Ends::Dirichlet => LongitudinalEnds::Dirichlet,
            Ends::Neumann => LongitudinalEnds::Neumann,
        }
    }

    /// First 16 hex digits of the SHA-256 of the resolved config.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}
