use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use tubekit::convex::spec::BodySpec;
use tubekit::ConvexBody;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CommandName {
    HilbertDist,
    DeltaProfile,
    OrbitLimit,
    KobaInterval,
    TubeFlat,
    AsymEmbed,
    Dashboard,
}

impl CommandName {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::HilbertDist => "hilbert-dist",
            Self::DeltaProfile => "delta-profile",
            Self::OrbitLimit => "orbit-limit",
            Self::KobaInterval => "koba-interval",
            Self::TubeFlat => "tube-flat",
            Self::AsymEmbed => "asym-embed",
            Self::Dashboard => "dashboard",
        }
    }

    fn allowed(self) -> &'static [&'static str] {
        match self {
            Self::HilbertDist => &["body", "x", "y"],
            Self::DeltaProfile => &["body", "scales", "points", "quadruples", "basepoint", "seed"],
            Self::OrbitLimit => &["body", "target", "rates", "radius", "tol", "normalization", "seed"],
            Self::KobaInterval => &["domain", "body", "z", "w", "steps", "functionals", "seed"],
            Self::TubeFlat => &["base", "c0", "u", "t", "steps", "functionals", "seed"],
            Self::AsymEmbed => &["n"],
            Self::Dashboard => &["base", "scales", "points", "quadruples", "seed"],
        }
    }

    fn needs_seed(self) -> bool {
        !matches!(self, Self::HilbertDist | Self::AsymEmbed)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum DomainKind {
    Tube,
    Polydisk,
    Generic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum NormalizationArg {
    John,
    None,
}

/// One experiment. Every field besides `command` is optional; which ones are
/// accepted depends on the command.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<CommandName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub body: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scales: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    /// Sampled quadruples per scale; absent means exhaustive.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadruples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basepoint: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rates: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalization: Option<NormalizationArg>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<DomainKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub functionals: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c0: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError(format!("config: {e}")))
    }

    pub fn command(&self) -> Result<CommandName, ConfigError> {
        self.command
            .ok_or_else(|| ConfigError("field `command` is required".into()))
    }

    fn present(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        let mut mark = |name: &'static str, set: bool| {
            if set {
                out.push(name);
            }
        };
        mark("body", self.body.is_some());
        mark("base", self.base.is_some());
        mark("x", self.x.is_some());
        mark("y", self.y.is_some());
        mark("z", self.z.is_some());
        mark("w", self.w.is_some());
        mark("scales", self.scales.is_some());
        mark("points", self.points.is_some());
        mark("quadruples", self.quadruples.is_some());
        mark("basepoint", self.basepoint.is_some());
        mark("target", self.target.is_some());
        mark("rates", self.rates.is_some());
        mark("radius", self.radius.is_some());
        mark("tol", self.tol.is_some());
        mark("normalization", self.normalization.is_some());
        mark("domain", self.domain.is_some());
        mark("steps", self.steps.is_some());
        mark("functionals", self.functionals.is_some());
        mark("c0", self.c0.is_some());
        mark("u", self.u.is_some());
        mark("t", self.t.is_some());
        mark("n", self.n.is_some());
        mark("seed", self.seed.is_some());
        out
    }

    pub fn validate(&self) -> Result<CommandName, ConfigError> {
        let cmd = self.command()?;
        let allowed = cmd.allowed();
        if let Some(extra) = self.present().into_iter().find(|f| !allowed.contains(f)) {
            return Err(ConfigError(format!(
                "field `{extra}` is not used by command `{}`",
                cmd.as_str()
            )));
        }
        if cmd.needs_seed() && self.seed.is_none() {
            return Err(ConfigError(format!(
                "field `seed` is required for command `{}`",
                cmd.as_str()
            )));
        }
        Ok(cmd)
    }

    pub fn require<'a, T>(&self, field: &str, v: &'a Option<T>) -> Result<&'a T, ConfigError> {
        v.as_ref().ok_or_else(|| {
            ConfigError(format!(
                "field `{field}` is required for command `{}`",
                self.command.map_or("?", |c| c.as_str())
            ))
        })
    }

    /// SHA-256 of the canonical JSON form, first 16 hex digits.
    pub fn hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut canon = self.clone();
        canon.output = None;
        canon.format = None;
        let text = serde_json::to_string(&canon).expect("config serializes");
        let digest = Sha256::digest(text.as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// `builtin:<name>`, a JSON object, or a string holding a JSON object.
pub fn body_from(field: &str, v: &Value) -> Result<ConvexBody, ConfigError> {
    let spec = match v {
        Value::String(s) => BodySpec::parse(s).map_err(|e| ConfigError(format!("field `{field}`: {e}")))?,
        other => serde_json::from_value::<BodySpec>(other.clone())
            .map_err(|e| ConfigError(format!("field `{field}`: {e}")))?,
    };
    spec.build()
        .map_err(|e| ConfigError(format!("field `{field}`: {e}")))
}
