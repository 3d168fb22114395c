//! Run and bench configuration files (TOML).

use std::path::PathBuf;

use hele_shaw::{
    BubbleProblem, CircularDomain, Error as CoreError, Geometry, GmresSettings, Location,
    StreamlineSettings, DEFAULT_MIN_GAP,
};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// A configuration problem, tied to the offending key.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{field}: {message}")]
pub struct ConfigError {
    pub field: String,
    pub message: String,
    /// Stable identifier for machine-readable reports.
    pub code: &'static str,
}

impl ConfigError {
    fn new(field: impl Into<String>, code: &'static str, message: impl ToString) -> Self {
        Self {
            field: field.into(),
            message: message.to_string(),
            code,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeometryName {
    FreeSpace,
    HalfPlane,
    Channel,
}

impl From<GeometryName> for Geometry {
    fn from(g: GeometryName) -> Self {
        match g {
            GeometryName::FreeSpace => Geometry::FreeSpace,
            GeometryName::HalfPlane => Geometry::HalfPlane,
            GeometryName::Channel => Geometry::Channel,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Circle {
    pub center: [f64; 2],
    pub radius: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scale {
    pub bubble: usize,
    pub area: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Streamlines {
    pub grid: usize,
    pub count: usize,
    pub margin: f64,
}

impl Default for Streamlines {
    fn default() -> Self {
        Self {
            grid: hele_shaw::streamlines::DEFAULT_RESOLUTION,
            count: 20,
            margin: hele_shaw::streamlines::DEFAULT_MARGIN,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Outputs {
    pub directory: PathBuf,
    pub formats: Vec<Format>,
}

impl Default for Outputs {
    fn default() -> Self {
        Self {
            directory: PathBuf::from("out"),
            formats: vec![Format::Csv, Format::Json, Format::Svg],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Solver {
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for Solver {
    fn default() -> Self {
        let d = GmresSettings::default();
        Self {
            tol: d.tol,
            max_iterations: d.max_iterations,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub geometry: GeometryName,
    #[serde(rename = "U")]
    pub speed: f64,
    pub alpha: [f64; 2],
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_gap: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<Scale>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub streamlines: Option<Streamlines>,
    #[serde(default)]
    pub outputs: Outputs,
    #[serde(default)]
    pub solver: Solver,
    #[serde(default)]
    pub circles: Vec<Circle>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchSpec {
    pub n_values: Vec<usize>,
    #[serde(default = "one")]
    pub repetitions: usize,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub base: RunConfig,
    pub bench: BenchSpec,
}

fn parse_error(text: &str, e: toml::de::Error) -> ConfigError {
    // name the key on the offending line, e.g. `line 2: geometry`
    let field = match e.span() {
        Some(span) => {
            let line_no = text[..span.start.min(text.len())].matches('\n').count() + 1;
            let line = text.lines().nth(line_no - 1).unwrap_or("");
            let key = line.split('=').next().unwrap_or("").trim();
            if key.is_empty() || !line.contains('=') {
                format!("line {line_no}")
            } else {
                format!("line {line_no}: {key}")
            }
        }
        None => "document".into(),
    };
    ConfigError::new(field, "parse", e.message().trim_end())
}

impl RunConfig {
    /// Parses and validates.
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let config: Self = toml::from_str(text).map_err(|e| parse_error(text, e))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("plain data always serializes")
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry.into()
    }

    pub fn alpha(&self) -> Complex64 {
        Complex64::new(self.alpha[0], self.alpha[1])
    }

    pub fn settings(&self) -> GmresSettings {
        GmresSettings {
            tol: self.solver.tol,
            max_iterations: self.solver.max_iterations,
        }
    }

    pub fn domain(&self) -> Result<CircularDomain, ConfigError> {
        let centers = self
            .circles
            .iter()
            .map(|c| Complex64::new(c.center[0], c.center[1]))
            .collect();
        let radii = self.circles.iter().map(|c| c.radius).collect();
        CircularDomain::new(centers, radii, self.min_gap.unwrap_or(DEFAULT_MIN_GAP))
            .map_err(domain_error)
    }

    pub fn problem(&self) -> Result<BubbleProblem, ConfigError> {
        let mut p = BubbleProblem::new(self.geometry(), self.domain()?, self.speed, self.alpha(), self.n);
        if let Some(s) = self.scale {
            p = p.with_scale(s.bubble, s.area);
        }
        Ok(p)
    }

    pub fn streamline_settings(&self) -> Option<StreamlineSettings> {
        self.streamlines.map(|s| StreamlineSettings {
            resolution: s.grid,
            levels: hele_shaw::Levels::Count(s.count),
            margin: s.margin,
            ..Default::default()
        })
    }

    /// Every precondition the solver would otherwise reject, reported
    /// against the key that causes it.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if let Some(g) = self.min_gap {
            if !(g >= 0.0) {
                return Err(ConfigError::new("min_gap", "bad_min_gap", "must be non-negative"));
            }
        }
        let domain = self.domain()?;
        let n = self.n;
        if n < 8 || n % 2 != 0 {
            return Err(ConfigError::new("n", "bad_n", format!("must be even and at least 8, got {n}")));
        }
        if self.geometry == GeometryName::Channel && n % 4 != 0 {
            return Err(ConfigError::new("n", "bad_n", format!("channel runs need n divisible by 4, got {n}")));
        }
        let alpha = self.alpha();
        if domain.locate(alpha, 0.0) != Location::Inside {
            return Err(ConfigError::new(
                "alpha",
                "alpha_outside",
                format!("{alpha} is not strictly inside the circular domain"),
            ));
        }
        if !self.solver.tol.is_finite() || !(self.solver.tol > 0.0) {
            return Err(ConfigError::new("solver.tol", "bad_solver", "must be positive"));
        }
        if self.solver.max_iterations == 0 {
            return Err(ConfigError::new("solver.max_iterations", "bad_solver", "must be at least 1"));
        }
        if let Some(s) = self.streamlines {
            if s.grid < 2 {
                return Err(ConfigError::new("streamlines.grid", "bad_streamlines", "must be at least 2"));
            }
            if s.count == 0 {
                return Err(ConfigError::new("streamlines.count", "bad_streamlines", "must be at least 1"));
            }
            if !(s.margin > 0.0) || s.margin >= 1.0 {
                return Err(ConfigError::new("streamlines.margin", "bad_streamlines", "must lie in (0, 1)"));
            }
        }
        if self.outputs.formats.is_empty() {
            return Err(ConfigError::new("outputs.formats", "bad_outputs", "list at least one of csv, json, svg"));
        }
        self.problem()?.validate().map_err(|e| match e {
            CoreError::BadSpeed(_) => ConfigError::new("U", "bad_speed", e),
            CoreError::ScaleNotAllowed => ConfigError::new("scale", "scale_not_allowed", e),
            CoreError::BadIndex { .. } => ConfigError::new("scale.bubble", "bad_index", e),
            CoreError::BadArea(_) => ConfigError::new("scale.area", "bad_area", e),
            other => ConfigError::new("circles", "bad_domain", other),
        })
    }
}

fn domain_error(e: CoreError) -> ConfigError {
    match &e {
        CoreError::BadRadius { index, .. } => {
            ConfigError::new(format!("circles[{}].radius", index - 1), "bad_radius", e)
        }
        CoreError::Outside { index, .. } => {
            ConfigError::new(format!("circles[{}]", index - 1), "circle_outside", e)
        }
        CoreError::Overlap { first: 0, second, .. } => {
            ConfigError::new(format!("circles[{}]", second - 1), "overlap", e)
        }
        CoreError::Overlap { second, .. } => {
            ConfigError::new(format!("circles[{}]", second - 1), "overlap", e)
        }
        CoreError::InvalidParameter(_) => ConfigError::new("circles", "bad_domain", e),
        _ => ConfigError::new("circles", "bad_domain", e),
    }
}

impl BenchConfig {
    /// A run config plus a `[bench]` table.
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let mut table: toml::Table = toml::from_str(text).map_err(|e| parse_error(text, e))?;
        let bench = table
            .remove("bench")
            .ok_or_else(|| ConfigError::new("bench", "missing_bench", "a [bench] table is required"))?;
        let bench: BenchSpec = bench
            .try_into()
            .map_err(|e: toml::de::Error| ConfigError::new("bench", "parse", e.message()))?;
        let base: RunConfig = table
            .try_into()
            .map_err(|e: toml::de::Error| ConfigError::new("document", "parse", e.message()))?;
        base.validate()?;
        if bench.n_values.is_empty() {
            return Err(ConfigError::new("bench.n_values", "bad_bench", "list at least one n"));
        }
        if bench.n_values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ConfigError::new("bench.n_values", "bad_bench", "must be strictly ascending"));
        }
        if let Some(n) = bench.n_values.iter().find(|&&n| n % 4 != 0 || n < 8) {
            return Err(ConfigError::new(
                "bench.n_values",
                "bad_bench",
                format!("{n} is not a multiple of 4 that is at least 8"),
            ));
        }
        if bench.repetitions == 0 {
            return Err(ConfigError::new("bench.repetitions", "bad_bench", "must be at least 1"));
        }
        Ok(Self { base, bench })
    }
}
