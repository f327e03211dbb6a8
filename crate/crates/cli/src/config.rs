//! JSON run-configuration model and validation.

use serde::{Deserialize, Serialize};

use crate::CliError;

pub const DEFAULT_GRID_SIZE: usize = 2001;
pub const MIN_GRID_SIZE: usize = 101;

/// Oracle identifier for anchoring a zero mode to the quarter-order
/// Bessel superposition sqrt(z)[C1 J_1/4(z^2/2) + C2 Y_1/4(z^2/2)].
pub const BESSEL_MODE_ORACLE: &str = "bessel_mode";

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemConfig,
    #[serde(default = "default_grid_size")]
    pub grid_size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zero_mode: Option<ZeroModeConfig>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub lambdas: Vec<f64>,
    #[serde(default)]
    pub outputs: OutputConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
}

fn default_grid_size() -> usize {
    DEFAULT_GRID_SIZE
}

/// Either coefficient mode (A, B, C on an x-domain) or direct mode
/// (V1 on a z-domain); exactly one of the two groups must be present.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
    pub a: Option<String>,
    #[serde(rename = "B", default, skip_serializing_if = "Option::is_none")]
    pub b: Option<String>,
    #[serde(rename = "C", default, skip_serializing_if = "Option::is_none")]
    pub c: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_domain: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_point: Option<f64>,
    #[serde(rename = "V1", default, skip_serializing_if = "Option::is_none")]
    pub v1: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z_domain: Option<[f64; 2]>,
}

/// Zero-mode anchoring: either literal (anchor, psi0, dpsi0) or oracle
/// mode with superposition constants.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZeroModeConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchor: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dpsi0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<String>,
    #[serde(rename = "C1", default, skip_serializing_if = "Option::is_none")]
    pub c1: Option<f64>,
    #[serde(rename = "C2", default, skip_serializing_if = "Option::is_none")]
    pub c2: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_directory")]
    pub directory: String,
    #[serde(default = "default_formats")]
    pub formats: Vec<String>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            directory: default_directory(),
            formats: default_formats(),
        }
    }
}

fn default_directory() -> String {
    "out".to_string()
}

fn default_formats() -> Vec<String> {
    vec!["csv".to_string()]
}

/// Check tolerances; every field has a pinned default and may be
/// overridden per config.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Absolute quadrature tolerance.
    pub quadrature: f64,
    /// Round trip |x(z(x)) - x| relative bound.
    pub roundtrip: f64,
    /// FD consistency of the gauge log-derivative with -B/A.
    pub gauge_consistency: f64,
    /// |y' + y^2 - V1| <= riccati * (1 + |V1|) away from nodes.
    pub riccati: f64,
    /// x-side vs z-side solution agreement, relative.
    pub equivalence: f64,
    /// psi_lambda (I + lambda) = psi, relative.
    pub modulation_identity: f64,
    /// Normalized zero-mode residual of family members.
    pub isospectral: f64,
    /// Normalized pullback residual on the x axis.
    pub pullback: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            quadrature: 1e-10,
            roundtrip: 1e-9,
            gauge_consistency: 1e-6,
            riccati: 1e-5,
            equivalence: 1e-6,
            modulation_identity: 1e-12,
            isospectral: 1e-5,
            pullback: 1e-5,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<RunConfig, CliError> {
        let config: RunConfig = serde_json::from_str(text)
            .map_err(|e| CliError::Config(format!("invalid config JSON: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.problem.validate()?;
        if self.grid_size < MIN_GRID_SIZE {
            return Err(CliError::Config(format!(
                "grid_size: must be at least {MIN_GRID_SIZE}, got {}",
                self.grid_size
            )));
        }
        for (i, l) in self.lambdas.iter().enumerate() {
            if !l.is_finite() {
                return Err(CliError::Config(format!("lambdas[{i}]: must be finite")));
            }
        }
        for f in &self.outputs.formats {
            if f != "csv" {
                return Err(CliError::Config(format!(
                    "outputs.formats: unsupported format `{f}` (only `csv`)"
                )));
            }
        }
        if let Some(zm) = &self.zero_mode {
            zm.validate()?;
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("quadrature", t.quadrature),
            ("roundtrip", t.roundtrip),
            ("gauge_consistency", t.gauge_consistency),
            ("riccati", t.riccati),
            ("equivalence", t.equivalence),
            ("modulation_identity", t.modulation_identity),
            ("isospectral", t.isospectral),
            ("pullback", t.pullback),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(CliError::Config(format!(
                    "tolerances.{name}: must be a positive finite number"
                )));
            }
        }
        Ok(())
    }
}

impl ProblemConfig {
    pub fn is_coefficient_mode(&self) -> Result<bool, CliError> {
        let coefficient_fields = [
            self.a.is_some(),
            self.b.is_some(),
            self.c.is_some(),
            self.x_domain.is_some(),
        ];
        let direct_fields = [self.v1.is_some(), self.z_domain.is_some()];
        let any_coefficient = coefficient_fields.iter().any(|&f| f);
        let any_direct = direct_fields.iter().any(|&f| f);
        match (any_coefficient, any_direct) {
            (true, true) => Err(CliError::Config(
                "problem: coefficient fields (A, B, C, x_domain) and direct fields (V1, z_domain) cannot be mixed".into(),
            )),
            (false, false) => Err(CliError::Config(
                "problem: provide either {A, B, C, x_domain, base_point} or {V1, z_domain}".into(),
            )),
            (true, false) => Ok(true),
            (false, true) => Ok(false),
        }
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.is_coefficient_mode()? {
            for (name, field) in [("A", &self.a), ("B", &self.b), ("C", &self.c)] {
                if field.is_none() {
                    return Err(CliError::Config(format!("problem.{name}: missing")));
                }
            }
            let domain = self
                .x_domain
                .ok_or_else(|| CliError::Config("problem.x_domain: missing".into()))?;
            check_domain("problem.x_domain", domain)?;
            if let Some(base) = self.base_point {
                if !(base >= domain[0] && base <= domain[1]) {
                    return Err(CliError::Config(format!(
                        "problem.base_point: {base} outside x_domain [{}, {}]",
                        domain[0], domain[1]
                    )));
                }
            }
        } else {
            if self.v1.is_none() {
                return Err(CliError::Config("problem.V1: missing".into()));
            }
            let domain = self
                .z_domain
                .ok_or_else(|| CliError::Config("problem.z_domain: missing".into()))?;
            check_domain("problem.z_domain", domain)?;
            if self.base_point.is_some() {
                return Err(CliError::Config(
                    "problem.base_point: not applicable in direct mode".into(),
                ));
            }
        }
        Ok(())
    }

    /// Base point, defaulting to the domain midpoint.
    pub fn resolved_base_point(&self) -> Option<f64> {
        let domain = self.x_domain?;
        Some(
            self.base_point
                .unwrap_or_else(|| 0.5 * (domain[0] + domain[1])),
        )
    }
}

fn check_domain(path: &str, domain: [f64; 2]) -> Result<(), CliError> {
    if !domain[0].is_finite() || !domain[1].is_finite() || domain[0] >= domain[1] {
        return Err(CliError::Config(format!(
            "{path}: must be a finite interval [lo, hi] with lo < hi, got [{}, {}]",
            domain[0], domain[1]
        )));
    }
    Ok(())
}

impl ZeroModeConfig {
    pub fn is_oracle(&self) -> bool {
        self.oracle.is_some()
    }

    fn validate(&self) -> Result<(), CliError> {
        if let Some(oracle) = &self.oracle {
            if oracle != BESSEL_MODE_ORACLE {
                return Err(CliError::Config(format!(
                    "zero_mode.oracle: unknown oracle `{oracle}` (supported: `{BESSEL_MODE_ORACLE}`)"
                )));
            }
            if self.c1.is_none() || self.c2.is_none() {
                return Err(CliError::Config(
                    "zero_mode: oracle form requires C1 and C2".into(),
                ));
            }
            if self.psi0.is_some() || self.dpsi0.is_some() {
                return Err(CliError::Config(
                    "zero_mode: oracle form must not carry psi0/dpsi0".into(),
                ));
            }
        } else {
            for (name, field) in [
                ("anchor", self.anchor),
                ("psi0", self.psi0),
                ("dpsi0", self.dpsi0),
            ] {
                if field.is_none() {
                    return Err(CliError::Config(format!("zero_mode.{name}: missing")));
                }
            }
            if self.c1.is_some() || self.c2.is_some() {
                return Err(CliError::Config(
                    "zero_mode: C1/C2 are only valid with an oracle".into(),
                ));
            }
        }
        Ok(())
    }
}
