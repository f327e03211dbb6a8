//! Machine-readable run report with a fixed key order (struct declaration
//! order under serde).

use serde::Serialize;

use crate::output::FileEntry;

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    pub gauge: GaugeInfo,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub anchor: Option<AnchorInfo>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub admissible_lambda: Option<Vec<LambdaInterval>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nodes: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub lambdas: Vec<LambdaEntry>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<CheckEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub qualitative: Option<serde_json::Value>,
    pub files: Vec<FileEntry>,
}

impl RunReport {
    pub fn new(command: &str) -> RunReport {
        RunReport {
            command: command.to_string(),
            gauge: GaugeInfo::default(),
            anchor: None,
            admissible_lambda: None,
            nodes: None,
            lambdas: Vec::new(),
            checks: Vec::new(),
            qualitative: None,
            files: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }

    pub fn all_checks_pass(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn worst_failure(&self) -> Option<&CheckEntry> {
        self.checks
            .iter()
            .filter(|c| !c.passed)
            .max_by(|a, b| {
                let ra = a.value / a.tolerance;
                let rb = b.value / b.tolerance;
                ra.partial_cmp(&rb).unwrap_or(std::cmp::Ordering::Equal)
            })
    }
}

/// Resolved gauge choices of the run.
#[derive(Debug, Clone, Default, Serialize)]
pub struct GaugeInfo {
    /// Base point after snapping to the grid (coefficient mode).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base_point: Option<f64>,
    /// z-domain produced by the transform.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z_domain: Option<[f64; 2]>,
    /// Base of the accumulated density integral I (the left z edge).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub integral_base: Option<f64>,
}

/// Anchor resolution of the zero mode.
#[derive(Debug, Clone, Serialize)]
pub struct AnchorInfo {
    pub requested: f64,
    pub snapped: f64,
    pub psi0: f64,
    pub dpsi0: f64,
}

/// Open interval with `null` standing for an unbounded end.
#[derive(Debug, Clone, Serialize)]
pub struct LambdaInterval {
    pub lo: Option<f64>,
    pub hi: Option<f64>,
}

impl LambdaInterval {
    pub fn from_pair(lo: f64, hi: f64) -> LambdaInterval {
        LambdaInterval {
            lo: lo.is_finite().then_some(lo),
            hi: hi.is_finite().then_some(hi),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LambdaEntry {
    pub lambda: f64,
    pub admissible: bool,
    /// Files emitted for this member (empty when inadmissible).
    pub files: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckEntry {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckEntry {
    pub fn bounded(name: impl Into<String>, value: f64, tolerance: f64) -> CheckEntry {
        CheckEntry {
            name: name.into(),
            value,
            tolerance,
            passed: value.is_finite() && value <= tolerance,
        }
    }

    /// A yes/no check encoded as value 0 (pass) or 1 (fail).
    pub fn boolean(name: impl Into<String>, ok: bool) -> CheckEntry {
        CheckEntry {
            name: name.into(),
            value: if ok { 0.0 } else { 1.0 },
            tolerance: 0.5,
            passed: ok,
        }
    }
}
