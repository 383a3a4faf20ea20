use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::CliError;
use crate::operators::Potential;

/// The named studies the runner knows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StudyKind {
    Superconvergence,
    QhopBaseline,
    GeneralOrder,
    Quadrature,
    CommutatorsFig1,
    BlockEncoding,
    Resources,
}

impl StudyKind {
    pub const ALL: [StudyKind; 7] = [
        StudyKind::Superconvergence,
        StudyKind::QhopBaseline,
        StudyKind::GeneralOrder,
        StudyKind::Quadrature,
        StudyKind::CommutatorsFig1,
        StudyKind::BlockEncoding,
        StudyKind::Resources,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            StudyKind::Superconvergence => "superconvergence",
            StudyKind::QhopBaseline => "qhop_baseline",
            StudyKind::GeneralOrder => "general_order",
            StudyKind::Quadrature => "quadrature",
            StudyKind::CommutatorsFig1 => "commutators_fig1",
            StudyKind::BlockEncoding => "block_encoding",
            StudyKind::Resources => "resources",
        }
    }
}

impl fmt::Display for StudyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StudyKind {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        StudyKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| config_error("study", format!("unknown study `{s}`")))
    }
}

/// Pass/fail thresholds of the in-study assertions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Half-width of the accepted window around an expected slope.
    pub slope: f64,
    pub quadrature_slope: f64,
    /// Largest `max/min` of fitted constants across grid sizes.
    pub preconstant_ratio: f64,
    /// Largest `max/min` of `error / (C_comm h³)` across the step range.
    pub stability_ratio: f64,
    /// Largest relative spread of key-commutator values across grid sizes.
    pub n_variation: f64,
    /// Smallest growth of the Taylor term from the smallest to the largest grid.
    pub taylor_growth: f64,
    pub lcu_target: f64,
    pub ham_t_block: f64,
    /// Relative residual of the circuit block against the target.
    pub proportionality: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            slope: 0.3,
            quadrature_slope: 0.2,
            preconstant_ratio: 2.0,
            stability_ratio: 2.0,
            n_variation: 0.5,
            taylor_growth: 2.0,
            lcu_target: 1e-13,
            ham_t_block: 1e-12,
            proportionality: 1e-9,
        }
    }
}

/// Parameters of the resource calculator study. Supplying any of
/// `theta`, `c_h` or `epsilon` switches from the sweep to a single query.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResourceConfig {
    pub theta: Option<f64>,
    pub c_h: Option<f64>,
    pub epsilon: Option<f64>,
    pub deriv_sup: Option<f64>,
    pub n_a: Option<usize>,
}

impl ResourceConfig {
    pub fn is_query(&self) -> bool {
        self.theta.is_some() || self.c_h.is_some() || self.epsilon.is_some()
    }
}

/// One JSON document describing a study run. Every field is optional; the
/// study supplies defaults for what is missing.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    pub study: Option<StudyKind>,
    pub n: Option<usize>,
    pub potential: Option<Potential>,
    pub domain_length: Option<f64>,
    pub t0: Option<f64>,
    pub t_total: Option<f64>,
    pub h: Option<f64>,
    pub alpha: Option<f64>,
    pub ns: Option<usize>,
    pub seed: Option<u64>,
    pub h_list: Option<Vec<f64>>,
    pub m_list: Option<Vec<usize>>,
    pub n_list: Option<Vec<usize>>,
    pub l_list: Option<Vec<usize>>,
    pub t_list: Option<Vec<f64>>,
    #[serde(default)]
    pub resources: ResourceConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
    pub output: Option<PathBuf>,
    pub plot: Option<bool>,
}

fn config_error(path: impl Into<String>, message: impl Into<String>) -> CliError {
    CliError::Config {
        path: path.into(),
        message: message.into(),
    }
}

fn check_real_list(name: &str, values: &[f64], nonnegative: bool) -> Result<(), CliError> {
    if values.is_empty() {
        return Err(config_error(name, "list must be nonempty"));
    }
    for (i, v) in values.iter().enumerate() {
        let ok = v.is_finite() && (*v > 0.0 || (nonnegative && *v == 0.0));
        if !ok {
            return Err(config_error(format!("{name}[{i}]"), format!("invalid value {v}")));
        }
    }
    check_monotone(name, values)
}

fn check_count_list(name: &str, values: &[usize]) -> Result<(), CliError> {
    if values.is_empty() {
        return Err(config_error(name, "list must be nonempty"));
    }
    if let Some(i) = values.iter().position(|&v| v == 0) {
        return Err(config_error(format!("{name}[{i}]"), "must be positive"));
    }
    let as_real: Vec<f64> = values.iter().map(|&v| v as f64).collect();
    check_monotone(name, &as_real)
}

fn check_monotone(name: &str, values: &[f64]) -> Result<(), CliError> {
    let up = values.windows(2).all(|w| w[1] > w[0]);
    let down = values.windows(2).all(|w| w[1] < w[0]);
    if up || down {
        Ok(())
    } else {
        Err(config_error(name, "list must be strictly monotone"))
    }
}

fn check_positive(name: &str, v: Option<f64>) -> Result<(), CliError> {
    match v {
        Some(x) if !(x.is_finite() && x > 0.0) => Err(config_error(name, format!("must be positive, got {x}"))),
        _ => Ok(()),
    }
}

impl StudyConfig {
    /// Parses a JSON document; errors carry the path of the offending field.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            config_error(if path.is_empty() { ".".into() } else { path }, e.into_inner().to_string())
        })
    }

    /// Pins the config to `kind`, rejecting a config written for another study.
    pub fn bind(mut self, kind: StudyKind) -> Result<Self, CliError> {
        if let Some(s) = self.study {
            if s != kind {
                return Err(config_error("study", format!("config names `{s}` but the command is `{kind}`")));
            }
        }
        self.study = Some(kind);
        Ok(self)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| config_error("--config", format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if let Some(list) = &self.h_list {
            check_real_list("h_list", list, false)?;
        }
        if let Some(list) = &self.t_list {
            check_real_list("t_list", list, true)?;
        }
        for (name, list) in [("m_list", &self.m_list), ("n_list", &self.n_list), ("l_list", &self.l_list)] {
            if let Some(list) = list {
                check_count_list(name, list)?;
            }
        }
        if self.n == Some(0) {
            return Err(config_error("n", "must be positive"));
        }
        if self.ns == Some(0) {
            return Err(config_error("ns", "must be positive"));
        }
        for (name, v) in [
            ("domain_length", self.domain_length),
            ("t_total", self.t_total),
            ("h", self.h),
            ("alpha", self.alpha),
            ("resources.theta", self.resources.theta),
            ("resources.c_h", self.resources.c_h),
            ("resources.epsilon", self.resources.epsilon),
            ("resources.deriv_sup", self.resources.deriv_sup),
        ] {
            check_positive(name, v)?;
        }
        if let Some(t0) = self.t0 {
            if !t0.is_finite() {
                return Err(config_error("t0", "must be finite"));
            }
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("tolerances.slope", t.slope),
            ("tolerances.quadrature_slope", t.quadrature_slope),
            ("tolerances.preconstant_ratio", t.preconstant_ratio),
            ("tolerances.stability_ratio", t.stability_ratio),
            ("tolerances.n_variation", t.n_variation),
            ("tolerances.taylor_growth", t.taylor_growth),
            ("tolerances.lcu_target", t.lcu_target),
            ("tolerances.ham_t_block", t.ham_t_block),
            ("tolerances.proportionality", t.proportionality),
        ] {
            check_positive(name, Some(v))?;
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form, ignoring the output location.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.output = None;
        canonical.plot = None;
        let json = serde_json::to_string(&canonical).expect("config serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_of(err: CliError) -> String {
        match err {
            CliError::Config { path, .. } => path,
            other => panic!("expected a config error, got {other}"),
        }
    }

    #[test]
    fn empty_document_is_valid() {
        let c = StudyConfig::from_json("{}").unwrap();
        assert_eq!(c, StudyConfig::default());
        c.validate().unwrap();
    }

    #[test]
    fn unknown_field_reports_path() {
        let err = StudyConfig::from_json(r#"{"tolerances": {"slop": 0.1}}"#).unwrap_err();
        assert_eq!(path_of(err), "tolerances.slop");
    }

    #[test]
    fn bad_potential_reports_path() {
        let err = StudyConfig::from_json(r#"{"potential": "square_well"}"#).unwrap_err();
        assert_eq!(path_of(err), "potential");
        let c = StudyConfig::from_json(r#"{"potential": "gaussian_bump"}"#).unwrap();
        assert_eq!(c.potential, Some(Potential::GaussianBump));
    }

    #[test]
    fn wrong_type_reports_nested_path() {
        let err = StudyConfig::from_json(r#"{"h_list": [0.1, "x"]}"#).unwrap_err();
        assert_eq!(path_of(err), "h_list[1]");
    }

    #[test]
    fn list_validation() {
        let empty = StudyConfig::from_json(r#"{"h_list": []}"#).unwrap();
        assert_eq!(path_of(empty.validate().unwrap_err()), "h_list");
        let unsorted = StudyConfig::from_json(r#"{"m_list": [4, 16, 8]}"#).unwrap();
        assert_eq!(path_of(unsorted.validate().unwrap_err()), "m_list");
        let negative = StudyConfig::from_json(r#"{"h_list": [0.1, -0.05]}"#).unwrap();
        assert_eq!(path_of(negative.validate().unwrap_err()), "h_list[1]");
        let zero = StudyConfig::from_json(r#"{"n_list": [0, 64]}"#).unwrap();
        assert_eq!(path_of(zero.validate().unwrap_err()), "n_list[0]");
        let descending = StudyConfig::from_json(r#"{"h_list": [0.2, 0.1]}"#).unwrap();
        descending.validate().unwrap();
    }

    #[test]
    fn hash_ignores_output_only() {
        let a = StudyConfig::default();
        let mut b = a.clone();
        b.output = Some("elsewhere".into());
        assert_eq!(a.hash(), b.hash());
        b.n = Some(64);
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }
}
