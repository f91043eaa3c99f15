//! The JSON problem file and its validation.
//!
//! ```json
//! {
//!   "space": ["0", "1"],
//!   "group": [[1, 0]],
//!   "mode": "measures",
//!   "mu": {"0": "3/5", "1": "2/5"},
//!   "nu": {"0": "2/5", "1": "3/5"},
//!   "options": {"max_passes": 100, "epsilon": "0"}
//! }
//! ```
//!
//! Sets mode replaces `mu`/`nu` by `set_a`, `set_b` (label lists) and
//! `base` (label → rational). Rationals are always strings.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::{GroupError, PermutationGroup};
use crate::instances::{FiniteSet, FiniteSpace, Measure};
use crate::rational::Rational;
use crate::solver::TarskiConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Measures,
    Sets,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Measures => "measures",
            Mode::Sets => "sets",
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemOptions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_passes: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<Rational>,
}

impl ProblemOptions {
    fn is_empty(&self) -> bool {
        self.max_passes.is_none() && self.epsilon.is_none()
    }
}

pub type LabelMasses = BTreeMap<String, Rational>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub space: Vec<String>,
    #[serde(default)]
    pub group: Vec<Vec<usize>>,
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<LabelMasses>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<LabelMasses>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub set_a: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub set_b: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<LabelMasses>,
    #[serde(default, skip_serializing_if = "ProblemOptions::is_empty")]
    pub options: ProblemOptions,
}

/// A rejected input, naming the offending field and, for syntax and
/// value errors, the line.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{}{message}{}", field.as_ref().map(|f| format!("field `{f}`: ")).unwrap_or_default(), line.map(|l| format!(" (line {l})")).unwrap_or_default())]
pub struct InputError {
    pub field: Option<String>,
    pub line: Option<usize>,
    pub message: String,
}

impl InputError {
    pub fn field(field: impl Into<String>, message: impl Into<String>) -> Self {
        InputError { field: Some(field.into()), line: None, message: message.into() }
    }

    pub fn general(message: impl Into<String>) -> Self {
        InputError { field: None, line: None, message: message.into() }
    }
}

/// Deserializes JSON, reporting the path of the failing field.
pub fn parse_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, InputError> {
    let mut de = serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(&mut de).map_err(|err| {
        let path = err.path().to_string();
        let inner = err.into_inner();
        let message = inner.to_string();
        // serde_json appends its own position; keep the bare message
        let message = match message.rfind(" at line ") {
            Some(cut) => message[..cut].to_string(),
            None => message,
        };
        InputError {
            field: (path != ".").then_some(path),
            line: Some(inner.line()),
            message,
        }
    })
}

/// Measures-mode payload.
#[derive(Debug, Clone)]
pub struct MeasurePair {
    pub mu: Measure,
    pub nu: Measure,
}

/// Sets-mode payload.
#[derive(Debug, Clone)]
pub struct SetPair {
    pub a: FiniteSet,
    pub b: FiniteSet,
    pub base: Measure,
}

#[derive(Debug, Clone)]
pub enum Payload {
    Measures(MeasurePair),
    Sets(SetPair),
}

/// A validated problem.
#[derive(Debug, Clone)]
pub struct Problem {
    pub space: Arc<FiniteSpace>,
    pub group: PermutationGroup,
    pub payload: Payload,
    pub options: ProblemOptions,
}

impl Problem {
    pub fn mode(&self) -> Mode {
        match self.payload {
            Payload::Measures(_) => Mode::Measures,
            Payload::Sets(_) => Mode::Sets,
        }
    }

    /// Iteration settings: explicit overrides, then file options, then
    /// defaults.
    pub fn tarski_config(&self, max_passes: Option<usize>, epsilon: Option<Rational>) -> Result<TarskiConfig, InputError> {
        let defaults = TarskiConfig::default();
        let max_passes = max_passes.or(self.options.max_passes).unwrap_or(defaults.max_passes);
        if max_passes == 0 {
            return Err(InputError::field("options.max_passes", "must be at least 1"));
        }
        let epsilon = epsilon.or_else(|| self.options.epsilon.clone()).unwrap_or(defaults.epsilon);
        Ok(TarskiConfig { max_passes, epsilon })
    }
}

fn measure_from(space: &Arc<FiniteSpace>, field: &str, masses: &LabelMasses) -> Result<Measure, InputError> {
    let pairs = masses
        .iter()
        .map(|(label, m)| {
            let x = space
                .index_of(label)
                .map_err(|_| InputError::field(format!("{field}.{label}"), format!("unknown point label {label:?}")))?;
            Ok((x, m.clone()))
        })
        .collect::<Result<Vec<_>, InputError>>()?;
    Ok(Measure::from_masses(space, pairs))
}

fn set_from(space: &Arc<FiniteSpace>, field: &str, labels: &[String]) -> Result<FiniteSet, InputError> {
    let mut members = Vec::with_capacity(labels.len());
    for (i, label) in labels.iter().enumerate() {
        let x = space
            .index_of(label)
            .map_err(|_| InputError::field(format!("{field}[{i}]"), format!("unknown point label {label:?}")))?;
        if members.contains(&x) {
            return Err(InputError::field(format!("{field}[{i}]"), format!("repeated point label {label:?}")));
        }
        members.push(x);
    }
    Ok(FiniteSet::from_indices(space, members))
}

fn require<'a, T>(value: &'a Option<T>, field: &str, mode: Mode) -> Result<&'a T, InputError> {
    value.as_ref().ok_or_else(|| InputError::field(field, format!("required in {mode} mode")))
}

fn forbid<T>(value: &Option<T>, field: &str, mode: Mode) -> Result<(), InputError> {
    match value {
        Some(_) => Err(InputError::field(field, format!("not allowed in {mode} mode"))),
        None => Ok(()),
    }
}

impl ProblemFile {
    pub fn from_json(text: &str) -> Result<Self, InputError> {
        parse_json(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem files serialize")
    }

    pub fn validate(&self) -> Result<Problem, InputError> {
        let space = FiniteSpace::new(self.space.iter().cloned()).map_err(|e| InputError::field("space", e.to_string()))?;
        let group = PermutationGroup::generate(&space, self.group.clone()).map_err(|e| match e {
            GroupError::NotAPermutation { generator, .. } => InputError::field(format!("group[{generator}]"), e.to_string()),
            GroupError::GroupTooLarge { .. } => InputError::field("group", e.to_string()),
        })?;
        if self.options.max_passes == Some(0) {
            return Err(InputError::field("options.max_passes", "must be at least 1"));
        }
        let payload = match self.mode {
            Mode::Measures => {
                forbid(&self.set_a, "set_a", self.mode)?;
                forbid(&self.set_b, "set_b", self.mode)?;
                forbid(&self.base, "base", self.mode)?;
                let mu = measure_from(&space, "mu", require(&self.mu, "mu", self.mode)?)?;
                let nu = measure_from(&space, "nu", require(&self.nu, "nu", self.mode)?)?;
                Payload::Measures(MeasurePair { mu, nu })
            }
            Mode::Sets => {
                forbid(&self.mu, "mu", self.mode)?;
                forbid(&self.nu, "nu", self.mode)?;
                let a = set_from(&space, "set_a", require(&self.set_a, "set_a", self.mode)?)?;
                let b = set_from(&space, "set_b", require(&self.set_b, "set_b", self.mode)?)?;
                let base = measure_from(&space, "base", require(&self.base, "base", self.mode)?)?;
                Payload::Sets(SetPair { a, b, base })
            }
        };
        Ok(Problem { space, group, payload, options: self.options.clone() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SWAP: &str = r#"{
        "space": ["0", "1"],
        "group": [[1, 0]],
        "mode": "measures",
        "mu": {"0": "3/5", "1": "2/5"},
        "nu": {"0": "2/5", "1": "3/5"}
    }"#;

    #[test]
    fn parses_and_validates() {
        let file = ProblemFile::from_json(SWAP).unwrap();
        let problem = file.validate().unwrap();
        assert_eq!(problem.group.order(), 2);
        let Payload::Measures(pair) = problem.payload else { panic!("measures mode") };
        assert_eq!(pair.mu.mass(0), Rational::new(3, 5));
    }

    #[test]
    fn zero_denominator_names_field_and_line() {
        let text = SWAP.replace("\"3/5\", \"1\": \"2/5\"}", "\"1/0\", \"1\": \"2/5\"}");
        let err = ProblemFile::from_json(&text).unwrap_err();
        assert_eq!(err.field.as_deref(), Some("mu.0"));
        assert_eq!(err.line, Some(5));
        assert!(err.to_string().contains("zero denominator"), "{err}");
    }

    #[test]
    fn float_masses_are_rejected() {
        let text = SWAP.replace("\"3/5\"", "0.6");
        let err = ProblemFile::from_json(&text).unwrap_err();
        assert_eq!(err.field.as_deref(), Some("mu.0"));
    }

    #[test]
    fn semantic_errors_name_fields() {
        let bad_group = SWAP.replace("[[1, 0]]", "[[0, 0]]");
        let err = ProblemFile::from_json(&bad_group).unwrap().validate().unwrap_err();
        assert_eq!(err.field.as_deref(), Some("group[0]"));

        let bad_label = SWAP.replace("\"nu\": {\"0\"", "\"nu\": {\"7\"");
        let err = ProblemFile::from_json(&bad_label).unwrap().validate().unwrap_err();
        assert_eq!(err.field.as_deref(), Some("nu.7"));

        let missing = SWAP.replace("\"mode\": \"measures\"", "\"mode\": \"sets\"");
        let err = ProblemFile::from_json(&missing).unwrap().validate().unwrap_err();
        assert_eq!(err.field.as_deref(), Some("mu"));

        let dup = SWAP.replace("[\"0\", \"1\"]", "[\"0\", \"0\"]");
        let err = ProblemFile::from_json(&dup).unwrap().validate().unwrap_err();
        assert_eq!(err.field.as_deref(), Some("space"));
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = SWAP.replace("\"mode\"", "\"colour\": 1, \"mode\"");
        assert!(ProblemFile::from_json(&text).is_err());
    }

    #[test]
    fn round_trip() {
        let file = ProblemFile::from_json(SWAP).unwrap();
        assert_eq!(ProblemFile::from_json(&file.to_json()).unwrap(), file);
    }
}
