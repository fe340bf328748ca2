//! Scenario configs, the built-in demo registry and run reports.
//!
//! A scenario names a base field, a scalar derivation, optionally a Kummer
//! extension and an algebra, and a list of operations. Configs are strict
//! JSON: unknown keys are rejected, and every validation error carries a
//! JSON pointer to the offending value.

mod builtin;
mod report;
mod run;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

pub use builtin::{builtin, builtins, explain, Builtin};
pub use report::{OperationResult, RunReport, Summary};
pub use run::{run_many, run_scenario, RunOptions};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScenarioError {
    #[error("invalid config at {pointer}: {message}")]
    ConfigInvalid { pointer: String, message: String },
    #[error("unknown scenario {0:?}")]
    UnknownScenario(String),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

impl ScenarioError {
    fn invalid(pointer: &str, message: impl Into<String>) -> Self {
        ScenarioError::ConfigInvalid { pointer: pointer.to_string(), message: message.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub field: FieldConfig,
    pub derivation: DerivationConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extension: Option<ExtensionConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebra: Option<AlgebraConfig>,
    pub operations: Vec<Operation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ansatz: Option<AnsatzConfig>,
    /// Highest derivation order checked.
    pub trunc: usize,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_samples() -> usize {
    20
}

fn one() -> usize {
    1
}

/// `char = 0` selects `Q`; otherwise `F_{p^k}` with `k = ext_degree`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldConfig {
    pub char: u64,
    #[serde(default = "one")]
    pub ext_degree: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DerivationConfig {
    Hasse {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        corrupt: Option<Corruption>,
    },
    /// `δ^(n) = D^n / n!` with `D(t) = d1`, characteristic zero only.
    DividedPowers { d1: Value },
    Trivial,
}

/// Replaces `δ^(order)(t)` by `value` in the scalar table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Corruption {
    pub order: usize,
    pub value: Value,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtensionConfig {
    pub degree: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeta: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AlgebraConfig {
    /// `M_n(F)` with the entrywise derivation.
    Matrix { n: usize },
    /// The cyclic algebra `(K|F, σ, b)`: `u^e = b`, `u s = ζ s u`, `s^e = t`.
    Symbol { b: i64 },
    /// `F[y]/(y^{p^i} - x^{p^i})` for the nilpotent mechanism.
    Nilpotent { i: u32, x: Value },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnsatzConfig {
    pub num_degree: usize,
    pub power: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Operation {
    Axioms,
    KummerExtend,
    FiltrationMembership,
    CrossedProduct,
    FiltrationExtend,
    Split,
    Classify,
    Nilpotent,
}

impl Operation {
    pub fn name(self) -> &'static str {
        match self {
            Operation::Axioms => "axioms",
            Operation::KummerExtend => "kummer_extend",
            Operation::FiltrationMembership => "filtration_membership",
            Operation::CrossedProduct => "crossed_product",
            Operation::FiltrationExtend => "filtration_extend",
            Operation::Split => "split",
            Operation::Classify => "classify",
            Operation::Nilpotent => "nilpotent",
        }
    }

    fn needs_extension(self) -> bool {
        matches!(
            self,
            Operation::KummerExtend | Operation::CrossedProduct | Operation::FiltrationExtend | Operation::Split | Operation::Classify
        )
    }
}

fn pointer_of(path: &serde_path_to_error::Path, message: &str) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        match seg {
            Segment::Seq { index } => out.push_str(&format!("/{index}")),
            Segment::Map { key } => out.push_str(&format!("/{}", key.replace('~', "~0").replace('/', "~1"))),
            Segment::Enum { variant } => out.push_str(&format!("/{variant}")),
            Segment::Unknown => {}
        }
    }
    for prefix in ["missing field `", "unknown field `"] {
        if let Some(rest) = message.strip_prefix(prefix) {
            if let Some(end) = rest.find('`') {
                let key = &rest[..end];
                if !out.ends_with(&format!("/{key}")) {
                    out.push_str(&format!("/{key}"));
                }
            }
        }
    }
    if out.is_empty() {
        "/".to_string()
    } else {
        out
    }
}

impl Scenario {
    /// Parses and validates a config.
    pub fn from_json_str(text: &str) -> Result<Self, ScenarioError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let scenario: Scenario = serde_path_to_error::deserialize(de).map_err(|e| {
            let message = e.inner().to_string();
            ScenarioError::invalid(&pointer_of(e.path(), &message), message)
        })?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn from_path(path: &str) -> Result<Self, ScenarioError> {
        if let Some(name) = path.strip_prefix("builtin:") {
            return builtin(name).map(|b| b.scenario());
        }
        let text = std::fs::read_to_string(path).map_err(|e| ScenarioError::Io { path: path.to_string(), message: e.to_string() })?;
        Self::from_json_str(&text)
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("serializable")
    }

    /// Structural checks that do not need any computation beyond parsing
    /// field elements.
    pub fn validate(&self) -> Result<(), ScenarioError> {
        let p = self.field.char;
        if self.name.is_empty() {
            return Err(ScenarioError::invalid("/name", "name must be nonempty"));
        }
        if p != 0 && !crate::exactfield::is_prime(p) {
            return Err(ScenarioError::invalid("/field/char", format!("{p} is neither 0 nor a prime")));
        }
        if self.field.ext_degree == 0 || (p == 0 && self.field.ext_degree != 1) {
            return Err(ScenarioError::invalid("/field/ext_degree", "ext_degree must be 1 over Q and positive otherwise"));
        }
        if p != 0 && p.checked_pow(self.field.ext_degree as u32).map_or(true, |q| q > 1 << 31) {
            return Err(ScenarioError::invalid("/field/ext_degree", "field order too large"));
        }
        if self.trunc == 0 {
            return Err(ScenarioError::invalid("/trunc", "trunc must be positive"));
        }
        if self.samples == 0 {
            return Err(ScenarioError::invalid("/samples", "samples must be positive"));
        }
        if self.operations.is_empty() {
            return Err(ScenarioError::invalid("/operations", "at least one operation is required"));
        }
        match &self.derivation {
            DerivationConfig::DividedPowers { .. } if p != 0 => {
                return Err(ScenarioError::invalid("/derivation/kind", "divided powers need characteristic 0"));
            }
            DerivationConfig::Hasse { corrupt: Some(c) } if c.order == 0 => {
                return Err(ScenarioError::invalid("/derivation/corrupt/order", "order 0 is the identity"));
            }
            _ => {}
        }
        for (idx, op) in self.operations.iter().enumerate() {
            let at = format!("/operations/{idx}");
            if p == 0 && *op != Operation::Axioms {
                return Err(ScenarioError::invalid(&at, format!("{} needs positive characteristic", op.name())));
            }
            if op.needs_extension() && self.extension.is_none() {
                return Err(ScenarioError::invalid("/extension", format!("{} needs an extension", op.name())));
            }
            let alg_ok = match op {
                Operation::CrossedProduct | Operation::FiltrationExtend => matches!(self.algebra, Some(AlgebraConfig::Symbol { .. })),
                Operation::Split | Operation::Classify => {
                    matches!(self.algebra, Some(AlgebraConfig::Symbol { .. } | AlgebraConfig::Matrix { .. }))
                }
                Operation::Nilpotent => matches!(self.algebra, Some(AlgebraConfig::Nilpotent { .. })),
                _ => true,
            };
            if !alg_ok {
                return Err(ScenarioError::invalid("/algebra", format!("{} needs a suitable algebra", op.name())));
            }
        }
        if let Some(ext) = &self.extension {
            let q = p.pow(self.field.ext_degree as u32);
            if ext.degree == 0 || p == 0 || ext.degree as u64 % p == 0 || (q - 1) % ext.degree as u64 != 0 {
                return Err(ScenarioError::invalid("/extension/degree", format!("degree must be prime to p and divide {}", q.saturating_sub(1))));
            }
            if let Some(z) = ext.zeta {
                if z >= q {
                    return Err(ScenarioError::invalid("/extension/zeta", "zeta is not a field element code"));
                }
            }
        }
        match &self.algebra {
            Some(AlgebraConfig::Matrix { n }) if *n == 0 || *n > 4 => {
                return Err(ScenarioError::invalid("/algebra/n", "matrix size must be between 1 and 4"));
            }
            Some(AlgebraConfig::Symbol { b }) if p != 0 && b.rem_euclid(p as i64) == 0 => {
                return Err(ScenarioError::invalid("/algebra/b", "b must be a unit"));
            }
            Some(AlgebraConfig::Nilpotent { .. }) if self.field.ext_degree != 1 => {
                return Err(ScenarioError::invalid("/field/ext_degree", "the nilpotent mechanism runs over a prime field"));
            }
            _ => {}
        }
        let needs_margin = self.operations.iter().any(|op| matches!(op, Operation::Split | Operation::Classify));
        if needs_margin && self.trunc < 2 {
            return Err(ScenarioError::invalid("/trunc", "split checks need trunc >= 2"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"name": "m", "field": {"char": 5}, "derivation": {"kind": "hasse"}, "operations": ["axioms"], "trunc": 4}"#;

    #[test]
    fn minimal_config_parses() {
        let s = Scenario::from_json_str(MINIMAL).unwrap();
        assert_eq!(s.samples, 20);
        assert_eq!(s.field.ext_degree, 1);
        assert_eq!(Scenario::from_json_str(&s.to_json().to_string()).unwrap(), s);
    }

    fn pointer(text: &str) -> String {
        match Scenario::from_json_str(text) {
            Err(ScenarioError::ConfigInvalid { pointer, .. }) => pointer,
            other => panic!("expected ConfigInvalid, got {other:?}"),
        }
    }

    #[test]
    fn pointers() {
        assert_eq!(pointer(&MINIMAL.replace(r#""trunc": 4"#, r#""trunc": 4, "tranc": 3"#)), "/tranc");
        assert_eq!(pointer(&MINIMAL.replace(r#", "trunc": 4"#, "")), "/trunc");
        assert_eq!(pointer(&MINIMAL.replace(r#"{"char": 5}"#, r#"{"char": 6}"#)), "/field/char");
        assert_eq!(pointer(&MINIMAL.replace(r#"{"char": 5}"#, r#"{"char": 5, "degree": 2}"#)), "/field/degree");
        assert_eq!(pointer(&MINIMAL.replace(r#"["axioms"]"#, r#"["axioms", "bogus"]"#)), "/operations/1");
        assert_eq!(pointer(&MINIMAL.replace(r#"["axioms"]"#, r#"["split"]"#)), "/extension");
        assert_eq!(pointer(&MINIMAL.replace(r#""trunc": 4"#, r#""trunc": 0"#)), "/trunc");
    }

    #[test]
    fn io_and_unknown() {
        assert!(matches!(Scenario::from_path("builtin:nope"), Err(ScenarioError::UnknownScenario(_))));
        assert!(matches!(Scenario::from_path("/nonexistent/x.json"), Err(ScenarioError::Io { .. })));
    }
}
