//! JSON check reports shared by the sampling suites.

use serde::{Deserialize, Serialize};

/// One bound checked by a suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckComponent {
    pub name: String,
    pub worst_value: f64,
    pub bound: f64,
    /// Strict bounds fail on equality.
    pub strict: bool,
    pub pass: bool,
    /// The sample attaining `worst_value`, when the suite records one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<serde_json::Value>,
}

impl CheckComponent {
    /// Upper-bound check `worst_value < bound` (strict) or `<=`.
    pub fn upper(name: impl Into<String>, worst_value: f64, bound: f64, strict: bool) -> Self {
        let pass = worst_value.is_finite() && if strict { worst_value < bound } else { worst_value <= bound };
        Self {
            name: name.into(),
            worst_value,
            bound,
            strict,
            pass,
            witness: None,
        }
    }

    pub fn with_witness(mut self, witness: serde_json::Value) -> Self {
        self.witness = Some(witness);
        self
    }

    fn ratio(&self) -> f64 {
        if self.bound > 0.0 {
            self.worst_value / self.bound
        } else {
            self.worst_value
        }
    }
}

/// Suite summary. With several components the top-level `worst_value` is the
/// largest `worst_value / bound` ratio and `bound` is 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub suite: String,
    pub trials: usize,
    pub seed: u64,
    pub worst_value: f64,
    pub bound: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub components: Vec<CheckComponent>,
}

impl CheckReport {
    pub fn new(suite: impl Into<String>, trials: usize, seed: u64, components: Vec<CheckComponent>) -> Self {
        let pass = !components.is_empty() && components.iter().all(|c| c.pass);
        let (worst_value, bound) = match components.as_slice() {
            [only] => (only.worst_value, only.bound),
            many => (many.iter().map(CheckComponent::ratio).fold(f64::NEG_INFINITY, f64::max), 1.0),
        };
        Self {
            suite: suite.into(),
            trials,
            seed,
            worst_value,
            bound,
            pass,
            components,
        }
    }

    /// Combine reports from several suites into one.
    pub fn merge(suite: impl Into<String>, seed: u64, reports: &[CheckReport]) -> Self {
        let trials = reports.iter().map(|r| r.trials).sum();
        let components = reports
            .iter()
            .flat_map(|r| {
                let prefix = r.suite.clone();
                r.components.iter().map(move |c| CheckComponent {
                    name: format!("{prefix}/{}", c.name),
                    ..c.clone()
                })
            })
            .collect();
        Self::new(suite, trials, seed, components)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_component_mirrors_values() {
        let r = CheckReport::new("s", 10, 1, vec![CheckComponent::upper("x", 0.5, 1.0, true)]);
        assert!(r.pass);
        assert_eq!((r.worst_value, r.bound), (0.5, 1.0));
        let json = serde_json::to_value(&r).unwrap();
        for key in ["suite", "trials", "seed", "worst_value", "bound", "pass"] {
            assert!(json.get(key).is_some(), "missing {key}");
        }
    }

    #[test]
    fn strict_bound_fails_on_equality() {
        assert!(!CheckComponent::upper("x", 1.0, 1.0, true).pass);
        assert!(CheckComponent::upper("x", 1.0, 1.0, false).pass);
        assert!(!CheckComponent::upper("x", f64::NAN, 1.0, false).pass);
    }

    #[test]
    fn multi_component_ratio_and_merge() {
        let r = CheckReport::new(
            "s",
            5,
            0,
            vec![CheckComponent::upper("a", 0.2, 0.4, true), CheckComponent::upper("b", 3.0, 2.0, true)],
        );
        assert!(!r.pass);
        assert_eq!(r.worst_value, 1.5);
        let m = CheckReport::merge("all", 0, &[r.clone(), r]);
        assert_eq!(m.trials, 10);
        assert_eq!(m.components.len(), 4);
        assert_eq!(m.components[0].name, "s/a");
    }
}
