//! Declarative run configuration.
//!
//! One JSON file drives every subcommand; command-line flags override the
//! seed, mode and enforcement. Every pipeline constant is reachable under
//! `params`, defaulting to the production values.

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use qcongest::params::{PipelineParams, SearchMode};
use qcongest::EnforcementMode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Enforcement {
    Strict,
    Audit,
}

impl From<Enforcement> for EnforcementMode {
    fn from(e: Enforcement) -> Self {
        match e {
            Enforcement::Strict => EnforcementMode::Strict,
            Enforcement::Audit => EnforcementMode::Audit,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case")]
pub enum GraphSource {
    /// Random digraph with potential-shifted weights: negative arcs occur,
    /// negative cycles cannot.
    Random {
        #[serde(default = "default_density")]
        density: f64,
    },
    /// Undirected instance with planted negative triangles on a positive
    /// background.
    Planted {
        #[serde(default = "default_triangles")]
        triangles: usize,
    },
    /// Edge-list file (header `n m directed|undirected`).
    File { path: String },
}

fn default_density() -> f64 {
    0.5
}

fn default_triangles() -> usize {
    3
}

impl Default for GraphSource {
    fn default() -> Self {
        GraphSource::Random {
            density: default_density(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case", deny_unknown_fields)]
pub struct RunConfig {
    pub n: usize,
    pub weight_bound: i64,
    pub seed: u64,
    pub graph: GraphSource,
    pub mode: SearchMode,
    pub enforcement: Enforcement,
    pub params: PipelineParams,
    /// Compare every inner finder call against brute force.
    pub audit_inner_calls: bool,
    /// Property-suite selection for `verify`.
    pub lemmas: Vec<String>,
    /// Trials per verified property.
    pub trials: usize,
    /// Network sizes for `bench` (fourth powers).
    pub sizes: Vec<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n: 16,
            weight_bound: 4,
            seed: 1,
            graph: GraphSource::default(),
            mode: SearchMode::QuantumSim,
            enforcement: Enforcement::Strict,
            params: PipelineParams::default(),
            audit_inner_calls: false,
            lemmas: vec![
                "cover".into(),
                "class-bounds".into(),
                "class-width".into(),
                "helper-balance".into(),
                "projection".into(),
            ],
            trials: 100,
            sizes: vec![16, 81, 256],
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).context("parsing config")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &str) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading config {path}"))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            bail!("n must be positive");
        }
        if self.weight_bound < 0 {
            bail!("weight-bound must be non-negative");
        }
        if let GraphSource::Random { density } = self.graph {
            if !(0.0..=1.0).contains(&density) {
                bail!("density must lie in [0, 1]");
            }
        }
        if self.trials == 0 {
            bail!("trials must be positive");
        }
        for &s in &self.sizes {
            let r = (s as f64).powf(0.25).round() as usize;
            if r * r * r * r != s {
                bail!("bench size {s} is not a fourth power");
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_parse_and_validate() {
        let cfg = RunConfig::from_json("{}").unwrap();
        assert_eq!(cfg.n, 16);
        assert_eq!(cfg.params.promise_factor, 90.0);
    }

    #[test]
    fn overrides_apply() {
        let cfg = RunConfig::from_json(
            r#"{"n": 81, "seed": 9, "mode": "oracle-exhaustive",
                "graph": {"source": "planted", "triangles": 5},
                "params": {"amplification": 2, "loop-factor": 1.0}}"#,
        )
        .unwrap();
        assert_eq!(cfg.n, 81);
        assert_eq!(cfg.mode, SearchMode::OracleExhaustive);
        assert_eq!(cfg.params.amplification, Some(2));
        assert_eq!(cfg.params.loop_factor, 1.0);
        assert_eq!(cfg.params.promise_factor, 90.0);
    }

    #[test]
    fn bad_fields_are_rejected() {
        assert!(RunConfig::from_json(r#"{"unknown-field": 1}"#).is_err());
        assert!(RunConfig::from_json(r#"{"n": 0}"#).is_err());
        assert!(RunConfig::from_json(r#"{"sizes": [10]}"#).is_err());
        assert!(
            RunConfig::from_json(r#"{"graph": {"source": "random", "density": 7.0}}"#).is_err()
        );
    }
}
