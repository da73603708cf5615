//! Declarative experiment configuration: one strictly validated JSON
//! document whose SHA-256 digest is echoed in every output.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::functions::{FunctionSpec, SymmetricFunction, WordFunction};
use crate::graph::{build_cayley, build_complete_power, build_complete_with_loops, LabeledExpander};
use crate::group::FiniteGroup;
use crate::linalg::C64;
use crate::verify::{ClaimId, SuiteConfig};
use crate::walk::IndexSet;

/// A group element given by index or by label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElementRef {
    Index(usize),
    Label(String),
}

impl ElementRef {
    pub fn resolve(&self, g: &FiniteGroup) -> Result<usize> {
        match self {
            ElementRef::Index(i) if *i < g.order() => Ok(*i),
            ElementRef::Index(i) => {
                Err(Error::Config(format!("element index {i} out of range for order {}", g.order())))
            }
            // A label wins; a bare number falls back to an element index.
            ElementRef::Label(l) => g
                .element_by_label(l)
                .or_else(|| l.trim().parse::<usize>().ok().filter(|&i| i < g.order()))
                .ok_or_else(|| Error::Config(format!("no element labeled '{l}' in {}", g.family_tag()))),
        }
    }
}

fn resolve_all(refs: &[ElementRef], g: &FiniteGroup) -> Result<Vec<usize>> {
    refs.iter().map(|r| r.resolve(g)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GraphConfig {
    /// Right Cayley graph `x → x·s`.
    Cayley {
        generators: Vec<ElementRef>,
        #[serde(default)]
        self_loops: bool,
        #[serde(default = "one")]
        power: usize,
    },
    /// Complete graph on `G^r` without self-loops.
    CompletePower {
        r: usize,
        #[serde(default = "one")]
        power: usize,
    },
    /// Complete graph on `G^r` with self-loops.
    CompleteWithLoops { r: usize },
}

fn one() -> usize {
    1
}

impl GraphConfig {
    pub fn build(&self, g: Arc<FiniteGroup>) -> Result<LabeledExpander> {
        let (x, power) = match self {
            GraphConfig::Cayley { generators, self_loops, power } => {
                let gens = resolve_all(generators, &g)?;
                (build_cayley(g, &gens, *self_loops)?, *power)
            }
            GraphConfig::CompletePower { r, power } => (build_complete_power(g, *r)?, *power),
            GraphConfig::CompleteWithLoops { r } => (build_complete_with_loops(g, *r)?, 1),
        };
        x.power(power)
    }
}

/// A complex number as `re` or `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexValue {
    Real(f64),
    Pair([f64; 2]),
}

impl ComplexValue {
    pub fn value(self) -> C64 {
        match self {
            ComplexValue::Real(r) => C64::new(r, 0.0),
            ComplexValue::Pair([re, im]) => C64::new(re, im),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionConfig {
    /// `1[|{i : x_i ∈ A}| ≥ t]`.
    Threshold {
        set: Vec<ElementRef>,
        t: usize,
    },
    /// `1[|{i : x_i ∈ A}| = w]`.
    Weight {
        set: Vec<ElementRef>,
        w: usize,
    },
    Constant {
        value: ComplexValue,
    },
    /// `h(x_{i_1}^{e_1}⋯x_{i_k}^{e_k})` with `h` given per element or as the
    /// indicator of `target`.
    Word {
        indices: Vec<usize>,
        #[serde(default)]
        exponents: Option<Vec<i8>>,
        #[serde(default)]
        h: Option<Vec<ComplexValue>>,
        #[serde(default)]
        target: Option<ElementRef>,
    },
    /// `1[x_1⋯x_k = target]`.
    GroupProduct {
        k: usize,
        target: ElementRef,
    },
}

impl FunctionConfig {
    pub fn build(&self, g: &FiniteGroup, n: usize) -> Result<FunctionSpec> {
        let order = g.order();
        Ok(match self {
            FunctionConfig::Threshold { set, t } => {
                FunctionSpec::Symmetric(SymmetricFunction::threshold(order, &resolve_all(set, g)?, *t, n)?)
            }
            FunctionConfig::Weight { set, w } => {
                FunctionSpec::Symmetric(SymmetricFunction::weight_indicator(order, &resolve_all(set, g)?, *w, n)?)
            }
            FunctionConfig::Constant { value } => {
                FunctionSpec::Symmetric(SymmetricFunction::constant(order, n, value.value())?)
            }
            FunctionConfig::Word { indices, exponents, h, target } => {
                let exps = exponents.clone().unwrap_or_else(|| vec![1; indices.len()]);
                let h = match (h, target) {
                    (Some(h), None) => h.iter().map(|v| v.value()).collect(),
                    (None, Some(t)) => {
                        let t = t.resolve(g)?;
                        (0..order).map(|x| C64::new(if x == t { 1.0 } else { 0.0 }, 0.0)).collect()
                    }
                    _ => return Err(Error::Config("word function needs exactly one of 'h' and 'target'".into())),
                };
                FunctionSpec::Word(WordFunction::new(g, indices, &exps, h, n)?)
            }
            FunctionConfig::GroupProduct { k, target } => {
                FunctionSpec::Word(WordFunction::group_product(g, *k, target.resolve(g)?, n)?)
            }
        })
    }
}

/// The experiment document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub group: String,
    #[serde(default)]
    pub graph: Option<GraphConfig>,
    #[serde(default)]
    pub functions: Vec<FunctionConfig>,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub index_sets: Vec<Vec<usize>>,
    /// `None` selects every claim.
    #[serde(default)]
    pub claims: Option<Vec<String>>,
    #[serde(default)]
    pub seed: u64,
    /// Monte Carlo samples per function; `None` disables sampling.
    #[serde(default)]
    pub samples: Option<usize>,
    #[serde(default)]
    pub exact_only: bool,
    #[serde(default = "default_instances")]
    pub random_instances: usize,
    #[serde(default = "default_scale")]
    pub lambda_scale: f64,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

fn default_instances() -> usize {
    SuiteConfig::default().random_instances
}

fn default_scale() -> f64 {
    1.0
}

/// A parsed and validated configuration with the digest of its source
/// bytes.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: ExperimentConfig,
    pub digest: String,
}

impl ExperimentConfig {
    pub fn from_json(bytes: &[u8]) -> Result<LoadedConfig> {
        let config: ExperimentConfig =
            serde_json::from_slice(bytes).map_err(|e| Error::Config(format!("invalid config: {e}")))?;
        config.validate()?;
        Ok(LoadedConfig { config, digest: hex::encode(Sha256::digest(bytes)) })
    }

    pub fn load(path: &Path) -> Result<LoadedConfig> {
        let bytes = std::fs::read(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&bytes)
    }

    /// Resolves every name and builds every object once, so configuration
    /// errors surface before any computation.
    pub fn validate(&self) -> Result<()> {
        let cfg_err = |e: Error| match e {
            Error::Config(m) => Error::Config(m),
            other => Error::Config(other.to_string()),
        };
        let g = Arc::new(FiniteGroup::parse(&self.group).map_err(cfg_err)?);
        if let Some(graph) = &self.graph {
            graph.build(g.clone()).map_err(cfg_err)?;
        }
        if !self.functions.is_empty() {
            let n = self.n.ok_or_else(|| Error::Config("'n' is required when functions are given".into()))?;
            for f in &self.functions {
                f.build(&g, n).map_err(cfg_err)?;
            }
        }
        for s in &self.index_sets {
            let n = self.n.unwrap_or_else(|| s.last().copied().unwrap_or(0));
            IndexSet::new(s, n).map_err(cfg_err)?;
        }
        self.claim_ids()?;
        if self.samples == Some(0) {
            return Err(Error::Config("'samples' must be at least 1".into()));
        }
        if !(self.lambda_scale.is_finite() && self.lambda_scale > 0.0) {
            return Err(Error::Config("'lambda_scale' must be positive".into()));
        }
        Ok(())
    }

    pub fn claim_ids(&self) -> Result<Vec<ClaimId>> {
        match &self.claims {
            None => Ok(ClaimId::ALL.to_vec()),
            Some(list) => list.iter().map(|s| s.parse()).collect(),
        }
    }

    pub fn group(&self) -> Result<Arc<FiniteGroup>> {
        Ok(Arc::new(FiniteGroup::parse(&self.group)?))
    }

    pub fn suite(&self) -> Result<SuiteConfig> {
        Ok(SuiteConfig {
            claims: self.claim_ids()?,
            seed: self.seed,
            random_instances: self.random_instances,
            lambda_scale: self.lambda_scale,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_digests() {
        let src = br#"{"group":"symmetric(3)","graph":{"kind":"cayley","generators":["213","231","312"]},
            "functions":[{"kind":"threshold","set":["123","213","132"],"t":2},{"kind":"group_product","k":2,"target":0}],
            "n":4,"index_sets":[[1,3]],"claims":["T1","t8"],"seed":5}"#;
        let loaded = ExperimentConfig::from_json(src).unwrap();
        assert_eq!(loaded.digest.len(), 64);
        assert_eq!(loaded.config.claim_ids().unwrap(), vec![ClaimId::T1, ClaimId::T8]);
        let g = loaded.config.group().unwrap();
        let x = loaded.config.graph.as_ref().unwrap().build(g.clone()).unwrap();
        assert_eq!(x.vertex_count(), 6);
    }

    #[test]
    fn rejects_bad_configs() {
        for src in [
            r#"{"group":"cyclic(3)","bogus":1}"#,
            r#"{"group":"nonsense(3)"}"#,
            r#"{"group":"cyclic(3)","functions":[{"kind":"threshold","set":[7],"t":1}],"n":3}"#,
            r#"{"group":"cyclic(3)","functions":[{"kind":"constant","value":1}]}"#,
            r#"{"group":"cyclic(3)","claims":["T99"]}"#,
            r#"{"group":"cyclic(3)","index_sets":[[2,1]]}"#,
            r#"{"group":"cyclic(3)","samples":0}"#,
        ] {
            assert!(matches!(ExperimentConfig::from_json(src.as_bytes()), Err(Error::Config(_))), "{src}");
        }
    }
}
