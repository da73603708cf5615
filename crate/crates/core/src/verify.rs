//! Executable checks for the quantitative bounds on walk bias.
//!
//! Every claim `T1`..`T17` maps to a check function that evaluates both
//! sides of an inequality (or identity) with the exact engines and returns a
//! [`ClaimCheck`]. [`run_suite`] runs the desk-scale instance grid of each
//! selected claim and assembles a [`VerificationReport`].

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::functions::{
    lower_bound_constant, lower_bound_threshold, project_diagonal, word_support_check, FunctionSpec, RawTable,
    SymmetricFunction, WordFunction,
};
use crate::graph::{build_cayley, build_complete_power, LabeledExpander, PseudoCayleyCertificate};
use crate::group::FiniteGroup;
use crate::linalg::{max_abs_diff, op_norm, scalar, trace, CMat, C64};
use crate::numfmt;
use crate::rep::RepSystem;
use crate::walk::{
    beta_k, bias, brute_force_walk_oracle, closed_form_char_mean, enumerate_gap_family, exact_product_mean,
    exact_tensor_mean, level_biases, random_mean_zero_contraction, tensor_bound, IndexSet, TensorFn,
};

/// Additive slack for upper bounds; covers floating-point error only.
pub const UPPER_TOL: f64 = 1e-9;
/// Tolerance of exact identities.
pub const IDENTITY_TOL: f64 = 1e-9;
/// Off-support Fourier mass treated as zero.
pub const SUPPORT_TOL: f64 = 1e-12;
/// Report format version.
pub const REPORT_FORMAT: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ClaimId {
    T1,
    T2,
    T3,
    T4,
    T5,
    T6,
    T7,
    T8,
    T9,
    T10,
    T11,
    T12,
    T13,
    T14,
    T15,
    T16,
    T17,
}

impl ClaimId {
    pub const ALL: [ClaimId; 17] = [
        ClaimId::T1,
        ClaimId::T2,
        ClaimId::T3,
        ClaimId::T4,
        ClaimId::T5,
        ClaimId::T6,
        ClaimId::T7,
        ClaimId::T8,
        ClaimId::T9,
        ClaimId::T10,
        ClaimId::T11,
        ClaimId::T12,
        ClaimId::T13,
        ClaimId::T14,
        ClaimId::T15,
        ClaimId::T16,
        ClaimId::T17,
    ];

    pub fn number(self) -> u32 {
        self as u32 + 1
    }

    /// The checked statement in one line.
    pub fn statement(self) -> &'static str {
        match self {
            ClaimId::T1 => "||E_walk[f_1(x_i1) (x) ... (x) f_k(x_ik)]||_op <= sum_{I in I_k} lambda^{sum_{i in I} Delta_i} for mean-zero contractions f_j",
            ClaimId::T2 => "the tensor bound of T1 with every f_j a non-trivial irrep",
            ClaimId::T3 => "on a pseudo-Cayley graph E[chi_1(x_i1)...chi_k(x_ik)] equals the Clebsch-Gordan sum over gamma sequences",
            ClaimId::T4 => "on a pseudo-Cayley graph E[alpha(x_i) (x) conj(alpha)(x_j)] = lambda_alpha^(j-i) M_alpha with tr(M_alpha) = 1",
            ClaimId::T5 => "|E[prod chi_j/d_j (x_ij)]| <= <triv, prod chi_j/d_j> * max_{T in I_k} lambda^{sum_{i in T} Delta_i}",
            ClaimId::T6 => "symmetric f: |bias(f_k)| <= tau^(k/2) ||f||_2 for k >= 2 and |bias(f)| <= 2 tau ||f||_2, tau = 16 e lambda |G| < 1",
            ClaimId::T7 => "sum_{|S|=k} tensor_bound(S) <= 2^k C(n-1, floor(k/2)) (lambda/(1-lambda))^(k/2) <= C(n,k)^(1/2) (16 e lambda)^(k/2)",
            ClaimId::T8 => "the Fourier mass of a word function h(w(x)) lies on tuples that are trivial off the word, rho on positive and rho* on negative letters",
            ClaimId::T9 => "degree-k word function: |bias(f)| <= tensor_bound(S) |G|^(k/2) ||f||_2",
            ClaimId::T10 => "||E_walk[rho(x_1 ... x_k)]||_op <= lambda^(k/2) for non-trivial irreps rho",
            ClaimId::T11 => "monotone word function: |bias(f)| <= sqrt|G| ||f||_2 (2 lambda)^(k/2); group product: |bias| <= (2 lambda)^(k/2)",
            ClaimId::T12 => "eta^2_{k,G} <= 4 |G|^(k-1) / D^2 for a D-quasirandom group",
            ClaimId::T13 => "symmetric class function on a pseudo-Cayley graph: |bias(f)| <= 64 e lambda |G| / (D sqrt|G|) ||f||_2",
            ClaimId::T14 => "two-coordinate f on a pseudo-Cayley graph with one non-trivial eigenvalue lambda: bias(f) = lambda (P_G f(1,1) - mu(f))",
            ClaimId::T15 => "|bias((Th_{A,t})_2)| >= (n-2) lambda C_{A,n,t} mu_A mu_{A^c}",
            ClaimId::T16 => "complete graph on G^r without self-loops, |A| = |G|/2, t = ceil((n+1-sqrt n)/2): |bias(Th_{A,t})| >= c lambda with c stable across r",
            ClaimId::T17 => "|E_edge<f(x), g(y)> - <E f, E g>| <= lambda ||f - E f||_2 ||g - E g||_2 for vector-valued vertex functions",
        }
    }
}

impl fmt::Display for ClaimId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T{}", self.number())
    }
}

impl FromStr for ClaimId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let num = t
            .strip_prefix('T')
            .or_else(|| t.strip_prefix('t'))
            .and_then(|d| d.parse::<usize>().ok())
            .filter(|d| (1..=17).contains(d))
            .ok_or_else(|| Error::Config(format!("unknown claim '{s}', expected T1..T17")))?;
        Ok(ClaimId::ALL[num - 1])
    }
}

/// Where a number came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// Exact dynamic program or enumeration.
    Exact,
    /// Monte Carlo estimate.
    Sampled,
    /// Explicit formula.
    ClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    /// `measured <= bound`.
    Upper,
    /// `measured >= bound`.
    Lower,
    /// `measured == bound` up to the tolerance.
    Identity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIPPED",
        })
    }
}

/// What a check was run on.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Instance {
    pub group: String,
    pub graph: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub function: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub index_set: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Instance {
    pub fn on(x: &LabeledExpander) -> Self {
        Instance { group: x.group().family_tag(), graph: x.tag().to_string(), ..Default::default() }
    }

    pub fn group_only(g: &FiniteGroup) -> Self {
        Instance { group: g.family_tag(), graph: "-".into(), ..Default::default() }
    }

    fn function(mut self, f: impl Into<String>) -> Self {
        self.function = Some(f.into());
        self
    }

    fn n(mut self, n: usize) -> Self {
        self.n = Some(n);
        self
    }

    fn set(mut self, s: &IndexSet) -> Self {
        self.n = Some(s.n());
        self.k = Some(s.k());
        self.index_set = Some(s.indices().to_vec());
        self
    }

    fn k(mut self, k: usize) -> Self {
        self.k = Some(k);
        self
    }

    fn detail(mut self, d: impl Into<String>) -> Self {
        self.detail = Some(d.into());
        self
    }

    fn describe(&self) -> String {
        let mut parts = vec![self.group.clone(), self.graph.clone()];
        if let Some(f) = &self.function {
            parts.push(f.clone());
        }
        if let Some(s) = &self.index_set {
            parts.push(format!("S={s:?}"));
        } else {
            if let Some(n) = self.n {
                parts.push(format!("n={n}"));
            }
            if let Some(k) = self.k {
                parts.push(format!("k={k}"));
            }
        }
        if let Some(d) = &self.detail {
            parts.push(d.clone());
        }
        parts.join(" ")
    }
}

/// One evaluated claim instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClaimCheck {
    pub claim_id: ClaimId,
    pub statement: &'static str,
    pub instance: Instance,
    pub kind: CheckKind,
    #[serde(serialize_with = "numfmt::ser_opt")]
    pub bound_value: Option<f64>,
    pub bound_provenance: Provenance,
    #[serde(serialize_with = "numfmt::ser_opt")]
    pub measured_value: Option<f64>,
    pub measured_provenance: Provenance,
    /// `bound − measured` (upper), `measured − bound` (lower) or
    /// `tolerance − deviation` (identity).
    #[serde(serialize_with = "numfmt::ser_opt")]
    pub margin: Option<f64>,
    #[serde(serialize_with = "numfmt::ser")]
    pub tolerance: f64,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(serialize_with = "numfmt::ser_map")]
    pub extras: BTreeMap<String, f64>,
    /// Wall-clock time; kept out of the deterministic payload.
    #[serde(skip)]
    pub runtime_ms: f64,
}

impl ClaimCheck {
    fn base(id: ClaimId, instance: Instance, kind: CheckKind) -> Self {
        ClaimCheck {
            claim_id: id,
            statement: id.statement(),
            instance,
            kind,
            bound_value: None,
            bound_provenance: Provenance::ClosedForm,
            measured_value: None,
            measured_provenance: Provenance::Exact,
            margin: None,
            tolerance: 0.0,
            status: Status::Skipped,
            reason: None,
            extras: BTreeMap::new(),
            runtime_ms: 0.0,
        }
    }

    /// `measured ≤ bound + tolerance`.
    pub fn upper(id: ClaimId, instance: Instance, bound: f64, measured: f64) -> Self {
        let mut c = Self::base(id, instance, CheckKind::Upper);
        c.tolerance = UPPER_TOL;
        c.bound_value = Some(bound);
        c.measured_value = Some(measured);
        c.settle(bound - measured)
    }

    /// `measured ≥ bound`.
    pub fn lower(id: ClaimId, instance: Instance, bound: f64, measured: f64) -> Self {
        let mut c = Self::base(id, instance, CheckKind::Lower);
        c.bound_value = Some(bound);
        c.measured_value = Some(measured);
        c.settle(measured - bound)
    }

    /// `deviation ≤ tolerance`, where `deviation` compares `expected` with
    /// `measured` (possibly entrywise on matrices).
    pub fn identity(id: ClaimId, instance: Instance, expected: f64, measured: f64, deviation: f64, tol: f64) -> Self {
        let mut c = Self::base(id, instance, CheckKind::Identity);
        c.tolerance = tol;
        c.bound_value = Some(expected);
        c.measured_value = Some(measured);
        c.settle(tol - deviation)
    }

    /// A hypothesis of the claim does not hold on this instance.
    pub fn skipped(id: ClaimId, instance: Instance, reason: impl Into<String>) -> Self {
        let mut c = Self::base(id, instance, CheckKind::Upper);
        c.reason = Some(reason.into());
        c
    }

    fn settle(mut self, margin: f64) -> Self {
        let finite = self.bound_value.is_none_or(f64::is_finite) && self.measured_value.is_none_or(f64::is_finite);
        self.margin = Some(margin);
        let pass = finite
            && match self.kind {
                CheckKind::Upper => margin >= -self.tolerance,
                CheckKind::Lower | CheckKind::Identity => margin >= 0.0,
            };
        self.status = if pass { Status::Pass } else { Status::Fail };
        if !finite {
            self.reason = Some("non-finite value".into());
        }
        self
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = tol;
        let m = self.margin.unwrap_or(f64::NAN);
        self.settle(m)
    }

    pub fn with_provenance(mut self, bound: Provenance, measured: Provenance) -> Self {
        self.bound_provenance = bound;
        self.measured_provenance = measured;
        self
    }

    pub fn extra(mut self, key: &str, value: f64) -> Self {
        self.extras.insert(key.to_string(), value);
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// Selection and knobs of a verification run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub claims: Vec<ClaimId>,
    pub seed: u64,
    /// Seeded random instances per graph for the randomized claims.
    pub random_instances: usize,
    /// Multiplies every `λ` that enters a bound; `1.0` except for fault
    /// injection.
    pub lambda_scale: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { claims: ClaimId::ALL.to_vec(), seed: 0, random_instances: 8, lambda_scale: 1.0 }
    }
}

impl SuiteConfig {
    /// SHA-256 of the canonical JSON form.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(serde_json::to_vec(self).expect("config serializes")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    /// Claims with at least one failing instance.
    pub failing_claims: Vec<ClaimId>,
    pub all_pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Versions {
    pub walklab: &'static str,
    pub report_format: u32,
}

/// Checks in claim order plus a summary. Contains no timing information, so
/// two runs with the same configuration serialize identically.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub config_digest: String,
    pub seed: u64,
    #[serde(serialize_with = "numfmt::ser")]
    pub lambda_scale: f64,
    pub versions: Versions,
    pub summary: Summary,
    pub checks: Vec<ClaimCheck>,
}

impl VerificationReport {
    pub fn from_checks(checks: Vec<ClaimCheck>, config_digest: String, seed: u64, lambda_scale: f64) -> Self {
        let count = |s: Status| checks.iter().filter(|c| c.status == s).count();
        let mut failing_claims: Vec<ClaimId> =
            checks.iter().filter(|c| c.status == Status::Fail).map(|c| c.claim_id).collect();
        failing_claims.dedup();
        let summary = Summary {
            total: checks.len(),
            passed: count(Status::Pass),
            failed: count(Status::Fail),
            skipped: count(Status::Skipped),
            all_pass: failing_claims.is_empty(),
            failing_claims,
        };
        VerificationReport {
            config_digest,
            seed,
            lambda_scale,
            versions: Versions { walklab: env!("CARGO_PKG_VERSION"), report_format: REPORT_FORMAT },
            summary,
            checks,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Per-claim pass/fail/skip counts and the worst margin.
    pub fn table(&self) -> String {
        let mut out = format!(
            "{:<5} {:>6} {:>6} {:>6} {:>8} {:>24}\n",
            "claim", "pass", "fail", "skip", "status", "worst margin"
        );
        for id in ClaimId::ALL {
            let rows: Vec<&ClaimCheck> = self.checks.iter().filter(|c| c.claim_id == id).collect();
            if rows.is_empty() {
                continue;
            }
            let n = |s: Status| rows.iter().filter(|c| c.status == s).count();
            let worst = rows
                .iter()
                .filter(|c| c.status != Status::Skipped)
                .filter_map(|c| c.margin)
                .fold(f64::INFINITY, f64::min);
            let status = if n(Status::Fail) > 0 {
                "FAIL"
            } else if n(Status::Pass) > 0 {
                "PASS"
            } else {
                "SKIPPED"
            };
            let worst = if worst.is_finite() { numfmt::sig17(worst) } else { "-".into() };
            out.push_str(&format!(
                "{:<5} {:>6} {:>6} {:>6} {:>8} {:>24}\n",
                id.to_string(),
                n(Status::Pass),
                n(Status::Fail),
                n(Status::Skipped),
                status,
                worst
            ));
        }
        for c in self.checks.iter().filter(|c| c.status == Status::Fail) {
            out.push_str(&format!(
                "FAIL {} {} measured={} bound={}\n",
                c.claim_id,
                c.instance.describe(),
                c.measured_value.map_or("-".into(), numfmt::sig17),
                c.bound_value.map_or("-".into(), numfmt::sig17)
            ));
        }
        out.push_str(&format!(
            "total {} passed {} failed {} skipped {}\n",
            self.summary.total, self.summary.passed, self.summary.failed, self.summary.skipped
        ));
        out
    }

    /// `(claim, runtime in ms)` per check, in report order.
    pub fn runtimes(&self) -> Vec<(ClaimId, f64)> {
        self.checks.iter().map(|c| (c.claim_id, c.runtime_ms)).collect()
    }
}

/// Runs the desk-scale grid of every selected claim. Claims run
/// concurrently; the report lists them in claim order.
pub fn run_suite(cfg: &SuiteConfig) -> Result<VerificationReport> {
    run_suite_with_digest(cfg, cfg.digest())
}

pub fn run_suite_with_digest(cfg: &SuiteConfig, digest: String) -> Result<VerificationReport> {
    if !(cfg.lambda_scale.is_finite() && cfg.lambda_scale > 0.0) {
        return Err(Error::Config(format!("lambda_scale must be positive, got {}", cfg.lambda_scale)));
    }
    let mut claims = cfg.claims.clone();
    claims.sort();
    claims.dedup();
    let per_claim: Vec<Vec<ClaimCheck>> =
        claims.par_iter().map(|&id| run_claim(id, cfg)).collect::<Result<Vec<_>>>()?;
    Ok(VerificationReport::from_checks(per_claim.into_iter().flatten().collect(), digest, cfg.seed, cfg.lambda_scale))
}

/// Desk-scale grid of one claim.
pub fn run_claim(id: ClaimId, cfg: &SuiteConfig) -> Result<Vec<ClaimCheck>> {
    let mut rng = claim_rng(cfg.seed, id);
    let count = cfg.random_instances;
    let scale = cfg.lambda_scale;
    let mut out = Vec::new();
    match id {
        ClaimId::T1 | ClaimId::T2 => {
            for x in &desk_graphs()? {
                let reps = RepSystem::new(x.group_arc().clone())?;
                for _ in 0..count {
                    let k = rng.random_range(2..=4);
                    let s = random_index_set(&mut rng, k, 6);
                    out.push(timed(|| {
                        if id == ClaimId::T1 {
                            let fs = random_contractions(&mut rng, x.group().order(), k);
                            check_tensor_fool(id, x, &s, &fs, scale)
                        } else {
                            let rhos: Vec<usize> = (0..k).map(|_| random_nontrivial(&mut rng, &reps)).collect();
                            check_irrep_fool(x, &reps, &s, &rhos, scale)
                        }
                    })?);
                }
            }
            if id == ClaimId::T1 {
                // A sparse index set whose bound is λ^8.
                let x = &desk_graphs()?[0];
                let s = IndexSet::new(&[1, 4, 9], 9)?;
                let fs = random_contractions(&mut rng, x.group().order(), 3);
                out.push(timed(|| check_tensor_fool(id, x, &s, &fs, scale))?);
            }
        }
        ClaimId::T3 | ClaimId::T4 | ClaimId::T5 => {
            for x in &oracle_graphs()? {
                let reps = RepSystem::new(x.group_arc().clone())?;
                let cert = match x.check_pseudo_cayley(&reps) {
                    Ok(c) => c,
                    Err(e) => {
                        out.push(ClaimCheck::skipped(id, Instance::on(x), format!("not pseudo-Cayley: {e}")));
                        continue;
                    }
                };
                match id {
                    ClaimId::T4 => {
                        for alpha in nontrivial(&reps) {
                            for (i, j) in [(1, 2), (1, 3), (2, 5)] {
                                out.push(timed(|| check_level2_tensor(x, &reps, &cert, alpha, i, j))?);
                            }
                        }
                    }
                    _ => {
                        for _ in 0..count {
                            let k = rng.random_range(if id == ClaimId::T3 { 1 } else { 2 }..=4);
                            let s = random_index_set_within(&mut rng, k, 5);
                            let rhos: Vec<usize> = (0..k).map(|_| random_nontrivial(&mut rng, &reps)).collect();
                            out.push(timed(|| {
                                if id == ClaimId::T3 {
                                    check_closed_form(x, &reps, &cert, &s, &rhos)
                                } else {
                                    check_trace_bound(x, &reps, &s, &rhos, scale)
                                }
                            })?);
                        }
                    }
                }
            }
        }
        ClaimId::T6 => {
            for (spec, r, subsets) in [
                ("cyclic(2)", 7, vec![vec![1]]),
                ("symmetric(3)", 4, vec![vec![0], vec![0, 1, 2], vec![1, 2, 3, 4, 5]]),
            ] {
                let g = Arc::new(FiniteGroup::parse(spec)?);
                let x = build_complete_power(g.clone(), r)?;
                for n in [8, 12, 16] {
                    for a in &subsets {
                        for t in [1, n / 4, n / 2, n / 2 + 1, n] {
                            let f = SymmetricFunction::threshold(g.order(), a, t, n)?;
                            out.extend(timed_many(|| check_main_fool(&x, &f, scale))?);
                        }
                    }
                }
            }
        }
        ClaimId::T7 => {
            for lambda in [0.01, 0.05, 0.1] {
                for n in 2..=20 {
                    for k in 2..=n.min(5) {
                        out.extend(timed_many(|| check_beta_chain(n, k, lambda))?);
                    }
                }
            }
        }
        ClaimId::T8 => {
            for spec in ["cyclic(3)", "symmetric(3)"] {
                let g = Arc::new(FiniteGroup::parse(spec)?);
                let reps = RepSystem::new(g.clone())?;
                for n in 2..=4 {
                    for _ in 0..count {
                        let f = random_word(&mut rng, &g, n, false)?;
                        out.push(timed(|| check_word_support(&reps, &f))?);
                    }
                    for target in 0..g.order() {
                        let f = WordFunction::group_product(&g, n, target, n)?;
                        out.push(timed(|| check_word_support(&reps, &f))?);
                    }
                }
            }
        }
        ClaimId::T9 | ClaimId::T11 => {
            for x in &desk_graphs()? {
                let g = x.group_arc().clone();
                for _ in 0..count {
                    let n = rng.random_range(2..=5);
                    let f = random_word(&mut rng, &g, n, id == ClaimId::T11)?;
                    out.push(timed(|| {
                        if id == ClaimId::T9 {
                            check_word_fool(x, &f, scale)
                        } else {
                            check_monotone_word(x, &f, scale)
                        }
                    })?);
                }
                if id == ClaimId::T11 {
                    for k in [2, 3] {
                        for target in 0..g.order() {
                            let f = WordFunction::group_product(&g, k, target, k)?;
                            out.push(timed(|| check_group_product(x, &f, scale))?);
                        }
                    }
                }
            }
        }
        ClaimId::T10 => {
            for x in &desk_graphs()? {
                let reps = RepSystem::new(x.group_arc().clone())?;
                for rho in nontrivial(&reps) {
                    for k in 2..=5 {
                        out.push(timed(|| check_jmrw(x, &reps, rho, k, scale))?);
                    }
                }
            }
        }
        ClaimId::T12 => {
            for spec in ["cyclic(6)", "symmetric(3)", "symmetric(4)"] {
                let reps = RepSystem::of(&FiniteGroup::parse(spec)?)?;
                for k in 1..=3 {
                    out.push(timed(|| check_eta(&reps, k))?);
                }
            }
        }
        ClaimId::T13 => {
            let g = Arc::new(FiniteGroup::parse("symmetric(3)")?);
            let reps = RepSystem::new(g.clone())?;
            for r in 1..=3 {
                let x = build_complete_power(g.clone(), r)?;
                for n in [4, 6, 8] {
                    for _ in 0..count.div_ceil(2) {
                        let f = random_class_symmetric(&mut rng, &g, n)?;
                        out.push(timed(|| check_quasi(&x, &reps, &f, scale))?);
                    }
                }
            }
        }
        ClaimId::T14 => {
            for (spec, r) in
                [("cyclic(2)", 1), ("cyclic(2)", 2), ("cyclic(2)", 3), ("cyclic(3)", 2), ("symmetric(3)", 1)]
            {
                let g = Arc::new(FiniteGroup::parse(spec)?);
                let reps = RepSystem::new(g.clone())?;
                let x = build_complete_power(g.clone(), r)?;
                for _ in 0..count {
                    let f = random_raw(&mut rng, g.order(), 2)?;
                    out.push(timed(|| check_level2_projection(&x, &reps, &f))?);
                }
            }
        }
        ClaimId::T15 => {
            for (spec, r) in
                [("cyclic(2)", 4), ("cyclic(2)", 5), ("cyclic(2)", 6), ("symmetric(3)", 2), ("symmetric(3)", 3)]
            {
                let g = Arc::new(FiniteGroup::parse(spec)?);
                let reps = RepSystem::new(g.clone())?;
                let x = build_complete_power(g.clone(), r)?;
                let a = half_subset(&g);
                out.push(timed(|| check_level2_lower(&x, &reps, &a, 16, 7, scale))?);
            }
        }
        ClaimId::T16 => {
            for (spec, rs) in [("cyclic(2)", 2..=6), ("symmetric(3)", 1..=4)] {
                let g = Arc::new(FiniteGroup::parse(spec)?);
                let graphs = rs.map(|r| build_complete_power(g.clone(), r)).collect::<Result<Vec<_>>>()?;
                out.extend(timed_many(|| check_lower_bound_grid(&graphs, 16, scale))?);
            }
        }
        ClaimId::T17 => {
            for x in &desk_graphs()? {
                for _ in 0..count {
                    let dim = rng.random_range(1..=3);
                    let f = random_vertex_vectors(&mut rng, x.vertex_count(), dim);
                    let g = random_vertex_vectors(&mut rng, x.vertex_count(), dim);
                    out.push(timed(|| check_eml(x, &f, &g, scale))?);
                }
            }
        }
    }
    Ok(out)
}

fn timed(f: impl FnOnce() -> Result<ClaimCheck>) -> Result<ClaimCheck> {
    let start = Instant::now();
    let mut c = f()?;
    c.runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(c)
}

fn timed_many(f: impl FnOnce() -> Result<Vec<ClaimCheck>>) -> Result<Vec<ClaimCheck>> {
    let start = Instant::now();
    let mut cs = f()?;
    let each = start.elapsed().as_secs_f64() * 1e3 / cs.len().max(1) as f64;
    cs.iter_mut().for_each(|c| c.runtime_ms = each);
    Ok(cs)
}

/// Independent stream per claim.
pub fn claim_rng(seed: u64, id: ClaimId) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id.number() as u64);
    rng
}

fn group(spec: &str) -> Result<Arc<FiniteGroup>> {
    Ok(Arc::new(FiniteGroup::parse(spec)?))
}

/// Cay(ℤ₃,{1,2}), Cay(ℤ₄,{1,3}), the complete graph on ℤ₂², and the complete
/// graph on S₃: small enough for path enumeration.
pub fn oracle_graphs() -> Result<Vec<LabeledExpander>> {
    Ok(vec![
        build_cayley(group("cyclic(3)")?, &[1, 2], false)?,
        build_cayley(group("cyclic(4)")?, &[1, 3], false)?,
        build_complete_power(group("cyclic(2)")?, 2)?,
        build_complete_power(group("symmetric(3)")?, 1)?,
    ])
}

/// The oracle graphs plus a non-normal Cayley graph of S₃, a dihedral Cayley
/// graph and a two-step power graph.
pub fn desk_graphs() -> Result<Vec<LabeledExpander>> {
    let mut out = oracle_graphs()?;
    let s3 = group("symmetric(3)")?;
    let gens: Vec<usize> = ["213", "231", "312"]
        .iter()
        .map(|l| s3.element_by_label(l).ok_or_else(|| Error::InvalidArgument(format!("no element {l}"))))
        .collect::<Result<_>>()?;
    out.push(build_cayley(s3, &gens, false)?);
    let d5 = group("dihedral(5)")?;
    // r, r^-1 and two reflections
    out.push(build_cayley(d5, &[1, 4, 5, 7], false)?);
    out.push(build_cayley(group("cyclic(3)")?, &[1, 2], false)?.power(2)?);
    Ok(out)
}

fn nontrivial(reps: &RepSystem) -> Vec<usize> {
    (0..reps.len()).filter(|&i| !reps.irrep(i).is_trivial).collect()
}

fn random_nontrivial(rng: &mut impl Rng, reps: &RepSystem) -> usize {
    let choices = nontrivial(reps);
    choices[rng.random_range(0..choices.len())]
}

/// `i_1 = 1` and gaps drawn from `1..=max_gap`.
pub fn random_index_set(rng: &mut impl Rng, k: usize, max_gap: usize) -> IndexSet {
    let mut idx = vec![1];
    for _ in 1..k {
        let last = *idx.last().unwrap();
        idx.push(last + rng.random_range(1..=max_gap));
    }
    let n = *idx.last().unwrap();
    IndexSet::new(&idx, n).expect("increasing indices")
}

/// A random `k`-subset of `1..=n`.
pub fn random_index_set_within(rng: &mut impl Rng, k: usize, n: usize) -> IndexSet {
    let mut pool: Vec<usize> = (1..=n).collect();
    for i in 0..k {
        let j = rng.random_range(i..n);
        pool.swap(i, j);
    }
    let mut idx = pool[..k].to_vec();
    idx.sort_unstable();
    IndexSet::new(&idx, n).expect("distinct indices")
}

/// Mean-zero contractions with total tensor dimension at most 16.
pub fn random_contractions(rng: &mut impl Rng, order: usize, k: usize) -> Vec<TensorFn> {
    let mut total = 1;
    (0..k)
        .map(|_| {
            let d = if total * 2 <= 16 && rng.random_bool(0.5) { 2 } else { 1 };
            total *= d;
            TensorFn::Labeled(random_mean_zero_contraction(rng, order, d))
        })
        .collect()
}

fn random_complex(rng: &mut impl Rng) -> C64 {
    C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// A random word of random degree on distinct positions of `1..=n`;
/// monotone words have increasing indices and exponents `+1`.
pub fn random_word(rng: &mut impl Rng, g: &FiniteGroup, n: usize, monotone: bool) -> Result<WordFunction> {
    let k = rng.random_range(1..=n);
    let mut idx = random_index_set_within(rng, k, n).indices().to_vec();
    let exps: Vec<i8> = if monotone {
        vec![1; k]
    } else {
        for i in (1..k).rev() {
            idx.swap(i, rng.random_range(0..=i));
        }
        (0..k).map(|_| if rng.random_bool(0.5) { 1 } else { -1 }).collect()
    };
    let h = (0..g.order()).map(|_| random_complex(rng)).collect();
    WordFunction::new(g, &idx, &exps, h, n)
}

pub fn random_raw(rng: &mut impl Rng, letters: usize, n: usize) -> Result<RawTable> {
    let size = letters.pow(n as u32);
    RawTable::new(letters, n, (0..size).map(|_| random_complex(rng)).collect())
}

/// A real random function of the conjugacy-class histogram.
pub fn random_class_symmetric(rng: &mut impl Rng, g: &FiniteGroup, n: usize) -> Result<SymmetricFunction> {
    let salt: u64 = rng.random();
    SymmetricFunction::from_class_histogram(g, n, "class-symmetric", |h| {
        let key = h.iter().fold(salt, |acc, &v| acc.wrapping_mul(1_000_003).wrapping_add(v as u64));
        C64::new(ChaCha8Rng::seed_from_u64(key).random_range(-1.0..1.0), 0.0)
    })
}

fn random_vertex_vectors(rng: &mut impl Rng, n: usize, dim: usize) -> Vec<Vec<C64>> {
    (0..n).map(|_| (0..dim).map(|_| random_complex(rng)).collect()).collect()
}

/// The first `⌊|G|/2⌋` elements.
pub fn half_subset(g: &FiniteGroup) -> Vec<usize> {
    (0..g.order() / 2).collect()
}

fn unbiased_or_skip(id: ClaimId, x: &LabeledExpander, inst: &Instance) -> Option<ClaimCheck> {
    let u = x.check_unbiased();
    (!u.pass)
        .then(|| ClaimCheck::skipped(id, inst.clone(), format!("labeling is biased: {}", u.reason.unwrap_or_default())))
}

/// T1: operator norm of the exact tensor mean against the gap-family sum.
pub fn check_tensor_fool(
    id: ClaimId,
    x: &LabeledExpander,
    s: &IndexSet,
    fs: &[TensorFn],
    lambda_scale: f64,
) -> Result<ClaimCheck> {
    let inst = Instance::on(x).set(s).function("mean-zero contractions");
    if let Some(skip) = unbiased_or_skip(id, x, &inst) {
        return Ok(skip);
    }
    let lambda = x.lambda() * lambda_scale;
    let measured = exact_tensor_mean(x, s, fs)?.op_norm;
    let tb = tensor_bound(s, lambda);
    Ok(ClaimCheck::upper(id, inst, tb.value, measured).extra("lambda", lambda).extra("coarse_cap", tb.coarse_cap))
}

/// T2: the tensor bound with irrep-valued functions.
pub fn check_irrep_fool(
    x: &LabeledExpander,
    reps: &RepSystem,
    s: &IndexSet,
    rhos: &[usize],
    lambda_scale: f64,
) -> Result<ClaimCheck> {
    let fs: Vec<TensorFn> = rhos.iter().map(|&r| TensorFn::irrep(reps, r)).collect();
    let names: Vec<&str> = rhos.iter().map(|&r| reps.irrep(r).name.as_str()).collect();
    let mut c = check_tensor_fool(ClaimId::T2, x, s, &fs, lambda_scale)?;
    c.instance.function = Some(format!("irreps {}", names.join(",")));
    Ok(c)
}

fn char_product_oracle(x: &LabeledExpander, reps: &RepSystem, s: &IndexSet, rhos: &[usize]) -> Result<C64> {
    let labels = x.labeling();
    let m = brute_force_walk_oracle(x, s.n(), |path| {
        let v: C64 =
            s.indices().iter().zip(rhos).map(|(&i, &r)| reps.irrep(r).character[labels[path[i - 1]]]).product();
        scalar(v)
    })?;
    Ok(m[(0, 0)])
}

/// T3: Clebsch–Gordan closed form against path enumeration.
pub fn check_closed_form(
    x: &LabeledExpander,
    reps: &RepSystem,
    cert: &PseudoCayleyCertificate,
    s: &IndexSet,
    rhos: &[usize],
) -> Result<ClaimCheck> {
    let names: Vec<&str> = rhos.iter().map(|&r| reps.irrep(r).name.as_str()).collect();
    let inst = Instance::on(x).set(s).function(format!("characters {}", names.join(",")));
    let closed = closed_form_char_mean(reps, cert, s, rhos)?;
    let oracle = char_product_oracle(x, reps, s, rhos)?;
    Ok(ClaimCheck::identity(ClaimId::T3, inst, closed.re, oracle.re, (closed - oracle).norm(), IDENTITY_TOL)
        .with_provenance(Provenance::ClosedForm, Provenance::Exact)
        .extra("closed_form_im", closed.im)
        .extra("oracle_im", oracle.im))
}

/// `E_x[α(x) ⊗ conj(α(x))]`.
pub fn level2_projector(reps: &RepSystem, alpha: usize) -> CMat {
    let rho = reps.irrep(alpha);
    let d = rho.dim;
    let sum = rho
        .matrices
        .iter()
        .fold(CMat::zeros(d * d, d * d), |acc, m| acc + crate::linalg::kron(m, &m.map(|z| z.conj())));
    sum / C64::new(rho.matrices.len() as f64, 0.0)
}

/// T4: level-2 tensor mean equals `λ_α^{j−i}·M_α`, `tr M_α = 1`.
pub fn check_level2_tensor(
    x: &LabeledExpander,
    reps: &RepSystem,
    cert: &PseudoCayleyCertificate,
    alpha: usize,
    i: usize,
    j: usize,
) -> Result<ClaimCheck> {
    let s = IndexSet::new(&[i, j], j)?;
    let rho = reps.irrep(alpha);
    let inst = Instance::on(x).set(&s).function(format!("{} (x) conj {}", rho.name, rho.name));
    let fs = [
        TensorFn::Labeled(rho.matrices.clone()),
        TensorFn::Labeled(rho.matrices.iter().map(|m| m.map(|z| z.conj())).collect()),
    ];
    let measured = exact_tensor_mean(x, &s, &fs)?.matrix;
    let m = level2_projector(reps, alpha);
    let lam = cert.lambdas[alpha].powi((j - i) as i32);
    let expected = &m * C64::new(lam, 0.0);
    let tr = trace(&m);
    let deviation = max_abs_diff(&measured, &expected).max((tr - C64::new(1.0, 0.0)).norm());
    Ok(ClaimCheck::identity(ClaimId::T4, inst, lam, trace(&measured).re, deviation, IDENTITY_TOL)
        .with_provenance(Provenance::ClosedForm, Provenance::Exact)
        .extra("lambda_alpha", cert.lambdas[alpha])
        .extra("trace_m", tr.re))
}

/// T5: dimension-normalized characters against the Clebsch–Gordan count.
pub fn check_trace_bound(
    x: &LabeledExpander,
    reps: &RepSystem,
    s: &IndexSet,
    rhos: &[usize],
    lambda_scale: f64,
) -> Result<ClaimCheck> {
    let names: Vec<&str> = rhos.iter().map(|&r| reps.irrep(r).name.as_str()).collect();
    let inst = Instance::on(x).set(s).function(format!("normalized characters {}", names.join(",")));
    let fs: Vec<TensorFn> = rhos.iter().map(|&r| TensorFn::character(reps, r)).collect();
    let raw = exact_tensor_mean(x, s, &fs)?.matrix[(0, 0)].norm();
    let dims: f64 = rhos.iter().map(|&r| reps.irrep(r).dim as f64).product();
    let mult = reps.trivial_multiplicity(rhos)? as f64;
    let lambda = x.lambda() * lambda_scale;
    let gaps = s.gaps();
    let min_exp =
        enumerate_gap_family(s.k()).iter().map(|t| t.iter().map(|&i| gaps[i - 1]).sum::<usize>()).min().unwrap_or(0);
    let decay = lambda.powi(min_exp as i32);
    Ok(ClaimCheck::upper(ClaimId::T5, inst, mult / dims * decay, raw / dims)
        .extra("measured_unnormalized", raw)
        .extra("bound_unnormalized", mult * decay)
        .extra("trivial_multiplicity", mult)
        .extra("lambda", lambda))
}

/// T6: per-level and total bias of a symmetric function. Returns the
/// per-level check (scaled by `τ^{−k/2}`) and the total check.
pub fn check_main_fool(x: &LabeledExpander, f: &SymmetricFunction, lambda_scale: f64) -> Result<Vec<ClaimCheck>> {
    let id = ClaimId::T6;
    let lambda = x.lambda() * lambda_scale;
    let order = x.group().order() as f64;
    let tau = 16.0 * std::f64::consts::E * lambda * order;
    let inst = Instance::on(x).function(f.tag()).n(f.n());
    if tau >= 1.0 {
        let reason = format!("tau = 16 e lambda |G| = {tau} is not below 1");
        return Ok(vec![
            ClaimCheck::skipped(id, inst.clone().detail("per-level"), reason.clone()),
            ClaimCheck::skipped(id, inst.detail("total"), reason),
        ]);
    }
    let norm = f.l2_norm();
    let levels = level_biases(x, f)?;
    let level_norms = f.level_norms_sq();
    let mut worst_scaled = 0.0_f64;
    let mut worst_level = 0usize;
    let mut per_level_ratio = 0.0_f64;
    for (k, b) in levels.iter().enumerate().skip(2) {
        let scaled = b.norm() / tau.powf(k as f64 / 2.0);
        if scaled > worst_scaled {
            worst_scaled = scaled;
            worst_level = k;
        }
        let fk = level_norms[k].max(0.0).sqrt();
        if fk > 1e-12 {
            per_level_ratio = per_level_ratio.max(b.norm() / (tau.powf(k as f64 / 2.0) * fk));
        }
    }
    let low_levels = levels[0].norm().max(levels.get(1).map_or(0.0, |b| b.norm()));
    let total = bias(x, &FunctionSpec::Symmetric(f.clone()), f.n())?.norm();
    Ok(vec![
        ClaimCheck::upper(
            id,
            inst.clone().detail("per-level |bias(f_k)| tau^(-k/2), max over k >= 2"),
            norm,
            worst_scaled,
        )
        .extra("tau", tau)
        .extra("worst_level", worst_level as f64)
        .extra("per_level_ratio_vs_level_norm", per_level_ratio)
        .extra("levels_0_1_bias", low_levels),
        ClaimCheck::upper(id, inst.detail("total"), 2.0 * tau * norm, total).extra("tau", tau),
    ])
}

/// T7: both links of the `β_k` inequality chain.
pub fn check_beta_chain(n: usize, k: usize, lambda: f64) -> Result<Vec<ClaimCheck>> {
    let b = beta_k(n, k, lambda)?;
    let inst =
        Instance { group: "-".into(), graph: format!("lambda={lambda}"), n: Some(n), k: Some(k), ..Default::default() };
    Ok(vec![
        ClaimCheck::upper(ClaimId::T7, inst.clone().detail("exact <= intermediate"), b.intermediate, b.exact)
            .with_provenance(Provenance::ClosedForm, Provenance::Exact),
        ClaimCheck::upper(ClaimId::T7, inst.detail("intermediate <= final"), b.final_bound, b.intermediate)
            .with_provenance(Provenance::ClosedForm, Provenance::ClosedForm),
    ])
}

/// T8: off-support Fourier mass of a word function.
pub fn check_word_support(reps: &RepSystem, f: &WordFunction) -> Result<ClaimCheck> {
    let inst = Instance::group_only(reps.group()).function(f.tag()).n(f.n()).k(f.degree());
    let report = word_support_check(reps, f)?;
    Ok(ClaimCheck::upper(ClaimId::T8, inst, SUPPORT_TOL, report.max_off_support)
        .with_tolerance(0.0)
        .extra("nonzero_tuples", report.nonzero_tuples.len() as f64))
}

fn word_set(f: &WordFunction) -> Result<IndexSet> {
    let mut idx = f.indices().to_vec();
    idx.sort_unstable();
    IndexSet::new(&idx, f.n())
}

/// T9: word-function bias against the tensor bound.
pub fn check_word_fool(x: &LabeledExpander, f: &WordFunction, lambda_scale: f64) -> Result<ClaimCheck> {
    let s = word_set(f)?;
    let inst = Instance::on(x).set(&s).function(f.tag());
    if let Some(skip) = unbiased_or_skip(ClaimId::T9, x, &inst) {
        return Ok(skip);
    }
    let lambda = x.lambda() * lambda_scale;
    let measured = bias(x, &FunctionSpec::Word(f.clone()), f.n())?.norm();
    let order = x.group().order() as f64;
    let bound = tensor_bound(&s, lambda).value * order.powf(s.k() as f64 / 2.0) * f.l2_norm();
    Ok(ClaimCheck::upper(ClaimId::T9, inst, bound, measured).extra("lambda", lambda))
}

/// T10: operator norm of `E[ρ(x_1⋯x_k)]`.
pub fn check_jmrw(
    x: &LabeledExpander,
    reps: &RepSystem,
    rho: usize,
    k: usize,
    lambda_scale: f64,
) -> Result<ClaimCheck> {
    let s = IndexSet::prefix(k);
    let inst = Instance::on(x).set(&s).function(format!("{}(x_1...x_k)", reps.irrep(rho).name));
    if let Some(skip) = unbiased_or_skip(ClaimId::T10, x, &inst) {
        return Ok(skip);
    }
    let fs = vec![TensorFn::irrep(reps, rho); k];
    let measured = op_norm(&exact_product_mean(x, &s, &fs)?);
    let lambda = x.lambda() * lambda_scale;
    Ok(ClaimCheck::upper(ClaimId::T10, inst, lambda.powf(k as f64 / 2.0), measured).extra("lambda", lambda))
}

/// T11: monotone word bound.
pub fn check_monotone_word(x: &LabeledExpander, f: &WordFunction, lambda_scale: f64) -> Result<ClaimCheck> {
    let s = word_set(f)?;
    let inst = Instance::on(x).set(&s).function(f.tag());
    if !f.is_monotone() {
        return Ok(ClaimCheck::skipped(ClaimId::T11, inst, "word is not monotone"));
    }
    let lambda = x.lambda() * lambda_scale;
    let measured = bias(x, &FunctionSpec::Word(f.clone()), f.n())?.norm();
    let order = x.group().order() as f64;
    let bound = order.sqrt() * f.l2_norm() * (2.0 * lambda).powf(f.degree() as f64 / 2.0);
    Ok(ClaimCheck::upper(ClaimId::T11, inst, bound, measured).extra("lambda", lambda))
}

/// T11, group-product case: `|bias| ≤ (2λ)^{k/2}`.
pub fn check_group_product(x: &LabeledExpander, f: &WordFunction, lambda_scale: f64) -> Result<ClaimCheck> {
    let s = word_set(f)?;
    let inst = Instance::on(x).set(&s).function(f.tag()).detail("group product");
    let lambda = x.lambda() * lambda_scale;
    let measured = bias(x, &FunctionSpec::Word(f.clone()), f.n())?.norm();
    Ok(ClaimCheck::upper(ClaimId::T11, inst, (2.0 * lambda).powf(f.degree() as f64 / 2.0), measured)
        .extra("lambda", lambda))
}

/// T12: `η²_{k,G}` against the quasirandom bound.
pub fn check_eta(reps: &RepSystem, k: usize) -> Result<ClaimCheck> {
    let inst = Instance::group_only(reps.group()).k(k);
    let eta = reps.eta_k(k);
    let Some(bound) = eta.quasirandom_bound else {
        return Ok(ClaimCheck::skipped(ClaimId::T12, inst, "trivial group has no quasirandomness degree"));
    };
    Ok(ClaimCheck::upper(ClaimId::T12, inst, bound, eta.exact)
        .with_provenance(Provenance::ClosedForm, Provenance::Exact)
        .extra("class_bound", eta.class_bound)
        .extra("D", reps.quasirandomness_degree()? as f64))
}

/// T13: symmetric class function against `64eλ|G|/(D√|G|)·‖f‖₂`.
pub fn check_quasi(
    x: &LabeledExpander,
    reps: &RepSystem,
    f: &SymmetricFunction,
    lambda_scale: f64,
) -> Result<ClaimCheck> {
    let inst = Instance::on(x).function(f.tag()).n(f.n());
    if let Err(e) = x.check_pseudo_cayley(reps) {
        return Ok(ClaimCheck::skipped(ClaimId::T13, inst, format!("not pseudo-Cayley: {e}")));
    }
    let lambda = x.lambda() * lambda_scale;
    let order = x.group().order() as f64;
    let d = reps.quasirandomness_degree()? as f64;
    let norm = f.l2_norm();
    let measured = bias(x, &FunctionSpec::Symmetric(f.clone()), f.n())?.norm();
    let bound = 64.0 * std::f64::consts::E * lambda * order / (d * order.sqrt()) * norm;
    let scale = lambda * order.sqrt() / d * norm;
    Ok(ClaimCheck::upper(ClaimId::T13, inst, bound, measured)
        .extra("fitted_constant", if scale > 0.0 { measured / scale } else { 0.0 })
        .extra("lambda", lambda))
}

/// The common non-trivial eigenvalue of a pseudo-Cayley graph, if there is
/// one.
pub fn uniform_nontrivial_eigenvalue(reps: &RepSystem, cert: &PseudoCayleyCertificate) -> Option<f64> {
    let mut vals = nontrivial(reps).into_iter().map(|i| cert.lambdas[i]);
    let first = vals.next()?;
    vals.all(|v| (v - first).abs() <= 1e-9).then_some(first)
}

/// T14: `bias(f) = λ·(P_G f(1,1) − μ(f))` for two-coordinate `f`.
pub fn check_level2_projection(x: &LabeledExpander, reps: &RepSystem, f: &RawTable) -> Result<ClaimCheck> {
    let inst = Instance::on(x).function("random two-coordinate table").n(2);
    let lam = match x.check_pseudo_cayley(reps) {
        Ok(cert) => match uniform_nontrivial_eigenvalue(reps, &cert) {
            Some(l) => l,
            None => return Ok(ClaimCheck::skipped(ClaimId::T14, inst, "non-trivial eigenvalues differ")),
        },
        Err(e) => return Ok(ClaimCheck::skipped(ClaimId::T14, inst, format!("not pseudo-Cayley: {e}"))),
    };
    if f.n() != 2 {
        return Err(Error::Dimension("two-coordinate function expected".into()));
    }
    let measured = bias(x, &FunctionSpec::Raw(f.clone()), 2)?;
    let proj = project_diagonal(x.group(), f).eval(&[0, 0]);
    let expected = (proj - f.mean()) * lam;
    Ok(ClaimCheck::identity(ClaimId::T14, inst, expected.re, measured.re, (expected - measured).norm(), 1e-10)
        .with_provenance(Provenance::ClosedForm, Provenance::Exact)
        .extra("lambda_signed", lam)
        .extra("expected_im", expected.im)
        .extra("measured_im", measured.im))
}

/// T15: level-2 bias of `Th_{A,t}` against `(n−2)·λ·C_{A,n,t}·μ_A·μ_{A^c}`.
pub fn check_level2_lower(
    x: &LabeledExpander,
    reps: &RepSystem,
    a: &[usize],
    n: usize,
    t: usize,
    lambda_scale: f64,
) -> Result<ClaimCheck> {
    let f = SymmetricFunction::threshold(x.group().order(), a, t, n)?;
    let inst = Instance::on(x).function(f.tag()).n(n);
    let lam = match x.check_pseudo_cayley(reps) {
        Ok(cert) => match uniform_nontrivial_eigenvalue(reps, &cert) {
            Some(l) if l.abs() < 0.5 => l,
            Some(l) => {
                return Ok(ClaimCheck::skipped(ClaimId::T15, inst, format!("|lambda| = {} is not below 1/2", l.abs())))
            }
            None => return Ok(ClaimCheck::skipped(ClaimId::T15, inst, "non-trivial eigenvalues differ")),
        },
        Err(e) => return Ok(ClaimCheck::skipped(ClaimId::T15, inst, format!("not pseudo-Cayley: {e}"))),
    };
    let order = x.group().order();
    let c = lower_bound_constant(order, a.len(), n, t)?;
    let mu = a.len() as f64 / order as f64;
    let lambda = lam.abs() * lambda_scale;
    let rhs = (n as f64 - 2.0) * lambda * c.abs() * mu * (1.0 - mu);
    let measured = level_biases(x, &f)?[2];
    // Σ_{i<j} λ^{j−i} with the signed eigenvalue.
    let pair_sum: f64 = (1..n).map(|d| (n - d) as f64 * lam.powi(d as i32)).sum();
    Ok(ClaimCheck::lower(ClaimId::T15, inst, rhs, measured.norm())
        .extra("lambda_signed", lam)
        .extra("c_ant", c)
        .extra("level2_closed_form", c.abs() * mu * (1.0 - mu) * pair_sum))
}

/// T16 over a grid of complete graphs `G^r` (one group): a positivity check
/// per graph and a ratio-stability check across the grid.
pub fn check_lower_bound_grid(graphs: &[LabeledExpander], n: usize, lambda_scale: f64) -> Result<Vec<ClaimCheck>> {
    let id = ClaimId::T16;
    let mut out = Vec::new();
    let mut ratios = Vec::new();
    for x in graphs {
        let g = x.group();
        let a = half_subset(g);
        let t = lower_bound_threshold(n);
        let f = SymmetricFunction::threshold(g.order(), &a, t, n)?;
        let inst = Instance::on(x).function(f.tag()).n(n);
        if 2 * a.len() != g.order() {
            out.push(ClaimCheck::skipped(id, inst, "|G| is odd, no A with |A| = |G|/2"));
            continue;
        }
        let lambda = x.lambda() * lambda_scale;
        let measured = bias(x, &FunctionSpec::Symmetric(f), n)?.norm();
        let c = measured / lambda;
        ratios.push(c);
        out.push(
            ClaimCheck::lower(id, inst, 0.0, c).with_tolerance(0.0).extra("lambda", lambda).extra("bias", measured),
        );
        // A zero constant is not a lower bound.
        if let Some(last) = out.last_mut() {
            if !(c > 0.0 && c.is_finite()) {
                last.status = Status::Fail;
                last.reason = Some("constant is not positive and finite".into());
            }
        }
    }
    if !ratios.is_empty() {
        let median = median(&ratios);
        let spread = ratios.iter().map(|&c| (c / median).max(median / c)).fold(1.0, f64::max);
        let first = &graphs[0];
        let inst = Instance {
            group: first.group().family_tag(),
            graph: format!("complete_power grid of {} graphs", graphs.len()),
            n: Some(n),
            detail: Some("max factor between bias/lambda and its median".into()),
            ..Default::default()
        };
        out.push(ClaimCheck::upper(id, inst, 2.0, spread).extra("median_constant", median));
    }
    Ok(out)
}

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let m = s.len() / 2;
    if s.len() % 2 == 1 {
        s[m]
    } else {
        (s[m - 1] + s[m]) / 2.0
    }
}

/// T17: the expander mixing inequality with centered norms.
pub fn check_eml(x: &LabeledExpander, f: &[Vec<C64>], g: &[Vec<C64>], lambda_scale: f64) -> Result<ClaimCheck> {
    let dim = f.first().map_or(0, Vec::len);
    let inst = Instance::on(x).function(format!("random C^{dim}-valued pair"));
    let r = x.eml_check(f, g)?;
    let rhs = r.rhs * lambda_scale;
    Ok(ClaimCheck::upper(ClaimId::T17, inst, rhs, r.lhs).extra("rhs_uncentered", r.rhs_uncentered * lambda_scale))
}

/// One row of a `λ` sweep over `complete_power(G, r)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub r: usize,
    #[serde(serialize_with = "numfmt::ser")]
    pub lambda: f64,
    #[serde(serialize_with = "numfmt::ser")]
    pub measured: f64,
    #[serde(serialize_with = "numfmt::ser_opt")]
    pub upper_bound: Option<f64>,
    #[serde(serialize_with = "numfmt::ser_opt")]
    pub lower_bound_rhs: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sweep {
    pub claim: ClaimId,
    pub group: String,
    pub n: usize,
    pub t: usize,
    pub rows: Vec<SweepRow>,
    /// Median of `measured/λ`.
    #[serde(serialize_with = "numfmt::ser")]
    pub median_ratio: f64,
    /// Every `measured/λ` lies in `[median/2, 2·median]`.
    pub stable: bool,
}

impl Sweep {
    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map_or(String::new(), numfmt::sig17);
        let mut out = String::from("r,lambda,measured,upper_bound,lower_bound_rhs\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                row.r,
                numfmt::sig17(row.lambda),
                numfmt::sig17(row.measured),
                opt(row.upper_bound),
                opt(row.lower_bound_rhs)
            ));
        }
        out
    }
}

/// Threshold bias on `complete_power(G, r)` for each `r` in `rs`, with
/// `A` the first half of `G` and `t = ⌈(n+1−√n)/2⌉`.
///
/// `T15` measures the level-2 component and reports its lower bound; `T6`
/// and `T16` measure the full bias and report `2τ‖f‖₂` when `τ < 1`.
pub fn sweep_lambda(claim: ClaimId, g: Arc<FiniteGroup>, rs: &[usize], n: usize) -> Result<Sweep> {
    if !matches!(claim, ClaimId::T6 | ClaimId::T15 | ClaimId::T16) {
        return Err(Error::InvalidArgument(format!("{claim} has no lambda sweep; use T6, T15 or T16")));
    }
    let a = half_subset(&g);
    let t = lower_bound_threshold(n);
    let f = SymmetricFunction::threshold(g.order(), &a, t, n)?;
    let reps = RepSystem::new(g.clone())?;
    let order = g.order();
    let mu = a.len() as f64 / order as f64;
    let rows = rs
        .par_iter()
        .map(|&r| {
            let x = build_complete_power(g.clone(), r)?;
            let lambda = x.lambda();
            let tau = 16.0 * std::f64::consts::E * lambda * order as f64;
            let row = if claim == ClaimId::T15 {
                let _ = x.check_pseudo_cayley(&reps)?;
                let c = lower_bound_constant(order, a.len(), n, t)?;
                SweepRow {
                    r,
                    lambda,
                    measured: level_biases(&x, &f)?[2].norm(),
                    upper_bound: None,
                    lower_bound_rhs: Some((n as f64 - 2.0) * lambda * c.abs() * mu * (1.0 - mu)),
                }
            } else {
                SweepRow {
                    r,
                    lambda,
                    measured: bias(&x, &FunctionSpec::Symmetric(f.clone()), n)?.norm(),
                    upper_bound: (tau < 1.0).then(|| 2.0 * tau * f.l2_norm()),
                    lower_bound_rhs: None,
                }
            };
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let ratios: Vec<f64> = rows.iter().map(|r| r.measured / r.lambda).collect();
    let median_ratio = if ratios.is_empty() { f64::NAN } else { median(&ratios) };
    let stable = ratios.iter().all(|&c| c >= 0.5 * median_ratio && c <= 2.0 * median_ratio);
    Ok(Sweep { claim, group: g.family_tag(), n, t, rows, median_ratio, stable })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SuiteConfig {
        SuiteConfig { random_instances: 3, ..Default::default() }
    }

    #[test]
    fn claim_ids_round_trip() {
        for id in ClaimId::ALL {
            assert_eq!(id.to_string().parse::<ClaimId>().unwrap(), id);
        }
        assert!("T18".parse::<ClaimId>().is_err());
        assert_eq!(serde_json::to_string(&ClaimId::T12).unwrap(), "\"T12\"");
    }

    #[test]
    fn margins_and_status() {
        let up = ClaimCheck::upper(ClaimId::T1, Instance::default(), 1.0, 1.0 + 5e-10);
        assert!(up.passed());
        let bad = ClaimCheck::upper(ClaimId::T1, Instance::default(), 1.0, 1.1);
        assert_eq!(bad.status, Status::Fail);
        let low = ClaimCheck::lower(ClaimId::T15, Instance::default(), 1.0, 0.999_999);
        assert_eq!(low.status, Status::Fail);
        let nan = ClaimCheck::upper(ClaimId::T1, Instance::default(), 1.0, f64::NAN);
        assert_eq!(nan.status, Status::Fail);
        let skip = ClaimCheck::skipped(ClaimId::T6, Instance::default(), "tau");
        assert_eq!(skip.status, Status::Skipped);
    }

    #[test]
    fn t1_pair_on_triangle() {
        let x = &oracle_graphs().unwrap()[0];
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let fs = vec![
            TensorFn::Labeled(random_mean_zero_contraction(&mut rng, 3, 1)),
            TensorFn::Labeled(random_mean_zero_contraction(&mut rng, 3, 1)),
        ];
        let c = check_tensor_fool(ClaimId::T1, x, &IndexSet::prefix(2), &fs, 1.0).unwrap();
        assert!(c.passed());
        assert!((c.bound_value.unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn t4_sign_on_complete_power() {
        let g = group("cyclic(2)").unwrap();
        let reps = RepSystem::new(g.clone()).unwrap();
        let x = build_complete_power(g, 2).unwrap();
        let cert = x.check_pseudo_cayley(&reps).unwrap();
        let c = check_level2_tensor(&x, &reps, &cert, 1, 1, 3).unwrap();
        assert!(c.passed());
        assert!((c.bound_value.unwrap() - 1.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn t15_example_instance() {
        let g = group("cyclic(2)").unwrap();
        let reps = RepSystem::new(g.clone()).unwrap();
        let x = build_complete_power(g, 2).unwrap();
        let c = check_level2_lower(&x, &reps, &[1], 16, 7, 1.0).unwrap();
        let rhs = 14.0 / 3.0 * (1001.0 / 16384.0) * 0.25;
        assert!((c.bound_value.unwrap() - rhs).abs() < 1e-12);
        // The exact level-2 bias agrees with the signed closed form.
        assert!((c.measured_value.unwrap() - c.extras["level2_closed_form"].abs()).abs() < 1e-12);
    }

    #[test]
    fn quick_claims_pass() {
        let cfg = SuiteConfig {
            claims: vec![ClaimId::T3, ClaimId::T7, ClaimId::T8, ClaimId::T12, ClaimId::T14, ClaimId::T17],
            ..small()
        };
        let report = run_suite(&cfg).unwrap();
        assert!(report.summary.all_pass, "{}", report.table());
        assert_eq!(report.summary.skipped, 0);
    }

    #[test]
    fn corrupted_lambda_fails_t1() {
        let cfg = SuiteConfig { claims: vec![ClaimId::T1], lambda_scale: 0.5, ..small() };
        let report = run_suite(&cfg).unwrap();
        assert!(!report.summary.all_pass);
        assert_eq!(report.summary.failing_claims, vec![ClaimId::T1]);
    }

    #[test]
    fn empty_suite() {
        let cfg = SuiteConfig { claims: vec![], ..small() };
        let report = run_suite(&cfg).unwrap();
        assert_eq!(report.summary.total, 0);
        assert!(report.summary.all_pass);
    }

    #[test]
    fn sweep_without_lower_column() {
        let s = sweep_lambda(ClaimId::T6, group("cyclic(2)").unwrap(), &[7], 16).unwrap();
        assert_eq!(s.rows.len(), 1);
        let csv = s.to_csv();
        assert!(csv.lines().nth(1).unwrap().ends_with(','));
        assert!(sweep_lambda(ClaimId::T1, group("cyclic(2)").unwrap(), &[1], 4).is_err());
    }
}
