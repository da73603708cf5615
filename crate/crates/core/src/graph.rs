//! Labeled expanders: dense walk matrices, spectra and structural checks.

use std::sync::{Arc, OnceLock};

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::linalg::{mat_pow, symmetric_eigenvalues, C64, ZERO};
use crate::numfmt::{sig17, Sig17};
use crate::rep::RepSystem;

/// Largest vertex count accepted for dense storage.
pub const MAX_VERTICES: usize = 5_000;
/// Relative eigen-residual tolerance for the pseudo-Cayley check.
pub const PSEUDO_CAYLEY_TOL: f64 = 1e-9;
const STOCHASTIC_TOL: f64 = 1e-12;

/// How a graph was built.
#[derive(Debug, Clone, PartialEq)]
pub enum GraphKind {
    /// Edges `g ~ g·s` for `s` in the generator multiset.
    Cayley {
        generators: Vec<usize>,
        conjugation_closed: bool,
    },
    /// Complete graph on `G^r` without self-loops.
    CompletePower {
        r: usize,
    },
    /// Complete graph on `G^r` with self-loops, walk matrix `J/N`.
    CompleteWithLoops {
        r: usize,
    },
    /// `k`-th power of another graph's walk matrix.
    Power {
        k: usize,
    },
    Custom,
}

/// Markov chain whose state sequence carries the vertex labels.
///
/// When the walk is strongly lumpable with respect to the labeling (the mass
/// a vertex sends into each label class depends only on its own label),
/// the label sequence is itself a Markov chain on the group and the states
/// are group elements; otherwise the states are the vertices.
#[derive(Debug, Clone)]
pub struct LabelChain {
    pub labels: Vec<usize>,
    pub init: Vec<f64>,
    pub trans: DMatrix<f64>,
    pub lumped: bool,
}

impl LabelChain {
    pub fn states(&self) -> usize {
        self.labels.len()
    }

    /// `trans^k`.
    pub fn power(&self, k: usize) -> DMatrix<f64> {
        mat_pow(&self.trans, k)
    }
}

/// A graph with a symmetric row-stochastic walk matrix and a vertex labeling
/// by group elements.
#[derive(Debug, Clone)]
pub struct LabeledExpander {
    group: Arc<FiniteGroup>,
    walk: DMatrix<f64>,
    labeling: Vec<usize>,
    tag: String,
    kind: GraphKind,
    /// Descending eigenvalues of the walk matrix.
    spectrum: Vec<f64>,
    chain: OnceLock<LabelChain>,
}

/// Eigenvalues and the expansion parameter.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralReport {
    pub eigenvalues: Vec<f64>,
    /// `max(|λ_2|, |λ_N|)`.
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnbiasedReport {
    pub counts: Vec<usize>,
    pub expected: Option<usize>,
    pub pass: bool,
    pub reason: Option<String>,
}

/// Certificate that every irrep entry composed with the labeling is an
/// eigenvector of the walk matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PseudoCayleyCertificate {
    /// `λ_ρ` per irrep, aligned with the [`RepSystem`] order.
    pub lambdas: Vec<f64>,
    pub max_residual: f64,
    /// `(1/d_ρ)·(1/|S|)·Σ_s χ_ρ(s)` for conjugation-closed Cayley graphs.
    pub character_formula: Option<Vec<f64>>,
}

/// Both sides of the expander mixing inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmlReport {
    /// `|E_{x∼y}⟨f(x), g(y)⟩ − ⟨μ_f, μ_g⟩|`.
    pub lhs: f64,
    /// `λ·‖f − μ_f‖·‖g − μ_g‖`.
    pub rhs: f64,
    /// `λ·‖f‖·‖g‖`, the weaker uncentered form.
    pub rhs_uncentered: f64,
    pub slack: f64,
    pub holds: bool,
}

/// Cayley graph on `group` with edges `g ~ g·s`. `generators` is a multiset;
/// repeated entries add weight.
pub fn build_cayley(group: Arc<FiniteGroup>, generators: &[usize], allow_self_loops: bool) -> Result<LabeledExpander> {
    let n = group.order();
    if generators.is_empty() {
        return Err(Error::InvalidGenerators("empty generating set".into()));
    }
    if n > MAX_VERTICES {
        return Err(Error::GraphTooLarge(format!("{n} vertices")));
    }
    if let Some(&bad) = generators.iter().find(|&&s| s >= n) {
        return Err(Error::InvalidGenerators(format!("element {bad} out of range")));
    }
    if !allow_self_loops && generators.contains(&0) {
        return Err(Error::InvalidGenerators("contains the identity (self-loops not enabled)".into()));
    }
    let mut count = vec![0usize; n];
    for &s in generators {
        count[s] += 1;
    }
    if let Some(s) = (0..n).find(|&s| count[s] != count[group.inv(s)]) {
        return Err(Error::InvalidGenerators(format!(
            "not closed under inverses: {} appears {} times, its inverse {} times",
            group.label(s),
            count[s],
            count[group.inv(s)]
        )));
    }
    let w = 1.0 / generators.len() as f64;
    let mut walk = DMatrix::zeros(n, n);
    for g in 0..n {
        for &s in generators {
            walk[(g, group.mul(g, s))] += w;
        }
    }
    let conjugation_closed = (0..n).all(|s| (0..n).all(|g| count[group.conjugate(g, s)] == count[s]));
    let names: Vec<&str> = generators.iter().map(|&s| group.label(s)).collect();
    let tag = format!("cayley({},[{}])", group.family_tag(), names.join(","));
    let spectrum = symmetric_eigenvalues(&walk);
    Ok(LabeledExpander {
        labeling: (0..n).collect(),
        group,
        walk,
        tag,
        kind: GraphKind::Cayley { generators: generators.to_vec(), conjugation_closed },
        spectrum,
        chain: OnceLock::new(),
    })
}

fn power_vertices(group: &FiniteGroup, r: usize) -> Result<(usize, usize)> {
    if r == 0 {
        return Err(Error::InvalidArgument("r must be at least 1".into()));
    }
    let g = group.order();
    let n = (0..r)
        .try_fold(1usize, |acc, _| acc.checked_mul(g).filter(|&v| v <= MAX_VERTICES))
        .ok_or_else(|| Error::GraphTooLarge(format!("|G|^r = {}^{} exceeds {}", g, r, MAX_VERTICES)))?;
    Ok((n, n / g))
}

/// Complete graph on `G^r` without self-loops, labeled by the first
/// coordinate. Vertices are base-|G| numbers with the first coordinate most
/// significant.
pub fn build_complete_power(group: Arc<FiniteGroup>, r: usize) -> Result<LabeledExpander> {
    let (n, block) = power_vertices(&group, r)?;
    if n < 2 {
        return Err(Error::GraphTooLarge("complete graph needs at least two vertices".into()));
    }
    let off = 1.0 / (n - 1) as f64;
    let walk = DMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { off });
    let mut spectrum = vec![-off; n];
    spectrum[0] = 1.0;
    Ok(LabeledExpander {
        labeling: (0..n).map(|v| v / block).collect(),
        tag: format!("complete_power({},{r})", group.family_tag()),
        group,
        walk,
        kind: GraphKind::CompletePower { r },
        spectrum,
        chain: OnceLock::new(),
    })
}

/// Complete graph on `G^r` with self-loops: every step is a fresh uniform
/// vertex.
pub fn build_complete_with_loops(group: Arc<FiniteGroup>, r: usize) -> Result<LabeledExpander> {
    let (n, block) = power_vertices(&group, r)?;
    let walk = DMatrix::from_element(n, n, 1.0 / n as f64);
    let mut spectrum = vec![0.0; n];
    spectrum[0] = 1.0;
    Ok(LabeledExpander {
        labeling: (0..n).map(|v| v / block).collect(),
        tag: format!("complete_loops({},{r})", group.family_tag()),
        group,
        walk,
        kind: GraphKind::CompleteWithLoops { r },
        spectrum,
        chain: OnceLock::new(),
    })
}

impl LabeledExpander {
    /// A graph from an explicit walk matrix and labeling.
    pub fn from_parts(
        group: Arc<FiniteGroup>,
        walk: DMatrix<f64>,
        labeling: Vec<usize>,
        tag: impl Into<String>,
    ) -> Result<Self> {
        let n = walk.nrows();
        if walk.ncols() != n || labeling.len() != n || n == 0 {
            return Err(Error::Dimension(format!(
                "walk {}x{} with {} labels",
                walk.nrows(),
                walk.ncols(),
                labeling.len()
            )));
        }
        if n > MAX_VERTICES {
            return Err(Error::GraphTooLarge(format!("{n} vertices")));
        }
        if labeling.iter().any(|&g| g >= group.order()) {
            return Err(Error::InvalidArgument("label out of range".into()));
        }
        let asym = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| (walk[(i, j)] - walk[(j, i)]).abs())
            .fold(0.0, f64::max);
        if asym > STOCHASTIC_TOL {
            return Err(Error::Asymmetric(asym));
        }
        for i in 0..n {
            let row: f64 = walk.row(i).sum();
            if (row - 1.0).abs() > STOCHASTIC_TOL || walk.row(i).iter().any(|&x| x < 0.0) {
                return Err(Error::InvalidArgument(format!("row {i} is not a probability vector (sum {row})")));
            }
        }
        let spectrum = symmetric_eigenvalues(&walk);
        Ok(LabeledExpander {
            group,
            walk,
            labeling,
            tag: tag.into(),
            kind: GraphKind::Custom,
            spectrum,
            chain: OnceLock::new(),
        })
    }

    /// Graph with walk matrix `A^k` and the same labeling.
    pub fn power(&self, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("power must be at least 1".into()));
        }
        if k == 1 {
            return Ok(self.clone());
        }
        let walk = match self.kind {
            GraphKind::CompleteWithLoops { .. } => self.walk.clone(),
            _ => mat_pow(&self.walk, k),
        };
        let mut spectrum: Vec<f64> = self.spectrum.iter().map(|&l| l.powi(k as i32)).collect();
        spectrum.sort_by(|a, b| b.total_cmp(a));
        Ok(LabeledExpander {
            group: self.group.clone(),
            walk,
            labeling: self.labeling.clone(),
            tag: format!("power({},{k})", self.tag),
            kind: GraphKind::Power { k },
            spectrum,
            chain: OnceLock::new(),
        })
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn group_arc(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn vertex_count(&self) -> usize {
        self.walk.nrows()
    }

    pub fn walk_matrix(&self) -> &DMatrix<f64> {
        &self.walk
    }

    pub fn labeling(&self) -> &[usize] {
        &self.labeling
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn kind(&self) -> &GraphKind {
        &self.kind
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.spectrum
    }

    /// `max(|λ_2|, |λ_N|)`; zero for a single vertex.
    pub fn lambda(&self) -> f64 {
        match self.spectrum.len() {
            0 | 1 => 0.0,
            n => self.spectrum[1].abs().max(self.spectrum[n - 1].abs()),
        }
    }

    /// The non-trivial eigenvalue of largest magnitude, with its sign.
    pub fn signed_lambda(&self) -> f64 {
        match self.spectrum.len() {
            0 | 1 => 0.0,
            n => {
                if self.spectrum[n - 1].abs() > self.spectrum[1].abs() {
                    self.spectrum[n - 1]
                } else {
                    self.spectrum[1]
                }
            }
        }
    }

    pub fn spectrum(&self) -> SpectralReport {
        SpectralReport { eigenvalues: self.spectrum.clone(), lambda: self.lambda() }
    }

    /// Eigenvalues from a fresh dense eigensolve, ignoring any analytic seed.
    pub fn recompute_spectrum(&self) -> Vec<f64> {
        symmetric_eigenvalues(&self.walk)
    }

    pub fn check_unbiased(&self) -> UnbiasedReport {
        let g = self.group.order();
        let n = self.vertex_count();
        let mut counts = vec![0usize; g];
        for &l in &self.labeling {
            counts[l] += 1;
        }
        if !n.is_multiple_of(g) {
            return UnbiasedReport {
                counts,
                expected: None,
                pass: false,
                reason: Some(format!("{n} vertices are not divisible by |G| = {g}")),
            };
        }
        let expected = n / g;
        let pass = counts.iter().all(|&c| c == expected);
        let reason = (!pass).then(|| "label counts differ".to_string());
        UnbiasedReport { counts, expected: Some(expected), pass, reason }
    }

    /// The label-carrying Markov chain, lumped onto the group when possible.
    pub fn label_chain(&self) -> &LabelChain {
        self.chain.get_or_init(|| self.build_chain())
    }

    fn build_chain(&self) -> LabelChain {
        let n = self.vertex_count();
        let g = self.group.order();
        let mut counts = vec![0usize; g];
        for &l in &self.labeling {
            counts[l] += 1;
        }
        let vertex_chain = || LabelChain {
            labels: self.labeling.clone(),
            init: vec![1.0 / n as f64; n],
            trans: self.walk.clone(),
            lumped: false,
        };
        if counts.contains(&0) {
            return vertex_chain();
        }
        if n == g && self.labeling.iter().enumerate().all(|(v, &l)| v == l) {
            return LabelChain {
                labels: (0..n).collect(),
                init: vec![1.0 / n as f64; n],
                trans: self.walk.clone(),
                lumped: true,
            };
        }
        let mut flow = DMatrix::<f64>::zeros(n, g);
        for u in 0..n {
            for v in 0..n {
                flow[(u, self.labeling[v])] += self.walk[(u, v)];
            }
        }
        let mut rep = vec![usize::MAX; g];
        for u in 0..n {
            let l = self.labeling[u];
            if rep[l] == usize::MAX {
                rep[l] = u;
                continue;
            }
            let r = rep[l];
            if (0..g).any(|h| (flow[(u, h)] - flow[(r, h)]).abs() > 1e-12) {
                return vertex_chain();
            }
        }
        LabelChain {
            labels: (0..g).collect(),
            init: counts.iter().map(|&c| c as f64 / n as f64).collect(),
            trans: DMatrix::from_fn(g, g, |a, b| flow[(rep[a], b)]),
            lumped: true,
        }
    }

    /// Verifies that each `ρ_{ij}∘φ` is an eigenvector of the walk matrix and
    /// returns the per-irrep eigenvalues.
    pub fn check_pseudo_cayley(&self, reps: &RepSystem) -> Result<PseudoCayleyCertificate> {
        let unbiased = self.check_unbiased();
        if !unbiased.pass {
            return Err(Error::Biased(unbiased.reason.unwrap_or_default()));
        }
        let n = self.vertex_count();
        let mut lambdas = Vec::with_capacity(reps.len());
        let mut max_residual = 0.0_f64;
        for rho in reps.irreps() {
            let mut lam_rho: Option<f64> = None;
            for i in 0..rho.dim {
                for j in 0..rho.dim {
                    let v_re = DVector::from_fn(n, |x, _| rho.matrices[self.labeling[x]][(i, j)].re);
                    let v_im = DVector::from_fn(n, |x, _| rho.matrices[self.labeling[x]][(i, j)].im);
                    let av_re = &self.walk * &v_re;
                    let av_im = &self.walk * &v_im;
                    let vv = v_re.norm_squared() + v_im.norm_squared();
                    let lam = (av_re.dot(&v_re) + av_im.dot(&v_im)) / vv;
                    let resid = ((&av_re - &v_re * lam).norm_squared() + (&av_im - &v_im * lam).norm_squared()).sqrt();
                    let rel = resid / vv.sqrt();
                    max_residual = max_residual.max(rel);
                    let drift = lam_rho.map_or(0.0, |l| (l - lam).abs());
                    if rel > PSEUDO_CAYLEY_TOL || drift > PSEUDO_CAYLEY_TOL {
                        return Err(Error::NotPseudoCayley {
                            irrep: rho.name.clone(),
                            row: i,
                            col: j,
                            residual: rel,
                            drift,
                        });
                    }
                    lam_rho.get_or_insert(lam);
                }
            }
            lambdas.push(lam_rho.unwrap_or(0.0));
        }
        let character_formula = match &self.kind {
            GraphKind::Cayley { generators, conjugation_closed: true } => {
                let formula: Vec<f64> = reps
                    .irreps()
                    .iter()
                    .map(|rho| {
                        let sum: C64 = generators.iter().map(|&s| rho.character[s]).sum();
                        sum.re / (rho.dim * generators.len()) as f64
                    })
                    .collect();
                for (k, (a, b)) in formula.iter().zip(&lambdas).enumerate() {
                    if (a - b).abs() > PSEUDO_CAYLEY_TOL {
                        return Err(Error::Numerical(format!(
                            "character formula {a} disagrees with eigenvalue {b} for {}",
                            reps.irrep(k).name
                        )));
                    }
                }
                Some(formula)
            }
            _ => None,
        };
        Ok(PseudoCayleyCertificate { lambdas, max_residual, character_formula })
    }

    /// Expander mixing inequality for vector-valued vertex functions.
    pub fn eml_check(&self, f: &[Vec<C64>], g: &[Vec<C64>]) -> Result<EmlReport> {
        let n = self.vertex_count();
        if f.len() != n || g.len() != n {
            return Err(Error::Dimension("functions must be defined on every vertex".into()));
        }
        let dim = f.first().map_or(0, Vec::len);
        if f.iter().chain(g).any(|v| v.len() != dim) {
            return Err(Error::Dimension("inconsistent vector lengths".into()));
        }
        let inner = |a: &[C64], b: &[C64]| -> C64 { a.iter().zip(b).map(|(x, y)| x * y.conj()).sum() };
        let mean =
            |h: &[Vec<C64>]| -> Vec<C64> { (0..dim).map(|i| h.iter().map(|v| v[i]).sum::<C64>() / n as f64).collect() };
        let (mf, mg) = (mean(f), mean(g));
        let mut edge = ZERO;
        for (x, fx) in f.iter().enumerate() {
            for (y, gy) in g.iter().enumerate() {
                let w = self.walk[(x, y)];
                if w != 0.0 {
                    edge += inner(fx, gy) * w;
                }
            }
        }
        edge /= n as f64;
        let lhs = (edge - inner(&mf, &mg)).norm();
        let norm = |h: &[Vec<C64>], m: Option<&[C64]>| -> f64 {
            let s: f64 = h
                .iter()
                .map(|v| v.iter().enumerate().map(|(i, z)| (z - m.map_or(ZERO, |m| m[i])).norm_sqr()).sum::<f64>())
                .sum();
            (s / n as f64).sqrt()
        };
        let lam = self.lambda();
        let rhs = lam * norm(f, Some(&mf)) * norm(g, Some(&mg));
        let rhs_uncentered = lam * norm(f, None) * norm(g, None);
        Ok(EmlReport { lhs, rhs, rhs_uncentered, slack: rhs - lhs, holds: lhs <= rhs + 1e-10 })
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            n: self.vertex_count(),
            walk_matrix: self.walk.transpose().iter().map(|&x| Sig17(x)).collect(),
            labeling: self.labeling.clone(),
            tag: self.tag.clone(),
        }
    }

    /// `index,eigenvalue` rows.
    pub fn spectrum_csv(&self) -> String {
        let mut out = String::from("index,eigenvalue\n");
        for (i, l) in self.spectrum.iter().enumerate() {
            out.push_str(&format!("{i},{}\n", sig17(*l)));
        }
        out
    }
}

/// Graph export: row-major walk matrix with 17 significant digits.
#[derive(Debug, Clone, Serialize)]
pub struct GraphJson {
    #[serde(rename = "N")]
    pub n: usize,
    pub walk_matrix: Vec<Sig17>,
    pub labeling: Vec<usize>,
    pub tag: String,
}
