//! Expectations along expander walks.
//!
//! A walk `x_1, …, x_n` starts at a uniform vertex and takes `n − 1` steps of
//! the walk matrix. Every exact routine here is a dynamic program over the
//! label chain of the graph ([`LabelChain`]); [`brute_force_walk_oracle`]
//! enumerates vertex paths instead and serves as the independent reference.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::functions::{
    decode, inverse_root_dft, roots_of_unity, FunctionSpec, RawTable, SymmetricFunction, WordFunction,
};
use crate::graph::{LabelChain, LabeledExpander, PseudoCayleyCertificate};
use crate::group::FiniteGroup;
use crate::linalg::{binomial, binomial_u128, kron, op_norm, CMat, C64, ONE, ZERO};
use crate::rep::RepSystem;

/// Path budget of the brute-force oracle.
pub const MAX_ORACLE_PATHS: usize = 2_000_000;
/// Largest tensor dimension `Π d_j` of an exact tensor mean.
pub const MAX_TENSOR_DIM: usize = 256;
/// Largest subset count enumerated by [`beta_k`].
pub const MAX_BETA_SUBSETS: u128 = 10_000_000;
const MAX_RAW_DP_CELLS: usize = 20_000_000;
const SHARD: usize = 1024;

/// Sorted 1-based walk positions `i_1 < … < i_k` inside a walk of length `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IndexSet {
    indices: Vec<usize>,
    n: usize,
}

impl IndexSet {
    pub fn new(indices: &[usize], n: usize) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InvalidArgument("index set must be non-empty".into()));
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(format!("indices {indices:?} are not strictly increasing")));
        }
        if indices[0] == 0 || *indices.last().unwrap() > n {
            return Err(Error::InvalidArgument(format!("indices {indices:?} outside 1..={n}")));
        }
        Ok(IndexSet { indices: indices.to_vec(), n })
    }

    /// `{1, …, k}`.
    pub fn prefix(k: usize) -> Self {
        IndexSet { indices: (1..=k).collect(), n: k }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.indices.len()
    }

    /// `Δ_j = i_{j+1} − i_j`.
    pub fn gaps(&self) -> Vec<usize> {
        self.indices.windows(2).map(|w| w[1] - w[0]).collect()
    }
}

/// All `I ⊆ [k−1]` with `{1, k−1} ⊆ I` and `{j, j+1} ∩ I ≠ ∅` for every
/// `1 < j < k−1`, ordered by size and then lexicographically.
pub fn enumerate_gap_family(k: usize) -> Vec<Vec<usize>> {
    if k < 2 {
        return Vec::new();
    }
    let m = k - 1;
    let mut out: Vec<Vec<usize>> = (0u64..1 << m)
        .map(|mask| (1..=m).filter(|&i| mask >> (i - 1) & 1 == 1).collect::<Vec<_>>())
        .filter(|set| {
            let has = |i: usize| set.contains(&i);
            has(1) && has(m) && (2..m).all(|j| has(j) || has(j + 1))
        })
        .collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

/// The tensor fooling bound for one index set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TensorBound {
    /// `Σ_{I∈ℐ_k} λ^{Σ_{i∈I} Δ_i}`.
    pub value: f64,
    /// `(4λ)^{⌊k/2⌋}`.
    pub coarse_cap: f64,
}

/// `Σ_{I∈ℐ_k} λ^{Σ_{i∈I} Δ_i}`. A single position gives 0: a mean-zero
/// function has zero mean at any one step.
pub fn tensor_bound(s: &IndexSet, lambda: f64) -> TensorBound {
    let gaps = s.gaps();
    let value = enumerate_gap_family(s.k())
        .iter()
        .map(|set| lambda.powi(set.iter().map(|&i| gaps[i - 1]).sum::<usize>() as i32))
        .sum();
    TensorBound { value, coarse_cap: (4.0 * lambda).powi((s.k() / 2) as i32) }
}

/// `−log_λ` of the tensor bound: the effective exponent of `λ`.
pub fn effective_exponent(s: &IndexSet, lambda: f64) -> f64 {
    -tensor_bound(s, lambda).value.ln() / -lambda.ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BetaK {
    /// `Σ_{|S|=k} tensor_bound(S, λ)`.
    pub exact: f64,
    /// `2^k·C(n−1, ⌊k/2⌋)·(λ/(1−λ))^{k/2}`.
    pub intermediate: f64,
    /// `C(n,k)^{1/2}·(16eλ)^{k/2}`.
    pub final_bound: f64,
    pub chain_holds: bool,
}

pub fn beta_k(n: usize, k: usize, lambda: f64) -> Result<BetaK> {
    if k < 2 || k > n {
        return Err(Error::InvalidArgument(format!("need 2 <= k <= n, got k = {k}, n = {n}")));
    }
    if !(0.0..1.0).contains(&lambda) {
        return Err(Error::InvalidArgument(format!("lambda = {lambda} outside [0, 1)")));
    }
    let subsets = binomial_u128(n as u64, k as u64).unwrap_or(u128::MAX);
    if subsets > MAX_BETA_SUBSETS {
        return Err(Error::TooLarge(format!("C({n},{k}) subsets")));
    }
    let family = enumerate_gap_family(k);
    let mut exact = 0.0;
    let mut idx: Vec<usize> = (1..=k).collect();
    loop {
        let gaps: Vec<usize> = idx.windows(2).map(|w| w[1] - w[0]).collect();
        exact +=
            family.iter().map(|set| lambda.powi(set.iter().map(|&i| gaps[i - 1]).sum::<usize>() as i32)).sum::<f64>();
        // next combination in lexicographic order
        let Some(pos) = (0..k).rev().find(|&p| idx[p] < n - (k - 1 - p)) else { break };
        idx[pos] += 1;
        for q in pos + 1..k {
            idx[q] = idx[q - 1] + 1;
        }
    }
    let half = k as f64 / 2.0;
    let intermediate =
        2f64.powi(k as i32) * binomial(n as i64 - 1, (k / 2) as i64) * (lambda / (1.0 - lambda)).powf(half);
    let final_bound = binomial(n as i64, k as i64).sqrt() * (16.0 * std::f64::consts::E * lambda).powf(half);
    let chain_holds = exact <= intermediate * (1.0 + 1e-12) && intermediate <= final_bound * (1.0 + 1e-12);
    Ok(BetaK { exact, intermediate, final_bound, chain_holds })
}

/// A matrix-valued function on the walk.
#[derive(Debug, Clone)]
pub enum TensorFn {
    /// Indexed by group element; composed with the labeling.
    Labeled(Vec<CMat>),
    /// Indexed by vertex.
    Vertex(Vec<CMat>),
}

impl TensorFn {
    fn dim(&self) -> usize {
        match self {
            TensorFn::Labeled(v) | TensorFn::Vertex(v) => v.first().map_or(0, |m| m.nrows()),
        }
    }

    fn values(&self) -> &[CMat] {
        match self {
            TensorFn::Labeled(v) | TensorFn::Vertex(v) => v,
        }
    }

    /// The labeled function `x ↦ ρ(x)`.
    pub fn irrep(reps: &RepSystem, i: usize) -> Self {
        TensorFn::Labeled(reps.irrep(i).matrices.clone())
    }

    /// The labeled scalar function `x ↦ χ_ρ(x)`.
    pub fn character(reps: &RepSystem, i: usize) -> Self {
        TensorFn::Labeled(reps.irrep(i).character.iter().map(|&z| crate::linalg::scalar(z)).collect())
    }
}

/// An exact tensor expectation and its operator norm.
#[derive(Debug, Clone)]
pub struct TensorMean {
    pub matrix: CMat,
    pub op_norm: f64,
}

fn vertex_chain(x: &LabeledExpander) -> LabelChain {
    let n = x.vertex_count();
    LabelChain {
        labels: x.labeling().to_vec(),
        init: vec![1.0 / n as f64; n],
        trans: x.walk_matrix().clone(),
        lumped: false,
    }
}

/// Chain and per-state function values for a list of walk functions.
fn chain_for(x: &LabeledExpander, fs: &[TensorFn]) -> Result<(LabelChain, Vec<Vec<CMat>>)> {
    let all_labeled = fs.iter().all(|f| matches!(f, TensorFn::Labeled(_)));
    let chain = if all_labeled { x.label_chain().clone() } else { vertex_chain(x) };
    let per_state = fs
        .iter()
        .map(|f| {
            let vals = f.values();
            let expect = if matches!(f, TensorFn::Labeled(_)) { x.group().order() } else { x.vertex_count() };
            if vals.len() != expect {
                return Err(Error::Dimension(format!("function has {} values, expected {expect}", vals.len())));
            }
            let d = f.dim();
            if vals.iter().any(|m| m.nrows() != d || m.ncols() != d) {
                return Err(Error::Dimension("inconsistent matrix shapes".into()));
            }
            Ok(match f {
                TensorFn::Labeled(v) => chain.labels.iter().map(|&l| v[l].clone()).collect(),
                TensorFn::Vertex(v) => v.clone(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((chain, per_state))
}

fn combine_step<F>(trans: &DMatrix<f64>, w: &[CMat], f_next: &[CMat], combine: F) -> Vec<CMat>
where
    F: Fn(&CMat, &CMat) -> CMat + Sync,
{
    let states = w.len();
    (0..states)
        .into_par_iter()
        .map(|v| {
            let (r, cdim) = w[0].shape();
            let mut acc = CMat::zeros(r, cdim);
            for u in 0..states {
                let p = trans[(u, v)];
                if p != 0.0 {
                    acc += &w[u] * C64::new(p, 0.0);
                }
            }
            combine(&acc, &f_next[v])
        })
        .collect()
}

fn walk_mean<F>(x: &LabeledExpander, s: &IndexSet, fs: &[TensorFn], combine: F) -> Result<CMat>
where
    F: Fn(&CMat, &CMat) -> CMat + Sync,
{
    if fs.len() != s.k() {
        return Err(Error::Dimension(format!("{} functions for {} positions", fs.len(), s.k())));
    }
    let (chain, vals) = chain_for(x, fs)?;
    let mut w: Vec<CMat> = (0..chain.states()).map(|st| &vals[0][st] * C64::new(chain.init[st], 0.0)).collect();
    for (j, gap) in s.gaps().into_iter().enumerate() {
        let p = chain.power(gap);
        w = combine_step(&p, &w, &vals[j + 1], &combine);
    }
    let (r, cdim) = w[0].shape();
    Ok(w.iter().fold(CMat::zeros(r, cdim), |acc, m| acc + m))
}

/// `E[f_1(x_{i_1}) ⊗ … ⊗ f_k(x_{i_k})]` by dynamic programming over the walk.
pub fn exact_tensor_mean(x: &LabeledExpander, s: &IndexSet, fs: &[TensorFn]) -> Result<TensorMean> {
    let dim: usize = fs.iter().map(TensorFn::dim).product();
    if dim > MAX_TENSOR_DIM {
        return Err(Error::TooLarge(format!("tensor dimension {dim} exceeds {MAX_TENSOR_DIM}")));
    }
    let matrix = walk_mean(x, s, fs, kron)?;
    let op_norm = op_norm(&matrix);
    Ok(TensorMean { matrix, op_norm })
}

/// `E[f_1(x_{i_1})·f_2(x_{i_2})⋯f_k(x_{i_k})]` (ordinary matrix product). With
/// `f_j = ρ` on consecutive positions this is `E[ρ(x_1⋯x_k)]`.
pub fn exact_product_mean(x: &LabeledExpander, s: &IndexSet, fs: &[TensorFn]) -> Result<CMat> {
    let d = fs.first().map_or(0, TensorFn::dim);
    if fs.iter().any(|f| f.dim() != d) {
        return Err(Error::Dimension("product mean needs equal dimensions".into()));
    }
    walk_mean(x, s, fs, |acc, f| acc * f)
}

/// Exact `E[g(x_1, …, x_n)]` by enumerating every vertex path with its
/// probability. `g` receives vertex indices.
pub fn brute_force_walk_oracle(x: &LabeledExpander, n: usize, g: impl Fn(&[usize]) -> CMat) -> Result<CMat> {
    let nv = x.vertex_count();
    if n == 0 {
        return Err(Error::InvalidArgument("walk length must be at least 1".into()));
    }
    let paths = (0..n).try_fold(1usize, |acc, _| acc.checked_mul(nv).filter(|&p| p <= MAX_ORACLE_PATHS));
    if paths.is_none() {
        return Err(Error::TooLarge(format!("{nv}^{n} paths exceed {MAX_ORACLE_PATHS}")));
    }
    let walk = x.walk_matrix();
    let mut path = vec![0usize; n];
    let mut acc: Option<CMat> = None;
    fn rec(
        depth: usize,
        weight: f64,
        path: &mut Vec<usize>,
        walk: &DMatrix<f64>,
        g: &dyn Fn(&[usize]) -> CMat,
        acc: &mut Option<CMat>,
    ) {
        if depth == path.len() {
            let val = g(path) * C64::new(weight, 0.0);
            match acc {
                Some(a) => *a += val,
                None => *acc = Some(val),
            }
            return;
        }
        let prev = path[depth - 1];
        for v in 0..walk.ncols() {
            let p = walk[(prev, v)];
            if p != 0.0 {
                path[depth] = v;
                rec(depth + 1, weight * p, path, walk, g, acc);
            }
        }
    }
    for start in 0..nv {
        path[0] = start;
        rec(1, 1.0 / nv as f64, &mut path, walk, &g, &mut acc);
    }
    Ok(acc.expect("at least one path"))
}

/// A hidden Markov chain emitting one letter per step: state `s_1 ∼ init`,
/// `s_{t+1} ∼ trans[s_t, ·]`, letter weights `emit[s_t][letter]`.
///
/// Weights may be complex; the exact routines only need linearity.
#[derive(Debug, Clone)]
pub struct LabelProcess {
    pub init: Vec<f64>,
    pub trans: DMatrix<f64>,
    pub emit: Vec<Vec<C64>>,
}

impl LabelProcess {
    /// The labels of a walk on `x`.
    pub fn walk(x: &LabeledExpander) -> Self {
        Self::from_chain(x.label_chain(), x.group().order())
    }

    /// Independent uniform letters.
    pub fn uniform(letters: usize) -> Self {
        LabelProcess {
            init: vec![1.0],
            trans: DMatrix::from_element(1, 1, 1.0),
            emit: vec![vec![C64::new(1.0 / letters as f64, 0.0); letters]],
        }
    }

    /// Walk labels passed through the noise operator: each label is kept with
    /// weight `ρ` and replaced by a uniform letter with weight `1 − ρ`.
    pub fn noisy_walk(x: &LabeledExpander, rho: C64) -> Self {
        let l = x.group().order();
        let chain = x.label_chain();
        let spread = (ONE - rho) / l as f64;
        LabelProcess {
            init: chain.init.clone(),
            trans: chain.trans.clone(),
            emit: chain
                .labels
                .iter()
                .map(|&lab| (0..l).map(|y| if y == lab { rho + spread } else { spread }).collect())
                .collect(),
        }
    }

    fn from_chain(chain: &LabelChain, letters: usize) -> Self {
        LabelProcess {
            init: chain.init.clone(),
            trans: chain.trans.clone(),
            emit: chain
                .labels
                .iter()
                .map(|&lab| (0..letters).map(|y| if y == lab { ONE } else { ZERO }).collect())
                .collect(),
        }
    }

    pub fn states(&self) -> usize {
        self.init.len()
    }

    fn letters(&self) -> usize {
        self.emit[0].len()
    }

    /// `m[s'] = Σ_s trans[s, s']·v[s]` for a family of per-state vectors.
    fn propagate(&self, cur: &[Vec<C64>]) -> Vec<Vec<C64>> {
        let states = self.states();
        let width = cur[0].len();
        (0..states)
            .into_par_iter()
            .map(|t| {
                let mut acc = vec![ZERO; width];
                for (s, row) in cur.iter().enumerate() {
                    let p = self.trans[(s, t)];
                    if p != 0.0 {
                        for (a, v) in acc.iter_mut().zip(row) {
                            *a += v * p;
                        }
                    }
                }
                acc
            })
            .collect()
    }
}

/// `E[f(letters)]` for a symmetric function, by dynamic programming over
/// (state, block histogram).
pub fn symmetric_expectation(proc: &LabelProcess, f: &SymmetricFunction) -> Result<C64> {
    check_alphabet(proc, f.letters())?;
    let sp = f.space();
    let nb = f.blocks();
    let emit_block: Vec<Vec<C64>> = proc
        .emit
        .iter()
        .map(|row| {
            let mut b = vec![ZERO; nb];
            for (letter, w) in row.iter().enumerate() {
                b[f.block_of()[letter]] += w;
            }
            b
        })
        .collect();
    let lvl = |t: usize| sp.level(t);
    // cur[s][i - level_start] for histograms of the current total.
    let mut cur: Vec<Vec<C64>> = (0..proc.states())
        .map(|s| {
            let start = lvl(1).start;
            let mut v = vec![ZERO; lvl(1).len()];
            for (b, &e) in emit_block[s].iter().enumerate().take(nb) {
                let idx = sp.up(b, 0).unwrap();
                v[idx - start] += e * proc.init[s];
            }
            v
        })
        .collect();
    for t in 1..f.n() {
        let mixed = proc.propagate(&cur);
        let (from, to) = (lvl(t), lvl(t + 1));
        cur = mixed
            .into_par_iter()
            .enumerate()
            .map(|(s, row)| {
                let mut next = vec![ZERO; to.len()];
                for (off, val) in row.iter().enumerate() {
                    if *val == ZERO {
                        continue;
                    }
                    let i = from.start + off;
                    for b in 0..nb {
                        let w = emit_block[s][b];
                        if w != ZERO {
                            next[sp.up(b, i).unwrap() - to.start] += val * w;
                        }
                    }
                }
                next
            })
            .collect();
    }
    let values = f.values();
    Ok(cur.iter().map(|row| row.iter().zip(values).map(|(w, v)| w * v).sum::<C64>()).sum())
}

/// `E[h(w(letters))]` for a word whose indices increase, by dynamic
/// programming over (state, running product).
pub fn word_expectation(proc: &LabelProcess, g: &FiniteGroup, f: &WordFunction) -> Result<C64> {
    check_alphabet(proc, g.order())?;
    if !f.indices().windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::NoExactPath("word DP needs increasing indices; use the raw-table path".into()));
    }
    let order = g.order();
    let mut exponent = vec![0i8; f.n()];
    for (&i, &e) in f.indices().iter().zip(f.exponents()) {
        exponent[i - 1] = e;
    }
    let step = |cur: &mut Vec<Vec<C64>>, t: usize| {
        for (s, row) in cur.iter_mut().enumerate() {
            let emit = &proc.emit[s];
            match exponent[t] {
                0 => {
                    let total: C64 = emit.iter().sum();
                    row.iter_mut().for_each(|v| *v *= total);
                }
                e => {
                    let mut next = vec![ZERO; order];
                    for (acc, &val) in row.iter().enumerate() {
                        if val == ZERO {
                            continue;
                        }
                        for (letter, &w) in emit.iter().enumerate() {
                            if w != ZERO {
                                let y = if e == 1 { letter } else { g.inv(letter) };
                                next[g.mul(acc, y)] += val * w;
                            }
                        }
                    }
                    *row = next;
                }
            }
        }
    };
    let mut cur: Vec<Vec<C64>> = (0..proc.states())
        .map(|s| {
            let mut v = vec![ZERO; order];
            v[0] = C64::new(proc.init[s], 0.0);
            v
        })
        .collect();
    step(&mut cur, 0);
    for t in 1..f.n() {
        cur = proc.propagate(&cur);
        step(&mut cur, t);
    }
    let h = f.outer();
    Ok(cur.iter().map(|row| row.iter().zip(h).map(|(w, v)| w * v).sum::<C64>()).sum())
}

/// `E[f(letters)]` for a full table, by dynamic programming over
/// (state, label prefix).
pub fn raw_expectation(proc: &LabelProcess, f: &RawTable) -> Result<C64> {
    check_alphabet(proc, f.letters())?;
    let l = f.letters();
    if proc.states().saturating_mul(f.values().len()) > MAX_RAW_DP_CELLS {
        return Err(Error::TooLarge("raw-table DP state space".into()));
    }
    let mut cur: Vec<Vec<C64>> =
        (0..proc.states()).map(|s| proc.emit[s].iter().map(|w| w * proc.init[s]).collect()).collect();
    for _ in 1..f.n() {
        let mixed = proc.propagate(&cur);
        cur = mixed
            .into_iter()
            .enumerate()
            .map(|(s, row)| {
                let mut next = vec![ZERO; row.len() * l];
                for (prefix, val) in row.iter().enumerate() {
                    if *val == ZERO {
                        continue;
                    }
                    for (letter, w) in proc.emit[s].iter().enumerate() {
                        next[prefix * l + letter] = val * w;
                    }
                }
                next
            })
            .collect();
    }
    Ok(cur.iter().map(|row| row.iter().zip(f.values()).map(|(w, v)| w * v).sum::<C64>()).sum())
}

fn check_alphabet(proc: &LabelProcess, letters: usize) -> Result<()> {
    if proc.letters() != letters {
        return Err(Error::Dimension(format!("process emits {} letters, function expects {letters}", proc.letters())));
    }
    Ok(())
}

fn walk_expectation(x: &LabeledExpander, f: &FunctionSpec) -> Result<C64> {
    let proc = LabelProcess::walk(x);
    match f {
        FunctionSpec::Symmetric(s) => symmetric_expectation(&proc, s),
        FunctionSpec::Word(w) => match word_expectation(&proc, x.group(), w) {
            Err(Error::NoExactPath(_)) => raw_expectation(&proc, &w.to_raw(x.group())?),
            other => other,
        },
        FunctionSpec::Raw(r) => raw_expectation(&proc, r),
    }
}

/// `𝓔_X(f) = E_{walk}[f∘φ] − E_{uniform}[f]`, exactly.
pub fn bias(x: &LabeledExpander, f: &FunctionSpec, n: usize) -> Result<C64> {
    if f.n() != n {
        return Err(Error::Dimension(format!("function is defined on G^{} but n = {n}", f.n())));
    }
    Ok(walk_expectation(x, f)? - f.uniform_mean())
}

/// The same bias through the full table: both walk and uniform expectations
/// come from the (state, prefix) dynamic program.
pub fn bias_via_table(x: &LabeledExpander, f: &FunctionSpec) -> Result<C64> {
    let table = match f {
        FunctionSpec::Symmetric(s) => s.to_raw()?,
        FunctionSpec::Word(w) => w.to_raw(x.group())?,
        FunctionSpec::Raw(r) => r.clone(),
    };
    let walk = raw_expectation(&LabelProcess::walk(x), &table)?;
    let uniform = raw_expectation(&LabelProcess::uniform(table.letters()), &table)?;
    Ok(walk - uniform)
}

/// `𝓔_X(f_k)` for every level `k = 0..=n` of a symmetric function, from the
/// noise operator at the `(n+1)`-th roots of unity.
pub fn level_biases(x: &LabeledExpander, f: &SymmetricFunction) -> Result<Vec<C64>> {
    let uniform = f.uniform_mean();
    let samples = roots_of_unity(f.n() + 1)
        .into_iter()
        .map(|rho| {
            let noisy = symmetric_expectation(&LabelProcess::noisy_walk(x, rho), f)?;
            // The uniform expectation of T_ρ f is μ(f) for every ρ.
            Ok(noisy - uniform)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(inverse_root_dft(&samples))
}

/// Monte Carlo estimate of the bias.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampledBias {
    pub mean_re: f64,
    pub mean_im: f64,
    /// Standard error of the real part; NaN for a single sample.
    pub stderr: f64,
    pub samples: usize,
    pub seed: u64,
}

/// Samples `samples` walks and averages `f(walk) − E_uniform[f]`.
///
/// Walks are drawn in shards of fixed size, each from its own ChaCha8
/// stream, and reduced in shard order, so the result depends only on
/// `(seed, samples)`.
pub fn sample_bias(x: &LabeledExpander, f: &FunctionSpec, n: usize, samples: usize, seed: u64) -> Result<SampledBias> {
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be at least 1".into()));
    }
    if f.n() != n {
        return Err(Error::Dimension(format!("function is defined on G^{} but n = {n}", f.n())));
    }
    let chain = x.label_chain();
    let cdf = |row: &mut dyn Iterator<Item = f64>| -> Vec<f64> {
        let mut acc = 0.0;
        row.map(|p| {
            acc += p;
            acc
        })
        .collect()
    };
    let init_cdf = cdf(&mut chain.init.iter().copied());
    let trans_cdf: Vec<Vec<f64>> = (0..chain.states()).map(|s| cdf(&mut chain.trans.row(s).iter().copied())).collect();
    let draw = |c: &[f64], u: f64| c.partition_point(|&v| v <= u * c[c.len() - 1]).min(c.len() - 1);
    let mu = f.uniform_mean();
    let group = x.group();
    let shards = samples.div_ceil(SHARD);
    let partial: Vec<(C64, f64, usize)> = (0..shards)
        .into_par_iter()
        .map(|shard| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(shard as u64);
            let count = SHARD.min(samples - shard * SHARD);
            let mut labels = vec![0usize; n];
            let mut sum = ZERO;
            let mut sum_sq = 0.0;
            for _ in 0..count {
                let mut s = draw(&init_cdf, rng.random::<f64>());
                labels[0] = chain.labels[s];
                for slot in labels.iter_mut().skip(1) {
                    s = draw(&trans_cdf[s], rng.random::<f64>());
                    *slot = chain.labels[s];
                }
                let v = f.eval(group, &labels) - mu;
                sum += v;
                sum_sq += v.re * v.re;
            }
            (sum, sum_sq, count)
        })
        .collect();
    let (sum, sum_sq) = partial.iter().fold((ZERO, 0.0), |(a, b), (s, q, _)| (a + s, b + q));
    let m = samples as f64;
    let mean = sum / m;
    let stderr =
        if samples > 1 { ((sum_sq - m * mean.re * mean.re).max(0.0) / (m - 1.0) / m).sqrt() } else { f64::NAN };
    Ok(SampledBias { mean_re: mean.re, mean_im: mean.im, stderr, samples, seed })
}

/// `E[χ_{ρ_1}(x_{i_1})⋯χ_{ρ_k}(x_{i_k})]` on a pseudo-Cayley graph from
/// Clebsch–Gordan coefficients and per-irrep eigenvalues:
/// `Σ_γ Π_i c^{ρ_i, γ_i}_{γ_{i−1}}·λ_{γ_i}^{Δ_i}` with `γ_0 = triv` and
/// `γ_{k−1} = ρ_k`, evaluated backwards over the `γ` sequence.
pub fn closed_form_char_mean(
    reps: &RepSystem,
    cert: &PseudoCayleyCertificate,
    s: &IndexSet,
    rhos: &[usize],
) -> Result<C64> {
    if rhos.len() != s.k() {
        return Err(Error::Dimension(format!("{} irreps for {} positions", rhos.len(), s.k())));
    }
    if cert.lambdas.len() != reps.len() {
        return Err(Error::InvalidArgument("certificate does not match the representation system".into()));
    }
    let r = reps.len();
    let gaps = s.gaps();
    // v[γ] is the coefficient of χ_γ(x_{i_j}) in the conditional expectation.
    let mut v = vec![0.0_f64; r];
    v[*rhos.last().unwrap()] = 1.0;
    for j in (0..rhos.len() - 1).rev() {
        let mut next = vec![0.0; r];
        for (gamma, &coef) in v.iter().enumerate() {
            if coef == 0.0 {
                continue;
            }
            let decayed = coef * cert.lambdas[gamma].powi(gaps[j] as i32);
            for (prev, slot) in next.iter_mut().enumerate() {
                let m = reps.cg(rhos[j], gamma, prev);
                if m != 0 {
                    *slot += decayed * m as f64;
                }
            }
        }
        v = next;
    }
    Ok(C64::new(v[0], 0.0))
}

/// Random labeled function values with zero mean over the group and
/// operator norm at most one.
pub fn random_mean_zero_contraction(rng: &mut impl Rng, order: usize, dim: usize) -> Vec<CMat> {
    let mut vals: Vec<CMat> = (0..order)
        .map(|_| CMat::from_fn(dim, dim, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))))
        .collect();
    let mean = vals.iter().fold(CMat::zeros(dim, dim), |a, m| a + m) / C64::new(order as f64, 0.0);
    for m in vals.iter_mut() {
        *m -= &mean;
    }
    let worst = vals.iter().map(op_norm).fold(0.0, f64::max);
    if worst > 0.0 {
        for m in vals.iter_mut() {
            *m /= C64::new(worst, 0.0);
        }
    }
    vals
}

/// Enumerates label sequences of length `n` for test oracles.
pub fn for_each_sequence(letters: usize, n: usize, mut f: impl FnMut(&[usize])) {
    let total = letters.pow(n as u32);
    let mut x = vec![0; n];
    for idx in 0..total {
        decode(idx, letters, &mut x);
        f(&x);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_cayley, build_complete_power, build_complete_with_loops};
    use std::sync::Arc;

    fn g(spec: &str) -> Arc<FiniteGroup> {
        Arc::new(FiniteGroup::parse(spec).unwrap())
    }

    #[test]
    fn gap_families() {
        assert_eq!(enumerate_gap_family(2), vec![vec![1]]);
        assert_eq!(enumerate_gap_family(3), vec![vec![1, 2]]);
        assert_eq!(enumerate_gap_family(4), vec![vec![1, 3], vec![1, 2, 3]]);
        assert_eq!(enumerate_gap_family(5), vec![vec![1, 2, 4], vec![1, 3, 4], vec![1, 2, 3, 4]]);
    }

    #[test]
    fn tensor_bounds() {
        let lam = 0.3f64;
        let s = IndexSet::new(&[1, 4, 9], 9).unwrap();
        assert!((tensor_bound(&s, lam).value - lam.powi(8)).abs() < 1e-18);
        assert!((effective_exponent(&s, lam) - 8.0).abs() < 1e-9);
        let pair = IndexSet::new(&[1, 2], 2).unwrap();
        assert!((tensor_bound(&pair, lam).value - lam).abs() < 1e-18);
        let four = IndexSet::prefix(4);
        assert!((tensor_bound(&four, lam).value - (lam.powi(2) + lam.powi(3))).abs() < 1e-18);
    }

    #[test]
    fn beta_small() {
        let b = beta_k(4, 2, 0.1).unwrap();
        assert!((b.exact - 0.321).abs() < 1e-15);
        assert!(b.chain_holds);
        let full = beta_k(5, 5, 0.1).unwrap();
        assert!((full.exact - tensor_bound(&IndexSet::prefix(5), 0.1).value).abs() < 1e-18);
        assert!(beta_k(10, 3, 0.05).unwrap().chain_holds);
    }

    #[test]
    fn character_pair_on_cayley_z3() {
        let grp = g("cyclic(3)");
        let reps = RepSystem::new(grp.clone()).unwrap();
        let x = build_cayley(grp, &[1, 2], false).unwrap();
        let s = IndexSet::prefix(2);
        let fs = [TensorFn::character(&reps, 1), TensorFn::character(&reps, 2)];
        let m = exact_tensor_mean(&x, &s, &fs).unwrap();
        assert!((m.matrix[(0, 0)] - C64::new(-0.5, 0.0)).norm() < 1e-15);
        let chi = |i: usize, v: usize| reps.irrep(i).character[v];
        let oracle = brute_force_walk_oracle(&x, 2, |p| crate::linalg::scalar(chi(1, p[0]) * chi(2, p[1]))).unwrap();
        assert!((oracle[(0, 0)] - C64::new(-0.5, 0.0)).norm() < 1e-15);
        let cert = x.check_pseudo_cayley(&reps).unwrap();
        let cf = closed_form_char_mean(&reps, &cert, &s, &[1, 2]).unwrap();
        assert!((cf - C64::new(-0.5, 0.0)).norm() < 1e-15);
        let zero = closed_form_char_mean(&reps, &cert, &s, &[1, 1]).unwrap();
        assert!(zero.norm() < 1e-15);
    }

    #[test]
    fn complete_graph_with_loops_fools_mean_zero() {
        let grp = g("symmetric(3)");
        let reps = RepSystem::new(grp.clone()).unwrap();
        let x = build_complete_with_loops(grp, 1).unwrap();
        let fs = [TensorFn::irrep(&reps, 2), TensorFn::irrep(&reps, 2)];
        let m = exact_tensor_mean(&x, &IndexSet::prefix(2), &fs).unwrap();
        assert!(m.op_norm < 1e-15);
    }

    #[test]
    fn and_on_complete_power() {
        let grp = g("cyclic(2)");
        let x = build_complete_power(grp, 2).unwrap();
        let and = RawTable::from_fn(2, 2, |v| if v == [1, 1] { ONE } else { ZERO }).unwrap();
        let b = bias(&x, &FunctionSpec::Raw(and.clone()), 2).unwrap();
        // P(x_2 in A | x_1 in A) = 1/3 without self-loops, so the signed level-2 term is -1/12.
        assert!((b - C64::new(-1.0 / 12.0, 0.0)).norm() < 1e-15);
        let via = bias_via_table(&x, &FunctionSpec::Raw(and)).unwrap();
        assert!((via - b).norm() < 1e-15);
    }

    #[test]
    fn level_biases_sum_to_bias() {
        let grp = g("cyclic(2)");
        let x = build_complete_power(grp, 2).unwrap();
        let th = SymmetricFunction::threshold(2, &[1], 3, 6).unwrap();
        let levels = level_biases(&x, &th).unwrap();
        let total = bias(&x, &FunctionSpec::Symmetric(th), 6).unwrap();
        let sum: C64 = levels.iter().sum();
        assert!((sum - total).norm() < 1e-13);
        assert!(levels[0].norm() < 1e-13 && levels[1].norm() < 1e-13);
    }

    #[test]
    fn sampling_is_deterministic_and_exact_on_constants() {
        let grp = g("cyclic(3)");
        let x = build_cayley(grp, &[1, 2], false).unwrap();
        let c = FunctionSpec::Symmetric(SymmetricFunction::constant(3, 4, C64::new(0.1, 0.0)).unwrap());
        let s = sample_bias(&x, &c, 4, 5000, 7).unwrap();
        assert_eq!(s.mean_re, 0.0);
        let th = FunctionSpec::Symmetric(SymmetricFunction::threshold(3, &[0], 2, 4).unwrap());
        let a = sample_bias(&x, &th, 4, 3000, 11).unwrap();
        let b = sample_bias(&x, &th, 4, 3000, 11).unwrap();
        assert_eq!(a, b);
        let one = sample_bias(&x, &th, 4, 1, 3).unwrap();
        assert!(one.stderr.is_nan());
    }
}
