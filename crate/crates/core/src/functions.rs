//! Test functions on `G^n`: symmetric functions (thresholds, class-histogram
//! functions), word functions, raw tables, and their Fourier levels.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::linalg::{binomial, c, hs_norm, kron, CMat, C64, ONE, ZERO};
use crate::rep::RepSystem;

/// Largest raw table (`|G|^n` entries) built by brute-force paths.
pub const MAX_RAW_ENTRIES: usize = 1_000_000;
/// Largest histogram lattice built.
pub const MAX_LATTICE: usize = 5_000_000;

/// All block histograms with total at most `n`, ordered by total and then
/// lexicographically, with neighbour tables for adding or removing one count.
#[derive(Debug, Clone)]
pub struct HistogramSpace {
    blocks: usize,
    n: usize,
    hists: Vec<Vec<u16>>,
    level_start: Vec<usize>,
    up: Vec<Vec<u32>>,
    down: Vec<Vec<u32>>,
}

const NONE: u32 = u32::MAX;

impl HistogramSpace {
    pub fn new(blocks: usize, n: usize) -> Result<Self> {
        if blocks == 0 {
            return Err(Error::InvalidArgument("at least one block is required".into()));
        }
        let size = (0..=n).try_fold(0u128, |acc, t| {
            crate::linalg::binomial_u128((t + blocks - 1) as u64, (blocks - 1) as u64).map(|b| acc + b)
        });
        match size {
            Some(s) if s <= MAX_LATTICE as u128 => {}
            _ => return Err(Error::TooLarge(format!("histogram lattice for {blocks} blocks and n = {n}"))),
        }
        if n > u16::MAX as usize {
            return Err(Error::TooLarge(format!("n = {n}")));
        }
        let mut hists = Vec::new();
        let mut level_start = Vec::with_capacity(n + 2);
        for t in 0..=n {
            level_start.push(hists.len());
            compositions(t, blocks, &mut Vec::with_capacity(blocks), &mut hists);
        }
        level_start.push(hists.len());
        let index: HashMap<&[u16], u32> = hists.iter().enumerate().map(|(i, h)| (h.as_slice(), i as u32)).collect();
        let mut up = vec![vec![NONE; hists.len()]; blocks];
        let mut down = vec![vec![NONE; hists.len()]; blocks];
        let mut buf = vec![0u16; blocks];
        for (i, h) in hists.iter().enumerate() {
            for b in 0..blocks {
                buf.copy_from_slice(h);
                buf[b] += 1;
                if let Some(&j) = index.get(buf.as_slice()) {
                    up[b][i] = j;
                    down[b][j as usize] = i as u32;
                }
            }
        }
        Ok(HistogramSpace { blocks, n, hists, level_start, up, down })
    }

    pub fn blocks(&self) -> usize {
        self.blocks
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.hists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hists.is_empty()
    }

    pub fn hist(&self, i: usize) -> &[u16] {
        &self.hists[i]
    }

    /// Index range of histograms with total `t`.
    pub fn level(&self, t: usize) -> std::ops::Range<usize> {
        self.level_start[t]..self.level_start[t + 1]
    }

    #[inline]
    pub fn up(&self, block: usize, i: usize) -> Option<usize> {
        let j = self.up[block][i];
        (j != NONE).then_some(j as usize)
    }

    #[inline]
    pub fn down(&self, block: usize, i: usize) -> Option<usize> {
        let j = self.down[block][i];
        (j != NONE).then_some(j as usize)
    }

    /// Position of a full-length histogram inside `level(n)`.
    pub fn top_index(&self, h: &[u16]) -> Option<usize> {
        let range = self.level(self.n);
        self.hists[range.clone()].binary_search_by(|x| x.as_slice().cmp(h)).ok()
    }

    /// Probability of each full-length histogram when every letter falls in
    /// block `b` independently with probability `p[b]`.
    pub fn multinomial_weights(&self, p: &[f64]) -> Vec<f64> {
        let mut w = vec![0.0; self.len()];
        w[0] = 1.0;
        for t in 1..=self.n {
            for i in self.level(t) {
                w[i] = (0..self.blocks).filter_map(|b| self.down(b, i).map(|j| p[b] * w[j])).sum();
            }
        }
        w[self.level(self.n)].to_vec()
    }
}

fn compositions(t: usize, parts: usize, cur: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
    if parts == 1 {
        cur.push(t as u16);
        out.push(cur.clone());
        cur.pop();
        return;
    }
    for first in 0..=t {
        cur.push(first as u16);
        compositions(t - first, parts - 1, cur, out);
        cur.pop();
    }
}

/// A function of `x ∈ G^n` that depends only on how many coordinates fall in
/// each block of a partition of the alphabet.
#[derive(Debug, Clone)]
pub struct SymmetricFunction {
    n: usize,
    letters: usize,
    block_of: Vec<usize>,
    block_sizes: Vec<usize>,
    space: Arc<HistogramSpace>,
    /// Values on `space.level(n)`, in order.
    values: Vec<C64>,
    tag: String,
}

impl SymmetricFunction {
    /// Builds from a letter→block map and a value per block histogram.
    pub fn from_blocks(
        n: usize,
        block_of: Vec<usize>,
        tag: impl Into<String>,
        f: impl Fn(&[u16]) -> C64,
    ) -> Result<Self> {
        let letters = block_of.len();
        if letters == 0 {
            return Err(Error::InvalidArgument("empty alphabet".into()));
        }
        let blocks = block_of.iter().max().unwrap() + 1;
        let mut block_sizes = vec![0usize; blocks];
        for &b in &block_of {
            block_sizes[b] += 1;
        }
        if block_sizes.contains(&0) {
            return Err(Error::InvalidArgument("every block must contain a letter".into()));
        }
        let space = Arc::new(HistogramSpace::new(blocks, n)?);
        let values = space.level(n).map(|i| f(space.hist(i))).collect();
        Ok(SymmetricFunction { n, letters, block_of, block_sizes, space, values, tag: tag.into() })
    }

    /// `Th_{A,t}(x) = 1[|{i : x_i ∈ A}| ≥ t]`.
    pub fn threshold(letters: usize, a: &[usize], t: usize, n: usize) -> Result<Self> {
        let in_a = membership(letters, a)?;
        if a.is_empty() || in_a.iter().all(|&m| m) {
            return Err(Error::InvalidArgument("A must be a non-empty proper subset".into()));
        }
        if t > n + 1 {
            return Err(Error::InvalidArgument(format!("threshold {t} exceeds n + 1 = {}", n + 1)));
        }
        let block_of = in_a.iter().map(|&m| if m { 0 } else { 1 }).collect();
        Self::from_blocks(n, block_of, format!("threshold(|A|={},t={t})", a.len()), |h| {
            if h[0] as usize >= t {
                ONE
            } else {
                ZERO
            }
        })
    }

    /// `1[|{i : x_i ∈ A}| = w]`.
    pub fn weight_indicator(letters: usize, a: &[usize], w: usize, n: usize) -> Result<Self> {
        let in_a = membership(letters, a)?;
        if a.is_empty() || in_a.iter().all(|&m| m) {
            return Err(Error::InvalidArgument("A must be a non-empty proper subset".into()));
        }
        let block_of = in_a.iter().map(|&m| if m { 0 } else { 1 }).collect();
        Self::from_blocks(n, block_of, format!("weight(|A|={},w={w})", a.len()), |h| {
            if h[0] as usize == w {
                ONE
            } else {
                ZERO
            }
        })
    }

    /// A function of the full letter histogram.
    pub fn from_letter_histogram(
        letters: usize,
        n: usize,
        tag: impl Into<String>,
        f: impl Fn(&[u16]) -> C64,
    ) -> Result<Self> {
        Self::from_blocks(n, (0..letters).collect(), tag, f)
    }

    /// A function of the histogram over conjugacy classes; these are
    /// simultaneously symmetric and invariant under diagonal conjugation.
    pub fn from_class_histogram(
        g: &FiniteGroup,
        n: usize,
        tag: impl Into<String>,
        f: impl Fn(&[u16]) -> C64,
    ) -> Result<Self> {
        Self::from_blocks(n, (0..g.order()).map(|x| g.class_of(x)).collect(), tag, f)
    }

    pub fn constant(letters: usize, n: usize, value: C64) -> Result<Self> {
        Self::from_blocks(n, vec![0; letters], "constant", |_| value)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn letters(&self) -> usize {
        self.letters
    }

    pub fn blocks(&self) -> usize {
        self.block_sizes.len()
    }

    pub fn block_of(&self) -> &[usize] {
        &self.block_of
    }

    pub fn block_sizes(&self) -> &[usize] {
        &self.block_sizes
    }

    pub fn space(&self) -> &HistogramSpace {
        &self.space
    }

    /// Values aligned with `space().level(n)`.
    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn value_at(&self, block_hist: &[u16]) -> C64 {
        let i = self.space.top_index(block_hist).expect("histogram of the right length and total");
        self.values[i]
    }

    pub fn eval(&self, x: &[usize]) -> C64 {
        let mut h = vec![0u16; self.blocks()];
        for &letter in x {
            h[self.block_of[letter]] += 1;
        }
        self.value_at(&h)
    }

    fn block_probs(&self) -> Vec<f64> {
        self.block_sizes.iter().map(|&s| s as f64 / self.letters as f64).collect()
    }

    /// Probability of each histogram under independent uniform letters.
    pub fn uniform_weights(&self) -> Vec<f64> {
        self.space.multinomial_weights(&self.block_probs())
    }

    /// `E_{x∼Unif}[f(x)]`.
    pub fn uniform_mean(&self) -> C64 {
        self.uniform_weights().iter().zip(&self.values).map(|(w, v)| v * *w).sum()
    }

    /// `‖f‖₂` from multinomial histogram weights.
    pub fn l2_norm(&self) -> f64 {
        self.uniform_weights().iter().zip(&self.values).map(|(w, v)| w * v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// The expectation of `f` when only a sub-histogram `b` of the inputs is
    /// fixed and the other `n − |b|` letters are uniform, for every `b`.
    pub(crate) fn fill_uniform(&self) -> Vec<C64> {
        let sp = &self.space;
        let p = self.block_probs();
        let mut fill = vec![ZERO; sp.len()];
        let top = sp.level(self.n);
        fill[top.clone()].copy_from_slice(&self.values);
        for t in (0..self.n).rev() {
            for i in sp.level(t) {
                fill[i] = (0..self.blocks()).map(|b| fill[sp.up(b, i).unwrap()] * p[b]).sum();
            }
        }
        fill
    }

    /// `(T_ρ f)(h)` on full-length histograms, where `T_ρ` keeps each
    /// coordinate with probability `ρ` and resamples it uniformly otherwise.
    pub(crate) fn noise(&self, rho: C64) -> Vec<C64> {
        let sp = &self.space;
        let mut g = self.fill_uniform();
        let one_minus = ONE - rho;
        for b in 0..self.blocks() {
            let prev = g.clone();
            for (i, gi) in g.iter_mut().enumerate() {
                // Walk v, v − e_b, v − 2e_b, … collecting binomial weights.
                let m = sp.hist(i)[b] as i64;
                let mut acc = ZERO;
                let mut cur = Some(i);
                let mut removed = 0i64;
                while let Some(j) = cur {
                    let kept = m - removed;
                    acc += prev[j] * binomial(m, kept) * rho.powi(kept as i32) * one_minus.powi(removed as i32);
                    removed += 1;
                    cur = sp.down(b, j);
                }
                *gi = acc;
            }
        }
        g[sp.level(self.n)].to_vec()
    }

    /// `‖f_k‖²` for `k = 0..=n`, from `⟨T_ρ f, f⟩ = Σ_k ρ^k ‖f_k‖²` at the
    /// `(n+1)`-th roots of unity.
    pub fn level_norms_sq(&self) -> Vec<f64> {
        let w = self.uniform_weights();
        let samples: Vec<C64> = roots_of_unity(self.n + 1)
            .into_iter()
            .map(|rho| self.noise(rho).iter().zip(&self.values).zip(&w).map(|((t, f), w)| t * f.conj() * *w).sum())
            .collect();
        inverse_root_dft(&samples).into_iter().map(|z| z.re).collect()
    }

    /// Full table on `G^n`, when it fits.
    pub fn to_raw(&self) -> Result<RawTable> {
        RawTable::from_fn(self.letters, self.n, |x| self.eval(x))
    }
}

fn membership(letters: usize, a: &[usize]) -> Result<Vec<bool>> {
    let mut m = vec![false; letters];
    for &x in a {
        if x >= letters {
            return Err(Error::InvalidArgument(format!("element {x} out of range")));
        }
        m[x] = true;
    }
    Ok(m)
}

/// `ω^m` for `m = 0..count`, `ω = e^{2πi/count}`.
pub(crate) fn roots_of_unity(count: usize) -> Vec<C64> {
    (0..count).map(|m| C64::from_polar(1.0, 2.0 * PI * m as f64 / count as f64)).collect()
}

/// Coefficients `b_k` of `B(ω^m) = Σ_k ω^{mk} b_k` from samples at roots of
/// unity.
pub(crate) fn inverse_root_dft(samples: &[C64]) -> Vec<C64> {
    let n = samples.len();
    (0..n)
        .map(|k| {
            samples
                .iter()
                .enumerate()
                .map(|(m, s)| s * C64::from_polar(1.0, -2.0 * PI * ((m * k) % n) as f64 / n as f64))
                .sum::<C64>()
                / n as f64
        })
        .collect()
}

/// A function given by its full value table on `G^n`; index
/// `Σ x_i·L^{n−i}` (first coordinate most significant).
#[derive(Debug, Clone, PartialEq)]
pub struct RawTable {
    n: usize,
    letters: usize,
    values: Vec<C64>,
}

impl RawTable {
    pub fn new(letters: usize, n: usize, values: Vec<C64>) -> Result<Self> {
        let size = raw_size(letters, n)?;
        if values.len() != size {
            return Err(Error::Dimension(format!("expected {size} values, got {}", values.len())));
        }
        Ok(RawTable { n, letters, values })
    }

    pub fn from_fn(letters: usize, n: usize, f: impl Fn(&[usize]) -> C64) -> Result<Self> {
        let size = raw_size(letters, n)?;
        let mut x = vec![0usize; n];
        let values = (0..size)
            .map(|idx| {
                decode(idx, letters, &mut x);
                f(&x)
            })
            .collect();
        Ok(RawTable { n, letters, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn letters(&self) -> usize {
        self.letters
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn index(&self, x: &[usize]) -> usize {
        x.iter().fold(0, |acc, &v| acc * self.letters + v)
    }

    pub fn eval(&self, x: &[usize]) -> C64 {
        self.values[self.index(x)]
    }

    pub fn mean(&self) -> C64 {
        self.values.iter().sum::<C64>() / self.values.len() as f64
    }

    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|z| z.norm_sqr()).sum::<f64>() / self.values.len() as f64).sqrt()
    }
}

fn raw_size(letters: usize, n: usize) -> Result<usize> {
    (0..n)
        .try_fold(1usize, |acc, _| acc.checked_mul(letters).filter(|&s| s <= MAX_RAW_ENTRIES))
        .ok_or_else(|| Error::TooLarge(format!("{letters}^{n} table entries")))
}

pub(crate) fn decode(mut idx: usize, letters: usize, x: &mut [usize]) {
    for slot in x.iter_mut().rev() {
        *slot = idx % letters;
        idx /= letters;
    }
}

/// `f(x) = h(Π_{s∈S} x_s^{e_s})` with distinct 1-based indices in word order.
#[derive(Debug, Clone, PartialEq)]
pub struct WordFunction {
    n: usize,
    indices: Vec<usize>,
    exponents: Vec<i8>,
    h: Vec<C64>,
    tag: String,
}

impl WordFunction {
    pub fn new(g: &FiniteGroup, indices: &[usize], exponents: &[i8], h: Vec<C64>, n: usize) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InvalidArgument("a word needs at least one index".into()));
        }
        if indices.len() != exponents.len() {
            return Err(Error::Dimension("one exponent per index".into()));
        }
        if h.len() != g.order() {
            return Err(Error::Dimension("outer function must be defined on the group".into()));
        }
        if let Some(&i) = indices.iter().find(|&&i| i == 0 || i > n) {
            return Err(Error::InvalidArgument(format!("index {i} outside 1..={n}")));
        }
        if exponents.iter().any(|&e| e != 1 && e != -1) {
            return Err(Error::InvalidArgument("exponents must be ±1".into()));
        }
        let mut seen = indices.to_vec();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument("repeated index: not a monomial word".into()));
        }
        let word: Vec<String> = indices
            .iter()
            .zip(exponents)
            .map(|(i, e)| if *e == 1 { format!("x{i}") } else { format!("x{i}^-1") })
            .collect();
        Ok(WordFunction {
            n,
            indices: indices.to_vec(),
            exponents: exponents.to_vec(),
            h,
            tag: format!("word({})", word.join("*")),
        })
    }

    /// `1[x_1 ⋯ x_k = target]`.
    pub fn group_product(g: &FiniteGroup, k: usize, target: usize, n: usize) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::InvalidArgument(format!("need 1 <= k <= n, got k = {k}, n = {n}")));
        }
        if target >= g.order() {
            return Err(Error::InvalidArgument("target out of range".into()));
        }
        let h = (0..g.order()).map(|x| if x == target { ONE } else { ZERO }).collect();
        let mut w = Self::new(g, &(1..=k).collect::<Vec<_>>(), &vec![1; k], h, n)?;
        w.tag = format!("product(k={k},target={})", g.label(target));
        Ok(w)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.indices.len()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn exponents(&self) -> &[i8] {
        &self.exponents
    }

    pub fn outer(&self) -> &[C64] {
        &self.h
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    /// True when indices increase and every exponent is +1.
    pub fn is_monotone(&self) -> bool {
        self.indices.windows(2).all(|w| w[0] < w[1]) && self.exponents.iter().all(|&e| e == 1)
    }

    pub fn word_value(&self, g: &FiniteGroup, x: &[usize]) -> usize {
        self.indices.iter().zip(&self.exponents).fold(0, |acc, (&i, &e)| {
            let v = x[i - 1];
            g.mul(acc, if e == 1 { v } else { g.inv(v) })
        })
    }

    pub fn eval(&self, g: &FiniteGroup, x: &[usize]) -> C64 {
        self.h[self.word_value(g, x)]
    }

    /// The word value of independent uniform inputs is uniform, so
    /// `‖f‖₂² = E_g|h(g)|²`.
    pub fn l2_norm(&self) -> f64 {
        (self.h.iter().map(|z| z.norm_sqr()).sum::<f64>() / self.h.len() as f64).sqrt()
    }

    pub fn uniform_mean(&self) -> C64 {
        self.h.iter().sum::<C64>() / self.h.len() as f64
    }

    pub fn to_raw(&self, g: &FiniteGroup) -> Result<RawTable> {
        RawTable::from_fn(g.order(), self.n, |x| self.eval(g, x))
    }
}

/// Any function the walk engine can evaluate exactly.
#[derive(Debug, Clone)]
pub enum FunctionSpec {
    Symmetric(SymmetricFunction),
    Word(WordFunction),
    Raw(RawTable),
}

impl FunctionSpec {
    pub fn n(&self) -> usize {
        match self {
            FunctionSpec::Symmetric(f) => f.n(),
            FunctionSpec::Word(f) => f.n(),
            FunctionSpec::Raw(f) => f.n(),
        }
    }

    pub fn tag(&self) -> String {
        match self {
            FunctionSpec::Symmetric(f) => f.tag().to_string(),
            FunctionSpec::Word(f) => f.tag().to_string(),
            FunctionSpec::Raw(f) => format!("raw(n={})", f.n()),
        }
    }

    pub fn eval(&self, g: &FiniteGroup, x: &[usize]) -> C64 {
        match self {
            FunctionSpec::Symmetric(f) => f.eval(x),
            FunctionSpec::Word(f) => f.eval(g, x),
            FunctionSpec::Raw(f) => f.eval(x),
        }
    }

    pub fn uniform_mean(&self) -> C64 {
        match self {
            FunctionSpec::Symmetric(f) => f.uniform_mean(),
            FunctionSpec::Word(f) => f.uniform_mean(),
            FunctionSpec::Raw(f) => f.mean(),
        }
    }

    pub fn l2_norm(&self) -> f64 {
        match self {
            FunctionSpec::Symmetric(f) => f.l2_norm(),
            FunctionSpec::Word(f) => f.l2_norm(),
            FunctionSpec::Raw(f) => f.l2_norm(),
        }
    }
}

/// Per-coordinate Fourier basis: `(irrep, row, col)` for every matrix entry.
fn basis(reps: &RepSystem) -> Vec<(usize, usize, usize)> {
    reps.irreps()
        .iter()
        .enumerate()
        .flat_map(|(i, r)| (0..r.dim).flat_map(move |a| (0..r.dim).map(move |b| (i, a, b))))
        .collect()
}

/// The Fourier transform on `G^n`, computed one coordinate at a time.
///
/// Entry `[(ρ_i, a_i, b_i)_i]` is `E_x[f(x)·Π_i ρ_i(x_i)_{a_i b_i}]`, i.e.
/// entry `((a_1…a_n), (b_1…b_n))` of `f̂(ρ_1 ⊗ … ⊗ ρ_n)`.
#[derive(Debug, Clone)]
pub struct TensorFourier<'a> {
    reps: &'a RepSystem,
    n: usize,
    basis: Vec<(usize, usize, usize)>,
    coeffs: Vec<C64>,
}

fn apply_axis(data: &mut [C64], letters: usize, n: usize, axis: usize, m: &[C64]) {
    // data viewed as [pre][letters][post]
    let post = letters.pow((n - axis - 1) as u32);
    let pre = data.len() / (letters * post);
    let mut buf = vec![ZERO; letters];
    for p in 0..pre {
        for q in 0..post {
            let base = p * letters * post + q;
            for (out, slot) in buf.iter_mut().enumerate() {
                *slot = (0..letters).map(|x| m[out * letters + x] * data[base + x * post]).sum();
            }
            for (x, v) in buf.iter().enumerate() {
                data[base + x * post] = *v;
            }
        }
    }
}

impl<'a> TensorFourier<'a> {
    pub fn of(reps: &'a RepSystem, f: &RawTable) -> Self {
        let l = reps.group().order();
        assert_eq!(f.letters(), l, "table alphabet must match the group");
        let basis = basis(reps);
        let mut fwd = vec![ZERO; l * l];
        for (row, &(i, a, b)) in basis.iter().enumerate() {
            for x in 0..l {
                fwd[row * l + x] = reps.irrep(i).matrices[x][(a, b)] / l as f64;
            }
        }
        let mut coeffs = f.values().to_vec();
        for axis in 0..f.n() {
            apply_axis(&mut coeffs, l, f.n(), axis, &fwd);
        }
        TensorFourier { reps, n: f.n(), basis, coeffs }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn decode_entry(&self, idx: usize) -> Vec<(usize, usize, usize)> {
        let mut x = vec![0; self.n];
        decode(idx, self.basis.len(), &mut x);
        x.into_iter().map(|k| self.basis[k]).collect()
    }

    /// Number of non-trivial irreps in a tuple.
    pub fn level_of(tuple: &[usize]) -> usize {
        // Irrep 0 is trivial.
        tuple.iter().filter(|&&i| i != 0).count()
    }

    /// `f̂(ρ_1 ⊗ … ⊗ ρ_n)` as a dense matrix.
    pub fn coefficient(&self, tuple: &[usize]) -> CMat {
        assert_eq!(tuple.len(), self.n);
        let dims: Vec<usize> = tuple.iter().map(|&i| self.reps.irrep(i).dim).collect();
        let total: usize = dims.iter().product();
        let mut m = CMat::zeros(total, total);
        let offset: Vec<usize> = {
            let mut off = Vec::with_capacity(self.reps.len());
            let mut acc = 0;
            for r in self.reps.irreps() {
                off.push(acc);
                acc += r.dim * r.dim;
            }
            off
        };
        let nb = self.basis.len();
        for row in 0..total {
            for col in 0..total {
                let (mut r, mut cidx) = (row, col);
                let mut idx = 0usize;
                let mut stride = 1usize;
                for k in (0..self.n).rev() {
                    let d = dims[k];
                    let (a, b) = (r % d, cidx % d);
                    r /= d;
                    cidx /= d;
                    idx += (offset[tuple[k]] + a * d + b) * stride;
                    stride *= nb;
                }
                m[(row, col)] = self.coeffs[idx];
            }
        }
        m
    }

    /// `Σ d_ρ⃗ ‖f̂(ρ⃗)‖²_HS` restricted to each level, `k = 0..=n`.
    pub fn level_masses(&self) -> Vec<f64> {
        let mut mass = vec![0.0; self.n + 1];
        for (idx, z) in self.coeffs.iter().enumerate() {
            if *z == ZERO {
                continue;
            }
            let entry = self.decode_entry(idx);
            let level = entry.iter().filter(|e| e.0 != 0).count();
            let d: usize = entry.iter().map(|e| self.reps.irrep(e.0).dim).product();
            mass[level] += d as f64 * z.norm_sqr();
        }
        mass
    }

    /// Hilbert–Schmidt norm of every irrep tuple's coefficient, keyed by the
    /// tuple (irrep indices).
    pub fn tuple_hs_norms(&self) -> Vec<(Vec<usize>, f64)> {
        let r = self.reps.len();
        let tuples = r.pow(self.n as u32);
        let mut acc = vec![0.0; tuples];
        for (idx, z) in self.coeffs.iter().enumerate() {
            let entry = self.decode_entry(idx);
            let key = entry.iter().fold(0, |k, e| k * r + e.0);
            acc[key] += z.norm_sqr();
        }
        acc.into_iter()
            .enumerate()
            .map(|(key, s)| {
                let mut t = vec![0; self.n];
                decode(key, r, &mut t);
                (t, s.sqrt())
            })
            .collect()
    }

    /// `f_k` as a table: inverse transform of the level-`k` part only.
    pub fn level_component(&self, k: usize) -> RawTable {
        let l = self.reps.group().order();
        let mut inv = vec![ZERO; l * l];
        for x in 0..l {
            for (col, &(i, a, b)) in self.basis.iter().enumerate() {
                let rho = self.reps.irrep(i);
                inv[x * l + col] = rho.matrices[x][(a, b)].conj() * rho.dim as f64;
            }
        }
        let mut data: Vec<C64> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(idx, &z)| {
                let level = self.decode_entry(idx).iter().filter(|e| e.0 != 0).count();
                if level == k {
                    z
                } else {
                    ZERO
                }
            })
            .collect();
        for axis in 0..self.n {
            apply_axis(&mut data, l, self.n, axis, &inv);
        }
        RawTable { n: self.n, letters: l, values: data }
    }
}

/// Level-`k` component of a raw table.
pub fn level_component(reps: &RepSystem, f: &RawTable, k: usize) -> RawTable {
    TensorFourier::of(reps, f).level_component(k)
}

/// `a_t^n = C(n,t)·|A|^t·|A^c|^{n−t}`, zero outside `0..=n`.
pub fn a_tn(t: i64, n: i64, a: usize, ac: usize) -> f64 {
    if t < 0 || t > n {
        return 0.0;
    }
    binomial(n, t) * (a as f64).powi(t as i32) * (ac as f64).powi((n - t) as i32)
}

/// `1̂_A(ρ) = E_x[1[x∈A]·ρ(x)]`.
pub fn indicator_coefficient(reps: &RepSystem, a: &[usize], rho: usize) -> CMat {
    let irrep = reps.irrep(rho);
    let mut acc = CMat::zeros(irrep.dim, irrep.dim);
    for &x in a {
        acc += &irrep.matrices[x];
    }
    acc / c(reps.group().order() as f64)
}

/// Closed form of the threshold coefficient at `α` on one coordinate and
/// `α*` on another:
/// `((a_{t−2}^{n−2} − a_{t−1}^{n−2}) / |G|^{n−2})·1̂_A(α) ⊗ 1̂_A(α*)`.
/// The value does not depend on which two positions carry the irreps.
pub fn threshold_level2_coefficient(reps: &RepSystem, a: &[usize], t: usize, n: usize, alpha: usize) -> CMat {
    let g = reps.group().order();
    let (na, nac) = (a.len(), g - a.len());
    let (t, m) = (t as i64, n as i64 - 2);
    let scale = (a_tn(t - 2, m, na, nac) - a_tn(t - 1, m, na, nac)) / (g as f64).powi(m as i32);
    kron(&indicator_coefficient(reps, a, alpha), &indicator_coefficient(reps, a, reps.dual(alpha))) * c(scale)
}

/// `C_{A,n,t} = (a_{t−1}^{n−2} − a_{t−2}^{n−2}) / |G|^{n−2}` for `|A| = |G|/2`,
/// which equals `(C(n−2,t−1) − C(n−2,t−2)) / 2^{n−2}`.
pub fn lower_bound_constant(group_order: usize, a_size: usize, n: usize, t: usize) -> Result<f64> {
    if 2 * a_size != group_order {
        return Err(Error::InvalidArgument(format!("|A| = {a_size} is not |G|/2 = {group_order}/2")));
    }
    if n < 2 {
        return Err(Error::InvalidArgument("n must be at least 2".into()));
    }
    let (t, m) = (t as i64, n as i64 - 2);
    Ok((binomial(m, t - 1) - binomial(m, t - 2)) / 2f64.powi(m as i32))
}

/// The lower-bound threshold `⌈(n + 1 − √n)/2⌉`.
pub fn lower_bound_threshold(n: usize) -> usize {
    ((n as f64 + 1.0 - (n as f64).sqrt()) / 2.0).ceil() as usize
}

/// Result of checking where a word function's Fourier mass lives.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupportReport {
    /// Largest HS norm over tuples outside the predicted support.
    pub max_off_support: f64,
    /// Tuples with non-negligible mass.
    pub nonzero_tuples: Vec<Vec<String>>,
    pub pass: bool,
}

/// Tuples allowed by the support rule: trivial off the word, one irrep `ρ`
/// on positive exponents and `ρ*` on negative ones.
pub fn in_word_support(reps: &RepSystem, f: &WordFunction, tuple: &[usize]) -> bool {
    let mut sign = vec![0i8; f.n()];
    for (&i, &e) in f.indices().iter().zip(f.exponents()) {
        sign[i - 1] = e;
    }
    if tuple.iter().zip(&sign).any(|(&rho, &s)| s == 0 && rho != 0) {
        return false;
    }
    (0..reps.len()).any(|rho| {
        tuple.iter().zip(&sign).all(|(&r, &s)| match s {
            1 => r == rho,
            -1 => r == reps.dual(rho),
            _ => true,
        })
    })
}

pub fn word_support_check(reps: &RepSystem, f: &WordFunction) -> Result<SupportReport> {
    let raw = f.to_raw(reps.group())?;
    let tf = TensorFourier::of(reps, &raw);
    let mut max_off = 0.0_f64;
    let mut nonzero = Vec::new();
    for (tuple, hs) in tf.tuple_hs_norms() {
        if hs > 1e-12 {
            nonzero.push(tuple.iter().map(|&i| reps.irrep(i).name.clone()).collect());
        }
        if !in_word_support(reps, f, &tuple) {
            max_off = max_off.max(hs);
        }
    }
    Ok(SupportReport { max_off_support: max_off, nonzero_tuples: nonzero, pass: max_off < 1e-12 })
}

/// `P_G f(x) = E_h[f(h·x_1, …, h·x_n)]`.
pub fn project_diagonal(g: &FiniteGroup, f: &RawTable) -> RawTable {
    let order = g.order();
    let mut y = vec![0usize; f.n()];
    let values = (0..f.values().len())
        .map(|idx| {
            let mut x = vec![0usize; f.n()];
            decode(idx, order, &mut x);
            (0..order)
                .map(|h| {
                    for (slot, &xi) in y.iter_mut().zip(&x) {
                        *slot = g.mul(h, xi);
                    }
                    f.eval(&y)
                })
                .sum::<C64>()
                / order as f64
        })
        .collect();
    RawTable { n: f.n(), letters: order, values }
}

pub fn is_class_function(g: &FiniteGroup, f: &[C64]) -> bool {
    (0..g.order()).all(|x| (0..g.order()).all(|h| (f[g.conjugate(h, x)] - f[x]).norm() < 1e-12))
}

/// Scalars `c_ρ` with `f̂(ρ) = c_ρ·I` for a class function.
pub fn class_fourier(reps: &RepSystem, f: &[C64]) -> Result<Vec<C64>> {
    if !is_class_function(reps.group(), f) {
        return Err(Error::InvalidArgument("not a class function".into()));
    }
    let fc = reps.fourier_transform(f);
    Ok(fc.coeffs.iter().map(|m| crate::linalg::trace(m) / m.nrows() as f64).collect())
}

/// Residual `max_ρ ‖f̂(ρ) − c_ρ I‖_HS` for the scalars of [`class_fourier`].
pub fn class_fourier_residual(reps: &RepSystem, f: &[C64], scalars: &[C64]) -> f64 {
    reps.fourier_transform(f)
        .coeffs
        .iter()
        .zip(scalars)
        .map(|(m, s)| hs_norm(&(m - CMat::identity(m.nrows(), m.nrows()) * *s)))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reps(spec: &str) -> RepSystem {
        RepSystem::of(&FiniteGroup::parse(spec).unwrap()).unwrap()
    }

    #[test]
    fn threshold_edges_and_majority() {
        let t0 = SymmetricFunction::threshold(2, &[1], 0, 3).unwrap();
        assert!(t0.values().iter().all(|&v| v == ONE));
        let t4 = SymmetricFunction::threshold(2, &[1], 4, 3).unwrap();
        assert!(t4.values().iter().all(|&v| v == ZERO));
        let maj = SymmetricFunction::threshold(2, &[1], 2, 3).unwrap();
        assert!((maj.l2_norm() - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(maj.eval(&[1, 0, 1]), ONE);
        assert_eq!(maj.eval(&[1, 0, 0]), ZERO);
    }

    #[test]
    fn histogram_space_counts() {
        let sp = HistogramSpace::new(3, 4).unwrap();
        assert_eq!(sp.level(4).len(), 15);
        assert_eq!(sp.len(), 1 + 3 + 6 + 10 + 15);
        let i = sp.top_index(&[1, 2, 1]).unwrap() + sp.level(4).start;
        assert_eq!(sp.hist(sp.down(1, i).unwrap()), &[1, 1, 1]);
    }

    #[test]
    fn single_histogram_indicator_norm() {
        let f = SymmetricFunction::weight_indicator(2, &[1], 2, 4).unwrap();
        assert!((f.l2_norm() - (6.0f64 / 16.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn level_norms_of_majority() {
        let maj = SymmetricFunction::threshold(2, &[1], 2, 3).unwrap();
        let lv = maj.level_norms_sq();
        // 1/4 at level 0, 3/16 at level 1, 1/16 at level 3.
        let expect = [0.25, 0.1875, 0.0, 0.0625];
        for (a, b) in lv.iter().zip(expect) {
            assert!((a - b).abs() < 1e-14, "{lv:?}");
        }
    }

    #[test]
    fn brute_levels_match_noise_levels() {
        let r = reps("symmetric(3)");
        let f = SymmetricFunction::threshold(6, &[1, 2, 5], 2, 3).unwrap();
        let tf = TensorFourier::of(&r, &f.to_raw().unwrap());
        for (a, b) in tf.level_masses().iter().zip(f.level_norms_sq()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn parity_is_top_level() {
        let r = reps("cyclic(2)");
        let parity = RawTable::from_fn(2, 2, |x| if (x[0] + x[1]) % 2 == 0 { ONE } else { -ONE }).unwrap();
        let m = TensorFourier::of(&r, &parity).level_masses();
        assert!((m[2] - 1.0).abs() < 1e-15 && m[0].abs() < 1e-15 && m[1].abs() < 1e-15);
        let comp = level_component(&r, &parity, 2);
        assert!(comp.values().iter().zip(parity.values()).all(|(a, b)| (a - b).norm() < 1e-14));
    }

    #[test]
    fn or3_level2_coefficient() {
        let r = reps("cyclic(2)");
        let m = threshold_level2_coefficient(&r, &[1], 1, 3, 1);
        assert!((m[(0, 0)] - c(-0.125)).norm() < 1e-15);
        let maj = threshold_level2_coefficient(&r, &[1], 2, 3, 1);
        assert!(maj[(0, 0)].norm() < 1e-15);
        let constant = threshold_level2_coefficient(&r, &[1], 0, 3, 1);
        assert!(constant[(0, 0)].norm() < 1e-15);
    }

    #[test]
    fn lower_bound_constants() {
        assert!((lower_bound_constant(2, 1, 16, 7).unwrap() - 1001.0 / 16384.0).abs() < 1e-18);
        assert!((lower_bound_constant(2, 1, 4, 2).unwrap() - 0.25).abs() < 1e-18);
        assert!(lower_bound_constant(6, 2, 4, 2).is_err());
        assert_eq!(lower_bound_threshold(16), 7);
        assert!(lower_bound_constant(2, 1, 10, 5).unwrap() >= 0.0);
    }

    #[test]
    fn word_rejects_repeats() {
        let g = FiniteGroup::cyclic(3).unwrap();
        let h = vec![ONE; 3];
        assert!(WordFunction::new(&g, &[1, 1], &[1, 1], h.clone(), 2).is_err());
        assert!(WordFunction::new(&g, &[1, 3], &[1, 1], h, 2).is_err());
    }

    #[test]
    fn group_product_norm() {
        let g = FiniteGroup::symmetric(3).unwrap();
        let f = WordFunction::group_product(&g, 3, 0, 3).unwrap();
        let raw = f.to_raw(&g).unwrap();
        assert!((raw.l2_norm() - 6f64.powf(-0.5)).abs() < 1e-15);
        assert!((f.l2_norm() - 6f64.powf(-0.5)).abs() < 1e-15);
    }

    #[test]
    fn diagonal_projection_of_and() {
        let g = FiniteGroup::cyclic(2).unwrap();
        let and = RawTable::from_fn(2, 2, |x| if x == [1, 1] { ONE } else { ZERO }).unwrap();
        let p = project_diagonal(&g, &and);
        let expect = [0.5, 0.0, 0.0, 0.5];
        for (a, b) in p.values().iter().zip(expect) {
            assert!((a - c(b)).norm() < 1e-15);
        }
        let again = project_diagonal(&g, &p);
        assert_eq!(again, p);
        let point = RawTable::from_fn(2, 1, |x| if x[0] == 0 { ONE } else { ZERO }).unwrap();
        assert!(project_diagonal(&g, &point).values().iter().all(|&v| (v - c(0.5)).norm() < 1e-15));
    }

    #[test]
    fn class_functions() {
        let r = reps("symmetric(3)");
        let std = r.irrep(2).character.clone();
        let scalars = class_fourier(&r, &std).unwrap();
        // f̂(std) = E[χ(x)ρ(x)]: conj-pairing gives 1/d on the conjugate irrep
        assert!((scalars[2] - c(0.5)).norm() < 1e-12);
        assert!(class_fourier_residual(&r, &std, &scalars) < 1e-12);
        let one_transposition: Vec<C64> = (0..6).map(|x| if x == 1 { ONE } else { ZERO }).collect();
        assert!(!is_class_function(r.group(), &one_transposition));
        let z = reps("cyclic(4)");
        assert!(is_class_function(z.group(), &[ONE, ZERO, c(2.0), ZERO]));
    }
}
