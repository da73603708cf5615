//! Unitary irreducible representations, character tables, the group Fourier
//! transform and Clebsch–Gordan multiplicities.
//!
//! Inner products are expectations: `⟨f, g⟩ = E_x[f(x)·conj(g(x))]`, so every
//! irreducible character has `⟨χ, χ⟩ = 1`.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::group::{FamilySpec, FiniteGroup};
use crate::linalg::{c, hs_norm, kron, CMat, C64, ONE, ZERO};
use crate::numfmt::complex12;

/// Tolerance for rounding inner products to integer multiplicities.
pub const ROUNDING_TOL: f64 = 1e-6;

/// An explicit unitary irreducible representation.
#[derive(Debug, Clone)]
pub struct Irrep {
    pub name: String,
    pub dim: usize,
    /// One `dim × dim` matrix per group element.
    pub matrices: Vec<CMat>,
    /// Trace of each matrix, per group element.
    pub character: Vec<C64>,
    pub is_trivial: bool,
}

impl Irrep {
    fn from_matrices(name: String, matrices: Vec<CMat>) -> Self {
        let dim = matrices[0].nrows();
        let character = matrices.iter().map(crate::linalg::trace).collect::<Vec<_>>();
        let is_trivial = dim == 1 && character.iter().all(|z| (z - ONE).norm() < 1e-12);
        Irrep { name, dim, matrices, character, is_trivial }
    }

    pub fn matrix(&self, g: usize) -> &CMat {
        &self.matrices[g]
    }

    /// Largest entrywise deviation of `ρ(gh) = ρ(g)ρ(h)` over all pairs.
    pub fn homomorphism_residual(&self, g: &FiniteGroup) -> f64 {
        let mut worst = 0.0_f64;
        for a in 0..g.order() {
            for b in 0..g.order() {
                let lhs = &self.matrices[g.mul(a, b)];
                let rhs = &self.matrices[a] * &self.matrices[b];
                worst = worst.max(crate::linalg::max_abs_diff(lhs, &rhs));
            }
        }
        worst
    }

    /// Largest entrywise deviation of `ρ(g)ρ(g)* = I`.
    pub fn unitarity_residual(&self) -> f64 {
        let id = CMat::identity(self.dim, self.dim);
        self.matrices.iter().map(|m| crate::linalg::max_abs_diff(&(m * m.adjoint()), &id)).fold(0.0, f64::max)
    }

    /// `|⟨χ, χ⟩ − 1|`.
    pub fn irreducibility_residual(&self) -> f64 {
        let n = self.character.len() as f64;
        let norm: f64 = self.character.iter().map(|z| z.norm_sqr()).sum::<f64>() / n;
        (norm - 1.0).abs()
    }
}

/// Characters per conjugacy class.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacterTable {
    pub names: Vec<String>,
    pub dims: Vec<usize>,
    pub class_sizes: Vec<usize>,
    /// `values[i][j]` is the character of irrep `i` on class `j`.
    pub values: Vec<Vec<C64>>,
}

impl CharacterTable {
    pub fn order(&self) -> usize {
        self.class_sizes.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Class-weighted inner product `E_g[χ_a(g)·conj χ_b(g)]`.
    pub fn inner(&self, a: usize, b: usize) -> C64 {
        let n = self.order() as f64;
        self.class_sizes
            .iter()
            .enumerate()
            .map(|(j, &s)| self.values[a][j] * self.values[b][j].conj() * (s as f64 / n))
            .sum()
    }

    /// Largest deviation from row orthonormality.
    pub fn orthogonality_residual(&self) -> f64 {
        let mut worst = 0.0_f64;
        for a in 0..self.len() {
            for b in 0..self.len() {
                let expect = if a == b { ONE } else { ZERO };
                worst = worst.max((self.inner(a, b) - expect).norm());
            }
        }
        worst
    }

    /// CSV with a header of class sizes and one row per irrep.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("irrep,dim");
        for s in &self.class_sizes {
            out.push_str(&format!(",{s}"));
        }
        out.push('\n');
        for (i, row) in self.values.iter().enumerate() {
            out.push_str(&format!("{},{}", self.names[i], self.dims[i]));
            for z in row {
                out.push(',');
                out.push_str(&complex12(z.re, z.im));
            }
            out.push('\n');
        }
        out
    }

    /// Smallest non-trivial irrep dimension.
    pub fn quasirandomness_degree(&self) -> Result<usize> {
        // Row 0 is always the trivial character.
        self.dims.iter().skip(1).copied().min().ok_or(Error::TrivialGroup)
    }
}

/// Character table of any group: from explicit irreps when a constructor
/// exists, otherwise from the eigenvectors of the class-sum algebra.
pub fn character_table(g: &FiniteGroup) -> Result<CharacterTable> {
    match irreps_of(g) {
        Ok(irreps) => Ok(table_from_irreps(g, &irreps)),
        Err(Error::NoIrrepConstructor(_)) => burnside_table(g),
        Err(e) => Err(e),
    }
}

/// Complete list of irreps for supported families, in canonical order:
/// trivial first, then by dimension, then lexicographically by character.
pub fn irreps_of(g: &FiniteGroup) -> Result<Vec<Irrep>> {
    let mut irreps = match g.family() {
        FamilySpec::Cyclic(n) => cyclic_irreps(*n),
        FamilySpec::Dihedral(n) => dihedral_irreps(*n),
        FamilySpec::Symmetric(_) => symmetric_irreps(g),
        FamilySpec::Product(_, _) => {
            let (a, b) = g.factors().ok_or_else(|| Error::NoIrrepConstructor("product without factor data".into()))?;
            let ia = irreps_of(a)?;
            let ib = irreps_of(b)?;
            let nb = b.order();
            let mut out = Vec::with_capacity(ia.len() * ib.len());
            for ra in &ia {
                for rb in &ib {
                    let mats = (0..g.order()).map(|x| kron(&ra.matrices[x / nb], &rb.matrices[x % nb])).collect();
                    out.push(Irrep::from_matrices(format!("({},{})", ra.name, rb.name), mats));
                }
            }
            out
        }
        FamilySpec::Custom => return Err(Error::NoIrrepConstructor(g.family_tag())),
    };
    sort_canonical(g, &mut irreps, |r| (r.dim, r.is_trivial, class_values(g, &r.character)));
    Ok(irreps)
}

fn class_values(g: &FiniteGroup, character: &[C64]) -> Vec<C64> {
    g.classes().classes.iter().map(|cl| character[cl[0]]).collect()
}

fn cmp_complex_rows(a: &[C64], b: &[C64]) -> Ordering {
    let key = |z: &C64| ((z.re * 1e9).round() as i64, (z.im * 1e9).round() as i64);
    a.iter().map(key).cmp(b.iter().map(key))
}

fn sort_canonical<T>(_g: &FiniteGroup, items: &mut [T], key: impl Fn(&T) -> (usize, bool, Vec<C64>)) {
    items.sort_by(|x, y| {
        let (dx, tx, cx) = key(x);
        let (dy, ty, cy) = key(y);
        ty.cmp(&tx).then(dx.cmp(&dy)).then_with(|| cmp_complex_rows(&cx, &cy))
    });
}

fn table_from_irreps(g: &FiniteGroup, irreps: &[Irrep]) -> CharacterTable {
    CharacterTable {
        names: irreps.iter().map(|r| r.name.clone()).collect(),
        dims: irreps.iter().map(|r| r.dim).collect(),
        class_sizes: g.classes().sizes(),
        values: irreps.iter().map(|r| class_values(g, &r.character)).collect(),
    }
}

fn root_of_unity(k: usize, n: usize) -> C64 {
    C64::from_polar(1.0, 2.0 * PI * (k % n) as f64 / n as f64)
}

fn cyclic_irreps(n: usize) -> Vec<Irrep> {
    (0..n)
        .map(|k| {
            let mats = (0..n).map(|j| crate::linalg::scalar(root_of_unity(j * k, n))).collect();
            Irrep::from_matrices(if k == 0 { "triv".into() } else { format!("chi{k}") }, mats)
        })
        .collect()
}

fn dihedral_irreps(n: usize) -> Vec<Irrep> {
    let order = 2 * n;
    let one_dim = |name: &str, r: f64, s: f64| {
        let mats = (0..order)
            .map(|x| {
                let (a, b) = (x % n, x / n);
                crate::linalg::scalar(c(r.powi(a as i32) * s.powi(b as i32)))
            })
            .collect();
        Irrep::from_matrices(name.to_string(), mats)
    };
    let mut out = vec![one_dim("triv", 1.0, 1.0), one_dim("sgn", 1.0, -1.0)];
    if n.is_multiple_of(2) {
        out.push(one_dim("alt", -1.0, 1.0));
        out.push(one_dim("alt_sgn", -1.0, -1.0));
    }
    let swap = CMat::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
    for h in 1..=(n - 1) / 2 {
        let mats = (0..order)
            .map(|x| {
                let (a, b) = (x % n, x / n);
                let rot = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![
                    root_of_unity(h * a, n),
                    root_of_unity((n - h) * a, n),
                ]));
                if b == 0 {
                    rot
                } else {
                    rot * &swap
                }
            })
            .collect();
        out.push(Irrep::from_matrices(format!("rho{h}"), mats));
    }
    out
}

fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn rec(rest: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for part in (1..=rest.min(max)).rev() {
            cur.push(part);
            rec(rest - part, part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

/// Standard Young tableaux of a shape, each as the (row, col) of 0..n.
fn standard_tableaux(shape: &[usize]) -> Vec<Vec<(usize, usize)>> {
    fn rec(
        shape: &[usize],
        lens: &mut Vec<usize>,
        cur: &mut Vec<(usize, usize)>,
        n: usize,
        out: &mut Vec<Vec<(usize, usize)>>,
    ) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for row in 0..shape.len() {
            if lens[row] < shape[row] && (row == 0 || lens[row - 1] > lens[row]) {
                cur.push((row, lens[row]));
                lens[row] += 1;
                rec(shape, lens, cur, n, out);
                lens[row] -= 1;
                cur.pop();
            }
        }
    }
    let n = shape.iter().sum();
    let mut out = Vec::new();
    rec(shape, &mut vec![0; shape.len()], &mut Vec::new(), n, &mut out);
    out
}

/// Young's orthogonal form on adjacent transpositions, extended to the
/// whole group by breadth-first search.
fn symmetric_irreps(g: &FiniteGroup) -> Vec<Irrep> {
    let perms = g.permutations().expect("symmetric group carries permutation data");
    let n = perms[0].len();
    let index: HashMap<&[u8], usize> = perms.iter().enumerate().map(|(i, p)| (p.as_slice(), i)).collect();
    let adjacent: Vec<usize> = (0..n.saturating_sub(1))
        .map(|i| {
            let mut p: Vec<u8> = (0..n as u8).collect();
            p.swap(i, i + 1);
            index[p.as_slice()]
        })
        .collect();
    partitions(n)
        .into_iter()
        .map(|shape| {
            let tableaux = standard_tableaux(&shape);
            let pos: HashMap<Vec<(usize, usize)>, usize> =
                tableaux.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
            let d = tableaux.len();
            let content = |cell: (usize, usize)| cell.1 as f64 - cell.0 as f64;
            let gens: Vec<CMat> = (0..n.saturating_sub(1))
                .map(|i| {
                    let mut m = CMat::zeros(d, d);
                    for (t_idx, t) in tableaux.iter().enumerate() {
                        let r = content(t[i + 1]) - content(t[i]);
                        m[(t_idx, t_idx)] = c(1.0 / r);
                        if r.abs() > 1.5 {
                            let mut swapped = t.clone();
                            swapped.swap(i, i + 1);
                            let other = pos[&swapped];
                            m[(other, t_idx)] = c((1.0 - 1.0 / (r * r)).sqrt());
                        }
                    }
                    m
                })
                .collect();
            let mut mats: Vec<Option<CMat>> = vec![None; g.order()];
            mats[0] = Some(CMat::identity(d, d));
            let mut queue = std::collections::VecDeque::from([0usize]);
            while let Some(p) = queue.pop_front() {
                for (i, &s) in adjacent.iter().enumerate() {
                    let q = g.mul(p, s);
                    if mats[q].is_none() {
                        mats[q] = Some(mats[p].as_ref().unwrap() * &gens[i]);
                        queue.push_back(q);
                    }
                }
            }
            let name = format!("[{}]", shape.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(","));
            let mats = mats.into_iter().map(|m| m.expect("adjacent transpositions generate")).collect();
            let mut irrep = Irrep::from_matrices(name, mats);
            if irrep.is_trivial {
                irrep.name = "triv".into();
            }
            irrep
        })
        .collect()
}

/// Character table from simultaneous eigenvectors of the class-sum algebra.
fn burnside_table(g: &FiniteGroup) -> Result<CharacterTable> {
    let classes = &g.classes().classes;
    let r = classes.len();
    let order = g.order() as f64;
    let sizes: Vec<f64> = classes.iter().map(|c| c.len() as f64).collect();
    // a[j][k][l] = #{(x, y) ∈ C_j × C_k : xy = z} for any fixed z ∈ C_l.
    let mut a = vec![vec![vec![0.0_f64; r]; r]; r];
    for j in 0..r {
        for k in 0..r {
            for &x in &classes[j] {
                for &y in &classes[k] {
                    a[j][k][g.class_of(g.mul(x, y))] += 1.0;
                }
            }
            for l in 0..r {
                a[j][k][l] /= sizes[l];
            }
        }
    }
    // B_j = D^{-1/2} M_j D^{1/2} is normal, with orthogonal eigenvectors
    // proportional to sqrt(|C_l|)·χ(C_l).
    let b: Vec<CMat> =
        (0..r).map(|j| CMat::from_fn(r, r, |k, l| c(a[j][k][l] * (sizes[l] / sizes[k]).sqrt()))).collect();
    let i_unit = C64::new(0.0, 1.0);
    for attempt in 0..8u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(0xb0b5_1de0 + attempt);
        let mut h = CMat::zeros(r, r);
        for bj in &b {
            let (x, y): (f64, f64) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let bh = bj.adjoint();
            h += (bj + &bh) * c(x) + (bj - &bh) * (i_unit * y);
        }
        let eig = SymmetricEigen::new(h);
        let mut ev: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        let scale = ev.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
        if ev.windows(2).any(|w| w[1] - w[0] < 1e-7 * scale) {
            continue;
        }
        let mut rows = Vec::with_capacity(r);
        let mut ok = true;
        for col in 0..r {
            let u = eig.eigenvectors.column(col);
            if u[0].norm() < 1e-12 {
                ok = false;
                break;
            }
            let psi: Vec<C64> = (0..r).map(|l| u[l] / sizes[l].sqrt() / u[0]).collect();
            let mass: f64 = (0..r).map(|l| sizes[l] * psi[l].norm_sqr()).sum();
            let d = (order / mass).sqrt();
            if (d - d.round()).abs() > ROUNDING_TOL {
                ok = false;
                break;
            }
            let chi: Vec<C64> = psi.iter().map(|z| z * d).collect();
            rows.push((d.round() as usize, chi));
        }
        if !ok {
            continue;
        }
        let trivial_first = |row: &(usize, Vec<C64>)| row.1.iter().all(|z| (z - ONE).norm() < 1e-8);
        rows.sort_by(|x, y| {
            trivial_first(y).cmp(&trivial_first(x)).then(x.0.cmp(&y.0)).then_with(|| cmp_complex_rows(&x.1, &y.1))
        });
        let table = CharacterTable {
            names: (0..r).map(|i| if i == 0 { "triv".to_string() } else { format!("X{i}") }).collect(),
            dims: rows.iter().map(|x| x.0).collect(),
            class_sizes: classes.iter().map(Vec::len).collect(),
            values: rows.into_iter().map(|x| x.1).collect(),
        };
        let resid = table.orthogonality_residual();
        if resid > 1e-8 {
            return Err(Error::Numerical(format!("class-sum character table fails orthogonality by {resid:.3e}")));
        }
        return Ok(table);
    }
    Err(Error::Numerical(format!("class-sum eigenproblem stayed degenerate for {} classes", r)))
}

/// Fourier coefficients `f̂(ρ) = E_x[f(x)·ρ(x)]`, aligned with the irreps.
#[derive(Debug, Clone)]
pub struct FourierCoefficients {
    pub coeffs: Vec<CMat>,
}

/// Irreps, character table, duals and Clebsch–Gordan data of one group.
#[derive(Debug, Clone)]
pub struct RepSystem {
    group: Arc<FiniteGroup>,
    irreps: Vec<Irrep>,
    table: CharacterTable,
    dual: Vec<usize>,
    /// `cg[(a·r + b)·r + c]` is the multiplicity of `c` in `a ⊗ b`.
    cg: Vec<u32>,
}

impl RepSystem {
    pub fn new(group: Arc<FiniteGroup>) -> Result<Self> {
        let irreps = irreps_of(&group)?;
        let table = table_from_irreps(&group, &irreps);
        let r = irreps.len();
        let dual = (0..r)
            .map(|i| {
                (0..r)
                    .find(|&j| {
                        irreps[j].dim == irreps[i].dim
                            && table.values[i].iter().zip(&table.values[j]).all(|(a, b)| (a.conj() - b).norm() < 1e-9)
                    })
                    .ok_or_else(|| Error::Numerical(format!("no dual found for {}", irreps[i].name)))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut cg = vec![0u32; r * r * r];
        for a in 0..r {
            for b in 0..r {
                for g in 0..r {
                    let v =
                        class_average(&table, |j| table.values[a][j] * table.values[b][j] * table.values[g][j].conj());
                    cg[(a * r + b) * r + g] = round_multiplicity(v, "Clebsch–Gordan coefficient")?;
                }
            }
        }
        Ok(RepSystem { group, irreps, table, dual, cg })
    }

    pub fn of(group: &FiniteGroup) -> Result<Self> {
        Self::new(Arc::new(group.clone()))
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn group_arc(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn irreps(&self) -> &[Irrep] {
        &self.irreps
    }

    pub fn irrep(&self, i: usize) -> &Irrep {
        &self.irreps[i]
    }

    pub fn len(&self) -> usize {
        self.irreps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.irreps.is_empty()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.irreps.iter().map(|r| r.dim).collect()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.irreps.iter().position(|r| r.name == name)
    }

    pub fn character_table(&self) -> &CharacterTable {
        &self.table
    }

    /// Index of the irrep whose character is the complex conjugate.
    pub fn dual(&self, i: usize) -> usize {
        self.dual[i]
    }

    pub fn quasirandomness_degree(&self) -> Result<usize> {
        self.table.quasirandomness_degree()
    }

    pub fn fourier_transform(&self, f: &[C64]) -> FourierCoefficients {
        assert_eq!(f.len(), self.group.order(), "function length must equal group order");
        let n = f.len() as f64;
        let coeffs = self
            .irreps
            .iter()
            .map(|rho| {
                let mut acc = CMat::zeros(rho.dim, rho.dim);
                for (x, &fx) in f.iter().enumerate() {
                    if fx != ZERO {
                        acc.zip_apply(&rho.matrices[x], |a, m| *a += m * fx);
                    }
                }
                acc / c(n)
            })
            .collect();
        FourierCoefficients { coeffs }
    }

    /// `f(x) = Σ_ρ d_ρ·tr(ρ(x)*·f̂(ρ))`.
    pub fn inverse_fourier(&self, fc: &FourierCoefficients) -> Vec<C64> {
        (0..self.group.order())
            .map(|x| {
                self.irreps
                    .iter()
                    .zip(&fc.coeffs)
                    .map(|(rho, m)| {
                        // tr(A*·M) is the entrywise sum of conj(A)·M.
                        let tr: C64 = rho.matrices[x].iter().zip(m.iter()).map(|(a, b)| a.conj() * b).sum();
                        tr * (rho.dim as f64)
                    })
                    .sum()
            })
            .collect()
    }

    /// `Σ_ρ d_ρ ‖f̂(ρ)‖²_HS`, equal to `E|f|²`.
    pub fn plancherel_mass(&self, fc: &FourierCoefficients) -> f64 {
        self.irreps.iter().zip(&fc.coeffs).map(|(rho, m)| rho.dim as f64 * hs_norm(m).powi(2)).sum()
    }

    /// Multiplicities of every irrep in `α ⊗ β`.
    pub fn cg_coefficients(&self, alpha: usize, beta: usize) -> Vec<u32> {
        let r = self.len();
        self.cg[(alpha * r + beta) * r..(alpha * r + beta + 1) * r].to_vec()
    }

    #[inline]
    pub fn cg(&self, alpha: usize, beta: usize, gamma: usize) -> u32 {
        let r = self.len();
        self.cg[(alpha * r + beta) * r + gamma]
    }

    /// Multiplicity of the trivial irrep in `ρ_1 ⊗ … ⊗ ρ_k`.
    pub fn trivial_multiplicity(&self, rhos: &[usize]) -> Result<u64> {
        if rhos.is_empty() {
            return Err(Error::InvalidArgument("trivial_multiplicity needs at least one irrep".into()));
        }
        let v = class_average(&self.table, |j| rhos.iter().map(|&i| self.table.values[i][j]).product());
        round_multiplicity(v, "trivial multiplicity").map(u64::from)
    }

    /// `Σ_ρ χ_ρ(g)·conj χ_ρ(h)`.
    pub fn schur_check(&self, g: usize, h: usize) -> C64 {
        let (cg, ch) = (self.group.class_of(g), self.group.class_of(h));
        (0..self.len()).map(|i| self.table.values[i][cg] * self.table.values[i][ch].conj()).sum()
    }

    /// Exact `η²_{k,G}` and its two upper bounds.
    pub fn eta_k(&self, k: usize) -> EtaK {
        eta_k_from_table(&self.table, k)
    }
}

/// `η²_{k,G}` with the class-size bound and the quasirandom bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaK {
    pub k: usize,
    pub exact: f64,
    /// `Σ_C (|G|/|C|)^{k−2} + 1`.
    pub class_bound: f64,
    /// `4|G|^{k−1}/D²`, absent for the trivial group.
    pub quasirandom_bound: Option<f64>,
}

/// `η²_{k,G}` via `E_{g,h}[Π(|G|/|C_g|·1[g∼h] − 1)]`, avoiding the sum over
/// irrep tuples.
pub fn eta_k_from_table(table: &CharacterTable, k: usize) -> EtaK {
    let n = table.order() as f64;
    let k_i = k as i32;
    let mut exact = 0.0;
    let mut same_class = 0.0;
    let mut class_bound = 1.0;
    for &s in &table.class_sizes {
        let p = (s as f64 / n).powi(2);
        same_class += p;
        exact += p * (n / s as f64 - 1.0).powi(k_i);
        class_bound += (n / s as f64).powi(k_i - 2);
    }
    exact += (1.0 - same_class) * (-1.0_f64).powi(k_i);
    let quasirandom_bound = table.quasirandomness_degree().ok().map(|d| 4.0 * n.powi(k_i - 1) / (d * d) as f64);
    EtaK { k, exact, class_bound, quasirandom_bound }
}

fn class_average(table: &CharacterTable, f: impl Fn(usize) -> C64) -> C64 {
    let n = table.order() as f64;
    table.class_sizes.iter().enumerate().map(|(j, &s)| f(j) * (s as f64 / n)).sum()
}

fn round_multiplicity(v: C64, what: &str) -> Result<u32> {
    let rounded = v.re.round();
    let residue = (v - c(rounded)).norm();
    if residue > ROUNDING_TOL || rounded < 0.0 {
        return Err(Error::Rounding { what: what.to_string(), residue: residue.max(-rounded) });
    }
    Ok(rounded as u32)
}

/// Real symmetric helper used by tests and the verifier: maps a real matrix
/// into the complex type.
pub fn complexify(m: &DMatrix<f64>) -> CMat {
    m.map(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reps(spec: &str) -> RepSystem {
        RepSystem::of(&FiniteGroup::parse(spec).unwrap()).unwrap()
    }

    #[test]
    fn cyclic_two() {
        let r = reps("cyclic(2)");
        assert_eq!(r.len(), 2);
        assert_eq!(r.irrep(0).name, "triv");
        assert_eq!(r.cg_coefficients(1, 1), vec![1, 0]);
        assert_eq!(r.trivial_multiplicity(&[1, 1]).unwrap(), 1);
        assert_eq!(r.trivial_multiplicity(&[1]).unwrap(), 0);
    }

    #[test]
    fn symmetric_three_dims_and_standard_row() {
        let r = reps("symmetric(3)");
        assert_eq!(r.dims(), vec![1, 1, 2]);
        let t = r.character_table();
        // classes ordered (identity, 3-cycles, transpositions)
        let std_row: Vec<f64> = t.values[2].iter().map(|z| z.re).collect();
        assert!((std_row[0] - 2.0).abs() < 1e-12 && (std_row[1] + 1.0).abs() < 1e-12 && std_row[2].abs() < 1e-12);
        assert_eq!(r.cg_coefficients(2, 2), vec![1, 1, 1]);
        assert_eq!(r.trivial_multiplicity(&[2, 2, 2]).unwrap(), 1);
    }

    #[test]
    fn product_of_cyclics_is_abelian() {
        let r = reps("product(cyclic(2),cyclic(3))");
        assert_eq!(r.dims(), vec![1; 6]);
    }

    #[test]
    fn cyclic_three_table_is_roots_of_unity() {
        let t = character_table(&FiniteGroup::cyclic(3).unwrap()).unwrap();
        let w = root_of_unity(1, 3);
        let rows: Vec<Vec<C64>> = t.values.clone();
        assert_eq!(rows.len(), 3);
        assert!(rows[0].iter().all(|z| (z - ONE).norm() < 1e-12));
        let expect_a = [ONE, w, w * w];
        let expect_b = [ONE, w * w, w];
        let matches = |row: &Vec<C64>, e: &[C64; 3]| row.iter().zip(e).all(|(a, b)| (a - b).norm() < 1e-12);
        assert!(
            (matches(&rows[1], &expect_a) && matches(&rows[2], &expect_b))
                || (matches(&rows[1], &expect_b) && matches(&rows[2], &expect_a))
        );
    }

    #[test]
    fn class_sum_method_matches_explicit_irreps() {
        for spec in ["symmetric(4)", "dihedral(5)", "product(cyclic(3),symmetric(3))"] {
            let g = FiniteGroup::parse(spec).unwrap();
            let explicit = table_from_irreps(&g, &irreps_of(&g).unwrap());
            let custom = FiniteGroup::from_table(g.order(), g.mul_table().to_vec(), None).unwrap();
            let burnside = character_table(&custom).unwrap();
            assert_eq!(explicit.dims, burnside.dims, "{spec}");
            for (a, b) in explicit.values.iter().zip(&burnside.values) {
                for (x, y) in a.iter().zip(b) {
                    assert!((x - y).norm() < 1e-9, "{spec}: {x} vs {y}");
                }
            }
        }
    }

    #[test]
    fn alternating_five_is_three_quasirandom() {
        let s5 = FiniteGroup::symmetric(5).unwrap();
        let perms = s5.permutations().unwrap().to_vec();
        let even: Vec<usize> = (0..120)
            .filter(|&i| {
                let p = &perms[i];
                (0..5).flat_map(|a| (a + 1..5).map(move |b| (a, b))).filter(|&(a, b)| p[a] > p[b]).count() % 2 == 0
            })
            .collect();
        let a5 = s5.subgroup(&even).unwrap();
        let t = character_table(&a5).unwrap();
        assert_eq!(t.dims, vec![1, 3, 3, 4, 5]);
        assert_eq!(t.quasirandomness_degree().unwrap(), 3);
    }

    #[test]
    fn trivial_group_table() {
        let g = FiniteGroup::cyclic(1).unwrap();
        let t = character_table(&g).unwrap();
        assert_eq!(t.values, vec![vec![ONE]]);
        assert!(matches!(t.quasirandomness_degree(), Err(Error::TrivialGroup)));
    }

    #[test]
    fn fourier_of_identity_indicator() {
        let r = reps("cyclic(2)");
        let fc = r.fourier_transform(&[ONE, ZERO]);
        assert!((fc.coeffs[0][(0, 0)] - c(0.5)).norm() < 1e-15);
        assert!((fc.coeffs[1][(0, 0)] - c(0.5)).norm() < 1e-15);
        assert!((r.plancherel_mass(&fc) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn schur_values() {
        let r = reps("symmetric(3)");
        assert!((r.schur_check(0, 0) - c(6.0)).norm() < 1e-12);
        assert!(r.schur_check(0, 1).norm() < 1e-12);
        // 132 and 213 are both transpositions
        assert!((r.schur_check(1, 2) - c(2.0)).norm() < 1e-12);
    }

    #[test]
    fn csv_header_and_format() {
        let csv = reps("cyclic(2)").character_table().to_csv();
        assert_eq!(
            csv,
            "irrep,dim,1,1\ntriv,1,1.000000000000+0.000000000000i,1.000000000000+0.000000000000i\n\
             chi1,1,1.000000000000+0.000000000000i,-1.000000000000+0.000000000000i\n"
        );
    }
}
