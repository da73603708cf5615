//! Finite groups as dense multiplication tables.
//!
//! Elements are indices `0..order`; index 0 is always the identity.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest group order accepted by any constructor.
pub const MAX_ORDER: usize = 10_000;
/// Orders up to this bound get an exhaustive associativity check.
pub const EXHAUSTIVE_AXIOM_LIMIT: usize = 200;
/// Number of random triples checked above [`EXHAUSTIVE_AXIOM_LIMIT`].
pub const SAMPLED_TRIPLES: usize = 10_000;
const AXIOM_SEED: u64 = 0x5eed_a550c;

/// Family descriptor for a group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilySpec {
    Cyclic(usize),
    Dihedral(usize),
    Symmetric(usize),
    Product(Box<FamilySpec>, Box<FamilySpec>),
    Custom,
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilySpec::Cyclic(n) => write!(f, "cyclic({n})"),
            FamilySpec::Dihedral(n) => write!(f, "dihedral({n})"),
            FamilySpec::Symmetric(n) => write!(f, "symmetric({n})"),
            FamilySpec::Product(a, b) => write!(f, "product({a},{b})"),
            FamilySpec::Custom => write!(f, "custom"),
        }
    }
}

impl FamilySpec {
    /// Parses the compact form produced by `Display`, e.g.
    /// `product(cyclic(2),symmetric(3))`.
    pub fn parse(s: &str) -> Result<Self> {
        let mut p = SpecParser { s: s.as_bytes(), pos: 0 };
        let spec = p.family()?;
        p.skip_ws();
        if p.pos != p.s.len() {
            return Err(Error::UnsupportedFamily(format!("trailing input in {s:?}")));
        }
        Ok(spec)
    }
}

pub(crate) struct SpecParser<'a> {
    pub(crate) s: &'a [u8],
    pub(crate) pos: usize,
}

impl SpecParser<'_> {
    pub(crate) fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    pub(crate) fn ident(&mut self) -> String {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && (self.s[self.pos].is_ascii_alphanumeric() || self.s[self.pos] == b'_') {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.s[start..self.pos]).into_owned()
    }

    pub(crate) fn expect(&mut self, ch: u8) -> Result<()> {
        self.skip_ws();
        if self.pos < self.s.len() && self.s[self.pos] == ch {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::UnsupportedFamily(format!(
                "expected '{}' at offset {} in {:?}",
                ch as char,
                self.pos,
                String::from_utf8_lossy(self.s)
            )))
        }
    }

    pub(crate) fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    pub(crate) fn number(&mut self) -> Result<usize> {
        let word = self.ident();
        word.parse::<usize>().map_err(|_| Error::UnsupportedFamily(format!("expected an integer, found {word:?}")))
    }

    pub(crate) fn family(&mut self) -> Result<FamilySpec> {
        let name = self.ident();
        let (name, subscript) = match name.as_str() {
            "Z" | "C" => ("cyclic".to_string(), true),
            "D" => ("dihedral".to_string(), true),
            "S" => ("symmetric".to_string(), true),
            _ => (name, false),
        };
        if name == "custom" {
            return Ok(FamilySpec::Custom);
        }
        if subscript && self.peek() != Some(b'(') {
            return Err(Error::UnsupportedFamily(format!("{name} needs an argument")));
        }
        self.expect(b'(')?;
        let spec = match name.as_str() {
            "cyclic" => FamilySpec::Cyclic(self.number()?),
            "dihedral" => FamilySpec::Dihedral(self.number()?),
            "symmetric" => FamilySpec::Symmetric(self.number()?),
            "product" => {
                let a = self.family()?;
                self.expect(b',')?;
                let b = self.family()?;
                FamilySpec::Product(Box::new(a), Box::new(b))
            }
            other => return Err(Error::UnsupportedFamily(other.to_string())),
        };
        self.expect(b')')?;
        Ok(spec)
    }
}

/// Partition of the group into conjugacy classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjugacyPartition {
    /// Each class sorted ascending; classes ordered by (size, smallest element).
    pub classes: Vec<Vec<usize>>,
    pub class_of: Vec<usize>,
}

impl ConjugacyPartition {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.classes.iter().map(Vec::len).collect()
    }
}

/// First violated axiom found by [`verify_table`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "axiom", rename_all = "snake_case")]
pub enum AxiomViolation {
    Shape { expected: usize, found: usize },
    Range { a: usize, b: usize, value: usize },
    Associativity { a: usize, b: usize, c: usize },
    Identity { g: usize },
    Inverse { g: usize },
    LatinRow { row: usize },
    LatinColumn { column: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub order: usize,
    /// True when every triple was checked.
    pub exhaustive: bool,
    pub violation: Option<AxiomViolation>,
}

impl AxiomReport {
    pub fn is_valid(&self) -> bool {
        self.violation.is_none()
    }
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.violation {
            None => write!(f, "valid"),
            Some(v) => write!(f, "{v:?}"),
        }
    }
}

/// Checks the group axioms on a row-major table with the identity at index 0.
///
/// Associativity is checked on all triples up to [`EXHAUSTIVE_AXIOM_LIMIT`]
/// and on [`SAMPLED_TRIPLES`] seeded random triples above it.
pub fn verify_table(order: usize, mul: &[usize]) -> AxiomReport {
    let exhaustive = order <= EXHAUSTIVE_AXIOM_LIMIT;
    let report = |violation| AxiomReport { order, exhaustive, violation };
    if order == 0 || mul.len() != order * order {
        return report(Some(AxiomViolation::Shape { expected: order * order, found: mul.len() }));
    }
    for (i, &v) in mul.iter().enumerate() {
        if v >= order {
            return report(Some(AxiomViolation::Range { a: i / order, b: i % order, value: v }));
        }
    }
    let m = |a: usize, b: usize| mul[a * order + b];
    if exhaustive {
        for a in 0..order {
            for b in 0..order {
                let ab = m(a, b);
                for c in 0..order {
                    if m(ab, c) != m(a, m(b, c)) {
                        return report(Some(AxiomViolation::Associativity { a, b, c }));
                    }
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(AXIOM_SEED);
        for _ in 0..SAMPLED_TRIPLES {
            let (a, b, c) = (rng.random_range(0..order), rng.random_range(0..order), rng.random_range(0..order));
            if m(m(a, b), c) != m(a, m(b, c)) {
                return report(Some(AxiomViolation::Associativity { a, b, c }));
            }
        }
    }
    for g in 0..order {
        if m(0, g) != g || m(g, 0) != g {
            return report(Some(AxiomViolation::Identity { g }));
        }
    }
    for g in 0..order {
        let has_inverse = (0..order).any(|h| m(g, h) == 0 && m(h, g) == 0);
        if !has_inverse {
            return report(Some(AxiomViolation::Inverse { g }));
        }
    }
    let mut seen = vec![usize::MAX; order];
    for row in 0..order {
        for b in 0..order {
            let v = m(row, b);
            if seen[v] == row {
                return report(Some(AxiomViolation::LatinRow { row }));
            }
            seen[v] = row;
        }
    }
    seen.fill(usize::MAX);
    for column in 0..order {
        for a in 0..order {
            let v = m(a, column);
            if seen[v] == column {
                return report(Some(AxiomViolation::LatinColumn { column }));
            }
            seen[v] = column;
        }
    }
    report(None)
}

/// A finite group stored as an explicit multiplication table.
#[derive(Clone)]
pub struct FiniteGroup {
    order: usize,
    mul: Vec<usize>,
    inv: Vec<usize>,
    labels: Vec<String>,
    family: FamilySpec,
    classes: ConjugacyPartition,
    factors: Option<Arc<(FiniteGroup, FiniteGroup)>>,
    /// One-line images for symmetric groups, used by the irrep constructor.
    perms: Option<Vec<Vec<u8>>>,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteGroup")
            .field("family", &self.family.to_string())
            .field("order", &self.order)
            .field("classes", &self.classes.sizes())
            .finish()
    }
}

impl PartialEq for FiniteGroup {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order && self.mul == other.mul && self.family == other.family
    }
}

/// Builds a group from a family descriptor.
pub fn construct_group(spec: &FamilySpec) -> Result<FiniteGroup> {
    FiniteGroup::from_spec(spec)
}

impl FiniteGroup {
    pub fn from_spec(spec: &FamilySpec) -> Result<Self> {
        match spec {
            FamilySpec::Cyclic(n) => Self::cyclic(*n),
            FamilySpec::Dihedral(n) => Self::dihedral(*n),
            FamilySpec::Symmetric(n) => Self::symmetric(*n),
            FamilySpec::Product(a, b) => {
                let a = Self::from_spec(a)?;
                let b = Self::from_spec(b)?;
                Self::product(&a, &b)
            }
            FamilySpec::Custom => {
                Err(Error::UnsupportedFamily("custom groups are built from a table, not a descriptor".into()))
            }
        }
    }

    /// Parses a compact descriptor such as `"dihedral(4)"` and builds the group.
    pub fn parse(spec: &str) -> Result<Self> {
        Self::from_spec(&FamilySpec::parse(spec)?)
    }

    /// The cyclic group ℤ_n, element `i` is the residue `i`.
    pub fn cyclic(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::UnsupportedFamily("cyclic(0)".into()));
        }
        if n > MAX_ORDER {
            return Err(Error::OrderOverflow(format!("cyclic({n}) exceeds order {MAX_ORDER}")));
        }
        let mul = (0..n * n).map(|i| (i / n + i % n) % n).collect();
        let labels = (0..n).map(|i| i.to_string()).collect();
        Ok(Self::assemble(n, mul, labels, FamilySpec::Cyclic(n)))
    }

    /// The dihedral group of order `2n`; index `a + n·b` is `r^a s^b`.
    pub fn dihedral(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::UnsupportedFamily(format!("dihedral({n}) needs n >= 3")));
        }
        if 2 * n > MAX_ORDER {
            return Err(Error::OrderOverflow(format!("dihedral({n})")));
        }
        let order = 2 * n;
        let mut mul = vec![0; order * order];
        for x in 0..order {
            let (a, b) = (x % n, x / n);
            for y in 0..order {
                let (c, d) = (y % n, y / n);
                // r^a s^b r^c s^d = r^(a ± c) s^(b+d)
                let rot = if b == 0 { (a + c) % n } else { (a + n - c) % n };
                mul[x * order + y] = rot + n * ((b + d) % 2);
            }
        }
        let labels = (0..order)
            .map(|x| {
                let (a, b) = (x % n, x / n);
                match (a, b) {
                    (0, 0) => "e".to_string(),
                    (0, 1) => "s".to_string(),
                    (a, 0) => format!("r{a}"),
                    (a, _) => format!("r{a}s"),
                }
            })
            .collect();
        Ok(Self::assemble(order, mul, labels, FamilySpec::Dihedral(n)))
    }

    /// The symmetric group on `n ≤ 6` points, permutations in lexicographic
    /// one-line order; `mul(p, q)` is the composition `i ↦ p(q(i))`.
    pub fn symmetric(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::UnsupportedFamily("symmetric(0)".into()));
        }
        if n > 6 {
            return Err(Error::OrderOverflow(format!("symmetric({n}) is larger than symmetric(6)")));
        }
        let perms = lexicographic_permutations(n);
        let index: HashMap<&[u8], usize> = perms.iter().enumerate().map(|(i, p)| (p.as_slice(), i)).collect();
        let order = perms.len();
        let mut mul = vec![0; order * order];
        let mut buf = vec![0u8; n];
        for (i, p) in perms.iter().enumerate() {
            for (j, q) in perms.iter().enumerate() {
                for k in 0..n {
                    buf[k] = p[q[k] as usize];
                }
                mul[i * order + j] = index[buf.as_slice()];
            }
        }
        let labels = perms.iter().map(|p| p.iter().map(|&v| char::from(b'1' + v)).collect()).collect();
        let mut g = Self::assemble(order, mul, labels, FamilySpec::Symmetric(n));
        g.perms = Some(perms);
        Ok(g)
    }

    /// Direct product `A × B`; index `a·|B| + b` is `(a, b)`.
    pub fn product(a: &FiniteGroup, b: &FiniteGroup) -> Result<Self> {
        let order = a
            .order
            .checked_mul(b.order)
            .filter(|&o| o <= MAX_ORDER)
            .ok_or_else(|| Error::OrderOverflow(format!("product of orders {} and {}", a.order, b.order)))?;
        let nb = b.order;
        let mut mul = vec![0; order * order];
        for x in 0..order {
            for y in 0..order {
                mul[x * order + y] = a.mul(x / nb, y / nb) * nb + b.mul(x % nb, y % nb);
            }
        }
        let labels = (0..order).map(|x| format!("({},{})", a.labels[x / nb], b.labels[x % nb])).collect();
        let family = FamilySpec::Product(Box::new(a.family.clone()), Box::new(b.family.clone()));
        let mut g = Self::assemble(order, mul, labels, family);
        g.factors = Some(Arc::new((a.clone(), b.clone())));
        Ok(g)
    }

    /// A group given by an explicit table. Index 0 must be the identity.
    /// The table is validated with [`verify_table`].
    pub fn from_table(order: usize, mul: Vec<usize>, labels: Option<Vec<String>>) -> Result<Self> {
        if order > MAX_ORDER {
            return Err(Error::OrderOverflow(format!("custom table of order {order}")));
        }
        let report = verify_table(order, &mul);
        if let Some(v) = report.violation {
            return Err(Error::InvalidTable(format!("{v:?}")));
        }
        let labels = match labels {
            Some(l) if l.len() == order => l,
            Some(l) => {
                return Err(Error::InvalidTable(format!("{} labels for order {order}", l.len())));
            }
            None => (0..order).map(|i| format!("g{i}")).collect(),
        };
        Ok(Self::assemble(order, mul, labels, FamilySpec::Custom))
    }

    /// Subgroup of `self` given by a closed element set, as a custom group.
    /// The identity must be in `elements`; it is re-indexed to 0.
    pub fn subgroup(&self, elements: &[usize]) -> Result<Self> {
        let mut elems: Vec<usize> = elements.to_vec();
        elems.sort_unstable();
        elems.dedup();
        if elems.first() != Some(&0) {
            return Err(Error::InvalidTable("subgroup must contain the identity".into()));
        }
        let pos: HashMap<usize, usize> = elems.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let k = elems.len();
        let mut mul = Vec::with_capacity(k * k);
        for &a in &elems {
            for &b in &elems {
                let p =
                    pos.get(&self.mul(a, b)).ok_or_else(|| Error::InvalidTable("element set is not closed".into()))?;
                mul.push(*p);
            }
        }
        let labels = elems.iter().map(|&e| self.labels[e].clone()).collect();
        Self::from_table(k, mul, Some(labels))
    }

    fn assemble(order: usize, mul: Vec<usize>, labels: Vec<String>, family: FamilySpec) -> Self {
        let mut inv = vec![0; order];
        for g in 0..order {
            inv[g] = (0..order).find(|&h| mul[g * order + h] == 0).expect("validated table has inverses");
        }
        let classes = compute_classes(order, &mul, &inv);
        FiniteGroup { order, mul, inv, labels, family, classes, factors: None, perms: None }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub const fn identity(&self) -> usize {
        0
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.order + b]
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }

    /// `g x g⁻¹`.
    pub fn conjugate(&self, g: usize, x: usize) -> usize {
        self.mul(self.mul(g, x), self.inv[g])
    }

    pub fn mul_table(&self) -> &[usize] {
        &self.mul
    }

    pub fn inverses(&self) -> &[usize] {
        &self.inv
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, g: usize) -> &str {
        &self.labels[g]
    }

    pub fn element_by_label(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn family(&self) -> &FamilySpec {
        &self.family
    }

    pub fn family_tag(&self) -> String {
        self.family.to_string()
    }

    pub fn classes(&self) -> &ConjugacyPartition {
        &self.classes
    }

    pub fn class_of(&self, g: usize) -> usize {
        self.classes.class_of[g]
    }

    pub fn is_abelian(&self) -> bool {
        self.classes.len() == self.order
    }

    pub fn factors(&self) -> Option<(&FiniteGroup, &FiniteGroup)> {
        self.factors.as_deref().map(|(a, b)| (a, b))
    }

    /// One-line images (0-based) when this is a symmetric group.
    pub fn permutations(&self) -> Option<&[Vec<u8>]> {
        self.perms.as_deref()
    }

    /// Order of the element `g`.
    pub fn element_order(&self, g: usize) -> usize {
        let mut x = g;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, g);
            k += 1;
        }
        k
    }

    /// Product of a sequence of elements, left to right.
    pub fn product_of(&self, elems: impl IntoIterator<Item = usize>) -> usize {
        elems.into_iter().fold(0, |acc, g| self.mul(acc, g))
    }

    pub fn verify_axioms(&self) -> AxiomReport {
        verify_table(self.order, &self.mul)
    }

    pub fn to_json(&self) -> GroupJson {
        GroupJson {
            order: self.order,
            family_tag: self.family_tag(),
            mul: self.mul.clone(),
            labels: self.labels.clone(),
        }
    }

    /// Rebuilds a group from its JSON form. Known families are rebuilt from
    /// the tag (so product factors and permutation data are restored) and the
    /// stored table must match exactly.
    pub fn from_json(json: &GroupJson) -> Result<Self> {
        if let Ok(spec) = FamilySpec::parse(&json.family_tag) {
            if spec != FamilySpec::Custom {
                let g = Self::from_spec(&spec)?;
                if g.order != json.order || g.mul != json.mul {
                    return Err(Error::InvalidTable(format!("table does not match family tag {}", json.family_tag)));
                }
                return Ok(g);
            }
        }
        Self::from_table(json.order, json.mul.clone(), Some(json.labels.clone()))
    }
}

/// Serialized group: row-major table plus labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupJson {
    pub order: usize,
    pub family_tag: String,
    pub mul: Vec<usize>,
    pub labels: Vec<String>,
}

/// Conjugacy classes ordered by (size, smallest element).
pub fn conjugacy_classes(g: &FiniteGroup) -> ConjugacyPartition {
    g.classes.clone()
}

fn compute_classes(order: usize, mul: &[usize], inv: &[usize]) -> ConjugacyPartition {
    let mut class_of = vec![usize::MAX; order];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for x in 0..order {
        if class_of[x] != usize::MAX {
            continue;
        }
        let id = classes.len();
        let mut class = Vec::new();
        for g in 0..order {
            let y = mul[mul[g * order + x] * order + inv[g]];
            if class_of[y] == usize::MAX {
                class_of[y] = id;
                class.push(y);
            }
        }
        class.sort_unstable();
        classes.push(class);
    }
    classes.sort_by_key(|c| (c.len(), c[0]));
    for (i, c) in classes.iter().enumerate() {
        for &x in c {
            class_of[x] = i;
        }
    }
    ConjugacyPartition { classes, class_of }
}

fn lexicographic_permutations(n: usize) -> Vec<Vec<u8>> {
    let mut current: Vec<u8> = (0..n as u8).collect();
    let mut out = vec![current.clone()];
    // Standard next-permutation walk.
    while let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| current[i] < current[i + 1]) {
        let j = (i + 1..n).rev().find(|&j| current[j] > current[i]).unwrap();
        current.swap(i, j);
        current[i + 1..].reverse();
        out.push(current.clone());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_group() {
        let g = FiniteGroup::cyclic(1).unwrap();
        assert_eq!(g.order(), 1);
        assert_eq!(g.classes().len(), 1);
        assert!(g.verify_axioms().is_valid());
    }

    #[test]
    fn symmetric_three() {
        let g = FiniteGroup::symmetric(3).unwrap();
        assert_eq!(g.order(), 6);
        assert_eq!(g.classes().sizes(), vec![1, 2, 3]);
        assert_eq!(g.label(0), "123");
        assert_eq!(g.label(5), "321");
    }

    #[test]
    fn klein_four_is_exponent_two() {
        let g = FiniteGroup::parse("product(cyclic(2),cyclic(2))").unwrap();
        assert_eq!(g.order(), 4);
        assert!((0..4).all(|x| g.inv(x) == x));
    }

    #[test]
    fn dihedral_four_has_five_classes() {
        let g = FiniteGroup::dihedral(4).unwrap();
        assert_eq!(g.classes().len(), 5);
        assert!(g.verify_axioms().is_valid());
    }

    #[test]
    fn rejects_bad_families() {
        assert!(matches!(FiniteGroup::symmetric(7), Err(Error::OrderOverflow(_))));
        assert!(matches!(FiniteGroup::dihedral(2), Err(Error::UnsupportedFamily(_))));
        assert!(FamilySpec::parse("quaternion(8)").is_err());
        assert!(FamilySpec::parse("cyclic(3) junk").is_err());
    }

    #[test]
    fn spec_round_trip() {
        for s in ["cyclic(5)", "dihedral(6)", "symmetric(4)", "product(cyclic(2),product(symmetric(3),dihedral(3)))"] {
            assert_eq!(FamilySpec::parse(s).unwrap().to_string(), s);
        }
        assert_eq!(FamilySpec::parse("Z(3)").unwrap(), FamilySpec::Cyclic(3));
    }

    #[test]
    fn corrupted_entry_reports_triple() {
        let g = FiniteGroup::symmetric(4).unwrap();
        let mut mul = g.mul_table().to_vec();
        mul[5 * 24 + 7] = (mul[5 * 24 + 7] + 1) % 24;
        let report = verify_table(24, &mul);
        assert!(matches!(report.violation, Some(AxiomViolation::Associativity { .. })), "{report}");
    }

    #[test]
    fn large_orders_are_sampled() {
        let g = FiniteGroup::product(&FiniteGroup::symmetric(5).unwrap(), &FiniteGroup::cyclic(2).unwrap()).unwrap();
        let r = g.verify_axioms();
        assert!(r.is_valid());
        assert!(!r.exhaustive);
        assert!(FiniteGroup::cyclic(12).unwrap().verify_axioms().exhaustive);
    }

    #[test]
    fn json_round_trip() {
        let g = FiniteGroup::parse("product(dihedral(3),cyclic(2))").unwrap();
        let text = serde_json::to_string(&g.to_json()).unwrap();
        let back = FiniteGroup::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, g);
        assert!(back.factors().is_some());
    }

    #[test]
    fn alternating_five_as_subgroup() {
        let s5 = FiniteGroup::symmetric(5).unwrap();
        let perms = s5.permutations().unwrap();
        let even: Vec<usize> = (0..120)
            .filter(|&i| {
                let p = &perms[i];
                let inversions =
                    (0..5).flat_map(|a| (a + 1..5).map(move |b| (a, b))).filter(|&(a, b)| p[a] > p[b]).count();
                inversions % 2 == 0
            })
            .collect();
        let a5 = s5.subgroup(&even).unwrap();
        assert_eq!(a5.order(), 60);
        assert_eq!(a5.classes().sizes(), vec![1, 12, 12, 15, 20]);
    }
}
