//! Weighted graded-commutative polynomial algebras.
//!
//! An algebra is generated by even generators (polynomial variables of
//! positive weight, cochain degree 0) and odd generators (exterior variables
//! of cochain degree 1 and arbitrary integer weight). Every element splits
//! into finite-dimensional `(degree, weight)` blocks, which is what makes
//! the cohomology computations in the rest of the crate exact.
//!
//! Generators are globally ordered: evens in declaration order, then odds in
//! declaration order. Odd factors inside a [`Monomial`] are always stored in
//! that order and products pick up the Koszul sign needed to restore it.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::Arc;

use num::{BigInt, BigRational, One, Signed, Zero};
use thiserror::Error;

/// Exact rational coefficient. `BigRational` keeps itself reduced with a
/// positive denominator.
pub type Scalar = BigRational;

pub fn int(n: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Scalar {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Formats a rational as `p` or `p/q`.
pub fn fmt_scalar(c: &Scalar) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

/// Renders `Σ c_i · f_i` where each `f_i` is a list of factor strings, e.g.
/// `x^2*e1 - 1/2*y + 3`. Terms are printed in the given order.
pub fn fmt_linear_combination<I>(terms: I) -> String
where
    I: IntoIterator<Item = (Scalar, Vec<String>)>,
{
    let mut out = String::new();
    for (coeff, factors) in terms {
        if coeff.is_zero() {
            continue;
        }
        let negative = coeff.is_negative();
        let magnitude = coeff.abs();
        if out.is_empty() {
            if negative {
                out.push('-');
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        let mut parts = Vec::new();
        if !magnitude.is_one() || factors.is_empty() {
            parts.push(fmt_scalar(&magnitude));
        }
        parts.extend(factors);
        out.push_str(&parts.join("*"));
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("duplicate generator name `{0}`")]
    DuplicateGenerator(String),
    #[error("even generator `{0}` must have weight >= 1")]
    NonPositiveWeight(String),
    #[error("at most 64 odd generators are supported, got {0}")]
    TooManyOdd(usize),
    #[error("operands live over different generator sets")]
    GeneratorMismatch,
    #[error("image of `{generator}` is not homogeneous of cochain degree {expected}")]
    InhomogeneousImage { generator: String, expected: i32 },
    #[error("derivation degree {0} is below -1")]
    DegreeOutOfRange(i32),
    #[error("expected {expected} generator images, got {found}")]
    ImageCount { expected: usize, found: usize },
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OddOrigin {
    FiberDual,
    VerticalForm,
    LeafwiseForm,
}

/// Global index of a generator: evens come first, then odds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gen(pub usize);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvenGenerator {
    pub name: String,
    pub weight: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OddGenerator {
    pub name: String,
    pub weight: i32,
    pub origin: OddOrigin,
}

#[derive(Debug, PartialEq, Eq)]
pub struct GeneratorSet {
    even: Vec<EvenGenerator>,
    odd: Vec<OddGenerator>,
    lookup: HashMap<String, Gen>,
}

impl GeneratorSet {
    pub fn new(
        even: Vec<EvenGenerator>,
        odd: Vec<OddGenerator>,
    ) -> Result<Arc<Self>, AlgebraError> {
        if odd.len() > 64 {
            return Err(AlgebraError::TooManyOdd(odd.len()));
        }
        let mut lookup = HashMap::new();
        for (i, g) in even.iter().enumerate() {
            if g.weight == 0 {
                return Err(AlgebraError::NonPositiveWeight(g.name.clone()));
            }
            if lookup.insert(g.name.clone(), Gen(i)).is_some() {
                return Err(AlgebraError::DuplicateGenerator(g.name.clone()));
            }
        }
        for (j, g) in odd.iter().enumerate() {
            if lookup.insert(g.name.clone(), Gen(even.len() + j)).is_some() {
                return Err(AlgebraError::DuplicateGenerator(g.name.clone()));
            }
        }
        Ok(Arc::new(GeneratorSet { even, odd, lookup }))
    }

    /// Shorthand used by presets and tests.
    pub fn from_names(even: &[(&str, u32)], odd: &[(&str, i32)]) -> Result<Arc<Self>, AlgebraError> {
        Self::new(
            even.iter()
                .map(|(n, w)| EvenGenerator { name: n.to_string(), weight: *w })
                .collect(),
            odd.iter()
                .map(|(n, w)| OddGenerator {
                    name: n.to_string(),
                    weight: *w,
                    origin: OddOrigin::FiberDual,
                })
                .collect(),
        )
    }

    pub fn n_even(&self) -> usize {
        self.even.len()
    }

    pub fn n_odd(&self) -> usize {
        self.odd.len()
    }

    pub fn len(&self) -> usize {
        self.even.len() + self.odd.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn evens(&self) -> &[EvenGenerator] {
        &self.even
    }

    pub fn odds(&self) -> &[OddGenerator] {
        &self.odd
    }

    pub fn all(&self) -> impl Iterator<Item = Gen> {
        (0..self.len()).map(Gen)
    }

    pub fn even_gen(&self, i: usize) -> Gen {
        Gen(i)
    }

    pub fn odd_gen(&self, j: usize) -> Gen {
        Gen(self.even.len() + j)
    }

    pub fn lookup(&self, name: &str) -> Option<Gen> {
        self.lookup.get(name).copied()
    }

    pub fn is_odd(&self, g: Gen) -> bool {
        g.0 >= self.even.len()
    }

    /// Index among odd generators, if `g` is odd.
    pub fn odd_index(&self, g: Gen) -> Option<usize> {
        g.0.checked_sub(self.even.len())
    }

    pub fn degree(&self, g: Gen) -> usize {
        usize::from(self.is_odd(g))
    }

    pub fn weight(&self, g: Gen) -> i32 {
        match self.odd_index(g) {
            Some(j) => self.odd[j].weight,
            None => self.even[g.0].weight as i32,
        }
    }

    pub fn name(&self, g: Gen) -> &str {
        match self.odd_index(g) {
            Some(j) => &self.odd[j].name,
            None => &self.even[g.0].name,
        }
    }

    pub fn origin(&self, g: Gen) -> Option<OddOrigin> {
        self.odd_index(g).map(|j| self.odd[j].origin)
    }

    /// The monomial consisting of the single generator `g`.
    pub fn generator_monomial(&self, g: Gen) -> Monomial {
        let mut m = Monomial::one(self.n_even());
        match self.odd_index(g) {
            Some(j) => m.odd = 1 << j,
            None => m.exps[g.0] = 1,
        }
        m
    }
}

/// `x^α ξ^S`: an exponent vector on the even generators and a set of odd
/// generators kept in global order.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial {
    exps: Vec<u32>,
    odd: u64,
}

impl Monomial {
    pub fn one(n_even: usize) -> Self {
        Monomial { exps: vec![0; n_even], odd: 0 }
    }

    pub fn new(exps: Vec<u32>, odd: u64) -> Self {
        Monomial { exps, odd }
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exps
    }

    pub fn exponent(&self, i: usize) -> u32 {
        self.exps[i]
    }

    pub fn odd_bits(&self) -> u64 {
        self.odd
    }

    pub fn has_odd(&self, j: usize) -> bool {
        self.odd >> j & 1 == 1
    }

    pub fn odd_indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..64).filter(move |j| self.odd >> j & 1 == 1)
    }

    /// Cochain degree: number of odd factors.
    pub fn degree(&self) -> usize {
        self.odd.count_ones() as usize
    }

    pub fn poly_degree(&self) -> u32 {
        self.exps.iter().sum()
    }

    pub fn weight(&self, gens: &GeneratorSet) -> i32 {
        let even: i32 = self
            .exps
            .iter()
            .zip(&gens.even)
            .map(|(e, g)| *e as i32 * g.weight as i32)
            .sum();
        let odd: i32 = self.odd_indices().map(|j| gens.odd[j].weight).sum();
        even + odd
    }

    pub fn is_one(&self) -> bool {
        self.odd == 0 && self.exps.iter().all(|e| *e == 0)
    }

    /// Product `self · other`. Returns `None` when an odd generator repeats,
    /// otherwise the product and whether the Koszul sign is negative.
    pub fn mul(&self, other: &Monomial) -> Option<(Monomial, bool)> {
        if self.odd & other.odd != 0 {
            return None;
        }
        let mut swaps = 0u32;
        let mut rest = other.odd;
        while rest != 0 {
            let j = rest.trailing_zeros();
            swaps += (self.odd >> j >> 1).count_ones();
            rest &= rest - 1;
        }
        let exps = self.exps.iter().zip(&other.exps).map(|(a, b)| a + b).collect();
        Some((Monomial { exps, odd: self.odd | other.odd }, swaps % 2 == 1))
    }

    fn odd_list(&self) -> Vec<usize> {
        self.odd_indices().collect()
    }

    pub fn factors(&self, gens: &GeneratorSet) -> Vec<String> {
        let mut out = Vec::new();
        for (i, e) in self.exps.iter().enumerate() {
            match e {
                0 => {}
                1 => out.push(gens.even[i].name.clone()),
                _ => out.push(format!("{}^{}", gens.even[i].name, e)),
            }
        }
        for j in self.odd_indices() {
            out.push(gens.odd[j].name.clone());
        }
        out
    }
}

/// Graded lexicographic order: total degree first, then the exponent vector,
/// then the ordered list of odd factors.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        let total = |m: &Monomial| m.poly_degree() + m.degree() as u32;
        total(self)
            .cmp(&total(other))
            .then_with(|| self.exps.cmp(&other.exps))
            .then_with(|| self.odd_list().cmp(&other.odd_list()))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn same_set(a: &Arc<GeneratorSet>, b: &Arc<GeneratorSet>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// A finite linear combination of monomials with nonzero rational
/// coefficients.
#[derive(Clone, Debug)]
pub struct GradedElement {
    gens: Arc<GeneratorSet>,
    terms: BTreeMap<Monomial, Scalar>,
}

impl PartialEq for GradedElement {
    fn eq(&self, other: &Self) -> bool {
        same_set(&self.gens, &other.gens) && self.terms == other.terms
    }
}

impl Eq for GradedElement {}

impl GradedElement {
    pub fn zero(gens: &Arc<GeneratorSet>) -> Self {
        GradedElement { gens: gens.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(gens: &Arc<GeneratorSet>, c: Scalar) -> Self {
        Self::monomial(gens, Monomial::one(gens.n_even()), c)
    }

    pub fn one(gens: &Arc<GeneratorSet>) -> Self {
        Self::constant(gens, Scalar::one())
    }

    pub fn generator(gens: &Arc<GeneratorSet>, g: Gen) -> Self {
        Self::monomial(gens, gens.generator_monomial(g), Scalar::one())
    }

    pub fn monomial(gens: &Arc<GeneratorSet>, m: Monomial, c: Scalar) -> Self {
        let mut e = Self::zero(gens);
        e.add_term(m, c);
        e
    }

    pub fn from_terms<I>(gens: &Arc<GeneratorSet>, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, Scalar)>,
    {
        let mut e = Self::zero(gens);
        for (m, c) in terms {
            e.add_term(m, c);
        }
        e
    }

    pub fn gens(&self) -> &Arc<GeneratorSet> {
        &self.gens
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Scalar> {
        &self.terms
    }

    pub fn into_terms(self) -> BTreeMap<Monomial, Scalar> {
        self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return Self::zero(&self.gens);
        }
        GradedElement {
            gens: self.gens.clone(),
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    /// Set of cochain degrees occurring in the element.
    pub fn degrees(&self) -> BTreeSet<usize> {
        self.terms.keys().map(Monomial::degree).collect()
    }

    pub fn weights(&self) -> BTreeSet<i32> {
        self.terms.keys().map(|m| m.weight(&self.gens)).collect()
    }

    /// True when every monomial has cochain degree `d` (vacuous for zero).
    pub fn is_homogeneous_of(&self, d: i32) -> bool {
        self.terms.keys().all(|m| m.degree() as i32 == d)
    }

    pub fn is_weight_homogeneous_of(&self, w: i32) -> bool {
        self.terms.keys().all(|m| m.weight(&self.gens) == w)
    }

    pub fn degree_component(&self, d: usize) -> Self {
        self.filter(|m| m.degree() == d)
    }

    pub fn weight_component(&self, w: i32) -> Self {
        let gens = self.gens.clone();
        self.filter(|m| m.weight(&gens) == w)
    }

    pub fn filter(&self, keep: impl Fn(&Monomial) -> bool) -> Self {
        GradedElement {
            gens: self.gens.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Graded-commutative product; rejects operands over different
    /// generator sets.
    pub fn multiply(&self, other: &Self) -> Result<Self, AlgebraError> {
        if !same_set(&self.gens, &other.gens) {
            return Err(AlgebraError::GeneratorMismatch);
        }
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let mut out = Self::zero(&self.gens);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                if let Some((m, neg)) = m1.mul(m2) {
                    let c = c1 * c2;
                    out.add_term(m, if neg { -c } else { c });
                }
            }
        }
        out
    }

    /// `m · self`.
    pub fn left_mul_monomial(&self, m: &Monomial, c: &Scalar) -> Self {
        let mut out = Self::zero(&self.gens);
        for (m2, c2) in &self.terms {
            if let Some((p, neg)) = m.mul(m2) {
                let v = c * c2;
                out.add_term(p, if neg { -v } else { v });
            }
        }
        out
    }

    /// Relabels generators into another generator set. `map[g]` gives the
    /// target of source generator `g`; parity must be preserved and odd
    /// generators must map injectively. Reordering odd factors contributes
    /// the permutation sign.
    pub fn map_generators(&self, target: &Arc<GeneratorSet>, map: &[Gen]) -> Self {
        let mut out = Self::zero(target);
        for (m, c) in &self.terms {
            let mut exps = vec![0u32; target.n_even()];
            for (i, e) in m.exps.iter().enumerate() {
                if *e > 0 {
                    exps[map[i].0] += e;
                }
            }
            let images: Vec<usize> = m
                .odd_indices()
                .map(|j| {
                    target
                        .odd_index(map[self.gens.n_even() + j])
                        .expect("odd generator mapped to an even one")
                })
                .collect();
            let mut inversions = 0;
            for a in 0..images.len() {
                for b in a + 1..images.len() {
                    if images[a] > images[b] {
                        inversions += 1;
                    }
                }
            }
            let odd = images.iter().fold(0u64, |acc, j| acc | 1 << j);
            let v = if inversions % 2 == 1 { -c.clone() } else { c.clone() };
            out.add_term(Monomial { exps, odd }, v);
        }
        out
    }

    /// Name-based transport: every generator occurring in `self` must exist
    /// under the same name and parity in `target`.
    pub fn transport(&self, target: &Arc<GeneratorSet>) -> Result<Self, AlgebraError> {
        let map = name_map(&self.gens, target)?;
        Ok(self.map_generators(target, &map))
    }
}

/// Maps generators of `source` to the equally named generators of `target`.
/// Generators absent from `target` map to `Gen(usize::MAX)`; callers must
/// only transport elements that avoid them.
pub fn name_map(source: &GeneratorSet, target: &GeneratorSet) -> Result<Vec<Gen>, AlgebraError> {
    source
        .all()
        .map(|g| match target.lookup(source.name(g)) {
            Some(t) if target.is_odd(t) == source.is_odd(g) => Ok(t),
            Some(_) => Err(AlgebraError::UnknownGenerator(source.name(g).to_string())),
            None => Ok(Gen(usize::MAX)),
        })
        .collect()
}

impl fmt::Display for GradedElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = fmt_linear_combination(
            self.terms
                .iter()
                .rev()
                .map(|(m, c)| (c.clone(), m.factors(&self.gens))),
        );
        f.write_str(&s)
    }
}

impl AddAssign<&GradedElement> for GradedElement {
    fn add_assign(&mut self, rhs: &GradedElement) {
        assert!(same_set(&self.gens, &rhs.gens), "generator set mismatch");
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl SubAssign<&GradedElement> for GradedElement {
    fn sub_assign(&mut self, rhs: &GradedElement) {
        assert!(same_set(&self.gens, &rhs.gens), "generator set mismatch");
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c.clone());
        }
    }
}

impl Add for &GradedElement {
    type Output = GradedElement;
    fn add(self, rhs: &GradedElement) -> GradedElement {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &GradedElement {
    type Output = GradedElement;
    fn sub(self, rhs: &GradedElement) -> GradedElement {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Neg for &GradedElement {
    type Output = GradedElement;
    fn neg(self) -> GradedElement {
        self.scale(&-Scalar::one())
    }
}

/// Panics on mismatched generator sets; use [`GradedElement::multiply`] for
/// the checked variant.
impl Mul for &GradedElement {
    type Output = GradedElement;
    fn mul(self, rhs: &GradedElement) -> GradedElement {
        self.multiply(rhs).expect("generator set mismatch")
    }
}

/// Every monomial of cochain degree `degree` and weight `weight`, ascending
/// in the global order.
pub fn basis_enumerate(gens: &GeneratorSet, degree: i32, weight: i32) -> Vec<Monomial> {
    let mut out = Vec::new();
    if degree < 0 || degree as usize > gens.n_odd() {
        return out;
    }
    let mut subsets = Vec::new();
    odd_subsets(gens.n_odd(), degree as usize, 0, 0, &mut subsets);
    for odd in subsets {
        let odd_weight: i32 = (0..gens.n_odd())
            .filter(|j| odd >> j & 1 == 1)
            .map(|j| gens.odd[j].weight)
            .sum();
        let rest = weight - odd_weight;
        if rest < 0 {
            continue;
        }
        let mut exps = vec![0u32; gens.n_even()];
        even_exponents(gens, 0, rest as u32, &mut exps, &mut |e| {
            out.push(Monomial { exps: e.to_vec(), odd });
        });
    }
    out.sort();
    out
}

fn odd_subsets(n: usize, k: usize, start: usize, acc: u64, out: &mut Vec<u64>) {
    if k == 0 {
        out.push(acc);
        return;
    }
    for j in start..n {
        if n - j < k {
            break;
        }
        odd_subsets(n, k - 1, j + 1, acc | 1 << j, out);
    }
}

fn even_exponents(
    gens: &GeneratorSet,
    i: usize,
    remaining: u32,
    exps: &mut Vec<u32>,
    emit: &mut dyn FnMut(&[u32]),
) {
    if i == gens.n_even() {
        if remaining == 0 {
            emit(exps);
        }
        return;
    }
    let w = gens.even[i].weight;
    let mut e = 0;
    while e * w <= remaining {
        exps[i] = e;
        even_exponents(gens, i + 1, remaining - e * w, exps, emit);
        e += 1;
    }
    exps[i] = 0;
}

/// `monomial · ∂/∂generator`: the basis derivation sending `gen` to `mono`
/// and every other generator to zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DerivationCell {
    pub gen: Gen,
    pub mono: Monomial,
}

impl DerivationCell {
    /// Cochain degree of the derivation (`deg mono − deg gen`).
    pub fn degree(&self, gens: &GeneratorSet) -> i32 {
        self.mono.degree() as i32 - gens.degree(self.gen) as i32
    }

    pub fn weight(&self, gens: &GeneratorSet) -> i32 {
        self.mono.weight(gens) - gens.weight(self.gen)
    }
}

/// All basis derivations `m ∂/∂g` of the given degree and weight, where the
/// monomials live over `coeffs` and `g` ranges over `targets`.
pub fn derivation_cells(
    coeffs: &GeneratorSet,
    targets: &GeneratorSet,
    degree: i32,
    weight: i32,
) -> Vec<DerivationCell> {
    let mut out = Vec::new();
    for g in targets.all() {
        let d = targets.degree(g) as i32 + degree;
        let w = targets.weight(g) + weight;
        for mono in basis_enumerate(coeffs, d, w) {
            out.push(DerivationCell { gen: g, mono });
        }
    }
    out
}

fn parity_sign(negative: bool, c: &Scalar) -> Scalar {
    if negative {
        -c.clone()
    } else {
        c.clone()
    }
}

/// Graded derivation of a given cochain degree, determined by the images of
/// the generators and extended by the Leibniz rule
/// `D(uv) = D(u)v + (−1)^{|D||u|} u D(v)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedDerivation {
    gens: Arc<GeneratorSet>,
    degree: i32,
    images: Vec<GradedElement>,
}

impl GradedDerivation {
    pub fn new(
        gens: &Arc<GeneratorSet>,
        degree: i32,
        images: Vec<GradedElement>,
    ) -> Result<Self, AlgebraError> {
        if degree < -1 {
            return Err(AlgebraError::DegreeOutOfRange(degree));
        }
        if images.len() != gens.len() {
            return Err(AlgebraError::ImageCount { expected: gens.len(), found: images.len() });
        }
        for (g, img) in gens.all().zip(&images) {
            if !same_set(img.gens(), gens) {
                return Err(AlgebraError::GeneratorMismatch);
            }
            let expected = gens.degree(g) as i32 + degree;
            if !img.is_homogeneous_of(expected) {
                return Err(AlgebraError::InhomogeneousImage {
                    generator: gens.name(g).to_string(),
                    expected,
                });
            }
        }
        Ok(GradedDerivation { gens: gens.clone(), degree, images })
    }

    pub fn zero(gens: &Arc<GeneratorSet>, degree: i32) -> Self {
        GradedDerivation {
            gens: gens.clone(),
            degree,
            images: gens.all().map(|_| GradedElement::zero(gens)).collect(),
        }
    }

    /// Builds a derivation from `(generator, image)` pairs; unspecified
    /// generators map to zero.
    pub fn from_images<I>(gens: &Arc<GeneratorSet>, degree: i32, images: I) -> Result<Self, AlgebraError>
    where
        I: IntoIterator<Item = (Gen, GradedElement)>,
    {
        let mut all: Vec<GradedElement> = gens.all().map(|_| GradedElement::zero(gens)).collect();
        for (g, img) in images {
            all[g.0] = img;
        }
        Self::new(gens, degree, all)
    }

    /// `∂/∂g` for an even generator, or the contraction `∂/∂ξ` for an odd one.
    pub fn partial(gens: &Arc<GeneratorSet>, g: Gen) -> Self {
        let degree = -(gens.degree(g) as i32);
        Self::from_images(gens, degree, [(g, GradedElement::one(gens))])
            .expect("partial derivative is homogeneous")
    }

    pub fn from_cells<I>(gens: &Arc<GeneratorSet>, degree: i32, cells: I) -> Result<Self, AlgebraError>
    where
        I: IntoIterator<Item = (DerivationCell, Scalar)>,
    {
        let mut all: Vec<GradedElement> = gens.all().map(|_| GradedElement::zero(gens)).collect();
        for (cell, c) in cells {
            all[cell.gen.0].add_term(cell.mono, c);
        }
        Self::new(gens, degree, all)
    }

    pub fn gens(&self) -> &Arc<GeneratorSet> {
        &self.gens
    }

    pub fn degree(&self) -> i32 {
        self.degree
    }

    pub fn image(&self, g: Gen) -> &GradedElement {
        &self.images[g.0]
    }

    pub fn images(&self) -> &[GradedElement] {
        &self.images
    }

    pub fn is_zero(&self) -> bool {
        self.images.iter().all(GradedElement::is_zero)
    }

    /// Weight shifts `weight(D g) − weight(g)` over all nonzero terms.
    pub fn weight_shifts(&self) -> BTreeSet<i32> {
        let mut out = BTreeSet::new();
        for g in self.gens.all() {
            for w in self.images[g.0].weights() {
                out.insert(w - self.gens.weight(g));
            }
        }
        out
    }

    /// True when the derivation maps each weight-`w` block into weight `w + shift`.
    pub fn is_weight_homogeneous_of(&self, shift: i32) -> bool {
        self.weight_shifts().iter().all(|s| *s == shift)
    }

    /// Decomposition into basis derivations.
    pub fn cells(&self) -> Vec<(DerivationCell, Scalar)> {
        let mut out = Vec::new();
        for g in self.gens.all() {
            for (m, c) in self.images[g.0].terms() {
                out.push((DerivationCell { gen: g, mono: m.clone() }, c.clone()));
            }
        }
        out
    }

    pub fn apply(&self, a: &GradedElement) -> Result<GradedElement, AlgebraError> {
        if !same_set(&self.gens, a.gens()) {
            return Err(AlgebraError::GeneratorMismatch);
        }
        Ok(self.apply_unchecked(a))
    }

    pub(crate) fn apply_unchecked(&self, a: &GradedElement) -> GradedElement {
        let mut out = GradedElement::zero(&self.gens);
        for (m, c) in a.terms() {
            self.apply_monomial_into(m, c, &mut out);
        }
        out
    }

    /// Adds `c · D(m)` to `out`.
    pub(crate) fn apply_monomial_into(&self, m: &Monomial, c: &Scalar, out: &mut GradedElement) {
        let odd_op = self.degree.rem_euclid(2) == 1;
        let n_even = self.gens.n_even();
        for (i, &e) in m.exps.iter().enumerate() {
            if e == 0 || self.images[i].is_zero() {
                continue;
            }
            let mut rest = m.clone();
            rest.exps[i] -= 1;
            let factor = c * Scalar::from_integer(BigInt::from(e));
            for (mi, ci) in self.images[i].terms() {
                if let Some((p, neg)) = mi.mul(&rest) {
                    out.add_term(p, parity_sign(neg, &(ci * &factor)));
                }
            }
        }
        let mut prefix = Monomial { exps: m.exps.clone(), odd: 0 };
        for (pos, j) in m.odd_indices().enumerate() {
            let bit = 1u64 << j;
            let img = &self.images[n_even + j];
            if !img.is_zero() {
                let suffix = Monomial { exps: vec![0; n_even], odd: m.odd & !((bit << 1) - 1) };
                let sign_neg = odd_op && pos % 2 == 1;
                for (mi, ci) in img.terms() {
                    let Some((p1, n1)) = prefix.mul(mi) else { continue };
                    let Some((p2, n2)) = p1.mul(&suffix) else { continue };
                    out.add_term(p2, parity_sign(n1 ^ n2 ^ sign_neg, &(ci * c)));
                }
            }
            prefix.odd |= bit;
        }
    }

    /// Graded commutator `[D1, D2] = D1∘D2 − (−1)^{|D1||D2|} D2∘D1`.
    pub fn commutator(&self, other: &Self) -> Result<Self, AlgebraError> {
        if !same_set(&self.gens, &other.gens) {
            return Err(AlgebraError::GeneratorMismatch);
        }
        let sign_neg = (self.degree * other.degree).rem_euclid(2) == 0;
        let degree = self.degree + other.degree;
        let images = self
            .gens
            .all()
            .map(|g| {
                let a = self.apply_unchecked(other.image(g));
                let b = other.apply_unchecked(self.image(g));
                if sign_neg {
                    &a - &b
                } else {
                    &a + &b
                }
            })
            .collect::<Vec<_>>();
        if degree < -1 {
            // Two contractions commute to zero on generators.
            debug_assert!(images.iter().all(GradedElement::is_zero));
            return Ok(GradedDerivation { gens: self.gens.clone(), degree, images });
        }
        GradedDerivation::new(&self.gens, degree, images)
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        GradedDerivation {
            gens: self.gens.clone(),
            degree: self.degree,
            images: self.images.iter().map(|e| e.scale(c)).collect(),
        }
    }

    /// Sum of two derivations of equal degree.
    pub fn try_add(&self, other: &Self) -> Result<Self, AlgebraError> {
        if !same_set(&self.gens, &other.gens) {
            return Err(AlgebraError::GeneratorMismatch);
        }
        if self.degree != other.degree {
            return Err(AlgebraError::DegreeOutOfRange(other.degree));
        }
        Ok(GradedDerivation {
            gens: self.gens.clone(),
            degree: self.degree,
            images: self.images.iter().zip(&other.images).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.try_add(&other.scale(&-Scalar::one()))
    }
}

impl fmt::Display for GradedDerivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for g in self.gens.all() {
            let img = &self.images[g.0];
            if img.is_zero() {
                continue;
            }
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            write!(f, "{} ↦ {}", self.gens.name(g), img)?;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// Applies an operator of the given parity that satisfies the relative
/// Leibniz rule `Z(uv) = Z(u)·φ(v) + (−1)^{|Z||u|} φ(u)·Z(v)` along an algebra
/// map `φ` given on monomials by `pull`. `images[g]` is `Z(g)` over the
/// target algebra.
pub(crate) fn relative_leibniz(
    source: &GeneratorSet,
    target: &Arc<GeneratorSet>,
    odd_op: bool,
    images: &[GradedElement],
    pull: &dyn Fn(&Monomial) -> GradedElement,
    a: &GradedElement,
) -> GradedElement {
    let mut out = GradedElement::zero(target);
    let n_even = source.n_even();
    for (m, c) in a.terms() {
        for (i, &e) in m.exps.iter().enumerate() {
            if e == 0 || images[i].is_zero() {
                continue;
            }
            let mut rest = m.clone();
            rest.exps[i] -= 1;
            let term = &images[i] * &pull(&rest);
            out += &term.scale(&(c * Scalar::from_integer(BigInt::from(e))));
        }
        let mut prefix = Monomial { exps: m.exps.clone(), odd: 0 };
        for (pos, j) in m.odd_indices().enumerate() {
            let bit = 1u64 << j;
            let img = &images[n_even + j];
            if !img.is_zero() {
                let suffix = Monomial { exps: vec![0; n_even], odd: m.odd & !((bit << 1) - 1) };
                let term = &(&pull(&prefix) * img) * &pull(&suffix);
                let neg = odd_op && pos % 2 == 1;
                out += &term.scale(&parity_sign(neg, c));
            }
            prefix.odd |= bit;
        }
    }
    out
}
