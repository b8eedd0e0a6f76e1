//! The deformation complex `C_def(A)` in its two pictures.
//!
//! In the derivation picture a degree-`k` cochain is a graded derivation of
//! `C(A)` of degree `k ≥ −1`, the differential is `δ = [d_A, −]` and the
//! bracket is the graded commutator. In the multiderivation picture it is a
//! `(k+1)`-linear antisymmetric bracket-like operation `c` on sections with a
//! symbol `s_c : ∧^k A → TM`. The dictionary is
//!
//! ```text
//! D_c(x^a) =  Σ_{|I|=k}   s^a_I ξ^I
//! D_c(ξ^m) = −Σ_{|I|=k+1} c^m_I ξ^I        (I increasing)
//! ```
//!
//! which sends `d_A` itself to the pair (bracket, anchor).

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num::One;
use thiserror::Error;

use crate::algebroid::{AlgebroidError, AlgebroidPresentation, DeRhamComplex};
use crate::cohomology::CochainComplex;
use crate::graded::{
    derivation_cells, ratio, AlgebraError, DerivationCell, GeneratorSet, GradedDerivation, GradedElement,
    Monomial, Scalar,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DeformationError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Algebroid(#[from] AlgebroidError),
    #[error("operands live over different generator sets")]
    Mismatch,
    #[error("degree -1 cochains have no multiderivation picture")]
    DegreeMinusOne,
    #[error("table entry {indices:?} -> {target} is not antisymmetric")]
    NonAntisymmetric { indices: Vec<usize>, target: usize },
    #[error("table entry {0:?} repeats an index but is nonzero")]
    RepeatedIndex(Vec<usize>),
    #[error("expected a multiderivation of arity {expected}, got {found}")]
    WrongArity { expected: usize, found: usize },
    #[error("index out of range in {0:?}")]
    IndexOutOfRange(Vec<usize>),
    #[error("table entries must be polynomials in the base coordinates")]
    NotPolynomial,
}

/// A cochain of `C_def(A)` in the derivation picture.
#[derive(Clone, Debug, PartialEq)]
pub struct DefCochain {
    derivation: GradedDerivation,
}

impl DefCochain {
    pub fn new(derivation: GradedDerivation) -> Self {
        DefCochain { derivation }
    }

    pub fn zero(gens: &Arc<GeneratorSet>, degree: i32) -> Self {
        DefCochain { derivation: GradedDerivation::zero(gens, degree) }
    }

    pub fn from_cells<I>(gens: &Arc<GeneratorSet>, degree: i32, cells: I) -> Result<Self, DeformationError>
    where
        I: IntoIterator<Item = (DerivationCell, Scalar)>,
    {
        Ok(DefCochain { derivation: GradedDerivation::from_cells(gens, degree, cells)? })
    }

    pub fn degree(&self) -> i32 {
        self.derivation.degree()
    }

    pub fn derivation(&self) -> &GradedDerivation {
        &self.derivation
    }

    pub fn into_derivation(self) -> GradedDerivation {
        self.derivation
    }

    pub fn is_zero(&self) -> bool {
        self.derivation.is_zero()
    }

    pub fn gens(&self) -> &Arc<GeneratorSet> {
        self.derivation.gens()
    }

    pub fn apply(&self, a: &GradedElement) -> Result<GradedElement, DeformationError> {
        Ok(self.derivation.apply(a)?)
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        DefCochain { derivation: self.derivation.scale(c) }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, DeformationError> {
        Ok(DefCochain { derivation: self.derivation.try_add(&other.derivation)? })
    }
}

impl fmt::Display for DefCochain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.derivation.fmt(f)
    }
}

/// `δX = [d_A, X]`.
pub fn def_delta(x: &DefCochain, complex: &DeRhamComplex) -> Result<DefCochain, DeformationError> {
    if **x.gens() != **complex.gens() {
        return Err(DeformationError::Mismatch);
    }
    Ok(DefCochain { derivation: complex.differential().commutator(&x.derivation)? })
}

/// Graded commutator of derivations.
pub fn def_bracket(x: &DefCochain, y: &DefCochain) -> Result<DefCochain, DeformationError> {
    if **x.gens() != **y.gens() {
        return Err(DeformationError::Mismatch);
    }
    Ok(DefCochain { derivation: x.derivation.commutator(&y.derivation)? })
}

/// Sorts `v` ascending; `None` on repeats, otherwise whether the sorting
/// permutation is odd.
pub(crate) fn sort_with_sign(v: &[usize]) -> Option<(Vec<usize>, bool)> {
    let mut w = v.to_vec();
    let mut odd = false;
    for i in 1..w.len() {
        let mut j = i;
        while j > 0 && w[j - 1] > w[j] {
            w.swap(j - 1, j);
            odd = !odd;
            j -= 1;
        }
    }
    if w.windows(2).any(|p| p[0] == p[1]) {
        return None;
    }
    Some((w, odd))
}

fn increasing_tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, k: usize, start: usize, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if acc.len() == k {
            out.push(acc.clone());
            return;
        }
        for i in start..n {
            acc.push(i);
            go(n, k, i + 1, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    go(n, k, 0, &mut Vec::new(), &mut out);
    out
}

fn odd_bits(indices: &[usize]) -> u64 {
    indices.iter().fold(0, |acc, i| acc | 1 << i)
}

/// A `(k+1)`-multiderivation `(c, s_c)` with polynomial coefficients.
///
/// Tables are stored on strictly increasing index tuples; other orderings
/// are recovered by antisymmetry.
#[derive(Clone, Debug, PartialEq)]
pub struct Multiderivation {
    gens: Arc<GeneratorSet>,
    arity: usize,
    /// `values[I][m] = c^m_I`, `|I| = arity`.
    values: BTreeMap<Vec<usize>, Vec<GradedElement>>,
    /// `symbol[I][a] = s^a_I`, `|I| = arity − 1`.
    symbol: BTreeMap<Vec<usize>, Vec<GradedElement>>,
}

impl Multiderivation {
    pub fn zero(pres: &AlgebroidPresentation, arity: usize) -> Self {
        Multiderivation {
            gens: pres.gens().clone(),
            arity,
            values: BTreeMap::new(),
            symbol: BTreeMap::new(),
        }
    }

    /// Builds the tables from `(indices, target, polynomial)` entries in any
    /// index order. Entries related by a permutation must agree up to its
    /// sign.
    pub fn from_entries(
        pres: &AlgebroidPresentation,
        arity: usize,
        values: &[(Vec<usize>, usize, GradedElement)],
        symbol: &[(Vec<usize>, usize, GradedElement)],
    ) -> Result<Self, DeformationError> {
        let mut out = Self::zero(pres, arity);
        let mut seen_v: BTreeMap<(Vec<usize>, usize), GradedElement> = BTreeMap::new();
        for (idx, m, p) in values {
            out.check_entry(idx, arity, *m, pres.rank(), p)?;
            let Some((sorted, odd)) = sort_with_sign(idx) else {
                if p.is_zero() {
                    continue;
                }
                return Err(DeformationError::RepeatedIndex(idx.clone()));
            };
            let val = if odd { -p } else { p.clone() };
            let key = (sorted.clone(), *m);
            if let Some(prev) = seen_v.get(&key) {
                if *prev != val {
                    return Err(DeformationError::NonAntisymmetric { indices: idx.clone(), target: *m });
                }
                continue;
            }
            seen_v.insert(key, val.clone());
            out.set_value(&sorted, *m, val)?;
        }
        let mut seen_s: BTreeMap<(Vec<usize>, usize), GradedElement> = BTreeMap::new();
        for (idx, a, p) in symbol {
            out.check_entry(idx, arity.saturating_sub(1), *a, pres.base_dim(), p)?;
            if arity == 0 {
                return Err(DeformationError::WrongArity { expected: 1, found: 0 });
            }
            let Some((sorted, odd)) = sort_with_sign(idx) else {
                if p.is_zero() {
                    continue;
                }
                return Err(DeformationError::RepeatedIndex(idx.clone()));
            };
            let val = if odd { -p } else { p.clone() };
            let key = (sorted.clone(), *a);
            if let Some(prev) = seen_s.get(&key) {
                if *prev != val {
                    return Err(DeformationError::NonAntisymmetric { indices: idx.clone(), target: *a });
                }
                continue;
            }
            seen_s.insert(key, val.clone());
            out.set_symbol(&sorted, *a, val)?;
        }
        Ok(out)
    }

    fn check_entry(
        &self,
        idx: &[usize],
        len: usize,
        target: usize,
        target_bound: usize,
        p: &GradedElement,
    ) -> Result<(), DeformationError> {
        if idx.len() != len {
            return Err(DeformationError::WrongArity { expected: len, found: idx.len() });
        }
        if target >= target_bound || idx.iter().any(|i| *i >= self.rank()) {
            return Err(DeformationError::IndexOutOfRange(idx.to_vec()));
        }
        if **p.gens() != *self.gens {
            return Err(DeformationError::Mismatch);
        }
        if p.terms().keys().any(|m| m.degree() != 0) {
            return Err(DeformationError::NotPolynomial);
        }
        Ok(())
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Cochain degree `k = arity − 1`.
    pub fn degree(&self) -> i32 {
        self.arity as i32 - 1
    }

    pub fn gens(&self) -> &Arc<GeneratorSet> {
        &self.gens
    }

    pub fn rank(&self) -> usize {
        self.gens.n_odd()
    }

    pub fn base_dim(&self) -> usize {
        self.gens.n_even()
    }

    fn zero_row(&self, len: usize) -> Vec<GradedElement> {
        (0..len).map(|_| GradedElement::zero(&self.gens)).collect()
    }

    /// Sets `c^m_I` for an increasing tuple `I`.
    pub fn set_value(&mut self, indices: &[usize], m: usize, p: GradedElement) -> Result<(), DeformationError> {
        if indices.len() != self.arity || indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(DeformationError::IndexOutOfRange(indices.to_vec()));
        }
        let row = self.zero_row(self.rank());
        self.values.entry(indices.to_vec()).or_insert(row)[m] = p;
        Ok(())
    }

    /// Sets `s^a_I` for an increasing tuple `I`.
    pub fn set_symbol(&mut self, indices: &[usize], a: usize, p: GradedElement) -> Result<(), DeformationError> {
        if indices.len() + 1 != self.arity || indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(DeformationError::IndexOutOfRange(indices.to_vec()));
        }
        let row = self.zero_row(self.base_dim());
        self.symbol.entry(indices.to_vec()).or_insert(row)[a] = p;
        Ok(())
    }

    /// `c^m` evaluated on frame sections in the given order.
    pub fn value(&self, indices: &[usize], m: usize) -> GradedElement {
        match sort_with_sign(indices) {
            None => GradedElement::zero(&self.gens),
            Some((sorted, odd)) => {
                let v = self.values.get(&sorted).map(|row| row[m].clone());
                let v = v.unwrap_or_else(|| GradedElement::zero(&self.gens));
                if odd {
                    -&v
                } else {
                    v
                }
            }
        }
    }

    /// `s^a` evaluated on frame sections in the given order.
    pub fn symbol(&self, indices: &[usize], a: usize) -> GradedElement {
        match sort_with_sign(indices) {
            None => GradedElement::zero(&self.gens),
            Some((sorted, odd)) => {
                let v = self.symbol.get(&sorted).map(|row| row[a].clone());
                let v = v.unwrap_or_else(|| GradedElement::zero(&self.gens));
                if odd {
                    -&v
                } else {
                    v
                }
            }
        }
    }

    /// Nonzero value entries `(I, m, c^m_I)` with `I` increasing.
    pub fn value_entries(&self) -> Vec<(Vec<usize>, usize, GradedElement)> {
        let mut out = Vec::new();
        for (idx, row) in &self.values {
            for (m, p) in row.iter().enumerate() {
                if !p.is_zero() {
                    out.push((idx.clone(), m, p.clone()));
                }
            }
        }
        out
    }

    /// Nonzero symbol entries `(I, a, s^a_I)` with `I` increasing.
    pub fn symbol_entries(&self) -> Vec<(Vec<usize>, usize, GradedElement)> {
        let mut out = Vec::new();
        for (idx, row) in &self.symbol {
            for (a, p) in row.iter().enumerate() {
                if !p.is_zero() {
                    out.push((idx.clone(), a, p.clone()));
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.value_entries().is_empty() && self.symbol_entries().is_empty()
    }

    /// Table equality ignoring explicitly stored zeros.
    pub fn same_tables(&self, other: &Self) -> bool {
        self.arity == other.arity
            && self.value_entries() == other.value_entries()
            && self.symbol_entries() == other.symbol_entries()
    }

    fn section_zero(&self) -> Section {
        self.zero_row(self.rank())
    }

    /// `c(e_{i_1}, …, e_{i_n})` as a section.
    fn on_frame(&self, indices: &[usize]) -> Section {
        (0..self.rank()).map(|m| self.value(indices, m)).collect()
    }

    /// `s_c(e_I)(f)`.
    fn symbol_on(&self, indices: &[usize], f: &GradedElement) -> GradedElement {
        let mut out = GradedElement::zero(&self.gens);
        for a in 0..self.base_dim() {
            let s = self.symbol(indices, a);
            if s.is_zero() {
                continue;
            }
            out += &(&s * &partial(&self.gens, a, f));
        }
        out
    }

    /// `c(α_1, …, α_n)` on polynomial sections, extended from the frame by
    /// the Leibniz rule in each slot:
    /// `c(f_1β_1, …) = Πf·c(β) + Σ_t (−1)^{n−t} Π_{s≠t} f_s · s_c(β_{≠t})(f_t) β_t`.
    pub fn evaluate(&self, args: &[Section]) -> Section {
        let n = self.arity;
        assert_eq!(args.len(), n, "arity mismatch");
        let mut out = self.section_zero();
        let supports: Vec<Vec<usize>> =
            args.iter().map(|s| (0..s.len()).filter(|i| !s[*i].is_zero()).collect()).collect();
        let mut choice = vec![0usize; n];
        for_each_choice(&supports, 0, &mut choice, &mut |idx| {
            let coeffs: Vec<&GradedElement> = idx.iter().enumerate().map(|(t, i)| &args[t][*i]).collect();
            let mut prod = GradedElement::one(&self.gens);
            for f in &coeffs {
                prod = &prod * f;
            }
            let base = self.on_frame(idx);
            for (m, v) in base.iter().enumerate() {
                if !v.is_zero() {
                    out[m] += &(&prod * v);
                }
            }
            if n == 0 {
                return;
            }
            for t in 0..n {
                let rest: Vec<usize> = idx.iter().enumerate().filter(|(s, _)| *s != t).map(|(_, i)| *i).collect();
                let mut others = GradedElement::one(&self.gens);
                for (s, f) in coeffs.iter().enumerate() {
                    if s != t {
                        others = &others * f;
                    }
                }
                let term = &others * &self.symbol_on(&rest, coeffs[t]);
                // Slot t (0-based) moves to the last position: n − 1 − t transpositions.
                if (n - 1 - t) % 2 == 0 {
                    out[idx[t]] += &term;
                } else {
                    out[idx[t]] -= &term;
                }
            }
        });
        out
    }
}

fn for_each_choice(supports: &[Vec<usize>], pos: usize, choice: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    if pos == supports.len() {
        f(choice);
        return;
    }
    for i in &supports[pos] {
        choice[pos] = *i;
        for_each_choice(supports, pos + 1, choice, f);
    }
}

fn partial(gens: &Arc<GeneratorSet>, a: usize, f: &GradedElement) -> GradedElement {
    GradedDerivation::partial(gens, gens.even_gen(a)).apply_unchecked(f)
}

/// A section `Σ_i s[i] e_i` with polynomial coefficients.
pub type Section = Vec<GradedElement>;

/// Anchor and bracket of polynomial sections of a presentation.
struct SectionCalculus<'a> {
    pres: &'a AlgebroidPresentation,
}

impl SectionCalculus<'_> {
    fn gens(&self) -> &Arc<GeneratorSet> {
        self.pres.gens()
    }

    fn unit(&self, i: usize) -> Section {
        (0..self.pres.rank())
            .map(|k| if k == i { GradedElement::one(self.gens()) } else { GradedElement::zero(self.gens()) })
            .collect()
    }

    /// `ρ(e_i)(f)`.
    fn rho_frame(&self, i: usize, f: &GradedElement) -> GradedElement {
        let mut out = GradedElement::zero(self.gens());
        for a in 0..self.pres.base_dim() {
            let r = self.pres.anchor(i, a);
            if !r.is_zero() {
                out += &(r * &partial(self.gens(), a, f));
            }
        }
        out
    }

    /// `[Σ f_i e_i, Σ g_j e_j] = Σ f_i g_j c^m_ij e_m + f_i ρ_i(g_j) e_j − g_j ρ_j(f_i) e_i`.
    fn bracket(&self, a: &Section, b: &Section) -> Section {
        let r = self.pres.rank();
        let mut out: Section = (0..r).map(|_| GradedElement::zero(self.gens())).collect();
        for i in 0..r {
            if a[i].is_zero() {
                continue;
            }
            for j in 0..r {
                if b[j].is_zero() {
                    continue;
                }
                let fg = &a[i] * &b[j];
                for (m, slot) in out.iter_mut().enumerate() {
                    let c = self.pres.bracket(i, j, m);
                    if !c.is_zero() {
                        *slot += &(&fg * &c);
                    }
                }
                out[j] += &(&a[i] * &self.rho_frame(i, &b[j]));
                out[i] -= &(&b[j] * &self.rho_frame(j, &a[i]));
            }
        }
        out
    }
}

fn sign_of(parity: usize) -> Scalar {
    if parity % 2 == 0 {
        Scalar::one()
    } else {
        -Scalar::one()
    }
}

/// `δc` by the explicit formula on sections
///
/// ```text
/// δc(α_0, …, α_{k+1}) = Σ_i (−1)^i [α_i, c(…α̂_i…)]
///                     + Σ_{i<j} (−1)^{i+j} c([α_i, α_j], …α̂_i…α̂_j…)
/// ```
///
/// evaluated on frame tuples for the values; the symbol is read off from
/// `δc(e_I, x^a e_0) − x^a δc(e_I, e_0) = s^a_{δc}(e_I) e_0`.
pub fn delta_multiderivation(
    c: &Multiderivation,
    pres: &AlgebroidPresentation,
) -> Result<Multiderivation, DeformationError> {
    if *c.gens != **pres.gens() {
        return Err(DeformationError::Mismatch);
    }
    let calc = SectionCalculus { pres };
    let n = c.arity + 1;
    let delta = |args: &[Section]| -> Section {
        let mut out: Section = (0..pres.rank()).map(|_| GradedElement::zero(pres.gens())).collect();
        for i in 0..n {
            let rest: Vec<Section> = args.iter().enumerate().filter(|(s, _)| *s != i).map(|(_, a)| a.clone()).collect();
            let term = calc.bracket(&args[i], &c.evaluate(&rest));
            let s = sign_of(i);
            for (o, t) in out.iter_mut().zip(term) {
                *o += &t.scale(&s);
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                let mut inner = vec![calc.bracket(&args[i], &args[j])];
                inner.extend(args.iter().enumerate().filter(|(s, _)| *s != i && *s != j).map(|(_, a)| a.clone()));
                let term = c.evaluate(&inner);
                let s = sign_of(i + j);
                for (o, t) in out.iter_mut().zip(term) {
                    *o += &t.scale(&s);
                }
            }
        }
        out
    };
    let mut out = Multiderivation::zero(pres, n);
    for idx in increasing_tuples(pres.rank(), n) {
        let args: Vec<Section> = idx.iter().map(|i| calc.unit(*i)).collect();
        for (m, v) in delta(&args).into_iter().enumerate() {
            if !v.is_zero() {
                out.set_value(&idx, m, v)?;
            }
        }
    }
    if pres.rank() > 0 {
        for idx in increasing_tuples(pres.rank(), n - 1) {
            let mut args: Vec<Section> = idx.iter().map(|i| calc.unit(*i)).collect();
            args.push(calc.unit(0));
            let plain = delta(&args);
            for a in 0..pres.base_dim() {
                let x = pres.variable(a);
                let mut scaled = args.clone();
                let last = scaled.last_mut().expect("arity ≥ 1");
                last[0] = x.clone();
                let with = delta(&scaled);
                let s = &with[0] - &(&x * &plain[0]);
                if !s.is_zero() {
                    out.set_symbol(&idx, a, s)?;
                }
            }
        }
    }
    Ok(out)
}

/// `D_c` from the tables.
pub fn from_multiderivation(
    c: &Multiderivation,
    pres: &AlgebroidPresentation,
) -> Result<DefCochain, DeformationError> {
    if *c.gens != **pres.gens() {
        return Err(DeformationError::Mismatch);
    }
    let gens = pres.gens();
    let k = c.degree();
    let mut images: Vec<GradedElement> = gens.all().map(|_| GradedElement::zero(gens)).collect();
    for (idx, a, p) in c.symbol_entries() {
        let xi = GradedElement::monomial(gens, Monomial::new(vec![0; gens.n_even()], odd_bits(&idx)), Scalar::one());
        images[pres.coord(a).0] += &(&p * &xi);
    }
    for (idx, m, p) in c.value_entries() {
        let xi = GradedElement::monomial(gens, Monomial::new(vec![0; gens.n_even()], odd_bits(&idx)), Scalar::one());
        images[pres.xi(m).0] -= &(&p * &xi);
    }
    Ok(DefCochain { derivation: GradedDerivation::new(gens, k, images)? })
}

/// Inverse of [`from_multiderivation`] by coefficient extraction.
pub fn to_multiderivation(
    x: &DefCochain,
    pres: &AlgebroidPresentation,
) -> Result<Multiderivation, DeformationError> {
    if **x.gens() != **pres.gens() {
        return Err(DeformationError::Mismatch);
    }
    let k = x.degree();
    if k < 0 {
        return Err(DeformationError::DegreeMinusOne);
    }
    let gens = pres.gens();
    let mut out = Multiderivation::zero(pres, (k + 1) as usize);
    let split = |m: &Monomial| -> (Vec<usize>, Monomial) {
        (m.odd_indices().collect(), Monomial::new(m.exponents().to_vec(), 0))
    };
    for a in 0..pres.base_dim() {
        let mut acc: BTreeMap<Vec<usize>, GradedElement> = BTreeMap::new();
        for (m, coef) in x.derivation.image(pres.coord(a)).terms() {
            let (idx, poly) = split(m);
            acc.entry(idx).or_insert_with(|| GradedElement::zero(gens)).add_term(poly, coef.clone());
        }
        for (idx, p) in acc {
            out.set_symbol(&idx, a, p)?;
        }
    }
    for m_idx in 0..pres.rank() {
        let mut acc: BTreeMap<Vec<usize>, GradedElement> = BTreeMap::new();
        for (m, coef) in x.derivation.image(pres.xi(m_idx)).terms() {
            let (idx, poly) = split(m);
            acc.entry(idx).or_insert_with(|| GradedElement::zero(gens)).add_term(poly, -coef.clone());
        }
        for (idx, p) in acc {
            out.set_value(&idx, m_idx, p)?;
        }
    }
    Ok(out)
}

/// Shuffles of `n` slots into an increasing block of `k` followed by an
/// increasing block of `n − k`, with their signs.
pub fn shuffles(n: usize, k: usize) -> Vec<(Vec<usize>, bool)> {
    increasing_tuples(n, k)
        .into_iter()
        .map(|first| {
            let mut perm = first.clone();
            perm.extend((0..n).filter(|i| !first.contains(i)));
            let inversions = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|(i, j)| perm[*i] > perm[*j]).count();
            (perm, inversions % 2 == 1)
        })
        .collect()
}

/// `ω(e_{j_1}, …, e_{j_l})` for a form `ω` (coefficient of the sorted
/// monomial, signed).
fn form_on_frame(omega: &GradedElement, indices: &[usize]) -> GradedElement {
    let gens = omega.gens();
    let Some((sorted, odd)) = sort_with_sign(indices) else {
        return GradedElement::zero(gens);
    };
    let bits = odd_bits(&sorted);
    let mut out = GradedElement::zero(gens);
    for (m, c) in omega.terms() {
        if m.odd_bits() == bits {
            out.add_term(Monomial::new(m.exponents().to_vec(), 0), if odd { -c.clone() } else { c.clone() });
        }
    }
    out
}

/// Evaluates `D_c ω` directly from the shuffle formula
///
/// ```text
/// D_cω(α_1…α_{k+l}) = Σ_{σ∈S_{k,l}} ± s_c(α_σ(1..k))(ω(α_σ(k+1..)))
///                   − Σ_{σ∈S_{k+1,l−1}} ± ω(c(α_σ(1..k+1)), α_σ(k+2..))
/// ```
///
/// on increasing frame tuples, reassembling the result as an element of
/// `C(A)`. Independent of the generator images of `D_c`.
pub fn shuffle_evaluate(c: &Multiderivation, omega: &GradedElement) -> GradedElement {
    let gens = &c.gens;
    let k = c.degree() as usize;
    let mut out = GradedElement::zero(gens);
    for l in omega.degrees() {
        let w = omega.degree_component(l);
        let n = k + l;
        if n > c.rank() {
            continue;
        }
        for alpha in increasing_tuples(c.rank(), n) {
            let mut value = GradedElement::zero(gens);
            for (perm, odd) in shuffles(n, k) {
                let head: Vec<usize> = perm[..k].iter().map(|p| alpha[*p]).collect();
                let tail: Vec<usize> = perm[k..].iter().map(|p| alpha[*p]).collect();
                let term = c.symbol_on(&head, &form_on_frame(&w, &tail));
                if odd {
                    value -= &term;
                } else {
                    value += &term;
                }
            }
            if l >= 1 {
                for (perm, odd) in shuffles(n, k + 1) {
                    let head: Vec<usize> = perm[..=k].iter().map(|p| alpha[*p]).collect();
                    let tail: Vec<usize> = perm[k + 1..].iter().map(|p| alpha[*p]).collect();
                    let mut term = GradedElement::zero(gens);
                    for m in 0..c.rank() {
                        let cm = c.value(&head, m);
                        if cm.is_zero() {
                            continue;
                        }
                        let mut args = vec![m];
                        args.extend(&tail);
                        term += &(&cm * &form_on_frame(&w, &args));
                    }
                    if odd {
                        value += &term;
                    } else {
                        value -= &term;
                    }
                }
            }
            let xi = Monomial::new(vec![0; gens.n_even()], odd_bits(&alpha));
            for (m, coef) in value.terms() {
                let (p, neg) = m.mul(&xi).expect("polynomial times odd monomial");
                out.add_term(p, if neg { -coef.clone() } else { coef.clone() });
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct McDefectReport {
    /// `δD_c + ½[D_c, D_c]`, a degree-2 cochain.
    pub defect: DefCochain,
    pub is_mc: bool,
}

/// Maurer–Cartan defect of an arity-2 multiderivation relative to the
/// background structure of `pres`.
pub fn mc_defect(c: &Multiderivation, pres: &AlgebroidPresentation) -> Result<McDefectReport, DeformationError> {
    if c.arity != 2 {
        return Err(DeformationError::WrongArity { expected: 2, found: c.arity });
    }
    let complex = crate::algebroid::build_differential(pres)?;
    let d = from_multiderivation(c, pres)?;
    let linear = def_delta(&d, &complex)?;
    let quadratic = def_bracket(&d, &d)?.scale(&ratio(1, 2));
    let defect = linear.try_add(&quadratic)?;
    let is_mc = defect.is_zero();
    Ok(McDefectReport { defect, is_mc })
}

/// The presentation with bracket `c_old + c` and anchor `ρ_old + s_c`.
pub fn deform(pres: &AlgebroidPresentation, c: &Multiderivation) -> Result<AlgebroidPresentation, DeformationError> {
    if c.arity != 2 {
        return Err(DeformationError::WrongArity { expected: 2, found: c.arity });
    }
    if *c.gens != **pres.gens() {
        return Err(DeformationError::Mismatch);
    }
    let mut brackets = BTreeMap::new();
    for (idx, row) in &c.values {
        brackets.insert((idx[0], idx[1]), row.clone());
    }
    let mut anchor: Vec<Vec<GradedElement>> =
        (0..pres.rank()).map(|_| (0..pres.base_dim()).map(|_| GradedElement::zero(pres.gens())).collect()).collect();
    for (idx, row) in &c.symbol {
        anchor[idx[0]] = row.clone();
    }
    let mut out = pres.clone();
    out.add_tables(&brackets, &anchor);
    out.check_weights()?;
    Ok(out)
}

/// `(C_def(A), δ)` as a blockwise complex; cells are basis derivations
/// `m ∂/∂g` of degree ≥ −1.
#[derive(Clone, Debug)]
pub struct DeformationComplex {
    complex: DeRhamComplex,
}

impl DeformationComplex {
    pub fn new(complex: DeRhamComplex) -> Self {
        DeformationComplex { complex }
    }

    pub fn de_rham(&self) -> &DeRhamComplex {
        &self.complex
    }
}

impl CochainComplex for DeformationComplex {
    type Cell = DerivationCell;

    fn id(&self) -> String {
        format!("def({})", self.complex.presentation().name())
    }

    fn cells(&self, degree: i32, weight: i32) -> Vec<DerivationCell> {
        if degree < -1 {
            return Vec::new();
        }
        let g = self.complex.gens();
        derivation_cells(g, g, degree, weight)
    }

    fn differential(&self, cell: &DerivationCell) -> Vec<(DerivationCell, Scalar)> {
        let g = self.complex.gens();
        let degree = cell.degree(g);
        let x = GradedDerivation::from_cells(g, degree, [(cell.clone(), Scalar::one())])
            .expect("basis cell is homogeneous");
        self.complex.differential().commutator(&x).expect("same generators").cells()
    }
}

/// The weight shift of a weight-homogeneous cochain, if any.
pub fn cochain_weight(x: &DefCochain) -> Option<i32> {
    let shifts = x.derivation.weight_shifts();
    match shifts.len() {
        0 => Some(0),
        1 => shifts.into_iter().next(),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebroid::build_differential;
    use crate::corpus;
    use crate::graded::int;

    fn xi(pres: &AlgebroidPresentation, i: usize) -> GradedElement {
        GradedElement::generator(pres.gens(), pres.xi(i))
    }

    #[test]
    fn abelian_arity_two_example() {
        let pres = corpus::ab2();
        let e2 = pres.constant(int(1));
        let c = Multiderivation::from_entries(&pres, 2, &[(vec![0, 1], 1, e2)], &[]).unwrap();
        let d = from_multiderivation(&c, &pres).unwrap();
        assert!(d.derivation().image(pres.xi(0)).is_zero());
        assert_eq!(d.derivation().image(pres.xi(1)), &-&(&xi(&pres, 0) * &xi(&pres, 1)));
        assert!(to_multiderivation(&d, &pres).unwrap().same_tables(&c));
        assert_eq!(shuffle_evaluate(&c, &xi(&pres, 1)), d.apply(&xi(&pres, 1)).unwrap());
    }

    #[test]
    fn identity_arity_one_example() {
        let pres = corpus::ab2();
        let one = pres.constant(int(1));
        let c = Multiderivation::from_entries(&pres, 1, &[(vec![0], 0, one.clone()), (vec![1], 1, one)], &[])
            .unwrap();
        let d = from_multiderivation(&c, &pres).unwrap();
        for i in 0..2 {
            assert_eq!(d.apply(&xi(&pres, i)).unwrap(), -&xi(&pres, i));
            assert_eq!(shuffle_evaluate(&c, &xi(&pres, i)), -&xi(&pres, i));
        }
    }

    #[test]
    fn d_a_is_bracket_and_anchor() {
        let pres = corpus::aff1();
        let cx = build_differential(&pres).unwrap();
        let t = to_multiderivation(&DefCochain::new(cx.differential().clone()), &pres).unwrap();
        assert_eq!(t.value(&[0, 1], 1), pres.constant(int(1)));
        assert_eq!(t.value(&[1, 0], 1), pres.constant(int(-1)));
        assert!(t.value(&[0, 1], 0).is_zero());
        let pres = corpus::aff_r();
        let cx = build_differential(&pres).unwrap();
        let t = to_multiderivation(&DefCochain::new(cx.differential().clone()), &pres).unwrap();
        for i in 0..2 {
            assert_eq!(&t.symbol(&[i], 0), pres.anchor(i, 0));
        }
    }

    #[test]
    fn aff1_contraction_delta() {
        // [d, ι_{e2}](ξ¹) = ι(dξ¹) = 0, [d, ι_{e2}](ξ²) = ι(−ξ¹ξ²) = ξ¹.
        let pres = corpus::aff1();
        let cx = build_differential(&pres).unwrap();
        let iota = GradedDerivation::partial(pres.gens(), pres.xi(1));
        let dx = def_delta(&DefCochain::new(iota), &cx).unwrap();
        assert_eq!(dx.degree(), 0);
        assert!(dx.derivation().image(pres.xi(0)).is_zero());
        assert_eq!(dx.derivation().image(pres.xi(1)), &xi(&pres, 0));
    }

    #[test]
    fn delta_examples() {
        let pres = corpus::aff1();
        let one = pres.constant(int(1));
        let c = Multiderivation::from_entries(&pres, 1, &[(vec![1], 1, one)], &[]).unwrap();
        assert!(delta_multiderivation(&c, &pres).unwrap().is_zero());

        // ad_h on sl(2) is a cocycle.
        let pres = corpus::sl2();
        let mut entries = Vec::new();
        for j in 0..3 {
            for m in 0..3 {
                let v = pres.bracket(0, j, m);
                if !v.is_zero() {
                    entries.push((vec![j], m, v));
                }
            }
        }
        let ad = Multiderivation::from_entries(&pres, 1, &entries, &[]).unwrap();
        assert!(!ad.is_zero());
        assert!(delta_multiderivation(&ad, &pres).unwrap().is_zero());
    }

    #[test]
    fn mc_examples() {
        let pres = corpus::ab2();
        let c = Multiderivation::from_entries(&pres, 2, &[(vec![0, 1], 1, pres.constant(int(1)))], &[]).unwrap();
        assert!(mc_defect(&c, &pres).unwrap().is_mc);
        let deformed = deform(&pres, &c).unwrap();
        assert_eq!(deformed.bracket(0, 1, 1), pres.constant(int(1)));
        assert!(crate::algebroid::validate(&deformed).unwrap().passed);

        let pres = corpus::abelian(3);
        let one = pres.constant(int(1));
        let c = Multiderivation::from_entries(
            &pres,
            2,
            &[(vec![0, 1], 0, one.clone()), (vec![1, 2], 1, one.clone()), (vec![2, 0], 2, one)],
            &[],
        )
        .unwrap();
        assert!(!mc_defect(&c, &pres).unwrap().is_mc);
        assert!(!crate::algebroid::validate(&deform(&pres, &c).unwrap()).unwrap().passed);
        assert!(mc_defect(&Multiderivation::zero(&pres, 2), &pres).unwrap().is_mc);
        assert!(matches!(
            mc_defect(&Multiderivation::zero(&pres, 1), &pres),
            Err(DeformationError::WrongArity { .. })
        ));
    }

    #[test]
    fn table_errors() {
        let pres = corpus::ab2();
        let one = pres.constant(int(1));
        let err = Multiderivation::from_entries(
            &pres,
            2,
            &[(vec![0, 1], 1, one.clone()), (vec![1, 0], 1, one.clone())],
            &[],
        )
        .unwrap_err();
        assert!(matches!(err, DeformationError::NonAntisymmetric { .. }));
        let err = Multiderivation::from_entries(&pres, 2, &[(vec![0, 0], 1, one)], &[]).unwrap_err();
        assert!(matches!(err, DeformationError::RepeatedIndex(_)));
        let minus_one = DefCochain::zero(pres.gens(), -1);
        assert_eq!(to_multiderivation(&minus_one, &pres).unwrap_err(), DeformationError::DegreeMinusOne);
    }

    #[test]
    fn shuffle_signs() {
        let s = shuffles(3, 1);
        assert_eq!(s.len(), 3);
        assert_eq!(s[1], (vec![1, 0, 2], true));
        assert_eq!(shuffles(2, 0), vec![(vec![0, 1], false)]);
    }
}
