//! Lie algebroid presentations over weighted affine space and their de Rham
//! complexes `(C(A), d_A)`.
//!
//! A presentation fixes a frame `e_1..e_r` of the bundle. The de Rham algebra
//! is generated by the base coordinates `x^a` and the odd duals `ξ^i` of the
//! frame (named after the frame sections). The differential is
//!
//! ```text
//! d x^a = Σ_i ρ^a_i ξ^i,        d ξ^k = −½ Σ_{i,j} c^k_ij ξ^i ξ^j
//! ```
//!
//! and `d² = 0` encodes both the Jacobi identity and the anchor being a
//! morphism of brackets.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num::{One, Zero};
use thiserror::Error;

use crate::graded::{
    AlgebraError, EvenGenerator, Gen, GeneratorSet, GradedDerivation, GradedElement, OddGenerator,
    OddOrigin, Scalar,
};
use crate::linalg::rank_of_vectors;

/// Location of a table entry in a presentation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Entry {
    Anchor { frame: String, coord: String },
    Bracket { left: String, right: String, target: String },
}

impl fmt::Display for Entry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Entry::Anchor { frame, coord } => write!(f, "anchor {frame} -> d/d{coord}"),
            Entry::Bracket { left, right, target } => write!(f, "bracket [{left},{right}] component {target}"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebroidError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("bracket of `{0}` with itself must be zero")]
    SelfBracket(String),
    #[error("structure constants are not antisymmetric at [{left},{right}] component {target}")]
    NonAntisymmetric { left: String, right: String, target: String },
    #[error("{entry} must be a polynomial in the base coordinates")]
    NotPolynomial { entry: Entry },
    #[error("{entry} is not weight-homogeneous: expected weight {expected}, found {found:?}")]
    WeightInhomogeneous { entry: Entry, expected: i32, found: Vec<i32> },
    #[error("spanning vectors are linearly dependent")]
    DependentSpanning,
    #[error("spanning vector `{0}` mixes coordinates of different weights")]
    MixedWeightVector(String),
    #[error("spanning vector `{name}` has {found} components, expected {expected}")]
    VectorLength { name: String, expected: usize, found: usize },
    #[error("preset `{name}` does not define a Lie algebroid: residual on {generators:?}")]
    InvalidPreset { name: String, generators: Vec<String> },
}

/// Frame presentation of a Lie algebroid `A ⇒ M`, `M` a weighted affine space.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebroidPresentation {
    name: String,
    gens: Arc<GeneratorSet>,
    /// `anchor[i][a] = ρ^a_i`.
    anchor: Vec<Vec<GradedElement>>,
    /// `brackets[(i, j)][k] = c^k_ij` for `i < j`.
    brackets: BTreeMap<(usize, usize), Vec<GradedElement>>,
}

impl AlgebroidPresentation {
    /// Presentation with zero anchor and bracket. `frame` carries the
    /// weights of the odd duals `ξ^i`.
    pub fn new(name: &str, base: &[(String, u32)], frame: &[(String, i32)]) -> Result<Self, AlgebroidError> {
        Self::with_origin(name, base, frame, OddOrigin::FiberDual)
    }

    pub(crate) fn with_origin(
        name: &str,
        base: &[(String, u32)],
        frame: &[(String, i32)],
        origin: OddOrigin,
    ) -> Result<Self, AlgebroidError> {
        let frame: Vec<(String, i32, OddOrigin)> = frame.iter().map(|(n, w)| (n.clone(), *w, origin)).collect();
        Self::with_origins(name, base, &frame)
    }

    pub(crate) fn with_origins(
        name: &str,
        base: &[(String, u32)],
        frame: &[(String, i32, OddOrigin)],
    ) -> Result<Self, AlgebroidError> {
        let gens = GeneratorSet::new(
            base.iter().map(|(n, w)| EvenGenerator { name: n.clone(), weight: *w }).collect(),
            frame
                .iter()
                .map(|(n, w, origin)| OddGenerator { name: n.clone(), weight: *w, origin: *origin })
                .collect(),
        )?;
        let anchor = (0..frame.len())
            .map(|_| (0..base.len()).map(|_| GradedElement::zero(&gens)).collect())
            .collect();
        Ok(AlgebroidPresentation { name: name.to_string(), gens, anchor, brackets: BTreeMap::new() })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: &str) {
        self.name = name.to_string();
    }

    pub fn gens(&self) -> &Arc<GeneratorSet> {
        &self.gens
    }

    pub fn base(&self) -> &[EvenGenerator] {
        self.gens.evens()
    }

    pub fn frame(&self) -> &[OddGenerator] {
        self.gens.odds()
    }

    pub fn rank(&self) -> usize {
        self.gens.n_odd()
    }

    pub fn base_dim(&self) -> usize {
        self.gens.n_even()
    }

    pub fn frame_index(&self, name: &str) -> Option<usize> {
        self.gens.lookup(name).and_then(|g| self.gens.odd_index(g))
    }

    pub fn coord_index(&self, name: &str) -> Option<usize> {
        self.gens.lookup(name).filter(|g| !self.gens.is_odd(*g)).map(|g| g.0)
    }

    /// The dual odd generator `ξ^i` as a generator of `C(A)`.
    pub fn xi(&self, i: usize) -> Gen {
        self.gens.odd_gen(i)
    }

    pub fn coord(&self, a: usize) -> Gen {
        self.gens.even_gen(a)
    }

    /// Polynomial variable `x^a` as an element of `C(A)`.
    pub fn variable(&self, a: usize) -> GradedElement {
        GradedElement::generator(&self.gens, self.coord(a))
    }

    pub fn constant(&self, c: Scalar) -> GradedElement {
        GradedElement::constant(&self.gens, c)
    }

    pub fn anchor(&self, i: usize, a: usize) -> &GradedElement {
        &self.anchor[i][a]
    }

    /// `c^k_ij`, antisymmetric in `i, j`.
    pub fn bracket(&self, i: usize, j: usize, k: usize) -> GradedElement {
        match i.cmp(&j) {
            std::cmp::Ordering::Less => self
                .brackets
                .get(&(i, j))
                .map(|row| row[k].clone())
                .unwrap_or_else(|| GradedElement::zero(&self.gens)),
            std::cmp::Ordering::Greater => -&self.bracket(j, i, k),
            std::cmp::Ordering::Equal => GradedElement::zero(&self.gens),
        }
    }

    /// Nonzero bracket rows `(i, j) ↦ [c^k_ij]_k` with `i < j`.
    pub fn bracket_rows(&self) -> impl Iterator<Item = (&(usize, usize), &Vec<GradedElement>)> {
        self.brackets.iter().filter(|(_, row)| row.iter().any(|e| !e.is_zero()))
    }

    fn check_polynomial(&self, p: &GradedElement, entry: impl FnOnce() -> Entry) -> Result<(), AlgebroidError> {
        if **p.gens() != *self.gens {
            return Err(AlgebraError::GeneratorMismatch.into());
        }
        if p.terms().keys().any(|m| m.degree() != 0) {
            return Err(AlgebroidError::NotPolynomial { entry: entry() });
        }
        Ok(())
    }

    pub fn set_anchor(&mut self, i: usize, a: usize, p: GradedElement) -> Result<(), AlgebroidError> {
        self.check_polynomial(&p, || self.anchor_entry(i, a))?;
        self.anchor[i][a] = p;
        Ok(())
    }

    /// Sets `c^k_ij` (and implicitly `c^k_ji = −c^k_ij`).
    pub fn set_bracket(&mut self, i: usize, j: usize, k: usize, p: GradedElement) -> Result<(), AlgebroidError> {
        self.check_polynomial(&p, || self.bracket_entry(i, j, k))?;
        if i == j {
            if p.is_zero() {
                return Ok(());
            }
            return Err(AlgebroidError::SelfBracket(self.gens.odds()[i].name.clone()));
        }
        let (lo, hi, value) = if i < j { (i, j, p) } else { (j, i, -&p) };
        let rank = self.rank();
        let gens = self.gens.clone();
        let row = self
            .brackets
            .entry((lo, hi))
            .or_insert_with(|| (0..rank).map(|_| GradedElement::zero(&gens)).collect());
        row[k] = value;
        Ok(())
    }

    pub fn anchor_entry(&self, i: usize, a: usize) -> Entry {
        Entry::Anchor { frame: self.frame()[i].name.clone(), coord: self.base()[a].name.clone() }
    }

    pub fn bracket_entry(&self, i: usize, j: usize, k: usize) -> Entry {
        Entry::Bracket {
            left: self.frame()[i].name.clone(),
            right: self.frame()[j].name.clone(),
            target: self.frame()[k].name.clone(),
        }
    }

    /// Weight homogeneity of every table entry:
    /// `w(ρ^a_i) = w(x^a) − w(ξ^i)` and `w(c^k_ij) = w(ξ^k) − w(ξ^i) − w(ξ^j)`.
    pub fn check_weights(&self) -> Result<(), AlgebroidError> {
        let wx = |a: usize| self.base()[a].weight as i32;
        let wxi = |i: usize| self.frame()[i].weight;
        for i in 0..self.rank() {
            for a in 0..self.base_dim() {
                let expected = wx(a) - wxi(i);
                let p = &self.anchor[i][a];
                if !p.is_weight_homogeneous_of(expected) {
                    return Err(AlgebroidError::WeightInhomogeneous {
                        entry: self.anchor_entry(i, a),
                        expected,
                        found: p.weights().into_iter().collect(),
                    });
                }
            }
        }
        for ((i, j), row) in &self.brackets {
            for (k, p) in row.iter().enumerate() {
                let expected = wxi(k) - wxi(*i) - wxi(*j);
                if !p.is_weight_homogeneous_of(expected) {
                    return Err(AlgebroidError::WeightInhomogeneous {
                        entry: self.bracket_entry(*i, *j, k),
                        expected,
                        found: p.weights().into_iter().collect(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Adds constant or polynomial tables to this presentation entrywise.
    pub(crate) fn add_tables(
        &mut self,
        brackets: &BTreeMap<(usize, usize), Vec<GradedElement>>,
        anchor: &[Vec<GradedElement>],
    ) {
        for ((i, j), row) in brackets {
            for (k, p) in row.iter().enumerate() {
                let sum = &self.bracket(*i, *j, k) + p;
                self.set_bracket(*i, *j, k, sum).expect("same generator set");
            }
        }
        for (i, row) in anchor.iter().enumerate() {
            for (a, p) in row.iter().enumerate() {
                self.anchor[i][a] = &self.anchor[i][a] + p;
            }
        }
    }
}

/// `(C(A), d_A)` together with the presentation it came from.
#[derive(Clone, Debug, PartialEq)]
pub struct DeRhamComplex {
    presentation: AlgebroidPresentation,
    differential: GradedDerivation,
}

impl DeRhamComplex {
    pub fn presentation(&self) -> &AlgebroidPresentation {
        &self.presentation
    }

    pub fn gens(&self) -> &Arc<GeneratorSet> {
        self.presentation.gens()
    }

    pub fn differential(&self) -> &GradedDerivation {
        &self.differential
    }

    pub fn d(&self, a: &GradedElement) -> GradedElement {
        self.differential.apply(a).expect("element over the de Rham generators")
    }

    pub fn validate(&self) -> ValidationReport {
        let square = self.differential.commutator(&self.differential).expect("same generators");
        let failures = self
            .gens()
            .all()
            .filter(|g| !square.image(*g).is_zero())
            .map(|g| (self.gens().name(g).to_string(), square.image(g).clone()))
            .collect::<Vec<_>>();
        ValidationReport { passed: failures.is_empty(), failures }
    }
}

/// Builds `d_A`. Fails on weight-inhomogeneous table entries, naming the
/// offending entry.
pub fn build_differential(pres: &AlgebroidPresentation) -> Result<DeRhamComplex, AlgebroidError> {
    pres.check_weights()?;
    let gens = pres.gens();
    let mut images = Vec::with_capacity(gens.len());
    for a in 0..pres.base_dim() {
        let mut img = GradedElement::zero(gens);
        for i in 0..pres.rank() {
            let xi = GradedElement::generator(gens, pres.xi(i));
            img += &(pres.anchor(i, a) * &xi);
        }
        images.push(img);
    }
    for k in 0..pres.rank() {
        let mut img = GradedElement::zero(gens);
        for ((i, j), row) in &pres.brackets {
            if row[k].is_zero() {
                continue;
            }
            let xixj = &GradedElement::generator(gens, pres.xi(*i)) * &GradedElement::generator(gens, pres.xi(*j));
            img -= &(&row[k] * &xixj);
        }
        images.push(img);
    }
    let differential = GradedDerivation::new(gens, 1, images)?;
    Ok(DeRhamComplex { presentation: pres.clone(), differential })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    pub passed: bool,
    /// Generators on which `[d_A, d_A]` does not vanish, with the residual.
    pub failures: Vec<(String, GradedElement)>,
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed {
            return f.write_str("valid: [d, d] vanishes on every generator");
        }
        writeln!(f, "invalid: [d, d] does not vanish")?;
        for (g, r) in &self.failures {
            writeln!(f, "  [d, d]({g}) = {r}")?;
        }
        Ok(())
    }
}

/// Checks `[d_A, d_A] = 0` on generators, which suffices by the Leibniz rule.
pub fn validate(pres: &AlgebroidPresentation) -> Result<ValidationReport, AlgebroidError> {
    Ok(build_differential(pres)?.validate())
}

/// Sparse polynomial entry `(frame i, coordinate a, exponents, coefficient)`
/// used to describe anchors of action algebroids.
pub type AnchorTerm = (usize, usize, Vec<u32>, Scalar);

/// Structure constant `c^k_ij = value` given as `(i, j, k, value)`.
pub type StructureConstant = (usize, usize, usize, Scalar);

#[derive(Clone, Debug)]
pub enum Preset {
    /// `T R^n`: coordinates of weight 1, frame `∂/∂x^a`, identity anchor.
    Tangent(usize),
    /// A Lie algebra over a point; all duals have weight 0.
    LieAlgebra { name: String, frame: Vec<String>, constants: Vec<StructureConstant> },
    /// Action algebroid `g ⋉ M` with a polynomial infinitesimal action.
    Action {
        name: String,
        base: Vec<(String, u32)>,
        frame: Vec<(String, i32)>,
        constants: Vec<StructureConstant>,
        action: Vec<AnchorTerm>,
    },
    /// Tangent algebroid of the foliation spanned by constant vector fields.
    Foliation { name: String, base: Vec<(String, u32)>, spanning: Vec<(String, Vec<Scalar>)> },
}

fn coordinate_names(n: usize) -> Vec<String> {
    if n <= 3 {
        ["x", "y", "z"][..n].iter().map(|s| s.to_string()).collect()
    } else {
        (1..=n).map(|i| format!("x{i}")).collect()
    }
}

fn set_constants(
    pres: &mut AlgebroidPresentation,
    constants: &[StructureConstant],
) -> Result<(), AlgebroidError> {
    let mut seen: BTreeMap<(usize, usize, usize), Scalar> = BTreeMap::new();
    for (i, j, k, c) in constants {
        let (i, j, k) = (*i, *j, *k);
        if i.max(j).max(k) >= pres.rank() {
            return Err(AlgebroidError::UnknownName(format!("frame index {}", i.max(j).max(k))));
        }
        if i == j {
            if c.is_zero() {
                continue;
            }
            return Err(AlgebroidError::SelfBracket(pres.frame()[i].name.clone()));
        }
        let (key, val) = if i < j { ((i, j, k), c.clone()) } else { ((j, i, k), -c.clone()) };
        if let Some(prev) = seen.get(&key) {
            if *prev != val {
                let e = pres.bracket_entry(key.0, key.1, key.2);
                let Entry::Bracket { left, right, target } = e else { unreachable!() };
                return Err(AlgebroidError::NonAntisymmetric { left, right, target });
            }
            continue;
        }
        seen.insert(key, val.clone());
        let p = pres.constant(val);
        pres.set_bracket(key.0, key.1, key.2, p)?;
    }
    Ok(())
}

fn ensure_valid(pres: AlgebroidPresentation) -> Result<AlgebroidPresentation, AlgebroidError> {
    let report = validate(&pres)?;
    if !report.passed {
        return Err(AlgebroidError::InvalidPreset {
            name: pres.name.clone(),
            generators: report.failures.into_iter().map(|(g, _)| g).collect(),
        });
    }
    Ok(pres)
}

/// Standard presentations; each result is validated before it is returned.
pub fn standard_preset(kind: Preset) -> Result<AlgebroidPresentation, AlgebroidError> {
    match kind {
        Preset::Tangent(n) => {
            let coords = coordinate_names(n);
            let base: Vec<(String, u32)> = coords.iter().map(|c| (c.clone(), 1)).collect();
            let frame: Vec<(String, i32)> = coords.iter().map(|c| (c.to_uppercase(), 1)).collect();
            let mut pres = AlgebroidPresentation::new(&format!("TR{n}"), &base, &frame)?;
            for a in 0..n {
                let one = pres.constant(Scalar::one());
                pres.set_anchor(a, a, one)?;
            }
            ensure_valid(pres)
        }
        Preset::LieAlgebra { name, frame, constants } => {
            let frame: Vec<(String, i32)> = frame.into_iter().map(|f| (f, 0)).collect();
            let mut pres = AlgebroidPresentation::new(&name, &[], &frame)?;
            set_constants(&mut pres, &constants)?;
            ensure_valid(pres)
        }
        Preset::Action { name, base, frame, constants, action } => {
            let mut pres = AlgebroidPresentation::new(&name, &base, &frame)?;
            set_constants(&mut pres, &constants)?;
            for (i, a, exps, c) in action {
                if i >= pres.rank() || a >= pres.base_dim() || exps.len() != pres.base_dim() {
                    return Err(AlgebroidError::UnknownName(format!("action entry ({i}, {a})")));
                }
                let mono = crate::graded::Monomial::new(exps, 0);
                let term = GradedElement::monomial(pres.gens(), mono, c);
                let sum = pres.anchor(i, a) + &term;
                pres.set_anchor(i, a, sum)?;
            }
            ensure_valid(pres)
        }
        Preset::Foliation { name, base, spanning } => foliation_presentation(&name, &base, &spanning),
    }
}

/// Frame = the constant spanning fields, anchor = inclusion, zero bracket.
/// The dual of each field gets the common weight of the coordinates it
/// moves along.
pub(crate) fn foliation_presentation(
    name: &str,
    base: &[(String, u32)],
    spanning: &[(String, Vec<Scalar>)],
) -> Result<AlgebroidPresentation, AlgebroidError> {
    let mut frame = Vec::new();
    for (fname, v) in spanning {
        if v.len() != base.len() {
            return Err(AlgebroidError::VectorLength {
                name: fname.clone(),
                expected: base.len(),
                found: v.len(),
            });
        }
        let weights: std::collections::BTreeSet<u32> =
            v.iter().zip(base).filter(|(c, _)| !c.is_zero()).map(|(_, (_, w))| *w).collect();
        match weights.len() {
            0 => return Err(AlgebroidError::DependentSpanning),
            1 => frame.push((fname.clone(), *weights.iter().next().unwrap() as i32)),
            _ => return Err(AlgebroidError::MixedWeightVector(fname.clone())),
        }
    }
    let vectors: Vec<Vec<Scalar>> = spanning.iter().map(|(_, v)| v.clone()).collect();
    if rank_of_vectors(&vectors) != vectors.len() {
        return Err(AlgebroidError::DependentSpanning);
    }
    let mut pres = AlgebroidPresentation::with_origin(name, base, &frame, OddOrigin::LeafwiseForm)?;
    for (i, (_, v)) in spanning.iter().enumerate() {
        for (a, c) in v.iter().enumerate() {
            let p = pres.constant(c.clone());
            pres.set_anchor(i, a, p)?;
        }
    }
    ensure_valid(pres)
}

/// Names for the tangent preset's coordinates, exposed for callers that
/// build matching submersions.
pub fn tangent_coordinates(n: usize) -> Vec<String> {
    coordinate_names(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::graded::int;

    #[test]
    fn abelian_differential_is_zero() {
        let c = build_differential(&corpus::ab2()).unwrap();
        assert!(c.differential().is_zero());
    }

    #[test]
    fn aff1_differential() {
        let pres = corpus::aff1();
        let c = build_differential(&pres).unwrap();
        let g = pres.gens();
        let xi1 = GradedElement::generator(g, pres.xi(0));
        let xi2 = GradedElement::generator(g, pres.xi(1));
        assert!(c.differential().image(pres.xi(0)).is_zero());
        assert_eq!(c.differential().image(pres.xi(1)), &-&(&xi1 * &xi2));
    }

    #[test]
    fn tangent_differential() {
        let pres = standard_preset(Preset::Tangent(1)).unwrap();
        let c = build_differential(&pres).unwrap();
        let xi = GradedElement::generator(pres.gens(), pres.xi(0));
        assert_eq!(c.differential().image(pres.coord(0)), &xi);
        assert!(c.differential().image(pres.xi(0)).is_zero());
        assert_eq!(pres.base()[0].name, "x");
        assert_eq!(pres.frame()[0].name, "X");
    }

    #[test]
    fn sl2_and_so3_validate() {
        assert!(validate(&corpus::sl2()).unwrap().passed);
        assert!(validate(&corpus::so3()).unwrap().passed);
    }

    #[test]
    fn non_jacobi_bracket_fails() {
        let pres = corpus::bad_jacobi();
        let report = validate(&pres).unwrap();
        assert!(!report.passed);
        assert!(!report.failures.is_empty());
    }

    #[test]
    fn inhomogeneous_anchor_is_named() {
        let mut pres = AlgebroidPresentation::new("T", &[("x".into(), 1)], &[("X".into(), 1)]).unwrap();
        let x = pres.variable(0);
        pres.set_anchor(0, 0, &x + &pres.constant(int(1))).unwrap();
        let err = build_differential(&pres).unwrap_err();
        assert_eq!(
            err,
            AlgebroidError::WeightInhomogeneous {
                entry: Entry::Anchor { frame: "X".into(), coord: "x".into() },
                expected: 0,
                found: vec![0, 1],
            }
        );
    }

    #[test]
    fn self_bracket_rejected() {
        let mut pres = corpus::ab2();
        let one = pres.constant(int(1));
        assert!(matches!(pres.set_bracket(0, 0, 1, one), Err(AlgebroidError::SelfBracket(_))));
    }

    #[test]
    fn preset_errors() {
        let dep = Preset::Foliation {
            name: "F".into(),
            base: vec![("x".into(), 1), ("y".into(), 1)],
            spanning: vec![("A".into(), vec![int(1), int(1)]), ("B".into(), vec![int(2), int(2)])],
        };
        assert_eq!(standard_preset(dep).unwrap_err(), AlgebroidError::DependentSpanning);
        let bad = Preset::LieAlgebra {
            name: "g".into(),
            frame: vec!["a".into(), "b".into()],
            constants: vec![(0, 1, 1, int(1)), (1, 0, 1, int(1))],
        };
        assert!(matches!(standard_preset(bad), Err(AlgebroidError::NonAntisymmetric { .. })));
    }

    #[test]
    fn foliation_preset_shape() {
        let pres = corpus::fol_r2();
        assert_eq!(pres.base_dim(), 2);
        assert_eq!(pres.rank(), 1);
        assert_eq!(pres.anchor(0, 0), &pres.constant(int(1)));
        assert!(pres.anchor(0, 1).is_zero());
        assert_eq!(pres.bracket_rows().count(), 0);
    }

    #[test]
    fn corpus_presentations_are_valid_and_weight_preserving() {
        for pres in corpus::all() {
            let c = build_differential(&pres).unwrap();
            assert!(c.validate().passed, "{}", pres.name());
            assert!(c.differential().is_weight_homogeneous_of(0), "{}", pres.name());
        }
    }
}
