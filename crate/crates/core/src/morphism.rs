//! Lie algebroid morphisms stored contravariantly through `F* : C(B) → C(A)`,
//! relative cochains `Z : C(B) → C(A)` and the maps
//! `F★ : X ↦ X∘F*` and `F⋆ : Y ↦ F*∘Y`.

use std::sync::Arc;

use num::One;
use thiserror::Error;

use crate::algebroid::{build_differential, AlgebroidError, AlgebroidPresentation, DeRhamComplex};
use crate::cohomology::CochainComplex;
use crate::deformation::DefCochain;
use crate::graded::{
    derivation_cells, relative_leibniz, AlgebraError, DerivationCell, Gen, GeneratorSet, GradedElement, Monomial,
    Scalar,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MorphismError {
    #[error(transparent)]
    Algebroid(#[from] AlgebroidError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("expected {expected} generator images, got {found}")]
    ImageCount { expected: usize, found: usize },
    #[error("image of `{0}` has the wrong degree or lives over the wrong algebra")]
    BadImage(String),
    #[error("F* does not commute with the differentials on `{0}`")]
    NotChainMap(String),
    #[error("operands live over different generator sets")]
    Mismatch,
}

/// `F : A → B`, recorded by `F*` on the generators of `C(B)`.
#[derive(Clone, Debug)]
pub struct AlgebroidMorphism {
    source: DeRhamComplex,
    target: DeRhamComplex,
    images: Vec<GradedElement>,
    /// Set when every image is a single generator with coefficient one.
    renaming: Option<Vec<Gen>>,
}

impl AlgebroidMorphism {
    /// Checks degrees and `F*∘d_B = d_A∘F*` on every generator of `C(B)`.
    pub fn new(
        source: &AlgebroidPresentation,
        target: &AlgebroidPresentation,
        images: Vec<GradedElement>,
    ) -> Result<Self, MorphismError> {
        let source = build_differential(source)?;
        let target = build_differential(target)?;
        Self::from_complexes(source, target, images)
    }

    pub fn from_complexes(
        source: DeRhamComplex,
        target: DeRhamComplex,
        images: Vec<GradedElement>,
    ) -> Result<Self, MorphismError> {
        let tg = target.gens().clone();
        if images.len() != tg.len() {
            return Err(MorphismError::ImageCount { expected: tg.len(), found: images.len() });
        }
        for (g, img) in tg.all().zip(&images) {
            if **img.gens() != **source.gens() || !img.is_homogeneous_of(tg.degree(g) as i32) {
                return Err(MorphismError::BadImage(tg.name(g).to_string()));
            }
        }
        let renaming = images
            .iter()
            .map(|img| {
                let mut terms = img.terms().iter();
                match (terms.next(), terms.next()) {
                    (Some((m, c)), None) if c.is_one() => {
                        source.gens().all().find(|g| source.gens().generator_monomial(*g) == *m)
                    }
                    _ => None,
                }
            })
            .collect::<Option<Vec<Gen>>>();
        let f = AlgebroidMorphism { source, target, images, renaming };
        for g in tg.all() {
            let lhs = f.pullback_forms(f.target.differential().image(g));
            let rhs = f.source.d(&f.images[g.0]);
            if lhs != rhs {
                return Err(MorphismError::NotChainMap(tg.name(g).to_string()));
            }
        }
        Ok(f)
    }

    pub fn identity(pres: &AlgebroidPresentation) -> Result<Self, MorphismError> {
        let gens = pres.gens();
        let images = gens.all().map(|g| GradedElement::generator(gens, g)).collect();
        Self::new(pres, pres, images)
    }

    pub fn source(&self) -> &DeRhamComplex {
        &self.source
    }

    pub fn target(&self) -> &DeRhamComplex {
        &self.target
    }

    pub fn images(&self) -> &[GradedElement] {
        &self.images
    }

    pub fn source_gens(&self) -> &Arc<GeneratorSet> {
        self.source.gens()
    }

    pub fn target_gens(&self) -> &Arc<GeneratorSet> {
        self.target.gens()
    }

    /// `F*` on a single monomial of `C(B)`.
    pub fn pullback_monomial(&self, m: &Monomial) -> GradedElement {
        let sg = self.source.gens();
        let tg = self.target.gens();
        if let Some(map) = &self.renaming {
            return GradedElement::monomial(tg, m.clone(), Scalar::one()).map_generators(sg, map);
        }
        let mut out = GradedElement::one(sg);
        for (i, e) in m.exponents().iter().enumerate() {
            for _ in 0..*e {
                out = &out * &self.images[i];
            }
        }
        for j in m.odd_indices() {
            out = &out * &self.images[tg.n_even() + j];
        }
        out
    }

    /// `F*ω`, the multiplicative extension of the generator images.
    pub fn pullback_forms(&self, omega: &GradedElement) -> GradedElement {
        let mut out = GradedElement::zero(self.source.gens());
        for (m, c) in omega.terms() {
            out += &self.pullback_monomial(m).scale(c);
        }
        out
    }
}

/// `pullback_forms` as a free function.
pub fn pullback_forms(f: &AlgebroidMorphism, omega: &GradedElement) -> GradedElement {
    f.pullback_forms(omega)
}

/// `Z ∈ C(F)`: a graded map `C(B) → C(A)` with
/// `Z(ω₁ω₂) = Z(ω₁)F*(ω₂) + (−1)^{|Z||ω₁|}F*(ω₁)Z(ω₂)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RelativeCochain {
    degree: i32,
    images: Vec<GradedElement>,
}

impl RelativeCochain {
    pub fn new(f: &AlgebroidMorphism, degree: i32, images: Vec<GradedElement>) -> Result<Self, MorphismError> {
        let tg = f.target_gens();
        if images.len() != tg.len() {
            return Err(MorphismError::ImageCount { expected: tg.len(), found: images.len() });
        }
        for (g, img) in tg.all().zip(&images) {
            if **img.gens() != **f.source_gens() || !img.is_homogeneous_of(tg.degree(g) as i32 + degree) {
                return Err(MorphismError::BadImage(tg.name(g).to_string()));
            }
        }
        Ok(RelativeCochain { degree, images })
    }

    pub fn zero(f: &AlgebroidMorphism, degree: i32) -> Self {
        let sg = f.source_gens();
        RelativeCochain { degree, images: f.target_gens().all().map(|_| GradedElement::zero(sg)).collect() }
    }

    pub fn from_cells<I>(f: &AlgebroidMorphism, degree: i32, cells: I) -> Result<Self, MorphismError>
    where
        I: IntoIterator<Item = (DerivationCell, Scalar)>,
    {
        let mut z = Self::zero(f, degree);
        for (cell, c) in cells {
            z.images[cell.gen.0].add_term(cell.mono, c);
        }
        Self::new(f, degree, z.images)
    }

    pub fn degree(&self) -> i32 {
        self.degree
    }

    pub fn images(&self) -> &[GradedElement] {
        &self.images
    }

    pub fn is_zero(&self) -> bool {
        self.images.iter().all(GradedElement::is_zero)
    }

    pub fn cells(&self) -> Vec<(DerivationCell, Scalar)> {
        let mut out = Vec::new();
        for (g, img) in self.images.iter().enumerate() {
            for (m, c) in img.terms() {
                out.push((DerivationCell { gen: Gen(g), mono: m.clone() }, c.clone()));
            }
        }
        out
    }

    /// `Z(ω)` by the relative Leibniz rule.
    pub fn apply(&self, f: &AlgebroidMorphism, omega: &GradedElement) -> GradedElement {
        relative_leibniz(
            f.target_gens(),
            f.source_gens(),
            self.degree.rem_euclid(2) == 1,
            &self.images,
            &|m| f.pullback_monomial(m),
            omega,
        )
    }
}

/// `δZ = d_A∘Z − (−1)^{|Z|} Z∘d_B`.
pub fn relative_delta(z: &RelativeCochain, f: &AlgebroidMorphism) -> RelativeCochain {
    let sign_neg = z.degree.rem_euclid(2) == 0;
    let images = f
        .target_gens()
        .all()
        .map(|g| {
            let a = f.source().d(&z.images[g.0]);
            let b = z.apply(f, f.target().differential().image(g));
            if sign_neg {
                &a - &b
            } else {
                &a + &b
            }
        })
        .collect();
    RelativeCochain { degree: z.degree + 1, images }
}

/// `F★X = X∘F*` for a cochain on the source.
pub fn lower_star(f: &AlgebroidMorphism, x: &DefCochain) -> Result<RelativeCochain, MorphismError> {
    if **x.gens() != **f.source_gens() {
        return Err(MorphismError::Mismatch);
    }
    let images = f.images.iter().map(|img| x.derivation().apply_unchecked(img)).collect();
    Ok(RelativeCochain { degree: x.degree(), images })
}

/// `F⋆Y = F*∘Y` for a cochain on the target.
pub fn upper_star(f: &AlgebroidMorphism, y: &DefCochain) -> Result<RelativeCochain, MorphismError> {
    if **y.gens() != **f.target_gens() {
        return Err(MorphismError::Mismatch);
    }
    let images = y.derivation().images().iter().map(|img| f.pullback_forms(img)).collect();
    Ok(RelativeCochain { degree: y.degree(), images })
}

/// `(C(F), δ)` as a blockwise complex. Cells `(g, m)` send the generator `g`
/// of `C(B)` to the monomial `m` of `C(A)`.
#[derive(Clone, Debug)]
pub struct RelativeComplex {
    morphism: AlgebroidMorphism,
}

impl RelativeComplex {
    pub fn new(morphism: AlgebroidMorphism) -> Self {
        RelativeComplex { morphism }
    }

    pub fn morphism(&self) -> &AlgebroidMorphism {
        &self.morphism
    }
}

impl CochainComplex for RelativeComplex {
    type Cell = DerivationCell;

    fn id(&self) -> String {
        format!(
            "rel({} -> {})",
            self.morphism.source.presentation().name(),
            self.morphism.target.presentation().name()
        )
    }

    fn cells(&self, degree: i32, weight: i32) -> Vec<DerivationCell> {
        derivation_cells(self.morphism.source_gens(), self.morphism.target_gens(), degree, weight)
    }

    fn differential(&self, cell: &DerivationCell) -> Vec<(DerivationCell, Scalar)> {
        let f = &self.morphism;
        let degree = cell.mono.degree() as i32 - f.target_gens().degree(cell.gen) as i32;
        let z = RelativeCochain::from_cells(f, degree, [(cell.clone(), Scalar::one())]).expect("basis cell");
        relative_delta(&z, f).cells()
    }
}
