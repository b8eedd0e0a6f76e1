//! Pull-back algebroids `π!A` along coordinate submersions `M × R^k → M`.
//!
//! Layout of `π!A`: coordinates are the base coordinates followed by the
//! fiber coordinates `u`; the frame is the vertical block `v_<u>` (dual
//! `η`, anchor `∂/∂u`) followed by the lifted frame, which keeps the
//! original names.

mod forms;
mod kernel;
mod spectral;

pub use forms::{
    decomposition_injective, fn_decompose, homotopy_h, homotopy_residual, vertical_derivation_basis, FormAlgebra,
    FormValuedVectorField,
};
pub use kernel::{kernel_acyclicity_check, KernelComplex, KernelReport};
pub use spectral::{e1_row_check, e_page, RowCheck, SpectralBlock};

use std::collections::HashSet;
use std::sync::Arc;

use num::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::algebroid::{build_differential, validate, AlgebroidError, AlgebroidPresentation};
use crate::cohomology::ComplexKind;
use crate::deformation::DeformationComplex;
use crate::graded::{
    basis_enumerate, derivation_cells, AlgebraError, EvenGenerator, GeneratorSet, GradedDerivation, GradedElement,
    Monomial, OddGenerator, OddOrigin, Scalar,
};
use crate::linalg::SparseRationalMatrix;
use crate::morphism::{AlgebroidMorphism, MorphismError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PullbackError {
    #[error("a submersion needs at least one fiber coordinate")]
    EmptyFiber,
    #[error("fiber coordinate `{0}` must have weight >= 1")]
    FiberWeight(String),
    #[error("name `{0}` is used twice in the pull-back")]
    NameCollision(String),
    #[error("submersion base does not match the coordinates of `{0}`")]
    BaseMismatch(String),
    #[error("pull-back fails validation: {0}")]
    Invalid(String),
    #[error("page index out of range: p = {p}, q = {q}")]
    OutOfRange { p: i32, q: i32 },
    #[error("differential lowers the filtration at p = {p}, q = {q}, weight {weight}")]
    FiltrationViolation { p: i32, q: i32, weight: i32 },
    #[error("d0 differs from d^V ⊗ id at p = {p}, q = {q}, weight {weight}")]
    D0Mismatch { p: i32, q: i32, weight: i32 },
    #[error("derivation is not homogeneous")]
    Inhomogeneous,
    #[error("decomposition of the derivation is not vertical")]
    NotVertical,
    #[error(transparent)]
    Algebroid(#[from] AlgebroidError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Morphism(#[from] MorphismError),
}

/// Trivial submersion `π : M × R^k → M`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubmersionSpec {
    pub base: Vec<(String, u32)>,
    pub fiber: Vec<(String, u32)>,
}

impl SubmersionSpec {
    pub fn new(base: Vec<(String, u32)>, fiber: Vec<(String, u32)>) -> Result<Self, PullbackError> {
        if fiber.is_empty() {
            return Err(PullbackError::EmptyFiber);
        }
        let mut seen = HashSet::new();
        for (n, _) in &base {
            seen.insert(n.clone());
        }
        for (n, w) in &fiber {
            if *w == 0 {
                return Err(PullbackError::FiberWeight(n.clone()));
            }
            if !seen.insert(n.clone()) {
                return Err(PullbackError::NameCollision(n.clone()));
            }
        }
        Ok(SubmersionSpec { base, fiber })
    }

    /// Submersion over the base of `pres` with the given fiber coordinates.
    pub fn over(pres: &AlgebroidPresentation, fiber: &[(&str, u32)]) -> Result<Self, PullbackError> {
        Self::new(
            pres.base().iter().map(|g| (g.name.clone(), g.weight)).collect(),
            fiber.iter().map(|(n, w)| (n.to_string(), *w)).collect(),
        )
    }

    /// Fiber dimension `k`.
    pub fn fiber_dim(&self) -> usize {
        self.fiber.len()
    }
}

/// Name of the vertical frame section along the fiber coordinate `u`.
pub fn vertical_name(u: &str) -> String {
    format!("v_{u}")
}

#[derive(Clone, Debug)]
pub struct PullbackPresentation {
    pub presentation: AlgebroidPresentation,
    /// The algebroid `A` that was pulled back.
    pub original: AlgebroidPresentation,
    pub submersion: SubmersionSpec,
    /// `Π : π!A → A`.
    pub projection: AlgebroidMorphism,
    /// Frame indices of the vertical sections `v_a`.
    pub vertical_marker: Vec<usize>,
    /// `VP → π!A` in frame coordinates, `(k + r) × k`.
    pub inclusion: SparseRationalMatrix,
    /// `π!A → π*A` in frame coordinates, `r × (k + r)`.
    pub projection_matrix: SparseRationalMatrix,
}

impl PullbackPresentation {
    pub fn fiber_dim(&self) -> usize {
        self.submersion.fiber_dim()
    }

    pub fn gens(&self) -> &Arc<GeneratorSet> {
        self.presentation.gens()
    }

    /// Fiber coordinates `u` as generators of `C(π!A)`.
    pub fn fiber_coordinates(&self) -> impl Iterator<Item = crate::graded::Gen> + '_ {
        let n = self.original.base_dim();
        (0..self.fiber_dim()).map(move |a| self.presentation.coord(n + a))
    }

    /// Odd duals `η` of the vertical frame.
    pub fn vertical_duals(&self) -> impl Iterator<Item = crate::graded::Gen> + '_ {
        self.vertical_marker.iter().map(|i| self.presentation.xi(*i))
    }

    /// `Π*`: the inclusion `C(A) → C(π!A)`.
    pub fn pull(&self, omega: &GradedElement) -> GradedElement {
        self.projection.pullback_forms(omega)
    }
}

pub fn pullback_algebroid(
    pres: &AlgebroidPresentation,
    sub: &SubmersionSpec,
) -> Result<PullbackPresentation, PullbackError> {
    let base: Vec<(String, u32)> = pres.base().iter().map(|g| (g.name.clone(), g.weight)).collect();
    if base != sub.base {
        return Err(PullbackError::BaseMismatch(pres.name().to_string()));
    }
    let k = sub.fiber_dim();
    let r = pres.rank();
    let n = pres.base_dim();
    let mut coords = base.clone();
    coords.extend(sub.fiber.iter().cloned());
    let mut frame: Vec<(String, i32, OddOrigin)> =
        sub.fiber.iter().map(|(u, w)| (vertical_name(u), *w as i32, OddOrigin::VerticalForm)).collect();
    frame.extend(pres.frame().iter().map(|g| (g.name.clone(), g.weight, OddOrigin::FiberDual)));
    let mut seen = HashSet::new();
    for name in coords.iter().map(|c| &c.0).chain(frame.iter().map(|f| &f.0)) {
        if !seen.insert(name.clone()) {
            return Err(PullbackError::NameCollision(name.clone()));
        }
    }
    let mut total = AlgebroidPresentation::with_origins(&format!("pi!{}", pres.name()), &coords, &frame)?;
    let tg = total.gens().clone();
    for a in 0..k {
        total.set_anchor(a, n + a, GradedElement::one(&tg))?;
    }
    for i in 0..r {
        for a in 0..n {
            total.set_anchor(k + i, a, pres.anchor(i, a).transport(&tg)?)?;
        }
    }
    for ((i, j), row) in pres.bracket_rows() {
        for (m, c) in row.iter().enumerate() {
            total.set_bracket(k + i, k + j, k + m, c.transport(&tg)?)?;
        }
    }
    let report = validate(&total)?;
    if !report.passed {
        return Err(PullbackError::Invalid(report.to_string()));
    }
    let images = pres.gens().all().map(|g| {
        let t = tg.lookup(pres.gens().name(g)).expect("names are carried over");
        GradedElement::generator(&tg, t)
    });
    let projection = AlgebroidMorphism::new(&total, pres, images.collect())?;
    let mut inclusion = SparseRationalMatrix::zeros(k + r, k);
    for a in 0..k {
        inclusion.set(a, a, Scalar::one());
    }
    let mut projection_matrix = SparseRationalMatrix::zeros(r, k + r);
    for i in 0..r {
        projection_matrix.set(i, k + i, Scalar::one());
    }
    Ok(PullbackPresentation {
        presentation: total,
        original: pres.clone(),
        submersion: sub.clone(),
        projection,
        vertical_marker: (0..k).collect(),
        inclusion,
        projection_matrix,
    })
}

/// Exactness of `0 → VP → π!A → π*A → 0` in frame coordinates, together
/// with compatibility of both maps with the anchors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SesReport {
    pub vertical_rank: usize,
    pub base_rank: usize,
    pub total_rank: usize,
    pub rank_additive: bool,
    pub inclusion_injective: bool,
    pub projection_surjective: bool,
    pub composition_zero: bool,
    pub exact_in_middle: bool,
    pub anchors_compatible: bool,
    pub pass: bool,
}

pub fn ses_check(pp: &PullbackPresentation) -> SesReport {
    let k = pp.fiber_dim();
    let r = pp.original.rank();
    let total_rank = pp.presentation.rank();
    let (inc, proj) = (&pp.inclusion, &pp.projection_matrix);
    let shapes_ok = inc.rows() == total_rank && inc.cols() == k && proj.rows() == r && proj.cols() == total_rank;
    let inclusion_injective = shapes_ok && inc.rank() == k;
    let projection_surjective = shapes_ok && proj.rank() == r;
    let composition_zero = shapes_ok && proj.mul(inc).is_zero();
    let exact_in_middle = shapes_ok && inc.rank() + proj.rank() == total_rank;
    let anchors_compatible = shapes_ok && anchors_compatible(pp);
    let rank_additive = k + r == total_rank;
    SesReport {
        vertical_rank: k,
        base_rank: r,
        total_rank,
        rank_additive,
        inclusion_injective,
        projection_surjective,
        composition_zero,
        exact_in_middle,
        anchors_compatible,
        pass: rank_additive
            && inclusion_injective
            && projection_surjective
            && composition_zero
            && exact_in_middle
            && anchors_compatible,
    }
}

/// `ρ(I v_a) = ∂/∂u_a` and `Tπ ∘ ρ = π*ρ_A ∘ P`.
fn anchors_compatible(pp: &PullbackPresentation) -> bool {
    let total = &pp.presentation;
    let tg = total.gens();
    let n = pp.original.base_dim();
    let combine = |coeffs: &[Scalar], a: usize| {
        let mut acc = GradedElement::zero(tg);
        for (i, c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                acc += &total.anchor(i, a).scale(c);
            }
        }
        acc
    };
    for j in 0..pp.fiber_dim() {
        let col = pp.inclusion.column(j);
        for a in 0..total.base_dim() {
            let expected = if a == n + j { GradedElement::one(tg) } else { GradedElement::zero(tg) };
            if combine(&col, a) != expected {
                return false;
            }
        }
    }
    for i in 0..total.rank() {
        let col = pp.projection_matrix.column(i);
        for a in 0..n {
            let mut rhs = GradedElement::zero(tg);
            for (l, c) in col.iter().enumerate() {
                if !c.is_zero() {
                    rhs += &pp.pull(pp.original.anchor(l, a)).scale(c);
                }
            }
            if total.anchor(i, a) != &rhs {
                return false;
            }
        }
    }
    true
}

/// `d^V`: `u_a ↦ η^a`, every other generator ↦ 0.
pub fn vertical_de_rham(pp: &PullbackPresentation) -> GradedDerivation {
    let tg = pp.gens();
    let images: Vec<_> = pp
        .fiber_coordinates()
        .zip(pp.vertical_duals())
        .map(|(u, eta)| (u, GradedElement::generator(tg, eta)))
        .collect();
    GradedDerivation::from_images(tg, 1, images).expect("homogeneous by construction")
}

/// `(#η, #ξ̄)` of a monomial of `C(π!A)`.
pub(crate) fn form_counts(gens: &GeneratorSet, m: &Monomial) -> (usize, usize) {
    let eta = m.odd_indices().filter(|j| gens.odds()[*j].origin == OddOrigin::VerticalForm).count();
    (eta, m.degree() - eta)
}

/// Largest `p` with `a ∈ F_p`, the minimum number of lifted-frame factors
/// over the monomials of `a`; `None` for zero.
pub fn filtration_level(a: &GradedElement) -> Option<usize> {
    let gens = a.gens();
    a.terms().keys().map(|m| form_counts(gens, m).1).min()
}

/// `VΩ`: polynomials in the fiber coordinates tensor the exterior algebra
/// on their differentials.
fn fiber_forms(pp: &PullbackPresentation) -> Arc<GeneratorSet> {
    let tg = pp.gens();
    let even = pp.fiber_coordinates().map(|g| EvenGenerator { name: tg.name(g).to_string(), weight: tg.weight(g) as u32 });
    let odd = pp.vertical_duals().map(|g| OddGenerator {
        name: tg.name(g).to_string(),
        weight: tg.weight(g),
        origin: OddOrigin::VerticalForm,
    });
    GeneratorSet::new(even.collect(), odd.collect()).expect("fiber names are distinct")
}

/// Dimension comparison of one block of `C(π!A) ≅ VΩ ⊗ C(A)` (kind dr) or
/// `C(Π) ≅ VΩ ⊗ C_def(A)` (kind def).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TensorBlock {
    pub degree: i32,
    pub weight: i32,
    pub direct: usize,
    pub tensor: usize,
    pub pass: bool,
}

/// Smallest weight of a degree-`d` cell of `C(A)` (kind dr) or `C_def(A)`
/// (kind def); weights of even generators are positive.
fn min_weight(gens: &GeneratorSet, kind: ComplexKind, d: i32) -> Option<i32> {
    let mut odd: Vec<i32> = gens.odds().iter().map(|g| g.weight).collect();
    odd.sort_unstable();
    let lowest = |deg: i32| -> Option<i32> {
        (deg >= 0 && deg as usize <= odd.len()).then(|| odd[..deg as usize].iter().sum())
    };
    match kind {
        ComplexKind::Dr => lowest(d),
        ComplexKind::Def => gens
            .all()
            .filter_map(|g| lowest(d + gens.degree(g) as i32).map(|w| w - gens.weight(g)))
            .min(),
    }
}

pub fn tensor_model_check(
    pp: &PullbackPresentation,
    kind: ComplexKind,
    degrees: std::ops::RangeInclusive<i32>,
    weights: std::ops::RangeInclusive<i32>,
) -> Vec<TensorBlock> {
    let fiber = fiber_forms(pp);
    let ag = pp.original.gens();
    let tg = pp.gens();
    let base_dim = |d: i32, w: i32| match kind {
        ComplexKind::Dr => basis_enumerate(ag, d, w).len(),
        ComplexKind::Def => derivation_cells(ag, ag, d, w).len(),
    };
    let mut out = Vec::new();
    for w in weights {
        for d in degrees.clone() {
            let direct = match kind {
                ComplexKind::Dr => basis_enumerate(tg, d, w).len(),
                ComplexKind::Def => derivation_cells(tg, ag, d, w).len(),
            };
            let mut tensor = 0;
            for d1 in 0..=pp.fiber_dim() as i32 {
                let Some(lb) = min_weight(ag, kind, d - d1) else { continue };
                for w1 in 0..=(w - lb).max(-1) {
                    let f = basis_enumerate(&fiber, d1, w1).len();
                    if f > 0 {
                        tensor += f * base_dim(d - d1, w - w1);
                    }
                }
            }
            out.push(TensorBlock { degree: d, weight: w, direct, tensor, pass: direct == tensor });
        }
    }
    out
}

/// The deformation complex of the pull-back.
pub fn pullback_def_complex(pp: &PullbackPresentation) -> Result<DeformationComplex, PullbackError> {
    Ok(DeformationComplex::new(build_differential(&pp.presentation)?))
}
