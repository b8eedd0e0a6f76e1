//! `K = ker Π★ ⊂ C_def(π!A)`: derivations of `C(π!A)` that vanish on the
//! pulled-back generators, i.e. combinations of `m ∂/∂u` and `m ∂/∂η`.

use std::collections::HashSet;

use num::{One, Zero};
use serde::Serialize;

use super::{PullbackError, PullbackPresentation};
use crate::algebroid::{build_differential, DeRhamComplex};
use crate::cohomology::{block_matrix, CochainComplex};
use crate::graded::{derivation_cells, DerivationCell, Gen, GradedDerivation, Scalar};

#[derive(Clone, Debug)]
pub struct KernelComplex {
    total: DeRhamComplex,
    /// `(u_a, η^a)` pairs.
    fiber: Vec<(Gen, Gen)>,
    vertical: HashSet<Gen>,
}

impl KernelComplex {
    pub fn new(pp: &PullbackPresentation) -> Result<Self, PullbackError> {
        let total = build_differential(&pp.presentation)?;
        let fiber: Vec<(Gen, Gen)> = pp.fiber_coordinates().zip(pp.vertical_duals()).collect();
        let vertical = fiber.iter().flat_map(|(u, e)| [*u, *e]).collect();
        Ok(KernelComplex { total, fiber, vertical })
    }

    fn as_derivation(&self, cell: &DerivationCell) -> GradedDerivation {
        let g = self.total.gens();
        GradedDerivation::from_cells(g, cell.degree(g), [(cell.clone(), Scalar::one())]).expect("basis cell")
    }

    /// `h(X) = (−1)^{|X|} i_J` with `J^a = X(u^a)`: the derivation sending
    /// `η^a ↦ (−1)^{|X|} X(u^a)` and every other generator to zero.
    pub fn homotopy(&self, x: &GradedDerivation) -> GradedDerivation {
        let g = self.total.gens();
        let degree = x.degree() - 1;
        if degree < -1 {
            return GradedDerivation::zero(g, degree);
        }
        let sign = if x.degree().rem_euclid(2) == 1 { -Scalar::one() } else { Scalar::one() };
        let images = self.fiber.iter().map(|(u, eta)| (*eta, x.image(*u).scale(&sign)));
        GradedDerivation::from_images(g, degree, images).expect("homogeneous images")
    }

    /// `[d, X]`.
    pub fn delta(&self, x: &GradedDerivation) -> GradedDerivation {
        self.total.differential().commutator(x).expect("same generators")
    }

    /// Whether `X = [d, hX] + h([d, X])` holds exactly.
    pub fn homotopy_law(&self, x: &GradedDerivation) -> bool {
        let hx = self.homotopy(x);
        let rhs = self.delta(&hx);
        let second = self.homotopy(&self.delta(x));
        rhs.images().iter().zip(second.images()).zip(x.images()).all(|((a, b), c)| &(a + b) == c)
    }
}

impl CochainComplex for KernelComplex {
    type Cell = DerivationCell;

    fn id(&self) -> String {
        format!("ker({})", self.total.presentation().name())
    }

    fn cells(&self, degree: i32, weight: i32) -> Vec<DerivationCell> {
        if degree < -1 {
            return Vec::new();
        }
        let g = self.total.gens();
        derivation_cells(g, g, degree, weight).into_iter().filter(|c| self.vertical.contains(&c.gen)).collect()
    }

    fn differential(&self, cell: &DerivationCell) -> Vec<(DerivationCell, Scalar)> {
        self.delta(&self.as_derivation(cell)).cells()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KernelReport {
    pub degree: i32,
    pub weight: i32,
    pub dimension: usize,
    pub cohomology: usize,
    /// Basis cells on which the homotopy law fails.
    pub homotopy_failures: usize,
    pub acyclic: bool,
}

pub fn kernel_acyclicity_check(
    pp: &PullbackPresentation,
    degree: i32,
    weight: i32,
) -> Result<KernelReport, PullbackError> {
    let k = KernelComplex::new(pp)?;
    let cells = k.cells(degree, weight);
    let rank_out = block_matrix(&k, degree, weight).rank();
    let rank_in = block_matrix(&k, degree - 1, weight).rank();
    let cohomology = cells.len() - rank_out - rank_in;
    let homotopy_failures = cells.iter().filter(|c| !k.homotopy_law(&k.as_derivation(c))).count();
    Ok(KernelReport {
        degree,
        weight,
        dimension: cells.len(),
        cohomology,
        homotopy_failures,
        acyclic: cohomology.is_zero() && homotopy_failures == 0,
    })
}
