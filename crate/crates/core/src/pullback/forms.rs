//! Differential forms on `P = M × R^k`, the decomposition of derivations as
//! `L_J + i_K`, and the contracting homotopy `h(V) = (−1)^{|V|} i_J`.

use std::sync::Arc;

use num::One;

use super::PullbackError;
use crate::graded::{
    basis_enumerate, derivation_cells, EvenGenerator, Gen, GeneratorSet, GradedDerivation, GradedElement,
    OddGenerator, OddOrigin, Scalar,
};
use crate::linalg::rank_of_vectors;

/// `Ω(P)`: polynomials in the coordinates tensor the exterior algebra on
/// their differentials `d<x>`, with the de Rham differential.
#[derive(Clone, Debug)]
pub struct FormAlgebra {
    gens: Arc<GeneratorSet>,
    vertical: Vec<bool>,
    d: GradedDerivation,
}

impl FormAlgebra {
    /// Coordinates `(name, weight, vertical)`.
    pub fn new(coords: &[(String, u32, bool)]) -> Result<Self, PullbackError> {
        let even = coords.iter().map(|(n, w, _)| EvenGenerator { name: n.clone(), weight: *w }).collect();
        let odd = coords
            .iter()
            .map(|(n, w, v)| OddGenerator {
                name: format!("d{n}"),
                weight: *w as i32,
                origin: if *v { OddOrigin::VerticalForm } else { OddOrigin::FiberDual },
            })
            .collect();
        let gens = GeneratorSet::new(even, odd)?;
        let n = coords.len();
        let d = GradedDerivation::from_images(
            &gens,
            1,
            (0..n).map(|a| (Gen(a), GradedElement::generator(&gens, gens.odd_gen(a)))),
        )?;
        Ok(FormAlgebra { gens, vertical: coords.iter().map(|c| c.2).collect(), d })
    }

    /// `M × R^k` with base coordinates first.
    pub fn product(base: &[(&str, u32)], fiber: &[(&str, u32)]) -> Result<Self, PullbackError> {
        let coords: Vec<(String, u32, bool)> = base
            .iter()
            .map(|(n, w)| (n.to_string(), *w, false))
            .chain(fiber.iter().map(|(n, w)| (n.to_string(), *w, true)))
            .collect();
        Self::new(&coords)
    }

    pub fn gens(&self) -> &Arc<GeneratorSet> {
        &self.gens
    }

    pub fn dim(&self) -> usize {
        self.vertical.len()
    }

    pub fn is_vertical(&self, a: usize) -> bool {
        self.vertical[a]
    }

    pub fn coordinate(&self, a: usize) -> Gen {
        Gen(a)
    }

    pub fn differential_gen(&self, a: usize) -> Gen {
        self.gens.odd_gen(a)
    }

    pub fn d(&self) -> &GradedDerivation {
        &self.d
    }

    /// `i_K`: `x ↦ 0`, `dx^a ↦ K^a`.
    pub fn contraction(&self, k: &FormValuedVectorField) -> GradedDerivation {
        let degree = k.form_degree - 1;
        if k.is_zero() {
            return GradedDerivation::zero(&self.gens, degree);
        }
        let images = k.components.iter().enumerate().map(|(a, c)| (self.differential_gen(a), c.clone()));
        GradedDerivation::from_images(&self.gens, degree, images).expect("homogeneous components")
    }

    /// `L_J = [i_J, d]`.
    pub fn lie_derivative(&self, j: &FormValuedVectorField) -> GradedDerivation {
        if j.is_zero() {
            return GradedDerivation::zero(&self.gens, j.form_degree);
        }
        self.contraction(j).commutator(&self.d).expect("same generators")
    }

    /// `[d, V]`.
    pub fn bracket_d(&self, v: &GradedDerivation) -> GradedDerivation {
        self.d.commutator(v).expect("same generators")
    }
}

/// A vector-valued form `Σ_a J^a ⊗ ∂/∂x^a`.
#[derive(Clone, Debug, PartialEq)]
pub struct FormValuedVectorField {
    pub form_degree: i32,
    pub components: Vec<GradedElement>,
}

impl FormValuedVectorField {
    pub fn zero(fa: &FormAlgebra, form_degree: i32) -> Self {
        FormValuedVectorField {
            form_degree,
            components: (0..fa.dim()).map(|_| GradedElement::zero(fa.gens())).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(GradedElement::is_zero)
    }

    /// Components along base coordinates vanish.
    pub fn is_vertical(&self, fa: &FormAlgebra) -> bool {
        self.components.iter().enumerate().all(|(a, c)| fa.is_vertical(a) || c.is_zero())
    }

    /// Basis `m ⊗ ∂/∂x^a` with `deg m = form_degree` and weight shift
    /// `weight`, optionally restricted to vertical directions.
    pub fn basis(fa: &FormAlgebra, form_degree: i32, weight: i32, vertical_only: bool) -> Vec<Self> {
        let mut out = Vec::new();
        for a in (0..fa.dim()).filter(|a| !vertical_only || fa.is_vertical(*a)) {
            let w = fa.gens.weight(fa.coordinate(a)) + weight;
            for m in basis_enumerate(&fa.gens, form_degree, w) {
                let mut f = Self::zero(fa, form_degree);
                f.components[a] = GradedElement::monomial(&fa.gens, m, Scalar::one());
                out.push(f);
            }
        }
        out
    }
}

/// `V = L_J + i_K` with `J^a = V(x^a)` and `K^a = (V − L_J)(dx^a)`.
pub fn fn_decompose(
    fa: &FormAlgebra,
    v: &GradedDerivation,
) -> Result<(FormValuedVectorField, FormValuedVectorField), PullbackError> {
    if **v.gens() != *fa.gens {
        return Err(crate::graded::AlgebraError::GeneratorMismatch.into());
    }
    let deg = v.degree();
    let j = FormValuedVectorField {
        form_degree: deg,
        components: (0..fa.dim()).map(|a| v.image(fa.coordinate(a)).clone()).collect(),
    };
    let rest = v.try_sub(&fa.lie_derivative(&j))?;
    let k = FormValuedVectorField {
        form_degree: deg + 1,
        components: (0..fa.dim()).map(|a| rest.image(fa.differential_gen(a)).clone()).collect(),
    };
    let rebuilt = fa.lie_derivative(&j).try_add(&fa.contraction(&k))?;
    if rebuilt.images() != v.images() {
        return Err(PullbackError::Inhomogeneous);
    }
    Ok((j, k))
}

/// The map `(J, K) ↦ L_J + i_K` is injective on the `(degree, weight)`
/// block: the images of a basis are linearly independent.
pub fn decomposition_injective(fa: &FormAlgebra, degree: i32, weight: i32) -> bool {
    let cells = derivation_cells(&fa.gens, &fa.gens, degree, weight);
    let index: std::collections::HashMap<_, _> = cells.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
    let mut images: Vec<GradedDerivation> = Vec::new();
    if degree >= 0 {
        images.extend(FormValuedVectorField::basis(fa, degree, weight, false).iter().map(|j| fa.lie_derivative(j)));
    }
    images.extend(FormValuedVectorField::basis(fa, degree + 1, weight, false).iter().map(|k| fa.contraction(k)));
    let vectors: Vec<Vec<Scalar>> = images
        .iter()
        .map(|v| {
            let mut vec = vec![Scalar::from_integer(0.into()); cells.len()];
            for (cell, c) in v.cells() {
                vec[index[&cell]] += c;
            }
            vec
        })
        .collect();
    rank_of_vectors(&vectors) == vectors.len()
}

/// Basis of vertical derivations: `L_J` and `i_K` for vertical basis
/// fields `J`, `K`.
pub fn vertical_derivation_basis(fa: &FormAlgebra, degree: i32, weight: i32) -> Vec<GradedDerivation> {
    let mut out = Vec::new();
    if degree >= 0 {
        out.extend(FormValuedVectorField::basis(fa, degree, weight, true).iter().map(|j| fa.lie_derivative(j)));
    }
    out.extend(FormValuedVectorField::basis(fa, degree + 1, weight, true).iter().map(|k| fa.contraction(k)));
    out
}

/// `h(V) = (−1)^{|V|} i_J`.
pub fn homotopy_h(fa: &FormAlgebra, v: &GradedDerivation, vertical_check: bool) -> Result<GradedDerivation, PullbackError> {
    let (j, k) = fn_decompose(fa, v)?;
    if vertical_check && !(j.is_vertical(fa) && k.is_vertical(fa)) {
        return Err(PullbackError::NotVertical);
    }
    let i_j = fa.contraction(&j);
    Ok(if v.degree().rem_euclid(2) == 1 { i_j.scale(&-Scalar::one()) } else { i_j })
}

/// `V − [d, h(V)] − h([d, V])`; zero exactly when the homotopy law holds.
pub fn homotopy_residual(fa: &FormAlgebra, v: &GradedDerivation) -> Result<GradedDerivation, PullbackError> {
    let hv = homotopy_h(fa, v, true)?;
    let first = fa.bracket_d(&hv);
    let second = homotopy_h(fa, &fa.bracket_d(v), false)?;
    Ok(v.try_sub(&first)?.try_sub(&second)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plane() -> FormAlgebra {
        FormAlgebra::product(&[("x", 1)], &[("u", 1)]).unwrap()
    }

    #[test]
    fn de_rham_is_lie_of_identity() {
        let fa = plane();
        let (j, k) = fn_decompose(&fa, fa.d()).unwrap();
        assert!(k.is_zero());
        for a in 0..2 {
            assert_eq!(j.components[a], GradedElement::generator(fa.gens(), fa.differential_gen(a)));
        }
    }

    #[test]
    fn contraction_and_lie_derivative() {
        let fa = plane();
        let g = fa.gens();
        let mut x = FormValuedVectorField::zero(&fa, 0);
        x.components[1] = GradedElement::generator(g, fa.coordinate(0));
        let i_x = fa.contraction(&x);
        let (j, k) = fn_decompose(&fa, &i_x).unwrap();
        assert!(j.is_zero());
        assert_eq!(k, x);
        let l_x = fa.lie_derivative(&x);
        let (j, k) = fn_decompose(&fa, &l_x).unwrap();
        assert_eq!(j, x);
        assert!(k.is_zero());
    }

    #[test]
    fn cartan_branch_of_the_law() {
        let fa = plane();
        let mut x = FormValuedVectorField::zero(&fa, 0);
        x.components[1] = GradedElement::generator(fa.gens(), fa.coordinate(1));
        let i_x = fa.contraction(&x);
        assert!(homotopy_h(&fa, &i_x, true).unwrap().is_zero());
        assert!(homotopy_residual(&fa, &i_x).unwrap().is_zero());
        let l_x = fa.lie_derivative(&x);
        assert_eq!(homotopy_h(&fa, &l_x, true).unwrap(), i_x);
        assert!(homotopy_residual(&fa, &l_x).unwrap().is_zero());
    }

    #[test]
    fn non_vertical_rejected() {
        let fa = plane();
        let mut x = FormValuedVectorField::zero(&fa, 0);
        x.components[0] = GradedElement::one(fa.gens());
        let l_x = fa.lie_derivative(&x);
        assert_eq!(homotopy_h(&fa, &l_x, true).unwrap_err(), PullbackError::NotVertical);
    }

    #[test]
    fn decomposition_is_injective() {
        let fa = plane();
        for degree in -1..=2 {
            for weight in -1..=2 {
                assert!(decomposition_injective(&fa, degree, weight), "degree {degree} weight {weight}");
            }
        }
    }
}
