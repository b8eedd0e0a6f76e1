//! `E₀` and `E₁` of the filtration by the number of lifted-frame factors.
//!
//! For kind dr the page lives on `C(π!A)`; for kind def on the relative
//! complex `C(Π)`, whose cells `(g, m)` carry `p = #ξ̄(m) − deg g ≥ −1`.

use std::collections::HashMap;
use std::hash::Hash;

use num::{One, Zero};

use super::{form_counts, vertical_de_rham, PullbackError, PullbackPresentation};
use crate::algebroid::build_differential;
use crate::cohomology::{block_matrix, CochainComplex, ComplexKind};
use crate::deformation::DeformationComplex;
use crate::graded::{basis_enumerate, derivation_cells, DerivationCell, GradedElement, Monomial, Scalar};
use crate::linalg::{rank_of_vectors, solve_in_basis, SparseRationalMatrix};
use crate::morphism::RelativeComplex;

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralBlock {
    pub kind: ComplexKind,
    pub p: i32,
    pub q: i32,
    pub weight: i32,
    pub e0_dimension: usize,
    /// `d₀ : E₀^{p,q} → E₀^{p,q+1}` in the monomial cell bases.
    pub d0_matrix: SparseRationalMatrix,
    pub e1_dimension: usize,
}

fn dr_cells(pp: &PullbackPresentation, p: i32, q: i32, w: i32) -> Vec<Monomial> {
    if p < 0 || q < 0 {
        return Vec::new();
    }
    let g = pp.gens();
    basis_enumerate(g, p + q, w)
        .into_iter()
        .filter(|m| form_counts(g, m) == (q as usize, p as usize))
        .collect()
}

fn def_p(pp: &PullbackPresentation, cell: &DerivationCell) -> (i32, i32) {
    let (eta, bar) = form_counts(pp.gens(), &cell.mono);
    (bar as i32 - pp.original.gens().degree(cell.gen) as i32, eta as i32)
}

fn def_cells(pp: &PullbackPresentation, p: i32, q: i32, w: i32) -> Vec<DerivationCell> {
    if p < -1 || q < 0 {
        return Vec::new();
    }
    derivation_cells(pp.gens(), pp.original.gens(), p + q, w)
        .into_iter()
        .filter(|c| def_p(pp, c) == (p, q))
        .collect()
}

fn matrix_from<C: Clone + Eq + Hash>(target: &[C], images: Vec<Vec<(C, Scalar)>>) -> SparseRationalMatrix {
    let index: HashMap<&C, usize> = target.iter().enumerate().map(|(i, c)| (c, i)).collect();
    let cols: Vec<Vec<(usize, Scalar)>> =
        images.into_iter().map(|col| col.into_iter().map(|(t, c)| (index[&t], c)).collect()).collect();
    SparseRationalMatrix::from_columns(target.len(), &cols)
}

/// Keeps the same-`p` part of a full differential and rejects terms of
/// lower filtration.
fn same_p<C>(
    terms: Vec<(C, Scalar)>,
    level: impl Fn(&C) -> i32,
    p: i32,
    q: i32,
    weight: i32,
) -> Result<Vec<(C, Scalar)>, PullbackError> {
    let mut out = Vec::new();
    for (c, s) in terms {
        match level(&c).cmp(&p) {
            std::cmp::Ordering::Less => return Err(PullbackError::FiltrationViolation { p, q, weight }),
            std::cmp::Ordering::Equal => out.push((c, s)),
            std::cmp::Ordering::Greater => {}
        }
    }
    Ok(out)
}

fn apply_dv(dv: &crate::graded::GradedDerivation, m: &Monomial) -> Vec<(Monomial, Scalar)> {
    let mut out = GradedElement::zero(dv.gens());
    dv.apply_monomial_into(m, &Scalar::one(), &mut out);
    out.into_terms().into_iter().collect()
}

/// `d₀` at `(p, q)` computed twice: as the same-`p` component of the full
/// differential and as `d^V ⊗ id`. The two must agree exactly.
fn d0(pp: &PullbackPresentation, kind: ComplexKind, p: i32, q: i32, w: i32) -> Result<(usize, SparseRationalMatrix), PullbackError> {
    let dv = vertical_de_rham(pp);
    let (dim, full, tensor) = match kind {
        ComplexKind::Dr => {
            let src = dr_cells(pp, p, q, w);
            let tgt = dr_cells(pp, p, q + 1, w);
            let total = build_differential(&pp.presentation)?;
            let g = pp.gens();
            let mut cols = Vec::new();
            for m in &src {
                cols.push(same_p(CochainComplex::differential(&total, m), |c| form_counts(g, c).1 as i32, p, q, w)?);
            }
            let full = matrix_from(&tgt, cols);
            let tensor = matrix_from(&tgt, src.iter().map(|m| apply_dv(&dv, m)).collect());
            (src.len(), full, tensor)
        }
        ComplexKind::Def => {
            let src = def_cells(pp, p, q, w);
            let tgt = def_cells(pp, p, q + 1, w);
            let rel = RelativeComplex::new(pp.projection.clone());
            let mut cols = Vec::new();
            for c in &src {
                cols.push(same_p(rel.differential(c), |c| def_p(pp, c).0, p, q, w)?);
            }
            let full = matrix_from(&tgt, cols);
            let tensor = matrix_from(
                &tgt,
                src.iter()
                    .map(|c| {
                        let terms = apply_dv(&dv, &c.mono);
                        terms.into_iter().map(|(m, s)| (DerivationCell { gen: c.gen, mono: m }, s)).collect()
                    })
                    .collect(),
            );
            (src.len(), full, tensor)
        }
    };
    if full != tensor {
        return Err(PullbackError::D0Mismatch { p, q, weight: w });
    }
    Ok((dim, full))
}

pub fn e_page(
    pp: &PullbackPresentation,
    kind: ComplexKind,
    p: i32,
    q: i32,
    weight: i32,
) -> Result<SpectralBlock, PullbackError> {
    let p_min = match kind {
        ComplexKind::Dr => 0,
        ComplexKind::Def => -1,
    };
    if p < p_min || q < 0 {
        return Err(PullbackError::OutOfRange { p, q });
    }
    let (e0_dimension, d0_matrix) = d0(pp, kind, p, q, weight)?;
    let rank_in = if q > 0 { d0(pp, kind, p, q - 1, weight)?.1.rank() } else { 0 };
    let e1_dimension = e0_dimension - d0_matrix.rank() - rank_in;
    Ok(SpectralBlock { kind, p, q, weight, e0_dimension, d0_matrix, e1_dimension })
}

/// Identification of the row `(E₁^{•,0}, d₁)` with `C(A)` (kind dr) or
/// `C_def(A)` (kind def) at one `(p, weight)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RowCheck {
    pub kind: ComplexKind,
    pub p: i32,
    pub weight: i32,
    pub e1_dimension: usize,
    pub base_dimension: usize,
    /// The pulled-back basis lies in `ker d₀` and is independent.
    pub basis_ok: bool,
    /// `d₁` in the pulled-back bases.
    pub d1_matrix: Option<SparseRationalMatrix>,
    pub base_matrix: SparseRationalMatrix,
    pub pass: bool,
}

/// Dense coordinates of a combination of cells in a cell basis; `None` if
/// some cell is outside the basis.
fn coords<C: Eq + Hash>(basis: &HashMap<C, usize>, n: usize, terms: &[(C, Scalar)]) -> Option<Vec<Scalar>> {
    let mut v = vec![Scalar::zero(); n];
    for (c, s) in terms {
        v[*basis.get(c)?] += s;
    }
    Some(v)
}

struct RowData<C> {
    e0_p: Vec<C>,
    e0_next: Vec<C>,
    /// Images of the base cells at `p` and `p + 1` under `Π*` / `Π⋆`.
    pulled_p: Vec<Vec<(C, Scalar)>>,
    pulled_next: Vec<Vec<(C, Scalar)>>,
}

fn row_check_generic<C: Clone + Eq + Hash>(
    data: RowData<C>,
    d0_p: &SparseRationalMatrix,
    e1_dimension: usize,
    full: impl Fn(&C) -> Vec<(C, Scalar)>,
) -> (bool, Option<SparseRationalMatrix>) {
    let idx_p: HashMap<C, usize> = data.e0_p.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
    let idx_next: HashMap<C, usize> = data.e0_next.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
    let vecs_p: Option<Vec<Vec<Scalar>>> = data.pulled_p.iter().map(|t| coords(&idx_p, data.e0_p.len(), t)).collect();
    let vecs_next: Option<Vec<Vec<Scalar>>> =
        data.pulled_next.iter().map(|t| coords(&idx_next, data.e0_next.len(), t)).collect();
    let (Some(vecs_p), Some(vecs_next)) = (vecs_p, vecs_next) else { return (false, None) };
    let in_kernel = vecs_p.iter().all(|v| d0_p.apply(v).iter().all(Zero::is_zero));
    let basis_ok = in_kernel && rank_of_vectors(&vecs_p) == vecs_p.len() && vecs_p.len() == e1_dimension;
    let mut d1 = SparseRationalMatrix::zeros(vecs_next.len(), vecs_p.len());
    for (j, terms) in data.pulled_p.iter().enumerate() {
        let mut image = vec![Scalar::zero(); data.e0_next.len()];
        for (cell, s) in terms {
            for (t, c) in full(cell) {
                if let Some(i) = idx_next.get(&t) {
                    image[*i] += s * &c;
                }
            }
        }
        let Some(x) = solve_in_basis(&vecs_next, &image) else { return (basis_ok, None) };
        for (i, c) in x.into_iter().enumerate() {
            d1.set(i, j, c);
        }
    }
    (basis_ok, Some(d1))
}

pub fn e1_row_check(
    pp: &PullbackPresentation,
    kind: ComplexKind,
    p: i32,
    weight: i32,
) -> Result<RowCheck, PullbackError> {
    let block = e_page(pp, kind, p, 0, weight)?;
    let base = build_differential(&pp.original)?;
    let (base_dimension, basis_ok, d1_matrix, base_matrix) = match kind {
        ComplexKind::Dr => {
            let total = build_differential(&pp.presentation)?;
            let pull = |m: &Monomial| -> Vec<(Monomial, Scalar)> {
                pp.projection.pullback_monomial(m).into_terms().into_iter().collect()
            };
            let cells_p = basis_enumerate(base.gens(), p, weight);
            let cells_next = basis_enumerate(base.gens(), p + 1, weight);
            let data = RowData {
                e0_p: dr_cells(pp, p, 0, weight),
                e0_next: dr_cells(pp, p + 1, 0, weight),
                pulled_p: cells_p.iter().map(pull).collect(),
                pulled_next: cells_next.iter().map(pull).collect(),
            };
            let (ok, d1) = row_check_generic(data, &block.d0_matrix, block.e1_dimension, |m| {
                CochainComplex::differential(&total, m)
            });
            (cells_p.len(), ok, d1, block_matrix(&base, p, weight))
        }
        ComplexKind::Def => {
            let def = DeformationComplex::new(base);
            let rel = RelativeComplex::new(pp.projection.clone());
            let pull = |c: &DerivationCell| -> Vec<(DerivationCell, Scalar)> {
                pp.projection
                    .pullback_monomial(&c.mono)
                    .into_terms()
                    .into_iter()
                    .map(|(m, s)| (DerivationCell { gen: c.gen, mono: m }, s))
                    .collect()
            };
            let cells_p = def.cells(p, weight);
            let cells_next = def.cells(p + 1, weight);
            let data = RowData {
                e0_p: def_cells(pp, p, 0, weight),
                e0_next: def_cells(pp, p + 1, 0, weight),
                pulled_p: cells_p.iter().map(pull).collect(),
                pulled_next: cells_next.iter().map(pull).collect(),
            };
            let (ok, d1) = row_check_generic(data, &block.d0_matrix, block.e1_dimension, |c| rel.differential(c));
            (cells_p.len(), ok, d1, block_matrix(&def, p, weight))
        }
    };
    let pass = basis_ok && d1_matrix.as_ref() == Some(&base_matrix);
    Ok(RowCheck {
        kind,
        p,
        weight,
        e1_dimension: block.e1_dimension,
        base_dimension,
        basis_ok,
        d1_matrix,
        base_matrix,
        pass,
    })
}
