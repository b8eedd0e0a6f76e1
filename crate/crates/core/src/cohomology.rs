//! Blockwise cohomology: matrices of differentials on `(degree, weight)`
//! blocks, Betti tables, maps induced on cohomology, and the Morita checks.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Debug;
use std::hash::Hash;
use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::algebroid::{build_differential, AlgebroidError, AlgebroidPresentation, DeRhamComplex};
use crate::deformation::{DefCochain, DeformationComplex};
use crate::graded::{basis_enumerate, DerivationCell, Monomial, Scalar};
use crate::morphism::{lower_star, upper_star, RelativeComplex};
use crate::pullback::{kernel_acyclicity_check, pullback_algebroid, SubmersionSpec};
use crate::linalg::{independent_subset, solve_in_basis, SparseRationalMatrix};

/// A cochain complex split into finite `(degree, weight)` blocks with a
/// distinguished basis of cells. The differential raises the degree by one
/// and preserves the weight.
pub trait CochainComplex: Sync {
    type Cell: Clone + Eq + Hash + Ord + Debug + Send + Sync;

    fn id(&self) -> String;

    /// Basis of the block, in a fixed order.
    fn cells(&self, degree: i32, weight: i32) -> Vec<Self::Cell>;

    /// The differential of a basis cell as a combination of cells.
    fn differential(&self, cell: &Self::Cell) -> Vec<(Self::Cell, Scalar)>;
}

impl CochainComplex for DeRhamComplex {
    type Cell = Monomial;

    fn id(&self) -> String {
        format!("dr({})", self.presentation().name())
    }

    fn cells(&self, degree: i32, weight: i32) -> Vec<Monomial> {
        basis_enumerate(self.gens(), degree, weight)
    }

    fn differential(&self, cell: &Monomial) -> Vec<(Monomial, Scalar)> {
        let mut out = crate::graded::GradedElement::zero(self.gens());
        self.differential().apply_monomial_into(cell, &Scalar::from_integer(1.into()), &mut out);
        out.into_terms().into_iter().collect()
    }
}

/// Which complex of an algebroid: de Rham `C(A)` or deformation `C_def(A)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ComplexKind {
    Dr,
    Def,
}

impl std::fmt::Display for ComplexKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ComplexKind::Dr => "dr",
            ComplexKind::Def => "def",
        })
    }
}

impl std::str::FromStr for ComplexKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "dr" => Ok(ComplexKind::Dr),
            "def" => Ok(ComplexKind::Def),
            other => Err(format!("unknown complex kind `{other}` (expected dr or def)")),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CohomologyError {
    #[error("map is not a chain map at degree {degree}, weight {weight}")]
    NotChainMap { degree: i32, weight: i32 },
    #[error("differential of a cell leaves the target block at degree {degree}, weight {weight}")]
    BlockEscape { degree: i32, weight: i32 },
    #[error("window too small: degree {requested} needs degrees up to {needed}, computed up to {available}")]
    WindowTooSmall { requested: i32, needed: i32, available: i32 },
    #[error(transparent)]
    Algebroid(#[from] AlgebroidError),
    #[error("{0}")]
    Construction(String),
}

fn index_of<T: Hash + Eq + Clone>(cells: &[T]) -> HashMap<T, usize> {
    cells.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect()
}

/// Columns of a linear map between two cell bases.
fn columns_of<S, T>(
    source: &[S],
    target: &[T],
    image: impl Fn(&S) -> Vec<(T, Scalar)> + Sync,
) -> Result<Vec<Vec<(usize, Scalar)>>, T>
where
    S: Sync,
    T: Hash + Eq + Clone + Send + Sync,
{
    let index = index_of(target);
    source
        .par_iter()
        .map(|s| {
            image(s)
                .into_iter()
                .map(|(t, c)| match index.get(&t) {
                    Some(i) => Ok((*i, c)),
                    None => Err(t),
                })
                .collect::<Result<Vec<_>, T>>()
        })
        .collect()
}

/// Matrix of the differential from block `(degree, weight)` to
/// `(degree + 1, weight)` in the cell bases.
pub fn block_matrix<C: CochainComplex>(complex: &C, degree: i32, weight: i32) -> SparseRationalMatrix {
    let source = complex.cells(degree, weight);
    let target = complex.cells(degree + 1, weight);
    let cols = columns_of(&source, &target, |c| complex.differential(c)).unwrap_or_else(|cell| {
        panic!("{}: differential leaves block ({}, {weight}) at {cell:?}", complex.id(), degree + 1)
    });
    SparseRationalMatrix::from_columns(target.len(), &cols)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockData {
    pub dimension: usize,
    /// Rank of the outgoing differential.
    pub rank_out: usize,
    /// Rank of the incoming differential.
    pub rank_in: usize,
    pub betti: usize,
}

/// Betti numbers per `(degree, weight)` within a window.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CohomologyReport {
    pub complex_id: String,
    pub degrees: (i32, i32),
    pub weights: (i32, i32),
    pub blocks: BTreeMap<(i32, i32), BlockData>,
}

impl CohomologyReport {
    pub fn get(&self, degree: i32, weight: i32) -> usize {
        self.blocks.get(&(degree, weight)).map(|b| b.betti).unwrap_or(0)
    }

    /// Betti numbers at one weight, ascending in degree.
    pub fn row(&self, weight: i32) -> Vec<usize> {
        (self.degrees.0..=self.degrees.1).map(|d| self.get(d, weight)).collect()
    }

    pub fn table(&self) -> BTreeMap<(i32, i32), usize> {
        self.blocks.iter().map(|(k, b)| (*k, b.betti)).collect()
    }
}

/// Exact Betti table; blocks are computed in parallel.
pub fn betti<C: CochainComplex>(
    complex: &C,
    degrees: RangeInclusive<i32>,
    weights: RangeInclusive<i32>,
) -> CohomologyReport {
    let (dlo, dhi) = (*degrees.start(), *degrees.end());
    let pairs: Vec<(i32, i32)> = weights.clone().flat_map(|w| (dlo - 1..=dhi).map(move |d| (d, w))).collect();
    let ranks: HashMap<(i32, i32), usize> =
        pairs.par_iter().map(|(d, w)| ((*d, *w), block_matrix(complex, *d, *w).rank())).collect();
    let blocks = weights
        .clone()
        .flat_map(|w| (dlo..=dhi).map(move |d| (d, w)))
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(d, w)| {
            let dimension = complex.cells(d, w).len();
            let rank_out = ranks[&(d, w)];
            let rank_in = ranks[&(d - 1, w)];
            let betti = dimension - rank_out - rank_in;
            ((d, w), BlockData { dimension, rank_out, rank_in, betti })
        })
        .collect();
    CohomologyReport {
        complex_id: complex.id(),
        degrees: (dlo, dhi),
        weights: (*weights.start(), *weights.end()),
        blocks,
    }
}

/// The map induced on one cohomology block.
#[derive(Clone, Debug, PartialEq)]
pub struct InducedBlock {
    pub degree: i32,
    pub weight: i32,
    /// `dim H_target × dim H_source` in the chosen coset bases.
    pub matrix: SparseRationalMatrix,
    pub rank: usize,
    pub injective: bool,
    pub surjective: bool,
}

impl InducedBlock {
    pub fn iso(&self) -> bool {
        self.injective && self.surjective
    }

    pub fn source_dim(&self) -> usize {
        self.matrix.cols()
    }

    pub fn target_dim(&self) -> usize {
        self.matrix.rows()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InducedMapReport {
    pub map_id: String,
    pub blocks: Vec<InducedBlock>,
}

impl InducedMapReport {
    pub fn all_iso(&self) -> bool {
        self.blocks.iter().all(InducedBlock::iso)
    }
}

/// Representatives `(boundary basis, cohomology coset representatives)`.
fn coset_basis(d_in: &SparseRationalMatrix, d_out: &SparseRationalMatrix) -> (Vec<Vec<Scalar>>, Vec<Vec<Scalar>>) {
    let boundaries: Vec<Vec<Scalar>> = (0..d_in.cols()).map(|j| d_in.column(j)).collect();
    let mut basis: Vec<Vec<Scalar>> =
        independent_subset(&boundaries).into_iter().map(|i| boundaries[i].clone()).collect();
    let n_b = basis.len();
    let cycles = d_out.kernel_basis();
    let mut all = basis.clone();
    all.extend(cycles.iter().cloned());
    let reps = independent_subset(&all).into_iter().filter(|i| *i >= n_b).map(|i| cycles[i - n_b].clone());
    let reps: Vec<_> = reps.collect();
    basis.truncate(n_b);
    (basis, reps)
}

/// The map on `H^{degree}` at `weight` induced by a cell-level map `f`.
///
/// The chain-map law `f∘d = d∘f` is verified on the blocks entering and
/// leaving `degree` first; violations are errors.
pub fn induced_map<S, T, F>(
    source: &S,
    target: &T,
    f: F,
    degree: i32,
    weight: i32,
) -> Result<InducedBlock, CohomologyError>
where
    S: CochainComplex,
    T: CochainComplex,
    F: Fn(&S::Cell) -> Vec<(T::Cell, Scalar)> + Sync,
{
    let map_matrix = |d: i32| -> Result<SparseRationalMatrix, CohomologyError> {
        let src = source.cells(d, weight);
        let tgt = target.cells(d, weight);
        let cols = columns_of(&src, &tgt, &f).map_err(|_| CohomologyError::BlockEscape { degree: d, weight })?;
        Ok(SparseRationalMatrix::from_columns(tgt.len(), &cols))
    };
    let f_prev = map_matrix(degree - 1)?;
    let f_cur = map_matrix(degree)?;
    let f_next = map_matrix(degree + 1)?;
    let ds = |d| block_matrix(source, d, weight);
    let dt = |d| block_matrix(target, d, weight);
    let (ds_prev, ds_cur) = (ds(degree - 1), ds(degree));
    let (dt_prev, dt_cur) = (dt(degree - 1), dt(degree));
    if f_cur.mul(&ds_prev) != dt_prev.mul(&f_prev) {
        return Err(CohomologyError::NotChainMap { degree: degree - 1, weight });
    }
    if f_next.mul(&ds_cur) != dt_cur.mul(&f_cur) {
        return Err(CohomologyError::NotChainMap { degree, weight });
    }
    let (_, src_reps) = coset_basis(&ds_prev, &ds_cur);
    let (tgt_b, tgt_reps) = coset_basis(&dt_prev, &dt_cur);
    let n_tb = tgt_b.len();
    let mut full = tgt_b;
    full.extend(tgt_reps.iter().cloned());
    let mut matrix = SparseRationalMatrix::zeros(tgt_reps.len(), src_reps.len());
    for (j, z) in src_reps.iter().enumerate() {
        let image = f_cur.apply(z);
        let coords = solve_in_basis(&full, &image).ok_or(CohomologyError::NotChainMap { degree, weight })?;
        for (i, c) in coords.into_iter().skip(n_tb).enumerate() {
            matrix.set(i, j, c);
        }
    }
    let rank = matrix.rank();
    Ok(InducedBlock {
        degree,
        weight,
        injective: rank == src_reps.len(),
        surjective: rank == tgt_reps.len(),
        matrix,
        rank,
    })
}

/// Applies [`induced_map`] on every block of a window.
pub fn induced_map_report<S, T, F>(
    map_id: &str,
    source: &S,
    target: &T,
    f: F,
    degrees: RangeInclusive<i32>,
    weights: RangeInclusive<i32>,
) -> Result<InducedMapReport, CohomologyError>
where
    S: CochainComplex,
    T: CochainComplex,
    F: Fn(&S::Cell) -> Vec<(T::Cell, Scalar)> + Sync,
{
    let pairs: Vec<(i32, i32)> = weights.flat_map(|w| degrees.clone().map(move |d| (d, w))).collect();
    let blocks = pairs
        .par_iter()
        .map(|(d, w)| induced_map(source, target, &f, *d, *w))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(InducedMapReport { map_id: map_id.to_string(), blocks })
}

/// One `(degree, weight)` block of a Morita check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MoritaBlock {
    pub degree: i32,
    pub weight: i32,
    pub betti_left: usize,
    pub betti_right: usize,
    /// `Π*` (kind dr) or `Π⋆` (kind def) induces an isomorphism.
    pub induced_iso: bool,
    /// Kind def: `Π★` induces an isomorphism.
    pub lower_iso: Option<bool>,
    /// Kind def: `H(K)` vanishes in this degree and the next.
    pub kernel_acyclic: Option<bool>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MoritaReport {
    pub kind: ComplexKind,
    pub algebroid: String,
    pub pullback: String,
    pub max_degree: i32,
    /// Degrees actually computed, including the block above `max_degree`
    /// needed to certify it.
    pub window: (i32, i32),
    pub weights: (i32, i32),
    pub left: CohomologyReport,
    pub right: CohomologyReport,
    pub blocks: Vec<MoritaBlock>,
    pub pass: bool,
}

fn morita_err(e: impl std::fmt::Display) -> CohomologyError {
    CohomologyError::Construction(e.to_string())
}

/// Compares `A` with `π!A` in degrees up to `max_degree`.
///
/// The window extends one degree above `max_degree`; see
/// [`morita_check_within`] for an explicit degree budget.
pub fn morita_check(
    pres: &AlgebroidPresentation,
    sub: &SubmersionSpec,
    kind: ComplexKind,
    max_degree: i32,
    weights: RangeInclusive<i32>,
) -> Result<MoritaReport, CohomologyError> {
    morita_check_within(pres, sub, kind, max_degree, weights, max_degree + 1)
}

/// As [`morita_check`], but only degrees `≤ budget` may be computed.
/// Certifying degree `m` needs degree `m + 1` (the chain-map law leaving
/// degree `m` for kind dr, `H^{m+1}(K) = 0` for kind def); a smaller budget
/// is an error rather than a silent truncation.
pub fn morita_check_within(
    pres: &AlgebroidPresentation,
    sub: &SubmersionSpec,
    kind: ComplexKind,
    max_degree: i32,
    weights: RangeInclusive<i32>,
    budget: i32,
) -> Result<MoritaReport, CohomologyError> {
    let lowest = match kind {
        ComplexKind::Dr => 0,
        ComplexKind::Def => -1,
    };
    if max_degree < lowest {
        return Err(CohomologyError::Construction(format!(
            "max degree {max_degree} is below the lowest degree {lowest}"
        )));
    }
    if budget < max_degree + 1 {
        return Err(CohomologyError::WindowTooSmall { requested: max_degree, needed: max_degree + 1, available: budget });
    }
    if weights.is_empty() {
        return Err(CohomologyError::Construction("empty weight window".into()));
    }
    let pp = pullback_algebroid(pres, sub).map_err(morita_err)?;
    let base = build_differential(pres)?;
    let total = build_differential(&pp.presentation)?;
    let degrees = lowest..=max_degree;
    let pairs: Vec<(i32, i32)> = weights.clone().flat_map(|w| degrees.clone().map(move |d| (d, w))).collect();
    let one = || Scalar::from_integer(1.into());
    let (left, right, blocks) = match kind {
        ComplexKind::Dr => {
            let left = betti(&base, degrees.clone(), weights.clone());
            let right = betti(&total, degrees.clone(), weights.clone());
            let pull = |m: &Monomial| pp.projection.pullback_monomial(m).into_terms().into_iter().collect::<Vec<_>>();
            let induced = induced_map_report("Pi*", &base, &total, pull, degrees.clone(), weights.clone())?;
            let blocks: Vec<MoritaBlock> = pairs
                .iter()
                .zip(&induced.blocks)
                .map(|((d, w), b)| {
                    let (bl, br) = (left.get(*d, *w), right.get(*d, *w));
                    MoritaBlock {
                        degree: *d,
                        weight: *w,
                        betti_left: bl,
                        betti_right: br,
                        induced_iso: b.iso(),
                        lower_iso: None,
                        kernel_acyclic: None,
                        pass: bl == br && b.iso(),
                    }
                })
                .collect();
            (left, right, blocks)
        }
        ComplexKind::Def => {
            let def_a = DeformationComplex::new(base);
            let def_p = DeformationComplex::new(total);
            let rel = RelativeComplex::new(pp.projection.clone());
            let left = betti(&def_a, degrees.clone(), weights.clone());
            let right = betti(&def_p, degrees.clone(), weights.clone());
            let f = &pp.projection;
            let lower = |c: &DerivationCell| {
                let x = DefCochain::from_cells(f.source_gens(), c.degree(f.source_gens()), [(c.clone(), one())])
                    .expect("basis cell");
                lower_star(f, &x).expect("source cochain").cells()
            };
            let upper = |c: &DerivationCell| {
                let y = DefCochain::from_cells(f.target_gens(), c.degree(f.target_gens()), [(c.clone(), one())])
                    .expect("basis cell");
                upper_star(f, &y).expect("target cochain").cells()
            };
            let lower_rep = induced_map_report("Pi_lower", &def_p, &rel, lower, degrees.clone(), weights.clone())?;
            let upper_rep = induced_map_report("Pi_upper", &def_a, &rel, upper, degrees.clone(), weights.clone())?;
            let kernel_pairs: Vec<(i32, i32)> =
                weights.clone().flat_map(|w| (lowest..=max_degree + 1).map(move |d| (d, w))).collect();
            let acyclic: HashMap<(i32, i32), bool> = kernel_pairs
                .par_iter()
                .map(|(d, w)| Ok(((*d, *w), kernel_acyclicity_check(&pp, *d, *w).map_err(morita_err)?.acyclic)))
                .collect::<Result<_, CohomologyError>>()?;
            let blocks: Vec<MoritaBlock> = pairs
                .iter()
                .zip(lower_rep.blocks.iter().zip(&upper_rep.blocks))
                .map(|((d, w), (lo, up))| {
                    let (bl, br) = (left.get(*d, *w), right.get(*d, *w));
                    let k_ok = acyclic[&(*d, *w)] && acyclic[&(*d + 1, *w)];
                    MoritaBlock {
                        degree: *d,
                        weight: *w,
                        betti_left: bl,
                        betti_right: br,
                        induced_iso: up.iso(),
                        lower_iso: Some(lo.iso()),
                        kernel_acyclic: Some(k_ok),
                        pass: bl == br && up.iso() && lo.iso() && k_ok,
                    }
                })
                .collect();
            (left, right, blocks)
        }
    };
    let pass = blocks.iter().all(|b: &MoritaBlock| b.pass);
    Ok(MoritaReport {
        kind,
        algebroid: pres.name().to_string(),
        pullback: pp.presentation.name().to_string(),
        max_degree,
        window: (lowest, max_degree + 1),
        weights: (*weights.start(), *weights.end()),
        left,
        right,
        blocks,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebroid::build_differential;
    use crate::corpus;

    #[test]
    fn block_matrix_examples() {
        let aff = build_differential(&corpus::aff1()).unwrap();
        let m = block_matrix(&aff, 1, 0);
        assert_eq!((m.rows(), m.cols(), m.rank()), (1, 2, 1));
        let ab = build_differential(&corpus::ab2()).unwrap();
        for d in 0..3 {
            assert!(block_matrix(&ab, d, 0).is_zero());
        }
        let tr = build_differential(&corpus::tr1()).unwrap();
        let m = block_matrix(&tr, 0, 1);
        assert_eq!((m.rows(), m.cols(), m.rank()), (1, 1, 1));
    }

    #[test]
    fn aff1_de_rham() {
        let aff = build_differential(&corpus::aff1()).unwrap();
        assert_eq!(betti(&aff, 0..=2, 0..=0).row(0), vec![1, 1, 0]);
    }

    #[test]
    fn identity_and_zero_maps() {
        let aff = build_differential(&corpus::aff1()).unwrap();
        let id = |m: &Monomial| vec![(m.clone(), Scalar::from_integer(1.into()))];
        for d in 0..=2 {
            let b = induced_map(&aff, &aff, id, d, 0).unwrap();
            assert!(b.iso());
        }
        let zero = |_: &Monomial| Vec::new();
        let b = induced_map(&aff, &aff, zero, 1, 0).unwrap();
        assert_eq!((b.source_dim(), b.rank), (1, 0));
        assert!(!b.iso());
    }

    #[test]
    fn morita_aff1() {
        let a = corpus::aff1();
        let sub = SubmersionSpec::over(&a, &[("u", 1)]).unwrap();
        let dr = morita_check(&a, &sub, ComplexKind::Dr, 2, 0..=1).unwrap();
        assert!(dr.pass);
        assert_eq!(dr.right.row(0), vec![1, 1, 0]);
        let def = morita_check(&a, &sub, ComplexKind::Def, 1, 0..=1).unwrap();
        assert!(def.pass, "{def:?}");
        assert!(matches!(
            morita_check_within(&a, &sub, ComplexKind::Dr, 2, 0..=1, 2),
            Err(CohomologyError::WindowTooSmall { requested: 2, needed: 3, available: 2 })
        ));
    }

    #[test]
    fn non_chain_map_rejected() {
        let tr = build_differential(&corpus::tr1()).unwrap();
        // Kill degree-1 cells only: x ↦ x but ξ ↦ 0 breaks f∘d = d∘f.
        let f = |m: &Monomial| {
            if m.degree() == 0 {
                vec![(m.clone(), Scalar::from_integer(1.into()))]
            } else {
                Vec::new()
            }
        };
        assert!(matches!(induced_map(&tr, &tr, f, 0, 1), Err(CohomologyError::NotChainMap { .. })));
    }
}
