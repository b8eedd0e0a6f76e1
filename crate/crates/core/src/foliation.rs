//! Linear foliations of weighted affine space: the tangent algebroid `TF`,
//! the Bott complex `Ω(F, TM/TF)`, and the flag check `V ⊂ H` over
//! `P → M`.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use num::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::algebroid::{build_differential, foliation_presentation, AlgebroidError, AlgebroidPresentation, DeRhamComplex};
use crate::cohomology::{betti, morita_check, CochainComplex, CohomologyError, ComplexKind, MoritaReport};
use crate::deformation::DeformationComplex;
use crate::graded::{derivation_cells, DerivationCell, Gen, GradedElement, Scalar};
use crate::linalg::{independent_subset, rank_of_vectors};
use crate::pullback::{pullback_algebroid, vertical_name, PullbackError, SubmersionSpec};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FoliationError {
    #[error(transparent)]
    Algebroid(#[from] AlgebroidError),
    #[error(transparent)]
    Pullback(#[from] PullbackError),
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
    #[error("vertical field `{0}` is not contained in the span of H")]
    NotContained(String),
    #[error("spanning fields of `{0}` are linearly dependent")]
    Dependent(String),
    #[error("spanning vector `{name}` has {found} components, expected {expected}")]
    VectorLength { name: String, expected: usize, found: usize },
}

/// `F = span(v_1, …, v_r)` with constant `v_i`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FoliationSpec {
    pub name: String,
    pub ambient: Vec<(String, u32)>,
    #[serde(serialize_with = "serialize_spanning")]
    pub spanning: Vec<(String, Vec<Scalar>)>,
}

fn serialize_spanning<S: serde::Serializer>(v: &[(String, Vec<Scalar>)], s: S) -> Result<S::Ok, S::Error> {
    let as_text: Vec<(String, Vec<String>)> =
        v.iter().map(|(n, c)| (n.clone(), c.iter().map(crate::graded::fmt_scalar).collect())).collect();
    serde::Serialize::serialize(&as_text, s)
}

impl FoliationSpec {
    pub fn new(
        name: &str,
        ambient: Vec<(String, u32)>,
        spanning: Vec<(String, Vec<Scalar>)>,
    ) -> Result<Self, FoliationError> {
        for (n, v) in &spanning {
            if v.len() != ambient.len() {
                return Err(FoliationError::VectorLength { name: n.clone(), expected: ambient.len(), found: v.len() });
            }
        }
        let vectors: Vec<Vec<Scalar>> = spanning.iter().map(|(_, v)| v.clone()).collect();
        if rank_of_vectors(&vectors) != vectors.len() {
            return Err(FoliationError::Dependent(name.to_string()));
        }
        Ok(FoliationSpec { name: name.to_string(), ambient, spanning })
    }

    pub fn rank(&self) -> usize {
        self.spanning.len()
    }

    /// Coordinate indices of the complementary frame `∂̄_b` of `TM/TF`,
    /// chosen greedily among the coordinate fields.
    pub fn normal_coordinates(&self) -> Vec<usize> {
        let n = self.ambient.len();
        let mut family: Vec<Vec<Scalar>> = self.spanning.iter().map(|(_, v)| v.clone()).collect();
        let r = family.len();
        family.extend((0..n).map(|a| (0..n).map(|b| if a == b { Scalar::one() } else { Scalar::zero() }).collect()));
        independent_subset(&family).into_iter().filter(|i| *i >= r).map(|i| i - r).collect()
    }
}

/// `TF` as a presentation: frame = spanning fields, anchor = inclusion.
pub fn foliation_algebroid(f: &FoliationSpec) -> Result<AlgebroidPresentation, FoliationError> {
    Ok(foliation_presentation(&f.name, &f.ambient, &f.spanning)?)
}

/// `Ω(F, TM/TF)` in the constant normal frame. Cells `(∂̄_b, m)` with `m`
/// a monomial of `C(TF)` have degree `deg m` and weight `w(m) − w(x^b)`.
/// With constant frames the Bott connection has no coefficients, so
/// `d(ω ⊗ ∂̄_b) = d_F ω ⊗ ∂̄_b`.
#[derive(Clone, Debug)]
pub struct BottComplex {
    leafwise: DeRhamComplex,
    normal: Vec<Gen>,
}

impl BottComplex {
    pub fn leafwise(&self) -> &DeRhamComplex {
        &self.leafwise
    }

    pub fn normal_frame(&self) -> &[Gen] {
        &self.normal
    }

    /// Coefficient of `d(ω ⊗ ∂̄_b)` along `∂̄_b`; the frame is flat, so it
    /// does not depend on `b`.
    pub fn apply(&self, coefficient: &GradedElement) -> GradedElement {
        self.leafwise.d(coefficient)
    }

    /// `d² = 0` on every generator of `C(TF)`.
    pub fn squares_to_zero(&self) -> bool {
        let d = self.leafwise.differential();
        d.commutator(d).map(|c| c.is_zero()).unwrap_or(false)
    }
}

pub fn bott_complex(f: &FoliationSpec) -> Result<BottComplex, FoliationError> {
    let leafwise = build_differential(&foliation_algebroid(f)?)?;
    let normal = f.normal_coordinates().into_iter().map(|a| leafwise.presentation().coord(a)).collect();
    Ok(BottComplex { leafwise, normal })
}

impl CochainComplex for BottComplex {
    type Cell = DerivationCell;

    fn id(&self) -> String {
        format!("bott({})", self.leafwise.presentation().name())
    }

    fn cells(&self, degree: i32, weight: i32) -> Vec<DerivationCell> {
        let g = self.leafwise.gens();
        derivation_cells(g, g, degree, weight).into_iter().filter(|c| self.normal.contains(&c.gen)).collect()
    }

    fn differential(&self, cell: &DerivationCell) -> Vec<(DerivationCell, Scalar)> {
        let mut out = GradedElement::zero(self.leafwise.gens());
        self.leafwise.differential().apply_monomial_into(&cell.mono, &Scalar::one(), &mut out);
        out.into_terms().into_iter().map(|(m, c)| (DerivationCell { gen: cell.gen, mono: m }, c)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BottBlock {
    pub degree: i32,
    pub weight: i32,
    pub betti_bott: usize,
    pub betti_def: usize,
    pub equal: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DefVsBottReport {
    pub foliation: String,
    pub blocks: Vec<BottBlock>,
    /// `H^{-1}_def(TF)` per weight; the Bott side has no degree −1.
    pub def_minus_one: BTreeMap<i32, usize>,
    pub pass: bool,
}

/// Betti tables of the Bott complex and of `C_def(TF)`, compared degree by
/// degree for degrees `≥ 0`.
pub fn def_vs_bott(
    f: &FoliationSpec,
    degrees: RangeInclusive<i32>,
    weights: RangeInclusive<i32>,
) -> Result<DefVsBottReport, FoliationError> {
    let bott = bott_complex(f)?;
    let def = DeformationComplex::new(bott.leafwise.clone());
    let lo = (*degrees.start()).max(0);
    let hi = *degrees.end();
    let b = betti(&bott, lo..=hi, weights.clone());
    let d = betti(&def, lo..=hi, weights.clone());
    let minus = betti(&def, -1..=-1, weights.clone());
    let mut blocks = Vec::new();
    for w in weights.clone() {
        for deg in lo..=hi {
            let (bb, bd) = (b.get(deg, w), d.get(deg, w));
            blocks.push(BottBlock { degree: deg, weight: w, betti_bott: bb, betti_def: bd, equal: bb == bd });
        }
    }
    let pass = blocks.iter().all(|b| b.equal);
    Ok(DefVsBottReport {
        foliation: f.name.clone(),
        blocks,
        def_minus_one: weights.map(|w| (w, minus.get(-1, w))).collect(),
        pass,
    })
}

/// Where two presentations first differ, if anywhere.
pub fn table_difference(a: &AlgebroidPresentation, b: &AlgebroidPresentation) -> Option<String> {
    let base = |p: &AlgebroidPresentation| p.base().iter().map(|g| (g.name.clone(), g.weight)).collect::<Vec<_>>();
    let frame = |p: &AlgebroidPresentation| p.frame().iter().map(|g| (g.name.clone(), g.weight)).collect::<Vec<_>>();
    if base(a) != base(b) {
        return Some(format!("coordinates differ: {:?} vs {:?}", base(a), base(b)));
    }
    if frame(a) != frame(b) {
        return Some(format!("frames differ: {:?} vs {:?}", frame(a), frame(b)));
    }
    let bg = b.gens();
    for i in 0..a.rank() {
        for c in 0..a.base_dim() {
            let x = a.anchor(i, c).transport(bg).ok();
            if x.as_ref() != Some(b.anchor(i, c)) {
                return Some(format!("anchor {:?} differs", a.anchor_entry(i, c)));
            }
        }
        for j in i + 1..a.rank() {
            for k in 0..a.rank() {
                if a.bracket(i, j, k).transport(bg).ok() != Some(b.bracket(i, j, k)) {
                    return Some(format!("bracket {:?} differs", a.bracket_entry(i, j, k)));
                }
            }
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlagReport {
    /// The quotient foliation `F` on `M`.
    pub quotient: FoliationSpec,
    /// `TH` in the canonical frame equals `π!TF` table by table.
    pub tables_equal: bool,
    pub table_mismatch: Option<String>,
    /// `H_def(TH)` computed directly agrees with `H_def(TF)` per block.
    pub direct_agreement: bool,
    pub morita: MoritaReport,
    pub pass: bool,
}

/// The flag `V ⊂ H` on `P = M × R^k`, with `V` the fibers of the
/// submersion and `H` spanned by constant fields on `P`.
///
/// The canonical frame of `H` is the vertical fields `∂/∂u` followed by
/// horizontal lifts of a greedy basis of the projection of `H` to `M`;
/// the lifted fields keep the names of the `H` fields they come from.
pub fn flag_check(
    v_spec: &SubmersionSpec,
    h_spanning: &[(String, Vec<Scalar>)],
    max_degree: i32,
    weights: RangeInclusive<i32>,
) -> Result<FlagReport, FoliationError> {
    let n = v_spec.base.len();
    let k = v_spec.fiber_dim();
    let mut ambient = v_spec.base.clone();
    ambient.extend(v_spec.fiber.iter().cloned());
    let h = FoliationSpec::new("H", ambient.clone(), h_spanning.to_vec())?;
    let h_vectors: Vec<Vec<Scalar>> = h.spanning.iter().map(|(_, v)| v.clone()).collect();
    let unit = |a: usize| -> Vec<Scalar> { (0..n + k).map(|b| if a == b { Scalar::one() } else { Scalar::zero() }).collect() };
    for (j, (u, _)) in v_spec.fiber.iter().enumerate() {
        let mut with = h_vectors.clone();
        with.push(unit(n + j));
        if rank_of_vectors(&with) != h_vectors.len() {
            return Err(FoliationError::NotContained(format!("d/d{u}")));
        }
    }
    let projected: Vec<Vec<Scalar>> = h_vectors.iter().map(|v| v[..n].to_vec()).collect();
    let chosen = independent_subset(&projected);
    let quotient = FoliationSpec::new(
        "F",
        v_spec.base.clone(),
        chosen.iter().map(|i| (h.spanning[*i].0.clone(), projected[*i].clone())).collect(),
    )?;
    let mut canonical: Vec<(String, Vec<Scalar>)> =
        v_spec.fiber.iter().enumerate().map(|(j, (u, _))| (vertical_name(u), unit(n + j))).collect();
    for (name, v) in &quotient.spanning {
        let mut lifted = v.clone();
        lifted.extend((0..k).map(|_| Scalar::zero()));
        canonical.push((name.clone(), lifted));
    }
    let h_canonical = FoliationSpec::new("H", ambient, canonical)?;
    let th = foliation_algebroid(&h_canonical)?;
    let tf = foliation_algebroid(&quotient)?;
    let pulled = pullback_algebroid(&tf, v_spec)?;
    let table_mismatch = if h_canonical.rank() != h.rank() {
        Some(format!("canonical frame has rank {} but H has rank {}", h_canonical.rank(), h.rank()))
    } else {
        table_difference(&th, &pulled.presentation)
    };
    let morita = morita_check(&tf, v_spec, ComplexKind::Def, max_degree, weights.clone())?;
    let direct = betti(&DeformationComplex::new(build_differential(&th)?), -1..=max_degree, weights);
    let direct_agreement = direct.table() == morita.left.table();
    let tables_equal = table_mismatch.is_none();
    Ok(FlagReport {
        pass: tables_equal && direct_agreement && morita.pass,
        quotient,
        tables_equal,
        table_mismatch,
        direct_agreement,
        morita,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::int;

    fn line_foliation(n: usize) -> FoliationSpec {
        let names = ["x", "y", "z"];
        let mut v = vec![int(0); n];
        v[0] = int(1);
        FoliationSpec::new("Fx", names[..n].iter().map(|s| (s.to_string(), 1)).collect(), vec![("X".into(), v)])
            .unwrap()
    }

    #[test]
    fn bott_differential_on_plane() {
        let f = line_foliation(2);
        let bott = bott_complex(&f).unwrap();
        assert!(bott.squares_to_zero());
        let g = bott.leafwise().gens();
        assert_eq!(bott.normal_frame(), &[g.lookup("y").unwrap()]);
        let x = GradedElement::generator(g, g.lookup("x").unwrap());
        let y = GradedElement::generator(g, g.lookup("y").unwrap());
        let xi = GradedElement::generator(g, g.lookup("X").unwrap());
        // d(x²y ∂̄y) = 2xy ξ ⊗ ∂̄y.
        assert_eq!(bott.apply(&(&(&x * &x) * &y)), (&(&x * &y) * &xi).scale(&int(2)));
        assert!(bott.apply(&GradedElement::constant(g, int(3))).is_zero());
    }

    #[test]
    fn plane_cross_check() {
        let rep = def_vs_bott(&line_foliation(2), 0..=1, 0..=3).unwrap();
        assert!(rep.pass, "{rep:?}");
        for b in &rep.blocks {
            assert_eq!(b.betti_bott, usize::from(b.degree == 0));
        }
        assert!(rep.def_minus_one.values().all(|v| *v == 0));
    }

    #[test]
    fn rank_zero_foliation() {
        let f = FoliationSpec::new("F0", vec![("x".into(), 1)], vec![]).unwrap();
        let rep = def_vs_bott(&f, 0..=0, 0..=2).unwrap();
        assert!(rep.pass);
        // Weight-w normal fields x^{w+1} ∂̄x.
        assert!(rep.blocks.iter().all(|b| b.betti_bott == 1));
    }

    #[test]
    fn flag_on_r3() {
        let sub = SubmersionSpec::new(vec![("x".into(), 1), ("y".into(), 1)], vec![("z".into(), 1)]).unwrap();
        let h = vec![("X".to_string(), vec![int(1), int(0), int(0)]), ("Z".to_string(), vec![int(0), int(0), int(1)])];
        let rep = flag_check(&sub, &h, 1, 0..=1).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert_eq!(rep.quotient.rank(), 1);
        let only_v = vec![("Z".to_string(), vec![int(0), int(0), int(1)])];
        assert!(flag_check(&sub, &only_v, 1, 0..=1).unwrap().pass);
        let not_v = vec![("X".to_string(), vec![int(1), int(0), int(0)])];
        assert_eq!(flag_check(&sub, &not_v, 1, 0..=1).unwrap_err(), FoliationError::NotContained("d/dz".into()));
    }
}
