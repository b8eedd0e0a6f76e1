//! Independent oracles shared by the integration tests. Nothing here routes
//! through the differentials under test.
#![allow(dead_code)]

use std::sync::Arc;

use lax::graded::{GeneratorSet, GradedDerivation, GradedElement, Monomial, Scalar};
use num::{One, Zero};

/// Structure constants `c[i][j][k]` of `[e_i, e_j] = Σ_k c[i][j][k] e_k`.
pub type Constants = Vec<Vec<Vec<Scalar>>>;

pub fn constants(n: usize, entries: &[(usize, usize, usize, i64)]) -> Constants {
    let mut c = vec![vec![vec![Scalar::zero(); n]; n]; n];
    for (i, j, k, v) in entries {
        c[*i][*j][*k] = Scalar::from_integer((*v).into());
        c[*j][*i][*k] = -Scalar::from_integer((*v).into());
    }
    c
}

pub fn sl2_constants() -> Constants {
    constants(3, &[(0, 1, 1, 2), (0, 2, 2, -2), (1, 2, 0, 1)])
}

pub fn aff1_constants() -> Constants {
    constants(2, &[(0, 1, 1, 1)])
}

/// Plain Gaussian elimination over the rationals.
pub fn dense_rank(mut m: Vec<Vec<Scalar>>) -> usize {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !m[r][c].is_zero()) else { continue };
        m.swap(rank, p);
        for r in 0..rows {
            if r != rank && !m[r][c].is_zero() {
                let f = &m[r][c] / &m[rank][c];
                for j in c..cols {
                    let v = &m[rank][j] * &f;
                    m[r][j] -= v;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
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

/// Sorts a tuple of indices, returning the sign of the sorting permutation,
/// or `None` on a repeated index.
fn sort_sign(v: &[usize]) -> Option<(Vec<usize>, bool)> {
    let mut w = v.to_vec();
    let mut neg = false;
    for i in 0..w.len() {
        for j in 0..w.len() - 1 - i {
            if w[j] == w[j + 1] {
                return None;
            }
            if w[j] > w[j + 1] {
                w.swap(j, j + 1);
                neg = !neg;
            }
        }
    }
    if w.windows(2).any(|p| p[0] == p[1]) {
        return None;
    }
    Some((w, neg))
}

#[derive(Clone, Copy, PartialEq, Eq)]
pub enum Module {
    Trivial,
    Adjoint,
}

/// Matrix of the Chevalley–Eilenberg differential `C^p(g; V) → C^{p+1}(g; V)`
/// in the basis `(S, b)` with `φ(e_S) = v_b`.
fn ce_matrix(c: &Constants, module: Module, p: usize) -> (usize, usize, Vec<Vec<Scalar>>) {
    let n = c.len();
    let vdim = if module == Module::Adjoint { n } else { 1 };
    let src = subsets(n, p);
    let tgt = subsets(n, p + 1);
    let src_index = |s: &[usize]| src.iter().position(|t| t == s).unwrap();
    let cols = src.len() * vdim;
    let rows = tgt.len() * vdim;
    let mut m = vec![vec![Scalar::zero(); cols]; rows];
    // φ given by column (S, b); evaluate (dφ)(e_T) and record its components.
    for (si, _) in src.iter().enumerate() {
        for b in 0..vdim {
            let col = si * vdim + b;
            let phi = |args: &[usize]| -> Vec<Scalar> {
                let mut out = vec![Scalar::zero(); vdim];
                if let Some((sorted, neg)) = sort_sign(args) {
                    if src_index(&sorted) == si {
                        out[b] = if neg { -Scalar::one() } else { Scalar::one() };
                    }
                }
                out
            };
            for (ti, t) in tgt.iter().enumerate() {
                let mut val = vec![Scalar::zero(); vdim];
                for i in 0..t.len() {
                    let sign = if i % 2 == 0 { Scalar::one() } else { -Scalar::one() };
                    if module == Module::Adjoint {
                        let rest: Vec<usize> = t.iter().enumerate().filter(|(k, _)| *k != i).map(|(_, v)| *v).collect();
                        let v = phi(&rest);
                        for (bb, vb) in v.iter().enumerate() {
                            if vb.is_zero() {
                                continue;
                            }
                            for mm in 0..n {
                                val[mm] += &sign * vb * &c[t[i]][bb][mm];
                            }
                        }
                    }
                    for j in i + 1..t.len() {
                        let sign = if (i + j) % 2 == 0 { Scalar::one() } else { -Scalar::one() };
                        let rest: Vec<usize> =
                            t.iter().enumerate().filter(|(k, _)| *k != i && *k != j).map(|(_, v)| *v).collect();
                        for mm in 0..n {
                            let coeff = &c[t[i]][t[j]][mm];
                            if coeff.is_zero() {
                                continue;
                            }
                            let mut args = vec![mm];
                            args.extend(&rest);
                            let v = phi(&args);
                            for (bb, vb) in v.iter().enumerate() {
                                val[bb] += &sign * coeff * vb;
                            }
                        }
                    }
                }
                for (bb, v) in val.into_iter().enumerate() {
                    m[ti * vdim + bb][col] = v;
                }
            }
        }
    }
    (rows, cols, m)
}

fn ce_rank(c: &Constants, module: Module, p: i64) -> usize {
    if p < 0 || p as usize >= c.len() + 1 {
        return 0;
    }
    dense_rank(ce_matrix(c, module, p as usize).2)
}

/// `dim H^p(g; V)` by dense exact ranks.
pub fn ce_betti(c: &Constants, module: Module, p: usize) -> usize {
    let n = c.len();
    if p > n {
        return 0;
    }
    let vdim = if module == Module::Adjoint { n } else { 1 };
    let dim = subsets(n, p).len() * vdim;
    dim - ce_rank(c, module, p as i64) - ce_rank(c, module, p as i64 - 1)
}

/// `dim C^p(g; V)`.
pub fn ce_dim(c: &Constants, module: Module, p: usize) -> usize {
    let vdim = if module == Module::Adjoint { c.len() } else { 1 };
    subsets(c.len(), p).len() * vdim
}

/// Deformation cohomology of a Lie algebra: `H_def^k = H^{k+1}(g; g)`.
pub fn def_betti(c: &Constants, k: i64) -> usize {
    ce_betti(c, Module::Adjoint, (k + 1) as usize)
}

/// Jacobi identity for constant brackets on `R^n`, checked on every triple.
pub fn jacobi_holds(c: &Constants) -> bool {
    let n = c.len();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for m in 0..n {
                    let mut s = Scalar::zero();
                    for l in 0..n {
                        s += &c[i][j][l] * &c[l][k][m];
                        s += &c[j][k][l] * &c[l][i][m];
                        s += &c[k][i][l] * &c[l][j][m];
                    }
                    if !s.is_zero() {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Counts monomials of a block by scanning every exponent vector with
/// entries up to `weight` and every odd subset.
pub fn brute_force_count(gens: &GeneratorSet, degree: usize, weight: i32) -> usize {
    let ne = gens.n_even();
    let no = gens.n_odd();
    let slack: i32 = gens.odds().iter().map(|g| (-g.weight).max(0)).sum();
    let bound = (weight + slack).max(0) as u32 + 1;
    let mut count = 0;
    let total = (bound as usize).pow(ne as u32);
    for code in 0..total {
        let mut exps = Vec::with_capacity(ne);
        let mut c = code;
        for _ in 0..ne {
            exps.push((c % bound as usize) as u32);
            c /= bound as usize;
        }
        for odd in 0u64..(1u64 << no) {
            if odd.count_ones() as usize != degree {
                continue;
            }
            if Monomial::new(exps.clone(), odd).weight(gens) == weight {
                count += 1;
            }
        }
    }
    count
}

/// Section of a frame with polynomial coefficients, `Σ_i s[i] e_i`.
pub type Section = Vec<GradedElement>;

/// Bracket of polynomial sections expanded from the frame table and the
/// anchor by the Leibniz rule — independent of `d_A`.
pub fn section_bracket(
    anchor: &dyn Fn(usize, usize) -> GradedElement,
    bracket: &dyn Fn(usize, usize, usize) -> GradedElement,
    gens: &Arc<GeneratorSet>,
    a: &Section,
    b: &Section,
) -> Section {
    let r = a.len();
    let n = gens.n_even();
    let rho = |i: usize, f: &GradedElement| -> GradedElement {
        let mut out = GradedElement::zero(gens);
        for x in 0..n {
            let dx = GradedDerivation::partial(gens, gens.even_gen(x)).apply(f).unwrap();
            out += &(&anchor(i, x) * &dx);
        }
        out
    };
    let mut out: Section = (0..r).map(|_| GradedElement::zero(gens)).collect();
    for i in 0..r {
        for j in 0..r {
            if a[i].is_zero() || b[j].is_zero() {
                continue;
            }
            let fg = &a[i] * &b[j];
            for m in 0..r {
                out[m] += &(&fg * &bracket(i, j, m));
            }
            out[j] += &(&a[i] * &rho(i, &b[j]));
            out[i] -= &(&b[j] * &rho(j, &a[i]));
        }
    }
    out
}

/// Random combination of basis derivations of a block, coefficients in
/// `−2..=2`, each cell kept with probability `density`.
pub fn random_derivation(
    gens: &Arc<GeneratorSet>,
    degree: i32,
    weight: i32,
    density: f64,
    rng: &mut impl rand::Rng,
) -> GradedDerivation {
    let cells = lax::graded::derivation_cells(gens, gens, degree, weight);
    let picked = cells.into_iter().filter_map(|c| {
        if rng.gen_bool(density) {
            let v: i64 = rng.gen_range(-2..=2);
            (v != 0).then(|| (c, Scalar::from_integer(v.into())))
        } else {
            None
        }
    });
    GradedDerivation::from_cells(gens, degree, picked.collect::<Vec<_>>()).unwrap()
}

/// Random homogeneous element of a block.
pub fn random_element(
    gens: &Arc<GeneratorSet>,
    degree: i32,
    weight: i32,
    rng: &mut impl rand::Rng,
) -> GradedElement {
    let basis = lax::graded::basis_enumerate(gens, degree, weight);
    GradedElement::from_terms(
        gens,
        basis.into_iter().map(|m| (m, Scalar::from_integer(rng.gen_range(-2i64..=2).into()))),
    )
}
