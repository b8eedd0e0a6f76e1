//! Built-in presentations shared by tests, the CLI and the `.lax` corpus.

use crate::algebroid::{standard_preset, AlgebroidPresentation, Preset};
use crate::graded::{int, Scalar};

fn lie(name: &str, frame: &[&str], constants: &[(usize, usize, usize, i64)]) -> AlgebroidPresentation {
    standard_preset(Preset::LieAlgebra {
        name: name.into(),
        frame: frame.iter().map(|s| s.to_string()).collect(),
        constants: constants.iter().map(|(i, j, k, c)| (*i, *j, *k, int(*c))).collect(),
    })
    .expect("corpus Lie algebra is valid")
}

/// Abelian `R²` over a point.
pub fn ab2() -> AlgebroidPresentation {
    lie("Ab2", &["e1", "e2"], &[])
}

/// Abelian `R^n` over a point, frame `e1..en`.
pub fn abelian(n: usize) -> AlgebroidPresentation {
    let frame: Vec<String> = (1..=n).map(|i| format!("e{i}")).collect();
    let refs: Vec<&str> = frame.iter().map(String::as_str).collect();
    lie(&format!("Ab{n}"), &refs, &[])
}

/// `aff(1)`: `[e1, e2] = e2`.
pub fn aff1() -> AlgebroidPresentation {
    lie("Aff1", &["e1", "e2"], &[(0, 1, 1, 1)])
}

/// `sl(2)` in the basis `h, e, f`.
pub fn sl2() -> AlgebroidPresentation {
    lie("SL2", &["h", "e", "f"], &[(0, 1, 1, 2), (0, 2, 2, -2), (1, 2, 0, 1)])
}

/// `so(3)`: `[e1,e2] = e3` and cyclic.
pub fn so3() -> AlgebroidPresentation {
    lie("SO3", &["e1", "e2", "e3"], &[(0, 1, 2, 1), (1, 2, 0, 1), (2, 0, 1, 1)])
}

/// Heisenberg algebra: `[e1, e2] = e3`.
pub fn heisenberg() -> AlgebroidPresentation {
    lie("Heis", &["e1", "e2", "e3"], &[(0, 1, 2, 1)])
}

pub fn tr1() -> AlgebroidPresentation {
    let mut p = standard_preset(Preset::Tangent(1)).expect("tangent preset");
    p.set_name("TR1");
    p
}

pub fn tr2() -> AlgebroidPresentation {
    let mut p = standard_preset(Preset::Tangent(2)).expect("tangent preset");
    p.set_name("TR2");
    p
}

/// Foliation of `R²` by horizontal lines, `span(∂x)`.
pub fn fol_r2() -> AlgebroidPresentation {
    standard_preset(Preset::Foliation {
        name: "FolR2".into(),
        base: vec![("x".into(), 1), ("y".into(), 1)],
        spanning: vec![("X".into(), vec![int(1), int(0)])],
    })
    .expect("foliation preset")
}

/// `aff(1)` acting on the line by `e1 ↦ −x∂x`, `e2 ↦ ∂x`.
pub fn aff_r() -> AlgebroidPresentation {
    standard_preset(Preset::Action {
        name: "AffR".into(),
        base: vec![("x".into(), 1)],
        frame: vec![("e1".into(), 0), ("e2".into(), 1)],
        constants: vec![(0, 1, 1, int(1))],
        action: vec![(0, 0, vec![1], int(-1)), (1, 0, vec![0], int(1))],
    })
    .expect("action preset")
}

/// `sl(2)` acting on the line by `∂x, x∂x, x²∂x`.
pub fn sl2_r() -> AlgebroidPresentation {
    standard_preset(Preset::Action {
        name: "Sl2R".into(),
        base: vec![("x".into(), 1)],
        frame: vec![("X1".into(), 1), ("X2".into(), 0), ("X3".into(), -1)],
        constants: vec![(0, 1, 0, int(1)), (0, 2, 1, int(2)), (1, 2, 2, int(1))],
        action: vec![(0, 0, vec![0], int(1)), (1, 0, vec![1], int(1)), (2, 0, vec![2], int(1))],
    })
    .expect("action preset")
}

/// Bracket on `R³` violating Jacobi: `[e1,e2] = e1`, `[e2,e3] = e2`,
/// `[e3,e1] = e3`. Not validated, by design.
pub fn bad_jacobi() -> AlgebroidPresentation {
    let frame: Vec<(String, i32)> = ["e1", "e2", "e3"].iter().map(|s| (s.to_string(), 0)).collect();
    let mut p = AlgebroidPresentation::new("BadJacobi", &[], &frame).expect("distinct names");
    let one = |p: &AlgebroidPresentation| p.constant(Scalar::from_integer(1.into()));
    for (i, j, k) in [(0, 1, 0), (1, 2, 1), (2, 0, 2)] {
        let c = one(&p);
        p.set_bracket(i, j, k, c).expect("constant entry");
    }
    p
}

/// Every valid corpus presentation.
pub fn all() -> Vec<AlgebroidPresentation> {
    vec![ab2(), aff1(), sl2(), so3(), heisenberg(), tr1(), tr2(), fol_r2(), aff_r(), sl2_r()]
}
