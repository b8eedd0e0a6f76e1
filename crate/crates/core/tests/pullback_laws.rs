use std::time::Instant;

use lax::cohomology::ComplexKind;
use lax::corpus;
use lax::pullback::{
    homotopy_residual, kernel_acyclicity_check, pullback_algebroid, tensor_model_check, vertical_derivation_basis,
    FormAlgebra, SubmersionSpec,
};

#[test]
fn homotopy_law_on_forms() {
    // P = R × R, R² × R and R × R²; vertical derivations are L_J + i_K with
    // J, K along the fiber.
    let cases = [
        FormAlgebra::product(&[("x", 1)], &[("u", 1)]).unwrap(),
        FormAlgebra::product(&[("x", 1), ("y", 1)], &[("u", 1)]).unwrap(),
        FormAlgebra::product(&[("x", 1)], &[("u", 1), ("w", 1)]).unwrap(),
    ];
    for fa in &cases {
        let mut checked = 0;
        for degree in -1..=2 {
            for weight in -1..=3 {
                for v in vertical_derivation_basis(fa, degree, weight) {
                    assert!(homotopy_residual(fa, &v).unwrap().is_zero(), "degree {degree} weight {weight}: {v:?}");
                    checked += 1;
                }
            }
        }
        assert!(checked > 0);
    }
}

#[test]
fn kernel_is_acyclic_on_tangent_pullbacks() {
    let start = Instant::now();
    let cases = [(corpus::tr1(), vec![("u", 1)]), (corpus::tr2(), vec![("u", 1)]), (corpus::tr1(), vec![("u", 1), ("w", 1)])];
    for (a, fiber) in cases {
        let pp = pullback_algebroid(&a, &SubmersionSpec::over(&a, &fiber).unwrap()).unwrap();
        for degree in -1..=2 {
            for weight in -1..=3 {
                let rep = kernel_acyclicity_check(&pp, degree, weight).unwrap();
                assert!(rep.acyclic, "{} {rep:?}", a.name());
            }
        }
    }
    eprintln!("kernel acyclicity: {:?}", start.elapsed());
}

#[test]
fn tensor_model_on_corpus_pullbacks() {
    let start = Instant::now();
    for a in corpus::all() {
        for fiber in [vec![("u", 1)], vec![("u", 1), ("w", 2)]] {
            let pp = pullback_algebroid(&a, &SubmersionSpec::over(&a, &fiber).unwrap()).unwrap();
            for (kind, degrees) in [(ComplexKind::Dr, 0..=3), (ComplexKind::Def, -1..=2)] {
                for b in tensor_model_check(&pp, kind, degrees, 0..=3) {
                    assert!(b.pass, "{} {kind} {b:?}", a.name());
                }
            }
        }
    }
    eprintln!("tensor model: {:?}", start.elapsed());
}
