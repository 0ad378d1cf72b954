//! Hand-written structure constants: P^2 as Q[x]/(x^3) entered directly,
//! with one valid map and one that breaks multiplicativity.

use dyndeg::algebra::{BasisIndex, SignRule};
use dyndeg::gromov::spectral_chain;
use dyndeg::linalg::Matrix;
use dyndeg::models::{custom_model, CustomModelSpec};
use dyndeg::rational::int;

fn spec(top: i64) -> CustomModelSpec {
    CustomModelSpec {
        top_degree: 4,
        dims: vec![1, 0, 1, 0, 1],
        sign_rule: SignRule::Commutative,
        products: vec![(BasisIndex::new(2, 0), BasisIndex::new(2, 0), vec![int(1)])],
        unit: vec![int(1)],
        integrate: vec![int(1)],
        h: vec![int(1)],
        ambient_dim: Some(2),
        map: Some(vec![
            Matrix::identity(1),
            Matrix::zeros(0, 0),
            Matrix::scalar(1, int(3)),
            Matrix::zeros(0, 0),
            Matrix::scalar(1, int(top)),
        ]),
        effective: vec![],
    }
}

fn main() {
    let (model, f) = custom_model(&spec(9)).unwrap();
    let chain = spectral_chain(&f.unwrap(), model.h(), 1e-10).unwrap();
    println!("valid map: lambda_Gr = {}, realizability {}", chain.lambda_gr.rho, chain.realizability.label());

    match custom_model(&spec(8)) {
        Ok(_) => println!("unexpectedly accepted"),
        Err((stage, err)) => println!("rejected at {stage:?}: {err}"),
    }
}
