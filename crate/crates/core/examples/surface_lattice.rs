//! A rank-2 Neron-Severi style lattice x^2 - 2y^2 with the Pell isometry
//! [[3,4],[2,3]]. Only the algebraic part of cohomology is modelled, so the
//! chain is reported but equality is not asserted.

use dyndeg::gromov::spectral_chain_with;
use dyndeg::linalg::Matrix;
use dyndeg::models::surface_lattice;
use dyndeg::rational::int;

fn main() {
    let gram = Matrix::from_i64_rows(&[&[1, 0], &[0, -2]]);
    let pell = Matrix::from_i64_rows(&[&[3, 4], &[2, 3]]);
    let (model, f) = surface_lattice(&gram, &pell, &[int(1), int(0)]).unwrap();

    let chain = spectral_chain_with(&f, model.h(), 1e-12, model.realizability().clone(), model.mu_scope()).unwrap();
    println!("realizability: {}", model.realizability().label());
    println!("lambda_1 = {:.10} (3 + 2 sqrt 2 = {:.10})", chain.max_lambda, 3.0 + 2.0 * 2f64.sqrt());
    println!("lambda_Gr = {:.10}, chain holds: {}", chain.lambda_gr.rho, chain.chain_holds);
    println!("equality asserted: {}", chain.equality_asserted);
}
