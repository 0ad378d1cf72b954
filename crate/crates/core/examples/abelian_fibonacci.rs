//! E x E with the endomorphism acting on H^1 as kron(A, I2), A = [[1,1],[1,0]].
//! The cohomology is an exterior algebra; f* on H^k is the k-th compound.

use dyndeg::gromov::{spectral_chain_with, Realizability};
use dyndeg::linalg::{kronecker, Matrix};
use dyndeg::models::abelian_variety;

fn main() {
    let a = Matrix::from_i64_rows(&[&[1, 1], &[1, 0]]);
    let h1 = kronecker(&a, &Matrix::identity(2));
    let (model, f) = abelian_variety(2, &h1, None, Realizability::builder("abelian_variety")).unwrap();

    println!("dims {:?}, deg_X = {}", model.algebra().dims(), model.deg_x());
    let chain = spectral_chain_with(&f, model.h(), 1e-12, model.realizability().clone(), model.mu_scope()).unwrap();
    for m in &chain.mu {
        println!("  mu_{} = {:.10}", m.degree, m.radius.rho);
    }
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    println!("lambda_Gr = {:.10}  (phi^2 = {:.10})", chain.lambda_gr.rho, phi * phi);
    println!("equality holds: {}, asserted: {}", chain.equality_holds, chain.equality_asserted);
}
