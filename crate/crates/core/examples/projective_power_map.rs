//! Coordinatewise power map x -> x^d on P^n: every dynamical degree, the
//! Gromov subalgebra and the spectral chain agree on d^n.

use dyndeg::degrees::{delta_table, growth_rates};
use dyndeg::gromov::{gromov_closure, spectral_chain_with};
use dyndeg::models::{pn_power_map, projective_space};

fn main() {
    let (n, d) = (3, 2);
    let model = projective_space(n).unwrap();
    let f = pn_power_map(&model, d).unwrap();

    let table = delta_table(&model, &f, 6).unwrap();
    for j in 0..=n {
        let row: Vec<String> = table.row(j).iter().map(|q| q.to_string()).collect();
        println!("delta_{j}(f^m), m=1..6: {}", row.join(" "));
    }
    let growth = growth_rates(&table).unwrap();
    println!("growth rates {:?} (window {})", growth.rates, growth.window);

    let g = gromov_closure(&f, model.h()).unwrap();
    println!("Gromov subalgebra: dim {}, profile {:?}", g.dim(), g.degree_profile());

    let chain = spectral_chain_with(&f, model.h(), 1e-10, model.realizability().clone(), model.mu_scope()).unwrap();
    println!(
        "lambda_Gr = {:.6}, max lambda = {:.6}, max mu = {:.6}, equality {}",
        chain.lambda_gr.rho, chain.max_lambda, chain.max_mu, chain.equality_holds
    );
}
