//! (x, y) -> (y^3, x^2) on P^1 x P^1. No single d_i governs growth; the
//! degree-2 block [[0,3],[2,0]] has radius sqrt(6) and the top degree has 6.

use dyndeg::degrees::delta_table;
use dyndeg::gromov::{gromov_closure, spectral_chain};
use dyndeg::linalg::Matrix;
use dyndeg::models::{multiprojective, product_map};

fn show(m: &Matrix) -> String {
    let rows: Vec<String> = m
        .to_rows()
        .iter()
        .map(|r| r.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(" "))
        .collect();
    format!("[{}]", rows.join("; "))
}

fn main() {
    let model = multiprojective(&[1, 1]).unwrap();
    let f = product_map(&model, &[2, 3], &[1, 0]).unwrap();

    println!("f* on degree 2: {}", show(f.block(2)));
    let table = delta_table(&model, &f, 6).unwrap();
    let row: Vec<String> = table.row(1).iter().map(|q| q.to_string()).collect();
    println!("delta_1(f^m): {}", row.join(", "));

    let g = gromov_closure(&f, model.h()).unwrap();
    println!("closure dim {} with history {:?}", g.dim(), g.dimension_history());
    for d in [0, 2, 4] {
        println!("  degree {d} block {}", show(g.degree_block(d)));
    }

    let chain = spectral_chain(&f, model.h(), 1e-10).unwrap();
    for l in &chain.lambda {
        println!("  lambda on degree {}: {:.6}", l.degree, l.radius.rho);
    }
    println!("lambda_Gr = {:.6}, chain holds: {}", chain.lambda_gr.rho, chain.chain_holds);
}
