//! Three ways to get at a spectral radius: characteristic polynomial roots,
//! Gelfand norms of repeated squares, and roots of traces of powers.

use dyndeg::linalg::Matrix;
use dyndeg::spectral::{char_poly, gelfand_sequence, spectral_radius, trace_sequence};

fn main() {
    let m = Matrix::from_i64_rows(&[&[2, 1, 0], &[1, 1, 1], &[0, 1, 3]]);
    let coeffs: Vec<String> = char_poly(&m).unwrap().iter().map(|c| c.to_string()).collect();
    println!("char poly (low to high): {}", coeffs.join(" "));

    let r = spectral_radius(&m, 1e-12).unwrap();
    println!("rho = {:.12} in [{:.12}, {:.12}]", r.rho, r.lower, r.upper);

    for g in gelfand_sequence(&m, 10).iter().step_by(2) {
        println!(
            "  ||M^(2^{})||^(1/2^{}) = {:.8}  (certified >= {:.8})",
            g.doublings, g.doublings, g.estimate, g.certified_lower
        );
    }
    let t = trace_sequence(&m, 64);
    println!("trace tail max over m in [32, 64]: {:.8}", t.tail_max);

    let nilpotent = Matrix::from_i64_rows(&[&[0, 1], &[0, 0]]);
    println!("nilpotent: rho = {}, trace tail = {}", spectral_radius(&nilpotent, 1e-9).unwrap().rho, trace_sequence(&nilpotent, 8).tail_max);
}
