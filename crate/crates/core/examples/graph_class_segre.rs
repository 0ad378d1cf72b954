//! The graph of f^m in P^n x P^n decomposes as a sum of [P^(n-j)] x [P^j]
//! with coefficients delta_j(f^m); its Segre degree is (1 + d^m)^n.

use dyndeg::degrees::{graph_class, segre_graph_degree};
use dyndeg::models::{pn_power_map, projective_space};

fn main() {
    let (n, d) = (2, 3);
    let model = projective_space(n).unwrap();
    let f = pn_power_map(&model, d).unwrap();
    for m in 1..=3 {
        let parts: Vec<String> = graph_class(&model, &f, m)
            .unwrap()
            .iter()
            .map(|c| format!("{} {}", c.coefficient, c.label))
            .collect();
        let s = segre_graph_degree(&model, &f, m).unwrap();
        println!("m={m}: {}", parts.join(" + "));
        println!("     Segre degree {} (closed form {:?})", s.degree, s.closed_form.as_ref().map(|c| c.to_string()));
    }
}
