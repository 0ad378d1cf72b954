//! |V . W| <= C deg(V) deg(W) for effective classes of complementary
//! dimension, with C = (r+2) deg(X)^(r+1), and the moving-lemma degree ledger.

use dyndeg::degrees::{check_intersection_bound, moving_ledger};
use dyndeg::models::multiprojective;

fn main() {
    let model = multiprojective(&[1, 2]).unwrap();
    let r = model.dim();
    println!("P^1 x P^2 in P^5: r = {r}, deg X = {}", model.deg_x());

    let classes = model.effective_classes();
    for v in &classes {
        for w in &classes {
            if v.degree() + w.degree() != 2 * r || v.degree() > w.degree() {
                continue;
            }
            let verdict = check_intersection_bound(&model, v, w).unwrap();
            println!(
                "  V.W = {:>2}  deg V = {}  deg W = {}  bound {}  ok {}",
                verdict.pairing, verdict.deg_v, verdict.deg_w, verdict.bound, verdict.holds
            );
        }
    }

    let (dv, dw) = (dyndeg::rational::int(2), dyndeg::rational::int(3));
    let ledger = moving_ledger(model.deg_x(), &dv, &dw, r + 1, r).unwrap();
    let vs: Vec<String> = ledger.v_bounds.iter().map(|q| q.to_string()).collect();
    println!("ledger V_j bounds: {}", vs.join(", "));
    println!("ledger final bound {} for deg V = {dv}, deg W = {dw}", ledger.final_bound);
}
