use twopage::*;
fn main() {
    let p = build_reduced(99).unwrap();
    let z = circle::zeta_complete(99) as f64;
    let s = gw_reduced_solve(&p, (1e-6 * z).max(1e-6)).unwrap();
    println!("bound {:.4} converged {}", s.certificate.claimed_bound, s.converged);
}
