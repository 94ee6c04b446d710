use std::time::Instant;
use twopage::*;

fn main() {
    let arg: Vec<String> = std::env::args().collect();
    match arg.get(1).map(|s| s.as_str()) {
        Some("basics") => {
            for n in [5u32, 7, 9, 11] {
                let t0 = Instant::now();
                let g = build_chord_graph(n).unwrap();
                let r = maxcut_exact(&g, &maxcut::Budget::default()).unwrap();
                println!(
                    "maxcut G_{n}: {} (ub {}), nodes {}, status {:?}, {:.2}s",
                    r.optimum, r.upper_bound, r.nodes_explored, r.proof_status,
                    t0.elapsed().as_secs_f64()
                );
            }
            for n in [5u32, 7, 9, 11, 21, 41, 99] {
                let t0 = Instant::now();
                let p = build_reduced(n).unwrap();
                let z = circle::zeta_complete(n as u64) as f64;
                let s = gw_reduced_solve(&p, (1e-6 * z).max(1e-6)).unwrap();
                let v = verify_gw_certificate(&s.certificate);
                println!(
                    "gw reduced n={n}: bound {:.4}, converged {}, implied nu2 >= {} (Z={z}), ratio {:.4}, {:.2}s",
                    s.certificate.claimed_bound,
                    s.converged,
                    v.implied_nu2_lower.unwrap(),
                    v.implied_nu2_lower.unwrap() as f64 / z,
                    t0.elapsed().as_secs_f64()
                );
            }
        }
        Some("m5") => {
            let tt = build_type_table(5).unwrap();
            let q = build_q_matrix(&tt);
            let t0 = Instant::now();
            let s = sdp_bound_solve(&q, &tt, 1e-4).unwrap();
            println!(
                "zar m=5: t = {:.6}, converged {}, {:.1}s",
                s.certificate.t, s.converged, t0.elapsed().as_secs_f64()
            );
            let v = verify_zar_certificate(&s.certificate, &q);
            println!("verify: valid={} certified_t={:?}", v.valid, v.certified_t);
        }
        Some("n13") => {
            let t0 = Instant::now();
            let g = build_chord_graph(13).unwrap();
            let r = maxcut_exact(&g, &maxcut::Budget::seconds(3600.0)).unwrap();
            println!(
                "maxcut G_13: {} (ub {}), nodes {}, status {:?}, {:.1}s",
                r.optimum, r.upper_bound, r.nodes_explored, r.proof_status,
                t0.elapsed().as_secs_f64()
            );
        }
        Some("m7") => {
            let tt = build_type_table(7).unwrap();
            let t0 = Instant::now();
            let q = build_q_matrix(&tt);
            println!("Q(7) built {:.1}s", t0.elapsed().as_secs_f64());
            let t0 = Instant::now();
            let opts = types::ZarSolveOptions {
                time_budget: Some(std::time::Duration::from_secs(5400)),
            };
            let s = types::sdp_bound_solve_with(&q, &tt, 5e-3, &opts).unwrap();
            println!(
                "zar m=7: t = {:.6}, converged {}, {:.1}s",
                s.certificate.t, s.converged, t0.elapsed().as_secs_f64()
            );
            let v = verify_zar_certificate(&s.certificate, &q);
            println!("verify: valid={} certified_t={:?}", v.valid, v.certified_t);
        }
        _ => println!("usage: probe basics|m5|n13|m7"),
    }
}
