//! Command-line front end for the 2-page crossing number pipeline.
//!
//! Every command emits a machine-readable report (JSON by default) with a
//! config echo for reproducibility; progress goes to stderr only. Exit
//! codes: 0 success, 3 invalid certificate, 4 bad input, 5 budget/accuracy
//! exhausted.

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;
use twopage::bounds::{assemble_genbound, k7_to_k8_bipartite, TableRow};
use twopage::circle::{build_chord_graph, zeta_complete};
use twopage::gw::{build_reduced, gw_full, gw_reduced_solve, verify_gw_certificate, GwCertificate};
use twopage::maxcut::{maxcut_exact_seeded, nu2_complete_exact, Budget, ProofStatus};
use twopage::types::{
    build_q_matrix, build_type_table, sdp_bound_solve_dense, sdp_bound_solve_with,
    verify_zar_certificate, verify_zar_dense_certificate, ZarCertificate, ZarDenseCertificate,
    ZarSolveOptions,
};
use twopage::zarankiewicz_drawing;

const EXIT_INVALID_CERT: i32 = 3;
const EXIT_BAD_INPUT: i32 = 4;
const EXIT_TIMEOUT: i32 = 5;

#[derive(Parser, Debug)]
#[command(
    name = "twopage",
    about = "Exact values and certified lower bounds for 2-page book crossing numbers",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format for reports.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the primary artifact (report, certificate, drawing or CSV) here
    /// instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Cap the rayon worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for randomized heuristics (the max-cut incumbent search).
    #[arg(long, global = true, default_value_t = 0xC0FFEE)]
    seed: u64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Args, Debug, Clone)]
struct BudgetArgs {
    /// Wall-clock budget for the solve, in seconds.
    #[arg(long)]
    budget_seconds: Option<f64>,
    /// Node budget for branch and bound.
    #[arg(long)]
    budget_nodes: Option<u64>,
}

impl BudgetArgs {
    fn budget(&self, progress: bool) -> Budget {
        Budget {
            max_nodes: self.budget_nodes,
            max_seconds: self.budget_seconds,
            progress,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact nu2(K_n) rows (n, maxcut, C(n,4), nu2, Z(n)) via branch and bound.
    Table1 {
        /// Values of n; repeat the flag. Default: 5 7 9 11.
        #[arg(long = "n")]
        n: Vec<u32>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Exact maximum cut of the chord graph G_n.
    Maxcut {
        #[arg(long)]
        n: u32,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Symmetry-reduced Goemans-Williamson certificate for odd n
    /// (--out writes the certificate JSON consumed by `verify`).
    Gw {
        #[arg(long)]
        n: u32,
        /// Absolute accuracy target on the GW bound.
        #[arg(long)]
        accuracy: Option<f64>,
        /// Also solve the unreduced dual and report it (small n only).
        #[arg(long, default_value_t = false)]
        compare_full: bool,
    },
    /// SDP_bound(m) certificate: reduced path for odd m, dense otherwise
    /// (--out writes the certificate JSON consumed by `verify`).
    Zar {
        #[arg(long)]
        m: u32,
        /// Absolute accuracy target on t.
        #[arg(long)]
        accuracy: Option<f64>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Verify a certificate file (kind "gw", "zar" or "zar-dense") and print
    /// the implied bound.
    Verify { path: PathBuf },
    /// CSV of (n, nu2 lower bound, Z(n), ratio) from GW certificates.
    RatioCurve {
        /// Odd values of n; repeat the flag. Default: 9 19 ... 99.
        #[arg(long = "n")]
        n: Vec<u32>,
        #[arg(long)]
        accuracy: Option<f64>,
    },
    /// Emit a drawing JSON: optimal K_n (from a max-cut witness) with --n
    /// alone, or the Zarankiewicz K_{m,n} drawing with --m and --n.
    Draw {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        m: Option<u32>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Emit the forced-crossing matrix Q for Types(m) as CSV.
    Qmatrix {
        #[arg(long)]
        m: u32,
    },
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version are not errors
            use clap::error::ErrorKind::*;
            let code = match e.kind() {
                DisplayHelp | DisplayVersion => 0,
                _ => EXIT_BAD_INPUT,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Some(t) = cli.threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let code = match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_BAD_INPUT
        }
    };
    std::process::exit(code);
}

/// Writes the primary artifact to --out or stdout.
fn emit(cli: &Cli, artifact: &str) -> anyhow::Result<()> {
    match &cli.out {
        Some(path) => {
            let mut f = std::fs::File::create(path)
                .with_context(|| format!("creating {}", path.display()))?;
            f.write_all(artifact.as_bytes())?;
            if !artifact.ends_with('\n') {
                f.write_all(b"\n")?;
            }
            eprintln!("wrote {}", path.display());
        }
        None => println!("{artifact}"),
    }
    Ok(())
}

fn envelope(command: &str, config: serde_json::Value, result: serde_json::Value) -> String {
    serde_json::to_string_pretty(&json!({
        "schema": 1,
        "command": command,
        "config": config,
        "result": result,
    }))
    .expect("report serializes")
}

fn run(cli: &Cli) -> anyhow::Result<i32> {
    match &cli.command {
        Command::Table1 { n, budget } => cmd_table1(cli, n, budget),
        Command::Maxcut { n, budget } => cmd_maxcut(cli, *n, budget),
        Command::Gw {
            n,
            accuracy,
            compare_full,
        } => cmd_gw(cli, *n, *accuracy, *compare_full),
        Command::Zar { m, accuracy, budget } => cmd_zar(cli, *m, *accuracy, budget),
        Command::Verify { path } => cmd_verify(cli, path),
        Command::RatioCurve { n, accuracy } => cmd_ratio_curve(cli, n, *accuracy),
        Command::Draw { n, m, budget } => cmd_draw(cli, *n, *m, budget),
        Command::Qmatrix { m } => cmd_qmatrix(cli, *m),
    }
}

fn cmd_table1(cli: &Cli, n_list: &[u32], budget: &BudgetArgs) -> anyhow::Result<i32> {
    let n_list: Vec<u32> = if n_list.is_empty() {
        vec![5, 7, 9, 11]
    } else {
        n_list.to_vec()
    };
    let mut rows: Vec<TableRow> = Vec::new();
    let mut all_exact = true;
    for &n in &n_list {
        eprintln!("table1: solving G_{n} ...");
        let t0 = Instant::now();
        let g = build_chord_graph(n)?;
        let mc = maxcut_exact_seeded(&g, &budget.budget(true), cli.seed)?;
        let exact = mc.proof_status == ProofStatus::Exact;
        all_exact &= exact;
        let e_n = g.edge_count();
        rows.push(TableRow {
            n,
            maxcut: mc.optimum,
            e_n,
            nu2: e_n - mc.optimum,
            z: zeta_complete(n as u64),
            exact,
            nodes: mc.nodes_explored,
            seconds: t0.elapsed().as_secs_f64(),
        });
        eprintln!(
            "table1: G_{n} done in {:.2}s ({} nodes{})",
            t0.elapsed().as_secs_f64(),
            mc.nodes_explored,
            if exact { "" } else { ", budget exhausted" }
        );
    }
    let config = json!({"n": n_list, "budget_seconds": budget.budget_seconds, "budget_nodes": budget.budget_nodes, "seed": cli.seed});
    let artifact = match cli.format {
        Format::Json => envelope("table1", config, serde_json::to_value(&rows)?),
        Format::Csv => {
            let mut s = String::from("n,maxcut,e_n,nu2,z,exact,nodes,seconds\n");
            for r in &rows {
                s.push_str(&format!(
                    "{},{},{},{},{},{},{},{:.3}\n",
                    r.n, r.maxcut, r.e_n, r.nu2, r.z, r.exact, r.nodes, r.seconds
                ));
            }
            s
        }
        Format::Text => {
            let mut s = format!("{:>4} {:>8} {:>8} {:>8} {:>8} {:>7}\n", "n", "maxcut", "C(n,4)", "nu2", "Z(n)", "proof");
            for r in &rows {
                s.push_str(&format!(
                    "{:>4} {:>8} {:>8} {:>8} {:>8} {:>7}\n",
                    r.n,
                    r.maxcut,
                    r.e_n,
                    r.nu2,
                    r.z,
                    if r.exact { "exact" } else { "bound" }
                ));
            }
            s
        }
    };
    emit(cli, &artifact)?;
    Ok(if all_exact { 0 } else { EXIT_TIMEOUT })
}

fn cmd_maxcut(cli: &Cli, n: u32, budget: &BudgetArgs) -> anyhow::Result<i32> {
    let g = build_chord_graph(n)?;
    let mc = maxcut_exact_seeded(&g, &budget.budget(true), cli.seed)?;
    let exact = mc.proof_status == ProofStatus::Exact;
    let config = json!({"n": n, "budget_seconds": budget.budget_seconds, "budget_nodes": budget.budget_nodes, "seed": cli.seed});
    let result = serde_json::to_value(&mc)?;
    let artifact = match cli.format {
        Format::Text => format!(
            "maxcut(G_{n}) {} {} (upper bound {}), {} nodes",
            if exact { "=" } else { ">=" },
            mc.optimum,
            mc.upper_bound,
            mc.nodes_explored
        ),
        _ => envelope("maxcut", config, result),
    };
    emit(cli, &artifact)?;
    Ok(if exact { 0 } else { EXIT_TIMEOUT })
}

fn cmd_gw(cli: &Cli, n: u32, accuracy: Option<f64>, compare_full: bool) -> anyhow::Result<i32> {
    let problem = build_reduced(n)?;
    let accuracy = accuracy.unwrap_or_else(|| (1e-8 * zeta_complete(n as u64) as f64).max(1e-6));
    eprintln!("gw: solving reduced dual for n={n} (accuracy {accuracy:.2e}) ...");
    let solve = gw_reduced_solve(&problem, accuracy)?;
    let verification = verify_gw_certificate(&solve.certificate);
    if !verification.valid {
        return Err(anyhow!(
            "freshly produced certificate failed verification: {:?}",
            verification.reason
        ));
    }
    let full = if compare_full {
        let g = build_chord_graph(n)?;
        Some(gw_full(&g)?)
    } else {
        None
    };
    let cert_json = solve.certificate.to_json();
    let config = json!({"n": n, "accuracy": accuracy, "compare_full": compare_full});
    let summary = json!({
        "certificate": serde_json::from_str::<serde_json::Value>(&cert_json)?,
        "converged": solve.converged,
        "gw_upper_bound": verification.gw_upper_bound,
        "implied_nu2_lower": verification.implied_nu2_lower,
        "z_n": zeta_complete(n as u64),
        "gw_full": full,
    });
    match (&cli.out, cli.format) {
        (Some(_), _) => {
            emit(cli, &cert_json)?;
            println!("{}", envelope("gw", config, summary));
        }
        (None, Format::Text) => {
            println!(
                "GW(G_{n}) <= {:.6}; nu2(K_{n}) >= {}",
                verification.gw_upper_bound,
                verification.implied_nu2_lower.unwrap_or(0)
            );
        }
        (None, _) => println!("{}", envelope("gw", config, summary)),
    }
    Ok(if solve.converged { 0 } else { EXIT_TIMEOUT })
}

fn cmd_zar(cli: &Cli, m: u32, accuracy: Option<f64>, budget: &BudgetArgs) -> anyhow::Result<i32> {
    let accuracy = accuracy.unwrap_or(1e-4);
    let tt = build_type_table(m)?;
    let q = build_q_matrix(&tt);
    eprintln!(
        "zar: Types({m}) has {} types in {} orbits; solving to accuracy {accuracy:.1e} ...",
        tt.type_count(),
        tt.orbit_count()
    );
    let opts = ZarSolveOptions {
        time_budget: budget
            .budget_seconds
            .map(std::time::Duration::from_secs_f64),
    };
    let (cert_json, certified_t, converged, verification) = if m % 2 == 1 {
        let solve = sdp_bound_solve_with(&q, &tt, accuracy, &opts)?;
        let v = verify_zar_certificate(&solve.certificate, &q);
        if !v.valid {
            return Err(anyhow!(
                "freshly produced certificate failed verification: {:?}",
                v.reason
            ));
        }
        (
            solve.certificate.to_json(),
            v.certified_t.unwrap(),
            solve.converged,
            serde_json::to_value(&v)?,
        )
    } else {
        let solve = sdp_bound_solve_dense(&q, accuracy)?;
        let v = verify_zar_dense_certificate(&solve.certificate, &q);
        if !v.valid {
            return Err(anyhow!(
                "freshly produced certificate failed verification: {:?}",
                v.reason
            ));
        }
        (
            solve.certificate.to_json(),
            v.certified_t.unwrap(),
            solve.converged,
            serde_json::to_value(&v)?,
        )
    };
    let bound = assemble_genbound(m, certified_t)?;
    let config = json!({"m": m, "accuracy": accuracy, "budget_seconds": budget.budget_seconds});
    let mut result = json!({
        "certified_t": certified_t,
        "converged": converged,
        "verification": verification,
        "nu2_kmn_lower_bound": bound.display(),
        "certificate": serde_json::from_str::<serde_json::Value>(&cert_json)?,
    });
    if m == 7 {
        let k8 = k7_to_k8_bipartite(&bound);
        result["nu2_k8n_lower_bound"] = json!(k8.display());
    }
    match (&cli.out, cli.format) {
        (Some(_), _) => {
            emit(cli, &cert_json)?;
            println!("{}", envelope("zar", config, result));
        }
        (None, Format::Text) => {
            println!(
                "SDP_bound({m}) >= {certified_t:.6}; nu2(K_{{{m},n}}) >= {}",
                bound.display_approx()
            );
        }
        (None, _) => println!("{}", envelope("zar", config, result)),
    }
    Ok(if converged { 0 } else { EXIT_TIMEOUT })
}

fn cmd_verify(cli: &Cli, path: &PathBuf) -> anyhow::Result<i32> {
    let raw = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let sniff: serde_json::Value = serde_json::from_str(&raw)
        .with_context(|| format!("{} is not JSON", path.display()))?;
    let kind = sniff["kind"].as_str().unwrap_or("");
    let config = json!({"path": path.display().to_string(), "kind": kind});

    let (valid, result) = match kind {
        "gw" => {
            let cert = GwCertificate::from_json(&raw)?;
            let v = verify_gw_certificate(&cert);
            let mut r = serde_json::to_value(&v)?;
            r["n"] = json!(cert.n);
            r["z_n"] = json!(zeta_complete(cert.n as u64));
            if cli.format == Format::Text {
                match (v.valid, v.implied_nu2_lower) {
                    (true, Some(b)) => println!("valid: nu2(K_{}) >= {b}", cert.n),
                    _ => println!("INVALID: {}", v.reason.clone().unwrap_or_default()),
                }
            }
            (v.valid, r)
        }
        "zar" => {
            let cert = ZarCertificate::from_json(&raw)?;
            let tt = build_type_table(cert.m)?;
            let q = build_q_matrix(&tt);
            let v = verify_zar_certificate(&cert, &q);
            let mut r = serde_json::to_value(&v)?;
            if let Some(t) = v.certified_t {
                r["nu2_kmn_lower_bound"] = json!(assemble_genbound(cert.m, t)?.display());
            }
            if cli.format == Format::Text {
                match (v.valid, v.certified_t) {
                    (true, Some(t)) => println!("valid: SDP_bound({}) >= {t}", cert.m),
                    _ => println!("INVALID: {}", v.reason.clone().unwrap_or_default()),
                }
            }
            (v.valid, r)
        }
        "zar-dense" => {
            let cert = ZarDenseCertificate::from_json(&raw)?;
            let tt = build_type_table(cert.m)?;
            let q = build_q_matrix(&tt);
            let v = verify_zar_dense_certificate(&cert, &q);
            let mut r = serde_json::to_value(&v)?;
            if let Some(t) = v.certified_t {
                r["nu2_kmn_lower_bound"] = json!(assemble_genbound(cert.m, t)?.display());
            }
            if cli.format == Format::Text {
                match (v.valid, v.certified_t) {
                    (true, Some(t)) => println!("valid: SDP_bound({}) >= {t}", cert.m),
                    _ => println!("INVALID: {}", v.reason.clone().unwrap_or_default()),
                }
            }
            (v.valid, r)
        }
        other => {
            return Err(anyhow!(
                "unknown certificate kind {other:?} in {}",
                path.display()
            ))
        }
    };
    if cli.format != Format::Text {
        emit(cli, &envelope("verify", config, result))?;
    }
    Ok(if valid { 0 } else { EXIT_INVALID_CERT })
}

fn cmd_ratio_curve(cli: &Cli, n_list: &[u32], accuracy: Option<f64>) -> anyhow::Result<i32> {
    let n_list: Vec<u32> = if n_list.is_empty() {
        (0..10).map(|k| 9 + 10 * k).collect()
    } else {
        n_list.to_vec()
    };
    #[derive(Serialize)]
    struct Row {
        n: u32,
        nu2_lower: u64,
        z: u64,
        ratio: f64,
    }
    let mut rows = Vec::new();
    for &n in &n_list {
        let problem = build_reduced(n)?;
        let z = zeta_complete(n as u64);
        let acc = accuracy.unwrap_or_else(|| (1e-6 * z as f64).max(1e-6));
        eprintln!("ratio-curve: n={n} (accuracy {acc:.2e}) ...");
        let solve = gw_reduced_solve(&problem, acc)?;
        let v = verify_gw_certificate(&solve.certificate);
        let lower = v
            .implied_nu2_lower
            .ok_or_else(|| anyhow!("certificate for n={n} failed: {:?}", v.reason))?;
        rows.push(Row {
            n,
            nu2_lower: lower,
            z,
            ratio: lower as f64 / z as f64,
        });
    }
    let config = json!({"n": n_list, "accuracy": accuracy});
    let artifact = match cli.format {
        Format::Json => envelope("ratio-curve", config, serde_json::to_value(&rows)?),
        _ => {
            let mut s = String::from("n,bound,z,ratio\n");
            for r in &rows {
                s.push_str(&format!("{},{},{},{:.6}\n", r.n, r.nu2_lower, r.z, r.ratio));
            }
            s
        }
    };
    emit(cli, &artifact)?;
    Ok(0)
}

fn cmd_draw(cli: &Cli, n: u32, m: Option<u32>, budget: &BudgetArgs) -> anyhow::Result<i32> {
    let (drawing, crossings, label, timed_out) = match m {
        Some(m) => {
            let d = zarankiewicz_drawing(m, n)?;
            let c = twopage::count_crossings(&d)?;
            (d, c, format!("K_{{{m},{n}}} with Z({m},{n}) crossings"), false)
        }
        None => {
            eprintln!("draw: solving nu2(K_{n}) for a witness drawing ...");
            let r = nu2_complete_exact(n, &budget.budget(true))?;
            let c = r.nu2_upper;
            let exact = r.exact;
            (
                r.drawing,
                c,
                format!(
                    "K_{n} with {c} crossings ({})",
                    if exact { "optimal" } else { "best found" }
                ),
                !exact,
            )
        }
    };
    let config = json!({"n": n, "m": m});
    let drawing_json = drawing.to_json();
    match (&cli.out, cli.format) {
        (Some(_), _) => {
            emit(cli, &drawing_json)?;
            eprintln!("draw: {label}");
        }
        (None, Format::Text) => println!("{label}\n{drawing_json}"),
        (None, _) => println!(
            "{}",
            envelope(
                "draw",
                config,
                json!({"label": label, "crossings": crossings,
                       "drawing": serde_json::from_str::<serde_json::Value>(&drawing_json)?})
            )
        ),
    }
    Ok(if timed_out { EXIT_TIMEOUT } else { 0 })
}

fn cmd_qmatrix(cli: &Cli, m: u32) -> anyhow::Result<i32> {
    let tt = build_type_table(m)?;
    let q = build_q_matrix(&tt);
    emit(cli, &q.to_csv())?;
    Ok(0)
}
