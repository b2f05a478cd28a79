//! The `inducert` command line.
//!
//! Exit codes: 0 success, 1 error, 2 exceptional-point referral, 64 usage.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use inducert_core::certifier::{certify_full, certify_linear, validate_certificate, CertifyError, CertifyOptions};
use inducert_core::exactnum::{parse_rational, Rational};
use inducert_core::expansion::{build_table, exceptional_points, s_k3, ExpansionError};
use inducert_core::ffkernel::{
    clique_bound, find_domination_k, make_uz, nonclique_bound, FfError, KernelHandle,
};
use inducert_core::graphs::{canonical_form, enumerate_h_min_degree, parse_graph6, to_graph6};
use inducert_core::kernel::balanced_b;
use inducert_core::{Graph, QuadValue};

use crate::approx::{quad_sci, rational_sci};
use crate::config::RunConfig;
use crate::json::{certificate_from_str, certificate_to_string, rational_str, HandleJson, LinearCertificateJson};
use crate::sampler::{estimate_edge_density, estimate_induced, estimate_t, ExactTarget, StepSampler, TensorSampler};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_EXCEPTIONAL: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Parser, Debug)]
#[command(
    name = "inducert",
    version,
    about = "Exact expansions and certificates that W_p is not a local maximizer of induced density",
    after_help = "Graphs are graph6 strings or one of the names K<n>, C<n>, P<n>, paw, diamond, path3+v.\n\
                  Rationals are written a/b; decimals are rejected."
)]
struct Cli {
    /// Worker threads for parallel stages (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// `key = value` configuration file; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the expansion table of F with P_{H,F}(p) values.
    Expand {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        p: String,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Print the zeros of the triangle coefficient S_{K3,F} in (0,1).
    Exceptional {
        #[arg(long)]
        graph: String,
    },
    /// Certify that a perturbation of W_p beats rand(F,p).
    Certify(CertifyArgs),
    /// Recompute and check a certificate file.
    Validate {
        #[arg(long)]
        cert: PathBuf,
    },
    /// Search k for the clique-dominated kernel U_z and print its t table.
    Propkey {
        #[arg(long)]
        z: u64,
        #[arg(long = "max-k")]
        max_k: Option<u32>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Monte Carlo cross-checks of a certificate kernel.
    Mc {
        #[arg(long)]
        cert: PathBuf,
        #[arg(long, default_value_t = 40)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        reps: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct CertifyArgs {
    #[arg(long)]
    graph: String,
    #[arg(long)]
    p: String,
    /// Required unless --linear.
    #[arg(long)]
    delta: Option<String>,
    /// Use the 3x3 linear route instead of the full pipeline.
    #[arg(long)]
    linear: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Support table of a full certificate.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Prime dividing m-2 for U_m (odd m).
    #[arg(long)]
    prime: Option<u64>,
    #[arg(long = "k-cap")]
    k_cap: Option<u32>,
    #[arg(long = "n-cap")]
    n_cap: Option<u32>,
}

/// A failure with its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

fn error(message: impl ToString) -> Failure {
    Failure { code: EXIT_ERROR, message: message.to_string() }
}

fn usage(message: impl ToString) -> Failure {
    Failure { code: EXIT_USAGE, message: message.to_string() }
}

type Out<'a> = &'a mut dyn Write;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: Out, err: Out) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = if code == EXIT_OK { write!(out, "{e}") } else { write!(err, "{e}") };
            return code;
        }
    };
    match execute(cli, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn execute(cli: Cli, out: Out) -> Result<i32, Failure> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| error(format!("{}: {e}", path.display())))?;
            RunConfig::parse(&text).map_err(error)?
        }
        None => RunConfig::default(),
    };
    if cli.threads.is_some() {
        cfg.threads = cli.threads;
    }
    cfg.check().map_err(usage)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads.unwrap_or(0))
        .build()
        .map_err(error)?;
    // the pool may run the command on another thread, so output is buffered
    let mut buf = Vec::new();
    let result = pool.install(|| dispatch(cli.command, &cfg, &mut buf));
    io(out.write_all(&buf))?;
    result
}

fn dispatch(cmd: Command, cfg: &RunConfig, out: Out) -> Result<i32, Failure> {
    match cmd {
        Command::Expand { graph, p, csv } => cmd_expand(&graph, &p, csv.or(cfg.csv.clone()).as_deref(), out),
        Command::Exceptional { graph } => cmd_exceptional(&graph, out),
        Command::Certify(a) => cmd_certify(a, cfg, out),
        Command::Validate { cert } => cmd_validate(&cert, out),
        Command::Propkey { z, max_k, csv } => {
            cmd_propkey(z, max_k.unwrap_or(cfg.k_cap), csv.or(cfg.csv.clone()).as_deref(), out)
        }
        Command::Mc { cert, n, reps, seed, out: path } => {
            cmd_mc(&cert, n, reps, seed.unwrap_or(cfg.seed), path.or(cfg.out.clone()).as_deref(), out)
        }
    }
}

/// graph6 first, then the built-in names.
pub fn parse_graph_arg(s: &str) -> Result<Graph, String> {
    match parse_graph6(s) {
        Ok(g) => Ok(g),
        Err(e) => Graph::named(s).map_err(|_| format!("malformed graph6 {s:?}: {e}")),
    }
}

fn graph_arg(s: &str) -> Result<Graph, Failure> {
    parse_graph_arg(s).map_err(error)
}

fn rational_arg(s: &str, name: &str) -> Result<Rational, Failure> {
    parse_rational(s).map_err(|e| usage(format!("--{name}: {e}")))
}

fn io(r: std::io::Result<()>) -> Result<(), Failure> {
    r.map_err(error)
}

fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<(), Failure> {
    let mut w = csv::Writer::from_path(path).map_err(error)?;
    w.write_record(header).map_err(error)?;
    for r in rows {
        w.write_record(r).map_err(error)?;
    }
    w.flush().map_err(error)
}

fn cmd_expand(graph: &str, p: &str, csv: Option<&Path>, out: Out) -> Result<i32, Failure> {
    let f = graph_arg(graph)?;
    let p = rational_arg(p, "p")?;
    let table = build_table(&f).map_err(error)?;
    let mut rows = Vec::new();
    for e in table.entries() {
        let pv = table.eval_p(&e.h, &p).map_err(error)?;
        let nj = e.nj.iter().map(u64::to_string).collect::<Vec<_>>().join(" ");
        rows.push(vec![
            to_graph6(&e.h.to_graph()),
            e.h.order().to_string(),
            e.h.edge_count().to_string(),
            nj,
            rational_str(&e.s.eval(&p)),
            rational_str(&pv),
        ]);
    }
    io(writeln!(out, "F = {} (v = {}, e = {}), p = {}", to_graph6(&f), f.order(), f.edge_count(), rational_str(&p)))?;
    io(writeln!(out, "{:<10} {:>2} {:>2}  {:<24} {:>16} {:>16}", "H", "v", "e", "n_j", "S(p)", "P(p)"))?;
    for r in &rows {
        io(writeln!(out, "{:<10} {:>2} {:>2}  {:<24} {:>16} {:>16}", r[0], r[1], r[2], r[3], r[4], r[5]))?;
    }
    if let Some(path) = csv {
        write_csv(path, &["H", "order", "edges", "nj", "S_at_p", "P_at_p"], &rows)?;
    }
    Ok(EXIT_OK)
}

fn cmd_exceptional(graph: &str, out: Out) -> Result<i32, Failure> {
    let f = graph_arg(graph)?;
    let s = s_k3(&f).map_err(error)?;
    io(writeln!(out, "S_(K3,F)(p) = {s}"))?;
    match exceptional_points(&f) {
        Err(ExpansionError::IdenticallyZero) => {
            io(writeln!(out, "S_(K3,F) vanishes identically: every p is exceptional"))?;
            Ok(EXIT_EXCEPTIONAL)
        }
        Err(e) => Err(error(e)),
        Ok(roots) if roots.is_empty() => {
            io(writeln!(out, "no exceptional points in (0,1)"))?;
            Ok(EXIT_OK)
        }
        Ok(roots) => {
            for r in roots {
                if r.is_exact() {
                    io(writeln!(out, "root {} (exact, multiplicity {})", rational_str(&r.lo), r.multiplicity))?;
                } else {
                    io(writeln!(
                        out,
                        "root in [{}, {}] (multiplicity {})",
                        rational_str(&r.lo),
                        rational_str(&r.hi),
                        r.multiplicity
                    ))?;
                }
            }
            Ok(EXIT_OK)
        }
    }
}

fn write_out(path: Option<&Path>, text: &str, out: Out) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| error(format!("{}: {e}", p.display()))),
        None => io(writeln!(out, "{text}")),
    }
}

fn cmd_certify(a: CertifyArgs, cfg: &RunConfig, out: Out) -> Result<i32, Failure> {
    let f = graph_arg(&a.graph)?;
    let p = rational_arg(&a.p, "p")?;
    let path = a.out.or(cfg.out.clone());
    if a.linear {
        return match certify_linear(&f, &p) {
            Ok(c) => {
                let text = serde_json::to_string_pretty(&LinearCertificateJson::from_certificate(&c)).map_err(error)?;
                write_out(path.as_deref(), &text, out)?;
                Ok(EXIT_OK)
            }
            Err(CertifyError::ExceptionalPoint) => {
                io(writeln!(out, "p = {} is an exceptional point; run without --linear", rational_str(&p)))?;
                Ok(EXIT_EXCEPTIONAL)
            }
            Err(e) => Err(error(e)),
        };
    }
    let delta = rational_arg(a.delta.as_deref().ok_or_else(|| usage("--delta is required without --linear"))?, "delta")?;
    let opts = CertifyOptions {
        k_cap: a.k_cap.unwrap_or(cfg.k_cap),
        n_cap: a.n_cap.unwrap_or(cfg.n_cap),
        prime: a.prime.or(cfg.prime),
        w_prime: cfg.w_prime,
    };
    let c = certify_full(&f, &p, &delta, &opts).map_err(error)?;
    write_out(path.as_deref(), &certificate_to_string(&c), out)?;
    if path.is_some() {
        io(writeln!(
            out,
            "certified: z = {}, k = {}, N = {}, lambda = {}, gap ~ {}",
            c.z,
            c.k,
            c.n,
            rational_str(&c.lambda),
            quad_sci(&c.gap)
        ))?;
    }
    if let Some(csv) = a.csv.or(cfg.csv.clone()) {
        let rows: Vec<Vec<String>> = c
            .support
            .iter()
            .map(|r| {
                vec![
                    to_graph6(&r.h.to_graph()),
                    r.h.edge_count().to_string(),
                    rational_str(&r.p_value),
                    rational_str(&r.t_b),
                    r.t_u.to_string(),
                    r.t_w.to_string(),
                    quad_sci(&r.contribution),
                ]
            })
            .collect();
        write_csv(&csv, &["H", "edges", "P", "t_B", "t_U", "t_W", "contribution_approx"], &rows)?;
    }
    Ok(EXIT_OK)
}

fn cmd_validate(path: &Path, out: Out) -> Result<i32, Failure> {
    let text = fs::read_to_string(path).map_err(|e| error(format!("{}: {e}", path.display())))?;
    let c = certificate_from_str(&text).map_err(error)?;
    match validate_certificate(&c) {
        Ok(()) => {
            io(writeln!(out, "valid: gap ~ {} > 0", quad_sci(&c.gap)))?;
            Ok(EXIT_OK)
        }
        Err(e) => Err(error(e)),
    }
}

fn cmd_propkey(z: u64, max_k: u32, csv: Option<&Path>, out: Out) -> Result<i32, Failure> {
    if !(3..=9).contains(&z) {
        return Err(usage("--z must be in 3..=9"));
    }
    let handle = make_uz(z, None).map_err(error)?;
    let support = enumerate_h_min_degree(z as usize, 2).map_err(error)?;
    let dom = match find_domination_k(z as usize, &support, &handle, max_k) {
        Ok(d) => d,
        Err(FfError::SearchExhausted { cap }) => return Err(error(format!("no dominating k up to {cap}"))),
        Err(e) => return Err(error(e)),
    };
    let hj = serde_json::to_string(&HandleJson::from_handle(&dom.handle)).map_err(error)?;
    match &dom.handle {
        KernelHandle::Const { alpha } => {
            io(writeln!(out, "z = 3: constant kernel U_3 = -{} (no search needed)", rational_str(alpha)))?
        }
        _ => io(writeln!(out, "z = {z}: k = {}", dom.k))?,
    }
    io(writeln!(out, "handle {hj}"))?;
    let km = canonical_form(&Graph::complete(z as usize)).map_err(error)?;
    let tz = dom.t[&km].clone();
    let mut rows = Vec::new();
    for (h, v) in &dom.t {
        rows.push(vec![
            to_graph6(&h.to_graph()),
            h.order().to_string(),
            h.edge_count().to_string(),
            v.to_string(),
            quad_sci(v),
        ]);
    }
    for r in &rows {
        io(writeln!(out, "{:<10} v={} e={:>2}  t = {}  (~{})", r[0], r[1], r[2], r[3], r[4]))?;
    }
    io(writeln!(out, "t(K_{z}) = {} < 0; every non-clique has |t| < |t(K_{z})|", quad_sci(&tz)))?;
    if let KernelHandle::Fp(spec) = &dom.handle {
        let bound = clique_bound(z as usize, spec.p, dom.k);
        let case = tz.cmp_value(&bound).map_err(error)?.is_le();
        io(writeln!(
            out,
            "clique bound t(K_{z}) <= -2^-{} p^(-k/2) = {}: {}",
            z * (z - 1) / 2,
            quad_sci(&bound),
            if case { "holds" } else { "fails" }
        ))?;
        let nb = QuadValue::from_rational(nonclique_bound(spec.p, dom.k));
        let mut ok = true;
        for (h, v) in &dom.t {
            if !h.is_clique() {
                ok &= v.abs().cmp_value(&nb).map_err(error)?.is_le();
            }
        }
        io(writeln!(
            out,
            "non-clique bound |t(G)| <= p^-k = {}: {}",
            rational_sci(&nonclique_bound(spec.p, dom.k)),
            if ok { "holds" } else { "fails" }
        ))?;
    }
    if let Some(path) = csv {
        write_csv(path, &["H", "order", "edges", "t", "t_approx"], &rows)?;
    }
    Ok(EXIT_OK)
}

fn cmd_mc(path: &Path, n: usize, reps: usize, seed: u64, save: Option<&Path>, out: Out) -> Result<i32, Failure> {
    let text = fs::read_to_string(path).map_err(|e| error(format!("{}: {e}", path.display())))?;
    let c = certificate_from_str(&text).map_err(error)?;
    validate_certificate(&c).map_err(error)?;
    let w = TensorSampler::from_certificate(&c);
    let n = n.max(c.f.order());
    let edge = estimate_edge_density(&w, n, reps, seed, Some(ExactTarget::from(&c.p))).map_err(error)?;
    let target = QuadValue::from_rational(inducert_core::expansion::rand_density(&c.f, &c.p))
        .checked_add(&c.gap)
        .map_err(error)?;
    let mut induced =
        estimate_induced(&c.f, &w, n, reps, seed, Some(ExactTarget::from(&target))).map_err(error)?;
    induced.flag_resolution(crate::approx::quad_f64(&c.gap));
    let b = StepSampler::new(&balanced_b());
    let c4 = Graph::cycle(4);
    let t_b = inducert_core::kernel::t_balanced_b(&c4);
    let comp = estimate_t(&c4, &b, reps, seed, Some(ExactTarget::from(&t_b))).map_err(error)?;
    let report = serde_json::json!({
        "edge_density": edge,
        "induced_density": induced,
        "t_C4_B": comp,
    });
    let text = serde_json::to_string_pretty(&report).map_err(error)?;
    write_out(save, &text, out)?;
    Ok(EXIT_OK)
}
