//! `simplex-angles`: exact angle sums of beta and beta' simplices and the
//! stochastic-geometry constants built from them.
//!
//! Exit codes: 0 success, 1 usage or domain error, 2 verification failure.

mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use simplex_angles::applications::{voronoi_conjecture_rows, voronoi_structure_check};
use simplex_angles::exact::parse_rational;
use simplex_angles::oracle::{mc_vertex_angle, quad_i, quad_i_tilde, McConfig};
use simplex_angles::tables::{arithmetic_structure_check, AngleTable, Family, JPath, SimplexFamily};
use simplex_angles::{reitzner_ball, reitzner_sphere, voronoi_f_vector, Error, HalfInt, PiExpr};

use render::{float, OutputMode, Style};

/// Largest Voronoi dimension computed without `--allow-large`.
const VORONOI_GUARD: u32 = 12;

#[derive(Parser, Debug)]
#[command(name = "simplex-angles", version, about = "Exact angle sums of random beta and beta' simplices")]
struct Cli {
    /// Rendering of exact values in text mode.
    #[arg(long, value_enum, default_value = "exact", global = true)]
    output: OutputMode,
    /// Significant digits of decimal output.
    #[arg(long, env = "SIMPLEX_ANGLES_DIGITS", default_value_t = 30, global = true,
          value_parser = clap::value_parser!(u32).range(1..))]
    digits: u32,
    /// Table cache file, loaded before and saved after the command.
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    /// Emit one JSON document instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Expected external-angle sum of the beta simplex.
    #[command(name = "I")]
    I(IArgs),
    /// Expected external-angle sum of the beta' simplex.
    #[command(name = "I-tilde")]
    ITilde(IArgs),
    /// Expected internal-angle sum of the beta simplex (whole row if --k is omitted).
    #[command(name = "J")]
    J(JArgs),
    /// Expected internal-angle sum of the beta' simplex (whole row if --k is omitted).
    #[command(name = "J-tilde")]
    JTilde(JArgs),
    /// Expected f-vector of the typical Poisson-Voronoi cell.
    Voronoi {
        #[arg(long)]
        dim: u32,
        /// Permit dimensions above the default guard.
        #[arg(long)]
        allow_large: bool,
    },
    /// Limiting f-vector constants of random polytopes in or on the unit ball.
    Reitzner {
        #[command(subcommand)]
        body: Body,
    },
    /// Relation, matrix and arithmetic-structure checks at (n, beta).
    Verify {
        #[arg(long)]
        n: u32,
        #[arg(long, allow_hyphen_values = true)]
        beta: HalfInt,
        #[arg(long, default_value = "beta")]
        family: SimplexFamily,
    },
    /// Report the monomial patterns of the odd-codimension entries.
    Conjectures {
        #[arg(long)]
        max_n: u32,
        #[arg(long, allow_hyphen_values = true, default_value = "-1")]
        beta_lo: HalfInt,
        #[arg(long, allow_hyphen_values = true, default_value = "3")]
        beta_hi: HalfInt,
    },
    /// Floating-point cross-checks of the exact values.
    Oracle {
        #[command(subcommand)]
        kind: OracleKind,
    },
}

#[derive(Args, Debug)]
struct IArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    k: u32,
    #[arg(long, allow_hyphen_values = true)]
    alpha: i64,
}

#[derive(Args, Debug)]
struct JArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    k: Option<u32>,
    /// Integer or half-integer as an exact fraction ("-1", "1/2", "5/2").
    #[arg(long, allow_hyphen_values = true)]
    beta: HalfInt,
    #[arg(long, value_enum, default_value = "recursion")]
    path: PathArg,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PathArg {
    Recursion,
    RecursionFull,
    Direct,
    DirectParity,
}

impl From<PathArg> for JPath {
    fn from(p: PathArg) -> JPath {
        match p {
            PathArg::Recursion => JPath::Recursion,
            PathArg::RecursionFull => JPath::RecursionFull,
            PathArg::Direct => JPath::Direct,
            PathArg::DirectParity => JPath::DirectParity,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Body {
    /// Uniform points in the ball.
    Ball {
        #[arg(long)]
        dim: u32,
    },
    /// Uniform points on the sphere.
    Sphere {
        #[arg(long)]
        dim: u32,
    },
}

#[derive(Subcommand, Debug)]
enum OracleKind {
    /// Nested quadrature of the external-angle integral.
    QuadI {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: u32,
        /// Exact fraction; need not be an integer.
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        /// Integrate the beta' variant.
        #[arg(long)]
        tilde: bool,
    },
    /// Monte Carlo estimate of J(n, 1, beta).
    Mc {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value = "beta")]
        family: SimplexFamily,
        /// Exact fraction.
        #[arg(long, allow_hyphen_values = true)]
        beta: String,
        #[arg(long, default_value_t = 2000)]
        simplices: usize,
        #[arg(long, default_value_t = 20000)]
        directions: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

/// Failure of a command, mapped to the process exit code.
#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Usage(String),
    /// Carries the report, which is still printed to stdout.
    #[error("verification failed")]
    Verification(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 2,
            _ => 1,
        }
    }
}

type Outcome = Result<String, CliError>;

struct Ctx {
    table: AngleTable,
    style: Style,
    json: bool,
}

impl Ctx {
    fn single(&self, header: Value, x: &PiExpr) -> String {
        if self.json {
            let mut doc = header;
            doc["value"] = self.style.value_json(x);
            format!("{doc}\n")
        } else {
            format!("{}\n", self.style.value(x))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let ctx = Ctx {
        table: AngleTable::new(),
        style: Style { mode: cli.output, digits: cli.digits as usize },
        json: cli.json,
    };
    let result = with_cache(&ctx, cli.cache.as_deref(), |ctx| dispatch(ctx, cli.command));
    match result {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(CliError::Verification(report)) => {
            print!("{report}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn with_cache(ctx: &Ctx, path: Option<&std::path::Path>, run: impl FnOnce(&Ctx) -> Outcome) -> Outcome {
    if let Some(p) = path {
        let load = ctx.table.load_cache(p)?;
        if let Some(w) = load.warning {
            eprintln!("warning: {w}");
        }
    }
    let out = run(ctx);
    if let Some(p) = path {
        ctx.table.save_cache(p)?;
    }
    out
}

fn dispatch(ctx: &Ctx, command: Command) -> Outcome {
    match command {
        Command::I(a) => {
            let x = ctx.table.big_i(a.n, a.k, a.alpha)?;
            Ok(ctx.single(json!({"quantity": "I", "n": a.n, "k": a.k, "alpha": a.alpha}), &x))
        }
        Command::ITilde(a) => {
            let x = ctx.table.big_i_tilde(a.n, a.k, a.alpha)?;
            Ok(ctx.single(json!({"quantity": "I-tilde", "n": a.n, "k": a.k, "alpha": a.alpha}), &x))
        }
        Command::J(a) => j_command(ctx, a, false),
        Command::JTilde(a) => j_command(ctx, a, true),
        Command::Voronoi { dim, allow_large } => voronoi(ctx, dim, allow_large),
        Command::Reitzner { body: Body::Ball { dim } } => ball(ctx, dim),
        Command::Reitzner { body: Body::Sphere { dim } } => sphere(ctx, dim),
        Command::Verify { n, beta, family } => verify(ctx, n, beta, family),
        Command::Conjectures { max_n, beta_lo, beta_hi } => conjectures(ctx, max_n, beta_lo, beta_hi),
        Command::Oracle { kind: OracleKind::QuadI { n, k, alpha, tol, tilde } } => {
            quad(ctx, n, k, &alpha, tol, tilde)
        }
        Command::Oracle { kind: OracleKind::Mc { n, family, beta, simplices, directions, seed } } => {
            mc(ctx, McArgs { n, family, beta, simplices, directions, seed })
        }
    }
}

fn j_command(ctx: &Ctx, a: JArgs, tilde: bool) -> Outcome {
    let path = JPath::from(a.path);
    let name = if tilde { "J-tilde" } else { "J" };
    let header = json!({"quantity": name, "n": a.n, "beta": a.beta.to_string()});
    match a.k {
        Some(k) => {
            let x = if tilde {
                ctx.table.big_j_tilde_with(a.n, k, a.beta, path)?
            } else {
                ctx.table.big_j_with(a.n, k, a.beta, path)?
            };
            let mut header = header;
            header["k"] = json!(k);
            Ok(ctx.single(header, &x))
        }
        None => {
            let row = if tilde {
                ctx.table.j_tilde_row(a.n, a.beta, path)?
            } else {
                ctx.table.j_row(a.n, a.beta, path)?
            };
            if ctx.json {
                let mut doc = header;
                doc["row"] = ctx.style.row_json(&row);
                Ok(format!("{doc}\n"))
            } else {
                Ok(ctx.style.row(&row, 1))
            }
        }
    }
}

fn voronoi(ctx: &Ctx, dim: u32, allow_large: bool) -> Outcome {
    if dim > VORONOI_GUARD && !allow_large {
        return Err(CliError::Usage(format!(
            "--dim {dim} exceeds {VORONOI_GUARD}; pass --allow-large to compute it anyway"
        )));
    }
    let f = voronoi_f_vector(&ctx.table, dim)?;
    if ctx.json {
        Ok(format!("{}\n", json!({"dim": dim, "entries": ctx.style.row_json(&f.entries)})))
    } else {
        Ok(ctx.style.row(&f.entries, 0))
    }
}

fn ball(ctx: &Ctx, dim: u32) -> Outcome {
    let r = reitzner_ball(&ctx.table, dim)?;
    let digits = ctx.style.digits;
    let constants = (0..r.vector.len()).map(|k| r.constant_decimal(k, digits)).collect::<Result<Vec<_>, _>>()?;
    if ctx.json {
        let doc = json!({
            "dim": dim,
            "prefactor": ctx.style.gamma_json(&r.prefactor),
            "vector": ctx.style.row_json(&r.vector),
            "constants_decimal": constants,
        });
        return Ok(format!("{doc}\n"));
    }
    // C_{d,k} = prefactor × vector[k]
    let mut out = format!("prefactor: {}\n", ctx.style.gamma(&r.prefactor));
    for (k, (v, c)) in r.vector.iter().zip(&constants).enumerate() {
        let line = match ctx.style.mode {
            OutputMode::Exact => v.to_string(),
            OutputMode::Decimal => c.clone(),
            OutputMode::Both => format!("{v} => {c}"),
        };
        out.push_str(&format!("k={k}: {line}\n"));
    }
    Ok(out)
}

fn sphere(ctx: &Ctx, dim: u32) -> Outcome {
    let row = reitzner_sphere(&ctx.table, dim)?;
    if ctx.json {
        Ok(format!("{}\n", json!({"dim": dim, "entries": ctx.style.row_json(&row)})))
    } else {
        Ok(ctx.style.row(&row, 0))
    }
}

fn verify(ctx: &Ctx, n: u32, beta: HalfInt, family: SimplexFamily) -> Outcome {
    let report = ctx.table.verify_relations(n, beta, family)?;
    let (ext_family, int_family, alpha) = match family {
        SimplexFamily::Beta => (Family::I, Family::J, beta.twice() + i64::from(n) - 1),
        SimplexFamily::BetaPrime => (Family::ITilde, Family::JTilde, beta.twice() - i64::from(n) + 1),
    };
    let mut structure = Vec::new();
    for k in 1..=n {
        let (ext, int) = match family {
            SimplexFamily::Beta => (ctx.table.big_i(n, k, alpha)?, ctx.table.big_j(n, k, beta)?),
            SimplexFamily::BetaPrime => (ctx.table.big_i_tilde(n, k, alpha)?, ctx.table.big_j_tilde(n, k, beta)?),
        };
        let alpha_h = HalfInt::from_int(alpha);
        structure.push((ext_family, k, arithmetic_structure_check(&ext, n, k, alpha_h, ext_family)));
        structure.push((int_family, k, arithmetic_structure_check(&int, n, k, beta, int_family)));
    }
    let passed = report.passed() && structure.iter().all(|(_, _, c)| c.pass);
    let out = if ctx.json {
        let residuals: Vec<Value> = report
            .residuals
            .iter()
            .map(|(name, r)| json!({"name": name, "residual": ctx.style.value_json(r)}))
            .collect();
        let checks: Vec<Value> = structure
            .iter()
            .map(|(f, k, c)| {
                json!({"quantity": f.name(), "k": k, "pass": c.pass, "support": c.support,
                       "allowed": c.allowed, "violations": c.violations})
            })
            .collect();
        let doc = json!({
            "n": n, "beta": beta.to_string(), "family": family, "alpha": alpha,
            "residuals": residuals, "structure": checks, "passed": passed,
        });
        format!("{doc}\n")
    } else {
        let mut out = String::new();
        for (name, r) in &report.residuals {
            out.push_str(&format!("{name}: {}\n", ctx.style.value(r)));
        }
        for (f, k, c) in &structure {
            let verdict = if c.pass { "ok".to_string() } else { format!("violations {:?}", c.violations) };
            out.push_str(&format!("structure {}({n},{k}): {verdict}\n", f.name()));
        }
        out.push_str(if passed { "all checks passed\n" } else { "CHECKS FAILED\n" });
        out
    };
    if passed {
        Ok(out)
    } else {
        Err(CliError::Verification(out))
    }
}

fn conjectures(ctx: &Ctx, max_n: u32, lo: HalfInt, hi: HalfInt) -> Outcome {
    if lo > hi {
        return Err(CliError::Usage(format!("--beta-lo {lo} exceeds --beta-hi {hi}")));
    }
    let report = ctx.table.conjecture_scan(max_n, (lo, hi))?;
    let mut rows: Vec<(String, simplex_angles::tables::ConjectureRow)> =
        report.rows.into_iter().map(|r| (r.family.name().to_string(), r)).collect();
    let mut voronoi_ok = true;
    for d in (3..=max_n.min(VORONOI_GUARD)).step_by(2) {
        let f = voronoi_f_vector(&ctx.table, d)?;
        voronoi_ok &= (0..d).all(|k| voronoi_structure_check(&f.entries[k as usize], d, k).pass);
        rows.extend(voronoi_conjecture_rows(&f).into_iter().map(|r| ("voronoi".to_string(), r)));
    }
    let held = rows.iter().filter(|(_, r)| r.holds).count();
    if ctx.json {
        let list: Vec<Value> = rows
            .iter()
            .map(|(label, r)| {
                json!({"quantity": label, "n": r.n, "k": r.k, "beta": r.beta.to_string(),
                       "value": ctx.style.value_json(&r.value), "expected_pi_exp": r.expected_pi_exp,
                       "holds": r.holds})
            })
            .collect();
        let doc = json!({"rows": list, "held": held, "total": rows.len(), "voronoi_structure": voronoi_ok});
        return Ok(format!("{doc}\n"));
    }
    let mut out = String::new();
    for (label, r) in &rows {
        let verdict = if r.holds { "holds" } else { "FAILS" };
        let at = if label == "voronoi" { format!("d={}", r.n) } else { format!("n={} beta={}", r.n, r.beta) };
        out.push_str(&format!(
            "{label} {at} k={}: {} [expected pi^{}] {verdict}\n",
            r.k,
            ctx.style.value(&r.value),
            r.expected_pi_exp,
        ));
    }
    out.push_str(&format!("holds on {held} of {} instances\n", rows.len()));
    Ok(out)
}

fn exact_to_f64(s: &str) -> Result<f64, CliError> {
    Ok(PiExpr::rational(parse_rational(s)?).to_f64())
}

fn quad(ctx: &Ctx, n: u32, k: u32, alpha: &str, tol: f64, tilde: bool) -> Outcome {
    let a = exact_to_f64(alpha)?;
    let r = if tilde { quad_i_tilde(n, k, a, tol)? } else { quad_i(n, k, a, tol)? };
    // exact reference when the parameter is an admissible integer
    let exact = alpha.parse::<i64>().ok().and_then(|a| {
        if tilde {
            ctx.table.big_i_tilde(n, k, a).ok()
        } else {
            ctx.table.big_i(n, k, a).ok()
        }
    });
    let rel = exact.as_ref().map(|x| {
        let e = x.to_f64();
        if r.value == e {
            0.0
        } else {
            ((r.value - e) / e).abs()
        }
    });
    if ctx.json {
        let mut doc = json!({"quantity": if tilde { "I-tilde" } else { "I" }, "n": n, "k": k, "alpha": alpha,
                             "tol": tol, "quadrature": r});
        if let (Some(x), Some(rel)) = (&exact, rel) {
            doc["exact"] = ctx.style.value_json(x);
            doc["relative_difference"] = json!(rel);
        }
        return Ok(format!("{doc}\n"));
    }
    let status = if r.converged { "converged" } else { "NOT converged" };
    let mut out = format!(
        "quadrature: {} (error estimate {}, {} evaluations, {status})\n",
        float(r.value),
        float(r.error_estimate),
        r.evaluations
    );
    if let (Some(x), Some(rel)) = (&exact, rel) {
        out.push_str(&format!("exact: {}\nrelative difference: {}\n", ctx.style.value(x), float(rel)));
    }
    Ok(out)
}

struct McArgs {
    n: u32,
    family: SimplexFamily,
    beta: String,
    simplices: usize,
    directions: usize,
    seed: u64,
}

fn mc(ctx: &Ctx, a: McArgs) -> Outcome {
    let beta = exact_to_f64(&a.beta)?;
    let cfg = McConfig::new(a.n, a.family, beta, a.simplices, a.directions, a.seed);
    let r = mc_vertex_angle(&cfg)?;
    let exact = a.beta.parse::<HalfInt>().ok().and_then(|b| match a.family {
        SimplexFamily::Beta => ctx.table.big_j(a.n, 1, b).ok(),
        SimplexFamily::BetaPrime => ctx.table.big_j_tilde(a.n, 1, b).ok(),
    });
    let z = exact.as_ref().map(|x| (r.estimate - x.to_f64()) / r.stderr);
    if ctx.json {
        let mut doc = json!({"quantity": "J(n,1)", "beta": a.beta, "monte_carlo": r});
        if let (Some(x), Some(z)) = (&exact, z) {
            doc["exact"] = ctx.style.value_json(x);
            doc["z_score"] = json!(z);
        }
        return Ok(format!("{doc}\n"));
    }
    let mut out = format!(
        "estimate: {} +- {} ({} simplices x {} directions, seed {}, {} rejections, {} boundary hits)\n",
        float(r.estimate),
        float(r.stderr),
        r.n_simplices,
        r.n_directions,
        r.seed,
        r.rejections,
        r.boundary_hits
    );
    if let (Some(x), Some(z)) = (&exact, z) {
        out.push_str(&format!("exact: {}\nz-score: {z:.3}\n", ctx.style.value(x)));
    }
    Ok(out)
}
