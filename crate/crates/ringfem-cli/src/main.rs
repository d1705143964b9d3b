//! Batch driver for the annulus transmission solver: single solves, (ε, p)
//! convergence sweeps, mesh dumps, and closed-form reference tables, emitted
//! as CSV/JSON for external plotting.
//!
//! Exit codes: 0 success, 2 invalid configuration (including usage errors),
//! 1 numerical failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ringfem::prelude::*;

#[derive(Parser)]
#[command(
    name = "ringfem",
    version,
    about = "hp-FEM for a singularly perturbed reaction-diffusion transmission problem on an annulus",
    long_about = "Solves -eps^2 div(grad u) + u = f in the inner ring (a < r < b) coupled to \
                  -div(grad u) + u = f in the outer ring (b < r < c), with u = 0 on r = a and \
                  r = c, continuity at r = b, and flux datum h on the interface. The mesh places \
                  anisotropic needle bands of width kappa*p*eps inside the boundary and interface \
                  layers, giving energy-norm convergence exponential in p and uniform in eps."
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve one (eps, p) case; emit a one-row CSV record.
    Solve(SolveArgs),
    /// Cross-product (eps, p) sweep; CSV rows sorted by (eps, p) with per-eps
    /// rate-fit comment lines, plus a JSON mirror next to --out.
    Sweep(SweepArgs),
    /// Dump the layer-adapted mesh as JSON.
    Mesh(MeshArgs),
    /// Tabulate the closed-form radial solution as CSV (r, u, du/dr).
    Oracle(OracleArgs),
    /// Tabulate the composite matched-asymptotics sup error as CSV
    /// (eps, sup_error).
    Expansion(ExpansionArgs),
}

/// Geometry and mesh parameters shared by every subcommand.
#[derive(Args)]
struct Common {
    /// Annulus radii: inner boundary, interface, outer boundary.
    #[arg(long, value_name = "a,b,c", default_value = "1,2,3", value_parser = parse_radii)]
    radii: Radii,
    /// Needle-width constant: layer bands have width kappa*p*eps.
    #[arg(long, default_value_t = 1.0)]
    kappa: f64,
    /// Number of uniform angular sectors.
    #[arg(long, default_value_t = 16)]
    sectors: usize,
    /// Output path; stdout when omitted.
    #[arg(long, value_name = "path")]
    out: Option<PathBuf>,
}

impl Common {
    fn geometry(&self) -> Result<AnnularGeometry> {
        AnnularGeometry::new(self.radii.0[0], self.radii.0[1], self.radii.0[2])
    }
}

#[derive(Clone, Copy)]
struct Radii([f64; 3]);

fn parse_radii(s: &str) -> std::result::Result<Radii, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected three comma-separated radii a,b,c, got `{s}`"));
    }
    let mut r = [0.0; 3];
    for (i, part) in parts.iter().enumerate() {
        r[i] = part
            .trim()
            .parse::<f64>()
            .map_err(|e| format!("radius `{part}` is not a number: {e}"))?;
    }
    Ok(Radii(r))
}

fn parse_sign(s: &str) -> std::result::Result<f64, String> {
    match s {
        "+" => Ok(1.0),
        "-" => Ok(-1.0),
        other => Err(format!("expected `+` or `-`, got `{other}`")),
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CaseArg {
    /// Benchmark data: f = 1 on both rings, h = 0.
    Const,
    /// Polynomial manufactured solution u = (r-a)(c-r) with matching loads.
    Manufactured,
}

impl From<CaseArg> for DataCase {
    fn from(c: CaseArg) -> DataCase {
        match c {
            CaseArg::Const => DataCase::Const,
            CaseArg::Manufactured => DataCase::Manufactured,
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    common: Common,
    /// Perturbation parameter (exactly one value).
    #[arg(long, value_delimiter = ',', default_value = "1e-2")]
    eps: Vec<f64>,
    /// Polynomial degree (exactly one value).
    #[arg(long, value_delimiter = ',', default_value = "8")]
    p: Vec<usize>,
    /// Right-hand-side data case.
    #[arg(long, value_enum, default_value_t = CaseArg::Const)]
    case: CaseArg,
    /// Sign applied to the interface flux term of the load functional.
    #[arg(long, value_name = "+|-", default_value = "+", value_parser = parse_sign,
          allow_hyphen_values = true)]
    h_sign: f64,
    /// Also write the nodal solution grid as JSON to this path.
    #[arg(long, value_name = "path")]
    solution_out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    /// Perturbation parameters to sweep.
    #[arg(long, value_delimiter = ',', default_value = "1e-2")]
    eps: Vec<f64>,
    /// Polynomial degrees to sweep.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5,6,7,8")]
    p: Vec<usize>,
    /// Right-hand-side data case.
    #[arg(long, value_enum, default_value_t = CaseArg::Const)]
    case: CaseArg,
    /// Sign applied to the interface flux term of the load functional.
    #[arg(long, value_name = "+|-", default_value = "+", value_parser = parse_sign,
          allow_hyphen_values = true)]
    h_sign: f64,
}

#[derive(Args)]
struct MeshArgs {
    #[command(flatten)]
    common: Common,
    /// Perturbation parameter (exactly one value).
    #[arg(long, value_delimiter = ',', default_value = "1e-2")]
    eps: Vec<f64>,
    /// Polynomial degree (exactly one value).
    #[arg(long, value_delimiter = ',', default_value = "8")]
    p: Vec<usize>,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    common: Common,
    /// Perturbation parameter (exactly one value).
    #[arg(long, value_delimiter = ',', default_value = "1e-2")]
    eps: Vec<f64>,
    /// Right-hand-side data case.
    #[arg(long, value_enum, default_value_t = CaseArg::Const)]
    case: CaseArg,
    /// Sample points per ring; the interface radius appears twice, once per
    /// side, because du/dr jumps there.
    #[arg(long, default_value_t = 200)]
    samples: usize,
}

#[derive(Args)]
struct ExpansionArgs {
    #[command(flatten)]
    common: Common,
    /// Perturbation parameters to tabulate (benchmark data f = 1, h = 0).
    #[arg(long, value_delimiter = ',', default_value = "1e-1,1e-2,1e-3,1e-4")]
    eps: Vec<f64>,
    /// Base sample count for the sup-error scan (layer neighborhoods get
    /// extra clustered points automatically).
    #[arg(long, default_value_t = 2000)]
    samples: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Solve(args) => cmd_solve(args),
        Cmd::Sweep(args) => cmd_sweep(args),
        Cmd::Mesh(args) => cmd_mesh(args),
        Cmd::Oracle(args) => cmd_oracle(args),
        Cmd::Expansion(args) => cmd_expansion(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { 2 } else { 1 })
        }
    }
}

/// 17 significant digits, matching the library's CSV/JSON float format.
fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn single<T: Copy>(list: &[T], what: &str) -> Result<T> {
    match list {
        [one] => Ok(*one),
        [] => Err(Error::Config(format!("--{what} needs a value"))),
        many => Err(Error::Config(format!(
            "this command takes exactly one --{what} value, got {} (use `sweep` for lists)",
            many.len()
        ))),
    }
}

fn emit(out: &Option<PathBuf>, content: &str) -> Result<()> {
    match out {
        None => {
            print!("{content}");
            Ok(())
        }
        Some(path) => write_file(path, content),
    }
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    fs::write(path, content)
        .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))
}

fn run_params(common: &Common, eps: f64, p: usize, case: CaseArg, h_sign: f64) -> Result<RunParams> {
    let mut params = RunParams::new(common.geometry()?, eps, p);
    params.kappa = common.kappa;
    params.m = common.sectors;
    params.case = case.into();
    params.h_sign = h_sign;
    Ok(params)
}

fn cmd_solve(args: SolveArgs) -> Result<()> {
    let eps = single(&args.eps, "eps")?;
    let p = single(&args.p, "p")?;
    let params = run_params(&args.common, eps, p, args.case, args.h_sign)?;
    let out = solve_case(&params)?;
    eprintln!(
        "solved eps={:e} p={}: N={}, relative energy error {:.3e} ({:.1} ms)",
        eps, p, out.record.n, out.record.err_energy_rel, out.record.runtime_ms
    );
    emit(&args.common.out, &records_to_csv(&[out.record]))?;
    if let Some(path) = &args.solution_out {
        write_file(path, &ringfem::driver::solution_json(&out))?;
    }
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    if args.eps.is_empty() {
        return Err(Error::Config("--eps needs at least one value".into()));
    }
    if args.p.is_empty() {
        return Err(Error::Config("--p needs at least one value".into()));
    }
    let mut records = Vec::new();
    for &eps in &args.eps {
        for &p in &args.p {
            let params = run_params(&args.common, eps, p, args.case, args.h_sign)?;
            records.push(solve_case(&params)?.record);
        }
    }

    let mut eps_sorted = args.eps.clone();
    eps_sorted.sort_by(f64::total_cmp);
    eps_sorted.dedup();
    let mut csv = records_to_csv(&records);
    let mut fits = Vec::new();
    for &eps in &eps_sorted {
        let group: Vec<SweepRecord> =
            records.iter().filter(|r| r.eps == eps).copied().collect();
        match fit_rate(&group) {
            Ok(fit) => {
                csv.push_str(&ringfem::postproc::fit_summary_line(eps, &fit));
                fits.push((eps, fit));
            }
            Err(_) => {
                csv.push_str(&format!(
                    "# fit eps={}: skipped (needs at least 3 distinct N)\n",
                    fmt(eps)
                ));
            }
        }
    }
    emit(&args.common.out, &csv)?;
    if let Some(path) = &args.common.out {
        write_file(&path.with_extension("json"), &records_to_json(&records, &fits))?;
    }
    Ok(())
}

fn cmd_mesh(args: MeshArgs) -> Result<()> {
    let eps = single(&args.eps, "eps")?;
    let p = single(&args.p, "p")?;
    let geom = args.common.geometry()?;
    let mesh = build_mesh(&geom, eps, p, args.common.kappa, args.common.sectors)?;
    emit(&args.common.out, &mesh.to_json())
}

fn cmd_oracle(args: OracleArgs) -> Result<()> {
    let eps = single(&args.eps, "eps")?;
    let geom = args.common.geometry()?;
    let n = args.samples.max(2);
    let problem = TransmissionProblem::new(geom, eps, args.case.into())?;
    let exact = ExactSolution::for_problem(&problem)?;
    let mut csv = String::from("r,u,dudr\n");
    for region in [Region::Plus, Region::Minus] {
        let (r0, r1) = geom.radial_span(region);
        for k in 0..n {
            let r = r0 + (r1 - r0) * k as f64 / (n - 1) as f64;
            let (u, du) = exact.eval_in(r, region);
            csv.push_str(&format!("{},{},{}\n", fmt(r), fmt(u), fmt(du)));
        }
    }
    emit(&args.common.out, &csv)
}

fn cmd_expansion(args: ExpansionArgs) -> Result<()> {
    if args.eps.is_empty() {
        return Err(Error::Config("--eps needs at least one value".into()));
    }
    let geom = args.common.geometry()?;
    let mut eps_sorted = args.eps.clone();
    eps_sorted.sort_by(|x, y| f64::total_cmp(y, x));
    eps_sorted.dedup();
    let mut csv = String::from("eps,sup_error\n");
    for &eps in &eps_sorted {
        let comp = build_composite(&geom, eps, 1.0, 0.0)?;
        let oracle = radial_exact(&geom, eps, 1.0, 1.0, 0.0)?;
        let sup = composite_error(&comp, &oracle, args.samples)?;
        csv.push_str(&format!("{},{}\n", fmt(eps), fmt(sup)));
    }
    emit(&args.common.out, &csv)
}
