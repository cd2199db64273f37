//! `klift` command-line driver.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{info, warn};

use crate::cr::{equilibrium_field, lift, restrict_lift_error, LiftReport, SolverKind};
use crate::diagnostics::{
    cr_jacobian_radius, cr_jacobian_spectrum, gmres_iteration_sweep, projector_spectrum,
    ProjectorKind, SpectrumParams, SpectrumReport, SweepCase, FULL_SPECTRUM_CAP,
};
use crate::error::{Error, Result};
use crate::io::{fmt_f64, read_snapshot, write_snapshot, CsvWriter};
use crate::kinetic::{restrict, DistributionField};
use crate::projection::{naive_projector, ConservedProjector};
use crate::scenario::Scenario;
use crate::steppers::FluxScheme;

pub const EXIT_ARGUMENT: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "klift",
    version,
    about = "BGK reference runs and constrained-runs lifting"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Scenario file (key = value).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Seed for randomized checks; the solvers themselves are deterministic.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Override `grid.N`.
    #[arg(long, global = true)]
    pub cells: Option<usize>,
    /// Override `grid.Nv`.
    #[arg(long, global = true)]
    pub velocities: Option<usize>,
    #[arg(long, global = true, value_parser = parse_flux)]
    pub flux: Option<FluxScheme>,
    #[arg(long, global = true, value_parser = parse_solver)]
    pub solver: Option<SolverKind>,
    /// Override `cr.order_m`.
    #[arg(long, global = true)]
    pub order: Option<usize>,
}

fn parse_flux(s: &str) -> std::result::Result<FluxScheme, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_solver(s: &str) -> std::result::Result<SolverKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Operator {
    ProjectorQr,
    ProjectorNaive,
    JacobianQr,
    JacobianNaive,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Advance the ambient equilibrium and write the reference snapshot.
    RunReference {
        /// Step count; defaults to `reference.steps`.
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Restrict a reference snapshot, lift it back and report the error.
    Lift {
        #[arg(long)]
        reference: PathBuf,
        /// Output prefix; `<out>_summary.csv`, `<out>_report.csv`,
        /// `<out>_cells.csv`, `<out>_relerr.csv` and `<out>.klift` are written.
        #[arg(long)]
        out: PathBuf,
    },
    /// Eigenvalues of a projector or of the CR map Jacobian.
    Spectrum {
        #[arg(long, value_enum)]
        operator: Operator,
        /// State at which the Jacobian is taken; defaults to the initial field.
        #[arg(long)]
        reference: Option<PathBuf>,
        /// Only estimate the spectral radius with this many Arnoldi steps.
        #[arg(long)]
        krylov: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Newton-GMRES iteration counts over grid sizes and orders.
    Sweep {
        #[arg(long = "grid-sizes", value_delimiter = ',', required = true)]
        grid_sizes: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "0,1,2,3")]
        orders: Vec<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Macroscopic fields of a snapshot as CSV.
    Restrict {
        #[arg(long)]
        reference: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Parses `args`, runs the command and maps errors to exit codes.
pub fn run_from_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_ARGUMENT } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("klift: {e}");
            if e.is_argument_error() {
                ExitCode::from(EXIT_ARGUMENT)
            } else {
                ExitCode::from(EXIT_NUMERICAL)
            }
        }
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.global.threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::argument(format!("cannot build thread pool: {e}")))?;
    if let Some(seed) = cli.global.seed {
        info!("seed {seed}");
    }
    let scenario = resolve_scenario(&cli.global)?;
    info!(
        "scenario {} ({}), N = {}, Nv = {}, hash {}",
        scenario.name,
        cli.global
            .config
            .as_deref()
            .unwrap_or(Path::new("?"))
            .display(),
        scenario.n_cells,
        scenario.n_velocities,
        scenario.config_hash()
    );
    pool.install(|| match &cli.command {
        Command::RunReference { steps, out } => {
            run_reference(&scenario, steps.unwrap_or(scenario.reference_steps), out)
        }
        Command::Lift { reference, out } => cmd_lift(&scenario, reference, out),
        Command::Spectrum {
            operator,
            reference,
            krylov,
            out,
        } => cmd_spectrum(&scenario, *operator, reference.as_deref(), *krylov, out),
        Command::Sweep {
            grid_sizes,
            orders,
            out,
        } => cmd_sweep(&scenario, grid_sizes, orders, out),
        Command::Restrict { reference, out } => cmd_restrict(&scenario, reference, out),
    })
}

fn resolve_scenario(g: &GlobalOpts) -> Result<Scenario> {
    let path = g
        .config
        .as_ref()
        .ok_or_else(|| Error::argument("--config is required"))?;
    let mut s = Scenario::from_path(path)?;
    if let Some(n) = g.cells {
        s.n_cells = n;
    }
    if let Some(nv) = g.velocities {
        s.n_velocities = nv;
    }
    if let Some(f) = g.flux {
        s.flux = f;
    }
    if let Some(solver) = g.solver {
        s.cr_solver = solver;
    }
    if let Some(m) = g.order {
        s.cr_order = m;
    }
    s.validate()?;
    Ok(s)
}

fn meta(s: &Scenario) -> Vec<(&'static str, String)> {
    vec![
        ("config_hash", s.config_hash()),
        ("scenario", s.name.clone()),
        ("N", s.n_cells.to_string()),
        ("Nv", s.n_velocities.to_string()),
        ("mass_rescale", s.mass_rescale.to_string()),
    ]
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut name = prefix.as_os_str().to_owned();
    name.push(suffix);
    PathBuf::from(name)
}

/// Advances `steps` steps; the snapshot appears only if every step succeeds.
pub fn run_reference(s: &Scenario, steps: usize, out: &Path) -> Result<()> {
    let stepper = s.stepper()?;
    info!(
        "dt = {:e} s, dx = {:e} m, L = {:e} m, lambda = {:e} m, u0 = {:e} m/s",
        stepper.config().dt,
        s.spatial_grid()?.dx(),
        s.length(),
        s.mean_free_path(),
        s.u0()
    );
    let partial = with_suffix(out, ".partial");
    let result = (|| -> Result<()> {
        let mut f = s.initial_field()?;
        let start = Instant::now();
        for step in 1..=steps {
            f = stepper.step_field(&f)?;
            if step % 100 == 0 || step == steps {
                let [mass, momentum, energy] = f.moment_totals();
                info!(
                    "step {step}/{steps} t = {:e}: mass {mass:e}, momentum {momentum:e}, energy {energy:e} ({:.1?})",
                    f.time,
                    start.elapsed()
                );
            }
        }
        write_snapshot(&partial, &f)?;
        std::fs::rename(&partial, out)?;
        Ok(())
    })();
    if result.is_err() {
        let _ = std::fs::remove_file(&partial);
    }
    result
}

fn check_snapshot(s: &Scenario, f: &DistributionField) -> Result<()> {
    if f.n_cells() != s.n_cells
        || f.n_velocities() != s.n_velocities
        || f.mass_scale != s.mass_scale()
    {
        return Err(Error::GridMismatch(format!(
            "snapshot is {}x{} (scale {:e}), scenario expects {}x{} (scale {:e})",
            f.n_cells(),
            f.n_velocities(),
            f.mass_scale,
            s.n_cells,
            s.n_velocities,
            s.mass_scale()
        )));
    }
    Ok(())
}

fn write_report(path: &Path, s: &Scenario, report: &LiftReport) -> Result<()> {
    let mut w = CsvWriter::create(
        path,
        &meta(s),
        &["iter", "residual", "drift", "seconds", "gmres_iterations"],
    )?;
    for r in &report.history {
        w.row([
            r.iter.to_string(),
            fmt_f64(r.residual),
            fmt_f64(r.drift),
            fmt_f64(r.seconds),
            r.gmres_iterations.to_string(),
        ])?;
    }
    w.finish()?;
    Ok(())
}

fn cmd_lift(s: &Scenario, reference: &Path, out: &Path) -> Result<()> {
    let fc = read_snapshot(reference)?;
    check_snapshot(s, &fc)?;
    let stepper = s.stepper()?;
    let basis = s.moment_basis()?;
    let cfg = s.cr_config()?;
    let macro_fields = restrict(&fc, &s.gas)?;

    let (lifted, report) = match lift(&stepper, &basis, &macro_fields, &cfg) {
        Ok(x) => x,
        Err(e) => {
            if let Some(history) = e.history() {
                let mut w = CsvWriter::create(
                    with_suffix(out, "_report.csv"),
                    &meta(s),
                    &["iter", "residual"],
                )?;
                for (i, r) in history.iter().enumerate() {
                    w.row([(i + 1).to_string(), fmt_f64(*r)])?;
                }
                w.finish()?;
            }
            return Err(e);
        }
    };
    let feq = equilibrium_field(&stepper, &macro_fields)?;
    let err = restrict_lift_error(&fc, &lifted)?;
    let err_eq = restrict_lift_error(&fc, &feq)?;
    println!("order m = {}, solver = {}", cfg.order(), cfg.solver);
    println!("|f - f_c|    = {:.4e}", err.two_norm);
    println!("|f_eq - f_c| = {:.4e}", err_eq.two_norm);
    println!(
        "iterations {}, gmres {}, moment drift {:.3e}",
        report.iterations, report.gmres_iterations, report.moment_drift
    );

    let mut m = meta(s);
    m.push(("order", cfg.order().to_string()));
    m.push(("solver", cfg.solver.to_string()));
    let mut w = CsvWriter::create(
        with_suffix(out, "_summary.csv"),
        &m,
        &[
            "order",
            "solver",
            "error_lift",
            "error_equilibrium",
            "iterations",
            "gmres_iterations",
            "moment_drift",
            "converged",
        ],
    )?;
    w.row([
        cfg.order().to_string(),
        cfg.solver.to_string(),
        fmt_f64(err.two_norm),
        fmt_f64(err_eq.two_norm),
        report.iterations.to_string(),
        report.gmres_iterations.to_string(),
        fmt_f64(report.moment_drift),
        report.converged.to_string(),
    ])?;
    w.finish()?;
    write_report(&with_suffix(out, "_report.csv"), s, &report)?;

    let x = fc.grid.centers();
    let mut w = CsvWriter::create(
        with_suffix(out, "_cells.csv"),
        &m,
        &["cell", "x", "abs_diff_lift", "abs_diff_equilibrium"],
    )?;
    for j in 0..fc.n_cells() {
        w.row([
            j.to_string(),
            fmt_f64(x[j]),
            fmt_f64(err.cell_abs_sums[j]),
            fmt_f64(err_eq.cell_abs_sums[j]),
        ])?;
    }
    w.finish()?;

    // log10 of the relative error; exact agreement is flagged instead
    let q = fc.n_velocities();
    let v = fc.vgrid.velocities();
    let mut w = CsvWriter::create(
        with_suffix(out, "_relerr.csv"),
        &m,
        &["cell", "x", "v", "log10_rel_error", "exact"],
    )?;
    for (idx, rel) in err.relative.iter().enumerate() {
        let (j, i) = (idx / q, idx % q);
        let (value, exact) = match rel {
            Some(r) => (fmt_f64(r.log10()), "0"),
            None => (String::new(), "1"),
        };
        w.row([
            j.to_string(),
            fmt_f64(x[j]),
            fmt_f64(v[i]),
            value,
            exact.to_string(),
        ])?;
    }
    w.finish()?;
    write_snapshot(with_suffix(out, ".klift"), &lifted)
}

fn write_spectrum(
    path: &Path,
    s: &Scenario,
    report: &SpectrumReport,
    extra: &[(&'static str, String)],
) -> Result<()> {
    let mut m = meta(s);
    m.push(("operator", report.operator.clone()));
    m.push(("k", report.params.k_conserved.to_string()));
    m.push((
        "m",
        report
            .params
            .order
            .map_or_else(|| "-".to_string(), |o| o.to_string()),
    ));
    m.push(("spectral_radius", fmt_f64(report.spectral_radius)));
    m.extend_from_slice(extra);
    let mut w = CsvWriter::create(path, &m, &["re", "im"])?;
    for l in &report.eigenvalues {
        w.row([fmt_f64(l.re), fmt_f64(l.im)])?;
    }
    w.finish()?;
    Ok(())
}

fn cmd_spectrum(
    s: &Scenario,
    op: Operator,
    reference: Option<&Path>,
    krylov: Option<usize>,
    out: &Path,
) -> Result<()> {
    let basis = s.moment_basis()?;
    let report = match op {
        Operator::ProjectorQr | Operator::ProjectorNaive => {
            let which = if op == Operator::ProjectorQr {
                ProjectorKind::Qr
            } else {
                ProjectorKind::Naive
            };
            let mut r = projector_spectrum(&basis, which)?;
            r.params.scenario = s.name.clone();
            r
        }
        Operator::JacobianQr | Operator::JacobianNaive => {
            let stepper = s.stepper()?;
            let f0 = match reference {
                Some(p) => {
                    let f = read_snapshot(p)?;
                    check_snapshot(s, &f)?;
                    f
                }
                None => s.initial_field()?,
            };
            let cfg = s.cr_config()?;
            let naive;
            let proj: &dyn ConservedProjector = if op == Operator::JacobianQr {
                &basis
            } else {
                naive = naive_projector(&basis)?;
                info!(
                    "naive projector: condition estimate {:e}",
                    naive.condition_estimate()
                );
                &naive
            };
            let params = SpectrumParams {
                n_cells: s.n_cells,
                n_velocities: s.n_velocities,
                k_conserved: s.k_conserved,
                order: Some(cfg.order()),
                scenario: s.name.clone(),
            };
            let dim = s.n_cells * (s.n_velocities - s.k_conserved);
            let operator = format!(
                "cr-jacobian-{}",
                if op == Operator::JacobianQr {
                    "qr"
                } else {
                    "naive"
                }
            );
            match krylov {
                None if dim > FULL_SPECTRUM_CAP => {
                    return Err(Error::DimensionCap {
                        dim,
                        cap: FULL_SPECTRUM_CAP,
                    })
                }
                None => {
                    let mut r =
                        cr_jacobian_spectrum(&stepper, &basis, proj, &f0.values, &cfg, params)?;
                    r.operator = operator;
                    r
                }
                Some(kd) => {
                    let rho = cr_jacobian_radius(&stepper, &basis, proj, &f0.values, &cfg, kd)?;
                    let mut r = SpectrumReport::from_eigenvalues(Vec::new(), operator, params);
                    r.spectral_radius = rho;
                    r
                }
            }
        }
    };
    println!(
        "{}: spectral radius {:.6}",
        report.operator, report.spectral_radius
    );
    write_spectrum(out, s, &report, &[])
}

/// Reference state for a grid size: `reference.steps` steps from the
/// ambient equilibrium, restricted and re-equilibrated as the lifting target.
fn sweep_case(base: &Scenario, n: usize) -> Result<SweepCase> {
    let mut s = base.clone();
    s.n_cells = n;
    s.validate()?;
    let stepper = s.stepper()?;
    let fc = stepper.advance(&s.initial_field()?, s.reference_steps)?;
    let f0 = equilibrium_field(&stepper, &restrict(&fc, &s.gas)?)?;
    Ok(SweepCase {
        stepper: Box::new(stepper),
        projector: Box::new(s.moment_basis()?),
        f0: f0.values,
    })
}

fn cmd_sweep(s: &Scenario, grid_sizes: &[usize], orders: &[usize], out: &Path) -> Result<()> {
    let cfg = s.cr_config()?;
    let rows = gmres_iteration_sweep(&|n| sweep_case(s, n), orders, grid_sizes, &cfg)?;
    let mut w = CsvWriter::create(
        out,
        &meta(s),
        &[
            "N",
            "m",
            "gmres_iterations",
            "newton_iterations",
            "converged",
            "error",
        ],
    )?;
    for r in &rows {
        if !r.converged {
            warn!(
                "N = {}, m = {}: {}",
                r.n_cells,
                r.order,
                r.error.as_deref().unwrap_or("failed")
            );
        }
        w.row([
            r.n_cells.to_string(),
            r.order.to_string(),
            r.gmres_iterations.to_string(),
            r.newton_iterations.to_string(),
            r.converged.to_string(),
            r.error.clone().unwrap_or_default(),
        ])?;
        println!(
            "N = {:5}  m = {}  gmres {:5}  newton {:3}  {}",
            r.n_cells,
            r.order,
            r.gmres_iterations,
            r.newton_iterations,
            if r.converged { "ok" } else { "FAILED" }
        );
    }
    w.finish()?;
    Ok(())
}

fn cmd_restrict(s: &Scenario, reference: &Path, out: &Path) -> Result<()> {
    let f = read_snapshot(reference)?;
    check_snapshot(s, &f)?;
    let macro_fields = restrict(&f, &s.gas)?;
    let mut m = meta(s);
    m.push(("time", fmt_f64(f.time)));
    let mut w = CsvWriter::create(out, &m, &["cell", "x", "n", "u", "T"])?;
    for (j, (state, x)) in macro_fields.states().zip(f.grid.centers()).enumerate() {
        w.row([
            j.to_string(),
            fmt_f64(*x),
            fmt_f64(state.n),
            fmt_f64(state.u),
            fmt_f64(state.t),
        ])?;
    }
    w.finish()?;
    Ok(())
}
