//! Command-line front end: every check in the library behind one binary.
//!
//! Exit codes: `0` all checks passed, `1` at least one check failed,
//! `2` bad usage or invalid input, `3` runtime failure (I/O, solver
//! non-convergence, numerical breakdown).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use conekit::config::ConeConfig;
use conekit::curvesing::{admissible_angle_range, analyze_germ, GermFamily};
use conekit::energy::{arrangements, cuspidal_cubic_volume_bound, Arrangement};
use conekit::expr::parse_poly;
use conekit::flatcone::{self, FlatConeMetric};
use conekit::lift::{
    self, build_connection, hopf_lift, seifert_base_admissible, seifert_base_window,
    seifert_pullback, ConnectionForm,
};
use conekit::rational::{format_rational, parse_rational, rat_int, to_f64};
use conekit::reflection::{catalog, default_catalog, Family};
use conekit::report::{Provenance, VerificationReport};
use conekit::sample;
use conekit::spherical::{liouville, Chart, GridSolution, SolverOptions, SphericalMetric};
use conekit::suite::{reflection_family_report, run_suite, SuiteOptions};
use conekit::{Error, Result};

/// Verification toolkit for flat Kähler cone metrics, spherical cone
/// metrics, their circle-bundle lifts and the associated energy ledgers.
#[derive(Parser)]
#[command(name = "conekit", version, about, max_term_width = 100)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,

    /// Seed (hexadecimal) for all sampled checks.
    #[arg(long, global = true, value_parser = parse_seed)]
    seed: Option<u64>,

    /// Print the report as JSON instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Print the report as CSV instead of text.
    #[arg(long, global = true, conflicts_with = "json")]
    csv: bool,

    /// Also write the JSON report to this file.
    #[arg(long, global = true, value_name = "FILE")]
    report: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Constant-curvature metrics with cone points on the sphere.
    #[command(subcommand)]
    Spherical(SphericalCmd),
    /// Circle-bundle lifts: connection form, holonomy, link volumes.
    #[command(subcommand)]
    Lift(LiftCmd),
    /// Flat Kähler cone metrics on ℂ² and their weighted pullbacks.
    #[command(subcommand)]
    Flatcone(FlatconeCmd),
    /// Reflection-group catalog and quotient-metric verification.
    #[command(subcommand)]
    Reflection(ReflectionCmd),
    /// Plane-curve germ analysis.
    #[command(subcommand)]
    Germ(GermCmd),
    /// Exact energy ledgers and volume bounds.
    #[command(subcommand)]
    Energy(EnergyCmd),
    /// Run the whole verification battery.
    Suite {
        /// Smaller grids and sample counts (smoke test).
        #[arg(long)]
        quick: bool,
    },
}

#[derive(Subcommand)]
enum SphericalCmd {
    /// Solve the curvature equation for a cone configuration.
    Solve {
        /// Configuration JSON: {"points": [[0,0],[1,0],"inf"], "angles": ["1/2","2/3","2/3"]}.
        #[arg(long, value_name = "FILE")]
        config: PathBuf,
        /// Target Gaussian curvature.
        #[arg(long, default_value_t = 4.0)]
        kappa: f64,
        /// Grid nodes per chart side.
        #[arg(long, default_value_t = 257)]
        n: usize,
        /// Chart half-width.
        #[arg(long, default_value_t = 2.0)]
        extent: f64,
        /// Write the solution JSON here.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Verify a stored solution: curvature, area, chart transition.
    Check {
        /// Solution JSON written by `spherical solve --out`.
        #[arg(long, value_name = "FILE")]
        sol: PathBuf,
        /// Curvature tolerance at the sample points.
        #[arg(long, default_value_t = 1e-2)]
        tol: f64,
        /// Quadrature cells per chart side.
        #[arg(long, default_value_t = 384)]
        cells: usize,
    },
}

#[derive(Subcommand)]
enum LiftCmd {
    /// Hopf lift of a curvature-4 base: connection, holonomy, volume.
    Hopf {
        #[command(flatten)]
        base: BaseArgs,
        /// Quadrature cells per chart side.
        #[arg(long, default_value_t = 384)]
        cells: usize,
        /// Relative volume tolerance.
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
    },
    /// Weighted (p,q) pullback bookkeeping on a two-point base.
    Seifert {
        /// Cover index along the axis at infinity (1 ≤ p < q, co-prime).
        #[arg(long)]
        p: u32,
        /// Cover index along the axis at zero.
        #[arg(long)]
        q: u32,
        /// Base angle as an exact rational, e.g. 3/10.
        #[arg(long, value_name = "P/Q")]
        beta: Option<String>,
        /// Quadrature cells per chart side.
        #[arg(long, default_value_t = 384)]
        cells: usize,
        /// Relative volume tolerance.
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
    },
}

#[derive(Subcommand)]
enum FlatconeCmd {
    /// Build the flat cone over a base and print its descriptor.
    Build {
        #[command(flatten)]
        base: BaseArgs,
        /// Write the descriptor JSON here instead of stdout.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Check scaling and the volume-density identity at sample points.
    Check {
        #[command(flatten)]
        base: BaseArgs,
        #[command(flatten)]
        opts: FlatconeCheckArgs,
    },
    /// Pull the cone back through (z,w) ↦ (z^q, w^p) and check it.
    Pullback {
        #[command(flatten)]
        base: BaseArgs,
        #[arg(long)]
        p: u32,
        #[arg(long)]
        q: u32,
        #[command(flatten)]
        opts: FlatconeCheckArgs,
    },
}

#[derive(Args)]
struct FlatconeCheckArgs {
    /// Number of sample points.
    #[arg(long, default_value_t = 50)]
    samples: usize,
    /// Finite-difference step for the complex Hessian.
    #[arg(long, default_value_t = 2e-3)]
    step: f64,
    /// Relative tolerance for the volume-density identity.
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
}

#[derive(Subcommand)]
enum ReflectionCmd {
    /// Print catalog entries (orders, degrees, angles, orbit spaces).
    Catalog {
        /// One family, e.g. octahedral, G(4,2,2), cyclic(5); default: all.
        #[arg(long)]
        family: Option<String>,
    },
    /// Verify a family: degrees by preimage counting, quotient metric.
    Verify {
        /// Family name, e.g. octahedral, G(4,2,2), binary-dihedral(3).
        #[arg(long)]
        family: String,
    },
}

#[derive(Subcommand)]
enum GermCmd {
    /// Order, Puiseux exponent, singularity exponent and angle window.
    Analyze {
        /// Polynomial in z and w, e.g. "w^2 - z^3".
        #[arg(long)]
        poly: String,
    },
}

#[derive(Subcommand)]
enum EnergyCmd {
    /// Exact energy ledger of a rigid line arrangement.
    Ledger {
        /// hesse | extended-hesse | icosahedral | g168 | a6 | a0 | a3.
        #[arg(long)]
        family: String,
        /// Parameter for the a0/a3 families.
        #[arg(long)]
        m: Option<u32>,
    },
    /// Comparison-geometry volume bound on a degeneration.
    BishopGromov {
        /// Degeneration case; only cuspidal-cubic is tabulated.
        #[arg(long, default_value = "cuspidal-cubic")]
        case: String,
        /// Edge angle as an exact rational, e.g. 9/10.
        #[arg(long, value_name = "P/Q")]
        beta: String,
    },
}

/// Base-metric selector shared by the lift and flatcone commands.
#[derive(Args)]
struct BaseArgs {
    /// Two-point closed form with this angle (curvature 4).
    #[arg(long, conflicts_with_all = ["g222", "sol"])]
    beta: Option<f64>,
    /// Three-right-angle closed form (angles 1/2, 1/2, 1/2).
    #[arg(long, conflicts_with = "sol")]
    g222: bool,
    /// Solved configuration (JSON from `spherical solve --out`).
    #[arg(long, value_name = "FILE")]
    sol: Option<PathBuf>,
}

impl BaseArgs {
    /// Loads the base; the flag says whether it is a closed form (grid
    /// interpolants get looser tolerances).
    fn load(&self) -> Result<(SphericalMetric, bool)> {
        if let Some(beta) = self.beta {
            return Ok((SphericalMetric::rugby(beta, 4.0)?, true));
        }
        if self.g222 {
            return Ok((SphericalMetric::g222(), true));
        }
        if let Some(path) = &self.sol {
            let solution: GridSolution = serde_json::from_str(&std::fs::read_to_string(path)?)?;
            return Ok((SphericalMetric::from_solution(solution), false));
        }
        Err(Error::InvalidConfig(
            "choose a base: --beta <angle>, --g222 or --sol <file>".into(),
        ))
    }
}

fn parse_seed(text: &str) -> std::result::Result<u64, String> {
    let t = text.trim().trim_start_matches("0x").trim_start_matches("0X");
    u64::from_str_radix(t, 16).map_err(|e| format!("invalid hexadecimal seed {text:?}: {e}"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let seed = cli.seed.unwrap_or(sample::DEFAULT_SEED);
    match run(&cli, seed) {
        Ok(pass) => {
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            let code = match err {
                Error::InvalidConfig(_)
                | Error::Inadmissible(_)
                | Error::Unsupported(_)
                | Error::Parse(_) => 2,
                Error::NonConvergence(_) | Error::Numeric(_) | Error::Io(_) | Error::Json(_) => 3,
            };
            ExitCode::from(code)
        }
    }
}

/// Dispatches one subcommand; `Ok(pass)` carries the overall verdict.
fn run(cli: &Cli, seed: u64) -> Result<bool> {
    match &cli.cmd {
        Cmd::Spherical(cmd) => spherical_cmd(cli, cmd, seed),
        Cmd::Lift(cmd) => lift_cmd(cli, cmd, seed),
        Cmd::Flatcone(cmd) => flatcone_cmd(cli, cmd, seed),
        Cmd::Reflection(cmd) => reflection_cmd(cli, cmd, seed),
        Cmd::Germ(GermCmd::Analyze { poly }) => germ_analyze(cli, poly),
        Cmd::Energy(cmd) => energy_cmd(cli, cmd, seed),
        Cmd::Suite { quick } => {
            let report = run_suite(&SuiteOptions { quick: *quick, seed });
            emit(cli, &report)
        }
    }
}

/// Prints the report in the requested format, writes `--report`, and
/// returns its verdict.
fn emit(cli: &Cli, report: &VerificationReport) -> Result<bool> {
    if let Some(path) = &cli.report {
        std::fs::write(path, report.to_json())?;
    }
    if cli.json {
        println!("{}", report.to_json());
    } else if cli.csv {
        print!("{}", report.to_csv());
    } else {
        print!("{}", report.render_text());
    }
    Ok(report.pass)
}

/// Prints a free-form JSON document (analysis output, not a check run).
fn emit_value(cli: &Cli, value: &serde_json::Value, text: String) -> Result<bool> {
    if let Some(path) = &cli.report {
        std::fs::write(path, serde_json::to_string_pretty(value)?)?;
    }
    if cli.json || cli.csv {
        println!("{}", serde_json::to_string_pretty(value)?);
    } else {
        print!("{text}");
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// spherical

fn spherical_cmd(cli: &Cli, cmd: &SphericalCmd, seed: u64) -> Result<bool> {
    match cmd {
        SphericalCmd::Solve {
            config,
            kappa,
            n,
            extent,
            out,
        } => {
            let cfg: ConeConfig = serde_json::from_str(&std::fs::read_to_string(config)?)?;
            let opts = SolverOptions {
                n: *n,
                extent: *extent,
                ..SolverOptions::default()
            };
            let solution = liouville::solve(&cfg, *kappa, &opts)?;
            if let Some(path) = out {
                std::fs::write(path, serde_json::to_string(&solution)?)?;
            }
            let mut report = VerificationReport::new("spherical solve", seed);
            report.input("config", config.display());
            report.input("kappa", kappa);
            report.input("n", n);
            report.input("method", format!("{:?}", solution.method));
            report.input("newton_steps", solution.newton_steps);
            report.record_bound(
                "interior_residual",
                solution.xi.residual.max(solution.eta.residual),
                1e-9,
                Provenance::Derived,
            );
            report.record_bound(
                "boundary_gap",
                solution.boundary_gap,
                1e-8,
                Provenance::Derived,
            );
            let metric = SphericalMetric::from_solution(solution);
            report.record_bound(
                "gauss_bonnet_defect",
                metric.gauss_bonnet_defect(384).abs(),
                1e-3,
                Provenance::Paper,
            );
            emit(cli, &report)
        }
        SphericalCmd::Check { sol, tol, cells } => {
            let solution: GridSolution = serde_json::from_str(&std::fs::read_to_string(sol)?)?;
            let kappa = solution.kappa;
            let residual = solution.xi.residual.max(solution.eta.residual);
            let metric = SphericalMetric::from_solution(solution);
            let mut report = VerificationReport::new("spherical check", seed);
            report.input("sol", sol.display());
            report.input("kappa", kappa);
            report.input("cone_number", metric.cone_number());
            report.record_bound("interior_residual", residual, 1e-9, Provenance::Derived);

            let mut rng = sample::rng(seed);
            let avoid: Vec<Complex64> = metric
                .punctures(Chart::Xi)
                .iter()
                .map(|&(a, _)| a)
                .collect();
            let mut worst = 0.0f64;
            for p in sample::points_avoiding(&mut rng, 25, 1.3, &avoid, 0.25) {
                worst = worst.max((metric.curvature(Chart::Xi, p, 1e-3) - kappa).abs());
            }
            report.record_bound("curvature_sup_gap", worst, *tol, Provenance::Derived);
            report.record_bound(
                "gauss_bonnet_defect",
                metric.gauss_bonnet_defect(*cells).abs(),
                1e-3,
                Provenance::Paper,
            );
            let ring: Vec<Complex64> = (0..20)
                .map(|_| sample::complex_in_annulus(&mut rng, 0.8, 1.25))
                .collect();
            report.record_bound(
                "transition_gap",
                metric.transition_gap(&ring),
                1e-8,
                Provenance::Derived,
            );
            emit(cli, &report)
        }
    }
}

// ---------------------------------------------------------------------------
// lift

fn lift_cmd(cli: &Cli, cmd: &LiftCmd, seed: u64) -> Result<bool> {
    match cmd {
        LiftCmd::Hopf {
            base,
            cells,
            tol,
        } => {
            let (metric, closed_form) = base.load()?;
            let conn = build_connection(&metric)?;
            let link = hopf_lift(&conn);
            let mut report = VerificationReport::new("lift hopf", seed);
            report.input("cone_number", metric.cone_number());
            report.input("cells", cells);

            // Loose bounds for spline-backed bases, tight for closed forms.
            let (curv_tol, ident_tol, vol_tol) = if closed_form {
                (1e-3, 1e-4, *tol)
            } else {
                (1e-2, 1e-2, tol.max(1e-2))
            };
            report.record_float(
                "total_curvature",
                conn.total_curvature(*cells),
                1.0,
                curv_tol,
                Provenance::Paper,
            );

            let mut rng = sample::rng(seed);
            let avoid: Vec<Complex64> = metric
                .punctures(Chart::Xi)
                .iter()
                .map(|&(a, _)| a)
                .collect();
            let mut worst = 0.0f64;
            for p in sample::points_avoiding(&mut rng, 6, 1.2, &avoid, 0.3) {
                worst = worst.max(conn.curvature_identity_residual(Chart::Xi, p, 1e-3).abs());
            }
            report.record_bound("curvature_identity", worst, ident_tol, Provenance::Derived);

            if let Some(&(center, _)) = metric.punctures(Chart::Xi).first() {
                let table =
                    conn.holonomy_table(Chart::Xi, center, &ConnectionForm::standard_radii(), 512);
                for &(r, h) in &table {
                    report.input(format!("holonomy[{r:.0e}]"), conekit::report::fmt_float(h));
                }
                report.record_bool(
                    "holonomy_decreasing",
                    table.windows(2).all(|w| w[1].1 < w[0].1),
                    true,
                    Provenance::Paper,
                );
                report.record_bound("holonomy_last", table[3].1, 1e-2, Provenance::Paper);
            }

            let expected = link.expected_volume();
            report.record_float(
                "link_volume",
                link.volume(*cells),
                expected,
                expected * vol_tol,
                Provenance::Paper,
            );
            let p = sample::points_avoiding(&mut rng, 1, 1.0, &avoid, 0.3)[0];
            report.record_bound(
                "submersion_defect",
                link.submersion_defect(Chart::Xi, p, Complex64::new(0.4, -0.2)).abs(),
                1e-12,
                Provenance::Trivial,
            );
            report.record_float(
                "fiber_length",
                link.fiber_length_at(Chart::Xi, p, 64),
                link.expected_fiber_length(),
                1e-12,
                Provenance::Trivial,
            );
            emit(cli, &report)
        }
        LiftCmd::Seifert {
            p,
            q,
            beta,
            cells,
            tol,
        } => {
            let window = seifert_base_window(*p, *q);
            let mut report = VerificationReport::new("lift seifert", seed);
            report.input("p", p);
            report.input("q", q);
            report.input("window_lo", format_rational(&window.0));
            report.input("window_hi", format_rational(&window.1));
            let Some(beta) = beta else {
                // No base angle: report the admissibility window only.
                report.record_bool(
                    "indices_ordered_coprime",
                    *p >= 1 && p < q && num_integer::gcd(*p, *q) == 1,
                    true,
                    Provenance::Trivial,
                );
                return emit(cli, &report);
            };
            let beta = parse_rational(beta)?;
            report.input("beta", format_rational(&beta));
            let admissible = seifert_base_admissible(*p, *q, &beta);
            report.record_bool(
                "beta_inside_window",
                admissible,
                beta > window.0 && beta < window.1,
                Provenance::Trivial,
            );
            let base = SphericalMetric::rugby(to_f64(&beta), 4.0)?;
            let link = hopf_lift(&build_connection(&base)?);
            match seifert_pullback(&link, *p, *q) {
                Ok(pulled) => {
                    report.record_bool("pullback_admitted", admissible, true, Provenance::Trivial);
                    let b = to_f64(&beta);
                    if let Some((ax0, ax1)) = pulled.axis_angles() {
                        report.record_float(
                            "axis_angle_zero",
                            ax0,
                            *q as f64 * b,
                            1e-12,
                            Provenance::Derived,
                        );
                        report.record_float(
                            "axis_angle_infinity",
                            ax1,
                            *p as f64 * b,
                            1e-12,
                            Provenance::Derived,
                        );
                    }
                    let scale = pulled.fiber_scale();
                    report.record_float(
                        "fiber_scale",
                        scale,
                        (*p * *q) as f64 * b,
                        1e-12,
                        Provenance::Trivial,
                    );
                    let expected = pulled.expected_volume();
                    report.record_float(
                        "volume",
                        pulled.volume(*cells),
                        expected,
                        expected * tol,
                        Provenance::Paper,
                    );
                    let speed = lift::seifert_fiber_speed_sq(
                        &link,
                        *p,
                        *q,
                        Complex64::new(0.7, 0.2),
                        0.4,
                        1e-5,
                    );
                    report.record_float(
                        "fiber_speed_sq",
                        speed,
                        scale * scale,
                        1e-6,
                        Provenance::Derived,
                    );
                }
                Err(_) => {
                    report.record_bool(
                        "pullback_rejected",
                        !admissible,
                        true,
                        Provenance::Trivial,
                    );
                }
            }
            emit(cli, &report)
        }
    }
}

// ---------------------------------------------------------------------------
// flatcone

fn flatcone_cmd(cli: &Cli, cmd: &FlatconeCmd, seed: u64) -> Result<bool> {
    match cmd {
        FlatconeCmd::Build { base, out } => {
            let (metric, _) = base.load()?;
            let cone = flatcone::flat_cone_from_base(&metric)?;
            let value = cone_descriptor(&cone);
            let text = serde_json::to_string_pretty(&value)? + "\n";
            if let Some(path) = out {
                std::fs::write(path, serde_json::to_string_pretty(&value)?)?;
                return Ok(true);
            }
            emit_value(cli, &value, text)
        }
        FlatconeCmd::Check { base, opts } => {
            let (metric, closed_form) = base.load()?;
            let cone = flatcone::flat_cone_from_base(&metric)?;
            let mut report = VerificationReport::new("flatcone check", seed);
            let csv = flatcone_battery(&mut report, &cone, closed_form, opts, seed)?;
            emit_with_samples(cli, &report, csv)
        }
        FlatconeCmd::Pullback { base, p, q, opts } => {
            let (metric, closed_form) = base.load()?;
            let cone = flatcone::flat_cone_from_base(&metric)?;
            let pulled = flatcone::seifert_flat_pullback(&cone, *p, *q)?;
            let mut report = VerificationReport::new("flatcone pullback", seed);
            report.input("p", p);
            report.input("q", q);
            report.record_float(
                "cone_number",
                pulled.cone_number(),
                (*p * *q) as f64 * cone.cone_number(),
                1e-12,
                Provenance::Trivial,
            );
            let csv = flatcone_battery(&mut report, &pulled, closed_form, opts, seed)?;
            emit_with_samples(cli, &report, csv)
        }
    }
}

/// Like [`emit`], but `--csv` prints the per-sample rows (plot-ready)
/// instead of the check-record table.
fn emit_with_samples(cli: &Cli, report: &VerificationReport, csv: String) -> Result<bool> {
    if cli.csv {
        if let Some(path) = &cli.report {
            std::fs::write(path, report.to_json())?;
        }
        print!("{csv}");
        Ok(report.pass)
    } else {
        emit(cli, report)
    }
}

fn cone_descriptor(cone: &FlatConeMetric) -> serde_json::Value {
    let lines: Vec<serde_json::Value> = cone
        .lines()
        .iter()
        .map(|l| {
            serde_json::json!({
                "slope": l.slope.map(|a| vec![a.re, a.im]),
                "angle": l.angle,
            })
        })
        .collect();
    serde_json::json!({
        "schema": "conekit/1",
        "cone_number": cone.cone_number(),
        "homogeneity_exponent": 2.0 * cone.cone_number(),
        "lines": lines,
        "cover": cone.cover().map(|(p, q)| vec![p, q]),
    })
}

/// The shared flat-cone battery: scaling law plus the volume-density
/// identity at seeded sample points.  Returns the per-sample CSV rows.
fn flatcone_battery(
    report: &mut VerificationReport,
    cone: &FlatConeMetric,
    closed_form: bool,
    opts: &FlatconeCheckArgs,
    seed: u64,
) -> Result<String> {
    let mut rng = sample::rng(seed);
    report.input("samples", opts.samples);
    report.input("step", opts.step);

    // Sample away from the singular locus so the FD Hessian is clean.
    let clearance = (10.0 * opts.step).max(0.15);
    let mut points = Vec::new();
    let mut attempts = 0;
    while points.len() < opts.samples {
        attempts += 1;
        if attempts > 200 * (opts.samples + 1) {
            return Err(Error::Numeric(
                "could not find sample points clear of the singular locus".into(),
            ));
        }
        let z = sample::complex_in_annulus(&mut rng, 0.3, 1.5);
        let w = sample::complex_in_annulus(&mut rng, 0.3, 1.5);
        if cone.singular_distance(z, w) > clearance {
            points.push((z, w));
        }
    }

    let scaling_tol = if closed_form { 1e-6 } else { 1e-4 };
    report.record_bound(
        "scaling_law",
        cone.scaling_check(1.7, &points)?,
        scaling_tol,
        Provenance::Trivial,
    );

    let mut worst = 0.0f64;
    let mut csv = String::from("z_re,z_im,w_re,w_im,measured,predicted,rel_error\n");
    for &(z, w) in &points {
        let measured = cone.volume_density_fd(z, w, opts.step)?;
        let predicted = cone.predicted_density(z, w);
        let rel = (measured - predicted) / predicted;
        worst = worst.max(rel.abs());
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            z.re,
            z.im,
            w.re,
            w.im,
            conekit::report::fmt_float(measured),
            conekit::report::fmt_float(predicted),
            conekit::report::fmt_float(rel)
        ));
    }
    report.record_bound("volume_identity", worst, opts.tol, Provenance::Paper);
    Ok(csv)
}

// ---------------------------------------------------------------------------
// reflection

fn reflection_cmd(cli: &Cli, cmd: &ReflectionCmd, seed: u64) -> Result<bool> {
    match cmd {
        ReflectionCmd::Catalog { family } => {
            let specs = match family {
                Some(name) => vec![catalog(Family::parse(name)?)?],
                None => default_catalog(),
            };
            let value =
                serde_json::Value::Array(specs.iter().map(|s| s.to_json()).collect());
            let mut text = format!(
                "{:<22} {:>7} {:<12} {:>7} {:>7}  {}\n",
                "family", "order", "degrees", "center", "map", "orbit space"
            );
            for s in &specs {
                let degrees = s
                    .invariant_degrees
                    .iter()
                    .map(|d| d.to_string())
                    .collect::<Vec<_>>()
                    .join(",");
                let orbit = match (&s.ade, &s.surface) {
                    (Some(ade), Some(surface)) => format!("{ade}: {surface}"),
                    _ => s
                        .singular_curves
                        .iter()
                        .map(|c| format!("{} (angle {})", c.equation, format_rational(&c.angle)))
                        .collect::<Vec<_>>()
                        .join("; "),
                };
                text.push_str(&format!(
                    "{:<22} {:>7} {:<12} {:>7} {:>7}  {}\n",
                    s.label,
                    s.order,
                    degrees,
                    s.center_order.map_or("-".into(), |c| c.to_string()),
                    s.map_degree.map_or("-".into(), |d| d.to_string()),
                    orbit
                ));
            }
            emit_value(cli, &value, text)
        }
        ReflectionCmd::Verify { family } => {
            let report = reflection_family_report(Family::parse(family)?, seed)?;
            emit(cli, &report)
        }
    }
}

// ---------------------------------------------------------------------------
// germ

fn germ_analyze(cli: &Cli, poly: &str) -> Result<bool> {
    let germ = analyze_germ(&parse_poly(poly)?)?;
    let (lo, hi) = admissible_angle_range(&germ.c0)?;
    let family = match germ.family {
        GermFamily::Smooth => "smooth".to_string(),
        GermFamily::Ordinary { d } => format!("ordinary ({d} transverse branches)"),
        GermFamily::OneEdge { d, e } => format!("one-edge (d={d}, e={e})"),
    };
    let value = serde_json::json!({
        "schema": "conekit/1",
        "command": "germ analyze",
        "poly": poly,
        "order": germ.order,
        "family": family,
        "puiseux_exponent": format_rational(&germ.puiseux_exponent),
        "c0": format_rational(&germ.c0),
        "angle_window": [format_rational(&lo), format_rational(&hi)],
        "normalizations": format!("{:?}", germ.normalizations),
    });
    let text = format!(
        "germ                {poly}\n\
         order               {}\n\
         family              {family}\n\
         puiseux exponent    {}\n\
         c0                  {}\n\
         edge-angle window   ({}, {})\n",
        germ.order,
        format_rational(&germ.puiseux_exponent),
        format_rational(&germ.c0),
        format_rational(&lo),
        format_rational(&hi),
    );
    emit_value(cli, &value, text)
}

// ---------------------------------------------------------------------------
// energy

fn arrangement_by_name(family: &str, m: Option<u32>) -> Result<Arrangement> {
    let need_m = || {
        m.ok_or_else(|| {
            Error::InvalidConfig(format!("family {family} needs a parameter: --m <N>"))
        })
    };
    match family.to_ascii_lowercase().as_str() {
        "hesse" => Ok(arrangements::hesse()),
        "extended-hesse" | "extended_hesse" => Ok(arrangements::extended_hesse()),
        "icosahedral" => Ok(arrangements::icosahedral()),
        "g168" => Ok(arrangements::g168()),
        "a6" => Ok(arrangements::a6()),
        "a0" => arrangements::a0(need_m()?),
        "a3" => arrangements::a3(need_m()?),
        other => Err(Error::InvalidConfig(format!(
            "unknown arrangement family {other:?}; expected hesse, extended-hesse, \
             icosahedral, g168, a6, a0 or a3"
        ))),
    }
}

fn energy_cmd(cli: &Cli, cmd: &EnergyCmd, seed: u64) -> Result<bool> {
    match cmd {
        EnergyCmd::Ledger { family, m } => {
            let arr = arrangement_by_name(family, *m)?;
            let ledger = arr.ledger()?;
            let mut report = VerificationReport::new("energy ledger", seed);
            report.input("family", &arr.name);
            report.input("lines", arr.line_count);
            report.input("beta", format_rational(&arr.beta));
            report.input("total_energy", format_rational(&ledger.total_energy));
            for row in &ledger.rows {
                report.input(
                    format!("bubble[r={}]", row.r),
                    format!(
                        "{} x {}",
                        row.count,
                        format_rational(&row.bubble_energy)
                    ),
                );
            }
            report.record_exact("residual", &ledger.residual, &rat_int(0), Provenance::Paper);
            emit(cli, &report)
        }
        EnergyCmd::BishopGromov { case, beta } => {
            if case != "cuspidal-cubic" {
                return Err(Error::InvalidConfig(format!(
                    "unknown degeneration case {case:?}; only cuspidal-cubic is tabulated"
                )));
            }
            let beta = parse_rational(beta)?;
            let bound = cuspidal_cubic_volume_bound(&beta);
            let mut report = VerificationReport::new("energy bishop-gromov", seed);
            report.input("case", case);
            report.input("beta", format_rational(&beta));
            report.input("bound_holds", bound.pass);
            // The bound holds exactly at angle one; below it, the slack
            // is the exact negative square −(1−β)².
            let expected_pass = beta == rat_int(1);
            report.record_bool(
                "verdict_matches_prediction",
                bound.pass,
                expected_pass,
                Provenance::Paper,
            );
            let gap = rat_int(1) - &beta;
            report.record_exact(
                "slack",
                &bound.slack,
                &-(gap.clone() * gap),
                Provenance::Derived,
            );
            emit(cli, &report)
        }
    }
}
