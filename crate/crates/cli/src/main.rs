//! `helmreg` — command-line driver for the regularized Helmholtz
//! boundary-integral toolkit.
//!
//! Exit codes: 0 success, 2 bad arguments/config, 3 numerical failure,
//! 4 I/O failure.

use clap::{Parser, Subcommand, ValueEnum};
use helmreg_core::experiments::{
    coupling_exponents, run_coupled_sweep, run_delta_sweep, run_h_sweep, run_scattering,
    write_convergence_csv, write_gnuplot_data, write_loglog_svg, write_scatter_csv,
    ConvergenceRecord, Problem, SphereSweep,
};
use helmreg_core::geometry::Surface;
use helmreg_core::regularizer::{verify_moments, OperatorKind, RegularizerSpec};
use helmreg_core::scattering::Incident;
use std::collections::HashMap;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const ALL_KINDS: [OperatorKind; 5] = [
    OperatorKind::S,
    OperatorKind::K,
    OperatorKind::Kt,
    OperatorKind::H,
    OperatorKind::W,
];

#[derive(Parser)]
#[command(
    name = "helmreg",
    about = "Regularized boundary-integral operators for the 3-D Helmholtz equation",
    version
)]
struct Cli {
    /// Flat key=value configuration file; command-line flags take
    /// precedence over file entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Run strictly single-threaded (already the default; accepted for
    /// script compatibility).
    #[arg(long, global = true)]
    serial: bool,
    /// Avoid any randomized choices (the pipeline is deterministic;
    /// accepted for script compatibility).
    #[arg(long, global = true)]
    seedless: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SurfaceArg {
    Sphere,
    Torus,
    Bean,
}

impl SurfaceArg {
    fn build(self) -> Surface {
        match self {
            SurfaceArg::Sphere => Surface::sphere(1.0),
            SurfaceArg::Torus => Surface::torus(1.0, 0.5),
            SurfaceArg::Bean => Surface::bean(),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ProblemArg {
    Dirichlet,
    Neumann,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the moment systems and print the mollifier coefficients.
    Coeffs {
        /// Wavenumber; the mollifier sees kappa = k * delta.
        #[arg(long)]
        k: Option<f64>,
        /// Mollifier width.
        #[arg(long)]
        delta: Option<f64>,
        /// Formal regularization order (odd).
        #[arg(long)]
        m: Option<usize>,
    },
    /// Tabulate the mollifier sigma_p(t) and its regularized ratio.
    SigmaTable {
        #[arg(long)]
        k: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        m: Option<usize>,
    },
    /// Width sweep at fixed mesh on the unit sphere.
    ConvergeDelta {
        #[arg(long)]
        k: Option<f64>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        q: Option<usize>,
        /// Mesh size for the fixed fine mesh.
        #[arg(long, value_delimiter = ',')]
        h_levels: Option<Vec<f64>>,
        /// Width grid endpoints `lo,hi` (6 log-spaced points).
        #[arg(long, value_delimiter = ',')]
        delta_range: Option<Vec<f64>>,
    },
    /// Mesh sweep at fixed width on the unit sphere.
    ConvergeH {
        #[arg(long)]
        k: Option<f64>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        q: Option<usize>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        h_levels: Option<Vec<f64>>,
    },
    /// Coupled sweep delta = c * h^mu* on the unit sphere.
    ConvergeCoupled {
        #[arg(long)]
        k: Option<f64>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        q: Option<usize>,
        #[arg(long)]
        coupling_const: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        h_levels: Option<Vec<f64>>,
    },
    /// Scattering refinement study with a manufactured point source
    /// (or an incident plane wave with --plane-wave).
    Scatter {
        #[arg(long, value_enum)]
        surface: Option<SurfaceArg>,
        #[arg(long, value_enum)]
        problem: Option<ProblemArg>,
        #[arg(long)]
        k: Option<f64>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        q: Option<usize>,
        #[arg(long)]
        coupling_const: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        h_levels: Option<Vec<f64>>,
        /// Use an incident plane wave along +z instead of the interior
        /// point source (no manufactured reference: e_ff is NaN).
        #[arg(long)]
        plane_wave: bool,
    },
}

/// Flat `key=value` file; `#` starts a comment.
fn load_config(path: &Path) -> Result<HashMap<String, String>, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    let mut map = HashMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected key=value", lineno + 1))?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

struct Settings {
    config: HashMap<String, String>,
}

impl Settings {
    fn get<T: std::str::FromStr>(
        &self,
        cli: Option<T>,
        key: &str,
        default: T,
    ) -> Result<T, String> {
        if let Some(v) = cli {
            return Ok(v);
        }
        match self.config.get(key) {
            Some(raw) => raw
                .parse()
                .map_err(|_| format!("config key {key}: cannot parse {raw:?}")),
            None => Ok(default),
        }
    }

    fn get_levels(
        &self,
        cli: Option<Vec<f64>>,
        default: &[f64],
    ) -> Result<Vec<f64>, String> {
        if let Some(v) = cli {
            return Ok(v);
        }
        match self.config.get("h-levels") {
            Some(raw) => raw
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse()
                        .map_err(|_| format!("config key h-levels: cannot parse {s:?}"))
                })
                .collect(),
            None => Ok(default.to_vec()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match &cli.config {
        Some(path) => match load_config(path) {
            Ok(map) => map,
            Err(msg) => {
                eprintln!("error: {msg}");
                return ExitCode::from(2);
            }
        },
        None => HashMap::new(),
    };
    let settings = Settings { config };
    let out_dir = cli
        .out
        .clone()
        .or_else(|| settings.config.get("out").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    if let Err(e) = std::fs::create_dir_all(&out_dir) {
        eprintln!("error: cannot create output directory {}: {e}", out_dir.display());
        return ExitCode::from(4);
    }
    match run(&cli, &settings, &out_dir) {
        Ok(()) => ExitCode::SUCCESS,
        Err(RunError::Args(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(RunError::Core(e)) => {
            eprintln!("error: {e}");
            match e {
                helmreg_core::Error::InvalidParameter(_) => ExitCode::from(2),
                helmreg_core::Error::Io(_) => ExitCode::from(4),
                _ => ExitCode::from(3),
            }
        }
    }
}

enum RunError {
    Args(String),
    Core(helmreg_core::Error),
}

impl From<helmreg_core::Error> for RunError {
    fn from(e: helmreg_core::Error) -> Self {
        RunError::Core(e)
    }
}

impl From<String> for RunError {
    fn from(msg: String) -> Self {
        RunError::Args(msg)
    }
}

fn run(cli: &Cli, s: &Settings, out: &Path) -> Result<(), RunError> {
    match &cli.command {
        Command::Coeffs { k, delta, m } => {
            let k = s.get(*k, "k", 0.0)?;
            let delta = s.get(*delta, "delta", 0.5)?;
            let order = s.get(*m, "m", 5)?;
            cmd_coeffs(k * delta, order, out)
        }
        Command::SigmaTable { k, delta, m } => {
            let k = s.get(*k, "k", 0.0)?;
            let delta = s.get(*delta, "delta", 0.5)?;
            let order = s.get(*m, "m", 5)?;
            cmd_sigma_table(k * delta, order, out)
        }
        Command::ConvergeDelta {
            k,
            m,
            q,
            h_levels,
            delta_range,
        } => {
            let cfg = SphereSweep {
                k: s.get(*k, "k", std::f64::consts::PI)?,
                order: s.get(*m, "m", 5)?,
                q: s.get(*q, "q", 4)?,
            };
            let levels = s.get_levels(h_levels.clone(), &[0.15])?;
            let h = *levels
                .first()
                .ok_or_else(|| "converge-delta needs one mesh size".to_string())?;
            let (lo, hi) = match delta_range.as_deref() {
                None => (0.15, 0.6),
                Some([lo, hi]) if *lo > 0.0 && hi > lo => (*lo, *hi),
                Some(_) => {
                    return Err(RunError::Args(
                        "--delta-range expects lo,hi with 0 < lo < hi".into(),
                    ))
                }
            };
            // Six log-spaced widths across the range.
            let ratio: f64 = (hi / lo).powf(1.0 / 5.0);
            let deltas: Vec<f64> = (0..6).map(|i| lo * ratio.powi(i)).collect();
            let recs = run_delta_sweep(&cfg, h, &deltas)?;
            emit_convergence(out, "converge_delta", &recs, true)
        }
        Command::ConvergeH {
            k,
            m,
            q,
            delta,
            h_levels,
        } => {
            let cfg = SphereSweep {
                k: s.get(*k, "k", std::f64::consts::PI)?,
                order: s.get(*m, "m", 5)?,
                q: s.get(*q, "q", 4)?,
            };
            let delta = s.get(*delta, "delta", 0.05)?;
            let levels = s.get_levels(h_levels.clone(), &[0.3, 0.2, 0.14, 0.1])?;
            let recs = run_h_sweep(&cfg, delta, &levels)?;
            emit_convergence(out, "converge_h", &recs, false)
        }
        Command::ConvergeCoupled {
            k,
            m,
            q,
            coupling_const,
            h_levels,
        } => {
            let cfg = SphereSweep {
                k: s.get(*k, "k", 0.0)?,
                order: s.get(*m, "m", 3)?,
                q: s.get(*q, "q", 2)?,
            };
            let c = s.get(*coupling_const, "coupling-const", 1.0)?;
            let levels = s.get_levels(h_levels.clone(), &[0.45, 0.3, 0.2])?;
            let recs = run_coupled_sweep(&cfg, c, &levels)?;
            emit_convergence(out, "converge_coupled", &recs, false)
        }
        Command::Scatter {
            surface,
            problem,
            k,
            m,
            q,
            coupling_const,
            h_levels,
            plane_wave,
        } => {
            let surface = match surface {
                Some(sa) => sa.build(),
                None => match s.config.get("surface").map(String::as_str) {
                    Some("sphere") | None => Surface::sphere(1.0),
                    Some("torus") => Surface::torus(1.0, 0.5),
                    Some("bean") => Surface::bean(),
                    Some(other) => {
                        return Err(RunError::Args(format!("unknown surface {other:?}")))
                    }
                },
            };
            let problem = match problem {
                Some(ProblemArg::Dirichlet) | None => Problem::Dirichlet,
                Some(ProblemArg::Neumann) => Problem::Neumann,
            };
            let k = s.get(*k, "k", std::f64::consts::PI)?;
            let order = s.get(*m, "m", 3)?;
            let q = s.get(*q, "q", 2)?;
            let c = s.get(*coupling_const, "coupling-const", 0.5)?;
            let levels = s.get_levels(h_levels.clone(), &[0.4, 0.3, 0.2])?;
            let incident = if *plane_wave {
                Incident::PlaneWave {
                    direction: [0.0, 0.0, 1.0],
                }
            } else {
                // Interior point of each body, giving a manufactured
                // exterior reference field.
                let location = match &surface {
                    Surface::Torus { .. } => [1.0, 1.0, 0.0],
                    _ => [0.2, -0.1, 0.1],
                };
                Incident::PointSource { location }
            };
            let recs = run_scattering(
                &surface, problem, incident, k, order, q, c, &levels, 1e-8, 60,
            )?;
            let path = out.join("scatter.csv");
            write_scatter_csv(&path, &recs)?;
            for r in &recs {
                println!(
                    "{} {} k={} h={:.4} N={} iters={} e_ff={:.3e} ({:.1}s)",
                    r.surface, r.problem, r.k, r.h, r.n_nodes, r.gmres_iters, r.e_ff,
                    r.wall_seconds
                );
            }
            println!("wrote {}", path.display());
            Ok(())
        }
    }
}

fn cmd_coeffs(kappa: f64, order: usize, out: &Path) -> Result<(), RunError> {
    let path = out.join("coeffs.csv");
    let mut f = std::io::BufWriter::new(std::fs::File::create(&path).map_err(|e| {
        RunError::Core(helmreg_core::Error::Io(e))
    })?);
    let wl = |f: &mut dyn std::io::Write, line: &str| -> Result<(), RunError> {
        writeln!(f, "{line}").map_err(|e| RunError::Core(helmreg_core::Error::Io(e)))
    };
    wl(&mut f, "operator,kappa,m,n,ell,a_ell,residual_max")?;
    for kind in ALL_KINDS {
        let spec = RegularizerSpec::for_order(kind, order, kappa)?;
        let report = verify_moments(&spec, 1)?;
        let residual_max = report
            .enforced
            .iter()
            .map(|&(_, v)| v.abs())
            .fold(0.0f64, f64::max);
        for (ell, &a) in spec.coeffs.iter().enumerate() {
            wl(
                &mut f,
                &format!(
                    "{},{:.16e},{},{},{},{:.16e},{:.16e}",
                    kind.label(),
                    kappa,
                    spec.m,
                    spec.n,
                    ell + 1,
                    a,
                    residual_max
                ),
            )?;
        }
        println!(
            "{}: m={} n={} max enforced-moment residual {:.2e}",
            kind.label(),
            spec.m,
            spec.n,
            residual_max
        );
    }
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_sigma_table(kappa: f64, order: usize, out: &Path) -> Result<(), RunError> {
    let path = out.join("sigma_table.csv");
    let mut f = std::io::BufWriter::new(std::fs::File::create(&path).map_err(|e| {
        RunError::Core(helmreg_core::Error::Io(e))
    })?);
    writeln!(f, "operator,kappa,m,t,sigma,ratio")
        .map_err(|e| RunError::Core(helmreg_core::Error::Io(e)))?;
    for kind in ALL_KINDS {
        let spec = RegularizerSpec::for_order(kind, order, kappa)?;
        for i in 0..=80 {
            let t = 0.05 * i as f64;
            writeln!(
                f,
                "{},{:.16e},{},{:.16e},{:.16e},{:.16e}",
                kind.label(),
                kappa,
                order,
                t,
                spec.sigma(t),
                spec.ratio(t)
            )
            .map_err(|e| RunError::Core(helmreg_core::Error::Io(e)))?;
        }
    }
    println!("wrote {}", path.display());
    Ok(())
}

fn emit_convergence(
    out: &Path,
    stem: &str,
    recs: &[ConvergenceRecord],
    abscissa_is_delta: bool,
) -> Result<(), RunError> {
    let csv = out.join(format!("{stem}.csv"));
    write_convergence_csv(&csv, recs)?;
    let dat = out.join(format!("{stem}.dat"));
    write_gnuplot_data(&dat, recs, abscissa_is_delta)?;
    let mut series: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    let mut ops: Vec<&str> = recs.iter().map(|r| r.operator).collect();
    ops.dedup();
    for op in &ops {
        let pts: Vec<(f64, f64)> = recs
            .iter()
            .filter(|r| &r.operator == op)
            .map(|r| {
                let x = if abscissa_is_delta { r.delta } else { r.h };
                (x, if abscissa_is_delta { r.err_norm } else { r.err_raw })
            })
            .collect();
        series.push((op.to_string(), pts));
    }
    let svg = out.join(format!("{stem}.svg"));
    write_loglog_svg(&svg, stem, &series)?;
    for op in &ops {
        if let Some(r) = recs.iter().find(|r| &r.operator == op) {
            let (mu, o_star) = if abscissa_is_delta {
                (f64::NAN, f64::NAN)
            } else {
                coupling_exponents(
                    helmreg_core::experiments::coupling_kind(
                        match *op {
                            "S" => helmreg_core::sphere::SphereOperator::S,
                            "K" => helmreg_core::sphere::SphereOperator::K,
                            "Kt" => helmreg_core::sphere::SphereOperator::Kt,
                            _ => helmreg_core::sphere::SphereOperator::T,
                        },
                        true,
                    ),
                    r.q,
                    r.order,
                    true,
                )
            };
            if abscissa_is_delta {
                println!(
                    "{op}: fitted width slope {:.3} over [{:.3}, {:.3}] (target {})",
                    r.fit_slope, r.fit_window_lo, r.fit_window_hi, r.order
                );
            } else {
                println!(
                    "{op}: fitted mesh slope {:.3} over [{:.3}, {:.3}] (mu*={mu:.3}, o*={o_star:.3})",
                    r.fit_slope, r.fit_window_lo, r.fit_window_hi
                );
            }
        }
    }
    println!(
        "wrote {}, {}, {}",
        csv.display(),
        dat.display(),
        svg.display()
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_parsing_accepts_comments_and_rejects_junk() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        std::fs::write(&path, "k = 3.14   # wavenumber\n\nm=5\nh-levels = 0.3, 0.2\n")
            .unwrap();
        let map = load_config(&path).unwrap();
        assert_eq!(map["k"], "3.14");
        assert_eq!(map["m"], "5");
        let s = Settings { config: map };
        // CLI value wins over config.
        assert_eq!(s.get(Some(2.0), "k", 1.0).unwrap(), 2.0);
        assert_eq!(s.get::<f64>(None, "k", 1.0).unwrap(), 3.14);
        assert_eq!(s.get::<f64>(None, "missing", 1.5).unwrap(), 1.5);
        assert_eq!(s.get_levels(None, &[0.5]).unwrap(), vec![0.3, 0.2]);

        std::fs::write(&path, "no_equals_sign\n").unwrap();
        assert!(load_config(&path).is_err());
    }
}
