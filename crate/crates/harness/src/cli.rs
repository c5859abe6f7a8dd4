//! The `affiq` command line.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use affiq_core::bodies::{parse_body, ConvexBody, SphericalMeasure};
use affiq_core::constants::constants_table;
use affiq_core::covariogram::{optimize_ratio, schneider_ratio, Family, Sense};
use affiq_core::functional::{energy, lyz_body};
use affiq_core::minkowski::solve_lp_minkowski;
use affiq_core::projection::{polar_projection_volume, projection_body, QBody};
use affiq_core::Settings;
use clap::{Args, Parser, Subcommand};
use nalgebra::DMatrix;

use crate::extremals::{make_extremal, Extremal, Placement};
use crate::report::Report;
use crate::suites::{run_suite, SUITES};

#[derive(Parser, Debug)]
#[command(name = "affiq", version, about = "Affine L^p energies of matrix-valued gradients")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct ConfigArgs {
    /// key=value settings file; falls back to $AFFIQ_CONFIG, then ./affiq.conf
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override one setting, e.g. --set grid.cells=65
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Args, Debug, Clone)]
struct QArgs {
    #[arg(long, default_value = "segment")]
    q: String,
    #[arg(long, default_value_t = 1)]
    m: usize,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// E_p(Q, f) and ‖∇f‖_p of a sampled extremal profile.
    Energy {
        /// cone, gauss, ms<p>, ls<p>, gn<p>-<q> or nash
        #[arg(long, default_value = "cone")]
        func: String,
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        /// Row-major entries of A ∈ GL(2), composed as f(Ax)
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        matrix: Option<Vec<f64>>,
        #[command(flatten)]
        qa: QArgs,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Volume, Π_{p,Q} K and the volume of its polar for a body literal.
    Body {
        /// e.g. "polytope n=2 v=(1,0);(0,1);(-1,-1)"
        body: String,
        #[command(flatten)]
        qa: QArgs,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Run verification suites and write the CSV report.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        /// Inequality slack (overrides tol.default)
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// vol(D^m K)/vol(K)^m for a polygon, or a search for its extreme value.
    Schneider {
        body: Option<String>,
        #[arg(long, default_value_t = 1)]
        m: usize,
        /// Search polygons instead: min or max
        #[arg(long)]
        optimize: Option<String>,
        #[arg(long, default_value_t = 400)]
        budget: usize,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Solve the discrete L_p Minkowski problem for atoms "x,y:w;x,y:w;...".
    Minkowski {
        measure: String,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
    },
    /// Sharp constants with provenance labels.
    Constants {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
    },
    /// Re-read a CSV report; print its summary and optionally render SVG.
    Report {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
}

struct Failure(i32, String);

fn bad(msg: impl std::fmt::Display) -> Failure {
    Failure(2, msg.to_string())
}

fn load_settings(cfg: &ConfigArgs) -> Result<Settings, Failure> {
    let path: Option<PathBuf> = cfg
        .config
        .clone()
        .or_else(|| std::env::var_os("AFFIQ_CONFIG").map(PathBuf::from))
        .or_else(|| Some(PathBuf::from("affiq.conf")).filter(|p| p.exists()));
    let mut s = match path {
        Some(p) => {
            let text = std::fs::read_to_string(&p).map_err(|e| bad(format!("{}: {e}", p.display())))?;
            Settings::parse(&text).map_err(|e| bad(format!("{}: {e}", p.display())))?
        }
        None => Settings::default(),
    };
    for kv in &cfg.set {
        let (k, v) = kv.split_once('=').ok_or_else(|| bad(format!("expected KEY=VALUE, got '{kv}'")))?;
        s.set(k, v).map_err(bad)?;
    }
    Ok(s)
}

fn parse_extremal(name: &str) -> Result<Extremal, Failure> {
    let num = |s: &str| s.parse::<f64>().map_err(|_| bad(format!("unknown function '{name}'")));
    Ok(match name {
        "cone" => Extremal::Cone,
        "gauss" => Extremal::Gaussian,
        "nash" => Extremal::Nash,
        _ => {
            if let Some(p) = name.strip_prefix("ms") {
                Extremal::Morrey { p: num(p)? }
            } else if let Some(p) = name.strip_prefix("ls") {
                Extremal::LogSobolev { p: num(p)? }
            } else if let Some(rest) = name.strip_prefix("gn") {
                let (p, q) = rest.split_once('-').ok_or_else(|| bad(format!("expected gn<p>-<q>, got '{name}'")))?;
                Extremal::GagliardoNirenberg { p: num(p)?, q: num(q)? }
            } else {
                return Err(bad(format!("unknown function '{name}'")));
            }
        }
    })
}

fn parse_measure(text: &str) -> Result<SphericalMeasure, Failure> {
    let mut dirs = Vec::new();
    let mut weights = Vec::new();
    for atom in text.split(';').map(str::trim).filter(|a| !a.is_empty()) {
        let (x, w) = atom.split_once(':').ok_or_else(|| bad(format!("expected x,y:w, got '{atom}'")))?;
        let dir: Vec<f64> = x
            .split(',')
            .map(|c| c.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| bad(format!("bad direction '{x}'")))?;
        let r = dir.iter().map(|c| c * c).sum::<f64>().sqrt();
        if r == 0.0 {
            return Err(bad("zero direction"));
        }
        dirs.push(dir.iter().map(|c| c / r).collect::<Vec<_>>());
        weights.push(w.trim().parse::<f64>().map_err(|_| bad(format!("bad weight '{w}'")))?);
    }
    let dim = dirs.first().map(Vec::len).ok_or_else(|| bad("empty measure"))?;
    SphericalMeasure::new(dim, &dirs, &weights).map_err(bad)
}

fn run(cli: Cli) -> Result<i32, Failure> {
    match cli.command {
        Command::Energy { func, scale, matrix, qa, cfg } => {
            let s = load_settings(&cfg)?;
            let kind = parse_extremal(&func)?;
            if matrix.as_ref().is_some_and(|v| v.len() != 4) {
                return Err(bad("--matrix takes four comma-separated entries"));
            }
            let placement = Placement {
                scale,
                matrix: matrix.map(|v| DMatrix::from_row_slice(2, 2, &v)),
                ..Default::default()
            };
            let f = make_extremal(kind, &placement, &s.box_grid(2).map_err(bad)?).map_err(bad)?;
            let q = QBody::preset(&qa.q, qa.m).map_err(bad)?;
            let e = energy(&f, &q, qa.p, &s).map_err(bad)?;
            println!("function\t{}", kind.name());
            println!("E_p(Q,f)\t{e:.9}");
            println!("grad_norm\t{:.9}", f.dirichlet_norm(qa.p));
            let lyz = lyz_body(&f, &q, qa.p, &s).map_err(bad)?;
            println!("lyz_volume\t{:.9}", lyz.volume(&s).map_err(bad)?);
            Ok(0)
        }
        Command::Body { body, qa, cfg } => {
            let s = load_settings(&cfg)?;
            let k = parse_body(&body).map_err(bad)?;
            let q = QBody::preset(&qa.q, qa.m).map_err(bad)?;
            println!("volume\t{:.9}", k.volume(&s).map_err(bad)?);
            let pi = projection_body(&k, &q, qa.p, &s).map_err(bad)?;
            println!("polar_projection_volume\t{:.9}", polar_projection_volume(&pi, &s).map_err(bad)?);
            if let ConvexBody::Polytope(poly) = &k {
                if poly.dim() == 2 && qa.m <= 2 {
                    println!("schneider_ratio\t{:.9}", schneider_ratio(poly, qa.m, &s).map_err(bad)?);
                }
            }
            Ok(0)
        }
        Command::Verify { suite, tol, out, cfg } => {
            let mut s = load_settings(&cfg)?;
            if let Some(t) = tol {
                if !(t >= 0.0 && t <= 0.1) {
                    return Err(bad(format!("--tol must lie in [0, 0.1], got {t}")));
                }
                s.tol_default = t;
            }
            let report = run_suite(&suite, &s).ok_or_else(|| {
                bad(format!("unknown suite '{suite}'; choose one of: all, {}", SUITES.join(", ")))
            })?;
            let csv = report.to_csv();
            match out {
                Some(path) => write(&path, &csv)?,
                None => print!("{csv}"),
            }
            let sum = report.summary();
            eprintln!(
                "{suite}: {} rows, {} passed, {} failed, {} errors",
                report.rows.len(),
                sum.passed,
                sum.failed,
                sum.errors
            );
            for r in report.rows.iter().filter(|r| !r.pass.is_pass()) {
                eprintln!("  not passing: {} {} lhs={} rhs={}", r.suite, r.case_id, r.lhs, r.rhs);
            }
            Ok(if report.all_pass() { 0 } else { 1 })
        }
        Command::Schneider { body, m, optimize, budget, cfg } => {
            let s = load_settings(&cfg)?;
            if let Some(sense) = optimize {
                let sense = match sense.as_str() {
                    "min" => Sense::Min,
                    "max" => Sense::Max,
                    o => return Err(bad(format!("--optimize takes min or max, got '{o}'"))),
                };
                let r = optimize_ratio(Family::Polygons, 2, m, sense, budget, s.seed, &s).map_err(bad)?;
                println!("ratio\t{:.9}", r.ratio);
                println!("evaluations\t{}", r.evaluations);
                println!("body\t{}", ConvexBody::Polytope(r.body).to_literal().map_err(bad)?);
                return Ok(0);
            }
            let body = body.ok_or_else(|| bad("a polygon literal or --optimize is required"))?;
            match parse_body(&body).map_err(bad)? {
                ConvexBody::Polytope(p) => {
                    println!("ratio\t{:.9}", schneider_ratio(&p, m, &s).map_err(bad)?);
                    Ok(0)
                }
                _ => Err(bad("schneider needs a polytope")),
            }
        }
        Command::Minkowski { measure, p } => {
            let nu = parse_measure(&measure)?;
            let sol = solve_lp_minkowski(&nu, p).map_err(bad)?;
            println!("volume\t{:.9}", sol.volume());
            println!("residual\t{:.3e}", sol.residual);
            println!("iterations\t{}", sol.iterations);
            println!("body\t{}", ConvexBody::Polytope(sol.body.clone()).to_literal().map_err(bad)?);
            Ok(0)
        }
        Command::Constants { n, p } => {
            for row in constants_table(n, p).map_err(bad)? {
                println!("{}\t{:.10}\t{}", row.name, row.value, row.label);
            }
            Ok(0)
        }
        Command::Report { input, svg } => {
            let text = std::fs::read_to_string(&input).map_err(|e| bad(format!("{}: {e}", input.display())))?;
            let report = Report::from_csv(&text).map_err(bad)?;
            let sum = report.summary();
            println!("{} rows, {} passed, {} failed, {} errors", report.rows.len(), sum.passed, sum.failed, sum.errors);
            if let Some(path) = svg {
                write(&path, &report.to_svg())?;
            }
            Ok(if report.all_pass() { 0 } else { 1 })
        }
    }
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure(2, format!("{}: {e}", path.display())))
}

/// Parses `args` (program name first) and runs the command. Exit codes:
/// 0 all checks pass, 1 some check fails, 2 bad input.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            if code == 2 {
                eprintln!("usage: affiq <energy|body|verify|schneider|minkowski|constants|report> [options]; see affiq --help");
            }
            code
        }
    }
}
