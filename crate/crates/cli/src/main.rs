use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use yieldconvex::calculus::{grad_f, subgradient_f};
use yieldconvex::config::CriterionConfig;
use yieldconvex::convexity::{
    certify_criterion, compare_conditions, Comparison, ConvexityReport, Verdict, DEFAULT_GRID,
};
use yieldconvex::criteria::{catalog, DeviatoricShape, Extended};
use yieldconvex::sections::{
    biaxial_section, deviatoric_section, meridian_section, SectionPolyline,
    DEFAULT_MERIDIAN_POINTS, DEFAULT_PER_SECTOR, DEFAULT_RAYS, DEFAULT_TOL_ROOT,
};
use yieldconvex::tensor::{invariants, stress_locus, DeviatoricLocus, SymmetricTensor3};
use yieldconvex::Error;

#[derive(Parser)]
#[command(
    name = "yieldconvex",
    version,
    about = "Convexity certificates and sections of isotropic yield criteria"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate F, invariants and the gradient (or corner slopes) at a stress state.
    Eval {
        config: PathBuf,
        /// Components s11 s22 s33 s12 s13 s23.
        #[arg(long, num_args = 6, allow_negative_numbers = true, value_name = "S")]
        stress: Vec<String>,
        #[arg(long)]
        json: bool,
    },
    /// Certify convexity of the criterion (exit 0 convex, 1 non-convex).
    Certify {
        config: PathBuf,
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
        #[arg(long)]
        json: bool,
    },
    /// Compare the certificate, the Laydi-Lexcellent conditions and the sampling oracle.
    Compare {
        config: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
        #[arg(long)]
        json: bool,
    },
    /// Write a section polyline to a file.
    Section {
        config: PathBuf,
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Intervals per 60° sector (deviatoric).
        #[arg(long, default_value_t = DEFAULT_PER_SECTOR)]
        per_sector: usize,
        /// Polar radius per unit g (deviatoric).
        #[arg(long, default_value_t = 1.0)]
        radius_scale: f64,
        /// Fixed Lode angle in radians (meridian).
        #[arg(long, default_value_t = 0.0)]
        theta: f64,
        /// Sample count (meridian).
        #[arg(long, default_value_t = DEFAULT_MERIDIAN_POINTS)]
        points: usize,
        /// Ray count (biaxial).
        #[arg(long, default_value_t = DEFAULT_RAYS)]
        rays: usize,
        #[arg(long, default_value_t = DEFAULT_TOL_ROOT)]
        tol_root: f64,
        /// Emit biaxial values in stress units instead of dividing by ft.
        #[arg(long)]
        no_normalize: bool,
        /// `name=v1,v2,...`: one output file per value, suffixed `_name-value`.
        #[arg(long, value_name = "NAME=VALUES")]
        param_sweep: Option<String>,
    },
    /// List the built-in deviatoric shapes.
    Catalog {
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Deviatoric,
    Meridian,
    Biaxial,
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum Format {
    Csv,
    Json,
}

/// Exit statuses: 0 success or convex, 1 non-convex, 2 config, 3 domain, 4 sectioning.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) => 2,
        Error::NoInteriorPoint | Error::NoBracket { .. } => 4,
        _ => 3,
    }
}

#[derive(Serialize, Deserialize)]
struct CornerInfo {
    theta: f64,
    left: f64,
    right: f64,
    subgradient: Option<SymmetricTensor3>,
}

#[derive(Serialize, Deserialize)]
struct EvalReport {
    stress: SymmetricTensor3,
    p: f64,
    q: f64,
    theta: Option<f64>,
    locus: DeviatoricLocus,
    value: Extended,
    gradient: Option<SymmetricTensor3>,
    corner: Option<CornerInfo>,
    note: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct CatalogEntry {
    name: String,
    description: String,
    shape: DeviatoricShape,
}

fn load(config: &Path) -> Result<CriterionConfig, Error> {
    CriterionConfig::from_path(config)
}

fn print_json<T: Serialize>(v: &T) {
    println!(
        "{}",
        serde_json::to_string_pretty(v).expect("reports serialize")
    );
}

fn locus_text(l: &DeviatoricLocus) -> String {
    match l {
        DeviatoricLocus::Interior(k) => format!("interior of sector {k}"),
        DeviatoricLocus::AxisThetaZero(k) => {
            format!("axis projection theta=0 (principal direction {k})")
        }
        DeviatoricLocus::AxisThetaPiThird(k) => {
            format!("axis projection theta=pi/3 (principal direction {k})")
        }
        DeviatoricLocus::Hydrostatic => "hydrostatic axis".into(),
    }
}

fn tensor_text(t: &SymmetricTensor3) -> String {
    let c = t.components();
    format!("[{} {} {} {} {} {}]", c[0], c[1], c[2], c[3], c[4], c[5])
}

fn cmd_eval(config: &Path, stress: &[String], json: bool) -> Result<u8, Error> {
    let crit = load(config)?.build()?;
    let v: Vec<f64> = stress
        .iter()
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| Error::Domain(format!("cannot parse stress component '{s}'")))
        })
        .collect::<Result<_, _>>()?;
    let sigma = SymmetricTensor3::try_new(v[0], v[1], v[2], v[3], v[4], v[5])?;
    let inv = invariants(&sigma)?;
    let value = crit.eval(&sigma)?;
    let locus = stress_locus(&sigma);
    let mut report = EvalReport {
        stress: sigma,
        p: inv.p,
        q: inv.q,
        theta: inv.theta,
        locus,
        value,
        gradient: None,
        corner: None,
        note: None,
    };
    match grad_f(&sigma, &crit) {
        Ok(g) => report.gradient = Some(g.gradient),
        Err(Error::CornerPoint { theta, left, right }) => {
            let subgradient = subgradient_f(&sigma, &crit).ok().map(|g| g.gradient);
            report.corner = Some(CornerInfo {
                theta,
                left,
                right,
                subgradient,
            });
        }
        Err(Error::HydrostaticPoint) => {
            report.note = Some("theta undefined at a hydrostatic state; no gradient".into())
        }
        Err(e) => report.note = Some(format!("no gradient: {e}")),
    }
    if json {
        print_json(&report);
        return Ok(0);
    }
    println!("p        = {}", report.p);
    println!("q        = {}", report.q);
    match report.theta {
        Some(t) => println!("theta    = {t}"),
        None => println!("theta    = undefined"),
    }
    println!("locus    = {}", locus_text(&report.locus));
    println!("F        = {}", report.value);
    if let Some(g) = &report.gradient {
        println!("gradient = {}", tensor_text(g));
    }
    if let Some(c) = &report.corner {
        println!(
            "corner at theta = {}: one-sided slopes g'- = {}, g'+ = {}",
            c.theta, c.left, c.right
        );
        if let Some(s) = &c.subgradient {
            println!("subgradient element = {}", tensor_text(s));
        }
    }
    if let Some(n) = &report.note {
        println!("note: {n}");
    }
    Ok(0)
}

fn print_report(label: &str, r: &ConvexityReport) {
    println!("criterion: {label}");
    println!(
        "{:<28} {:<9} {:>24} {:>22}",
        "condition", "satisfied", "margin", "worst at"
    );
    for c in &r.conditions {
        let ok = if c.satisfied { "yes" } else { "NO" };
        println!(
            "{:<28} {:<9} {:>24} {:>22}",
            c.name.to_string(),
            ok,
            format!("{:.15e}", c.margin),
            format!("{:.15}", c.worst_location)
        );
    }
    println!("verdict: {} (grid {} per piece)", r.verdict, r.grid_size);
}

fn cmd_certify(config: &Path, grid: usize, json: bool) -> Result<u8, Error> {
    let crit = load(config)?.build()?;
    let report = certify_criterion(&crit, grid);
    if json {
        print_json(&report);
    } else {
        print_report(&crit.deviatoric.label(), &report);
    }
    Ok(if report.verdict == Verdict::Convex {
        0
    } else {
        1
    })
}

fn cmd_compare(
    config: &Path,
    samples: usize,
    seed: u64,
    grid: usize,
    json: bool,
) -> Result<u8, Error> {
    let shape = load(config)?.shape()?;
    let cmp: Comparison = compare_conditions(&shape, grid, samples, seed);
    if json {
        print_json(&cmp);
        return Ok(0);
    }
    println!("shape: {}", cmp.shape);
    println!("{:<16} {:<12} detail", "method", "verdict");
    for row in &cmp.rows {
        println!(
            "{:<16} {:<12} {}",
            row.method,
            row.verdict.to_string(),
            row.detail
        );
    }
    let flags = cmp.flags();
    if flags.is_empty() {
        println!("flags: none (methods agree)");
    } else {
        println!("flags: {}", flags.join(", "));
    }
    Ok(0)
}

struct SectionOpts {
    kind: Kind,
    format: Format,
    per_sector: usize,
    radius_scale: f64,
    theta: f64,
    points: usize,
    rays: usize,
    tol_root: f64,
    normalize: bool,
}

fn build_section(cfg: &CriterionConfig, o: &SectionOpts) -> Result<SectionPolyline, Error> {
    let crit = cfg.build()?;
    match o.kind {
        Kind::Deviatoric => deviatoric_section(&crit.deviatoric, o.radius_scale, o.per_sector),
        Kind::Meridian => meridian_section(&crit, o.theta, o.points),
        Kind::Biaxial => biaxial_section(&crit, o.rays, o.tol_root, o.normalize),
    }
}

fn write_section(poly: &SectionPolyline, path: &Path, format: Format) -> Result<(), Error> {
    let text = match format {
        Format::Csv => poly.to_csv(),
        Format::Json => {
            serde_json::to_string_pretty(&poly.to_json()).expect("sections serialize") + "\n"
        }
    };
    std::fs::write(path, text)
        .map_err(|e| Error::Domain(format!("cannot write {}: {e}", path.display())))
}

fn sweep_path(out: &Path, name: &str, value: &str) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let file = match out.extension() {
        Some(ext) => format!("{stem}_{name}-{value}.{}", ext.to_string_lossy()),
        None => format!("{stem}_{name}-{value}"),
    };
    out.with_file_name(file)
}

fn cmd_section(
    config: &Path,
    out: &Path,
    sweep: Option<&str>,
    o: &SectionOpts,
) -> Result<u8, Error> {
    let base = load(config)?;
    let mut jobs: Vec<(CriterionConfig, PathBuf)> = Vec::new();
    match sweep {
        None => jobs.push((base, out.to_path_buf())),
        Some(spec) => {
            let (name, values) = spec.split_once('=').ok_or_else(|| {
                Error::Config(format!(
                    "--param-sweep expects NAME=v1,v2,... (got '{spec}')"
                ))
            })?;
            for v in values.split(',').map(str::trim).filter(|v| !v.is_empty()) {
                let x: f64 = v
                    .parse()
                    .map_err(|_| Error::Config(format!("cannot parse sweep value '{v}'")))?;
                let mut cfg = base.clone();
                cfg.set_param(name, x)?;
                jobs.push((cfg, sweep_path(out, name, v)));
            }
        }
    }
    let mut status = 0;
    for (cfg, path) in jobs {
        let poly = build_section(&cfg, o)?;
        write_section(&poly, &path, o.format)?;
        println!("wrote {} points to {}", poly.points.len(), path.display());
        if let (Some(ft), Some(fc)) = (
            poly.metadata.levels.get("ft"),
            poly.metadata.levels.get("fc"),
        ) {
            println!("ft = {ft}, fc = {fc}, ft/fc = {}", ft / fc);
        }
        for w in &poly.metadata.warnings {
            eprintln!("warning: {w}");
        }
        if let Err(e) = poly.require_complete() {
            for r in &poly.metadata.failed_rays {
                let angle = 2.0 * std::f64::consts::PI * *r as f64 / o.rays as f64;
                eprintln!("ray {r} (angle {angle}): no sign change of F within the search radius");
            }
            eprintln!("error: {e}");
            status = exit_code(&e);
        }
    }
    Ok(status)
}

fn cmd_catalog(json: bool) -> Result<u8, Error> {
    let entries: Vec<CatalogEntry> = catalog()
        .into_iter()
        .map(|(name, description, shape)| CatalogEntry {
            name: name.into(),
            description: description.into(),
            shape,
        })
        .collect();
    if json {
        print_json(&entries);
    } else {
        for e in &entries {
            println!("{}", e.description);
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Eval {
            config,
            stress,
            json,
        } => cmd_eval(config, stress, *json),
        Command::Certify { config, grid, json } => cmd_certify(config, *grid, *json),
        Command::Compare {
            config,
            samples,
            seed,
            grid,
            json,
        } => cmd_compare(config, *samples, *seed, *grid, *json),
        Command::Section {
            config,
            kind,
            out,
            format,
            per_sector,
            radius_scale,
            theta,
            points,
            rays,
            tol_root,
            no_normalize,
            param_sweep,
        } => {
            let opts = SectionOpts {
                kind: *kind,
                format: *format,
                per_sector: *per_sector,
                radius_scale: *radius_scale,
                theta: *theta,
                points: *points,
                rays: *rays,
                tol_root: *tol_root,
                normalize: !no_normalize,
            };
            cmd_section(config, out, param_sweep.as_deref(), &opts)
        }
        Command::Catalog { json } => cmd_catalog(*json),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
