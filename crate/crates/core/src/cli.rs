//! Command-line front end. Every command writes one JSON report (or CSV for
//! kernel samples) and maps the outcome to an exit code: 0 pass, 1 fail,
//! 2 usage or input error.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::atoms::{decompose_beta, decompose_classical, decompose_local, Atom};
use crate::doob::{gaussian_sandwich, holder_probe, verify_conservative, verify_doubling, verify_harmonicity, DoobKernel, SandwichConfig};
use crate::error::{Error, Result};
use crate::functionals::{bmo_local, duality_pair, l1_norm, weighted_norm, Functional, KernelAction};
use crate::grid::GridFunction;
use crate::kernels::{HarmonicProfile, KernelFamily};
use crate::scalar::logspace;
use crate::spaces::{Ball, Boundary, ModelSpace, WeightedMeasure};
use crate::weights::{ap_sup, subset_ratio, ApTarget};
use crate::{Density, Rational};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "hardylab", version, about = "Heat kernels, Doob transforms, A_p weights and Hardy/BMO functionals")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Model space: shorthand (`half-line-dirichlet`, `bessel:α`, `half-space:n`,
    /// `exterior-ball:n`, `inverse-square:n:γ`, `exterior-bessel:α`), JSON, or @file.
    #[arg(long, global = true)]
    pub space: Option<String>,
    /// Harmonic profile: `identity`, `constant`, `half-space-normal`, `exterior-log`,
    /// `exterior-power:n`, `inverse-square-power:τ`, `bessel-power:α`,
    /// `bessel-exterior:α`, `natural`, JSON, or @file.
    #[arg(long, global = true)]
    pub profile: Option<String>,
    #[arg(long, global = true)]
    pub p: Option<f64>,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Comma-separated 1-D points, or `;`-separated points with `,` coordinates.
    #[arg(long, global = true)]
    pub grid_points: Option<String>,
    /// Comma-separated positive times.
    #[arg(long, global = true)]
    pub time_grid: Option<String>,
    #[arg(long = "K", global = true)]
    pub k: Option<usize>,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Check one of the standing assumptions and write a certificate.
    Verify {
        claim: Claim,
        /// Ceiling for the sandwich constants.
        #[arg(long)]
        ceiling: Option<f64>,
        /// Pass threshold for the fitted Hölder exponent.
        #[arg(long, default_value_t = 0.05)]
        floor: f64,
    },
    /// Supremum of the A_p quantity of h^{-1} over the standard ball family.
    #[command(alias = "ap-check")]
    Ap {
        #[arg(long, default_value_t = 100.0)]
        ceiling: f64,
    },
    /// L¹ norms of maximal, g and area functions, weighted L^p norms, or BMO.
    Norm {
        functional: NormKind,
        /// CSV with header `x,value` (or `x1,...,xn,value`).
        #[arg(long)]
        f: PathBuf,
        #[arg(long, default_value_t = 64)]
        min_points: usize,
    },
    /// Re-decompose an atom into atoms of another family.
    Atomize {
        #[arg(long)]
        mode: AtomizeMode,
        #[arg(long)]
        m: Option<i32>,
        #[arg(long)]
        atom: Option<PathBuf>,
    },
    /// Pair an atom with a function and compare against its local BMO value.
    Pair {
        #[arg(long)]
        atom: PathBuf,
        #[arg(long)]
        g: PathBuf,
    },
    /// CSV samples `t,x,y,value` of the heat kernel (or the Doob kernel with --profile).
    SampleKernel {
        /// Comma-separated target points; defaults to the source grid.
        #[arg(long)]
        y_grid: Option<String>,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Claim {
    Harmonic,
    Conservative,
    Sandwich,
    Holder,
    Doubling,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    Maximal,
    G,
    S,
    Lp,
    Bmo,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AtomizeMode {
    Local,
    Classical,
    Beta,
}

/// Resolved configuration, embedded in every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    pub space: ModelSpace,
    pub profile: HarmonicProfile,
    pub p: Option<f64>,
    pub tol: f64,
    pub points: Vec<Vec<f64>>,
    pub times: Vec<f64>,
    #[serde(rename = "K")]
    pub k: Option<usize>,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub inputs: serde_json::Value,
}

#[derive(Debug, Clone, Serialize)]
struct Report<R: Serialize> {
    schema_version: u32,
    config: RunConfig,
    timestamp: String,
    pass: bool,
    result: R,
}

fn parse_num(s: &str, what: &str) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|_| Error::invalid(format!("bad {what} {s:?}")))
}

fn read_arg(s: &str) -> Result<String> {
    match s.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).map_err(|e| Error::invalid(format!("{path}: {e}"))),
        None => Ok(s.to_string()),
    }
}

pub fn parse_space(s: &str) -> Result<ModelSpace> {
    let s = read_arg(s)?;
    let s = s.trim();
    let space = if s.starts_with('{') {
        serde_json::from_str(s).map_err(|e| Error::invalid(format!("space JSON: {e}")))?
    } else {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |i: usize| parts.get(i).ok_or_else(|| Error::invalid(format!("space {s:?} needs parameter {i}"))).and_then(|v| parse_num(v, "parameter"));
        let dim = |i: usize| num(i).map(|v| v as u32);
        match parts[0] {
            "half-line-dirichlet" | "half-line" if parts.len() == 1 => ModelSpace::half_line_dirichlet(),
            "half-line" => {
                let boundary = match parts.get(2).copied().unwrap_or("dirichlet") {
                    "dirichlet" => Boundary::Dirichlet,
                    "neumann" => Boundary::Neumann,
                    b => return Err(Error::invalid(format!("unknown boundary {b:?}"))),
                };
                ModelSpace::HalfLine { alpha: num(1)?, boundary }
            }
            "bessel" | "bessel-neumann" => ModelSpace::bessel_neumann(num(1)?),
            "half-space" => ModelSpace::HalfSpace { n: dim(1)? },
            "exterior-ball" => ModelSpace::ExteriorBall { n: dim(1)? },
            "inverse-square" => ModelSpace::InverseSquare { n: dim(1)?, gamma: num(2)? },
            "exterior-bessel" => ModelSpace::ExteriorBessel { alpha: num(1)? },
            other => return Err(Error::invalid(format!("unknown space {other:?}"))),
        }
    };
    space.validate()?;
    Ok(space)
}

pub fn parse_profile(s: &str, space: &ModelSpace) -> Result<HarmonicProfile> {
    let s = read_arg(s)?;
    let s = s.trim();
    if s.starts_with('{') {
        return serde_json::from_str(s).map_err(|e| Error::invalid(format!("profile JSON: {e}")));
    }
    let parts: Vec<&str> = s.split(':').collect();
    let num = || parts.get(1).ok_or_else(|| Error::invalid(format!("profile {s:?} needs a parameter"))).and_then(|v| parse_num(v, "parameter"));
    Ok(match parts[0] {
        "natural" => HarmonicProfile::natural_for(space),
        "identity" => HarmonicProfile::Identity,
        "constant" => HarmonicProfile::Constant,
        "half-space-normal" => HarmonicProfile::HalfSpaceNormal,
        "exterior-log" => HarmonicProfile::ExteriorLog,
        "exterior-power" => HarmonicProfile::ExteriorPower { n: num()? as u32 },
        "inverse-square-power" => HarmonicProfile::InverseSquarePower { tau: num()? },
        "bessel-power" => HarmonicProfile::BesselPower { alpha: num()? },
        "bessel-exterior" => HarmonicProfile::BesselExterior { alpha: num()? },
        other => return Err(Error::invalid(format!("unknown profile {other:?}"))),
    })
}

fn parse_list(s: &str, what: &str) -> Result<Vec<f64>> {
    s.split(',').filter(|v| !v.trim().is_empty()).map(|v| parse_num(v, what)).collect()
}

/// 1-D values on the half-space become points on the normal axis.
fn parse_points(s: &str, space: &ModelSpace) -> Result<Vec<Vec<f64>>> {
    let pts: Vec<Vec<f64>> = if s.contains(';') {
        s.split(';').filter(|p| !p.trim().is_empty()).map(|p| parse_list(p, "coordinate")).collect::<Result<_>>()?
    } else {
        parse_list(s, "point")?.into_iter().map(|v| vec![v]).collect()
    };
    Ok(pts.into_iter().map(|p| lift(p, space)).collect())
}

fn lift(p: Vec<f64>, space: &ModelSpace) -> Vec<f64> {
    match *space {
        ModelSpace::HalfSpace { n } if p.len() == 1 => {
            let mut q = vec![0.0; n as usize];
            q[n as usize - 1] = p[0];
            q
        }
        _ => p,
    }
}

fn default_points(space: &ModelSpace) -> Vec<Vec<f64>> {
    let lo = space.lower_end();
    [0.25, 1.0, 4.0].iter().map(|&d| lift(vec![lo + d], space)).collect()
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::invalid(format!("{}: {e}", path.display())))
}

fn read_atom(path: &Path) -> Result<Atom<Rational>> {
    let text = read_file(path)?;
    let v: serde_json::Value = serde_json::from_str(&text).map_err(|e| Error::invalid(format!("{}: {e}", path.display())))?;
    Atom::from_json(&v)
}

fn read_grid(path: &Path) -> Result<GridFunction> {
    GridFunction::from_csv(&read_file(path)?)
}

fn resolve(cli: &Cli) -> Result<RunConfig> {
    let c = &cli.common;
    let needs_space = matches!(cli.command, Command::Verify { .. } | Command::SampleKernel { .. });
    let space = match &c.space {
        Some(s) => parse_space(s)?,
        None if needs_space => return Err(Error::invalid("--space is required")),
        None => ModelSpace::half_line_dirichlet(),
    };
    let profile = match &c.profile {
        Some(s) => parse_profile(s, &space)?,
        None => HarmonicProfile::natural_for(&space),
    };
    let tol = c.tol.unwrap_or(1e-6);
    if !(tol > 0.0) {
        return Err(Error::invalid(format!("--tol {tol} must be positive")));
    }
    let points = match &c.grid_points {
        Some(s) => parse_points(s, &space)?,
        None => default_points(&space),
    };
    let times = match &c.time_grid {
        Some(s) => parse_list(s, "time")?,
        None => vec![0.1, 1.0, 10.0],
    };
    if points.is_empty() || times.is_empty() {
        return Err(Error::invalid("grids must be non-empty"));
    }
    if times.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
        return Err(Error::invalid("times must be positive"));
    }
    let (command, inputs) = match &cli.command {
        Command::Verify { claim, ceiling, floor } => ("verify", serde_json::json!({"claim": claim, "ceiling": ceiling, "floor": floor})),
        Command::Ap { ceiling } => ("ap", serde_json::json!({"ceiling": ceiling})),
        Command::Norm { functional, f, min_points } => ("norm", serde_json::json!({"functional": functional, "f": f, "min_points": min_points})),
        Command::Atomize { mode, m, atom } => ("atomize", serde_json::json!({"mode": mode, "m": m, "atom": atom})),
        Command::Pair { atom, g } => ("pair", serde_json::json!({"atom": atom, "g": g})),
        Command::SampleKernel { y_grid } => ("sample-kernel", serde_json::json!({"y_grid": y_grid})),
    };
    Ok(RunConfig {
        command: command.into(),
        space,
        profile,
        p: c.p,
        tol,
        points,
        times,
        k: c.k,
        seed: c.seed,
        out: c.out.clone(),
        inputs,
    })
}

/// Outcome of a command: pass flag and the JSON result.
type Outcome = (bool, serde_json::Value);

fn to_json<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("report serializes")
}

fn kernel_for(cfg: &RunConfig) -> Result<KernelFamily> {
    KernelFamily::for_space(&cfg.space)
}

fn cmd_verify(cfg: &RunConfig, claim: Claim, ceiling: Option<f64>, floor: f64) -> Result<Outcome> {
    let cert = match claim {
        Claim::Harmonic => verify_harmonicity(&kernel_for(cfg)?, &cfg.profile, &cfg.times, &cfg.points, cfg.tol)?,
        Claim::Conservative => {
            let dk = DoobKernel::new(kernel_for(cfg)?, cfg.profile)?;
            verify_conservative(&dk, &cfg.times, &cfg.points, cfg.tol)?
        }
        Claim::Sandwich => {
            let dk = DoobKernel::new(kernel_for(cfg)?, cfg.profile)?;
            let mut sc = SandwichConfig::default();
            if let Some(c) = ceiling {
                sc.ceiling = c;
            }
            gaussian_sandwich(&dk, &cfg.points, &cfg.times, sc)?
        }
        Claim::Holder => {
            let dk = DoobKernel::new(kernel_for(cfg)?, cfg.profile)?;
            let t = cfg.times[0];
            let x = &cfg.points[0];
            let y0 = cfg.points.get(1).unwrap_or(x);
            let st = t.sqrt();
            let offsets: Vec<f64> = (2..14).map(|k| st * 2f64.powi(-k)).collect();
            holder_probe(&dk, t, x, y0, &offsets, floor)?.1
        }
        Claim::Doubling => verify_doubling(&cfg.space, &cfg.profile)?,
    };
    Ok((cert.pass, to_json(&cert)))
}

fn cmd_ap(cfg: &RunConfig, ceiling: f64) -> Result<Outcome> {
    let p = cfg.p.unwrap_or(2.0);
    let target = ApTarget::Profile { space: cfg.space.clone(), profile: cfg.profile };
    let (centers, radii) = cfg.space.standard_grid();
    let report = ap_sup(&target, p, &centers, &radii, ceiling)?;
    let mut out = to_json(&report);
    // randomized subset check against the found constant, on 1-D models
    if cfg.space.is_one_dimensional() && report.pass {
        let m = WeightedMeasure::profile_power(cfg.space.clone(), cfg.profile, 2.0);
        let w = Density::one().times(&Density::Power { profile: cfg.profile, q: 1.0, power: -1.0 }, 1.0);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(cfg.seed);
        let ball = Ball::new(centers[centers.len() / 2].clone(), radii[radii.len() / 2])?;
        let worst = subset_ratio(&m, &w, p, &ball, 100, &mut rng)?;
        out["subset_check"] = serde_json::json!({"ball": ball, "worst_ratio": worst, "bound": report.supremum, "pass": worst <= report.supremum * (1.0 + 1e-9)});
        if worst > report.supremum * (1.0 + 1e-9) {
            return Ok((false, out));
        }
    }
    Ok((report.pass, out))
}

fn cmd_norm(cfg: &RunConfig, which: NormKind, path: &Path, min_points: usize, times_given: bool) -> Result<Outcome> {
    let f = read_grid(path)?;
    match which {
        NormKind::Maximal | NormKind::G | NormKind::S => {
            let a = KernelAction::from_grid(&f, kernel_for(cfg)?)?;
            let times = if times_given { cfg.times.clone() } else { a.default_times() };
            let functional = match which {
                NormKind::Maximal => Functional::Maximal,
                NormKind::G => Functional::G,
                _ => Functional::S,
            };
            let v = l1_norm(&a, functional, &times, min_points)?;
            Ok((v.is_finite(), serde_json::json!({"functional": which, "l1_norm": v, "times": times.len()})))
        }
        NormKind::Lp => {
            let p = cfg.p.unwrap_or(1.0);
            let m = WeightedMeasure::reference(cfg.space.clone());
            let v = weighted_norm(&f, &m, p)?;
            Ok((v.is_finite(), serde_json::json!({"functional": which, "p": p, "norm": v})))
        }
        NormKind::Bmo => {
            let g = f.to_piecewise()?;
            let (lo, hi) = (f.axes[0][0], *f.axes[0].last().unwrap());
            let lo = lo.max(cfg.space.lower_end());
            // balls inside the sampled range
            let centers: Vec<Vec<f64>> = logspace((lo + 1e-3 * (hi - lo)).max(1e-12), hi, 17)
                .into_iter()
                .map(|c| vec![c])
                .collect();
            let radii: Vec<f64> = (0..12).map(|k| (hi - lo) * 2f64.powi(-k)).collect();
            let end = cfg.space.lower_end();
            let inside = |c: &Vec<f64>, r: f64| (c[0] - r).max(end) >= lo - 1e-12 && c[0] + r <= hi + 1e-12;
            let mut best: Option<(Ball, f64)> = None;
            let mut count = 0;
            for c in &centers {
                for &r in &radii {
                    if !inside(c, r) {
                        continue;
                    }
                    let ball = Ball::new(c.clone(), r)?;
                    let (_, v) = bmo_local(&g, &cfg.space, &cfg.profile, &ball)?;
                    count += 1;
                    if best.as_ref().is_none_or(|b| v > b.1) {
                        best = Some((ball, v));
                    }
                }
            }
            let (argmax, norm) = best.ok_or_else(|| Error::invalid("sample range too short for any ball"))?;
            Ok((norm.is_finite(), serde_json::json!({"functional": which, "norm": norm, "argmax": argmax, "balls": count, "zero_within_tol": norm <= cfg.tol})))
        }
    }
}

fn cmd_atomize(cfg: &RunConfig, mode: AtomizeMode, m: Option<i32>, atom: Option<&Path>) -> Result<Outcome> {
    let d = match mode {
        AtomizeMode::Local => {
            let m = m.ok_or_else(|| Error::invalid("--mode local needs --m"))?;
            decompose_local::<Rational>(m, cfg.k.unwrap_or(40))?
        }
        AtomizeMode::Classical | AtomizeMode::Beta => {
            let path = atom.ok_or_else(|| Error::invalid("this mode needs --atom"))?;
            let a = read_atom(path)?;
            if mode == AtomizeMode::Classical {
                decompose_classical(&a)?
            } else {
                decompose_beta(&a)?
            }
        }
    };
    let pass = num_traits::Zero::is_zero(&d.reconstruction_error) && d.atoms_valid();
    Ok((pass, d.to_json()))
}

fn cmd_pair(cfg: &RunConfig, atom: &Path, g: &Path) -> Result<Outcome> {
    let a = read_atom(atom)?;
    let g = read_grid(g)?.to_piecewise()?;
    let r = duality_pair(&a, &g, &cfg.space, &cfg.profile)?;
    Ok((r.pass, to_json(&r)))
}

fn sample_kernel(cfg: &RunConfig, y_grid: Option<&str>, doob: bool) -> Result<String> {
    let k = kernel_for(cfg)?;
    let ys = match y_grid {
        Some(s) => parse_points(s, &cfg.space)?,
        None => cfg.points.clone(),
    };
    let doob = doob.then(|| DoobKernel::new(k, cfg.profile)).transpose()?;
    let mut out = String::from("t,x,y,value\n");
    let fmt = |p: &[f64]| p.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ");
    for &t in &cfg.times {
        for x in &cfg.points {
            for y in &ys {
                let v = match &doob {
                    Some(dk) => dk.eval(t, x, y)?,
                    None => k.heat_kernel(t, x, y)?,
                };
                out.push_str(&format!("{t},{},{},{v}\n", fmt(x), fmt(y)));
            }
        }
    }
    Ok(out)
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NonFiniteMass(_)
        | Error::DivergentIntegral(_)
        | Error::QuadratureFailure { .. }
        | Error::DegenerateFit(_)
        | Error::NotDecomposable(_) => 1,
        _ => 2,
    }
}

fn emit(cfg: &RunConfig, text: &str) -> Result<()> {
    match &cfg.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::invalid(format!("{}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn init_threads() {
    if let Some(n) = std::env::var("HARDYLAB_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I) -> i32
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
    init_threads();
    let cfg = match resolve(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    if let Command::SampleKernel { y_grid } = &cli.command {
        return match sample_kernel(&cfg, y_grid.as_deref(), cli.common.profile.is_some()).and_then(|csv| emit(&cfg, csv.trim_end())) {
            Ok(()) => 0,
            Err(e) => {
                eprintln!("error: {e}");
                exit_code(&e)
            }
        };
    }
    let outcome = match &cli.command {
        Command::Verify { claim, ceiling, floor } => cmd_verify(&cfg, *claim, *ceiling, *floor),
        Command::Ap { ceiling } => cmd_ap(&cfg, *ceiling),
        Command::Norm { functional, f, min_points } => cmd_norm(&cfg, *functional, f, *min_points, cli.common.time_grid.is_some()),
        Command::Atomize { mode, m, atom } => cmd_atomize(&cfg, *mode, *m, atom.as_deref()),
        Command::Pair { atom, g } => cmd_pair(&cfg, atom, g),
        Command::SampleKernel { .. } => unreachable!(),
    };
    let (code, pass, result) = match outcome {
        Ok((pass, r)) => (if pass { 0 } else { 1 }, pass, r),
        Err(e) => {
            eprintln!("error: {e}");
            let code = exit_code(&e);
            if code == 2 {
                return 2;
            }
            (1, false, serde_json::json!({"error": e.to_string()}))
        }
    };
    let report = Report { schema_version: SCHEMA_VERSION, config: cfg.clone(), timestamp: chrono::Utc::now().to_rfc3339(), pass, result };
    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    if let Err(e) = emit(&cfg, &text) {
        eprintln!("error: {e}");
        return 2;
    }
    code
}
