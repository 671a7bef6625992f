//! Doob transforms and numerical certificates for harmonicity, conservativity,
//! two-sided Gaussian bounds and Hölder regularity.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{HarmonicProfile, KernelFamily};
use crate::quadrature::{integrate_split, QuadConfig};
use crate::spaces::{doubling_constant, Ball, ModelSpace, WeightedMeasure};

/// `T̃_t(x,y) = T_t(x,y) / (h(x) h(y))` acting on `ν = h² dμ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoobKernel {
    pub base: KernelFamily,
    pub profile: HarmonicProfile,
}

impl DoobKernel {
    pub fn new(base: KernelFamily, profile: HarmonicProfile) -> Result<Self> {
        if !profile.compatible_with(&base.space()) {
            return Err(Error::invalid(format!("profile {profile:?} does not live on {}", base.space())));
        }
        Ok(DoobKernel { base, profile })
    }

    pub fn space(&self) -> ModelSpace {
        self.base.space()
    }

    /// `ν = μ_{h²}`.
    pub fn measure(&self) -> WeightedMeasure {
        WeightedMeasure::profile_power(self.space(), self.profile, 2.0)
    }

    pub fn eval(&self, t: f64, x: &[f64], y: &[f64]) -> Result<f64> {
        let space = self.space();
        let hx = self.profile.eval(&space, x).map_err(to_domain)?;
        let hy = self.profile.eval(&space, y).map_err(to_domain)?;
        Ok(self.base.heat_kernel(t, x, y)? / (hx * hy))
    }

    pub fn log_eval(&self, t: f64, x: &[f64], y: &[f64]) -> Result<f64> {
        let space = self.space();
        let hx = self.profile.eval(&space, x).map_err(to_domain)?;
        let hy = self.profile.eval(&space, y).map_err(to_domain)?;
        Ok(self.base.log_heat_kernel(t, x, y)? - hx.ln() - hy.ln())
    }
}

fn to_domain(e: Error) -> Error {
    match e {
        Error::OutsideDomain(s) => Error::DomainError(format!("{s} is not an interior point")),
        other => other,
    }
}

pub fn doob_kernel(dk: &DoobKernel, t: f64, x: &[f64], y: &[f64]) -> Result<f64> {
    dk.eval(t, x, y)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridDescription {
    pub points: Vec<Vec<f64>>,
    pub times: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Machine-readable record of an inequality checked on a finite grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub claim: String,
    pub grid: GridDescription,
    pub constants: BTreeMap<String, f64>,
    pub tolerance: f64,
    pub pass: bool,
    /// Estimated quantities are labelled empirical.
    #[serde(default)]
    pub empirical: bool,
    pub timestamp: String,
    pub version: String,
}

impl Certificate {
    pub fn new(claim: impl Into<String>, grid: GridDescription, tolerance: f64) -> Self {
        Certificate {
            claim: claim.into(),
            grid,
            constants: BTreeMap::new(),
            tolerance,
            pass: false,
            empirical: false,
            timestamp: chrono::Utc::now().to_rfc3339(),
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    pub fn constant(&self, name: &str) -> Option<f64> {
        self.constants.get(name).copied()
    }

    fn set(&mut self, name: &str, v: f64) {
        self.constants.insert(name.to_string(), v);
    }
}

fn check_grid(times: &[f64], points: &[Vec<f64>], tol: f64) -> Result<()> {
    if times.is_empty() || points.is_empty() {
        return Err(Error::invalid("time and point grids must be non-empty"));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid(format!("tolerance {tol} must be positive")));
    }
    if times.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
        return Err(Error::invalid("times must be positive and finite"));
    }
    Ok(())
}

/// `∫ T_t(x,y) f(y) dμ(y)` by adaptive quadrature with Gaussian tail truncation.
///
/// On the half-space `f` may only depend on the normal coordinate; the
/// tangential Gaussian integrates to one and only the normal direction is
/// integrated numerically.
pub fn kernel_integral<F>(k: &KernelFamily, t: f64, x: &[f64], f: F, rel_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let space = k.space();
    let c = space.coordinate(x)?;
    let l = KernelFamily::tail_radius(t);
    let lo = (c - l).max(space.lower_end());
    let hi = c + l;
    let cfg = QuadConfig { abs_tol: 1e-300, rel_tol, max_subdivisions: 4000 };
    let kn = half_line_dirichlet_normal(k);
    let density_exp = space.reference_exponent();
    let res = integrate_split(
        |y: f64| {
            let w = if density_exp == 0.0 { 1.0 } else { y.powf(density_exp) };
            kn.heat_kernel(t, &[c], &[y]).map(|v| v * f(y) * w).unwrap_or(0.0)
        },
        lo,
        hi,
        &[c],
        cfg,
    )?;
    Ok(res.value)
}

fn half_line_dirichlet_normal(k: &KernelFamily) -> KernelFamily {
    // the normal factor of the half-space kernel is the half-line Dirichlet kernel
    match k {
        KernelFamily::HalfSpaceDirichlet { .. } => KernelFamily::HalfLineDirichlet,
        other => *other,
    }
}

/// Checks `T_t h = h` on the grid: relative deviation below `tol`.
pub fn verify_harmonicity(
    k: &KernelFamily,
    p: &HarmonicProfile,
    times: &[f64],
    points: &[Vec<f64>],
    tol: f64,
) -> Result<Certificate> {
    check_grid(times, points, tol)?;
    let space = k.space();
    if !p.compatible_with(&space) {
        return Err(Error::invalid(format!("profile {p:?} does not live on {space}")));
    }
    let jobs: Vec<(f64, &Vec<f64>)> = times.iter().flat_map(|&t| points.iter().map(move |x| (t, x))).collect();
    let devs: Vec<Result<f64>> = jobs
        .par_iter()
        .map(|&(t, x)| {
            let hx = p.eval(&space, x)?;
            let v = kernel_integral(k, t, x, |y| p.value_of_coordinate(y), tol / 10.0)?;
            Ok((v - hx).abs() / hx)
        })
        .collect();
    let mut cert = Certificate::new(
        format!("T_t h = h for h = {p:?} on {space}"),
        GridDescription { points: points.to_vec(), times: times.to_vec(), note: None },
        tol,
    );
    let mut worst: f64 = 0.0;
    for d in devs {
        worst = worst.max(d?);
    }
    cert.set("max_relative_deviation", worst);
    cert.pass = worst < tol;
    Ok(cert)
}

/// Checks `∫ T̃_t(x,y) dν(y) = 1` on the grid.
pub fn verify_conservative(dk: &DoobKernel, times: &[f64], points: &[Vec<f64>], tol: f64) -> Result<Certificate> {
    check_grid(times, points, tol)?;
    let space = dk.space();
    let profile = dk.profile;
    let jobs: Vec<(f64, &Vec<f64>)> = times.iter().flat_map(|&t| points.iter().map(move |x| (t, x))).collect();
    let devs: Vec<Result<f64>> = jobs
        .par_iter()
        .map(|&(t, x)| {
            let hx = profile.eval(&space, x)?;
            // T̃_t(x,y) h(y)² = T_t(x,y) h(y)² / (h(x) h(y)), written out so the
            // integrand never divides by h(y) at the boundary
            let v = kernel_integral(
                &dk.base,
                t,
                x,
                |y| {
                    let hy = profile.value_of_coordinate(y);
                    if hy == 0.0 {
                        0.0
                    } else {
                        hy * hy / (hx * hy)
                    }
                },
                tol / 10.0,
            )?;
            Ok((v - 1.0).abs())
        })
        .collect();
    let mut cert = Certificate::new(
        format!("∫ T̃_t(x,y) dν(y) = 1 for h = {profile:?} on {space}"),
        GridDescription { points: points.to_vec(), times: times.to_vec(), note: None },
        tol,
    );
    let mut worst: f64 = 0.0;
    for d in devs {
        worst = worst.max(d?);
    }
    cert.set("max_deviation", worst);
    cert.pass = worst < tol;
    Ok(cert)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SandwichConfig {
    pub c_lower: f64,
    pub c_upper: f64,
    /// Largest acceptable `C_up / C_low`.
    pub ceiling: f64,
}

impl Default for SandwichConfig {
    fn default() -> Self {
        SandwichConfig { c_lower: 4.0, c_upper: 8.0, ceiling: 1e4 }
    }
}

/// Two-sided Gaussian bounds for `T̃_t` against `ν(B(x,√t))^{-1} e^{-d²/ct}`.
///
/// Records `C_up = max R_up` and `C_low = min R_low` with
/// `R = T̃_t(x,y) ν(B(x,√t)) e^{d(x,y)²/(c t)}`; everything is evaluated in log
/// space.
pub fn gaussian_sandwich(dk: &DoobKernel, points: &[Vec<f64>], times: &[f64], cfg: SandwichConfig) -> Result<Certificate> {
    check_grid(times, points, cfg.ceiling)?;
    if !(cfg.c_lower > 0.0 && cfg.c_upper > 0.0) {
        return Err(Error::invalid("sandwich constants must be positive"));
    }
    let nu = dk.measure();
    let space = dk.space();
    let jobs: Vec<(f64, usize)> = times.iter().flat_map(|&t| (0..points.len()).map(move |i| (t, i))).collect();
    let rows: Vec<Result<Vec<(f64, f64)>>> = jobs
        .par_iter()
        .map(|&(t, i)| {
            let x = &points[i];
            let ln_mass = nu.ball_mass(&Ball::new(x.clone(), t.sqrt())?)?.ln();
            points
                .iter()
                .map(|y| {
                    let lk = dk.log_eval(t, x, y)?;
                    let d = space.distance(x, y)?;
                    let base = lk + ln_mass;
                    Ok((base + d * d / (cfg.c_upper * t), base + d * d / (cfg.c_lower * t)))
                })
                .collect()
        })
        .collect();
    let mut ln_up = f64::NEG_INFINITY;
    let mut ln_low = f64::INFINITY;
    let mut at_up = (0.0, 0usize, 0usize);
    let mut at_low = (0.0, 0usize, 0usize);
    for (&(t, i), row) in jobs.iter().zip(rows) {
        for (j, (u, l)) in row?.into_iter().enumerate() {
            if u > ln_up {
                ln_up = u;
                at_up = (t, i, j);
            }
            if l < ln_low || l.is_nan() {
                ln_low = l;
                at_low = (t, i, j);
            }
        }
    }
    let c_up = ln_up.exp();
    let c_low = ln_low.exp();
    let ratio = (ln_up - ln_low).exp();
    let mut cert = Certificate::new(
        format!(
            "two-sided Gaussian bound for the Doob transform of {:?} by h = {:?}, c_lower = {}, c_upper = {}",
            dk.base, dk.profile, cfg.c_lower, cfg.c_upper
        ),
        GridDescription {
            points: points.to_vec(),
            times: times.to_vec(),
            note: Some("all (x, y) pairs from the point grid, each time".into()),
        },
        cfg.ceiling,
    );
    cert.set("C_up", c_up);
    cert.set("C_low", c_low);
    cert.set("ratio", ratio);
    cert.set("c_lower", cfg.c_lower);
    cert.set("c_upper", cfg.c_upper);
    cert.set("argmax_t", at_up.0);
    cert.set("argmax_x", points[at_up.1][0]);
    cert.set("argmax_y", points[at_up.2][0]);
    cert.set("argmin_t", at_low.0);
    cert.set("argmin_x", points[at_low.1][0]);
    cert.set("argmin_y", points[at_low.2][0]);
    cert.pass = c_low > 0.0 && ratio < cfg.ceiling && c_up.is_finite();
    Ok(cert)
}

/// Fits the Hölder exponent of `y ↦ T̃_t(x,y)` near `y0`.
///
/// Offsets move `y0` along its last coordinate. Offsets outside
/// `0 < |o| < √t`, or leaving the domain, or giving a zero difference, are
/// skipped. The certificate passes when the fitted slope is at least `floor`.
pub fn holder_probe(
    dk: &DoobKernel,
    t: f64,
    x: &[f64],
    y0: &[f64],
    offsets: &[f64],
    floor: f64,
) -> Result<(f64, Certificate)> {
    const C: f64 = 8.0;
    let space = dk.space();
    let nu = dk.measure();
    let st = t.sqrt();
    let inv_mass = 1.0 / nu.ball_mass(&Ball::new(x.to_vec(), st)?)?;
    let k0 = dk.eval(t, x, y0)?;
    let mut pts = Vec::new();
    for &o in offsets {
        if !(o != 0.0 && o.abs() < st) {
            continue;
        }
        let mut y = y0.to_vec();
        *y.last_mut().unwrap() += o;
        if !space.contains(&y) {
            continue;
        }
        let d_diff = (dk.eval(t, x, &y)? - k0).abs();
        let d = space.distance(x, &y)?;
        let majorant = inv_mass * (-d * d / (C * t)).exp();
        if d_diff > 0.0 && d_diff.is_finite() && majorant > 0.0 {
            pts.push(((o.abs() / st).ln(), (d_diff / majorant).ln()));
        }
    }
    if pts.len() < 3 {
        return Err(Error::DegenerateFit(format!("{} usable offsets, need at least 3", pts.len())));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateFit("all offsets have the same magnitude".into()));
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let mut cert = Certificate::new(
        format!("empirical Hölder exponent of T̃_t(x, ·) near y0 for {:?}, h = {:?}", dk.base, dk.profile),
        GridDescription {
            points: vec![x.to_vec(), y0.to_vec()],
            times: vec![t],
            note: Some(format!("offsets {offsets:?} from y0; majorant constant c = {C}")),
        },
        floor,
    );
    cert.empirical = true;
    cert.set("delta_hat", slope);
    cert.set("usable_offsets", n);
    cert.set("floor", floor);
    cert.pass = slope >= floor;
    Ok((slope, cert))
}

/// Empirical doubling constant of `ν = μ_{h²}` against the bound `2^{n+2}`.
pub fn verify_doubling(space: &ModelSpace, profile: &HarmonicProfile) -> Result<Certificate> {
    let nu = WeightedMeasure::profile_power(space.clone(), *profile, 2.0);
    let (centers, radii) = space.standard_grid();
    let c = doubling_constant(&nu, &centers, &radii)?;
    let bound = 2f64.powf(space.dimension() + 2.0);
    let mut cert = Certificate::new(
        format!("doubling of μ_{{h²}} for h = {profile:?} on {space}"),
        GridDescription { points: centers, times: vec![], note: Some(format!("radii {radii:?}")) },
        bound,
    );
    cert.set("doubling_constant", c);
    cert.set("bound", bound);
    cert.pass = c <= bound;
    Ok(cert)
}
