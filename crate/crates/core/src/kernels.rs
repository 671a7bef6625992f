//! Closed-form heat kernels, harmonic profiles, and the kernel of `tL e^{-tL}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spaces::{Boundary, ModelSpace, WeightedMeasure};
use crate::special::ln_bessel_i_regularized;

/// A positive `L`-harmonic function, as a closed-form formula in the
/// coordinate of its model space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum HarmonicProfile {
    /// `h(x) = x`.
    Identity,
    /// `h(x) = x_n`.
    HalfSpaceNormal,
    /// `h(x) = log|x|` on the planar exterior domain.
    ExteriorLog,
    /// `h(x) = 1 - |x|^{2-n}`.
    ExteriorPower { n: u32 },
    /// `h(x) = |x|^τ`.
    InverseSquarePower { tau: f64 },
    /// `h(x) = x^{1-α}`.
    BesselPower { alpha: f64 },
    /// `h(x) = |1 - x^{1-α}|`.
    BesselExterior { alpha: f64 },
    Constant,
}

/// `τ = (√((n-2)² + 4γ) - (n-2)) / 2`.
pub fn inverse_square_tau(n: u32, gamma: f64) -> f64 {
    let m = n as f64 - 2.0;
    // rationalized to avoid cancellation for small γ
    2.0 * gamma / ((m * m + 4.0 * gamma).sqrt() + m)
}

impl HarmonicProfile {
    pub fn inverse_square(n: u32, gamma: f64) -> Self {
        HarmonicProfile::InverseSquarePower { tau: inverse_square_tau(n, gamma) }
    }

    /// The standard positive harmonic function of each model.
    pub fn natural_for(space: &ModelSpace) -> Self {
        match *space {
            ModelSpace::HalfLine { boundary: Boundary::Dirichlet, .. } => HarmonicProfile::Identity,
            ModelSpace::HalfLine { boundary: Boundary::Neumann, .. } => HarmonicProfile::Constant,
            ModelSpace::HalfSpace { .. } => HarmonicProfile::HalfSpaceNormal,
            ModelSpace::ExteriorBall { n: 2 } => HarmonicProfile::ExteriorLog,
            ModelSpace::ExteriorBall { n } => HarmonicProfile::ExteriorPower { n },
            ModelSpace::InverseSquare { n, gamma } => HarmonicProfile::inverse_square(n, gamma),
            ModelSpace::ExteriorBessel { alpha } => HarmonicProfile::BesselExterior { alpha },
        }
    }

    /// Value as a function of the space coordinate; no domain checks.
    pub fn value_of_coordinate<R: Real>(&self, c: R) -> R {
        match *self {
            HarmonicProfile::Identity | HarmonicProfile::HalfSpaceNormal => c,
            HarmonicProfile::ExteriorLog => c.ln(),
            HarmonicProfile::ExteriorPower { n } => -(R::lit(2.0 - n as f64) * c.ln()).exp_m1(),
            HarmonicProfile::InverseSquarePower { tau } => c.powf(R::lit(tau)),
            HarmonicProfile::BesselPower { alpha } => c.powf(R::lit(1.0 - alpha)),
            HarmonicProfile::BesselExterior { alpha } => (R::lit(1.0 - alpha) * c.ln()).exp_m1().abs(),
            HarmonicProfile::Constant => R::one(),
        }
    }

    /// Exponent `e` when `h(c) = c^e`.
    pub fn monomial_exponent(&self) -> Option<f64> {
        match *self {
            HarmonicProfile::Identity | HarmonicProfile::HalfSpaceNormal => Some(1.0),
            HarmonicProfile::InverseSquarePower { tau } => Some(tau),
            HarmonicProfile::BesselPower { alpha } => Some(1.0 - alpha),
            HarmonicProfile::Constant => Some(0.0),
            _ => None,
        }
    }

    pub fn compatible_with(&self, space: &ModelSpace) -> bool {
        match (*self, space) {
            (HarmonicProfile::Constant, _) => true,
            (HarmonicProfile::Identity, ModelSpace::HalfLine { .. }) => true,
            (HarmonicProfile::HalfSpaceNormal, ModelSpace::HalfSpace { .. }) => true,
            (HarmonicProfile::ExteriorLog, &ModelSpace::ExteriorBall { n: 2 }) => true,
            (HarmonicProfile::ExteriorPower { n }, &ModelSpace::ExteriorBall { n: m }) => n == m && n > 2,
            (HarmonicProfile::InverseSquarePower { .. }, ModelSpace::InverseSquare { .. }) => true,
            (HarmonicProfile::BesselPower { alpha }, &ModelSpace::HalfLine { alpha: a, .. }) => alpha == a,
            (HarmonicProfile::BesselExterior { alpha }, &ModelSpace::ExteriorBessel { alpha: a }) => alpha == a,
            _ => false,
        }
    }

    /// `h(x)` at an interior point of `space`.
    pub fn eval<R: Real>(&self, space: &ModelSpace, x: &[R]) -> Result<R> {
        if !self.compatible_with(space) {
            return Err(Error::invalid(format!("profile {self:?} does not live on {space}")));
        }
        if !space.contains(x) {
            return Err(Error::OutsideDomain(format!("{x:?}")));
        }
        let v = self.value_of_coordinate(space.coordinate(x)?);
        if !(v > R::zero() && v.is_finite()) {
            return Err(Error::OutsideDomain(format!("{x:?}: h = {v} is not positive")));
        }
        Ok(v)
    }
}

pub fn harmonic_profile(p: &HarmonicProfile, space: &ModelSpace, x: &[f64]) -> Result<f64> {
    p.eval(space, x)
}

/// A heat kernel with a closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum KernelFamily {
    /// Dirichlet Laplacian on `(0, ∞)`.
    HalfLineDirichlet,
    /// Dirichlet Laplacian on the upper half-space of `ℝⁿ`.
    HalfSpaceDirichlet { n: u32 },
    /// Neumann Bessel operator on `(0, ∞)` with measure `x^α dx`.
    BesselNeumann { alpha: f64 },
}

fn log_gauss_1d<R: Real>(t: R, u: R) -> R {
    -R::lit(0.5) * (R::lit(4.0) * R::PI() * t).ln() - u * u / (R::lit(4.0) * t)
}

/// `ln[(4πt)^{-1/2}(e^{-(x-y)²/4t} - e^{-(x+y)²/4t})]`.
fn log_dirichlet_1d<R: Real>(t: R, x: R, y: R) -> R {
    let xy = x * y;
    if xy <= R::zero() {
        return R::neg_infinity();
    }
    log_gauss_1d(t, x - y) + (-(-xy / t).exp_m1()).ln()
}

fn dirichlet_1d<R: Real>(t: R, x: R, y: R) -> R {
    if x * y <= R::zero() {
        return R::zero();
    }
    let d = x - y;
    (R::lit(4.0) * R::PI() * t).sqrt().recip() * (-d * d / (R::lit(4.0) * t)).exp() * -(-(x * y) / t).exp_m1()
}

/// `-t ∂_t` of the 1-D Dirichlet kernel.
fn dirichlet_1d_lp<R: Real>(t: R, x: R, y: R) -> R {
    if x * y <= R::zero() {
        return R::zero();
    }
    let four_t = R::lit(4.0) * t;
    let pref = (R::PI() * four_t).sqrt().recip();
    let (u1, u2) = (x - y, x + y);
    let g1 = (-u1 * u1 / four_t).exp();
    let g2 = (-u2 * u2 / four_t).exp();
    let half = R::lit(0.5);
    pref * (g1 * (half - u1 * u1 / four_t) - g2 * (half - u2 * u2 / four_t))
}

impl KernelFamily {
    pub fn for_space(space: &ModelSpace) -> Result<Self> {
        match *space {
            ModelSpace::HalfLine { alpha: 0.0, boundary: Boundary::Dirichlet } => {
                Ok(KernelFamily::HalfLineDirichlet)
            }
            ModelSpace::HalfLine { alpha, boundary: Boundary::Neumann } => Ok(KernelFamily::BesselNeumann { alpha }),
            ModelSpace::HalfSpace { n } => Ok(KernelFamily::HalfSpaceDirichlet { n }),
            _ => Err(Error::Unsupported(format!("no closed-form heat kernel on {space}"))),
        }
    }

    pub fn space(&self) -> ModelSpace {
        match *self {
            KernelFamily::HalfLineDirichlet => ModelSpace::half_line_dirichlet(),
            KernelFamily::HalfSpaceDirichlet { n } => ModelSpace::HalfSpace { n },
            KernelFamily::BesselNeumann { alpha } => ModelSpace::bessel_neumann(alpha),
        }
    }

    /// The reference measure `μ` the kernel is taken against.
    pub fn measure(&self) -> WeightedMeasure {
        WeightedMeasure::reference(self.space())
    }

    pub fn is_conservative(&self) -> bool {
        matches!(self, KernelFamily::BesselNeumann { .. })
    }

    fn check<R: Real>(&self, t: R, x: &[R], y: &[R]) -> Result<()> {
        if !(t > R::zero() && t.is_finite()) {
            return Err(Error::DomainError(format!("time t = {t} must be positive and finite")));
        }
        let space = self.space();
        for p in [x, y] {
            if !space.contains_closure(p) || p.iter().any(|v| !v.is_finite()) {
                return Err(Error::DomainError(format!("point {p:?} is not in the closed domain")));
            }
        }
        Ok(())
    }

    /// `T_t(x, y)`; boundary points give the boundary limit.
    pub fn heat_kernel<R: Real>(&self, t: R, x: &[R], y: &[R]) -> Result<R> {
        self.check(t, x, y)?;
        match *self {
            KernelFamily::HalfLineDirichlet => Ok(dirichlet_1d(t, x[0], y[0])),
            KernelFamily::HalfSpaceDirichlet { .. } => {
                let n = x.len();
                let v2: R = (0..n - 1).map(|i| (x[i] - y[i]) * (x[i] - y[i])).sum();
                let k = R::lit((n - 1) as f64);
                let tang = (R::lit(4.0) * R::PI() * t).powf(-k * R::lit(0.5)) * (-v2 / (R::lit(4.0) * t)).exp();
                Ok(tang * dirichlet_1d(t, x[n - 1], y[n - 1]))
            }
            KernelFamily::BesselNeumann { .. } => Ok(self.log_heat_kernel(t, x, y)?.exp()),
        }
    }

    /// `ln T_t(x, y)`, finite wherever the kernel is positive, even when the
    /// kernel itself underflows.
    pub fn log_heat_kernel<R: Real>(&self, t: R, x: &[R], y: &[R]) -> Result<R> {
        self.check(t, x, y)?;
        match *self {
            KernelFamily::HalfLineDirichlet => Ok(log_dirichlet_1d(t, x[0], y[0])),
            KernelFamily::HalfSpaceDirichlet { .. } => {
                let n = x.len();
                let v2: R = (0..n - 1).map(|i| (x[i] - y[i]) * (x[i] - y[i])).sum();
                let k = R::lit((n - 1) as f64);
                let tang = -k * R::lit(0.5) * (R::lit(4.0) * R::PI() * t).ln() - v2 / (R::lit(4.0) * t);
                Ok(tang + log_dirichlet_1d(t, x[n - 1], y[n - 1]))
            }
            KernelFamily::BesselNeumann { alpha } => {
                let (a, b) = (x[0], y[0]);
                let nu = R::lit((alpha - 1.0) * 0.5);
                let z = a * b / (R::lit(2.0) * t);
                Ok(-(R::lit(2.0) * t).ln() - nu * (R::lit(4.0) * t).ln() + ln_bessel_i_regularized(nu, z)
                    - (a * a + b * b) / (R::lit(4.0) * t))
            }
        }
    }

    /// `κ_t(x, y) = -t ∂_s T_s(x, y)|_{s=t}`, the kernel of `tL e^{-tL}`.
    pub fn lp_kernel<R: Real>(&self, t: R, x: &[R], y: &[R]) -> Result<R> {
        self.check(t, x, y)?;
        match *self {
            KernelFamily::HalfLineDirichlet => Ok(dirichlet_1d_lp(t, x[0], y[0])),
            KernelFamily::HalfSpaceDirichlet { .. } => {
                let n = x.len();
                let v2: R = (0..n - 1).map(|i| (x[i] - y[i]) * (x[i] - y[i])).sum();
                let k = R::lit((n - 1) as f64);
                let four_t = R::lit(4.0) * t;
                let tang = (R::PI() * four_t).powf(-k * R::lit(0.5)) * (-v2 / four_t).exp();
                let tang_lp = tang * (k * R::lit(0.5) - v2 / four_t);
                let (a, b) = (x[n - 1], y[n - 1]);
                Ok(tang_lp * dirichlet_1d(t, a, b) + tang * dirichlet_1d_lp(t, a, b))
            }
            KernelFamily::BesselNeumann { .. } => {
                let h = t * R::lit(1e-4);
                let diff = |h: R| -> Result<R> {
                    Ok((self.heat_kernel(t + h, x, y)? - self.heat_kernel(t - h, x, y)?) / (h + h))
                };
                let coarse = diff(h)?;
                let fine = diff(h * R::lit(0.5))?;
                Ok(-t * (R::lit(4.0) * fine - coarse) / R::lit(3.0))
            }
        }
    }

    /// Half-width beyond which the Gaussian factor is below `1e-14`.
    pub fn tail_radius(t: f64) -> f64 {
        (4.0 * t * 1e14f64.ln()).sqrt()
    }
}

pub fn heat_kernel(k: &KernelFamily, t: f64, x: &[f64], y: &[f64]) -> Result<f64> {
    k.heat_kernel(t, x, y)
}

pub fn lp_kernel(k: &KernelFamily, t: f64, x: &[f64], y: &[f64]) -> Result<f64> {
    k.lp_kernel(t, x, y)
}
