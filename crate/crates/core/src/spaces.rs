//! Concrete metric-measure model spaces, balls and weighted measures.
//!
//! Every model except the half-space is handled through a single coordinate:
//! the position on the half-line, or the radius for the radial models. The
//! half-space integrates in the normal coordinate against the volume of the
//! tangential slice of the ball.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::HarmonicProfile;
use crate::quadrature::{integrate, QuadConfig};
use crate::scalar::{logspace, Real};
use crate::special::ln_gamma;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Dirichlet,
    Neumann,
}

/// A concrete model space. Serialized as `{"kind": ..., "params": {...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum ModelSpace {
    /// `(0, ∞)` with `dμ = x^α dx`.
    HalfLine { alpha: f64, boundary: Boundary },
    /// `{x ∈ ℝⁿ : x_n > 0}` with Lebesgue measure.
    HalfSpace { n: u32 },
    /// `ℝⁿ \ B(0,1)`, radial coordinate `r > 1`, `dμ = r^{n-1} dr`.
    ExteriorBall { n: u32 },
    /// `ℝⁿ` for `-Δ + γ|x|^{-2}`, radial coordinate, `dμ = r^{n-1} dr`.
    InverseSquare { n: u32, gamma: f64 },
    /// `(1, ∞)` with `dμ = x^α dx`.
    ExteriorBessel { alpha: f64 },
}

impl ModelSpace {
    pub fn half_line_dirichlet() -> Self {
        ModelSpace::HalfLine { alpha: 0.0, boundary: Boundary::Dirichlet }
    }

    pub fn bessel_neumann(alpha: f64) -> Self {
        ModelSpace::HalfLine { alpha, boundary: Boundary::Neumann }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ModelSpace::HalfLine { alpha, .. } | ModelSpace::ExteriorBessel { alpha } => {
                if !(alpha > -1.0 && alpha.is_finite()) {
                    return Err(Error::invalid(format!("measure exponent α = {alpha} must be > -1")));
                }
                if matches!(self, ModelSpace::ExteriorBessel { .. }) && alpha == 1.0 {
                    return Err(Error::invalid("α = 1 is excluded for the exterior Bessel model"));
                }
            }
            ModelSpace::HalfSpace { n } | ModelSpace::ExteriorBall { n } => {
                if n < 2 {
                    return Err(Error::invalid(format!("dimension n = {n} must be ≥ 2")));
                }
            }
            ModelSpace::InverseSquare { n, gamma } => {
                if n < 3 {
                    return Err(Error::invalid(format!("dimension n = {n} must be ≥ 3")));
                }
                if !(gamma > 0.0 && gamma.is_finite()) {
                    return Err(Error::invalid(format!("γ = {gamma} must be > 0")));
                }
            }
        }
        Ok(())
    }

    pub fn description(&self) -> String {
        match *self {
            ModelSpace::HalfLine { alpha, boundary } => {
                format!("half-line (0,∞), dμ = x^{alpha} dx, {boundary:?} boundary at 0")
            }
            ModelSpace::HalfSpace { n } => format!("upper half-space of R^{n}, Lebesgue measure"),
            ModelSpace::ExteriorBall { n } => format!("exterior of the unit ball in R^{n} (radial)"),
            ModelSpace::InverseSquare { n, gamma } => {
                format!("R^{n} with inverse-square potential γ = {gamma} (radial)")
            }
            ModelSpace::ExteriorBessel { alpha } => format!("(1,∞), dμ = x^{alpha} dx"),
        }
    }

    /// Homogeneous dimension of the reference measure.
    pub fn dimension(&self) -> f64 {
        match *self {
            ModelSpace::HalfLine { alpha, .. } | ModelSpace::ExteriorBessel { alpha } => alpha + 1.0,
            ModelSpace::HalfSpace { n } | ModelSpace::ExteriorBall { n } | ModelSpace::InverseSquare { n, .. } => {
                n as f64
            }
        }
    }

    pub fn is_one_dimensional(&self) -> bool {
        !matches!(self, ModelSpace::HalfSpace { .. })
    }

    /// Left end of the coordinate range.
    pub fn lower_end(&self) -> f64 {
        match self {
            ModelSpace::ExteriorBall { .. } | ModelSpace::ExteriorBessel { .. } => 1.0,
            _ => 0.0,
        }
    }

    /// Exponent `e` of the reference density `coord^e` on the 1-D representation.
    pub fn reference_exponent(&self) -> f64 {
        match *self {
            ModelSpace::HalfLine { alpha, .. } | ModelSpace::ExteriorBessel { alpha } => alpha,
            ModelSpace::ExteriorBall { n } | ModelSpace::InverseSquare { n, .. } => (n - 1) as f64,
            ModelSpace::HalfSpace { .. } => 0.0,
        }
    }

    fn ambient_dim(&self) -> Option<usize> {
        match *self {
            ModelSpace::HalfSpace { n } | ModelSpace::ExteriorBall { n } | ModelSpace::InverseSquare { n, .. } => {
                Some(n as usize)
            }
            _ => None,
        }
    }

    /// The scalar coordinate a profile or density depends on: the position on a
    /// line, the radius for radial models, `x_n` on the half-space.
    pub fn coordinate<R: Real>(&self, x: &[R]) -> Result<R> {
        match self {
            ModelSpace::HalfSpace { n } => {
                if x.len() != *n as usize {
                    return Err(Error::invalid(format!("expected a point in R^{n}, got {} coordinates", x.len())));
                }
                Ok(x[x.len() - 1])
            }
            ModelSpace::ExteriorBall { .. } | ModelSpace::InverseSquare { .. } => match x.len() {
                1 => Ok(x[0]),
                len if Some(len) == self.ambient_dim() => Ok(x.iter().map(|&v| v * v).sum::<R>().sqrt()),
                len => Err(Error::invalid(format!("expected radius or a point in R^{:?}, got {len} coordinates", self.ambient_dim()))),
            },
            _ => {
                if x.len() != 1 {
                    return Err(Error::invalid(format!("expected a scalar point, got {} coordinates", x.len())));
                }
                Ok(x[0])
            }
        }
    }

    /// Whether `x` lies in the closure of the domain.
    pub fn contains_closure<R: Real>(&self, x: &[R]) -> bool {
        match self.coordinate(x) {
            Ok(c) => c.is_finite() && c >= R::lit(self.lower_end()),
            Err(_) => false,
        }
    }

    pub fn contains<R: Real>(&self, x: &[R]) -> bool {
        match self.coordinate(x) {
            Ok(c) => {
                let finite = x.iter().all(|v| v.is_finite());
                match self {
                    ModelSpace::InverseSquare { .. } => finite && c >= R::zero(),
                    _ => finite && c > R::lit(self.lower_end()),
                }
            }
            Err(_) => false,
        }
    }

    /// Distance to the complement of the domain; `+∞` when there is no boundary.
    pub fn distance_to_boundary<R: Real>(&self, x: &[R]) -> Result<R> {
        if !self.contains(x) {
            return Err(Error::OutsideDomain(format!("{x:?}")));
        }
        let c = self.coordinate(x)?;
        Ok(match self {
            ModelSpace::InverseSquare { .. } => R::infinity(),
            _ => c - R::lit(self.lower_end()),
        })
    }

    pub fn distance<R: Real>(&self, x: &[R], y: &[R]) -> Result<R> {
        match self {
            ModelSpace::HalfSpace { .. } => {
                if x.len() != y.len() {
                    return Err(Error::invalid("points of different dimension"));
                }
                Ok(x.iter().zip(y).map(|(&a, &b)| (a - b) * (a - b)).sum::<R>().sqrt())
            }
            _ => Ok((self.coordinate(x)? - self.coordinate(y)?).abs()),
        }
    }

    /// Log-spaced centers (distance to boundary 10^{-2}..10^{2}) and dyadic radii
    /// 2^{-10}..2^{10}: the ball family used for empirical sup/doubling checks.
    pub fn standard_grid(&self) -> (Vec<Vec<f64>>, Vec<f64>) {
        let offsets = logspace(1e-2, 1e2, 9);
        let centers = offsets
            .iter()
            .map(|&d| {
                let c = self.lower_end() + d;
                match *self {
                    ModelSpace::HalfSpace { n } => {
                        let mut p = vec![0.0; n as usize];
                        p[n as usize - 1] = c;
                        p
                    }
                    _ => vec![c],
                }
            })
            .collect();
        let radii = (-10..=10).step_by(2).map(|k| 2f64.powi(k)).collect();
        (centers, radii)
    }
}

impl fmt::Display for ModelSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.description())
    }
}

/// `B(center, radius)`; integrals always run over `B ∩ X`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ball<R = f64> {
    pub center: Vec<R>,
    pub radius: R,
}

impl<R: Real> Ball<R> {
    pub fn new(center: Vec<R>, radius: R) -> Result<Self> {
        if !(radius > R::zero() && radius.is_finite()) {
            return Err(Error::invalid(format!("ball radius {radius} must be positive and finite")));
        }
        Ok(Ball { center, radius })
    }

    pub fn interval(lo: R, hi: R) -> Result<Self> {
        let half = R::lit(0.5);
        Ball::new(vec![half * (lo + hi)], half * (hi - lo))
    }

    /// Coordinate interval `B ∩ X` on a one-dimensional model.
    pub fn coordinate_interval(&self, space: &ModelSpace) -> Result<(R, R)> {
        if !space.is_one_dimensional() {
            return Err(Error::Unsupported("coordinate interval of a half-space ball".into()));
        }
        if !space.contains_closure(&self.center) {
            return Err(Error::OutsideDomain(format!("ball center {:?}", self.center)));
        }
        let c = space.coordinate(&self.center)?;
        let lo = (c - self.radius).max(R::lit(space.lower_end()));
        Ok((lo, c + self.radius))
    }

    pub fn scaled(&self, factor: R) -> Self {
        Ball { center: self.center.clone(), radius: self.radius * factor }
    }
}

/// Density of a weighted measure relative to the reference measure μ.
#[derive(Clone)]
pub enum Density {
    /// `coord^power · h(x)^q`.
    Power { profile: HarmonicProfile, q: f64, power: f64 },
    /// Arbitrary positive function of the coordinate.
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Density::Power { profile, q, power } => {
                write!(f, "coord^{power} · {profile:?}^{q}")
            }
            Density::Custom(_) => f.write_str("custom"),
        }
    }
}

impl Density {
    pub fn one() -> Self {
        Density::Power { profile: HarmonicProfile::Constant, q: 0.0, power: 0.0 }
    }

    pub fn value<R: Real>(&self, coord: R) -> R {
        match self {
            Density::Power { profile, q, power } => {
                let mut v = if *power == 0.0 { R::one() } else { coord.powf(R::lit(*power)) };
                if *q != 0.0 {
                    v = v * profile.value_of_coordinate(coord).powf(R::lit(*q));
                }
                v
            }
            Density::Custom(f) => R::lit(f(coord.as_f64())),
        }
    }

    /// `self · other^exponent`, staying in closed form when the profiles agree.
    pub fn times(&self, other: &Density, exponent: f64) -> Density {
        if let (
            Density::Power { profile: p1, q: q1, power: e1 },
            Density::Power { profile: p2, q: q2, power: e2 },
        ) = (self, other)
        {
            let profile = if *q2 == 0.0 || exponent == 0.0 {
                Some(*p1)
            } else if *q1 == 0.0 || p1 == p2 {
                Some(*p2)
            } else {
                None
            };
            if let Some(profile) = profile {
                return Density::Power { profile, q: q1 + exponent * q2, power: e1 + exponent * e2 };
            }
        }
        let (a, b) = (self.clone(), other.clone());
        Density::Custom(Arc::new(move |c: f64| a.value(c) * b.value(c).powf(exponent)))
    }
}

/// `μ_{h^q}` and friends: the reference measure of a space times a density.
#[derive(Debug, Clone)]
pub struct WeightedMeasure {
    pub space: ModelSpace,
    pub density: Density,
}

fn quad_cfg() -> QuadConfig {
    QuadConfig { abs_tol: 0.0, rel_tol: 1e-12, max_subdivisions: 4000 }
}

/// `∫_lo^hi x^e dx`, accurate also for short intervals far from the origin.
pub fn monomial_integral<R: Real>(lo: R, hi: R, e: R) -> Result<R> {
    if hi <= lo {
        return Ok(R::zero());
    }
    let e1 = e + R::one();
    if lo == R::zero() {
        if e1 <= R::zero() {
            return Err(Error::NonFiniteMass(format!("∫_0 x^{e} dx diverges at 0")));
        }
        return Ok(hi.powf(e1) / e1);
    }
    let log_ratio = ((hi - lo) / lo).ln_1p();
    if e1 == R::zero() {
        return Ok(log_ratio);
    }
    Ok(lo.powf(e1) * (e1 * log_ratio).exp_m1() / e1)
}

impl WeightedMeasure {
    pub fn new(space: ModelSpace, density: Density) -> Self {
        WeightedMeasure { space, density }
    }

    /// The reference measure μ itself.
    pub fn reference(space: ModelSpace) -> Self {
        Self::monomial(space, 0.0)
    }

    /// `coord^power dμ`.
    pub fn monomial(space: ModelSpace, power: f64) -> Self {
        WeightedMeasure { space, density: Density::Power { profile: HarmonicProfile::Constant, q: 0.0, power } }
    }

    /// `μ_{h^q}`: density `h^q` relative to μ.
    pub fn profile_power(space: ModelSpace, profile: HarmonicProfile, q: f64) -> Self {
        WeightedMeasure { space, density: Density::Power { profile, q, power: 0.0 } }
    }

    /// Density relative to μ as a function of the coordinate.
    pub fn relative_density<R: Real>(&self, coord: R) -> R {
        self.density.value(coord)
    }

    /// `self` with its density multiplied by `extra^exponent`.
    pub fn times_density(&self, extra: &Density, exponent: f64) -> WeightedMeasure {
        WeightedMeasure { space: self.space.clone(), density: self.density.times(extra, exponent) }
    }

    /// Density against `d(coord)` on a one-dimensional model.
    pub fn line_density<R: Real>(&self, coord: R) -> R {
        let e = self.space.reference_exponent();
        let base = if e == 0.0 { R::one() } else { coord.powf(R::lit(e)) };
        base * self.relative_density(coord)
    }

    /// Total exponent when the density against `d(coord)` is a pure monomial.
    pub fn monomial_exponent(&self) -> Option<f64> {
        if !self.space.is_one_dimensional() {
            return None;
        }
        match &self.density {
            Density::Power { profile, q, power } => {
                let prof = if *q == 0.0 { Some(0.0) } else { profile.monomial_exponent() };
                prof.map(|p| self.space.reference_exponent() + power + q * p)
            }
            Density::Custom(_) => None,
        }
    }

    /// Mass of the coordinate interval `(lo, hi)` on a one-dimensional model.
    pub fn interval_mass<R: Real>(&self, lo: R, hi: R) -> Result<R> {
        let lo = lo.max(R::lit(self.space.lower_end()));
        if hi <= lo {
            return Ok(R::zero());
        }
        match self.monomial_exponent() {
            Some(e) => monomial_integral(lo, hi, R::lit(e)),
            None => self.interval_mass_quadrature(lo, hi),
        }
    }

    /// Quadrature path of [`Self::interval_mass`], regardless of closed forms.
    pub fn interval_mass_quadrature<R: Real>(&self, lo: R, hi: R) -> Result<R> {
        let lo = lo.max(R::lit(self.space.lower_end()));
        if hi <= lo {
            return Ok(R::zero());
        }
        let r = integrate(|x: R| self.line_density(x), lo, hi, quad_cfg()).map_err(|e| match e {
            Error::QuadratureFailure { .. } => Error::NonFiniteMass(format!("no convergence on ({lo}, {hi}): {e}")),
            other => other,
        })?;
        if !r.value.is_finite() {
            return Err(Error::NonFiniteMass(format!("({lo}, {hi})")));
        }
        Ok(r.value)
    }

    /// `m(B ∩ X)`.
    pub fn ball_mass<R: Real>(&self, ball: &Ball<R>) -> Result<R> {
        match self.space {
            ModelSpace::HalfSpace { n } => self.half_space_ball_mass(n, ball),
            _ => {
                let (lo, hi) = ball.coordinate_interval(&self.space)?;
                self.interval_mass(lo, hi)
            }
        }
    }

    /// Ball mass through quadrature only (used to cross-check closed forms).
    pub fn ball_mass_quadrature<R: Real>(&self, ball: &Ball<R>) -> Result<R> {
        match self.space {
            ModelSpace::HalfSpace { n } => self.half_space_ball_mass(n, ball),
            _ => {
                let (lo, hi) = ball.coordinate_interval(&self.space)?;
                self.interval_mass_quadrature(lo, hi)
            }
        }
    }

    fn half_space_ball_mass<R: Real>(&self, n: u32, ball: &Ball<R>) -> Result<R> {
        if !self.space.contains_closure(&ball.center) {
            return Err(Error::OutsideDomain(format!("ball center {:?}", ball.center)));
        }
        let cn = ball.center[n as usize - 1];
        let r = ball.radius;
        let k = R::lit((n - 1) as f64);
        // volume of the unit (n-1)-ball
        let omega = (k * R::lit(0.5) * R::PI().ln() - ln_gamma(k * R::lit(0.5) + R::one())).exp();
        let theta0 = (-(cn / r)).max(-R::one()).asin();
        let half_pi = R::FRAC_PI_2();
        // y_n = c_n + r sin θ; the slice at height y_n is an (n-1)-ball of radius r cos θ
        let integrand = |theta: R| {
            let y = cn + r * theta.sin();
            let c = theta.cos();
            if y <= R::zero() || c <= R::zero() {
                return R::zero();
            }
            self.relative_density(y) * omega * (r * c).powf(k) * r * c
        };
        let res = integrate(integrand, theta0, half_pi, quad_cfg()).map_err(|e| match e {
            Error::QuadratureFailure { .. } => Error::NonFiniteMass(format!("half-space ball: {e}")),
            other => other,
        })?;
        Ok(res.value)
    }
}

/// Largest ratio `m(B(x,2r)) / m(B(x,r))` over the grid.
pub fn doubling_constant(m: &WeightedMeasure, centers: &[Vec<f64>], radii: &[f64]) -> Result<f64> {
    if centers.is_empty() || radii.is_empty() {
        return Err(Error::invalid("doubling grid must be non-empty"));
    }
    let mut worst: f64 = 0.0;
    for c in centers {
        for &r in radii {
            let small = m.ball_mass(&Ball::new(c.clone(), r)?)?;
            let large = m.ball_mass(&Ball::new(c.clone(), 2.0 * r)?)?;
            if !(small > 0.0) {
                return Err(Error::NonFiniteMass(format!("zero mass ball at {c:?}, r = {r}")));
            }
            worst = worst.max(large / small);
        }
    }
    Ok(worst)
}

pub fn distance_to_boundary(space: &ModelSpace, x: &[f64]) -> Result<f64> {
    space.distance_to_boundary(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hl() -> ModelSpace {
        ModelSpace::half_line_dirichlet()
    }

    #[test]
    fn monomial_ball_masses() {
        let m1 = WeightedMeasure::monomial(hl(), 1.0);
        let b = Ball::interval(0.0f64, 2.0).unwrap();
        assert!((m1.ball_mass(&b).unwrap() - 2.0).abs() < 1e-14);

        let m0 = WeightedMeasure::reference(hl());
        assert!((m0.ball_mass(&Ball::interval(1.0f64, 3.0).unwrap()).unwrap() - 2.0).abs() < 1e-14);

        let m3 = WeightedMeasure::monomial(hl(), 3.0);
        for &r in &[1e-3f64, 0.7, 5.0] {
            let v = m3.ball_mass(&Ball::interval(0.0, 2.0 * r).unwrap()).unwrap();
            assert!(((v - 4.0 * r.powi(4)) / (4.0 * r.powi(4))).abs() < 1e-10);
        }
    }

    #[test]
    fn ball_is_clipped_to_domain() {
        let m = WeightedMeasure::reference(hl());
        let v: f64 = m.ball_mass(&Ball::new(vec![1.0], 3.0).unwrap()).unwrap();
        assert!((v - 4.0).abs() < 1e-14);
    }

    #[test]
    fn doubling_examples() {
        let leb = WeightedMeasure::reference(hl());
        let c = doubling_constant(&leb, &[vec![10.0]], &[0.1, 1.0]).unwrap();
        assert!((c - 2.0).abs() < 1e-12);
        let c = doubling_constant(&leb, &[vec![0.5], vec![3.0]], &[0.1, 1.0, 4.0]).unwrap();
        assert!(c <= 2.0 + 1e-12);

        // x² density, x = 1, r = 1: (1/3)·3³ over (1/3)·2³
        let sq = WeightedMeasure::monomial(hl(), 2.0);
        let expect = (27.0 / 3.0) / (8.0 / 3.0);
        let c = doubling_constant(&sq, &[vec![1.0]], &[1.0]).unwrap();
        assert!((c - expect).abs() < 1e-12);

        let c = doubling_constant(&sq, &[vec![10.0]], &[0.1]).unwrap();
        assert!((c - 2.0).abs() / 2.0 < 0.05);
    }

    #[test]
    fn boundary_distance() {
        assert_eq!(ModelSpace::HalfSpace { n: 2 }.distance_to_boundary(&[3.0, 0.5]).unwrap(), 0.5);
        let eb = ModelSpace::ExteriorBall { n: 3 };
        assert!((eb.distance_to_boundary(&[2.0f64, 0.0, 0.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!((eb.distance_to_boundary(&[2.0f64]).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(hl().distance_to_boundary(&[0.25]).unwrap(), 0.25);
        assert!(matches!(hl().distance_to_boundary(&[-1.0]), Err(Error::OutsideDomain(_))));
        assert!(ModelSpace::InverseSquare { n: 3, gamma: 2.0 }.distance_to_boundary(&[1.0f64]).unwrap().is_infinite());
    }

    #[test]
    fn half_space_ball_volume() {
        // density 1, ball far from the boundary: area of a disc
        let m = WeightedMeasure::reference(ModelSpace::HalfSpace { n: 2 });
        let v = m.ball_mass(&Ball::new(vec![0.0, 5.0], 1.0).unwrap()).unwrap();
        assert!((v - std::f64::consts::PI).abs() < 1e-10);
        // ball centered on the boundary: half disc
        let v = m.ball_mass(&Ball::new(vec![0.0, 0.0], 2.0).unwrap()).unwrap();
        assert!((v - 2.0 * std::f64::consts::PI).abs() < 1e-10);
        // n = 3 far from the boundary: 4π/3
        let m3 = WeightedMeasure::reference(ModelSpace::HalfSpace { n: 3 });
        let v = m3.ball_mass(&Ball::new(vec![0.0, 0.0, 5.0], 1.0).unwrap()).unwrap();
        assert!((v - 4.0 * std::f64::consts::PI / 3.0).abs() < 1e-10);
    }

    #[test]
    fn divergent_mass_reported() {
        let m = WeightedMeasure::monomial(hl(), -1.0);
        assert!(matches!(m.ball_mass(&Ball::interval(0.0f64, 1.0).unwrap()), Err(Error::NonFiniteMass(_))));
    }

    #[test]
    fn json_round_trip() {
        let s = ModelSpace::InverseSquare { n: 3, gamma: 2.0 };
        let j = serde_json::to_string(&s).unwrap();
        assert_eq!(j, r#"{"kind":"inverse_square","params":{"n":3,"gamma":2.0}}"#);
        let back: ModelSpace = serde_json::from_str(&j).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn invalid_spaces() {
        assert!(ModelSpace::HalfLine { alpha: -1.0, boundary: Boundary::Neumann }.validate().is_err());
        assert!(ModelSpace::HalfSpace { n: 1 }.validate().is_err());
        assert!(ModelSpace::InverseSquare { n: 2, gamma: 1.0 }.validate().is_err());
        assert!(ModelSpace::ExteriorBessel { alpha: 1.0 }.validate().is_err());
    }
}
