//! Maximal, Littlewood–Paley and Lusin functionals, weighted norms, BMO and
//! the H¹–BMO pairing.
//!
//! The semigroup acts on piecewise polynomials. For the Dirichlet kernels the
//! action is in closed form: each polynomial piece against a Gaussian reduces
//! to error functions and Gaussian moments. The Bessel kernels are integrated
//! numerically.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::atoms::Atom;
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::kernels::{HarmonicProfile, KernelFamily};
use crate::piecewise::{Piece, Piecewise};
use crate::quadrature::{gauss_legendre, integrate, QuadConfig};
use crate::scalar::{logspace, Field};
use crate::spaces::{Ball, ModelSpace, WeightedMeasure};
use crate::special::{erf, erfc};

/// `∫_α^β G_t(u) u^j du` and `∫_α^β ∂_t G_t(u) u^j du` for `j ≤ deg`, where
/// `G_t` is the 1-D Gaussian kernel.
fn gauss_moments(alpha: f64, beta: f64, t: f64, deg: usize) -> (Vec<f64>, Vec<f64>) {
    let s = 2.0 * t.sqrt();
    let norm = 1.0 / (std::f64::consts::PI * 4.0 * t).sqrt();
    let g = |u: f64| if u.is_infinite() { 0.0 } else { norm * (-u * u / (4.0 * t)).exp() };
    // [u^k G] and [u^k G'] with G' = -u G / 2t, zero where G underflows
    let bracket = |k: i32, deriv: bool| -> f64 {
        let term = |u: f64| {
            let gu = g(u);
            if gu == 0.0 {
                return 0.0;
            }
            let base = if k == 0 { gu } else { u.powi(k) * gu };
            if deriv {
                -u / (2.0 * t) * base
            } else {
                base
            }
        };
        term(beta) - term(alpha)
    };
    let (a, b) = (alpha / s, beta / s);
    let i0 = if a >= 0.0 {
        0.5 * (erfc(a) - erfc(b))
    } else if b <= 0.0 {
        0.5 * (erfc(-b) - erfc(-a))
    } else {
        0.5 * (erf(b) - erf(a))
    };
    let mut i = vec![i0];
    let mut j = vec![bracket(0, true)];
    for n in 1..=deg {
        let prev2 = if n >= 2 { i[n - 2] } else { 0.0 };
        let nf = n as f64;
        i.push(-2.0 * t * bracket(n as i32 - 1, false) + 2.0 * t * (nf - 1.0) * prev2);
        let jn = bracket(n as i32, true) - nf * (if n >= 1 { bracket(n as i32 - 1, false) } else { 0.0 })
            + nf * (nf - 1.0) * prev2;
        j.push(jn);
    }
    (i, j)
}

/// Coefficients of `P(shift + sign·u)` in powers of `u`.
fn taylor_shift(c: &[f64], shift: f64, sign: f64) -> Vec<f64> {
    let n = c.len();
    let mut out = vec![0.0; n];
    // binomial expansion of (shift + sign u)^i
    for (i, &ci) in c.iter().enumerate() {
        if ci == 0.0 {
            continue;
        }
        let mut binom = 1.0;
        for k in 0..=i {
            out[k] += ci * binom * shift.powi((i - k) as i32) * sign.powi(k as i32);
            binom = binom * (i - k) as f64 / (k + 1) as f64;
        }
    }
    out
}

/// `(∫ G_t(y - x) P(y) dy, -t ∂_t of it)` over `[a, b]`.
fn gaussian_piece(p: &Piece<f64>, x: f64, t: f64) -> (f64, f64) {
    let d = taylor_shift(&p.coeffs, x, 1.0);
    let (i, j) = gauss_moments(p.from - x, p.to - x, t, d.len().saturating_sub(1));
    let v: f64 = d.iter().zip(&i).map(|(a, b)| a * b).sum();
    let dv: f64 = d.iter().zip(&j).map(|(a, b)| a * b).sum();
    (v, -t * dv)
}

/// Dirichlet half-line action of one piece: direct minus reflected Gaussian.
fn dirichlet_piece(p: &Piece<f64>, x: f64, t: f64) -> (f64, f64) {
    let (v1, l1) = gaussian_piece(p, x, t);
    // ∫ G(x + y) P(y) dy with u = x + y, y = u - x
    let e = taylor_shift(&p.coeffs, -x, 1.0);
    let (i, j) = gauss_moments(p.from + x, p.to + x, t, e.len().saturating_sub(1));
    let v2: f64 = e.iter().zip(&i).map(|(a, b)| a * b).sum();
    let d2: f64 = e.iter().zip(&j).map(|(a, b)| a * b).sum();
    (v1 - v2, l1 + t * d2)
}

fn hat(axis: &[f64], k: usize) -> Vec<Piece<f64>> {
    let mut out = Vec::new();
    if k > 0 {
        let (a, b) = (axis[k - 1], axis[k]);
        out.push(Piece { from: a, to: b, coeffs: vec![-a / (b - a), 1.0 / (b - a)] });
    }
    if k + 1 < axis.len() {
        let (a, b) = (axis[k], axis[k + 1]);
        out.push(Piece { from: a, to: b, coeffs: vec![b / (b - a), -1.0 / (b - a)] });
    }
    out
}

#[derive(Debug, Clone)]
enum Data {
    Line(Piecewise<f64>),
    Product { axes: Vec<Vec<f64>>, values: Vec<f64> },
}

/// A function together with the semigroup acting on it.
#[derive(Debug, Clone)]
pub struct KernelAction {
    kernel: KernelFamily,
    data: Data,
}

impl KernelAction {
    pub fn new(f: Piecewise<f64>, kernel: KernelFamily) -> Result<Self> {
        if matches!(kernel, KernelFamily::HalfSpaceDirichlet { .. }) {
            return Err(Error::invalid("half-space functions need a product grid"));
        }
        if let Some((lo, _)) = f.support() {
            if lo < 0.0 {
                return Err(Error::OutsideDomain(format!("function is nonzero at {lo} < 0")));
            }
        }
        Ok(KernelAction { kernel, data: Data::Line(f) })
    }

    pub fn from_grid(f: &GridFunction, kernel: KernelFamily) -> Result<Self> {
        match kernel {
            KernelFamily::HalfSpaceDirichlet { n } => {
                if f.dim() != n as usize {
                    return Err(Error::invalid(format!("expected a grid over R^{n}, got {} axes", f.dim())));
                }
                if f.axes[n as usize - 1][0] < 0.0 {
                    return Err(Error::OutsideDomain("normal axis extends below 0".into()));
                }
                Ok(KernelAction { kernel, data: Data::Product { axes: f.axes.clone(), values: f.values.clone() } })
            }
            _ => Self::new(f.to_piecewise()?, kernel),
        }
    }

    pub fn kernel(&self) -> KernelFamily {
        self.kernel
    }

    pub fn line(&self) -> Option<&Piecewise<f64>> {
        match &self.data {
            Data::Line(p) => Some(p),
            Data::Product { .. } => None,
        }
    }

    /// Half-length of the support, the natural length scale of the function.
    pub fn scale(&self) -> f64 {
        match &self.data {
            Data::Line(p) => p.support().map(|(a, b)| 0.5 * (b - a)).unwrap_or(1.0),
            Data::Product { axes, .. } => {
                axes.iter().map(|a| 0.5 * (a[a.len() - 1] - a[0])).fold(0.0, f64::max)
            }
        }
    }

    /// Default time grid: 60 log-spaced times on `[1e-4, 1e4]·ℓ²`.
    pub fn default_times(&self) -> Vec<f64> {
        let l2 = self.scale().powi(2);
        logspace(1e-4 * l2, 1e4 * l2, 60)
    }

    /// `(T_t f(x), tL e^{-tL} f(x))`.
    pub fn eval(&self, t: f64, x: &[f64]) -> Result<(f64, f64)> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::DomainError(format!("time t = {t} must be positive and finite")));
        }
        let space = self.kernel.space();
        if !space.contains_closure(x) {
            return Err(Error::DomainError(format!("point {x:?} is not in the closed domain")));
        }
        match (&self.data, self.kernel) {
            (Data::Line(p), KernelFamily::HalfLineDirichlet) => {
                let mut acc = (0.0, 0.0);
                for pc in p.pieces() {
                    let (v, l) = dirichlet_piece(pc, x[0], t);
                    acc.0 += v;
                    acc.1 += l;
                }
                Ok(acc)
            }
            (Data::Line(p), KernelFamily::BesselNeumann { alpha }) => {
                let l = KernelFamily::tail_radius(t);
                let cfg = QuadConfig { abs_tol: 1e-300, rel_tol: 1e-10, max_subdivisions: 2000 };
                let mut acc = (0.0, 0.0);
                for pc in p.pieces() {
                    let a = pc.from.max(x[0] - l);
                    let b = pc.to.min(x[0] + l);
                    if a >= b {
                        continue;
                    }
                    let w = |y: f64| pc.eval(&y) * y.powf(alpha);
                    let v = integrate(|y: f64| self.kernel.heat_kernel(t, x, &[y]).unwrap_or(0.0) * w(y), a, b, cfg)?;
                    // the derivative term may cancel to zero, so measure it against the action
                    let dcfg = QuadConfig { abs_tol: 1e-12 * v.value.abs().max(1e-300), ..cfg };
                    let d = integrate(|y: f64| self.kernel.lp_kernel(t, x, &[y]).unwrap_or(0.0) * w(y), a, b, dcfg)?;
                    acc.0 += v.value;
                    acc.1 += d.value;
                }
                Ok(acc)
            }
            (Data::Product { axes, values }, KernelFamily::HalfSpaceDirichlet { .. }) => {
                let n = axes.len();
                // per-axis (action, -t∂_t action) of every hat function
                let factors: Vec<Vec<(f64, f64)>> = (0..n)
                    .map(|d| {
                        (0..axes[d].len())
                            .map(|k| {
                                hat(&axes[d], k).iter().fold((0.0, 0.0), |acc, pc| {
                                    let (v, l) = if d + 1 == n { dirichlet_piece(pc, x[d], t) } else { gaussian_piece(pc, x[d], t) };
                                    (acc.0 + v, acc.1 + l)
                                })
                            })
                            .collect()
                    })
                    .collect();
                let sizes: Vec<usize> = axes.iter().map(|a| a.len()).collect();
                let mut acc = (0.0, 0.0);
                for (flat, &v) in values.iter().enumerate() {
                    if v == 0.0 {
                        continue;
                    }
                    // product rule carried as a dual number
                    let mut rem = flat;
                    let mut prod = (1.0, 0.0);
                    for d in (0..n).rev() {
                        let (f, l) = factors[d][rem % sizes[d]];
                        rem /= sizes[d];
                        prod = (prod.0 * f, prod.0 * l + prod.1 * f);
                    }
                    acc.0 += v * prod.0;
                    acc.1 += v * prod.1;
                }
                Ok(acc)
            }
            _ => Err(Error::Unsupported("function layout does not match the kernel".into())),
        }
    }
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.is_empty() || times.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
        return Err(Error::invalid("time grid must be non-empty and positive"));
    }
    for w in times.windows(2) {
        if !(w[0] < w[1]) {
            return Err(Error::invalid("time grid must be strictly increasing"));
        }
    }
    Ok(())
}

/// `∫_0^∞ φ(s) ds/s`-style trapezoid in `ln s`.
fn log_trapezoid(times: &[f64], vals: &[f64]) -> f64 {
    times
        .windows(2)
        .zip(vals.windows(2))
        .map(|(t, v)| 0.5 * (v[0] + v[1]) * (t[1] / t[0]).ln())
        .sum()
}

/// `max_t |T_t f(x)|` over the time grid.
pub fn maximal(a: &KernelAction, x: &[f64], times: &[f64]) -> Result<f64> {
    check_times(times)?;
    let mut m: f64 = 0.0;
    for &t in times {
        m = m.max(a.eval(t, x)?.0.abs());
    }
    Ok(m)
}

/// `(∫_0^∞ |t²L e^{-t²L} f(x)|² dt/t)^{1/2}`; `times` are values of `s = t²`.
pub fn g_function(a: &KernelAction, x: &[f64], times: &[f64]) -> Result<f64> {
    check_times(times)?;
    let vals = times.iter().map(|&s| Ok(a.eval(s, x)?.1.powi(2))).collect::<Result<Vec<_>>>()?;
    Ok((0.5 * log_trapezoid(times, &vals)).sqrt())
}

/// Points per ball in the spatial average of the area function.
pub const AREA_NODES: usize = 16;

/// `(∬_{d(x,y)<t} |t²L e^{-t²L} f(y)|² dμ(y)/μ(B(x,t)) dt/t)^{1/2}` with cone
/// aperture 1. The spatial average uses [`AREA_NODES`]-point Gauss–Legendre on
/// `B(x,t) ∩ X`; `times` are values of `s = t²`.
pub fn area_function(a: &KernelAction, x: &[f64], times: &[f64]) -> Result<f64> {
    check_times(times)?;
    if a.line().is_none() {
        return Err(Error::Unsupported("area function on product grids".into()));
    }
    let mu = a.kernel.measure();
    let space = a.kernel.space();
    let (nodes, weights) = gauss_legendre(AREA_NODES);
    let vals = times
        .iter()
        .map(|&s| {
            let r = s.sqrt();
            let lo = (x[0] - r).max(space.lower_end());
            let hi = x[0] + r;
            let mass = mu.interval_mass(lo, hi)?;
            let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
            let mut acc = 0.0;
            for (z, w) in nodes.iter().zip(&weights) {
                let y = mid + half * z;
                acc += w * half * a.eval(s, &[y])?.1.powi(2) * mu.line_density(y);
            }
            Ok(acc / mass)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((0.5 * log_trapezoid(times, &vals)).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Functional {
    Maximal,
    G,
    S,
}

/// Output grid for L¹ norms: the support cells refined (at least twice as fine,
/// at least `min_points` points) plus geometric tails at distances
/// `ℓ·[1e-3, 1e2]` on both sides and the boundary point.
pub fn output_grid(f: &Piecewise<f64>, space: &ModelSpace, min_points: usize) -> Vec<f64> {
    let Some((lo, hi)) = f.support() else { return vec![] };
    let l = 0.5 * (hi - lo);
    let br = f.breakpoints();
    let cells = br.len().saturating_sub(1).max(1);
    let sub = 2usize.max(min_points.div_ceil(cells));
    let mut pts = Vec::new();
    for w in br.windows(2) {
        for k in 0..sub {
            pts.push(w[0] + (w[1] - w[0]) * k as f64 / sub as f64);
        }
    }
    pts.push(hi);
    let tail = logspace(1e-3, 1e2, 60);
    let floor = space.lower_end();
    pts.push(floor);
    for d in &tail {
        pts.push(hi + l * d);
        let y = lo - l * d;
        if y > floor {
            pts.push(y);
        }
    }
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    pts
}

/// `‖F f‖_{L¹(μ)}` for `F` one of the functionals, by the trapezoid rule on
/// [`output_grid`].
pub fn l1_norm(a: &KernelAction, which: Functional, times: &[f64], min_points: usize) -> Result<f64> {
    let f = a.line().ok_or_else(|| Error::Unsupported("L¹ norms on product grids".into()))?;
    let space = a.kernel.space();
    let mu = a.kernel.measure();
    let xs = output_grid(f, &space, min_points);
    if xs.is_empty() {
        return Ok(0.0);
    }
    let vals = xs
        .par_iter()
        .map(|&x| {
            let v = match which {
                Functional::Maximal => maximal(a, &[x], times)?,
                Functional::G => g_function(a, &[x], times)?,
                Functional::S => area_function(a, &[x], times)?,
            };
            Ok(v * mu.line_density(x))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(xs.windows(2).zip(vals.windows(2)).map(|(x, v)| 0.5 * (v[0] + v[1]) * (x[1] - x[0])).sum())
}

/// `(∫ |f|^p dm)^{1/p}` for a 1-D model, or a half-space product grid whose
/// density depends on the normal coordinate only.
pub fn weighted_norm(f: &GridFunction, m: &WeightedMeasure, p: f64) -> Result<f64> {
    if f.dim() == 1 {
        return weighted_norm_piecewise(&f.to_piecewise()?, m, p);
    }
    if m.space != (ModelSpace::HalfSpace { n: f.dim() as u32 }) {
        return Err(Error::invalid("product grids need a half-space measure of matching dimension"));
    }
    weighted_norm_product(f, m, p)
}

/// Exact for integer `p` and monomial densities (pieces are split at their
/// sign changes); adaptive quadrature otherwise.
pub fn weighted_norm_piecewise(f: &Piecewise<f64>, m: &WeightedMeasure, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::invalid(format!("p = {p} must be ≥ 1")));
    }
    if !m.space.is_one_dimensional() {
        return Err(Error::invalid("1-D function against a half-space measure"));
    }
    let floor = m.space.lower_end();
    if let Some((lo, _)) = f.support() {
        if lo < floor {
            return Err(Error::OutsideDomain(format!("function is nonzero at {lo}")));
        }
    }
    let exact = p.fract() == 0.0 && p <= 16.0 && f.max_degree() <= 1;
    let total = match (m.monomial_exponent(), exact) {
        (Some(e), true) => {
            let mut acc = 0.0;
            for pc in f.pieces() {
                let mut cuts = vec![pc.from];
                if pc.coeffs.len() == 2 {
                    let r = -pc.coeffs[0] / pc.coeffs[1];
                    if r > pc.from && r < pc.to {
                        cuts.push(r);
                    }
                }
                cuts.push(pc.to);
                for w in cuts.windows(2) {
                    let mid = 0.5 * (w[0] + w[1]);
                    let sign = if pc.eval(&mid) < 0.0 { -1.0 } else { 1.0 };
                    let base = Piecewise::polynomial(w[0], w[1], pc.coeffs.iter().map(|c| sign * c).collect())?;
                    let mut pow = base.clone();
                    for _ in 1..p as usize {
                        pow = pow.mul(&base);
                    }
                    acc += pow.power_integral(e)?;
                }
            }
            acc
        }
        _ => f.abs_pow_integral(p, |x| m.line_density(x))?,
    };
    Ok(total.max(0.0).powf(1.0 / p))
}

fn weighted_norm_product(f: &GridFunction, m: &WeightedMeasure, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::invalid(format!("p = {p} must be ≥ 1")));
    }
    // tensor Gauss–Legendre per cell; the interpolant is multilinear per cell
    let (nodes, weights) = gauss_legendre(8);
    let n = f.dim();
    let cells: Vec<usize> = f.axes.iter().map(|a| a.len() - 1).collect();
    let total_cells: usize = cells.iter().product();
    let per_cell = nodes.len().pow(n as u32);
    let mut acc = 0.0;
    for c in 0..total_cells {
        let mut rem = c;
        let mut idx = vec![0; n];
        for d in (0..n).rev() {
            idx[d] = rem % cells[d];
            rem /= cells[d];
        }
        for q in 0..per_cell {
            let mut r = q;
            let mut x = vec![0.0; n];
            let mut w = 1.0;
            for d in 0..n {
                let k = r % nodes.len();
                r /= nodes.len();
                let (a, b) = (f.axes[d][idx[d]], f.axes[d][idx[d] + 1]);
                x[d] = 0.5 * (a + b) + 0.5 * (b - a) * nodes[k];
                w *= 0.5 * (b - a) * weights[k];
            }
            acc += w * f.eval(&x).abs().powf(p) * m.relative_density(x[n - 1]);
        }
    }
    Ok(acc.powf(1.0 / p))
}

/// `h` restricted to `[lo, hi)` as a piecewise polynomial, when `h = x^k` with
/// integer `k`.
fn profile_piece(h: &HarmonicProfile, lo: f64, hi: f64) -> Option<Piecewise<f64>> {
    let k = h.monomial_exponent()?;
    if k.fract() != 0.0 || k < 0.0 {
        return None;
    }
    let mut c = vec![0.0; k as usize + 1];
    c[k as usize] = 1.0;
    Piecewise::polynomial(lo, hi, c).ok()
}

/// Optimal `c*` and the local BMO value of `g` on `B`.
pub fn bmo_local(g: &Piecewise<f64>, space: &ModelSpace, h: &HarmonicProfile, b: &Ball) -> Result<(f64, f64)> {
    let (lo, hi) = b.coordinate_interval(space)?;
    let e = space.reference_exponent();
    let gb = g.restrict(&lo, &hi);
    if let Some(hp) = profile_piece(h, lo, hi) {
        let h3 = hp.mul(&hp).mul(&hp).power_integral(e)?;
        if !(h3 > 0.0) {
            return Err(Error::DegenerateBall(format!("∫_B h³ dμ = {h3}")));
        }
        let c = gb.mul(&hp).mul(&hp).power_integral(e)? / h3;
        let r = gb.sub(&hp.scale(&c));
        let num = r.mul(&r).mul(&hp).power_integral(e)?;
        let den = hp.power_integral(e)?;
        return Ok((c, (num.max(0.0) / den).sqrt()));
    }
    let cfg = QuadConfig { abs_tol: 1e-300, rel_tol: 1e-12, max_subdivisions: 4000 };
    let mut br = gb.breakpoints();
    br.push(lo);
    br.push(hi);
    br.sort_by(|a, b| a.partial_cmp(b).unwrap());
    br.dedup();
    let integral = |f: &dyn Fn(f64) -> f64| -> Result<f64> {
        let mut acc = 0.0;
        for w in br.windows(2) {
            acc += integrate(|x: f64| f(x) * space_density(space, x), w[0], w[1], cfg)?.value;
        }
        Ok(acc)
    };
    let hv = |x: f64| h.value_of_coordinate(x);
    let h3 = integral(&|x| hv(x).powi(3))?;
    if !(h3 > 0.0) {
        return Err(Error::DegenerateBall(format!("∫_B h³ dμ = {h3}")));
    }
    let c = integral(&|x| gb.eval(&x) * hv(x).powi(2))? / h3;
    let num = integral(&|x| (gb.eval(&x) - c * hv(x)).powi(2) * hv(x))?;
    let den = integral(&hv)?;
    Ok((c, (num.max(0.0) / den).sqrt()))
}

fn space_density(space: &ModelSpace, x: f64) -> f64 {
    let e = space.reference_exponent();
    if e == 0.0 {
        1.0
    } else {
        x.powf(e)
    }
}

/// `(c*, value²)` for `h(x) = x` on Lebesgue `(0, ∞)`, in any field.
pub fn bmo_local_identity<T: Field>(g: &Piecewise<T>, lo: &T, hi: &T) -> Result<(T, T)> {
    let x = Piecewise::polynomial(lo.clone(), hi.clone(), vec![T::zero(), T::one()])?;
    let gb = g.restrict(lo, hi);
    let h3 = x.moment(2);
    if h3.is_zero() {
        return Err(Error::DegenerateBall("∫_B h³ dμ = 0".into()));
    }
    let c = gb.moment(2) / h3;
    let r = gb.sub(&x.scale(&c));
    let v2 = r.mul(&r).moment(1) / x.moment(0);
    Ok((c, v2))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BmoEntry {
    pub ball: Ball,
    pub c_star: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BmoValue {
    pub norm: f64,
    pub argmax: Ball,
    pub local: Vec<BmoEntry>,
    pub family: String,
    /// False when the outermost layer of the family raises the sup by more
    /// than 5%, i.e. the values keep growing with the ball scale.
    pub converged: bool,
}

pub fn bmo_norm(g: &Piecewise<f64>, space: &ModelSpace, h: &HarmonicProfile, centers: &[Vec<f64>], radii: &[f64]) -> Result<BmoValue> {
    if centers.is_empty() || radii.is_empty() {
        return Err(Error::invalid("ball family must be non-empty"));
    }
    let rmax = radii.iter().cloned().fold(0.0, f64::max);
    let cmax = centers.iter().filter_map(|c| space.coordinate(c).ok()).fold(f64::NEG_INFINITY, f64::max);
    let mut local = Vec::new();
    let mut best: Option<BmoEntry> = None;
    let mut inner: f64 = 0.0;
    for c in centers {
        for &r in radii {
            let ball = Ball::new(c.clone(), r)?;
            let (c_star, value) = bmo_local(g, space, h, &ball)?;
            let outer = r == rmax || (centers.len() > 1 && space.coordinate(c)? == cmax);
            if !outer {
                inner = inner.max(value);
            }
            let e = BmoEntry { ball, c_star, value };
            if best.as_ref().is_none_or(|b| value > b.value) {
                best = Some(e.clone());
            }
            local.push(e);
        }
    }
    let best = best.unwrap();
    let converged = best.value <= 1.05 * inner || best.value == 0.0;
    Ok(BmoValue {
        norm: best.value,
        argmax: best.ball,
        local,
        family: format!("{} centers × {} radii on {space}", centers.len(), radii.len()),
        converged,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairingReport {
    pub value: f64,
    pub bound: f64,
    pub c_star: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// `∫ a g dμ` for a validated `[μ,h]`-atom, checked against the local BMO
/// value of `g` on the atom's ball (the constant in the bound is 1).
pub fn duality_pair<T: Field>(a: &Atom<T>, g: &Piecewise<f64>, space: &ModelSpace, h: &HarmonicProfile) -> Result<PairingReport> {
    let report = a.validate_muh(space, h);
    if !report.pass {
        return Err(Error::InvalidAtom(format!("{report:?}")));
    }
    let af = a.payload.to_f64();
    let value = af.mul(g).power_integral(space.reference_exponent())?;
    let ball = a.ball_f64()?;
    let (c_star, bound) = bmo_local(g, space, h, &ball)?;
    let tolerance = 1e-6 * (1.0 + bound);
    Ok(PairingReport { value, bound, c_star, tolerance, pass: value.abs() <= bound + tolerance })
}
