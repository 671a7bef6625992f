//! Atoms on the Dirichlet half-line, their validation, the constructive
//! re-decompositions between atom families, and a greedy atomic-norm bound.
//!
//! Flavors: classical `α₁` atoms (`∫ a dx = 0`, `‖a‖₂ ≤ |B|^{-1/2}`), local
//! `α₂` atoms `|I_m|^{-1} χ_{I_m}` with `I_m = (2^m, 2^{m+1})`, and `[μ,h]`
//! atoms (`∫ a h dμ = 0`, `‖a‖_{L²(h^{-1}μ)} ≤ μ_h(B)^{-1/2}`), which for
//! `h(x) = x` on Lebesgue measure are the β-atoms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::HarmonicProfile;
use crate::piecewise::Piecewise;
use crate::quadrature::{integrate, QuadConfig};
use crate::scalar::Field;
use crate::spaces::{Ball, ModelSpace, WeightedMeasure};

/// Slack on the size condition.
pub const SIZE_SLACK: f64 = 1e-9;
/// Relative threshold on the cancellation condition in floating point.
pub const CANCEL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AtomFlavor {
    #[serde(rename = "classical_alpha1")]
    Classical,
    #[serde(rename = "local_alpha2")]
    Local { m: i32 },
    #[serde(rename = "mu_h_beta")]
    MuH,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Atom<T> {
    pub flavor: AtomFlavor,
    /// The ball `B = (lo, hi)`.
    pub lo: T,
    pub hi: T,
    pub payload: Piecewise<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub value: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub flavor: AtomFlavor,
    pub support: bool,
    pub size: Check,
    pub cancellation: Check,
    /// Cancellation was decided in exact arithmetic.
    pub exact_cancellation: bool,
    pub pass: bool,
}

/// Largest `m` with `2^m ≤ x`, for `x > 0`.
pub fn dyadic_floor<T: Field>(x: &T) -> i32 {
    let mut m = x.to_f64_lossy().log2().floor() as i32;
    while T::pow2(m) > *x {
        m -= 1;
    }
    while T::pow2(m + 1) <= *x {
        m += 1;
    }
    m
}

fn two<T: Field>() -> T {
    T::one() + T::one()
}

fn abs_integral<T: Field>(f: &Piecewise<T>) -> T {
    if f.max_degree() == 0 {
        return f.pieces().iter().fold(T::zero(), |acc, p| {
            let c = p.coeffs.first().cloned().unwrap_or_else(T::zero);
            acc + c.abs() * (p.to.clone() - p.from.clone())
        });
    }
    let v = f.to_f64().abs_pow_integral(1.0, |_| 1.0).unwrap_or(f64::NAN);
    T::from_f64_exact(v).unwrap_or_else(T::zero)
}

impl<T: Field> Atom<T> {
    pub fn new(flavor: AtomFlavor, lo: T, hi: T, payload: Piecewise<T>) -> Result<Self> {
        if !(lo < hi) || lo < T::zero() {
            return Err(Error::InvalidAtom(format!("ball ({lo:?}, {hi:?}) must satisfy 0 ≤ lo < hi")));
        }
        Ok(Atom { flavor, lo, hi, payload })
    }

    /// `|I_m|^{-1} χ_{I_m}`.
    pub fn local(m: i32) -> Self {
        let lo = T::pow2(m);
        let hi = T::pow2(m + 1);
        let payload = Piecewise::constant(lo.clone(), hi.clone(), T::pow2(-m)).unwrap();
        Atom { flavor: AtomFlavor::Local { m }, lo, hi, payload }
    }

    pub fn ball_f64(&self) -> Result<Ball> {
        Ball::interval(self.lo.to_f64_lossy(), self.hi.to_f64_lossy())
    }

    pub fn scaled(&self, c: &T) -> Self {
        Atom { payload: self.payload.scale(c), ..self.clone() }
    }

    pub fn to_f64(&self) -> Atom<f64> {
        Atom {
            flavor: self.flavor,
            lo: self.lo.to_f64_lossy(),
            hi: self.hi.to_f64_lossy(),
            payload: self.payload.to_f64(),
        }
    }

    fn support_inside(&self, floor: f64) -> bool {
        match self.payload.support() {
            None => true,
            Some((a, b)) => a >= self.lo && b <= self.hi && a.to_f64_lossy() >= floor,
        }
    }

    /// Flavor-specific validation; `space` and `h` are used by `[μ,h]` atoms.
    pub fn validate(&self, space: &ModelSpace, h: &HarmonicProfile) -> ValidationReport {
        match self.flavor {
            AtomFlavor::MuH => self.validate_muh(space, h),
            AtomFlavor::Classical => self.validate_classical(),
            AtomFlavor::Local { m } => {
                let expect = Atom::<T>::local(m);
                let ok = self.lo == expect.lo && self.hi == expect.hi && self.payload == expect.payload;
                let ok = ok || (!T::EXACT && {
                    let d = self.payload.sub(&expect.payload).to_f64();
                    abs_integral(&d) <= 1e-12 && self.lo == expect.lo && self.hi == expect.hi
                });
                let size = Check { value: self.payload.sup_abs_f64(), bound: 2f64.powi(-m), pass: ok };
                ValidationReport {
                    flavor: self.flavor,
                    support: self.support_inside(0.0),
                    cancellation: Check { value: 0.0, bound: 0.0, pass: true },
                    exact_cancellation: T::EXACT,
                    pass: ok,
                    size,
                }
            }
        }
    }

    /// `supp a ⊆ B`, `‖a‖_{L²(dx)} ≤ |B|^{-1/2}`, `∫ a dx = 0`.
    pub fn validate_classical(&self) -> ValidationReport {
        let af = self.payload.to_f64();
        let len = (self.hi.clone() - self.lo.clone()).to_f64_lossy();
        let norm = af.mul(&af).integral().max(0.0).sqrt();
        let bound = len.powf(-0.5);
        let size = Check { value: norm, bound, pass: norm <= bound * (1.0 + SIZE_SLACK) };
        let (cancellation, exact) = if T::EXACT {
            let v = self.payload.integral();
            (Check { value: v.to_f64_lossy(), bound: 0.0, pass: v.is_zero() }, true)
        } else {
            let v = af.integral();
            let thr = CANCEL_TOL * abs_integral(&af);
            (Check { value: v, bound: thr, pass: v.abs() <= thr }, false)
        };
        let support = self.support_inside(0.0);
        ValidationReport {
            flavor: self.flavor,
            support,
            pass: support && size.pass && cancellation.pass,
            size,
            cancellation,
            exact_cancellation: exact,
        }
    }

    /// `supp a ⊆ B`, `‖a‖_{L²(h^{-1}μ)} ≤ μ_h(B)^{-1/2}`, `∫ a h dμ = 0`.
    pub fn validate_muh(&self, space: &ModelSpace, h: &HarmonicProfile) -> ValidationReport {
        let af = self.payload.to_f64();
        let (lo, hi) = (self.lo.to_f64_lossy(), self.hi.to_f64_lossy());
        let e = space.reference_exponent();
        let hk = h.monomial_exponent();
        let support = self.support_inside(space.lower_end()) && space.is_one_dimensional();
        let mu_h = WeightedMeasure::profile_power(space.clone(), *h, 1.0).interval_mass(lo, hi);
        let sq = af.mul(&af);
        let size_sq = match hk {
            Some(k) => sq.power_integral(e - k),
            None => sq.abs_pow_integral(1.0, |x| space_density(space, x) / h.value_of_coordinate(x)),
        };
        let size = match (size_sq, mu_h) {
            (Ok(s), Ok(m)) if m > 0.0 => {
                let (v, b) = (s.max(0.0).sqrt(), m.powf(-0.5));
                Check { value: v, bound: b, pass: v <= b * (1.0 + SIZE_SLACK) }
            }
            (s, m) => Check { value: s.unwrap_or(f64::INFINITY), bound: m.map(|m| m.powf(-0.5)).unwrap_or(0.0), pass: false },
        };
        let integer_moment = hk.map(|k| k + e).filter(|p| p.fract() == 0.0 && *p >= 0.0);
        let (cancellation, exact) = match integer_moment {
            Some(p) if T::EXACT => {
                let v = self.payload.moment(p as u32);
                (Check { value: v.to_f64_lossy(), bound: 0.0, pass: v.is_zero() }, true)
            }
            _ => {
                let v = match hk {
                    Some(k) => af.power_integral(e + k).unwrap_or(f64::NAN),
                    None => quad_pieces(&af, |x| space_density(space, x) * h.value_of_coordinate(x)),
                };
                let l1 = af.abs_pow_integral(1.0, |x| space_density(space, x)).unwrap_or(f64::NAN);
                let sup_h = h.value_of_coordinate(lo).max(h.value_of_coordinate(hi));
                let thr = CANCEL_TOL * l1 * sup_h;
                (Check { value: v, bound: thr, pass: v.abs() <= thr }, false)
            }
        };
        ValidationReport {
            flavor: self.flavor,
            support,
            pass: support && size.pass && cancellation.pass,
            size,
            cancellation,
            exact_cancellation: exact,
        }
    }

    /// `‖a‖ / bound` for the flavor's size condition (1 for local atoms).
    pub fn size_ratio(&self) -> f64 {
        let r = match self.flavor {
            AtomFlavor::Local { .. } => return 1.0,
            AtomFlavor::Classical => self.validate_classical(),
            AtomFlavor::MuH => self.validate_muh(&ModelSpace::half_line_dirichlet(), &HarmonicProfile::Identity),
        };
        r.size.value / r.size.bound
    }
}

trait SupAbs {
    fn sup_abs_f64(&self) -> f64;
}

impl<T: Field> SupAbs for Piecewise<T> {
    fn sup_abs_f64(&self) -> f64 {
        self.to_f64().sup_abs()
    }
}

fn space_density(space: &ModelSpace, x: f64) -> f64 {
    let e = space.reference_exponent();
    if e == 0.0 {
        1.0
    } else {
        x.powf(e)
    }
}

fn quad_pieces(f: &Piecewise<f64>, w: impl Fn(f64) -> f64) -> f64 {
    let cfg = QuadConfig { abs_tol: 1e-300, rel_tol: 1e-12, max_subdivisions: 4000 };
    f.pieces()
        .iter()
        .map(|p| integrate(|x: f64| p.eval(&x) * w(x), p.from, p.to, cfg).map(|r| r.value).unwrap_or(f64::NAN))
        .sum()
}

#[derive(Serialize, Deserialize)]
struct BallJson {
    center: serde_json::Value,
    radius: serde_json::Value,
}

#[derive(Serialize, Deserialize)]
struct AtomJson<P> {
    flavor: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    m: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ball: Option<BallJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pieces: Option<P>,
}

fn text<T: Field>(v: &T) -> serde_json::Value {
    serde_json::Value::String(v.to_text())
}

fn parse_value<T: Field>(v: &serde_json::Value) -> Result<T> {
    let s = match v {
        serde_json::Value::String(s) => s.clone(),
        serde_json::Value::Number(n) => n.to_string(),
        other => return Err(Error::invalid(format!("expected a number, got {other}"))),
    };
    T::from_text(&s).ok_or_else(|| Error::invalid(format!("bad number {s:?}")))
}

impl<T: Field> Atom<T> {
    /// `{flavor, ball: {center, radius}, pieces: [{from, to, value}]}`.
    pub fn to_json(&self) -> serde_json::Value {
        let (flavor, m) = match self.flavor {
            AtomFlavor::Classical => ("classical_alpha1", None),
            AtomFlavor::Local { m } => ("local_alpha2", Some(m)),
            AtomFlavor::MuH => ("mu_h_beta", None),
        };
        let half = T::one() / two::<T>();
        let center = (self.lo.clone() + self.hi.clone()) * half.clone();
        let radius = (self.hi.clone() - self.lo.clone()) * half;
        serde_json::to_value(AtomJson {
            flavor: flavor.into(),
            m,
            ball: Some(BallJson { center: text(&center), radius: text(&radius) }),
            pieces: Some(&self.payload),
        })
        .expect("atom serializes")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let raw: AtomJson<Piecewise<T>> =
            serde_json::from_value(v.clone()).map_err(|e| Error::invalid(format!("atom JSON: {e}")))?;
        let flavor = match (raw.flavor.as_str(), raw.m) {
            ("classical_alpha1" | "classical" | "alpha1", _) => AtomFlavor::Classical,
            ("mu_h_beta" | "mu_h" | "beta", _) => AtomFlavor::MuH,
            ("local_alpha2" | "local" | "alpha2", Some(m)) => AtomFlavor::Local { m },
            ("local_alpha2" | "local" | "alpha2", None) => return Err(Error::invalid("local atoms need `m`")),
            (other, _) => return Err(Error::invalid(format!("unknown atom flavor {other:?}"))),
        };
        if let (AtomFlavor::Local { m }, None) = (flavor, &raw.pieces) {
            return Ok(Atom::local(m));
        }
        let payload = raw.pieces.ok_or_else(|| Error::invalid("atom needs `pieces`"))?;
        let (lo, hi) = match raw.ball {
            Some(b) => {
                let c: T = parse_value(&b.center)?;
                let r: T = parse_value(&b.radius)?;
                (c.clone() - r.clone(), c + r)
            }
            None => payload.support().ok_or_else(|| Error::invalid("zero atom needs an explicit ball"))?,
        };
        Atom::new(flavor, lo, hi, payload)
    }
}

/// `f = Σ λ_k a_k` with the bookkeeping of the construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition<T> {
    pub mode: String,
    pub input: Atom<T>,
    pub coefficients: Vec<T>,
    pub atoms: Vec<Atom<T>>,
    pub truncation: Option<usize>,
    /// Mass of what the truncated series leaves behind before the terminal
    /// local atom absorbs it.
    pub residual_mass: T,
    /// `∫ |f - Σ λ_k a_k|`; zero for every construction here.
    pub reconstruction_error: T,
    pub taus: Vec<T>,
    pub chain: Vec<(T, T)>,
}

impl<T: Field> Decomposition<T> {
    pub fn sum_abs(&self) -> T {
        self.coefficients.iter().fold(T::zero(), |acc, c| acc + c.abs())
    }

    pub fn reconstruct(&self) -> Piecewise<T> {
        self.coefficients
            .iter()
            .zip(&self.atoms)
            .fold(Piecewise::zero(), |acc, (c, a)| acc.add(&a.payload.scale(c)))
    }

    /// Smallest `C ≥ 1` such that every emitted atom divided by `C` satisfies
    /// its size condition.
    pub fn normalization(&self) -> f64 {
        self.atoms.iter().map(|a| a.size_ratio()).fold(1.0, f64::max)
    }

    /// `C · Σ|λ_k|`.
    pub fn constant(&self) -> f64 {
        self.normalization() * self.sum_abs().to_f64_lossy()
    }

    /// Every emitted atom validates, after dividing the non-local ones by the
    /// normalization.
    pub fn atoms_valid(&self) -> bool {
        let c = self.normalization();
        let inv = T::from_f64_exact(1.0 / c).unwrap_or_else(T::one);
        let space = ModelSpace::half_line_dirichlet();
        self.atoms.iter().all(|a| {
            let a = match a.flavor {
                AtomFlavor::Local { .. } => a.clone(),
                _ => a.scaled(&inv),
            };
            a.validate(&space, &HarmonicProfile::Identity).pass
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "mode": self.mode,
            "input": self.input.to_json(),
            "coefficients": self.coefficients.iter().map(text).collect::<Vec<_>>(),
            "atoms": self.atoms.iter().map(|a| a.to_json()).collect::<Vec<_>>(),
            "truncation": self.truncation,
            "residual_mass": text(&self.residual_mass),
            "reconstruction_error": text(&self.reconstruction_error),
            "sum_abs": text(&self.sum_abs()),
            "sum_abs_f64": self.sum_abs().to_f64_lossy(),
            "normalization": self.normalization(),
            "constant": self.constant(),
            "atoms_valid_after_normalization": self.atoms_valid(),
            "taus": self.taus.iter().map(text).collect::<Vec<_>>(),
            "chain": self.chain.iter().map(|(a, b)| vec![text(a), text(b)]).collect::<Vec<_>>(),
        })
    }

    fn finish(mut self) -> Self {
        let diff = self.input.payload.sub(&self.reconstruct());
        self.reconstruction_error = abs_integral(&diff);
        self
    }
}

/// Re-expands `|I_m|^{-1} χ_{I_m}` into β-atoms: for `k < K`,
/// `2^{-k} b_k = τ_k χ_{I_{m+k}} - τ_{k+1} χ_{I_{m+k+1}}` with `τ_k = 2^{-m} 4^{-k}`;
/// the remainder `τ_K χ_{I_{m+K}}` is the local atom at level `m+K` with
/// coefficient `2^{-K}`.
pub fn decompose_local<T: Field>(m: i32, k_max: usize) -> Result<Decomposition<T>> {
    if k_max < 1 {
        return Err(Error::invalid("truncation K must be at least 1"));
    }
    let tau = |k: usize| T::pow2(-m - 2 * k as i32);
    let interval = |j: i32| (T::pow2(j), T::pow2(j + 1));
    let mut coefficients = Vec::with_capacity(k_max + 1);
    let mut atoms = Vec::with_capacity(k_max + 1);
    for k in 0..k_max {
        let (a, b) = interval(m + k as i32);
        let (_, c) = interval(m + k as i32 + 1);
        let scale = T::pow2(k as i32);
        let payload = Piecewise::step(&[a.clone(), b, c.clone()], &[scale.clone() * tau(k), -(scale * tau(k + 1))])?;
        atoms.push(Atom::new(AtomFlavor::MuH, a, c, payload)?);
        coefficients.push(T::pow2(-(k as i32)));
    }
    atoms.push(Atom::local(m + k_max as i32));
    coefficients.push(T::pow2(-(k_max as i32)));
    let (a, b) = interval(m + k_max as i32);
    let residual_mass = tau(k_max) * (b - a);
    Ok(Decomposition {
        mode: "local".into(),
        input: Atom::local(m),
        coefficients,
        atoms,
        truncation: Some(k_max),
        residual_mass,
        reconstruction_error: T::zero(),
        taus: (0..=k_max).map(tau).collect(),
        chain: (0..=k_max as i32).map(|k| interval(m + k)).collect(),
    }
    .finish())
}

/// The terminal interval `J` for a ball: `I_m` when `B ⊆ I_m`, or
/// `I_m ∪ I_{m+1}` when `B` straddles `2^{m+1}`.
fn terminal_interval<T: Field>(lo: &T, hi: &T) -> Result<(i32, bool)> {
    if *lo <= T::zero() {
        return Err(Error::UnsupportedGeometry("ball touches 0, so it lies in no dyadic interval".into()));
    }
    let m = dyadic_floor(lo);
    if *hi <= T::pow2(m + 1) {
        Ok((m, false))
    } else if *hi <= T::pow2(m + 2) {
        Ok((m, true))
    } else {
        Err(Error::UnsupportedGeometry(format!(
            "ball ({lo:?}, {hi:?}) is not inside one dyadic interval or two adjacent ones"
        )))
    }
}

/// `B = Q_0 ⊆ Q_1 ⊆ … ⊆ Q_N = J`, each `Q_{k+1}` the double of `Q_k`'s
/// window about the center of `B`, clipped to `J`.
fn doubling_chain<T: Field>(lo: &T, hi: &T, j_lo: &T, j_hi: &T) -> Vec<(T, T)> {
    let half = T::one() / two::<T>();
    let c = (lo.clone() + hi.clone()) * half.clone();
    let mut r = (hi.clone() - lo.clone()) * half;
    let mut chain = vec![(lo.clone(), hi.clone())];
    while chain.last().unwrap() != &(j_lo.clone(), j_hi.clone()) {
        r = r * two::<T>();
        let a = if c.clone() - r.clone() > *j_lo { c.clone() - r.clone() } else { j_lo.clone() };
        let b = if c.clone() + r.clone() < *j_hi { c.clone() + r.clone() } else { j_hi.clone() };
        chain.push((a, b));
    }
    chain
}

fn indicator<T: Field>(q: &(T, T), v: T) -> Piecewise<T> {
    Piecewise::constant(q.0.clone(), q.1.clone(), v).unwrap_or_default()
}

/// Moments used by the two mirrored constructions.
#[derive(Clone, Copy)]
enum Target {
    /// Blocks cancel against `x` (β-atoms); the input cancels against 1.
    Beta,
    /// Blocks cancel against 1 (classical atoms); the input cancels against `x`.
    Classical,
}

fn chain_decomposition<T: Field>(a: &Atom<T>, target: Target, mode: &str) -> Result<Decomposition<T>> {
    let (m, straddle) = terminal_interval(&a.lo, &a.hi)?;
    let j_lo = T::pow2(m);
    let j_hi = T::pow2(if straddle { m + 2 } else { m + 1 });
    let moment = |q: &(T, T)| -> T {
        match target {
            Target::Beta => (q.1.powi(2) - q.0.powi(2)) / two::<T>(),
            Target::Classical => q.1.clone() - q.0.clone(),
        }
    };
    let flavor = match target {
        Target::Beta => AtomFlavor::MuH,
        Target::Classical => AtomFlavor::Classical,
    };
    let f_moment = match target {
        Target::Beta => a.payload.moment(1),
        Target::Classical => a.payload.moment(0),
    };
    let b0 = (a.lo.clone(), a.hi.clone());
    let tau0 = f_moment / moment(&b0);
    if tau0.is_zero() {
        // already cancels against both: the atom is its own decomposition
        let atom = Atom { flavor, ..a.clone() };
        return Ok(Decomposition {
            mode: mode.into(),
            input: a.clone(),
            coefficients: vec![T::one()],
            atoms: vec![atom],
            truncation: None,
            residual_mass: T::zero(),
            reconstruction_error: T::zero(),
            taus: vec![T::zero()],
            chain: vec![b0],
        }
        .finish());
    }
    let chain = doubling_chain(&a.lo, &a.hi, &j_lo, &j_hi);
    let mut taus = vec![tau0];
    for k in 1..chain.len() {
        let t = taus[k - 1].clone() * moment(&chain[k - 1]) / moment(&chain[k]);
        taus.push(t);
    }
    let blen = a.hi.clone() - a.lo.clone();
    let lambda = |k: usize| T::pow2(k as i32 - m) * blen.clone();
    let mut coefficients = Vec::new();
    let mut atoms = Vec::new();
    for k in 0..chain.len() {
        let block = if k == 0 {
            a.payload.sub(&indicator(&chain[0], taus[0].clone()))
        } else {
            indicator(&chain[k - 1], taus[k - 1].clone()).sub(&indicator(&chain[k], taus[k].clone()))
        };
        let l = lambda(k);
        let atom = Atom::new(flavor, chain[k].0.clone(), chain[k].1.clone(), block.scale(&(T::one() / l.clone())))?;
        coefficients.push(l);
        atoms.push(atom);
    }
    // τ_N χ_J as local atoms
    let tau_n = taus.last().unwrap().clone();
    coefficients.push(tau_n.clone() * T::pow2(m));
    atoms.push(Atom::local(m));
    if straddle {
        coefficients.push(tau_n.clone() * T::pow2(m + 1));
        atoms.push(Atom::local(m + 1));
    }
    Ok(Decomposition {
        mode: mode.into(),
        input: a.clone(),
        coefficients,
        atoms,
        truncation: None,
        residual_mass: tau_n.abs() * (j_hi - j_lo),
        reconstruction_error: T::zero(),
        taus,
        chain,
    }
    .finish())
}

/// Classical atom inside `I_m` (or straddling two adjacent dyadic intervals)
/// into β-atoms plus terminal local atoms.
pub fn decompose_classical<T: Field>(a: &Atom<T>) -> Result<Decomposition<T>> {
    let r = a.validate_classical();
    if !r.pass {
        return Err(Error::InvalidAtom(format!("not a classical atom: {r:?}")));
    }
    chain_decomposition(a, Target::Beta, "classical")
}

/// β-atom into classical atoms plus terminal local atoms.
pub fn decompose_beta<T: Field>(b: &Atom<T>) -> Result<Decomposition<T>> {
    let r = b.validate_muh(&ModelSpace::half_line_dirichlet(), &HarmonicProfile::Identity);
    if !r.pass {
        return Err(Error::InvalidAtom(format!("not a β-atom: {r:?}")));
    }
    chain_decomposition(b, Target::Classical, "beta")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomicBound {
    /// `Σ |λ_k|` of the constructed decomposition.
    pub bound: f64,
    /// `(ball, λ)` of every block; block / λ is a `[μ,h]`-atom.
    pub blocks: Vec<(Ball, f64)>,
    pub residual: f64,
    pub components: usize,
}

/// Greedy `[μ,h]`-atomic decomposition of a compactly supported piecewise
/// polynomial on a 1-D model, returning an upper bound for its atomic norm.
///
/// Each connected component of the support is treated separately. Along a
/// chain of growing intervals `Q_0 ⊆ Q_1 ⊆ …` (the support hull, symmetric
/// doublings up to the enclosing dyadic interval, then `(2^m, 2^{m+j})`) the
/// blocks `c_{k-1} h χ_{Q_{k-1}} - c_k h χ_{Q_k}` cancel against `h`; the
/// remainder `c_K h χ_{Q_K}` must fall below `tol` within `max_levels`.
pub fn atomic_norm_upper(f: &Piecewise<f64>, space: &ModelSpace, h: &HarmonicProfile, tol: f64, max_levels: usize) -> Result<AtomicBound> {
    if !space.is_one_dimensional() {
        return Err(Error::Unsupported("atomic bounds on the half-space".into()));
    }
    let e = space.reference_exponent();
    let hq = |q: f64| WeightedMeasure::profile_power(space.clone(), *h, q);
    let (mu_h, mu_h2) = (hq(1.0), hq(2.0));
    let dens = |x: f64| space_density(space, x);
    let integrate_h = |g: &Piecewise<f64>| -> Result<f64> {
        match h.monomial_exponent() {
            Some(k) => g.power_integral(e + k),
            None => Ok(quad_pieces(g, |x| dens(x) * h.value_of_coordinate(x))),
        }
    };
    let size = |g: &Piecewise<f64>, q: &(f64, f64)| -> Result<f64> {
        let sq = g.mul(g);
        let s = match h.monomial_exponent() {
            Some(k) => sq.power_integral(e - k)?,
            None => sq.abs_pow_integral(1.0, |x| dens(x) / h.value_of_coordinate(x))?,
        };
        Ok((s.max(0.0) * mu_h.interval_mass(q.0, q.1)?).sqrt())
    };
    let l1 = f.abs_pow_integral(1.0, dens)?;
    let mut blocks = Vec::new();
    let mut bound = 0.0;
    let mut worst_residual: f64 = 0.0;
    let comps = f.components();
    for (lo, hi) in &comps {
        let g = f.restrict(lo, hi);
        let mut chain: Vec<(f64, f64)> = if *lo > 0.0 {
            let m = dyadic_floor(lo);
            let mut top = m + 1;
            while 2f64.powi(top) < *hi {
                top += 1;
            }
            let mut c = doubling_chain(lo, hi, &2f64.powi(m), &2f64.powi(top));
            for j in 1..=max_levels {
                c.push((2f64.powi(m), 2f64.powi(top + j as i32)));
            }
            c
        } else {
            (0..=max_levels).map(|j| (0.0, hi * 2f64.powi(j as i32))).collect()
        };
        chain.dedup();
        let moment_h2 = |q: &(f64, f64)| mu_h2.interval_mass(q.0, q.1);
        let hpiece = |q: &(f64, f64), c: f64| -> Result<Piecewise<f64>> {
            match h.monomial_exponent().filter(|k| k.fract() == 0.0 && *k >= 0.0) {
                Some(k) => {
                    let mut co = vec![0.0; k as usize + 1];
                    co[k as usize] = c;
                    Piecewise::polynomial(q.0, q.1, co)
                }
                None => Err(Error::Unsupported("greedy blocks need an integer power profile".into())),
            }
        };
        let mut c = integrate_h(&g)? / moment_h2(&chain[0])?;
        let mut done = false;
        for k in 0..chain.len() {
            let block = if k == 0 {
                g.sub(&hpiece(&chain[0], c)?)
            } else {
                let next = c * moment_h2(&chain[k - 1])? / moment_h2(&chain[k])?;
                let b = hpiece(&chain[k - 1], c)?.sub(&hpiece(&chain[k], next)?);
                c = next;
                b
            };
            let lam = size(&block, &chain[k])?;
            if lam > 0.0 {
                bound += lam;
                blocks.push((Ball::interval(chain[k].0, chain[k].1)?, lam));
            }
            let residual = c.abs() * mu_h.interval_mass(chain[k].0, chain[k].1)?;
            if residual <= tol * (1.0 + l1) {
                worst_residual = worst_residual.max(residual);
                done = true;
                break;
            }
        }
        if !done {
            return Err(Error::NotDecomposable(format!("remainder on ({lo}, {hi}) above {tol} after {max_levels} levels")));
        }
    }
    Ok(AtomicBound { bound, blocks, residual: worst_residual, components: comps.len() })
}

/// Builds an atom with `∫ a x dx = 0` on `(lo, hi)` from step values; the last
/// value is solved for and the whole is scaled onto the β size bound times
/// `fill ≤ 1` (a rational just below the float bound).
pub fn beta_atom_from_steps(breaks: &[crate::Rational], values: &[crate::Rational], fill: f64) -> Result<Atom<crate::Rational>> {
    type Q = crate::Rational;
    if breaks.len() != values.len() + 2 {
        return Err(Error::invalid("need one free value less than cells"));
    }
    let n = breaks.len() - 1;
    let mom = |i: usize| (breaks[i + 1].powi(2) - breaks[i].powi(2)) / Q::ratio(2, 1);
    let partial: Q = values.iter().enumerate().fold(Q::zero(), |acc, (i, v)| acc + v.clone() * mom(i));
    let last = -partial / mom(n - 1);
    let mut vals = values.to_vec();
    vals.push(last);
    let payload = Piecewise::step(breaks, &vals)?;
    let atom = Atom::new(AtomFlavor::MuH, breaks[0].clone(), breaks[n].clone(), payload)?;
    let r = atom.validate_muh(&ModelSpace::half_line_dirichlet(), &HarmonicProfile::Identity);
    if r.size.value == 0.0 {
        return Ok(atom);
    }
    let s = Q::from_f64_exact(fill * r.size.bound / r.size.value * (1.0 - 1e-12)).unwrap();
    Ok(atom.scaled(&s))
}

use num_traits::Zero as _;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::piecewise::Piece;
    use crate::Rational as Q;
    use num_traits::Signed;

    fn q(n: i64, d: i64) -> Q {
        Q::ratio(n, d)
    }

    fn hl() -> ModelSpace {
        ModelSpace::half_line_dirichlet()
    }

    #[test]
    fn validation_example() {
        let a = Atom::new(
            AtomFlavor::MuH,
            q(0, 1),
            q(2, 1),
            Piecewise::new(vec![
                Piece { from: q(0, 1), to: q(1, 1), coeffs: vec![q(0, 1), q(1, 1)] },
                Piece { from: q(1, 1), to: q(2, 1), coeffs: vec![q(0, 1), q(-1, 7)] },
            ])
            .unwrap(),
        )
        .unwrap();
        let r = a.validate(&hl(), &HarmonicProfile::Identity);
        assert!(r.support && r.cancellation.pass && r.exact_cancellation);
        assert!(!r.size.pass);
        assert!((r.size.value - 0.7284).abs() < 1e-4);
        assert!((r.size.bound - 0.5f64.sqrt()).abs() < 1e-15);
        let s = Q::from_f64_exact(r.size.bound / r.size.value).unwrap();
        assert!(a.scaled(&s).validate(&hl(), &HarmonicProfile::Identity).pass);
        let zero = Atom::new(AtomFlavor::MuH, q(1, 1), q(2, 1), Piecewise::zero()).unwrap();
        assert!(zero.validate(&hl(), &HarmonicProfile::Identity).pass);
    }

    #[test]
    fn local_decomposition() {
        let d = decompose_local::<Q>(0, 40).unwrap();
        assert_eq!(d.residual_mass, Q::pow2(-40));
        assert_eq!(d.sum_abs(), q(2, 1) - Q::pow2(-40));
        assert!(d.reconstruction_error.is_zero());
        let rec = d.reconstruct();
        assert_eq!(rec.restrict(&q(1, 1), &q(2, 1)), Piecewise::constant(q(1, 1), q(2, 1), q(1, 1)).unwrap());
        for b in &d.atoms[..40] {
            assert!(b.payload.moment(1).is_zero());
        }
        let b0 = &d.atoms[0].payload;
        assert_eq!(b0.restrict(&q(1, 1), &q(2, 1)).moment(1), q(3, 2));
        assert!(d.atoms_valid());
        let c = d.normalization();
        assert!((c - (7.5 * 17.0 / 16.0 * 2f64.ln()).sqrt()).abs() < 1e-9, "{c}");
        // floating twin
        let df = decompose_local::<f64>(3, 10).unwrap();
        assert_eq!(df.reconstruction_error, 0.0);
        assert!((df.sum_abs() - (2.0 - 2f64.powi(-10))).abs() < 1e-15);
    }

    #[test]
    fn classical_decomposition() {
        // Haar atom on (1, 5/4): ±|B|^{-1}
        let b = (q(1, 1), q(5, 4));
        let mid = q(9, 8);
        let a = Atom::new(
            AtomFlavor::Classical,
            b.0.clone(),
            b.1.clone(),
            Piecewise::step(&[b.0.clone(), mid, b.1.clone()], &[q(4, 1), q(-4, 1)]).unwrap(),
        )
        .unwrap();
        assert!(a.validate_classical().pass);
        let d = decompose_classical(&a).unwrap();
        assert!(d.reconstruction_error.is_zero());
        assert!(d.taus[0].abs() <= q(1, 1));
        for w in d.taus.windows(2) {
            assert!(w[1].abs() <= w[0].abs());
        }
        for w in d.chain.windows(2) {
            assert!((w[1].1.clone() - w[1].0.clone()) <= (w[0].1.clone() - w[0].0.clone()) * q(2, 1));
        }
        assert_eq!(d.chain.last().unwrap(), &(q(1, 1), q(2, 1)));
        assert!(d.atoms_valid());
        for at in &d.atoms[..d.atoms.len() - 1] {
            assert!(at.payload.moment(1).is_zero());
        }
    }

    #[test]
    fn classical_on_whole_interval() {
        let a = Atom::new(
            AtomFlavor::Classical,
            q(2, 1),
            q(4, 1),
            Piecewise::step(&[q(2, 1), q(3, 1), q(4, 1)], &[q(1, 2), q(-1, 2)]).unwrap(),
        )
        .unwrap();
        let d = decompose_classical(&a).unwrap();
        assert_eq!(d.chain.len(), 1);
        assert_eq!(d.atoms.len(), 2);
        assert!(d.reconstruction_error.is_zero());
    }

    #[test]
    fn beta_decomposition() {
        let c = q(1, 2);
        let b = Atom::new(
            AtomFlavor::MuH,
            q(1, 1),
            q(3, 1),
            Piecewise::step(&[q(1, 1), q(2, 1), q(3, 1)], &[c.clone(), -c * q(3, 5)]).unwrap(),
        )
        .unwrap();
        assert!(b.validate_muh(&hl(), &HarmonicProfile::Identity).pass);
        let d = decompose_beta(&b).unwrap();
        assert!(d.reconstruction_error.is_zero());
        assert!(d.sum_abs().to_f64_lossy() <= d.constant());
        assert!(d.atoms_valid());
        for a in &d.atoms {
            if a.flavor == AtomFlavor::Classical {
                assert!(a.payload.integral().is_zero());
            }
        }
    }

    #[test]
    fn beta_that_is_classical() {
        // cancels against 1 and x
        let br = [q(1, 1), q(5, 4), q(3, 2), q(7, 4), q(2, 1)];
        let p = Piecewise::step(&br, &[q(1, 2), q(-1, 2), q(-1, 2), q(1, 2)]).unwrap();
        assert!(p.integral().is_zero() && p.moment(1).is_zero());
        let b = Atom::new(AtomFlavor::MuH, q(1, 1), q(2, 1), p).unwrap();
        let d = decompose_beta(&b).unwrap();
        assert_eq!(d.atoms.len(), 1);
        assert_eq!(d.coefficients, vec![q(1, 1)]);
        let zero = Atom::new(AtomFlavor::MuH, q(1, 1), q(2, 1), Piecewise::zero()).unwrap();
        let d = decompose_beta(&zero).unwrap();
        assert_eq!(d.atoms.len(), 1);
        assert!(d.atoms[0].payload.is_zero());
    }

    #[test]
    fn geometry_rejected() {
        let a = Atom::new(
            AtomFlavor::Classical,
            q(1, 1),
            q(5, 1),
            Piecewise::step(&[q(1, 1), q(3, 1), q(5, 1)], &[q(1, 4), q(-1, 4)]).unwrap(),
        )
        .unwrap();
        assert!(matches!(decompose_classical(&a), Err(Error::UnsupportedGeometry(_))));
    }

    #[test]
    fn non_cancellation_of_local_atom() {
        for m in -3..4 {
            let a = Atom::<Q>::local(m);
            assert_eq!(a.payload.moment(1), q(3, 1) * Q::pow2(m - 1));
        }
    }

    #[test]
    fn greedy_bounds() {
        let space = hl();
        let h = HarmonicProfile::Identity;
        let a1 = beta_atom_from_steps(&[q(1, 1), q(3, 2), q(2, 1)], &[q(1, 1)], 1.0).unwrap();
        assert!(a1.validate(&space, &h).pass);
        let b = atomic_norm_upper(&a1.payload.to_f64(), &space, &h, 1e-12, 200).unwrap();
        assert!(b.bound <= 1.0 + 1e-9, "{}", b.bound);
        let a2 = beta_atom_from_steps(&[q(5, 1), q(6, 1), q(7, 1)], &[q(-2, 1)], 0.9).unwrap();
        let f = a1.payload.scale(&q(3, 1)).sub(&a2.payload.scale(&q(2, 1)));
        let b = atomic_norm_upper(&f.to_f64(), &space, &h, 1e-12, 200).unwrap();
        assert!(b.bound <= 5.0 * (1.0 + 1e-9), "{}", b.bound);
        // a local atom does not cancel, but the chain absorbs it
        let loc = Atom::<f64>::local(0);
        let b = atomic_norm_upper(&loc.payload, &space, &h, 1e-12, 200).unwrap();
        assert!(b.bound.is_finite() && b.bound > 1.0);
        // with h ≡ 1 nothing is absorbed
        let r = atomic_norm_upper(&loc.payload, &ModelSpace::bessel_neumann(0.0), &HarmonicProfile::Constant, 1e-12, 50);
        assert!(matches!(r, Err(Error::NotDecomposable(_))));
    }

    #[test]
    fn json_round_trip() {
        let a = beta_atom_from_steps(&[q(1, 1), q(3, 2), q(2, 1)], &[q(1, 1)], 1.0).unwrap();
        let j = a.to_json();
        let back = Atom::<Q>::from_json(&j).unwrap();
        assert_eq!(back, a);
        let loc: Atom<Q> = Atom::from_json(&serde_json::json!({"flavor": "local_alpha2", "m": 2})).unwrap();
        assert_eq!(loc, Atom::local(2));
    }
}
