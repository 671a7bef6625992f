//! Adaptive Gauss–Kronrod (7/15) quadrature and fixed Gauss–Legendre rules.

use crate::error::{Error, Result};
use crate::scalar::Real;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig { abs_tol: 1e-14, rel_tol: 1e-11, max_subdivisions: 2000 }
    }
}

impl QuadConfig {
    pub fn relative(rel_tol: f64) -> Self {
        QuadConfig { rel_tol, ..Default::default() }
    }

    pub fn with_abs(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult<R> {
    pub value: R,
    pub error: R,
    pub intervals: usize,
}

struct Segment<R> {
    a: R,
    b: R,
    value: R,
    error: R,
}

fn gk15<R: Real, F: FnMut(R) -> R>(f: &mut F, a: R, b: R) -> (R, R, R, R) {
    let half = R::lit(0.5);
    let center = half * (a + b);
    let half_len = half * (b - a);
    let abs_half = half_len.abs();

    let fc = f(center);
    let mut res_g = fc * R::lit(WG[3]);
    let mut res_k = fc * R::lit(WGK[7]);
    let mut res_abs = res_k.abs();
    let mut fv1 = [R::zero(); 7];
    let mut fv2 = [R::zero(); 7];
    for j in 0..7 {
        let dx = half_len * R::lit(XGK[j]);
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        let wk = R::lit(WGK[j]);
        res_k = res_k + wk * (f1 + f2);
        res_abs = res_abs + wk * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g = res_g + R::lit(WG[j / 2]) * (f1 + f2);
        }
    }
    let mean = res_k * half;
    let mut res_asc = R::lit(WGK[7]) * (fc - mean).abs();
    for j in 0..7 {
        res_asc = res_asc + R::lit(WGK[j]) * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half_len;
    let res_abs = res_abs * abs_half;
    let res_asc = res_asc * abs_half;
    let mut err = ((res_k - res_g) * half_len).abs();
    if res_asc != R::zero() && err != R::zero() {
        let scale = (R::lit(200.0) * err / res_asc).powf(R::lit(1.5));
        err = if scale < R::one() { res_asc * scale } else { res_asc };
    }
    let eps = R::epsilon();
    if res_abs > R::min_positive_value() / (R::lit(50.0) * eps) {
        err = err.max(R::lit(50.0) * eps * res_abs);
    }
    (value, err, res_abs, res_asc)
}

/// Globally adaptive Gauss–Kronrod integration of `f` over `[a, b]`.
///
/// The interval with the largest error estimate is bisected until the total
/// error drops below `max(abs_tol, rel_tol * |I|)`.
pub fn integrate<R: Real, F: FnMut(R) -> R>(mut f: F, a: R, b: R, cfg: QuadConfig) -> Result<QuadResult<R>> {
    if a == b {
        return Ok(QuadResult { value: R::zero(), error: R::zero(), intervals: 0 });
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::invalid("integration limits must be finite"));
    }
    let (lo, hi, sign) = if a < b { (a, b, R::one()) } else { (b, a, -R::one()) };
    let (value, error, _, _) = gk15(&mut f, lo, hi);
    let mut segments = vec![Segment { a: lo, b: hi, value, error }];
    let abs_tol = R::lit(cfg.abs_tol);
    let rel_tol = R::lit(cfg.rel_tol);
    // interval widths below this cannot be bisected meaningfully
    let min_width = (hi - lo).abs() * R::epsilon() * R::lit(64.0);

    loop {
        let total: R = segments.iter().map(|s| s.value).sum();
        let total_err: R = segments.iter().map(|s| s.error).sum();
        if !total.is_finite() || !total_err.is_finite() {
            return Err(Error::QuadratureFailure {
                a: lo.as_f64(),
                b: hi.as_f64(),
                error: f64::INFINITY,
                target: cfg.abs_tol.max(cfg.rel_tol * total.as_f64().abs()),
            });
        }
        let target = abs_tol.max(rel_tol * total.abs());
        if total_err <= target {
            return Ok(QuadResult { value: sign * total, error: total_err, intervals: segments.len() });
        }
        if segments.len() >= cfg.max_subdivisions {
            return Err(Error::QuadratureFailure {
                a: lo.as_f64(),
                b: hi.as_f64(),
                error: total_err.as_f64(),
                target: target.as_f64(),
            });
        }
        let (idx, _) = segments
            .iter()
            .enumerate()
            .fold((0, -R::one()), |acc, (i, s)| if s.error > acc.1 { (i, s.error) } else { acc });
        let seg = segments.swap_remove(idx);
        if seg.b - seg.a <= min_width {
            return Err(Error::QuadratureFailure {
                a: lo.as_f64(),
                b: hi.as_f64(),
                error: total_err.as_f64(),
                target: target.as_f64(),
            });
        }
        let mid = R::lit(0.5) * (seg.a + seg.b);
        let (v1, e1, _, _) = gk15(&mut f, seg.a, mid);
        let (v2, e2, _, _) = gk15(&mut f, mid, seg.b);
        segments.push(Segment { a: seg.a, b: mid, value: v1, error: e1 });
        segments.push(Segment { a: mid, b: seg.b, value: v2, error: e2 });
    }
}

/// Integrates over `[a, b]` split at the given interior breakpoints.
pub fn integrate_split<R: Real, F: FnMut(R) -> R>(
    mut f: F,
    a: R,
    b: R,
    breakpoints: &[R],
    cfg: QuadConfig,
) -> Result<QuadResult<R>> {
    let mut cuts: Vec<R> = vec![a];
    cuts.extend(breakpoints.iter().copied().filter(|&p| p > a && p < b));
    cuts.push(b);
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    cuts.dedup();
    let mut value = R::zero();
    let mut error = R::zero();
    let mut intervals = 0;
    for w in cuts.windows(2) {
        let r = integrate(&mut f, w[0], w[1], cfg)?;
        value = value + r.value;
        error = error + r.error;
        intervals += r.intervals;
    }
    Ok(QuadResult { value, error, intervals })
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p1 = 1.0;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2 * j + 1) as f64 * z * p2 - j as f64 * p3) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}
