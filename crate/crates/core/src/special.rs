//! Special functions: log-gamma, modified Bessel functions of the first kind
//! and the error function.

use crate::scalar::Real;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma<R: Real>(x: R) -> R {
    let half = R::lit(0.5);
    if x < half {
        // reflection: Γ(x)Γ(1-x) = π / sin(πx)
        let pi = R::PI();
        return (pi / (pi * x).sin()).ln() - ln_gamma(R::one() - x);
    }
    let x = x - R::one();
    let mut acc = R::lit(LANCZOS[0]);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc = acc + R::lit(c) / (x + R::lit(i as f64));
    }
    let t = x + R::lit(LANCZOS_G) + half;
    half * (R::TAU()).ln() + (x + half) * t.ln() - t + acc.ln()
}

pub fn gamma<R: Real>(x: R) -> R {
    ln_gamma(x).exp()
}

/// Switch-over point between the power series and the asymptotic expansion.
pub const BESSEL_SERIES_LIMIT: f64 = 20.0;

/// `Σ_k (z²/4)^k / (k! Γ(k+ν+1))`, i.e. `(z/2)^{-ν} I_ν(z)`. Entire in `z`.
fn regularized_series<R: Real>(nu: R, z: R) -> R {
    let q = z * z * R::lit(0.25);
    let mut term = (-ln_gamma(nu + R::one())).exp();
    let mut sum = term;
    let mut k = R::zero();
    for _ in 0..500 {
        k = k + R::one();
        term = term * q / (k * (k + nu));
        sum = sum + term;
        if term <= sum * R::epsilon() * R::lit(0.5) {
            break;
        }
    }
    sum
}

/// Hankel expansion of `e^{-z} I_ν(z)`. `None` when the series has not
/// converged to machine precision before its terms start growing.
fn scaled_asymptotic<R: Real>(nu: R, z: R) -> Option<R> {
    let mu = R::lit(4.0) * nu * nu;
    let eight_z = R::lit(8.0) * z;
    let mut term = R::one();
    let mut sum = R::one();
    let mut prev = R::infinity();
    for k in 1..200 {
        let odd = R::lit((2 * k - 1) as f64);
        term = -term * (mu - odd * odd) / (R::lit(k as f64) * eight_z);
        if term == R::zero() {
            break;
        }
        if term.abs() > prev {
            return None;
        }
        sum = sum + term;
        prev = term.abs();
        if term.abs() <= sum.abs() * R::epsilon() {
            break;
        }
    }
    Some(sum / (R::TAU() * z).sqrt())
}

/// `ln[(z/2)^{-ν} I_ν(z)]` by summing the series in log space. Used for large
/// `z` when the asymptotic expansion is not accurate (large `ν`).
fn ln_regularized_series_logspace<R: Real>(nu: R, z: R) -> R {
    let lq = R::lit(2.0) * (z * R::lit(0.5)).ln();
    let mut logs = Vec::new();
    let mut l = -ln_gamma(nu + R::one());
    let mut lmax = l;
    logs.push(l);
    let mut k = R::zero();
    loop {
        k = k + R::one();
        l = l + lq - k.ln() - (k + nu).ln();
        logs.push(l);
        if l > lmax {
            lmax = l;
        } else if l < lmax - R::lit(45.0) {
            break;
        }
        if logs.len() > 1_000_000 {
            break;
        }
    }
    let s: R = logs.iter().map(|&v| (v - lmax).exp()).sum();
    lmax + s.ln()
}

/// `ln[(z/2)^{-ν} I_ν(z)]` for `ν ≥ -1/2`, `z ≥ 0`.
pub fn ln_bessel_i_regularized<R: Real>(nu: R, z: R) -> R {
    if z <= R::lit(BESSEL_SERIES_LIMIT) {
        return regularized_series(nu, z).ln();
    }
    match scaled_asymptotic(nu, z) {
        Some(ie) => ie.ln() + z - nu * (z * R::lit(0.5)).ln(),
        None => ln_regularized_series_logspace(nu, z),
    }
}

/// Exponentially scaled modified Bessel function `e^{-z} I_ν(z)`.
pub fn bessel_ie<R: Real>(nu: R, z: R) -> R {
    if z == R::zero() {
        return bessel_i(nu, z);
    }
    if z <= R::lit(BESSEL_SERIES_LIMIT) {
        return (z * R::lit(0.5)).powf(nu) * regularized_series(nu, z) * (-z).exp();
    }
    match scaled_asymptotic(nu, z) {
        Some(ie) => ie,
        None => (ln_regularized_series_logspace(nu, z) + nu * (z * R::lit(0.5)).ln() - z).exp(),
    }
}

/// Modified Bessel function of the first kind `I_ν(z)` for `ν ≥ -1/2`, `z ≥ 0`.
///
/// Power series for `z ≤ 20`, exponentially scaled Hankel expansion above.
/// `I_{-1/2}(0)` is `+∞`.
pub fn bessel_i<R: Real>(nu: R, z: R) -> R {
    if z == R::zero() {
        return if nu == R::zero() {
            R::one()
        } else if nu > R::zero() {
            R::zero()
        } else {
            R::infinity()
        };
    }
    if z <= R::lit(BESSEL_SERIES_LIMIT) {
        return (z * R::lit(0.5)).powf(nu) * regularized_series(nu, z);
    }
    bessel_ie(nu, z) * z.exp()
}

#[inline]
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

#[inline]
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn gamma_values() {
        assert!(rel(gamma(5.0), 24.0) < 1e-13);
        assert!(rel(gamma(0.5), std::f64::consts::PI.sqrt()) < 1e-13);
        assert!(rel(ln_gamma(100.0), 359.134_205_369_575_4) < 1e-13);
    }

    #[test]
    fn half_order_closed_form() {
        let z = 1.0f64;
        let expect = (2.0 / std::f64::consts::PI).sqrt() * z.sinh();
        assert!(rel(bessel_i(0.5, z), expect) < 1e-10);
        assert!((bessel_i(0.5f64, 1.0) - 0.937_674_888_245_488).abs() < 1e-12);
    }

    #[test]
    fn zero_order_at_zero() {
        assert_eq!(bessel_i(0.0, 0.0), 1.0);
    }

    #[test]
    fn minus_half_order() {
        for &z in &[0.3, 5.0, 19.0, 25.0, 80.0] {
            let expect = (2.0 / (std::f64::consts::PI * z)).sqrt() * z.cosh();
            assert!(rel(bessel_i(-0.5, z), expect) < 1e-12, "z={z}");
        }
    }

    #[test]
    fn branches_agree_at_switch() {
        for &nu in &[-0.5, 0.0, 0.5, 1.0, 2.5] {
            let below = bessel_i(nu, 20.0);
            let above = bessel_i(nu, 20.000_000_001);
            assert!(rel(below, above) < 1e-8, "nu={nu}");
        }
    }

    #[test]
    fn large_order_falls_back() {
        // ν = 30 at z = 25: Hankel expansion diverges, log-space series used
        let nu: f64 = 30.0;
        let z: f64 = 25.0;
        let series: f64 = {
            let q = z * z / 4.0;
            let mut t = (nu * (z / 2.0).ln() - ln_gamma(nu + 1.0)).exp();
            let mut s = t;
            for k in 1..400 {
                let k = k as f64;
                t *= q / (k * (k + nu));
                s += t;
            }
            s
        };
        assert!(rel(bessel_i(nu, z), series) < 1e-11);
    }

    #[test]
    fn scaled_no_overflow() {
        let v = bessel_ie(0.5, 1.0e4);
        let expect = 1.0 / (2.0 * std::f64::consts::PI * 1.0e4).sqrt();
        assert!(rel(v, expect) < 1e-12);
    }

    #[test]
    fn f32_smoke() {
        let v = bessel_i(0.5f32, 1.0f32);
        assert!((v - 0.937_674_9).abs() < 1e-5);
    }
}
