//! Compactly supported piecewise polynomials over a [`Field`].
//!
//! With `T = Rational` every integral against `x^k` is exact, which is what
//! the atom identities are checked with. `T = f64` is the floating-point twin.

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadConfig};
use crate::scalar::Field;
use crate::spaces::monomial_integral;

/// Polynomial `Σ coeffs[j] x^j` on `[from, to)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Piece<T> {
    pub from: T,
    pub to: T,
    pub coeffs: Vec<T>,
}

fn trim<T: Field>(mut c: Vec<T>) -> Vec<T> {
    while c.last().is_some_and(|v| v.is_zero()) {
        c.pop();
    }
    c
}

fn poly_eval<T: Field>(c: &[T], x: &T) -> T {
    c.iter().rev().fold(T::zero(), |acc, a| acc * x.clone() + a.clone())
}

fn poly_add<T: Field>(a: &[T], b: &[T], sign: T) -> Vec<T> {
    let n = a.len().max(b.len());
    trim(
        (0..n)
            .map(|i| {
                let x = a.get(i).cloned().unwrap_or_else(T::zero);
                let y = b.get(i).cloned().unwrap_or_else(T::zero);
                x + sign.clone() * y
            })
            .collect(),
    )
}

fn poly_mul<T: Field>(a: &[T], b: &[T]) -> Vec<T> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![T::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].clone() + x.clone() * y.clone();
        }
    }
    trim(out)
}

impl<T: Field> Piece<T> {
    pub fn eval(&self, x: &T) -> T {
        poly_eval(&self.coeffs, x)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// `∫_from^to p(x) x^k dx`.
    pub fn moment(&self, k: u32) -> T {
        let mut acc = T::zero();
        for (j, c) in self.coeffs.iter().enumerate() {
            let e = j as u32 + k + 1;
            let d = T::from_u32(e).unwrap();
            acc = acc + c.clone() * (self.to.powi(e) - self.from.powi(e)) / d;
        }
        acc
    }
}

/// A finite sum of polynomial pieces on disjoint intervals, zero elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct Piecewise<T> {
    pieces: Vec<Piece<T>>,
}

impl<T: Field> Default for Piecewise<T> {
    fn default() -> Self {
        Piecewise { pieces: vec![] }
    }
}

impl<T: Field> Piecewise<T> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn new(pieces: Vec<Piece<T>>) -> Result<Self> {
        let mut pieces: Vec<Piece<T>> = pieces
            .into_iter()
            .map(|p| Piece { coeffs: trim(p.coeffs), ..p })
            .collect();
        for p in &pieces {
            if !(p.from < p.to) {
                return Err(Error::invalid(format!("piece [{:?}, {:?}) is empty or reversed", p.from, p.to)));
            }
        }
        pieces.sort_by(|a, b| a.from.partial_cmp(&b.from).unwrap());
        for w in pieces.windows(2) {
            if w[1].from < w[0].to {
                return Err(Error::invalid(format!("pieces overlap at {:?}", w[1].from)));
            }
        }
        pieces.retain(|p| !p.is_zero());
        Ok(Piecewise { pieces }.merged())
    }

    pub fn polynomial(from: T, to: T, coeffs: Vec<T>) -> Result<Self> {
        Self::new(vec![Piece { from, to, coeffs }])
    }

    pub fn constant(from: T, to: T, value: T) -> Result<Self> {
        Self::polynomial(from, to, vec![value])
    }

    /// Piecewise constant from breakpoints `x_0 < … < x_n` and `n` values.
    pub fn step(breaks: &[T], values: &[T]) -> Result<Self> {
        if breaks.len() != values.len() + 1 {
            return Err(Error::invalid("step function needs one more breakpoint than values"));
        }
        Self::new(
            values
                .iter()
                .enumerate()
                .map(|(i, v)| Piece { from: breaks[i].clone(), to: breaks[i + 1].clone(), coeffs: vec![v.clone()] })
                .collect(),
        )
    }

    pub fn pieces(&self) -> &[Piece<T>] {
        &self.pieces
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn max_degree(&self) -> usize {
        self.pieces.iter().filter_map(|p| p.degree()).max().unwrap_or(0)
    }

    /// Hull of the support.
    pub fn support(&self) -> Option<(T, T)> {
        Some((self.pieces.first()?.from.clone(), self.pieces.last()?.to.clone()))
    }

    /// Maximal intervals on which the pieces are contiguous.
    pub fn components(&self) -> Vec<(T, T)> {
        let mut out: Vec<(T, T)> = Vec::new();
        for p in &self.pieces {
            match out.last_mut() {
                Some(last) if last.1 == p.from => last.1 = p.to.clone(),
                _ => out.push((p.from.clone(), p.to.clone())),
            }
        }
        out
    }

    pub fn eval(&self, x: &T) -> T {
        for p in &self.pieces {
            if *x >= p.from && *x < p.to {
                return p.eval(x);
            }
        }
        T::zero()
    }

    /// Sorted union of all breakpoints.
    pub fn breakpoints(&self) -> Vec<T> {
        let mut v: Vec<T> = self.pieces.iter().flat_map(|p| [p.from.clone(), p.to.clone()]).collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v.dedup();
        v
    }

    fn coeffs_on(&self, a: &T, b: &T) -> Vec<T> {
        for p in &self.pieces {
            if p.from <= *a && *b <= p.to {
                return p.coeffs.clone();
            }
        }
        vec![]
    }

    fn combine(&self, other: &Self, op: impl Fn(&[T], &[T]) -> Vec<T>) -> Self {
        let mut br = self.breakpoints();
        br.extend(other.breakpoints());
        br.sort_by(|a, b| a.partial_cmp(b).unwrap());
        br.dedup();
        let mut pieces = Vec::new();
        for w in br.windows(2) {
            let c = op(&self.coeffs_on(&w[0], &w[1]), &other.coeffs_on(&w[0], &w[1]));
            if !c.is_empty() {
                pieces.push(Piece { from: w[0].clone(), to: w[1].clone(), coeffs: c });
            }
        }
        Piecewise { pieces }.merged()
    }

    /// Joins adjacent pieces with identical polynomials.
    fn merged(self) -> Self {
        let mut out: Vec<Piece<T>> = Vec::new();
        for p in self.pieces {
            match out.last_mut() {
                Some(last) if last.to == p.from && last.coeffs == p.coeffs => last.to = p.to,
                _ => out.push(p),
            }
        }
        Piecewise { pieces: out }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, |a, b| poly_add(a, b, T::one()))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, |a, b| poly_add(a, b, -T::one()))
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.combine(other, poly_mul)
    }

    pub fn scale(&self, c: &T) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Piecewise {
            pieces: self
                .pieces
                .iter()
                .map(|p| Piece { coeffs: p.coeffs.iter().map(|v| v.clone() * c.clone()).collect(), ..p.clone() })
                .collect(),
        }
    }

    /// Multiplies by the monomial `x^k`.
    pub fn times_monomial(&self, k: usize) -> Self {
        Piecewise {
            pieces: self
                .pieces
                .iter()
                .map(|p| {
                    let mut c = vec![T::zero(); k];
                    c.extend(p.coeffs.iter().cloned());
                    Piece { coeffs: c, ..p.clone() }
                })
                .collect(),
        }
    }

    /// Restriction to `[lo, hi)`.
    pub fn restrict(&self, lo: &T, hi: &T) -> Self {
        let pieces = self
            .pieces
            .iter()
            .filter_map(|p| {
                let a = if p.from > *lo { p.from.clone() } else { lo.clone() };
                let b = if p.to < *hi { p.to.clone() } else { hi.clone() };
                (a < b).then(|| Piece { from: a, to: b, coeffs: p.coeffs.clone() })
            })
            .collect();
        Piecewise { pieces }
    }

    /// `∫ f(x) x^k dx`, exact in exact arithmetic.
    pub fn moment(&self, k: u32) -> T {
        self.pieces.iter().fold(T::zero(), |acc, p| acc + p.moment(k))
    }

    pub fn integral(&self) -> T {
        self.moment(0)
    }

    pub fn map_field<U: Field>(&self, f: impl Fn(&T) -> U) -> Piecewise<U> {
        Piecewise {
            pieces: self
                .pieces
                .iter()
                .map(|p| Piece { from: f(&p.from), to: f(&p.to), coeffs: trim(p.coeffs.iter().map(&f).collect()) })
                .collect(),
        }
    }

    pub fn to_f64(&self) -> Piecewise<f64> {
        self.map_field(|v| v.to_f64_lossy())
    }

    /// The same function with `x` replaced by `x / λ` and scaled by `λ^{-1}`.
    pub fn dilate(&self, lambda: &T) -> Self {
        let inv = T::one() / lambda.clone();
        Piecewise {
            pieces: self
                .pieces
                .iter()
                .map(|p| {
                    let mut scale = inv.clone();
                    let coeffs = p
                        .coeffs
                        .iter()
                        .map(|c| {
                            let v = c.clone() * scale.clone();
                            scale = scale.clone() * inv.clone();
                            v
                        })
                        .collect();
                    Piece { from: p.from.clone() * lambda.clone(), to: p.to.clone() * lambda.clone(), coeffs }
                })
                .collect(),
        }
    }
}

impl Piecewise<f64> {
    /// `∫ f(x) x^e dx` for real `e`.
    pub fn power_integral(&self, e: f64) -> Result<f64> {
        let mut acc = 0.0;
        for p in &self.pieces {
            for (j, c) in p.coeffs.iter().enumerate() {
                if *c != 0.0 {
                    acc += c * monomial_integral(p.from, p.to, e + j as f64)?;
                }
            }
        }
        Ok(acc)
    }

    /// `∫ |f(x)|^p w(x) dx`; exact splitting at sign changes for linear pieces,
    /// adaptive quadrature for higher degree or non-integer `p`.
    pub fn abs_pow_integral(&self, p: f64, w: impl Fn(f64) -> f64) -> Result<f64> {
        let cfg = QuadConfig { abs_tol: 1e-300, rel_tol: 1e-12, max_subdivisions: 4000 };
        let mut acc = 0.0;
        for pc in &self.pieces {
            let mut cuts = vec![pc.from];
            if pc.coeffs.len() == 2 && pc.coeffs[1] != 0.0 {
                let r = -pc.coeffs[0] / pc.coeffs[1];
                if r > pc.from && r < pc.to {
                    cuts.push(r);
                }
            }
            cuts.push(pc.to);
            for s in cuts.windows(2) {
                let v = integrate(|x: f64| pc.eval(&x).abs().powf(p) * w(x), s[0], s[1], cfg)?;
                acc += v.value;
            }
        }
        Ok(acc)
    }

    /// `sup |f|` (exact for degree ≤ 1, sampled otherwise).
    pub fn sup_abs(&self) -> f64 {
        let mut m: f64 = 0.0;
        for p in &self.pieces {
            let n = if p.coeffs.len() <= 2 { 1 } else { 256 };
            for i in 0..=n {
                let x = p.from + (p.to - p.from) * i as f64 / n as f64;
                m = m.max(p.eval(&x).abs());
            }
        }
        m
    }
}

#[derive(Serialize, Deserialize)]
struct PieceJson {
    from: serde_json::Value,
    to: serde_json::Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    value: Option<serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    coeffs: Option<Vec<serde_json::Value>>,
}

fn text_of(v: &serde_json::Value) -> Option<String> {
    match v {
        serde_json::Value::String(s) => Some(s.clone()),
        serde_json::Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

fn field_of<T: Field, E: de::Error>(v: &serde_json::Value) -> std::result::Result<T, E> {
    let t = text_of(v).ok_or_else(|| E::custom(format!("expected a number, got {v}")))?;
    T::from_text(&t).ok_or_else(|| E::custom(format!("bad number {t:?}")))
}

impl<T: Field> Serialize for Piecewise<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let js: Vec<PieceJson> = self
            .pieces
            .iter()
            .map(|p| {
                let txt = |v: &T| serde_json::Value::String(v.to_text());
                let (value, coeffs) = if p.coeffs.len() <= 1 {
                    (Some(txt(p.coeffs.first().unwrap_or(&T::zero()))), None)
                } else {
                    (None, Some(p.coeffs.iter().map(txt).collect()))
                };
                PieceJson { from: txt(&p.from), to: txt(&p.to), value, coeffs }
            })
            .collect();
        js.serialize(s)
    }
}

impl<'de, T: Field> Deserialize<'de> for Piecewise<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<PieceJson>::deserialize(d)?;
        let mut pieces = Vec::with_capacity(raw.len());
        for p in raw {
            let coeffs = match (p.value, p.coeffs) {
                (Some(v), None) => vec![field_of::<T, D::Error>(&v)?],
                (None, Some(c)) => c.iter().map(field_of::<T, D::Error>).collect::<std::result::Result<_, _>>()?,
                _ => return Err(de::Error::custom("each piece needs exactly one of `value` or `coeffs`")),
            };
            pieces.push(Piece { from: field_of::<T, D::Error>(&p.from)?, to: field_of::<T, D::Error>(&p.to)?, coeffs });
        }
        Piecewise::new(pieces).map_err(de::Error::custom)
    }
}
