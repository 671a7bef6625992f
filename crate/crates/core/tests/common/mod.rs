#![allow(dead_code)]

use hardylab::atoms::{beta_atom_from_steps, Atom};
use hardylab::{Field, Rational};
use rand::Rng;

pub fn q(n: i64, d: i64) -> Rational {
    Rational::ratio(n, d)
}

/// A β-atom on a random sub-interval of a random dyadic scale, with 2 to 4
/// equal cells and small integer step values (the last one solved for).
pub fn random_beta_atom<R: Rng>(rng: &mut R) -> Atom<Rational> {
    let m: i32 = rng.gen_range(-3..4);
    let scale = Rational::pow2(m);
    let lo = q(rng.gen_range(0..16), 8) * scale.clone();
    let len = q(rng.gen_range(1..16), 8) * scale;
    let cells: i64 = rng.gen_range(2..5);
    let breaks: Vec<Rational> = (0..=cells).map(|i| lo.clone() + len.clone() * q(i, cells)).collect();
    let mut values: Vec<Rational> = (0..cells - 1).map(|_| q(rng.gen_range(-5..6), 1)).collect();
    if values.iter().all(|v| v == &q(0, 1)) {
        values[0] = q(1, 1);
    }
    let fill = rng.gen_range(0.3..1.0);
    beta_atom_from_steps(&breaks, &values, fill).expect("valid steps")
}
