//! Acceptance suite: one line per criterion, nonzero exit if any fails.

mod common;

use std::time::{Duration, Instant};

use common::{q, random_beta_atom};
use hardylab::atoms::{decompose_local, Atom};
use hardylab::doob::{gaussian_sandwich, holder_probe, kernel_integral, verify_conservative, verify_harmonicity, DoobKernel, SandwichConfig};
use hardylab::functionals::{bmo_local, bmo_local_identity, l1_norm, Functional, KernelAction};
use hardylab::piecewise::Piecewise;
use hardylab::scalar::logspace;
use hardylab::special::bessel_i;
use hardylab::weights::{ap_sup, apw_quantity, ApTarget};
use hardylab::{Ball, Field, HarmonicProfile, KernelFamily, ModelSpace, Rational};
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const HLD: KernelFamily = KernelFamily::HalfLineDirichlet;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err<E: std::fmt::Debug>(e: E) -> String {
    format!("{e:?}")
}

fn hl() -> ModelSpace {
    ModelSpace::half_line_dirichlet()
}

fn c1_local_atom_reconstruction() -> Outcome {
    let d = decompose_local::<Rational>(0, 40).map_err(err)?;
    let chi = Piecewise::constant(q(1, 1), q(2, 1), q(1, 1)).unwrap();
    ensure(d.reconstruct().restrict(&q(1, 1), &q(2, 1)) == chi, "reconstruction differs from χ on (1,2)")?;
    ensure(d.reconstruction_error.is_zero(), "nonzero reconstruction error")?;
    ensure(d.residual_mass == Rational::pow2(-40), format!("residual mass {}", d.residual_mass))?;
    ensure(d.sum_abs() == q(2, 1) - Rational::pow2(-40), format!("Σ|λ| = {}", d.sum_abs()))?;
    let bad = d.atoms[..40].iter().filter(|b| !b.payload.moment(1).is_zero()).count();
    ensure(bad == 0, format!("{bad} blocks fail ∫ b x dx = 0"))?;
    Ok(format!("Σ|λ| = 2 - 2^-40 exactly, residual 2^-40, {} blocks cancel", d.atoms.len() - 1))
}

fn grid_1d() -> (Vec<f64>, Vec<Vec<f64>>) {
    (vec![0.1, 1.0, 10.0], vec![vec![0.25], vec![1.0], vec![4.0]])
}

fn c2_harmonicity() -> Outcome {
    let (times, pts) = grid_1d();
    let c = verify_harmonicity(&HLD, &HarmonicProfile::Identity, &times, &pts, 1e-6).map_err(err)?;
    let dev = c.constant("max_relative_deviation").unwrap();
    ensure(c.pass, format!("max relative deviation {dev:e}"))?;
    Ok(format!("max relative deviation {dev:.2e} < 1e-6"))
}

fn c3_conservativity() -> Outcome {
    let (times, pts) = grid_1d();
    let dk = DoobKernel::new(HLD, HarmonicProfile::Identity).map_err(err)?;
    let c = verify_conservative(&dk, &times, &pts, 1e-6).map_err(err)?;
    let dev = c.constant("max_deviation").unwrap();
    ensure(c.pass, format!("max deviation {dev:e}"))?;
    Ok(format!("max |∫T̃ - 1| = {dev:.2e} < 1e-6"))
}

fn c4_sandwich() -> Outcome {
    let pts: Vec<Vec<f64>> = logspace(0.1, 10.0, 20).into_iter().map(|v| vec![v]).collect();
    let times = logspace(1e-2, 1e2, 9);
    let cfg = SandwichConfig { c_lower: 4.0, c_upper: 8.0, ceiling: 1e4 };
    let dk = DoobKernel::new(HLD, HarmonicProfile::Identity).map_err(err)?;
    let c = gaussian_sandwich(&dk, &pts, &times, cfg).map_err(err)?;
    let (low, ratio) = (c.constant("C_low").unwrap(), c.constant("ratio").unwrap());
    ensure(c.pass && low > 0.0 && ratio < 1e4, format!("C_low {low}, ratio {ratio}"))?;
    let neg = gaussian_sandwich(&DoobKernel::new(HLD, HarmonicProfile::Constant).map_err(err)?, &pts, &times, cfg).map_err(err)?;
    ensure(!neg.pass, "negative control h ≡ 1 passed")?;
    Ok(format!("C_low = {low:.3e}, C_up/C_low = {ratio:.1}; h ≡ 1 control fails"))
}

fn c5_ap_closed_form() -> Outcome {
    for r in [1e-3, 1.0, 1e3] {
        let v = apw_quantity(&hl(), &HarmonicProfile::Identity, 2.0, &Ball::new(vec![r], r).unwrap()).map_err(err)?;
        ensure((v - 9.0 / 8.0).abs() < 1e-10, format!("r = {r}: {v}"))?;
    }
    let (centers, radii) = hl().standard_grid();
    let target = ApTarget::Profile { space: hl(), profile: HarmonicProfile::Identity };
    let rep = ap_sup(&target, 2.0, &centers, &radii, 100.0).map_err(err)?;
    ensure(rep.supremum.is_finite() && rep.refinement_stable, format!("sup {} change {}", rep.supremum, rep.refinement_change))?;
    Ok(format!("9/8 on (0,2r) for three scales; sup {:.6}, refinement change {:.1e}", rep.supremum, rep.refinement_change))
}

fn c6_dilation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let a = random_beta_atom(&mut rng);
        let mut norms = Vec::new();
        for lam in [q(1, 4), q(1, 1), q(4, 1)] {
            let d = Atom::new(a.flavor, a.lo.clone() * lam.clone(), a.hi.clone() * lam.clone(), a.payload.dilate(&lam)).map_err(err)?;
            ensure(d.validate(&hl(), &HarmonicProfile::Identity).pass, "dilated atom fails validation")?;
            let k = KernelAction::new(d.payload.to_f64(), HLD).map_err(err)?;
            let times = k.default_times();
            let m = l1_norm(&k, Functional::Maximal, &times, 64).map_err(err)?;
            let g = l1_norm(&k, Functional::G, &times, 64).map_err(err)?;
            norms.push((m, g));
        }
        for n in &norms[1..] {
            worst = worst.max((n.0 - norms[0].0).abs() / norms[0].0).max((n.1 - norms[0].1).abs() / norms[0].1);
        }
    }
    ensure(worst < 0.01, format!("relative spread {worst:e}"))?;
    Ok(format!("M and G L¹ norms agree across λ ∈ {{1/4,1,4}}, max relative spread {worst:.1e}"))
}

fn c7_bmo() -> Outcome {
    let h = Piecewise::polynomial(0.0, 1e3, vec![0.0, 1.0]).unwrap();
    for (c, r) in [(0.5, 0.5), (3.0, 1.0), (10.0, 20.0)] {
        let (_, v) = bmo_local(&h, &hl(), &HarmonicProfile::Identity, &Ball::new(vec![c], r).unwrap()).map_err(err)?;
        ensure(v.abs() < 1e-10, format!("bmo_local(h) = {v}"))?;
    }
    let g = Piecewise::polynomial(0.0, 1e3, vec![0.0, 0.0, 1.0]).unwrap();
    let (c, v) = bmo_local(&g, &hl(), &HarmonicProfile::Identity, &Ball::interval(0.0, 1.0).unwrap()).map_err(err)?;
    ensure((c - 0.8).abs() < 1e-8 && (v - (1.0f64 / 75.0).sqrt()).abs() < 1e-8, format!("({c}, {v})"))?;
    Ok(format!("h ↦ 0; x² on (0,1) ↦ ({c:.10}, {v:.10})"))
}

fn c8_duality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let big = q(1000, 1);
    let mut gs = vec![
        Piecewise::polynomial(q(0, 1), big.clone(), vec![q(0, 1), q(0, 1), q(1, 1)]).unwrap(),
        Piecewise::polynomial(q(0, 1), big.clone(), vec![q(0, 1), q(1, 1)]).unwrap(),
    ];
    for (c, s) in [(q(1, 2), q(3, 1)), (q(2, 1), q(-1, 1)), (q(5, 8), q(7, 2))] {
        // ramp (x - c)_+ · s, and a clipped ramp reaching a plateau
        gs.push(Piecewise::polynomial(c.clone(), big.clone(), vec![-c.clone() * s.clone(), s.clone()]).unwrap());
        let top = c.clone() + q(1, 1);
        gs.push(
            Piecewise::polynomial(c.clone(), top.clone(), vec![-c.clone() * s.clone(), s.clone()])
                .unwrap()
                .add(&Piecewise::constant(top, big.clone(), s.clone()).unwrap()),
        );
    }
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for _ in 0..50 {
        let a = random_beta_atom(&mut rng);
        ensure(a.validate(&hl(), &HarmonicProfile::Identity).pass, "random atom fails validation")?;
        for g in &gs {
            let value = a.payload.mul(g).integral();
            let (_, bound2) = bmo_local_identity(g, &a.lo, &a.hi).map_err(err)?;
            let slack = Rational::from_f64_exact((1.0 + 1e-6f64).powi(2)).unwrap();
            ensure(value.clone() * value.clone() <= bound2.clone() * slack, format!("|⟨a,g⟩|² = {value}² > {bound2}"))?;
            if !bound2.is_zero() {
                worst = worst.max((value.to_f64_lossy().powi(2) / bound2.to_f64_lossy()).sqrt());
            }
            count += 1;
        }
    }
    Ok(format!("{count} exact pairings, max |⟨a,g⟩|/bound = {worst:.4}"))
}

fn c9_s_vs_g() -> Outcome {
    let atoms = [
        Piecewise::step(&[1.0, 1.5, 2.0], &[1.0, -5.0 / 7.0]).unwrap(),
        Piecewise::step(&[0.0, 0.5, 1.0], &[1.0, -1.0 / 3.0]).unwrap(),
        Piecewise::step(&[4.0, 5.0, 6.0, 7.0], &[1.0, -1.0, 2.0 / 13.0]).unwrap(),
    ];
    let mut ratios = Vec::new();
    for f in atoms {
        let k = KernelAction::new(f, HLD).map_err(err)?;
        let l2 = k.scale().powi(2);
        let times = logspace(1e-3 * l2, 1e3 * l2, 30);
        let s = l1_norm(&k, Functional::S, &times, 32).map_err(err)?;
        let g = l1_norm(&k, Functional::G, &times, 32).map_err(err)?;
        ratios.push(s / g);
    }
    ensure(ratios.iter().all(|r| (0.1..=10.0).contains(r)), format!("{ratios:?}"))?;
    Ok(format!("‖S a‖₁/‖G a‖₁ = {}", ratios.iter().map(|r| format!("{r:.3}")).collect::<Vec<_>>().join(", ")))
}

fn c10_bessel() -> Outcome {
    let k = KernelFamily::BesselNeumann { alpha: 2.0 };
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        use rand::Rng;
        let t: f64 = 10f64.powf(rng.gen_range(-1.5..1.5));
        let x: f64 = rng.gen_range(0.05..5.0);
        let y: f64 = rng.gen_range(0.05..5.0);
        // 4π r² dr against y² dy, times the spherical average of the Gaussian
        let z = x * y / (2.0 * t);
        let oracle = 4.0 * std::f64::consts::PI * (4.0 * std::f64::consts::PI * t).powf(-1.5) * (-(x - y).powi(2) / (4.0 * t)).exp() * (-(-2.0 * z).exp_m1()) / (2.0 * z);
        let v = k.heat_kernel(t, &[x], &[y]).map_err(err)?;
        worst = worst.max((v - oracle).abs() / oracle);
    }
    ensure(worst < 1e-8, format!("kernel relative error {worst:e}"))?;
    let mut cons: f64 = 0.0;
    for &t in &[0.1, 1.0, 10.0] {
        for &x in &[0.25, 1.0, 4.0] {
            cons = cons.max((kernel_integral(&k, t, &[x], |_| 1.0, 1e-9).map_err(err)? - 1.0).abs());
        }
    }
    ensure(cons < 1e-6, format!("conservativity deviation {cons:e}"))?;
    let mut bes: f64 = 0.0;
    for z in [1e-3, 0.1, 1.0, 5.0, 30.0] {
        let exact = (2.0 / (std::f64::consts::PI * z)).sqrt() * z.sinh();
        bes = bes.max((bessel_i(0.5, z) - exact).abs() / exact);
    }
    ensure(bes < 1e-10, format!("I_1/2 relative error {bes:e}"))?;
    Ok(format!("kernel vs 3-D average {worst:.1e}, mass defect {cons:.1e}, I_1/2 {bes:.1e}"))
}

fn c11_holder() -> Outcome {
    let dk = DoobKernel::new(HLD, HarmonicProfile::Identity).map_err(err)?;
    let (d, _) = holder_probe(&dk, 1.0, &[3.0], &[1.0], &[0.05, 0.1, 0.2, 0.4], 0.8).map_err(err)?;
    ensure(d >= 0.8, format!("δ̂ = {d}"))?;
    Ok(format!("empirical δ̂ = {d:.3} ≥ 0.8"))
}

fn c12_non_cancellation() -> Outcome {
    let a = Atom::<Rational>::local(0);
    let m = a.payload.moment(1);
    ensure(m == q(3, 2), format!("∫ f x dx = {m}"))?;
    Ok("∫ χ_(1,2) x dx = 3/2 exactly".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Duration); 12] = [
        ("local atom reconstruction", c1_local_atom_reconstruction, Duration::from_secs(1)),
        ("harmonicity", c2_harmonicity, Duration::from_secs(5)),
        ("Doob conservativity", c3_conservativity, Duration::from_secs(5)),
        ("Gaussian sandwich", c4_sandwich, Duration::from_secs(60)),
        ("A_p closed form", c5_ap_closed_form, Duration::from_secs(60)),
        ("dilation invariance", c6_dilation, Duration::from_secs(120)),
        ("BMO", c7_bmo, Duration::from_secs(5)),
        ("duality", c8_duality, Duration::from_secs(60)),
        ("S/G comparability", c9_s_vs_g, Duration::from_secs(60)),
        ("Bessel oracle", c10_bessel, Duration::from_secs(10)),
        ("Hölder probe", c11_holder, Duration::from_secs(10)),
        ("non-cancellation", c12_non_cancellation, Duration::from_secs(1)),
    ];
    let mut failed = 0;
    for (i, (name, f, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = f();
        let el = start.elapsed();
        let out = match out {
            Ok(d) if el > *limit => Err(format!("{d}; took {el:.2?}, limit {limit:?}")),
            other => other,
        };
        match out {
            Ok(d) => println!("criterion {:>2} PASS  {name}: {d} [{el:.2?}]", i + 1),
            Err(d) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {d} [{el:.2?}]", i + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
