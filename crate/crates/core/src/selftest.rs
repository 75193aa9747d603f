//! A quick invariant suite: metric axioms, winding against root counts,
//! the complex-number identity behind the margin formula, the robustness
//! bound and the delay example.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::boundary::{AlgebraInstance, Domain, SampledCurve};
use crate::delay_example;
use crate::error::Result;
use crate::factorization::{coprime_factorize, Bezout, CoprimeFactorization, Fraction};
use crate::index::winding_number;
use crate::metric::{d_cr_factored, Branch};
use crate::poly::Polynomial;
use crate::random::{random_complex, random_plant, random_roots};
use crate::stability::{certify_robust, margin, margin_via_norm};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        CheckOutcome {
            name: name.to_string(),
            passed,
            detail,
        }
    }

    fn from_result(name: &str, r: Result<(bool, String)>) -> Self {
        match r {
            Ok((passed, detail)) => Self::new(name, passed, detail),
            Err(e) => Self::new(name, false, format!("error: {e}")),
        }
    }
}

/// `c = -x / y` from the Bezout witnesses of `p`, as the factorization
/// `(-x, y)` with witnesses `(-n, d)`.
pub fn bezout_controller(p: &CoprimeFactorization) -> Result<Option<CoprimeFactorization>> {
    let b = match &p.bezout {
        Some(b) if !b.y.is_zero() => b,
        _ => return Ok(None),
    };
    let witnesses = Bezout {
        x: p.n.neg(),
        y: p.d.clone(),
    };
    CoprimeFactorization::new(b.x.neg(), b.y.clone(), Some(witnesses), &p.instance).map(Some)
}

/// Scales every coefficient of a rational plant by `1 + eps * u` with
/// `u` uniform in `[-1, 1]`.
pub fn perturb_plant<R: Rng>(rng: &mut R, p: &Fraction, eps: f64) -> Fraction {
    let mut jitter = |poly: &Polynomial| {
        Polynomial::new(
            poly.coeffs()
                .iter()
                .map(|c| c * (1.0 + eps * rng.gen_range(-1.0..1.0)))
                .collect(),
        )
    };
    match p {
        Fraction::Rational { num, den } => Fraction::Rational {
            num: jitter(num),
            den: jitter(den),
        },
        other => other.clone(),
    }
}

fn metric_axioms(rng: &mut ChaCha8Rng, count: usize) -> Result<(bool, String)> {
    let inst = AlgebraInstance::halfplane_c0ap();
    let (mut sym, mut tri) = (0.0f64, f64::NEG_INFINITY);
    let mut identity_ok = true;
    for _ in 0..count {
        let cfs = (0..3)
            .map(|_| coprime_factorize(&random_plant(rng, 3, Domain::HalfPlane), &inst))
            .collect::<Result<Vec<_>>>()?;
        let self_d = d_cr_factored(&cfs[0], &cfs[0])?;
        identity_ok &= self_d.value == 0.0 && self_d.branch == Branch::KappaSup;
        let d01 = d_cr_factored(&cfs[0], &cfs[1])?;
        let d10 = d_cr_factored(&cfs[1], &cfs[0])?;
        let d02 = d_cr_factored(&cfs[0], &cfs[2])?;
        let d21 = d_cr_factored(&cfs[2], &cfs[1])?;
        sym = sym.max((d01.value - d10.value).abs());
        if d01.branch != d10.branch {
            sym = f64::INFINITY;
        }
        tri = tri.max(d01.value - d02.value - d21.value);
    }
    let passed = identity_ok && sym <= 1e-9 && tri <= 1e-7;
    Ok((
        passed,
        format!("identity exact: {identity_ok}, max asymmetry {sym:.2e}, max triangle excess {tri:.2e}"),
    ))
}

fn winding_oracle(rng: &mut ChaCha8Rng, count: usize) -> Result<(bool, String)> {
    let grid = SampledCurve::uniform_grid(4096);
    let mut mismatches = 0;
    for _ in 0..count {
        let (nz, np) = (rng.gen_range(0..=4), rng.gen_range(0..=4));
        let zeros = random_roots(rng, nz, Domain::Circle, false);
        let poles = random_roots(rng, np, Domain::Circle, false);
        let num = Polynomial::from_roots(&zeros, 1.0);
        let den = Polynomial::from_roots(&poles, 1.0);
        let values = grid
            .iter()
            .map(|&t| {
                let z = Complex64::from_polar(1.0, t);
                num.eval(z) / den.eval(z)
            })
            .collect();
        let w = winding_number(&SampledCurve::new(grid.clone(), values, true)?)?;
        let inside = |p: &Polynomial| p.roots().iter().filter(|r| r.norm() < 1.0).count() as i64;
        if w != inside(&num) - inside(&den) {
            mismatches += 1;
        }
    }
    Ok((mismatches == 0, format!("{mismatches} mismatches in {count} curves")))
}

fn chordal_identity(rng: &mut ChaCha8Rng, count: usize) -> (bool, String) {
    let mut worst = 0.0f64;
    for _ in 0..count {
        let [a, b, al, be] = [(); 4].map(|_| random_complex(rng, 2.0));
        let denom = (a.norm_sqr() + b.norm_sqr()) * (al.norm_sqr() + be.norm_sqr());
        if denom < 1e-12 {
            continue;
        }
        let lhs = 1.0 - (a * be - b * al).norm_sqr() / denom;
        let rhs = (a * al.conj() + b * be.conj()).norm_sqr() / denom;
        worst = worst.max((lhs - rhs).abs());
    }
    (
        worst <= 1e-12,
        format!("max deviation {worst:.2e} over {count} quadruples"),
    )
}

fn robustness_bound(rng: &mut ChaCha8Rng, count: usize) -> Result<(bool, String)> {
    let inst = AlgebraInstance::halfplane_c0ap();
    let (mut worst, mut agree, mut done) = (f64::INFINITY, 0.0f64, 0);
    while done < count {
        let p0 = random_plant(rng, 3, Domain::HalfPlane);
        let cf0 = coprime_factorize(&p0, &inst)?;
        let Some(c) = bezout_controller(&cf0)? else { continue };
        let cf = coprime_factorize(&perturb_plant(rng, &p0, 0.2), &inst)?;
        let cert = certify_robust(&cf0, &c, &cf, true)?;
        worst = worst.min(cert.mu_perturbed.unwrap_or(0.0) - cert.lower_bound);
        let mu = margin(&cf0, &c)?.value;
        agree = agree.max((mu - margin_via_norm(&cf0, &c)?.value).abs());
        done += 1;
    }
    Ok((
        worst >= -1e-7 && agree <= 1e-7,
        format!("min slack {worst:.2e}, max two-formula gap {agree:.2e}"),
    ))
}

fn delay_example_check() -> Result<(bool, String)> {
    let inst = AlgebraInstance::halfplane_c0ap();
    let p1 = delay_example::plant(1.0, &inst)?;
    let c = delay_example::controller(&inst)?;
    let pa = delay_example::plant(1.2, &inst)?;
    let d = d_cr_factored(&p1, &pa)?.value;
    let mu = margin(&p1, &c)?.value;
    let err = (d - delay_example::closed_form_distance(1.2)).abs();
    Ok((
        err <= 1e-6 && (3.20..=3.25).contains(&(1.0 / mu)),
        format!("d_cr(p_1, p_1.2) error {err:.2e}, 1/mu = {:.5}", 1.0 / mu),
    ))
}

/// Runs the suite with a fixed seed.
pub fn run(seed: u64) -> Vec<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (ok, detail) = chordal_identity(&mut rng, 10_000);
    vec![
        CheckOutcome::from_result("metric axioms", metric_axioms(&mut rng, 20)),
        CheckOutcome::from_result("winding vs root count", winding_oracle(&mut rng, 50)),
        CheckOutcome::new("chordal identity", ok, detail),
        CheckOutcome::from_result("robustness bound", robustness_bound(&mut rng, 10)),
        CheckOutcome::from_result("delay example", delay_example_check()),
    ]
}
