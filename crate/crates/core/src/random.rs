//! Seeded generators of random plants for property checks.

use num_complex::Complex64;
use rand::Rng;

use crate::boundary::{Domain, StableElement};
use crate::factorization::Fraction;
use crate::poly::Polynomial;

/// Minimum distance of generated roots from the boundary.
pub const BOUNDARY_CLEARANCE: f64 = 0.2;
/// Minimum distance between a numerator and a denominator root.
pub const ROOT_SEPARATION: f64 = 0.15;

fn signed<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    let v = rng.gen_range(lo..hi);
    if rng.gen_bool(0.5) {
        v
    } else {
        -v
    }
}

/// `count` roots closed under conjugation, each at least
/// [`BOUNDARY_CLEARANCE`] away from the boundary of `domain`.
pub fn random_roots<R: Rng>(rng: &mut R, count: usize, domain: Domain, stable_only: bool) -> Vec<Complex64> {
    let mut roots = Vec::with_capacity(count);
    while roots.len() < count {
        let pair = count - roots.len() >= 2 && rng.gen_bool(0.5);
        let z = match domain {
            Domain::HalfPlane => {
                let re = if stable_only {
                    -rng.gen_range(BOUNDARY_CLEARANCE..3.0)
                } else {
                    signed(rng, BOUNDARY_CLEARANCE, 3.0)
                };
                Complex64::new(re, if pair { rng.gen_range(0.1..3.0) } else { 0.0 })
            }
            Domain::Circle => {
                let r = if stable_only || rng.gen_bool(0.5) {
                    rng.gen_range(1.0 + BOUNDARY_CLEARANCE..3.0)
                } else {
                    rng.gen_range(0.0..1.0 - BOUNDARY_CLEARANCE)
                };
                let phi = if pair {
                    rng.gen_range(0.1..std::f64::consts::PI - 0.1)
                } else if rng.gen_bool(0.5) {
                    0.0
                } else {
                    std::f64::consts::PI
                };
                Complex64::from_polar(r, phi)
            }
        };
        roots.push(z);
        if pair {
            roots.push(z.conj());
        }
    }
    roots
}

fn separated(num: &[Complex64], den: &[Complex64]) -> bool {
    num.iter()
        .all(|a| den.iter().all(|b| (a - b).norm() >= ROOT_SEPARATION))
}

/// Random rational plant with `deg num <= deg den <= max_degree`, no
/// poles or zeros near the boundary and no near-cancellations.
pub fn random_plant<R: Rng>(rng: &mut R, max_degree: usize, domain: Domain) -> Fraction {
    loop {
        let deg_den = rng.gen_range(0..=max_degree);
        let deg_num = rng.gen_range(0..=deg_den);
        let zeros = random_roots(rng, deg_num, domain, false);
        let poles = random_roots(rng, deg_den, domain, false);
        if !separated(&zeros, &poles) {
            continue;
        }
        let gain = signed(rng, 0.5, 2.0);
        return Fraction::Rational {
            num: Polynomial::from_roots(&zeros, gain),
            den: Polynomial::from_roots(&poles, 1.0),
        };
    }
}

/// Random unit of the stable ring: equal-degree numerator and denominator
/// with all roots in the open stable region.
pub fn random_unit<R: Rng>(rng: &mut R, max_degree: usize, domain: Domain) -> StableElement {
    let deg = rng.gen_range(0..=max_degree);
    let zeros = random_roots(rng, deg, domain, true);
    let poles = random_roots(rng, deg, domain, true);
    let gain = signed(rng, 0.5, 2.0);
    StableElement::rational(
        domain,
        Polynomial::from_roots(&zeros, gain),
        Polynomial::from_roots(&poles, 1.0),
    )
    .expect("stable roots give a valid element")
}

/// Random complex number with both parts in `[-scale, scale)`.
pub fn random_complex<R: Rng>(rng: &mut R, scale: f64) -> Complex64 {
    Complex64::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn plants_keep_clear_of_the_axis() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            if let Fraction::Rational { num, den } = random_plant(&mut rng, 4, Domain::HalfPlane) {
                for r in num.roots().into_iter().chain(den.roots()) {
                    assert!(r.re.abs() >= BOUNDARY_CLEARANCE - 1e-6);
                }
            }
        }
    }

    #[test]
    fn units_are_stable() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let u = random_unit(&mut rng, 3, Domain::Circle);
            let r = u.as_rational().unwrap();
            assert!(r.num.roots().iter().all(|z| z.norm() > 1.0));
        }
    }
}
