//! Coprime factorizations `p = n / d` with Bezout witnesses `n x + d y = 1`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::boundary::{sup_modulus, AlgebraInstance, BoundaryProfile, Domain, Expr, Site, StableElement};
use crate::error::{Error, Result};
use crate::index::{index, index_is_identity, is_invertible};
use crate::poly::Polynomial;
use crate::search::Mode;

/// Relative pivot threshold below which a Sylvester system is singular.
const SINGULAR_PIVOT: f64 = 1e-10;
/// Roots closer than this (relative) are treated as one common factor.
const COMMON_ROOT_TOL: f64 = 1e-6;
pub const BEZOUT_TOL: f64 = 1e-8;
pub const NORMALIZATION_TOL: f64 = 1e-8;
/// Roots of the spectral density this close to the imaginary axis abort
/// the spectral factorization.
const AXIS_ROOT_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Bezout {
    pub x: StableElement,
    pub y: StableElement,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoprimeFactorization {
    pub n: StableElement,
    pub d: StableElement,
    pub bezout: Option<Bezout>,
    #[serde(skip)]
    pub instance: AlgebraInstance,
}

impl CoprimeFactorization {
    /// Checks domains, `d != 0` and the coprimeness gap.
    pub fn new(n: StableElement, d: StableElement, bezout: Option<Bezout>, instance: &AlgebraInstance) -> Result<Self> {
        let domain = instance.domain();
        let mut elems = vec![&n, &d];
        if let Some(b) = &bezout {
            elems.push(&b.x);
            elems.push(&b.y);
        }
        if elems.iter().any(|e| e.domain() != domain) {
            return Err(Error::DomainMismatch);
        }
        if d.is_zero() {
            return Err(Error::InvalidElement("denominator factor d must be nonzero".into()));
        }
        let gap = coprimeness_gap(&n, &d, instance)?;
        if gap <= instance.tolerances.invertibility_tol {
            return Err(Error::NotCoprime(format!("coprimeness gap {gap:e}")));
        }
        Ok(CoprimeFactorization {
            n,
            d,
            bezout,
            instance: instance.clone(),
        })
    }

    pub fn delay_profile(&self) -> BoundaryProfile {
        BoundaryProfile::of([&self.n, &self.d])
    }

    /// `(n(site), d(site))`
    pub fn eval(&self, site: &Site) -> Result<(Complex64, Complex64)> {
        Ok((self.n.eval_site(site)?, self.d.eval_site(site)?))
    }
}

/// A plant in the field of fractions of `R`.
#[derive(Clone, Debug, PartialEq)]
pub enum Fraction {
    /// `num / den` with polynomial data (in `s` or `z` depending on the instance).
    Rational {
        num: Polynomial,
        den: Polynomial,
    },
    Factored(CoprimeFactorization),
}

impl Fraction {
    pub fn rational(num: &[f64], den: &[f64]) -> Self {
        Fraction::Rational {
            num: Polynomial::new(num.to_vec()),
            den: Polynomial::new(den.to_vec()),
        }
    }
}

/// A factorization with `|n|^2 + |d|^2 = 1` on the boundary.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormalizedCF {
    pub cf: CoprimeFactorization,
    /// `sup | |n|^2 + |d|^2 - 1 |`
    pub residual: f64,
}

pub fn verify_bezout(cf: &CoprimeFactorization) -> Result<f64> {
    let b = cf.bezout.as_ref().ok_or(Error::MissingWitness)?;
    let expr = Expr::from(&cf.n) * Expr::from(&b.x) + Expr::from(&cf.d) * Expr::from(&b.y) - Expr::constant(1.0);
    Ok(sup_modulus(&expr, &cf.instance)?.value)
}

fn in_closed_region(domain: Domain, z: Complex64) -> bool {
    match domain {
        Domain::HalfPlane => z.re >= -1e-9,
        Domain::Circle => z.norm() <= 1.0 + 1e-9,
    }
}

fn vanishes_at(p: &Polynomial, z: Complex64) -> bool {
    let scale: f64 = p
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| c.abs() * z.norm().powi(i as i32))
        .sum();
    p.eval(z).norm() <= 1e-7 * scale.max(f64::MIN_POSITIVE)
}

/// `inf sqrt(|n|^2 + |d|^2)` over the boundary; 0 when delay-free `n`, `d`
/// share a zero in the closed stability region.
pub fn coprimeness_gap(n: &StableElement, d: &StableElement, instance: &AlgebraInstance) -> Result<f64> {
    let domain = instance.domain();
    if n.domain() != domain || d.domain() != domain {
        return Err(Error::DomainMismatch);
    }
    if let (Some(rn), Some(rd)) = (n.as_rational(), d.as_rational()) {
        if rn.is_zero() && rd.is_zero() {
            return Ok(0.0);
        }
        if !rn.is_zero() && !rd.is_zero() {
            let common = rn
                .num
                .roots()
                .into_iter()
                .filter(|&z| in_closed_region(domain, z))
                .any(|z| vanishes_at(&rd.num, z));
            if common {
                return Ok(0.0);
            }
        }
    }
    let norm = |site: &Site| -> Result<f64> {
        let a = n.eval_site(site)?;
        let b = d.eval_site(site)?;
        Ok((a.norm_sqr() + b.norm_sqr()).sqrt())
    };
    Ok(instance.extremum(&norm, BoundaryProfile::of([n, d]), Mode::Min)?.value)
}

/// Removes roots shared by `num` and `den`.
fn cancel_common(num: &Polynomial, den: &Polynomial) -> (Polynomial, Polynomial) {
    let rn = num.roots();
    let mut rd = den.roots();
    let mut kept_n = Vec::with_capacity(rn.len());
    let mut cancelled = false;
    for r in rn {
        let hit = rd
            .iter()
            .position(|q| (q - r).norm() <= COMMON_ROOT_TOL * r.norm().max(1.0));
        match hit {
            Some(j) => {
                rd.swap_remove(j);
                cancelled = true;
            }
            None => kept_n.push(r),
        }
    }
    if !cancelled {
        return (num.clone(), den.clone());
    }
    (
        Polynomial::from_roots(&kept_n, num.leading()),
        Polynomial::from_roots(&rd, den.leading()),
    )
}

/// Solves `a p + b q = target` with `deg p <= dp`, `deg q <= dq` through a
/// column-pivoted QR factorization of the Sylvester-type matrix.
fn solve_diophantine(
    a: &Polynomial,
    b: &Polynomial,
    target: &Polynomial,
    dp: usize,
    dq: usize,
) -> Result<(Polynomial, Polynomial)> {
    let cols = dp + dq + 2;
    let rows = (a.degree() + dp).max(b.degree() + dq).max(target.degree()) + 1;
    if rows != cols {
        return Err(Error::SolveFailed(format!("non-square system {rows}x{cols}")));
    }
    let mut m = DMatrix::<f64>::zeros(rows, cols);
    for j in 0..=dp {
        for (i, &c) in a.coeffs().iter().enumerate() {
            m[(i + j, j)] = c;
        }
    }
    for j in 0..=dq {
        for (i, &c) in b.coeffs().iter().enumerate() {
            m[(i + j, dp + 1 + j)] = c;
        }
    }
    let rhs = DVector::from_iterator(rows, (0..rows).map(|i| target.coeff(i)));
    let qr = m.col_piv_qr();
    let r = qr.r();
    let diag: Vec<f64> = (0..rows).map(|i| r[(i, i)].abs()).collect();
    let max = diag.iter().cloned().fold(0.0, f64::max);
    let min = diag.iter().cloned().fold(f64::INFINITY, f64::min);
    if max == 0.0 || min <= SINGULAR_PIVOT * max {
        return Err(Error::SolveFailed("singular Sylvester system (common factor)".into()));
    }
    let sol = qr
        .solve(&rhs)
        .ok_or_else(|| Error::SolveFailed("Sylvester solve failed".into()))?;
    let p = Polynomial::new(sol.iter().take(dp + 1).copied().collect());
    let q = Polynomial::new(sol.iter().skip(dp + 1).copied().collect());
    Ok((p, q))
}

/// Witness polynomials for `n = N / m`, `d = D / m` with `deg m = k`:
/// `N P + D Q = m^2`, so `x = P / m`, `y = Q / m`.
fn half_plane_witnesses(num: &Polynomial, den: &Polynomial, m: &Polynomial) -> Result<(Polynomial, Polynomial)> {
    let k = m.degree();
    let target = m * m;
    if den.degree() == k {
        solve_diophantine(num, den, &target, k.saturating_sub(1), k)
    } else {
        solve_diophantine(num, den, &target, k, k - 1)
    }
}

fn zero_plant(instance: &AlgebraInstance) -> Result<CoprimeFactorization> {
    let domain = instance.domain();
    CoprimeFactorization::new(
        StableElement::zero(domain),
        StableElement::one(domain),
        Some(Bezout {
            x: StableElement::zero(domain),
            y: StableElement::one(domain),
        }),
        instance,
    )
}

fn constant_plant(num: f64, den: f64, instance: &AlgebraInstance) -> Result<CoprimeFactorization> {
    let domain = instance.domain();
    let norm = num * num + den * den;
    CoprimeFactorization::new(
        StableElement::constant(domain, num),
        StableElement::constant(domain, den),
        Some(Bezout {
            x: StableElement::constant(domain, num / norm),
            y: StableElement::constant(domain, den / norm),
        }),
        instance,
    )
}

fn check_witnesses(cf: CoprimeFactorization) -> Result<CoprimeFactorization> {
    let residual = verify_bezout(&cf)?;
    if residual > BEZOUT_TOL {
        return Err(Error::SolveFailed(format!("Bezout residual {residual:e}")));
    }
    Ok(cf)
}

/// Coprime factorization of a delay-free rational plant.
///
/// On the half-plane `n = N / (s+1)^k`, `d = D / (s+1)^k` with
/// `k = max(deg N, deg D)`; on the circle `n = N`, `d = D`.
pub fn coprime_factorize(p: &Fraction, instance: &AlgebraInstance) -> Result<CoprimeFactorization> {
    let (num, den) = match p {
        Fraction::Factored(cf) => {
            if cf.instance.domain() != instance.domain() {
                return Err(Error::DomainMismatch);
            }
            let mut cf = cf.clone();
            cf.instance = instance.clone();
            return Ok(cf);
        }
        Fraction::Rational { num, den } => (num, den),
    };
    if den.is_zero() {
        return Err(Error::InvalidElement("zero denominator".into()));
    }
    if num.is_zero() {
        return zero_plant(instance);
    }
    let (num, den) = cancel_common(num, den);
    if num.degree() == 0 && den.degree() == 0 {
        return constant_plant(num.leading(), den.leading(), instance);
    }
    let domain = instance.domain();
    let cf = match domain {
        Domain::HalfPlane => {
            let k = num.degree().max(den.degree());
            let m = Polynomial::linear_power(1.0, k);
            let (px, qy) = half_plane_witnesses(&num, &den, &m)?;
            let elem = |p: Polynomial| StableElement::rational(domain, p, m.clone());
            CoprimeFactorization::new(
                elem(num)?,
                elem(den)?,
                Some(Bezout {
                    x: elem(px)?,
                    y: elem(qy)?,
                }),
                instance,
            )?
        }
        Domain::Circle => {
            let (x, y) = if num.degree() == 0 {
                (Polynomial::constant(1.0 / num.leading()), Polynomial::zero())
            } else if den.degree() == 0 {
                (Polynomial::zero(), Polynomial::constant(1.0 / den.leading()))
            } else {
                solve_diophantine(&num, &den, &Polynomial::one(), den.degree() - 1, num.degree() - 1)?
            };
            let elem = |p: Polynomial| StableElement::rational(domain, p, Polynomial::one());
            CoprimeFactorization::new(
                elem(num)?,
                elem(den)?,
                Some(Bezout {
                    x: elem(x)?,
                    y: elem(y)?,
                }),
                instance,
            )?
        }
    };
    check_witnesses(cf)
}

/// `(n u, d u)` for a unit `u` of `R`; witnesses become `(x / u, y / u)`
/// when `1 / u` is representable.
pub fn unit_rescale(cf: &CoprimeFactorization, u: &StableElement) -> Result<CoprimeFactorization> {
    let instance = &cf.instance;
    if u.domain() != instance.domain() {
        return Err(Error::DomainMismatch);
    }
    let expr = Expr::from(u);
    let report = is_invertible(&expr, instance)?;
    if !report.invertible {
        return Err(Error::NotAUnit);
    }
    let idx = match index(&expr, instance) {
        Ok(idx) => idx,
        Err(Error::NotInvertible { .. } | Error::ApNotInvertible { .. }) => return Err(Error::NotAUnit),
        Err(e) => return Err(e),
    };
    if !index_is_identity(&idx, instance)? {
        return Err(Error::NotAUnit);
    }
    let bezout = match (&cf.bezout, u.rational_inverse()) {
        (Some(b), Some(inv)) => Some(Bezout {
            x: b.x.mul(&inv)?,
            y: b.y.mul(&inv)?,
        }),
        _ => None,
    };
    CoprimeFactorization::new(cf.n.mul(u)?, cf.d.mul(u)?, bezout, instance)
}

/// Stable spectral factor `m` with `m(-s) m(s) = N(-s) N(s) + D(-s) D(s)`.
fn spectral_factor(num: &Polynomial, den: &Polynomial) -> Result<Polynomial> {
    let density = &(&num.reflect() * num) + &(&den.reflect() * den);
    // even polynomial: coefficients of s^(2j)
    let in_u = Polynomial::new(density.coeffs().iter().step_by(2).copied().collect());
    let q = in_u.degree();
    let lead = in_u.leading() * if q.is_multiple_of(2) { 1.0 } else { -1.0 };
    if !(lead > 0.0) {
        return Err(Error::SpectralFactorizationFailed(
            "spectral density has no positive leading term".into(),
        ));
    }
    let mut roots = Vec::with_capacity(q);
    for u in in_u.roots() {
        let s = u.sqrt();
        if s.re.abs() <= AXIS_ROOT_TOL * s.norm().max(1.0) {
            return Err(Error::SpectralFactorizationFailed(format!(
                "root {s} on the imaginary axis"
            )));
        }
        roots.push(if s.re > 0.0 { -s } else { s });
    }
    Ok(Polynomial::from_roots(&roots, lead.sqrt()))
}

/// Normalized coprime factorization of a delay-free half-plane plant via
/// polynomial spectral factorization.
pub fn normalized_cf_rational(p: &Fraction, instance: &AlgebraInstance) -> Result<NormalizedCF> {
    if instance.domain() != Domain::HalfPlane {
        return Err(Error::DomainMismatch);
    }
    let (num, den) = match p {
        Fraction::Rational { num, den } => (num, den),
        Fraction::Factored(_) => {
            return Err(Error::InvalidElement(
                "normalized factors need polynomial plant data".into(),
            ))
        }
    };
    if den.is_zero() {
        return Err(Error::InvalidElement("zero denominator".into()));
    }
    let cf = if num.is_zero() {
        zero_plant(instance)?
    } else {
        let (num, den) = cancel_common(num, den);
        let m = spectral_factor(&num, &den)?;
        let domain = instance.domain();
        let elem = |p: Polynomial| StableElement::rational(domain, p, m.clone());
        let bezout = if m.degree() == 0 {
            let norm = num.leading().powi(2) + den.leading().powi(2);
            let c = m.leading();
            Some(Bezout {
                x: StableElement::constant(domain, num.leading() * c / norm),
                y: StableElement::constant(domain, den.leading() * c / norm),
            })
        } else {
            let (px, qy) = half_plane_witnesses(&num, &den, &m)?;
            Some(Bezout {
                x: elem(px)?,
                y: elem(qy)?,
            })
        };
        check_witnesses(CoprimeFactorization::new(elem(num)?, elem(den)?, bezout, instance)?)?
    };
    let residual = normalization_residual(&cf)?;
    if residual > NORMALIZATION_TOL {
        return Err(Error::SpectralFactorizationFailed(format!(
            "normalization residual {residual:e}"
        )));
    }
    Ok(NormalizedCF { cf, residual })
}

pub fn normalization_residual(cf: &CoprimeFactorization) -> Result<f64> {
    let f = |site: &Site| -> Result<f64> {
        let (n, d) = cf.eval(site)?;
        Ok((n.norm_sqr() + d.norm_sqr() - 1.0).abs())
    };
    Ok(cf.instance.extremum(&f, cf.delay_profile(), Mode::Max)?.value)
}

impl NormalizedCF {
    /// Wraps an existing factorization after checking the normalization.
    pub fn from_cf(cf: CoprimeFactorization) -> Result<Self> {
        let residual = normalization_residual(&cf)?;
        if residual > NORMALIZATION_TOL {
            return Err(Error::NotNormalized(residual));
        }
        Ok(NormalizedCF { cf, residual })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::Term;
    use crate::poly::Rational;

    fn hp() -> AlgebraInstance {
        AlgebraInstance::halfplane_c0ap()
    }

    fn elem(num: &[f64], den: &[f64]) -> StableElement {
        StableElement::from_coeffs(Domain::HalfPlane, num, den).unwrap()
    }

    fn section7_cf() -> CoprimeFactorization {
        let d = StableElement::new(
            Domain::HalfPlane,
            vec![
                Term::new(Rational::new(vec![0.0, 1.0].into(), vec![1.0, 1.0].into()), 0.0),
                Term::new(Rational::new(vec![-1.0].into(), vec![1.0, 1.0].into()), 1.0),
            ],
        )
        .unwrap();
        let x = StableElement::new(
            Domain::HalfPlane,
            vec![
                Term::new(Rational::constant(1.0), 0.0),
                Term::new(Rational::constant(1.0), 1.0),
            ],
        )
        .unwrap();
        CoprimeFactorization::new(
            elem(&[1.0], &[1.0, 1.0]),
            d,
            Some(Bezout {
                x,
                y: StableElement::one(Domain::HalfPlane),
            }),
            &hp(),
        )
        .unwrap()
    }

    #[test]
    fn bezout_examples() {
        let inst = hp();
        let trivial = CoprimeFactorization::new(
            StableElement::zero(Domain::HalfPlane),
            StableElement::one(Domain::HalfPlane),
            Some(Bezout {
                x: StableElement::zero(Domain::HalfPlane),
                y: StableElement::one(Domain::HalfPlane),
            }),
            &inst,
        )
        .unwrap();
        assert_eq!(verify_bezout(&trivial).unwrap(), 0.0);

        let cf = section7_cf();
        assert!(verify_bezout(&cf).unwrap() < 1e-12);

        let mut perturbed = cf.clone();
        let b = perturbed.bezout.as_mut().unwrap();
        b.x = b.x.add(&StableElement::constant(Domain::HalfPlane, 0.01)).unwrap();
        assert!((verify_bezout(&perturbed).unwrap() - 0.01).abs() < 1e-9);

        let no_witness = CoprimeFactorization { bezout: None, ..cf };
        assert_eq!(verify_bezout(&no_witness), Err(Error::MissingWitness));
    }

    #[test]
    fn gap_examples() {
        let inst = hp();
        let g = coprimeness_gap(
            &StableElement::zero(Domain::HalfPlane),
            &StableElement::one(Domain::HalfPlane),
            &inst,
        )
        .unwrap();
        assert_eq!(g, 1.0);
        let circle = AlgebraInstance::circle();
        let e = StableElement::from_coeffs(Domain::Circle, &[-0.5, 1.0], &[1.0]).unwrap();
        assert_eq!(coprimeness_gap(&e, &e, &circle).unwrap(), 0.0);
        let cf = section7_cf();
        let gap = coprimeness_gap(&cf.n, &cf.d, &inst).unwrap();
        assert!(gap > 0.1 && gap < 1.0, "{gap}");
        // both strictly proper: common zero at infinity
        let a = elem(&[1.0], &[1.0, 1.0]);
        let b = elem(&[2.0], &[2.0, 1.0]);
        assert!(coprimeness_gap(&a, &b, &inst).unwrap() < 1e-9);
        assert!(matches!(
            CoprimeFactorization::new(a, b, None, &inst),
            Err(Error::NotCoprime(_))
        ));
    }

    #[test]
    fn factorize_unstable_first_order() {
        let cf = coprime_factorize(&Fraction::rational(&[1.0], &[-1.0, 1.0]), &hp()).unwrap();
        assert_eq!(
            cf.n.as_rational().unwrap(),
            Rational::new(vec![1.0].into(), vec![1.0, 1.0].into())
        );
        assert_eq!(
            cf.d.as_rational().unwrap(),
            Rational::new(vec![-1.0, 1.0].into(), vec![1.0, 1.0].into())
        );
        assert!(verify_bezout(&cf).unwrap() <= BEZOUT_TOL);
    }

    #[test]
    fn factorize_zero_and_unit() {
        let cf = coprime_factorize(&Fraction::rational(&[0.0], &[1.0, 2.0]), &hp()).unwrap();
        assert!(cf.n.is_zero());
        assert_eq!(cf.d, StableElement::one(Domain::HalfPlane));
        let b = cf.bezout.unwrap();
        assert!(b.x.is_zero());
        assert_eq!(b.y, StableElement::one(Domain::HalfPlane));

        let cf = coprime_factorize(&Fraction::rational(&[-1.0, 1.0], &[-1.0, 1.0]), &hp()).unwrap();
        let n = cf.n.as_rational().unwrap();
        let d = cf.d.as_rational().unwrap();
        assert_eq!(n.num.degree(), 0);
        assert_eq!(d.num.degree(), 0);
        assert!((n.num.leading() - d.num.leading()).abs() < 1e-12);
    }

    #[test]
    fn factorize_on_circle() {
        let inst = AlgebraInstance::circle();
        let cf = coprime_factorize(&Fraction::rational(&[1.0, 0.5], &[-0.3, 0.2, 1.0]), &inst).unwrap();
        assert!(verify_bezout(&cf).unwrap() <= BEZOUT_TOL);
        let cf = coprime_factorize(&Fraction::rational(&[2.0], &[-0.5, 1.0]), &inst).unwrap();
        assert!(verify_bezout(&cf).unwrap() <= BEZOUT_TOL);
    }

    #[test]
    fn factorize_improper_and_higher_order() {
        let inst = hp();
        for (num, den) in [
            (vec![1.0, 2.0, 1.0], vec![3.0, 1.0]),
            (vec![-2.0, 0.5, 1.0, 0.2], vec![1.0, -3.0, 0.1, 0.5, 1.0]),
            (vec![5.0], vec![0.0, 0.0, 1.0]),
        ] {
            let cf = coprime_factorize(&Fraction::rational(&num, &den), &inst).unwrap();
            assert!(verify_bezout(&cf).unwrap() <= BEZOUT_TOL);
        }
    }

    #[test]
    fn rescale_examples() {
        let cf = coprime_factorize(&Fraction::rational(&[1.0], &[-1.0, 1.0]), &hp()).unwrap();
        let same = unit_rescale(&cf, &StableElement::one(Domain::HalfPlane)).unwrap();
        assert_eq!(same.n.as_rational(), cf.n.as_rational());
        let u = elem(&[2.0, 1.0], &[1.0, 1.0]);
        let scaled = unit_rescale(&cf, &u).unwrap();
        assert!(verify_bezout(&scaled).unwrap() < 1e-9);
        let not_unit = elem(&[-1.0, 1.0], &[1.0, 1.0]);
        assert_eq!(unit_rescale(&cf, &not_unit), Err(Error::NotAUnit));
    }

    #[test]
    fn normalized_examples() {
        let inst = hp();
        let z = normalized_cf_rational(&Fraction::rational(&[0.0], &[1.0]), &inst).unwrap();
        assert!(z.cf.n.is_zero());

        let ncf = normalized_cf_rational(&Fraction::rational(&[1.0], &[0.0, 1.0]), &inst).unwrap();
        let n = ncf.cf.n.as_rational().unwrap();
        let d = ncf.cf.d.as_rational().unwrap();
        assert!((n.den.coeff(0) - 1.0).abs() < 1e-12 && (n.den.coeff(1) - 1.0).abs() < 1e-12);
        assert!((n.num.coeff(0) - 1.0).abs() < 1e-12);
        assert!((d.num.coeff(1) - 1.0).abs() < 1e-12 && d.num.coeff(0).abs() < 1e-12);
        assert!(ncf.residual <= NORMALIZATION_TOL);

        let ncf = normalized_cf_rational(&Fraction::rational(&[1.0], &[-1.0, 1.0]), &inst).unwrap();
        let n = ncf.cf.n.as_rational().unwrap();
        assert!((n.den.coeff(0) - 2f64.sqrt()).abs() < 1e-12);
        assert!((n.den.coeff(1) - 1.0).abs() < 1e-12);
        assert!(verify_bezout(&ncf.cf).unwrap() <= BEZOUT_TOL);
    }

    #[test]
    fn normalized_rejects_axis_roots() {
        // N = s^2 - 1 ... density with an imaginary-axis root: p = 0/1 excluded; use D = 0 polynomial pair
        // N(-s)N(s) + D(-s)D(s) = (1 - s^2)^2 + 0 has roots at +-1 (fine); pick N = s, D = s: cancels to 1/1.
        // A genuine axis root needs N, D vanishing together on the axis, which cancellation removes,
        // so exercise the factor directly.
        let err = spectral_factor(&Polynomial::new(vec![0.0, 1.0]), &Polynomial::new(vec![0.0, 1.0]));
        assert!(matches!(err, Err(Error::SpectralFactorizationFailed(_))));
    }
}
