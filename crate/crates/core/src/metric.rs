//! The chordal distance `kappa` and the metric `d_cr` built from it.

use num_complex::Complex64;
use serde::Serialize;

use crate::boundary::{AlgebraInstance, BoundaryPoint, BoundaryProfile, Expr, SampledCurve, Site};
use crate::error::{Error, Result};
use crate::factorization::{
    coprime_factorize, normalization_residual, CoprimeFactorization, Fraction, NormalizedCF, NORMALIZATION_TOL,
};
use crate::index::{index, index_is_identity, is_invertible, IndexValue};
use crate::search::Mode;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    KappaSup,
    IndexConditionFailed,
}

/// Invertibility and index of `f = n1* n2 + d1* d2`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IndexCondition {
    pub invertible: bool,
    pub min_modulus: f64,
    pub sup_modulus: f64,
    pub threshold: f64,
    pub index: Option<IndexValue>,
    pub holds: bool,
    /// `min_modulus` lies within a decade of the invertibility threshold.
    pub ambiguous: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridReport {
    pub grid_points: usize,
    pub achieved_tol: f64,
    pub window: Option<f64>,
    pub branch_ambiguous: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetricResult {
    pub value: f64,
    pub branch: Branch,
    pub condition: IndexCondition,
    pub grid_report: GridReport,
    /// Boundary site where the sup of kappa was found.
    pub witness: Option<Site>,
}

fn same_instance(cf1: &CoprimeFactorization, cf2: &CoprimeFactorization) -> Result<()> {
    if cf1.instance.kind != cf2.instance.kind {
        return Err(Error::InvalidInstance(
            "factorizations belong to different algebra instances".into(),
        ));
    }
    Ok(())
}

/// `|a|^2 + |b|^2` checked against the coprimeness floor.
fn pair_norm(a: Complex64, b: Complex64, site: &Site, floor: f64) -> Result<f64> {
    let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
    if norm <= floor {
        return Err(Error::DegenerateDenominator { theta: site.theta() });
    }
    Ok(norm)
}

/// Pointwise chordal distance at one boundary site.
pub fn kappa_at(cf1: &CoprimeFactorization, cf2: &CoprimeFactorization, site: &Site) -> Result<f64> {
    let floor = cf1.instance.tolerances.invertibility_tol;
    let (n1, d1) = cf1.eval(site)?;
    let (n2, d2) = cf2.eval(site)?;
    let a = pair_norm(n1, d1, site, floor)?;
    let b = pair_norm(n2, d2, site, floor)?;
    Ok((n1 * d2 - n2 * d1).norm() / a / b)
}

/// Samples of `kappa` on the given theta grid.
pub fn kappa(cf1: &CoprimeFactorization, cf2: &CoprimeFactorization, grid: &[f64]) -> Result<SampledCurve> {
    same_instance(cf1, cf2)?;
    let values = grid
        .iter()
        .map(|&theta| {
            let site = Site::Boundary(BoundaryPoint::new(theta)?);
            kappa_at(cf1, cf2, &site).map(|k| Complex64::new(k, 0.0))
        })
        .collect::<Result<Vec<_>>>()?;
    SampledCurve::new(grid.to_vec(), values, true)
}

/// Invertibility in `S` and index of `n1* n2 + d1* d2`.
pub fn index_condition(cf1: &CoprimeFactorization, cf2: &CoprimeFactorization) -> Result<IndexCondition> {
    same_instance(cf1, cf2)?;
    let instance = &cf1.instance;
    let f = Expr::from(&cf1.n).conj() * Expr::from(&cf2.n) + Expr::from(&cf1.d).conj() * Expr::from(&cf2.d);
    let report = is_invertible(&f, instance)?;
    let ambiguous = report.threshold > 0.0 && (report.min_modulus / report.threshold).log10().abs() <= 1.0;
    let mut cond = IndexCondition {
        invertible: report.invertible,
        min_modulus: report.min_modulus,
        sup_modulus: report.sup_modulus,
        threshold: report.threshold,
        index: None,
        holds: false,
        ambiguous,
    };
    if !report.invertible {
        return Ok(cond);
    }
    match index(&f, instance) {
        Ok(idx) => {
            cond.holds = index_is_identity(&idx, instance)?;
            cond.index = Some(idx);
        }
        Err(
            Error::NotInvertible { .. }
            | Error::ApNotInvertible { .. }
            | Error::CurveThroughZero { .. }
            | Error::NotInvertibleOnCircle(_),
        ) => {
            cond.invertible = false;
            cond.ambiguous = true;
        }
        Err(e) => return Err(e),
    }
    Ok(cond)
}

/// `d_cr` for two coprime factorizations.
pub fn d_cr_factored(cf1: &CoprimeFactorization, cf2: &CoprimeFactorization) -> Result<MetricResult> {
    let condition = index_condition(cf1, cf2)?;
    if !condition.holds {
        let branch_ambiguous = condition.ambiguous;
        return Ok(MetricResult {
            value: 1.0,
            branch: Branch::IndexConditionFailed,
            condition,
            grid_report: GridReport {
                grid_points: 0,
                achieved_tol: 0.0,
                window: None,
                branch_ambiguous,
            },
            witness: None,
        });
    }
    let profile = BoundaryProfile::of([&cf1.n, &cf1.d, &cf2.n, &cf2.d]);
    let f = |site: &Site| kappa_at(cf1, cf2, site);
    let sup = cf1.instance.extremum(&f, profile, Mode::Max)?;
    Ok(MetricResult {
        value: sup.value,
        branch: Branch::KappaSup,
        grid_report: GridReport {
            grid_points: sup.grid_points,
            achieved_tol: sup.achieved_tol,
            window: sup.window,
            branch_ambiguous: condition.ambiguous,
        },
        condition,
        witness: Some(sup.site),
    })
}

/// `d_cr(p1, p2)`, factorizing rational plants as needed.
pub fn d_cr(p1: &Fraction, p2: &Fraction, instance: &AlgebraInstance) -> Result<MetricResult> {
    let cf1 = coprime_factorize(p1, instance)?;
    let cf2 = coprime_factorize(p2, instance)?;
    d_cr_factored(&cf1, &cf2)
}

/// The same computation restricted to normalized factorizations.
pub fn d_nu(ncf1: &NormalizedCF, ncf2: &NormalizedCF) -> Result<MetricResult> {
    for ncf in [ncf1, ncf2] {
        let residual = normalization_residual(&ncf.cf)?;
        if residual > NORMALIZATION_TOL {
            return Err(Error::NotNormalized(residual));
        }
    }
    d_cr_factored(&ncf1.cf, &ncf2.cf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::{Domain, StableElement, Term};
    use crate::factorization::{normalized_cf_rational, Bezout};
    use crate::poly::Rational;

    fn hp() -> AlgebraInstance {
        AlgebraInstance::halfplane_c0ap()
    }

    fn p_a(a: f64) -> CoprimeFactorization {
        let d = StableElement::new(
            Domain::HalfPlane,
            vec![
                Term::new(Rational::new(vec![0.0, 1.0].into(), vec![1.0, 1.0].into()), 0.0),
                Term::new(Rational::new(vec![-a].into(), vec![1.0, 1.0].into()), 1.0),
            ],
        )
        .unwrap();
        let n = StableElement::from_coeffs(Domain::HalfPlane, &[1.0], &[1.0, 1.0]).unwrap();
        CoprimeFactorization::new(n, d, None, &hp()).unwrap()
    }

    fn rational(num: &[f64], den: &[f64]) -> CoprimeFactorization {
        coprime_factorize(&Fraction::rational(num, den), &hp()).unwrap()
    }

    #[test]
    fn kappa_examples() {
        let zero = rational(&[0.0], &[1.0]);
        let one = rational(&[1.0], &[1.0]);
        let grid = SampledCurve::uniform_grid(64);
        let k = kappa(&zero, &one, &grid).unwrap();
        assert!(k.values().iter().all(|v| (v.re - 0.5f64.sqrt()).abs() < 1e-15));
        let k = kappa(&one, &one, &grid).unwrap();
        assert!(k.values().iter().all(|v| v.re == 0.0));

        let (a, y) = (1.3, 0.7);
        let closed = (a - 1.0f64).abs()
            / (1.0 + y * y)
            / (((2.0 + 2.0 * y * y.sin() + y * y) / (1.0 + y * y)).sqrt()
                * ((1.0 + y * y + a * a + 2.0 * a * y * y.sin()) / (1.0 + y * y)).sqrt());
        let k = kappa_at(&p_a(1.0), &p_a(a), &Site::Axis(y)).unwrap();
        assert!((k - closed).abs() < 1e-14);
    }

    #[test]
    fn worked_example_metric() {
        let r = d_cr_factored(&p_a(1.0), &p_a(1.2)).unwrap();
        assert_eq!(r.branch, Branch::KappaSup);
        assert!((r.value - 0.2 / 4.88f64.sqrt()).abs() < 1e-6, "{}", r.value);
    }

    #[test]
    fn identity_and_index_branch() {
        let p = rational(&[1.0], &[-1.0, 1.0]);
        let r = d_cr_factored(&p, &p).unwrap();
        assert_eq!((r.value, r.branch), (0.0, Branch::KappaSup));

        let zero = rational(&[0.0], &[1.0]);
        let cond = index_condition(&zero, &p).unwrap();
        assert!(cond.invertible && !cond.holds);
        // the zero of d in the right half-plane winds once, clockwise as omega increases
        assert_eq!(cond.index.unwrap().winding(), -1);
        let r = d_cr_factored(&zero, &p).unwrap();
        assert_eq!((r.value, r.branch), (1.0, Branch::IndexConditionFailed));
    }

    #[test]
    fn d_nu_examples() {
        let inst = hp();
        let zero = normalized_cf_rational(&Fraction::rational(&[0.0], &[1.0]), &inst).unwrap();
        let one = normalized_cf_rational(&Fraction::rational(&[1.0], &[1.0]), &inst).unwrap();
        assert!((d_nu(&zero, &one).unwrap().value - 0.5f64.sqrt()).abs() < 1e-12);
        assert_eq!(d_nu(&one, &one).unwrap().value, 0.0);

        let raw = CoprimeFactorization::new(
            StableElement::constant(Domain::HalfPlane, 2.0),
            StableElement::one(Domain::HalfPlane),
            Some(Bezout {
                x: StableElement::constant(Domain::HalfPlane, 0.5),
                y: StableElement::zero(Domain::HalfPlane),
            }),
            &inst,
        )
        .unwrap();
        let fake = NormalizedCF { cf: raw, residual: 0.0 };
        assert!(matches!(d_nu(&fake, &one), Err(Error::NotNormalized(_))));
    }

    #[test]
    fn mismatched_instances() {
        let a = rational(&[1.0], &[1.0]);
        let b = coprime_factorize(&Fraction::rational(&[1.0], &[1.0]), &AlgebraInstance::circle()).unwrap();
        assert!(matches!(d_cr_factored(&a, &b), Err(Error::InvalidInstance(_))));
    }
}
