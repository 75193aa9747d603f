//! Closed-loop stabilization, the stability margin and robustness
//! certificates.

use num_complex::Complex64;
use serde::Serialize;

use crate::boundary::{BoundaryProfile, Expr, Site};
use crate::error::{Error, Result};
use crate::factorization::CoprimeFactorization;
use crate::index::{index, index_is_identity, is_invertible};
use crate::metric::{d_cr_factored, Branch};
use crate::search::Mode;

/// Slack allowed when checking the perturbed margin against the bound.
pub const BOUND_SLACK: f64 = 1e-7;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Margin {
    pub value: f64,
    pub stabilizes: bool,
    pub grid_points: usize,
    pub achieved_tol: f64,
    pub window: Option<f64>,
}

impl Margin {
    fn unstable() -> Self {
        Margin {
            value: 0.0,
            stabilizes: false,
            grid_points: 0,
            achieved_tol: 0.0,
            window: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub mu_nominal: f64,
    pub distance: f64,
    pub distance_branch: Branch,
    pub lower_bound: f64,
    pub stabilized: bool,
    pub mu_perturbed: Option<f64>,
    /// `mu_perturbed >= lower_bound - 1e-7`, when `mu_perturbed` was computed.
    pub bound_holds: Option<bool>,
}

fn same_instance(a: &CoprimeFactorization, b: &CoprimeFactorization) -> Result<()> {
    if a.instance.kind != b.instance.kind {
        return Err(Error::InvalidInstance(
            "plant and controller belong to different algebra instances".into(),
        ));
    }
    Ok(())
}

/// `n_p n_c - d_p d_c`
fn return_difference(p: &CoprimeFactorization, c: &CoprimeFactorization) -> Expr {
    Expr::from(&p.n) * Expr::from(&c.n) - Expr::from(&p.d) * Expr::from(&c.d)
}

/// Whether `c` stabilizes `p`: `n_p n_c - d_p d_c` is invertible in `S`
/// with identity index.
pub fn stabilizes(p: &CoprimeFactorization, c: &CoprimeFactorization) -> Result<bool> {
    same_instance(p, c)?;
    let g = return_difference(p, c);
    if !is_invertible(&g, &p.instance)?.invertible {
        return Ok(false);
    }
    match index(&g, &p.instance) {
        Ok(idx) => index_is_identity(&idx, &p.instance),
        Err(
            Error::NotInvertible { .. }
            | Error::ApNotInvertible { .. }
            | Error::CurveThroughZero { .. }
            | Error::NotInvertibleOnCircle(_),
        ) => Ok(false),
        Err(e) => Err(e),
    }
}

fn profile(p: &CoprimeFactorization, c: &CoprimeFactorization) -> BoundaryProfile {
    BoundaryProfile::of([&p.n, &p.d, &c.n, &c.d])
}

fn factor_norm(n: Complex64, d: Complex64, site: &Site, floor: f64) -> Result<f64> {
    let norm = (n.norm_sqr() + d.norm_sqr()).sqrt();
    if norm <= floor {
        return Err(Error::DegenerateDenominator { theta: site.theta() });
    }
    Ok(norm)
}

/// Stability margin as the boundary infimum of
/// `|n_p n_c - d_p d_c| / (|(n_p, d_p)| |(n_c, d_c)|)`; 0 when `c` does not
/// stabilize `p`.
pub fn margin(p: &CoprimeFactorization, c: &CoprimeFactorization) -> Result<Margin> {
    if !stabilizes(p, c)? {
        return Ok(Margin::unstable());
    }
    let floor = p.instance.tolerances.invertibility_tol;
    let f = |site: &Site| -> Result<f64> {
        let (np, dp) = p.eval(site)?;
        let (nc, dc) = c.eval(site)?;
        let a = factor_norm(np, dp, site, floor)?;
        let b = factor_norm(nc, dc, site, floor)?;
        Ok((np * nc - dp * dc).norm() / a / b)
    };
    let inf = p.instance.extremum(&f, profile(p, c), Mode::Min)?;
    Ok(Margin {
        value: inf.value,
        stabilizes: true,
        grid_points: inf.grid_points,
        achieved_tol: inf.achieved_tol,
        window: inf.window,
    })
}

/// Largest singular value of a 2x2 complex matrix.
fn spectral_norm(m: [[Complex64; 2]; 2]) -> f64 {
    let frob2: f64 = m.iter().flatten().map(|v| v.norm_sqr()).sum();
    let det = (m[0][0] * m[1][1] - m[0][1] * m[1][0]).norm_sqr();
    let disc = (frob2 * frob2 - 4.0 * det).max(0.0);
    (0.5 * (frob2 + disc.sqrt())).sqrt()
}

/// Margin as `1 / sup ||H(p, c)||` with the closed-loop matrix
/// `H = [[-pc, p], [-c, 1]] / (1 - pc)` written over `d_p d_c - n_p n_c`.
pub fn margin_via_norm(p: &CoprimeFactorization, c: &CoprimeFactorization) -> Result<Margin> {
    if !stabilizes(p, c)? {
        return Err(Error::NotStabilizing);
    }
    let f = |site: &Site| -> Result<f64> {
        let (np, dp) = p.eval(site)?;
        let (nc, dc) = c.eval(site)?;
        let delta = dp * dc - np * nc;
        let h = [[-np * nc / delta, np * dc / delta], [-dp * nc / delta, dp * dc / delta]];
        Ok(spectral_norm(h))
    };
    let sup = p.instance.extremum(&f, profile(p, c), Mode::Max)?;
    Ok(Margin {
        value: 1.0 / sup.value,
        stabilizes: true,
        grid_points: sup.grid_points,
        achieved_tol: sup.achieved_tol / (sup.value * sup.value),
        window: sup.window,
    })
}

/// Robustness certificate for the perturbed plant `p` around `p0` under
/// the controller `c`.
pub fn certify_robust(
    p0: &CoprimeFactorization,
    c: &CoprimeFactorization,
    p: &CoprimeFactorization,
    direct_mu: bool,
) -> Result<Certificate> {
    same_instance(p0, c)?;
    same_instance(p0, p)?;
    let mu_nominal = margin(p0, c)?.value;
    certify_with_nominal(mu_nominal, c, p, p0, direct_mu)
}

/// [`certify_robust`] with a precomputed nominal margin.
pub fn certify_with_nominal(
    mu_nominal: f64,
    c: &CoprimeFactorization,
    p: &CoprimeFactorization,
    p0: &CoprimeFactorization,
    direct_mu: bool,
) -> Result<Certificate> {
    let dist = d_cr_factored(p, p0)?;
    let lower_bound = mu_nominal - dist.value;
    let mu_perturbed = if direct_mu { Some(margin(p, c)?.value) } else { None };
    Ok(Certificate {
        mu_nominal,
        distance: dist.value,
        distance_branch: dist.branch,
        lower_bound,
        stabilized: lower_bound > 0.0,
        mu_perturbed,
        bound_holds: mu_perturbed.map(|mu| mu >= lower_bound - BOUND_SLACK),
    })
}

/// Radius of the `d_cr` ball around `p0` on which `c` is guaranteed to
/// stabilize.
pub fn robustness_radius(p0: &CoprimeFactorization, c: &CoprimeFactorization) -> Result<f64> {
    Ok(margin(p0, c)?.value)
}
