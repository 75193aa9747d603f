//! The index map on invertible boundary functions: winding numbers on the
//! circle, (mean motion, winding) on `C0 + AP`, and the limit of winding
//! numbers on shrinking annuli.

use std::f64::consts::PI;
use std::ops;

use num_complex::Complex64;
use serde::Serialize;

use crate::boundary::{
    check_expr_domain, feature_width, AlgebraInstance, BoundaryPoint, DirichletSum, Domain, Expr, InstanceKind,
    SampledCurve, Site,
};
use crate::error::{Error, Result};
use crate::search::{self, Mode};

/// Largest accepted phase increment between consecutive samples.
pub const PHASE_STEP_LIMIT: f64 = PI / 2.0;
/// Bisection depth available to resolve a single grid interval.
pub const REFINE_DEPTH: u32 = 24;
/// Agreement required between successive mean-motion windows; also the
/// identity tolerance for the real component of the index.
pub const MEAN_MOTION_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "group", rename_all = "snake_case")]
pub enum IndexValue {
    Integer { w: i64 },
    RealInteger { w_av: f64, w: i64 },
}

impl IndexValue {
    pub fn identity(instance: &AlgebraInstance) -> IndexValue {
        match instance.kind {
            InstanceKind::HalfPlaneC0AP => IndexValue::RealInteger { w_av: 0.0, w: 0 },
            _ => IndexValue::Integer { w: 0 },
        }
    }

    pub fn winding(&self) -> i64 {
        match *self {
            IndexValue::Integer { w } | IndexValue::RealInteger { w, .. } => w,
        }
    }
}

impl ops::Add for IndexValue {
    type Output = Result<IndexValue>;
    fn add(self, rhs: IndexValue) -> Result<IndexValue> {
        match (self, rhs) {
            (IndexValue::Integer { w: a }, IndexValue::Integer { w: b }) => Ok(IndexValue::Integer { w: a + b }),
            (IndexValue::RealInteger { w_av: a, w: m }, IndexValue::RealInteger { w_av: b, w: n }) => {
                Ok(IndexValue::RealInteger { w_av: a + b, w: m + n })
            }
            _ => Err(Error::VariantMismatch),
        }
    }
}

impl ops::Neg for IndexValue {
    type Output = IndexValue;
    fn neg(self) -> IndexValue {
        match self {
            IndexValue::Integer { w } => IndexValue::Integer { w: -w },
            IndexValue::RealInteger { w_av, w } => IndexValue::RealInteger { w_av: -w_av, w: -w },
        }
    }
}

pub fn index_is_identity(idx: &IndexValue, instance: &AlgebraInstance) -> Result<bool> {
    match (idx, instance.kind) {
        (IndexValue::Integer { w }, InstanceKind::Circle | InstanceKind::AnnulusLimit) => Ok(*w == 0),
        (IndexValue::RealInteger { w_av, w }, InstanceKind::HalfPlaneC0AP) => {
            Ok(w_av.abs() <= MEAN_MOTION_TOL && *w == 0)
        }
        _ => Err(Error::VariantMismatch),
    }
}

/// Membership test for `inv S`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InvertibilityReport {
    pub invertible: bool,
    pub min_modulus: f64,
    pub sup_modulus: f64,
    /// `invertibility_tol * sup_modulus`
    pub threshold: f64,
    pub witness: Site,
    pub grid_points: usize,
    pub achieved_tol: f64,
}

impl InvertibilityReport {
    pub fn witness_point(&self) -> BoundaryPoint {
        BoundaryPoint::wrap(self.witness.theta())
    }
}

pub fn is_invertible(expr: &Expr, instance: &AlgebraInstance) -> Result<InvertibilityReport> {
    check_expr_domain(expr, instance)?;
    let modulus = |site: &Site| expr.eval(site).map(|v| v.norm());
    let profile = expr.delay_profile();
    let inf = instance.extremum(&modulus, profile, Mode::Min)?;
    let sup = instance.extremum(&modulus, profile, Mode::Max)?;
    let threshold = instance.tolerances.invertibility_tol * sup.value;
    Ok(InvertibilityReport {
        invertible: inf.value > threshold,
        min_modulus: inf.value,
        sup_modulus: sup.value,
        threshold,
        witness: inf.site,
        grid_points: inf.grid_points.max(sup.grid_points),
        achieved_tol: inf.achieved_tol.max(sup.achieved_tol),
    })
}

fn check_zero(theta: f64, v: Complex64, zero_tol: f64) -> Result<()> {
    if v.norm() <= zero_tol {
        Err(Error::CurveThroughZero {
            theta,
            modulus: v.norm(),
        })
    } else {
        Ok(())
    }
}

fn phase_increment<F>(eval: &F, a: (f64, Complex64), b: (f64, Complex64), depth: u32, zero_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let step = (b.1 / a.1).arg();
    if step.abs() <= PHASE_STEP_LIMIT {
        return Ok(step);
    }
    if depth == 0 {
        return Err(Error::NonResolvableWinding { theta: a.0 });
    }
    let tm = 0.5 * (a.0 + b.0);
    let vm = eval(tm)?;
    check_zero(tm, vm, zero_tol)?;
    let m = (tm, vm);
    Ok(phase_increment(eval, a, m, depth - 1, zero_tol)? + phase_increment(eval, m, b, depth - 1, zero_tol)?)
}

/// Winding number of a closed sampled curve about the origin, using the
/// samples only.
pub fn winding_number(curve: &SampledCurve) -> Result<i64> {
    let no_refinement = |theta: f64| -> Result<Complex64> { Err(Error::NonResolvableWinding { theta }) };
    let scale = curve.values().iter().fold(0.0f64, |m, v| m.max(v.norm()));
    winding_number_refined(curve, &no_refinement, 1e-9 * scale, 0)
}

/// Winding number of a closed curve whose samples may be refined by
/// re-evaluating `eval` (taking the curve parameter; the closing interval
/// runs from the last parameter to the first plus `2 pi`).
pub fn winding_number_refined<F>(curve: &SampledCurve, eval: &F, zero_tol: f64, depth: u32) -> Result<i64>
where
    F: Fn(f64) -> Result<Complex64>,
{
    if !curve.closed() {
        return Err(Error::InvalidCurve("winding number needs a closed curve".into()));
    }
    if curve.len() < 16 {
        return Err(Error::InvalidCurve("winding number needs at least 16 samples".into()));
    }
    let ts = curve.thetas();
    let vs = curve.values();
    for (t, v) in ts.iter().zip(vs) {
        check_zero(*t, *v, zero_tol)?;
    }
    let n = vs.len();
    let mut total = 0.0;
    for j in 0..n {
        let (tb, vb) = if j + 1 < n {
            (ts[j + 1], vs[j + 1])
        } else {
            (ts[0] + 2.0 * PI, vs[0])
        };
        total += phase_increment(eval, (ts[j], vs[j]), (tb, vb), depth, zero_tol)?;
    }
    Ok((total / (2.0 * PI)).round() as i64)
}

fn winding_of<F>(eval: &F, instance: &AlgebraInstance, feature_width: f64, zero_tol: f64) -> Result<i64>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let grid = SampledCurve::uniform_grid(1usize << instance.start_log2(feature_width));
    let values = grid.iter().map(|&t| eval(t)).collect::<Result<Vec<_>>>()?;
    let curve = SampledCurve::new(grid, values, true)?;
    winding_number_refined(&curve, eval, zero_tol, REFINE_DEPTH)
}

fn require_invertible(expr: &Expr, instance: &AlgebraInstance) -> Result<InvertibilityReport> {
    let report = is_invertible(expr, instance)?;
    if !report.invertible {
        return Err(Error::NotInvertible {
            min_modulus: report.min_modulus,
        });
    }
    Ok(report)
}

pub fn index_circle(expr: &Expr, instance: &AlgebraInstance) -> Result<IndexValue> {
    if instance.domain() != Domain::Circle {
        return Err(Error::DomainMismatch);
    }
    let report = require_invertible(expr, instance)?;
    let eval = |theta: f64| expr.eval(&Site::Boundary(BoundaryPoint::wrap(theta)));
    let w = winding_of(&eval, instance, expr.delay_profile().feature_width, report.threshold)?;
    Ok(IndexValue::Integer { w })
}

/// Average winding number of an almost-periodic function.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MeanMotion {
    pub value: f64,
    /// Difference between the last two window estimates.
    pub tolerance: f64,
    /// Largest window half-width used.
    pub window: f64,
    pub min_modulus: f64,
}

/// Unwrapped phase of `f` on `0, h, 2h, ..., n h` in direction `sign`.
fn unwrapped_phase(ap: &DirichletSum, h: f64, n: usize, sign: f64, zero_tol: f64) -> Result<(Vec<f64>, f64)> {
    let eval = |x: f64| Ok(ap.eval(x));
    let mut phase = Vec::with_capacity(n + 1);
    let mut prev = (0.0, ap.eval(0.0));
    check_zero(0.0, prev.1, zero_tol)?;
    let mut acc = prev.1.arg();
    let mut min_mod = prev.1.norm();
    phase.push(acc);
    for j in 1..=n {
        let x = sign * h * j as f64;
        let v = ap.eval(x);
        check_zero(x, v, zero_tol)?;
        min_mod = min_mod.min(v.norm());
        acc += phase_increment(&eval, prev, (x, v), REFINE_DEPTH, zero_tol)?;
        phase.push(acc);
        prev = (x, v);
    }
    Ok((phase, min_mod))
}

/// `lim (arg f(x) - arg f(-x)) / 2x`, estimated from windowed means of the
/// unwrapped argument over `[X/2, X]` and `[-X, -X/2]` for
/// `X = W, 2W, 4W`. Averaging removes the bounded almost-periodic
/// oscillation of the argument, which would otherwise decay only like `1/X`.
pub fn mean_motion(ap: &DirichletSum, instance: &AlgebraInstance) -> Result<MeanMotion> {
    let scale: f64 = ap.terms().iter().map(|t| t.coeff.norm()).sum();
    if ap.is_zero() {
        return Err(Error::ApNotInvertible { min_modulus: 0.0 });
    }
    let zero_tol = instance.tolerances.invertibility_tol * scale;
    let tmax = ap.max_abs_delay();
    if tmax == 0.0 {
        return Ok(MeanMotion {
            value: 0.0,
            tolerance: 0.0,
            window: 0.0,
            min_modulus: ap.eval(0.0).norm(),
        });
    }
    let w = instance.ap_window;
    let h = (0.25f64).min(PI / (8.0 * tmax));
    let n = (4.0 * w / h).ceil() as usize;
    let map_ap = |e: Error| match e {
        Error::CurveThroughZero { modulus, .. } => Error::ApNotInvertible { min_modulus: modulus },
        other => other,
    };
    let (pos, min_pos) = unwrapped_phase(ap, h, n, 1.0, zero_tol).map_err(map_ap)?;
    let (neg, min_neg) = unwrapped_phase(ap, h, n, -1.0, zero_tol).map_err(map_ap)?;
    let min_modulus = min_pos.min(min_neg);

    let window_mean = |phase: &[f64], x: f64| -> (f64, f64) {
        let lo = (0.5 * x / h).ceil() as usize;
        let hi = ((x / h).floor() as usize).min(n);
        let count = (hi - lo + 1) as f64;
        let mean_phase = phase[lo..=hi].iter().sum::<f64>() / count;
        let mean_x = (lo..=hi).map(|j| h * j as f64).sum::<f64>() / count;
        (mean_phase, mean_x)
    };
    let estimate = |x: f64| {
        let (p_pos, x_pos) = window_mean(&pos, x);
        let (p_neg, x_neg) = window_mean(&neg, x);
        (p_pos - p_neg) / (x_pos + x_neg)
    };
    let mut prev = estimate(w);
    for k in [2.0, 4.0] {
        let next = estimate(k * w);
        let gap = (next - prev).abs();
        if gap <= MEAN_MOTION_TOL {
            return Ok(MeanMotion {
                value: next,
                tolerance: gap,
                window: k * w,
                min_modulus,
            });
        }
        prev = next;
    }
    Err(Error::NoConvergence(
        "mean motion estimates did not settle over windows W, 2W, 4W".into(),
    ))
}

pub fn index_c0ap(expr: &Expr, instance: &AlgebraInstance) -> Result<IndexValue> {
    if instance.kind != InstanceKind::HalfPlaneC0AP {
        return Err(Error::DomainMismatch);
    }
    check_expr_domain(expr, instance)?;
    let ap = expr.ap_part()?;
    let motion = mean_motion(&ap, instance)?;
    require_invertible(expr, instance)?;
    // 1 + f0 / f_AP closes through the point at infinity with value 1
    let eval = |theta: f64| -> Result<Complex64> {
        let p = BoundaryPoint::wrap(theta);
        match p.omega() {
            None => Ok(Complex64::new(1.0, 0.0)),
            Some(omega) => Ok(expr.eval(&Site::Axis(omega))? / ap.eval(omega)),
        }
    };
    let w = winding_of(
        &eval,
        instance,
        expr.delay_profile().feature_width,
        instance.tolerances.invertibility_tol,
    )?;
    Ok(IndexValue::RealInteger { w_av: motion.value, w })
}

pub fn index_annulus_limit(expr: &Expr, instance: &AlgebraInstance) -> Result<IndexValue> {
    if instance.kind != InstanceKind::AnnulusLimit {
        return Err(Error::DomainMismatch);
    }
    check_expr_domain(expr, instance)?;
    let mut windings = Vec::with_capacity(instance.annulus_radii.len());
    for &radius in &instance.annulus_radii {
        let eval = |theta: f64| expr.eval(&Site::OnCircle { radius, theta });
        let modulus = |theta: f64| eval(theta).map(|v| v.norm());
        let width = expr
            .leaves()
            .into_iter()
            .fold(PI, |w, e| w.min(feature_width(e, radius)));
        let start = instance.start_log2(width);
        let max_log2 = instance.grid.max_log2;
        let tol = instance.tolerances.sup_tol;
        let inf = search::refine(&modulus, -PI, PI, true, Mode::Min, start, max_log2, tol)?;
        let sup = search::refine(&modulus, -PI, PI, true, Mode::Max, start, max_log2, tol)?;
        let threshold = instance.tolerances.invertibility_tol * sup.value;
        if inf.value <= threshold {
            return Err(Error::NotInvertibleOnCircle(radius));
        }
        windings.push(winding_of(&eval, instance, width, threshold).map_err(|e| match e {
            Error::CurveThroughZero { .. } => Error::NotInvertibleOnCircle(radius),
            other => other,
        })?);
    }
    let tail = &windings[windings.len() - 3..];
    if tail.iter().all(|&w| w == tail[0]) {
        Ok(IndexValue::Integer { w: tail[0] })
    } else {
        Err(Error::IndexNotStabilized(windings))
    }
}

/// The instance's index map.
pub fn index(expr: &Expr, instance: &AlgebraInstance) -> Result<IndexValue> {
    match instance.kind {
        InstanceKind::Circle => index_circle(expr, instance),
        InstanceKind::HalfPlaneC0AP => index_c0ap(expr, instance),
        InstanceKind::AnnulusLimit => index_annulus_limit(expr, instance),
    }
}
