//! Chordal distance between plants given by coprime factorizations,
//! closed-loop stability margins, and robust-stabilization certificates.
//!
//! Plants are fractions `p = n / d` of elements of a stable ring `R`
//! (rational transfer functions, optionally with delays). Boundary values
//! of those elements live in a commutative C*-algebra `S` equipped with an
//! index map; three concrete choices are provided by [`AlgebraInstance`]:
//!
//! * [`InstanceKind::Circle`]: `S = C(T)`, index = winding number.
//! * [`InstanceKind::HalfPlaneC0AP`]: `S = C0 + AP` on the imaginary axis,
//!   index = (mean motion of the almost-periodic part, winding number).
//! * [`InstanceKind::AnnulusLimit`]: bounded analytic functions on the disk,
//!   index = limit of winding numbers on circles `|z| = r -> 1`.

pub mod boundary;
pub mod delay_example;
pub mod error;
pub mod factorization;
pub mod index;
pub mod metric;
pub mod poly;
pub mod random;
mod search;
pub mod selftest;
pub mod stability;

pub use boundary::{
    decompose_c0_ap, evaluate, inf_modulus, pointwise, sample, sup_modulus, AlgebraInstance, ApTerm, BoundaryPoint,
    C0APDecomposition, DirichletSum, Domain, Expr, Extremum, GridBudget, InstanceKind, PointwiseOp, SampledCurve, Site,
    StableElement, Term, Tolerances,
};
pub use error::{Error, Result};
pub use factorization::{
    coprime_factorize, coprimeness_gap, normalized_cf_rational, unit_rescale, verify_bezout, Bezout,
    CoprimeFactorization, Fraction, NormalizedCF,
};
pub use index::{
    index, index_annulus_limit, index_c0ap, index_circle, index_is_identity, is_invertible, mean_motion,
    winding_number, IndexValue, InvertibilityReport,
};
pub use metric::{
    d_cr, d_cr_factored, d_nu, index_condition, kappa, kappa_at, Branch, GridReport, IndexCondition, MetricResult,
};
pub use poly::{Polynomial, Rational};
pub use search::Mode;
pub use stability::{
    certify_robust, certify_with_nominal, margin, margin_via_norm, robustness_radius, stabilizes, Certificate, Margin,
};
