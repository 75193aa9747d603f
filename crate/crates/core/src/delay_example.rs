//! The delay plant family `p_a = 1 / (s - a e^{-s})` and the controller
//! `c = -(1 + e^{-s})` that stabilizes `p_1`.

use crate::boundary::{AlgebraInstance, Domain, StableElement, Term};
use crate::error::Result;
use crate::factorization::{Bezout, CoprimeFactorization};
use crate::poly::{Polynomial, Rational};

fn lag() -> Polynomial {
    Polynomial::new(vec![1.0, 1.0])
}

/// `n = 1/(1+s)`, `d = (s - a e^{-s})/(1+s)`; for `a = 1` with witnesses
/// `x = 1 + e^{-s}`, `y = 1`.
pub fn plant(a: f64, instance: &AlgebraInstance) -> Result<CoprimeFactorization> {
    let n = StableElement::rational(Domain::HalfPlane, Polynomial::one(), lag())?;
    let d = StableElement::new(
        Domain::HalfPlane,
        vec![
            Term::new(Rational::new(Polynomial::var(), lag()), 0.0),
            Term::new(Rational::new(Polynomial::constant(-a), lag()), 1.0),
        ],
    )?;
    let bezout = if a == 1.0 {
        Some(Bezout {
            x: StableElement::new(
                Domain::HalfPlane,
                vec![
                    Term::new(Rational::constant(1.0), 0.0),
                    Term::new(Rational::constant(1.0), 1.0),
                ],
            )?,
            y: StableElement::one(Domain::HalfPlane),
        })
    } else {
        None
    };
    CoprimeFactorization::new(n, d, bezout, instance)
}

/// `c = -x / y = -(1 + e^{-s})` as `n_c = -(1 + e^{-s})`, `d_c = 1`.
pub fn controller(instance: &AlgebraInstance) -> Result<CoprimeFactorization> {
    let n = StableElement::new(
        Domain::HalfPlane,
        vec![
            Term::new(Rational::constant(-1.0), 0.0),
            Term::new(Rational::constant(-1.0), 1.0),
        ],
    )?;
    let d = StableElement::one(Domain::HalfPlane);
    let bezout = Bezout {
        x: StableElement::constant(Domain::HalfPlane, -1.0),
        y: StableElement::delay(-1.0, 1.0)?,
    };
    CoprimeFactorization::new(n, d, Some(bezout), instance)
}

/// `|a - 1| / sqrt(2 (1 + a^2))`
pub fn closed_form_distance(a: f64) -> f64 {
    (a - 1.0).abs() / (2.0 * (1.0 + a * a)).sqrt()
}
