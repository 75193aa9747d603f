//! Real-coefficient polynomials and rational functions.
//!
//! Coefficients are stored in ascending powers. Polynomials are kept
//! trimmed, so the zero polynomial has an empty coefficient vector.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "Vec<f64>", into = "Vec<f64>")]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl From<Vec<f64>> for Polynomial {
    fn from(coeffs: Vec<f64>) -> Self {
        Polynomial::new(coeffs)
    }
}

impl From<Polynomial> for Vec<f64> {
    fn from(p: Polynomial) -> Self {
        p.coeffs
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial{:?}", self.coeffs)
    }
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Polynomial::constant(1.0)
    }

    pub fn constant(c: f64) -> Self {
        Polynomial::new(vec![c])
    }

    /// The monomial `s`.
    pub fn var() -> Self {
        Polynomial::new(vec![0.0, 1.0])
    }

    /// `(s + a)^k`
    pub fn linear_power(a: f64, k: usize) -> Self {
        let base = Polynomial::new(vec![a, 1.0]);
        (0..k).fold(Polynomial::one(), |acc, _| &acc * &base)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> f64 {
        self.coeffs.last().copied().unwrap_or(0.0)
    }

    pub fn coeff(&self, i: usize) -> f64 {
        self.coeffs.get(i).copied().unwrap_or(0.0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn eval(&self, x: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c)
    }

    pub fn eval_real(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// Evaluates the coefficient-reversed polynomial `x^deg p(1/x)`.
    pub fn eval_reversed(&self, x: Complex64) -> Complex64 {
        self.coeffs.iter().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c)
    }

    pub fn scale(&self, k: f64) -> Self {
        Polynomial::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// `p(-s)`
    pub fn reflect(&self) -> Self {
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, &c)| if i % 2 == 1 { -c } else { c })
                .collect(),
        )
    }

    /// `s^k p(1/s)` with `k = deg p`; maps the unit circle conjugation
    /// `conj(p(z)) = p(1/z)` onto a polynomial for real coefficients.
    pub fn reversed(&self) -> Self {
        let mut c = self.coeffs.clone();
        c.reverse();
        Polynomial::new(c)
    }

    pub fn derivative(&self) -> Self {
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| c * i as f64)
                .collect(),
        )
    }

    /// Builds a monic-times-`lead` polynomial from roots. Complex roots
    /// must come in conjugate pairs; imaginary residue is discarded.
    pub fn from_roots(roots: &[Complex64], lead: f64) -> Self {
        let mut c = vec![Complex64::new(lead, 0.0)];
        for r in roots {
            let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
            for (i, &ci) in c.iter().enumerate() {
                next[i + 1] += ci;
                next[i] -= ci * r;
            }
            c = next;
        }
        Polynomial::new(c.into_iter().map(|z| z.re).collect())
    }

    /// Roots via companion-matrix eigenvalues, polished by Newton steps.
    pub fn roots(&self) -> Vec<Complex64> {
        let n = self.degree();
        if self.is_zero() || n == 0 {
            return Vec::new();
        }
        // zero roots are split off exactly
        let zeros = self.coeffs.iter().take_while(|&&c| c == 0.0).count();
        let reduced = Polynomial::new(self.coeffs[zeros..].to_vec());
        let m = reduced.degree();
        let mut roots = vec![Complex64::new(0.0, 0.0); zeros];
        if m == 0 {
            return roots;
        }
        let lead = reduced.leading();
        let mut companion = DMatrix::<f64>::zeros(m, m);
        for i in 1..m {
            companion[(i, i - 1)] = 1.0;
        }
        for i in 0..m {
            companion[(i, m - 1)] = -reduced.coeffs[i] / lead;
        }
        let eig = companion.complex_eigenvalues();
        let dp = reduced.derivative();
        for z0 in eig.iter() {
            let mut z = *z0;
            for _ in 0..3 {
                let fz = reduced.eval(z);
                let dz = dp.eval(z);
                if dz.norm() == 0.0 {
                    break;
                }
                let step = fz / dz;
                let candidate = z - step;
                if !candidate.re.is_finite() || !candidate.im.is_finite() {
                    break;
                }
                if reduced.eval(candidate).norm() <= fz.norm() {
                    z = candidate;
                } else {
                    break;
                }
            }
            roots.push(z);
        }
        roots
    }

    /// Euclidean division `self = q * rhs + r`.
    pub fn div_rem(&self, rhs: &Polynomial) -> (Polynomial, Polynomial) {
        assert!(!rhs.is_zero(), "division by zero polynomial");
        if self.degree() < rhs.degree() || self.is_zero() {
            return (Polynomial::zero(), self.clone());
        }
        let mut rem = self.coeffs.clone();
        let dr = rhs.degree();
        let lead = rhs.leading();
        let mut q = vec![0.0; self.degree() - dr + 1];
        for i in (0..q.len()).rev() {
            let c = rem[i + dr] / lead;
            q[i] = c;
            for (j, &rc) in rhs.coeffs.iter().enumerate() {
                rem[i + j] -= c * rc;
            }
            rem[i + dr] = 0.0;
        }
        rem.truncate(dr);
        (Polynomial::new(q), Polynomial::new(rem))
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut c = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Polynomial::new(c)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(-1.0)
    }
}

/// A ratio of real polynomials.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rational {
    pub num: Polynomial,
    pub den: Polynomial,
}

impl Rational {
    pub fn new(num: Polynomial, den: Polynomial) -> Self {
        Rational { num, den }
    }

    pub fn constant(c: f64) -> Self {
        Rational::new(Polynomial::constant(c), Polynomial::one())
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_proper(&self) -> bool {
        self.num.is_zero() || self.num.degree() <= self.den.degree()
    }

    pub fn is_strictly_proper(&self) -> bool {
        self.num.is_zero() || self.num.degree() < self.den.degree()
    }

    /// Evaluation that switches to reversed coefficients for `|x| > 1`,
    /// so large arguments along the imaginary axis do not overflow.
    pub fn eval(&self, x: Complex64) -> Complex64 {
        if self.num.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        if x.norm() <= 1.0 {
            return self.num.eval(x) / self.den.eval(x);
        }
        let inv = x.inv();
        let shift = self.num.degree() as i32 - self.den.degree() as i32;
        let r = self.num.eval_reversed(inv) / self.den.eval_reversed(inv);
        r * x.powi(shift)
    }

    /// Limit at infinity of a proper rational function.
    pub fn limit_at_infinity(&self) -> f64 {
        if self.num.is_zero() || self.num.degree() < self.den.degree() {
            0.0
        } else {
            self.num.leading() / self.den.leading()
        }
    }

    pub fn mul(&self, rhs: &Rational) -> Rational {
        Rational::new(&self.num * &rhs.num, &self.den * &rhs.den)
    }

    pub fn add(&self, rhs: &Rational) -> Rational {
        if self.den == rhs.den {
            return Rational::new(&self.num + &rhs.num, self.den.clone());
        }
        Rational::new(&(&self.num * &rhs.den) + &(&rhs.num * &self.den), &self.den * &rhs.den)
    }

    pub fn scale(&self, k: f64) -> Rational {
        Rational::new(self.num.scale(k), self.den.clone())
    }

    /// Splits off the value at infinity: `self = limit + remainder` with a
    /// strictly proper remainder.
    pub fn split_at_infinity(&self) -> (f64, Rational) {
        let limit = self.limit_at_infinity();
        let rem = &self.num - &self.den.scale(limit);
        // the leading coefficient cancels analytically; clear rounding residue
        let mut c = rem.coeffs().to_vec();
        if limit != 0.0 && c.len() > self.den.degree() {
            c.truncate(self.den.degree());
        }
        (limit, Rational::new(Polynomial::new(c), self.den.clone()))
    }
}
