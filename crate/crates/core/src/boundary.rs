//! Elements of the stable ring, their boundary values, and the pointwise
//! algebra of boundary functions.
//!
//! Two boundary domains are supported:
//!
//! * `Domain::Circle`: rational functions of `z` analytic on the closed
//!   unit disk, evaluated on `|z| = 1` (or on inner circles `|z| = r`).
//! * `Domain::HalfPlane`: rational functions of `s` bounded on the closed
//!   right half-plane, each possibly multiplied by a delay `e^{-s t}`,
//!   evaluated on `s = i*omega`. The compactified axis is parameterized by
//!   `omega = tan(theta / 2)`, so `theta = pi` is the point at infinity.
//!
//! Boundary functions of the half-plane split as `f = f0 + f_AP`, where
//! `f0` vanishes at infinity and `f_AP` is a finite Dirichlet sum. The
//! split is carried symbolically through sums, products and conjugation.

use std::f64::consts::PI;
use std::ops;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{Polynomial, Rational};
use crate::search::{self, Mode};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Domain {
    Circle,
    HalfPlane,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InstanceKind {
    /// `R` among RH-infinity / disk algebra / Wiener algebra, `S = C(T)`, index = winding number.
    Circle,
    /// `R` the Callier-Desoer class, `S = C0 + AP`, index = (mean motion, winding).
    HalfPlaneC0AP,
    /// `R = H-infinity`, index = limit of winding numbers on circles `|z| = r -> 1`.
    AnnulusLimit,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative threshold: `f` counts as invertible when `inf|f| > invertibility_tol * sup|f|`.
    pub invertibility_tol: f64,
    pub sup_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            invertibility_tol: 1e-9,
            sup_tol: 1e-9,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridBudget {
    pub initial_log2: u32,
    pub max_log2: u32,
}

impl Default for GridBudget {
    fn default() -> Self {
        GridBudget {
            initial_log2: 10,
            max_log2: 20,
        }
    }
}

pub const DEFAULT_ANNULUS_RADII: [f64; 5] = [0.9, 0.99, 0.999, 0.9999, 0.99999];
pub const DEFAULT_AP_WINDOW: f64 = 1e4;
pub const DEFAULT_AP_GRID_DENSITY: f64 = 2.0;

/// Finite frequencies below this bound are covered by the compactified
/// theta grid; beyond it delay elements are scanned on a uniform omega grid.
const AXIS_CORE: f64 = 16.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgebraInstance {
    pub kind: InstanceKind,
    pub tolerances: Tolerances,
    pub annulus_radii: Vec<f64>,
    /// Half-width `W` of the frequency window on which almost-periodic
    /// parts are inspected.
    pub ap_window: f64,
    /// Samples per unit frequency (per unit of the largest delay) for
    /// uniform scans of the window.
    pub ap_grid_density: f64,
    pub grid: GridBudget,
}

impl AlgebraInstance {
    pub fn new(kind: InstanceKind) -> Self {
        AlgebraInstance {
            kind,
            tolerances: Tolerances::default(),
            annulus_radii: DEFAULT_ANNULUS_RADII.to_vec(),
            ap_window: DEFAULT_AP_WINDOW,
            ap_grid_density: DEFAULT_AP_GRID_DENSITY,
            grid: GridBudget::default(),
        }
    }

    pub fn circle() -> Self {
        Self::new(InstanceKind::Circle)
    }

    pub fn halfplane_c0ap() -> Self {
        Self::new(InstanceKind::HalfPlaneC0AP)
    }

    pub fn annulus_limit() -> Self {
        Self::new(InstanceKind::AnnulusLimit)
    }

    pub fn with_tolerances(mut self, tolerances: Tolerances) -> Result<Self> {
        self.tolerances = tolerances;
        self.validate()?;
        Ok(self)
    }

    pub fn with_radii(mut self, radii: Vec<f64>) -> Result<Self> {
        self.annulus_radii = radii;
        self.validate()?;
        Ok(self)
    }

    pub fn with_ap_window(mut self, window: f64, density: f64) -> Result<Self> {
        self.ap_window = window;
        self.ap_grid_density = density;
        self.validate()?;
        Ok(self)
    }

    pub fn with_grid(mut self, grid: GridBudget) -> Result<Self> {
        self.grid = grid;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let t = &self.tolerances;
        if !(t.invertibility_tol > 0.0 && t.sup_tol > 0.0) {
            return Err(Error::InvalidInstance("tolerances must be positive".into()));
        }
        if self.grid.initial_log2 < 4 || self.grid.max_log2 < self.grid.initial_log2 || self.grid.max_log2 > 26 {
            return Err(Error::InvalidInstance(format!("bad grid budget {:?}", self.grid)));
        }
        if self.kind == InstanceKind::AnnulusLimit {
            let r = &self.annulus_radii;
            if r.len() < 3 {
                return Err(Error::InvalidInstance("annulus schedule needs at least 3 radii".into()));
            }
            if r.iter().any(|&x| !(x > 0.0 && x < 1.0)) || r.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::InvalidInstance(
                    "annulus radii must be strictly increasing in (0, 1)".into(),
                ));
            }
        }
        if self.kind == InstanceKind::HalfPlaneC0AP && !(self.ap_window > AXIS_CORE && self.ap_grid_density > 0.0) {
            return Err(Error::InvalidInstance(format!(
                "ap_window must exceed {AXIS_CORE} and ap_grid_density must be positive"
            )));
        }
        Ok(())
    }

    /// First grid level fine enough to put 8 samples across a feature of
    /// the given angular width, leaving room for one doubling.
    pub fn start_log2(&self, feature_width: f64) -> u32 {
        let need = (16.0 * PI / feature_width.max(1e-12)).log2().ceil().max(0.0) as u32;
        need.max(self.grid.initial_log2)
            .min(self.grid.max_log2.saturating_sub(1).max(self.grid.initial_log2))
    }

    pub fn domain(&self) -> Domain {
        match self.kind {
            InstanceKind::Circle | InstanceKind::AnnulusLimit => Domain::Circle,
            InstanceKind::HalfPlaneC0AP => Domain::HalfPlane,
        }
    }

    /// Sup or inf over the maximal ideal space of `S` of a real functional
    /// of boundary values.
    ///
    /// For delay-free elements the boundary is a closed curve sampled on a
    /// doubling theta grid. For delay elements on the half-plane the
    /// compactification point is replaced by three scans: a doubling theta
    /// grid for `|omega| <= 16`, a uniform omega grid up to `ap_window`, and
    /// a uniform scan of the almost-periodic limit on `[-W, W]`.
    pub fn extremum<F>(&self, f: &F, profile: BoundaryProfile, mode: Mode) -> Result<Extremum>
    where
        F: Fn(&Site) -> Result<f64> + Sync,
    {
        let tol = self.tolerances.sup_tol;
        let (lo_log, hi_log) = (self.start_log2(profile.feature_width), self.grid.max_log2);
        match (self.domain(), profile.max_delay > 0.0) {
            (Domain::Circle, _) | (Domain::HalfPlane, false) => {
                let g = |theta: f64| f(&Site::Boundary(BoundaryPoint::wrap(theta)));
                let r = search::refine(&g, -PI, PI, true, mode, lo_log, hi_log, tol)?;
                Ok(Extremum {
                    value: r.value,
                    site: Site::Boundary(BoundaryPoint::wrap(r.arg)),
                    grid_points: r.points,
                    achieved_tol: r.achieved_tol,
                    window: None,
                })
            }
            (Domain::HalfPlane, true) => {
                let core = 2.0 * AXIS_CORE.atan();
                let g = |theta: f64| f(&Site::Axis((theta / 2.0).tan()));
                let r = search::refine(&g, -core, core, false, mode, lo_log, hi_log, tol)?;
                let mut best = Extremum {
                    value: r.value,
                    site: Site::Axis((r.arg / 2.0).tan()),
                    grid_points: r.points,
                    achieved_tol: r.achieved_tol,
                    window: Some(self.ap_window),
                };
                let w = self.ap_window;
                let per_unit = self.ap_grid_density * profile.max_delay.max(1.0);
                let n_tail = ((w - AXIS_CORE) * per_unit).ceil().max(16.0) as usize;
                let axis = |omega: f64| f(&Site::Axis(omega));
                for (lo, hi) in [(AXIS_CORE, w), (-w, -AXIS_CORE)] {
                    let (arg, value) = search::scan_level(&axis, lo, hi, n_tail, false, mode)?;
                    best.grid_points += n_tail + 1;
                    best.absorb(value, Site::Axis(arg), mode);
                }
                let ap = |omega: f64| f(&Site::ApLimit(omega));
                if profile.ap_max_delay > 0.0 {
                    let per_unit = self.ap_grid_density * profile.ap_max_delay.max(1.0);
                    let n_ap = (2.0 * w * per_unit).ceil() as usize;
                    let (arg, value) = search::scan_level(&ap, -w, w, n_ap, false, mode)?;
                    best.grid_points += n_ap + 1;
                    best.absorb(value, Site::ApLimit(arg), mode);
                } else {
                    best.grid_points += 1;
                    best.absorb(ap(0.0)?, Site::ApLimit(0.0), mode);
                }
                Ok(best)
            }
        }
    }
}

/// Delay content and root geometry of the elements entering a boundary
/// functional.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryProfile {
    pub max_delay: f64,
    pub ap_max_delay: f64,
    /// Smallest angular scale of the boundary curve: distance of the
    /// nearest pole or zero of any rational part from the unit circle
    /// (after mapping the half-plane onto the disk).
    pub feature_width: f64,
}

impl Default for BoundaryProfile {
    fn default() -> Self {
        BoundaryProfile {
            max_delay: 0.0,
            ap_max_delay: 0.0,
            feature_width: PI,
        }
    }
}

impl BoundaryProfile {
    pub fn of<'a>(elems: impl IntoIterator<Item = &'a StableElement>) -> Self {
        elems.into_iter().fold(BoundaryProfile::default(), |acc, e| {
            let ap = e
                .terms
                .iter()
                .filter(|t| t.rational.limit_at_infinity() != 0.0)
                .fold(0.0f64, |m, t| m.max(t.delay));
            BoundaryProfile {
                max_delay: acc.max_delay.max(e.max_delay()),
                ap_max_delay: acc.ap_max_delay.max(ap),
                feature_width: acc.feature_width.min(feature_width(e, 1.0)),
            }
        })
    }
}

/// Roots closer than this to the sampled circle are treated as lying on it;
/// they create no narrow feature.
const ON_CIRCLE: f64 = 1e-6;

/// Distance of the poles (and, for delay-free elements, zeros) of `e` from
/// the circle `|z| = radius`, relative to the radius. Half-plane roots are
/// mapped to the disk by `z = (s - 1) / (s + 1)`.
pub(crate) fn feature_width(e: &StableElement, radius: f64) -> f64 {
    let mut width = PI;
    let live: Vec<&Term> = e.terms.iter().filter(|t| !t.rational.is_zero()).collect();
    for t in &live {
        let zeros = if live.len() == 1 {
            t.rational.num.roots()
        } else {
            Vec::new()
        };
        for root in zeros.into_iter().chain(t.rational.den.roots()) {
            let z = match e.domain {
                Domain::Circle => root,
                Domain::HalfPlane => {
                    if (root + 1.0).norm() < 1e-12 {
                        continue;
                    }
                    (root - 1.0) / (root + 1.0)
                }
            };
            let gap = (z.norm() - radius).abs() / radius;
            if gap > ON_CIRCLE {
                width = width.min(gap);
            }
        }
    }
    width
}

/// Result of a boundary sup/inf search.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Extremum {
    pub value: f64,
    pub site: Site,
    /// Final theta-grid size of the refining scan plus any fixed scans.
    pub grid_points: usize,
    /// Difference between the last two refinement levels.
    pub achieved_tol: f64,
    /// Frequency window used for almost-periodic limits, when one applies.
    pub window: Option<f64>,
}

impl Extremum {
    fn absorb(&mut self, value: f64, site: Site, mode: Mode) {
        let better = match mode {
            Mode::Max => value > self.value,
            Mode::Min => value < self.value,
        };
        if better {
            self.value = value;
            self.site = site;
        }
    }
}

/// A point of the unit circle or of the compactified imaginary axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    theta: f64,
}

impl BoundaryPoint {
    pub fn new(theta: f64) -> Result<Self> {
        if theta > -PI && theta <= PI {
            Ok(BoundaryPoint { theta })
        } else {
            Err(Error::InvalidElement(format!("theta {theta} outside (-pi, pi]")))
        }
    }

    /// Folds any angle into `(-pi, pi]`.
    pub fn wrap(theta: f64) -> Self {
        let mut t = (theta + PI).rem_euclid(2.0 * PI) - PI;
        if t <= -PI {
            t = PI;
        }
        BoundaryPoint { theta: t }
    }

    pub fn infinity() -> Self {
        BoundaryPoint { theta: PI }
    }

    pub fn from_omega(omega: f64) -> Self {
        BoundaryPoint {
            theta: 2.0 * omega.atan(),
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn is_infinity(&self) -> bool {
        self.theta == PI
    }

    /// `tan(theta / 2)`, or `None` at the point at infinity.
    pub fn omega(&self) -> Option<f64> {
        if self.is_infinity() {
            None
        } else {
            Some((self.theta / 2.0).tan())
        }
    }

    pub fn z(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.theta)
    }
}

/// Where a boundary function is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Site {
    /// Unit circle, or compactified imaginary axis.
    Boundary(BoundaryPoint),
    /// Finite point `s = i*omega` of the imaginary axis.
    Axis(f64),
    /// `z = radius * e^{i theta}`, for the annulus instance.
    OnCircle { radius: f64, theta: f64 },
    /// The almost-periodic part at frequency `omega`: the limit behaviour
    /// of a half-plane boundary function at infinity.
    ApLimit(f64),
}

impl Site {
    /// Angle-like coordinate used in reports.
    pub fn theta(&self) -> f64 {
        match *self {
            Site::Boundary(p) => p.theta,
            Site::Axis(omega) => 2.0 * omega.atan(),
            Site::OnCircle { theta, .. } => theta,
            Site::ApLimit(_) => PI,
        }
    }
}

/// `rational(s) * e^{-s * delay}` (delay is 0 on the circle).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub rational: Rational,
    pub delay: f64,
}

impl Term {
    pub fn new(rational: Rational, delay: f64) -> Self {
        Term { rational, delay }
    }
}

/// An element of the stable ring: a finite sum of (delayed) rational terms.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StableElement {
    domain: Domain,
    terms: Vec<Term>,
}

fn check_term(domain: Domain, term: &Term) -> Result<()> {
    let r = &term.rational;
    if r.den.is_zero() {
        return Err(Error::InvalidElement("zero denominator".into()));
    }
    if !(term.delay >= 0.0 && term.delay.is_finite()) {
        return Err(Error::InvalidElement(format!(
            "delay {} must be a finite nonnegative number",
            term.delay
        )));
    }
    if r.num.is_zero() {
        return Ok(());
    }
    match domain {
        Domain::HalfPlane => {
            if !r.is_proper() {
                return Err(Error::InvalidElement(
                    "numerator degree exceeds denominator degree (unbounded on the half-plane)".into(),
                ));
            }
            if let Some(root) = r.den.roots().into_iter().find(|z| z.re >= -1e-12) {
                return Err(Error::InvalidElement(format!(
                    "denominator root {root} in the closed right half-plane"
                )));
            }
        }
        Domain::Circle => {
            if term.delay != 0.0 {
                return Err(Error::InvalidElement(
                    "delays are only defined on the half-plane".into(),
                ));
            }
            if let Some(root) = r.den.roots().into_iter().find(|z| z.norm() <= 1.0 + 1e-12) {
                return Err(Error::InvalidElement(format!(
                    "denominator root {root} in the closed unit disk"
                )));
            }
        }
    }
    Ok(())
}

impl StableElement {
    /// Validates every term, sorts by delay and makes sure a delay-0 term
    /// leads the list.
    pub fn new(domain: Domain, terms: Vec<Term>) -> Result<Self> {
        for t in &terms {
            check_term(domain, t)?;
        }
        Ok(Self::assemble(domain, terms))
    }

    fn assemble(domain: Domain, mut terms: Vec<Term>) -> Self {
        terms.sort_by(|a, b| a.delay.total_cmp(&b.delay));
        if terms.first().is_none_or(|t| t.delay != 0.0) {
            terms.insert(0, Term::new(Rational::constant(0.0), 0.0));
        }
        StableElement { domain, terms }
    }

    pub fn rational(domain: Domain, num: Polynomial, den: Polynomial) -> Result<Self> {
        Self::new(domain, vec![Term::new(Rational::new(num, den), 0.0)])
    }

    pub fn from_coeffs(domain: Domain, num: &[f64], den: &[f64]) -> Result<Self> {
        Self::rational(domain, Polynomial::new(num.to_vec()), Polynomial::new(den.to_vec()))
    }

    pub fn constant(domain: Domain, c: f64) -> Self {
        Self::assemble(domain, vec![Term::new(Rational::constant(c), 0.0)])
    }

    pub fn zero(domain: Domain) -> Self {
        Self::constant(domain, 0.0)
    }

    pub fn one(domain: Domain) -> Self {
        Self::constant(domain, 1.0)
    }

    /// `c * e^{-s t}` on the half-plane.
    pub fn delay(c: f64, t: f64) -> Result<Self> {
        Self::new(Domain::HalfPlane, vec![Term::new(Rational::constant(c), t)])
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn has_delays(&self) -> bool {
        self.terms.iter().any(|t| t.delay > 0.0 && !t.rational.is_zero())
    }

    pub fn max_delay(&self) -> f64 {
        self.terms
            .iter()
            .filter(|t| !t.rational.is_zero())
            .fold(0.0, |m, t| m.max(t.delay))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.rational.is_zero())
    }

    /// Collapses a delay-free element into one rational function.
    pub fn as_rational(&self) -> Option<Rational> {
        if self.has_delays() {
            return None;
        }
        let mut acc: Option<Rational> = None;
        for t in self.terms.iter().filter(|t| !t.rational.is_zero()) {
            acc = Some(match acc {
                None => t.rational.clone(),
                Some(a) => a.add(&t.rational),
            });
        }
        Some(acc.unwrap_or_else(|| Rational::constant(0.0)))
    }

    fn check_domain(&self, other: &StableElement) -> Result<()> {
        if self.domain == other.domain {
            Ok(())
        } else {
            Err(Error::DomainMismatch)
        }
    }

    pub fn mul(&self, other: &StableElement) -> Result<StableElement> {
        self.check_domain(other)?;
        let mut terms = Vec::new();
        for a in self.terms.iter().filter(|t| !t.rational.is_zero()) {
            for b in other.terms.iter().filter(|t| !t.rational.is_zero()) {
                terms.push(Term::new(a.rational.mul(&b.rational), a.delay + b.delay));
            }
        }
        Ok(Self::assemble(self.domain, terms))
    }

    pub fn add(&self, other: &StableElement) -> Result<StableElement> {
        self.check_domain(other)?;
        let terms = self
            .terms
            .iter()
            .chain(other.terms.iter())
            .filter(|t| !t.rational.is_zero())
            .cloned()
            .collect();
        Ok(Self::assemble(self.domain, terms))
    }

    pub fn scale(&self, k: f64) -> StableElement {
        let terms = self
            .terms
            .iter()
            .map(|t| Term::new(t.rational.scale(k), t.delay))
            .collect();
        Self::assemble(self.domain, terms)
    }

    pub fn neg(&self) -> StableElement {
        self.scale(-1.0)
    }

    /// Multiplicative inverse within the ring, available when the element
    /// is a single delay-free rational whose numerator is a stable
    /// polynomial of full degree.
    pub fn rational_inverse(&self) -> Option<StableElement> {
        let r = self.as_rational()?;
        if r.is_zero() {
            return None;
        }
        StableElement::rational(self.domain, r.den, r.num).ok()
    }

    fn eval_point(&self, x: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for t in &self.terms {
            if t.rational.is_zero() {
                continue;
            }
            let mut v = t.rational.eval(x);
            if t.delay != 0.0 {
                // x = i omega
                v *= Complex64::from_polar(1.0, -x.im * t.delay);
            }
            acc += v;
        }
        acc
    }

    /// Value of the almost-periodic part at frequency `omega`.
    pub fn ap_value(&self, omega: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|t| {
                let l = t.rational.limit_at_infinity();
                if l == 0.0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::from_polar(l, -omega * t.delay)
                }
            })
            .sum()
    }

    pub fn eval_site(&self, site: &Site) -> Result<Complex64> {
        match (self.domain, *site) {
            (Domain::Circle, Site::Boundary(p)) => Ok(self.eval_point(p.z())),
            (Domain::Circle, Site::OnCircle { radius, theta }) => {
                Ok(self.eval_point(Complex64::from_polar(radius, theta)))
            }
            (Domain::HalfPlane, Site::Boundary(p)) => match p.omega() {
                Some(omega) => Ok(self.eval_point(Complex64::new(0.0, omega))),
                None if self.has_delays() => Err(Error::EvaluationAtInfinityUndefined),
                None => Ok(self.ap_value(0.0)),
            },
            (Domain::HalfPlane, Site::Axis(omega)) => Ok(self.eval_point(Complex64::new(0.0, omega))),
            (Domain::HalfPlane, Site::ApLimit(omega)) => Ok(self.ap_value(omega)),
            _ => Err(Error::DomainMismatch),
        }
    }

    /// Transports a delay-free half-plane element to the disk through
    /// `s = (1 + z) / (1 - z)`, clearing denominators with `(1 - z)^deg(den)`.
    pub fn to_disk(&self) -> Result<StableElement> {
        if self.domain != Domain::HalfPlane {
            return Err(Error::DomainMismatch);
        }
        let r = self
            .as_rational()
            .ok_or_else(|| Error::InvalidElement("delay elements have no rational disk image".into()))?;
        let k = r.den.degree();
        let transport = |p: &Polynomial| -> Polynomial {
            let plus = Polynomial::new(vec![1.0, 1.0]);
            let minus = Polynomial::new(vec![1.0, -1.0]);
            let mut acc = Polynomial::zero();
            for (i, &c) in p.coeffs().iter().enumerate() {
                let term = (0..i).fold(Polynomial::constant(c), |a, _| &a * &plus);
                let term = (0..k - i).fold(term, |a, _| &a * &minus);
                acc = &acc + &term;
            }
            acc
        };
        StableElement::rational(Domain::Circle, transport(&r.num), transport(&r.den))
    }
}

/// `Σ coeff_k e^{-i omega t_k}`: an element of the almost-periodic algebra.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct DirichletSum {
    terms: Vec<ApTerm>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApTerm {
    pub coeff: Complex64,
    pub delay: f64,
}

impl DirichletSum {
    pub fn new(terms: Vec<ApTerm>) -> Self {
        let mut terms = terms;
        terms.sort_by(|a, b| a.delay.total_cmp(&b.delay));
        let mut merged: Vec<ApTerm> = Vec::with_capacity(terms.len());
        for t in terms {
            match merged.last_mut() {
                Some(last) if (last.delay - t.delay).abs() <= 1e-12 * (1.0 + t.delay.abs()) => last.coeff += t.coeff,
                _ => merged.push(t),
            }
        }
        let scale = merged.iter().fold(0.0f64, |m, t| m.max(t.coeff.norm()));
        merged.retain(|t| t.coeff.norm() > 1e-15 * scale);
        DirichletSum { terms: merged }
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![ApTerm { coeff: c, delay: 0.0 }])
    }

    pub fn terms(&self) -> &[ApTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, omega: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|t| t.coeff * Complex64::from_polar(1.0, -omega * t.delay))
            .sum()
    }

    pub fn max_abs_delay(&self) -> f64 {
        self.terms.iter().fold(0.0, |m, t| m.max(t.delay.abs()))
    }

    /// Bound on `|d/d omega f|`.
    pub fn derivative_bound(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff.norm() * t.delay.abs()).sum()
    }

    pub fn add(&self, other: &DirichletSum) -> DirichletSum {
        Self::new(self.terms.iter().chain(other.terms.iter()).copied().collect())
    }

    pub fn mul(&self, other: &DirichletSum) -> DirichletSum {
        let mut out = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                out.push(ApTerm {
                    coeff: a.coeff * b.coeff,
                    delay: a.delay + b.delay,
                });
            }
        }
        Self::new(out)
    }

    /// Pointwise complex conjugate: `conj(c e^{-i w t}) = conj(c) e^{-i w (-t)}`.
    pub fn conj(&self) -> DirichletSum {
        Self::new(
            self.terms
                .iter()
                .map(|t| ApTerm {
                    coeff: t.coeff.conj(),
                    delay: -t.delay,
                })
                .collect(),
        )
    }

    pub fn scale(&self, k: Complex64) -> DirichletSum {
        Self::new(
            self.terms
                .iter()
                .map(|t| ApTerm {
                    coeff: t.coeff * k,
                    delay: t.delay,
                })
                .collect(),
        )
    }
}

/// `f = c0_part + Σ ap_part`, with `c0_part` vanishing at infinity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct C0APDecomposition {
    pub c0_part: StableElement,
    pub ap_part: Vec<ApTerm>,
}

impl C0APDecomposition {
    pub fn ap_sum(&self) -> DirichletSum {
        DirichletSum::new(self.ap_part.clone())
    }
}

pub fn decompose_c0_ap(elem: &StableElement) -> Result<C0APDecomposition> {
    if elem.domain != Domain::HalfPlane {
        return Err(Error::DomainMismatch);
    }
    let mut c0 = Vec::new();
    let mut ap = Vec::new();
    for t in elem.terms.iter().filter(|t| !t.rational.is_zero()) {
        let (limit, rem) = t.rational.split_at_infinity();
        if limit != 0.0 {
            ap.push(ApTerm {
                coeff: Complex64::new(limit, 0.0),
                delay: t.delay,
            });
        }
        if !rem.is_zero() {
            c0.push(Term::new(rem, t.delay));
        }
    }
    Ok(C0APDecomposition {
        c0_part: StableElement::assemble(Domain::HalfPlane, c0),
        ap_part: DirichletSum::new(ap).terms,
    })
}

pub fn evaluate(elem: &StableElement, point: BoundaryPoint) -> Result<Complex64> {
    elem.eval_site(&Site::Boundary(point))
}

/// A boundary function of `S`: stable elements combined by sums, products
/// and the involution (pointwise conjugation).
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(Complex64),
    Elem(StableElement),
    Add(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Conj(Box<Expr>),
}

impl From<StableElement> for Expr {
    fn from(e: StableElement) -> Self {
        Expr::Elem(e)
    }
}

impl From<&StableElement> for Expr {
    fn from(e: &StableElement) -> Self {
        Expr::Elem(e.clone())
    }
}

impl ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::Add(Box::new(self), Box::new(rhs))
    }
}

impl ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::Add(Box::new(self), Box::new(Expr::Neg(Box::new(rhs))))
    }
}

impl ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::Mul(Box::new(self), Box::new(rhs))
    }
}

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Neg(Box::new(self))
    }
}

impl Expr {
    pub fn constant(c: f64) -> Expr {
        Expr::Const(Complex64::new(c, 0.0))
    }

    /// The involution `f*`.
    pub fn conj(self) -> Expr {
        Expr::Conj(Box::new(self))
    }

    pub fn leaves(&self) -> Vec<&StableElement> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a StableElement>) {
        match self {
            Expr::Const(_) => {}
            Expr::Elem(e) => out.push(e),
            Expr::Add(a, b) | Expr::Mul(a, b) => {
                a.collect_leaves(out);
                b.collect_leaves(out);
            }
            Expr::Neg(a) | Expr::Conj(a) => a.collect_leaves(out),
        }
    }

    /// Shared domain of all leaves; `None` for a pure constant.
    pub fn domain(&self) -> Result<Option<Domain>> {
        let mut domain = None;
        for leaf in self.leaves() {
            match domain {
                None => domain = Some(leaf.domain),
                Some(d) if d != leaf.domain => return Err(Error::DomainMismatch),
                _ => {}
            }
        }
        Ok(domain)
    }

    pub fn delay_profile(&self) -> BoundaryProfile {
        BoundaryProfile::of(self.leaves())
    }

    pub fn eval(&self, site: &Site) -> Result<Complex64> {
        Ok(match self {
            Expr::Const(c) => *c,
            Expr::Elem(e) => e.eval_site(site)?,
            Expr::Add(a, b) => a.eval(site)? + b.eval(site)?,
            Expr::Mul(a, b) => a.eval(site)? * b.eval(site)?,
            Expr::Neg(a) => -a.eval(site)?,
            Expr::Conj(a) => a.eval(site)?.conj(),
        })
    }

    /// Almost-periodic part, assembled term-algebraically from the leaves.
    pub fn ap_part(&self) -> Result<DirichletSum> {
        Ok(match self {
            Expr::Const(c) => DirichletSum::constant(*c),
            Expr::Elem(e) => decompose_c0_ap(e)?.ap_sum(),
            Expr::Add(a, b) => a.ap_part()?.add(&b.ap_part()?),
            Expr::Mul(a, b) => a.ap_part()?.mul(&b.ap_part()?),
            Expr::Neg(a) => a.ap_part()?.scale(Complex64::new(-1.0, 0.0)),
            Expr::Conj(a) => a.ap_part()?.conj(),
        })
    }
}

/// Ordered samples of a boundary function.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampledCurve {
    thetas: Vec<f64>,
    values: Vec<Complex64>,
    closed: bool,
}

impl SampledCurve {
    pub fn new(thetas: Vec<f64>, values: Vec<Complex64>, closed: bool) -> Result<Self> {
        if thetas.len() != values.len() || thetas.is_empty() {
            return Err(Error::InvalidCurve(
                "thetas and values must be non-empty and equally long".into(),
            ));
        }
        if thetas.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidCurve("thetas must be strictly increasing".into()));
        }
        Ok(SampledCurve { thetas, values, closed })
    }

    /// Uniform closed grid of `n` points on `[-pi, pi)`, shifted so the
    /// last point is `pi - step`.
    pub fn uniform_grid(n: usize) -> Vec<f64> {
        (0..n).map(|j| -PI + 2.0 * PI * (j as f64 + 0.5) / n as f64).collect()
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn closed(&self) -> bool {
        self.closed
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointwiseOp {
    Add,
    Mul,
    Conj,
    Abs2,
}

pub fn pointwise(op: PointwiseOp, curves: &[&SampledCurve]) -> Result<SampledCurve> {
    let arity = match op {
        PointwiseOp::Add | PointwiseOp::Mul => 2,
        PointwiseOp::Conj | PointwiseOp::Abs2 => 1,
    };
    if curves.len() != arity {
        return Err(Error::InvalidCurve(format!(
            "{op:?} takes {arity} curve(s), got {}",
            curves.len()
        )));
    }
    let first = curves[0];
    if curves.iter().any(|c| c.thetas != first.thetas) {
        return Err(Error::GridMismatch);
    }
    let values = match op {
        PointwiseOp::Add => first.values.iter().zip(&curves[1].values).map(|(a, b)| a + b).collect(),
        PointwiseOp::Mul => first.values.iter().zip(&curves[1].values).map(|(a, b)| a * b).collect(),
        PointwiseOp::Conj => first.values.iter().map(|a| a.conj()).collect(),
        PointwiseOp::Abs2 => first.values.iter().map(|a| Complex64::new(a.norm_sqr(), 0.0)).collect(),
    };
    Ok(SampledCurve {
        thetas: first.thetas.clone(),
        values,
        closed: curves.iter().all(|c| c.closed),
    })
}

pub fn sample(elem: &StableElement, grid: &[f64]) -> Result<SampledCurve> {
    let values = grid
        .iter()
        .map(|&theta| evaluate(elem, BoundaryPoint::new(theta)?))
        .collect::<Result<Vec<_>>>()?;
    let closed = elem.domain == Domain::Circle || !elem.has_delays();
    SampledCurve::new(grid.to_vec(), values, closed)
}

/// Sup of `|f|` over the boundary of the instance.
pub fn sup_modulus(expr: &Expr, instance: &AlgebraInstance) -> Result<Extremum> {
    check_expr_domain(expr, instance)?;
    let f = |site: &Site| expr.eval(site).map(|v| v.norm());
    instance.extremum(&f, expr.delay_profile(), Mode::Max)
}

/// Inf of `|f|` over the boundary of the instance.
pub fn inf_modulus(expr: &Expr, instance: &AlgebraInstance) -> Result<Extremum> {
    check_expr_domain(expr, instance)?;
    let f = |site: &Site| expr.eval(site).map(|v| v.norm());
    instance.extremum(&f, expr.delay_profile(), Mode::Min)
}

pub(crate) fn check_expr_domain(expr: &Expr, instance: &AlgebraInstance) -> Result<()> {
    match expr.domain()? {
        Some(d) if d != instance.domain() => Err(Error::DomainMismatch),
        _ => Ok(()),
    }
}
