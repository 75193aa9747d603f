//! Python bindings: algebra instances, plants as coprime factorizations,
//! the chordal distance, stability margins and robustness certificates.

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use nu_chord as core;
use nu_chord::{AlgebraInstance, CoprimeFactorization, Domain, GridBudget, InstanceKind, StableElement, Tolerances};

create_exception!(
    nu_chord,
    NuChordError,
    PyRuntimeError,
    "Numerical failure inside nu-chord."
);
create_exception!(
    nu_chord,
    NotCoprimeError,
    NuChordError,
    "Factors are not coprime or the Bezout system failed."
);

fn to_py(e: core::Error) -> PyErr {
    use core::Error::*;
    match e {
        InvalidElement(_) | InvalidInstance(_) | InvalidCurve(_) | DomainMismatch | GridMismatch | VariantMismatch => {
            PyValueError::new_err(e.to_string())
        }
        NotCoprime(_) | SolveFailed(_) | DegenerateDenominator { .. } | MissingWitness => {
            NotCoprimeError::new_err(e.to_string())
        }
        _ => NuChordError::new_err(e.to_string()),
    }
}

fn parse_kind(kind: &str) -> PyResult<InstanceKind> {
    match kind {
        "circle" => Ok(InstanceKind::Circle),
        "halfplane_c0ap" => Ok(InstanceKind::HalfPlaneC0AP),
        "annulus" => Ok(InstanceKind::AnnulusLimit),
        other => Err(PyValueError::new_err(format!(
            "unknown instance {other:?}; expected 'circle', 'halfplane_c0ap' or 'annulus'"
        ))),
    }
}

fn kind_name(kind: InstanceKind) -> &'static str {
    match kind {
        InstanceKind::Circle => "circle",
        InstanceKind::HalfPlaneC0AP => "halfplane_c0ap",
        InstanceKind::AnnulusLimit => "annulus",
    }
}

fn py_bool(b: bool) -> &'static str {
    if b {
        "True"
    } else {
        "False"
    }
}

/// Boundary algebra together with its tolerances and grid budget.
#[pyclass(frozen, module = "nu_chord")]
pub struct Instance {
    inner: AlgebraInstance,
}

#[pymethods]
impl Instance {
    #[new]
    #[pyo3(signature = (kind, tol = 1e-9, max_grid_log2 = None))]
    fn new(kind: &str, tol: f64, max_grid_log2: Option<u32>) -> PyResult<Self> {
        let mut grid = GridBudget::default();
        if let Some(m) = max_grid_log2 {
            grid.max_log2 = m;
            grid.initial_log2 = grid.initial_log2.min(m);
        }
        let tolerances = Tolerances {
            sup_tol: tol,
            ..Tolerances::default()
        };
        let inner = AlgebraInstance::new(parse_kind(kind)?)
            .with_tolerances(tolerances)
            .and_then(|i| i.with_grid(grid))
            .map_err(to_py)?;
        Ok(Instance { inner })
    }

    #[getter]
    fn kind(&self) -> &'static str {
        kind_name(self.inner.kind)
    }

    #[getter]
    fn tol(&self) -> f64 {
        self.inner.tolerances.sup_tol
    }

    fn __repr__(&self) -> String {
        format!("Instance({:?}, tol={:e})", self.kind(), self.tol())
    }
}

/// `(num, den, delay)` with ascending-power coefficients.
type TermTuple = (Vec<f64>, Vec<f64>, f64);

fn element(terms: Vec<TermTuple>, domain: Domain) -> PyResult<StableElement> {
    let terms = terms
        .into_iter()
        .map(|(num, den, delay)| core::Term::new(core::Rational::new(num.into(), den.into()), delay))
        .collect();
    StableElement::new(domain, terms).map_err(to_py)
}

/// A plant `n / d` with `n`, `d` coprime in the stable ring.
#[pyclass(frozen, module = "nu_chord")]
pub struct Plant {
    inner: CoprimeFactorization,
}

#[pymethods]
impl Plant {
    /// Factor the rational plant `num / den`.
    #[staticmethod]
    fn rational(num: Vec<f64>, den: Vec<f64>, instance: &Instance) -> PyResult<Self> {
        let p = core::Fraction::rational(&num, &den);
        let inner = core::coprime_factorize(&p, &instance.inner).map_err(to_py)?;
        Ok(Plant { inner })
    }

    /// Build from explicit factors, each a list of `(num, den, delay)` terms.
    /// `bezout` is an optional `(x, y)` pair of term lists with `n x + d y = 1`.
    #[staticmethod]
    #[pyo3(signature = (n, d, instance, bezout = None))]
    fn from_factors(
        n: Vec<TermTuple>,
        d: Vec<TermTuple>,
        instance: &Instance,
        bezout: Option<(Vec<TermTuple>, Vec<TermTuple>)>,
    ) -> PyResult<Self> {
        let domain = instance.inner.domain();
        let bezout = match bezout {
            Some((x, y)) => Some(core::Bezout {
                x: element(x, domain)?,
                y: element(y, domain)?,
            }),
            None => None,
        };
        let inner = CoprimeFactorization::new(element(n, domain)?, element(d, domain)?, bezout, &instance.inner)
            .map_err(to_py)?;
        Ok(Plant { inner })
    }

    /// `1 / (s - a e^{-s})` over the half-plane instance.
    #[staticmethod]
    fn delay_plant(a: f64) -> PyResult<Self> {
        let inner = core::delay_example::plant(a, &AlgebraInstance::halfplane_c0ap()).map_err(to_py)?;
        Ok(Plant { inner })
    }

    /// The controller `-(1 + e^{-s})`.
    #[staticmethod]
    fn delay_controller() -> PyResult<Self> {
        let inner = core::delay_example::controller(&AlgebraInstance::halfplane_c0ap()).map_err(to_py)?;
        Ok(Plant { inner })
    }

    #[getter]
    fn instance(&self) -> &'static str {
        kind_name(self.inner.instance.kind)
    }

    #[getter]
    fn has_witnesses(&self) -> bool {
        self.inner.bezout.is_some()
    }

    /// `sup |n x + d y - 1|` over the boundary.
    fn bezout_residual(&self) -> PyResult<f64> {
        core::verify_bezout(&self.inner).map_err(to_py)
    }

    /// `(n, d)` at boundary angle `theta`.
    fn eval(&self, theta: f64) -> PyResult<(Complex64, Complex64)> {
        let site = core::Site::Boundary(core::BoundaryPoint::new(theta).map_err(to_py)?);
        self.inner.eval(&site).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!(
            "Plant(instance={:?}, n_terms={}, d_terms={})",
            self.instance(),
            self.inner.n.terms().len(),
            self.inner.d.terms().len()
        )
    }
}

#[pyclass(frozen, get_all, module = "nu_chord")]
pub struct Metric {
    value: f64,
    /// `"kappa_sup"` or `"index_condition_failed"`.
    branch: &'static str,
    invertible: bool,
    index_holds: bool,
    ambiguous: bool,
    grid_points: usize,
    achieved_tol: f64,
}

#[pymethods]
impl Metric {
    fn __repr__(&self) -> String {
        format!("Metric(value={}, branch={:?})", self.value, self.branch)
    }
}

#[pyclass(frozen, get_all, module = "nu_chord")]
pub struct Margin {
    value: f64,
    stabilizes: bool,
    grid_points: usize,
    achieved_tol: f64,
}

#[pymethods]
impl Margin {
    fn __repr__(&self) -> String {
        format!("Margin(value={}, stabilizes={})", self.value, py_bool(self.stabilizes))
    }
}

#[pyclass(frozen, get_all, module = "nu_chord")]
pub struct Certificate {
    mu_nominal: f64,
    distance: f64,
    lower_bound: f64,
    stabilized: bool,
    mu_perturbed: Option<f64>,
    bound_holds: Option<bool>,
}

#[pymethods]
impl Certificate {
    fn __repr__(&self) -> String {
        format!(
            "Certificate(lower_bound={}, stabilized={})",
            self.lower_bound,
            py_bool(self.stabilized)
        )
    }
}

fn margin_of(m: core::Margin) -> Margin {
    Margin {
        value: m.value,
        stabilizes: m.stabilizes,
        grid_points: m.grid_points,
        achieved_tol: m.achieved_tol,
    }
}

/// Chordal distance `d_cr(p1, p2)`.
#[pyfunction]
fn d_cr(p1: &Plant, p2: &Plant) -> PyResult<Metric> {
    let r = core::d_cr_factored(&p1.inner, &p2.inner).map_err(to_py)?;
    Ok(Metric {
        value: r.value,
        branch: match r.branch {
            core::Branch::KappaSup => "kappa_sup",
            core::Branch::IndexConditionFailed => "index_condition_failed",
        },
        invertible: r.condition.invertible,
        index_holds: r.condition.holds,
        ambiguous: r.grid_report.branch_ambiguous,
        grid_points: r.grid_report.grid_points,
        achieved_tol: r.grid_report.achieved_tol,
    })
}

/// Pointwise chordal distance at boundary angle `theta`.
#[pyfunction]
fn kappa_at(p1: &Plant, p2: &Plant, theta: f64) -> PyResult<f64> {
    let site = core::Site::Boundary(core::BoundaryPoint::new(theta).map_err(to_py)?);
    core::kappa_at(&p1.inner, &p2.inner, &site).map_err(to_py)
}

#[pyfunction]
fn stabilizes(plant: &Plant, controller: &Plant) -> PyResult<bool> {
    core::stabilizes(&plant.inner, &controller.inner).map_err(to_py)
}

/// Stability margin; 0 when the controller does not stabilize.
#[pyfunction]
fn margin(plant: &Plant, controller: &Plant) -> PyResult<Margin> {
    core::margin(&plant.inner, &controller.inner)
        .map(margin_of)
        .map_err(to_py)
}

/// Margin through the closed-loop operator norm.
#[pyfunction]
fn margin_via_norm(plant: &Plant, controller: &Plant) -> PyResult<Margin> {
    core::margin_via_norm(&plant.inner, &controller.inner)
        .map(margin_of)
        .map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (nominal, controller, plant, direct_mu = false))]
fn certify(nominal: &Plant, controller: &Plant, plant: &Plant, direct_mu: bool) -> PyResult<Certificate> {
    let c = core::certify_robust(&nominal.inner, &controller.inner, &plant.inner, direct_mu).map_err(to_py)?;
    Ok(Certificate {
        mu_nominal: c.mu_nominal,
        distance: c.distance,
        lower_bound: c.lower_bound,
        stabilized: c.stabilized,
        mu_perturbed: c.mu_perturbed,
        bound_holds: c.bound_holds,
    })
}

/// `|a - 1| / sqrt(2 (1 + a^2))`
#[pyfunction]
fn closed_form_distance(a: f64) -> f64 {
    core::delay_example::closed_form_distance(a)
}

/// Runs the built-in invariant suite; returns `(name, passed, detail)` rows.
#[pyfunction]
#[pyo3(signature = (seed = 0x5eed))]
fn selftest(py: Python<'_>, seed: u64) -> Vec<(String, bool, String)> {
    py.detach(|| core::selftest::run(seed))
        .into_iter()
        .map(|o| (o.name, o.passed, o.detail))
        .collect()
}

#[pymodule]
#[pyo3(name = "nu_chord")]
pub fn nu_chord_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Instance>()?;
    m.add_class::<Plant>()?;
    m.add_class::<Metric>()?;
    m.add_class::<Margin>()?;
    m.add_class::<Certificate>()?;
    m.add("NuChordError", m.py().get_type::<NuChordError>())?;
    m.add("NotCoprimeError", m.py().get_type::<NotCoprimeError>())?;
    m.add_function(wrap_pyfunction!(d_cr, m)?)?;
    m.add_function(wrap_pyfunction!(kappa_at, m)?)?;
    m.add_function(wrap_pyfunction!(stabilizes, m)?)?;
    m.add_function(wrap_pyfunction!(margin, m)?)?;
    m.add_function(wrap_pyfunction!(margin_via_norm, m)?)?;
    m.add_function(wrap_pyfunction!(certify, m)?)?;
    m.add_function(wrap_pyfunction!(closed_form_distance, m)?)?;
    m.add_function(wrap_pyfunction!(selftest, m)?)?;
    Ok(())
}
