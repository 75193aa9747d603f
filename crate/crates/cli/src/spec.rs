//! Plant spec files.
//!
//! ```json
//! {"instance": "halfplane_c0ap",
//!  "plant": {"kind": "cf",
//!            "n": [{"num": [1], "den": [1, 1]}],
//!            "d": [{"num": [0, 1], "den": [1, 1]}, {"num": [-1], "den": [1, 1], "delay": 1}],
//!            "bezout": {"x": [{"num": [1], "den": [1]}, {"num": [1], "den": [1], "delay": 1}],
//!                       "y": [{"num": [1], "den": [1]}]}}}
//! ```
//!
//! Coefficients are ascending-power reals. In sweep templates a
//! coefficient may instead be a string in the parameter `a`: `"a"`,
//! `"-a"`, `"2.5*a"` or `"a*2.5"`.

use serde::Deserialize;

use nu_chord::{
    AlgebraInstance, Bezout, CoprimeFactorization, Domain, Fraction, InstanceKind, Polynomial, Rational, StableElement,
    Term,
};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlantFile {
    pub instance: String,
    pub plant: PlantData,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PlantData {
    Rational {
        num: Vec<Coef>,
        den: Vec<Coef>,
    },
    Cf {
        n: Vec<TermSpec>,
        d: Vec<TermSpec>,
        #[serde(default)]
        bezout: Option<BezoutSpec>,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub num: Vec<Coef>,
    pub den: Vec<Coef>,
    #[serde(default)]
    pub delay: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BezoutSpec {
    pub x: Vec<TermSpec>,
    pub y: Vec<TermSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Coef {
    Value(f64),
    Param(String),
}

impl Coef {
    fn resolve(&self, param: Option<f64>) -> Result<f64, String> {
        match self {
            Coef::Value(v) => Ok(*v),
            Coef::Param(text) => {
                let a = param.ok_or_else(|| format!("coefficient {text:?} needs a sweep parameter"))?;
                parse_param(text, a)
            }
        }
    }
}

fn parse_param(text: &str, a: f64) -> Result<f64, String> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("unsupported coefficient expression {text:?}");
    let (sign, body) = match t.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, t.as_str()),
    };
    if body == "a" {
        return Ok(sign * a);
    }
    let factor = body
        .strip_suffix("*a")
        .or_else(|| body.strip_prefix("a*"))
        .ok_or_else(bad)?;
    let k: f64 = factor.parse().map_err(|_| bad())?;
    Ok(sign * k * a)
}

pub fn parse_instance(name: &str) -> Result<InstanceKind, String> {
    match name {
        "circle" => Ok(InstanceKind::Circle),
        "halfplane_c0ap" => Ok(InstanceKind::HalfPlaneC0AP),
        "annulus" => Ok(InstanceKind::AnnulusLimit),
        other => Err(format!(
            "unknown instance {other:?} (expected circle, halfplane_c0ap or annulus)"
        )),
    }
}

pub fn instance_name(kind: InstanceKind) -> &'static str {
    match kind {
        InstanceKind::Circle => "circle",
        InstanceKind::HalfPlaneC0AP => "halfplane_c0ap",
        InstanceKind::AnnulusLimit => "annulus",
    }
}

fn poly(coeffs: &[Coef], param: Option<f64>) -> Result<Polynomial, String> {
    let values = coeffs.iter().map(|c| c.resolve(param)).collect::<Result<Vec<_>, _>>()?;
    if values.iter().any(|v| !v.is_finite()) {
        return Err("coefficients must be finite".into());
    }
    Ok(Polynomial::new(values))
}

/// Either an input error (message) or a library error from element
/// construction.
#[derive(Debug)]
pub enum BuildError {
    Spec(String),
    Core(nu_chord::Error),
}

impl From<nu_chord::Error> for BuildError {
    fn from(e: nu_chord::Error) -> Self {
        BuildError::Core(e)
    }
}

fn element(terms: &[TermSpec], domain: Domain, param: Option<f64>) -> Result<StableElement, BuildError> {
    if terms.is_empty() {
        return Err(BuildError::Spec("term list must not be empty".into()));
    }
    let terms = terms
        .iter()
        .map(|t| {
            if t.delay != 0.0 && domain != Domain::HalfPlane {
                return Err(BuildError::Spec(
                    "delays are only allowed under the halfplane_c0ap instance".into(),
                ));
            }
            let r = Rational::new(
                poly(&t.num, param).map_err(BuildError::Spec)?,
                poly(&t.den, param).map_err(BuildError::Spec)?,
            );
            Ok(Term::new(r, t.delay))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(StableElement::new(domain, terms)?)
}

impl PlantFile {
    pub fn parse(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| format!("invalid plant spec: {e}"))
    }

    pub fn kind(&self) -> Result<InstanceKind, String> {
        parse_instance(&self.instance)
    }

    /// The plant as a fraction over `instance`, with sweep parameter `a`
    /// substituted when given.
    pub fn fraction(&self, instance: &AlgebraInstance, param: Option<f64>) -> Result<Fraction, BuildError> {
        let domain = instance.domain();
        match &self.plant {
            PlantData::Rational { num, den } => {
                let num = poly(num, param).map_err(BuildError::Spec)?;
                let den = poly(den, param).map_err(BuildError::Spec)?;
                if den.is_zero() {
                    return Err(BuildError::Spec("denominator must be nonzero".into()));
                }
                Ok(Fraction::Rational { num, den })
            }
            PlantData::Cf { n, d, bezout } => {
                let n = element(n, domain, param)?;
                let d = element(d, domain, param)?;
                let bezout = match bezout {
                    Some(b) => Some(Bezout {
                        x: element(&b.x, domain, param)?,
                        y: element(&b.y, domain, param)?,
                    }),
                    None => None,
                };
                Ok(Fraction::Factored(CoprimeFactorization::new(n, d, bezout, instance)?))
            }
        }
    }
}
