//! Textual input formats: complex numbers, zero rules, polynomials and
//! compact map specifications.
//!
//! ```text
//! complex   := real | [real] ('+'|'-') [real] 'i'        e.g. "2+3i", "-i", "1e-3"
//! zero rule := [factor '*'] 'n' ['^' real] ['*'] [factor] e.g. "n^2", "n^2pi^2", "4*n^1.5"
//! factor    := real | 'pi' ['^' real]
//! poly      := real (';' real)*                          ascending coefficients
//! map spec  := family [':' key '=' value (',' key '=' value)*]
//!              family ∈ {exp, sinh-over-z, lp}; keys lambda, a, zeros, N, poly
//! domain    := kind [':' key '=' value (',' key '=' value)*]
//!              disk | upper | punctured | slit (base, dir) | annulus (r_in, r_out)
//!              | disk-minus (p) | disk-radius (r)
//! points    := complex (';' complex)*
//! ```
//!
//! These parsers see untrusted input from the command line and are fuzzed;
//! they return [`ParseError`] for every malformed string and never panic.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::hypgeo::ModelDomain;
use crate::maps::{EntireMap, ZeroRule};
use crate::poly::Polynomial;
use crate::Direction;

/// Largest truncation accepted from text.
pub const MAX_TRUNCATION: usize = 1_000_000;
/// Largest polynomial degree accepted from text.
pub const MAX_DEGREE: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError(String);

impl ParseError {
    pub fn new(msg: impl Into<String>) -> Self {
        Self(msg.into())
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ParseError {}

impl From<crate::Error> for ParseError {
    fn from(e: crate::Error) -> Self {
        ParseError(e.to_string())
    }
}

fn real(s: &str) -> Result<f64, ParseError> {
    let v: f64 = s.parse().map_err(|_| ParseError::new(format!("not a number: '{s}'")))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(ParseError::new(format!("not a finite number: '{s}'")))
    }
}

/// Parses `"a"`, `"bi"`, `"a+bi"`, `"a-bi"` (also with `j`).
pub fn parse_complex(input: &str) -> Result<Complex64, ParseError> {
    let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(ParseError::new("empty complex number"));
    }
    let Some(body) = s.strip_suffix(['i', 'j']) else {
        return Ok(Complex64::new(real(&s)?, 0.0));
    };
    // split at the last sign that is not a leading sign or an exponent sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re_text, im_text) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("", body),
    };
    let im = match im_text {
        "" | "+" => 1.0,
        "-" => -1.0,
        t => real(t)?,
    };
    let re = if re_text.is_empty() { 0.0 } else { real(re_text)? };
    Ok(Complex64::new(re, im))
}

fn factor(s: &str) -> Result<f64, ParseError> {
    if let Some(rest) = s.strip_prefix("pi") {
        let power = match rest.strip_prefix('^') {
            Some(p) => real(p)?,
            None if rest.is_empty() => 1.0,
            None => return Err(ParseError::new(format!("bad factor '{s}'"))),
        };
        let v = PI.powf(power);
        return if v.is_finite() && v > 0.0 {
            Ok(v)
        } else {
            Err(ParseError::new(format!("factor '{s}' out of range")))
        };
    }
    real(s)
}

impl FromStr for ZeroRule {
    type Err = ParseError;

    fn from_str(input: &str) -> Result<Self, Self::Err> {
        let s: String = input.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_lowercase();
        let Some(pos) = s.find('n') else {
            return Err(ParseError::new(format!("zero rule '{input}' has no 'n'")));
        };
        let prefix = s[..pos].strip_suffix('*').unwrap_or(&s[..pos]);
        let mut scale = if prefix.is_empty() { 1.0 } else { factor(prefix)? };
        let rest = &s[pos + 1..];
        let (exponent, tail) = match rest.strip_prefix('^') {
            Some(r) => {
                let end = r.find(['*', 'p']).unwrap_or(r.len());
                (real(&r[..end])?, &r[end..])
            }
            None => (1.0, rest),
        };
        let tail = tail.strip_prefix('*').unwrap_or(tail);
        if !tail.is_empty() {
            scale *= factor(tail)?;
        }
        Ok(ZeroRule::new(scale, exponent)?)
    }
}

impl FromStr for Polynomial {
    type Err = ParseError;

    fn from_str(input: &str) -> Result<Self, Self::Err> {
        let coeffs = input.split([';', ',']).map(|t| real(t.trim())).collect::<Result<Vec<_>, _>>()?;
        if coeffs.len() > MAX_DEGREE + 1 {
            return Err(ParseError::new(format!("polynomial degree above {MAX_DEGREE}")));
        }
        Ok(Polynomial::new(coeffs)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyName {
    Exp,
    SinhOverZ,
    Lp,
}

impl FromStr for FamilyName {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "exp" => Ok(FamilyName::Exp),
            "sinh-over-z" | "sinh" => Ok(FamilyName::SinhOverZ),
            "lp" | "lp-product" => Ok(FamilyName::Lp),
            other => Err(ParseError::new(format!(
                "unknown map family '{other}' (expected exp, sinh-over-z or lp)"
            ))),
        }
    }
}

/// A map family plus its named parameters, as given on the command line.
#[derive(Debug, Clone, PartialEq)]
pub struct MapSpec {
    pub family: FamilyName,
    pub lambda: Option<f64>,
    pub a: Option<f64>,
    pub zeros: Option<ZeroRule>,
    pub truncation: Option<usize>,
    pub poly: Option<Polynomial>,
}

impl MapSpec {
    pub fn new(family: FamilyName) -> Self {
        Self { family, lambda: None, a: None, zeros: None, truncation: None, poly: None }
    }

    /// Builds the map, rejecting parameters that do not belong to the family.
    pub fn build(&self) -> Result<EntireMap, ParseError> {
        let base = match self.family {
            FamilyName::Exp => {
                if self.lambda.is_some()
                    || self.a.is_some()
                    || self.zeros.is_some()
                    || self.truncation.is_some()
                {
                    return Err(ParseError::new("exp takes no lambda, a, zeros or N"));
                }
                EntireMap::exp()
            }
            FamilyName::SinhOverZ => {
                if self.zeros.is_some() || self.truncation.is_some() {
                    return Err(ParseError::new("sinh-over-z takes no zeros or N"));
                }
                EntireMap::sinh_over_z(self.lambda.unwrap_or(1.0), self.a.unwrap_or(0.0))?
            }
            FamilyName::Lp => {
                if self.lambda.is_some() || self.a.is_some() {
                    return Err(ParseError::new("lp takes no lambda or a"));
                }
                let rule = self.zeros.ok_or_else(|| ParseError::new("lp needs a zero rule"))?;
                let n = self.truncation.ok_or_else(|| ParseError::new("lp needs a truncation N"))?;
                if n == 0 || n > MAX_TRUNCATION {
                    return Err(ParseError::new(format!("N must be in 1..={MAX_TRUNCATION}")));
                }
                EntireMap::lp_from_rule(rule, n)?
            }
        };
        match &self.poly {
            Some(p) => Ok(base.precompose_poly(p.clone())?),
            None => Ok(base),
        }
    }
}

impl FromStr for MapSpec {
    type Err = ParseError;

    fn from_str(input: &str) -> Result<Self, Self::Err> {
        let (family, params) = match input.split_once(':') {
            Some((f, p)) => (f, Some(p)),
            None => (input, None),
        };
        let mut spec = MapSpec::new(family.parse()?);
        for kv in key_values(params) {
            let (key, value) = kv?;
            match key {
                "lambda" => spec.lambda = Some(real(value)?),
                "a" => spec.a = Some(real(value)?),
                "zeros" => spec.zeros = Some(value.parse()?),
                "N" => {
                    spec.truncation =
                        Some(value.parse().map_err(|_| ParseError::new(format!("bad N '{value}'")))?)
                }
                "poly" => spec.poly = Some(value.parse()?),
                other => return Err(ParseError::new(format!("unknown map parameter '{other}'"))),
            }
        }
        Ok(spec)
    }
}

fn key_values(params: Option<&str>) -> impl Iterator<Item = Result<(&str, &str), ParseError>> {
    params.into_iter().flat_map(|p| p.split(',')).map(str::trim).filter(|i| !i.is_empty()).map(|item| {
        item.split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| ParseError::new(format!("expected key=value, got '{item}'")))
    })
}

impl FromStr for ModelDomain {
    type Err = ParseError;

    fn from_str(input: &str) -> Result<Self, Self::Err> {
        let (kind, params) = match input.split_once(':') {
            Some((k, p)) => (k.trim(), Some(p)),
            None => (input.trim(), None),
        };
        let mut values: Vec<(&str, &str)> = Vec::new();
        for kv in key_values(params) {
            values.push(kv?);
        }
        let allowed: &[&str] = match kind {
            "disk" | "upper" | "punctured" => &[],
            "slit" => &["base", "dir"],
            "annulus" => &["r_in", "r_out"],
            "disk-minus" => &["p"],
            "disk-radius" => &["r"],
            other => return Err(ParseError::new(format!("unknown domain '{other}'"))),
        };
        if let Some((k, _)) = values.iter().find(|(k, _)| !allowed.contains(k)) {
            return Err(ParseError::new(format!("domain '{kind}' takes no parameter '{k}'")));
        }
        let get = |key: &str| values.iter().rev().find(|(k, _)| *k == key).map(|(_, v)| *v);
        let need = |key: &str| {
            get(key).ok_or_else(|| ParseError::new(format!("domain '{kind}' needs {key}"))).and_then(real)
        };
        let domain = match kind {
            "disk" => ModelDomain::UnitDisk,
            "upper" => ModelDomain::UpperHalfPlane,
            "punctured" => ModelDomain::PuncturedDisk,
            "slit" => ModelDomain::SlitPlane {
                base: get("base").map(real).transpose()?.unwrap_or(0.0),
                dir: get("dir").map(Direction::from_str).transpose()?.unwrap_or(Direction::Plus),
            },
            "annulus" => ModelDomain::annulus(need("r_in")?, need("r_out")?)?,
            "disk-minus" => ModelDomain::punctured_unit_disk(need("p")?)?,
            _ => ModelDomain::disk_of_radius(need("r")?)?,
        };
        Ok(domain)
    }
}

/// Parses a `;`-separated list of complex numbers.
pub fn parse_points(input: &str) -> Result<Vec<Complex64>, ParseError> {
    input.split(';').map(parse_complex).collect()
}
