//! Element specifications: how a command names its group and builds its
//! element. Every number is kept as the string the user typed, so a spec
//! read back from a report rebuilds the same element bit for bit.

use elliptica_core::algebra::{AlgebraElement, Family, GroupElement, LieAlgebra};
use elliptica_core::linalg::{c, CMat};
use elliptica_core::structure::Lattice;
use elliptica_core::{sample, Algebra, Tolerances};
use num_complex::Complex64;
use num_rational::Rational64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::CliError;

/// Group, lattice preset and tolerance profile.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupSpec {
    pub group: String,
    /// Lattice preset name, or `integral`. Empty selects the defining matrix
    /// group.
    #[serde(default)]
    pub lattice: String,
    #[serde(default = "default_profile")]
    pub tol_profile: String,
}

fn default_profile() -> String {
    "default".into()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Construction {
    /// Matrix rows; entries are decimals or rationals, complex entries as
    /// `a+bi`.
    Matrix { rows: Vec<Vec<String>> },
    /// Torus angles as rational multiples of `pi`.
    Angles { pi_multiples: Vec<String> },
    /// `exp(x_1) exp(x_2) ...`, each factor given by coordinates or a matrix.
    Word { factors: Vec<String> },
    /// Algebra coordinates in the basis of the algebra.
    Coords { values: Vec<String> },
    /// Seeded sample: `compact`, `hyperbolic`, `group`, `elliptic` or
    /// `gaussian`.
    Random { recipe: String, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ElementSpec {
    #[serde(flatten)]
    pub group: GroupSpec,
    pub construction: Construction,
}

pub fn parse_tolerances(profile: &str) -> Result<Tolerances, CliError> {
    if let Some(t) = Tolerances::profile(profile) {
        return Ok(t);
    }
    if let Some(f) = profile.strip_prefix("scale:") {
        let f: f64 = f.parse().map_err(|_| CliError::Invalid(format!("bad scale factor '{f}'")))?;
        if f.is_finite() && f > 0.0 {
            return Ok(Tolerances::default().scaled(f));
        }
    }
    Err(CliError::Invalid(format!(
        "unknown tolerance profile '{profile}' (default, strict, loose or scale:<factor>)"
    )))
}

impl GroupSpec {
    pub fn algebra(&self) -> Result<Algebra, CliError> {
        let family: Family = self.group.parse().map_err(CliError::from)?;
        Ok(LieAlgebra::with_tolerances(family, parse_tolerances(&self.tol_profile)?))
    }

    pub fn lattice(&self, alg: &Algebra) -> Result<Lattice, CliError> {
        let datum = alg.root_datum()?;
        match self.lattice.as_str() {
            "" => Ok(datum.matrix_lattice().clone()),
            "integral" => Ok(datum.integral.clone()),
            name => datum.preset(name).cloned().map_err(|_| {
                let names: Vec<&str> = datum.presets.iter().map(|l| l.name.as_str()).collect();
                CliError::Invalid(format!("lattice '{name}' unknown for {}; try integral, {}", alg.family(), names.join(", ")))
            }),
        }
    }
}

/// Exact rational from `p/q`, an integer or a finite decimal.
pub fn parse_rational(s: &str) -> Result<Rational64, CliError> {
    let t = s.trim();
    let bad = || CliError::Invalid(format!("not a rational number: '{s}'"));
    if let Some((p, q)) = t.split_once('/') {
        let p: i64 = p.trim().parse().map_err(|_| bad())?;
        let q: i64 = q.trim().parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(bad());
        }
        return Ok(Rational64::new(p, q));
    }
    let (neg, body) = match t.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|ch| ch.is_ascii_digit()) {
        return Err(bad());
    }
    if frac.len() > 17 {
        return Err(bad());
    }
    let den = 10i64.pow(frac.len() as u32);
    let digits = format!("{int}{frac}");
    let num: i64 = if digits.is_empty() { 0 } else { digits.parse().map_err(|_| bad())? };
    let r = Rational64::new(num, den);
    Ok(if neg { -r } else { r })
}

fn rational_to_f64(q: Rational64) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

fn parse_real(s: &str) -> Result<f64, CliError> {
    let t = s.trim();
    if t.contains('/') {
        return parse_rational(t).map(rational_to_f64);
    }
    t.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| CliError::Invalid(format!("not a number: '{s}'")))
}

/// `a`, `bi`, `a+bi` or `a-bi`.
pub fn parse_complex(s: &str) -> Result<Complex64, CliError> {
    let t: String = s.chars().filter(|ch| !ch.is_whitespace()).collect();
    let Some(body) = t.strip_suffix('i') else {
        return Ok(c(parse_real(&t)?, 0.0));
    };
    // split at the last sign that is not an exponent sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        v => parse_real(v)?,
    };
    Ok(c(parse_real(re)?, im))
}

/// Matrix from `a,b;c,d` syntax.
pub fn parse_matrix_rows(s: &str) -> Vec<Vec<String>> {
    s.split(';').map(|row| row.split(',').map(|e| e.trim().to_string()).collect()).collect()
}

pub fn parse_list(s: &str) -> Vec<String> {
    s.split(',').map(|e| e.trim().to_string()).filter(|e| !e.is_empty()).collect()
}

fn matrix_of(rows: &[Vec<String>]) -> Result<CMat, CliError> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(CliError::Invalid("matrix must be square".into()));
    }
    let mut m = CMat::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            m[(i, j)] = parse_complex(e)?;
        }
    }
    Ok(m)
}

fn check_size(alg: &Algebra, m: &CMat) -> Result<(), CliError> {
    if m.nrows() != alg.matrix_size() {
        return Err(CliError::Invalid(format!(
            "{} needs {n}x{n} matrices, got {}x{}",
            alg.family(),
            m.nrows(),
            m.ncols(),
            n = alg.matrix_size()
        )));
    }
    Ok(())
}

/// Algebra element from coordinates, or from a matrix when the text
/// contains `;`.
pub fn algebra_element(alg: &Algebra, text: &str) -> Result<AlgebraElement, CliError> {
    if text.contains(';') {
        let m = matrix_of(&parse_matrix_rows(text))?;
        check_size(alg, &m)?;
        return Ok(AlgebraElement::from_matrix(alg, &m)?);
    }
    coords_element(alg, &parse_list(text))
}

fn coords_element(alg: &Algebra, values: &[String]) -> Result<AlgebraElement, CliError> {
    let co: Vec<f64> = values.iter().map(|v| parse_real(v)).collect::<Result<_, _>>()?;
    if co.len() != alg.dim() {
        return Err(CliError::Invalid(format!("{} has dimension {}, got {} coordinates", alg.family(), alg.dim(), co.len())));
    }
    Ok(AlgebraElement::from_slice(alg, &co)?)
}

pub fn angles_of(values: &[String]) -> Result<Vec<Rational64>, CliError> {
    values.iter().map(|v| parse_rational(v)).collect()
}

fn torus_element(alg: &Algebra, values: &[String]) -> Result<AlgebraElement, CliError> {
    let q = angles_of(values)?;
    if q.len() != alg.rank() {
        return Err(CliError::Invalid(format!("{} has rank {}, got {} angles", alg.family(), alg.rank(), q.len())));
    }
    let a: Vec<f64> = q.into_iter().map(|v| rational_to_f64(v) * PI).collect();
    Ok(alg.torus(&a)?)
}

/// A built element together with whatever fixes its lift to the universal
/// cover.
pub enum Built {
    /// `exp` of a torus element.
    Torus(AlgebraElement, GroupElement),
    Word(Vec<AlgebraElement>, GroupElement),
    Plain(GroupElement),
}

impl Built {
    pub fn group(&self) -> &GroupElement {
        match self {
            Built::Torus(_, g) | Built::Word(_, g) | Built::Plain(g) => g,
        }
    }
}

impl ElementSpec {
    /// The group element the spec describes.
    pub fn build(&self, alg: &Algebra) -> Result<Built, CliError> {
        match &self.construction {
            Construction::Matrix { rows } => {
                let m = matrix_of(rows)?;
                check_size(alg, &m)?;
                Ok(Built::Plain(GroupElement::from_matrix(alg, &m)?))
            }
            Construction::Angles { pi_multiples } => {
                let x = torus_element(alg, pi_multiples)?;
                let g = x.exp();
                Ok(Built::Torus(x, g))
            }
            Construction::Word { factors } => {
                if factors.is_empty() {
                    return Err(CliError::Invalid("empty word".into()));
                }
                let word: Vec<AlgebraElement> = factors.iter().map(|f| algebra_element(alg, f)).collect::<Result<_, _>>()?;
                let g = elliptica_core::quasimorphism::word_product(&word)?;
                Ok(Built::Word(word, g))
            }
            Construction::Coords { values } => {
                let x = coords_element(alg, values)?;
                let g = x.exp();
                Ok(Built::Word(vec![x], g))
            }
            Construction::Random { recipe, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let g = match recipe.as_str() {
                    "compact" => sample::compact(alg, &mut rng, 1.0),
                    "hyperbolic" => sample::hyperbolic(alg, &mut rng, 2.0),
                    "group" => sample::group(alg, &mut rng, 1.0),
                    "gaussian" => sample::gaussian(alg, &mut rng, 1.0).exp(),
                    "elliptic" => {
                        let a = sample::angles(&mut rng, alg.rank(), -PI, PI);
                        let h = sample::group(alg, &mut rng, 0.6);
                        alg.torus(&a)?.exp().conjugate_by(&h)?
                    }
                    other => {
                        return Err(CliError::Invalid(format!(
                            "unknown recipe '{other}' (compact, hyperbolic, group, gaussian, elliptic)"
                        )))
                    }
                };
                Ok(Built::Plain(g))
            }
        }
    }

    /// The algebra element the spec describes, for commands that act on the
    /// algebra. Matrices are read as algebra matrices and angles as torus
    /// elements.
    pub fn build_algebra(&self, alg: &Algebra) -> Result<AlgebraElement, CliError> {
        match &self.construction {
            Construction::Matrix { rows } => {
                let m = matrix_of(rows)?;
                check_size(alg, &m)?;
                Ok(AlgebraElement::from_matrix(alg, &m)?)
            }
            Construction::Angles { pi_multiples } => torus_element(alg, pi_multiples),
            Construction::Coords { values } => coords_element(alg, values),
            Construction::Word { factors } if factors.len() == 1 => algebra_element(alg, &factors[0]),
            Construction::Random { recipe, seed } if recipe == "gaussian" => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                Ok(sample::gaussian(alg, &mut rng, 1.0))
            }
            _ => Err(CliError::Invalid("this command needs an algebra element (matrix, angles or coords)".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_are_exact() {
        assert_eq!(parse_rational("3/2").unwrap(), Rational64::new(3, 2));
        assert_eq!(parse_rational("-0.25").unwrap(), Rational64::new(-1, 4));
        assert_eq!(parse_rational("2").unwrap(), Rational64::from_integer(2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("pi").is_err());
    }

    #[test]
    fn complex_entries() {
        assert_eq!(parse_complex("1.5").unwrap(), c(1.5, 0.0));
        assert_eq!(parse_complex("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(parse_complex("2-3i").unwrap(), c(2.0, -3.0));
        assert_eq!(parse_complex("1e-3+2e-1i").unwrap(), c(1e-3, 0.2));
        assert_eq!(parse_complex("1/2i").unwrap(), c(0.0, 0.5));
    }

    #[test]
    fn spec_round_trips_through_json() {
        let spec = ElementSpec {
            group: GroupSpec { group: "sp4".into(), lattice: String::new(), tol_profile: "default".into() },
            construction: Construction::Angles { pi_multiples: vec!["1/2".into(), "1/4".into()] },
        };
        let text = serde_json::to_string(&spec).unwrap();
        let back: ElementSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, spec);
    }

    #[test]
    fn minus_identity_in_sl2() {
        let spec = ElementSpec {
            group: GroupSpec { group: "sl2".into(), lattice: String::new(), tol_profile: "default".into() },
            construction: Construction::Matrix { rows: parse_matrix_rows("-1,0;0,-1") },
        };
        let alg = spec.group.algebra().unwrap();
        let g = spec.build(&alg).unwrap();
        assert!((g.group().matrix()[(0, 0)].re + 1.0).abs() < 1e-15);
    }
}
