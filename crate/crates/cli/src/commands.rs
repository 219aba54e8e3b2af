//! One function per subcommand. Each returns a JSON value; the binary
//! decides how to print it.

use elliptica_core::algebra::{AlgebraElement, GroupElement};
use elliptica_core::components::{alcove_of, canonical_component, classify_element, enumerate_components};
use elliptica_core::cone::{
    causal_check, exit_time, generate_causal_curve, in_basic_component, in_max_cone, krein_signatures, tau,
    CausalCurve, CurveConfig, Direction,
};
use elliptica_core::ellipticity::{is_elliptic, is_stably_elliptic, torus_representative, wall_margin};
use elliptica_core::quasimorphism::{
    f_gw_along_curve, f_gw_closed_form, f_gw_homogenized, f_gw_principal, f_gw_word_closed_form, GwMethod,
    GwValue,
};
use elliptica_core::{sample, Algebra, Error};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use std::fmt::Write as _;

use crate::acceptance::{self, Level, Outcome};
use crate::error::CliError;
use crate::output::to_json;
use crate::spec::{algebra_element, parse_tolerances, Built, ElementSpec, GroupSpec};

fn value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn matrix_value(g: &GroupElement) -> Value {
    let m = g.matrix();
    let rows: Vec<Vec<[f64; 2]>> =
        (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect();
    value(&rows)
}

/// `f_GW` of a built element, with the lift it refers to.
fn gw_of(built: &Built) -> Result<(GwValue, &'static str), Error> {
    match built {
        Built::Torus(x, _) => Ok((f_gw_closed_form(x)?, "torus path")),
        Built::Word(w, _) => match f_gw_word_closed_form(w) {
            Ok(v) => Ok((v, "word path")),
            Err(Error::BoundaryUnstable(_) | Error::IllConditioned(_) | Error::NotElliptic) => {
                Ok((f_gw_homogenized(w)?, "word path"))
            }
            Err(e) => Err(e),
        },
        Built::Plain(g) => {
            let v = f_gw_principal(g)?;
            Ok((GwValue { value: v, method: GwMethod::ClosedForm, error_bound: None }, "principal"))
        }
    }
}

fn gw_value(gw: &GwValue, lift: &str) -> Value {
    json!({ "value": gw.value, "method": value(&gw.method), "error_bound": gw.error_bound, "lift": lift })
}

pub fn classify(spec: &ElementSpec) -> Result<Value, CliError> {
    let alg = spec.group.algebra()?;
    let built = spec.build(&alg)?;
    let g = built.group();
    let mut notes: Vec<String> = Vec::new();
    let elliptic = is_elliptic(g);
    let hermitian = alg.family().is_hermitian_type();
    let stably = if hermitian { Some(is_stably_elliptic(g)?) } else { None };

    let mut torus = Value::Null;
    let mut margin = Value::Null;
    let mut alcove = Value::Null;
    let mut component = Value::Null;
    let mut lattice_name = Value::Null;
    let mut basic = Value::Null;
    let mut tau_v = Value::Null;
    let mut krein = Value::Null;
    if elliptic && hermitian {
        let datum = alg.root_datum()?;
        match torus_representative(g) {
            Ok(rep) => {
                torus = json!({ "angles": rep.angles, "residual": rep.residual });
                margin = json!(wall_margin(&rep.angles, datum));
                if let Ok(label) = alcove_of(datum, &rep.angles, alg.tol().boundary_margin) {
                    alcove = json!(label);
                }
            }
            Err(Error::BoundaryUnstable(m)) if stably == Some(false) => notes.push(format!("no torus form: {m}")),
            Err(e) => return Err(e.into()),
        }
        if alg.family().symplectic_n().is_some() {
            match krein_signatures(g) {
                Ok(k) => krein = value(&k),
                Err(e) => notes.push(format!("krein: {e}")),
            }
        }
    }
    if stably == Some(true) {
        let lattice = spec.group.lattice(&alg)?;
        lattice_name = json!(lattice.name);
        let cls = classify_element(g, &lattice)?;
        component = value(&cls);
        match in_basic_component(g) {
            Ok(b) => {
                basic = json!(b);
                if b {
                    tau_v = json!(tau(g)?);
                }
            }
            Err(e) => notes.push(format!("basic component: {e}")),
        }
    }
    let gw = if alg.family().symplectic_n().is_some() {
        match gw_of(&built) {
            Ok((v, lift)) => gw_value(&v, lift),
            Err(e) => {
                notes.push(format!("f_gw: {e}"));
                Value::Null
            }
        }
    } else {
        Value::Null
    };
    Ok(json!({
        "spec": value(spec),
        "group": alg.family().to_string(),
        "matrix": matrix_value(g),
        "elliptic": elliptic,
        "stably_elliptic": stably,
        "torus": torus,
        "wall_margin": margin,
        "alcove": alcove,
        "lattice": lattice_name,
        "component": component,
        "basic": basic,
        "tau": tau_v,
        "f_gw": gw,
        "krein": krein,
        "notes": notes,
    }))
}

/// Re-parse a classify report, rebuild it from its own spec and check its
/// certificates.
pub fn verify_classify(text: &str) -> Result<Value, CliError> {
    let report: Value = serde_json::from_str(text).map_err(|e| CliError::Invalid(format!("not JSON: {e}")))?;
    let spec: ElementSpec = serde_json::from_value(report["spec"].clone())
        .map_err(|e| CliError::Invalid(format!("report has no valid spec: {e}")))?;
    let again = classify(&spec)?;
    if to_json(&again).trim_end() != text.trim_end() {
        return Err(CliError::Failed("report differs from a fresh run of its spec".into()));
    }
    let alg = spec.group.algebra()?;
    let tol = alg.tol();
    let mut checks = Vec::new();
    if let Some(res) = report["torus"]["residual"].as_f64() {
        if res > tol.certificate * 1e3 {
            return Err(CliError::Failed(format!("torus residual {res:.3e}")));
        }
        checks.push("torus residual");
    }
    if report["stably_elliptic"] == json!(true) {
        let m = report["wall_margin"].as_f64().unwrap_or(0.0);
        if m <= 0.0 {
            return Err(CliError::Failed("stably elliptic with a root on a wall".into()));
        }
        let label: Vec<i64> = serde_json::from_value(report["alcove"].clone())
            .map_err(|_| CliError::Failed("stably elliptic without an alcove".into()))?;
        let lattice = spec.group.lattice(&alg)?;
        let cls = canonical_component(alg.root_datum()?, &label, &lattice)?;
        if value(&cls.canonical) != report["component"]["canonical"] {
            return Err(CliError::Failed("component does not match the alcove label".into()));
        }
        checks.push("alcove and component");
    }
    if !report["tau"].is_null() && report["basic"] != json!(true) {
        return Err(CliError::Failed("tau outside the basic component".into()));
    }
    Ok(json!({ "verified": true, "checks": checks }))
}

pub fn atlas(group: &GroupSpec, bound: i64) -> Result<Value, CliError> {
    if !(0..=6).contains(&bound) {
        return Err(CliError::Invalid(format!("box bound {bound} is outside 0..=6")));
    }
    let alg = group.algebra()?;
    let datum = alg.root_datum()?;
    let lattice = group.lattice(&alg)?;
    let entries = enumerate_components(datum, &lattice, bound)?;
    Ok(json!({
        "group": alg.family().to_string(),
        "lattice": lattice.name,
        "bound": bound,
        "classes": entries.len(),
        "entries": value(&entries),
    }))
}

/// Where a causal curve comes from.
#[derive(Clone, Debug)]
pub enum CurveSource {
    /// Synthesized curve in the basic component.
    Random { seed: u64, steps: usize },
    /// `exp(t z)` for `t` on a uniform grid.
    ZRay { t0: f64, t1: f64, steps: usize },
    /// `exp(t y)` for a random unit `y` in `p`.
    Hyperbolic { seed: u64, steps: usize },
}

/// The curve and the parameter value of its first sample.
fn build_curve(alg: &Algebra, source: &CurveSource) -> Result<(CausalCurve, f64), CliError> {
    let datum = alg.root_datum()?;
    match *source {
        CurveSource::Random { seed, steps } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Ok((generate_causal_curve(alg, &mut rng, &CurveConfig::new(alg, steps)?)?, 0.0))
        }
        CurveSource::ZRay { t0, t1, steps } => {
            if !(t1 > t0) || steps == 0 {
                return Err(CliError::Invalid("z-ray needs t1 > t0 and at least one step".into()));
            }
            let z = alg.torus(&datum.z)?;
            let dt = (t1 - t0) / steps as f64;
            let grid: Vec<(f64, AlgebraElement)> = (0..steps).map(|_| (dt, z.clone())).collect();
            Ok((CausalCurve::from_steps(&z.scale(t0), &grid, "z-ray"), t0))
        }
        CurveSource::Hyperbolic { seed, steps } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let y = sample::p_direction(alg, &mut rng);
            let grid: Vec<(f64, AlgebraElement)> = (0..steps.max(1)).map(|_| (0.05, y.clone())).collect();
            Ok((CausalCurve::from_steps(&AlgebraElement::zero(alg), &grid, "hyperbolic"), 0.0))
        }
    }
}

pub const CAUSAL_CSV_HEADER: &str = "# elliptica causal v1\nindex,t,member,interior,margin,tau,f_gw";

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| format!("{x:.16e}"))
}

fn min_increment(xs: &[Option<f64>]) -> Option<f64> {
    xs.windows(2)
        .filter_map(|w| match (w[0], w[1]) {
            (Some(a), Some(b)) => Some(b - a),
            _ => None,
        })
        .reduce(f64::min)
}

/// Returns the JSON summary and the CSV table.
pub fn causal(group: &GroupSpec, source: &CurveSource) -> Result<(Value, String), CliError> {
    let alg = group.algebra()?;
    let (curve, t_start) = build_curve(&alg, source)?;
    let step_residual = curve.check_steps()?;
    let report = causal_check(&curve)?;
    let taus: Vec<Option<f64>> = curve.samples.iter().map(|g| tau(g).ok()).collect();
    let gw: Option<Vec<f64>> = f_gw_along_curve(&curve).ok();
    let gws: Vec<Option<f64>> = (0..curve.len()).map(|i| gw.as_ref().map(|v| v[i])).collect();
    let mut csv = String::from(CAUSAL_CSV_HEADER);
    csv.push('\n');
    for (i, s) in report.samples.iter().enumerate() {
        let _ = writeln!(
            csv,
            "{i},{:.16e},{},{},{:.16e},{},{}",
            t_start + curve.times[i],
            s.member,
            s.interior,
            s.margin,
            opt(taus[i]),
            opt(gws[i])
        );
    }
    let tau_min = min_increment(&taus);
    let gw_min = min_increment(&gws);
    let summary = json!({
        "group": alg.family().to_string(),
        "curve": curve.label,
        "samples": curve.len(),
        "integrator": "piecewise exponential",
        "step_residual": step_residual,
        "kind": value(&report.kind),
        "worst_margin": report.worst_margin,
        "first_violation": report.first_violation,
        "tau_defined": taus.iter().filter(|t| t.is_some()).count(),
        "tau_min_increment": tau_min,
        "tau_increasing": tau_min.map(|d| d > 0.0),
        "f_gw_min_increment": gw_min,
        "f_gw_monotone": gw_min.map(|d| d >= -1e-9),
    });
    Ok((summary, csv))
}

pub fn maslov(spec: &ElementSpec) -> Result<Value, CliError> {
    let alg = spec.group.algebra()?;
    if alg.family().symplectic_n().is_none() {
        return Err(CliError::Invalid(format!("no Maslov quasimorphism for {}", alg.family())));
    }
    let built = spec.build(&alg)?;
    let elliptic = is_elliptic(built.group());
    let (v, lift) = gw_of(&built)?;
    let mut out = json!({ "spec": value(spec), "elliptic": elliptic, "f_gw": gw_value(&v, lift) });
    if let Built::Word(w, _) = &built {
        if v.method == GwMethod::ClosedForm {
            let h = f_gw_homogenized(w)?;
            out["homogenized"] = gw_value(&h, lift);
            out["difference"] = json!((h.value - v.value).abs());
        }
    }
    Ok(out)
}

pub fn tau_cmd(spec: &ElementSpec) -> Result<Value, CliError> {
    let alg = spec.group.algebra()?;
    let built = spec.build(&alg)?;
    let t = tau(built.group())?;
    Ok(json!({ "spec": value(spec), "tau": t }))
}

pub fn cone(spec: &ElementSpec) -> Result<Value, CliError> {
    let alg = spec.group.algebra()?;
    let x = spec.build_algebra(&alg)?;
    let q = in_max_cone(&x)?;
    Ok(json!({ "spec": value(spec), "cone": value(&q) }))
}

pub fn exit_time_cmd(spec: &ElementSpec, direction: &str, backward: bool) -> Result<Value, CliError> {
    let alg = spec.group.algebra()?;
    let built = spec.build(&alg)?;
    let x = algebra_element(&alg, direction)?;
    let dir = if backward { Direction::Backward } else { Direction::Forward };
    let t = exit_time(&x, built.group(), dir)?;
    Ok(json!({
        "spec": value(spec),
        "direction": direction,
        "backward": backward,
        "exit_time": t,
    }))
}

pub struct SelftestResult {
    pub outcomes: Vec<Outcome>,
    pub report: Value,
}

impl SelftestResult {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }
}

pub fn selftest(level: Level, profile: &str, only: &[u8]) -> Result<SelftestResult, CliError> {
    let tol = parse_tolerances(profile)?;
    let ids: Vec<u8> = if only.is_empty() { (1..=10).collect() } else { only.to_vec() };
    if let Some(bad) = ids.iter().find(|&&i| !(1..=10).contains(&i)) {
        return Err(CliError::Invalid(format!("no criterion {bad}")));
    }
    let outcomes: Vec<Outcome> = ids.iter().map(|&id| acceptance::run(id, level, &tol)).collect();
    let passed = outcomes.iter().all(|o| o.passed);
    let report = json!({ "level": value(&level), "tol_profile": profile, "passed": passed, "outcomes": value(&outcomes) });
    Ok(SelftestResult { outcomes, report })
}
