//! The acceptance suite: ten numbered checks, each with its own sampling,
//! oracle and pass threshold. `selftest` and the `acceptance` test target
//! both run these.

use elliptica_core::algebra::jordan::jordan_decompose;
use elliptica_core::algebra::{AlgebraElement, Family, GroupElement, LieAlgebra};
use elliptica_core::components::{
    alcove_nonempty, alcove_of, alcove_vertices, canonical_component, enumerate_components, nonempty_labels,
};
use elliptica_core::cone::{
    basic_prefix, basic_routes, exit_time, generate_causal_curve, in_basic_component, tau,
    CausalCurve, CurveConfig, Direction,
};
use elliptica_core::ellipticity::{is_compact_element, is_elliptic, is_stably_elliptic, torus_representative};
use elliptica_core::linalg::{self, c, CMat};
use elliptica_core::quasimorphism::{f_gw_along_curve, f_gw_closed_form, f_gw_homogenized, f_gw_word_closed_form};
use elliptica_core::{sample, Algebra, Tolerances};
use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::time::Instant;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    /// Reduced sample counts.
    Quick,
    /// Sample counts and time limits as stated per criterion.
    Full,
}

impl Level {
    fn count(self, full: usize) -> usize {
        match self {
            Level::Full => full,
            Level::Quick => (full / 5).max(4),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Outcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl Outcome {
    pub fn line(&self) -> String {
        format!(
            "criterion {:>2} {:<28} {}  ({:.1}s)  {}",
            self.id,
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            self.seconds,
            self.detail
        )
    }
}

pub const NAMES: [&str; 10] = [
    "stable-ellipticity",
    "sl2-component-counts",
    "sp4-alcove-geometry",
    "su21-single-component",
    "basic-interval",
    "quasimorphism",
    "time-function",
    "exit-time",
    "jordan-exp",
    "properness",
];

/// Wall clock limits in seconds, where one is stated.
fn time_limit(id: u8) -> Option<f64> {
    match id {
        1 => Some(30.0),
        6 => Some(120.0),
        _ => None,
    }
}

pub fn run(id: u8, level: Level, tol: &Tolerances) -> Outcome {
    let start = Instant::now();
    let seed = 0x5eed_0000 + id as u64;
    let res = match id {
        1 => stable_ellipticity(level, tol, seed),
        2 => sl2_component_counts(tol),
        3 => sp4_alcove_geometry(tol),
        4 => su21_single_component(tol),
        5 => basic_interval(level, tol),
        6 => quasimorphism(level, tol, seed),
        7 => time_function(level, tol, seed),
        8 => exit_time_check(tol),
        9 => jordan_exp(level, tol, seed),
        10 => properness(tol, seed),
        _ => Err(format!("no criterion {id}")),
    };
    let seconds = start.elapsed().as_secs_f64();
    let (mut passed, mut detail) = match res {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    if let Some(limit) = time_limit(id) {
        if level == Level::Full && seconds > limit {
            passed = false;
            detail = format!("{detail}; over the {limit}s limit");
        }
    }
    Outcome { id, name: NAMES[(id - 1) as usize], passed, detail, seconds }
}

pub fn run_all(level: Level, tol: &Tolerances) -> Vec<Outcome> {
    (1..=10).map(|id| run(id, level, tol)).collect()
}

type Check = std::result::Result<String, String>;

fn err<E: std::fmt::Display>(ctx: &str) -> impl Fn(E) -> String + '_ {
    move |e| format!("{ctx}: {e}")
}

fn alg(f: Family, tol: &Tolerances) -> Algebra {
    LieAlgebra::with_tolerances(f, tol.clone())
}

/// Angles either on a wall (one noncompact root value in `2 pi Z`) or at
/// least `1e-6` away from every wall.
fn sp4_wall_sample<R: Rng>(rng: &mut R, on_wall: bool) -> Vec<f64> {
    loop {
        let mut x = vec![rng.random_range(-TAU..TAU), rng.random_range(-TAU..TAU)];
        if on_wall {
            let k = rng.random_range(-2i32..=2) as f64;
            match rng.random_range(0..3) {
                0 => x[0] = PI * k,
                1 => x[1] = PI * k,
                _ => x[1] = TAU * k - x[0],
            }
            return x;
        }
        let vals = [2.0 * x[0], 2.0 * x[1], x[0] + x[1]];
        let margin = vals
            .iter()
            .map(|v| {
                let r = v.rem_euclid(TAU);
                r.min(TAU - r)
            })
            .fold(f64::INFINITY, f64::min);
        if margin > 1e-6 {
            return x;
        }
    }
}

fn stable_ellipticity(level: Level, tol: &Tolerances, seed: u64) -> Check {
    let sp = alg(Family::Sp { n: 2 }, tol);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = level.count(200);
    let mut agree = 0;
    let mut first_bad = None;
    for i in 0..n {
        let on_wall = i % 2 == 1;
        let x = sp4_wall_sample(&mut rng, on_wall);
        let q = sample::group(&sp, &mut rng, 1.0);
        let g = sp.torus(&x).map_err(err("torus"))?.exp().conjugate_by(&q).map_err(err("conjugate"))?;
        // torus oracle: a root value in 2 pi Z exactly when sampled on a wall
        let oracle = !on_wall;
        let got = is_stably_elliptic(&g).map_err(err("stably elliptic"))?;
        if got == oracle {
            agree += 1;
        } else if first_bad.is_none() {
            first_bad = Some(format!("x = {x:?}, oracle {oracle}, got {got}"));
        }
    }
    let detail = format!("{agree}/{n} agree with the torus oracle");
    match first_bad {
        None => Ok(detail),
        Some(b) => Err(format!("{detail}; first mismatch {b}")),
    }
}

fn sl2_component_counts(tol: &Tolerances) -> Check {
    let sl = alg(Family::Sl2, tol);
    let d = sl.root_datum().map_err(err("root datum"))?;
    let mut got = Vec::new();
    for (name, want) in [("universal", 7), ("SL2", 2), ("PSL2", 1)] {
        let lat = d.preset(name).map_err(err("preset"))?;
        let n = enumerate_components(d, lat, 3).map_err(err("atlas"))?.len();
        got.push(format!("{name} {n}"));
        if n != want {
            return Err(format!("{name}: {n} classes, expected {want}"));
        }
    }
    Ok(got.join(", "))
}

fn sp4_alcove_geometry(tol: &Tolerances) -> Check {
    let sp = alg(Family::Sp { n: 2 }, tol);
    let d = sp.root_datum().map_err(err("root datum"))?;
    let r = |a: i64, b: i64| Rational64::new(a, b);
    let square = vec![
        vec![r(0, 1), r(0, 1)],
        vec![r(0, 1), r(1, 2)],
        vec![r(1, 2), r(0, 1)],
        vec![r(1, 2), r(1, 2)],
    ];
    let v0 = alcove_vertices(d, &[0, 0, 0]).map_err(err("vertices"))?;
    if v0 != square {
        return Err(format!("basic alcove vertices {v0:?}"));
    }
    let v1 = alcove_vertices(d, &[1, 0, 0]).map_err(err("vertices"))?;
    if v1.len() != 3 {
        return Err(format!("alcove (1,0,0) has {} vertices", v1.len()));
    }
    // grid oracle: an open alcove with vertices on the pi grid contains a point
    // of the offset pi/12 grid
    let mut seen = std::collections::BTreeSet::new();
    let step = PI / 12.0;
    for i in -48..48 {
        for j in -48..48 {
            let x = [(i as f64 + 0.5) * step, (j as f64 + 0.5) * step];
            if let Ok(l) = alcove_of(d, &x, 0.0) {
                seen.insert(l);
            }
        }
    }
    let mut nonempty = 0;
    for a in -1..=1 {
        for b in -1..=1 {
            for cc in -1..=1 {
                let l = vec![a, b, cc];
                let fm = alcove_nonempty(d, &l);
                if fm != seen.contains(&l) {
                    return Err(format!("label {l:?}: elimination says {fm}, grid disagrees"));
                }
                nonempty += fm as usize;
            }
        }
    }
    Ok(format!("square and triangle vertices exact; {nonempty}/27 nonempty labels match the grid oracle"))
}

fn su21_single_component(tol: &Tolerances) -> Check {
    let su = alg(Family::Su { p: 2, q: 1 }, tol);
    let d = su.root_datum().map_err(err("root datum"))?;
    let labels = nonempty_labels(d, 2);
    // the integral lattice: for the matrix group the centre splits off three classes
    for l in &labels {
        let cls = canonical_component(d, l, &d.integral).map_err(err("canonical"))?;
        if !cls.is_basic() {
            return Err(format!("label {l:?} reduces to {:?}", cls.canonical));
        }
    }
    Ok(format!("{} nonempty labels, all basic", labels.len()))
}

fn basic_interval(level: Level, tol: &Tolerances) -> Check {
    let mut notes = Vec::new();
    for f in [Family::Sl2, Family::Sp { n: 2 }] {
        let a = alg(f, tol);
        let z = a.torus(&a.root_datum().map_err(err("root datum"))?.z).map_err(err("torus"))?;
        let n = level.count(1000);
        let (lo, hi) = (1e-3, TAU - 1e-3);
        for i in 0..n {
            let t = lo + (hi - lo) * i as f64 / (n - 1) as f64;
            let g = z.scale(t).exp();
            let r = basic_routes(&g).map_err(err("routes"))?;
            if !r.alcove {
                return Err(format!("{f}: exp({t} z) not basic"));
            }
            if r.krein != Some(r.alcove) {
                return Err(format!("{f}: Krein route disagrees at t = {t}"));
            }
        }
        for t in [TAU, TAU + 0.1, 7.0] {
            if in_basic_component(&z.scale(t).exp()).map_err(err("basic"))? {
                return Err(format!("{f}: exp({t} z) reported basic"));
            }
        }
        notes.push(format!("{f}: {n} grid points basic, 3 outside"));
    }
    Ok(notes.join("; "))
}

/// Word of conjugated torus elements whose product is elliptic.
fn elliptic_word<R: Rng>(sp: &Algebra, rng: &mut R) -> Vec<AlgebraElement> {
    loop {
        let k = rng.random_range(2..=3);
        let word: Vec<AlgebraElement> = (0..k)
            .map(|_| {
                let x = sp.torus(&sample::angles(rng, 2, -PI, PI)).unwrap();
                let h = sample::group(sp, rng, 0.7);
                x.conjugate(&h).unwrap()
            })
            .collect();
        let mut g = GroupElement::identity(sp);
        for x in &word {
            g = g.mul(&x.exp()).unwrap();
        }
        if is_elliptic(&g) && torus_representative(&g).is_ok() {
            return word;
        }
    }
}

fn curve_set(a: &Algebra, count: usize, steps: usize, seed: u64) -> Result<Vec<CausalCurve>, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = CurveConfig::new(a, steps).map_err(err("curve config"))?;
    (0..count).map(|_| generate_causal_curve(a, &mut rng, &cfg).map_err(err("curve"))).collect()
}

fn quasimorphism(level: Level, tol: &Tolerances, seed: u64) -> Check {
    let sp = alg(Family::Sp { n: 2 }, tol);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = level.count(50);
    let mut worst_word: f64 = 0.0;
    for _ in 0..n {
        let word = elliptic_word(&sp, &mut rng);
        let closed = f_gw_word_closed_form(&word).map_err(err("closed form"))?.value;
        let hom = f_gw_homogenized(&word).map_err(err("homogenized"))?.value;
        worst_word = worst_word.max((closed - hom).abs());
    }
    if worst_word >= 0.05 {
        return Err(format!("elliptic words: closed form and homogenized differ by {worst_word:.4}"));
    }
    let mut worst_hyp: f64 = 0.0;
    for _ in 0..n {
        let y = sample::p_direction(&sp, &mut rng).scale(rng.random_range(0.1..2.0));
        let h = sample::group(&sp, &mut rng, 0.7);
        let x = y.conjugate(&h).map_err(err("conjugate"))?;
        let closed = f_gw_closed_form(&x).map_err(err("closed form"))?.value;
        let hom = f_gw_homogenized(&[x]).map_err(err("homogenized"))?.value;
        worst_hyp = worst_hyp.max(closed.abs()).max(hom.abs());
    }
    if worst_hyp >= 0.02 {
        return Err(format!("real spectrum: |f| up to {worst_hyp:.4}"));
    }
    let mut worst_drop = f64::INFINITY;
    for curve in curve_set(&sp, n, 60, seed ^ 0xc0ffee)? {
        let v = f_gw_along_curve(&curve).map_err(err("along curve"))?;
        let d = v.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
        worst_drop = worst_drop.min(d);
    }
    if worst_drop < -1e-9 {
        return Err(format!("f decreases by {:.3e} along a causal curve", -worst_drop));
    }
    Ok(format!(
        "words within {worst_word:.4}, real spectrum within {worst_hyp:.4}, smallest curve increment {worst_drop:.3e}"
    ))
}

fn time_function(level: Level, tol: &Tolerances, seed: u64) -> Check {
    let sp = alg(Family::Sp { n: 2 }, tol);
    let z = sp.torus(&sp.root_datum().map_err(err("root datum"))?.z).map_err(err("torus"))?;
    let t0 = tau(&z.scale(PI).exp()).map_err(err("tau"))?;
    if t0.abs() > 1e-12 {
        return Err(format!("tau(exp(pi z)) = {t0:e}"));
    }
    let n = level.count(50);
    let mut min_diff = f64::INFINITY;
    let mut samples = 0;
    for curve in curve_set(&sp, n, 60, seed)? {
        let k = basic_prefix(&curve).map_err(err("prefix"))?;
        if k < 2 {
            return Err("curve leaves the basic component immediately".into());
        }
        let vals: Vec<f64> = curve.samples[..k].iter().map(tau).collect::<Result<_, _>>().map_err(err("tau"))?;
        samples += k;
        for w in vals.windows(2) {
            min_diff = min_diff.min(w[1] - w[0]);
        }
    }
    if min_diff <= 0.0 {
        return Err(format!("tau not increasing: forward difference {min_diff:e}"));
    }
    Ok(format!("tau(exp(pi z)) = {t0:.1e}; {samples} samples, smallest forward difference {min_diff:.3e}"))
}

fn exit_time_check(tol: &Tolerances) -> Check {
    let sl = alg(Family::Sl2, tol);
    let eps = FRAC_PI_2;
    let z = sl.torus(&[1.0]).map_err(err("torus"))?;
    let g = z.scale(2.0 * eps).exp();
    let m = CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
    let x = AlgebraElement::from_matrix(&sl, &m).map_err(err("nilpotent"))?;
    let c2 = exit_time(&x, &g, Direction::Forward).map_err(err("exit time"))?;
    // 2 cos(eps) - t sin(eps) = -2
    let root = 2.0 * (1.0 + eps.cos()) / eps.sin();
    let root_ok = (c2 - root).abs() < 1e-6;
    let t = c2 * (1.0 - 1e-9);
    let near = x.scale(t).exp().mul(&g).map_err(err("product"))?;
    let tau_near = tau(&near).map_err(err("tau"))?;
    let tau_ok = tau_near > 20.0;
    let detail = format!(
        "c2 = {c2:.10} vs root {root} ({}); tau at relative distance 1e-9 = {tau_near:.3} ({})",
        if root_ok { "ok" } else { "off" },
        if tau_ok { "> 20" } else { "not > 20" }
    );
    if root_ok && tau_ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn jordan_exp(level: Level, tol: &Tolerances, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = level.count(100);
    let families = [Family::Sl2, Family::Sp { n: 2 }, Family::Sp { n: 3 }, Family::Su { p: 2, q: 1 }];
    let mut worst: f64 = 0.0;
    for f in families {
        let a = alg(f, tol);
        for i in 0..n {
            let x = if i % 2 == 0 { sample::gaussian(&a, &mut rng, 1.0) } else { structured(&a, &mut rng)? };
            let p = jordan_decompose(&x).map_err(err("jordan"))?;
            let s = x.norm().max(1.0);
            let sum = p.elliptic.add(&p.hyperbolic).and_then(|v| v.add(&p.nilpotent)).map_err(err("sum"))?;
            let mut r = sum.sub(&x).map_err(err("sub"))?.norm() / s;
            for (u, v) in [(&p.elliptic, &p.hyperbolic), (&p.elliptic, &p.nilpotent), (&p.hyperbolic, &p.nilpotent)] {
                r = r.max(u.bracket(v).map_err(err("bracket"))?.norm() / (s * s));
            }
            let dim = x.matrix().nrows() as i32;
            let nil = p.nilpotent.matrix().clone();
            let mut pw = nil.clone();
            for _ in 1..dim {
                pw = &pw * &nil;
            }
            r = r.max(pw.norm() / s.powi(dim));
            if r > 1e-9 {
                return Err(format!("{f}: Jordan residual {r:.3e}"));
            }
            if p.elliptic.norm() > 1e-9 * s && !is_compact_element(&p.elliptic) {
                return Err(format!("{f}: elliptic part is not compact"));
            }
            let hyp = p.hyperbolic.matrix();
            let im = linalg::eigenvalues(hyp).iter().map(|z| z.im.abs()).fold(0.0, f64::max);
            if im > 1e-8 * s {
                return Err(format!("{f}: hyperbolic part has spectrum off the real line ({im:.2e})"));
            }
            worst = worst.max(r);
        }
    }
    let sp = alg(Family::Sp { n: 2 }, tol);
    let mut worst_ad: f64 = 0.0;
    for _ in 0..n {
        let x = sample::gaussian(&sp, &mut rng, 0.7);
        let lhs = x.exp().adjoint().map_err(err("adjoint"))?;
        let rhs = linalg::real_part(&linalg::expm(&linalg::to_complex(&x.ad())));
        worst_ad = worst_ad.max((&lhs - &rhs).norm() / rhs.norm().max(1.0));
    }
    if worst_ad > 1e-8 {
        return Err(format!("Ad(exp x) vs exp(ad x): {worst_ad:.3e}"));
    }
    Ok(format!("Jordan residual {worst:.2e}; Ad/exp residual {worst_ad:.2e}"))
}

/// Conjugate of a block element with elliptic, hyperbolic and nilpotent
/// pieces in commuting positions.
fn structured<R: Rng>(a: &Algebra, rng: &mut R) -> Result<AlgebraElement, String> {
    let n = a.matrix_size();
    let mut m = CMat::zeros(n, n);
    let u = |rng: &mut R| rng.random_range(-1.5..1.5);
    match a.family() {
        Family::Sl2 => {
            m[(0, 1)] = c(u(rng), 0.0);
        }
        Family::Sp { n: k } => {
            // rotation in the first block, nilpotent in the last
            let t = u(rng);
            m[(0, k)] = c(t, 0.0);
            m[(k, 0)] = c(-t, 0.0);
            m[(k - 1, 2 * k - 1)] = c(u(rng), 0.0);
            if k >= 3 {
                let h = u(rng);
                m[(1, 1)] = c(h, 0.0);
                m[(k + 1, k + 1)] = c(-h, 0.0);
            }
        }
        Family::Su { .. } => {
            // i diag(1, 1, -2) t plus a nilpotent in its centralizer
            let t = u(rng);
            m[(0, 0)] = c(0.0, t);
            m[(1, 1)] = c(0.0, -0.5 * t);
            m[(2, 2)] = c(0.0, -0.5 * t);
            let v = u(rng);
            m[(1, 1)] += c(0.0, v);
            m[(1, 2)] = c(0.0, v);
            m[(2, 1)] = c(0.0, -v);
            m[(2, 2)] += c(0.0, -v);
        }
        Family::Heisenberg => {
            m[(0, 1)] = c(u(rng), 0.0);
        }
    }
    let x = AlgebraElement::from_matrix(a, &m).map_err(err("structured element"))?;
    let h = sample::group(a, rng, 0.6);
    x.conjugate(&h).map_err(err("conjugate"))
}

fn properness(tol: &Tolerances, seed: u64) -> Check {
    let sp = alg(Family::Sp { n: 2 }, tol);
    let k = sp.torus(&[FRAC_PI_2, PI / 4.0]).map_err(err("torus"))?.exp();
    if !in_basic_component(&k).map_err(err("basic"))? {
        return Err("base point is not in the basic component".into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..20 {
        let y = sample::p_direction(&sp, &mut rng);
        let mut prev = 0.0;
        for s in 1..=20 {
            let h = y.scale(s as f64).exp();
            let g = k.conjugate_by(&h).map_err(err("conjugate"))?;
            let norm = g.matrix().norm();
            if s > 2 && norm <= prev {
                return Err(format!("norm not increasing at s = {s}"));
            }
            prev = norm;
        }
    }
    Ok("20 directions strictly increasing on s = 2..20".into())
}
