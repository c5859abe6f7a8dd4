//! Verification suites. Each suite expands into cases; a case evaluates two
//! sides of an inequality or identity and becomes one report row.

use std::any::Any;
use std::collections::{BTreeSet, HashMap};
use std::f64::consts::{E, PI};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::{Arc, Mutex, OnceLock};
use std::time::Instant;

use affiq_core::bodies::{ConvexBody, Ellipsoid, Polytope, SphericalMeasure};
use affiq_core::constants::{
    gn_parameters, logsobolev_constant, morrey_constant, nash_constant, neumann_eigenvalue,
    sobolev_constant, NASH_STEPS,
};
use affiq_core::covariogram::{matheron_derivative, optimize_ratio, schneider_ratio, Family, Sense};
use affiq_core::functional::{
    centroid_lower_bound, energy, energy_direct, energy_infty, energy_via_centroid, GridFunction,
};
use affiq_core::minkowski::{
    asymmetric_convexification, ball_measure, ball_solution_radius, level_set_chain,
    polar_projection_volume_ball, solve_lp_minkowski, verify_lemma_body,
};
use affiq_core::projection::{
    centroid_body, dnp_constant, dnp_constant_haar, lift_map, polar_projection_volume,
    projection_body, QBody, StarBody,
};
use affiq_core::{Error, Result, Settings};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::extremals::{Extremal, Placement, Profile};
use crate::families::{bumps_in_domain, nonradial_family, nonradial_family_3d};
use crate::poincare::{directional_norm, lyz_min_support, ratio_from_energy, require_symmetric, width};
use crate::report::{error_token, Outcome, Relation, Report, Row};

/// Theorem tags every suite row cites; the suites together cover exactly
/// this list.
pub const IN_SCOPE_TAGS: [&str; 30] = [
    "radial-equality",
    "comparison",
    "polya-szego",
    "affine-invariance",
    "affine-sobolev",
    "petty",
    "busemann-petty",
    "ellipsoid-calculus",
    "schneider",
    "matheron",
    "minkowski-solver",
    "minkowski-lemma",
    "asymmetric-convexification",
    "sharp-constants",
    "dnp-formula",
    "morrey-sobolev",
    "faber-krahn",
    "moser-trudinger",
    "nash",
    "log-sobolev",
    "gagliardo-nirenberg",
    "width",
    "poincare-bound",
    "poincare",
    "lyz-positivity",
    "lorentz-chain",
    "energy-routes",
    "centroid-lower-bound",
    "convex-polya-szego",
    "star-energy",
];

pub const SUITES: [&str; 17] = [
    "relate",
    "comparison",
    "polya-szego",
    "affine",
    "sobolev",
    "petty",
    "busemann-petty",
    "schneider",
    "matheron",
    "minkowski",
    "constants",
    "morrey",
    "moser-trudinger",
    "nash",
    "poincare",
    "lorentz",
    "energy-forms",
];

const QS: [&str; 4] = ["segment", "segment+", "square", "simplex2"];
const PS: [f64; 4] = [1.0, 1.5, 2.0, 3.0];
const FAMILY: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sides {
    pub lhs: f64,
    pub rhs: f64,
}

fn sides(lhs: f64, rhs: f64) -> Result<Sides> {
    Ok(Sides { lhs, rhs })
}

/// Tolerance of a case: the configurable inequality slack, or a fixed value
/// for identities and numerical checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tol {
    Slack,
    Fixed(f64),
}

pub type CaseEval = Arc<dyn Fn(&Settings) -> Result<Sides> + Send + Sync>;

#[derive(Clone)]
pub struct CaseSpec {
    pub suite: &'static str,
    pub tag: &'static str,
    pub label: String,
    pub n: usize,
    /// 0 when the case has no Q.
    pub m: usize,
    /// NaN when the case has no exponent.
    pub p: f64,
    pub q: String,
    pub relation: Relation,
    pub tol: Tol,
    eval: CaseEval,
}

impl std::fmt::Debug for CaseSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CaseSpec")
            .field("suite", &self.suite)
            .field("tag", &self.tag)
            .field("label", &self.label)
            .finish()
    }
}

impl CaseSpec {
    pub fn evaluate(&self, settings: &Settings) -> Result<Sides> {
        (self.eval)(settings)
    }
}

#[derive(Debug, Clone)]
struct Shape {
    n: usize,
    m: usize,
    p: f64,
    q: &'static str,
}

fn shape(n: usize, m: usize, p: f64, q: &'static str) -> Shape {
    Shape { n, m, p, q }
}

fn plain(n: usize) -> Shape {
    shape(n, 0, f64::NAN, "")
}

struct Suite {
    name: &'static str,
    cases: Vec<CaseSpec>,
}

impl Suite {
    fn new(name: &'static str) -> Self {
        Suite { name, cases: Vec::new() }
    }

    fn add<F>(&mut self, tag: &'static str, label: impl Into<String>, s: Shape, relation: Relation, tol: Tol, eval: F)
    where
        F: Fn(&Settings) -> Result<Sides> + Send + Sync + 'static,
    {
        self.cases.push(CaseSpec {
            suite: self.name,
            tag,
            label: label.into(),
            n: s.n,
            m: s.m,
            p: s.p,
            q: s.q.to_string(),
            relation,
            tol,
            eval: Arc::new(eval),
        });
    }
}

/// Evaluates one case into a report row; module errors and panics become
/// error rows.
pub fn verify(case: &CaseSpec, index: usize, settings: &Settings) -> Row {
    let start = Instant::now();
    let out = catch_unwind(AssertUnwindSafe(|| case.evaluate(settings)));
    let runtime_ms = if settings.report_timing {
        start.elapsed().as_millis() as u64
    } else {
        0
    };
    let tol = match (case.relation, case.tol) {
        (Relation::Positive, _) => 0.0,
        (_, Tol::Slack) => settings.tol_default,
        (_, Tol::Fixed(t)) => t,
    };
    let (lhs, rhs, ratio, pass) = match out {
        Ok(Ok(Sides { lhs, rhs })) => {
            let pass = if case.relation.holds(lhs, rhs, tol) {
                Outcome::Pass
            } else {
                Outcome::Fail
            };
            (lhs, rhs, case.relation.ratio(lhs, rhs), pass)
        }
        Ok(Err(e)) => (f64::NAN, f64::NAN, f64::NAN, Outcome::Error(error_token(&e))),
        Err(_) => (f64::NAN, f64::NAN, f64::NAN, Outcome::Error("panic".into())),
    };
    Row {
        suite: case.suite.to_string(),
        case_id: format!("{}/{:04}/{}", case.tag, index, case.label),
        n: case.n,
        m: case.m,
        p: case.p,
        q: case.q.clone(),
        lhs,
        rhs,
        ratio,
        tol,
        pass,
        runtime_ms,
    }
}

type Builder = fn(&Settings) -> Result<Suite>;

fn builder(name: &str) -> Option<Builder> {
    Some(match name {
        "relate" => relate,
        "comparison" => comparison,
        "polya-szego" => polya_szego,
        "affine" => affine,
        "sobolev" => sobolev,
        "petty" => petty,
        "busemann-petty" => busemann_petty,
        "schneider" => schneider,
        "matheron" => matheron,
        "minkowski" => minkowski,
        "constants" => constants,
        "morrey" => morrey,
        "moser-trudinger" => moser_trudinger,
        "nash" => nash,
        "poincare" => poincare,
        "lorentz" => lorentz,
        "energy-forms" => energy_forms,
        _ => return None,
    })
}

/// Cases of a named suite (`all` concatenates every suite). `None` for an
/// unknown name.
pub fn build_cases(name: &str, settings: &Settings) -> Option<Vec<CaseSpec>> {
    let names: Vec<&str> = if name == "all" {
        SUITES.to_vec()
    } else {
        builder(name)?;
        vec![name]
    };
    let mut out = Vec::new();
    for nm in names {
        let suite = static_name(nm);
        match builder(nm)?(settings) {
            Ok(s) => out.extend(s.cases),
            Err(e) => {
                // a failed setup still shows up as a row
                let mut s = Suite::new(suite);
                s.add(first_tag(nm), "setup", plain(0), Relation::Equal, Tol::Fixed(0.0), move |_| {
                    Err(e.clone())
                });
                out.extend(s.cases);
            }
        }
    }
    Some(out)
}

fn static_name(name: &str) -> &'static str {
    SUITES.iter().find(|s| **s == name).copied().unwrap_or("unknown")
}

fn first_tag(suite: &str) -> &'static str {
    match suite {
        "relate" => "radial-equality",
        "affine" => "affine-invariance",
        "sobolev" => "affine-sobolev",
        "minkowski" => "minkowski-solver",
        "constants" => "sharp-constants",
        "morrey" => "morrey-sobolev",
        "poincare" => "poincare",
        "lorentz" => "lorentz-chain",
        "energy-forms" => "energy-routes",
        other => IN_SCOPE_TAGS.iter().find(|t| **t == other).copied().unwrap_or("setup"),
    }
}

/// Tags produced by a suite's cases.
pub fn suite_tags(name: &str, settings: &Settings) -> Option<BTreeSet<&'static str>> {
    Some(build_cases(name, settings)?.iter().map(|c| c.tag).collect())
}

/// Runs a suite (or `all`). Cases run in parallel; rows keep case order and
/// indices restart at zero in every suite.
pub fn run_suite(name: &str, settings: &Settings) -> Option<Report> {
    let cases = build_cases(name, settings)?;
    let mut indexed = Vec::with_capacity(cases.len());
    let mut counter: HashMap<&str, usize> = HashMap::new();
    for c in &cases {
        let k = counter.entry(c.suite).or_insert(0);
        indexed.push((c, *k));
        *k += 1;
    }
    let rows = indexed
        .par_iter()
        .map(|(c, k)| verify(c, *k, settings))
        .collect();
    Some(Report { rows })
}

// ---------------------------------------------------------------- caches

type Shared = Arc<dyn Any + Send + Sync>;

/// Process-wide memo table for sampled functions, energies and bodies.
fn memo<T: Send + Sync + 'static>(key: String, make: impl FnOnce() -> Result<T>) -> Result<Arc<T>> {
    static CACHE: OnceLock<Mutex<HashMap<String, Shared>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().unwrap().get(&key) {
        if let Ok(t) = v.clone().downcast::<T>() {
            return Ok(t);
        }
    }
    let v = Arc::new(make()?);
    cache.lock().unwrap().insert(key, v.clone());
    Ok(v)
}

fn skey(s: &Settings) -> String {
    format!("{s:?}")
}

fn sample(f: &Profile, s: &Settings) -> Result<Arc<GridFunction>> {
    let grid = s.box_grid(f.dim)?;
    let key = format!("f|{}|{}|{}", f.id, grid.cells_per_axis(), grid.halfwidth());
    memo(key, || f.sample(&grid))
}

fn star(f: &Profile, s: &Settings) -> Result<Arc<GridFunction>> {
    let g = sample(f, s)?;
    let key = format!("star|{}|{}|{}", f.id, g.grid().cells_per_axis(), g.grid().halfwidth());
    memo(key, || Ok(g.schwarz_rearrangement()))
}

fn energy_of(id: &str, f: &GridFunction, q: &QBody, p: f64, s: &Settings) -> Result<f64> {
    let key = format!("E|{id}|{}|{}|{}|{p}|{}", f.grid().cells_per_axis(), q.name(), q.dim(), skey(s));
    memo(key, || energy(f, q, p, s)).map(|v| *v)
}

/// E_p(Q, f) for a profile, sampled at the configured resolution.
fn energy_p(f: &Profile, qn: &str, m: usize, p: f64, s: &Settings) -> Result<f64> {
    let g = sample(f, s)?;
    energy_of(&f.id, &g, &QBody::preset(qn, m)?, p, s)
}

/// E_p(Q, f⋆).
fn energy_star(f: &Profile, qn: &str, m: usize, p: f64, s: &Settings) -> Result<f64> {
    let g = star(f, s)?;
    energy_of(&format!("{}*", f.id), &g, &QBody::preset(qn, m)?, p, s)
}

fn family(seed: u64, shrink: f64) -> Result<Arc<Vec<Profile>>> {
    memo(format!("family|{seed}|{shrink}"), || nonradial_family(seed, FAMILY, shrink))
}

// ------------------------------------------------------------- utilities

fn rot(a: f64) -> DMatrix<f64> {
    let (s, c) = a.sin_cos();
    DMatrix::from_row_slice(2, 2, &[c, -s, s, c])
}

/// R(α)·diag(s, 1/s)·R(β); ‖A‖ = ‖A⁻¹‖ = s and the condition number is s².
fn sl2(alpha: f64, s: f64, beta: f64) -> DMatrix<f64> {
    rot(alpha) * DMatrix::from_row_slice(2, 2, &[s, 0.0, 0.0, 1.0 / s]) * rot(beta)
}

const EQ_MAPS: [(f64, f64, f64); 3] = [(0.4, 1.5, 1.1), (-0.7, 1.3, 0.3), (1.2, 1.3, -0.4)];
/// Maps used by default; the widest profiles take maps 1 and 2 instead.
const EQ_DEFAULT: [usize; 2] = [0, 1];

/// Extremal with an id that records its placement.
fn extremal(kind: Extremal, scale: f64, map: Option<usize>) -> Result<Profile> {
    let matrix = map.map(|k| {
        let (a, s, b) = EQ_MAPS[k];
        sl2(a, s, b)
    });
    let mut f = kind.profile(
        2,
        &Placement {
            scale,
            matrix,
            ..Default::default()
        },
    )?;
    f.id = match map {
        Some(k) => format!("{}~{scale}~A{k}", kind.name()),
        None => format!("{}~{scale}", kind.name()),
    };
    Ok(f)
}

fn qb(name: &str, m: usize) -> Result<QBody> {
    QBody::preset(name, m)
}

fn regular_polygon(k: usize, r: f64) -> Result<Polytope> {
    let pts: Vec<Vec<f64>> = (0..k)
        .map(|i| {
            let t = 2.0 * PI * i as f64 / k as f64;
            vec![r * t.cos(), r * t.sin()]
        })
        .collect();
    Polytope::from_points(2, &pts)
}

fn random_polygon(rng: &mut ChaCha8Rng) -> Result<Polytope> {
    loop {
        let k = rng.random_range(5..10);
        let shift = [rng.random_range(-0.2..0.2), rng.random_range(-0.2..0.2)];
        let pts: Vec<Vec<f64>> = (0..k)
            .map(|_| {
                let t = rng.random_range(0.0..2.0 * PI);
                let r = rng.random_range(0.4..1.2);
                vec![r * t.cos() + shift[0], r * t.sin() + shift[1]]
            })
            .collect();
        let p = Polytope::from_points(2, &pts)?;
        if p.contains_origin_interior() && p.volume() > 0.3 {
            return Ok(p);
        }
    }
}

/// Star body in R^d with ρ(u) = exp(0.3·uᵗAu + 0.2·bᵗu), A and b random.
fn random_star(rng: &mut ChaCha8Rng, d: usize) -> StarBody {
    let mut a = DMatrix::<f64>::zeros(d, d);
    for i in 0..d {
        for j in i..d {
            let v = rng.random_range(-1.0..1.0);
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
    let b: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
    StarBody::new(
        d,
        Arc::new(move |u: &[f64]| {
            let mut quad = 0.0;
            for i in 0..d {
                for j in 0..d {
                    quad += u[i] * a[(i, j)] * u[j];
                }
            }
            let lin: f64 = b.iter().zip(u).map(|(x, y)| x * y).sum();
            (0.3 * quad + 0.2 * lin).exp()
        }),
    )
}

/// Image of a star body under x ↦ Mx.
fn star_image(l: &StarBody, m: &DMatrix<f64>) -> Result<StarBody> {
    let inv = m
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Degenerate("singular map".into()))?;
    let (l, d) = (l.clone(), l.dim());
    Ok(StarBody::new(
        d,
        Arc::new(move |u: &[f64]| {
            let x: Vec<f64> = (0..d).map(|i| (0..d).map(|j| inv[(i, j)] * u[j]).sum()).collect();
            1.0 / l.gauge(&x)
        }),
    ))
}

fn random_sl2(rng: &mut ChaCha8Rng, smax: f64) -> DMatrix<f64> {
    let a = rng.random_range(0.0..PI);
    let b = rng.random_range(0.0..PI);
    let s = rng.random_range(1.0..smax);
    sl2(a, s, b)
}

fn unit(a: f64) -> [f64; 2] {
    [a.cos(), a.sin()]
}

/// vol(Π°K)·vol(K)^{nm/p − m}, on `fine_sphere`.
fn petty_value(k: &ConvexBody, q: &QBody, p: f64, s: &Settings) -> Result<f64> {
    let s = &fine_sphere(s);
    let (n, m) = (k.dim(), q.dim());
    let nm = (n * m) as f64;
    let pi = projection_body(k, q, p, s)?;
    Ok(polar_projection_volume(&pi, s)? * k.volume(s)?.powf(nm / p - m as f64))
}

fn petty_ball(qn: &'static str, m: usize, p: f64, s: &Settings) -> Result<f64> {
    memo(format!("petty-ball|{qn}|{m}|{p}|{}", skey(s)), || {
        petty_value(&ConvexBody::Ellipsoid(Ellipsoid::ball(2, 1.0)?), &qb(qn, m)?, p, s)
    })
    .map(|v| *v)
}

/// vol(ΓL)/vol(L)^{1/m}.
fn bp_value(l: &StarBody, q: &QBody, p: f64, s: &Settings) -> Result<f64> {
    let g = centroid_body(l, q, p, s)?;
    Ok(g.volume(s)? / l.volume(s)?.powf(1.0 / q.dim() as f64))
}

fn polar_projection_star(e: &Ellipsoid, q: &QBody, p: f64, s: &Settings) -> Result<StarBody> {
    Ok(StarBody::polar_of(&projection_body(&ConvexBody::Ellipsoid(e.clone()), q, p, s)?))
}

fn bp_ball(qn: &'static str, m: usize, p: f64, s: &Settings) -> Result<f64> {
    memo(format!("bp-ball|{qn}|{m}|{p}|{}", skey(s)), || {
        let q = qb(qn, m)?;
        bp_value(&polar_projection_star(&Ellipsoid::ball(2, 1.0)?, &q, p, s)?, &q, p, s)
    })
    .map(|v| *v)
}

// ---------------------------------------------------------------- suites

fn relate(_: &Settings) -> Result<Suite> {
    let mut out = Suite::new("relate");
    let profiles = [extremal(Extremal::Cone, 1.0, None)?, extremal(Extremal::Gaussian, 0.22, None)?];
    for f in &profiles {
        for m in 1..=2 {
            for qn in QS {
                for p in PS {
                    let f = f.clone();
                    out.add(
                        "radial-equality",
                        format!("{}:{qn}:m{m}:p{p}", f.id),
                        shape(2, m, p, qn),
                        Relation::Equal,
                        Tol::Fixed(0.01),
                        move |s| sides(energy_p(&f, qn, m, p, s)?, sample(&f, s)?.dirichlet_norm(p)),
                    );
                }
            }
        }
    }
    let cone = profiles[0].clone();
    out.add(
        "radial-equality",
        "cone:segment:m1:p2=sqrt(pi)",
        shape(2, 1, 2.0, "segment"),
        Relation::Equal,
        Tol::Fixed(0.01),
        move |s| sides(energy_p(&cone, "segment", 1, 2.0, s)?, PI.sqrt()),
    );
    Ok(out)
}

fn comparison(s: &Settings) -> Result<Suite> {
    let mut out = Suite::new("comparison");
    let fam = family(s.seed, 1.0)?;
    for m in 1..=2 {
        for qn in QS {
            for p in PS {
                for f in fam.iter() {
                    let f = f.clone();
                    out.add(
                        "comparison",
                        format!("{}:{qn}:m{m}:p{p}", f.id),
                        shape(2, m, p, qn),
                        Relation::AtMost,
                        Tol::Slack,
                        move |s| sides(energy_p(&f, qn, m, p, s)?, sample(&f, s)?.dirichlet_norm(p)),
                    );
                }
            }
        }
    }
    Ok(out)
}

fn polya_szego(s: &Settings) -> Result<Suite> {
    let mut out = Suite::new("polya-szego");
    let fam = family(s.seed, 1.0)?;
    for m in 1..=2 {
        for qn in QS {
            for p in PS {
                for f in fam.iter() {
                    let f = f.clone();
                    out.add(
                        "polya-szego",
                        format!("{}:{qn}:m{m}:p{p}", f.id),
                        shape(2, m, p, qn),
                        Relation::AtLeast,
                        Tol::Slack,
                        move |s| sides(energy_p(&f, qn, m, p, s)?, energy_star(&f, qn, m, p, s)?),
                    );
                }
            }
        }
    }
    // SL(2) images of radial functions are equality cases
    let combos: [(usize, &'static str, f64); 4] =
        [(1, "segment", 1.5), (2, "square", 2.0), (1, "segment+", 2.0), (2, "simplex2", 1.5)];
    for k in EQ_DEFAULT {
        for (kind, scale) in [(Extremal::Cone, 0.6), (Extremal::Gaussian, 0.14)] {
            let f = extremal(kind, scale, Some(k))?;
            for (m, qn, p) in combos {
                let f = f.clone();
                out.add(
                    "polya-szego",
                    format!("{}:{qn}:m{m}:p{p}:eq", f.id),
                    shape(2, m, p, qn),
                    Relation::Equal,
                    Tol::Fixed(0.02),
                    move |s| sides(energy_p(&f, qn, m, p, s)?, energy_star(&f, qn, m, p, s)?),
                );
            }
        }
    }
    Ok(out)
}

/// Doubled box resolution: composed functions in the affine suite have
/// features down to 1/√5 of the family's.
fn doubled(s: &Settings) -> Settings {
    let mut t = s.clone();
    t.grid_cells = 2 * s.grid_cells - 1;
    t
}

/// Four times the sphere resolution in every dimension; polar volumes of
/// projection bodies of polygons have kinks.
fn fine_sphere(s: &Settings) -> Settings {
    let mut t = s.clone();
    for r in t.sphere_resolution.iter_mut() {
        *r *= 4;
    }
    t
}

fn affine(s: &Settings) -> Result<Suite> {
    let mut out = Suite::new("affine");
    let base = memo(format!("family|{}|affine", s.seed), || nonradial_family(s.seed + 1, 10, 0.5))?;
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed ^ 0xaff1);
    let a2 = sobolev_constant(2, 1.5)?;
    for k in 0..10 {
        let phi = random_sl2(&mut rng, 5f64.sqrt());
        let f = base[k].clone();
        let g = f.compose(&format!("phi{k}"), &phi, &[0.0, 0.0])?;
        for (m, qn, p) in [(1, QS[k % 4], 2.0), (2, QS[(k + 1) % 4], 1.5)] {
            let (f, g) = (f.clone(), g.clone());
            out.add(
                "affine-invariance",
                format!("{}:E:{qn}:m{m}:p{p}", g.id),
                shape(2, m, p, qn),
                Relation::Equal,
                Tol::Fixed(0.01),
                move |s| {
                    let s = &doubled(s);
                    sides(energy_p(&g, qn, m, p, s)?, energy_p(&f, qn, m, p, s)?)
                },
            );
        }
        let sob = move |h: &Profile, s: &Settings| -> Result<f64> {
            Ok(a2 * sample(h, s)?.lp_norm(6.0) / energy_p(h, "segment", 1, 1.5, s)?)
        };
        let (f1, g1) = (f.clone(), g.clone());
        out.add(
            "affine-invariance",
            format!("{}:sobolev", g.id),
            shape(2, 1, 1.5, "segment"),
            Relation::Equal,
            Tol::Fixed(0.02),
            move |s| sides(sob(&g1, &doubled(s))?, sob(&f1, &doubled(s))?),
        );
        let ps = |h: &Profile, s: &Settings| -> Result<f64> {
            Ok(energy_p(h, "segment+", 2, 2.0, s)? / energy_star(h, "segment+", 2, 2.0, s)?)
        };
        let (f1, g1) = (f.clone(), g.clone());
        out.add(
            "affine-invariance",
            format!("{}:polya-szego", g.id),
            shape(2, 2, 2.0, "segment+"),
            Relation::Equal,
            Tol::Fixed(0.02),
            move |s| sides(ps(&g1, &doubled(s))?, ps(&f1, &doubled(s))?),
        );
        let (m, qn, p) = if k % 2 == 0 { (1, "segment", 1.0) } else { (2, "square", 1.5) };
        let poly = random_polygon(&mut rng)?;
        let image = poly.transform(&phi)?;
        out.add(
            "affine-invariance",
            format!("polygon{k}:phi{k}:petty:{qn}:m{m}:p{p}"),
            shape(2, m, p, qn),
            Relation::Equal,
            Tol::Fixed(0.02),
            move |s| {
                let q = qb(qn, m)?;
                sides(
                    petty_value(&ConvexBody::Polytope(image.clone()), &q, p, s)?,
                    petty_value(&ConvexBody::Polytope(poly.clone()), &q, p, s)?,
                )
            },
        );
        let (m, qn, p) = if k % 2 == 0 { (1, "segment+", 1.0) } else { (2, "segment", 2.0) };
        let l = random_star(&mut rng, 2 * m);
        let limg = star_image(&l, &lift_map(&phi, m))?;
        out.add(
            "affine-invariance",
            format!("star{k}:phi{k}:busemann-petty:{qn}:m{m}:p{p}"),
            shape(2, m, p, qn),
            Relation::Equal,
            Tol::Fixed(0.02),
            move |s| {
                let q = qb(qn, m)?;
                sides(bp_value(&limg, &q, p, s)?, bp_value(&l, &q, p, s)?)
            },
        );
    }
    Ok(out)
}

fn sobolev(s: &Settings) -> Result<Suite> {
    let mut out = Suite::new("sobolev");
    let fam = family(s.seed, 1.0)?;
    for m in 1..=2 {
        for qn in QS {
            for p in [1.0, 1.5] {
                let a = sobolev_constant(2, p)?;
                let r = 2.0 * p / (2.0 - p);
                for f in fam.iter() {
                    let f = f.clone();
                    out.add(
                        "affine-sobolev",
                        format!("{}:{qn}:m{m}:p{p}", f.id),
                        shape(2, m, p, qn),
                        Relation::AtMost,
                        Tol::Slack,
                        move |s| sides(a * sample(&f, s)?.lp_norm(r), energy_p(&f, qn, m, p, s)?),
                    );
                }
            }
        }
    }
    let fam3 = memo(format!("family3|{}", s.seed), || nonradial_family_3d(s.seed, 3))?;
    for f in fam3.iter() {
        for p in [1.0, 2.0] {
            let a = sobolev_constant(3, p)?;
            let r = 3.0 * p / (3.0 - p);
            for m in 1..=2 {
                let f = f.clone();
                out.add(
                    "affine-sobolev",
                    format!("{}:segment:m{m}:p{p}", f.id),
                    shape(3, m, p, "segment"),
                    Relation::AtMost,
                    Tol::Slack,
                    move |s| sides(a * sample(&f, s)?.lp_norm(r), energy_p(&f, "segment", m, p, s)?),
                );
            }
        }
    }
    Ok(out)
}

const PETTY_COMBOS: [(usize, f64, &str); 4] =
    [(1, 1.0, "segment"), (1, 2.0, "segment+"), (2, 1.0, "square"), (2, 1.5, "simplex2")];

fn petty(s: &Settings) -> Result<Suite> {
    let mut out = Suite::new("petty");
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed ^ 0x9e77);
    for i in 0..30 {
        let poly = random_polygon(&mut rng)?;
        for (m, p, qn) in PETTY_COMBOS {
            let poly = poly.clone();
            out.add(
                "petty",
                format!("polygon{i:02}:{qn}:m{m}:p{p}"),
                shape(2, m, p, qn),
                Relation::AtMost,
                Tol::Slack,
                move |s| {
                    let k = ConvexBody::Polytope(poly.clone());
                    sides(petty_value(&k, &qb(qn, m)?, p, s)?, petty_ball(qn, m, p, s)?)
                },
            );
        }
    }
    for (m, p, qn) in PETTY_COMBOS {
        out.add(
            "petty",
            format!("ball:{qn}:m{m}:p{p}:eq"),
            shape(2, m, p, qn),
            Relation::Equal,
            Tol::Fixed(0.02),
            move |s| {
                let q = qb(qn, m)?;
                let nm = (2 * m) as f64;
                let closed = polar_projection_volume_ball(2, m, p, &q, s)? * PI.powf(nm / p - m as f64);
                sides(petty_ball(qn, m, p, s)?, closed)
            },
        );
        for k in EQ_DEFAULT {
            let (a, sv, b) = EQ_MAPS[k];
            let phi = sl2(a, sv, b);
            out.add(
                "petty",
                format!("ball@A{k}:{qn}:m{m}:p{p}:eq"),
                shape(2, m, p, qn),
                Relation::Equal,
                Tol::Fixed(0.02),
                move |s| {
                    let e = ConvexBody::Ellipsoid(Ellipsoid::ball(2, 1.0)?.linear_image(&phi)?);
                    sides(petty_value(&e, &qb(qn, m)?, p, s)?, petty_ball(qn, m, p, s)?)
                },
            );
        }
    }
    out.add(
        "petty",
        "polar-projection-ball:segment:m1:p1=pi/4",
        shape(2, 1, 1.0, "segment"),
        Relation::Equal,
        Tol::Fixed(0.01),
        |s| {
            let pi = projection_body(&ConvexBody::Ellipsoid(Ellipsoid::ball(2, 1.0)?), &qb("segment", 1)?, 1.0, s)?;
            sides(polar_projection_volume(&pi, s)?, PI / 4.0)
        },
    );
    Ok(out)
}

fn busemann_petty(s: &Settings) -> Result<Suite> {
    let mut out = Suite::new("busemann-petty");
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed ^ 0xb9);
    for i in 0..20 {
        let m = 1 + i % 2;
        let p = [1.0, 1.5, 2.0][i % 3];
        let qn = QS[(i / 2) % 4];
        let l = random_star(&mut rng, 2 * m);
        out.add(
            "busemann-petty",
            format!("star{i:02}:{qn}:m{m}:p{p}"),
            shape(2, m, p, qn),
            Relation::AtLeast,
            Tol::Slack,
            move |s| sides(bp_value(&l, &qb(qn, m)?, p, s)?, bp_ball(qn, m, p, s)?),
        );
    }
    for (m, p, qn) in PETTY_COMBOS {
        for k in EQ_DEFAULT {
            let (a, sv, b) = EQ_MAPS[k];
            let phi = sl2(a, sv, b);
            let phi2 = phi.clone();
            out.add(
                "busemann-petty",
                format!("polar-projection(ball@A{k}):{qn}:m{m}:p{p}:eq"),
                shape(2, m, p, qn),
                Relation::Equal,
                Tol::Fixed(0.02),
                move |s| {
                    let q = qb(qn, m)?;
                    let e = Ellipsoid::ball(2, 1.0)?.linear_image(&phi)?;
                    sides(bp_value(&polar_projection_star(&e, &q, p, s)?, &q, p, s)?, bp_ball(qn, m, p, s)?)
                },
            );
            // ΓΠ°E = ω^{1/p} vol(E)^{-1/p} (m/(ω(nm+p)))^{1/p} E, here with vol(E) = ω·0.8²
            for (j, a) in [0.0, 0.7, 1.9].into_iter().enumerate() {
                let phi = phi2.clone();
                out.add(
                    "ellipsoid-calculus",
                    format!("centroid(polar-projection(0.8ball@A{k})):{qn}:m{m}:p{p}:u{j}"),
                    shape(2, m, p, qn),
                    Relation::Equal,
                    Tol::Fixed(0.02),
                    move |s| {
                        let q = qb(qn, m)?;
                        let e = Ellipsoid::ball(2, 0.8)?.linear_image(&phi)?;
                        let key = format!("gpe|{k}|{qn}|{m}|{p}|{}", skey(s));
                        let gamma = memo(key, || centroid_body(&polar_projection_star(&e, &q, p, s)?, &q, p, s))?;
                        let omega = PI;
                        let nm = (2 * m) as f64;
                        let c = omega.powf(1.0 / p)
                            * e.volume().powf(-1.0 / p)
                            * (m as f64 / (omega * (nm + p))).powf(1.0 / p);
                        let u = unit(a);
                        sides(gamma.support(&u), c * e.support(&u))
                    },
                );
            }
        }
    }
    Ok(out)
}

fn schneider(s: &Settings) -> Result<Suite> {
    let mut out = Suite::new("schneider");
    let h = 3f64.sqrt() / 2.0;
    let bodies: [(&str, Polytope, f64); 3] = [
        ("triangle", Polytope::from_points(2, &[vec![1.0, 0.0], vec![-0.5, h], vec![-0.5, -h]])?, 6.0),
        ("square", regular_polygon(4, 1.0)?, 4.0),
        ("256-gon", regular_polygon(256, 1.0)?, 4.0),
    ];
    for (name, k, target) in bodies {
        out.add("schneider", format!("{name}:m1"), shape(2, 1, f64::NAN, ""), Relation::Equal, Tol::Fixed(0.02), move |s| {
            sides(schneider_ratio(&k, 1, s)?, target)
        });
    }
    let seed = s.seed;
    let search = move |s: &Settings| {
        memo(format!("schneider-max|{seed}|{}", skey(s)), || {
            optimize_ratio(Family::Polygons, 2, 1, Sense::Max, 400, seed, s)
        })
    };
    let search2 = search.clone();
    out.add("schneider", "max-over-polygons:m1", shape(2, 1, f64::NAN, ""), Relation::Equal, Tol::Fixed(0.02), move |s| {
        sides(search(s)?.ratio, 6.0)
    });
    out.add(
        "schneider",
        "max-over-polygons:m1:largest-inscribed-triangle/area",
        shape(2, 1, f64::NAN, ""),
        Relation::AtLeast,
        Tol::Fixed(0.0),
        move |s| {
            let r = search2(s)?;
            let v = r.body.vertices();
            let mut best: f64 = 0.0;
            for a in 0..v.len() {
                for b in a + 1..v.len() {
                    for c in b + 1..v.len() {
                        let area = 0.5
                            * ((v[b][0] - v[a][0]) * (v[c][1] - v[a][1]) - (v[c][0] - v[a][0]) * (v[b][1] - v[a][1]))
                                .abs();
                        best = best.max(area);
                    }
                }
            }
            sides(best / r.body.volume(), 0.98)
        },
    );
    Ok(out)
}

fn matheron(_: &Settings) -> Result<Suite> {
    let mut out = Suite::new("matheron");
    for (name, k) in [("square", regular_polygon(4, 1.0)?), ("256-gon", regular_polygon(256, 1.0)?)] {
        for j in 0..8 {
            let a = PI * j as f64 / 8.0 + 0.05;
            let k = k.clone();
            out.add("matheron", format!("{name}:dir{j}"), shape(2, 1, 1.0, "segment"), Relation::Equal, Tol::Fixed(0.02), move |s| {
                let u = unit(a);
                let pi = projection_body(&ConvexBody::Polytope(k.clone()), &qb("segment", 1)?, 1.0, s)?;
                sides(-matheron_derivative(&k, &u)?, pi.support(&u))
            });
        }
    }
    Ok(out)
}

fn random_measure(rng: &mut ChaCha8Rng, symmetric: bool, s: &Settings) -> Result<SphericalMeasure> {
    let probe = s.sphere(2)?;
    loop {
        let k = rng.random_range(5..10);
        let mut dirs = Vec::new();
        let mut ws = Vec::new();
        for _ in 0..k {
            let t = rng.random_range(0.0..2.0 * PI);
            let w = rng.random_range(0.2..1.5);
            dirs.push(vec![t.cos(), t.sin()]);
            ws.push(w);
            if symmetric {
                dirs.push(vec![-t.cos(), -t.sin()]);
                ws.push(w);
            }
        }
        let nu = SphericalMeasure::new(2, &dirs, &ws)?;
        if nu.is_spanning(&probe)? {
            return Ok(nu);
        }
    }
}

fn minkowski(s: &Settings) -> Result<Suite> {
    let mut out = Suite::new("minkowski");
    let cross = || SphericalMeasure::new(2, &[vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, 0.0], vec![0.0, -1.0]], &[1.0; 4]);
    let solve_cross = move || memo("cross".into(), || solve_lp_minkowski(&cross()?, 1.0));
    out.add("minkowski-solver", "cross4:p1:volume", shape(2, 0, 1.0, ""), Relation::Equal, Tol::Fixed(1e-6), move |_| {
        sides(solve_cross()?.volume(), 1.0)
    });
    for (j, u) in [[1.0, 0.0], [0.0, 1.0]].into_iter().enumerate() {
        out.add("minkowski-solver", format!("cross4:p1:side{j}"), shape(2, 0, 1.0, ""), Relation::Equal, Tol::Fixed(1e-6), move |_| {
            let k = solve_cross()?;
            sides(k.body.support(&u) + k.body.support(&[-u[0], -u[1]]), 1.0)
        });
    }
    out.add("minkowski-solver", "cross4:p1:residual", shape(2, 0, 1.0, ""), Relation::AtMost, Tol::Fixed(0.0), move |_| {
        sides(solve_cross()?.residual, 1e-6)
    });
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed ^ 0x3141);
    for i in 0..8 {
        let p = [1.5, 2.0, 3.0, 1.0][i % 4];
        let (m, qn) = (1 + i % 2, QS[(i / 2) % 4]);
        let nu = random_measure(&mut rng, p == 1.0, s)?;
        let nu2 = nu.clone();
        out.add("minkowski-solver", format!("measure{i}:p{p}:residual"), shape(2, 0, p, ""), Relation::AtMost, Tol::Fixed(0.0), move |_| {
            sides(solve_lp_minkowski(&nu2, p)?.residual, 1e-6)
        });
        out.add("minkowski-lemma", format!("measure{i}:{qn}:m{m}:p{p}"), shape(2, m, p, qn), Relation::AtMost, Tol::Slack, move |s| {
            let c = verify_lemma_body(&nu, p, &qb(qn, m)?, s)?;
            sides(c.lhs, c.rhs)
        });
    }
    for p in [1.0, 2.0, 3.0] {
        out.add("minkowski-solver", format!("ball-measure:p{p}:volume"), shape(2, 0, p, ""), Relation::Equal, Tol::Fixed(0.02), move |s| {
            let k = solve_lp_minkowski(&ball_measure(2, s)?, p)?;
            sides(k.volume(), PI * ball_solution_radius(2, p).powi(2))
        });
    }
    let cone = extremal(Extremal::Cone, 1.0, None)?;
    for t in [0.25, 0.5, 0.75] {
        for p in [1.0, 2.0] {
            let cone = cone.clone();
            let solve = move |s: &Settings| {
                let f = sample(&cone, s)?;
                memo(format!("conv|{t}|{p}|{}", skey(s)), || asymmetric_convexification(&f, t, p, s))
            };
            let solve2 = solve.clone();
            out.add(
                "asymmetric-convexification",
                format!("cone:t{t}:p{p}:asphericity"),
                shape(2, 0, p, ""),
                Relation::Equal,
                Tol::Fixed(0.02),
                move |s| sides(solve(s)?.asphericity(), 1.0),
            );
            // ν_t = (1 − t)σ_B, solved by the ball of radius (π(1 − t))^{-1/p}
            out.add(
                "asymmetric-convexification",
                format!("cone:t{t}:p{p}:volume"),
                shape(2, 0, p, ""),
                Relation::Equal,
                Tol::Fixed(0.03),
                move |s| {
                    let rho = (PI * (1.0 - t)).powf(-1.0 / p);
                    sides(solve2(s)?.volume(), PI * rho * rho)
                },
            );
        }
    }
    Ok(out)
}

/// J₁ by its power series.
fn bessel_j1(x: f64) -> f64 {
    let mut term = x / 2.0;
    let mut sum = term;
    for k in 1..80 {
        term *= -(x * x / 4.0) / (k as f64 * (k as f64 + 1.0));
        sum += term;
    }
    sum
}

fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let fa = f(a);
    for _ in 0..200 {
        let c = 0.5 * (a + b);
        if f(c) * fa > 0.0 {
            a = c;
        } else {
            b = c;
        }
    }
    0.5 * (a + b)
}

fn constants(_: &Settings) -> Result<Suite> {
    let mut out = Suite::new("constants");
    let fixed = |out: &mut Suite, tag: &'static str, label: &str, n: usize, p: f64, tol: f64, lhs: Result<f64>, rhs: f64| {
        let lhs = lhs.clone();
        out.add(tag, label, shape(n, 0, p, ""), Relation::Equal, Tol::Fixed(tol), move |_| sides(lhs.clone()?, rhs));
    };
    fixed(&mut out, "sharp-constants", "c_{2,2}=(e*pi)^(-1/2)", 2, 2.0, 1e-9, logsobolev_constant(2, 2.0), (1.0 / (E * PI)).sqrt());
    fixed(&mut out, "sharp-constants", "c_{3,2}=(2/(3e*pi))^(1/2)", 3, 2.0, 1e-9, logsobolev_constant(3, 2.0), (2.0 / (3.0 * E * PI)).sqrt());
    fixed(&mut out, "sharp-constants", "c_{2,1}=1/(2*sqrt(pi))", 2, 1.0, 1e-9, logsobolev_constant(2, 1.0), 0.5 / PI.sqrt());
    fixed(&mut out, "sharp-constants", "a_{2,1}=2*sqrt(pi)", 2, 1.0, 1e-9, sobolev_constant(2, 1.0), 2.0 * PI.sqrt());
    fixed(
        &mut out,
        "sharp-constants",
        "a_{3,2}=(3pi)^(1/2)*(pi^(1/2)/4)^(1/3)",
        3,
        2.0,
        1e-9,
        sobolev_constant(3, 2.0),
        (3.0 * PI).sqrt() * (PI.sqrt() / 4.0).powf(1.0 / 3.0),
    );
    fixed(&mut out, "sharp-constants", "b_{2,3}=2^(1/3)/sqrt(pi)", 2, 3.0, 1e-9, morrey_constant(2, 3.0), 2f64.powf(1.0 / 3.0) / PI.sqrt());
    fixed(
        &mut out,
        "sharp-constants",
        "b_{2,4}=2^(-1/4)*pi^(-1/2)*(3/2)^(3/4)",
        2,
        4.0,
        1e-9,
        morrey_constant(2, 4.0),
        2f64.powf(-0.25) / PI.sqrt() * 1.5f64.powf(0.75),
    );
    for (n, p) in [(2usize, 1.5), (3, 2.0), (3, 1.5)] {
        let q = affiq_core::constants::GNParameters::q_max(n, p);
        let alpha = gn_parameters(n, p, q).map(|g| g.alpha);
        fixed(&mut out, "sharp-constants", &format!("alpha_{{{n},{p}}}(q_max)=a_{{{n},{p}}}"), n, p, 1e-6, alpha, sobolev_constant(n, p)?);
    }
    // λ₂ = j₁,₁² and λ₃ = k² with tan k = k, from independent root finders
    let j11 = bisect(bessel_j1, 3.0, 4.5);
    let k3 = bisect(|k| k.sin() - k * k.cos(), PI + 0.1, 1.5 * PI - 1e-9);
    for (n, oracle) in [(2usize, j11 * j11), (3, k3 * k3)] {
        fixed(
            &mut out,
            "sharp-constants",
            &format!("lambda_{n}:shooting-vs-series"),
            n,
            f64::NAN,
            0.01 / oracle,
            neumann_eigenvalue(n, NASH_STEPS),
            oracle,
        );
    }
    fixed(&mut out, "sharp-constants", "beta_2=2/sqrt(pi*lambda_2)", 2, 2.0, 1e-6, nash_constant(2), 2.0 / (PI * j11 * j11).sqrt());
    for m in 1..=2 {
        for qn in QS {
            for p in [1.0, 2.0] {
                out.add("dnp-formula", format!("d_{{2,{p}}}({qn}):m{m}:sphere-vs-haar"), shape(2, m, p, qn), Relation::Equal, Tol::Fixed(0.01), move |s| {
                    let q = qb(qn, m)?;
                    sides(dnp_constant(2, m, p, &q, s)?, dnp_constant_haar(2, m, p, &q, s.haar_samples, s.seed, s)?)
                });
            }
        }
    }
    for p in [1.0, 2.0] {
        out.add("dnp-formula", format!("d_{{3,{p}}}(segment):m1:sphere-vs-haar"), shape(3, 1, p, "segment"), Relation::Equal, Tol::Fixed(0.01), move |s| {
            let q = qb("segment", 1)?;
            sides(dnp_constant(3, 1, p, &q, s)?, dnp_constant_haar(3, 1, p, &q, s.haar_samples, s.seed, s)?)
        });
    }
    Ok(out)
}

/// (m, Q) for the i-th family case.
fn combo(i: usize) -> (usize, &'static str) {
    (1 + i % 2, QS[(i / 2) % 4])
}

fn morrey(s: &Settings) -> Result<Suite> {
    let mut out = Suite::new("morrey");
    let fam = family(s.seed, 1.0)?;
    for (j, p) in [3.0, 4.0, 6.0].into_iter().enumerate() {
        let b = morrey_constant(2, p)?;
        for (i, f) in fam.iter().enumerate() {
            let (m, qn) = combo(i + j);
            let f = f.clone();
            out.add("morrey-sobolev", format!("{}:{qn}:m{m}:p{p}", f.id), shape(2, m, p, qn), Relation::AtMost, Tol::Slack, move |s| {
                let g = sample(&f, s)?;
                let v = g.support_volume();
                sides(g.max_abs(), b * v.powf(0.5 - 1.0 / p) * energy_p(&f, qn, m, p, s)?)
            });
        }
    }
    for p in [4.0, 6.0] {
        let b = morrey_constant(2, p)?;
        for k in EQ_DEFAULT {
            let f = extremal(Extremal::Morrey { p }, 0.6, Some(k))?;
            for (m, qn) in [(1, "segment"), (2, "square")] {
                let f = f.clone();
                out.add("morrey-sobolev", format!("{}:{qn}:m{m}:p{p}:eq", f.id), shape(2, m, p, qn), Relation::Equal, Tol::Fixed(0.02), move |s| {
                    let g = sample(&f, s)?;
                    sides(g.max_abs(), b * g.support_volume().powf(0.5 - 1.0 / p) * energy_p(&f, qn, m, p, s)?)
                });
            }
        }
    }
    let fk = |f: &Profile, qn: &'static str, m: usize, s: &Settings| -> Result<Sides> {
        let g = sample(f, s)?;
        let e = energy_infty(&g, &qb(qn, m)?, s)?;
        sides(g.max_abs(), PI.powf(-0.5) * g.support_volume().sqrt() * e)
    };
    for (i, f) in fam.iter().enumerate() {
        let (m, qn) = combo(i + 1);
        let f = f.clone();
        out.add("faber-krahn", format!("{}:{qn}:m{m}:p=inf", f.id), shape(2, m, f64::INFINITY, qn), Relation::AtMost, Tol::Slack, move |s| {
            fk(&f, qn, m, s)
        });
    }
    for k in EQ_DEFAULT {
        let f = extremal(Extremal::Cone, 0.6, Some(k))?;
        for (m, qn) in [(1, "segment+"), (2, "segment")] {
            let f = f.clone();
            out.add("faber-krahn", format!("{}:{qn}:m{m}:p=inf:eq", f.id), shape(2, m, f64::INFINITY, qn), Relation::Equal, Tol::Fixed(0.02), move |s| {
                fk(&f, qn, m, s)
            });
        }
    }
    Ok(out)
}

/// (1/V) ∫_{supp f} exp((n ω_n^{1/n} |f| / t)^{n/(n−1)}) dx on a planar grid.
fn mt_functional(f: &GridFunction, t: f64) -> f64 {
    let c = 2.0 * PI.sqrt() / t;
    let cv = f.grid().cell_volume();
    let sum: f64 = f
        .values()
        .iter()
        .filter(|v| **v != 0.0)
        .map(|v| ((c * v.abs()).powi(2)).exp() * cv)
        .sum();
    sum / f.support_volume()
}

fn moser_trudinger(s: &Settings) -> Result<Suite> {
    let mut out = Suite::new("moser-trudinger");
    let fam = family(s.seed, 1.0)?;
    for (i, f) in fam.iter().enumerate() {
        let (m, qn) = combo(i);
        let f = f.clone();
        out.add("moser-trudinger", format!("{}:{qn}:m{m}:p2", f.id), shape(2, m, 2.0, qn), Relation::AtMost, Tol::Slack, move |s| {
            let g = sample(&f, s)?;
            let st = star(&f, s)?;
            sides(mt_functional(&g, energy_p(&f, qn, m, 2.0, s)?), mt_functional(&st, st.dirichlet_norm(2.0)))
        });
    }
    Ok(out)
}

/// ∫|f|^p log|f| for f normalized in L^p, returned as exp((p/n)·that).
fn log_sobolev_lhs(f: &GridFunction, p: f64) -> f64 {
    let norm = f.lp_norm(p);
    let cv = f.grid().cell_volume();
    let ent: f64 = f
        .values()
        .iter()
        .filter(|v| **v != 0.0)
        .map(|v| {
            let g = v.abs() / norm;
            g.powf(p) * g.ln() * cv
        })
        .sum();
    (p / f.dim() as f64 * ent).exp()
}

fn nash(s: &Settings) -> Result<Suite> {
    let mut out = Suite::new("nash");
    let fam = family(s.seed, 1.0)?;
    let beta = nash_constant(2)?;
    let nash_sides = move |f: &Profile, qn: &'static str, m: usize, s: &Settings| -> Result<Sides> {
        let g = sample(f, s)?;
        let (l1, l2) = (g.lp_norm(1.0), g.lp_norm(2.0));
        sides(l2 * (l2 / l1), beta * energy_p(f, qn, m, 2.0, s)?)
    };
    for (i, f) in fam.iter().enumerate() {
        let (m, qn) = combo(i);
        let f = f.clone();
        out.add("nash", format!("{}:{qn}:m{m}:p2", f.id), shape(2, m, 2.0, qn), Relation::AtMost, Tol::Slack, move |s| {
            nash_sides(&f, qn, m, s)
        });
    }
    for k in EQ_DEFAULT {
        let f = extremal(Extremal::Nash, 0.6, Some(k))?;
        for (m, qn) in [(1, "segment"), (2, "segment+")] {
            let f = f.clone();
            out.add("nash", format!("{}:{qn}:m{m}:p2:eq", f.id), shape(2, m, 2.0, qn), Relation::Equal, Tol::Fixed(0.03), move |s| {
                nash_sides(&f, qn, m, s)
            });
        }
    }
    let ls_sides = |f: &Profile, qn: &'static str, m: usize, p: f64, s: &Settings| -> Result<Sides> {
        let g = sample(f, s)?;
        let c = logsobolev_constant(2, p)?;
        sides(log_sobolev_lhs(&g, p), c * energy_p(f, qn, m, p, s)? / g.lp_norm(p))
    };
    for p in [1.5, 2.0] {
        for (i, f) in fam.iter().enumerate() {
            let (m, qn) = combo(i + 1);
            let f = f.clone();
            out.add("log-sobolev", format!("{}:{qn}:m{m}:p{p}", f.id), shape(2, m, p, qn), Relation::AtMost, Tol::Slack, move |s| {
                ls_sides(&f, qn, m, p, s)
            });
        }
    }
    for (p, scale) in [(2.0, 0.2), (1.5, 0.3)] {
        for k in EQ_DEFAULT {
            let f = extremal(Extremal::LogSobolev { p }, scale, Some(k))?;
            for (m, qn) in [(1, "segment"), (2, "square")] {
                let f = f.clone();
                out.add("log-sobolev", format!("{}:{qn}:m{m}:p{p}:eq", f.id), shape(2, m, p, qn), Relation::Equal, Tol::Fixed(0.03), move |s| {
                    ls_sides(&f, qn, m, p, s)
                });
            }
        }
    }
    let p = 1.5;
    let gn_sides = move |f: &Profile, qn: &'static str, m: usize, q: f64, s: &Settings| -> Result<Sides> {
        let g = sample(f, s)?;
        let gp = gn_parameters(2, p, q)?;
        let e = energy_p(f, qn, m, p, s)?;
        sides(gp.alpha * g.lp_norm(gp.r), e.powf(gp.theta) * g.lp_norm(q).powf(1.0 - gp.theta))
    };
    for q in [1.6, 1.7] {
        for (i, f) in fam.iter().enumerate() {
            let (m, qn) = combo(i + 2);
            let f = f.clone();
            out.add("gagliardo-nirenberg", format!("{}:{qn}:m{m}:p{p}:q{q}", f.id), shape(2, m, p, qn), Relation::AtMost, Tol::Slack, move |s| {
                gn_sides(&f, qn, m, q, s)
            });
        }
    }
    for (q, scale, maps) in [(1.6, 0.3, [0, 1]), (1.7, 0.13, [1, 2])] {
        for k in maps {
            let f = extremal(Extremal::GagliardoNirenberg { p, q }, scale, Some(k))?;
            for (m, qn) in [(1, "segment+"), (2, "segment")] {
                let f = f.clone();
                out.add("gagliardo-nirenberg", format!("{}:{qn}:m{m}:p{p}:q{q}:eq", f.id), shape(2, m, p, qn), Relation::Equal, Tol::Fixed(0.03), move |s| {
                    gn_sides(&f, qn, m, q, s)
                });
            }
        }
    }
    Ok(out)
}

/// Fixed planar domain for the Poincaré suite.
pub fn omega() -> Result<Polytope> {
    Polytope::from_points(
        2,
        &[vec![1.1, 0.1], vec![0.5, 1.0], vec![-0.8, 0.8], vec![-1.1, -0.3], vec![-0.2, -1.1], vec![0.9, -0.8]],
    )
}

const POINCARE_COMBOS: [(usize, f64); 4] = [(1, 1.0), (1, 2.0), (2, 1.0), (2, 2.0)];
const POINCARE_FUNCTIONS: usize = 50;

fn poincare(s: &Settings) -> Result<Suite> {
    let mut out = Suite::new("poincare");
    let sq = Polytope::from_points(2, &[vec![-1.0, -1.0], vec![1.0, -1.0], vec![1.0, 1.0], vec![-1.0, 1.0]])?;
    let d = std::f64::consts::FRAC_1_SQRT_2;
    let examples: [(&str, Polytope, [f64; 2], f64); 3] = [
        ("square:e1", sq.clone(), [1.0, 0.0], 2.0),
        ("square:diagonal", sq, [d, d], 2.0 * 2f64.sqrt()),
        ("disk(r=0.7):dir", regular_polygon(4096, 0.7)?, unit(0.3), 1.4),
    ];
    for (label, body, xi, w) in examples {
        out.add("width", label, plain(2), Relation::Equal, Tol::Fixed(1e-6), move |_| sides(width(&body, &xi)?, w));
    }
    let om = omega()?;
    for j in 0..8 {
        let xi = unit(PI * j as f64 / 8.0 + 0.1);
        let om = om.clone();
        out.add("width", format!("omega:dir{j}:vertex-spread"), plain(2), Relation::Equal, Tol::Fixed(1e-12), move |_| {
            let proj: Vec<f64> = om.vertices().iter().map(|v| v[0] * xi[0] + v[1] * xi[1]).collect();
            let spread = proj.iter().copied().fold(f64::NEG_INFINITY, f64::max) - proj.iter().copied().fold(f64::INFINITY, f64::min);
            sides(width(&om, &xi)?, spread)
        });
    }
    let seed = s.seed;
    let bumps = memo(format!("omega-bumps|{seed}"), || bumps_in_domain(&omega()?, seed, POINCARE_FUNCTIONS))?;
    // one-dimensional Poincaré along ξ with constant 2/w(Ω, ξ)
    for (i, f) in bumps.iter().take(10).enumerate() {
        for j in 0..4 {
            let xi = unit(PI * j as f64 / 4.0 + 0.3);
            let p = if (i + j) % 2 == 0 { 1.0 } else { 2.0 };
            let (f, om) = (f.clone(), om.clone());
            out.add("width", format!("{}:dir{j}:p{p}:directional", f.id), shape(2, 0, p, ""), Relation::AtLeast, Tol::Slack, move |s| {
                let g = sample(&f, s)?;
                sides(directional_norm(&g, &xi, p), 2.0 * g.lp_norm(p) / width(&om, &xi)?)
            });
        }
    }
    let ratio = |f: &Profile, m: usize, p: f64, s: &Settings| -> Result<f64> {
        let q = qb("segment", m)?;
        require_symmetric(&q)?;
        let g = sample(f, s)?;
        Ok(ratio_from_energy(energy_of(&f.id, &g, &q, p, s)?, &g, &q, p))
    };
    for (m, p) in POINCARE_COMBOS {
        for f in bumps.iter() {
            let f1 = f.clone();
            out.add("poincare-bound", format!("{}:segment:m{m}:p{p}", f.id), shape(2, m, p, "segment"), Relation::Positive, Tol::Fixed(0.0), move |s| {
                sides(ratio(&f1, m, p, s)?, 0.0)
            });
            let f2 = f.clone();
            out.add("poincare", format!("{}:segment:m{m}:p{p}", f.id), shape(2, m, p, "segment"), Relation::Positive, Tol::Fixed(0.0), move |s| {
                let g = sample(&f2, s)?;
                let q = qb("segment", m)?;
                sides(energy_of(&f2.id, &g, &q, p, s)? / g.lp_norm(p), 0.0)
            });
            let f3 = f.clone();
            out.add("lyz-positivity", format!("{}:segment:m{m}:p{p}", f.id), shape(2, m, p, "segment"), Relation::Positive, Tol::Fixed(0.0), move |s| {
                sides(lyz_min_support(&*sample(&f3, s)?, &qb("segment", m)?, p, s)?, 0.0)
            });
        }
        let all = bumps.clone();
        out.add(
            "poincare-bound",
            format!("min-over-family:segment:m{m}:p{p}:doubled-resolution"),
            shape(2, m, p, "segment"),
            Relation::Equal,
            Tol::Fixed(0.02),
            move |s| {
                let mut fine = s.clone();
                fine.grid_cells = 2 * s.grid_cells - 1;
                let min_at = |st: &Settings| -> Result<f64> {
                    all.iter().map(|f| ratio(f, m, p, st)).try_fold(f64::INFINITY, |a, r| Ok(a.min(r?)))
                };
                sides(min_at(&fine)?, min_at(s)?)
            },
        );
    }
    let f = bumps[0].clone();
    out.add("poincare", "nonsymmetric-Q:segment+:rejected", shape(2, 1, 2.0, "segment+"), Relation::Positive, Tol::Fixed(0.0), move |s| {
        let g = sample(&f, s)?;
        let rejected = crate::poincare::poincare_ratio(&g, &qb("segment+", 1)?, 2.0, s).is_err();
        sides(if rejected { 1.0 } else { 0.0 }, 0.0)
    });
    Ok(out)
}

fn lorentz(s: &Settings) -> Result<Suite> {
    let mut out = Suite::new("lorentz");
    let fam = family(s.seed, 1.0)?;
    for (i, f) in fam.iter().take(3).enumerate() {
        for p in [1.5, 2.0] {
            let (m, qn) = combo(i);
            let f = f.clone();
            let chain = move |s: &Settings| {
                let g = sample(&f, s)?;
                memo(format!("chain|{}|{qn}|{m}|{p}|{}", f.id, skey(s)), || level_set_chain(&g, &qb(qn, m)?, p, 12, s))
            };
            let chain2 = chain.clone();
            out.add("lorentz-chain", format!("fam{i}:{qn}:m{m}:p{p}:energy>=middle"), shape(2, m, p, qn), Relation::AtLeast, Tol::Slack, move |s| {
                let c = chain(s)?;
                sides(c.energy_p, c.middle)
            });
            out.add("lorentz-chain", format!("fam{i}:{qn}:m{m}:p{p}:middle>=lower"), shape(2, m, p, qn), Relation::AtLeast, Tol::Slack, move |s| {
                let c = chain2(s)?;
                sides(c.middle, c.lower)
            });
        }
    }
    Ok(out)
}

fn energy_forms(s: &Settings) -> Result<Suite> {
    let mut out = Suite::new("energy-forms");
    let fam = family(s.seed, 1.0)?;
    for (i, f) in fam.iter().take(6).enumerate() {
        for (j, p) in [1.5, 2.0].into_iter().enumerate() {
            let (m, qn) = combo(i + j);
            let f1 = f.clone();
            out.add("energy-routes", format!("{}:{qn}:m{m}:p{p}:polar-vs-direct", f.id), shape(2, m, p, qn), Relation::Equal, Tol::Fixed(0.02), move |s| {
                let g = sample(&f1, s)?;
                sides(energy_p(&f1, qn, m, p, s)?, energy_direct(&g, &qb(qn, m)?, p, s)?)
            });
            let f2 = f.clone();
            out.add("energy-routes", format!("{}:{qn}:m{m}:p{p}:polar-vs-centroid", f.id), shape(2, m, p, qn), Relation::Equal, Tol::Fixed(0.02), move |s| {
                let g = sample(&f2, s)?;
                sides(energy_p(&f2, qn, m, p, s)?, energy_via_centroid(&g, &qb(qn, m)?, p, s)?)
            });
            let f3 = f.clone();
            out.add("centroid-lower-bound", format!("{}:{qn}:m{m}:p{p}", f.id), shape(2, m, p, qn), Relation::AtLeast, Tol::Slack, move |s| {
                let g = sample(&f3, s)?;
                sides(energy_p(&f3, qn, m, p, s)?, centroid_lower_bound(&g, &qb(qn, m)?, p, s)?)
            });
        }
    }
    // symmetric K with vol K = ω₂ = π
    let ellipse = ConvexBody::Ellipsoid(Ellipsoid::ball(2, 1.0)?.linear_image(&sl2(0.3, 1.4, 0.0))?);
    // |x|⁴ + |y|⁴ ≤ 1 as a 512-gon, rescaled to area π
    let quartic: Vec<Vec<f64>> = (0..512)
        .map(|i| {
            let t = 2.0 * PI * i as f64 / 512.0;
            let (c, s) = (t.cos(), t.sin());
            let r = (c.powi(4) + s.powi(4)).powf(-0.25);
            vec![r * c, r * s]
        })
        .collect();
    let quartic = Polytope::from_points(2, &quartic)?;
    let quartic = quartic.scaled((PI / quartic.volume()).sqrt())?;
    let bodies = [("ellipse", ellipse), ("quartic", ConvexBody::Polytope(quartic))];
    for (i, f) in fam.iter().take(10).enumerate() {
        for (kname, k) in bodies.iter() {
            for (j, p) in [1.5, 2.0].into_iter().enumerate() {
                let (f1, k1) = (f.clone(), k.clone());
                let kname = *kname;
                let rearranged = move |s: &Settings| {
                    let g = sample(&f1, s)?;
                    memo(format!("fK|{}|{kname}|{}", f1.id, skey(s)), || g.convex_rearrangement(&k1))
                };
                let (f2, k2, r2) = (f.clone(), k.clone(), rearranged.clone());
                out.add("convex-polya-szego", format!("{}:K={kname}:p{p}", f.id), shape(2, 0, p, ""), Relation::AtLeast, Tol::Slack, move |s| {
                    let g = sample(&f2, s)?;
                    sides(g.support_integral(&k2, p)?, r2(s)?.support_integral(&k2, p)?)
                });
                let (m, qn) = combo(i + j);
                let (f3, k3) = (f.clone(), k.clone());
                out.add("star-energy", format!("{}:K={kname}:{qn}:m{m}:p{p}", f.id), shape(2, m, p, qn), Relation::Equal, Tol::Fixed(0.02), move |s| {
                    sides(energy_star(&f3, qn, m, p, s)?, rearranged(s)?.support_integral(&k3, p)?.powf(1.0 / p))
                });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn case_ids_are_unique() {
        let s = Settings::default();
        let mut seen = BTreeSet::new();
        for c in build_cases("all", &s).unwrap() {
            assert!(seen.insert((c.suite, c.tag, c.label.clone())), "{c:?}");
        }
    }

    #[test]
    fn bessel_oracle() {
        let j = bisect(bessel_j1, 3.0, 4.5);
        assert!((j - 3.831_705_970_207_512).abs() < 1e-10);
    }
}
