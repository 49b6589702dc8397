//! Probes of the area and volume of `hull(base + {v})` as functions of the
//! free point `v`: singular points of the area level set, midpoint
//! convexity, level-set containment and single-vertex rigidity.
//!
//! Outside `hull(base)` the space is cut into cells by the face planes. On a
//! cell the set of visible faces is fixed and the area is the area of the
//! invisible faces plus the triangles spanned by `v` and the horizon edges;
//! [`cell_area`] evaluates that expression for a prescribed visible set,
//! which extends it analytically past the cell walls.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{random_in_ball, triangle_area, Point3};
use crate::hull3d::{convex_hull, hull_of_points, Configuration, HullMesh};
use crate::optim::{bfgs, MinimizeOptions};

/// Relative bisection tolerance for level-set crossings along rays.
const RAY_TOL: f64 = 1e-12;

/// Finite-difference offset, relative to the base diameter.
const FD_REL: f64 = 1e-6;

/// The base of the singular-point example: a corner tetrahedron.
pub fn example_singular_base() -> Configuration {
    Configuration::new(vec![
        Point3::new(0.0, 1.0, 0.0),
        Point3::new(0.0, 0.0, 0.0),
        Point3::new(1.0, 0.0, 0.0),
        Point3::new(0.0, 0.0, 1.0),
    ])
    .expect("four affinely independent points")
    .with_label("example-singular")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Functional {
    Area,
    Volume,
}

/// A base configuration and a level of the area (`S`) or volume (`C`)
/// functional.
#[derive(Debug, Clone)]
pub struct SurfaceProbe {
    base: Configuration,
    mesh: HullMesh,
    level: f64,
    functional: Functional,
}

impl SurfaceProbe {
    pub fn new(base: Configuration, functional: Functional, level: f64) -> Result<Self> {
        let mesh = convex_hull(&base)?;
        let floor = match functional {
            Functional::Area => mesh.surface_area(),
            Functional::Volume => mesh.volume(),
        };
        if !(level > floor) {
            return Err(Error::InvalidArgument(format!("level {level} must exceed the base value {floor}")));
        }
        Ok(SurfaceProbe { base, mesh, level, functional })
    }

    pub fn base(&self) -> &Configuration {
        &self.base
    }

    pub fn mesh(&self) -> &HullMesh {
        &self.mesh
    }

    pub fn level(&self) -> f64 {
        self.level
    }

    pub fn functional(&self) -> Functional {
        self.functional
    }

    pub fn eval(&self, v: Point3) -> f64 {
        eval_on(&self.mesh, self.functional, v)
    }

    pub fn contains(&self, v: Point3) -> bool {
        self.eval(v) <= self.level
    }
}

fn with_point(mesh: &HullMesh, v: Point3) -> Vec<Point3> {
    let mut pts = mesh.vertices().to_vec();
    pts.push(v);
    pts
}

fn eval_on(mesh: &HullMesh, functional: Functional, v: Point3) -> f64 {
    let visible = visible_faces(mesh, v);
    if visible.iter().all(|&s| !s) {
        return match functional {
            Functional::Area => mesh.surface_area(),
            Functional::Volume => mesh.volume(),
        };
    }
    match functional {
        Functional::Area => cell_area(mesh, &visible, v),
        Functional::Volume => cell_volume(mesh, &visible, v),
    }
}

/// Surface area of `hull(base + {v})`.
pub fn area_functional(base: &Configuration, v: Point3) -> Result<f64> {
    if !v.is_finite() {
        return Err(Error::InvalidArgument("v must be finite".into()));
    }
    let mesh = convex_hull(base)?;
    Ok(hull_of_points(&with_point(&mesh, v))?.surface_area())
}

/// Volume of `hull(base + {v})`.
pub fn volume_functional(base: &Configuration, v: Point3) -> Result<f64> {
    if !v.is_finite() {
        return Err(Error::InvalidArgument("v must be finite".into()));
    }
    let mesh = convex_hull(base)?;
    Ok(hull_of_points(&with_point(&mesh, v))?.volume())
}

/// Signed distance of `v` to each merged face plane, `+1` outside, `-1`
/// inside, `0` within the plane tolerance. Identifies the cell of `v`.
pub fn cell_signature(mesh: &HullMesh, v: Point3) -> Vec<i8> {
    let tol = mesh.tolerances().plane;
    (0..mesh.coplanar_groups().len())
        .map(|g| {
            let f = mesh.coplanar_groups()[g][0];
            let d = mesh.face_planes()[f].signed_distance(v);
            if d > tol {
                1
            } else if d < -tol {
                -1
            } else {
                0
            }
        })
        .collect()
}

/// Per triangle: does `v` lie strictly outside its merged face plane.
pub fn visible_faces(mesh: &HullMesh, v: Point3) -> Vec<bool> {
    let planes: Vec<bool> = mesh
        .coplanar_groups()
        .iter()
        .map(|g| mesh.face_planes()[g[0]].signed_distance(v) > 0.0)
        .collect();
    (0..mesh.faces().len()).map(|f| planes[mesh.group_of_face(f)]).collect()
}

/// Area of `hull(base + {v})` for the given visible set, i.e. the analytic
/// formula of the cell with that visible set.
pub fn cell_area(mesh: &HullMesh, visible: &[bool], v: Point3) -> f64 {
    let faces = mesh.faces();
    let owner: HashMap<(usize, usize), usize> = faces
        .iter()
        .enumerate()
        .flat_map(|(i, f)| [((f[0], f[1]), i), ((f[1], f[2]), i), ((f[2], f[0]), i)])
        .collect();
    let pts = mesh.vertices();
    let mut area = 0.0;
    for (i, f) in faces.iter().enumerate() {
        if !visible[i] {
            area += mesh.face_area(i);
            continue;
        }
        for (a, b) in [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])] {
            if !visible[owner[&(b, a)]] {
                area += triangle_area(pts[a], pts[b], v);
            }
        }
    }
    area
}

/// Volume of `hull(base + {v})` for the given visible set.
pub fn cell_volume(mesh: &HullMesh, visible: &[bool], v: Point3) -> f64 {
    let pts = mesh.vertices();
    let extra: f64 = mesh
        .faces()
        .iter()
        .zip(visible)
        .filter(|(_, &s)| s)
        .map(|(f, _)| {
            let (a, b, c) = (pts[f[0]], pts[f[1]], pts[f[2]]);
            (b - a).cross(c - a).dot(v - a) / 6.0
        })
        .sum();
    mesh.volume() + extra
}

/// Gradient of the area functional at `v` as seen from the cell containing
/// `v + eps d`: central differences of that cell's formula, `eps = 1e-6`
/// times the base diameter.
pub fn one_sided_gradient(base: &Configuration, v: Point3, direction: Point3) -> Result<Point3> {
    let mesh = convex_hull(base)?;
    one_sided_gradient_on(&mesh, v, direction)
}

fn one_sided_gradient_on(mesh: &HullMesh, v: Point3, direction: Point3) -> Result<Point3> {
    let d = direction
        .normalized()
        .ok_or_else(|| Error::InvalidArgument("approach direction must be nonzero".into()))?;
    let diam = crate::hull3d::diameter(mesh.vertices()).0;
    let eps = FD_REL * diam;
    let visible = visible_faces(mesh, v + d * eps);
    if visible.iter().all(|&s| !s) {
        return Err(Error::InvalidArgument("approach direction leads into the base hull".into()));
    }
    let f = |p: Point3| cell_area(mesh, &visible, p);
    let axis = |e: Point3| (f(v + e * eps) - f(v - e * eps)) / (2.0 * eps);
    Ok(Point3::new(axis(Point3::new(1.0, 0.0, 0.0)), axis(Point3::new(0.0, 1.0, 0.0)), axis(Point3::new(0.0, 0.0, 1.0))))
}

/// Approach directions used to visit the cells around a point: the 26
/// lattice directions, tilted slightly so they avoid the face planes.
fn approach_directions() -> Vec<Point3> {
    let tilt = Point3::new(0.0131, 0.0071, 0.0113);
    let mut dirs = Vec::with_capacity(26);
    for i in -1..=1 {
        for j in -1..=1 {
            for k in -1..=1 {
                if (i, j, k) != (0, 0, 0) {
                    let d = Point3::new(i as f64, j as f64, k as f64).normalized().expect("nonzero");
                    dirs.push((d + tilt).normalized().expect("nonzero"));
                }
            }
        }
    }
    dirs
}

/// Distinct one-sided unit normals of the area level set at `v`, one per
/// adjacent cell, and their largest pairwise angle.
pub fn adjacent_normals(mesh: &HullMesh, v: Point3) -> (Vec<Point3>, f64) {
    let diam = crate::hull3d::diameter(mesh.vertices()).0;
    let mut seen: Vec<Vec<bool>> = Vec::new();
    let mut normals: Vec<Point3> = Vec::new();
    for d in approach_directions() {
        let vis = visible_faces(mesh, v + d * (FD_REL * diam));
        if vis.iter().all(|&s| !s) || seen.contains(&vis) {
            continue;
        }
        if let Some(n) = one_sided_gradient_on(mesh, v, d).ok().and_then(|g| g.normalized()) {
            seen.push(vis);
            normals.push(n);
        }
    }
    let mut max_angle: f64 = 0.0;
    for i in 0..normals.len() {
        for j in i + 1..normals.len() {
            max_angle = max_angle.max(normals[i].angle_to(normals[j]));
        }
    }
    (normals, max_angle)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularPointReport {
    pub point: Point3,
    /// Base point indices of the edge; the ray leaves the second endpoint.
    pub edge: (usize, usize),
    pub normals: Vec<Point3>,
    pub max_normal_angle: f64,
}

/// Smallest `t >= 0` with `f(t) >= level` for a nondecreasing `f`, or
/// `None` if none is found within `max_t`.
fn ray_crossing(f: impl Fn(f64) -> f64, level: f64, t0: f64, max_t: f64) -> Option<f64> {
    let (mut lo, mut hi) = (0.0, t0);
    while f(hi) < level {
        lo = hi;
        hi *= 2.0;
        if hi > max_t {
            return None;
        }
    }
    while hi - lo > RAY_TOL * hi {
        let m = 0.5 * (lo + hi);
        if f(m) < level {
            lo = m;
        } else {
            hi = m;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Points of the area level set `h` on the prolongations of the hull edges,
/// at most two per edge.
pub fn singular_candidates(base: &Configuration, h: f64) -> Result<Vec<SingularPointReport>> {
    let probe = SurfaceProbe::new(base.clone(), Functional::Area, h)?;
    let mesh = probe.mesh();
    let diam = crate::hull3d::diameter(mesh.vertices()).0;
    let src = mesh.source_indices();
    let pts = mesh.vertices();
    let mut out = Vec::new();
    for e in mesh.edges() {
        for (a, b) in [(e[0], e[1]), (e[1], e[0])] {
            let u = (pts[b] - pts[a]).normalized().expect("edge has positive length");
            let f = |t: f64| probe.eval(pts[b] + u * t);
            let Some(t) = ray_crossing(f, h, 1e-3 * diam, 1e12 * diam) else { continue };
            let point = pts[b] + u * t;
            let (normals, max_normal_angle) = adjacent_normals(mesh, point);
            out.push(SingularPointReport { point, edge: (src[a], src[b]), normals, max_normal_angle });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexityReport {
    pub trials: usize,
    pub violations: usize,
    /// Pairs for which strict inequality was required.
    pub strict_checked: usize,
    /// Largest `F(mid) - (F(u) + F(w)) / 2` seen, relative to the level.
    pub max_excess: f64,
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

/// Radius around the base centroid that contains the level set.
fn level_radius(probe: &SurfaceProbe) -> f64 {
    let c = probe.mesh().centroid();
    let diam = crate::hull3d::diameter(probe.mesh().vertices()).0;
    let far = approach_directions()
        .into_iter()
        .filter_map(|d| ray_crossing(|t| probe.eval(c + d * t), probe.level(), 1e-3 * diam, 1e12 * diam))
        .fold(0.0, f64::max);
    1.5 * far
}

fn sample_inside<R: Rng>(probe: &SurfaceProbe, center: Point3, radius: f64, rng: &mut R) -> Option<(Point3, f64)> {
    for _ in 0..10_000 {
        let p = center + random_in_ball(rng, radius);
        let f = probe.eval(p);
        if f <= probe.level() {
            return Some((p, f));
        }
    }
    None
}

/// Midpoint-convexity test of the probe's functional on random pairs from
/// its sublevel set. For the area functional the inequality must be strict
/// (margin `1e-12` of the level) unless both points lie in the base hull.
pub fn convexity_sample(probe: &SurfaceProbe, trials: usize, seed: u64) -> ConvexityReport {
    let center = probe.mesh().centroid();
    let radius = level_radius(probe);
    let margin = 1e-12 * probe.level();
    let base_value = probe.eval(center);
    let outcomes: Vec<(bool, bool, f64)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t);
            let (Some((u, fu)), Some((w, fw))) =
                (sample_inside(probe, center, radius, &mut rng), sample_inside(probe, center, radius, &mut rng))
            else {
                return (true, false, f64::INFINITY);
            };
            let fm = probe.eval(u.lerp(w, 0.5));
            let excess = fm - 0.5 * (fu + fw);
            let interior = |f: f64| f <= base_value;
            let strict = probe.functional() == Functional::Area && u != w && !(interior(fu) && interior(fw));
            let bad = if strict { excess > -margin } else { excess > margin };
            (bad, strict, excess / probe.level())
        })
        .collect();
    ConvexityReport {
        trials,
        violations: outcomes.iter().filter(|o| o.0).count(),
        strict_checked: outcomes.iter().filter(|o| o.1).count(),
        max_excess: outcomes.iter().map(|o| o.2).fold(f64::NEG_INFINITY, f64::max),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContainmentReport {
    pub trials: usize,
    pub violations: usize,
    pub area_level: f64,
    pub volume_level: f64,
}

/// Samples the area sublevel set at `area_level` and counts points whose
/// volume exceeds `volume_level` (beyond a `1e-12` relative margin).
pub fn level_set_containment(base: &Configuration, area_level: f64, volume_level: f64, trials: usize, seed: u64) -> Result<ContainmentReport> {
    let probe = SurfaceProbe::new(base.clone(), Functional::Area, area_level)?;
    let center = probe.mesh().centroid();
    let radius = level_radius(&probe);
    let violations = (0..trials)
        .into_par_iter()
        .filter(|&t| {
            let mut rng = trial_rng(seed, t);
            match sample_inside(&probe, center, radius, &mut rng) {
                Some((p, _)) => eval_on(probe.mesh(), Functional::Volume, p) > volume_level * (1.0 + 1e-12),
                None => true,
            }
        })
        .count();
    Ok(ContainmentReport { trials, violations, area_level, volume_level })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RigidityReport {
    /// Indices of the vertices that were perturbed and re-optimized.
    pub free: Vec<usize>,
    pub radius: f64,
    pub trials: usize,
    /// Largest distance between a re-optimized and the original position.
    pub max_return_distance: f64,
    /// Smallest `Q(trial) - Q(original)`.
    pub min_quality_gap: f64,
    pub rigid: bool,
}

/// Perturbs the vertices in `free` within `radius`, re-optimizes the quality
/// over those vertices with the rest fixed, and checks that every trial
/// returns within `1e-6` of the diameter without finding a quality lower by
/// more than `1e-10`.
pub fn rigidity_probe_set(config: &Configuration, free: &[usize], radius: f64, trials: usize, seed: u64) -> Result<RigidityReport> {
    let n = config.len();
    if free.is_empty() || free.iter().any(|&i| i >= n) {
        return Err(Error::InvalidArgument(format!("free vertices {free:?} out of range for {n} points")));
    }
    if !(radius > 0.0) {
        return Err(Error::InvalidArgument(format!("radius {radius} must be positive")));
    }
    let mesh = convex_hull(config)?;
    if mesh.vertices().len() != n {
        return Err(Error::DegenerateInput("every point must be a hull vertex".into()));
    }
    let q0 = mesh.quality();
    let diam = config.diameter().0;
    let original = config.points().to_vec();
    let objective = |x: &[f64]| -> f64 {
        let mut pts = original.clone();
        for (k, &i) in free.iter().enumerate() {
            pts[i] = Point3::new(x[3 * k], x[3 * k + 1], x[3 * k + 2]);
        }
        match hull_of_points(&pts) {
            Ok(m) if m.vertices().len() == n => m.quality(),
            _ => f64::INFINITY,
        }
    };
    let opts = MinimizeOptions { grad_tol: 1e-12, fd_step: 1e-6, max_iter: 1000 };
    let results: Vec<(f64, f64)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t);
            // Perturbations that drop a vertex are redrawn.
            let x0 = loop {
                let x: Vec<f64> = free
                    .iter()
                    .flat_map(|&i| (original[i] + random_in_ball(&mut rng, radius)).to_array())
                    .collect();
                if objective(&x).is_finite() {
                    break x;
                }
            };
            let m = bfgs(objective, &x0, opts);
            let dist = free
                .iter()
                .enumerate()
                .map(|(k, &i)| Point3::new(m.x[3 * k], m.x[3 * k + 1], m.x[3 * k + 2]).distance(original[i]))
                .fold(0.0, f64::max);
            (dist, m.value - q0)
        })
        .collect();
    let max_return_distance = results.iter().map(|r| r.0).fold(0.0, f64::max);
    let min_quality_gap = results.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    Ok(RigidityReport {
        free: free.to_vec(),
        radius,
        trials,
        max_return_distance,
        min_quality_gap,
        rigid: max_return_distance <= 1e-6 * diam && min_quality_gap >= -1e-10,
    })
}

/// Single-vertex rigidity: only `vertex` moves.
pub fn rigidity_probe(config: &Configuration, vertex: usize, radius: f64, trials: usize, seed: u64) -> Result<RigidityReport> {
    rigidity_probe_set(config, &[vertex], radius, trials, seed)
}

/// All vertices except three move; the fixed three remove the similitude
/// gauge.
pub fn rigidity_probe_all_but_gauge(config: &Configuration, radius: f64, trials: usize, seed: u64) -> Result<RigidityReport> {
    let n = config.len();
    let free: Vec<usize> = (3..n).collect();
    rigidity_probe_set(config, &free, radius, trials, seed)
}
