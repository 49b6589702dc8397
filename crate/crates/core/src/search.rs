//! Randomized search for minimum n-hedra.
//!
//! Each restart samples points on the unit sphere until the hull has a
//! valency vector of small variance, then descends with random local moves
//! that keep the valency vector fixed, interleaved with contractions along
//! the diameter direction, and finally polishes with a quasi-Newton method.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{centroid, random_unit, Point3};
use crate::hull3d::{hull_of_points, Configuration, HullMesh, ValencyVector};
use crate::optim::{bfgs, MinimizeOptions};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchParams {
    pub n: usize,
    pub restarts: usize,
    pub iterations: usize,
    pub seed: u64,
    /// Largest acceptable valency variance of the starting hull.
    pub variance_max: f64,
    /// Samples drawn per restart while looking for a low-variance hull.
    pub retry_cap: usize,
    pub squeeze_factor: f64,
    /// Local steps between two diameter squeezes.
    pub squeeze_every: usize,
    pub step_initial: f64,
    pub step_final: f64,
    pub polish_tol: f64,
}

impl SearchParams {
    pub fn new(n: usize) -> Self {
        SearchParams {
            n,
            restarts: 8,
            iterations: 2000,
            seed: 0,
            variance_max: 0.5,
            retry_cap: 200,
            squeeze_factor: 0.98,
            squeeze_every: 50,
            step_initial: 0.1,
            step_final: 1e-6,
            polish_tol: 1e-12,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.n < 4 {
            return bad(format!("n must be at least 4, got {}", self.n));
        }
        if self.restarts == 0 || self.retry_cap == 0 || self.squeeze_every == 0 {
            return bad("restarts, retry cap and squeeze interval must be positive".into());
        }
        if !(self.squeeze_factor > 0.9 && self.squeeze_factor < 1.0) {
            return bad(format!("squeeze factor {} is outside (0.9, 1)", self.squeeze_factor));
        }
        if !(self.step_initial > 0.0 && self.step_final > 0.0 && self.step_final <= self.step_initial) {
            return bad("steps must satisfy 0 < final <= initial".into());
        }
        if !(self.polish_tol > 0.0) || !(self.variance_max >= 0.0) {
            return bad("polish tolerance must be positive and variance bound non-negative".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub configuration: Configuration,
    pub quality: f64,
    pub valency: ValencyVector,
    /// `(iteration, quality)` samples of the winning restart.
    pub trace: Vec<(usize, f64)>,
    pub seed: u64,
    pub restart: usize,
    /// The hull has exactly `n` vertices and only triangular faces.
    pub converged: bool,
    pub wall_time_secs: f64,
}

/// `n` independent uniform points on the unit sphere, resampled until the
/// hull is non-degenerate.
pub fn random_configuration<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Configuration> {
    if n < 4 {
        return Err(Error::InvalidArgument(format!("n must be at least 4, got {n}")));
    }
    loop {
        let pts: Vec<Point3> = (0..n).map(|_| random_unit(rng)).collect();
        if let Ok(c) = Configuration::new(pts) {
            if hull_of_points(c.points()).is_ok() {
                return Ok(c);
            }
        }
    }
}

pub fn valency_variance(v: &ValencyVector) -> f64 {
    v.variance()
}

/// Which vertices a local step moves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    Vertex(usize),
    Edge(usize, usize),
    Face(usize, usize, usize),
    /// A vertex, edge or face chosen at random.
    Random,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StepOutcome {
    Accepted { configuration: Configuration, quality: f64 },
    Rejected,
}

/// Hull summary used to compare states.
#[derive(Debug, Clone)]
struct State {
    points: Vec<Point3>,
    quality: f64,
    valency: ValencyVector,
    mesh: HullMesh,
}

impl State {
    fn new(points: Vec<Point3>) -> Option<State> {
        let mesh = hull_of_points(&points).ok()?;
        if mesh.vertices().len() != points.len() {
            return None;
        }
        let quality = mesh.quality();
        quality.is_finite().then(|| State { valency: mesh.valency_vector(), points, quality, mesh })
    }

    /// Replaces `self` by `points` if the hull keeps all vertices and the
    /// valency vector while lowering the quality.
    fn try_replace(&mut self, points: Vec<Point3>) -> bool {
        match State::new(points) {
            Some(s) if s.valency == self.valency && s.quality < self.quality => {
                *self = s;
                true
            }
            _ => false,
        }
    }

    /// Point indices (in configuration order) moved by `scope`.
    fn resolve<R: Rng + ?Sized>(&self, scope: Scope, rng: &mut R) -> Vec<usize> {
        let src = self.mesh.source_indices();
        match scope {
            Scope::Vertex(i) => vec![i],
            Scope::Edge(i, j) => vec![i, j],
            Scope::Face(i, j, k) => vec![i, j, k],
            Scope::Random => {
                let r: f64 = rng.gen();
                if r < 0.7 {
                    vec![rng.gen_range(0..self.points.len())]
                } else if r < 0.9 {
                    let e = self.mesh.edges().choose(rng).expect("hull has edges");
                    vec![src[e[0]], src[e[1]]]
                } else {
                    let f = self.mesh.faces().choose(rng).expect("hull has faces");
                    vec![src[f[0]], src[f[1]], src[f[2]]]
                }
            }
        }
    }

    fn random_step<R: Rng + ?Sized>(&mut self, scope: Scope, rng: &mut R, step: f64) -> bool {
        let idx = self.resolve(scope, rng);
        let mut pts = self.points.clone();
        for &i in &idx {
            pts[i] += random_unit(rng) * step;
        }
        self.try_replace(pts)
    }

    fn squeeze(&mut self, factor: f64) -> bool {
        self.try_replace(squeezed(&self.points, factor))
    }

    /// Moves the centroid to the origin and scales to unit volume.
    fn normalize(&mut self) {
        let c = centroid(&self.points);
        let s = self.mesh.volume().cbrt().recip();
        let pts = self.points.iter().map(|&p| (p - c) * s).collect();
        if let Some(st) = State::new(pts) {
            *self = st;
        }
    }
}

fn scope_indices_valid(scope: Scope, n: usize) -> bool {
    match scope {
        Scope::Vertex(i) => i < n,
        Scope::Edge(i, j) => i < n && j < n,
        Scope::Face(i, j, k) => i < n && j < n && k < n,
        Scope::Random => true,
    }
}

/// Moves the vertices selected by `scope` in random directions by `step`.
/// The move is rejected unless every point stays a hull vertex, the valency
/// vector is unchanged and the quality decreases.
pub fn local_step<R: Rng + ?Sized>(config: &Configuration, scope: Scope, rng: &mut R, step: f64) -> StepOutcome {
    let Some(mut state) = State::new(config.points().to_vec()) else {
        return StepOutcome::Rejected;
    };
    if !scope_indices_valid(scope, config.len()) {
        return StepOutcome::Rejected;
    }
    if state.random_step(scope, rng, step) {
        accepted(config, state)
    } else {
        StepOutcome::Rejected
    }
}

/// Like [`local_step`] with explicit displacements `(index, delta)`.
pub fn try_move(config: &Configuration, moves: &[(usize, Point3)]) -> StepOutcome {
    let Some(mut state) = State::new(config.points().to_vec()) else {
        return StepOutcome::Rejected;
    };
    let mut pts = state.points.clone();
    for &(i, d) in moves {
        if i >= pts.len() {
            return StepOutcome::Rejected;
        }
        pts[i] += d;
    }
    if state.try_replace(pts) {
        accepted(config, state)
    } else {
        StepOutcome::Rejected
    }
}

fn accepted(config: &Configuration, state: State) -> StepOutcome {
    match relabel(state.points, config) {
        Some(configuration) => StepOutcome::Accepted { configuration, quality: state.quality },
        None => StepOutcome::Rejected,
    }
}

fn relabel(points: Vec<Point3>, like: &Configuration) -> Option<Configuration> {
    let c = Configuration::new(points).ok()?;
    Some(match like.label() {
        Some(l) => c.with_label(l),
        None => c,
    })
}

fn squeezed(points: &[Point3], factor: f64) -> Vec<Point3> {
    let (d, (i, j)) = crate::hull3d::diameter(points);
    let u = (points[i] - points[j]) * (1.0 / d);
    let c = centroid(points);
    points.iter().map(|&p| p - u * ((1.0 - factor) * (p - c).dot(u))).collect()
}

/// Contracts the configuration by `factor` along its diameter direction,
/// fixing the orthogonal plane through the centroid. Returns the input
/// unchanged unless the quality decreases.
pub fn diameter_squeeze(config: &Configuration, factor: f64) -> Result<Configuration> {
    if !(factor > 0.0 && factor <= 1.0) {
        return Err(Error::InvalidArgument(format!("squeeze factor {factor} is outside (0, 1]")));
    }
    if factor == 1.0 {
        return Ok(config.clone());
    }
    let before = hull_of_points(config.points())?.quality();
    let pts = squeezed(config.points(), factor);
    let after = hull_of_points(&pts).map(|m| m.quality()).unwrap_or(f64::INFINITY);
    if after < before {
        if let Some(c) = relabel(pts, config) {
            return Ok(c);
        }
    }
    Ok(config.clone())
}

/// Minimizes the quality over all coordinates while keeping every point a
/// vertex and the valency vector fixed. The result has its centroid at the
/// origin and unit volume.
pub fn polish(config: &Configuration, tol: f64) -> Result<Configuration> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance {tol} must be positive")));
    }
    let mut state = State::new(config.points().to_vec()).ok_or_else(|| {
        Error::DegenerateInput("every point must be a hull vertex before polishing".into())
    })?;
    state = polish_state(state, tol);
    relabel(state.points, config).ok_or_else(|| Error::DegenerateInput("polish collapsed points".into()))
}

fn flatten(points: &[Point3]) -> Vec<f64> {
    points.iter().flat_map(|p| p.to_array()).collect()
}

fn unflatten(x: &[f64]) -> Vec<Point3> {
    x.chunks_exact(3).map(|c| Point3::new(c[0], c[1], c[2])).collect()
}

fn polish_state(mut state: State, tol: f64) -> State {
    state.normalize();
    let valency = state.valency.clone();
    let n = state.points.len();
    let objective = |x: &[f64]| -> f64 {
        match hull_of_points(&unflatten(x)) {
            Ok(m) if m.vertices().len() == n && m.valency_vector() == valency => m.quality(),
            _ => f64::INFINITY,
        }
    };
    let opts = MinimizeOptions { grad_tol: tol, fd_step: 1e-7, max_iter: 400 };
    for _ in 0..8 {
        let m = bfgs(objective, &flatten(&state.points), opts);
        let gain = state.quality - m.value;
        let improved = gain > 0.0 && state.try_replace(unflatten(&m.x));
        if !improved {
            break;
        }
        state.normalize();
        if m.converged || gain < tol {
            break;
        }
    }
    state
}

fn restart_rng(seed: u64, restart: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    rng
}

struct RestartOutcome {
    state: State,
    trace: Vec<(usize, f64)>,
}

fn run_restart(params: &SearchParams, restart: usize) -> RestartOutcome {
    let mut rng = restart_rng(params.seed, restart);
    let n = params.n;

    // Low-variance starting hull.
    let mut best: Option<State> = None;
    for _ in 0..params.retry_cap {
        let pts: Vec<Point3> = (0..n).map(|_| random_unit(&mut rng)).collect();
        let Some(s) = State::new(pts) else { continue };
        let better = best.as_ref().is_none_or(|b| s.valency.variance() < b.valency.variance());
        if better {
            let done = s.valency.variance() <= params.variance_max;
            best = Some(s);
            if done {
                break;
            }
        }
    }
    let mut state = match best {
        Some(s) => s,
        None => loop {
            let c = random_configuration(n, &mut rng).expect("n >= 4");
            if let Some(s) = State::new(c.into_points()) {
                break s;
            }
        },
    };
    state.normalize();

    let mut trace = vec![(0, state.quality)];
    let ratio = params.step_final / params.step_initial;
    let mut step = params.step_initial;
    let trace_every = (params.iterations / 100).max(1);
    for it in 1..=params.iterations {
        let cap = params.step_initial * ratio.powf(it as f64 / params.iterations as f64);
        step = step.clamp(params.step_final, cap.max(params.step_final));
        if state.random_step(Scope::Random, &mut rng, step) {
            step *= 1.5;
        } else {
            step *= 0.5;
        }
        if it % params.squeeze_every == 0 {
            state.squeeze(params.squeeze_factor);
            state.normalize();
        }
        if it % trace_every == 0 {
            trace.push((it, state.quality));
        }
    }
    let state = polish_state(state, params.polish_tol);
    trace.push((params.iterations + 1, state.quality));
    RestartOutcome { state, trace }
}

/// Best-of-restarts search. Restarts run in parallel on private RNG streams
/// derived from `(seed, restart)`; ties go to the lowest restart index.
pub fn search(params: &SearchParams) -> Result<SearchResult> {
    params.validate()?;
    let start = Instant::now();
    let outcomes: Vec<RestartOutcome> =
        (0..params.restarts).into_par_iter().map(|r| run_restart(params, r)).collect();
    let (restart, best) = outcomes
        .into_iter()
        .enumerate()
        .reduce(|a, b| if b.1.state.quality < a.1.state.quality { b } else { a })
        .expect("at least one restart");
    let converged =
        best.state.mesh.vertices().len() == params.n && best.state.mesh.all_faces_triangular();
    let configuration = Configuration::new(best.state.points)?.with_label(format!("search-n{}", params.n));
    let result = SearchResult {
        configuration,
        quality: best.state.quality,
        valency: best.state.valency,
        trace: best.trace,
        seed: params.seed,
        restart,
        converged,
        wall_time_secs: start.elapsed().as_secs_f64(),
    };
    if converged {
        Ok(result)
    } else {
        Err(Error::BudgetExhausted(Box::new(result)))
    }
}
