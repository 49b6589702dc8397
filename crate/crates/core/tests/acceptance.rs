//! Acceptance suite. Prints one PASS/FAIL line per criterion with the
//! measured values and runtime, and exits non-zero if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use polymin::convexitylab::{
    convexity_sample, example_singular_base, one_sided_gradient, rigidity_probe, singular_candidates, Functional,
    SurfaceProbe,
};
use polymin::families::{certify_eta, family_quality, instantiate, ShapeFamily};
use polymin::functionals::{
    alpha4, alpha5, apex_refine, ball_limit, bipyramid_mesh, bipyramid_quality, eta6, eta12, optimize_apex_height,
};
use polymin::geometry::{random_in_ball, random_unit, Point3};
use polymin::hull3d::{convex_hull, diameter, orthogonal_project, Configuration};
use polymin::poly::{published, verify_minpoly};
use polymin::search::{search, SearchParams, SearchResult};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Seeds of the sweep, fixed in advance.
const SWEEP_SEEDS: [u64; 8] = [1, 2, 3, 4, 5, 6, 7, 8];

struct Outcome {
    pass: bool,
    detail: String,
}

fn run(id: usize, name: &str, limit: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let t = Instant::now();
    let out = f();
    let elapsed = t.elapsed();
    let in_time = elapsed < limit;
    let pass = out.pass && in_time;
    println!(
        "[{}] criterion {id}: {name} ({:.2}s, limit {}s{}) {}",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        limit.as_secs(),
        if in_time { "" } else { ", over time" },
        out.detail
    );
    pass
}

fn closed_form_constants() -> Outcome {
    let cases = [
        (ShapeFamily::Tetra, 7.20562, alpha4()),
        (ShapeFamily::Bipyramid3, 6.24025, alpha5()),
        (ShapeFamily::Octahedron, 5.71911, eta6()),
        (ShapeFamily::Icosahedron, 5.14835, eta12()),
    ];
    let mut pass = true;
    let mut detail = Vec::new();
    for (f, reference, exact) in cases {
        let q = convex_hull(&instantiate(f, &f.default_params()).unwrap()).unwrap().quality();
        pass &= (q - reference).abs() <= 1e-5 && (q - exact).abs() <= 1e-12;
        detail.push(format!("{}={q:.12} (|d exact|={:.1e})", f.name(), (q - exact).abs()));
    }
    Outcome { pass, detail: detail.join(", ") }
}

fn bipyramid_law() -> Outcome {
    let mut worst_rel: f64 = 0.0;
    let mut worst_apex: f64 = 0.0;
    for k in 3..=10 {
        let q = bipyramid_quality(k).unwrap();
        for h in [0.5, 1.0, 2.0] {
            let m = convex_hull(&bipyramid_mesh(k, h).unwrap()).unwrap();
            worst_rel = worst_rel.max((m.quality() - q).abs() / q);
            let apex = optimize_apex_height(k, h).unwrap();
            worst_apex = worst_apex.max((apex - 2f64.sqrt() * h).abs());
        }
    }
    Outcome {
        pass: worst_rel <= 1e-10 && worst_apex <= 1e-9,
        detail: format!("max rel error {worst_rel:.1e} (<= 1e-10), max |H - sqrt2 h| {worst_apex:.1e} (<= 1e-9)"),
    }
}

fn search_reproduction(results: &mut Vec<(usize, SearchResult)>) -> Outcome {
    let targets = [
        (6, 5.71911),
        (7, 5.53841),
        (8, 5.42118),
        (9, 5.31637),
        (10, 5.2533),
        (11, 5.20713),
        (12, 5.14835),
    ];
    let mut pass = true;
    let mut detail = Vec::new();
    for n in 4..=12 {
        let mut best: Option<SearchResult> = None;
        let mut per_seed = Vec::new();
        for seed in SWEEP_SEEDS {
            let mut p = SearchParams::new(n);
            p.restarts = 20;
            p.iterations = 5000;
            p.seed = seed;
            let r = match search(&p) {
                Ok(r) => r,
                Err(polymin::Error::BudgetExhausted(r)) => *r,
                Err(e) => return Outcome { pass: false, detail: format!("n={n} seed {seed}: {e}") },
            };
            per_seed.push(r.quality);
            if best.as_ref().is_none_or(|b| r.quality < b.quality) {
                best = Some(r);
            }
        }
        let r = best.unwrap();
        if let Some(&(_, target)) = targets.iter().find(|t| t.0 == n) {
            let d = (r.quality - target).abs();
            pass &= d <= 1e-3;
            let hits = per_seed.iter().filter(|q| (*q - target).abs() <= 1e-3).count();
            detail.push(format!("n={n} Q={:.6} (d={d:.1e}, seeds hitting {hits}/{})", r.quality, per_seed.len()));
        }
        results.push((n, r));
    }
    Outcome {
        pass,
        detail: format!("seeds {SWEEP_SEEDS:?} x 20 restarts x 5000 iterations: {}", detail.join(", ")),
    }
}

fn certification() -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    for n in 8..=10 {
        match certify_eta(n, 1e-3) {
            Ok(c) => {
                let ok = c.q6_certificate.sign_lo * c.q6_certificate.sign_hi < 0
                    && c.q6_certificate.recheck(&published(&c.q6_certificate.polynomial).unwrap());
                pass &= ok;
                detail.push(format!(
                    "n={n} Q^6 in [{:.9}, {:.9}]",
                    c.q6_certificate.lo_approx, c.q6_certificate.hi_approx
                ));
                if n == 8 {
                    let params: Vec<String> = c
                        .parameter_certificates
                        .iter()
                        .map(|p| format!("{} width {:.1e}", p.polynomial, p.width))
                        .collect();
                    pass &= c.parameter_certificates.len() == 3
                        && c.parameter_certificates.iter().all(|p| p.width <= 1e-3 && p.sign_lo * p.sign_hi < 0);
                    detail.push(params.join(", "));
                }
            }
            Err(e) => {
                pass = false;
                detail.push(format!("n={n}: {e}"));
            }
        }
    }
    // Independently of the optimizer, the reference parameter values bracket roots.
    pass &= verify_minpoly("n8_w", &published("n8_w").unwrap(), 2.0428, 1e-3).is_ok();
    Outcome { pass, detail: detail.join("; ") }
}

fn structural(results: &[(usize, SearchResult)]) -> Outcome {
    let non_triangular = results.iter().filter(|(_, r)| {
        let m = convex_hull(&r.configuration).unwrap();
        !(m.all_faces_triangular() && m.vertices().len() == r.configuration.len())
    });
    let exceptions = non_triangular.count();
    let qs: Vec<f64> = results.iter().map(|r| r.1.quality).collect();
    let decreasing = qs.windows(2).all(|w| w[1] < w[0]);
    let above = qs.iter().all(|&q| q > ball_limit());

    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut violations = 0;
    for t in 0..1000 {
        let n = 4 + t % 9;
        let c = Configuration::new((0..n).map(|_| random_in_ball(&mut rng, 1.0)).collect()).unwrap();
        let m = convex_hull(&c).unwrap();
        let (r, (i, j)) = diameter(c.points());
        let g = orthogonal_project(c.points(), c.points()[i] - c.points()[j]).unwrap();
        if m.volume() > g.area() * r * (1.0 + 1e-12) || m.surface_area() < 0.5 * g.perimeter() * r * (1.0 - 1e-12) {
            violations += 1;
        }
    }
    Outcome {
        pass: exceptions == 0 && decreasing && above && violations == 0 && results.len() == 9,
        detail: format!(
            "non-triangular outputs {exceptions}/{}, strictly decreasing {decreasing}, all > {:.5} {above}, projection bound violations {violations}/1000",
            results.len(),
            ball_limit()
        ),
    }
}

fn singularity() -> Outcome {
    let base = example_singular_base();
    let v = Point3::new(0.0, 2.0, 0.0);
    // The example's patch equations carry twice the area; their level 8 is area 4.
    let level = 4.0;
    let c = singular_candidates(&base, level).unwrap();
    let hit = c.iter().map(|r| r.point.distance(v)).fold(f64::INFINITY, f64::min);
    let g1 = one_sided_gradient(&base, v, Point3::new(1.0, 1.0, 1.0)).unwrap();
    let g2 = one_sided_gradient(&base, v, Point3::new(-1.0, 1.0, -1.0)).unwrap();
    let (a1, a2) = (g1.angle_to(Point3::new(1.0, 5.0, 1.0)), g2.angle_to(Point3::new(-1.0, 10.0, -1.0)));
    Outcome {
        pass: hit <= 1e-6 && a1 <= 1e-4 && a2 <= 1e-4,
        detail: format!(
            "{} candidates, nearest to (0,2,0) at {hit:.1e}; angles to (1,5,1): {a1:.1e}, to (-1,10,-1): {a2:.1e} rad",
            c.len()
        ),
    }
}

fn convexity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(91);
    let mut probes = vec![SurfaceProbe::new(example_singular_base(), Functional::Area, 4.0).unwrap()];
    for n in [5, 8, 11] {
        let base = Configuration::new((0..n).map(|_| random_unit(&mut rng)).collect()).unwrap();
        let a = convex_hull(&base).unwrap().surface_area();
        probes.push(SurfaceProbe::new(base, Functional::Area, 1.3 * a).unwrap());
    }
    let reports: Vec<_> = probes.iter().enumerate().map(|(i, p)| convexity_sample(p, 10_000, i as u64)).collect();
    let violations: usize = reports.iter().map(|r| r.violations).sum();
    Outcome {
        pass: violations == 0,
        detail: format!(
            "{} bases x 10000 samples, violations {violations}, strict checks {}",
            reports.len(),
            reports.iter().map(|r| r.strict_checked).sum::<usize>()
        ),
    }
}

fn rigidity(results: &[(usize, SearchResult)]) -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    for n in [8, 4] {
        let Some((_, r)) = results.iter().find(|r| r.0 == n) else {
            return Outcome { pass: false, detail: format!("no n={n} search result") };
        };
        let mut worst: f64 = 0.0;
        for v in 0..n {
            let rep = rigidity_probe(&r.configuration, v, 0.05, 50, v as u64).unwrap();
            pass &= rep.rigid;
            worst = worst.max(rep.max_return_distance / r.configuration.diameter().0);
        }
        detail.push(format!("n={n}: all {n} vertices x 50 trials, max return distance {worst:.1e} x diameter"));
    }
    Outcome { pass, detail: detail.join("; ") }
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    let mut worst: f64 = 0.0;
    for t in 0..200 {
        let n = 4 + t % 7;
        let c = Configuration::new((0..n).map(|_| random_in_ball(&mut rng, 1.0)).collect()).unwrap();
        let m = convex_hull(&c).unwrap();
        let b = common::Brute::new(c.points());
        let inside = c.points().iter().fold(Point3::ORIGIN, |s, &p| s + p) / n as f64;
        worst = worst.max((m.surface_area() - b.area()).abs() / b.area());
        worst = worst.max((m.volume() - b.volume(inside)).abs() / b.volume(inside));
    }
    let mut worst_refine: f64 = 0.0;
    let mut refinements = 0;
    for t in 0..50 {
        let pts: Vec<Point3> = (0..4 + t % 8).map(|_| random_unit(&mut rng)).collect();
        let mesh = convex_hull(&Configuration::new(pts).unwrap()).unwrap();
        for g in 0..mesh.merged_face_count() {
            let Ok(r) = apex_refine(&mesh, g, 1e-3) else { continue };
            let m2 = convex_hull(&r.configuration).unwrap();
            worst_refine = worst_refine.max((m2.volume() - r.predicted_volume).abs() / m2.volume());
            worst_refine = worst_refine.max((m2.surface_area() - r.predicted_area).abs() / m2.surface_area());
            refinements += 1;
        }
    }
    Outcome {
        pass: worst <= 1e-9 && worst_refine <= 1e-10 && refinements > 0,
        detail: format!(
            "hull vs facet enumeration max rel {worst:.1e} (<= 1e-9); {refinements} refinements max rel {worst_refine:.1e} (<= 1e-10)"
        ),
    }
}

fn main() {
    let secs = Duration::from_secs;
    let mut results = Vec::new();
    let mut all = true;
    all &= run(1, "closed-form constants", secs(1), closed_form_constants);
    all &= run(2, "bi-pyramid law", secs(5), bipyramid_law);
    all &= run(3, "search reproduction", secs(600), || search_reproduction(&mut results));
    all &= run(4, "certification", secs(30), certification);
    all &= run(5, "structural checks", secs(60), || structural(&results));
    all &= run(6, "singularity probe", secs(10), singularity);
    all &= run(7, "convexity probe", secs(30), convexity);
    all &= run(8, "rigidity probe", secs(120), || rigidity(&results));
    all &= run(9, "oracle equivalence", secs(60), oracle_equivalence);
    // Sanity line tying the family closed forms to the reference values.
    let n8 = family_quality(ShapeFamily::N8, &ShapeFamily::N8.default_params()).unwrap();
    println!("info: n8 closed form at reference parameters {n8:.6}");
    if all {
        println!("acceptance: all criteria passed");
    } else {
        println!("acceptance: some criteria FAILED");
        std::process::exit(1);
    }
}
