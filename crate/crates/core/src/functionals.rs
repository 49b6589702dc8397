//! Closed-form quality values and constructions: regular bi-pyramids,
//! triangle in-centers, apex refinement of a face, and the table of named
//! constants for the minimal quality ratios.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{distance_to_line, triangle_area, Point3};
use crate::hull3d::{convex_hull, Configuration, HullMesh};
use crate::optim::slope_bisection;

/// Largest bi-pyramid order accepted by [`bipyramid_quality`] and [`bipyramid_mesh`].
pub const MAX_BIPYRAMID_K: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Exactness {
    ClosedForm,
    NumericOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedConstant {
    pub name: &'static str,
    /// Conventional symbol, e.g. `alpha_4` or `eta_8`.
    pub symbol: &'static str,
    /// Number of polyhedron vertices, absent for the limit constant.
    pub n: Option<usize>,
    pub value: f64,
    pub closed_form: Option<&'static str>,
    pub exactness: Exactness,
}

/// `(36 pi)^(1/3)`: the quality ratio of a ball, a strict lower bound for every polyhedron.
pub fn ball_limit() -> f64 {
    (36.0 * PI).cbrt()
}

pub fn alpha4() -> f64 {
    6.0 * 3f64.powf(1.0 / 6.0)
}

pub fn alpha5() -> f64 {
    3f64.powf(5.0 / 3.0)
}

pub fn eta6() -> f64 {
    3f64.powf(7.0 / 6.0) * 2f64.powf(2.0 / 3.0)
}

pub fn eta7() -> f64 {
    3f64.powf(7.0 / 6.0) * 5f64.powf(5.0 / 12.0) * (5f64.sqrt() - 2.0).powf(1.0 / 6.0)
}

pub fn eta12() -> f64 {
    3f64.powf(7.0 / 6.0) * (70.0 - 30.0 * 5f64.sqrt()).cbrt()
}

/// The constants table, ordered by `n` with the ball limit last.
pub fn constants() -> Vec<NamedConstant> {
    use Exactness::*;
    let c = |name, symbol, n, value, closed_form, exactness| NamedConstant {
        name,
        symbol,
        n,
        value,
        closed_form,
        exactness,
    };
    vec![
        c("alpha4", "alpha_4", Some(4), alpha4(), Some("6*3^(1/6)"), ClosedForm),
        c("alpha5", "alpha_5", Some(5), alpha5(), Some("3^(5/3)"), ClosedForm),
        c("eta6", "eta_6", Some(6), eta6(), Some("3^(7/6)*2^(2/3)"), ClosedForm),
        c("eta7", "eta_7", Some(7), eta7(), Some("3^(7/6)*5^(5/12)*(sqrt(5)-2)^(1/6)"), ClosedForm),
        c("eta8", "eta_8", Some(8), 5.42118, None, NumericOnly),
        c("eta9", "eta_9", Some(9), 5.31637, None, NumericOnly),
        c("eta10", "eta_10", Some(10), 5.2533, None, NumericOnly),
        c("bound11", "alpha_11 upper bound", Some(11), 5.207134373504469, None, NumericOnly),
        c("eta12", "eta_12", Some(12), eta12(), Some("3^(7/6)*(70-30*sqrt(5))^(1/3)"), ClosedForm),
        c("ball_limit", "(36 pi)^(1/3)", None, ball_limit(), Some("(36*pi)^(1/3)"), ClosedForm),
    ]
}

/// Reference value for `n` vertices, if tabulated.
pub fn reference_value(n: usize) -> Option<f64> {
    constants().into_iter().find(|c| c.n == Some(n)).map(|c| c.value)
}

pub fn constants_json() -> serde_json::Value {
    serde_json::json!({ "constants": constants() })
}

fn check_k(k: usize) -> Result<()> {
    if !(3..=MAX_BIPYRAMID_K).contains(&k) {
        return Err(Error::InvalidArgument(format!(
            "bi-pyramid order must be in 3..={MAX_BIPYRAMID_K}, got {k}"
        )));
    }
    Ok(())
}

/// Quality ratio of the optimal regular `k` bi-pyramid,
/// `(3^(7/2) k cot((k-2) pi / (2k)))^(1/3)`.
pub fn bipyramid_quality(k: usize) -> Result<f64> {
    check_k(k)?;
    let kf = k as f64;
    let angle = (kf - 2.0) * PI / (2.0 * kf);
    let cot = angle.cos() / angle.sin();
    Ok((3f64.powf(3.5) * kf * cot).cbrt())
}

/// Regular `k` bi-pyramid whose base is circumscribed about a circle of
/// radius `h` (in the plane `z = 0`), with apexes at heights `+-apex_height`.
pub fn bipyramid_with_apex(k: usize, h: f64, apex_height: f64) -> Result<Configuration> {
    check_k(k)?;
    if !(h > 0.0 && apex_height > 0.0) {
        return Err(Error::InvalidArgument("bi-pyramid sizes must be positive".into()));
    }
    let circumradius = h / (PI / k as f64).cos();
    let mut pts: Vec<Point3> = (0..k)
        .map(|i| {
            let t = 2.0 * PI * i as f64 / k as f64;
            Point3::new(circumradius * t.cos(), circumradius * t.sin(), 0.0)
        })
        .collect();
    pts.push(Point3::new(0.0, 0.0, apex_height));
    pts.push(Point3::new(0.0, 0.0, -apex_height));
    Ok(Configuration::new(pts)?.with_label(format!("bipyramid{k}")))
}

/// The optimal regular `k` bi-pyramid: in-radius `h`, apex heights `+-sqrt(2) h`.
pub fn bipyramid_mesh(k: usize, h: f64) -> Result<Configuration> {
    bipyramid_with_apex(k, h, 2f64.sqrt() * h)
}

/// Minimizes the hull quality of a `k` bi-pyramid over its apex height,
/// keeping the base (in-radius `h`) fixed.
pub fn optimize_apex_height(k: usize, h: f64) -> Result<f64> {
    check_k(k)?;
    let q = |height: f64| {
        bipyramid_with_apex(k, h, height)
            .and_then(|c| convex_hull(&c))
            .map(|m| m.quality())
            .unwrap_or(f64::INFINITY)
    };
    Ok(slope_bisection(q, 0.25 * h, 4.0 * h, 1e-4 * h, 1e-13 * h))
}

/// In-center of a triangle: the edge-length weighted barycenter.
pub fn incenter(tri: [Point3; 3]) -> Result<Point3> {
    let [a, b, c] = tri;
    let (la, lb, lc) = (b.distance(c), c.distance(a), a.distance(b));
    let longest = la.max(lb).max(lc);
    if !(triangle_area(a, b, c) > 1e-14 * longest * longest) {
        return Err(Error::DegenerateInput("collinear triangle has no in-center".into()));
    }
    Ok((a * la + b * lb + c * lc) / (la + lb + lc))
}

/// Spread `max |h_i - h_j|` of the distances from the foot of the
/// perpendicular from `apex` to the three edge lines of `base`. Zero
/// exactly when the foot is the in-center.
pub fn incenter_residual(apex: Point3, base: [Point3; 3]) -> Result<f64> {
    let [a, b, c] = base;
    let normal = (b - a)
        .cross(c - a)
        .normalized()
        .ok_or_else(|| Error::DegenerateInput("degenerate base triangle".into()))?;
    let height = normal.dot(apex - a);
    let scale = a.distance(b).max(b.distance(c)).max(c.distance(a));
    if height.abs() <= 1e-14 * scale {
        return Err(Error::DegenerateInput("apex lies in the base plane".into()));
    }
    let foot = apex - normal * height;
    let d = [
        distance_to_line(foot, b, c),
        distance_to_line(foot, c, a),
        distance_to_line(foot, a, b),
    ];
    Ok((d[0] - d[1]).abs().max((d[1] - d[2]).abs()).max((d[0] - d[2]).abs()))
}

/// Outcome of erecting a low pyramid over one merged face of a hull.
#[derive(Debug, Clone, PartialEq)]
pub struct Refinement {
    /// Hull vertices followed by the new apex.
    pub configuration: Configuration,
    pub apex: Point3,
    pub foot: Point3,
    /// The apex lies on the face itself (zero height).
    pub degenerate: bool,
    /// `V + eps * V_2(T) / 3`.
    pub predicted_volume: f64,
    /// `A - V_2(T) + 1/2 sum_i e_i sqrt(eps^2 + r_i^2)`.
    pub predicted_area: f64,
}

impl Refinement {
    pub fn predicted_quality(&self) -> f64 {
        crate::hull3d::quality_from(self.predicted_area, self.predicted_volume)
    }
}

/// Adds a point at height `epsilon` above the merged face `group`, over its
/// in-center (triangles) or vertex centroid (larger polygons).
pub fn apex_refine(mesh: &HullMesh, group: usize, epsilon: f64) -> Result<Refinement> {
    if !(epsilon >= 0.0) || !epsilon.is_finite() {
        return Err(Error::InvalidArgument(format!("refinement height must be >= 0, got {epsilon}")));
    }
    if group >= mesh.merged_face_count() {
        return Err(Error::InvalidArgument(format!("no merged face {group}")));
    }
    let cycle = mesh.group_polygon(group);
    let verts = mesh.vertices();
    let corners: Vec<Point3> = cycle.iter().map(|&v| verts[v]).collect();
    let foot = if corners.len() == 3 {
        incenter([corners[0], corners[1], corners[2]])?
    } else {
        corners.iter().fold(Point3::ORIGIN, |s, &p| s + p) / corners.len() as f64
    };
    let normal = mesh.group_normal(group);
    let apex = foot + normal * epsilon;

    if epsilon > 0.0 {
        let members = &mesh.coplanar_groups()[group];
        for f in 0..mesh.faces().len() {
            if !members.contains(&f) && mesh.face_sees(f, apex) {
                return Err(Error::EpsilonTooLarge { epsilon, face: f });
            }
        }
    }

    let face_area = mesh.group_area(group);
    let k = corners.len();
    let rim: f64 = (0..k)
        .map(|i| {
            let (p, q) = (corners[i], corners[(i + 1) % k]);
            let r = distance_to_line(foot, p, q);
            p.distance(q) * (epsilon * epsilon + r * r).sqrt()
        })
        .sum();
    let predicted_volume = mesh.volume() + epsilon * face_area / 3.0;
    let predicted_area = mesh.surface_area() - face_area + 0.5 * rim;

    let mut pts = verts.to_vec();
    pts.push(apex);
    Ok(Refinement {
        configuration: Configuration::new(pts)?,
        apex,
        foot,
        degenerate: epsilon == 0.0,
        predicted_volume,
        predicted_area,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn regular_tetra() -> Configuration {
        Configuration::new(vec![
            Point3::new(1.0, 1.0, 1.0),
            Point3::new(1.0, -1.0, -1.0),
            Point3::new(-1.0, 1.0, -1.0),
            Point3::new(-1.0, -1.0, 1.0),
        ])
        .unwrap()
    }

    #[test]
    fn bipyramid_quality_matches_named_values() {
        assert!((bipyramid_quality(3).unwrap() - 6.24025).abs() < 1e-5);
        assert!((bipyramid_quality(4).unwrap() - 5.71911).abs() < 1e-5);
        assert!((bipyramid_quality(5).unwrap() - 5.53841).abs() < 1e-5);
        assert_relative_eq!(bipyramid_quality(3).unwrap(), alpha5(), max_relative = 1e-14);
        assert_relative_eq!(bipyramid_quality(4).unwrap(), eta6(), max_relative = 1e-14);
        assert_relative_eq!(bipyramid_quality(5).unwrap(), eta7(), max_relative = 1e-14);
        assert!(bipyramid_quality(2).is_err());
        assert!(bipyramid_quality(65).is_err());
    }

    #[test]
    fn bipyramid_quality_decreases_with_k() {
        let q: Vec<f64> = (3..=12).map(|k| bipyramid_quality(k).unwrap()).collect();
        assert!(q.windows(2).all(|w| w[1] < w[0]), "{q:?}");
    }

    #[test]
    fn bipyramid_mesh_is_scale_free() {
        for k in [3, 4, 6, 9] {
            let expect = bipyramid_quality(k).unwrap();
            for h in [0.1, 1.0, 10.0] {
                let m = convex_hull(&bipyramid_mesh(k, h).unwrap()).unwrap();
                assert_eq!(m.vertices().len(), k + 2);
                assert_relative_eq!(m.quality(), expect, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn square_bipyramid_is_an_octahedron() {
        let m = convex_hull(&bipyramid_mesh(4, 1.0).unwrap()).unwrap();
        let pts = m.vertices();
        let c = m.centroid();
        let r: Vec<f64> = pts.iter().map(|p| p.distance(c)).collect();
        assert!(r.iter().all(|&x| (x - r[0]).abs() < 1e-12));
        assert_eq!(m.valency_vector().as_slice(), &[4; 6]);
    }

    #[test]
    fn apex_height_optimum() {
        for (k, h) in [(3, 1.0), (5, 0.5), (8, 2.0)] {
            let best = optimize_apex_height(k, h).unwrap();
            assert!((best - 2f64.sqrt() * h).abs() <= 1e-9, "k={k} h={h} best={best}");
        }
    }

    #[test]
    fn incenter_cases() {
        let eq = [
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(0.5, 3f64.sqrt() / 2.0, 0.0),
        ];
        let c = incenter(eq).unwrap();
        let g = (eq[0] + eq[1] + eq[2]) / 3.0;
        assert!(c.distance(g) < 1e-15);

        let right = [Point3::ORIGIN, Point3::new(1.0, 0.0, 0.0), Point3::new(0.0, 1.0, 0.0)];
        let i = incenter(right).unwrap();
        let expect = 1.0 - 2f64.sqrt() / 2.0;
        assert!((i.x - expect).abs() < 1e-15 && (i.y - expect).abs() < 1e-15 && i.z == 0.0);
        // Equidistant from all three edges.
        let d = [
            distance_to_line(i, right[1], right[2]),
            distance_to_line(i, right[2], right[0]),
            distance_to_line(i, right[0], right[1]),
        ];
        assert!((d[0] - d[1]).abs() < 1e-15 && (d[1] - d[2]).abs() < 1e-15);

        let line = [Point3::ORIGIN, Point3::new(1.0, 1.0, 1.0), Point3::new(2.0, 2.0, 2.0)];
        assert!(incenter(line).is_err());
    }

    #[test]
    fn incenter_residual_cases() {
        let base = [Point3::ORIGIN, Point3::new(3.0, 0.0, 0.0), Point3::new(0.0, 4.0, 0.0)];
        let ic = incenter(base).unwrap();
        assert!(incenter_residual(ic + Point3::new(0.0, 0.0, 2.0), base).unwrap() < 1e-12);
        assert!(incenter_residual(Point3::new(3.0, 0.0, 1.0), base).unwrap() > 0.1);
        assert!(incenter_residual(Point3::new(1.0, 1.0, 0.0), base).is_err());

        let t = regular_tetra().into_points();
        for skip in 0..4 {
            let rest: Vec<Point3> = (0..4).filter(|&i| i != skip).map(|i| t[i]).collect();
            let r = incenter_residual(t[skip], [rest[0], rest[1], rest[2]]).unwrap();
            assert!(r < 1e-12);
        }
    }

    #[test]
    fn refinement_of_tetrahedron_lowers_quality() {
        let m = convex_hull(&regular_tetra()).unwrap();
        for g in 0..4 {
            let r = apex_refine(&m, g, 0.05).unwrap();
            let q = convex_hull(&r.configuration).unwrap().quality();
            assert!(q < 7.20562, "{q}");
            assert!(q < alpha4());
        }
    }

    #[test]
    fn zero_height_refinement_is_degenerate() {
        let m = convex_hull(&regular_tetra()).unwrap();
        let r = apex_refine(&m, 0, 0.0).unwrap();
        assert!(r.degenerate);
        let hull = convex_hull(&r.configuration).unwrap();
        assert_eq!(hull.vertices().len(), 4);
        assert_relative_eq!(hull.quality(), m.quality(), max_relative = 1e-14);
        assert_relative_eq!(r.predicted_quality(), m.quality(), max_relative = 1e-14);
    }

    #[test]
    fn tall_refinement_is_rejected() {
        // Above a tetrahedron face the admissible region is an unbounded cone;
        // octahedron faces are surrounded by inward-tilted neighbours.
        let oct = convex_hull(&bipyramid_mesh(4, 1.0).unwrap()).unwrap();
        assert!(apex_refine(&oct, 0, 0.05).is_ok());
        assert!(matches!(apex_refine(&oct, 0, 50.0), Err(Error::EpsilonTooLarge { .. })));
        let m = convex_hull(&regular_tetra()).unwrap();
        assert!(apex_refine(&m, 0, -1.0).is_err());
    }

    #[test]
    fn constants_are_ordered() {
        let c = constants();
        let values: Vec<f64> = c.iter().map(|c| c.value).collect();
        assert!(values.windows(2).all(|w| w[1] < w[0]), "{values:?}");
        let limit = ball_limit();
        assert!((limit - 4.83598).abs() < 1e-5);
        assert!(c[..c.len() - 1].iter().all(|c| c.value > limit));
        assert!((eta12() - 5.14835).abs() < 1e-5);
        assert!((alpha4() - 7.20562).abs() < 1e-5);
        let json = constants_json();
        assert_eq!(json["constants"].as_array().unwrap().len(), 10);
        assert_eq!(json["constants"][4]["exactness"], "numeric-only");
    }
}
