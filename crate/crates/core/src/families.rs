//! Parametric candidate minima for n = 4..12 and certification of their
//! qualities against published minimal polynomials.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point3;
use crate::hull3d::{convex_hull, quality_from, Configuration};
use crate::optim::{bfgs, fd_gradient, MinimizeOptions};
use crate::poly::{published, verify_minpoly, RootCertificate};

/// Relative tolerance of the Q^6 certificate.
pub const Q6_REL_TOL: f64 = 1e-9;

const FD_STEP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShapeFamily {
    Tetra,
    Bipyramid3,
    Octahedron,
    Bipyramid5,
    N8,
    N9,
    N10,
    N11,
    Icosahedron,
}

pub const ALL_FAMILIES: [ShapeFamily; 9] = [
    ShapeFamily::Tetra,
    ShapeFamily::Bipyramid3,
    ShapeFamily::Octahedron,
    ShapeFamily::Bipyramid5,
    ShapeFamily::N8,
    ShapeFamily::N9,
    ShapeFamily::N10,
    ShapeFamily::N11,
    ShapeFamily::Icosahedron,
];

const SQRT2: f64 = std::f64::consts::SQRT_2;

impl ShapeFamily {
    pub fn name(self) -> &'static str {
        match self {
            ShapeFamily::Tetra => "tetra",
            ShapeFamily::Bipyramid3 => "bipyramid3",
            ShapeFamily::Octahedron => "octahedron",
            ShapeFamily::Bipyramid5 => "bipyramid5",
            ShapeFamily::N8 => "n8",
            ShapeFamily::N9 => "n9",
            ShapeFamily::N10 => "n10",
            ShapeFamily::N11 => "n11",
            ShapeFamily::Icosahedron => "icosahedron",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        ALL_FAMILIES
            .into_iter()
            .find(|f| f.name() == name)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown family {name:?}")))
    }

    /// The family whose shapes have `n` vertices.
    pub fn for_n(n: usize) -> Result<Self> {
        ALL_FAMILIES
            .into_iter()
            .find(|f| f.n() == n)
            .ok_or_else(|| Error::InvalidArgument(format!("no family with {n} vertices")))
    }

    pub fn n(self) -> usize {
        match self {
            ShapeFamily::Tetra => 4,
            ShapeFamily::Bipyramid3 => 5,
            ShapeFamily::Octahedron => 6,
            ShapeFamily::Bipyramid5 => 7,
            ShapeFamily::N8 => 8,
            ShapeFamily::N9 => 9,
            ShapeFamily::N10 => 10,
            ShapeFamily::N11 => 11,
            ShapeFamily::Icosahedron => 12,
        }
    }

    /// Parameter names with their approximate optimal values.
    pub fn parameters(self) -> &'static [(&'static str, f64)] {
        match self {
            ShapeFamily::Tetra | ShapeFamily::Icosahedron => &[],
            // Apex height over the in-radius of the base polygon.
            ShapeFamily::Bipyramid3 | ShapeFamily::Octahedron | ShapeFamily::Bipyramid5 => &[("apex", SQRT2)],
            ShapeFamily::N8 => &[("w", 2.0428), ("x", 1.53525), ("z", 0.476614)],
            ShapeFamily::N9 => &[("b", 1.04725), ("h", 0.413823)],
            ShapeFamily::N10 => &[("h", 0.541397), ("z", 1.02619)],
            ShapeFamily::N11 => &[
                ("x1", 1.15135),
                ("x2", 0.617047),
                ("x3", 0.91681),
                ("x4", 0.550702),
                ("x5", 1.98113),
                ("y", 1.38959),
                ("z1", 1.4264),
                ("z2", 1.34059),
                ("z3", 0.845054),
            ],
        }
    }

    pub fn default_params(self) -> Vec<f64> {
        self.parameters().iter().map(|p| p.1).collect()
    }

    pub fn has_closed_form(self) -> bool {
        self.closed_form_unchecked(&self.default_params()).is_some()
    }

    /// Checks arity and the domain: every parameter positive and within a
    /// factor two of its reference value.
    pub fn check_params(self, params: &[f64]) -> Result<()> {
        let expected = self.parameters();
        if params.len() != expected.len() {
            return Err(Error::InvalidArgument(format!(
                "{} takes {} parameters, got {}",
                self.name(),
                expected.len(),
                params.len()
            )));
        }
        for (&v, &(name, r)) in params.iter().zip(expected) {
            if !(v.is_finite() && v >= 0.5 * r && v <= 2.0 * r) {
                return Err(Error::InvalidArgument(format!("{name} = {v} is outside [{}, {}]", 0.5 * r, 2.0 * r)));
            }
        }
        Ok(())
    }

    fn points(self, p: &[f64]) -> Vec<Point3> {
        let v = Point3::new;
        match self {
            ShapeFamily::Tetra => {
                vec![v(1.0, 1.0, 1.0), v(1.0, -1.0, -1.0), v(-1.0, 1.0, -1.0), v(-1.0, -1.0, 1.0)]
            }
            ShapeFamily::Bipyramid3 | ShapeFamily::Octahedron | ShapeFamily::Bipyramid5 => {
                let k = self.n() - 2;
                let r = 1.0 / (std::f64::consts::PI / k as f64).cos();
                let mut pts: Vec<Point3> = (0..k)
                    .map(|i| {
                        let t = 2.0 * std::f64::consts::PI * i as f64 / k as f64;
                        v(r * t.cos(), r * t.sin(), 0.0)
                    })
                    .collect();
                pts.push(v(0.0, 0.0, p[0]));
                pts.push(v(0.0, 0.0, -p[0]));
                pts
            }
            ShapeFamily::N8 => {
                let (w, x, z) = (p[0], p[1], p[2]);
                vec![
                    v(z, 0.0, w),
                    v(z, 0.0, -w),
                    v(x, 1.0, 0.0),
                    v(x, -1.0, 0.0),
                    v(-z, w, 0.0),
                    v(-z, -w, 0.0),
                    v(-x, 0.0, 1.0),
                    v(-x, 0.0, -1.0),
                ]
            }
            ShapeFamily::N9 => {
                // Triangular prism with unit edges and height b; an apex over
                // the center of each square side at distance h.
                let (b, h) = (p[0], p[1]);
                let rc = 1.0 / 3f64.sqrt();
                let ri = 0.5 * rc;
                let mut pts = Vec::new();
                for i in 0..3 {
                    let t = std::f64::consts::FRAC_PI_2 + 2.0 * std::f64::consts::PI * i as f64 / 3.0;
                    pts.push(v(rc * t.cos(), rc * t.sin(), 0.5 * b));
                    pts.push(v(rc * t.cos(), rc * t.sin(), -0.5 * b));
                }
                for i in 0..3 {
                    let t = -std::f64::consts::FRAC_PI_2 + 2.0 * std::f64::consts::PI * i as f64 / 3.0;
                    pts.push(v((ri + h) * t.cos(), (ri + h) * t.sin(), 0.0));
                }
                pts
            }
            ShapeFamily::N10 => {
                let (h, z) = (p[0], p[1]);
                let s = 0.5 * SQRT2;
                vec![
                    v(1.0, 0.0, -h),
                    v(-1.0, 0.0, -h),
                    v(0.0, 1.0, -h),
                    v(0.0, -1.0, -h),
                    v(s, s, h),
                    v(s, -s, h),
                    v(-s, s, h),
                    v(-s, -s, h),
                    v(0.0, 0.0, z),
                    v(0.0, 0.0, -z),
                ]
            }
            ShapeFamily::N11 => {
                let [x1, x2, x3, x4, x5, y, z1, z2, z3] = [p[0], p[1], p[2], p[3], p[4], p[5], p[6], p[7], p[8]];
                vec![
                    v(x1, 1.0, 0.0),
                    v(x1, -1.0, 0.0),
                    v(x2, 0.0, z1),
                    v(x2, 0.0, -z1),
                    v(-x3, 0.0, z2),
                    v(-x3, 0.0, -z2),
                    v(-x4, y, z3),
                    v(-x4, y, -z3),
                    v(-x4, -y, z3),
                    v(-x4, -y, -z3),
                    v(-x5, 0.0, 0.0),
                ]
            }
            ShapeFamily::Icosahedron => {
                let phi = 0.5 * (1.0 + 5f64.sqrt());
                let mut pts = Vec::new();
                for a in [-1.0, 1.0] {
                    for b in [-phi, phi] {
                        pts.push(v(0.0, a, b));
                        pts.push(v(a, b, 0.0));
                        pts.push(v(b, 0.0, a));
                    }
                }
                pts
            }
        }
    }

    /// `(A, V)` in closed form, where available.
    fn closed_form_unchecked(self, p: &[f64]) -> Option<(f64, f64)> {
        match self {
            ShapeFamily::Bipyramid3 | ShapeFamily::Octahedron | ShapeFamily::Bipyramid5 => {
                let k = (self.n() - 2) as f64;
                let t = (std::f64::consts::PI / k).tan();
                let perimeter = 2.0 * k * t;
                Some((perimeter * (1.0 + p[0] * p[0]).sqrt(), 2.0 / 3.0 * k * t * p[0]))
            }
            ShapeFamily::N8 => {
                let (w, x, z) = (p[0], p[1], p[2]);
                let a = 4.0 * (w * w + (x - z).powi(2)).sqrt()
                    + 4.0
                        * ((w - 1.0).powi(2) * w * w + w * w * (x + z).powi(2) + (w * (x - z) + 2.0 * z).powi(2))
                            .sqrt();
                Some((a, 4.0 * w * (x + w * x + z) / 3.0))
            }
            ShapeFamily::N9 => {
                let (b, h) = (p[0], p[1]);
                let a = 0.75f64.sqrt() + 3.0 * b * (h * h + 0.25).sqrt() + 3.0 * (h * h + 0.25 * b * b).sqrt();
                Some((a, b * 3f64.sqrt() / 4.0 + b * h))
            }
            ShapeFamily::N10 => {
                let (h, z) = (p[0], p[1]);
                let a = 4.0
                    * ((3.0 - 2.0 * SQRT2 + 8.0 * h * h).sqrt() + (1.0 + 2.0 * h * h - 4.0 * h * z + 2.0 * z * z).sqrt());
                Some((a, 4.0 * (h + SQRT2 * h + z) / 3.0))
            }
            _ => None,
        }
    }

    /// Closed-form `(A, V)` for the families that have one.
    pub fn closed_form(self, params: &[f64]) -> Result<Option<(f64, f64)>> {
        self.check_params(params)?;
        Ok(self.closed_form_unchecked(params))
    }
}

/// Coordinates of the family member with the given parameters.
pub fn instantiate(family: ShapeFamily, params: &[f64]) -> Result<Configuration> {
    family.check_params(params)?;
    Ok(Configuration::new(family.points(params))?.with_label(family.name()))
}

/// Quality computed from the convex hull of [`instantiate`].
pub fn mesh_quality(family: ShapeFamily, params: &[f64]) -> Result<f64> {
    Ok(convex_hull(&instantiate(family, params)?)?.quality())
}

/// Closed-form quality where available, mesh-based otherwise.
pub fn family_quality(family: ShapeFamily, params: &[f64]) -> Result<f64> {
    match family.closed_form(params)? {
        Some((a, v)) => Ok(quality_from(a, v)),
        None => mesh_quality(family, params),
    }
}

/// Objective for the optimizer: the quality, or infinity where the hull
/// loses a vertex.
fn objective(family: ShapeFamily, p: &[f64]) -> f64 {
    if let Some((a, v)) = family.closed_form_unchecked(p) {
        return if a.is_finite() && v > 0.0 { quality_from(a, v) } else { f64::INFINITY };
    }
    let Ok(c) = Configuration::new(family.points(p)) else { return f64::INFINITY };
    match convex_hull(&c) {
        Ok(m) if m.vertices().len() == family.n() => m.quality(),
        _ => f64::INFINITY,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyOptimum {
    pub family: ShapeFamily,
    pub params: Vec<f64>,
    pub quality: f64,
    pub grad_norm: f64,
}

/// Local minimum of the family quality started from the reference
/// parameters; the finite-difference gradient norm at the result is at most
/// `tol` unless the optimizer stalls first.
pub fn optimize_family(family: ShapeFamily, tol: f64) -> Result<FamilyOptimum> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance {tol} must be positive")));
    }
    let f = |p: &[f64]| objective(family, p);
    let mut x = family.default_params();
    let opts = MinimizeOptions { grad_tol: tol, fd_step: FD_STEP, max_iter: 2000 };
    let mut value = f(&x);
    if !x.is_empty() {
        for _ in 0..10 {
            let m = bfgs(f, &x, opts);
            let done = m.converged || m.value >= value;
            if m.value <= value {
                x = m.x;
                value = m.value;
            }
            if done {
                break;
            }
        }
    }
    family.check_params(&x)?;
    let g = fd_gradient(&f, &x, value, FD_STEP);
    let grad_norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok(FamilyOptimum { family, params: x, quality: value, grad_norm })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaCertification {
    pub n: usize,
    pub optimum: FamilyOptimum,
    /// `A^6 / V^4` at the optimum.
    pub q6: f64,
    pub q6_certificate: RootCertificate,
    pub parameter_certificates: Vec<RootCertificate>,
}

/// Parameter polynomials per family: id and the certified quantity.
fn parameter_polynomials(n: usize) -> Vec<(&'static str, fn(&[f64]) -> f64)> {
    match n {
        8 => vec![("n8_w", |p| p[0]), ("n8_x2", |p| p[1] * p[1]), ("n8_z2", |p| p[2] * p[2])],
        9 => vec![("n9_b2", |p| p[0] * p[0]), ("n9_h2", |p| p[1] * p[1])],
        10 => vec![("n10_h2", |p| p[0] * p[0]), ("n10_z2", |p| p[1] * p[1])],
        _ => vec![],
    }
}

/// Optimizes the n = 8, 9 or 10 family and certifies `Q^6` (relative
/// tolerance [`Q6_REL_TOL`]) and the parameters (absolute `param_tol`)
/// against the published minimal polynomials.
pub fn certify_eta(n: usize, param_tol: f64) -> Result<EtaCertification> {
    if !(8..=10).contains(&n) {
        return Err(Error::InvalidArgument(format!("certification is available for n = 8, 9, 10, not {n}")));
    }
    let family = ShapeFamily::for_n(n)?;
    let optimum = optimize_family(family, 1e-8)?;
    let (a, v) = family.closed_form(&optimum.params)?.expect("n = 8..10 have closed forms");
    let q6 = a.powi(6) / v.powi(4);
    let q6_id = format!("n{n}_q6");
    let q6_certificate = verify_minpoly(&q6_id, &published(&q6_id)?, q6, Q6_REL_TOL * q6)?;
    let parameter_certificates = parameter_polynomials(n)
        .into_iter()
        .map(|(id, value)| verify_minpoly(id, &published(id)?, value(&optimum.params), param_tol))
        .collect::<Result<Vec<_>>>()?;
    Ok(EtaCertification { n, optimum, q6, q6_certificate, parameter_certificates })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functionals::{alpha4, eta12, reference_value};

    #[test]
    fn reference_members_are_valid_hulls() {
        for f in ALL_FAMILIES {
            let c = instantiate(f, &f.default_params()).unwrap();
            let m = convex_hull(&c).unwrap();
            assert_eq!(m.vertices().len(), f.n(), "{}", f.name());
            assert!(m.all_faces_triangular(), "{}", f.name());
        }
    }

    #[test]
    fn closed_forms_match_meshes() {
        for f in ALL_FAMILIES.into_iter().filter(|f| f.has_closed_form()) {
            let p = f.default_params();
            let (a, v) = f.closed_form(&p).unwrap().unwrap();
            let m = convex_hull(&instantiate(f, &p).unwrap()).unwrap();
            assert!((a - m.surface_area()).abs() <= 1e-12 * a, "{}", f.name());
            assert!((v - m.volume()).abs() <= 1e-12 * v, "{}", f.name());
        }
    }

    #[test]
    fn regular_solids() {
        assert!((family_quality(ShapeFamily::Tetra, &[]).unwrap() - alpha4()).abs() < 1e-12);
        assert!((family_quality(ShapeFamily::Icosahedron, &[]).unwrap() - eta12()).abs() < 1e-12);
        let m = convex_hull(&instantiate(ShapeFamily::Icosahedron, &[]).unwrap()).unwrap();
        assert_eq!(m.valency_vector().as_slice(), &[5; 12]);
    }

    #[test]
    fn domain_is_enforced() {
        assert!(instantiate(ShapeFamily::N8, &[2.0, 1.5]).is_err());
        assert!(instantiate(ShapeFamily::N8, &[5.0, 1.5, 0.5]).is_err());
        assert!(instantiate(ShapeFamily::N9, &[1.0, -0.4]).is_err());
        assert!(ShapeFamily::from_name("n12").is_err());
        assert_eq!(ShapeFamily::for_n(10).unwrap(), ShapeFamily::N10);
    }

    #[test]
    fn low_dimensional_optima() {
        for f in [ShapeFamily::Bipyramid3, ShapeFamily::Octahedron, ShapeFamily::Bipyramid5] {
            let o = optimize_family(f, 1e-8).unwrap();
            assert!(o.grad_norm <= 1e-8);
            assert!((o.params[0] - SQRT2).abs() < 1e-6, "{o:?}");
            assert!((o.quality - reference_value(f.n()).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn n8_is_symmetric() {
        let c = instantiate(ShapeFamily::N8, &ShapeFamily::N8.default_params()).unwrap();
        let maps: [fn(Point3) -> Point3; 2] =
            [|p| Point3::new(p.x, -p.y, p.z), |p| Point3::new(p.x, p.y, -p.z)];
        for m in maps {
            for p in c.points() {
                let q = m(*p);
                assert!(c.points().iter().any(|r| r.distance(q) < 1e-12));
            }
        }
    }
}
