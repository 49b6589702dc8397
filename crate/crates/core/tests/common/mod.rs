//! Oracles shared by the integration tests.

use polymin::geometry::Point3;

/// Facets by enumerating all point triples whose plane has every other
/// point strictly on one side. Valid for points in general position.
pub struct Brute {
    pub facets: Vec<(Point3, f64, f64)>, // outward unit normal, offset, triangle area
}

#[allow(dead_code)]
impl Brute {
    pub fn new(pts: &[Point3]) -> Brute {
        let n = pts.len();
        let mut facets = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let nrm = (pts[j] - pts[i]).cross(pts[k] - pts[i]);
                    let len = nrm.norm();
                    let u = nrm * (1.0 / len);
                    let off = u.dot(pts[i]);
                    let side: Vec<f64> = (0..n).filter(|&m| m != i && m != j && m != k).map(|m| u.dot(pts[m]) - off).collect();
                    if side.iter().all(|&s| s < 0.0) {
                        facets.push((u, off, 0.5 * len));
                    } else if side.iter().all(|&s| s > 0.0) {
                        facets.push((-u, -off, 0.5 * len));
                    }
                }
            }
        }
        Brute { facets }
    }

    pub fn area(&self) -> f64 {
        self.facets.iter().map(|f| f.2).sum()
    }

    pub fn volume(&self, interior: Point3) -> f64 {
        self.facets.iter().map(|(u, off, a)| a * (off - u.dot(interior)) / 3.0).sum()
    }

    pub fn contains(&self, p: Point3) -> bool {
        self.facets.iter().all(|(u, off, _)| u.dot(p) <= *off)
    }
}

