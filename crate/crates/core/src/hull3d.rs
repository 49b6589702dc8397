//! Convex hulls of point configurations in 3-space and the functionals
//! measured on them: volume, surface area, the quality ratio `A/V^(2/3)`,
//! valency vectors, diameters and orthogonal projections.
//!
//! Hulls are built by incremental insertion. Visibility is decided with
//! adaptive exact orientation predicates, so the combinatorics of the hull
//! is always consistent. Triangles are afterwards merged into maximal
//! coplanar groups under a tolerance relative to the diameter, and every
//! combinatorial quantity (edges, valencies, Euler characteristic) is read
//! off the merged structure.

use std::collections::{HashMap, HashSet};
use std::fmt;

use robust::Coord3D;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{centroid, distance_to_line, triangle_area, Point3};

/// Relative tolerance (times the diameter) for merging triangles into a coplanar group.
pub const PLANE_TOL_REL: f64 = 1e-9;
/// Relative tolerance (times the diameter) below which two points are identical.
pub const POINT_TOL_REL: f64 = 1e-12;
/// Relative tolerance (times the cubed diameter) on the spanning tetrahedron volume.
pub const RANK_TOL_REL: f64 = 1e-10;

/// Absolute tolerances derived from a configuration's diameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub plane: f64,
    pub point: f64,
    pub rank: f64,
}

impl Tolerances {
    pub fn for_diameter(diameter: f64) -> Self {
        Tolerances {
            plane: PLANE_TOL_REL * diameter,
            point: POINT_TOL_REL * diameter,
            rank: RANK_TOL_REL * diameter.powi(3),
        }
    }
}

/// A labeled set of at least four distinct points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Configuration {
    points: Vec<Point3>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
}

impl Configuration {
    pub fn new(points: Vec<Point3>) -> Result<Self> {
        if points.len() < 4 {
            return Err(Error::DegenerateInput(format!(
                "a configuration needs at least 4 points, got {}",
                points.len()
            )));
        }
        if let Some(i) = points.iter().position(|p| !p.is_finite()) {
            return Err(Error::InvalidArgument(format!("point {i} is not finite")));
        }
        let (diam, _) = diameter(&points);
        let tol = Tolerances::for_diameter(diam).point;
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                if points[i].distance(points[j]) <= tol {
                    return Err(Error::DuplicatePoint(i, j));
                }
            }
        }
        Ok(Configuration { points, label: None })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn points(&self) -> &[Point3] {
        &self.points
    }

    pub fn into_points(self) -> Vec<Point3> {
        self.points
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn diameter(&self) -> (f64, (usize, usize)) {
        diameter(&self.points)
    }

    /// Applies `f` to every point, keeping the label.
    pub fn map(&self, f: impl Fn(Point3) -> Point3) -> Result<Self> {
        let mut c = Configuration::new(self.points.iter().map(|&p| f(p)).collect())?;
        c.label = self.label.clone();
        Ok(c)
    }
}

/// Outward unit normal and offset of a supporting plane: `normal . x = offset`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Plane {
    pub normal: Point3,
    pub offset: f64,
}

impl Plane {
    /// Signed distance; positive on the outer side.
    #[inline]
    pub fn signed_distance(&self, p: Point3) -> f64 {
        self.normal.dot(p) - self.offset
    }
}

/// Sorted multiset of vertex degrees of a hull, counted on merged faces.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ValencyVector(Vec<usize>);

impl ValencyVector {
    pub fn new(mut degrees: Vec<usize>) -> Self {
        degrees.sort_unstable();
        ValencyVector(degrees)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> usize {
        self.0.iter().sum()
    }

    /// Population variance of the degrees.
    pub fn variance(&self) -> f64 {
        if self.0.is_empty() {
            return 0.0;
        }
        let n = self.0.len() as f64;
        let mean = self.sum() as f64 / n;
        self.0.iter().map(|&d| (d as f64 - mean).powi(2)).sum::<f64>() / n
    }
}

impl fmt::Display for ValencyVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, "]")
    }
}

/// Convex hull with triangulated faces, counterclockwise as seen from outside.
#[derive(Debug, Clone, PartialEq)]
pub struct HullMesh {
    vertices: Vec<Point3>,
    /// Index of each hull vertex in the input configuration.
    source: Vec<usize>,
    faces: Vec<[usize; 3]>,
    face_planes: Vec<Plane>,
    /// Maximal coplanar sets of faces, each listed in increasing face order.
    groups: Vec<Vec<usize>>,
    face_group: Vec<usize>,
    /// Edges between faces of different groups, as sorted vertex pairs.
    edges: Vec<[usize; 2]>,
    tolerances: Tolerances,
}

impl HullMesh {
    pub fn vertices(&self) -> &[Point3] {
        &self.vertices
    }

    /// For each hull vertex, its index in the configuration the hull was built from.
    pub fn source_indices(&self) -> &[usize] {
        &self.source
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn face_planes(&self) -> &[Plane] {
        &self.face_planes
    }

    pub fn coplanar_groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn group_of_face(&self, face: usize) -> usize {
        self.face_group[face]
    }

    /// Edges of the merged (coplanar-grouped) face structure.
    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn tolerances(&self) -> Tolerances {
        self.tolerances
    }

    pub fn face_points(&self, face: usize) -> [Point3; 3] {
        let [a, b, c] = self.faces[face];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn face_area(&self, face: usize) -> f64 {
        let [a, b, c] = self.face_points(face);
        triangle_area(a, b, c)
    }

    /// Number of merged faces.
    pub fn merged_face_count(&self) -> usize {
        self.groups.len()
    }

    /// `V - E + F` over the merged face structure.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edges.len() as i64 + self.groups.len() as i64
    }

    /// True iff every merged face is a single triangle.
    pub fn all_faces_triangular(&self) -> bool {
        self.groups.iter().all(|g| g.len() == 1)
    }

    /// Boundary cycle of a merged face, counterclockwise from outside.
    pub fn group_polygon(&self, group: usize) -> Vec<usize> {
        let members: HashSet<usize> = self.groups[group].iter().copied().collect();
        let mut inner: HashSet<(usize, usize)> = HashSet::new();
        for &f in &members {
            let [a, b, c] = self.faces[f];
            inner.extend([(a, b), (b, c), (c, a)]);
        }
        let mut next: HashMap<usize, usize> = HashMap::new();
        for &(a, b) in &inner {
            if !inner.contains(&(b, a)) {
                next.insert(a, b);
            }
        }
        let start = *next.keys().min().expect("group has a boundary");
        let mut cycle = vec![start];
        let mut cur = next[&start];
        while cur != start && cycle.len() <= next.len() {
            cycle.push(cur);
            cur = next[&cur];
        }
        cycle
    }

    pub fn group_area(&self, group: usize) -> f64 {
        self.groups[group].iter().map(|&f| self.face_area(f)).sum()
    }

    /// Outward unit normal of a merged face (area-weighted over its triangles).
    pub fn group_normal(&self, group: usize) -> Point3 {
        let n = self.groups[group].iter().fold(Point3::ORIGIN, |acc, &f| {
            acc + self.face_planes[f].normal * self.face_area(f)
        });
        n.normalized().unwrap_or(self.face_planes[self.groups[group][0]].normal)
    }

    /// Degree of every vertex in the merged edge graph, indexed like `vertices()`.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertices.len()];
        for &[a, b] in &self.edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg
    }

    pub fn valency_vector(&self) -> ValencyVector {
        ValencyVector::new(self.degrees())
    }

    pub fn centroid(&self) -> Point3 {
        centroid(&self.vertices)
    }

    /// Volume as a sum of signed tetrahedra spanned from the vertex centroid.
    pub fn volume(&self) -> f64 {
        let c = self.centroid();
        self.faces
            .iter()
            .map(|&[a, b, d]| {
                let (a, b, d) = (self.vertices[a] - c, self.vertices[b] - c, self.vertices[d] - c);
                a.dot(b.cross(d))
            })
            .sum::<f64>()
            / 6.0
    }

    pub fn surface_area(&self) -> f64 {
        (0..self.faces.len()).map(|f| self.face_area(f)).sum()
    }

    /// The scale-invariant isoperimetric quotient `A / V^(2/3)`.
    pub fn quality(&self) -> f64 {
        quality_from(self.surface_area(), self.volume())
    }

    /// Whether `p` lies strictly outside the supporting plane of `face` (exact predicate).
    pub fn face_sees(&self, face: usize, p: Point3) -> bool {
        let [a, b, c] = self.faces[face];
        sees(self.vertices[a], self.vertices[b], self.vertices[c], p)
    }

    /// Verifies the structural invariants of the hull against the points it was built from.
    pub fn check_invariants(&self, points: &[Point3]) -> std::result::Result<(), String> {
        if self.euler_characteristic() != 2 {
            return Err(format!("Euler characteristic {}", self.euler_characteristic()));
        }
        let c = self.centroid();
        for (f, plane) in self.face_planes.iter().enumerate() {
            let [a, b, d] = self.face_points(f);
            let fc = (a + b + d) / 3.0;
            if plane.normal.dot(fc - c) <= 0.0 {
                return Err(format!("face {f} normal points inwards"));
            }
            for (i, &p) in points.iter().enumerate() {
                if plane.signed_distance(p) > self.tolerances.plane {
                    return Err(format!("point {i} lies outside face {f}"));
                }
            }
        }
        let deg = self.degrees();
        if deg.iter().any(|&d| d < 3) {
            return Err("vertex of degree < 3".into());
        }
        if deg.iter().sum::<usize>() != 2 * self.edges.len() {
            return Err("degree sum mismatch".into());
        }
        Ok(())
    }
}

#[inline]
pub fn quality_from(area: f64, volume: f64) -> f64 {
    area / volume.powf(2.0 / 3.0)
}

#[inline]
fn coord(p: Point3) -> Coord3D<f64> {
    Coord3D { x: p.x, y: p.y, z: p.z }
}

/// Exact test: does `p` lie strictly on the outer side of the triangle `abc`
/// (counterclockwise when seen from outside)?
#[inline]
pub fn sees(a: Point3, b: Point3, c: Point3, p: Point3) -> bool {
    // robust::orient3d is positive when `p` lies on the side from which abc
    // appears clockwise, i.e. below a counterclockwise face.
    robust::orient3d(coord(a), coord(b), coord(c), coord(p)) < 0.0
}

/// Maximum pairwise distance and the lexicographically smallest pair attaining it.
pub fn diameter(points: &[Point3]) -> (f64, (usize, usize)) {
    let mut best = -1.0;
    let mut pair = (0, 0);
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let d = (points[i] - points[j]).norm_squared();
            if d > best {
                best = d;
                pair = (i, j);
            }
        }
    }
    (best.max(0.0).sqrt(), pair)
}

/// Builds the convex hull of a configuration.
pub fn convex_hull(config: &Configuration) -> Result<HullMesh> {
    hull_of_points(config.points())
}

/// Convex hull of a raw point slice. Requires at least four affinely
/// independent points; repeated points are tolerated.
pub fn hull_of_points(points: &[Point3]) -> Result<HullMesh> {
    if points.len() < 4 {
        return Err(Error::DegenerateInput(format!("{} points", points.len())));
    }
    let (diam, _) = diameter(points);
    let tol = Tolerances::for_diameter(diam);
    let mut active: Vec<usize> = (0..points.len()).collect();
    loop {
        let faces = incremental_hull(points, &active, &tol)?;
        // A sliver face means its middle vertex lies on the segment of the
        // other two within tolerance, so it is not extreme.
        let slivers: HashSet<usize> = faces.iter().filter_map(|f| sliver_middle(points, f, tol.plane)).collect();
        if !slivers.is_empty() {
            active.retain(|i| !slivers.contains(i));
            continue;
        }
        let mesh = assemble(points, &faces, tol)?;
        let interior = mesh.non_extreme_vertices();
        if interior.is_empty() {
            return Ok(mesh);
        }
        // Vertices inside a merged face or edge are dropped and the hull rebuilt.
        let drop: HashSet<usize> = interior.iter().map(|&v| mesh.source[v]).collect();
        active.retain(|i| !drop.contains(i));
    }
}

impl HullMesh {
    /// Vertices incident to fewer than three merged faces.
    fn non_extreme_vertices(&self) -> Vec<usize> {
        let mut incident: Vec<Vec<usize>> = vec![Vec::new(); self.vertices.len()];
        for (f, face) in self.faces.iter().enumerate() {
            for &v in face {
                let g = self.face_group[f];
                if !incident[v].contains(&g) {
                    incident[v].push(g);
                }
            }
        }
        (0..self.vertices.len()).filter(|&v| incident[v].len() < 3).collect()
    }
}

/// The vertex opposite the longest edge of `face` if its distance to that
/// edge is at most `tol`.
fn sliver_middle(points: &[Point3], face: &[usize; 3], tol: f64) -> Option<usize> {
    let k = (0..3)
        .max_by(|&i, &j| {
            let len = |k: usize| points[face[(k + 1) % 3]].distance(points[face[(k + 2) % 3]]);
            len(i).total_cmp(&len(j))
        })
        .unwrap();
    let (a, b) = (points[face[(k + 1) % 3]], points[face[(k + 2) % 3]]);
    (distance_to_line(points[face[k]], a, b) <= tol).then_some(face[k])
}

/// Incremental hull over `active` point indices; returns triangles in input indices.
fn incremental_hull(points: &[Point3], active: &[usize], tol: &Tolerances) -> Result<Vec<[usize; 3]>> {
    if active.len() < 4 {
        return Err(Error::DegenerateInput("fewer than 4 extreme points".into()));
    }
    let p = |i: usize| points[i];

    // Spanning simplex: diameter pair, farthest from their line, farthest from their plane.
    let mut i0 = active[0];
    let mut i1 = active[1];
    let mut best = -1.0;
    for (k, &a) in active.iter().enumerate() {
        for &b in &active[k + 1..] {
            let d = (p(a) - p(b)).norm_squared();
            if d > best {
                best = d;
                i0 = a;
                i1 = b;
            }
        }
    }
    let i2 = *active
        .iter()
        .max_by(|&&a, &&b| {
            distance_to_line(p(a), p(i0), p(i1)).total_cmp(&distance_to_line(p(b), p(i0), p(i1)))
        })
        .unwrap();
    let normal = (p(i1) - p(i0)).cross(p(i2) - p(i0));
    let i3 = *active
        .iter()
        .max_by(|&&a, &&b| normal.dot(p(a) - p(i0)).abs().total_cmp(&normal.dot(p(b) - p(i0)).abs()))
        .unwrap();
    let volume = normal.dot(p(i3) - p(i0)).abs() / 6.0;
    if !(volume > tol.rank) || i3 == i0 || i3 == i1 || i3 == i2 {
        return Err(Error::DegenerateInput(format!(
            "points are (nearly) coplanar: spanning volume {volume:e} <= {:e}",
            tol.rank
        )));
    }

    let simplex = [i0, i1, i2, i3];
    let mut faces: Vec<[usize; 3]> = Vec::with_capacity(4 * active.len());
    for skip in 0..4 {
        let mut tri = [0usize; 3];
        let mut k = 0;
        for (s, &v) in simplex.iter().enumerate() {
            if s != skip {
                tri[k] = v;
                k += 1;
            }
        }
        let opposite = simplex[skip];
        if sees(p(tri[0]), p(tri[1]), p(tri[2]), p(opposite)) {
            tri.swap(1, 2);
        }
        faces.push(tri);
    }

    let mut visible = Vec::new();
    let mut directed: HashSet<(usize, usize)> = HashSet::new();
    for &q in active {
        if simplex.contains(&q) {
            continue;
        }
        visible.clear();
        for (f, &[a, b, c]) in faces.iter().enumerate() {
            if sees(p(a), p(b), p(c), p(q)) {
                visible.push(f);
            }
        }
        if visible.is_empty() {
            continue;
        }
        directed.clear();
        for &f in &visible {
            let [a, b, c] = faces[f];
            directed.extend([(a, b), (b, c), (c, a)]);
        }
        let mut horizon: Vec<(usize, usize)> = directed
            .iter()
            .filter(|&&(a, b)| !directed.contains(&(b, a)))
            .copied()
            .collect();
        horizon.sort_unstable();
        // Remove visible faces (indices ascending) from the back.
        for &f in visible.iter().rev() {
            faces.swap_remove(f);
        }
        faces.extend(horizon.into_iter().map(|(a, b)| [a, b, q]));
    }
    // Canonical face order keeps downstream output deterministic.
    for f in faces.iter_mut() {
        let m = (0..3).min_by_key(|&k| f[k]).unwrap();
        f.rotate_left(m);
    }
    faces.sort_unstable();
    Ok(faces)
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

fn assemble(points: &[Point3], faces: &[[usize; 3]], tolerances: Tolerances) -> Result<HullMesh> {
    let mut source: Vec<usize> = faces.iter().flatten().copied().collect();
    source.sort_unstable();
    source.dedup();
    let local: HashMap<usize, usize> = source.iter().enumerate().map(|(l, &g)| (g, l)).collect();
    let vertices: Vec<Point3> = source.iter().map(|&g| points[g]).collect();
    let faces: Vec<[usize; 3]> = faces
        .iter()
        .map(|f| [local[&f[0]], local[&f[1]], local[&f[2]]])
        .collect();

    let mut face_planes = Vec::with_capacity(faces.len());
    for &[a, b, c] in &faces {
        let (a, b, c) = (vertices[a], vertices[b], vertices[c]);
        let normal = (b - a)
            .cross(c - a)
            .normalized()
            .ok_or_else(|| Error::DegenerateInput("zero-area hull face".into()))?;
        let offset = normal.dot((a + b + c) / 3.0);
        face_planes.push(Plane { normal, offset });
    }

    let mut owner: HashMap<(usize, usize), usize> = HashMap::with_capacity(3 * faces.len());
    for (f, &[a, b, c]) in faces.iter().enumerate() {
        owner.insert((a, b), f);
        owner.insert((b, c), f);
        owner.insert((c, a), f);
    }
    let opposite = |f: usize, a: usize, b: usize| -> usize {
        *faces[f].iter().find(|&&v| v != a && v != b).unwrap()
    };

    let mut parent: Vec<usize> = (0..faces.len()).collect();
    let mut edges = Vec::new();
    for (f, &[a, b, c]) in faces.iter().enumerate() {
        for (u, v) in [(a, b), (b, c), (c, a)] {
            let g = owner[&(v, u)];
            if g < f {
                continue;
            }
            let wf = vertices[opposite(f, u, v)];
            let wg = vertices[opposite(g, v, u)];
            let coplanar = face_planes[f].signed_distance(wg).abs() <= tolerances.plane
                && face_planes[g].signed_distance(wf).abs() <= tolerances.plane;
            if coplanar {
                let (rf, rg) = (find(&mut parent, f), find(&mut parent, g));
                parent[rf.max(rg)] = rf.min(rg);
            } else {
                edges.push([u.min(v), u.max(v)]);
            }
        }
    }
    let mut group_id: HashMap<usize, usize> = HashMap::new();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut face_group = vec![0; faces.len()];
    for f in 0..faces.len() {
        let r = find(&mut parent, f);
        let gid = *group_id.entry(r).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[gid].push(f);
        face_group[f] = gid;
    }
    // An edge joining two triangles of the same group through a chain is not a real edge.
    edges.retain(|&[u, v]| {
        let f = owner[&(u, v)];
        let g = owner[&(v, u)];
        face_group[f] != face_group[g]
    });
    edges.sort_unstable();

    Ok(HullMesh {
        vertices,
        source,
        faces,
        face_planes,
        groups,
        face_group,
        edges,
        tolerances,
    })
}

pub fn volume(mesh: &HullMesh) -> f64 {
    mesh.volume()
}

pub fn surface_area(mesh: &HullMesh) -> f64 {
    mesh.surface_area()
}

pub fn quality(mesh: &HullMesh) -> f64 {
    mesh.quality()
}

pub fn valency_vector(mesh: &HullMesh) -> ValencyVector {
    mesh.valency_vector()
}

/// Convex polygon in a plane, vertices counterclockwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polygon2 {
    pub vertices: Vec<[f64; 2]>,
}

impl Polygon2 {
    /// Convex hull of planar points (monotone chain); collinear points are dropped.
    pub fn convex_hull(mut pts: Vec<[f64; 2]>) -> Polygon2 {
        pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
        pts.dedup();
        if pts.len() < 3 {
            return Polygon2 { vertices: pts };
        }
        let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| {
            (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
        };
        let mut hull: Vec<[f64; 2]> = Vec::with_capacity(2 * pts.len());
        for &p in &pts {
            while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        let lower = hull.len() + 1;
        for &p in pts.iter().rev().skip(1) {
            while hull.len() >= lower && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
        Polygon2 { vertices: hull }
    }

    /// Enclosed area (`V_2`).
    pub fn area(&self) -> f64 {
        let v = &self.vertices;
        let n = v.len();
        if n < 3 {
            return 0.0;
        }
        0.5 * (0..n)
            .map(|i| {
                let (a, b) = (v[i], v[(i + 1) % n]);
                a[0] * b[1] - a[1] * b[0]
            })
            .sum::<f64>()
            .abs()
    }

    /// Perimeter (`A_2`).
    pub fn perimeter(&self) -> f64 {
        let v = &self.vertices;
        let n = v.len();
        match n {
            0 | 1 => 0.0,
            2 => 2.0 * ((v[1][0] - v[0][0]).hypot(v[1][1] - v[0][1])),
            _ => (0..n)
                .map(|i| {
                    let (a, b) = (v[i], v[(i + 1) % n]);
                    (b[0] - a[0]).hypot(b[1] - a[1])
                })
                .sum(),
        }
    }
}

/// Orthonormal basis `(u, v)` of the plane orthogonal to `direction`.
pub fn plane_basis(direction: Point3) -> Result<(Point3, Point3)> {
    let d = direction
        .normalized()
        .ok_or_else(|| Error::InvalidArgument("projection direction is zero".into()))?;
    let u = d.any_orthogonal();
    Ok((u, d.cross(u)))
}

/// Orthogonal projection of the points along `direction`, as a planar convex polygon.
pub fn orthogonal_project(points: &[Point3], direction: Point3) -> Result<Polygon2> {
    let (u, v) = plane_basis(direction)?;
    Ok(Polygon2::convex_hull(
        points.iter().map(|&p| [p.dot(u), p.dot(v)]).collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cube() -> Configuration {
        let mut pts = Vec::new();
        for i in 0..8 {
            pts.push(Point3::new((i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64));
        }
        Configuration::new(pts).unwrap()
    }

    fn unit_tetra() -> Configuration {
        Configuration::new(vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(0.0, 1.0, 0.0),
            Point3::new(0.0, 0.0, 1.0),
        ])
        .unwrap()
    }

    fn regular_tetra(edge: f64) -> Configuration {
        let s = edge / 8f64.sqrt();
        Configuration::new(vec![
            Point3::new(s, s, s),
            Point3::new(s, -s, -s),
            Point3::new(-s, s, -s),
            Point3::new(-s, -s, s),
        ])
        .unwrap()
    }

    #[test]
    fn sees_matches_outward_orientation() {
        let a = Point3::new(0.0, 0.0, 0.0);
        let b = Point3::new(1.0, 0.0, 0.0);
        let c = Point3::new(0.0, 1.0, 0.0);
        // abc is counterclockwise seen from +z.
        assert!(sees(a, b, c, Point3::new(0.2, 0.2, 1.0)));
        assert!(!sees(a, b, c, Point3::new(0.2, 0.2, -1.0)));
        assert!(!sees(a, b, c, Point3::new(5.0, 5.0, 0.0)));
    }

    #[test]
    fn tetrahedron_combinatorics() {
        let m = convex_hull(&unit_tetra()).unwrap();
        assert_eq!(m.vertices().len(), 4);
        assert_eq!(m.faces().len(), 4);
        assert_eq!(m.edges().len(), 6);
        assert_eq!(m.valency_vector().as_slice(), &[3, 3, 3, 3]);
        m.check_invariants(unit_tetra().points()).unwrap();
    }

    #[test]
    fn cube_combinatorics() {
        let m = convex_hull(&cube()).unwrap();
        assert_eq!(m.vertices().len(), 8);
        assert_eq!(m.faces().len(), 12);
        assert_eq!(m.merged_face_count(), 6);
        assert_eq!(m.edges().len(), 12);
        assert_eq!(m.valency_vector().as_slice(), &[3; 8]);
        assert!(!m.all_faces_triangular());
        assert_eq!(m.euler_characteristic(), 2);
        for g in 0..6 {
            assert_eq!(m.group_polygon(g).len(), 4);
        }
    }

    #[test]
    fn interior_point_is_dropped() {
        let mut pts = cube().into_points();
        pts.push(Point3::new(0.5, 0.5, 0.5));
        let m = convex_hull(&Configuration::new(pts).unwrap()).unwrap();
        assert_eq!(m.vertices().len(), 8);
        assert!(!m.source_indices().contains(&8));
    }

    #[test]
    fn points_on_faces_and_edges_are_not_vertices() {
        let mut pts = cube().into_points();
        pts.push(Point3::new(0.5, 0.5, 1.0)); // face centre
        pts.push(Point3::new(0.5, 0.0, 0.0)); // edge midpoint
        let m = convex_hull(&Configuration::new(pts).unwrap()).unwrap();
        assert_eq!(m.vertices().len(), 8);
        assert_eq!(m.edges().len(), 12);
    }

    #[test]
    fn coplanar_input_is_degenerate() {
        let pts = vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(0.0, 1.0, 0.0),
            Point3::new(1.0, 1.0, 0.0),
            Point3::new(0.3, 0.4, 0.0),
        ];
        let err = convex_hull(&Configuration::new(pts).unwrap()).unwrap_err();
        assert!(matches!(err, Error::DegenerateInput(_)));
    }

    #[test]
    fn duplicates_are_rejected() {
        let mut pts = unit_tetra().into_points();
        pts.push(Point3::new(1.0, 0.0, 0.0));
        assert!(matches!(Configuration::new(pts), Err(Error::DuplicatePoint(1, 4))));
    }

    #[test]
    fn too_few_points() {
        let pts = vec![Point3::ORIGIN, Point3::new(1.0, 0.0, 0.0), Point3::new(0.0, 1.0, 0.0)];
        assert!(matches!(Configuration::new(pts), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn cube_measures() {
        let m = convex_hull(&cube()).unwrap();
        assert_relative_eq!(m.volume(), 1.0, max_relative = 1e-14);
        assert_relative_eq!(m.surface_area(), 6.0, max_relative = 1e-14);
        assert_relative_eq!(m.quality(), 6.0, max_relative = 1e-14);
    }

    #[test]
    fn regular_tetrahedron_measures() {
        let m = convex_hull(&regular_tetra(1.0)).unwrap();
        assert_relative_eq!(m.volume(), 2f64.sqrt() / 12.0, max_relative = 1e-13);
        assert_relative_eq!(m.surface_area(), 3f64.sqrt(), max_relative = 1e-13);
        assert_relative_eq!(m.quality(), 6.0 * 3f64.powf(1.0 / 6.0), max_relative = 1e-13);
        assert!((m.quality() - 7.20562).abs() < 1e-5);
    }

    #[test]
    fn octahedron_measures() {
        let mut pts = Vec::new();
        for s in [1.0, -1.0] {
            pts.push(Point3::new(s, 0.0, 0.0));
            pts.push(Point3::new(0.0, s, 0.0));
            pts.push(Point3::new(0.0, 0.0, s));
        }
        let m = convex_hull(&Configuration::new(pts).unwrap()).unwrap();
        assert_eq!(m.valency_vector().as_slice(), &[4; 6]);
        assert!(m.all_faces_triangular());
        let eta6 = 3f64.powf(7.0 / 6.0) * 2f64.powf(2.0 / 3.0);
        assert_relative_eq!(m.quality(), eta6, max_relative = 1e-13);
        assert!((m.quality() - 5.71911).abs() < 1e-5);
    }

    #[test]
    fn diameter_of_cube_and_ties() {
        let (d, pair) = cube().diameter();
        assert_relative_eq!(d, 3f64.sqrt());
        // Four diagonals tie; the lowest pair is (0, 7).
        assert_eq!(pair, (0, 7));

        let pts = [
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 1.0, 0.0),
            Point3::new(3.0, 4.0, 0.0),
        ];
        let (d, pair) = diameter(&pts);
        assert_relative_eq!(d, 5.0);
        assert_eq!(pair, (0, 2));
    }

    #[test]
    fn projections() {
        let p = orthogonal_project(cube().points(), Point3::new(0.0, 0.0, 1.0)).unwrap();
        assert_eq!(p.vertices.len(), 4);
        assert_relative_eq!(p.area(), 1.0, max_relative = 1e-14);
        assert_relative_eq!(p.perimeter(), 4.0, max_relative = 1e-14);

        let t = orthogonal_project(unit_tetra().points(), Point3::new(0.0, 0.0, 1.0)).unwrap();
        assert_eq!(t.vertices.len(), 3);
        assert_relative_eq!(t.area(), 0.5, max_relative = 1e-14);

        assert!(orthogonal_project(cube().points(), Point3::ORIGIN).is_err());
    }

    #[test]
    fn valency_variance_arithmetic() {
        let v = ValencyVector::new(vec![5, 3, 4, 3, 3, 5, 4, 3]);
        assert_eq!(v.as_slice(), &[3, 3, 3, 3, 4, 4, 5, 5]);
        assert_relative_eq!(v.variance(), 0.6875, max_relative = 1e-15);
        assert_eq!(v.to_string(), "[3,3,3,3,4,4,5,5]");
    }
}
