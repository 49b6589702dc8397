//! ASCII OFF mesh files.
//!
//! Written files carry the header `OFF`, a counts line `V F E`, one
//! `x y z` line per vertex with 17 significant digits, and one `3 i j k`
//! line per triangle. The reader accepts general `k i_1 .. i_k` faces and
//! fan-triangulates them, and skips `#` comments and blank lines.

use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::Point3;
use crate::hull3d::HullMesh;

/// Formats a real like C's `%.17g`, which round-trips every `f64`.
pub fn fmt_g17(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if (-4..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        let fixed = format!("{:.*}", decimals, x);
        trim_zeros(&fixed).to_string()
    } else {
        let m = trim_zeros(mantissa);
        format!("{m}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// A mesh as read from an OFF file.
#[derive(Debug, Clone, PartialEq)]
pub struct OffMesh {
    pub vertices: Vec<Point3>,
    /// Triangles after fan triangulation.
    pub faces: Vec<[usize; 3]>,
}

pub fn write_off<W: Write>(mesh: &HullMesh, mut w: W) -> Result<()> {
    let faces = mesh.faces();
    writeln!(w, "OFF")?;
    writeln!(w, "{} {} {}", mesh.vertices().len(), faces.len(), 3 * faces.len() / 2)?;
    for p in mesh.vertices() {
        writeln!(w, "{} {} {}", fmt_g17(p.x), fmt_g17(p.y), fmt_g17(p.z))?;
    }
    for f in faces {
        writeln!(w, "3 {} {} {}", f[0], f[1], f[2])?;
    }
    Ok(())
}

pub fn write_off_file(mesh: &HullMesh, path: impl AsRef<Path>) -> Result<()> {
    let file = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_off(mesh, file)
}

pub fn off_string(mesh: &HullMesh) -> String {
    let mut buf = Vec::new();
    write_off(mesh, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("OFF output is ASCII")
}

pub fn read_off<R: BufRead>(reader: R) -> Result<OffMesh> {
    // Tokens with their line numbers, comments stripped.
    let mut tokens: Vec<(usize, String)> = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let content = line.split('#').next().unwrap_or("");
        tokens.extend(content.split_whitespace().map(|t| (i + 1, t.to_string())));
    }
    let mut it = tokens.into_iter().peekable();
    let parse_err = |line: usize, msg: String| Error::Parse { line, msg };

    match it.next() {
        Some((_, h)) if h == "OFF" => {}
        Some((line, h)) => return Err(parse_err(line, format!("expected OFF header, found {h:?}"))),
        None => return Err(parse_err(1, "empty file".into())),
    }
    let mut next_usize = |what: &str| -> Result<usize> {
        let (line, t) = it.next().ok_or_else(|| parse_err(0, format!("missing {what}")))?;
        t.parse().map_err(|_| parse_err(line, format!("invalid {what} {t:?}")))
    };
    let nv = next_usize("vertex count")?;
    let nf = next_usize("face count")?;
    let _ne = next_usize("edge count")?;

    let mut vertices = Vec::with_capacity(nv);
    let next_f64 = |it: &mut std::iter::Peekable<std::vec::IntoIter<(usize, String)>>| -> Result<f64> {
        let (line, t) = it.next().ok_or_else(|| parse_err(0, "missing coordinate".into()))?;
        t.parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| parse_err(line, format!("invalid coordinate {t:?}")))
    };
    for _ in 0..nv {
        let x = next_f64(&mut it)?;
        let y = next_f64(&mut it)?;
        let z = next_f64(&mut it)?;
        vertices.push(Point3::new(x, y, z));
    }
    let mut faces = Vec::new();
    for _ in 0..nf {
        let (line, t) = it.next().ok_or_else(|| parse_err(0, "missing face".into()))?;
        let k: usize = t.parse().map_err(|_| parse_err(line, format!("invalid face size {t:?}")))?;
        if k < 3 {
            return Err(parse_err(line, format!("face with {k} vertices")));
        }
        let mut idx = Vec::with_capacity(k);
        for _ in 0..k {
            let (line, t) = it.next().ok_or_else(|| parse_err(line, "truncated face".into()))?;
            let i: usize = t.parse().map_err(|_| parse_err(line, format!("invalid index {t:?}")))?;
            if i >= nv {
                return Err(parse_err(line, format!("vertex index {i} out of range")));
            }
            idx.push(i);
        }
        // Trailing per-face colour values, if any, stay on the same line.
        while matches!(it.peek(), Some((l, _)) if *l == line) {
            it.next();
        }
        for j in 1..k - 1 {
            faces.push([idx[0], idx[j], idx[j + 1]]);
        }
    }
    Ok(OffMesh { vertices, faces })
}

pub fn read_off_file(path: impl AsRef<Path>) -> Result<OffMesh> {
    let file = std::fs::File::open(path)?;
    read_off(std::io::BufReader::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hull3d::{convex_hull, Configuration};
    use proptest::prelude::*;

    #[test]
    fn g17_formatting() {
        assert_eq!(fmt_g17(1.0), "1");
        assert_eq!(fmt_g17(0.5), "0.5");
        assert_eq!(fmt_g17(0.1), "0.10000000000000001");
        assert_eq!(fmt_g17(-2.5e-7), "-2.4999999999999999e-07");
        assert_eq!(fmt_g17(1e20), "1e+20");
        assert_eq!(fmt_g17(123456.75), "123456.75");
    }

    proptest! {
        #[test]
        fn g17_round_trips(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL) {
            let s = fmt_g17(x);
            prop_assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }

    #[test]
    fn reads_polygonal_faces_with_comments() {
        let text = "OFF\n# a unit square pyramid\n5 2 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n0.5 0.5 1\n4 0 3 2 1\n3 0 1 4 255 0 0\n";
        let m = read_off(text.as_bytes()).unwrap();
        assert_eq!(m.vertices.len(), 5);
        assert_eq!(m.faces, vec![[0, 3, 2], [0, 2, 1], [0, 1, 4]]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(read_off("PLY\n".as_bytes()).is_err());
        assert!(read_off("OFF\n1 0 0\n0 0\n".as_bytes()).is_err());
        assert!(read_off("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 7\n".as_bytes()).is_err());
    }

    #[test]
    fn write_then_read_is_lossless() {
        let pts = vec![
            Point3::new(0.1, 0.2, 0.3),
            Point3::new(1.0 / 3.0, -0.7, 0.0),
            Point3::new(-0.4, 0.9, 0.25),
            Point3::new(0.05, 0.05, -1.1),
            Point3::new(0.6, 0.6, 0.6),
        ];
        let mesh = convex_hull(&Configuration::new(pts).unwrap()).unwrap();
        let text = off_string(&mesh);
        assert!(text.starts_with("OFF\n"));
        let back = read_off(text.as_bytes()).unwrap();
        assert_eq!(back.vertices, mesh.vertices());
        assert_eq!(back.faces, mesh.faces());
    }
}
