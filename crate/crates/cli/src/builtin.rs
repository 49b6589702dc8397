//! Named shapes and shape sources (`builtin:<name>`, `.off`, `.json`).

use std::path::Path;

use polymin::convexitylab::example_singular_base;
use polymin::families::{instantiate, ShapeFamily, ALL_FAMILIES};
use polymin::off::read_off_file;
use polymin::{Configuration, Error, Point3, Result};
use serde::{Deserialize, Serialize};

pub const PREFIX: &str = "builtin:";

/// Builtin names: the family members at their reference parameters, the
/// unit cube and the singular example base.
pub fn names() -> Vec<&'static str> {
    let mut v: Vec<&'static str> = ALL_FAMILIES.iter().map(|f| f.name()).collect();
    v.extend(["cube", "example-singular"]);
    v
}

pub fn builtin(name: &str) -> Result<Configuration> {
    let config = match name {
        "cube" => Configuration::new(
            (0..8).map(|i| Point3::new((i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64)).collect(),
        )?,
        "example-singular" => example_singular_base(),
        _ => {
            let f = ShapeFamily::from_name(name).map_err(|_| {
                Error::InvalidArgument(format!("unknown builtin '{name}', expected one of {}", names().join(", ")))
            })?;
            instantiate(f, &f.default_params())?
        }
    };
    Ok(config.with_label(name))
}

/// JSON point list file: `{"points": [[x, y, z], ...]}`.
#[derive(Debug, Serialize, Deserialize)]
pub struct PointList {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub points: Vec<[f64; 3]>,
}

impl PointList {
    pub fn from_config(c: &Configuration) -> Self {
        PointList { label: c.label().map(str::to_string), points: c.points().iter().map(|p| p.to_array()).collect() }
    }
}

/// Resolves a source string into a configuration. Files ending in `.json`
/// are point lists; everything else that is not a builtin is read as OFF.
pub fn load(source: &str) -> Result<Configuration> {
    if let Some(name) = source.strip_prefix(PREFIX) {
        return builtin(name);
    }
    let path = Path::new(source);
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
        let text = std::fs::read_to_string(path)?;
        let list: PointList = serde_json::from_str(&text)
            .map_err(|e| Error::Parse { line: e.line(), msg: e.to_string() })?;
        let c = Configuration::new(list.points.into_iter().map(Point3::from_array).collect())?;
        return Ok(match list.label {
            Some(l) => c.with_label(l),
            None => c,
        });
    }
    Configuration::new(read_off_file(path)?.vertices)
}
