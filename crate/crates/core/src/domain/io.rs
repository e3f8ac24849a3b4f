//! JSON field documents.
//!
//! ```text
//! {"grid": {"kind": "disk" | "square" | "square-periodic", "R": <f64>, "n": <int>},
//!  "components": k,
//!  "values": [ ... n*n entries, row-major, x fastest ... ]}
//! ```
//!
//! Each entry is a number (`k = 1`), an array of `k` numbers, or `null` for a
//! node outside the mask. Reals are written with 17 significant digits so a
//! write/read cycle is lossless. An optional `"center": [x, y]` is written
//! only for grids not centered at the origin.

use std::fmt::Write as _;
use std::sync::Arc;

use serde_json::Value;

use crate::error::{Error, Result};

use super::field::{Field, FieldValue};
use super::grid::{Grid, GridKind};

/// Format a real with 17 significant decimal digits.
pub fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

/// Kind tag as it appears in files.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileKind {
    Disk,
    Square,
    SquarePeriodic,
}

impl FileKind {
    fn parse(s: &str) -> Result<Self> {
        match s {
            "disk" => Ok(FileKind::Disk),
            "square" => Ok(FileKind::Square),
            "square-periodic" => Ok(FileKind::SquarePeriodic),
            other => Err(Error::parse(format!("unknown grid kind {other:?}"))),
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            FileKind::Disk => "disk",
            FileKind::Square => "square",
            FileKind::SquarePeriodic => "square-periodic",
        }
    }
}

/// Raw, validated contents of a field document.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldDocument {
    pub kind: FileKind,
    pub radius: f64,
    pub n: usize,
    pub center: [f64; 2],
    pub components: usize,
    /// `n * n` entries; `None` marks an unmasked node.
    pub values: Vec<Option<Vec<f64>>>,
}

const MAX_N: usize = 4096;

fn real(v: &Value, what: &str) -> Result<f64> {
    let x = v.as_f64().ok_or_else(|| Error::parse(format!("{what} must be a number")))?;
    if !x.is_finite() {
        return Err(Error::parse(format!("{what} must be finite")));
    }
    Ok(x)
}

impl FieldDocument {
    pub fn parse(text: &str) -> Result<Self> {
        let doc: Value = serde_json::from_str(text)?;
        Self::from_value(&doc)
    }

    pub fn from_value(doc: &Value) -> Result<Self> {
        let grid = doc.get("grid").ok_or_else(|| Error::parse("missing \"grid\""))?;
        let kind = FileKind::parse(
            grid.get("kind").and_then(Value::as_str).ok_or_else(|| Error::parse("grid.kind must be a string"))?,
        )?;
        let radius = real(grid.get("R").ok_or_else(|| Error::parse("missing grid.R"))?, "grid.R")?;
        if radius <= 0.0 {
            return Err(Error::parse("grid.R must be positive"));
        }
        let n = grid
            .get("n")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::parse("grid.n must be a non-negative integer"))?;
        if !(4..=MAX_N as u64).contains(&n) {
            return Err(Error::parse(format!("grid.n must lie in [4, {MAX_N}], got {n}")));
        }
        let n = n as usize;
        let center = match grid.get("center").or_else(|| doc.get("center")) {
            None => [0.0, 0.0],
            Some(Value::Array(c)) if c.len() == 2 => [real(&c[0], "center[0]")?, real(&c[1], "center[1]")?],
            Some(_) => return Err(Error::parse("center must be a pair of numbers")),
        };
        let components = doc
            .get("components")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::parse("components must be a positive integer"))?;
        if !(1..=3).contains(&components) {
            return Err(Error::parse(format!("components must be 1, 2 or 3, got {components}")));
        }
        let components = components as usize;
        let raw = doc.get("values").and_then(Value::as_array).ok_or_else(|| Error::parse("values must be an array"))?;
        if raw.len() != n * n {
            return Err(Error::parse(format!("expected {} values, found {}", n * n, raw.len())));
        }
        let mut values = Vec::with_capacity(raw.len());
        for (l, entry) in raw.iter().enumerate() {
            let v = match entry {
                Value::Null => None,
                Value::Array(items) => {
                    if items.len() != components {
                        return Err(Error::parse(format!(
                            "value {l} has {} components, expected {components}",
                            items.len()
                        )));
                    }
                    Some(items.iter().map(|x| real(x, "value")).collect::<Result<Vec<_>>>()?)
                }
                scalar if components == 1 => Some(vec![real(scalar, "value")?]),
                _ => return Err(Error::parse(format!("value {l} must be an array of {components}"))),
            };
            values.push(v);
        }
        if kind == FileKind::SquarePeriodic && values.iter().any(Option::is_none) {
            return Err(Error::parse("periodic fields cannot contain null entries"));
        }
        Ok(FieldDocument { kind, radius, n, center, components, values })
    }

    pub fn to_json(&self) -> String {
        let mut out = String::with_capacity(self.values.len() * 26 + 128);
        let _ = write!(
            out,
            "{{\"grid\":{{\"kind\":\"{}\",\"R\":{},\"n\":{}",
            self.kind.as_str(),
            fmt_real(self.radius),
            self.n
        );
        if self.center != [0.0, 0.0] {
            let _ = write!(out, ",\"center\":[{},{}]", fmt_real(self.center[0]), fmt_real(self.center[1]));
        }
        let _ = write!(out, "}},\"components\":{},\"values\":[", self.components);
        for (l, v) in self.values.iter().enumerate() {
            if l > 0 {
                out.push(',');
            }
            match v {
                None => out.push_str("null"),
                Some(c) if self.components == 1 => out.push_str(&fmt_real(c[0])),
                Some(c) => {
                    out.push('[');
                    for (i, x) in c.iter().enumerate() {
                        if i > 0 {
                            out.push(',');
                        }
                        out.push_str(&fmt_real(*x));
                    }
                    out.push(']');
                }
            }
        }
        out.push_str("]}");
        out
    }

    /// Builds the grid described by the document, with the null pattern as mask.
    pub fn grid(&self) -> Result<Grid> {
        let kind = match self.kind {
            FileKind::Disk => GridKind::Disk,
            FileKind::Square | FileKind::SquarePeriodic => GridKind::Square,
        };
        let base = Grid::with_center(kind, self.center, self.radius, self.n)?;
        let mask: Vec<bool> = self.values.iter().map(Option::is_some).collect();
        if mask.as_slice() == base.mask() {
            Ok(base)
        } else {
            base.with_mask(mask)
        }
    }

    pub fn into_field<T: FieldValue>(self) -> Result<Field<T>> {
        if self.components != T::COMPONENTS {
            return Err(Error::parse(format!(
                "expected a {}-component field, found {}",
                T::COMPONENTS,
                self.components
            )));
        }
        let grid = Arc::new(self.grid()?);
        let values = self.values.into_iter().flatten().map(|c| T::from_components(&c)).collect();
        Field::new(grid, values)
    }

    pub fn from_field<T: FieldValue>(f: &Field<T>) -> Self {
        let grid = f.grid();
        let values = (0..grid.n() * grid.n())
            .map(|l| f.at_lattice(l).map(|v| (0..T::COMPONENTS).map(|c| v.component(c)).collect()))
            .collect();
        FieldDocument {
            kind: match grid.kind() {
                GridKind::Disk => FileKind::Disk,
                GridKind::Square => FileKind::Square,
            },
            radius: grid.radius(),
            n: grid.n(),
            center: grid.center(),
            components: T::COMPONENTS,
            values,
        }
    }
}

/// Serializes a field to the JSON document format.
pub fn field_to_json<T: FieldValue>(f: &Field<T>) -> String {
    FieldDocument::from_field(f).to_json()
}

/// Parses a field document into a typed field.
pub fn field_from_json<T: FieldValue>(text: &str) -> Result<Field<T>> {
    FieldDocument::parse(text)?.into_field()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{ScalarField, VecField3};

    #[test]
    fn scalar_round_trip_is_lossless() {
        let g = Arc::new(Grid::disk(1.0, 16).unwrap());
        let f = ScalarField::from_fn(g, |[x, y]| (x * 1.7).sin() / 3.0 + y * 1e-9).unwrap();
        let text = field_to_json(&f);
        assert!(text.contains("null"));
        let back: ScalarField = field_from_json(&text).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn restricted_mask_survives_round_trip() {
        let g = Arc::new(Grid::disk(1.0, 16).unwrap());
        let f = VecField3::from_fn(g, |[x, y]| [x, y, 1.0]).unwrap().restrict(0.5).unwrap();
        let back: VecField3 = field_from_json(&field_to_json(&f)).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn writes_seventeen_significant_digits() {
        assert_eq!(fmt_real(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_real(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn rejects_malformed_documents() {
        for bad in [
            "{}",
            r#"{"grid":{"kind":"disk","R":1,"n":2},"components":1,"values":[1,2,3,4]}"#,
            r#"{"grid":{"kind":"blob","R":1,"n":4},"components":1,"values":[]}"#,
            r#"{"grid":{"kind":"square","R":-1,"n":4},"components":1,"values":[]}"#,
            r#"{"grid":{"kind":"square","R":1,"n":4},"components":1,"values":[1]}"#,
            r#"{"grid":{"kind":"square","R":1,"n":4},"components":4,"values":[]}"#,
        ] {
            assert!(FieldDocument::parse(bad).is_err(), "{bad}");
        }
        // A masked node outside the disk is rejected.
        let mut vals = vec!["0".to_string(); 16];
        vals[5] = "null".into();
        let text = format!(r#"{{"grid":{{"kind":"disk","R":1,"n":4}},"components":1,"values":[{}]}}"#, vals.join(","));
        assert!(field_from_json::<f64>(&text).is_err());
    }
}
