//! JSON exchange format for polytopes.
//!
//! ```json
//! {"rep": "V", "dim": 2, "mode": "exact", "symmetric": true,
//!  "data": [["1", "0"], ["-1", "0"], ["0", "1"], ["0", "-1"]]}
//! ```
//!
//! `rep` is `"V"` (rows are vertices) or `"H"` (rows are `[a_1, …, a_n, b]`
//! meaning `⟨a, x⟩ ≤ b`). Exact scalars are strings `"p/q"` (plain integers
//! are accepted too); approx scalars are JSON numbers. `tol` is optional and
//! only meaningful in approx mode.

use serde_json::{json, Map, Value};

use super::polytope::{default_tol, HPolytope, Halfspace, VPolytope};
use super::scalar::{Mode, Rational, Scalar};
use crate::error::{Error, Result};

/// Either representation of a polytope over one number type.
#[derive(Debug, Clone, PartialEq)]
pub enum Polytope<F> {
    V(VPolytope<F>),
    H(HPolytope<F>),
}

impl<F: Scalar> Polytope<F> {
    pub fn dim(&self) -> usize {
        match self {
            Polytope::V(p) => p.dim(),
            Polytope::H(p) => p.dim(),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        match self {
            Polytope::V(p) => p.is_symmetric(),
            Polytope::H(p) => p.is_symmetric(),
        }
    }

    pub fn tol(&self) -> f64 {
        match self {
            Polytope::V(p) => p.tol(),
            Polytope::H(p) => p.tol(),
        }
    }

    pub fn to_v(&self) -> Result<VPolytope<F>> {
        match self {
            Polytope::V(p) => Ok(p.clone()),
            Polytope::H(p) => p.to_v(),
        }
    }

    pub fn to_h(&self) -> Result<HPolytope<F>> {
        match self {
            Polytope::V(p) => p.to_h(),
            Polytope::H(p) => Ok(p.clone()),
        }
    }

    pub fn convert<G: Scalar>(&self, tol: f64) -> Polytope<G> {
        match self {
            Polytope::V(p) => Polytope::V(p.convert(tol)),
            Polytope::H(p) => Polytope::H(p.convert(tol)),
        }
    }

    pub fn to_json(&self) -> Value {
        let (rep, data, symmetric): (&str, Vec<Value>, bool) = match self {
            Polytope::V(p) => (
                "V",
                p.vertices()
                    .iter()
                    .map(|v| Value::Array(v.iter().map(F::to_json).collect()))
                    .collect(),
                p.is_symmetric(),
            ),
            Polytope::H(p) => (
                "H",
                p.rows()
                    .iter()
                    .map(|r| {
                        let mut row: Vec<Value> = r.normal.iter().map(F::to_json).collect();
                        row.push(r.offset.to_json());
                        Value::Array(row)
                    })
                    .collect(),
                p.is_symmetric(),
            ),
        };
        let mut obj = Map::new();
        obj.insert("rep".into(), json!(rep));
        obj.insert("dim".into(), json!(self.dim()));
        obj.insert("mode".into(), json!(F::MODE.to_string()));
        obj.insert("symmetric".into(), json!(symmetric));
        if F::MODE == Mode::Approx {
            obj.insert("tol".into(), json!(self.tol()));
        }
        obj.insert("data".into(), Value::Array(data));
        Value::Object(obj)
    }

    fn from_parts(rep: &str, dim: usize, data: &[Value], tol: f64) -> Result<Self> {
        let width = if rep == "H" { dim + 1 } else { dim };
        let mut rows: Vec<Vec<F>> = Vec::with_capacity(data.len());
        for (i, row) in data.iter().enumerate() {
            let field = format!("data[{i}]");
            let arr = row
                .as_array()
                .ok_or_else(|| Error::format(&field, "expected an array"))?;
            if arr.len() != width {
                return Err(Error::format(
                    &field,
                    format!("expected {width} entries for rep {rep} in dimension {dim}, found {}", arr.len()),
                ));
            }
            let parsed = arr
                .iter()
                .enumerate()
                .map(|(j, x)| F::parse_json(x).map_err(|m| Error::format(format!("data[{i}][{j}]"), m)))
                .collect::<Result<Vec<F>>>()?;
            rows.push(parsed);
        }
        if rows.is_empty() {
            return Err(Error::format("data", "no rows"));
        }
        match rep {
            "V" => Ok(Polytope::V(VPolytope::hull_with_tol(rows, tol)?)),
            _ => {
                let rows = rows
                    .into_iter()
                    .map(|mut r| {
                        let b = r.pop().expect("width >= 2");
                        Halfspace::new(r, b)
                    })
                    .collect();
                Ok(Polytope::H(HPolytope::new_with_tol(dim, rows, tol)?))
            }
        }
    }
}

/// A polytope in either arithmetic mode, as read from a file.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyPolytope {
    Exact(Polytope<Rational>),
    Approx(Polytope<f64>),
}

impl AnyPolytope {
    pub fn mode(&self) -> Mode {
        match self {
            AnyPolytope::Exact(_) => Mode::Exact,
            AnyPolytope::Approx(_) => Mode::Approx,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            AnyPolytope::Exact(p) => p.dim(),
            AnyPolytope::Approx(p) => p.dim(),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            AnyPolytope::Exact(p) => p.to_json(),
            AnyPolytope::Approx(p) => p.to_json(),
        }
    }

    /// Switches arithmetic mode. Approx → exact converts each float exactly.
    pub fn into_mode(self, mode: Mode, tol: f64) -> AnyPolytope {
        match (self, mode) {
            (AnyPolytope::Exact(p), Mode::Approx) => AnyPolytope::Approx(p.convert(tol)),
            (AnyPolytope::Approx(p), Mode::Exact) => AnyPolytope::Exact(p.convert(0.0)),
            (AnyPolytope::Approx(p), Mode::Approx) => AnyPolytope::Approx(match p {
                Polytope::V(v) => Polytope::V(v.with_tol(tol)),
                Polytope::H(h) => Polytope::H(h.with_tol(tol)),
            }),
            (p, _) => p,
        }
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| Error::format("<root>", "expected a JSON object"))?;
        let rep = obj
            .get("rep")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::format("rep", "missing or not a string"))?;
        if rep != "V" && rep != "H" {
            return Err(Error::format("rep", format!("expected \"V\" or \"H\", found {rep:?}")));
        }
        let dim = obj
            .get("dim")
            .and_then(Value::as_u64)
            .filter(|&d| d >= 1)
            .ok_or_else(|| Error::format("dim", "missing or not a positive integer"))? as usize;
        let mode: Mode = obj
            .get("mode")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::format("mode", "missing or not a string"))?
            .parse()
            .map_err(|m: String| Error::format("mode", m))?;
        let data = obj
            .get("data")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::format("data", "missing or not an array"))?;
        let tol = match obj.get("tol") {
            None | Some(Value::Null) => None,
            Some(t) => Some(
                t.as_f64()
                    .filter(|t| t.is_finite() && *t >= 0.0)
                    .ok_or_else(|| Error::format("tol", "expected a nonnegative number"))?,
            ),
        };
        let declared_symmetric = match obj.get("symmetric") {
            None => None,
            Some(Value::Bool(b)) => Some(*b),
            Some(_) => return Err(Error::format("symmetric", "expected a boolean")),
        };
        let parsed = match mode {
            Mode::Exact => AnyPolytope::Exact(Polytope::from_parts(rep, dim, data, 0.0)?),
            Mode::Approx => AnyPolytope::Approx(Polytope::from_parts(
                rep,
                dim,
                data,
                tol.unwrap_or_else(default_tol::<f64>),
            )?),
        };
        let actual = match &parsed {
            AnyPolytope::Exact(p) => p.is_symmetric(),
            AnyPolytope::Approx(p) => p.is_symmetric(),
        };
        if declared_symmetric == Some(true) && !actual {
            return Err(Error::format("symmetric", "declared symmetric but the data is not"));
        }
        Ok(parsed)
    }

    pub fn from_str(s: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(s).map_err(|e| Error::format("<root>", e.to_string()))?;
        Self::from_json(&v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_exact_v() {
        let s = r#"{"rep":"V","dim":2,"mode":"exact","symmetric":true,
                    "data":[["1/2","0"],["-1/2","0"],["0","1"],["0","-1"],["0","0"]]}"#;
        let p = AnyPolytope::from_str(s).unwrap();
        let AnyPolytope::Exact(Polytope::V(v)) = &p else { panic!() };
        assert_eq!(v.vertices().len(), 4);
        let back = AnyPolytope::from_json(&p.to_json()).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn round_trip_approx_h() {
        let s = r#"{"rep":"H","dim":1,"mode":"approx","data":[[1.0,2.0],[-1.0,2.0],[1.0,5.0]]}"#;
        let p = AnyPolytope::from_str(s).unwrap();
        let AnyPolytope::Approx(Polytope::H(h)) = &p else { panic!() };
        assert_eq!(h.rows().len(), 2);
        assert_eq!(AnyPolytope::from_json(&p.to_json()).unwrap(), p);
    }

    fn field_of(s: &str) -> String {
        match AnyPolytope::from_str(s).unwrap_err() {
            Error::Format { field, .. } => field,
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn malformed_inputs_name_the_field() {
        assert_eq!(field_of(r#"{"rep":"X","dim":1,"mode":"exact","data":[]}"#), "rep");
        assert_eq!(field_of(r#"{"rep":"V","dim":0,"mode":"exact","data":[]}"#), "dim");
        assert_eq!(field_of(r#"{"rep":"V","dim":1,"mode":"fuzzy","data":[]}"#), "mode");
        assert_eq!(field_of(r#"{"rep":"V","dim":2,"mode":"exact","data":[["1"]]}"#), "data[0]");
        assert_eq!(field_of(r#"{"rep":"V","dim":1,"mode":"exact","data":[["1/0"]]}"#), "data[0][0]");
        assert_eq!(
            field_of(r#"{"rep":"V","dim":1,"mode":"exact","symmetric":true,"data":[["1"],["2"]]}"#),
            "symmetric"
        );
        assert_eq!(field_of("not json"), "<root>");
    }
}
