//! JSON encodings of the public types.
//!
//! * field: `{"type":"Q"}` or `{"type":"GF","p":7}`
//! * element: integers as JSON numbers; rationals as `"num/den"` strings
//!   in lowest terms (numbers that overflow i64 also fall back to
//!   strings)
//! * tensor: `{"field":…, "dims":[m,n,q], "entries":[[[…]]]}` indexed
//!   `[i][j][k]`
//! * certificate: `{"R":…, "S":…, "T":…}` with row-major matrix arrays
//!
//! Parsing accepts integer entries for any field (coerced) and
//! `"num/den"` strings over ℚ only.

use num_bigint::BigInt;
use num_traits::One;
use serde::ser::{Serialize, SerializeMap, SerializeSeq, Serializer};
use serde_json::Value;

use crate::error::Error;
use crate::exactmat::ExactMatrix;
use crate::field::{FieldElement, FieldSpec};
use crate::spatial::{EquivCertificate, ModeRanks, ReductionStep, SpatialMatrix};

pub fn field_spec_to_json(spec: &FieldSpec) -> Value {
    match spec.modulus() {
        None => serde_json::json!({ "type": "Q" }),
        Some(p) => serde_json::json!({ "type": "GF", "p": p }),
    }
}

pub fn field_spec_from_json(v: &Value) -> Result<FieldSpec, Error> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::parse("field must be an object"))?;
    let kind = obj
        .get("type")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::parse("field needs a \"type\" of \"Q\" or \"GF\""))?;
    match kind {
        "Q" => Ok(FieldSpec::rationals()),
        "GF" => {
            let p = obj
                .get("p")
                .and_then(Value::as_u64)
                .ok_or_else(|| Error::parse("GF field needs a positive integer \"p\""))?;
            FieldSpec::prime(p)
        }
        other => Err(Error::parse(format!("unknown field type {other:?}"))),
    }
}

pub fn element_to_json(e: &FieldElement) -> Value {
    if let Some(r) = e.as_residue() {
        return Value::from(r);
    }
    let ratio = e.as_ratio().expect("element is rational or residue");
    if ratio.denom().is_one() {
        if let Ok(small) = i64::try_from(ratio.numer().clone()) {
            return Value::from(small);
        }
        return Value::from(ratio.numer().to_string());
    }
    Value::from(format!("{}/{}", ratio.numer(), ratio.denom()))
}

pub fn element_from_json(spec: FieldSpec, v: &Value) -> Result<FieldElement, Error> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(spec.from_integer(i))
            } else if let Some(u) = n.as_u64() {
                Ok(spec.from_bigint(&BigInt::from(u)))
            } else {
                Err(Error::parse(format!("entry {n} is not an exact integer")))
            }
        }
        Value::String(s) => {
            let mut parts = s.splitn(2, '/');
            let num_txt = parts.next().unwrap_or("");
            let num: BigInt = num_txt
                .trim()
                .parse()
                .map_err(|_| Error::parse(format!("bad integer {num_txt:?}")))?;
            match parts.next() {
                None => Ok(spec.from_bigint(&num)),
                Some(den_txt) => {
                    if !spec.is_rationals() {
                        return Err(Error::parse(format!(
                            "fraction {s:?} is only valid over Q"
                        )));
                    }
                    let den: BigInt = den_txt
                        .trim()
                        .parse()
                        .map_err(|_| Error::parse(format!("bad integer {den_txt:?}")))?;
                    if den == BigInt::from(0) {
                        return Err(Error::DivisionByZero);
                    }
                    spec.from_ratio(num_rational::BigRational::new(num, den))
                }
            }
        }
        other => Err(Error::parse(format!(
            "entry must be a number or string, got {other}"
        ))),
    }
}

pub fn matrix_to_json(m: &ExactMatrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| Value::Array(m.row(i).iter().map(element_to_json).collect()))
            .collect(),
    )
}

pub fn matrix_from_json(spec: FieldSpec, v: &Value) -> Result<ExactMatrix, Error> {
    let rows = v
        .as_array()
        .ok_or_else(|| Error::parse("matrix must be an array of rows"))?;
    let mut parsed = Vec::with_capacity(rows.len());
    for row in rows {
        let cells = row
            .as_array()
            .ok_or_else(|| Error::parse("matrix row must be an array"))?;
        parsed.push(
            cells
                .iter()
                .map(|c| element_from_json(spec, c))
                .collect::<Result<Vec<_>, _>>()?,
        );
    }
    ExactMatrix::from_rows(spec, parsed)
}

pub fn tensor_to_json(t: &SpatialMatrix) -> Value {
    let [m, n, q] = t.dims();
    let entries: Vec<Value> = (0..m)
        .map(|i| {
            Value::Array(
                (0..n)
                    .map(|j| {
                        Value::Array((0..q).map(|k| element_to_json(t.get(i, j, k))).collect())
                    })
                    .collect(),
            )
        })
        .collect();
    serde_json::json!({
        "field": field_spec_to_json(&t.spec()),
        "dims": t.dims(),
        "entries": entries,
    })
}

pub fn tensor_from_json(v: &Value) -> Result<SpatialMatrix, Error> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::parse("tensor must be an object"))?;
    let spec = field_spec_from_json(
        obj.get("field")
            .ok_or_else(|| Error::parse("tensor needs a \"field\""))?,
    )?;
    let dims_value = obj
        .get("dims")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::parse("tensor needs \"dims\": [m, n, q]"))?;
    if dims_value.len() != 3 {
        return Err(Error::parse("\"dims\" must have exactly three entries"));
    }
    let mut dims = [0usize; 3];
    for (slot, d) in dims.iter_mut().zip(dims_value) {
        *slot = d
            .as_u64()
            .ok_or_else(|| Error::parse("dimensions must be non-negative integers"))?
            as usize;
    }
    let outer = obj
        .get("entries")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::parse("tensor needs nested \"entries\""))?;
    if outer.len() != dims[0] {
        return Err(Error::parse(format!(
            "expected {} mode-1 layers, got {}",
            dims[0],
            outer.len()
        )));
    }
    let mut entries = Vec::with_capacity(dims[0] * dims[1] * dims[2]);
    for layer in outer {
        let rows = layer
            .as_array()
            .filter(|rows| rows.len() == dims[1])
            .ok_or_else(|| Error::parse("entry layers must match dims"))?;
        for row in rows {
            let cells = row
                .as_array()
                .filter(|cells| cells.len() == dims[2])
                .ok_or_else(|| Error::parse("entry rows must match dims"))?;
            for cell in cells {
                entries.push(element_from_json(spec, cell)?);
            }
        }
    }
    SpatialMatrix::new(spec, dims, entries)
}

pub fn certificate_to_json(c: &EquivCertificate) -> Value {
    serde_json::json!({
        "R": matrix_to_json(c.r()),
        "S": matrix_to_json(c.s()),
        "T": matrix_to_json(c.t()),
    })
}

/// Parses a certificate against the field of the tensor it accompanies;
/// the matrices are validated to be square and nonsingular.
pub fn certificate_from_json(spec: FieldSpec, v: &Value) -> Result<EquivCertificate, Error> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::parse("certificate must be an object"))?;
    let component = |key: &str| -> Result<ExactMatrix, Error> {
        matrix_from_json(
            spec,
            obj.get(key)
                .ok_or_else(|| Error::parse(format!("certificate needs \"{key}\"")))?,
        )
    };
    EquivCertificate::new(component("R")?, component("S")?, component("T")?)
}

impl Serialize for FieldSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        field_spec_to_json(self).serialize(serializer)
    }
}

impl Serialize for FieldElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        element_to_json(self).serialize(serializer)
    }
}

impl Serialize for ExactMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.rows()))?;
        for i in 0..self.rows() {
            seq.serialize_element(&self.row(i).to_vec())?;
        }
        seq.end()
    }
}

impl Serialize for SpatialMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        tensor_to_json(self).serialize(serializer)
    }
}

impl Serialize for EquivCertificate {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        certificate_to_json(self).serialize(serializer)
    }
}

impl Serialize for ModeRanks {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(3))?;
        map.serialize_entry("m", &self.m)?;
        map.serialize_entry("n", &self.n)?;
        map.serialize_entry("q", &self.q)?;
        map.end()
    }
}

impl Serialize for ReductionStep {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(3))?;
        map.serialize_entry("step", self.name)?;
        map.serialize_entry("mode", &self.mode)?;
        map.serialize_entry("certificate", &certificate_to_json(&self.cert))?;
        map.end()
    }
}
