//! JSON file formats. Emission is canonical: lexicographic multi-index order,
//! sorted blade keys, floats with 17 significant digits, rationals as `"p/q"`.

use std::str::FromStr;

use serde_json::{json, Map, Number, Value};

use crate::clifford::{blade_from_str, blade_to_string, CliffordNumber};
use crate::growth::LnNorms;
use crate::multiindex::MultiIndex;
use crate::operator::{HomTable, OperatorSymbol};
use crate::scalar::{Mode, Scalar};
use crate::series::MonogenicSeries;
use crate::{Error, Result};

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| parse_err(format!("missing field {key:?}")))
}

fn as_usize(v: &Value, key: &str) -> Result<usize> {
    field(v, key)?
        .as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| parse_err(format!("field {key:?} must be a non-negative integer")))
}

fn as_array<'a>(v: &'a Value, key: &str) -> Result<&'a Vec<Value>> {
    field(v, key)?
        .as_array()
        .ok_or_else(|| parse_err(format!("field {key:?} must be an array")))
}

/// Parses JSON text; syntax errors carry line and column.
pub fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| parse_err(e.to_string()))
}

/// Pretty JSON with a trailing newline.
pub fn to_json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

fn scalar_to_json<S: Scalar>(x: &S) -> Value {
    match S::MODE {
        Mode::Exact => Value::String(x.canonical()),
        Mode::Float => Value::Number(Number::from_str(&x.canonical()).expect("finite float literal")),
    }
}

fn scalar_from_json<S: Scalar>(v: &Value) -> Result<S> {
    match v {
        Value::String(s) => S::parse_literal(s),
        Value::Number(x) => S::parse_literal(&x.to_string()),
        other => Err(parse_err(format!("expected a number, found {other}"))),
    }
}

pub fn multiindex_to_json(m: &MultiIndex) -> Value {
    json!(m.entries())
}

pub fn multiindex_from_json(v: &Value, n: usize) -> Result<MultiIndex> {
    let arr = v.as_array().ok_or_else(|| parse_err("multi-index must be an array"))?;
    let entries = arr
        .iter()
        .map(|x| {
            x.as_u64()
                .and_then(|x| u32::try_from(x).ok())
                .ok_or_else(|| parse_err(format!("invalid multi-index entry {x}")))
        })
        .collect::<Result<Vec<u32>>>()?;
    if entries.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: entries.len(),
        });
    }
    Ok(MultiIndex::new(entries))
}

/// Blade map, zero blades omitted.
pub fn clifford_to_json<S: Scalar>(c: &CliffordNumber<S>) -> Value {
    let map: Map<String, Value> = c
        .terms()
        .map(|(b, x)| (blade_to_string(b), scalar_to_json(x)))
        .collect();
    Value::Object(map)
}

pub fn clifford_from_json<S: Scalar>(v: &Value, n: usize) -> Result<CliffordNumber<S>> {
    let obj = v.as_object().ok_or_else(|| parse_err("Clifford value must be an object"))?;
    let terms = obj
        .iter()
        .map(|(k, x)| Ok((blade_from_str(n, k)?, scalar_from_json::<S>(x)?)))
        .collect::<Result<Vec<_>>>()?;
    CliffordNumber::from_terms(n, terms)
}

/// Mode declared by a series object.
pub fn series_mode(v: &Value) -> Result<Mode> {
    let s = field(v, "mode")?
        .as_str()
        .ok_or_else(|| parse_err("field \"mode\" must be a string"))?;
    Mode::from_str(s)
}

pub fn series_to_json<S: Scalar>(f: &MonogenicSeries<S>) -> Value {
    let coeffs: Vec<Value> = f
        .coeffs()
        .map(|(m, c)| json!({"m": multiindex_to_json(m), "value": clifford_to_json(c)}))
        .collect();
    json!({
        "n": f.dim(),
        "degree": f.degree(),
        "mode": S::MODE.as_str(),
        "coeffs": coeffs,
    })
}

pub fn series_from_json<S: Scalar>(v: &Value) -> Result<MonogenicSeries<S>> {
    let mode = series_mode(v)?;
    if mode != S::MODE {
        return Err(Error::InvalidArgument(format!(
            "series is in {} mode, expected {}",
            mode.as_str(),
            S::MODE.as_str()
        )));
    }
    let n = as_usize(v, "n")?;
    if n == 0 || n > crate::clifford::MAX_DIM {
        return Err(Error::UnsupportedDimension(n));
    }
    let degree = as_usize(v, "degree")?;
    let mut f = MonogenicSeries::new(n, degree);
    for entry in as_array(v, "coeffs")? {
        let m = multiindex_from_json(field(entry, "m")?, n)?;
        if f.coeff(&m).is_some() {
            return Err(parse_err(format!("duplicate coefficient {m:?}")));
        }
        let c = clifford_from_json(field(entry, "value")?, n)?;
        f.add_coeff(m, c)?;
    }
    Ok(f)
}

fn table_to_json<'a, S: Scalar>(
    n: usize,
    keys: (&str, &str),
    entries: impl Iterator<Item = (&'a MultiIndex, &'a MonogenicSeries<S>)>,
) -> Value {
    let list: Vec<Value> = entries
        .map(|(m, u)| {
            let mut obj = Map::new();
            obj.insert(keys.0.into(), multiindex_to_json(m));
            obj.insert(keys.1.into(), series_to_json(u));
            Value::Object(obj)
        })
        .collect();
    json!({"n": n, "entries": list})
}

type TableEntries<S> = Vec<(MultiIndex, MonogenicSeries<S>)>;

fn table_from_json<S: Scalar>(v: &Value, keys: (&str, &str)) -> Result<(usize, TableEntries<S>)> {
    let n = as_usize(v, "n")?;
    let mut out: TableEntries<S> = Vec::new();
    for entry in as_array(v, "entries")? {
        let m = multiindex_from_json(field(entry, keys.0)?, n)?;
        if out.iter().any(|(k, _)| k == &m) {
            return Err(parse_err(format!("duplicate entry {m:?}")));
        }
        let u = series_from_json(field(entry, keys.1)?)?;
        if u.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: u.dim(),
            });
        }
        out.push((m, u));
    }
    Ok((n, out))
}

/// Mode of the first series in an operator or homomorphism table, if any.
pub fn table_mode(v: &Value) -> Result<Option<Mode>> {
    let list = as_array(v, "entries")?;
    let Some(first) = list.first() else {
        return Ok(None);
    };
    let obj = first.as_object().ok_or_else(|| parse_err("table entry must be an object"))?;
    let inner = obj
        .get("u")
        .or_else(|| obj.get("b"))
        .ok_or_else(|| parse_err("table entry needs a \"u\" or \"b\" series"))?;
    series_mode(inner).map(Some)
}

pub fn operator_to_json<S: Scalar>(p: &OperatorSymbol<S>) -> Value {
    table_to_json(p.dim(), ("m", "u"), p.entries())
}

pub fn operator_from_json<S: Scalar>(v: &Value) -> Result<OperatorSymbol<S>> {
    let (n, entries) = table_from_json(v, ("m", "u"))?;
    let mut p = OperatorSymbol::new(n);
    for (m, u) in entries {
        p.insert(m, u)?;
    }
    Ok(p)
}

pub fn hom_to_json<S: Scalar>(h: &HomTable<S>) -> Value {
    table_to_json(h.dim(), ("p", "b"), h.entries())
}

/// The table degree is the largest `|p|` present; completeness is checked on conversion.
pub fn hom_from_json<S: Scalar>(v: &Value) -> Result<HomTable<S>> {
    let (n, entries) = table_from_json(v, ("p", "b"))?;
    let degree = entries.iter().map(|(p, _)| p.degree()).max().unwrap_or(0);
    let mut h = HomTable::new(n, degree);
    for (p, b) in entries {
        h.insert(p, b)?;
    }
    Ok(h)
}

/// Coefficient-norm file: `{"n": int, "norms": [{"m": [..], "ln_norm": number}]}`.
pub fn norms_to_json(norms: &LnNorms) -> Value {
    let list: Vec<Value> = norms
        .iter()
        .map(|(m, v)| {
            json!({
                "m": multiindex_to_json(m),
                "ln_norm": Number::from_str(&crate::scalar::format_f64(v)).expect("finite"),
            })
        })
        .collect();
    json!({"n": norms.dim(), "norms": list})
}

pub fn norms_from_json(v: &Value) -> Result<LnNorms> {
    let n = as_usize(v, "n")?;
    let mut out = LnNorms::new(n);
    for entry in as_array(v, "norms")? {
        let m = multiindex_from_json(field(entry, "m")?, n)?;
        let x = field(entry, "ln_norm")?
            .as_f64()
            .ok_or_else(|| parse_err("\"ln_norm\" must be a number"))?;
        out.insert(m, x)?;
    }
    Ok(out)
}

/// Paravector from `"x0,x1,...,xn"`.
pub fn parse_point<S: Scalar>(s: &str) -> Result<crate::clifford::Paravector<S>> {
    let coords = s
        .split(',')
        .map(|t| S::parse_literal(t.trim()))
        .collect::<Result<Vec<S>>>()?;
    let (x0, xv) = coords
        .split_first()
        .ok_or_else(|| parse_err("empty point"))?;
    Ok(crate::clifford::Paravector::new(x0.clone(), xv.to_vec()))
}
