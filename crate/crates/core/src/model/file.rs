//! JSON model documents. Numerals are strings: rationals `"p/q"`, complex values `"a+bi"`.

use std::collections::BTreeMap;
use std::path::Path;

use serde_json::{json, Map, Value};

use super::{Affine, DeckRule, DerivTerm, FrameField, IntAffine, MetricSpec, Model, ModelSpec, StructureCoeff};
use crate::algebra::{fmt_rational, parse_rational, BasisIndex, Form, ModeIndex, Scalar};
use crate::error::{Error, ParseError, Result};

type PResult<T> = std::result::Result<T, ParseError>;

pub fn load_model(path: &Path) -> Result<Model> {
    let text = std::fs::read_to_string(path)?;
    load_model_str(&text)
}

/// Parses a model document. Shape errors surface as [`Error::Parse`] with a field path;
/// `validate` is not run.
pub fn load_model_str(text: &str) -> Result<Model> {
    let doc: Value = serde_json::from_str(text).map_err(|e| ParseError::new("", format!("invalid JSON: {e}")))?;
    let spec = parse_spec(&doc)?;
    Model::new(spec)
}

fn field<'a>(obj: &'a Value, key: &str) -> PResult<&'a Value> {
    obj.as_object().ok_or_else(|| ParseError::new("", "expected an object"))?.get(key).ok_or_else(|| ParseError::new(key, "missing field"))
}

fn nat(v: &Value) -> PResult<usize> {
    v.as_u64().map(|x| x as usize).ok_or_else(|| ParseError::new("", "expected a non-negative integer"))
}

fn int(v: &Value) -> PResult<i64> {
    v.as_i64().ok_or_else(|| ParseError::new("", "expected an integer"))
}

fn array(v: &Value) -> PResult<&Vec<Value>> {
    v.as_array().ok_or_else(|| ParseError::new("", "expected an array"))
}

fn string(v: &Value) -> PResult<&str> {
    v.as_str().ok_or_else(|| ParseError::new("", "expected a string numeral"))
}

fn rational(v: &Value) -> PResult<num_rational::BigRational> {
    parse_rational(string(v)?)
}

fn scalar(v: &Value) -> PResult<Scalar> {
    string(v)?.parse()
}

/// Looks up `key` and runs `f` on it, prefixing the key onto any error path.
fn at<'a, T>(obj: &'a Value, key: &str, f: impl FnOnce(&'a Value) -> PResult<T>) -> PResult<T> {
    let v = field(obj, key)?;
    f(v).map_err(|e| e.under(key))
}

fn each<T>(items: &[Value], mut f: impl FnMut(&Value) -> PResult<T>) -> PResult<Vec<T>> {
    items.iter().enumerate().map(|(i, v)| f(v).map_err(|e| e.under(&format!("[{i}]")))).collect()
}

fn parse_spec(doc: &Value) -> PResult<ModelSpec> {
    let name = at(doc, "name", |v| Ok(string(v)?.to_string()))?;
    let n = at(doc, "n", nat)?;
    let dims = at(doc, "fourier_dims", nat)?;
    if n == 0 || n > 4 {
        return Err(ParseError::new("n", "coframe rank must be in 1..=4"));
    }
    if dims > crate::algebra::trig::MAX_FOURIER_DIMS {
        return Err(ParseError::new("fourier_dims", "at most 4 Fourier directions"));
    }
    let char_base = at(doc, "char_base", rational)?;
    let delta = at(doc, "delta", rational)?;

    let mut structure = vec![Vec::new(); n];
    let entries = at(doc, "structure", |v| each(array(v)?, |e| parse_structure_entry(e, n)))?;
    for (i, (gen, terms)) in entries.into_iter().enumerate() {
        if gen == 0 || gen > n {
            return Err(ParseError::new(format!("structure[{i}].gen"), format!("generator index must be in 1..={n}")));
        }
        structure[gen - 1] = terms;
    }

    let mut derivations = BTreeMap::new();
    let fields = at(doc, "derivations", |v| each(array(v)?, |e| parse_derivation(e, n, dims)))?;
    for (i, (f, rules)) in fields.into_iter().enumerate() {
        if derivations.insert(f, rules).is_some() {
            return Err(ParseError::new(format!("derivations[{i}].field"), format!("duplicate field {f}")));
        }
    }

    let decks = at(doc, "decks", |v| each(array(v)?, |e| parse_deck(e, dims)))?;
    let metric = at(doc, "metric", |v| parse_metric(v, n))?;
    Ok(ModelSpec { name, n, fourier_dims: dims, char_base, delta, structure, derivations, decks, metric })
}

fn parse_basis(v: &Value, n: usize) -> PResult<BasisIndex> {
    let parts = array(v)?;
    if parts.len() != 2 {
        return Err(ParseError::new("", "basis must be [[I],[J]]"));
    }
    let idx = |v: &Value| -> PResult<Vec<usize>> { each(array(v)?, nat) };
    let i = idx(&parts[0]).map_err(|e| e.under("[0]"))?;
    let j = idx(&parts[1]).map_err(|e| e.under("[1]"))?;
    if i.iter().chain(&j).any(|&a| a == 0 || a > n) || i.windows(2).any(|w| w[0] >= w[1]) || j.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ParseError::new("", "basis indices must be strictly increasing within 1..=n"));
    }
    BasisIndex::from_indices(&i, &j).ok_or_else(|| ParseError::new("", "invalid basis indices"))
}

fn parse_structure_entry(v: &Value, n: usize) -> PResult<(usize, Vec<(BasisIndex, StructureCoeff)>)> {
    let gen = at(v, "gen", nat)?;
    let terms = at(v, "terms", |t| {
        each(array(t)?, |term| {
            let b = at(term, "basis", |x| parse_basis(x, n))?;
            let c = at(term, "coeff", |c| Ok(StructureCoeff { c0: at(c, "c0", scalar)?, cdelta: at(c, "cdelta", scalar)? }))?;
            Ok((b, c))
        })
    })?;
    Ok((gen, terms))
}

fn parse_field(s: &str, n: usize) -> PResult<FrameField> {
    let (bar, rest) = match s.strip_prefix("Vbar") {
        Some(r) => (true, r),
        None => (false, s.strip_prefix('V').ok_or_else(|| ParseError::new("", format!("unknown frame field {s:?}")))?),
    };
    let a: usize = rest.parse().map_err(|_| ParseError::new("", format!("unknown frame field {s:?}")))?;
    if a == 0 || a > n {
        return Err(ParseError::new("", format!("frame field index {a} out of range")));
    }
    Ok(if bar { FrameField::Vbar(a) } else { FrameField::V(a) })
}

fn parse_mode(v: &Value, dims: usize) -> PResult<ModeIndex> {
    let c = each(array(v)?, int)?;
    if c.len() != dims {
        return Err(ParseError::new("", format!("expected {dims} components")));
    }
    Ok(ModeIndex::new(&c.into_iter().map(|x| x as i32).collect::<Vec<_>>()))
}

fn parse_derivation(v: &Value, n: usize, dims: usize) -> PResult<(FrameField, Vec<DerivTerm>)> {
    let f = at(v, "field", |x| parse_field(string(x)?, n))?;
    let rules = at(v, "rules", |r| {
        each(array(r)?, |rule| {
            let shift = at(rule, "shift", |x| parse_mode(x, dims))?;
            let affine = at(rule, "affine", |a| {
                let k = at(a, "k", |k| each(array(k)?, scalar))?;
                if k.len() != dims {
                    return Err(ParseError::new("k", format!("expected {dims} entries")));
                }
                Ok(Affine { c0: at(a, "c0", scalar)?, k, cdelta: at(a, "cdelta", scalar)? })
            })?;
            Ok(DerivTerm { shift, affine })
        })
    })?;
    Ok((f, rules))
}

fn parse_deck(v: &Value, dims: usize) -> PResult<DeckRule> {
    let kind = at(v, "kind", |x| Ok(string(x)?.to_string()))?;
    match kind.as_str() {
        "parity" => {
            let index = at(v, "index", nat)?;
            if index >= dims {
                return Err(ParseError::new("index", "mode index out of range"));
            }
            let modulus = at(v, "modulus", int)?;
            if modulus <= 0 {
                return Err(ParseError::new("modulus", "modulus must be positive"));
            }
            Ok(DeckRule::Parity { index, modulus })
        }
        "involution" => {
            let map = at(v, "map", |m| {
                let rows = each(array(m)?, |row| {
                    let r = each(array(row)?, int)?;
                    if r.len() != dims {
                        return Err(ParseError::new("", format!("expected {dims} entries")));
                    }
                    Ok(r)
                })?;
                if rows.len() != dims {
                    return Err(ParseError::new("", format!("expected {dims} rows")));
                }
                Ok(rows)
            })?;
            let phase = at(v, "phase", |p| {
                let k = at(p, "k", |k| each(array(k)?, int))?;
                if k.len() != dims {
                    return Err(ParseError::new("k", format!("expected {dims} entries")));
                }
                Ok(IntAffine { c0: at(p, "c0", int)?, k })
            })?;
            Ok(DeckRule::Involution { map, phase })
        }
        other => Err(ParseError::new("kind", format!("unknown deck rule kind {other:?}"))),
    }
}

fn parse_metric(v: &Value, n: usize) -> PResult<MetricSpec> {
    let norms = at(v, "norms", |x| each(array(x)?, rational))?;
    if norms.len() != n {
        return Err(ParseError::new("norms", format!("expected {n} entries")));
    }
    let omega = at(v, "omega", |x| Form::parse(string(x)?, n))?;
    let volume = at(v, "volume", |x| Form::parse(string(x)?, n))?;
    Ok(MetricSpec { norms, omega, volume })
}

fn basis_json(b: &BasisIndex) -> Value {
    json!([b.hol_indices(), b.anti_indices()])
}

fn mode_json(k: &ModeIndex) -> Value {
    json!(k.components())
}

/// Serializes a model to its JSON document. Keys are emitted in sorted order.
pub fn to_document(m: &Model) -> Value {
    let spec = m.spec();
    let structure: Vec<Value> = spec
        .structure
        .iter()
        .enumerate()
        .map(|(a, terms)| {
            let terms: Vec<Value> = terms
                .iter()
                .map(|(b, c)| json!({"basis": basis_json(b), "coeff": {"c0": c.c0.to_string(), "cdelta": c.cdelta.to_string()}}))
                .collect();
            json!({"gen": a + 1, "terms": terms})
        })
        .collect();
    let derivations: Vec<Value> = spec
        .derivations
        .iter()
        .map(|(f, rules)| {
            let rules: Vec<Value> = rules
                .iter()
                .map(|t| {
                    json!({
                        "shift": mode_json(&t.shift),
                        "affine": {
                            "c0": t.affine.c0.to_string(),
                            "k": t.affine.k.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                            "cdelta": t.affine.cdelta.to_string(),
                        }
                    })
                })
                .collect();
            json!({"field": f.to_string(), "rules": rules})
        })
        .collect();
    let decks: Vec<Value> = spec
        .decks
        .iter()
        .map(|d| match d {
            DeckRule::Parity { index, modulus } => json!({"kind": "parity", "index": index, "modulus": modulus}),
            DeckRule::Involution { map, phase } => json!({"kind": "involution", "map": map, "phase": {"c0": phase.c0, "k": phase.k}}),
        })
        .collect();
    let mut metric = Map::new();
    metric.insert("norms".into(), json!(spec.metric.norms.iter().map(fmt_rational).collect::<Vec<_>>()));
    metric.insert("omega".into(), json!(spec.metric.omega.to_string()));
    metric.insert("volume".into(), json!(spec.metric.volume.to_string()));
    json!({
        "name": spec.name,
        "n": spec.n,
        "fourier_dims": spec.fourier_dims,
        "char_base": fmt_rational(&spec.char_base),
        "delta": fmt_rational(&spec.delta),
        "structure": structure,
        "derivations": derivations,
        "decks": decks,
        "metric": Value::Object(metric),
    })
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(ParseError::new("", e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{builtin, BuiltinName};

    fn kt_doc() -> Value {
        to_document(&builtin(BuiltinName::Kt, &crate::model::rat(1, 1)).unwrap())
    }

    #[test]
    fn round_trip_all_builtins() {
        for name in [BuiltinName::Kt, BuiltinName::Hyperelliptic, BuiltinName::Torus4] {
            let m = builtin(name, &crate::model::rat(1, 2)).unwrap();
            let text = serde_json::to_string_pretty(&to_document(&m)).unwrap();
            let back = load_model_str(&text).unwrap();
            assert_eq!(back, m);
            assert_eq!(serde_json::to_string_pretty(&to_document(&back)).unwrap(), text);
        }
    }

    #[test]
    fn missing_volume_names_path() {
        let mut doc = kt_doc();
        doc["metric"].as_object_mut().unwrap().remove("volume");
        let err = load_model_str(&doc.to_string()).unwrap_err();
        match err {
            Error::Parse(p) => assert_eq!(p.path, "metric.volume"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn decimal_numerals_rejected() {
        let mut doc = kt_doc();
        doc["delta"] = json!("0.5");
        match load_model_str(&doc.to_string()).unwrap_err() {
            Error::Parse(p) => assert_eq!(p.path, "delta"),
            other => panic!("unexpected {other:?}"),
        }
        let mut doc = kt_doc();
        doc["structure"][1]["terms"][0]["coeff"]["cdelta"] = json!(2);
        match load_model_str(&doc.to_string()).unwrap_err() {
            Error::Parse(p) => assert_eq!(p.path, "structure[1].terms[0].coeff.cdelta"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
