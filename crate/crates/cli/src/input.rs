//! Parsing of fields, elements, triples and models from command-line text.

use std::path::Path;

use kraus_core::arith::parse_rational;
use kraus_core::audit::builtin_field;
use kraus_core::curve::WeierstrassModel;
use kraus_core::nf::{factor_rational_prime, make_field, Field, FieldElement, FieldExt, PrimeIdeal};
use num_bigint::BigInt;
use serde::Deserialize;
use serde_json::Value;

use crate::CliError;

#[derive(Deserialize)]
struct FieldFile {
    defining_poly: Vec<Value>,
}

fn integer_list(items: &[Value]) -> Result<Vec<BigInt>, CliError> {
    items
        .iter()
        .map(|v| {
            let text = match v {
                Value::Number(n) => n.to_string(),
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            text.trim()
                .parse::<BigInt>()
                .map_err(|_| CliError::Input(format!("polynomial coefficient {v} is not an integer")))
        })
        .collect()
}

/// A builtin name, an inline coefficient list `[c0, c1, ..., 1]`, or a JSON
/// file `{"defining_poly": [...]}` (coefficients from the constant term up).
pub fn parse_field(spec: &str) -> Result<Field, CliError> {
    let spec = spec.trim();
    if spec.starts_with('[') {
        let items: Vec<Value> = serde_json::from_str(spec)
            .map_err(|e| CliError::Input(format!("bad polynomial {spec}: {e}")))?;
        return make_field(&integer_list(&items)?).map_err(|e| CliError::Input(e.to_string()));
    }
    if let Ok(k) = builtin_field(spec) {
        return Ok(k);
    }
    let path = Path::new(spec);
    if !path.exists() {
        return Err(CliError::Input(format!("unknown field {spec:?}: not a builtin name or a file")));
    }
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("reading {spec}: {e}")))?;
    let file: FieldFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("field file {spec}: {e}")))?;
    make_field(&integer_list(&file.defining_poly)?).map_err(|e| CliError::Input(e.to_string()))
}

fn rational_from_value(v: &Value) -> Result<num_rational::BigRational, CliError> {
    let text = match v {
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        other => return Err(CliError::Input(format!("expected a rational, got {other}"))),
    };
    parse_rational(&text).map_err(|e| CliError::Input(e.to_string()))
}

/// An integer, a `"num/den"` string, or a list of power-basis coordinates.
pub fn element_from_value(k: &Field, v: &Value) -> Result<FieldElement, CliError> {
    match v {
        Value::Array(coords) => {
            if coords.len() != k.degree() {
                return Err(CliError::Input(format!(
                    "element {v} has {} coordinates, field degree is {}",
                    coords.len(),
                    k.degree()
                )));
            }
            let qs = coords.iter().map(rational_from_value).collect::<Result<Vec<_>, _>>()?;
            k.from_rationals(qs).map_err(|e| CliError::Input(e.to_string()))
        }
        _ => Ok(k.from_rational(rational_from_value(v)?)),
    }
}

fn parse_json(what: &str, text: &str) -> Result<Value, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Input(format!("{what} {text:?}: {e}")))
}

pub fn parse_element(k: &Field, text: &str) -> Result<FieldElement, CliError> {
    element_from_value(k, &parse_json("element", text)?)
}

fn parse_list(k: &Field, what: &str, text: &str, n: usize) -> Result<Vec<FieldElement>, CliError> {
    let v = parse_json(what, text)?;
    let Value::Array(items) = v else {
        return Err(CliError::Input(format!("{what} must be a JSON list")));
    };
    if items.len() != n {
        return Err(CliError::Input(format!("{what} needs {n} entries, got {}", items.len())));
    }
    items.iter().map(|x| element_from_value(k, x)).collect()
}

pub fn parse_ainvs(k: &Field, text: &str) -> Result<WeierstrassModel, CliError> {
    let a = parse_list(k, "a-invariants", text, 5)?;
    let a: [FieldElement; 5] = a.try_into().expect("length checked");
    WeierstrassModel::new(a).map_err(CliError::Compute)
}

pub fn parse_triple(k: &Field, text: &str) -> Result<[FieldElement; 3], CliError> {
    let t = parse_list(k, "triple", text, 3)?;
    Ok(t.try_into().expect("length checked"))
}

pub struct WitnessInput {
    pub a: FieldElement,
    pub b: FieldElement,
    pub c: FieldElement,
    pub p: u64,
}

/// `{"a": .., "b": .., "c": .., "p": 3}`.
pub fn parse_witness(k: &Field, text: &str) -> Result<WitnessInput, CliError> {
    let v = parse_json("witness", text)?;
    let get = |key: &str| {
        v.get(key)
            .ok_or_else(|| CliError::Input(format!("witness is missing {key:?}")))
    };
    let p = get("p")?
        .as_u64()
        .ok_or_else(|| CliError::Input("witness exponent p must be a positive integer".into()))?;
    Ok(WitnessInput {
        a: element_from_value(k, get("a")?)?,
        b: element_from_value(k, get("b")?)?,
        c: element_from_value(k, get("c")?)?,
        p,
    })
}

/// The `index`-th prime above `p` in the library's canonical order.
pub fn select_prime(k: &Field, p: u64, index: usize) -> Result<PrimeIdeal, CliError> {
    let primes = factor_rational_prime(k, &BigInt::from(p)).map_err(|e| match e {
        kraus_core::Error::NotPrime(_) => CliError::Input(e.to_string()),
        other => CliError::Compute(other),
    })?;
    let n = primes.len();
    primes
        .into_iter()
        .nth(index)
        .ok_or_else(|| CliError::Input(format!("prime index {index} out of range: {n} prime(s) above {p}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn elements() {
        let k = parse_field("Qsqrt2").unwrap();
        let x = element_from_value(&k, &json!(["1/2", -3])).unwrap();
        assert_eq!(x.to_string(), parse_element(&k, "[\"1/2\", -3]").unwrap().to_string());
        assert!(element_from_value(&k, &json!([1])).is_err());
        assert_eq!(element_from_value(&k, &json!("-7/3")).unwrap().coords().len(), 2);
        assert!(parse_field("[-2, 0, 1]").is_ok());
        assert!(matches!(parse_field("nowhere"), Err(CliError::Input(_))));
    }
}
