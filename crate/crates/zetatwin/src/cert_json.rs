//! JSON rendering and structural validation of certificates.

use serde_json::{json, Map, Value as Json};
use zetatwin_core::parse::format_rational;
use zetatwin_core::prover::{Certificate, Value, Verdict, SCHEMA};

/// Metadata that lives outside the core certificate.
#[derive(Clone, Debug, Default)]
pub struct ExtraMeta {
    pub units_sha256_k: Option<String>,
    pub units_sha256_k_prime: Option<String>,
    pub elapsed_ms: Option<u128>,
}

pub fn value_to_json(v: &Value) -> Json {
    match v {
        Value::Bool(b) => Json::Bool(*b),
        Value::Int(n) => i64::try_from(n).map_or_else(|_| Json::String(n.to_string()), Json::from),
        Value::Text(s) => Json::String(s.clone()),
        Value::Rational(q) => Json::String(format_rational(q)),
        Value::Ball { decimal, precision } => json!({
            "decimal": decimal,
            "precision_bits": precision,
        }),
        Value::List(items) => Json::Array(items.iter().map(value_to_json).collect()),
        Value::Record(fields) => record(fields),
    }
}

fn record(fields: &[(String, Value)]) -> Json {
    Json::Object(
        fields
            .iter()
            .map(|(k, v)| (k.clone(), value_to_json(v)))
            .collect(),
    )
}

pub fn verdict_to_json(v: &Verdict) -> Json {
    match v {
        Verdict::Exact { quotient, value, assumptions }
        | Verdict::LowerBound { quotient, value, assumptions } => json!({
            "kind": if v.is_exact() { "exact" } else { "lower_bound" },
            "quotient": quotient.as_str(),
            "value": format_rational(value),
            "assumptions": assumptions,
            "summary": v.to_string(),
        }),
        Verdict::Inconclusive { reason } => json!({
            "kind": "inconclusive",
            "reason": reason,
            "summary": v.to_string(),
        }),
    }
}

pub fn certificate_to_json(cert: &Certificate, extra: &ExtraMeta) -> Json {
    let steps: Vec<Json> = cert
        .steps
        .iter()
        .map(|s| {
            let mut o = Map::new();
            o.insert("name".into(), s.name.clone().into());
            o.insert("status".into(), s.status.as_str().into());
            o.insert("values".into(), record(&s.values));
            o.insert("citation".into(), s.citation.clone().into());
            if let Some(n) = &s.note {
                o.insert("note".into(), n.clone().into());
            }
            Json::Object(o)
        })
        .collect();
    let assumptions: Vec<Json> = cert
        .assumptions
        .iter()
        .map(|a| json!({"id": a.id, "statement": a.statement, "citation": a.citation}))
        .collect();
    let mut meta = Map::new();
    meta.insert("tool".into(), concat!("zetatwin ", env!("CARGO_PKG_VERSION")).into());
    meta.insert("requested_precision_bits".into(), cert.meta.requested_precision.into());
    meta.insert("precision_bits_k".into(), cert.meta.precision_k.into());
    meta.insert("precision_bits_k_prime".into(), cert.meta.precision_k_prime.into());
    meta.insert("options".into(), record(&cert.meta.options));
    meta.insert(
        "units_sha256".into(),
        json!({"k": extra.units_sha256_k, "k_prime": extra.units_sha256_k_prime}),
    );
    if let Some(ms) = extra.elapsed_ms {
        meta.insert("timing".into(), json!({ "elapsed_ms": ms as u64 }));
    }
    json!({
        "schema": cert.schema,
        "input": {
            "a": value_to_json(&Value::Int(cert.input.a.clone())),
            "a_prime": value_to_json(&Value::Int(cert.input.a_prime.clone())),
            "units_k": cert.input.units_k,
            "units_k_prime": cert.input.units_k_prime,
        },
        "steps": steps,
        "assumptions": assumptions,
        "verdict": verdict_to_json(&cert.verdict),
        "meta": meta,
    })
}

/// Removes `meta.timing`, the only nondeterministic part.
pub fn strip_timing(cert: &mut Json) {
    if let Some(meta) = cert.get_mut("meta").and_then(Json::as_object_mut) {
        meta.remove("timing");
    }
}

/// Checks the shape of a serialized certificate.
pub fn validate(cert: &Json) -> Result<(), String> {
    let obj = cert.as_object().ok_or("certificate is not an object")?;
    for key in ["schema", "input", "steps", "assumptions", "verdict", "meta"] {
        if !obj.contains_key(key) {
            return Err(format!("missing key {key:?}"));
        }
    }
    if obj["schema"] != SCHEMA {
        return Err(format!("unknown schema {}", obj["schema"]));
    }
    let steps = obj["steps"].as_array().ok_or("steps is not an array")?;
    for (i, s) in steps.iter().enumerate() {
        for key in ["name", "status", "values", "citation"] {
            if s.get(key).is_none() {
                return Err(format!("step {i} lacks {key:?}"));
            }
        }
        let status = s["status"].as_str().unwrap_or_default();
        if !["passed", "failed", "skipped", "info"].contains(&status) {
            return Err(format!("step {i} has status {status:?}"));
        }
        if !s["values"].is_object() {
            return Err(format!("step {i} values is not an object"));
        }
    }
    for a in obj["assumptions"].as_array().ok_or("assumptions is not an array")? {
        if a.get("id").and_then(Json::as_str).is_none() {
            return Err("assumption without id".into());
        }
    }
    match obj["verdict"].get("kind").and_then(Json::as_str) {
        Some("exact" | "lower_bound") => {
            let known: Vec<&str> = obj["assumptions"]
                .as_array()
                .into_iter()
                .flatten()
                .filter_map(|a| a["id"].as_str())
                .collect();
            let used = obj["verdict"]["assumptions"]
                .as_array()
                .ok_or("verdict lists no assumptions")?;
            if let Some(u) = used.iter().find(|u| !known.contains(&u.as_str().unwrap_or_default())) {
                return Err(format!("verdict uses unlisted assumption {u}"));
            }
            Ok(())
        }
        Some("inconclusive") => Ok(()),
        _ => Err("verdict has no valid kind".into()),
    }
}
