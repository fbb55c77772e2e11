//! `GravarMastiteServices.do`, the query-parameter insert endpoint the
//! original Android client calls.
//!
//! GET and POST behave the same. Parameters are read from the query string
//! and, for form-encoded POSTs, the body; the first occurrence of a name wins.
//! Success is `200` with an empty body and an `X-Record-Id` header. Any
//! missing or unparsable parameter is `500` with an empty body, which is what
//! the servlet produced on an unhandled parse exception.

use axum::body::{Body, Bytes};
use axum::extract::State;
use axum::http::{header, HeaderMap, HeaderValue, Method, StatusCode, Uri};
use axum::response::{IntoResponse, Response};
use mastite_core::{new_record, Celsius, NewRecord, ReadingDate};

use crate::AppState;

pub const LEGACY_PATH: &str = "/GravarMastiteServices.do";
pub const RECORD_ID_HEADER: &str = "x-record-id";

/// Parameter names in the order the client sends them.
pub const PARAMS: [&str; 7] = [
    "data",
    "is_mastite",
    "teto1",
    "teto2",
    "teto3",
    "teto4",
    "id_animal",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LegacyParseError(pub String);

fn first<'a>(pairs: &'a [(String, String)], name: &str) -> Result<&'a str, LegacyParseError> {
    pairs
        .iter()
        .find(|(k, _)| k == name)
        .map(|(_, v)| v.as_str())
        .ok_or_else(|| LegacyParseError(format!("missing parameter `{name}`")))
}

/// `Integer.parseInt`: optional sign, decimal digits, nothing else.
fn parse_java_int(name: &str, raw: &str) -> Result<i64, LegacyParseError> {
    let body = raw.strip_prefix(['+', '-']).unwrap_or(raw);
    if body.is_empty() || !body.bytes().all(|b| b.is_ascii_digit()) {
        return Err(LegacyParseError(format!(
            "`{name}`: `{raw}` is not an integer"
        )));
    }
    raw.parse()
        .map_err(|_| LegacyParseError(format!("`{name}`: `{raw}` out of range")))
}

/// `Float.parseFloat`: surrounding whitespace and a trailing `f`/`d`
/// suffix are tolerated. Non-finite results are rejected.
fn parse_java_float(name: &str, raw: &str) -> Result<f64, LegacyParseError> {
    let s = raw.trim();
    let s = s.strip_suffix(['f', 'F', 'd', 'D']).unwrap_or(s);
    let bad = || LegacyParseError(format!("`{name}`: `{raw}` is not a finite decimal"));
    let looks_numeric = !s.is_empty()
        && s.bytes()
            .all(|b| b.is_ascii_digit() || matches!(b, b'.' | b'+' | b'-' | b'e' | b'E'));
    if !looks_numeric {
        return Err(bad());
    }
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(bad()),
    }
}

/// Builds a record from decoded parameter pairs. With `strict`, every teat
/// must also lie inside the thermometer range.
pub fn parse_params(
    pairs: &[(String, String)],
    strict: bool,
) -> Result<NewRecord, LegacyParseError> {
    let date = ReadingDate::parse_lenient(first(pairs, "data")?)
        .map_err(|e| LegacyParseError(format!("`data`: {e}")))?;
    let flag = match parse_java_int("is_mastite", first(pairs, "is_mastite")?)? {
        0 => false,
        1 => true,
        other => {
            return Err(LegacyParseError(format!(
                "`is_mastite` must be 0 or 1, got {other}"
            )))
        }
    };
    let mut teats = [0.0; 4];
    for (i, t) in teats.iter_mut().enumerate() {
        let name = PARAMS[2 + i];
        *t = parse_java_float(name, first(pairs, name)?)?;
        if strict {
            Celsius::strict(*t).map_err(|e| LegacyParseError(format!("`{name}`: {e}")))?;
        }
    }
    let animal = parse_java_int("id_animal", first(pairs, "id_animal")?)?;
    let animal = u32::try_from(animal)
        .map_err(|_| LegacyParseError(format!("`id_animal` {animal} out of range")))?;
    new_record(date, teats, flag, animal).map_err(|e| LegacyParseError(e.to_string()))
}

fn decode(input: &[u8], into: &mut Vec<(String, String)>) {
    into.extend(form_urlencoded::parse(input).into_owned());
}

fn empty(code: StatusCode) -> Response {
    (code, Body::empty()).into_response()
}

pub async fn handle(
    State(state): State<AppState>,
    method: Method,
    uri: Uri,
    headers: HeaderMap,
    body: Bytes,
) -> Response {
    let mut pairs = Vec::new();
    if let Some(q) = uri.query() {
        decode(q.as_bytes(), &mut pairs);
    }
    let form_body = headers
        .get(header::CONTENT_TYPE)
        .and_then(|v| v.to_str().ok())
        .is_some_and(|ct| ct.starts_with("application/x-www-form-urlencoded"));
    if method == Method::POST && form_body {
        decode(&body, &mut pairs);
    }

    let record = match parse_params(&pairs, state.legacy_strict) {
        Ok(r) => r,
        Err(LegacyParseError(reason)) => {
            tracing::warn!(%reason, "legacy insert rejected");
            return empty(StatusCode::INTERNAL_SERVER_ERROR);
        }
    };
    let store = state.store.clone();
    match state.blocking(move || store.insert(&record)).await {
        Ok(id) => {
            let mut resp = empty(StatusCode::OK);
            resp.headers_mut().insert(
                RECORD_ID_HEADER,
                HeaderValue::from_str(&id.to_string()).expect("integer header value"),
            );
            resp
        }
        Err(e) => {
            tracing::error!(error = %e, "legacy insert failed");
            empty(StatusCode::INTERNAL_SERVER_ERROR)
        }
    }
}

/// Catches deployments that mount the endpoint under an extra path segment
/// (e.g. `/ROOT-897/GravarMastiteServices.do`). Only the last segment is
/// matched.
pub async fn fallback(
    state: State<AppState>,
    method: Method,
    uri: Uri,
    headers: HeaderMap,
    body: Bytes,
) -> Response {
    let terminal = uri.path().rsplit('/').next() == Some(&LEGACY_PATH[1..]);
    if !terminal {
        return empty(StatusCode::NOT_FOUND);
    }
    if method != Method::GET && method != Method::POST {
        return empty(StatusCode::METHOD_NOT_ALLOWED);
    }
    handle(state, method, uri, headers, body).await
}
