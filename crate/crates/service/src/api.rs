//! JSON API under `/api/v1`.

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use mastite_core::{
    classify_quartet, reference_ranges, AnimalId, AnimalRecord, Celsius, ClassificationMode,
    HealthStatus, ListFilter, NewRecord, ReadingDate, ReferenceRange, TeatQuartet, ThresholdTable,
};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{ApiError, FieldError};
use crate::AppState;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosisResponse {
    pub record_id: i64,
    pub animal_id: u32,
    pub date: ReadingDate,
    pub teats: [f64; 4],
    pub cup_test: bool,
    pub status_paper_faithful: HealthStatus,
    pub status_worst_teat: HealthStatus,
    pub reference_ranges: Vec<ReferenceRange>,
}

impl DiagnosisResponse {
    pub fn from_record(r: &AnimalRecord, thresholds: &ThresholdTable) -> Self {
        Self {
            record_id: r.record_id.get(),
            animal_id: r.id_animal.get(),
            date: r.reading_date,
            teats: r.teats.values(),
            cup_test: r.is_mastite,
            status_paper_faithful: classify_quartet(
                &r.teats,
                ClassificationMode::PaperFaithful,
                thresholds,
            ),
            status_worst_teat: classify_quartet(
                &r.teats,
                ClassificationMode::WorstTeat,
                thresholds,
            ),
            reference_ranges: reference_ranges(thresholds),
        }
    }
}

/// Validates a `POST /api/v1/readings` body, collecting every field error.
pub fn parse_submission(body: &[u8]) -> Result<NewRecord, ApiError> {
    let value: Value = serde_json::from_slice(body).map_err(|e| {
        ApiError::BadRequest(vec![FieldError::new(
            "body",
            format!("malformed JSON: {e}"),
        )])
    })?;
    let Value::Object(obj) = value else {
        return Err(ApiError::BadRequest(vec![FieldError::new(
            "body",
            "expected a JSON object",
        )]));
    };

    let mut errors = Vec::new();
    for key in obj.keys() {
        if !matches!(key.as_str(), "animal_id" | "date" | "teats" | "cup_test") {
            errors.push(FieldError::new(key, "unknown field"));
        }
    }

    let animal = match obj.get("animal_id") {
        None => {
            errors.push(FieldError::new("animal_id", "required"));
            None
        }
        Some(v) => match v.as_u64().and_then(|n| u32::try_from(n).ok()) {
            Some(n) if n >= 1 => Some(AnimalId::new(n).expect("checked positive")),
            _ => {
                errors.push(FieldError::new("animal_id", "must be a positive integer"));
                None
            }
        },
    };

    let date = match obj.get("date") {
        None => {
            errors.push(FieldError::new("date", "required"));
            None
        }
        Some(Value::String(s)) => match ReadingDate::parse_iso(s) {
            Ok(d) => Some(d),
            Err(e) => {
                errors.push(FieldError::new("date", e.to_string()));
                None
            }
        },
        Some(_) => {
            errors.push(FieldError::new("date", "must be an ISO-8601 date string"));
            None
        }
    };

    let teats = match obj.get("teats") {
        None => {
            errors.push(FieldError::new("teats", "required"));
            None
        }
        Some(Value::Array(items)) if items.len() == 4 => {
            let mut out = Vec::with_capacity(4);
            for (i, item) in items.iter().enumerate() {
                let field = format!("teats[{i}]");
                match item.as_f64() {
                    Some(v) => match Celsius::strict(v) {
                        Ok(c) => out.push(c),
                        Err(e) => errors.push(FieldError::new(field, e.to_string())),
                    },
                    None => errors.push(FieldError::new(field, "must be a number")),
                }
            }
            <[Celsius; 4]>::try_from(out).ok().map(TeatQuartet::new)
        }
        Some(Value::Array(items)) => {
            errors.push(FieldError::new(
                "teats",
                format!("expected exactly 4 readings, got {}", items.len()),
            ));
            None
        }
        Some(_) => {
            errors.push(FieldError::new("teats", "must be an array of 4 numbers"));
            None
        }
    };

    let cup_test = match obj.get("cup_test") {
        None => {
            errors.push(FieldError::new("cup_test", "required"));
            None
        }
        Some(Value::Bool(b)) => Some(*b),
        Some(_) => {
            errors.push(FieldError::new("cup_test", "must be a boolean"));
            None
        }
    };

    match (animal, date, teats, cup_test) {
        (Some(id_animal), Some(reading_date), Some(teats), Some(is_mastite))
            if errors.is_empty() =>
        {
            Ok(NewRecord {
                reading_date,
                teats,
                is_mastite,
                id_animal,
            })
        }
        _ => Err(ApiError::BadRequest(errors)),
    }
}

pub async fn post_reading(
    State(state): State<AppState>,
    body: Bytes,
) -> Result<Response, ApiError> {
    let record = parse_submission(&body)?;
    let store = state.store.clone();
    let stored = state
        .blocking(move || {
            let id = store.insert(&record)?;
            Ok(AnimalRecord {
                record_id: id,
                reading_date: record.reading_date,
                teats: record.teats,
                is_mastite: record.is_mastite,
                id_animal: record.id_animal,
            })
        })
        .await?;
    let body = DiagnosisResponse::from_record(&stored, &state.thresholds);
    Ok((StatusCode::CREATED, Json(body)).into_response())
}

pub async fn get_last_reading(
    State(state): State<AppState>,
) -> Result<Json<DiagnosisResponse>, ApiError> {
    let store = state.store.clone();
    let last = state.blocking(move || store.last_record()).await?;
    Ok(Json(DiagnosisResponse::from_record(
        &last,
        &state.thresholds,
    )))
}

#[derive(Debug, Deserialize)]
pub struct RangeQuery {
    from: Option<String>,
    to: Option<String>,
}

pub async fn get_animal_readings(
    State(state): State<AppState>,
    Path(raw_id): Path<String>,
    Query(range): Query<RangeQuery>,
) -> Result<Json<Vec<DiagnosisResponse>>, ApiError> {
    let mut errors = Vec::new();
    let animal = match raw_id
        .parse::<u32>()
        .ok()
        .and_then(|n| AnimalId::new(n).ok())
    {
        Some(a) => Some(a),
        None => {
            errors.push(FieldError::new("id", "must be a positive integer"));
            None
        }
    };
    let mut date_param =
        |name: &str, raw: Option<String>| match raw.map(|s| ReadingDate::parse_iso(&s)) {
            None => None,
            Some(Ok(d)) => Some(d),
            Some(Err(e)) => {
                errors.push(FieldError::new(name, e.to_string()));
                None
            }
        };
    let from = date_param("from", range.from);
    let to = date_param("to", range.to);
    if !errors.is_empty() {
        return Err(ApiError::BadRequest(errors));
    }
    let filter = ListFilter { animal, from, to };
    let store = state.store.clone();
    let records = state.blocking(move || store.list(&filter)).await?;
    Ok(Json(
        records
            .iter()
            .map(|r| DiagnosisResponse::from_record(r, &state.thresholds))
            .collect(),
    ))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Health {
    pub service: String,
    pub version: String,
    pub status: String,
    pub record_count: Option<u64>,
}

pub async fn health_check(State(state): State<AppState>) -> Response {
    let store = state.store.clone();
    let count = state.blocking(move || store.count()).await;
    let (code, status, record_count) = match count {
        Ok(n) => (StatusCode::OK, "ok", Some(n)),
        Err(e) => {
            tracing::warn!(error = %e, "store unreachable");
            (StatusCode::SERVICE_UNAVAILABLE, "store unavailable", None)
        }
    };
    let body = Health {
        service: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        status: status.to_string(),
        record_count,
    };
    (code, Json(body)).into_response()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fields(err: ApiError) -> Vec<String> {
        match err {
            ApiError::BadRequest(f) => f.into_iter().map(|e| e.field).collect(),
            other => panic!("expected bad request, got {other:?}"),
        }
    }

    #[test]
    fn accepts_well_formed_body() {
        let r = parse_submission(
            br#"{"animal_id":1,"date":"2020-12-12","teats":[35.5,35.6,35.4,35.6],"cup_test":false}"#,
        )
        .unwrap();
        assert_eq!(r.id_animal.get(), 1);
        assert_eq!(r.teats.values(), [35.5, 35.6, 35.4, 35.6]);
        assert!(!r.is_mastite);
    }

    #[test]
    fn reports_each_bad_field() {
        let err = parse_submission(
            br#"{"animal_id":0,"date":"12/12/2020","teats":[31.0,35.0,"x",43.5],"cup_test":"no"}"#,
        )
        .unwrap_err();
        assert_eq!(
            fields(err),
            vec![
                "animal_id",
                "date",
                "teats[0]",
                "teats[2]",
                "teats[3]",
                "cup_test"
            ]
        );
    }

    #[test]
    fn shape_errors() {
        assert_eq!(
            fields(
                parse_submission(
                    br#"{"animal_id":1,"date":"2020-12-12","teats":[35,35,35],"cup_test":false}"#
                )
                .unwrap_err()
            ),
            vec!["teats"]
        );
        assert_eq!(
            fields(parse_submission(b"{not json").unwrap_err()),
            vec!["body"]
        );
        assert_eq!(
            fields(parse_submission(b"[1,2]").unwrap_err()),
            vec!["body"]
        );
        assert_eq!(
            fields(parse_submission(b"{}").unwrap_err()),
            vec!["animal_id", "date", "teats", "cup_test"]
        );
        assert_eq!(
            fields(parse_submission(br#"{"animal_id":1,"date":"2020-02-30","teats":[35,35,35,35],"cup_test":false,"extra":1}"#).unwrap_err()),
            vec!["extra", "date"]
        );
        assert_eq!(
            fields(parse_submission(br#"{"animal_id":-4,"date":"2020-02-03","teats":[35,35,35,35],"cup_test":true}"#).unwrap_err()),
            vec!["animal_id"]
        );
    }
}
