//! Field-sheet import and concordance reporting.
//!
//! The CSV layout is `IdCow,Date,Teat1,Teat2,Teat3,Teat4,Mastitis` with dates
//! as `DD/MM/YYYY`, decimal points only and `Mastitis` as `0`/`1`. The
//! `Cow teat 1` .. `Cow teat 4` header spelling is accepted as well.

use std::collections::BTreeMap;
use std::io::{self, Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classify::{classify_quartet, ClassificationMode, HealthStatus, ThresholdTable};
use crate::date::ReadingDate;
use crate::store::{new_record, AnimalRecord, ReadingStore, RecordId, StoreError};

/// The published field sample: 20 readings from five cows, 28 to 31 October
/// 2020.
pub const FIELD_SAMPLE_CSV: &str = include_str!("../fixtures/field_sample.csv");

const EXPECTED_HEADER: [&str; 7] = [
    "IdCow", "Date", "Teat1", "Teat2", "Teat3", "Teat4", "Mastitis",
];

#[derive(Debug, Error)]
pub enum ImportError {
    #[error("unreadable input: {0}")]
    Io(String),
    #[error("invalid header: {0}")]
    Header(String),
    #[error(transparent)]
    Store(#[from] StoreError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RowError {
    /// 1-based line number in the source, header included.
    pub line: u64,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ImportSummary {
    pub inserted: usize,
    pub inserted_ids: Vec<RecordId>,
    pub rejected: Vec<RowError>,
}

fn normalize_header(h: &str) -> String {
    h.chars()
        .filter(|c| !c.is_whitespace() && *c != '_' && *c != '-')
        .flat_map(char::to_lowercase)
        .collect::<String>()
        .replace("cowteat", "teat")
}

fn check_header(fields: &csv::StringRecord) -> Result<(), ImportError> {
    let got: Vec<String> = fields.iter().map(normalize_header).collect();
    let want: Vec<String> = EXPECTED_HEADER
        .iter()
        .map(|h| normalize_header(h))
        .collect();
    if got != want {
        return Err(ImportError::Header(format!(
            "expected `{}`, got `{}`",
            EXPECTED_HEADER.join(","),
            fields.iter().collect::<Vec<_>>().join(",")
        )));
    }
    Ok(())
}

/// Plain decimal with a point separator: `36`, `36.0`, `-1.25`. No exponents,
/// no commas, no `inf`/`nan`.
pub fn parse_decimal(s: &str) -> Option<f64> {
    let body = s.strip_prefix(['+', '-']).unwrap_or(s);
    let (int, frac) = match body.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (body, None),
    };
    let all_digits = |p: &str| !p.is_empty() && p.bytes().all(|b| b.is_ascii_digit());
    if !all_digits(int) || !frac.is_none_or(all_digits) {
        return None;
    }
    s.parse().ok()
}

fn parse_row(fields: &csv::StringRecord) -> Result<crate::store::NewRecord, String> {
    if fields.len() != EXPECTED_HEADER.len() {
        return Err(format!(
            "expected {} columns, found {}",
            EXPECTED_HEADER.len(),
            fields.len()
        ));
    }
    let id: u32 = fields[0]
        .parse()
        .map_err(|_| format!("IdCow `{}` is not a positive integer", &fields[0]))?;
    let date = ReadingDate::parse_lenient(&fields[1]).map_err(|e| e.to_string())?;
    let mut teats = [0.0; 4];
    for (i, t) in teats.iter_mut().enumerate() {
        let raw = &fields[2 + i];
        *t = parse_decimal(raw)
            .ok_or_else(|| format!("{} `{raw}` is not a decimal number", EXPECTED_HEADER[2 + i]))?;
    }
    let mastitis = match &fields[6] {
        "0" => false,
        "1" => true,
        other => return Err(format!("Mastitis `{other}` must be 0 or 1")),
    };
    new_record(date, teats, mastitis, id).map_err(|e| e.to_string())
}

/// Inserts every valid row; invalid rows are reported and skipped.
pub fn import_csv<R: Read>(
    source: R,
    store: &dyn ReadingStore,
) -> Result<ImportSummary, ImportError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(source);
    let mut records = reader.records();

    let header = match records.next() {
        Some(Ok(h)) => h,
        Some(Err(e)) => return Err(ImportError::Io(e.to_string())),
        None => return Err(ImportError::Header("missing header row".into())),
    };
    check_header(&header)?;

    let mut summary = ImportSummary::default();
    for row in records {
        let row = match row {
            Ok(r) => r,
            Err(e) if e.is_io_error() => return Err(ImportError::Io(e.to_string())),
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line());
                summary.rejected.push(RowError {
                    line,
                    reason: e.to_string(),
                });
                continue;
            }
        };
        let line = row.position().map_or(0, |p| p.line());
        if row.iter().all(str::is_empty) {
            continue;
        }
        match parse_row(&row) {
            Ok(rec) => match store.insert(&rec) {
                Ok(id) => {
                    summary.inserted += 1;
                    summary.inserted_ids.push(id);
                }
                Err(StoreError::Validation(reason)) => {
                    summary.rejected.push(RowError { line, reason })
                }
                Err(e) => return Err(e.into()),
            },
            Err(reason) => summary.rejected.push(RowError { line, reason }),
        }
    }
    Ok(summary)
}

/// One status per record, in input order.
pub fn batch_classify(
    records: &[AnimalRecord],
    mode: ClassificationMode,
    thresholds: &ThresholdTable,
) -> Vec<(RecordId, HealthStatus)> {
    records
        .iter()
        .map(|r| (r.record_id, classify_quartet(&r.teats, mode, thresholds)))
        .collect()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatusCounts {
    #[serde(rename = "Indeterminate")]
    pub indeterminate: u64,
    #[serde(rename = "Healthy")]
    pub healthy: u64,
    #[serde(rename = "Attention")]
    pub attention: u64,
    #[serde(rename = "Sick")]
    pub sick: u64,
}

impl StatusCounts {
    pub fn get(&self, status: HealthStatus) -> u64 {
        match status {
            HealthStatus::Indeterminate => self.indeterminate,
            HealthStatus::Healthy => self.healthy,
            HealthStatus::Attention => self.attention,
            HealthStatus::Sick => self.sick,
        }
    }

    fn bump(&mut self, status: HealthStatus) {
        let slot = match status {
            HealthStatus::Indeterminate => &mut self.indeterminate,
            HealthStatus::Healthy => &mut self.healthy,
            HealthStatus::Attention => &mut self.attention,
            HealthStatus::Sick => &mut self.sick,
        };
        *slot += 1;
    }

    pub fn total(&self) -> u64 {
        HealthStatus::ALL.iter().map(|s| self.get(*s)).sum()
    }
}

/// Temperature-derived status against the farmer's cup test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConcordanceReport {
    pub mode: ClassificationMode,
    pub total_records: u64,
    pub status_counts: StatusCounts,
    /// Keyed by animal id.
    pub per_animal: BTreeMap<u32, StatusCounts>,
    pub cup_test_positive: u64,
    /// Temperature says Attention or Sick, cup test negative.
    pub discordant_count_a: u64,
    /// Cup test positive, temperature says Healthy or Indeterminate.
    pub discordant_count_b: u64,
}

pub fn concordance_report(
    records: &[AnimalRecord],
    mode: ClassificationMode,
    thresholds: &ThresholdTable,
) -> ConcordanceReport {
    let mut report = ConcordanceReport {
        mode,
        total_records: 0,
        status_counts: StatusCounts::default(),
        per_animal: BTreeMap::new(),
        cup_test_positive: 0,
        discordant_count_a: 0,
        discordant_count_b: 0,
    };
    for r in records {
        let status = classify_quartet(&r.teats, mode, thresholds);
        let alert = status >= HealthStatus::Attention;
        report.total_records += 1;
        report.status_counts.bump(status);
        report
            .per_animal
            .entry(r.id_animal.get())
            .or_default()
            .bump(status);
        if r.is_mastite {
            report.cup_test_positive += 1;
        }
        match (alert, r.is_mastite) {
            (true, false) => report.discordant_count_a += 1,
            (false, true) => report.discordant_count_b += 1,
            _ => {}
        }
    }
    report
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum ReportFormat {
    #[default]
    Text,
    Json,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "text" => Ok(ReportFormat::Text),
            "json" => Ok(ReportFormat::Json),
            other => Err(format!(
                "unknown format `{other}` (expected `text` or `json`)"
            )),
        }
    }
}

fn counts_line(c: &StatusCounts) -> String {
    HealthStatus::ALL
        .iter()
        .map(|s| format!("{s} {}", c.get(*s)))
        .collect::<Vec<_>>()
        .join(", ")
}

pub fn export_report<W: Write>(
    report: &ConcordanceReport,
    format: ReportFormat,
    mut out: W,
) -> io::Result<()> {
    match format {
        ReportFormat::Json => {
            serde_json::to_writer_pretty(&mut out, report)?;
            writeln!(out)
        }
        ReportFormat::Text => {
            writeln!(out, "mode: {}", report.mode)?;
            writeln!(out, "total: {}", report.total_records)?;
            writeln!(out, "status counts:")?;
            for s in HealthStatus::ALL {
                writeln!(out, "  {s}: {}", report.status_counts.get(s))?;
            }
            writeln!(out, "cup-test positive: {}", report.cup_test_positive)?;
            writeln!(
                out,
                "discordant (temperature alert, cup test negative): {}",
                report.discordant_count_a
            )?;
            writeln!(
                out,
                "discordant (cup test positive, temperature not alerting): {}",
                report.discordant_count_b
            )?;
            if !report.per_animal.is_empty() {
                writeln!(out, "per animal:")?;
                for (id, counts) in &report.per_animal {
                    writeln!(out, "  animal {id}: {}", counts_line(counts))?;
                }
            }
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::store::{ListFilter, SqliteStore};

    fn store() -> SqliteStore {
        SqliteStore::open_in_memory().unwrap()
    }

    #[test]
    fn decimal_parsing() {
        assert_eq!(parse_decimal("36"), Some(36.0));
        assert_eq!(parse_decimal("36.25"), Some(36.25));
        assert_eq!(parse_decimal("-1.5"), Some(-1.5));
        for bad in ["", "36,5", "3.6e1", "inf", "NaN", ".5", "36.", "3 6", "--1"] {
            assert_eq!(parse_decimal(bad), None, "{bad}");
        }
    }

    #[test]
    fn fixture_imports_cleanly() {
        let s = store();
        let summary = import_csv(FIELD_SAMPLE_CSV.as_bytes(), &s).unwrap();
        assert_eq!(summary.inserted, 20);
        assert!(summary.rejected.is_empty());
        assert_eq!(s.count().unwrap(), 20);
    }

    #[test]
    fn header_only_and_missing_header() {
        let s = store();
        let summary = import_csv(
            "IdCow,Date,Teat1,Teat2,Teat3,Teat4,Mastitis\n".as_bytes(),
            &s,
        )
        .unwrap();
        assert_eq!(summary.inserted, 0);
        assert!(matches!(
            import_csv("".as_bytes(), &s),
            Err(ImportError::Header(_))
        ));
        assert!(matches!(
            import_csv("1,28/10/2020,36.5,36.5,36.6,36.5,0\n".as_bytes(), &s),
            Err(ImportError::Header(_))
        ));
    }

    #[test]
    fn published_header_spelling_accepted() {
        let s = store();
        let csv = "idcow,DATE,Cow teat 1,Cow teat 2,Cow teat 3,Cow teat 4,mastitis\n3,28/10/2020,35.9,35.7,35.8,36,0\n";
        let summary = import_csv(csv.as_bytes(), &s).unwrap();
        assert_eq!(summary.inserted, 1);
        assert_eq!(s.last_record().unwrap().teats.values()[3], 36.0);
    }

    #[test]
    fn bad_rows_are_reported_by_line() {
        let s = store();
        let csv = "IdCow,Date,Teat1,Teat2,Teat3,Teat4,Mastitis
1,28/10/2020,36.5,36.5,36.6,36.5,0
2,31/02/2020,36.3,36.2,36.3,36.2,0
3,28/10/2020,35.9,35.7,35.8,36,2
0,28/10/2020,35.9,35.7,35.8,36,0
4,28/10/2020,35.6,35.7,35.7
5,28/10/2020,\"35,9\",36.0,36.1,36.0,0
6,28/10/2020,35.9,36.0,36.1,36.0,0
";
        let summary = import_csv(csv.as_bytes(), &s).unwrap();
        assert_eq!(summary.inserted, 2);
        let lines: Vec<u64> = summary.rejected.iter().map(|e| e.line).collect();
        assert_eq!(lines, vec![3, 4, 5, 6, 7]);
        assert!(summary.rejected[0].reason.contains("31/02/2020"));
        assert_eq!(s.count().unwrap(), 2);
    }

    #[test]
    fn batch_matches_input_order() {
        let s = store();
        import_csv(FIELD_SAMPLE_CSV.as_bytes(), &s).unwrap();
        let recs = s.list(&ListFilter::default()).unwrap();
        let th = ThresholdTable::default();
        let out = batch_classify(&recs, ClassificationMode::WorstTeat, &th);
        assert_eq!(out.len(), recs.len());
        // cow 1, 28/10/2020: 36.5 36.5 36.6 36.5
        assert_eq!(out[0].0, recs[0].record_id);
        assert_eq!(out[0].1, HealthStatus::Sick);
        let pf = batch_classify(&recs, ClassificationMode::PaperFaithful, &th);
        assert_eq!(pf[0].1, HealthStatus::Attention);
        assert!(batch_classify(&[], ClassificationMode::WorstTeat, &th).is_empty());
    }

    #[test]
    fn empty_report() {
        let r = concordance_report(
            &[],
            ClassificationMode::WorstTeat,
            &ThresholdTable::default(),
        );
        assert_eq!(r.total_records, 0);
        assert_eq!(r.status_counts, StatusCounts::default());
        assert!(r.per_animal.is_empty());
        let mut buf = Vec::new();
        export_report(&r, ReportFormat::Text, &mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().contains("total: 0"));
    }

    #[test]
    fn discordance_counts() {
        let s = store();
        let d = ReadingDate::from_ymd(2020, 10, 10).unwrap();
        // alert, negative cup test
        s.insert(&new_record(d, [37.0; 4], false, 1).unwrap())
            .unwrap();
        // healthy, positive cup test
        s.insert(&new_record(d, [34.0; 4], true, 1).unwrap())
            .unwrap();
        // concordant positive
        s.insert(&new_record(d, [37.0; 4], true, 2).unwrap())
            .unwrap();
        let recs = s.list(&ListFilter::default()).unwrap();
        let r = concordance_report(
            &recs,
            ClassificationMode::WorstTeat,
            &ThresholdTable::default(),
        );
        assert_eq!(r.discordant_count_a, 1);
        assert_eq!(r.discordant_count_b, 1);
        assert_eq!(r.cup_test_positive, 2);
        assert_eq!(r.per_animal[&1].sick, 1);
        assert_eq!(r.per_animal[&1].healthy, 1);
    }

    #[test]
    fn json_round_trip() {
        let s = store();
        import_csv(FIELD_SAMPLE_CSV.as_bytes(), &s).unwrap();
        let recs = s.list(&ListFilter::default()).unwrap();
        let r = concordance_report(
            &recs,
            ClassificationMode::PaperFaithful,
            &ThresholdTable::default(),
        );
        let mut buf = Vec::new();
        export_report(&r, ReportFormat::Json, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let back: ConcordanceReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
    }
}
