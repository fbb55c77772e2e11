//! Core of the mastitis screening stack: teat-temperature classification,
//! the reading store and field-data tooling.

pub mod classify;
pub mod dataset;
pub mod date;
pub mod store;

pub use classify::{
    classify_quartet, classify_teat, reference_ranges, Celsius, ClassificationMode, ClassifyError,
    HealthStatus, ReferenceIndicators, ReferenceRange, TeatQuartet, TempRange, ThresholdTable,
    REFERENCE_INDICATORS,
};
pub use dataset::{
    batch_classify, concordance_report, export_report, import_csv, ConcordanceReport, ImportError,
    ImportSummary, ReportFormat, RowError, StatusCounts, FIELD_SAMPLE_CSV,
};
pub use date::{DateError, ReadingDate};
pub use store::{
    new_record, AnimalId, AnimalRecord, ListFilter, NewRecord, ReadingStore, RecordId, SqliteStore,
    StoreError,
};
