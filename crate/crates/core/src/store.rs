//! Append-only persistence of animal readings.
//!
//! [`ReadingStore`] is the contract the service and the dataset tools write
//! through. [`SqliteStore`] implements it over a single SQLite file with one
//! table of seven data columns plus a surrogate key.

use std::fmt;
use std::path::Path;
use std::sync::{Mutex, MutexGuard};

use rusqlite::{params, Connection, OptionalExtension, Row};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classify::{ClassifyError, TeatQuartet};
use crate::date::ReadingDate;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("store is empty")]
    Empty,
    #[error("invalid date range: from {from} is after to {to}")]
    InvalidRange { from: ReadingDate, to: ReadingDate },
    #[error("invalid record: {0}")]
    Validation(String),
    #[error("storage failure: {0}")]
    Storage(String),
}

impl From<rusqlite::Error> for StoreError {
    fn from(e: rusqlite::Error) -> Self {
        StoreError::Storage(e.to_string())
    }
}

impl From<ClassifyError> for StoreError {
    fn from(e: ClassifyError) -> Self {
        StoreError::Validation(e.to_string())
    }
}

/// Positive animal identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct AnimalId(u32);

impl AnimalId {
    pub fn new(id: u32) -> Result<Self, StoreError> {
        if id == 0 {
            return Err(StoreError::Validation("animal id must be >= 1".into()));
        }
        Ok(Self(id))
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

impl<'de> Deserialize<'de> for AnimalId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        AnimalId::new(u32::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for AnimalId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Surrogate key assigned by the store, strictly increasing with insertion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RecordId(i64);

impl RecordId {
    pub fn get(self) -> i64 {
        self.0
    }
}

impl fmt::Display for RecordId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A reading before the store has assigned it an id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NewRecord {
    pub reading_date: ReadingDate,
    pub teats: TeatQuartet,
    /// Cup-test result entered by the farmer. Independent of any classifier
    /// output.
    pub is_mastite: bool,
    pub id_animal: AnimalId,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnimalRecord {
    pub record_id: RecordId,
    pub reading_date: ReadingDate,
    pub teats: TeatQuartet,
    pub is_mastite: bool,
    pub id_animal: AnimalId,
}

impl AnimalRecord {
    pub fn without_id(&self) -> NewRecord {
        NewRecord {
            reading_date: self.reading_date,
            teats: self.teats,
            is_mastite: self.is_mastite,
            id_animal: self.id_animal,
        }
    }
}

/// Filters for [`ReadingStore::list`]. All bounds are inclusive.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ListFilter {
    pub animal: Option<AnimalId>,
    pub from: Option<ReadingDate>,
    pub to: Option<ReadingDate>,
}

impl ListFilter {
    pub fn animal(id: AnimalId) -> Self {
        Self {
            animal: Some(id),
            ..Self::default()
        }
    }

    pub fn between(from: ReadingDate, to: ReadingDate) -> Self {
        Self {
            from: Some(from),
            to: Some(to),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), StoreError> {
        match (self.from, self.to) {
            (Some(from), Some(to)) if from > to => Err(StoreError::InvalidRange { from, to }),
            _ => Ok(()),
        }
    }

    pub fn matches(&self, r: &AnimalRecord) -> bool {
        self.animal.is_none_or(|a| a == r.id_animal)
            && self.from.is_none_or(|f| r.reading_date >= f)
            && self.to.is_none_or(|t| r.reading_date <= t)
    }
}

/// Append-only reading storage. Writes are serialized; a read concurrent with
/// a write sees the state either before or after it.
pub trait ReadingStore: Send + Sync {
    fn insert(&self, record: &NewRecord) -> Result<RecordId, StoreError>;

    /// Record with the greatest id.
    fn last_record(&self) -> Result<AnimalRecord, StoreError>;

    /// Matching records ordered by `(reading_date, record_id)`.
    fn list(&self, filter: &ListFilter) -> Result<Vec<AnimalRecord>, StoreError>;

    fn count(&self) -> Result<u64, StoreError>;
}

const SCHEMA: &str = "
CREATE TABLE IF NOT EXISTS animal_records (
    record_id    INTEGER PRIMARY KEY AUTOINCREMENT,
    reading_date TEXT    NOT NULL,
    teto1        REAL    NOT NULL,
    teto2        REAL    NOT NULL,
    teto3        REAL    NOT NULL,
    teto4        REAL    NOT NULL,
    is_mastite   INTEGER NOT NULL CHECK (is_mastite IN (0, 1)),
    id_animal    INTEGER NOT NULL CHECK (id_animal >= 1)
);
CREATE INDEX IF NOT EXISTS animal_records_animal_date
    ON animal_records (id_animal, reading_date);
";

const COLUMNS: &str = "record_id, reading_date, teto1, teto2, teto3, teto4, is_mastite, id_animal";

pub struct SqliteStore {
    conn: Mutex<Connection>,
}

impl SqliteStore {
    pub fn open(path: impl AsRef<Path>) -> Result<Self, StoreError> {
        let conn = Connection::open(path)?;
        conn.pragma_update(None, "journal_mode", "WAL")?;
        conn.pragma_update(None, "synchronous", "FULL")?;
        Self::init(conn)
    }

    pub fn open_in_memory() -> Result<Self, StoreError> {
        Self::init(Connection::open_in_memory()?)
    }

    fn init(conn: Connection) -> Result<Self, StoreError> {
        conn.execute_batch(SCHEMA)?;
        Ok(Self {
            conn: Mutex::new(conn),
        })
    }

    fn conn(&self) -> Result<MutexGuard<'_, Connection>, StoreError> {
        self.conn
            .lock()
            .map_err(|_| StoreError::Storage("connection lock poisoned".into()))
    }
}

fn row_to_record(row: &Row<'_>) -> rusqlite::Result<Result<AnimalRecord, StoreError>> {
    let record_id: i64 = row.get(0)?;
    let date: String = row.get(1)?;
    let teats: [f64; 4] = [row.get(2)?, row.get(3)?, row.get(4)?, row.get(5)?];
    let is_mastite: i64 = row.get(6)?;
    let id_animal: i64 = row.get(7)?;
    Ok((|| {
        let id_animal = u32::try_from(id_animal)
            .map_err(|_| StoreError::Storage(format!("corrupt animal id {id_animal}")))?;
        Ok(AnimalRecord {
            record_id: RecordId(record_id),
            reading_date: ReadingDate::parse_iso(&date)
                .map_err(|e| StoreError::Storage(format!("corrupt date: {e}")))?,
            teats: TeatQuartet::from_values(teats)?,
            is_mastite: is_mastite != 0,
            id_animal: AnimalId::new(id_animal)?,
        })
    })())
}

impl ReadingStore for SqliteStore {
    fn insert(&self, record: &NewRecord) -> Result<RecordId, StoreError> {
        let [t1, t2, t3, t4] = record.teats.values();
        let conn = self.conn()?;
        conn.execute(
            "INSERT INTO animal_records
                (reading_date, teto1, teto2, teto3, teto4, is_mastite, id_animal)
             VALUES (?1, ?2, ?3, ?4, ?5, ?6, ?7)",
            params![
                record.reading_date.to_string(),
                t1,
                t2,
                t3,
                t4,
                record.is_mastite as i64,
                record.id_animal.get() as i64,
            ],
        )?;
        Ok(RecordId(conn.last_insert_rowid()))
    }

    fn last_record(&self) -> Result<AnimalRecord, StoreError> {
        let conn = self.conn()?;
        let found = conn
            .query_row(
                &format!("SELECT {COLUMNS} FROM animal_records ORDER BY record_id DESC LIMIT 1"),
                [],
                row_to_record,
            )
            .optional()?;
        found.ok_or(StoreError::Empty)?
    }

    fn list(&self, filter: &ListFilter) -> Result<Vec<AnimalRecord>, StoreError> {
        filter.validate()?;
        let conn = self.conn()?;
        let mut stmt = conn.prepare_cached(&format!(
            "SELECT {COLUMNS} FROM animal_records
             WHERE (?1 IS NULL OR id_animal = ?1)
               AND (?2 IS NULL OR reading_date >= ?2)
               AND (?3 IS NULL OR reading_date <= ?3)
             ORDER BY reading_date, record_id"
        ))?;
        let rows = stmt.query_map(
            params![
                filter.animal.map(|a| a.get() as i64),
                filter.from.map(|d| d.to_string()),
                filter.to.map(|d| d.to_string()),
            ],
            row_to_record,
        )?;
        let mut out = Vec::new();
        for row in rows {
            out.push(row??);
        }
        Ok(out)
    }

    fn count(&self) -> Result<u64, StoreError> {
        let conn = self.conn()?;
        let n: i64 = conn.query_row("SELECT COUNT(*) FROM animal_records", [], |r| r.get(0))?;
        Ok(n as u64)
    }
}

/// Builds a [`NewRecord`] from raw values, validating each field.
pub fn new_record(
    reading_date: ReadingDate,
    teats: [f64; 4],
    is_mastite: bool,
    id_animal: u32,
) -> Result<NewRecord, StoreError> {
    Ok(NewRecord {
        reading_date,
        teats: TeatQuartet::from_values(teats)?,
        is_mastite,
        id_animal: AnimalId::new(id_animal)?,
    })
}
