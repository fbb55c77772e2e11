use std::fmt;
use std::str::FromStr;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid date `{input}`: {reason}")]
pub struct DateError {
    pub input: String,
    pub reason: &'static str,
}

/// Calendar date of a reading. Canonical text form is ISO-8601 (`YYYY-MM-DD`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ReadingDate(NaiveDate);

impl ReadingDate {
    pub fn from_ymd(year: i32, month: u32, day: u32) -> Result<Self, DateError> {
        NaiveDate::from_ymd_opt(year, month, day)
            .map(Self)
            .ok_or_else(|| DateError {
                input: format!("{year:04}-{month:02}-{day:02}"),
                reason: "not a calendar date",
            })
    }

    /// Accepts `YYYY-MM-DD`, `DD/MM/YYYY` or the digit run `DDMMYYYY`.
    pub fn parse_lenient(input: &str) -> Result<Self, DateError> {
        let s = input.trim();
        let err = |reason| DateError {
            input: input.to_string(),
            reason,
        };
        let digits = |part: &str, n: usize| -> Option<u32> {
            (part.len() == n && part.bytes().all(|b| b.is_ascii_digit()))
                .then(|| part.parse().ok())
                .flatten()
        };

        let (y, m, d) = if s.len() == 10 && s.as_bytes()[4] == b'-' {
            let mut it = s.split('-');
            let (y, m, d) = (it.next(), it.next(), it.next());
            match (
                y.and_then(|p| digits(p, 4)),
                m.and_then(|p| digits(p, 2)),
                d.and_then(|p| digits(p, 2)),
            ) {
                (Some(y), Some(m), Some(d)) if it.next().is_none() => (y, m, d),
                _ => return Err(err("expected YYYY-MM-DD")),
            }
        } else if s.contains('/') {
            let parts: Vec<&str> = s.split('/').collect();
            match parts.as_slice() {
                [d, m, y] => match (digits(d, 2), digits(m, 2), digits(y, 4)) {
                    (Some(d), Some(m), Some(y)) => (y, m, d),
                    _ => return Err(err("expected DD/MM/YYYY")),
                },
                _ => return Err(err("expected DD/MM/YYYY")),
            }
        } else if digits(s, 8).is_some() {
            (
                s[4..8].parse().unwrap(),
                s[2..4].parse().unwrap(),
                s[0..2].parse().unwrap(),
            )
        } else {
            return Err(err("expected YYYY-MM-DD, DD/MM/YYYY or DDMMYYYY"));
        };

        NaiveDate::from_ymd_opt(y as i32, m, d)
            .map(Self)
            .ok_or_else(|| err("not a calendar date"))
    }

    /// Strict ISO-8601 `YYYY-MM-DD`.
    pub fn parse_iso(input: &str) -> Result<Self, DateError> {
        let s = input.trim();
        if s.len() != 10 || s.as_bytes()[4] != b'-' {
            return Err(DateError {
                input: input.to_string(),
                reason: "expected YYYY-MM-DD",
            });
        }
        Self::parse_lenient(s)
    }

    pub fn naive(&self) -> NaiveDate {
        self.0
    }

    /// `DD/MM/YYYY`, the layout used in the field sheets.
    pub fn to_dmy(&self) -> String {
        format!(
            "{:02}/{:02}/{:04}",
            self.0.day(),
            self.0.month(),
            self.0.year()
        )
    }
}

impl fmt::Display for ReadingDate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.format("%Y-%m-%d"))
    }
}

impl FromStr for ReadingDate {
    type Err = DateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse_lenient(s)
    }
}

impl Serialize for ReadingDate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ReadingDate {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Self::parse_iso(&s).map_err(serde::de::Error::custom)
    }
}
