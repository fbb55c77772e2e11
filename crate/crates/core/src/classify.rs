//! Teat-temperature classification.
//!
//! A single reading maps onto a half-open interval of the [`ThresholdTable`]:
//!
//! | reading                | status          |
//! |------------------------|-----------------|
//! | `t <= 33.0`            | `Indeterminate` |
//! | `33.0 < t <= 34.5`     | `Healthy`       |
//! | `34.5 < t <= 36.5`     | `Attention`     |
//! | `t > 36.5`             | `Sick`          |
//!
//! An animal's four readings are combined under a [`ClassificationMode`].
//! `PaperFaithful` reproduces the original app's if / else-if chain, where the
//! first branch with any matching teat wins (so one healthy teat masks a sick
//! one). `WorstTeat` reports the most severe teat.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassifyError {
    #[error("temperature must be finite, got {0}")]
    NonFinite(f64),
    #[error("temperature {value} °C is outside the thermometer range [{min}, {max}] °C")]
    OutOfRange { value: f64, min: f64, max: f64 },
    #[error("thresholds must satisfy low < healthy_high < attention_high, got {low} / {healthy_high} / {attention_high}")]
    ThresholdOrder {
        low: f64,
        healthy_high: f64,
        attention_high: f64,
    },
    #[error("unknown classification mode `{0}` (expected `paper-faithful` or `worst-teat`)")]
    UnknownMode(String),
}

/// A finite temperature in degrees Celsius.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct Celsius(f64);

impl Celsius {
    /// Lowest value the infrared thermometer can report.
    pub const THERMOMETER_MIN: f64 = 32.0;
    /// Highest value the infrared thermometer can report.
    pub const THERMOMETER_MAX: f64 = 42.9;

    pub fn new(value: f64) -> Result<Self, ClassifyError> {
        if value.is_finite() {
            Ok(Self(value))
        } else {
            Err(ClassifyError::NonFinite(value))
        }
    }

    /// Like [`Celsius::new`] but also rejects values the thermometer cannot
    /// produce.
    pub fn strict(value: f64) -> Result<Self, ClassifyError> {
        let c = Self::new(value)?;
        if !c.is_within_thermometer_range() {
            return Err(ClassifyError::OutOfRange {
                value,
                min: Self::THERMOMETER_MIN,
                max: Self::THERMOMETER_MAX,
            });
        }
        Ok(c)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_within_thermometer_range(self) -> bool {
        (Self::THERMOMETER_MIN..=Self::THERMOMETER_MAX).contains(&self.0)
    }
}

impl<'de> Deserialize<'de> for Celsius {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = f64::deserialize(d)?;
        Celsius::new(v).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for Celsius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The four teat readings of one animal at one milking. Position carries no
/// meaning for classification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TeatQuartet([Celsius; 4]);

impl TeatQuartet {
    pub fn new(teats: [Celsius; 4]) -> Self {
        Self(teats)
    }

    pub fn from_values(values: [f64; 4]) -> Result<Self, ClassifyError> {
        let [a, b, c, d] = values;
        Ok(Self([
            Celsius::new(a)?,
            Celsius::new(b)?,
            Celsius::new(c)?,
            Celsius::new(d)?,
        ]))
    }

    pub fn teats(&self) -> &[Celsius; 4] {
        &self.0
    }

    pub fn values(&self) -> [f64; 4] {
        self.0.map(Celsius::value)
    }
}

/// Animal health verdict, ordered by severity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum HealthStatus {
    /// No reading fell inside a classified range (all at or below the
    /// healthy lower bound). Usually a measurement problem.
    Indeterminate,
    Healthy,
    Attention,
    Sick,
}

impl HealthStatus {
    pub const ALL: [HealthStatus; 4] = [
        HealthStatus::Indeterminate,
        HealthStatus::Healthy,
        HealthStatus::Attention,
        HealthStatus::Sick,
    ];

    pub fn severity(self) -> u8 {
        match self {
            HealthStatus::Indeterminate => 0,
            HealthStatus::Healthy => 1,
            HealthStatus::Attention => 2,
            HealthStatus::Sick => 3,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            HealthStatus::Indeterminate => "Indeterminate",
            HealthStatus::Healthy => "Healthy",
            HealthStatus::Attention => "Attention",
            HealthStatus::Sick => "Sick",
        }
    }
}

impl fmt::Display for HealthStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Classification breakpoints. Every interval is open below and closed above.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdTable {
    healthy_low_exclusive: f64,
    healthy_high_inclusive: f64,
    attention_high_inclusive: f64,
}

impl ThresholdTable {
    pub fn new(
        healthy_low_exclusive: f64,
        healthy_high_inclusive: f64,
        attention_high_inclusive: f64,
    ) -> Result<Self, ClassifyError> {
        for v in [
            healthy_low_exclusive,
            healthy_high_inclusive,
            attention_high_inclusive,
        ] {
            Celsius::new(v)?;
        }
        if !(healthy_low_exclusive < healthy_high_inclusive
            && healthy_high_inclusive < attention_high_inclusive)
        {
            return Err(ClassifyError::ThresholdOrder {
                low: healthy_low_exclusive,
                healthy_high: healthy_high_inclusive,
                attention_high: attention_high_inclusive,
            });
        }
        Ok(Self {
            healthy_low_exclusive,
            healthy_high_inclusive,
            attention_high_inclusive,
        })
    }

    pub fn healthy_low_exclusive(&self) -> f64 {
        self.healthy_low_exclusive
    }

    pub fn healthy_high_inclusive(&self) -> f64 {
        self.healthy_high_inclusive
    }

    pub fn attention_high_inclusive(&self) -> f64 {
        self.attention_high_inclusive
    }
}

impl Default for ThresholdTable {
    fn default() -> Self {
        Self {
            healthy_low_exclusive: 33.0,
            healthy_high_inclusive: 34.5,
            attention_high_inclusive: 36.5,
        }
    }
}

/// Inclusive temperature range used by [`ReferenceIndicators`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TempRange {
    pub low: f64,
    pub high: f64,
}

/// Literature reference values shown alongside a diagnosis. Display only;
/// classification reads [`ThresholdTable`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReferenceIndicators {
    pub body_superficial: TempRange,
    pub rectal_superficial: TempRange,
    pub healthy_teat: TempRange,
    pub sick_teat: f64,
    pub healthy_gland: TempRange,
    pub diseased_gland: f64,
    pub thermometer_accuracy: f64,
}

pub const REFERENCE_INDICATORS: ReferenceIndicators = ReferenceIndicators {
    body_superficial: TempRange {
        low: 35.8,
        high: 36.5,
    },
    rectal_superficial: TempRange {
        low: 36.5,
        high: 37.5,
    },
    healthy_teat: TempRange {
        low: 33.0,
        high: 34.5,
    },
    sick_teat: 36.5,
    healthy_gland: TempRange {
        low: 32.0,
        high: 37.0,
    },
    diseased_gland: 38.0,
    thermometer_accuracy: 0.3,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassificationMode {
    /// Branch precedence of the original app: Healthy, then Attention, then Sick.
    PaperFaithful,
    /// Most severe teat wins.
    #[default]
    WorstTeat,
}

impl ClassificationMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ClassificationMode::PaperFaithful => "paper-faithful",
            ClassificationMode::WorstTeat => "worst-teat",
        }
    }
}

impl fmt::Display for ClassificationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ClassificationMode {
    type Err = ClassifyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "paper-faithful" | "paper" => Ok(ClassificationMode::PaperFaithful),
            "worst-teat" | "worst" => Ok(ClassificationMode::WorstTeat),
            _ => Err(ClassifyError::UnknownMode(s.to_string())),
        }
    }
}

pub fn classify_teat(t: Celsius, thresholds: &ThresholdTable) -> HealthStatus {
    let t = t.value();
    if t <= thresholds.healthy_low_exclusive {
        HealthStatus::Indeterminate
    } else if t <= thresholds.healthy_high_inclusive {
        HealthStatus::Healthy
    } else if t <= thresholds.attention_high_inclusive {
        HealthStatus::Attention
    } else {
        HealthStatus::Sick
    }
}

pub fn classify_quartet(
    quartet: &TeatQuartet,
    mode: ClassificationMode,
    thresholds: &ThresholdTable,
) -> HealthStatus {
    let per_teat = quartet.teats().map(|t| classify_teat(t, thresholds));
    match mode {
        ClassificationMode::PaperFaithful => {
            // First status present on any teat, in branch order.
            [
                HealthStatus::Healthy,
                HealthStatus::Attention,
                HealthStatus::Sick,
            ]
            .into_iter()
            .find(|s| per_teat.contains(s))
            .unwrap_or(HealthStatus::Indeterminate)
        }
        // Indeterminate ranks lowest, so the plain maximum only yields it when
        // every teat is Indeterminate.
        ClassificationMode::WorstTeat => per_teat
            .into_iter()
            .max()
            .unwrap_or(HealthStatus::Indeterminate),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReferenceRange {
    pub status: HealthStatus,
    pub range: String,
}

/// Human-readable ranges for the Healthy, Attention and Sick verdicts,
/// generated from `thresholds`.
pub fn reference_ranges(thresholds: &ThresholdTable) -> Vec<ReferenceRange> {
    let low = fmt_temp(thresholds.healthy_low_exclusive);
    let mid = fmt_temp(thresholds.healthy_high_inclusive);
    let high = fmt_temp(thresholds.attention_high_inclusive);
    vec![
        ReferenceRange {
            status: HealthStatus::Healthy,
            range: format!("{low} < t ≤ {mid} °C"),
        },
        ReferenceRange {
            status: HealthStatus::Attention,
            range: format!("{mid} < t ≤ {high} °C"),
        },
        ReferenceRange {
            status: HealthStatus::Sick,
            range: format!("t > {high} °C"),
        },
    ]
}

/// At least one fractional digit, more only when the value needs them.
fn fmt_temp(v: f64) -> String {
    if v.fract() == 0.0 {
        format!("{v:.1}")
    } else {
        format!("{v}")
    }
}
