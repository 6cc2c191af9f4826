use std::fmt;

use num_traits::{Signed, Zero};
use serde_json::{json, Value};

use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WeightError {
    #[error("weight on `{label}` is negative ({value}); not a weight vector")]
    Negative { label: String, value: String },
    #[error("{labels} labels but {values} values")]
    LengthMismatch { labels: usize, values: usize },
    #[error("label `{0}` appears twice")]
    DuplicateLabel(String),
    #[error("index mismatch: expected ({expected}), got ({found})")]
    IndexMismatch { expected: String, found: String },
}

/// Nonnegative exact weights indexed by segment or sector ids.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeightVector {
    labels: Vec<String>,
    values: Vec<Rational>,
}

impl WeightVector {
    pub fn new(labels: Vec<String>, values: Vec<Rational>) -> Result<Self, WeightError> {
        if labels.len() != values.len() {
            return Err(WeightError::LengthMismatch {
                labels: labels.len(),
                values: values.len(),
            });
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(WeightError::DuplicateLabel(l.clone()));
            }
        }
        if let Some((l, v)) = labels.iter().zip(&values).find(|(_, v)| v.is_negative()) {
            return Err(WeightError::Negative {
                label: l.clone(),
                value: v.to_string(),
            });
        }
        Ok(WeightVector { labels, values })
    }

    pub fn zeros(labels: Vec<String>) -> Self {
        let values = vec![Rational::zero(); labels.len()];
        WeightVector { labels, values }
    }

    pub fn from_pairs<S: Into<String>>(
        pairs: impl IntoIterator<Item = (S, Rational)>,
    ) -> Result<Self, WeightError> {
        let (labels, values) = pairs.into_iter().map(|(l, v)| (l.into(), v)).unzip();
        WeightVector::new(labels, values)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Rational> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, label: &str) -> Option<&Rational> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| &self.values[i])
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Zero::is_zero)
    }

    pub fn is_integral(&self) -> bool {
        rational::is_integral(&self.values)
    }

    pub fn expect_labels(&self, expected: &[String]) -> Result<(), WeightError> {
        if self.labels == expected {
            Ok(())
        } else {
            Err(WeightError::IndexMismatch {
                expected: expected.join(", "),
                found: self.labels.join(", "),
            })
        }
    }

    /// Componentwise sum; labels must agree.
    pub fn add(&self, other: &WeightVector) -> Result<WeightVector, WeightError> {
        other.expect_labels(&self.labels)?;
        Ok(WeightVector {
            labels: self.labels.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn scale(&self, lambda: &Rational) -> Result<WeightVector, WeightError> {
        WeightVector::new(
            self.labels.clone(),
            self.values.iter().map(|v| v * lambda).collect(),
        )
    }

    /// `(1 - t) self + t other` for `t` in `[0, 1]`.
    pub fn lerp(&self, other: &WeightVector, t: &Rational) -> Result<WeightVector, WeightError> {
        other.expect_labels(&self.labels)?;
        let s = Rational::from_integer(1.into()) - t;
        WeightVector::new(
            self.labels.clone(),
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a * &s + b * t)
                .collect(),
        )
    }

    pub fn to_json(&self) -> Value {
        let entries: serde_json::Map<String, Value> = self
            .labels
            .iter()
            .zip(&self.values)
            .map(|(l, v)| (l.clone(), rational::to_json(v)))
            .collect();
        json!(entries)
    }
}

impl fmt::Display for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .labels
            .iter()
            .zip(&self.values)
            .map(|(l, v)| format!("{l}={v}"))
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}
