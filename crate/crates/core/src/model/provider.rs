use std::cmp::Ordering;
use std::collections::BTreeMap;

use super::{ModelError, Result};

/// A single state-point value: where, when, how much, how sure, in what units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DataEntry {
    pub value: f64,
    /// Same units as `value`; `0.0` means "not reported".
    pub uncertainty: f64,
    /// Index into the owning reactor's units table.
    pub units_id: u32,
    /// `(x, y, z)` in cm.
    pub position: [f64; 3],
    /// Seconds.
    pub time: f64,
}

impl DataEntry {
    pub fn new(value: f64, uncertainty: f64, units_id: u32, position: [f64; 3], time: f64) -> Self {
        Self {
            value,
            uncertainty,
            units_id,
            position,
            time,
        }
    }

    pub fn z(&self) -> f64 {
        self.position[2]
    }
}

/// All entries of one feature recorded at one time, in insertion order.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeBucket {
    time: f64,
    entries: Vec<DataEntry>,
}

impl TimeBucket {
    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn entries(&self) -> &[DataEntry] {
        &self.entries
    }
}

/// Associative container of tagged, timed data.
///
/// Features are kept in name order and times ascending, so iteration over a
/// provider is deterministic.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DataProvider {
    features: BTreeMap<String, Vec<TimeBucket>>,
}

impl DataProvider {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends `entry` to the bucket for `(feature, entry.time)`.
    pub fn add_data(&mut self, feature: &str, mut entry: DataEntry) -> Result<()> {
        if feature.is_empty() {
            return Err(ModelError::InvalidArgument("feature name is empty".into()));
        }
        if !entry.time.is_finite() {
            return Err(ModelError::InvalidArgument(format!(
                "time {} is not finite",
                entry.time
            )));
        }
        if entry.uncertainty.is_nan() || entry.uncertainty < 0.0 {
            return Err(ModelError::InvalidArgument(format!(
                "uncertainty {} must be non-negative",
                entry.uncertainty
            )));
        }
        if entry.time == 0.0 {
            entry.time = 0.0; // fold -0.0
        }
        let buckets = match self.features.get_mut(feature) {
            Some(b) => b,
            None => self.features.entry(feature.to_owned()).or_default(),
        };
        match buckets.binary_search_by(|b| cmp_time(b.time, entry.time)) {
            Ok(i) => buckets[i].entries.push(entry),
            Err(i) => buckets.insert(
                i,
                TimeBucket {
                    time: entry.time,
                    entries: vec![entry],
                },
            ),
        }
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn features(&self) -> impl Iterator<Item = &str> + '_ {
        self.features.keys().map(String::as_str)
    }

    pub fn has_feature(&self, feature: &str) -> bool {
        self.features.contains_key(feature)
    }

    pub fn buckets(&self, feature: &str) -> Option<&[TimeBucket]> {
        self.features.get(feature).map(Vec::as_slice)
    }

    pub fn times(&self, feature: &str) -> Vec<f64> {
        self.buckets(feature)
            .map(|b| b.iter().map(|b| b.time).collect())
            .unwrap_or_default()
    }

    pub fn entries(&self, feature: &str, time: f64) -> Option<&[DataEntry]> {
        let buckets = self.features.get(feature)?;
        buckets
            .binary_search_by(|b| cmp_time(b.time, time))
            .ok()
            .map(|i| buckets[i].entries.as_slice())
    }

    /// Every entry, grouped by feature then time.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &TimeBucket)> + '_ {
        self.features
            .iter()
            .flat_map(|(f, buckets)| buckets.iter().map(move |b| (f.as_str(), b)))
    }

    pub fn entry_count(&self) -> usize {
        self.iter().map(|(_, b)| b.entries.len()).sum()
    }

    pub(crate) fn max_units_id(&self) -> Option<u32> {
        self.iter()
            .flat_map(|(_, b)| b.entries.iter().map(|e| e.units_id))
            .max()
    }
}

fn cmp_time(a: f64, b: f64) -> Ordering {
    a.partial_cmp(&b).unwrap_or(Ordering::Equal)
}
