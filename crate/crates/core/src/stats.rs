//! Change statistics over diff streams and the relative-difference metric
//! used to compare a reproduced count vector against a published one.
//!
//! All percentages are computed in integer arithmetic and rounded half-up,
//! so rendering never depends on float formatting.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, AddAssign, Index, IndexMut};

use serde::de::{self, MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::diff::{DiffResult, SmoKind};

/// One nonnegative count per operation kind.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct KindCounts(pub [u64; 7]);

impl KindCounts {
    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (SmoKind, u64)> + '_ {
        SmoKind::ALL.into_iter().map(|k| (k, self[k]))
    }
}

impl Index<SmoKind> for KindCounts {
    type Output = u64;
    fn index(&self, k: SmoKind) -> &u64 {
        &self.0[k.index()]
    }
}

impl IndexMut<SmoKind> for KindCounts {
    fn index_mut(&mut self, k: SmoKind) -> &mut u64 {
        &mut self.0[k.index()]
    }
}

impl Add for KindCounts {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        self += rhs;
        self
    }
}

impl AddAssign for KindCounts {
    fn add_assign(&mut self, rhs: Self) {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a += b;
        }
    }
}

impl Serialize for KindCounts {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(7))?;
        for (k, n) in self.iter() {
            map.serialize_entry(k.name(), &n)?;
        }
        map.end()
    }
}

/// Accepts any subset of the seven kind names; missing kinds count zero.
impl<'de> Deserialize<'de> for KindCounts {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = KindCounts;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a map from operation kind names to counts")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<KindCounts, A::Error> {
                let mut out = KindCounts::default();
                let mut seen = [false; 7];
                while let Some(key) = map.next_key::<String>()? {
                    let kind = SmoKind::from_name(&key).ok_or_else(|| {
                        de::Error::unknown_field(&key, &["create_table", "drop_table", "add_column", "drop_column", "type_change", "init_change", "key_change"])
                    })?;
                    if core::mem::replace(&mut seen[kind.index()], true) {
                        return Err(de::Error::custom(alloc::format!("duplicate kind `{key}`")));
                    }
                    out[kind] = map.next_value()?;
                }
                Ok(out)
            }
        }
        d.deserialize_map(V)
    }
}

/// A percentage in tenths of a percent: `Tenths(204)` is 20.4%.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tenths(pub u64);

impl Tenths {
    /// `part / whole × 100`, rounded half-up to one decimal; zero when
    /// `whole` is zero.
    pub fn of(part: u64, whole: u64) -> Self {
        Self(ratio_half_up(part, whole, 1_000))
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64 / 10.0
    }
}

impl fmt::Display for Tenths {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.0 / 10, self.0 % 10)
    }
}

impl Serialize for Tenths {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(self.as_f64())
    }
}

/// A percentage in hundredths of a percent: `Hundredths(2037)` is 20.37%.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Hundredths(pub u64);

impl Hundredths {
    pub fn of(part: u64, whole: u64) -> Self {
        Self(ratio_half_up(part, whole, 10_000))
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64 / 100.0
    }
}

impl fmt::Display for Hundredths {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{:02}", self.0 / 100, self.0 % 100)
    }
}

impl Serialize for Hundredths {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(self.as_f64())
    }
}

fn ratio_half_up(part: u64, whole: u64, scale: u64) -> u64 {
    if whole == 0 {
        return 0;
    }
    let (part, whole, scale) = (u128::from(part), u128::from(whole), u128::from(scale));
    ((2 * part * scale + whole) / (2 * whole)) as u64
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct KindPercents(pub [Tenths; 7]);

impl Index<SmoKind> for KindPercents {
    type Output = Tenths;
    fn index(&self, k: SmoKind) -> &Tenths {
        &self.0[k.index()]
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ChangeStats {
    pub counts: KindCounts,
    pub total: u64,
    #[serde(serialize_with = "percents_as_map")]
    pub percentages: KindPercents,
    /// Operations from diffs that touched a partial snapshot. Already
    /// included in `counts`.
    pub suspect_counts: KindCounts,
    pub suspect_total: u64,
}

fn percents_as_map<S: Serializer>(p: &KindPercents, s: S) -> Result<S::Ok, S::Error> {
    let mut map = s.serialize_map(Some(7))?;
    for k in SmoKind::ALL {
        map.serialize_entry(k.name(), &p[k])?;
    }
    map.end()
}

impl ChangeStats {
    pub fn from_counts(counts: KindCounts, suspect_counts: KindCounts) -> Self {
        let total = counts.total();
        let mut percentages = KindPercents::default();
        for (k, n) in counts.iter() {
            percentages.0[k.index()] = Tenths::of(n, total);
        }
        Self { counts, total, percentages, suspect_counts, suspect_total: suspect_counts.total() }
    }

    /// Checks the aggregate's internal invariants; a failure means a bug.
    pub fn check(&self) -> Result<(), String> {
        if self.total != self.counts.total() {
            return Err(alloc::format!("total {} differs from the sum of counts {}", self.total, self.counts.total()));
        }
        if self.suspect_total != self.suspect_counts.total() {
            return Err(String::from("suspect total differs from the sum of suspect counts"));
        }
        if self.suspect_counts.iter().any(|(k, n)| n > self.counts[k]) {
            return Err(String::from("a suspect count exceeds its kind's count"));
        }
        let sum: u64 = self.percentages.0.iter().map(|t| t.0).sum();
        let ok = if self.total == 0 { sum == 0 } else { sum.abs_diff(1000) <= 3 };
        if !ok {
            return Err(alloc::format!("percentages sum to {}", Tenths(sum)));
        }
        Ok(())
    }
}

/// Counts every operation by kind. The result does not depend on the order
/// of `diffs`.
pub fn aggregate(diffs: &[DiffResult]) -> ChangeStats {
    let mut counts = KindCounts::default();
    let mut suspect = KindCounts::default();
    for d in diffs {
        for smo in &d.smos {
            counts[smo.kind()] += 1;
            if d.suspect {
                suspect[smo.kind()] += 1;
            }
        }
    }
    ChangeStats::from_counts(counts, suspect)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RevisionRow {
    /// Label of the newer revision of the pair.
    pub revision: String,
    pub changes: u64,
    pub suspect: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct RevisionTable {
    pub rows: Vec<RevisionRow>,
    pub total: u64,
}

/// One row per diff with at least one operation, in input order.
pub fn per_revision_table(diffs: &[DiffResult]) -> RevisionTable {
    let rows: Vec<RevisionRow> = diffs
        .iter()
        .filter(|d| !d.smos.is_empty())
        .map(|d| RevisionRow { revision: d.to_revision.clone(), changes: d.smos.len() as u64, suspect: d.suspect })
        .collect();
    let total = rows.iter().map(|r| r.changes).sum();
    RevisionTable { rows, total }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricError {
    ZeroBaseline,
}

impl fmt::Display for MetricError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricError::ZeroBaseline => f.write_str("baseline total is zero; the relative difference is undefined"),
        }
    }
}

impl core::error::Error for MetricError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ComparisonReport {
    pub baseline: KindCounts,
    pub reproduced: KindCounts,
    pub baseline_total: u64,
    pub reproduced_total: u64,
    pub abs_diff: u64,
    pub rel_diff_percent: Hundredths,
}

impl ComparisonReport {
    pub fn rel_diff(&self) -> f64 {
        self.rel_diff_percent.as_f64()
    }
}

/// `Σ|p(s) − r(s)| / Σp(s) × 100`, rounded half-up to two decimals.
pub fn relative_difference(p: &KindCounts, r: &KindCounts) -> Result<ComparisonReport, MetricError> {
    let baseline_total = p.total();
    if baseline_total == 0 {
        return Err(MetricError::ZeroBaseline);
    }
    let abs_diff = p.0.iter().zip(r.0).map(|(a, b)| a.abs_diff(b)).sum();
    Ok(ComparisonReport {
        baseline: *p,
        reproduced: *r,
        baseline_total,
        reproduced_total: r.total(),
        abs_diff,
        rel_diff_percent: Hundredths::of(abs_diff, baseline_total),
    })
}
