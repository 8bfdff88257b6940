//! Finite function classes, partial classes, measures, and the margin
//! discretizer.
//!
//! A [`SampledClass`] is a rectangular matrix of finite reals, one row per
//! function and one column per domain point. A [`PartialClass`] is the same
//! shape over the three-letter alphabet `{0, 1, *}`. Everything is immutable
//! after construction, so values can be shared freely across workers.

use std::fmt;
use std::path::Path;

use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Three-valued label of a partial concept: `0`, `1`, or undefined (`*`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Zero,
    One,
    Star,
}

impl Label {
    pub fn from_bit(b: bool) -> Self {
        if b {
            Label::One
        } else {
            Label::Zero
        }
    }

    pub fn is_star(self) -> bool {
        self == Label::Star
    }

    /// The defined bit, if any.
    pub fn bit(self) -> Option<bool> {
        match self {
            Label::Zero => Some(false),
            Label::One => Some(true),
            Label::Star => None,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Zero => write!(f, "0"),
            Label::One => write!(f, "1"),
            Label::Star => write!(f, "*"),
        }
    }
}

// File format: 0, 1, or the string "*".
impl Serialize for Label {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Label::Zero => s.serialize_u8(0),
            Label::One => s.serialize_u8(1),
            Label::Star => s.serialize_str("*"),
        }
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        match &v {
            serde_json::Value::Number(n) => match n.as_i64() {
                Some(0) => Ok(Label::Zero),
                Some(1) => Ok(Label::One),
                _ => Err(de::Error::custom(format!(
                    "partial-class entry must be 0, 1 or \"*\", got {n}"
                ))),
            },
            serde_json::Value::String(s) if s == "*" => Ok(Label::Star),
            other => Err(de::Error::custom(format!(
                "partial-class entry must be 0, 1 or \"*\", got {other}"
            ))),
        }
    }
}

/// Optional provenance carried by generated classes.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassMeta {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub generator: Option<String>,
    /// Scale the generator targeted, when one was used.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    /// Affine parameters `(w, b)` per row, for sampled affine classes.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub affine_params: Option<Vec<(Vec<f64>, f64)>>,
    /// Component-row tuple per row, for cross-product maxima.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub tuples: Option<Vec<Vec<usize>>>,
}

impl ClassMeta {
    pub fn is_empty(&self) -> bool {
        *self == ClassMeta::default()
    }
}

/// A finite real-valued function class: `values[f][x] = f(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledClass {
    pub domain: Vec<String>,
    pub values: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub metadata: Option<ClassMeta>,
}

impl SampledClass {
    /// Builds a class with auto-named domain points `x0, x1, ...`.
    pub fn from_rows(values: Vec<Vec<f64>>) -> Result<Self> {
        let cols = values.first().map(|r| r.len()).unwrap_or(0);
        let domain = (0..cols).map(|i| format!("x{i}")).collect();
        Self::new(domain, values)
    }

    pub fn new(domain: Vec<String>, values: Vec<Vec<f64>>) -> Result<Self> {
        let class = SampledClass {
            domain,
            values,
            metadata: None,
        };
        class.validate()?;
        Ok(class)
    }

    pub fn with_metadata(mut self, meta: ClassMeta) -> Self {
        self.metadata = Some(meta);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.domain.is_empty() {
            return Err(Error::InvalidClass("domain must be nonempty".into()));
        }
        if self.values.is_empty() {
            return Err(Error::InvalidClass(
                "class must contain at least one function".into(),
            ));
        }
        for (i, row) in self.values.iter().enumerate() {
            if row.len() != self.domain.len() {
                return Err(Error::InvalidClass(format!(
                    "row {i} has {} entries, expected {}",
                    row.len(),
                    self.domain.len()
                )));
            }
            if let Some(bad) = row.iter().find(|v| !v.is_finite()) {
                return Err(Error::InvalidClass(format!(
                    "row {i} contains non-finite value {bad}"
                )));
            }
        }
        Ok(())
    }

    pub fn n_functions(&self) -> usize {
        self.values.len()
    }

    pub fn n_points(&self) -> usize {
        self.domain.len()
    }

    pub fn column(&self, x: usize) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().map(move |row| row[x])
    }

    /// Projection onto a point subset: keeps the selected columns, in the
    /// given order. Duplicate rows are retained.
    pub fn restrict(&self, subset: &[usize]) -> Result<SampledClass> {
        check_subset(subset, self.n_points())?;
        let domain = subset.iter().map(|&i| self.domain[i].clone()).collect();
        let values = self
            .values
            .iter()
            .map(|row| subset.iter().map(|&i| row[i]).collect())
            .collect();
        Ok(SampledClass {
            domain,
            values,
            metadata: self.metadata.clone(),
        })
    }

    /// Entrywise margin discretization: `<= -gamma` becomes 0, `>= gamma`
    /// becomes 1, the open band in between becomes `*`. Ties at exactly
    /// `+-gamma` take the decided label.
    pub fn discretize(&self, spec: &DiscretizerSpec) -> PartialClass {
        let values = self
            .values
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&v| {
                        if v <= -spec.gamma {
                            Label::Zero
                        } else if v >= spec.gamma {
                            Label::One
                        } else {
                            Label::Star
                        }
                    })
                    .collect()
            })
            .collect();
        PartialClass {
            domain: self.domain.clone(),
            values,
        }
    }

    /// Removes duplicate rows, keeping first occurrences. Never applied
    /// implicitly by other operations.
    pub fn dedup_rows(&self) -> SampledClass {
        let mut seen: std::collections::HashSet<Vec<u64>> = std::collections::HashSet::new();
        let mut values = Vec::new();
        for row in &self.values {
            let key: Vec<u64> = row.iter().map(|v| v.to_bits()).collect();
            if seen.insert(key) {
                values.push(row.clone());
            }
        }
        SampledClass {
            domain: self.domain.clone(),
            values,
            metadata: None,
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        serde_json::to_writer_pretty(file, self)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<SampledClass> {
        let file = std::fs::File::open(path)?;
        let class: SampledClass = serde_json::from_reader(file)?;
        class.validate()?;
        Ok(class)
    }
}

/// A partial concept class over `{0, 1, *}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartialClass {
    pub domain: Vec<String>,
    pub values: Vec<Vec<Label>>,
}

impl PartialClass {
    pub fn from_rows(values: Vec<Vec<Label>>) -> Result<Self> {
        let cols = values.first().map(|r| r.len()).unwrap_or(0);
        let domain = (0..cols).map(|i| format!("x{i}")).collect();
        Self::new(domain, values)
    }

    /// Builds a total class from bit rows (no stars).
    pub fn from_bit_rows(rows: Vec<Vec<bool>>) -> Result<Self> {
        Self::from_rows(
            rows.into_iter()
                .map(|r| r.into_iter().map(Label::from_bit).collect())
                .collect(),
        )
    }

    pub fn new(domain: Vec<String>, values: Vec<Vec<Label>>) -> Result<Self> {
        let class = PartialClass { domain, values };
        class.validate()?;
        Ok(class)
    }

    pub fn validate(&self) -> Result<()> {
        if self.domain.is_empty() {
            return Err(Error::InvalidClass("domain must be nonempty".into()));
        }
        if self.values.is_empty() {
            return Err(Error::InvalidClass(
                "class must contain at least one concept".into(),
            ));
        }
        for (i, row) in self.values.iter().enumerate() {
            if row.len() != self.domain.len() {
                return Err(Error::InvalidClass(format!(
                    "row {i} has {} entries, expected {}",
                    row.len(),
                    self.domain.len()
                )));
            }
        }
        Ok(())
    }

    pub fn n_concepts(&self) -> usize {
        self.values.len()
    }

    pub fn n_points(&self) -> usize {
        self.domain.len()
    }

    pub fn is_total(&self) -> bool {
        self.values
            .iter()
            .all(|row| row.iter().all(|l| !l.is_star()))
    }

    pub fn restrict(&self, subset: &[usize]) -> Result<PartialClass> {
        check_subset(subset, self.n_points())?;
        let domain = subset.iter().map(|&i| self.domain[i].clone()).collect();
        let values = self
            .values
            .iter()
            .map(|row| subset.iter().map(|&i| row[i]).collect())
            .collect();
        Ok(PartialClass { domain, values })
    }

    /// Distinct-row count of the projection onto the full domain.
    pub fn distinct_rows(&self) -> usize {
        let set: std::collections::HashSet<&[Label]> =
            self.values.iter().map(|r| r.as_slice()).collect();
        set.len()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        serde_json::to_writer_pretty(file, self)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<PartialClass> {
        let file = std::fs::File::open(path)?;
        let class: PartialClass = serde_json::from_reader(file)?;
        class.validate()?;
        Ok(class)
    }
}

/// A probability measure on the domain points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measure {
    pub weights: Vec<f64>,
}

const MEASURE_TOL: f64 = 1e-12;

impl Measure {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidMeasure("no weights".into()));
        }
        if let Some(bad) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::InvalidMeasure(format!("bad weight {bad}")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > MEASURE_TOL {
            return Err(Error::InvalidMeasure(format!(
                "weights sum to {total}, expected 1"
            )));
        }
        Ok(Measure { weights })
    }

    pub fn uniform(n: usize) -> Self {
        Measure {
            weights: vec![1.0 / n as f64; n],
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn load(path: &Path) -> Result<Measure> {
        let file = std::fs::File::open(path)?;
        let m: Measure = serde_json::from_reader(file)?;
        Measure::new(m.weights)
    }
}

/// Parameters of the margin discretizer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscretizerSpec {
    pub gamma: f64,
}

impl DiscretizerSpec {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidParam(format!(
                "discretizer scale must be positive, got {gamma}"
            )));
        }
        Ok(DiscretizerSpec { gamma })
    }
}

pub(crate) fn check_subset(subset: &[usize], n_points: usize) -> Result<()> {
    if subset.is_empty() {
        return Err(Error::InvalidSubset("empty subset".into()));
    }
    if let Some(&bad) = subset.iter().find(|&&i| i >= n_points) {
        return Err(Error::InvalidSubset(format!(
            "index {bad} out of range for {n_points} points"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn class(values: Vec<Vec<f64>>) -> SampledClass {
        SampledClass::from_rows(values).unwrap()
    }

    #[test]
    fn restrict_selects_columns() {
        let f = class(vec![vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]);
        let r = f.restrict(&[0, 2]).unwrap();
        assert_eq!(r.values, vec![vec![1.0, 3.0], vec![4.0, 6.0]]);
        assert_eq!(r.domain, vec!["x0", "x2"]);
    }

    #[test]
    fn restrict_all_indices_is_identity() {
        let f = class(vec![vec![1.0, 2.0], vec![3.0, 4.0]]);
        let r = f.restrict(&[0, 1]).unwrap();
        assert_eq!(r.values, f.values);
    }

    #[test]
    fn restrict_single_column() {
        let f = class(vec![vec![5.0, 7.0, 9.0], vec![1.0, 2.0, 3.0]]);
        let r = f.restrict(&[1]).unwrap();
        assert_eq!(r.values, vec![vec![7.0], vec![2.0]]);
    }

    #[test]
    fn restrict_rejects_bad_subsets() {
        let f = class(vec![vec![1.0, 2.0]]);
        assert!(f.restrict(&[]).is_err());
        assert!(f.restrict(&[2]).is_err());
    }

    #[test]
    fn discretize_thresholds() {
        let spec = DiscretizerSpec::new(1.0).unwrap();
        let f = class(vec![vec![2.0, -2.0, 0.0, 1.0, -1.0, 0.5]]);
        let p = f.discretize(&spec);
        assert_eq!(
            p.values[0],
            vec![
                Label::One,
                Label::Zero,
                Label::Star,
                Label::One,
                Label::Zero,
                Label::Star
            ]
        );
    }

    #[test]
    fn discretize_cube_has_no_stars_and_distinct_rows() {
        let gamma = 1.0;
        let rows: Vec<Vec<f64>> = (0..8u32)
            .map(|m| {
                (0..3)
                    .map(|i| if m >> i & 1 == 1 { gamma } else { -gamma })
                    .collect()
            })
            .collect();
        let p = class(rows).discretize(&DiscretizerSpec::new(gamma).unwrap());
        assert!(p.is_total());
        assert_eq!(p.distinct_rows(), 8);
    }

    #[test]
    fn restrict_commutes_with_discretize() {
        let spec = DiscretizerSpec::new(0.5).unwrap();
        let f = class(vec![
            vec![0.0, 0.5, -0.5, 0.25],
            vec![1.0, -1.0, 0.75, -0.25],
        ]);
        let s = [3, 1];
        let a = f.restrict(&s).unwrap().discretize(&spec);
        let b = f.discretize(&spec).restrict(&s).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn invariants_rejected() {
        assert!(SampledClass::from_rows(vec![]).is_err());
        assert!(SampledClass::from_rows(vec![vec![1.0], vec![1.0, 2.0]]).is_err());
        assert!(SampledClass::from_rows(vec![vec![f64::NAN]]).is_err());
        assert!(Measure::new(vec![0.5, 0.6]).is_err());
        assert!(Measure::new(vec![-0.5, 1.5]).is_err());
        assert!(DiscretizerSpec::new(0.0).is_err());
    }

    #[test]
    fn class_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("class.json");
        let f = class(vec![vec![1.0, -2.5], vec![0.0, 3.0]]);
        f.save(&path).unwrap();
        let g = SampledClass::load(&path).unwrap();
        assert_eq!(f.values, g.values);
        assert_eq!(f.domain, g.domain);
    }

    #[test]
    fn ragged_file_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.json");
        std::fs::write(&path, r#"{"domain":["a","b"],"values":[[1.0],[1.0,2.0]]}"#).unwrap();
        assert!(SampledClass::load(&path).is_err());
    }

    #[test]
    fn partial_class_file_round_trip_and_alphabet() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("partial.json");
        std::fs::write(&path, r#"{"domain":["a","b"],"values":[[0,"*"],[1,0]]}"#).unwrap();
        let p = PartialClass::load(&path).unwrap();
        assert_eq!(p.values[0], vec![Label::Zero, Label::Star]);
        p.save(&path).unwrap();
        let q = PartialClass::load(&path).unwrap();
        assert_eq!(p, q);

        std::fs::write(&path, r#"{"domain":["a"],"values":[[2]]}"#).unwrap();
        assert!(PartialClass::load(&path).is_err());
    }

    #[test]
    fn dedup_keeps_first_occurrence() {
        let f = class(vec![vec![1.0, 2.0], vec![1.0, 2.0], vec![0.0, 0.0]]);
        let d = f.dedup_rows();
        assert_eq!(d.values, vec![vec![1.0, 2.0], vec![0.0, 0.0]]);
    }
}
