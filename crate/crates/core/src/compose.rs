//! Class-level operators: k-fold pointwise maximum, shift, scale, sign
//! thresholding, label augmentation, and hinge loss.

use std::collections::HashSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::class::{ClassMeta, Label, PartialClass, SampledClass};
use crate::error::{Error, Result};
use crate::generate::rng_from_seed;

pub const DEFAULT_MAX_CAP: usize = 1_000_000;

/// How tuples are drawn when composing a k-fold maximum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum MaxMode {
    /// Every tuple of the cross product, in lexicographic order.
    Full { cap: usize },
    /// `count` distinct tuples drawn without replacement.
    Sampled { count: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaxSpec {
    pub mode: MaxMode,
}

impl Default for MaxSpec {
    fn default() -> Self {
        MaxSpec {
            mode: MaxMode::Full {
                cap: DEFAULT_MAX_CAP,
            },
        }
    }
}

fn check_shared_domain(classes: &[&SampledClass]) -> Result<()> {
    if classes.is_empty() {
        return Err(Error::InvalidParam("no component classes".into()));
    }
    let domain = &classes[0].domain;
    for (i, c) in classes.iter().enumerate().skip(1) {
        if &c.domain != domain {
            return Err(Error::DomainMismatch(format!(
                "component {i} has a different domain"
            )));
        }
    }
    Ok(())
}

fn tuple_row(classes: &[&SampledClass], tuple: &[usize]) -> Vec<f64> {
    let cols = classes[0].n_points();
    let mut row = classes[0].values[tuple[0]].clone();
    for (class, &idx) in classes.iter().zip(tuple).skip(1) {
        for x in 0..cols {
            row[x] = row[x].max(class.values[idx][x]);
        }
    }
    row
}

/// Pointwise maximum over one function drawn from each component class, one
/// output row per chosen tuple. Rows are not deduplicated.
pub fn k_fold_max(classes: &[&SampledClass], spec: &MaxSpec) -> Result<SampledClass> {
    check_shared_domain(classes)?;
    let sizes: Vec<usize> = classes.iter().map(|c| c.n_functions()).collect();
    let product: u128 = sizes.iter().map(|&s| s as u128).product();

    match spec.mode {
        MaxMode::Full { cap } => {
            if product > cap as u128 {
                return Err(Error::CapExceeded(format!(
                    "cross product has {product} tuples, cap is {cap}"
                )));
            }
            let mut tuples = Vec::with_capacity(product as usize);
            let mut current = vec![0usize; classes.len()];
            'outer: loop {
                tuples.push(current.clone());
                // Lexicographic increment, first component most significant.
                let mut pos = classes.len();
                loop {
                    if pos == 0 {
                        break 'outer;
                    }
                    pos -= 1;
                    current[pos] += 1;
                    if current[pos] < sizes[pos] {
                        break;
                    }
                    current[pos] = 0;
                }
            }
            finish_max(classes, tuples, None)
        }
        MaxMode::Sampled { count, seed } => {
            if count == 0 {
                return Err(Error::InvalidParam("sample count must be positive".into()));
            }
            if (count as u128) > product {
                return Err(Error::InvalidParam(format!(
                    "cannot draw {count} distinct tuples from a product of {product}"
                )));
            }
            let mut rng = rng_from_seed(seed);
            let mut chosen: HashSet<u128> = HashSet::new();
            let mut tuples = Vec::with_capacity(count);
            while tuples.len() < count {
                let flat = rng.gen_range(0..product);
                if !chosen.insert(flat) {
                    continue;
                }
                let mut rem = flat;
                let mut tuple = vec![0usize; classes.len()];
                for pos in (0..classes.len()).rev() {
                    tuple[pos] = (rem % sizes[pos] as u128) as usize;
                    rem /= sizes[pos] as u128;
                }
                tuples.push(tuple);
            }
            finish_max(classes, tuples, Some(seed))
        }
    }
}

fn finish_max(
    classes: &[&SampledClass],
    tuples: Vec<Vec<usize>>,
    seed: Option<u64>,
) -> Result<SampledClass> {
    let values = tuples.iter().map(|t| tuple_row(classes, t)).collect();
    let out = SampledClass::new(classes[0].domain.clone(), values)?;
    Ok(out.with_metadata(ClassMeta {
        generator: Some(format!("max_k{}", classes.len())),
        seed,
        tuples: Some(tuples),
        ..ClassMeta::default()
    }))
}

/// Columnwise shift: `f(x) - r(x)` for every row.
pub fn shift_class(class: &SampledClass, shift: &[f64]) -> Result<SampledClass> {
    if shift.len() != class.n_points() {
        return Err(Error::InvalidParam(format!(
            "shift has {} entries for {} points",
            shift.len(),
            class.n_points()
        )));
    }
    let values = class
        .values
        .iter()
        .map(|row| row.iter().zip(shift).map(|(v, r)| v - r).collect())
        .collect();
    SampledClass::new(class.domain.clone(), values)
}

/// Multiplies all values by `lambda`.
pub fn scale_class(class: &SampledClass, lambda: f64) -> SampledClass {
    let values = class
        .values
        .iter()
        .map(|row| row.iter().map(|v| v * lambda).collect())
        .collect();
    SampledClass {
        domain: class.domain.clone(),
        values,
        metadata: None,
    }
}

/// Entrywise indicator of `>= 0`, as a total partial class.
pub fn sign_threshold_class(class: &SampledClass) -> PartialClass {
    let values = class
        .values
        .iter()
        .map(|row| row.iter().map(|&v| Label::from_bit(v >= 0.0)).collect())
        .collect();
    PartialClass {
        domain: class.domain.clone(),
        values,
    }
}

fn check_labels(class: &SampledClass, labels: &[i8]) -> Result<()> {
    if labels.len() != class.n_points() {
        return Err(Error::InvalidParam(format!(
            "{} labels for {} points",
            labels.len(),
            class.n_points()
        )));
    }
    if labels.iter().any(|&y| y != 1 && y != -1) {
        return Err(Error::InvalidParam("labels must be +-1".into()));
    }
    Ok(())
}

/// The label-augmented class: row value at `(x, y)` is `y * f(x)`.
pub fn label_augment_class(class: &SampledClass, labels: &[i8]) -> Result<SampledClass> {
    check_labels(class, labels)?;
    let domain = class
        .domain
        .iter()
        .zip(labels)
        .map(|(x, y)| format!("{x}|{}", if *y > 0 { "+" } else { "-" }))
        .collect();
    let values = class
        .values
        .iter()
        .map(|row| {
            row.iter()
                .zip(labels)
                .map(|(v, &y)| f64::from(y) * v)
                .collect()
        })
        .collect();
    SampledClass::new(domain, values)
}

/// Hinge loss over the label-augmented domain: `max(0, 1 - y * f(x))`.
pub fn hinge_loss_class(class: &SampledClass, labels: &[i8]) -> Result<SampledClass> {
    let augmented = label_augment_class(class, labels)?;
    let values = augmented
        .values
        .iter()
        .map(|row| row.iter().map(|v| (1.0 - v).max(0.0)).collect())
        .collect();
    SampledClass::new(augmented.domain, values)
}
