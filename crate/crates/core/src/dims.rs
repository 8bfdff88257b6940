//! Exact margin-shattering and VC dimensions with certificates.
//!
//! The shifted decision uses the gap reformulation: a subset is shattered at
//! scale `gamma` iff some assignment of one witness function per sign pattern
//! leaves, in every column, a gap of at least `2*gamma` between the smallest
//! plus-side value and the largest minus-side value. The shift entry is then
//! the midpoint of that gap. The search backtracks over patterns in Gray-code
//! order with per-column interval pruning.
//!
//! [`fat_via_shift_scan`] is an independent oracle for the same quantity: it
//! enumerates shift candidates from the per-column midpoint grid and checks
//! each pattern for a witness directly, without any gap bookkeeping.

use std::collections::BTreeMap;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::class::{check_subset, Label, PartialClass, SampledClass};
use crate::error::{Error, Result};

/// Whether the shift vector is free or pinned to zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShatterMode {
    Shifted,
    Zero,
}

/// Explicit proof that a subset is shattered: one witness row per sign
/// pattern, plus the shift that realizes the margins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShatterCertificate {
    /// Ordered domain indices of the shattered set.
    pub subset: Vec<usize>,
    /// Shift entry per subset position (all zero in zero mode).
    pub shift: Vec<f64>,
    /// Sign pattern (string over `+`/`-`, one char per subset position)
    /// to witness row index.
    pub witnesses: BTreeMap<String, usize>,
    pub gamma: f64,
}

pub fn pattern_string(mask: u32, m: usize) -> String {
    (0..m)
        .map(|j| if mask >> j & 1 == 1 { '+' } else { '-' })
        .collect()
}

fn pattern_sign(mask: u32, j: usize) -> f64 {
    if mask >> j & 1 == 1 {
        1.0
    } else {
        -1.0
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub subsets_examined: u64,
    pub nodes: u64,
    pub pruned_columns: usize,
}

/// Dimension value plus the evidence behind it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimResult {
    pub dimension: usize,
    /// A maximum shattered set, when the dimension is positive.
    pub certificate: Option<ShatterCertificate>,
    /// False when a budget cap downgraded the value to a certified lower
    /// bound.
    pub exact: bool,
    pub stats: SearchStats,
}

/// Pattern enumeration uses 32-bit masks; anything near this size is far
/// beyond exact desk scale anyway.
pub const MAX_SUBSET_HARD_CAP: usize = 25;

/// Caps on the exact search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    /// Largest subset size examined (hard-capped at
    /// [`MAX_SUBSET_HARD_CAP`]).
    pub max_subset: usize,
    /// Cap on search nodes across the whole call.
    pub max_nodes: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_subset: 20,
            max_nodes: 10_000_000,
        }
    }
}

/// Checks a certificate against the class: every pattern's witness must
/// satisfy `y_i (f(x_i) - r_i) >= gamma` at every subset position.
pub fn check_certificate(
    class: &SampledClass,
    cert: &ShatterCertificate,
    mode: ShatterMode,
) -> Result<bool> {
    check_subset(&cert.subset, class.n_points())?;
    if cert.subset.len() > MAX_SUBSET_HARD_CAP {
        return Err(Error::InvalidCertificate(format!(
            "subset of size {} exceeds the hard cap of {MAX_SUBSET_HARD_CAP}",
            cert.subset.len()
        )));
    }
    if cert.shift.len() != cert.subset.len() {
        return Err(Error::InvalidCertificate(format!(
            "shift has {} entries for a subset of size {}",
            cert.shift.len(),
            cert.subset.len()
        )));
    }
    if !(cert.gamma > 0.0) {
        return Err(Error::InvalidCertificate(format!(
            "scale must be positive, got {}",
            cert.gamma
        )));
    }
    if mode == ShatterMode::Zero && cert.shift.iter().any(|&r| r != 0.0) {
        return Err(Error::InvalidCertificate(
            "zero mode requires an all-zero shift".into(),
        ));
    }
    let m = cert.subset.len();
    for mask in 0..(1u32 << m) {
        let key = pattern_string(mask, m);
        let &row = cert
            .witnesses
            .get(&key)
            .ok_or_else(|| Error::InvalidCertificate(format!("missing pattern {key}")))?;
        if row >= class.n_functions() {
            return Err(Error::InvalidCertificate(format!(
                "witness row {row} out of range"
            )));
        }
        for (j, &x) in cert.subset.iter().enumerate() {
            let margin = pattern_sign(mask, j) * (class.values[row][x] - cert.shift[j]);
            if margin < cert.gamma {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

struct GapSearch<'a> {
    // vals[row][j] = value of row at subset position j
    vals: &'a [Vec<f64>],
    m: usize,
    gamma2: f64,
    lo: Vec<f64>, // per position: min over plus assignments
    hi: Vec<f64>, // per position: max over minus assignments
    assign: Vec<usize>,
    nodes: u64,
    max_nodes: u64,
    exceeded: bool,
}

impl<'a> GapSearch<'a> {
    fn new(vals: &'a [Vec<f64>], m: usize, gamma: f64, max_nodes: u64) -> Self {
        GapSearch {
            vals,
            m,
            gamma2: 2.0 * gamma,
            lo: vec![f64::INFINITY; m],
            hi: vec![f64::NEG_INFINITY; m],
            assign: Vec::with_capacity(1 << m),
            nodes: 0,
            max_nodes,
            exceeded: false,
        }
    }

    fn feasible(&self, mask: u32, row: usize) -> bool {
        for j in 0..self.m {
            let v = self.vals[row][j];
            if mask >> j & 1 == 1 {
                if self.lo[j].min(v) < self.hi[j] + self.gamma2 {
                    return false;
                }
            } else if self.hi[j].max(v) > self.lo[j] - self.gamma2 {
                return false;
            }
        }
        true
    }

    // How much assigning `row` to `mask` tightens future options: the sum of
    // the resulting per-column constraint levels. Lower is better.
    fn damage(&self, mask: u32, row: usize) -> f64 {
        let mut score = 0.0;
        for j in 0..self.m {
            let v = self.vals[row][j];
            if mask >> j & 1 == 1 {
                score -= self.lo[j].min(v);
            } else {
                score += self.hi[j].max(v);
            }
        }
        score
    }

    fn dfs(&mut self, patterns: &[u32], idx: usize) -> bool {
        if idx == patterns.len() {
            return true;
        }
        let mask = patterns[idx];
        let mut cand: Vec<(f64, usize)> = (0..self.vals.len())
            .filter(|&r| self.feasible(mask, r))
            .map(|r| (self.damage(mask, r), r))
            .collect();
        cand.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
        for (_, row) in cand {
            self.nodes += 1;
            if self.nodes > self.max_nodes {
                self.exceeded = true;
                return false;
            }
            let mut saved_lo = Vec::with_capacity(self.m);
            let mut saved_hi = Vec::with_capacity(self.m);
            for j in 0..self.m {
                saved_lo.push(self.lo[j]);
                saved_hi.push(self.hi[j]);
                let v = self.vals[row][j];
                if mask >> j & 1 == 1 {
                    self.lo[j] = self.lo[j].min(v);
                } else {
                    self.hi[j] = self.hi[j].max(v);
                }
            }
            self.assign.push(row);
            if self.dfs(patterns, idx + 1) {
                return true;
            }
            self.assign.pop();
            self.lo = saved_lo;
            self.hi = saved_hi;
            if self.exceeded {
                return false;
            }
        }
        false
    }
}

/// Decides whether `subset` is shattered at scale `gamma`, returning a
/// certificate on success.
pub fn shatter_decision(
    class: &SampledClass,
    subset: &[usize],
    gamma: f64,
    mode: ShatterMode,
) -> Result<Option<ShatterCertificate>> {
    let mut nodes = 0u64;
    shatter_decision_budgeted(class, subset, gamma, mode, &mut nodes, u64::MAX)
        .map(|(cert, _)| cert)
}

/// Same as [`shatter_decision`], charging work against a shared node
/// counter. The boolean reports whether the cap was hit (in which case the
/// absent certificate is inconclusive).
fn shatter_decision_budgeted(
    class: &SampledClass,
    subset: &[usize],
    gamma: f64,
    mode: ShatterMode,
    nodes: &mut u64,
    max_nodes: u64,
) -> Result<(Option<ShatterCertificate>, bool)> {
    check_subset(subset, class.n_points())?;
    if subset.len() > MAX_SUBSET_HARD_CAP {
        return Err(Error::InvalidSubset(format!(
            "subset of size {} exceeds the hard cap of {MAX_SUBSET_HARD_CAP}",
            subset.len()
        )));
    }
    if !(gamma > 0.0) {
        return Err(Error::InvalidParam(format!(
            "scale must be positive, got {gamma}"
        )));
    }
    let m = subset.len();
    let vals: Vec<Vec<f64>> = class
        .values
        .iter()
        .map(|row| subset.iter().map(|&x| row[x]).collect())
        .collect();

    match mode {
        ShatterMode::Zero => {
            let mut witnesses = BTreeMap::new();
            for mask in 0..(1u32 << m) {
                *nodes += 1;
                if *nodes > max_nodes {
                    return Ok((None, true));
                }
                let found = vals
                    .iter()
                    .position(|row| (0..m).all(|j| pattern_sign(mask, j) * row[j] >= gamma));
                match found {
                    Some(row) => {
                        witnesses.insert(pattern_string(mask, m), row);
                    }
                    None => return Ok((None, false)),
                }
            }
            Ok((
                Some(ShatterCertificate {
                    subset: subset.to_vec(),
                    shift: vec![0.0; m],
                    witnesses,
                    gamma,
                }),
                false,
            ))
        }
        ShatterMode::Shifted => {
            let remaining = max_nodes.saturating_sub(*nodes);
            let mut search = GapSearch::new(&vals, m, gamma, remaining);
            // Gray-code pattern order: consecutive patterns differ in one
            // coordinate, which keeps the interval pruning local.
            let patterns: Vec<u32> = (0..(1u32 << m)).map(|i| i ^ (i >> 1)).collect();
            let found = search.dfs(&patterns, 0);
            *nodes += search.nodes;
            if search.exceeded {
                return Ok((None, true));
            }
            if !found {
                return Ok((None, false));
            }
            let shift: Vec<f64> = (0..m)
                .map(|j| (search.lo[j] + search.hi[j]) / 2.0)
                .collect();
            let witnesses = patterns
                .iter()
                .zip(&search.assign)
                .map(|(&mask, &row)| (pattern_string(mask, m), row))
                .collect();
            Ok((
                Some(ShatterCertificate {
                    subset: subset.to_vec(),
                    shift,
                    witnesses,
                    gamma,
                }),
                false,
            ))
        }
    }
}

fn column_candidates(class: &SampledClass, gamma: f64, mode: ShatterMode) -> Vec<usize> {
    (0..class.n_points())
        .filter(|&x| {
            let max = class.column(x).fold(f64::NEG_INFINITY, f64::max);
            let min = class.column(x).fold(f64::INFINITY, f64::min);
            match mode {
                // A shattered singleton needs two values 2*gamma apart.
                ShatterMode::Shifted => max - min >= 2.0 * gamma,
                ShatterMode::Zero => max >= gamma && min <= -gamma,
            }
        })
        .collect()
}

fn dim_search(
    class: &SampledClass,
    gamma: f64,
    mode: ShatterMode,
    budget: &SearchBudget,
) -> Result<DimResult> {
    if !(gamma > 0.0) {
        return Err(Error::InvalidParam(format!(
            "scale must be positive, got {gamma}"
        )));
    }
    let candidates = column_candidates(class, gamma, mode);
    let mut stats = SearchStats {
        pruned_columns: class.n_points() - candidates.len(),
        ..SearchStats::default()
    };
    let m_hi = candidates
        .len()
        .min(budget.max_subset)
        .min(MAX_SUBSET_HARD_CAP);
    let truncated = candidates.len() > m_hi;
    let mut nodes = 0u64;
    for m in (1..=m_hi).rev() {
        for subset in candidates.iter().copied().combinations(m) {
            stats.subsets_examined += 1;
            let (cert, exceeded) = shatter_decision_budgeted(
                class,
                &subset,
                gamma,
                mode,
                &mut nodes,
                budget.max_nodes,
            )?;
            if let Some(cert) = cert {
                stats.nodes = nodes;
                return Ok(DimResult {
                    dimension: m,
                    certificate: Some(cert),
                    exact: !truncated,
                    stats,
                });
            }
            if exceeded {
                // Salvage a certified lower bound with a fresh small
                // allowance: grow a shattered set greedily.
                let (dim, cert) = greedy_lower_bound(class, gamma, mode, &candidates)?;
                stats.nodes = nodes;
                return Ok(DimResult {
                    dimension: dim,
                    certificate: cert,
                    exact: false,
                    stats,
                });
            }
        }
    }
    stats.nodes = nodes;
    Ok(DimResult {
        dimension: 0,
        certificate: None,
        exact: !truncated,
        stats,
    })
}

fn greedy_lower_bound(
    class: &SampledClass,
    gamma: f64,
    mode: ShatterMode,
    candidates: &[usize],
) -> Result<(usize, Option<ShatterCertificate>)> {
    let mut current: Vec<usize> = Vec::new();
    let mut best: Option<ShatterCertificate> = None;
    for &c in candidates {
        let mut trial = current.clone();
        trial.push(c);
        let mut nodes = 0u64;
        if let (Some(cert), false) =
            shatter_decision_budgeted(class, &trial, gamma, mode, &mut nodes, 100_000)?
        {
            current = trial;
            best = Some(cert);
        }
    }
    Ok((current.len(), best))
}

/// Largest set shattered at scale `gamma` with a free shift vector.
pub fn fat_dim(class: &SampledClass, gamma: f64) -> Result<DimResult> {
    fat_dim_with_budget(class, gamma, &SearchBudget::default())
}

pub fn fat_dim_with_budget(
    class: &SampledClass,
    gamma: f64,
    budget: &SearchBudget,
) -> Result<DimResult> {
    dim_search(class, gamma, ShatterMode::Shifted, budget)
}

/// Largest set shattered at scale `gamma` with the shift pinned to zero.
pub fn faat_dim(class: &SampledClass, gamma: f64) -> Result<DimResult> {
    faat_dim_with_budget(class, gamma, &SearchBudget::default())
}

pub fn faat_dim_with_budget(
    class: &SampledClass,
    gamma: f64,
    budget: &SearchBudget,
) -> Result<DimResult> {
    dim_search(class, gamma, ShatterMode::Zero, budget)
}

/// VC dimension of a partial class: the largest subset whose star-free
/// projections contain every binary pattern. Works unchanged on total
/// classes.
pub fn vc_dim_partial(class: &PartialClass) -> Result<DimResult> {
    vc_dim_partial_with_budget(class, &SearchBudget::default())
}

pub fn vc_dim_partial_with_budget(
    class: &PartialClass,
    budget: &SearchBudget,
) -> Result<DimResult> {
    let candidates: Vec<usize> = (0..class.n_points())
        .filter(|&x| {
            let mut has0 = false;
            let mut has1 = false;
            for row in &class.values {
                match row[x] {
                    Label::Zero => has0 = true,
                    Label::One => has1 = true,
                    Label::Star => {}
                }
            }
            has0 && has1
        })
        .collect();
    let mut stats = SearchStats {
        pruned_columns: class.n_points() - candidates.len(),
        ..SearchStats::default()
    };
    let m_hi = candidates
        .len()
        .min(budget.max_subset)
        .min(MAX_SUBSET_HARD_CAP);
    let truncated = candidates.len() > m_hi;
    let mut nodes = 0u64;
    for m in (1..=m_hi).rev() {
        for subset in candidates.iter().copied().combinations(m) {
            stats.subsets_examined += 1;
            nodes += 1u64 << m;
            if nodes > budget.max_nodes {
                stats.nodes = nodes;
                return Ok(DimResult {
                    dimension: 0,
                    certificate: None,
                    exact: false,
                    stats,
                });
            }
            if vc_shatters(class, &subset) {
                stats.nodes = nodes;
                return Ok(DimResult {
                    dimension: m,
                    certificate: None,
                    exact: !truncated,
                    stats,
                });
            }
        }
    }
    stats.nodes = nodes;
    Ok(DimResult {
        dimension: 0,
        certificate: None,
        exact: !truncated,
        stats,
    })
}

pub fn vc_shatters(class: &PartialClass, subset: &[usize]) -> bool {
    let m = subset.len();
    debug_assert!(m <= MAX_SUBSET_HARD_CAP);
    let mut seen = vec![false; 1usize << m];
    let mut count = 0usize;
    for row in &class.values {
        let mut mask = 0usize;
        let mut total = true;
        for (j, &x) in subset.iter().enumerate() {
            match row[x] {
                Label::One => mask |= 1 << j,
                Label::Zero => {}
                Label::Star => {
                    total = false;
                    break;
                }
            }
        }
        if total && !seen[mask] {
            seen[mask] = true;
            count += 1;
            if count == 1 << m {
                return true;
            }
        }
    }
    false
}

/// Midpoint-grid shift candidates for one column: midpoints of value pairs
/// that leave room for a witness on each side of the margin band.
fn shift_grid(col: &[f64], gamma: f64) -> Vec<f64> {
    let mut vals: Vec<f64> = col.to_vec();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    vals.dedup();
    let mut grid = Vec::new();
    for (a, &va) in vals.iter().enumerate() {
        for &vb in &vals[a..] {
            let r = (va + vb) / 2.0;
            let up = vals.iter().any(|&v| v >= r + gamma);
            let down = vals.iter().any(|&v| v <= r - gamma);
            if up && down {
                grid.push(r);
            }
        }
    }
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid.dedup();
    grid
}

/// Definition-level shattering oracle for one subset: enumerate shift
/// vectors from the per-column midpoint grid and check every pattern for a
/// witness directly.
pub fn shatter_by_shift_scan(
    class: &SampledClass,
    subset: &[usize],
    gamma: f64,
) -> Result<Option<ShatterCertificate>> {
    let mut nodes = 0u64;
    shift_scan_budgeted(class, subset, gamma, &mut nodes, u64::MAX).map(|(c, _)| c)
}

fn shift_scan_budgeted(
    class: &SampledClass,
    subset: &[usize],
    gamma: f64,
    nodes: &mut u64,
    max_nodes: u64,
) -> Result<(Option<ShatterCertificate>, bool)> {
    check_subset(subset, class.n_points())?;
    if subset.len() > MAX_SUBSET_HARD_CAP {
        return Err(Error::InvalidSubset(format!(
            "subset of size {} exceeds the hard cap of {MAX_SUBSET_HARD_CAP}",
            subset.len()
        )));
    }
    if !(gamma > 0.0) {
        return Err(Error::InvalidParam(format!(
            "scale must be positive, got {gamma}"
        )));
    }
    let m = subset.len();
    let vals: Vec<Vec<f64>> = class
        .values
        .iter()
        .map(|row| subset.iter().map(|&x| row[x]).collect())
        .collect();
    let grids: Vec<Vec<f64>> = (0..m)
        .map(|j| shift_grid(&vals.iter().map(|r| r[j]).collect::<Vec<_>>(), gamma))
        .collect();
    if grids.iter().any(|g| g.is_empty()) {
        return Ok((None, false));
    }

    let mut shift = vec![0.0f64; m];
    let mut stack = vec![0usize];
    // Depth-first product enumeration of the shift grid.
    while let Some(&top) = stack.last() {
        let depth = stack.len() - 1;
        if top >= grids[depth].len() {
            stack.pop();
            if let Some(last) = stack.last_mut() {
                *last += 1;
            } else {
                break;
            }
            continue;
        }
        shift[depth] = grids[depth][top];
        if depth + 1 < m {
            stack.push(0);
            continue;
        }
        *nodes += 1;
        if *nodes > max_nodes {
            return Ok((None, true));
        }
        if let Some(witnesses) = witnesses_for_shift(&vals, &shift, gamma, m) {
            return Ok((
                Some(ShatterCertificate {
                    subset: subset.to_vec(),
                    shift,
                    witnesses,
                    gamma,
                }),
                false,
            ));
        }
        *stack.last_mut().unwrap() += 1;
    }
    Ok((None, false))
}

fn witnesses_for_shift(
    vals: &[Vec<f64>],
    shift: &[f64],
    gamma: f64,
    m: usize,
) -> Option<BTreeMap<String, usize>> {
    let mut witnesses = BTreeMap::new();
    for mask in 0..(1u32 << m) {
        let row = vals
            .iter()
            .position(|r| (0..m).all(|j| pattern_sign(mask, j) * (r[j] - shift[j]) >= gamma))?;
        witnesses.insert(pattern_string(mask, m), row);
    }
    Some(witnesses)
}

/// Independent oracle for [`fat_dim`]: maximizes the zero-shift dimension of
/// the shifted class over shift vectors drawn from the per-column midpoint
/// grid.
pub fn fat_via_shift_scan(class: &SampledClass, gamma: f64) -> Result<DimResult> {
    fat_via_shift_scan_with_budget(class, gamma, &SearchBudget::default())
}

pub fn fat_via_shift_scan_with_budget(
    class: &SampledClass,
    gamma: f64,
    budget: &SearchBudget,
) -> Result<DimResult> {
    if !(gamma > 0.0) {
        return Err(Error::InvalidParam(format!(
            "scale must be positive, got {gamma}"
        )));
    }
    let candidates = column_candidates(class, gamma, ShatterMode::Shifted);
    let mut stats = SearchStats {
        pruned_columns: class.n_points() - candidates.len(),
        ..SearchStats::default()
    };
    let m_hi = candidates
        .len()
        .min(budget.max_subset)
        .min(MAX_SUBSET_HARD_CAP);
    let truncated = candidates.len() > m_hi;
    let mut nodes = 0u64;
    for m in (1..=m_hi).rev() {
        for subset in candidates.iter().copied().combinations(m) {
            stats.subsets_examined += 1;
            let (cert, exceeded) =
                shift_scan_budgeted(class, &subset, gamma, &mut nodes, budget.max_nodes)?;
            stats.nodes = nodes;
            if let Some(cert) = cert {
                return Ok(DimResult {
                    dimension: m,
                    certificate: Some(cert),
                    exact: !truncated,
                    stats,
                });
            }
            if exceeded {
                return Ok(DimResult {
                    dimension: 0,
                    certificate: None,
                    exact: false,
                    stats,
                });
            }
        }
    }
    stats.nodes = nodes;
    Ok(DimResult {
        dimension: 0,
        certificate: None,
        exact: !truncated,
        stats,
    })
}

/// Output of [`zero_shift_certificate`]: the half-difference functions, a
/// zero-shift certificate over them, and a flag per constructed row telling
/// whether it already appears as a row of the input class.
#[derive(Debug, Clone)]
pub struct ZeroShiftResult {
    pub functions: SampledClass,
    pub certificate: ShatterCertificate,
    pub membership: Vec<bool>,
}

/// Converts a validated shifted certificate into a zero-shift one over the
/// constructed class of half-differences `(f_y - f_{-y}) / 2`.
pub fn zero_shift_certificate(
    class: &SampledClass,
    cert: &ShatterCertificate,
) -> Result<ZeroShiftResult> {
    if !check_certificate(class, cert, ShatterMode::Shifted)? {
        return Err(Error::InvalidCertificate(
            "input certificate does not validate in shifted mode".into(),
        ));
    }
    let m = cert.subset.len();
    let all = (1u32 << m) - 1;
    let mut functions = Vec::with_capacity(1 << m);
    let mut witnesses = BTreeMap::new();
    for mask in 0..(1u32 << m) {
        let plus = cert.witnesses[&pattern_string(mask, m)];
        let minus = cert.witnesses[&pattern_string(mask ^ all, m)];
        let row: Vec<f64> = class.values[plus]
            .iter()
            .zip(&class.values[minus])
            .map(|(a, b)| (a - b) / 2.0)
            .collect();
        witnesses.insert(pattern_string(mask, m), mask as usize);
        functions.push(row);
    }
    let membership = functions
        .iter()
        .map(|g| class.values.iter().any(|row| row == g))
        .collect();
    let constructed = SampledClass::new(class.domain.clone(), functions)?;
    let cert0 = ShatterCertificate {
        subset: cert.subset.clone(),
        shift: vec![0.0; m],
        witnesses,
        gamma: cert.gamma,
    };
    if !check_certificate(&constructed, &cert0, ShatterMode::Zero)? {
        return Err(Error::InvalidCertificate(
            "constructed zero-shift certificate failed to validate".into(),
        ));
    }
    Ok(ZeroShiftResult {
        functions: constructed,
        certificate: cert0,
        membership,
    })
}
