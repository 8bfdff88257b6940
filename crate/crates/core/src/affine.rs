//! Affine-class generators and shattering witnesses on the unit ball.
//!
//! The separability oracle decides strict linear separation exactly: it
//! maximizes the margin with a capped objective over rational arithmetic
//! (Bland pivoting, so the run is deterministic and cycle-free) and reports
//! separable iff the optimum is positive.

use std::collections::HashMap;

use num::{BigRational, FromPrimitive, Signed, ToPrimitive, Zero};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::class::{ClassMeta, SampledClass};
use crate::dims::{pattern_string, ShatterCertificate};
use crate::error::{Error, Result};
use crate::generate::rng_from_seed;

/// Sampler parameters for affine classes `x -> w . x + b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineSpec {
    pub dim: usize,
    /// Weight bound: `|w| <= radius`, and `|b| <= radius` unless
    /// semi-bounded.
    pub radius: f64,
    /// Semi-bounded classes leave the intercept free; sampling clamps it to
    /// `|b| <= 2 radius`, which loses no shattering power on the unit ball.
    pub semi_bounded: bool,
    pub samples: usize,
    pub seed: u64,
}

impl AffineSpec {
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::InvalidParam("dimension must be >= 1".into()));
        }
        if !(self.radius > 0.0) {
            return Err(Error::InvalidParam("radius must be positive".into()));
        }
        if self.samples == 0 {
            return Err(Error::InvalidParam("need at least one sample".into()));
        }
        Ok(())
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Uniform sample of the specified affine set, evaluated on the given
/// points. Provenance keeps the `(w, b)` pairs.
pub fn sample_affine_class(spec: &AffineSpec, points: &[Vec<f64>]) -> Result<SampledClass> {
    spec.validate()?;
    if points.is_empty() {
        return Err(Error::InvalidParam("no evaluation points".into()));
    }
    for (i, p) in points.iter().enumerate() {
        if p.len() != spec.dim {
            return Err(Error::DomainMismatch(format!(
                "point {i} has dimension {}, expected {}",
                p.len(),
                spec.dim
            )));
        }
        if norm(p) > 1.0 + 1e-9 {
            return Err(Error::Precondition(format!(
                "point {i} lies outside the unit ball"
            )));
        }
    }
    let mut rng = rng_from_seed(spec.seed);
    let b_range = if spec.semi_bounded {
        2.0 * spec.radius
    } else {
        spec.radius
    };
    let mut params = Vec::with_capacity(spec.samples);
    let mut values = Vec::with_capacity(spec.samples);
    for _ in 0..spec.samples {
        // Uniform in the radius-ball: normal direction, radial correction.
        let dir: Vec<f64> = (0..spec.dim)
            .map(|_| StandardNormal.sample(&mut rng))
            .collect();
        let len = norm(&dir).max(1e-300);
        let u: f64 = rng.gen_range(0.0f64..1.0);
        let scale = spec.radius * u.powf(1.0 / spec.dim as f64) / len;
        let w: Vec<f64> = dir.iter().map(|v| v * scale).collect();
        let b: f64 = rng.gen_range(-b_range..=b_range);
        values.push(points.iter().map(|x| dot(&w, x) + b).collect());
        params.push((w, b));
    }
    let domain = (0..points.len()).map(|i| format!("x{i}")).collect();
    Ok(SampledClass::new(domain, values)?.with_metadata(ClassMeta {
        generator: Some(if spec.semi_bounded {
            "affine_semi_bounded".into()
        } else {
            "affine_bounded".into()
        }),
        seed: Some(spec.seed),
        affine_params: Some(params),
        ..ClassMeta::default()
    }))
}

/// Replaces an oversized intercept by `sign(b) * 2 radius`. For `|w| <=
/// radius` and points in the unit ball this preserves every sign and keeps
/// all margins at least `radius`, so shattering instances are unaffected.
pub fn clamp_intercept(w: &[f64], b: f64, radius: f64) -> (Vec<f64>, f64) {
    if b.abs() <= 2.0 * radius {
        (w.to_vec(), b)
    } else {
        (w.to_vec(), b.signum() * 2.0 * radius)
    }
}

/// `d+1` points and `2^(d+1)` affine functions zero-shift shattering them at
/// scale `gamma`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimplexWitness {
    pub points: Vec<Vec<f64>>,
    pub class: SampledClass,
    pub certificate: ShatterCertificate,
    /// `(w, b)` realizing each pattern row.
    pub params: Vec<(Vec<f64>, f64)>,
}

/// Solves a small dense linear system by Gaussian elimination with partial
/// pivoting.
fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot =
            (col..n).max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())?;
        if a[pivot][col] == 0.0 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in 0..n {
            if row != col && a[row][col] != 0.0 {
                let factor = a[row][col] / a[col][col];
                for k in col..n {
                    a[row][k] -= factor * a[col][k];
                }
                b[row] -= factor * b[col];
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

/// Emits the origin and the standard basis as points, and for every sign
/// pattern the affine interpolant through `gamma * y_i` — a zero-shift
/// shattering witness of size `d + 1`.
pub fn simplex_shatter_witness(d: usize, gamma: f64) -> Result<SimplexWitness> {
    if d == 0 || d > 16 {
        return Err(Error::InvalidParam(format!("dimension {d} out of range")));
    }
    if !(gamma > 0.0) {
        return Err(Error::InvalidParam("scale must be positive".into()));
    }
    let mut points = vec![vec![0.0; d]];
    for i in 0..d {
        let mut e = vec![0.0; d];
        e[i] = 1.0;
        points.push(e);
    }
    let m = d + 1;
    let mut values = Vec::with_capacity(1 << m);
    let mut params = Vec::with_capacity(1 << m);
    let mut witnesses = std::collections::BTreeMap::new();
    for mask in 0..(1u32 << m) {
        let y: Vec<f64> = (0..m)
            .map(|j| if mask >> j & 1 == 1 { 1.0 } else { -1.0 })
            .collect();
        // Interpolation system [x_i | 1] (w, b) = gamma y_i.
        let a: Vec<Vec<f64>> = points
            .iter()
            .map(|x| x.iter().copied().chain(std::iter::once(1.0)).collect())
            .collect();
        let rhs: Vec<f64> = y.iter().map(|&yi| gamma * yi).collect();
        let mut wb = solve_linear(a, rhs)
            .ok_or_else(|| Error::InvalidParam("degenerate point configuration".into()))?;
        let b = wb.pop().expect("system has d+1 unknowns");
        values.push(points.iter().map(|x| dot(&wb, x) + b).collect());
        params.push((wb, b));
        witnesses.insert(pattern_string(mask, m), mask as usize);
    }
    let class = SampledClass::from_rows(values)?;
    let certificate = ShatterCertificate {
        subset: (0..m).collect(),
        shift: vec![0.0; m],
        witnesses,
        gamma,
    };
    Ok(SimplexWitness {
        points,
        class,
        certificate,
        params,
    })
}

type Rat = BigRational;

fn rat(x: f64) -> Rat {
    BigRational::from_f64(x).expect("finite value")
}

// Dense-tableau simplex, exact rationals, Bland's rule.
struct Simplex {
    tab: Vec<Vec<Rat>>, // each row: n_vars coefficients then the rhs
    basis: Vec<usize>,
    obj: Vec<Rat>,
    n_vars: usize,
}

impl Simplex {
    fn reduced_cost(&self, j: usize) -> Rat {
        let mut r = self.obj[j].clone();
        for (i, &bv) in self.basis.iter().enumerate() {
            if !self.obj[bv].is_zero() {
                r -= self.obj[bv].clone() * self.tab[i][j].clone();
            }
        }
        r
    }

    fn solve(&mut self) -> Result<()> {
        loop {
            let entering = (0..self.n_vars)
                .find(|&j| !self.basis.contains(&j) && self.reduced_cost(j).is_positive());
            let Some(col) = entering else {
                return Ok(());
            };
            let mut pivot: Option<(usize, Rat)> = None;
            for i in 0..self.tab.len() {
                if self.tab[i][col].is_positive() {
                    let ratio = self.tab[i][self.n_vars].clone() / self.tab[i][col].clone();
                    let better = match &pivot {
                        None => true,
                        Some((pi, pr)) => {
                            ratio < *pr || (ratio == *pr && self.basis[i] < self.basis[*pi])
                        }
                    };
                    if better {
                        pivot = Some((i, ratio));
                    }
                }
            }
            let Some((row, _)) = pivot else {
                return Err(Error::InvalidParam(
                    "margin program is unbounded; the instance is malformed".into(),
                ));
            };
            self.pivot(row, col);
        }
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let div = self.tab[row][col].clone();
        for v in self.tab[row].iter_mut() {
            *v /= div.clone();
        }
        for i in 0..self.tab.len() {
            if i != row && !self.tab[i][col].is_zero() {
                let factor = self.tab[i][col].clone();
                for j in 0..=self.n_vars {
                    let delta = factor.clone() * self.tab[row][j].clone();
                    self.tab[i][j] -= delta;
                }
            }
        }
        self.basis[row] = col;
    }

    fn value(&self, var: usize) -> Rat {
        match self.basis.iter().position(|&b| b == var) {
            Some(row) => self.tab[row][self.n_vars].clone(),
            None => Rat::zero(),
        }
    }
}

/// Maximum strict margin separator, if one exists: maximizes `t <= 1`
/// subject to `y_i (w . x_i + b) >= t` with `w, b` free. Separable
/// instances reach `t = 1` (the weights are unconstrained), inseparable
/// ones stop at `t = 0`.
pub fn separating_affine(
    points: &[Vec<f64>],
    labels: &[i8],
) -> Result<Option<(Vec<f64>, f64, f64)>> {
    if points.is_empty() {
        return Err(Error::InvalidParam("no points".into()));
    }
    let d = points[0].len();
    if points.iter().any(|p| p.len() != d) {
        return Err(Error::DomainMismatch("points of mixed dimension".into()));
    }
    if labels.len() != points.len() || labels.iter().any(|&y| y != 1 && y != -1) {
        return Err(Error::InvalidParam(
            "labels must be +-1, one per point".into(),
        ));
    }
    let m = points.len();
    // Variable layout: w+ (d), w- (d), b+, b-, t+, t-, slack per point, cap
    // slack for t <= 1.
    let n_vars = 2 * d + 4 + m + 1;
    let (bp, bm, tp, tm) = (2 * d, 2 * d + 1, 2 * d + 2, 2 * d + 3);
    let s0 = 2 * d + 4;
    let u = s0 + m;

    let mut tab = Vec::with_capacity(m + 1);
    for (i, (x, &y)) in points.iter().zip(labels).enumerate() {
        // s_i = y_i (w . x_i + b) - t  >= 0, stored with s_i basic.
        let mut row = vec![Rat::zero(); n_vars + 1];
        let ys = Rat::from_i8(y).unwrap();
        for j in 0..d {
            let c = ys.clone() * rat(x[j]);
            row[j] = -c.clone();
            row[d + j] = c;
        }
        row[bp] = -ys.clone();
        row[bm] = ys;
        row[tp] = Rat::from_i8(1).unwrap();
        row[tm] = Rat::from_i8(-1).unwrap();
        row[s0 + i] = Rat::from_i8(1).unwrap();
        tab.push(row);
    }
    let mut cap = vec![Rat::zero(); n_vars + 1];
    cap[tp] = Rat::from_i8(1).unwrap();
    cap[u] = Rat::from_i8(1).unwrap();
    cap[n_vars] = Rat::from_i8(1).unwrap();
    tab.push(cap);

    let mut obj = vec![Rat::zero(); n_vars];
    obj[tp] = Rat::from_i8(1).unwrap();
    obj[tm] = Rat::from_i8(-1).unwrap();

    let mut basis: Vec<usize> = (0..m).map(|i| s0 + i).collect();
    basis.push(u);

    let mut lp = Simplex {
        tab,
        basis,
        obj,
        n_vars,
    };
    lp.solve()?;

    let t = lp.value(tp) - lp.value(tm);
    if !t.is_positive() {
        return Ok(None);
    }
    let w: Vec<f64> = (0..d)
        .map(|j| (lp.value(j) - lp.value(d + j)).to_f64().unwrap())
        .collect();
    let b = (lp.value(bp) - lp.value(bm)).to_f64().unwrap();
    Ok(Some((w, b, t.to_f64().unwrap())))
}

/// True iff some affine function strictly separates the labeled points.
pub fn separability_oracle(points: &[Vec<f64>], labels: &[i8]) -> Result<bool> {
    Ok(separating_affine(points, labels)?.is_some())
}

fn partitions_into_at_most(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    // Restricted growth strings with at most k blocks.
    let mut current = vec![0usize; n];
    let mut done = n == 0;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let out = current.clone();
        // Advance to the next restricted growth string.
        let mut i = n;
        loop {
            if i == 0 {
                done = true;
                break;
            }
            i -= 1;
            let max_prefix = current[..i].iter().copied().max().map_or(0, |m| m + 1);
            if current[i] < max_prefix.min(k - 1) {
                current[i] += 1;
                for v in current[i + 1..].iter_mut() {
                    *v = 0;
                }
                break;
            }
        }
        Some(out)
    })
}

/// Decides whether a labeling is realizable as a union of at most `k`
/// halfspaces: the positives must split into at most `k` groups, each
/// strictly separable from every negative.
pub fn union_labeling_feasible(points: &[Vec<f64>], labels: &[bool], k: usize) -> Result<bool> {
    Ok(union_realization(points, labels, k)?.is_some())
}

/// A realization, when one exists: at most `k` affine functions, each
/// positive (margin >= the reported value) on its group and negative on all
/// negatives.
pub fn union_realization(
    points: &[Vec<f64>],
    labels: &[bool],
    k: usize,
) -> Result<Option<Vec<(Vec<f64>, f64)>>> {
    if k == 0 {
        return Err(Error::InvalidParam("need at least one halfspace".into()));
    }
    if labels.len() != points.len() {
        return Err(Error::InvalidParam("one label per point".into()));
    }
    let positives: Vec<usize> = (0..points.len()).filter(|&i| labels[i]).collect();
    let negatives: Vec<usize> = (0..points.len()).filter(|&i| !labels[i]).collect();
    if positives.is_empty() {
        // Union of empty halfspaces.
        return Ok(Some(vec![(vec![0.0; points[0].len()], -1.0)]));
    }

    // Separability of a positive block from all negatives depends only on
    // the block, so cache per block mask.
    let mut cache: HashMap<u64, Option<(Vec<f64>, f64)>> = HashMap::new();
    let mut try_block = |block: &[usize]| -> Result<Option<(Vec<f64>, f64)>> {
        let mask = block.iter().fold(0u64, |m, &i| m | 1 << i);
        if let Some(hit) = cache.get(&mask) {
            return Ok(hit.clone());
        }
        let mut pts: Vec<Vec<f64>> = block.iter().map(|&i| points[i].clone()).collect();
        let mut labs: Vec<i8> = vec![1; block.len()];
        for &i in &negatives {
            pts.push(points[i].clone());
            labs.push(-1);
        }
        let sep = separating_affine(&pts, &labs)?.map(|(w, b, _)| (w, b));
        cache.insert(mask, sep.clone());
        Ok(sep)
    };

    for assignment in partitions_into_at_most(positives.len(), k) {
        let n_blocks = assignment.iter().copied().max().unwrap() + 1;
        let mut halfspaces = Vec::with_capacity(n_blocks);
        let mut ok = true;
        for block_id in 0..n_blocks {
            let block: Vec<usize> = positives
                .iter()
                .enumerate()
                .filter(|(pos, _)| assignment[*pos] == block_id)
                .map(|(_, &i)| i)
                .collect();
            match try_block(&block)? {
                Some(h) => halfspaces.push(h),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            return Ok(Some(halfspaces));
        }
    }
    Ok(None)
}

/// Converts a VC-shattering witness for unions of `k` halfspaces into a
/// zero-shift scale-`gamma` certificate over the class of pointwise maxima:
/// per labeling, the realizing halfspace functions are scaled so that every
/// margin reaches `2 gamma`, leaving ample float slack above `gamma`.
pub fn union_witness_to_certificate(
    points: &[Vec<f64>],
    k: usize,
    gamma: f64,
) -> Result<(SampledClass, ShatterCertificate)> {
    let m = points.len();
    if m == 0 || m > 16 {
        return Err(Error::InvalidParam(format!(
            "witness size {m} out of range"
        )));
    }
    let mut values = Vec::with_capacity(1 << m);
    let mut witnesses = std::collections::BTreeMap::new();
    for mask in 0..(1u32 << m) {
        let labels: Vec<bool> = (0..m).map(|j| mask >> j & 1 == 1).collect();
        let halfspaces = union_realization(points, &labels, k)?.ok_or_else(|| {
            Error::Precondition(format!(
                "labeling {} is not realizable with {k} halfspaces",
                pattern_string(mask, m)
            ))
        })?;
        // Realizations from the margin program have margin 1 on both sides.
        let lambda = 2.0 * gamma;
        let row: Vec<f64> = points
            .iter()
            .map(|x| {
                halfspaces
                    .iter()
                    .map(|(w, b)| lambda * (dot(w, x) + b))
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .collect();
        values.push(row);
        witnesses.insert(pattern_string(mask, m), mask as usize);
    }
    let class = SampledClass::from_rows(values)?;
    let certificate = ShatterCertificate {
        subset: (0..m).collect(),
        shift: vec![0.0; m],
        witnesses,
        gamma,
    };
    if !crate::dims::check_certificate(&class, &certificate, crate::dims::ShatterMode::Zero)? {
        return Err(Error::InvalidCertificate(
            "scaled union witness failed to validate".into(),
        ));
    }
    Ok((class, certificate))
}

/// Search configuration for shattered sets realizable by unions of
/// halfspaces.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct UnionSearchConfig {
    pub d: usize,
    pub k: usize,
    pub m_max: usize,
    /// Cap on separability-oracle invocations.
    pub budget: u64,
    pub seed: u64,
    pub random_configs_per_size: usize,
}

impl UnionSearchConfig {
    pub fn new(d: usize, k: usize, m_max: usize) -> Self {
        UnionSearchConfig {
            d,
            k,
            m_max,
            budget: 500_000,
            seed: 0,
            random_configs_per_size: 20,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UnionSearchResult {
    pub best_points: Vec<Vec<f64>>,
    pub best_size: usize,
    pub budget_exhausted: bool,
    pub oracle_calls: u64,
    pub configs_tested: u64,
}

fn snap_to_grid(v: f64) -> f64 {
    (v * 8.0).round() / 8.0
}

/// Candidate point pools, structured first: spaced grids, snapped circles,
/// the moment curve, the simplex corners, then seeded random ball points.
fn point_pool(cfg: &UnionSearchConfig, m: usize) -> Vec<Vec<Vec<f64>>> {
    let d = cfg.d;
    let mut pool: Vec<Vec<Vec<f64>>> = Vec::new();
    if d == 1 {
        let spread: Vec<Vec<f64>> = (0..m)
            .map(|i| vec![snap_to_grid(-1.0 + 2.0 * i as f64 / (m.max(2) - 1) as f64)])
            .collect();
        pool.push(spread);
    } else {
        // Snapped circle in the first two coordinates.
        let circle: Vec<Vec<f64>> = (0..m)
            .map(|i| {
                let angle = 2.0 * std::f64::consts::PI * i as f64 / m as f64;
                let mut p = vec![0.0; d];
                p[0] = snap_to_grid(0.75 * angle.cos());
                p[1] = snap_to_grid(0.75 * angle.sin());
                p
            })
            .collect();
        pool.push(circle);
        // Moment curve (t, t^2, ...), snapped.
        let moment: Vec<Vec<f64>> = (0..m)
            .map(|i| {
                let t = -0.75 + 1.5 * i as f64 / (m.max(2) - 1) as f64;
                (0..d).map(|c| snap_to_grid(t.powi(c as i32 + 1))).collect()
            })
            .collect();
        pool.push(moment);
        // Simplex corners when they fit.
        if m <= d + 1 {
            let mut corners = vec![vec![0.0; d]];
            for i in 0..d {
                let mut e = vec![0.0; d];
                e[i] = 1.0;
                corners.push(e);
            }
            corners.truncate(m);
            pool.push(corners);
        }
    }
    let mut rng = rng_from_seed(cfg.seed.wrapping_add(m as u64));
    for _ in 0..cfg.random_configs_per_size {
        let mut config = Vec::with_capacity(m);
        while config.len() < m {
            let p = crate::generate::random_ball_point(&mut rng, d);
            if !config.contains(&p) {
                config.push(p);
            }
        }
        pool.push(config);
    }
    // Degenerate configurations (repeated points) can never be shattered.
    pool.retain(|config| {
        config
            .iter()
            .enumerate()
            .all(|(i, p)| config[i + 1..].iter().all(|q| q != p))
    });
    pool
}

/// Searches point configurations for the largest set on which every
/// labeling is a union of at most `k` halfspaces.
pub fn halfspace_union_shatter_search(cfg: &UnionSearchConfig) -> Result<UnionSearchResult> {
    if cfg.d == 0 || cfg.m_max == 0 || cfg.m_max > 10 {
        return Err(Error::InvalidParam(
            "dimension must be positive and the set size at most 10".into(),
        ));
    }
    let mut calls = 0u64;
    let mut configs_tested = 0u64;
    for m in (1..=cfg.m_max).rev() {
        for config in point_pool(cfg, m) {
            configs_tested += 1;
            let mut shattered = true;
            for mask in 0..(1u32 << m) {
                calls += 1u64 << cfg.k.min(4);
                if calls > cfg.budget {
                    return Ok(UnionSearchResult {
                        best_points: Vec::new(),
                        best_size: 0,
                        budget_exhausted: true,
                        oracle_calls: calls,
                        configs_tested,
                    });
                }
                let labels: Vec<bool> = (0..m).map(|j| mask >> j & 1 == 1).collect();
                if !union_labeling_feasible(&config, &labels, cfg.k)? {
                    shattered = false;
                    break;
                }
            }
            if shattered {
                return Ok(UnionSearchResult {
                    best_points: config,
                    best_size: m,
                    budget_exhausted: false,
                    oracle_calls: calls,
                    configs_tested,
                });
            }
        }
    }
    Ok(UnionSearchResult {
        best_points: Vec::new(),
        best_size: 0,
        budget_exhausted: false,
        oracle_calls: calls,
        configs_tested,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dims::{check_certificate, ShatterMode};

    #[test]
    fn sampled_bounded_class_respects_value_bound() {
        let spec = AffineSpec {
            dim: 2,
            radius: 1.5,
            semi_bounded: false,
            samples: 40,
            seed: 3,
        };
        let points = crate::generate::random_ball_points(&mut rng_from_seed(4), 2, 5);
        let class = sample_affine_class(&spec, &points).unwrap();
        for row in &class.values {
            for v in row {
                assert!(v.abs() <= 2.0 * spec.radius + 1e-9);
            }
        }
    }

    #[test]
    fn sampling_at_origin_reproduces_intercepts() {
        let spec = AffineSpec {
            dim: 3,
            radius: 1.0,
            semi_bounded: false,
            samples: 25,
            seed: 9,
        };
        let class = sample_affine_class(&spec, &[vec![0.0; 3]]).unwrap();
        let params = class.metadata.clone().unwrap().affine_params.unwrap();
        for (row, (_, b)) in class.values.iter().zip(&params) {
            assert_eq!(row[0], *b);
            assert!(b.abs() <= 1.0);
        }
    }

    #[test]
    fn point_outside_ball_rejected() {
        let spec = AffineSpec {
            dim: 2,
            radius: 1.0,
            semi_bounded: false,
            samples: 1,
            seed: 0,
        };
        assert!(matches!(
            sample_affine_class(&spec, &[vec![1.0, 1.0]]),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn intercept_clamp_preserves_margins() {
        let mut rng = rng_from_seed(21);
        let radius = 1.0;
        for _ in 0..200 {
            let d = 2;
            let x = crate::generate::random_ball_point(&mut rng, d);
            let w: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let w_norm = norm(&w);
            let w: Vec<f64> = w.iter().map(|v| v * radius / w_norm.max(1.0)).collect();
            let b = rng.gen_range(-10.0..10.0);
            let (wc, bc) = clamp_intercept(&w, b, radius);
            let before = dot(&w, &x) + b;
            let after = dot(&wc, &x) + bc;
            // Signs agree whenever the original margin was meaningful.
            if before.abs() >= radius {
                assert_eq!(before.signum(), after.signum());
                assert!(after.abs() >= radius - 1e-9);
            }
        }
    }

    #[test]
    fn simplex_witness_validates_for_small_dimensions() {
        for d in 1..=3 {
            for gamma in [0.5, 1.0, 2.0] {
                let w = simplex_shatter_witness(d, gamma).unwrap();
                assert_eq!(w.points.len(), d + 1);
                assert!(check_certificate(&w.class, &w.certificate, ShatterMode::Zero).unwrap());
                assert!(w.points.iter().all(|p| norm(p) <= 1.0));
            }
        }
    }

    #[test]
    fn scaled_simplex_witness_validates_at_scaled_gamma() {
        let w = simplex_shatter_witness(2, 1.0).unwrap();
        let scaled = crate::compose::scale_class(&w.class, 3.0);
        let cert = ShatterCertificate {
            gamma: 3.0,
            ..w.certificate.clone()
        };
        assert!(check_certificate(&scaled, &cert, ShatterMode::Zero).unwrap());
    }

    #[test]
    fn separability_examples() {
        // Two distinct points are always separable.
        let pts = vec![vec![0.0, 0.0], vec![0.5, 0.25]];
        for labels in [[1i8, -1], [-1, 1], [1, 1], [-1, -1]] {
            assert!(separability_oracle(&pts, &labels).unwrap());
        }
        // Alternating labels on a line are not.
        let line = vec![vec![-0.5, 0.0], vec![0.0, 0.0], vec![0.5, 0.0]];
        assert!(!separability_oracle(&line, &[1, -1, 1]).unwrap());
        assert!(separability_oracle(&line, &[1, -1, -1]).unwrap());
        // Opposite corners of a square are not.
        let xor = vec![
            vec![0.25, 0.25],
            vec![-0.25, -0.25],
            vec![0.25, -0.25],
            vec![-0.25, 0.25],
        ];
        assert!(!separability_oracle(&xor, &[1, 1, -1, -1]).unwrap());
        assert!(separability_oracle(&xor, &[1, -1, 1, -1]).unwrap());
    }

    #[test]
    fn separator_achieves_unit_margin() {
        let pts = vec![vec![-0.5], vec![0.5]];
        let (w, b, t) = separating_affine(&pts, &[-1, 1]).unwrap().unwrap();
        assert_eq!(t, 1.0);
        assert!(-(w[0] * -0.5 + b) >= 1.0 - 1e-9);
        assert!(w[0] * 0.5 + b >= 1.0 - 1e-9);
    }

    #[test]
    fn union_feasibility_on_a_line() {
        let pts = vec![vec![-0.5], vec![0.0], vec![0.5]];
        // Middle positive, flanks negative: impossible with two rays.
        assert!(!union_labeling_feasible(&pts, &[false, true, false], 2).unwrap());
        // Flanks positive: two rays work.
        assert!(union_labeling_feasible(&pts, &[true, false, true], 2).unwrap());
        // Any labeling of two points with one ray each side.
        assert!(union_labeling_feasible(&pts, &[true, true, true], 1).unwrap());
        assert!(union_labeling_feasible(&pts, &[false, false, false], 1).unwrap());
    }

    #[test]
    fn union_search_desk_values() {
        let mut cfg = UnionSearchConfig::new(1, 2, 3);
        cfg.random_configs_per_size = 5;
        let r = halfspace_union_shatter_search(&cfg).unwrap();
        assert_eq!(r.best_size, 2);
        assert!(!r.budget_exhausted);

        let mut cfg = UnionSearchConfig::new(2, 1, 4);
        cfg.random_configs_per_size = 5;
        let r = halfspace_union_shatter_search(&cfg).unwrap();
        assert_eq!(r.best_size, 3);
    }

    #[test]
    fn union_search_monotone_in_k() {
        let mut best = Vec::new();
        for k in 1..=2 {
            let mut cfg = UnionSearchConfig::new(1, k, 4);
            cfg.random_configs_per_size = 5;
            best.push(halfspace_union_shatter_search(&cfg).unwrap().best_size);
        }
        assert!(best[1] >= best[0]);
    }

    #[test]
    fn union_witness_converts_to_certificate() {
        let mut cfg = UnionSearchConfig::new(2, 1, 3);
        cfg.random_configs_per_size = 3;
        let r = halfspace_union_shatter_search(&cfg).unwrap();
        assert_eq!(r.best_size, 3);
        for gamma in [0.5, 1.0] {
            let (class, cert) = union_witness_to_certificate(&r.best_points, 1, gamma).unwrap();
            assert!(check_certificate(&class, &cert, ShatterMode::Zero).unwrap());
        }
    }

    #[test]
    fn budget_exhaustion_is_flagged() {
        let mut cfg = UnionSearchConfig::new(2, 2, 4);
        cfg.budget = 3;
        let r = halfspace_union_shatter_search(&cfg).unwrap();
        assert!(r.budget_exhausted);
    }

    #[test]
    fn sign_affine_class_never_shatters_d_plus_2() {
        for d in 1..=2usize {
            let spec = AffineSpec {
                dim: d,
                radius: 2.0,
                semi_bounded: false,
                samples: 30,
                seed: 17 + d as u64,
            };
            let points = crate::generate::random_ball_points(&mut rng_from_seed(31), d, 5);
            let class = sample_affine_class(&spec, &points).unwrap();
            let signs = crate::compose::sign_threshold_class(&class);
            let vc = crate::dims::vc_dim_partial(&signs).unwrap().dimension;
            assert!(vc <= d + 1);
        }
    }

    #[test]
    fn semi_bounded_fat_respects_weight_bound() {
        let d = 3;
        let radius = 1.0f64;
        let gamma = 1.0f64;
        let bound = (d as f64 + 1.0).min((3.0 * radius / gamma).powi(2));
        for seed in 0..5u64 {
            let spec = AffineSpec {
                dim: d,
                radius,
                semi_bounded: true,
                samples: 25,
                seed,
            };
            let points = crate::generate::random_ball_points(&mut rng_from_seed(seed + 100), d, 5);
            let class = sample_affine_class(&spec, &points).unwrap();
            let fat = crate::dims::fat_dim(&class, gamma).unwrap().dimension;
            assert!(
                (fat as f64) <= bound,
                "seed {seed}: fat {fat} above bound {bound}"
            );
        }
    }
}
