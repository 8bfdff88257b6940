//! L_p(mu) metrics on finite classes, exact and greedy covering numbers, the
//! max-composition product bound, and the constructive sparse-average net
//! for absolute convex hulls.
//!
//! Covers are proper: centers are rows of the class itself. The exact solver
//! treats minimal covering as a set-cover instance over the rows-within-t
//! relation and runs branch and bound seeded with the greedy upper bound.

use itertools::Itertools;
use rand::Rng;
use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::class::{Measure, SampledClass};
use crate::error::{Error, Result};
use crate::generate::rng_from_seed;

/// Norm index: a finite `p >= 1` or the essential supremum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PNorm {
    Finite(f64),
    Infinity,
}

impl PNorm {
    pub fn new(p: f64) -> Result<PNorm> {
        if p.is_infinite() && p > 0.0 {
            return Ok(PNorm::Infinity);
        }
        if !p.is_finite() || p < 1.0 {
            return Err(Error::InvalidParam(format!(
                "norm index must be >= 1 or infinite, got {p}"
            )));
        }
        Ok(PNorm::Finite(p))
    }
}

impl std::fmt::Display for PNorm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PNorm::Finite(p) => write!(f, "{p}"),
            PNorm::Infinity => write!(f, "inf"),
        }
    }
}

impl Serialize for PNorm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            PNorm::Finite(p) => s.serialize_f64(*p),
            PNorm::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for PNorm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        match &v {
            serde_json::Value::Number(n) => {
                let p = n
                    .as_f64()
                    .ok_or_else(|| de::Error::custom("bad norm index"))?;
                PNorm::new(p).map_err(de::Error::custom)
            }
            serde_json::Value::String(s) if s == "inf" => Ok(PNorm::Infinity),
            other => Err(de::Error::custom(format!("bad norm index {other}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSpec {
    pub p: PNorm,
    pub measure: Measure,
}

impl MetricSpec {
    pub fn uniform(p: PNorm, n_points: usize) -> MetricSpec {
        MetricSpec {
            p,
            measure: Measure::uniform(n_points),
        }
    }
}

/// Weighted `L_p` distance between two value rows; for `p = inf`, the
/// maximum over the support of the measure.
pub fn lp_distance(f: &[f64], g: &[f64], m: &MetricSpec) -> Result<f64> {
    if f.len() != g.len() || f.len() != m.measure.len() {
        return Err(Error::DomainMismatch(format!(
            "rows of length {} and {} under a measure on {} points",
            f.len(),
            g.len(),
            m.measure.len()
        )));
    }
    let d = match m.p {
        PNorm::Finite(p) => f
            .iter()
            .zip(g)
            .zip(&m.measure.weights)
            .map(|((a, b), w)| w * (a - b).abs().powf(p))
            .sum::<f64>()
            .powf(1.0 / p),
        PNorm::Infinity => f
            .iter()
            .zip(g)
            .zip(&m.measure.weights)
            .filter(|(_, &w)| w > 0.0)
            .map(|((a, b), _)| (a - b).abs())
            .fold(0.0, f64::max),
    };
    Ok(d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverMethod {
    Exact,
    Greedy,
}

/// A t-cover: member indices are rows of the covered class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverReport {
    pub radius: f64,
    pub p: PNorm,
    pub members: Vec<usize>,
    pub exact: bool,
    pub size: usize,
}

pub const DEFAULT_EXACT_COVER_CAP: usize = 20;

pub fn covering_number(
    class: &SampledClass,
    metric: &MetricSpec,
    t: f64,
    method: CoverMethod,
) -> Result<CoverReport> {
    covering_number_with_cap(class, metric, t, method, DEFAULT_EXACT_COVER_CAP)
}

pub fn covering_number_with_cap(
    class: &SampledClass,
    metric: &MetricSpec,
    t: f64,
    method: CoverMethod,
    exact_cap: usize,
) -> Result<CoverReport> {
    if !(t >= 0.0) {
        return Err(Error::InvalidParam(format!("radius must be >= 0, got {t}")));
    }
    if metric.measure.len() != class.n_points() {
        return Err(Error::DomainMismatch(
            "measure size differs from domain size".into(),
        ));
    }
    let n = class.n_functions();
    let members = match method {
        CoverMethod::Greedy => greedy_cover(class, metric, t)?,
        CoverMethod::Exact => {
            if n > exact_cap {
                return Err(Error::BudgetExceeded(format!(
                    "{n} rows exceeds the exact-cover cap of {exact_cap}"
                )));
            }
            exact_cover(class, metric, t)?
        }
    };
    Ok(CoverReport {
        radius: t,
        p: metric.p,
        size: members.len(),
        members,
        exact: method == CoverMethod::Exact,
    })
}

fn distance_matrix(class: &SampledClass, metric: &MetricSpec) -> Result<Vec<Vec<f64>>> {
    let n = class.n_functions();
    let mut dist = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = lp_distance(&class.values[i], &class.values[j], metric)?;
            dist[i][j] = d;
            dist[j][i] = d;
        }
    }
    Ok(dist)
}

/// Farthest-point-first heuristic: proper cover, size at least the minimum.
fn greedy_cover(class: &SampledClass, metric: &MetricSpec, t: f64) -> Result<Vec<usize>> {
    let n = class.n_functions();
    let mut nearest: Vec<f64> = (0..n)
        .map(|i| lp_distance(&class.values[i], &class.values[0], metric))
        .collect::<Result<_>>()?;
    let mut centers = vec![0usize];
    loop {
        let (far, d) =
            nearest
                .iter()
                .enumerate()
                .fold((0usize, f64::NEG_INFINITY), |(bi, bd), (i, &d)| {
                    if d > bd {
                        (i, d)
                    } else {
                        (bi, bd)
                    }
                });
        if d <= t {
            return Ok(centers);
        }
        centers.push(far);
        for i in 0..n {
            let d = lp_distance(&class.values[i], &class.values[far], metric)?;
            if d < nearest[i] {
                nearest[i] = d;
            }
        }
    }
}

/// Minimum set cover by branch and bound over the within-t relation.
fn exact_cover(class: &SampledClass, metric: &MetricSpec, t: f64) -> Result<Vec<usize>> {
    let n = class.n_functions();
    assert!(n <= 64, "exact cover uses 64-bit row masks");
    let dist = distance_matrix(class, metric)?;
    let covers: Vec<u64> = (0..n)
        .map(|c| {
            (0..n)
                .filter(|&i| dist[c][i] <= t)
                .fold(0u64, |m, i| m | 1 << i)
        })
        .collect();
    exact_set_cover(&covers, n)
}

fn exact_set_cover(covers: &[u64], n_rows: usize) -> Result<Vec<usize>> {
    let full: u64 = if n_rows == 64 {
        u64::MAX
    } else {
        (1u64 << n_rows) - 1
    };
    let reachable = covers.iter().fold(0u64, |m, &c| m | c);
    if reachable & full != full {
        return Err(Error::InvalidParam(
            "center pool cannot cover every row".into(),
        ));
    }
    // Greedy upper bound.
    let mut best: Vec<usize> = {
        let mut chosen = Vec::new();
        let mut covered = 0u64;
        while covered & full != full {
            let (c, _) = covers
                .iter()
                .enumerate()
                .map(|(c, &m)| (c, (m & full & !covered).count_ones()))
                .max_by_key(|&(c, gain)| (gain, usize::MAX - c))
                .unwrap();
            chosen.push(c);
            covered |= covers[c];
        }
        chosen
    };

    let max_gain = covers.iter().map(|m| m.count_ones()).max().unwrap_or(1) as usize;
    let mut chosen = Vec::new();
    branch(covers, n_rows, full, 0, &mut chosen, &mut best, max_gain);
    best.sort_unstable();
    Ok(best)
}

#[allow(clippy::too_many_arguments)]
fn branch(
    covers: &[u64],
    n_rows: usize,
    full: u64,
    covered: u64,
    chosen: &mut Vec<usize>,
    best: &mut Vec<usize>,
    max_gain: usize,
) {
    if covered & full == full {
        if chosen.len() < best.len() {
            *best = chosen.clone();
        }
        return;
    }
    let uncovered = (full & !covered).count_ones() as usize;
    let lower = uncovered.div_ceil(max_gain);
    if chosen.len() + lower >= best.len() {
        return;
    }
    // Branch on the uncovered row with the fewest candidate centers.
    let row = (0..n_rows)
        .filter(|&i| covered >> i & 1 == 0)
        .min_by_key(|&i| covers.iter().filter(|&&m| m >> i & 1 == 1).count())
        .unwrap();
    for c in 0..covers.len() {
        if covers[c] >> row & 1 == 1 {
            chosen.push(c);
            branch(
                covers,
                n_rows,
                full,
                covered | covers[c],
                chosen,
                best,
                max_gain,
            );
            chosen.pop();
        }
    }
}

/// Minimal cover with centers drawn from an explicit candidate pool instead
/// of the class rows. Off the default path: [`covering_number`] always
/// builds proper covers. Member indices refer to the pool.
pub fn covering_number_improper(
    class: &SampledClass,
    centers: &[Vec<f64>],
    metric: &MetricSpec,
    t: f64,
    exact_cap: usize,
) -> Result<CoverReport> {
    if !(t >= 0.0) {
        return Err(Error::InvalidParam(format!("radius must be >= 0, got {t}")));
    }
    let n = class.n_functions();
    if n > exact_cap || n > 64 {
        return Err(Error::BudgetExceeded(format!(
            "{n} rows exceeds the exact-cover cap of {exact_cap}"
        )));
    }
    let covers: Vec<u64> = centers
        .iter()
        .map(|c| {
            let mut mask = 0u64;
            for (i, row) in class.values.iter().enumerate() {
                if lp_distance(row, c, metric)? <= t {
                    mask |= 1 << i;
                }
            }
            Ok(mask)
        })
        .collect::<Result<_>>()?;
    let members = exact_set_cover(&covers, n)?;
    Ok(CoverReport {
        radius: t,
        p: metric.p,
        size: members.len(),
        members,
        exact: true,
    })
}

/// Greedy separated subset: rows pairwise more than `separation` apart.
/// Any t-cover with `separation > 2t` has at least this many members.
pub fn packing_lower_bound(
    class: &SampledClass,
    metric: &MetricSpec,
    separation: f64,
) -> Result<Vec<usize>> {
    let mut packing: Vec<usize> = Vec::new();
    for i in 0..class.n_functions() {
        let mut ok = true;
        for &j in &packing {
            if lp_distance(&class.values[i], &class.values[j], metric)? <= separation {
                ok = false;
                break;
            }
        }
        if ok {
            packing.push(i);
        }
    }
    Ok(packing)
}

/// Worst observed violations of the pointwise max-difference inequalities,
/// on random quadruples (power and sup forms, `p` in 1..=3) and random
/// k-tuples of rows (the induced norm inequalities).
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct MaxPairReport {
    pub quadruples: usize,
    pub tuples: usize,
    pub max_violation_power: f64,
    pub max_violation_sup: f64,
    pub max_violation_tuple_finite: f64,
    pub max_violation_tuple_sup: f64,
}

pub fn check_max_pair_inequalities(samples: usize, seed: u64) -> MaxPairReport {
    let mut rng = rng_from_seed(seed);
    let mut report = MaxPairReport {
        quadruples: samples,
        ..MaxPairReport::default()
    };
    for _ in 0..samples {
        let a: f64 = rng.gen_range(-5.0..5.0);
        let b: f64 = rng.gen_range(-5.0..5.0);
        let c: f64 = rng.gen_range(-5.0..5.0);
        let d: f64 = rng.gen_range(-5.0..5.0);
        let lhs = (a.max(b) - c.max(d)).abs();
        for p in [1.0, 2.0, 3.0] {
            let viol = lhs.powf(p) - ((a - c).abs().powf(p) + (b - d).abs().powf(p));
            report.max_violation_power = report.max_violation_power.max(viol);
        }
        let viol_inf = lhs - (a - c).abs().max((b - d).abs());
        report.max_violation_sup = report.max_violation_sup.max(viol_inf);
    }

    // k-tuple form: distance between two k-fold maxima of rows.
    let tuple_runs = (samples / 100).max(1);
    report.tuples = tuple_runs;
    let dim = 4;
    let metric2 = MetricSpec::uniform(PNorm::Finite(2.0), dim);
    let metric_inf = MetricSpec::uniform(PNorm::Infinity, dim);
    for _ in 0..tuple_runs {
        let k = rng.gen_range(2..=5usize);
        let fs: Vec<Vec<f64>> = (0..k)
            .map(|_| (0..dim).map(|_| rng.gen_range(-5.0..5.0)).collect())
            .collect();
        let gs: Vec<Vec<f64>> = (0..k)
            .map(|_| (0..dim).map(|_| rng.gen_range(-5.0..5.0)).collect())
            .collect();
        let max_f: Vec<f64> = (0..dim)
            .map(|x| fs.iter().map(|r| r[x]).fold(f64::NEG_INFINITY, f64::max))
            .collect();
        let max_g: Vec<f64> = (0..dim)
            .map(|x| gs.iter().map(|r| r[x]).fold(f64::NEG_INFINITY, f64::max))
            .collect();

        let lhs2 = lp_distance(&max_f, &max_g, &metric2).unwrap();
        let rhs2 = fs
            .iter()
            .zip(&gs)
            .map(|(f, g)| lp_distance(f, g, &metric2).unwrap().powi(2))
            .sum::<f64>()
            .sqrt();
        report.max_violation_tuple_finite = report.max_violation_tuple_finite.max(lhs2 - rhs2);

        let lhs_inf = lp_distance(&max_f, &max_g, &metric_inf).unwrap();
        let rhs_inf = fs
            .iter()
            .zip(&gs)
            .map(|(f, g)| lp_distance(f, g, &metric_inf).unwrap())
            .fold(0.0, f64::max);
        report.max_violation_tuple_sup = report.max_violation_tuple_sup.max(lhs_inf - rhs_inf);
    }
    report
}

/// Exact check of the product bound for one instance: the max class is
/// covered at radius `t` by at most the product of component covers at
/// radius `t / k^(1/p)` (radius `t` for the sup norm).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProductBoundReport {
    pub n_max: usize,
    pub n_components: Vec<usize>,
    pub rhs_product: u64,
    pub component_radius: f64,
    pub holds: bool,
}

pub fn verify_product_bound(
    classes: &[&SampledClass],
    metric: &MetricSpec,
    t: f64,
) -> Result<ProductBoundReport> {
    let k = classes.len();
    let spec = crate::compose::MaxSpec::default();
    let fmax = crate::compose::k_fold_max(classes, &spec)?.dedup_rows();
    let component_radius = match metric.p {
        PNorm::Finite(p) => t / (k as f64).powf(1.0 / p),
        PNorm::Infinity => t,
    };
    let n_max = covering_number_with_cap(&fmax, metric, t, CoverMethod::Exact, 64)?.size;
    let n_components: Vec<usize> = classes
        .iter()
        .map(|c| {
            covering_number_with_cap(c, metric, component_radius, CoverMethod::Exact, 64)
                .map(|r| r.size)
        })
        .collect::<Result<_>>()?;
    let rhs_product: u64 = n_components.iter().map(|&n| n as u64).product();
    Ok(ProductBoundReport {
        holds: (n_max as u64) <= rhs_product,
        n_max,
        n_components,
        rhs_product,
        component_radius,
    })
}

/// A net for the absolute convex hull of `r X`, built from all s-term signed
/// empirical averages.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MaureyNet {
    pub points: Vec<Vec<f64>>,
    /// Number of sampled terms per net point: `ceil(r^2 / t^2)`.
    pub terms: usize,
    pub size: usize,
}

pub const MAUREY_MAX_TERMS: usize = 4;
pub const MAUREY_MAX_GENERATORS: usize = 25;

/// Constructive t-net for `absconv(r X)` under the Euclidean norm: every
/// point of the hull is within `t` of some `(r/s) * sum of s signed
/// generators-or-zero`.
pub fn maurey_cover(x: &[Vec<f64>], r: f64, t: f64) -> Result<MaureyNet> {
    if x.is_empty() {
        return Err(Error::InvalidParam("no generators".into()));
    }
    if !(t > 0.0) || !(r > 0.0) {
        return Err(Error::InvalidParam(
            "radius and scale must be positive".into(),
        ));
    }
    let dim = x[0].len();
    if x.iter().any(|v| v.len() != dim) {
        return Err(Error::DomainMismatch(
            "generators have mixed dimensions".into(),
        ));
    }
    if x.len() > MAUREY_MAX_GENERATORS {
        return Err(Error::CapExceeded(format!(
            "{} generators exceeds the cap of {MAUREY_MAX_GENERATORS}",
            x.len()
        )));
    }
    let s = ((r * r) / (t * t)).ceil() as usize;
    let s = s.max(1);
    if s > MAUREY_MAX_TERMS {
        return Err(Error::CapExceeded(format!(
            "{s} terms per net point exceeds the cap of {MAUREY_MAX_TERMS}"
        )));
    }

    // Atom 0 is the origin; atoms 2i+1 and 2i+2 are +-x_i.
    let n_atoms = 2 * x.len() + 1;
    let atom = |idx: usize, coord: usize| -> f64 {
        if idx == 0 {
            0.0
        } else {
            let gen = (idx - 1) / 2;
            let sign = if idx % 2 == 1 { 1.0 } else { -1.0 };
            sign * x[gen][coord]
        }
    };

    let mut seen = std::collections::HashSet::new();
    let mut points = Vec::new();
    for multiset in (0..n_atoms).combinations_with_replacement(s) {
        let point: Vec<f64> = (0..dim)
            .map(|c| {
                let sum: f64 = multiset.iter().map(|&a| atom(a, c)).sum();
                r * sum / s as f64
            })
            .collect();
        let key: Vec<u64> = point.iter().map(|v| v.to_bits()).collect();
        if seen.insert(key) {
            points.push(point);
        }
    }
    Ok(MaureyNet {
        size: points.len(),
        terms: s,
        points,
    })
}

/// Size guarantee for the net: `(c + c m t^2 / r^2)^ceil(r^2/t^2)`.
pub fn maurey_size_bound(m: usize, r: f64, t: f64, c: f64) -> f64 {
    let s = ((r * r) / (t * t)).ceil().max(1.0);
    (c + c * m as f64 * t * t / (r * r)).powf(s)
}

pub fn euclidean_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Distance from a point to the nearest net member.
pub fn net_distance(net: &MaureyNet, target: &[f64]) -> f64 {
    net.points
        .iter()
        .map(|p| euclidean_distance(p, target))
        .fold(f64::INFINITY, f64::min)
}

/// Two closed-form log variants of the affine-class sup-norm cover bound:
/// `c (R/t)^2 Log(n R / t)` versus the sharper `c (R/t)^2 Log(m t / R)`
/// with `m = min(n, d)`. Reported as a probe, no expected ordering.
pub fn affine_cover_bound_probe(n: usize, d: usize, radius: f64, t: f64, c: f64) -> (f64, f64) {
    let ratio = (radius / t).powi(2);
    let m = n.min(d) as f64;
    let log_cap = |x: f64| x.max(std::f64::consts::E).ln();
    (
        c * ratio * log_cap(n as f64 * radius / t),
        c * ratio * log_cap(m * t / radius),
    )
}
