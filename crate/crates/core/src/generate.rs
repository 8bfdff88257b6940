//! Seeded generators for random test instances.
//!
//! Value generators emit numbers on a coarse grid (integers or small dyadics)
//! so that every margin comparison downstream is exact in f64.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::class::{ClassMeta, Label, PartialClass, SampledClass};

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives an independent stream for instance `index` of a batch run.
pub fn rng_for_instance(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// Random class with integer values in `[lo, hi]`.
pub fn random_grid_class(
    rng: &mut ChaCha8Rng,
    rows: usize,
    cols: usize,
    lo: i32,
    hi: i32,
) -> SampledClass {
    let values = (0..rows)
        .map(|_| (0..cols).map(|_| rng.gen_range(lo..=hi) as f64).collect())
        .collect();
    SampledClass::from_rows(values).expect("generated class is rectangular and finite")
}

/// Random partial class; each cell is `*` with probability `star_prob`,
/// otherwise a fair bit.
pub fn random_partial_class(
    rng: &mut ChaCha8Rng,
    rows: usize,
    cols: usize,
    star_prob: f64,
) -> PartialClass {
    let values = (0..rows)
        .map(|_| {
            (0..cols)
                .map(|_| {
                    if rng.gen_bool(star_prob) {
                        Label::Star
                    } else {
                        Label::from_bit(rng.gen_bool(0.5))
                    }
                })
                .collect()
        })
        .collect();
    PartialClass::from_rows(values).expect("generated class is rectangular")
}

/// The cube class `{-gamma, gamma}^n` on `n` points: all sign rows.
pub fn cube_class(n: usize, gamma: f64) -> SampledClass {
    assert!(n >= 1 && n <= 20, "cube class limited to 20 points");
    let values = (0..1u32 << n)
        .map(|mask| {
            (0..n)
                .map(|i| if mask >> i & 1 == 1 { gamma } else { -gamma })
                .collect()
        })
        .collect();
    SampledClass::from_rows(values)
        .expect("cube class is valid")
        .with_metadata(ClassMeta {
            generator: Some(format!("cube_{n}")),
            gamma: Some(gamma),
            ..ClassMeta::default()
        })
}

/// Full product class over `n` points with values drawn from `axis`: one
/// row per value tuple. Its cover count under the sup norm grows like the
/// per-axis packing to the n-th power.
pub fn grid_class(n: usize, axis: &[f64]) -> SampledClass {
    assert!(n >= 1 && !axis.is_empty());
    assert!(axis.len().pow(n as u32) <= 1 << 16, "grid class too large");
    let mut rows: Vec<Vec<f64>> = vec![vec![]];
    for _ in 0..n {
        rows = rows
            .iter()
            .flat_map(|r| {
                axis.iter().map(move |v| {
                    let mut row = r.clone();
                    row.push(*v);
                    row
                })
            })
            .collect();
    }
    SampledClass::from_rows(rows)
        .expect("grid class is valid")
        .with_metadata(ClassMeta {
            generator: Some(format!("grid_{n}")),
            ..ClassMeta::default()
        })
}

/// Random point in the closed unit ball of dimension `d`, with coordinates
/// snapped to multiples of `1/8` (keeps exact-arithmetic feasibility checks
/// fast).
pub fn random_ball_point(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    loop {
        let p: Vec<f64> = (0..d)
            .map(|_| (rng.gen_range(-8i32..=8) as f64) / 8.0)
            .collect();
        if p.iter().map(|v| v * v).sum::<f64>() <= 1.0 {
            return p;
        }
    }
}

pub fn random_ball_points(rng: &mut ChaCha8Rng, d: usize, count: usize) -> Vec<Vec<f64>> {
    (0..count).map(|_| random_ball_point(rng, d)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_seed_deterministic() {
        let a = random_grid_class(&mut rng_from_seed(7), 4, 3, -3, 3);
        let b = random_grid_class(&mut rng_from_seed(7), 4, 3, -3, 3);
        assert_eq!(a.values, b.values);

        let p = random_partial_class(&mut rng_from_seed(9), 3, 3, 0.4);
        let q = random_partial_class(&mut rng_from_seed(9), 3, 3, 0.4);
        assert_eq!(p.values, q.values);
    }

    #[test]
    fn cube_class_shape() {
        let c = cube_class(3, 1.0);
        assert_eq!(c.n_functions(), 8);
        assert_eq!(c.n_points(), 3);
        assert!(c.values.iter().all(|r| r.iter().all(|v| v.abs() == 1.0)));
    }

    #[test]
    fn grid_class_is_the_full_product() {
        let g = grid_class(2, &[-1.0, 0.0, 1.0]);
        assert_eq!(g.n_functions(), 9);
        assert_eq!(g.n_points(), 2);
        assert_eq!(g.dedup_rows().n_functions(), 9);
    }

    #[test]
    fn ball_points_are_inside() {
        let mut rng = rng_from_seed(3);
        for _ in 0..50 {
            let p = random_ball_point(&mut rng, 3);
            assert!(p.iter().map(|v| v * v).sum::<f64>() <= 1.0 + 1e-12);
        }
    }
}
