//! Integration checks of the discretize-shift-disambiguate machinery: the
//! pieces used to bound the dimension of a composed maximum must fit
//! together exactly as the counting argument needs.

use shatter_core::class::{DiscretizerSpec, Label, PartialClass};
use shatter_core::compose::{k_fold_max, shift_class, MaxSpec};
use shatter_core::covering::{
    covering_number_with_cap, packing_lower_bound, CoverMethod, MetricSpec, PNorm,
};
use shatter_core::dims::{vc_dim_partial, vc_shatters};
use shatter_core::disambig::{greedy_disambiguation, is_disambiguation, Disambiguation};
use shatter_core::generate::{random_grid_class, rng_from_seed};
use shatter_core::SampledClass;

fn or_rows(a: &[Label], b: &[Label]) -> Vec<Label> {
    a.iter()
        .zip(b)
        .map(|(x, y)| Label::from_bit(x.bit().unwrap() || y.bit().unwrap()))
        .collect()
}

/// The maximum of per-component disambiguations, taken tuple by tuple,
/// disambiguates the discretized shifted maximum.
#[test]
fn max_of_disambiguations_disambiguates_the_discretized_max() {
    let gamma = 1.0;
    let spec = DiscretizerSpec::new(gamma).unwrap();
    let mut rng = rng_from_seed(271);
    for _ in 0..25 {
        let f1 = random_grid_class(&mut rng, 3, 3, -3, 3);
        let f2 = random_grid_class(&mut rng, 3, 3, -3, 3);
        let shift: Vec<f64> = (0..3)
            .map(|_| rand::Rng::gen_range(&mut rng, -2..=2) as f64)
            .collect();

        let f1s = shift_class(&f1, &shift).unwrap();
        let f2s = shift_class(&f2, &shift).unwrap();
        let fmax_s = k_fold_max(&[&f1s, &f2s], &MaxSpec::default()).unwrap();
        let p_max = fmax_s.discretize(&spec);

        let d1 = greedy_disambiguation(&f1s.discretize(&spec));
        let d2 = greedy_disambiguation(&f2s.discretize(&spec));

        // Row r of the max corresponds to tuple (a, b); its disambiguated
        // representative is the OR of the component representatives.
        let tuples = fmax_s.metadata.clone().unwrap().tuples.unwrap();
        let mut total_rows = Vec::new();
        let mut assignment = Vec::new();
        for tuple in &tuples {
            let g1 = &d1.total.values[d1.assignment[tuple[0]]];
            let g2 = &d2.total.values[d2.assignment[tuple[1]]];
            let row = or_rows(g1, g2);
            match total_rows.iter().position(|r| r == &row) {
                Some(idx) => assignment.push(idx),
                None => {
                    total_rows.push(row);
                    assignment.push(total_rows.len() - 1);
                }
            }
        }
        let candidate = Disambiguation {
            total: PartialClass {
                domain: p_max.domain.clone(),
                values: total_rows,
            },
            assignment,
        };
        assert!(
            is_disambiguation(&p_max, &candidate),
            "OR of component disambiguations must cover the discretized max"
        );
    }
}

/// A VC-shattered set of a total class realizes exactly all binary
/// patterns, and the distinct projections of a composed maximum never
/// exceed the product over components.
#[test]
fn shattered_projection_counting() {
    let mut rng = rng_from_seed(733);
    for _ in 0..25 {
        let f1 = random_grid_class(&mut rng, 3, 4, -2, 2);
        let f2 = random_grid_class(&mut rng, 3, 4, -2, 2);
        let fmax = k_fold_max(&[&f1, &f2], &MaxSpec::default()).unwrap();
        let spec = DiscretizerSpec::new(1.0).unwrap();
        let p1 = f1.discretize(&spec);
        let p2 = f2.discretize(&spec);
        let pm = fmax.discretize(&spec);

        let vc = vc_dim_partial(&pm).unwrap().dimension;
        if vc >= 1 {
            // Find one shattered set of maximum size and count projections.
            let n = pm.n_points();
            let mut found = None;
            let mut subset = Vec::new();
            find_shattered(&pm, n, vc, 0, &mut subset, &mut found);
            let s = found.expect("a shattered set of size vc exists");
            let distinct: std::collections::HashSet<Vec<Label>> = pm
                .restrict(&s)
                .unwrap()
                .values
                .into_iter()
                .filter(|row| row.iter().all(|l| !l.is_star()))
                .collect();
            assert_eq!(distinct.len(), 1 << s.len());
        }

        // Projection counting for the disambiguated total classes.
        let d1 = greedy_disambiguation(&p1);
        let d2 = greedy_disambiguation(&p2);
        let mut or_class = Vec::new();
        for a in &d1.total.values {
            for b in &d2.total.values {
                or_class.push(or_rows(a, b));
            }
        }
        let distinct: std::collections::HashSet<&Vec<Label>> = or_class.iter().collect();
        assert!(distinct.len() <= d1.total.distinct_rows() * d2.total.distinct_rows());
    }
}

fn find_shattered(
    p: &PartialClass,
    n: usize,
    size: usize,
    from: usize,
    subset: &mut Vec<usize>,
    found: &mut Option<Vec<usize>>,
) {
    if found.is_some() {
        return;
    }
    if subset.len() == size {
        if vc_shatters(p, subset) {
            *found = Some(subset.clone());
        }
        return;
    }
    for i in from..n {
        subset.push(i);
        find_shattered(p, n, size, i + 1, subset, found);
        subset.pop();
        if found.is_some() {
            return;
        }
    }
}

/// Grid classes on few points: the exact sup-norm cover grows like the
/// per-axis grid packing, the standard volumetric lower-bound mechanism.
#[test]
fn grid_cover_growth_matches_packing() {
    // (points, per-axis values, radius)
    let cases: [(usize, Vec<f64>, f64); 3] = [
        (1, (0..9).map(|i| -1.0 + 0.25 * i as f64).collect(), 0.1),
        (2, vec![-1.0, -0.5, 0.0, 0.5, 1.0], 0.2),
        (3, vec![-1.0, 0.0, 1.0], 0.45),
    ];
    for (n, axis, t) in cases {
        let class = shatter_core::generate::grid_class(n, &axis);
        let metric = MetricSpec::uniform(PNorm::Infinity, n);
        let cover = covering_number_with_cap(&class, &metric, t, CoverMethod::Exact, 64).unwrap();
        let packing = packing_lower_bound(&class, &metric, 2.0 * t).unwrap();
        assert!(cover.size >= packing.len());
        // The per-axis packing count is the full grid here (spacing > 2t),
        // which dominates the (1/2t)^n growth floor.
        let floor = (1.0 / (2.0 * t)).powi(n as i32);
        assert!(
            packing.len() as f64 >= floor,
            "n={n}: packing {} below floor {floor}",
            packing.len()
        );
    }
}
