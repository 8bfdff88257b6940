//! Seeded property suites behind `shatter verify`. Each check prints one
//! line; any violation flips the exit code to 2.

use rayon::prelude::*;

use shatter_core::affine::{
    halfspace_union_shatter_search, sample_affine_class, simplex_shatter_witness, AffineSpec,
    UnionSearchConfig,
};
use shatter_core::bounds::{check_elementary_facts, evaluate_bound, BoundId, BoundParams};
use shatter_core::class::{DiscretizerSpec, Label};
use shatter_core::compose::{
    hinge_loss_class, k_fold_max, label_augment_class, scale_class, shift_class,
    sign_threshold_class, MaxSpec,
};
use shatter_core::covering::{
    check_max_pair_inequalities, covering_number_with_cap, maurey_cover, maurey_size_bound,
    net_distance, verify_product_bound, CoverMethod, MetricSpec, PNorm,
};
use shatter_core::dims::{
    check_certificate, faat_dim, fat_dim, fat_via_shift_scan, vc_dim_partial, ShatterMode,
};
use shatter_core::disambig::{
    disambiguation_size_bound, greedy_disambiguation, is_disambiguation,
    min_vc_disambiguation_exact, singleton_disambiguation, ExactDisambigLimits,
};
use shatter_core::generate::{
    random_ball_points, random_grid_class, random_partial_class, rng_for_instance, rng_from_seed,
};
use shatter_core::SampledClass;

struct Check {
    name: &'static str,
    violations: Vec<String>,
    detail: String,
}

fn per_instance<F>(trials: usize, f: F) -> Vec<String>
where
    F: Fn(u64) -> Option<String> + Sync,
{
    let mut hits: Vec<(u64, String)> = (0..trials as u64)
        .into_par_iter()
        .filter_map(|idx| f(idx).map(|msg| (idx, msg)))
        .collect();
    hits.sort_by_key(|(idx, _)| *idx);
    hits.into_iter().map(|(_, m)| m).collect()
}

fn dims_suite(seed: u64, trials: usize) -> Vec<Check> {
    let oracle = per_instance(trials, |idx| {
        let mut rng = rng_for_instance(seed, idx);
        let rows = rand::Rng::gen_range(&mut rng, 2..=6usize);
        let cols = rand::Rng::gen_range(&mut rng, 2..=4usize);
        let f = random_grid_class(&mut rng, rows, cols, -3, 3);
        let a = fat_dim(&f, 1.0).unwrap();
        let b = fat_via_shift_scan(&f, 1.0).unwrap();
        if a.dimension != b.dimension {
            return Some(format!(
                "instance {idx}: {} vs {}",
                a.dimension, b.dimension
            ));
        }
        if let Some(cert) = &a.certificate {
            if !check_certificate(&f, cert, ShatterMode::Shifted).unwrap() {
                return Some(format!("instance {idx}: certificate failed"));
            }
        }
        None
    });
    let identity = per_instance(trials, |idx| {
        let mut rng = rng_for_instance(seed + 1, idx);
        let f = random_grid_class(&mut rng, 5, 4, -3, 3);
        let faat = faat_dim(&f, 1.0).unwrap().dimension;
        let vc = vc_dim_partial(&f.discretize(&DiscretizerSpec::new(1.0).unwrap()))
            .unwrap()
            .dimension;
        (faat != vc).then(|| format!("instance {idx}: faat {faat} vs vc {vc}"))
    });
    let order = per_instance(trials, |idx| {
        let mut rng = rng_for_instance(seed + 2, idx);
        let f = random_grid_class(&mut rng, 5, 3, -3, 3);
        let fat1 = fat_dim(&f, 1.0).unwrap().dimension;
        let fat2 = fat_dim(&f, 2.0).unwrap().dimension;
        let faat1 = faat_dim(&f, 1.0).unwrap().dimension;
        let shift: Vec<f64> = (0..3)
            .map(|_| rand::Rng::gen_range(&mut rng, -9..=9) as f64)
            .collect();
        let moved = fat_dim(&shift_class(&f, &shift).unwrap(), 1.0)
            .unwrap()
            .dimension;
        let scaled = fat_dim(&scale_class(&f, 2.0), 2.0).unwrap().dimension;
        if faat1 > fat1 {
            return Some(format!("instance {idx}: zero-shift beats shifted"));
        }
        if fat2 > fat1 {
            return Some(format!(
                "instance {idx}: larger scale gave larger dimension"
            ));
        }
        if moved != fat1 || scaled != fat1 {
            return Some(format!("instance {idx}: shift/scale equivariance broken"));
        }
        None
    });
    vec![
        Check {
            name: "dims.oracle_agreement",
            violations: oracle,
            detail: format!("{trials} classes"),
        },
        Check {
            name: "dims.zero_shift_vc_identity",
            violations: identity,
            detail: format!("{trials} classes"),
        },
        Check {
            name: "dims.order_and_equivariance",
            violations: order,
            detail: format!("{trials} classes"),
        },
    ]
}

fn compose_suite(seed: u64, trials: usize) -> Vec<Check> {
    let commute = per_instance(trials, |idx| {
        let mut rng = rng_for_instance(seed + 10, idx);
        let a = random_grid_class(&mut rng, 3, 3, -3, 3);
        let b = random_grid_class(&mut rng, 3, 3, -3, 3);
        let shift: Vec<f64> = (0..3)
            .map(|_| rand::Rng::gen_range(&mut rng, -3..=3) as f64)
            .collect();
        let spec = MaxSpec::default();
        let lhs = k_fold_max(
            &[
                &shift_class(&a, &shift).unwrap(),
                &shift_class(&b, &shift).unwrap(),
            ],
            &spec,
        )
        .unwrap();
        let rhs = shift_class(&k_fold_max(&[&a, &b], &spec).unwrap(), &shift).unwrap();
        if lhs.values != rhs.values {
            return Some(format!("instance {idx}: max/shift commutation broken"));
        }
        let sm = sign_threshold_class(&k_fold_max(&[&a, &b], &spec).unwrap());
        let sa = sign_threshold_class(&a);
        let sb = sign_threshold_class(&b);
        let mut or_rows = Vec::new();
        for ra in &sa.values {
            for rb in &sb.values {
                or_rows.push(
                    ra.iter()
                        .zip(rb)
                        .map(|(x, y)| Label::from_bit(x.bit().unwrap() || y.bit().unwrap()))
                        .collect::<Vec<_>>(),
                );
            }
        }
        (sm.values != or_rows).then(|| format!("instance {idx}: sign/max commutation broken"))
    });
    let hinge = per_instance(trials, |idx| {
        let mut rng = rng_for_instance(seed + 11, idx);
        let f = random_grid_class(&mut rng, 4, 4, -3, 3);
        let labels: Vec<i8> = (0..4)
            .map(|_| {
                if rand::Rng::gen_bool(&mut rng, 0.5) {
                    1
                } else {
                    -1
                }
            })
            .collect();
        let aug = label_augment_class(&f, &labels).unwrap();
        let flipped: Vec<Vec<f64>> = f
            .values
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&labels)
                    .map(|(v, &y)| f64::from(y) * v)
                    .collect()
            })
            .collect();
        if aug.values != flipped {
            return Some(format!(
                "instance {idx}: label augmentation is not the flip map"
            ));
        }
        let hinge = hinge_loss_class(&f, &labels).unwrap();
        let ok = hinge
            .values
            .iter()
            .zip(&aug.values)
            .all(|(h, a)| h.iter().zip(a).all(|(hv, av)| *hv == (1.0 - av).max(0.0)));
        (!ok).then(|| format!("instance {idx}: hinge values off"))
    });
    vec![
        Check {
            name: "compose.commutation",
            violations: commute,
            detail: format!("{trials} instances"),
        },
        Check {
            name: "compose.hinge_flip",
            violations: hinge,
            detail: format!("{trials} instances"),
        },
    ]
}

fn covering_suite(seed: u64, trials: usize) -> Vec<Check> {
    let product = per_instance(trials, |idx| {
        let mut rng = rng_for_instance(seed + 20, idx);
        let cols = rand::Rng::gen_range(&mut rng, 2..=4usize);
        let a = random_grid_class(&mut rng, 4, cols, -2, 2);
        let b = random_grid_class(&mut rng, 4, cols, -2, 2);
        let t = [0.5, 1.0, 2.0][rand::Rng::gen_range(&mut rng, 0..3usize)];
        let mut sizes = Vec::new();
        for p in [PNorm::Finite(1.0), PNorm::Finite(2.0), PNorm::Infinity] {
            let metric = MetricSpec::uniform(p, cols);
            let report = verify_product_bound(&[&a, &b], &metric, t).unwrap();
            if !report.holds {
                return Some(format!(
                    "instance {idx} p={p}: {} > {}",
                    report.n_max, report.rhs_product
                ));
            }
            sizes.push(report.n_max);
        }
        (!(sizes[0] <= sizes[1] && sizes[1] <= sizes[2]))
            .then(|| format!("instance {idx}: p-monotonicity broken {sizes:?}"))
    });
    let greedy = per_instance(trials, |idx| {
        let mut rng = rng_for_instance(seed + 21, idx);
        let f = random_grid_class(&mut rng, 8, 3, -3, 3);
        let metric = MetricSpec::uniform(PNorm::Finite(2.0), 3);
        let mut last = usize::MAX;
        for t in [0.25, 0.5, 1.0, 2.0] {
            let exact = covering_number_with_cap(&f, &metric, t, CoverMethod::Exact, 20).unwrap();
            let greedy = covering_number_with_cap(&f, &metric, t, CoverMethod::Greedy, 20).unwrap();
            if exact.size > greedy.size {
                return Some(format!("instance {idx}: exact above greedy"));
            }
            if exact.size > last {
                return Some(format!("instance {idx}: radius monotonicity broken"));
            }
            last = exact.size;
        }
        None
    });
    let pointwise = {
        let report = check_max_pair_inequalities(20_000, seed.wrapping_add(22));
        let worst = report
            .max_violation_power
            .max(report.max_violation_sup)
            .max(report.max_violation_tuple_finite)
            .max(report.max_violation_tuple_sup);
        Check {
            name: "covering.pointwise_inequalities",
            violations: if worst <= 1e-12 {
                Vec::new()
            } else {
                vec![format!("max violation {worst}")]
            },
            detail: "2e4 quadruples".into(),
        }
    };
    vec![
        Check {
            name: "covering.product_bound",
            violations: product,
            detail: format!("{trials} instances x 3 norms"),
        },
        Check {
            name: "covering.exact_greedy_radius",
            violations: greedy,
            detail: format!("{trials} instances"),
        },
        pointwise,
    ]
}

fn disambig_suite(seed: u64, trials: usize) -> Vec<Check> {
    let order = per_instance(trials, |idx| {
        let mut rng = rng_for_instance(seed + 30, idx);
        let rows = rand::Rng::gen_range(&mut rng, 2..=4usize);
        let p = random_partial_class(&mut rng, rows, 4, 0.45);
        let lower = vc_dim_partial(&p).unwrap().dimension;
        let greedy = greedy_disambiguation(&p);
        if !is_disambiguation(&p, &greedy) {
            return Some(format!("instance {idx}: greedy invalid"));
        }
        let greedy_vc = greedy.vc().unwrap();
        let (exact, exact_vc) =
            min_vc_disambiguation_exact(&p, &ExactDisambigLimits::default()).unwrap();
        if !is_disambiguation(&p, &exact) {
            return Some(format!("instance {idx}: exact invalid"));
        }
        if exact_vc > greedy_vc || lower > exact_vc {
            return Some(format!(
                "instance {idx}: vc order broken ({lower}, {exact_vc}, {greedy_vc})"
            ));
        }
        if exact_vc >= 1 {
            let bound = disambiguation_size_bound(p.n_points(), exact_vc);
            if (exact.distinct_rows() as f64) > bound {
                return Some(format!("instance {idx}: size bound broken"));
            }
        }
        None
    });
    let singleton = per_instance(trials, |idx| {
        let mut rng = rng_for_instance(seed + 31, idx);
        let p = random_partial_class(&mut rng, 3, 3, 0.7);
        let vc = vc_dim_partial(&p).unwrap().dimension;
        match singleton_disambiguation(&p) {
            Ok(dis) => {
                if vc != 0 || !is_disambiguation(&p, &dis) || dis.total.n_concepts() != 1 {
                    return Some(format!("instance {idx}: singleton accepted vc {vc}"));
                }
            }
            Err(_) => {
                if vc == 0 {
                    return Some(format!("instance {idx}: singleton rejected a vc=0 class"));
                }
            }
        }
        None
    });
    vec![
        Check {
            name: "disambig.vc_order_and_size",
            violations: order,
            detail: format!("{trials} classes"),
        },
        Check {
            name: "disambig.singleton",
            violations: singleton,
            detail: format!("{trials} classes"),
        },
    ]
}

fn affine_suite(seed: u64, trials: usize) -> Vec<Check> {
    let witnesses = {
        let mut violations = Vec::new();
        for d in 1..=4 {
            for gamma in [0.5, 1.0, 2.0] {
                let w = simplex_shatter_witness(d, gamma).unwrap();
                if !check_certificate(&w.class, &w.certificate, ShatterMode::Zero).unwrap() {
                    violations.push(format!("witness d={d} gamma={gamma} failed"));
                }
            }
        }
        Check {
            name: "affine.simplex_witnesses",
            violations,
            detail: "d=1..4, three scales".into(),
        }
    };
    let caps = per_instance(trials.min(10), |idx| {
        let mut rng = rng_for_instance(seed + 40, idx);
        let d = rand::Rng::gen_range(&mut rng, 1..=2usize);
        let gamma = [0.5, 1.0, 2.0][rand::Rng::gen_range(&mut rng, 0..3usize)];
        let radius = 1.0;
        let spec = AffineSpec {
            dim: d,
            radius,
            semi_bounded: true,
            samples: 25,
            seed: seed + 1000 + idx,
        };
        let points = random_ball_points(&mut rng, d, 5);
        let class = sample_affine_class(&spec, &points).unwrap();
        let fat = fat_dim(&class, gamma).unwrap().dimension;
        let mut params = BoundParams::new();
        params.d = Some(d);
        params.radius = Some(radius);
        params.gamma = Some(gamma);
        let bound = evaluate_bound(BoundId::FatHyp, &params).unwrap();
        if (fat as f64) > bound {
            return Some(format!("instance {idx}: fat {fat} above {bound}"));
        }
        let signs = sign_threshold_class(&class);
        let vc = vc_dim_partial(&signs).unwrap().dimension;
        (vc > d + 1).then(|| format!("instance {idx}: sign vc {vc} above {}", d + 1))
    });
    let caps = Check {
        name: "affine.dimension_caps",
        detail: "semi-bounded fat and sign vc".into(),
        violations: caps,
    };
    let union = {
        let mut violations = Vec::new();
        let mut cfg = UnionSearchConfig::new(1, 2, 3);
        cfg.seed = seed;
        cfg.random_configs_per_size = 5;
        let r = halfspace_union_shatter_search(&cfg).unwrap();
        if r.best_size != 2 {
            violations.push(format!("line search returned {}", r.best_size));
        }
        let mut cfg = UnionSearchConfig::new(2, 1, 4);
        cfg.seed = seed;
        cfg.random_configs_per_size = 5;
        let r = halfspace_union_shatter_search(&cfg).unwrap();
        if r.best_size != 3 {
            violations.push(format!("halfplane search returned {}", r.best_size));
        }
        Check {
            name: "affine.union_desk_values",
            violations,
            detail: "d=1 k=2 and d=2 k=1".into(),
        }
    };
    vec![witnesses, caps, union]
}

fn bounds_suite(seed: u64, trials: usize) -> Vec<Check> {
    let thm1 = per_instance(trials, |idx| {
        let mut rng = rng_for_instance(seed + 50, idx);
        let k = rand::Rng::gen_range(&mut rng, 2..=3usize);
        let cols = rand::Rng::gen_range(&mut rng, 2..=4usize);
        let components: Vec<SampledClass> = (0..k)
            .map(|_| {
                let rows = rand::Rng::gen_range(&mut rng, 1..=3usize);
                random_grid_class(&mut rng, rows, cols, -2, 2)
            })
            .collect();
        let refs: Vec<&SampledClass> = components.iter().collect();
        let fmax = k_fold_max(&refs, &MaxSpec::default()).unwrap();
        let dim_sum: usize = components
            .iter()
            .map(|c| fat_dim(c, 1.0).unwrap().dimension)
            .sum();
        let fat_max = fat_dim(&fmax, 1.0).unwrap().dimension;
        if dim_sum == 0 {
            return (fat_max != 0)
                .then(|| format!("instance {idx}: degenerate composition has fat {fat_max}"));
        }
        let mut params = BoundParams::new();
        params.dim_sum = Some(dim_sum as f64);
        let rhs = evaluate_bound(BoundId::Thm1, &params).unwrap();
        ((fat_max as f64) > rhs).then(|| format!("instance {idx}: {fat_max} above {rhs}"))
    });
    let facts = {
        let report = check_elementary_facts(10_000, seed.wrapping_add(51));
        Check {
            name: "bounds.elementary_facts",
            violations: if report.max_violation() <= 1e-9 {
                Vec::new()
            } else {
                vec![format!("max relative violation {}", report.max_violation())]
            },
            detail: "1e4 tuples".into(),
        }
    };
    vec![
        Check {
            name: "bounds.composed_max_thm1",
            violations: thm1,
            detail: format!("{trials} instances"),
        },
        facts,
    ]
}

fn maurey_suite(seed: u64, _trials: usize) -> Vec<Check> {
    let mut violations = Vec::new();
    let mut rng = rng_from_seed(seed.wrapping_add(60));
    for (m, t) in [(5usize, 0.8f64), (6, 1.0)] {
        let basis: Vec<Vec<f64>> = (0..m)
            .map(|i| (0..m).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        let net = maurey_cover(&basis, 1.0, t).unwrap();
        if (net.size as f64) > maurey_size_bound(m, 1.0, t, 3.0) {
            violations.push(format!("m={m} t={t}: size {} above bound", net.size));
        }
        for _ in 0..200 {
            let raw: Vec<f64> = (0..m)
                .map(|_| rand::Rng::gen_range(&mut rng, 0.0..1.0))
                .collect();
            let total: f64 = raw.iter().sum();
            let scale: f64 = rand::Rng::gen_range(&mut rng, 0.0..1.0);
            let mut target = vec![0.0; m];
            for (i, g) in basis.iter().enumerate() {
                let sign = if rand::Rng::gen_bool(&mut rng, 0.5) {
                    1.0
                } else {
                    -1.0
                };
                for c in 0..m {
                    target[c] += sign * scale * raw[i] / total * g[c];
                }
            }
            let dist = net_distance(&net, &target);
            if dist > t + 1e-12 {
                violations.push(format!("m={m} t={t}: target at distance {dist}"));
                break;
            }
        }
    }
    vec![Check {
        name: "maurey.coverage_and_size",
        violations,
        detail: "basis nets, 200 targets each".into(),
    }]
}

pub fn run_suites(suite: &str, seed: u64, trials: usize) -> anyhow::Result<u8> {
    let mut checks: Vec<Check> = Vec::new();
    let all = suite == "all";
    match suite {
        "all" | "dims" | "compose" | "covering" | "disambig" | "affine" | "bounds" | "maurey" => {}
        other => anyhow::bail!("unknown suite {other}"),
    }
    if all || suite == "dims" {
        checks.extend(dims_suite(seed, trials));
    }
    if all || suite == "compose" {
        checks.extend(compose_suite(seed, trials));
    }
    if all || suite == "covering" {
        checks.extend(covering_suite(seed, trials));
    }
    if all || suite == "disambig" {
        checks.extend(disambig_suite(seed, trials));
    }
    if all || suite == "affine" {
        checks.extend(affine_suite(seed, trials));
    }
    if all || suite == "bounds" {
        checks.extend(bounds_suite(seed, trials));
    }
    if all || suite == "maurey" {
        checks.extend(maurey_suite(seed, trials));
    }

    let mut failed = false;
    for check in &checks {
        if check.violations.is_empty() {
            println!("{}: OK ({})", check.name, check.detail);
        } else {
            failed = true;
            println!(
                "{}: VIOLATION ({}; first: {})",
                check.name,
                check.violations.len(),
                check.violations[0]
            );
        }
    }
    println!(
        "verify: {} checks, {} violations (seed {seed})",
        checks.len(),
        checks.iter().map(|c| c.violations.len()).sum::<usize>()
    );
    Ok(if failed {
        super::EXIT_VIOLATION
    } else {
        super::EXIT_OK
    })
}
