//! Disambiguation of partial concept classes.
//!
//! A disambiguation assigns every partial row a total `{0,1}` row agreeing
//! with it on all defined entries. The exact search minimizes the VC
//! dimension of the resulting total class over all per-row star completions;
//! that space suffices, since dropping unused total rows never raises the VC
//! dimension.

use serde::{Deserialize, Serialize};

use crate::class::{Label, PartialClass};
use crate::dims::vc_dim_partial;
use crate::error::{Error, Result};

/// A total class plus the covering row assigned to each partial row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Disambiguation {
    /// Star-free class of total rows.
    pub total: PartialClass,
    /// `assignment[i]` is the total row covering partial row `i`.
    pub assignment: Vec<usize>,
}

impl Disambiguation {
    pub fn vc(&self) -> Result<usize> {
        Ok(vc_dim_partial(&self.total)?.dimension)
    }

    pub fn distinct_rows(&self) -> usize {
        self.total.distinct_rows()
    }
}

fn compatible(partial: &[Label], total: &[Label]) -> bool {
    partial
        .iter()
        .zip(total)
        .all(|(p, t)| p.is_star() || p == t)
}

/// True iff every partial row's assigned total row agrees on all non-star
/// entries. Total rows not assigned to anything are allowed.
pub fn is_disambiguation(class: &PartialClass, dis: &Disambiguation) -> bool {
    if dis.assignment.len() != class.n_concepts() {
        return false;
    }
    if dis.total.domain.len() != class.domain.len() {
        return false;
    }
    if !dis.total.is_total() {
        return false;
    }
    class
        .values
        .iter()
        .zip(&dis.assignment)
        .all(|(row, &g)| match dis.total.values.get(g) {
            Some(total_row) => compatible(row, total_row),
            None => false,
        })
}

/// All star completions of one row, in lexicographic row order.
fn completions(row: &[Label]) -> Vec<Vec<Label>> {
    let stars: Vec<usize> = row
        .iter()
        .enumerate()
        .filter(|(_, l)| l.is_star())
        .map(|(i, _)| i)
        .collect();
    let mut out = Vec::with_capacity(1 << stars.len());
    for mask in 0..(1u32 << stars.len()) {
        let mut r = row.to_vec();
        for (j, &pos) in stars.iter().enumerate() {
            r[pos] = Label::from_bit(mask >> j & 1 == 1);
        }
        out.push(r);
    }
    out.sort();
    out
}

fn dedup_into_total(domain: &[String], rows: &[Vec<Label>]) -> (PartialClass, Vec<usize>) {
    let mut unique: Vec<Vec<Label>> = Vec::new();
    let mut assignment = Vec::with_capacity(rows.len());
    for row in rows {
        match unique.iter().position(|u| u == row) {
            Some(idx) => assignment.push(idx),
            None => {
                unique.push(row.clone());
                assignment.push(unique.len() - 1);
            }
        }
    }
    (
        PartialClass {
            domain: domain.to_vec(),
            values: unique,
        },
        assignment,
    )
}

fn vc_of_rows(domain: &[String], rows: &[Vec<Label>]) -> Result<usize> {
    let class = PartialClass {
        domain: domain.to_vec(),
        values: rows.to_vec(),
    };
    Ok(vc_dim_partial(&class)?.dimension)
}

/// Caps on the exact minimal-VC search.
#[derive(Debug, Clone, Copy)]
pub struct ExactDisambigLimits {
    pub max_points: usize,
    pub max_rows: usize,
    pub max_nodes: u64,
}

impl Default for ExactDisambigLimits {
    fn default() -> Self {
        ExactDisambigLimits {
            max_points: 5,
            max_rows: 10,
            max_nodes: 2_000_000,
        }
    }
}

struct ExactSearch<'a> {
    domain: &'a [String],
    per_row: Vec<Vec<Vec<Label>>>,
    nodes: u64,
    max_nodes: u64,
}

impl<'a> ExactSearch<'a> {
    // Is some completion of the remaining rows within VC budget `d`?
    fn feasible(&mut self, chosen: &mut Vec<Vec<Label>>, d: usize) -> Result<bool> {
        let idx = chosen.len();
        if idx == self.per_row.len() {
            return Ok(true);
        }
        for cand in self.per_row[idx].clone() {
            self.nodes += 1;
            if self.nodes > self.max_nodes {
                return Err(Error::BudgetExceeded(
                    "exact disambiguation search; use the greedy method".into(),
                ));
            }
            chosen.push(cand);
            if vc_of_rows(self.domain, chosen)? <= d && self.feasible(chosen, d)? {
                chosen.pop();
                return Ok(true);
            }
            chosen.pop();
        }
        Ok(false)
    }

    // Among completions with VC exactly `d`, finds the lexicographically
    // first one with the fewest distinct rows.
    fn best(
        &mut self,
        chosen: &mut Vec<Vec<Label>>,
        d: usize,
        best: &mut Option<(usize, Vec<Vec<Label>>)>,
    ) -> Result<()> {
        let idx = chosen.len();
        if idx == self.per_row.len() {
            let distinct: std::collections::HashSet<&Vec<Label>> = chosen.iter().collect();
            let count = distinct.len();
            if best.as_ref().map_or(true, |(b, _)| count < *b) {
                *best = Some((count, chosen.clone()));
            }
            return Ok(());
        }
        for cand in self.per_row[idx].clone() {
            self.nodes += 1;
            if self.nodes > self.max_nodes {
                return Err(Error::BudgetExceeded(
                    "exact disambiguation search; use the greedy method".into(),
                ));
            }
            chosen.push(cand);
            let distinct: std::collections::HashSet<&Vec<Label>> = chosen.iter().collect();
            let prune = match best {
                Some((b, _)) => distinct.len() >= *b,
                None => false,
            };
            if !prune && vc_of_rows(self.domain, chosen)? <= d {
                self.best(chosen, d, best)?;
            }
            chosen.pop();
        }
        Ok(())
    }
}

/// Exhaustive search over per-row completions for a disambiguation of
/// minimal VC dimension. Ties go to fewer distinct rows, then to the
/// lexicographically smallest completion matrix.
pub fn min_vc_disambiguation_exact(
    class: &PartialClass,
    limits: &ExactDisambigLimits,
) -> Result<(Disambiguation, usize)> {
    if class.n_points() > limits.max_points || class.n_concepts() > limits.max_rows {
        return Err(Error::BudgetExceeded(format!(
            "{} rows on {} points exceeds the exact-search limits; use the greedy method",
            class.n_concepts(),
            class.n_points()
        )));
    }
    let lower = vc_dim_partial(class)?.dimension;
    let greedy = greedy_disambiguation(class);
    let upper = greedy.vc()?;

    let mut search = ExactSearch {
        domain: &class.domain,
        per_row: class.values.iter().map(|r| completions(r)).collect(),
        nodes: 0,
        max_nodes: limits.max_nodes,
    };
    let mut d_star = upper;
    for d in lower..upper {
        if search.feasible(&mut Vec::new(), d)? {
            d_star = d;
            break;
        }
    }
    let mut best = None;
    search.best(&mut Vec::new(), d_star, &mut best)?;
    let (_, rows) = best.expect("a completion attaining the minimal vc exists");
    let (total, assignment) = dedup_into_total(&class.domain, &rows);
    Ok((Disambiguation { total, assignment }, d_star))
}

/// Completes rows one by one: reuse an existing compatible total row when
/// possible, otherwise fill each star with the majority label among the
/// fixed entries of its column (0 on an empty or tied column).
pub fn greedy_disambiguation(class: &PartialClass) -> Disambiguation {
    let majority: Vec<Label> = (0..class.n_points())
        .map(|x| {
            let mut zeros = 0usize;
            let mut ones = 0usize;
            for row in &class.values {
                match row[x] {
                    Label::Zero => zeros += 1,
                    Label::One => ones += 1,
                    Label::Star => {}
                }
            }
            Label::from_bit(ones > zeros)
        })
        .collect();

    let mut unique: Vec<Vec<Label>> = Vec::new();
    let mut assignment = Vec::with_capacity(class.n_concepts());
    for row in &class.values {
        match unique.iter().position(|u| compatible(row, u)) {
            Some(idx) => assignment.push(idx),
            None => {
                let completed: Vec<Label> = row
                    .iter()
                    .zip(&majority)
                    .map(|(l, m)| if l.is_star() { *m } else { *l })
                    .collect();
                unique.push(completed);
                assignment.push(unique.len() - 1);
            }
        }
    }
    Disambiguation {
        total: PartialClass {
            domain: class.domain.clone(),
            values: unique,
        },
        assignment,
    }
}

/// Disambiguates a class of VC dimension zero to a single total row: each
/// column takes its unique defined label, all-star columns take 0.
pub fn singleton_disambiguation(class: &PartialClass) -> Result<Disambiguation> {
    let mut row = Vec::with_capacity(class.n_points());
    for x in 0..class.n_points() {
        let mut has0 = false;
        let mut has1 = false;
        for r in &class.values {
            match r[x] {
                Label::Zero => has0 = true,
                Label::One => has1 = true,
                Label::Star => {}
            }
        }
        if has0 && has1 {
            return Err(Error::Precondition(format!(
                "column {x} carries both labels, so the class has vc >= 1"
            )));
        }
        row.push(Label::from_bit(has1));
    }
    Ok(Disambiguation {
        total: PartialClass {
            domain: class.domain.clone(),
            values: vec![row],
        },
        assignment: vec![0; class.n_concepts()],
    })
}

/// Size guarantee for a good disambiguation: `(|Omega|+1)^((d+1) log2|Omega| + 2)`.
pub fn disambiguation_size_bound_raw(omega: usize, d: usize) -> f64 {
    let n = omega as f64;
    (n + 1.0).powf((d as f64 + 1.0) * n.log2() + 2.0)
}

/// Simplified size guarantee for `d >= 1`, `|Omega| > 1`:
/// `|Omega|^(5 d log2|Omega|)`.
pub fn disambiguation_size_bound(omega: usize, d: usize) -> f64 {
    let n = omega as f64;
    n.powf(5.0 * d as f64 * n.log2())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{random_partial_class, rng_from_seed};
    use Label::{One, Star, Zero};

    fn pclass(rows: Vec<Vec<Label>>) -> PartialClass {
        PartialClass::from_rows(rows).unwrap()
    }

    #[test]
    fn is_disambiguation_examples() {
        let p = pclass(vec![vec![One, Star]]);
        let good = Disambiguation {
            total: pclass(vec![vec![One, Zero]]),
            assignment: vec![0],
        };
        assert!(is_disambiguation(&p, &good));
        let bad = Disambiguation {
            total: pclass(vec![vec![Zero, Zero]]),
            assignment: vec![0],
        };
        assert!(!is_disambiguation(&p, &bad));

        // One total row may serve many partial rows.
        let p2 = pclass(vec![vec![One, Star], vec![Star, Zero]]);
        let shared = Disambiguation {
            total: pclass(vec![vec![One, Zero]]),
            assignment: vec![0, 0],
        };
        assert!(is_disambiguation(&p2, &shared));
    }

    #[test]
    fn exact_on_total_class_is_identity() {
        let p = pclass(vec![vec![Zero, One], vec![One, One]]);
        let (dis, vc) = min_vc_disambiguation_exact(&p, &ExactDisambigLimits::default()).unwrap();
        assert_eq!(vc, vc_dim_partial(&p).unwrap().dimension);
        assert_eq!(dis.total.values, p.values);
        assert!(is_disambiguation(&p, &dis));
    }

    #[test]
    fn exact_finds_vc_zero_completion() {
        let p = pclass(vec![vec![Zero, Star], vec![Star, One]]);
        let (dis, vc) = min_vc_disambiguation_exact(&p, &ExactDisambigLimits::default()).unwrap();
        assert_eq!(vc, 0);
        assert_eq!(dis.total.values, vec![vec![Zero, One]]);
        assert_eq!(dis.assignment, vec![0, 0]);
    }

    // Minimal vc over the raw cross product of per-row completions, with
    // the same tie rules, by plain enumeration.
    fn brute_force_min_vc(p: &PartialClass) -> (usize, usize) {
        let per_row: Vec<Vec<Vec<Label>>> = p.values.iter().map(|r| completions(r)).collect();
        let mut best: Option<(usize, usize)> = None;
        let mut indices = vec![0usize; per_row.len()];
        loop {
            let rows: Vec<Vec<Label>> = indices
                .iter()
                .enumerate()
                .map(|(i, &c)| per_row[i][c].clone())
                .collect();
            let class = PartialClass::from_rows(rows.clone()).unwrap();
            let vc = vc_dim_partial(&class).unwrap().dimension;
            let distinct = class.distinct_rows();
            if best.map_or(true, |(bv, bd)| vc < bv || (vc == bv && distinct < bd)) {
                best = Some((vc, distinct));
            }
            let mut pos = per_row.len();
            loop {
                if pos == 0 {
                    return best.unwrap();
                }
                pos -= 1;
                indices[pos] += 1;
                if indices[pos] < per_row[pos].len() {
                    break;
                }
                indices[pos] = 0;
            }
        }
    }

    #[test]
    fn exact_matches_brute_force_on_tiny_instances() {
        let mut rng = rng_from_seed(101);
        for _ in 0..15 {
            let p = random_partial_class(&mut rng, 3, 3, 0.5);
            let (dis, vc) =
                min_vc_disambiguation_exact(&p, &ExactDisambigLimits::default()).unwrap();
            let (bf_vc, bf_distinct) = brute_force_min_vc(&p);
            assert_eq!(vc, bf_vc, "class {:?}", p.values);
            assert_eq!(dis.distinct_rows(), bf_distinct, "class {:?}", p.values);
        }
    }

    #[test]
    fn exact_never_beats_partial_vc_and_never_loses_to_greedy() {
        let mut rng = rng_from_seed(77);
        for _ in 0..25 {
            let p = random_partial_class(&mut rng, 5, 4, 0.45);
            let lower = vc_dim_partial(&p).unwrap().dimension;
            let (dis, vc) =
                min_vc_disambiguation_exact(&p, &ExactDisambigLimits::default()).unwrap();
            let greedy = greedy_disambiguation(&p);
            assert!(is_disambiguation(&p, &dis));
            assert!(is_disambiguation(&p, &greedy));
            assert!(vc >= lower);
            assert!(vc <= greedy.vc().unwrap());
            assert_eq!(dis.vc().unwrap(), vc);
        }
    }

    #[test]
    fn size_bounds_hold_on_exact_minima() {
        let mut rng = rng_from_seed(79);
        let mut checked = 0;
        while checked < 10 {
            let p = random_partial_class(&mut rng, 5, 4, 0.4);
            let (dis, vc) =
                min_vc_disambiguation_exact(&p, &ExactDisambigLimits::default()).unwrap();
            let raw = disambiguation_size_bound_raw(p.n_points(), vc);
            assert!((dis.distinct_rows() as f64) <= raw);
            if vc >= 1 {
                let bound = disambiguation_size_bound(p.n_points(), vc);
                assert!((dis.distinct_rows() as f64) <= bound);
                checked += 1;
            }
        }
    }

    #[test]
    fn greedy_examples() {
        // No stars: rows pass through unchanged.
        let p = pclass(vec![vec![Zero, One], vec![One, Zero]]);
        let dis = greedy_disambiguation(&p);
        assert_eq!(dis.total.values, p.values);

        // vc = 0: greedy collapses to the singleton disambiguation.
        let p = pclass(vec![vec![Star, Star], vec![One, Star]]);
        let dis = greedy_disambiguation(&p);
        let single = singleton_disambiguation(&p).unwrap();
        assert_eq!(dis.total.values, single.total.values);
        assert_eq!(dis.total.n_concepts(), 1);
    }

    #[test]
    fn greedy_is_always_valid() {
        let mut rng = rng_from_seed(83);
        for _ in 0..30 {
            let p = random_partial_class(&mut rng, 6, 5, 0.5);
            assert!(is_disambiguation(&p, &greedy_disambiguation(&p)));
        }
    }

    #[test]
    fn singleton_examples() {
        let p = pclass(vec![vec![Zero, Star], vec![Star, Star]]);
        let d = singleton_disambiguation(&p).unwrap();
        assert_eq!(d.total.values, vec![vec![Zero, Zero]]);

        let p = pclass(vec![vec![Star, One], vec![Star, Star]]);
        let d = singleton_disambiguation(&p).unwrap();
        assert_eq!(d.total.values, vec![vec![Zero, One]]);

        let p = pclass(vec![vec![Zero, Star], vec![Star, One]]);
        let d = singleton_disambiguation(&p).unwrap();
        assert_eq!(d.total.values, vec![vec![Zero, One]]);
        assert!(is_disambiguation(&p, &d));
    }

    #[test]
    fn singleton_rejects_positive_vc() {
        let p = pclass(vec![vec![Zero], vec![One]]);
        assert!(matches!(
            singleton_disambiguation(&p),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn disambiguation_vc_dominates_partial_vc() {
        let mut rng = rng_from_seed(89);
        for _ in 0..20 {
            let p = random_partial_class(&mut rng, 5, 4, 0.4);
            let lower = vc_dim_partial(&p).unwrap().dimension;
            assert!(greedy_disambiguation(&p).vc().unwrap() >= lower);
        }
    }

    #[test]
    fn exact_limits_enforced() {
        let p = random_partial_class(&mut rng_from_seed(1), 11, 4, 0.3);
        assert!(matches!(
            min_vc_disambiguation_exact(&p, &ExactDisambigLimits::default()),
            Err(Error::BudgetExceeded(_))
        ));
    }
}
