//! Shared generators and brute-force oracles for the integration tests.

#![allow(dead_code)]

use pentail::event::{describe_worlds, Atom, ConditionalEvent, Universe, WorldSet};
use pentail::{Rational, TruthValue};
use num_bigint::BigInt;
use rand::Rng;

pub fn ce(s: &str) -> ConditionalEvent {
    ConditionalEvent::parse(s).unwrap()
}

pub fn universe(n: usize) -> Universe {
    Universe::new(["A", "B", "C", "D"][..n].iter().map(|a| Atom::new(*a)))
}

/// A conditional event from its truth value at every world of `u`, or `None`
/// when no world is live.
pub fn from_truth(u: &Universe, truth: &[TruthValue]) -> Option<ConditionalEvent> {
    let worlds = |pred: &dyn Fn(TruthValue) -> bool| -> WorldSet {
        WorldSet::from_fn(u, |w| pred(truth[w as usize]))
    };
    let t = worlds(&|v| v == TruthValue::True);
    let h = worlds(&|v| v != TruthValue::Void);
    if h.is_empty() {
        return None;
    }
    ConditionalEvent::new(describe_worlds(u, &t), describe_worlds(u, &h)).ok()
}

pub fn truth_vector(u: &Universe, c: &ConditionalEvent) -> Vec<TruthValue> {
    u.worlds().map(|w| c.truth_at(u, w)).collect()
}

pub fn random_truth(rng: &mut impl Rng, worlds: usize) -> Vec<TruthValue> {
    // biased toward void so that antecedents are not almost always certain
    (0..worlds)
        .map(|_| match rng.gen_range(0..5) {
            0 | 1 => TruthValue::Void,
            2 | 3 => TruthValue::True,
            _ => TruthValue::False,
        })
        .collect()
}

pub fn random_event(rng: &mut impl Rng, u: &Universe) -> ConditionalEvent {
    loop {
        if let Some(c) = from_truth(u, &random_truth(rng, u.world_count())) {
            return c;
        }
    }
}

pub fn random_dyadic(rng: &mut impl Rng, bits: u32) -> Rational {
    let den = 1i64 << bits;
    Rational::new(BigInt::from(rng.gen_range(0..=den)), BigInt::from(den))
}

/// Hull membership in dimension at most 3 over integer points, by searching
/// for an affinely independent subset whose barycentric coordinates of `p`
/// are nonnegative. Independent of any LP code.
pub fn in_hull(points: &[Vec<i64>], p: &[i64]) -> bool {
    let d = p.len();
    let mut pts: Vec<Vec<i64>> = points.to_vec();
    pts.sort();
    pts.dedup();
    for k in 1..=(d + 1).min(pts.len()) {
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            if barycentric_ok(&idx.iter().map(|&i| &pts[i]).collect::<Vec<_>>(), p) {
                return true;
            }
            let Some(i) = (0..k).rev().find(|&i| idx[i] != i + pts.len() - k) else { break };
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    false
}

/// Rows of the system: one per coordinate plus the sum-to-one row.
fn barycentric_ok(s: &[&Vec<i64>], p: &[i64]) -> bool {
    let k = s.len();
    let d = p.len();
    let rows: Vec<(Vec<i64>, i64)> = (0..d)
        .map(|r| (s.iter().map(|v| v[r]).collect(), p[r]))
        .chain(std::iter::once((vec![1; k], 1)))
        .collect();
    // pick k rows with a nonzero minor
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        let m: Vec<Vec<i64>> = idx.iter().map(|&r| rows[r].0.clone()).collect();
        let det = det(&m);
        if det != 0 {
            let mut lambda_num = Vec::with_capacity(k);
            for c in 0..k {
                let mut mc = m.clone();
                for (row, &r) in mc.iter_mut().zip(&idx) {
                    row[c] = rows[r].1;
                }
                lambda_num.push(self::det(&mc));
            }
            if lambda_num.iter().any(|&l| l * det.signum() < 0) {
                return false;
            }
            // every equation, not only the chosen ones
            return rows.iter().all(|(a, b)| {
                let lhs: i128 = a.iter().zip(&lambda_num).map(|(x, l)| *x as i128 * *l as i128).sum();
                lhs == *b as i128 * det as i128
            });
        }
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + rows.len() - k) else { return false };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn det(m: &[Vec<i64>]) -> i64 {
    match m.len() {
        1 => m[0][0],
        n => (0..n)
            .map(|c| {
                let minor: Vec<Vec<i64>> =
                    m[1..].iter().map(|row| row.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, v)| *v).collect()).collect();
                let sign = if c % 2 == 0 { 1 } else { -1 };
                sign * m[0][c] * det(&minor)
            })
            .sum(),
    }
}

/// Coherence of probabilities on conditional events by the subfamily
/// criterion: for every nonempty subfamily J the restricted assessment is in
/// the hull of the value vectors of worlds where some antecedent of J holds.
/// Values must be multiples of `1/scale`.
pub fn oracle_coherent(family: &[ConditionalEvent], values: &[Rational], scale: i64) -> bool {
    let u = family.iter().fold(Universe::default(), |u, c| u.union(&c.universe()));
    let scaled: Vec<i64> = values
        .iter()
        .map(|v| {
            let s = v * Rational::from_integer(BigInt::from(scale));
            assert!(s.is_integer());
            i64::try_from(s.to_integer()).unwrap()
        })
        .collect();
    let n = family.len();
    let truth: Vec<Vec<TruthValue>> = family.iter().map(|c| truth_vector(&u, c)).collect();
    (1u32..(1 << n)).all(|mask| {
        let j: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let points: Vec<Vec<i64>> = u
            .worlds()
            .filter(|&w| j.iter().any(|&i| truth[i][w as usize] != TruthValue::Void))
            .map(|w| {
                j.iter()
                    .map(|&i| match truth[i][w as usize] {
                        TruthValue::True => scale,
                        TruthValue::False => 0,
                        TruthValue::Void => scaled[i],
                    })
                    .collect()
            })
            .collect();
        let p: Vec<i64> = j.iter().map(|&i| scaled[i]).collect();
        in_hull(&points, &p)
    })
}

/// A random small formula: a literal, or a conjunction or disjunction of two.
pub fn random_formula(rng: &mut impl Rng, u: &Universe) -> pentail::EventExpr {
    use pentail::EventExpr;
    let literal = |rng: &mut dyn rand::RngCore| {
        let a = EventExpr::atom(u.atoms()[rng.gen_range(0..u.len())].name());
        if rng.gen_bool(0.5) {
            !a
        } else {
            a
        }
    };
    match rng.gen_range(0..6) {
        0 => EventExpr::omega(),
        1 | 2 => literal(rng),
        3 | 4 => literal(rng) & literal(rng),
        _ => literal(rng) | literal(rng),
    }
}

/// A conditional event built from formulas, with a satisfiable antecedent.
pub fn random_formula_event(rng: &mut impl Rng, u: &Universe) -> ConditionalEvent {
    loop {
        let e = random_formula(rng, u);
        let h = random_formula(rng, u);
        if let Ok(c) = ConditionalEvent::new(e, h) {
            return c;
        }
    }
}

/// A random conditional event implied, in the Goodman-Nguyen order, by `c`.
pub fn random_weakening(rng: &mut impl Rng, u: &Universe, c: &ConditionalEvent) -> Option<ConditionalEvent> {
    let truth: Vec<TruthValue> = truth_vector(u, c)
        .into_iter()
        .map(|t| match t {
            TruthValue::True => TruthValue::True,
            TruthValue::False => [TruthValue::True, TruthValue::False, TruthValue::Void][rng.gen_range(0..3)],
            TruthValue::Void => [TruthValue::True, TruthValue::Void][rng.gen_range(0..2)],
        })
        .collect();
    from_truth(u, &truth)
}
