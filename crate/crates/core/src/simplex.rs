//! Dense two-phase simplex over exact rationals, with Bland's rule so that
//! degenerate problems cannot cycle. All variables are nonnegative.

use num_traits::{Signed, Zero};

use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { value: Rational, point: Vec<Rational> },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn value(&self) -> Option<&Rational> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }
}

/// A linear program over `n_vars` nonnegative variables.
#[derive(Clone, Debug, Default)]
pub struct LinearProgram {
    n_vars: usize,
    rows: Vec<(Vec<Rational>, Relation, Rational)>,
}

impl LinearProgram {
    pub fn new(n_vars: usize) -> Self {
        LinearProgram { n_vars, rows: Vec::new() }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn constrain(&mut self, coeffs: Vec<Rational>, rel: Relation, rhs: Rational) -> &mut Self {
        assert_eq!(coeffs.len(), self.n_vars, "coefficient vector has wrong length");
        self.rows.push((coeffs, rel, rhs));
        self
    }

    pub fn eq(&mut self, coeffs: Vec<Rational>, rhs: Rational) -> &mut Self {
        self.constrain(coeffs, Relation::Eq, rhs)
    }

    pub fn le(&mut self, coeffs: Vec<Rational>, rhs: Rational) -> &mut Self {
        self.constrain(coeffs, Relation::Le, rhs)
    }

    pub fn ge(&mut self, coeffs: Vec<Rational>, rhs: Rational) -> &mut Self {
        self.constrain(coeffs, Relation::Ge, rhs)
    }

    pub fn maximize(&self, objective: &[Rational]) -> LpOutcome {
        Solver::build(self).run(objective)
    }

    pub fn minimize(&self, objective: &[Rational]) -> LpOutcome {
        let neg: Vec<Rational> = objective.iter().map(|c| -c).collect();
        match self.maximize(&neg) {
            LpOutcome::Optimal { value, point } => LpOutcome::Optimal { value: -value, point },
            other => other,
        }
    }

    pub fn feasible_point(&self) -> Option<Vec<Rational>> {
        match self.maximize(&vec![Rational::zero(); self.n_vars]) {
            LpOutcome::Optimal { point, .. } => Some(point),
            _ => None,
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.feasible_point().is_some()
    }
}

struct Solver {
    n_vars: usize,
    n_cols: usize,
    artificial_from: usize,
    a: Vec<Vec<Rational>>,
    basis: Vec<usize>,
}

impl Solver {
    fn build(lp: &LinearProgram) -> Solver {
        let m = lp.rows.len();
        let n_slack = lp.rows.iter().filter(|r| r.1 != Relation::Eq).count();
        let n_art = lp.rows.iter().filter(|(_, rel, rhs)| needs_artificial(*rel, rhs)).count();
        let artificial_from = lp.n_vars + n_slack;
        let n_cols = artificial_from + n_art;
        let mut a = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let (mut slack, mut art) = (lp.n_vars, artificial_from);
        for (coeffs, rel, rhs) in &lp.rows {
            let flip = rhs.is_negative();
            let mut row = vec![Rational::zero(); n_cols + 1];
            for (j, c) in coeffs.iter().enumerate() {
                row[j] = if flip { -c } else { c.clone() };
            }
            row[n_cols] = rhs.abs();
            let rel = match (rel, flip) {
                (Relation::Le, true) => Relation::Ge,
                (Relation::Ge, true) => Relation::Le,
                (r, _) => *r,
            };
            match rel {
                Relation::Le => {
                    row[slack] = Rational::from_integer(1.into());
                    basis.push(slack);
                    slack += 1;
                }
                Relation::Ge => {
                    row[slack] = Rational::from_integer((-1).into());
                    slack += 1;
                    row[art] = Rational::from_integer(1.into());
                    basis.push(art);
                    art += 1;
                }
                Relation::Eq => {
                    row[art] = Rational::from_integer(1.into());
                    basis.push(art);
                    art += 1;
                }
            }
            a.push(row);
        }
        Solver { n_vars: lp.n_vars, n_cols, artificial_from, a, basis }
    }

    fn pivot(&mut self, r: usize, c: usize, obj: &mut [Rational]) {
        let p = self.a[r][c].clone();
        if !num_traits::One::is_one(&p) {
            for v in self.a[r].iter_mut() {
                if !v.is_zero() {
                    *v /= &p;
                }
            }
        }
        let pivot_row = self.a[r].clone();
        let nz: Vec<usize> = (0..pivot_row.len()).filter(|&j| !pivot_row[j].is_zero()).collect();
        for (i, row) in self.a.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for &j in &nz {
                row[j] -= &f * &pivot_row[j];
            }
        }
        if !obj[c].is_zero() {
            let f = obj[c].clone();
            for &j in &nz {
                obj[j] -= &f * &pivot_row[j];
            }
        }
        self.basis[r] = c;
    }

    /// Maximizes with the objective row `obj` (reduced costs, last entry the
    /// current value) over columns `< allowed`. Returns false if unbounded.
    fn optimize(&mut self, obj: &mut [Rational], allowed: usize) -> bool {
        loop {
            let Some(c) = (0..allowed).find(|&j| obj[j].is_negative()) else {
                return true;
            };
            let mut best: Option<(usize, Rational)> = None;
            for (i, row) in self.a.iter().enumerate() {
                if !row[c].is_positive() {
                    continue;
                }
                let ratio = &row[self.n_cols] / &row[c];
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, c, obj),
                None => return false,
            }
        }
    }

    fn run(mut self, objective: &[Rational]) -> LpOutcome {
        let width = self.n_cols + 1;
        if self.artificial_from < self.n_cols {
            let mut obj = vec![Rational::zero(); width];
            for v in &mut obj[self.artificial_from..self.n_cols] {
                *v = Rational::from_integer(1.into());
            }
            for (i, row) in self.a.iter().enumerate() {
                if self.basis[i] >= self.artificial_from {
                    for j in 0..width {
                        obj[j] -= &row[j];
                    }
                }
            }
            self.optimize(&mut obj, self.n_cols);
            if obj[self.n_cols].is_negative() {
                return LpOutcome::Infeasible;
            }
            // drive remaining (zero-valued) artificials out of the basis
            let mut i = 0;
            while i < self.a.len() {
                if self.basis[i] >= self.artificial_from {
                    match (0..self.artificial_from).find(|&j| !self.a[i][j].is_zero()) {
                        Some(j) => {
                            self.pivot(i, j, &mut obj);
                            i += 1;
                        }
                        None => {
                            self.a.remove(i);
                            self.basis.remove(i);
                        }
                    }
                } else {
                    i += 1;
                }
            }
        }
        let mut obj = vec![Rational::zero(); width];
        for (j, c) in objective.iter().enumerate() {
            obj[j] = -c;
        }
        for (i, row) in self.a.iter().enumerate() {
            let b = self.basis[i];
            if !obj[b].is_zero() {
                let f = obj[b].clone();
                for j in 0..width {
                    obj[j] -= &f * &row[j];
                }
            }
        }
        if !self.optimize(&mut obj, self.artificial_from) {
            return LpOutcome::Unbounded;
        }
        let mut point = vec![Rational::zero(); self.n_vars];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.n_vars {
                point[b] = self.a[i][self.n_cols].clone();
            }
        }
        LpOutcome::Optimal { value: obj[self.n_cols].clone(), point }
    }
}

fn needs_artificial(rel: Relation, rhs: &Rational) -> bool {
    match rel {
        Relation::Eq => true,
        Relation::Le => rhs.is_negative(),
        Relation::Ge => !rhs.is_negative(),
    }
}
