//! Exact-rational simplex for `A x = b, x >= 0`.
//!
//! Dense two-phase tableau with Bland's rule. Objectives are lexicographic:
//! a list of rows maximized in priority order. The default tie-break after
//! the primary objective minimizes `x_0`, then `x_1`, and so on, which picks
//! the lexicographically smallest optimal point (always a vertex, since the
//! feasible region lies in the nonnegative orthant).

use num_traits::{One, Signed, Zero};

use crate::linalg;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<Rational>,
    /// Value of the primary objective.
    pub value: Rational,
    /// Dual multipliers of the primary objective, one per constraint row.
    /// `value(b') <= dual . b'` for every right-hand side `b'`.
    pub dual: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpStatus {
    Optimal(LpSolution),
    Infeasible,
    Unbounded,
}

impl LpStatus {
    pub fn optimal(&self) -> Option<&LpSolution> {
        match self {
            LpStatus::Optimal(s) => Some(s),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub a: Vec<Vec<Rational>>,
    pub b: Vec<Rational>,
    pub cols: usize,
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    /// Reduced-cost rows in priority order, each of width `cols + 1`; the
    /// last entry is the current objective value.
    objective: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    /// Original constraint index of each tableau row.
    origin: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Rational {
        &self.rows[i][self.cols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].recip();
        for x in self.rows[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = self.rows[r].clone();
        let eliminate = |row: &mut Vec<Rational>| {
            if row[c].is_zero() {
                return;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        for row in self.objective.iter_mut() {
            eliminate(row);
        }
        self.basis[r] = c;
    }

    /// Column `j`'s reduced cost vector is lexicographically negative.
    fn improving(&self, j: usize) -> bool {
        for row in &self.objective {
            if row[j].is_negative() {
                return true;
            }
            if row[j].is_positive() {
                return false;
            }
        }
        false
    }

    /// Runs Bland's rule over columns `< allowed`. `false` means unbounded.
    fn optimize(&mut self, allowed: usize) -> bool {
        loop {
            let Some(c) = (0..allowed).find(|&j| !self.basis.contains(&j) && self.improving(j))
            else {
                return true;
            };
            let mut best: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][c];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(i) / a;
                let better = match &best {
                    None => true,
                    Some((bi, br)) => {
                        ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi])
                    }
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, c),
                None => return false,
            }
        }
    }

    fn reset_objective(&mut self, objectives: &[Vec<Rational>]) {
        self.objective = objectives
            .iter()
            .map(|c| {
                let mut row: Vec<Rational> = c.iter().map(|x| -x).collect();
                row.resize(self.cols + 1, Rational::zero());
                row
            })
            .collect();
        for (i, &j) in self.basis.iter().enumerate() {
            for k in 0..self.objective.len() {
                let f = self.objective[k][j].clone();
                if f.is_zero() {
                    continue;
                }
                for (x, p) in self.objective[k].iter_mut().zip(&self.rows[i]) {
                    *x -= &f * p;
                }
            }
        }
    }
}

impl LinearProgram {
    pub fn new(a: Vec<Vec<Rational>>, b: Vec<Rational>, cols: usize) -> Self {
        debug_assert!(a.iter().all(|r| r.len() == cols));
        debug_assert_eq!(a.len(), b.len());
        LinearProgram { a, b, cols }
    }

    /// Phase one; returns a feasible basic tableau with redundant rows dropped.
    fn phase_one(&self) -> Option<Tableau> {
        let m = self.a.len();
        let n = self.cols;
        let width = n + m;
        let mut rows = Vec::with_capacity(m);
        for (i, (row, b)) in self.a.iter().zip(&self.b).enumerate() {
            let flip = b.is_negative();
            let mut r: Vec<Rational> = Vec::with_capacity(width + 1);
            r.extend(row.iter().map(|x| if flip { -x } else { x.clone() }));
            r.extend((0..m).map(|k| if k == i { Rational::one() } else { Rational::zero() }));
            r.push(if flip { -b } else { b.clone() });
            rows.push(r);
        }
        let mut t = Tableau {
            rows,
            objective: Vec::new(),
            basis: (n..n + m).collect(),
            origin: (0..m).collect(),
            cols: width,
        };
        let mut phase_one_cost = vec![Rational::zero(); width];
        for c in phase_one_cost.iter_mut().skip(n) {
            *c = -Rational::one();
        }
        t.reset_objective(&[phase_one_cost]);
        t.optimize(width);
        if !t.objective[0][width].is_zero() {
            return None;
        }
        // Drive artificials out of the basis or drop their (redundant) rows.
        let mut i = 0;
        while i < t.rows.len() {
            if t.basis[i] >= n {
                match (0..n).find(|&j| !t.rows[i][j].is_zero()) {
                    Some(j) => t.pivot(i, j),
                    None => {
                        t.rows.remove(i);
                        t.basis.remove(i);
                        t.origin.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
        for row in t.rows.iter_mut() {
            let rhs = row[width].clone();
            row.truncate(n);
            row.push(rhs);
        }
        t.cols = n;
        Some(t)
    }

    pub fn feasible_point(&self) -> Option<Vec<Rational>> {
        let t = self.phase_one()?;
        Some(self.extract(&t))
    }

    fn extract(&self, t: &Tableau) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); self.cols];
        for (i, &j) in t.basis.iter().enumerate() {
            x[j] = t.rhs(i).clone();
        }
        x
    }

    /// Maximizes `c . x`; ties broken toward the lexicographically smallest `x`.
    pub fn maximize(&self, c: &[Rational]) -> LpStatus {
        let mut objectives = vec![c.to_vec()];
        for j in 0..self.cols {
            let mut row = vec![Rational::zero(); self.cols];
            row[j] = -Rational::one();
            objectives.push(row);
        }
        self.maximize_lex(&objectives)
    }

    /// Maximizes `c . x` without the witness tie-break.
    pub fn maximize_plain(&self, c: &[Rational]) -> LpStatus {
        self.maximize_lex(&[c.to_vec()])
    }

    pub fn maximize_lex(&self, objectives: &[Vec<Rational>]) -> LpStatus {
        let Some(mut t) = self.phase_one() else {
            return LpStatus::Infeasible;
        };
        t.reset_objective(objectives);
        if !t.optimize(self.cols) {
            return LpStatus::Unbounded;
        }
        let x = self.extract(&t);
        let value = crate::rational::dot(&objectives[0], &x);
        let dual = self.dual(&t, &objectives[0]);
        LpStatus::Optimal(LpSolution { x, value, dual })
    }

    /// Solves `B^T y = c_B` on the kept rows; dropped rows get multiplier zero.
    fn dual(&self, t: &Tableau, c: &[Rational]) -> Vec<Rational> {
        let mut y = vec![Rational::zero(); self.a.len()];
        if t.basis.is_empty() {
            return y;
        }
        let bt: linalg::Matrix = t
            .basis
            .iter()
            .map(|&j| t.origin.iter().map(|&i| self.a[i][j].clone()).collect())
            .collect();
        let cb: Vec<Rational> = t.basis.iter().map(|&j| c[j].clone()).collect();
        let sol = linalg::solve(&bt, &cb).expect("basis matrix is nonsingular");
        for (k, &i) in t.origin.iter().enumerate() {
            y[i] = sol[k].clone();
        }
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn lp(a: &[Vec<i64>], b: &[i64]) -> LinearProgram {
        let cols = a.first().map_or(0, |r| r.len());
        LinearProgram::new(
            linalg::from_integers(a),
            b.iter().map(|&x| int(x)).collect(),
            cols,
        )
    }

    #[test]
    fn simple_maximum() {
        // x + y + s = 4, x + 3y + u = 6; max x + 2y -> (3, 1), value 5.
        let p = lp(&[vec![1, 1, 1, 0], vec![1, 3, 0, 1]], &[4, 6]);
        let s = p.maximize(&[int(1), int(2), int(0), int(0)]);
        let s = s.optimal().unwrap();
        assert_eq!(s.value, int(5));
        assert_eq!(&s.x[..2], &[int(3), int(1)]);
        assert_eq!(s.dual, vec![ratio(1, 2), ratio(1, 2)]);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let p = lp(&[vec![1, 1]], &[-1]);
        assert_eq!(p.maximize(&[int(0), int(0)]), LpStatus::Infeasible);
        let p = lp(&[vec![1, -1]], &[0]);
        assert_eq!(p.maximize(&[int(1), int(0)]), LpStatus::Unbounded);
        let p = LinearProgram::new(vec![], vec![], 1);
        assert_eq!(p.maximize(&[int(1)]), LpStatus::Unbounded);
        assert!(p.maximize(&[int(-1)]).optimal().is_some());
    }

    #[test]
    fn redundant_rows_are_handled() {
        let p = lp(&[vec![1, 1], vec![2, 2], vec![1, 0]], &[2, 4, 1]);
        let s = p.maximize(&[int(0), int(1)]);
        let s = s.optimal().unwrap();
        assert_eq!(s.x, vec![int(1), int(1)]);
        let bad = lp(&[vec![1, 1], vec![2, 2]], &[2, 5]);
        assert_eq!(bad.maximize(&[int(0), int(0)]), LpStatus::Infeasible);
    }

    #[test]
    fn tie_break_is_lexicographic_min() {
        // x + y = 1, objective 0: every point optimal; lex-min is (0, 1).
        let p = lp(&[vec![1, 1]], &[1]);
        let s = p.maximize(&[int(0), int(0)]);
        assert_eq!(s.optimal().unwrap().x, vec![int(0), int(1)]);
    }

    #[test]
    fn dual_bounds_value_for_other_rhs() {
        let p = lp(&[vec![1, 1, 1, 0], vec![1, 3, 0, 1]], &[4, 6]);
        let c = [int(1), int(2), int(0), int(0)];
        let y = p.maximize(&c).optimal().unwrap().dual.clone();
        for b in [[5, 6], [4, 9], [1, 1]] {
            let q = lp(&[vec![1, 1, 1, 0], vec![1, 3, 0, 1]], &b);
            let v = q.maximize(&c).optimal().unwrap().value.clone();
            let bound = &y[0] * int(b[0]) + &y[1] * int(b[1]);
            assert!(v <= bound);
        }
    }
}
