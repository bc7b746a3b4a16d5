//! Exact linear programming by the two-phase simplex method.
//!
//! Sizes here are tiny, at most a few dozen variables, so a dense rational
//! tableau with Bland's anti-cycling rule is both simple and fast enough.
//! Everything is exact: an `Optimal` outcome carries the true rational
//! optimum, never an approximation.

use num_traits::{One, Signed, Zero};

use super::{AlgebraError, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
struct Constraint {
    coeffs: Vec<Rational>,
    relation: Relation,
    rhs: Rational,
}

/// A linear program `minimize c . x` over rational variables.
///
/// Variables are free unless marked non-negative. Maximization is done by
/// minimizing the negated objective at the call site.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    objective: Vec<Rational>,
    constraints: Vec<Constraint>,
    nonnegative: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    /// The exact minimum and one point attaining it.
    Optimal {
        value: Rational,
        point: Vec<Rational>,
    },
    /// The objective decreases without bound on the feasible set.
    Unbounded,
    /// The feasible set is empty.
    Infeasible,
}

impl LpOutcome {
    pub fn optimal_value(&self) -> Option<&Rational> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }
}

impl LinearProgram {
    /// Starts a minimization problem with the given objective coefficients.
    /// All variables start out free.
    pub fn minimize(objective: Vec<Rational>) -> Self {
        let n = objective.len();
        LinearProgram {
            objective,
            constraints: Vec::new(),
            nonnegative: vec![false; n],
        }
    }

    pub fn var_count(&self) -> usize {
        self.objective.len()
    }

    /// Marks variable `i` as constrained to be non-negative.
    pub fn set_nonnegative(&mut self, i: usize) {
        self.nonnegative[i] = true;
    }

    /// Marks every variable as non-negative.
    pub fn set_all_nonnegative(&mut self) {
        self.nonnegative.iter_mut().for_each(|b| *b = true);
    }

    pub fn add_constraint(
        &mut self,
        coeffs: Vec<Rational>,
        relation: Relation,
        rhs: Rational,
    ) -> Result<(), AlgebraError> {
        if coeffs.len() != self.objective.len() {
            return Err(AlgebraError::DimensionMismatch(
                coeffs.len(),
                self.objective.len(),
            ));
        }
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
        Ok(())
    }

    /// Solves the program exactly.
    pub fn solve(&self) -> LpOutcome {
        Tableau::build(self).solve()
    }
}

/// Column bookkeeping: which standard-form column realizes which original
/// variable, with sign.
#[derive(Debug, Clone, Copy)]
enum ColumnRole {
    /// Coefficient +1 of original variable `i`.
    Plus(usize),
    /// Coefficient -1 of original variable `i`, used to split free variables.
    Minus(usize),
    /// Slack or surplus column.
    Slack,
}

struct Tableau {
    /// Row-major constraint matrix over the structural columns, extended by
    /// artificial columns during phase 1.
    matrix: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    /// Reduced cost row; `cost_value` tracks the negated objective value.
    cost: Vec<Rational>,
    cost_value: Rational,
    basis: Vec<usize>,
    roles: Vec<ColumnRole>,
    structural_cols: usize,
    original_objective: Vec<Rational>,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Tableau {
        let n = lp.var_count();
        // Standard-form columns: one per non-negative variable, a pair per
        // free variable, then one slack or surplus per inequality.
        let mut roles = Vec::new();
        let mut column_of_plus = vec![0usize; n];
        let mut column_of_minus = vec![None; n];
        for i in 0..n {
            column_of_plus[i] = roles.len();
            roles.push(ColumnRole::Plus(i));
            if !lp.nonnegative[i] {
                column_of_minus[i] = Some(roles.len());
                roles.push(ColumnRole::Minus(i));
            }
        }
        let first_slack = roles.len();
        for c in &lp.constraints {
            if c.relation != Relation::Eq {
                roles.push(ColumnRole::Slack);
            }
        }
        let structural_cols = roles.len();

        let m = lp.constraints.len();
        let mut matrix = vec![vec![Rational::zero(); structural_cols]; m];
        let mut rhs = vec![Rational::zero(); m];
        let mut next_slack = first_slack;
        for (r, c) in lp.constraints.iter().enumerate() {
            for (i, a) in c.coeffs.iter().enumerate() {
                matrix[r][column_of_plus[i]] = a.clone();
                if let Some(mc) = column_of_minus[i] {
                    matrix[r][mc] = -a.clone();
                }
            }
            match c.relation {
                Relation::Le => {
                    matrix[r][next_slack] = Rational::one();
                    next_slack += 1;
                }
                Relation::Ge => {
                    matrix[r][next_slack] = -Rational::one();
                    next_slack += 1;
                }
                Relation::Eq => {}
            }
            rhs[r] = c.rhs.clone();
            if rhs[r].is_negative() {
                for x in matrix[r].iter_mut() {
                    *x = -x.clone();
                }
                rhs[r] = -rhs[r].clone();
            }
        }

        Tableau {
            matrix,
            rhs,
            cost: Vec::new(),
            cost_value: Rational::zero(),
            basis: Vec::new(),
            roles,
            structural_cols,
            original_objective: lp.objective.clone(),
        }
    }

    fn solve(mut self) -> LpOutcome {
        let m = self.matrix.len();
        let structural = self.structural_cols;

        // Phase 1: append one artificial column per row and minimize their
        // sum. The artificial basis is feasible because every rhs is
        // non-negative.
        for (r, row) in self.matrix.iter_mut().enumerate() {
            for r2 in 0..m {
                row.push(if r2 == r {
                    Rational::one()
                } else {
                    Rational::zero()
                });
            }
        }
        self.basis = (structural..structural + m).collect();
        // Reduced phase-1 costs: 0 - column sum for structural columns.
        self.cost = vec![Rational::zero(); structural + m];
        for j in 0..structural {
            let mut s = Rational::zero();
            for r in 0..m {
                s += &self.matrix[r][j];
            }
            self.cost[j] = -s;
        }
        self.cost_value = -self.rhs.iter().sum::<Rational>();

        let phase1_bounded = self.run_simplex();
        assert!(phase1_bounded, "phase 1 is bounded below by zero");
        // The phase-1 objective value is -cost_value; nonzero means empty
        // feasible set.
        if !self.cost_value.is_zero() {
            return LpOutcome::Infeasible;
        }

        // Drive remaining artificial variables out of the basis; a row where
        // that is impossible is redundant and gets dropped.
        let mut r = 0;
        while r < self.matrix.len() {
            if self.basis[r] >= structural {
                match (0..structural).find(|&j| !self.matrix[r][j].is_zero()) {
                    Some(j) => self.pivot(r, j),
                    None => {
                        self.matrix.remove(r);
                        self.rhs.remove(r);
                        self.basis.remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }

        // Phase 2: drop artificial columns and restore the real objective.
        for row in self.matrix.iter_mut() {
            row.truncate(structural);
        }
        let objective: Vec<Rational> = (0..structural)
            .map(|j| match self.roles[j] {
                ColumnRole::Plus(i) => self.original_objective[i].clone(),
                ColumnRole::Minus(i) => -self.original_objective[i].clone(),
                ColumnRole::Slack => Rational::zero(),
            })
            .collect();
        self.cost = objective.clone();
        self.cost_value = Rational::zero();
        for (r, &b) in self.basis.iter().enumerate() {
            if objective[b].is_zero() {
                continue;
            }
            // Eliminate the basic column from the cost row.
            let factor = objective[b].clone();
            for j in 0..structural {
                let delta = &factor * &self.matrix[r][j];
                self.cost[j] -= delta;
            }
            self.cost_value -= &factor * &self.rhs[r];
        }

        if !self.run_simplex() {
            return LpOutcome::Unbounded;
        }

        let mut point = vec![Rational::zero(); self.original_objective.len()];
        for (r, &b) in self.basis.iter().enumerate() {
            match self.roles[b] {
                ColumnRole::Plus(i) => point[i] += &self.rhs[r],
                ColumnRole::Minus(i) => point[i] -= &self.rhs[r],
                ColumnRole::Slack => {}
            }
        }
        LpOutcome::Optimal {
            value: -self.cost_value.clone(),
            point,
        }
    }

    /// Runs simplex iterations until optimality (true) or unboundedness
    /// (false). Bland's rule: entering column is the lowest-index negative
    /// reduced cost, leaving row breaks ratio ties by lowest basis index.
    fn run_simplex(&mut self) -> bool {
        loop {
            let cols = self.cost.len();
            let Some(entering) = (0..cols).find(|&j| self.cost[j].is_negative()) else {
                return true;
            };
            let mut leaving: Option<(usize, Rational)> = None;
            for r in 0..self.matrix.len() {
                let a = &self.matrix[r][entering];
                if a.is_positive() {
                    let ratio = &self.rhs[r] / a;
                    let better = match &leaving {
                        None => true,
                        Some((lr, lratio)) => {
                            ratio < *lratio
                                || (ratio == *lratio && self.basis[r] < self.basis[*lr])
                        }
                    };
                    if better {
                        leaving = Some((r, ratio));
                    }
                }
            }
            let Some((row, _)) = leaving else {
                return false;
            };
            self.pivot(row, entering);
        }
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let inv = self.matrix[row][col].clone().recip();
        for x in self.matrix[row].iter_mut() {
            *x *= &inv;
        }
        self.rhs[row] *= &inv;
        let pivot_row = self.matrix[row].clone();
        let pivot_rhs = self.rhs[row].clone();
        for r in 0..self.matrix.len() {
            if r != row && !self.matrix[r][col].is_zero() {
                let f = self.matrix[r][col].clone();
                for (x, p) in self.matrix[r].iter_mut().zip(&pivot_row) {
                    let delta = &f * p;
                    *x -= delta;
                }
                self.rhs[r] -= &f * &pivot_rhs;
            }
        }
        if !self.cost[col].is_zero() {
            let f = self.cost[col].clone();
            for (x, p) in self.cost.iter_mut().zip(&pivot_row) {
                let delta = &f * p;
                *x -= delta;
            }
            self.cost_value -= &f * &pivot_rhs;
        }
        self.basis[row] = col;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, rat_int};

    fn outcome_value(outcome: &LpOutcome) -> &Rational {
        outcome.optimal_value().expect("expected an optimum")
    }

    #[test]
    fn threshold_program_from_a_plane_curve() {
        // minimize w1 + w2 subject to 2 w1 >= t, 3 w2 >= t, t >= 1,
        // all variables non-negative: optimum 5/6 at (1/2, 1/3, 1).
        let mut lp = LinearProgram::minimize(vec![rat_int(1), rat_int(1), rat_int(0)]);
        lp.set_all_nonnegative();
        lp.add_constraint(vec![rat_int(2), rat_int(0), rat_int(-1)], Relation::Ge, rat_int(0))
            .unwrap();
        lp.add_constraint(vec![rat_int(0), rat_int(3), rat_int(-1)], Relation::Ge, rat_int(0))
            .unwrap();
        lp.add_constraint(vec![rat_int(0), rat_int(0), rat_int(1)], Relation::Ge, rat_int(1))
            .unwrap();
        let got = lp.solve();
        assert_eq!(
            got,
            LpOutcome::Optimal {
                value: rat(5, 6),
                point: vec![rat(1, 2), rat(1, 3), rat_int(1)],
            }
        );
    }

    #[test]
    fn detects_unbounded_direction() {
        // minimize -x with x >= 1.
        let mut lp = LinearProgram::minimize(vec![rat_int(-1)]);
        lp.set_nonnegative(0);
        lp.add_constraint(vec![rat_int(1)], Relation::Ge, rat_int(1))
            .unwrap();
        assert_eq!(lp.solve(), LpOutcome::Unbounded);
    }

    #[test]
    fn detects_infeasible_system() {
        // x <= 1 and x >= 2.
        let mut lp = LinearProgram::minimize(vec![rat_int(1)]);
        lp.set_nonnegative(0);
        lp.add_constraint(vec![rat_int(1)], Relation::Le, rat_int(1))
            .unwrap();
        lp.add_constraint(vec![rat_int(1)], Relation::Ge, rat_int(2))
            .unwrap();
        assert_eq!(lp.solve(), LpOutcome::Infeasible);
    }

    #[test]
    fn free_variables_can_go_negative() {
        // minimize x subject to x >= -3 with x free.
        let mut lp = LinearProgram::minimize(vec![rat_int(1)]);
        lp.add_constraint(vec![rat_int(1)], Relation::Ge, rat_int(-3))
            .unwrap();
        let got = lp.solve();
        assert_eq!(outcome_value(&got), &rat_int(-3));
    }

    #[test]
    fn unconstrained_free_objective_is_unbounded() {
        let lp = LinearProgram::minimize(vec![rat_int(1)]);
        assert_eq!(lp.solve(), LpOutcome::Unbounded);
    }

    #[test]
    fn equality_constraints_are_exact() {
        // minimize x + y with x + 2y = 4, x - y = 1: unique point (2, 1).
        let mut lp = LinearProgram::minimize(vec![rat_int(1), rat_int(1)]);
        lp.add_constraint(vec![rat_int(1), rat_int(2)], Relation::Eq, rat_int(4))
            .unwrap();
        lp.add_constraint(vec![rat_int(1), rat_int(-1)], Relation::Eq, rat_int(1))
            .unwrap();
        let got = lp.solve();
        assert_eq!(
            got,
            LpOutcome::Optimal {
                value: rat_int(3),
                point: vec![rat_int(2), rat_int(1)],
            }
        );
    }

    #[test]
    fn redundant_equalities_are_dropped() {
        let mut lp = LinearProgram::minimize(vec![rat_int(1), rat_int(1)]);
        lp.set_all_nonnegative();
        lp.add_constraint(vec![rat_int(1), rat_int(1)], Relation::Eq, rat_int(2))
            .unwrap();
        lp.add_constraint(vec![rat_int(2), rat_int(2)], Relation::Eq, rat_int(4))
            .unwrap();
        let got = lp.solve();
        assert_eq!(outcome_value(&got), &rat_int(2));
    }

    #[test]
    fn degenerate_vertices_do_not_cycle() {
        // A classic degenerate instance; Bland's rule must terminate.
        let mut lp = LinearProgram::minimize(vec![
            rat(-3, 4),
            rat_int(150),
            rat(-1, 50),
            rat_int(6),
        ]);
        lp.set_all_nonnegative();
        lp.add_constraint(
            vec![rat(1, 4), rat_int(-60), rat(-1, 25), rat_int(9)],
            Relation::Le,
            rat_int(0),
        )
        .unwrap();
        lp.add_constraint(
            vec![rat(1, 2), rat_int(-90), rat(-1, 50), rat_int(3)],
            Relation::Le,
            rat_int(0),
        )
        .unwrap();
        lp.add_constraint(
            vec![rat_int(0), rat_int(0), rat_int(1), rat_int(0)],
            Relation::Le,
            rat_int(1),
        )
        .unwrap();
        let got = lp.solve();
        assert_eq!(outcome_value(&got), &rat(-1, 20));
    }

    #[test]
    fn negative_rhs_rows_are_normalized() {
        // minimize y with -x - y <= -2, x <= 1, everything non-negative:
        // y >= 2 - x >= 1.
        let mut lp = LinearProgram::minimize(vec![rat_int(0), rat_int(1)]);
        lp.set_all_nonnegative();
        lp.add_constraint(vec![rat_int(-1), rat_int(-1)], Relation::Le, rat_int(-2))
            .unwrap();
        lp.add_constraint(vec![rat_int(1), rat_int(0)], Relation::Le, rat_int(1))
            .unwrap();
        let got = lp.solve();
        assert_eq!(outcome_value(&got), &rat_int(1));
    }
}
