//! A self-contained dense simplex solver for box-constrained maximization:
//!
//! ```text
//!     maximize    cᵀx
//!     subject to  Ax ≤ b,   0 ≤ x_j ≤ u_j
//! ```
//!
//! This is the textbook bounded-variable primal simplex on a dense tableau:
//! the slack basis starts feasible (right-hand sides must be non-negative;
//! there is no phase 1), nonbasic variables sit at either bound, and the
//! ratio test allows a basic variable to hit its lower or upper bound or the
//! entering variable to flip bounds without a pivot. Entering variables are
//! chosen by largest reduced cost, falling back to Bland's smallest-index
//! rule after enough iterations to rule out cycling. Desk-scale instances
//! only — a few hundred rows and columns.
//!
//! Every solve is certified before it is returned: the dual vector read off
//! the final cost row must close the duality gap to within
//! [`DUALITY_GAP_TOLERANCE`] (relative), and the primal point must satisfy
//! all constraints to the same precision. A solve that cannot produce the
//! certificate fails loudly rather than returning a dubious optimum.

use crate::error::{Error, Result};

/// Relative duality-gap and feasibility tolerance of the certificate.
pub const DUALITY_GAP_TOLERANCE: f64 = 1e-7;

const PIVOT_TOLERANCE: f64 = 1e-9;
const REDUCED_COST_TOLERANCE: f64 = 1e-9;

/// `maximize cᵀx  s.t.  Ax ≤ b, 0 ≤ x ≤ u`. Upper bounds may be
/// `f64::INFINITY`; right-hand sides must be non-negative so the slack
/// basis is feasible.
#[derive(Clone, Debug)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub constraints: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
    pub upper_bounds: Vec<f64>,
}

/// A certified optimum.
#[derive(Clone, Debug)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    /// Dual multipliers of the `Ax ≤ b` rows, all non-negative.
    pub dual: Vec<f64>,
    /// Certified `|dual objective − primal objective|`.
    pub duality_gap: f64,
    pub iterations: usize,
}

impl LinearProgram {
    fn validate(&self) -> Result<()> {
        let n = self.objective.len();
        if n == 0 {
            return Err(Error::InvalidParameter("LP has no variables".into()));
        }
        if self.upper_bounds.len() != n {
            return Err(Error::InvalidParameter(format!(
                "{} upper bounds for {n} variables",
                self.upper_bounds.len()
            )));
        }
        if self.constraints.len() != self.rhs.len() {
            return Err(Error::InvalidParameter(format!(
                "{} constraint rows but {} right-hand sides",
                self.constraints.len(),
                self.rhs.len()
            )));
        }
        for c in &self.objective {
            if !c.is_finite() {
                return Err(Error::InvalidParameter("objective must be finite".into()));
            }
        }
        for u in &self.upper_bounds {
            if u.is_nan() || *u < 0.0 {
                return Err(Error::InvalidParameter(format!("invalid upper bound {u}")));
            }
        }
        for (row, b) in self.constraints.iter().zip(&self.rhs) {
            if row.len() != n {
                return Err(Error::InvalidParameter(format!(
                    "constraint row of width {} in an LP with {n} variables",
                    row.len()
                )));
            }
            if row.iter().any(|a| !a.is_finite()) {
                return Err(Error::InvalidParameter("constraint entries must be finite".into()));
            }
            if !b.is_finite() || *b < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "right-hand side {b} must be finite and non-negative (slack start)"
                )));
            }
        }
        Ok(())
    }
}

/// Solve to certified optimality.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution> {
    lp.validate()?;
    let n = lp.objective.len();
    let m = lp.constraints.len();
    let cols = n + m; // structural variables then slacks

    // Dense tableau rows of B⁻¹[A | I], reduced-cost row, and the current
    // values of basic variables (not the raw rhs — bounds shift it).
    let mut tab = vec![0.0f64; m * cols];
    for (i, row) in lp.constraints.iter().enumerate() {
        tab[i * cols..i * cols + n].copy_from_slice(row);
        tab[i * cols + n + i] = 1.0;
    }
    let mut reduced: Vec<f64> = lp.objective.iter().copied().chain(std::iter::repeat(0.0)).take(cols).collect();
    let mut basic_value: Vec<f64> = lp.rhs.clone();
    let mut basis: Vec<usize> = (n..cols).collect();
    let mut in_basis = vec![false; cols];
    for &j in &basis {
        in_basis[j] = true;
    }
    let mut at_upper = vec![false; cols];

    let upper = |j: usize| -> f64 {
        if j < n {
            lp.upper_bounds[j]
        } else {
            f64::INFINITY
        }
    };

    let bland_after = 10 * (cols + m) + 50;
    let max_iterations = 100 * (cols + m) + 10_000;
    let mut iterations = 0usize;

    loop {
        // Entering variable: a nonbasic column whose reduced cost improves
        // the objective in the direction its bound allows.
        let eligible = |j: usize| -> bool {
            if in_basis[j] {
                return false;
            }
            if at_upper[j] {
                reduced[j] < -REDUCED_COST_TOLERANCE
            } else {
                reduced[j] > REDUCED_COST_TOLERANCE
            }
        };
        let entering = if iterations < bland_after {
            (0..cols)
                .filter(|&j| eligible(j))
                .max_by(|&a, &b| {
                    reduced[a]
                        .abs()
                        .partial_cmp(&reduced[b].abs())
                        .expect("finite reduced costs")
                        .then(b.cmp(&a)) // prefer the smaller index on ties
                })
        } else {
            (0..cols).find(|&j| eligible(j))
        };
        let Some(e) = entering else { break };

        iterations += 1;
        if iterations > max_iterations {
            return Err(Error::Solver(format!(
                "simplex did not converge within {max_iterations} iterations \
                 ({m} rows, {n} variables)"
            )));
        }

        // Direction: +1 if the entering variable rises off its lower bound,
        // -1 if it falls off its upper bound.
        let sigma = if at_upper[e] { -1.0 } else { 1.0 };

        // Ratio test: the entering variable moves by t ≥ 0; basic variable
        // i changes by -sigma·t·tab[i][e] and must stay inside its bounds;
        // the entering variable itself may at most traverse its own range.
        let mut t_best = upper(e); // bound-flip candidate (may be ∞)
        let mut leaving: Option<(usize, bool)> = None; // (row, leaves at upper)
        for i in 0..m {
            let coeff = sigma * tab[i * cols + e];
            if coeff > PIVOT_TOLERANCE {
                // Basic variable decreases towards its lower bound 0.
                let t = basic_value[i] / coeff;
                if t < t_best {
                    t_best = t;
                    leaving = Some((i, false));
                }
            } else if coeff < -PIVOT_TOLERANCE {
                let ub = upper(basis[i]);
                if ub.is_finite() {
                    // Basic variable increases towards its upper bound.
                    let t = (ub - basic_value[i]) / (-coeff);
                    if t < t_best {
                        t_best = t;
                        leaving = Some((i, true));
                    }
                }
            }
        }

        if t_best.is_infinite() {
            return Err(Error::Solver(format!(
                "objective unbounded along variable {e} after {iterations} iterations"
            )));
        }
        let t = t_best.max(0.0);

        // Shift all basic values along the chosen direction.
        for i in 0..m {
            basic_value[i] -= sigma * t * tab[i * cols + e];
        }

        match leaving {
            None => {
                // Bound flip: the entering variable crosses its whole range;
                // the basis is unchanged.
                at_upper[e] = !at_upper[e];
            }
            Some((r, leaves_at_upper)) => {
                let new_value = if at_upper[e] { upper(e) - t } else { t };
                let old = basis[r];
                in_basis[old] = false;
                at_upper[old] = leaves_at_upper;
                basis[r] = e;
                in_basis[e] = true;
                at_upper[e] = false; // basic variables carry their own value
                basic_value[r] = new_value;

                // Gauss–Jordan elimination on column e.
                let pivot = tab[r * cols + e];
                debug_assert!(pivot.abs() > PIVOT_TOLERANCE * 0.5);
                let inv = 1.0 / pivot;
                for j in 0..cols {
                    tab[r * cols + j] *= inv;
                }
                for i in 0..m {
                    if i == r {
                        continue;
                    }
                    let factor = tab[i * cols + e];
                    if factor != 0.0 {
                        for j in 0..cols {
                            tab[i * cols + j] -= factor * tab[r * cols + j];
                        }
                    }
                }
                let factor = reduced[e];
                if factor != 0.0 {
                    for j in 0..cols {
                        reduced[j] -= factor * tab[r * cols + j];
                    }
                }
            }
        }
    }

    // Assemble the primal point.
    let mut x = vec![0.0f64; n];
    for j in 0..n {
        if !in_basis[j] && at_upper[j] {
            x[j] = lp.upper_bounds[j];
        }
    }
    for (i, &j) in basis.iter().enumerate() {
        if j < n {
            x[j] = basic_value[i].clamp(0.0, lp.upper_bounds[j]);
        }
    }
    let objective: f64 = x.iter().zip(&lp.objective).map(|(xi, ci)| xi * ci).sum();

    // Certificate. Duals come off the slack columns of the final cost row;
    // everything below is recomputed from the original data, not the
    // drifted tableau.
    let dual: Vec<f64> = (0..m).map(|i| (-reduced[n + i]).max(0.0)).collect();
    let scale = 1.0 + objective.abs();
    for (i, row) in lp.constraints.iter().enumerate() {
        let lhs: f64 = row.iter().zip(&x).map(|(a, xi)| a * xi).sum();
        if lhs > lp.rhs[i] + DUALITY_GAP_TOLERANCE * (1.0 + lp.rhs[i].abs()) {
            return Err(Error::Solver(format!(
                "row {i} infeasible by {} after {iterations} iterations",
                lhs - lp.rhs[i]
            )));
        }
    }
    let mut dual_objective: f64 = dual.iter().zip(&lp.rhs).map(|(y, b)| y * b).sum();
    for j in 0..n {
        let mut slack_cost = lp.objective[j];
        for (i, row) in lp.constraints.iter().enumerate() {
            slack_cost -= dual[i] * row[j];
        }
        if slack_cost > 0.0 {
            if lp.upper_bounds[j].is_infinite() {
                // Genuinely positive reduced cost on an unbounded variable
                // would mean an unbounded dual term; rounding residue is not.
                if slack_cost > DUALITY_GAP_TOLERANCE * scale {
                    return Err(Error::Solver(format!(
                        "dual certificate failed: unbounded variable {j} has positive \
                         reduced cost {slack_cost} after {iterations} iterations"
                    )));
                }
            } else {
                dual_objective += slack_cost * lp.upper_bounds[j];
            }
        }
    }
    let duality_gap = (dual_objective - objective).abs();
    if duality_gap > DUALITY_GAP_TOLERANCE * scale {
        return Err(Error::Solver(format!(
            "duality gap {duality_gap} exceeds {} after {iterations} iterations",
            DUALITY_GAP_TOLERANCE * scale
        )));
    }

    Ok(LpSolution { x, objective, dual, duality_gap, iterations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn lp(
        objective: Vec<f64>,
        constraints: Vec<Vec<f64>>,
        rhs: Vec<f64>,
        upper_bounds: Vec<f64>,
    ) -> LinearProgram {
        LinearProgram { objective, constraints, rhs, upper_bounds }
    }

    #[test]
    fn one_row_knapsack_takes_the_better_profit() {
        let sol = solve_lp(&lp(
            vec![3.0, 2.0],
            vec![vec![1.0, 1.0]],
            vec![1.0],
            vec![1.0, 1.0],
        ))
        .unwrap();
        assert!((sol.objective - 3.0).abs() < 1e-9);
        assert!((sol.x[0] - 1.0).abs() < 1e-9);
        assert!(sol.x[1].abs() < 1e-9);
    }

    #[test]
    fn zero_objective_is_zero() {
        let sol = solve_lp(&lp(
            vec![0.0, 0.0],
            vec![vec![1.0, 1.0]],
            vec![1.0],
            vec![1.0, 1.0],
        ))
        .unwrap();
        assert_eq!(sol.objective, 0.0);
    }

    #[test]
    fn slack_capacity_saturates_upper_bounds() {
        // Non-binding row: both variables ride to their upper bounds via
        // bound flips.
        let sol = solve_lp(&lp(
            vec![5.0, 4.0],
            vec![vec![1.0, 1.0]],
            vec![100.0],
            vec![1.0, 1.0],
        ))
        .unwrap();
        assert!((sol.objective - 9.0).abs() < 1e-9);

        let sol = solve_lp(&lp(
            vec![5.0, 4.0],
            vec![vec![1.0, 1.0]],
            vec![100.0],
            vec![0.5, 0.5],
        ))
        .unwrap();
        assert!((sol.objective - 4.5).abs() < 1e-9);
    }

    #[test]
    fn fractional_vertex_with_unbounded_variables() {
        // max x1 + x2  s.t. 2x1 + x2 ≤ 2, x1 + 2x2 ≤ 2: optimum (2/3, 2/3).
        let sol = solve_lp(&lp(
            vec![1.0, 1.0],
            vec![vec![2.0, 1.0], vec![1.0, 2.0]],
            vec![2.0, 2.0],
            vec![f64::INFINITY, f64::INFINITY],
        ))
        .unwrap();
        assert!((sol.objective - 4.0 / 3.0).abs() < 1e-9);
        assert!((sol.x[0] - 2.0 / 3.0).abs() < 1e-9);
        assert!((sol.x[1] - 2.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn unbounded_ray_is_reported() {
        let err = solve_lp(&lp(
            vec![1.0],
            vec![vec![-1.0]],
            vec![1.0],
            vec![f64::INFINITY],
        ))
        .unwrap_err();
        assert!(matches!(err, Error::Solver(_)));
    }

    #[test]
    fn degenerate_start_terminates() {
        // Classic cycling-prone shape: zero right-hand sides force
        // degenerate pivots until Bland's rule breaks the tie pattern.
        let sol = solve_lp(&lp(
            vec![0.75, -150.0, 0.02, -6.0],
            vec![
                vec![0.25, -60.0, -0.04, 9.0],
                vec![0.5, -90.0, -0.02, 3.0],
                vec![0.0, 0.0, 1.0, 0.0],
            ],
            vec![0.0, 0.0, 1.0],
            vec![f64::INFINITY; 4],
        ))
        .unwrap();
        assert!((sol.objective - 0.05).abs() < 1e-9, "got {}", sol.objective);
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        assert!(solve_lp(&lp(vec![], vec![], vec![], vec![])).is_err());
        // Negative rhs (no phase 1).
        assert!(solve_lp(&lp(vec![1.0], vec![vec![1.0]], vec![-1.0], vec![1.0])).is_err());
        // Ragged row.
        assert!(solve_lp(&lp(vec![1.0, 1.0], vec![vec![1.0]], vec![1.0], vec![1.0, 1.0]))
            .is_err());
        // NaN bound.
        assert!(solve_lp(&lp(vec![1.0], vec![vec![1.0]], vec![1.0], vec![f64::NAN])).is_err());
    }

    /// The certificate itself is the oracle here: weak duality means any
    /// feasible dual bounds the optimum from above, so a closed gap proves
    /// optimality independently of the pivoting path.
    #[test]
    fn random_boxes_certify_and_dominate_integral_greedy() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..300 {
            let n = rng.gen_range(1..7);
            let m = rng.gen_range(1..5);
            let objective: Vec<f64> =
                (0..n).map(|_| rng.gen_range(0..=64) as f64 / 16.0).collect();
            let constraints: Vec<Vec<f64>> = (0..m)
                .map(|_| (0..n).map(|_| rng.gen_range(0..=16) as f64 / 16.0).collect())
                .collect();
            let rhs: Vec<f64> = (0..m).map(|_| rng.gen_range(1..=32) as f64 / 16.0).collect();
            let upper_bounds = vec![1.0; n];
            let prog = lp(objective.clone(), constraints.clone(), rhs.clone(), upper_bounds);
            let sol = solve_lp(&prog).expect("solvable box LP");
            assert!(sol.duality_gap <= DUALITY_GAP_TOLERANCE * (1.0 + sol.objective.abs()));
            assert!(sol.dual.iter().all(|y| *y >= 0.0));
            for (xj, _) in sol.x.iter().zip(&objective) {
                assert!(*xj >= -1e-12 && *xj <= 1.0 + 1e-12);
            }

            // Greedy integral packing by profit is feasible, so the LP
            // optimum must dominate it.
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|a, b| objective[*b].partial_cmp(&objective[*a]).unwrap());
            let mut usage = vec![0.0; m];
            let mut greedy = 0.0;
            for j in order {
                let fits =
                    (0..m).all(|i| usage[i] + constraints[i][j] <= rhs[i]);
                if fits {
                    for i in 0..m {
                        usage[i] += constraints[i][j];
                    }
                    greedy += objective[j];
                }
            }
            assert!(sol.objective >= greedy - 1e-7);
        }
    }
}
