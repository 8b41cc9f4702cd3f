//! Dense two-phase simplex for the small linear programs behind the minimax
//! fits. Bland's rule keeps pivoting deterministic and cycle-free; problem
//! sizes here are a few hundred rows at most.

/// min c'x subject to A x <= b, x >= 0.
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, objective: f64 },
    Infeasible,
    Unbounded,
}

const RC_TOL: f64 = 1e-10;
const PIVOT_TOL: f64 = 1e-11;

struct Tableau {
    /// rows x (cols + 1); last column is the RHS.
    body: Vec<Vec<f64>>,
    /// objective row, same width as body rows.
    obj: Vec<f64>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.body[i][self.cols]
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let piv = self.body[row][col];
        debug_assert!(piv.abs() > PIVOT_TOL);
        let inv = 1.0 / piv;
        for v in self.body[row].iter_mut() {
            *v *= inv;
        }
        for i in 0..self.body.len() {
            if i == row {
                continue;
            }
            let factor = self.body[i][col];
            if factor != 0.0 {
                for j in 0..=self.cols {
                    self.body[i][j] -= factor * self.body[row][j];
                }
            }
        }
        let factor = self.obj[col];
        if factor != 0.0 {
            for j in 0..=self.cols {
                self.obj[j] -= factor * self.body[row][j];
            }
        }
        self.basis[row] = col;
    }

    /// Bland's rule: entering = lowest eligible column; leaving = among the
    /// minimum-ratio rows, the one whose basic variable has the lowest index.
    fn run(&mut self, eligible: impl Fn(usize) -> bool) -> Result<(), ()> {
        loop {
            let mut entering = None;
            for j in 0..self.cols {
                if eligible(j) && self.obj[j] < -RC_TOL {
                    entering = Some(j);
                    break;
                }
            }
            let Some(col) = entering else {
                return Ok(());
            };

            let mut best: Option<(f64, usize, usize)> = None; // (ratio, basis var, row)
            for i in 0..self.body.len() {
                let a = self.body[i][col];
                if a > PIVOT_TOL {
                    let ratio = self.rhs(i) / a;
                    let candidate = (ratio, self.basis[i], i);
                    best = match best {
                        None => Some(candidate),
                        Some(cur) => {
                            let tol = 1e-12 * (1.0 + cur.0.abs());
                            if ratio < cur.0 - tol
                                || (ratio <= cur.0 + tol && self.basis[i] < cur.1)
                            {
                                Some(candidate)
                            } else {
                                Some(cur)
                            }
                        }
                    };
                }
            }
            match best {
                Some((_, _, row)) => self.pivot(row, col),
                None => return Err(()), // unbounded in this column
            }
        }
    }
}

impl LinearProgram {
    pub fn solve(&self) -> LpOutcome {
        let m = self.rows.len();
        let n = self.objective.len();
        debug_assert!(self.rows.iter().all(|r| r.len() == n));
        debug_assert_eq!(self.rhs.len(), m);

        // Columns: n structural, m slacks, then one artificial per negated row.
        let negated: Vec<bool> = self.rhs.iter().map(|&b| b < 0.0).collect();
        let art_count = negated.iter().filter(|&&f| f).count();
        let cols = n + m + art_count;

        let mut body = vec![vec![0.0; cols + 1]; m];
        let mut basis = vec![0usize; m];
        let mut art_seen = 0;
        for i in 0..m {
            let sign = if negated[i] { -1.0 } else { 1.0 };
            for j in 0..n {
                body[i][j] = sign * self.rows[i][j];
            }
            body[i][n + i] = sign; // slack
            body[i][cols] = sign * self.rhs[i];
            if negated[i] {
                let art_col = n + m + art_seen;
                art_seen += 1;
                body[i][art_col] = 1.0;
                basis[i] = art_col;
            } else {
                basis[i] = n + i;
            }
        }

        let mut tab = Tableau {
            body,
            obj: vec![0.0; cols + 1],
            basis,
            cols,
        };

        // Phase 1: minimize the sum of artificials.
        if art_count > 0 {
            for j in (n + m)..cols {
                tab.obj[j] = 1.0;
            }
            for i in 0..m {
                if tab.basis[i] >= n + m {
                    for j in 0..=cols {
                        let v = tab.body[i][j];
                        tab.obj[j] -= v;
                    }
                }
            }
            if tab.run(|_| true).is_err() {
                // Phase-1 objective is bounded below by zero; a ratio-test
                // failure here means numerical trouble, treat as infeasible.
                return LpOutcome::Infeasible;
            }
            if -tab.obj[cols] > 1e-8 {
                return LpOutcome::Infeasible;
            }
            // Drive leftover artificials out of the basis.
            for i in 0..m {
                if tab.basis[i] >= n + m {
                    if let Some(col) = (0..n + m).find(|&j| tab.body[i][j].abs() > PIVOT_TOL) {
                        tab.pivot(i, col);
                    }
                }
            }
        }

        // Phase 2: minimize the real objective; artificial columns frozen.
        for j in 0..=cols {
            tab.obj[j] = 0.0;
        }
        for j in 0..n {
            tab.obj[j] = self.objective[j];
        }
        for i in 0..m {
            let b = tab.basis[i];
            if b < n {
                let cost = self.objective[b];
                if cost != 0.0 {
                    for j in 0..=cols {
                        tab.obj[j] -= cost * tab.body[i][j];
                    }
                }
            }
        }
        let art_start = n + m; // artificial columns stay out of phase 2
        if tab.run(|j| j < art_start).is_err() {
            return LpOutcome::Unbounded;
        }

        let mut x = vec![0.0; n];
        for i in 0..m {
            if tab.basis[i] < n {
                x[tab.basis[i]] = tab.rhs(i);
            }
        }
        let objective = x
            .iter()
            .zip(&self.objective)
            .map(|(xi, ci)| xi * ci)
            .sum();
        LpOutcome::Optimal { x, objective }
    }
}
