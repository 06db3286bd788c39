//! Dense two-phase simplex with Bland's rule, for the small boxed LPs of the
//! certification layer.

const EPS: f64 = 1e-10;

/// `maximize objective·x` subject to `a·x ≤ b` per row and `lower ≤ x ≤ upper`.
/// Lower bounds must be finite; upper bounds may be `+∞`.
#[derive(Debug, Clone)]
pub struct Lp {
    pub rows: Vec<(Vec<f64>, f64)>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub objective: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

struct Tableau {
    cols: usize,
    rows: Vec<Vec<f64>>, // each has `cols + 1` entries, the last being the rhs
    basis: Vec<usize>,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                row[c] = 0.0;
            }
        }
        self.basis[r] = c;
    }

    /// Maximizes `cost` over columns admitted by `allowed`. Returns false if unbounded.
    fn optimize(&mut self, cost: &[f64], allowed: impl Fn(usize) -> bool) -> bool {
        loop {
            let mut reduced = cost.to_vec();
            for (row, &b) in self.rows.iter().zip(&self.basis) {
                let cb = cost[b];
                if cb != 0.0 {
                    for (r, v) in reduced.iter_mut().zip(row) {
                        *r -= cb * v;
                    }
                }
            }
            let scale = cost.iter().fold(1.0f64, |m, c| m.max(c.abs()));
            let entering = (0..self.cols).find(|&j| allowed(j) && !self.basis.contains(&j) && reduced[j] > EPS * scale);
            let Some(c) = entering else {
                return true;
            };
            let mut leave: Option<(usize, f64)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[c] > EPS {
                    let ratio = row[self.cols] / row[c];
                    let better = match leave {
                        None => true,
                        Some((li, lr)) => {
                            let tie = (ratio - lr).abs() <= 1e-12 * lr.abs().max(1.0);
                            if tie {
                                self.basis[i] < self.basis[li]
                            } else {
                                ratio < lr
                            }
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, c),
                None => return false,
            }
        }
    }
}

impl Lp {
    pub fn solve(&self) -> LpOutcome {
        let n = self.objective.len();
        debug_assert!(self.lower.len() == n && self.upper.len() == n);
        // Shift to y = x − lower ≥ 0 and turn finite upper bounds into rows.
        let mut rows: Vec<(Vec<f64>, f64)> = Vec::with_capacity(self.rows.len() + n);
        for (a, b) in &self.rows {
            let shift: f64 = a.iter().zip(&self.lower).map(|(ai, li)| ai * li).sum();
            rows.push((a.clone(), b - shift));
        }
        for i in 0..n {
            if self.upper[i] < self.lower[i] {
                return LpOutcome::Infeasible;
            }
            if self.upper[i].is_finite() {
                let mut a = vec![0.0; n];
                a[i] = 1.0;
                rows.push((a, self.upper[i] - self.lower[i]));
            }
        }
        let m = rows.len();
        let negative: Vec<usize> = (0..m).filter(|&i| rows[i].1 < 0.0).collect();
        let k = negative.len();
        let cols = n + m + k;
        let mut tab = Tableau {
            cols,
            rows: Vec::with_capacity(m),
            basis: Vec::with_capacity(m),
        };
        let mut art = 0;
        for (i, (a, b)) in rows.iter().enumerate() {
            let mut row = vec![0.0; cols + 1];
            if *b < 0.0 {
                for (r, v) in row.iter_mut().zip(a) {
                    *r = -v;
                }
                row[n + i] = -1.0;
                row[n + m + art] = 1.0;
                row[cols] = -b;
                tab.basis.push(n + m + art);
                art += 1;
            } else {
                row[..n].copy_from_slice(a);
                row[n + i] = 1.0;
                row[cols] = *b;
                tab.basis.push(n + i);
            }
            tab.rows.push(row);
        }

        if k > 0 {
            let mut cost = vec![0.0; cols];
            for c in cost.iter_mut().skip(n + m) {
                *c = -1.0;
            }
            tab.optimize(&cost, |_| true);
            let infeas: f64 = tab
                .rows
                .iter()
                .zip(&tab.basis)
                .filter(|(_, &b)| b >= n + m)
                .map(|(r, _)| r[cols])
                .sum();
            let scale = rows.iter().fold(1.0f64, |s, (_, b)| s.max(b.abs()));
            if infeas > 1e-9 * scale {
                return LpOutcome::Infeasible;
            }
            // Drive zero-level artificials out of the basis; drop redundant rows.
            let mut i = 0;
            while i < tab.rows.len() {
                if tab.basis[i] >= n + m {
                    match (0..n + m).find(|&j| tab.rows[i][j].abs() > EPS) {
                        Some(j) => tab.pivot(i, j),
                        None => {
                            tab.rows.remove(i);
                            tab.basis.remove(i);
                            continue;
                        }
                    }
                }
                i += 1;
            }
        }

        let mut cost = vec![0.0; cols];
        cost[..n].copy_from_slice(&self.objective);
        if !tab.optimize(&cost, |j| j < n + m) {
            return LpOutcome::Unbounded;
        }
        let mut x = self.lower.clone();
        for (row, &b) in tab.rows.iter().zip(&tab.basis) {
            if b < n {
                x[b] += row[cols];
            }
        }
        // Clamp roundoff back into the box.
        for i in 0..n {
            x[i] = x[i].clamp(self.lower[i], self.upper[i]);
        }
        let value = x.iter().zip(&self.objective).map(|(a, b)| a * b).sum();
        LpOutcome::Optimal { x, value }
    }
}
