//! Dense bounded-variable tableau simplex.
//!
//! Every row `i` of the problem becomes `Σ a_ij x_j + s_i = 0` with a logical
//! column `s_i` carrying the row bounds, so the logicals form the initial
//! basis. Rows are scaled by their largest coefficient. The tableau keeps
//! `B⁻¹[A I]` together with the reduced costs and the values of every column;
//! nonbasic columns always sit exactly on one of their bounds (or at zero
//! when free).

use crate::model::{FlatExpr, FlatMilp, Sense};

const PIVOT_TOL: f64 = 1e-9;
const DROP_TOL: f64 = 1e-13;
const DEGENERATE_STEP: f64 = 1e-12;
/// Consecutive degenerate pivots before switching to Bland's rule.
const BLAND_AFTER: usize = 50;
const REFRESH_EVERY: usize = 100;
const NONBASIC: usize = usize::MAX;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum LpOutcome {
    Optimal,
    /// Columns whose basic value could not be brought within bounds.
    Infeasible(Vec<usize>),
    Unbounded,
    IterationLimit,
}

#[derive(Debug, Clone)]
pub(crate) struct Simplex {
    n: usize,
    m: usize,
    nc: usize,
    t: Vec<f64>,
    d: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    x: Vec<f64>,
    basis: Vec<usize>,
    row_of: Vec<usize>,
    feas_tol: f64,
    opt_tol: f64,
    degenerate_run: usize,
    since_refresh: usize,
    pub iterations: usize,
}

impl Simplex {
    pub fn new(milp: &FlatMilp, objective: &FlatExpr, feas_tol: f64) -> Self {
        let n = milp.vars.len();
        let m = milp.rows.len();
        let nc = n + m;
        let mut t = vec![0.0; m * nc];
        let mut lower = Vec::with_capacity(nc);
        let mut upper = Vec::with_capacity(nc);
        for v in &milp.vars {
            lower.push(v.lower);
            upper.push(v.upper);
        }
        for (i, row) in milp.rows.iter().enumerate() {
            let scale = row.coeffs.iter().fold(0.0f64, |s, &(_, a)| s.max(a.abs()));
            let scale = if scale > 0.0 { scale } else { 1.0 };
            let base = i * nc;
            for &(j, a) in &row.coeffs {
                t[base + j] += a / scale;
            }
            t[base + n + i] = 1.0;
            let b = row.rhs / scale;
            let (lo, hi) = match row.sense {
                Sense::Le => (-b, f64::INFINITY),
                Sense::Ge => (f64::NEG_INFINITY, -b),
                Sense::Eq => (-b, -b),
            };
            lower.push(lo);
            upper.push(hi);
        }

        let mut cost = vec![0.0; nc];
        for &(j, a) in &objective.coeffs {
            cost[j] += a;
        }
        let cscale = cost.iter().fold(0.0f64, |s, c| s.max(c.abs()));
        if cscale > 0.0 {
            cost.iter_mut().for_each(|c| *c /= cscale);
        }

        let mut x = vec![0.0; nc];
        for j in 0..n {
            x[j] = if lower[j].is_finite() {
                lower[j]
            } else if upper[j].is_finite() {
                upper[j]
            } else {
                0.0
            };
        }
        let mut row_of = vec![NONBASIC; nc];
        let mut basis = Vec::with_capacity(m);
        for i in 0..m {
            basis.push(n + i);
            row_of[n + i] = i;
        }
        let mut s = Simplex {
            n,
            m,
            nc,
            t,
            d: cost,
            lower,
            upper,
            x,
            basis,
            row_of,
            feas_tol,
            opt_tol: 1e-9,
            degenerate_run: 0,
            since_refresh: 0,
            iterations: 0,
        };
        s.refresh_basic_values();
        s
    }

    #[inline]
    fn row(&self, i: usize) -> &[f64] {
        &self.t[i * self.nc..(i + 1) * self.nc]
    }

    fn tol(&self, bound: f64) -> f64 {
        self.feas_tol * (1.0 + bound.abs())
    }

    /// Structural column values.
    pub fn values(&self) -> &[f64] {
        &self.x[..self.n]
    }

    /// Row index for a logical column, `None` for structural columns.
    pub fn logical_row(&self, col: usize) -> Option<usize> {
        col.checked_sub(self.n)
    }

    /// Signed bound violation of column `j`: negative below, positive above.
    fn violation(&self, j: usize) -> f64 {
        let v = self.x[j];
        if v < self.lower[j] - self.tol(self.lower[j]) {
            v - self.lower[j]
        } else if v > self.upper[j] + self.tol(self.upper[j]) {
            v - self.upper[j]
        } else {
            0.0
        }
    }

    fn refresh_basic_values(&mut self) {
        let active: Vec<(usize, f64)> = (0..self.nc)
            .filter(|&j| self.row_of[j] == NONBASIC && self.x[j] != 0.0)
            .map(|j| (j, self.x[j]))
            .collect();
        for i in 0..self.m {
            let row = self.row(i);
            let s: f64 = active.iter().map(|&(j, v)| row[j] * v).sum();
            let b = self.basis[i];
            self.x[b] = -s;
        }
        self.since_refresh = 0;
    }

    /// Changes the bounds of column `j`. A nonbasic column moves to the bound
    /// that keeps its reduced cost dual feasible.
    pub fn set_bounds(&mut self, j: usize, lower: f64, upper: f64) {
        self.lower[j] = lower;
        self.upper[j] = upper;
        if self.row_of[j] != NONBASIC {
            return;
        }
        let target = if lower == upper {
            lower
        } else if self.d[j] >= 0.0 {
            if lower.is_finite() { lower } else if upper.is_finite() { upper } else { 0.0 }
        } else if upper.is_finite() {
            upper
        } else if lower.is_finite() {
            lower
        } else {
            0.0
        };
        let delta = target - self.x[j];
        if delta != 0.0 {
            self.x[j] = target;
            for i in 0..self.m {
                let a = self.t[i * self.nc + j];
                if a != 0.0 {
                    let b = self.basis[i];
                    self.x[b] -= a * delta;
                }
            }
        }
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let nc = self.nc;
        let piv = self.t[r * nc + q];
        let mut nz: Vec<(usize, f64)> = Vec::new();
        {
            let row = &mut self.t[r * nc..(r + 1) * nc];
            for (k, v) in row.iter_mut().enumerate() {
                if *v != 0.0 {
                    *v /= piv;
                    if v.abs() < DROP_TOL {
                        *v = 0.0;
                    } else {
                        nz.push((k, *v));
                    }
                }
            }
            row[q] = 1.0;
        }
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let base = i * nc;
            let f = self.t[base + q];
            if f == 0.0 {
                continue;
            }
            let row = &mut self.t[base..base + nc];
            for &(k, v) in &nz {
                let nv = row[k] - f * v;
                row[k] = if nv.abs() < DROP_TOL { 0.0 } else { nv };
            }
            row[q] = 0.0;
        }
        let f = self.d[q];
        if f != 0.0 {
            for &(k, v) in &nz {
                self.d[k] -= f * v;
            }
        }
        self.d[q] = 0.0;
        let leaving = self.basis[r];
        self.row_of[leaving] = NONBASIC;
        self.basis[r] = q;
        self.row_of[q] = r;
        self.iterations += 1;
        self.since_refresh += 1;
    }

    /// Moves nonbasic `q` by `step` and updates basic values accordingly.
    fn shift(&mut self, q: usize, step: f64) {
        if step == 0.0 {
            return;
        }
        self.x[q] += step;
        for i in 0..self.m {
            let a = self.t[i * self.nc + q];
            if a != 0.0 {
                let b = self.basis[i];
                self.x[b] -= a * step;
            }
        }
    }

    fn infeasible_basics(&self) -> Vec<usize> {
        self.basis.iter().copied().filter(|&b| self.violation(b) != 0.0).collect()
    }

    /// Primal simplex; runs a composite phase 1 while basic columns violate
    /// their bounds, then optimizes the cost.
    pub fn primal(&mut self, max_iter: usize) -> LpOutcome {
        let mut d1 = vec![0.0; self.nc];
        loop {
            if self.iterations >= max_iter {
                return LpOutcome::IterationLimit;
            }
            if self.since_refresh >= REFRESH_EVERY {
                self.refresh_basic_values();
            }
            let mut phase1 = false;
            d1.iter_mut().for_each(|v| *v = 0.0);
            for i in 0..self.m {
                let viol = self.violation(self.basis[i]);
                if viol == 0.0 {
                    continue;
                }
                phase1 = true;
                // gradient of the infeasibility sum w.r.t. the nonbasics
                let g = if viol < 0.0 { 1.0 } else { -1.0 };
                let row = &self.t[i * self.nc..(i + 1) * self.nc];
                for (k, &a) in row.iter().enumerate() {
                    if a != 0.0 {
                        d1[k] += g * a;
                    }
                }
            }
            let bland = self.degenerate_run >= BLAND_AFTER;
            let price: &[f64] = if phase1 { &d1 } else { &self.d };

            let mut entering: Option<(usize, f64)> = None;
            let mut best = 0.0;
            for j in 0..self.nc {
                if self.row_of[j] != NONBASIC || self.lower[j] == self.upper[j] {
                    continue;
                }
                let dj = price[j];
                let dir = if dj < -self.opt_tol && self.x[j] < self.upper[j] {
                    1.0
                } else if dj > self.opt_tol && self.x[j] > self.lower[j] {
                    -1.0
                } else {
                    continue;
                };
                if bland {
                    entering = Some((j, dir));
                    break;
                }
                if dj.abs() > best {
                    best = dj.abs();
                    entering = Some((j, dir));
                }
            }
            let Some((q, dir)) = entering else {
                if phase1 {
                    return LpOutcome::Infeasible(self.infeasible_basics());
                }
                return LpOutcome::Optimal;
            };

            match self.primal_ratio(q, dir, phase1, bland) {
                None => {
                    if phase1 {
                        // cannot happen for a strictly improving phase-1 column
                        return LpOutcome::Infeasible(self.infeasible_basics());
                    }
                    return LpOutcome::Unbounded;
                }
                Some(Step::Flip(theta)) => {
                    self.shift(q, dir * theta);
                    self.x[q] = if dir > 0.0 { self.upper[q] } else { self.lower[q] };
                    self.iterations += 1;
                    self.degenerate_run = 0;
                }
                Some(Step::Pivot { row, theta, to }) => {
                    self.shift(q, dir * theta);
                    let leaving = self.basis[row];
                    self.pivot(row, q);
                    self.x[leaving] = to;
                    if theta <= DEGENERATE_STEP {
                        self.degenerate_run += 1;
                    } else {
                        self.degenerate_run = 0;
                    }
                }
            }
        }
    }

    fn primal_ratio(&self, q: usize, dir: f64, phase1: bool, bland: bool) -> Option<Step> {
        // (row, exact limit, |alpha|, bound the leaving column lands on)
        let mut cands: Vec<(usize, f64, f64, f64)> = Vec::new();
        let mut relaxed = f64::INFINITY;
        for i in 0..self.m {
            let a = self.t[i * self.nc + q];
            if a.abs() <= PIVOT_TOL {
                continue;
            }
            let b = self.basis[i];
            let rate = -dir * a;
            let (xb, lo, hi) = (self.x[b], self.lower[b], self.upper[b]);
            let below = xb < lo - self.tol(lo);
            let above = xb > hi + self.tol(hi);
            let (limit, slack, to) = if phase1 && below {
                if rate > 0.0 {
                    ((lo - xb) / rate, 0.0, lo)
                } else {
                    continue;
                }
            } else if phase1 && above {
                if rate < 0.0 {
                    ((xb - hi) / -rate, 0.0, hi)
                } else {
                    continue;
                }
            } else if rate < 0.0 {
                if !lo.is_finite() {
                    continue;
                }
                (((xb - lo) / -rate).max(0.0), self.tol(lo) / -rate, lo)
            } else {
                if !hi.is_finite() {
                    continue;
                }
                (((hi - xb) / rate).max(0.0), self.tol(hi) / rate, hi)
            };
            relaxed = relaxed.min(limit + slack);
            cands.push((i, limit, a.abs(), to));
        }
        let flip = self.upper[q] - self.lower[q];

        let chosen = if bland {
            let min = cands.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
            cands
                .iter()
                .filter(|c| c.1 <= min)
                .min_by_key(|c| self.basis[c.0])
                .copied()
        } else {
            // Harris: among limits within the relaxed bound pick the largest pivot
            cands
                .iter()
                .filter(|c| c.1 <= relaxed)
                .max_by(|a, b| a.2.total_cmp(&b.2).then(b.0.cmp(&a.0)))
                .copied()
        };
        match chosen {
            Some((row, theta, _, to)) if theta < flip => Some(Step::Pivot { row, theta, to }),
            _ if flip.is_finite() => Some(Step::Flip(flip)),
            Some((row, theta, _, to)) => Some(Step::Pivot { row, theta, to }),
            None => None,
        }
    }

    /// Dual simplex from a dual feasible basis. Returns `Optimal` once every
    /// basic column is within bounds; callers finish with [`Simplex::primal`].
    pub fn dual(&mut self, max_iter: usize) -> LpOutcome {
        loop {
            if self.iterations >= max_iter {
                return LpOutcome::IterationLimit;
            }
            if self.since_refresh >= REFRESH_EVERY {
                self.refresh_basic_values();
            }
            let bland = self.degenerate_run >= BLAND_AFTER;
            let mut leave: Option<(usize, f64)> = None;
            let mut worst = 0.0;
            for i in 0..self.m {
                let b = self.basis[i];
                let viol = self.violation(b);
                if viol == 0.0 {
                    continue;
                }
                if bland {
                    if leave.map_or(true, |(r, _)| b < self.basis[r]) {
                        leave = Some((i, viol));
                    }
                    continue;
                }
                let rel = viol.abs() / (1.0 + if viol < 0.0 { self.lower[b] } else { self.upper[b] }.abs());
                if rel > worst {
                    worst = rel;
                    leave = Some((i, viol));
                }
            }
            let Some((r, viol)) = leave else {
                return LpOutcome::Optimal;
            };
            let b = self.basis[r];
            let (target, need_up) = if viol < 0.0 { (self.lower[b], true) } else { (self.upper[b], false) };

            let row = self.row(r);
            let mut best: Option<(usize, f64, f64)> = None;
            for j in 0..self.nc {
                if self.row_of[j] != NONBASIC || self.lower[j] == self.upper[j] {
                    continue;
                }
                let a = row[j];
                if a.abs() <= PIVOT_TOL {
                    continue;
                }
                // x_b moves by -a per unit increase of x_j
                let inc = (need_up && a < 0.0) || (!need_up && a > 0.0);
                let ok = if inc { self.x[j] < self.upper[j] } else { self.x[j] > self.lower[j] };
                if !ok {
                    continue;
                }
                let ratio = self.d[j].abs() / a.abs();
                let better = match best {
                    None => true,
                    Some((bj, br, ba)) => {
                        if bland {
                            ratio < br - 1e-12 || (ratio <= br + 1e-12 && j < bj)
                        } else {
                            ratio < br - 1e-12 || (ratio <= br + 1e-12 && a.abs() > ba)
                        }
                    }
                };
                if better {
                    best = Some((j, ratio, a.abs()));
                }
            }
            let Some((q, ratio, _)) = best else {
                return LpOutcome::Infeasible(vec![b]);
            };
            let a = self.t[r * self.nc + q];
            let step = (self.x[b] - target) / a;
            self.shift(q, step);
            self.pivot(r, q);
            self.x[b] = target;
            if ratio <= DEGENERATE_STEP {
                self.degenerate_run += 1;
            } else {
                self.degenerate_run = 0;
            }
        }
    }

    /// Dual simplex followed by a primal clean-up pass.
    pub fn reoptimize(&mut self, max_iter: usize) -> LpOutcome {
        match self.dual(max_iter) {
            LpOutcome::Optimal => self.primal(max_iter),
            other => other,
        }
    }
}

enum Step {
    Flip(f64),
    Pivot { row: usize, theta: f64, to: f64 },
}
