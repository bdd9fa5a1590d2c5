//! Sparse linear programs and a bounded-variable revised simplex.
//!
//! Every row `lower <= a·x <= upper` gets a logical column `s = a·x` so the
//! working system is `[A  -I] [x; s] = 0` with bounds on all `n + m` columns.
//! The initial basis is the logical one, phase 1 minimizes the sum of bound
//! violations of basic columns, phase 2 minimizes the (sign-adjusted)
//! objective. The basis inverse is kept dense and refreshed by Gauss-Jordan
//! elimination every [`REFACTOR_PERIOD`] pivots.
//!
//! Duals follow the sensitivity convention: `dual[r]` is the rate of change
//! of the optimal objective (in the model's own sense) per unit increase of
//! the active bound of row `r`, and `reduced_costs[j]` the same for the
//! active bound of variable `j`. With that convention
//! `objective = constant + Σ dual·row_bound + Σ reduced_cost·var_bound`
//! over the active bounds.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const INF: f64 = f64::INFINITY;

const REFACTOR_PERIOD: usize = 64;
const PIVOT_TOL: f64 = 1e-7;
const DUAL_TOL: f64 = 1e-9;
const STALL_LIMIT: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Variable {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub coeffs: Vec<(usize, f64)>,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Objective {
    pub sense: Sense,
    pub coeffs: Vec<(usize, f64)>,
    pub constant: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearProgram {
    pub name: String,
    pub variables: Vec<Variable>,
    pub constraints: Vec<Constraint>,
    pub objective: Objective,
}

impl LinearProgram {
    pub fn new(name: impl Into<String>, sense: Sense) -> Self {
        Self {
            name: name.into(),
            variables: Vec::new(),
            constraints: Vec::new(),
            objective: Objective {
                sense,
                coeffs: Vec::new(),
                constant: 0.0,
            },
        }
    }

    pub fn add_var(&mut self, name: impl Into<String>, lower: f64, upper: f64) -> usize {
        self.variables.push(Variable {
            name: name.into(),
            lower,
            upper,
        });
        self.variables.len() - 1
    }

    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        coeffs: Vec<(usize, f64)>,
        lower: f64,
        upper: f64,
    ) -> usize {
        self.constraints.push(Constraint {
            name: name.into(),
            coeffs,
            lower,
            upper,
        });
        self.constraints.len() - 1
    }

    /// Adds `coeff` to the objective coefficient of `var`.
    pub fn add_objective_term(&mut self, var: usize, coeff: f64) {
        if coeff != 0.0 {
            self.objective.coeffs.push((var, coeff));
        }
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    pub fn constraint_index(&self, name: &str) -> Option<usize> {
        self.constraints.iter().position(|c| c.name == name)
    }

    /// Dense objective vector with duplicate terms summed.
    pub fn objective_vector(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.variables.len()];
        for &(j, v) in &self.objective.coeffs {
            c[j] += v;
        }
        c
    }

    pub fn evaluate_objective(&self, x: &[f64]) -> f64 {
        self.objective.constant
            + self
                .objective
                .coeffs
                .iter()
                .map(|&(j, v)| v * x[j])
                .sum::<f64>()
    }

    pub fn row_activity(&self, row: usize, x: &[f64]) -> f64 {
        self.constraints[row]
            .coeffs
            .iter()
            .map(|&(j, v)| v * x[j])
            .sum()
    }

    /// Largest bound or row violation of `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (v, &xj) in self.variables.iter().zip(x) {
            worst = worst.max(v.lower - xj).max(xj - v.upper);
        }
        for r in 0..self.constraints.len() {
            let a = self.row_activity(r, x);
            let c = &self.constraints[r];
            worst = worst.max(c.lower - a).max(a - c.upper);
        }
        worst
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = HashMap::new();
        for (j, v) in self.variables.iter().enumerate() {
            if seen.insert(v.name.as_str(), j).is_some() {
                return Err(Error::Model(format!("duplicate variable name `{}`", v.name)));
            }
            if v.lower.is_nan() || v.upper.is_nan() || v.lower > v.upper {
                return Err(Error::Model(format!(
                    "variable `{}` has invalid bounds [{}, {}]",
                    v.name, v.lower, v.upper
                )));
            }
            if v.lower == INF || v.upper == -INF {
                return Err(Error::Model(format!(
                    "variable `{}` has an empty domain",
                    v.name
                )));
            }
        }
        let mut seen = HashMap::new();
        for c in &self.constraints {
            if seen.insert(c.name.as_str(), ()).is_some() {
                return Err(Error::Model(format!("duplicate constraint name `{}`", c.name)));
            }
            if c.lower.is_nan() || c.upper.is_nan() || c.lower > c.upper {
                return Err(Error::Model(format!(
                    "constraint `{}` has invalid bounds [{}, {}]",
                    c.name, c.lower, c.upper
                )));
            }
            for &(j, v) in &c.coeffs {
                if j >= self.variables.len() {
                    return Err(Error::Model(format!(
                        "constraint `{}` references unknown variable index {j}",
                        c.name
                    )));
                }
                if !v.is_finite() {
                    return Err(Error::Model(format!(
                        "constraint `{}` has a non-finite coefficient",
                        c.name
                    )));
                }
            }
        }
        for &(j, v) in &self.objective.coeffs {
            if j >= self.variables.len() || !v.is_finite() {
                return Err(Error::Model("objective has an invalid term".into()));
            }
        }
        if !self.objective.constant.is_finite() {
            return Err(Error::Model("objective constant is not finite".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LpOptions {
    pub tol_feas: f64,
    pub tol_gap: f64,
    /// Defaults to `50 * (m + n)` when unset.
    pub max_iters: Option<usize>,
}

impl Default for LpOptions {
    fn default() -> Self {
        Self {
            tol_feas: 1e-7,
            tol_gap: 1e-7,
            max_iters: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarState {
    Basic,
    AtLower,
    AtUpper,
    /// Nonbasic free column held at zero.
    Free,
}

/// Basis statuses for the `n` structural then `m` logical columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Basis {
    pub states: Vec<VarState>,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub status: LpStatus,
    pub objective: f64,
    /// Objective reconstructed from duals and active bounds.
    pub dual_objective: f64,
    pub primal: Vec<f64>,
    pub dual: Vec<f64>,
    pub reduced_costs: Vec<f64>,
    pub iterations: usize,
    pub basis: Option<Basis>,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    pub fn value(&self, lp: &LinearProgram, name: &str) -> Option<f64> {
        lp.var_index(name).map(|j| self.primal[j])
    }

    pub fn primal_map(&self, lp: &LinearProgram) -> std::collections::BTreeMap<String, f64> {
        lp.variables
            .iter()
            .zip(&self.primal)
            .map(|(v, &x)| (v.name.clone(), x))
            .collect()
    }

    pub fn dual_map(&self, lp: &LinearProgram) -> std::collections::BTreeMap<String, f64> {
        lp.constraints
            .iter()
            .zip(&self.dual)
            .map(|(c, &y)| (c.name.clone(), y))
            .collect()
    }
}

pub fn solve_lp(lp: &LinearProgram, opts: &LpOptions) -> Result<LpSolution> {
    lp.validate()?;
    Ok(LpEngine::new(lp).solve(opts, None))
}

/// Column-oriented copy of a [`LinearProgram`] in minimization form. Bounds
/// of structural columns may be tightened between solves, which is how
/// branch-and-bound reuses one engine across nodes.
#[derive(Clone, Debug)]
pub struct LpEngine {
    n: usize,
    m: usize,
    cols: Vec<Vec<(usize, f64)>>,
    cost: Vec<f64>,
    sign: f64,
    constant: f64,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl LpEngine {
    pub fn new(lp: &LinearProgram) -> Self {
        let n = lp.variables.len();
        let m = lp.constraints.len();
        let mut dense: Vec<HashMap<usize, f64>> = vec![HashMap::new(); n];
        for (r, c) in lp.constraints.iter().enumerate() {
            for &(j, v) in &c.coeffs {
                *dense[j].entry(r).or_insert(0.0) += v;
            }
        }
        let cols = dense
            .into_iter()
            .map(|map| {
                let mut col: Vec<(usize, f64)> =
                    map.into_iter().filter(|&(_, v)| v != 0.0).collect();
                col.sort_by_key(|&(r, _)| r);
                col
            })
            .collect();
        let sign = match lp.objective.sense {
            Sense::Minimize => 1.0,
            Sense::Maximize => -1.0,
        };
        let mut cost = vec![0.0; n + m];
        for (j, c) in lp.objective_vector().into_iter().enumerate() {
            cost[j] = sign * c;
        }
        let mut lower = Vec::with_capacity(n + m);
        let mut upper = Vec::with_capacity(n + m);
        for v in &lp.variables {
            lower.push(v.lower);
            upper.push(v.upper);
        }
        for c in &lp.constraints {
            lower.push(c.lower);
            upper.push(c.upper);
        }
        Self {
            n,
            m,
            cols,
            cost,
            sign,
            constant: lp.objective.constant,
            lower,
            upper,
        }
    }

    pub fn num_structural(&self) -> usize {
        self.n
    }

    pub fn bounds(&self, j: usize) -> (f64, f64) {
        (self.lower[j], self.upper[j])
    }

    pub fn set_bounds(&mut self, j: usize, lower: f64, upper: f64) {
        assert!(j < self.n, "only structural bounds may change");
        self.lower[j] = lower;
        self.upper[j] = upper;
    }

    pub fn solve(&self, opts: &LpOptions, warm: Option<&Basis>) -> LpSolution {
        let mut work = Work::new(self, warm);
        let max_iters = opts.max_iters.unwrap_or(50 * (self.m + self.n).max(1));
        let status = work.run(self, opts, max_iters);
        work.into_solution(self, status)
    }
}

struct Work {
    n: usize,
    m: usize,
    basic: Vec<usize>,
    state: Vec<VarState>,
    x: Vec<f64>,
    binv: Vec<f64>,
    iterations: usize,
}

impl Work {
    fn new(eng: &LpEngine, warm: Option<&Basis>) -> Self {
        let (n, m) = (eng.n, eng.m);
        let mut work = Work {
            n,
            m,
            basic: Vec::new(),
            state: Vec::new(),
            x: vec![0.0; n + m],
            binv: Vec::new(),
            iterations: 0,
        };
        if let Some(basis) = warm {
            if basis.states.len() == n + m
                && basis.states.iter().filter(|s| **s == VarState::Basic).count() == m
            {
                work.state = basis.states.clone();
                work.basic = (0..n + m)
                    .filter(|&j| work.state[j] == VarState::Basic)
                    .collect();
                work.place_nonbasics(eng);
                if work.refactor(eng) {
                    work.compute_basics(eng);
                    return work;
                }
            }
        }
        // Cold start: structurals that may sit at zero start there.
        work.state = (0..n + m)
            .map(|j| {
                if j < n && eng.lower[j] < 0.0 && eng.upper[j] > 0.0 {
                    VarState::Free
                } else {
                    VarState::AtLower
                }
            })
            .collect();
        for j in n..n + m {
            work.state[j] = VarState::Basic;
        }
        work.basic = (n..n + m).collect();
        work.place_nonbasics(eng);
        let ok = work.refactor(eng);
        debug_assert!(ok, "logical basis is always invertible");
        work.compute_basics(eng);
        work
    }

    /// Puts every nonbasic column at a finite bound consistent with its state.
    fn place_nonbasics(&mut self, eng: &LpEngine) {
        for j in 0..self.n + self.m {
            if self.state[j] == VarState::Basic {
                continue;
            }
            let (lo, hi) = (eng.lower[j], eng.upper[j]);
            let st = match self.state[j] {
                VarState::AtUpper if hi.is_finite() => VarState::AtUpper,
                VarState::Free if lo <= 0.0 && hi >= 0.0 => VarState::Free,
                _ if lo.is_finite() => VarState::AtLower,
                _ if hi.is_finite() => VarState::AtUpper,
                _ => VarState::Free,
            };
            self.state[j] = st;
            self.x[j] = match st {
                VarState::AtLower => lo,
                VarState::AtUpper => hi,
                _ => 0.0,
            };
        }
    }

    fn column<'a>(&self, eng: &'a LpEngine, j: usize) -> ColumnIter<'a> {
        if j < self.n {
            ColumnIter::Structural(eng.cols[j].iter())
        } else {
            ColumnIter::Logical(Some(j - self.n))
        }
    }

    /// Rebuilds the dense basis inverse. A numerically dependent basic
    /// column is swapped for a nonbasic logical and moved to a bound, so the
    /// caller must recompute the basics. Returns false only if no logical
    /// can stand in.
    fn refactor(&mut self, eng: &LpEngine) -> bool {
        let m = self.m;
        let mut a = vec![0.0; m * m];
        for (pos, &j) in self.basic.iter().enumerate() {
            for (r, v) in self.column(eng, j) {
                a[r * m + pos] = v;
            }
        }
        let mut inv = vec![0.0f64; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        for col in 0..m {
            let mut piv = col;
            let mut best = a[col * m + col].abs();
            for r in col + 1..m {
                let v = a[r * m + col].abs();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if best < 1e-11 {
                // Logical for row i, expressed in the eliminated system, is
                // minus column i of `inv`. Take the one with the largest
                // entry among the rows not yet pivoted.
                let mut repl: Option<(usize, usize, f64)> = None;
                for i in 0..m {
                    if self.state[self.n + i] == VarState::Basic {
                        continue;
                    }
                    for r in col..m {
                        let v = inv[r * m + i].abs();
                        if v > repl.map_or(1e-9, |t| t.2) {
                            repl = Some((i, r, v));
                        }
                    }
                }
                let Some((i, r, v)) = repl else {
                    return false;
                };
                let out = self.basic[col];
                log::debug!("basis repair: column {out} replaced by logical {i}");
                for k in 0..m {
                    a[k * m + col] = -inv[k * m + i];
                }
                self.basic[col] = self.n + i;
                self.state[self.n + i] = VarState::Basic;
                let (lo, hi) = (eng.lower[out], eng.upper[out]);
                let xo = self.x[out];
                self.state[out] = if lo.is_finite() && (!hi.is_finite() || xo - lo <= hi - xo) {
                    VarState::AtLower
                } else if hi.is_finite() {
                    VarState::AtUpper
                } else {
                    VarState::Free
                };
                self.place_nonbasics(eng);
                piv = r;
                best = v;
            }
            debug_assert!(best >= 1e-11);
            if piv != col {
                for k in 0..m {
                    a.swap(col * m + k, piv * m + k);
                    inv.swap(col * m + k, piv * m + k);
                }
            }
            let p = a[col * m + col];
            for k in 0..m {
                a[col * m + k] /= p;
                inv[col * m + k] /= p;
            }
            for r in 0..m {
                if r == col {
                    continue;
                }
                let f = a[r * m + col];
                if f == 0.0 {
                    continue;
                }
                for k in 0..m {
                    a[r * m + k] -= f * a[col * m + k];
                    inv[r * m + k] -= f * inv[col * m + k];
                }
            }
        }
        self.binv = inv;
        true
    }

    fn compute_basics(&mut self, eng: &LpEngine) {
        let m = self.m;
        let mut rhs = vec![0.0; m];
        for j in 0..self.n + m {
            if self.state[j] == VarState::Basic || self.x[j] == 0.0 {
                continue;
            }
            let xj = self.x[j];
            for (r, v) in self.column(eng, j) {
                rhs[r] -= v * xj;
            }
        }
        for (pos, &j) in self.basic.iter().enumerate() {
            let row = &self.binv[pos * m..(pos + 1) * m];
            self.x[j] = row.iter().zip(&rhs).map(|(a, b)| a * b).sum();
        }
    }

    fn ftran(&self, eng: &LpEngine, j: usize) -> Vec<f64> {
        let m = self.m;
        let mut w = vec![0.0; m];
        for (r, v) in self.column(eng, j) {
            for (i, wi) in w.iter_mut().enumerate() {
                *wi += self.binv[i * m + r] * v;
            }
        }
        w
    }

    fn btran(&self, cb: &[f64]) -> Vec<f64> {
        let m = self.m;
        let mut y = vec![0.0; m];
        for (i, &c) in cb.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let row = &self.binv[i * m..(i + 1) * m];
            for (yr, b) in y.iter_mut().zip(row) {
                *yr += c * b;
            }
        }
        y
    }

    fn infeasibility(&self, eng: &LpEngine, tol: f64) -> f64 {
        self.basic
            .iter()
            .map(|&j| {
                let x = self.x[j];
                if x < eng.lower[j] - tol {
                    eng.lower[j] - x
                } else if x > eng.upper[j] + tol {
                    x - eng.upper[j]
                } else {
                    0.0
                }
            })
            .sum()
    }

    fn phase_cost(&self, eng: &LpEngine, j: usize, phase: u8, tol: f64) -> f64 {
        if phase == 2 {
            return eng.cost[j];
        }
        if self.state[j] != VarState::Basic {
            return 0.0;
        }
        let x = self.x[j];
        if x < eng.lower[j] - tol {
            -1.0
        } else if x > eng.upper[j] + tol {
            1.0
        } else {
            0.0
        }
    }

    fn reduced_cost(&self, eng: &LpEngine, j: usize, cj: f64, y: &[f64]) -> f64 {
        let mut d = cj;
        for (r, v) in self.column(eng, j) {
            d -= y[r] * v;
        }
        d
    }

    fn phase2_objective(&self, eng: &LpEngine) -> f64 {
        (0..self.n).map(|j| eng.cost[j] * self.x[j]).sum()
    }

    fn run(&mut self, eng: &LpEngine, opts: &LpOptions, max_iters: usize) -> LpStatus {
        let tol = opts.tol_feas;
        let m = self.m;
        let mut phase: u8 = if self.infeasibility(eng, tol) > 0.0 { 1 } else { 2 };
        let mut bland = false;
        let mut stall = 0usize;
        let mut best = INF;
        let mut since_refactor = 0usize;
        let mut rechecks = 0usize;

        loop {
            if self.iterations >= max_iters {
                return LpStatus::IterationLimit;
            }
            if since_refactor >= REFACTOR_PERIOD {
                if !self.refactor(eng) {
                    log::debug!("singular basis at periodic refactorization");
                    return LpStatus::IterationLimit;
                }
                self.compute_basics(eng);
                since_refactor = 0;
                if phase == 2 && self.infeasibility(eng, tol) > 0.0 {
                    phase = 1;
                    best = INF;
                    stall = 0;
                }
            }
            if phase == 1 && self.infeasibility(eng, tol) == 0.0 {
                phase = 2;
                bland = false;
                stall = 0;
                best = INF;
            }

            let cb: Vec<f64> = self
                .basic
                .iter()
                .map(|&j| self.phase_cost(eng, j, phase, tol))
                .collect();
            let y = self.btran(&cb);

            // Pricing: Dantzig's rule, or Bland's rule once stalled.
            let mut entering: Option<(usize, f64, f64)> = None;
            for j in 0..self.n + m {
                let st = self.state[j];
                if st == VarState::Basic || eng.lower[j] == eng.upper[j] {
                    continue;
                }
                let cj = if phase == 2 { eng.cost[j] } else { 0.0 };
                let d = self.reduced_cost(eng, j, cj, &y);
                let dir = match st {
                    VarState::AtLower if d < -DUAL_TOL => 1.0,
                    VarState::AtUpper if d > DUAL_TOL => -1.0,
                    VarState::Free if d.abs() > DUAL_TOL => -d.signum(),
                    _ => continue,
                };
                if bland {
                    entering = Some((j, dir, d));
                    break;
                }
                if entering.is_none_or(|(_, _, best_d)| d.abs() > best_d.abs()) {
                    entering = Some((j, dir, d));
                }
            }

            let Some((q, dir, _)) = entering else {
                if phase == 1 {
                    return LpStatus::Infeasible;
                }
                // Confirm optimality on a fresh factorization.
                if since_refactor > 0 && rechecks < 3 {
                    rechecks += 1;
                    if !self.refactor(eng) {
                        log::debug!("singular basis at the optimality check");
                        return LpStatus::IterationLimit;
                    }
                    self.compute_basics(eng);
                    since_refactor = 0;
                    if self.infeasibility(eng, tol) > 0.0 {
                        phase = 1;
                    }
                    continue;
                }
                return LpStatus::Optimal;
            };

            let w = self.ftran(eng, q);

            // Ratio test.
            let mut step = if dir > 0.0 {
                eng.upper[q] - self.x[q]
            } else {
                self.x[q] - eng.lower[q]
            };
            let mut leave: Option<(usize, f64, bool)> = None;
            let mut leave_key = (0.0f64, usize::MAX);
            for (i, &wi) in w.iter().enumerate() {
                let alpha = -dir * wi;
                if alpha.abs() < PIVOT_TOL {
                    continue;
                }
                let j = self.basic[i];
                let xj = self.x[j];
                let (mut lo, mut hi) = (eng.lower[j], eng.upper[j]);
                if phase == 1 {
                    if xj < lo - tol {
                        hi = lo;
                        lo = -INF;
                    } else if xj > hi + tol {
                        lo = hi;
                        hi = INF;
                    }
                }
                let (limit, bound, at_upper) = if alpha > 0.0 {
                    if !hi.is_finite() {
                        continue;
                    }
                    ((hi - xj) / alpha, hi, hi == eng.upper[j])
                } else {
                    if !lo.is_finite() {
                        continue;
                    }
                    ((lo - xj) / alpha, lo, lo != eng.lower[j])
                };
                let limit = limit.max(0.0);
                let better = if limit < step - 1e-12 {
                    true
                } else if limit <= step + 1e-12 && leave.is_some() {
                    if bland {
                        j < leave_key.1
                    } else {
                        alpha.abs() > leave_key.0
                    }
                } else {
                    false
                };
                if better {
                    step = limit;
                    leave = Some((i, bound, at_upper));
                    leave_key = (alpha.abs(), j);
                }
            }

            if !step.is_finite() {
                if phase == 2 {
                    return LpStatus::Unbounded;
                }
                // Should not happen in phase 1; retry on a fresh factorization.
                log::debug!("unbounded ray in phase 1 after {} iterations", self.iterations);
                if !self.refactor(eng) {
                    log::debug!("singular basis after a phase 1 ray");
                    return LpStatus::IterationLimit;
                }
                self.compute_basics(eng);
                since_refactor = 0;
                self.iterations += 1;
                continue;
            }

            self.x[q] += dir * step;
            for (i, &wi) in w.iter().enumerate() {
                if wi != 0.0 {
                    let j = self.basic[i];
                    self.x[j] -= dir * step * wi;
                }
            }

            match leave {
                None => {
                    // Bound flip of the entering column.
                    if dir > 0.0 {
                        self.state[q] = VarState::AtUpper;
                        self.x[q] = eng.upper[q];
                    } else {
                        self.state[q] = VarState::AtLower;
                        self.x[q] = eng.lower[q];
                    }
                }
                Some((r, bound, at_upper)) => {
                    let j = self.basic[r];
                    self.x[j] = bound;
                    self.state[j] = if at_upper {
                        VarState::AtUpper
                    } else {
                        VarState::AtLower
                    };
                    self.state[q] = VarState::Basic;
                    self.basic[r] = q;
                    self.pivot(r, &w);
                    since_refactor += 1;
                }
            }
            self.iterations += 1;

            let obj = if phase == 1 {
                self.infeasibility(eng, tol)
            } else {
                self.phase2_objective(eng)
            };
            if obj < best - 1e-12 * (1.0 + best.abs()) {
                best = obj;
                stall = 0;
            } else {
                stall += 1;
                if stall > STALL_LIMIT {
                    bland = true;
                }
            }
        }
    }

    fn pivot(&mut self, r: usize, w: &[f64]) {
        let m = self.m;
        let p = w[r];
        for k in 0..m {
            self.binv[r * m + k] /= p;
        }
        let (before, rest) = self.binv.split_at_mut(r * m);
        let (prow, after) = rest.split_at_mut(m);
        for (i, chunk) in before.chunks_mut(m).enumerate() {
            let f = w[i];
            if f != 0.0 {
                for (a, b) in chunk.iter_mut().zip(prow.iter()) {
                    *a -= f * b;
                }
            }
        }
        for (off, chunk) in after.chunks_mut(m).enumerate() {
            let f = w[r + 1 + off];
            if f != 0.0 {
                for (a, b) in chunk.iter_mut().zip(prow.iter()) {
                    *a -= f * b;
                }
            }
        }
    }

    fn into_solution(mut self, eng: &LpEngine, status: LpStatus) -> LpSolution {
        let (n, m) = (self.n, self.m);
        for j in 0..n + m {
            if eng.lower[j] == eng.upper[j] {
                self.x[j] = eng.lower[j];
            }
        }
        let cb: Vec<f64> = self.basic.iter().map(|&j| eng.cost[j]).collect();
        let y = self.btran(&cb);
        let mut reduced = vec![0.0; n];
        for (j, rc) in reduced.iter_mut().enumerate() {
            if self.state[j] != VarState::Basic {
                *rc = eng.sign * self.reduced_cost(eng, j, eng.cost[j], &y);
            }
        }
        let dual: Vec<f64> = (0..m)
            .map(|r| {
                if self.state[n + r] == VarState::Basic {
                    0.0
                } else {
                    eng.sign * y[r]
                }
            })
            .collect();
        let primal = self.x[..n].to_vec();
        let objective_raw: f64 = eng.constant
            + eng.sign * (0..n).map(|j| eng.cost[j] * primal[j]).sum::<f64>();
        let dual_objective = eng.constant
            + (0..n)
                .filter(|&j| self.state[j] != VarState::Basic)
                .map(|j| reduced[j] * self.x[j])
                .sum::<f64>()
            + (0..m)
                .filter(|&r| self.state[n + r] != VarState::Basic)
                .map(|r| dual[r] * self.x[n + r])
                .sum::<f64>();
        let objective = match status {
            LpStatus::Optimal => objective_raw,
            LpStatus::Unbounded => -eng.sign * INF,
            _ => f64::NAN,
        };
        LpSolution {
            status,
            objective,
            dual_objective,
            primal,
            dual,
            reduced_costs: reduced,
            iterations: self.iterations,
            basis: Some(Basis { states: self.state }),
        }
    }
}

enum ColumnIter<'a> {
    Structural(std::slice::Iter<'a, (usize, f64)>),
    Logical(Option<usize>),
}

impl Iterator for ColumnIter<'_> {
    type Item = (usize, f64);

    fn next(&mut self) -> Option<(usize, f64)> {
        match self {
            ColumnIter::Structural(it) => it.next().copied(),
            ColumnIter::Logical(r) => r.take().map(|r| (r, -1.0)),
        }
    }
}

/// Lagrangian dual of a pure LP.
///
/// For a minimization primal the dual maximizes; row multipliers are free for
/// equalities, nonnegative for `>=` rows, nonpositive for `<=` rows and split
/// into a pair for ranged rows. Variable bounds are dualized the same way,
/// with one-sided bounds folded into inequality rows (so `min c·x, Ax >= b,
/// x >= 0` dualizes to `max b·y, Aᵀy <= c, y >= 0`). A maximization primal is
/// handled through `max f = -min(-f)`, giving a minimization dual with the
/// same optimal value.
pub fn dual_of(lp: &LinearProgram) -> LinearProgram {
    let flip = lp.objective.sense == Sense::Maximize;
    let sgn = if flip { -1.0 } else { 1.0 };
    let c: Vec<f64> = lp.objective_vector().iter().map(|v| sgn * v).collect();
    let mut d = LinearProgram::new(
        format!("{}_dual", lp.name),
        if flip { Sense::Minimize } else { Sense::Maximize },
    );
    // Dual objective g(w) accumulated as (var, coeff) in the max form, then
    // negated for a maximization primal.
    let mut obj: Vec<(usize, f64)> = Vec::new();
    let mut constant = sgn * lp.objective.constant;

    // Column j of Aᵀ: for each variable, the list of (dual var, coeff).
    let mut at: Vec<Vec<(usize, f64)>> = vec![Vec::new(); lp.variables.len()];
    for (r, row) in lp.constraints.iter().enumerate() {
        let (lo, hi) = (row.lower, row.upper);
        let mut push_mult = |d: &mut LinearProgram, name: String, l: f64, u: f64, scale: f64| {
            let w = d.add_var(name, l, u);
            for &(j, a) in &row.coeffs {
                at[j].push((w, scale * a));
            }
            w
        };
        if lo.is_finite() && hi.is_finite() && lo == hi {
            let w = push_mult(&mut d, format!("y_{}", row.name), -INF, INF, 1.0);
            obj.push((w, lo));
        } else {
            if lo.is_finite() {
                let w = push_mult(&mut d, format!("yl_{}", row.name), 0.0, INF, 1.0);
                obj.push((w, lo));
            }
            if hi.is_finite() {
                let w = push_mult(&mut d, format!("yu_{}", row.name), 0.0, INF, -1.0);
                obj.push((w, -hi));
            }
        }
        let _ = r;
    }

    for (j, v) in lp.variables.iter().enumerate() {
        let (lo, hi) = (v.lower, v.upper);
        let name = format!("d_{}", v.name);
        let terms = at[j].clone();
        if lo.is_finite() && hi.is_finite() && lo == hi {
            // z = c - Aᵀw is free; contributes lo·(c - Aᵀw).
            constant += lo * c[j];
            for &(w, a) in &terms {
                obj.push((w, -lo * a));
            }
        } else if lo.is_finite() && hi.is_finite() {
            let zl = d.add_var(format!("zl_{}", v.name), 0.0, INF);
            let zu = d.add_var(format!("zu_{}", v.name), 0.0, INF);
            obj.push((zl, lo));
            obj.push((zu, -hi));
            let mut row = terms;
            row.push((zl, 1.0));
            row.push((zu, -1.0));
            d.add_constraint(name, row, c[j], c[j]);
        } else if lo.is_finite() {
            // Aᵀw <= c, plus lo·(c - Aᵀw).
            constant += lo * c[j];
            for &(w, a) in &terms {
                obj.push((w, -lo * a));
            }
            d.add_constraint(name, terms, -INF, c[j]);
        } else if hi.is_finite() {
            // Aᵀw >= c, plus hi·(c - Aᵀw).
            constant += hi * c[j];
            for &(w, a) in &terms {
                obj.push((w, -hi * a));
            }
            d.add_constraint(name, terms, c[j], INF);
        } else {
            d.add_constraint(name, terms, c[j], c[j]);
        }
    }

    for (w, coeff) in obj {
        d.add_objective_term(w, sgn * coeff);
    }
    d.objective.constant = sgn * constant;
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn one_var() -> LinearProgram {
        let mut lp = LinearProgram::new("one", Sense::Minimize);
        let x = lp.add_var("x", 0.0, INF);
        lp.add_constraint("lb", vec![(x, 1.0)], 3.0, INF);
        lp.add_objective_term(x, 1.0);
        lp
    }

    #[test]
    fn single_variable_with_bound_row() {
        let lp = one_var();
        let sol = solve_lp(&lp, &LpOptions::default()).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_abs_diff_eq!(sol.objective, 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.dual[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.dual_objective, 3.0, epsilon = 1e-12);
    }

    #[test]
    fn unbounded_max() {
        let mut lp = LinearProgram::new("u", Sense::Maximize);
        let x = lp.add_var("x", -INF, INF);
        lp.add_constraint("r", vec![(x, 1.0)], -INF, INF);
        lp.add_objective_term(x, 1.0);
        let sol = solve_lp(&lp, &LpOptions::default()).unwrap();
        assert_eq!(sol.status, LpStatus::Unbounded);
    }

    #[test]
    fn contradictory_rows_are_infeasible() {
        let mut lp = LinearProgram::new("inf", Sense::Minimize);
        let x = lp.add_var("x", -INF, INF);
        lp.add_constraint("le", vec![(x, 1.0)], -INF, 1.0);
        lp.add_constraint("ge", vec![(x, 1.0)], 2.0, INF);
        let sol = solve_lp(&lp, &LpOptions::default()).unwrap();
        assert_eq!(sol.status, LpStatus::Infeasible);
    }

    #[test]
    fn no_rows_uses_bounds() {
        let mut lp = LinearProgram::new("b", Sense::Maximize);
        let x = lp.add_var("x", -1.0, 4.0);
        let y = lp.add_var("y", -2.0, 5.0);
        lp.add_objective_term(x, 2.0);
        lp.add_objective_term(y, -1.0);
        let sol = solve_lp(&lp, &LpOptions::default()).unwrap();
        assert_abs_diff_eq!(sol.objective, 10.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.reduced_costs[x], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.reduced_costs[y], -1.0, epsilon = 1e-12);
    }

    #[test]
    fn textbook_dual_shape() {
        let d = dual_of(&one_var());
        assert_eq!(d.objective.sense, Sense::Maximize);
        assert_eq!(d.num_vars(), 1);
        assert_eq!(d.variables[0].lower, 0.0);
        assert_eq!(d.constraints[0].upper, 1.0);
        let sol = solve_lp(&d, &LpOptions::default()).unwrap();
        assert_abs_diff_eq!(sol.objective, 3.0, epsilon = 1e-12);
    }

    #[test]
    fn dual_of_infeasible_is_not_optimal() {
        let mut lp = LinearProgram::new("inf", Sense::Minimize);
        let x = lp.add_var("x", 0.0, INF);
        lp.add_constraint("le", vec![(x, 1.0)], -INF, 1.0);
        lp.add_constraint("ge", vec![(x, 1.0)], 2.0, INF);
        lp.add_objective_term(x, 1.0);
        let sol = solve_lp(&dual_of(&lp), &LpOptions::default()).unwrap();
        assert!(matches!(
            sol.status,
            LpStatus::Unbounded | LpStatus::Infeasible
        ));
    }

    #[test]
    fn ranged_rows_and_negative_bounds() {
        // max x + 2y, -1 <= x - y <= 1, x + y in [0, 4], x in [-2, 3], y <= 2
        let mut lp = LinearProgram::new("r", Sense::Maximize);
        let x = lp.add_var("x", -2.0, 3.0);
        let y = lp.add_var("y", -INF, 2.0);
        lp.add_constraint("diff", vec![(x, 1.0), (y, -1.0)], -1.0, 1.0);
        lp.add_constraint("sum", vec![(x, 1.0), (y, 1.0)], 0.0, 4.0);
        lp.add_objective_term(x, 1.0);
        lp.add_objective_term(y, 2.0);
        let sol = solve_lp(&lp, &LpOptions::default()).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_abs_diff_eq!(sol.objective, 6.0, epsilon = 1e-9);
        assert_abs_diff_eq!(sol.dual_objective, 6.0, epsilon = 1e-9);
        let ds = solve_lp(&dual_of(&lp), &LpOptions::default()).unwrap();
        assert_abs_diff_eq!(ds.objective, 6.0, epsilon = 1e-9);
    }

    #[test]
    fn warm_start_after_bound_change() {
        let mut lp = LinearProgram::new("w", Sense::Maximize);
        let a = lp.add_var("a", 0.0, 1.0);
        let b = lp.add_var("b", 0.0, 1.0);
        lp.add_constraint("cap", vec![(a, 2.0), (b, 2.0)], -INF, 3.0);
        lp.add_objective_term(a, 3.0);
        lp.add_objective_term(b, 2.0);
        let mut eng = LpEngine::new(&lp);
        let root = eng.solve(&LpOptions::default(), None);
        assert_abs_diff_eq!(root.objective, 4.0, epsilon = 1e-12);
        eng.set_bounds(b, 0.0, 0.0);
        let child = eng.solve(&LpOptions::default(), root.basis.as_ref());
        assert_abs_diff_eq!(child.objective, 3.0, epsilon = 1e-12);
    }

    #[test]
    fn validation_rejects_bad_models() {
        let mut lp = one_var();
        lp.add_var("x", 0.0, 1.0);
        assert!(lp.validate().is_err());
        let mut lp = one_var();
        lp.variables[0].lower = 5.0;
        lp.variables[0].upper = 1.0;
        assert!(lp.validate().is_err());
        let mut lp = one_var();
        lp.constraints[0].coeffs.push((7, 1.0));
        assert!(lp.validate().is_err());
    }
}
