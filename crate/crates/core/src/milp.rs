//! Best-first branch-and-bound over binary variables, with LP relaxations
//! solved by [`crate::lp`]. Children are warm-started from the parent basis.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{Basis, LinearProgram, LpEngine, LpOptions, LpSolution, LpStatus, Sense};

#[derive(Clone, Debug, PartialEq)]
pub struct MixedIntegerProgram {
    pub base: LinearProgram,
    /// Indices of binary variables, sorted and unique.
    pub binaries: Vec<usize>,
}

impl MixedIntegerProgram {
    pub fn new(base: LinearProgram) -> Self {
        Self {
            base,
            binaries: Vec::new(),
        }
    }

    /// Adds a binary variable with bounds `[0, 1]`.
    pub fn add_binary(&mut self, name: impl Into<String>) -> usize {
        let j = self.base.add_var(name, 0.0, 1.0);
        self.binaries.push(j);
        j
    }

    pub fn mark_binary(&mut self, j: usize) {
        if let Err(pos) = self.binaries.binary_search(&j) {
            self.binaries.insert(pos, j);
        }
    }

    pub fn is_binary(&self, j: usize) -> bool {
        self.binaries.binary_search(&j).is_ok()
    }

    pub fn binary_names(&self) -> Vec<&str> {
        self.binaries
            .iter()
            .map(|&j| self.base.variables[j].name.as_str())
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if self.binaries.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Model("binary index list must be sorted and unique".into()));
        }
        for &j in &self.binaries {
            let Some(v) = self.base.variables.get(j) else {
                return Err(Error::Model(format!("binary index {j} out of range")));
            };
            if v.lower < 0.0 || v.upper > 1.0 {
                return Err(Error::Model(format!(
                    "binary `{}` has bounds outside [0, 1]",
                    v.name
                )));
            }
        }
        Ok(())
    }
}

impl From<LinearProgram> for MixedIntegerProgram {
    fn from(lp: LinearProgram) -> Self {
        Self::new(lp)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct MipOptions {
    pub tol_int: f64,
    /// Search stops once `(incumbent - bound) / max(1, |incumbent|)` is at
    /// most this.
    pub rel_gap: f64,
    pub node_limit: usize,
    pub lp: LpOptions,
}

impl Default for MipOptions {
    fn default() -> Self {
        Self {
            tol_int: 1e-6,
            rel_gap: 1e-6,
            node_limit: 1_000_000,
            lp: LpOptions::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MipStatus {
    /// Tree exhausted; the incumbent is optimal.
    Optimal,
    Infeasible,
    /// Open nodes remained but none can beat the incumbent by more than the
    /// relative gap.
    GapLimit,
    NodeLimit,
}

#[derive(Clone, Debug)]
pub struct MipSolution {
    pub status: MipStatus,
    /// Incumbent objective; `-inf` (max) or `+inf` (min) without one.
    pub objective: f64,
    pub incumbent: Option<Vec<f64>>,
    /// Best proven bound in the problem's own sense.
    pub bound: f64,
    pub gap: f64,
    pub nodes: usize,
    pub lp_iterations: usize,
}

impl MipSolution {
    /// An incumbent exists and was proven within the requested gap.
    pub fn is_solved(&self) -> bool {
        matches!(self.status, MipStatus::Optimal | MipStatus::GapLimit) && self.incumbent.is_some()
    }

    pub fn value(&self, mip: &MixedIntegerProgram, name: &str) -> Option<f64> {
        let x = self.incumbent.as_ref()?;
        mip.base.var_index(name).map(|j| x[j])
    }

    pub fn incumbent_map(&self, mip: &MixedIntegerProgram) -> BTreeMap<String, f64> {
        match &self.incumbent {
            Some(x) => mip
                .base
                .variables
                .iter()
                .zip(x)
                .map(|(v, &val)| (v.name.clone(), val))
                .collect(),
            None => BTreeMap::new(),
        }
    }
}

struct Node {
    /// LP bound in minimization form.
    bound: f64,
    id: usize,
    fixes: Vec<(usize, f64)>,
    basis: Option<Basis>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    // BinaryHeap is a max-heap: smaller bound, then smaller id, ranks higher.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then_with(|| other.id.cmp(&self.id))
    }
}

fn solve_node(
    engine: &mut LpEngine,
    mip: &MixedIntegerProgram,
    fixes: &[(usize, f64)],
    opts: &MipOptions,
    warm: Option<&Basis>,
) -> Result<LpSolution> {
    for &j in &mip.binaries {
        let v = &mip.base.variables[j];
        engine.set_bounds(j, v.lower, v.upper);
    }
    for &(j, val) in fixes {
        engine.set_bounds(j, val, val);
    }
    let sol = engine.solve(&opts.lp, warm);
    if sol.status != LpStatus::IterationLimit || warm.is_none() {
        return Ok(sol);
    }
    Ok(engine.solve(&opts.lp, None))
}

pub fn solve_milp(mip: &MixedIntegerProgram, opts: &MipOptions) -> Result<MipSolution> {
    mip.validate()?;
    let sign = match mip.base.objective.sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };
    let mut engine = LpEngine::new(&mip.base);
    let mut heap = BinaryHeap::new();
    let mut next_id = 0usize;
    let mut nodes = 0usize;
    let mut lp_iterations = 0usize;
    let mut best = f64::INFINITY;
    let mut incumbent: Option<Vec<f64>> = None;
    let mut status = MipStatus::Optimal;
    let mut open_bound = f64::INFINITY;

    heap.push(Node {
        bound: f64::NEG_INFINITY,
        id: next_id,
        fixes: Vec::new(),
        basis: None,
    });
    next_id += 1;

    let scale = |v: f64| v.abs().max(1.0);
    while let Some(node) = heap.pop() {
        if node.bound >= best - 1e-12 * scale(best) {
            open_bound = best;
            heap.clear();
            break;
        }
        if incumbent.is_some() && (best - node.bound) / scale(best) <= opts.rel_gap {
            status = MipStatus::GapLimit;
            open_bound = node.bound;
            break;
        }
        if nodes >= opts.node_limit {
            status = MipStatus::NodeLimit;
            open_bound = node.bound;
            break;
        }
        nodes += 1;
        let sol = solve_node(&mut engine, mip, &node.fixes, opts, node.basis.as_ref())?;
        lp_iterations += sol.iterations;
        match sol.status {
            LpStatus::Optimal => {}
            LpStatus::Infeasible => continue,
            LpStatus::Unbounded => {
                return Err(Error::Solver("LP relaxation is unbounded".into()));
            }
            LpStatus::IterationLimit => {
                return Err(Error::Solver(format!(
                    "LP iteration limit at branch-and-bound node {}",
                    node.id
                )));
            }
        }
        let value = sign * sol.objective;
        if value >= best - 1e-12 * scale(best) {
            continue;
        }
        let mut branch: Option<(usize, f64)> = None;
        for &j in &mip.binaries {
            let x = sol.primal[j];
            let frac = (x - x.floor()).min(x.ceil() - x);
            if frac > opts.tol_int && branch.is_none_or(|(_, f)| frac > f) {
                branch = Some((j, frac));
            }
        }
        match branch {
            None => {
                let mut x = sol.primal.clone();
                for &j in &mip.binaries {
                    x[j] = x[j].round();
                }
                best = value;
                incumbent = Some(x);
            }
            Some((j, _)) => {
                for val in [0.0, 1.0] {
                    let mut fixes = node.fixes.clone();
                    fixes.push((j, val));
                    heap.push(Node {
                        bound: value,
                        id: next_id,
                        fixes,
                        basis: sol.basis.clone(),
                    });
                    next_id += 1;
                }
            }
        }
    }
    if heap.is_empty() && status == MipStatus::Optimal {
        open_bound = best;
    }
    if incumbent.is_none() && status == MipStatus::Optimal {
        status = MipStatus::Infeasible;
    }
    let objective = sign * best;
    let bound = sign * open_bound.min(best);
    let gap = if incumbent.is_some() {
        ((best - open_bound.min(best)) / scale(best)).max(0.0)
    } else {
        f64::INFINITY
    };
    Ok(MipSolution {
        status,
        objective,
        incumbent,
        bound,
        gap,
        nodes,
        lp_iterations,
    })
}
