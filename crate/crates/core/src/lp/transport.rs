//! Balanced transportation by successive shortest augmenting paths.
//!
//! Residual arcs run source→sink (uncapacitated, cost `c_ij`) and
//! sink→source wherever flow is positive (cost `−c_ij`). Dijkstra runs on
//! reduced costs, and the node potentials it maintains double as the dual
//! solution of the transportation problem.

use serde::{Deserialize, Serialize};

use super::{LinearProgram, Relation};
use crate::error::{domain, Error, Result};
use crate::lp::LpStatus;
use crate::tol::Tolerances;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransportationInstance {
    pub supply: Vec<f64>,
    pub demand: Vec<f64>,
    /// `cost[i][j]` for shipping one unit from source `i` to sink `j`.
    pub cost: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransportPlan {
    pub cost: f64,
    pub flow: Vec<Vec<f64>>,
    /// Dual potentials: `sink_potential[j] − source_potential[i] ≤ cost[i][j]`.
    pub source_potential: Vec<f64>,
    pub sink_potential: Vec<f64>,
    pub augmentations: usize,
}

impl TransportPlan {
    /// `Σ demand·v − Σ supply·u`, which equals `cost` at optimality.
    pub fn dual_value(&self, inst: &TransportationInstance) -> f64 {
        let s: f64 = inst.supply.iter().zip(&self.source_potential).map(|(a, u)| a * u).sum();
        let t: f64 = inst.demand.iter().zip(&self.sink_potential).map(|(b, v)| b * v).sum();
        t - s
    }

    /// Largest row/column sum mismatch or negative entry.
    pub fn max_infeasibility(&self, inst: &TransportationInstance) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, row) in self.flow.iter().enumerate() {
            worst = worst.max((row.iter().sum::<f64>() - inst.supply[i]).abs());
            for &f in row {
                worst = worst.max(-f);
            }
        }
        for j in 0..inst.demand.len() {
            let col: f64 = self.flow.iter().map(|r| r[j]).sum();
            worst = worst.max((col - inst.demand[j]).abs());
        }
        worst
    }
}

impl TransportationInstance {
    pub fn validate(&self, tol: &Tolerances) -> Result<()> {
        let (a, b) = (self.supply.len(), self.demand.len());
        if self.cost.len() != a || self.cost.iter().any(|r| r.len() != b) {
            return Err(Error::Structure(format!("cost matrix must be {a} x {b}")));
        }
        let all = self.supply.iter().chain(&self.demand).chain(self.cost.iter().flatten());
        if all.clone().any(|v| !v.is_finite()) {
            return Err(Error::Structure("non-finite transportation data".into()));
        }
        if self.supply.iter().chain(&self.demand).any(|&m| m < 0.0) {
            return Err(domain("masses must be nonnegative"));
        }
        let (s, t): (f64, f64) = (self.supply.iter().sum(), self.demand.iter().sum());
        if (s - t).abs() > tol.tau * (1.0 + s.abs()) {
            return Err(domain(format!("unbalanced instance: supply {s} vs demand {t}")));
        }
        Ok(())
    }

    /// The same instance as a linear program over the `a·b` flow variables
    /// (maximizing the negated cost).
    pub fn to_linear_program(&self) -> LinearProgram {
        let (a, b) = (self.supply.len(), self.demand.len());
        let objective = self.cost.iter().flatten().map(|c| -c).collect();
        let mut lp = LinearProgram::maximize(objective).with_bounds(vec![(0.0, f64::INFINITY); a * b]);
        for i in 0..a {
            let mut row = vec![0.0; a * b];
            row[i * b..(i + 1) * b].fill(1.0);
            lp = lp.constrain(row, Relation::Eq, self.supply[i]);
        }
        for j in 0..b {
            let mut row = vec![0.0; a * b];
            for i in 0..a {
                row[i * b + j] = 1.0;
            }
            lp = lp.constrain(row, Relation::Eq, self.demand[j]);
        }
        lp
    }
}

pub fn solve_transportation(inst: &TransportationInstance, tol: &Tolerances) -> Result<TransportPlan> {
    inst.validate(tol)?;
    let (a, b) = (inst.supply.len(), inst.demand.len());
    let total: f64 = inst.supply.iter().sum();
    let mass_eps = 1e-14 * (1.0 + total);
    let mut supply = inst.supply.clone();
    let mut demand = inst.demand.clone();
    let mut flow = vec![vec![0.0; b]; a];
    // nodes: sources 0..a, sinks a..a+b
    let nn = a + b;
    let mut pot = vec![0.0; nn];
    let mut dist = vec![f64::INFINITY; nn];
    let mut prev = vec![usize::MAX; nn];
    let mut done = vec![false; nn];
    let max_aug = 4 * (a + 1) * (b + 1) + 100;
    let mut augmentations = 0;

    loop {
        let remaining: f64 = demand.iter().filter(|&&t| t > mass_eps).sum();
        if remaining <= mass_eps || supply.iter().all(|&s| s <= mass_eps) {
            break;
        }
        if augmentations >= max_aug {
            return Err(Error::Solver { status: LpStatus::Stalled });
        }

        // virtual root with potential max over active sources keeps its arcs
        // nonnegative in reduced cost
        let root_pot = (0..a)
            .filter(|&i| supply[i] > mass_eps)
            .map(|i| pot[i])
            .fold(f64::NEG_INFINITY, f64::max);
        dist.fill(f64::INFINITY);
        prev.fill(usize::MAX);
        done.fill(false);
        for i in 0..a {
            if supply[i] > mass_eps {
                dist[i] = root_pot - pot[i];
            }
        }
        loop {
            let mut cur = usize::MAX;
            for v in 0..nn {
                if !done[v] && dist[v].is_finite() && (cur == usize::MAX || dist[v] < dist[cur]) {
                    cur = v;
                }
            }
            if cur == usize::MAX {
                break;
            }
            done[cur] = true;
            if cur < a {
                for j in 0..b {
                    let v = a + j;
                    let rc = (inst.cost[cur][j] + pot[cur] - pot[v]).max(0.0);
                    if !done[v] && dist[cur] + rc < dist[v] {
                        dist[v] = dist[cur] + rc;
                        prev[v] = cur;
                    }
                }
            } else {
                let j = cur - a;
                for i in 0..a {
                    if flow[i][j] <= mass_eps || done[i] {
                        continue;
                    }
                    let rc = (-inst.cost[i][j] + pot[cur] - pot[i]).max(0.0);
                    if dist[cur] + rc < dist[i] {
                        dist[i] = dist[cur] + rc;
                        prev[i] = cur;
                    }
                }
            }
        }

        // closest sink with unmet demand, in true (not reduced) distance
        let mut target = usize::MAX;
        let mut best = f64::INFINITY;
        for j in 0..b {
            let v = a + j;
            if demand[j] > mass_eps && dist[v].is_finite() {
                let true_dist = dist[v] - root_pot + pot[v];
                if true_dist < best {
                    best = true_dist;
                    target = v;
                }
            }
        }
        if target == usize::MAX {
            return Err(Error::Solver { status: LpStatus::Infeasible });
        }

        let mut amount = demand[target - a];
        let mut v = target;
        while prev[v] != usize::MAX {
            let u = prev[v];
            if u >= a {
                // backward arc sink u -> source v cancels flow[v][u-a]
                amount = amount.min(flow[v][u - a]);
            }
            v = u;
        }
        let origin = v;
        amount = amount.min(supply[origin]);

        let mut v = target;
        while prev[v] != usize::MAX {
            let u = prev[v];
            if u < a {
                flow[u][v - a] += amount;
            } else {
                flow[v][u - a] = (flow[v][u - a] - amount).max(0.0);
            }
            v = u;
        }
        supply[origin] -= amount;
        demand[target - a] -= amount;

        let reach = dist.iter().copied().filter(|d| d.is_finite()).fold(0.0, f64::max);
        for v in 0..nn {
            pot[v] += if dist[v].is_finite() { dist[v] } else { reach };
        }
        augmentations += 1;
    }

    let cost = flow
        .iter()
        .zip(&inst.cost)
        .map(|(fr, cr)| fr.iter().zip(cr).map(|(f, c)| f * c).sum::<f64>())
        .sum();
    Ok(TransportPlan {
        cost,
        flow,
        source_potential: pot[..a].to_vec(),
        sink_potential: pot[a..].to_vec(),
        augmentations,
    })
}
