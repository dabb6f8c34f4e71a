//! Transportation simplex for balanced problems with integer masses.
//!
//! The basis is a spanning tree over the `m` supply and `n` demand nodes.
//! Each pivot prices non-basic cells against the dual potentials of the
//! tree (block search), closes the cycle through the entering cell and
//! drops the cell that first runs empty.
//!
//! Degenerate pivots are ruled out by solving a perturbed instance: with
//! `k = m + 1`, supplies become `k s_i + 1` and the last demand gains `m`.
//! No proper subset of perturbed supplies can then equal a subset of
//! perturbed demands, so every basic cell carries positive flow and each
//! pivot strictly lowers the objective. Reduced costs do not depend on the
//! masses, and the optimal perturbed basis stays feasible for the original
//! masses; flows are recomputed on that basis at the end.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransportCell {
    pub source: usize,
    pub sink: usize,
    pub flow: u64,
}

#[derive(Debug, Clone)]
pub struct TransportPlan {
    pub cells: Vec<TransportCell>,
    /// `sum flow * cost` over the plan.
    pub total_cost: f64,
    pub pivots: usize,
}

#[derive(Clone, Copy)]
struct Basic {
    i: usize,
    j: usize,
    flow: i64,
}

struct Tree {
    m: usize,
    cells: Vec<Basic>,
    adj: Vec<Vec<usize>>,
}

impl Tree {
    fn node_of_sink(&self, j: usize) -> usize {
        self.m + j
    }

    fn other_end(&self, cell: usize, node: usize) -> usize {
        let c = self.cells[cell];
        if node < self.m {
            self.m + c.j
        } else {
            c.i
        }
    }

    fn unlink(&mut self, cell: usize) {
        let c = self.cells[cell];
        for node in [c.i, self.m + c.j] {
            let list = &mut self.adj[node];
            let pos = list.iter().position(|&e| e == cell).expect("cell is linked");
            list.swap_remove(pos);
        }
    }

    fn link(&mut self, cell: usize) {
        let c = self.cells[cell];
        self.adj[c.i].push(cell);
        let sink = self.m + c.j;
        self.adj[sink].push(cell);
    }

    /// Dual potentials with `u_0 = 0`; sinks occupy indices `m..m+n`.
    fn potentials(&self, cost: &[f64], n: usize, pot: &mut [f64], stack: &mut Vec<usize>, seen: &mut [bool]) {
        seen.fill(false);
        stack.clear();
        pot[0] = 0.0;
        seen[0] = true;
        stack.push(0);
        while let Some(node) = stack.pop() {
            for &e in &self.adj[node] {
                let other = self.other_end(e, node);
                if !seen[other] {
                    let c = self.cells[e];
                    pot[other] = cost[c.i * n + c.j] - pot[node];
                    seen[other] = true;
                    stack.push(other);
                }
            }
        }
    }

    /// Cells on the tree path from `from` to `to`, listed starting at `to`.
    fn path(&self, from: usize, to: usize, parent: &mut [usize], stack: &mut Vec<usize>) -> Vec<usize> {
        const NONE: usize = usize::MAX;
        parent.fill(NONE);
        stack.clear();
        stack.push(from);
        // parent[node] holds the cell used to reach it; `from` is its own root.
        parent[from] = NONE - 1;
        while let Some(node) = stack.pop() {
            if node == to {
                break;
            }
            for &e in &self.adj[node] {
                let other = self.other_end(e, node);
                if parent[other] == NONE {
                    parent[other] = e;
                    stack.push(other);
                }
            }
        }
        let mut out = Vec::new();
        let mut node = to;
        while node != from {
            let e = parent[node];
            out.push(e);
            node = self.other_end(e, node);
        }
        out
    }
}

/// Solve `min sum c_ij x_ij` subject to row sums `supply`, column sums
/// `demand`, `x >= 0`. `cost` is row-major `supply.len() x demand.len()`.
pub fn solve_transport(cost: &[f64], supply: &[u64], demand: &[u64]) -> Result<TransportPlan> {
    let m = supply.len();
    let n = demand.len();
    if m == 0 || n == 0 {
        return Err(Error::invalid("transport problem with no sources or sinks"));
    }
    if cost.len() != m * n {
        return Err(Error::invalid("cost matrix length does not match shape"));
    }
    if let Some(v) = cost.iter().find(|v| !v.is_finite()) {
        return Err(Error::invalid(format!("non-finite transport cost {v}")));
    }
    let total_s: u64 = supply.iter().sum();
    let total_d: u64 = demand.iter().sum();
    if total_s != total_d {
        return Err(Error::invalid(format!(
            "unbalanced transport problem: supply {total_s}, demand {total_d}"
        )));
    }

    let k = m as i64 + 1;
    let overflow = || Error::invalid("transport masses too large for exact arithmetic");
    let mut s: Vec<i64> = supply
        .iter()
        .map(|&v| i64::try_from(v).ok().and_then(|v| v.checked_mul(k)).and_then(|v| v.checked_add(1)))
        .collect::<Option<_>>()
        .ok_or_else(overflow)?;
    let mut t: Vec<i64> = demand
        .iter()
        .map(|&v| i64::try_from(v).ok().and_then(|v| v.checked_mul(k)))
        .collect::<Option<_>>()
        .ok_or_else(overflow)?;
    t[n - 1] = t[n - 1].checked_add(m as i64).ok_or_else(overflow)?;
    i64::try_from(total_s).ok().and_then(|v| v.checked_mul(k)).ok_or_else(overflow)?;

    // North-west corner start; non-degeneracy gives exactly m + n - 1 cells.
    let mut tree = Tree {
        m,
        cells: Vec::with_capacity(m + n - 1),
        adj: vec![Vec::new(); m + n],
    };
    let (mut i, mut j) = (0, 0);
    loop {
        let x = s[i].min(t[j]);
        s[i] -= x;
        t[j] -= x;
        tree.cells.push(Basic { i, j, flow: x });
        tree.link(tree.cells.len() - 1);
        if i == m - 1 && j == n - 1 {
            break;
        }
        if s[i] == 0 {
            i += 1;
        } else {
            j += 1;
        }
    }
    debug_assert_eq!(tree.cells.len(), m + n - 1);

    let cmax = cost.iter().fold(0.0f64, |a, &c| a.max(c.abs()));
    let tol = 1e-10 * (1.0 + cmax);
    let cells_total = m * n;
    let block = ((cells_total as f64).sqrt() as usize).max(16).min(cells_total);
    let max_pivots = 50 * cells_total + 1000;

    let mut pot = vec![0.0; m + n];
    let mut stack = Vec::new();
    let mut seen = vec![false; m + n];
    let mut parent = vec![0usize; m + n];
    let mut cursor = 0usize;
    let mut pivots = 0usize;

    loop {
        tree.potentials(cost, n, &mut pot, &mut stack, &mut seen);

        let mut best = (-tol, usize::MAX);
        let mut scanned = 0usize;
        while scanned < cells_total {
            let idx = cursor;
            cursor += 1;
            if cursor == cells_total {
                cursor = 0;
            }
            scanned += 1;
            let (ci, cj) = (idx / n, idx % n);
            let rc = cost[idx] - pot[ci] - pot[m + cj];
            if rc < best.0 {
                best = (rc, idx);
            }
            if scanned % block == 0 && best.1 != usize::MAX {
                break;
            }
        }
        if best.1 == usize::MAX {
            break;
        }
        if pivots >= max_pivots {
            return Err(Error::SolverFailure { iterations: pivots });
        }
        pivots += 1;

        let (ei, ej) = (best.1 / n, best.1 % n);
        let to = tree.node_of_sink(ej);
        let cycle = tree.path(ei, to, &mut parent, &mut stack);
        debug_assert!(cycle.len() % 2 == 1);

        let mut leave = cycle[0];
        for &e in cycle.iter().step_by(2) {
            if tree.cells[e].flow < tree.cells[leave].flow {
                leave = e;
            }
        }
        let theta = tree.cells[leave].flow;
        for (pos, &e) in cycle.iter().enumerate() {
            if pos % 2 == 0 {
                tree.cells[e].flow -= theta;
            } else {
                tree.cells[e].flow += theta;
            }
        }
        tree.unlink(leave);
        tree.cells[leave] = Basic {
            i: ei,
            j: ej,
            flow: theta,
        };
        tree.link(leave);
    }

    let flows = basis_flows(&tree, supply, demand)?;
    let mut total_cost = 0.0;
    let mut cells = Vec::with_capacity(flows.len());
    for (c, &f) in tree.cells.iter().zip(&flows) {
        total_cost += f as f64 * cost[c.i * n + c.j];
        cells.push(TransportCell {
            source: c.i,
            sink: c.j,
            flow: f,
        });
    }
    Ok(TransportPlan {
        cells,
        total_cost,
        pivots,
    })
}

/// Flows of the spanning-tree basis for the given masses, by peeling leaves.
fn basis_flows(tree: &Tree, supply: &[u64], demand: &[u64]) -> Result<Vec<u64>> {
    let m = tree.m;
    let mut rem: Vec<i64> = supply
        .iter()
        .chain(demand)
        .map(|&v| v as i64)
        .collect();
    let mut deg: Vec<usize> = tree.adj.iter().map(Vec::len).collect();
    let mut alive = vec![true; tree.cells.len()];
    let mut flows = vec![0i64; tree.cells.len()];
    let mut stack: Vec<usize> = (0..deg.len()).filter(|&v| deg[v] == 1).collect();
    while let Some(node) = stack.pop() {
        if deg[node] != 1 {
            continue;
        }
        let e = *tree.adj[node]
            .iter()
            .find(|&&e| alive[e])
            .expect("leaf has one live cell");
        let other = tree.other_end(e, node);
        flows[e] = rem[node];
        rem[other] -= rem[node];
        rem[node] = 0;
        alive[e] = false;
        deg[node] = 0;
        deg[other] -= 1;
        if deg[other] == 1 {
            stack.push(other);
        }
    }
    if rem.iter().any(|&r| r != 0) || flows.iter().any(|&f| f < 0) {
        return Err(Error::NumericalFailure(format!(
            "final transport basis infeasible ({} sources)",
            m
        )));
    }
    Ok(flows.into_iter().map(|f| f as u64).collect())
}
