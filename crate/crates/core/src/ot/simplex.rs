//! Transportation simplex on the bipartite spanning-tree basis.
//!
//! Initial basis by the least-cost rule. Entering cell: the most negative
//! reduced cost, ties to the lexicographically first `(i, j)`. After a run of
//! degenerate pivots the entering rule switches to Bland's (first `(i, j)`
//! with negative reduced cost) until a pivot moves mass again. The leaving
//! cell is always the lexicographically smallest among the minimum-flow cells
//! of the cycle that lose mass, so degenerate runs cannot cycle and the
//! objective strictly decreases between them.

use std::collections::VecDeque;

use crate::error::{Error, Result};

pub(crate) struct SimplexSolution {
    pub flows: Vec<(usize, usize, f64)>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

#[derive(Clone, Copy)]
struct Cell {
    i: usize,
    j: usize,
    x: f64,
}

/// Greedy basis over cells in increasing cost. When a row and a column are
/// exhausted together only one line is retired, so the basis stays a
/// spanning tree.
fn least_cost(supply: &[f64], demand: &[f64], c: &[Vec<f64>]) -> Vec<Cell> {
    let (m, n) = (supply.len(), demand.len());
    let mut order: Vec<(usize, usize)> = (0..m).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    order.sort_by(|a, b| c[a.0][a.1].total_cmp(&c[b.0][b.1]).then(a.cmp(b)));
    let mut ra = supply.to_vec();
    let mut rb = demand.to_vec();
    let mut row_live = vec![true; m];
    let mut col_live = vec![true; n];
    let (mut rows, mut cols) = (m, n);
    let mut cells = Vec::with_capacity(m + n - 1);
    for (i, j) in order {
        if !row_live[i] || !col_live[j] {
            continue;
        }
        if rows == 1 && cols == 1 {
            cells.push(Cell { i, j, x: ra[i].max(0.0) });
            break;
        }
        let retire_row = (ra[i] <= rb[j] && rows > 1) || cols == 1;
        if retire_row {
            let x = ra[i].max(0.0);
            cells.push(Cell { i, j, x });
            rb[j] -= x;
            ra[i] = 0.0;
            row_live[i] = false;
            rows -= 1;
        } else {
            let x = rb[j].max(0.0);
            cells.push(Cell { i, j, x });
            ra[i] -= x;
            rb[j] = 0.0;
            col_live[j] = false;
            cols -= 1;
        }
    }
    cells
}

#[cfg(test)]
fn northwest_corner(supply: &[f64], demand: &[f64]) -> Vec<Cell> {
    let (m, n) = (supply.len(), demand.len());
    let mut ra = supply.to_vec();
    let mut rb = demand.to_vec();
    let mut cells = Vec::with_capacity(m + n - 1);
    let (mut i, mut j) = (0, 0);
    loop {
        if i == m - 1 && j == n - 1 {
            cells.push(Cell { i, j, x: ra[i].max(0.0) });
            break;
        }
        let row_first = (ra[i] <= rb[j] && i < m - 1) || j == n - 1;
        if row_first {
            let x = ra[i].max(0.0);
            cells.push(Cell { i, j, x });
            rb[j] -= x;
            ra[i] = 0.0;
            i += 1;
        } else {
            let x = rb[j].max(0.0);
            cells.push(Cell { i, j, x });
            ra[i] -= x;
            rb[j] = 0.0;
            j += 1;
        }
    }
    cells
}

struct Tree {
    parent: Vec<usize>,
    parent_cell: Vec<usize>,
    depth: Vec<usize>,
    pot: Vec<f64>,
}

/// Potentials `u_i + v_j = c_ij` on the basis, rooted at row 0 with `u_0 = 0`.
fn build_tree(m: usize, n: usize, basis: &[Cell], c: &[Vec<f64>]) -> Result<Tree> {
    let nodes = m + n;
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nodes];
    for (k, cell) in basis.iter().enumerate() {
        adj[cell.i].push((m + cell.j, k));
        adj[m + cell.j].push((cell.i, k));
    }
    let mut parent = vec![usize::MAX; nodes];
    let mut parent_cell = vec![usize::MAX; nodes];
    let mut depth = vec![0; nodes];
    let mut pot = vec![0.0; nodes];
    let mut seen = vec![false; nodes];
    let mut queue = VecDeque::new();
    seen[0] = true;
    queue.push_back(0);
    let mut count = 1;
    while let Some(a) = queue.pop_front() {
        for &(b, k) in &adj[a] {
            if seen[b] {
                continue;
            }
            seen[b] = true;
            count += 1;
            parent[b] = a;
            parent_cell[b] = k;
            depth[b] = depth[a] + 1;
            let cell = basis[k];
            pot[b] = c[cell.i][cell.j] - pot[a];
            queue.push_back(b);
        }
    }
    if count != nodes {
        return Err(Error::NumericFailure("basis is not a spanning tree".into()));
    }
    Ok(Tree {
        parent,
        parent_cell,
        depth,
        pot,
    })
}

pub(crate) fn transport_simplex(supply: &[f64], demand: &[f64], c: &[Vec<f64>]) -> Result<SimplexSolution> {
    let (m, n) = (supply.len(), demand.len());
    if m == 0 || n == 0 {
        return Err(Error::InvalidInput("empty transportation problem".into()));
    }
    let cmax = c.iter().flatten().fold(0.0f64, |a, &b| a.max(b.abs()));
    let tol = 1e-11 * cmax.max(1.0);
    let mut basis = least_cost(supply, demand, c);
    let cap = 200_000usize.max(50 * (m + n) * (m + n));
    let stall_limit = m + n;
    let mut degenerate_run = 0usize;
    for _ in 0..cap {
        let tree = build_tree(m, n, &basis, c)?;
        let entering = if degenerate_run >= stall_limit {
            (0..m).find_map(|i| {
                let ui = tree.pot[i];
                (0..n).find(|&j| c[i][j] - ui - tree.pot[m + j] < -tol).map(|j| (i, j))
            })
        } else {
            let mut best = -tol;
            let mut arg = None;
            for i in 0..m {
                let ui = tree.pot[i];
                for j in 0..n {
                    let r = c[i][j] - ui - tree.pot[m + j];
                    if r < best {
                        best = r;
                        arg = Some((i, j));
                    }
                }
            }
            arg
        };
        let Some((ei, ej)) = entering else {
            let flows = basis.iter().map(|cell| (cell.i, cell.j, cell.x.max(0.0))).collect();
            return Ok(SimplexSolution {
                flows,
                u: tree.pot[..m].to_vec(),
                v: tree.pot[m..].to_vec(),
            });
        };
        // Cycle: entering cell, then the tree path from column ej to row ei.
        let mut from_col = Vec::new();
        let mut from_row = Vec::new();
        let (mut a, mut b) = (m + ej, ei);
        while a != b {
            if tree.depth[a] >= tree.depth[b] {
                from_col.push(tree.parent_cell[a]);
                a = tree.parent[a];
            } else {
                from_row.push(tree.parent_cell[b]);
                b = tree.parent[b];
            }
        }
        from_row.reverse();
        let path: Vec<usize> = from_col.into_iter().chain(from_row).collect();
        let mut leave = usize::MAX;
        let mut theta = f64::INFINITY;
        for (step, &k) in path.iter().enumerate() {
            if step % 2 == 1 {
                continue;
            }
            let cell = basis[k];
            let better = cell.x < theta
                || (cell.x == theta && (cell.i, cell.j) < (basis[leave].i, basis[leave].j));
            if better {
                theta = cell.x;
                leave = k;
            }
        }
        let theta = theta.max(0.0);
        if theta > 0.0 {
            degenerate_run = 0;
        } else {
            degenerate_run += 1;
        }
        for (step, &k) in path.iter().enumerate() {
            if step % 2 == 0 {
                basis[k].x -= theta;
            } else {
                basis[k].x += theta;
            }
        }
        basis[leave] = Cell {
            i: ei,
            j: ej,
            x: theta,
        };
    }
    Err(Error::NumericFailure(format!("no convergence within {cap} pivots")))
}
