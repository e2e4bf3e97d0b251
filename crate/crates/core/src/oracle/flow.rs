//! Transportation problems by successive shortest paths.

use alloc::vec;
use alloc::vec::Vec;

use crate::math::{abs, round};
use crate::{Error, Matrix, Result};

/// Masses are rounded to integer multiples of `1 / FLOW_SCALE`.
pub const FLOW_SCALE: f64 = 1e9;

#[derive(Debug, Clone, PartialEq)]
pub struct Transport {
    pub cost: f64,
    /// Optimal plan, in the original mass units.
    pub flow: Matrix,
}

struct Edge {
    to: usize,
    cap: i64,
    cost: f64,
    rev: usize,
}

struct Graph {
    adj: Vec<Vec<Edge>>,
}

impl Graph {
    fn new(n: usize) -> Self {
        Graph {
            adj: (0..n).map(|_| Vec::new()).collect(),
        }
    }

    fn add(&mut self, from: usize, to: usize, cap: i64, cost: f64) -> (usize, usize) {
        let rf = self.adj[to].len();
        let rt = self.adj[from].len();
        self.adj[from].push(Edge { to, cap, cost, rev: rf });
        self.adj[to].push(Edge {
            to: from,
            cap: 0,
            cost: -cost,
            rev: rt,
        });
        (from, rt)
    }
}

fn to_units(w: &[f64]) -> Result<Vec<i64>> {
    w.iter()
        .map(|&x| {
            if !(x >= 0.0 && x.is_finite()) {
                Err(Error::InvalidMeasure("flow masses must be finite and non-negative"))
            } else {
                Ok(round(x * FLOW_SCALE) as i64)
            }
        })
        .collect()
}

// Pushes a rounding discrepancy onto the largest entry.
fn absorb(units: &mut [i64], extra: i64) {
    if let Some(k) = (0..units.len()).max_by_key(|&k| units[k]) {
        units[k] += extra;
    }
}

/// Minimum-cost plan moving `supply` onto `demand` at unit costs `cost`.
/// The two totals must agree to `1e-9` relative.
pub fn transportation(supply: &[f64], demand: &[f64], cost: &Matrix) -> Result<Transport> {
    let (n, m) = (supply.len(), demand.len());
    cost.check_shape((n, m))?;
    if cost.as_slice().iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidConfig("flow costs must be finite"));
    }
    let (ms, md): (f64, f64) = (supply.iter().sum(), demand.iter().sum());
    if abs(ms - md) > 1e-9 * ms.max(md) {
        return Err(Error::Infeasible(ms, md));
    }
    let mut s = to_units(supply)?;
    let mut d = to_units(demand)?;
    let diff = s.iter().sum::<i64>() - d.iter().sum::<i64>();
    if diff > 0 {
        absorb(&mut d, diff);
    } else if diff < 0 {
        absorb(&mut s, -diff);
    }
    if n == 0 || m == 0 {
        return Ok(Transport {
            cost: 0.0,
            flow: Matrix::zeros(n, m),
        });
    }

    let source = n + m;
    let sink = source + 1;
    let nodes = sink + 1;
    let mut g = Graph::new(nodes);
    let mut arcs = vec![(0usize, 0usize); n * m];
    for (i, &si) in s.iter().enumerate() {
        g.add(source, i, si, 0.0);
    }
    for i in 0..n {
        for j in 0..m {
            arcs[i * m + j] = g.add(i, n + j, i64::MAX / 4, cost.get(i, j));
        }
    }
    for (j, &dj) in d.iter().enumerate() {
        g.add(n + j, sink, dj, 0.0);
    }

    // feasible potentials for the layered graph source → i → j → sink
    let mut pot = vec![0.0; nodes];
    for j in 0..m {
        pot[n + j] = (0..n).map(|i| cost.get(i, j)).fold(f64::INFINITY, f64::min);
    }
    pot[sink] = (0..m).map(|j| pot[n + j]).fold(f64::INFINITY, f64::min);

    let mut remaining: i64 = s.iter().sum();
    let mut dist = vec![0.0; nodes];
    let mut prev: Vec<Option<(usize, usize)>> = vec![None; nodes];
    let mut done = vec![false; nodes];
    while remaining > 0 {
        dist.iter_mut().for_each(|x| *x = f64::INFINITY);
        prev.iter_mut().for_each(|x| *x = None);
        done.iter_mut().for_each(|x| *x = false);
        dist[source] = 0.0;
        // dense Dijkstra on reduced costs
        loop {
            let mut u = usize::MAX;
            let mut best = f64::INFINITY;
            for v in 0..nodes {
                if !done[v] && dist[v] < best {
                    best = dist[v];
                    u = v;
                }
            }
            if u == usize::MAX {
                break;
            }
            done[u] = true;
            for (k, e) in g.adj[u].iter().enumerate() {
                if e.cap <= 0 || done[e.to] {
                    continue;
                }
                let reduced = (e.cost + pot[u] - pot[e.to]).max(0.0);
                let nd = dist[u] + reduced;
                if nd < dist[e.to] {
                    dist[e.to] = nd;
                    prev[e.to] = Some((u, k));
                }
            }
        }
        if !dist[sink].is_finite() {
            return Err(Error::InvalidConfig("transportation network disconnected"));
        }
        for v in 0..nodes {
            if dist[v].is_finite() {
                pot[v] += dist[v];
            }
        }
        let mut push = remaining;
        let mut v = sink;
        while let Some((u, k)) = prev[v] {
            push = push.min(g.adj[u][k].cap);
            v = u;
        }
        let mut v = sink;
        while let Some((u, k)) = prev[v] {
            let rev = g.adj[u][k].rev;
            g.adj[u][k].cap -= push;
            g.adj[v][rev].cap += push;
            v = u;
        }
        remaining -= push;
    }

    let mut total = 0.0;
    let flow = Matrix::from_fn(n, m, |i, j| {
        let (u, k) = arcs[i * m + j];
        let e = &g.adj[u][k];
        let sent = g.adj[e.to][e.rev].cap;
        sent as f64 / FLOW_SCALE
    });
    for i in 0..n {
        for j in 0..m {
            total += flow.get(i, j) * cost.get(i, j);
        }
    }
    Ok(Transport { cost: total, flow })
}
