//! Exact capacitated assignment as a min-cost flow.
//!
//! Network: source -> point (cap 1) -> cluster (cap 1, cost = distance) ->
//! sink. Each cluster has a direct edge to the sink with capacity equal to its
//! lower bound, and an edge of capacity `upper - lower` into a shared overflow
//! node whose edge to the sink carries `n - sum(lower)`. The sink's total
//! in-capacity is exactly `n`, so any flow of value `n` saturates every lower
//! bound edge. Successive shortest paths with Dijkstra on reduced costs gives
//! the minimum-cost such flow.

use crate::matrix::Matrix;
use crate::scalar::Scalar;

#[derive(Clone, Debug)]
struct Edge<T> {
    to: usize,
    cap: usize,
    cost: T,
}

struct FlowNetwork<T> {
    edges: Vec<Edge<T>>,
    adj: Vec<Vec<usize>>,
}

impl<T: Scalar> FlowNetwork<T> {
    fn new(nodes: usize) -> Self {
        Self {
            edges: Vec::new(),
            adj: vec![Vec::new(); nodes],
        }
    }

    fn add_edge(&mut self, from: usize, to: usize, cap: usize, cost: T) -> usize {
        let id = self.edges.len();
        self.edges.push(Edge { to, cap, cost });
        self.edges.push(Edge {
            to: from,
            cap: 0,
            cost: -cost,
        });
        self.adj[from].push(id);
        self.adj[to].push(id + 1);
        id
    }

    /// Pushes up to `limit` units from `s` to `t` along successive shortest
    /// paths. Initial edge costs must be non-negative. Returns units pushed.
    fn min_cost_flow(&mut self, s: usize, t: usize, limit: usize) -> usize {
        let v = self.adj.len();
        let mut potential = vec![T::zero(); v];
        let mut pushed = 0;
        while pushed < limit {
            // dense Dijkstra; ties go to the lowest vertex index
            let mut dist = vec![T::infinity(); v];
            let mut via: Vec<Option<usize>> = vec![None; v];
            let mut done = vec![false; v];
            dist[s] = T::zero();
            loop {
                let mut u = None;
                for x in 0..v {
                    if !done[x] && dist[x].is_finite() && u.is_none_or(|b: usize| dist[x] < dist[b])
                    {
                        u = Some(x);
                    }
                }
                let Some(u) = u else { break };
                done[u] = true;
                for &e in &self.adj[u] {
                    let edge = &self.edges[e];
                    if edge.cap == 0 || done[edge.to] {
                        continue;
                    }
                    let reduced = (edge.cost + potential[u] - potential[edge.to]).max(T::zero());
                    let cand = dist[u] + reduced;
                    if cand < dist[edge.to] {
                        dist[edge.to] = cand;
                        via[edge.to] = Some(e);
                    }
                }
            }
            if !dist[t].is_finite() {
                break;
            }
            for x in 0..v {
                if dist[x].is_finite() {
                    potential[x] = potential[x] + dist[x];
                }
            }
            let mut bottleneck = limit - pushed;
            let mut x = t;
            while let Some(e) = via[x] {
                bottleneck = bottleneck.min(self.edges[e].cap);
                x = self.edges[e ^ 1].to;
            }
            let mut x = t;
            while let Some(e) = via[x] {
                self.edges[e].cap -= bottleneck;
                self.edges[e ^ 1].cap += bottleneck;
                x = self.edges[e ^ 1].to;
            }
            pushed += bottleneck;
        }
        pushed
    }
}

/// Assigns every row of `cost` (n x k) to a column so that column `c`
/// receives between `lower[c]` and `upper[c]` rows, minimizing the summed
/// cost. Returns `None` if the bounds admit no assignment.
pub fn solve_capacitated_assignment<T: Scalar>(
    cost: &Matrix<T>,
    lower: &[usize],
    upper: &[usize],
) -> Option<(Vec<usize>, T)> {
    let (n, k) = (cost.rows(), cost.cols());
    assert_eq!(lower.len(), k);
    assert_eq!(upper.len(), k);
    let lower_total: usize = lower.iter().sum();
    if lower.iter().zip(upper).any(|(l, u)| l > u)
        || lower_total > n
        || upper.iter().sum::<usize>() < n
    {
        return None;
    }

    let source = 0;
    let point = |i: usize| 1 + i;
    let cluster = |c: usize| 1 + n + c;
    let overflow = 1 + n + k;
    let sink = overflow + 1;
    let mut net = FlowNetwork::new(sink + 1);

    for i in 0..n {
        net.add_edge(source, point(i), 1, T::zero());
    }
    let mut arcs = vec![Vec::with_capacity(k); n];
    for i in 0..n {
        for c in 0..k {
            arcs[i].push(net.add_edge(point(i), cluster(c), 1, cost[(i, c)]));
        }
    }
    for c in 0..k {
        if lower[c] > 0 {
            net.add_edge(cluster(c), sink, lower[c], T::zero());
        }
        if upper[c] > lower[c] {
            net.add_edge(cluster(c), overflow, upper[c] - lower[c], T::zero());
        }
    }
    if n > lower_total {
        net.add_edge(overflow, sink, n - lower_total, T::zero());
    }

    if net.min_cost_flow(source, sink, n) != n {
        return None;
    }
    let labels: Vec<usize> = arcs
        .iter()
        .map(|row| {
            row.iter()
                .position(|&e| net.edges[e].cap == 0)
                .expect("every point carries one unit")
        })
        .collect();
    let total = labels
        .iter()
        .enumerate()
        .map(|(i, &c)| cost[(i, c)])
        .sum();
    Some((labels, total))
}
