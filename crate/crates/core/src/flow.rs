//! Bipartite transportation solver: successive shortest paths for the exact
//! minimum-cost plan (forbidden arcs are simply absent from the network),
//! cycle cancelation down to a vertex solution, dual potentials from the
//! equality graph, and an Edmonds-Karp feasibility flow.

use crate::Real;

/// Residual capacities below this are treated as zero.
const CAP_EPS: Real = 1e-15;

#[derive(Clone, Debug)]
struct Arc {
    to: usize,
    rev: usize,
    cap: Real,
    cost: Real,
}

pub struct Network {
    adj: Vec<Vec<Arc>>,
}

impl Network {
    pub fn new(nodes: usize) -> Self {
        Network {
            adj: vec![Vec::new(); nodes],
        }
    }

    pub fn add_edge(&mut self, from: usize, to: usize, cap: Real, cost: Real) {
        let rev_from = self.adj[to].len();
        let rev_to = self.adj[from].len();
        self.adj[from].push(Arc {
            to,
            rev: rev_from,
            cap,
            cost,
        });
        self.adj[to].push(Arc {
            to: from,
            rev: rev_to,
            cap: 0.0,
            cost: -cost,
        });
    }

    fn nodes(&self) -> usize {
        self.adj.len()
    }

    /// Bellman-Ford over residual arcs. Returns (dist, parent arc).
    fn shortest_paths(&self, source: usize) -> (Vec<Real>, Vec<Option<(usize, usize)>>) {
        let n = self.nodes();
        let mut dist = vec![Real::INFINITY; n];
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
        dist[source] = 0.0;
        for _ in 0..n {
            let mut updated = false;
            for u in 0..n {
                if !dist[u].is_finite() {
                    continue;
                }
                for (idx, arc) in self.adj[u].iter().enumerate() {
                    if arc.cap > CAP_EPS && dist[u] + arc.cost < dist[arc.to] {
                        dist[arc.to] = dist[u] + arc.cost;
                        parent[arc.to] = Some((u, idx));
                        updated = true;
                    }
                }
            }
            if !updated {
                break;
            }
        }
        (dist, parent)
    }

    /// Successive shortest paths from `source` to `sink`; augments until the
    /// sink is unreachable. Returns total flow sent.
    pub fn min_cost_flow(&mut self, source: usize, sink: usize) -> Real {
        let mut sent = 0.0;
        loop {
            let (dist, parent) = self.shortest_paths(source);
            if !dist[sink].is_finite() {
                return sent;
            }
            let mut bottleneck = Real::INFINITY;
            let mut v = sink;
            while v != source {
                let (u, idx) = parent[v].expect("path exists");
                bottleneck = bottleneck.min(self.adj[u][idx].cap);
                v = u;
            }
            if !(bottleneck > CAP_EPS) || !bottleneck.is_finite() {
                return sent;
            }
            let mut v = sink;
            while v != source {
                let (u, idx) = parent[v].unwrap();
                self.adj[u][idx].cap -= bottleneck;
                let rev = self.adj[u][idx].rev;
                self.adj[v][rev].cap += bottleneck;
                v = u;
            }
            sent += bottleneck;
        }
    }

    /// Edmonds-Karp max flow (BFS augmenting paths); used for feasibility.
    pub fn max_flow(&mut self, source: usize, sink: usize) -> Real {
        let n = self.nodes();
        let mut sent = 0.0;
        loop {
            let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
            let mut queue = std::collections::VecDeque::new();
            queue.push_back(source);
            let mut seen = vec![false; n];
            seen[source] = true;
            while let Some(u) = queue.pop_front() {
                for (idx, arc) in self.adj[u].iter().enumerate() {
                    if arc.cap > CAP_EPS && !seen[arc.to] {
                        seen[arc.to] = true;
                        parent[arc.to] = Some((u, idx));
                        queue.push_back(arc.to);
                    }
                }
            }
            if !seen[sink] {
                return sent;
            }
            let mut bottleneck = Real::INFINITY;
            let mut v = sink;
            while v != source {
                let (u, idx) = parent[v].unwrap();
                bottleneck = bottleneck.min(self.adj[u][idx].cap);
                v = u;
            }
            let mut v = sink;
            while v != source {
                let (u, idx) = parent[v].unwrap();
                self.adj[u][idx].cap -= bottleneck;
                let rev = self.adj[u][idx].rev;
                self.adj[v][rev].cap += bottleneck;
                v = u;
            }
            sent += bottleneck;
        }
    }
}

/// Outcome of a transportation solve on finite arcs only.
pub struct TransportSolution {
    /// Sparse plan entries `(row, col, mass)` forming a forest (vertex plan).
    pub entries: Vec<(usize, usize, Real)>,
    /// Row potentials `phi` and column potentials `psi` with
    /// `psi[j] - phi[i] <= cost[i][j]` everywhere finite and equality on
    /// the support.
    pub dual_rows: Vec<Real>,
    pub dual_cols: Vec<Real>,
}

/// Solve the balanced transportation problem `min sum c_ij x_ij` over the
/// finite arcs `(i, j, c_ij)`. Supplies and demands must each sum to the same
/// total. Returns `None` when no feasible flow exists on the given arcs.
pub fn solve_transportation(
    supplies: &[Real],
    demands: &[Real],
    arcs: &[(usize, usize, Real)],
    feas_tol: Real,
) -> Option<TransportSolution> {
    let n = supplies.len();
    let m = demands.len();
    let source = n + m;
    let sink = n + m + 1;
    let mut net = Network::new(n + m + 2);
    for (i, &s) in supplies.iter().enumerate() {
        net.add_edge(source, i, s, 0.0);
    }
    for (j, &d) in demands.iter().enumerate() {
        net.add_edge(n + j, sink, d, 0.0);
    }
    // remember where the bipartite arcs start in each row's adjacency
    let row_arc_start: Vec<usize> = (0..n).map(|i| net.adj[i].len()).collect();
    for &(i, j, c) in arcs {
        net.add_edge(i, n + j, Real::INFINITY, c);
    }
    let total: Real = supplies.iter().sum();
    let sent = net.min_cost_flow(source, sink);
    if (sent - total).abs() > feas_tol {
        return None;
    }

    // read the plan off the reverse capacities of the bipartite arcs
    let mut entries: Vec<(usize, usize, Real)> = Vec::new();
    for i in 0..n {
        for arc in net.adj[i].iter().skip(row_arc_start[i]) {
            if arc.to >= n && arc.to < n + m {
                let flow = net.adj[arc.to][arc.rev].cap;
                if flow > CAP_EPS {
                    entries.push((i, arc.to - n, flow));
                }
            }
        }
    }

    cancel_support_cycles(n, m, &mut entries, arcs);
    let (dual_rows, dual_cols) = dual_potentials(n, m, &entries, arcs)?;
    Some(TransportSolution {
        entries,
        dual_rows,
        dual_cols,
    })
}

/// Reduce an optimal plan to a vertex of the transportation polytope: while
/// the bipartite support graph contains a cycle, shift mass around it (the
/// cycle has zero reduced cost at optimality) until an entry drains.
fn cancel_support_cycles(
    n: usize,
    m: usize,
    entries: &mut Vec<(usize, usize, Real)>,
    arcs: &[(usize, usize, Real)],
) {
    use std::collections::HashMap;
    let cost: HashMap<(usize, usize), Real> =
        arcs.iter().map(|&(i, j, c)| ((i, j), c)).collect();
    loop {
        if entries.len() <= 1 {
            return;
        }
        // adjacency: nodes 0..n rows, n..n+m cols; edges = entry indices
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n + m];
        for (e, &(i, j, _)) in entries.iter().enumerate() {
            adj[i].push((n + j, e));
            adj[n + j].push((i, e));
        }
        // DFS for a cycle in the undirected multigraph
        let mut state = vec![0u8; n + m]; // 0 unseen, 1 on stack, 2 done
        let mut parent_edge: Vec<Option<usize>> = vec![None; n + m];
        let mut parent_node: Vec<usize> = vec![usize::MAX; n + m];
        let mut cycle: Option<(usize, usize, usize)> = None; // (u, v, edge)
        'outer: for start in 0..n + m {
            if state[start] != 0 {
                continue;
            }
            let mut stack = vec![(start, usize::MAX)];
            while let Some(&(u, via)) = stack.last() {
                if state[u] == 0 {
                    state[u] = 1;
                    for &(v, e) in &adj[u] {
                        if e == via {
                            continue;
                        }
                        if state[v] == 1 {
                            cycle = Some((u, v, e));
                            break 'outer;
                        }
                        if state[v] == 0 {
                            parent_edge[v] = Some(e);
                            parent_node[v] = u;
                            stack.push((v, e));
                        }
                    }
                } else {
                    state[u] = 2;
                    stack.pop();
                }
            }
        }
        let Some((u, v, closing)) = cycle else {
            return;
        };
        // walk u -> ... -> v through parents, then close with `closing`
        let mut edge_path = vec![closing];
        let mut w = u;
        while w != v {
            edge_path.push(parent_edge[w].expect("path to ancestor"));
            w = parent_node[w];
        }
        // alternate +delta / -delta around the cycle; orientation chosen so
        // the net cost does not increase (it is ~0 at optimality)
        let mut signs = Vec::with_capacity(edge_path.len());
        for (k, _) in edge_path.iter().enumerate() {
            signs.push(if k % 2 == 0 { 1.0 } else { -1.0 });
        }
        let unit_cost: Real = edge_path
            .iter()
            .zip(&signs)
            .map(|(&e, &s)| s * cost[&(entries[e].0, entries[e].1)])
            .sum();
        if unit_cost > 0.0 {
            for s in &mut signs {
                *s = -*s;
            }
        }
        let delta = edge_path
            .iter()
            .zip(&signs)
            .filter(|&(_, &s)| s < 0.0)
            .map(|(&e, _)| entries[e].2)
            .fold(Real::INFINITY, Real::min);
        for (&e, &s) in edge_path.iter().zip(&signs) {
            entries[e].2 += s * delta;
        }
        entries.retain(|&(_, _, mass)| mass > CAP_EPS);
    }
}

/// Potentials from the equality graph: arcs `row -> col` with weight `c_ij`
/// for every finite pair, `col -> row` with `-c_ij` on the support. Shortest
/// distances from a virtual source attached to every row satisfy feasibility
/// everywhere and complementary slackness on the support. A negative cycle
/// here would contradict optimality; `None` in that case.
fn dual_potentials(
    n: usize,
    m: usize,
    entries: &[(usize, usize, Real)],
    arcs: &[(usize, usize, Real)],
) -> Option<(Vec<Real>, Vec<Real>)> {
    use std::collections::HashMap;
    let cost: HashMap<(usize, usize), Real> =
        arcs.iter().map(|&(i, j, c)| ((i, j), c)).collect();
    let mut edges: Vec<(usize, usize, Real)> = Vec::with_capacity(arcs.len() + entries.len());
    for &(i, j, c) in arcs {
        edges.push((i, n + j, c));
    }
    for &(i, j, _) in entries {
        edges.push((n + j, i, -cost[&(i, j)]));
    }
    let mut dist = vec![0.0; n + m]; // virtual source: dist 0 to every row
    for j in 0..m {
        dist[n + j] = Real::INFINITY;
    }
    let nodes = n + m;
    for round in 0..=nodes {
        let mut updated = false;
        for &(u, v, w) in &edges {
            if dist[u].is_finite() && dist[u] + w < dist[v] - 1e-13 {
                dist[v] = dist[u] + w;
                updated = true;
            }
        }
        if !updated {
            break;
        }
        if round == nodes {
            return None;
        }
    }
    let dual_rows = dist[..n].to_vec();
    let dual_cols = dist[n..].to_vec();
    Some((dual_rows, dual_cols))
}

/// Feasibility flow: can the whole mass move along the given arcs?
pub fn feasible_mass(supplies: &[Real], demands: &[Real], arcs: &[(usize, usize)]) -> Real {
    let n = supplies.len();
    let m = demands.len();
    let source = n + m;
    let sink = n + m + 1;
    let mut net = Network::new(n + m + 2);
    for (i, &s) in supplies.iter().enumerate() {
        net.add_edge(source, i, s, 0.0);
    }
    for (j, &d) in demands.iter().enumerate() {
        net.add_edge(n + j, sink, d, 0.0);
    }
    for &(i, j) in arcs {
        net.add_edge(i, n + j, Real::INFINITY, 0.0);
    }
    net.max_flow(source, sink)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiny_transportation() {
        // 2x2, unique optimum pairs cheap arcs
        let sol = solve_transportation(
            &[0.5, 0.5],
            &[0.5, 0.5],
            &[(0, 0, -1.0), (0, 1, 0.0), (1, 0, 0.0), (1, 1, -1.0)],
            1e-10,
        )
        .unwrap();
        let value: Real = sol
            .entries
            .iter()
            .map(|&(i, j, m)| m * if i == j { -1.0 } else { 0.0 })
            .sum();
        assert!((value - (-1.0)).abs() < 1e-12);
        // duals feasible with equality on support
        for &(i, j, c) in &[(0usize, 0usize, -1.0), (0, 1, 0.0), (1, 0, 0.0), (1, 1, -1.0)] {
            assert!(sol.dual_cols[j] - sol.dual_rows[i] <= c + 1e-12);
        }
        for &(i, j, _) in &sol.entries {
            let c = if i == j { -1.0 } else { 0.0 };
            assert!((sol.dual_cols[j] - sol.dual_rows[i] - c).abs() < 1e-12);
        }
    }

    #[test]
    fn infeasible_when_arcs_missing() {
        assert!(solve_transportation(&[1.0], &[1.0], &[], 1e-10).is_none());
        let partial = solve_transportation(
            &[0.5, 0.5],
            &[0.5, 0.5],
            &[(0, 0, 1.0)], // row 1 cannot ship
            1e-10,
        );
        assert!(partial.is_none());
    }

    #[test]
    fn vertex_support_size() {
        // dense equal-cost instance: canonical plan must be a forest
        let n = 5;
        let supplies = vec![1.0 / n as Real; n];
        let demands = vec![1.0 / n as Real; n];
        let mut arcs = Vec::new();
        for i in 0..n {
            for j in 0..n {
                arcs.push((i, j, 0.0));
            }
        }
        let sol = solve_transportation(&supplies, &demands, &arcs, 1e-10).unwrap();
        assert!(sol.entries.len() <= 2 * n - 1);
    }

    #[test]
    fn feasibility_flow() {
        let full = feasible_mass(&[0.5, 0.5], &[0.5, 0.5], &[(0, 0), (1, 1)]);
        assert!((full - 1.0).abs() < 1e-12);
        let partial = feasible_mass(&[0.5, 0.5], &[0.5, 0.5], &[(0, 0), (1, 0)]);
        assert!((partial - 0.5).abs() < 1e-12);
    }
}
