//! Maximum transport mass between two finite laws when an atom `x` may only
//! be moved to atoms `y` with `|x - y| <= ε`.

/// Greedy transport on sorted supports.
///
/// The admissible partners of each `x_i` form a contiguous window of the
/// sorted `y`, and the windows move right with `i`. Sending every `x_i` to the
/// leftmost partners that still have capacity is then optimal, which makes a
/// feasibility check linear in the support sizes.
pub fn greedy_max_flow(xs: &[f64], a: &[f64], ys: &[f64], b: &[f64], eps: f64) -> f64 {
    let mut rem = b.to_vec();
    let mut start = 0usize;
    let mut flow = 0.0;
    for (&x, &mass) in xs.iter().zip(a) {
        while start < ys.len() && (x - ys[start] > eps || rem[start] <= 0.0) {
            start += 1;
        }
        let mut need = mass;
        let mut j = start;
        while need > 0.0 && j < ys.len() && ys[j] - x <= eps {
            let take = need.min(rem[j]);
            rem[j] -= take;
            need -= take;
            flow += take;
            j += 1;
        }
    }
    flow
}

/// Dinic's algorithm on the full bipartite network; used to cross-check
/// [`greedy_max_flow`].
pub fn dinic_max_flow(xs: &[f64], a: &[f64], ys: &[f64], b: &[f64], eps: f64) -> f64 {
    let (n, m) = (xs.len(), ys.len());
    let source = n + m;
    let sink = source + 1;
    let mut g = Dinic::new(n + m + 2);
    for (i, &w) in a.iter().enumerate() {
        g.add_edge(source, i, w);
    }
    for (j, &w) in b.iter().enumerate() {
        g.add_edge(n + j, sink, w);
    }
    for (i, &x) in xs.iter().enumerate() {
        for (j, &y) in ys.iter().enumerate() {
            if (x - y).abs() <= eps {
                g.add_edge(i, n + j, f64::INFINITY);
            }
        }
    }
    g.max_flow(source, sink)
}

const RESIDUAL_EPS: f64 = 1e-15;

struct Edge {
    to: usize,
    cap: f64,
}

struct Dinic {
    edges: Vec<Edge>,
    adj: Vec<Vec<usize>>,
    level: Vec<i64>,
    next: Vec<usize>,
}

impl Dinic {
    fn new(n: usize) -> Self {
        Dinic { edges: Vec::new(), adj: vec![Vec::new(); n], level: vec![0; n], next: vec![0; n] }
    }

    fn add_edge(&mut self, u: usize, v: usize, cap: f64) {
        self.adj[u].push(self.edges.len());
        self.edges.push(Edge { to: v, cap });
        self.adj[v].push(self.edges.len());
        self.edges.push(Edge { to: u, cap: 0.0 });
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.iter_mut().for_each(|l| *l = -1);
        self.level[s] = 0;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &e in &self.adj[u] {
                let Edge { to, cap } = self.edges[e];
                if cap > RESIDUAL_EPS && self.level[to] < 0 {
                    self.level[to] = self.level[u] + 1;
                    queue.push_back(to);
                }
            }
        }
        self.level[t] >= 0
    }

    fn dfs(&mut self, u: usize, t: usize, pushed: f64) -> f64 {
        if u == t {
            return pushed;
        }
        while self.next[u] < self.adj[u].len() {
            let e = self.adj[u][self.next[u]];
            let Edge { to, cap } = self.edges[e];
            if cap > RESIDUAL_EPS && self.level[to] == self.level[u] + 1 {
                let got = self.dfs(to, t, pushed.min(cap));
                if got > 0.0 {
                    self.edges[e].cap -= got;
                    self.edges[e ^ 1].cap += got;
                    return got;
                }
            }
            self.next[u] += 1;
        }
        0.0
    }

    fn max_flow(&mut self, s: usize, t: usize) -> f64 {
        let mut flow = 0.0;
        while self.bfs(s, t) {
            self.next.iter_mut().for_each(|x| *x = 0);
            loop {
                let f = self.dfs(s, t, f64::INFINITY);
                if f <= 0.0 {
                    break;
                }
                flow += f;
            }
        }
        flow
    }
}
