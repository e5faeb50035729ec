//! Integer augmenting-path core (Dinic) on undirected capacities.

use crate::scalar::FlowInt;

pub(crate) struct Network<T: FlowInt> {
    adj: Vec<Vec<u32>>,
    to: Vec<u32>,
    residual: Vec<T>,
    original: Vec<T>,
    level: Vec<u32>,
    cursor: Vec<usize>,
}

const UNREACHED: u32 = u32::MAX;

impl<T: FlowInt> Network<T> {
    pub fn new(n: usize) -> Self {
        Network {
            adj: vec![Vec::new(); n],
            to: Vec::new(),
            residual: Vec::new(),
            original: Vec::new(),
            level: vec![UNREACHED; n],
            cursor: vec![0; n],
        }
    }

    /// Adds an arc pair u→v (capacity `forward`) and v→u (capacity `backward`);
    /// returns the index of the u→v arc. Its partner is `index ^ 1`.
    pub fn add_arc_pair(&mut self, u: usize, v: usize, forward: T, backward: T) -> usize {
        let a = self.to.len();
        self.to.push(v as u32);
        self.residual.push(forward.clone());
        self.original.push(forward);
        self.adj[u].push(a as u32);
        self.to.push(u as u32);
        self.residual.push(backward.clone());
        self.original.push(backward);
        self.adj[v].push(a as u32 + 1);
        a
    }

    pub fn add_undirected(&mut self, u: usize, v: usize, cap: T) -> usize {
        self.add_arc_pair(u, v, cap.clone(), cap)
    }

    /// Net amount pushed along arc `a` (negative if the partner carries more).
    pub fn net_flow(&self, a: usize) -> (T, T) {
        // pushed(a) - pushed(partner) = original(a) - residual(a), both sides.
        let mut pos = self.original[a].clone();
        let mut neg = self.residual[a].clone();
        if pos >= neg {
            pos -= neg;
            (pos, T::zero())
        } else {
            neg -= pos;
            (T::zero(), neg)
        }
    }

    pub fn arc_tail(&self, a: usize) -> usize {
        self.to[a ^ 1] as usize
    }

    /// Pre-loads `amount` of flow along arc `a`.
    pub fn push(&mut self, a: usize, amount: &T) {
        self.residual[a] -= amount.clone();
        self.residual[a ^ 1] += amount.clone();
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.iter_mut().for_each(|l| *l = UNREACHED);
        self.level[s] = 0;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &a in &self.adj[u] {
                let v = self.to[a as usize] as usize;
                if self.level[v] == UNREACHED && self.residual[a as usize] > T::zero() {
                    self.level[v] = self.level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        self.level[t] != UNREACHED
    }

    /// Finds one augmenting path in the level graph and saturates it.
    fn augment(&mut self, s: usize, t: usize) -> Option<T> {
        let mut path: Vec<usize> = Vec::new();
        let mut u = s;
        loop {
            if u == t {
                let mut bottleneck = self.residual[path[0]].clone();
                for &a in &path[1..] {
                    if self.residual[a] < bottleneck {
                        bottleneck = self.residual[a].clone();
                    }
                }
                for &a in &path {
                    self.push(a, &bottleneck);
                }
                return Some(bottleneck);
            }
            let mut advanced = false;
            while self.cursor[u] < self.adj[u].len() {
                let a = self.adj[u][self.cursor[u]] as usize;
                let v = self.to[a] as usize;
                if self.residual[a] > T::zero() && self.level[v] == self.level[u] + 1 {
                    path.push(a);
                    u = v;
                    advanced = true;
                    break;
                }
                self.cursor[u] += 1;
            }
            if !advanced {
                if u == s {
                    return None;
                }
                self.level[u] = UNREACHED;
                let a = path.pop().expect("non-source node has an incoming path arc");
                u = self.arc_tail(a);
                self.cursor[u] += 1;
            }
        }
    }

    /// Augments to a maximum s–t flow; returns the amount added.
    pub fn max_flow(&mut self, s: usize, t: usize) -> T {
        let mut total = T::zero();
        while self.bfs(s, t) {
            self.cursor.iter_mut().for_each(|c| *c = 0);
            while let Some(f) = self.augment(s, t) {
                total += f;
            }
        }
        total
    }

    /// Nodes reachable from `s` in the residual graph.
    pub fn source_side(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for &a in &self.adj[u] {
                let v = self.to[a as usize] as usize;
                if !seen[v] && self.residual[a as usize] > T::zero() {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen
    }
}
