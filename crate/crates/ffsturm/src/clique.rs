//! Exact maximum clique by bitset branch and bound with greedy coloring bounds.

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitSet {
    words: Vec<u64>,
}

impl BitSet {
    pub fn new(n: usize) -> Self {
        BitSet { words: vec![0; n.div_ceil(64)] }
    }
    pub fn full(n: usize) -> Self {
        let mut s = Self::new(n);
        for i in 0..n {
            s.insert(i);
        }
        s
    }
    #[inline]
    pub fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }
    #[inline]
    pub fn remove(&mut self, i: usize) {
        self.words[i / 64] &= !(1 << (i % 64));
    }
    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }
    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }
    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }
    pub fn intersect_with(&mut self, o: &BitSet) {
        for (a, b) in self.words.iter_mut().zip(&o.words) {
            *a &= b;
        }
    }
    pub fn intersection(&self, o: &BitSet) -> BitSet {
        let mut s = self.clone();
        s.intersect_with(o);
        s
    }
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(k * 64 + b)
            })
        })
    }
}

/// Undirected graph as adjacency bitsets.
#[derive(Clone, Debug)]
pub struct Graph {
    pub adj: Vec<BitSet>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph { adj: vec![BitSet::new(n); n] }
    }
    pub fn len(&self) -> usize {
        self.adj.len()
    }
    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }
    pub fn add_edge(&mut self, a: usize, b: usize) {
        self.adj[a].insert(b);
        self.adj[b].insert(a);
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliqueResult {
    /// Best clique found, in original vertex numbering.
    pub clique: Vec<usize>,
    /// False if the search stopped early (target reached or aborted), in
    /// which case `clique` is only a lower bound witness.
    pub exact: bool,
    pub aborted: bool,
}

struct Search<'a> {
    adj: Vec<BitSet>,
    order: Vec<usize>,
    best: Vec<usize>,
    cur: Vec<usize>,
    target: usize,
    abort: &'a dyn Fn() -> bool,
    nodes: u64,
    aborted: bool,
}

impl Search<'_> {
    /// Greedy coloring of `p` in vertex order; returns vertices and color bounds.
    fn color(&self, p: &BitSet) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(p.count());
        let mut uncolored = p.clone();
        let mut k = 0;
        while !uncolored.is_empty() {
            k += 1;
            let mut q = uncolored.clone();
            loop {
                let Some(v) = q.iter().next() else { break };
                q.remove(v);
                uncolored.remove(v);
                // drop neighbours of v from this color class
                for (a, b) in q.words.iter_mut().zip(&self.adj[v].words) {
                    *a &= !b;
                }
                out.push((v, k));
            }
        }
        out
    }

    fn expand(&mut self, mut p: BitSet) {
        self.nodes += 1;
        if self.nodes.is_multiple_of(1024) && (self.abort)() {
            self.aborted = true;
        }
        if self.aborted || self.best.len() >= self.target {
            return;
        }
        let colored = self.color(&p);
        for &(v, k) in colored.iter().rev() {
            if self.cur.len() + k <= self.best.len() || self.aborted || self.best.len() >= self.target {
                return;
            }
            self.cur.push(v);
            let np = p.intersection(&self.adj[v]);
            if np.is_empty() {
                if self.cur.len() > self.best.len() {
                    self.best = self.cur.clone();
                }
            } else {
                self.expand(np);
            }
            self.cur.pop();
            p.remove(v);
        }
    }
}

/// Maximum clique, stopping as soon as one of size `target` is found.
/// `abort` is polled periodically; a true result ends the search.
pub fn max_clique_bounded(g: &Graph, target: usize, abort: &dyn Fn() -> bool) -> CliqueResult {
    let n = g.len();
    if n == 0 {
        return CliqueResult { clique: Vec::new(), exact: true, aborted: false };
    }
    // vertices in non-increasing degree order
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(g.adj[v].count()));
    let mut pos = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let adj: Vec<BitSet> = order
        .iter()
        .map(|&v| {
            let mut s = BitSet::new(n);
            for u in g.adj[v].iter() {
                s.insert(pos[u]);
            }
            s
        })
        .collect();
    let mut s = Search { adj, order, best: Vec::new(), cur: Vec::new(), target, abort, nodes: 0, aborted: false };
    s.expand(BitSet::full(n));
    let clique = s.best.iter().map(|&i| s.order[i]).collect();
    let exact = !s.aborted && s.best.len() < target;
    CliqueResult { clique, exact, aborted: s.aborted }
}

pub fn max_clique(g: &Graph) -> Vec<usize> {
    max_clique_bounded(g, usize::MAX, &|| false).clique
}
