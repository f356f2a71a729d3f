//! Orbits of Γ∞^(r) and GL₂(F_q) on P¹(A/n), computed incrementally in r.

use crate::level::{gamma_inf_generators, gamma_inf_order, gl2_order, translations_at, Level};
use crate::mat2::Mat2A;

/// Union-find whose roots are always the least element of their class.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n as u32).collect(), size: vec![1; n] }
    }
    pub fn find(&mut self, mut x: u32) -> u32 {
        let mut root = x;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        while self.parent[x as usize] != root {
            let next = self.parent[x as usize];
            self.parent[x as usize] = root;
            x = next;
        }
        root
    }
    pub fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi as usize] = lo;
        self.size[lo as usize] += self.size[hi as usize];
    }
    /// Union every `i` with `img[i]`.
    pub fn union_all(&mut self, img: &[u32]) {
        for (i, &j) in img.iter().enumerate() {
            self.union(i as u32, j);
        }
    }
    pub fn size_of(&mut self, x: u32) -> u32 {
        let r = self.find(x);
        self.size[r as usize]
    }
    fn snapshot(&mut self) -> Partition {
        let n = self.parent.len();
        let root: Vec<u32> = (0..n as u32).map(|i| self.find(i)).collect();
        let size = root.iter().map(|&r| self.size[r as usize]).collect();
        Partition { root, size }
    }
}

/// A partition of the point indices: the least member and the size of each point's class.
#[derive(Clone, Debug)]
pub struct Partition {
    pub root: Vec<u32>,
    pub size: Vec<u32>,
}

/// Orbit partitions for every stratum needed by the quotient graph.
#[derive(Clone, Debug)]
pub struct Strata {
    q: u64,
    /// `edge[r]`: orbits of Γ∞^(r), for r = 0..=max(0, deg n - 1).
    pub edge: Vec<Partition>,
    /// Orbits of GL₂(F_q) (stabilizer of v₀).
    pub gl2: Partition,
}

impl Strata {
    pub fn new(level: &Level) -> Strata {
        let f = level.field();
        let top = level.deg().saturating_sub(1);
        let mut uf = UnionFind::new(level.kappa() as usize);
        for m in gamma_inf_generators(f, 0) {
            uf.union_all(&level.apply_all(&level.local_action(&m)));
        }
        let mut edge = vec![uf.snapshot()];
        let mut gl = uf.clone();
        gl.union_all(&level.apply_all(&level.local_action(&Mat2A::swap(f))));
        let gl2 = gl.snapshot();
        for r in 1..=top {
            for m in translations_at(f, r) {
                uf.union_all(&level.apply_all(&level.local_action(&m)));
            }
            edge.push(uf.snapshot());
        }
        Strata { q: f.q() as u64, edge, gl2 }
    }

    pub fn top(&self) -> usize {
        self.edge.len() - 1
    }

    /// Partition at stratum r, saturating at the top stratum (beyond it the
    /// orbits no longer change).
    pub fn at(&self, r: usize) -> &Partition {
        &self.edge[r.min(self.top())]
    }

    /// Order of Stab_{Γ₀(n)}(γ e_r) for the point `pt`.
    pub fn edge_stab(&self, r: usize, pt: u32) -> u64 {
        gamma_inf_order(self.q, r) / self.at(r).size[pt as usize] as u64
    }

    /// Order of Stab_{Γ₀(n)}(γ v_r).
    pub fn vertex_stab(&self, r: usize, pt: u32) -> u64 {
        if r == 0 {
            gl2_order(self.q) / self.gl2.size[pt as usize] as u64
        } else {
            self.edge_stab(r, pt)
        }
    }

    /// Class representative of (pt, r) as a vertex.
    pub fn vertex_class(&self, r: usize, pt: u32) -> u32 {
        if r == 0 {
            self.gl2.root[pt as usize]
        } else {
            self.at(r).root[pt as usize]
        }
    }

    pub fn edge_class(&self, r: usize, pt: u32) -> u32 {
        self.at(r).root[pt as usize]
    }
}
