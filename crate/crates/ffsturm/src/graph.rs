//! The finite part of the quotient graph Γ₀(n)\T and its ends.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::level::{Cusp, Level, ProjPointJson};
use crate::orbits::Strata;
use crate::reduce::{EdgeCoord, Orient};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QVertex {
    pub id: usize,
    pub r: usize,
    /// Least point index in the class.
    pub class: u32,
    pub stab: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QEdge {
    pub id: usize,
    pub origin: usize,
    pub terminus: usize,
    pub rev: usize,
    pub r: usize,
    pub class: u32,
    pub orient: Orient,
    pub stab: u64,
    /// Number of tree edges at a lift of the origin mapping to this edge:
    /// stab(origin) / stab(edge).
    pub weight: u64,
}

#[derive(Clone, Debug)]
pub struct End {
    pub cusp: Cusp,
    pub attach: usize,
    /// Weight of the first end edge γ_s e_ℓ at the attach vertex.
    pub weight: u64,
    pub stab: u64,
}

/// Where a tree edge lands in the quotient.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Location {
    Finite(usize),
    /// The edge γ_s e_R (or its reversal) on the end of cusp `cusp`.
    End { cusp: usize, r: usize, orient: Orient },
}

#[derive(Clone, Debug)]
pub struct QuotientGraph {
    level: Level,
    strata: Strata,
    width_deg: Vec<u8>,
    cusp_of: Vec<u32>,
    pub vertices: Vec<QVertex>,
    pub edges: Vec<QEdge>,
    pub ends: Vec<End>,
    vertex_ids: HashMap<(usize, u32), usize>,
    /// (r, class) → id of the `+` edge; the `−` edge is id + 1.
    edge_ids: HashMap<(usize, u32), usize>,
}

fn ratio(num: u64, den: u64) -> Result<u64> {
    if den == 0 || !num.is_multiple_of(den) {
        return Err(Error::Invariant(format!("stabilizer index {num}/{den} is not an integer")));
    }
    Ok(num / den)
}

impl QuotientGraph {
    pub fn build(level: &Level) -> Result<QuotientGraph> {
        let strata = Strata::new(level);
        let kappa = level.kappa() as usize;
        let width_deg: Vec<u8> = (0..kappa as u64).map(|i| level.width_deg(i) as u8).collect();

        let mut vkeys: Vec<(usize, u32)> = Vec::new();
        for pt in 0..kappa as u32 {
            if strata.gl2.root[pt as usize] == pt {
                vkeys.push((0, pt));
            }
        }
        for r in 1..=strata.top() {
            let part = strata.at(r);
            for pt in 0..kappa as u32 {
                if part.root[pt as usize] == pt && width_deg[pt as usize] as usize > r {
                    vkeys.push((r, pt));
                }
            }
        }
        vkeys.sort();
        let vertex_ids: HashMap<(usize, u32), usize> = vkeys.iter().enumerate().map(|(i, &k)| (k, i)).collect();
        let vertices: Vec<QVertex> = vkeys
            .iter()
            .enumerate()
            .map(|(id, &(r, class))| QVertex { id, r, class, stab: strata.vertex_stab(r, class) })
            .collect();
        let vid = |r: usize, pt: u32| -> Result<usize> {
            let key = (r, strata.vertex_class(r, pt));
            vertex_ids
                .get(&key)
                .copied()
                .ok_or_else(|| Error::Invariant(format!("missing vertex at stratum {r} for point {pt}")))
        };

        let mut ekeys: Vec<(usize, u32)> = Vec::new();
        for r in 0..=strata.top() {
            let part = strata.at(r);
            for pt in 0..kappa as u32 {
                if part.root[pt as usize] == pt && width_deg[pt as usize] as usize >= r + 2 {
                    ekeys.push((r, pt));
                }
            }
        }
        ekeys.sort();
        let mut edges = Vec::with_capacity(2 * ekeys.len());
        let mut edge_ids = HashMap::new();
        for &(r, pt) in &ekeys {
            let id = edges.len();
            edge_ids.insert((r, pt), id);
            let lo = vid(r, pt)?;
            let hi = vid(r + 1, pt)?;
            let stab = strata.edge_stab(r, pt);
            edges.push(QEdge {
                id,
                origin: lo,
                terminus: hi,
                rev: id + 1,
                r,
                class: pt,
                orient: Orient::Plus,
                stab,
                weight: ratio(strata.vertex_stab(r, pt), stab)?,
            });
            edges.push(QEdge {
                id: id + 1,
                origin: hi,
                terminus: lo,
                rev: id,
                r,
                class: pt,
                orient: Orient::Minus,
                stab,
                weight: ratio(strata.vertex_stab(r + 1, pt), stab)?,
            });
        }

        // the top stratum partitions P¹(A/n) into Γ∞-orbits
        let top = strata.at(strata.top());
        let mut cusp_index: HashMap<u32, u32> = HashMap::new();
        let mut ends = Vec::new();
        for pt in 0..kappa as u32 {
            if top.root[pt as usize] != pt {
                continue;
            }
            cusp_index.insert(pt, ends.len() as u32);
            let rep = level.point(pt as u64);
            let ell = (width_deg[pt as usize] as usize).saturating_sub(1);
            let lift = level.lift(&rep);
            let stab = strata.edge_stab(ell, pt);
            ends.push(End {
                cusp: Cusp { rep, rep_index: pt as u64, lift, ell, orbit_size: top.size[pt as usize] as u64 },
                attach: vid(ell, pt)?,
                weight: ratio(strata.vertex_stab(ell, pt), stab)?,
                stab,
            });
        }
        let cusp_of: Vec<u32> = (0..kappa).map(|i| cusp_index[&top.root[i]]).collect();

        let g = QuotientGraph {
            level: level.clone(),
            strata,
            width_deg,
            cusp_of,
            vertices,
            edges,
            ends,
            vertex_ids,
            edge_ids,
        };
        g.self_check()?;
        Ok(g)
    }

    fn self_check(&self) -> Result<()> {
        let q = self.level.q() as u64;
        // along every cusp orbit the class at stratum ℓ is that of the cusp
        for pt in 0..self.level.kappa() as u32 {
            let end = &self.ends[self.cusp_of[pt as usize] as usize];
            let ell = (self.width_deg[pt as usize] as usize).saturating_sub(1);
            if ell != end.cusp.ell
                || self.strata.vertex_class(ell, pt) != self.strata.vertex_class(ell, end.cusp.rep_index as u32)
            {
                return Err(Error::Invariant(format!("point {pt} does not reach its cusp at stratum {ell}")));
            }
        }
        let mut total = vec![0u64; self.vertices.len()];
        for e in &self.edges {
            total[e.origin] += e.weight;
        }
        for end in &self.ends {
            total[end.attach] += end.weight;
        }
        if let Some(v) = total.iter().position(|&t| t != q + 1) {
            return Err(Error::Invariant(format!("vertex {v} has weighted degree {} instead of {}", total[v], q + 1)));
        }
        if !self.is_connected() {
            return Err(Error::Invariant("quotient graph is disconnected".into()));
        }
        Ok(())
    }

    fn is_connected(&self) -> bool {
        if self.vertices.is_empty() {
            return true;
        }
        let adj = self.adjacency();
        let mut seen = vec![false; self.vertices.len()];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for &e in &adj[v] {
                let t = self.edges[e].terminus;
                if !seen[t] {
                    seen[t] = true;
                    queue.push_back(t);
                }
            }
        }
        seen.iter().all(|&s| s)
    }

    /// Outgoing directed edge ids per vertex.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for e in &self.edges {
            adj[e.origin].push(e.id);
        }
        adj
    }

    pub fn level(&self) -> &Level {
        &self.level
    }
    pub fn strata(&self) -> &Strata {
        &self.strata
    }
    pub fn num_undirected(&self) -> usize {
        self.edges.len() / 2
    }
    /// `+` edge ids, one per undirected edge, in id order.
    pub fn plus_edges(&self) -> impl Iterator<Item = &QEdge> {
        self.edges.iter().step_by(2)
    }

    pub fn genus(&self) -> usize {
        self.num_undirected() + 1 - self.vertices.len()
    }

    pub fn width_deg(&self, pt: u64) -> usize {
        self.width_deg[pt as usize] as usize
    }
    pub fn cusp_of(&self, pt: u64) -> usize {
        self.cusp_of[pt as usize] as usize
    }

    pub fn vertex_id(&self, r: usize, pt: u64) -> Option<usize> {
        self.vertex_ids.get(&(r, self.strata.vertex_class(r, pt as u32))).copied()
    }

    /// The `+` edge id of the finite edge class of (pt, r), if finite.
    pub fn edge_id(&self, r: usize, pt: u64) -> Option<usize> {
        self.edge_ids.get(&(r, self.strata.edge_class(r, pt as u32))).copied()
    }

    pub fn locate(&self, e: &EdgeCoord) -> Location {
        if e.r + 2 <= self.width_deg(e.pt) {
            let id = self.edge_id(e.r, e.pt).expect("finite edge classes are indexed");
            Location::Finite(if e.orient == Orient::Plus { id } else { id + 1 })
        } else {
            Location::End { cusp: self.cusp_of(e.pt), r: e.r, orient: e.orient }
        }
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            schema: crate::SCHEMA.into(),
            level: self.level.n().to_string(),
            q: self.level.q(),
            genus: self.genus(),
            vertices: self.vertices.iter().map(|v| VertexJson { id: v.id, r: v.r, stab: v.stab }).collect(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeJson { id: e.id, o: e.origin, t: e.terminus, rev: e.rev, stab: e.stab })
                .collect(),
            ends: self
                .ends
                .iter()
                .map(|e| EndJson { cusp: e.cusp.rep.to_json(), ell: e.cusp.ell, attach: e.attach })
                .collect(),
        }
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct VertexJson {
    pub id: usize,
    pub r: usize,
    pub stab: u64,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct EdgeJson {
    pub id: usize,
    pub o: usize,
    pub t: usize,
    pub rev: usize,
    pub stab: u64,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct EndJson {
    pub cusp: ProjPointJson,
    pub ell: usize,
    pub attach: usize,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct GraphJson {
    pub schema: String,
    pub level: String,
    pub q: u32,
    pub genus: usize,
    pub vertices: Vec<VertexJson>,
    pub edges: Vec<EdgeJson>,
    pub ends: Vec<EndJson>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_graphs() {
        let g = QuotientGraph::build(&Level::parse(2, "1").unwrap()).unwrap();
        assert_eq!((g.vertices.len(), g.edges.len(), g.ends.len(), g.genus()), (1, 0, 1, 0));
        for s in ["T", "T^2", "T^2 + T", "T^2 + T + 1"] {
            let g = QuotientGraph::build(&Level::parse(2, s).unwrap()).unwrap();
            assert_eq!(g.genus(), 0, "{s}");
        }
        for s in ["T^3", "T^3 + T + 1", "T^4 + T^3 + T"] {
            QuotientGraph::build(&Level::parse(2, s).unwrap()).unwrap();
        }
    }
}
