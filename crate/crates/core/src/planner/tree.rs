use crate::metric::{Bounds, ManifoldModel, PlanarPoint};
use crate::planner::cost::CostBackend;
use crate::planner::grid::GridIndex;

/// Rooted planning tree with cost-to-root per vertex.
#[derive(Debug, Clone)]
pub struct PlanTree {
    vertices: Vec<PlanarPoint>,
    parents: Vec<Option<usize>>,
    costs: Vec<f64>,
    children: Vec<Vec<usize>>,
    index: GridIndex,
}

impl PlanTree {
    /// Tree holding only `root`. `cell` sizes the spatial index buckets.
    pub fn new(root: PlanarPoint, bounds: Bounds, cell: f64) -> Self {
        let mut index = GridIndex::new(bounds, cell);
        index.insert(root);
        Self {
            vertices: vec![root],
            parents: vec![None],
            costs: vec![0.0],
            children: vec![Vec::new()],
            index,
        }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertex(&self, v: usize) -> PlanarPoint {
        self.vertices[v]
    }

    pub fn vertices(&self) -> &[PlanarPoint] {
        &self.vertices
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parents[v]
    }

    pub fn cost(&self, v: usize) -> f64 {
        self.costs[v]
    }

    pub fn costs(&self) -> &[f64] {
        &self.costs
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn nearest(&self, p: PlanarPoint) -> usize {
        self.index.nearest(p).expect("tree always holds its root")
    }

    pub fn within(&self, p: PlanarPoint, radius: f64) -> Vec<usize> {
        self.index.within(p, radius)
    }

    pub(crate) fn add(&mut self, p: PlanarPoint, parent: usize, cost: f64) -> usize {
        let id = self.index.insert(p);
        debug_assert_eq!(id, self.vertices.len());
        self.vertices.push(p);
        self.parents.push(Some(parent));
        self.costs.push(cost);
        self.children.push(Vec::new());
        self.children[parent].push(id);
        id
    }

    pub(crate) fn is_ancestor(&self, ancestor: usize, mut v: usize) -> bool {
        loop {
            if v == ancestor {
                return true;
            }
            match self.parents[v] {
                Some(p) => v = p,
                None => return false,
            }
        }
    }

    /// Move `v` under `new_parent` with cost `new_cost`, shifting the whole
    /// subtree by the same amount.
    pub(crate) fn reparent(&mut self, v: usize, new_parent: usize, new_cost: f64) {
        debug_assert!(!self.is_ancestor(v, new_parent));
        if let Some(old) = self.parents[v] {
            let siblings = &mut self.children[old];
            if let Some(pos) = siblings.iter().position(|&c| c == v) {
                siblings.swap_remove(pos);
            }
        }
        self.parents[v] = Some(new_parent);
        self.children[new_parent].push(v);
        let delta = new_cost - self.costs[v];
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            self.costs[u] += delta;
            stack.extend_from_slice(&self.children[u]);
        }
    }

    /// Vertices from the root to `v`, inclusive.
    pub fn path_from_root(&self, v: usize) -> Vec<usize> {
        let mut chain = vec![v];
        let mut cur = v;
        while let Some(p) = self.parents[cur] {
            chain.push(p);
            cur = p;
        }
        chain.reverse();
        chain
    }

    /// Check the structural invariants: one root at index 0, acyclic parent
    /// links, children lists mirroring parents, and every stored cost equal
    /// to its parent's plus the edge cost within `tol`.
    pub fn check_invariants(
        &self,
        model: &ManifoldModel,
        backend: CostBackend,
        tol: f64,
    ) -> Result<(), String> {
        let n = self.len();
        if n == 0 || self.parents[0].is_some() || self.costs[0] != 0.0 {
            return Err("vertex 0 must be the root with cost 0".into());
        }
        for v in 1..n {
            let Some(p) = self.parents[v] else {
                return Err(format!("vertex {v} has no parent"));
            };
            if !self.children[p].contains(&v) {
                return Err(format!("vertex {v} missing from children of {p}"));
            }
            let mut cur = v;
            let mut steps = 0;
            while let Some(q) = self.parents[cur] {
                cur = q;
                steps += 1;
                if steps > n {
                    return Err(format!("cycle through vertex {v}"));
                }
            }
            if cur != 0 {
                return Err(format!("vertex {v} does not reach the root"));
            }
            let expect = self.costs[p] + backend.edge_cost(model, self.vertices[p], self.vertices[v]);
            if (expect - self.costs[v]).abs() > tol {
                return Err(format!(
                    "cost of vertex {v} is {} but parent chain gives {expect}",
                    self.costs[v]
                ));
            }
        }
        let child_links: usize = self.children.iter().map(Vec::len).sum();
        if child_links != n - 1 {
            return Err(format!("{child_links} child links for {n} vertices"));
        }
        Ok(())
    }
}
