//! Uniform bucket grid over the workspace for nearest / radius queries.
//!
//! Points outside the gridded rectangle go to an overflow list that every
//! query scans linearly.

use crate::metric::{Bounds, PlanarPoint};

#[derive(Debug, Clone)]
pub struct GridIndex {
    bounds: Bounds,
    cell: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<usize>>,
    overflow: Vec<usize>,
    points: Vec<PlanarPoint>,
}

impl GridIndex {
    pub fn new(bounds: Bounds, cell: f64) -> Self {
        assert!(cell > 0.0, "grid cell size must be positive");
        let nx = ((bounds.width() / cell).ceil() as usize).max(1);
        let ny = ((bounds.height() / cell).ceil() as usize).max(1);
        Self {
            bounds,
            cell,
            nx,
            ny,
            buckets: vec![Vec::new(); nx * ny],
            overflow: Vec::new(),
            points: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn cell_of(&self, p: PlanarPoint) -> Option<(usize, usize)> {
        if !self.bounds.contains(p) {
            return None;
        }
        let i = ((p.x1 - self.bounds.min.x1) / self.cell) as usize;
        let j = ((p.x2 - self.bounds.min.x2) / self.cell) as usize;
        Some((i.min(self.nx - 1), j.min(self.ny - 1)))
    }

    /// Insert the next point; its id is the insertion order.
    pub fn insert(&mut self, p: PlanarPoint) -> usize {
        let id = self.points.len();
        self.points.push(p);
        match self.cell_of(p) {
            Some((i, j)) => self.buckets[j * self.nx + i].push(id),
            None => self.overflow.push(id),
        }
        id
    }

    fn consider(&self, id: usize, q: PlanarPoint, best: &mut Option<(f64, usize)>) {
        let d = self.points[id].distance_sq(q);
        match best {
            Some((bd, bi)) if d > *bd || (d == *bd && id > *bi) => {}
            _ => *best = Some((d, id)),
        }
    }

    /// Closest point to `q`; ties go to the lowest id.
    pub fn nearest(&self, q: PlanarPoint) -> Option<usize> {
        if self.points.is_empty() {
            return None;
        }
        let mut best = None;
        for &id in &self.overflow {
            self.consider(id, q, &mut best);
        }
        let Some((ci, cj)) = self.cell_of(q) else {
            for id in 0..self.points.len() {
                self.consider(id, q, &mut best);
            }
            return best.map(|(_, id)| id);
        };
        let max_ring = self.nx.max(self.ny);
        for ring in 0..=max_ring {
            self.visit_ring(ci, cj, ring, |id| self.consider(id, q, &mut best));
            // Anything in a ring beyond this one is at least `ring * cell` away.
            if let Some((d, _)) = best {
                let reach = ring as f64 * self.cell;
                if reach * reach > d {
                    break;
                }
            }
        }
        best.map(|(_, id)| id)
    }

    fn visit_ring(&self, ci: usize, cj: usize, ring: usize, mut f: impl FnMut(usize)) {
        let (ci, cj, r) = (ci as isize, cj as isize, ring as isize);
        let (nx, ny) = (self.nx as isize, self.ny as isize);
        for j in (cj - r)..=(cj + r) {
            if j < 0 || j >= ny {
                continue;
            }
            let on_edge_row = j == cj - r || j == cj + r;
            let step = if on_edge_row || r == 0 { 1 } else { 2 * r };
            let mut i = ci - r;
            while i <= ci + r {
                if i >= 0 && i < nx {
                    for &id in &self.buckets[(j * nx + i) as usize] {
                        f(id);
                    }
                }
                i += step;
            }
        }
    }

    /// Ids within `radius` of `q` (closed ball), ascending.
    pub fn within(&self, q: PlanarPoint, radius: f64) -> Vec<usize> {
        let r_sq = radius * radius;
        let mut out: Vec<usize> = self
            .overflow
            .iter()
            .copied()
            .filter(|&id| self.points[id].distance_sq(q) <= r_sq)
            .collect();
        if self.bounds.contains(q) {
            let lo_i = ((q.x1 - radius - self.bounds.min.x1) / self.cell).floor().max(0.0) as usize;
            let lo_j = ((q.x2 - radius - self.bounds.min.x2) / self.cell).floor().max(0.0) as usize;
            let hi_i = (((q.x1 + radius - self.bounds.min.x1) / self.cell).floor() as usize).min(self.nx - 1);
            let hi_j = (((q.x2 + radius - self.bounds.min.x2) / self.cell).floor() as usize).min(self.ny - 1);
            for j in lo_j..=hi_j {
                for i in lo_i..=hi_i {
                    out.extend(
                        self.buckets[j * self.nx + i]
                            .iter()
                            .copied()
                            .filter(|&id| self.points[id].distance_sq(q) <= r_sq),
                    );
                }
            }
        } else {
            out = (0..self.points.len())
                .filter(|&id| self.points[id].distance_sq(q) <= r_sq)
                .collect();
        }
        out.sort_unstable();
        out
    }
}
