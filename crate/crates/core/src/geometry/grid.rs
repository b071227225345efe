use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use serde::{Deserialize, Serialize};

use super::Domain;
use crate::error::{LabError, Result};

/// Planar domain given by a boolean raster.
///
/// Cell `(i, j)` covers `[ox + i h, ox + (i+1) h] × [oy + j h, oy + (j+1) h]`,
/// rows indexed upward from the origin. Everything outside the raster is
/// exterior. The boundary distance of an interior cell is the distance from
/// its centre to the nearest exterior cell centre minus half a cell, which is
/// exact along the axes and within one spacing otherwise.
#[derive(Debug, Clone)]
pub struct GridDomain {
    nx: usize,
    ny: usize,
    origin: [f64; 2],
    spacing: f64,
    mask: Vec<bool>,
    dist: Vec<f64>,
}

/// Polygon list accepted by [`GridDomain::from_polygons`]. Cells whose centres
/// fall inside an odd number of polygons are interior.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolygonSet {
    pub spacing: f64,
    pub polygons: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct HeapEntry {
    cost: f64,
    cell: usize,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.cell.cmp(&self.cell))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

const NEIGHBOURS: [(isize, isize); 8] = [
    (1, 0),
    (-1, 0),
    (0, 1),
    (0, -1),
    (1, 1),
    (1, -1),
    (-1, 1),
    (-1, -1),
];

impl GridDomain {
    pub fn from_mask(
        nx: usize,
        ny: usize,
        origin: [f64; 2],
        spacing: f64,
        mask: Vec<bool>,
    ) -> Result<Self> {
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(LabError::Configuration(format!("invalid grid spacing {spacing}")));
        }
        if mask.len() != nx * ny {
            return Err(LabError::Configuration(format!(
                "mask has {} cells, expected {}x{}",
                mask.len(),
                nx,
                ny
            )));
        }
        if !mask.iter().any(|&m| m) {
            return Err(LabError::Configuration("mask has no interior cells".into()));
        }
        let dist = boundary_distances(nx, ny, spacing, &mask);
        Ok(Self {
            nx,
            ny,
            origin,
            spacing,
            mask,
            dist,
        })
    }

    /// Rasterizes `{x : inside(x)}` over the box `[lo, hi]`.
    pub fn from_predicate(
        lo: [f64; 2],
        hi: [f64; 2],
        spacing: f64,
        inside: impl Fn([f64; 2]) -> bool,
    ) -> Result<Self> {
        if !(hi[0] > lo[0] && hi[1] > lo[1]) {
            return Err(LabError::Configuration("empty bounding box".into()));
        }
        let nx = ((hi[0] - lo[0]) / spacing).ceil() as usize;
        let ny = ((hi[1] - lo[1]) / spacing).ceil() as usize;
        let mut mask = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                let c = [
                    lo[0] + (i as f64 + 0.5) * spacing,
                    lo[1] + (j as f64 + 0.5) * spacing,
                ];
                mask.push(inside(c));
            }
        }
        Self::from_mask(nx, ny, lo, spacing, mask)
    }

    /// Unit disk with `cells_across` cells along the diameter.
    pub fn unit_disk(cells_across: usize) -> Result<Self> {
        let h = 2.0 / cells_across as f64;
        Self::from_predicate([-1.0, -1.0], [1.0, 1.0], h, |c| {
            c[0] * c[0] + c[1] * c[1] < 1.0
        })
    }

    /// Parses rows of `0`/`1` characters; the first row is the top of the
    /// raster. Blank lines are ignored.
    pub fn parse_raster(text: &str, origin: [f64; 2], spacing: f64) -> Result<Self> {
        let rows: Vec<&str> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .collect();
        if rows.is_empty() {
            return Err(LabError::Parse("empty raster".into()));
        }
        let nx = rows[0].len();
        let ny = rows.len();
        let mut mask = vec![false; nx * ny];
        for (r, row) in rows.iter().enumerate() {
            if row.len() != nx {
                return Err(LabError::Parse(format!(
                    "raster row {r} has length {}, expected {nx}",
                    row.len()
                )));
            }
            let j = ny - 1 - r;
            for (i, ch) in row.chars().enumerate() {
                mask[j * nx + i] = match ch {
                    '1' => true,
                    '0' => false,
                    other => {
                        return Err(LabError::Parse(format!("unexpected raster character {other:?}")))
                    }
                };
            }
        }
        Self::from_mask(nx, ny, origin, spacing, mask)
    }

    pub fn from_polygons(set: &PolygonSet) -> Result<Self> {
        let pts: Vec<[f64; 2]> = set.polygons.iter().flatten().copied().collect();
        if pts.is_empty() {
            return Err(LabError::Configuration("polygon list is empty".into()));
        }
        let (lo, hi) = bounding_box(&pts, set.spacing);
        Self::from_predicate(lo, hi, set.spacing, |c| {
            set.polygons.iter().filter(|p| point_in_polygon(c, p)).count() % 2 == 1
        })
    }

    pub fn from_polygon_json(json: &str) -> Result<Self> {
        let set: PolygonSet = serde_json::from_str(json).map_err(|e| LabError::Parse(e.to_string()))?;
        Self::from_polygons(&set)
    }

    /// Rasterizes a cloud of forward samples and closes the result
    /// morphologically with a square element of `closing_radius` cells.
    /// The result approximates the image domain only.
    pub fn from_samples_closed(
        samples: &[[f64; 2]],
        spacing: f64,
        closing_radius: usize,
    ) -> Result<Self> {
        if samples.is_empty() {
            return Err(LabError::Configuration("no samples to rasterize".into()));
        }
        let pad = spacing * (closing_radius as f64 + 2.0);
        let (mut lo, mut hi) = bounding_box(samples, 0.0);
        lo = [lo[0] - pad, lo[1] - pad];
        hi = [hi[0] + pad, hi[1] + pad];
        let nx = ((hi[0] - lo[0]) / spacing).ceil() as usize;
        let ny = ((hi[1] - lo[1]) / spacing).ceil() as usize;
        if nx * ny > 16_000_000 {
            return Err(LabError::Configuration(format!("image raster too large ({nx}x{ny})")));
        }
        let mut mask = vec![false; nx * ny];
        for p in samples {
            let i = ((p[0] - lo[0]) / spacing).floor() as usize;
            let j = ((p[1] - lo[1]) / spacing).floor() as usize;
            if i < nx && j < ny {
                mask[j * nx + i] = true;
            }
        }
        let dilated = morph(&mask, nx, ny, closing_radius, true);
        let closed = morph(&dilated, nx, ny, closing_radius, false);
        Self::from_mask(nx, ny, lo, spacing, closed)
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    pub fn interior_cells(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    pub fn cell_center(&self, cell: usize) -> [f64; 2] {
        let (i, j) = (cell % self.nx, cell / self.nx);
        [
            self.origin[0] + (i as f64 + 0.5) * self.spacing,
            self.origin[1] + (j as f64 + 0.5) * self.spacing,
        ]
    }

    /// Interior cell containing `x`, if any.
    pub fn cell_of(&self, x: &[f64]) -> Option<usize> {
        if x.len() != 2 {
            return None;
        }
        let fi = (x[0] - self.origin[0]) / self.spacing;
        let fj = (x[1] - self.origin[1]) / self.spacing;
        if !(fi >= 0.0 && fj >= 0.0) {
            return None;
        }
        let (i, j) = (fi.floor() as usize, fj.floor() as usize);
        if i >= self.nx || j >= self.ny {
            return None;
        }
        let c = j * self.nx + i;
        self.mask[c].then_some(c)
    }

    pub fn cell_distance(&self, cell: usize) -> f64 {
        self.dist[cell]
    }

    /// True when all interior cells form one 8-connected component.
    pub fn is_connected(&self) -> bool {
        let Some(start) = self.mask.iter().position(|&m| m) else {
            return false;
        };
        let mut seen = vec![false; self.mask.len()];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        let mut count = 1;
        while let Some(c) = queue.pop_front() {
            for nb in self.neighbours(c) {
                if !seen[nb.0] {
                    seen[nb.0] = true;
                    count += 1;
                    queue.push_back(nb.0);
                }
            }
        }
        count == self.interior_cells()
    }

    fn neighbours(&self, cell: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (i, j) = ((cell % self.nx) as isize, (cell / self.nx) as isize);
        NEIGHBOURS.iter().filter_map(move |&(di, dj)| {
            let (a, b) = (i + di, j + dj);
            if a < 0 || b < 0 || a >= self.nx as isize || b >= self.ny as isize {
                return None;
            }
            let c = b as usize * self.nx + a as usize;
            if !self.mask[c] {
                return None;
            }
            let len = if di != 0 && dj != 0 {
                std::f64::consts::SQRT_2
            } else {
                1.0
            } * self.spacing;
            Some((c, len))
        })
    }

    /// Single-source quasihyperbolic distances on the 8-connected cell graph.
    /// Edge weight is `length / d(midpoint)`, with the midpoint distance taken
    /// as the mean of the two cell distances. Unreachable cells are `+∞`.
    pub fn quasihyperbolic_from(&self, source: usize) -> Vec<f64> {
        let mut best = vec![f64::INFINITY; self.mask.len()];
        let mut heap = BinaryHeap::new();
        best[source] = 0.0;
        heap.push(HeapEntry {
            cost: 0.0,
            cell: source,
        });
        while let Some(HeapEntry { cost, cell }) = heap.pop() {
            if cost > best[cell] {
                continue;
            }
            for (nb, len) in self.neighbours(cell) {
                let mid = 0.5 * (self.dist[cell] + self.dist[nb]);
                let next = cost + len / mid;
                if next < best[nb] {
                    best[nb] = next;
                    heap.push(HeapEntry { cost: next, cell: nb });
                }
            }
        }
        best
    }
}

impl Domain for GridDomain {
    fn dimension(&self) -> usize {
        2
    }

    fn boundary_distance(&self, x: &[f64]) -> Result<f64> {
        self.cell_of(x)
            .map(|c| self.dist[c])
            .ok_or_else(|| LabError::domain(format!("point {x:?} is not interior to the grid domain")))
    }
}

fn bounding_box(pts: &[[f64; 2]], pad: f64) -> ([f64; 2], [f64; 2]) {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for p in pts {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    ([lo[0] - pad, lo[1] - pad], [hi[0] + pad, hi[1] + pad])
}

fn point_in_polygon(p: [f64; 2], poly: &[[f64; 2]]) -> bool {
    let mut inside = false;
    let n = poly.len();
    for k in 0..n {
        let a = poly[k];
        let b = poly[(k + 1) % n];
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = a[0] + (p[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
            if p[0] < x {
                inside = !inside;
            }
        }
    }
    inside
}

fn morph(mask: &[bool], nx: usize, ny: usize, radius: usize, dilate: bool) -> Vec<bool> {
    let r = radius as isize;
    let mut out = vec![false; mask.len()];
    for j in 0..ny as isize {
        for i in 0..nx as isize {
            let mut hit = !dilate;
            'scan: for dj in -r..=r {
                for di in -r..=r {
                    let (a, b) = (i + di, j + dj);
                    let v = a >= 0
                        && b >= 0
                        && a < nx as isize
                        && b < ny as isize
                        && mask[b as usize * nx + a as usize];
                    if dilate && v {
                        hit = true;
                        break 'scan;
                    }
                    if !dilate && !v {
                        hit = false;
                        break 'scan;
                    }
                }
            }
            out[j as usize * nx + i as usize] = hit;
        }
    }
    out
}

/// 1D squared distance transform (lower envelope of parabolas).
fn edt_1d(f: &[f64]) -> Vec<f64> {
    let n = f.len();
    let mut d = vec![0.0; n];
    let mut v = vec![0usize; n];
    let mut z = vec![0.0; n + 1];
    let mut k = 0usize;
    let first = match f.iter().position(|x| x.is_finite()) {
        Some(q) => q,
        None => return vec![f64::INFINITY; n],
    };
    v[0] = first;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    for q in first + 1..n {
        if !f[q].is_finite() {
            continue;
        }
        loop {
            let p = v[k];
            let s = ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64)) / (2.0 * (q as f64 - p as f64));
            // z[0] = -inf, so this terminates with k >= 0.
            if s <= z[k] {
                k -= 1;
                continue;
            }
            k += 1;
            v[k] = q;
            z[k] = s;
            z[k + 1] = f64::INFINITY;
            break;
        }
    }
    k = 0;
    for (q, dq) in d.iter_mut().enumerate() {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let p = v[k];
        *dq = (q as f64 - p as f64).powi(2) + f[p];
    }
    d
}

fn boundary_distances(nx: usize, ny: usize, spacing: f64, mask: &[bool]) -> Vec<f64> {
    // Pad by one exterior cell on every side.
    let (px, py) = (nx + 2, ny + 2);
    let mut g = vec![0.0; px * py];
    for j in 0..ny {
        for i in 0..nx {
            if mask[j * nx + i] {
                g[(j + 1) * px + i + 1] = f64::INFINITY;
            }
        }
    }
    let mut col = vec![0.0; py];
    for i in 0..px {
        for j in 0..py {
            col[j] = g[j * px + i];
        }
        let d = edt_1d(&col);
        for j in 0..py {
            g[j * px + i] = d[j];
        }
    }
    for j in 0..py {
        let row = edt_1d(&g[j * px..(j + 1) * px]);
        g[j * px..(j + 1) * px].copy_from_slice(&row);
    }
    let mut out = vec![0.0; nx * ny];
    for j in 0..ny {
        for i in 0..nx {
            if mask[j * nx + i] {
                out[j * nx + i] = (g[(j + 1) * px + i + 1].sqrt() - 0.5) * spacing;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_distance(grid: &GridDomain, cell: usize) -> f64 {
        // Oracle: minimum over all exterior cells, including the padding ring.
        let (nx, ny) = grid.shape();
        let c = grid.cell_center(cell);
        let mut best = f64::INFINITY;
        for j in -1..=ny as isize {
            for i in -1..=nx as isize {
                let outside = i < 0
                    || j < 0
                    || i >= nx as isize
                    || j >= ny as isize
                    || !grid.mask[j as usize * nx + i as usize];
                if outside {
                    let e = [
                        grid.origin[0] + (i as f64 + 0.5) * grid.spacing,
                        grid.origin[1] + (j as f64 + 0.5) * grid.spacing,
                    ];
                    best = best.min(((c[0] - e[0]).powi(2) + (c[1] - e[1]).powi(2)).sqrt());
                }
            }
        }
        best - 0.5 * grid.spacing
    }

    #[test]
    fn unit_square_distance_matches_brute_force() {
        let h = 1.0 / 64.0;
        let g = GridDomain::from_predicate([0.0, 0.0], [1.0, 1.0], h, |_| true).unwrap();
        let d = g.boundary_distance(&[0.25, 0.5]).unwrap();
        assert!((d - 0.25).abs() <= h, "d = {d}");
        for cell in (0..g.mask.len()).step_by(37) {
            assert!((g.cell_distance(cell) - brute_distance(&g, cell)).abs() < 1e-12);
        }
    }

    #[test]
    fn disk_distance_matches_brute_force() {
        let g = GridDomain::unit_disk(40).unwrap();
        for cell in (0..g.mask.len()).filter(|&c| g.mask[c]).step_by(11) {
            assert!((g.cell_distance(cell) - brute_distance(&g, cell)).abs() < 1e-12);
        }
        assert!(g.is_connected());
    }

    #[test]
    fn raster_parsing() {
        let g = GridDomain::parse_raster("0110\n1111\n0110\n", [0.0, 0.0], 1.0).unwrap();
        assert_eq!(g.shape(), (4, 3));
        assert_eq!(g.interior_cells(), 8);
        // top row is the highest y
        assert!(g.cell_of(&[0.5, 2.5]).is_none());
        assert!(g.cell_of(&[1.5, 2.5]).is_some());
        assert!(GridDomain::parse_raster("01\n1", [0.0, 0.0], 1.0).is_err());
        assert!(GridDomain::parse_raster("0x", [0.0, 0.0], 1.0).is_err());
    }

    #[test]
    fn polygon_json() {
        let json = r#"{"spacing": 0.05, "polygons": [[[0,0],[1,0],[1,1],[0,1]]]}"#;
        let g = GridDomain::from_polygon_json(json).unwrap();
        let d = g.boundary_distance(&[0.5, 0.5]).unwrap();
        assert!((d - 0.5).abs() <= 0.05);
        assert!(g.boundary_distance(&[1.5, 0.5]).is_err());
    }

    #[test]
    fn disconnected_grid_is_detected() {
        let g = GridDomain::parse_raster("11011", [0.0, 0.0], 1.0).unwrap();
        assert!(!g.is_connected());
        let dist = g.quasihyperbolic_from(g.cell_of(&[0.5, 0.5]).unwrap());
        assert!(dist[g.cell_of(&[4.5, 0.5]).unwrap()].is_infinite());
    }

    #[test]
    fn closing_fills_sample_gaps() {
        let mut pts = Vec::new();
        for i in 0..50 {
            for j in 0..50 {
                pts.push([i as f64 * 0.02, j as f64 * 0.02]);
            }
        }
        let g = GridDomain::from_samples_closed(&pts, 0.015, 2).unwrap();
        assert!(g.is_connected());
        assert!(g.boundary_distance(&[0.5, 0.5]).unwrap() > 0.4);
    }
}
