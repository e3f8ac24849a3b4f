use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shape of the lattice support.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridKind {
    Disk,
    Square,
}

impl fmt::Display for GridKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GridKind::Disk => f.write_str("disk"),
            GridKind::Square => f.write_str("square"),
        }
    }
}

/// Lightweight description of a grid, used in reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridDescriptor {
    pub kind: GridKind,
    #[serde(rename = "R")]
    pub radius: f64,
    pub n: usize,
    pub masked: usize,
}

const NONE: u32 = u32::MAX;

/// Cell-centered `n × n` lattice over `[c - R, c + R]²` with a node mask.
///
/// Nodes sit at `c - R + (i + 1/2) h` with `h = 2R / n`; lattice id is
/// `j * n + i` where `i` runs along x and `j` along y. Masked nodes are
/// numbered in lattice order.
#[derive(Clone)]
pub struct Grid {
    kind: GridKind,
    center: [f64; 2],
    radius: f64,
    n: usize,
    h: f64,
    mask: Vec<bool>,
    index: Vec<u32>,
    nodes: Vec<u32>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("kind", &self.kind)
            .field("center", &self.center)
            .field("radius", &self.radius)
            .field("n", &self.n)
            .field("masked", &self.nodes.len())
            .finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.same_lattice(other) && self.mask == other.mask
    }
}

impl Grid {
    /// Builds a disk or square grid centered at the origin.
    pub fn new(kind: GridKind, radius: f64, n: usize) -> Result<Self> {
        Self::with_center(kind, [0.0, 0.0], radius, n)
    }

    pub fn disk(radius: f64, n: usize) -> Result<Self> {
        Self::new(GridKind::Disk, radius, n)
    }

    pub fn square(radius: f64, n: usize) -> Result<Self> {
        Self::new(GridKind::Square, radius, n)
    }

    pub fn with_center(kind: GridKind, center: [f64; 2], radius: f64, n: usize) -> Result<Self> {
        if n < 4 {
            return Err(Error::invalid(format!("grid needs at least 4 nodes per axis, got {n}")));
        }
        if radius <= 0.0 || !radius.is_finite() {
            return Err(Error::invalid(format!("grid radius must be positive, got {radius}")));
        }
        if !center.iter().all(|c| c.is_finite()) {
            return Err(Error::invalid("grid center must be finite"));
        }
        if n > 1 << 14 {
            return Err(Error::invalid(format!("grid too large: n = {n}")));
        }
        let h = 2.0 * radius / n as f64;
        let mut mask = vec![false; n * n];
        for j in 0..n {
            for i in 0..n {
                mask[j * n + i] = match kind {
                    GridKind::Square => true,
                    GridKind::Disk => {
                        let x = -radius + (i as f64 + 0.5) * h;
                        let y = -radius + (j as f64 + 0.5) * h;
                        x * x + y * y < radius * radius
                    }
                };
            }
        }
        Ok(Self::from_parts(kind, center, radius, n, mask))
    }

    fn from_parts(kind: GridKind, center: [f64; 2], radius: f64, n: usize, mask: Vec<bool>) -> Self {
        let h = 2.0 * radius / n as f64;
        let mut index = vec![NONE; n * n];
        let mut nodes = Vec::new();
        for (l, &m) in mask.iter().enumerate() {
            if m {
                index[l] = nodes.len() as u32;
                nodes.push(l as u32);
            }
        }
        Grid { kind, center, radius, n, h, mask, index, nodes }
    }

    /// Same lattice with the mask intersected by `keep`.
    pub fn submask(&self, keep: impl Fn(usize) -> bool) -> Grid {
        let mask = self.mask.iter().enumerate().map(|(l, &m)| m && keep(l)).collect();
        Self::from_parts(self.kind, self.center, self.radius, self.n, mask)
    }

    /// Same lattice with an explicit mask; the mask must be a subset of this grid's.
    pub fn with_mask(&self, mask: Vec<bool>) -> Result<Grid> {
        if mask.len() != self.n * self.n {
            return Err(Error::invalid("mask length does not match lattice"));
        }
        if mask.iter().zip(&self.mask).any(|(&new, &old)| new && !old) {
            return Err(Error::invalid("mask is not contained in the grid domain"));
        }
        Ok(Self::from_parts(self.kind, self.center, self.radius, self.n, mask))
    }

    /// Grid restricted to the open disk `|x - c| < r`.
    pub fn restricted(&self, r: f64) -> Result<Grid> {
        if !(r > 0.0) || r > self.radius {
            return Err(Error::invalid(format!("restriction radius must lie in (0, {}], got {r}", self.radius)));
        }
        Ok(self.submask(|l| {
            let [x, y] = self.lattice_point(l);
            let (dx, dy) = (x - self.center[0], y - self.center[1]);
            dx * dx + dy * dy < r * r
        }))
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    pub fn center(&self) -> [f64; 2] {
        self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn descriptor(&self) -> GridDescriptor {
        GridDescriptor { kind: self.kind, radius: self.radius, n: self.n, masked: self.len() }
    }

    /// Lattice (kind, center, radius, n) agrees; masks may differ.
    pub fn same_lattice(&self, other: &Grid) -> bool {
        self.kind == other.kind && self.center == other.center && self.radius == other.radius && self.n == other.n
    }

    /// `mask ⊆ other.mask` on a shared lattice.
    pub fn is_subgrid_of(&self, other: &Grid) -> bool {
        self.same_lattice(other) && self.mask.iter().zip(&other.mask).all(|(&a, &b)| !a || b)
    }

    /// Coordinates of lattice id `l`.
    pub fn lattice_point(&self, l: usize) -> [f64; 2] {
        let (i, j) = (l % self.n, l / self.n);
        [
            self.center[0] - self.radius + (i as f64 + 0.5) * self.h,
            self.center[1] - self.radius + (j as f64 + 0.5) * self.h,
        ]
    }

    /// Coordinates of masked node `k`.
    pub fn point(&self, k: usize) -> [f64; 2] {
        self.lattice_point(self.nodes[k] as usize)
    }

    /// Integer lattice coordinates `(i, j)` of masked node `k`.
    pub fn ij(&self, k: usize) -> (usize, usize) {
        let l = self.nodes[k] as usize;
        (l % self.n, l / self.n)
    }

    pub fn lattice_id(&self, k: usize) -> usize {
        self.nodes[k] as usize
    }

    /// Masked index at lattice position `(i, j)`, if inside the mask.
    pub fn index_at(&self, i: isize, j: isize) -> Option<usize> {
        let n = self.n as isize;
        if i < 0 || j < 0 || i >= n || j >= n {
            return None;
        }
        let id = self.index[(j * n + i) as usize];
        (id != NONE).then_some(id as usize)
    }

    /// Masked index of lattice id `l`.
    pub fn index_of_lattice(&self, l: usize) -> Option<usize> {
        let id = *self.index.get(l)?;
        (id != NONE).then_some(id as usize)
    }

    /// Masked neighbor of node `k` displaced by `(di, dj)` lattice steps.
    pub fn neighbor(&self, k: usize, di: isize, dj: isize) -> Option<usize> {
        let (i, j) = self.ij(k);
        self.index_at(i as isize + di, j as isize + dj)
    }

    /// True when all axis neighbors up to `depth` steps are masked.
    pub fn is_interior(&self, k: usize, depth: isize) -> bool {
        (1..=depth).all(|d| {
            self.neighbor(k, d, 0).is_some()
                && self.neighbor(k, -d, 0).is_some()
                && self.neighbor(k, 0, d).is_some()
                && self.neighbor(k, 0, -d).is_some()
        })
    }

    /// True when some 4-neighbor of node `k` is outside the mask.
    pub fn is_edge(&self, k: usize) -> bool {
        !self.is_interior(k, 1)
    }

    /// Distance of node `k` from the grid center.
    pub fn dist_from_center(&self, k: usize) -> f64 {
        let [x, y] = self.point(k);
        (x - self.center[0]).hypot(y - self.center[1])
    }
}
