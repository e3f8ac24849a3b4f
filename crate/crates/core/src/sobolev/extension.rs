use std::sync::Arc;

use crate::domain::{Field, FieldValue, Grid, GridKind};
use crate::error::{Error, Result};

/// Values at an off-lattice point by bilinear interpolation over the masked
/// corners of the enclosing cell, weights renormalized; the nearest masked
/// node when no corner is masked.
pub fn sample_bilinear<T: FieldValue>(f: &Field<T>, q: [f64; 2]) -> T {
    let g = f.grid();
    let h = g.h();
    let [cx, cy] = g.center();
    let fx = (q[0] - (cx - g.radius())) / h - 0.5;
    let fy = (q[1] - (cy - g.radius())) / h - 0.5;
    let (i0, j0) = (fx.floor(), fy.floor());
    let (tx, ty) = (fx - i0, fy - j0);
    let (i0, j0) = (i0 as isize, j0 as isize);
    let corners = [
        (i0, j0, (1.0 - tx) * (1.0 - ty)),
        (i0 + 1, j0, tx * (1.0 - ty)),
        (i0, j0 + 1, (1.0 - tx) * ty),
        (i0 + 1, j0 + 1, tx * ty),
    ];
    // Weighted mean written as an offset from the first masked corner, so
    // constant data is reproduced exactly.
    let mut base: Option<T> = None;
    let mut acc = [0.0; 3];
    let mut wsum = 0.0;
    for (i, j, w) in corners {
        if let Some(k) = g.index_at(i, j) {
            if w > 0.0 {
                let v = f.values()[k];
                let b = *base.get_or_insert(v);
                for (c, a) in acc.iter_mut().enumerate().take(T::COMPONENTS) {
                    *a += w * (v.component(c) - b.component(c));
                }
                wsum += w;
            }
        }
    }
    if let Some(b) = base.filter(|_| wsum > 1e-12) {
        return b.map_components(|c, x| x + acc[c] / wsum);
    }
    f.values()[nearest_masked(g, q)]
}

fn nearest_masked(g: &Grid, q: [f64; 2]) -> usize {
    let mut best = (f64::INFINITY, 0);
    for k in 0..g.len() {
        let [x, y] = g.point(k);
        let d = (x - q[0]).powi(2) + (y - q[1]).powi(2);
        if d < best.0 {
            best = (d, k);
        }
    }
    best.1
}

/// Extension of a field on the disk `B(c, R)` to `B(c, ΛR)` by inversion:
/// `v(x) = u(x)` inside and `v(x) = u(c + R²(x − c)/|x − c|²)` outside.
///
/// The output lattice shares the input spacing: it has `n + 2m` nodes per
/// axis with `m = ⌈(Λ − 1) R / h⌉`, so its radius is `R + m h ≥ ΛR` and the
/// inner nodes coincide with the input nodes. Inverted points are sampled by
/// [`sample_bilinear`].
pub fn inversion_extension<T: FieldValue>(u: &Field<T>, lambda: f64) -> Result<Field<T>> {
    let g = u.grid();
    if g.kind() != GridKind::Disk {
        return Err(Error::invalid("inversion extension needs a disk grid"));
    }
    let full = Grid::with_center(GridKind::Disk, g.center(), g.radius(), g.n())?;
    if full.mask() != g.mask() {
        return Err(Error::invalid("inversion extension needs the full disk mask"));
    }
    if !(lambda > 1.0 && lambda <= 8.0) {
        return Err(Error::invalid(format!("extension scale must lie in (1, 8], got {lambda}")));
    }
    let (r, h) = (g.radius(), g.h());
    let m = (((lambda - 1.0) * r / h) - 1e-9).ceil().max(1.0) as usize;
    let out = Arc::new(Grid::with_center(GridKind::Disk, g.center(), r + m as f64 * h, g.n() + 2 * m)?);
    let c = g.center();
    let values = (0..out.len())
        .map(|k| {
            let (i, j) = out.ij(k);
            let (ii, jj) = (i as isize - m as isize, j as isize - m as isize);
            if let Some(inner) = g.index_at(ii, jj) {
                return u.values()[inner];
            }
            let [x, y] = out.point(k);
            let (dx, dy) = (x - c[0], y - c[1]);
            let scale = r * r / (dx * dx + dy * dy);
            sample_bilinear(u, [c[0] + scale * dx, c[1] + scale * dy])
        })
        .collect();
    Field::new(out, values)
}
