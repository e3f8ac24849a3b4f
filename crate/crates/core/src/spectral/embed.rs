use crate::domain::{Field, FieldValue, GridKind};
use crate::error::{Error, Result};
use crate::sobolev::inversion_extension;

use super::field::PeriodicField;

/// Smooth step: 0 for `t ≤ 0`, 1 for `t ≥ 1`.
fn smooth_step(t: f64) -> f64 {
    let g = |t: f64| if t <= 0.0 { 0.0 } else { (-1.0 / t).exp() };
    let (a, b) = (g(t), g(1.0 - t));
    a / (a + b)
}

/// Cutoff equal to 1 on `|x| ≤ 1` and 0 on `|x| ≥ 1.5` (radii in units of
/// the disk radius).
pub fn embed_cutoff(r: f64) -> f64 {
    1.0 - smooth_step((r - 1.0) / 0.5)
}

/// Places a field on the disk `B(c, R)` into a periodic square of side
/// `2·pad·R`, with `c` moved to the origin.
///
/// The field is extended by inversion to `B(c, 2R)`, multiplied by
/// [`embed_cutoff`], and zero-filled beyond. The periodic lattice keeps the
/// disk spacing, so `pad · n` must be a power of two; disk node `(i, j)` is
/// periodic node `(i + o, j + o)` with `o = (pad − 1) n / 2`, where the value
/// is unchanged.
pub fn embed<T: FieldValue>(f: &Field<T>, pad: usize) -> Result<PeriodicField> {
    if pad < 2 {
        return Err(Error::invalid(format!("padding factor must be at least 2, got {pad}")));
    }
    let g = f.grid();
    if g.kind() != GridKind::Disk {
        return Err(Error::invalid("embedding needs a disk grid"));
    }
    let n = g.n();
    let n_per = pad * n;
    if !n_per.is_power_of_two() || !n.is_multiple_of(2) {
        return Err(Error::invalid(format!("pad · n must be a power of two, got {n_per}")));
    }
    let ext = inversion_extension(f, 2.0)?;
    let eg = ext.grid();
    let offset = (n_per - eg.n()) / 2;
    let (c, r) = (g.center(), g.radius());
    let mut channels = vec![vec![0.0; n_per * n_per]; T::COMPONENTS];
    for (k, v) in ext.values().iter().enumerate() {
        let [x, y] = eg.point(k);
        let chi = embed_cutoff((x - c[0]).hypot(y - c[1]) / r);
        if chi == 0.0 {
            continue;
        }
        let (i, j) = eg.ij(k);
        let l = (j + offset) * n_per + i + offset;
        for (ch, channel) in channels.iter_mut().enumerate() {
            channel[l] = chi * v.component(ch);
        }
    }
    PeriodicField::new(2.0 * pad as f64 * r, n_per, channels)
}
