use std::sync::Arc;

use crate::error::{Error, Result};
use crate::sum::pairwise_sum;

use super::grid::Grid;

/// Value stored at a grid node: a real number or a small real vector.
pub trait FieldValue: Copy + Send + Sync + PartialEq + std::fmt::Debug + 'static {
    const COMPONENTS: usize;

    fn zero() -> Self;
    fn component(&self, c: usize) -> f64;
    fn from_components(c: &[f64]) -> Self;

    fn is_finite(&self) -> bool {
        (0..Self::COMPONENTS).all(|c| self.component(c).is_finite())
    }

    /// Squared Euclidean distance between two values.
    fn dist_sq(&self, other: &Self) -> f64 {
        (0..Self::COMPONENTS)
            .map(|c| {
                let d = self.component(c) - other.component(c);
                d * d
            })
            .sum()
    }

    fn map_components(&self, f: impl Fn(usize, f64) -> f64) -> Self {
        let mut buf = [0.0; 3];
        for (c, slot) in buf.iter_mut().enumerate().take(Self::COMPONENTS) {
            *slot = f(c, self.component(c));
        }
        Self::from_components(&buf[..Self::COMPONENTS])
    }
}

impl FieldValue for f64 {
    const COMPONENTS: usize = 1;

    fn zero() -> Self {
        0.0
    }

    fn component(&self, _c: usize) -> f64 {
        *self
    }

    fn from_components(c: &[f64]) -> Self {
        c[0]
    }

    fn dist_sq(&self, other: &Self) -> f64 {
        let d = self - other;
        d * d
    }
}

impl<const K: usize> FieldValue for [f64; K] {
    const COMPONENTS: usize = K;

    fn zero() -> Self {
        [0.0; K]
    }

    fn component(&self, c: usize) -> f64 {
        self[c]
    }

    fn from_components(c: &[f64]) -> Self {
        let mut out = [0.0; K];
        out.copy_from_slice(&c[..K]);
        out
    }
}

/// Grid-attached samples, one value per masked node.
#[derive(Debug, Clone)]
pub struct Field<T: FieldValue> {
    grid: Arc<Grid>,
    values: Vec<T>,
}

pub type ScalarField = Field<f64>;
pub type VecField2 = Field<[f64; 2]>;
pub type VecField3 = Field<[f64; 3]>;

impl<T: FieldValue> PartialEq for Field<T> {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid) && self.values == other.values
    }
}

impl<T: FieldValue> Field<T> {
    /// Wraps values; rejects length mismatches and non-finite samples.
    pub fn new(grid: Arc<Grid>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::invalid(format!(
                "field has {} values but grid has {} masked nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite value at node {k}")));
        }
        Ok(Field { grid, values })
    }

    /// Samples `f` at every masked node.
    pub fn from_fn(grid: Arc<Grid>, f: impl Fn([f64; 2]) -> T) -> Result<Self> {
        let values = (0..grid.len()).map(|k| f(grid.point(k))).collect();
        Self::new(grid, values)
    }

    pub fn constant(grid: Arc<Grid>, value: T) -> Result<Self> {
        let values = vec![value; grid.len()];
        Self::new(grid, values)
    }

    pub(crate) fn new_unchecked(grid: Arc<Grid>, values: Vec<T>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Field { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn grid_arc(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Component `c` as a scalar field on the same grid.
    pub fn component(&self, c: usize) -> ScalarField {
        assert!(c < T::COMPONENTS);
        Field::new_unchecked(self.grid.clone(), self.values.iter().map(|v| v.component(c)).collect())
    }

    /// Reassembles a vector field from scalar components sharing one grid.
    pub fn from_components(parts: &[ScalarField]) -> Result<Self> {
        if parts.len() != T::COMPONENTS {
            return Err(Error::invalid("wrong number of components"));
        }
        let grid = parts[0].grid.clone();
        if parts.iter().any(|p| *p.grid != *grid) {
            return Err(Error::invalid("components live on different grids"));
        }
        let values = (0..grid.len())
            .map(|k| {
                let buf: Vec<f64> = parts.iter().map(|p| p.values[k]).collect();
                T::from_components(&buf)
            })
            .collect();
        Self::new(grid, values)
    }

    pub fn map<U: FieldValue>(&self, f: impl Fn(&T) -> U) -> Field<U> {
        Field::new_unchecked(self.grid.clone(), self.values.iter().map(f).collect())
    }

    pub fn zip_map<U: FieldValue, V: FieldValue>(&self, other: &Field<U>, f: impl Fn(&T, &U) -> V) -> Result<Field<V>> {
        self.check_same_grid(other.grid())?;
        Ok(Field::new_unchecked(
            self.grid.clone(),
            self.values.iter().zip(&other.values).map(|(a, b)| f(a, b)).collect(),
        ))
    }

    pub(crate) fn check_same_grid(&self, other: &Grid) -> Result<()> {
        if *self.grid != *other {
            return Err(Error::invalid("fields live on different grids"));
        }
        Ok(())
    }

    /// Values on the sub-mask `|x - c| < r`.
    pub fn restrict(&self, r: f64) -> Result<Self> {
        let sub = self.grid.restricted(r)?;
        self.restrict_to(&Arc::new(sub))
    }

    /// Values on `target`, whose mask must be contained in this field's mask.
    pub fn restrict_to(&self, target: &Arc<Grid>) -> Result<Self> {
        if !target.is_subgrid_of(&self.grid) {
            return Err(Error::invalid("target grid is not a subgrid of the field's grid"));
        }
        let values = (0..target.len())
            .map(|k| {
                let l = target.lattice_id(k);
                self.values[self.grid.index_of_lattice(l).expect("subgrid node")]
            })
            .collect();
        Ok(Field::new_unchecked(target.clone(), values))
    }

    /// Value at lattice id `l`, if masked.
    pub fn at_lattice(&self, l: usize) -> Option<T> {
        self.grid.index_of_lattice(l).map(|k| self.values[k])
    }
}

impl ScalarField {
    /// Midpoint rule `Σ f(x) h²` over masked nodes.
    pub fn integrate(&self) -> f64 {
        let h2 = self.grid.h() * self.grid.h();
        let terms: Vec<f64> = self.values.iter().map(|v| v * h2).collect();
        pairwise_sum(&terms)
    }

    pub fn mean(&self) -> f64 {
        pairwise_sum(&self.values) / self.len() as f64
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `(∫ |f|^p)^{1/p}`.
    pub fn lp_norm(&self, p: f64) -> f64 {
        self.map(|v| v.abs().powf(p)).integrate().powf(1.0 / p)
    }

    pub fn scale(&self, a: f64) -> ScalarField {
        self.map(|v| a * v)
    }

    pub fn add(&self, other: &ScalarField) -> Result<ScalarField> {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &ScalarField) -> Result<ScalarField> {
        self.zip_map(other, |a, b| a - b)
    }
}

impl<const K: usize> Field<[f64; K]> {
    /// Pointwise Euclidean norm.
    pub fn norm(&self) -> ScalarField {
        self.map(|v| v.iter().map(|c| c * c).sum::<f64>().sqrt())
    }

    /// `‖v‖_{L²}` with the midpoint rule.
    pub fn l2_norm(&self) -> f64 {
        self.map(|v| v.iter().map(|c| c * c).sum::<f64>()).integrate().sqrt()
    }
}

/// Pointwise Euclidean dot product.
pub fn dot<const K: usize>(a: &[f64; K], b: &[f64; K]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Cross product in R³.
pub fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub fn norm3(a: &[f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Grid;

    #[test]
    fn integrate_constants() {
        let sq = Arc::new(Grid::square(1.0, 16).unwrap());
        assert_eq!(ScalarField::constant(sq.clone(), 1.0).unwrap().integrate(), 4.0);
        assert_eq!(ScalarField::constant(sq, 0.0).unwrap().integrate(), 0.0);

        let disk = Arc::new(Grid::disk(1.0, 256).unwrap());
        let area = ScalarField::constant(disk.clone(), 1.0).unwrap().integrate();
        assert!((area - std::f64::consts::PI).abs() < 0.01 * std::f64::consts::PI);

        let quarter = ScalarField::constant(disk, 1.0).unwrap().restrict(0.5).unwrap().integrate();
        let exact = std::f64::consts::PI / 4.0;
        assert!((quarter - exact).abs() < 0.02 * exact);
    }

    #[test]
    fn rejects_non_finite_values() {
        let g = Arc::new(Grid::square(1.0, 4).unwrap());
        let mut v = vec![0.0; 16];
        v[3] = f64::NAN;
        assert!(ScalarField::new(g.clone(), v).is_err());
        assert!(ScalarField::new(g, vec![0.0; 3]).is_err());
    }

    #[test]
    fn restrict_to_full_radius_is_identity() {
        let g = Arc::new(Grid::disk(1.0, 32).unwrap());
        let f = ScalarField::from_fn(g, |[x, y]| x * y + 1.0).unwrap();
        assert_eq!(f.restrict(1.0).unwrap(), f);
        assert!(f.restrict(0.5).unwrap().len() < f.len());
    }
}
