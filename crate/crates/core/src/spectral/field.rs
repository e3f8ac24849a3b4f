use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::domain::io::{FieldDocument, FileKind};
use crate::domain::{Field, FieldValue, Grid, ScalarField};
use crate::error::{Error, Result};

/// Samples on the periodic square `[-side/2, side/2)²` at cell centers,
/// `n` per axis (a power of two), `channels` real components per node.
///
/// Values are stored per channel, row-major with x fastest, matching the
/// lattice order of [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicField {
    side: f64,
    n: usize,
    channels: Vec<Vec<f64>>,
}

impl PeriodicField {
    pub fn new(side: f64, n: usize, channels: Vec<Vec<f64>>) -> Result<Self> {
        if !(side > 0.0 && side.is_finite()) {
            return Err(Error::invalid(format!("side must be positive, got {side}")));
        }
        if n < 4 || !n.is_power_of_two() || n > 1 << 13 {
            return Err(Error::invalid(format!("n must be a power of two in [4, 8192], got {n}")));
        }
        if channels.is_empty() || channels.len() > 3 {
            return Err(Error::invalid("periodic fields have 1 to 3 channels"));
        }
        for c in &channels {
            if c.len() != n * n {
                return Err(Error::invalid("channel length must be n²"));
            }
            if !c.iter().all(|v| v.is_finite()) {
                return Err(Error::invalid("periodic field values must be finite"));
            }
        }
        Ok(PeriodicField { side, n, channels })
    }

    pub fn from_fn(side: f64, n: usize, f: impl Fn([f64; 2]) -> f64) -> Result<Self> {
        let h = side / n as f64;
        let values = (0..n * n)
            .map(|l| f([-side / 2.0 + ((l % n) as f64 + 0.5) * h, -side / 2.0 + ((l / n) as f64 + 0.5) * h]))
            .collect();
        Self::new(side, n, vec![values])
    }

    pub fn zeros(side: f64, n: usize, channels: usize) -> Result<Self> {
        Self::new(side, n, vec![vec![0.0; n * n]; channels])
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.side / self.n as f64
    }

    pub fn channels(&self) -> usize {
        self.channels.len()
    }

    pub fn channel(&self, c: usize) -> &[f64] {
        &self.channels[c]
    }

    pub fn into_channels(self) -> Vec<Vec<f64>> {
        self.channels
    }

    pub fn point(&self, l: usize) -> [f64; 2] {
        let h = self.h();
        [-self.side / 2.0 + ((l % self.n) as f64 + 0.5) * h, -self.side / 2.0 + ((l / self.n) as f64 + 0.5) * h]
    }

    /// Mean of each channel.
    pub fn mean(&self) -> Vec<f64> {
        self.channels.iter().map(|c| c.iter().sum::<f64>() / c.len() as f64).collect()
    }

    /// `(Σ |f(x)|^p h²)^{1/p}` with the Euclidean norm over channels.
    pub fn lp_norm(&self, p: f64) -> f64 {
        let h2 = self.h() * self.h();
        let terms: Vec<f64> = (0..self.n * self.n)
            .map(|l| {
                let sq: f64 = self.channels.iter().map(|c| c[l] * c[l]).sum();
                sq.powf(p / 2.0) * h2
            })
            .collect();
        crate::sum::pairwise_sum(&terms).powf(1.0 / p)
    }

    pub fn l2_norm(&self) -> f64 {
        self.lp_norm(2.0)
    }

    /// Channelwise `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &PeriodicField, b: f64) -> Result<PeriodicField> {
        if self.n != other.n || self.side != other.side || self.channels() != other.channels() {
            return Err(Error::invalid("periodic fields live on different lattices"));
        }
        let channels = self
            .channels
            .iter()
            .zip(&other.channels)
            .map(|(x, y)| x.iter().zip(y).map(|(u, v)| a * u + b * v).collect())
            .collect();
        PeriodicField::new(self.side, self.n, channels)
    }

    /// Channel `c` as a field on the square grid of half-width `side / 2`.
    pub fn to_square_field(&self, c: usize) -> Result<ScalarField> {
        let grid = Arc::new(Grid::square(self.side / 2.0, self.n)?);
        Field::new(grid, self.channels[c].clone())
    }

    /// Vector-valued field on the square grid.
    pub fn to_field<T: FieldValue>(&self) -> Result<Field<T>> {
        if T::COMPONENTS != self.channels() {
            return Err(Error::invalid("channel count does not match field type"));
        }
        let grid = Arc::new(Grid::square(self.side / 2.0, self.n)?);
        let values = (0..self.n * self.n)
            .map(|l| T::from_components(&self.channels.iter().map(|c| c[l]).collect::<Vec<_>>()))
            .collect();
        Field::new(grid, values)
    }

    pub fn to_document(&self) -> FieldDocument {
        FieldDocument {
            kind: FileKind::SquarePeriodic,
            radius: self.side / 2.0,
            n: self.n,
            center: [0.0, 0.0],
            components: self.channels(),
            values: (0..self.n * self.n).map(|l| Some(self.channels.iter().map(|c| c[l]).collect())).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        self.to_document().to_json()
    }

    pub fn from_document(doc: FieldDocument) -> Result<Self> {
        if doc.kind != FileKind::SquarePeriodic {
            return Err(Error::parse("expected grid kind \"square-periodic\""));
        }
        if doc.center != [0.0, 0.0] {
            return Err(Error::parse("periodic fields are centered at the origin"));
        }
        let mut channels = vec![Vec::with_capacity(doc.n * doc.n); doc.components];
        for v in doc.values {
            let v = v.ok_or_else(|| Error::parse("periodic fields cannot contain null"))?;
            for (c, x) in v.into_iter().enumerate() {
                channels[c].push(x);
            }
        }
        PeriodicField::new(2.0 * doc.radius, doc.n, channels).map_err(|e| Error::parse(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_document(FieldDocument::parse(text)?)
    }
}

/// Signed frequency index of FFT bin `i`.
pub(crate) fn freq(i: usize, n: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

fn transpose(data: &mut [Complex<f64>], n: usize) {
    for j in 0..n {
        for i in j + 1..n {
            data.swap(j * n + i, i * n + j);
        }
    }
}

/// In-place 2D transform, unnormalized in both directions.
pub(crate) fn fft2(data: &mut [Complex<f64>], n: usize, inverse: bool) {
    let mut planner = FftPlanner::new();
    let fft = if inverse { planner.plan_fft_inverse(n) } else { planner.plan_fft_forward(n) };
    fft.process(data);
    transpose(data, n);
    fft.process(data);
    transpose(data, n);
}

/// Forward transform of one channel.
pub(crate) fn spectrum(values: &[f64], n: usize) -> Vec<Complex<f64>> {
    let mut data: Vec<Complex<f64>> = values.iter().map(|&v| Complex::new(v, 0.0)).collect();
    fft2(&mut data, n, false);
    data
}

/// Inverse transform, normalized, real part.
pub(crate) fn synthesize(mut data: Vec<Complex<f64>>, n: usize) -> Vec<f64> {
    fft2(&mut data, n, true);
    let scale = 1.0 / (n * n) as f64;
    data.into_iter().map(|c| c.re * scale).collect()
}
