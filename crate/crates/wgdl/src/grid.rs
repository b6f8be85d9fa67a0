//! Discretized waveguide geometry: a periodic box `[-L, L)^d` times a torus `T^n`.

use std::sync::Arc;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::transform::{mode_index, Direction, PlanSet};

pub const MIN_POINTS: usize = 4;

/// Geometry and sampling of the truncated waveguide.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec<T> {
    pub euclid_dims: usize,
    pub torus_dims: usize,
    pub box_half_length: T,
    pub torus_period: T,
    pub points_euclid: usize,
    pub points_torus: usize,
}

impl<T: Real> GridSpec<T> {
    /// Spec with the standard torus period 2π.
    pub fn new(euclid_dims: usize, torus_dims: usize, box_half_length: T, points_euclid: usize, points_torus: usize) -> Self {
        Self {
            euclid_dims,
            torus_dims,
            box_half_length,
            torus_period: T::TAU(),
            points_euclid,
            points_torus,
        }
    }

    pub fn with_torus_period(mut self, period: T) -> Self {
        self.torus_period = period;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let (d, n) = (self.euclid_dims, self.torus_dims);
        if d + n == 0 {
            return Err(Error::InvalidGrid("at least one axis required".into()));
        }
        if d > 0 {
            if self.points_euclid < MIN_POINTS {
                return Err(Error::InvalidGrid(format!(
                    "points_euclid = {} < {MIN_POINTS}",
                    self.points_euclid
                )));
            }
            if !(self.box_half_length > T::zero()) || !self.box_half_length.is_finite() {
                return Err(Error::InvalidGrid("box_half_length must be positive and finite".into()));
            }
        }
        if n > 0 {
            if self.points_torus < MIN_POINTS {
                return Err(Error::InvalidGrid(format!(
                    "points_torus = {} < {MIN_POINTS}",
                    self.points_torus
                )));
            }
            if !(self.torus_period > T::zero()) || !self.torus_period.is_finite() {
                return Err(Error::InvalidGrid("torus_period must be positive and finite".into()));
            }
        }
        let total = self
            .points_euclid
            .checked_pow(d as u32)
            .and_then(|e| self.points_torus.checked_pow(n as u32).and_then(|t| e.checked_mul(t)));
        match total {
            Some(t) if t > 0 && t <= isize::MAX as usize / 64 => Ok(()),
            _ => Err(Error::InvalidGrid("total point count overflows".into())),
        }
    }
}

/// Per-axis wavenumbers in FFT order plus full-grid symbols.
#[derive(Clone, Debug)]
pub struct WaveNumberTable<T> {
    /// `axes[j][i]` is the wavenumber of FFT slot `i` on axis `j`.
    pub axes: Vec<Vec<T>>,
    /// `|k|²` over the whole grid.
    pub k2: Vec<T>,
    /// `|k|⁴` over the whole grid.
    pub k4: Vec<T>,
    /// `|k_α|²` over one torus fiber (length `points_torus^n`).
    pub torus_k2: Vec<T>,
}

/// Validated grid with wavenumber tables and FFT plans. Immutable; share it via `Arc`.
#[derive(Debug)]
pub struct Grid<T: Real> {
    spec: GridSpec<T>,
    shape: Vec<usize>,
    wavenumbers: WaveNumberTable<T>,
    plans: PlanSet<T>,
}

/// Build a grid from its spec.
pub fn make_grid<T: Real>(spec: GridSpec<T>) -> Result<Arc<Grid<T>>> {
    Grid::new(spec).map(Arc::new)
}

impl<T: Real> Grid<T> {
    pub fn new(spec: GridSpec<T>) -> Result<Self> {
        spec.validate()?;
        let (d, n) = (spec.euclid_dims, spec.torus_dims);
        let mut shape = vec![spec.points_euclid; d];
        shape.extend(std::iter::repeat_n(spec.points_torus, n));

        let two_pi = T::TAU();
        let axes: Vec<Vec<T>> = (0..d + n)
            .map(|j| {
                let len = shape[j];
                let unit = if j < d {
                    two_pi / (T::of(2.0) * spec.box_half_length)
                } else {
                    two_pi / spec.torus_period
                };
                (0..len)
                    .map(|i| T::from_i64(mode_index(i, len)).unwrap() * unit)
                    .collect()
            })
            .collect();

        let total: usize = shape.iter().product();
        let mut k2 = vec![T::zero(); total];
        for (flat, slot) in k2.iter_mut().enumerate() {
            let mut rem = flat;
            let mut acc = T::zero();
            for j in (0..d + n).rev() {
                let i = rem % shape[j];
                rem /= shape[j];
                acc = acc + axes[j][i] * axes[j][i];
            }
            *slot = acc;
        }
        let k4 = k2.iter().map(|&v| v * v).collect();

        let fiber = spec.points_torus.pow(n as u32);
        let mut torus_k2 = vec![T::zero(); fiber];
        for (flat, slot) in torus_k2.iter_mut().enumerate() {
            let mut rem = flat;
            let mut acc = T::zero();
            for j in (d..d + n).rev() {
                let i = rem % shape[j];
                rem /= shape[j];
                acc = acc + axes[j][i] * axes[j][i];
            }
            *slot = acc;
        }

        let plans = PlanSet::new(&shape);
        Ok(Self {
            spec,
            shape,
            wavenumbers: WaveNumberTable { axes, k2, k4, torus_k2 },
            plans,
        })
    }

    pub fn spec(&self) -> &GridSpec<T> {
        &self.spec
    }

    pub fn euclid_dims(&self) -> usize {
        self.spec.euclid_dims
    }

    pub fn torus_dims(&self) -> usize {
        self.spec.torus_dims
    }

    pub fn ndim(&self) -> usize {
        self.shape.len()
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn wavenumbers(&self) -> &WaveNumberTable<T> {
        &self.wavenumbers
    }

    pub fn total_points(&self) -> usize {
        self.wavenumbers.k2.len()
    }

    /// Number of Euclidean nodes (`points_euclid^d`, 1 when `d = 0`).
    pub fn euclid_points(&self) -> usize {
        self.spec.points_euclid.pow(self.spec.euclid_dims as u32)
    }

    /// Number of samples in one torus fiber (`points_torus^n`, 1 when `n = 0`).
    pub fn fiber_points(&self) -> usize {
        self.spec.points_torus.pow(self.spec.torus_dims as u32)
    }

    /// Euclidean grid spacing `2L / points_euclid`.
    pub fn euclid_spacing(&self) -> T {
        T::of(2.0) * self.spec.box_half_length / T::of_usize(self.spec.points_euclid)
    }

    pub fn torus_spacing(&self) -> T {
        self.spec.torus_period / T::of_usize(self.spec.points_torus)
    }

    pub fn euclid_cell_volume(&self) -> T {
        self.euclid_spacing().powi(self.spec.euclid_dims as i32)
    }

    pub fn torus_cell_volume(&self) -> T {
        self.torus_spacing().powi(self.spec.torus_dims as i32)
    }

    pub fn cell_volume(&self) -> T {
        self.euclid_cell_volume() * self.torus_cell_volume()
    }

    pub fn torus_volume(&self) -> T {
        self.spec.torus_period.powi(self.spec.torus_dims as i32)
    }

    pub fn volume(&self) -> T {
        (T::of(2.0) * self.spec.box_half_length).powi(self.spec.euclid_dims as i32) * self.torus_volume()
    }

    /// Physical coordinate of slot `i` on axis `axis`.
    pub fn coordinate(&self, axis: usize, i: usize) -> T {
        if axis < self.spec.euclid_dims {
            -self.spec.box_half_length + T::of_usize(i) * self.euclid_spacing()
        } else {
            T::of_usize(i) * self.torus_spacing()
        }
    }

    /// Multi-index of a flat row-major offset.
    pub fn unravel(&self, mut flat: usize, out: &mut [usize]) {
        for j in (0..self.shape.len()).rev() {
            out[j] = flat % self.shape[j];
            flat /= self.shape[j];
        }
    }

    /// Flat offset of a multi-index.
    pub fn ravel(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.shape).fold(0, |acc, (&i, &n)| acc * n + i)
    }

    /// True when `other` describes the same sampling.
    pub fn same_as(&self, other: &Grid<T>) -> bool {
        std::ptr::eq(self, other) || self.spec == other.spec
    }

    /// Unnormalized forward transform over all axes.
    pub(crate) fn forward(&self, data: &mut [Complex<T>]) {
        let axes: Vec<usize> = (0..self.ndim()).collect();
        self.plans.transform(data, &self.shape, &axes, Direction::Forward);
    }

    /// Inverse transform over all axes, scaled by `1/N`.
    pub(crate) fn inverse(&self, data: &mut [Complex<T>]) {
        let axes: Vec<usize> = (0..self.ndim()).collect();
        self.plans.transform(data, &self.shape, &axes, Direction::Inverse);
        let scale = T::one() / T::of_usize(data.len());
        data.iter_mut().for_each(|v| *v = *v * scale);
    }

    /// Unnormalized forward transform along the torus axes only.
    pub fn forward_torus(&self, data: &mut [Complex<T>]) {
        let d = self.spec.euclid_dims;
        let axes: Vec<usize> = (d..self.ndim()).collect();
        self.plans.transform(data, &self.shape, &axes, Direction::Forward);
    }

    /// Inverse transform along the torus axes, scaled by `1/fiber_points`.
    pub fn inverse_torus(&self, data: &mut [Complex<T>]) {
        let d = self.spec.euclid_dims;
        let axes: Vec<usize> = (d..self.ndim()).collect();
        self.plans.transform(data, &self.shape, &axes, Direction::Inverse);
        let scale = T::one() / T::of_usize(self.fiber_points());
        data.iter_mut().for_each(|v| *v = *v * scale);
    }
}

/// Symbol of `(-Δ)^{order/2}`: `|k|²` for order 2 and `|k|⁴` for order 4.
pub fn dispersion_symbol<T: Real>(table: &WaveNumberTable<T>, order: u32) -> Result<Vec<T>> {
    match order {
        2 => Ok(table.k2.clone()),
        4 => Ok(table.k4.clone()),
        other => Err(Error::InvalidArgument(format!("dispersion order must be 2 or 4, got {other}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn torus_transform_round_trips() {
        let g = Grid::new(crate::GridSpec::new(1, 2, 3.0, 6, 4)).unwrap();
        let data: Vec<Complex<f64>> = (0..g.total_points()).map(|i| Complex::new(i as f64, -(i as f64).sqrt())).collect();
        let mut work = data.clone();
        g.forward_torus(&mut work);
        g.inverse_torus(&mut work);
        for (a, b) in work.iter().zip(&data) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn unit_spacing_wavenumbers() {
        let g = Grid::new(GridSpec::new(1, 1, PI, 8, 8)).unwrap();
        assert_eq!(g.wavenumbers().axes[0], vec![0.0, 1.0, 2.0, 3.0, -4.0, -3.0, -2.0, -1.0]);
        assert_eq!(g.wavenumbers().axes[1], vec![0.0, 1.0, 2.0, 3.0, -4.0, -3.0, -2.0, -1.0]);
    }

    #[test]
    fn torus_period_rescales_wavenumbers() {
        let g = Grid::new(GridSpec::new(1, 1, PI, 8, 4).with_torus_period(PI)).unwrap();
        assert_eq!(g.wavenumbers().axes[1], vec![0.0, 2.0, -4.0, -2.0]);
    }

    #[test]
    fn five_plus_one_point_count() {
        let g = Grid::new(GridSpec::new(5, 1, 4.0, 8, 8)).unwrap();
        assert_eq!(g.total_points(), 262_144);
        assert_eq!(g.euclid_points(), 32_768);
        assert_eq!(g.fiber_points(), 8);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(Grid::new(GridSpec::new(1, 1, PI, 2, 8)).is_err());
        assert!(Grid::new(GridSpec::new(1, 1, -1.0, 8, 8)).is_err());
        assert!(Grid::new(GridSpec::new(1, 1, PI, 8, 8).with_torus_period(0.0)).is_err());
        assert!(Grid::new(GridSpec::<f64>::new(0, 0, PI, 8, 8)).is_err());
    }

    #[test]
    fn pure_torus_grid_is_accepted() {
        let g = Grid::new(GridSpec::new(0, 2, 1.0, 8, 8)).unwrap();
        assert_eq!(g.total_points(), 64);
        assert_eq!(g.euclid_points(), 1);
    }

    #[test]
    fn symbols_by_order() {
        let g = Grid::new(GridSpec::new(1, 1, PI, 8, 8)).unwrap();
        let s4 = dispersion_symbol(g.wavenumbers(), 4).unwrap();
        let s2 = dispersion_symbol(g.wavenumbers(), 2).unwrap();
        assert_eq!(s4[g.ravel(&[1, 2])], 25.0);
        assert_eq!(s2[g.ravel(&[1, 0])], 1.0);
        assert_eq!(s4[0], 0.0);
        assert_eq!(s2[0], 0.0);
        assert!(dispersion_symbol(g.wavenumbers(), 3).is_err());
    }

    #[test]
    fn cell_volume_and_coordinates() {
        let g = Grid::new(GridSpec::new(2, 1, 2.0, 8, 4)).unwrap();
        assert!((g.cell_volume() - 0.5 * 0.5 * (2.0 * PI / 4.0)).abs() < 1e-15);
        assert_eq!(g.coordinate(0, 0), -2.0);
        assert_eq!(g.coordinate(1, 4), 0.0);
        assert!((g.volume() - 16.0 * 2.0 * PI).abs() < 1e-12);
        let mut idx = [0; 3];
        g.unravel(g.ravel(&[3, 5, 2]), &mut idx);
        assert_eq!(idx, [3, 5, 2]);
    }
}
