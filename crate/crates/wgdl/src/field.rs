//! Complex fields in physical and spectral form, norms and test-data constructors.
//!
//! Spectral coefficients are the unnormalized DFT `F_k = Σ_j u_j e^{-ik·z_j}`,
//! so `‖u‖²_{L²} = (V / N²) Σ_k |F_k|²` for grid volume `V` and point count `N`.

use std::io::{Read, Write};
use std::sync::Arc;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::{make_grid, Grid, GridSpec};
use crate::scalar::{bracket, pairwise_sum_by, Real};

/// Threshold on the edge-to-peak ratio above which initial data counts as under-resolved.
pub const EDGE_TAIL_THRESHOLD: f64 = 1e-10;

pub const CHECKPOINT_MAGIC: &[u8; 6] = b"WGDL1\0";

/// Samples of `u(x, α)` on the grid, row-major with Euclidean axes first.
#[derive(Clone, Debug)]
pub struct ComplexField<T: Real> {
    grid: Arc<Grid<T>>,
    data: Vec<Complex<T>>,
}

/// Unnormalized DFT coefficients in FFT order.
#[derive(Clone, Debug)]
pub struct SpectralField<T: Real> {
    grid: Arc<Grid<T>>,
    data: Vec<Complex<T>>,
}

fn czero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

impl<T: Real> ComplexField<T> {
    pub fn new(grid: Arc<Grid<T>>, data: Vec<Complex<T>>) -> Result<Self> {
        if data.len() != grid.total_points() {
            return Err(Error::LengthMismatch {
                expected: grid.total_points(),
                got: data.len(),
            });
        }
        if let Some(i) = data.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { grid, data })
    }

    pub fn zeros(grid: Arc<Grid<T>>) -> Self {
        let data = vec![czero(); grid.total_points()];
        Self { grid, data }
    }

    /// Sample `f(coords)` at every grid point.
    pub fn from_fn(grid: Arc<Grid<T>>, f: impl Fn(&[T]) -> Complex<T>) -> Result<Self> {
        let nd = grid.ndim();
        let mut idx = vec![0usize; nd];
        let mut z = vec![T::zero(); nd];
        let mut data = Vec::with_capacity(grid.total_points());
        for flat in 0..grid.total_points() {
            grid.unravel(flat, &mut idx);
            for j in 0..nd {
                z[j] = grid.coordinate(j, idx[j]);
            }
            data.push(f(&z));
        }
        Self::new(grid, data)
    }

    pub fn grid(&self) -> &Arc<Grid<T>> {
        &self.grid
    }

    pub fn samples(&self) -> &[Complex<T>] {
        &self.data
    }

    /// Mutable access; callers must keep every sample finite.
    pub fn samples_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.data
    }

    pub fn into_samples(self) -> Vec<Complex<T>> {
        self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    pub fn max_modulus(&self) -> T {
        self.data.iter().fold(T::zero(), |m, v| m.max(v.norm()))
    }

    pub fn to_spectral(&self) -> SpectralField<T> {
        let mut data = self.data.clone();
        self.grid.forward(&mut data);
        SpectralField {
            grid: self.grid.clone(),
            data,
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            grid: self.grid.clone(),
            data: self.data.iter().map(|v| v.conj()).collect(),
        }
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        Self {
            grid: self.grid.clone(),
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    /// Cyclic shift by `shift[j]` cells along each axis.
    pub fn translate(&self, shift: &[isize]) -> Self {
        let g = &self.grid;
        let shape = g.shape();
        let mut idx = vec![0usize; shape.len()];
        let mut out = vec![czero(); self.data.len()];
        for (flat, v) in self.data.iter().enumerate() {
            g.unravel(flat, &mut idx);
            for j in 0..shape.len() {
                let s = shift.get(j).copied().unwrap_or(0);
                idx[j] = (idx[j] as isize + s).rem_euclid(shape[j] as isize) as usize;
            }
            out[g.ravel(&idx)] = *v;
        }
        Self {
            grid: self.grid.clone(),
            data: out,
        }
    }

    /// Apply a spectral multiplier `m(flat index)`.
    pub fn apply_multiplier(&self, m: impl Fn(usize) -> Complex<T>) -> Self {
        let mut spec = self.to_spectral();
        spec.data.iter_mut().enumerate().for_each(|(i, v)| *v = *v * m(i));
        spec.to_physical()
    }

    /// Spectral partial derivative `∂^{orders}` (one order per axis).
    pub fn derivative(&self, orders: &[u32]) -> Self {
        self.to_spectral().derivative(orders).to_physical()
    }

    /// Spectral Laplacian over all `d + n` axes.
    pub fn laplacian(&self) -> Self {
        let k2 = &self.grid.wavenumbers().k2;
        self.apply_multiplier(|i| Complex::new(-k2[i], T::zero()))
    }
}

impl<T: Real> SpectralField<T> {
    pub fn new(grid: Arc<Grid<T>>, data: Vec<Complex<T>>) -> Result<Self> {
        if data.len() != grid.total_points() {
            return Err(Error::LengthMismatch {
                expected: grid.total_points(),
                got: data.len(),
            });
        }
        Ok(Self { grid, data })
    }

    pub fn grid(&self) -> &Arc<Grid<T>> {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.data
    }

    pub fn to_physical(&self) -> ComplexField<T> {
        let mut data = self.data.clone();
        self.grid.inverse(&mut data);
        ComplexField {
            grid: self.grid.clone(),
            data,
        }
    }

    pub fn into_physical(mut self) -> ComplexField<T> {
        self.grid.inverse(&mut self.data);
        ComplexField {
            grid: self.grid,
            data: self.data,
        }
    }

    /// Factor turning `Σ|F_k|²` into the physical `L²` norm squared.
    pub fn parseval_factor(&self) -> T {
        let n = T::of_usize(self.grid.total_points());
        self.grid.volume() / (n * n)
    }

    /// `L²` norm computed on the spectral side.
    pub fn l2_norm(&self) -> T {
        let s = pairwise_sum_by(self.data.len(), |i| self.data[i].norm_sqr());
        (s * self.parseval_factor()).sqrt()
    }

    /// Weighted spectral sum `(V/N²) Σ w_k |F_k|²`.
    pub fn weighted_norm_sqr(&self, w: impl Fn(usize) -> T) -> T {
        pairwise_sum_by(self.data.len(), |i| w(i) * self.data[i].norm_sqr()) * self.parseval_factor()
    }

    pub fn derivative(&self, orders: &[u32]) -> Self {
        let g = &self.grid;
        let axes = &g.wavenumbers().axes;
        let mut idx = vec![0usize; g.ndim()];
        let mut out = self.data.clone();
        for (flat, v) in out.iter_mut().enumerate() {
            g.unravel(flat, &mut idx);
            let mut m = Complex::new(T::one(), T::zero());
            for (j, &o) in orders.iter().enumerate() {
                let n = g.shape()[j];
                if o % 2 == 1 && n % 2 == 0 && idx[j] == n / 2 {
                    // odd derivatives drop the Nyquist mode to commute with conjugation
                    m = Complex::new(T::zero(), T::zero());
                    break;
                }
                let ik = Complex::new(T::zero(), axes[j][idx[j]]);
                for _ in 0..o {
                    m = m * ik;
                }
            }
            *v = *v * m;
        }
        Self {
            grid: self.grid.clone(),
            data: out,
        }
    }
}

/// `(∫|f|^q)^{1/q}` by Riemann sum; `q = ∞` gives the max modulus.
pub fn lq_norm<T: Real>(f: &ComplexField<T>, q: T) -> Result<T> {
    if !(q >= T::one()) {
        return Err(Error::InvalidArgument(format!("L^q exponent must be >= 1, got {q}")));
    }
    if q.is_infinite() {
        return Ok(f.max_modulus());
    }
    let data = f.samples();
    let two = T::of(2.0);
    let s = if q == two {
        pairwise_sum_by(data.len(), |i| data[i].norm_sqr())
    } else {
        pairwise_sum_by(data.len(), |i| data[i].norm().powf(q))
    };
    Ok((s * f.grid().cell_volume()).powf(T::one() / q))
}

/// `‖⟨k⟩^s F‖_{L²}` with `⟨k⟩ = (1 + |k|²)^{1/2}` over all axes.
pub fn sobolev_norm<T: Real>(f: &ComplexField<T>, s: T) -> Result<T> {
    if !(s >= T::zero()) {
        return Err(Error::InvalidArgument(format!("Sobolev index must be >= 0, got {s}")));
    }
    Ok(sobolev_norm_spectral(&f.to_spectral(), s))
}

pub fn sobolev_norm_spectral<T: Real>(spec: &SpectralField<T>, s: T) -> T {
    let k2 = &spec.grid().wavenumbers().k2;
    let two = T::of(2.0);
    let w = |i: usize| -> T {
        if s == T::zero() {
            T::one()
        } else if s == T::one() {
            T::one() + k2[i]
        } else if s == two {
            let b = T::one() + k2[i];
            b * b
        } else {
            bracket(k2[i]).powf(two * s)
        }
    };
    spec.weighted_norm_sqr(w).sqrt()
}

fn fiber_norms<T: Real>(f: &ComplexField<T>, weight: impl Fn(T) -> T) -> Result<Vec<T>> {
    let g = f.grid();
    if g.torus_dims() == 0 {
        return Err(Error::InvalidArgument("torus fiber norms need at least one torus axis".into()));
    }
    let mut data = f.samples().to_vec();
    g.forward_torus(&mut data);
    let nf = g.fiber_points();
    let tk2 = &g.wavenumbers().torus_k2;
    let factor = g.torus_volume() / (T::of_usize(nf) * T::of_usize(nf));
    let w: Vec<T> = tk2.iter().map(|&k| weight(k)).collect();
    Ok(data
        .chunks(nf)
        .map(|fib| (pairwise_sum_by(nf, |i| w[i] * fib[i].norm_sqr()) * factor).sqrt())
        .collect())
}

/// `H^γ` norm of each torus fiber `α ↦ f(x, α)`, one value per Euclidean node.
pub fn mixed_sobolev_torus<T: Real>(f: &ComplexField<T>, gamma: T) -> Result<Vec<T>> {
    if !(gamma >= T::zero()) {
        return Err(Error::InvalidArgument(format!("Sobolev index must be >= 0, got {gamma}")));
    }
    let two = T::of(2.0);
    fiber_norms(f, |k2| if gamma == T::zero() { T::one() } else { bracket(k2).powf(two * gamma) })
}

/// Homogeneous `Ḣ^s` norm of each torus fiber; the zero mode is annihilated.
pub fn homogeneous_torus_sobolev<T: Real>(f: &ComplexField<T>, s: T) -> Result<Vec<T>> {
    if !(s >= T::zero()) {
        return Err(Error::InvalidArgument(format!("Sobolev index must be >= 0, got {s}")));
    }
    fiber_norms(f, |k2| if k2 == T::zero() { T::zero() } else { k2.powf(s) })
}

/// Max modulus on the Euclidean box faces divided by the global max modulus.
pub fn edge_tail_ratio<T: Real>(f: &ComplexField<T>) -> T {
    let g = f.grid();
    let d = g.euclid_dims();
    let peak = f.max_modulus();
    if d == 0 || peak == T::zero() {
        return T::zero();
    }
    let ne = g.spec().points_euclid;
    let mut idx = vec![0usize; g.ndim()];
    let mut edge = T::zero();
    for (flat, v) in f.samples().iter().enumerate() {
        g.unravel(flat, &mut idx);
        if idx[..d].iter().any(|&i| i == 0 || i == ne - 1) {
            edge = edge.max(v.norm());
        }
    }
    edge / peak
}

/// Raised when constructed data is not negligible at the box edge.
#[derive(Clone, Debug, PartialEq)]
pub struct ResolutionWarning {
    pub edge_tail_ratio: f64,
    pub threshold: f64,
}

impl std::fmt::Display for ResolutionWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "edge tail ratio {:e} exceeds {:e}; enlarge the box or narrow the profile",
            self.edge_tail_ratio, self.threshold
        )
    }
}

/// Parameters of `A exp(-|x - c|² / (2w²)) e^{i ξ·z}`; the envelope acts on Euclidean axes only.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianParams<T> {
    pub center: Vec<T>,
    pub width: T,
    /// One component per axis (`d + n`); torus components must be grid wavenumbers.
    pub modulation: Vec<T>,
    pub amplitude: T,
}

impl<T: Real> GaussianParams<T> {
    pub fn centered(d: usize, n: usize, width: T) -> Self {
        Self {
            center: vec![T::zero(); d],
            width,
            modulation: vec![T::zero(); d + n],
            amplitude: T::one(),
        }
    }
}

fn check_on_grid<T: Real>(grid: &Grid<T>, axis: usize, k: T) -> Result<()> {
    let unit = if axis < grid.euclid_dims() {
        T::TAU() / (T::of(2.0) * grid.spec().box_half_length)
    } else {
        T::TAU() / grid.spec().torus_period
    };
    let m = k / unit;
    let tol = T::of(1e-9).max(T::epsilon() * T::of(64.0)) * (T::one() + m.abs());
    let half = T::of_usize(grid.shape()[axis]) / T::of(2.0);
    if (m - m.round()).abs() > tol || m.round().abs() > half {
        return Err(Error::OffGrid {
            axis,
            component: k.as_f64(),
        });
    }
    Ok(())
}

/// Gaussian bump with plane-wave modulation and the edge-tail resolution check.
pub fn make_gaussian<T: Real>(
    grid: &Arc<Grid<T>>,
    params: &GaussianParams<T>,
) -> Result<(ComplexField<T>, Option<ResolutionWarning>)> {
    let d = grid.euclid_dims();
    let nd = grid.ndim();
    if !(params.width > T::zero()) {
        return Err(Error::InvalidArgument("Gaussian width must be positive".into()));
    }
    if params.center.len() != d || params.modulation.len() != nd {
        return Err(Error::InvalidArgument(format!(
            "Gaussian needs {d} center and {nd} modulation components"
        )));
    }
    for axis in d..nd {
        check_on_grid(grid, axis, params.modulation[axis])?;
    }
    let two_w2 = T::of(2.0) * params.width * params.width;
    let f = ComplexField::from_fn(grid.clone(), |z| {
        let mut r2 = T::zero();
        for j in 0..d {
            let dx = z[j] - params.center[j];
            r2 = r2 + dx * dx;
        }
        let phase = (0..nd).fold(T::zero(), |acc, j| acc + params.modulation[j] * z[j]);
        Complex::from_polar(params.amplitude * (-r2 / two_w2).exp(), phase)
    })?;
    let ratio = edge_tail_ratio(&f).as_f64();
    let warning = (ratio > EDGE_TAIL_THRESHOLD).then_some(ResolutionWarning {
        edge_tail_ratio: ratio,
        threshold: EDGE_TAIL_THRESHOLD,
    });
    Ok((f, warning))
}

/// Sum of three random modulated Gaussians, reproducible from `seed`.
///
/// Widths lie in `[0.6, 1.2)`, centers in `[-1, 1)`, Euclidean modulation in
/// `[-1.5, 1.5)` and torus modes in `{-1, 0, 1}`. No resolution check is made.
pub fn make_random_smooth<T: Real>(grid: &Arc<Grid<T>>, seed: u64) -> Result<ComplexField<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = grid.euclid_dims();
    let nd = grid.ndim();
    let mut acc = ComplexField::zeros(grid.clone());
    for _ in 0..3 {
        let mut p = GaussianParams::centered(d, nd - d, T::of(rng.gen_range(0.6..1.2)));
        p.center = (0..d).map(|_| T::of(rng.gen_range(-1.0..1.0))).collect();
        p.modulation = (0..nd)
            .map(|j| {
                if j < d {
                    T::of(rng.gen_range(-1.5..1.5))
                } else {
                    T::of(rng.gen_range(-1i32..=1) as f64) * T::TAU() / grid.spec().torus_period
                }
            })
            .collect();
        p.amplitude = T::of(rng.gen_range(0.3..1.0));
        let (f, _) = make_gaussian(grid, &p)?;
        for (a, b) in acc.samples_mut().iter_mut().zip(f.samples()) {
            *a = *a + *b;
        }
    }
    Ok(acc)
}

/// `e^{ik·z}` for an on-grid wavevector `k`.
pub fn make_plane_wave<T: Real>(grid: &Arc<Grid<T>>, k: &[T]) -> Result<ComplexField<T>> {
    let nd = grid.ndim();
    if k.len() != nd {
        return Err(Error::InvalidArgument(format!("wavevector needs {nd} components")));
    }
    for (axis, &kj) in k.iter().enumerate() {
        check_on_grid(grid, axis, kj)?;
    }
    // Use the integer mode numbers so the phase is exactly periodic.
    let mut idx = vec![0usize; nd];
    let mut data = Vec::with_capacity(grid.total_points());
    let modes: Vec<T> = (0..nd)
        .map(|j| {
            let unit = if j < grid.euclid_dims() {
                T::TAU() / (T::of(2.0) * grid.spec().box_half_length)
            } else {
                T::TAU() / grid.spec().torus_period
            };
            (k[j] / unit).round()
        })
        .collect();
    for flat in 0..grid.total_points() {
        grid.unravel(flat, &mut idx);
        let mut turns = T::zero();
        for j in 0..nd {
            let n = T::of_usize(grid.shape()[j]);
            let offset = if j < grid.euclid_dims() { n / T::of(2.0) } else { T::zero() };
            // x_i = -L + i h, so k x = 2π m (i - N/2) / N on Euclidean axes.
            turns = turns + modes[j] * (T::of_usize(idx[j]) - offset) / n;
        }
        let frac = turns - turns.floor();
        data.push(Complex::from_polar(T::one(), T::TAU() * frac));
    }
    ComplexField::new(grid.clone(), data)
}

/// Write a field in the little-endian checkpoint format.
pub fn write_checkpoint<T: Real, W: Write>(f: &ComplexField<T>, mut w: W) -> Result<()> {
    let g = f.grid();
    let spec = g.spec();
    w.write_all(CHECKPOINT_MAGIC)?;
    w.write_u32::<LittleEndian>(spec.euclid_dims as u32)?;
    w.write_u32::<LittleEndian>(spec.torus_dims as u32)?;
    for &n in g.shape() {
        w.write_u32::<LittleEndian>(n as u32)?;
    }
    w.write_f64::<LittleEndian>(spec.box_half_length.as_f64())?;
    w.write_f64::<LittleEndian>(spec.torus_period.as_f64())?;
    for v in f.samples() {
        w.write_f64::<LittleEndian>(v.re.as_f64())?;
        w.write_f64::<LittleEndian>(v.im.as_f64())?;
    }
    w.flush()?;
    Ok(())
}

/// Read a checkpoint, building its grid.
pub fn read_checkpoint<T: Real, R: Read>(mut r: R) -> Result<ComplexField<T>> {
    let mut magic = [0u8; 6];
    r.read_exact(&mut magic)?;
    if &magic != CHECKPOINT_MAGIC {
        return Err(Error::Checkpoint("bad magic bytes".into()));
    }
    let d = r.read_u32::<LittleEndian>()? as usize;
    let n = r.read_u32::<LittleEndian>()? as usize;
    if d + n == 0 || d + n > 16 {
        return Err(Error::Checkpoint(format!("implausible dimensions d={d}, n={n}")));
    }
    let mut counts = Vec::with_capacity(d + n);
    for _ in 0..d + n {
        counts.push(r.read_u32::<LittleEndian>()? as usize);
    }
    let uniform = |xs: &[usize]| xs.windows(2).all(|w| w[0] == w[1]);
    if !uniform(&counts[..d]) || !uniform(&counts[d..]) {
        return Err(Error::Checkpoint("per-axis counts must agree within each factor".into()));
    }
    let ne = counts.first().copied().filter(|_| d > 0).unwrap_or(MIN_DEFAULT);
    let nt = counts.get(d).copied().unwrap_or(MIN_DEFAULT);
    let l = r.read_f64::<LittleEndian>()?;
    let period = r.read_f64::<LittleEndian>()?;
    let spec = GridSpec {
        euclid_dims: d,
        torus_dims: n,
        box_half_length: T::of(l),
        torus_period: T::of(period),
        points_euclid: ne,
        points_torus: nt,
    };
    let grid = make_grid(spec)?;
    let mut data = Vec::with_capacity(grid.total_points());
    for _ in 0..grid.total_points() {
        let re = r.read_f64::<LittleEndian>()?;
        let im = r.read_f64::<LittleEndian>()?;
        data.push(Complex::new(T::of(re), T::of(im)));
    }
    ComplexField::new(grid, data)
}

const MIN_DEFAULT: usize = crate::grid::MIN_POINTS;

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn grid(d: usize, n: usize, l: f64, ne: usize, nt: usize) -> Arc<Grid<f64>> {
        make_grid(GridSpec::new(d, n, l, ne, nt)).unwrap()
    }

    fn random_field(g: &Arc<Grid<f64>>, seed: u64) -> ComplexField<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = (0..g.total_points())
            .map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        ComplexField::new(g.clone(), data).unwrap()
    }

    #[test]
    fn round_trip_is_identity() {
        let g = grid(2, 1, 3.0, 16, 8);
        let f = random_field(&g, 1);
        let back = f.to_spectral().to_physical();
        let err = f
            .samples()
            .iter()
            .zip(back.samples())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
        assert!(err <= 1e-12, "round trip error {err}");
    }

    #[test]
    fn constant_concentrates_at_zero_mode() {
        let g = grid(1, 1, PI, 8, 8);
        let f = ComplexField::from_fn(g, |_| Complex::new(2.0, -1.0)).unwrap();
        let s = f.to_spectral();
        assert!((s.coeffs()[0] - Complex::new(128.0, -64.0)).norm() < 1e-12);
        assert!(s.coeffs()[1..].iter().all(|v| v.norm() < 1e-12));
    }

    #[test]
    fn plane_wave_has_single_coefficient_and_unit_modulus() {
        let g = grid(1, 1, PI, 8, 8);
        let f = make_plane_wave(&g, &[2.0, -3.0]).unwrap();
        assert!(f.samples().iter().all(|v| (v.norm() - 1.0).abs() < 1e-15));
        let s = f.to_spectral();
        let peak = g.ravel(&[2, 5]);
        for (i, v) in s.coeffs().iter().enumerate() {
            if i == peak {
                assert!((v.norm() - 64.0).abs() < 1e-10);
            } else {
                assert!(v.norm() < 1e-10);
            }
        }
    }

    #[test]
    fn off_grid_plane_wave_rejected() {
        let g = grid(1, 1, PI, 8, 8);
        assert!(matches!(make_plane_wave(&g, &[0.5, 0.0]), Err(Error::OffGrid { axis: 0, .. })));
        assert!(make_plane_wave(&g, &[9.0, 0.0]).is_err());
    }

    #[test]
    fn constant_l2_norm_is_box_volume_root() {
        let g = grid(1, 1, PI, 8, 8);
        let f = ComplexField::from_fn(g, |_| Complex::new(1.0, 0.0)).unwrap();
        let l2 = lq_norm(&f, 2.0).unwrap();
        assert!((l2 - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn lq_rejects_small_exponent_and_handles_zero() {
        let g = grid(1, 1, PI, 8, 8);
        let z = ComplexField::zeros(g);
        assert!(lq_norm(&z, 0.5).is_err());
        for q in [1.0, 2.0, 3.5, f64::INFINITY] {
            assert_eq!(lq_norm(&z, q).unwrap(), 0.0);
        }
    }

    #[test]
    fn parseval_holds() {
        let g = grid(2, 1, 2.5, 16, 8);
        let f = random_field(&g, 7);
        let phys = lq_norm(&f, 2.0).unwrap();
        let spec = f.to_spectral().l2_norm();
        assert!((phys * phys - spec * spec).abs() <= 1e-12 * phys * phys);
    }

    #[test]
    fn sobolev_zero_is_l2_and_plane_wave_multiplier() {
        let g = grid(1, 1, PI, 16, 8);
        let f = random_field(&g, 3);
        let a = sobolev_norm(&f, 0.0).unwrap();
        let b = lq_norm(&f, 2.0).unwrap();
        assert!((a - b).abs() <= 1e-12 * b);

        let pw = make_plane_wave(&g, &[1.0, 2.0]).unwrap();
        let h2 = sobolev_norm(&pw, 2.0).unwrap();
        let l2 = lq_norm(&pw, 2.0).unwrap();
        assert!((h2 - 6.0 * l2).abs() < 1e-10);
        assert!(sobolev_norm(&f, -1.0).is_err());
    }

    #[test]
    fn fiber_norms_of_alpha_independent_field() {
        let g = grid(1, 1, 4.0, 16, 8);
        let f = ComplexField::from_fn(g.clone(), |z| Complex::new((-z[0] * z[0]).exp(), 0.0)).unwrap();
        for gamma in [0.0, 0.5, 2.0] {
            let norms = mixed_sobolev_torus(&f, gamma).unwrap();
            for (i, v) in norms.iter().enumerate() {
                let x = g.coordinate(0, i);
                let expect = (-x * x).exp() * (2.0 * PI).sqrt();
                assert!((v - expect).abs() < 1e-12);
            }
        }
        let flat = homogeneous_torus_sobolev(&f, 0.5).unwrap();
        assert!(flat.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn fiber_norm_of_unit_torus_mode() {
        let g = grid(1, 1, 4.0, 8, 8);
        let f = ComplexField::from_fn(g, |z| Complex::from_polar(1.0, z[1])).unwrap();
        let h0 = mixed_sobolev_torus(&f, 0.0).unwrap();
        let h1 = mixed_sobolev_torus(&f, 1.0).unwrap();
        for (a, b) in h0.iter().zip(&h1) {
            assert!((b - 2f64.sqrt() * a).abs() < 1e-12);
        }
    }

    #[test]
    fn fiber_norms_need_torus() {
        let g = grid(1, 0, 4.0, 8, 8);
        let f = ComplexField::zeros(g);
        assert!(mixed_sobolev_torus(&f, 0.0).is_err());
    }

    #[test]
    fn gaussian_mass_matches_closed_form() {
        let g = grid(1, 1, 12.0, 128, 8);
        let w = 1.3;
        let (f, warn) = make_gaussian(&g, &GaussianParams::centered(1, 1, w)).unwrap();
        assert!(warn.is_none());
        assert!(f.samples().iter().all(|v| v.im == 0.0 && v.re > 0.0));
        let mass = lq_norm(&f, 2.0).unwrap().powi(2);
        let expect = (PI * w * w).sqrt() * 2.0 * PI;
        assert!((mass - expect).abs() < 1e-8 * expect);
    }

    #[test]
    fn wide_gaussian_warns() {
        let g = grid(1, 1, 4.0, 64, 8);
        let (_, warn) = make_gaussian(&g, &GaussianParams::centered(1, 1, 2.0)).unwrap();
        assert!(warn.is_some());
    }

    #[test]
    fn checkpoint_round_trip_is_bit_exact() {
        let g = grid(2, 1, 1.5, 8, 4);
        let f = random_field(&g, 11);
        let mut buf = Vec::new();
        write_checkpoint(&f, &mut buf).unwrap();
        assert_eq!(&buf[..6], CHECKPOINT_MAGIC);
        let back: ComplexField<f64> = read_checkpoint(&buf[..]).unwrap();
        assert_eq!(back.grid().spec(), g.spec());
        assert_eq!(back.samples(), f.samples());
        assert!(read_checkpoint::<f64, _>(&b"WGDL2\0"[..]).is_err());
    }

    #[test]
    fn f32_round_trip() {
        let g = make_grid(GridSpec::new(1, 1, 3.0f32, 16, 8)).unwrap();
        let f = ComplexField::from_fn(g, |z| Complex::new((-z[0] * z[0]).exp(), z[1].sin())).unwrap();
        let back = f.to_spectral().to_physical();
        let err = f
            .samples()
            .iter()
            .zip(back.samples())
            .fold(0.0f32, |m, (a, b)| m.max((a - b).norm()));
        assert!(err < 1e-5);
    }
}
