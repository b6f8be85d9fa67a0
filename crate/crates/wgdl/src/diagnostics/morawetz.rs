//! Interaction Morawetz action for `u = v` and its time-derivative decomposition.
//!
//! With torus-integrated density `ρ(x) = ∫|u|²dα` and current
//! `J(x) = ∫Im(ū∇ₓu)dα`, the action is `M = 4∫J·(∇a ⋆ ρ)` for `a(z) = ⟨z⟩`.
//! Convolutions are linear (zero-padded to a doubled box).

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::ComplexField;
use crate::grid::Grid;
use crate::morawetz_algebra as alg;
use crate::propagator::SolverConfig;
use crate::scalar::{bracket, pairwise_sum_by, Real};
use crate::transform::{Direction, PlanSet};

/// Largest padded convolution grid accepted.
pub const MAX_PADDED_POINTS: usize = 1 << 24;
/// Oracle guard on Euclidean nodes for the definitional double sum.
pub const BRUTEFORCE_MAX_EUCLID: usize = 10_000;
/// Oracle guard on all grid points (the double sum is quadratic in this).
pub const BRUTEFORCE_MAX_POINTS: usize = 4096;

/// Torus-integrated density and current over the Euclidean grid.
#[derive(Clone, Debug)]
pub struct Marginals<T> {
    pub rho: Vec<T>,
    /// `current[j][x]`, one array per Euclidean direction.
    pub current: Vec<Vec<T>>,
}

/// `x ↦ ∫ v(x, α) dα` for a pointwise quantity `v(flat)`.
pub(crate) fn fiber_integral<T: Real>(grid: &Grid<T>, v: impl Fn(usize) -> T) -> Vec<T> {
    let nf = grid.fiber_points();
    let w = grid.torus_cell_volume();
    (0..grid.euclid_points())
        .map(|e| pairwise_sum_by(nf, |i| v(e * nf + i)) * w)
        .collect()
}

pub fn marginal_density<T: Real>(f: &ComplexField<T>) -> Vec<T> {
    let s = f.samples();
    fiber_integral(f.grid(), |i| s[i].norm_sqr())
}

fn euclid_gradients<T: Real>(f: &ComplexField<T>) -> Vec<ComplexField<T>> {
    let g = f.grid();
    let spec = f.to_spectral();
    (0..g.euclid_dims())
        .map(|j| {
            let mut o = vec![0u32; g.ndim()];
            o[j] = 1;
            spec.derivative(&o).into_physical()
        })
        .collect()
}

pub fn marginals<T: Real>(f: &ComplexField<T>) -> Marginals<T> {
    let s = f.samples();
    let grads = euclid_gradients(f);
    let current = grads
        .iter()
        .map(|gj| {
            let gs = gj.samples();
            fiber_integral(f.grid(), |i| (s[i].conj() * gs[i]).im)
        })
        .collect();
    Marginals {
        rho: marginal_density(f),
        current,
    }
}

/// Linear convolution engine on the Euclidean grid.
#[derive(Clone, Debug)]
pub struct Convolver<T: Real> {
    d: usize,
    ne: usize,
    h: T,
    shape: Vec<usize>,
    plans: PlanSet<T>,
}

impl<T: Real> Convolver<T> {
    pub fn new(grid: &Grid<T>) -> Result<Self> {
        let d = grid.euclid_dims();
        if d == 0 {
            return Err(Error::InvalidArgument("convolutions need a Euclidean axis".into()));
        }
        let ne = grid.spec().points_euclid;
        let padded = (2 * ne).checked_pow(d as u32).filter(|&n| n <= MAX_PADDED_POINTS);
        if padded.is_none() {
            return Err(Error::SizeGuard(format!(
                "padded convolution grid (2·{ne})^{d} exceeds {MAX_PADDED_POINTS} points"
            )));
        }
        Ok(Self {
            d,
            ne,
            h: grid.euclid_spacing(),
            shape: vec![2 * ne; d],
            plans: PlanSet::new(&[2 * ne]),
        })
    }

    fn padded_len(&self) -> usize {
        self.shape.iter().product()
    }

    fn axes(&self) -> Vec<usize> {
        (0..self.d).collect()
    }

    /// Spectrum of the kernel sampled at offsets `m h`, `|m_j| < N`, zero at `m_j = N`.
    pub fn kernel(&self, k: impl Fn(&[T]) -> T) -> Vec<Complex<T>> {
        let n2 = 2 * self.ne;
        let mut z = vec![T::zero(); self.d];
        let mut buf = vec![Complex::new(T::zero(), T::zero()); self.padded_len()];
        'outer: for (flat, slot) in buf.iter_mut().enumerate() {
            let mut rem = flat;
            for j in (0..self.d).rev() {
                let i = rem % n2;
                rem /= n2;
                if i == self.ne {
                    continue 'outer;
                }
                let m = if i < self.ne { i as i64 } else { i as i64 - n2 as i64 };
                z[j] = T::from_i64(m).unwrap() * self.h;
            }
            *slot = Complex::new(k(&z), T::zero());
        }
        self.plans.transform(&mut buf, &self.shape, &self.axes(), Direction::Forward);
        buf
    }

    /// Zero-padded spectrum of a Euclidean-grid array.
    pub fn pad(&self, f: &[T]) -> Vec<Complex<T>> {
        debug_assert_eq!(f.len(), self.ne.pow(self.d as u32));
        let mut buf = vec![Complex::new(T::zero(), T::zero()); self.padded_len()];
        for (src, &v) in f.iter().enumerate() {
            buf[self.padded_index(src)] = Complex::new(v, T::zero());
        }
        self.plans.transform(&mut buf, &self.shape, &self.axes(), Direction::Forward);
        buf
    }

    fn padded_index(&self, mut src: usize) -> usize {
        let mut dst = 0;
        let mut mul = 1;
        for _ in 0..self.d {
            dst += (src % self.ne) * mul;
            src /= self.ne;
            mul *= 2 * self.ne;
        }
        dst
    }

    /// `(K ⋆ g)(x_i) = Σ_j K(x_i - x_j) g_j h^d` from the two spectra.
    pub fn convolve(&self, kernel: &[Complex<T>], g_hat: &[Complex<T>]) -> Vec<T> {
        let mut buf: Vec<Complex<T>> = kernel.iter().zip(g_hat).map(|(a, b)| a * b).collect();
        self.plans.transform(&mut buf, &self.shape, &self.axes(), Direction::Inverse);
        let scale = self.h.powi(self.d as i32) / T::of_usize(self.padded_len());
        (0..self.ne.pow(self.d as u32))
            .map(|i| buf[self.padded_index(i)].re * scale)
            .collect()
    }

    /// `∫ f(x) (K ⋆ g)(x) dx`.
    pub fn pair(&self, f: &[T], kernel: &[Complex<T>], g_hat: &[Complex<T>]) -> T {
        let c = self.convolve(kernel, g_hat);
        pairwise_sum_by(f.len(), |i| f[i] * c[i]) * self.h.powi(self.d as i32)
    }
}

/// Precomputed gradient-kernel spectra for repeated action evaluations.
#[derive(Clone, Debug)]
pub struct MorawetzKernel<T: Real> {
    conv: Convolver<T>,
    grad: Vec<Vec<Complex<T>>>,
}

impl<T: Real> MorawetzKernel<T> {
    pub fn new(grid: &Grid<T>) -> Result<Self> {
        let conv = Convolver::new(grid)?;
        let grad = (0..grid.euclid_dims())
            .map(|j| conv.kernel(|z| z[j] / bracket(norm2(z))))
            .collect();
        Ok(Self { conv, grad })
    }

    pub fn action(&self, f: &ComplexField<T>) -> T {
        let m = marginals(f);
        let rho_hat = self.conv.pad(&m.rho);
        let s = self
            .grad
            .iter()
            .zip(&m.current)
            .fold(T::zero(), |acc, (k, j)| acc + self.conv.pair(j, k, &rho_hat));
        T::of(4.0) * s
    }
}

fn norm2<T: Real>(z: &[T]) -> T {
    z.iter().fold(T::zero(), |s, &v| s + v * v)
}

/// `M = 4∫J·(∇a ⋆ ρ)` via FFT convolution.
pub fn morawetz_action<T: Real>(f: &ComplexField<T>) -> Result<T> {
    Ok(MorawetzKernel::new(f.grid())?.action(f))
}

/// Definitional double sum `2∬∇_{x,y}a·Im[w̄∇_{x,y}w]` with `w = u ⊗ u` over all grid pairs.
pub fn morawetz_action_bruteforce<T: Real>(f: &ComplexField<T>) -> Result<T> {
    let g = f.grid();
    let d = g.euclid_dims();
    if d == 0 {
        return Err(Error::InvalidArgument("Morawetz action needs a Euclidean axis".into()));
    }
    if g.euclid_points() > BRUTEFORCE_MAX_EUCLID || g.total_points() > BRUTEFORCE_MAX_POINTS {
        return Err(Error::SizeGuard(format!(
            "brute-force Morawetz sum limited to {BRUTEFORCE_MAX_EUCLID} Euclidean and {BRUTEFORCE_MAX_POINTS} total points"
        )));
    }
    let s = f.samples();
    let grads = euclid_gradients(f);
    let n = g.total_points();
    let dens: Vec<T> = s.iter().map(|v| v.norm_sqr()).collect();
    let cur: Vec<Vec<T>> = (0..n)
        .map(|i| grads.iter().map(|gj| (s[i].conj() * gj.samples()[i]).im).collect())
        .collect();
    let coords: Vec<Vec<T>> = (0..n)
        .map(|i| {
            let mut idx = vec![0usize; g.ndim()];
            g.unravel(i, &mut idx);
            (0..d).map(|j| g.coordinate(j, idx[j])).collect()
        })
        .collect();
    let dv = g.cell_volume();
    let total = pairwise_sum_by(n, |a| {
        pairwise_sum_by(n, |b| {
            let mut diff = [T::zero(); 8];
            let mut r2 = T::zero();
            for j in 0..d {
                diff[j] = coords[a][j] - coords[b][j];
                r2 = r2 + diff[j] * diff[j];
            }
            let br = bracket(r2);
            let mut acc = T::zero();
            for j in 0..d {
                let ga = diff[j] / br;
                // ∇ₓa·Im(w̄∇ₓw) + ∇ᵧa·Im(w̄∇ᵧw), with ∇ᵧa = -∇ₓa
                acc = acc + ga * (cur[a][j] * dens[b] - dens[a] * cur[b][j]);
            }
            acc
        })
    });
    Ok(T::of(2.0) * total * dv * dv)
}

/// Terms of `dM/dt` for `u = v` under `i u_t + Δ²u + g|u|^p u = 0`.
///
/// Write `⟨f, K, h⟩ = ∬K(x-y)f(x)h(y)`. Then
/// * `bilaplacian_density = -2⟨ρ, Δ³a, ρ⟩`
/// * `gradient_density = 4⟨Σ_E|∂_i u|², Δ²a, ρ⟩`
/// * `third_order_hessian = 8⟨Re ∂_jū∂_ku, ∂_{jk}Δa, ρ⟩`
/// * `second_order_hessian = -16⟨Σ_E Re ∂_{ij}ū∂_{ik}u, ∂_{jk}a, ρ⟩`
/// * `interaction_flux = -8⟨J_j, ∂_{jk}a, Im(ū∂_kΔu - ∂_kūΔu)⟩`
/// * `torus_hessian = -16⟨Σ_α Re ∂_{αj}ū∂_{αk}u, ∂_{jk}a, ρ⟩`
/// * `torus_gradient = 4⟨Σ_α|∂_α u|², Δ²a, ρ⟩`
/// * `nonlinear = -4g p/(p+2)⟨|u|^{p+2}, Δa, ρ⟩`
///
/// Every density is integrated over the torus; `Δ` in the flux is the full Laplacian.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct MorawetzRhsTerms<T> {
    pub bilaplacian_density: T,
    pub gradient_density: T,
    pub third_order_hessian: T,
    pub second_order_hessian: T,
    pub interaction_flux: T,
    pub torus_hessian: T,
    pub torus_gradient: T,
    pub nonlinear: T,
}

impl<T: Real> MorawetzRhsTerms<T> {
    /// Purely Euclidean linear terms.
    pub fn euclidean_group(&self) -> T {
        self.bilaplacian_density
            + self.gradient_density
            + self.third_order_hessian
            + self.second_order_hessian
            + self.interaction_flux
    }

    /// Mixed `x`-`α` derivative terms; both are nonpositive in dimension `d ≥ 3`.
    pub fn torus_group(&self) -> T {
        self.torus_hessian + self.torus_gradient
    }

    pub fn total(&self) -> T {
        self.euclidean_group() + self.torus_group() + self.nonlinear
    }
}

/// Evaluate every term of `dM/dt` at the state `f`.
pub fn morawetz_rhs_terms<T: Real>(f: &ComplexField<T>, config: &SolverConfig<T>) -> Result<MorawetzRhsTerms<T>> {
    if config.order != 2 {
        return Err(Error::Unsupported("the Morawetz derivative decomposition is implemented for the biharmonic flow".into()));
    }
    let g = f.grid();
    let d = g.euclid_dims();
    let nd = g.ndim();
    let conv = Convolver::new(g)?;
    let spec = f.to_spectral();
    let deriv = |orders: &[(usize, u32)]| -> ComplexField<T> {
        let mut o = vec![0u32; nd];
        for &(axis, k) in orders {
            o[axis] += k;
        }
        spec.derivative(&o).into_physical()
    };
    let u = f.samples();
    let first: Vec<ComplexField<T>> = (0..nd).map(|i| deriv(&[(i, 1)])).collect();
    let fi = |v: &dyn Fn(usize) -> T| fiber_integral(g, v);

    let rho = marginal_density(f);
    let rho_hat = conv.pad(&rho);
    let current: Vec<Vec<T>> = (0..d)
        .map(|j| {
            let gj = first[j].samples();
            fi(&|i| (u[i].conj() * gj[i]).im)
        })
        .collect();
    let kappa = |axes: std::ops::Range<usize>| {
        let axes: Vec<usize> = axes.collect();
        fi(&|i| axes.iter().fold(T::zero(), |s, &a| s + first[a].samples()[i].norm_sqr()))
    };
    let kappa_e = kappa(0..d);
    let kappa_t = kappa(d..nd);

    // Second derivatives ∂_i∂_j with i over all axes and j Euclidean.
    let second: Vec<Vec<ComplexField<T>>> = (0..nd)
        .map(|i| (0..d).map(|j| deriv(&[(i, 1), (j, 1)])).collect())
        .collect();

    let lap = deriv(&[]).laplacian();
    let lap_s = lap.samples();
    let grad_lap: Vec<ComplexField<T>> = (0..d).map(|k| lap.derivative(&axis_orders(nd, k))).collect();
    let flux: Vec<Vec<T>> = (0..d)
        .map(|k| {
            let gk = first[k].samples();
            let glk = grad_lap[k].samples();
            fi(&|i| (u[i].conj() * glk[i] - gk[i].conj() * lap_s[i]).im)
        })
        .collect();

    let df = d;
    let k_lap = conv.kernel(|z| alg::laplacian_a(norm2(z).sqrt(), df));
    let k_bilap = conv.kernel(|z| alg::bilaplacian_a(norm2(z).sqrt(), df));
    let k_trilap = conv.kernel(|z| alg::trilaplacian_a(norm2(z).sqrt(), df));
    let hess_kernel = |j: usize, k: usize, coeffs: fn(T, usize) -> (T, T)| {
        conv.kernel(move |z| {
            let (a, b) = coeffs(norm2(z).sqrt(), df);
            let delta = if j == k { a } else { T::zero() };
            delta + b * z[j] * z[k]
        })
    };

    let four = T::of(4.0);
    let mut out = MorawetzRhsTerms {
        bilaplacian_density: -T::of(2.0) * conv.pair(&rho, &k_trilap, &rho_hat),
        gradient_density: four * conv.pair(&kappa_e, &k_bilap, &rho_hat),
        ..Default::default()
    };
    if g.torus_dims() > 0 {
        out.torus_gradient = four * conv.pair(&kappa_t, &k_bilap, &rho_hat);
    }

    for j in 0..d {
        for k in j..d {
            let mult = if j == k { T::one() } else { T::of(2.0) };
            let kh = hess_kernel(j, k, alg::hessian_a_coeffs);
            let khl = hess_kernel(j, k, alg::hessian_laplacian_a_coeffs);
            let (gj, gk) = (first[j].samples(), first[k].samples());
            let r_jk = fi(&|i| (gj[i].conj() * gk[i]).re);
            out.third_order_hessian = out.third_order_hessian + T::of(8.0) * mult * conv.pair(&r_jk, &khl, &rho_hat);
            let s_e = fi(&|i| {
                (0..d).fold(T::zero(), |s, a| s + (second[a][j].samples()[i].conj() * second[a][k].samples()[i]).re)
            });
            out.second_order_hessian = out.second_order_hessian - T::of(16.0) * mult * conv.pair(&s_e, &kh, &rho_hat);
            if g.torus_dims() > 0 {
                let s_t = fi(&|i| {
                    (d..nd).fold(T::zero(), |s, a| s + (second[a][j].samples()[i].conj() * second[a][k].samples()[i]).re)
                });
                out.torus_hessian = out.torus_hessian - T::of(16.0) * mult * conv.pair(&s_t, &kh, &rho_hat);
            }
            // The flux pairing is not symmetric in (j, k).
            let fk_hat = conv.pad(&flux[k]);
            let mut fl = conv.pair(&current[j], &kh, &fk_hat);
            if j != k {
                let fj_hat = conv.pad(&flux[j]);
                fl = fl + conv.pair(&current[k], &kh, &fj_hat);
            }
            out.interaction_flux = out.interaction_flux - T::of(8.0) * fl;
        }
    }

    let coupling = config.coupling();
    if coupling != T::zero() {
        let p = config.p;
        let half = (p + T::of(2.0)) / T::of(2.0);
        let sigma = fi(&|i| u[i].norm_sqr().powf(half));
        out.nonlinear = -four * coupling * p / (p + T::of(2.0)) * conv.pair(&sigma, &k_lap, &rho_hat);
    }
    Ok(out)
}

fn axis_orders(nd: usize, axis: usize) -> Vec<u32> {
    let mut o = vec![0u32; nd];
    o[axis] = 1;
    o
}
