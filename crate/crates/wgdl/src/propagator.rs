//! Strang-split time stepping for `i u_t + Δ^m u + λ|u|^p u = 0` with exact substeps.
//!
//! `λ = +1` is defocusing for both orders. For `m = 2` the equation is exactly
//! `i u_t + Δ²u + λ|u|^p u = 0`; for `m = 1` the defocusing sign of the
//! nonlinearity flips relative to the dispersion, so the nonlinear phase uses
//! `σ λ` with `σ = +1` for `m = 2` and `σ = -1` for `m = 1`.

use std::sync::Arc;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{DiagnosticsPlan, DiagnosticsRecord, Monitor};
use crate::error::{Error, Result};
use crate::field::{edge_tail_ratio, ComplexField, SpectralField, EDGE_TAIL_THRESHOLD};
use crate::grid::Grid;
use crate::scalar::Real;
use crate::transform::mode_index;

/// Modulus above which a run is declared blown up.
pub const BLOWUP_THRESHOLD: f64 = 1e8;

/// Fraction of spectral power whose support sets the group-speed estimate.
pub const WRAP_SPECTRAL_FRACTION: f64 = 0.9999;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Defocusing,
    Focusing,
}

impl Sign {
    pub fn lambda<T: Real>(self) -> T {
        match self {
            Sign::Defocusing => T::one(),
            Sign::Focusing => -T::one(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dealias {
    #[default]
    Off,
    TwoThirds,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig<T> {
    /// Power of the Laplacian: 2 for the biharmonic equation, 1 for NLS.
    pub order: u32,
    pub p: T,
    pub sign: Sign,
    /// Multiplies the nonlinear term; zero gives the free flow.
    pub nonlinear_amplitude: T,
    pub dt: T,
    pub t_end: T,
    pub record_every: usize,
    pub dealias: Dealias,
}

impl<T: Real> SolverConfig<T> {
    pub fn biharmonic(p: T, sign: Sign, dt: T, t_end: T) -> Self {
        Self {
            order: 2,
            p,
            sign,
            nonlinear_amplitude: T::one(),
            dt,
            t_end,
            record_every: 1,
            dealias: Dealias::Off,
        }
    }

    pub fn linear(self) -> Self {
        Self {
            nonlinear_amplitude: T::zero(),
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.order != 1 && self.order != 2 {
            return Err(Error::InvalidConfig(format!("order must be 1 or 2, got {}", self.order)));
        }
        if !(self.p > T::zero()) || !self.p.is_finite() {
            return Err(Error::InvalidConfig("p must be positive".into()));
        }
        if !(self.dt > T::zero()) || !self.dt.is_finite() {
            return Err(Error::InvalidConfig("dt must be positive".into()));
        }
        if !(self.t_end > T::zero()) || !self.t_end.is_finite() {
            return Err(Error::InvalidConfig("t_end must be positive".into()));
        }
        if self.record_every == 0 {
            return Err(Error::InvalidConfig("record_every must be positive".into()));
        }
        if !self.nonlinear_amplitude.is_finite() {
            return Err(Error::InvalidConfig("nonlinear amplitude must be finite".into()));
        }
        Ok(())
    }

    /// `σ`: +1 for the biharmonic flow, -1 for the Laplacian flow.
    pub fn dispersion_sign(&self) -> T {
        if self.order == 2 {
            T::one()
        } else {
            -T::one()
        }
    }

    /// Coefficient `g` in `u_t = i(σ|k|^{2m} û) + i g |u|^p u`.
    pub fn coupling(&self) -> T {
        self.dispersion_sign() * self.sign.lambda::<T>() * self.nonlinear_amplitude
    }

    /// Mass-critical power `4m/d`.
    pub fn mass_critical_power(&self, d: usize) -> T {
        T::of(4.0 * self.order as f64) / T::of_usize(d.max(1))
    }

    /// False for focusing runs at or above the mass-critical power.
    pub fn has_global_guarantee(&self, d: usize) -> bool {
        self.sign == Sign::Defocusing
            || self.nonlinear_amplitude == T::zero()
            || self.p < self.mass_critical_power(d)
    }

    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round().to_usize().unwrap_or(0).max(1)
    }
}

#[derive(Clone, Debug)]
pub struct SolverState<T: Real> {
    pub field: ComplexField<T>,
    pub t: T,
    pub step: usize,
    pub t_wrap: T,
}

impl<T: Real> SolverState<T> {
    pub fn new(field: ComplexField<T>, t_wrap: T) -> Self {
        Self {
            field,
            t: T::zero(),
            step: 0,
            t_wrap,
        }
    }
}

/// Reason a run stopped early.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Abort {
    NonFinite { step: usize, t: f64 },
    Blowup { step: usize, t: f64, max_modulus: f64 },
}

impl std::fmt::Display for Abort {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Abort::NonFinite { step, t } => write!(f, "non-finite field at step {step} (t = {t})"),
            Abort::Blowup { step, t, max_modulus } => {
                write!(f, "blowup at step {step} (t = {t}): max |u| = {max_modulus:e}")
            }
        }
    }
}

/// Precomputed operators for one solver configuration on one grid.
#[derive(Clone, Debug)]
pub struct Propagator<T: Real> {
    grid: Arc<Grid<T>>,
    config: SolverConfig<T>,
    symbol: Vec<T>,
    full_phase: Vec<Complex<T>>,
    mask: Option<Vec<bool>>,
}

impl<T: Real> Propagator<T> {
    pub fn new(grid: Arc<Grid<T>>, config: SolverConfig<T>) -> Result<Self> {
        config.validate()?;
        let table = grid.wavenumbers();
        let symbol = if config.order == 2 { table.k4.clone() } else { table.k2.clone() };
        let sigma_dt = config.dispersion_sign() * config.dt;
        let full_phase = symbol.iter().map(|&s| Complex::from_polar(T::one(), sigma_dt * s)).collect();
        let mask = (config.dealias == Dealias::TwoThirds).then(|| two_thirds_mask(&grid));
        Ok(Self {
            grid,
            config,
            symbol,
            full_phase,
            mask,
        })
    }

    pub fn grid(&self) -> &Arc<Grid<T>> {
        &self.grid
    }

    pub fn config(&self) -> &SolverConfig<T> {
        &self.config
    }

    /// `|k|^{2m}` over the grid.
    pub fn symbol(&self) -> &[T] {
        &self.symbol
    }

    /// Exact free flow for time `tau` on the spectral side.
    pub fn linear_flow_spectral(&self, spec: &mut SpectralField<T>, tau: T) {
        let s = self.config.dispersion_sign() * tau;
        spec.coeffs_mut()
            .iter_mut()
            .zip(&self.symbol)
            .for_each(|(v, &k)| *v = *v * Complex::from_polar(T::one(), s * k));
    }

    /// `û ↦ e^{iστ|k|^{2m}} û`.
    pub fn linear_step(&self, state: &mut SolverState<T>, tau: T) {
        let mut spec = state.field.to_spectral();
        self.linear_flow_spectral(&mut spec, tau);
        state.field = spec.into_physical();
    }

    /// `u ↦ u e^{i g τ |u|^p}`; the modulus is untouched.
    pub fn nonlinear_step(&self, state: &mut SolverState<T>, tau: T) {
        self.nonlinear_phase(state.field.samples_mut(), tau);
    }

    fn nonlinear_phase(&self, data: &mut [Complex<T>], tau: T) {
        let g = self.config.coupling() * tau;
        if g == T::zero() {
            return;
        }
        let p = self.config.p;
        let two = T::of(2.0);
        let half_p = p / two;
        for v in data.iter_mut() {
            let m2 = v.norm_sqr();
            let mp = if p == two {
                m2
            } else if p == T::one() {
                m2.sqrt()
            } else {
                m2.powf(half_p)
            };
            *v = *v * Complex::from_polar(T::one(), g * mp);
        }
    }

    /// Zero every coefficient above two thirds of the Nyquist index on any axis.
    pub fn dealias(&self, spec: &mut SpectralField<T>) {
        let mask = match &self.mask {
            Some(m) => m.clone(),
            None => two_thirds_mask(&self.grid),
        };
        apply_mask(spec.coeffs_mut(), &mask);
    }

    /// One step `N(dt/2) L(dt) N(dt/2)`, advancing `t` by `dt`.
    pub fn strang_step(&self, state: &mut SolverState<T>) -> std::result::Result<(), Abort> {
        let half = self.config.dt / T::of(2.0);
        let field = &mut state.field;
        self.nonlinear_phase(field.samples_mut(), half);
        let mut buf = field.samples().to_vec();
        self.grid.forward(&mut buf);
        buf.iter_mut().zip(&self.full_phase).for_each(|(v, ph)| *v = *v * ph);
        if let Some(mask) = &self.mask {
            apply_mask(&mut buf, mask);
        }
        self.grid.inverse(&mut buf);
        self.nonlinear_phase(&mut buf, half);
        field.samples_mut().copy_from_slice(&buf);
        state.step += 1;
        state.t = T::of_usize(state.step) * self.config.dt;
        check_health(&state.field, state.step, state.t)
    }

    /// A Strang step of arbitrary (possibly negative) length; does not touch `t`.
    pub fn strang_step_by(&self, field: &mut ComplexField<T>, tau: T) {
        let half = tau / T::of(2.0);
        self.nonlinear_phase(field.samples_mut(), half);
        let mut spec = field.to_spectral();
        self.linear_flow_spectral(&mut spec, tau);
        if let Some(mask) = &self.mask {
            apply_mask(spec.coeffs_mut(), mask);
        }
        let mut out = spec.into_physical();
        self.nonlinear_phase(out.samples_mut(), half);
        *field = out;
    }

    /// Wrap-around time `L / v_max` for data `f`.
    pub fn wrap_time(&self, f: &ComplexField<T>) -> T {
        wrap_time(f, self.config.order)
    }
}

fn check_health<T: Real>(f: &ComplexField<T>, step: usize, t: T) -> std::result::Result<(), Abort> {
    let mut max = T::zero();
    for v in f.samples() {
        let m = v.norm();
        if !m.is_finite() {
            return Err(Abort::NonFinite { step, t: t.as_f64() });
        }
        max = max.max(m);
    }
    if max.as_f64() > BLOWUP_THRESHOLD {
        return Err(Abort::Blowup {
            step,
            t: t.as_f64(),
            max_modulus: max.as_f64(),
        });
    }
    Ok(())
}

fn apply_mask<T: Real>(data: &mut [Complex<T>], mask: &[bool]) {
    let zero = Complex::new(T::zero(), T::zero());
    data.iter_mut().zip(mask).for_each(|(v, &keep)| {
        if !keep {
            *v = zero;
        }
    });
}

/// `true` where every axis index satisfies `|m| ≤ (2/3)(N/2)`.
pub fn two_thirds_mask<T: Real>(grid: &Grid<T>) -> Vec<bool> {
    let shape = grid.shape();
    let mut idx = vec![0usize; shape.len()];
    (0..grid.total_points())
        .map(|flat| {
            grid.unravel(flat, &mut idx);
            idx.iter().zip(shape).all(|(&i, &n)| {
                let m = mode_index(i, n).unsigned_abs() as usize;
                3 * m <= n
            })
        })
        .collect()
}

/// `L / v_max`, with `v_max` the largest Euclidean group speed over the modes
/// carrying 99.99% of the spectral power. Infinite when nothing moves.
pub fn wrap_time<T: Real>(f: &ComplexField<T>, order: u32) -> T {
    let g = f.grid();
    let d = g.euclid_dims();
    if d == 0 {
        return T::infinity();
    }
    let spec = f.to_spectral();
    let power: Vec<T> = spec.coeffs().iter().map(|v| v.norm_sqr()).collect();
    let total = crate::scalar::pairwise_sum(&power);
    if total == T::zero() {
        return T::infinity();
    }
    let mut order_idx: Vec<usize> = (0..power.len()).collect();
    order_idx.sort_by(|&a, &b| power[b].partial_cmp(&power[a]).unwrap().then(a.cmp(&b)));
    let target = total * T::of(WRAP_SPECTRAL_FRACTION);
    let axes = &g.wavenumbers().axes;
    let k2 = &g.wavenumbers().k2;
    let mut idx = vec![0usize; g.ndim()];
    let mut acc = T::zero();
    let mut vmax = T::zero();
    for &i in &order_idx {
        g.unravel(i, &mut idx);
        let xi_e = (0..d).fold(T::zero(), |s, j| s + axes[j][idx[j]] * axes[j][idx[j]]).sqrt();
        let v = if order == 2 {
            T::of(4.0) * k2[i] * xi_e
        } else {
            T::of(2.0) * xi_e
        };
        vmax = vmax.max(v);
        acc = acc + power[i];
        if acc >= target {
            break;
        }
    }
    if vmax == T::zero() {
        T::infinity()
    } else {
        g.spec().box_half_length / vmax
    }
}

/// Receives every recorded state during [`evolve`].
pub trait Observer<T: Real> {
    fn observe(&mut self, state: &SolverState<T>, record: &DiagnosticsRecord) -> Result<()>;
}

impl<T: Real, F> Observer<T> for F
where
    F: FnMut(&SolverState<T>, &DiagnosticsRecord) -> Result<()>,
{
    fn observe(&mut self, state: &SolverState<T>, record: &DiagnosticsRecord) -> Result<()> {
        self(state, record)
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct EvolveOptions {
    /// Run even when the initial data fails the edge-tail resolution check.
    pub force: bool,
}

#[derive(Clone, Debug)]
pub struct Evolution<T: Real> {
    pub records: Vec<DiagnosticsRecord>,
    /// Last finite state reached.
    pub final_state: SolverState<T>,
    pub t_wrap: T,
    pub abort: Option<Abort>,
    pub global_guarantee: bool,
}

/// Run Strang steps to `t_end`, recording diagnostics every `record_every` steps
/// (and at `t = 0` and the final step).
pub fn evolve<T: Real>(
    config: &SolverConfig<T>,
    initial: ComplexField<T>,
    plan: &DiagnosticsPlan<T>,
    options: EvolveOptions,
    observers: &mut [&mut dyn Observer<T>],
) -> Result<Evolution<T>> {
    let grid = initial.grid().clone();
    if grid.euclid_dims() == 0 {
        return Err(Error::InvalidConfig("simulation needs at least one Euclidean axis".into()));
    }
    let prop = Propagator::new(grid.clone(), config.clone())?;
    let ratio = edge_tail_ratio(&initial).as_f64();
    if ratio > EDGE_TAIL_THRESHOLD && !options.force {
        return Err(Error::Underresolved {
            ratio,
            threshold: EDGE_TAIL_THRESHOLD,
        });
    }
    let t_wrap = prop.wrap_time(&initial);
    let monitor = Monitor::new(grid, config.clone(), plan.clone())?;
    let mut state = SolverState::new(initial, t_wrap);
    let mut records = Vec::new();
    let mut emit = |state: &SolverState<T>, records: &mut Vec<DiagnosticsRecord>| -> Result<()> {
        let rec = monitor.record(state)?;
        for obs in observers.iter_mut() {
            obs.observe(state, &rec)?;
        }
        records.push(rec);
        Ok(())
    };
    emit(&state, &mut records)?;
    let steps = config.steps();
    let mut abort = None;
    let mut prev = state.field.samples().to_vec();
    for _ in 0..steps {
        prev.copy_from_slice(state.field.samples());
        if let Err(a) = prop.strang_step(&mut state) {
            if matches!(a, Abort::NonFinite { .. }) {
                state.field.samples_mut().copy_from_slice(&prev);
                state.step -= 1;
                state.t = T::of_usize(state.step) * config.dt;
            }
            abort = Some(a);
            break;
        }
        if state.step % config.record_every == 0 || state.step == steps {
            emit(&state, &mut records)?;
        }
    }
    let final_state = state;
    Ok(Evolution {
        records,
        final_state,
        t_wrap,
        abort,
        global_guarantee: config.has_global_guarantee(prop.grid().euclid_dims()),
    })
}
