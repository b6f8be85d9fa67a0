use crate::error::{Error, Result};
use crate::field::{sobolev_norm_spectral, ComplexField, SpectralField};
use crate::propagator::SolverConfig;
use crate::scalar::Real;

/// Free flow run backwards: `e^{-itΔ^m}` applied to `u(t)`, on the spectral side.
pub fn pullback<T: Real>(u: &ComplexField<T>, t: T, config: &SolverConfig<T>) -> SpectralField<T> {
    let table = u.grid().wavenumbers();
    let sym = if config.order == 2 { &table.k4 } else { &table.k2 };
    let s = -config.dispersion_sign() * t;
    let mut spec = u.to_spectral();
    spec.coeffs_mut()
        .iter_mut()
        .zip(sym)
        .for_each(|(v, &k)| *v = *v * num_complex::Complex::from_polar(T::one(), s * k));
    spec
}

/// `‖e^{-it₁Δ^m}u(t₁) - e^{-it₂Δ^m}u(t₂)‖_{H²}`.
pub fn scattering_residual<T: Real>(
    u1: &ComplexField<T>,
    t1: T,
    u2: &ComplexField<T>,
    t2: T,
    config: &SolverConfig<T>,
) -> Result<T> {
    if !u1.grid().same_as(u2.grid()) {
        return Err(Error::GridMismatch);
    }
    let a = pullback(u1, t1, config);
    let b = pullback(u2, t2, config);
    let diff: Vec<_> = a.coeffs().iter().zip(b.coeffs()).map(|(x, y)| x - y).collect();
    let diff = SpectralField::new(u1.grid().clone(), diff)?;
    Ok(sobolev_norm_spectral(&diff, T::of(2.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{make_gaussian, GaussianParams};
    use crate::grid::make_grid;
    use crate::GridSpec;
    use crate::propagator::{Propagator, Sign, SolverState};

    #[test]
    fn linear_solution_has_zero_residual() {
        let g = make_grid(GridSpec::new(1, 1, 10.0, 64, 8)).unwrap();
        let (f, _) = make_gaussian(&g, &GaussianParams::centered(1, 1, 1.0)).unwrap();
        let cfg = SolverConfig::biharmonic(2.0, Sign::Defocusing, 0.01, 1.0).linear();
        let prop = Propagator::new(g.clone(), cfg.clone()).unwrap();
        let mut s = SolverState::new(f.clone(), f64::INFINITY);
        for _ in 0..50 {
            prop.strang_step(&mut s).unwrap();
        }
        let r = scattering_residual(&f, 0.0, &s.field, s.t, &cfg).unwrap();
        assert!(r <= 1e-12, "{r}");
        assert_eq!(scattering_residual(&s.field, s.t, &s.field, s.t, &cfg).unwrap(), 0.0);
    }

    #[test]
    fn grid_mismatch_rejected() {
        let g1 = make_grid(GridSpec::new(1, 1, 10.0, 64, 8)).unwrap();
        let g2 = make_grid(GridSpec::new(1, 1, 10.0, 32, 8)).unwrap();
        let cfg = SolverConfig::biharmonic(2.0, Sign::Defocusing, 0.01, 1.0);
        let r = scattering_residual(&ComplexField::zeros(g1), 0.0, &ComplexField::zeros(g2), 0.0, &cfg);
        assert!(matches!(r, Err(Error::GridMismatch)));
    }
}
