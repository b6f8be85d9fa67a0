use crate::field::{ComplexField, SpectralField};
use crate::propagator::SolverConfig;
use crate::scalar::{pairwise_sum_by, Real};

/// `∫|u|²`.
pub fn mass<T: Real>(f: &ComplexField<T>) -> T {
    let d = f.samples();
    pairwise_sum_by(d.len(), |i| d[i].norm_sqr()) * f.grid().cell_volume()
}

/// Kinetic and potential parts of the energy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyParts<T> {
    /// `½‖Δu‖²` for the biharmonic flow, `½‖∇u‖²` for NLS.
    pub kinetic: T,
    /// `λ a/(p+2) ∫|u|^{p+2}` with nonlinear amplitude `a`.
    pub potential: T,
}

impl<T: Real> EnergyParts<T> {
    pub fn total(&self) -> T {
        self.kinetic + self.potential
    }
}

pub fn energy_parts<T: Real>(f: &ComplexField<T>, config: &SolverConfig<T>) -> EnergyParts<T> {
    energy_parts_with(f, &f.to_spectral(), config)
}

pub(crate) fn energy_parts_with<T: Real>(
    f: &ComplexField<T>,
    spec: &SpectralField<T>,
    config: &SolverConfig<T>,
) -> EnergyParts<T> {
    let table = f.grid().wavenumbers();
    let sym = if config.order == 2 { &table.k4 } else { &table.k2 };
    let kinetic = spec.weighted_norm_sqr(|i| sym[i]) / T::of(2.0);
    let coef = config.sign.lambda::<T>() * config.nonlinear_amplitude / (config.p + T::of(2.0));
    let potential = if coef == T::zero() {
        T::zero()
    } else {
        coef * power_integral(f, config.p + T::of(2.0))
    };
    EnergyParts { kinetic, potential }
}

/// `E(u) = kinetic + potential`.
pub fn energy<T: Real>(f: &ComplexField<T>, config: &SolverConfig<T>) -> T {
    energy_parts(f, config).total()
}

/// `∫|u|^q`.
pub fn power_integral<T: Real>(f: &ComplexField<T>, q: T) -> T {
    let d = f.samples();
    let half_q = q / T::of(2.0);
    let s = if q == T::of(4.0) {
        pairwise_sum_by(d.len(), |i| {
            let m = d[i].norm_sqr();
            m * m
        })
    } else {
        pairwise_sum_by(d.len(), |i| d[i].norm_sqr().powf(half_q))
    };
    s * f.grid().cell_volume()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{make_gaussian, make_plane_wave, GaussianParams};
    use crate::grid::make_grid;
    use crate::GridSpec;
    use crate::propagator::Sign;
    use std::f64::consts::PI;

    #[test]
    fn plane_wave_mass_is_volume() {
        let g = make_grid(GridSpec::new(1, 1, 3.0, 16, 8)).unwrap();
        let f = make_plane_wave(&g, &[PI / 3.0, 2.0]).unwrap();
        assert!((mass(&f) - g.volume()).abs() < 1e-12 * g.volume());
    }

    #[test]
    fn zero_field_has_zero_mass_and_energy() {
        let g = make_grid(GridSpec::new(1, 1, 3.0, 16, 8)).unwrap();
        let z = ComplexField::zeros(g);
        let cfg = SolverConfig::biharmonic(2.0, Sign::Defocusing, 0.01, 1.0);
        assert_eq!(mass(&z), 0.0);
        assert_eq!(energy(&z, &cfg), 0.0);
    }

    #[test]
    fn defocusing_gaussian_energy_exceeds_kinetic() {
        let g = make_grid(GridSpec::new(1, 1, 10.0, 64, 8)).unwrap();
        let (f, _) = make_gaussian(&g, &GaussianParams::centered(1, 1, 1.0)).unwrap();
        let cfg = SolverConfig::biharmonic(2.0, Sign::Defocusing, 0.01, 1.0);
        let e = energy_parts(&f, &cfg);
        assert!(e.kinetic > 0.0 && e.potential > 0.0);
        assert!(e.total() > e.kinetic);
    }

    #[test]
    fn plane_wave_kinetic_energy_closed_form() {
        let g = make_grid(GridSpec::new(1, 1, PI, 16, 8)).unwrap();
        let f = make_plane_wave(&g, &[2.0, 1.0]).unwrap();
        let cfg = SolverConfig::biharmonic(2.0, Sign::Focusing, 0.01, 1.0).linear();
        let e = energy_parts(&f, &cfg);
        // |k|⁴ = 25, mass = 4π²
        assert!((e.kinetic - 12.5 * 4.0 * PI * PI).abs() < 1e-9);
        assert_eq!(e.potential, 0.0);
    }
}
