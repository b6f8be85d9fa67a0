use crate::error::{Error, Result};
use crate::field::{mixed_sobolev_torus, ComplexField};
use crate::scalar::{pairwise_sum_by, Real};

/// A field at a recorded time.
#[derive(Clone, Debug)]
pub struct Snapshot<T: Real> {
    pub t: T,
    pub field: ComplexField<T>,
}

/// `‖ ‖u(t, x, ·)‖_{H^γ_α} ‖_{L^m_x}` at one time.
fn spatial_factor<T: Real>(f: &ComplexField<T>, m_exp: T, gamma: T) -> Result<T> {
    let g = f.grid();
    let fibers = if g.torus_dims() == 0 {
        f.samples().iter().map(|v| v.norm()).collect()
    } else {
        mixed_sobolev_torus(f, gamma)?
    };
    if m_exp.is_infinite() {
        return Ok(fibers.iter().fold(T::zero(), |a, &b| a.max(b)));
    }
    let s = pairwise_sum_by(fibers.len(), |i| fibers[i].powf(m_exp));
    Ok((s * g.euclid_cell_volume()).powf(T::one() / m_exp))
}

/// Streaming form of [`spacetime_norm_accumulate`].
#[derive(Clone, Debug)]
pub struct SpacetimeAccumulator<T> {
    l: T,
    m_exp: T,
    gamma: T,
    samples: Vec<(T, T)>,
}

impl<T: Real> SpacetimeAccumulator<T> {
    pub fn new(l: T, m_exp: T, gamma: T) -> Result<Self> {
        if !(l >= T::one()) || !(m_exp >= T::one()) || !(gamma >= T::zero()) {
            return Err(Error::InvalidArgument(format!(
                "need l, m >= 1 and gamma >= 0, got l = {l}, m = {m_exp}, gamma = {gamma}"
            )));
        }
        Ok(Self {
            l,
            m_exp,
            gamma,
            samples: Vec::new(),
        })
    }

    pub fn push(&mut self, t: T, f: &ComplexField<T>) -> Result<()> {
        let v = spatial_factor(f, self.m_exp, self.gamma)?;
        self.samples.push((t, v));
        Ok(())
    }

    /// `L^l` in time of the spatial factor; trapezoidal for finite `l`, max for `l = ∞`.
    pub fn finish(&self) -> Result<T> {
        if self.samples.is_empty() {
            return Err(Error::EmptySeries);
        }
        if self.l.is_infinite() {
            return Ok(self.samples.iter().fold(T::zero(), |a, &(_, v)| a.max(v)));
        }
        let s = &self.samples;
        let half = T::of(0.5);
        let integral = pairwise_sum_by(s.len().saturating_sub(1), |i| {
            (s[i + 1].0 - s[i].0) * half * (s[i].1.powf(self.l) + s[i + 1].1.powf(self.l))
        });
        Ok(integral.powf(T::one() / self.l))
    }
}

/// `‖u‖_{L^l_t L^m_x H^γ_α}` over a recorded series.
pub fn spacetime_norm_accumulate<T: Real>(series: &[Snapshot<T>], l: T, m_exp: T, gamma: T) -> Result<T> {
    if series.is_empty() {
        return Err(Error::EmptySeries);
    }
    let mut acc = SpacetimeAccumulator::new(l, m_exp, gamma)?;
    for s in series {
        acc.push(s.t, &s.field)?;
    }
    acc.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::mass;
    use crate::field::{make_gaussian, GaussianParams};
    use crate::grid::make_grid;
    use crate::GridSpec;
    use num_complex::Complex;

    fn series() -> Vec<Snapshot<f64>> {
        let g = make_grid(GridSpec::new(1, 1, 6.0, 32, 8)).unwrap();
        (0..3)
            .map(|k| {
                let mut p = GaussianParams::centered(1, 1, 0.8 + 0.2 * k as f64);
                p.modulation = vec![0.0, k as f64];
                Snapshot {
                    t: 0.5 * k as f64,
                    field: make_gaussian(&g, &p).unwrap().0,
                }
            })
            .collect()
    }

    #[test]
    fn sup_in_time_of_l2_is_max_root_mass() {
        let s = series();
        let v = spacetime_norm_accumulate(&s, f64::INFINITY, 2.0, 0.0).unwrap();
        let expect = s.iter().map(|x| mass(&x.field).sqrt()).fold(0.0, f64::max);
        assert!((v - expect).abs() < 1e-12 * expect);
    }

    #[test]
    fn constant_series_scales_with_duration() {
        let s = series();
        let c: Vec<Snapshot<f64>> = (0..5)
            .map(|k| Snapshot {
                t: 0.25 * k as f64,
                field: s[1].field.clone(),
            })
            .collect();
        let one = spacetime_norm_accumulate(&c[..1], f64::INFINITY, 4.0, 1.0).unwrap();
        let v = spacetime_norm_accumulate(&c, 3.0, 4.0, 1.0).unwrap();
        assert!((v - 1.0f64.powf(1.0 / 3.0) * one).abs() < 1e-12 * one);
    }

    #[test]
    fn matches_dense_recomputation() {
        let s = series();
        let (l, m, gamma) = (2.0, 3.0, 1.0);
        let g = s[0].field.grid().clone();
        let dense: Vec<f64> = s
            .iter()
            .map(|snap| {
                // fiber H¹ norms by explicit torus Fourier sums
                let nt = 8;
                let mut acc = 0.0;
                for e in 0..32 {
                    let fiber: Vec<Complex<f64>> = (0..nt).map(|a| snap.field.samples()[e * nt + a]).collect();
                    let mut h = 0.0;
                    for k in 0..nt {
                        let kk = if k < 4 { k as f64 } else { k as f64 - 8.0 };
                        let c: Complex<f64> = (0..nt)
                            .map(|a| fiber[a] * Complex::from_polar(1.0, -2.0 * std::f64::consts::PI * (k * a) as f64 / 8.0))
                            .sum();
                        h += (1.0 + kk * kk) * c.norm_sqr();
                    }
                    let fiber_norm = (h * g.torus_volume() / 64.0).sqrt();
                    acc += fiber_norm.powf(m) * g.euclid_spacing();
                }
                acc.powf(1.0 / m)
            })
            .collect();
        let expect = (0.25 * (dense[0].powf(l) + dense[1].powf(l)) + 0.25 * (dense[1].powf(l) + dense[2].powf(l))).sqrt();
        let v = spacetime_norm_accumulate(&s, l, m, gamma).unwrap();
        assert!((v - expect).abs() < 1e-10 * expect, "{v} vs {expect}");
    }

    #[test]
    fn empty_series_rejected() {
        assert!(matches!(
            spacetime_norm_accumulate::<f64>(&[], 2.0, 2.0, 0.0),
            Err(Error::EmptySeries)
        ));
    }
}
