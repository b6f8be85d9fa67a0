use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{lq_norm, sobolev_norm_spectral, ComplexField};
use crate::propagator::SolverConfig;
use crate::scalar::{pairwise_sum_by, Real};

use super::conserved::{energy_parts_with, mass};
use super::cube::sup_cube_mass;
use super::record::DiagnosticsRecord;
use super::spacetime::Snapshot;

/// Time integral of the cube-mass integrand and its normalization by `‖u₀‖⁴_{H²}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MorawetzLhs {
    pub integral: f64,
    pub c_test: f64,
}

/// Trapezoidal integral of `sup_cube_mass(r₀)^{(p+4)/2}` over a record series.
pub fn morawetz_lhs_accumulate(records: &[DiagnosticsRecord]) -> Result<MorawetzLhs> {
    let first = records.first().ok_or(Error::EmptySeries)?;
    let integral = pairwise_sum_by(records.len() - 1, |i| {
        let (a, b) = (&records[i], &records[i + 1]);
        0.5 * (b.t - a.t) * (a.morawetz_integrand + b.morawetz_integrand)
    });
    let h4 = first.h2.powi(4);
    let c_test = if h4 == 0.0 { 0.0 } else { integral / h4 };
    Ok(MorawetzLhs { integral, c_test })
}

/// `‖u‖_{L^{q*}} / (cube_mass^{1/(D+2)} ‖u‖_{H¹}^{D/(D+2)})` with `D = d + n`
/// and `q* = 2 + 4/D`. Zero for the zero field.
pub fn gn_ratio<T: Real>(f: &ComplexField<T>, r: T) -> Result<T> {
    let g = f.grid();
    let dim = T::of_usize(g.ndim());
    let q = T::of(2.0) + T::of(4.0) / dim;
    let num = lq_norm(f, q)?;
    if num == T::zero() {
        return Ok(T::zero());
    }
    let cube = sup_cube_mass(f, r)?.value;
    let h1 = sobolev_norm_spectral(&f.to_spectral(), T::one());
    let two = T::of(2.0);
    Ok(num / (cube.powf(T::one() / (dim + two)) * h1.powf(dim / (dim + two))))
}

/// One `L^q` norm along a series.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QSeries {
    pub q: f64,
    /// `(t, ‖u(t)‖_{L^q})`.
    pub values: Vec<(f64, f64)>,
    /// Kendall rank correlation between time and norm over the pre-wrap
    /// window; `-1` is strictly decreasing.
    pub trend: f64,
    /// Last pre-wrap value over the first one.
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayReport {
    pub series: Vec<QSeries>,
    /// `(t, gn_ratio)` per snapshot.
    pub gn_ratio: Vec<(f64, f64)>,
    /// Number of leading snapshots at or before `t_wrap`.
    pub pre_wrap: usize,
    pub warnings: Vec<String>,
}

/// Kendall's tau-a of `(t_i, v_i)`; zero for fewer than two points.
pub fn kendall_trend(values: &[(f64, f64)]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let mut s = 0i64;
    for i in 0..n {
        for j in i + 1..n {
            let dt = values[j].0 - values[i].0;
            let dv = values[j].1 - values[i].1;
            s += ((dt * dv).partial_cmp(&0.0).map(|o| o as i64)).unwrap_or(0);
        }
    }
    s as f64 / (n * (n - 1) / 2) as f64
}

/// Per-`q` norm series, trend statistics over `t ≤ t_wrap`, and the localized
/// Gagliardo–Nirenberg ratio with cube half-width `max(1/2, h)`.
pub fn decay_report<T: Real>(series: &[Snapshot<T>], q_list: &[T], t_wrap: T) -> Result<DecayReport> {
    let first = series.first().ok_or(Error::EmptySeries)?;
    let g = first.field.grid();
    let dim = g.ndim() as f64;
    let q_max = 2.0 + 4.0 / dim;
    let mut warnings = Vec::new();
    for &q in q_list {
        let qf = q.as_f64();
        if !(qf > 2.0 && qf <= q_max * (1.0 + 1e-12)) {
            warnings.push(format!("q = {qf} lies outside the decay range (2, {q_max}]"));
        }
    }
    let pre_wrap = series.iter().take_while(|s| s.t <= t_wrap).count();
    let mut out = Vec::with_capacity(q_list.len());
    for &q in q_list {
        let values = series
            .iter()
            .map(|s| Ok((s.t.as_f64(), lq_norm(&s.field, q)?.as_f64())))
            .collect::<Result<Vec<_>>>()?;
        let window = &values[..pre_wrap];
        let ratio = match (window.first(), window.last()) {
            (Some(a), Some(b)) if a.1 != 0.0 => b.1 / a.1,
            _ => 0.0,
        };
        out.push(QSeries {
            q: q.as_f64(),
            trend: kendall_trend(window),
            ratio,
            values,
        });
    }
    let r = g.euclid_spacing().max(T::of(0.5));
    let gn = series
        .iter()
        .map(|s| Ok((s.t.as_f64(), gn_ratio(&s.field, r)?.as_f64())))
        .collect::<Result<Vec<_>>>()?;
    Ok(DecayReport {
        series: out,
        gn_ratio: gn,
        pre_wrap,
        warnings,
    })
}

/// A priori `H²` bound for the biharmonic flow built from mass and energy.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FocusingBound {
    pub mass: f64,
    pub energy: f64,
    pub initial_h2: f64,
    /// Largest `h` with `h² ≤ 2M + 4E + 4a/(p+2) M ψ(h)^p`.
    pub bound: f64,
}

/// `‖u‖_{L^∞}` majorant `ψ(h)` on the grid for data of mass `m` and `H²` norm `h`.
struct SupBound<T> {
    /// Tail sums of `⟨k⟩^{-4}` after keeping the `j` lowest modes, `j = 0..=N`.
    tails: Vec<T>,
    inv_sqrt_volume: T,
    sqrt_mass: T,
}

impl<T: Real> SupBound<T> {
    fn new(f: &ComplexField<T>, m: T) -> Self {
        let g = f.grid();
        let mut k2 = g.wavenumbers().k2.clone();
        k2.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut tails = vec![T::zero(); k2.len() + 1];
        for j in (0..k2.len()).rev() {
            let b = T::one() + k2[j];
            tails[j] = tails[j + 1] + T::one() / (b * b);
        }
        Self {
            tails,
            inv_sqrt_volume: T::one() / g.volume().sqrt(),
            sqrt_mass: m.sqrt(),
        }
    }

    fn eval(&self, h: T) -> T {
        let best = self
            .tails
            .iter()
            .enumerate()
            .map(|(j, &t)| T::of_usize(j).sqrt() * self.sqrt_mass + t.sqrt() * h)
            .fold(T::infinity(), T::min);
        best * self.inv_sqrt_volume
    }
}

/// Bound on `sup_t ‖u(t)‖_{H²}` from the conserved mass and energy.
///
/// Uses `‖u‖²_{H²} ≤ 2M + 4K`, `K = E + a/(p+2)∫|u|^{p+2}` and
/// `∫|u|^{p+2} ≤ M ‖u‖^p_∞ ≤ M ψ(‖u‖_{H²})^p`. For defocusing data the last
/// term is dropped.
pub fn focusing_h2_bound<T: Real>(f: &ComplexField<T>, config: &SolverConfig<T>) -> Result<FocusingBound> {
    if config.order != 2 {
        return Err(Error::Unsupported("the H² bound is derived for the biharmonic flow".into()));
    }
    let spec = f.to_spectral();
    let m = mass(f);
    let e = energy_parts_with(f, &spec, config).total();
    let h0 = sobolev_norm_spectral(&spec, T::of(2.0));
    let base = T::of(2.0) * m + T::of(4.0) * e;
    let effective = config.sign.lambda::<T>() * config.nonlinear_amplitude;
    let coef = if effective < T::zero() {
        T::of(4.0) * effective.abs() / (config.p + T::of(2.0)) * m
    } else {
        T::zero()
    };
    let bound = if coef == T::zero() {
        base.max(T::zero()).sqrt()
    } else {
        let psi = SupBound::new(f, m);
        let rhs = |h: T| base + coef * psi.eval(h).powf(config.p);
        let gap = |h: T| rhs(h) - h * h;
        // ψ is capped by its j = N term, so rhs is bounded.
        let f_max = base + coef * (T::of_usize(f.grid().total_points()).sqrt() * m.sqrt() * psi.inv_sqrt_volume).powf(config.p);
        let hi = f_max.max(T::zero()).sqrt() * T::of(1.000001);
        // gap(h0) >= 0 always holds, so scan down from hi to the first point back inside.
        let mut outside = hi;
        let mut inside = h0;
        let mut h = hi;
        while h > h0 {
            let next = h * T::of(0.999);
            if gap(next) >= T::zero() {
                inside = next.max(h0);
                break;
            }
            outside = next;
            h = next;
        }
        let (mut a, mut b) = (inside, outside.max(inside));
        for _ in 0..200 {
            if b - a <= T::epsilon() * b {
                break;
            }
            let mid = (a + b) / T::of(2.0);
            if gap(mid) >= T::zero() {
                a = mid;
            } else {
                b = mid;
            }
        }
        b
    };
    Ok(FocusingBound {
        mass: m.as_f64(),
        energy: e.as_f64(),
        initial_h2: h0.as_f64(),
        bound: bound.as_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{make_gaussian, GaussianParams};
    use crate::grid::make_grid;
    use crate::GridSpec;
    use crate::propagator::{Propagator, Sign, SolverState};

    fn record(t: f64, integrand: f64, h2: f64) -> DiagnosticsRecord {
        DiagnosticsRecord {
            t,
            mass: 0.0,
            energy: 0.0,
            kinetic: 0.0,
            potential: 0.0,
            lq: Default::default(),
            cube_mass: Default::default(),
            morawetz: None,
            morawetz_integrand: integrand,
            h2,
            post_wrap: false,
        }
    }

    #[test]
    fn lhs_of_zero_solution_is_zero() {
        let r: Vec<_> = (0..5).map(|i| record(i as f64, 0.0, 0.0)).collect();
        assert_eq!(morawetz_lhs_accumulate(&r).unwrap(), MorawetzLhs { integral: 0.0, c_test: 0.0 });
        assert!(matches!(morawetz_lhs_accumulate(&[]), Err(Error::EmptySeries)));
    }

    #[test]
    fn constant_integrand_grows_linearly() {
        let a: Vec<_> = (0..=10).map(|i| record(0.1 * i as f64, 3.0, 2.0)).collect();
        let b: Vec<_> = (0..=20).map(|i| record(0.1 * i as f64, 3.0, 2.0)).collect();
        let la = morawetz_lhs_accumulate(&a).unwrap();
        let lb = morawetz_lhs_accumulate(&b).unwrap();
        assert!((la.integral - 3.0).abs() < 1e-12);
        assert!((lb.integral - 2.0 * la.integral).abs() < 1e-12);
        assert!((la.c_test - 3.0 / 16.0).abs() < 1e-12);
    }

    #[test]
    fn kendall_extremes() {
        let dec: Vec<_> = (0..6).map(|i| (i as f64, -(i as f64))).collect();
        let inc: Vec<_> = (0..6).map(|i| (i as f64, i as f64)).collect();
        assert_eq!(kendall_trend(&dec), -1.0);
        assert_eq!(kendall_trend(&inc), 1.0);
        assert_eq!(kendall_trend(&dec[..1]), 0.0);
    }

    #[test]
    fn zero_field_report_is_zero() {
        let g = make_grid(GridSpec::new(2, 1, 6.0, 16, 4)).unwrap();
        let z = ComplexField::zeros(g);
        let s = vec![Snapshot { t: 0.0, field: z.clone() }, Snapshot { t: 1.0, field: z }];
        let rep = decay_report(&s, &[3.0, 10.0 / 3.0], 2.0).unwrap();
        assert!(rep.warnings.is_empty());
        assert!(rep.series.iter().all(|q| q.values.iter().all(|v| v.1 == 0.0)));
        assert!(rep.gn_ratio.iter().all(|v| v.1 == 0.0));
        let rep = decay_report(&s, &[5.0], 2.0).unwrap();
        assert_eq!(rep.warnings.len(), 1);
    }

    #[test]
    fn gn_ratio_is_scale_invariant() {
        let g = make_grid(GridSpec::new(1, 1, 8.0, 64, 8)).unwrap();
        let (f, _) = make_gaussian(&g, &GaussianParams::centered(1, 1, 1.0)).unwrap();
        let a = gn_ratio(&f, 0.5).unwrap();
        let b = gn_ratio(&f.scale(num_complex::Complex::new(0.0, 7.5)), 0.5).unwrap();
        assert!((a - b).abs() < 1e-12 * a);
    }

    #[test]
    fn linear_gaussian_lq_decays() {
        let g = make_grid(GridSpec::new(1, 1, 20.0, 128, 4)).unwrap();
        let (f, _) = make_gaussian(&g, &GaussianParams::centered(1, 1, 1.0)).unwrap();
        let cfg = SolverConfig::biharmonic(2.0, Sign::Defocusing, 0.01, 1.0).linear();
        let prop = Propagator::new(g.clone(), cfg).unwrap();
        let mut st = SolverState::new(f, f64::INFINITY);
        let mut series = vec![Snapshot { t: 0.0, field: st.field.clone() }];
        for k in 1..=40 {
            prop.strang_step(&mut st).unwrap();
            if k % 10 == 0 {
                series.push(Snapshot { t: st.t, field: st.field.clone() });
            }
        }
        let rep = decay_report(&series, &[4.0], 1.0).unwrap();
        assert_eq!(rep.pre_wrap, 5);
        assert_eq!(rep.series[0].trend, -1.0);
        assert!(rep.series[0].ratio < 1.0);
    }

    #[test]
    fn bound_dominates_initial_norm() {
        let g = make_grid(GridSpec::new(1, 1, 10.0, 64, 4)).unwrap();
        let (f, _) = make_gaussian(&g, &GaussianParams::centered(1, 1, 1.5)).unwrap();
        for sign in [Sign::Focusing, Sign::Defocusing] {
            let cfg = SolverConfig::biharmonic(2.0, sign, 0.01, 1.0);
            let b = focusing_h2_bound(&f, &cfg).unwrap();
            assert!(b.bound >= b.initial_h2, "{b:?}");
            assert!(b.bound.is_finite());
        }
        let nls = SolverConfig { order: 1, ..SolverConfig::biharmonic(2.0, Sign::Focusing, 0.01, 1.0) };
        assert!(matches!(focusing_h2_bound(&f, &nls), Err(Error::Unsupported(_))));
    }
}
