use crate::error::{Error, Result};
use crate::field::ComplexField;
use crate::scalar::Real;

use super::morawetz::marginal_density;

/// Largest mass over grid-aligned cubes `x₀ + [-r, r]^d` (times the torus).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CubeMass<T> {
    pub value: T,
    /// Half-width actually used, a whole number of cells.
    pub effective_r: T,
    pub half_cells: usize,
}

/// Whole-cell half-width for a requested `r`.
pub fn cube_half_cells<T: Real>(h: T, l: T, r: T) -> Result<usize> {
    if !(r >= h * (T::one() - T::of(1e-12))) {
        return Err(Error::InvalidArgument(format!("cube half-width {r} is below one grid spacing {h}")));
    }
    if r > T::of(2.0) * l {
        return Err(Error::InvalidArgument(format!("cube half-width {r} exceeds the box length {}", T::of(2.0) * l)));
    }
    Ok((r / h * (T::one() + T::of(1e-12))).floor().to_usize().unwrap_or(0))
}

/// Sup over centers of the windowed density sum.
pub fn sup_cube_mass<T: Real>(f: &ComplexField<T>, r: T) -> Result<CubeMass<T>> {
    let g = f.grid();
    if g.euclid_dims() == 0 {
        return Err(Error::InvalidArgument("cube mass needs a Euclidean axis".into()));
    }
    let c = cube_half_cells(g.euclid_spacing(), g.spec().box_half_length, r)?;
    let rho = marginal_density(f);
    Ok(CubeMass {
        value: sup_window_sum(&rho, g.euclid_dims(), g.spec().points_euclid, c) * g.euclid_cell_volume(),
        effective_r: T::of_usize(c) * g.euclid_spacing(),
        half_cells: c,
    })
}

/// Max over nodes of the periodic box sum of half-width `c` cells.
pub(crate) fn sup_window_sum<T: Real>(rho: &[T], d: usize, ne: usize, c: usize) -> T {
    if 2 * c + 1 >= ne {
        // The window covers every axis completely.
        return crate::scalar::pairwise_sum(rho);
    }
    let mut cur = rho.to_vec();
    let mut next = vec![T::zero(); cur.len()];
    for axis in 0..d {
        let stride = ne.pow((d - 1 - axis) as u32);
        let block = ne * stride;
        for (flat, out) in next.iter_mut().enumerate() {
            let base = (flat / block) * block + flat % stride;
            let i = (flat / stride) % ne;
            let mut acc = T::zero();
            for j in 0..=2 * c {
                let k = (i + ne + j - c) % ne;
                acc = acc + cur[base + k * stride];
            }
            *out = acc;
        }
        std::mem::swap(&mut cur, &mut next);
    }
    cur.into_iter().fold(T::neg_infinity(), T::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::mass;
    use crate::field::{make_gaussian, GaussianParams};
    use crate::grid::make_grid;
    use crate::GridSpec;

    #[test]
    fn full_window_equals_mass() {
        let g = make_grid(GridSpec::new(2, 1, 6.0, 32, 8)).unwrap();
        let (f, _) = make_gaussian(&g, &GaussianParams::centered(2, 1, 1.0)).unwrap();
        let cm = sup_cube_mass(&f, 6.0).unwrap();
        assert!((cm.value - mass(&f)).abs() < 1e-12 * mass(&f));
    }

    #[test]
    fn concentrated_bump_fills_small_cube() {
        let g = make_grid(GridSpec::new(1, 1, 20.0, 256, 8)).unwrap();
        let mut p = GaussianParams::centered(1, 1, 0.3);
        p.center = vec![5.0];
        let (f, _) = make_gaussian(&g, &p).unwrap();
        let cm = sup_cube_mass(&f, 2.0).unwrap();
        assert!((cm.value - mass(&f)).abs() < 1e-10 * mass(&f));
        assert_eq!(cm.half_cells, 12);
        assert!((cm.effective_r - 12.0 * 40.0 / 256.0).abs() < 1e-12);
    }

    #[test]
    fn translation_invariant() {
        let g = make_grid(GridSpec::new(2, 1, 6.0, 32, 8)).unwrap();
        let mut p = GaussianParams::centered(2, 1, 0.8);
        p.modulation = vec![0.3, -0.2, 1.0];
        let (f, _) = make_gaussian(&g, &p).unwrap();
        let a = sup_cube_mass(&f, 1.0).unwrap().value;
        let b = sup_cube_mass(&f.translate(&[5, -3, 2]), 1.0).unwrap().value;
        assert!((a - b).abs() <= 1e-12 * a);
    }

    #[test]
    fn rejects_out_of_range_widths() {
        let g = make_grid(GridSpec::new(1, 1, 6.0, 32, 8)).unwrap();
        let f = ComplexField::zeros(g);
        assert!(sup_cube_mass(&f, 0.1).is_err());
        assert!(sup_cube_mass(&f, 13.0).is_err());
    }
}
