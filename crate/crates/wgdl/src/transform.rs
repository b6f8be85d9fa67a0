//! Multidimensional complex FFTs over row-major arrays.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::scalar::Real;

/// Below this many samples per axis pass the work stays on the calling thread.
const PARALLEL_THRESHOLD: usize = 1 << 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// Forward and inverse plans for a fixed set of axis lengths.
#[derive(Clone)]
pub struct PlanSet<T: Real> {
    plans: BTreeMap<usize, (Arc<dyn Fft<T>>, Arc<dyn Fft<T>>)>,
}

impl<T: Real> fmt::Debug for PlanSet<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PlanSet")
            .field("lengths", &self.plans.keys().collect::<Vec<_>>())
            .finish()
    }
}

impl<T: Real> PlanSet<T> {
    pub fn new(lengths: &[usize]) -> Self {
        let mut planner = FftPlanner::new();
        let mut plans = BTreeMap::new();
        for &n in lengths {
            plans
                .entry(n)
                .or_insert_with(|| (planner.plan_fft_forward(n), planner.plan_fft_inverse(n)));
        }
        Self { plans }
    }

    fn plan(&self, n: usize, dir: Direction) -> &Arc<dyn Fft<T>> {
        let (f, i) = self
            .plans
            .get(&n)
            .unwrap_or_else(|| panic!("no FFT plan for length {n}"));
        match dir {
            Direction::Forward => f,
            Direction::Inverse => i,
        }
    }

    /// Unnormalized transform of `data` (row-major, `shape`) along each axis in `axes`.
    pub fn transform(&self, data: &mut [Complex<T>], shape: &[usize], axes: &[usize], dir: Direction) {
        debug_assert_eq!(data.len(), shape.iter().product::<usize>());
        let mut scratch_buf = Vec::new();
        for &axis in axes {
            self.transform_axis(data, shape, axis, dir, &mut scratch_buf);
        }
    }

    fn transform_axis(
        &self,
        data: &mut [Complex<T>],
        shape: &[usize],
        axis: usize,
        dir: Direction,
        lines: &mut Vec<Complex<T>>,
    ) {
        let n = shape[axis];
        let stride: usize = shape[axis + 1..].iter().product();
        let total = data.len();
        if total == 0 || n <= 1 {
            return;
        }
        let plan = self.plan(n, dir);
        let parallel = total >= PARALLEL_THRESHOLD;
        if stride == 1 {
            run_batches(plan, data, n, parallel);
            return;
        }
        // Gather strided lines into contiguous storage, transform, scatter back.
        let block = n * stride;
        lines.clear();
        lines.resize(total, Complex::new(T::zero(), T::zero()));
        let gather = |(line, dst): (usize, &mut [Complex<T>])| {
            let base = (line / stride) * block + line % stride;
            for (j, v) in dst.iter_mut().enumerate() {
                *v = data[base + j * stride];
            }
        };
        if parallel {
            lines.par_chunks_mut(n).enumerate().for_each(gather);
        } else {
            lines.chunks_mut(n).enumerate().for_each(gather);
        }
        run_batches(plan, lines, n, parallel);
        let src: &[Complex<T>] = lines;
        let scatter = |(outer, dst): (usize, &mut [Complex<T>])| {
            for i in 0..stride {
                let line = outer * stride + i;
                let row = &src[line * n..(line + 1) * n];
                for (j, v) in row.iter().enumerate() {
                    dst[j * stride + i] = *v;
                }
            }
        };
        if parallel {
            data.par_chunks_mut(block).enumerate().for_each(scatter);
        } else {
            data.chunks_mut(block).enumerate().for_each(scatter);
        }
    }
}

fn run_batches<T: Real>(plan: &Arc<dyn Fft<T>>, buf: &mut [Complex<T>], n: usize, parallel: bool) {
    let scratch_len = plan.get_inplace_scratch_len();
    let zero = Complex::new(T::zero(), T::zero());
    if parallel {
        let lines_per_task = (PARALLEL_THRESHOLD / n).max(1);
        buf.par_chunks_mut(n * lines_per_task).for_each_init(
            || vec![zero; scratch_len],
            |scratch, chunk| plan.process_with_scratch(chunk, scratch),
        );
    } else {
        let mut scratch = vec![zero; scratch_len];
        plan.process_with_scratch(buf, &mut scratch);
    }
}

/// Integer mode index of FFT slot `i` on an axis of length `n` (standard ordering).
#[inline]
pub fn mode_index(i: usize, n: usize) -> i64 {
    if i <= (n - 1) / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_dft(x: &[Complex<f64>]) -> Vec<Complex<f64>> {
        let n = x.len();
        (0..n)
            .map(|k| {
                x.iter().enumerate().fold(Complex::new(0.0, 0.0), |acc, (j, v)| {
                    let th = -2.0 * std::f64::consts::PI * (j * k) as f64 / n as f64;
                    acc + v * Complex::from_polar(1.0, th)
                })
            })
            .collect()
    }

    #[test]
    fn mode_indices_follow_fft_order() {
        let got: Vec<i64> = (0..8).map(|i| mode_index(i, 8)).collect();
        assert_eq!(got, vec![0, 1, 2, 3, -4, -3, -2, -1]);
        let got: Vec<i64> = (0..5).map(|i| mode_index(i, 5)).collect();
        assert_eq!(got, vec![0, 1, 2, -2, -1]);
    }

    #[test]
    fn two_axis_transform_matches_separable_naive_dft() {
        let shape = [4usize, 6];
        let data: Vec<Complex<f64>> = (0..24)
            .map(|i| Complex::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let plans = PlanSet::new(&shape);
        let mut fast = data.clone();
        plans.transform(&mut fast, &shape, &[0, 1], Direction::Forward);

        let mut slow = data.clone();
        for r in 0..4 {
            let row = naive_dft(&slow[r * 6..(r + 1) * 6]);
            slow[r * 6..(r + 1) * 6].copy_from_slice(&row);
        }
        for c in 0..6 {
            let col: Vec<_> = (0..4).map(|r| slow[r * 6 + c]).collect();
            for (r, v) in naive_dft(&col).into_iter().enumerate() {
                slow[r * 6 + c] = v;
            }
        }
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn parallel_and_serial_paths_agree_bitwise() {
        let shape = [64usize, 8, 64];
        let total: usize = shape.iter().product();
        assert!(total >= PARALLEL_THRESHOLD);
        let data: Vec<Complex<f64>> = (0..total)
            .map(|i| Complex::new((i as f64).sin(), (i as f64 * 0.5).cos()))
            .collect();
        let plans = PlanSet::new(&shape);
        let mut a = data.clone();
        plans.transform(&mut a, &shape, &[0, 1, 2], Direction::Forward);
        let mut b = data;
        let mut lines = Vec::new();
        for axis in 0..3 {
            // serial reference: one axis at a time through the same code with threshold bypassed
            let n = shape[axis];
            let stride: usize = shape[axis + 1..].iter().product();
            let plan = plans.plan(n, Direction::Forward).clone();
            if stride == 1 {
                run_batches(&plan, &mut b, n, false);
            } else {
                lines.clear();
                let block = n * stride;
                for line in 0..total / n {
                    let base = (line / stride) * block + line % stride;
                    for j in 0..n {
                        lines.push(b[base + j * stride]);
                    }
                }
                run_batches(&plan, &mut lines, n, false);
                for line in 0..total / n {
                    let base = (line / stride) * block + line % stride;
                    for j in 0..n {
                        b[base + j * stride] = lines[line * n + j];
                    }
                }
            }
        }
        assert_eq!(a, b);
    }
}
