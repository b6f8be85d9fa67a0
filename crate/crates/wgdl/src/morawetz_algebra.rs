//! Closed-form derivatives of the weight `a(z) = ⟨z⟩ = (1 + |z|²)^{1/2}` on `ℝ^d`
//! and sampled checks of the pointwise sign claims built from them.
//!
//! Hessian-type derivatives are returned as a coefficient pair `(α, β)` with
//! `∂_{ij}F = α δ_{ij} + β z_i z_j`.

use std::ops::RangeInclusive;
use std::str::FromStr;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use twofloat::TwoFloat;

use crate::error::{Error, Result};
use crate::scalar::{bracket, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightDerivative {
    A,
    Laplacian,
    Hessian,
    Bilaplacian,
    Trilaplacian,
    HessianLaplacian,
}

impl WeightDerivative {
    pub const ALL: [WeightDerivative; 6] = [
        WeightDerivative::A,
        WeightDerivative::Laplacian,
        WeightDerivative::Hessian,
        WeightDerivative::Bilaplacian,
        WeightDerivative::Trilaplacian,
        WeightDerivative::HessianLaplacian,
    ];

    pub fn name(self) -> &'static str {
        match self {
            WeightDerivative::A => "a",
            WeightDerivative::Laplacian => "lap",
            WeightDerivative::Hessian => "hess",
            WeightDerivative::Bilaplacian => "bilap",
            WeightDerivative::Trilaplacian => "trilap",
            WeightDerivative::HessianLaplacian => "hess_lap",
        }
    }
}

impl FromStr for WeightDerivative {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|w| w.name() == s)
            .ok_or_else(|| Error::UnknownSelector(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum WeightValue<T> {
    Scalar(T),
    /// `α δ_{ij} + β z_i z_j`.
    Pair { delta: T, outer: T },
}

fn d_t<T: Real>(d: usize) -> T {
    T::of_usize(d)
}

pub fn a_value<T: Real>(r: T, _d: usize) -> T {
    bracket(r * r)
}

/// `Δa = (d-1)/⟨r⟩ + 1/⟨r⟩³`.
pub fn laplacian_a<T: Real>(r: T, d: usize) -> T {
    let b = bracket(r * r);
    (d_t::<T>(d) - T::one()) / b + T::one() / b.powi(3)
}

/// `Δ²a = -(d-1)(d-3)/⟨r⟩³ - 6(d-3)/⟨r⟩⁵ - 15/⟨r⟩⁷`.
pub fn bilaplacian_a<T: Real>(r: T, d: usize) -> T {
    bilaplacian_terms(r, d).iter().fold(T::zero(), |s, &t| s + t)
}

fn bilaplacian_terms<T: Real>(r: T, d: usize) -> [T; 3] {
    let b = bracket(r * r);
    let dd = d_t::<T>(d);
    let (one, three) = (T::one(), T::of(3.0));
    [
        -(dd - one) * (dd - three) / b.powi(3),
        -T::of(6.0) * (dd - three) / b.powi(5),
        -T::of(15.0) / b.powi(7),
    ]
}

/// `Δ³a = 3(d-1)(d-3)(d-5)/⟨r⟩⁵ + 45(d-3)(d-5)/⟨r⟩⁷ + 315(d-5)/⟨r⟩⁹ + 945/⟨r⟩¹¹`.
pub fn trilaplacian_a<T: Real>(r: T, d: usize) -> T {
    trilaplacian_terms(r, d).iter().fold(T::zero(), |s, &t| s + t)
}

fn trilaplacian_terms<T: Real>(r: T, d: usize) -> [T; 4] {
    let b = bracket(r * r);
    let dd = d_t::<T>(d);
    let (one, three, five) = (T::one(), T::of(3.0), T::of(5.0));
    [
        T::of(3.0) * (dd - one) * (dd - three) * (dd - five) / b.powi(5),
        T::of(45.0) * (dd - three) * (dd - five) / b.powi(7),
        T::of(315.0) * (dd - five) / b.powi(9),
        T::of(945.0) / b.powi(11),
    ]
}

/// `∂_{ij}a = δ_{ij}/⟨r⟩ - z_i z_j/⟨r⟩³`.
pub fn hessian_a_coeffs<T: Real>(r: T, _d: usize) -> (T, T) {
    let b = bracket(r * r);
    (T::one() / b, -T::one() / b.powi(3))
}

/// `∂_{ij}Δa = -((d-1)/⟨r⟩³ + 3/⟨r⟩⁵) δ_{ij} + (3(d-1)/⟨r⟩⁵ + 15/⟨r⟩⁷) z_i z_j`.
pub fn hessian_laplacian_a_coeffs<T: Real>(r: T, d: usize) -> (T, T) {
    let b = bracket(r * r);
    let dm1 = d_t::<T>(d) - T::one();
    (
        -(dm1 / b.powi(3) + T::of(3.0) / b.powi(5)),
        T::of(3.0) * dm1 / b.powi(5) + T::of(15.0) / b.powi(7),
    )
}

pub fn eval_weight_derivative<T: Real>(which: WeightDerivative, r: T, d: usize) -> Result<WeightValue<T>> {
    if !(r >= T::zero()) || d == 0 {
        return Err(Error::InvalidArgument(format!("need r >= 0 and d >= 1, got r = {r}, d = {d}")));
    }
    Ok(match which {
        WeightDerivative::A => WeightValue::Scalar(a_value(r, d)),
        WeightDerivative::Laplacian => WeightValue::Scalar(laplacian_a(r, d)),
        WeightDerivative::Bilaplacian => WeightValue::Scalar(bilaplacian_a(r, d)),
        WeightDerivative::Trilaplacian => WeightValue::Scalar(trilaplacian_a(r, d)),
        WeightDerivative::Hessian => {
            let (delta, outer) = hessian_a_coeffs(r, d);
            WeightValue::Pair { delta, outer }
        }
        WeightDerivative::HessianLaplacian => {
            let (delta, outer) = hessian_laplacian_a_coeffs(r, d);
            WeightValue::Pair { delta, outer }
        }
    })
}

/// Sum of absolute values of the individual closed-form terms, used as the error scale.
fn term_scale(which: WeightDerivative, r: f64, d: usize) -> f64 {
    let b = bracket(r * r);
    match which {
        WeightDerivative::A => b,
        WeightDerivative::Laplacian => (d as f64 - 1.0).abs() / b + 1.0 / b.powi(3),
        WeightDerivative::Bilaplacian => bilaplacian_terms(r, d).iter().map(|t| t.abs()).sum(),
        WeightDerivative::Trilaplacian => trilaplacian_terms(r, d).iter().map(|t| t.abs()).sum(),
        WeightDerivative::Hessian => {
            let (a, bb) = hessian_a_coeffs(r, d);
            a.abs() + bb.abs() * r * r
        }
        WeightDerivative::HessianLaplacian => {
            let (a, bb) = hessian_laplacian_a_coeffs(r, d);
            a.abs() + bb.abs() * r * r
        }
    }
}

// Integer stencil weights; the common denominators are applied once in
// double-double so the weights sum to exactly zero.
const D1: [f64; 7] = [-1.0, 9.0, -45.0, 0.0, 45.0, -9.0, 1.0];
const D1_DEN: f64 = 60.0;
const D2: [f64; 7] = [2.0, -27.0, 270.0, -490.0, 270.0, -27.0, 2.0];
const D2_DEN: f64 = 180.0;

/// Stencil step relative to `⟨r⟩`.
pub const FD_STEP: f64 = 0.002;

type Dd = TwoFloat;

/// Radial profile evaluated in double-double from `|z|²`.
type Profile = fn(Dd, f64) -> Dd;

/// `a / b` refined by one Newton step; the stock quotient is only f64-accurate.
fn dd_div(a: Dd, b: Dd) -> Dd {
    let q = a / b;
    q + (a - q * b).hi() / b.hi()
}

fn dd_a(r2: Dd, _d: f64) -> Dd {
    (r2 + 1.0).sqrt()
}

fn dd_laplacian(r2: Dd, d: f64) -> Dd {
    let b = (r2 + 1.0).sqrt();
    dd_div(Dd::from(d - 1.0), b) + dd_div(Dd::from(1.0), b.powi(3))
}

fn dd_bilaplacian(r2: Dd, d: f64) -> Dd {
    let b = (r2 + 1.0).sqrt();
    -dd_div(Dd::from((d - 1.0) * (d - 3.0)), b.powi(3))
        - dd_div(Dd::from(6.0 * (d - 3.0)), b.powi(5))
        - dd_div(Dd::from(15.0), b.powi(7))
}

/// `|x + s_i h e_i + s_j h e_j|²` in double-double.
fn shifted_r2(x: &[f64], h: Dd, shifts: &[(usize, f64)]) -> Dd {
    let mut acc = Dd::from(0.0);
    for (k, &xk) in x.iter().enumerate() {
        let mut y = Dd::from(xk);
        for &(axis, s) in shifts {
            if axis == k {
                y += h * s;
            }
        }
        acc += y * y;
    }
    acc
}

/// Sixth-order central second difference along `axis`.
fn fd_second(f: Profile, d: f64, x: &[f64], axis: usize, h: Dd) -> Dd {
    let mut s = Dd::from(0.0);
    for (m, &c) in D2.iter().enumerate() {
        s += f(shifted_r2(x, h, &[(axis, m as f64 - 3.0)]), d) * c;
    }
    s / D2_DEN / (h * h)
}

/// Sixth-order mixed difference `∂_i∂_j` (tensor product of first differences).
fn fd_mixed(f: Profile, d: f64, x: &[f64], i: usize, j: usize, h: Dd) -> Dd {
    if i == j {
        return fd_second(f, d, x, i, h);
    }
    let mut s = Dd::from(0.0);
    for (a, &ca) in D1.iter().enumerate() {
        if ca == 0.0 {
            continue;
        }
        for (b, &cb) in D1.iter().enumerate() {
            if cb == 0.0 {
                continue;
            }
            s += f(shifted_r2(x, h, &[(i, a as f64 - 3.0), (j, b as f64 - 3.0)]), d) * (ca * cb);
        }
    }
    s / (D1_DEN * D1_DEN) / (h * h)
}

fn fd_laplacian(f: Profile, d: f64, x: &[f64], h: Dd) -> Dd {
    (0..x.len()).fold(Dd::from(0.0), |acc, j| acc + fd_second(f, d, x, j, h))
}

fn radius(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

#[derive(Clone, Debug, Serialize)]
pub struct FdReport {
    pub which: WeightDerivative,
    pub samples: usize,
    pub max_rel_error: f64,
    pub worst_r: f64,
    pub worst_d: usize,
}

/// Compare the closed forms with sixth-order central differences on Cartesian
/// stencils at `x = r (1, …, 1)/√d`, step `FD_STEP·⟨r⟩`.
///
/// `Δa` and `∂_{ij}a` difference `a` itself; `Δ²a`, `Δ³a` and `∂_{ij}Δa`
/// difference the closed form one level down. Stencils are evaluated in
/// double-double arithmetic since `Δ³a` in `d = 5` is a small remainder of
/// large cancelling terms. The weight is smooth at the origin, so central
/// stencils are used for every `r`.
pub fn fd_verify(which: WeightDerivative, samples: &[(f64, usize)]) -> FdReport {
    fd_verify_with(which, samples, |r, d| eval_weight_derivative(which, r, d).expect("valid sample"))
}

/// As [`fd_verify`] with a caller-supplied closed form (used for negative controls).
pub fn fd_verify_with(
    which: WeightDerivative,
    samples: &[(f64, usize)],
    closed: impl Fn(f64, usize) -> WeightValue<f64>,
) -> FdReport {
    let mut report = FdReport {
        which,
        samples: samples.len(),
        max_rel_error: 0.0,
        worst_r: 0.0,
        worst_d: 0,
    };
    for &(r, d) in samples {
        let x: Vec<f64> = vec![r / (d as f64).sqrt(); d];
        let df = d as f64;
        let h = Dd::from(FD_STEP * bracket(r * r));
        let base: Profile = match which {
            WeightDerivative::A | WeightDerivative::Laplacian | WeightDerivative::Hessian => dd_a,
            WeightDerivative::Bilaplacian | WeightDerivative::HessianLaplacian => dd_laplacian,
            WeightDerivative::Trilaplacian => dd_bilaplacian,
        };
        let scale = term_scale(which, r, d);
        let err = match (which, closed(r, d)) {
            (WeightDerivative::A, WeightValue::Scalar(v)) => {
                (base(Dd::from(r) * r, df) - v).hi().abs() / v.abs().max(scale)
            }
            (_, WeightValue::Scalar(v)) => {
                let fd = fd_laplacian(base, df, &x, h);
                (fd - v).hi().abs() / v.abs().max(scale)
            }
            (_, WeightValue::Pair { delta, outer }) => {
                let mut worst: f64 = 0.0;
                let mut peak: f64 = 0.0;
                for i in 0..d {
                    for j in 0..d {
                        let cf = if i == j { delta } else { 0.0 } + outer * x[i] * x[j];
                        let fd = fd_mixed(base, df, &x, i, j, h);
                        worst = worst.max((fd - cf).hi().abs());
                        peak = peak.max(cf.abs());
                    }
                }
                worst / peak.max(scale)
            }
        };
        if err > report.max_rel_error || err.is_nan() {
            report.max_rel_error = if err.is_nan() { f64::INFINITY } else { err };
            report.worst_r = r;
            report.worst_d = d;
        }
    }
    report
}

/// `n` seeded samples with `r ∈ [0, r_max]` and `d` drawn from `dims`.
pub fn random_samples(n: usize, dims: RangeInclusive<usize>, r_max: f64, seed: u64) -> Vec<(f64, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| (rng.gen_range(0.0..=r_max), rng.gen_range(dims.clone())))
        .collect()
}

/// `(g_e, g_⊥)` with `g_e = (e·g)e/|e|²`.
pub fn directional_split<T: Real>(g: &[T], e: &[T]) -> Result<(Vec<T>, Vec<T>)> {
    if g.len() != e.len() {
        return Err(Error::InvalidArgument("g and e must have the same length".into()));
    }
    let e2 = e.iter().fold(T::zero(), |s, &v| s + v * v);
    if !(e2 > T::zero()) {
        return Err(Error::InvalidArgument("direction e must be nonzero".into()));
    }
    let c = g.iter().zip(e).fold(T::zero(), |s, (&a, &b)| s + a * b) / e2;
    let ge: Vec<T> = e.iter().map(|&v| c * v).collect();
    let gp = g.iter().zip(&ge).map(|(&a, &b)| a - b).collect();
    Ok((ge, gp))
}

/// `|e·g|²/|e|²` for complex `g`: the squared length of the projection onto `e`.
fn proj_sqr(g: &[Complex<f64>], e: &[f64]) -> f64 {
    let e2: f64 = e.iter().map(|v| v * v).sum();
    if e2 == 0.0 {
        return 0.0;
    }
    let dot = g.iter().zip(e).fold(Complex::new(0.0, 0.0), |s, (a, &b)| s + a * b);
    dot.norm_sqr() / e2
}

fn norm_sqr_c(g: &[Complex<f64>]) -> f64 {
    g.iter().map(|v| v.norm_sqr()).sum()
}

#[derive(Clone, Debug, Serialize)]
pub struct Counterexample {
    pub r: f64,
    pub value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClaimResult {
    pub claim: &'static str,
    pub d: usize,
    /// Whether `d` lies in the range where the claim is asserted.
    pub asserted: bool,
    pub holds: bool,
    /// Most unfavourable sampled value (largest for `≤ 0` claims, smallest for `≥ 0`).
    pub extreme: f64,
    pub counterexample: Option<Counterexample>,
}

impl ClaimResult {
    /// Holds where asserted, and a counterexample exists wherever it fails.
    pub fn consistent(&self) -> bool {
        (!self.asserted || self.holds) && (self.holds || self.counterexample.is_some())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SignReport {
    pub claims: Vec<ClaimResult>,
    pub r_points: usize,
    pub r_max: f64,
}

impl SignReport {
    /// Each claim holds exactly on its asserted range.
    pub fn exact_ranges(&self) -> bool {
        self.claims.iter().all(|c| c.consistent() && c.asserted == c.holds)
    }

    pub fn find(&self, claim: &str, d: usize) -> Option<&ClaimResult> {
        self.claims.iter().find(|c| c.claim == claim && c.d == d)
    }
}

pub const CLAIM_QUADRATIC: &str = "quadratic_nonpositive";
pub const CLAIM_TRILAP: &str = "trilaplacian_nonnegative";
pub const CLAIM_BILAP: &str = "bilaplacian_nonpositive";
pub const CLAIM_TORUS_HESSIAN: &str = "torus_hessian_form_nonpositive";

/// Sign of the leading nonzero coefficient as `r → ∞` (terms ordered by decay).
fn dominant_sign(coeffs: &[f64]) -> f64 {
    coeffs.iter().copied().find(|c| *c != 0.0).map(f64::signum).unwrap_or(0.0)
}

/// Check each sign claim for every `d` in `dims` on a uniform `r` grid in
/// `[0, r_max]`, at `r = 0`, and in the dominant-term limit `r → ∞`.
pub fn sign_certificates(dims: RangeInclusive<usize>, r_points: usize, r_max: f64, seed: u64) -> SignReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid: Vec<f64> = (0..r_points)
        .map(|i| r_max * i as f64 / (r_points.max(2) - 1) as f64)
        .collect();
    let mut claims = Vec::new();
    for d in dims {
        let df = d as f64;
        let q = -df * df - 8.0 * df + 45.0;
        claims.push(ClaimResult {
            claim: CLAIM_QUADRATIC,
            d,
            asserted: d >= 4,
            holds: q <= 0.0,
            extreme: q,
            counterexample: (q > 0.0).then_some(Counterexample { r: f64::NAN, value: q }),
        });

        let scan = |f: &dyn Fn(f64) -> f64, want_nonneg: bool, tail: f64| {
            let mut extreme = if want_nonneg { f64::INFINITY } else { f64::NEG_INFINITY };
            let mut cx = None;
            for &r in &grid {
                let v = f(r);
                let bad = if want_nonneg { v < 0.0 } else { v > 0.0 };
                extreme = if want_nonneg { extreme.min(v) } else { extreme.max(v) };
                if bad && cx.is_none() {
                    cx = Some(Counterexample { r, value: v });
                }
            }
            let tail_bad = if want_nonneg { tail < 0.0 } else { tail > 0.0 };
            if tail_bad && cx.is_none() {
                cx = Some(Counterexample {
                    r: f64::INFINITY,
                    value: tail,
                });
            }
            (cx.is_none(), extreme, cx)
        };

        let tri_tail = dominant_sign(&[
            3.0 * (df - 1.0) * (df - 3.0) * (df - 5.0),
            45.0 * (df - 3.0) * (df - 5.0),
            315.0 * (df - 5.0),
            945.0,
        ]);
        let (holds, extreme, cx) = scan(&|r| trilaplacian_a(r, d), true, tri_tail);
        claims.push(ClaimResult {
            claim: CLAIM_TRILAP,
            d,
            asserted: d >= 5,
            holds,
            extreme,
            counterexample: cx,
        });

        let bi_tail = dominant_sign(&[-(df - 1.0) * (df - 3.0), -6.0 * (df - 3.0), -15.0]);
        let (holds, extreme, cx) = scan(&|r| bilaplacian_a(r, d), false, bi_tail);
        claims.push(ClaimResult {
            claim: CLAIM_BILAP,
            d,
            asserted: d >= 3,
            holds,
            extreme,
            counterexample: cx,
        });

        // -|∇∂_α u|²/⟨r⟩³ - r²|∇_e^⊥∂_α u|²/⟨r⟩³ on random complex gradients.
        let mut extreme = f64::NEG_INFINITY;
        let mut cx = None;
        for &r in &grid {
            let e = random_unit(&mut rng, d);
            let g = random_cvec(&mut rng, d);
            let g2 = norm_sqr_c(&g);
            let perp = g2 - proj_sqr(&g, &e);
            let b3 = bracket(r * r).powi(3);
            let v = -g2 / b3 - r * r * perp / b3;
            extreme = extreme.max(v);
            if v > 0.0 && cx.is_none() {
                cx = Some(Counterexample { r, value: v });
            }
        }
        claims.push(ClaimResult {
            claim: CLAIM_TORUS_HESSIAN,
            d,
            asserted: true,
            holds: cx.is_none(),
            extreme,
            counterexample: cx,
        });
    }
    SignReport {
        claims,
        r_points,
        r_max,
    }
}

fn random_unit(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = radius(&v);
        if n > 1e-3 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

fn random_cvec(rng: &mut ChaCha8Rng, d: usize) -> Vec<Complex<f64>> {
    (0..d)
        .map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundCheck {
    pub name: &'static str,
    pub samples: usize,
    /// Largest `lhs - rhs` for inequalities, largest `|lhs - rhs|` (relative) for identities.
    pub max_violation: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct HessianReport {
    pub d: usize,
    pub checks: Vec<BoundCheck>,
}

impl HessianReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// `-Σ_{ijk} ∂_{jk}a H̄_{ij} H_{ik}` for a complex `d × d` matrix `H` (rows `H_i`).
pub fn hessian_contraction(h: &[Vec<Complex<f64>>], z: &[f64]) -> f64 {
    let r = radius(z);
    let (alpha, beta) = hessian_a_coeffs(r, z.len());
    h.iter()
        .map(|row| {
            let dot = row.iter().zip(z).fold(Complex::new(0.0, 0.0), |s, (a, &b)| s + a * b);
            -(alpha * norm_sqr_c(row) + beta * dot.norm_sqr())
        })
        .sum()
}

/// Sample the pointwise inequalities used to sign the Hessian-contraction terms.
pub fn hessian_bound_check(samples: usize, d: usize, r_max: f64, seed: u64) -> HessianReport {
    const TOL: f64 = 1e-12;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let df = d as f64;
    let mut contraction = 0.0f64;
    let mut m4_identity = 0.0f64;
    let mut m4_sign = f64::NEG_INFINITY;
    let mut bilap_bound = f64::NEG_INFINITY;
    let mut hess_lap_identity = 0.0f64;
    for _ in 0..samples {
        let r = rng.gen_range(0.0..r_max);
        let z: Vec<f64> = random_unit(&mut rng, d).into_iter().map(|v| v * r).collect();
        let b = bracket(r * r);
        let h: Vec<Vec<Complex<f64>>> = (0..d).map(|_| random_cvec(&mut rng, d)).collect();
        let h2: f64 = h.iter().map(|row| norm_sqr_c(row)).sum();
        let he2: f64 = h.iter().map(|row| proj_sqr(row, &z)).sum();
        let lhs = hessian_contraction(&h, &z);
        let rhs = -(h2 - he2) / b;
        contraction = contraction.max((lhs - rhs) / h2);

        let g = random_cvec(&mut rng, d);
        let g2 = norm_sqr_c(&g);
        let ge2 = proj_sqr(&g, &z);
        let gp2 = g2 - ge2;
        let form = -g2 / b + r * r * ge2 / b.powi(3);
        let rewritten = -g2 / b.powi(3) - r * r * gp2 / b.powi(3);
        m4_identity = m4_identity.max((form - rewritten).abs() / g2);
        m4_sign = m4_sign.max(form);

        if d >= 3 {
            let lhs = bilaplacian_a(r, d) * g2;
            let rhs = -(df + 5.0) * (df - 3.0) * ge2 / b.powi(5);
            bilap_bound = bilap_bound.max((lhs - rhs) / g2);
        }

        let (alpha, beta) = hessian_laplacian_a_coeffs(r, d);
        let dot = g.iter().zip(&z).fold(Complex::new(0.0, 0.0), |s, (a, &c)| s + a * c);
        let contracted = alpha * g2 + beta * dot.norm_sqr();
        let expanded = -(df - 1.0) * g2 / b.powi(3) + 3.0 * (df - 1.0) * r * r * ge2 / b.powi(5)
            - 3.0 * g2 / b.powi(5)
            + 15.0 * r * r * ge2 / b.powi(7);
        hess_lap_identity = hess_lap_identity.max((contracted - expanded).abs() / g2);
    }

    // H = I reduces the contraction to -Δa.
    let mut identity_case = 0.0f64;
    for k in 0..samples.min(1000) {
        let r = r_max * k as f64 / 1000.0;
        let z: Vec<f64> = random_unit(&mut rng, d).into_iter().map(|v| v * r).collect();
        let eye: Vec<Vec<Complex<f64>>> = (0..d)
            .map(|i| (0..d).map(|j| Complex::new(if i == j { 1.0 } else { 0.0 }, 0.0)).collect())
            .collect();
        let lhs = hessian_contraction(&eye, &z);
        let expect = -laplacian_a(r, d);
        identity_case = identity_case.max((lhs - expect).abs() / expect.abs());
    }

    // r = 0: the contraction equals -|H|².
    let mut origin_case = 0.0f64;
    for _ in 0..samples.min(1000) {
        let h: Vec<Vec<Complex<f64>>> = (0..d).map(|_| random_cvec(&mut rng, d)).collect();
        let h2: f64 = h.iter().map(|row| norm_sqr_c(row)).sum();
        let lhs = hessian_contraction(&h, &vec![0.0; d]);
        origin_case = origin_case.max((lhs + h2).abs() / h2);
    }

    let mut checks = vec![
        BoundCheck {
            name: "hessian_contraction_le_perp_bound",
            samples,
            max_violation: contraction,
            pass: contraction <= TOL,
        },
        BoundCheck {
            name: "torus_hessian_form_identity",
            samples,
            max_violation: m4_identity,
            pass: m4_identity <= 1e-12,
        },
        BoundCheck {
            name: "torus_hessian_form_nonpositive",
            samples,
            max_violation: m4_sign,
            pass: m4_sign <= 0.0,
        },
        BoundCheck {
            name: "hessian_laplacian_contraction_identity",
            samples,
            max_violation: hess_lap_identity,
            pass: hess_lap_identity <= 1e-12,
        },
        BoundCheck {
            name: "identity_matrix_contraction_closed_form",
            samples: samples.min(1000),
            max_violation: identity_case,
            pass: identity_case <= 1e-12,
        },
        BoundCheck {
            name: "origin_contraction_equality",
            samples: samples.min(1000),
            max_violation: origin_case,
            pass: origin_case <= 1e-12,
        },
    ];
    if d >= 3 {
        checks.push(BoundCheck {
            name: "bilaplacian_gradient_bound",
            samples,
            max_violation: bilap_bound,
            pass: bilap_bound <= TOL,
        });
    }
    HessianReport { d, checks }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_spot_values() {
        for d in 1..8 {
            assert!((laplacian_a(0.0f64, d) - d as f64).abs() < 1e-15);
        }
        assert_eq!(bilaplacian_a(0.0f64, 3), -15.0);
        for r in [0.0f64, 0.5, 3.0, 40.0] {
            let b = bracket(r * r);
            assert!((trilaplacian_a(r, 5) - 945.0 / b.powi(11)).abs() <= 1e-15 * trilaplacian_a(r, 5));
        }
    }

    #[test]
    fn hessian_traces_match_laplacians() {
        for d in 1..9 {
            for r in [0.0f64, 0.3, 2.0, 11.0] {
                let (a, b) = hessian_a_coeffs(r, d);
                assert!((d as f64 * a + b * r * r - laplacian_a(r, d)).abs() < 1e-13);
                let (a, b) = hessian_laplacian_a_coeffs(r, d);
                let tr = d as f64 * a + b * r * r;
                assert!((tr - bilaplacian_a(r, d)).abs() < 1e-12 * (1.0 + tr.abs()));
            }
        }
    }

    #[test]
    fn selectors_parse() {
        for w in WeightDerivative::ALL {
            assert_eq!(w.name().parse::<WeightDerivative>().unwrap(), w);
        }
        assert!(matches!("nabla".parse::<WeightDerivative>(), Err(Error::UnknownSelector(_))));
        assert!(eval_weight_derivative(WeightDerivative::A, -1.0, 3).is_err());
    }

    #[test]
    fn weight_identity_check_is_exact() {
        let s = random_samples(50, 3..=10, 20.0, 1);
        assert!(fd_verify(WeightDerivative::A, &s).max_rel_error <= 1e-15);
    }

    #[test]
    fn all_closed_forms_pass_finite_differences() {
        let s = random_samples(200, 3..=10, 20.0, 2);
        for w in WeightDerivative::ALL {
            let rep = fd_verify(w, &s);
            assert!(rep.max_rel_error <= 1e-6, "{w:?}: {rep:?}");
        }
    }

    #[test]
    fn perturbed_coefficient_is_caught() {
        let s = random_samples(200, 3..=10, 20.0, 3);
        let rep = fd_verify_with(WeightDerivative::Bilaplacian, &s, |r, d| {
            let b = bracket(r * r);
            let df = d as f64;
            WeightValue::Scalar(-(df - 1.0) * (df - 3.0) / b.powi(3) - 5.0 * (df - 3.0) / b.powi(5) - 15.0 / b.powi(7))
        });
        assert!(rep.max_rel_error > 1e-3);
    }

    #[test]
    fn split_examples() {
        let (ge, gp) = directional_split::<f64>(&[2.0, 4.0], &[1.0, 2.0]).unwrap();
        assert_eq!(ge, vec![2.0, 4.0]);
        assert!(gp.iter().all(|v| v.abs() < 1e-15));
        let (ge, gp) = directional_split::<f64>(&[2.0, -1.0], &[1.0, 2.0]).unwrap();
        assert!(ge.iter().all(|v| v.abs() < 1e-15));
        assert_eq!(gp, vec![2.0, -1.0]);
        assert!(directional_split(&[1.0], &[0.0]).is_err());
    }

    #[test]
    fn certificates_on_small_range() {
        let rep = sign_certificates(1..=8, 1000, 100.0, 5);
        assert_eq!(rep.find(CLAIM_QUADRATIC, 4).unwrap().extreme, -3.0);
        assert_eq!(rep.find(CLAIM_QUADRATIC, 5).unwrap().extreme, -20.0);
        assert!(!rep.find(CLAIM_QUADRATIC, 3).unwrap().holds);
        assert!(rep.find(CLAIM_TRILAP, 4).unwrap().counterexample.is_some());
        assert!(rep.find(CLAIM_TRILAP, 5).unwrap().holds);
        assert!(rep.exact_ranges());
    }

    #[test]
    fn hessian_bounds_hold() {
        let rep = hessian_bound_check(2000, 5, 30.0, 8);
        assert!(rep.pass(), "{rep:?}");
    }
}
