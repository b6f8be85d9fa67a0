//! Exact-rational criticality classification and Strichartz index systems.
//!
//! Exponents are carried through their reciprocals, so `∞` is just `1/q = 0`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::{homogeneous_torus_sobolev, ComplexField};
use crate::scalar::Real;

pub type Rational = Ratio<i128>;

/// Largest denominator on the search lattice.
pub const LATTICE_DENOMINATOR: i128 = 64;

fn rat(n: i128, d: i128) -> Rational {
    Rational::new(n, d)
}

fn int(n: i128) -> Rational {
    Rational::from_integer(n)
}

/// Parse `7`, `-3/4`, `1.8` or `inf` style literals exactly.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let bad = || Error::InvalidArgument(format!("not an exact rational literal: {s:?}"));
    if let Some((a, b)) = t.split_once('/') {
        let a: i128 = a.trim().parse().map_err(|_| bad())?;
        let b: i128 = b.trim().parse().map_err(|_| bad())?;
        if b == 0 {
            return Err(bad());
        }
        return Ok(rat(a, b));
    }
    if let Some((whole, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|c| c.is_ascii_digit()) || frac.len() > 30 {
            return Err(bad());
        }
        let neg = whole.starts_with('-');
        let w: i128 = if whole.is_empty() || whole == "-" || whole == "+" {
            0
        } else {
            whole.parse().map_err(|_| bad())?
        };
        let den = 10i128.pow(frac.len() as u32);
        let f: i128 = frac.parse().map_err(|_| bad())?;
        let mag = w.abs() * den + f;
        return Ok(rat(if neg { -mag } else { mag }, den));
    }
    t.parse::<i128>().map(int).map_err(|_| bad())
}

fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn ser_rational<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_rational(r))
}

/// A Lebesgue exponent in `[1, ∞]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exponent {
    Finite(Rational),
    Infinite,
}

impl Exponent {
    pub fn finite(n: i128, d: i128) -> Self {
        Exponent::Finite(rat(n, d))
    }

    /// `1/q`, zero for `q = ∞`.
    pub fn recip(&self) -> Rational {
        match self {
            Exponent::Finite(q) => q.recip(),
            Exponent::Infinite => Rational::zero(),
        }
    }

    pub fn from_recip(r: Rational) -> Self {
        if r.is_zero() {
            Exponent::Infinite
        } else {
            Exponent::Finite(r.recip())
        }
    }

    /// Hölder dual `q'` with `1/q + 1/q' = 1`.
    pub fn dual(&self) -> Self {
        Exponent::from_recip(Rational::one() - self.recip())
    }

    /// `2 ≤ q ≤ ∞`.
    pub fn in_strichartz_range(&self) -> bool {
        let r = self.recip();
        r >= Rational::zero() && r <= rat(1, 2)
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(q) => f.write_str(&fmt_rational(q)),
            Exponent::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(Exponent::Infinite),
            t => Ok(Exponent::Finite(parse_rational(t)?)),
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// `2/p + d/q = d/2` with `2 ≤ p, q ≤ ∞` and `(p, q, d) ≠ (2, ∞, 2)`.
pub fn is_s_admissible(p: Exponent, q: Exponent, d: usize) -> bool {
    if !p.in_strichartz_range() || !q.in_strichartz_range() {
        return false;
    }
    if d == 2 && p == Exponent::Finite(int(2)) && q == Exponent::Infinite {
        return false;
    }
    let d = int(d as i128);
    int(2) * p.recip() + d * q.recip() == d / int(2)
}

/// `4/p + d/q = d/2 − s` with `2 ≤ p, q ≤ ∞`.
pub fn is_b_admissible(p: Exponent, q: Exponent, d: usize, s: Rational) -> bool {
    if !p.in_strichartz_range() || !q.in_strichartz_range() {
        return false;
    }
    let d = int(d as i128);
    int(4) * p.recip() + d * q.recip() == d / int(2) - s
}

/// `4/p + d/q = d/2 + s` with `2 ≤ p, q ≤ ∞`.
pub fn is_dual_b_admissible(p: Exponent, q: Exponent, d: usize, s: Rational) -> bool {
    if !p.in_strichartz_range() || !q.in_strichartz_range() {
        return false;
    }
    let d = int(d as i128);
    int(4) * p.recip() + d * q.recip() == d / int(2) + s
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CriticalityClass {
    MassSubcritical,
    MassCritical,
    Intermediate,
    EnergyCritical,
    EnergySupercritical,
    EmptyRange,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriticalityReport {
    pub d: usize,
    pub n: usize,
    /// Laplacian power: 2 for the biharmonic equation, 1 for NLS.
    pub order: u32,
    #[serde(serialize_with = "ser_rational")]
    pub p: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub mass_critical_p: Rational,
    pub energy_critical_p: Exponent,
    /// Open well-posedness window, `None` when empty.
    pub range: Option<(Exponent, Exponent)>,
    pub class: CriticalityClass,
}

impl CriticalityReport {
    pub fn in_range(&self) -> bool {
        self.class == CriticalityClass::Intermediate
    }
}

fn exp_lt(a: Rational, b: Exponent) -> bool {
    match b {
        Exponent::Infinite => true,
        Exponent::Finite(b) => a < b,
    }
}

/// Classify `p` against the mass- and energy-critical powers.
///
/// Order 2 uses `8/d` and `8/(d+n−4)`; order 1 uses `4/d` and the Euclidean
/// `4/(d−2)`, and reports the window `(0, 4/(d−2))`.
pub fn criticality(d: usize, n: usize, order: u32, p: Rational) -> Result<CriticalityReport> {
    if d == 0 {
        return Err(Error::InvalidArgument("d must be at least 1".into()));
    }
    if p <= Rational::zero() {
        return Err(Error::InvalidArgument(format!("p must be positive, got {}", fmt_rational(&p))));
    }
    let di = d as i128;
    let (mass_c, energy_c, lower) = match order {
        2 => {
            let e = if di + n as i128 > 4 {
                Exponent::Finite(rat(8, di + n as i128 - 4))
            } else {
                Exponent::Infinite
            };
            (rat(8, di), e, None)
        }
        1 => {
            let e = if di > 2 { Exponent::Finite(rat(4, di - 2)) } else { Exponent::Infinite };
            (rat(4, di), e, Some(Rational::zero()))
        }
        other => return Err(Error::InvalidArgument(format!("order must be 1 or 2, got {other}"))),
    };
    let low = lower.unwrap_or(mass_c);
    let empty = !exp_lt(low, energy_c);
    let range = if empty {
        None
    } else {
        Some((Exponent::Finite(low), energy_c))
    };
    let class = if p < mass_c {
        CriticalityClass::MassSubcritical
    } else if p == mass_c {
        CriticalityClass::MassCritical
    } else if order == 2 && !exp_lt(mass_c, energy_c) {
        CriticalityClass::EmptyRange
    } else {
        match energy_c {
            Exponent::Infinite => CriticalityClass::Intermediate,
            Exponent::Finite(e) if p < e => CriticalityClass::Intermediate,
            Exponent::Finite(e) if p == e => CriticalityClass::EnergyCritical,
            Exponent::Finite(_) => CriticalityClass::EnergySupercritical,
        }
    };
    Ok(CriticalityReport {
        d,
        n,
        order,
        p,
        mass_critical_p: mass_c,
        energy_critical_p: energy_c,
        range,
        class,
    })
}

/// One exactly evaluated relation of an index system.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub relation: &'static str,
    pub holds: bool,
    /// `lhs − rhs` for equalities (zero when they hold), positive slack for strict inequalities.
    #[serde(serialize_with = "ser_rational")]
    pub residual: Rational,
}

fn eq(relation: &'static str, lhs: Rational, rhs: Rational) -> Check {
    Check {
        relation,
        holds: lhs == rhs,
        residual: lhs - rhs,
    }
}

fn gt(relation: &'static str, lhs: Rational, rhs: Rational) -> Check {
    Check {
        relation,
        holds: lhs > rhs,
        residual: lhs - rhs,
    }
}

fn ge(relation: &'static str, lhs: Rational, rhs: Rational) -> Check {
    Check {
        relation,
        holds: lhs >= rhs,
        residual: lhs - rhs,
    }
}

fn range_check(relation: &'static str, e: Exponent) -> Check {
    let r = e.recip();
    Check {
        relation,
        holds: e.in_strichartz_range(),
        residual: if r < Rational::zero() { r } else { rat(1, 2) - r },
    }
}

/// Indices for the well-posedness argument.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Index1Solution {
    #[serde(serialize_with = "ser_rational")]
    pub s: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub delta: Rational,
    pub l: Exponent,
    pub m: Exponent,
    pub q: Exponent,
    pub r: Exponent,
    pub q_tilde: Exponent,
    pub r_tilde: Exponent,
    pub checks: Vec<Check>,
}

fn common_checks(out: &mut Vec<Check>, s: Rational, delta: Rational) {
    out.push(gt("s > 1/2", s, rat(1, 2)));
    out.push(gt("delta > 0", delta, Rational::zero()));
    out.push(ge("s + 1/2 + delta <= 2", int(2), s + rat(1, 2) + delta));
}

impl Index1Solution {
    /// Re-evaluate every relation from the stored exponents alone.
    pub fn verify(&self, d: usize, p: Rational) -> Vec<Check> {
        let dr = int(d as i128);
        let half_d = dr / int(2);
        let (l, m, q, r) = (self.l.recip(), self.m.recip(), self.q.recip(), self.r.recip());
        let (qt, rt) = (self.q_tilde.recip(), self.r_tilde.recip());
        let one = Rational::one();
        let mut c = Vec::new();
        common_checks(&mut c, self.s, self.delta);
        for (name, e) in [
            ("2 <= l <= inf", self.l),
            ("2 <= m <= inf", self.m),
            ("2 <= q <= inf", self.q),
            ("2 <= r <= inf", self.r),
            ("2 <= q~ <= inf", self.q_tilde),
            ("2 <= r~ <= inf", self.r_tilde),
        ] {
            c.push(range_check(name, e));
        }
        c.push(eq("4/l + d/m = d/2", int(4) * l + dr * m, half_d));
        c.push(eq("4/q + d/r = d/2 - s", int(4) * q + dr * r, half_d - self.s));
        c.push(eq("4/q~ + d/r~ = d/2 + s", int(4) * qt + dr * rt, half_d + self.s));
        c.push(eq("1/r~' = (p+1)/r", self.r_tilde.dual().recip(), (p + one) * r));
        c.push(gt("1/q~' > (p+1)/q", self.q_tilde.dual().recip(), (p + one) * q));
        c.push(eq("1/m' = 1/m + p/r", self.m.dual().recip(), m + p * r));
        c.push(gt("1/l' > 1/l + p/q", self.l.dual().recip(), l + p * q));
        // mp/(m-2) = p/(1 - 2/m)
        let denom = one - int(2) * m;
        if denom > Rational::zero() {
            let v = p / denom;
            c.push(gt("mp/(m-2) > 2", v, int(2)));
            if d > 3 {
                c.push(gt("mp/(m-2) < 2d/(d-3)", rat(2 * d as i128, d as i128 - 3), v));
            }
        } else {
            c.push(Check {
                relation: "m > 2",
                holds: false,
                residual: denom,
            });
        }
        c
    }
}

/// Indices for the scattering argument.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Index2Solution {
    #[serde(serialize_with = "ser_rational")]
    pub s: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub delta: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub theta: Rational,
    pub q: Exponent,
    pub r: Exponent,
    pub q_tilde: Exponent,
    pub r_tilde: Exponent,
    pub l: Exponent,
    pub m: Exponent,
    pub checks: Vec<Check>,
}

impl Index2Solution {
    pub fn verify(&self, d: usize, p: Rational) -> Vec<Check> {
        let dr = int(d as i128);
        let half_d = dr / int(2);
        let (l, m, q, r) = (self.l.recip(), self.m.recip(), self.q.recip(), self.r.recip());
        let (qt, rt) = (self.q_tilde.recip(), self.r_tilde.recip());
        let one = Rational::one();
        let mut c = Vec::new();
        common_checks(&mut c, self.s, self.delta);
        c.push(gt("theta > 0", self.theta, Rational::zero()));
        c.push(ge("theta <= 1", one, self.theta));
        for (name, e) in [
            ("2 <= q <= inf", self.q),
            ("2 <= r <= inf", self.r),
            ("2 <= q~ <= inf", self.q_tilde),
            ("2 <= r~ <= inf", self.r_tilde),
            ("2 <= l <= inf", self.l),
            ("2 <= m <= inf", self.m),
        ] {
            c.push(range_check(name, e));
        }
        c.push(eq("4/q + d/r = d/2 - s", int(4) * q + dr * r, half_d - self.s));
        c.push(eq("4/q + d/r~ + 4/q~ + d/r = d", int(4) * q + dr * rt + int(4) * qt + dr * r, dr));
        c.push(eq(
            "1/((p+1) q~') = theta/q",
            self.q_tilde.dual().recip() / (p + one),
            self.theta * q,
        ));
        c.push(eq(
            "1/((p+1) r~') = theta/r + 2(1-theta)/(pd)",
            self.r_tilde.dual().recip() / (p + one),
            self.theta * r + int(2) * (one - self.theta) / (p * dr),
        ));
        c.push(eq("4/l + d/m = d/2", int(4) * l + dr * m, half_d));
        c.push(eq("1/m' = 1/m + p/r", self.m.dual().recip(), m + p * r));
        c.push(eq("1/l' = 1/l + p/q", self.l.dual().recip(), l + p * q));
        c
    }
}

/// Why no lattice point satisfied an index system.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Infeasible {
    /// First relation violated on the search lattice.
    pub constraint: String,
    pub reason: String,
    /// Candidates rejected, per relation, in order of first appearance.
    pub rejections: Vec<(String, u64)>,
}

impl fmt::Display for Infeasible {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "infeasible at `{}`: {}", self.constraint, self.reason)
    }
}

/// Reduced fractions `k/den` in `(lo, hi)` (or `(lo, hi]`), denominators up to
/// `max_den`, ordered by `(den, num)`.
pub fn lattice(lo: Rational, hi: Rational, include_hi: bool, max_den: i128) -> Vec<Rational> {
    let mut out = Vec::new();
    for den in 1..=max_den {
        let start = (lo * int(den)).floor().to_integer();
        let stop = (hi * int(den)).ceil().to_integer();
        for num in start..=stop {
            let x = Rational::new_raw(num, den);
            if *x.reduced().denom() != den {
                continue;
            }
            if x > lo && (x < hi || (include_hi && x == hi)) {
                out.push(x);
            }
        }
    }
    out
}

fn lattice_s() -> Vec<Rational> {
    lattice(rat(1, 2), rat(3, 2), false, LATTICE_DENOMINATOR)
}

fn delta_for(s: Rational) -> Rational {
    (rat(3, 2) - s) / int(2)
}

#[derive(Default)]
struct Rejections(Vec<(String, u64)>);

impl Rejections {
    fn add(&mut self, name: &str) {
        self.add_many(name, 1);
    }

    fn add_many(&mut self, name: &str, n: u64) {
        if n == 0 {
            return;
        }
        match self.0.iter_mut().find(|(k, _)| k == name) {
            Some((_, c)) => *c += n,
            None => self.0.push((name.to_string(), n)),
        }
    }

    fn first(&self) -> String {
        self.0.first().map(|(k, _)| k.clone()).unwrap_or_default()
    }
}

fn range_gate(d: usize, n: usize, p: Rational) -> std::result::Result<(), Infeasible> {
    let rep = criticality(d, n, 2, p).map_err(|e| Infeasible {
        constraint: "8/d < p < 8/(d+n-4)".into(),
        reason: e.to_string(),
        rejections: Vec::new(),
    })?;
    if rep.in_range() {
        Ok(())
    } else {
        Err(Infeasible {
            constraint: "8/d < p < 8/(d+n-4)".into(),
            reason: format!(
                "p = {} is outside the open range; class {:?}",
                fmt_rational(&p),
                rep.class
            ),
            rejections: Vec::new(),
        })
    }
}

fn first_failure(checks: &[Check]) -> Option<&'static str> {
    checks.iter().find(|c| !c.holds).map(|c| c.relation)
}

/// Lattice search for the well-posedness index system.
///
/// Candidates are `s` in `(1/2, 3/2)` and `1/r` in `(0, 1/2]`, both with
/// denominators up to [`LATTICE_DENOMINATOR`]; `δ = (3/2 − s)/2`. The remaining
/// exponents follow from the equalities and every relation is re-checked.
pub fn solve_index1(d: usize, n: usize, p: Rational) -> std::result::Result<Index1Solution, Infeasible> {
    range_gate(d, n, p)?;
    let dr = int(d as i128);
    let half_d = dr / int(2);
    let one = Rational::one();
    let recips = lattice(Rational::zero(), rat(1, 2), true, LATTICE_DENOMINATOR);
    let mut rej = Rejections::default();
    for s in lattice_s() {
        let delta = delta_for(s);
        for &rr in &recips {
            let q = (half_d - s - dr * rr) / int(4);
            let rt = one - (p + one) * rr;
            let qt = (half_d + s - dr * rt) / int(4);
            let m = (one - p * rr) / int(2);
            let l = (half_d - dr * m) / int(4);
            let bad = [q, rt, qt, m, l]
                .iter()
                .any(|x| *x < Rational::zero() || *x > rat(1, 2));
            if bad {
                rej.add("derived exponents in [2, inf]");
                continue;
            }
            let cand = Index1Solution {
                s,
                delta,
                l: Exponent::from_recip(l),
                m: Exponent::from_recip(m),
                q: Exponent::from_recip(q),
                r: Exponent::from_recip(rr),
                q_tilde: Exponent::from_recip(qt),
                r_tilde: Exponent::from_recip(rt),
                checks: Vec::new(),
            };
            let checks = cand.verify(d, p);
            match first_failure(&checks) {
                None => return Ok(Index1Solution { checks, ..cand }),
                Some(name) => rej.add(name),
            }
        }
    }
    Err(Infeasible {
        constraint: rej.first(),
        reason: format!("no lattice point with denominators up to {LATTICE_DENOMINATOR}"),
        rejections: rej.0,
    })
}

/// Lattice search for the scattering index system.
///
/// `s`, `1/r_θ` and `θ ∈ (0, 1]` range over the same lattice. The `(l, m)`
/// relations force `4/q_θ + d/r_θ = 4/p`, hence `s = d/2 − 4/p`, and the dual
/// pair relations then force `θ = 1`; candidates failing either are rejected
/// before `θ` is enumerated.
pub fn solve_index2(d: usize, n: usize, p: Rational) -> std::result::Result<Index2Solution, Infeasible> {
    range_gate(d, n, p)?;
    let dr = int(d as i128);
    let half_d = dr / int(2);
    let one = Rational::one();
    let recips = lattice(Rational::zero(), rat(1, 2), true, LATTICE_DENOMINATOR);
    let thetas = lattice(Rational::zero(), one, true, LATTICE_DENOMINATOR);
    let mut rej = Rejections::default();
    // `4/l + d/m − d/2 = 2 − p(d/2 − s)/2` does not depend on `1/r`, so only the
    // forced `s` can satisfy it; every other lattice `s` fails for all `1/r`.
    let forced = half_d - int(4) / p;
    let (kept, dropped): (Vec<_>, Vec<_>) = lattice_s().into_iter().partition(|s| *s == forced);
    rej.add_many("4/l + d/m = d/2", (dropped.len() * recips.len()) as u64);
    for s in kept {
        let delta = delta_for(s);
        for &rr in &recips {
            let q = (half_d - s - dr * rr) / int(4);
            let m = (one - p * rr) / int(2);
            let l = (one - p * q) / int(2);
            if int(4) * l + dr * m != half_d {
                rej.add("4/l + d/m = d/2");
                continue;
            }
            for &theta in &thetas {
                let qt = one - (p + one) * theta * q;
                let rt = one - (p + one) * (theta * rr + int(2) * (one - theta) / (p * dr));
                let cand = Index2Solution {
                    s,
                    delta,
                    theta,
                    q: Exponent::from_recip(q),
                    r: Exponent::from_recip(rr),
                    q_tilde: Exponent::from_recip(qt),
                    r_tilde: Exponent::from_recip(rt),
                    l: Exponent::from_recip(l),
                    m: Exponent::from_recip(m),
                    checks: Vec::new(),
                };
                let checks = cand.verify(d, p);
                match first_failure(&checks) {
                    None => return Ok(Index2Solution { checks, ..cand }),
                    Some(name) => rej.add(name),
                }
            }
        }
    }
    let reason = if forced <= rat(1, 2) {
        format!(
            "the (l, m) relations force s = d/2 - 4/p = {}, which violates s > 1/2 (needs p > 8/(d-1) = {})",
            fmt_rational(&forced),
            if d > 1 { fmt_rational(&rat(8, d as i128 - 1)) } else { "inf".into() }
        )
    } else {
        format!(
            "no lattice point with denominators up to {LATTICE_DENOMINATOR}; s is forced to {} and theta to 1",
            fmt_rational(&forced)
        )
    };
    Err(Infeasible {
        constraint: rej.first(),
        reason,
        rejections: rej.0,
    })
}

/// `max` over Euclidean nodes of `‖|f|^p f‖_{Ḣ^s_α} / (‖f‖_{Ḣ^s_α} ‖f‖^p_{L^∞_α})`.
///
/// Fibers with a vanishing denominator are skipped; the result is 0 if all are.
pub fn lemma_delta_ratio<T: Real>(f: &ComplexField<T>, s: T, p: T) -> Result<T> {
    let g = f.grid();
    if g.torus_dims() == 0 {
        return Err(Error::InvalidArgument("the fiber ratio needs a torus axis".into()));
    }
    if !(s > T::zero() && s < T::one()) {
        return Err(Error::InvalidArgument(format!("s must lie in (0, 1), got {s}")));
    }
    if !(p > T::zero()) {
        return Err(Error::InvalidArgument(format!("p must be positive, got {p}")));
    }
    let half_p = p / T::of(2.0);
    let nl: Vec<Complex<T>> = f.samples().iter().map(|v| *v * v.norm_sqr().powf(half_p)).collect();
    let nl = ComplexField::new(g.clone(), nl)?;
    let top = homogeneous_torus_sobolev(&nl, s)?;
    let bottom = homogeneous_torus_sobolev(f, s)?;
    let nf = g.fiber_points();
    let mut best = T::zero();
    for (e, fiber) in f.samples().chunks(nf).enumerate() {
        let sup = fiber.iter().fold(T::zero(), |a, v| a.max(v.norm()));
        let den = bottom[e] * sup.powf(p);
        if den > T::zero() {
            best = best.max(top[e] / den);
        }
    }
    Ok(best)
}

/// Lossy view of a rational, for display and float consumers.
pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}
