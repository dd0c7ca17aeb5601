//! Base dynamics: rotations of the circle `T = [0, 1)`, the coupling function
//! that drives the fibre, and its ergodic sums (the cocycle).
//!
//! Two arithmetic modes coexist. When the slope and the starting point are
//! both rational every orbit point is an exact rational and every floor is
//! exact, which is what makes periodicity checks equality tests. Otherwise
//! points are `f64` and orbit points are evaluated in closed form,
//! `frac(t + n·λ)`, never by repeated addition, because floor discontinuities
//! turn accumulated drift into wrong integers.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_integer::Integer;
use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::site::Site;
use crate::sum::CompensatedSum;

/// Distance from an integer below which an approximate floor is flagged.
pub const BOUNDARY_EPS: f64 = 1.0 / (1u64 << 40) as f64;

/// Rotation parameter λ.
///
/// Rational slopes are stored reduced; irrationality of an `f64` cannot be
/// decided, so [`Slope::irrational`] trusts its caller.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Slope {
    Rational { p: i64, q: i64 },
    Irrational(f64),
}

impl Slope {
    /// `p/q` in lowest terms; must lie strictly between 0 and 1.
    pub fn rational(p: i64, q: i64) -> Result<Slope> {
        if q <= 0 {
            return Err(Error::NonPositiveDenominator(q));
        }
        let g = p.gcd(&q);
        let (p, q) = (p / g, q / g);
        if q == 1 {
            return Err(Error::DegenerateSlope { p, q });
        }
        if p <= 0 || p >= q {
            return Err(Error::SlopeOutOfRange(format!("{p}/{q}")));
        }
        Ok(Slope::Rational { p, q })
    }

    /// A slope declared irrational by the caller.
    pub fn irrational(value: f64) -> Result<Slope> {
        if !(value > 0.0 && value < 1.0) {
            return Err(Error::SlopeOutOfRange(value.to_string()));
        }
        Ok(Slope::Irrational(value))
    }

    /// The golden-ratio fraction `(√5 − 1)/2`.
    pub fn golden() -> Slope {
        Slope::Irrational((5f64.sqrt() - 1.0) / 2.0)
    }

    pub fn value(&self) -> f64 {
        match *self {
            Slope::Rational { p, q } => p as f64 / q as f64,
            Slope::Irrational(v) => v,
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, Slope::Rational { .. })
    }

    pub fn as_ratio(&self) -> Option<Ratio<i64>> {
        match *self {
            Slope::Rational { p, q } => Some(Ratio::new_raw(p, q)),
            Slope::Irrational(_) => None,
        }
    }

    pub fn period(&self) -> Option<u64> {
        period(self)
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slope::Rational { p, q } => write!(f, "{p}/{q}"),
            Slope::Irrational(v) => write!(f, "{v}"),
        }
    }
}

/// A point of the circle `[0, 1)`, reduced mod 1 on construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CirclePoint {
    Exact(Ratio<i64>),
    Approx(f64),
}

impl CirclePoint {
    pub fn exact(num: i64, den: i64) -> Result<CirclePoint> {
        if den <= 0 {
            return Err(Error::NonPositiveDenominator(den));
        }
        Ok(Self::from_ratio(Ratio::new(num.rem_euclid(den), den)))
    }

    pub fn from_ratio(r: Ratio<i64>) -> CirclePoint {
        let frac = r - Ratio::from_integer(r.floor().to_integer());
        CirclePoint::Exact(frac)
    }

    /// Panics on a non-finite value.
    pub fn approx(v: f64) -> CirclePoint {
        assert!(v.is_finite(), "circle point must be finite, got {v}");
        CirclePoint::Approx(wrap_unit(v))
    }

    pub fn zero() -> CirclePoint {
        CirclePoint::Exact(Ratio::from_integer(0))
    }

    pub fn value(&self) -> f64 {
        match *self {
            CirclePoint::Exact(r) => *r.numer() as f64 / *r.denom() as f64,
            CirclePoint::Approx(v) => v,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, CirclePoint::Exact(_))
    }

    pub fn as_ratio(&self) -> Option<Ratio<i64>> {
        match *self {
            CirclePoint::Exact(r) => Some(r),
            CirclePoint::Approx(_) => None,
        }
    }

    /// Same point in floating-point representation.
    pub fn to_approx(self) -> CirclePoint {
        CirclePoint::Approx(self.value())
    }
}

impl PartialOrd for CirclePoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (CirclePoint::Exact(a), CirclePoint::Exact(b)) => Some(a.cmp(b)),
            _ => self.value().partial_cmp(&other.value()),
        }
    }
}

impl fmt::Display for CirclePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CirclePoint::Exact(r) => write!(f, "{r}"),
            CirclePoint::Approx(v) => write!(f, "{v}"),
        }
    }
}

fn wrap_unit(v: f64) -> f64 {
    let mut x = v - v.floor();
    if x >= 1.0 {
        x -= 1.0;
    }
    x
}

/// Circular distance `min(|s − t|, 1 − |s − t|)`.
pub fn circular_distance(s: &CirclePoint, t: &CirclePoint) -> f64 {
    let d = (s.value() - t.value()).abs();
    d.min(1.0 - d)
}

/// `t + λ mod 1`.
pub fn rotate(t: &CirclePoint, slope: &Slope) -> CirclePoint {
    orbit_point(t, slope, 1)
}

/// `τⁿ(t) = t + nλ mod 1`, evaluated in closed form.
pub fn orbit_point(t: &CirclePoint, slope: &Slope, n: u64) -> CirclePoint {
    match (t, slope) {
        (CirclePoint::Exact(r), Slope::Rational { p, q }) => {
            let (a, b) = (*r.numer() as i128, *r.denom() as i128);
            let (p, q) = (*p as i128, *q as i128);
            let den = b.lcm(&q);
            assert!(den < (1i128 << 62), "exact orbit denominator {den} too large");
            let step = p * (den / q);
            let num = (a * (den / b) + (n as i128 % den) * step).rem_euclid(den);
            let g = num.gcd(&den);
            CirclePoint::Exact(Ratio::new_raw((num / g) as i64, (den / g) as i64))
        }
        _ => CirclePoint::Approx(frac_affine(t.value(), slope.value(), n)),
    }
}

/// `frac(t + n·λ)` with the product and sum error terms carried separately.
pub(crate) fn frac_affine(t: f64, lambda: f64, n: u64) -> f64 {
    if n == 0 {
        return t;
    }
    let nf = n as f64;
    let prod = nf * lambda;
    let prod_err = nf.mul_add(lambda, -prod);
    let whole = prod.floor();
    let pf = prod - whole;
    let hi = pf + t;
    let bb = hi - pf;
    let sum_err = (pf - (hi - bb)) + (t - bb);
    wrap_unit(hi + (prod_err + sum_err))
}

/// Period `q` of a rational rotation; `None` for irrational slopes.
///
/// Degenerate slopes (`p/q` reducing to an integer) are rejected when the
/// [`Slope`] is built, so every rational slope here has `q ≥ 2`.
pub fn period(slope: &Slope) -> Option<u64> {
    match *slope {
        Slope::Rational { q, .. } => Some(q as u64),
        Slope::Irrational(_) => None,
    }
}

/// The function κ: T → Z² linking base and fibre.
#[derive(Clone)]
pub enum Coupling {
    /// `κ(t) = (1, [t + λ])`.
    Staircase(Slope),
    /// `κ ≡ k₀`, the uncoupled product.
    Constant(Site),
    Custom(Arc<dyn Fn(&CirclePoint) -> Site + Send + Sync>),
}

impl Coupling {
    pub fn custom(f: impl Fn(&CirclePoint) -> Site + Send + Sync + 'static) -> Self {
        Coupling::Custom(Arc::new(f))
    }

    pub fn eval(&self, t: &CirclePoint) -> Site {
        self.eval_checked(t).0
    }

    /// Value plus a flag raised when an approximate floor sat within
    /// [`BOUNDARY_EPS`] of an integer.
    pub fn eval_checked(&self, t: &CirclePoint) -> (Site, bool) {
        match self {
            Coupling::Staircase(slope) => {
                let (f, near) = floor_affine(t, slope, 1);
                (Site::new(1, f), near)
            }
            Coupling::Constant(k) => (*k, false),
            Coupling::Custom(f) => (f(t), false),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Coupling::Staircase(_) => "staircase",
            Coupling::Constant(_) => "constant",
            Coupling::Custom(_) => "custom",
        }
    }
}

impl fmt::Debug for Coupling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coupling::Staircase(s) => write!(f, "Staircase({s})"),
            Coupling::Constant(k) => write!(f, "Constant{k}"),
            Coupling::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// `[u·λ + t]`, exact when both inputs are, with the boundary flag.
pub(crate) fn floor_affine(t: &CirclePoint, slope: &Slope, u: i64) -> (i64, bool) {
    match (t, slope) {
        (CirclePoint::Exact(r), Slope::Rational { p, q }) => {
            let (a, b) = (*r.numer() as i128, *r.denom() as i128);
            let num = a * *q as i128 + u as i128 * *p as i128 * b;
            (num.div_euclid(b * *q as i128) as i64, false)
        }
        _ => floor_flagged((u as f64).mul_add(slope.value(), t.value())),
    }
}

#[inline]
pub(crate) fn floor_flagged(x: f64) -> (i64, bool) {
    let f = x.floor();
    let near = x - f < BOUNDARY_EPS || f + 1.0 - x < BOUNDARY_EPS;
    (f as i64, near)
}

/// The ergodic sum `κ_n(t) = Σ_{i<n} κ(τⁱ(t))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CocycleSum {
    pub n: u64,
    pub vector: Site,
}

pub fn cocycle(t: &CirclePoint, slope: &Slope, coupling: &Coupling, n: u64) -> CocycleSum {
    let mut cursor = OrbitCursor::new(t, slope);
    let mut acc = Site::ORIGIN;
    if let (CursorState::Grid { mut num, den, step }, Coupling::Staircase(_)) = (cursor.state, coupling) {
        for _ in 0..n {
            let rise = (num + step >= den) as i64;
            num += step - rise * den;
            acc.y += rise;
        }
        return CocycleSum { n, vector: Site::new(n as i64, acc.y) };
    }
    for _ in 0..n {
        acc += cursor.coupling(coupling).0;
        cursor.advance();
    }
    CocycleSum { n, vector: acc }
}

/// `[κ_0(t), κ_1(t), …, κ_n(t)]`, incrementally.
pub fn cocycle_series(t: &CirclePoint, slope: &Slope, coupling: &Coupling, n: u64) -> Vec<Site> {
    let mut out = Vec::with_capacity(n as usize + 1);
    cocycle_series_into(t, slope, coupling, n, &mut out);
    out
}

/// Appends `κ_0(t), …, κ_n(t)` to `out`.
pub fn cocycle_series_into(t: &CirclePoint, slope: &Slope, coupling: &Coupling, n: u64, out: &mut Vec<Site>) {
    out.reserve(n as usize + 1);
    let mut cursor = OrbitCursor::new(t, slope);
    let mut acc = Site::ORIGIN;
    out.push(acc);
    if let (CursorState::Grid { mut num, den, step }, Coupling::Staircase(_)) = (cursor.state, coupling) {
        for _ in 0..n {
            let rise = (num + step >= den) as i64;
            num += step - rise * den;
            acc += Site::new(1, rise);
            out.push(acc);
        }
        return;
    }
    for _ in 0..n {
        acc += cursor.coupling(coupling).0;
        cursor.advance();
        out.push(acc);
    }
}

/// Walks the orbit `t, τ(t), τ²(t), …` one step at a time.
///
/// In exact mode all orbit points share the denominator `lcm(den t, q)`, so a
/// step is an integer add and compare. In approximate mode each point is
/// recomputed in closed form from the starting point.
#[derive(Debug, Clone)]
pub struct OrbitCursor {
    slope: Slope,
    start: f64,
    index: u64,
    state: CursorState,
}

#[derive(Debug, Clone, Copy)]
enum CursorState {
    Grid { num: i64, den: i64, step: i64 },
    Float { point: f64 },
}

impl OrbitCursor {
    /// Panics if the shared exact denominator does not fit in 62 bits.
    pub fn new(t: &CirclePoint, slope: &Slope) -> Self {
        let state = match (t, slope) {
            (CirclePoint::Exact(r), Slope::Rational { p, q }) => {
                let b = *r.denom() as i128;
                let den = b.lcm(&(*q as i128));
                assert!(den < (1i128 << 62), "exact orbit denominator {den} too large");
                CursorState::Grid {
                    num: (*r.numer() as i128 * (den / b)) as i64,
                    den: den as i64,
                    step: (*p as i128 * (den / *q as i128)) as i64,
                }
            }
            _ => CursorState::Float { point: t.value() },
        };
        OrbitCursor {
            slope: *slope,
            start: t.value(),
            index: 0,
            state,
        }
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.state, CursorState::Grid { .. })
    }

    pub fn point(&self) -> CirclePoint {
        match self.state {
            CursorState::Grid { num, den, .. } => CirclePoint::Exact(Ratio::new(num, den)),
            CursorState::Float { point } => CirclePoint::Approx(point),
        }
    }

    pub fn value(&self) -> f64 {
        match self.state {
            CursorState::Grid { num, den, .. } => num as f64 / den as f64,
            CursorState::Float { point } => point,
        }
    }

    #[inline]
    pub fn advance(&mut self) {
        self.index += 1;
        match &mut self.state {
            CursorState::Grid { num, den, step } => {
                *num += *step;
                // branch-free: the wrap is unpredictable for generic slopes
                *num -= (*num >= *den) as i64 * *den;
            }
            CursorState::Float { point } => {
                *point = frac_affine(self.start, self.slope.value(), self.index);
            }
        }
    }

    /// `[u·λ + τⁱ(t)]` at the current point, plus the boundary flag.
    #[inline]
    pub fn floor_shift(&self, u: i64) -> (i64, bool) {
        match self.state {
            CursorState::Grid { num, den, step } if u == 1 => ((num + step >= den) as i64, false),
            CursorState::Grid { num, den, step } => {
                let x = num as i128 + u as i128 * step as i128;
                (x.div_euclid(den as i128) as i64, false)
            }
            CursorState::Float { point } => floor_flagged((u as f64).mul_add(self.slope.value(), point)),
        }
    }

    /// κ at the current point. Staircase and constant couplings avoid
    /// materializing the point.
    #[inline]
    pub fn coupling(&self, coupling: &Coupling) -> (Site, bool) {
        match coupling {
            Coupling::Staircase(_) => {
                let (f, near) = self.floor_shift(1);
                (Site::new(1, f), near)
            }
            Coupling::Constant(k) => (*k, false),
            Coupling::Custom(f) => (f(&self.point()), false),
        }
    }
}

/// `(1/n) Σ_{i<n} g(τⁱ(t))` for an irrational rotation.
pub fn weyl_average(g: impl Fn(f64) -> f64, slope: &Slope, t: &CirclePoint, n: u64) -> Result<f64> {
    if slope.is_rational() {
        return Err(Error::RationalSlope);
    }
    if n == 0 {
        return Err(Error::InvalidArgument("weyl_average needs n ≥ 1".into()));
    }
    let (start, lambda) = (t.value(), slope.value());
    let sum: CompensatedSum = (0..n).map(|i| g(frac_affine(start, lambda, i))).collect();
    Ok(sum.value() / n as f64)
}
