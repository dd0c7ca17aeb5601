//! The skew product `S(t, ω) = (τ(t), θ_{κ(t)} ω)` and ergodic averages of
//! window observables along its orbits.
//!
//! The fibre point `θ_{κ_i(t)} ω` is never built. Step `i` of an orbit reads
//! the field at the observable's window for base point `τⁱ(t)`, translated by
//! `κ_i⁽¹⁾(t) v₁ + κ_i⁽²⁾(t) v₂`. For the staircase observable with the
//! staircase coupling this is the window `L_{λ,t}(i), …, L_{λ,t}(i + m − 1)`.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use crate::circle::{self, floor_affine, CirclePoint, Coupling, OrbitCursor, Slope};
use crate::error::{invalid, Error, Result};
use crate::field::{Alphabet, FieldGenerator, ShiftBasis};
use crate::lattice::Window;
use crate::scalar::Scalar;
use crate::site::Site;
use crate::sum::CompensatedSum;

/// Largest orbit length a single average may request.
pub const STEP_BUDGET: u64 = 100_000_000;

#[derive(Debug, Clone)]
pub struct SkewSystem {
    pub slope: Slope,
    pub coupling: Coupling,
    pub basis: ShiftBasis,
    pub field: FieldGenerator,
}

impl SkewSystem {
    pub fn new(slope: Slope, coupling: Coupling, basis: ShiftBasis, field: FieldGenerator) -> Result<SkewSystem> {
        if let Coupling::Staircase(s) = &coupling {
            if *s != slope {
                return invalid(format!("staircase coupling slope {s} differs from rotation slope {slope}"));
            }
        }
        Ok(SkewSystem {
            slope,
            coupling,
            basis,
            field,
        })
    }

    /// Staircase coupling on the axis basis.
    pub fn staircase(slope: Slope, field: FieldGenerator) -> SkewSystem {
        SkewSystem {
            slope,
            coupling: Coupling::Staircase(slope),
            basis: ShiftBasis::axis(),
            field,
        }
    }
}

/// How the read window depends on the base point.
#[derive(Debug, Clone, PartialEq)]
pub enum ShapeRule {
    /// `window(λ, t, 0, m)`, which moves with `t`.
    Staircase,
    Fixed(Window),
}

/// A function on `Υ^m`, tabulated. Cell index is `Σ y_u · |Υ|^u`.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableTable {
    m: usize,
    card: usize,
    values: Vec<Scalar>,
    floats: Vec<f64>,
    // numerators over a shared denominator when every value is exact
    integral: Option<(Vec<i128>, i128)>,
}

impl ObservableTable {
    pub fn new(card: usize, m: usize, values: Vec<Scalar>) -> Result<ObservableTable> {
        if m == 0 {
            return invalid("observable window size must be at least 1");
        }
        match (card as u64).checked_pow(m as u32) {
            Some(c) if c == values.len() as u64 => {}
            _ => return invalid(format!("observable table needs {card}^{m} entries, got {}", values.len())),
        }
        let floats = values.iter().map(Scalar::to_f64).collect();
        let integral = Self::integral(&values);
        Ok(ObservableTable {
            m,
            card,
            values,
            floats,
            integral,
        })
    }

    fn integral(values: &[Scalar]) -> Option<(Vec<i128>, i128)> {
        let exact: Vec<&BigRational> = values.iter().map(Scalar::exact).collect::<Option<_>>()?;
        let den = exact.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
        let limit = BigInt::from(1i128 << 90);
        let nums: Vec<i128> = exact
            .iter()
            .map(|r| {
                let n = r.numer() * (&den / r.denom());
                if n.magnitude() > limit.magnitude() {
                    None
                } else {
                    n.to_i128()
                }
            })
            .collect::<Option<_>>()?;
        Some((nums, den.to_i128().filter(|d| *d < 1 << 90)?))
    }

    /// Tabulates `f` on the symbol values.
    pub fn from_values(alphabet: &Alphabet, m: usize, f: impl Fn(&[Scalar]) -> Scalar) -> Result<ObservableTable> {
        let card = alphabet.len();
        let cells = (card as u64)
            .checked_pow(m as u32)
            .filter(|c| *c <= 1 << 24)
            .ok_or_else(|| Error::InvalidArgument(format!("observable table {card}^{m} too large")))?;
        let values = (0..cells as usize)
            .map(|mut idx| {
                let ys: Vec<Scalar> = (0..m)
                    .map(|_| {
                        let s = idx % card;
                        idx /= card;
                        alphabet.value(s).clone()
                    })
                    .collect();
                f(&ys)
            })
            .collect();
        Self::new(card, m, values)
    }

    /// `y₁ · y₂ · … · y_m`.
    pub fn product(alphabet: &Alphabet, m: usize) -> Result<ObservableTable> {
        Self::from_values(alphabet, m, |ys| ys.iter().fold(Scalar::one(), |a, y| a * y))
    }

    pub fn sum(alphabet: &Alphabet, m: usize) -> Result<ObservableTable> {
        Self::from_values(alphabet, m, |ys| ys.iter().cloned().sum())
    }

    pub fn constant(alphabet: &Alphabet, m: usize, c: Scalar) -> Result<ObservableTable> {
        Self::from_values(alphabet, m, |_| c.clone())
    }

    /// `1{y₁ = y₂ = … = y_m}` on symbols.
    pub fn all_equal(alphabet: &Alphabet, m: usize) -> Result<ObservableTable> {
        let card = alphabet.len();
        let values = (0..card.pow(m as u32))
            .map(|mut idx| {
                let first = idx % card;
                let same = (0..m).all(|_| {
                    let s = idx % card;
                    idx /= card;
                    s == first
                });
                Scalar::int(same as i64)
            })
            .collect();
        Self::new(card, m, values)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn card(&self) -> usize {
        self.card
    }

    pub fn values(&self) -> &[Scalar] {
        &self.values
    }

    pub fn index(&self, symbols: &[usize]) -> usize {
        symbols.iter().rev().fold(0, |acc, &s| acc * self.card + s)
    }

    pub fn eval(&self, symbols: &[usize]) -> &Scalar {
        &self.values[self.index(symbols)]
    }

    pub fn sup_norm(&self) -> f64 {
        self.floats.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    pub fn min_value(&self) -> Scalar {
        self.values.iter().cloned().reduce(Scalar::min).unwrap()
    }

    pub fn max_value(&self) -> Scalar {
        self.values.iter().cloned().reduce(Scalar::max).unwrap()
    }
}

#[derive(Clone)]
pub enum ObservableFn {
    Table(ObservableTable),
    /// `F(t, ω) = g(t)`, ignoring the fibre.
    Base(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for ObservableFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObservableFn::Table(t) => f.debug_tuple("Table").field(t).finish(),
            ObservableFn::Base(_) => f.write_str("Base(..)"),
        }
    }
}

/// `F(t, ω) = f(ω(window at t))`, or a pure base function.
#[derive(Debug, Clone)]
pub struct WindowObservable {
    pub shape: ShapeRule,
    pub f: ObservableFn,
    pub bound: f64,
}

impl WindowObservable {
    /// `f(ω(L_{λ,t}(0, …, m − 1)))`.
    pub fn staircase(table: ObservableTable) -> WindowObservable {
        WindowObservable {
            shape: ShapeRule::Staircase,
            bound: table.sup_norm(),
            f: ObservableFn::Table(table),
        }
    }

    pub fn fixed(window: Window, table: ObservableTable) -> Result<WindowObservable> {
        if window.len() != table.m() {
            return invalid(format!("window has {} sites but f takes {}", window.len(), table.m()));
        }
        Ok(WindowObservable {
            shape: ShapeRule::Fixed(window),
            bound: table.sup_norm(),
            f: ObservableFn::Table(table),
        })
    }

    pub fn base(g: impl Fn(f64) -> f64 + Send + Sync + 'static, bound: f64) -> WindowObservable {
        WindowObservable {
            shape: ShapeRule::Staircase,
            f: ObservableFn::Base(Arc::new(g)),
            bound,
        }
    }

    pub fn m(&self) -> usize {
        match (&self.shape, &self.f) {
            (ShapeRule::Fixed(w), _) => w.len(),
            (_, ObservableFn::Table(t)) => t.m(),
            (_, ObservableFn::Base(_)) => 1,
        }
    }

    pub fn table(&self) -> Option<&ObservableTable> {
        match &self.f {
            ObservableFn::Table(t) => Some(t),
            ObservableFn::Base(_) => None,
        }
    }

    /// Window read at base point `t` before translation, plus the boundary
    /// flag. `None` for base observables.
    pub fn shape_at(&self, slope: &Slope, t: &CirclePoint) -> Option<(Window, bool)> {
        let table = self.table()?;
        Some(match &self.shape {
            ShapeRule::Fixed(w) => (w.clone(), false),
            ShapeRule::Staircase => crate::lattice::window_checked(slope, t, 0, table.m()).expect("m ≥ 1"),
        })
    }
}

/// The pair `(τⁿ(t), κ_n(t))` identifying `Sⁿ(t, ω) = (τⁿ(t), θ_{κ_n(t)} ω)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkewState {
    pub point: CirclePoint,
    pub shift: Site,
}

pub fn iterate(sys: &SkewSystem, t: &CirclePoint, n: u64) -> SkewState {
    SkewState {
        point: circle::orbit_point(t, &sys.slope, n),
        shift: circle::cocycle(t, &sys.slope, &sys.coupling, n).vector,
    }
}

/// Sites read at orbit step `i` (absolute lattice coordinates).
pub fn sites_at_step(sys: &SkewSystem, obs: &WindowObservable, t: &CirclePoint, i: u64) -> Option<Window> {
    let state = iterate(sys, t, i);
    let (shape, _) = obs.shape_at(&sys.slope, &state.point)?;
    Some(shape.translate(sys.basis.displacement(state.shift)))
}

/// Running means `A_n` at the requested checkpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct AverageSeries {
    pub t: CirclePoint,
    pub seed: u64,
    pub checkpoints: Vec<u64>,
    /// Exact whenever the observable is exact-valued.
    pub averages: Vec<Scalar>,
    /// Running mean of squared terms, for standard errors.
    pub mean_squares: Vec<f64>,
    /// Steps whose window needed an approximate floor within
    /// [`circle::BOUNDARY_EPS`] of an integer.
    pub boundary_hits: u64,
    pub limit: Option<Scalar>,
}

impl AverageSeries {
    pub fn last(&self) -> Option<&Scalar> {
        self.averages.last()
    }

    /// `√((E[x²] − E[x]²) / n)` at checkpoint `idx`, treating terms as iid.
    pub fn std_error(&self, idx: usize) -> f64 {
        let mean = self.averages[idx].to_f64();
        let var = (self.mean_squares[idx] - mean * mean).max(0.0);
        (var / self.checkpoints[idx] as f64).sqrt()
    }

    /// `|A_n − limit|` per checkpoint, if a limit is attached.
    pub fn errors(&self) -> Option<Vec<Scalar>> {
        let limit = self.limit.as_ref()?;
        Some(self.averages.iter().map(|a| (a - limit).abs()).collect())
    }

    pub fn with_limit(mut self, limit: Scalar) -> Self {
        self.limit = Some(limit);
        self
    }
}

/// `1, 2, 4, …` up to and including the largest power of two `≤ max`.
pub fn powers_of_two(max: u64) -> Vec<u64> {
    std::iter::successors(Some(1u64), |n| n.checked_mul(2)).take_while(|n| *n <= max).collect()
}

fn validate_checkpoints(checkpoints: &[u64]) -> Result<()> {
    if checkpoints.is_empty() {
        return invalid("no checkpoints");
    }
    if checkpoints[0] == 0 || checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return invalid("checkpoints must be positive and strictly increasing");
    }
    let last = *checkpoints.last().unwrap();
    if last > STEP_BUDGET {
        return Err(Error::BudgetExceeded {
            requested: last,
            budget: STEP_BUDGET,
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy)]
struct Term {
    index: usize,
    value: f64,
}

struct Reader<'a> {
    obs: &'a WindowObservable,
    field: FieldGenerator,
    basis: ShiftBasis,
    symbols: Vec<usize>,
}

impl<'a> Reader<'a> {
    fn new(sys: &SkewSystem, obs: &'a WindowObservable, seed: u64) -> Self {
        Reader {
            obs,
            field: sys.field.with_seed(seed),
            basis: sys.basis,
            symbols: vec![0; obs.m()],
        }
    }

    /// One term `F(point, θ_shift ω)`. `floor(u)` must return `[uλ + point]`.
    #[inline]
    fn read(&mut self, floor: impl Fn(i64) -> (i64, bool), point: impl Fn() -> f64, shift: Site) -> (Term, bool) {
        let table = match &self.obs.f {
            ObservableFn::Table(t) => t,
            ObservableFn::Base(g) => return (Term { index: 0, value: g(point()) }, false),
        };
        let offset = self.basis.displacement(shift);
        let mut near = false;
        match &self.obs.shape {
            ShapeRule::Staircase => {
                for u in 0..self.symbols.len() {
                    let (y, flag) = floor(u as i64);
                    near |= flag;
                    self.symbols[u] = self.field.sample_site(Site::new(u as i64, y) + offset);
                }
            }
            ShapeRule::Fixed(w) => {
                for (slot, site) in self.symbols.iter_mut().zip(w.points()) {
                    *slot = self.field.sample_site(*site + offset);
                }
            }
        }
        let index = table.index(&self.symbols);
        (
            Term {
                index,
                value: table.floats[index],
            },
            near,
        )
    }
}

struct Accumulator<'a> {
    integral: Option<&'a (Vec<i128>, i128)>,
    exact_sum: i128,
    sum: CompensatedSum,
    squares: CompensatedSum,
}

impl<'a> Accumulator<'a> {
    fn new(obs: &'a WindowObservable) -> Self {
        Accumulator {
            integral: obs.table().and_then(|t| t.integral.as_ref()),
            exact_sum: 0,
            sum: CompensatedSum::new(),
            squares: CompensatedSum::new(),
        }
    }

    #[inline]
    fn push(&mut self, term: Term) {
        if let Some((nums, _)) = self.integral {
            self.exact_sum += nums[term.index];
        }
        self.sum.add(term.value);
        self.squares.add(term.value * term.value);
    }

    fn mean(&self, n: u64) -> (Scalar, f64) {
        let mean = match self.integral {
            Some((_, den)) => Scalar::Exact(BigRational::new(
                BigInt::from(self.exact_sum),
                BigInt::from(*den) * BigInt::from(n),
            )),
            None => Scalar::Approx(self.sum.value() / n as f64),
        };
        (mean, self.squares.value() / n as f64)
    }
}

/// `A_n = (1/n) Σ_{i<n} F(τⁱ(t), θ_{κ_i(t)} ω)` at each checkpoint, with
/// the field realized from `seed`. Sequential and fixed-order, hence
/// bitwise reproducible.
pub fn ergodic_average(sys: &SkewSystem, obs: &WindowObservable, t: &CirclePoint, seed: u64, checkpoints: &[u64]) -> Result<AverageSeries> {
    validate_checkpoints(checkpoints)?;
    let mut reader = Reader::new(sys, obs, seed);
    let mut acc = Accumulator::new(obs);
    let mut cursor = OrbitCursor::new(t, &sys.slope);
    let mut shift = Site::ORIGIN;
    let mut boundary_hits = 0u64;
    let mut averages = Vec::with_capacity(checkpoints.len());
    let mut mean_squares = Vec::with_capacity(checkpoints.len());
    let mut next = 0;
    let last = *checkpoints.last().unwrap();
    for i in 0..last {
        let (term, near) = reader.read(|u| cursor.floor_shift(u), || cursor.value(), shift);
        acc.push(term);
        let (k, k_near) = cursor.coupling(&sys.coupling);
        boundary_hits += (near || k_near) as u64;
        shift += k;
        cursor.advance();
        if i + 1 == checkpoints[next] {
            let (mean, sq) = acc.mean(i + 1);
            averages.push(mean);
            mean_squares.push(sq);
            next += 1;
        }
    }
    Ok(AverageSeries {
        t: *t,
        seed,
        checkpoints: checkpoints.to_vec(),
        averages,
        mean_squares,
        boundary_hits,
        limit: None,
    })
}

/// The `q` sub-orbit averages `A_m^{(ν)}` of a rational rotation.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicComponents {
    pub q: u64,
    pub components: Vec<AverageSeries>,
}

impl PeriodicComponents {
    /// `(1/q) Σ_ν A_m^{(ν)}` at checkpoint `idx`, which should equal
    /// `A_{mq}`.
    pub fn reconstruct(&self, idx: usize) -> Scalar {
        let total: Scalar = self.components.iter().map(|c| c.averages[idx].clone()).sum();
        total / Scalar::int(self.q as i64)
    }
}

/// `A_m^{(ν)}` averages `F ∘ S^{jq+ν}` over `j < m`, with the orbit
/// points built directly from the periodic form
/// `S^{jq+ν}(t, ω) = (τ^ν(t), θ_{j κ_q(t) + κ_ν(t)} ω)`.
pub fn periodic_components(sys: &SkewSystem, obs: &WindowObservable, t: &CirclePoint, seed: u64, checkpoints: &[u64]) -> Result<PeriodicComponents> {
    let q = sys.slope.period().ok_or(Error::IrrationalSlope)?;
    validate_checkpoints(checkpoints)?;
    let last = *checkpoints.last().unwrap();
    if last.saturating_mul(q) > STEP_BUDGET {
        return Err(Error::BudgetExceeded {
            requested: last.saturating_mul(q),
            budget: STEP_BUDGET,
        });
    }
    let kappa_q = circle::cocycle(t, &sys.slope, &sys.coupling, q).vector;
    let components = (0..q)
        .map(|nu| {
            let base = circle::orbit_point(t, &sys.slope, nu);
            let kappa_nu = circle::cocycle(t, &sys.slope, &sys.coupling, nu).vector;
            let mut reader = Reader::new(sys, obs, seed);
            let mut acc = Accumulator::new(obs);
            let mut averages = Vec::new();
            let mut mean_squares = Vec::new();
            let mut boundary_hits = 0;
            let mut next = 0;
            for j in 0..last {
                let shift = j as i64 * kappa_q + kappa_nu;
                let (term, near) = reader.read(|u| floor_affine(&base, &sys.slope, u), || base.value(), shift);
                boundary_hits += near as u64;
                acc.push(term);
                if j + 1 == checkpoints[next] {
                    let (mean, sq) = acc.mean(j + 1);
                    averages.push(mean);
                    mean_squares.push(sq);
                    next += 1;
                }
            }
            AverageSeries {
                t: base,
                seed,
                checkpoints: checkpoints.to_vec(),
                averages,
                mean_squares,
                boundary_hits,
                limit: None,
            }
        })
        .collect();
    Ok(PeriodicComponents { q, components })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{line_point, window};

    fn q(n: i64, d: i64) -> CirclePoint {
        CirclePoint::exact(n, d).unwrap()
    }

    fn or_sys(slope: Slope) -> SkewSystem {
        SkewSystem::staircase(slope, FieldGenerator::or_field(Scalar::ratio(1, 4), 0).unwrap())
    }

    #[test]
    fn iterate_examples() {
        let half = Slope::rational(1, 2).unwrap();
        let sys = or_sys(half);
        assert_eq!(iterate(&sys, &q(1, 3), 0), SkewState { point: q(1, 3), shift: Site::ORIGIN });
        assert_eq!(
            iterate(&sys, &CirclePoint::zero(), 2),
            SkewState { point: CirclePoint::zero(), shift: Site::new(2, 1) }
        );
    }

    #[test]
    fn iterate_composes() {
        let slope = Slope::rational(3, 11).unwrap();
        let sys = or_sys(slope);
        let t = q(2, 7);
        for n in (0..1000).step_by(37) {
            for m in (0..1000).step_by(91) {
                let a = iterate(&sys, &t, n);
                let b = iterate(&sys, &a.point, m);
                let ab = iterate(&sys, &t, n + m);
                assert_eq!(ab.point, b.point);
                assert_eq!(ab.shift, a.shift + b.shift);
            }
        }
    }

    #[test]
    fn constant_observable_averages_to_constant() {
        let sys = or_sys(Slope::golden());
        let obs = WindowObservable::staircase(ObservableTable::constant(&Alphabet::binary(), 2, Scalar::ratio(3, 7)).unwrap());
        let s = ergodic_average(&sys, &obs, &CirclePoint::approx(0.2), 5, &[1, 10, 100]).unwrap();
        assert!(s.averages.iter().all(|a| *a == Scalar::ratio(3, 7) && a.is_exact()));
    }

    #[test]
    fn engine_reads_staircase_windows() {
        let slope = Slope::rational(2, 7).unwrap();
        let sys = or_sys(slope);
        let obs = WindowObservable::staircase(ObservableTable::product(&Alphabet::binary(), 3).unwrap());
        let t = q(1, 5);
        for i in 0..2000u64 {
            let read = sites_at_step(&sys, &obs, &t, i).unwrap();
            assert_eq!(read, window(&slope, &t, i as i64, 3).unwrap());
            let base = circle::orbit_point(&t, &slope, i);
            let decomposed = window(&slope, &base, 0, 3).unwrap().translate(line_point(&slope, &t, i as i64));
            assert_eq!(read, decomposed);
        }
    }

    /// Direct re-implementation of the staircase average, reading the field
    /// by hand at `L(i), …, L(i + m − 1)`.
    #[test]
    fn average_matches_direct_staircase_sum() {
        let slope = Slope::rational(2, 5).unwrap();
        let field = FieldGenerator::or_field(Scalar::ratio(1, 4), 3).unwrap();
        let sys = SkewSystem::staircase(slope, field.clone());
        let obs = WindowObservable::staircase(ObservableTable::product(&Alphabet::binary(), 2).unwrap());
        let t = q(1, 7);
        let n = 5000;
        let s = ergodic_average(&sys, &obs, &t, 3, &[n]).unwrap();
        let direct: usize = (0..n as i64)
            .map(|i| field.sample_site(line_point(&slope, &t, i)) * field.sample_site(line_point(&slope, &t, i + 1)))
            .sum();
        assert_eq!(s.averages[0], Scalar::ratio(direct as i64, n as i64));
    }

    #[test]
    fn averages_are_bounded() {
        let sys = or_sys(Slope::golden());
        let obs = WindowObservable::staircase(ObservableTable::sum(&Alphabet::binary(), 3).unwrap());
        let s = ergodic_average(&sys, &obs, &CirclePoint::approx(0.77), 1, &powers_of_two(1 << 12)).unwrap();
        assert!(s.averages.iter().all(|a| a.to_f64().abs() <= obs.bound));
    }

    #[test]
    fn periodic_components_reconstruct_exactly() {
        let slope = Slope::rational(2, 5).unwrap();
        let sys = or_sys(slope);
        let obs = WindowObservable::staircase(ObservableTable::product(&Alphabet::binary(), 2).unwrap());
        let t = q(1, 3);
        let ms: Vec<u64> = (1..=50).collect();
        let comps = periodic_components(&sys, &obs, &t, 9, &ms).unwrap();
        assert_eq!(comps.components.len(), 5);
        let ns: Vec<u64> = ms.iter().map(|m| m * 5).collect();
        let full = ergodic_average(&sys, &obs, &t, 9, &ns).unwrap();
        for idx in 0..ms.len() {
            assert_eq!(comps.reconstruct(idx), full.averages[idx]);
        }
    }

    #[test]
    fn periodic_components_of_constant() {
        let sys = or_sys(Slope::rational(1, 2).unwrap());
        let obs = WindowObservable::staircase(ObservableTable::constant(&Alphabet::binary(), 2, Scalar::int(4)).unwrap());
        let comps = periodic_components(&sys, &obs, &CirclePoint::zero(), 0, &[1, 8]).unwrap();
        assert_eq!(comps.q, 2);
        assert!(comps.components.iter().all(|c| c.averages.iter().all(|a| *a == Scalar::int(4))));
        let irr = or_sys(Slope::golden());
        assert_eq!(
            periodic_components(&irr, &obs, &CirclePoint::zero(), 0, &[1]).unwrap_err(),
            Error::IrrationalSlope
        );
    }

    #[test]
    fn checkpoint_validation() {
        let sys = or_sys(Slope::golden());
        let obs = WindowObservable::staircase(ObservableTable::product(&Alphabet::binary(), 1).unwrap());
        let t = CirclePoint::approx(0.5);
        assert!(ergodic_average(&sys, &obs, &t, 0, &[]).is_err());
        assert!(ergodic_average(&sys, &obs, &t, 0, &[4, 4]).is_err());
        assert!(matches!(
            ergodic_average(&sys, &obs, &t, 0, &[STEP_BUDGET + 1]),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn staircase_slope_must_match() {
        let field = FieldGenerator::checkerboard(0);
        let r = SkewSystem::new(
            Slope::golden(),
            Coupling::Staircase(Slope::rational(1, 2).unwrap()),
            ShiftBasis::axis(),
            field,
        );
        assert!(r.is_err());
    }

    #[test]
    fn fixed_window_with_constant_coupling_reads_translates() {
        let field = FieldGenerator::iid_bernoulli(Scalar::ratio(1, 2), 4).unwrap();
        let sys = SkewSystem::new(Slope::golden(), Coupling::Constant(Site::new(1, 1)), ShiftBasis::axis(), field.clone()).unwrap();
        let w = Window::new(vec![Site::ORIGIN, Site::new(0, 1)]).unwrap();
        let obs = WindowObservable::fixed(w, ObservableTable::sum(&Alphabet::binary(), 2).unwrap()).unwrap();
        let s = ergodic_average(&sys, &obs, &CirclePoint::approx(0.1), 4, &[300]).unwrap();
        let direct: usize = (0..300).map(|i| field.sample_site(Site::new(i, i)) + field.sample_site(Site::new(i, i + 1))).sum();
        assert_eq!(s.averages[0], Scalar::ratio(direct as i64, 300));
    }
}
