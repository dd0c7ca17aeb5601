//! Closed-form limits of ergodic averages.
//!
//! Every value is a finite combination of exact window marginals, so with
//! rational field probabilities, rational symbol values and a rational slope
//! the result is an exact rational.

use std::collections::HashMap;
use std::fmt;

use crate::circle::{self, CirclePoint, Slope, BOUNDARY_EPS};
use crate::engine::{ObservableFn, ObservableTable, ShapeRule, WindowObservable};
use crate::error::{invalid, Error, Result};
use crate::field::{marginal_exact, FieldGenerator};
use crate::lattice::{self, shape_breakpoints, Window};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FormulaTag {
    ErgodicProduct,
    PeriodicQAverage,
    StaircaseRational,
    StaircaseIrrational,
    M2Mixture,
    Weyl,
}

impl FormulaTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            FormulaTag::ErgodicProduct => "ergodic_product",
            FormulaTag::PeriodicQAverage => "periodic_q_average",
            FormulaTag::StaircaseRational => "staircase_rational",
            FormulaTag::StaircaseIrrational => "staircase_irrational",
            FormulaTag::M2Mixture => "m2_mixture",
            FormulaTag::Weyl => "weyl",
        }
    }
}

impl fmt::Display for FormulaTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitValue {
    pub value: Scalar,
    pub tag: FormulaTag,
    /// Human-readable summary of the inputs.
    pub provenance: String,
    /// Orbit points that sit on (exact) or within [`BOUNDARY_EPS`] of
    /// (approx) a shape breakpoint. The value there follows the floor
    /// convention `[x] ≤ x`.
    pub boundary_hits: usize,
}

/// `Σ_y f(y) P_U(y)` for the field's exact marginal on `window`.
pub fn window_expectation(gen: &FieldGenerator, table: &ObservableTable, window: &Window) -> Result<Scalar> {
    if window.len() != table.m() {
        return invalid(format!("window has {} sites but f takes {}", window.len(), table.m()));
    }
    if table.card() != gen.alphabet().len() {
        return invalid("observable and field alphabets differ in size");
    }
    let marginal = marginal_exact(gen, window)?;
    Ok(marginal
        .probs()
        .iter()
        .zip(table.values())
        .filter(|(p, _)| !p.is_zero())
        .map(|(p, v)| p * v)
        .sum())
}

struct ShapeCache<'a> {
    gen: &'a FieldGenerator,
    table: &'a ObservableTable,
    seen: HashMap<Window, Scalar>,
}

impl<'a> ShapeCache<'a> {
    fn new(gen: &'a FieldGenerator, table: &'a ObservableTable) -> Self {
        ShapeCache {
            gen,
            table,
            seen: HashMap::new(),
        }
    }

    fn get(&mut self, window: &Window) -> Result<Scalar> {
        let shape = window.canonical();
        if let Some(v) = self.seen.get(&shape) {
            return Ok(v.clone());
        }
        let v = window_expectation(self.gen, self.table, &shape)?;
        self.seen.insert(shape, v.clone());
        Ok(v)
    }
}

fn table_of(obs: &WindowObservable) -> Result<&ObservableTable> {
    obs.table().ok_or_else(|| Error::InvalidArgument("observable has no window table".into()))
}

/// `Ē[F] = Σ_y f(y) P_U(y)` for an observable read on a fixed window.
pub fn limit_ergodic_product(gen: &FieldGenerator, obs: &WindowObservable) -> Result<LimitValue> {
    let ShapeRule::Fixed(window) = &obs.shape else {
        return invalid("ergodic product limit needs a fixed window");
    };
    let table = table_of(obs)?;
    Ok(LimitValue {
        value: window_expectation(gen, table, window)?,
        tag: FormulaTag::ErgodicProduct,
        provenance: format!("window {}", fmt_window(window)),
        boundary_hits: 0,
    })
}

/// The `t`-section `∫ f dP_{λ,t,m}`, with the window shape read at `t`.
pub fn t_section(gen: &FieldGenerator, table: &ObservableTable, slope: &Slope, t: &CirclePoint) -> Result<Scalar> {
    let w = lattice::window(slope, t, 0, table.m())?;
    window_expectation(gen, table, &w)
}

fn on_breakpoint(partition: &lattice::ShapePartition, t: &CirclePoint) -> bool {
    match t {
        CirclePoint::Exact(_) => partition.breakpoints.iter().any(|b| b == t),
        CirclePoint::Approx(_) => partition.distance_to_breakpoint(t) < BOUNDARY_EPS,
    }
}

/// `(1/q) Σ_{ν<q} ∫ f dP_{λ,τ^ν(t),m}` for `λ = p/q`.
pub fn limit_staircase_rational(gen: &FieldGenerator, table: &ObservableTable, slope: &Slope, t: &CirclePoint) -> Result<LimitValue> {
    let q = slope.period().ok_or(Error::IrrationalSlope)?;
    let partition = shape_breakpoints(slope, table.m())?;
    let mut cache = ShapeCache::new(gen, table);
    let mut total = Scalar::zero();
    let mut hits = 0;
    for nu in 0..q {
        let s = circle::orbit_point(t, slope, nu);
        hits += on_breakpoint(&partition, &s) as usize;
        total = total + cache.get(&lattice::window(slope, &s, 0, table.m())?)?;
    }
    Ok(LimitValue {
        value: total / Scalar::int(q as i64),
        tag: FormulaTag::StaircaseRational,
        provenance: format!("lambda={slope} t={t} m={} q={q} shapes={}", table.m(), cache.seen.len()),
        boundary_hits: hits,
    })
}

/// `∫₀¹ ∫ f dP_{λ,t,m} dt` as a finite sum over shape intervals. Valid for
/// any slope; exact when the slope is rational.
pub fn shape_integral(gen: &FieldGenerator, table: &ObservableTable, slope: &Slope) -> Result<Scalar> {
    let partition = shape_breakpoints(slope, table.m())?;
    let mut cache = ShapeCache::new(gen, table);
    let mut total = Scalar::zero();
    for interval in &partition.intervals {
        total = total + &interval.length * &cache.get(&interval.shape)?;
    }
    Ok(total)
}

pub fn limit_staircase_irrational(gen: &FieldGenerator, table: &ObservableTable, slope: &Slope) -> Result<LimitValue> {
    if slope.is_rational() {
        return Err(Error::RationalSlope);
    }
    Ok(LimitValue {
        value: shape_integral(gen, table, slope)?,
        tag: FormulaTag::StaircaseIrrational,
        provenance: format!("lambda={slope} m={}", table.m()),
        boundary_hits: 0,
    })
}

/// `λ ∫ f dP_step + (1 − λ) ∫ f dP_flat`.
pub fn limit_m2_mixture(gen: &FieldGenerator, table: &ObservableTable, slope: &Slope) -> Result<LimitValue> {
    if table.m() != 2 {
        return invalid(format!("mixture formula needs m = 2, got {}", table.m()));
    }
    let lambda = match slope.as_ratio() {
        Some(r) => Scalar::ratio(*r.numer(), *r.denom()),
        None => Scalar::Approx(slope.value()),
    };
    let step = window_expectation(gen, table, &lattice::step_pair())?;
    let flat = window_expectation(gen, table, &lattice::flat_pair())?;
    Ok(LimitValue {
        value: &lambda * &step + (Scalar::one() - &lambda) * flat,
        tag: FormulaTag::M2Mixture,
        provenance: format!("lambda={slope} step={step}"),
        boundary_hits: 0,
    })
}

/// `(1/q) Σ_{ν<q} g(τ^ν(t))`, the limit of a base observable under a
/// rational rotation.
pub fn limit_periodic_base(g: &dyn Fn(f64) -> f64, slope: &Slope, t: &CirclePoint) -> Result<LimitValue> {
    let q = slope.period().ok_or(Error::IrrationalSlope)?;
    let sum: crate::sum::CompensatedSum = (0..q).map(|nu| g(circle::orbit_point(t, slope, nu).value())).collect();
    Ok(LimitValue {
        value: Scalar::Approx(sum.value() / q as f64),
        tag: FormulaTag::PeriodicQAverage,
        provenance: format!("lambda={slope} t={t} q={q}"),
        boundary_hits: 0,
    })
}

/// Relative tolerance of [`integrate`].
pub const QUADRATURE_TOL: f64 = 1e-10;
const MAX_DEPTH: u32 = 64;

/// `∫₀¹ g` by adaptive Simpson on each piece between sorted `breaks`.
pub fn limit_weyl(g: &dyn Fn(f64) -> f64, breaks: &[f64]) -> Result<f64> {
    let mut cuts: Vec<f64> = breaks.iter().copied().filter(|b| *b > 0.0 && *b < 1.0).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut edges = vec![0.0];
    edges.extend(cuts);
    edges.push(1.0);
    let mut total = 0.0;
    for w in edges.windows(2) {
        total += integrate(g, w[0], w[1], QUADRATURE_TOL)?;
    }
    Ok(total)
}

/// Adaptive Simpson quadrature of `g` on `[a, b]`.
pub fn integrate(g: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    let (fa, fb, m) = (g(a), g(b), 0.5 * (a + b));
    let fm = g(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson(g, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn simpson(g: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> Result<f64> {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (g(lm), g(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    let scale = fa.abs().max(fm.abs()).max(fb.abs()).max(flm.abs()).max(frm.abs());
    let roundoff = 64.0 * f64::EPSILON * scale * (b - a);
    let unresolvable = b - a <= 8.0 * f64::EPSILON * a.abs().max(b.abs());
    if delta.abs() <= (15.0 * tol).max(roundoff) || unresolvable {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 || !delta.is_finite() {
        return Err(Error::QuadratureNonConvergence { a, b });
    }
    Ok(simpson(g, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)? + simpson(g, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)?)
}

/// The limit predicted for `obs` along the orbit of `t`, assuming the fibre
/// is ergodic (mixing field, growing cocycle). For `m = 2` staircase
/// observables under an irrational slope the mixture formula is used.
pub fn limit_for(gen: &FieldGenerator, obs: &WindowObservable, slope: &Slope, t: &CirclePoint) -> Result<LimitValue> {
    match (&obs.f, &obs.shape) {
        (ObservableFn::Base(g), _) => match slope {
            Slope::Rational { .. } => limit_periodic_base(g.as_ref(), slope, t),
            Slope::Irrational(_) => Ok(LimitValue {
                value: Scalar::Approx(limit_weyl(g.as_ref(), &[])?),
                tag: FormulaTag::Weyl,
                provenance: format!("lambda={slope}"),
                boundary_hits: 0,
            }),
        },
        (ObservableFn::Table(_), ShapeRule::Fixed(_)) => limit_ergodic_product(gen, obs),
        (ObservableFn::Table(table), ShapeRule::Staircase) => match slope {
            Slope::Rational { .. } => limit_staircase_rational(gen, table, slope, t),
            Slope::Irrational(_) if table.m() == 2 => limit_m2_mixture(gen, table, slope),
            Slope::Irrational(_) => limit_staircase_irrational(gen, table, slope),
        },
    }
}

fn fmt_window(w: &Window) -> String {
    w.points().iter().map(|s| s.to_string()).collect::<Vec<_>>().join("")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Alphabet;
    use std::f64::consts::PI;

    fn or_field() -> FieldGenerator {
        FieldGenerator::or_field(Scalar::ratio(1, 4), 0).unwrap()
    }

    fn prod2() -> ObservableTable {
        ObservableTable::product(&Alphabet::binary(), 2).unwrap()
    }

    #[test]
    fn ergodic_product_examples() {
        let b = Alphabet::binary();
        let iid = FieldGenerator::iid_bernoulli(Scalar::ratio(1, 3), 0).unwrap();
        let w = Window::new(vec![(0, 0).into(), (3, 1).into(), (-2, 5).into()]).unwrap();
        let obs = WindowObservable::fixed(w.clone(), ObservableTable::product(&b, 3).unwrap()).unwrap();
        assert_eq!(limit_ergodic_product(&iid, &obs).unwrap().value, Scalar::ratio(1, 27));
        let c = WindowObservable::fixed(w, ObservableTable::constant(&b, 3, Scalar::ratio(-2, 9)).unwrap()).unwrap();
        assert_eq!(limit_ergodic_product(&or_field(), &c).unwrap().value, Scalar::ratio(-2, 9));
        let step = WindowObservable::fixed(lattice::step_pair(), prod2()).unwrap();
        let v = limit_ergodic_product(&or_field(), &step).unwrap();
        assert_eq!(v.value, Scalar::ratio(19, 64));
        assert_eq!(v.tag, FormulaTag::ErgodicProduct);
    }

    #[test]
    fn staircase_rational_half() {
        let half = Slope::rational(1, 2).unwrap();
        let v = limit_staircase_rational(&or_field(), &prod2(), &half, &CirclePoint::zero()).unwrap();
        assert_eq!(v.value, Scalar::ratio(125, 512));
        assert!(v.value.is_exact());
        assert_eq!(v.tag.as_str(), "staircase_rational");
    }

    #[test]
    fn single_site_collapse() {
        let id = ObservableTable::product(&Alphabet::binary(), 1).unwrap();
        let g = or_field();
        for slope in [Slope::rational(1, 3).unwrap(), Slope::rational(5, 8).unwrap()] {
            for t in [CirclePoint::zero(), CirclePoint::exact(2, 9).unwrap()] {
                assert_eq!(limit_staircase_rational(&g, &id, &slope, &t).unwrap().value, Scalar::ratio(7, 16));
            }
        }
        let irr = limit_staircase_irrational(&g, &id, &Slope::golden()).unwrap();
        assert!((irr.value.to_f64() - 7.0 / 16.0).abs() < 1e-15);
    }

    #[test]
    fn mixture_matches_irrational_integral() {
        let g = or_field();
        for slope in [Slope::golden(), Slope::irrational(0.1234567).unwrap()] {
            let mix = limit_m2_mixture(&g, &prod2(), &slope).unwrap().value.to_f64();
            let lam = slope.value();
            assert!((mix - (lam * 19.0 / 64.0 + (1.0 - lam) * 49.0 / 256.0)).abs() < 1e-15);
            let irr = limit_staircase_irrational(&g, &prod2(), &slope).unwrap().value.to_f64();
            assert!((mix - irr).abs() < 1e-12);
        }
    }

    #[test]
    fn rational_mixture_identities() {
        let g = or_field();
        for (p, q) in [(1, 2), (1, 3), (2, 5), (5, 7)] {
            let slope = Slope::rational(p, q).unwrap();
            let mix = limit_m2_mixture(&g, &prod2(), &slope).unwrap().value;
            assert_eq!(shape_integral(&g, &prod2(), &slope).unwrap(), mix);
            let lim = limit_staircase_rational(&g, &prod2(), &slope, &CirclePoint::exact(1, 3 * q).unwrap()).unwrap();
            assert_eq!(lim.value, mix);
        }
    }

    #[test]
    fn mixture_for_iid_fields() {
        let b = Alphabet::binary();
        let iid = FieldGenerator::iid_bernoulli(Scalar::ratio(2, 7), 0).unwrap();
        let fair = FieldGenerator::iid_bernoulli(Scalar::ratio(1, 2), 0).unwrap();
        let eq = ObservableTable::all_equal(&b, 2).unwrap();
        for slope in [Slope::golden(), Slope::rational(3, 4).unwrap()] {
            assert!((limit_m2_mixture(&iid, &prod2(), &slope).unwrap().value - Scalar::ratio(4, 49)).abs().to_f64() < 1e-15);
            assert!((limit_m2_mixture(&fair, &eq, &slope).unwrap().value - Scalar::ratio(1, 2)).abs().to_f64() < 1e-15);
        }
    }

    #[test]
    fn quadrature() {
        assert!(limit_weyl(&|t| (2.0 * PI * t).cos(), &[]).unwrap().abs() < 1e-10);
        let ind = |t: f64| if t < 0.5 { 1.0 } else { 0.0 };
        assert!((limit_weyl(&ind, &[0.5]).unwrap() - 0.5).abs() < 1e-12);
        assert!((limit_weyl(&|t| t * t, &[]).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        assert!(matches!(
            integrate(&|t| 1.0 / t, 0.0, 1.0, 1e-10),
            Err(Error::QuadratureNonConvergence { .. })
        ));
    }

    #[test]
    fn section_integral_matches_irrational_limit() {
        let g = or_field();
        let table = ObservableTable::product(&Alphabet::binary(), 4).unwrap();
        let slope = Slope::irrational(0.3183098861837907).unwrap();
        let partition = shape_breakpoints(&slope, 4).unwrap();
        let breaks: Vec<f64> = partition.breakpoints.iter().map(|b| b.value()).collect();
        let section = |t: f64| t_section(&g, &table, &slope, &CirclePoint::approx(t)).unwrap().to_f64();
        let quad = limit_weyl(&section, &breaks).unwrap();
        let exact = limit_staircase_irrational(&g, &table, &slope).unwrap().value.to_f64();
        assert!((quad - exact).abs() < 1e-9, "{quad} vs {exact}");
    }

    #[test]
    fn limits_within_table_range() {
        let g = or_field();
        let table = ObservableTable::sum(&Alphabet::binary(), 3).unwrap();
        let v = limit_staircase_irrational(&g, &table, &Slope::golden()).unwrap().value;
        assert!(v >= table.min_value() && v <= table.max_value());
    }

    #[test]
    fn boundary_hits_are_counted() {
        let half = Slope::rational(1, 2).unwrap();
        let on = limit_staircase_rational(&or_field(), &prod2(), &half, &CirclePoint::zero()).unwrap();
        assert_eq!(on.boundary_hits, 2);
        let off = limit_staircase_rational(&or_field(), &prod2(), &half, &CirclePoint::exact(1, 4).unwrap()).unwrap();
        assert_eq!(off.boundary_hits, 0);
        assert_eq!(off.value, on.value);
    }

    #[test]
    fn dispatcher_tags() {
        let g = or_field();
        let obs = WindowObservable::staircase(prod2());
        let t = CirclePoint::approx(0.3);
        assert_eq!(limit_for(&g, &obs, &Slope::golden(), &t).unwrap().tag, FormulaTag::M2Mixture);
        let t = CirclePoint::exact(1, 5).unwrap();
        assert_eq!(limit_for(&g, &obs, &Slope::rational(1, 2).unwrap(), &t).unwrap().tag, FormulaTag::StaircaseRational);
        let base = WindowObservable::base(|t| (2.0 * PI * t).cos(), 1.0);
        let v = limit_for(&g, &base, &Slope::rational(1, 4).unwrap(), &CirclePoint::zero()).unwrap();
        assert_eq!(v.tag, FormulaTag::PeriodicQAverage);
        assert!(v.value.to_f64().abs() < 1e-15);
    }
}
