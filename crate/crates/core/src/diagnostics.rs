//! Checks of the hypotheses behind uniform ergodic theorems, and empirical
//! convergence diagnostics.
//!
//! A supremum over the circle is replaced by a supremum over an explicit
//! [`TGrid`]. Staircase observables are piecewise constant in `t` between
//! known breakpoints, so a breakpoint-avoiding grid with a point in every
//! shape interval sees every value the limit takes.
//!
//! Work over grid points and seeds runs in parallel; results are collected in
//! grid-major, seed-minor order and reduced sequentially, so the output does
//! not depend on the number of threads.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use rayon::prelude::*;

use crate::circle::{self, CirclePoint, Coupling, Slope};
use crate::engine::{self, AverageSeries, ObservableFn, SkewSystem, WindowObservable};
use crate::error::{invalid, Error, Result};
use crate::field::{marginal_exact, FieldGenerator, FieldKind, ShiftIndex};
use crate::hash::{split_seed, stream_seed};
use crate::lattice::{shape_breakpoints, Window};
use crate::limits::{self, LimitValue};
use crate::scalar::Scalar;
use crate::site::Site;

/// Minimum distance of a breakpoint-avoiding grid point from any breakpoint.
pub const GRID_CLEARANCE: f64 = 1.0 / (1u64 << 20) as f64;
const NUDGE: i64 = 1 << 19;

#[derive(Debug, Clone, PartialEq)]
pub enum GridRule {
    Uniform { n: usize, offset: CirclePoint },
    BreakpointAvoiding { n: usize, slope: Slope, m: usize },
    Explicit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TGrid {
    pub points: Vec<CirclePoint>,
    pub rule: GridRule,
}

impl TGrid {
    /// `(k + offset) / n` for `k < n`, with `offset ∈ [0, 1)`.
    pub fn uniform(n: usize, offset: CirclePoint) -> Result<TGrid> {
        if n == 0 {
            return invalid("grid needs at least one point");
        }
        if !(0.0..1.0).contains(&offset.value()) {
            return invalid("grid offset must lie in [0, 1)");
        }
        let points = (0..n as i64)
            .map(|k| match offset {
                CirclePoint::Exact(r) => {
                    let v = (r + Ratio::from_integer(k)) / Ratio::from_integer(n as i64);
                    CirclePoint::Exact(v)
                }
                CirclePoint::Approx(o) => CirclePoint::Approx((k as f64 + o) / n as f64),
            })
            .collect();
        Ok(TGrid {
            points,
            rule: GridRule::Uniform { n, offset },
        })
    }

    /// The midpoint grid `(k + 1/2)/n`, with any point closer than
    /// [`GRID_CLEARANCE`] to a shape breakpoint pushed forward in steps of
    /// `2⁻¹⁹`.
    pub fn breakpoint_avoiding(n: usize, slope: &Slope, m: usize) -> Result<TGrid> {
        let partition = shape_breakpoints(slope, m)?;
        let base = Self::uniform(n, CirclePoint::exact(1, 2)?)?;
        let mut points: Vec<CirclePoint> = base
            .points
            .into_iter()
            .map(|mut t| {
                for _ in 0..64 {
                    if partition.distance_to_breakpoint(&t) >= GRID_CLEARANCE {
                        break;
                    }
                    t = match t {
                        CirclePoint::Exact(r) => CirclePoint::from_ratio(r + Ratio::new(1, NUDGE)),
                        CirclePoint::Approx(v) => CirclePoint::approx(v + 1.0 / NUDGE as f64),
                    };
                }
                t
            })
            .collect();
        points.sort_by(|a, b| a.value().total_cmp(&b.value()));
        points.dedup();
        if points.iter().any(|t| partition.distance_to_breakpoint(t) < GRID_CLEARANCE) {
            return invalid("could not place grid points clear of the breakpoints");
        }
        Ok(TGrid {
            points,
            rule: GridRule::BreakpointAvoiding { n, slope: *slope, m },
        })
    }

    pub fn explicit(mut points: Vec<CirclePoint>) -> Result<TGrid> {
        if points.is_empty() {
            return invalid("grid needs at least one point");
        }
        points.sort_by(|a, b| a.value().total_cmp(&b.value()));
        points.dedup();
        Ok(TGrid {
            points,
            rule: GridRule::Explicit,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct C2Report {
    pub checkpoints: Vec<u64>,
    /// `max_{k ≤ n} ‖κ_k(t)‖` per grid point and checkpoint.
    pub envelopes: Vec<Vec<i64>>,
    /// Minimum of the envelope over the grid, per checkpoint.
    pub min_envelope: Vec<i64>,
    pub threshold: i64,
    pub passed: bool,
}

/// Growth of `‖κ_n(t)‖∞` on the grid. Passes when the grid minimum of the
/// envelope exceeds `threshold` at the last checkpoint.
pub fn check_c2(slope: &Slope, coupling: &Coupling, grid: &TGrid, checkpoints: &[u64], threshold: i64) -> Result<C2Report> {
    if checkpoints.is_empty() || checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return invalid("checkpoints must be nonempty and strictly increasing");
    }
    let last = *checkpoints.last().unwrap();
    let envelopes: Vec<Vec<i64>> = grid
        .points
        .par_iter()
        .map(|t| {
            let series = circle::cocycle_series(t, slope, coupling, last);
            let mut env = 0;
            let mut out = Vec::with_capacity(checkpoints.len());
            let mut next = 0;
            for (n, k) in series.iter().enumerate() {
                env = env.max(k.max_norm());
                if next < checkpoints.len() && n as u64 == checkpoints[next] {
                    out.push(env);
                    next += 1;
                }
            }
            out
        })
        .collect();
    let min_envelope: Vec<i64> = (0..checkpoints.len())
        .map(|c| envelopes.iter().map(|e| e[c]).min().unwrap_or(0))
        .collect();
    let passed = *min_envelope.last().unwrap() > threshold;
    Ok(C2Report {
        checkpoints: checkpoints.to_vec(),
        envelopes,
        min_envelope,
        threshold,
        passed,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthStat {
    pub n: u64,
    pub m: u64,
    /// Largest pair count over the grid.
    pub count: u64,
    /// Grid index attaining `count`.
    pub argmax: usize,
    /// `count / n²`.
    pub value: Scalar,
}

impl GrowthStat {
    /// `n(2m + 1) − m(m + 1)`, the count for a cocycle whose entries are at
    /// least `|i − j|` apart.
    pub fn staircase_bound(n: u64, m: u64) -> u64 {
        let m = m.min(n.saturating_sub(1));
        n * (2 * m + 1) - m * (m + 1)
    }
}

/// `|{1 ≤ i, j ≤ n : ‖κ_i(t) − κ_j(t)‖∞ ≤ m}|` for one starting point.
pub fn pair_count(slope: &Slope, coupling: &Coupling, t: &CirclePoint, n: u64, m: u64) -> u64 {
    let series = circle::cocycle_series(t, slope, coupling, n);
    let mut mult: HashMap<Site, u64> = HashMap::new();
    for k in &series[1..] {
        *mult.entry(*k).or_insert(0) += 1;
    }
    let side = m as i64 + 1;
    let cell = |s: &Site| Site::new(s.x.div_euclid(side), s.y.div_euclid(side));
    let mut cells: HashMap<Site, Vec<(Site, u64)>> = HashMap::new();
    for (v, c) in &mult {
        cells.entry(cell(v)).or_default().push((*v, *c));
    }
    let mut total = 0u64;
    for (v, c) in &mult {
        let home = cell(v);
        let mut near = 0u64;
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(bucket) = cells.get(&(home + Site::new(dx, dy))) {
                    near += bucket
                        .iter()
                        .filter(|(w, _)| (*w - *v).max_norm() <= m as i64)
                        .map(|(_, k)| k)
                        .sum::<u64>();
                }
            }
        }
        total += c * near;
    }
    total
}

/// `(1/n²) max_t |{1 ≤ i, j ≤ n : ‖κ_i(t) − κ_j(t)‖∞ ≤ m}|` over the grid.
pub fn growth_condition_stat(slope: &Slope, coupling: &Coupling, grid: &TGrid, n: u64, m: u64) -> Result<GrowthStat> {
    if n == 0 {
        return invalid("growth statistic needs n ≥ 1");
    }
    if grid.is_empty() {
        return invalid("empty grid");
    }
    let counts: Vec<u64> = grid.points.par_iter().map(|t| pair_count(slope, coupling, t, n, m)).collect();
    let (argmax, count) = counts
        .iter()
        .enumerate()
        .fold((0, 0), |best, (i, &c)| if c > best.1 { (i, c) } else { best });
    let n2 = BigInt::from(n) * BigInt::from(n);
    Ok(GrowthStat {
        n,
        m,
        count,
        argmax,
        value: Scalar::Exact(BigRational::new(BigInt::from(count), n2)),
    })
}

/// An event fixing the field's symbols on a finite set of sites.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CylinderEvent {
    constraints: BTreeMap<Site, usize>,
    empty: bool,
}

impl CylinderEvent {
    /// Contradictory requirements on one site give the empty event.
    pub fn new(requirements: impl IntoIterator<Item = (Site, usize)>) -> CylinderEvent {
        let mut constraints = BTreeMap::new();
        let mut empty = false;
        for (site, sym) in requirements {
            if let Some(prev) = constraints.insert(site, sym) {
                empty |= prev != sym;
            }
        }
        CylinderEvent { constraints, empty }
    }

    pub fn single(site: Site, symbol: usize) -> CylinderEvent {
        Self::new([(site, symbol)])
    }

    pub fn empty() -> CylinderEvent {
        CylinderEvent {
            constraints: BTreeMap::new(),
            empty: true,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.empty
    }

    pub fn support(&self) -> Vec<Site> {
        self.constraints.keys().copied().collect()
    }

    pub fn constraints(&self) -> &BTreeMap<Site, usize> {
        &self.constraints
    }

    /// `θ_k⁻¹ A = {ω : θ_k ω ∈ A}`, which constrains `j + k` for `j` in the
    /// support of `A`.
    pub fn pullback(&self, k: &ShiftIndex) -> CylinderEvent {
        let d = k.basis.displacement(k.k);
        CylinderEvent {
            constraints: self.constraints.iter().map(|(s, v)| (*s + d, *v)).collect(),
            empty: self.empty,
        }
    }

    pub fn intersect(&self, other: &CylinderEvent) -> CylinderEvent {
        let mut out = CylinderEvent::new(self.constraints.iter().chain(&other.constraints).map(|(s, v)| (*s, *v)));
        out.empty |= self.empty || other.empty;
        out
    }

    pub fn holds(&self, gen: &FieldGenerator) -> bool {
        !self.empty && self.constraints.iter().all(|(s, v)| gen.sample_site(*s) == *v)
    }

    pub fn probability_exact(&self, gen: &FieldGenerator) -> Result<Scalar> {
        if self.empty {
            return Ok(Scalar::zero());
        }
        if self.constraints.is_empty() {
            return Ok(Scalar::one());
        }
        let window = Window::new(self.support())?;
        let symbols: Vec<usize> = self.constraints.values().copied().collect();
        Ok(marginal_exact(gen, &window)?.prob(&symbols).clone())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Correlation {
    /// `|P(A ∩ θ_k⁻¹B) − P(A)P(B)|`.
    pub value: Scalar,
    pub exact: bool,
    /// Delta-method standard error of a Monte Carlo estimate.
    pub std_error: Option<f64>,
}

/// The correlation of `A` and `θ_k⁻¹B`, exactly when the joint support fits
/// the enumeration budget, otherwise from `samples` realizations (field seed
/// `stream_seed(seed, s, 0)` for sample `s`). Without samples an
/// over-budget support is an error.
pub fn mixing_correlation(gen: &FieldGenerator, a: &CylinderEvent, b: &CylinderEvent, k: &ShiftIndex, samples: Option<u64>, seed: u64) -> Result<Correlation> {
    let pulled = b.pullback(k);
    let joint = a.intersect(&pulled);
    let exact = (|| -> Result<Scalar> {
        let pa = a.probability_exact(gen)?;
        let pb = b.probability_exact(gen)?;
        let pab = joint.probability_exact(gen)?;
        Ok((pab - pa * pb).abs())
    })();
    match (exact, samples) {
        (Ok(value), _) => Ok(Correlation {
            value,
            exact: true,
            std_error: None,
        }),
        (Err(Error::EnumerationBudget { .. }), Some(n)) if n > 0 => Ok(monte_carlo_correlation(gen, a, &pulled, n, seed)),
        (Err(e), _) => Err(e),
    }
}

fn monte_carlo_correlation(gen: &FieldGenerator, a: &CylinderEvent, pulled: &CylinderEvent, n: u64, seed: u64) -> Correlation {
    let hits: Vec<(f64, f64, f64)> = (0..n)
        .into_par_iter()
        .map(|s| {
            let g = gen.with_seed(stream_seed(seed, s, 0));
            let x = a.holds(&g);
            let y = pulled.holds(&g);
            (x as u8 as f64, y as u8 as f64, (x && y) as u8 as f64)
        })
        .collect();
    let nf = n as f64;
    let mean = |f: fn(&(f64, f64, f64)) -> f64| hits.iter().map(f).sum::<f64>() / nf;
    let (ma, mb, mc) = (mean(|h| h.0), mean(|h| h.1), mean(|h| h.2));
    let d = mc - ma * mb;
    // gradient of c − a·b at the means
    let (ga, gb, gc) = (-mb, -ma, 1.0);
    let var: f64 = hits
        .iter()
        .map(|h| {
            let z = ga * (h.0 - ma) + gb * (h.1 - mb) + gc * (h.2 - mc);
            z * z
        })
        .sum::<f64>()
        / (nf - 1.0).max(1.0);
    Correlation {
        value: Scalar::Approx(d.abs()),
        exact: false,
        std_error: Some((var / nf).sqrt()),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CesaroCorrelation {
    pub value: Scalar,
    pub exact: bool,
    /// Standard error of the mean when any term was estimated.
    pub std_error: Option<f64>,
    pub terms: Vec<Correlation>,
}

/// `(1/n) Σ_{i<n} |P(A ∩ θ_{k_i}⁻¹B) − P(A)P(B)|`.
pub fn weak_mixing_along(gen: &FieldGenerator, a: &CylinderEvent, b: &CylinderEvent, sequence: &[ShiftIndex], samples: Option<u64>, seed: u64) -> Result<CesaroCorrelation> {
    if sequence.is_empty() {
        return invalid("empty shift sequence");
    }
    let terms: Vec<Correlation> = sequence
        .par_iter()
        .enumerate()
        .map(|(i, k)| mixing_correlation(gen, a, b, k, samples, split_seed(seed, i as u64)))
        .collect::<Result<_>>()?;
    let n = terms.len();
    let total: Scalar = terms.iter().map(|c| c.value.clone()).sum();
    let exact = terms.iter().all(|c| c.exact);
    let std_error = (!exact).then(|| terms.iter().filter_map(|c| c.std_error).map(|s| s * s).sum::<f64>().sqrt() / n as f64);
    Ok(CesaroCorrelation {
        value: total / Scalar::int(n as i64),
        exact,
        std_error,
        terms,
    })
}

/// The staircase shift sequence `(κ_i(t))_{i<n}` as shift indices.
pub fn cocycle_sequence(sys: &SkewSystem, t: &CirclePoint, n: u64) -> Vec<ShiftIndex> {
    let series = circle::cocycle_series(t, &sys.slope, &sys.coupling, n);
    series[..n as usize]
        .iter()
        .map(|k| ShiftIndex { k: *k, basis: sys.basis })
        .collect()
}

/// Smallest seed `s ≥ 0` whose checkerboard realization has phase `phase`.
pub fn phase_seed(gen: &FieldGenerator, phase: usize) -> Result<u64> {
    if gen.phase().is_none() {
        return invalid("field has no phase");
    }
    (0..u64::MAX)
        .find(|s| gen.with_seed(*s).phase() == Some(phase))
        .ok_or_else(|| Error::InvalidArgument("phase not reachable".into()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseLimits {
    /// Limit of `A_n` for each phase of the checkerboard.
    pub per_phase: Vec<Scalar>,
    /// Seeds realizing each phase.
    pub seeds: Vec<u64>,
    /// The limit predicted by the product formula, which averages over
    /// phases.
    pub product: LimitValue,
    /// `max_φ |per_phase[φ] − product|`.
    pub gap: Scalar,
}

/// Exact orbit limits of a checkerboard fibre under a rational rotation.
///
/// The joint state (base point, phase offset) is periodic with period
/// `q · P / gcd(s, P)`, where `s` is the phase advance over one base period,
/// so the average over that many steps is the limit.
pub fn checkerboard_phase_limits(sys: &SkewSystem, obs: &WindowObservable, t: &CirclePoint) -> Result<PhaseLimits> {
    let FieldKind::PhaseCheckerboard { pattern } = sys.field.kind() else {
        return invalid("phase-resolved limits need a checkerboard field");
    };
    let period = pattern.len() as i64;
    let q = sys.slope.period().ok_or(Error::IrrationalSlope)? as i64;
    let d = sys.basis.displacement(circle::cocycle(t, &sys.slope, &sys.coupling, q as u64).vector);
    let advance = (d.x + d.y).rem_euclid(period);
    let joint = q * period / num_integer::gcd(advance, period);
    let seeds: Vec<u64> = (0..pattern.len()).map(|p| phase_seed(&sys.field, p)).collect::<Result<_>>()?;
    let per_phase: Vec<Scalar> = seeds
        .iter()
        .map(|s| Ok(engine::ergodic_average(sys, obs, t, *s, &[joint as u64])?.averages[0].clone()))
        .collect::<Result<_>>()?;
    let product = limits::limit_for(&sys.field, obs, &sys.slope, t)?;
    let gap = per_phase
        .iter()
        .map(|v| (v - &product.value).abs())
        .reduce(Scalar::max)
        .unwrap();
    Ok(PhaseLimits {
        per_phase,
        seeds,
        product,
        gap,
    })
}

#[derive(Debug, Clone)]
pub struct ErrorCurve {
    pub checkpoints: Vec<u64>,
    /// `max_{t, seed} |A_n − limit(t)|`.
    pub sup: Vec<f64>,
    /// `max_t mean_seed |A_n − limit(t)|`.
    pub l1: Vec<f64>,
    /// `max_t (mean_seed |A_n − limit(t)|²)^{1/2}`.
    pub l2: Vec<f64>,
    /// Root mean square of the per-run standard errors.
    pub pooled_se: Vec<f64>,
    /// `(grid index, seed index)` attaining `sup`.
    pub argmax: Vec<(usize, usize)>,
    pub limits: Vec<LimitValue>,
    /// Runs in grid-major, seed-minor order.
    pub runs: Vec<AverageSeries>,
}

/// Uniform-in-`t` error of ergodic averages against `limits::limit_for`.
pub fn uniform_error_curve(sys: &SkewSystem, obs: &WindowObservable, grid: &TGrid, seeds: &[u64], checkpoints: &[u64]) -> Result<ErrorCurve> {
    let limits: Vec<LimitValue> = grid
        .points
        .iter()
        .map(|t| limits::limit_for(&sys.field, obs, &sys.slope, t))
        .collect::<Result<_>>()?;
    uniform_error_curve_against(sys, obs, grid, seeds, checkpoints, limits)
}

/// As [`uniform_error_curve`] with caller-supplied limits, one per grid
/// point.
pub fn uniform_error_curve_against(sys: &SkewSystem, obs: &WindowObservable, grid: &TGrid, seeds: &[u64], checkpoints: &[u64], limits: Vec<LimitValue>) -> Result<ErrorCurve> {
    if seeds.is_empty() {
        return invalid("no seeds");
    }
    if limits.len() != grid.len() {
        return invalid("one limit per grid point required");
    }
    let jobs: Vec<(usize, usize)> = (0..grid.len()).flat_map(|i| (0..seeds.len()).map(move |j| (i, j))).collect();
    let runs: Vec<AverageSeries> = jobs
        .par_iter()
        .map(|&(i, j)| {
            engine::ergodic_average(sys, obs, &grid.points[i], seeds[j], checkpoints).map(|s| s.with_limit(limits[i].value.clone()))
        })
        .collect::<Result<_>>()?;
    let ns = seeds.len();
    let mut curve = ErrorCurve {
        checkpoints: checkpoints.to_vec(),
        sup: vec![],
        l1: vec![],
        l2: vec![],
        pooled_se: vec![],
        argmax: vec![],
        limits,
        runs: vec![],
    };
    for c in 0..checkpoints.len() {
        let mut sup = (0.0f64, (0, 0));
        let (mut l1, mut l2, mut se2) = (0.0f64, 0.0f64, 0.0f64);
        for i in 0..grid.len() {
            let (mut a1, mut a2) = (0.0, 0.0);
            for j in 0..ns {
                let run = &runs[i * ns + j];
                let err = (&run.averages[c] - &curve.limits[i].value).abs().to_f64();
                if err > sup.0 {
                    sup = (err, (i, j));
                }
                a1 += err;
                a2 += err * err;
                se2 += run.std_error(c).powi(2);
            }
            l1 = l1.max(a1 / ns as f64);
            l2 = l2.max((a2 / ns as f64).sqrt());
        }
        curve.sup.push(sup.0);
        curve.argmax.push(sup.1);
        curve.l1.push(l1);
        curve.l2.push(l2);
        curve.pooled_se.push((se2 / runs.len() as f64).sqrt());
    }
    curve.runs = runs;
    Ok(curve)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModulusEntry {
    pub delta: f64,
    pub n: u64,
    pub value: f64,
    /// Pair `(s, t)` attaining `value`.
    pub pair: (CirclePoint, CirclePoint),
    /// A shape breakpoint on the short arc between `s` and `t`, if any.
    pub straddled: Option<CirclePoint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModulusTable {
    pub resolution: usize,
    pub entries: Vec<ModulusEntry>,
}

impl ModulusTable {
    pub fn get(&self, delta: f64, n: u64) -> Option<&ModulusEntry> {
        self.entries.iter().find(|e| e.delta == delta && e.n == n)
    }
}

/// `sup_{|s − t| < δ} |A_n(s, ω) − A_n(t, ω)|` over the fine grid
/// `{k / R}` with `R = ⌈4 / min δ⌉`, distances measured on the circle.
pub fn equicontinuity_modulus(sys: &SkewSystem, obs: &WindowObservable, deltas: &[f64], ns: &[u64], seed: u64) -> Result<ModulusTable> {
    if deltas.is_empty() || deltas.iter().any(|d| !(*d > 0.0 && *d <= 0.5)) {
        return invalid("deltas must lie in (0, 1/2]");
    }
    let min_delta = deltas.iter().copied().fold(f64::INFINITY, f64::min);
    let resolution = (4.0 / min_delta).ceil() as usize;
    let grid = TGrid::uniform(resolution, CirclePoint::zero())?;
    let runs: Vec<Vec<f64>> = grid
        .points
        .par_iter()
        .map(|t| engine::ergodic_average(sys, obs, t, seed, ns).map(|s| s.averages.iter().map(Scalar::to_f64).collect()))
        .collect::<Result<_>>()?;
    let breakpoints = match (&obs.f, &obs.shape) {
        (ObservableFn::Table(table), engine::ShapeRule::Staircase) => shape_breakpoints(&sys.slope, table.m())?.breakpoints,
        _ => vec![],
    };
    let mut entries = vec![];
    for &delta in deltas {
        // offsets w with w / R < δ
        let reach = ((delta * resolution as f64).ceil() as usize).saturating_sub(1).min(resolution / 2);
        for (c, &n) in ns.iter().enumerate() {
            let mut best = (0.0f64, 0usize, 0usize);
            for i in 0..resolution {
                for w in 1..=reach {
                    let j = (i + w) % resolution;
                    let diff = (runs[i][c] - runs[j][c]).abs();
                    if diff > best.0 {
                        best = (diff, i, j);
                    }
                }
            }
            let (s, t) = (grid.points[best.1], grid.points[best.2]);
            let straddled = (best.0 > 0.0)
                .then(|| breakpoints.iter().find(|b| on_arc(s.value(), t.value(), b.value())).copied())
                .flatten();
            entries.push(ModulusEntry {
                delta,
                n,
                value: best.0,
                pair: (s, t),
                straddled,
            });
        }
    }
    Ok(ModulusTable { resolution, entries })
}

/// Whether `b` lies in the half-open arc `(s, t]` going forward from `s`.
fn on_arc(s: f64, t: f64, b: f64) -> bool {
    if s <= t {
        s < b && b <= t
    } else {
        b > s || b <= t
    }
}
