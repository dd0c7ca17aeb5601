//! Experiment configuration in TOML, and its translation into library
//! objects.

use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use skew_ergodic::circle::{CirclePoint, Coupling, Slope};
use skew_ergodic::diagnostics::{CylinderEvent, TGrid};
use skew_ergodic::engine::{ObservableTable, SkewSystem, WindowObservable};
use skew_ergodic::field::{Alphabet, BlockMap, Distribution, FieldGenerator, FieldKind, ShiftBasis};
use skew_ergodic::hash::split_seed;
use skew_ergodic::lattice::Window;
use skew_ergodic::scalar::Scalar;
use skew_ergodic::site::Site;

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Average,
    Limits,
    CheckGrowth,
    CheckC2,
    Mixing,
    Uniform,
    Equicontinuity,
}

impl Kind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Kind::Average => "average",
            Kind::Limits => "limits",
            Kind::CheckGrowth => "check-growth",
            Kind::CheckC2 => "check-c2",
            Kind::Mixing => "mixing",
            Kind::Uniform => "uniform",
            Kind::Equicontinuity => "equicontinuity",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub kind: Kind,
    /// `"p/q"`, `"golden"`, or a decimal taken as an irrational slope.
    pub slope: String,
    /// Starting point when no grid is given: `"a/b"` exact, decimal approx.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<String>,
    #[serde(default)]
    pub master_seed: u64,
    /// Field seeds; alternatively `replicates`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub seeds: Vec<u64>,
    /// Number of replicates `i`, each with seed `hash(master_seed, i)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replicates: Option<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checkpoints: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(default)]
    pub coupling: CouplingSpec,
    pub field: FieldSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observable: Option<ObservableSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub growth: Option<GrowthSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c2: Option<C2Spec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mixing: Option<MixingSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub equicontinuity: Option<EquicontinuitySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "kebab-case")]
pub enum CouplingSpec {
    Staircase,
    Constant { vector: [i64; 2] },
}

impl Default for CouplingSpec {
    fn default() -> Self {
        CouplingSpec::Staircase
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    /// `iid`, `or`, `block` or `checkerboard`.
    pub kind: String,
    /// Symbol values; binary `0, 1` by default.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub values: Vec<String>,
    /// Bernoulli parameter for `iid` and `or`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<String>,
    /// Symbol (or latent) probabilities.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub probs: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub stencil: Vec<[i64; 2]>,
    /// `max`, `min`, `sum-mod` or `table`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub map_table: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pattern: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<[[i64; 2]; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservableSpec {
    #[serde(default = "one")]
    pub m: usize,
    /// `product`, `sum`, `identity`, `all-equal`, `constant`, `table`, or a
    /// base function `cos2pi`, `sin2pi`, `indicator-half`.
    pub f: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub table: Vec<String>,
    /// Fixed read window; the staircase window when absent.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub window: Vec<[i64; 2]>,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    /// `uniform`, `avoiding` or `explicit`.
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offset: Option<String>,
    /// Window size whose breakpoints an `avoiding` grid keeps clear of.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrowthSpec {
    pub n: Vec<u64>,
    pub m: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct C2Spec {
    #[serde(default)]
    pub threshold: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixingSpec {
    /// `[x, y, symbol]` requirements; an empty list is the sure event.
    pub a: Vec<[i64; 3]>,
    pub b: Vec<[i64; 3]>,
    #[serde(default)]
    pub a_empty: bool,
    /// Explicit shift indices.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub shifts: Vec<[i64; 2]>,
    /// Use `(κ_i(t))_{i<n}` instead of `shifts`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cocycle_terms: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquicontinuitySpec {
    pub deltas: Vec<f64>,
    pub n: Vec<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LimitPolicy {
    /// Compare against the oracle only when the fibre is known to be
    /// ergodic; otherwise the run is not verifiable.
    Auto,
    /// Always compare against the product-measure formula.
    Product,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySpec {
    pub tolerance: f64,
    #[serde(default = "auto")]
    pub limit: LimitPolicy,
}

fn auto() -> LimitPolicy {
    LimitPolicy::Auto
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepAxis {
    Slope,
    T,
    M,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub values: Vec<String>,
}

fn cfg_err<T>(field: &str, msg: impl std::fmt::Display) -> Result<T, CliError> {
    Err(CliError::Config(format!("{field}: {msg}")))
}

fn scalar(field: &str, s: &str) -> Result<Scalar, CliError> {
    Scalar::from_str(s).or_else(|e| cfg_err(field, e))
}

fn lib<T>(field: &str, r: skew_ergodic::error::Result<T>) -> Result<T, CliError> {
    r.map_err(|e| CliError::from_lib(field, e))
}

pub fn parse_slope(s: &str) -> Result<Slope, CliError> {
    let s = s.trim();
    if s == "golden" {
        return Ok(Slope::golden());
    }
    if let Some((p, q)) = s.split_once('/') {
        let (p, q) = match (p.trim().parse(), q.trim().parse()) {
            (Ok(p), Ok(q)) => (p, q),
            _ => return cfg_err("slope", format!("cannot parse {s:?} as p/q")),
        };
        return lib("slope", Slope::rational(p, q));
    }
    match s.parse::<f64>() {
        Ok(v) => lib("slope", Slope::irrational(v)),
        Err(_) => cfg_err("slope", format!("expected \"p/q\", \"golden\" or a decimal, got {s:?}")),
    }
}

pub fn parse_point(field: &str, s: &str) -> Result<CirclePoint, CliError> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        return match (a.trim().parse(), b.trim().parse()) {
            (Ok(a), Ok(b)) => lib(field, CirclePoint::exact(a, b)),
            _ => cfg_err(field, format!("cannot parse {s:?} as a/b")),
        };
    }
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(if v == 0.0 { CirclePoint::zero() } else { CirclePoint::approx(v) }),
        _ => cfg_err(field, format!("cannot parse {s:?}")),
    }
}

fn site(v: [i64; 2]) -> Site {
    Site::new(v[0], v[1])
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<ExperimentConfig, CliError> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.schema_version != SCHEMA_VERSION {
            return cfg_err("schema_version", format!("expected {SCHEMA_VERSION}, got {}", self.schema_version));
        }
        parse_slope(&self.slope)?;
        if self.checkpoints.windows(2).any(|w| w[0] >= w[1]) || self.checkpoints.first() == Some(&0) {
            return cfg_err("checkpoints", "must be positive and strictly increasing");
        }
        let mut seen = self.seeds.clone();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return cfg_err("seeds", "must be distinct");
        }
        if !self.seeds.is_empty() && self.replicates.is_some() {
            return cfg_err("seeds", "give either seeds or replicates, not both");
        }
        if self.replicates == Some(0) {
            return cfg_err("replicates", "must be at least 1");
        }
        let needs_seeds = matches!(self.kind, Kind::Average | Kind::Uniform | Kind::Equicontinuity);
        if needs_seeds && self.seeds().is_empty() {
            return cfg_err("seeds", "empty seed list");
        }
        if matches!(self.kind, Kind::Average | Kind::Uniform | Kind::Equicontinuity | Kind::Limits) && self.observable.is_none() {
            return cfg_err("observable", "missing");
        }
        if matches!(self.kind, Kind::Average | Kind::Uniform) && self.checkpoints.is_empty() {
            return cfg_err("checkpoints", "missing");
        }
        let required = match self.kind {
            Kind::CheckGrowth => self.growth.is_none().then_some("growth"),
            Kind::Mixing => self.mixing.is_none().then_some("mixing"),
            Kind::Equicontinuity => self.equicontinuity.is_none().then_some("equicontinuity"),
            _ => None,
        };
        if let Some(section) = required {
            return cfg_err(section, "section missing");
        }
        if let Some(s) = &self.sweep {
            if s.values.is_empty() {
                return cfg_err("sweep.values", "empty sweep list");
            }
        }
        if let Some(v) = &self.verify {
            if !(v.tolerance >= 0.0) {
                return cfg_err("verify.tolerance", "must be a nonnegative number");
            }
        }
        self.system()?;
        self.observable()?;
        self.grid()?;
        Ok(())
    }

    /// Field seeds, explicit or derived from the master seed.
    pub fn seeds(&self) -> Vec<u64> {
        match self.replicates {
            Some(r) => (0..r).map(|i| split_seed(self.master_seed, i)).collect(),
            None => self.seeds.clone(),
        }
    }

    /// The configuration as it bears on results: output path removed,
    /// serialized canonically.
    pub fn canonical(&self) -> String {
        let mut c = self.clone();
        c.output = None;
        toml::to_string(&c).expect("config serializes")
    }

    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.canonical().as_bytes()))
    }

    pub fn slope(&self) -> Slope {
        parse_slope(&self.slope).expect("validated")
    }

    pub fn field(&self) -> Result<FieldGenerator, CliError> {
        let f = &self.field;
        let alphabet = if f.values.is_empty() {
            Alphabet::binary()
        } else {
            let values = f.values.iter().map(|v| scalar("field.values", v)).collect::<Result<_, _>>()?;
            lib("field.values", Alphabet::new(values))?
        };
        let probs = |field: &str| -> Result<Distribution, CliError> {
            if let Some(p) = &f.p {
                return lib(field, Distribution::bernoulli(scalar("field.p", p)?));
            }
            let ps = f.probs.iter().map(|v| scalar("field.probs", v)).collect::<Result<Vec<_>, _>>()?;
            if ps.is_empty() {
                return cfg_err(field, "needs p or probs");
            }
            lib("field.probs", Distribution::new(ps))
        };
        let kind = match f.kind.as_str() {
            "iid" => FieldKind::Iid(probs("field.p")?),
            "or" => {
                if !f.stencil.is_empty() || f.map.is_some() {
                    return cfg_err("field", "the or field has a fixed stencil; use kind = \"block\"");
                }
                FieldKind::BlockFactor {
                    latent: probs("field.p")?,
                    stencil: vec![Site::new(0, 0), Site::new(1, 1)],
                    map: BlockMap::Max,
                }
            }
            "block" => {
                let map = match f.map.as_deref() {
                    Some("max") => BlockMap::Max,
                    Some("min") => BlockMap::Min,
                    Some("sum-mod") => BlockMap::SumMod,
                    Some("table") => BlockMap::Table(f.map_table.clone()),
                    other => return cfg_err("field.map", format!("unknown block map {other:?}")),
                };
                FieldKind::BlockFactor {
                    latent: probs("field.probs")?,
                    stencil: f.stencil.iter().map(|s| site(*s)).collect(),
                    map,
                }
            }
            "checkerboard" => FieldKind::PhaseCheckerboard {
                pattern: if f.pattern.is_empty() { vec![0, 1] } else { f.pattern.clone() },
            },
            other => return cfg_err("field.kind", format!("unknown field kind {other:?}")),
        };
        lib("field", FieldGenerator::new(alphabet, kind, self.master_seed))
    }

    pub fn basis(&self) -> Result<ShiftBasis, CliError> {
        match self.field.basis {
            Some([a, b]) => lib("field.basis", ShiftBasis::new(site(a), site(b))),
            None => Ok(ShiftBasis::axis()),
        }
    }

    pub fn coupling(&self) -> Coupling {
        match self.coupling {
            CouplingSpec::Staircase => Coupling::Staircase(self.slope()),
            CouplingSpec::Constant { vector } => Coupling::Constant(site(vector)),
        }
    }

    pub fn system(&self) -> Result<SkewSystem, CliError> {
        let slope = parse_slope(&self.slope)?;
        lib("coupling", SkewSystem::new(slope, self.coupling(), self.basis()?, self.field()?))
    }

    pub fn observable(&self) -> Result<Option<WindowObservable>, CliError> {
        let Some(o) = &self.observable else { return Ok(None) };
        let alphabet = self.field()?.alphabet().clone();
        let m = if o.window.is_empty() { o.m } else { o.window.len() };
        let bound_fn = |g: fn(f64) -> f64| Ok(Some(WindowObservable::base(g, 1.0)));
        let table = match o.f.as_str() {
            "cos2pi" => return bound_fn(|t| (2.0 * std::f64::consts::PI * t).cos()),
            "sin2pi" => return bound_fn(|t| (2.0 * std::f64::consts::PI * t).sin()),
            "indicator-half" => return bound_fn(|t| if t < 0.5 { 1.0 } else { 0.0 }),
            "product" => ObservableTable::product(&alphabet, m),
            "identity" if m == 1 => ObservableTable::product(&alphabet, 1),
            "identity" => return cfg_err("observable.f", "identity needs m = 1"),
            "sum" => ObservableTable::sum(&alphabet, m),
            "all-equal" => ObservableTable::all_equal(&alphabet, m),
            "constant" => {
                let c = o.constant.as_deref().ok_or_else(|| CliError::Config("observable.constant: missing".into()))?;
                ObservableTable::constant(&alphabet, m, scalar("observable.constant", c)?)
            }
            "table" => {
                let vals = o.table.iter().map(|v| scalar("observable.table", v)).collect::<Result<_, _>>()?;
                ObservableTable::new(alphabet.len(), m, vals)
            }
            other => return cfg_err("observable.f", format!("unknown builtin {other:?}")),
        };
        let table = lib("observable", table)?;
        if o.window.is_empty() {
            Ok(Some(WindowObservable::staircase(table)))
        } else {
            let w = lib("observable.window", Window::new(o.window.iter().map(|s| site(*s)).collect()))?;
            lib("observable.window", WindowObservable::fixed(w, table)).map(Some)
        }
    }

    /// The base points: the grid if given, else `t`, else `0`.
    pub fn grid(&self) -> Result<TGrid, CliError> {
        let Some(g) = &self.grid else {
            let t = match &self.t {
                Some(t) => parse_point("t", t)?,
                None => CirclePoint::zero(),
            };
            return lib("t", TGrid::explicit(vec![t]));
        };
        let n = || g.n.ok_or_else(|| CliError::Config("grid.n: missing".into()));
        match g.kind.as_str() {
            "uniform" => {
                let offset = match &g.offset {
                    Some(o) => parse_point("grid.offset", o)?,
                    None => CirclePoint::zero(),
                };
                lib("grid", TGrid::uniform(n()?, offset))
            }
            "avoiding" => {
                let m = g.m.or(self.observable.as_ref().map(|o| o.m)).unwrap_or(1);
                lib("grid", TGrid::breakpoint_avoiding(n()?, &parse_slope(&self.slope)?, m))
            }
            "explicit" => {
                let pts = g.points.iter().map(|p| parse_point("grid.points", p)).collect::<Result<_, _>>()?;
                lib("grid.points", TGrid::explicit(pts))
            }
            other => cfg_err("grid.kind", format!("unknown grid kind {other:?}")),
        }
    }

    pub fn events(&self) -> Result<(CylinderEvent, CylinderEvent), CliError> {
        let m = self.mixing.as_ref().ok_or_else(|| CliError::Config("mixing: section missing".into()))?;
        let ev = |reqs: &[[i64; 3]]| -> Result<CylinderEvent, CliError> {
            if reqs.iter().any(|r| r[2] < 0) {
                return cfg_err("mixing", "negative symbol");
            }
            Ok(CylinderEvent::new(reqs.iter().map(|r| (Site::new(r[0], r[1]), r[2] as usize))))
        };
        let a = if m.a_empty { CylinderEvent::empty() } else { ev(&m.a)? };
        Ok((a, ev(&m.b)?))
    }

    /// A copy with one axis value substituted.
    pub fn with_sweep_value(&self, axis: SweepAxis, value: &str) -> Result<ExperimentConfig, CliError> {
        let mut c = self.clone();
        c.sweep = None;
        match axis {
            SweepAxis::Slope => c.slope = value.to_string(),
            SweepAxis::T => {
                c.t = Some(value.to_string());
                c.grid = None;
            }
            SweepAxis::M => {
                let m = value.parse().or_else(|_| cfg_err("sweep.values", format!("bad m {value:?}")))?;
                let o = c.observable.as_mut().ok_or_else(|| CliError::Config("observable: missing".into()))?;
                o.m = m;
                if let Some(g) = c.grid.as_mut() {
                    g.m = g.m.map(|_| m);
                }
            }
        }
        c.validate()?;
        Ok(c)
    }
}
