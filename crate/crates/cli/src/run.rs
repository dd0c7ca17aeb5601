//! Experiment execution, one function per experiment kind.

use skew_ergodic::circle::CirclePoint;
use skew_ergodic::diagnostics::{self, GrowthStat};
use skew_ergodic::engine::WindowObservable;
use skew_ergodic::field::ShiftIndex;
use skew_ergodic::limits;
use skew_ergodic::scalar::Scalar;
use skew_ergodic::site::Site;

use crate::config::{ExperimentConfig, Kind};
use crate::record::{ResultRecord, Row};
use crate::CliError;

/// Outcome of the built-in pass criterion of a `check-*` experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub passed: bool,
    pub summary: String,
}

fn lib<T>(r: skew_ergodic::error::Result<T>) -> Result<T, CliError> {
    r.map_err(|e| CliError::from_lib("run", e))
}

fn observable(cfg: &ExperimentConfig) -> Result<WindowObservable, CliError> {
    cfg.observable()?.ok_or_else(|| CliError::Config("observable: missing".into()))
}

fn row(kind: Kind) -> Row {
    Row {
        kind: kind.as_str().into(),
        ..Row::default()
    }
}

pub fn execute(cfg: &ExperimentConfig) -> Result<ResultRecord, CliError> {
    let rows = match cfg.kind {
        Kind::Average | Kind::Uniform => averages(cfg)?,
        Kind::Limits => limit_rows(cfg)?,
        Kind::CheckGrowth => growth(cfg)?.0,
        Kind::CheckC2 => c2(cfg)?.0,
        Kind::Mixing => mixing(cfg)?,
        Kind::Equicontinuity => equicontinuity(cfg)?,
    };
    Ok(ResultRecord::new(cfg, rows))
}

/// Runs a `check-growth` or `check-c2` experiment and reports its
/// criterion: the growth statistic must decrease strictly in `n` and end
/// below 1; the (C2) envelope must exceed the threshold.
pub fn check(cfg: &ExperimentConfig) -> Result<(ResultRecord, CheckOutcome), CliError> {
    let (rows, outcome) = match cfg.kind {
        Kind::CheckGrowth => growth(cfg)?,
        Kind::CheckC2 => c2(cfg)?,
        other => return Err(CliError::Config(format!("kind: check needs check-growth or check-c2, got {}", other.as_str()))),
    };
    Ok((ResultRecord::new(cfg, rows), outcome))
}

fn averages(cfg: &ExperimentConfig) -> Result<Vec<Row>, CliError> {
    let sys = cfg.system()?;
    let obs = observable(cfg)?;
    let grid = cfg.grid()?;
    let seeds = cfg.seeds();
    let curve = lib(diagnostics::uniform_error_curve(&sys, &obs, &grid, &seeds, &cfg.checkpoints))?;
    let kind = cfg.kind;
    let mut rows = vec![];
    for (c, &n) in cfg.checkpoints.iter().enumerate() {
        for (i, t) in grid.points.iter().enumerate() {
            let limit = &curve.limits[i];
            for (j, seed) in seeds.iter().enumerate() {
                let run = &curve.runs[i * seeds.len() + j];
                let value = run.averages[c].clone();
                rows.push(Row {
                    n: Some(n),
                    t_index: Some(i),
                    t: Some(t.to_string()),
                    seed_index: Some(j),
                    seed: Some(*seed),
                    error: Some((&value - &limit.value).abs()),
                    value: Some(value),
                    limit: Some(limit.value.clone()),
                    tag: limit.tag.as_str().into(),
                    std_error: Some(run.std_error(c)),
                    note: if run.boundary_hits > 0 {
                        format!("boundary_hits={}", run.boundary_hits)
                    } else {
                        String::new()
                    },
                    ..row(kind)
                });
            }
        }
        if kind == Kind::Uniform {
            for (name, v) in [("sup", curve.sup[c]), ("l1", curve.l1[c]), ("l2", curve.l2[c])] {
                let (ti, si) = curve.argmax[c];
                rows.push(Row {
                    n: Some(n),
                    param: Some(name.into()),
                    value: Some(Scalar::Approx(v)),
                    tag: "error_curve".into(),
                    std_error: Some(curve.pooled_se[c]),
                    note: if name == "sup" { format!("argmax_t_index={ti} argmax_seed_index={si}") } else { String::new() },
                    ..row(kind)
                });
            }
        }
    }
    Ok(rows)
}

fn limit_rows(cfg: &ExperimentConfig) -> Result<Vec<Row>, CliError> {
    let sys = cfg.system()?;
    let obs = observable(cfg)?;
    let grid = cfg.grid()?;
    let mut rows = vec![];
    for (i, t) in grid.points.iter().enumerate() {
        let l = lib(limits::limit_for(&sys.field, &obs, &sys.slope, t))?;
        let mut note = l.provenance.clone();
        if l.boundary_hits > 0 {
            note.push_str(&format!(" boundary_hits={}", l.boundary_hits));
        }
        rows.push(Row {
            t_index: Some(i),
            t: Some(t.to_string()),
            value: Some(l.value.clone()),
            limit: Some(l.value),
            tag: l.tag.as_str().into(),
            note,
            ..row(Kind::Limits)
        });
    }
    Ok(rows)
}

fn growth(cfg: &ExperimentConfig) -> Result<(Vec<Row>, CheckOutcome), CliError> {
    let spec = cfg.growth.as_ref().ok_or_else(|| CliError::Config("growth: section missing".into()))?;
    if spec.n.is_empty() || spec.m.is_empty() {
        return Err(CliError::Config("growth: n and m must be nonempty".into()));
    }
    let slope = cfg.slope();
    let coupling = cfg.coupling();
    let grid = cfg.grid()?;
    let mut rows = vec![];
    let mut passed = true;
    let mut failures = vec![];
    for &m in &spec.m {
        let mut prev: Option<Scalar> = None;
        for &n in &spec.n {
            let s = lib(diagnostics::growth_condition_stat(&slope, &coupling, &grid, n, m))?;
            let bound = Scalar::ratio(GrowthStat::staircase_bound(n, m) as i64, (n * n) as i64);
            let decreasing = prev.as_ref().is_none_or(|p| s.value < *p);
            if !decreasing || s.value >= Scalar::one() {
                passed = false;
                failures.push(format!("m={m} n={n} stat={}", s.value));
            }
            rows.push(Row {
                n: Some(n),
                param: Some(format!("m={m}")),
                t_index: Some(s.argmax),
                t: Some(grid.points[s.argmax].to_string()),
                value: Some(s.value.clone()),
                limit: Some(bound),
                tag: "growth".into(),
                note: format!("count={}", s.count),
                ..row(Kind::CheckGrowth)
            });
            prev = Some(s.value);
        }
    }
    let summary = if passed {
        "growth statistic decreases in n".to_string()
    } else {
        format!("growth condition fails: {}", failures.join("; "))
    };
    Ok((rows, CheckOutcome { passed, summary }))
}

fn c2(cfg: &ExperimentConfig) -> Result<(Vec<Row>, CheckOutcome), CliError> {
    if cfg.checkpoints.is_empty() {
        return Err(CliError::Config("checkpoints: missing".into()));
    }
    let threshold = cfg.c2.as_ref().map_or(0, |c| c.threshold);
    let grid = cfg.grid()?;
    let r = lib(diagnostics::check_c2(&cfg.slope(), &cfg.coupling(), &grid, &cfg.checkpoints, threshold))?;
    let mut rows = vec![];
    for (c, &n) in r.checkpoints.iter().enumerate() {
        for (i, t) in grid.points.iter().enumerate() {
            rows.push(Row {
                n: Some(n),
                t_index: Some(i),
                t: Some(t.to_string()),
                value: Some(Scalar::int(r.envelopes[i][c])),
                tag: "c2_envelope".into(),
                ..row(Kind::CheckC2)
            });
        }
        rows.push(Row {
            n: Some(n),
            param: Some("min".into()),
            value: Some(Scalar::int(r.min_envelope[c])),
            tag: "c2_min".into(),
            ..row(Kind::CheckC2)
        });
    }
    let last = *r.min_envelope.last().unwrap();
    let summary = format!(
        "min envelope {last} at n={} {} threshold {}",
        r.checkpoints.last().unwrap(),
        if r.passed { "exceeds" } else { "does not exceed" },
        threshold
    );
    Ok((rows, CheckOutcome { passed: r.passed, summary }))
}

fn mixing(cfg: &ExperimentConfig) -> Result<Vec<Row>, CliError> {
    let spec = cfg.mixing.as_ref().ok_or_else(|| CliError::Config("mixing: section missing".into()))?;
    let sys = cfg.system()?;
    let (a, b) = cfg.events()?;
    let t = cfg.grid()?.points[0];
    let sequence: Vec<ShiftIndex> = match spec.cocycle_terms {
        Some(n) => diagnostics::cocycle_sequence(&sys, &t, n),
        None => spec
            .shifts
            .iter()
            .map(|k| ShiftIndex {
                k: Site::new(k[0], k[1]),
                basis: sys.basis,
            })
            .collect(),
    };
    if sequence.is_empty() {
        return Err(CliError::Config("mixing: give shifts or cocycle_terms".into()));
    }
    let w = lib(diagnostics::weak_mixing_along(&sys.field, &a, &b, &sequence, spec.samples, cfg.master_seed))?;
    let mut rows: Vec<Row> = w
        .terms
        .iter()
        .zip(&sequence)
        .enumerate()
        .map(|(i, (c, k))| Row {
            n: Some(i as u64),
            param: Some(format!("k={}", k.k)),
            value: Some(c.value.clone()),
            tag: if c.exact { "correlation_exact" } else { "correlation_mc" }.into(),
            std_error: c.std_error,
            ..row(Kind::Mixing)
        })
        .collect();
    rows.push(Row {
        n: Some(sequence.len() as u64),
        param: Some("cesaro".into()),
        value: Some(w.value),
        tag: if w.exact { "cesaro_exact" } else { "cesaro_mc" }.into(),
        std_error: w.std_error,
        ..row(Kind::Mixing)
    });
    Ok(rows)
}

fn equicontinuity(cfg: &ExperimentConfig) -> Result<Vec<Row>, CliError> {
    let spec = cfg.equicontinuity.as_ref().ok_or_else(|| CliError::Config("equicontinuity: section missing".into()))?;
    let sys = cfg.system()?;
    let obs = observable(cfg)?;
    let seed = cfg.seeds()[0];
    let table = lib(diagnostics::equicontinuity_modulus(&sys, &obs, &spec.deltas, &spec.n, seed))?;
    let pt = |p: &CirclePoint| p.to_string();
    Ok(table
        .entries
        .iter()
        .map(|e| Row {
            n: Some(e.n),
            param: Some(format!("delta={}", e.delta)),
            seed_index: Some(0),
            seed: Some(seed),
            value: Some(Scalar::Approx(e.value)),
            tag: "modulus".into(),
            note: format!(
                "s={} t={} breakpoint={} resolution={}",
                pt(&e.pair.0),
                pt(&e.pair.1),
                e.straddled.as_ref().map(pt).unwrap_or_else(|| "none".into()),
                table.resolution
            ),
            ..row(Kind::Equicontinuity)
        })
        .collect())
}
