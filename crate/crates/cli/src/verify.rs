//! Binding experiment output to oracle limits under a tolerance policy.

use skew_ergodic::circle::Coupling;
use skew_ergodic::diagnostics;
use skew_ergodic::field::FieldKind;
use skew_ergodic::site::Site;

use crate::config::{ExperimentConfig, Kind, LimitPolicy};
use crate::record::ResultRecord;
use crate::run;
use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Pass,
    Fail,
    /// No limit to compare against, such as for a non-ergodic fibre.
    NotVerifiable(String),
}

impl Verdict {
    pub fn exit_code(&self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::NotVerifiable(_) => 4,
        }
    }
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub verdict: Verdict,
    pub tolerance: f64,
    pub policy: LimitPolicy,
    /// Largest `|A_n − limit|` at the last checkpoint.
    pub max_error: Option<f64>,
    /// Extra findings, one per line.
    pub notes: Vec<String>,
    pub record: Option<ResultRecord>,
}

impl VerifyReport {
    pub fn render(&self) -> String {
        let status = match &self.verdict {
            Verdict::Pass => "PASS".to_string(),
            Verdict::Fail => "FAIL".to_string(),
            Verdict::NotVerifiable(why) => format!("NOT VERIFIABLE ({why})"),
        };
        let policy = match self.policy {
            LimitPolicy::Auto => "auto",
            LimitPolicy::Product => "product",
        };
        let mut out = format!("verify: {status} tolerance={} limit={policy}", self.tolerance);
        if let Some(e) = self.max_error {
            out.push_str(&format!(" max_error={e}"));
        }
        out.push('\n');
        for n in &self.notes {
            out.push_str(&format!("  {n}\n"));
        }
        out
    }
}

fn lib<T>(r: skew_ergodic::error::Result<T>) -> Result<T, CliError> {
    r.map_err(|e| CliError::from_lib("verify", e))
}

pub fn verify(cfg: &ExperimentConfig, tolerance: Option<f64>) -> Result<VerifyReport, CliError> {
    if !matches!(cfg.kind, Kind::Average | Kind::Uniform) {
        return Err(CliError::Config(format!("kind: verify needs average or uniform, got {}", cfg.kind.as_str())));
    }
    let tolerance = tolerance
        .or(cfg.verify.as_ref().map(|v| v.tolerance))
        .ok_or_else(|| CliError::Config("verify.tolerance: no tolerance policy (add [verify] or pass --tolerance)".into()))?;
    if !(tolerance >= 0.0) {
        return Err(CliError::Config("tolerance: must be a nonnegative number".into()));
    }
    let policy = cfg.verify.as_ref().map_or(LimitPolicy::Auto, |v| v.limit);
    let sys = cfg.system()?;
    let mut report = VerifyReport {
        verdict: Verdict::Pass,
        tolerance,
        policy,
        max_error: None,
        notes: vec![],
        record: None,
    };
    if policy == LimitPolicy::Auto {
        if !sys.field.is_mixing() {
            report.verdict = Verdict::NotVerifiable("field is not mixing, so the fibre limit is not the product formula".into());
            return Ok(report);
        }
        let zero = matches!(sys.coupling, Coupling::Constant(k) if k == Site::ORIGIN);
        if zero {
            report.verdict = Verdict::NotVerifiable("coupling is identically zero, so the cocycle does not grow".into());
            return Ok(report);
        }
    }
    let record = run::execute(cfg)?;
    let last = *cfg.checkpoints.last().expect("validated");
    let max_error = record
        .rows
        .iter()
        .filter(|r| r.n == Some(last) && r.seed.is_some())
        .filter_map(|r| r.error.as_ref().map(|e| e.to_f64()))
        .fold(0.0f64, f64::max);
    report.max_error = Some(max_error);
    report.verdict = if max_error <= tolerance { Verdict::Pass } else { Verdict::Fail };
    if let (FieldKind::PhaseCheckerboard { .. }, Some(obs)) = (sys.field.kind(), cfg.observable()?) {
        if sys.slope.is_rational() && obs.table().is_some() {
            for (i, t) in cfg.grid()?.points.iter().enumerate() {
                let p = lib(diagnostics::checkerboard_phase_limits(&sys, &obs, t))?;
                let per: Vec<String> = p.per_phase.iter().map(|v| v.to_string()).collect();
                report.notes.push(format!(
                    "t_index={i}: per-phase limits [{}] vs product limit {} ({}); exact gap {}",
                    per.join(", "),
                    p.product.value,
                    p.product.tag,
                    p.gap
                ));
            }
        }
    }
    report.record = Some(record);
    Ok(report)
}
