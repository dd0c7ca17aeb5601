//! One experiment repeated along a slope, intercept or window-size axis.

use crate::config::ExperimentConfig;
use crate::record::ResultRecord;
use crate::run;
use crate::CliError;

/// Runs `cfg` once per value of its `[sweep]` axis. Every run shares the
/// master seed, so replicate `i` uses the same field seed throughout.
pub fn sweep(cfg: &ExperimentConfig) -> Result<ResultRecord, CliError> {
    let spec = cfg.sweep.as_ref().ok_or_else(|| CliError::Config("sweep: section missing".into()))?;
    if spec.values.is_empty() {
        return Err(CliError::Config("sweep.values: empty sweep list".into()));
    }
    let mut rows = vec![];
    for value in &spec.values {
        let one = cfg.with_sweep_value(spec.axis, value)?;
        for mut r in run::execute(&one)?.rows {
            r.sweep = Some(value.clone());
            rows.push(r);
        }
    }
    Ok(ResultRecord::new(cfg, rows))
}
