use serde::{Deserialize, Serialize};

use super::{CountModel, RunRecord, VerifyError};

/// Largest relative residual for a fit to count as stable.
pub const FIT_TOLERANCE: f64 = 0.25;

/// Distinct sizes a fit needs.
const MIN_SIZES: usize = 4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitRow {
    pub n: usize,
    pub k: u32,
    pub measured: f64,
    pub model: f64,
    /// `|measured - c·model| / (c·model)`.
    pub relative: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub stat: String,
    pub model: CountModel,
    /// Least-squares `c` minimizing `Σ (measured - c·model)²`.
    pub constant: f64,
    pub rows: Vec<FitRow>,
    pub max_relative: f64,
    /// Sizes at which the measurement decreased while the model grew.
    pub monotone_violations: Vec<usize>,
    pub stable: bool,
}

pub fn scaling_fit(
    records: &[RunRecord],
    stat: &str,
    model: CountModel,
) -> Result<FitReport, VerifyError> {
    let mut sizes: Vec<usize> = records.iter().map(|r| r.config.n).collect();
    sizes.sort_unstable();
    sizes.dedup();
    if sizes.len() < MIN_SIZES {
        return Err(VerifyError::InsufficientData {
            need: MIN_SIZES,
            got: sizes.len(),
        });
    }
    let mut rows: Vec<FitRow> = records
        .iter()
        .map(|r| {
            Ok(FitRow {
                n: r.config.n,
                k: r.config.k,
                measured: r.stat(stat)?,
                model: model.eval(r.config.n, r.config.k),
                relative: 0.0,
            })
        })
        .collect::<Result<_, VerifyError>>()?;
    rows.sort_by(|a, b| (a.k, a.n).cmp(&(b.k, b.n)));
    let num: f64 = rows.iter().map(|r| r.measured * r.model).sum();
    let den: f64 = rows.iter().map(|r| r.model * r.model).sum();
    let c = if den > 0.0 { num / den } else { 0.0 };
    for r in &mut rows {
        let fit = c * r.model;
        r.relative = if fit > 0.0 {
            (r.measured - fit).abs() / fit
        } else {
            f64::INFINITY
        };
    }
    let max_relative = rows.iter().map(|r| r.relative).fold(0.0, f64::max);
    let monotone_violations = rows
        .windows(2)
        .filter(|w| w[0].k == w[1].k && w[1].model > w[0].model && w[1].measured < w[0].measured)
        .map(|w| w[1].n)
        .collect();
    Ok(FitReport {
        stat: stat.into(),
        model,
        constant: c,
        rows,
        max_relative,
        monotone_violations,
        stable: max_relative < FIT_TOLERANCE,
    })
}
