//! Temporal behaviour of an article's score: yearly series, citation ratios,
//! area comparisons and plot-ready curves.

use std::cmp::Ordering;

use serde::Serialize;
use thiserror::Error;

use crate::catalog::Catalog;
use crate::ledger::{IfMode, Ledger, ScoreError, ScoringOptions};
use crate::metric::{
    self, compute_i3, cr_simple, i3_auc, i3_derivative, Beta, FScore, I3Score, MetricError,
};

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error("at least one year is required")]
    NoYears,
    #[error("years must be positive and strictly ascending, got {0:?}")]
    BadYears(Vec<u32>),
    #[error(transparent)]
    Score(#[from] ScoreError),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// One point of the yearly series. Ratios are `None` when the full score is
/// zero and the ratio has no meaning.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DynamicsRow {
    pub years: u32,
    pub f_t: FScore,
    pub i3_t: I3Score,
    pub cr_simple: Option<f64>,
    pub cr_integral: Option<f64>,
}

impl DynamicsRow {
    /// Historical numerators against a current denominator can overshoot
    /// when impact factors fall over time.
    pub fn exceeds_one(&self) -> bool {
        self.cr_simple.is_some_and(|v| v > 1.0) || self.cr_integral.is_some_and(|v| v > 1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DynamicsReport {
    pub article_id: String,
    pub beta: Beta,
    pub f_full: FScore,
    pub i3_full: I3Score,
    pub series: Vec<DynamicsRow>,
    pub auc_full: f64,
    pub derivative_at_full: f64,
}

/// Builds the yearly series for `article_id`.
///
/// Truncated scores use the impact factors in force when each event happened;
/// the full score uses current factors. The `fallback_if` of `options` applies
/// to both; its `if_mode` is ignored.
pub fn dynamics_report(
    ledger: &Ledger,
    catalog: &Catalog,
    article_id: &str,
    years: &[u32],
    options: ScoringOptions,
) -> Result<DynamicsReport, DynamicsError> {
    if years.is_empty() {
        return Err(DynamicsError::NoYears);
    }
    if years[0] == 0 || years.windows(2).any(|w| w[0] >= w[1]) {
        return Err(DynamicsError::BadYears(years.to_vec()));
    }

    let article = ledger.article(article_id)?;
    let journal = catalog.journal(&article.journal).map_err(ScoreError::from)?;
    let beta = catalog.beta_for(&journal.category).map_err(ScoreError::from)?;

    let current = ScoringOptions {
        if_mode: IfMode::Current,
        ..options
    };
    let historical = ScoringOptions {
        if_mode: IfMode::Historical,
        ..options
    };
    let f_full = ledger.f_score(catalog, article_id, None, current)?;
    let i3_full = compute_i3(f_full, beta);

    let series = years
        .iter()
        .map(|&t| {
            let f_t = ledger.f_score(catalog, article_id, Some(t), historical)?;
            let i3_t = compute_i3(f_t, beta);
            Ok(DynamicsRow {
                years: t,
                f_t,
                i3_t,
                cr_simple: defined(cr_simple(i3_t, i3_full))?,
                cr_integral: defined(metric::area_ratio(f_t, f_full, beta))?,
            })
        })
        .collect::<Result<Vec<_>, DynamicsError>>()?;

    Ok(DynamicsReport {
        article_id: article.id.clone(),
        beta,
        f_full,
        i3_full,
        series,
        auc_full: i3_auc(f_full, beta),
        derivative_at_full: i3_derivative(f_full, beta),
    })
}

fn defined(ratio: Result<f64, MetricError>) -> Result<Option<f64>, MetricError> {
    match ratio {
        Ok(v) => Ok(Some(v)),
        Err(MetricError::UndefinedRatio) => Ok(None),
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AucComparison {
    pub auc_a: f64,
    pub auc_b: f64,
    /// `auc_a - auc_b`.
    pub difference: f64,
    #[serde(serialize_with = "serialize_ordering")]
    pub ordering: Ordering,
}

fn serialize_ordering<S: serde::Serializer>(o: &Ordering, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(match o {
        Ordering::Less => "a<b",
        Ordering::Equal => "a=b",
        Ordering::Greater => "a>b",
    })
}

/// Compares two score curves by the area under each up to its own mass.
pub fn compare_auc(a: (FScore, Beta), b: (FScore, Beta)) -> AucComparison {
    let auc_a = i3_auc(a.0, a.1);
    let auc_b = i3_auc(b.0, b.1);
    AucComparison {
        auc_a,
        auc_b,
        difference: auc_a - auc_b,
        ordering: auc_a.total_cmp(&auc_b),
    }
}

/// `n` evenly spaced `(f, i3)` samples on `[0, f_max]`.
pub fn curve_points(beta: Beta, f_max: f64, n: usize) -> Result<Vec<(f64, f64)>, MetricError> {
    if n < 2 {
        return Err(MetricError::TooFewSamples(n));
    }
    if !(f_max.is_finite() && f_max > 0.0) {
        return Err(MetricError::InvalidCurveBound(f_max));
    }
    let last = (n - 1) as f64;
    Ok((0..n)
        .map(|i| {
            let f = if i == n - 1 { f_max } else { f_max * i as f64 / last };
            (f, compute_i3(FScore::new(f).expect("in range"), beta).value())
        })
        .collect())
}
