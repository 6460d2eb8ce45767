//! Closed-form Individual Impact Index arithmetic.
//!
//! The score of an article is `1 - e^(-beta * f)`, where `f` is the
//! impact-factor-weighted citation mass of the article and `beta` is a
//! category coefficient `1 / (3 * pi * phi)` with `phi` the number of journal
//! titles in the article's category. Everything here is a pure function of its
//! arguments.

use std::f64::consts::PI;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

/// `beta * phi` for every category: `1 / (3 * pi)`.
pub const LAMBDA: f64 = 1.0 / (3.0 * PI);

/// Largest `f64` strictly below one. Scores saturate here instead of rounding up to 1.
const I3_CEILING: f64 = 1.0 - f64::EPSILON / 2.0;

/// Below this `beta * f` the area integrand is evaluated by its Taylor series.
const SERIES_CUTOFF: f64 = 1e-2;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("category title count must be at least 1, got {0}")]
    ZeroPhi(u64),
    #[error("coefficient must be a positive finite number, got {0}")]
    InvalidBeta(f64),
    #[error("citation mass must be a non-negative finite number, got {0}")]
    NegativeScore(f64),
    #[error("target score must lie strictly between 0 and 1, got {0}")]
    TargetOutOfRange(f64),
    #[error("reference citation mass must be positive for calibration")]
    ZeroReference,
    #[error("truncated mass {truncated} exceeds full mass {full}")]
    TruncationExceedsFull { truncated: f64, full: f64 },
    #[error("ratio is undefined for an article with zero score")]
    UndefinedRatio,
    #[error("score must lie in [0, 1), got {0}")]
    InvalidScore(f64),
    #[error("at least two curve samples are required, got {0}")]
    TooFewSamples(usize),
    #[error("curve upper bound must be positive and finite, got {0}")]
    InvalidCurveBound(f64),
}

/// Category coefficient (the rate at which a score saturates).
///
/// Carries the title count it was derived from when there is one; calibrated
/// coefficients have none.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Beta {
    value: f64,
    phi: Option<u64>,
}

impl Beta {
    pub fn new(value: f64) -> Result<Self, MetricError> {
        if value.is_finite() && value > 0.0 {
            Ok(Self { value, phi: None })
        } else {
            Err(MetricError::InvalidBeta(value))
        }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn phi(&self) -> Option<u64> {
        self.phi
    }
}

impl fmt::Display for Beta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.value.fmt(f)
    }
}

/// Impact-factor-weighted citation mass of an article.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize)]
#[serde(transparent)]
pub struct FScore(f64);

impl FScore {
    pub const ZERO: FScore = FScore(0.0);

    pub fn new(value: f64) -> Result<Self, MetricError> {
        if value.is_finite() && value >= 0.0 {
            Ok(Self(value))
        } else {
            Err(MetricError::NegativeScore(value))
        }
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

/// An Individual Impact Index value in `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize)]
#[serde(transparent)]
pub struct I3Score(f64);

impl I3Score {
    pub fn new(value: f64) -> Result<Self, MetricError> {
        if (0.0..1.0).contains(&value) {
            Ok(Self(value))
        } else {
            Err(MetricError::InvalidScore(value))
        }
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

/// `1 / (3 * pi * phi)`.
pub fn compute_beta(phi: u64) -> Result<Beta, MetricError> {
    if phi == 0 {
        return Err(MetricError::ZeroPhi(phi));
    }
    Ok(Beta {
        value: 1.0 / (3.0 * PI * phi as f64),
        phi: Some(phi),
    })
}

/// `1 - e^(-beta * f)`, saturating just below one.
pub fn compute_i3(f: FScore, beta: Beta) -> I3Score {
    let raw = -(-beta.value * f.0).exp_m1();
    I3Score(raw.min(I3_CEILING))
}

/// Coefficient that places mass `f` at score `target`: `-ln(1 - target) / f`.
pub fn solve_beta(target: f64, f: FScore) -> Result<Beta, MetricError> {
    if !(target > 0.0 && target < 1.0) {
        return Err(MetricError::TargetOutOfRange(target));
    }
    if f.0 <= 0.0 {
        return Err(MetricError::ZeroReference);
    }
    Beta::new(-(-target).ln_1p() / f.0)
}

/// Slope of the score curve, `beta * e^(-beta * f)`.
pub fn i3_derivative(f: FScore, beta: Beta) -> f64 {
    beta.value * (-beta.value * f.0).exp()
}

/// Area under the score curve on `[0, f_upper]`: `F + (e^(-beta F) - 1) / beta`.
pub fn i3_auc(f_upper: FScore, beta: Beta) -> f64 {
    let x = beta.value * f_upper.0;
    // x + expm1(-x) loses every digit to cancellation when x is small
    let scaled = if x < SERIES_CUTOFF {
        let x2 = x * x;
        x2 * (0.5 - x / 6.0 + x2 / 24.0 - x2 * x / 120.0 + x2 * x2 / 720.0)
    } else {
        x + (-x).exp_m1()
    };
    scaled / beta.value
}

/// Ratio of areas under the score curve up to `t_score` and up to `f_full`.
///
/// Rejects `t_score > f_full`: a truncated history can never outweigh the full one.
pub fn cr_integral(t_score: FScore, f_full: FScore, beta: Beta) -> Result<f64, MetricError> {
    if t_score.0 > f_full.0 {
        return Err(MetricError::TruncationExceedsFull {
            truncated: t_score.0,
            full: f_full.0,
        });
    }
    area_ratio(t_score, f_full, beta)
}

/// Unchecked area ratio; may exceed one when the numerator mass is larger.
pub(crate) fn area_ratio(t_score: FScore, f_full: FScore, beta: Beta) -> Result<f64, MetricError> {
    let denominator = i3_auc(f_full, beta);
    if denominator <= 0.0 {
        return Err(MetricError::UndefinedRatio);
    }
    Ok(i3_auc(t_score, beta) / denominator)
}

/// `i3_t / i3_full`. Not clamped; callers decide how to treat values above one.
pub fn cr_simple(i3_t: I3Score, i3_full: I3Score) -> Result<f64, MetricError> {
    if i3_full.0 <= 0.0 {
        return Err(MetricError::UndefinedRatio);
    }
    Ok(i3_t.0 / i3_full.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(x: f64) -> FScore {
        FScore::new(x).unwrap()
    }

    fn b(x: f64) -> Beta {
        Beta::new(x).unwrap()
    }

    #[test]
    fn beta_matches_coefficient_table() {
        for (phi, expected) in [
            (61, 0.001739398),
            (209, 0.000507671),
            (150, 0.000707355),
            (253, 0.000419381),
            (1, 0.1061033),
        ] {
            let beta = compute_beta(phi).unwrap();
            assert!((beta.value() - expected).abs() < 1e-6, "phi={phi}");
            assert_eq!(beta.phi(), Some(phi));
        }
    }

    #[test]
    fn neurosciences_row_is_beta_of_253() {
        let b256 = compute_beta(256).unwrap().value();
        assert!((b256 - 0.000414467).abs() < 1e-8);
        assert!((compute_beta(253).unwrap().value() - 0.000419381).abs() < 1e-9);
    }

    #[test]
    fn zero_phi_is_rejected() {
        assert_eq!(compute_beta(0), Err(MetricError::ZeroPhi(0)));
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        assert!(FScore::new(-1.0).is_err());
        assert!(FScore::new(f64::NAN).is_err());
        assert!(Beta::new(0.0).is_err());
        assert!(Beta::new(-0.1).is_err());
        assert!(I3Score::new(1.0).is_err());
    }

    #[test]
    fn i3_examples() {
        assert_eq!(compute_i3(FScore::ZERO, b(0.3)).value(), 0.0);
        assert!((compute_i3(f(2000.0), b(0.00115129)).value() - 0.90).abs() < 1e-6);
        assert!((compute_i3(f(20.0), b(0.001739398)).value() - 0.034187).abs() < 1e-5);
        // an uncited article still carries its own journal's impact factor
        assert!((compute_i3(f(2.0), b(0.001)).value() - 0.001998).abs() < 1e-6);
    }

    #[test]
    fn i3_saturates_below_one() {
        let s = compute_i3(f(1e9), b(LAMBDA));
        assert!(s.value() < 1.0);
        assert!(s.value() > 0.999_999_999);
    }

    #[test]
    fn solve_beta_examples() {
        let beta = solve_beta(0.90, f(2000.0)).unwrap();
        assert!((beta.value() - 0.00115129).abs() < 1e-8);
        assert_eq!(beta.phi(), None);
        let p = 1.0 - (-1.0f64).exp();
        assert!((solve_beta(p, f(1000.0)).unwrap().value() - 0.001).abs() < 1e-8);
        assert!((solve_beta(0.5, f(1000.0)).unwrap().value() - 0.000693147).abs() < 1e-8);
    }

    #[test]
    fn solve_beta_errors() {
        assert_eq!(solve_beta(0.0, f(10.0)), Err(MetricError::TargetOutOfRange(0.0)));
        assert_eq!(solve_beta(1.0, f(10.0)), Err(MetricError::TargetOutOfRange(1.0)));
        assert_eq!(solve_beta(0.5, FScore::ZERO), Err(MetricError::ZeroReference));
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(i3_derivative(FScore::ZERO, b(0.00115)), 0.00115);
        assert!(i3_derivative(f(1e7), b(0.00115)) < 1e-12);
        assert!((i3_derivative(f(2000.0), b(0.00115129)) - 1.15129e-4).abs() < 1e-9);
    }

    #[test]
    fn auc_examples() {
        assert_eq!(i3_auc(FScore::ZERO, b(0.001)), 0.0);
        assert!((i3_auc(f(2000.0), b(0.00115129)) - 1218.27).abs() < 0.01);
    }

    #[test]
    fn auc_small_argument_is_accurate() {
        // x^2 / 2 - x^3 / 6 leading behaviour
        let beta = b(1e-9);
        let area = i3_auc(f(1.0), beta);
        let expected = 1e-9 / 2.0;
        assert!(((area - expected) / expected).abs() < 1e-8);
        // both branches agree at the cutoff
        let x = SERIES_CUTOFF;
        let series = i3_auc(f(x * (1.0 - 1e-12)), b(1.0));
        let direct = x + (-x).exp_m1();
        assert!(((series - direct) / direct).abs() < 1e-10);
    }

    #[test]
    fn cr_integral_examples() {
        let beta = b(0.00115129);
        assert_eq!(cr_integral(f(2000.0), f(2000.0), beta).unwrap(), 1.0);
        assert!((cr_integral(f(1000.0), f(2000.0), beta).unwrap() - 0.33332).abs() < 1e-4);
        let beta = b(100.0 / 4000.0);
        assert!((cr_integral(f(1000.0), f(4000.0), beta).unwrap() - 0.25).abs() < 0.01);
    }

    #[test]
    fn cr_integral_rejects_inconsistent_ledger() {
        assert!(matches!(
            cr_integral(f(3.0), f(2.0), b(0.1)),
            Err(MetricError::TruncationExceedsFull { .. })
        ));
        assert_eq!(cr_integral(FScore::ZERO, FScore::ZERO, b(0.1)), Err(MetricError::UndefinedRatio));
    }

    #[test]
    fn cr_simple_examples() {
        let full = I3Score::new(0.9).unwrap();
        assert_eq!(cr_simple(full, full).unwrap(), 1.0);
        assert_eq!(cr_simple(I3Score::default(), full).unwrap(), 0.0);
        let part = I3Score::new(0.683772).unwrap();
        assert!((cr_simple(part, full).unwrap() - 0.759747).abs() < 1e-5);
        assert_eq!(cr_simple(part, I3Score::default()), Err(MetricError::UndefinedRatio));
    }
}
