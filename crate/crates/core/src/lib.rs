//! Individual Impact Index (i3) scoring engine.
//!
//! An article's i3 is `1 - e^(-beta * f)`: `f` weighs the publishing journal's
//! impact factor and every citation by the impact factor of the journal it
//! appears in, and `beta = 1 / (3 * pi * phi)` depends on the number of titles
//! `phi` in the publishing journal's category.
//!
//! - [`metric`]: closed-form score, coefficient, derivative, area and ratios.
//! - [`catalog`]: journal catalog with categories and impact-factor histories.
//! - [`ledger`]: articles, citation events and the composite mass `f`.
//! - [`dynamics`]: yearly series, citation ratios and curve comparisons.
//! - [`ranking`]: ranking, percentile references and citation-rank contrast.
//! - [`synth`]: seeded synthetic corpora.

pub mod catalog;
pub mod dynamics;
pub mod ledger;
pub mod metric;
pub mod ranking;
pub mod synth;

pub use catalog::{Catalog, CatalogError, CatalogStats, CategoryStats, JournalRecord};
pub use dynamics::{
    compare_auc, curve_points, dynamics_report, AucComparison, DynamicsError, DynamicsReport,
    DynamicsRow,
};
pub use ledger::{
    ArticleRecord, CitationEvent, IfMode, Ledger, LedgerError, ScoreError, ScoringOptions,
    TruncationCheck,
};
pub use metric::{
    compute_beta, compute_i3, cr_integral, cr_simple, i3_auc, i3_derivative, solve_beta, Beta,
    FScore, I3Score, MetricError, LAMBDA,
};
pub use ranking::{
    matthew_comparison, percentile_table, rank, score_all, score_article, MatthewSummary,
    PercentileTable, RankingError, ScoreReport, ScoredArticle,
};
pub use synth::{generate, GeneratorConfig, GeneratorError, SyntheticCorpus};
