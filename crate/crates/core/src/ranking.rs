//! Scoring whole ledgers, ranking articles, percentile references per
//! category, and the comparison of score ranks against raw citation ranks.

use std::cmp::Ordering;

use serde::Serialize;
use thiserror::Error;

use crate::catalog::Catalog;
use crate::ledger::{Ledger, ScoreError, ScoringOptions};
use crate::metric::{compute_i3, i3_auc, Beta, FScore};

/// Scores closer than this are treated as tied and ordered by area instead.
pub const I3_TIE_TOLERANCE: f64 = 1e-12;

/// Percentiles reported by [`percentile_table`].
pub const PERCENTILES: [u8; 5] = [50, 75, 90, 95, 99];

/// Smallest category sample [`percentile_table`] accepts.
pub const MIN_PERCENTILE_SAMPLE: usize = 20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RankingError {
    #[error("no scored articles in category `{0}`")]
    UnknownCategory(String),
    #[error("category `{category}` has {found} scored articles; percentiles need at least {required}")]
    InsufficientSample {
        category: String,
        found: usize,
        required: usize,
    },
    #[error("rank comparison needs at least two articles, got {0}")]
    TooFewArticles(usize),
}

/// A scored article before ranking.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoredArticle {
    pub article_id: String,
    pub category: String,
    pub phi: u64,
    pub beta: f64,
    pub f_score: f64,
    pub i3: f64,
    #[serde(rename = "citations")]
    pub citation_count: usize,
}

impl ScoredArticle {
    /// Area under the article's score curve up to its own mass.
    pub fn auc(&self) -> f64 {
        match (FScore::new(self.f_score), Beta::new(self.beta)) {
            (Ok(f), Ok(b)) => i3_auc(f, b),
            _ => 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreReport {
    pub article_id: String,
    pub category: String,
    pub phi: u64,
    pub beta: f64,
    pub f_score: f64,
    pub i3: f64,
    #[serde(rename = "citations")]
    pub citation_count: usize,
    pub rank_i3: usize,
    pub rank_citations: usize,
}

/// Scores one article against its publishing journal's category.
pub fn score_article(
    ledger: &Ledger,
    catalog: &Catalog,
    article_id: &str,
    as_of: Option<u32>,
    options: ScoringOptions,
) -> Result<ScoredArticle, ScoreError> {
    let article = ledger.article(article_id)?;
    let journal = catalog
        .journal(&article.journal)
        .map_err(|_| ScoreError::UnresolvedJournals(vec![article.journal.clone()]))?;
    let phi = catalog.phi(&journal.category)?;
    let beta = catalog.beta_for(&journal.category)?;
    let f = ledger.f_score(catalog, article_id, as_of, options)?;
    let citation_count = match as_of {
        None => ledger.citation_count(article_id)?,
        Some(t) => {
            let cutoff = crate::ledger::shift_years(article.publication_date, t);
            ledger
                .citations(article_id)?
                .iter()
                .filter(|c| c.date <= cutoff)
                .count()
        }
    };
    Ok(ScoredArticle {
        article_id: article.id.clone(),
        category: journal.category.clone(),
        phi,
        beta: beta.value(),
        f_score: f.value(),
        i3: compute_i3(f, beta).value(),
        citation_count,
    })
}

/// Scores every article of the ledger, in ledger order.
pub fn score_all(
    ledger: &Ledger,
    catalog: &Catalog,
    as_of: Option<u32>,
    options: ScoringOptions,
) -> Result<Vec<ScoredArticle>, ScoreError> {
    ledger
        .articles()
        .iter()
        .map(|a| score_article(ledger, catalog, &a.id, as_of, options))
        .collect()
}

/// Order among articles whose scores are tied: larger area first, then more
/// citations, then article id.
fn tie_break(a: &(ScoredArticle, f64), b: &(ScoredArticle, f64)) -> Ordering {
    b.1.total_cmp(&a.1)
        .then_with(|| b.0.citation_count.cmp(&a.0.citation_count))
        .then_with(|| a.0.article_id.cmp(&b.0.article_id))
        .then_with(|| a.0.category.cmp(&b.0.category))
        .then_with(|| b.0.f_score.total_cmp(&a.0.f_score))
}

fn citation_order(a: &ScoredArticle, b: &ScoredArticle) -> Ordering {
    b.citation_count
        .cmp(&a.citation_count)
        .then_with(|| a.article_id.cmp(&b.article_id))
}

/// Ranks articles by descending score.
///
/// Scores within [`I3_TIE_TOLERANCE`] of their neighbour form a tie group,
/// which is ordered by area under the curve, then citation count, then id.
/// Grouping depends only on the set of scores, so the output does not depend
/// on input order. The returned reports are in `rank_i3` order.
pub fn rank(articles: Vec<ScoredArticle>) -> Vec<ScoreReport> {
    let mut keyed: Vec<(ScoredArticle, f64)> = articles
        .into_iter()
        .map(|a| {
            let auc = a.auc();
            (a, auc)
        })
        .collect();
    keyed.sort_by(|a, b| b.0.i3.total_cmp(&a.0.i3).then_with(|| tie_break(a, b)));

    let mut start = 0;
    while start < keyed.len() {
        let mut end = start + 1;
        while end < keyed.len() && keyed[end - 1].0.i3 - keyed[end].0.i3 <= I3_TIE_TOLERANCE {
            end += 1;
        }
        keyed[start..end].sort_by(tie_break);
        start = end;
    }

    let mut by_citations: Vec<usize> = (0..keyed.len()).collect();
    by_citations.sort_by(|&a, &b| citation_order(&keyed[a].0, &keyed[b].0));
    let mut citation_rank = vec![0; keyed.len()];
    for (position, &index) in by_citations.iter().enumerate() {
        citation_rank[index] = position + 1;
    }

    keyed
        .into_iter()
        .enumerate()
        .map(|(i, (a, _))| ScoreReport {
            article_id: a.article_id,
            category: a.category,
            phi: a.phi,
            beta: a.beta,
            f_score: a.f_score,
            i3: a.i3,
            citation_count: a.citation_count,
            rank_i3: i + 1,
            rank_citations: citation_rank[i],
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PercentileThreshold {
    pub percentile: u8,
    pub i3: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PercentileTable {
    pub category: String,
    pub sample_size: usize,
    pub thresholds: Vec<PercentileThreshold>,
}

/// Nearest-rank value of the `p`-th percentile of an ascending slice.
pub fn nearest_rank(sorted: &[f64], p: u8) -> f64 {
    let n = sorted.len();
    let rank = (usize::from(p) * n).div_ceil(100).max(1);
    sorted[rank - 1]
}

/// Reference score thresholds for one category (nearest-rank quantiles).
pub fn percentile_table(
    reports: &[ScoreReport],
    category: &str,
) -> Result<PercentileTable, RankingError> {
    let mut scores: Vec<f64> = reports
        .iter()
        .filter(|r| r.category == category)
        .map(|r| r.i3)
        .collect();
    if scores.is_empty() {
        return Err(RankingError::UnknownCategory(category.to_string()));
    }
    if scores.len() < MIN_PERCENTILE_SAMPLE {
        return Err(RankingError::InsufficientSample {
            category: category.to_string(),
            found: scores.len(),
            required: MIN_PERCENTILE_SAMPLE,
        });
    }
    scores.sort_by(f64::total_cmp);
    Ok(PercentileTable {
        category: category.to_string(),
        sample_size: scores.len(),
        thresholds: PERCENTILES
            .iter()
            .map(|&p| PercentileThreshold {
                percentile: p,
                i3: nearest_rank(&scores, p),
            })
            .collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Displacement {
    pub article_id: String,
    pub rank_i3: usize,
    pub rank_citations: usize,
    /// `rank_citations - rank_i3`; positive when the score ranks the article higher.
    pub shift: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatthewSummary {
    pub i3_order: Vec<String>,
    pub citation_order: Vec<String>,
    pub displacements: Vec<Displacement>,
    /// Articles ranked strictly better by score than by raw citations.
    pub promoted: usize,
    /// Articles whose two ranks differ.
    pub divergence: usize,
}

/// Contrasts score ranks with raw citation-count ranks of the same reports.
pub fn matthew_comparison(reports: &[ScoreReport]) -> Result<MatthewSummary, RankingError> {
    if reports.len() < 2 {
        return Err(RankingError::TooFewArticles(reports.len()));
    }
    let mut by_i3: Vec<&ScoreReport> = reports.iter().collect();
    by_i3.sort_by_key(|r| r.rank_i3);
    let mut by_citations: Vec<&ScoreReport> = reports.iter().collect();
    by_citations.sort_by_key(|r| r.rank_citations);

    let displacements: Vec<Displacement> = by_i3
        .iter()
        .map(|r| Displacement {
            article_id: r.article_id.clone(),
            rank_i3: r.rank_i3,
            rank_citations: r.rank_citations,
            shift: r.rank_citations as i64 - r.rank_i3 as i64,
        })
        .collect();
    Ok(MatthewSummary {
        i3_order: by_i3.iter().map(|r| r.article_id.clone()).collect(),
        citation_order: by_citations.iter().map(|r| r.article_id.clone()).collect(),
        promoted: displacements.iter().filter(|d| d.shift > 0).count(),
        divergence: displacements.iter().filter(|d| d.shift != 0).count(),
        displacements,
    })
}
