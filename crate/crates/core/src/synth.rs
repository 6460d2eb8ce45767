//! Seeded synthetic corpora: a catalog, articles, and citations that satisfy
//! every load-time invariant by construction.
//!
//! Citations are assigned by preferential attachment (an article is cited
//! with probability proportional to one plus the citations it already has),
//! which yields the heavy-tailed counts of real citation data. Impact factors
//! are stratified so the mean current impact factor is 2.0.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use chrono::{Days, NaiveDate};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::catalog::{Catalog, CatalogError, JournalRecord};
use crate::ledger::{ArticleRecord, CitationEvent, Ledger, LedgerError};

pub const CATALOG_FILE: &str = "catalog.csv";
pub const ARTICLES_FILE: &str = "articles.csv";
pub const CITATIONS_FILE: &str = "citations.csv";

#[derive(Debug, Error)]
pub enum GeneratorError {
    #[error("article count must be at least 1")]
    NoArticles,
    #[error("category count must be at least 1")]
    NoCategories,
    #[error("invalid generator settings: {0}")]
    Settings(String),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Ledger(#[from] LedgerError),
    #[error("writing corpus: {0}")]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    pub articles: usize,
    pub categories: usize,
    pub seed: u64,
    /// Average citations per article.
    pub mean_citations: f64,
    /// Inclusive range of titles per category.
    pub titles_per_category: (usize, usize),
    /// Mean of the latest impact factor over all journals.
    pub mean_impact_factor: f64,
    pub first_year: i32,
    pub last_publication_year: i32,
    pub last_year: i32,
}

impl GeneratorConfig {
    pub fn new(articles: usize, categories: usize, seed: u64) -> Self {
        Self {
            articles,
            categories,
            seed,
            mean_citations: 8.0,
            titles_per_category: (3, 40),
            mean_impact_factor: 2.0,
            first_year: 2010,
            last_publication_year: 2020,
            last_year: 2024,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticCorpus {
    pub catalog: Catalog,
    pub ledger: Ledger,
}

impl SyntheticCorpus {
    /// Writes `catalog.csv`, `articles.csv` and `citations.csv` into `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<(), GeneratorError> {
        std::fs::create_dir_all(dir)?;
        let mut out = BufWriter::new(File::create(dir.join(CATALOG_FILE))?);
        self.catalog.write_csv(&mut out)?;
        out.flush()?;
        let mut out = BufWriter::new(File::create(dir.join(ARTICLES_FILE))?);
        self.ledger.write_articles_csv(&mut out).map_err(io::Error::from)?;
        out.flush()?;
        let mut out = BufWriter::new(File::create(dir.join(CITATIONS_FILE))?);
        self.ledger.write_citations_csv(&mut out).map_err(io::Error::from)?;
        out.flush()?;
        Ok(())
    }
}

fn round3(x: f64) -> f64 {
    (x * 1000.0).round() / 1000.0
}

fn date(year: i32, month: u32, day: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(year, month, day).expect("valid calendar date")
}

pub fn generate(config: &GeneratorConfig) -> Result<SyntheticCorpus, GeneratorError> {
    if config.articles == 0 {
        return Err(GeneratorError::NoArticles);
    }
    if config.categories == 0 {
        return Err(GeneratorError::NoCategories);
    }
    let (min_titles, max_titles) = config.titles_per_category;
    if min_titles == 0 || min_titles > max_titles {
        return Err(GeneratorError::Settings(format!(
            "titles per category range {min_titles}..={max_titles}"
        )));
    }
    if !(config.first_year <= config.last_publication_year
        && config.last_publication_year <= config.last_year)
    {
        return Err(GeneratorError::Settings("year range out of order".into()));
    }
    if !(config.mean_citations >= 0.0 && config.mean_impact_factor > 0.0) {
        return Err(GeneratorError::Settings("negative means".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut titles: Vec<(usize, usize)> = Vec::new();
    for c in 0..config.categories {
        let phi = rng.random_range(min_titles..=max_titles);
        titles.extend((0..phi).map(|j| (c, j)));
    }
    let n_journals = titles.len();
    // stratified current factors with the requested mean, randomly assigned
    let mut latest: Vec<f64> = (0..n_journals)
        .map(|j| 2.0 * config.mean_impact_factor * (j as f64 + 0.5) / n_journals as f64)
        .collect();
    latest.shuffle(&mut rng);

    let span = (config.last_year - config.first_year).max(1) as f64;
    let mut journal_names = Vec::with_capacity(n_journals);
    let mut records = Vec::with_capacity(n_journals);
    for (&(c, j), &current) in titles.iter().zip(&latest) {
        let name = format!("Journal {:03}-{:03}", c + 1, j + 1);
        let mut if_history = BTreeMap::new();
        for year in config.first_year..=config.last_year {
            let value = if year == config.last_year {
                current
            } else {
                let trend = 0.6 + 0.4 * f64::from(year - config.first_year) / span;
                current * trend * rng.random_range(0.9..1.1)
            };
            if_history.insert(year, round3(value).max(0.001));
        }
        records.push(JournalRecord {
            name: name.clone(),
            issn: None,
            category: format!("Category {:03}", c + 1),
            if_history,
        });
        journal_names.push(name);
    }
    let catalog = Catalog::from_records(records)?;

    let first_day = date(config.first_year, 1, 1);
    let last_publication = date(config.last_publication_year, 12, 31);
    let last_day = date(config.last_year, 12, 31);
    let publication_days = (last_publication - first_day).num_days() as u64;

    let articles: Vec<ArticleRecord> = (0..config.articles)
        .map(|i| ArticleRecord {
            id: format!("A{:06}", i + 1),
            journal: journal_names[rng.random_range(0..n_journals)].clone(),
            publication_date: first_day + Days::new(rng.random_range(0..=publication_days)),
        })
        .collect();

    let total = (config.articles as f64 * config.mean_citations).round() as usize;
    let mut urn: Vec<usize> = (0..config.articles).collect();
    urn.reserve(total);
    let mut citations = Vec::with_capacity(total);
    for _ in 0..total {
        let target = urn[rng.random_range(0..urn.len())];
        urn.push(target);
        let article = &articles[target];
        let window = (last_day - article.publication_date).num_days() as u64;
        citations.push(CitationEvent {
            article_id: article.id.clone(),
            citing_journal: journal_names[rng.random_range(0..n_journals)].clone(),
            date: article.publication_date + Days::new(rng.random_range(0..=window)),
        });
    }

    let ledger = Ledger::from_records(articles, citations)?;
    Ok(SyntheticCorpus { catalog, ledger })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ledger::{IfMode, ScoringOptions};

    #[test]
    fn same_seed_same_corpus() {
        let config = GeneratorConfig::new(50, 3, 7);
        assert_eq!(generate(&config).unwrap(), generate(&config).unwrap());
        let other = GeneratorConfig::new(50, 3, 8);
        assert_ne!(generate(&config).unwrap(), generate(&other).unwrap());
    }

    #[test]
    fn corpus_satisfies_invariants() {
        let corpus = generate(&GeneratorConfig::new(100, 5, 42)).unwrap();
        assert_eq!(corpus.catalog.categories().count(), 5);
        for category in corpus.catalog.categories() {
            assert!(corpus.catalog.phi(category).unwrap() >= 1);
        }
        assert_eq!(corpus.ledger.len(), 100);
        let total: usize = corpus
            .ledger
            .articles()
            .iter()
            .map(|a| corpus.ledger.citation_count(&a.id).unwrap())
            .sum();
        assert_eq!(total, 800);
        for mode in [IfMode::Current, IfMode::Historical] {
            for a in corpus.ledger.articles() {
                corpus
                    .ledger
                    .f_score(&corpus.catalog, &a.id, None, ScoringOptions::with_mode(mode))
                    .unwrap();
            }
        }
    }

    #[test]
    fn mean_impact_factor_is_tuned() {
        for seed in [1, 2, 3] {
            let corpus = generate(&GeneratorConfig::new(10, 5, seed)).unwrap();
            let stats = corpus.catalog.stats().unwrap();
            assert!((stats.mean_if - 2.0).abs() < 0.1, "seed {seed}: {}", stats.mean_if);
        }
    }

    #[test]
    fn rejects_empty_requests() {
        assert!(matches!(generate(&GeneratorConfig::new(0, 1, 1)), Err(GeneratorError::NoArticles)));
        assert!(matches!(generate(&GeneratorConfig::new(1, 0, 1)), Err(GeneratorError::NoCategories)));
    }
}
