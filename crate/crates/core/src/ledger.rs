//! Article records, citation events, and the composite citation mass `f(x)`.
//!
//! `f(x)` is the impact factor of the publishing journal plus, for every
//! citing journal, the number of citations from it times its impact factor.
//! Citation counts are never stored; they are derived by grouping events.

use std::collections::{BTreeMap, HashMap};
use std::io::{Read, Write};

use chrono::{Datelike, Months, NaiveDate};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{canonical_name, Catalog, CatalogError};
use crate::metric::FScore;

pub const ARTICLES_HEADER: [&str; 3] = ["article_id", "journal", "publication_date"];
pub const CITATIONS_HEADER: [&str; 3] = ["article_id", "citing_journal", "citation_date"];

#[derive(Debug, Error)]
pub enum LedgerError {
    #[error("{file} header must be `{expected}`, found `{found}`")]
    BadHeader {
        file: &'static str,
        expected: String,
        found: String,
    },
    #[error("{file} line {line}: {message}")]
    Row {
        file: &'static str,
        line: u64,
        message: String,
    },
    #[error("{0} CSV: {1}")]
    Csv(&'static str, #[source] csv::Error),
}

#[derive(Debug, Error)]
pub enum ScoreError {
    #[error("unknown article `{0}`")]
    UnknownArticle(String),
    #[error("journals not found in catalog: {}", .0.join(", "))]
    UnresolvedJournals(Vec<String>),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error("{0}")]
    Metric(#[from] crate::metric::MetricError),
}

impl ScoreError {
    /// True when the failure comes from a journal or impact factor the
    /// catalog cannot supply, as opposed to a malformed request.
    pub fn is_resolution(&self) -> bool {
        matches!(
            self,
            ScoreError::UnresolvedJournals(_)
                | ScoreError::Catalog(CatalogError::UnknownJournal(_))
                | ScoreError::Catalog(CatalogError::UnknownCategory(_))
                | ScoreError::Catalog(CatalogError::YearBeforeHistory { .. })
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArticleRecord {
    pub id: String,
    pub journal: String,
    pub publication_date: NaiveDate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CitationEvent {
    pub article_id: String,
    pub citing_journal: String,
    pub date: NaiveDate,
}

/// Which impact factor a journal contributes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IfMode {
    /// The factor in force in the year of the event (publication or citation).
    Historical,
    /// The latest factor on record.
    #[default]
    Current,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ScoringOptions {
    pub if_mode: IfMode,
    /// Impact factor used for citing journals absent from the catalog.
    /// `None` makes such journals an error.
    pub fallback_if: Option<f64>,
}

impl ScoringOptions {
    pub fn with_mode(if_mode: IfMode) -> Self {
        Self {
            if_mode,
            fallback_if: None,
        }
    }
}

/// Outcome of comparing a truncated score against the full one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationCheck {
    pub years: u32,
    pub truncated: FScore,
    pub full: FScore,
}

impl TruncationCheck {
    pub fn holds(&self) -> bool {
        self.truncated.value() <= self.full.value()
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Ledger {
    articles: Vec<ArticleRecord>,
    index: HashMap<String, usize>,
    citations: Vec<Vec<CitationEvent>>,
}

/// `date` moved forward by whole years; Feb 29 lands on Feb 28 in common years.
pub fn shift_years(date: NaiveDate, years: u32) -> NaiveDate {
    date.checked_add_months(Months::new(years.saturating_mul(12)))
        .unwrap_or(NaiveDate::MAX)
}

fn check_header(
    file: &'static str,
    header: &csv::StringRecord,
    expected: &[&str],
) -> Result<(), LedgerError> {
    if header.iter().map(str::trim).ne(expected.iter().copied()) {
        return Err(LedgerError::BadHeader {
            file,
            expected: expected.join(","),
            found: header.iter().collect::<Vec<_>>().join(","),
        });
    }
    Ok(())
}

fn parse_date(field: &str) -> Result<NaiveDate, String> {
    NaiveDate::parse_from_str(field.trim(), "%Y-%m-%d")
        .map_err(|_| format!("malformed date `{field}` (expected YYYY-MM-DD)"))
}

impl Ledger {
    fn push_article(&mut self, article: ArticleRecord) -> Result<(), String> {
        if article.id.is_empty() {
            return Err("empty article_id".into());
        }
        if article.journal.is_empty() {
            return Err(format!("article `{}` has an empty journal", article.id));
        }
        if self.index.contains_key(&article.id) {
            return Err(format!("duplicate article_id `{}`", article.id));
        }
        self.index.insert(article.id.clone(), self.articles.len());
        self.articles.push(article);
        self.citations.push(Vec::new());
        Ok(())
    }

    fn push_citation(&mut self, citation: CitationEvent) -> Result<(), String> {
        let Some(&slot) = self.index.get(&citation.article_id) else {
            return Err(format!(
                "citation references unknown article `{}`",
                citation.article_id
            ));
        };
        if citation.citing_journal.is_empty() {
            return Err("empty citing_journal".into());
        }
        let published = self.articles[slot].publication_date;
        if citation.date < published {
            return Err(format!(
                "citation dated {} precedes publication of `{}` on {}",
                citation.date, citation.article_id, published
            ));
        }
        self.citations[slot].push(citation);
        Ok(())
    }

    fn sort_citations(&mut self) {
        for events in &mut self.citations {
            events.sort_by_key(|c| c.date);
        }
    }

    /// Loads articles and citations from their CSVs.
    pub fn load<A: Read, C: Read>(articles: A, citations: C) -> Result<Self, LedgerError> {
        const ARTICLES: &str = "articles";
        const CITATIONS: &str = "citations";
        let mut ledger = Ledger::default();

        let mut reader = csv::Reader::from_reader(articles);
        let header = reader.headers().map_err(|e| LedgerError::Csv(ARTICLES, e))?;
        check_header(ARTICLES, header, &ARTICLES_HEADER)?;
        for record in reader.records() {
            let record = record.map_err(|e| LedgerError::Csv(ARTICLES, e))?;
            let line = record.position().map_or(0, |p| p.line());
            let row = |message| LedgerError::Row {
                file: ARTICLES,
                line,
                message,
            };
            let article = ArticleRecord {
                id: record[0].trim().to_string(),
                journal: record[1].trim().to_string(),
                publication_date: parse_date(&record[2]).map_err(row)?,
            };
            ledger.push_article(article).map_err(row)?;
        }

        let mut reader = csv::Reader::from_reader(citations);
        let header = reader.headers().map_err(|e| LedgerError::Csv(CITATIONS, e))?;
        check_header(CITATIONS, header, &CITATIONS_HEADER)?;
        for record in reader.records() {
            let record = record.map_err(|e| LedgerError::Csv(CITATIONS, e))?;
            let line = record.position().map_or(0, |p| p.line());
            let row = |message| LedgerError::Row {
                file: CITATIONS,
                line,
                message,
            };
            let citation = CitationEvent {
                article_id: record[0].trim().to_string(),
                citing_journal: record[1].trim().to_string(),
                date: parse_date(&record[2]).map_err(row)?,
            };
            ledger.push_citation(citation).map_err(row)?;
        }

        ledger.sort_citations();
        Ok(ledger)
    }

    /// Builds a ledger from in-memory records with the same validation as
    /// [`Ledger::load`]; row numbers count records from 1.
    pub fn from_records(
        articles: impl IntoIterator<Item = ArticleRecord>,
        citations: impl IntoIterator<Item = CitationEvent>,
    ) -> Result<Self, LedgerError> {
        let mut ledger = Ledger::default();
        for (i, article) in articles.into_iter().enumerate() {
            ledger.push_article(article).map_err(|message| LedgerError::Row {
                file: "articles",
                line: i as u64 + 1,
                message,
            })?;
        }
        for (i, citation) in citations.into_iter().enumerate() {
            ledger.push_citation(citation).map_err(|message| LedgerError::Row {
                file: "citations",
                line: i as u64 + 1,
                message,
            })?;
        }
        ledger.sort_citations();
        Ok(ledger)
    }

    pub fn write_articles_csv<W: Write>(&self, sink: W) -> Result<(), csv::Error> {
        let mut writer = csv::Writer::from_writer(sink);
        writer.write_record(ARTICLES_HEADER)?;
        for a in &self.articles {
            writer.write_record([
                a.id.as_str(),
                a.journal.as_str(),
                &a.publication_date.to_string(),
            ])?;
        }
        writer.flush()?;
        Ok(())
    }

    /// Citations grouped by article (in article order), each group by date.
    pub fn write_citations_csv<W: Write>(&self, sink: W) -> Result<(), csv::Error> {
        let mut writer = csv::Writer::from_writer(sink);
        writer.write_record(CITATIONS_HEADER)?;
        for c in self.citations.iter().flatten() {
            writer.write_record([
                c.article_id.as_str(),
                c.citing_journal.as_str(),
                &c.date.to_string(),
            ])?;
        }
        writer.flush()?;
        Ok(())
    }

    pub fn articles(&self) -> &[ArticleRecord] {
        &self.articles
    }

    pub fn len(&self) -> usize {
        self.articles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.articles.is_empty()
    }

    pub fn article(&self, id: &str) -> Result<&ArticleRecord, ScoreError> {
        self.index
            .get(id)
            .map(|&i| &self.articles[i])
            .ok_or_else(|| ScoreError::UnknownArticle(id.to_string()))
    }

    /// Citations of `id`, sorted by date.
    pub fn citations(&self, id: &str) -> Result<&[CitationEvent], ScoreError> {
        self.index
            .get(id)
            .map(|&i| self.citations[i].as_slice())
            .ok_or_else(|| ScoreError::UnknownArticle(id.to_string()))
    }

    pub fn citation_count(&self, id: &str) -> Result<usize, ScoreError> {
        self.citations(id).map(<[_]>::len)
    }

    /// Composite citation mass of `article_id`.
    ///
    /// With `as_of = Some(t)`, only citations dated on or before the
    /// publication date shifted by `t` years count.
    pub fn f_score(
        &self,
        catalog: &Catalog,
        article_id: &str,
        as_of: Option<u32>,
        options: ScoringOptions,
    ) -> Result<FScore, ScoreError> {
        let article = self.article(article_id)?;
        let citations = self.citations(article_id)?;
        let year_of = |date: NaiveDate| match options.if_mode {
            IfMode::Historical => Some(date.year()),
            IfMode::Current => None,
        };

        if !catalog.contains_journal(&article.journal) {
            return Err(ScoreError::UnresolvedJournals(vec![article.journal.clone()]));
        }
        let publishing = catalog.impact_factor(&article.journal, year_of(article.publication_date))?;

        let cutoff = as_of.map(|t| shift_years(article.publication_date, t));
        // (canonical journal, lookup year) -> (display name, citation count)
        let mut groups: BTreeMap<(String, Option<i32>), (&str, u64)> = BTreeMap::new();
        for c in citations {
            if cutoff.is_some_and(|cut| c.date > cut) {
                // sorted by date: nothing later qualifies either
                break;
            }
            groups
                .entry((canonical_name(&c.citing_journal), year_of(c.date)))
                .or_insert((c.citing_journal.as_str(), 0))
                .1 += 1;
        }

        let mut total = publishing;
        let mut missing: Vec<String> = Vec::new();
        for ((key, year), (display, count)) in &groups {
            let impact = match catalog.impact_factor(key, *year) {
                Ok(v) => v,
                Err(CatalogError::UnknownJournal(_)) => match options.fallback_if {
                    Some(v) => v,
                    None => {
                        if !missing.iter().any(|m| canonical_name(m) == *key) {
                            missing.push(display.to_string());
                        }
                        continue;
                    }
                },
                Err(e) => return Err(e.into()),
            };
            total += *count as f64 * impact;
        }
        if !missing.is_empty() {
            return Err(ScoreError::UnresolvedJournals(missing));
        }
        Ok(FScore::new(total)?)
    }

    /// Checks that the score truncated at `years` never exceeds the full
    /// score (both in current impact-factor mode).
    pub fn validate_truncation(
        &self,
        catalog: &Catalog,
        article_id: &str,
        years: u32,
    ) -> Result<TruncationCheck, ScoreError> {
        let options = ScoringOptions::with_mode(IfMode::Current);
        Ok(TruncationCheck {
            years,
            truncated: self.f_score(catalog, article_id, Some(years), options)?,
            full: self.f_score(catalog, article_id, None, options)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CATALOG: &str = "category,journal,issn,year,impact_factor
Oncology,Home Journal,,2010,1.0
Oncology,Home Journal,,2015,2.0
Oncology,High Impact,,2015,5.0
Oncology,Low Impact,,2015,1.5
Oncology,Rising,,2015,1.0
Oncology,Rising,,2018,4.0
";

    fn catalog() -> Catalog {
        Catalog::load(CATALOG.as_bytes()).unwrap()
    }

    fn ledger(articles: &str, citations: &str) -> Result<Ledger, LedgerError> {
        Ledger::load(
            format!("article_id,journal,publication_date\n{articles}").as_bytes(),
            format!("article_id,citing_journal,citation_date\n{citations}").as_bytes(),
        )
    }

    fn current() -> ScoringOptions {
        ScoringOptions::default()
    }

    #[test]
    fn article_without_citations_scores_publishing_factor() {
        let l = ledger("A1,Home Journal,2015-06-01\n", "").unwrap();
        assert!(l.citations("A1").unwrap().is_empty());
        assert_eq!(l.f_score(&catalog(), "A1", None, current()).unwrap().value(), 2.0);
    }

    #[test]
    fn weighted_sum_of_citations() {
        let cites = "A1,High Impact,2016-01-01\nA1,High Impact,2016-02-01\nA1,high impact ,2017-01-01\n\
                     A1,Low Impact,2016-03-01\nA1,Low Impact,2018-01-01\n";
        let l = ledger("A1,Home Journal,2015-06-01\n", cites).unwrap();
        assert_eq!(l.f_score(&catalog(), "A1", None, current()).unwrap().value(), 20.0);
        assert_eq!(l.citation_count("A1").unwrap(), 5);
    }

    #[test]
    fn citation_before_publication_is_rejected() {
        let err = ledger("A1,Home Journal,2015-06-01\n", "A1,High Impact,2014-01-01\n").unwrap_err();
        match err {
            LedgerError::Row { file, line, message } => {
                assert_eq!((file, line), ("citations", 2));
                assert!(message.contains("precedes publication"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn orphan_and_duplicate_rows_are_rejected() {
        assert!(matches!(
            ledger("A1,Home Journal,2015-06-01\n", "B9,High Impact,2016-01-01\n"),
            Err(LedgerError::Row { file: "citations", .. })
        ));
        assert!(matches!(
            ledger("A1,Home Journal,2015-06-01\nA1,High Impact,2015-06-01\n", ""),
            Err(LedgerError::Row { file: "articles", line: 3, .. })
        ));
        assert!(matches!(
            ledger("A1,Home Journal,2015-13-01\n", ""),
            Err(LedgerError::Row { file: "articles", line: 2, .. })
        ));
        assert!(matches!(
            Ledger::load("id,journal,date\n".as_bytes(), "".as_bytes()),
            Err(LedgerError::BadHeader { file: "articles", .. })
        ));
    }

    #[test]
    fn thousand_citations_reach_the_calibration_mass() {
        let mut cites = String::new();
        for i in 0..1000 {
            cites.push_str(&format!("A1,Home Journal,2016-01-{:02}\n", i % 28 + 1));
        }
        let l = ledger("A1,Home Journal,2015-06-01\n", &cites).unwrap();
        assert_eq!(l.citation_count("A1").unwrap(), 1000);
        assert_eq!(l.f_score(&catalog(), "A1", None, current()).unwrap().value(), 2002.0);
    }

    #[test]
    fn citations_are_sorted_by_date() {
        let l = ledger(
            "A1,Home Journal,2015-06-01\n",
            "A1,Low Impact,2018-01-01\nA1,High Impact,2016-01-01\n",
        )
        .unwrap();
        let dates: Vec<_> = l.citations("A1").unwrap().iter().map(|c| c.date).collect();
        assert!(dates.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn truncation_uses_calendar_anniversaries() {
        let cites = "A1,High Impact,2016-06-01\nA1,High Impact,2016-06-02\nA1,Low Impact,2020-06-01\n";
        let l = ledger("A1,Home Journal,2015-06-01\n", cites).unwrap();
        let c = catalog();
        let at = |t| l.f_score(&c, "A1", Some(t), current()).unwrap().value();
        assert_eq!(at(0), 2.0);
        assert_eq!(at(1), 7.0);
        assert_eq!(at(2), 12.0);
        assert_eq!(at(5), 13.5);
        assert_eq!(at(50), l.f_score(&c, "A1", None, current()).unwrap().value());
    }

    #[test]
    fn leap_day_shifts_to_feb_28() {
        let d = NaiveDate::from_ymd_opt(2016, 2, 29).unwrap();
        assert_eq!(shift_years(d, 1), NaiveDate::from_ymd_opt(2017, 2, 28).unwrap());
        assert_eq!(shift_years(d, 4), d.with_year(2020).unwrap());
    }

    #[test]
    fn historical_mode_uses_event_years() {
        let cites = "A1,Rising,2016-01-01\nA1,Rising,2019-01-01\n";
        let l = ledger("A1,Home Journal,2012-06-01\n", cites).unwrap();
        let c = catalog();
        let hist = l
            .f_score(&c, "A1", None, ScoringOptions::with_mode(IfMode::Historical))
            .unwrap();
        // 1.0 (home, 2012 -> 2010 entry) + 1.0 (2016) + 4.0 (2019)
        assert_eq!(hist.value(), 6.0);
        assert_eq!(l.f_score(&c, "A1", None, current()).unwrap().value(), 2.0 + 8.0);
    }

    #[test]
    fn historical_lookup_before_history_is_a_resolution_error() {
        let l = ledger("A1,Home Journal,2012-06-01\n", "A1,Rising,2013-01-01\n").unwrap();
        let err = l
            .f_score(&catalog(), "A1", None, ScoringOptions::with_mode(IfMode::Historical))
            .unwrap_err();
        assert!(err.is_resolution());
        assert!(err.to_string().contains("2015"));
    }

    #[test]
    fn unknown_citing_journals_are_listed_or_defaulted() {
        let cites = "A1,Mystery,2016-01-01\nA1,Enigma,2016-01-01\nA1,mystery,2017-01-01\nA1,High Impact,2016-01-01\n";
        let l = ledger("A1,Home Journal,2015-06-01\n", cites).unwrap();
        match l.f_score(&catalog(), "A1", None, current()) {
            Err(ScoreError::UnresolvedJournals(names)) => assert_eq!(names, ["Enigma", "Mystery"]),
            other => panic!("unexpected {other:?}"),
        }
        let options = ScoringOptions {
            if_mode: IfMode::Current,
            fallback_if: Some(0.5),
        };
        assert_eq!(l.f_score(&catalog(), "A1", None, options).unwrap().value(), 2.0 + 1.5 + 5.0);
    }

    #[test]
    fn unknown_publishing_journal_and_article() {
        let l = ledger("A1,Nowhere,2015-06-01\n", "").unwrap();
        let err = l.f_score(&catalog(), "A1", None, current()).unwrap_err();
        assert!(err.is_resolution());
        let err = l.f_score(&catalog(), "ZZ", None, current()).unwrap_err();
        assert!(matches!(err, ScoreError::UnknownArticle(_)));
        assert!(!err.is_resolution());
    }

    #[test]
    fn truncation_check() {
        let cites = "A1,High Impact,2016-06-01\nA1,Low Impact,2020-06-01\n";
        let l = ledger("A1,Home Journal,2015-06-01\n", cites).unwrap();
        let c = catalog();
        let zero = l.validate_truncation(&c, "A1", 0).unwrap();
        assert!(zero.holds());
        assert_eq!(zero.truncated.value(), 2.0);
        let all = l.validate_truncation(&c, "A1", 10).unwrap();
        assert!(all.holds());
        assert_eq!(all.truncated, all.full);
    }

    #[test]
    fn csv_round_trip() {
        let l = ledger(
            "A1,Home Journal,2015-06-01\nA2,\"Journal, The\",2016-01-01\n",
            "A2,High Impact,2017-01-01\nA1,Low Impact,2018-01-01\nA1,High Impact,2016-01-01\n",
        )
        .unwrap();
        let (mut a, mut c) = (Vec::new(), Vec::new());
        l.write_articles_csv(&mut a).unwrap();
        l.write_citations_csv(&mut c).unwrap();
        assert_eq!(Ledger::load(a.as_slice(), c.as_slice()).unwrap(), l);
    }
}
