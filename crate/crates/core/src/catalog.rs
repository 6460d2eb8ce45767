//! Journal catalog: category membership and impact-factor histories.
//!
//! The catalog is read from a CSV with header
//! `category,journal,issn,year,impact_factor`, one row per journal-year.
//! Journals are keyed by a canonical form of their name (trimmed, case-folded);
//! ISSN is carried as metadata and never used for lookups.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};

use serde::Serialize;
use thiserror::Error;

use crate::metric::{compute_beta, Beta};

pub const CATALOG_HEADER: [&str; 5] = ["category", "journal", "issn", "year", "impact_factor"];

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("catalog header must be `{}`, found `{found}`", CATALOG_HEADER.join(","))]
    BadHeader { found: String },
    #[error("catalog line {line}: {message}")]
    Row { line: u64, message: String },
    #[error("catalog CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("unknown journal `{0}`")]
    UnknownJournal(String),
    #[error("unknown category `{0}`")]
    UnknownCategory(String),
    #[error("journal `{journal}` has no impact factor for {year} or earlier (earliest is {earliest})")]
    YearBeforeHistory {
        journal: String,
        year: i32,
        earliest: i32,
    },
    #[error("catalog is empty")]
    Empty,
}

/// Canonical lookup key for a journal name.
pub fn canonical_name(name: &str) -> String {
    name.trim().to_lowercase()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JournalRecord {
    pub name: String,
    pub issn: Option<String>,
    pub category: String,
    pub if_history: BTreeMap<i32, f64>,
}

impl JournalRecord {
    pub fn latest_impact_factor(&self) -> f64 {
        // a record is only built from at least one row
        *self.if_history.values().next_back().expect("non-empty history")
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Catalog {
    journals: BTreeMap<String, JournalRecord>,
    categories: BTreeMap<String, BTreeSet<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CategoryStats {
    pub category: String,
    pub phi: u64,
    pub beta: f64,
    pub mean_if: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CatalogStats {
    pub categories: Vec<CategoryStats>,
    /// Mean of each journal's latest impact factor.
    pub mean_if: f64,
    /// Mean number of titles per category.
    pub mean_phi: f64,
    pub journal_count: usize,
}

fn row_error(line: u64, message: impl Into<String>) -> CatalogError {
    CatalogError::Row {
        line,
        message: message.into(),
    }
}

fn valid_issn(issn: &str) -> bool {
    let b = issn.as_bytes();
    b.len() == 9
        && b[..4].iter().all(u8::is_ascii_digit)
        && b[4] == b'-'
        && b[5..8].iter().all(u8::is_ascii_digit)
        && (b[8].is_ascii_digit() || b[8] == b'X' || b[8] == b'x')
}

fn parse_year(field: &str) -> Option<i32> {
    let field = field.trim();
    if field.len() == 4 && field.bytes().all(|c| c.is_ascii_digit()) {
        field.parse().ok()
    } else {
        None
    }
}

impl Catalog {
    /// Loads and validates a catalog CSV.
    pub fn load<R: Read>(source: R) -> Result<Self, CatalogError> {
        let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(source);
        let header = reader.headers()?.clone();
        if header.iter().map(str::trim).ne(CATALOG_HEADER.iter().copied()) {
            return Err(CatalogError::BadHeader {
                found: header.iter().collect::<Vec<_>>().join(","),
            });
        }

        let mut catalog = Catalog::default();
        for record in reader.records() {
            let record = record?;
            let line = record.position().map_or(0, |p| p.line());
            let category = record[0].trim();
            let name = record[1].trim();
            let issn = record[2].trim();
            if category.is_empty() {
                return Err(row_error(line, "empty category"));
            }
            if name.is_empty() {
                return Err(row_error(line, "empty journal name"));
            }
            if !issn.is_empty() && !valid_issn(issn) {
                return Err(row_error(line, format!("malformed ISSN `{issn}`")));
            }
            let year = parse_year(&record[3])
                .ok_or_else(|| row_error(line, format!("malformed year `{}`", &record[3])))?;
            let impact: f64 = record[4]
                .trim()
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite() && *v >= 0.0)
                .ok_or_else(|| {
                    row_error(line, format!("malformed impact factor `{}`", &record[4]))
                })?;

            let key = canonical_name(name);
            let journal = catalog.journals.entry(key.clone()).or_insert_with(|| JournalRecord {
                name: name.to_string(),
                issn: None,
                category: category.to_string(),
                if_history: BTreeMap::new(),
            });
            if journal.category != category {
                return Err(row_error(
                    line,
                    format!(
                        "journal `{name}` listed under `{category}` and `{}`",
                        journal.category
                    ),
                ));
            }
            if !issn.is_empty() {
                match &journal.issn {
                    Some(existing) if existing != issn => {
                        return Err(row_error(
                            line,
                            format!("journal `{name}` has conflicting ISSNs `{existing}` and `{issn}`"),
                        ));
                    }
                    _ => journal.issn = Some(issn.to_string()),
                }
            }
            match journal.if_history.get(&year) {
                Some(&existing) if existing != impact => {
                    return Err(row_error(
                        line,
                        format!(
                            "journal `{name}` year {year} has conflicting impact factors {existing} and {impact}"
                        ),
                    ));
                }
                _ => {
                    journal.if_history.insert(year, impact);
                }
            }
            catalog
                .categories
                .entry(category.to_string())
                .or_default()
                .insert(key);
        }
        Ok(catalog)
    }

    /// Builds a catalog from complete journal records.
    pub fn from_records(
        records: impl IntoIterator<Item = JournalRecord>,
    ) -> Result<Self, CatalogError> {
        let mut catalog = Catalog::default();
        for (i, record) in records.into_iter().enumerate() {
            let line = i as u64 + 1;
            if record.if_history.is_empty() {
                return Err(row_error(line, format!("journal `{}` has no impact factors", record.name)));
            }
            if record.if_history.values().any(|v| !(v.is_finite() && *v >= 0.0)) {
                return Err(row_error(line, format!("journal `{}` has an invalid impact factor", record.name)));
            }
            let key = canonical_name(&record.name);
            if catalog.journals.contains_key(&key) {
                return Err(row_error(line, format!("duplicate journal `{}`", record.name)));
            }
            catalog
                .categories
                .entry(record.category.clone())
                .or_default()
                .insert(key.clone());
            catalog.journals.insert(key, record);
        }
        Ok(catalog)
    }

    /// Writes the catalog back out in the loadable CSV layout, rows ordered by
    /// category, journal key, then year.
    pub fn write_csv<W: Write>(&self, sink: W) -> Result<(), CatalogError> {
        let mut writer = csv::Writer::from_writer(sink);
        writer.write_record(CATALOG_HEADER)?;
        for members in self.categories.values() {
            for key in members {
                let journal = &self.journals[key];
                for (year, impact) in &journal.if_history {
                    writer.write_record([
                        journal.category.as_str(),
                        journal.name.as_str(),
                        journal.issn.as_deref().unwrap_or(""),
                        &year.to_string(),
                        &impact.to_string(),
                    ])?;
                }
            }
        }
        writer.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        self.journals.is_empty()
    }

    pub fn journals(&self) -> impl Iterator<Item = &JournalRecord> {
        self.journals.values()
    }

    pub fn categories(&self) -> impl Iterator<Item = &str> {
        self.categories.keys().map(String::as_str)
    }

    pub fn journal(&self, name: &str) -> Result<&JournalRecord, CatalogError> {
        self.journals
            .get(&canonical_name(name))
            .ok_or_else(|| CatalogError::UnknownJournal(name.trim().to_string()))
    }

    pub fn contains_journal(&self, name: &str) -> bool {
        self.journals.contains_key(&canonical_name(name))
    }

    /// Number of journal titles in `category`.
    pub fn phi(&self, category: &str) -> Result<u64, CatalogError> {
        self.categories
            .get(category.trim())
            .map(|members| members.len() as u64)
            .ok_or_else(|| CatalogError::UnknownCategory(category.trim().to_string()))
    }

    pub fn beta_for(&self, category: &str) -> Result<Beta, CatalogError> {
        let phi = self.phi(category)?;
        // categories exist only with at least one member
        Ok(compute_beta(phi).expect("phi >= 1"))
    }

    /// Impact factor of `journal` for the latest history year not after
    /// `year`, or the latest entry overall when `year` is `None`.
    pub fn impact_factor(&self, journal: &str, year: Option<i32>) -> Result<f64, CatalogError> {
        let record = self.journal(journal)?;
        match year {
            None => Ok(record.latest_impact_factor()),
            Some(year) => record
                .if_history
                .range(..=year)
                .next_back()
                .map(|(_, &v)| v)
                .ok_or_else(|| CatalogError::YearBeforeHistory {
                    journal: record.name.clone(),
                    year,
                    earliest: *record.if_history.keys().next().expect("non-empty history"),
                }),
        }
    }

    /// Per-category title counts, coefficients and mean impact factors, with
    /// global means over categories (phi) and journals (impact factor).
    pub fn stats(&self) -> Result<CatalogStats, CatalogError> {
        if self.is_empty() {
            return Err(CatalogError::Empty);
        }
        let categories: Vec<CategoryStats> = self
            .categories
            .iter()
            .map(|(category, members)| {
                let phi = members.len() as u64;
                let total: f64 = members
                    .iter()
                    .map(|key| self.journals[key].latest_impact_factor())
                    .sum();
                CategoryStats {
                    category: category.clone(),
                    phi,
                    beta: compute_beta(phi).expect("phi >= 1").value(),
                    mean_if: total / phi as f64,
                }
            })
            .collect();
        let journal_count = self.journals.len();
        let mean_if = self
            .journals
            .values()
            .map(JournalRecord::latest_impact_factor)
            .sum::<f64>()
            / journal_count as f64;
        let mean_phi = journal_count as f64 / categories.len() as f64;
        Ok(CatalogStats {
            categories,
            mean_if,
            mean_phi,
            journal_count,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::LAMBDA;

    fn load(text: &str) -> Result<Catalog, CatalogError> {
        Catalog::load(text.as_bytes())
    }

    const HEADER: &str = "category,journal,issn,year,impact_factor\n";

    fn category_fixture(category: &str, n: usize) -> String {
        let mut text = HEADER.to_string();
        for i in 0..n {
            text.push_str(&format!("{category},Journal {i},,2015,1.0\n"));
        }
        text
    }

    #[test]
    fn header_only_is_empty() {
        let catalog = load(HEADER).unwrap();
        assert!(catalog.is_empty());
        assert!(matches!(catalog.phi("Immunology"), Err(CatalogError::UnknownCategory(_))));
        assert!(matches!(
            catalog.impact_factor("Nature", None),
            Err(CatalogError::UnknownJournal(_))
        ));
        assert!(matches!(catalog.stats(), Err(CatalogError::Empty)));
    }

    #[test]
    fn wrong_header_is_rejected() {
        assert!(matches!(
            load("journal,category,issn,year,impact_factor\n"),
            Err(CatalogError::BadHeader { .. })
        ));
    }

    #[test]
    fn phi_counts_titles() {
        let catalog = load(&category_fixture("Astronomy & Astrophysics", 61)).unwrap();
        assert_eq!(catalog.phi("Astronomy & Astrophysics").unwrap(), 61);
        let catalog = load(&category_fixture("Immunology", 150)).unwrap();
        assert_eq!(catalog.phi("Immunology").unwrap(), 150);
        let catalog = load(&category_fixture("Neurosciences", 256)).unwrap();
        assert_eq!(catalog.phi("Neurosciences").unwrap(), 256);
        let catalog = load(&category_fixture("Solo", 1)).unwrap();
        assert_eq!(catalog.phi("Solo").unwrap(), 1);
    }

    #[test]
    fn beta_for_categories() {
        let catalog = load(&category_fixture("Plant Sciences", 209)).unwrap();
        assert!((catalog.beta_for("Plant Sciences").unwrap().value() - 0.000507671).abs() < 1e-6);
        let catalog = load(&category_fixture("Pharmacology & Pharmacy", 253)).unwrap();
        let beta = catalog.beta_for("Pharmacology & Pharmacy").unwrap();
        assert!((beta.value() - 0.000419381).abs() < 1e-6);
        assert!((beta.value() * 253.0 - LAMBDA).abs() / LAMBDA < 1e-12);
        let catalog = load(&category_fixture("Solo", 1)).unwrap();
        assert!((catalog.beta_for("Solo").unwrap().value() - 0.1061033).abs() < 1e-6);
        assert!(catalog.beta_for("Other").is_err());
    }

    #[test]
    fn rows_merge_into_history() {
        let text = format!("{HEADER}Oncology,Acta Onc,1234-5678,2014,1.8\nOncology, ACTA ONC ,,2015,2.1\n");
        let catalog = load(&text).unwrap();
        assert_eq!(catalog.journals().count(), 1);
        let journal = catalog.journal("acta onc").unwrap();
        assert_eq!(journal.if_history.len(), 2);
        assert_eq!(journal.issn.as_deref(), Some("1234-5678"));
        assert_eq!(catalog.impact_factor("Acta Onc", Some(2015)).unwrap(), 2.1);
        assert_eq!(catalog.impact_factor("Acta Onc", Some(2014)).unwrap(), 1.8);
        assert_eq!(catalog.impact_factor("Acta Onc", Some(2016)).unwrap(), 2.1);
        assert_eq!(catalog.impact_factor("Acta Onc", None).unwrap(), 2.1);
        match catalog.impact_factor("Acta Onc", Some(2013)) {
            Err(CatalogError::YearBeforeHistory { earliest, .. }) => assert_eq!(earliest, 2014),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn conflicting_impact_factor_names_the_line() {
        let text = format!("{HEADER}Oncology,Acta Onc,,2014,1.8\nOncology,Acta Onc,,2014,1.9\n");
        match load(&text) {
            Err(CatalogError::Row { line, message }) => {
                assert_eq!(line, 3);
                assert!(message.contains("conflicting impact factors"));
            }
            other => panic!("unexpected {other:?}"),
        }
        // identical duplicates are harmless
        let text = format!("{HEADER}Oncology,Acta Onc,,2014,1.8\nOncology,Acta Onc,,2014,1.8\n");
        assert!(load(&text).is_ok());
    }

    #[test]
    fn two_categories_for_one_journal_is_rejected() {
        let text = format!("{HEADER}Oncology,Acta Onc,,2014,1.8\nImmunology,Acta Onc,,2015,1.9\n");
        assert!(matches!(load(&text), Err(CatalogError::Row { line: 3, .. })));
    }

    #[test]
    fn malformed_fields_are_rejected() {
        for row in [
            "Oncology,Acta Onc,,14,1.8",
            "Oncology,Acta Onc,,20x4,1.8",
            "Oncology,Acta Onc,,2014,abc",
            "Oncology,Acta Onc,,2014,-1",
            "Oncology,Acta Onc,,2014,NaN",
            "Oncology,Acta Onc,12345678,2014,1.8",
            ",Acta Onc,,2014,1.8",
        ] {
            let text = format!("{HEADER}{row}\n");
            assert!(matches!(load(&text), Err(CatalogError::Row { line: 2, .. })), "{row}");
        }
    }

    #[test]
    fn quoted_fields_are_supported() {
        let text = format!("{HEADER}\"Medicine, General\",\"The \"\"Big\"\" Journal\",0028-083X,2015,3.5\n");
        let catalog = load(&text).unwrap();
        assert_eq!(catalog.phi("Medicine, General").unwrap(), 1);
        assert_eq!(catalog.journal("the \"big\" journal").unwrap().name, "The \"Big\" Journal");
    }

    #[test]
    fn stats_of_single_journal() {
        let catalog = load(&format!("{HEADER}Solo,Only,,2015,2.0\n")).unwrap();
        let stats = catalog.stats().unwrap();
        assert_eq!(stats.mean_if, 2.0);
        assert_eq!(stats.mean_phi, 1.0);
        assert_eq!(stats.categories[0].phi, 1);
    }

    #[test]
    fn stats_of_reference_categories() {
        let mut text = HEADER.to_string();
        for (category, n) in [
            ("Astronomy & Astrophysics", 61),
            ("Plant Sciences", 209),
            ("Immunology", 150),
            ("Neurosciences", 256),
            ("Pharmacology & Pharmacy", 253),
        ] {
            for i in 0..n {
                text.push_str(&format!("{category},{category} {i},,2015,2.0\n"));
            }
        }
        let stats = load(&text).unwrap().stats().unwrap();
        assert!((stats.mean_phi - 185.8).abs() < 1e-12);
        assert_eq!(stats.categories.len(), 5);
    }

    #[test]
    fn stats_reproduce_target_mean_phi() {
        // 5 categories, 397 titles: mean 79.4
        let sizes = [80, 79, 79, 80, 79];
        assert_eq!(sizes.iter().sum::<usize>(), 397);
        let mut text = HEADER.to_string();
        for (c, n) in sizes.iter().enumerate() {
            for i in 0..*n {
                text.push_str(&format!("Cat {c},J {c}-{i},,2015,2.0\n"));
            }
        }
        let stats = load(&text).unwrap().stats().unwrap();
        assert!((stats.mean_phi - 79.4).abs() < 0.05);
        assert!((stats.mean_if - 2.0).abs() < 1e-12);
    }

    #[test]
    fn round_trip_is_stable() {
        let text = format!(
            "{HEADER}B,Zeta,,2015,0.1\nA,\"Alpha, Beta\",1234-5678,2014,1.8\nA,\"alpha, beta\",,2015,2.1\nB,Eta,,2013,3.333333333333\n"
        );
        let catalog = load(&text).unwrap();
        let mut out = Vec::new();
        catalog.write_csv(&mut out).unwrap();
        let reloaded = Catalog::load(out.as_slice()).unwrap();
        assert_eq!(catalog, reloaded);
    }
}
