//! Python bindings: the `i3py` extension module.
//!
//! Invalid input raises `ValueError`; journals or impact factors that cannot
//! be resolved against the catalog raise `i3py.ResolutionError`.

use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use i3_core::ranking;
use i3_core::{
    dynamics, metric, Beta, DynamicsError, FScore, GeneratorConfig, IfMode, I3Score, ScoreError,
    ScoringOptions,
};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

create_exception!(i3py, ResolutionError, PyException, "A journal or impact factor is missing from the catalog.");

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn score_error(e: ScoreError) -> PyErr {
    if e.is_resolution() {
        ResolutionError::new_err(e.to_string())
    } else {
        value_error(e)
    }
}

fn dynamics_error(e: DynamicsError) -> PyErr {
    match e {
        DynamicsError::Score(e) => score_error(e),
        other => value_error(other),
    }
}

fn fscore(f: f64) -> PyResult<FScore> {
    FScore::new(f).map_err(value_error)
}

fn beta(b: f64) -> PyResult<Beta> {
    Beta::new(b).map_err(value_error)
}

fn open(path: &PathBuf) -> PyResult<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| value_error(format!("cannot read {}: {e}", path.display())))
}

fn options(if_mode: &str, fallback_if: Option<f64>) -> PyResult<ScoringOptions> {
    let if_mode = match if_mode {
        "current" => IfMode::Current,
        "historical" => IfMode::Historical,
        other => return Err(value_error(format!("if_mode must be `current` or `historical`, got `{other}`"))),
    };
    if fallback_if.is_some_and(|v| !(v.is_finite() && v >= 0.0)) {
        return Err(value_error("fallback_if must be a non-negative number"));
    }
    Ok(ScoringOptions { if_mode, fallback_if })
}

/// Category coefficient for a category of `phi` titles.
#[pyfunction]
fn compute_beta(phi: u64) -> PyResult<f64> {
    metric::compute_beta(phi).map(|b| b.value()).map_err(value_error)
}

/// Score in [0, 1) for citation mass `f` under coefficient `beta`.
#[pyfunction]
fn compute_i3(f: f64, beta: f64) -> PyResult<f64> {
    Ok(metric::compute_i3(fscore(f)?, self::beta(beta)?).value())
}

/// Coefficient that maps citation mass `f` to the score `target`.
#[pyfunction]
fn solve_beta(target: f64, f: f64) -> PyResult<f64> {
    metric::solve_beta(target, fscore(f)?).map(|b| b.value()).map_err(value_error)
}

/// Slope of the score curve at `f`.
#[pyfunction]
fn i3_derivative(f: f64, beta: f64) -> PyResult<f64> {
    Ok(metric::i3_derivative(fscore(f)?, self::beta(beta)?))
}

/// Area under the score curve from 0 to `f`.
#[pyfunction]
fn i3_auc(f: f64, beta: f64) -> PyResult<f64> {
    Ok(metric::i3_auc(fscore(f)?, self::beta(beta)?))
}

/// Area up to `t` over area up to `full`.
#[pyfunction]
fn cr_integral(t: f64, full: f64, beta: f64) -> PyResult<f64> {
    metric::cr_integral(fscore(t)?, fscore(full)?, self::beta(beta)?).map_err(value_error)
}

/// Score at `t` over the full score.
#[pyfunction]
fn cr_simple(i3_t: f64, i3_full: f64) -> PyResult<f64> {
    let t = I3Score::new(i3_t).map_err(value_error)?;
    let full = I3Score::new(i3_full).map_err(value_error)?;
    metric::cr_simple(t, full).map_err(value_error)
}

/// Journal catalog: categories, title counts and impact-factor histories.
#[pyclass(frozen)]
struct Catalog {
    inner: i3_core::Catalog,
}

#[pymethods]
impl Catalog {
    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        let inner = i3_core::Catalog::load(open(&path)?).map_err(value_error)?;
        Ok(Catalog { inner })
    }

    fn categories(&self) -> Vec<String> {
        self.inner.categories().map(str::to_owned).collect()
    }

    fn phi(&self, category: &str) -> PyResult<u64> {
        self.inner.phi(category).map_err(|e| ResolutionError::new_err(e.to_string()))
    }

    fn beta(&self, category: &str) -> PyResult<f64> {
        self.inner
            .beta_for(category)
            .map(|b| b.value())
            .map_err(|e| ResolutionError::new_err(e.to_string()))
    }

    #[pyo3(signature = (journal, year=None))]
    fn impact_factor(&self, journal: &str, year: Option<i32>) -> PyResult<f64> {
        self.inner
            .impact_factor(journal, year)
            .map_err(|e| ResolutionError::new_err(e.to_string()))
    }

    /// `(category, phi, beta, mean_if)` per category.
    fn stats(&self) -> PyResult<Vec<(String, u64, f64, f64)>> {
        let stats = self.inner.stats().map_err(value_error)?;
        Ok(stats
            .categories
            .into_iter()
            .map(|c| (c.category, c.phi, c.beta, c.mean_if))
            .collect())
    }

    fn __len__(&self) -> usize {
        self.inner.journals().count()
    }
}

/// Articles and the citation events they received.
#[pyclass(frozen)]
struct Ledger {
    inner: i3_core::Ledger,
}

#[pymethods]
impl Ledger {
    #[staticmethod]
    fn load(articles: PathBuf, citations: PathBuf) -> PyResult<Self> {
        let inner = i3_core::Ledger::load(open(&articles)?, open(&citations)?).map_err(value_error)?;
        Ok(Ledger { inner })
    }

    fn article_ids(&self) -> Vec<String> {
        self.inner.articles().iter().map(|a| a.id.clone()).collect()
    }

    fn citation_count(&self, article_id: &str) -> PyResult<usize> {
        self.inner.citation_count(article_id).map_err(score_error)
    }

    #[pyo3(signature = (catalog, article_id, as_of=None, if_mode="current", fallback_if=None))]
    fn f_score(
        &self,
        catalog: &Catalog,
        article_id: &str,
        as_of: Option<u32>,
        if_mode: &str,
        fallback_if: Option<f64>,
    ) -> PyResult<f64> {
        let options = options(if_mode, fallback_if)?;
        self.inner
            .f_score(&catalog.inner, article_id, as_of, options)
            .map(|f| f.value())
            .map_err(score_error)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

/// One ranked article.
#[pyclass(frozen, get_all)]
struct ScoreReport {
    article_id: String,
    category: String,
    phi: u64,
    beta: f64,
    f_score: f64,
    i3: f64,
    citations: usize,
    rank_i3: usize,
    rank_citations: usize,
}

#[pymethods]
impl ScoreReport {
    fn __repr__(&self) -> String {
        format!(
            "ScoreReport(article_id={:?}, i3={:.6}, rank_i3={})",
            self.article_id, self.i3, self.rank_i3
        )
    }
}

impl From<ranking::ScoreReport> for ScoreReport {
    fn from(r: ranking::ScoreReport) -> Self {
        ScoreReport {
            article_id: r.article_id,
            category: r.category,
            phi: r.phi,
            beta: r.beta,
            f_score: r.f_score,
            i3: r.i3,
            citations: r.citation_count,
            rank_i3: r.rank_i3,
            rank_citations: r.rank_citations,
        }
    }
}

/// Scores and ranks every article of the ledger; reports come in rank order.
#[pyfunction]
#[pyo3(signature = (ledger, catalog, as_of=None, if_mode="current", fallback_if=None))]
fn rank(
    ledger: &Ledger,
    catalog: &Catalog,
    as_of: Option<u32>,
    if_mode: &str,
    fallback_if: Option<f64>,
) -> PyResult<Vec<ScoreReport>> {
    let options = options(if_mode, fallback_if)?;
    let scored = i3_core::score_all(&ledger.inner, &catalog.inner, as_of, options).map_err(score_error)?;
    Ok(i3_core::rank(scored).into_iter().map(ScoreReport::from).collect())
}

/// One year of an article's series.
#[pyclass(frozen, get_all)]
struct DynamicsRow {
    years: u32,
    f_t: f64,
    i3_t: f64,
    cr_simple: Option<f64>,
    cr_integral: Option<f64>,
    exceeds_one: bool,
}

#[pyclass(frozen, get_all)]
struct DynamicsReport {
    article_id: String,
    beta: f64,
    f_full: f64,
    i3_full: f64,
    auc_full: f64,
    derivative_at_full: f64,
    series: Vec<Py<DynamicsRow>>,
}

/// Yearly scores and citation ratios of one article.
#[pyfunction]
#[pyo3(signature = (ledger, catalog, article_id, years, fallback_if=None))]
fn article_dynamics(
    py: Python<'_>,
    ledger: &Ledger,
    catalog: &Catalog,
    article_id: &str,
    years: Vec<u32>,
    fallback_if: Option<f64>,
) -> PyResult<DynamicsReport> {
    let options = options("current", fallback_if)?;
    let report = dynamics::dynamics_report(&ledger.inner, &catalog.inner, article_id, &years, options)
        .map_err(dynamics_error)?;
    let series = report
        .series
        .iter()
        .map(|row| {
            Py::new(
                py,
                DynamicsRow {
                    years: row.years,
                    f_t: row.f_t.value(),
                    i3_t: row.i3_t.value(),
                    cr_simple: row.cr_simple,
                    cr_integral: row.cr_integral,
                    exceeds_one: row.exceeds_one(),
                },
            )
        })
        .collect::<PyResult<_>>()?;
    Ok(DynamicsReport {
        article_id: report.article_id,
        beta: report.beta.value(),
        f_full: report.f_full.value(),
        i3_full: report.i3_full.value(),
        auc_full: report.auc_full,
        derivative_at_full: report.derivative_at_full,
        series,
    })
}

/// Writes a seeded synthetic catalog, articles and citations into `out`.
#[pyfunction]
fn generate(articles: usize, categories: usize, seed: u64, out: PathBuf) -> PyResult<()> {
    let corpus = i3_core::generate(&GeneratorConfig::new(articles, categories, seed)).map_err(value_error)?;
    corpus.write_to(&out).map_err(value_error)
}

#[pymodule]
fn i3py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("LAMBDA", metric::LAMBDA)?;
    m.add("ResolutionError", m.py().get_type::<ResolutionError>())?;
    m.add_function(wrap_pyfunction!(compute_beta, m)?)?;
    m.add_function(wrap_pyfunction!(compute_i3, m)?)?;
    m.add_function(wrap_pyfunction!(solve_beta, m)?)?;
    m.add_function(wrap_pyfunction!(i3_derivative, m)?)?;
    m.add_function(wrap_pyfunction!(i3_auc, m)?)?;
    m.add_function(wrap_pyfunction!(cr_integral, m)?)?;
    m.add_function(wrap_pyfunction!(cr_simple, m)?)?;
    m.add_function(wrap_pyfunction!(rank, m)?)?;
    m.add_function(wrap_pyfunction!(article_dynamics, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_class::<Catalog>()?;
    m.add_class::<Ledger>()?;
    m.add_class::<ScoreReport>()?;
    m.add_class::<DynamicsRow>()?;
    m.add_class::<DynamicsReport>()?;
    Ok(())
}
