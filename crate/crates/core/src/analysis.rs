//! Class census of a network's triangles under a preference assignment, null
//! ensembles built by rewiring and/or resampling, and observed-vs-null
//! comparison.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::dataset::{self, DatasetError, EmpiricalDistribution, PreferenceDataset, PreferenceSet};
use crate::graph::{Graph, GraphError, RewireReport};
use crate::perm::Permutation;
use crate::rng::{self, derive_seed};
use crate::triad::classify3_by_index;

pub const CLASS_COUNT_3: usize = 10;
pub const REPORT_SCHEMA_VERSION: u32 = 1;

const RESAMPLE_STREAM: u64 = 1;
const SET_STREAM: u64 = 2;
const TIE_EPSILON: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("node {0} lies on a triangle but has no ordering")]
    MissingAssignment(usize),
    #[error("node {node} has an ordering of {len} alternatives, expected 3")]
    WrongSize { node: usize, len: usize },
    #[error("comparison undefined: {0}")]
    UndefinedComparison(String),
    #[error("ensemble needs at least one replicate")]
    NoReplicates,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
}

/// Triangle counts per class, index `k` holding class `k + 1`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ClassHistogram {
    pub counts: [u64; CLASS_COUNT_3],
    pub total: u64,
}

impl ClassHistogram {
    pub fn count(&self, class: usize) -> u64 {
        self.counts[class - 1]
    }

    /// Counts over total; all zero when there are no triangles.
    pub fn frequencies(&self) -> [f64; CLASS_COUNT_3] {
        if self.total == 0 {
            return [0.0; CLASS_COUNT_3];
        }
        self.counts.map(|c| c as f64 / self.total as f64)
    }

    fn add(&mut self, class: usize) {
        self.counts[class - 1] += 1;
        self.total += 1;
    }
}

fn index_assignment(
    g: &Graph,
    assignment: &BTreeMap<usize, Permutation>,
) -> Result<Vec<Option<u8>>, AnalysisError> {
    let mut idx = vec![None; g.node_count()];
    for (&node, p) in assignment {
        if p.len() != 3 {
            return Err(AnalysisError::WrongSize { node, len: p.len() });
        }
        if let Some(slot) = idx.get_mut(node) {
            *slot = Some(p.lex_index() as u8);
        }
    }
    Ok(idx)
}

/// Classifies every triangle of `g` by the orderings of its three nodes.
pub fn census(
    g: &Graph,
    assignment: &BTreeMap<usize, Permutation>,
) -> Result<ClassHistogram, AnalysisError> {
    census_indexed(g, &index_assignment(g, assignment)?)
}

fn census_indexed(g: &Graph, orderings: &[Option<u8>]) -> Result<ClassHistogram, AnalysisError> {
    let mut h = ClassHistogram::default();
    let get = |n: usize| orderings[n].ok_or(AnalysisError::MissingAssignment(n));
    for (u, v, w) in g.triangles() {
        let class = classify3_by_index(get(u)? as usize, get(v)? as usize, get(w)? as usize);
        h.add(class);
    }
    Ok(h)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum NullMode {
    /// Rewire edges, keep the observed orderings.
    #[serde(rename = "rewire")]
    Rewire,
    /// Keep edges, redraw orderings from the empirical distribution.
    #[serde(rename = "resample")]
    Resample,
    #[default]
    #[serde(rename = "rewire+resample")]
    RewireResample,
}

impl NullMode {
    pub fn rewires(self) -> bool {
        matches!(self, NullMode::Rewire | NullMode::RewireResample)
    }

    pub fn resamples(self) -> bool {
        matches!(self, NullMode::Resample | NullMode::RewireResample)
    }
}

impl fmt::Display for NullMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NullMode::Rewire => "rewire",
            NullMode::Resample => "resample",
            NullMode::RewireResample => "rewire+resample",
        })
    }
}

impl FromStr for NullMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "rewire" => Ok(NullMode::Rewire),
            "resample" => Ok(NullMode::Resample),
            "rewire+resample" => Ok(NullMode::RewireResample),
            other => Err(format!(
                "unknown null mode `{other}` (expected rewire, resample or rewire+resample)"
            )),
        }
    }
}

/// Default number of successful swaps: ten per edge, none for graphs with
/// fewer than two edges.
pub fn default_swaps(g: &Graph) -> usize {
    if g.edge_count() < 2 {
        0
    } else {
        10 * g.edge_count()
    }
}

/// The graph a replicate's census runs on.
#[derive(Debug, Clone)]
pub struct NullGraph {
    pub index: usize,
    pub graph: Graph,
    pub rewire: Option<RewireReport>,
}

/// Builds the replicate graphs. Replicate `i` is rewired with seed
/// `base_seed + i` (wrapping); without rewiring it is the input graph.
pub fn null_graphs(
    g: &Graph,
    replicates: usize,
    mode: NullMode,
    base_seed: u64,
    swaps: usize,
) -> Result<Vec<NullGraph>, AnalysisError> {
    if replicates == 0 {
        return Err(AnalysisError::NoReplicates);
    }
    let build = |i: usize| -> Result<NullGraph, AnalysisError> {
        if mode.rewires() {
            let (graph, report) = g.rewire(swaps, base_seed.wrapping_add(i as u64))?;
            Ok(NullGraph {
                index: i,
                graph,
                rewire: Some(report),
            })
        } else {
            Ok(NullGraph {
                index: i,
                graph: g.clone(),
                rewire: None,
            })
        }
    };
    map_ordered(0..replicates, build)
}

#[cfg(feature = "parallel")]
fn map_ordered<T, R, E, F>(items: impl IntoIterator<Item = T>, f: F) -> Result<Vec<R>, E>
where
    T: Send,
    R: Send,
    E: Send,
    F: Fn(T) -> Result<R, E> + Sync + Send,
{
    use rayon::prelude::*;
    let items: Vec<T> = items.into_iter().collect();
    items.into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_ordered<T, R, E, F>(items: impl IntoIterator<Item = T>, f: F) -> Result<Vec<R>, E>
where
    F: Fn(T) -> Result<R, E>,
{
    items.into_iter().map(f).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Replicate {
    pub index: usize,
    pub rewire_seed: Option<u64>,
    pub resample_seed: Option<u64>,
    pub swaps: usize,
    pub histogram: ClassHistogram,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NullEnsemble {
    pub mode: NullMode,
    pub replicates: Vec<Replicate>,
}

/// Censuses `ps` on prepared replicate graphs. Resampled orderings for
/// replicate `i` use the seed `derive_seed(seed, 1, i)`.
pub fn ensemble_on(
    graphs: &[NullGraph],
    ps: &PreferenceSet,
    mode: NullMode,
    seed: u64,
) -> Result<NullEnsemble, AnalysisError> {
    if graphs.is_empty() {
        return Err(AnalysisError::NoReplicates);
    }
    let dist = if mode.resamples() {
        Some(dataset::empirical_distribution(ps)?)
    } else {
        None
    };
    let mut replicates = Vec::with_capacity(graphs.len());
    for ng in graphs {
        let (histogram, resample_seed) = match &dist {
            Some(d) => {
                let s = derive_seed(seed, RESAMPLE_STREAM, ng.index as u64);
                let a = dataset::sample_assignment(d, ps.assignment.keys().copied(), s);
                (census(&ng.graph, &a)?, Some(s))
            }
            None => (census(&ng.graph, &ps.assignment)?, None),
        };
        replicates.push(Replicate {
            index: ng.index,
            rewire_seed: ng.rewire.as_ref().map(|r| r.seed),
            resample_seed,
            swaps: ng.rewire.as_ref().map_or(0, |r| r.successful),
            histogram,
        });
    }
    Ok(NullEnsemble { mode, replicates })
}

pub fn null_ensemble(
    g: &Graph,
    ps: &PreferenceSet,
    replicates: usize,
    mode: NullMode,
    base_seed: u64,
    swaps: usize,
) -> Result<NullEnsemble, AnalysisError> {
    let graphs = null_graphs(g, replicates, mode, base_seed, swaps)?;
    ensemble_on(&graphs, ps, mode, base_seed)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassComparison {
    pub class_id: usize,
    pub observed_count: u64,
    pub observed_frequency: f64,
    pub ensemble_mean_count: f64,
    pub ensemble_std_count: f64,
    pub ensemble_mean_frequency: f64,
    pub ensemble_std_frequency: f64,
    /// Two-sided ensemble-rank p-value of the observed frequency.
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub classes: Vec<ClassComparison>,
    /// Between observed frequencies and the ensemble mean frequencies.
    pub total_variation: f64,
    pub chi_square: f64,
    pub chi_square_df: usize,
    /// Ensemble-rank p-value of the observed total variation distance.
    pub overall_p_value: f64,
    /// Replicates with at least one triangle; only these enter frequency statistics.
    pub replicates_used: usize,
}

/// Shifted by the first value, so equal inputs give that value exactly.
fn mean(xs: &[f64]) -> f64 {
    let first = xs[0];
    first + xs.iter().map(|x| x - first).sum::<f64>() / xs.len() as f64
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = mean(xs);
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Fraction, with +1 smoothing, of replicate statistics at least as large
/// as the observed one.
fn rank_p_value(observed: f64, replicates: &[f64]) -> f64 {
    let hits = replicates
        .iter()
        .filter(|&&s| s >= observed - TIE_EPSILON)
        .count();
    (1 + hits) as f64 / (1 + replicates.len()) as f64
}

fn tv(a: &[f64; CLASS_COUNT_3], b: &[f64; CLASS_COUNT_3]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

/// Observed histogram against a null ensemble.
///
/// Rank p-values center each statistic on the mean over the observed and
/// replicate values together, so the observed value and the replicates are
/// treated symmetrically.
pub fn compare(
    observed: &ClassHistogram,
    ensemble: &NullEnsemble,
) -> Result<ComparisonReport, AnalysisError> {
    if ensemble.replicates.is_empty() {
        return Err(AnalysisError::NoReplicates);
    }
    if observed.total == 0 {
        return Err(AnalysisError::UndefinedComparison(
            "observed network has no triangles".into(),
        ));
    }
    let used: Vec<&ClassHistogram> = ensemble
        .replicates
        .iter()
        .map(|r| &r.histogram)
        .filter(|h| h.total > 0)
        .collect();
    if used.is_empty() {
        return Err(AnalysisError::UndefinedComparison(
            "no replicate network has a triangle".into(),
        ));
    }
    let obs_freq = observed.frequencies();
    let rep_freq: Vec<[f64; CLASS_COUNT_3]> = used.iter().map(|h| h.frequencies()).collect();

    let mut classes = Vec::with_capacity(CLASS_COUNT_3);
    let mut mean_freq = [0.0; CLASS_COUNT_3];
    let mut pooled_center = [0.0; CLASS_COUNT_3];
    for k in 0..CLASS_COUNT_3 {
        let counts: Vec<f64> = ensemble
            .replicates
            .iter()
            .map(|r| r.histogram.counts[k] as f64)
            .collect();
        let freqs: Vec<f64> = rep_freq.iter().map(|f| f[k]).collect();
        let (mean_count, std_count) = mean_std(&counts);
        let (mf, sf) = mean_std(&freqs);
        mean_freq[k] = mf;
        let mut pooled = freqs.clone();
        pooled.push(obs_freq[k]);
        let center = mean(&pooled);
        pooled_center[k] = center;
        let dev: Vec<f64> = freqs.iter().map(|f| (f - center).abs()).collect();
        classes.push(ClassComparison {
            class_id: k + 1,
            observed_count: observed.counts[k],
            observed_frequency: obs_freq[k],
            ensemble_mean_count: mean_count,
            ensemble_std_count: std_count,
            ensemble_mean_frequency: mf,
            ensemble_std_frequency: sf,
            p_value: rank_p_value((obs_freq[k] - center).abs(), &dev),
        });
    }

    let mut chi_square = 0.0;
    let mut cells = 0usize;
    for (&freq, &count) in mean_freq.iter().zip(&observed.counts) {
        let expected = freq * observed.total as f64;
        if expected > 0.0 {
            chi_square += (count as f64 - expected).powi(2) / expected;
            cells += 1;
        }
    }
    let rep_tv: Vec<f64> = rep_freq.iter().map(|f| tv(f, &pooled_center)).collect();
    Ok(ComparisonReport {
        classes,
        total_variation: tv(&obs_freq, &mean_freq),
        chi_square,
        chi_square_df: cells.saturating_sub(1),
        overall_p_value: rank_p_value(tv(&obs_freq, &pooled_center), &rep_tv),
        replicates_used: used.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub replicates: usize,
    pub mode: NullMode,
    /// Successful swaps per rewired replicate; `None` means [`default_swaps`].
    pub swaps: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: rng::DEFAULT_SEED,
            replicates: 10,
            mode: NullMode::RewireResample,
            swaps: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigEcho {
    pub seed: u64,
    pub replicates: usize,
    pub mode: NullMode,
    pub swaps: usize,
    pub connectivity_preserved: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphSummary {
    pub nodes: usize,
    pub edges: usize,
    pub triangles: u64,
    pub closed_triangle_fraction: f64,
}

impl GraphSummary {
    pub fn of(g: &Graph) -> Self {
        Self {
            nodes: g.node_count(),
            edges: g.edge_count(),
            triangles: g.triangle_count(),
            closed_triangle_fraction: g.closed_triangle_fraction(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistogramSummary {
    pub counts: [u64; CLASS_COUNT_3],
    pub frequencies: [f64; CLASS_COUNT_3],
    pub total: u64,
}

impl From<&ClassHistogram> for HistogramSummary {
    fn from(h: &ClassHistogram) -> Self {
        Self {
            counts: h.counts,
            frequencies: h.frequencies(),
            total: h.total,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SetEntry {
    pub index: usize,
    pub topic_index: usize,
    pub topic: String,
    pub subset_rank: usize,
    pub subset: Vec<String>,
    pub nodes: usize,
    pub zero_triangles: bool,
    pub observed_histogram: Option<HistogramSummary>,
    pub ensemble_summaries: Vec<Replicate>,
    pub comparison: Option<ComparisonReport>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub config: ConfigEcho,
    pub graph: GraphSummary,
    pub null_graphs: Vec<RewireReport>,
    pub entries: Vec<SetEntry>,
}

impl ExperimentReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Entry whose empty-triangle flag or error prevents a comparison.
    pub fn flagged(&self) -> impl Iterator<Item = &SetEntry> {
        self.entries.iter().filter(|e| e.comparison.is_none())
    }
}

fn run_set(
    ps: &PreferenceSet,
    g: &Graph,
    graphs: &[NullGraph],
    config: &ExperimentConfig,
) -> SetEntry {
    let mut entry = SetEntry {
        index: ps.index(),
        topic_index: ps.topic_index,
        topic: ps.topic.clone(),
        subset_rank: ps.subset_rank,
        subset: ps.items.labels().to_vec(),
        nodes: ps.assignment.len(),
        zero_triangles: false,
        observed_histogram: None,
        ensemble_summaries: Vec::new(),
        comparison: None,
        error: None,
    };
    let result = (|| -> Result<(), AnalysisError> {
        let observed = census(g, &ps.assignment)?;
        entry.zero_triangles = observed.total == 0;
        entry.observed_histogram = Some((&observed).into());
        let set_seed = derive_seed(config.seed, SET_STREAM, ps.index() as u64);
        let ensemble = ensemble_on(graphs, ps, config.mode, set_seed)?;
        if observed.total > 0 && ensemble.replicates.iter().any(|r| r.histogram.total > 0) {
            entry.comparison = Some(compare(&observed, &ensemble)?);
        }
        entry.ensemble_summaries = ensemble.replicates;
        Ok(())
    })();
    if let Err(e) = result {
        entry.error = Some(e.to_string());
    }
    entry
}

/// Census, null ensemble and comparison for every 3-item preference set of
/// the dataset. The replicate graphs are built once and shared by all sets;
/// resampled orderings are drawn per set. Failures in one set are recorded
/// in its entry and do not stop the others.
pub fn run_experiment(
    ds: &PreferenceDataset,
    g: &Graph,
    config: &ExperimentConfig,
) -> Result<ExperimentReport, AnalysisError> {
    let sets = dataset::extract_subsets(ds)?;
    let swaps = if config.mode.rewires() {
        config.swaps.unwrap_or_else(|| default_swaps(g))
    } else {
        0
    };
    let graphs = null_graphs(g, config.replicates, config.mode, config.seed, swaps)?;
    let entries = map_ordered(sets.iter(), |ps| {
        Ok::<_, AnalysisError>(run_set(ps, g, &graphs, config))
    })?;
    Ok(ExperimentReport {
        schema_version: REPORT_SCHEMA_VERSION,
        config: ConfigEcho {
            seed: config.seed,
            replicates: config.replicates,
            mode: config.mode,
            swaps,
            connectivity_preserved: false,
        },
        graph: GraphSummary::of(g),
        null_graphs: graphs.iter().filter_map(|n| n.rewire.clone()).collect(),
        entries,
    })
}

/// Per-set CSV: `class_id, observed_count, ensemble_mean, ensemble_std,
/// observed_frequency, ensemble_mean_frequency`.
pub fn write_histogram_csv<W: Write>(entry: &SetEntry, out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "class_id",
        "observed_count",
        "ensemble_mean",
        "ensemble_std",
        "observed_frequency",
        "ensemble_mean_frequency",
    ])?;
    let observed = entry.observed_histogram.as_ref();
    for k in 0..CLASS_COUNT_3 {
        let counts: Vec<f64> = entry
            .ensemble_summaries
            .iter()
            .map(|r| r.histogram.counts[k] as f64)
            .collect();
        let (mean, std) = if counts.is_empty() {
            (0.0, 0.0)
        } else {
            mean_std(&counts)
        };
        let mean_freq = entry
            .comparison
            .as_ref()
            .map_or(0.0, |c| c.classes[k].ensemble_mean_frequency);
        w.write_record([
            (k + 1).to_string(),
            observed.map_or(0, |h| h.counts[k]).to_string(),
            format!("{mean:.6}"),
            format!("{std:.6}"),
            format!("{:.6}", observed.map_or(0.0, |h| h.frequencies[k])),
            format!("{mean_freq:.6}"),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Expected class frequencies when the three orderings of a triangle are
/// drawn independently from `dist`.
pub fn expected_frequencies(dist: &EmpiricalDistribution) -> [f64; CLASS_COUNT_3] {
    let w = dist.weights();
    let mut out = [0.0; CLASS_COUNT_3];
    for a in 0..6 {
        for b in 0..6 {
            for c in 0..6 {
                out[classify3_by_index(a, b, c) - 1] += w[a] * w[b] * w[c];
            }
        }
    }
    out
}
