//! Preference datasets: CSV ingestion, 3-item subset extraction, empirical
//! ordering distributions and synthetic stand-in data.
//!
//! Two files describe a dataset. The topics file has a header
//! `topic,item1,...,item5` and one row per topic. The preferences file has
//! a header `node_id,topic,ranking` where `ranking` lists the topic's items
//! joined by `>`, most preferred first.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};
use std::path::Path;

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng as _;
use serde::Serialize;
use thiserror::Error;

use crate::perm::{AlternativeAlphabet, PermError, Permutation};
use crate::rng::{self, below};

/// Items per topic in the dataset schema.
pub const ITEMS_PER_TOPIC: usize = 5;
/// Size of the extracted item subsets.
pub const SUBSET_SIZE: usize = 3;
/// `C(5, 3)` subsets per topic.
pub const SUBSETS_PER_TOPIC: usize = 10;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("{file} line {line}: {message}")]
    Malformed {
        file: &'static str,
        line: u64,
        message: String,
    },
    #[error("preferences line {line}: unknown topic `{topic}`")]
    UnknownTopic { line: u64, topic: String },
    #[error("preferences line {line}: node {node} ranks item `{item}` twice")]
    DuplicateItem {
        line: u64,
        node: usize,
        item: String,
    },
    #[error("preferences line {line}: node {node} ranking is incomplete, `{missing}` is missing")]
    IncompleteRanking {
        line: u64,
        node: usize,
        missing: String,
    },
    #[error("preferences line {line}: node {node} ranks unknown item `{item}`")]
    UnknownItem {
        line: u64,
        node: usize,
        item: String,
    },
    #[error("preferences line {line}: node {node} already has a ranking for topic `{topic}`")]
    DuplicateEntry {
        line: u64,
        node: usize,
        topic: String,
    },
    #[error("schema error: {0}")]
    Schema(String),
    #[error("empty input: {0}")]
    Empty(String),
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TopicSpec {
    pub name: String,
    pub items: AlternativeAlphabet,
}

impl TopicSpec {
    pub fn new<I, S>(name: impl Into<String>, items: I) -> Result<Self, DatasetError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Ok(Self {
            name: name.into(),
            items: AlternativeAlphabet::new(items)?,
        })
    }
}

/// Full rankings keyed by `(node_id, topic_index)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreferenceDataset {
    topics: Vec<TopicSpec>,
    rankings: BTreeMap<(usize, usize), Permutation>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LoadOptions {
    /// Required number of items per topic.
    pub items_per_topic: usize,
    /// Skip incomplete rankings instead of failing. Duplicate and unknown
    /// items are always errors.
    pub drop_incomplete: bool,
}

impl Default for LoadOptions {
    fn default() -> Self {
        Self {
            items_per_topic: ITEMS_PER_TOPIC,
            drop_incomplete: false,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LoadReport {
    pub node_count: usize,
    /// `(topic, nodes with a ranking)` per topic.
    pub per_topic_complete: Vec<(String, usize)>,
    /// Lines skipped under [`LoadOptions::drop_incomplete`].
    pub dropped_lines: Vec<u64>,
}

impl PreferenceDataset {
    pub fn new(topics: Vec<TopicSpec>) -> Result<Self, DatasetError> {
        let mut names = BTreeSet::new();
        for t in &topics {
            if !names.insert(t.name.as_str()) {
                return Err(DatasetError::Schema(format!(
                    "topic `{}` listed twice",
                    t.name
                )));
            }
        }
        Ok(Self {
            topics,
            rankings: BTreeMap::new(),
        })
    }

    pub fn insert(
        &mut self,
        node: usize,
        topic: usize,
        ranking: Permutation,
    ) -> Result<(), DatasetError> {
        let spec = self
            .topics
            .get(topic)
            .ok_or_else(|| DatasetError::Schema(format!("topic index {topic} out of range")))?;
        if ranking.len() != spec.items.len() {
            return Err(DatasetError::Schema(format!(
                "ranking has {} items, topic `{}` has {}",
                ranking.len(),
                spec.name,
                spec.items.len()
            )));
        }
        self.rankings.insert((node, topic), ranking);
        Ok(())
    }

    pub fn topics(&self) -> &[TopicSpec] {
        &self.topics
    }

    pub fn topic_index(&self, name: &str) -> Option<usize> {
        self.topics.iter().position(|t| t.name == name)
    }

    pub fn ranking(&self, node: usize, topic: usize) -> Option<&Permutation> {
        self.rankings.get(&(node, topic))
    }

    /// Iterates `((node, topic), ranking)` ordered by node then topic.
    pub fn rankings(&self) -> impl Iterator<Item = (&(usize, usize), &Permutation)> {
        self.rankings.iter()
    }

    pub fn node_ids(&self) -> BTreeSet<usize> {
        self.rankings.keys().map(|&(n, _)| n).collect()
    }

    pub fn nodes_for_topic(&self, topic: usize) -> impl Iterator<Item = (usize, &Permutation)> {
        self.rankings
            .iter()
            .filter(move |((_, t), _)| *t == topic)
            .map(|(&(n, _), p)| (n, p))
    }

    pub fn load(
        prefs_path: &Path,
        topics_path: &Path,
        options: LoadOptions,
    ) -> Result<(Self, LoadReport), DatasetError> {
        let topics = std::fs::File::open(topics_path)?;
        let prefs = std::fs::File::open(prefs_path)?;
        Self::from_readers(prefs, topics, options)
    }

    pub fn from_readers<P: Read, T: Read>(
        prefs: P,
        topics: T,
        options: LoadOptions,
    ) -> Result<(Self, LoadReport), DatasetError> {
        let mut ds = Self::new(read_topics(topics, options.items_per_topic)?)?;
        let mut report = LoadReport::default();
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(prefs);
        let headers = reader.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["node_id", "topic", "ranking"] {
            return Err(DatasetError::Malformed {
                file: "preferences",
                line: 1,
                message: format!(
                    "expected header `node_id,topic,ranking`, found `{}`",
                    headers.iter().collect::<Vec<_>>().join(",")
                ),
            });
        }
        for record in reader.records() {
            let record = record.map_err(|e| DatasetError::Malformed {
                file: "preferences",
                line: e.position().map_or(0, |p| p.line()),
                message: e.to_string(),
            })?;
            let line = record.position().map_or(0, |p| p.line());
            let malformed = |message: String| DatasetError::Malformed {
                file: "preferences",
                line,
                message,
            };
            if record.len() != 3 {
                return Err(malformed(format!(
                    "expected 3 fields, found {}",
                    record.len()
                )));
            }
            let node: usize = record[0]
                .parse()
                .map_err(|_| malformed(format!("`{}` is not a node id", &record[0])))?;
            let topic = ds
                .topic_index(&record[1])
                .ok_or_else(|| DatasetError::UnknownTopic {
                    line,
                    topic: record[1].to_string(),
                })?;
            let ranking = match ds.topics[topic].items.parse(&record[2]) {
                Ok(p) => p,
                Err(PermError::MissingLabel(missing)) => {
                    if options.drop_incomplete {
                        report.dropped_lines.push(line);
                        continue;
                    }
                    return Err(DatasetError::IncompleteRanking {
                        line,
                        node,
                        missing,
                    });
                }
                Err(PermError::DuplicateLabel(item)) => {
                    return Err(DatasetError::DuplicateItem { line, node, item })
                }
                Err(PermError::UnknownLabel(item)) => {
                    return Err(DatasetError::UnknownItem { line, node, item })
                }
                Err(e) => return Err(e.into()),
            };
            if ds.rankings.insert((node, topic), ranking).is_some() {
                return Err(DatasetError::DuplicateEntry {
                    line,
                    node,
                    topic: ds.topics[topic].name.clone(),
                });
            }
        }
        report.node_count = ds.node_ids().len();
        report.per_topic_complete = (0..ds.topics.len())
            .map(|t| (ds.topics[t].name.clone(), ds.nodes_for_topic(t).count()))
            .collect();
        Ok((ds, report))
    }

    pub fn save(&self, prefs_path: &Path, topics_path: &Path) -> Result<(), DatasetError> {
        self.write_topics(std::fs::File::create(topics_path)?)?;
        self.write_preferences(std::fs::File::create(prefs_path)?)?;
        Ok(())
    }

    pub fn write_topics<W: Write>(&self, out: W) -> Result<(), DatasetError> {
        let width = self
            .topics
            .iter()
            .map(|t| t.items.len())
            .max()
            .unwrap_or(ITEMS_PER_TOPIC);
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["topic".to_string()];
        header.extend((1..=width).map(|i| format!("item{i}")));
        w.write_record(&header)?;
        for t in &self.topics {
            let mut row = vec![t.name.clone()];
            row.extend(t.items.labels().iter().cloned());
            row.resize(width + 1, String::new());
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_preferences<W: Write>(&self, out: W) -> Result<(), DatasetError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["node_id", "topic", "ranking"])?;
        for (&(node, topic), p) in &self.rankings {
            let spec = &self.topics[topic];
            w.write_record([
                node.to_string(),
                spec.name.clone(),
                spec.items.format_with(p, ">"),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn read_topics<R: Read>(input: R, items_per_topic: usize) -> Result<Vec<TopicSpec>, DatasetError> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(input);
    let headers = reader.headers()?.clone();
    if headers.get(0) != Some("topic") {
        return Err(DatasetError::Malformed {
            file: "topics",
            line: 1,
            message: "expected header starting with `topic`".into(),
        });
    }
    let mut topics = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let name = record.get(0).unwrap_or_default().to_string();
        if name.is_empty() {
            return Err(DatasetError::Malformed {
                file: "topics",
                line,
                message: "empty topic name".into(),
            });
        }
        let items: Vec<&str> = record.iter().skip(1).filter(|s| !s.is_empty()).collect();
        if items.len() != items_per_topic {
            return Err(DatasetError::Schema(format!(
                "topic `{name}` (line {line}) has {} items, expected {items_per_topic}",
                items.len()
            )));
        }
        let items = AlternativeAlphabet::new(items.iter().copied()).map_err(|e| {
            DatasetError::Malformed {
                file: "topics",
                line,
                message: e.to_string(),
            }
        })?;
        topics.push(TopicSpec { name, items });
    }
    if topics.is_empty() {
        return Err(DatasetError::Empty("topics file lists no topics".into()));
    }
    Ok(topics)
}

/// One topic restricted to a 3-item subset: an ordering of the three kept
/// items for every node that ranked the topic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreferenceSet {
    pub topic_index: usize,
    pub topic: String,
    /// Position of the subset among the topic's subsets in lexicographic order.
    pub subset_rank: usize,
    pub kept_items: [usize; 3],
    /// Labels of the kept items, in ascending item order.
    pub items: AlternativeAlphabet,
    pub assignment: BTreeMap<usize, Permutation>,
}

impl PreferenceSet {
    /// `topic_index * 10 + subset_rank`.
    pub fn index(&self) -> usize {
        self.topic_index * SUBSETS_PER_TOPIC + self.subset_rank
    }

    /// `node_id,ordering` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["node_id", "ordering"])?;
        for (node, p) in &self.assignment {
            w.write_record([node.to_string(), self.items.format_with(p, ">")])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// The ten 3-subsets of five items in lexicographic order.
pub fn item_subsets() -> Vec<[usize; 3]> {
    let mut out = Vec::with_capacity(SUBSETS_PER_TOPIC);
    for a in 0..ITEMS_PER_TOPIC {
        for b in a + 1..ITEMS_PER_TOPIC {
            for c in b + 1..ITEMS_PER_TOPIC {
                out.push([a, b, c]);
            }
        }
    }
    out
}

/// Every topic times every 3-item subset, restricting each node's ranking to
/// the subset with its internal order preserved.
pub fn extract_subsets(ds: &PreferenceDataset) -> Result<Vec<PreferenceSet>, DatasetError> {
    let subsets = item_subsets();
    let mut out = Vec::with_capacity(ds.topics.len() * subsets.len());
    for (topic_index, spec) in ds.topics.iter().enumerate() {
        if spec.items.len() != ITEMS_PER_TOPIC {
            return Err(DatasetError::Schema(format!(
                "topic `{}` has {} items, subset extraction needs {ITEMS_PER_TOPIC}",
                spec.name,
                spec.items.len()
            )));
        }
        for (subset_rank, keep) in subsets.iter().enumerate() {
            let assignment = ds
                .nodes_for_topic(topic_index)
                .map(|(node, p)| Ok((node, p.restrict(keep)?)))
                .collect::<Result<_, PermError>>()?;
            out.push(PreferenceSet {
                topic_index,
                topic: spec.name.clone(),
                subset_rank,
                kept_items: *keep,
                items: spec.items.restrict(keep)?,
                assignment,
            });
        }
    }
    Ok(out)
}

/// Frequencies of the six orderings of three alternatives, indexed by
/// lexicographic position (ABC, ACB, BAC, BCA, CAB, CBA).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EmpiricalDistribution {
    counts: [u64; 6],
    sample_count: u64,
}

impl EmpiricalDistribution {
    pub fn from_counts(counts: [u64; 6]) -> Result<Self, DatasetError> {
        let sample_count = counts.iter().sum();
        if sample_count == 0 {
            return Err(DatasetError::Empty("distribution without samples".into()));
        }
        Ok(Self {
            counts,
            sample_count,
        })
    }

    pub fn uniform() -> Self {
        Self {
            counts: [1; 6],
            sample_count: 6,
        }
    }

    pub fn from_orderings<'a, I>(orderings: I) -> Result<Self, DatasetError>
    where
        I: IntoIterator<Item = &'a Permutation>,
    {
        let mut counts = [0u64; 6];
        for p in orderings {
            if p.len() != 3 {
                return Err(DatasetError::Schema(format!(
                    "expected orderings of 3 alternatives, got {}",
                    p.len()
                )));
            }
            counts[p.lex_index()] += 1;
        }
        Self::from_counts(counts)
    }

    pub fn counts(&self) -> &[u64; 6] {
        &self.counts
    }

    pub fn sample_count(&self) -> u64 {
        self.sample_count
    }

    pub fn weights(&self) -> [f64; 6] {
        self.counts.map(|c| c as f64 / self.sample_count as f64)
    }

    pub fn weight(&self, ordering: &Permutation) -> f64 {
        if ordering.len() != 3 {
            return 0.0;
        }
        self.counts[ordering.lex_index()] as f64 / self.sample_count as f64
    }

    /// Total variation distance to another distribution.
    pub fn total_variation(&self, other: &EmpiricalDistribution) -> f64 {
        let (a, b) = (self.weights(), other.weights());
        0.5 * a.iter().zip(&b).map(|(x, y)| (x - y).abs()).sum::<f64>()
    }
}

pub fn empirical_distribution(ps: &PreferenceSet) -> Result<EmpiricalDistribution, DatasetError> {
    if ps.assignment.is_empty() {
        return Err(DatasetError::Empty(format!(
            "preference set {} has no nodes",
            ps.index()
        )));
    }
    EmpiricalDistribution::from_orderings(ps.assignment.values())
}

/// Independent draws from `dist`, one per node, in node order.
pub fn sample_assignment(
    dist: &EmpiricalDistribution,
    node_ids: impl IntoIterator<Item = usize>,
    seed: u64,
) -> BTreeMap<usize, Permutation> {
    let mut rng = rng::seeded(seed);
    let index = WeightedIndex::new(dist.counts).expect("distribution has positive mass");
    let orderings: Vec<Permutation> = (0..6)
        .map(|i| Permutation::from_lex_index(3, i).unwrap())
        .collect();
    node_ids
        .into_iter()
        .map(|node| (node, orderings[index.sample(&mut rng)].clone()))
        .collect()
}

/// Mallows ranking via repeated insertion: item `i` of `reference` is
/// inserted `v` places ahead of the end with probability proportional to
/// `dispersion^v`. Dispersion 1 is uniform, 0 returns `reference`.
pub fn sample_mallows(reference: &Permutation, dispersion: f64, rng: &mut rng::Rng) -> Permutation {
    let mut word: Vec<usize> = Vec::with_capacity(reference.len());
    for (i, &item) in reference.word().iter().enumerate() {
        let weights: Vec<f64> = (0..=i).map(|v| dispersion.powi(v as i32)).collect();
        let total: f64 = weights.iter().sum();
        let mut draw = rng.gen::<f64>() * total;
        let mut ahead = 0;
        for (v, w) in weights.iter().enumerate() {
            if draw < *w {
                ahead = v;
                break;
            }
            draw -= w;
            ahead = v;
        }
        word.insert(i - ahead, item);
    }
    Permutation::new(word).expect("insertion builds a permutation")
}

/// Eight topics of five items each, as used by the survey the experiment
/// format is modelled on.
pub fn survey_topics() -> Vec<TopicSpec> {
    const TOPICS: [(&str, [&str; 5]); 8] = [
        (
            "Hangout place",
            [
                "Friend's place",
                "Adventure park",
                "Trekking",
                "Mall",
                "Historical place",
            ],
        ),
        (
            "Chatting app",
            ["WhatsApp", "Facebook", "Hangouts", "SMS", "Skype"],
        ),
        (
            "Facebook activity",
            [
                "Viewing posts",
                "Chatting",
                "Posting",
                "Games/Apps",
                "Marketing",
            ],
        ),
        (
            "Lifestyle",
            [
                "Intellectual",
                "Exercising",
                "Social activist",
                "Lavish",
                "Smoking",
            ],
        ),
        (
            "Website visited",
            ["Google", "Facebook", "Youtube", "Wikipedia", "Amazon"],
        ),
        (
            "Government investment",
            [
                "Education",
                "Agriculture",
                "Infrastructure",
                "Military",
                "Space explore",
            ],
        ),
        (
            "Serious crime",
            ["Rape", "Terrorism", "Murder", "Corruption", "Extortion"],
        ),
        (
            "Leader",
            [
                "N. Modi (India)",
                "B. Obama (USA)",
                "D. Cameron (UK)",
                "V. Putin (Russia)",
                "X. Jinping (China)",
            ],
        ),
    ];
    TOPICS
        .iter()
        .map(|(name, items)| TopicSpec::new(*name, *items).unwrap())
        .collect()
}

fn random_permutation(n: usize, rng: &mut rng::Rng) -> Permutation {
    let mut word: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = below(rng, i + 1);
        word.swap(i, j);
    }
    Permutation::new(word).unwrap()
}

/// Synthetic dataset over nodes `0..node_count`: every node ranks every
/// topic. `skew = 0` draws uniformly from the 120 rankings, `skew = 1` gives
/// every node the topic's reference ranking; values between follow a Mallows
/// model with dispersion `1 - skew`.
pub fn generate_synthetic_dataset(
    node_count: usize,
    topic_count: usize,
    seed: u64,
    skew: f64,
) -> Result<PreferenceDataset, DatasetError> {
    if node_count < 3 {
        return Err(DatasetError::Schema(format!(
            "need at least 3 nodes, got {node_count}"
        )));
    }
    if !(0.0..=1.0).contains(&skew) {
        return Err(DatasetError::Schema(format!("skew {skew} outside [0, 1]")));
    }
    let mut topics = survey_topics();
    topics.truncate(topic_count);
    for k in topics.len()..topic_count {
        topics.push(TopicSpec::new(
            format!("Topic {}", k + 1),
            (1..=ITEMS_PER_TOPIC).map(|i| format!("Item {i}")),
        )?);
    }
    let mut ds = PreferenceDataset::new(topics)?;
    let mut rng = rng::seeded(seed);
    let references: Vec<Permutation> = (0..topic_count)
        .map(|_| random_permutation(ITEMS_PER_TOPIC, &mut rng))
        .collect();
    let dispersion = 1.0 - skew;
    for node in 0..node_count {
        for (topic, reference) in references.iter().enumerate() {
            let p = sample_mallows(reference, dispersion, &mut rng);
            ds.rankings.insert((node, topic), p);
        }
    }
    Ok(ds)
}

/// Orderings of three alternatives correlated within communities: each
/// community gets a random reference ordering, and each node adopts its
/// community's ordering with probability `homophily`, otherwise a uniform one.
pub fn community_assignment(
    communities: &[usize],
    homophily: f64,
    seed: u64,
) -> BTreeMap<usize, Permutation> {
    let mut rng = rng::seeded(seed);
    let k = communities.iter().max().map_or(0, |m| m + 1);
    let references: Vec<Permutation> = (0..k).map(|_| random_permutation(3, &mut rng)).collect();
    communities
        .iter()
        .enumerate()
        .map(|(node, &c)| {
            let p = if rng.gen::<f64>() < homophily {
                references[c].clone()
            } else {
                random_permutation(3, &mut rng)
            };
            (node, p)
        })
        .collect()
}

/// Uniform independent orderings of three alternatives.
pub fn uniform_assignment(
    node_ids: impl IntoIterator<Item = usize>,
    seed: u64,
) -> BTreeMap<usize, Permutation> {
    sample_assignment(&EmpiricalDistribution::uniform(), node_ids, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOPICS: &str =
        "topic,item1,item2,item3,item4,item5\nChatting app,WhatsApp,Facebook,Hangouts,SMS,Skype\n";

    fn load(prefs: &str) -> Result<(PreferenceDataset, LoadReport), DatasetError> {
        PreferenceDataset::from_readers(prefs.as_bytes(), TOPICS.as_bytes(), LoadOptions::default())
    }

    #[test]
    fn loads_fixture() {
        let prefs = "node_id,topic,ranking\n\
            0,Chatting app,WhatsApp>Facebook>Hangouts>SMS>Skype\n\
            1,Chatting app,Skype>SMS>Hangouts>Facebook>WhatsApp\n\
            2,Chatting app,SMS>WhatsApp>Skype>Facebook>Hangouts\n";
        let (ds, report) = load(prefs).unwrap();
        assert_eq!(report.node_count, 3);
        assert_eq!(
            report.per_topic_complete,
            vec![("Chatting app".to_string(), 3)]
        );
        assert_eq!(ds.ranking(2, 0).unwrap().word(), &[3, 0, 4, 1, 2]);
    }

    #[test]
    fn rejects_bad_rankings() {
        let dup = "node_id,topic,ranking\n0,Chatting app,WhatsApp>WhatsApp>SMS>Skype>Hangouts\n";
        assert!(matches!(
            load(dup),
            Err(DatasetError::DuplicateItem {
                line: 2,
                node: 0,
                ..
            })
        ));
        let short = "node_id,topic,ranking\n0,Chatting app,WhatsApp>SMS>Skype>Hangouts\n";
        match load(short) {
            Err(DatasetError::IncompleteRanking { missing, line, .. }) => {
                assert_eq!(missing, "Facebook");
                assert_eq!(line, 2);
            }
            other => panic!("unexpected {other:?}"),
        }
        let unknown = "node_id,topic,ranking\n0,Lifestyle,WhatsApp>Facebook>Hangouts>SMS>Skype\n";
        assert!(matches!(
            load(unknown),
            Err(DatasetError::UnknownTopic { .. })
        ));
        let bad_id = "node_id,topic,ranking\nx,Chatting app,WhatsApp>Facebook>Hangouts>SMS>Skype\n";
        assert!(matches!(
            load(bad_id),
            Err(DatasetError::Malformed { line: 2, .. })
        ));
        let twice = "node_id,topic,ranking\n0,Chatting app,WhatsApp>Facebook>Hangouts>SMS>Skype\n0,Chatting app,WhatsApp>Facebook>Hangouts>SMS>Skype\n";
        assert!(matches!(
            load(twice),
            Err(DatasetError::DuplicateEntry { line: 3, .. })
        ));
    }

    #[test]
    fn drop_incomplete_policy() {
        let prefs = "node_id,topic,ranking\n0,Chatting app,WhatsApp>SMS>Skype>Hangouts\n1,Chatting app,WhatsApp>Facebook>Hangouts>SMS>Skype\n";
        let opts = LoadOptions {
            drop_incomplete: true,
            ..Default::default()
        };
        let (ds, report) =
            PreferenceDataset::from_readers(prefs.as_bytes(), TOPICS.as_bytes(), opts).unwrap();
        assert_eq!(report.dropped_lines, vec![2]);
        assert_eq!(ds.node_ids().into_iter().collect::<Vec<_>>(), vec![1]);
    }

    #[test]
    fn topics_schema_checked() {
        let bad = "topic,item1,item2,item3,item4\nX,a,b,c,d\n";
        let r = PreferenceDataset::from_readers(
            "node_id,topic,ranking\n".as_bytes(),
            bad.as_bytes(),
            LoadOptions::default(),
        );
        assert!(matches!(r, Err(DatasetError::Schema(_))));
    }

    #[test]
    fn subset_extraction_example() {
        let mut ds =
            PreferenceDataset::new(vec![TopicSpec::new("t", ["A", "B", "C", "D", "E"]).unwrap()])
                .unwrap();
        ds.insert(7, 0, crate::perm::parse_ordering("ADCEB").unwrap())
            .unwrap();
        let sets = extract_subsets(&ds).unwrap();
        assert_eq!(sets.len(), 10);
        // {A, B, E} = indices {0, 1, 4}
        let abe = sets.iter().find(|s| s.kept_items == [0, 1, 4]).unwrap();
        assert_eq!(abe.items.format(&abe.assignment[&7]), "AEB");
        assert_eq!(abe.index(), abe.subset_rank);
        assert_eq!(item_subsets()[0], [0, 1, 2]);
        assert_eq!(item_subsets()[9], [2, 3, 4]);
    }

    #[test]
    fn distribution_counts() {
        let o: Vec<Permutation> = ["ABC", "ABC", "CBA", "BAC"]
            .iter()
            .map(|s| crate::perm::parse_ordering(s).unwrap())
            .collect();
        let d = EmpiricalDistribution::from_orderings(&o).unwrap();
        assert_eq!(d.weights(), [0.5, 0.0, 0.25, 0.0, 0.0, 0.25]);
        assert_eq!(d.counts().iter().sum::<u64>(), d.sample_count());
        assert!(EmpiricalDistribution::from_orderings(std::iter::empty()).is_err());
    }

    #[test]
    fn point_mass_sampling() {
        let d = EmpiricalDistribution::from_counts([0, 0, 0, 5, 0, 0]).unwrap();
        let a = sample_assignment(&d, 0..50, 9);
        assert!(a.values().all(|p| p.lex_index() == 3));
        assert_eq!(sample_assignment(&d, 0..50, 9), a);
    }

    #[test]
    fn mallows_extremes() {
        let reference = Permutation::new(vec![3, 1, 4, 0, 2]).unwrap();
        let mut r = rng::seeded(1);
        for _ in 0..20 {
            assert_eq!(sample_mallows(&reference, 0.0, &mut r), reference);
        }
        let ds = generate_synthetic_dataset(10, 2, 3, 1.0).unwrap();
        for t in 0..2 {
            let first = ds.ranking(0, t).unwrap();
            assert!((0..10).all(|n| ds.ranking(n, t) == Some(first)));
        }
    }

    #[test]
    fn synthetic_roundtrip() {
        let ds = generate_synthetic_dataset(20, 8, 5, 0.3).unwrap();
        let (mut p, mut t) = (Vec::new(), Vec::new());
        ds.write_preferences(&mut p).unwrap();
        ds.write_topics(&mut t).unwrap();
        let (back, report) =
            PreferenceDataset::from_readers(p.as_slice(), t.as_slice(), LoadOptions::default())
                .unwrap();
        assert_eq!(back, ds);
        assert_eq!(report.node_count, 20);
        let mut p2 = Vec::new();
        back.write_preferences(&mut p2).unwrap();
        assert_eq!(p, p2);
        assert!(generate_synthetic_dataset(2, 1, 0, 0.0).is_err());
        assert_eq!(
            generate_synthetic_dataset(5, 10, 0, 0.0)
                .unwrap()
                .topics()
                .len(),
            10
        );
    }

    #[test]
    fn community_assignment_full_homophily() {
        let blocks = [0, 0, 0, 1, 1, 1];
        let a = community_assignment(&blocks, 1.0, 4);
        assert_eq!(a[&0], a[&2]);
        assert_eq!(a[&3], a[&5]);
    }
}
