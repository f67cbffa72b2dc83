use std::collections::BTreeMap;

use preftriad::analysis::{self, ExperimentConfig, NullMode};
use preftriad::dataset::{
    extract_subsets, generate_synthetic_dataset, item_subsets, LoadOptions, PreferenceDataset,
    SUBSETS_PER_TOPIC,
};
use preftriad::perm::Permutation;
use preftriad::Graph;

fn small_dataset() -> PreferenceDataset {
    generate_synthetic_dataset(60, 2, 5, 0.3).unwrap()
}

#[test]
fn save_and_load_round_trip() {
    let ds = small_dataset();
    let dir = tempfile::tempdir().unwrap();
    let prefs = dir.path().join("preferences.csv");
    let topics = dir.path().join("topics.csv");
    ds.save(&prefs, &topics).unwrap();
    let (back, report) = PreferenceDataset::load(&prefs, &topics, LoadOptions::default()).unwrap();
    assert_eq!(report.node_count, 60);
    assert!(report.per_topic_complete.iter().all(|(_, c)| *c == 60));
    assert_eq!(back.rankings().count(), ds.rankings().count());
    for (key, p) in ds.rankings() {
        assert_eq!(back.ranking(key.0, key.1), Some(p));
    }
}

#[test]
fn extraction_preserves_each_nodes_order() {
    let ds = small_dataset();
    let sets = extract_subsets(&ds).unwrap();
    assert_eq!(sets.len(), 2 * SUBSETS_PER_TOPIC);
    for (i, ps) in sets.iter().enumerate() {
        assert_eq!(ps.index(), i);
        assert_eq!(ps.kept_items, item_subsets()[ps.subset_rank]);
        let labels = ds.topics()[ps.topic_index].items.labels();
        for (&node, short) in &ps.assignment {
            let full = ds.ranking(node, ps.topic_index).unwrap();
            let positions: Vec<usize> = short
                .word()
                .iter()
                .map(|&k| {
                    let item = ps.kept_items[k];
                    assert_eq!(ps.items.labels()[k], labels[item]);
                    full.position_of(item).unwrap()
                })
                .collect();
            assert!(
                positions.windows(2).all(|w| w[0] < w[1]),
                "node {node}: {positions:?}"
            );
        }
    }
}

#[test]
fn experiments_are_reproducible_and_seed_sensitive() {
    let ds = small_dataset();
    let g = Graph::gnm(60, 300, 9).unwrap();
    let config = ExperimentConfig {
        seed: 3,
        replicates: 4,
        ..Default::default()
    };
    let a = analysis::run_experiment(&ds, &g, &config).unwrap();
    let b = analysis::run_experiment(&ds, &g, &config).unwrap();
    assert_eq!(a.to_json(), b.to_json());
    let c = analysis::run_experiment(&ds, &g, &ExperimentConfig { seed: 4, ..config }).unwrap();
    assert_ne!(a.to_json(), c.to_json());
    assert_eq!(a.entries.len(), 20);
    assert_eq!(a.null_graphs.len(), 4);
    assert_eq!(a.config.swaps, analysis::default_swaps(&g));
    assert!(!a.config.connectivity_preserved);
}

#[test]
fn observed_counts_match_a_direct_tally() {
    let ds = small_dataset();
    let g = Graph::gnm(60, 400, 10).unwrap();
    let report = analysis::run_experiment(
        &ds,
        &g,
        &ExperimentConfig {
            replicates: 2,
            ..Default::default()
        },
    )
    .unwrap();
    let sets = extract_subsets(&ds).unwrap();
    for (entry, ps) in report.entries.iter().zip(&sets) {
        let mut counts = [0u64; 10];
        for (u, v, w) in g.triangles() {
            let t = preftriad::PreferenceTriad::new(
                ps.assignment[&u].clone(),
                ps.assignment[&v].clone(),
                ps.assignment[&w].clone(),
            )
            .unwrap();
            counts[preftriad::classify3(&t).unwrap() - 1] += 1;
        }
        assert_eq!(entry.observed_histogram.as_ref().unwrap().counts, counts);
    }
}

#[test]
fn resample_only_keeps_the_graph() {
    let ds = small_dataset();
    let g = Graph::gnm(60, 300, 11).unwrap();
    let config = ExperimentConfig {
        replicates: 3,
        mode: NullMode::Resample,
        ..Default::default()
    };
    let report = analysis::run_experiment(&ds, &g, &config).unwrap();
    assert!(report.null_graphs.is_empty());
    for e in &report.entries {
        for r in &e.ensemble_summaries {
            assert_eq!(r.histogram.total, g.triangle_count());
            assert!(r.rewire_seed.is_none());
            assert!(r.resample_seed.is_some());
        }
    }
}

#[test]
fn rewire_only_keeps_the_orderings() {
    let ds = small_dataset();
    let g = Graph::gnm(60, 300, 12).unwrap();
    let config = ExperimentConfig {
        replicates: 3,
        mode: NullMode::Rewire,
        ..Default::default()
    };
    let report = analysis::run_experiment(&ds, &g, &config).unwrap();
    assert_eq!(report.null_graphs.len(), 3);
    for e in &report.entries {
        assert!(e
            .ensemble_summaries
            .iter()
            .all(|r| r.resample_seed.is_none()));
    }
}

#[test]
fn triangle_free_graph_is_flagged_not_fatal() {
    let ds = small_dataset();
    let ring: Vec<(usize, usize)> = (0..60).map(|u| (u, (u + 1) % 60)).collect();
    let (g, _) = Graph::from_edges_with_nodes(60, &ring);
    let report = analysis::run_experiment(
        &ds,
        &g,
        &ExperimentConfig {
            replicates: 2,
            ..Default::default()
        },
    )
    .unwrap();
    assert_eq!(report.entries.len(), 20);
    assert!(report
        .entries
        .iter()
        .all(|e| e.zero_triangles && e.comparison.is_none()));
    assert_eq!(report.flagged().count(), 20);
}

#[test]
fn missing_orderings_fail_only_their_set() {
    let g = Graph::from_edge_list(&[(0, 1), (1, 2), (0, 2)]).0;
    let mut assignment = BTreeMap::new();
    assignment.insert(0, Permutation::identity(3).unwrap());
    assignment.insert(1, Permutation::identity(3).unwrap());
    assert!(matches!(
        analysis::census(&g, &assignment),
        Err(analysis::AnalysisError::MissingAssignment(2))
    ));
}

#[test]
fn histogram_csv_has_one_row_per_class() {
    let ds = small_dataset();
    let g = Graph::gnm(60, 400, 13).unwrap();
    let report = analysis::run_experiment(
        &ds,
        &g,
        &ExperimentConfig {
            replicates: 2,
            ..Default::default()
        },
    )
    .unwrap();
    let mut buf = Vec::new();
    analysis::write_histogram_csv(&report.entries[0], &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 11);
    assert!(lines[0].starts_with("class_id,observed_count"));
}
