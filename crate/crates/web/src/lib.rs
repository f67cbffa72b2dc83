//! Browser bindings: classify a triad, tabulate class counts, and run a small
//! census of a planted-community network against its null ensemble.
//!
//! Each export returns a JSON string. The `*_json` functions hold the logic
//! and are what native tests exercise.

use preftriad::analysis::{self, compare, default_swaps, null_ensemble, NullMode};
use preftriad::count::count_table;
use preftriad::dataset::{community_assignment, PreferenceSet};
use preftriad::perm::AlternativeAlphabet;
use preftriad::triad::{canonicalize, classify3, describe_class, PreferenceTriad};
use preftriad::{plot, Graph};
use serde_json::json;
use wasm_bindgen::prelude::*;

const DEMO_NODES: usize = 240;
const DEMO_COMMUNITIES: usize = 8;
const MAX_REPLICATES: usize = 20;
const MAX_COUNT_N: usize = 30;

pub fn classify_json(a: &str, b: &str, c: &str) -> Result<String, String> {
    let alphabet = AlternativeAlphabet::default_for(3);
    let parse = |s: &str| alphabet.parse(s.trim()).map_err(|e| format!("`{s}`: {e}"));
    let t = PreferenceTriad::new(parse(a)?, parse(b)?, parse(c)?).map_err(|e| e.to_string())?;
    let class = classify3(&t).map_err(|e| e.to_string())?;
    let canonical = canonicalize(&t);
    Ok(json!({
        "class": class,
        "canonical": canonical.triad().format(&alphabet),
        "descriptor": describe_class(canonical.triad()),
    })
    .to_string())
}

pub fn class_counts_json(n_min: usize, n_max: usize) -> Result<String, String> {
    if n_min < 2 || n_min > n_max || n_max > MAX_COUNT_N {
        return Err(format!("need 2 <= n_min <= n_max <= {MAX_COUNT_N}"));
    }
    let rows = count_table(n_min, n_max).map_err(|e| e.to_string())?;
    let rows: Vec<_> = rows
        .iter()
        .map(|r| {
            json!({
                "n": r.n,
                "factorial": r.factorial.to_string(),
                "order3_count": r.order3.to_string(),
                "class_count": r.classes.to_string(),
            })
        })
        .collect();
    Ok(serde_json::Value::from(rows).to_string())
}

pub fn census_demo_json(homophily: f64, replicates: usize, seed: u64) -> Result<String, String> {
    if !(0.0..=1.0).contains(&homophily) {
        return Err(format!("homophily {homophily} outside [0, 1]"));
    }
    if !(1..=MAX_REPLICATES).contains(&replicates) {
        return Err(format!("replicates must be between 1 and {MAX_REPLICATES}"));
    }
    let (g, blocks) = Graph::planted_partition(DEMO_NODES, DEMO_COMMUNITIES, 0.25, 0.01, seed);
    let ps = PreferenceSet {
        topic_index: 0,
        topic: "demo".into(),
        subset_rank: 0,
        kept_items: [0, 1, 2],
        items: AlternativeAlphabet::default_for(3),
        assignment: community_assignment(&blocks, homophily, seed.wrapping_add(1)),
    };
    let observed = analysis::census(&g, &ps.assignment).map_err(|e| e.to_string())?;
    let ensemble = null_ensemble(
        &g,
        &ps,
        replicates,
        NullMode::RewireResample,
        seed,
        default_swaps(&g),
    )
    .map_err(|e| e.to_string())?;
    let reps: Vec<_> = ensemble
        .replicates
        .iter()
        .map(|r| r.histogram.clone())
        .collect();
    let title = format!("homophily {homophily:.2}, {replicates} null replicates");
    let svg = plot::histogram_svg(&title, &observed, &reps);
    let comparison = compare(&observed, &ensemble).ok();
    Ok(json!({
        "nodes": g.node_count(),
        "edges": g.edge_count(),
        "triangles": observed.total,
        "observed": observed.frequencies(),
        "comparison": comparison,
        "svg": svg,
    })
    .to_string())
}

fn js(r: Result<String, String>) -> Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn classify(a: &str, b: &str, c: &str) -> Result<String, JsValue> {
    js(classify_json(a, b, c))
}

#[wasm_bindgen]
pub fn class_counts(n_min: usize, n_max: usize) -> Result<String, JsValue> {
    js(class_counts_json(n_min, n_max))
}

#[wasm_bindgen]
pub fn census_demo(homophily: f64, replicates: usize, seed: u32) -> Result<String, JsValue> {
    js(census_demo_json(homophily, replicates, seed as u64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    #[test]
    fn classify_reports_class_and_canonical_form() {
        let v: Value = serde_json::from_str(&classify_json("BAC", "BCA", "ABC").unwrap()).unwrap();
        assert_eq!(v["class"], 3);
        assert_eq!(v["canonical"], "ABC ACB BAC");
        assert!(classify_json("ABC", "AB", "ABC").is_err());
    }

    #[test]
    fn counts_are_exact_strings() {
        let v: Value = serde_json::from_str(&class_counts_json(3, 6).unwrap()).unwrap();
        let counts: Vec<&str> = v
            .as_array()
            .unwrap()
            .iter()
            .map(|r| r["class_count"].as_str().unwrap())
            .collect();
        assert_eq!(counts, ["10", "111", "2467", "86787"]);
        assert!(class_counts_json(5, 4).is_err());
    }

    #[test]
    fn census_demo_is_deterministic_and_shows_homophily() {
        let a = census_demo_json(0.9, 5, 1).unwrap();
        assert_eq!(a, census_demo_json(0.9, 5, 1).unwrap());
        let v: Value = serde_json::from_str(&a).unwrap();
        assert!(v["svg"].as_str().unwrap().starts_with("<svg"));
        let c1 = &v["comparison"]["classes"][0];
        assert!(
            c1["observed_frequency"].as_f64().unwrap()
                > c1["ensemble_mean_frequency"].as_f64().unwrap()
        );
        assert!(census_demo_json(0.5, 0, 1).is_err());
    }
}
