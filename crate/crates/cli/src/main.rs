use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use preftriad::analysis::{self, ExperimentConfig, NullMode};
use preftriad::count::{count_table, write_count_csv};
use preftriad::dataset::{generate_synthetic_dataset, LoadOptions, PreferenceDataset};
use preftriad::graph::GraphError;
use preftriad::perm::AlternativeAlphabet;
use preftriad::rng::DEFAULT_SEED;
use preftriad::triad::{
    canonicalize, classify3, describe_class, enumerate_classes, ClassTable, PreferenceTriad,
};
use preftriad::{plot, Graph};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "preftriad",
    version,
    about = "Preference triad classes and network class census"
)]
struct Cli {
    /// Seed for every random stream of the run.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Output directory (created if absent). Without it, tables go to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output formats, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    format: Vec<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(Subcommand)]
enum Command {
    /// Class counts for every n in a range.
    Count {
        n_min: usize,
        n_max: usize,
        /// Check the closed form against brute-force enumeration for n <= 4.
        #[arg(long)]
        verify: bool,
    },
    /// Class, canonical form and descriptor of a triad on three alternatives.
    Classify {
        first: String,
        second: String,
        third: String,
        /// Comma-separated alternative labels (default A,B,C).
        #[arg(long, value_delimiter = ',')]
        labels: Vec<String>,
    },
    /// Class census of every preference set against the null ensemble.
    Analyze {
        #[arg(long)]
        edges: PathBuf,
        #[arg(long)]
        prefs: PathBuf,
        #[arg(long)]
        topics: PathBuf,
        #[arg(long, default_value_t = 10)]
        replicates: usize,
        #[arg(long, default_value = "rewire+resample", value_parser = parse_mode)]
        mode: NullMode,
        /// Successful swaps per edge in each rewired replicate.
        #[arg(long, default_value_t = 10)]
        swaps_per_edge: usize,
        /// Skip preference lines that do not rank every item of their topic.
        #[arg(long)]
        drop_incomplete: bool,
    },
    /// Degree-preserving rewiring of an edge list.
    Rewire {
        edges: PathBuf,
        /// Successful swaps (default: ten per edge).
        #[arg(long)]
        swaps: Option<usize>,
    },
    /// Synthetic preference dataset plus a companion random graph.
    GenSynth {
        nodes: usize,
        #[arg(default_value_t = 8)]
        topics: usize,
        /// 0 draws rankings uniformly, 1 gives every node its topic's reference ranking.
        #[arg(long, default_value_t = 0.0)]
        skew: f64,
        #[arg(long, default_value_t = 14.524)]
        mean_degree: f64,
    },
    /// Equivalence class table as CSV.
    ClassTable {
        #[arg(long, default_value_t = 3)]
        n: usize,
    },
}

fn parse_mode(s: &str) -> Result<NullMode, String> {
    s.parse()
}

enum Failure {
    Usage(String),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.into())
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Count {
            n_min,
            n_max,
            verify,
        } => cmd_count(cli, *n_min, *n_max, *verify),
        Command::Classify {
            first,
            second,
            third,
            labels,
        } => cmd_classify(cli, [first, second, third], labels),
        Command::Analyze {
            edges,
            prefs,
            topics,
            replicates,
            mode,
            swaps_per_edge,
            drop_incomplete,
        } => {
            if *replicates == 0 {
                return Err(Failure::Usage("--replicates must be at least 1".into()));
            }
            let config = ExperimentConfig {
                seed: cli.seed,
                replicates: *replicates,
                mode: *mode,
                swaps: None,
            };
            cmd_analyze(
                cli,
                edges,
                prefs,
                topics,
                config,
                *swaps_per_edge,
                *drop_incomplete,
            )
        }
        Command::Rewire { edges, swaps } => cmd_rewire(cli, edges, *swaps),
        Command::GenSynth {
            nodes,
            topics,
            skew,
            mean_degree,
        } => cmd_gen_synth(cli, *nodes, *topics, *skew, *mean_degree),
        Command::ClassTable { n } => cmd_class_table(cli, *n),
    }
}

fn wants(cli: &Cli, f: Format, default: bool) -> bool {
    if cli.format.is_empty() {
        default
    } else {
        cli.format.contains(&f)
    }
}

fn out_dir(cli: &Cli) -> Result<Option<&Path>, Failure> {
    match &cli.out {
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            Ok(Some(dir))
        }
        None => Ok(None),
    }
}

/// Writes to `<out>/<name>` when an output directory is set, else stdout.
fn sink(cli: &Cli, name: &str) -> Result<Box<dyn Write>, Failure> {
    Ok(match out_dir(cli)? {
        Some(dir) => {
            let path = dir.join(name);
            Box::new(BufWriter::new(
                File::create(&path).with_context(|| format!("creating {}", path.display()))?,
            ))
        }
        None => Box::new(io::stdout().lock()),
    })
}

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

fn read_graph(path: &Path) -> anyhow::Result<Graph> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let (g, report) = Graph::read_edge_list(BufReader::new(file))
        .with_context(|| format!("reading {}", path.display()))?;
    if report.self_loops_dropped + report.duplicates_merged > 0 {
        eprintln!(
            "note: {}: dropped {} self-loops, merged {} duplicate edges",
            path.display(),
            report.self_loops_dropped,
            report.duplicates_merged
        );
    }
    Ok(g)
}

fn cmd_count(cli: &Cli, n_min: usize, n_max: usize, verify: bool) -> Outcome {
    if n_min < 2 || n_min > n_max {
        return Err(Failure::Usage(format!(
            "invalid range {n_min}..{n_max}: need 2 <= n_min <= n_max"
        )));
    }
    let rows = count_table(n_min, n_max).map_err(|e| Failure::Usage(e.to_string()))?;
    if wants(cli, Format::Json, false) {
        let value: Vec<_> = rows
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
        let mut w = sink(cli, "counts.json")?;
        writeln!(
            w,
            "{}",
            serde_json::to_string_pretty(&value).map_err(anyhow::Error::from)?
        )?;
        w.flush()?;
    }
    if wants(cli, Format::Csv, true) {
        let w = sink(cli, "counts.csv")?;
        write_count_csv(&rows, w).map_err(anyhow::Error::from)?;
    }
    if verify {
        let mut mismatches = 0;
        for r in rows.iter().filter(|r| r.n <= 4) {
            let found = enumerate_classes(r.n, None)
                .map_err(anyhow::Error::from)?
                .len();
            let agree = r.classes == found.into();
            if !agree {
                mismatches += 1;
            }
            eprintln!(
                "verify n={}: enumeration {found}, formula {} ({})",
                r.n,
                r.classes,
                if agree { "agree" } else { "DISAGREE" }
            );
        }
        if mismatches > 0 {
            return Err(anyhow!("{mismatches} counts disagree with enumeration").into());
        }
    }
    Ok(())
}

fn cmd_classify(cli: &Cli, orderings: [&String; 3], labels: &[String]) -> Outcome {
    let alphabet = if labels.is_empty() {
        AlternativeAlphabet::default_for(3)
    } else {
        AlternativeAlphabet::new(labels.iter().cloned())
            .map_err(|e| Failure::Usage(e.to_string()))?
    };
    if alphabet.len() != 3 {
        return Err(Failure::Usage(format!(
            "need 3 labels, got {}",
            alphabet.len()
        )));
    }
    let parsed = orderings
        .iter()
        .map(|s| {
            alphabet
                .parse(s)
                .map_err(|e| Failure::Usage(format!("`{s}`: {e}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let [a, b, c]: [_; 3] = parsed.try_into().expect("three orderings");
    let t = PreferenceTriad::new(a, b, c).map_err(|e| Failure::Usage(e.to_string()))?;
    let class = classify3(&t).map_err(anyhow::Error::from)?;
    let canonical = canonicalize(&t);
    let descriptor = describe_class(canonical.triad());
    let canonical_text = canonical.triad().format(&alphabet);
    let mut w = sink(cli, "classify.json")?;
    if wants(cli, Format::Json, false) {
        let value = json!({
            "class": class,
            "canonical": canonical_text,
            "descriptor": descriptor,
        });
        writeln!(
            w,
            "{}",
            serde_json::to_string_pretty(&value).map_err(anyhow::Error::from)?
        )?;
    } else {
        writeln!(w, "class {class}")?;
        writeln!(w, "canonical {canonical_text}")?;
        writeln!(
            w,
            "identical pairs {}, shared top {}, pairwise distances {:?}",
            descriptor.identical_pairs, descriptor.shared_top, descriptor.pairwise_distances
        )?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_analyze(
    cli: &Cli,
    edges: &Path,
    prefs: &Path,
    topics: &Path,
    mut config: ExperimentConfig,
    swaps_per_edge: usize,
    drop_incomplete: bool,
) -> Outcome {
    let g = read_graph(edges)?;
    let options = LoadOptions {
        drop_incomplete,
        ..Default::default()
    };
    let (ds, load) =
        PreferenceDataset::load(prefs, topics, options).context("loading preference dataset")?;
    if !load.dropped_lines.is_empty() {
        eprintln!(
            "note: dropped {} incomplete rankings",
            load.dropped_lines.len()
        );
    }
    config.swaps = Some(if g.edge_count() < 2 {
        0
    } else {
        swaps_per_edge * g.edge_count()
    });
    let report = analysis::run_experiment(&ds, &g, &config).context("running experiment")?;

    let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("out"));
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    if wants(cli, Format::Json, true) {
        let mut w = create(&dir.join("report.json"))?;
        writeln!(w, "{}", report.to_json())?;
        w.flush()?;
    }
    for entry in &report.entries {
        let stem = format!("set_{:02}", entry.index);
        if wants(cli, Format::Csv, true) {
            analysis::write_histogram_csv(entry, create(&dir.join(format!("{stem}.csv")))?)
                .map_err(anyhow::Error::from)?;
        }
        if wants(cli, Format::Svg, true) {
            let title = format!("{} / {}", entry.topic, entry.subset.join(", "));
            let observed = entry
                .observed_histogram
                .as_ref()
                .map(|h| analysis::ClassHistogram {
                    counts: h.counts,
                    total: h.total,
                })
                .unwrap_or_default();
            let reps: Vec<_> = entry
                .ensemble_summaries
                .iter()
                .map(|r| r.histogram.clone())
                .collect();
            fs::write(
                dir.join(format!("{stem}.svg")),
                plot::histogram_svg(&title, &observed, &reps),
            )?;
        }
    }

    let mut out = io::stdout().lock();
    writeln!(
        out,
        "graph: {} nodes, {} edges, {} triangles, closed triangle fraction {:.4}",
        report.graph.nodes,
        report.graph.edges,
        report.graph.triangles,
        report.graph.closed_triangle_fraction
    )?;
    writeln!(
        out,
        "{:>3}  {:<28} {:<44} {:>9} {:>8} {:>9}",
        "set", "topic", "subset", "triangles", "TV", "p"
    )?;
    for e in &report.entries {
        let subset = e.subset.join(",");
        let triangles = e.observed_histogram.as_ref().map_or(0, |h| h.total);
        match (&e.comparison, &e.error) {
            (Some(c), _) => writeln!(
                out,
                "{:>3}  {:<28} {:<44} {:>9} {:>8.4} {:>9.3}",
                e.index, e.topic, subset, triangles, c.total_variation, c.overall_p_value
            )?,
            (None, Some(err)) => writeln!(
                out,
                "{:>3}  {:<28} {:<44} error: {err}",
                e.index, e.topic, subset
            )?,
            (None, None) => writeln!(
                out,
                "{:>3}  {:<28} {:<44} {:>9} no comparison",
                e.index, e.topic, subset, triangles
            )?,
        }
    }
    writeln!(
        out,
        "wrote {} sets to {}",
        report.entries.len(),
        dir.display()
    )?;
    Ok(())
}

fn cmd_rewire(cli: &Cli, edges: &Path, swaps: Option<usize>) -> Outcome {
    let g = read_graph(edges)?;
    let swaps = swaps.unwrap_or_else(|| analysis::default_swaps(&g));
    let (result, saturated) = match g.rewire(swaps, cli.seed) {
        Ok(r) => (r, false),
        Err(GraphError::Saturated { partial }) => (*partial, true),
        Err(e) => {
            return Err(anyhow::Error::from(e)
                .context(format!("rewiring {}", edges.display()))
                .into())
        }
    };
    let (out_graph, report) = result;
    let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("out"));
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join("rewired.edges");
    let mut w = create(&path)?;
    out_graph.write_edge_list(&mut w)?;
    w.flush()?;

    let preserved = out_graph.degree_sequence() == g.degree_sequence();
    let mut out = io::stdout().lock();
    writeln!(
        out,
        "degree sequence preserved: {}",
        if preserved { "yes" } else { "NO" }
    )?;
    writeln!(
        out,
        "swaps {}/{} successful, {} attempts, {} rejected (self-loop), {} rejected (parallel edge)",
        report.successful,
        report.requested,
        report.attempts,
        report.rejected_loops,
        report.rejected_parallel
    )?;
    writeln!(
        out,
        "closed triangle fraction {:.4} -> {:.4}",
        g.closed_triangle_fraction(),
        out_graph.closed_triangle_fraction()
    )?;
    writeln!(out, "wrote {}", path.display())?;
    if wants(cli, Format::Json, false) {
        let mut w = create(&dir.join("rewire.json"))?;
        writeln!(
            w,
            "{}",
            serde_json::to_string_pretty(&report).map_err(anyhow::Error::from)?
        )?;
        w.flush()?;
    }
    if saturated {
        return Err(anyhow!(
            "saturated after {} attempts: {} of {} swaps succeeded; partial result written",
            report.attempts,
            report.successful,
            report.requested
        )
        .into());
    }
    if !preserved {
        return Err(anyhow!("degree sequence changed").into());
    }
    Ok(())
}

fn cmd_gen_synth(cli: &Cli, nodes: usize, topics: usize, skew: f64, mean_degree: f64) -> Outcome {
    if nodes < 3 {
        return Err(Failure::Usage(format!(
            "need at least 3 nodes, got {nodes}"
        )));
    }
    if topics == 0 {
        return Err(Failure::Usage("need at least one topic".into()));
    }
    if !(0.0..=1.0).contains(&skew) {
        return Err(Failure::Usage(format!("skew {skew} outside [0, 1]")));
    }
    let max_edges = nodes * (nodes - 1) / 2;
    if mean_degree.is_nan()
        || mean_degree < 0.0
        || (mean_degree * nodes as f64 / 2.0).round() as usize > max_edges
    {
        return Err(Failure::Usage(format!(
            "mean degree {mean_degree} impossible with {nodes} nodes"
        )));
    }
    let edges = (mean_degree * nodes as f64 / 2.0).round() as usize;
    let ds =
        generate_synthetic_dataset(nodes, topics, cli.seed, skew).context("generating dataset")?;
    let g = Graph::gnm(nodes, edges, preftriad::rng::derive_seed(cli.seed, 3, 0))
        .context("generating graph")?;

    let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("out"));
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    ds.save(&dir.join("preferences.csv"), &dir.join("topics.csv"))
        .context("writing dataset")?;
    let mut w = create(&dir.join("edges.txt"))?;
    g.write_edge_list(&mut w)?;
    w.flush()?;
    println!(
        "wrote {} nodes, {} topics, {} edges to {}",
        nodes,
        topics,
        g.edge_count(),
        dir.display()
    );
    Ok(())
}

fn cmd_class_table(cli: &Cli, n: usize) -> Outcome {
    if !(2..=5).contains(&n) {
        return Err(Failure::Usage(format!(
            "class table supports 2 <= n <= 5, got {n}"
        )));
    }
    let owned;
    let table: &ClassTable = if n == 3 {
        ClassTable::three()
    } else {
        owned = enumerate_classes(n, None).map_err(anyhow::Error::from)?;
        &owned
    };
    let w = sink(cli, "class_table.csv")?;
    table.write_csv(w).map_err(anyhow::Error::from)?;
    Ok(())
}
