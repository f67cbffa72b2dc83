//! Self-contained SVG grouped bar charts of class histograms.

use std::fmt::Write as _;

use crate::analysis::{ClassHistogram, CLASS_COUNT_3};

const WIDTH: f64 = 900.0;
const HEIGHT: f64 = 420.0;
const MARGIN_LEFT: f64 = 60.0;
const MARGIN_RIGHT: f64 = 140.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 50.0;

const OBSERVED_COLOR: &str = "#d62728";
const REPLICATE_COLORS: [&str; 10] = [
    "#1f77b4", "#aec7e8", "#ff7f0e", "#ffbb78", "#2ca02c", "#98df8a", "#9467bd", "#c5b0d5",
    "#8c564b", "#c49c94",
];

pub fn escape_xml(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// One group of bars per class: the observed frequency first, then one bar
/// per replicate (labelled R1, R2, ...).
pub fn histogram_svg(
    title: &str,
    observed: &ClassHistogram,
    replicates: &[ClassHistogram],
) -> String {
    let series: Vec<[f64; CLASS_COUNT_3]> = std::iter::once(observed)
        .chain(replicates)
        .map(ClassHistogram::frequencies)
        .collect();
    let max = series
        .iter()
        .flat_map(|s| s.iter().copied())
        .fold(0.0f64, f64::max);
    let y_max = if max > 0.0 {
        (max * 10.0).ceil() / 10.0
    } else {
        1.0
    };

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let group_w = plot_w / CLASS_COUNT_3 as f64;
    let bar_w = group_w * 0.8 / series.len() as f64;
    let y_of = |v: f64| MARGIN_TOP + plot_h * (1.0 - v / y_max);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        s,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        escape_xml(title)
    );

    for tick in 0..=5 {
        let v = y_max * tick as f64 / 5.0;
        let y = y_of(v);
        let _ = writeln!(
            s,
            r##"<line x1="{MARGIN_LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd"/>"##,
            MARGIN_LEFT + plot_w
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{v:.2}</text>"#,
            MARGIN_LEFT - 6.0,
            y + 4.0
        );
    }

    for class in 0..CLASS_COUNT_3 {
        let x0 = MARGIN_LEFT + group_w * class as f64 + group_w * 0.1;
        for (i, values) in series.iter().enumerate() {
            let v = values[class];
            let color = if i == 0 {
                OBSERVED_COLOR
            } else {
                REPLICATE_COLORS[(i - 1) % REPLICATE_COLORS.len()]
            };
            let y = y_of(v);
            let _ = writeln!(
                s,
                r#"<rect x="{:.2}" y="{y:.2}" width="{bar_w:.2}" height="{:.2}" fill="{color}"/>"#,
                x0 + bar_w * i as f64,
                MARGIN_TOP + plot_h - y
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            MARGIN_LEFT + group_w * (class as f64 + 0.5),
            MARGIN_TOP + plot_h + 18.0,
            class + 1
        );
    }
    let _ = writeln!(
        s,
        r#"<line x1="{MARGIN_LEFT}" y1="{0:.2}" x2="{1:.2}" y2="{0:.2}" stroke="black"/>"#,
        MARGIN_TOP + plot_h,
        MARGIN_LEFT + plot_w
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">equivalence class</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 10.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">frequency</text>"#,
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0
    );

    let legend_x = WIDTH - MARGIN_RIGHT + 15.0;
    for i in 0..series.len() {
        let (label, color) = if i == 0 {
            ("observed".to_string(), OBSERVED_COLOR)
        } else {
            (
                format!("R{i}"),
                REPLICATE_COLORS[(i - 1) % REPLICATE_COLORS.len()],
            )
        };
        let y = MARGIN_TOP + 16.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<rect x="{legend_x}" y="{y:.2}" width="10" height="10" fill="{color}"/><text x="{}" y="{:.2}">{label}</text>"#,
            legend_x + 15.0,
            y + 9.0
        );
    }
    s.push_str("</svg>\n");
    s
}
