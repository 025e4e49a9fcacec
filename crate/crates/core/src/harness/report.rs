//! Static report rendering: one SVG chart, one CSV table, and an HTML
//! index per bundle. Output is fully deterministic — no timestamps, no
//! randomness — so reruns produce byte-identical artifacts.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

use super::compare::compare_methods;
use super::{Criterion, RunResults};

/// A set of named runs to render side by side. The first method is the
/// baseline: significance stars on the chart compare each later method
/// against it.
#[derive(Debug)]
pub struct ReportBundle<'a> {
    pub title: String,
    pub methods: Vec<(String, &'a RunResults)>,
}

const PALETTE: [&str; 8] = [
    "#4C78A8", "#F58518", "#54A24B", "#E45756", "#72B7B2", "#B279A2", "#FF9DA6", "#9D755D",
];

const MARGIN_LEFT: f64 = 50.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_BOTTOM: f64 = 92.0;
const PLOT_HEIGHT: f64 = 240.0;
const BAR_WIDTH: f64 = 22.0;
const BAR_GAP: f64 = 4.0;
const GROUP_GAP: f64 = 30.0;

/// Render `bundle` into `dir`, producing exactly `chart.svg`, `table.csv`,
/// and `index.html`. Returns the written paths in that order.
pub fn render_report(bundle: &ReportBundle<'_>, dir: &Path) -> Result<Vec<PathBuf>> {
    if bundle.methods.is_empty() {
        return Err(Error::InvalidParameter(
            "report bundle needs at least one method".to_string(),
        ));
    }
    let criteria = report_criteria(bundle);
    let ks = report_ks(bundle);
    if criteria.is_empty() || ks.is_empty() {
        return Err(Error::InvalidParameter(
            "report bundle has no aggregates to render".to_string(),
        ));
    }

    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let chart_path = dir.join("chart.svg");
    let table_path = dir.join("table.csv");
    let index_path = dir.join("index.html");

    let svg = render_chart(bundle, &criteria, &ks);
    fs::write(&chart_path, svg).map_err(|e| Error::io(&chart_path, e))?;

    let table = render_table(bundle, &criteria, &ks)?;
    fs::write(&table_path, table).map_err(|e| Error::io(&table_path, e))?;

    let html = render_index(bundle, &criteria, &ks);
    fs::write(&index_path, html).map_err(|e| Error::io(&index_path, e))?;

    Ok(vec![chart_path, table_path, index_path])
}

/// Criteria present in any method's aggregates, in canonical order.
fn report_criteria(bundle: &ReportBundle<'_>) -> Vec<Criterion> {
    Criterion::ALL
        .iter()
        .copied()
        .filter(|c| {
            bundle
                .methods
                .iter()
                .any(|(_, r)| r.aggregates.iter().any(|a| a.metric_name == c.name()))
        })
        .collect()
}

/// Pose budgets present in any method's aggregates, ascending.
fn report_ks(bundle: &ReportBundle<'_>) -> Vec<usize> {
    let set: BTreeSet<usize> = bundle
        .methods
        .iter()
        .flat_map(|(_, r)| r.aggregates.iter().map(|a| a.k))
        .collect();
    set.into_iter().collect()
}

fn y_of(v: f64) -> f64 {
    MARGIN_TOP + PLOT_HEIGHT * (1.0 - v)
}

fn fmt2(v: f64) -> String {
    format!("{v:.2}")
}

fn escape_xml(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
        .replace('\'', "&apos;")
}

fn render_chart(bundle: &ReportBundle<'_>, criteria: &[Criterion], ks: &[usize]) -> String {
    let n_combo = bundle.methods.len() * ks.len();
    let group_width = n_combo as f64 * (BAR_WIDTH + BAR_GAP) + GROUP_GAP;
    let width = MARGIN_LEFT + criteria.len() as f64 * group_width + MARGIN_RIGHT;
    let height = MARGIN_TOP + PLOT_HEIGHT + MARGIN_BOTTOM;
    let baseline_y = y_of(0.0);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" \
         viewBox=\"0 0 {w} {h}\" font-family=\"sans-serif\">\n",
        w = fmt2(width),
        h = fmt2(height)
    ));
    svg.push_str(&format!(
        "  <text class=\"title\" x=\"{}\" y=\"18\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
        fmt2(width / 2.0),
        escape_xml(&bundle.title)
    ));

    // Horizontal gridlines and tick labels at 0.0, 0.2, ..., 1.0.
    for i in 0..=5 {
        let v = i as f64 * 0.2;
        let y = y_of(v);
        svg.push_str(&format!(
            "  <line class=\"grid\" x1=\"{}\" y1=\"{y}\" x2=\"{}\" y2=\"{y}\" stroke=\"#ddd\"/>\n",
            fmt2(MARGIN_LEFT),
            fmt2(width - MARGIN_RIGHT),
            y = fmt2(y)
        ));
        svg.push_str(&format!(
            "  <text class=\"ytick\" x=\"{}\" y=\"{}\" text-anchor=\"end\" font-size=\"10\">{v:.1}</text>\n",
            fmt2(MARGIN_LEFT - 6.0),
            fmt2(y + 3.0)
        ));
    }
    svg.push_str(&format!(
        "  <line class=\"axis\" x1=\"{x}\" y1=\"{}\" x2=\"{x}\" y2=\"{}\" stroke=\"#333\"/>\n",
        fmt2(MARGIN_TOP),
        fmt2(baseline_y),
        x = fmt2(MARGIN_LEFT)
    ));
    svg.push_str(&format!(
        "  <line class=\"axis\" x1=\"{}\" y1=\"{y}\" x2=\"{}\" y2=\"{y}\" stroke=\"#333\"/>\n",
        fmt2(MARGIN_LEFT),
        fmt2(width - MARGIN_RIGHT),
        y = fmt2(baseline_y)
    ));

    for (g, criterion) in criteria.iter().enumerate() {
        let group_x = MARGIN_LEFT + g as f64 * group_width + GROUP_GAP / 2.0;
        let group_center = group_x + n_combo as f64 * (BAR_WIDTH + BAR_GAP) / 2.0;
        svg.push_str(&format!(
            "  <text class=\"xlabel\" x=\"{x}\" y=\"{y}\" text-anchor=\"end\" font-size=\"10\" \
             transform=\"rotate(-25 {x} {y})\">{}</text>\n",
            escape_xml(criterion.label()),
            x = fmt2(group_center),
            y = fmt2(baseline_y + 16.0)
        ));

        for (m, (name, results)) in bundle.methods.iter().enumerate() {
            for (j, &k) in ks.iter().enumerate() {
                let combo = m * ks.len() + j;
                let x = group_x + combo as f64 * (BAR_WIDTH + BAR_GAP);
                let Some(agg) = results.aggregate_for(*criterion, k) else {
                    continue;
                };
                let top = y_of(agg.mean);
                let color = PALETTE[combo % PALETTE.len()];
                svg.push_str(&format!(
                    "  <rect class=\"bar\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{color}\">\
                     <title>{} k={k} {}: {:.3} &#177; {:.3}</title></rect>\n",
                    fmt2(x),
                    fmt2(top),
                    fmt2(BAR_WIDTH),
                    fmt2(baseline_y - top),
                    escape_xml(name),
                    escape_xml(criterion.label()),
                    agg.mean,
                    agg.sem
                ));

                // Error bar: always rendered, even when the SEM is zero.
                let cx = x + BAR_WIDTH / 2.0;
                let y_hi = y_of(agg.mean + agg.sem);
                let y_lo = y_of(agg.mean - agg.sem);
                svg.push_str(&format!(
                    "  <line class=\"errbar\" x1=\"{cx}\" y1=\"{}\" x2=\"{cx}\" y2=\"{}\" stroke=\"#333\"/>\n",
                    fmt2(y_hi),
                    fmt2(y_lo),
                    cx = fmt2(cx)
                ));
                for cap_y in [y_hi, y_lo] {
                    svg.push_str(&format!(
                        "  <line class=\"errcap\" x1=\"{}\" y1=\"{y}\" x2=\"{}\" y2=\"{y}\" stroke=\"#333\"/>\n",
                        fmt2(cx - 4.0),
                        fmt2(cx + 4.0),
                        y = fmt2(cap_y)
                    ));
                }

                // Significance stars versus the baseline method.
                if m > 0 {
                    if let Ok(cmp) =
                        compare_methods(results, bundle.methods[0].1, k, *criterion)
                    {
                        if !cmp.stars.is_empty() {
                            svg.push_str(&format!(
                                "  <text class=\"star\" x=\"{}\" y=\"{}\" text-anchor=\"middle\" \
                                 font-size=\"11\">{}</text>\n",
                                fmt2(cx),
                                fmt2(y_hi - 4.0),
                                cmp.stars
                            ));
                        }
                    }
                }
            }
        }
    }

    // Legend: one swatch per (method, k) combination.
    let mut legend_x = MARGIN_LEFT;
    let legend_y = height - 12.0;
    for (m, (name, _)) in bundle.methods.iter().enumerate() {
        for (j, &k) in ks.iter().enumerate() {
            let combo = m * ks.len() + j;
            let color = PALETTE[combo % PALETTE.len()];
            let label = format!("{name} (k={k})");
            svg.push_str(&format!(
                "  <rect class=\"swatch\" x=\"{}\" y=\"{}\" width=\"10\" height=\"10\" fill=\"{color}\"/>\n",
                fmt2(legend_x),
                fmt2(legend_y - 9.0)
            ));
            svg.push_str(&format!(
                "  <text class=\"legend\" x=\"{}\" y=\"{}\" font-size=\"10\">{}</text>\n",
                fmt2(legend_x + 14.0),
                fmt2(legend_y),
                escape_xml(&label)
            ));
            legend_x += 20.0 + 6.5 * label.chars().count() as f64;
        }
    }

    svg.push_str("</svg>\n");
    svg
}

fn render_table(
    bundle: &ReportBundle<'_>,
    criteria: &[Criterion],
    ks: &[usize],
) -> Result<String> {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["method".to_string(), "k".to_string(), "n".to_string()];
    header.extend(criteria.iter().map(|c| c.label().to_string()));
    wtr.write_record(&header)
        .map_err(|e| Error::Other(format!("table header: {e}")))?;
    for (name, results) in &bundle.methods {
        for &k in ks {
            let mut row = vec![name.clone(), k.to_string()];
            let n = criteria
                .iter()
                .find_map(|c| results.aggregate_for(*c, k).map(|a| a.n_structures));
            row.push(n.map_or_else(String::new, |n| n.to_string()));
            for criterion in criteria {
                row.push(match results.aggregate_for(*criterion, k) {
                    Some(a) => format!("{:.3} ± {:.3}", a.mean, a.sem),
                    None => String::new(),
                });
            }
            wtr.write_record(&row)
                .map_err(|e| Error::Other(format!("table row: {e}")))?;
        }
    }
    let bytes = wtr
        .into_inner()
        .map_err(|e| Error::Other(format!("table flush: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Other(format!("table utf-8: {e}")))
}

fn render_index(bundle: &ReportBundle<'_>, criteria: &[Criterion], ks: &[usize]) -> String {
    let mut html = String::new();
    html.push_str("<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n");
    html.push_str(&format!("<title>{}</title>\n", escape_xml(&bundle.title)));
    html.push_str("<style>body{font-family:sans-serif;margin:2em}table{border-collapse:collapse}\
                   td,th{border:1px solid #999;padding:4px 8px;text-align:right}\
                   th{background:#eee}</style>\n</head>\n<body>\n");
    html.push_str(&format!("<h1>{}</h1>\n", escape_xml(&bundle.title)));
    html.push_str("<ul>\n");
    for (name, results) in &bundle.methods {
        html.push_str(&format!(
            "<li>{}: dataset <code>{}</code>, {} entries scored, {} skipped</li>\n",
            escape_xml(name),
            escape_xml(&results.dataset_name),
            results.entries.len(),
            results.skipped.len()
        ));
    }
    html.push_str("</ul>\n");
    html.push_str("<p><img src=\"chart.svg\" alt=\"aggregate success rates\"></p>\n");
    html.push_str("<table>\n<tr><th>method</th><th>k</th>");
    for criterion in criteria {
        html.push_str(&format!("<th>{}</th>", escape_xml(criterion.label())));
    }
    html.push_str("</tr>\n");
    for (name, results) in &bundle.methods {
        for &k in ks {
            html.push_str(&format!("<tr><td>{}</td><td>{k}</td>", escape_xml(name)));
            for criterion in criteria {
                match results.aggregate_for(*criterion, k) {
                    Some(a) => {
                        html.push_str(&format!("<td>{:.3} &plusmn; {:.3}</td>", a.mean, a.sem))
                    }
                    None => html.push_str("<td></td>"),
                }
            }
            html.push_str("</tr>\n");
        }
    }
    html.push_str("</table>\n");
    html.push_str("<p>Data: <a href=\"table.csv\">table.csv</a></p>\n");
    html.push_str("</body>\n</html>\n");
    html
}
