//! Summary statistics and static SVG output: box plots per (metric,
//! method) and mean reward/regret curves for the bandit experiment.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use anyhow::{bail, Result};

use crate::records::Record;

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub method: String,
    pub metric: String,
    pub count: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub mean: f64,
}

/// Linear interpolation between order statistics: the quantile at p is
/// `x[h] + frac(h) (x[h+1] - x[h])` with `h = p (n - 1)`.
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty() && (0.0..=1.0).contains(&p));
    let h = p * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Five-number summaries plus the mean, per (method, metric), in sorted
/// key order.
pub fn summarize(records: &[Record]) -> Result<Vec<SummaryRow>> {
    if records.is_empty() {
        bail!("no records to summarize");
    }
    let mut groups: BTreeMap<(String, String), Vec<f64>> = BTreeMap::new();
    for r in records {
        groups
            .entry((r.method.clone(), r.metric.clone()))
            .or_default()
            .push(r.value);
    }
    Ok(groups
        .into_iter()
        .map(|((method, metric), mut values)| {
            values.sort_by(f64::total_cmp);
            let mean = values.iter().sum::<f64>() / values.len() as f64;
            SummaryRow {
                method,
                metric,
                count: values.len(),
                min: values[0],
                q1: quantile(&values, 0.25),
                median: quantile(&values, 0.5),
                q3: quantile(&values, 0.75),
                max: *values.last().unwrap(),
                mean,
            }
        })
        .collect())
}

pub fn render_table(rows: &[SummaryRow]) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "{:<16} {:<28} {:>6} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12}",
        "method", "metric", "n", "min", "q1", "median", "q3", "max", "mean"
    )
    .unwrap();
    for r in rows {
        writeln!(
            out,
            "{:<16} {:<28} {:>6} {:>12.6} {:>12.6} {:>12.6} {:>12.6} {:>12.6} {:>12.6}",
            r.method, r.metric, r.count, r.min, r.q1, r.median, r.q3, r.max, r.mean
        )
        .unwrap();
    }
    out
}

const PANEL_WIDTH: f64 = 480.0;
const PANEL_HEIGHT: f64 = 170.0;
const MARGIN_LEFT: f64 = 130.0;
const MARGIN_TOP: f64 = 34.0;

/// One panel per metric, one box per method within the panel, deterministic
/// layout in (metric, method) order.
pub fn render_box_plots(rows: &[SummaryRow]) -> String {
    let mut metrics: BTreeMap<&str, Vec<&SummaryRow>> = BTreeMap::new();
    for r in rows {
        metrics.entry(&r.metric).or_default().push(r);
    }
    let total_h = MARGIN_TOP + metrics.len() as f64 * (PANEL_HEIGHT + 30.0);
    let total_w = MARGIN_LEFT + PANEL_WIDTH + 40.0;
    let mut svg = String::new();
    writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{total_w:.0}\" height=\"{total_h:.0}\" font-family=\"monospace\" font-size=\"12\">"
    )
    .unwrap();
    let mut top = MARGIN_TOP;
    for (metric, group) in &metrics {
        let lo = group.iter().map(|r| r.min).fold(f64::INFINITY, f64::min);
        let hi = group.iter().map(|r| r.max).fold(f64::NEG_INFINITY, f64::max);
        let span = if hi > lo { hi - lo } else { 1.0 };
        let x_of = |v: f64| MARGIN_LEFT + (v - lo) / span * PANEL_WIDTH;
        writeln!(
            svg,
            "  <text x=\"{MARGIN_LEFT:.1}\" y=\"{:.1}\">{metric}</text>",
            top - 10.0
        )
        .unwrap();
        let row_h = PANEL_HEIGHT / group.len() as f64;
        for (i, r) in group.iter().enumerate() {
            let cy = top + (i as f64 + 0.5) * row_h;
            let half = (row_h * 0.28).min(18.0);
            writeln!(
                svg,
                "  <text x=\"10\" y=\"{:.1}\">{}</text>",
                cy + 4.0,
                r.method
            )
            .unwrap();
            // whiskers
            writeln!(
                svg,
                "  <line x1=\"{:.2}\" y1=\"{cy:.2}\" x2=\"{:.2}\" y2=\"{cy:.2}\" stroke=\"black\"/>",
                x_of(r.min),
                x_of(r.q1)
            )
            .unwrap();
            writeln!(
                svg,
                "  <line x1=\"{:.2}\" y1=\"{cy:.2}\" x2=\"{:.2}\" y2=\"{cy:.2}\" stroke=\"black\"/>",
                x_of(r.q3),
                x_of(r.max)
            )
            .unwrap();
            // box
            writeln!(
                svg,
                "  <rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"none\" stroke=\"black\"/>",
                x_of(r.q1),
                cy - half,
                (x_of(r.q3) - x_of(r.q1)).max(0.5),
                2.0 * half
            )
            .unwrap();
            // median
            writeln!(
                svg,
                "  <line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"black\" stroke-width=\"2\"/>",
                x_of(r.median),
                cy - half,
                x_of(r.median),
                cy + half
            )
            .unwrap();
        }
        // axis labels
        writeln!(
            svg,
            "  <text x=\"{MARGIN_LEFT:.1}\" y=\"{:.1}\">{lo:.4}</text>",
            top + PANEL_HEIGHT + 14.0
        )
        .unwrap();
        writeln!(
            svg,
            "  <text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">{hi:.4}</text>",
            MARGIN_LEFT + PANEL_WIDTH,
            top + PANEL_HEIGHT + 14.0
        )
        .unwrap();
        top += PANEL_HEIGHT + 30.0;
    }
    writeln!(svg, "</svg>").unwrap();
    svg
}

/// Mean cumulative reward per round and method, drawn as polylines. The
/// metric names carry the round as a `_t<round>` suffix.
pub fn render_mean_curves(records: &[Record]) -> Result<String> {
    let mut series: BTreeMap<String, BTreeMap<usize, (f64, usize)>> = BTreeMap::new();
    for r in records {
        let Some(rest) = r.metric.strip_prefix("cumulative_reward_t") else {
            continue;
        };
        let t: usize = rest.parse()?;
        let cell = series
            .entry(r.method.clone())
            .or_default()
            .entry(t)
            .or_insert((0.0, 0));
        cell.0 += r.value;
        cell.1 += 1;
    }
    if series.is_empty() {
        bail!("no cumulative-reward records to plot");
    }
    let width = 640.0;
    let height = 420.0;
    let (mut t_max, mut v_min, mut v_max) = (1usize, f64::INFINITY, f64::NEG_INFINITY);
    for points in series.values() {
        for (&t, &(sum, n)) in points {
            let mean = sum / n as f64;
            t_max = t_max.max(t);
            v_min = v_min.min(mean);
            v_max = v_max.max(mean);
        }
    }
    let span = if v_max > v_min { v_max - v_min } else { 1.0 };
    let x_of = |t: usize| 70.0 + (t as f64 / t_max as f64) * (width - 110.0);
    let y_of = |v: f64| (height - 50.0) - (v - v_min) / span * (height - 90.0);

    let mut svg = String::new();
    writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" font-family=\"monospace\" font-size=\"12\">"
    )
    .unwrap();
    writeln!(
        svg,
        "  <text x=\"70\" y=\"20\">mean cumulative reward vs t</text>"
    )
    .unwrap();
    let palette = ["black", "dimgray", "darkgray"];
    for (idx, (method, points)) in series.iter().enumerate() {
        let color = palette[idx % palette.len()];
        let mut path = String::new();
        for (&t, &(sum, n)) in points {
            let _ = write!(path, "{:.2},{:.2} ", x_of(t), y_of(sum / n as f64));
        }
        writeln!(
            svg,
            "  <polyline points=\"{}\" fill=\"none\" stroke=\"{color}\"/>",
            path.trim_end()
        )
        .unwrap();
        writeln!(
            svg,
            "  <text x=\"{:.1}\" y=\"{:.1}\" fill=\"{color}\">{method}</text>",
            width - 100.0,
            30.0 + 16.0 * idx as f64
        )
        .unwrap();
    }
    writeln!(
        svg,
        "  <text x=\"70\" y=\"{:.1}\">t=0</text>",
        height - 30.0
    )
    .unwrap();
    writeln!(
        svg,
        "  <text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">t={t_max}</text>",
        width - 40.0,
        height - 30.0
    )
    .unwrap();
    writeln!(svg, "</svg>").unwrap();
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantiles_match_hand_values() {
        let xs = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(quantile(&xs, 0.5), 3.0);
        assert_eq!(quantile(&xs, 0.25), 2.0);
        assert_eq!(quantile(&xs, 0.75), 4.0);
        assert_eq!(quantile(&xs, 0.0), 1.0);
        assert_eq!(quantile(&xs, 1.0), 5.0);
        assert_eq!(quantile(&[1.0, 2.0], 0.5), 1.5);
    }

    #[test]
    fn single_record_collapses() {
        let rows = summarize(&[Record::new("e", 0, "m", "x", 7.5)]).unwrap();
        assert_eq!(rows.len(), 1);
        let r = &rows[0];
        assert!(r.min == 7.5 && r.q1 == 7.5 && r.median == 7.5 && r.q3 == 7.5 && r.max == 7.5);
    }

    #[test]
    fn empty_records_error() {
        assert!(summarize(&[]).is_err());
    }

    #[test]
    fn two_methods_two_boxes() {
        let rows = summarize(&[
            Record::new("e", 0, "a", "x", 1.0),
            Record::new("e", 1, "a", "x", 2.0),
            Record::new("e", 0, "b", "x", 3.0),
            Record::new("e", 1, "b", "x", 4.0),
        ])
        .unwrap();
        let svg = render_box_plots(&rows);
        assert_eq!(svg.matches("<rect").count(), 2);
        let again = render_box_plots(&rows);
        assert_eq!(svg, again);
    }

    #[test]
    fn curves_average_over_replicates() {
        let records = vec![
            Record::new("bandits", 0, "ucb", "cumulative_reward_t1", 1.0),
            Record::new("bandits", 1, "ucb", "cumulative_reward_t1", 3.0),
            Record::new("bandits", 0, "ucb", "cumulative_reward_t2", 4.0),
            Record::new("bandits", 1, "ucb", "cumulative_reward_t2", 6.0),
        ];
        let svg = render_mean_curves(&records).unwrap();
        assert!(svg.contains("polyline"));
        assert!(render_mean_curves(&[Record::new("e", 0, "m", "x", 1.0)]).is_err());
    }
}
