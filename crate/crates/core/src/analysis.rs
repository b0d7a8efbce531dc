//! Post-hoc summaries, table comparison, and region plots.

use crate::engine::{region_means, DmrRecord, DmrTable, Segment};
use crate::error::{Error, Result};
use crate::io::validate_pair;
use crate::matrix::MethylationMatrix;
use crate::model::quantile_sorted;

/// Six-number summary: min, lower quartile, median, mean, upper
/// quartile, max, with quartiles interpolated linearly between order
/// statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SixNumber {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub mean: f64,
    pub q3: f64,
    pub max: f64,
}

impl SixNumber {
    fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
        let mean = sorted.iter().sum::<f64>() / sorted.len() as f64;
        Some(Self {
            min: sorted[0],
            q1: quantile_sorted(&sorted, 0.25),
            median: quantile_sorted(&sorted, 0.5),
            mean,
            q3: quantile_sorted(&sorted, 0.75),
            max: sorted[sorted.len() - 1],
        })
    }
}

/// Summary of a DMR table.
#[derive(Debug, Clone, PartialEq)]
pub struct DmrSummary {
    pub n_dmrs: usize,
    /// Statistics over `CpG_Count`; `None` for an empty table.
    pub size_stats: Option<SixNumber>,
    /// Statistics over `Decision_Value`; `None` for an empty table.
    pub decision_stats: Option<SixNumber>,
    /// Counts per chromosome in first-appearance (genomic) order.
    pub by_chromosome: Vec<(String, usize)>,
    /// Counts per stage in ascending stage order.
    pub by_stage: Vec<(u32, usize)>,
}

pub fn summarize_dmrs(table: &DmrTable) -> DmrSummary {
    let sizes: Vec<f64> = table.records.iter().map(|r| r.cpg_count as f64).collect();
    let decisions: Vec<f64> = table.records.iter().map(|r| r.decision_value).collect();

    let mut by_chromosome: Vec<(String, usize)> = Vec::new();
    for r in &table.records {
        match by_chromosome.iter_mut().find(|(c, _)| c == &r.chromosome) {
            Some((_, n)) => *n += 1,
            None => by_chromosome.push((r.chromosome.clone(), 1)),
        }
    }
    let mut by_stage: Vec<(u32, usize)> = Vec::new();
    for r in &table.records {
        match by_stage.iter_mut().find(|(s, _)| *s == r.stage) {
            Some((_, n)) => *n += 1,
            None => by_stage.push((r.stage, 1)),
        }
    }
    by_stage.sort_by_key(|(s, _)| *s);

    DmrSummary {
        n_dmrs: table.records.len(),
        size_stats: SixNumber::of(&sizes),
        decision_stats: SixNumber::of(&decisions),
        by_chromosome,
        by_stage,
    }
}

/// Renders a summary as the text block printed by the `summarize`
/// subcommand.
pub fn format_summary(summary: &DmrSummary) -> String {
    use std::fmt::Write;

    let mut out = String::new();
    out.push_str("Summary of DMR results\n");
    out.push_str("----------------------\n");
    let _ = writeln!(out, "Number of DMRs: {}", summary.n_dmrs);

    let six = |s: &SixNumber| {
        format!(
            "{:>7.3} {:>7.3} {:>7.3} {:>7.3} {:>7.3} {:>7.3}",
            s.min, s.q1, s.median, s.mean, s.q3, s.max
        )
    };
    let header = format!(
        "{:>7} {:>7} {:>7} {:>7} {:>7} {:>7}",
        "min", "q1", "median", "mean", "q3", "max"
    );

    out.push_str("\nRegion size (CpG_Count):\n");
    match &summary.size_stats {
        Some(s) => {
            let _ = writeln!(out, "{header}\n{}", six(s));
        }
        None => out.push_str("(no records)\n"),
    }

    out.push_str("\nDecision_Value:\n");
    match &summary.decision_stats {
        Some(s) => {
            let _ = writeln!(out, "{header}\n{}", six(s));
        }
        None => out.push_str("(no records)\n"),
    }

    out.push_str("\nDMRs by Chromosome:\n");
    let _ = writeln!(out, "{:>12} {:>8}", "Chromosome", "n_dmrs");
    for (chromosome, n) in &summary.by_chromosome {
        let _ = writeln!(out, "{chromosome:>12} {n:>8}");
    }

    out.push_str("\nDMRs by Stage:\n");
    let _ = writeln!(out, "{:>7} {:>8}", "Stage", "n_dmrs");
    for (stage, n) in &summary.by_stage {
        let _ = writeln!(out, "{stage:>7} {n:>8}");
    }
    out
}

/// One overlapping pair between two tables; indices are 1-based record
/// positions, percentages are Jaccard overlap over CpG-row sets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapPair {
    pub index_a: usize,
    pub index_b: usize,
    pub overlap_percent: f64,
}

/// All pairs of regions from two tables that share at least one CpG.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct OverlapReport {
    pub pairs: Vec<OverlapPair>,
}

impl OverlapReport {
    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

fn resolve_record(
    record: &DmrRecord,
    index: &std::collections::HashMap<&str, usize>,
    matrix: &MethylationMatrix,
) -> Result<(usize, usize)> {
    let start = *index
        .get(record.start_cpg_id.as_str())
        .ok_or_else(|| Error::UnknownCpg(record.start_cpg_id.clone()))?;
    let end = *index
        .get(record.end_cpg_id.as_str())
        .ok_or_else(|| Error::UnknownCpg(record.end_cpg_id.clone()))?;
    if end < start {
        return Err(Error::InvalidRegion(format!(
            "boundaries {} .. {} map to rows {} .. {}",
            record.start_cpg_id, record.end_cpg_id, start, end
        )));
    }
    if matrix.chromosomes()[start] != record.chromosome {
        return Err(Error::InvalidRegion(format!(
            "record on chromosome {} but CpG {} sits on chromosome {}",
            record.chromosome,
            record.start_cpg_id,
            matrix.chromosomes()[start]
        )));
    }
    Ok((start, end))
}

/// Jaccard overlaps between every intersecting pair of regions from `a`
/// and `b`, with boundary CpG identifiers resolved to rows through
/// `cpg_index`. The report is empty when nothing intersects.
pub fn compare_dmrs(
    a: &DmrTable,
    b: &DmrTable,
    cpg_index: &MethylationMatrix,
) -> Result<OverlapReport> {
    let index = cpg_index.cpg_row_index();
    let rows_a: Vec<(usize, usize)> = a
        .records
        .iter()
        .map(|r| resolve_record(r, &index, cpg_index))
        .collect::<Result<_>>()?;
    let rows_b: Vec<(usize, usize)> = b
        .records
        .iter()
        .map(|r| resolve_record(r, &index, cpg_index))
        .collect::<Result<_>>()?;

    let mut pairs = Vec::new();
    for (i, &(sa, ea)) in rows_a.iter().enumerate() {
        for (j, &(sb, eb)) in rows_b.iter().enumerate() {
            let lo = sa.max(sb);
            let hi = ea.min(eb);
            if lo > hi {
                continue;
            }
            let intersection = hi - lo + 1;
            let union = (ea - sa + 1) + (eb - sb + 1) - intersection;
            pairs.push(OverlapPair {
                index_a: i + 1,
                index_b: j + 1,
                overlap_percent: 100.0 * intersection as f64 / union as f64,
            });
        }
    }
    Ok(OverlapReport { pairs })
}

/// Data behind one region plot: per-CpG mean M-values of both groups.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionPlot {
    pub title: String,
    pub chromosome: String,
    pub cpg_ids: Vec<String>,
    pub cancer: Vec<f64>,
    pub normal: Vec<f64>,
}

/// Builds the plot for the `index`-th record (1-based) of the table:
/// for each CpG in the region, the mean M-value across each group's
/// samples, missing values excluded.
pub fn plot_dmr_region(
    table: &DmrTable,
    cancer: &MethylationMatrix,
    normal: &MethylationMatrix,
    index: usize,
) -> Result<RegionPlot> {
    validate_pair(cancer, normal)?;
    if index == 0 || index > table.records.len() {
        return Err(Error::IndexOutOfRange {
            index,
            len: table.records.len(),
        });
    }
    let record = &table.records[index - 1];
    let row_index = cancer.cpg_row_index();
    let (start, end) = resolve_record(record, &row_index, cancer)?;

    let per_cpg_means = |matrix: &MethylationMatrix| -> Vec<f64> {
        (start..=end)
            .map(|row| {
                let seg = Segment {
                    chromosome: record.chromosome.clone(),
                    start_row: row,
                    end_row: row,
                    stage: record.stage,
                };
                region_means(matrix, &seg)
                    .into_iter()
                    .filter(|v| v.is_finite())
                    .fold((0.0, 0usize), |(s, n), v| (s + v, n + 1))
            })
            .map(|(sum, n)| if n == 0 { f64::NAN } else { sum / n as f64 })
            .collect()
    };

    Ok(RegionPlot {
        title: format!(
            "Chromosome {}: {} - {}",
            record.chromosome, record.start_cpg_id, record.end_cpg_id
        ),
        chromosome: record.chromosome.clone(),
        cpg_ids: cancer.cpg_ids()[start..=end].to_vec(),
        cancer: per_cpg_means(cancer),
        normal: per_cpg_means(normal),
    })
}

const SVG_WIDTH: f64 = 860.0;
const SVG_HEIGHT: f64 = 520.0;
const PLOT_LEFT: f64 = 70.0;
const PLOT_RIGHT: f64 = 820.0;
const PLOT_TOP: f64 = 60.0;
const PLOT_BOTTOM: f64 = 450.0;

impl RegionPlot {
    /// Renders a standalone SVG line chart with one labeled series per
    /// group.
    pub fn to_svg(&self) -> String {
        use std::fmt::Write;

        let finite: Vec<f64> = self
            .cancer
            .iter()
            .chain(&self.normal)
            .copied()
            .filter(|v| v.is_finite())
            .collect();
        let (mut lo, mut hi) = finite
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            });
        if !lo.is_finite() || !hi.is_finite() {
            lo = -1.0;
            hi = 1.0;
        }
        if hi - lo < 1e-9 {
            lo -= 0.5;
            hi += 0.5;
        }
        let pad = 0.05 * (hi - lo);
        let (lo, hi) = (lo - pad, hi + pad);

        let n = self.cpg_ids.len();
        let x_at = |i: usize| {
            if n <= 1 {
                (PLOT_LEFT + PLOT_RIGHT) / 2.0
            } else {
                PLOT_LEFT + (PLOT_RIGHT - PLOT_LEFT) * i as f64 / (n - 1) as f64
            }
        };
        let y_at = |v: f64| PLOT_BOTTOM - (PLOT_BOTTOM - PLOT_TOP) * (v - lo) / (hi - lo);

        let mut svg = String::new();
        let _ = writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_WIDTH}" height="{SVG_HEIGHT}" viewBox="0 0 {SVG_WIDTH} {SVG_HEIGHT}">"#
        );
        let _ = writeln!(
            svg,
            r#"<rect width="{SVG_WIDTH}" height="{SVG_HEIGHT}" fill="white"/>"#
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="30" text-anchor="middle" font-family="sans-serif" font-size="16">{}</text>"#,
            SVG_WIDTH / 2.0,
            xml_escape(&self.title)
        );

        // Axes.
        let _ = writeln!(
            svg,
            r#"<line x1="{PLOT_LEFT}" y1="{PLOT_BOTTOM}" x2="{PLOT_RIGHT}" y2="{PLOT_BOTTOM}" stroke="black"/>"#
        );
        let _ = writeln!(
            svg,
            r#"<line x1="{PLOT_LEFT}" y1="{PLOT_TOP}" x2="{PLOT_LEFT}" y2="{PLOT_BOTTOM}" stroke="black"/>"#
        );
        for k in 0..=4 {
            let v = lo + (hi - lo) * k as f64 / 4.0;
            let y = y_at(v);
            let _ = writeln!(
                svg,
                r#"<line x1="{:.1}" y1="{y:.1}" x2="{PLOT_LEFT}" y2="{y:.1}" stroke="black"/>"#,
                PLOT_LEFT - 6.0
            );
            let _ = writeln!(
                svg,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="end" font-family="sans-serif" font-size="11">{v:.2}</text>"#,
                PLOT_LEFT - 9.0,
                y + 4.0
            );
        }
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-family="sans-serif" font-size="12" transform="rotate(-90 18 {:.1})">Mean M-value</text>"#,
            18.0,
            (PLOT_TOP + PLOT_BOTTOM) / 2.0,
            (PLOT_TOP + PLOT_BOTTOM) / 2.0
        );
        let first = self.cpg_ids.first().map(String::as_str).unwrap_or("");
        let last = self.cpg_ids.last().map(String::as_str).unwrap_or("");
        let _ = writeln!(
            svg,
            r#"<text x="{PLOT_LEFT}" y="{:.1}" text-anchor="start" font-family="sans-serif" font-size="11">{}</text>"#,
            PLOT_BOTTOM + 20.0,
            xml_escape(first)
        );
        let _ = writeln!(
            svg,
            r#"<text x="{PLOT_RIGHT}" y="{:.1}" text-anchor="end" font-family="sans-serif" font-size="11">{}</text>"#,
            PLOT_BOTTOM + 20.0,
            xml_escape(last)
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-family="sans-serif" font-size="12">CpG sites ({n})</text>"#,
            (PLOT_LEFT + PLOT_RIGHT) / 2.0,
            PLOT_BOTTOM + 40.0
        );

        for (name, color, series) in [
            ("cancer", "#d62728", &self.cancer),
            ("normal", "#1f77b4", &self.normal),
        ] {
            let _ = writeln!(svg, r#"<g class="series" data-name="{name}">"#);
            // Polylines split at missing values.
            let mut run: Vec<(f64, f64)> = Vec::new();
            let flush = |run: &mut Vec<(f64, f64)>, svg: &mut String| {
                if run.len() >= 2 {
                    let pts = run
                        .iter()
                        .map(|(x, y)| format!("{x:.2},{y:.2}"))
                        .collect::<Vec<_>>()
                        .join(" ");
                    let _ = writeln!(
                        svg,
                        r#"<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.8"/>"#
                    );
                }
                run.clear();
            };
            for (i, &v) in series.iter().enumerate() {
                if v.is_finite() {
                    run.push((x_at(i), y_at(v)));
                } else {
                    flush(&mut run, &mut svg);
                }
            }
            flush(&mut run, &mut svg);
            for (i, &v) in series.iter().enumerate() {
                if v.is_finite() {
                    let _ = writeln!(
                        svg,
                        r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#,
                        x_at(i),
                        y_at(v)
                    );
                }
            }
            let _ = writeln!(svg, "</g>");
        }

        // Legend.
        for (k, (name, color)) in [("cancer", "#d62728"), ("normal", "#1f77b4")]
            .iter()
            .enumerate()
        {
            let y = PLOT_TOP + 8.0 + 18.0 * k as f64;
            let _ = writeln!(
                svg,
                r#"<line x1="{:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="{color}" stroke-width="2.5"/>"#,
                PLOT_RIGHT - 110.0,
                PLOT_RIGHT - 80.0
            );
            let _ = writeln!(
                svg,
                r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="12">{name}</text>"#,
                PLOT_RIGHT - 72.0,
                y + 4.0
            );
        }

        svg.push_str("</svg>\n");
        svg
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
