//! Markdown summary and CSV tables for an [`ExperimentReport`].
//!
//! Means print with four decimals and p-values in scientific notation with
//! four decimals; CSVs carry full precision.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::Result;
use crate::experiment::{Comparison, ExperimentReport, MetricTable};
use crate::logmodel::InteractionKind;

fn m(v: f64) -> String {
    format!("{v:.4}")
}

fn p(v: f64) -> String {
    format!("{v:.4e}")
}

/// File stem suffix: the click tables keep the bare names.
fn suffix(kind: InteractionKind) -> String {
    match kind {
        InteractionKind::Click => String::new(),
        other => format!("_{other}"),
    }
}

pub fn render_markdown(report: &ExperimentReport) -> String {
    let h = &report.header;
    let mut out = String::new();
    let _ = writeln!(out, "# Echo chamber audit\n");
    let _ = writeln!(
        out,
        "seed {} · {} repetitions · p = {} (Hopkins {}) · k window ±{} · BIC {:?} · K* by {:?} · CH {:?}\n",
        h.master_seed, h.repetitions, h.p_fraction_default, h.p_fraction_hopkins, h.k_window, h.bic_variant, h.k_selection, h.ch_weighting
    );
    for note in &h.notes {
        let _ = writeln!(out, "- {note}");
    }
    if report.is_empty() {
        return out;
    }

    if let Some(c) = &report.cohorts {
        let _ = writeln!(out, "\n## Cohorts\n");
        let _ = writeln!(out, "| | users |\n|---|---|");
        let _ = writeln!(out, "| following (PVR ≥ {}) | {} |", c.thresholds.1, c.following);
        let _ = writeln!(out, "| ignoring (PVR ≤ {}) | {} |", c.thresholds.0, c.ignoring);
        let _ = writeln!(out, "| unassigned | {} |", c.unassigned);
        let _ = writeln!(out, "| without page views | {} |", c.excluded);
        for (kind, f, i) in &c.eligible {
            let _ = writeln!(out, "| eligible for {kind} blocks | {f} following / {i} ignoring |");
        }
    }

    for t in &report.tendency {
        let _ = writeln!(out, "\n## Hopkins statistic ({})\n", t.kind);
        let _ = writeln!(out, "| group | amount | first block | last block | p-value |\n|---|---|---|---|---|");
        for r in &t.rows {
            let _ = writeln!(out, "| {} | {} | {} | {} | {} |", r.group, r.amount, m(r.first), m(r.last), p(r.p_value));
        }
        let _ = writeln!(out, "| following vs ignoring | | {} | {} | |", p(t.between_first_p), p(t.between_last_p));
    }

    for s in &report.selection {
        let _ = writeln!(
            out,
            "\n## Cluster count ({})\n\nK* = {} (following), {} (ignoring) over k ∈ [{}, {}]",
            s.kind, s.following.k_star, s.ignoring.k_star, s.k_min, s.k_max
        );
    }

    for s in &report.reinforcement {
        let _ = writeln!(out, "\n## Decrease in Calinski-Harabasz score ({})\n", s.kind);
        metric_table(&mut out, &s.ch_drop);
        let _ = writeln!(out, "\n## Adjusted Rand index, first vs last block ({})\n", s.kind);
        metric_table(&mut out, &s.ari);
        if !s.clipped_offsets.is_empty() {
            let _ = writeln!(out, "\nOffsets outside [2, n − 1] dropped: {:?}", s.clipped_offsets);
        }
    }

    if let Some(d) = &report.diversity {
        let _ = writeln!(out, "\n## Content diversity of browsed items\n");
        let _ = writeln!(out, "| group | first block | last block | p-value |\n|---|---|---|---|");
        for r in &d.rows {
            let _ = writeln!(out, "| {} | {} | {} | {} |", r.group, m(r.first), m(r.last), p(r.p_value));
        }
        let _ = writeln!(
            out,
            "| following vs ignoring | {} | {} | {} (change) |",
            p(d.between_first_p),
            p(d.between_last_p),
            p(d.between_change_p)
        );
    }

    if !report.decisions.is_empty() {
        let _ = writeln!(out, "\n## Decisions\n");
        for line in &report.decisions {
            let _ = writeln!(out, "- {line}");
        }
    }
    out
}

fn metric_table(out: &mut String, t: &MetricTable) {
    let _ = writeln!(out, "| k offset | k (following) | k (ignoring) | following | ignoring | p-value |\n|---|---|---|---|---|---|");
    for r in &t.rows {
        let c = &r.comparison;
        let _ = writeln!(
            out,
            "| {:+} | {} | {} | {} | {} | {} |",
            r.k_offset,
            r.k_following,
            r.k_ignoring,
            m(c.following),
            m(c.ignoring),
            p(c.p_value)
        );
    }
    let a = &t.ave;
    let _ = writeln!(out, "| AVE | | | {} | {} | {} |", m(a.following), m(a.ignoring), p(a.p_value));
}

/// Writes `bytes` to `path` through a temporary file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{name}.tmp"));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

fn csv_bytes(header: &[&str], rows: &[Vec<String>]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.into_inner().map_err(|e| e.into_error().into())
}

fn comparison_row(label: String, c: &Comparison) -> Vec<String> {
    vec![label, c.following.to_string(), c.ignoring.to_string(), c.p_value.to_string()]
}

/// CSV tables keyed by file name, for every section present.
pub fn csv_tables(report: &ExperimentReport) -> Result<Vec<(String, Vec<u8>)>> {
    let mut files = Vec::new();

    let mut hopkins = Vec::new();
    for t in &report.tendency {
        for r in &t.rows {
            hopkins.push(vec![
                t.kind.to_string(),
                r.group.clone(),
                r.amount.to_string(),
                r.first.to_string(),
                r.last.to_string(),
                r.p_value.to_string(),
            ]);
        }
        hopkins.push(vec![
            t.kind.to_string(),
            "between".into(),
            String::new(),
            t.between_first_p.to_string(),
            t.between_last_p.to_string(),
            String::new(),
        ]);
    }
    if !report.tendency.is_empty() {
        files.push(("hopkins.csv".into(), csv_bytes(&["kind", "group", "amount", "first", "last", "p_value"], &hopkins)?));
    }

    for s in &report.selection {
        for (group, sel) in [("following", &s.following), ("ignoring", &s.ignoring)] {
            let rows: Vec<Vec<String>> = sel.curve.iter().map(|(k, v)| vec![k.to_string(), v.to_string()]).collect();
            files.push((format!("bic_curve{}_{group}.csv", suffix(s.kind)), csv_bytes(&["k", "value"], &rows)?));
        }
    }

    for s in &report.reinforcement {
        for (name, table) in [("ch_drop", &s.ch_drop), ("ari", &s.ari)] {
            let mut rows: Vec<Vec<String>> = table
                .rows
                .iter()
                .map(|r| comparison_row(r.k_offset.to_string(), &r.comparison))
                .collect();
            rows.push(comparison_row("AVE".into(), &table.ave));
            files.push((
                format!("{name}{}.csv", suffix(s.kind)),
                csv_bytes(&["k_offset", "following", "ignoring", "p_value"], &rows)?,
            ));
        }
    }

    if let Some(d) = &report.diversity {
        let mut rows: Vec<Vec<String>> = d
            .rows
            .iter()
            .map(|r| vec![r.group.clone(), r.first.to_string(), r.last.to_string(), r.p_value.to_string()])
            .collect();
        rows.push(vec![
            "between".into(),
            d.between_first_p.to_string(),
            d.between_last_p.to_string(),
            d.between_change_p.to_string(),
        ]);
        files.push(("diversity.csv".into(), csv_bytes(&["group", "first", "last", "p_value"], &rows)?));
    }
    Ok(files)
}

/// Writes `report.json`, `report.md` and the CSV tables into `dir`.
pub fn write_report(report: &ExperimentReport, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut json = serde_json::to_vec_pretty(report)?;
    json.push(b'\n');
    write_atomic(&dir.join("report.json"), &json)?;
    write_atomic(&dir.join("report.md"), render_markdown(report).as_bytes())?;
    for (name, bytes) in csv_tables(report)? {
        write_atomic(&dir.join(name), &bytes)?;
    }
    Ok(())
}
