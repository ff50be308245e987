//! Series assembly and deterministic CSV/JSON emission.

use cavnet_core::cscq::{field_population, mean_photon_number};
use cavnet_core::dynamics::{unitarity_defect, TimeSeries};
use cavnet_core::network::{mode_ordinal, ModeIndex, NetworkConfig};
use cavnet_core::routing::TransferReport;
use cavnet_core::{Cscq, Error};
use sha2::{Digest, Sha256};

/// 12 significant digits, scientific; fixed width keeps output
/// byte-identical across runs and platforms.
pub fn sig12(x: f64) -> String {
    format!("{x:.11e}")
}

pub fn config_sha256(canonical_toml: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(canonical_toml.as_bytes());
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

pub struct RunMeta {
    pub config_hash: String,
    pub horizon: f64,
    pub points: usize,
    pub report: Option<TransferReport>,
}

/// One output row per sampled time: t, sender-exciton population,
/// receiver-exciton populations, total field population, mean photon
/// number, unitarity defect.
pub struct SeriesTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

pub fn series_table(
    config: &NetworkConfig,
    qubit: &Cscq,
    series: &TimeSeries,
) -> Result<SeriesTable, Error> {
    let n = config.n_receivers;
    let se = mode_ordinal(config, ModeIndex::SenderExciton)?;
    let receiver_ords: Vec<usize> = (1..=n)
        .map(|j| mode_ordinal(config, ModeIndex::ReceiverExciton(j)))
        .collect::<Result<_, _>>()?;

    let mut columns = vec!["t".to_string(), "U_s".to_string()];
    for j in 1..=n {
        columns.push(format!("U_r{j}"));
    }
    columns.push("F".to_string());
    columns.push("n_bar".to_string());
    columns.push("defect".to_string());

    let mut rows = Vec::with_capacity(series.rows.len());
    for row in &series.rows {
        let mut out = Vec::with_capacity(columns.len());
        out.push(row.time);
        out.push(row.population(se));
        for &ord in &receiver_ords {
            out.push(row.population(ord));
        }
        out.push(field_population(row, n));
        out.push(mean_photon_number(row, qubit, n)?);
        out.push(unitarity_defect(row));
        rows.push(out);
    }
    Ok(SeriesTable { columns, rows })
}

fn report_comment_lines(report: &TransferReport) -> Vec<String> {
    vec![
        format!("# target_receiver: {}", report.target),
        format!("# t_star: {}", sig12(report.t_star)),
        format!("# peak_population: {}", sig12(report.peak_population)),
        format!("# crosstalk: {}", sig12(report.crosstalk)),
        format!("# confinement_defect: {}", sig12(report.confinement_defect)),
        format!("# max_field_population: {}", sig12(report.max_field_population)),
        format!("# fidelity_at_t_star: {}", sig12(report.fidelity_at_t_star)),
        format!("# mean_photons_at_t_star: {}", sig12(report.mean_photons_at_t_star)),
    ]
}

pub fn render(table: &SeriesTable, meta: &RunMeta, format: Format) -> String {
    match format {
        Format::Csv => render_csv(table, meta),
        Format::Json => render_json(table, meta),
    }
}

fn render_csv(table: &SeriesTable, meta: &RunMeta) -> String {
    let mut out = String::new();
    out.push_str(&format!("# cavnet {}\n", env!("CARGO_PKG_VERSION")));
    out.push_str(&format!("# config sha256: {}\n", meta.config_hash));
    out.push_str(&format!("# horizon: {}\n", sig12(meta.horizon)));
    out.push_str(&format!("# points: {}\n", meta.points));
    if let Some(report) = &meta.report {
        for line in report_comment_lines(report) {
            out.push_str(&line);
            out.push('\n');
        }
    }
    out.push_str(&table.columns.join(","));
    out.push('\n');
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(|&x| sig12(x)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn render_json(table: &SeriesTable, meta: &RunMeta) -> String {
    let report = meta.report.as_ref().map(|r| {
        serde_json::json!({
            "target_receiver": r.target,
            "t_star": r.t_star,
            "peak_population": r.peak_population,
            "crosstalk": r.crosstalk,
            "confinement_defect": r.confinement_defect,
            "max_field_population": r.max_field_population,
            "fidelity_at_t_star": r.fidelity_at_t_star,
            "mean_photons_at_t_star": r.mean_photons_at_t_star,
        })
    });
    let value = serde_json::json!({
        "tool": format!("cavnet {}", env!("CARGO_PKG_VERSION")),
        "config_sha256": meta.config_hash,
        "horizon": meta.horizon,
        "points": meta.points,
        "report": report,
        "columns": table.columns,
        "rows": table.rows,
    });
    let mut text = serde_json::to_string_pretty(&value).expect("json serialization cannot fail");
    text.push('\n');
    text
}
