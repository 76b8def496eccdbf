//! Atomic file writes and plot-data emission.

use fiberq_experiments::ResultTable;
use std::io::Write as _;
use std::path::{Path, PathBuf};

/// Write bytes via a temp file and rename, so partial files never appear.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let tmp = path.with_extension(match path.extension() {
        Some(e) => format!("{}.tmp", e.to_string_lossy()),
        None => "tmp".to_string(),
    });
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable value");
    text.push('\n');
    atomic_write(path, text.as_bytes())
}

pub fn read_results(path: &Path) -> Result<ResultTable, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let table: ResultTable =
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    table.validate()?;
    Ok(table)
}

pub const PLOTDATA_HEADER: &str = "# fiberq plotdata v1";

/// One row per (site, control point): site, control, mean, std_error.
/// Floats use the shortest round-trip representation, so re-ingesting
/// reproduces the values exactly.
pub fn plotdata(table: &ResultTable) -> String {
    let mut out = String::new();
    out.push_str(PLOTDATA_HEADER);
    out.push('\n');
    out.push_str(&format!("site\t{}\tmean\tstd_error\n", table.control_name));
    for series in &table.series {
        for (k, &control) in table.control.iter().enumerate() {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\n",
                series.site, control, series.mean[k], series.std_error[k]
            ));
        }
    }
    out
}

/// Parse rows back; used by tests to prove the emit round trip.
pub fn parse_plotdata(text: &str) -> Result<Vec<(usize, f64, f64, f64)>, String> {
    let mut lines = text.lines();
    if lines.next() != Some(PLOTDATA_HEADER) {
        return Err("missing plotdata header".into());
    }
    let _columns = lines.next().ok_or("missing column header")?;
    let mut rows = Vec::new();
    for (k, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 {
            return Err(format!("row {}: expected 4 fields", k + 1));
        }
        let parse = |s: &str| s.parse::<f64>().map_err(|e| format!("row {}: {e}", k + 1));
        rows.push((
            fields[0]
                .parse::<usize>()
                .map_err(|e| format!("row {}: {e}", k + 1))?,
            parse(fields[1])?,
            parse(fields[2])?,
            parse(fields[3])?,
        ));
    }
    Ok(rows)
}

pub fn channel_stem(site: fiberq_core::SiteId) -> String {
    format!("channel_{:02}", site.0)
}

pub fn ensure_dir(dir: &Path) -> std::io::Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    Ok(dir.to_path_buf())
}
