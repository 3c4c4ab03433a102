//! File formats. Every number is written with Rust's shortest round-trip
//! decimal form, so reading a file back reproduces the exact `f64` values.
//!
//! Tables are comma-separated with a header row; lines starting with `#` are
//! comments. The sensing matrix uses a small keyed text format:
//!
//! ```text
//! # polsense sensing matrix
//! rows = 21
//! cols = 19
//! fingerprint = 5c1d0f3a9e2b4c61
//! detector_axis = 1 0
//! detector_mode = intensity
//! angle_min_deg = -90
//! angle_max_deg = 90
//! frequencies_ghz = 9 9.1 ... 11
//! data
//! <one line of `cols` values per row>
//! end
//! ```

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use polsense_core::{
    jones_reflectance, AngleGrid, ComponentRow, DetectionMode, DetectorSpec, EstimateResult, Fingerprint,
    MetaAtomModel, SensingMatrix, SvdSpectrum,
};

use crate::error::CliError;

pub const SVD_RANK_TAUS: [f64; 2] = [1e-2, 1e-3];

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::io(path, e))
}

fn csv_err(path: &Path, e: csv::Error) -> CliError {
    let line = e.position().map_or(0, |p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => CliError::io(path, io),
        other => CliError::format(path, line, format!("{other:?}")),
    }
}

/// Writes a header and rows of numbers, then optional trailing comment lines.
fn write_table(path: &Path, header: &[&str], rows: &[Vec<f64>], trailer: &[String]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(header).map_err(|e| csv_err(path, e))?;
    for row in rows {
        w.write_record(row.iter().map(|v| v.to_string()))
            .map_err(|e| csv_err(path, e))?;
    }
    let mut out = w.into_inner().map_err(|e| CliError::io(path, e.into_error()))?;
    for line in trailer {
        writeln!(out, "# {line}").map_err(|e| CliError::io(path, e))?;
    }
    out.flush().map_err(|e| CliError::io(path, e))
}

/// A numeric table: header names and rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

pub fn read_table(path: &Path) -> Result<Table, CliError> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(file);
    let header: Vec<String> = r
        .headers()
        .map_err(|e| csv_err(path, e))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for record in r.records() {
        let record = record.map_err(|e| csv_err(path, e))?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let row = record
            .iter()
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|_| CliError::format(path, line, format!("not a number: {f:?}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    Ok(Table { header, rows })
}

/// Per-frequency magnitude and phase of r_xx, r_yy and r_xy.
pub fn write_model(path: &Path, model: &MetaAtomModel, freqs: &[f64]) -> Result<(), CliError> {
    let rows = freqs
        .iter()
        .map(|&f| {
            let j = jones_reflectance(model, f)?;
            Ok(vec![
                f,
                j.r_xx.norm(),
                j.r_xx.arg(),
                j.r_yy.norm(),
                j.r_yy.arg(),
                j.r_xy.norm(),
                j.r_xy.arg(),
            ])
        })
        .collect::<Result<Vec<_>, polsense_core::Error>>()?;
    write_table(
        path,
        &[
            "freq_ghz",
            "mag_rxx",
            "phase_rxx_rad",
            "mag_ryy",
            "phase_ryy_rad",
            "mag_rxy",
            "phase_rxy_rad",
        ],
        &rows,
        &[],
    )
}

pub const COMPONENT_HEADER: [&str; 8] = [
    "theta_deg",
    "freq_ghz",
    "mag_ex",
    "mag_ey",
    "mag_ez",
    "phase_ex_rad",
    "phase_ey_rad",
    "phase_ez_rad",
];

pub fn write_components(path: &Path, rows: &[ComponentRow]) -> Result<(), CliError> {
    let rows: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| {
            let mut v = vec![r.theta_deg, r.freq_ghz];
            v.extend(r.magnitude);
            v.extend(r.phase_rad);
            v
        })
        .collect();
    write_table(path, &COMPONENT_HEADER, &rows, &[])
}

pub fn write_estimate(path: &Path, result: &EstimateResult, angles: &AngleGrid) -> Result<(), CliError> {
    let rows: Vec<Vec<f64>> = angles
        .values()
        .iter()
        .zip(&result.theta_hat)
        .zip(&result.sharpened)
        .map(|((a, t), s)| vec![*a, *t, *s])
        .collect();
    let equivalent: Vec<String> = result.equivalent_indices.iter().map(|i| i.to_string()).collect();
    let summary = format!(
        "detected_angle_deg={} detected_index={} confidence={} exponent={} equivalent_indices={}",
        result.detected_angle_deg,
        result.detected_index,
        result.confidence,
        result.exponent,
        equivalent.join(";")
    );
    write_table(path, &["angle_deg", "theta_hat", "sharpened"], &rows, &[summary])
}

/// Reads the `key=value` summary comment of an estimate export.
pub fn read_estimate_summary(path: &Path) -> Result<HashMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let line = text
        .lines()
        .find_map(|l| l.strip_prefix("# detected_angle_deg="))
        .ok_or_else(|| CliError::format(path, 0, "missing summary line"))?;
    Ok(format!("detected_angle_deg={line}")
        .split_whitespace()
        .filter_map(|kv| kv.split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect())
}

/// `svd.csv` holds the spectrum; `svd_rank.csv` the effective ranks.
pub fn write_svd(spectrum_path: &Path, rank_path: &Path, spectrum: &SvdSpectrum) -> Result<(), CliError> {
    let rows: Vec<Vec<f64>> = spectrum
        .singular_values
        .iter()
        .enumerate()
        .map(|(i, s)| vec![i as f64, *s])
        .collect();
    write_table(spectrum_path, &["index", "singular_value"], &rows, &[])?;
    let ranks: Vec<Vec<f64>> = SVD_RANK_TAUS
        .iter()
        .map(|&t| vec![t, spectrum.effective_rank(t) as f64])
        .collect();
    write_table(rank_path, &["tau", "effective_rank"], &ranks, &[])
}

pub fn write_measurement(path: &Path, freqs: &[f64], values: &[f64]) -> Result<(), CliError> {
    let rows: Vec<Vec<f64>> = freqs.iter().zip(values).map(|(f, v)| vec![*f, *v]).collect();
    write_table(path, &["freq_ghz", "value"], &rows, &[])
}

/// Reads `freq_ghz,value` pairs.
pub fn read_measurement(path: &Path) -> Result<Vec<(f64, f64)>, CliError> {
    let t = read_table(path)?;
    let (Some(f), Some(v)) = (t.column("freq_ghz"), t.column("value")) else {
        return Err(CliError::format(path, 1, "expected columns freq_ghz,value"));
    };
    Ok(f.into_iter().zip(v).collect())
}

pub fn write_matrix(path: &Path, phi: &SensingMatrix) -> Result<(), CliError> {
    let mut out = create(path)?;
    let (rows, cols) = phi.shape();
    let join = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
    let mut text = String::from("# polsense sensing matrix\n");
    text += &format!("rows = {rows}\ncols = {cols}\n");
    text += &format!("fingerprint = {}\n", phi.fingerprint);
    text += &format!("detector_axis = {}\n", join(&phi.detector.axis));
    text += &format!("detector_mode = {}\n", phi.detector.mode.as_str());
    text += &format!("angle_min_deg = {}\n", phi.angles.min_deg);
    text += &format!("angle_max_deg = {}\n", phi.angles.max_deg);
    text += &format!("frequencies_ghz = {}\n", join(&phi.frequencies_ghz));
    text += "data\n";
    for r in 0..rows {
        text += &join(phi.row(r));
        text.push('\n');
    }
    text += "end\n";
    out.write_all(text.as_bytes()).map_err(|e| CliError::io(path, e))?;
    out.flush().map_err(|e| CliError::io(path, e))
}

pub fn read_matrix(path: &Path) -> Result<SensingMatrix, CliError> {
    let reader = BufReader::new(File::open(path).map_err(|e| CliError::io(path, e))?);
    let mut header: HashMap<String, (usize, String)> = HashMap::new();
    let mut data: Vec<f64> = Vec::new();
    let mut in_data = false;
    let mut ended = false;
    let mut data_rows = 0;
    let mut cols_seen = None;
    for (i, line) in reader.lines().enumerate() {
        let n = i + 1;
        let line = line.map_err(|e| CliError::io(path, e))?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if ended {
            return Err(CliError::format(path, n, "content after `end`"));
        }
        if in_data {
            if line == "end" {
                ended = true;
                continue;
            }
            let row = parse_numbers(path, n, line)?;
            if *cols_seen.get_or_insert(row.len()) != row.len() {
                return Err(CliError::format(path, n, "ragged data row"));
            }
            data.extend(row);
            data_rows += 1;
        } else if line == "data" {
            in_data = true;
        } else {
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::format(path, n, "expected `key = value`"))?;
            header.insert(k.trim().to_string(), (n, v.trim().to_string()));
        }
    }
    if !ended {
        return Err(CliError::format(path, 0, "missing `end` line"));
    }

    let get = |key: &str| {
        header
            .get(key)
            .ok_or_else(|| CliError::format(path, 0, format!("missing header key `{key}`")))
    };
    let int = |key: &str| -> Result<usize, CliError> {
        let (n, v) = get(key)?;
        v.parse()
            .map_err(|_| CliError::format(path, *n, format!("`{key}` must be an integer")))
    };
    let num = |key: &str| -> Result<f64, CliError> {
        let (n, v) = get(key)?;
        v.parse()
            .map_err(|_| CliError::format(path, *n, format!("`{key}` must be a number")))
    };
    let rows = int("rows")?;
    let cols = int("cols")?;
    if data_rows != rows || data.len() != rows * cols {
        return Err(CliError::format(
            path,
            0,
            format!(
                "expected {rows}×{cols} data values, found {data_rows} rows / {} values",
                data.len()
            ),
        ));
    }
    let (n, fp) = get("fingerprint")?;
    let fingerprint = u64::from_str_radix(fp, 16)
        .map(Fingerprint)
        .map_err(|_| CliError::format(path, *n, "fingerprint must be hexadecimal"))?;
    let (n, axis) = get("detector_axis")?;
    let axis = parse_numbers(path, *n, axis)?;
    let (n, mode) = get("detector_mode")?;
    let mode = DetectionMode::parse(mode).ok_or_else(|| CliError::format(path, *n, "unknown detector mode"))?;
    let [ax, ay] = axis[..] else {
        return Err(CliError::format(path, *n, "detector_axis needs two numbers"));
    };
    let detector = DetectorSpec::new([ax, ay], mode).map_err(|e| CliError::format(path, *n, e.to_string()))?;
    let angles = AngleGrid::new(num("angle_min_deg")?, num("angle_max_deg")?, cols)
        .map_err(|e| CliError::format(path, 0, e.to_string()))?;
    let (n, freqs) = get("frequencies_ghz")?;
    let freqs = parse_numbers(path, *n, freqs)?;
    if freqs.len() != rows {
        return Err(CliError::format(path, *n, "frequency count differs from `rows`"));
    }
    SensingMatrix::from_parts(data, freqs, angles, detector, fingerprint)
        .map_err(|e| CliError::format(path, 0, e.to_string()))
}

fn parse_numbers(path: &Path, line: usize, text: &str) -> Result<Vec<f64>, CliError> {
    text.split_whitespace()
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| CliError::format(path, line, format!("not a number: {t:?}")))
        })
        .collect()
}
