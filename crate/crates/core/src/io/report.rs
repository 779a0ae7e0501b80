//! JSON reports (tagged with a `"schema"` field) and GDV curve CSV files.

use std::io::Write;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use super::table::fmt_f64;
use crate::error::{Error, Result};
use crate::metric::{CurvePoint, GdvCurve, GdvReport};

pub const REPORT_SCHEMA: &str = "gdv-report/1";
pub const CURVE_SCHEMA: &str = "gdv-curve/1";
pub const DELTA_SCHEMA: &str = "gdv-delta/1";

/// Serializes `value` as a JSON object with an added `"schema"` field.
pub fn write_json<T: Serialize>(path: impl AsRef<Path>, schema: &str, value: &T) -> Result<()> {
    let path = path.as_ref();
    let mut json = serde_json::to_value(value).map_err(|e| Error::io(path, e.into()))?;
    if let Value::Object(map) = &mut json {
        map.insert("schema".into(), Value::String(schema.into()));
    }
    let mut out = super::create(path)?;
    serde_json::to_writer_pretty(&mut out, &json).map_err(|e| Error::io(path, e.into()))?;
    writeln!(out).and_then(|_| out.flush()).map_err(|e| Error::io(path, e))
}

/// Reads a JSON object written by [`write_json`], checking its schema tag.
pub fn read_json<T: DeserializeOwned>(path: impl AsRef<Path>, schema: &str) -> Result<T> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let json: Value = serde_json::from_str(&text).map_err(|e| Error::Parse {
        row: e.line(),
        col: e.column(),
        msg: e.to_string(),
    })?;
    match json.get("schema").and_then(Value::as_str) {
        Some(s) if s == schema => {}
        other => {
            return Err(Error::Parse { row: 0, col: 0, msg: format!("expected schema {schema:?}, found {other:?}") })
        }
    }
    serde_json::from_value(json).map_err(|e| Error::Parse { row: 0, col: 0, msg: e.to_string() })
}

pub fn write_report_json(path: impl AsRef<Path>, report: &GdvReport) -> Result<()> {
    write_json(path, REPORT_SCHEMA, report)
}

pub fn read_report_json(path: impl AsRef<Path>) -> Result<GdvReport> {
    read_json(path, REPORT_SCHEMA)
}

/// Columns `layer_index,layer_id,gdv,missing_flag`; a missing value leaves `gdv` empty.
pub fn write_curve_csv(path: impl AsRef<Path>, curve: &GdvCurve) -> Result<()> {
    let path = path.as_ref();
    let out = super::create(path)?;
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| Error::io(path, std::io::Error::other(e));
    w.write_record(["layer_index", "layer_id", "gdv", "missing_flag"]).map_err(err)?;
    for p in &curve.points {
        let gdv = p.gdv.map(fmt_f64).unwrap_or_default();
        let flag = if p.gdv.is_some() { "0" } else { "1" };
        w.write_record([p.layer_index.to_string().as_str(), &p.layer_id, &gdv, flag]).map_err(err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_curve_csv(path: impl AsRef<Path>) -> Result<GdvCurve> {
    let path = path.as_ref();
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::io(path, std::io::Error::other(e)))?;
    let mut points = Vec::new();
    for (row, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse { row, col: 0, msg: e.to_string() })?;
        let parse_err = |col: usize| Error::Parse { row, col, msg: format!("bad field {:?}", rec.get(col)) };
        let layer_index = rec.get(0).and_then(|s| s.parse().ok()).ok_or_else(|| parse_err(0))?;
        let layer_id = rec.get(1).ok_or_else(|| parse_err(1))?.to_string();
        let gdv = match rec.get(2) {
            Some("") => None,
            Some(s) => Some(s.parse().map_err(|_| parse_err(2))?),
            None => return Err(parse_err(2)),
        };
        points.push(CurvePoint { layer_index, layer_id, gdv, error: None });
    }
    Ok(GdvCurve { points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::LabeledDataset;
    use crate::metric::{gdv, gdv_curve};

    #[test]
    fn report_round_trip() {
        let ds = LabeledDataset::from_rows(
            &[vec![0.0, 1.0], vec![0.3, 1.2], vec![1.0, 0.1], vec![1.4, 0.0], vec![2.0, 2.0], vec![2.2, 1.9]],
            vec![0, 0, 1, 1, 7, 7],
        )
        .unwrap();
        let report = gdv(&ds).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.json");
        write_report_json(&p, &report).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.contains("\"schema\": \"gdv-report/1\""));
        let back = read_report_json(&p).unwrap();
        assert_eq!(back, report);
        assert!((back.gdv - back.recompute()).abs() < 1e-12);
    }

    #[test]
    fn wrong_schema_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.json");
        write_json(&p, "other/1", &serde_json::json!({"gdv": 1.0})).unwrap();
        assert!(matches!(read_report_json(&p), Err(Error::Parse { .. })));
    }

    #[test]
    fn curve_with_missing_layer() {
        let good = LabeledDataset::from_rows(&[vec![0.0], vec![0.0], vec![1.0], vec![1.0]], vec![0, 0, 1, 1]).unwrap();
        let dead = LabeledDataset::from_rows(&vec![vec![0.0]; 4], vec![0, 0, 1, 1]).unwrap();
        let curve = gdv_curve(&[("in, put".into(), good.clone()), ("dead".into(), dead)]).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.csv");
        write_curve_csv(&p, &curve).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "layer_index,layer_id,gdv,missing_flag");
        assert_eq!(lines[2], "1,dead,,1");
        let back = read_curve_csv(&p).unwrap();
        assert_eq!(back.values(), curve.values());
        assert_eq!(back.points[0].layer_id, "in, put");
    }
}
