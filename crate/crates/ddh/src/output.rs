//! CSV and JSON artifacts.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use ddh_core::fading::FadingProcess;
use ddh_core::scenario::{BerPoint, Source};

use crate::harness::FloorPoint;

#[derive(Debug, thiserror::Error)]
pub enum OutputError {
    #[error("io error: {0}")]
    Io(#[from] io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type OutputResult<T> = std::result::Result<T, OutputError>;

/// Formats an SNR value; the floor row uses `inf`.
fn snr_field(snr_db: f64) -> String {
    if snr_db.is_infinite() {
        "inf".into()
    } else {
        format!("{snr_db}")
    }
}

fn num(x: f64) -> String {
    format!("{x:e}")
}

/// `snr_db,ber_theory,source`
pub fn write_theory_csv<W: Write>(out: W, points: &[BerPoint]) -> OutputResult<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(["snr_db", "ber_theory", "source"])?;
    for p in points {
        let source = match p.source {
            Source::Floor => "floor",
            _ => "theory",
        };
        w.write_record([snr_field(p.snr_db), num(p.ber), source.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// `snr_db,ber_sim,errors,trials,ci_low,ci_high`
pub fn write_simulation_csv<W: Write>(out: W, points: &[BerPoint]) -> OutputResult<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(["snr_db", "ber_sim", "errors", "trials", "ci_low", "ci_high"])?;
    for p in points {
        w.write_record([
            snr_field(p.snr_db),
            num(p.ber),
            p.errors.to_string(),
            p.trials.to_string(),
            num(p.ci_low),
            num(p.ci_high),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `f,f1,f2,floor_theory,snr_db,ber_sim,errors,trials,ci_low,ci_high`
pub fn write_floor_csv<W: Write>(out: W, points: &[FloorPoint]) -> OutputResult<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(["f", "f1", "f2", "floor_theory", "snr_db", "ber_sim", "errors", "trials", "ci_low", "ci_high"])?;
    for p in points {
        w.write_record([
            p.f.to_string(),
            p.f1.to_string(),
            p.f2.to_string(),
            num(p.floor),
            snr_field(p.sim.snr_db),
            num(p.sim.ber),
            p.sim.errors.to_string(),
            p.sim.trials.to_string(),
            num(p.sim.ci_low),
            num(p.sim.ci_high),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `k,re,im` samples of a fading process.
pub fn write_fading_csv<W: Write>(out: W, process: &FadingProcess) -> OutputResult<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(["k", "re", "im"])?;
    for (k, h) in process.samples().iter().enumerate() {
        w.write_record([k.to_string(), num(h.re), num(h.im)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<W: Write, T: Serialize>(mut out: W, value: &T) -> OutputResult<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")?;
    Ok(())
}

/// Provenance record written next to every artifact.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command_line: Vec<String>,
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    pub version: String,
    pub timestamp: String,
}

impl RunManifest {
    pub fn new(command_line: Vec<String>, config: serde_json::Value, seed: Option<u64>) -> Self {
        Self {
            command_line,
            config,
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        }
    }
}

/// `<artifact>.manifest.json`
pub fn manifest_path(artifact: &Path) -> PathBuf {
    let mut name = artifact.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

/// Writes `bytes` to `path` and the manifest beside it.
pub fn write_artifact(path: &Path, bytes: &[u8], manifest: &RunManifest) -> OutputResult<()> {
    fs::write(path, bytes)?;
    let mut json = Vec::new();
    write_json(&mut json, manifest)?;
    fs::write(manifest_path(path), json)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ddh_core::fading::{gen_jakes, ChannelParams, Hop};

    #[test]
    fn theory_csv_layout() {
        let mut buf = Vec::new();
        write_theory_csv(&mut buf, &[BerPoint::theory(0.0, 0.25), BerPoint::floor(1e-3)]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "snr_db,ber_theory,source\n0,2.5e-1,theory\ninf,1e-3,floor\n");
    }

    #[test]
    fn simulation_csv_layout() {
        let mut buf = Vec::new();
        write_simulation_csv(&mut buf, &[BerPoint::simulated(12.5, 10, 1000)]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("snr_db,ber_sim,errors,trials,ci_low,ci_high"));
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(&row[..4], ["12.5", "1e-2", "10", "1000"]);
        assert!(text.ends_with('\n'));
    }

    #[test]
    fn fading_csv_round_trip() {
        let ch = ChannelParams::new(1.0, 1.0, 0.01, 0.01).unwrap();
        let h = gen_jakes(&ch, Hop::SourceRelay, 5, 1).unwrap();
        let mut buf = Vec::new();
        write_fading_csv(&mut buf, &h).unwrap();
        let mut r = csv::Reader::from_reader(buf.as_slice());
        assert_eq!(r.headers().unwrap(), vec!["k", "re", "im"]);
        for (k, rec) in r.records().enumerate() {
            let rec = rec.unwrap();
            assert_eq!(rec[0].parse::<usize>().unwrap(), k);
            assert_eq!(rec[1].parse::<f64>().unwrap(), h.samples()[k].re);
            assert_eq!(rec[2].parse::<f64>().unwrap(), h.samples()[k].im);
        }
    }

    #[test]
    fn manifest_sits_beside_artifact() {
        assert_eq!(manifest_path(Path::new("out/ber.csv")), PathBuf::from("out/ber.csv.manifest.json"));
    }
}
