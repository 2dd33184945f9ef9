//! On-disk interchange formats.
//!
//! - IQ capture: raw interleaved little-endian f32 (I,Q) pairs, described
//!   by a JSON sidecar at `<path>.json`.
//! - Spectral frames: JSON lines, one frame per line.
//! - Activity log: JSON lines, one `{"t_ns", "state"}` transition per line.

use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::{FftFrame, IqStream};
use crate::tx::{ActivityLog, Transition};

#[derive(Debug, Error)]
pub enum FileError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("{path}: unsupported sample format '{format}' (expected cf32le)")]
    UnsupportedFormat { path: PathBuf, format: String },
    #[error("{path}: truncated sample data ({len} bytes is not a multiple of 8)")]
    TruncatedSamples { path: PathBuf, len: usize },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> FileError + '_ {
    move |source| FileError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct IqSidecar {
    sample_rate_hz: f64,
    center_freq_mhz: f64,
    format: String,
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut os = path.as_os_str().to_owned();
    os.push(".json");
    PathBuf::from(os)
}

pub fn write_iq(path: &Path, stream: &IqStream) -> Result<(), FileError> {
    let mut out = BufWriter::new(fs::File::create(path).map_err(io_err(path))?);
    for s in &stream.samples {
        out.write_all(&(s.re as f32).to_le_bytes())
            .map_err(io_err(path))?;
        out.write_all(&(s.im as f32).to_le_bytes())
            .map_err(io_err(path))?;
    }
    out.flush().map_err(io_err(path))?;

    let sidecar = IqSidecar {
        sample_rate_hz: stream.sample_rate_hz,
        center_freq_mhz: stream.center_freq_mhz,
        format: "cf32le".to_string(),
    };
    let meta_path = sidecar_path(path);
    let body = serde_json::to_string_pretty(&sidecar).map_err(|source| FileError::Json {
        path: meta_path.clone(),
        source,
    })?;
    fs::write(&meta_path, body).map_err(io_err(&meta_path))
}

pub fn read_iq(path: &Path) -> Result<IqStream, FileError> {
    let meta_path = sidecar_path(path);
    let meta = fs::read_to_string(&meta_path).map_err(io_err(&meta_path))?;
    let sidecar: IqSidecar = serde_json::from_str(&meta).map_err(|source| FileError::Json {
        path: meta_path.clone(),
        source,
    })?;
    if sidecar.format != "cf32le" {
        return Err(FileError::UnsupportedFormat {
            path: meta_path,
            format: sidecar.format,
        });
    }

    let mut bytes = Vec::new();
    fs::File::open(path)
        .map_err(io_err(path))?
        .read_to_end(&mut bytes)
        .map_err(io_err(path))?;
    if bytes.len() % 8 != 0 {
        return Err(FileError::TruncatedSamples {
            path: path.to_path_buf(),
            len: bytes.len(),
        });
    }
    let samples = bytes
        .chunks_exact(8)
        .map(|c| {
            let re = f32::from_le_bytes([c[0], c[1], c[2], c[3]]);
            let im = f32::from_le_bytes([c[4], c[5], c[6], c[7]]);
            Complex64::new(re as f64, im as f64)
        })
        .collect();
    Ok(IqStream {
        sample_rate_hz: sidecar.sample_rate_hz,
        center_freq_mhz: sidecar.center_freq_mhz,
        samples,
    })
}

pub fn write_fft_frames(path: &Path, frames: &[FftFrame]) -> Result<(), FileError> {
    let mut out = BufWriter::new(fs::File::create(path).map_err(io_err(path))?);
    for frame in frames {
        let line = serde_json::to_string(frame).map_err(|source| FileError::Json {
            path: path.to_path_buf(),
            source,
        })?;
        writeln!(out, "{line}").map_err(io_err(path))?;
    }
    out.flush().map_err(io_err(path))
}

pub fn read_fft_frames(path: &Path) -> Result<Vec<FftFrame>, FileError> {
    let reader = BufReader::new(fs::File::open(path).map_err(io_err(path))?);
    let mut frames = Vec::new();
    for line in reader.lines() {
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        frames.push(
            serde_json::from_str(&line).map_err(|source| FileError::Json {
                path: path.to_path_buf(),
                source,
            })?,
        );
    }
    Ok(frames)
}

pub fn write_activity_log(path: &Path, log: &ActivityLog) -> Result<(), FileError> {
    let mut out = BufWriter::new(fs::File::create(path).map_err(io_err(path))?);
    for t in &log.transitions {
        let line = serde_json::to_string(t).map_err(|source| FileError::Json {
            path: path.to_path_buf(),
            source,
        })?;
        writeln!(out, "{line}").map_err(io_err(path))?;
    }
    out.flush().map_err(io_err(path))
}

pub fn read_transitions(path: &Path) -> Result<Vec<Transition>, FileError> {
    let reader = BufReader::new(fs::File::open(path).map_err(io_err(path))?);
    let mut transitions = Vec::new();
    for line in reader.lines() {
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        transitions.push(
            serde_json::from_str(&line).map_err(|source| FileError::Json {
                path: path.to_path_buf(),
                source,
            })?,
        );
    }
    Ok(transitions)
}
