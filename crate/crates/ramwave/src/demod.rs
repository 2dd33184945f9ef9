//! OOK demodulation: windowed power estimation via Welch's method,
//! enable-sequence detection by correlation, threshold slicing and packet
//! extraction. Works identically over IQ streams and spectral-frame
//! streams — both reduce to a [`SampleSeries`] of (timestamp, power)
//! points before slicing.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;
use thiserror::Error;

use crate::channel::{FftFrame, IqStream, SPECTRAL_BINS};
use crate::codec::{decode_frame, DecodeError, Packet, FRAME_BITS, PREAMBLE_BITS};

/// The fixed alternating pattern opening every frame.
pub const ENABLE_SEQUENCE: [u8; 8] = [1, 0, 1, 0, 1, 0, 1, 0];

/// Correlations this close to the local maximum count as ties and resolve
/// to the earliest offset. A payload that happens to continue alternating
/// makes the template match equally well two bits late; the margin keeps
/// noise from breaking such structural ties in the late alignment's favor.
/// Genuine sub-bit misalignment costs far more correlation than this (one
/// sample of shift already drops a clean match to ~0.6).
pub const CORR_TIE_MARGIN: f64 = 0.05;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DemodError {
    #[error("window of {got} samples is shorter than one Welch segment ({segment})")]
    WindowTooShort { got: usize, segment: usize },
    #[error("bin {0} out of range (frames carry {SPECTRAL_BINS} bins)")]
    BinOutOfRange(usize),
    #[error("invalid demod config: {0}")]
    InvalidConfig(String),
}

/// Demodulator parameters.
///
/// `freq_offset_hz` is where the monitored tone sits within the stream;
/// the stream is shifted so that tone lands on PSD bin 0 before power
/// extraction. Welch defaults follow the usual choices: segment length
/// one-eighth of the window, 50% overlap, Hann taper.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DemodConfig {
    pub freq_offset_hz: f64,
    pub sample_rate_hz: f64,
    pub buffer_size: usize,
    pub bit_time_ms: f64,
    pub window_size: usize,
    pub corr_thresh: f64,
    pub welch_segment: usize,
    pub welch_overlap: f64,
}

pub const DEFAULT_CORR_THRESH: f64 = 0.7;

impl DemodConfig {
    pub fn new(
        freq_offset_hz: f64,
        sample_rate_hz: f64,
        buffer_size: usize,
        bit_time_ms: f64,
        window_size: usize,
        corr_thresh: f64,
        welch_segment: usize,
        welch_overlap: f64,
    ) -> Result<Self, DemodError> {
        let cfg = Self {
            freq_offset_hz,
            sample_rate_hz,
            buffer_size,
            bit_time_ms,
            window_size,
            corr_thresh,
            welch_segment,
            welch_overlap,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Pick a window size for a stream: the largest power of two giving at
    /// least 4 analysis windows per bit, with Welch defaults.
    pub fn for_stream(sample_rate_hz: f64, bit_time_ms: f64) -> Result<Self, DemodError> {
        let samples_per_bit = sample_rate_hz * bit_time_ms / 1000.0;
        let max_window = (samples_per_bit / 4.0).floor() as usize;
        if max_window < 8 {
            return Err(DemodError::InvalidConfig(format!(
                "{} Hz sampling leaves fewer than 32 samples per {} ms bit",
                sample_rate_hz, bit_time_ms
            )));
        }
        let window_size = 1usize << max_window.ilog2();
        Self::new(
            0.0,
            sample_rate_hz,
            window_size * 64,
            bit_time_ms,
            window_size,
            DEFAULT_CORR_THRESH,
            (window_size / 8).max(4),
            0.5,
        )
    }

    fn validate(&self) -> Result<(), DemodError> {
        if self.window_size > self.buffer_size {
            return Err(DemodError::InvalidConfig(format!(
                "window_size {} exceeds buffer_size {}",
                self.window_size, self.buffer_size
            )));
        }
        let samples_per_bit = self.sample_rate_hz * self.bit_time_ms / 1000.0;
        if self.window_size as f64 > samples_per_bit / 4.0 {
            return Err(DemodError::InvalidConfig(format!(
                "window_size {} leaves fewer than 4 windows per bit",
                self.window_size
            )));
        }
        if !(0.0..1.0).contains(&self.corr_thresh) || self.corr_thresh == 0.0 {
            return Err(DemodError::InvalidConfig(format!(
                "corr_thresh {} outside (0,1)",
                self.corr_thresh
            )));
        }
        if self.welch_segment == 0 || self.welch_segment > self.window_size {
            return Err(DemodError::InvalidConfig(format!(
                "welch_segment {} invalid for window {}",
                self.welch_segment, self.window_size
            )));
        }
        if !(0.0..1.0).contains(&self.welch_overlap) {
            return Err(DemodError::InvalidConfig(format!(
                "welch_overlap {} outside [0,1)",
                self.welch_overlap
            )));
        }
        Ok(())
    }

    /// Duration of one analysis window in nanoseconds.
    pub fn window_ns(&self) -> u64 {
        (self.window_size as f64 * 1e9 / self.sample_rate_hz).round() as u64
    }

    pub fn bit_time_ns(&self) -> u64 {
        (self.bit_time_ms * 1e6).round() as u64
    }
}

fn hann(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 0.5 - 0.5 * (std::f64::consts::TAU * i as f64 / n as f64).cos())
        .collect()
}

struct WelchPlan {
    fft: Arc<dyn Fft<f64>>,
    taper: Vec<f64>,
    taper_power: f64,
    segment: usize,
    hop: usize,
}

impl WelchPlan {
    fn new(cfg: &DemodConfig) -> Self {
        let segment = cfg.welch_segment;
        let taper = hann(segment);
        let taper_power: f64 = taper.iter().map(|w| w * w).sum();
        let hop = ((segment as f64 * (1.0 - cfg.welch_overlap)).round() as usize).max(1);
        Self {
            fft: FftPlanner::new().plan_fft_forward(segment),
            taper,
            taper_power,
            segment,
            hop,
        }
    }

    /// Averaged periodogram over overlapping tapered segments. Normalized
    /// so the PSD sums to the taper-weighted mean square of the input
    /// (Parseval-consistent).
    fn psd(&self, window: &[Complex64]) -> Result<Vec<f64>, DemodError> {
        if window.len() < self.segment {
            return Err(DemodError::WindowTooShort {
                got: window.len(),
                segment: self.segment,
            });
        }
        let n_segments = (window.len() - self.segment) / self.hop + 1;
        let mut psd = vec![0.0f64; self.segment];
        let mut buf = vec![Complex64::default(); self.segment];
        let norm = self.segment as f64 * self.taper_power;
        for s in 0..n_segments {
            let chunk = &window[s * self.hop..s * self.hop + self.segment];
            for (b, (&x, &w)) in buf.iter_mut().zip(chunk.iter().zip(&self.taper)) {
                *b = x * w;
            }
            self.fft.process(&mut buf);
            for (p, b) in psd.iter_mut().zip(&buf) {
                *p += b.norm_sqr() / norm;
            }
        }
        for p in &mut psd {
            *p /= n_segments as f64;
        }
        Ok(psd)
    }
}

/// Power spectral density of one analysis window by Welch's method.
/// Output has `welch_segment` bins; bin k covers frequency k*fs/segment
/// (wrapping past Nyquist, as usual for complex input).
pub fn welch_psd(window: &[Complex64], cfg: &DemodConfig) -> Result<Vec<f64>, DemodError> {
    WelchPlan::new(cfg).psd(window)
}

/// One (timestamp, power) observation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplePoint {
    pub t_ns: u64,
    pub power: f64,
}

/// Ordered power-vs-time series; timestamps strictly increase and are
/// uniformly spaced for both producers in this crate.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SampleSeries {
    pub points: Vec<SamplePoint>,
}

impl SampleSeries {
    /// Spacing between consecutive points, if the series has at least two.
    pub fn dt_ns(&self) -> Option<u64> {
        (self.points.len() >= 2).then(|| self.points[1].t_ns - self.points[0].t_ns)
    }

    /// Total time the series spans, counting one spacing past the last point.
    pub fn span_ns(&self) -> u64 {
        match (self.points.first(), self.points.last(), self.dt_ns()) {
            (Some(first), Some(last), Some(dt)) => last.t_ns - first.t_ns + dt,
            (Some(_), Some(_), None) => 0,
            _ => 0,
        }
    }
}

/// Split the stream into consecutive windows and reduce each to the PSD
/// power at the monitored tone bin (bin 0 after shifting the tone to
/// baseband). Point timestamps are window starts.
pub fn power_series(stream: &IqStream, cfg: &DemodConfig) -> SampleSeries {
    let plan = WelchPlan::new(cfg);
    let shift_step = -std::f64::consts::TAU * cfg.freq_offset_hz / cfg.sample_rate_hz;
    let n_windows = stream.samples.len() / cfg.window_size;
    let mut shifted = vec![Complex64::default(); cfg.window_size];
    let mut points = Vec::with_capacity(n_windows);
    for w in 0..n_windows {
        let chunk = &stream.samples[w * cfg.window_size..(w + 1) * cfg.window_size];
        let power = if cfg.freq_offset_hz == 0.0 {
            plan.psd(chunk).expect("window >= segment by config") [0]
        } else {
            for (i, (out, &x)) in shifted.iter_mut().zip(chunk).enumerate() {
                let phase = shift_step * i as f64;
                *out = x * Complex64::new(phase.cos(), phase.sin());
            }
            plan.psd(&shifted).expect("window >= segment by config")[0]
        };
        let t_ns = (w as f64 * cfg.window_size as f64 * 1e9 / cfg.sample_rate_hz).round() as u64;
        points.push(SamplePoint { t_ns, power });
    }
    SampleSeries { points }
}

/// One point per spectral frame: the magnitude of the requested bin.
pub fn fft_bin_series(frames: &[FftFrame], bin: usize) -> Result<SampleSeries, DemodError> {
    if bin >= SPECTRAL_BINS {
        return Err(DemodError::BinOutOfRange(bin));
    }
    Ok(SampleSeries {
        points: frames
            .iter()
            .map(|f| SamplePoint {
                t_ns: f.timestamp_ns,
                power: f.bins[bin],
            })
            .collect(),
    })
}

/// A locked enable sequence: where it starts and the 1/0 power threshold
/// estimated from it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnableDetection {
    /// Index into the series where the sequence begins.
    pub offset_index: usize,
    /// Midpoint between mean ON-slot and mean OFF-slot power across the
    /// detected sequence.
    pub threshold: f64,
}

/// Search the series for the `10101010` enable sequence.
///
/// The series is correlated (Pearson form, so absolute power scale is
/// irrelevant) against the ideal rectangular waveform at each candidate
/// offset. Detection fires at the earliest offset crossing `corr_thresh`,
/// refined to the local correlation maximum within one sequence length —
/// the bounded-buffer behavior of the streaming detector, which keeps the
/// scan linear and locks the first sequence rather than the globally
/// best-correlated one. Returns `None` when the series spans fewer than
/// twice the sequence duration or nothing crosses the threshold.
pub fn detect_enable(
    series: &SampleSeries,
    bit_time_ms: f64,
    corr_thresh: f64,
) -> Option<EnableDetection> {
    let dt_ns = series.dt_ns()?;
    let bit_time_ns = (bit_time_ms * 1e6).round() as u64;
    let bits_in_series = series.span_ns() as f64 / bit_time_ns as f64;
    if bits_in_series < 2.0 * ENABLE_SEQUENCE.len() as f64 {
        return None;
    }
    let samples_per_bit = bit_time_ns as f64 / dt_ns as f64;
    let template_len = (ENABLE_SEQUENCE.len() as f64 * samples_per_bit).ceil() as usize;
    if template_len < 2 || series.points.len() < template_len {
        return None;
    }

    // Mean-removed template; uniform spacing makes it offset-invariant.
    let mut template: Vec<f64> = (0..template_len)
        .map(|i| {
            let bit = ((i as f64 / samples_per_bit).floor() as usize).min(ENABLE_SEQUENCE.len() - 1);
            ENABLE_SEQUENCE[bit] as f64
        })
        .collect();
    let t_mean = template.iter().sum::<f64>() / template_len as f64;
    for t in &mut template {
        *t -= t_mean;
    }
    let t_norm = template.iter().map(|t| t * t).sum::<f64>().sqrt();

    let power: Vec<f64> = series.points.iter().map(|p| p.power).collect();
    let corr_at = |j: usize| -> f64 {
        let x = &power[j..j + template_len];
        let x_sum: f64 = x.iter().sum();
        let x_sq: f64 = x.iter().map(|v| v * v).sum();
        let mut dot = 0.0;
        for (v, t) in x.iter().zip(&template) {
            dot += v * t;
        }
        let var = x_sq - x_sum * x_sum / template_len as f64;
        if var <= 0.0 || t_norm == 0.0 {
            return 0.0;
        }
        dot / (var.sqrt() * t_norm)
    };

    let last_offset = power.len() - template_len;
    let crossing = (0..=last_offset).find(|&j| corr_at(j) >= corr_thresh)?;
    let search_end = (crossing + template_len + samples_per_bit.ceil() as usize).min(last_offset);
    let span: Vec<f64> = (crossing..=search_end).map(corr_at).collect();
    let max_corr = span.iter().copied().fold(f64::MIN, f64::max);
    let offset_index = crossing
        + span
            .iter()
            .position(|&c| c >= max_corr - CORR_TIE_MARGIN)
            .expect("span contains its maximum");

    // Threshold from the located sequence: midpoint of ON and OFF slot means.
    let mut on_sum = 0.0;
    let mut on_n = 0usize;
    let mut off_sum = 0.0;
    let mut off_n = 0usize;
    for i in 0..template_len {
        let bit = ((i as f64 / samples_per_bit).floor() as usize).min(ENABLE_SEQUENCE.len() - 1);
        let p = power[offset_index + i];
        if ENABLE_SEQUENCE[bit] == 1 {
            on_sum += p;
            on_n += 1;
        } else {
            off_sum += p;
            off_n += 1;
        }
    }
    let threshold = (on_sum / on_n as f64 + off_sum / off_n as f64) / 2.0;
    Some(EnableDetection {
        offset_index,
        threshold,
    })
}

/// Result of slicing a series into bits.
#[derive(Debug, Clone, PartialEq)]
pub struct SlicedBits {
    pub bits: Vec<u8>,
    /// False when the series ran out before `n_bits` full slots.
    pub complete: bool,
}

/// Slice `n_bits` bit slots starting at the detection offset: a slot whose
/// mean power exceeds the threshold is a 1.
pub fn slice_bits(
    series: &SampleSeries,
    detection: &EnableDetection,
    bit_time_ms: f64,
    n_bits: usize,
) -> SlicedBits {
    let bit_time_ns = (bit_time_ms * 1e6).round() as u64;
    let points = &series.points[detection.offset_index.min(series.points.len())..];
    let Some(first) = points.first() else {
        return SlicedBits {
            bits: Vec::new(),
            complete: n_bits == 0,
        };
    };
    let t0 = first.t_ns;
    let dt = series.dt_ns().unwrap_or(bit_time_ns);
    let mut bits = Vec::with_capacity(n_bits);
    let mut idx = 0usize;
    for k in 0..n_bits {
        let slot_end = t0 + (k as u64 + 1) * bit_time_ns;
        let mut sum = 0.0;
        let mut n = 0usize;
        while idx < points.len() && points[idx].t_ns < slot_end {
            sum += points[idx].power;
            n += 1;
            idx += 1;
        }
        // A slot is only trustworthy if the series actually covers it.
        let covered = idx < points.len() || points.last().unwrap().t_ns + dt >= slot_end;
        if n == 0 || !covered {
            return SlicedBits {
                bits,
                complete: false,
            };
        }
        bits.push(u8::from(sum / n as f64 > detection.threshold));
    }
    SlicedBits {
        bits,
        complete: true,
    }
}

/// Scan a bit stream for frames: at every preamble-aligned position, try
/// to decode 48 bits. Accepted frames advance the cursor past themselves;
/// rejected candidates advance one bit.
pub fn recover_packets(bits: &[u8]) -> Vec<Result<Packet, DecodeError>> {
    let preamble = &ENABLE_SEQUENCE[..];
    let mut results = Vec::new();
    let mut i = 0usize;
    while i + FRAME_BITS <= bits.len() {
        if &bits[i..i + PREAMBLE_BITS] != preamble {
            i += 1;
            continue;
        }
        match decode_frame(&bits[i..i + FRAME_BITS]) {
            Ok(packet) => {
                results.push(Ok(packet));
                i += FRAME_BITS;
            }
            Err(e) => {
                results.push(Err(e));
                i += 1;
            }
        }
    }
    results
}

/// Everything one demodulation pass produces.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DemodOutput {
    pub bits: Vec<u8>,
    pub packets: Vec<Packet>,
    pub errors: Vec<DecodeError>,
    pub detection: Option<EnableDetection>,
}

/// Full pipeline over a prepared series: detect the enable sequence, slice
/// every whole bit slot the series covers from there, and extract packets.
pub fn demodulate_series(series: &SampleSeries, bit_time_ms: f64, corr_thresh: f64) -> DemodOutput {
    let Some(detection) = detect_enable(series, bit_time_ms, corr_thresh) else {
        return DemodOutput::default();
    };
    let bit_time_ns = (bit_time_ms * 1e6).round() as u64;
    let dt = series.dt_ns().unwrap_or(bit_time_ns);
    let first = series.points[detection.offset_index].t_ns;
    let last = series.points.last().unwrap().t_ns;
    let n_bits = ((last + dt - first) / bit_time_ns) as usize;
    let sliced = slice_bits(series, &detection, bit_time_ms, n_bits);
    let mut packets = Vec::new();
    let mut errors = Vec::new();
    for r in recover_packets(&sliced.bits) {
        match r {
            Ok(p) => packets.push(p),
            Err(e) => errors.push(e),
        }
    }
    DemodOutput {
        bits: sliced.bits,
        packets,
        errors,
        detection: Some(detection),
    }
}
