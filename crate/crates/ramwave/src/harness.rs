//! Experiment orchestration: BER-vs-SNR sweeps over the full
//! transmit -> channel -> receive pipeline, mode comparisons, and report
//! serialization. Every run is a pure function of its configuration,
//! seed included.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::{
    apply_jammer, carrier_bin, overlapping_channels, synthesize_fft_frames, synthesize_iq,
    ChannelError, ChannelModel, FrameCadence, RxMode, WifiChannel,
};
use crate::codec::{decode_frame, encode_packet, Packet, FRAME_BITS, PREAMBLE_BITS};
use crate::demod::{fft_bin_series, power_series, DemodConfig, DemodError, SampleSeries};
use crate::tx::{bit_rate_to_bit_time_ms, build_schedule, simulate_emission, BitSchedule, TxError};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Tx(#[from] TxError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Demod(#[from] DemodError),
    #[error("carrier {carrier_mhz} MHz falls in no Wi-Fi channel span")]
    CarrierOutsideBand { carrier_mhz: f64 },
    #[error("invalid experiment config: {0}")]
    InvalidConfig(String),
    #[error("cannot write report to {path}: {source}")]
    ReportIo {
        path: PathBuf,
        source: std::io::Error,
    },
}

/// Which receive pipeline carries the sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReceiverPath {
    Iq,
    FftScanning,
    FftTriggering,
}

impl fmt::Display for ReceiverPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ReceiverPath::Iq => "iq",
            ReceiverPath::FftScanning => "fft_scanning",
            ReceiverPath::FftTriggering => "fft_triggering",
        };
        f.write_str(s)
    }
}

impl FromStr for ReceiverPath {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "iq" => Ok(ReceiverPath::Iq),
            "fft_scanning" | "fft-scanning" | "scanning" => Ok(ReceiverPath::FftScanning),
            "fft_triggering" | "fft-triggering" | "triggering" => Ok(ReceiverPath::FftTriggering),
            other => Err(format!(
                "unknown receiver path '{other}' (expected iq, fft_scanning or fft_triggering)"
            )),
        }
    }
}

fn default_carrier() -> f64 {
    2424.0
}
fn default_gap_bits() -> usize {
    8
}
fn default_iq_rate() -> f64 {
    32_000.0
}
fn default_packets() -> usize {
    25
}
fn default_seed() -> u64 {
    1
}
fn default_bit_rate() -> f64 {
    100.0
}

/// Sweep configuration. Deserializes from the JSON config file the CLI
/// accepts; every field has a default so partial configs work.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub snr_points_db: Vec<f64>,
    #[serde(default = "default_bit_rate")]
    pub bit_rate_bps: f64,
    pub receiver_path: ReceiverPath,
    #[serde(default = "default_packets")]
    pub packets_per_point: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub jammer_cores: u8,
    #[serde(default = "default_carrier")]
    pub carrier_freq_mhz: f64,
    #[serde(default = "default_gap_bits")]
    pub inter_frame_gap_bits: usize,
    #[serde(default = "default_iq_rate")]
    pub iq_sample_rate_hz: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            snr_points_db: vec![0.0, 3.0, 6.0, 9.0, 12.0, 15.0, 18.0],
            bit_rate_bps: default_bit_rate(),
            receiver_path: ReceiverPath::Iq,
            packets_per_point: default_packets(),
            seed: default_seed(),
            jammer_cores: 0,
            carrier_freq_mhz: default_carrier(),
            inter_frame_gap_bits: default_gap_bits(),
            iq_sample_rate_hz: default_iq_rate(),
        }
    }
}

impl ExperimentConfig {
    fn validate(&self) -> Result<(), HarnessError> {
        if self.snr_points_db.is_empty() {
            return Err(HarnessError::InvalidConfig("snr list is empty".into()));
        }
        if self.packets_per_point == 0 {
            return Err(HarnessError::InvalidConfig(
                "packets_per_point must be >= 1".into(),
            ));
        }
        if self.bit_rate_bps <= 0.0 {
            return Err(HarnessError::InvalidConfig(
                "bit_rate_bps must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// One sweep row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BerReport {
    pub snr_db: f64,
    pub bit_rate_bps: f64,
    pub receiver_path: ReceiverPath,
    pub bits_sent: u64,
    pub bit_errors: u64,
    pub ber: f64,
    pub packets_sent: u64,
    pub packets_recovered: u64,
    pub packets_rejected: u64,
    pub seed: u64,
}

/// The channel whose 20 MHz span contains the carrier, preferring the one
/// with the carrier closest to its center.
pub fn best_channel_for_carrier(carrier_mhz: f64) -> Result<&'static WifiChannel, HarnessError> {
    overlapping_channels(carrier_mhz, 0.0)
        .margin
        .into_iter()
        .min_by(|a, b| {
            (carrier_mhz - a.center_mhz)
                .abs()
                .total_cmp(&(carrier_mhz - b.center_mhz).abs())
        })
        .ok_or(HarnessError::CarrierOutsideBand { carrier_mhz })
}

/// Envelope sample rate for the spectral-frame paths: enough to resolve
/// bit boundaries without ballooning memory on slow bit rates.
fn fft_envelope_rate(bit_time_ms: f64) -> f64 {
    (4000.0 / bit_time_ms).max(200.0)
}

fn per_point_seed(seed: u64, index: usize) -> u64 {
    // splitmix64 step keeps points decorrelated but reproducible.
    let mut z = seed.wrapping_add((index as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

struct PointPipeline {
    schedule: BitSchedule,
    series: SampleSeries,
}

/// Transmit `payloads` through the configured path at `snr_db` and return
/// the schedule plus the receiver-side power series.
fn run_pipeline(
    cfg: &ExperimentConfig,
    snr_db: f64,
    payloads: &[u32],
    noise_seed: u64,
) -> Result<PointPipeline, HarnessError> {
    let frames: Vec<_> = payloads
        .iter()
        .map(|&p| encode_packet(Packet::new(p)))
        .collect();
    let bit_time_ms = bit_rate_to_bit_time_ms(cfg.bit_rate_bps);
    let schedule = build_schedule(&frames, bit_time_ms, cfg.inter_frame_gap_bits)?;

    let model = apply_jammer(
        &ChannelModel::new(cfg.carrier_freq_mhz, snr_db, noise_seed),
        cfg.jammer_cores,
    );

    let series = match cfg.receiver_path {
        ReceiverPath::Iq => {
            let fs = cfg.iq_sample_rate_hz;
            let timeline = simulate_emission(&schedule, fs)?;
            let stream = synthesize_iq(
                &timeline,
                &model,
                cfg.carrier_freq_mhz,
                fs,
                schedule.duration_s(),
            )?;
            let dcfg = DemodConfig::for_stream(fs, bit_time_ms)?;
            power_series(&stream, &dcfg)
        }
        ReceiverPath::FftScanning | ReceiverPath::FftTriggering => {
            let mode = if cfg.receiver_path == ReceiverPath::FftScanning {
                RxMode::Scanning
            } else {
                RxMode::Triggering
            };
            let channel = best_channel_for_carrier(cfg.carrier_freq_mhz)?;
            let bin = carrier_bin(channel, cfg.carrier_freq_mhz)
                .ok_or(HarnessError::CarrierOutsideBand {
                    carrier_mhz: cfg.carrier_freq_mhz,
                })?;
            let timeline = simulate_emission(&schedule, fft_envelope_rate(bit_time_ms))?;
            let frames = synthesize_fft_frames(
                &timeline,
                &model,
                mode,
                &[channel.index],
                &FrameCadence::default(),
            )?;
            fft_bin_series(&frames, bin)?
        }
    };

    Ok(PointPipeline { schedule, series })
}

/// Mean received power per absolute bit slot.
fn slot_means(series: &SampleSeries, bit_time_ns: u64, n_slots: usize) -> Vec<Option<f64>> {
    let mut sums = vec![(0.0f64, 0usize); n_slots];
    for p in &series.points {
        let slot = (p.t_ns / bit_time_ns) as usize;
        if slot < n_slots {
            sums[slot].0 += p.power;
            sums[slot].1 += 1;
        }
    }
    sums.into_iter()
        .map(|(sum, n)| (n > 0).then(|| sum / n as f64))
        .collect()
}

/// Run one SNR point. Alignment uses the known schedule: each frame's
/// preamble slots calibrate its 1/0 threshold, then all 48 slots slice
/// against it and compare with the transmitted bits.
pub fn run_ber_point(
    cfg: &ExperimentConfig,
    snr_db: f64,
    point_index: usize,
) -> Result<BerReport, HarnessError> {
    let point_seed = per_point_seed(cfg.seed, point_index);
    let mut rng = ChaCha8Rng::seed_from_u64(point_seed);
    let payloads: Vec<u32> = (0..cfg.packets_per_point).map(|_| rng.gen()).collect();
    let pipeline = run_pipeline(cfg, snr_db, &payloads, point_seed ^ 0xa5a5_5a5a_0f0f_f0f0)?;

    let bit_time_ns = pipeline.schedule.bit_time_ns();
    let n_slots = pipeline.schedule.bits.len();
    let means = slot_means(&pipeline.series, bit_time_ns, n_slots);

    let frame_stride = FRAME_BITS + cfg.inter_frame_gap_bits;
    let mut bit_errors = 0u64;
    let mut recovered = 0u64;
    let mut rejected = 0u64;
    for i in 0..payloads.len() {
        let offset = i * frame_stride;
        let truth = &pipeline.schedule.bits[offset..offset + FRAME_BITS];
        let slots = &means[offset..offset + FRAME_BITS];
        if slots.iter().any(Option::is_none) {
            return Err(HarnessError::InvalidConfig(format!(
                "frame {i} has empty bit slots; receiver cadence too slow for {} bit/s",
                cfg.bit_rate_bps
            )));
        }
        let on_mean = slots[..PREAMBLE_BITS]
            .iter()
            .step_by(2)
            .map(|m| m.unwrap())
            .sum::<f64>()
            / 4.0;
        let off_mean = slots[1..PREAMBLE_BITS]
            .iter()
            .step_by(2)
            .map(|m| m.unwrap())
            .sum::<f64>()
            / 4.0;
        let threshold = (on_mean + off_mean) / 2.0;
        let decided: Vec<u8> = slots
            .iter()
            .map(|m| u8::from(m.unwrap() > threshold))
            .collect();
        bit_errors += decided
            .iter()
            .zip(truth)
            .filter(|(a, b)| a != b)
            .count() as u64;
        // Recovery is the protocol's verdict (CRC), independent of the
        // bit-level comparison above.
        match decode_frame(&decided) {
            Ok(_) => recovered += 1,
            Err(_) => rejected += 1,
        }
    }

    let bits_sent = (payloads.len() * FRAME_BITS) as u64;
    Ok(BerReport {
        snr_db,
        bit_rate_bps: cfg.bit_rate_bps,
        receiver_path: cfg.receiver_path,
        bits_sent,
        bit_errors,
        ber: bit_errors as f64 / bits_sent as f64,
        packets_sent: payloads.len() as u64,
        packets_recovered: recovered,
        packets_rejected: rejected,
        seed: cfg.seed,
    })
}

/// Run every SNR point in the configuration, in order.
pub fn run_ber_sweep(cfg: &ExperimentConfig) -> Result<Vec<BerReport>, HarnessError> {
    cfg.validate()?;
    cfg.snr_points_db
        .iter()
        .enumerate()
        .map(|(i, &snr)| run_ber_point(cfg, snr, i))
        .collect()
}

/// One row of the scanning-vs-triggering comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeRow {
    pub mode: RxMode,
    pub frames_per_s: f64,
    /// Fastest bit rate the mode's per-channel cadence supports with at
    /// least 4 samples per bit.
    pub max_bit_rate_bps: f64,
    pub bit_rate_bps: f64,
    pub ber: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeComparison {
    pub scanning: ModeRow,
    pub triggering: ModeRow,
    pub observation_s: f64,
}

/// Compare reception modes over a fixed observation interval: measured
/// frame throughput, the bit rate each cadence supports, and the BER each
/// achieves at the configured SNR (scanning runs at its usual 1 bit/s,
/// triggering at the configured rate).
pub fn compare_modes(cfg: &ExperimentConfig, observation_s: f64) -> Result<ModeComparison, HarnessError> {
    cfg.validate()?;
    let snr_db = cfg.snr_points_db[0];
    let channel = best_channel_for_carrier(cfg.carrier_freq_mhz)?;
    let cadence = FrameCadence::default();

    // Frame throughput over the observation window.
    let all_on = BitSchedule::new(vec![1; (observation_s).ceil() as usize], 1000.0)?;
    let timeline = simulate_emission(&all_on, 1000.0)?;
    let model = ChannelModel::new(cfg.carrier_freq_mhz, snr_db, cfg.seed);
    let count = |mode: RxMode| -> Result<usize, HarnessError> {
        Ok(synthesize_fft_frames(&timeline, &model, mode, &[channel.index], &cadence)?.len())
    };
    let scanning_frames = count(RxMode::Scanning)?;
    let triggering_frames = count(RxMode::Triggering)?;

    let mut scan_cfg = cfg.clone();
    scan_cfg.receiver_path = ReceiverPath::FftScanning;
    scan_cfg.bit_rate_bps = 1.0;
    let scan_report = run_ber_point(&scan_cfg, snr_db, 0)?;

    let mut trig_cfg = cfg.clone();
    trig_cfg.receiver_path = ReceiverPath::FftTriggering;
    trig_cfg.bit_rate_bps = if cfg.bit_rate_bps < cadence.triggering_fps / 4.0 {
        cfg.bit_rate_bps
    } else {
        10.0
    };
    let trig_report = run_ber_point(&trig_cfg, snr_db, 0)?;

    Ok(ModeComparison {
        scanning: ModeRow {
            mode: RxMode::Scanning,
            frames_per_s: scanning_frames as f64 / observation_s,
            max_bit_rate_bps: cadence.scanning_fps / 4.0,
            bit_rate_bps: scan_cfg.bit_rate_bps,
            ber: scan_report.ber,
        },
        triggering: ModeRow {
            mode: RxMode::Triggering,
            frames_per_s: triggering_frames as f64 / observation_s,
            max_bit_rate_bps: cadence.triggering_fps / 4.0,
            bit_rate_bps: trig_cfg.bit_rate_bps,
            ber: trig_report.ber,
        },
        observation_s,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(format!("unknown report format '{other}'")),
        }
    }
}

pub const CSV_HEADER: &str = "snr_db,bit_rate_bps,receiver_path,bits_sent,bit_errors,ber,packets_sent,packets_recovered,packets_rejected,seed";

/// Render reports as CSV with the fixed column set.
pub fn render_csv(reports: &[BerReport]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in reports {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            r.snr_db,
            r.bit_rate_bps,
            r.receiver_path,
            r.bits_sent,
            r.bit_errors,
            r.ber,
            r.packets_sent,
            r.packets_recovered,
            r.packets_rejected,
            r.seed
        ));
    }
    out
}

pub fn render_json(reports: &[BerReport]) -> String {
    serde_json::to_string_pretty(reports).expect("reports serialize")
}

/// Write reports to `path` in the requested format.
pub fn emit_report(
    reports: &[BerReport],
    format: ReportFormat,
    path: &Path,
) -> Result<(), HarnessError> {
    if reports.is_empty() {
        return Err(HarnessError::InvalidConfig("no reports to emit".into()));
    }
    let body = match format {
        ReportFormat::Csv => render_csv(reports),
        ReportFormat::Json => render_json(reports),
    };
    let mut file = fs::File::create(path).map_err(|source| HarnessError::ReportIo {
        path: path.to_path_buf(),
        source,
    })?;
    file.write_all(body.as_bytes())
        .map_err(|source| HarnessError::ReportIo {
            path: path.to_path_buf(),
            source,
        })
}
