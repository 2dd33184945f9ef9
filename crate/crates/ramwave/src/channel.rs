//! Channel model: DDR-bus carrier placement in the 2.4 GHz band and the
//! noisy synthetic channel, in two receiver-facing forms — complex baseband
//! IQ streams (SDR-style) and 56-bin spectral-scan frames (Wi-Fi
//! chipset-style).

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tx::EmissionTimeline;

/// Bins reported per spectral-scan frame, spanning the 20 MHz channel.
pub const SPECTRAL_BINS: usize = 56;
/// Width of the spectral span one frame covers, centered on the channel.
pub const CHANNEL_SPAN_MHZ: f64 = 20.0;
/// Half-width of the interference-margin query around a carrier.
pub const INTERFERENCE_MARGIN_MHZ: f64 = 10.0;
/// Median of |g1|+|g2| for independent standard normals; calibrates the
/// spectral-frame noise floor so carrier-to-median-bin ratios track the
/// configured SNR.
pub const NOISE_MAG_MEDIAN: f64 = 1.4878;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("line width {0} bits not one of 16/32/64")]
    InvalidLineWidth(u32),
    #[error("harmonic must be >= 1")]
    InvalidHarmonic,
    #[error("clock rate must be positive, got {0} MHz")]
    InvalidClockRate(f64),
    #[error("tone offset {offset_hz} Hz beyond Nyquist for {sample_rate_hz} Hz sampling")]
    OffsetBeyondNyquist { offset_hz: f64, sample_rate_hz: f64 },
    #[error("sample rate {sample_rate_hz} Hz below 4x signal bandwidth {bandwidth_hz} Hz")]
    SampleRateTooLow { sample_rate_hz: f64, bandwidth_hz: f64 },
    #[error("no such Wi-Fi channel: {0}")]
    UnknownChannel(u8),
    #[error("channel set must not be empty")]
    EmptyChannelSet,
    #[error("triggering mode locks exactly one channel, got {0}")]
    TriggeringChannelCount(usize),
}

/// Memory-bus parameters that place the emission carrier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DdrConfig {
    /// Memory bus clock rate in MHz (e.g. 2400 for DDR4-2400).
    pub clock_rate_mhz: f64,
    /// Line transfer width in bits: 16, 32 or 64.
    pub line_width_bits: u32,
    /// Which clock harmonic the receiver tunes to.
    pub harmonic: u32,
}

impl DdrConfig {
    pub fn new(clock_rate_mhz: f64, line_width_bits: u32, harmonic: u32) -> Result<Self, ChannelError> {
        if clock_rate_mhz < 0.0 {
            return Err(ChannelError::InvalidClockRate(clock_rate_mhz));
        }
        if !matches!(line_width_bits, 16 | 32 | 64) {
            return Err(ChannelError::InvalidLineWidth(line_width_bits));
        }
        if harmonic == 0 {
            return Err(ChannelError::InvalidHarmonic);
        }
        Ok(Self {
            clock_rate_mhz,
            line_width_bits,
            harmonic,
        })
    }
}

/// Peak transfer rate of a double-data-rate bus, in megabits/s:
/// clock rate x 2 transfers/cycle x line width / 8.
pub fn ddr_bandwidth_mbps(cfg: &DdrConfig) -> f64 {
    cfg.clock_rate_mhz * 2.0 * cfg.line_width_bits as f64 / 8.0
}

/// Carrier frequency the bus radiates at: the clock rate or one of its
/// harmonics. An overclocked module is modeled by configuring the target
/// clock rate directly.
pub fn ddr_emission_frequency_mhz(cfg: &DdrConfig) -> f64 {
    cfg.clock_rate_mhz * cfg.harmonic as f64
}

/// One regulated 2.4 GHz Wi-Fi channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WifiChannel {
    pub index: u8,
    pub center_mhz: f64,
    pub low_mhz: f64,
    pub high_mhz: f64,
    pub allowed_north_america: bool,
    pub allowed_japan: bool,
}

macro_rules! chan {
    ($idx:expr, $center:expr, $low:expr, $high:expr, $na:expr, $jp:expr) => {
        WifiChannel {
            index: $idx,
            center_mhz: $center,
            low_mhz: $low,
            high_mhz: $high,
            allowed_north_america: $na,
            allowed_japan: $jp,
        }
    };
}

/// The 14 channels of 802.11b/g/n. Channel 12 is narrowed to "not allowed"
/// for North America (it is Canada-only); channel 14 counts as allowed in
/// Japan (802.11b only).
pub static WIFI_CHANNELS: [WifiChannel; 14] = [
    chan!(1, 2412.0, 2401.0, 2423.0, true, true),
    chan!(2, 2417.0, 2406.0, 2428.0, true, true),
    chan!(3, 2422.0, 2411.0, 2433.0, true, true),
    chan!(4, 2427.0, 2416.0, 2438.0, true, true),
    chan!(5, 2432.0, 2421.0, 2443.0, true, true),
    chan!(6, 2437.0, 2426.0, 2448.0, true, true),
    chan!(7, 2442.0, 2431.0, 2453.0, true, true),
    chan!(8, 2447.0, 2436.0, 2458.0, true, true),
    chan!(9, 2452.0, 2441.0, 2463.0, true, true),
    chan!(10, 2457.0, 2446.0, 2468.0, true, true),
    chan!(11, 2462.0, 2451.0, 2473.0, true, true),
    chan!(12, 2467.0, 2456.0, 2478.0, false, true),
    chan!(13, 2472.0, 2461.0, 2483.0, false, true),
    chan!(14, 2484.0, 2473.0, 2495.0, false, true),
];

pub fn wifi_channel(index: u8) -> Result<&'static WifiChannel, ChannelError> {
    WIFI_CHANNELS
        .iter()
        .find(|c| c.index == index)
        .ok_or(ChannelError::UnknownChannel(index))
}

/// Result of an overlap query: channels whose regulated range the signal
/// band actually intersects, and channels within the wider interference
/// margin of the carrier.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelOverlap {
    pub strict: Vec<&'static WifiChannel>,
    pub margin: Vec<&'static WifiChannel>,
}

impl ChannelOverlap {
    pub fn strict_indices(&self) -> Vec<u8> {
        self.strict.iter().map(|c| c.index).collect()
    }

    pub fn margin_indices(&self) -> Vec<u8> {
        self.margin.iter().map(|c| c.index).collect()
    }
}

/// Which channels a narrowband emission at `carrier_mhz` touches.
///
/// `strict` intersects the signal band `[carrier - bw/2, carrier + bw/2]`
/// with each channel's tabulated range. `margin` lists channels whose
/// center lies within `INTERFERENCE_MARGIN_MHZ` of the carrier — the
/// carrier falls inside that channel's 20 MHz spectral span, so a scan of
/// the channel sees it. Carriers outside 2300-2600 MHz return empty sets.
pub fn overlapping_channels(carrier_mhz: f64, bandwidth_hz: f64) -> ChannelOverlap {
    if !(2300.0..=2600.0).contains(&carrier_mhz) {
        return ChannelOverlap {
            strict: Vec::new(),
            margin: Vec::new(),
        };
    }
    let half_bw_mhz = bandwidth_hz / 2.0 / 1e6;
    let lo = carrier_mhz - half_bw_mhz;
    let hi = carrier_mhz + half_bw_mhz;
    let strict = WIFI_CHANNELS
        .iter()
        .filter(|c| hi >= c.low_mhz && lo <= c.high_mhz)
        .collect();
    let margin = WIFI_CHANNELS
        .iter()
        .filter(|c| (carrier_mhz - c.center_mhz).abs() <= INTERFERENCE_MARGIN_MHZ)
        .collect();
    ChannelOverlap { strict, margin }
}

/// Synthetic channel parameters. `snr_db` may be `f64::INFINITY` to skip
/// the noise term entirely (oracle runs).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelModel {
    pub carrier_freq_mhz: f64,
    pub signal_bandwidth_hz: f64,
    pub snr_db: f64,
    pub jammer_snr_penalty_db: f64,
    pub noise_seed: u64,
}

impl ChannelModel {
    pub fn new(carrier_freq_mhz: f64, snr_db: f64, noise_seed: u64) -> Self {
        Self {
            carrier_freq_mhz,
            signal_bandwidth_hz: 1000.0,
            snr_db,
            jammer_snr_penalty_db: 0.0,
            noise_seed,
        }
    }

    /// SNR after any jammer penalty.
    pub fn effective_snr_db(&self) -> f64 {
        self.snr_db - self.jammer_snr_penalty_db
    }

    fn effective_snr_linear(&self) -> f64 {
        10f64.powf(self.effective_snr_db() / 10.0)
    }
}

/// SNR floors achieved by a software jammer saturating cores with random
/// workloads: 6 busy cores pull the channel down to 4.8 dB, 8 cores to
/// 3.1 dB. Fewer cores interpolate between unjammed and the 6-core floor;
/// 7 cores sit midway between the floors. Never raises SNR.
pub fn apply_jammer(ch: &ChannelModel, cores: u8) -> ChannelModel {
    const FLOOR_6_CORES_DB: f64 = 4.8;
    const FLOOR_8_CORES_DB: f64 = 3.1;
    let cores = cores.min(8);
    let snr = ch.snr_db;
    let clamp6 = snr.min(FLOOR_6_CORES_DB);
    let clamp8 = snr.min(FLOOR_8_CORES_DB);
    let target = match cores {
        0 => snr,
        c @ 1..=6 if snr.is_finite() => snr + (clamp6 - snr) * (c as f64 / 6.0),
        // An infinite-SNR channel has nothing to interpolate from; the
        // jammer only bites once it reaches its floor.
        1..=5 => snr,
        6 => clamp6,
        7 => (clamp6 + clamp8) / 2.0,
        _ => clamp8,
    };
    let mut out = *ch;
    if snr.is_finite() {
        out.jammer_snr_penalty_db = (snr - target).max(0.0);
    } else if target.is_finite() {
        // inf - inf is meaningless; degrade the model directly.
        out.snr_db = target;
        out.jammer_snr_penalty_db = 0.0;
    }
    out
}

/// Complex baseband samples as an SDR would deliver them.
#[derive(Debug, Clone, PartialEq)]
pub struct IqStream {
    pub sample_rate_hz: f64,
    pub center_freq_mhz: f64,
    pub samples: Vec<Complex64>,
}

/// Render the envelope as an IQ stream tuned to `center_freq_mhz`: an
/// envelope-gated unit tone at the carrier's offset from center, plus
/// circular white Gaussian noise scaled so the in-band SNR (within
/// `signal_bandwidth_hz`) equals the model's effective SNR. Deterministic
/// for a given seed.
pub fn synthesize_iq(
    timeline: &EmissionTimeline,
    ch: &ChannelModel,
    center_freq_mhz: f64,
    sample_rate_hz: f64,
    duration_s: f64,
) -> Result<IqStream, ChannelError> {
    if sample_rate_hz < 4.0 * ch.signal_bandwidth_hz {
        return Err(ChannelError::SampleRateTooLow {
            sample_rate_hz,
            bandwidth_hz: ch.signal_bandwidth_hz,
        });
    }
    let offset_hz = (ch.carrier_freq_mhz - center_freq_mhz) * 1e6;
    if offset_hz.abs() > sample_rate_hz / 2.0 {
        return Err(ChannelError::OffsetBeyondNyquist {
            offset_hz,
            sample_rate_hz,
        });
    }

    let n = (duration_s * sample_rate_hz).round() as usize;
    let snr = ch.effective_snr_linear();
    // Tone power is 1; total noise power sigma^2 spreads over the full
    // sampling bandwidth, so in-band noise is sigma^2 * bw / fs.
    let noise_sigma = if snr.is_finite() {
        (sample_rate_hz / (ch.signal_bandwidth_hz * snr)).sqrt()
    } else {
        0.0
    };
    let per_component = noise_sigma / std::f64::consts::SQRT_2;

    let mut rng = ChaCha8Rng::seed_from_u64(ch.noise_seed);
    let same_rate = timeline.sample_rate_hz == sample_rate_hz;
    let phase_step = std::f64::consts::TAU * offset_hz / sample_rate_hz;
    let mut phase = 0.0f64;
    let mut samples = Vec::with_capacity(n);
    for i in 0..n {
        let env_idx = if same_rate {
            i
        } else {
            (i as f64 * timeline.sample_rate_hz / sample_rate_hz).floor() as usize
        };
        let env = timeline.envelope.get(env_idx).copied().unwrap_or(0.0);
        let tone = Complex64::new(phase.cos(), phase.sin()) * env;
        phase = (phase + phase_step).rem_euclid(std::f64::consts::TAU);
        let sample = if noise_sigma > 0.0 {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            tone + Complex64::new(re, im) * per_component
        } else {
            tone
        };
        samples.push(sample);
    }
    Ok(IqStream {
        sample_rate_hz,
        center_freq_mhz,
        samples,
    })
}

/// One 56-bin spectral-scan record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FftFrame {
    pub timestamp_ns: u64,
    pub channel_index: u8,
    pub bins: Vec<f64>,
    pub max_bin_index: u8,
    pub max_magnitude: f64,
}

impl FftFrame {
    fn from_bins(timestamp_ns: u64, channel_index: u8, bins: Vec<f64>) -> Self {
        debug_assert_eq!(bins.len(), SPECTRAL_BINS);
        let (max_bin_index, max_magnitude) = bins
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, &m)| (i as u8, m))
            .unwrap_or((0, 0.0));
        Self {
            timestamp_ns,
            channel_index,
            bins,
            max_bin_index,
            max_magnitude,
        }
    }
}

/// Receiver sampling mode of the spectral-scan hardware.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RxMode {
    /// Round-robin over a channel set; slow aggregate frame rate.
    Scanning,
    /// Continuous sampling of one channel; much faster.
    Triggering,
}

/// Frame-rate calibration constants per mode. The scanning rate is the
/// aggregate across the scanned set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameCadence {
    pub scanning_fps: f64,
    pub triggering_fps: f64,
}

impl Default for FrameCadence {
    fn default() -> Self {
        Self {
            scanning_fps: 20.0,
            triggering_fps: 400.0,
        }
    }
}

/// Bin index a carrier falls into within a channel's 20 MHz span, if any.
pub fn carrier_bin(channel: &WifiChannel, carrier_mhz: f64) -> Option<usize> {
    let span_low = channel.center_mhz - CHANNEL_SPAN_MHZ / 2.0;
    let rel = carrier_mhz - span_low;
    if !(0.0..CHANNEL_SPAN_MHZ).contains(&rel) {
        return None;
    }
    Some(((rel / CHANNEL_SPAN_MHZ * SPECTRAL_BINS as f64) as usize).min(SPECTRAL_BINS - 1))
}

/// Generate spectral-scan frames for the emission.
///
/// Frames cover the timeline's duration at the mode's cadence. Every bin
/// carries a noise magnitude; while the envelope is ON, the bin containing
/// the carrier (if the carrier sits inside the sampled channel's span)
/// gains a unit signal magnitude, with the noise floor scaled so the
/// carrier-bin-to-median-bin power ratio matches the effective SNR. A
/// carrier outside every requested channel yields pure-noise frames.
pub fn synthesize_fft_frames(
    timeline: &EmissionTimeline,
    ch: &ChannelModel,
    mode: RxMode,
    channels: &[u8],
    cadence: &FrameCadence,
) -> Result<Vec<FftFrame>, ChannelError> {
    if channels.is_empty() {
        return Err(ChannelError::EmptyChannelSet);
    }
    if mode == RxMode::Triggering && channels.len() != 1 {
        return Err(ChannelError::TriggeringChannelCount(channels.len()));
    }
    let resolved: Vec<&WifiChannel> = channels
        .iter()
        .map(|&i| wifi_channel(i))
        .collect::<Result<_, _>>()?;

    let fps = match mode {
        RxMode::Scanning => cadence.scanning_fps,
        RxMode::Triggering => cadence.triggering_fps,
    };
    let interval_ns = (1e9 / fps).round() as u64;
    let duration_ns = timeline.duration_ns();

    let snr = ch.effective_snr_linear();
    const SIGNAL_MAG: f64 = 1.0;
    // Noise scale such that median bin magnitude = SIGNAL_MAG * 10^(-snr/10).
    let noise_scale = if snr.is_finite() {
        SIGNAL_MAG / (NOISE_MAG_MEDIAN * snr)
    } else {
        0.0
    };

    // Decorrelate from the IQ noise stream deterministically.
    let mut rng = ChaCha8Rng::seed_from_u64(ch.noise_seed ^ 0x5f3e_7a91_c2d4_b806);
    let mut frames = Vec::new();
    let mut k = 0u64;
    loop {
        let t_ns = k * interval_ns;
        if t_ns >= duration_ns {
            break;
        }
        let channel = resolved[(k as usize) % resolved.len()];
        let mut bins = Vec::with_capacity(SPECTRAL_BINS);
        for _ in 0..SPECTRAL_BINS {
            let g1: f64 = rng.sample(StandardNormal);
            let g2: f64 = rng.sample(StandardNormal);
            bins.push((g1.abs() + g2.abs()) * noise_scale);
        }
        if timeline.value_at_ns(t_ns) > 0.5 {
            if let Some(bin) = carrier_bin(channel, ch.carrier_freq_mhz) {
                bins[bin] += SIGNAL_MAG;
            }
        }
        frames.push(FftFrame::from_bins(t_ns, channel.index, bins));
        k += 1;
    }
    Ok(frames)
}
