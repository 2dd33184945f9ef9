//! `ramwave`: drive the modem and channel simulator from the shell.
//!
//! Subcommands mirror the library's surface: `tx-sim` renders a message
//! into IQ or spectral-frame captures, `tx-stress` runs the real
//! memory-stress transmitter, `rx` demodulates a capture file, `sweep`
//! runs BER-vs-SNR experiments, `modes` compares the two spectral
//! reception modes, and `channels` answers carrier placement queries.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use ramwave::channel::{
    ddr_bandwidth_mbps, ddr_emission_frequency_mhz, overlapping_channels, synthesize_fft_frames,
    synthesize_iq, wifi_channel, ChannelModel, DdrConfig, FrameCadence, RxMode, WIFI_CHANNELS,
};
use ramwave::codec::segment_message;
use ramwave::demod::{
    demodulate_series, fft_bin_series, power_series, DemodConfig, DEFAULT_CORR_THRESH,
};
use ramwave::files;
use ramwave::harness::{
    best_channel_for_carrier, compare_modes, emit_report, render_csv, render_json, run_ber_sweep,
    ExperimentConfig, ReceiverPath, ReportFormat,
};
use ramwave::tx::{
    bit_rate_to_bit_time_ms, build_schedule, run_stress_transmitter, simulate_emission,
};

#[derive(Parser)]
#[command(name = "ramwave", version, about = "Memory-bus OOK modem and channel simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Encode a message and render the transmission through the simulated
    /// channel into an IQ capture or a spectral-frame file.
    TxSim(TxSimArgs),
    /// Encode a message and transmit it for real by modulating memory-bus
    /// activity; writes the measured ON/OFF activity log.
    TxStress(TxStressArgs),
    /// Demodulate a capture file and print recovered payloads.
    Rx(RxArgs),
    /// Run a BER-vs-SNR sweep and write a report.
    Sweep(SweepArgs),
    /// Compare scanning and triggering reception modes.
    Modes(ModesArgs),
    /// Show which Wi-Fi channels a carrier interferes with.
    Channels(ChannelsArgs),
}

#[derive(Args)]
struct MessageArgs {
    /// Message text to transmit.
    #[arg(long, conflicts_with = "hex")]
    message: Option<String>,
    /// Message bytes as hex (for binary payloads).
    #[arg(long)]
    hex: Option<String>,
}

impl MessageArgs {
    fn bytes(&self) -> Result<Vec<u8>> {
        match (&self.message, &self.hex) {
            (Some(text), None) => Ok(text.as_bytes().to_vec()),
            (None, Some(hex)) => decode_hex(hex),
            (None, None) => bail!("no payload: pass --message or --hex"),
            (Some(_), Some(_)) => unreachable!("clap enforces exclusivity"),
        }
    }
}

fn decode_hex(s: &str) -> Result<Vec<u8>> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if s.len() % 2 != 0 {
        bail!("hex payload has odd length");
    }
    (0..s.len())
        .step_by(2)
        .map(|i| u8::from_str_radix(&s[i..i + 2], 16).context("invalid hex payload"))
        .collect()
}

fn parse_snr(s: &str) -> Result<f64, String> {
    f64::from_str(s).map_err(|e| format!("bad SNR '{s}': {e} (use a number in dB, or 'inf')"))
}

fn parse_path(s: &str) -> Result<ReceiverPath, String> {
    s.parse()
}

#[derive(Args)]
struct TxSimArgs {
    #[command(flatten)]
    payload: MessageArgs,
    /// Bits per second (1, 10, 16 and 100 are the usual presets).
    #[arg(long, default_value_t = 100.0)]
    bit_rate: f64,
    /// Idle bits between consecutive frames.
    #[arg(long, default_value_t = 8)]
    gap_bits: usize,
    /// Channel SNR in dB; 'inf' disables noise.
    #[arg(long, value_parser = parse_snr, default_value = "inf")]
    snr: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Emission carrier frequency.
    #[arg(long, default_value_t = 2424.0)]
    carrier_mhz: f64,
    /// Receiver form to render: iq, fft_scanning or fft_triggering.
    #[arg(long, default_value = "iq", value_parser = parse_path)]
    path: ReceiverPath,
    /// IQ sample rate (iq path only).
    #[arg(long, default_value_t = 32_000.0)]
    sample_rate_hz: f64,
    /// Channels to scan (fft paths); defaults to the carrier's channel.
    #[arg(long, value_delimiter = ',')]
    channels: Vec<u8>,
    /// Output file: raw cf32 samples (+ .json sidecar) or JSON-lines frames.
    #[arg(long)]
    out: PathBuf,
}

fn cmd_tx_sim(args: TxSimArgs) -> Result<()> {
    let packets = segment_message(&args.payload.bytes()?);
    if packets.is_empty() {
        bail!("empty payload");
    }
    let frames: Vec<_> = packets
        .iter()
        .map(|&p| ramwave::codec::encode_packet(p))
        .collect();
    let bit_time_ms = bit_rate_to_bit_time_ms(args.bit_rate);
    let schedule = build_schedule(&frames, bit_time_ms, args.gap_bits)?;
    let model = ChannelModel::new(args.carrier_mhz, args.snr, args.seed);

    match args.path {
        ReceiverPath::Iq => {
            let timeline = simulate_emission(&schedule, args.sample_rate_hz)?;
            let stream = synthesize_iq(
                &timeline,
                &model,
                args.carrier_mhz,
                args.sample_rate_hz,
                schedule.duration_s(),
            )?;
            files::write_iq(&args.out, &stream)?;
            eprintln!(
                "wrote {} IQ samples at {} Hz to {} (+ sidecar)",
                stream.samples.len(),
                stream.sample_rate_hz,
                args.out.display()
            );
        }
        ReceiverPath::FftScanning | ReceiverPath::FftTriggering => {
            let mode = if args.path == ReceiverPath::FftScanning {
                RxMode::Scanning
            } else {
                RxMode::Triggering
            };
            let channels = if args.channels.is_empty() {
                vec![best_channel_for_carrier(args.carrier_mhz)?.index]
            } else {
                args.channels.clone()
            };
            // Envelope rate only gates bit-boundary resolution here.
            let env_rate = (4000.0 / bit_time_ms).max(200.0);
            let timeline = simulate_emission(&schedule, env_rate)?;
            let frames =
                synthesize_fft_frames(&timeline, &model, mode, &channels, &FrameCadence::default())?;
            files::write_fft_frames(&args.out, &frames)?;
            eprintln!(
                "wrote {} spectral frames to {}",
                frames.len(),
                args.out.display()
            );
        }
    }
    Ok(())
}

#[derive(Args)]
struct TxStressArgs {
    #[command(flatten)]
    payload: MessageArgs,
    #[arg(long, default_value_t = 10.0)]
    bit_rate: f64,
    #[arg(long, default_value_t = 8)]
    gap_bits: usize,
    /// Memory-stress worker threads.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Activity log destination (JSON lines).
    #[arg(long)]
    out: PathBuf,
}

fn cmd_tx_stress(args: TxStressArgs) -> Result<()> {
    let packets = segment_message(&args.payload.bytes()?);
    if packets.is_empty() {
        bail!("empty payload");
    }
    let frames: Vec<_> = packets
        .iter()
        .map(|&p| ramwave::codec::encode_packet(p))
        .collect();
    let schedule = build_schedule(&frames, bit_rate_to_bit_time_ms(args.bit_rate), args.gap_bits)?;
    eprintln!(
        "transmitting {} bits at {} bit/s with {} worker(s) (~{:.1}s)",
        schedule.bits.len(),
        args.bit_rate,
        args.workers,
        schedule.duration_s()
    );
    let log = run_stress_transmitter(&schedule, args.workers)?;
    files::write_activity_log(&args.out, &log)?;
    eprintln!(
        "wrote {} transitions to {} (affinity={}, {} timing violations)",
        log.transitions.len(),
        args.out.display(),
        log.affinity_applied,
        log.timing_violations.len()
    );
    Ok(())
}

#[derive(Args)]
struct RxArgs {
    /// Capture to demodulate: IQ file with a .json sidecar, or a
    /// JSON-lines spectral-frame file (.jsonl).
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 100.0)]
    bit_rate: f64,
    #[arg(long, default_value_t = DEFAULT_CORR_THRESH)]
    corr_thresh: f64,
    /// Spectral bin to track (frame input only); defaults to the busiest bin.
    #[arg(long)]
    bin: Option<usize>,
    /// Write the machine-readable result here as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Known transmitted message (hex) for BER accounting.
    #[arg(long)]
    truth_hex: Option<String>,
    /// Gap bits used by the transmitter (for --truth-hex alignment).
    #[arg(long, default_value_t = 8)]
    gap_bits: usize,
}

#[derive(Serialize)]
struct RxResult {
    bits: String,
    packets: Vec<String>,
    errors: Vec<String>,
    ber_if_known: Option<f64>,
}

fn is_frame_file(path: &Path) -> bool {
    matches!(
        path.extension().and_then(|e| e.to_str()),
        Some("jsonl") | Some("ndjson")
    )
}

fn cmd_rx(args: RxArgs) -> Result<()> {
    let bit_time_ms = bit_rate_to_bit_time_ms(args.bit_rate);
    let series = if is_frame_file(&args.input) {
        let frames = files::read_fft_frames(&args.input)?;
        if frames.is_empty() {
            bail!("{}: no frames", args.input.display());
        }
        let bin = match args.bin {
            Some(b) => b,
            None => busiest_bin(&frames),
        };
        eprintln!("tracking bin {bin}");
        fft_bin_series(&frames, bin)?
    } else {
        let stream = files::read_iq(&args.input)?;
        let cfg = DemodConfig::for_stream(stream.sample_rate_hz, bit_time_ms)?;
        power_series(&stream, &cfg)
    };

    let out = demodulate_series(&series, bit_time_ms, args.corr_thresh);
    if out.detection.is_none() {
        eprintln!("no enable sequence detected");
    }
    for p in &out.packets {
        println!("{:08x}", p.payload);
    }

    let ber_if_known = match &args.truth_hex {
        Some(hex) => {
            let truth_schedule = build_schedule(
                &segment_message(&decode_hex(hex)?)
                    .iter()
                    .map(|&p| ramwave::codec::encode_packet(p))
                    .collect::<Vec<_>>(),
                bit_time_ms,
                args.gap_bits,
            )?;
            let n = truth_schedule.bits.len().min(out.bits.len());
            if n == 0 {
                None
            } else {
                let errors = out.bits[..n]
                    .iter()
                    .zip(&truth_schedule.bits[..n])
                    .filter(|(a, b)| a != b)
                    .count();
                Some(errors as f64 / n as f64)
            }
        }
        None => None,
    };
    if let Some(ber) = ber_if_known {
        eprintln!("ber vs truth: {ber}");
    }

    if let Some(json_path) = &args.json {
        let result = RxResult {
            bits: out.bits.iter().map(|b| char::from(b'0' + b)).collect(),
            packets: out.packets.iter().map(|p| format!("{:08x}", p.payload)).collect(),
            errors: out.errors.iter().map(|e| e.to_string()).collect(),
            ber_if_known,
        };
        std::fs::write(json_path, serde_json::to_string_pretty(&result)?)
            .with_context(|| format!("cannot write {}", json_path.display()))?;
    }
    Ok(())
}

fn busiest_bin(frames: &[ramwave::channel::FftFrame]) -> usize {
    let mut counts = [0usize; ramwave::channel::SPECTRAL_BINS];
    for f in frames {
        counts[f.max_bin_index as usize] += 1;
    }
    counts
        .iter()
        .enumerate()
        .max_by_key(|(_, &c)| c)
        .map(|(i, _)| i)
        .unwrap_or(0)
}

#[derive(Args)]
struct SweepArgs {
    /// Comma-separated SNR points in dB ('inf' allowed).
    #[arg(long, value_parser = parse_snr, value_delimiter = ',')]
    snr: Vec<f64>,
    #[arg(long)]
    bit_rate: Option<f64>,
    #[arg(long, value_parser = parse_path)]
    path: Option<ReceiverPath>,
    #[arg(long)]
    packets: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    jammer_cores: Option<u8>,
    #[arg(long)]
    carrier_mhz: Option<f64>,
    /// JSON experiment config; explicit flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Report destination; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: String,
}

fn sweep_config(args: &SweepArgs) -> Result<ExperimentConfig> {
    let mut cfg = match &args.config {
        Some(path) => {
            let body = std::fs::read_to_string(path)
                .with_context(|| format!("cannot read config {}", path.display()))?;
            serde_json::from_str(&body)
                .with_context(|| format!("invalid config {}", path.display()))?
        }
        None => ExperimentConfig::default(),
    };
    if !args.snr.is_empty() {
        cfg.snr_points_db = args.snr.clone();
    }
    if let Some(v) = args.bit_rate {
        cfg.bit_rate_bps = v;
    }
    if let Some(v) = args.path {
        cfg.receiver_path = v;
    }
    if let Some(v) = args.packets {
        cfg.packets_per_point = v;
    }
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    if let Some(v) = args.jammer_cores {
        cfg.jammer_cores = v;
    }
    if let Some(v) = args.carrier_mhz {
        cfg.carrier_freq_mhz = v;
    }
    Ok(cfg)
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    let cfg = sweep_config(&args)?;
    let format = ReportFormat::from_str(&args.format).map_err(anyhow::Error::msg)?;
    let reports = run_ber_sweep(&cfg)?;
    match &args.out {
        Some(path) => {
            emit_report(&reports, format, path)?;
            eprintln!("wrote {} rows to {}", reports.len(), path.display());
        }
        None => {
            let body = match format {
                ReportFormat::Csv => render_csv(&reports),
                ReportFormat::Json => render_json(&reports),
            };
            print!("{body}");
        }
    }
    Ok(())
}

#[derive(Args)]
struct ModesArgs {
    #[arg(long, value_parser = parse_snr, default_value = "12")]
    snr: f64,
    #[arg(long, default_value_t = 10.0)]
    bit_rate: f64,
    #[arg(long, default_value_t = 25)]
    packets: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 2424.0)]
    carrier_mhz: f64,
    /// Simulated observation length for frame throughput.
    #[arg(long, default_value_t = 5.0)]
    duration_s: f64,
    /// Write the comparison as JSON here.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn cmd_modes(args: ModesArgs) -> Result<()> {
    let cfg = ExperimentConfig {
        snr_points_db: vec![args.snr],
        bit_rate_bps: args.bit_rate,
        receiver_path: ReceiverPath::FftTriggering,
        packets_per_point: args.packets,
        seed: args.seed,
        carrier_freq_mhz: args.carrier_mhz,
        ..ExperimentConfig::default()
    };
    let cmp = compare_modes(&cfg, args.duration_s)?;
    println!(
        "mode        frames/s  max bit/s  tested bit/s  ber",
    );
    for row in [&cmp.scanning, &cmp.triggering] {
        println!(
            "{:<11} {:>8.1} {:>10.1} {:>13.1}  {:.4}",
            format!("{:?}", row.mode).to_lowercase(),
            row.frames_per_s,
            row.max_bit_rate_bps,
            row.bit_rate_bps,
            row.ber
        );
    }
    println!(
        "triggering/scanning frame ratio: {:.1}",
        cmp.triggering.frames_per_s / cmp.scanning.frames_per_s
    );
    if let Some(path) = &args.out {
        std::fs::write(path, serde_json::to_string_pretty(&cmp)?)
            .with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(())
}

#[derive(Args)]
struct ChannelsArgs {
    /// Carrier frequency to query.
    #[arg(long)]
    carrier_mhz: Option<f64>,
    #[arg(long, default_value_t = 1000.0)]
    bandwidth_hz: f64,
    /// Derive the carrier from a memory configuration instead.
    #[arg(long)]
    ddr_clock_mhz: Option<f64>,
    #[arg(long, default_value_t = 64)]
    ddr_line_bits: u32,
    #[arg(long, default_value_t = 1)]
    ddr_harmonic: u32,
    /// Print the full channel table.
    #[arg(long)]
    table: bool,
}

fn cmd_channels(args: ChannelsArgs) -> Result<()> {
    if args.table {
        println!("ch  center  range           na     japan");
        for c in &WIFI_CHANNELS {
            println!(
                "{:<3} {:<7} {:>6.0}-{:<7.0} {:<6} {}",
                c.index, c.center_mhz, c.low_mhz, c.high_mhz, c.allowed_north_america, c.allowed_japan
            );
        }
    }
    let carrier = match (args.carrier_mhz, args.ddr_clock_mhz) {
        (Some(c), _) => c,
        (None, Some(clock)) => {
            let cfg = DdrConfig::new(clock, args.ddr_line_bits, args.ddr_harmonic)?;
            let carrier = ddr_emission_frequency_mhz(&cfg);
            println!(
                "ddr: {} MHz clock x{} harmonic -> {} MHz carrier, {} megabit/s bus",
                clock,
                cfg.harmonic,
                carrier,
                ddr_bandwidth_mbps(&cfg)
            );
            carrier
        }
        (None, None) => {
            if args.table {
                return Ok(());
            }
            bail!("pass --carrier-mhz or --ddr-clock-mhz (or --table)");
        }
    };
    let overlap = overlapping_channels(carrier, args.bandwidth_hz);
    println!(
        "carrier {} MHz (bw {} Hz): overlaps {:?}, interference margin {:?}",
        carrier,
        args.bandwidth_hz,
        overlap.strict_indices(),
        overlap.margin_indices()
    );
    for idx in overlap.margin_indices() {
        let c = wifi_channel(idx)?;
        if let Some(bin) = ramwave::channel::carrier_bin(c, carrier) {
            println!("  channel {}: carrier lands in spectral bin {}", idx, bin);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::TxSim(args) => cmd_tx_sim(args),
        Command::TxStress(args) => cmd_tx_stress(args),
        Command::Rx(args) => cmd_rx(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Modes(args) => cmd_modes(args),
        Command::Channels(args) => cmd_channels(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
