//! Software modem and channel-simulation toolkit for the memory-bus
//! covert channel: on-off keyed signals generated by DDR bus activity,
//! received either as SDR IQ captures or as 56-bin spectral-scan frames
//! from a Wi-Fi chipset, with a BER/SNR evaluation harness on top.
//!
//! The crate is organized along the signal path:
//!
//! - [`codec`]: 48-bit frames (preamble, 32-bit payload, CRC-8)
//! - [`tx`]: bit schedules, the ideal emission envelope, and the real
//!   multi-worker memory-stress transmitter
//! - [`channel`]: carrier placement, Wi-Fi channel table, and the noisy
//!   synthetic channel in IQ and spectral-frame forms
//! - [`rx`]: scanning/triggering receiver state machine
//! - [`demod`]: Welch power estimation, enable-sequence detection,
//!   bit slicing and packet recovery
//! - [`harness`]: BER sweeps, mode comparison, report output
//! - [`files`]: IQ, spectral-frame and activity-log file formats

pub mod channel;
pub mod codec;
pub mod demod;
pub mod files;
pub mod harness;
pub mod rx;
pub mod tx;

pub use channel::{
    apply_jammer, carrier_bin, ddr_bandwidth_mbps, ddr_emission_frequency_mhz,
    overlapping_channels, synthesize_fft_frames, synthesize_iq, ChannelError, ChannelModel,
    ChannelOverlap, DdrConfig, FftFrame, FrameCadence, IqStream, RxMode, WifiChannel,
    WIFI_CHANNELS,
};
pub use codec::{
    crc8, decode_frame, encode_packet, segment_message, DecodeError, Frame, Packet, FRAME_BITS,
};
pub use demod::{
    demodulate_series, detect_enable, fft_bin_series, power_series, recover_packets, slice_bits,
    welch_psd, DemodConfig, DemodError, DemodOutput, EnableDetection, SamplePoint, SampleSeries,
    SlicedBits,
};
pub use harness::{
    compare_modes, emit_report, run_ber_point, run_ber_sweep, BerReport, ExperimentConfig,
    HarnessError, ModeComparison, ReceiverPath, ReportFormat,
};
pub use rx::{
    scan_for_activity, step_state, ChannelScores, Receiver, ReceiverMode, ReceiverState, RxConfig,
    RxInput, WindowScores,
};
pub use tx::{
    bit_rate_to_bit_time_ms, build_schedule, measure_duty_cycle, run_stress_transmitter,
    simulate_emission, ActivityLog, BitSchedule, BusState, EmissionTimeline, Transition, TxError,
};
