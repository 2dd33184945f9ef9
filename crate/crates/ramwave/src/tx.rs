//! Transmit side: turn frame bits into an on-off keyed emission.
//!
//! Two backends share one schedule type. [`simulate_emission`] produces an
//! ideal rectangular amplitude envelope for the simulated channel, and
//! [`run_stress_transmitter`] drives a real multi-worker memory-copy
//! workload whose bus activity follows the same schedule, logging the
//! ON/OFF transitions it actually achieved.

use std::sync::{Arc, Barrier, OnceLock};
use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codec::Frame;

/// Per-worker scratch buffer size for the ON-state copy loop.
pub const STRESS_BUFFER_BYTES: usize = 1 << 20;

/// Tail of each bit slot that is spin-waited instead of slept, for
/// boundary precision. Sized to absorb typical sleep overshoot.
const SPIN_TAIL: Duration = Duration::from_millis(3);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TxError {
    #[error("sample rate {sample_rate_hz} Hz yields fewer than 2 samples per {bit_time_ms} ms bit")]
    UndersampledRate {
        sample_rate_hz: f64,
        bit_time_ms: f64,
    },
    #[error("bit time must be positive, got {0} ms")]
    NonPositiveBitTime(f64),
    #[error("at least one worker required")]
    NoWorkers,
}

/// The per-bit on/off plan: which symbol occupies each bit slot and how
/// long a slot lasts.
#[derive(Debug, Clone, PartialEq)]
pub struct BitSchedule {
    pub bits: Vec<u8>,
    pub bit_time_ms: f64,
}

impl BitSchedule {
    pub fn new(bits: Vec<u8>, bit_time_ms: f64) -> Result<Self, TxError> {
        if bit_time_ms <= 0.0 {
            return Err(TxError::NonPositiveBitTime(bit_time_ms));
        }
        Ok(Self { bits, bit_time_ms })
    }

    pub fn bit_time_ns(&self) -> u64 {
        (self.bit_time_ms * 1e6).round() as u64
    }

    pub fn duration_s(&self) -> f64 {
        self.bits.len() as f64 * self.bit_time_ms / 1000.0
    }
}

/// Convert a bit rate in bits/second to the bit slot duration in ms.
pub fn bit_rate_to_bit_time_ms(bit_rate_bps: f64) -> f64 {
    1000.0 / bit_rate_bps
}

/// Concatenate frame bits, separating consecutive frames with
/// `inter_frame_gap_bits` zero (idle) bits.
pub fn build_schedule(
    frames: &[Frame],
    bit_time_ms: f64,
    inter_frame_gap_bits: usize,
) -> Result<BitSchedule, TxError> {
    let mut bits = Vec::new();
    for (i, frame) in frames.iter().enumerate() {
        if i > 0 {
            bits.extend(std::iter::repeat(0u8).take(inter_frame_gap_bits));
        }
        bits.extend_from_slice(frame.bits());
    }
    BitSchedule::new(bits, bit_time_ms)
}

/// Rectangular OOK amplitude envelope sampled at a fixed rate.
#[derive(Debug, Clone, PartialEq)]
pub struct EmissionTimeline {
    pub sample_rate_hz: f64,
    pub envelope: Vec<f64>,
}

impl EmissionTimeline {
    pub fn duration_s(&self) -> f64 {
        self.envelope.len() as f64 / self.sample_rate_hz
    }

    pub fn duration_ns(&self) -> u64 {
        (self.envelope.len() as f64 * 1e9 / self.sample_rate_hz).round() as u64
    }

    /// Envelope value at an absolute time; 0 beyond the end.
    pub fn value_at_ns(&self, t_ns: u64) -> f64 {
        let idx = (t_ns as f64 * self.sample_rate_hz / 1e9).floor() as usize;
        self.envelope.get(idx).copied().unwrap_or(0.0)
    }
}

/// Render the schedule as an ideal envelope: 1 during '1' bits, 0 during
/// '0' bits. Bit boundaries land on the nearest sample so no drift
/// accumulates over long schedules.
pub fn simulate_emission(
    schedule: &BitSchedule,
    sample_rate_hz: f64,
) -> Result<EmissionTimeline, TxError> {
    let bit_time_s = schedule.bit_time_ms / 1000.0;
    if sample_rate_hz * bit_time_s < 2.0 {
        return Err(TxError::UndersampledRate {
            sample_rate_hz,
            bit_time_ms: schedule.bit_time_ms,
        });
    }
    let mut envelope = Vec::new();
    for (k, &bit) in schedule.bits.iter().enumerate() {
        let start = (k as f64 * bit_time_s * sample_rate_hz).round() as usize;
        let end = ((k + 1) as f64 * bit_time_s * sample_rate_hz).round() as usize;
        envelope.resize(start, 0.0);
        envelope.extend(std::iter::repeat(if bit != 0 { 1.0 } else { 0.0 }).take(end - start));
    }
    Ok(EmissionTimeline {
        sample_rate_hz,
        envelope,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum BusState {
    On,
    Off,
}

/// One observed state change of the stress workload.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transition {
    pub t_ns: u64,
    pub state: BusState,
}

/// Self-measurement of one stress transmission: the ON/OFF transitions the
/// governor observed, plus timing diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct ActivityLog {
    pub transitions: Vec<Transition>,
    pub worker_count: usize,
    pub duration_ns: u64,
    /// Bit indices whose boundary missed the deadline by more than 10% of
    /// the bit time. Recorded, never aborted on.
    pub timing_violations: Vec<usize>,
    /// Whether every worker was successfully pinned to a core.
    pub affinity_applied: bool,
}

#[cfg(target_os = "linux")]
fn pin_to_core(core: usize) -> bool {
    unsafe {
        let mut set: libc::cpu_set_t = std::mem::zeroed();
        libc::CPU_SET(core % libc::CPU_SETSIZE as usize, &mut set);
        libc::sched_setaffinity(0, std::mem::size_of::<libc::cpu_set_t>(), &set) == 0
    }
}

#[cfg(not(target_os = "linux"))]
fn pin_to_core(_core: usize) -> bool {
    false
}

fn wait_until(deadline: Instant) {
    loop {
        let now = Instant::now();
        if now >= deadline {
            return;
        }
        let remaining = deadline - now;
        if remaining > SPIN_TAIL {
            thread::sleep(remaining - SPIN_TAIL);
        } else {
            std::hint::spin_loop();
        }
    }
}

/// Drive the memory-stress workload through the schedule.
///
/// Every worker owns two 1 MB scratch buffers. During a '1' bit all workers
/// copy buffer A into B and B back into A until the bit deadline; during a
/// '0' bit they sleep to the deadline. Deadlines are absolute and
/// accumulated (`bit_end += bit_time`), so a late bit does not shift later
/// ones. Workers rendezvous with the governor at a barrier on every bit
/// boundary; the governor records the transitions it observes.
pub fn run_stress_transmitter(
    schedule: &BitSchedule,
    workers: usize,
) -> Result<ActivityLog, TxError> {
    if workers == 0 {
        return Err(TxError::NoWorkers);
    }
    if schedule.bits.is_empty() {
        return Ok(ActivityLog {
            transitions: Vec::new(),
            worker_count: workers,
            duration_ns: 0,
            timing_violations: Vec::new(),
            affinity_applied: false,
        });
    }

    let bits = Arc::new(schedule.bits.clone());
    let bit_time = Duration::from_nanos(schedule.bit_time_ns());
    // Workers + governor all meet here at every bit boundary.
    let barrier = Arc::new(Barrier::new(workers + 1));
    let start: Arc<OnceLock<Instant>> = Arc::new(OnceLock::new());

    let handles: Vec<_> = (0..workers)
        .map(|worker_id| {
            let bits = Arc::clone(&bits);
            let barrier = Arc::clone(&barrier);
            let start = Arc::clone(&start);
            thread::spawn(move || {
                let pinned = pin_to_core(worker_id);
                let mut buf_a = vec![worker_id as u8; STRESS_BUFFER_BYTES];
                let mut buf_b = vec![0u8; STRESS_BUFFER_BYTES];
                barrier.wait();
                let t0 = *start.get().expect("governor sets start before release");
                let mut deadline = t0;
                for (k, &bit) in bits.iter().enumerate() {
                    deadline += bit_time;
                    barrier.wait();
                    if bit != 0 {
                        // Finish the in-flight copy pair, then stop; 1 MB of
                        // copy bounds the overrun to well under a millisecond.
                        while Instant::now() < deadline {
                            buf_b.copy_from_slice(&buf_a);
                            buf_a.copy_from_slice(&buf_b);
                        }
                    } else {
                        wait_until(deadline);
                    }
                    let _ = k;
                }
                barrier.wait();
                std::hint::black_box(&buf_a);
                pinned
            })
        })
        .collect();

    // Governor: owns the schedule clock and the log.
    let mut transitions = Vec::new();
    let mut violations = Vec::new();
    let t0 = Instant::now();
    start.set(t0).expect("start set once");
    barrier.wait();
    let mut state = BusState::Off;
    let mut deadline = t0;
    let violation_budget = bit_time.as_nanos() as u64 / 10;
    for (k, &bit) in bits.iter().enumerate() {
        barrier.wait();
        let boundary_ns = t0.elapsed().as_nanos() as u64;
        let ideal_ns = k as u64 * bit_time.as_nanos() as u64;
        if boundary_ns.abs_diff(ideal_ns) > violation_budget {
            violations.push(k);
        }
        let next = if bit != 0 { BusState::On } else { BusState::Off };
        if next != state || (k == 0 && next == BusState::On) {
            transitions.push(Transition {
                t_ns: boundary_ns,
                state: next,
            });
            state = next;
        }
        deadline += bit_time;
        wait_until(deadline);
    }
    barrier.wait();
    let end_ns = t0.elapsed().as_nanos() as u64;
    if state == BusState::On {
        transitions.push(Transition {
            t_ns: end_ns,
            state: BusState::Off,
        });
    }

    let affinity_applied = handles
        .into_iter()
        .map(|h| h.join().expect("worker panicked"))
        .all(|pinned| pinned);

    Ok(ActivityLog {
        transitions,
        worker_count: workers,
        duration_ns: end_ns,
        timing_violations: violations,
        affinity_applied,
    })
}

/// Recover the bit sequence a log encodes: a slot is 1 when the bus was ON
/// for more than half of it.
pub fn measure_duty_cycle(log: &ActivityLog, bit_time_ms: f64, n_bits: usize) -> Vec<u8> {
    let bit_time_ns = (bit_time_ms * 1e6).round() as u64;
    // Rebuild ON intervals from the alternating transition list.
    let mut on_intervals: Vec<(u64, u64)> = Vec::new();
    let mut on_since: Option<u64> = None;
    for t in &log.transitions {
        match (t.state, on_since) {
            (BusState::On, None) => on_since = Some(t.t_ns),
            (BusState::Off, Some(start)) => {
                on_intervals.push((start, t.t_ns));
                on_since = None;
            }
            _ => {}
        }
    }
    if let Some(start) = on_since {
        on_intervals.push((start, log.duration_ns.max(start)));
    }

    (0..n_bits)
        .map(|k| {
            let slot_start = k as u64 * bit_time_ns;
            let slot_end = slot_start + bit_time_ns;
            let on_ns: u64 = on_intervals
                .iter()
                .map(|&(s, e)| e.min(slot_end).saturating_sub(s.max(slot_start)))
                .sum();
            u8::from(on_ns * 2 > bit_time_ns)
        })
        .collect()
}
