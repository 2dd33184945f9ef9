//! Receiver-side mode management: scan a channel set for covert activity,
//! lock to the busiest channel in triggering mode, fall back to scanning
//! when the signal disappears.

use std::collections::BTreeMap;
use std::fmt;

use crate::channel::FftFrame;

/// Activity scores for one scan window, keyed by channel index. Channels
/// without frames in the window are absent, not zero.
pub type ChannelScores = BTreeMap<u8, f64>;

/// Scores for one windowed slice of a frame stream.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowScores {
    pub window_end_ns: u64,
    pub scores: ChannelScores,
}

/// Detection tuning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RxConfig {
    /// Score a channel must exceed to count as active.
    pub detection_threshold: f64,
    /// Consecutive above-threshold windows required before locking.
    pub consecutive_windows: u32,
}

impl Default for RxConfig {
    fn default() -> Self {
        Self {
            detection_threshold: 3.0,
            consecutive_windows: 2,
        }
    }
}

/// Per-channel activity over windows of `window_s`.
///
/// The score is the ratio of the 95th-percentile max-bin magnitude to the
/// median max-bin magnitude within the window: flat noise scores near 1,
/// an on-off keyed carrier pushes the upper tail well above the median.
pub fn scan_for_activity(frames: &[FftFrame], window_s: f64) -> Vec<WindowScores> {
    let window_ns = (window_s * 1e9).round() as u64;
    if window_ns == 0 || frames.is_empty() {
        return Vec::new();
    }
    let mut grouped: BTreeMap<u64, BTreeMap<u8, Vec<f64>>> = BTreeMap::new();
    for f in frames {
        grouped
            .entry(f.timestamp_ns / window_ns)
            .or_default()
            .entry(f.channel_index)
            .or_default()
            .push(f.max_magnitude);
    }
    grouped
        .into_iter()
        .map(|(w, channels)| {
            let scores = channels
                .into_iter()
                .map(|(idx, mut mags)| {
                    mags.sort_by(f64::total_cmp);
                    let p95 = mags[((mags.len() - 1) as f64 * 0.95).round() as usize];
                    let median = mags[mags.len() / 2];
                    let score = if median > 0.0 {
                        p95 / median
                    } else if p95 > 0.0 {
                        f64::INFINITY
                    } else {
                        1.0
                    };
                    (idx, score)
                })
                .collect();
            WindowScores {
                window_end_ns: (w + 1) * window_ns,
                scores,
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReceiverMode {
    Scanning,
    /// Locked to one channel, sampling it continuously.
    Triggering { channel: u8 },
}

impl fmt::Display for ReceiverMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReceiverMode::Scanning => write!(f, "scanning"),
            ReceiverMode::Triggering { channel } => write!(f, "triggering(ch {})", channel),
        }
    }
}

/// Receiver state. A locked channel exists exactly in triggering mode by
/// construction of [`ReceiverMode`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReceiverState {
    pub mode: ReceiverMode,
    /// Best score seen in the most recent window.
    pub detection_score: f64,
    streak: u32,
    candidate: Option<u8>,
}

impl Default for ReceiverState {
    fn default() -> Self {
        Self {
            mode: ReceiverMode::Scanning,
            detection_score: 0.0,
            streak: 0,
            candidate: None,
        }
    }
}

impl ReceiverState {
    pub fn locked_channel(&self) -> Option<u8> {
        match self.mode {
            ReceiverMode::Scanning => None,
            ReceiverMode::Triggering { channel } => Some(channel),
        }
    }
}

/// Inputs driving the state machine: a window of scan scores, or the
/// demodulator reporting that no enable sequence arrived within its
/// timeout.
#[derive(Debug, Clone, PartialEq)]
pub enum RxInput<'a> {
    WindowScores(&'a ChannelScores),
    LossOfSignal,
}

/// Advance the state machine by one observation.
///
/// Scanning locks onto the argmax channel after `consecutive_windows`
/// successive windows whose best score (on the same channel) exceeds the
/// threshold. Triggering reverts to scanning on loss of signal.
pub fn step_state(state: ReceiverState, input: RxInput<'_>, cfg: &RxConfig) -> ReceiverState {
    match (state.mode, input) {
        (ReceiverMode::Scanning, RxInput::WindowScores(scores)) => {
            let best = scores
                .iter()
                .max_by(|a, b| a.1.total_cmp(b.1))
                .map(|(&idx, &score)| (idx, score));
            let mut next = state;
            match best {
                Some((idx, score)) if score > cfg.detection_threshold => {
                    next.detection_score = score;
                    next.streak = if state.candidate == Some(idx) {
                        state.streak + 1
                    } else {
                        1
                    };
                    next.candidate = Some(idx);
                    if next.streak >= cfg.consecutive_windows {
                        next.mode = ReceiverMode::Triggering { channel: idx };
                        next.streak = 0;
                        next.candidate = None;
                    }
                }
                best => {
                    next.detection_score = best.map(|(_, s)| s).unwrap_or(0.0);
                    next.streak = 0;
                    next.candidate = None;
                }
            }
            next
        }
        (ReceiverMode::Triggering { .. }, RxInput::LossOfSignal) => ReceiverState {
            detection_score: 0.0,
            ..ReceiverState::default()
        },
        // Scores while triggering or loss reports while scanning change nothing.
        _ => state,
    }
}

/// One recorded mode change.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateTransition {
    pub t_ns: u64,
    pub from: ReceiverMode,
    pub to: ReceiverMode,
}

impl fmt::Display for StateTransition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t_ns={} {} -> {}", self.t_ns, self.from, self.to)
    }
}

/// Stateful wrapper that feeds observations through [`step_state`] and
/// keeps a transition log.
#[derive(Debug, Clone, Default)]
pub struct Receiver {
    pub state: ReceiverState,
    pub config: RxConfig,
    pub transitions: Vec<StateTransition>,
}

impl Receiver {
    pub fn new(config: RxConfig) -> Self {
        Self {
            state: ReceiverState::default(),
            config,
            transitions: Vec::new(),
        }
    }

    pub fn observe_window(&mut self, window: &WindowScores) -> ReceiverState {
        self.apply(window.window_end_ns, RxInput::WindowScores(&window.scores))
    }

    pub fn observe_loss(&mut self, t_ns: u64) -> ReceiverState {
        self.apply(t_ns, RxInput::LossOfSignal)
    }

    fn apply(&mut self, t_ns: u64, input: RxInput<'_>) -> ReceiverState {
        let next = step_state(self.state, input, &self.config);
        if next.mode != self.state.mode {
            self.transitions.push(StateTransition {
                t_ns,
                from: self.state.mode,
                to: next.mode,
            });
        }
        self.state = next;
        self.state
    }
}
