//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line with its measured numbers. Criterion 11 exercises
//! wall-clock scheduling of the stress transmitter and is ignored by
//! default: run it on an otherwise idle machine with
//! `cargo test -p ramwave --test acceptance -- --ignored`.

use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ramwave::channel::{
    apply_jammer, carrier_bin, overlapping_channels, synthesize_fft_frames, synthesize_iq,
    ChannelModel, FrameCadence, RxMode, WIFI_CHANNELS,
};
use ramwave::codec::{crc8, decode_frame, encode_packet, Packet, FRAME_BITS, PREAMBLE_BITS};
use ramwave::demod::{
    detect_enable, fft_bin_series, power_series, slice_bits, welch_psd, DemodConfig,
    DEFAULT_CORR_THRESH, ENABLE_SEQUENCE,
};
use ramwave::harness::{run_ber_point, run_ber_sweep, ExperimentConfig, ReceiverPath};
use ramwave::tx::{
    build_schedule, measure_duty_cycle, run_stress_transmitter, simulate_emission, BitSchedule,
};

fn sweep_cfg(path: ReceiverPath, snr_points: Vec<f64>, bit_rate: f64, packets: usize, seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        snr_points_db: snr_points,
        bit_rate_bps: bit_rate,
        receiver_path: path,
        packets_per_point: packets,
        seed,
        ..ExperimentConfig::default()
    }
}

#[test]
fn acceptance_01_codec_round_trip_and_flip_rejection() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);

    let mut mismatches = 0usize;
    for _ in 0..100_000 {
        let p = Packet::new(rng.gen());
        if decode_frame(encode_packet(p).bits()) != Ok(p) {
            mismatches += 1;
        }
    }

    let mut undetected_flips = 0usize;
    for _ in 0..100 {
        let frame = encode_packet(Packet::new(rng.gen()));
        for pos in PREAMBLE_BITS..FRAME_BITS {
            let mut bits = *frame.bits();
            bits[pos] ^= 1;
            if decode_frame(&bits).is_ok() {
                undetected_flips += 1;
            }
        }
    }

    let elapsed = started.elapsed();
    let pass = mismatches == 0 && undetected_flips == 0 && elapsed.as_secs_f64() < 10.0;
    println!(
        "[{}] criterion 1: codec round-trip ({} mismatches / 100000, {} undetected flips / 4000, {:.2}s)",
        if pass { "PASS" } else { "FAIL" },
        mismatches,
        undetected_flips,
        elapsed.as_secs_f64()
    );
    assert_eq!(mismatches, 0);
    assert_eq!(undetected_flips, 0);
    assert!(elapsed.as_secs_f64() < 10.0, "took {:?}", elapsed);
}

#[test]
fn acceptance_02_crc_oracle_equivalence() {
    // Independent bit-serial GF(2) long division.
    fn oracle(data: &[u8]) -> u8 {
        let mut reg = 0u8;
        for &byte in data {
            for i in (0..8).rev() {
                let incoming = (byte >> i) & 1;
                let msb = (reg >> 7) & 1;
                reg <<= 1;
                if msb ^ incoming != 0 {
                    reg ^= 0x07;
                }
            }
        }
        reg
    }

    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut mismatches = 0usize;
    for _ in 0..10_000 {
        let len = rng.gen_range(0..64);
        let data: Vec<u8> = (0..len).map(|_| rng.gen()).collect();
        if crc8(&data) != oracle(&data) {
            mismatches += 1;
        }
    }
    println!(
        "[{}] criterion 2: crc8 vs bit-serial oracle ({} mismatches / 10000)",
        if mismatches == 0 { "PASS" } else { "FAIL" },
        mismatches
    );
    assert_eq!(mismatches, 0);
}

#[test]
fn acceptance_03_zero_noise_identity_all_paths() {
    let cases = [
        (ReceiverPath::Iq, 100.0),
        (ReceiverPath::FftScanning, 1.0),
        (ReceiverPath::FftTriggering, 10.0),
    ];
    let mut all_pass = true;
    for (path, bit_rate) in cases {
        let cfg = sweep_cfg(path, vec![f64::INFINITY], bit_rate, 100, 303);
        let report = run_ber_point(&cfg, f64::INFINITY, 0).unwrap();
        let pass = report.ber == 0.0 && report.packets_recovered == 100;
        all_pass &= pass;
        println!(
            "[{}] criterion 3: zero-noise identity on {} (ber {}, {} / 100 packets)",
            if pass { "PASS" } else { "FAIL" },
            path,
            report.ber,
            report.packets_recovered
        );
        assert_eq!(report.ber, 0.0, "path {path}");
        assert_eq!(report.packets_recovered, 100, "path {path}");
    }
    assert!(all_pass);
}

#[test]
fn acceptance_04_high_snr_fidelity() {
    let started = Instant::now();
    // >= 10^4 bits per run: 209 frames x 48 bits = 10032.
    let packets = 209;

    let iq_cfg = sweep_cfg(ReceiverPath::Iq, vec![18.0], 100.0, packets, 404);
    let iq = run_ber_point(&iq_cfg, 18.0, 0).unwrap();

    let scan_cfg = sweep_cfg(ReceiverPath::FftScanning, vec![18.0], 1.0, packets, 405);
    let scan = run_ber_point(&scan_cfg, 18.0, 0).unwrap();

    let elapsed = started.elapsed();
    let pass = iq.ber == 0.0 && scan.ber == 0.0 && elapsed.as_secs_f64() < 120.0;
    println!(
        "[{}] criterion 4: high-SNR fidelity (iq@100bps ber {} over {} bits, scanning@1bps ber {} over {} bits, {:.1}s)",
        if pass { "PASS" } else { "FAIL" },
        iq.ber,
        iq.bits_sent,
        scan.ber,
        scan.bits_sent,
        elapsed.as_secs_f64()
    );
    assert!(iq.bits_sent >= 10_000 && scan.bits_sent >= 10_000);
    assert_eq!(iq.ber, 0.0);
    assert_eq!(scan.ber, 0.0);
    assert!(elapsed.as_secs_f64() < 120.0, "took {:?}", elapsed);
}

#[test]
fn acceptance_05_ber_monotone_in_snr() {
    let snrs = vec![0.0, 3.0, 6.0, 9.0, 12.0, 15.0, 18.0];
    let cfg = sweep_cfg(ReceiverPath::Iq, snrs.clone(), 100.0, 209, 505);
    let reports = run_ber_sweep(&cfg).unwrap();
    let bers: Vec<f64> = reports.iter().map(|r| r.ber).collect();

    let mut monotone = true;
    for w in bers.windows(2) {
        // Non-increasing within half a percentage point of sampling slack.
        if w[1] > w[0] + 0.005 {
            monotone = false;
        }
    }
    let strict_drop = bers[1] > bers[6];
    let pass = monotone && strict_drop;
    println!(
        "[{}] criterion 5: BER monotone over {:?} dB -> {:?}",
        if pass { "PASS" } else { "FAIL" },
        snrs,
        bers
    );
    assert!(reports.iter().all(|r| r.bits_sent >= 10_000));
    assert!(monotone, "bers: {:?}", bers);
    assert!(strict_drop, "ber(3dB)={} !> ber(18dB)={}", bers[1], bers[6]);
}

#[test]
fn acceptance_06_enable_detector_offset_and_false_positives() {
    // Offset recovery at 10 dB over 200 seeded trials.
    let fs = 32_000.0;
    let bit_time_ms = 10.0;
    let dcfg = DemodConfig::for_stream(fs, bit_time_ms).unwrap();
    let windows_per_bit = (fs * bit_time_ms / 1000.0) as usize / dcfg.window_size;
    let mut within_one = 0usize;
    for seed in 0..200u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(9000 + seed);
        let prefix_bits = rng.gen_range(2..40usize);
        let mut bits = vec![0u8; prefix_bits];
        bits.extend_from_slice(&ENABLE_SEQUENCE);
        (0..40).for_each(|_| bits.push(rng.gen_range(0..=1)));
        bits.extend_from_slice(&[0; 8]);
        let schedule = BitSchedule::new(bits, bit_time_ms).unwrap();
        let timeline = simulate_emission(&schedule, fs).unwrap();
        let model = ChannelModel::new(2424.0, 10.0, seed);
        let stream =
            synthesize_iq(&timeline, &model, 2424.0, fs, schedule.duration_s()).unwrap();
        let series = power_series(&stream, &dcfg);
        let truth = prefix_bits * windows_per_bit;
        if let Some(det) = detect_enable(&series, bit_time_ms, DEFAULT_CORR_THRESH) {
            if det.offset_index.abs_diff(truth) <= 1 {
                within_one += 1;
            }
        }
    }

    // Per-window false-detection rate on pure noise at the same threshold.
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let spb = windows_per_bit as f64;
    let template_len = (ENABLE_SEQUENCE.len() as f64 * spb) as usize;
    let noise: Vec<f64> = (0..10_000 + template_len)
        .map(|_| {
            let a: f64 = rng.gen();
            a * a
        })
        .collect();
    let template: Vec<f64> = (0..template_len)
        .map(|i| ENABLE_SEQUENCE[(i as f64 / spb) as usize] as f64)
        .collect();
    let t_mean = template.iter().sum::<f64>() / template_len as f64;
    let centered: Vec<f64> = template.iter().map(|t| t - t_mean).collect();
    let t_norm = centered.iter().map(|t| t * t).sum::<f64>().sqrt();
    let mut false_hits = 0usize;
    for j in 0..10_000 {
        let x = &noise[j..j + template_len];
        let xm = x.iter().sum::<f64>() / template_len as f64;
        let dot: f64 = x.iter().zip(&centered).map(|(a, t)| (a - xm) * t).sum();
        let xn = x.iter().map(|a| (a - xm) * (a - xm)).sum::<f64>().sqrt();
        if dot / (xn * t_norm) >= DEFAULT_CORR_THRESH {
            false_hits += 1;
        }
    }

    let hit_rate = within_one as f64 / 200.0;
    let fp_rate = false_hits as f64 / 10_000.0;
    let pass = hit_rate >= 0.95 && fp_rate < 0.01;
    println!(
        "[{}] criterion 6: enable detector (offset within +/-1 window in {:.1}% of trials, noise false positives {:.3}%)",
        if pass { "PASS" } else { "FAIL" },
        hit_rate * 100.0,
        fp_rate * 100.0
    );
    assert!(hit_rate >= 0.95, "hit rate {}", hit_rate);
    assert!(fp_rate < 0.01, "false positive rate {}", fp_rate);
}

#[test]
fn acceptance_07_welch_psd_properties() {
    // Argmax correctness for tones on each of 56 bin frequencies.
    let segment = 56;
    let window_len = segment * 8;
    let cfg = DemodConfig {
        freq_offset_hz: 0.0,
        sample_rate_hz: 448_000.0,
        buffer_size: window_len,
        bit_time_ms: 1000.0,
        window_size: window_len,
        corr_thresh: DEFAULT_CORR_THRESH,
        welch_segment: segment,
        welch_overlap: 0.5,
    };
    let mut argmax_errors = 0usize;
    for bin in 0..segment {
        let window: Vec<Complex64> = (0..window_len)
            .map(|i| {
                let phase = std::f64::consts::TAU * bin as f64 * i as f64 / segment as f64;
                Complex64::new(phase.cos(), phase.sin())
            })
            .collect();
        let psd = welch_psd(&window, &cfg).unwrap();
        let argmax = psd
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        if argmax != bin {
            argmax_errors += 1;
        }
    }

    // Parseval within 1% against the taper-corrected mean square.
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let mut worst_parseval = 0.0f64;
    for _ in 0..50 {
        let window: Vec<Complex64> = (0..window_len)
            .map(|_| {
                Complex64::new(
                    rng.sample(rand_distr::StandardNormal),
                    rng.sample(rand_distr::StandardNormal),
                )
            })
            .collect();
        let psd = welch_psd(&window, &cfg).unwrap();
        let total: f64 = psd.iter().sum();
        let taper: Vec<f64> = (0..segment)
            .map(|i| 0.5 - 0.5 * (std::f64::consts::TAU * i as f64 / segment as f64).cos())
            .collect();
        let taper_power: f64 = taper.iter().map(|w| w * w).sum();
        let hop = segment / 2;
        let n_segments = (window_len - segment) / hop + 1;
        let mut ms = 0.0;
        for s in 0..n_segments {
            for (i, w) in taper.iter().enumerate() {
                ms += (window[s * hop + i] * w).norm_sqr();
            }
        }
        ms /= n_segments as f64 * taper_power;
        worst_parseval = worst_parseval.max((total - ms).abs() / ms);
    }

    // Variance reduction >= 32 with 64 averaged segments, 100 seeds.
    let seg = 16;
    let welch_len = seg + 63 * (seg / 2);
    let welch_cfg = DemodConfig {
        window_size: welch_len,
        buffer_size: welch_len,
        welch_segment: seg,
        ..cfg
    };
    let single_cfg = DemodConfig {
        window_size: seg,
        buffer_size: seg,
        welch_segment: seg,
        ..cfg
    };
    let mut welch_obs = vec![Vec::new(); seg];
    let mut single_obs = vec![Vec::new(); seg];
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(7100 + seed);
        let mut draw = |n: usize| -> Vec<Complex64> {
            (0..n)
                .map(|_| {
                    Complex64::new(
                        rng.sample(rand_distr::StandardNormal),
                        rng.sample(rand_distr::StandardNormal),
                    )
                })
                .collect()
        };
        let w = welch_psd(&draw(welch_len), &welch_cfg).unwrap();
        let s = welch_psd(&draw(seg), &single_cfg).unwrap();
        for k in 0..seg {
            welch_obs[k].push(w[k]);
            single_obs[k].push(s[k]);
        }
    }
    let var = |xs: &[f64]| {
        let m = xs.iter().sum::<f64>() / xs.len() as f64;
        xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / xs.len() as f64
    };
    let reduction: f64 = (0..seg)
        .map(|k| var(&single_obs[k]) / var(&welch_obs[k]))
        .sum::<f64>()
        / seg as f64;

    let pass = argmax_errors == 0 && worst_parseval < 0.01 && reduction >= 32.0;
    println!(
        "[{}] criterion 7: welch ({} argmax errors / 56 bins, parseval worst {:.4}%, variance reduction {:.1}x)",
        if pass { "PASS" } else { "FAIL" },
        argmax_errors,
        worst_parseval * 100.0,
        reduction
    );
    assert_eq!(argmax_errors, 0);
    assert!(worst_parseval < 0.01);
    assert!(reduction >= 32.0, "reduction {}", reduction);
}

#[test]
fn acceptance_08_triggering_outpaces_scanning() {
    // Frame counts over a simulated 5 s at default cadences.
    let all_on = BitSchedule::new(vec![1; 5], 1000.0).unwrap();
    let timeline = simulate_emission(&all_on, 1000.0).unwrap();
    let model = ChannelModel::new(2424.0, 9.0, 808);
    let cadence = FrameCadence::default();
    let scanning =
        synthesize_fft_frames(&timeline, &model, RxMode::Scanning, &[3], &cadence).unwrap();
    let triggering =
        synthesize_fft_frames(&timeline, &model, RxMode::Triggering, &[3], &cadence).unwrap();
    let ratio = triggering.len() as f64 / scanning.len() as f64;
    let pass = triggering.len() > scanning.len() && ratio >= 5.0;
    println!(
        "[{}] criterion 8: mode throughput (triggering {} frames vs scanning {} over 5s, ratio {:.1})",
        if pass { "PASS" } else { "FAIL" },
        triggering.len(),
        scanning.len(),
        ratio
    );
    assert!(triggering.len() > scanning.len());
    assert!(ratio >= 5.0, "ratio {}", ratio);
}

#[test]
fn acceptance_09_channel_overlap_queries_and_fixture() {
    let q2424 = overlapping_channels(2424.0, 1000.0).margin_indices();
    let q2402 = overlapping_channels(2402.0, 1000.0).margin_indices();
    let q2440 = overlapping_channels(2440.0, 1000.0).margin_indices();

    let fixture = include_str!("fixtures/wifi_channels.json");
    let rendered = serde_json::to_string_pretty(&WIFI_CHANNELS.to_vec()).unwrap() + "\n";
    let fixture_ok = rendered == fixture;

    let pass =
        q2424 == vec![3, 4, 5] && q2402 == vec![1] && q2440 == vec![5, 6, 7, 8] && fixture_ok;
    println!(
        "[{}] criterion 9: channel overlap (2424 -> {:?} want [3,4,5]; 2402 -> {:?} want [1]; 2440 -> {:?} want [5,6,7,8]; fixture byte-match {})",
        if pass { "PASS" } else { "FAIL" },
        q2424,
        q2402,
        q2440,
        fixture_ok
    );
    assert_eq!(q2402, vec![1]);
    assert_eq!(q2440, vec![5, 6, 7, 8]);
    assert!(fixture_ok, "channel table drifted from committed fixture");
    // 2424 MHz: channel 2's center (2417) is 7 MHz from the carrier and its
    // tabulated range (2406-2428) contains it, so every distance- or
    // range-based rule that keeps channel 5 (8 MHz away) also includes
    // channel 2. The required set excludes it; see the failure output.
    assert_eq!(q2424, vec![3, 4, 5]);
}

#[test]
fn acceptance_10_jammer_clamp_and_ber_penalty() {
    let mut clamp_ok = true;
    for base in [14.0, 20.0, f64::INFINITY] {
        let ch = ChannelModel::new(2424.0, base, 1);
        clamp_ok &= (apply_jammer(&ch, 6).effective_snr_db() - 4.8).abs() < 1e-9;
        clamp_ok &= (apply_jammer(&ch, 8).effective_snr_db() - 3.1).abs() < 1e-9;
    }

    let unjammed = sweep_cfg(ReceiverPath::Iq, vec![14.0], 100.0, 50, 1010);
    let mut jammed = unjammed.clone();
    jammed.jammer_cores = 8;
    let clean = run_ber_point(&unjammed, 14.0, 0).unwrap();
    let noisy = run_ber_point(&jammed, 14.0, 0).unwrap();

    let pass = clamp_ok && noisy.ber > clean.ber;
    println!(
        "[{}] criterion 10: jammer (floors 4.8/3.1 dB ok={}, ber jammed {:.4} > unjammed {:.4})",
        if pass { "PASS" } else { "FAIL" },
        clamp_ok,
        noisy.ber,
        clean.ber
    );
    assert!(clamp_ok);
    assert!(
        noisy.ber > clean.ber,
        "jammed {} vs unjammed {}",
        noisy.ber,
        clean.ber
    );
}

// Wall-clock scheduling quality depends on an unloaded machine; excluded
// from default runs. 48 bits at 10 bit/s takes ~4.8 s.
#[test]
#[ignore = "timing-sensitive: run on an idle machine"]
fn acceptance_11_stress_transmitter_timing() {
    let frame = encode_packet(Packet::new(0xC0DE_D00D));
    let schedule = build_schedule(&[frame], 100.0, 0).unwrap();
    // Leave the governor a core of its own; oversubscribing the machine is
    // exactly the "shared runner" condition this test excludes.
    let workers = (std::thread::available_parallelism().map_or(1, |n| n.get()) - 1).max(1);
    let log = run_stress_transmitter(&schedule, workers).unwrap();

    let recovered = measure_duty_cycle(&log, 100.0, schedule.bits.len());
    let bits_ok = recovered == schedule.bits;

    let bit_ns = 100_000_000u64;
    let budget = bit_ns / 20; // 5% of bit time
    let mut worst_err = 0u64;
    for t in &log.transitions {
        let k = (t.t_ns + bit_ns / 2) / bit_ns;
        worst_err = worst_err.max(t.t_ns.abs_diff(k * bit_ns));
    }
    // Drift check: late boundaries must not be systematically worse than
    // early ones.
    let half = log.transitions.len() / 2;
    let err_of = |t: &ramwave::tx::Transition| {
        let k = (t.t_ns + bit_ns / 2) / bit_ns;
        t.t_ns.abs_diff(k * bit_ns)
    };
    let early_max = log.transitions[..half].iter().map(err_of).max().unwrap_or(0);
    let late_max = log.transitions[half..].iter().map(err_of).max().unwrap_or(0);
    let no_drift = late_max <= early_max + budget / 2;

    let pass = bits_ok && worst_err < budget && no_drift && log.timing_violations.is_empty();
    println!(
        "[{}] criterion 11: stress timing (duty-cycle bits ok={}, worst boundary err {:.2} ms, early/late max {:.2}/{:.2} ms, {} violations)",
        if pass { "PASS" } else { "FAIL" },
        bits_ok,
        worst_err as f64 / 1e6,
        early_max as f64 / 1e6,
        late_max as f64 / 1e6,
        log.timing_violations.len()
    );
    assert!(bits_ok, "recovered {:?}", recovered);
    assert!(worst_err < budget, "worst boundary error {} ns", worst_err);
    assert!(no_drift, "early {} ns vs late {} ns", early_max, late_max);
    assert!(log.timing_violations.is_empty());
}

#[test]
fn acceptance_12_iq_and_triggering_paths_decode_identically() {
    let seed = 1212u64;
    let snr_db = 15.0;
    let bit_time_ms = 100.0; // 10 bit/s
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let frames: Vec<_> = (0..50)
        .map(|_| encode_packet(Packet::new(rng.gen())))
        .collect();
    let schedule = build_schedule(&frames, bit_time_ms, 8).unwrap();
    let n_bits = schedule.bits.len();

    // IQ path.
    let fs = 16_000.0;
    let timeline = simulate_emission(&schedule, fs).unwrap();
    let model = ChannelModel::new(2424.0, snr_db, seed);
    let stream = synthesize_iq(&timeline, &model, 2424.0, fs, schedule.duration_s()).unwrap();
    let dcfg = DemodConfig::for_stream(fs, bit_time_ms).unwrap();
    let iq_series = power_series(&stream, &dcfg);
    let iq_det = detect_enable(&iq_series, bit_time_ms, DEFAULT_CORR_THRESH)
        .expect("iq enable sequence found");
    let iq_bits = slice_bits(&iq_series, &iq_det, bit_time_ms, n_bits);

    // FFT triggering path, same schedule and seed.
    let env = simulate_emission(&schedule, 1000.0).unwrap();
    let channel = ramwave::channel::wifi_channel(3).unwrap();
    let bin = carrier_bin(channel, 2424.0).unwrap();
    let fft_frames =
        synthesize_fft_frames(&env, &model, RxMode::Triggering, &[3], &FrameCadence::default())
            .unwrap();
    let fft_series = fft_bin_series(&fft_frames, bin).unwrap();
    let fft_det = detect_enable(&fft_series, bit_time_ms, DEFAULT_CORR_THRESH)
        .expect("fft enable sequence found");
    let fft_bits = slice_bits(&fft_series, &fft_det, bit_time_ms, n_bits);

    let identical = iq_bits.bits == fft_bits.bits;
    let iq_packets = ramwave::demod::recover_packets(&iq_bits.bits)
        .into_iter()
        .filter(Result::is_ok)
        .count();
    let pass = identical && iq_bits.complete && fft_bits.complete && iq_packets == 50;
    println!(
        "[{}] criterion 12: path equivalence ({} bits each, identical={}, {} / 50 packets recovered)",
        if pass { "PASS" } else { "FAIL" },
        iq_bits.bits.len(),
        identical,
        iq_packets
    );
    assert!(iq_bits.complete && fft_bits.complete);
    assert_eq!(iq_bits.bits, fft_bits.bits);
    assert_eq!(iq_packets, 50);
}

// Golden-file regeneration helper; run explicitly when the channel table
// legitimately changes:
// cargo test -p ramwave --test acceptance regenerate -- --ignored
#[test]
#[ignore = "regenerates the committed channel-table fixture"]
fn regenerate_wifi_channel_fixture() {
    let rendered = serde_json::to_string_pretty(&WIFI_CHANNELS.to_vec()).unwrap() + "\n";
    let path = concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/tests/fixtures/wifi_channels.json"
    );
    std::fs::write(path, rendered).unwrap();
}
