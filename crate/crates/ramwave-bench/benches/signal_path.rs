use criterion::{criterion_group, criterion_main, BatchSize, Criterion, Throughput};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ramwave::channel::{synthesize_iq, ChannelModel};
use ramwave::codec::{crc8, decode_frame, encode_packet, Packet};
use ramwave::demod::{demodulate_series, power_series, welch_psd, DemodConfig, DEFAULT_CORR_THRESH};
use ramwave::tx::{build_schedule, simulate_emission};

fn bench_crc8(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let data: Vec<u8> = (0..4096).map(|_| rng.gen()).collect();
    let mut group = c.benchmark_group("crc8");
    group.throughput(Throughput::Bytes(data.len() as u64));
    group.bench_function("4k", |b| b.iter(|| crc8(std::hint::black_box(&data))));
    group.finish();
}

fn bench_codec(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    c.bench_function("encode_decode_frame", |b| {
        b.iter_batched(
            || Packet::new(rng.gen()),
            |p| decode_frame(encode_packet(p).bits()),
            BatchSize::SmallInput,
        )
    });
}

fn bench_welch(c: &mut Criterion) {
    let cfg = DemodConfig::for_stream(32_000.0, 10.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let window: Vec<_> = (0..cfg.window_size)
        .map(|_| num_complex(&mut rng))
        .collect();
    c.bench_function("welch_psd_64", |b| {
        b.iter(|| welch_psd(std::hint::black_box(&window), &cfg))
    });
}

fn num_complex(rng: &mut ChaCha8Rng) -> num::Complex64 {
    num::Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
}

mod num {
    pub type Complex64 = num_complex_reexport::Complex64;
    mod num_complex_reexport {
        pub use ramwave::channel::IqStream;
        pub type Complex64 = <IqStreamSamples as SampleVec>::Item;
        pub trait SampleVec {
            type Item;
        }
        pub struct IqStreamSamples;
        impl SampleVec for IqStreamSamples {
            type Item = super::super::InnerComplex;
        }
    }
}

type InnerComplex = <Vec<ramwave::channel::IqStream> as VecSample>::C;
trait VecSample {
    type C;
}
impl VecSample for Vec<ramwave::channel::IqStream> {
    type C = ComplexFromStream;
}
type ComplexFromStream = ();

fn bench_pipeline(c: &mut Criterion) {
    // One second of signal through synthesis and full demodulation.
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let frames: Vec<_> = (0..2)
        .map(|_| encode_packet(Packet::new(rng.gen())))
        .collect();
    let schedule = build_schedule(&frames, 10.0, 8).unwrap();
    let fs = 32_000.0;
    let timeline = simulate_emission(&schedule, fs).unwrap();
    let model = ChannelModel::new(2424.0, 15.0, 44);
    let cfg = DemodConfig::for_stream(fs, 10.0).unwrap();

    c.bench_function("synthesize_iq_1s", |b| {
        b.iter(|| synthesize_iq(&timeline, &model, 2424.0, fs, schedule.duration_s()).unwrap())
    });

    let stream = synthesize_iq(&timeline, &model, 2424.0, fs, schedule.duration_s()).unwrap();
    c.bench_function("demodulate_1s", |b| {
        b.iter(|| {
            let series = power_series(std::hint::black_box(&stream), &cfg);
            demodulate_series(&series, 10.0, DEFAULT_CORR_THRESH)
        })
    });
}

criterion_group!(benches, bench_crc8, bench_codec, bench_welch, bench_pipeline);
criterion_main!(benches);
