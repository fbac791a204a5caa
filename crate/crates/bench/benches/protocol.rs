use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qcoin_bench::scenarios;
use qcoin_core::net::{run_session_pair, ChannelConfig, Frame};
use qcoin_core::optimizer::{optimize_cheat_state, OptimizerConfig};
use qcoin_core::protocol::{MessageKind, Payload, ProtocolMessage};
use qcoin_core::stats::run_stats;
use qcoin_core::{run_batch, QutritState, RunConfig, StrategyConfig};

const THROWS: u64 = 10_000;

fn batch(c: &mut Criterion) {
    let mut group = c.benchmark_group("run_batch");
    group.throughput(Throughput::Elements(THROWS));
    for (name, strategies, noise) in scenarios() {
        group.bench_with_input(BenchmarkId::new("transcript", name), &strategies, |b, s| {
            b.iter(|| run_batch(THROWS, s, &noise, black_box(7)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("stats_only", name), &strategies, |b, s| {
            b.iter(|| run_stats(THROWS, s, &noise, black_box(7)).unwrap())
        });
    }
    group.finish();
}

fn channel(c: &mut Criterion) {
    let mut group = c.benchmark_group("channel");
    group.sample_size(10);
    group.throughput(Throughput::Elements(THROWS));
    let run = RunConfig {
        throws: THROWS,
        strategies: StrategyConfig::honest(),
        ..RunConfig::default()
    };
    group.bench_function("in_process_pair", |b| {
        let ch = ChannelConfig::in_process();
        b.iter(|| run_session_pair(&run, &ch, &ch).unwrap())
    });
    group.finish();
}

fn frames(c: &mut Criterion) {
    let state = QutritState::from_real(2.0, 1.0, 1.0).unwrap();
    let msg = ProtocolMessage::new(42, MessageKind::Throw(Payload::Pure(state)));
    let bytes = Frame::encode(&msg).to_bytes();
    c.bench_function("frame/encode", |b| b.iter(|| Frame::encode(black_box(&msg)).to_bytes()));
    c.bench_function("frame/decode", |b| {
        b.iter(|| Frame::from_bytes(black_box(&bytes)).unwrap().decode().unwrap())
    });
}

fn optimizer(c: &mut Criterion) {
    let mut group = c.benchmark_group("optimizer");
    group.sample_size(10);
    let config = OptimizerConfig::default();
    group.bench_function("default", |b| {
        b.iter(|| {
            let mut rng = ChaCha8Rng::seed_from_u64(1);
            optimize_cheat_state(&config, &mut rng).unwrap()
        })
    });
    group.finish();
}

criterion_group!(benches, batch, channel, frames, optimizer);
criterion_main!(benches);
