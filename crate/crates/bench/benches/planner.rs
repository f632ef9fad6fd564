use std::hint::black_box;

use colav_bench::fixture;
use colav_core::{ahead_of_time_probe, plan, run_headless, Characteristic, PlanContext, Verdict};
use criterion::{criterion_group, criterion_main, Criterion};

fn planning(c: &mut Criterion) {
    let mut group = c.benchmark_group("plan");
    for id in ["head_on_single", "double_head_on"] {
        let f = fixture(id);
        let ctx = PlanContext::new(&f.scenario, &f.config);
        let snap = f.at_trigger.snapshot();
        group.bench_function(id, |b| {
            b.iter(|| plan(&ctx, black_box(&snap), f.at_trigger.previous_offset).unwrap())
        });
    }
    group.finish();
}

fn probing(c: &mut Criterion) {
    let f = fixture("head_on_single");
    let ctx = PlanContext::new(&f.scenario, &f.config);
    c.bench_function("probe/head_on_single", |b| {
        b.iter(|| ahead_of_time_probe(&ctx, black_box(&f.start), 120.0, Characteristic::PortTurn).unwrap())
    });
}

fn contrasting(c: &mut Criterion) {
    let f = fixture("give_way_stand_on");
    let ctx = PlanContext::new(&f.scenario, &f.config);
    let dp = ahead_of_time_probe(&ctx, &f.start, 120.0, Characteristic::PortTurn)
        .unwrap()
        .expect("decision point");
    c.bench_function("contrast/all_characteristics", |b| {
        b.iter(|| {
            for ch in Characteristic::ALL {
                black_box(dp.with_characteristic(ch).unwrap());
            }
        })
    });
}

fn headless(c: &mut Criterion) {
    let f = fixture("crossing_give_way");
    let mut group = c.benchmark_group("session");
    group.sample_size(10);
    group.bench_function("headless_300s", |b| {
        b.iter(|| run_headless(f.scenario.clone(), f.config.clone(), Verdict::Accepted, 300.0).unwrap())
    });
    group.finish();
}

criterion_group!(benches, planning, probing, contrasting, headless);
criterion_main!(benches);
