//! Compares the rayon-backed batch paths against their sequential
//! counterparts: bound evaluation over a batch of random instances and the
//! per-mode fidelity map of the truncated-Fock oracle.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};

use entbound::bounds::{evaluate_instance_with, EvalOptions, PovmStrategy};
use entbound::dynamics::{random_instance, Instance, InstanceKind};
use entbound::parallel::{map_collect, map_collect_seq};
use entbound::povm::PovmSearchConfig;
use entbound::spinboson::{sample_bath, FockOracle, SpinBosonParams};

fn instance_batch(n: usize) -> Vec<Instance> {
    (0..n)
        .map(|k| random_instance(2, 3, InstanceKind::Generic, 1000 + k as u64).unwrap())
        .collect()
}

fn eval_one(inst: &Instance) -> f64 {
    let opts = EvalOptions {
        ree_fw_iters: 10,
        ree_restarts: 1,
        seed: 7,
    };
    let report = evaluate_instance_with(
        &inst.model,
        &inst.rho_s,
        &inst.rho_e,
        inst.t,
        &PovmStrategy::Optimize(PovmSearchConfig::quick(7)),
        &opts,
    )
    .unwrap();
    report.lower_clamped
}

fn bench_instance_batch(c: &mut Criterion) {
    let batch = instance_batch(16);
    let mut group = c.benchmark_group("instance_batch_16");
    group.sample_size(10);
    group.bench_function("parallel", |b| {
        b.iter_batched(
            || batch.clone(),
            |batch| map_collect(batch, |inst| eval_one(&inst)),
            BatchSize::SmallInput,
        )
    });
    group.bench_function("sequential", |b| {
        b.iter_batched(
            || batch.clone(),
            |batch| map_collect_seq(batch, |inst| eval_one(&inst)),
            BatchSize::SmallInput,
        )
    });
    group.finish();
}

fn bench_oracle_modes(c: &mut Criterion) {
    let params = SpinBosonParams::new(2.0, 1.0, 1.0, 0.0, vec![]).unwrap();
    let bath = sample_bath(&params, 64, 8.0, 0).unwrap();
    let oracle = FockOracle::new(&bath, 1.0).unwrap();
    let mut group = c.benchmark_group("oracle_64_modes");
    group.sample_size(10);
    // ln_fidelity dispatches per mode through the same map_collect layer the
    // library uses, so the feature flag decides parallel vs serial here
    group.bench_function("ln_fidelity", |b| b.iter(|| oracle.ln_fidelity(2.0).unwrap()));
    group.finish();
}

criterion_group!(benches, bench_instance_batch, bench_oracle_modes);
criterion_main!(benches);
