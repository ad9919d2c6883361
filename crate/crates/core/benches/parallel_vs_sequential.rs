use std::hint::black_box;
use std::sync::Arc;

use casimir_core::force::f_coupled;
use casimir_core::loopspace::{BridgeSampler, SpeciesParams, Statistics, ThermoState};
use casimir_core::par::Execution;
use casimir_core::screening::{build_cells, ChiSampling, DensityProfile, PanelGrid, SlabComposition, SlabOperator, SpeciesDensity};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn profile(lo: f64, hi: f64, classical: bool, exec: Execution) -> DensityProfile {
    let t = ThermoState::reduced(1.0, 1.0, 5.0).unwrap();
    let n = 1.0 / (8.0 * std::f64::consts::PI);
    let sp = |name: &str, e: f64| Arc::new(SpeciesParams::new(name, e, 100.0, 0.0, Statistics::Boson, 0.0, &t).unwrap());
    let comp = SlabComposition {
        species: vec![
            SpeciesDensity { species: sp("cation", 1.0), number_density: n },
            SpeciesDensity { species: sp("anion", -1.0), number_density: n },
        ],
        neutral: true,
    };
    let sampling = ChiSampling { p_max: 2, n_paths: 4, n_steps: 8, seed: 1, classical };
    let cells = build_cells(&comp, &sampling, &t, 0, exec).unwrap();
    DensityProfile::homogeneous(PanelGrid::new(lo, hi, 6, 6).unwrap(), cells, t.beta)
}

fn bench(c: &mut Criterion) {
    let mut g = c.benchmark_group("ensemble");
    let sampler = BridgeSampler::new(2, 32, 9).unwrap();
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::new("bridge_4096", name), |b| b.iter(|| black_box(sampler.ensemble(exec, 0, 4096))));
    }
    g.finish();

    let quantum = profile(-6.0, 0.0, false, Execution::Parallel);
    let mut g = c.benchmark_group("operator");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::new("assemble_quantum", name), |b| {
            b.iter(|| black_box(SlabOperator::assemble(&quantum, 0.3, exec).unwrap()))
        });
    }
    g.finish();

    let (pa, pb) = (profile(-6.0, 0.0, true, Execution::Parallel), profile(0.0, 6.0, true, Execution::Parallel));
    let mut g = c.benchmark_group("force");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::new("f_coupled_d100", name), |b| {
            b.iter(|| black_box(f_coupled(&pa, &pb, 100.0, 6, exec).unwrap()))
        });
    }
    g.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
