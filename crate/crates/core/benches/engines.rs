use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use frozen_snowflake::exec::Exec;
use frozen_snowflake::geometry::{AngleRecord, Point};
use frozen_snowflake::io::fixtures::disk;
use frozen_snowflake::refine::{assemble_g, GenerationCurve};
use frozen_snowflake::regularity::ahlfors_scan;
use frozen_snowflake::snowflake::{
    generate_gamma_with, horizontal_source, vertical_mass_sampled, GeneratorParams, DEFAULT_LEAF_BUDGET,
};
use frozen_snowflake::wos::{run_walks, Domain, Side, WosConfig};

fn engines() -> [(&'static str, Exec); 2] {
    [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)]
}

fn gamma(c: &mut Criterion) {
    let mut g = c.benchmark_group("gamma_m3");
    let p = GeneratorParams::canonical(3, horizontal_source(1.0));
    for (name, exec) in engines() {
        g.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| generate_gamma_with(&p, exec).unwrap()));
    }
    g.finish();
}

fn assemble(c: &mut Criterion) {
    let mut g = c.benchmark_group("assemble_polygon_m2");
    g.sample_size(10);
    let prev = GenerationCurve::initial_polygon(100);
    for (name, exec) in engines() {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| assemble_g(&prev, 2, None, DEFAULT_LEAF_BUDGET, exec).unwrap())
        });
    }
    g.finish();
}

fn mass(c: &mut Criterion) {
    let mut g = c.benchmark_group("vertical_mass_m4");
    let n = AngleRecord::exact(1, 2);
    for (name, exec) in engines() {
        g.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| vertical_mass_sampled(n, 4, 16, 100_000, 3, exec)));
    }
    g.finish();
}

fn walks(c: &mut Criterion) {
    let mut g = c.benchmark_group("disk_walks");
    let curve = disk(4096, 1.0);
    let d = Domain::new(curve.vertices());
    let w = WosConfig {
        walks: 10_000,
        ..WosConfig::for_curve(curve.chord_length, 2.0)
    };
    for (name, exec) in engines() {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| run_walks(&d, Point::ORIGIN, Side::Interior, &w, exec).unwrap())
        });
    }
    g.finish();
}

fn ahlfors(c: &mut Criterion) {
    let mut g = c.benchmark_group("ahlfors_disk");
    let curve = disk(1 << 16, 1.0);
    let radii = [0.01, 0.02, 0.04, 0.08];
    for (name, exec) in engines() {
        g.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| ahlfors_scan(&curve, 256, &radii, None, exec)));
    }
    g.finish();
}

criterion_group!(benches, gamma, assemble, mass, walks, ahlfors);
criterion_main!(benches);
