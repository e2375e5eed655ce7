use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use geotomo::hilbert::{parity_extend, shifted_hilbert, Parity};
use geotomo::jacobi::{apply_wk_transport, TransportParams};
use geotomo::reconstruction::BackprojectionTable;
use geotomo::{cartesian_grid, forward_ik, make_influx_grid, make_phantom, Exec, MetricModel, PhantomSpec};

const POLICIES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn forward(c: &mut Criterion) {
    let n = 64;
    let metric = MetricModel::lens(0.6).unwrap();
    let f = make_phantom(&PhantomSpec::default_for(n)).unwrap();
    let grid = make_influx_grid(n).unwrap();
    let mut group = c.benchmark_group("forward_ik");
    for (name, exec) in POLICIES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| forward_ik(&metric, &f, 3, &grid, 1.0 / n as f64, exec))
        });
    }
    group.finish();
}

fn backprojection_table(c: &mut Criterion) {
    let n = 24;
    let metric = MetricModel::const_curv_neg(1.6).unwrap();
    let template = cartesian_grid(n, 4.0 / n as f64).unwrap();
    let cells: Vec<usize> = (0..n * n).filter(|&i| template.point(i).norm_sq() < 1.0).collect();
    let mut group = c.benchmark_group("backprojection_table");
    group.sample_size(10);
    for (name, exec) in POLICIES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| BackprojectionTable::build(&metric, &template, cells.clone(), 2 * n, 1.0 / n as f64, exec))
        });
    }
    group.finish();
}

fn hilbert(c: &mut Criterion) {
    let n = 128;
    let metric = MetricModel::Euclidean;
    let f = make_phantom(&PhantomSpec::default_for(n)).unwrap();
    let data = forward_ik(&metric, &f, 2, &make_influx_grid(n).unwrap(), 1.0 / n as f64, Exec::Parallel);
    let ext = parity_extend(&data, Parity::Odd);
    let mut group = c.benchmark_group("shifted_hilbert");
    for (name, exec) in POLICIES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| b.iter(|| shifted_hilbert(&ext, 2, exec)));
    }
    group.finish();
}

fn error_operator(c: &mut Criterion) {
    let n = 16;
    let metric = MetricModel::const_curv_pos(2.0).unwrap();
    let f = make_phantom(&PhantomSpec::default_for(n)).unwrap();
    let mut group = c.benchmark_group("apply_wk_transport");
    group.sample_size(10);
    for (name, exec) in POLICIES {
        let params = TransportParams { exec, ..TransportParams::for_grid(n) };
        group.bench_with_input(BenchmarkId::from_parameter(name), &params, |b, params| b.iter(|| apply_wk_transport(&metric, &f, 3, *params)));
    }
    group.finish();
}

criterion_group!(benches, forward, backprojection_table, hilbert, error_operator);
criterion_main!(benches);
