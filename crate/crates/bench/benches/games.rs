use criterion::{criterion_group, criterion_main, Criterion};

use encctl_core::adversaries::{det_cpa_distinguisher, det_pea_distinguisher, least_squares_estimation};
use encctl_core::controllers::ControlLaw;
use encctl_core::games::{estimate_advantage, Adversary, GameSpec};
use encctl_core::modarith::RngHandle;
use encctl_core::schemes::{SchemeId, SecurityParameter};

fn games(c: &mut Criterion) {
    let lambda = SecurityParameter::new(256).unwrap();
    let mut group = c.benchmark_group("games");
    group.sample_size(10);

    let cpa = GameSpec::Cpa {
        scheme_id: SchemeId::Multiplicative,
        lambda,
    };
    let det_cpa = Adversary::Cpa(det_cpa_distinguisher());
    group.bench_function("cpa_100_trials", |b| b.iter(|| estimate_advantage(&cpa, &det_cpa, 100, 1).unwrap()));

    let pea = GameSpec::Pea {
        scheme_id: SchemeId::Multiplicative,
        lambda,
        law: ControlLaw::multiplicative_gain(2).unwrap(),
        budget: 256,
    };
    let det_pea = Adversary::Pea(det_pea_distinguisher());
    group.bench_function("pea_100_trials", |b| b.iter(|| estimate_advantage(&pea, &det_pea, 100, 1).unwrap()));
    group.finish();

    let mut rng = RngHandle::from_u64(2);
    let samples: Vec<(Vec<f64>, Vec<f64>)> = (0..50)
        .map(|_| {
            let y: Vec<f64> = (0..4).map(|_| rng.unit_f64()).collect();
            let u = vec![y.iter().sum(), y[0] - y[3]];
            (y, u)
        })
        .collect();
    c.bench_function("least_squares_50x4", |b| b.iter(|| least_squares_estimation(&samples).unwrap()));
}

criterion_group!(benches, games);
criterion_main!(benches);
