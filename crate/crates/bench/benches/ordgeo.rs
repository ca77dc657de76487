use criterion::{black_box, criterion_group, criterion_main, Criterion};
use ordgeo::corpus;
use ordgeo::geometry::axiom;
use ordgeo::kernel::check_proof;
use ordgeo::models::find_countermodel_with;
use ordgeo::search::{prove, SearchConfig};
use ordgeo::Formula;

fn ax(names: &[&str]) -> Vec<Formula> {
    names.iter().map(|n| axiom(n).unwrap()).collect()
}

fn check_corpus(c: &mut Criterion) {
    let proofs: Vec<_> = corpus::entries().iter().map(|e| e.parse().unwrap()).collect();
    c.bench_function("check corpus", |b| {
        b.iter(|| {
            for p in &proofs {
                assert!(check_proof(black_box(p)).is_valid());
            }
        })
    });
}

fn models(c: &mut Criterion) {
    let prem = ax(&["I5", "I6", "ODO"]);
    let goal = axiom("W3").unwrap();
    let mut g = c.benchmark_group("models size 3");
    g.sample_size(10);
    for jobs in [1, 4] {
        g.bench_function(format!("{jobs} jobs"), |b| {
            b.iter(|| find_countermodel_with(&prem, &goal, 3, jobs).unwrap())
        });
    }
    g.finish();
}

fn search(c: &mut Criterion) {
    let cfg = SearchConfig::default();
    let mut g = c.benchmark_group("prove");
    for (name, prem, goal) in [("W1", vec!["I6"], "W1"), ("OO", vec!["I5", "ODO"], "OO"), ("I6", vec!["I7", "I8", "ODO"], "I6")] {
        let (prem, goal) = (ax(&prem), axiom(goal).unwrap());
        g.bench_function(name, |b| b.iter(|| assert!(prove(&prem, &goal, &cfg).proof().is_some())));
    }
    g.finish();
}

criterion_group!(benches, check_corpus, models, search);
criterion_main!(benches);
