use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use explab_core::gridset::{energy_count, gen_ap, image_set, Scale};
use explab_core::polyexpr::{classify_special_form, parse_poly2};

const POLYS: [(&str, &str); 3] = [
    ("sum", "x + y"),
    ("expander", "x^2 + x*y + y^2"),
    ("quartic", "x + y + (x^2 + y^2)^2"),
];

fn energy(c: &mut Criterion) {
    let mut group = c.benchmark_group("energy");
    group.sample_size(10);
    for k in [10, 12] {
        let a = gen_ap(0.5, 0.0, Scale::new(k).unwrap()).unwrap();
        for (name, src) in POLYS {
            let p = parse_poly2(src).unwrap();
            group.bench_with_input(BenchmarkId::new(name, k), &a, |b, a| {
                b.iter(|| energy_count(&p, a, a, None).unwrap())
            });
        }
    }
    group.finish();
}

fn image(c: &mut Criterion) {
    let mut group = c.benchmark_group("image");
    for k in [10, 14] {
        let a = gen_ap(0.5, 0.0, Scale::new(k).unwrap()).unwrap();
        for (name, src) in POLYS {
            let p = parse_poly2(src).unwrap();
            group.bench_with_input(BenchmarkId::new(name, k), &a, |b, a| {
                b.iter(|| image_set(&p, a, a).unwrap().count())
            });
        }
    }
    group.finish();
}

fn classify(c: &mut Criterion) {
    let mut group = c.benchmark_group("classify");
    for (name, src) in [
        ("composite", "(x^2 + y^3)^3 + 2*(x^2 + y^3)"),
        ("expander", "x^2 + x*y + y^2"),
        ("octic", "x + y + (x^2 + y^2)^4"),
    ] {
        let p = parse_poly2(src).unwrap();
        group.bench_function(name, |b| b.iter(|| classify_special_form(black_box(&p))));
    }
    group.finish();
}

criterion_group!(benches, energy, image, classify);
criterion_main!(benches);
