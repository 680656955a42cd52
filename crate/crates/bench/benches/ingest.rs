use criterion::{black_box, criterion_group, criterion_main, Criterion};

use forestjudge::fixtures::{B6_TEXT, W14_TEXT};
use forestjudge::{build_incidence, parse_all, Grammar, HeadTable, DEFAULT_MAX_ANALYSES};

fn parsing(c: &mut Criterion) {
    let g = Grammar::bundled();
    for (name, text) in [("b6", B6_TEXT), ("w14", W14_TEXT)] {
        let s = g.tokenize(name, text).unwrap();
        c.bench_function(&format!("parse_all/{name}"), |b| {
            b.iter(|| black_box(parse_all(&s, &g, DEFAULT_MAX_ANALYSES).unwrap()))
        });
        let analyses = parse_all(&s, &g, DEFAULT_MAX_ANALYSES).unwrap();
        let heads = HeadTable::new();
        c.bench_function(&format!("build_incidence/{name}"), |b| {
            b.iter(|| black_box(build_incidence(&analyses, &s, &heads).unwrap()))
        });
    }
}

criterion_group!(benches, parsing);
criterion_main!(benches);
