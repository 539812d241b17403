use criterion::{criterion_group, criterion_main, Criterion};
use mgsat::fixtures::{lexicon_b, lexicon_c, table1};
use mgsat::parser::{parse, validate, ParseOptions};

fn bench(c: &mut Criterion) {
    let corpus = table1();
    let opts = ParseOptions::default();
    let lex = lexicon_c();
    c.bench_function("validate lexicon C on corpus", |b| {
        b.iter(|| corpus.iter().filter(|s| validate(&lex, s, opts)).count())
    });
    let lex_b = lexicon_b();
    let q = &corpus[6];
    c.bench_function("parse question with lexicon B", |b| b.iter(|| parse(&lex_b, &q.tokens, q.kind, opts).len()));
}

criterion_group!(benches, bench);
criterion_main!(benches);
