use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use tsop_core::automaton::build_automaton_with;
use tsop_core::oracle::legal_states_oracle_with;
use tsop_core::par::Exec;
use tsop_core::spec::{parse_spec, ObjectSpec};

/// `k` independent futures shuffled into one object: 10^k legal states out
/// of 16^k raw tuples.
fn futures(k: usize) -> ObjectSpec {
    let protocol: Vec<String> = (0..k)
        .map(|i| format!("(*get{i} . (EMPTY{i} . put{i} + FULL{i}))"))
        .collect();
    let mut text = format!("object Futures{k}\nprotocol {}\n", protocol.join(" . "));
    for i in 0..k {
        text.push_str(&format!(
            "state EMPTY{i}()\nstate FULL{i}(x)\noperation put{i}(x)\noperation get{i}() returns value\n\
             reaction EMPTY{i} & put{i}(x) -> FULL{i}(x)\n\
             reaction FULL{i}(x) & get{i}() -> FULL{i}(x), return x\n\
             init EMPTY{i}()\n"
        ));
    }
    parse_spec(&text).expect("synthetic spec is valid")
}

fn modes() -> [(&'static str, Exec); 2] {
    [
        ("sequential", Exec::Sequential),
        ("parallel", Exec::Parallel),
    ]
}

fn build(c: &mut Criterion) {
    let mut group = c.benchmark_group("build_automaton");
    group.sample_size(10);
    for k in [2, 3, 4] {
        let spec = futures(k);
        for (name, exec) in modes() {
            group.bench_with_input(BenchmarkId::new(name, k), &spec, |b, spec| {
                b.iter(|| build_automaton_with(spec, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("legal_states_oracle");
    group.sample_size(10);
    for k in [2, 3, 4] {
        let spec = futures(k);
        for (name, exec) in modes() {
            group.bench_with_input(BenchmarkId::new(name, k), &spec, |b, spec| {
                b.iter(|| legal_states_oracle_with(spec, exec).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, build, oracle);
criterion_main!(benches);
