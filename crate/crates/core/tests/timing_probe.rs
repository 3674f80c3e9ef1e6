mod common;
use common::*;
use rand::Rng;
use std::time::Instant;
use trimat::{canonicalize, classify_all, decode_tensor, FieldSpec};

#[test]
#[ignore]
fn probe_c3_scale() {
    let start = Instant::now();
    let mut overflowed = 0u32;
    for (si, spec) in [
        FieldSpec::rationals(),
        FieldSpec::prime(3).unwrap(),
        FieldSpec::prime(5).unwrap(),
        FieldSpec::prime(7).unwrap(),
        FieldSpec::prime(11).unwrap(),
    ]
    .into_iter()
    .enumerate()
    {
        let mut rng = rng(2026_0000 + si as u64);
        for _ in 0..2000 {
            let dims = [
                rng.gen_range(1..=4usize),
                rng.gen_range(1..=2usize),
                rng.gen_range(1..=2usize),
            ];
            let tensor = random_tensor(&mut rng, spec, dims, 10);
            let cert = random_certificate(&mut rng, spec, dims, 10);
            let moved = tensor.apply_equivalence(&cert).unwrap();
            let before = canonicalize(&tensor).unwrap();
            let after = match canonicalize(&moved) {
                Ok(r) => r,
                Err(e) => {
                    overflowed += 1;
                    println!("err: {e}");
                    continue;
                }
            };
            assert_eq!(before.label, after.label);
            assert_eq!(before.canonical, after.canonical);
        }
        println!("{spec}: cumulative {:?}", start.elapsed());
    }
    println!("total {:?}, failures {overflowed}", start.elapsed());
    assert_eq!(overflowed, 0);
}

#[test]
#[ignore]
fn probe_c1_scale() {
    let spec = FieldSpec::prime(3).unwrap();
    let dims = [3usize, 2, 2];
    let t0 = Instant::now();
    let c = classify_all(spec, dims, 10_000_000).unwrap();
    println!("classify 3x2x2: {:?}, {} orbits", t0.elapsed(), c.orbits.len());
    let t1 = Instant::now();
    let mut count = 0u64;
    for code in 0..c.total {
        let tensor = decode_tensor(spec, dims, code).unwrap();
        let result = canonicalize(&tensor).unwrap();
        std::hint::black_box(&result);
        count += 1;
    }
    println!("canonicalize {} tensors: {:?}", count, t1.elapsed());
}
