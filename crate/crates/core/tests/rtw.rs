mod common;

use noise_verify::bits::SignVector;
use noise_verify::rtw::{
    check_equal_relations, componentwise_product, rtw_hyperspace_product, EqualRelations, FingerprintAccumulator,
    RtwError,
};
use noise_verify::{compute_k, fingerprint, fingerprint_k, hash_digest, BitString, CoinSeed, CoinTable, RtwSequence, Sign};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::naive_fingerprint;

fn seq(v: &[i8]) -> RtwSequence {
    RtwSequence::from_i8s(v).unwrap()
}

fn strings(length: usize) -> Vec<Vec<i8>> {
    (0..1u32 << length)
        .map(|n| (0..length).map(|i| if n >> i & 1 == 1 { -1 } else { 1 }).collect())
        .collect()
}

#[test]
fn compute_k_values() {
    assert_eq!(compute_k(0.25), Ok(3));
    assert_eq!(compute_k(0.5), Ok(2));
    assert_eq!(compute_k(0.3), Ok(2));
    assert_eq!(compute_k(1e-25), Ok(84));
    assert_eq!(compute_k(1.1e-25), Ok(83));
    for bad in [0.0, 1.0, -0.1, 2.0, f64::NAN] {
        assert!(matches!(compute_k(bad), Err(RtwError::EpsilonDomain(_))));
    }
}

#[test]
fn compute_k_strict_against_log() {
    // Smallest integer strictly above log2(1/eps), away from exact powers.
    for eps in [0.1f64, 0.01, 3e-7, 1e-12, 7.7e-40] {
        let bound = -eps.log2();
        let k = compute_k(eps).unwrap();
        assert!(k as f64 > bound && (k - 1) as f64 <= bound, "{eps}");
        assert!(0.5f64.powi(k as i32) < eps);
    }
}

#[test]
fn componentwise_examples() {
    assert_eq!(componentwise_product(&seq(&[1, -1]), &seq(&[-1, -1])).unwrap(), seq(&[-1, 1]));
    let a = seq(&[1, -1, -1, 1, -1]);
    assert_eq!(componentwise_product(&a, &a).unwrap(), seq(&[1; 5]));
    assert_eq!(componentwise_product(&a, &seq(&[1; 5])).unwrap(), a);
    assert!(componentwise_product(&a, &seq(&[1; 4])).is_err());
}

#[test]
fn hyperspace_product_examples() {
    let a = seq(&[1, -1, -1]);
    assert_eq!(rtw_hyperspace_product(std::slice::from_ref(&a)).unwrap(), a);
    assert_eq!(rtw_hyperspace_product(&[a.clone(), a.clone(), a.clone(), a.clone()]).unwrap(), seq(&[1; 3]));
    assert!(rtw_hyperspace_product(&[]).is_err());
}

#[test]
fn hyperspace_product_orthogonal_to_factors() {
    let coins = CoinSeed::from_u64(12);
    let n = 10_000;
    let factors: Vec<RtwSequence> = (1..=3).map(|i| RtwSequence::derive(&coins, i, Sign::Plus, n)).collect();
    let w = rtw_hyperspace_product(&factors).unwrap();
    for f in &factors {
        let rho = w.values().mean_product(f.values());
        assert!(rho.abs() <= 0.04, "{rho}");
    }
}

#[test]
fn hand_examples() {
    // R_{1,+1} = (+1,+1,+1): s = (+1) gives exactly that sequence.
    let t = CoinTable::from_index(1, 3, 0);
    let fp = fingerprint_k(&BitString::from_i8s(&[1]).unwrap(), &t, 3);
    assert_eq!(fp.values().to_i8s(), vec![1, 1, 1]);

    // R_{1,-1} = (+1,-1), R_{2,+1} = (-1,-1); s = (-1,+1) gives (-1,+1).
    let index = 1 << 1 | 1 << 6 | 1 << 7;
    let t = CoinTable::from_index(2, 2, index);
    assert_eq!(t.get(1, Sign::Minus, 1), Sign::Plus);
    assert_eq!(t.get(1, Sign::Minus, 2), Sign::Minus);
    assert_eq!(t.get(2, Sign::Plus, 1), Sign::Minus);
    assert_eq!(t.get(2, Sign::Plus, 2), Sign::Minus);
    let fp = fingerprint_k(&BitString::from_i8s(&[-1, 1]).unwrap(), &t, 2);
    assert_eq!(fp.values().to_i8s(), vec![-1, 1]);
}

#[test]
fn empty_string_is_all_plus() {
    let coins = CoinSeed::from_u64(1);
    let fp = fingerprint(&BitString::from_i8s(&[]).unwrap(), &coins, 0.01).unwrap();
    assert_eq!(fp.k(), 7);
    assert!(fp.values().is_all_plus());
    assert_eq!(hash_digest(b"", &coins, 8).unwrap().to_string(), "ff");
    assert_eq!(hash_digest(b"", &coins, 12).unwrap().to_string(), "fff0");
}

#[test]
fn fingerprint_matches_naive_definition() {
    let coins = CoinSeed::from_u64(31);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for length in [1, 2, 63, 64, 65, 200] {
        for k in [1, 7, 64, 65, 130] {
            let s: Vec<i8> = (0..length).map(|_| if rng.gen() { 1 } else { -1 }).collect();
            let fast = fingerprint_k(&BitString::from_i8s(&s).unwrap(), &coins, k);
            assert_eq!(fast.values().to_i8s(), naive_fingerprint(&coins, &s, k), "L={length} k={k}");
        }
    }
}

#[test]
fn digest_of_bytes_uses_msb_first_bit_one_plus() {
    let coins = CoinSeed::from_u64(9);
    // 0b1000_0001: +1, then six -1, then +1.
    let s = BitString::from_i8s(&[1, -1, -1, -1, -1, -1, -1, 1]).unwrap();
    let fp = fingerprint_k(&s, &coins, 16);
    let mut packed = Vec::new();
    for chunk in fp.values().to_i8s().chunks(8) {
        let mut byte = 0u8;
        for (i, &v) in chunk.iter().enumerate() {
            if v == 1 {
                byte |= 0x80 >> i;
            }
        }
        packed.push(byte);
    }
    assert_eq!(hash_digest(&[0x81], &coins, 16).unwrap().as_bytes(), packed.as_slice());
}

#[test]
fn exact_per_component_law() {
    // For every unequal pair and every component, exactly half of all coin
    // tables make that component agree.
    for (length, k) in [(1, 1), (1, 2), (2, 1), (2, 2), (3, 1), (3, 2)] {
        let tables: Vec<CoinTable> = (0..1u64 << (2 * length * k))
            .map(|i| CoinTable::from_index(length, k, i))
            .collect();
        let all = strings(length);
        for s in &all {
            let fs: Vec<Vec<i8>> = tables.iter().map(|t| naive_fingerprint(t, s, k)).collect();
            for t in &all {
                let ft: Vec<Vec<i8>> = tables.iter().map(|tb| naive_fingerprint(tb, t, k)).collect();
                for j in 0..k {
                    let agree = fs.iter().zip(&ft).filter(|(a, b)| a[j] == b[j]).count();
                    if s == t {
                        assert_eq!(agree, tables.len());
                    } else {
                        assert_eq!(2 * agree, tables.len(), "L={length} k={k} j={j}");
                    }
                }
                // Whole-fingerprint agreement: exactly 2^-k of the tables.
                let whole = fs.iter().zip(&ft).filter(|(a, b)| a == b).count();
                if s != t {
                    assert_eq!(whole << k, tables.len());
                }
            }
        }
    }
}

fn binomial_ok(hits: u64, trials: u64, p: f64) -> bool {
    let rate = hits as f64 / trials as f64;
    (rate - p).abs() <= 3.0 * (p * (1.0 - p) / trials as f64).sqrt()
}

#[test]
fn different_lengths_collide_at_two_to_minus_k() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let trials = 100_000u64;
    let mut hits = [0u64; 4];
    let a = BitString::from_i8s(&[1, -1, 1]).unwrap();
    let b = BitString::from_i8s(&[1, -1, 1, 1, -1]).unwrap();
    for _ in 0..trials {
        let coins = CoinSeed::random(&mut rng);
        let fa = fingerprint_k(&a, &coins, 4);
        let fb = fingerprint_k(&b, &coins, 4);
        for (k, h) in (1..=4).zip(hits.iter_mut()) {
            if fa.prefix(k).values() == fb.prefix(k).values() {
                *h += 1;
            }
        }
    }
    for (k, &h) in (1..=4).zip(&hits) {
        assert!(binomial_ok(h, trials, 0.5f64.powi(k)), "k={k}: {h}");
    }
}

#[test]
fn permutations_distinguished() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let trials = 100_000u64;
    let a = BitString::from_i8s(&[1, 1, -1, -1, 1]).unwrap();
    let b = BitString::from_i8s(&[-1, 1, 1, -1, 1]).unwrap();
    let mut hits = 0;
    for _ in 0..trials {
        let coins = CoinSeed::random(&mut rng);
        if fingerprint_k(&a, &coins, 3).values() == fingerprint_k(&b, &coins, 3).values() {
            hits += 1;
        }
    }
    assert!(binomial_ok(hits, trials, 0.125), "{hits}");
}

#[test]
fn digest_collisions_at_k16() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let pairs = 1_000_000u64;
    let mut hits = 0;
    for _ in 0..pairs {
        let coins = CoinSeed::random(&mut rng);
        let x: [u8; 8] = rng.gen();
        let mut y: [u8; 8] = rng.gen();
        while y == x {
            y = rng.gen();
        }
        if hash_digest(&x, &coins, 16).unwrap() == hash_digest(&y, &coins, 16).unwrap() {
            hits += 1;
        }
    }
    assert!(binomial_ok(hits, pairs, 0.5f64.powi(16)), "{hits}");
}

#[test]
fn relation_forms_agree_on_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let coins = CoinSeed::from_u64(8);
    for _ in 0..10_000 {
        let k = rng.gen_range(1..100);
        let a = fingerprint_k(&BitString::from_i8s(&[if rng.gen() { 1 } else { -1 }]).unwrap(), &coins, k);
        let mut v = a.values().to_i8s();
        if rng.gen() {
            let j = rng.gen_range(0..k);
            v[j] = -v[j];
        }
        let b = noise_verify::RtwFingerprint::new(SignVector::from_i8s(&v).unwrap(), a.seed_id(), None);
        let expected = if v == a.values().to_i8s() { EqualRelations::Holds } else { EqualRelations::Violated };
        assert_eq!(check_equal_relations(&a, &b), Ok(expected));
    }
}

#[test]
fn relations_reject_k_mismatch() {
    let coins = CoinSeed::from_u64(1);
    let s = BitString::from_i8s(&[1]).unwrap();
    assert!(check_equal_relations(&fingerprint_k(&s, &coins, 3), &fingerprint_k(&s, &coins, 4)).is_err());
}

proptest! {
    #[test]
    fn streaming_equals_batch(bytes in proptest::collection::vec(any::<u8>(), 0..64), k in 1usize..100, seed in any::<u64>()) {
        let coins = CoinSeed::from_u64(seed);
        let mut acc = FingerprintAccumulator::new(&coins, k);
        acc.push_reader(bytes.as_slice()).unwrap();
        prop_assert_eq!(acc.positions(), 8 * bytes.len() as u64);
        let streamed = acc.finish(None);
        let s = BitString::from_bytes(&bytes);
        let batch = fingerprint_k(&s, &coins, k);
        prop_assert_eq!(streamed.values(), batch.values());
    }

    #[test]
    fn equal_strings_always_hold(bits in proptest::collection::vec(any::<bool>(), 0..300), seed in any::<u64>(), k in 1usize..200) {
        let coins = CoinSeed::from_u64(seed);
        let s = BitString::from_signs(bits.iter().map(|&b| Sign::from_bit(b)));
        let t = BitString::from_signs(bits.iter().map(|&b| Sign::from_bit(b)));
        prop_assert_eq!(check_equal_relations(&fingerprint_k(&s, &coins, k), &fingerprint_k(&t, &coins, k)), Ok(EqualRelations::Holds));
    }

    #[test]
    fn prefix_is_smaller_k(bits in proptest::collection::vec(any::<bool>(), 1..100), seed in any::<u64>(), k in 1usize..150, cut in 1usize..150) {
        let cut = cut.min(k);
        let coins = CoinSeed::from_u64(seed);
        let s = BitString::from_signs(bits.iter().map(|&b| Sign::from_bit(b)));
        let long = fingerprint_k(&s, &coins, k);
        let short = fingerprint_k(&s, &coins, cut);
        let prefix = long.prefix(cut);
        prop_assert_eq!(prefix.values(), short.values());
    }
}
