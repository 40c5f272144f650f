#[path = "support/oracle.rs"]
mod oracle;

use prekladac_core::eval::{bleu, chrf, Tokenizer};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;


#[test]
fn bleu_and_chrf_match_naive_oracle() {
    for seed in 0..200u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(1..8);
        let (hyps, refs) = oracle::random_corpus(&mut rng, n);
        let b = bleu(&hyps, &refs, Tokenizer::Whitespace).unwrap().value;
        let c = chrf(&hyps, &refs).unwrap().value;
        assert!((b - oracle::bleu(&hyps, &refs)).abs() < 1e-6, "seed {seed}: bleu {b}");
        assert!((c - oracle::chrf(&hyps, &refs)).abs() < 1e-6, "seed {seed}: chrf {c}");
    }
}

#[test]
fn oracle_agrees_on_hand_cases() {
    let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    assert!((oracle::chrf(&s(&["abcd"]), &s(&["abce"])) - 100.0 * 23.0 / 48.0).abs() < 1e-9);
    assert_eq!(oracle::bleu(&s(&["x y z w"]), &s(&["x y z w"])), 100.0);
}

#[test]
fn identity_scores_100() {
    for seed in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let (_, refs) = oracle::random_corpus(&mut rng, 5);
        assert_eq!(bleu(&refs, &refs, Tokenizer::Mteval13a).unwrap().value, 100.0);
        assert_eq!(chrf(&refs, &refs).unwrap().value, 100.0);
    }
}

#[test]
fn replacing_a_word_lowers_bleu() {
    let trials = 200;
    let mut decreased = 0;
    for seed in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(5000 + seed);
        let (_, refs) = oracle::random_corpus(&mut rng, 8);
        // system-like output: references with an occasional wrong word
        let mut hyps = refs.clone();
        for h in hyps.iter_mut() {
            if rng.random_bool(0.1) {
                let mut words: Vec<&str> = h.split(' ').collect();
                let k = rng.random_range(0..words.len());
                words[k] = "jiné";
                *h = words.join(" ");
            }
        }
        let before = bleu(&hyps, &refs, Tokenizer::Whitespace).unwrap().value;
        let candidates: Vec<usize> = (0..hyps.len()).filter(|&i| !hyps[i].is_empty()).collect();
        let i = candidates[rng.random_range(0..candidates.len())];
        let mut words: Vec<String> = hyps[i].split(' ').map(String::from).collect();
        let j = rng.random_range(0..words.len());
        words[j] = "nesmysl".into();
        hyps[i] = words.join(" ");
        let after = bleu(&hyps, &refs, Tokenizer::Whitespace).unwrap().value;
        if after < before {
            decreased += 1;
        }
    }
    assert!(decreased * 100 >= trials * 95, "{decreased}/{trials}");
}
