//! Naive reference scorers used as test oracles. They share no code with
//! the library: n-grams are materialized as vectors and counted by linear
//! scans.

#![allow(dead_code)]

fn ngrams<T: Clone>(items: &[T], n: usize) -> Vec<Vec<T>> {
    let mut out = Vec::new();
    let mut i = 0;
    while i + n <= items.len() {
        out.push(items[i..i + n].to_vec());
        i += 1;
    }
    out
}

fn occurrences<T: PartialEq>(list: &[Vec<T>], gram: &[T]) -> u64 {
    list.iter().filter(|g| g.as_slice() == gram).count() as u64
}

fn clipped_matches<T: PartialEq + Clone>(hyp: &[Vec<T>], reference: &[Vec<T>]) -> u64 {
    let mut distinct: Vec<Vec<T>> = Vec::new();
    for g in hyp {
        if !distinct.contains(g) {
            distinct.push(g.clone());
        }
    }
    distinct.iter().map(|g| occurrences(hyp, g).min(occurrences(reference, g))).sum()
}

/// BLEU over whitespace tokens: order 4, no smoothing, orders with no
/// hypothesis n-grams dropped from the geometric mean.
pub fn bleu(hyps: &[String], refs: &[String]) -> f64 {
    let mut matches = [0u64; 4];
    let mut totals = [0u64; 4];
    let (mut c, mut r) = (0u64, 0u64);
    for (h, rf) in hyps.iter().zip(refs) {
        let ht: Vec<String> = h.split_whitespace().map(String::from).collect();
        let rt: Vec<String> = rf.split_whitespace().map(String::from).collect();
        c += ht.len() as u64;
        r += rt.len() as u64;
        for n in 1..=4 {
            let hg = ngrams(&ht, n);
            let rg = ngrams(&rt, n);
            matches[n - 1] += clipped_matches(&hg, &rg);
            totals[n - 1] += hg.len() as u64;
        }
    }
    let mut order = 0;
    while order < 4 && totals[order] > 0 {
        order += 1;
    }
    if order == 0 {
        return 0.0;
    }
    let mut log_sum = 0.0;
    for n in 0..order {
        if matches[n] == 0 {
            return 0.0;
        }
        log_sum += (matches[n] as f64 / totals[n] as f64).ln();
    }
    let bp = if c > r { 1.0 } else { (1.0 - r as f64 / c as f64).exp() };
    100.0 * bp * (log_sum / order as f64).exp()
}

/// chrF with character n-grams 1..=6, beta 2, whitespace dropped; corpus
/// statistics summed, P and R averaged over orders seen on both sides.
pub fn chrf(hyps: &[String], refs: &[String]) -> f64 {
    let mut stats = [[0u64; 3]; 6];
    for (h, rf) in hyps.iter().zip(refs) {
        let hc: Vec<char> = h.chars().filter(|c| !c.is_whitespace()).collect();
        let rc: Vec<char> = rf.chars().filter(|c| !c.is_whitespace()).collect();
        for n in 1..=6 {
            let hg = ngrams(&hc, n);
            let rg = ngrams(&rc, n);
            stats[n - 1][0] += hg.len() as u64;
            stats[n - 1][1] += rg.len() as u64;
            stats[n - 1][2] += clipped_matches(&hg, &rg);
        }
    }
    let (mut p, mut rc, mut k) = (0.0, 0.0, 0.0);
    for [h, r, m] in stats {
        if h > 0 {
            p += m as f64 / h as f64;
        }
        if r > 0 {
            rc += m as f64 / r as f64;
        }
        if h > 0 && r > 0 {
            k += 1.0;
        }
    }
    if k == 0.0 {
        return 0.0;
    }
    let (p, rc) = (p / k, rc / k);
    if p + rc == 0.0 {
        return 0.0;
    }
    100.0 * 5.0 * p * rc / (4.0 * p + rc)
}

/// Small-vocabulary random corpus so that n-gram overlaps are frequent.
pub fn random_corpus(rng: &mut impl rand::Rng, segments: usize) -> (Vec<String>, Vec<String>) {
    const WORDS: &[&str] = &["a", "b", "ab", "já", "ty", "dům", "хата", "мій", "the", "cat", "ba"];
    let sentence = |rng: &mut dyn rand::RngCore, min: usize| -> String {
        let len = rand::Rng::random_range(rng, min..=12);
        (0..len).map(|_| WORDS[rand::Rng::random_range(rng, 0..WORDS.len())]).collect::<Vec<_>>().join(" ")
    };
    let mut hyps = Vec::new();
    let mut refs = Vec::new();
    for _ in 0..segments {
        let reference = sentence(rng, 1);
        // half the hypotheses are edits of the reference, half unrelated
        let hyp = if rng.random_bool(0.5) {
            let mut words: Vec<&str> = reference.split(' ').collect();
            if !words.is_empty() && rng.random_bool(0.7) {
                let i = rng.random_range(0..words.len());
                words[i] = WORDS[rng.random_range(0..WORDS.len())];
            }
            words.join(" ")
        } else {
            sentence(rng, 0)
        };
        hyps.push(hyp);
        refs.push(reference);
    }
    (hyps, refs)
}
