use std::collections::HashMap;
use std::hash::Hash;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tokenize::Tokenizer;
use super::EvalError;

pub const BLEU_ORDER: usize = 4;
pub const CHRF_ORDER: usize = 6;
pub const CHRF_BETA: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Bleu,
    Chrf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BleuComponents {
    pub precisions: [f64; BLEU_ORDER],
    pub matches: [u64; BLEU_ORDER],
    pub totals: [u64; BLEU_ORDER],
    pub brevity_penalty: f64,
    pub hyp_len: u64,
    pub ref_len: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChrfComponents {
    /// Character n-gram precision averaged over effective orders, in [0, 1].
    pub chrp: f64,
    pub chrr: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Components {
    Bleu(BleuComponents),
    Chrf(ChrfComponents),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricScore {
    pub metric: Metric,
    /// On the 0–100 scale.
    pub value: f64,
    pub components: Components,
}

fn check_lengths(hyps: usize, refs: usize) -> Result<(), EvalError> {
    if hyps == refs {
        Ok(())
    } else {
        Err(EvalError::LengthMismatch { hypotheses: hyps, references: refs })
    }
}

fn counts<T: Eq + Hash + Clone>(items: &[T], n: usize) -> HashMap<&[T], u64> {
    let mut map = HashMap::new();
    if items.len() >= n {
        for window in items.windows(n) {
            *map.entry(window).or_insert(0) += 1;
        }
    }
    map
}

/// Clipped matches and hypothesis n-gram total for one order.
fn clipped<T: Eq + Hash + Clone>(hyp: &[T], reference: &[T], n: usize) -> (u64, u64) {
    let hyp_counts = counts(hyp, n);
    let ref_counts = counts(reference, n);
    let matches = hyp_counts.iter().map(|(g, c)| (*c).min(ref_counts.get(g).copied().unwrap_or(0))).sum();
    (matches, hyp.len().saturating_sub(n - 1) as u64)
}

#[derive(Debug, Clone, Copy, Default)]
struct BleuStats {
    matches: [u64; BLEU_ORDER],
    totals: [u64; BLEU_ORDER],
    hyp_len: u64,
    ref_len: u64,
}

impl BleuStats {
    fn add(mut self, other: BleuStats) -> BleuStats {
        for n in 0..BLEU_ORDER {
            self.matches[n] += other.matches[n];
            self.totals[n] += other.totals[n];
        }
        self.hyp_len += other.hyp_len;
        self.ref_len += other.ref_len;
        self
    }
}

/// Corpus BLEU with a single reference, uniform weights up to order 4 and
/// no smoothing. Orders for which the hypotheses contain no n-grams at all
/// are left out of the geometric mean, so a corpus of short segments scored
/// against itself still gets 100.
pub fn bleu<H: AsRef<str> + Sync, R: AsRef<str> + Sync>(
    hypotheses: &[H],
    references: &[R],
    tokenizer: Tokenizer,
) -> Result<MetricScore, EvalError> {
    check_lengths(hypotheses.len(), references.len())?;
    if references.iter().all(|r| r.as_ref().trim().is_empty()) {
        return Err(EvalError::EmptyReferences);
    }
    let stats = hypotheses
        .par_iter()
        .zip(references.par_iter())
        .map(|(h, r)| {
            let hyp = tokenizer.tokenize(h.as_ref());
            let reference = tokenizer.tokenize(r.as_ref());
            let mut s = BleuStats { hyp_len: hyp.len() as u64, ref_len: reference.len() as u64, ..Default::default() };
            for n in 1..=BLEU_ORDER {
                let (m, t) = clipped(&hyp, &reference, n);
                s.matches[n - 1] = m;
                s.totals[n - 1] = t;
            }
            s
        })
        .reduce(BleuStats::default, BleuStats::add);
    Ok(bleu_from_stats(&stats))
}

fn bleu_from_stats(s: &BleuStats) -> MetricScore {
    let mut precisions = [0.0; BLEU_ORDER];
    for n in 0..BLEU_ORDER {
        if s.totals[n] > 0 {
            precisions[n] = s.matches[n] as f64 / s.totals[n] as f64;
        }
    }
    let brevity_penalty = if s.hyp_len == 0 {
        0.0
    } else if s.hyp_len > s.ref_len {
        1.0
    } else {
        (1.0 - s.ref_len as f64 / s.hyp_len as f64).exp()
    };
    let effective = s.totals.iter().take_while(|&&t| t > 0).count();
    let value = if effective > 0 && precisions[..effective].iter().all(|&p| p > 0.0) {
        let log_mean = precisions[..effective].iter().map(|p| p.ln()).sum::<f64>() / effective as f64;
        100.0 * brevity_penalty * log_mean.exp()
    } else {
        0.0
    };
    MetricScore {
        metric: Metric::Bleu,
        value,
        components: Components::Bleu(BleuComponents {
            precisions,
            matches: s.matches,
            totals: s.totals,
            brevity_penalty,
            hyp_len: s.hyp_len,
            ref_len: s.ref_len,
        }),
    }
}

/// Per order: hypothesis n-grams, reference n-grams, matches.
type ChrfStats = [[u64; 3]; CHRF_ORDER];

fn add_chrf(mut a: ChrfStats, b: ChrfStats) -> ChrfStats {
    for n in 0..CHRF_ORDER {
        for k in 0..3 {
            a[n][k] += b[n][k];
        }
    }
    a
}

/// Corpus chrF with character n-grams up to order 6, β = 2 and whitespace
/// removed. Statistics are summed over the corpus; precision and recall are
/// averaged over the orders present on both sides and then combined.
pub fn chrf<H: AsRef<str> + Sync, R: AsRef<str> + Sync>(hypotheses: &[H], references: &[R]) -> Result<MetricScore, EvalError> {
    check_lengths(hypotheses.len(), references.len())?;
    let stats = hypotheses
        .par_iter()
        .zip(references.par_iter())
        .map(|(h, r)| {
            let hyp: Vec<char> = h.as_ref().chars().filter(|c| !c.is_whitespace()).collect();
            let reference: Vec<char> = r.as_ref().chars().filter(|c| !c.is_whitespace()).collect();
            let mut s = [[0u64; 3]; CHRF_ORDER];
            for n in 1..=CHRF_ORDER {
                let (matches, hyp_total) = clipped(&hyp, &reference, n);
                s[n - 1] = [hyp_total, reference.len().saturating_sub(n - 1) as u64, matches];
            }
            s
        })
        .reduce(|| [[0u64; 3]; CHRF_ORDER], add_chrf);
    Ok(chrf_from_stats(&stats, CHRF_BETA))
}

fn chrf_from_stats(stats: &ChrfStats, beta: f64) -> MetricScore {
    let (mut precision, mut recall, mut effective) = (0.0, 0.0, 0usize);
    for &[hyp, reference, matches] in stats {
        if hyp > 0 {
            precision += matches as f64 / hyp as f64;
        }
        if reference > 0 {
            recall += matches as f64 / reference as f64;
        }
        if hyp > 0 && reference > 0 {
            effective += 1;
        }
    }
    let (chrp, chrr) = if effective == 0 { (0.0, 0.0) } else { (precision / effective as f64, recall / effective as f64) };
    let factor = beta * beta;
    let value = if chrp + chrr > 0.0 { 100.0 * (1.0 + factor) * chrp * chrr / (factor * chrp + chrr) } else { 0.0 };
    MetricScore { metric: Metric::Chrf, value, components: Components::Chrf(ChrfComponents { chrp, chrr, beta }) }
}
