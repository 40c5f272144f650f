use super::blocks::{plan_blocks, BlockPlan, Ratio};
use super::filter::{filter_corpus, RuleSet};
use super::{CorpusError, ParallelPair};
use crate::backends::{BackendError, BackendPool, TranslationRoute};
use crate::lang::Lang;
use crate::textproc::Segment;

/// A back-translation round stopped by a backend failure. Pairs for
/// sentences before `cursor` are kept; resume from `cursor`.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("back-translation stopped at sentence {cursor}: {error}")]
pub struct Interrupted {
    pub cursor: usize,
    pub done: Vec<ParallelPair>,
    pub error: BackendError,
}

/// Turns target-side monolingual sentences into synthetic pairs, starting at
/// `start` and sending `batch_size` sentences at a time to `translate`
/// (target → source).
pub fn backtranslate_round<F>(
    monolingual: &[String],
    start: usize,
    batch_size: usize,
    origin: &str,
    mut translate: F,
) -> Result<Vec<ParallelPair>, Interrupted>
where
    F: FnMut(&[String]) -> Result<Vec<String>, BackendError>,
{
    let batch_size = batch_size.max(1);
    let mut done = Vec::new();
    let mut cursor = start.min(monolingual.len());
    while cursor < monolingual.len() {
        let end = (cursor + batch_size).min(monolingual.len());
        let batch = &monolingual[cursor..end];
        match translate(batch) {
            Ok(outputs) if outputs.len() == batch.len() => {
                for (src, tgt) in outputs.iter().zip(batch) {
                    // a side that normalizes to nothing yields no pair
                    if let Some(pair) = ParallelPair::new(src, tgt, origin, false) {
                        done.push(pair);
                    }
                }
                cursor = end;
            }
            Ok(outputs) => {
                let error = BackendError::Unavailable {
                    backend: origin.to_string(),
                    reason: format!("{} outputs for {} inputs", outputs.len(), batch.len()),
                    retry_after: None,
                };
                return Err(Interrupted { cursor, done, error });
            }
            Err(error) => return Err(Interrupted { cursor, done, error }),
        }
    }
    Ok(done)
}

/// Adapter translating with a resolved route of a [`BackendPool`].
pub fn pool_translator<'a>(
    pool: &'a BackendPool,
    route: &'a TranslationRoute,
) -> impl FnMut(&[String]) -> Result<Vec<String>, BackendError> + 'a {
    move |texts: &[String]| {
        let segments: Vec<Segment> =
            texts.iter().enumerate().map(|(i, t)| Segment::new(t.clone(), route.src.clone(), i)).collect();
        Ok(pool.translate(route, &segments)?.into_iter().map(|s| s.text).collect())
    }
}

/// Called between planning and back-translation; real training is out of
/// scope here.
pub trait TrainingHook {
    fn train(&mut self, round: usize, plan: &BlockPlan, authentic: &[ParallelPair], synthetic: &[ParallelPair]);
}

#[derive(Debug, Default)]
pub struct NoTraining;

impl TrainingHook for NoTraining {
    fn train(&mut self, _: usize, _: &BlockPlan, _: &[ParallelPair], _: &[ParallelPair]) {}
}

#[derive(Debug, Clone)]
pub struct IterationConfig {
    pub rounds: usize,
    pub block_size: usize,
    pub ratio: Ratio,
    pub batch_size: usize,
    pub rules: RuleSet,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundSummary {
    pub round: usize,
    pub authentic_kept: usize,
    pub synthetic_kept: usize,
    pub plan: BlockPlan,
    pub synthetic_produced: usize,
}

/// Iterated back-translation: filter → plan → train → back-translate with
/// the current backend, repeated `rounds` times. Synthetic data of a round
/// replaces that of the previous one.
pub fn iterate<F, H>(
    authentic: &[ParallelPair],
    monolingual: &[String],
    config: &IterationConfig,
    mut translate: F,
    hook: &mut H,
) -> Result<Vec<RoundSummary>, CorpusError>
where
    F: FnMut(&[String]) -> Result<Vec<String>, BackendError>,
    H: TrainingHook,
{
    let keep = |pairs: &[ParallelPair]| -> Vec<ParallelPair> {
        pairs.iter().zip(filter_corpus(pairs, &config.rules)).filter(|(_, v)| v.kept).map(|(p, _)| p.clone()).collect()
    };
    let authentic = keep(authentic);
    let mut synthetic: Vec<ParallelPair> = Vec::new();
    let mut summaries = Vec::new();
    for round in 0..config.rounds {
        let synthetic_kept = keep(&synthetic);
        let plan = plan_blocks(authentic.len(), synthetic_kept.len(), config.block_size, config.ratio)?;
        hook.train(round, &plan, &authentic, &synthetic_kept);
        synthetic = backtranslate_round(monolingual, 0, config.batch_size, "backtranslation", &mut translate)
            .map_err(|e| CorpusError::Backend { cursor: e.cursor, error: e.error })?;
        summaries.push(RoundSummary {
            round,
            authentic_kept: authentic.len(),
            synthetic_kept: synthetic_kept.len(),
            plan,
            synthetic_produced: synthetic.len(),
        });
    }
    Ok(summaries)
}

/// The target → source route used for back-translation of `tgt` text.
pub fn backtranslation_route(pool: &BackendPool, src: &Lang, tgt: &Lang) -> Result<TranslationRoute, BackendError> {
    pool.resolve_route(tgt, src, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backends::BackendRegistry;

    fn pool() -> BackendPool {
        BackendPool::from_registry(BackendRegistry::cs_uk_dictionary()).unwrap()
    }

    fn texts(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn toy_backend_round() {
        let pool = pool();
        let route = backtranslation_route(&pool, &Lang::cs(), &Lang::uk()).unwrap();
        let mono = texts(&["холодна зима", "Я хвора.", "Добрий день"]);
        let pairs = backtranslate_round(&mono, 0, 2, "news", pool_translator(&pool, &route)).unwrap();
        assert_eq!(pairs.len(), 3);
        assert!(pairs.iter().all(|p| !p.authentic));
        assert_eq!((pairs[0].src.as_str(), pairs[0].tgt.as_str()), ("chladná zima", "холодна зима"));
        assert_eq!(pairs[2].tgt, "Добрий день");
        assert!(backtranslate_round(&[], 0, 2, "news", pool_translator(&pool, &route)).unwrap().is_empty());
    }

    #[test]
    fn failure_gives_resumable_cursor() {
        let mono = texts(&["a", "b", "c", "d", "e"]);
        let mut calls = 0;
        let flaky = |batch: &[String]| {
            calls += 1;
            if calls == 2 {
                Err(BackendError::Unavailable { backend: "x".into(), reason: "down".into(), retry_after: None })
            } else {
                Ok(batch.iter().map(|s| s.to_uppercase()).collect())
            }
        };
        let err = backtranslate_round(&mono, 0, 2, "m", flaky).unwrap_err();
        assert_eq!(err.cursor, 2);
        assert_eq!(err.done.len(), 2);
        let rest = backtranslate_round(&mono, err.cursor, 2, "m", |b: &[String]| Ok(b.to_vec())).unwrap();
        let all: Vec<String> = err.done.iter().chain(&rest).map(|p| p.tgt.clone()).collect();
        assert_eq!(all, mono);
    }

    #[test]
    fn iterated_driver_calls_hook_each_round() {
        struct Count(Vec<(usize, usize)>);
        impl TrainingHook for Count {
            fn train(&mut self, round: usize, _: &BlockPlan, _: &[ParallelPair], s: &[ParallelPair]) {
                self.0.push((round, s.len()));
            }
        }
        let pool = pool();
        let route = backtranslation_route(&pool, &Lang::cs(), &Lang::uk()).unwrap();
        let authentic = vec![ParallelPair::new("chladná zima", "холодна зима", "a", true).unwrap()];
        let mono = texts(&["холодна зима", "Я хвора."]);
        let config = IterationConfig {
            rounds: 3,
            block_size: 10,
            ratio: Ratio { authentic: 1, synthetic: 1 },
            batch_size: 8,
            rules: RuleSet::default(),
        };
        let mut hook = Count(Vec::new());
        let summaries = iterate(&authentic, &mono, &config, pool_translator(&pool, &route), &mut hook).unwrap();
        assert_eq!(summaries.len(), 3);
        assert_eq!(hook.0, [(0, 0), (1, 2), (2, 2)]);
        assert_eq!(summaries[1].plan.to_string(), "[A1, S2]");
        let _ = NoTraining;
    }
}
