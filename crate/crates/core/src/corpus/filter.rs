use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use rayon::prelude::*;
use regex::Regex;
use serde::{Deserialize, Serialize};

use super::{CorpusError, ParallelPair};
use crate::lang::Lang;
use crate::textproc::script::{is_cyrillic_letter, is_latin_letter};
use crate::textproc::Script;

pub const LENGTH_RATIO: &str = "length-ratio";
pub const SCRIPT_CONSISTENCY: &str = "script-consistency";
pub const NUMBER_CONSISTENCY: &str = "number-consistency";
pub const ENTITY_PATTERN: &str = "entity-pattern";
pub const COPY_DETECTION: &str = "copy-detection";

pub const DEFAULT_RULES: [&str; 5] = [LENGTH_RATIO, SCRIPT_CONSISTENCY, NUMBER_CONSISTENCY, ENTITY_PATTERN, COPY_DETECTION];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterVerdict {
    pub kept: bool,
    /// Ids of the failed rules, sorted.
    pub failed: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PatternAction {
    /// Fail when `src` matches the source side or `tgt` matches the target.
    Reject,
    /// Fail when exactly one of `src` (on the source) and `tgt` (on the
    /// target) matches: a named entity on one side must appear on the other.
    RequirePair,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternRuleConfig {
    pub id: String,
    pub action: PatternAction,
    #[serde(default)]
    pub src: Option<String>,
    #[serde(default)]
    pub tgt: Option<String>,
}

/// The rules file format.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RulesConfig {
    pub src_script: Option<Script>,
    pub tgt_script: Option<Script>,
    /// Upper bound of the character-length ratio; the lower bound is its inverse.
    pub length_ratio_max: Option<f64>,
    pub entity_slack: Option<usize>,
    /// Default rules to switch off.
    pub disable: Vec<String>,
    pub pattern: Vec<PatternRuleConfig>,
}

#[derive(Debug, Clone)]
struct PatternRule {
    id: String,
    action: PatternAction,
    src: Option<Regex>,
    tgt: Option<Regex>,
}

#[derive(Debug, Clone)]
pub struct RuleSet {
    pub src_script: Script,
    pub tgt_script: Script,
    pub length_ratio_max: f64,
    pub entity_slack: usize,
    enabled: BTreeSet<&'static str>,
    patterns: Vec<PatternRule>,
}

impl Default for RuleSet {
    /// Defaults for Czech source and Ukrainian target.
    fn default() -> Self {
        RuleSet {
            src_script: Script::Latin,
            tgt_script: Script::Cyrillic,
            length_ratio_max: 3.0,
            entity_slack: 1,
            enabled: DEFAULT_RULES.into_iter().collect(),
            patterns: Vec::new(),
        }
    }
}

impl RuleSet {
    /// Default rules with the scripts of `src` and `tgt`.
    pub fn for_pair(src: &Lang, tgt: &Lang) -> Self {
        RuleSet {
            src_script: src.native_script().unwrap_or(Script::Latin),
            tgt_script: tgt.native_script().unwrap_or(Script::Cyrillic),
            ..RuleSet::default()
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, CorpusError> {
        let text = std::fs::read_to_string(path.as_ref())?;
        Self::from_toml(&text)
    }

    pub fn from_toml(text: &str) -> Result<Self, CorpusError> {
        let config: RulesConfig = toml::from_str(text).map_err(|e| CorpusError::Rules(e.to_string()))?;
        Self::from_config(config)
    }

    pub fn from_config(config: RulesConfig) -> Result<Self, CorpusError> {
        let mut rules = RuleSet::default();
        if let Some(s) = config.src_script {
            rules.src_script = s;
        }
        if let Some(s) = config.tgt_script {
            rules.tgt_script = s;
        }
        if let Some(max) = config.length_ratio_max {
            if !(max >= 1.0 && max.is_finite()) {
                return Err(CorpusError::Rules(format!("length_ratio_max must be a finite number >= 1, got {max}")));
            }
            rules.length_ratio_max = max;
        }
        if let Some(slack) = config.entity_slack {
            rules.entity_slack = slack;
        }
        for id in &config.disable {
            if !rules.enabled.iter().any(|r| r == id) {
                return Err(CorpusError::Rules(format!("cannot disable unknown rule {id:?}")));
            }
            rules.enabled.retain(|r| r != id);
        }
        let compile = |id: &str, p: &Option<String>| -> Result<Option<Regex>, CorpusError> {
            p.as_deref()
                .map(|p| Regex::new(p).map_err(|e| CorpusError::Rules(format!("rule {id}: {e}"))))
                .transpose()
        };
        let mut ids: BTreeSet<String> = DEFAULT_RULES.iter().map(|s| s.to_string()).collect();
        for p in config.pattern {
            if !ids.insert(p.id.clone()) {
                return Err(CorpusError::Rules(format!("duplicate rule id {:?}", p.id)));
            }
            if p.src.is_none() && p.tgt.is_none() {
                return Err(CorpusError::Rules(format!("rule {}: needs src or tgt pattern", p.id)));
            }
            rules.patterns.push(PatternRule {
                src: compile(&p.id, &p.src)?,
                tgt: compile(&p.id, &p.tgt)?,
                id: p.id,
                action: p.action,
            });
        }
        Ok(rules)
    }

    /// Ids of every enabled rule, sorted.
    pub fn rule_ids(&self) -> Vec<String> {
        let mut ids: Vec<String> = self.enabled.iter().map(|s| s.to_string()).collect();
        ids.extend(self.patterns.iter().map(|p| p.id.clone()));
        ids.sort();
        ids
    }
}

fn script_holds(text: &str, expected: Script) -> bool {
    let latin = text.chars().filter(|&c| is_latin_letter(c)).count();
    let cyrillic = text.chars().filter(|&c| is_cyrillic_letter(c)).count();
    if latin == 0 && cyrillic == 0 {
        return true;
    }
    match expected {
        Script::Latin => latin > cyrillic,
        Script::Cyrillic => cyrillic > latin,
        Script::Mixed | Script::Neutral => true,
    }
}

fn digit_runs(text: &str) -> Vec<&str> {
    let mut runs = Vec::new();
    let mut start = None;
    for (i, c) in text.char_indices() {
        match (c.is_ascii_digit(), start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                runs.push(&text[s..i]);
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        runs.push(&text[s..]);
    }
    runs.sort_unstable();
    runs
}

fn capitalized_tokens(text: &str) -> usize {
    text.split_whitespace()
        .filter(|t| t.chars().find(|c| c.is_alphanumeric()).is_some_and(char::is_uppercase))
        .count()
}

/// Evaluates every enabled rule on one pair.
pub fn filter_pair(pair: &ParallelPair, rules: &RuleSet) -> FilterVerdict {
    let (src, tgt) = (pair.src.as_str(), pair.tgt.as_str());
    let mut failed: Vec<String> = Vec::new();
    let on = |id: &str| rules.enabled.contains(id);

    if on(LENGTH_RATIO) {
        let (s, t) = (src.chars().count() as f64, tgt.chars().count() as f64);
        if s > rules.length_ratio_max * t || t > rules.length_ratio_max * s {
            failed.push(LENGTH_RATIO.into());
        }
    }
    if on(SCRIPT_CONSISTENCY) && !(script_holds(src, rules.src_script) && script_holds(tgt, rules.tgt_script)) {
        failed.push(SCRIPT_CONSISTENCY.into());
    }
    if on(NUMBER_CONSISTENCY) && digit_runs(src) != digit_runs(tgt) {
        failed.push(NUMBER_CONSISTENCY.into());
    }
    if on(ENTITY_PATTERN) && capitalized_tokens(src).abs_diff(capitalized_tokens(tgt)) > rules.entity_slack {
        failed.push(ENTITY_PATTERN.into());
    }
    if on(COPY_DETECTION) && src == tgt {
        failed.push(COPY_DETECTION.into());
    }
    for rule in &rules.patterns {
        let src_hit = rule.src.as_ref().map(|r| r.is_match(src));
        let tgt_hit = rule.tgt.as_ref().map(|r| r.is_match(tgt));
        let fails = match rule.action {
            PatternAction::Reject => src_hit == Some(true) || tgt_hit == Some(true),
            PatternAction::RequirePair => src_hit.unwrap_or(false) != tgt_hit.unwrap_or(false),
        };
        if fails {
            failed.push(rule.id.clone());
        }
    }
    failed.sort();
    FilterVerdict { kept: failed.is_empty(), failed }
}

/// Filters in parallel; verdicts come back in input order.
pub fn filter_corpus(pairs: &[ParallelPair], rules: &RuleSet) -> Vec<FilterVerdict> {
    pairs.par_iter().map(|p| filter_pair(p, rules)).collect()
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct FilterReport {
    pub pairs: usize,
    pub kept: usize,
    /// Rejections per rule id; a pair failing two rules counts for both.
    pub rejections: BTreeMap<String, usize>,
}

impl FilterReport {
    pub fn new(rules: &RuleSet, verdicts: &[FilterVerdict]) -> Self {
        let mut rejections: BTreeMap<String, usize> = rules.rule_ids().into_iter().map(|id| (id, 0)).collect();
        for v in verdicts {
            for id in &v.failed {
                *rejections.entry(id.clone()).or_default() += 1;
            }
        }
        FilterReport { pairs: verdicts.len(), kept: verdicts.iter().filter(|v| v.kept).count(), rejections }
    }

    /// `rule<TAB>rejected` lines followed by the pair totals.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("rule\trejected\n");
        for (id, n) in &self.rejections {
            out.push_str(&format!("{id}\t{n}\n"));
        }
        out.push_str(&format!("#pairs\t{}\n#kept\t{}\n", self.pairs, self.kept));
        out
    }
}
