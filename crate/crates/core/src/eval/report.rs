use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::manifest::AnnotatedSegment;
use super::metrics::{bleu, chrf, MetricScore};
use super::tokenize::Tokenizer;
use super::EvalError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupBy {
    Domain,
    UserType,
    Topic,
}

impl std::str::FromStr for GroupBy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "domain" => Ok(GroupBy::Domain),
            "user_type" | "user-type" => Ok(GroupBy::UserType),
            "topic" => Ok(GroupBy::Topic),
            other => Err(format!("cannot group by {other:?}")),
        }
    }
}

pub const COMET_UNSUPPORTED: &str = "unsupported";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub group: String,
    pub segments: usize,
    pub bleu: MetricScore,
    pub chrf: MetricScore,
    /// Always [`COMET_UNSUPPORTED`]; the column is kept so tables keep their shape.
    pub comet: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub group_by: GroupBy,
    pub tokenizer: Tokenizer,
    /// One row per group value present in the test set, then `ALL`.
    pub rows: Vec<ReportRow>,
}

/// Scores `hypotheses` (keyed by segment id) per group and over the whole
/// test set. The `ALL` row is a corpus-level score, not a mean of groups.
pub fn stratified_report(
    hypotheses: &[(String, String)],
    test_set: &[AnnotatedSegment],
    group_by: GroupBy,
    tokenizer: Tokenizer,
) -> Result<Report, EvalError> {
    let by_id: HashMap<&str, &str> = hypotheses.iter().map(|(id, t)| (id.as_str(), t.as_str())).collect();
    if by_id.len() != hypotheses.len() || by_id.len() != test_set.len() {
        return Err(EvalError::IdMismatch(format!(
            "{} hypotheses ({} distinct ids) for {} test segments",
            hypotheses.len(),
            by_id.len(),
            test_set.len()
        )));
    }
    let mut aligned = Vec::with_capacity(test_set.len());
    for seg in test_set {
        match by_id.get(seg.id.as_str()) {
            Some(h) => aligned.push(*h),
            None => return Err(EvalError::IdMismatch(format!("no hypothesis for id {:?}", seg.id))),
        }
    }

    let mut groups: BTreeMap<(usize, &'static str), Vec<usize>> = BTreeMap::new();
    for (i, seg) in test_set.iter().enumerate() {
        groups.entry(group_key(seg, group_by)).or_default().push(i);
    }
    let row = |name: String, members: &[usize]| -> Result<ReportRow, EvalError> {
        let hyps: Vec<&str> = members.iter().map(|&i| aligned[i]).collect();
        let refs: Vec<&str> = members.iter().map(|&i| test_set[i].reference.as_str()).collect();
        Ok(ReportRow {
            group: name,
            segments: members.len(),
            bleu: bleu(&hyps, &refs, tokenizer)?,
            chrf: chrf(&hyps, &refs)?,
            comet: COMET_UNSUPPORTED.into(),
        })
    };
    let mut rows = Vec::with_capacity(groups.len() + 1);
    for ((_, name), members) in &groups {
        rows.push(row(name.to_string(), members)?);
    }
    let all: Vec<usize> = (0..test_set.len()).collect();
    rows.push(row("ALL".into(), &all)?);
    Ok(Report { group_by, tokenizer, rows })
}

/// Vocabulary position first, so rows come out in a fixed order.
fn group_key(seg: &AnnotatedSegment, group_by: GroupBy) -> (usize, &'static str) {
    fn position<T: PartialEq>(all: &[T], v: &T) -> usize {
        all.iter().position(|x| x == v).unwrap_or(usize::MAX)
    }
    use super::manifest::{Domain, Topic, UserType};
    match group_by {
        GroupBy::Domain => (position(Domain::ALL, &seg.domain), seg.domain.as_str()),
        GroupBy::UserType => (position(UserType::ALL, &seg.user_type), seg.user_type.as_str()),
        GroupBy::Topic => (position(Topic::ALL, &seg.topic), seg.topic.as_str()),
    }
}

impl Report {
    pub fn row(&self, group: &str) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.group == group)
    }

    /// Aligned plain-text table.
    pub fn render_text(&self) -> String {
        let width = self.rows.iter().map(|r| r.group.chars().count()).max().unwrap_or(0).max(5);
        let mut out = String::new();
        let _ = writeln!(out, "{:<width$}  {:>8}  {:>6}  {:>6}  {:>11}", "group", "segments", "BLEU", "chrF", "COMET");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:<width$}  {:>8}  {:>6.1}  {:>6.1}  {:>11}",
                r.group, r.segments, r.bleu.value, r.chrf.value, r.comet
            );
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
