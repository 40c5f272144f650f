//! Usage records and their per-day, per-direction aggregation.

use std::collections::BTreeMap;
use std::io::BufRead;

use chrono::{DateTime, Duration, NaiveDate, Utc};
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::lang::Lang;

/// One logged translation request. Only requests made with logging consent
/// ever produce a record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UsageRecord {
    pub timestamp: DateTime<Utc>,
    pub src: Lang,
    pub tgt: Lang,
    /// Sum of the input text lengths in Unicode scalar values.
    pub chars: u64,
    pub segments: u64,
    pub consent: bool,
}

impl UsageRecord {
    pub fn for_texts(timestamp: DateTime<Utc>, src: Lang, tgt: Lang, texts: &[String], segments: u64) -> Self {
        UsageRecord {
            timestamp,
            src,
            tgt,
            chars: texts.iter().map(|t| t.chars().count() as u64).sum(),
            segments,
            consent: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DailyStats {
    pub date: NaiveDate,
    pub src: Lang,
    pub tgt: Lang,
    pub requests: u64,
    pub characters: u64,
    /// Exact mean characters per request; zero when there are no requests.
    pub mean: Ratio<u64>,
}

impl DailyStats {
    pub fn mean_f64(&self) -> f64 {
        *self.mean.numer() as f64 / *self.mean.denom() as f64
    }
}

impl Serialize for DailyStats {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("DailyStats", 7)?;
        s.serialize_field("date", &self.date)?;
        s.serialize_field("src", &self.src)?;
        s.serialize_field("tgt", &self.tgt)?;
        s.serialize_field("requests", &self.requests)?;
        s.serialize_field("characters", &self.characters)?;
        s.serialize_field("mean", &self.mean_f64())?;
        s.serialize_field("mean_exact", &self.mean.to_string())?;
        s.end()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct StatsReport {
    pub days: Vec<DailyStats>,
    /// Lines that did not parse as a usage record.
    pub corrupt: u64,
}

/// Inclusive date range; `None` bounds are open.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DateRange {
    pub from: Option<NaiveDate>,
    pub to: Option<NaiveDate>,
}

impl DateRange {
    pub fn all() -> Self {
        DateRange::default()
    }

    pub fn contains(&self, date: NaiveDate) -> bool {
        self.from.is_none_or(|f| date >= f) && self.to.is_none_or(|t| date <= t)
    }
}

/// Aggregates already-parsed records. Records without consent are ignored.
pub fn aggregate_records<I>(records: I, range: DateRange) -> Vec<DailyStats>
where
    I: IntoIterator<Item = UsageRecord>,
{
    let mut groups: BTreeMap<(NaiveDate, Lang, Lang), (u64, u64)> = BTreeMap::new();
    for record in records {
        let date = record.timestamp.date_naive();
        if !record.consent || !range.contains(date) {
            continue;
        }
        let slot = groups.entry((date, record.src, record.tgt)).or_default();
        slot.0 += 1;
        slot.1 += record.chars;
    }
    groups
        .into_iter()
        .map(|((date, src, tgt), (requests, characters))| DailyStats {
            date,
            src,
            tgt,
            requests,
            characters,
            mean: if requests == 0 { Ratio::from_integer(0) } else { Ratio::new(characters, requests) },
        })
        .collect()
}

/// Aggregates a JSON-lines usage log. Extra fields on a line (client id,
/// logged texts) are ignored; lines that are not records are counted.
pub fn aggregate_stats<R: BufRead>(log: R, range: DateRange) -> StatsReport {
    let mut corrupt = 0;
    let mut records = Vec::new();
    for line in log.lines() {
        let Ok(line) = line else {
            corrupt += 1;
            continue;
        };
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<UsageRecord>(&line) {
            Ok(record) => records.push(record),
            Err(_) => corrupt += 1,
        }
    }
    StatsReport { days: aggregate_records(records, range), corrupt }
}

/// One direction of synthetic traffic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Flow {
    pub src: Lang,
    pub tgt: Lang,
    pub per_day: u64,
    pub mean_chars: u64,
}

/// Generator of a synthetic usage log with exactly known totals.
///
/// Request lengths come in pairs `mean - d`, `mean + d` with a random `d`,
/// so every day of every flow sums to exactly `per_day * mean_chars`.
#[derive(Debug, Clone)]
pub struct SyntheticMonth {
    pub start: NaiveDate,
    pub days: u32,
    pub flows: Vec<Flow>,
    pub seed: u64,
}

impl SyntheticMonth {
    /// 30 days with 30,000 uk→cs requests at 66 characters and 12,000 cs→uk
    /// requests at 83 characters per day.
    pub fn reference(seed: u64) -> Self {
        SyntheticMonth {
            start: NaiveDate::from_ymd_opt(2023, 6, 1).expect("valid date"),
            days: 30,
            flows: vec![
                Flow { src: Lang::uk(), tgt: Lang::cs(), per_day: 30_000, mean_chars: 66 },
                Flow { src: Lang::cs(), tgt: Lang::uk(), per_day: 12_000, mean_chars: 83 },
            ],
            seed,
        }
    }

    /// Expected character total of one flow over the whole month.
    pub fn expected_characters(&self, flow: &Flow) -> u64 {
        flow.per_day * flow.mean_chars * self.days as u64
    }

    /// Records of one day in timestamp order.
    pub fn day(&self, day: u32) -> Vec<UsageRecord> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ ((day as u64) << 32));
        let date = self.start + Duration::days(day as i64);
        let midnight = date.and_hms_opt(0, 0, 0).expect("valid time").and_utc();
        let mut records = Vec::new();
        for flow in &self.flows {
            let spread = flow.mean_chars.saturating_sub(1);
            let mut lengths = Vec::with_capacity(flow.per_day as usize);
            for _ in 0..flow.per_day / 2 {
                let d = rng.random_range(0..=spread);
                lengths.push(flow.mean_chars - d);
                lengths.push(flow.mean_chars + d);
            }
            if flow.per_day % 2 == 1 {
                lengths.push(flow.mean_chars);
            }
            for (i, chars) in lengths.into_iter().enumerate() {
                let offset_ms = (i as u64 * 86_400_000) / flow.per_day;
                records.push(UsageRecord {
                    timestamp: midnight + Duration::milliseconds(offset_ms as i64),
                    src: flow.src.clone(),
                    tgt: flow.tgt.clone(),
                    chars,
                    segments: 1 + chars / 80,
                    consent: true,
                });
            }
        }
        records.sort_by_key(|r| r.timestamp);
        records
    }

    pub fn records(&self) -> impl Iterator<Item = UsageRecord> + '_ {
        (0..self.days).flat_map(move |d| self.day(d))
    }
}
