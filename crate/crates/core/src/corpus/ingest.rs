use std::io::{self, Write};
use std::path::Path;

use super::{CorpusError, ParallelPair};
use crate::textproc::normalize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IngestFormat {
    /// Two files, line `i` of one aligned with line `i` of the other.
    AlignedPlaintext,
    /// One file of `src<TAB>tgt` lines.
    TabSeparated,
}

impl std::str::FromStr for IngestFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "aligned" | "aligned-plaintext" => Ok(IngestFormat::AlignedPlaintext),
            "tsv" | "tab-separated" => Ok(IngestFormat::TabSeparated),
            other => Err(format!("unknown corpus format {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Ingested {
    pub pairs: Vec<ParallelPair>,
    /// Lines that were not valid UTF-8.
    pub undecodable: usize,
    /// TSV lines without exactly two fields.
    pub malformed: usize,
    /// Lines with a side that is empty after normalization.
    pub empty: usize,
}

impl Ingested {
    fn push(&mut self, src: &str, tgt: &str, origin: &str, authentic: bool) {
        match ParallelPair::new(src, tgt, origin, authentic) {
            Some(pair) => self.pairs.push(pair),
            None => self.empty += 1,
        }
    }
}

fn lines(bytes: &[u8]) -> Vec<&[u8]> {
    let bytes = bytes.strip_suffix(b"\n").unwrap_or(bytes);
    if bytes.is_empty() {
        return Vec::new();
    }
    bytes.split(|&b| b == b'\n').map(|l| l.strip_suffix(b"\r").unwrap_or(l)).collect()
}

/// Reads two line-aligned files. Mismatched line counts are fatal; a line
/// pair where either side is not UTF-8 is skipped and counted.
pub fn ingest_aligned(src: impl AsRef<Path>, tgt: impl AsRef<Path>, origin: &str) -> Result<Ingested, CorpusError> {
    let src_bytes = std::fs::read(src.as_ref())?;
    let tgt_bytes = std::fs::read(tgt.as_ref())?;
    parse_aligned(&src_bytes, &tgt_bytes, origin)
}

pub fn parse_aligned(src: &[u8], tgt: &[u8], origin: &str) -> Result<Ingested, CorpusError> {
    let (src_lines, tgt_lines) = (lines(src), lines(tgt));
    if src_lines.len() != tgt_lines.len() {
        return Err(CorpusError::LineCountMismatch { src: src_lines.len(), tgt: tgt_lines.len() });
    }
    let mut out = Ingested::default();
    for (s, t) in src_lines.iter().zip(&tgt_lines) {
        match (std::str::from_utf8(s), std::str::from_utf8(t)) {
            (Ok(s), Ok(t)) => out.push(s, t, origin, true),
            _ => out.undecodable += 1,
        }
    }
    Ok(out)
}

pub fn ingest_tsv(path: impl AsRef<Path>, origin: &str) -> Result<Ingested, CorpusError> {
    Ok(parse_tsv(&std::fs::read(path.as_ref())?, origin))
}

/// Lines with exactly two tab-separated fields become pairs; others are
/// skipped and counted.
pub fn parse_tsv(bytes: &[u8], origin: &str) -> Ingested {
    let mut out = Ingested::default();
    for line in lines(bytes) {
        let Ok(line) = std::str::from_utf8(line) else {
            out.undecodable += 1;
            continue;
        };
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() == 2 {
            out.push(fields[0], fields[1], origin, true);
        } else {
            out.malformed += 1;
        }
    }
    out
}

/// Writes pairs as `src<TAB>tgt` lines; normalized text has no tabs or
/// newlines, so reading the output back gives the same pairs.
pub fn write_tsv<W: Write>(pairs: &[ParallelPair], mut out: W) -> io::Result<()> {
    for pair in pairs {
        writeln!(out, "{}\t{}", normalize(&pair.src), normalize(&pair.tgt))?;
    }
    out.flush()
}
