//! The direct-versus-pivot fixture: "Jsem nemocná. A co Vy?" from Czech to
//! Ukrainian, directly and through English.

#![allow(dead_code)]

use prekladac_core::backends::{
    BackendDescriptor, BackendKind, BackendPool, BackendRegistry, DictionaryBackend, FeatureKey, Features, TextPiece,
};
use prekladac_core::{Lang, Segment};

pub const SOURCE: &str = "Jsem nemocná. A co Vy?";
pub const DIRECT: &str = "Я хвора. А що Ви?";
pub const PIVOT: &str = "Я хворий. А ти?";

pub struct Outcome {
    pub source_features: Features,
    pub direct_text: String,
    pub direct_features: Features,
    pub pivot_text: String,
    pub pivot_features: Features,
    /// Same two translations, produced through resolved pool routes.
    pub routed_direct: String,
    pub routed_pivot: String,
}

/// Gender and politeness carried by any token of the text.
pub fn carried(pieces: &[TextPiece]) -> Features {
    pieces
        .iter()
        .filter_map(|p| match p {
            TextPiece::Token(t) => Some(t.features.restrict_to(&[FeatureKey::Gender, FeatureKey::Politeness])),
            TextPiece::Separator(_) => None,
        })
        .fold(Features::new(), |acc, f| acc.union(&f))
}

fn text(pieces: &[TextPiece]) -> String {
    pieces.iter().map(TextPiece::text).collect()
}

fn registry(direct: bool) -> BackendRegistry {
    let toy = BackendDescriptor { id: "toy".into(), kind: BackendKind::Dictionary { lexicon: None } };
    let mut registry = BackendRegistry::new(Lang::en());
    let pairs = if direct { vec![(Lang::cs(), Lang::uk())] } else { vec![(Lang::cs(), Lang::en()), (Lang::en(), Lang::uk())] };
    for (s, t) in pairs {
        registry.register(s, t, toy.clone()).unwrap();
    }
    registry
}

fn routed(direct: bool) -> String {
    let pool = BackendPool::from_registry(registry(direct)).unwrap();
    let route = pool.resolve_route(&Lang::cs(), &Lang::uk(), true).unwrap();
    assert_eq!(route.is_pivot(), !direct);
    let segments: Vec<Segment> = prekladac_core::textproc::segment_sentences(SOURCE, &Lang::cs());
    let out = pool.translate(&route, &segments).unwrap();
    out.iter().map(|s| s.text.as_str()).collect::<Vec<_>>().join(" ")
}

pub fn run() -> Outcome {
    let backend = DictionaryBackend::shipped();
    let source = backend.analyze(SOURCE, &Lang::cs());
    let direct = backend.translate_tagged(SOURCE, &Lang::cs(), &Lang::uk());
    let english = backend.translate_tagged(SOURCE, &Lang::cs(), &Lang::en());
    let pivot = backend.translate_tagged(&text(&english), &Lang::en(), &Lang::uk());
    Outcome {
        source_features: carried(&source),
        direct_text: text(&direct),
        direct_features: carried(&direct),
        pivot_text: text(&pivot),
        pivot_features: carried(&pivot),
        routed_direct: routed(true),
        routed_pivot: routed(false),
    }
}

/// The features the source sentence must carry: feminine speaker, formal
/// addressee.
pub fn expected_source_features() -> Features {
    "gender=F,politeness=formal".parse().unwrap()
}

pub fn is_strict_subset(small: &Features, big: &Features) -> bool {
    small.is_subset(big) && small != big
}
