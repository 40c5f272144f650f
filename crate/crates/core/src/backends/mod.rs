//! The translation backend contract, the backend registry, and route
//! resolution between direct and pivot translation.
//!
//! A [`TranslationRoute`] is either a single backend for the requested pair
//! or a composition of two backends through a pivot language (English by
//! default). The dictionary backend makes the difference observable: pivoting
//! through English drops grammatical gender and politeness.

mod dictionary;
mod remote;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use serde::{Deserialize, Serialize};

pub use dictionary::{
    DictionaryBackend, FeatureKey, FeatureValue, Features, Lexicon, LexiconError, TaggedToken, TextPiece,
};
pub use remote::{remote_translate, EndpointConfig, RemoteBackend, RemoteError, WireRequest, WireResponse};

use crate::lang::Lang;
use crate::textproc::Segment;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BackendError {
    #[error("backend {backend} unavailable: {reason}")]
    Unavailable {
        backend: String,
        reason: String,
        /// Suggested delay before retrying, when the backend gave one.
        retry_after: Option<Duration>,
    },
    #[error("unsupported language pair {src}→{tgt}")]
    UnsupportedPair { src: Lang, tgt: Lang },
    #[error("backend {0} is not registered")]
    UnknownBackend(String),
    #[error("segment {index} is {found}, route expects {expected}")]
    LanguageMismatch { index: usize, expected: Lang, found: Lang },
    #[error("backend {0} is not a dictionary backend")]
    NotDictionary(String),
}

/// Anything that can translate a batch of sentences for a language pair.
///
/// Implementations return exactly one output per input, in input order.
pub trait TranslationBackend: Send + Sync {
    fn translate_batch(&self, src: &Lang, tgt: &Lang, texts: &[String]) -> Result<Vec<String>, BackendError>;
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BackendKind {
    /// Toy lexicon backend; `lexicon` defaults to the shipped file.
    Dictionary {
        #[serde(default)]
        lexicon: Option<PathBuf>,
    },
    Remote(EndpointConfig),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BackendDescriptor {
    pub id: String,
    #[serde(flatten)]
    pub kind: BackendKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum RouteKind {
    Direct { backend: String },
    Pivot { first: String, pivot: Lang, second: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslationRoute {
    pub src: Lang,
    pub tgt: Lang,
    #[serde(flatten)]
    pub kind: RouteKind,
}

impl TranslationRoute {
    pub fn is_pivot(&self) -> bool {
        matches!(self.kind, RouteKind::Pivot { .. })
    }

    /// The (src, tgt, backend id) legs of the route, in application order.
    pub fn legs(&self) -> Vec<(Lang, Lang, &str)> {
        match &self.kind {
            RouteKind::Direct { backend } => vec![(self.src.clone(), self.tgt.clone(), backend.as_str())],
            RouteKind::Pivot { first, pivot, second } => vec![
                (self.src.clone(), pivot.clone(), first.as_str()),
                (pivot.clone(), self.tgt.clone(), second.as_str()),
            ],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RegistryError {
    #[error("a backend is already registered for {src}→{tgt}")]
    DuplicatePair { src: Lang, tgt: Lang },
    #[error("backend id {0} is registered with two different configurations")]
    ConflictingId(String),
    #[error("source and target language are both {0}")]
    SameLanguage(Lang),
}

/// Which backend serves each ordered language pair. At most one backend per
/// pair; one backend may serve several pairs.
#[derive(Debug, Clone)]
pub struct BackendRegistry {
    pivot: Lang,
    pairs: BTreeMap<(Lang, Lang), BackendDescriptor>,
}

impl Default for BackendRegistry {
    fn default() -> Self {
        BackendRegistry::new(Lang::en())
    }
}

impl BackendRegistry {
    pub fn new(pivot: Lang) -> Self {
        BackendRegistry {
            pivot,
            pairs: BTreeMap::new(),
        }
    }

    /// The default deployment: the toy dictionary for cs↔uk.
    pub fn cs_uk_dictionary() -> Self {
        let mut registry = BackendRegistry::default();
        let toy = BackendDescriptor {
            id: "toy".into(),
            kind: BackendKind::Dictionary { lexicon: None },
        };
        registry.register(Lang::cs(), Lang::uk(), toy.clone()).expect("fresh registry");
        registry.register(Lang::uk(), Lang::cs(), toy).expect("fresh registry");
        registry
    }

    pub fn pivot(&self) -> &Lang {
        &self.pivot
    }

    pub fn register(&mut self, src: Lang, tgt: Lang, descriptor: BackendDescriptor) -> Result<(), RegistryError> {
        if src == tgt {
            return Err(RegistryError::SameLanguage(src));
        }
        if self.pairs.values().any(|d| d.id == descriptor.id && d.kind != descriptor.kind) {
            return Err(RegistryError::ConflictingId(descriptor.id));
        }
        if self.pairs.contains_key(&(src.clone(), tgt.clone())) {
            return Err(RegistryError::DuplicatePair { src, tgt });
        }
        self.pairs.insert((src, tgt), descriptor);
        Ok(())
    }

    pub fn get(&self, src: &Lang, tgt: &Lang) -> Option<&BackendDescriptor> {
        self.pairs.get(&(src.clone(), tgt.clone()))
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&Lang, &Lang, &BackendDescriptor)> {
        self.pairs.iter().map(|((s, t), d)| (s, t, d))
    }

    pub fn languages(&self) -> BTreeSet<Lang> {
        self.pairs.keys().flat_map(|(s, t)| [s.clone(), t.clone()]).collect()
    }

    pub fn descriptors(&self) -> BTreeMap<&str, &BackendDescriptor> {
        self.pairs.values().map(|d| (d.id.as_str(), d)).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Direct route if the pair is registered; otherwise, when allowed, a
    /// pivot through the registry's pivot language.
    pub fn resolve_route(&self, src: &Lang, tgt: &Lang, allow_pivot: bool) -> Result<TranslationRoute, BackendError> {
        let unsupported = || BackendError::UnsupportedPair {
            src: src.clone(),
            tgt: tgt.clone(),
        };
        if src == tgt {
            return Err(unsupported());
        }
        if let Some(direct) = self.get(src, tgt) {
            return Ok(TranslationRoute {
                src: src.clone(),
                tgt: tgt.clone(),
                kind: RouteKind::Direct {
                    backend: direct.id.clone(),
                },
            });
        }
        if !allow_pivot || &self.pivot == src || &self.pivot == tgt {
            return Err(unsupported());
        }
        match (self.get(src, &self.pivot), self.get(&self.pivot, tgt)) {
            (Some(first), Some(second)) => Ok(TranslationRoute {
                src: src.clone(),
                tgt: tgt.clone(),
                kind: RouteKind::Pivot {
                    first: first.id.clone(),
                    pivot: self.pivot.clone(),
                    second: second.id.clone(),
                },
            }),
            _ => Err(unsupported()),
        }
    }

    /// Every ordered pair reachable directly or, if allowed, via the pivot.
    pub fn available_routes(&self, allow_pivot: bool) -> Vec<TranslationRoute> {
        let langs = self.languages();
        let mut routes = Vec::new();
        for src in &langs {
            for tgt in &langs {
                if let Ok(route) = self.resolve_route(src, tgt, allow_pivot) {
                    routes.push(route);
                }
            }
        }
        routes
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PoolError {
    #[error("loading lexicon for backend {id}: {source}")]
    Lexicon { id: String, source: LexiconError },
}

/// Instantiated backends for a registry.
#[derive(Clone)]
pub struct BackendPool {
    registry: BackendRegistry,
    backends: HashMap<String, Arc<dyn TranslationBackend>>,
    dictionaries: HashMap<String, Arc<DictionaryBackend>>,
}

impl std::fmt::Debug for BackendPool {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BackendPool")
            .field("registry", &self.registry)
            .field("backends", &self.backends.keys().collect::<Vec<_>>())
            .finish()
    }
}

impl BackendPool {
    pub fn from_registry(registry: BackendRegistry) -> Result<Self, PoolError> {
        let mut backends: HashMap<String, Arc<dyn TranslationBackend>> = HashMap::new();
        let mut dictionaries = HashMap::new();
        for (id, descriptor) in registry.descriptors() {
            match &descriptor.kind {
                BackendKind::Dictionary { lexicon } => {
                    let lexicon = match lexicon {
                        Some(path) => Lexicon::load(path).map_err(|source| PoolError::Lexicon {
                            id: id.to_string(),
                            source,
                        })?,
                        None => Lexicon::shipped().clone(),
                    };
                    let backend = Arc::new(DictionaryBackend::new(lexicon));
                    dictionaries.insert(id.to_string(), backend.clone());
                    backends.insert(id.to_string(), backend);
                }
                BackendKind::Remote(config) => {
                    backends.insert(id.to_string(), Arc::new(RemoteBackend::new(id, config.clone())));
                }
            }
        }
        Ok(BackendPool {
            registry,
            backends,
            dictionaries,
        })
    }

    /// Registers an already constructed backend under `id`, replacing any
    /// instance created from the registry.
    pub fn with_backend(mut self, id: &str, backend: Arc<dyn TranslationBackend>) -> Self {
        self.dictionaries.remove(id);
        self.backends.insert(id.to_string(), backend);
        self
    }

    pub fn registry(&self) -> &BackendRegistry {
        &self.registry
    }

    pub fn backend(&self, id: &str) -> Result<&Arc<dyn TranslationBackend>, BackendError> {
        self.backends.get(id).ok_or_else(|| BackendError::UnknownBackend(id.to_string()))
    }

    pub fn resolve_route(&self, src: &Lang, tgt: &Lang, allow_pivot: bool) -> Result<TranslationRoute, BackendError> {
        self.registry.resolve_route(src, tgt, allow_pivot)
    }

    /// Word-level lookup through a dictionary backend.
    pub fn dictionary_lookup(&self, backend_id: &str, token: &TaggedToken, tgt: &Lang) -> Result<TaggedToken, BackendError> {
        match self.dictionaries.get(backend_id) {
            Some(dict) => Ok(dict.lookup(token, tgt)),
            None if self.backends.contains_key(backend_id) => Err(BackendError::NotDictionary(backend_id.to_string())),
            None => Err(BackendError::UnknownBackend(backend_id.to_string())),
        }
    }

    /// Translates `segments` along `route`; output is index-aligned with the
    /// input and tagged with the target language.
    pub fn translate(&self, route: &TranslationRoute, segments: &[Segment]) -> Result<Vec<Segment>, BackendError> {
        if let Some(bad) = segments.iter().find(|s| s.lang != route.src) {
            return Err(BackendError::LanguageMismatch {
                index: bad.index,
                expected: route.src.clone(),
                found: bad.lang.clone(),
            });
        }
        let mut texts: Vec<String> = segments.iter().map(|s| s.text.clone()).collect();
        for (src, tgt, id) in route.legs() {
            if texts.is_empty() {
                break;
            }
            let out = self.backend(id)?.translate_batch(&src, &tgt, &texts)?;
            if out.len() != texts.len() {
                return Err(BackendError::Unavailable {
                    backend: id.to_string(),
                    reason: format!("returned {} outputs for {} inputs", out.len(), texts.len()),
                    retry_after: None,
                });
            }
            texts = out;
        }
        Ok(segments
            .iter()
            .zip(texts)
            .map(|(seg, text)| Segment::new(text, route.tgt.clone(), seg.index))
            .collect())
    }
}
