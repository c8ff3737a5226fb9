use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::rng::{derive_seed, rng_from};

/// Serialized form of a [`Vocabulary`]. Converting into a vocabulary checks
/// every invariant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VocabularyParts {
    pub entity_categories: Vec<String>,
    pub predicate_categories: Vec<String>,
    pub attribute_categories: Vec<String>,
    pub audio_event_categories: Vec<String>,
    /// Entity index to the attribute indices it may carry. Entities without
    /// an entry carry no attribute.
    #[serde(default)]
    pub attr_compat: BTreeMap<usize, Vec<usize>>,
    /// Audio event index to the entity category that emits it.
    #[serde(default)]
    pub audio_sources: BTreeMap<usize, usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum VocabError {
    Empty(&'static str),
    DuplicateName { list: &'static str, name: String },
    CompatIndex { entity: usize, attribute: Option<usize> },
    AudioIndex { event: usize, entity: usize },
}

impl fmt::Display for VocabError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VocabError::Empty(list) => write!(f, "{list} must not be empty"),
            VocabError::DuplicateName { list, name } => write!(f, "duplicate name {name:?} in {list}"),
            VocabError::CompatIndex { entity, attribute: None } => {
                write!(f, "attr_compat key {entity} is not an entity category")
            }
            VocabError::CompatIndex { entity, attribute: Some(a) } => {
                write!(f, "attr_compat[{entity}] references unknown attribute {a}")
            }
            VocabError::AudioIndex { event, entity } => {
                write!(f, "audio source {event} -> {entity} out of range")
            }
        }
    }
}

/// Category spaces for entities, predicates, attributes and audio events,
/// plus which attributes each entity may carry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "VocabularyParts", into = "VocabularyParts")]
pub struct Vocabulary {
    parts: VocabularyParts,
    compat: Vec<Vec<usize>>,
}

impl TryFrom<VocabularyParts> for Vocabulary {
    type Error = VocabError;

    fn try_from(parts: VocabularyParts) -> Result<Self, Self::Error> {
        Vocabulary::new(parts)
    }
}

impl From<Vocabulary> for VocabularyParts {
    fn from(v: Vocabulary) -> Self {
        v.parts
    }
}

fn check_list(list: &'static str, names: &[String]) -> Result<(), VocabError> {
    if names.is_empty() {
        return Err(VocabError::Empty(list));
    }
    let mut seen = BTreeSet::new();
    for n in names {
        if !seen.insert(n.as_str()) {
            return Err(VocabError::DuplicateName { list, name: n.clone() });
        }
    }
    Ok(())
}

impl Vocabulary {
    pub fn new(mut parts: VocabularyParts) -> Result<Self, VocabError> {
        check_list("entity_categories", &parts.entity_categories)?;
        check_list("predicate_categories", &parts.predicate_categories)?;
        check_list("attribute_categories", &parts.attribute_categories)?;
        check_list("audio_event_categories", &parts.audio_event_categories)?;
        let n_ent = parts.entity_categories.len();
        let n_attr = parts.attribute_categories.len();
        let mut compat = alloc::vec![Vec::new(); n_ent];
        for (&e, attrs) in parts.attr_compat.iter_mut() {
            if e >= n_ent {
                return Err(VocabError::CompatIndex { entity: e, attribute: None });
            }
            if let Some(&a) = attrs.iter().find(|&&a| a >= n_attr) {
                return Err(VocabError::CompatIndex { entity: e, attribute: Some(a) });
            }
            attrs.sort_unstable();
            attrs.dedup();
            compat[e] = attrs.clone();
        }
        for (&ev, &ent) in &parts.audio_sources {
            if ev >= parts.audio_event_categories.len() || ent >= n_ent {
                return Err(VocabError::AudioIndex { event: ev, entity: ent });
            }
        }
        Ok(Self { parts, compat })
    }

    pub fn entity_count(&self) -> usize {
        self.parts.entity_categories.len()
    }

    pub fn predicate_count(&self) -> usize {
        self.parts.predicate_categories.len()
    }

    pub fn attribute_count(&self) -> usize {
        self.parts.attribute_categories.len()
    }

    pub fn audio_event_count(&self) -> usize {
        self.parts.audio_event_categories.len()
    }

    pub fn entity_name(&self, i: usize) -> Option<&str> {
        self.parts.entity_categories.get(i).map(String::as_str)
    }

    pub fn predicate_name(&self, i: usize) -> Option<&str> {
        self.parts.predicate_categories.get(i).map(String::as_str)
    }

    pub fn attribute_name(&self, i: usize) -> Option<&str> {
        self.parts.attribute_categories.get(i).map(String::as_str)
    }

    /// Sorted attribute indices allowed for `entity` (empty when unknown).
    pub fn compatible_attributes(&self, entity: usize) -> &[usize] {
        self.compat.get(entity).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn attribute_allowed(&self, entity: usize, attribute: usize) -> bool {
        self.compatible_attributes(entity).binary_search(&attribute).is_ok()
    }

    /// Entity categories that emit at least one audio event, sorted.
    pub fn audio_emitting_entities(&self) -> Vec<usize> {
        let set: BTreeSet<usize> = self.parts.audio_sources.values().copied().collect();
        set.into_iter().collect()
    }

    pub fn parts(&self) -> &VocabularyParts {
        &self.parts
    }

    /// The built-in vocabulary: 150 entities, 50 predicates, 95 attributes and
    /// 22 audio events. Colors fit every entity; each entity additionally
    /// accepts ten other attributes chosen by a fixed seed.
    pub fn builtin() -> Self {
        let to_vec = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        let entities = to_vec(&ENTITIES);
        let mut attr_compat = BTreeMap::new();
        for e in 0..entities.len() {
            let mut allowed: Vec<usize> = (0..COLOR_COUNT).collect();
            let mut rng = rng_from(derive_seed(0x0a7c_0a7c, &[e as u64]));
            let mut pool: Vec<usize> = (COLOR_COUNT..ATTRIBUTES.len()).collect();
            rand::seq::SliceRandom::shuffle(pool.as_mut_slice(), &mut rng);
            allowed.extend(pool.into_iter().take(10));
            allowed.sort_unstable();
            attr_compat.insert(e, allowed);
        }
        let audio_sources = AUDIO_EVENTS
            .iter()
            .enumerate()
            .map(|(i, (_, src))| {
                let ent = ENTITIES.iter().position(|e| e == src).expect("builtin audio source");
                (i, ent)
            })
            .collect();
        let parts = VocabularyParts {
            entity_categories: entities,
            predicate_categories: to_vec(&PREDICATES),
            attribute_categories: to_vec(&ATTRIBUTES),
            audio_event_categories: AUDIO_EVENTS.iter().map(|(n, _)| n.to_string()).collect(),
            attr_compat,
            audio_sources,
        };
        Self::new(parts).expect("builtin vocabulary is valid")
    }
}

const COLOR_COUNT: usize = 15;

const ENTITIES: [&str; 150] = [
    "airplane", "animal", "arm", "bag", "banana", "basket", "beach", "bear", "bed", "bench",
    "bike", "bird", "board", "boat", "book", "boot", "bottle", "bowl", "box", "boy",
    "branch", "building", "bus", "cabinet", "cap", "car", "cat", "chair", "child", "clock",
    "coat", "counter", "cow", "cup", "curtain", "desk", "dog", "door", "drawer", "ear",
    "elephant", "engine", "eye", "face", "fence", "finger", "flag", "flower", "food", "fork",
    "fruit", "giraffe", "girl", "glass", "glove", "guy", "hair", "hand", "handle", "hat",
    "head", "helmet", "hill", "horse", "house", "jacket", "jean", "kid", "kite", "lady",
    "lamp", "laptop", "leaf", "leg", "letter", "light", "logo", "man", "men", "motorcycle",
    "mountain", "mouth", "neck", "nose", "number", "orange", "pant", "paper", "paw", "people",
    "person", "phone", "pillow", "pizza", "plane", "plant", "plate", "player", "pole", "post",
    "pot", "racket", "railing", "rock", "roof", "room", "screen", "seat", "sheep", "shelf",
    "shirt", "shoe", "short", "sidewalk", "sign", "sink", "skateboard", "ski", "skier", "sneaker",
    "snow", "sock", "stand", "street", "surfboard", "table", "tail", "tie", "tile", "tire",
    "toilet", "towel", "tower", "track", "train", "tree", "truck", "trunk", "umbrella", "vase",
    "vegetable", "vehicle", "wave", "wheel", "window", "windshield", "wing", "wire", "woman", "zebra",
];

const PREDICATES: [&str; 50] = [
    "above", "across", "against", "along", "and", "at", "attached to", "behind", "belonging to",
    "between", "carrying", "covered in", "covering", "eating", "flying in", "for", "from",
    "growing on", "hanging from", "has", "holding", "in", "in front of", "laying on",
    "looking at", "lying on", "made of", "mounted on", "near", "of", "on", "on back of", "over",
    "painted on", "parked on", "part of", "playing", "riding", "says", "sitting on",
    "standing on", "to", "under", "using", "walking in", "walking on", "watching", "wearing",
    "wears", "with",
];

const ATTRIBUTES: [&str; 95] = [
    // colors
    "white", "black", "blue", "green", "red", "brown", "yellow", "gray", "orange", "pink",
    "purple", "silver", "gold", "tan", "beige",
    // materials
    "wooden", "metal", "plastic", "glass", "stone", "brick", "concrete", "leather", "cloth",
    "paper", "rubber", "ceramic",
    // size and shape
    "large", "small", "tall", "short", "long", "round", "square", "thin", "thick", "wide",
    "narrow", "tiny",
    // state
    "open", "closed", "empty", "full", "wet", "dry", "clean", "dirty", "broken", "old", "new",
    "parked", "moving", "standing", "sitting", "walking", "hanging", "folded", "lit", "dark",
    // surface
    "striped", "spotted", "plaid", "checkered", "shiny", "bright", "clear", "cloudy", "painted",
    "patterned", "smooth", "rough", "fluffy", "furry", "curly", "bald", "cracked", "rusty",
    // other
    "young", "elderly", "smiling", "bare", "calm", "busy", "crowded", "leafy", "grassy", "sandy",
    "snowy", "sunny", "stacked", "tied", "framed", "light", "heavy", "electric",
];

const AUDIO_EVENTS: [(&str, &str); 22] = [
    ("footsteps", "person"),
    ("rain", "umbrella"),
    ("siren", "truck"),
    ("dog bark", "dog"),
    ("engine hum", "engine"),
    ("speech", "man"),
    ("music", "phone"),
    ("wind", "tree"),
    ("bird song", "bird"),
    ("car horn", "car"),
    ("door slam", "door"),
    ("water splash", "wave"),
    ("applause", "people"),
    ("laughter", "woman"),
    ("telephone ring", "phone"),
    ("train horn", "train"),
    ("thunder", "mountain"),
    ("keyboard typing", "laptop"),
    ("baby cry", "child"),
    ("glass break", "glass"),
    ("motorcycle", "motorcycle"),
    ("aircraft", "airplane"),
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_sizes() {
        let v = Vocabulary::builtin();
        assert_eq!(v.entity_count(), 150);
        assert_eq!(v.predicate_count(), 50);
        assert_eq!(v.attribute_count(), 95);
        assert_eq!(v.audio_event_count(), 22);
        assert!(v.compatible_attributes(0).len() >= COLOR_COUNT);
        assert!(!v.audio_emitting_entities().is_empty());
    }

    #[test]
    fn rejects_duplicates_and_bad_compat() {
        let mut p = Vocabulary::builtin().parts().clone();
        p.predicate_categories.push("above".into());
        assert!(matches!(Vocabulary::new(p), Err(VocabError::DuplicateName { .. })));

        let mut p = Vocabulary::builtin().parts().clone();
        p.attr_compat.insert(500, alloc::vec![0]);
        assert!(matches!(Vocabulary::new(p), Err(VocabError::CompatIndex { .. })));

        let mut p = Vocabulary::builtin().parts().clone();
        p.attr_compat.insert(0, alloc::vec![95]);
        assert!(matches!(Vocabulary::new(p), Err(VocabError::CompatIndex { .. })));

        let mut p = Vocabulary::builtin().parts().clone();
        p.audio_event_categories.clear();
        assert_eq!(Vocabulary::new(p), Err(VocabError::Empty("audio_event_categories")));
    }
}
