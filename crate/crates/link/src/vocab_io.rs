//! Vocabulary files: four name lists, the attribute compatibility table and
//! the audio source table, as JSON.

use std::fs;
use std::path::Path;

use oar_core::graph::Vocabulary;

use crate::Error;

pub fn vocabulary_to_json(v: &Vocabulary) -> String {
    serde_json::to_string_pretty(v).expect("vocabulary is plain data")
}

pub fn vocabulary_from_json(text: &str) -> Result<Vocabulary, Error> {
    serde_json::from_str(text).map_err(|e| Error::Config(format!("vocabulary: {e}")))
}

pub fn read_vocabulary(path: &Path) -> Result<Vocabulary, Error> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    vocabulary_from_json(&text)
}

pub fn write_vocabulary(path: &Path, v: &Vocabulary) -> Result<(), Error> {
    fs::write(path, vocabulary_to_json(v) + "\n").map_err(|e| Error::io(path, e))
}

/// `"builtin"` or a path to a vocabulary file.
pub fn resolve_vocabulary(source: &str) -> Result<Vocabulary, Error> {
    if source == "builtin" {
        Ok(Vocabulary::builtin())
    } else {
        read_vocabulary(Path::new(source))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_round_trip() {
        let v = Vocabulary::builtin();
        let back = vocabulary_from_json(&vocabulary_to_json(&v)).unwrap();
        assert_eq!(back, v);
        assert_eq!((back.entity_count(), back.predicate_count()), (150, 50));
        assert_eq!((back.attribute_count(), back.audio_event_count()), (95, 22));
    }

    #[test]
    fn rejects_bad_compat() {
        let mut j: serde_json::Value = serde_json::from_str(&vocabulary_to_json(&Vocabulary::builtin())).unwrap();
        j["attr_compat"]["0"] = serde_json::json!([500]);
        assert!(vocabulary_from_json(&j.to_string()).is_err());
    }
}
