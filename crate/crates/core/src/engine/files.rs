//! Input corpora: seeded generation, directories and JSON manifests.

use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use super::job::VOCABULARY;
use super::EngineError;

/// `n_files` texts of 0 to 80 vocabulary words, deterministic in `seed`.
pub fn generate_corpus(n_files: usize, seed: u64) -> Vec<Vec<u8>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n_files)
        .map(|_| {
            let words = rng.random_range(0..=80);
            let text: Vec<&str> = (0..words)
                .map(|_| VOCABULARY[rng.random_range(0..VOCABULARY.len())])
                .collect();
            text.join(" ").into_bytes()
        })
        .collect()
}

#[derive(Deserialize)]
struct ManifestEntry {
    #[allow(dead_code)]
    name: String,
    #[serde(default)]
    text: Option<String>,
    #[serde(default)]
    bytes: Option<Vec<u8>>,
}

/// Reads `[{"name": .., "text": ..} | {"name": .., "bytes": [..]}]`.
pub fn parse_manifest(json: &str) -> Result<Vec<Vec<u8>>, EngineError> {
    let entries: Vec<ManifestEntry> =
        serde_json::from_str(json).map_err(|e| EngineError::Manifest(e.to_string()))?;
    entries
        .into_iter()
        .map(|e| match (e.text, e.bytes) {
            (Some(t), None) => Ok(t.into_bytes()),
            (None, Some(b)) => Ok(b),
            _ => Err(EngineError::Manifest(format!(
                "entry {:?} needs exactly one of `text` or `bytes`",
                e.name
            ))),
        })
        .collect()
}

/// Loads files from a directory (sorted by name) or a JSON manifest.
pub fn load_files(path: &Path) -> Result<Vec<Vec<u8>>, EngineError> {
    let io = |e: std::io::Error| EngineError::Io(format!("{}: {e}", path.display()));
    if path.is_dir() {
        let mut entries: Vec<_> = fs::read_dir(path)
            .map_err(io)?
            .filter_map(Result::ok)
            .filter(|e| e.path().is_file())
            .collect();
        entries.sort_by_key(|e| e.file_name());
        entries
            .iter()
            .map(|e| fs::read(e.path()).map_err(io))
            .collect()
    } else {
        parse_manifest(&fs::read_to_string(path).map_err(io)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_is_seeded() {
        assert_eq!(generate_corpus(5, 1), generate_corpus(5, 1));
        assert_ne!(generate_corpus(5, 1), generate_corpus(5, 2));
        assert_eq!(generate_corpus(3, 9).len(), 3);
    }

    #[test]
    fn manifest_variants() {
        let files =
            parse_manifest(r#"[{"name":"a","text":"x y"},{"name":"b","bytes":[1,2]}]"#).unwrap();
        assert_eq!(files, vec![b"x y".to_vec(), vec![1, 2]]);
        assert!(parse_manifest(r#"[{"name":"a"}]"#).is_err());
        assert!(parse_manifest("{}").is_err());
    }

    #[test]
    fn directory_order_is_by_name() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("b.txt"), "second").unwrap();
        fs::write(dir.path().join("a.txt"), "first").unwrap();
        let files = load_files(dir.path()).unwrap();
        assert_eq!(files, vec![b"first".to_vec(), b"second".to_vec()]);
    }
}
