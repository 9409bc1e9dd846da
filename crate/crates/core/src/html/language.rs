use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::path::Path;

use crate::{Error, Result};

pub const UNKNOWN_LANGUAGE: &str = "unknown";

const EMBEDDED: &[(&str, &str)] = &[
    ("de", include_str!("data/stopwords/de.txt")),
    ("en", include_str!("data/stopwords/en.txt")),
    ("es", include_str!("data/stopwords/es.txt")),
    ("fr", include_str!("data/stopwords/fr.txt")),
    ("it", include_str!("data/stopwords/it.txt")),
    ("nl", include_str!("data/stopwords/nl.txt")),
    ("pt", include_str!("data/stopwords/pt.txt")),
    ("ru", include_str!("data/stopwords/ru.txt")),
    ("zh", include_str!("data/stopwords/zh.txt")),
];

/// Stop-word lists keyed by language code.
#[derive(Debug, Clone, Default)]
pub struct StopWords {
    lists: BTreeMap<String, HashSet<String>>,
    all: HashSet<String>,
}

impl StopWords {
    pub fn embedded() -> Self {
        let mut sw = StopWords::default();
        for (lang, text) in EMBEDDED {
            sw.insert(lang, text);
        }
        sw
    }

    fn insert(&mut self, lang: &str, text: &str) {
        let words: HashSet<String> = text
            .lines()
            .map(|l| l.trim().to_lowercase())
            .filter(|l| !l.is_empty())
            .collect();
        self.all.extend(words.iter().cloned());
        self.lists.insert(lang.to_string(), words);
    }

    fn rebuild_all(&mut self) {
        self.all = self.lists.values().flatten().cloned().collect();
    }

    /// Replaces or adds languages from a directory holding one file per
    /// language code (file stem), one word per line.
    pub fn merge_dir(&mut self, dir: &Path) -> Result<()> {
        let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
        let mut paths: Vec<_> = entries
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.is_file())
            .collect();
        paths.sort();
        for path in paths {
            let Some(lang) = path.file_stem().and_then(|s| s.to_str()) else {
                continue;
            };
            let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            self.insert(&lang.to_lowercase(), &text);
        }
        self.rebuild_all();
        Ok(())
    }

    pub fn languages(&self) -> impl Iterator<Item = &str> {
        self.lists.keys().map(String::as_str)
    }

    pub fn is_stop_word(&self, lang: &str, token: &str) -> bool {
        self.lists.get(lang).is_some_and(|l| l.contains(token))
    }

    /// True if `token` is a stop-word of any configured language.
    pub fn is_any_stop_word(&self, token: &str) -> bool {
        self.all.contains(token)
    }
}

/// Language whose stop-words occur most often among the distinct tokens.
///
/// Ties go to the lexicographically smallest code; no match at all yields
/// [`UNKNOWN_LANGUAGE`].
pub fn detect_language<S: AsRef<str>>(tokens: &[S], stop_words: &StopWords) -> String {
    let distinct: BTreeSet<&str> = tokens.iter().map(AsRef::as_ref).collect();
    let mut best: Option<(&str, usize)> = None;
    // lists iterate in lexicographic order, so strict `>` keeps the smallest code on ties
    for (lang, words) in &stop_words.lists {
        let count = distinct.iter().filter(|t| words.contains(**t)).count();
        if count > 0 && best.is_none_or(|(_, c)| count > c) {
            best = Some((lang, count));
        }
    }
    best.map_or_else(|| UNKNOWN_LANGUAGE.to_string(), |(l, _)| l.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn english_stop_words() {
        let sw = StopWords::embedded();
        assert_eq!(detect_language(&["the", "and", "of", "is"], &sw), "en");
    }

    #[test]
    fn no_evidence_is_unknown() {
        let sw = StopWords::embedded();
        let empty: [&str; 0] = [];
        assert_eq!(detect_language(&empty, &sw), UNKNOWN_LANGUAGE);
        assert_eq!(detect_language(&["xyzzy", "42"], &sw), UNKNOWN_LANGUAGE);
    }

    #[test]
    fn tie_goes_to_smallest_code() {
        // "the" is English only, "und" German only
        let sw = StopWords::embedded();
        assert_eq!(detect_language(&["the", "und"], &sw), "de");
    }

    #[test]
    fn repeated_tokens_count_once() {
        let sw = StopWords::embedded();
        // three distinct German stop-words beat one English stop-word repeated
        let tokens = ["the", "the", "the", "the", "und", "der", "nicht"];
        assert_eq!(detect_language(&tokens, &sw), "de");
    }

    #[test]
    fn french_and_chinese() {
        let sw = StopWords::embedded();
        assert_eq!(detect_language(&["nous", "sommes", "dans", "la", "maison"], &sw), "fr");
        assert_eq!(detect_language(&["我", "的", "网", "站", "是"], &sw), "zh");
    }

    #[test]
    fn directory_override() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("xx.txt"), "foo\nbar\n").unwrap();
        let mut sw = StopWords::embedded();
        sw.merge_dir(dir.path()).unwrap();
        assert_eq!(detect_language(&["foo", "bar", "the"], &sw), "xx");
        assert!(sw.is_any_stop_word("foo"));
    }
}
