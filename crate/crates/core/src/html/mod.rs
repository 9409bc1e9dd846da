//! HTML channel: parse a page and its homepage and compare them feature by
//! feature.

mod delta;
mod domain;
mod jaccard;
mod language;
mod parse;
mod tokenize;

pub use delta::{extract_html_delta, HtmlDeltaVector, HTML_FEATURE_COUNT, HTML_FEATURE_NAMES};
pub use domain::{registrable_domain, DomainRule, SuffixList};
pub use jaccard::jaccard;
pub use language::{detect_language, StopWords, UNKNOWN_LANGUAGE};
pub use parse::{parse_page, ParsedPage};
pub use tokenize::tokenize;

use std::path::Path;

use crate::Result;

/// Configuration shared by page parsing and delta extraction.
#[derive(Debug, Clone)]
pub struct HtmlExtractor {
    pub stop_words: StopWords,
    pub domain_rule: DomainRule,
}

impl Default for HtmlExtractor {
    fn default() -> Self {
        Self {
            stop_words: StopWords::embedded(),
            domain_rule: DomainRule::Naive,
        }
    }
}

impl HtmlExtractor {
    /// Builds an extractor, optionally overriding the embedded stop-word lists
    /// and switching to suffix-list registrable domains.
    pub fn from_config(stop_word_dir: Option<&Path>, suffix_list: Option<&Path>) -> Result<Self> {
        let mut stop_words = StopWords::embedded();
        if let Some(dir) = stop_word_dir {
            stop_words.merge_dir(dir)?;
        }
        let domain_rule = match suffix_list {
            Some(path) => DomainRule::SuffixList(SuffixList::from_file(path)?),
            None => DomainRule::Naive,
        };
        Ok(Self {
            stop_words,
            domain_rule,
        })
    }

    pub fn parse(&self, html: &[u8], page_url: &url::Url) -> ParsedPage {
        parse_page(html, page_url, &self.stop_words)
    }

    pub fn delta(&self, page: &ParsedPage, homepage: &ParsedPage, aliases: &[String]) -> HtmlDeltaVector {
        extract_html_delta(page, homepage, aliases, &self.domain_rule)
    }
}
