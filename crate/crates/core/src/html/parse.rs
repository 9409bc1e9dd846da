use std::collections::BTreeSet;
use std::sync::LazyLock;

use scraper::{Html, Node, Selector};
use serde::{Deserialize, Serialize};
use url::Url;

use super::language::{detect_language, StopWords, UNKNOWN_LANGUAGE};
use super::tokenize::tokenize;

/// Tokens on either side of a copyright marker that are kept as claim words.
const COPYRIGHT_WINDOW: usize = 5;

static ANCHORS: LazyLock<Selector> = LazyLock::new(|| Selector::parse("a[href]").unwrap());
static STYLES: LazyLock<Selector> = LazyLock::new(|| Selector::parse("style").unwrap());
static LINKS: LazyLock<Selector> = LazyLock::new(|| Selector::parse("link[href]").unwrap());
static IMAGES: LazyLock<Selector> = LazyLock::new(|| Selector::parse("img[src]").unwrap());
static TITLE: LazyLock<Selector> = LazyLock::new(|| Selector::parse("title").unwrap());

/// Raw material for the HTML delta features of one document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParsedPage {
    pub page_url: String,
    pub hyperlink_urls: BTreeSet<String>,
    pub style_blocks: BTreeSet<String>,
    pub stylesheet_urls: BTreeSet<String>,
    pub image_urls: BTreeSet<String>,
    pub title_words: BTreeSet<String>,
    pub copyright_tokens: BTreeSet<String>,
    pub language: String,
}

/// Parses an HTML document leniently. Never fails: undecodable bytes are
/// replaced and malformed markup is recovered by the HTML5 tree builder.
pub fn parse_page(html: &[u8], page_url: &Url, stop_words: &StopWords) -> ParsedPage {
    let text = String::from_utf8_lossy(html);
    let doc = Html::parse_document(&text);

    let resolve_all = |sel: &Selector, attr: &str| -> BTreeSet<String> {
        doc.select(sel)
            .filter_map(|el| el.value().attr(attr))
            .filter_map(|raw| resolve(page_url, raw))
            .collect()
    };

    let hyperlink_urls = resolve_all(&ANCHORS, "href");
    let image_urls = resolve_all(&IMAGES, "src");
    let stylesheet_urls = doc
        .select(&LINKS)
        .filter(|el| is_stylesheet(el.value()))
        .filter_map(|el| el.value().attr("href"))
        .filter_map(|raw| resolve(page_url, raw))
        .collect();
    let style_blocks = doc
        .select(&STYLES)
        .map(|el| el.text().collect::<String>())
        .filter(|body| !body.trim().is_empty())
        .collect();

    let tokens = visible_tokens(&doc);
    let language = detect_language(&tokens, stop_words);

    let title_words = doc
        .select(&TITLE)
        .next()
        .map(|el| tokenize(&el.text().collect::<String>()))
        .unwrap_or_default()
        .into_iter()
        .filter(|t| language == UNKNOWN_LANGUAGE || !stop_words.is_stop_word(&language, t))
        .collect();

    let copyright_tokens = copyright_tokens(&tokens, stop_words);

    ParsedPage {
        page_url: page_url.to_string(),
        hyperlink_urls,
        style_blocks,
        stylesheet_urls,
        image_urls,
        title_words,
        copyright_tokens,
        language,
    }
}

fn resolve(base: &Url, raw: &str) -> Option<String> {
    let raw = raw.trim();
    if raw.is_empty() || raw.starts_with('#') {
        return None;
    }
    base.join(raw).ok().map(String::from)
}

fn is_stylesheet(el: &scraper::node::Element) -> bool {
    let rel = el.attr("rel").unwrap_or("");
    let ty = el.attr("type").unwrap_or("");
    rel.split_ascii_whitespace().any(|r| r.eq_ignore_ascii_case("stylesheet"))
        || ty.trim().eq_ignore_ascii_case("text/css")
}

/// Tokens of every text node outside script-like containers, in document order.
fn visible_tokens(doc: &Html) -> Vec<String> {
    let mut tokens = Vec::new();
    for node in doc.root_element().descendants() {
        let Node::Text(text) = node.value() else {
            continue;
        };
        let hidden = node.ancestors().any(|a| {
            a.value().as_element().is_some_and(|e| {
                matches!(e.name(), "script" | "style" | "noscript" | "template")
            })
        });
        if !hidden {
            tokens.extend(tokenize(text));
        }
    }
    tokens
}

/// Copyright markers (`©`, "copyright", "all rights reserved") plus the
/// non-stop-word tokens within [`COPYRIGHT_WINDOW`] positions of each marker.
pub(crate) fn copyright_tokens(tokens: &[String], stop_words: &StopWords) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    let n = tokens.len();
    let mut i = 0;
    while i < n {
        let span = if tokens[i] == "©" || tokens[i] == "copyright" {
            Some((i + 1, tokens[i].clone()))
        } else if i + 3 <= n && tokens[i] == "all" && tokens[i + 1] == "rights" && tokens[i + 2] == "reserved" {
            Some((i + 3, "all rights reserved".to_string()))
        } else {
            None
        };
        if let Some((end, marker)) = span {
            out.insert(marker);
            let window = (i.saturating_sub(COPYRIGHT_WINDOW)..i).chain(end..(end + COPYRIGHT_WINDOW).min(n));
            for j in window {
                if !stop_words.is_any_stop_word(&tokens[j]) {
                    out.insert(tokens[j].clone());
                }
            }
        }
        i += 1;
    }
    out
}
