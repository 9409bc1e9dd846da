use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use url::Url;

use super::domain::{registrable_domain_of, DomainRule};
use super::jaccard::jaccard;
use super::parse::ParsedPage;
use crate::{Error, Result};

pub const HTML_FEATURE_COUNT: usize = 11;

pub const HTML_FEATURE_NAMES: [&str; HTML_FEATURE_COUNT] = [
    "url", "2ld", "ss", "ss_url", "ss_2ld", "i_url", "i_2ld", "copyright", "x_links", "title", "language",
];

/// The eleven page-versus-homepage similarity features, each in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HtmlDeltaVector {
    pub url: f64,
    pub two_ld: f64,
    pub ss: f64,
    pub ss_url: f64,
    pub ss_2ld: f64,
    pub i_url: f64,
    pub i_2ld: f64,
    pub copyright: f64,
    pub x_links: f64,
    pub title: f64,
    pub language: f64,
}

impl HtmlDeltaVector {
    pub fn to_array(&self) -> [f64; HTML_FEATURE_COUNT] {
        [
            self.url,
            self.two_ld,
            self.ss,
            self.ss_url,
            self.ss_2ld,
            self.i_url,
            self.i_2ld,
            self.copyright,
            self.x_links,
            self.title,
            self.language,
        ]
    }

    pub fn from_array(v: [f64; HTML_FEATURE_COUNT]) -> Self {
        let [url, two_ld, ss, ss_url, ss_2ld, i_url, i_2ld, copyright, x_links, title, language] = v;
        Self {
            url,
            two_ld,
            ss,
            ss_url,
            ss_2ld,
            i_url,
            i_2ld,
            copyright,
            x_links,
            title,
            language,
        }
    }

    pub fn from_slice(v: &[f64]) -> Result<Self> {
        let arr: [f64; HTML_FEATURE_COUNT] = v.try_into().map_err(|_| Error::DimensionMismatch {
            expected: HTML_FEATURE_COUNT,
            actual: v.len(),
        })?;
        Ok(Self::from_array(arr))
    }
}

fn domains(urls: &BTreeSet<String>, rule: &DomainRule) -> BTreeSet<String> {
    urls.iter()
        .filter_map(|u| Url::parse(u).ok())
        .filter_map(|u| registrable_domain_of(&u, rule).ok())
        .collect()
}

fn normalize_url(raw: &str) -> String {
    Url::parse(raw.trim()).map_or_else(|_| raw.trim().to_string(), String::from)
}

/// Compares `page` against `homepage`.
///
/// `aliases` lists further URLs under which the homepage is reachable; a
/// link to any of them counts as a link to the homepage.
pub fn extract_html_delta(
    page: &ParsedPage,
    homepage: &ParsedPage,
    aliases: &[String],
    rule: &DomainRule,
) -> HtmlDeltaVector {
    let links_home = std::iter::once(homepage.page_url.as_str())
        .chain(aliases.iter().map(String::as_str))
        .map(normalize_url)
        .any(|u| page.hyperlink_urls.contains(&u));

    HtmlDeltaVector {
        url: jaccard(&page.hyperlink_urls, &homepage.hyperlink_urls),
        two_ld: jaccard(&domains(&page.hyperlink_urls, rule), &domains(&homepage.hyperlink_urls, rule)),
        ss: jaccard(&page.style_blocks, &homepage.style_blocks),
        ss_url: jaccard(&page.stylesheet_urls, &homepage.stylesheet_urls),
        ss_2ld: jaccard(&domains(&page.stylesheet_urls, rule), &domains(&homepage.stylesheet_urls, rule)),
        i_url: jaccard(&page.image_urls, &homepage.image_urls),
        i_2ld: jaccard(&domains(&page.image_urls, rule), &domains(&homepage.image_urls, rule)),
        copyright: jaccard(&page.copyright_tokens, &homepage.copyright_tokens),
        x_links: if links_home { 1.0 } else { 0.0 },
        title: jaccard(&page.title_words, &homepage.title_words),
        language: if page.language == homepage.language { 1.0 } else { 0.0 },
    }
}
