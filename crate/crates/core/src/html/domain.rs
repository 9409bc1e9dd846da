use std::collections::HashSet;
use std::path::Path;

use url::{Host, Url};

use crate::{Error, Result};

const EMBEDDED_SUFFIXES: &str = include_str!("data/public_suffix_subset.dat");

/// How the registrable ("second-level") domain of a host is derived.
#[derive(Debug, Clone, Default)]
pub enum DomainRule {
    /// Last two DNS labels of the host.
    #[default]
    Naive,
    /// Public suffix plus one label.
    SuffixList(SuffixList),
}

/// Public-suffix rules in the usual list format: one rule per line, `//`
/// comments, `*.` wildcards and `!` exceptions.
#[derive(Debug, Clone, Default)]
pub struct SuffixList {
    rules: HashSet<String>,
    wildcards: HashSet<String>,
    exceptions: HashSet<String>,
}

impl SuffixList {
    pub fn parse(text: &str) -> Self {
        let mut list = SuffixList::default();
        for line in text.lines() {
            let rule = line.split_whitespace().next().unwrap_or("");
            if rule.is_empty() || rule.starts_with("//") {
                continue;
            }
            let rule = rule.to_lowercase();
            if let Some(rest) = rule.strip_prefix('!') {
                list.exceptions.insert(rest.to_string());
            } else if let Some(rest) = rule.strip_prefix("*.") {
                list.wildcards.insert(rest.to_string());
            } else {
                list.rules.insert(rule);
            }
        }
        list
    }

    /// The subset list compiled into the crate.
    pub fn embedded() -> Self {
        Self::parse(EMBEDDED_SUFFIXES)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::parse(&text))
    }

    /// Index of the first label of the public suffix of `labels`.
    fn suffix_start(&self, labels: &[&str]) -> usize {
        let n = labels.len();
        for i in 0..n {
            let cand = labels[i..].join(".");
            if self.exceptions.contains(&cand) {
                return i + 1;
            }
            if self.rules.contains(&cand) {
                return i;
            }
            if i + 1 < n && self.wildcards.contains(&labels[i + 1..].join(".")) {
                return i;
            }
        }
        n.saturating_sub(1)
    }

    fn registrable(&self, host: &str) -> String {
        let labels: Vec<&str> = host.split('.').collect();
        let start = self.suffix_start(&labels);
        if start == 0 {
            host.to_string()
        } else {
            labels[start - 1..].join(".")
        }
    }
}

/// Registrable domain of an absolute URL's host. IP hosts are returned as-is.
pub fn registrable_domain(url: &str, rule: &DomainRule) -> Result<String> {
    let parsed = Url::parse(url).map_err(|e| Error::InvalidUrl {
        url: url.to_string(),
        reason: e.to_string(),
    })?;
    registrable_domain_of(&parsed, rule)
}

pub(crate) fn registrable_domain_of(url: &Url, rule: &DomainRule) -> Result<String> {
    let host = match url.host() {
        Some(Host::Domain(d)) => d.trim_end_matches('.').to_lowercase(),
        Some(Host::Ipv4(ip)) => return Ok(ip.to_string()),
        Some(Host::Ipv6(ip)) => return Ok(format!("[{ip}]")),
        None => {
            return Err(Error::InvalidUrl {
                url: url.to_string(),
                reason: "no host".into(),
            })
        }
    };
    Ok(match rule {
        DomainRule::Naive => {
            let labels: Vec<&str> = host.split('.').collect();
            labels[labels.len().saturating_sub(2)..].join(".")
        }
        DomainRule::SuffixList(list) => list.registrable(&host),
    })
}
