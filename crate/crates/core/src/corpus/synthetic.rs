use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::render::{render_login_page, SiteTemplate};
use super::{Manifest, ManifestFamily, ManifestHomepage, ManifestPage, MANIFEST_FILE, MANIFEST_VERSION};
use crate::{Error, Result};

const LANGUAGES: [(&str, [&str; 10], &str); 5] = [
    ("en", ["the", "and", "with", "our", "for", "your", "this", "from", "about", "which"], "All rights reserved"),
    ("fr", ["les", "avec", "pour", "nous", "votre", "dans", "sur", "une", "des", "vous"], "Tous droits réservés"),
    ("de", ["der", "und", "mit", "für", "auch", "eine", "dem", "nicht", "oder", "ist"], "Alle Rechte vorbehalten"),
    ("es", ["el", "los", "con", "para", "por", "una", "del", "las", "más", "muy"], "Todos los derechos reservados"),
    ("it", ["il", "della", "per", "gli", "sono", "nella", "anche", "questo", "delle", "non"], "Tutti i diritti riservati"),
];

const SYLLABLES: [&str; 20] = [
    "ka", "lo", "mi", "ver", "tan", "ro", "qui", "zen", "dal", "po", "nex", "bri", "sul", "tor", "vin", "gra", "fex", "mur", "kel",
    "bax",
];

fn pseudo_word(rng: &mut ChaCha8Rng) -> String {
    let n = rng.random_range(2..4);
    (0..n).map(|_| *SYLLABLES.choose(rng).unwrap()).collect()
}

fn capitalized(w: &str) -> String {
    let mut c = w.chars();
    c.next().map(|f| f.to_uppercase().chain(c).collect()).unwrap_or_default()
}

fn sentence(rng: &mut ChaCha8Rng, lang: usize) -> String {
    let stops = &LANGUAGES[lang].1;
    let len = rng.random_range(8..16);
    let mut words: Vec<String> = (0..len)
        .map(|i| {
            if i % 2 == 0 {
                pseudo_word(rng)
            } else {
                stops.choose(rng).unwrap().to_string()
            }
        })
        .collect();
    words[0] = capitalized(&words[0]);
    format!("{}.", words.join(" "))
}

/// Every stop word of the language at least once, so detection is
/// unambiguous.
fn body_text(rng: &mut ChaCha8Rng, lang: usize) -> String {
    let mut paras: Vec<String> = (0..rng.random_range(2..5))
        .map(|_| format!("<p>{} {}</p>", sentence(rng, lang), sentence(rng, lang)))
        .collect();
    let all: Vec<String> = LANGUAGES[lang]
        .1
        .iter()
        .map(|s| format!("{} {s}", pseudo_word(rng)))
        .collect();
    paras.push(format!("<p>{}.</p>", all.join(" ")));
    paras.concat()
}

struct Site {
    host: String,
    brand: String,
    lang: usize,
    links: Vec<String>,
    stylesheets: Vec<String>,
    styles: Vec<String>,
    images: Vec<String>,
    title_words: Vec<String>,
    footer: String,
    template: SiteTemplate,
}

impl Site {
    fn random(f: usize, rng: &mut ChaCha8Rng) -> Self {
        let host = format!("www.site{f:03}.com");
        let brand = pseudo_word(rng);
        let lang = rng.random_range(0..LANGUAGES.len());
        let mut links = vec!["/".to_string()];
        for _ in 0..rng.random_range(8..13) {
            links.push(format!("/{}/", pseudo_word(rng)));
        }
        for social in ["facebook", "twitter", "instagram"] {
            if rng.random_bool(0.7) {
                links.push(format!("https://www.{social}.com/{brand}"));
            }
        }
        let stylesheets = vec!["/static/css/layout.css".to_string(), format!("/static/css/{brand}.css")];
        let styles = vec![
            format!("body{{margin:0;background:#{:06x}}}", rng.random_range(0..0xffffffu32)),
            format!(".nav a{{color:#{:06x};padding:{}px}}", rng.random_range(0..0xffffffu32), rng.random_range(2..20)),
        ];
        let mut images = vec!["/images/logo.png".to_string()];
        for _ in 0..rng.random_range(3..6) {
            images.push(format!("/images/{}.jpg", pseudo_word(rng)));
        }
        let title_words = vec![capitalized(&brand), capitalized(&pseudo_word(rng)), pseudo_word(rng)];
        let footer = format!(
            "© {} {} {}. {}.",
            rng.random_range(2005..2017),
            capitalized(&brand),
            pseudo_word(rng),
            LANGUAGES[lang].2
        );
        let template = SiteTemplate::random(rng);
        Self {
            host,
            brand,
            lang,
            links,
            stylesheets,
            styles,
            images,
            title_words,
            footer,
            template,
        }
    }

    fn homepage_url(&self) -> String {
        format!("https://{}/", self.host)
    }

    fn homepage_html(&self, rng: &mut ChaCha8Rng) -> String {
        page_html(
            &self.title_words.join(" "),
            &self.stylesheets,
            &self.styles,
            &self.links,
            &self.images,
            &body_text(rng, self.lang),
            Some(&self.footer),
        )
    }

    /// A legitimate page: most of the homepage's links, images and styles,
    /// plus a few of its own.
    fn legit_html(&self, rng: &mut ChaCha8Rng) -> (String, String) {
        let topic = pseudo_word(rng);
        let url = format!("https://{}/{}/{topic}.html", self.host, pseudo_word(rng));
        let mut links = self.links.clone();
        for _ in 0..rng.random_range(0..3) {
            // never drop the link home
            let i = rng.random_range(1..links.len());
            links.remove(i);
        }
        for _ in 0..rng.random_range(1..3) {
            links.push(format!("/{topic}/{}.html", pseudo_word(rng)));
        }
        let mut images: Vec<String> = self.images.iter().take(1).cloned().collect();
        let shared: Vec<&String> = self.images[1..].choose_multiple(rng, 2).collect();
        images.extend(shared.into_iter().cloned());
        images.push(format!("/images/{topic}.jpg"));
        let mut styles = self.styles.clone();
        if rng.random_bool(0.3) {
            styles.push(format!(".{topic}{{width:{}px}}", rng.random_range(100..900)));
        }
        let title = format!("{} {}", capitalized(&self.brand), capitalized(&topic));
        let html = page_html(
            &title,
            &self.stylesheets,
            &styles,
            &links,
            &images,
            &body_text(rng, self.lang),
            Some(&self.footer),
        );
        (url, html)
    }

    /// A phishing page planted on the site: everything points to the
    /// attacker's own infrastructure and it is written in another language.
    fn phish_html(&self, rng: &mut ChaCha8Rng) -> (String, String) {
        let url = format!(
            "https://{}/wp-content/{}/{}/login.php",
            self.host,
            pseudo_word(rng),
            pseudo_word(rng)
        );
        let bank = pseudo_word(rng);
        let drop_host = format!("secure-{bank}.{}", ["net", "info", "org", "biz"].choose(rng).unwrap());
        let lang = (self.lang + rng.random_range(1..LANGUAGES.len())) % LANGUAGES.len();
        let links: Vec<String> = (0..rng.random_range(2..5))
            .map(|_| format!("https://{drop_host}/{}", pseudo_word(rng)))
            .collect();
        let stylesheets = vec![format!("https://cdn.{drop_host}/{}.css", pseudo_word(rng))];
        let styles = vec![format!(".login{{width:{}px;margin:auto}}", rng.random_range(280..420))];
        let images = vec![format!("https://{drop_host}/img/{bank}.gif")];
        let title = format!("{} {}", capitalized(&bank), capitalized(&pseudo_word(rng)));
        let body = format!(
            "<form action=\"https://{drop_host}/post.php\"><input name=user><input type=password name=pass></form>{}",
            body_text(rng, lang)
        );
        let html = page_html(&title, &stylesheets, &styles, &links, &images, &body, None);
        (url, html)
    }
}

fn page_html(
    title: &str,
    stylesheets: &[String],
    styles: &[String],
    links: &[String],
    images: &[String],
    body: &str,
    footer: Option<&str>,
) -> String {
    let mut h = String::new();
    let _ = write!(h, "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>{title}</title>\n");
    for s in stylesheets {
        let _ = writeln!(h, "<link rel=\"stylesheet\" href=\"{s}\">");
    }
    for s in styles {
        let _ = writeln!(h, "<style>{s}</style>");
    }
    h.push_str("</head>\n<body>\n<nav>");
    for (i, l) in links.iter().enumerate() {
        let _ = write!(h, "<a href=\"{l}\">link{i}</a> ");
    }
    h.push_str("</nav>\n");
    for i in images {
        let _ = writeln!(h, "<img src=\"{i}\" alt=\"\">");
    }
    h.push_str(body);
    if let Some(f) = footer {
        let _ = write!(h, "\n<footer>{f}</footer>");
    }
    h.push_str("\n</body></html>\n");
    h
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn write_png(path: &Path, img: &image::RgbImage) -> Result<()> {
    img.save_with_format(path, image::ImageFormat::Png).map_err(|e| Error::Image {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })
}

/// Writes a synthetic corpus of `n_families` sites under `out_dir` and
/// returns the manifest path.
///
/// Each family has `pages_per_family` member pages: one phishing page and
/// `pages_per_family − 1` legitimate pages. Legitimate pages reuse the
/// homepage's links, styles, images, title brand, language and rendered
/// layout; the phishing page shares none of them.
pub fn generate_synthetic_corpus(n_families: usize, pages_per_family: usize, seed: u64, out_dir: &Path) -> Result<PathBuf> {
    if n_families < 2 {
        return Err(Error::invalid(format!("need at least 2 families, got {n_families}")));
    }
    if pages_per_family < 2 {
        return Err(Error::invalid(format!("need at least 2 pages per family, got {pages_per_family}")));
    }
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut families = Vec::with_capacity(n_families);
    for f in 0..n_families {
        let id = format!("family{f:03}");
        let dir = out_dir.join(&id);
        std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        let mut frng = ChaCha8Rng::seed_from_u64(rng.random());
        let site = Site::random(f, &mut frng);

        write_file(&dir.join("homepage.html"), site.homepage_html(&mut frng).as_bytes())?;
        write_png(&dir.join("homepage.png"), &site.template.render(&mut frng))?;

        let mut labels = vec!["legit"; pages_per_family - 1];
        labels.push("phish");
        labels.shuffle(&mut frng);
        let mut pages = Vec::with_capacity(pages_per_family);
        for (j, label) in labels.into_iter().enumerate() {
            let pid = format!("p{j}");
            let (url, html, png) = if label == "phish" {
                let (u, h) = site.phish_html(&mut frng);
                (u, h, render_login_page(&mut frng))
            } else {
                let (u, h) = site.legit_html(&mut frng);
                (u, h, site.template.render(&mut frng))
            };
            write_file(&dir.join(format!("{pid}.html")), html.as_bytes())?;
            write_png(&dir.join(format!("{pid}.png")), &png)?;
            pages.push(ManifestPage {
                id: pid.clone(),
                html: format!("{id}/{pid}.html"),
                png: format!("{id}/{pid}.png"),
                url,
                label: label.to_string(),
            });
        }
        families.push(ManifestFamily {
            id: id.clone(),
            homepage: ManifestHomepage {
                html: format!("{id}/homepage.html"),
                png: format!("{id}/homepage.png"),
                url: site.homepage_url(),
                aliases: vec![],
            },
            pages,
        });
    }
    let manifest = Manifest {
        version: MANIFEST_VERSION,
        families,
    };
    let path = out_dir.join(MANIFEST_FILE);
    write_file(&path, serde_json::to_string_pretty(&manifest)?.as_bytes())?;
    Ok(path)
}
