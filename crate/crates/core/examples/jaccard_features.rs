//! HTML delta features of a page against its homepage.

use pagedelta::html::{HtmlExtractor, HTML_FEATURE_NAMES};
use url::Url;

const HOME: &str = r#"<html><head><title>Acme Tools</title>
<link rel="stylesheet" href="/css/site.css"></head>
<body><a href="/">home</a> <a href="/shop/">shop</a> <a href="https://twitter.com/acme">tw</a>
<img src="/img/logo.png"><p>The best tools for the home and the garden.</p>
<footer>© 2015 Acme Tools. All rights reserved.</footer></body></html>"#;

const PAGE: &str = r#"<html><head><title>Acme Tools - Shop</title>
<link rel="stylesheet" href="/css/site.css"></head>
<body><a href="/">home</a> <a href="/shop/hammers/">hammers</a>
<img src="/img/logo.png"><p>Our hammers are the best in the world and you can buy them here.</p>
<footer>© 2015 Acme Tools. All rights reserved.</footer></body></html>"#;

const PHISH: &str = r#"<html><head><title>Sign in to your bank</title></head>
<body><form action="https://secure-bank.example.net/login.php"><input name="user"></form>
<img src="https://secure-bank.example.net/logo.png"></body></html>"#;

fn main() -> pagedelta::Result<()> {
    let ex = HtmlExtractor::default();
    let home_url = Url::parse("http://www.acme.com/").unwrap();
    let home = ex.parse(HOME.as_bytes(), &home_url);
    for (name, html, url) in [
        ("legit", PAGE, "http://www.acme.com/shop/"),
        ("phish", PHISH, "http://www.acme.com/wp-content/x/login.php"),
    ] {
        let page = ex.parse(html.as_bytes(), &Url::parse(url).unwrap());
        let d = ex.delta(&page, &home, &[]);
        println!("{name}:");
        for (n, v) in HTML_FEATURE_NAMES.iter().zip(d.to_array()) {
            println!("  {n:<10} {v:.3}");
        }
    }
    Ok(())
}
