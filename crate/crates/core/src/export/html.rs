//! Static single-page HTML rendering of a test.

use std::fmt::Write as _;

use crate::model::{AssembledTest, Letter};

const STYLE: &str = "body{font-family:sans-serif;max-width:48em;margin:2em auto;padding:0 1em}\
section.question{margin:1.5em 0}\
fieldset{border:none;padding:0 0 0 1.5em}\
label{display:block;margin:.25em 0}\
table.answer-key{border-collapse:collapse}\
table.answer-key td,table.answer-key th{border:1px solid #999;padding:.2em .6em}";

pub fn escape_html(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            c => out.push(c),
        }
    }
    out
}

/// One section per question; the answer table is appended only when
/// `reveal_key` is set.
pub fn export_html(test: &AssembledTest, reveal_key: bool) -> Vec<u8> {
    let cfg = &test.config;
    let mut out = String::new();
    out.push_str("<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n");
    let _ = writeln!(out, "<title>{}</title>", escape_html(&cfg.title));
    let _ = writeln!(out, "<style>{STYLE}</style>");
    out.push_str("</head>\n<body>\n<header>\n");
    let _ = writeln!(out, "<h1>{}</h1>", escape_html(&cfg.title));
    if !cfg.subtitle.is_empty() {
        let _ = writeln!(out, "<p class=\"subtitle\">{}</p>", escape_html(&cfg.subtitle));
    }
    if !cfg.instructions.is_empty() {
        let _ = writeln!(out, "<p class=\"instructions\">{}</p>", escape_html(&cfg.instructions));
    }
    let _ = writeln!(
        out,
        "<p class=\"count\">Total questions: <span id=\"question-count\">{}</span></p>",
        test.items.len()
    );
    out.push_str("</header>\n<form>\n");
    for item in &test.items {
        let p = item.position;
        let _ = writeln!(out, "<section class=\"question\" id=\"q{p}\">");
        let _ = writeln!(
            out,
            "<h2><span class=\"number\">{p}.</span> <span class=\"stem\">{}</span></h2>",
            escape_html(&item.question.stem)
        );
        out.push_str("<fieldset>\n");
        for (i, alt) in item.question.alternatives.iter().enumerate() {
            let letter = Letter::new(i);
            let _ = writeln!(
                out,
                "<label><input type=\"radio\" name=\"q{p}\" value=\"{letter}\"> <span class=\"letter\">{letter})</span> <span class=\"text\">{}</span></label>",
                escape_html(&alt.text)
            );
        }
        out.push_str("</fieldset>\n</section>\n");
    }
    out.push_str("</form>\n");
    if reveal_key {
        out.push_str("<section class=\"answer-key\">\n<h2>Answer key</h2>\n<table class=\"answer-key\">\n");
        out.push_str("<tr><th>Question</th><th>Answer</th></tr>\n");
        for (position, letter) in &test.key.entries {
            let _ = writeln!(out, "<tr><td>{position}</td><td>{letter}</td></tr>");
        }
        out.push_str("</table>\n</section>\n");
    }
    out.push_str("</body>\n</html>\n");
    out.into_bytes()
}
