//! Minimal PDF 1.4 writer for printed exams.
//!
//! Fixed A4 geometry, 72pt margins, base-14 Helvetica with WinAnsi encoding,
//! uncompressed content streams. Output bytes depend only on the input test.

use std::fmt::Write as _;

use serde::Serialize;

use crate::model::AssembledTest;

const PAGE_WIDTH: f64 = 595.0;
const PAGE_HEIGHT: f64 = 842.0;
const MARGIN: f64 = 72.0;
const BODY_SIZE: f64 = 12.0;
const BODY_LEADING: f64 = 14.0;
const TITLE_SIZE: f64 = 16.0;
const TITLE_LEADING: f64 = 20.0;
const ALT_INDENT: f64 = 18.0;
const KEY_COLUMNS: usize = 6;

/// Helvetica advance widths (1/1000 em) for ASCII 32..=126.
const HELVETICA_ASCII: [u16; 95] = [
    278, 278, 355, 556, 556, 889, 667, 191, 333, 333, 389, 584, 278, 333, 278, 278, // ' ' .. '/'
    556, 556, 556, 556, 556, 556, 556, 556, 556, 556, 278, 278, 584, 584, 584, 556, // '0' .. '?'
    1015, 667, 667, 722, 722, 667, 611, 778, 722, 278, 500, 667, 556, 833, 722, 778, // '@' .. 'O'
    667, 778, 722, 667, 611, 722, 667, 944, 667, 667, 611, 278, 278, 278, 469, 556, // 'P' .. '_'
    333, 556, 556, 500, 556, 556, 278, 556, 556, 222, 222, 500, 222, 833, 556, 556, // '`' .. 'o'
    556, 556, 333, 500, 278, 556, 500, 722, 500, 500, 500, 334, 260, 334, 584, // 'p' .. '~'
];

/// Characters that could not be drawn with the base font.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct RenderReport {
    pub replaced_chars: usize,
    pub pages: usize,
}

/// Maps text to WinAnsi bytes; anything outside printable Latin-1 becomes `?`.
fn encode(text: &str, report: &mut RenderReport) -> Vec<u8> {
    text.chars()
        .map(|c| match c as u32 {
            0x20..=0x7E | 0xA0..=0xFF => c as u32 as u8,
            _ if c.is_whitespace() => b' ',
            _ => {
                report.replaced_chars += 1;
                b'?'
            }
        })
        .collect()
}

fn byte_width(b: u8) -> f64 {
    let units = match b {
        0x20..=0x7E => HELVETICA_ASCII[(b - 0x20) as usize],
        _ => 556,
    };
    units as f64 / 1000.0
}

fn text_width(bytes: &[u8], size: f64) -> f64 {
    bytes.iter().map(|&b| byte_width(b)).sum::<f64>() * size
}

/// Greedy word wrap; words wider than a line are split by character.
fn wrap(bytes: &[u8], first_width: f64, rest_width: f64, size: f64) -> Vec<Vec<u8>> {
    let mut lines = Vec::new();
    let mut current: Vec<u8> = Vec::new();
    let limit = |n: usize| if n == 0 { first_width } else { rest_width };
    for word in bytes.split(|&b| b == b' ').filter(|w| !w.is_empty()) {
        let candidate_width = if current.is_empty() {
            text_width(word, size)
        } else {
            text_width(&current, size) + text_width(b" ", size) + text_width(word, size)
        };
        if candidate_width <= limit(lines.len()) {
            if !current.is_empty() {
                current.push(b' ');
            }
            current.extend_from_slice(word);
            continue;
        }
        if !current.is_empty() {
            lines.push(std::mem::take(&mut current));
        }
        for &b in word {
            if !current.is_empty() && text_width(&current, size) + byte_width(b) * size > limit(lines.len()) {
                lines.push(std::mem::take(&mut current));
            }
            current.push(b);
        }
    }
    if !current.is_empty() || lines.is_empty() {
        lines.push(current);
    }
    lines
}

struct PlacedText {
    x: f64,
    y: f64,
    size: f64,
    bytes: Vec<u8>,
}

/// Top-down page layout with a moving baseline.
struct Layout {
    pages: Vec<Vec<PlacedText>>,
    y: f64,
}

impl Layout {
    fn new() -> Self {
        Self {
            pages: vec![Vec::new()],
            y: PAGE_HEIGHT - MARGIN,
        }
    }

    fn new_page(&mut self) {
        self.pages.push(Vec::new());
        self.y = PAGE_HEIGHT - MARGIN;
    }

    /// Moves the baseline down by `leading`, breaking the page when it would
    /// cross the bottom margin.
    fn advance(&mut self, leading: f64) {
        self.y -= leading;
        if self.y < MARGIN {
            self.new_page();
            self.y -= leading;
        }
    }

    fn place(&mut self, x: f64, size: f64, bytes: Vec<u8>) {
        let y = self.y;
        self.pages
            .last_mut()
            .expect("layout always has a page")
            .push(PlacedText { x, y, size, bytes });
    }

    fn line(&mut self, x: f64, size: f64, leading: f64, bytes: Vec<u8>) {
        self.advance(leading);
        self.place(x, size, bytes);
    }

    /// Wrapped paragraph with an optional label hanging in the left gutter.
    fn paragraph(&mut self, x: f64, label: &[u8], body: &[u8], size: f64, leading: f64) {
        let label_width = if label.is_empty() {
            0.0
        } else {
            text_width(label, size) + text_width(b" ", size)
        };
        let text_x = x + label_width;
        let width = PAGE_WIDTH - MARGIN - text_x;
        for (i, line) in wrap(body, width, width, size).into_iter().enumerate() {
            self.advance(leading);
            if i == 0 && !label.is_empty() {
                self.place(x, size, label.to_vec());
            }
            self.place(text_x, size, line);
        }
    }

    fn gap(&mut self, leading: f64) {
        self.y -= leading;
    }
}

fn pdf_string(bytes: &[u8]) -> String {
    let mut out = String::with_capacity(bytes.len() + 2);
    out.push('(');
    for &b in bytes {
        match b {
            b'(' | b')' | b'\\' => {
                out.push('\\');
                out.push(b as char);
            }
            0x20..=0x7E => out.push(b as char),
            _ => {
                let _ = write!(out, "\\{b:03o}");
            }
        }
    }
    out.push(')');
    out
}

fn fmt_num(v: f64) -> String {
    let s = format!("{v:.2}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn content_stream(texts: &[PlacedText]) -> String {
    let mut out = String::new();
    for t in texts {
        let _ = writeln!(
            out,
            "BT /F1 {} Tf {} {} Td {} Tj ET",
            fmt_num(t.size),
            fmt_num(t.x),
            fmt_num(t.y),
            pdf_string(&t.bytes)
        );
    }
    out
}

fn layout_test(test: &AssembledTest, report: &mut RenderReport) -> Layout {
    let cfg = &test.config;
    let mut layout = Layout::new();
    let width = PAGE_WIDTH - 2.0 * MARGIN;

    if !cfg.title.trim().is_empty() {
        let title = encode(&cfg.title, report);
        for line in wrap(&title, width, width, TITLE_SIZE) {
            layout.line(MARGIN, TITLE_SIZE, TITLE_LEADING, line);
        }
    }
    if !cfg.subtitle.trim().is_empty() {
        let subtitle = encode(&cfg.subtitle, report);
        layout.paragraph(MARGIN, b"", &subtitle, BODY_SIZE, BODY_LEADING);
    }
    if !cfg.instructions.trim().is_empty() {
        layout.gap(BODY_LEADING / 2.0);
        let instructions = encode(&cfg.instructions, report);
        layout.paragraph(MARGIN, b"", &instructions, BODY_SIZE, BODY_LEADING);
    }

    for (n, item) in test.items.iter().enumerate() {
        if n > 0 || layout.y < PAGE_HEIGHT - MARGIN {
            layout.gap(BODY_LEADING / 2.0);
        }
        let label = format!("{}.", item.position).into_bytes();
        let stem = encode(&item.question.stem, report);
        layout.paragraph(MARGIN, &label, &stem, BODY_SIZE, BODY_LEADING);
        for (i, alt) in item.question.alternatives.iter().enumerate() {
            let label = format!("{})", crate::model::Letter::new(i)).into_bytes();
            let text = encode(&alt.text, report);
            layout.paragraph(MARGIN + ALT_INDENT, &label, &text, BODY_SIZE, BODY_LEADING);
        }
    }

    if cfg.answer_table {
        layout.new_page();
        layout.line(MARGIN, TITLE_SIZE, TITLE_LEADING, b"Answer key".to_vec());
        layout.gap(BODY_LEADING / 2.0);
        let column_width = width / KEY_COLUMNS as f64;
        let entries: Vec<_> = test.key.entries.iter().collect();
        for row in entries.chunks(KEY_COLUMNS) {
            layout.advance(BODY_LEADING);
            for (col, (position, letter)) in row.iter().enumerate() {
                let x = MARGIN + col as f64 * column_width;
                layout.place(x, BODY_SIZE, format!("{position}. {letter}").into_bytes());
            }
        }
    }
    layout
}

/// Renders the test and reports any replaced characters.
pub fn export_pdf_with_report(test: &AssembledTest) -> (Vec<u8>, RenderReport) {
    let mut report = RenderReport::default();
    let layout = layout_test(test, &mut report);
    report.pages = layout.pages.len();

    // 1 catalog, 2 page tree, 3 font, 4 info, then (page, contents) pairs.
    let page_ids: Vec<usize> = (0..layout.pages.len()).map(|i| 5 + 2 * i).collect();
    let mut objects: Vec<Vec<u8>> = Vec::new();
    objects.push(b"<< /Type /Catalog /Pages 2 0 R >>".to_vec());
    let kids: Vec<String> = page_ids.iter().map(|id| format!("{id} 0 R")).collect();
    objects.push(
        format!(
            "<< /Type /Pages /Kids [{}] /Count {} /MediaBox [0 0 {} {}] >>",
            kids.join(" "),
            page_ids.len(),
            fmt_num(PAGE_WIDTH),
            fmt_num(PAGE_HEIGHT)
        )
        .into_bytes(),
    );
    objects.push(
        b"<< /Type /Font /Subtype /Type1 /BaseFont /Helvetica /Encoding /WinAnsiEncoding >>".to_vec(),
    );
    let info_title = encode(&test.config.title, &mut RenderReport::default());
    objects.push(
        format!("<< /Title {} /Producer (quizforge) >>", pdf_string(&info_title)).into_bytes(),
    );
    for (page, &id) in layout.pages.iter().zip(&page_ids) {
        objects.push(
            format!(
                "<< /Type /Page /Parent 2 0 R /Resources << /Font << /F1 3 0 R >> >> /Contents {} 0 R >>",
                id + 1
            )
            .into_bytes(),
        );
        let stream = content_stream(page);
        let mut obj = format!("<< /Length {} >>\nstream\n", stream.len()).into_bytes();
        obj.extend_from_slice(stream.as_bytes());
        obj.extend_from_slice(b"endstream");
        objects.push(obj);
    }

    let mut out: Vec<u8> = Vec::new();
    out.extend_from_slice(b"%PDF-1.4\n%\xE2\xE3\xCF\xD3\n");
    let mut offsets = Vec::with_capacity(objects.len());
    for (i, body) in objects.iter().enumerate() {
        offsets.push(out.len());
        out.extend_from_slice(format!("{} 0 obj\n", i + 1).as_bytes());
        out.extend_from_slice(body);
        out.extend_from_slice(b"\nendobj\n");
    }
    let xref_at = out.len();
    let mut xref = format!("xref\n0 {}\n0000000000 65535 f \n", objects.len() + 1);
    for off in &offsets {
        let _ = writeln!(xref, "{off:010} 00000 n ");
    }
    let _ = write!(
        xref,
        "trailer\n<< /Size {} /Root 1 0 R /Info 4 0 R >>\nstartxref\n{}\n%%EOF",
        objects.len() + 1,
        xref_at
    );
    out.extend_from_slice(xref.as_bytes());
    (out, report)
}

pub fn export_pdf(test: &AssembledTest) -> Vec<u8> {
    export_pdf_with_report(test).0
}

fn find(haystack: &[u8], needle: &[u8], from: usize) -> Option<usize> {
    haystack
        .get(from..)?
        .windows(needle.len())
        .position(|w| w == needle)
        .map(|p| p + from)
}

fn rfind(haystack: &[u8], needle: &[u8]) -> Option<usize> {
    haystack.windows(needle.len()).rposition(|w| w == needle)
}

/// Checks that every in-use xref entry points at the matching `N 0 obj`
/// header and that `startxref` points at the table.
pub fn verify_xref(pdf: &[u8]) -> Result<(), String> {
    let sx = rfind(pdf, b"startxref").ok_or("no startxref")?;
    let tail = std::str::from_utf8(&pdf[sx + 9..]).map_err(|e| e.to_string())?;
    let xref_at: usize = tail
        .split_whitespace()
        .next()
        .ok_or("startxref without offset")?
        .parse()
        .map_err(|e| format!("bad startxref offset: {e}"))?;
    if pdf.get(xref_at..xref_at + 4) != Some(b"xref".as_slice()) {
        return Err(format!("startxref {xref_at} does not point at an xref table"));
    }
    let table_end = find(pdf, b"trailer", xref_at).ok_or("no trailer")?;
    let table = std::str::from_utf8(&pdf[xref_at..table_end]).map_err(|e| e.to_string())?;
    let mut lines = table.lines().skip(1);
    let header = lines.next().ok_or("empty xref")?;
    let mut parts = header.split_whitespace();
    let first: usize = parts.next().and_then(|s| s.parse().ok()).ok_or("bad subsection")?;
    let count: usize = parts.next().and_then(|s| s.parse().ok()).ok_or("bad subsection")?;
    let mut seen = 0;
    for (i, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(format!("bad xref entry {line:?}"));
        }
        seen += 1;
        if fields[2] != "n" {
            continue;
        }
        let offset: usize = fields[0].parse().map_err(|_| format!("bad offset {line:?}"))?;
        let expected = format!("{} 0 obj", first + i);
        if pdf.get(offset..offset + expected.len()) != Some(expected.as_bytes()) {
            return Err(format!("object {} is not at offset {offset}", first + i));
        }
    }
    if seen != count {
        return Err(format!("xref declares {count} entries, found {seen}"));
    }
    Ok(())
}
