//! Rendering of assembled tests to PDF, HTML and GIFT.

mod gift;
mod html;
pub mod pdf;

pub use gift::{escape_gift, export_gift};
pub use html::{escape_html, export_html};
pub use pdf::{export_pdf, export_pdf_with_report, verify_xref, RenderReport};
