//! Moodle GIFT text export.

use crate::model::QuestionBank;

/// Backslash-escapes the GIFT control characters `~ = # { } : \`; line
/// breaks become `\n`.
pub fn escape_gift(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '~' | '=' | '#' | '{' | '}' | ':' | '\\' => {
                out.push('\\');
                out.push(c);
            }
            '\n' => out.push_str("\\n"),
            '\r' => {}
            c => out.push(c),
        }
    }
    out
}

/// One stanza per question, separated by blank lines. Per-answer feedback
/// is written after `#`.
pub fn export_gift(bank: &QuestionBank) -> String {
    bank.questions
        .iter()
        .map(|q| {
            let mut stanza = format!("::{}::{} {{", escape_gift(&q.id), escape_gift(&q.stem));
            for alt in &q.alternatives {
                stanza.push(' ');
                stanza.push(if alt.correct { '=' } else { '~' });
                stanza.push_str(&escape_gift(&alt.text));
                if let Some(feedback) = &alt.feedback {
                    stanza.push('#');
                    stanza.push_str(&escape_gift(feedback));
                }
            }
            stanza.push_str(" }\n");
            stanza
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Alternative, Question};

    fn bank(stem: &str) -> QuestionBank {
        QuestionBank {
            title: "t".into(),
            questions: vec![Question::new(
                "q1",
                stem,
                vec![
                    Alternative::new("4", true),
                    Alternative::new("3", false),
                    Alternative::new("5", false),
                ],
            )],
            sources: vec![],
        }
    }

    #[test]
    fn simple_stanza() {
        assert_eq!(export_gift(&bank("2+2?")), "::q1::2+2? { =4 ~3 ~5 }\n");
    }

    #[test]
    fn braces_are_escaped() {
        let out = export_gift(&bank("Is {a} = b: #1 ~ c\\d?"));
        assert!(out.starts_with("::q1::Is \\{a\\} \\= b\\: \\#1 \\~ c\\\\d? {"));
    }

    #[test]
    fn empty_bank_is_empty_text() {
        assert_eq!(export_gift(&QuestionBank::new("x")), "");
    }

    #[test]
    fn stanzas_are_separated_by_a_blank_line() {
        let mut b = bank("one");
        let mut second = b.questions[0].clone();
        second.id = "q2".into();
        second.alternatives[1].feedback = Some("close".into());
        b.questions.push(second);
        assert_eq!(
            export_gift(&b),
            "::q1::one { =4 ~3 ~5 }\n\n::q2::one { =4 ~3#close ~5 }\n"
        );
    }
}
