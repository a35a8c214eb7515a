//! Reader and writer for `begin(model). ... end(model).` fact files.

use crate::data::interpretation::{sort_events, Event, Interpretation};
use crate::error::{Error, Result};
use crate::logic::{FactSet, Literal, Term};
use crate::symbol::Symbol;
use crate::syntax::{tokenize, Cursor, Tok};

/// Splits `<class>_<situation>_<source>`. The class may itself contain `_`.
fn split_identifier(ident: &str) -> Option<(&str, u32, &str)> {
    let (rest, source) = ident.rsplit_once('_')?;
    let (label, situation) = rest.rsplit_once('_')?;
    if label.is_empty() || source.is_empty() {
        return None;
    }
    Some((label, situation.parse().ok()?, source))
}

fn is_marker(lit: &Literal, word: &str) -> bool {
    lit.pred.as_str() == word && lit.args.len() == 1 && lit.args[0] == Term::constant("model")
}

pub fn parse_model_file(text: &str) -> Result<Vec<Interpretation>> {
    let tokens = tokenize(text)?;
    let mut cursor = Cursor::new(&tokens);
    let mut out = Vec::new();
    let mut anon = 0;
    while !cursor.at_end() {
        let line = cursor.line();
        let begin = crate::logic::clause::parse_literal(&mut cursor, &mut anon)?;
        cursor.expect(&Tok::Dot)?;
        if !is_marker(&begin, "begin") {
            return Err(Error::Format {
                line,
                message: format!("expected begin(model)., found {begin}"),
            });
        }
        let ident_line = cursor.line();
        let ident = match cursor.bump() {
            Some(Tok::Name(n)) => n.clone(),
            _ => {
                return Err(Error::Format {
                    line: ident_line,
                    message: "expected example identifier after begin(model).".into(),
                })
            }
        };
        cursor.expect(&Tok::Dot)?;
        let (label, situation, source) = split_identifier(&ident).ok_or_else(|| Error::Format {
            line: ident_line,
            message: format!("identifier {ident:?} does not match <class>_<situation>_<source>"),
        })?;
        let mut facts = FactSet::new();
        loop {
            if cursor.at_end() {
                return Err(Error::Parse {
                    line: cursor.line(),
                    column: cursor.position().1,
                    message: format!("missing end(model). for block opened at line {line}"),
                });
            }
            let fact_line = cursor.line();
            let fact = crate::logic::clause::parse_literal(&mut cursor, &mut anon)?;
            cursor.expect(&Tok::Dot)?;
            if is_marker(&fact, "end") {
                break;
            }
            if is_marker(&fact, "begin") {
                return Err(Error::Parse {
                    line: fact_line,
                    column: 1,
                    message: format!("missing end(model). for block opened at line {line}"),
                });
            }
            if !fact.is_ground() {
                return Err(Error::Format {
                    line: fact_line,
                    message: format!("fact {fact} is not ground"),
                });
            }
            facts.insert(fact);
        }
        let mut events: Vec<Event> = facts.iter().filter_map(Event::from_record).collect();
        sort_events(&mut events);
        out.push(Interpretation {
            situation,
            source: Symbol::intern(source),
            label: Symbol::intern(label),
            facts,
            events,
        });
    }
    Ok(out)
}

pub fn write_model_file<'a>(interpretations: impl IntoIterator<Item = &'a Interpretation>) -> String {
    let mut out = String::new();
    for interp in interpretations {
        out.push_str("begin(model).\n");
        out.push_str(&interp.identifier());
        out.push_str(".\n");
        for fact in interp.facts.iter() {
            out.push_str(&fact.to_string());
            out.push_str(".\n");
        }
        out.push_str("end(model).\n");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    pub const DOUBLET_ECG: &str = "begin(model).\ndoublet_3_I.\np(p7,4905,normal).\nqrs(r7,5026,normal).\nsuc(r7,p7).\nqrs(r8,5638,abnormal).\nsuc(r8,r7).\nqrs(r9,6448,abnormal).\nsuc(r9,r8).\nend(model).\n";
    pub const RS_ABP: &str = "begin(model).\nrs_3_ABP.\ndias(pd4,3406,80).\nsuc(pd4,ps3).\nsys(ps4,3558,120).\nsuc(ps4,pd4).\nend(model).\n";

    #[test]
    fn parses_left_block() {
        let parsed = parse_model_file(DOUBLET_ECG).unwrap();
        assert_eq!(parsed.len(), 1);
        let i = &parsed[0];
        assert_eq!(i.label.as_str(), "doublet");
        assert_eq!(i.situation, 3);
        assert_eq!(i.source.as_str(), "I");
        assert_eq!(i.facts.len(), 7);
        assert!(i.facts.contains(&Literal::parse("qrs(r8,5638,abnormal)").unwrap()));
        assert_eq!(i.events.len(), 4);
        assert_eq!(i.events[0].id.as_str(), "p7");
    }

    #[test]
    fn parses_right_block() {
        let i = &parse_model_file(RS_ABP).unwrap()[0];
        assert_eq!(i.label.as_str(), "rs");
        assert_eq!(i.source.as_str(), "ABP");
        assert_eq!(i.facts.len(), 4);
        assert!(i.facts.contains(&Literal::parse("sys(ps4,3558,120)").unwrap()));
    }

    #[test]
    fn empty_text() {
        assert!(parse_model_file("").unwrap().is_empty());
        assert_eq!(write_model_file(&[]), "");
    }

    #[test]
    fn round_trip_two_blocks_in_order() {
        let text = format!("{DOUBLET_ECG}{RS_ABP}");
        let parsed = parse_model_file(&text).unwrap();
        let written = write_model_file(&parsed);
        assert_eq!(written, text);
        assert_eq!(parse_model_file(&written).unwrap(), parsed);
    }

    #[test]
    fn comments_and_whitespace() {
        let text = "% header\nbegin( model ).  doublet_3_I.\n  qrs( r1 , 10 , normal ). % c\nend(model).";
        let parsed = parse_model_file(text).unwrap();
        assert_eq!(parsed[0].facts.len(), 1);
    }

    #[test]
    fn missing_end_reports_line() {
        let err = parse_model_file("begin(model).\nsr_1_I.\nqrs(r1,10,normal).\n").unwrap_err();
        assert!(matches!(err, Error::Parse { .. }), "{err:?}");
        let err = parse_model_file("begin(model).\nsr_1_I.\nbegin(model).\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err:?}");
    }

    #[test]
    fn bad_identifier_is_format_error() {
        let err = parse_model_file("begin(model).\nsr_x_I.\nend(model).\n").unwrap_err();
        assert!(matches!(err, Error::Format { line: 2, .. }), "{err:?}");
        let err = parse_model_file("begin(model).\nsr.\nend(model).\n").unwrap_err();
        assert!(matches!(err, Error::Format { .. }), "{err:?}");
    }

    #[test]
    fn non_ground_fact_is_format_error() {
        let err = parse_model_file("begin(model).\nsr_1_I.\nqrs(R,10,normal).\nend(model).\n").unwrap_err();
        assert!(matches!(err, Error::Format { line: 3, .. }), "{err:?}");
    }

    #[test]
    fn underscore_in_class_name() {
        let i = &parse_model_file("begin(model).\nsinus_rhythm_12_ECG.\nend(model).\n").unwrap()[0];
        assert_eq!(i.label.as_str(), "sinus_rhythm");
        assert_eq!(i.situation, 12);
        assert_eq!(i.source.as_str(), "ECG");
    }
}
