//! DLAB text: `Min-Max:[item, ...]` lists (either bound may be `len`) whose
//! items are literal templates or nested lists. Literal arguments may
//! themselves be lists of terms, e.g. `p(P1,1-1:[normal,abnormal])`.

use std::fmt::{self, Write as _};

use crate::error::{Error, Result};
use crate::logic::Term;
use crate::symbol::Symbol;
use crate::syntax::{tokenize, Cursor, Tok};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bound {
    Count(usize),
    Len,
}

impl Bound {
    pub fn resolve(self, len: usize) -> usize {
        match self {
            Bound::Count(n) => n,
            Bound::Len => len,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Count(n) => write!(f, "{n}"),
            Bound::Len => f.write_str("len"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ArgNode {
    Term(Term),
    Choice {
        min: Bound,
        max: Bound,
        children: Vec<ArgNode>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiteralTemplate {
    pub pred: Symbol,
    pub args: Vec<ArgNode>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DlabNode {
    Terminal(LiteralTemplate),
    Choice {
        min: Bound,
        max: Bound,
        children: Vec<DlabNode>,
    },
}

impl DlabNode {
    pub fn choice(min: Bound, max: Bound, children: Vec<DlabNode>) -> Self {
        DlabNode::Choice { min, max, children }
    }

    /// `len-len:[...]`: every child is mandatory.
    pub fn all(children: Vec<DlabNode>) -> Self {
        DlabNode::choice(Bound::Len, Bound::Len, children)
    }

    /// `0-1:[...]`.
    pub fn optional(children: Vec<DlabNode>) -> Self {
        DlabNode::choice(Bound::Count(0), Bound::Count(1), children)
    }

    /// `1-1:[...]`.
    pub fn one_of(children: Vec<DlabNode>) -> Self {
        DlabNode::choice(Bound::Count(1), Bound::Count(1), children)
    }

    pub fn literal(pred: &str, args: Vec<ArgNode>) -> Self {
        DlabNode::Terminal(LiteralTemplate {
            pred: Symbol::intern(pred),
            args,
        })
    }
}

impl ArgNode {
    pub fn term(name: &str) -> Self {
        ArgNode::Term(Term::parse_name(name))
    }

    /// `1-1:[v1, ..., vn]` over constants.
    pub fn one_of<'a>(values: impl IntoIterator<Item = &'a str>) -> Self {
        ArgNode::Choice {
            min: Bound::Count(1),
            max: Bound::Count(1),
            children: values.into_iter().map(ArgNode::term).collect(),
        }
    }
}

fn check_bounds(min: Bound, max: Bound, len: usize, cursor: &Cursor<'_>) -> Result<()> {
    let (lo, hi) = (min.resolve(len), max.resolve(len));
    if lo > hi {
        return Err(Error::Bias(format!(
            "minimum {min} exceeds maximum {max} near line {}",
            cursor.line()
        )));
    }
    if lo > len {
        return Err(Error::Bias(format!(
            "minimum {min} exceeds list length {len} near line {}",
            cursor.line()
        )));
    }
    Ok(())
}

fn is_header(cursor: &Cursor<'_>) -> bool {
    match (cursor.peek(), cursor.peek_at(1)) {
        (Some(Tok::Name(n)), Some(Tok::Dash)) => n == "len" || n.parse::<usize>().is_ok(),
        _ => false,
    }
}

fn parse_bound(cursor: &mut Cursor<'_>) -> Result<Bound> {
    match cursor.bump() {
        Some(Tok::Name(n)) if n == "len" => Ok(Bound::Len),
        Some(Tok::Name(n)) => n
            .parse()
            .map(Bound::Count)
            .map_err(|_| cursor.error(format!("expected a count or len, found {n:?}"))),
        Some(t) => Err(cursor.error(format!("expected a count or len, found {t:?}"))),
        None => Err(cursor.error("expected a count or len, found end of input")),
    }
}

fn parse_header(cursor: &mut Cursor<'_>) -> Result<(Bound, Bound)> {
    let min = parse_bound(cursor)?;
    cursor.expect(&Tok::Dash)?;
    let max = parse_bound(cursor)?;
    cursor.expect(&Tok::Colon)?;
    cursor.expect(&Tok::LBracket)?;
    Ok((min, max))
}

fn parse_list<T>(
    cursor: &mut Cursor<'_>,
    item: impl Fn(&mut Cursor<'_>) -> Result<T>,
) -> Result<Vec<T>> {
    let mut items = vec![item(cursor)?];
    while cursor.eat(&Tok::Comma) {
        items.push(item(cursor)?);
    }
    match cursor.peek() {
        Some(Tok::RBracket) => {
            cursor.bump();
            Ok(items)
        }
        Some(t) => Err(cursor.error(format!("expected ',' or ']', found {t:?}"))),
        None => Err(cursor.error("unbalanced brackets: missing ']'")),
    }
}

fn parse_arg(cursor: &mut Cursor<'_>) -> Result<ArgNode> {
    if is_header(cursor) {
        let (min, max) = parse_header(cursor)?;
        let children = parse_list(cursor, parse_arg)?;
        check_bounds(min, max, children.len(), cursor)?;
        return Ok(ArgNode::Choice { min, max, children });
    }
    match cursor.bump() {
        Some(Tok::Name(n)) => Ok(ArgNode::Term(Term::constant(n))),
        Some(Tok::Var(v)) => Ok(ArgNode::Term(Term::var(v))),
        Some(t) => Err(cursor.error(format!("expected argument, found {t:?}"))),
        None => Err(cursor.error("expected argument, found end of input")),
    }
}

fn parse_node(cursor: &mut Cursor<'_>) -> Result<DlabNode> {
    if is_header(cursor) {
        let (min, max) = parse_header(cursor)?;
        let children = parse_list(cursor, parse_node)?;
        check_bounds(min, max, children.len(), cursor)?;
        return Ok(DlabNode::Choice { min, max, children });
    }
    let pred = match cursor.bump() {
        Some(Tok::Name(n)) => Symbol::intern(n),
        Some(t) => return Err(cursor.error(format!("unexpected token {t:?}"))),
        None => return Err(cursor.error("unexpected end of input")),
    };
    let mut args = Vec::new();
    if cursor.eat(&Tok::LParen) {
        args.push(parse_arg(cursor)?);
        while cursor.eat(&Tok::Comma) {
            args.push(parse_arg(cursor)?);
        }
        cursor.expect(&Tok::RParen)?;
    }
    Ok(DlabNode::Terminal(LiteralTemplate { pred, args }))
}

/// Parses DLAB text. Several top-level items (or a single literal) are
/// wrapped in an implicit `len-len` list so the root is always a list.
pub fn parse_dlab_node(text: &str) -> Result<DlabNode> {
    let tokens = tokenize(text)?;
    let mut cursor = Cursor::new(&tokens);
    let mut items = vec![parse_node(&mut cursor)?];
    loop {
        if cursor.eat(&Tok::Comma) {
            if cursor.at_end() {
                break;
            }
            items.push(parse_node(&mut cursor)?);
        } else if cursor.eat(&Tok::Dot) || cursor.at_end() {
            break;
        } else if cursor.peek() == Some(&Tok::RBracket) {
            return Err(cursor.error("unbalanced brackets: unexpected ']'"));
        } else {
            return Err(cursor.error(format!("unexpected token {:?}", cursor.peek().unwrap())));
        }
    }
    if !cursor.at_end() {
        return Err(cursor.error("trailing input after template"));
    }
    if items.len() == 1 && matches!(items[0], DlabNode::Choice { .. }) {
        Ok(items.pop().unwrap())
    } else {
        Ok(DlabNode::all(items))
    }
}

impl fmt::Display for ArgNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArgNode::Term(t) => write!(f, "{t}"),
            ArgNode::Choice { min, max, children } => {
                write!(f, "{min}-{max}:[")?;
                for (i, c) in children.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{c}")?;
                }
                f.write_str("]")
            }
        }
    }
}

impl fmt::Display for LiteralTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.pred)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{a}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

fn write_node(out: &mut String, node: &DlabNode, indent: usize) {
    match node {
        DlabNode::Terminal(t) => {
            let _ = write!(out, "{t}");
        }
        DlabNode::Choice { min, max, children } => {
            let flat = children.iter().all(|c| matches!(c, DlabNode::Terminal(_)));
            let _ = write!(out, "{min}-{max}:[");
            for (i, c) in children.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                    if flat {
                        out.push(' ');
                    }
                }
                if !flat {
                    out.push('\n');
                    out.push_str(&"  ".repeat(indent + 1));
                }
                write_node(out, c, indent + 1);
            }
            if !flat {
                out.push('\n');
                out.push_str(&"  ".repeat(indent));
            }
            out.push(']');
        }
    }
}

impl fmt::Display for DlabNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        write_node(&mut out, self, 0);
        f.write_str(&out)
    }
}
