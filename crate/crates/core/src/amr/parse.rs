//! Penman notation reader.
//!
//! The reader is a hand-rolled lexer plus recursive descent over the tiny
//! Penman grammar. Every error carries the line/column it was detected at.
//! A bare token in target position is a node reference when the variable
//! is defined anywhere in the expression (forward references included) and
//! a constant otherwise, so attribute edges are exactly the edges whose
//! target is not a variable.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use super::{
    inverse_base, AmrGraph, Attribute, Constant, GraphError, NodeId, PenmanOptions, Relation,
};

/// 1-based line/column position in the input text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Location {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{0}: unbalanced parentheses")]
    UnbalancedParens(Location),
    #[error("{1}: variable `{0}` defined more than once")]
    DuplicateVariableDefinition(String, Location),
    #[error("{1}: reference to undefined variable `{0}`")]
    UndefinedVariableReference(String, Location),
    #[error("{0}: no graph in input")]
    EmptyGraph(Location),
    #[error("{0}: content after the closing parenthesis")]
    TrailingContent(Location),
    #[error("{pos}: expected {expected}, found {found}")]
    Expected { expected: &'static str, found: String, pos: Location },
    #[error("{0}: unterminated string")]
    UnterminatedString(Location),
    #[error("{pos}: {source}")]
    Invalid {
        #[source]
        source: GraphError,
        pos: Location,
    },
}

impl ParseError {
    pub fn location(&self) -> Location {
        match self {
            ParseError::UnbalancedParens(l)
            | ParseError::DuplicateVariableDefinition(_, l)
            | ParseError::UndefinedVariableReference(_, l)
            | ParseError::EmptyGraph(l)
            | ParseError::TrailingContent(l)
            | ParseError::UnterminatedString(l) => *l,
            ParseError::Expected { pos, .. } | ParseError::Invalid { pos, .. } => *pos,
        }
    }
}

/// Parse one Penman expression with default options (inverse-role
/// normalization on). Comment lines starting with `#` may precede it.
pub fn parse_penman(text: &str) -> Result<AmrGraph, ParseError> {
    parse_penman_with(text, &PenmanOptions::default())
}

/// Parse one Penman expression.
pub fn parse_penman_with(text: &str, opts: &PenmanOptions) -> Result<AmrGraph, ParseError> {
    let tokens = lex(text)?;
    if tokens.is_empty() {
        let end = end_location(text);
        return Err(ParseError::EmptyGraph(end));
    }

    let defined = scan_definitions(&tokens)?;
    let mut parser = Parser { tokens: &tokens, pos: 0, defined: &defined, graph: RawGraph::default() };
    let root = parser.node()?;
    if let Some(t) = parser.peek() {
        return Err(match t.tok {
            Tok::RParen => ParseError::UnbalancedParens(t.loc),
            _ => ParseError::TrailingContent(t.loc),
        });
    }

    let RawGraph { instances, mut relations, attributes } = parser.graph;
    if opts.normalize_inverse {
        for (rel, _) in relations.iter_mut() {
            while let Some(base) = inverse_base(&rel.role) {
                rel.role = base.to_owned();
                std::mem::swap(&mut rel.source, &mut rel.target);
            }
        }
    }

    let rels: Vec<Relation> = relations.iter().map(|(r, _)| r.clone()).collect();
    let attrs: Vec<Attribute> = attributes.iter().map(|(a, _)| a.clone()).collect();
    AmrGraph::new(root, instances, rels, attrs).map_err(|e| {
        let pos = error_location(&relations, &attributes, &e, tokens[0].loc);
        ParseError::Invalid { source: e, pos }
    })
}

#[derive(Default)]
struct RawGraph {
    instances: BTreeMap<NodeId, String>,
    relations: Vec<(Relation, Location)>,
    attributes: Vec<(Attribute, Location)>,
}

/// Best-effort position for a validation error: the role token of the edge
/// it names, else the start of the expression.
fn error_location(
    relations: &[(Relation, Location)],
    attributes: &[(Attribute, Location)],
    err: &GraphError,
    fallback: Location,
) -> Location {
    match err {
        GraphError::SelfEdge(node, role) => relations
            .iter()
            .find(|(r, _)| &r.role == role && (&r.source == node || &r.target == node))
            .map(|(_, l)| *l),
        GraphError::RelationMultiEdge(s, t) => relations
            .iter()
            .rev()
            .find(|(r, _)| {
                (&r.source == s && &r.target == t) || (&r.source == t && &r.target == s)
            })
            .map(|(_, l)| *l),
        GraphError::DuplicateAttribute(s, label, _) => attributes
            .iter()
            .rev()
            .find(|(a, _)| &a.source == s && &a.label == label)
            .map(|(_, l)| *l),
        _ => None,
    }
    .unwrap_or(fallback)
}

struct Parser<'t> {
    tokens: &'t [Spanned],
    pos: usize,
    defined: &'t HashSet<String>,
    graph: RawGraph,
}

impl<'t> Parser<'t> {
    fn peek(&self) -> Option<&'t Spanned> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<&'t Spanned> {
        let t = self.tokens.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn end(&self) -> Location {
        self.tokens.last().map(|t| t.loc).unwrap_or(Location { line: 1, col: 1 })
    }

    /// `( var / concept edge* )` definition, or `( var )` reference.
    fn node(&mut self) -> Result<NodeId, ParseError> {
        let open = match self.next() {
            Some(t @ Spanned { tok: Tok::LParen, .. }) => t.loc,
            Some(t) => {
                return Err(ParseError::Expected {
                    expected: "`(`",
                    found: t.tok.describe(),
                    pos: t.loc,
                })
            }
            None => return Err(ParseError::UnbalancedParens(self.end())),
        };
        let (var, var_loc) = match self.next() {
            Some(Spanned { tok: Tok::Sym(s), loc }) => (s.clone(), *loc),
            Some(t) => {
                return Err(ParseError::Expected {
                    expected: "a variable",
                    found: t.tok.describe(),
                    pos: t.loc,
                })
            }
            None => return Err(ParseError::UnbalancedParens(open)),
        };
        match self.peek() {
            Some(Spanned { tok: Tok::Slash, .. }) => {
                self.pos += 1;
                let concept = match self.next() {
                    Some(Spanned { tok: Tok::Sym(s), .. }) => s.clone(),
                    Some(t) => {
                        return Err(ParseError::Expected {
                            expected: "a concept",
                            found: t.tok.describe(),
                            pos: t.loc,
                        })
                    }
                    None => return Err(ParseError::UnbalancedParens(open)),
                };
                self.graph.instances.insert(var.clone(), concept);
                loop {
                    match self.peek() {
                        Some(Spanned { tok: Tok::Role(_), .. }) => self.edge(&var)?,
                        Some(Spanned { tok: Tok::RParen, .. }) => {
                            self.pos += 1;
                            break;
                        }
                        Some(t) => {
                            return Err(ParseError::Expected {
                                expected: "a `:role` or `)`",
                                found: t.tok.describe(),
                                pos: t.loc,
                            })
                        }
                        None => return Err(ParseError::UnbalancedParens(open)),
                    }
                }
                Ok(var)
            }
            Some(Spanned { tok: Tok::RParen, .. }) => {
                self.pos += 1;
                if self.defined.contains(&var) {
                    Ok(var)
                } else {
                    Err(ParseError::UndefinedVariableReference(var, var_loc))
                }
            }
            Some(t) => Err(ParseError::Expected {
                expected: "`/` or `)`",
                found: t.tok.describe(),
                pos: t.loc,
            }),
            None => Err(ParseError::UnbalancedParens(open)),
        }
    }

    fn edge(&mut self, source: &str) -> Result<(), ParseError> {
        let (role, role_loc) = match self.next() {
            Some(Spanned { tok: Tok::Role(r), loc }) => (r.clone(), *loc),
            _ => unreachable!("caller peeked a role"),
        };
        if role.is_empty() {
            return Err(ParseError::Expected {
                expected: "a role label after `:`",
                found: "`:`".to_owned(),
                pos: role_loc,
            });
        }
        match self.peek() {
            Some(Spanned { tok: Tok::LParen, .. }) => {
                let target = self.node()?;
                self.graph.relations.push((
                    Relation { source: source.to_owned(), role, target },
                    role_loc,
                ));
            }
            Some(Spanned { tok: Tok::Sym(s), .. }) => {
                let s = s.clone();
                self.pos += 1;
                if self.defined.contains(&s) {
                    self.graph.relations.push((
                        Relation { source: source.to_owned(), role, target: s },
                        role_loc,
                    ));
                } else {
                    let value = if is_number_token(&s) {
                        Constant::number(s)
                    } else {
                        Constant::symbol(s)
                    };
                    self.graph.attributes.push((
                        Attribute { source: source.to_owned(), label: role, value },
                        role_loc,
                    ));
                }
            }
            Some(Spanned { tok: Tok::Str(s), .. }) => {
                let value = Constant::string(s.clone());
                self.pos += 1;
                self.graph.attributes.push((
                    Attribute { source: source.to_owned(), label: role, value },
                    role_loc,
                ));
            }
            Some(t) => {
                return Err(ParseError::Expected {
                    expected: "an edge target",
                    found: t.tok.describe(),
                    pos: t.loc,
                })
            }
            None => return Err(ParseError::UnbalancedParens(role_loc)),
        }
        Ok(())
    }
}

/// Collect every `( var /` definition up front so targets can be classified
/// as node references or constants in one pass, forward references included.
fn scan_definitions(tokens: &[Spanned]) -> Result<HashSet<String>, ParseError> {
    let mut defined: HashMap<&str, Location> = HashMap::new();
    for w in tokens.windows(3) {
        if let [Spanned { tok: Tok::LParen, .. }, Spanned { tok: Tok::Sym(v), loc }, Spanned { tok: Tok::Slash, .. }] =
            w
        {
            if defined.insert(v.as_str(), *loc).is_some() {
                return Err(ParseError::DuplicateVariableDefinition(v.clone(), *loc));
            }
        }
    }
    Ok(defined.into_keys().map(str::to_owned).collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    LParen,
    RParen,
    Slash,
    Role(String),
    Sym(String),
    Str(String),
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::LParen => "`(`".to_owned(),
            Tok::RParen => "`)`".to_owned(),
            Tok::Slash => "`/`".to_owned(),
            Tok::Role(r) => format!("`:{r}`"),
            Tok::Sym(s) => format!("`{s}`"),
            Tok::Str(s) => format!("\"{s}\""),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    loc: Location,
}

fn end_location(text: &str) -> Location {
    let line = text.lines().count().max(1);
    let col = text.lines().last().map(|l| l.chars().count() + 1).unwrap_or(1);
    Location { line, col }
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut at_line_start = true;

    macro_rules! bump {
        ($c:expr) => {
            if $c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
        };
    }

    while let Some(&c) = chars.peek() {
        let loc = Location { line, col };
        match c {
            '\n' | ' ' | '\t' | '\r' => {
                chars.next();
                bump!(c);
                if c == '\n' {
                    at_line_start = true;
                }
            }
            '#' if at_line_start => {
                // Comment line: skip to end of line.
                for c in chars.by_ref() {
                    bump!(c);
                    if c == '\n' {
                        break;
                    }
                }
            }
            '(' => {
                chars.next();
                bump!(c);
                at_line_start = false;
                out.push(Spanned { tok: Tok::LParen, loc });
            }
            ')' => {
                chars.next();
                bump!(c);
                at_line_start = false;
                out.push(Spanned { tok: Tok::RParen, loc });
            }
            '/' => {
                chars.next();
                bump!(c);
                at_line_start = false;
                out.push(Spanned { tok: Tok::Slash, loc });
            }
            '"' => {
                chars.next();
                bump!(c);
                at_line_start = false;
                let mut s = String::new();
                let mut closed = false;
                while let Some(c) = chars.next() {
                    bump!(c);
                    match c {
                        '"' => {
                            closed = true;
                            break;
                        }
                        '\\' => match chars.next() {
                            Some(e) => {
                                bump!(e);
                                s.push(e);
                            }
                            None => break,
                        },
                        _ => s.push(c),
                    }
                }
                if !closed {
                    return Err(ParseError::UnterminatedString(loc));
                }
                out.push(Spanned { tok: Tok::Str(s), loc });
            }
            ':' => {
                chars.next();
                bump!(c);
                at_line_start = false;
                let mut s = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_whitespace() || matches!(d, '(' | ')' | '"' | '/') {
                        break;
                    }
                    chars.next();
                    bump!(d);
                    s.push(d);
                }
                out.push(Spanned { tok: Tok::Role(s), loc });
            }
            _ => {
                at_line_start = false;
                let mut s = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_whitespace() || matches!(d, '(' | ')' | '"' | '/') {
                        break;
                    }
                    chars.next();
                    bump!(d);
                    s.push(d);
                }
                out.push(Spanned { tok: Tok::Sym(s), loc });
            }
        }
    }
    Ok(out)
}

/// Numeric token: optional sign, digits with optional fraction, optional
/// exponent. The lexical form is preserved exactly, so `3` and `3.0` stay
/// distinct constants.
pub(crate) fn is_number_token(s: &str) -> bool {
    let rest = s.strip_prefix(['+', '-']).unwrap_or(s);
    if rest.is_empty() {
        return false;
    }
    let (mantissa, exponent) = match rest.split_once(['e', 'E']) {
        Some((m, e)) => (m, Some(e)),
        None => (rest, None),
    };
    let mantissa_ok = match mantissa.split_once('.') {
        Some((i, f)) => {
            !(i.is_empty() && f.is_empty())
                && i.chars().all(|c| c.is_ascii_digit())
                && f.chars().all(|c| c.is_ascii_digit())
        }
        None => !mantissa.is_empty() && mantissa.chars().all(|c| c.is_ascii_digit()),
    };
    let exponent_ok = match exponent {
        Some(e) => {
            let e = e.strip_prefix(['+', '-']).unwrap_or(e);
            !e.is_empty() && e.chars().all(|c| c.is_ascii_digit())
        }
        None => true,
    };
    mantissa_ok && exponent_ok
}
