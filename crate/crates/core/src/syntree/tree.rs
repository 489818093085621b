use std::fmt;

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TreeError {
    #[error("unbalanced brackets: missing ')' at offset {offset}")]
    Unclosed { offset: usize },
    #[error("unexpected ')' at offset {offset}")]
    UnexpectedClose { offset: usize },
    #[error("unexpected text after the tree at offset {offset}")]
    Trailing { offset: usize },
    #[error("expected '(' at offset {offset}")]
    ExpectedOpen { offset: usize },
    #[error("empty node at offset {offset}")]
    EmptyNode { offset: usize },
    #[error("node at offset {offset} mixes a terminal with other children")]
    MixedNode { offset: usize },
}

/// A label with optional `#feature` suffixes, e.g. `VP#imp`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Label {
    pub symbol: String,
    pub features: Vec<String>,
}

impl Label {
    pub fn parse(text: &str) -> Label {
        let mut parts = text.split('#');
        let symbol = parts.next().unwrap_or_default().to_string();
        Label {
            symbol,
            features: parts.filter(|f| !f.is_empty()).map(str::to_string).collect(),
        }
    }

    /// `self` used as a pattern: symbols equal and every feature of the
    /// pattern present on `other`.
    pub fn matches(&self, other: &Label) -> bool {
        self.symbol == other.symbol && self.features.iter().all(|f| other.features.contains(f))
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.symbol)?;
        for feat in &self.features {
            write!(f, "#{feat}")?;
        }
        Ok(())
    }
}

/// A constituency tree. Preterminals such as `(D le)` are leaves carrying
/// their token; every other node has at least one child.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseTree {
    Node { label: Label, children: Vec<ParseTree> },
    Leaf { label: Label, token: String },
}

impl ParseTree {
    pub fn leaf(label: &str, token: &str) -> ParseTree {
        ParseTree::Leaf {
            label: Label::parse(label),
            token: token.to_string(),
        }
    }

    pub fn label(&self) -> &Label {
        match self {
            ParseTree::Node { label, .. } | ParseTree::Leaf { label, .. } => label,
        }
    }

    pub fn children(&self) -> &[ParseTree] {
        match self {
            ParseTree::Node { children, .. } => children,
            ParseTree::Leaf { .. } => &[],
        }
    }

    /// Leaf tokens left to right.
    pub fn tokens(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_tokens(&mut out);
        out
    }

    fn collect_tokens<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            ParseTree::Leaf { token, .. } => out.push(token),
            ParseTree::Node { children, .. } => {
                for c in children {
                    c.collect_tokens(out);
                }
            }
        }
    }

    /// Leaf tokens joined by single spaces.
    pub fn yield_string(&self) -> String {
        self.tokens().join(" ")
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            ParseTree::Leaf { .. } => 1,
            ParseTree::Node { children, .. } => children.iter().map(ParseTree::leaf_count).sum(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            ParseTree::Leaf { .. } => 1,
            ParseTree::Node { children, .. } => 1 + children.iter().map(ParseTree::depth).max().unwrap_or(0),
        }
    }

    /// Parse one PTB-style bracketed tree. An unlabeled outer wrapper
    /// around a single tree, as in `( (S ...) )`, is removed.
    ///
    /// ```
    /// use lrtk::syntree::ParseTree;
    /// let t = ParseTree::parse("(S (NP (PRO elle)) (VP (V pense)))").unwrap();
    /// assert_eq!(t.yield_string(), "elle pense");
    /// assert_eq!(t.depth(), 3);
    /// ```
    pub fn parse(text: &str) -> Result<ParseTree, TreeError> {
        let tokens = lex(text);
        let mut pos = 0;
        let tree = parse_node(&tokens, &mut pos, text.len())?;
        if let Some(tok) = tokens.get(pos) {
            return Err(match tok.kind {
                Tok::Close => TreeError::UnexpectedClose { offset: tok.offset },
                _ => TreeError::Trailing { offset: tok.offset },
            });
        }
        Ok(tree)
    }
}

impl fmt::Display for ParseTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseTree::Leaf { label, token } => write!(f, "({label} {token})"),
            ParseTree::Node { label, children } => {
                write!(f, "({label}")?;
                for c in children {
                    write!(f, " {c}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tok<'a> {
    Open,
    Close,
    Atom(&'a str),
}

#[derive(Debug, Clone, Copy)]
struct Token<'a> {
    kind: Tok<'a>,
    offset: usize,
}

fn lex(text: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut atom_start: Option<usize> = None;
    for (i, c) in text.char_indices() {
        if c == '(' || c == ')' || c.is_whitespace() {
            if let Some(s) = atom_start.take() {
                out.push(Token {
                    kind: Tok::Atom(&text[s..i]),
                    offset: s,
                });
            }
            match c {
                '(' => out.push(Token {
                    kind: Tok::Open,
                    offset: i,
                }),
                ')' => out.push(Token {
                    kind: Tok::Close,
                    offset: i,
                }),
                _ => {}
            }
        } else if atom_start.is_none() {
            atom_start = Some(i);
        }
    }
    if let Some(s) = atom_start {
        out.push(Token {
            kind: Tok::Atom(&text[s..]),
            offset: s,
        });
    }
    out
}

fn parse_node(tokens: &[Token<'_>], pos: &mut usize, end: usize) -> Result<ParseTree, TreeError> {
    let open = match tokens.get(*pos) {
        Some(Token {
            kind: Tok::Open,
            offset,
        }) => *offset,
        Some(Token {
            kind: Tok::Close,
            offset,
        }) => return Err(TreeError::UnexpectedClose { offset: *offset }),
        Some(t) => return Err(TreeError::ExpectedOpen { offset: t.offset }),
        None => return Err(TreeError::ExpectedOpen { offset: end }),
    };
    *pos += 1;
    let label = match tokens.get(*pos) {
        Some(Token { kind: Tok::Atom(a), .. }) => {
            *pos += 1;
            Some(Label::parse(a))
        }
        _ => None,
    };
    let mut children = Vec::new();
    let mut terminal: Option<&str> = None;
    loop {
        match tokens.get(*pos) {
            None => return Err(TreeError::Unclosed { offset: end }),
            Some(Token { kind: Tok::Close, .. }) => {
                *pos += 1;
                break;
            }
            Some(Token { kind: Tok::Atom(a), .. }) => {
                if terminal.is_some() || !children.is_empty() {
                    return Err(TreeError::MixedNode { offset: open });
                }
                terminal = Some(a);
                *pos += 1;
            }
            Some(Token { kind: Tok::Open, .. }) => {
                if terminal.is_some() {
                    return Err(TreeError::MixedNode { offset: open });
                }
                children.push(parse_node(tokens, pos, end)?);
            }
        }
    }
    match (label, terminal) {
        (Some(label), Some(token)) => Ok(ParseTree::Leaf {
            label,
            token: token.to_string(),
        }),
        (Some(label), None) if !children.is_empty() => Ok(ParseTree::Node { label, children }),
        (None, None) if children.len() == 1 => Ok(children.pop().expect("one child")),
        _ => Err(TreeError::EmptyNode { offset: open }),
    }
}
