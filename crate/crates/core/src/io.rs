//! Text formats: the weighted base grammar, network JSON and DOT export.
//!
//! Base files hold one `WEIGHT ':' FORMULA` entry per line. `#` starts a
//! comment, and an optional `vars a b c` line (before any entry) fixes the
//! universe and its order. Formulas use `!`, `&`, `|`, parentheses,
//! identifiers and the constants `true` / `false`; `&` binds tighter than
//! `|`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, ParseError, Result};
use crate::model::{Formula, FormulaBase, Interpretation, Literal, Var, Weight, WeightedBase};
use crate::network::{check_normalization, Cpt, Network, NormalizationReport};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Token {
    Ident(String),
    Not,
    And,
    Or,
    Open,
    Close,
}

struct Lexed {
    token: Token,
    column: usize,
}

/// `offset` is the 0-based character column of `text` within its line.
fn lex(text: &str, line: usize, offset: usize) -> std::result::Result<(Vec<Lexed>, usize), ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = offset + i + 1;
        let token = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '!' => Token::Not,
            '&' => Token::And,
            '|' => Token::Or,
            '(' => Token::Open,
            ')' => Token::Close,
            c if c.is_ascii_alphanumeric() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push(Lexed {
                    token: Token::Ident(chars[start..i].iter().collect()),
                    column,
                });
                continue;
            }
            other => return Err(ParseError::new(line, column, format!("unexpected character `{other}`"))),
        };
        out.push(Lexed { token, column });
        i += 1;
    }
    Ok((out, offset + chars.len() + 1))
}

struct FormulaParser<'a> {
    tokens: &'a [Lexed],
    pos: usize,
    line: usize,
    end_column: usize,
    universe: Option<&'a [Var]>,
}

impl FormulaParser<'_> {
    fn error(&self, message: impl Into<String>) -> ParseError {
        let column = self.tokens.get(self.pos).map_or(self.end_column, |t| t.column);
        ParseError::new(self.line, column, message)
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|t| &t.token)
    }

    fn parse(mut self) -> std::result::Result<Formula, ParseError> {
        if self.tokens.is_empty() {
            return Err(self.error("expected a formula"));
        }
        let f = self.disjunction()?;
        if self.pos < self.tokens.len() {
            return Err(self.error("unexpected token after formula"));
        }
        Ok(f)
    }

    fn disjunction(&mut self) -> std::result::Result<Formula, ParseError> {
        let mut parts = vec![self.conjunction()?];
        while self.peek() == Some(&Token::Or) {
            self.pos += 1;
            parts.push(self.conjunction()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Formula::Or(parts) })
    }

    fn conjunction(&mut self) -> std::result::Result<Formula, ParseError> {
        let mut parts = vec![self.unary()?];
        while self.peek() == Some(&Token::And) {
            self.pos += 1;
            parts.push(self.unary()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Formula::And(parts) })
    }

    fn unary(&mut self) -> std::result::Result<Formula, ParseError> {
        match self.peek().cloned() {
            Some(Token::Not) => {
                self.pos += 1;
                Ok(match self.unary()? {
                    Formula::Lit(l) => Formula::Lit(l.negate()),
                    f => Formula::negation(f),
                })
            }
            Some(Token::Open) => {
                self.pos += 1;
                let f = self.disjunction()?;
                if self.peek() != Some(&Token::Close) {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(f)
            }
            Some(Token::Ident(name)) => {
                let f = match name.as_str() {
                    "true" => Formula::Const(true),
                    "false" => Formula::Const(false),
                    _ => {
                        let v = Var::new(&name).map_err(|_| self.error(format!("invalid variable `{name}`")))?;
                        if let Some(u) = self.universe {
                            if !u.contains(&v) {
                                return Err(self.error(format!("variable `{v}` is not declared")));
                            }
                        }
                        Formula::var(&v)
                    }
                };
                self.pos += 1;
                Ok(f)
            }
            Some(_) => Err(self.error("expected a literal, `!` or `(`")),
            None => Err(self.error("unexpected end of formula")),
        }
    }
}

fn parse_formula_at(
    text: &str,
    line: usize,
    offset: usize,
    universe: Option<&[Var]>,
) -> std::result::Result<Formula, ParseError> {
    let (tokens, end_column) = lex(text, line, offset)?;
    FormulaParser {
        tokens: &tokens,
        pos: 0,
        line,
        end_column,
        universe,
    }
    .parse()
}

pub fn parse_formula(text: &str) -> std::result::Result<Formula, ParseError> {
    parse_formula_at(text, 1, 0, None)
}

fn char_col(line: &str, byte: usize) -> usize {
    line[..byte].chars().count()
}

/// Parses the base grammar. Weights must lie in `(0, 1]`.
pub fn parse_base(text: &str) -> std::result::Result<FormulaBase, ParseError> {
    let mut declared: Option<Vec<Var>> = None;
    let mut entries = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let line = raw.split('#').next().unwrap_or("");
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let lead = line.len() - line.trim_start().len();
        if trimmed == "vars" || trimmed.starts_with("vars ") || trimmed.starts_with("vars\t") {
            if declared.is_some() {
                return Err(ParseError::new(line_no, lead + 1, "duplicate `vars` line"));
            }
            if !entries.is_empty() {
                return Err(ParseError::new(line_no, lead + 1, "`vars` must precede all entries"));
            }
            let mut vars = Vec::new();
            let mut rest = &line[lead + 4..];
            let mut base_off = lead + 4;
            while let Some(start) = rest.find(|c: char| !c.is_whitespace()) {
                let end = rest[start..].find(char::is_whitespace).map_or(rest.len(), |e| start + e);
                let name = &rest[start..end];
                let column = char_col(line, base_off + start) + 1;
                let v = Var::new(name)
                    .map_err(|_| ParseError::new(line_no, column, format!("invalid variable `{name}`")))?;
                if vars.contains(&v) {
                    return Err(ParseError::new(line_no, column, format!("variable `{v}` declared twice")));
                }
                vars.push(v);
                base_off += end;
                rest = &rest[end..];
            }
            declared = Some(vars);
            continue;
        }
        let Some(colon) = line.find(':') else {
            return Err(ParseError::new(line_no, lead + 1, "expected `WEIGHT: FORMULA`"));
        };
        let weight_text = line[..colon].trim();
        let weight: Weight = weight_text.parse().map_err(|e| {
            let msg = match e {
                Error::WeightOutOfRange(_) => format!("weight `{weight_text}` is outside (0, 1]"),
                _ => format!("invalid weight `{weight_text}`"),
            };
            ParseError::new(line_no, lead + 1, msg)
        })?;
        if weight.is_zero() {
            return Err(ParseError::new(line_no, lead + 1, format!("weight `{weight_text}` is outside (0, 1]")));
        }
        let offset = char_col(line, colon + 1);
        let formula = parse_formula_at(&line[colon + 1..], line_no, offset, declared.as_deref())?;
        entries.push((formula, weight));
    }
    Ok(match declared {
        Some(vars) => FormulaBase::new(vars, entries).expect("variables checked while parsing"),
        None => FormulaBase::from_entries(entries),
    })
}

/// Writes a clausal base in the input grammar; weights always as `p/q`
/// (or `1`).
pub fn serialize_base(b: &WeightedBase) -> String {
    let mut out = String::from("vars");
    for v in b.vars() {
        write!(out, " {v}").unwrap();
    }
    out.push('\n');
    for (c, w) in b.entries() {
        writeln!(out, "{w}: {c}").unwrap();
    }
    out
}

/// Parses a comma-separated list of literals such as `se,!wi,su`.
pub fn parse_literals(text: &str) -> std::result::Result<Vec<Literal>, ParseError> {
    let mut out = Vec::new();
    let mut column = 1;
    for part in text.split(',') {
        let item = part.trim();
        let lead = part.len() - part.trim_start().len();
        let (name, positive) = match item.strip_prefix('!') {
            Some(n) => (n.trim(), false),
            None => (item, true),
        };
        let v = Var::new(name)
            .map_err(|_| ParseError::new(1, column + lead, format!("invalid literal `{item}`")))?;
        out.push(Literal::new(v, positive));
        column += part.chars().count() + 1;
    }
    Ok(out)
}

/// A full world over `vars` from a literal list.
pub fn parse_world(text: &str, vars: &[Var]) -> Result<Interpretation> {
    let lits = parse_literals(text)?;
    Interpretation::from_literals(Arc::from(vars.to_vec()), &lits)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkDoc {
    nodes: Vec<NodeDoc>,
    ordering: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeDoc {
    cpt: Vec<CellDoc>,
    parents: Vec<String>,
    var: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CellDoc {
    assignment: BTreeMap<String, bool>,
    polarity: bool,
    weight: String,
}

/// Canonical JSON: keys sorted, nodes in ordering order, cells by parent
/// instantiation then positive before negative.
pub fn serialize_network(n: &Network) -> String {
    let nodes = n
        .nodes()
        .iter()
        .map(|cpt| {
            let cells = (0..cpt.columns())
                .flat_map(|col| {
                    let assignment: BTreeMap<String, bool> = cpt
                        .assignment(col)
                        .iter()
                        .map(|l| (l.var().to_string(), l.is_positive()))
                        .collect();
                    [true, false].map(|polarity| CellDoc {
                        assignment: assignment.clone(),
                        polarity,
                        weight: cpt.get(col, polarity).to_string(),
                    })
                })
                .collect();
            NodeDoc {
                cpt: cells,
                parents: cpt.parents().iter().map(|p| p.to_string()).collect(),
                var: cpt.var().to_string(),
            }
        })
        .collect();
    let doc = NetworkDoc {
        nodes,
        ordering: n.ordering().iter().map(|v| v.to_string()).collect(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("plain data serializes");
    text.push('\n');
    text
}

/// A parsed network together with its normalization audit; violations are
/// reported, not rejected.
#[derive(Clone, Debug)]
pub struct ParsedNetwork {
    pub network: Network,
    pub warnings: NormalizationReport,
}

fn schema(message: impl Into<String>) -> Error {
    Error::InvalidNetwork(message.into())
}

fn var_of(name: &str) -> Result<Var> {
    Var::new(name).map_err(|_| schema(format!("invalid variable `{name}`")))
}

pub fn parse_network(text: &str) -> Result<ParsedNetwork> {
    let doc: NetworkDoc = serde_json::from_str(text)
        .map_err(|e| ParseError::new(e.line(), e.column(), e.to_string()))?;
    let ordering = doc.ordering.iter().map(|s| var_of(s)).collect::<Result<Vec<_>>>()?;
    let mut nodes = Vec::with_capacity(doc.nodes.len());
    for node in &doc.nodes {
        let var = var_of(&node.var)?;
        let parents = node.parents.iter().map(|s| var_of(s)).collect::<Result<Vec<_>>>()?;
        if parents.len() >= 32 {
            return Err(schema(format!("too many parents for `{var}`")));
        }
        let columns = 1usize << parents.len();
        let mut cells: Vec<[Option<Weight>; 2]> = vec![[None, None]; columns];
        for cell in &node.cpt {
            if cell.assignment.len() != parents.len() {
                return Err(schema(format!("cell of `{var}` does not assign exactly its parents")));
            }
            let mut col = 0usize;
            for (j, p) in parents.iter().enumerate() {
                match cell.assignment.get(p.name()) {
                    Some(true) => col |= 1 << j,
                    Some(false) => {}
                    None => return Err(schema(format!("cell of `{var}` misses parent `{p}`"))),
                }
            }
            let weight: Weight = cell
                .weight
                .parse()
                .map_err(|_| schema(format!("bad weight `{}` in table of `{var}`", cell.weight)))?;
            let slot = &mut cells[col][usize::from(!cell.polarity)];
            if slot.is_some() {
                return Err(schema(format!("duplicate cell in table of `{var}`")));
            }
            *slot = Some(weight);
        }
        let cells = cells
            .into_iter()
            .map(|[a, b]| match (a, b) {
                (Some(a), Some(b)) => Ok([a, b]),
                _ => Err(schema(format!("incomplete table for `{var}`"))),
            })
            .collect::<Result<Vec<_>>>()?;
        nodes.push(Cpt::new(var, parents, cells)?);
    }
    let network = Network::new(ordering, nodes)?;
    let warnings = check_normalization(&network);
    Ok(ParsedNetwork { network, warnings })
}

fn dot_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// DOT digraph with parent-to-child edges. Root labels show the prior,
/// other labels the table shape.
pub fn export_dot(n: &Network) -> String {
    let mut out = String::from("digraph possnet {\n");
    for cpt in n.nodes() {
        let v = cpt.var();
        let label = if cpt.parents().is_empty() {
            format!("{v}\\nΠ({v}) = {}, Π(!{v}) = {}", cpt.get(0, true), cpt.get(0, false))
        } else {
            let ps: Vec<String> = cpt.parents().iter().map(|p| p.to_string()).collect();
            format!("{v}\\nΠ({v} | {}): {} cells", ps.join(", "), 2 * cpt.columns())
        };
        writeln!(out, "  {} [label=\"{}\"];", dot_quote(v.name()), label.replace('"', "\\\"")).unwrap();
    }
    for (parent, child) in n.edges() {
        writeln!(out, "  {} -> {};", dot_quote(parent.name()), dot_quote(child.name())).unwrap();
    }
    out.push_str("}\n");
    out
}
