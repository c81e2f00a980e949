//! Line-oriented text format for square grids.
//!
//! ```text
//! # comment
//! use "xm1.json"
//! elem g = 1
//! sq A = (g, 0, g, 0 ; 1)
//! sq B = (g, 0, g, 0 ; "2")
//! grid:
//!   A B
//!   B A
//! ```
//!
//! Values are element indices, `elem` aliases, or element names of the
//! relevant group (edges in `G`, faces in `H`). Names that are not plain
//! identifiers, such as `"(12)"`, must be quoted. Parsing runs in two
//! passes: syntax first, then name resolution, boundary and adjacency checks.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use super::{DoubleGroupoid, Quintet, QuintetGrid};
use crate::groups::FiniteGroup;
use crate::xmod::CrossedModule;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ParseErrorKind {
    Syntax,
    UnknownName,
    BoundaryViolation,
    AdjacencyViolation,
    Load,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq, Serialize)]
#[error("{line}:{col}: {kind}: {message}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub line: usize,
    pub col: usize,
    pub message: String,
}

fn err<T>(kind: ParseErrorKind, pos: Pos, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        kind,
        line: pos.line,
        col: pos.col,
        message: message.into(),
    })
}

/// 1-based line and column (in characters).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Index(usize),
    Ident(String),
    Quoted(String),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Index(n) => write!(f, "{n}"),
            Value::Ident(s) => write!(f, "{s}"),
            Value::Quoted(s) => write!(f, "{}", quote(s)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElemDecl {
    pub name: String,
    pub value: Value,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquareDecl {
    pub name: String,
    /// `left, top, right, bottom, face`
    pub values: [Value; 5],
}

/// The syntax tree of a grid file; positions are kept separately so that
/// documents compare equal regardless of layout.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridDocument {
    pub use_path: String,
    pub elems: Vec<ElemDecl>,
    pub squares: Vec<SquareDecl>,
    pub grid: Vec<Vec<String>>,
}

#[derive(Clone, Debug, Default)]
struct Spans {
    use_path: Pos,
    square_kw: Vec<Pos>,
    square_values: Vec<[Pos; 5]>,
    elem_values: Vec<Pos>,
    grid: Vec<Vec<Pos>>,
}

#[derive(Clone, Debug)]
pub struct ParsedGrid {
    pub document: GridDocument,
    pub grid: QuintetGrid,
    /// Resolved squares in declaration order.
    pub squares: Vec<(String, Quintet)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(usize),
    Str(String),
    Punct(char),
}

fn lex_line(line: &str, line_no: usize) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos {
            line: line_no,
            col: i + 1,
        };
        if c == '#' {
            break;
        } else if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                return err(
                    ParseErrorKind::Syntax,
                    pos,
                    "identifiers cannot start with a digit",
                );
            }
            let text: String = chars[start..i].iter().collect();
            let n = text.parse().or_else(|_| {
                err(
                    ParseErrorKind::Syntax,
                    pos,
                    format!("number {text} is too large"),
                )
            })?;
            out.push((Tok::Int(n), pos));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), pos));
        } else if c == '"' {
            i += 1;
            let mut s = String::new();
            loop {
                match chars.get(i) {
                    None => return err(ParseErrorKind::Syntax, pos, "unterminated string"),
                    Some('"') => {
                        i += 1;
                        break;
                    }
                    Some('\\') => match chars.get(i + 1) {
                        Some(&e @ ('"' | '\\')) => {
                            s.push(e);
                            i += 2;
                        }
                        _ => {
                            let at = Pos {
                                line: line_no,
                                col: i + 1,
                            };
                            return err(ParseErrorKind::Syntax, at, "unknown escape");
                        }
                    },
                    Some(&other) => {
                        s.push(other);
                        i += 1;
                    }
                }
            }
            out.push((Tok::Str(s), pos));
        } else if "(),;=:".contains(c) {
            out.push((Tok::Punct(c), pos));
            i += 1;
        } else {
            return err(
                ParseErrorKind::Syntax,
                pos,
                format!("unexpected character {c:?}"),
            );
        }
    }
    Ok(out)
}

struct Cursor<'a> {
    toks: &'a [(Tok, Pos)],
    i: usize,
    end: Pos,
}

impl Cursor<'_> {
    fn pos(&self) -> Pos {
        self.toks.get(self.i).map_or(self.end, |t| t.1)
    }

    fn next(&mut self) -> Option<&(Tok, Pos)> {
        let t = self.toks.get(self.i);
        self.i += 1;
        t
    }

    fn punct(&mut self, c: char) -> Result<(), ParseError> {
        let pos = self.pos();
        match self.next() {
            Some((Tok::Punct(p), _)) if *p == c => Ok(()),
            Some((t, _)) => err(
                ParseErrorKind::Syntax,
                pos,
                format!("expected '{c}', found {}", describe(t)),
            ),
            None => err(
                ParseErrorKind::Syntax,
                pos,
                format!("expected '{c}' before end of line"),
            ),
        }
    }

    fn ident(&mut self, what: &str) -> Result<(String, Pos), ParseError> {
        let pos = self.pos();
        match self.next() {
            Some((Tok::Ident(s), p)) => Ok((s.clone(), *p)),
            Some((t, _)) => err(
                ParseErrorKind::Syntax,
                pos,
                format!("expected {what}, found {}", describe(t)),
            ),
            None => err(
                ParseErrorKind::Syntax,
                pos,
                format!("expected {what} before end of line"),
            ),
        }
    }

    fn value(&mut self) -> Result<(Value, Pos), ParseError> {
        let pos = self.pos();
        match self.next() {
            Some((Tok::Int(n), p)) => Ok((Value::Index(*n), *p)),
            Some((Tok::Ident(s), p)) => Ok((Value::Ident(s.clone()), *p)),
            Some((Tok::Str(s), p)) => Ok((Value::Quoted(s.clone()), *p)),
            Some((t, _)) => err(
                ParseErrorKind::Syntax,
                pos,
                format!("expected a value, found {}", describe(t)),
            ),
            None => err(
                ParseErrorKind::Syntax,
                pos,
                "expected a value before end of line",
            ),
        }
    }

    fn finish(&mut self) -> Result<(), ParseError> {
        match self.toks.get(self.i) {
            None => Ok(()),
            Some((t, p)) => err(
                ParseErrorKind::Syntax,
                *p,
                format!("unexpected {} after statement", describe(t)),
            ),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("identifier {s}"),
        Tok::Int(n) => format!("number {n}"),
        Tok::Str(s) => format!("string {}", quote(s)),
        Tok::Punct(c) => format!("'{c}'"),
    }
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn parse_syntax(text: &str) -> Result<(GridDocument, Spans), ParseError> {
    let mut use_path: Option<String> = None;
    let mut spans = Spans::default();
    let mut elems: Vec<ElemDecl> = Vec::new();
    let mut squares: Vec<SquareDecl> = Vec::new();
    let mut grid: Vec<Vec<String>> = Vec::new();
    let mut in_grid = false;
    let mut last_line = 0;

    for (k, raw) in text.split('\n').enumerate() {
        let line_no = k + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        let toks = lex_line(line, line_no)?;
        last_line = line_no;
        if toks.is_empty() {
            continue;
        }
        let end = Pos {
            line: line_no,
            col: line.chars().count() + 1,
        };
        let mut cur = Cursor {
            toks: &toks,
            i: 0,
            end,
        };
        if in_grid {
            let mut row = Vec::new();
            let mut pos_row = Vec::new();
            while cur.i < toks.len() {
                let (name, pos) = cur.ident("a square name")?;
                row.push(name);
                pos_row.push(pos);
            }
            if let Some(first) = grid.first() {
                if first.len() != row.len() {
                    return err(
                        ParseErrorKind::Syntax,
                        pos_row[0],
                        format!(
                            "grid row has {} squares, expected {}",
                            row.len(),
                            first.len()
                        ),
                    );
                }
            }
            grid.push(row);
            spans.grid.push(pos_row);
            continue;
        }
        let (kw, kw_pos) = cur.ident("a statement keyword")?;
        match kw.as_str() {
            "use" => {
                if use_path.is_some() {
                    return err(ParseErrorKind::Syntax, kw_pos, "duplicate use declaration");
                }
                let pos = cur.pos();
                match cur.next() {
                    Some((Tok::Str(s), _)) => use_path = Some(s.clone()),
                    _ => {
                        return err(
                            ParseErrorKind::Syntax,
                            pos,
                            "expected a quoted path after use",
                        )
                    }
                }
                spans.use_path = pos;
                cur.finish()?;
            }
            "elem" => {
                let (name, pos) = cur.ident("an alias name")?;
                if elems.iter().any(|e| e.name == name) {
                    return err(
                        ParseErrorKind::Syntax,
                        pos,
                        format!("duplicate alias {name}"),
                    );
                }
                cur.punct('=')?;
                let (value, vpos) = cur.value()?;
                cur.finish()?;
                elems.push(ElemDecl { name, value });
                spans.elem_values.push(vpos);
            }
            "sq" => {
                let (name, pos) = cur.ident("a square name")?;
                if squares.iter().any(|s| s.name == name) {
                    return err(
                        ParseErrorKind::Syntax,
                        pos,
                        format!("duplicate square {name}"),
                    );
                }
                cur.punct('=')?;
                cur.punct('(')?;
                let mut values = Vec::with_capacity(5);
                let mut positions = [Pos::default(); 5];
                for (slot, sep) in [',', ',', ',', ';', ')'].into_iter().enumerate() {
                    let (v, p) = cur.value()?;
                    values.push(v);
                    positions[slot] = p;
                    cur.punct(sep)?;
                }
                cur.finish()?;
                let values: [Value; 5] = values.try_into().expect("five values");
                squares.push(SquareDecl { name, values });
                spans.square_kw.push(kw_pos);
                spans.square_values.push(positions);
            }
            "grid" => {
                cur.punct(':')?;
                cur.finish()?;
                in_grid = true;
            }
            other => {
                return err(
                    ParseErrorKind::Syntax,
                    kw_pos,
                    format!("unknown statement {other}"),
                )
            }
        }
    }
    let eof = Pos {
        line: last_line.max(1),
        col: 1,
    };
    let Some(use_path) = use_path else {
        return err(
            ParseErrorKind::Syntax,
            Pos { line: 1, col: 1 },
            "missing use declaration",
        );
    };
    if !in_grid {
        return err(ParseErrorKind::Syntax, eof, "missing grid section");
    }
    if grid.is_empty() {
        return err(ParseErrorKind::Syntax, eof, "grid section has no rows");
    }
    Ok((
        GridDocument {
            use_path,
            elems,
            squares,
            grid,
        },
        spans,
    ))
}

/// Syntax-only parse.
pub fn parse_document(text: &str) -> Result<GridDocument, ParseError> {
    parse_syntax(text).map(|(doc, _)| doc)
}

/// Full parse. `load` resolves the `use` path to a crossed module.
pub fn parse_grid(
    text: &str,
    load: impl FnOnce(&str) -> Result<Arc<CrossedModule>, String>,
) -> Result<ParsedGrid, ParseError> {
    let (doc, spans) = parse_syntax(text)?;
    let xm = match load(&doc.use_path) {
        Ok(xm) => xm,
        Err(msg) => return err(ParseErrorKind::Load, spans.use_path, msg),
    };
    let aliases: HashMap<&str, (&Value, Pos)> = doc
        .elems
        .iter()
        .zip(&spans.elem_values)
        .map(|(e, &p)| (e.name.as_str(), (&e.value, p)))
        .collect();

    let dg = DoubleGroupoid::new(&xm);
    let mut resolved: Vec<(String, Quintet)> = Vec::new();
    for (k, decl) in doc.squares.iter().enumerate() {
        let mut idx = [0usize; 5];
        for slot in 0..5 {
            let (group, label) = if slot == 4 {
                (xm.h(), "H")
            } else {
                (xm.g(), "G")
            };
            idx[slot] = resolve(
                &decl.values[slot],
                spans.square_values[k][slot],
                group,
                label,
                &aliases,
            )?;
        }
        let sq = Quintet {
            left: idx[0],
            top: idx[1],
            right: idx[2],
            bottom: idx[3],
            face: idx[4],
        };
        if !dg.is_square(&sq) {
            return err(
                ParseErrorKind::BoundaryViolation,
                spans.square_kw[k],
                format!(
                    "square {}: ∂(face) = {} but bottom·right·top⁻¹·left⁻¹ = {}",
                    decl.name,
                    xm.g().name(xm.d(sq.face)),
                    xm.g().name(dg.edge_product(&sq))
                ),
            );
        }
        resolved.push((decl.name.clone(), sq));
    }

    let lookup: HashMap<&str, Quintet> = resolved.iter().map(|(n, q)| (n.as_str(), *q)).collect();
    let mut cells = Vec::new();
    for (i, row) in doc.grid.iter().enumerate() {
        for (j, name) in row.iter().enumerate() {
            match lookup.get(name.as_str()) {
                Some(q) => cells.push(*q),
                None => {
                    return err(
                        ParseErrorKind::UnknownName,
                        spans.grid[i][j],
                        format!("undeclared square {name}"),
                    )
                }
            }
        }
    }
    let (rows, cols) = (doc.grid.len(), doc.grid[0].len());
    for i in 0..rows {
        for j in 0..cols {
            let sq = cells[i * cols + j];
            if j + 1 < cols && sq.right != cells[i * cols + j + 1].left {
                return err(
                    ParseErrorKind::AdjacencyViolation,
                    spans.grid[i][j + 1],
                    format!(
                        "right edge of cell ({i}, {j}) does not match left edge of cell ({i}, {})",
                        j + 1
                    ),
                );
            }
            if i + 1 < rows && sq.bottom != cells[(i + 1) * cols + j].top {
                return err(
                    ParseErrorKind::AdjacencyViolation,
                    spans.grid[i + 1][j],
                    format!(
                        "bottom edge of cell ({i}, {j}) does not match top edge of cell ({}, {j})",
                        i + 1
                    ),
                );
            }
        }
    }
    let grid = QuintetGrid::new(xm, rows, cols, cells).expect("checked above");
    Ok(ParsedGrid {
        document: doc,
        grid,
        squares: resolved,
    })
}

fn resolve(
    value: &Value,
    pos: Pos,
    group: &FiniteGroup,
    label: &str,
    aliases: &HashMap<&str, (&Value, Pos)>,
) -> Result<usize, ParseError> {
    match value {
        Value::Index(n) if *n < group.order() => Ok(*n),
        Value::Index(n) => err(
            ParseErrorKind::UnknownName,
            pos,
            format!("{n} is not an element of {label}"),
        ),
        Value::Ident(name) => {
            if let Some(&(inner, _)) = aliases.get(name.as_str()) {
                if let Value::Ident(n) = inner {
                    if aliases.contains_key(n.as_str()) {
                        return err(
                            ParseErrorKind::UnknownName,
                            pos,
                            format!("alias {name} refers to another alias"),
                        );
                    }
                }
                return resolve(inner, pos, group, label, &HashMap::new());
            }
            group.index_of(name).map_or_else(
                || {
                    err(
                        ParseErrorKind::UnknownName,
                        pos,
                        format!("unknown name {name} in {label}"),
                    )
                },
                Ok,
            )
        }
        Value::Quoted(name) => group.index_of(name).map_or_else(
            || {
                err(
                    ParseErrorKind::UnknownName,
                    pos,
                    format!("unknown element {} of {label}", quote(name)),
                )
            },
            Ok,
        ),
    }
}

/// Reads a grid file; the `use` path is taken relative to the file.
pub fn parse_grid_file(path: &Path) -> Result<ParsedGrid, ParseError> {
    let text = std::fs::read_to_string(path).map_err(|e| ParseError {
        kind: ParseErrorKind::Load,
        line: 0,
        col: 0,
        message: format!("{}: {e}", path.display()),
    })?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_grid(&text, |p| {
        crate::formats::load_valid_xmod(&base.join(p))
            .map(Arc::new)
            .map_err(|e| e.to_string())
    })
}

/// Canonical text for a document.
pub fn serialize_document(doc: &GridDocument) -> String {
    let mut out = format!("use {}\n", quote(&doc.use_path));
    for e in &doc.elems {
        out.push_str(&format!("elem {} = {}\n", e.name, e.value));
    }
    for s in &doc.squares {
        let v = &s.values;
        out.push_str(&format!(
            "sq {} = ({}, {}, {}, {} ; {})\n",
            s.name, v[0], v[1], v[2], v[3], v[4]
        ));
    }
    out.push_str("grid:\n");
    for row in &doc.grid {
        out.push_str(&format!("  {}\n", row.join(" ")));
    }
    out
}

/// Canonical text for a bare grid, one declared square per distinct cell.
pub fn serialize_grid(grid: &QuintetGrid, use_path: &str) -> String {
    let mut squares: Vec<Quintet> = Vec::new();
    for q in grid.cells() {
        if !squares.contains(q) {
            squares.push(*q);
        }
    }
    let name = |k: usize| format!("S{k}");
    let doc = GridDocument {
        use_path: use_path.to_string(),
        elems: Vec::new(),
        squares: squares
            .iter()
            .enumerate()
            .map(|(k, q)| SquareDecl {
                name: name(k),
                values: [q.left, q.top, q.right, q.bottom, q.face].map(Value::Index),
            })
            .collect(),
        grid: grid
            .row_vecs()
            .iter()
            .map(|row| {
                row.iter()
                    .map(|q| name(squares.iter().position(|s| s == q).unwrap()))
                    .collect()
            })
            .collect(),
    };
    serialize_document(&doc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn xm1_loader(_: &str) -> Result<Arc<CrossedModule>, String> {
        Ok(Arc::new(catalog::xm1()))
    }

    const EXAMPLE: &str = "# two by two\nuse \"xm1.json\"\nelem g = 1\nsq A = (g, 0, g, 0 ; 1)\nsq B = (g, 0, g, 0 ; 2)\ngrid:\n  A B\n  B A\n";

    #[test]
    fn parses_example() {
        let parsed = parse_grid(EXAMPLE, xm1_loader).unwrap();
        assert_eq!((parsed.grid.rows(), parsed.grid.cols()), (2, 2));
        assert_eq!(parsed.document.elems.len(), 1);
        assert_eq!(parsed.squares[1].1.face, 2);
    }

    #[test]
    fn round_trip() {
        let doc = parse_document(EXAMPLE).unwrap();
        let text = serialize_document(&doc);
        assert_eq!(parse_document(&text).unwrap(), doc);
        assert_eq!(serialize_document(&parse_document(&text).unwrap()), text);
    }

    #[test]
    fn crlf_and_comments() {
        let text = EXAMPLE
            .replace('\n', "\r\n")
            .replace("grid:", "grid:   # rows follow");
        assert!(parse_grid(&text, xm1_loader).is_ok());
    }

    #[test]
    fn error_positions() {
        let cases = [
            (
                "use \"x\"\nsq A = (0, 0, 0, 0 ; 0)\ngrid:\n A Z\n",
                ParseErrorKind::UnknownName,
                4,
                4,
            ),
            (
                "use \"x\"\nsq A = (0, 0, 0 ; 0)\ngrid:\n A\n",
                ParseErrorKind::Syntax,
                2,
                17,
            ),
            (
                "use \"x\"\nsq A = (0, 0, 0, 1 ; 0)\ngrid:\n A\n",
                ParseErrorKind::BoundaryViolation,
                2,
                1,
            ),
            (
                "use \"x\"\nsq A = (0, 0, 0, 0 ; 7)\ngrid:\n A\n",
                ParseErrorKind::UnknownName,
                2,
                22,
            ),
            (
                "use \"x\"\nsq A = (1, 0, 1, 0 ; 0)\nsq B = (0, 0, 0, 0 ; 0)\ngrid:\n A B\n",
                ParseErrorKind::AdjacencyViolation,
                5,
                4,
            ),
            (
                "sq A = (0, 0, 0, 0 ; 0)\ngrid:\n A\n",
                ParseErrorKind::Syntax,
                1,
                1,
            ),
            ("use \"x\"\nsquare A\n", ParseErrorKind::Syntax, 2, 1),
        ];
        for (text, kind, line, col) in cases {
            let e = parse_grid(text, xm1_loader).unwrap_err();
            assert_eq!((e.kind, e.line, e.col), (kind, line, col), "{text:?}: {e}");
        }
    }

    #[test]
    fn load_failure_is_located() {
        let e = parse_grid(EXAMPLE, |_| Err("nope".to_string())).unwrap_err();
        assert_eq!((e.kind, e.line, e.col), (ParseErrorKind::Load, 2, 5));
    }

    #[test]
    fn names_resolve_in_their_group() {
        let text = "use \"s3\"\nsq A = (e, \"(12)\", e, \"(12)\" ; e)\ngrid:\n A\n";
        let parsed = parse_grid(text, |_| Ok(Arc::new(catalog::xm2()))).unwrap();
        let s3 = catalog::xm2();
        assert_eq!(parsed.squares[0].1.top, s3.g().index_of("(12)").unwrap());
    }

    #[test]
    fn bare_grid_serialization_reparses() {
        let parsed = parse_grid(EXAMPLE, xm1_loader).unwrap();
        let text = serialize_grid(&parsed.grid, "xm1.json");
        let again = parse_grid(&text, xm1_loader).unwrap();
        assert_eq!(again.grid, parsed.grid);
    }
}
