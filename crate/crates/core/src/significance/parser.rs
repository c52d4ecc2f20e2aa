//! Tolerant structural parser for Java sources.
//!
//! Recognizes type declarations, fields, method signatures and the statements
//! inside method bodies. It never fails: unbalanced input produces a partial
//! tree with [`StructureTree::degraded`] set.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TypeKind {
    Class,
    Interface,
    Enum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StatementKind {
    Plain,
    If,
    Loop,
    Try,
    Return,
    Throw,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StatementNode {
    pub normalized_text: String,
    pub kind: StatementKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldDecl {
    pub name: String,
    pub type_text: String,
    pub modifiers: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MethodDecl {
    pub name: String,
    pub params: Vec<String>,
    /// Empty for constructors and initializer blocks.
    pub return_type: String,
    pub modifiers: Vec<String>,
    pub body: Vec<StatementNode>,
}

impl MethodDecl {
    pub fn arity(&self) -> usize {
        self.params.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeDecl {
    pub kind: TypeKind,
    /// Dotted path for nested types, e.g. `Outer.Inner`.
    pub name: String,
    pub modifiers: Vec<String>,
    pub supertypes: Vec<String>,
    pub fields: Vec<FieldDecl>,
    pub methods: Vec<MethodDecl>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureTree {
    /// Top-level and nested types, flattened in source order.
    pub type_decls: Vec<TypeDecl>,
    /// Set when braces did not balance; the tree is best-effort.
    pub degraded: bool,
}

impl StructureTree {
    pub fn method_count(&self) -> usize {
        self.type_decls.iter().map(|t| t.methods.len()).sum()
    }
}

const MODIFIERS: &[&str] = &[
    "public",
    "protected",
    "private",
    "static",
    "final",
    "abstract",
    "synchronized",
    "native",
    "default",
    "strictfp",
    "transient",
    "volatile",
    "sealed",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TokKind {
    Word,
    Literal,
    Punct(u8),
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokKind,
    text: String,
    /// Byte offset just past the token; used to detect adjacent `->`.
    end: usize,
    start: usize,
}

impl Token {
    fn is(&self, p: u8) -> bool {
        self.kind == TokKind::Punct(p)
    }

    fn is_word(&self, w: &str) -> bool {
        self.kind == TokKind::Word && self.text == w
    }

    fn wordlike(&self) -> bool {
        matches!(self.kind, TokKind::Word | TokKind::Literal)
    }
}

/// Blank out comments; string and char literals become single tokens.
fn lex(source: &str) -> Vec<Token> {
    let bytes = source.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    let n = bytes.len();
    let is_word_byte = |b: u8| b.is_ascii_alphanumeric() || b == b'_' || b == b'$' || b >= 0x80;
    while i < n {
        let b = bytes[i];
        if b.is_ascii_whitespace() {
            i += 1;
        } else if b == b'/' && i + 1 < n && bytes[i + 1] == b'/' {
            while i < n && bytes[i] != b'\n' {
                i += 1;
            }
        } else if b == b'/' && i + 1 < n && bytes[i + 1] == b'*' {
            i += 2;
            while i < n && !(bytes[i] == b'*' && i + 1 < n && bytes[i + 1] == b'/') {
                i += 1;
            }
            i = (i + 2).min(n);
        } else if b == b'"' && bytes[i..].starts_with(b"\"\"\"") {
            let start = i;
            i += 3;
            while i < n && !bytes[i..].starts_with(b"\"\"\"") {
                if bytes[i] == b'\\' {
                    i += 1;
                }
                i += 1;
            }
            i = (i + 3).min(n);
            tokens.push(literal(source, start, i));
        } else if b == b'"' || b == b'\'' {
            let start = i;
            i += 1;
            while i < n && bytes[i] != b && bytes[i] != b'\n' {
                if bytes[i] == b'\\' {
                    i += 1;
                }
                i += 1;
            }
            i = (i + 1).min(n);
            tokens.push(literal(source, start, i));
        } else if is_word_byte(b) {
            let start = i;
            while i < n && is_word_byte(bytes[i]) {
                i += 1;
            }
            tokens.push(Token {
                kind: TokKind::Word,
                text: source[start..i].to_string(),
                start,
                end: i,
            });
        } else {
            tokens.push(Token {
                kind: TokKind::Punct(b),
                text: (b as char).to_string(),
                start: i,
                end: i + 1,
            });
            i += 1;
        }
    }
    tokens
}

fn literal(source: &str, start: usize, end: usize) -> Token {
    // Clamp to a char boundary: an unterminated literal may end mid-sequence.
    let mut end = end.min(source.len());
    while !source.is_char_boundary(end) {
        end -= 1;
    }
    Token {
        kind: TokKind::Literal,
        text: source[start..end].to_string(),
        start,
        end,
    }
}

/// Whitespace-insensitive rendering: a single space separates two word-like
/// tokens, punctuation is glued to its neighbours.
fn render(tokens: &[Token]) -> String {
    let mut out = String::new();
    let mut prev_wordlike = false;
    for tok in tokens {
        if prev_wordlike && tok.wordlike() {
            out.push(' ');
        }
        out.push_str(&tok.text);
        prev_wordlike = tok.wordlike();
    }
    out
}

/// Collapse whitespace and strip comments from a code fragment.
pub fn normalize_statement(text: &str) -> String {
    render(&lex(text))
}

struct Parser {
    toks: Vec<Token>,
    types: Vec<TypeDecl>,
    degraded: bool,
}

pub fn parse_structure(source: &str) -> StructureTree {
    let mut parser = Parser {
        toks: lex(source),
        types: Vec::new(),
        degraded: false,
    };
    let end = parser.toks.len();
    parser.compilation_unit(0, end);
    StructureTree {
        type_decls: parser.types,
        degraded: parser.degraded,
    }
}

impl Parser {
    /// Index of the bracket closing the one at `open`, bounded by `limit`.
    /// Marks the tree degraded and returns `limit` when unbalanced.
    fn matching(&mut self, open: usize, limit: usize) -> usize {
        let (o, c) = match self.toks[open].kind {
            TokKind::Punct(b'{') => (b'{', b'}'),
            TokKind::Punct(b'(') => (b'(', b')'),
            TokKind::Punct(b'[') => (b'[', b']'),
            _ => return open,
        };
        let mut depth = 0usize;
        for i in open..limit {
            if self.toks[i].is(o) {
                depth += 1;
            } else if self.toks[i].is(c) {
                depth -= 1;
                if depth == 0 {
                    return i;
                }
            }
        }
        self.degraded = true;
        limit
    }

    /// Scan from `i` to the first `{` or `;` outside parentheses. Braces that
    /// follow an `=` belong to an initializer and are skipped.
    fn header_end(&mut self, mut i: usize, end: usize) -> usize {
        let mut saw_assign = false;
        while i < end {
            let t = &self.toks[i];
            match t.kind {
                TokKind::Punct(b'(') | TokKind::Punct(b'[') => {
                    i = self.matching(i, end);
                }
                TokKind::Punct(b'=') => saw_assign = true,
                TokKind::Punct(b'{') if saw_assign => {
                    i = self.matching(i, end);
                }
                TokKind::Punct(b'{') | TokKind::Punct(b';') | TokKind::Punct(b'}') => return i,
                _ => {}
            }
            i += 1;
        }
        end
    }

    fn compilation_unit(&mut self, start: usize, end: usize) {
        let mut i = start;
        while i < end {
            let t = &self.toks[i];
            if t.is(b';') {
                i += 1;
                continue;
            }
            if t.is(b'}') {
                // Stray closer at top level.
                self.degraded = true;
                i += 1;
                continue;
            }
            if t.is_word("package") || t.is_word("import") {
                while i < end && !self.toks[i].is(b';') {
                    i += 1;
                }
                i += 1;
                continue;
            }
            let stop = self.header_end(i, end);
            if stop < end && self.toks[stop].is(b'{') {
                let close = self.matching(stop, end);
                let header = strip_annotations(&self.toks[i..stop]);
                if let Some(pos) = type_keyword(&header) {
                    self.type_decl(&header, pos, None, stop + 1, close);
                }
                i = close + 1;
            } else {
                i = stop + 1;
            }
        }
    }

    fn type_decl(
        &mut self,
        header: &[Token],
        kw: usize,
        outer: Option<&str>,
        body_start: usize,
        body_end: usize,
    ) {
        let kind = match header[kw].text.as_str() {
            "interface" => TypeKind::Interface,
            "enum" => TypeKind::Enum,
            _ => TypeKind::Class,
        };
        let modifiers: Vec<String> = header[..kw]
            .iter()
            .filter(|t| t.kind == TokKind::Word)
            .map(|t| t.text.clone())
            .collect();
        let simple = header
            .get(kw + 1)
            .filter(|t| t.kind == TokKind::Word)
            .map(|t| t.text.clone())
            .unwrap_or_else(|| String::from("<anonymous>"));
        let name = match outer {
            Some(o) => format!("{o}.{simple}"),
            None => simple,
        };
        let supertypes = supertype_clauses(&header[(kw + 2).min(header.len())..]);

        let index = self.types.len();
        self.types.push(TypeDecl {
            kind,
            name: name.clone(),
            modifiers,
            supertypes,
            fields: Vec::new(),
            methods: Vec::new(),
        });
        self.type_body(index, &name, kind, body_start, body_end);
    }

    fn type_body(&mut self, index: usize, name: &str, kind: TypeKind, start: usize, end: usize) {
        let mut i = start;
        if kind == TypeKind::Enum {
            i = self.enum_constants(index, start, end);
        }
        let mut init_blocks = 0usize;
        while i < end {
            if self.toks[i].is(b';') {
                i += 1;
                continue;
            }
            if self.toks[i].is(b'}') {
                self.degraded = true;
                i += 1;
                continue;
            }
            let stop = self.header_end(i, end);
            let header = strip_annotations(&self.toks[i..stop]);
            let opens_block = stop < end && self.toks[stop].is(b'{');
            let close = if opens_block {
                self.matching(stop, end)
            } else {
                stop
            };

            if opens_block {
                if let Some(kw) = type_keyword(&header) {
                    self.type_decl(&header, kw, Some(name), stop + 1, close);
                } else if header.iter().all(|t| t.is_word("static")) {
                    let label = if header.is_empty() {
                        "<init>"
                    } else {
                        "<clinit>"
                    };
                    let body = self.block(stop + 1, close);
                    self.types[index].methods.push(MethodDecl {
                        name: format!("{label}#{init_blocks}"),
                        params: Vec::new(),
                        return_type: String::new(),
                        modifiers: Vec::new(),
                        body,
                    });
                    init_blocks += 1;
                } else if let Some(mut method) = method_signature(&header) {
                    method.body = self.block(stop + 1, close);
                    self.types[index].methods.push(method);
                }
            } else if let Some(method) = method_signature(&header) {
                self.types[index].methods.push(method);
            } else {
                let fields = field_declarators(&header);
                self.types[index].fields.extend(fields);
            }
            i = close + 1;
        }
    }

    /// Enum constants run up to the first top-level `;`. Returns the index
    /// where regular members begin.
    fn enum_constants(&mut self, index: usize, start: usize, end: usize) -> usize {
        let mut i = start;
        let mut expect_name = true;
        while i < end {
            let t = &self.toks[i];
            match t.kind {
                TokKind::Punct(b';') => return i + 1,
                TokKind::Punct(b',') => expect_name = true,
                TokKind::Punct(b'@') => {
                    // Annotation name, then optional arguments.
                    i += 1;
                    while i + 1 < end && self.toks[i + 1].is(b'.') {
                        i += 2;
                    }
                    if i + 1 < end && self.toks[i + 1].is(b'(') {
                        i = self.matching(i + 1, end);
                    }
                }
                TokKind::Punct(b'(') | TokKind::Punct(b'{') => {
                    i = self.matching(i, end);
                }
                TokKind::Word if expect_name => {
                    self.types[index].fields.push(FieldDecl {
                        name: t.text.clone(),
                        type_text: String::from("<enum-constant>"),
                        modifiers: Vec::new(),
                    });
                    expect_name = false;
                }
                _ => {}
            }
            i += 1;
        }
        end
    }

    /// Flatten the statements of a block, recursing into nested blocks.
    fn block(&mut self, start: usize, end: usize) -> Vec<StatementNode> {
        let mut out = Vec::new();
        self.statements(start, end, &mut out);
        out
    }

    fn statements(&mut self, start: usize, end: usize, out: &mut Vec<StatementNode>) {
        let mut i = start;
        while i < end {
            let t = &self.toks[i];
            if t.is(b';') || t.is(b'}') {
                if t.is(b'}') {
                    self.degraded = true;
                }
                i += 1;
                continue;
            }
            if t.is(b'{') {
                let close = self.matching(i, end);
                self.statements(i + 1, close, out);
                i = close + 1;
                continue;
            }
            if t.kind == TokKind::Word {
                let word = t.text.as_str();
                let header_kind = match word {
                    "if" | "switch" | "else" | "case" => Some(StatementKind::If),
                    "for" | "while" | "do" => Some(StatementKind::Loop),
                    "try" | "catch" | "finally" => Some(StatementKind::Try),
                    "synchronized" => Some(StatementKind::Plain),
                    _ => None,
                };
                // `default` only opens a header inside a switch (`default:`/`default ->`).
                let header_kind = header_kind.or_else(|| {
                    (word == "default"
                        && self
                            .toks
                            .get(i + 1)
                            .is_some_and(|n| n.is(b':') || n.is(b'-')))
                    .then_some(StatementKind::If)
                });
                if let Some(kind) = header_kind {
                    let stop = self.control_header(i, end);
                    out.push(StatementNode {
                        normalized_text: render(&self.toks[i..stop]),
                        kind,
                    });
                    i = stop;
                    continue;
                }
            }
            let stop = self.statement_end(i, end);
            let text = render(&self.toks[i..stop]);
            let kind = if self.toks[i].is_word("return") {
                StatementKind::Return
            } else if self.toks[i].is_word("throw") {
                StatementKind::Throw
            } else {
                StatementKind::Plain
            };
            if !text.is_empty() {
                out.push(StatementNode {
                    normalized_text: text,
                    kind,
                });
            }
            i = stop.max(i + 1);
        }
    }

    /// End (exclusive) of a control-flow header such as `if (x)`,
    /// `else if (y)`, `case A:` or `try (res)`.
    fn control_header(&mut self, i: usize, end: usize) -> usize {
        let word = self.toks[i].text.clone();
        let mut j = i + 1;
        match word.as_str() {
            "case" | "default" => {
                while j < end {
                    let t = &self.toks[j];
                    if t.is(b':') {
                        return j + 1;
                    }
                    if t.is(b'-')
                        && j + 1 < end
                        && self.toks[j + 1].is(b'>')
                        && self.toks[j + 1].start == t.end
                    {
                        return j + 2;
                    }
                    if t.is(b'{') || t.is(b';') {
                        return j;
                    }
                    if t.is(b'(') {
                        j = self.matching(j, end);
                    }
                    j += 1;
                }
                end
            }
            "else" => {
                if j < end && self.toks[j].is_word("if") {
                    j += 1;
                    if j < end && self.toks[j].is(b'(') {
                        j = self.matching(j, end) + 1;
                    }
                }
                j.min(end)
            }
            _ => {
                if j < end && self.toks[j].is(b'(') {
                    j = self.matching(j, end) + 1;
                }
                j.min(end)
            }
        }
    }

    /// End (exclusive) of a plain statement: just past its `;`, or past the
    /// closing `}` of a local class. Parenthesized and braced
    /// sub-expressions are skipped.
    fn statement_end(&mut self, i: usize, end: usize) -> usize {
        let local_class = self.toks[i..end.min(i + 8)]
            .iter()
            .take_while(|t| t.kind == TokKind::Word)
            .any(|t| matches!(t.text.as_str(), "class" | "interface" | "enum" | "record"));
        let mut j = i;
        while j < end {
            let t = &self.toks[j];
            match t.kind {
                TokKind::Punct(b';') => return j + 1,
                // Missing semicolon before the enclosing block closes.
                TokKind::Punct(b'}') => return j,
                TokKind::Punct(b'(') | TokKind::Punct(b'[') => j = self.matching(j, end),
                TokKind::Punct(b'{') => {
                    j = self.matching(j, end);
                    if local_class {
                        return (j + 1).min(end);
                    }
                }
                _ => {}
            }
            j += 1;
        }
        end
    }
}

fn strip_annotations(tokens: &[Token]) -> Vec<Token> {
    let mut out = Vec::with_capacity(tokens.len());
    let mut i = 0;
    while i < tokens.len() {
        if tokens[i].is(b'@') && tokens.get(i + 1).is_some_and(|t| !t.is_word("interface")) {
            i += 2;
            while i + 1 < tokens.len() && tokens[i].is(b'.') {
                i += 2;
            }
            if i < tokens.len() && tokens[i].is(b'(') {
                let mut depth = 0usize;
                while i < tokens.len() {
                    if tokens[i].is(b'(') {
                        depth += 1;
                    } else if tokens[i].is(b')') {
                        depth -= 1;
                        if depth == 0 {
                            i += 1;
                            break;
                        }
                    }
                    i += 1;
                }
            }
            continue;
        }
        out.push(tokens[i].clone());
        i += 1;
    }
    out
}

/// Position of the `class`/`interface`/`enum`/`record` keyword in a header.
fn type_keyword(header: &[Token]) -> Option<usize> {
    // Anything after `=` or `(` is an expression, not a declaration.
    let limit = header
        .iter()
        .position(|t| t.is(b'=') || t.is(b'('))
        .unwrap_or(header.len());
    header[..limit].iter().enumerate().position(|(idx, t)| {
        matches!(t.text.as_str(), "class" | "interface" | "enum" | "record")
            && t.kind == TokKind::Word
            && !(idx > 0 && header[idx - 1].is(b'.'))
    })
}

fn supertype_clauses(tokens: &[Token]) -> Vec<String> {
    let mut clauses = Vec::new();
    let mut keyword: Option<String> = None;
    let mut current: Vec<Token> = Vec::new();
    let mut angle = 0i32;
    let mut skip_generics = true;
    for tok in tokens {
        if keyword.is_none() && skip_generics {
            // Type parameters of the declaration itself.
            if tok.is(b'<') {
                angle += 1;
                continue;
            }
            if tok.is(b'>') {
                angle -= 1;
                continue;
            }
            if angle > 0 {
                continue;
            }
        }
        if tok.kind == TokKind::Word
            && angle == 0
            && matches!(tok.text.as_str(), "extends" | "implements" | "permits")
        {
            if let Some(kw) = keyword.take() {
                if !current.is_empty() {
                    clauses.push(format!("{kw} {}", render(&current)));
                }
            }
            current.clear();
            keyword = Some(tok.text.clone());
            skip_generics = false;
            continue;
        }
        if keyword.is_some() {
            if tok.is(b'<') {
                angle += 1;
            } else if tok.is(b'>') {
                angle -= 1;
            }
            if tok.is(b',') && angle == 0 {
                let kw = keyword.clone().unwrap_or_default();
                clauses.push(format!("{kw} {}", render(&current)));
                current.clear();
                continue;
            }
            current.push(tok.clone());
        }
    }
    if let Some(kw) = keyword {
        if !current.is_empty() {
            clauses.push(format!("{kw} {}", render(&current)));
        }
    }
    clauses
}

/// Split leading modifier keywords off a header.
fn split_modifiers(header: &[Token]) -> (Vec<String>, &[Token]) {
    let count = header
        .iter()
        .take_while(|t| t.kind == TokKind::Word && MODIFIERS.contains(&t.text.as_str()))
        .count();
    (
        header[..count].iter().map(|t| t.text.clone()).collect(),
        &header[count..],
    )
}

fn method_signature(header: &[Token]) -> Option<MethodDecl> {
    // A method header has `name (` with no `=` before it.
    let open = header.iter().position(|t| t.is(b'(') || t.is(b'='))?;
    if !header[open].is(b'(') || open == 0 || header[open - 1].kind != TokKind::Word {
        return None;
    }
    let (mut modifiers, rest) = split_modifiers(&header[..open - 1]);
    let name = header[open - 1].text.clone();
    let return_type = render(rest);

    let mut depth = 0i32;
    let mut close = header.len();
    for (k, t) in header.iter().enumerate().skip(open) {
        if t.is(b'(') {
            depth += 1;
        } else if t.is(b')') {
            depth -= 1;
            if depth == 0 {
                close = k;
                break;
            }
        }
    }
    let params = parameter_types(&header[open + 1..close.min(header.len())]);
    if close + 1 < header.len() {
        let trailer = render(&header[close + 1..]);
        if !trailer.is_empty() {
            modifiers.push(trailer);
        }
    }
    Some(MethodDecl {
        name,
        params,
        return_type,
        modifiers,
        body: Vec::new(),
    })
}

fn parameter_types(tokens: &[Token]) -> Vec<String> {
    let mut params = Vec::new();
    let mut current: Vec<Token> = Vec::new();
    let mut depth = 0i32;
    let mut flush = |current: &mut Vec<Token>| {
        let cleaned: Vec<Token> = current.drain(..).filter(|t| !t.is_word("final")).collect();
        if cleaned.is_empty() {
            return;
        }
        // Drop the parameter name; keep array brackets that trail it.
        let mut split = cleaned.len();
        let mut suffix = String::new();
        while split > 0 && (cleaned[split - 1].is(b'[') || cleaned[split - 1].is(b']')) {
            split -= 1;
        }
        if split < cleaned.len() {
            suffix = render(&cleaned[split..]);
        }
        let ty = if split > 1 && cleaned[split - 1].kind == TokKind::Word {
            render(&cleaned[..split - 1])
        } else {
            render(&cleaned[..split])
        };
        params.push(format!("{ty}{suffix}"));
    };
    let stripped = strip_annotations(tokens);
    for tok in stripped {
        match tok.kind {
            TokKind::Punct(b'<') | TokKind::Punct(b'(') => depth += 1,
            TokKind::Punct(b'>') | TokKind::Punct(b')') => depth -= 1,
            TokKind::Punct(b',') if depth == 0 => {
                flush(&mut current);
                continue;
            }
            _ => {}
        }
        current.push(tok);
    }
    flush(&mut current);
    params
}

fn field_declarators(header: &[Token]) -> Vec<FieldDecl> {
    let (modifiers, rest) = split_modifiers(header);
    let mut declarators: Vec<Vec<Token>> = vec![Vec::new()];
    let mut angle = 0i32;
    let mut nest = 0i32;
    let mut in_init = false;
    for tok in rest {
        match tok.kind {
            TokKind::Punct(b'<') if !in_init => angle += 1,
            TokKind::Punct(b'>') if !in_init => angle -= 1,
            TokKind::Punct(b'(') | TokKind::Punct(b'{') | TokKind::Punct(b'[') => nest += 1,
            TokKind::Punct(b')') | TokKind::Punct(b'}') | TokKind::Punct(b']') => nest -= 1,
            TokKind::Punct(b'=') if angle == 0 && nest == 0 => in_init = true,
            TokKind::Punct(b',') if angle <= 0 && nest == 0 => {
                declarators.push(Vec::new());
                in_init = false;
                continue;
            }
            _ => {}
        }
        declarators.last_mut().expect("non-empty").push(tok.clone());
    }

    let mut fields = Vec::new();
    let mut type_text = String::new();
    for (k, decl) in declarators.iter().enumerate() {
        let lhs_len = decl.iter().position(|t| t.is(b'=')).unwrap_or(decl.len());
        let lhs = &decl[..lhs_len];
        let Some(name_pos) = lhs.iter().rposition(|t| t.kind == TokKind::Word) else {
            continue;
        };
        if k == 0 {
            if name_pos == 0 {
                // No type in front of the name: not a field declaration.
                return Vec::new();
            }
            type_text = render(&lhs[..name_pos]);
        }
        let dims = render(&lhs[name_pos + 1..]);
        fields.push(FieldDecl {
            name: lhs[name_pos].text.clone(),
            type_text: format!("{type_text}{dims}"),
            modifiers: modifiers.clone(),
        });
    }
    fields
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_class() {
        let tree = parse_structure("class A { void f() { x(); } }");
        assert!(!tree.degraded);
        assert_eq!(tree.type_decls.len(), 1);
        let a = &tree.type_decls[0];
        assert_eq!(a.kind, TypeKind::Class);
        assert_eq!(a.name, "A");
        assert_eq!(a.methods.len(), 1);
        assert_eq!(a.methods[0].name, "f");
        assert_eq!(a.methods[0].arity(), 0);
        assert_eq!(a.methods[0].return_type, "void");
        assert_eq!(
            a.methods[0].body,
            vec![StatementNode {
                normalized_text: "x();".into(),
                kind: StatementKind::Plain
            }]
        );
    }

    #[test]
    fn empty_source() {
        let tree = parse_structure("");
        assert!(tree.type_decls.is_empty());
        assert!(!tree.degraded);
    }

    #[test]
    fn two_types_with_interface() {
        // Hand parse: Shape (interface, 1 abstract method), Circle (class,
        // 1 field, constructor + area), 3 methods across the file.
        let src = r#"
            package geo;
            import java.util.List;

            /** A shape. */
            public interface Shape {
                double area();
            }

            @Deprecated
            public final class Circle extends Base implements Shape, Comparable<Circle> {
                private final double r; // radius
                public Circle(double r) { this.r = r; }
                @Override
                public double area() {
                    if (r < 0) { throw new IllegalStateException("neg {"); }
                    return Math.PI * r * r;
                }
            }
        "#;
        let tree = parse_structure(src);
        assert!(!tree.degraded);
        assert_eq!(tree.type_decls.len(), 2);
        assert_eq!(tree.method_count(), 3);

        let shape = &tree.type_decls[0];
        assert_eq!(shape.kind, TypeKind::Interface);
        assert_eq!(shape.modifiers, vec!["public"]);
        assert_eq!(shape.methods[0].name, "area");
        assert!(shape.methods[0].body.is_empty());

        let circle = &tree.type_decls[1];
        assert_eq!(circle.name, "Circle");
        assert_eq!(circle.modifiers, vec!["public", "final"]);
        assert_eq!(
            circle.supertypes,
            vec![
                "extends Base",
                "implements Shape",
                "implements Comparable<Circle>"
            ]
        );
        assert_eq!(
            circle.fields,
            vec![FieldDecl {
                name: "r".into(),
                type_text: "double".into(),
                modifiers: vec!["private".into(), "final".into()]
            }]
        );
        let ctor = &circle.methods[0];
        assert_eq!(ctor.name, "Circle");
        assert_eq!(ctor.params, vec!["double"]);
        assert_eq!(ctor.return_type, "");
        let area = &circle.methods[1];
        let kinds: Vec<_> = area.body.iter().map(|s| s.kind).collect();
        assert_eq!(
            kinds,
            vec![
                StatementKind::If,
                StatementKind::Throw,
                StatementKind::Return
            ]
        );
        assert_eq!(area.body[0].normalized_text, "if(r<0)");
        assert_eq!(
            area.body[1].normalized_text,
            "throw new IllegalStateException(\"neg {\");"
        );
    }

    #[test]
    fn formatting_does_not_change_normalized_text() {
        let a = parse_structure("class A { void f() { foo(a,b); } }");
        let b = parse_structure("class A {\n  void f()\n  {\n    foo( a , b ) ; // call\n  }\n}\n");
        assert_eq!(a, b);
    }

    #[test]
    fn generics_arrays_and_varargs_in_params() {
        let tree = parse_structure(
            "class A { <T> List<T> g(Map<String, List<T>> m, final int[] xs, String... rest) throws IOException { return null; } }",
        );
        let g = &tree.type_decls[0].methods[0];
        assert_eq!(g.params, vec!["Map<String,List<T>>", "int[]", "String..."]);
        assert_eq!(g.return_type, "<T>List<T>");
        assert_eq!(g.modifiers, vec!["throws IOException"]);
    }

    #[test]
    fn field_initializers_with_braces_and_multiple_declarators() {
        let tree = parse_structure(
            "class A { int[] xs = {1, 2}; Map<K, V> m, n; Runnable r = () -> { go(); }; void f() {} }",
        );
        let a = &tree.type_decls[0];
        let names: Vec<_> = a.fields.iter().map(|f| f.name.as_str()).collect();
        assert_eq!(names, vec!["xs", "m", "n", "r"]);
        assert_eq!(a.fields[1].type_text, "Map<K,V>");
        assert_eq!(a.fields[2].type_text, "Map<K,V>");
        assert_eq!(a.methods.len(), 1);
    }

    #[test]
    fn enums_nested_types_and_initializers() {
        let tree = parse_structure(
            "enum Color { RED, GREEN(2) { int x() { return 1; } }, BLUE; int v; static { init(); } \
             static class Holder { void h() {} } }",
        );
        assert_eq!(tree.type_decls.len(), 2);
        let color = &tree.type_decls[0];
        assert_eq!(color.kind, TypeKind::Enum);
        let names: Vec<_> = color.fields.iter().map(|f| f.name.as_str()).collect();
        assert_eq!(names, vec!["RED", "GREEN", "BLUE", "v"]);
        assert_eq!(color.methods[0].name, "<clinit>#0");
        assert_eq!(tree.type_decls[1].name, "Color.Holder");
        assert_eq!(tree.type_decls[1].methods[0].name, "h");
    }

    #[test]
    fn control_flow_is_flattened() {
        let tree = parse_structure(
            "class A { void f() { for (int i = 0; i < n; i++) { a(); } else_(); \
             try (R r = open()) { b(); } catch (E e) { c(); } finally { d(); } \
             switch (k) { case 1: e(); break; default: g(); } \
             do { h(); } while (z); } }",
        );
        let body = &tree.type_decls[0].methods[0].body;
        let texts: Vec<_> = body.iter().map(|s| s.normalized_text.as_str()).collect();
        assert_eq!(
            texts,
            vec![
                "for(int i=0;i<n;i++)",
                "a();",
                "else_();",
                "try(R r=open())",
                "b();",
                "catch(E e)",
                "c();",
                "finally",
                "d();",
                "switch(k)",
                "case 1:",
                "e();",
                "break;",
                "default:",
                "g();",
                "do",
                "h();",
                "while(z)",
            ]
        );
    }

    #[test]
    fn unbalanced_input_is_degraded() {
        let tree = parse_structure("class A { void f() { x(); }");
        assert!(tree.degraded);
        assert_eq!(tree.type_decls.len(), 1);
        assert_eq!(tree.type_decls[0].methods.len(), 1);

        let tree = parse_structure("class A { } }");
        assert!(tree.degraded);
    }

    #[test]
    fn comments_and_literals_are_masked() {
        let tree = parse_structure("class A { /* } */ void f() { s = \"}\"; c = '{'; } // }\n }");
        assert!(!tree.degraded);
        assert_eq!(tree.type_decls[0].methods[0].body.len(), 2);
    }
}
