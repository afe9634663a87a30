//! Event-driven YAML loading: builds an owned node tree per document with
//! source positions, resolving anchors/aliases and merge keys during
//! flattening.

use std::collections::HashMap;
use std::path::Path;

use yaml_rust2::parser::{Event, MarkedEventReceiver, Parser};
use yaml_rust2::scanner::{Marker, TScalarStyle};

use crate::model::{KeyPath, ScalarTag, ScalarValue, SourceSpan};
use crate::parser::mask::MaskOutcome;

#[derive(Debug, Clone)]
pub(crate) enum Node {
    Scalar {
        value: String,
        style: TScalarStyle,
        /// Explicit tag suffix (`str`, `int`, ...) when one was written.
        tag: Option<String>,
        /// 1-based position of the first scalar character.
        line: u32,
        col: u32,
    },
    Seq(Vec<Node>),
    Map(Vec<(Node, Node)>),
}

#[derive(Debug)]
pub(crate) struct RawDoc {
    pub root: Option<Node>,
    /// Line of the document-start event, used to attribute directives.
    pub start_line: u32,
}

/// Ceiling on the total number of nodes materialized through alias
/// expansion per file. Exponential anchor/alias chains ("YAML bombs")
/// hit this long before they exhaust memory.
const ALIAS_EXPANSION_LIMIT: usize = 200_000;

#[derive(Debug, Default)]
pub(crate) struct TreeBuilder {
    pub docs: Vec<RawDoc>,
    stack: Vec<Frame>,
    root: Option<Node>,
    doc_start_line: u32,
    anchors: HashMap<usize, Node>,
    alias_nodes: usize,
    pub undefined_alias: Option<(u32, u32)>,
    pub alias_overflow: Option<(u32, u32)>,
}

#[derive(Debug)]
enum Frame {
    Seq { items: Vec<Node>, aid: usize },
    Map {
        entries: Vec<(Node, Node)>,
        pending_key: Option<Node>,
        aid: usize,
    },
}

impl TreeBuilder {
    fn attach(&mut self, node: Node) {
        match self.stack.last_mut() {
            Some(Frame::Seq { items, .. }) => items.push(node),
            Some(Frame::Map { entries, pending_key, .. }) => match pending_key.take() {
                Some(key) => entries.push((key, node)),
                None => *pending_key = Some(node),
            },
            None => self.root = Some(node),
        }
    }

    fn register_anchor(&mut self, aid: usize, node: &Node) {
        if aid != 0 {
            self.anchors.insert(aid, node.clone());
        }
    }
}

impl MarkedEventReceiver for TreeBuilder {
    fn on_event(&mut self, ev: Event, mark: Marker) {
        match ev {
            Event::StreamStart | Event::StreamEnd | Event::Nothing => {}
            Event::DocumentStart => {
                self.doc_start_line = mark.line() as u32;
                self.root = None;
            }
            Event::DocumentEnd => {
                self.docs.push(RawDoc {
                    root: self.root.take(),
                    start_line: self.doc_start_line,
                });
            }
            Event::Scalar(value, style, aid, tag) => {
                let tag = tag.map(|t| t.suffix);
                let node = Node::Scalar {
                    value,
                    style,
                    tag,
                    line: mark.line() as u32,
                    col: mark.col() as u32 + 1,
                };
                self.register_anchor(aid, &node);
                self.attach(node);
            }
            Event::SequenceStart(aid, _) => self.stack.push(Frame::Seq { items: Vec::new(), aid }),
            Event::SequenceEnd => {
                let Some(Frame::Seq { items, aid }) = self.stack.pop() else {
                    return;
                };
                let node = Node::Seq(items);
                self.register_anchor(aid, &node);
                self.attach(node);
            }
            Event::MappingStart(aid, _) => self.stack.push(Frame::Map {
                entries: Vec::new(),
                pending_key: None,
                aid,
            }),
            Event::MappingEnd => {
                let Some(Frame::Map { entries, aid, .. }) = self.stack.pop() else {
                    return;
                };
                let node = Node::Map(entries);
                self.register_anchor(aid, &node);
                self.attach(node);
            }
            Event::Alias(aid) => match self.anchors.get(&aid) {
                Some(node) => {
                    self.alias_nodes += node_count(node);
                    if self.alias_nodes > ALIAS_EXPANSION_LIMIT {
                        if self.alias_overflow.is_none() {
                            self.alias_overflow =
                                Some((mark.line() as u32, mark.col() as u32 + 1));
                        }
                        return;
                    }
                    let node = node.clone();
                    self.attach(node);
                }
                None => {
                    if self.undefined_alias.is_none() {
                        self.undefined_alias =
                            Some((mark.line() as u32, mark.col() as u32 + 1));
                    }
                }
            },
        }
    }
}

/// Runs the parser over (possibly masked) text.
pub(crate) fn load_documents(
    text: &str,
) -> Result<TreeBuilder, yaml_rust2::scanner::ScanError> {
    let mut builder = TreeBuilder::default();
    let mut parser = Parser::new_from_str(text);
    parser.load(&mut builder, true)?;
    Ok(builder)
}

/// Flattening context: the parsed text split into character lines, plus the
/// optional mask for translating columns back to original coordinates.
pub(crate) struct SpanContext<'a> {
    pub file: &'a Path,
    pub lines: Vec<Vec<char>>,
    pub mask: Option<&'a MaskOutcome>,
}

impl<'a> SpanContext<'a> {
    pub fn new(parsed_text: &str, file: &'a Path, mask: Option<&'a MaskOutcome>) -> Self {
        let mut lines: Vec<Vec<char>> =
            parsed_text.split('\n').map(|l| l.chars().collect()).collect();
        if parsed_text.ends_with('\n') {
            lines.pop();
        }
        Self { file, lines, mask }
    }

    fn line(&self, l0: usize) -> &[char] {
        self.lines.get(l0).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Computes the span of a scalar from its start marker, in original
    /// file coordinates.
    fn scalar_span(&self, line: u32, col: u32, style: TScalarStyle, value: &str) -> SourceSpan {
        let l0 = line as usize - 1;
        let c0 = col as usize - 1;
        let (end_line, end_col) = match style {
            TScalarStyle::Plain => self.plain_end(l0, c0, value),
            TScalarStyle::SingleQuoted => self.quoted_end(l0, c0, '\''),
            TScalarStyle::DoubleQuoted => self.quoted_end(l0, c0, '"'),
            TScalarStyle::Literal | TScalarStyle::Folded => self.block_end(l0, c0, value),
        };
        let (sl, sc) = (line, col);
        let (el, ec) = (end_line as u32 + 1, end_col as u32 + 1);
        match self.mask {
            Some(mask) => SourceSpan::new(
                self.file,
                sl,
                mask.map_start_col(sl, sc),
                el,
                mask.map_end_col(el, ec),
            ),
            None => SourceSpan::new(self.file, sl, sc, el, ec),
        }
    }

    fn plain_end(&self, l0: usize, c0: usize, value: &str) -> (usize, usize) {
        if value.is_empty() {
            return (l0, c0);
        }
        let line = self.line(l0);
        let rest = &line[c0.min(line.len())..];
        let vchars: Vec<char> = value.chars().collect();
        if !value.contains('\n') && rest.len() >= vchars.len() && rest[..vchars.len()] == vchars[..]
        {
            (l0, c0 + vchars.len())
        } else {
            // Folded multi-line plain scalar; approximate with the line end.
            (l0, line.len())
        }
    }

    fn quoted_end(&self, l0: usize, c0: usize, quote: char) -> (usize, usize) {
        let mut l = l0;
        let mut c = c0 + 1; // skip the opening quote
        loop {
            let line = self.line(l);
            if c >= line.len() {
                if l + 1 >= self.lines.len() {
                    return (l, line.len());
                }
                l += 1;
                c = 0;
                continue;
            }
            let ch = line[c];
            if quote == '"' && ch == '\\' {
                c += 2;
                continue;
            }
            if ch == quote {
                if quote == '\'' && line.get(c + 1) == Some(&'\'') {
                    c += 2; // escaped single quote
                    continue;
                }
                return (l, c + 1);
            }
            c += 1;
        }
    }

    fn block_end(&self, l0: usize, c0: usize, value: &str) -> (usize, usize) {
        if value.is_empty() {
            return (l0, c0);
        }
        // The marker points at the first content character; the block runs
        // while lines are blank or indented at least that far.
        let mut last_content = l0;
        let mut l = l0 + 1;
        while l < self.lines.len() {
            let line = self.line(l);
            let is_blank = line.iter().all(|c| c.is_whitespace());
            if is_blank {
                l += 1;
                continue;
            }
            let indent = line.iter().take_while(|c| c.is_whitespace()).count();
            if indent < c0 {
                break;
            }
            last_content = l;
            l += 1;
        }
        (last_content, self.line(last_content).len())
    }
}

/// Output of flattening one document.
#[derive(Debug, Default)]
pub(crate) struct Flattened {
    pub leaves: Vec<(KeyPath, ScalarValue, SourceSpan)>,
    pub duplicate_keys: Vec<(KeyPath, SourceSpan)>,
}

pub(crate) fn flatten(root: &Node, ctx: &SpanContext<'_>) -> Flattened {
    let mut out = Flattened::default();
    let mut path = KeyPath::root();
    flatten_node(root, &mut path, ctx, &mut out);
    out
}

fn flatten_node(node: &Node, path: &mut KeyPath, ctx: &SpanContext<'_>, out: &mut Flattened) {
    match node {
        Node::Scalar { value, style, tag, line, col } => {
            let resolved = resolve_tag(value, *style, tag.as_deref());
            let span = ctx.scalar_span(*line, *col, *style, value);
            out.leaves
                .push((path.clone(), ScalarValue::new(value.clone(), resolved), span));
        }
        Node::Seq(items) => {
            for (i, item) in items.iter().enumerate() {
                path.push_index(i);
                flatten_node(item, path, ctx, out);
                path.pop();
            }
        }
        Node::Map(entries) => flatten_map(entries, path, ctx, out),
    }
}

const MERGE_KEY: &str = "<<";

fn key_text(node: &Node) -> String {
    match node {
        Node::Scalar { value, .. } => value.clone(),
        // Non-scalar mapping keys are vanishingly rare in manifests; keep a
        // stable placeholder so flattening still terminates.
        Node::Seq(_) | Node::Map(_) => "<non-scalar-key>".to_string(),
    }
}

fn key_pos(node: &Node, ctx: &SpanContext<'_>) -> SourceSpan {
    match node {
        Node::Scalar { value, style, line, col, .. } => ctx.scalar_span(*line, *col, *style, value),
        _ => SourceSpan::point(ctx.file, 1, 1),
    }
}

fn flatten_map(
    entries: &[(Node, Node)],
    path: &mut KeyPath,
    ctx: &SpanContext<'_>,
    out: &mut Flattened,
) {
    let mut resolved: Vec<(String, &Node)> = Vec::with_capacity(entries.len());
    let mut index: HashMap<String, usize> = HashMap::with_capacity(entries.len());
    let mut merge_sources: Vec<&Node> = Vec::new();

    for (k_node, v_node) in entries {
        let key = key_text(k_node);
        if key == MERGE_KEY {
            collect_merge_sources(v_node, &mut merge_sources);
            continue;
        }
        match index.get(&key) {
            Some(&i) => {
                // Last occurrence wins; the repeat is recorded for the
                // syntax rule.
                out.duplicate_keys
                    .push((path.child_key(&key), key_pos(k_node, ctx)));
                resolved[i].1 = v_node;
            }
            None => {
                index.insert(key.clone(), resolved.len());
                resolved.push((key, v_node));
            }
        }
    }

    // Merge-key semantics: explicit keys win; earlier sources win over
    // later ones.
    for source in merge_sources {
        for (key, value) in effective_entries(source) {
            if !index.contains_key(&key) {
                index.insert(key.clone(), resolved.len());
                resolved.push((key, value));
            }
        }
    }

    for (key, value) in resolved {
        path.push_key(key);
        flatten_node(value, path, ctx, out);
        path.pop();
    }
}

fn collect_merge_sources<'n>(value: &'n Node, out: &mut Vec<&'n Node>) {
    match value {
        Node::Map(_) => out.push(value),
        Node::Seq(items) => out.extend(items.iter().filter(|n| matches!(n, Node::Map(_)))),
        Node::Scalar { .. } => {}
    }
}

/// Entries of a map after applying its own merge keys (no duplicate notes).
fn effective_entries(node: &Node) -> Vec<(String, &Node)> {
    let Node::Map(entries) = node else {
        return Vec::new();
    };
    let mut resolved: Vec<(String, &Node)> = Vec::new();
    let mut seen: HashMap<String, usize> = HashMap::new();
    let mut merge_sources: Vec<&Node> = Vec::new();
    for (k_node, v_node) in entries {
        let key = key_text(k_node);
        if key == MERGE_KEY {
            collect_merge_sources(v_node, &mut merge_sources);
            continue;
        }
        match seen.get(&key) {
            Some(&i) => resolved[i].1 = v_node,
            None => {
                seen.insert(key.clone(), resolved.len());
                resolved.push((key, v_node));
            }
        }
    }
    for source in merge_sources {
        for (key, value) in effective_entries(source) {
            if !seen.contains_key(&key) {
                seen.insert(key.clone(), resolved.len());
                resolved.push((key, value));
            }
        }
    }
    resolved
}

/// True when a document root is just an empty/null scalar.
pub(crate) fn is_empty_root(node: &Node) -> bool {
    match node {
        Node::Scalar { value, style, tag, .. } => {
            *style == TScalarStyle::Plain
                && tag.is_none()
                && matches!(value.as_str(), "" | "~" | "null" | "Null" | "NULL")
        }
        _ => false,
    }
}

fn resolve_tag(value: &str, style: TScalarStyle, explicit: Option<&str>) -> ScalarTag {
    if let Some(suffix) = explicit {
        return match suffix {
            "int" => ScalarTag::Int,
            "float" => ScalarTag::Float,
            "bool" => ScalarTag::Bool,
            "null" => ScalarTag::Null,
            _ => ScalarTag::String,
        };
    }
    if style != TScalarStyle::Plain {
        return ScalarTag::String;
    }
    plain_scalar_tag(value)
}

/// Core-schema resolution for plain scalars.
fn plain_scalar_tag(v: &str) -> ScalarTag {
    match v {
        "" | "~" | "null" | "Null" | "NULL" => return ScalarTag::Null,
        "true" | "True" | "TRUE" | "false" | "False" | "FALSE" => return ScalarTag::Bool,
        ".inf" | "+.inf" | "-.inf" | ".Inf" | "+.Inf" | "-.Inf" | ".nan" | ".NaN" | ".NAN" => {
            return ScalarTag::Float
        }
        _ => {}
    }
    if is_int(v) {
        ScalarTag::Int
    } else if is_float(v) {
        ScalarTag::Float
    } else {
        ScalarTag::String
    }
}

fn is_int(v: &str) -> bool {
    let body = v.strip_prefix(['-', '+']).unwrap_or(v);
    if let Some(hex) = body.strip_prefix("0x") {
        return !hex.is_empty() && hex.bytes().all(|b| b.is_ascii_hexdigit());
    }
    if let Some(oct) = body.strip_prefix("0o") {
        return !oct.is_empty() && oct.bytes().all(|b| (b'0'..=b'7').contains(&b));
    }
    !body.is_empty() && body.bytes().all(|b| b.is_ascii_digit())
}

fn is_float(v: &str) -> bool {
    let body = v.strip_prefix(['-', '+']).unwrap_or(v);
    if body.is_empty() {
        return false;
    }
    let has_structure = body.contains('.') || body.contains(['e', 'E']);
    has_structure && body.parse::<f64>().is_ok()
}
