//! Shared domain types: key paths, source spans, scalar values, parsed
//! documents, and diagnostics.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::taxonomy::{Consequence, DefectCategory, FixPattern};

/// One step in a [`KeyPath`]: either a mapping key or a sequence index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum KeySegment {
    Key(String),
    Index(usize),
}

/// A hierarchical path to a value inside a YAML document.
///
/// The canonical text rendering joins map keys with dots and appends
/// sequence indices in brackets, e.g. `spec.containers[0].image`. Keys
/// containing `.`, `[`, or `]` are rendered as quoted segments so that
/// rendering followed by parsing always yields an equal path. The empty
/// path denotes the document root and renders as the empty string.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KeyPath {
    segments: Vec<KeySegment>,
}

impl KeyPath {
    pub fn root() -> Self {
        Self::default()
    }

    pub fn from_segments(segments: Vec<KeySegment>) -> Self {
        Self { segments }
    }

    /// Builds a path of plain map keys.
    pub fn from_keys<I, S>(keys: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            segments: keys.into_iter().map(|k| KeySegment::Key(k.into())).collect(),
        }
    }

    pub fn segments(&self) -> &[KeySegment] {
        &self.segments
    }

    pub fn is_root(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn push_key(&mut self, key: impl Into<String>) {
        self.segments.push(KeySegment::Key(key.into()));
    }

    pub fn push_index(&mut self, index: usize) {
        self.segments.push(KeySegment::Index(index));
    }

    pub fn pop(&mut self) {
        self.segments.pop();
    }

    pub fn child_key(&self, key: impl Into<String>) -> Self {
        let mut p = self.clone();
        p.push_key(key);
        p
    }

    pub fn child_index(&self, index: usize) -> Self {
        let mut p = self.clone();
        p.push_index(index);
        p
    }

    /// True when `self` starts with all segments of `prefix`.
    pub fn starts_with(&self, prefix: &KeyPath) -> bool {
        self.segments.len() >= prefix.segments.len()
            && self.segments[..prefix.segments.len()] == prefix.segments[..]
    }

    /// The last map-key segment, skipping trailing sequence indices.
    ///
    /// `spec.containers[0].image` yields `image`; `spec.hosts[2]` yields
    /// `hosts`; a pure-index path yields `None`.
    pub fn terminal_key(&self) -> Option<&str> {
        self.segments.iter().rev().find_map(|s| match s {
            KeySegment::Key(k) => Some(k.as_str()),
            KeySegment::Index(_) => None,
        })
    }

    /// Canonical text rendering. Inverse of [`KeyPath::parse`].
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (i, seg) in self.segments.iter().enumerate() {
            match seg {
                KeySegment::Key(k) => {
                    if i > 0 {
                        out.push('.');
                    }
                    if needs_quoting(k) {
                        out.push('"');
                        for c in k.chars() {
                            if c == '"' || c == '\\' {
                                out.push('\\');
                            }
                            out.push(c);
                        }
                        out.push('"');
                    } else {
                        out.push_str(k);
                    }
                }
                KeySegment::Index(n) => {
                    out.push('[');
                    out.push_str(&n.to_string());
                    out.push(']');
                }
            }
        }
        out
    }

    /// Parses a canonical rendering back into a path.
    pub fn parse(text: &str) -> Result<Self, KeyPathParseError> {
        let mut segments = Vec::new();
        let chars: Vec<char> = text.chars().collect();
        let mut i = 0;
        let err = |pos: usize, what: &str| KeyPathParseError {
            position: pos,
            reason: what.to_string(),
        };
        while i < chars.len() {
            match chars[i] {
                '[' => {
                    let start = i + 1;
                    let mut j = start;
                    while j < chars.len() && chars[j] != ']' {
                        j += 1;
                    }
                    if j == chars.len() {
                        return Err(err(i, "unterminated index bracket"));
                    }
                    let digits: String = chars[start..j].iter().collect();
                    let n: usize = digits
                        .parse()
                        .map_err(|_| err(start, "index is not a non-negative integer"))?;
                    segments.push(KeySegment::Index(n));
                    i = j + 1;
                }
                '.' => {
                    // A dot introduces the next key segment; it is invalid at
                    // the start of the path or directly before another dot.
                    if segments.is_empty() {
                        return Err(err(i, "path starts with a separator"));
                    }
                    i += 1;
                    if i >= chars.len() {
                        return Err(err(i, "path ends with a separator"));
                    }
                    let (seg, next) = parse_key_segment(&chars, i).map_err(|(p, m)| err(p, m))?;
                    segments.push(KeySegment::Key(seg));
                    i = next;
                }
                _ => {
                    if !segments.is_empty() {
                        return Err(err(i, "missing separator between segments"));
                    }
                    let (seg, next) = parse_key_segment(&chars, i).map_err(|(p, m)| err(p, m))?;
                    segments.push(KeySegment::Key(seg));
                    i = next;
                }
            }
        }
        Ok(Self { segments })
    }
}

fn needs_quoting(key: &str) -> bool {
    key.is_empty() || key.contains(['.', '[', ']']) || key.starts_with('"')
}

/// Parses one key segment starting at `i`; returns the key text and the
/// position just past it (a following `.` or `[` is not consumed).
fn parse_key_segment(chars: &[char], i: usize) -> Result<(String, usize), (usize, &'static str)> {
    if chars[i] == '"' {
        let mut out = String::new();
        let mut j = i + 1;
        loop {
            if j >= chars.len() {
                return Err((i, "unterminated quoted segment"));
            }
            match chars[j] {
                '\\' => {
                    if j + 1 >= chars.len() {
                        return Err((j, "dangling escape"));
                    }
                    out.push(chars[j + 1]);
                    j += 2;
                }
                '"' => return Ok((out, j + 1)),
                c => {
                    out.push(c);
                    j += 1;
                }
            }
        }
    } else {
        let mut out = String::new();
        let mut j = i;
        while j < chars.len() && !matches!(chars[j], '.' | '[' | ']') {
            out.push(chars[j]);
            j += 1;
        }
        if j < chars.len() && chars[j] == ']' {
            return Err((j, "unexpected closing bracket"));
        }
        if out.is_empty() {
            return Err((i, "empty key segment"));
        }
        Ok((out, j))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid key path at position {position}: {reason}")]
pub struct KeyPathParseError {
    pub position: usize,
    pub reason: String,
}

impl fmt::Display for KeyPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl FromStr for KeyPath {
    type Err = KeyPathParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

impl Serialize for KeyPath {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.render())
    }
}

impl<'de> Deserialize<'de> for KeyPath {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        KeyPath::parse(&s).map_err(D::Error::custom)
    }
}

/// A region of an original source file. Lines and columns are 1-based and
/// measured in characters; columns refer to the file as written on disk,
/// not to any directive-masked intermediate text. `end_col` points one
/// past the final character, so a zero-width span has start == end.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SourceSpan {
    pub file: PathBuf,
    pub start_line: u32,
    pub start_col: u32,
    pub end_line: u32,
    pub end_col: u32,
}

impl SourceSpan {
    pub fn new(
        file: impl Into<PathBuf>,
        start_line: u32,
        start_col: u32,
        end_line: u32,
        end_col: u32,
    ) -> Self {
        debug_assert!(
            (start_line, start_col) <= (end_line, end_col),
            "span start must not exceed end"
        );
        Self {
            file: file.into(),
            start_line,
            start_col,
            end_line,
            end_col,
        }
    }

    /// A zero-width span at a single position.
    pub fn point(file: impl Into<PathBuf>, line: u32, col: u32) -> Self {
        Self::new(file, line, col, line, col)
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}:{}",
            self.file.display(),
            self.start_line,
            self.start_col
        )
    }
}

/// Resolved type of a scalar leaf.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScalarTag {
    String,
    Int,
    Float,
    Bool,
    Null,
    /// The scalar text embeds at least one masked template directive.
    DirectiveBearing,
}

impl ScalarTag {
    pub fn name(self) -> &'static str {
        match self {
            ScalarTag::String => "string",
            ScalarTag::Int => "int",
            ScalarTag::Float => "float",
            ScalarTag::Bool => "bool",
            ScalarTag::Null => "null",
            ScalarTag::DirectiveBearing => "directive-bearing",
        }
    }
}

/// A scalar leaf value. `raw_text` holds the scalar as produced by the
/// parser; when the source contained template directives it holds the
/// masked placeholder form (e.g. `data-⟦D0⟧`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScalarValue {
    pub raw_text: String,
    pub tag: ScalarTag,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub directive_ids: Vec<String>,
}

impl ScalarValue {
    /// Wraps a scalar, promoting the tag to [`ScalarTag::DirectiveBearing`]
    /// when the text embeds masked directive placeholders.
    pub fn new(raw_text: impl Into<String>, tag: ScalarTag) -> Self {
        let raw_text = raw_text.into();
        let directive_ids = extract_directive_ids(&raw_text);
        let tag = if directive_ids.is_empty() {
            tag
        } else {
            ScalarTag::DirectiveBearing
        };
        Self {
            raw_text,
            tag,
            directive_ids,
        }
    }

    pub fn string(raw_text: impl Into<String>) -> Self {
        Self::new(raw_text, ScalarTag::String)
    }

    pub fn is_null(&self) -> bool {
        self.tag == ScalarTag::Null
    }

    pub fn has_directives(&self) -> bool {
        !self.directive_ids.is_empty()
    }

    /// Integer view of the value, when the tag allows one.
    pub fn as_i64(&self) -> Option<i64> {
        if self.tag == ScalarTag::Int {
            self.raw_text.parse().ok()
        } else {
            None
        }
    }
}

/// Opening and closing delimiters of a masked directive placeholder.
pub const PLACEHOLDER_OPEN: char = '⟦';
pub const PLACEHOLDER_CLOSE: char = '⟧';

/// Collects `Dk` identifiers embedded as `⟦Dk⟧` in scalar text, in order
/// of appearance and without duplicates.
pub fn extract_directive_ids(text: &str) -> Vec<String> {
    let mut ids = Vec::new();
    let mut rest = text;
    while let Some(open) = rest.find(PLACEHOLDER_OPEN) {
        rest = &rest[open + PLACEHOLDER_OPEN.len_utf8()..];
        let Some(close) = rest.find(PLACEHOLDER_CLOSE) else {
            break;
        };
        let id = &rest[..close];
        if id.len() > 1
            && id.starts_with('D')
            && id[1..].bytes().all(|b| b.is_ascii_digit())
            && !ids.iter().any(|x| x == id)
        {
            ids.push(id.to_string());
        }
        rest = &rest[close + PLACEHOLDER_CLOSE.len_utf8()..];
    }
    ids
}

/// What kind of configuration script a document came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScriptKind {
    /// A plain manifest applied with kubectl-style utilities.
    KindScript,
    /// A file under a Helm chart's `templates/` directory.
    HelmTemplate,
    /// A Helm chart's `values.yaml`.
    HelmValues,
}

impl ScriptKind {
    pub fn name(self) -> &'static str {
        match self {
            ScriptKind::KindScript => "kind-script",
            ScriptKind::HelmTemplate => "helm-template",
            ScriptKind::HelmValues => "helm-values",
        }
    }
}

/// One scalar leaf of a parsed document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Leaf {
    pub path: KeyPath,
    pub value: ScalarValue,
    pub span: SourceSpan,
}

/// One parsed YAML document with hierarchy-preserving leaves.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigDocument {
    pub file: PathBuf,
    /// 0-based position within a multi-document file, counting every
    /// document separator (skipped empty documents keep their slot).
    pub doc_index: usize,
    pub script_kind: ScriptKind,
    pub leaves: Vec<Leaf>,
    pub kind: Option<String>,
    pub api_version: Option<String>,
    pub name: Option<String>,
    pub namespace: Option<String>,
    /// Directive identifier → verbatim `{{ ... }}` text, for every
    /// directive attributed to this document.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub directive_table: BTreeMap<String, String>,
    /// Mapping keys that appeared more than once (last occurrence wins);
    /// recorded at the span of the repeated key.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub duplicate_keys: Vec<(KeyPath, SourceSpan)>,
}

impl ConfigDocument {
    /// Finds the leaf at an exact path.
    pub fn leaf(&self, path: &KeyPath) -> Option<&Leaf> {
        self.leaves.iter().find(|l| &l.path == path)
    }

    /// Finds the leaf at an exact path given in canonical text form.
    ///
    /// Panics when `path` is not valid canonical syntax; intended for
    /// statically known paths.
    pub fn leaf_at(&self, path: &str) -> Option<&Leaf> {
        let parsed = KeyPath::parse(path).expect("static key path");
        self.leaf(&parsed)
    }

    /// All leaves whose path starts with `prefix`.
    pub fn leaves_under<'a>(&'a self, prefix: &'a KeyPath) -> impl Iterator<Item = &'a Leaf> {
        self.leaves.iter().filter(move |l| l.path.starts_with(prefix))
    }

    pub fn has_directives(&self) -> bool {
        !self.directive_table.is_empty()
    }
}

/// Diagnostic severity, ordered from least to most severe.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Info,
    Warning,
    Error,
}

impl Severity {
    pub fn name(self) -> &'static str {
        match self {
            Severity::Info => "info",
            Severity::Warning => "warning",
            Severity::Error => "error",
        }
    }

    /// SARIF result level for this severity.
    pub fn sarif_level(self) -> &'static str {
        match self {
            Severity::Info => "note",
            Severity::Warning => "warning",
            Severity::Error => "error",
        }
    }
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Severity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "info" => Ok(Severity::Info),
            "warning" | "warn" => Ok(Severity::Warning),
            "error" => Ok(Severity::Error),
            other => Err(format!("unknown severity: {other}")),
        }
    }
}

/// One alert produced by a rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub rule_id: String,
    pub category: DefectCategory,
    pub severity: Severity,
    pub location: SourceSpan,
    pub key_path: KeyPath,
    pub message: String,
    pub consequence: Consequence,
    pub fix_pattern: FixPattern,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fix_hint: Option<String>,
}
